//! Builds the stable family of every admissible rank on projective n-space
//! with the unit polarisation and prints one line per rank.
//!
//! Usage: cargo run --release --example projective_sweep -- [n]

use klyachko::construction::verify_construction;
use klyachko::degree::PolarisedDivisor;
use klyachko::fan::Fan;
use klyachko::json::fmt_rat;

fn main() {
    let n: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("dimension must be a positive integer"))
        .unwrap_or(4);
    let fan = Fan::projective_space(n);
    let mut coeffs = vec![0i64; n + 1];
    coeffs[n] = 1;
    let divisor = PolarisedDivisor::new(&fan, coeffs).expect("unit divisor is ample");

    let start = std::time::Instant::now();
    let report = verify_construction(&fan, &divisor).expect("construction runs");
    for row in &report.rows {
        let locus = match row.sing_dim {
            None => "locally free".to_string(),
            Some(s) => format!("singular in dimension {s}"),
        };
        println!(
            "rank {}: slope {}, {}, {}",
            row.rank,
            fmt_rat(&row.slope),
            if row.stable { "stable" } else { "NOT stable" },
            locus,
        );
    }
    println!(
        "all checks {} in {:?}",
        if report.all_pass { "passed" } else { "FAILED" },
        start.elapsed()
    );
    std::process::exit(i32::from(!report.all_pass));
}
