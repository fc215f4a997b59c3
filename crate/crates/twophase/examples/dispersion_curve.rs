//! Rayleigh-Taylor dispersion analysis: critical wavenumber, growth-rate
//! curve and right-half-plane zero counts, with the fixed-point cross-check.
//!
//! ```bash
//! cargo run --release --example dispersion_curve
//! ```

use twophase::dispersion::fixed_point_growth_rate;
use twophase::{critical_wavenumber, dispersion_curve, FluidParams, Rectangle};

fn main() {
    // heavy fluid on top: unstable below tau* = 1
    let p = FluidParams::new(1.0, 2.0, 1.0, 1.0, 1.0, 1.0).unwrap();
    let tau_star = critical_wavenumber(&p).unwrap();
    println!("tau* = {tau_star}");

    let grid: Vec<f64> = (1..=14).map(|i| 0.1 * i as f64).collect();
    let curve = dispersion_curve(&p, &grid, &Rectangle::default()).unwrap();
    println!(
        "\n{:>6} {:>16} {:>12} {:>16}",
        "tau", "lambda*", "zero count", "fixed-point"
    );
    for row in &curve.rows {
        let oracle = fixed_point_growth_rate(&p, row.tau, 1e-12).unwrap();
        println!(
            "{:>6.2} {:>16} {:>12} {:>16}",
            row.tau,
            row.lambda_star
                .map(|l| format!("{l:.9}"))
                .unwrap_or_else(|| "-".into()),
            row.zero_count,
            oracle
                .map(|l| format!("{l:.9}"))
                .unwrap_or_else(|| "-".into()),
        );
    }

    // light fluid on top: the right half-plane is zero-free
    let stable = FluidParams::new(2.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
    let counts: Vec<u32> = [0.1, 0.5, 1.0, 2.0, 5.0]
        .iter()
        .map(|&tau| twophase::count_zeros_rhp(&stable, tau, &Rectangle::default()).unwrap())
        .collect();
    println!("\nstable configuration zero counts: {counts:?}");
}
