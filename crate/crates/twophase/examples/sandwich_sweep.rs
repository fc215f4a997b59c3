//! Sweeps the extended symbol over its sector grid and reports the extrema
//! of |s~| / (|lambda| + |tau|), the two-sided bound that controls
//! solvability of the linearized interface evolution.
//!
//! ```bash
//! cargo run --release --example sandwich_sweep
//! ```

use twophase::{find_growth_rate, verify_sandwich, FluidParams, SweepGridSpec};

fn report(label: &str, p: &FluidParams, spec: &SweepGridSpec) {
    let r = verify_sandwich(p, spec).unwrap();
    println!("{label}: lambda0 = {}", spec.lambda0);
    println!("  points evaluated : {}", r.points);
    println!("  min |s~|/(|l|+|t|) = {:.6e}", r.min_ratio);
    println!(
        "    at lambda = {:.3e}{:+.3e}i, tau = {:.3e}{:+.3e}i",
        r.argmin.lambda_re, r.argmin.lambda_im, r.argmin.tau_re, r.argmin.tau_im
    );
    println!("  max |s~|/(|l|+|t|) = {:.6e}", r.max_ratio);
    println!("  lower bound positive: {}\n", r.pass);
}

fn main() {
    // Rayleigh-Taylor case: the bound needs |lambda| above the growth rates
    let rt = FluidParams::new(1.0, 2.0, 1.0, 1.0, 1.0, 1.0).unwrap();
    let max_rate = (1..20)
        .map(|i| {
            find_growth_rate(&rt, 0.05 * i as f64)
                .unwrap()
                .unwrap_or(0.0)
        })
        .fold(0.0f64, f64::max);
    let spec = SweepGridSpec {
        lambda0: 2.0 * max_rate,
        per_decade: 8.0,
        rays: 5,
        zeta_points: 3,
        ..SweepGridSpec::default()
    };
    report("heavy-on-top", &rt, &spec);

    // stable case: the bound extends to arbitrarily small |lambda|
    let stable = FluidParams::new(2.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
    let spec = SweepGridSpec {
        lambda0: 1e-3,
        per_decade: 8.0,
        rays: 5,
        zeta_points: 3,
        ..SweepGridSpec::default()
    };
    report("light-on-top", &stable, &spec);
}
