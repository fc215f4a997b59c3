//! Fractional-norm machinery: the two equivalent seminorm routes, the Riesz
//! isomorphism, Hardy-type interval ratios, the C^1 extension and the
//! squared partition of unity.
//!
//! ```bash
//! cargo run --release --example fractional_norms
//! ```

use twophase::{
    extend_c1, hardy_ratio, partition_of_unity, poisson_seminorm, riesz_potential,
    slobodeckij_seminorm, SampledFunction,
};

fn main() {
    let (s, p) = (0.5, 2.0);
    let g = SampledFunction::from_fn_periodic(1, 256, 24.0, |x| {
        let d = x[0] - 12.0;
        (-d * d / 2.0).exp()
    });
    let slo = slobodeckij_seminorm(&g, s, p).unwrap();
    let poi = poisson_seminorm(&g, s, p).unwrap();
    println!("Gaussian bump, s = {s}, p = {p}:");
    println!("  double-integral seminorm : {:.8}", slo.value);
    println!("  Poisson-semigroup route  : {:.8}", poi.value);
    println!("  ratio                    : {:.6}", poi.value / slo.value);

    // Riesz potential round trip on a mean-zero field
    let tau = 2.0 * std::f64::consts::PI;
    let osc = SampledFunction::from_fn_periodic(1, 64, tau, |x| x[0].sin() + 0.3 * (5.0 * x[0]).cos());
    let back = riesz_potential(&riesz_potential(&osc, 0.7).unwrap(), -0.7).unwrap();
    let err = back
        .values
        .iter()
        .zip(&osc.values)
        .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
    println!("\nRiesz round trip I^s I^-s     : max error {err:.3e}");

    // Hardy-type ratios on shrinking intervals
    println!("\nHardy ratios ||g||_W^r / ||g||_H^1 (r = 1/2, p = 2):");
    println!("{:>6} {:>10} {:>10} {:>10} {:>10} {:>10}", "a", "t", "t^2", "t^3", "t^4", "t^5");
    for a in [0.25, 0.5, 1.0] {
        print!("{a:>6.2}");
        for k in 1..=5 {
            let g = SampledFunction::from_fn_interval(257, a, |t| t.powi(k));
            print!(" {:>10.5}", hardy_ratio(&g, 0.5, 2.0).unwrap());
        }
        println!();
    }

    // extension operator
    let h = SampledFunction::from_fn_interval(129, 1.0, |t| t * t * (1.0 - 0.4 * t));
    let e = extend_c1(&h).unwrap();
    println!(
        "\nextension: sup|Eh|/sup|h| = {:.4} (bound 5), zero beyond 2a: {}",
        e.max_abs() / h.max_abs(),
        e.values[2 * 128..].iter().all(|&v| v == 0.0)
    );

    // partition of unity
    let fam = partition_of_unity(1.0, &[-1.5], &[1.5], 301).unwrap();
    let mut dev = 0.0f64;
    for idx in 0..301 {
        let sum: f64 = fam.members.iter().map(|f| f.values[idx] * f.values[idx]).sum();
        dev = dev.max((sum - 1.0).abs());
    }
    println!(
        "partition of unity: {} members, max |sum phi^2 - 1| = {dev:.3e}",
        fam.members.len()
    );
}
