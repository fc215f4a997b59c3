//! Constructs the interface response function k(z) from the two-phase Stokes
//! interface problem and verifies its limit anchors.
//!
//! ```bash
//! cargo run --release --example k_response
//! ```

use num_complex::Complex64;
use twophase::{k_of_z, FluidParams};

fn main() {
    let p = FluidParams::new(1.0, 2.0, 0.5, 1.5, 1.0, 1.0).unwrap();
    println!("configuration: {p:?}\n");

    println!("{:>12} {:>24} {:>24}", "|z|", "k(z)", "z k(z)");
    for exp in [-6i32, -4, -2, 0, 2, 4, 6, 8] {
        let z = Complex64::from_polar(10f64.powi(exp), std::f64::consts::FRAC_PI_4);
        let k = k_of_z(&p, z).unwrap();
        let zk = z * k;
        println!(
            "{:>12.1e} {:>11.6} {:+.6}i {:>11.6} {:+.6}i",
            z.norm(),
            k.re,
            k.im,
            zk.re,
            zk.im
        );
    }

    // the two anchors that pin the construction
    let k0 = 1.0 / (2.0 * (p.mu1 + p.mu2));
    let k_small = k_of_z(&p, Complex64::new(1e-6, 0.0)).unwrap();
    println!("\nk(0) anchor : k -> 1/(2(mu1+mu2)) = {k0}");
    println!("  |k(1e-6) - k(0)| = {:.3e}", (k_small - k0).norm());
    let z_big = Complex64::new(1e8, 0.0);
    let zk_inf = 1.0 / (p.rho1 + p.rho2);
    let k_big = k_of_z(&p, z_big).unwrap();
    println!("zk anchor   : zk -> 1/(rho1+rho2) = {zk_inf}");
    println!("  |zk(1e8) - zk_inf| = {:.3e}", (z_big * k_big - zk_inf).norm());
}
