//! Time-domain interface response h(t)/h0 by pole-subtracted Talbot
//! inversion: exponential growth in the Rayleigh-Taylor regime, damped
//! oscillation for the stable stratification.
//!
//! ```bash
//! cargo run --release --example mode_response
//! ```

use twophase::{find_growth_rate, mode_response, FluidParams, TalbotOptions};

fn main() {
    let tau = 0.5;

    let rt = FluidParams::new(1.0, 2.0, 1.0, 1.0, 1.0, 1.0).unwrap();
    let lambda_star = find_growth_rate(&rt, tau).unwrap().unwrap();
    let t_max = 20.0 / lambda_star;
    let times: Vec<f64> = (1..=12).map(|i| i as f64 * t_max / 12.0).collect();
    let resp = mode_response(&rt, tau, &times, &TalbotOptions::default()).unwrap();
    println!("Rayleigh-Taylor configuration, tau = {tau}");
    println!("  lambda* = {lambda_star:.12}");
    println!("  fitted growth rate = {:.12}", resp.fitted_rate.unwrap());
    println!("\n{:>10} {:>16}", "t", "h(t)/h0");
    for (t, v) in resp.times.iter().zip(resp.values_c()) {
        println!("{t:>10.3} {:>16.6e}", v.re);
    }

    let stable = FluidParams::new(2.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
    let times: Vec<f64> = (1..=16).map(|i| i as f64).collect();
    let resp = mode_response(&stable, tau, &times, &TalbotOptions::default()).unwrap();
    println!("\nstable configuration, tau = {tau}");
    println!(
        "  discrete modes handled by residues: {:?}",
        resp.subtracted_poles
    );
    println!("\n{:>10} {:>16}", "t", "h(t)/h0");
    for (t, v) in resp.times.iter().zip(resp.values_c()) {
        println!("{t:>10.3} {:>16.6e}", v.re);
    }
}
