//! Exercises the graph-coordinate nonlinearities: the mean-curvature
//! identity kappa(h) = Lap h - G_kappa(h), the two forms of the divergence
//! correction, and the finite-difference validation of every directional
//! derivative.
//!
//! ```bash
//! cargo run --release --example kernel_checks
//! ```

use twophase::grid::BulkScalar;
use twophase::kernels::{eval_f_d, fd_check, seeded_state, KernelId};
use twophase::{eval_g_kappa, mean_curvature_graph, ScalarField};

fn main() {
    // curvature identity at m = 128
    for (name, h) in [
        ("0.3 sin x", ScalarField::from_fn(1, 128, |x, _| 0.3 * x.sin())),
        (
            "0.2 sin x + 0.1 cos 2x",
            ScalarField::from_fn(1, 128, |x, _| 0.2 * x.sin() + 0.1 * (2.0 * x).cos()),
        ),
        (
            "0.3 sin x sin y",
            ScalarField::from_fn(2, 128, |x, y| 0.3 * x.sin() * y.sin()),
        ),
    ] {
        let err = mean_curvature_graph(&h)
            .zip(&h.laplacian().zip(&eval_g_kappa(&h), |l, g| l - g), |a, b| {
                a - b
            })
            .max_abs();
        println!("curvature identity, h = {name:24}: max error {err:.3e}");
    }

    // dual forms of the divergence correction
    let v = vec![BulkScalar::from_fn(1, 64, 12, 0.05, |x, _, y| {
        x.cos() * (0.5 + y - 0.3 * y * y)
    })];
    let h = ScalarField::from_fn(1, 64, |x, _| 0.4 * x.sin());
    println!(
        "divergence correction dual forms  : max gap {:.3e}",
        eval_f_d(&v, &h).unwrap().max_disagreement()
    );

    // finite-difference check of every directional derivative
    println!("\n{:>8} {:>12} {:>18} {:>8}", "kernel", "fd error", "halving ratios", "status");
    let (base, ctx, dir) = seeded_state(42, 0, 1, 32, 8, 0.1);
    for id in KernelId::ALL {
        let c = fd_check(id, &ctx, &base, &dir, 1e-3).unwrap();
        let status = if c.exact {
            "exact"
        } else if c.pass {
            "O(eps^2)"
        } else {
            "FAIL"
        };
        println!(
            "{:>8} {:>12.3e} {:>8.3} {:>8.3} {:>9}",
            c.kernel, c.errors[0], c.ratios[0], c.ratios[1], status
        );
    }
}
