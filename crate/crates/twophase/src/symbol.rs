//! Construction of the interface response function `k(z)` from the
//! Fourier-Laplace-transformed two-phase Stokes system, and evaluation of the
//! boundary symbol and its extended form.
//!
//! After transforming in the horizontal variables (wavenumber magnitude `tau`)
//! and in time (Laplace frequency `lambda`), the reduced interface problem
//! becomes a two-point ODE system in the vertical coordinate whose decaying
//! solutions are spanned by `e^{-omega_i |y|}` (rotational part) and
//! `e^{-tau |y|}` (pressure part), with `omega_i^2 = rho_i lambda / mu_i +
//! tau^2`. Imposing the four interface conditions (continuous velocities,
//! zero tangential-stress jump, prescribed normal-stress jump `q`) yields a
//! 4x4 linear system; the normal velocity trace for `q = 1` defines
//! `k(z)/tau` with `z = lambda/tau^2`. The symbol assembled from `k` is
//!
//! `s~(lambda, tau, zeta) = lambda + sigma tau k(z) + i tau zeta
//!                          - [[rho]] gamma_a k(z) / tau`.

use crate::params::FluidParams;
use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);

#[derive(Debug, Error)]
pub enum SymbolError {
    #[error("rho_{phase} lambda / mu_{phase} + tau^2 lies on the closed negative real axis")]
    BranchCut { phase: usize },
    #[error("lambda = 0 is excluded (pressure modes divide by rho lambda)")]
    SingularAtLambdaZero,
    #[error("tau must be nonzero")]
    ZeroTau,
    #[error("frequency vector xi must be nonzero")]
    ZeroFrequency,
    #[error("interface solve failed: {0}")]
    SolveFailed(String),
    #[error("residual contract violated: max relative residual {0:.3e}")]
    ResidualCheckFailed(f64),
    #[error("one-sided normal velocities disagree: relative gap {0:.3e}")]
    TraceMismatch(f64),
    #[error("sweep grid is empty")]
    EmptyGrid,
}

/// Decay exponents of the resolvent ansatz, principal square roots with
/// positive real part.
pub fn decay_exponents(p: &FluidParams, lambda: C, tau: C) -> Result<(C, C), SymbolError> {
    if tau == ZERO {
        return Err(SymbolError::ZeroTau);
    }
    let omega = |rho: f64, mu: f64, phase: usize| -> Result<C, SymbolError> {
        let w = lambda * (rho / mu) + tau * tau;
        if w.im == 0.0 && w.re <= 0.0 {
            return Err(SymbolError::BranchCut { phase });
        }
        let root = w.sqrt();
        if !(root.re > 0.0) {
            return Err(SymbolError::BranchCut { phase });
        }
        Ok(root)
    };
    Ok((omega(p.rho1, p.mu1, 1)?, omega(p.rho2, p.mu2, 2)?))
}

/// The 4x4 interface system for the amplitudes `(a1, a2, p1, p2)`:
/// rotational amplitudes and pressure amplitudes of the two phases.
#[derive(Debug, Clone)]
pub struct InterfaceSystem {
    pub matrix: Matrix4<C>,
    pub rhs: Vector4<C>,
    params: FluidParams,
    lambda: C,
    tau: C,
    omega1: C,
    omega2: C,
    q: C,
}

/// Solved amplitudes together with evaluators for the ansatz fields.
#[derive(Debug, Clone)]
pub struct InterfaceSolution {
    pub a1: C,
    pub a2: C,
    pub p1: C,
    pub p2: C,
    params: FluidParams,
    lambda: C,
    tau: C,
    omega1: C,
    omega2: C,
    q: C,
    w_plus: C,
    w_minus: C,
}

/// Assembles the interface system for Laplace frequency `lambda`, wavenumber
/// `tau` and normal-stress jump datum `q` (tangential-stress jump zero).
pub fn assemble_interface_system(
    p: &FluidParams,
    lambda: C,
    tau: C,
    normal_stress_jump: C,
) -> Result<InterfaceSystem, SymbolError> {
    if lambda == ZERO {
        return Err(SymbolError::SingularAtLambdaZero);
    }
    let (omega1, omega2) = decay_exponents(p, lambda, tau)?;
    let (mu1, mu2) = (p.mu1, p.mu2);
    let (r1l, r2l) = (lambda * p.rho1, lambda * p.rho2);
    let t2 = tau * tau;
    // rows: [[v]] = 0 (times i tau), [[w]] = 0, tangential stress (times tau),
    // normal stress; columns: a1, a2, p1, p2.
    let matrix = Matrix4::new(
        omega1,
        omega2,
        -t2 / r1l,
        t2 / r2l,
        -C::from(1.0),
        C::from(1.0),
        tau / r1l,
        tau / r2l,
        -(omega1 * omega1 + t2) * mu1,
        (omega2 * omega2 + t2) * mu2,
        t2 * tau * (2.0 * mu1) / r1l,
        t2 * tau * (2.0 * mu2) / r2l,
        omega1 * (2.0 * mu1),
        omega2 * (2.0 * mu2),
        -(omega1 * omega1 + t2) * mu1 / r1l,
        (omega2 * omega2 + t2) * mu2 / r2l,
    );
    let rhs = Vector4::new(ZERO, ZERO, ZERO, normal_stress_jump);
    Ok(InterfaceSystem {
        matrix,
        rhs,
        params: *p,
        lambda,
        tau,
        omega1,
        omega2,
        q: normal_stress_jump,
    })
}

impl InterfaceSystem {
    /// Solves for the amplitudes and enforces the residual contract on the
    /// interface conditions and on sampled bulk equations.
    ///
    /// Internally the solve uses the equivalent unknowns
    /// `(â1, â2, W-, W+) = ((omega1 - tau) a1 / tau, (omega2 - tau) a2 / tau,
    /// w(0-), w(0+))`, which stay comparable in size across the whole
    /// `(lambda, tau)` range (the raw amplitudes diverge like `1/z` near the
    /// small-`z` degeneracy), and the rows are equilibrated before the LU
    /// factorization so that every condition is satisfied relative to its own
    /// scale. The residual check below is still carried out on the original
    /// formulation.
    pub fn solve(&self) -> Result<InterfaceSolution, SymbolError> {
        let p = &self.params;
        let (tau, om1, om2) = (self.tau, self.omega1, self.omega2);
        let (mu1, mu2) = (p.mu1, p.mu2);
        let t2 = tau * tau;
        let mut m = Matrix4::new(
            tau,
            tau,
            tau,
            tau,
            ZERO,
            ZERO,
            -C::from(1.0),
            C::from(1.0),
            -(om1 + tau) * tau * mu1,
            (om2 + tau) * tau * mu2,
            -t2 * (2.0 * mu1),
            t2 * (2.0 * mu2),
            -(om1 - tau) * mu1,
            -(om2 - tau) * mu2,
            (om1 * om1 + t2) * mu1 / tau,
            (om2 * om2 + t2) * mu2 / tau,
        );
        let mut rhs = Vector4::new(ZERO, ZERO, ZERO, self.q);
        for r in 0..4 {
            let scale = (0..4).map(|c| m[(r, c)].norm()).fold(0.0f64, f64::max);
            if scale > 0.0 {
                let inv = 1.0 / scale;
                for c in 0..4 {
                    m[(r, c)] *= inv;
                }
                rhs[r] *= inv;
            }
        }
        let lu = m.lu();
        let sol = lu
            .solve(&rhs)
            .ok_or_else(|| SymbolError::SolveFailed("singular interface system".into()))?;
        let (a1h, a2h, w_minus, w_plus) = (sol[0], sol[1], sol[2], sol[3]);
        let a1 = a1h * tau / (om1 - tau);
        let a2 = a2h * tau / (om2 - tau);
        let p1 = (a1 - w_minus) * p.rho1 * self.lambda / tau;
        let p2 = (w_plus - a2) * p.rho2 * self.lambda / tau;
        let solution = InterfaceSolution {
            a1,
            a2,
            p1,
            p2,
            params: self.params,
            lambda: self.lambda,
            tau,
            omega1: om1,
            omega2: om2,
            q: self.q,
            w_plus,
            w_minus,
        };
        let res = solution.max_relative_residual();
        if !(res < 1e-10) {
            return Err(SymbolError::ResidualCheckFailed(res));
        }
        Ok(solution)
    }
}

/// One phase's ansatz values at height `y`: `(w, w', w'', v, v', v'', pi, pi')`.
#[derive(Debug, Clone, Copy)]
pub struct PhaseFields {
    pub w: C,
    pub dw: C,
    pub d2w: C,
    pub v: C,
    pub dv: C,
    pub d2v: C,
    pub pi: C,
    pub dpi: C,
}

/// The same quantities split into their rotational and pressure exponential
/// modes, `value = modes[0] + modes[1]`. Residuals are normalized against the
/// individual mode magnitudes: near the `z -> 0` degeneracy the amplitudes
/// grow like `1/z` while their sums stay O(1), and a residual measured
/// against the cancelled sums would drown in roundoff that the solve cannot
/// control.
#[derive(Debug, Clone, Copy)]
struct PhaseModes {
    w: [C; 2],
    dw: [C; 2],
    d2w: [C; 2],
    v: [C; 2],
    dv: [C; 2],
    d2v: [C; 2],
    pi: [C; 2],
    dpi: [C; 2],
}

impl PhaseModes {
    fn collapse(&self) -> PhaseFields {
        let s = |t: [C; 2]| t[0] + t[1];
        PhaseFields {
            w: s(self.w),
            dw: s(self.dw),
            d2w: s(self.d2w),
            v: s(self.v),
            dv: s(self.dv),
            d2v: s(self.d2v),
            pi: s(self.pi),
            dpi: s(self.dpi),
        }
    }
}

fn mag(t: [C; 2]) -> f64 {
    t[0].norm() + t[1].norm()
}

impl InterfaceSolution {
    pub fn lambda(&self) -> C {
        self.lambda
    }

    pub fn tau(&self) -> C {
        self.tau
    }

    /// Normal velocity at the interface seen from above.
    pub fn w_at_interface_upper(&self) -> C {
        self.w_plus
    }

    /// Normal velocity at the interface seen from below.
    pub fn w_at_interface_lower(&self) -> C {
        self.w_minus
    }

    fn upper_modes(&self, y: f64) -> PhaseModes {
        let i = C::new(0.0, 1.0);
        let (tau, om) = (self.tau, self.omega2);
        let pp = self.p2 * tau / (self.params.rho2 * self.lambda);
        let eo = (-om * y).exp();
        let et = (-tau * y).exp();
        let w = [self.a2 * eo, pp * et];
        let dw = [-om * self.a2 * eo, -tau * pp * et];
        let d2w = [om * om * self.a2 * eo, tau * tau * pp * et];
        let d3w = [-om * om * om * self.a2 * eo, -tau * tau * tau * pp * et];
        PhaseModes {
            w,
            dw,
            d2w,
            v: [i / tau * dw[0], i / tau * dw[1]],
            dv: [i / tau * d2w[0], i / tau * d2w[1]],
            d2v: [i / tau * d3w[0], i / tau * d3w[1]],
            pi: [ZERO, self.p2 * et],
            dpi: [ZERO, -tau * self.p2 * et],
        }
    }

    fn lower_modes(&self, y: f64) -> PhaseModes {
        let i = C::new(0.0, 1.0);
        let (tau, om) = (self.tau, self.omega1);
        let pp = self.p1 * tau / (self.params.rho1 * self.lambda);
        let eo = (om * y).exp();
        let et = (tau * y).exp();
        let w = [self.a1 * eo, -pp * et];
        let dw = [om * self.a1 * eo, -tau * pp * et];
        let d2w = [om * om * self.a1 * eo, -tau * tau * pp * et];
        let d3w = [om * om * om * self.a1 * eo, -tau * tau * tau * pp * et];
        PhaseModes {
            w,
            dw,
            d2w,
            v: [i / tau * dw[0], i / tau * dw[1]],
            dv: [i / tau * d2w[0], i / tau * d2w[1]],
            d2v: [i / tau * d3w[0], i / tau * d3w[1]],
            pi: [ZERO, self.p1 * et],
            dpi: [ZERO, tau * self.p1 * et],
        }
    }

    /// Ansatz fields of the upper phase (`y >= 0`).
    pub fn upper_fields(&self, y: f64) -> PhaseFields {
        self.upper_modes(y).collapse()
    }

    /// Ansatz fields of the lower phase (`y <= 0`).
    pub fn lower_fields(&self, y: f64) -> PhaseFields {
        self.lower_modes(y).collapse()
    }

    /// Relative residuals of the four interface conditions, each measured
    /// against the magnitudes of the exponential-mode terms entering it.
    pub fn interface_residuals(&self) -> [f64; 4] {
        let i = C::new(0.0, 1.0);
        let tau = self.tau;
        let (mu1, mu2) = (self.params.mu1, self.params.mu2);
        let upm = self.upper_modes(0.0);
        let lom = self.lower_modes(0.0);
        let up = upm.collapse();
        let lo = lom.collapse();
        let rel = |num: C, scale: f64| num.norm() / scale.max(f64::MIN_POSITIVE);
        let r_v = rel(up.v - lo.v, mag(upm.v) + mag(lom.v));
        let r_w = rel(up.w - lo.w, mag(upm.w) + mag(lom.w));
        let tan = -(mu2 * up.dv - mu1 * lo.dv) - i * tau * (mu2 * up.w - mu1 * lo.w);
        let tan_scale =
            mu2 * mag(upm.dv) + mu1 * mag(lom.dv) + tau.norm() * (mu2 * mag(upm.w) + mu1 * mag(lom.w));
        let r_tan = rel(tan, tan_scale);
        let norm = -(up.dw * mu2 - lo.dw * mu1) * 2.0 + (up.pi - lo.pi) - self.q;
        let norm_scale = 2.0 * (mu2 * mag(upm.dw) + mu1 * mag(lom.dw))
            + mag(upm.pi)
            + mag(lom.pi)
            + self.q.norm();
        let r_norm = rel(norm, norm_scale);
        [r_v, r_w, r_tan, r_norm]
    }

    /// Relative residuals of momentum and divergence equations of one phase
    /// at height `y` (`y > 0` upper, `y < 0` lower).
    pub fn bulk_residuals(&self, y: f64) -> [f64; 3] {
        let i = C::new(0.0, 1.0);
        let tau = self.tau;
        let t2 = tau * tau;
        let (rho, mu, m) = if y > 0.0 {
            (self.params.rho2, self.params.mu2, self.upper_modes(y))
        } else {
            (self.params.rho1, self.params.mu1, self.lower_modes(y))
        };
        let f = m.collapse();
        let rl = self.lambda * rho;
        let rel = |num: C, scale: f64| num.norm() / scale.max(f64::MIN_POSITIVE);
        let mom_v = rl * f.v + mu * (t2 * f.v - f.d2v) + i * tau * f.pi;
        let sv = rl.norm() * mag(m.v)
            + mu * t2.norm() * mag(m.v)
            + mu * mag(m.d2v)
            + tau.norm() * mag(m.pi);
        let mom_w = rl * f.w + mu * (t2 * f.w - f.d2w) + f.dpi;
        let sw =
            rl.norm() * mag(m.w) + mu * t2.norm() * mag(m.w) + mu * mag(m.d2w) + mag(m.dpi);
        let div = i * tau * f.v + f.dw;
        let sd = tau.norm() * mag(m.v) + mag(m.dw);
        [rel(mom_v, sv), rel(mom_w, sw), rel(div, sd)]
    }

    /// Worst relative residual over the interface conditions and the bulk
    /// equations sampled at `y = +-0.1/|tau|` and `y = +-1/|tau|`.
    pub fn max_relative_residual(&self) -> f64 {
        let mut worst = self
            .interface_residuals()
            .iter()
            .fold(0.0f64, |a, &r| a.max(r));
        let scale = 1.0 / self.tau.norm();
        for y in [0.1 * scale, scale, -0.1 * scale, -scale] {
            worst = self
                .bulk_residuals(y)
                .iter()
                .fold(worst, |a, &r| a.max(r));
        }
        worst
    }
}

/// Normal velocity trace `w(0)` for a unit normal-stress jump. The one-sided
/// limits must agree (continuity of the normal velocity is one of the imposed
/// interface conditions).
pub fn normal_velocity_response(p: &FluidParams, lambda: C, tau: C) -> Result<C, SymbolError> {
    let sol = assemble_interface_system(p, lambda, tau, C::from(1.0))?.solve()?;
    let (wp, wm) = (sol.w_at_interface_upper(), sol.w_at_interface_lower());
    let gap = (wp - wm).norm() / wp.norm().max(wm.norm()).max(f64::MIN_POSITIVE);
    if !(gap < 1e-12) {
        return Err(SymbolError::TraceMismatch(gap));
    }
    Ok((wp + wm) * 0.5)
}

/// The response function `k(z)`, holomorphic off the negative real axis,
/// with `k(0) = 1/(2(mu1 + mu2))` and `z k(z) -> 1/(rho1 + rho2)`.
///
/// `k` depends on `(lambda, tau)` only through `z = lambda / tau^2`; it is
/// realized here as `tau * w(0)` for `(lambda, tau) = (z, 1)`. `z = 0` is
/// special-cased with its analytic value.
pub fn k_of_z(p: &FluidParams, z: C) -> Result<C, SymbolError> {
    if z == ZERO {
        return Ok(C::from(1.0 / (2.0 * p.viscosity_sum())));
    }
    if z.im == 0.0 && z.re < 0.0 {
        return Err(SymbolError::BranchCut { phase: 0 });
    }
    normal_velocity_response(p, z, C::from(1.0))
}

/// One evaluation of the extended symbol with all derived quantities.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SymbolValue {
    pub lambda: (f64, f64),
    pub tau: (f64, f64),
    pub zeta: (f64, f64),
    pub z: (f64, f64),
    pub k: (f64, f64),
    pub s_tilde: (f64, f64),
}

impl SymbolValue {
    pub fn lambda_c(&self) -> C {
        C::new(self.lambda.0, self.lambda.1)
    }
    pub fn tau_c(&self) -> C {
        C::new(self.tau.0, self.tau.1)
    }
    pub fn zeta_c(&self) -> C {
        C::new(self.zeta.0, self.zeta.1)
    }
    pub fn z_c(&self) -> C {
        C::new(self.z.0, self.z.1)
    }
    pub fn k_c(&self) -> C {
        C::new(self.k.0, self.k.1)
    }
    pub fn s_tilde_c(&self) -> C {
        C::new(self.s_tilde.0, self.s_tilde.1)
    }
}

/// Assembles `s~` from an already computed `k` value.
pub fn s_tilde_from_k(p: &FluidParams, lambda: C, tau: C, zeta: C, k: C) -> C {
    let i = C::new(0.0, 1.0);
    lambda + tau * k * p.sigma + i * tau * zeta - k / tau * (p.density_jump() * p.gamma_a)
}

/// Evaluates the extended symbol
/// `s~ = lambda + sigma tau k(z) + i tau zeta - [[rho]] gamma_a k(z)/tau`.
pub fn eval_extended_symbol(
    p: &FluidParams,
    lambda: C,
    tau: C,
    zeta: C,
) -> Result<SymbolValue, SymbolError> {
    if tau == ZERO {
        return Err(SymbolError::ZeroTau);
    }
    let z = lambda / (tau * tau);
    let k = k_of_z(p, z)?;
    let s = s_tilde_from_k(p, lambda, tau, zeta, k);
    Ok(SymbolValue {
        lambda: (lambda.re, lambda.im),
        tau: (tau.re, tau.im),
        zeta: (zeta.re, zeta.im),
        z: (z.re, z.im),
        k: (k.re, k.im),
        s_tilde: (s.re, s.im),
    })
}

/// The boundary symbol for a vector frequency `xi` and transport vector `b0`:
/// `s_{b0} = lambda + (sigma |xi| - [[rho]] gamma_a/|xi|) k(z) + i (b0|xi)`,
/// evaluated through the reduction `(tau, zeta) = (|xi|, (b0|xi)/|xi|)`.
pub fn eval_boundary_symbol(
    p: &FluidParams,
    lambda: C,
    xi: &[f64],
    b0: &[f64],
) -> Result<C, SymbolError> {
    assert_eq!(xi.len(), b0.len(), "xi and b0 must share a dimension");
    let norm2: f64 = xi.iter().map(|x| x * x).sum();
    if norm2 == 0.0 {
        return Err(SymbolError::ZeroFrequency);
    }
    let tau = norm2.sqrt();
    let dot: f64 = b0.iter().zip(xi).map(|(b, x)| b * x).sum();
    let zeta = dot / tau;
    Ok(eval_extended_symbol(p, lambda, C::from(tau), C::from(zeta))?.s_tilde_c())
}

/// The real symbol `s(lambda, tau) = s~(lambda, tau, 0)` that governs the
/// interface evolution; real-valued for real `lambda > 0`.
pub fn symbol_s(p: &FluidParams, lambda: C, tau: f64) -> Result<C, SymbolError> {
    Ok(eval_extended_symbol(p, lambda, C::from(tau), ZERO)?.s_tilde_c())
}

/// Position of the nearest branch point of `k` on the negative real axis:
/// `z = -min(mu_i / rho_i)`, where the slower decay exponent degenerates.
pub fn branch_point(p: &FluidParams) -> f64 {
    -(p.mu1 / p.rho1).min(p.mu2 / p.rho2)
}

/// `k(z)` on the open real segment between the nearest branch point and the
/// origin, where the response extends holomorphically across the guarded
/// negative axis; used by the discrete-spectrum search.
pub(crate) fn k_off_cut(p: &FluidParams, z: C) -> Result<C, SymbolError> {
    if z == ZERO {
        return Ok(C::from(1.0 / (2.0 * p.viscosity_sum())));
    }
    if z.im == 0.0 && z.re < 0.0 && z.re <= branch_point(p) {
        return Err(SymbolError::BranchCut { phase: 0 });
    }
    normal_velocity_response(p, z, C::from(1.0))
}

/// Real symbol evaluated on the off-cut real segment.
pub(crate) fn symbol_s_off_cut(p: &FluidParams, lambda: f64, tau: f64) -> Result<f64, SymbolError> {
    let z = C::from(lambda / (tau * tau));
    let k = k_off_cut(p, z)?;
    Ok(s_tilde_from_k(p, C::from(lambda), C::from(tau), ZERO, k).re)
}

/// Grid specification for the sandwich-estimate sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepGridSpec {
    /// smallest |lambda| on the sweep
    pub lambda0: f64,
    pub lambda_max: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    /// log-spaced moduli per decade for both |lambda| and |tau|
    pub per_decade: f64,
    /// rays per sector for both lambda and tau
    pub rays: usize,
    /// lambda ranges over `Sigma_{pi/2 + eta}`, tau over `Sigma_eta`
    pub eta: f64,
    pub beta: f64,
    pub delta: f64,
    /// zeta grid is `zeta_points x zeta_points` inside `U_{beta,delta}`
    pub zeta_points: usize,
}

impl Default for SweepGridSpec {
    fn default() -> Self {
        Self {
            lambda0: 1e-3,
            lambda_max: 1e4,
            tau_min: 1e-3,
            tau_max: 1e3,
            per_decade: 24.0,
            rays: 9,
            eta: 0.05,
            beta: 1.0,
            delta: 0.2,
            zeta_points: 5,
        }
    }
}

fn log_moduli(lo: f64, hi: f64, per_decade: f64) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo);
    if hi == lo {
        return vec![lo];
    }
    let decades = (hi / lo).log10();
    let n = ((per_decade * decades).ceil() as usize).max(1) + 1;
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

fn ray_angles(max_angle: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![0.0];
    }
    let a = max_angle * 0.999;
    (0..count)
        .map(|i| -a + 2.0 * a * i as f64 / (count - 1) as f64)
        .collect()
}

/// One sampled point of the sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepPoint {
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub tau_re: f64,
    pub tau_im: f64,
    pub zeta_re: f64,
    pub zeta_im: f64,
}

/// Row emitted by the streaming sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub lambda: C,
    pub tau: C,
    pub zeta: C,
    pub k: C,
    pub s_tilde: C,
    pub ratio: f64,
}

/// Result of the sandwich sweep: extrema of `|s~| / (|lambda| + |tau|)`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub argmin: SweepPoint,
    pub argmax: SweepPoint,
    pub grid_spec: SweepGridSpec,
    pub points: usize,
    pub pass: bool,
}

struct Extrema {
    min: f64,
    max: f64,
    argmin: SweepPoint,
    argmax: SweepPoint,
    points: usize,
}

impl Extrema {
    fn new() -> Self {
        let nowhere = SweepPoint {
            lambda_re: f64::NAN,
            lambda_im: f64::NAN,
            tau_re: f64::NAN,
            tau_im: f64::NAN,
            zeta_re: f64::NAN,
            zeta_im: f64::NAN,
        };
        Self {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            argmin: nowhere,
            argmax: nowhere,
            points: 0,
        }
    }

    fn update(&mut self, ratio: f64, at: SweepPoint) {
        self.points += 1;
        if ratio < self.min {
            self.min = ratio;
            self.argmin = at;
        }
        if ratio > self.max {
            self.max = ratio;
            self.argmax = at;
        }
    }

    fn merge(mut self, other: Extrema) -> Extrema {
        self.points += other.points;
        if other.min < self.min {
            self.min = other.min;
            self.argmin = other.argmin;
        }
        if other.max > self.max {
            self.max = other.max;
            self.argmax = other.argmax;
        }
        self
    }
}

fn sweep_lambda_slice(
    p: &FluidParams,
    lambda: C,
    taus: &[C],
    zetas: &[C],
    mut row_fn: Option<&mut dyn FnMut(&SweepRow)>,
) -> Result<Extrema, SymbolError> {
    let mut ex = Extrema::new();
    for &tau in taus {
        let z = lambda / (tau * tau);
        let k = k_of_z(p, z)?;
        let denom = lambda.norm() + tau.norm();
        for &zeta in zetas {
            let s = s_tilde_from_k(p, lambda, tau, zeta, k);
            let ratio = s.norm() / denom;
            let at = SweepPoint {
                lambda_re: lambda.re,
                lambda_im: lambda.im,
                tau_re: tau.re,
                tau_im: tau.im,
                zeta_re: zeta.re,
                zeta_im: zeta.im,
            };
            ex.update(ratio, at);
            if let Some(f) = row_fn.as_deref_mut() {
                f(&SweepRow {
                    lambda,
                    tau,
                    zeta,
                    k,
                    s_tilde: s,
                    ratio,
                });
            }
        }
    }
    Ok(ex)
}

fn sweep_grid(spec: &SweepGridSpec) -> Result<(Vec<C>, Vec<C>, Vec<C>), SymbolError> {
    if spec.rays == 0 || spec.zeta_points == 0 || spec.per_decade <= 0.0 {
        return Err(SymbolError::EmptyGrid);
    }
    let lam_moduli = log_moduli(spec.lambda0, spec.lambda_max, spec.per_decade);
    let tau_moduli = log_moduli(spec.tau_min, spec.tau_max, spec.per_decade);
    let lam_angles = ray_angles(std::f64::consts::FRAC_PI_2 + spec.eta, spec.rays);
    let tau_angles = ray_angles(spec.eta, spec.rays);
    let lambdas: Vec<C> = lam_moduli
        .iter()
        .flat_map(|&r| lam_angles.iter().map(move |&a| C::from_polar(r, a)))
        .collect();
    let taus: Vec<C> = tau_moduli
        .iter()
        .flat_map(|&r| tau_angles.iter().map(move |&a| C::from_polar(r, a)))
        .collect();
    let nz = spec.zeta_points;
    let mut zetas = Vec::with_capacity(nz * nz);
    for iy in 0..nz {
        for ix in 0..nz {
            let fx = if nz == 1 {
                0.0
            } else {
                -1.0 + 2.0 * ix as f64 / (nz - 1) as f64
            };
            let fy = if nz == 1 {
                0.0
            } else {
                -1.0 + 2.0 * iy as f64 / (nz - 1) as f64
            };
            zetas.push(C::new(
                fx * 0.98 * (spec.beta + 1.0),
                fy * 0.98 * spec.delta,
            ));
        }
    }
    if lambdas.is_empty() || taus.is_empty() || zetas.is_empty() {
        return Err(SymbolError::EmptyGrid);
    }
    Ok((lambdas, taus, zetas))
}

/// Sweeps `|s~|/(|lambda| + |tau|)` over the sector grid and reports the
/// extrema. Evaluation parallelizes over lambda values; the reduction is a
/// deterministic ordered fold.
pub fn verify_sandwich(p: &FluidParams, spec: &SweepGridSpec) -> Result<BoundsReport, SymbolError> {
    let (lambdas, taus, zetas) = sweep_grid(spec)?;
    let partials: Result<Vec<Extrema>, SymbolError> = lambdas
        .par_iter()
        .map(|&lam| sweep_lambda_slice(p, lam, &taus, &zetas, None))
        .collect();
    let ex = partials?
        .into_iter()
        .fold(Extrema::new(), |acc, e| acc.merge(e));
    Ok(BoundsReport {
        min_ratio: ex.min,
        max_ratio: ex.max,
        argmin: ex.argmin,
        argmax: ex.argmax,
        grid_spec: spec.clone(),
        points: ex.points,
        pass: ex.min > 0.0,
    })
}

/// Sequential sweep variant that hands every evaluated row to `row_fn`
/// (used for CSV streaming; row order is deterministic).
pub fn verify_sandwich_streaming(
    p: &FluidParams,
    spec: &SweepGridSpec,
    row_fn: &mut dyn FnMut(&SweepRow),
) -> Result<BoundsReport, SymbolError> {
    let (lambdas, taus, zetas) = sweep_grid(spec)?;
    let mut ex = Extrema::new();
    for &lam in &lambdas {
        let part = sweep_lambda_slice(p, lam, &taus, &zetas, Some(row_fn))?;
        ex = ex.merge(part);
    }
    Ok(BoundsReport {
        min_ratio: ex.min,
        max_ratio: ex.max,
        argmin: ex.argmin,
        argmax: ex.argmax,
        grid_spec: spec.clone(),
        points: ex.points,
        pass: ex.min > 0.0,
    })
}

/// Supremum of `|k(z)| + |z k(z)|` over a log-spaced grid of the sector
/// `Sigma_theta`, the empirical constant of the symbol bounds.
pub fn k_sup_bound(
    p: &FluidParams,
    theta: f64,
    modulus_min: f64,
    modulus_max: f64,
    per_decade: f64,
    rays: usize,
) -> Result<f64, SymbolError> {
    let moduli = log_moduli(modulus_min, modulus_max, per_decade);
    let angles = ray_angles(theta, rays);
    let mut sup = 0.0f64;
    for &r in &moduli {
        for &a in &angles {
            let z = C::from_polar(r, a);
            let k = k_of_z(p, z)?;
            sup = sup.max(k.norm() + (z * k).norm());
        }
    }
    Ok(sup)
}
