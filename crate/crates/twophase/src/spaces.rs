//! Fractional Sobolev-Slobodeckij and homogeneous-norm calculators with
//! cross-checks: the Gagliardo double integral, the Poisson-semigroup
//! characterization, Riesz potentials as Fourier multipliers, the Hardy-type
//! interval embedding ratio, a C^1 extension operator, and the squared
//! partition of unity.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpaceError {
    #[error("fractional order s must lie in (0, 1)")]
    OrderOutOfRange,
    #[error("integrability exponent p must satisfy p >= 1")]
    BadExponent,
    #[error("operation requires a periodic grid")]
    NotPeriodic,
    #[error("operation requires an interval grid")]
    NotInterval,
    #[error("t-integral truncation not converged: relative change {0:.3e}")]
    TruncationNotConverged(f64),
    #[error("denominator norm vanishes")]
    ZeroDenominator,
    #[error("extension requires h(0) = h'(0) = 0 (got |h(0)| = {0:.2e}, |h'(0)| = {1:.2e})")]
    PreconditionViolated(f64, f64),
    #[error("window overlaps fewer than two partition cubes")]
    WindowTooSmall,
}

/// Real samples on a uniform grid: either periodic over `[0, length)^n`
/// (spacing `length/m`) or a closed interval `[0, length]` (n = 1, spacing
/// `length/(m-1)`).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub n: usize,
    pub m: usize,
    pub length: f64,
    pub periodic: bool,
    pub values: Vec<f64>,
}

impl SampledFunction {
    pub fn from_fn_periodic(n: usize, m: usize, length: f64, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        assert!(n == 1 || n == 2);
        assert!(m >= 8);
        let h = length / m as f64;
        let len = if n == 1 { m } else { m * m };
        let mut values = Vec::with_capacity(len);
        for idx in 0..len {
            let x = grid_point(n, m, h, idx);
            values.push(f(&x));
        }
        Self {
            n,
            m,
            length,
            periodic: true,
            values,
        }
    }

    pub fn from_fn_interval(m: usize, length: f64, mut f: impl FnMut(f64) -> f64) -> Self {
        assert!(m >= 8);
        let h = length / (m - 1) as f64;
        Self {
            n: 1,
            m,
            length,
            periodic: false,
            values: (0..m).map(|i| f(i as f64 * h)).collect(),
        }
    }

    pub fn spacing(&self) -> f64 {
        if self.periodic {
            self.length / self.m as f64
        } else {
            self.length / (self.m - 1) as f64
        }
    }

    fn point(&self, idx: usize) -> Vec<f64> {
        grid_point(self.n, self.m, self.spacing(), idx)
    }

    /// Quadrature weight of grid point `idx`: uniform on periodic grids,
    /// composite Simpson on intervals (3/8 rule absorbing an even panel
    /// count), tensorized for n = 2.
    fn weight(&self, idx: usize) -> f64 {
        if self.periodic {
            return self.spacing().powi(self.n as i32);
        }
        simpson_weight(idx, self.m) * self.spacing()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        let sum: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| v.abs().powf(p) * self.weight(i))
            .sum();
        sum.powf(1.0 / p)
    }
}

fn grid_point(n: usize, m: usize, h: f64, idx: usize) -> Vec<f64> {
    if n == 1 {
        vec![idx as f64 * h]
    } else {
        vec![(idx % m) as f64 * h, (idx / m) as f64 * h]
    }
}

/// Composite Simpson weight (relative to the spacing) at node `i` of `m`.
fn simpson_weight(i: usize, m: usize) -> f64 {
    if m % 2 == 1 {
        // panels of two intervals: 1, 4, 2, 4, ..., 4, 1 (over 3)
        if i == 0 || i == m - 1 {
            1.0 / 3.0
        } else if i % 2 == 1 {
            4.0 / 3.0
        } else {
            2.0 / 3.0
        }
    } else {
        // 3/8 rule on the first three intervals, Simpson on the rest
        const W38: [f64; 4] = [3.0 / 8.0, 9.0 / 8.0, 9.0 / 8.0, 3.0 / 8.0];
        let mut w = if i < 4 { W38[i] } else { 0.0 };
        if i >= 3 {
            let j = i - 3;
            let rest = m - 3;
            w += if j == 0 || j == rest - 1 {
                1.0 / 3.0
            } else if j % 2 == 1 {
                4.0 / 3.0
            } else {
                2.0 / 3.0
            };
        }
        w
    }
}

/// Method tag and quadrature metadata of a computed (semi)norm.
#[derive(Debug, Clone, Serialize)]
pub struct SeminormReport {
    pub value: f64,
    pub s: f64,
    pub p: f64,
    pub method: &'static str,
    pub grid: GridMeta,
    pub truncation: Option<TruncationMeta>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridMeta {
    pub n: usize,
    pub m: usize,
    pub spacing: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TruncationMeta {
    pub t_min: f64,
    pub t_max: f64,
    pub nodes: usize,
    pub relative_change: f64,
}

fn grid_meta(g: &SampledFunction) -> GridMeta {
    GridMeta {
        n: g.n,
        m: g.m,
        spacing: g.spacing(),
    }
}

/// Gagliardo double-integral seminorm
/// `( \int\int |g(x) - g(y)|^p / |x - y|^{n + s p} dx dy )^{1/p}`
/// by tensor-grid quadrature with the diagonal cells dropped.
pub fn slobodeckij_seminorm(
    g: &SampledFunction,
    s: f64,
    p: f64,
) -> Result<SeminormReport, SpaceError> {
    if !(s > 0.0 && s < 1.0) {
        return Err(SpaceError::OrderOutOfRange);
    }
    if !(p >= 1.0) {
        return Err(SpaceError::BadExponent);
    }
    let len = g.values.len();
    let expo = g.n as f64 + s * p;
    let mut sum = 0.0f64;
    for i in 0..len {
        let xi = g.point(i);
        let wi = g.weight(i);
        let gi = g.values[i];
        for j in (i + 1)..len {
            let xj = g.point(j);
            let d2: f64 = xi
                .iter()
                .zip(&xj)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let diff = (gi - g.values[j]).abs();
            if diff == 0.0 {
                continue;
            }
            sum += 2.0 * diff.powf(p) / d2.sqrt().powf(expo) * wi * g.weight(j);
        }
    }
    Ok(SeminormReport {
        value: sum.powf(1.0 / p),
        s,
        p,
        method: "double-integral",
        grid: grid_meta(g),
        truncation: None,
    })
}

/// One-dimensional complex FFT lines along each axis (row-column for n = 2).
fn fft_field(g: &[f64], n: usize, m: usize, inverse_of: Option<&[Complex64]>) -> Vec<Complex64> {
    let mut planner = FftPlanner::<f64>::new();
    let mut data: Vec<Complex64> = match inverse_of {
        None => g.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        Some(c) => c.to_vec(),
    };
    let fft = if inverse_of.is_none() {
        planner.plan_fft_forward(m)
    } else {
        planner.plan_fft_inverse(m)
    };
    let axes = if n == 1 { 1 } else { 2 };
    let mut line = vec![Complex64::new(0.0, 0.0); m];
    for axis in 0..axes {
        let lines = if n == 1 { 1 } else { m };
        for l in 0..lines {
            for i in 0..m {
                let idx = if n == 1 {
                    i
                } else if axis == 0 {
                    l * m + i
                } else {
                    i * m + l
                };
                line[i] = data[idx];
            }
            fft.process(&mut line);
            for i in 0..m {
                let idx = if n == 1 {
                    i
                } else if axis == 0 {
                    l * m + i
                } else {
                    i * m + l
                };
                data[idx] = line[i];
            }
        }
    }
    if inverse_of.is_some() {
        let scale = 1.0 / (m as f64).powi(axes as i32);
        for v in &mut data {
            *v *= scale;
        }
    }
    data
}

/// |xi| at mode index `idx` for a periodic box of the given length.
fn mode_magnitude(n: usize, m: usize, length: f64, idx: usize) -> f64 {
    let base = 2.0 * std::f64::consts::PI / length;
    let wavenum = |i: usize| -> f64 {
        if i <= m / 2 {
            i as f64
        } else {
            i as f64 - m as f64
        }
    };
    if n == 1 {
        (base * wavenum(idx)).abs()
    } else {
        let kx = base * wavenum(idx % m);
        let ky = base * wavenum(idx / m);
        kx.hypot(ky)
    }
}

fn apply_multiplier(g: &SampledFunction, mult: impl Fn(f64) -> f64) -> SampledFunction {
    let mut hat = fft_field(&g.values, g.n, g.m, None);
    for (idx, v) in hat.iter_mut().enumerate() {
        *v *= mult(mode_magnitude(g.n, g.m, g.length, idx));
    }
    let back = fft_field(&g.values, g.n, g.m, Some(&hat));
    SampledFunction {
        n: g.n,
        m: g.m,
        length: g.length,
        periodic: true,
        values: back.iter().map(|c| c.re).collect(),
    }
}

/// Poisson-semigroup seminorm
/// `( \int_0^inf t^{(1-s)p} || d/dt P(t) g ||_{L_p}^p dt/t )^{1/p}`
/// with `P(t)` the Fourier multiplier `e^{-t |xi|}`; the `t`-integral is a
/// trapezoid rule in `log t` whose truncation is verified by widening the
/// range fourfold on both ends.
pub fn poisson_seminorm(
    g: &SampledFunction,
    s: f64,
    p: f64,
) -> Result<SeminormReport, SpaceError> {
    if !(s > 0.0 && s < 1.0) {
        return Err(SpaceError::OrderOutOfRange);
    }
    if !(p >= 1.0) {
        return Err(SpaceError::BadExponent);
    }
    if !g.periodic {
        return Err(SpaceError::NotPeriodic);
    }
    let t_min = 1e-6 * g.length;
    let t_max = 4.0 * g.length;
    let per_decade = 24usize;
    let value = poisson_integral(g, s, p, t_min, t_max, per_decade);
    let wide = poisson_integral(g, s, p, t_min / 4.0, t_max * 4.0, per_decade);
    let rel = (wide - value).abs() / value.max(f64::MIN_POSITIVE);
    if !(rel < 1e-4) {
        return Err(SpaceError::TruncationNotConverged(rel));
    }
    let nodes = ((per_decade as f64) * (t_max / t_min).log10()).ceil() as usize + 1;
    Ok(SeminormReport {
        value,
        s,
        p,
        method: "poisson",
        grid: grid_meta(g),
        truncation: Some(TruncationMeta {
            t_min,
            t_max,
            nodes,
            relative_change: rel,
        }),
    })
}

fn poisson_integral(
    g: &SampledFunction,
    s: f64,
    p: f64,
    t_min: f64,
    t_max: f64,
    per_decade: usize,
) -> f64 {
    let hat = fft_field(&g.values, g.n, g.m, None);
    let mags: Vec<f64> = (0..g.values.len())
        .map(|idx| mode_magnitude(g.n, g.m, g.length, idx))
        .collect();
    let nodes = ((per_decade as f64) * (t_max / t_min).log10()).ceil() as usize + 1;
    let du = (t_max / t_min).ln() / (nodes - 1) as f64;
    let cell = g.spacing().powi(g.n as i32);
    let mut acc = 0.0f64;
    for k in 0..nodes {
        let t = t_min * (k as f64 * du).exp();
        // d/dt P(t) g = -|xi| e^{-t |xi|} multiplier
        let mut slice = hat.clone();
        for (v, &xi) in slice.iter_mut().zip(&mags) {
            *v *= -xi * (-t * xi).exp();
        }
        let phys = fft_field(&g.values, g.n, g.m, Some(&slice));
        let lp_p: f64 = phys.iter().map(|c| c.re.abs().powf(p) * cell).sum();
        // integrand of \int ... dt/t in the variable u = log t
        let integrand = t.powf((1.0 - s) * p) * lp_p;
        let w = if k == 0 || k == nodes - 1 { 0.5 } else { 1.0 };
        acc += w * integrand * du;
    }
    acc.powf(1.0 / p)
}

/// Riesz potential `I^s g = F^{-1}(|xi|^s F g)`; the mean mode is annihilated
/// for every `s != 0` (the quotient-by-polynomials convention), and `s = 0`
/// is the identity.
pub fn riesz_potential(g: &SampledFunction, s: f64) -> Result<SampledFunction, SpaceError> {
    if !g.periodic {
        return Err(SpaceError::NotPeriodic);
    }
    if s == 0.0 {
        return Ok(g.clone());
    }
    Ok(apply_multiplier(g, |xi| if xi == 0.0 { 0.0 } else { xi.powf(s) }))
}

/// Derivative on the interval grid by shifted five-point stencils.
fn interval_derivative(g: &SampledFunction) -> Vec<f64> {
    let m = g.m;
    let h = g.spacing();
    let width = 5.min(m);
    (0..m)
        .map(|i| {
            let first = i.saturating_sub(2).min(m - width);
            let xs: Vec<f64> = (0..width).map(|k| (first + k) as f64 * h).collect();
            let w = crate::grid::fornberg_weights(1, i as f64 * h, &xs);
            w.iter()
                .enumerate()
                .map(|(k, &wk)| wk * g.values[first + k])
                .sum()
        })
        .collect()
}

/// Ratio `||g||_{W_p^r([0,a])} / ||g||_{H_p^1([0,a])}` for `g(0) = 0`:
/// the fractional norm is `L_p` plus the Gagliardo seminorm, the right-hand
/// side combines `g` and `g'` in `L_p`.
pub fn hardy_ratio(g: &SampledFunction, r: f64, p: f64) -> Result<f64, SpaceError> {
    if g.periodic {
        return Err(SpaceError::NotInterval);
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(SpaceError::OrderOutOfRange);
    }
    let w_norm = g.lp_norm(p) + slobodeckij_seminorm(g, r, p)?.value;
    let dg = interval_derivative(g);
    let dg_p: f64 = dg
        .iter()
        .enumerate()
        .map(|(i, &v)| v.abs().powf(p) * g.weight(i))
        .sum();
    let h1 = (g.lp_norm(p).powf(p) + dg_p).powf(1.0 / p);
    if h1 == 0.0 {
        return Err(SpaceError::ZeroDenominator);
    }
    Ok(w_norm / h1)
}

/// Reflection extension of `h` from `[0, a]` to `[0, 3a]`:
/// `(Eh)(t) = h(t)` on `[0, a]` and `3 h~(2a - t) - 2 h~(3a - 2t)` beyond,
/// `h~` the zero extension of `h` below `t = 0`. Both reflected sample
/// arguments land on grid points, so the original segment is copied
/// bit-exactly and the extension vanishes for `t >= 2a`.
pub fn extend_c1(h: &SampledFunction) -> Result<SampledFunction, SpaceError> {
    if h.periodic {
        return Err(SpaceError::NotInterval);
    }
    let h0 = h.values[0].abs();
    let dh = interval_derivative(h);
    let dh0 = dh[0].abs();
    if h0 > 1e-10 || dh0 > 1e-10 {
        return Err(SpaceError::PreconditionViolated(h0, dh0));
    }
    let m = h.m;
    let tilde = |idx: isize| -> f64 {
        if idx < 0 {
            0.0
        } else {
            h.values[idx as usize]
        }
    };
    let m_out = 3 * (m - 1) + 1;
    let values: Vec<f64> = (0..m_out)
        .map(|j| {
            if j <= m - 1 {
                h.values[j]
            } else {
                let refl1 = 2 * (m - 1) as isize - j as isize;
                let refl2 = 3 * (m - 1) as isize - 2 * j as isize;
                3.0 * tilde(refl1) - 2.0 * tilde(refl2)
            }
        })
        .collect();
    Ok(SampledFunction {
        n: 1,
        m: m_out,
        length: 3.0 * h.length,
        periodic: false,
        values,
    })
}

/// A family of translated cutoffs whose squares sum to one.
#[derive(Debug, Clone)]
pub struct PartitionFamily {
    pub members: Vec<SampledFunction>,
    pub centers: Vec<Vec<f64>>,
    pub epsilon: f64,
}

/// Smooth plateau profile: 1 for r <= 1/2, 0 for r >= 1.
fn plateau(r: f64) -> f64 {
    if r <= 0.5 {
        1.0
    } else if r >= 1.0 {
        0.0
    } else {
        let f = |s: f64| (-1.0 / s).exp();
        let a = f(1.0 - r);
        let b = f(r - 0.5);
        a / (a + b)
    }
}

/// Base cutoff supported in the cube of half-width `eps/2`, identically one
/// on the half-width `eps/4` cube.
fn base_bump(x: &[f64], center: &[f64], eps: f64) -> f64 {
    x.iter()
        .zip(center)
        .map(|(&xi, &ci)| plateau((xi - ci).abs() / (0.5 * eps)))
        .product()
}

/// Translated-and-normalized partition family
/// `phi_j = (tau_{x_j} phi) (sum_k (tau_{x_k} phi)^2)^{-1/2}` restricted to
/// the sampled window; centers sit on the lattice `(eps/2) Z^n` so adjacent
/// plateaus meet at the cube midpoints. On every grid point the squares sum
/// to one.
pub fn partition_of_unity(
    epsilon: f64,
    window_lo: &[f64],
    window_hi: &[f64],
    m: usize,
) -> Result<PartitionFamily, SpaceError> {
    assert!(epsilon > 0.0);
    let n = window_lo.len();
    assert!(n == 1 || n == 2);
    assert_eq!(window_hi.len(), n);
    let half = 0.5 * epsilon;
    // centers whose support cube can touch the window
    let mut axis_centers: Vec<Vec<f64>> = Vec::with_capacity(n);
    for d in 0..n {
        let k_lo = ((window_lo[d] - half) / half).ceil() as i64;
        let k_hi = ((window_hi[d] + half) / half).floor() as i64;
        axis_centers.push((k_lo..=k_hi).map(|k| k as f64 * half).collect());
    }
    let mut centers: Vec<Vec<f64>> = vec![vec![]];
    for axis in &axis_centers {
        let mut next = Vec::new();
        for c in &centers {
            for &v in axis {
                let mut cc = c.clone();
                cc.push(v);
                next.push(cc);
            }
        }
        centers = next;
    }
    let overlapping = centers
        .iter()
        .filter(|c| {
            c.iter()
                .zip(window_lo.iter().zip(window_hi))
                .all(|(&ci, (&lo, &hi))| ci + half > lo && ci - half < hi)
        })
        .count();
    if overlapping < 2 {
        return Err(SpaceError::WindowTooSmall);
    }
    // sample every translate on the window grid and normalize pointwise
    let len = if n == 1 { m } else { m * m };
    let coords = |idx: usize| -> Vec<f64> {
        let mut x = Vec::with_capacity(n);
        let spacing: Vec<f64> = (0..n)
            .map(|d| (window_hi[d] - window_lo[d]) / (m - 1) as f64)
            .collect();
        if n == 1 {
            x.push(window_lo[0] + idx as f64 * spacing[0]);
        } else {
            x.push(window_lo[0] + (idx % m) as f64 * spacing[0]);
            x.push(window_lo[1] + (idx / m) as f64 * spacing[1]);
        }
        x
    };
    let mut raw: Vec<Vec<f64>> = centers
        .iter()
        .map(|c| (0..len).map(|idx| base_bump(&coords(idx), c, epsilon)).collect())
        .collect();
    let mut sum_sq = vec![0.0f64; len];
    for member in &raw {
        for (s, &v) in sum_sq.iter_mut().zip(member) {
            *s += v * v;
        }
    }
    for member in &mut raw {
        for (v, &s) in member.iter_mut().zip(&sum_sq) {
            *v /= s.sqrt();
        }
    }
    let length = window_hi[0] - window_lo[0];
    let members = raw
        .into_iter()
        .map(|values| SampledFunction {
            n,
            m,
            length,
            periodic: false,
            values,
        })
        .collect();
    Ok(PartitionFamily {
        members,
        centers,
        epsilon,
    })
}
