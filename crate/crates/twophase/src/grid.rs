//! Periodic interface grids, bulk level stacks and the discrete derivative
//! machinery shared by the kernel evaluators.
//!
//! Interface fields live on uniform periodic grids over `[0, 2pi)^n` with
//! `n` in {1, 2} and are differentiated spectrally. Bulk fields are stacks of
//! such grids on horizontal levels `y = +-j*dy`, `j = 1..L`; the interface
//! level `y = 0` belongs to neither phase and one-sided traces are produced
//! by quadratic extrapolation from the three nearest levels.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Finite-difference weights for the `order`-th derivative at `x0` from the
/// nodes `xs`, by Fornberg's recursion.
pub fn fornberg_weights(order: usize, x0: f64, xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    assert!(n > order, "need more nodes than the derivative order");
    let mut c = vec![vec![0.0f64; order + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[order]).collect()
}

/// Real scalar samples on a uniform periodic grid over `[0, 2pi)^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    n: usize,
    m: usize,
    data: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(n: usize, m: usize) -> Self {
        assert!(n == 1 || n == 2, "only n in {{1,2}} is supported");
        assert!(m >= 8, "need at least 8 points per axis");
        let len = if n == 1 { m } else { m * m };
        Self {
            n,
            m,
            data: vec![0.0; len],
        }
    }

    /// Samples `f` on the grid; for `n = 1` the second argument is zero.
    pub fn from_fn(n: usize, m: usize, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut field = Self::zeros(n, m);
        let h = field.spacing();
        if n == 1 {
            for i in 0..m {
                field.data[i] = f(i as f64 * h, 0.0);
            }
        } else {
            for iy in 0..m {
                for ix in 0..m {
                    field.data[iy * m + ix] = f(ix as f64 * h, iy as f64 * h);
                }
            }
        }
        field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn points_per_axis(&self) -> usize {
        self.m
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.m as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.n == other.n && self.m == other.m
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            n: self.n,
            m: self.m,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert!(self.same_grid(other), "grid mismatch in zip");
        Self {
            n: self.n,
            m: self.m,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn add_scaled(&self, other: &Self, c: f64) -> Self {
        self.zip(other, |a, b| a + c * b)
    }

    /// Spectral derivative along `axis` (0 = x, 1 = y for n = 2).
    pub fn deriv(&self, axis: usize) -> Self {
        assert!(axis < self.n, "axis out of range");
        self.spectral(axis, 1)
    }

    /// Spectral second derivative along `axis`.
    pub fn deriv2(&self, axis: usize) -> Self {
        assert!(axis < self.n, "axis out of range");
        self.spectral(axis, 2)
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.n).map(|a| self.deriv(a)).collect()
    }

    pub fn laplacian(&self) -> Self {
        let mut out = self.deriv2(0);
        if self.n == 2 {
            out = out.add_scaled(&self.deriv2(1), 1.0);
        }
        out
    }

    /// Hessian entries in row-major order (n*n fields).
    pub fn hessian(&self) -> Vec<Self> {
        let mut out = Vec::with_capacity(self.n * self.n);
        for a in 0..self.n {
            for b in 0..self.n {
                if a == b {
                    out.push(self.deriv2(a));
                } else {
                    out.push(self.deriv(a).deriv(b));
                }
            }
        }
        out
    }

    fn spectral(&self, axis: usize, order: usize) -> Self {
        let m = self.m;
        let mut planner = FftPlanner::<f64>::new();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        let mut out = self.clone();
        let mut line = vec![Complex64::new(0.0, 0.0); m];
        let lines = if self.n == 1 { 1 } else { m };
        for l in 0..lines {
            for i in 0..m {
                let idx = line_index(self.n, self.m, axis, l, i);
                line[i] = Complex64::new(self.data[idx], 0.0);
            }
            fwd.process(&mut line);
            for (i, v) in line.iter_mut().enumerate() {
                let k = wavenumber(i, m);
                let factor = match order {
                    1 => {
                        // the Nyquist mode has no well-defined odd derivative
                        if m % 2 == 0 && i == m / 2 {
                            Complex64::new(0.0, 0.0)
                        } else {
                            Complex64::new(0.0, k)
                        }
                    }
                    2 => Complex64::new(-k * k, 0.0),
                    _ => unreachable!(),
                };
                *v *= factor;
            }
            inv.process(&mut line);
            let scale = 1.0 / m as f64;
            for i in 0..m {
                let idx = line_index(self.n, self.m, axis, l, i);
                out.data[idx] = line[i].re * scale;
            }
        }
        out
    }
}

fn wavenumber(i: usize, m: usize) -> f64 {
    if i <= m / 2 {
        i as f64
    } else {
        i as f64 - m as f64
    }
}

fn line_index(n: usize, m: usize, axis: usize, line: usize, i: usize) -> usize {
    if n == 1 {
        i
    } else if axis == 0 {
        line * m + i
    } else {
        i * m + line
    }
}

/// Scalar samples on the two bulk phases: levels `y = +j*dy` (upper) and
/// `y = -j*dy` (lower) for `j = 1..=levels`, each level a periodic x-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BulkScalar {
    n: usize,
    m: usize,
    levels: usize,
    dy: f64,
    /// level-major: `upper[(j-1)*plane + idx]` holds level `y = j*dy`
    upper: Vec<f64>,
    lower: Vec<f64>,
}

impl BulkScalar {
    pub fn zeros(n: usize, m: usize, levels: usize, dy: f64) -> Self {
        assert!(n == 1 || n == 2);
        assert!(m >= 8);
        assert!(levels >= 5, "need at least 5 levels for the y-stencils");
        assert!(dy > 0.0);
        let plane = if n == 1 { m } else { m * m };
        Self {
            n,
            m,
            levels,
            dy,
            upper: vec![0.0; plane * levels],
            lower: vec![0.0; plane * levels],
        }
    }

    /// Samples `f(x, y)` (or `f(x, y)` with packed `x = (x, y_horiz)` for
    /// n = 2 via `g(x0, x1, y)`) on both phases.
    pub fn from_fn(
        n: usize,
        m: usize,
        levels: usize,
        dy: f64,
        mut f: impl FnMut(f64, f64, f64) -> f64,
    ) -> Self {
        let mut field = Self::zeros(n, m, levels, dy);
        let h = 2.0 * PI / m as f64;
        let plane = field.plane_len();
        for j in 0..levels {
            let y = (j + 1) as f64 * dy;
            for idx in 0..plane {
                let (x0, x1) = plane_coords(n, m, h, idx);
                field.upper[j * plane + idx] = f(x0, x1, y);
                field.lower[j * plane + idx] = f(x0, x1, -y);
            }
        }
        field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn points_per_axis(&self) -> usize {
        self.m
    }

    pub fn level_count(&self) -> usize {
        self.levels
    }

    pub fn y_spacing(&self) -> f64 {
        self.dy
    }

    pub fn plane_len(&self) -> usize {
        if self.n == 1 {
            self.m
        } else {
            self.m * self.m
        }
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.n == other.n && self.m == other.m && self.levels == other.levels && self.dy == other.dy
    }

    pub fn matches_interface(&self, f: &ScalarField) -> bool {
        self.n == f.dim() && self.m == f.points_per_axis()
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn max_abs(&self) -> f64 {
        let a = self.upper.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        self.lower.iter().fold(a, |a, v| a.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut out = self.clone();
        out.upper.iter_mut().for_each(|v| *v = f(*v));
        out.lower.iter_mut().for_each(|v| *v = f(*v));
        out
    }

    pub fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert!(self.same_grid(other), "grid mismatch in bulk zip");
        let mut out = self.clone();
        for (v, &o) in out.upper.iter_mut().zip(&other.upper) {
            *v = f(*v, o);
        }
        for (v, &o) in out.lower.iter_mut().zip(&other.lower) {
            *v = f(*v, o);
        }
        out
    }

    pub fn add_scaled(&self, other: &Self, c: f64) -> Self {
        self.zip(other, |a, b| a + c * b)
    }

    /// Multiplies each phase by a constant (e.g. a phase-wise coefficient).
    pub fn scale_phases(&self, upper_c: f64, lower_c: f64) -> Self {
        let mut out = self.clone();
        out.upper.iter_mut().for_each(|v| *v *= upper_c);
        out.lower.iter_mut().for_each(|v| *v *= lower_c);
        out
    }

    /// Pointwise product with an interface field extended y-independently.
    pub fn mul_interface(&self, f: &ScalarField) -> Self {
        assert!(self.matches_interface(f), "grid mismatch bulk x interface");
        let plane = self.plane_len();
        let mut out = self.clone();
        for j in 0..self.levels {
            for idx in 0..plane {
                out.upper[j * plane + idx] *= f.values()[idx];
                out.lower[j * plane + idx] *= f.values()[idx];
            }
        }
        out
    }

    /// Spectral derivative along horizontal axis `axis`, level by level.
    pub fn deriv_x(&self, axis: usize) -> Self {
        let plane = self.plane_len();
        let mut out = self.clone();
        for j in 0..self.levels {
            let up = plane_field(self.n, self.m, &self.upper[j * plane..(j + 1) * plane]);
            let lo = plane_field(self.n, self.m, &self.lower[j * plane..(j + 1) * plane]);
            out.upper[j * plane..(j + 1) * plane].copy_from_slice(up.deriv(axis).values());
            out.lower[j * plane..(j + 1) * plane].copy_from_slice(lo.deriv(axis).values());
        }
        out
    }

    /// Vertical derivative of the given order (1 or 2) by five-point
    /// finite-difference stencils on each phase separately. Stencils shift
    /// one-sided near the interface and the outer edge of the stack.
    pub fn deriv_y(&self, order: usize) -> Self {
        assert!(order == 1 || order == 2);
        let l = self.levels;
        let plane = self.plane_len();
        let width = 5.min(l);
        // per-level stencils: (first node, weights)
        let stencils: Vec<(usize, Vec<f64>)> = (0..l)
            .map(|j| {
                let first = j.saturating_sub(2).min(l - width);
                let xs: Vec<f64> = (0..width).map(|k| (first + k) as f64 * self.dy).collect();
                (first, fornberg_weights(order, j as f64 * self.dy, &xs))
            })
            .collect();
        let mut out = self.clone();
        let apply = |src: &[f64], dst: &mut [f64], sign: f64| {
            for j in 0..l {
                let (first, w) = &stencils[j];
                for idx in 0..plane {
                    let mut acc = 0.0;
                    for (k, &wk) in w.iter().enumerate() {
                        acc += wk * src[(first + k) * plane + idx];
                    }
                    // lower phase levels run along -y: odd derivatives flip sign
                    dst[j * plane + idx] = sign * acc;
                }
            }
        };
        let odd_sign = if order % 2 == 1 { -1.0 } else { 1.0 };
        apply(&self.upper, &mut out.upper, 1.0);
        apply(&self.lower, &mut out.lower, odd_sign);
        out
    }

    /// One-sided trace at `y = 0+` by quadratic extrapolation from the three
    /// nearest upper levels.
    pub fn trace_upper(&self) -> ScalarField {
        self.trace(&self.upper)
    }

    /// One-sided trace at `y = 0-`.
    pub fn trace_lower(&self) -> ScalarField {
        self.trace(&self.lower)
    }

    fn trace(&self, side: &[f64]) -> ScalarField {
        let plane = self.plane_len();
        let mut out = ScalarField::zeros(self.n, self.m);
        for idx in 0..plane {
            // Lagrange extrapolation to y = 0 from levels dy, 2dy, 3dy
            out.values_mut()[idx] =
                3.0 * side[idx] - 3.0 * side[plane + idx] + side[2 * plane + idx];
        }
        out
    }
}

fn plane_coords(n: usize, m: usize, h: f64, idx: usize) -> (f64, f64) {
    if n == 1 {
        (idx as f64 * h, 0.0)
    } else {
        ((idx % m) as f64 * h, (idx / m) as f64 * h)
    }
}

fn plane_field(n: usize, m: usize, data: &[f64]) -> ScalarField {
    let mut f = ScalarField::zeros(n, m);
    f.values_mut().copy_from_slice(data);
    f
}
