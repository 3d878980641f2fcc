//! Chebyshev-Gauss-Lobatto collocation on `[0, 1]`.
//!
//! Nodes are `y_j = (1 - cos(j pi / N)) / 2`, ascending, so `y_0 = 0` and
//! `y_N = 1`. Differentiation matrices carry the factor 2 per derivative
//! order from the map `[-1, 1] -> [0, 1]`. `d2 = d1 d1` and `d4 = d2 d2`.
//! Quadrature uses Clenshaw-Curtis weights, exact for degree `<= N`.

use std::f64::consts::PI;

use faer::{c64, Mat};

use crate::error::{Error, Result};

pub const MIN_ORDER: usize = 16;
pub const DEFAULT_ORDER: usize = 100;

#[derive(Clone, Debug)]
pub struct SpectralOperator {
    n: usize,
    nodes: Vec<f64>,
    d1: Mat<f64>,
    d2: Mat<f64>,
    d4: Mat<f64>,
    quad_weights: Vec<f64>,
    bary: Vec<f64>,
}

/// Samples of a complex function on the collocation nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub values: Vec<c64>,
}

impl GridFunction {
    pub fn new(values: Vec<c64>) -> Self {
        Self { values }
    }

    pub fn zeros(op: &SpectralOperator) -> Self {
        Self { values: vec![c64::new(0.0, 0.0); op.len()] }
    }

    pub fn from_real_fn(op: &SpectralOperator, f: impl Fn(f64) -> f64) -> Self {
        Self { values: op.nodes.iter().map(|&y| c64::new(f(y), 0.0)).collect() }
    }

    pub fn from_fn(op: &SpectralOperator, f: impl Fn(f64) -> c64) -> Self {
        Self { values: op.nodes.iter().map(|&y| f(y)).collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scale(&self, s: c64) -> Self {
        Self { values: self.values.iter().map(|v| v * s).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

impl SpectralOperator {
    /// `n` is the polynomial order `N`; the grid has `N + 1` nodes.
    pub fn build(n: usize) -> Result<Self> {
        if n < MIN_ORDER {
            return Err(Error::GridTooSmall(n));
        }
        let nf = n as f64;
        let half = |j: usize| (j as f64) * PI / (2.0 * nf);
        // (1 - cos(2t)) / 2 = sin(t)^2 keeps both endpoints exact
        let nodes: Vec<f64> = (0..=n).map(|j| half(j).sin().powi(2)).collect();

        let c = |j: usize| if j == 0 || j == n { 2.0 } else { 1.0 };
        let sign = |k: usize| if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut d1 = Mat::<f64>::zeros(n + 1, n + 1);
        for i in 0..=n {
            let mut row_sum = 0.0;
            for j in 0..=n {
                if i == j {
                    continue;
                }
                // y_i - y_j without cancellation
                let diff = (half(i + j)).sin() * (half(i) - half(j)).sin();
                let v = c(i) / c(j) * sign(i + j) / diff;
                d1[(i, j)] = v;
                row_sum += v;
            }
            d1[(i, i)] = -row_sum;
        }
        let mut d2 = &d1 * &d1;
        let mut d4 = &d2 * &d2;
        negative_sum_diagonal(&mut d2);
        negative_sum_diagonal(&mut d4);

        let quad_weights = clenshaw_curtis(n).into_iter().map(|w| 0.5 * w).collect();
        let bary = (0..=n).map(|j| sign(j) / c(j)).collect();
        Ok(Self { n, nodes, d1, d2, d4, quad_weights, bary })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Number of nodes, `N + 1`.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn d1(&self) -> &Mat<f64> {
        &self.d1
    }

    pub fn d2(&self) -> &Mat<f64> {
        &self.d2
    }

    pub fn d4(&self) -> &Mat<f64> {
        &self.d4
    }

    pub fn quad_weights(&self) -> &[f64] {
        &self.quad_weights
    }

    fn check(&self, f: &GridFunction) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: f.len() });
        }
        Ok(())
    }

    pub fn apply(&self, m: &Mat<f64>, f: &GridFunction) -> Result<GridFunction> {
        self.check(f)?;
        Ok(GridFunction { values: apply_real(m, &f.values) })
    }

    pub fn diff(&self, f: &GridFunction) -> Result<GridFunction> {
        self.apply(&self.d1, f)
    }

    pub fn diff2(&self, f: &GridFunction) -> Result<GridFunction> {
        self.apply(&self.d2, f)
    }

    /// Quadrature of the samples.
    pub fn integrate(&self, f: &GridFunction) -> Result<c64> {
        self.check(f)?;
        Ok(self
            .quad_weights
            .iter()
            .zip(&f.values)
            .fold(c64::new(0.0, 0.0), |acc, (&w, &v)| acc + v * w))
    }

    /// `<f, g> = int_0^1 f conj(g) dy`.
    pub fn inner_product(&self, f: &GridFunction, g: &GridFunction) -> Result<c64> {
        self.check(f)?;
        self.check(g)?;
        Ok(self
            .quad_weights
            .iter()
            .zip(f.values.iter().zip(&g.values))
            .fold(c64::new(0.0, 0.0), |acc, (&w, (&a, &b))| acc + a * b.conj() * w))
    }

    /// Weighted inner product `int_0^1 h f conj(g) dy` with real weight samples `h`.
    pub fn weighted_inner(&self, h: &[f64], f: &GridFunction, g: &GridFunction) -> Result<c64> {
        self.check(f)?;
        self.check(g)?;
        if h.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: h.len() });
        }
        Ok((0..self.len()).fold(c64::new(0.0, 0.0), |acc, j| {
            acc + f.values[j] * g.values[j].conj() * (h[j] * self.quad_weights[j])
        }))
    }

    /// `||f||^2`; real by construction.
    pub fn norm_sq(&self, f: &GridFunction) -> Result<f64> {
        self.check(f)?;
        Ok(self
            .quad_weights
            .iter()
            .zip(&f.values)
            .map(|(&w, v)| w * v.norm_sqr())
            .sum())
    }

    /// Barycentric evaluation of the interpolant at an arbitrary `y`.
    pub fn eval_at(&self, f: &GridFunction, y: f64) -> Result<c64> {
        self.check(f)?;
        let mut num = c64::new(0.0, 0.0);
        let mut den = 0.0;
        for (j, (&yj, &wj)) in self.nodes.iter().zip(&self.bary).enumerate() {
            let d = y - yj;
            if d == 0.0 {
                return Ok(f.values[j]);
            }
            num += f.values[j] * (wj / d);
            den += wj / d;
        }
        Ok(num / den)
    }

    /// Resample onto another grid through the interpolating polynomial.
    pub fn resample(&self, f: &GridFunction, target: &SpectralOperator) -> Result<GridFunction> {
        let values = target
            .nodes
            .iter()
            .map(|&y| self.eval_at(f, y))
            .collect::<Result<Vec<_>>>()?;
        Ok(GridFunction { values })
    }
}

/// Dense real matrix times complex vector.
pub(crate) fn apply_real(m: &Mat<f64>, v: &[c64]) -> Vec<c64> {
    (0..m.nrows())
        .map(|i| {
            let mut re = 0.0;
            let mut im = 0.0;
            for (j, x) in v.iter().enumerate() {
                let a = m[(i, j)];
                re += a * x.re;
                im += a * x.im;
            }
            c64::new(re, im)
        })
        .collect()
}

/// Clenshaw-Curtis weights on `[-1, 1]` for the `N + 1` Chebyshev extreme points.
// derivatives of constants vanish exactly; restoring that on the diagonal
// removes part of the rounding the matrix products accumulate
fn negative_sum_diagonal(m: &mut Mat<f64>) {
    for i in 0..m.nrows() {
        let off: f64 = (0..m.ncols()).filter(|&j| j != i).map(|j| m[(i, j)]).sum();
        m[(i, i)] = -off;
    }
}

fn clenshaw_curtis(n: usize) -> Vec<f64> {
    let nf = n as f64;
    let mut w = vec![0.0; n + 1];
    let mut v = vec![1.0; n.saturating_sub(1)];
    let theta = |j: usize| j as f64 * PI / nf;
    if n.is_multiple_of(2) {
        w[0] = 1.0 / (nf * nf - 1.0);
        w[n] = w[0];
        for k in 1..n / 2 {
            let kf = k as f64;
            for (i, vi) in v.iter_mut().enumerate() {
                *vi -= 2.0 * (2.0 * kf * theta(i + 1)).cos() / (4.0 * kf * kf - 1.0);
            }
        }
        for (i, vi) in v.iter_mut().enumerate() {
            *vi -= (nf * theta(i + 1)).cos() / (nf * nf - 1.0);
        }
    } else {
        w[0] = 1.0 / (nf * nf);
        w[n] = w[0];
        for k in 1..=(n - 1) / 2 {
            let kf = k as f64;
            for (i, vi) in v.iter_mut().enumerate() {
                *vi -= 2.0 * (2.0 * kf * theta(i + 1)).cos() / (4.0 * kf * kf - 1.0);
            }
        }
    }
    for (i, vi) in v.iter().enumerate() {
        w[i + 1] = 2.0 * vi / nf;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(op: &SpectralOperator, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction::from_real_fn(op, f)
    }

    fn max_err(a: &GridFunction, f: impl Fn(f64) -> f64, op: &SpectralOperator) -> f64 {
        a.values
            .iter()
            .zip(op.nodes())
            .map(|(v, &y)| (v - c64::new(f(y), 0.0)).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn grid_layout() {
        let op = SpectralOperator::build(16).unwrap();
        assert_eq!(op.nodes()[0], 0.0);
        assert_eq!(op.nodes()[16], 1.0);
        assert!(op.nodes().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(SpectralOperator::build(15).unwrap_err(), Error::GridTooSmall(15));
    }

    #[test]
    fn differentiates_polynomials() {
        let op = SpectralOperator::build(16).unwrap();
        let d = op.diff(&real(&op, |y| y * y)).unwrap();
        assert!(max_err(&d, |y| 2.0 * y, &op) <= 1e-12);
        let d4 = op.apply(op.d4(), &real(&op, |y| y.powi(4))).unwrap();
        let e4 = max_err(&d4, |_| 24.0, &op);
        // d4 entries reach ~1e10 at n = 16, so 1e-8 is near the rounding floor
        assert!(e4 <= 5e-8, "d4 error {e4:e}");
        for k in 1..16 {
            let d = op.diff(&real(&op, |y| y.powi(k))).unwrap();
            let e = max_err(&d, |y| k as f64 * y.powi(k - 1), &op);
            assert!(e <= 1e-10, "k = {k}: {e}");
        }
    }

    #[test]
    fn spectral_accuracy_exp() {
        let op = SpectralOperator::build(24).unwrap();
        let d = op.diff(&real(&op, f64::exp)).unwrap();
        assert!(max_err(&d, f64::exp, &op) < 1e-10);
    }

    #[test]
    fn quadrature_exact_to_degree_n() {
        for n in [16, 17, 40, 101] {
            let op = SpectralOperator::build(n).unwrap();
            assert!(op.quad_weights().iter().all(|&w| w > 0.0));
            for k in 0..=n as i32 {
                let q = op.integrate(&real(&op, |y| y.powi(k))).unwrap();
                assert!((q.re - 1.0 / (k as f64 + 1.0)).abs() <= 1e-12, "n {n} k {k}");
            }
        }
    }

    #[test]
    fn inner_product_examples() {
        let op = SpectralOperator::build(64).unwrap();
        let one = real(&op, |_| 1.0);
        assert!((op.inner_product(&one, &one).unwrap() - 1.0).norm() < 1e-14);
        let y = real(&op, |y| y);
        assert!((op.inner_product(&y, &y).unwrap().re - 1.0 / 3.0).abs() <= 1e-12);
        let s = real(&op, |y| (PI * y).sin());
        assert!((op.inner_product(&s, &s).unwrap().re - 0.5).abs() <= 1e-8);
        assert!((op.norm_sq(&s).unwrap() - 0.5).abs() <= 1e-8);
        assert_eq!(op.norm_sq(&GridFunction::zeros(&op)).unwrap(), 0.0);
        let iy = GridFunction::from_fn(&op, |y| c64::new(0.0, y));
        assert!((op.norm_sq(&iy).unwrap() - 1.0 / 3.0).abs() <= 1e-12);

        let f = GridFunction::from_fn(&op, |y| c64::new(y.cos(), y * y));
        let g = GridFunction::from_fn(&op, |y| c64::new(1.0 - y, (3.0 * y).sin()));
        let fg = op.inner_product(&f, &g).unwrap();
        let gf = op.inner_product(&g, &f).unwrap();
        assert!((fg - gf.conj()).norm() < 1e-15);

        let short = GridFunction::new(vec![c64::new(0.0, 0.0); 3]);
        assert!(matches!(
            op.inner_product(&short, &one),
            Err(Error::LengthMismatch { expected: 65, got: 3 })
        ));
    }

    #[test]
    fn integration_by_parts() {
        let op = SpectralOperator::build(48).unwrap();
        let f = GridFunction::from_fn(&op, |y| c64::new((2.0 * y).exp(), y.sin()));
        let g = GridFunction::from_fn(&op, |y| c64::new(1.0 + y * y, -(y * 3.0).cos()));
        let lhs = op.inner_product(&op.diff(&f).unwrap(), &g).unwrap()
            + op.inner_product(&f, &op.diff(&g).unwrap()).unwrap();
        let n = op.order();
        let bnd = f.values[n] * g.values[n].conj() - f.values[0] * g.values[0].conj();
        assert!((lhs - bnd).norm() < 1e-12);
    }

    #[test]
    fn resample_is_exact_for_polynomials() {
        let a = SpectralOperator::build(20).unwrap();
        let b = SpectralOperator::build(33).unwrap();
        let f = real(&a, |y| 1.0 - 3.0 * y + y.powi(7));
        let g = a.resample(&f, &b).unwrap();
        assert!(max_err(&g, |y| 1.0 - 3.0 * y + y.powi(7), &b) < 1e-13);
    }
}
