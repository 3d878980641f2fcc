//! Discrete generalized eigenproblem `A x = C B x` for the micropolar
//! Orr-Sommerfeld system.
//!
//! `x` stacks the nodal samples of `phi` (first `N + 1` entries) and `omega`
//! (last `N + 1`). With `L2 = D^2 - a^2`, the interior rows are
//!
//! ```text
//! phi:   i a (U L2 - U'') phi - nu L2^2 phi - (R0/Rk) L2 omega     = C i a L2 phi
//! omega: (1/Rnu) L2 phi - i a W' phi
//!        + i a U omega - (1/Rgamma) L2 omega + (2 R0/Rnu) omega   = C i a omega
//! ```
//!
//! with `nu = 1/Rmu + 1/(2 Rk)`. Boundary conditions replace rows:
//! `phi(0)`, `phi'(0)`, `phi'(1)`, `phi(1)` take rows `0, 1, N-1, N` of the
//! phi block and `omega(0)`, `omega(1)` the first and last rows of the omega
//! block. The matching rows of `B` are zero, so those six directions become
//! infinite eigenvalues. Constraint rows are rescaled to the magnitude of the
//! interior entries; this does not change the finite spectrum.

use std::io::Write;
use std::sync::Arc;

use faer::{c64, Mat};

use crate::baseflow::BaseFlow;
use crate::error::{Error, Result};
use crate::params::{classical_limit, MicropolarParams};
use crate::spectral::SpectralOperator;

#[derive(Clone, Debug)]
pub struct EigenProblem {
    /// Wave number on the unit-gap domain.
    pub alpha: f64,
    pub a_matrix: Mat<c64>,
    pub b_matrix: Mat<c64>,
    pub params: MicropolarParams,
    pub flow: BaseFlow,
    pub op: Arc<SpectralOperator>,
    pub bc_rows: Vec<usize>,
}

/// Which pieces of the operator to keep; the default keeps everything.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Couplings {
    pub phi_to_omega: bool,
    pub omega_to_phi: bool,
}

impl Default for Couplings {
    fn default() -> Self {
        Self { phi_to_omega: true, omega_to_phi: true }
    }
}

impl Couplings {
    pub const NONE: Couplings = Couplings { phi_to_omega: false, omega_to_phi: false };
}

impl EigenProblem {
    pub fn dim(&self) -> usize {
        self.a_matrix.nrows()
    }

    /// Number of nodes per field, `N + 1`.
    pub fn block(&self) -> usize {
        self.op.len()
    }

    pub fn interior_rows(&self) -> Vec<usize> {
        (0..self.dim()).filter(|r| !self.bc_rows.contains(r)).collect()
    }

    /// Write `A` then `B` as CSV, row-major, each entry as `re,im`.
    pub fn dump_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (label, m) in [("A", &self.a_matrix), ("B", &self.b_matrix)] {
            writeln!(out, "# {label} {}x{}", m.nrows(), m.ncols())?;
            for i in 0..m.nrows() {
                let row: Vec<String> = (0..m.ncols())
                    .map(|j| format!("{:.17e},{:.17e}", m[(i, j)].re, m[(i, j)].im))
                    .collect();
                writeln!(out, "{}", row.join(","))?;
            }
        }
        Ok(())
    }
}

pub fn boundary_rows(op: &SpectralOperator) -> Vec<usize> {
    let n = op.order();
    vec![0, 1, n - 1, n, n + 1, 2 * n + 1]
}

pub fn assemble(
    alpha: f64,
    params: &MicropolarParams,
    flow: &BaseFlow,
    op: Arc<SpectralOperator>,
) -> Result<EigenProblem> {
    assemble_with(alpha, params, flow, op, Couplings::default())
}

/// [`assemble`] with selected coupling blocks switched off exactly.
pub fn assemble_with(
    alpha: f64,
    params: &MicropolarParams,
    flow: &BaseFlow,
    op: Arc<SpectralOperator>,
    couplings: Couplings,
) -> Result<EigenProblem> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidWaveNumber(alpha));
    }
    params.validate()?;
    let n = op.order();
    let m = n + 1;
    let dim = 2 * m;
    let a2 = alpha * alpha;
    let ia = c64::new(0.0, alpha);
    let d1 = op.d1();
    let d2 = op.d2();
    let d4 = op.d4();
    let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let l2 = |i: usize, j: usize| d2[(i, j)] - a2 * delta(i, j);
    let l2sq = |i: usize, j: usize| d4[(i, j)] - 2.0 * a2 * d2[(i, j)] + a2 * a2 * delta(i, j);

    let y = op.nodes();
    let u: Vec<f64> = y.iter().map(|&t| flow.u(t)).collect();
    let upp: Vec<f64> = y.iter().map(|&t| flow.d2u(t)).collect();
    let wp: Vec<f64> = y.iter().map(|&t| flow.dw(t)).collect();

    let nu = params.viscous();
    let k_phi_omega = if couplings.omega_to_phi { params.vorticity_coupling() } else { 0.0 };
    let k_omega_phi = if couplings.phi_to_omega { params.rotation_coupling() } else { 0.0 };
    let shear_w = couplings.phi_to_omega;
    let diff_w = params.rotation_diffusion();
    let damp_w = params.rotation_damping();

    let mut a = Mat::<c64>::zeros(dim, dim);
    let mut b = Mat::<c64>::zeros(dim, dim);
    let zero = c64::new(0.0, 0.0);

    for i in 2..=n - 2 {
        for j in 0..m {
            let l = l2(i, j);
            a[(i, j)] = ia * (u[i] * l - upp[i] * delta(i, j)) - nu * l2sq(i, j);
            a[(i, m + j)] = c64::new(-k_phi_omega * l, 0.0);
            b[(i, j)] = ia * l;
        }
    }
    for i in 1..n {
        let r = m + i;
        for j in 0..m {
            let l = l2(i, j);
            let mut v = c64::new(k_omega_phi * l, 0.0);
            if shear_w && i == j {
                v -= ia * wp[i];
            }
            a[(r, j)] = v;
            a[(r, m + j)] = ia * (u[i] * delta(i, j)) - diff_w * l + damp_w * delta(i, j);
            b[(r, m + j)] = ia * delta(i, j);
        }
    }

    let bc_rows = boundary_rows(&op);
    for &r in &bc_rows {
        for j in 0..dim {
            a[(r, j)] = zero;
            b[(r, j)] = zero;
        }
    }
    // constraint rows are scaled to the size of the interior entries so that
    // the backward error of QZ leaves them satisfied to working precision
    let scale = (0..dim)
        .filter(|r| !bc_rows.contains(r))
        .flat_map(|r| (0..dim).map(move |j| (r, j)))
        .map(|(r, j)| a[(r, j)].norm())
        .fold(0.0, f64::max)
        .max(1.0);
    let d1_max = |row: usize| (0..m).map(|j| d1[(row, j)].abs()).fold(0.0, f64::max);
    let (s0, sn) = (scale / d1_max(0), scale / d1_max(n));
    a[(0, 0)] = c64::new(scale, 0.0);
    a[(n, n)] = c64::new(scale, 0.0);
    for j in 0..m {
        a[(1, j)] = c64::new(s0 * d1[(0, j)], 0.0);
        a[(n - 1, j)] = c64::new(sn * d1[(n, j)], 0.0);
    }
    a[(m, m)] = c64::new(scale, 0.0);
    a[(dim - 1, dim - 1)] = c64::new(scale, 0.0);

    Ok(EigenProblem {
        alpha,
        a_matrix: a,
        b_matrix: b,
        params: *params,
        flow: flow.clone(),
        op,
        bc_rows,
    })
}

/// Classical Orr-Sommerfeld pencil in channel units.
///
/// `alpha` and `reynolds` use the half-gap as length scale (the usual plane
/// Poiseuille convention, centreline velocity 1), so on the unit gap the wave
/// number is `2 alpha` and the viscosity `1 / (2 reynolds)`. Wave speeds are
/// unchanged by the rescaling.
pub fn classical_pencil(
    alpha: f64,
    reynolds: f64,
    flow: &BaseFlow,
    op: Arc<SpectralOperator>,
) -> Result<EigenProblem> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidWaveNumber(alpha));
    }
    let params = classical_limit(2.0 * reynolds)?;
    assemble(2.0 * alpha, &params, flow, op)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(n: usize) -> Arc<SpectralOperator> {
        Arc::new(SpectralOperator::build(n).unwrap())
    }

    fn matvec(m: &Mat<c64>, x: &[c64]) -> Vec<c64> {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * x[j]).sum())
            .collect()
    }

    #[test]
    fn sizes_and_boundary_rows() {
        let p = MicropolarParams::new(0.8, 10.0, 1.0, 15.0, 1.0).unwrap();
        let prob = assemble(1.0, &p, &BaseFlow::couette(), op(100)).unwrap();
        assert_eq!(prob.dim(), 202);
        assert_eq!(prob.bc_rows, vec![0, 1, 99, 100, 101, 201]);
        for &r in &prob.bc_rows {
            assert!((0..202).all(|j| prob.b_matrix[(r, j)] == c64::new(0.0, 0.0)));
        }
        assert_eq!(prob.interior_rows().len(), 196);
    }

    #[test]
    fn rejects_bad_alpha() {
        let p = MicropolarParams::new(0.8, 10.0, 1.0, 15.0, 1.0).unwrap();
        for a in [0.0, -1.0, f64::NAN] {
            assert!(matches!(
                assemble(a, &p, &BaseFlow::couette(), op(16)),
                Err(Error::InvalidWaveNumber(_))
            ));
        }
    }

    // phi = y^2 (1-y)^2, omega = y (1-y); residuals of the continuous
    // equations differentiated by hand:
    //   phi'' = 2 - 12 y + 12 y^2, phi'''' = 24
    //   omega'' = -2
    #[test]
    fn manufactured_residual() {
        let op = op(64);
        let p = MicropolarParams::new(0.7, 3.0, 2.0, 5.0, 1.5).unwrap();
        let flow = BaseFlow::custom(vec![0.2, 1.0, -0.5], vec![0.0, 0.3, 0.4]).unwrap();
        let alpha = 1.3;
        let c = c64::new(0.4, -0.2);
        let prob = assemble(alpha, &p, &flow, op.clone()).unwrap();

        let phi = |y: f64| y * y * (1.0 - y) * (1.0 - y);
        let phi2 = |y: f64| 2.0 - 12.0 * y + 12.0 * y * y;
        let phi4 = |_: f64| 24.0;
        let om = |y: f64| y * (1.0 - y);
        let om2 = |_: f64| -2.0;
        let a2 = alpha * alpha;
        let ia = c64::new(0.0, alpha);
        let l2phi = |y: f64| phi2(y) - a2 * phi(y);
        let l2sqphi = |y: f64| phi4(y) - 2.0 * a2 * phi2(y) + a2 * a2 * phi(y);
        let l2om = |y: f64| om2(y) - a2 * om(y);

        // residual of i a [(U - C) L2 phi - U'' phi] - nu L2^2 phi - (R0/Rk) L2 omega
        let res_phi = |y: f64| {
            ia * ((flow.u(y) - c) * l2phi(y) - flow.d2u(y) * phi(y))
                - p.viscous() * l2sqphi(y)
                - p.vorticity_coupling() * l2om(y)
        };
        // residual of i a [(U - C) omega - W' phi] - [(1/Rg) L2 - 2 R0/Rnu] omega + (1/Rnu) L2 phi
        let res_om = |y: f64| {
            ia * ((flow.u(y) - c) * om(y) - flow.dw(y) * phi(y))
                - (p.rotation_diffusion() * l2om(y) - p.rotation_damping() * om(y))
                + p.rotation_coupling() * l2phi(y)
        };

        let m = op.len();
        // 1 - y_j is exactly the mirrored node, which keeps the samples
        // accurate to full relative precision near y = 1
        let ys = op.nodes();
        let n = op.order();
        let sample = |f: &dyn Fn(f64, f64) -> f64| -> Vec<c64> {
            (0..=n).map(|j| c64::new(f(ys[j], ys[n - j]), 0.0)).collect()
        };
        let mut x = sample(&|y, z| y * y * z * z);
        x.extend(sample(&|y, z| y * z));
        let ax = matvec(&prob.a_matrix, &x);
        let bx = matvec(&prob.b_matrix, &x);
        let y = op.nodes();
        let mut worst: f64 = 0.0;
        for r in prob.interior_rows() {
            let got = ax[r] - c * bx[r];
            let want = if r < m { res_phi(y[r]) } else { res_om(y[r - m]) };
            // 1e-8 plus the forward rounding bound of the row product, which
            // dominates next to the walls where d4 entries are ~1e14
            let floor: f64 = (0..x.len())
                .map(|j| (prob.a_matrix[(r, j)] - c * prob.b_matrix[(r, j)]).norm() * x[j].norm())
                .sum::<f64>()
                * 64.0
                * f64::EPSILON;
            let e = (got - want).norm();
            assert!(e <= 1e-8 + floor, "row {r}: mismatch {e:e}, rounding floor {floor:e}");
            if e > floor {
                worst = worst.max(e);
            }
        }
        assert!(worst <= 1e-8, "worst nodal mismatch {worst:e}");
        // boundary rows vanish for functions meeting the conditions
        for &r in &prob.bc_rows {
            let scale: f64 = (0..x.len()).map(|j| prob.a_matrix[(r, j)].norm()).fold(0.0, f64::max);
            assert!(ax[r].norm() < 1e-10 * scale);
        }
    }

    #[test]
    fn classical_pencil_is_decoupled() {
        let op = op(40);
        let prob = classical_pencil(1.0, 1e4, &BaseFlow::poiseuille(), op.clone()).unwrap();
        assert_eq!(prob.dim(), 2 * op.len());
        let m = op.len();
        let mut coupling: f64 = 0.0;
        let mut viscous: f64 = 0.0;
        for i in prob.interior_rows() {
            for j in 0..m {
                if i < m {
                    coupling = coupling.max(prob.a_matrix[(i, m + j)].norm());
                    viscous = viscous.max(prob.a_matrix[(i, j)].re.abs());
                } else {
                    coupling = coupling.max(prob.a_matrix[(i, j)].norm());
                }
            }
        }
        assert!(coupling / viscous <= 1e-14, "{}", coupling / viscous);
    }

    #[test]
    fn dump_layout() {
        let p = MicropolarParams::new(0.8, 10.0, 1.0, 15.0, 1.0).unwrap();
        let prob = assemble(1.0, &p, &BaseFlow::couette(), op(16)).unwrap();
        let mut buf = Vec::new();
        prob.dump_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2 * (34 + 1));
        assert_eq!(lines[0], "# A 34x34");
        assert_eq!(lines[1].split(',').count(), 68);
    }
}
