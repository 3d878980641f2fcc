//! Dense QZ solve of the pencil, spurious-mode filtering and mode extraction.

use std::cmp::Ordering;
use std::sync::Arc;

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::ComputeEigenvectors;
use faer::linalg::gevd;
use faer::diag::Diag;
use faer::{c64, Mat, Par};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pencil::{assemble, EigenProblem};
use crate::spectral::{GridFunction, SpectralOperator};

/// Tolerance on boundary-condition rows of a finite eigenvector.
pub const BC_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct Mode {
    /// Wave speed `C = C_r + i C_i`.
    pub c: c64,
    pub phi: GridFunction,
    pub omega: GridFunction,
    /// `|A x - C B x| / (|A|_F |x|)` over interior rows.
    pub residual: f64,
    /// Largest relative violation of a boundary-condition row.
    pub bc_error: f64,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct EigenSolution {
    pub modes: Vec<Mode>,
    pub problem: Arc<EigenProblem>,
}

impl EigenSolution {
    pub fn leading(&self) -> Option<&Mode> {
        self.modes.first()
    }

    pub fn max_ci(&self) -> Option<f64> {
        self.modes.first().map(|m| m.c.im)
    }

    pub fn eigenvalues(&self) -> Vec<c64> {
        self.modes.iter().map(|m| m.c).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Cutoffs {
    pub modulus_cutoff: f64,
    pub residual_cutoff: f64,
    /// Relative eigenvalue movement under refinement that still counts as converged.
    pub refine_delta: f64,
    /// Grid order of the companion solve; `None` skips the convergence flag.
    pub refine_order: Option<usize>,
}

impl Default for Cutoffs {
    fn default() -> Self {
        Self {
            modulus_cutoff: 1e4,
            residual_cutoff: 1e-6,
            refine_delta: 1e-8,
            refine_order: None,
        }
    }
}

/// Descending `C_i`, then ascending `C_r`.
pub fn mode_order(a: &c64, b: &c64) -> Ordering {
    b.im.total_cmp(&a.im).then(a.re.total_cmp(&b.re))
}

/// One generalized eigenpair as returned by QZ, `C = alpha / beta`.
#[derive(Clone, Debug)]
pub struct RawEigenpair {
    pub alpha: c64,
    pub beta: c64,
    pub vector: Option<Vec<c64>>,
}

impl RawEigenpair {
    /// `None` for infinite or undefined eigenvalues.
    pub fn value(&self, b_scale: f64) -> Option<c64> {
        let tiny = f64::EPSILON * b_scale.max(f64::MIN_POSITIVE);
        if !(self.alpha.re.is_finite() && self.alpha.im.is_finite()) || self.beta.norm() <= tiny {
            return None;
        }
        let c = self.alpha / self.beta;
        (c.re.is_finite() && c.im.is_finite()).then_some(c)
    }
}

pub fn frobenius(m: &Mat<c64>) -> f64 {
    let mut s = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            s += m[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

/// Generalized eigendecomposition of `(A, B)` with right eigenvectors optional.
///
/// The eigenvectors are always computed: faer's eigenvalue-only QZ path
/// returns wrong eigenvalues for pencils beyond a few dozen rows. The blocked
/// multishift sweep is disabled for the same reason; on some pencils it
/// stalls for a minute and returns NaN pairs.
///
/// Rows are equilibrated first. Fourth-derivative rows are ~1e10 larger than
/// the rest, and without scaling QZ loses five or six digits on the
/// least-damped modes. Row scaling leaves eigenpairs unchanged.
pub fn solve_pencil(a: &Mat<c64>, b: &Mat<c64>, vectors: bool) -> Result<Vec<RawEigenpair>> {
    let n = a.nrows();
    assert_eq!((a.ncols(), b.nrows(), b.ncols()), (n, n, n), "pencil must be square");
    let mut aw = a.clone();
    let mut bw = b.clone();
    for i in 0..n {
        let big = (0..n).map(|j| a[(i, j)].norm().max(b[(i, j)].norm())).fold(0.0, f64::max);
        if big > 0.0 && big.is_finite() {
            let f = c64::new(1.0 / big, 0.0);
            for j in 0..n {
                aw[(i, j)] *= f;
                bw[(i, j)] *= f;
            }
        }
    }
    // report beta on the scale of the caller's B so `value` thresholds hold
    let rescale = match frobenius(&bw) {
        x if x > 0.0 => frobenius(b) / x,
        _ => 1.0,
    };
    let mut s = Diag::<c64>::zeros(n);
    let mut beta = Diag::<c64>::zeros(n);
    let mut u = Some(Mat::<c64>::zeros(n, n));
    let right = ComputeEigenvectors::Yes;
    let par = Par::Seq;
    let mut params = <gevd::GevdParams as faer::Auto<c64>>::auto();
    params.schur.blocking_threshold = usize::MAX;
    let mut mem = MemBuffer::new(gevd::gevd_scratch::<c64>(
        n,
        ComputeEigenvectors::No,
        right,
        par,
        params.into(),
    ));
    gevd::gevd_cplx(
        aw.as_mut(),
        bw.as_mut(),
        s.as_mut(),
        beta.as_mut(),
        None,
        u.as_mut().map(|u| u.as_mut()),
        par,
        MemStack::new(&mut mem),
        params.into(),
    )
    .map_err(|_| Error::Decomposition { dim: n, a_norm: frobenius(a), b_norm: frobenius(b) })?;
    Ok((0..n)
        .map(|k| RawEigenpair {
            alpha: s[k] * rescale,
            beta: beta[k] * rescale,
            vector: u.as_ref().filter(|_| vectors).map(|u| (0..n).map(|i| u[(i, k)]).collect()),
        })
        .collect())
}

/// Finite eigenvalues only, sorted by [`mode_order`]. No residual or
/// boundary filtering, so spurious values can appear.
pub fn eigenvalues(problem: &EigenProblem) -> Result<Vec<c64>> {
    let b_scale = frobenius(&problem.b_matrix);
    let mut out: Vec<c64> = solve_pencil(&problem.a_matrix, &problem.b_matrix, false)?
        .iter()
        .filter_map(|p| p.value(b_scale))
        .collect();
    out.sort_by(mode_order);
    Ok(out)
}

/// Full spectrum with normalised eigenfunctions; infinite eigenvalues dropped.
pub fn solve(problem: &EigenProblem) -> Result<EigenSolution> {
    let raw = solve_pencil(&problem.a_matrix, &problem.b_matrix, true)?;
    let a_norm = frobenius(&problem.a_matrix);
    let b_scale = frobenius(&problem.b_matrix);
    let interior = problem.interior_rows();
    let op = &problem.op;
    let m = problem.block();
    let row_norms: Vec<f64> = problem
        .bc_rows
        .iter()
        .map(|&r| (0..problem.dim()).map(|j| problem.a_matrix[(r, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();

    let mut modes = Vec::new();
    for pair in &raw {
        let Some(c) = pair.value(b_scale) else { continue };
        let x = pair.vector.as_ref().expect("vectors requested");
        let x_norm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if x_norm == 0.0 {
            continue;
        }
        let ax = matvec_rows(&problem.a_matrix, x, &interior);
        let bx = matvec_rows(&problem.b_matrix, x, &interior);
        let res = ax.iter().zip(&bx).map(|(p, q)| (p - c * q).norm_sqr()).sum::<f64>().sqrt();
        let residual = res / (a_norm * x_norm);
        let bc_vals = matvec_rows(&problem.a_matrix, x, &problem.bc_rows);
        let bc_error = bc_vals
            .iter()
            .zip(&row_norms)
            .map(|(v, rn)| v.norm() / (rn * x_norm))
            .fold(0.0, f64::max);

        let (phi, omega) = normalise(op, problem.alpha, &x[..m], &x[m..])?;
        modes.push(Mode { c, phi, omega, residual, bc_error, converged: false });
    }
    if modes.is_empty() {
        return Err(Error::AllSpurious);
    }
    modes.sort_by(|a, b| mode_order(&a.c, &b.c));
    Ok(EigenSolution { modes, problem: Arc::new(problem.clone()) })
}

fn matvec_rows(m: &Mat<c64>, x: &[c64], rows: &[usize]) -> Vec<c64> {
    rows.iter()
        .map(|&i| x.iter().enumerate().map(|(j, v)| m[(i, j)] * v).sum())
        .collect()
}

/// Scale so `||phi'||^2 + a^2 ||phi||^2 + ||omega||^2 = 1` and the largest
/// entry is real and positive.
fn normalise(
    op: &SpectralOperator,
    alpha: f64,
    phi: &[c64],
    omega: &[c64],
) -> Result<(GridFunction, GridFunction)> {
    let phi = GridFunction::new(phi.to_vec());
    let omega = GridFunction::new(omega.to_vec());
    let den = energy_denominator(op, alpha, &phi, &omega)?;
    if den.is_nan() || den <= 0.0 {
        return Err(Error::DegenerateDenominator(den));
    }
    let pivot = phi
        .values
        .iter()
        .chain(&omega.values)
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(c64::new(1.0, 0.0));
    let phase = pivot.conj() / pivot.norm();
    let s = phase / den.sqrt();
    Ok((phi.scale(s), omega.scale(s)))
}

/// `||phi'||^2 + a^2 ||phi||^2 + ||omega||^2`.
pub fn energy_denominator(
    op: &SpectralOperator,
    alpha: f64,
    phi: &GridFunction,
    omega: &GridFunction,
) -> Result<f64> {
    let dphi = op.diff(phi)?;
    Ok(op.norm_sq(&dphi)? + alpha * alpha * op.norm_sq(phi)? + op.norm_sq(omega)?)
}

/// Drop infinite, oversized or poorly resolved modes; optionally flag
/// convergence against a companion solve at `cutoffs.refine_order`.
pub fn filter(solution: &EigenSolution, cutoffs: &Cutoffs) -> Result<EigenSolution> {
    let mut modes: Vec<Mode> = solution
        .modes
        .iter()
        .filter(|m| {
            m.c.re.is_finite()
                && m.c.im.is_finite()
                && m.c.norm() <= cutoffs.modulus_cutoff
                && m.residual <= cutoffs.residual_cutoff
                && m.bc_error <= BC_TOL
        })
        .cloned()
        .collect();
    if let Some(n_hi) = cutoffs.refine_order {
        let refined = eigenvalues(&reassemble(&solution.problem, n_hi)?)?;
        for m in &mut modes {
            m.converged = nearest_distance(&refined, m.c)
                .is_some_and(|d| d < cutoffs.refine_delta * (1.0 + m.c.norm()));
        }
    }
    Ok(EigenSolution { modes, problem: solution.problem.clone() })
}

pub fn solve_filtered(problem: &EigenProblem, cutoffs: &Cutoffs) -> Result<EigenSolution> {
    filter(&solve(problem)?, cutoffs)
}

fn reassemble(problem: &EigenProblem, n: usize) -> Result<EigenProblem> {
    let op = Arc::new(SpectralOperator::build(n)?);
    assemble(problem.alpha, &problem.params, &problem.flow, op)
}

pub fn nearest_distance(values: &[c64], c: c64) -> Option<f64> {
    values.iter().map(|v| (v - c).norm()).min_by(f64::total_cmp)
}

/// Does `mode` persist when the same problem is rebuilt at grid order `n_hi`?
pub fn refine_check(problem: &EigenProblem, mode: &Mode, n_hi: usize) -> Result<bool> {
    if n_hi <= problem.op.order() {
        return Err(Error::InvalidRange(format!(
            "refinement order {n_hi} must exceed {}",
            problem.op.order()
        )));
    }
    let refined = eigenvalues(&reassemble(problem, n_hi)?)?;
    Ok(nearest_distance(&refined, mode.c).is_some_and(|d| d < 1e-8 * (1.0 + mode.c.norm())))
}
