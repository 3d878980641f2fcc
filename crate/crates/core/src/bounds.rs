//! Energy identities, growth bounds, stability thresholds and wave-speed
//! intervals, evaluated on computed eigenpairs.
//!
//! All inner products use the Clenshaw-Curtis weights of the operator the
//! eigenfunctions were sampled on.

use std::f64::consts::PI;

use faer::c64;
use serde::{Deserialize, Serialize};

use crate::baseflow::{extrema, BaseFlow, FlowExtrema};
use crate::eigensolve::{EigenSolution, Mode};
use crate::error::{Error, Result};
use crate::params::{derive, DerivedParams, MicropolarParams};
use crate::spectral::{GridFunction, SpectralOperator};

/// Clamped-beam constant as used in the stability thresholds.
pub const BEAM_CONSTANT: f64 = 4.73;
/// Smallest positive root of `cosh(x) cos(x) = 1`.
pub const BEAM_CONSTANT_PRECISE: f64 = 4.730_040_744_862_704;

/// Relative tolerance for the identity checks, `|direct - identity| <= tol (1 + |C|)`.
pub const IDENTITY_TOL: f64 = 1e-6;
/// Absolute slack allowed on eigenvalue-versus-bound comparisons.
pub const BOUND_SLACK: f64 = 1e-8;
/// Relative slack for the functional inequalities and the Gamma chains.
pub const INEQUALITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    /// `a R q1 < f(a)` and `a R q2 < g(a)`.
    AsStated,
    /// `a R q1 <= f(a)/2` and `a R q2 <= g(a)/2`, the form the proof establishes.
    #[default]
    Conservative,
}

impl std::str::FromStr for Policy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "as-stated" => Ok(Policy::AsStated),
            "conservative" => Ok(Policy::Conservative),
            other => Err(Error::Config(format!("unknown policy `{other}`"))),
        }
    }
}

/// Integrals of one eigenpair that every identity and inequality needs.
#[derive(Clone, Debug)]
pub struct ModeNorms {
    pub phi: f64,
    pub dphi: f64,
    pub d2phi: f64,
    pub omega: f64,
    pub domega: f64,
    /// `||phi'||^2 + a^2 ||phi||^2 + ||omega||^2`
    pub denominator: f64,
}

pub fn mode_norms(
    phi: &GridFunction,
    omega: &GridFunction,
    alpha: f64,
    op: &SpectralOperator,
) -> Result<ModeNorms> {
    let dphi = op.norm_sq(&op.diff(phi)?)?;
    let d2phi = op.norm_sq(&op.diff2(phi)?)?;
    let phin = op.norm_sq(phi)?;
    let om = op.norm_sq(omega)?;
    let dom = op.norm_sq(&op.diff(omega)?)?;
    Ok(ModeNorms {
        phi: phin,
        dphi,
        d2phi,
        omega: om,
        domega: dom,
        denominator: dphi + alpha * alpha * phin + om,
    })
}

fn checked_denominator(n: &ModeNorms) -> Result<f64> {
    if n.denominator.is_nan() || n.denominator < 1e-12 {
        return Err(Error::DegenerateDenominator(n.denominator));
    }
    Ok(n.denominator)
}

fn samples(op: &SpectralOperator, f: impl Fn(f64) -> f64) -> Vec<f64> {
    op.nodes().iter().map(|&y| f(y)).collect()
}

/// `Q = (i/2) int (U' phi conj(phi') - W' phi conj(omega)) dy`.
pub fn q_functional(
    phi: &GridFunction,
    omega: &GridFunction,
    flow: &BaseFlow,
    op: &SpectralOperator,
) -> Result<c64> {
    let dphi = op.diff(phi)?;
    let up = samples(op, |y| flow.du(y));
    let wp = samples(op, |y| flow.dw(y));
    let inner = op.weighted_inner(&up, phi, &dphi)? - op.weighted_inner(&wp, phi, omega)?;
    Ok(c64::new(0.0, 0.5) * inner)
}

/// Sign carried by the `W' phi conj(omega)` term inside `Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QConvention {
    /// `Q` exactly as defined by [`q_functional`].
    Printed,
    /// `W'` term with the sign obtained by testing the microrotation
    /// equation against `conj(omega)`; differs from `Printed` only when `W' != 0`.
    EnergyConsistent,
}

/// Imaginary-part identity for `C_i` with `Q` as in [`q_functional`].
pub fn identity_ci(
    phi: &GridFunction,
    omega: &GridFunction,
    flow: &BaseFlow,
    params: &MicropolarParams,
    alpha: f64,
    op: &SpectralOperator,
) -> Result<f64> {
    identity_ci_with(phi, omega, flow, params, alpha, op, QConvention::Printed)
}

pub fn identity_ci_with(
    phi: &GridFunction,
    omega: &GridFunction,
    flow: &BaseFlow,
    params: &MicropolarParams,
    alpha: f64,
    op: &SpectralOperator,
    convention: QConvention,
) -> Result<f64> {
    let n = mode_norms(phi, omega, alpha, op)?;
    let den = checked_denominator(&n)?;
    let a2 = alpha * alpha;
    let q = match convention {
        QConvention::Printed => q_functional(phi, omega, flow, op)?,
        QConvention::EnergyConsistent => {
            let dphi = op.diff(phi)?;
            let up = samples(op, |y| flow.du(y));
            let wp = samples(op, |y| flow.dw(y));
            c64::new(0.0, 0.5)
                * (op.weighted_inner(&up, phi, &dphi)? + op.weighted_inner(&wp, phi, omega)?)
        }
    };
    let q_sum = 2.0 * q.re;

    let viscous = params.viscous() / alpha * (n.d2phi + 2.0 * a2 * n.dphi + a2 * a2 * n.phi);
    let rotation = params.rotation_diffusion() / alpha * (n.domega + a2 * n.omega)
        + params.rotation_damping() / alpha * n.omega;

    let d2phi = op.diff2(phi)?;
    let i = c64::new(0.0, 1.0);
    let bracket_k = op.inner_product(omega, &d2phi)? - a2 * op.inner_product(omega, phi)?;
    let bracket_nu = op.inner_product(&d2phi, omega)? - a2 * op.inner_product(phi, omega)?;
    let coupling = (i * (params.vorticity_coupling() / alpha) * bracket_k
        + i * (params.rotation_coupling() / alpha) * bracket_nu)
        .im;

    Ok((q_sum - viscous - rotation - coupling) / den)
}

/// Real-part identity for `C_r`.
pub fn identity_cr(
    phi: &GridFunction,
    omega: &GridFunction,
    flow: &BaseFlow,
    alpha: f64,
    op: &SpectralOperator,
) -> Result<f64> {
    let n = mode_norms(phi, omega, alpha, op)?;
    let den = checked_denominator(&n)?;
    let dphi = op.diff(phi)?;
    let u = samples(op, |y| flow.u(y));
    let phi_weight = samples(op, |y| alpha * alpha * flow.u(y) + 0.5 * flow.d2u(y));
    let wp = samples(op, |y| flow.dw(y));
    let num = op.weighted_inner(&u, &dphi, &dphi)?.re
        + op.weighted_inner(&phi_weight, phi, phi)?.re
        + op.weighted_inner(&u, omega, omega)?.re
        - op.weighted_inner(&wp, phi, omega)?.re;
    Ok(num / den)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub ci_direct: f64,
    pub ci_identity: f64,
    /// Same identity with the energy-consistent sign of the `W'` term in `Q`.
    pub ci_identity_consistent: f64,
    pub cr_direct: f64,
    pub cr_identity: f64,
    #[serde(with = "crate::serde_c64")]
    pub q_value: c64,
    pub rel_err_ci: f64,
    pub rel_err_cr: f64,
}

pub fn identity_report(
    mode: &Mode,
    flow: &BaseFlow,
    params: &MicropolarParams,
    alpha: f64,
    op: &SpectralOperator,
) -> Result<IdentityReport> {
    let ci = identity_ci(&mode.phi, &mode.omega, flow, params, alpha, op)?;
    let ci_consistent = identity_ci_with(
        &mode.phi,
        &mode.omega,
        flow,
        params,
        alpha,
        op,
        QConvention::EnergyConsistent,
    )?;
    let cr = identity_cr(&mode.phi, &mode.omega, flow, alpha, op)?;
    let scale = 1.0 + mode.c.norm();
    Ok(IdentityReport {
        ci_direct: mode.c.im,
        ci_identity: ci,
        ci_identity_consistent: ci_consistent,
        cr_direct: mode.c.re,
        cr_identity: cr,
        q_value: q_functional(&mode.phi, &mode.omega, flow, op)?,
        rel_err_ci: (mode.c.im - ci).abs() / scale,
        rel_err_cr: (mode.c.re - cr).abs() / scale,
    })
}

/// `(q1 + q2)/(2a) - (pi^2 + a^2)/(a R)`.
pub fn theorem1_bound(alpha: f64, derived: &DerivedParams, ext: &FlowExtrema) -> Result<f64> {
    let inv_r = match (derived.theorem1_applicable, derived.inv_r) {
        (true, Some(x)) => x,
        _ => return Err(Error::NotApplicable { r1: derived.r1, r2: derived.r2 }),
    };
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidWaveNumber(alpha));
    }
    Ok((ext.q1 + ext.q2) / (2.0 * alpha) - (PI * PI + alpha * alpha) * inv_r / alpha)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityThresholds {
    pub m1: f64,
    pub m2: f64,
    pub n1: f64,
    pub n2: f64,
    pub f_alpha: f64,
    pub g_alpha: f64,
}

pub fn thresholds(alpha: f64) -> StabilityThresholds {
    thresholds_with(alpha, BEAM_CONSTANT)
}

pub fn thresholds_with(alpha: f64, beam: f64) -> StabilityThresholds {
    let base = beam * beam * PI;
    let m1 = base + 2.0 * alpha * alpha * PI;
    let m2 = base + 2f64.powf(1.5) * alpha.powi(3);
    let n1 = 2.0 * base + 2.0 * alpha.powi(3);
    let n2 = 2.0 * base + 2f64.powf(1.5) * alpha * PI;
    StabilityThresholds { m1, m2, n1, n2, f_alpha: m1.max(m2), g_alpha: n1.max(n2) }
}

pub fn stability_certificate(
    alpha: f64,
    r_effective: f64,
    q1: f64,
    q2: f64,
    policy: Policy,
) -> Result<bool> {
    stability_certificate_with(alpha, r_effective, q1, q2, policy, BEAM_CONSTANT)
}

pub fn stability_certificate_with(
    alpha: f64,
    r_effective: f64,
    q1: f64,
    q2: f64,
    policy: Policy,
    beam: f64,
) -> Result<bool> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidWaveNumber(alpha));
    }
    if !(r_effective.is_finite() && r_effective > 0.0) {
        return Err(Error::InvalidParameter { name: "r_effective", value: r_effective });
    }
    let t = thresholds_with(alpha, beam);
    let (x1, x2) = (alpha * r_effective * q1, alpha * r_effective * q2);
    Ok(match policy {
        Policy::AsStated => x1 < t.f_alpha && x2 < t.g_alpha,
        Policy::Conservative => x1 <= 0.5 * t.f_alpha && x2 <= 0.5 * t.g_alpha,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveSpeedCase {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
}

impl WaveSpeedCase {
    pub const ALL: [WaveSpeedCase; 9] = [
        WaveSpeedCase::A,
        WaveSpeedCase::B,
        WaveSpeedCase::C,
        WaveSpeedCase::D,
        WaveSpeedCase::E,
        WaveSpeedCase::F,
        WaveSpeedCase::G,
        WaveSpeedCase::H,
        WaveSpeedCase::I,
    ];

    pub fn label(self) -> char {
        (b'a' + self as u8) as char
    }

    /// Whether the sign hypotheses hold (non-strictly) for these extrema.
    pub fn applies(self, e: &FlowExtrema) -> bool {
        let upp_row = self as usize / 3;
        let wp_col = self as usize % 3;
        let upp_ok = match upp_row {
            0 => e.upp_min >= 0.0,
            1 => e.upp_min <= 0.0 && 0.0 <= e.upp_max,
            _ => e.upp_max <= 0.0,
        };
        let wp_ok = match wp_col {
            0 => e.wp_min >= 0.0,
            1 => e.wp_min <= 0.0 && 0.0 <= e.wp_max,
            _ => e.wp_max <= 0.0,
        };
        upp_ok && wp_ok
    }

    /// The interval printed for this case.
    pub fn interval(self, alpha: f64, e: &FlowExtrema) -> (f64, f64) {
        let a = alpha;
        let a2 = a * a;
        let curv_hi = e.upp_max / (2.0 * (PI * PI + a2));
        let curv_lo = e.upp_min / (2.0 * a2);
        let (wmin, wmax) = (e.wp_min, e.wp_max);
        let (lo, hi) = match self {
            WaveSpeedCase::A => (-wmax / (2.0 * a), curv_hi + wmax / (2.0 * a)),
            WaveSpeedCase::B => (
                -wmax / a + wmin / (2.0 * a),
                curv_hi - wmin / a + wmax / (2.0 * a),
            ),
            WaveSpeedCase::C => (wmin / (2.0 * a), curv_hi - wmin / (2.0 * a)),
            WaveSpeedCase::D => (curv_lo - wmax / (2.0 * a), curv_hi + wmax / (2.0 * a)),
            WaveSpeedCase::E => (
                curv_lo - wmax / a + wmin / (2.0 * a),
                curv_hi - wmin / a + wmax / (2.0 * a),
            ),
            WaveSpeedCase::F => (curv_lo + wmin / (2.0 * a), e.upp_max / (2.0 * a2) - wmin / (2.0 * a)),
            WaveSpeedCase::G => (curv_lo - wmax / (2.0 * a), wmax / (2.0 * a)),
            WaveSpeedCase::H => (curv_lo - wmax / a + wmin / (2.0 * a), -wmin / a + wmax / (2.0 * a)),
            WaveSpeedCase::I => (curv_lo + wmin / (2.0 * a), -wmin / (2.0 * a)),
        };
        (e.u_min + lo, e.u_max + hi)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveSpeedInterval {
    pub lower: f64,
    pub upper: f64,
    /// First applicable case in `a..i` order.
    pub case_label: char,
    /// Every case whose hypotheses hold; the interval is their intersection.
    pub cases: Vec<WaveSpeedCase>,
}

impl WaveSpeedInterval {
    pub fn contains(&self, cr: f64, slack: f64) -> bool {
        cr >= self.lower - slack && cr <= self.upper + slack
    }
}

pub fn wave_speed_interval(alpha: f64, ext: &FlowExtrema) -> Result<WaveSpeedInterval> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidWaveNumber(alpha));
    }
    let cases: Vec<WaveSpeedCase> =
        WaveSpeedCase::ALL.iter().copied().filter(|c| c.applies(ext)).collect();
    // the sign patterns cover every extrema configuration
    debug_assert!(!cases.is_empty());
    let (lower, upper) = cases
        .iter()
        .map(|c| c.interval(alpha, ext))
        .fold((f64::NEG_INFINITY, f64::INFINITY), |(l, u), (a, b)| (l.max(a), u.min(b)));
    Ok(WaveSpeedInterval { lower, upper, case_label: cases[0].label(), cases })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

fn inequality(name: &str, lhs: f64, rhs: f64) -> InequalityCheck {
    let slack = lhs - rhs;
    let scale = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
    InequalityCheck {
        name: name.to_string(),
        lhs,
        rhs,
        slack,
        pass: slack >= -INEQUALITY_TOL * scale,
    }
}

/// Reject inputs that miss the clamped (phi) or Dirichlet (omega) conditions by more than `1e-8`.
pub fn check_boundary_conditions(
    phi: &GridFunction,
    omega: &GridFunction,
    op: &SpectralOperator,
) -> Result<()> {
    let n = op.order();
    let dphi = op.diff(phi)?;
    if omega.len() != op.len() {
        return Err(Error::LengthMismatch { expected: op.len(), got: omega.len() });
    }
    let phi_scale = phi.max_abs().max(1.0);
    let dphi_scale = dphi.max_abs().max(1.0);
    let om_scale = omega.max_abs().max(1.0);
    let checks = [
        ("phi(0)", phi.values[0].norm() / phi_scale),
        ("phi(1)", phi.values[n].norm() / phi_scale),
        ("phi'(0)", dphi.values[0].norm() / dphi_scale),
        ("phi'(1)", dphi.values[n].norm() / dphi_scale),
        ("omega(0)", omega.values[0].norm() / om_scale),
        ("omega(1)", omega.values[n].norm() / om_scale),
    ];
    for (name, v) in checks {
        if v > 1e-8 {
            return Err(Error::BoundaryViolation(format!("{name} = {v:e}")));
        }
    }
    Ok(())
}

/// Poincare-type inequalities on `phi`, `omega` and the two Cauchy-Young
/// bounds on the energy denominator. Returns one check per inequality.
pub fn functional_inequalities(
    phi: &GridFunction,
    omega: &GridFunction,
    alpha: f64,
    op: &SpectralOperator,
) -> Result<Vec<InequalityCheck>> {
    functional_inequalities_with(phi, omega, alpha, op, BEAM_CONSTANT)
}

pub fn functional_inequalities_with(
    phi: &GridFunction,
    omega: &GridFunction,
    alpha: f64,
    op: &SpectralOperator,
    beam: f64,
) -> Result<Vec<InequalityCheck>> {
    check_boundary_conditions(phi, omega, op)?;
    let n = mode_norms(phi, omega, alpha, op)?;
    let pi2 = PI * PI;
    let a2 = alpha * alpha;
    let (p, dp, d2p) = (n.phi.sqrt(), n.dphi.sqrt(), n.omega.sqrt());
    let dissipation = n.d2phi + 2.0 * a2 * n.dphi + a2 * a2 * n.phi + n.domega + (a2 + 1.0) * n.omega;
    Ok(vec![
        inequality("poincare_phi", n.dphi, pi2 * n.phi),
        inequality("poincare_dphi", n.d2phi, pi2 * n.dphi),
        inequality("clamped_beam", n.d2phi, beam.powi(4) * n.phi),
        inequality("young_phi_dphi", n.denominator, 2.0 * alpha * dp * p),
        inequality("young_phi_omega", n.denominator, 2.0 * alpha * p * d2p),
        inequality("dissipation", dissipation, (pi2 + a2) * n.denominator),
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaQuotients {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma1_pass: bool,
    pub gamma2_pass: bool,
}

/// The two quotients bounding the shear terms, with the threshold chains
/// `gamma1 >= f(a)` and `gamma2 >= g(a)` checked at relative tolerance `1e-9`.
pub fn gamma_thresholds(
    phi: &GridFunction,
    omega: &GridFunction,
    alpha: f64,
    op: &SpectralOperator,
) -> Result<GammaQuotients> {
    let n = mode_norms(phi, omega, alpha, op)?;
    let a2 = alpha * alpha;
    let num = n.d2phi + 2.0 * a2 * n.dphi + a2 * a2 * n.phi + n.domega + (a2 + 1.0) * n.omega;
    let den1 = n.phi.sqrt() * n.dphi.sqrt();
    let den2 = n.phi.sqrt() * n.omega.sqrt();
    if den1.is_nan() || den1 <= 0.0 {
        return Err(Error::ZeroDenominator("gamma1 (||phi|| ||phi'||)"));
    }
    if den2.is_nan() || den2 <= 0.0 {
        return Err(Error::ZeroDenominator("gamma2 (||phi|| ||omega||)"));
    }
    let (g1, g2) = (num / den1, num / den2);
    let t = thresholds(alpha);
    Ok(GammaQuotients {
        gamma1: g1,
        gamma2: g2,
        gamma1_pass: g1 >= t.f_alpha * (1.0 - INEQUALITY_TOL),
        gamma2_pass: g2 >= t.g_alpha * (1.0 - INEQUALITY_TOL),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub mode_index: Option<usize>,
    pub check: String,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub alpha: f64,
    pub identities: Vec<IdentityReport>,
    pub derived: DerivedParams,
    pub extrema: FlowExtrema,
    pub max_ci: Option<f64>,
    /// `None` when `R1 <= R2` and the bound is skipped.
    pub theorem1_bound: Option<f64>,
    /// Certificate under the configured policy.
    pub stability_certified: bool,
    pub certified_as_stated: Option<bool>,
    pub certified_conservative: Option<bool>,
    pub interval: WaveSpeedInterval,
    pub violations: Vec<Finding>,
}

impl BoundsReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvaluateOptions {
    pub policy: Policy,
    pub beam: f64,
    pub identity_tol: f64,
    pub bound_slack: f64,
}

impl Default for EvaluateOptions {
    fn default() -> Self {
        Self {
            policy: Policy::Conservative,
            beam: BEAM_CONSTANT,
            identity_tol: IDENTITY_TOL,
            bound_slack: BOUND_SLACK,
        }
    }
}

/// Run every check against a filtered solution.
pub fn evaluate_all(
    solution: &EigenSolution,
    flow: &BaseFlow,
    params: &MicropolarParams,
    op: &SpectralOperator,
    opts: &EvaluateOptions,
) -> Result<BoundsReport> {
    let alpha = solution.problem.alpha;
    let derived = derive(params)?;
    let ext = extrema(flow);
    let mut violations = Vec::new();

    // products of two degree-n interpolants are integrated exactly on the 2n grid
    let fine = SpectralOperator::build(2 * op.order())?;
    let mut identities = Vec::with_capacity(solution.modes.len());
    for (k, mode) in solution.modes.iter().enumerate() {
        let upsampled = Mode {
            phi: op.resample(&mode.phi, &fine)?,
            omega: op.resample(&mode.omega, &fine)?,
            ..mode.clone()
        };
        let rep = identity_report(&upsampled, flow, params, alpha, &fine)?;
        let tol = opts.identity_tol;
        if rep.rel_err_ci > tol {
            violations.push(Finding { mode_index: Some(k), check: "identity_ci".into(), slack: tol - rep.rel_err_ci });
        }
        if rep.rel_err_cr > tol {
            violations.push(Finding { mode_index: Some(k), check: "identity_cr".into(), slack: tol - rep.rel_err_cr });
        }
        identities.push(rep);
    }

    let max_ci = solution.modes.iter().map(|m| m.c.im).max_by(f64::total_cmp);
    let theorem1 = if derived.theorem1_applicable {
        Some(theorem1_bound(alpha, &derived, &ext)?)
    } else {
        None
    };
    if let (Some(bound), Some(_)) = (theorem1, max_ci) {
        for (k, m) in solution.modes.iter().enumerate() {
            let slack = bound + opts.bound_slack - m.c.im;
            if slack < 0.0 {
                violations.push(Finding { mode_index: Some(k), check: "theorem1_bound".into(), slack });
            }
        }
    }

    let mut certified = [None, None];
    if let Some(r) = derived.r_effective() {
        for (slot, policy) in [Policy::AsStated, Policy::Conservative].into_iter().enumerate() {
            let ok = stability_certificate_with(alpha, r, ext.q1, ext.q2, policy, opts.beam)?;
            certified[slot] = Some(ok);
            if let (true, Some(ci)) = (ok, max_ci) {
                if ci > opts.bound_slack {
                    let name = match policy {
                        Policy::AsStated => "certificate_as_stated",
                        Policy::Conservative => "certificate_conservative",
                    };
                    violations.push(Finding { mode_index: Some(0), check: name.into(), slack: opts.bound_slack - ci });
                }
            }
        }
    }
    let stability_certified = match opts.policy {
        Policy::AsStated => certified[0],
        Policy::Conservative => certified[1],
    }
    .unwrap_or(false);

    let interval = wave_speed_interval(alpha, &ext)?;
    for (k, m) in solution.modes.iter().enumerate() {
        if !interval.contains(m.c.re, opts.bound_slack) {
            let slack = (m.c.re - interval.lower).min(interval.upper - m.c.re) + opts.bound_slack;
            violations.push(Finding { mode_index: Some(k), check: "wave_speed_interval".into(), slack });
        }
    }

    Ok(BoundsReport {
        alpha,
        identities,
        derived,
        extrema: ext,
        max_ci,
        theorem1_bound: theorem1,
        stability_certified,
        certified_as_stated: certified[0],
        certified_conservative: certified[1],
        interval,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn threshold_values_at_unit_alpha() {
        let t = thresholds(1.0);
        let base = 4.73f64 * 4.73 * PI;
        assert!(close(t.m1, base + 2.0 * PI, 1e-12));
        assert!(close(t.m1, 76.5698, 1e-4));
        assert!(close(t.m2, 73.1150, 1e-4));
        assert!(close(t.f_alpha, t.m1, 0.0));
        assert!(close(t.n1, 142.5731, 1e-4));
        assert!(close(t.n2, 149.4588, 1e-4));
        assert!(close(t.g_alpha, t.n2, 0.0));
    }

    #[test]
    fn m1_m2_cross_at_pi_over_root2() {
        let a = PI / 2f64.sqrt();
        let t = thresholds(a);
        assert!(close(t.m1, t.m2, 1e-12 * t.m1));
        assert!(thresholds(a - 0.01).m1 > thresholds(a - 0.01).m2);
        assert!(thresholds(a + 0.01).m1 < thresholds(a + 0.01).m2);
    }

    #[test]
    fn theorem1_bound_examples() {
        let derived = DerivedParams { r1: 0.05, r2: 0.04, inv_r: Some(0.01), theorem1_applicable: true };
        let ext = extrema(&BaseFlow::couette());
        let b = theorem1_bound(1.0, &derived, &ext).unwrap();
        assert!(close(b, 0.5 - (PI * PI + 1.0) / 100.0, 1e-15));
        assert!(close(b, 0.39130, 1e-5));
        // large alpha: negative
        assert!(theorem1_bound(500.0, &derived, &ext).unwrap() < 0.0);
        let still = FlowExtrema { q1: 0.0, q2: 0.0, ..ext };
        for a in [1e-3, 0.1, 1.0, 10.0, 1e3] {
            assert!(theorem1_bound(a, &derived, &still).unwrap() < 0.0);
        }
        let not = DerivedParams { r1: 0.5, r2: 0.5, inv_r: None, theorem1_applicable: false };
        assert!(matches!(theorem1_bound(1.0, &not, &ext), Err(Error::NotApplicable { .. })));
    }

    #[test]
    fn certificate_examples() {
        for (a, r) in [(0.1, 1e6), (1.0, 1.0), (7.0, 1e9)] {
            assert!(stability_certificate(a, r, 0.0, 0.0, Policy::Conservative).unwrap());
            assert!(stability_certificate(a, r, 0.0, 0.0, Policy::AsStated).unwrap());
        }
        assert!(!stability_certificate(1.0, 100.0, 1.0, 0.0, Policy::Conservative).unwrap());
        assert!(stability_certificate(1.0, 30.0, 1.0, 0.0, Policy::Conservative).unwrap());
        // between f/2 and f only the as-stated form certifies
        assert!(stability_certificate(1.0, 50.0, 1.0, 0.0, Policy::AsStated).unwrap());
        assert!(!stability_certificate(1.0, 50.0, 1.0, 0.0, Policy::Conservative).unwrap());
        assert!(stability_certificate(1.0, -1.0, 1.0, 0.0, Policy::Conservative).is_err());
    }

    #[test]
    fn wave_speed_examples() {
        let c = wave_speed_interval(1.0, &extrema(&BaseFlow::couette())).unwrap();
        assert_eq!((c.lower, c.upper, c.case_label), (0.0, 1.0, 'a'));
        assert_eq!(c.cases.len(), 9);
        let c2 = wave_speed_interval(2.0, &extrema(&BaseFlow::couette())).unwrap();
        assert_eq!((c2.lower, c2.upper), (0.0, 1.0));

        let p = wave_speed_interval(1.0, &extrema(&BaseFlow::poiseuille())).unwrap();
        assert_eq!(p.case_label, 'g');
        assert!(close(p.lower, -4.0, 1e-15) && close(p.upper, 1.0, 1e-15));

        let f = BaseFlow::custom(vec![0.0, 1.0], vec![0.0, 0.0, 1.0]).unwrap();
        let w = wave_speed_interval(1.0, &extrema(&f)).unwrap();
        assert_eq!(w.case_label, 'a');
        assert_eq!((w.lower, w.upper), (-1.0, 2.0));
    }

    #[test]
    fn every_sign_pattern_has_a_case() {
        let vals = [-2.0, 0.0, 3.0];
        for &a in &vals {
            for &b in &vals {
                for &c in &vals {
                    for &d in &vals {
                        if a > b || c > d {
                            continue;
                        }
                        let e = FlowExtrema {
                            u_min: 0.0,
                            u_max: 1.0,
                            upp_min: a,
                            upp_max: b,
                            wp_min: c,
                            wp_max: d,
                            q1: 1.0,
                            q2: c.abs().max(d.abs()),
                        };
                        let iv = wave_speed_interval(0.7, &e).unwrap();
                        assert!(iv.lower <= iv.upper);
                    }
                }
            }
        }
    }

    fn sin2(op: &SpectralOperator) -> GridFunction {
        GridFunction::from_real_fn(op, |y| (PI * y).sin().powi(2))
    }

    #[test]
    fn clamped_sine_squared_ratio() {
        let op = SpectralOperator::build(64).unwrap();
        let phi = sin2(&op);
        let zero = GridFunction::zeros(&op);
        let n = mode_norms(&phi, &zero, 1.0, &op).unwrap();
        // ||phi||^2 = 3/8 and ||phi''||^2 = 2 pi^4 in closed form
        assert!(close(n.phi, 0.375, 1e-12));
        assert!(close(n.d2phi, 2.0 * PI.powi(4), 1e-8));
        assert!(close(n.d2phi / n.phi, 16.0 * PI.powi(4) / 3.0, 1e-8));
        assert!(close(16.0 * PI.powi(4) / 3.0, 519.515, 1e-3));
        assert!(n.d2phi / n.phi >= 4.73f64.powi(4));
        let checks = functional_inequalities(&phi, &zero, 1.3, &op).unwrap();
        assert_eq!(checks.len(), 6);
        assert!(checks.iter().all(|c| c.pass), "{checks:?}");
    }

    #[test]
    fn omega_only_inequalities() {
        let op = SpectralOperator::build(64).unwrap();
        let om = GridFunction::from_real_fn(&op, |y| (PI * y).sin());
        let zero = GridFunction::zeros(&op);
        let checks = functional_inequalities(&zero, &om, 0.8, &op).unwrap();
        assert!(checks.iter().all(|c| c.pass));
        let young: Vec<_> = checks.iter().filter(|c| c.name.starts_with("young")).collect();
        for c in young {
            assert!(close(c.slack, 0.5, 1e-8));
        }
    }

    #[test]
    fn inequalities_reject_bad_boundaries() {
        let op = SpectralOperator::build(32).unwrap();
        let phi = GridFunction::from_real_fn(&op, |y| y * (1.0 - y));
        let zero = GridFunction::zeros(&op);
        assert!(matches!(
            functional_inequalities(&phi, &zero, 1.0, &op),
            Err(Error::BoundaryViolation(_))
        ));
    }

    #[test]
    fn gamma_quotients() {
        let op = SpectralOperator::build(64).unwrap();
        let phi = sin2(&op);
        let om = GridFunction::from_real_fn(&op, |y| (PI * y).sin());
        let g = gamma_thresholds(&phi, &om, 1.0, &op).unwrap();
        let t = thresholds(1.0);
        assert!(g.gamma1.is_finite() && g.gamma2.is_finite());
        assert!(g.gamma1 >= t.f_alpha && g.gamma2 >= t.g_alpha);
        assert!(g.gamma1_pass && g.gamma2_pass);

        // alpha -> 0: gamma1 tends to (||phi''||^2 + ||omega'||^2 + ||omega||^2)/(||phi|| ||phi'||)
        let n = mode_norms(&phi, &om, 0.0, &op).unwrap();
        let limit = (n.d2phi + n.domega + n.omega) / (n.phi.sqrt() * n.dphi.sqrt());
        let small = gamma_thresholds(&phi, &om, 1e-7, &op).unwrap();
        assert!(close(small.gamma1, limit, 1e-9 * limit));
        assert!(limit >= 4.73f64.powi(2) * PI);

        let zero = GridFunction::zeros(&op);
        assert!(matches!(gamma_thresholds(&zero, &om, 1.0, &op), Err(Error::ZeroDenominator(_))));
    }

    #[test]
    fn damped_rotation_identity() {
        // phi = 0, omega = sin(pi y), U = W = 0
        let op = SpectralOperator::build(64).unwrap();
        let params = MicropolarParams::new(0.3, 2.0, 1.5, 4.0, 0.7).unwrap();
        let flow = BaseFlow::custom(vec![0.0], vec![0.0]).unwrap();
        let om = GridFunction::from_real_fn(&op, |y| (PI * y).sin());
        let zero = GridFunction::zeros(&op);
        let alpha = 1.7;
        let ci = identity_ci(&zero, &om, &flow, &params, alpha, &op).unwrap();
        let want = -((PI * PI + alpha * alpha) / params.rgamma + 2.0 * params.r0 / params.rnu) / alpha;
        assert!(close(ci, want, 1e-8), "{ci} vs {want}");
    }

    #[test]
    fn identities_with_vanishing_coefficients() {
        let op = SpectralOperator::build(48).unwrap();
        let huge = 1e300;
        let params = MicropolarParams::new(1e-300, huge, huge, huge, huge).unwrap();
        let flow = BaseFlow::custom(vec![0.4], vec![0.0]).unwrap();
        let phi = GridFunction::from_real_fn(&op, |y| (y * (1.0 - y)).powi(2));
        let om = GridFunction::from_real_fn(&op, |y| y * (1.0 - y) * (1.0 + y));
        let zero = GridFunction::zeros(&op);
        let ci = identity_ci(&phi, &zero, &flow, &params, 0.9, &op).unwrap();
        assert!(ci.abs() < 1e-15);
        // constant U: C_r identity returns U0 for any pair
        let cr = identity_cr(&phi, &om, &flow, 0.9, &op).unwrap();
        assert!(close(cr, 0.4, 1e-14));
        assert!(matches!(
            identity_cr(&zero, &zero, &flow, 0.9, &op),
            Err(Error::DegenerateDenominator(_))
        ));
    }
}
