//! Parallel base flows `(U(y), 0, 0)` with microrotation `(0, 0, W(y))` on `y in [0, 1]`.
//!
//! Profiles are polynomials so that the extrema consumed by the stability
//! bounds (`q1`, `q2`, the range of `U''` and `W'`) can be computed exactly
//! from critical points instead of by sampling.
//!
//! Whether a given `(U, W)` pair is a steady solution of the micropolar
//! equations is not checked here. Any pair is accepted and steadiness is the
//! caller's responsibility.

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Highest polynomial degree accepted for `U` or `W`.
pub const MAX_DEGREE: usize = 16;

/// Real polynomial stored in ascending-degree order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::new(vec![0.0])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * y + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn scaled(&self, factor: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * factor).collect())
    }

    /// Real roots in `[0, 1]`, from the eigenvalues of the companion matrix.
    ///
    /// Candidates with a small imaginary part are polished by Newton steps on
    /// the real axis; anything landing within `1e-12` of the interval is
    /// clamped into it.
    pub fn real_roots_in_unit_interval(&self) -> Vec<f64> {
        let deg = self.degree();
        if deg == 0 {
            return Vec::new();
        }
        let lead = self.coeffs[deg];
        let roots: Vec<f64> = if deg == 1 {
            vec![-self.coeffs[0] / lead]
        } else {
            let companion = Mat::<f64>::from_fn(deg, deg, |i, j| {
                if i == 0 {
                    -self.coeffs[deg - 1 - j] / lead
                } else if i == j + 1 {
                    1.0
                } else {
                    0.0
                }
            });
            let eigs = match companion.eigenvalues() {
                Ok(e) => e,
                Err(_) => return Vec::new(),
            };
            // multiple roots come back as small complex clusters; keep them as
            // candidates, Newton decides where they land
            eigs.iter()
                .filter(|z| z.im.abs() <= 1e-6 * (1.0 + z.re.abs()))
                .map(|z| z.re)
                .collect()
        };
        let dp = self.derivative();
        let mut out: Vec<f64> = roots
            .into_iter()
            .map(|mut r| {
                for _ in 0..8 {
                    let d = dp.eval(r);
                    if d == 0.0 {
                        break;
                    }
                    let step = self.eval(r) / d;
                    if !step.is_finite() {
                        break;
                    }
                    r -= step;
                    if step.abs() <= 1e-16 * (1.0 + r.abs()) {
                        break;
                    }
                }
                r
            })
            .filter(|r| r.is_finite() && *r >= -1e-12 && *r <= 1.0 + 1e-12)
            .map(|r| r.clamp(0.0, 1.0))
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Exact `(min, max)` over `[0, 1]`: endpoints plus critical points.
    pub fn range_on_unit_interval(&self) -> (f64, f64) {
        let mut lo = self.eval(0.0).min(self.eval(1.0));
        let mut hi = self.eval(0.0).max(self.eval(1.0));
        for y in self.derivative().real_roots_in_unit_interval() {
            let v = self.eval(y);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseFlow {
    pub u: Poly,
    pub w: Poly,
    pub name: Option<String>,
}

/// How a profile is requested: a built-in name or raw coefficient arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProfileSpec {
    Named(String),
    Custom { u: Vec<f64>, w: Vec<f64> },
}

impl BaseFlow {
    pub fn couette() -> Self {
        Self {
            u: Poly::new(vec![0.0, 1.0]),
            w: Poly::zero(),
            name: Some("couette".into()),
        }
    }

    pub fn poiseuille() -> Self {
        Self {
            u: Poly::new(vec![0.0, 4.0, -4.0]),
            w: Poly::zero(),
            name: Some("poiseuille".into()),
        }
    }

    pub fn custom(u_coeffs: Vec<f64>, w_coeffs: Vec<f64>) -> Result<Self> {
        if u_coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteCoefficient("U"));
        }
        if w_coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteCoefficient("W"));
        }
        let u = Poly::new(u_coeffs);
        let w = Poly::new(w_coeffs);
        for p in [&u, &w] {
            if p.degree() > MAX_DEGREE {
                return Err(Error::DegreeTooHigh {
                    degree: p.degree(),
                    cap: MAX_DEGREE,
                });
            }
        }
        Ok(Self { u, w, name: Some("custom".into()) })
    }

    pub fn from_spec(spec: &ProfileSpec) -> Result<Self> {
        make_profile(spec)
    }

    pub fn u(&self, y: f64) -> f64 {
        self.u.eval(y)
    }
    pub fn du(&self, y: f64) -> f64 {
        self.u.derivative().eval(y)
    }
    pub fn d2u(&self, y: f64) -> f64 {
        self.u.derivative().derivative().eval(y)
    }
    pub fn w(&self, y: f64) -> f64 {
        self.w.eval(y)
    }
    pub fn dw(&self, y: f64) -> f64 {
        self.w.derivative().eval(y)
    }

    /// The same flow with `U` multiplied by `factor` (W untouched).
    pub fn with_u_scaled(&self, factor: f64) -> Self {
        Self {
            u: self.u.scaled(factor),
            w: self.w.clone(),
            name: self.name.clone(),
        }
    }
}

pub fn make_profile(spec: &ProfileSpec) -> Result<BaseFlow> {
    match spec {
        ProfileSpec::Named(name) => match name.as_str() {
            "couette" => Ok(BaseFlow::couette()),
            "poiseuille" => Ok(BaseFlow::poiseuille()),
            other => Err(Error::UnknownProfile(other.to_string())),
        },
        ProfileSpec::Custom { u, w } => BaseFlow::custom(u.clone(), w.clone()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowExtrema {
    pub u_min: f64,
    pub u_max: f64,
    pub upp_min: f64,
    pub upp_max: f64,
    pub wp_min: f64,
    pub wp_max: f64,
    /// max |U'| on [0, 1]
    pub q1: f64,
    /// max |W'| on [0, 1]
    pub q2: f64,
}

pub fn extrema(flow: &BaseFlow) -> FlowExtrema {
    let (u_min, u_max) = flow.u.range_on_unit_interval();
    let up = flow.u.derivative();
    let (up_min, up_max) = up.range_on_unit_interval();
    let (upp_min, upp_max) = up.derivative().range_on_unit_interval();
    let (wp_min, wp_max) = flow.w.derivative().range_on_unit_interval();
    FlowExtrema {
        u_min,
        u_max,
        upp_min,
        upp_max,
        wp_min,
        wp_max,
        q1: up_min.abs().max(up_max.abs()),
        q2: wp_min.abs().max(wp_max.abs()),
    }
}
