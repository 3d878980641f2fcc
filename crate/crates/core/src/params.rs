//! Dimensionless micropolar numbers and the derived stability constants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative size of the coupling terms in [`classical_limit`].
pub const CLASSICAL_DECOUPLING: f64 = 1e-14;

/// The five dimensionless numbers `R0, Rk, Rmu, Rnu, Rgamma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MicropolarParams {
    pub r0: f64,
    pub rk: f64,
    pub rmu: f64,
    pub rnu: f64,
    pub rgamma: f64,
}

impl MicropolarParams {
    pub fn new(r0: f64, rk: f64, rmu: f64, rnu: f64, rgamma: f64) -> Result<Self> {
        let p = Self { r0, rk, rmu, rnu, rgamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("r0", self.r0),
            ("rk", self.rk),
            ("rmu", self.rmu),
            ("rnu", self.rnu),
            ("rgamma", self.rgamma),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        Ok(())
    }

    /// Coefficient of `(D^2 - a^2)^2 phi`: `1/Rmu + 1/(2 Rk)`.
    pub fn viscous(&self) -> f64 {
        1.0 / self.rmu + 0.5 / self.rk
    }

    /// Coefficient of `(D^2 - a^2) omega` in the stream-function equation: `R0/Rk`.
    pub fn vorticity_coupling(&self) -> f64 {
        self.r0 / self.rk
    }

    /// Coefficient of `(D^2 - a^2) phi` in the microrotation equation: `1/Rnu`.
    pub fn rotation_coupling(&self) -> f64 {
        1.0 / self.rnu
    }

    /// Microrotation diffusion `1/Rgamma`.
    pub fn rotation_diffusion(&self) -> f64 {
        1.0 / self.rgamma
    }

    /// Microrotation damping `2 R0/Rnu`.
    pub fn rotation_damping(&self) -> f64 {
        2.0 * self.r0 / self.rnu
    }

    /// Multiply every Reynolds-like number except `R0` by `factor`.
    ///
    /// All pencil coefficients and `1/R` scale by `1/factor`, so the
    /// effective `R` of [`derive`] scales by exactly `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            r0: self.r0,
            rk: self.rk * factor,
            rmu: self.rmu * factor,
            rnu: self.rnu * factor,
            rgamma: self.rgamma * factor,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub r1: f64,
    pub r2: f64,
    /// `1/R`, present only when `r1 > r2`.
    pub inv_r: Option<f64>,
    pub theorem1_applicable: bool,
}

impl DerivedParams {
    /// Effective `R`, when the bound applies.
    pub fn r_effective(&self) -> Option<f64> {
        self.inv_r.map(|x| 1.0 / x)
    }
}

pub fn derive(params: &MicropolarParams) -> Result<DerivedParams> {
    params.validate()?;
    let MicropolarParams { r0, rk, rmu, rnu, rgamma } = *params;
    let r1 = (1.0 / rmu).min(0.5 / rk).min(r0 / rnu);
    let r2 = (0.5 * r0 / rk).max(0.5 / rnu);
    // equality is not enough, the r1 - r2 coefficient would vanish
    let applicable = r1 > r2;
    let inv_r = applicable.then(|| (r1 - r2).min(params.viscous()).min(1.0 / rgamma));
    Ok(DerivedParams { r1, r2, inv_r, theorem1_applicable: applicable })
}

/// Parameters whose stream-function equation is the classical Orr-Sommerfeld
/// operator with viscosity `1/reynolds`; the couplings to `omega` sit below
/// [`CLASSICAL_DECOUPLING`] of the viscous coefficient.
pub fn classical_limit(reynolds: f64) -> Result<MicropolarParams> {
    if !(reynolds.is_finite() && reynolds > 0.0) {
        return Err(Error::InvalidParameter { name: "reynolds", value: reynolds });
    }
    let rk = 1e20 * reynolds;
    let rmu = 1.0 / (1.0 / reynolds - 0.5 / rk);
    MicropolarParams::new(1.0, rk, rmu, 1e16 * reynolds, 1.0)
}
