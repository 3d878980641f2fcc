//! Linear stability of micropolar channel flows: Chebyshev collocation of the
//! coupled Orr-Sommerfeld system, energy identities and a priori bounds.

pub mod baseflow;
pub mod bounds;
pub mod cli;
pub mod eigensolve;
pub mod error;
pub mod params;
pub mod regionscan;
pub mod pencil;
pub mod spectral;

pub use error::{Error, Result};

pub(crate) mod serde_c64 {
    use faer::c64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct ReIm {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(z: &c64, s: S) -> Result<S::Ok, S::Error> {
        ReIm { re: z.re, im: z.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<c64, D::Error> {
        let v = ReIm::deserialize(d)?;
        Ok(c64::new(v.re, v.im))
    }
}
