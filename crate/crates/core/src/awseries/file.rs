use std::path::Path;

use rug::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{complex_to_strings, parse_real, PrecisionCtx, QParam};
use crate::points::{lift, UnitizedPoint};

use super::tail::{TailModel, TailRepr};
use super::AWSeries;

/// A decimal number as written in files: a plain string for real values or
/// a `[re, im]` pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumRepr {
    Real(String),
    Pair([String; 2]),
}

impl NumRepr {
    pub fn to_complex(&self, ctx: &PrecisionCtx) -> Result<Complex> {
        match self {
            NumRepr::Real(s) => Ok(ctx.complex(parse_real(s, ctx)?)),
            NumRepr::Pair([re, im]) => {
                let re = parse_real(re, ctx)?;
                let im = parse_real(im, ctx)?;
                Ok(ctx.complex((re, im)))
            }
        }
    }

    pub fn from_complex(z: &Complex) -> Self {
        let (re, im) = complex_to_strings(z);
        NumRepr::Pair([re, im])
    }
}

/// On-disk series: keys are written in this order; any order is accepted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesFile {
    pub q: String,
    pub center_x: NumRepr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center_z: Option<NumRepr>,
    pub coefficients: Vec<NumRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_model: Option<TailRepr>,
}

impl SeriesFile {
    pub fn from_series(s: &AWSeries) -> Self {
        let center_x = if s.center().x().imag().is_zero() && s.center().x().real() == &1 {
            NumRepr::Real("1".into())
        } else {
            NumRepr::from_complex(s.center().x())
        };
        let lifted_matches = {
            let ctx = PrecisionCtx::new(
                s.center().z().prec().0.max(PrecisionCtx::MIN_BITS),
                0,
            )
            .ok();
            ctx.map(|c| lift(s.center().x(), &c).z() == s.center().z()).unwrap_or(false)
        };
        Self {
            q: s.q().as_str().to_string(),
            center_x,
            center_z: (!lifted_matches).then(|| NumRepr::from_complex(s.center().z())),
            coefficients: s.coeffs().iter().map(NumRepr::from_complex).collect(),
            tail_model: s.tail().map(|t| t.to_repr()),
        }
    }

    pub fn to_series(&self, ctx: &PrecisionCtx) -> Result<AWSeries> {
        let q = QParam::parse(&self.q)?;
        if self.coefficients.is_empty() {
            return Err(Error::Parse("`coefficients` must not be empty".into()));
        }
        let center = match &self.center_z {
            Some(z) => {
                let z = z.to_complex(ctx)?;
                if z.is_zero() {
                    return Err(Error::Parse("`center_z` must be nonzero".into()));
                }
                UnitizedPoint::from_z(z, ctx)
            }
            None => lift(&self.center_x.to_complex(ctx)?, ctx),
        };
        let coeffs = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| c.to_complex(ctx).map_err(|e| Error::Parse(format!("coefficient {i}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let tail = self.tail_model.as_ref().map(TailModel::from_repr).transpose()?;
        Ok(AWSeries::new(center, coeffs, q, tail))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("series file: {e}")))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("series serialization");
        s.push('\n');
        s
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    #[test]
    fn round_trip_preserves_values() {
        let ctx = PrecisionCtx::with_bits(200).unwrap();
        let q = QParam::parse("0.5").unwrap();
        let coeffs = vec![ctx.complex(1) / 3u32, ctx.complex((-2.5, 0.25)), ctx.czero()];
        let s = AWSeries::new(
            lift(&ctx.complex(1), &ctx),
            coeffs.clone(),
            q,
            Some(TailModel::stretched_exp(Rational::from(2))),
        );
        let f = SeriesFile::from_series(&s);
        let text = f.to_json();
        assert!(text.find("\"q\"").unwrap() < text.find("\"center_x\"").unwrap());
        assert!(text.find("\"center_x\"").unwrap() < text.find("\"coefficients\"").unwrap());
        assert!(text.find("\"coefficients\"").unwrap() < text.find("\"tail_model\"").unwrap());
        let back = SeriesFile::from_json(&text).unwrap().to_series(&ctx).unwrap();
        assert_eq!(back.coeffs(), &coeffs[..]);
        assert_eq!(back.tail(), s.tail());
    }

    #[test]
    fn any_key_order_and_plain_strings() {
        let ctx = PrecisionCtx::with_bits(128).unwrap();
        let text = r#"{"coefficients": ["1", ["-0.5", "+0"]], "center_x": "1", "q": "1/2"}"#;
        let s = SeriesFile::from_json(text).unwrap().to_series(&ctx).unwrap();
        assert_eq!(s.coeffs()[1], ctx.complex(-0.5));
        assert!(s.tail().is_none());
    }

    #[test]
    fn missing_key_is_named() {
        let err = SeriesFile::from_json(r#"{"q": "0.5", "center_x": "1"}"#).unwrap_err();
        assert!(err.to_string().contains("coefficients"), "{err}");
    }

    #[test]
    fn explicit_center_z_overrides_lift() {
        let ctx = PrecisionCtx::with_bits(128).unwrap();
        let text = r#"{"q": "0.5", "center_x": "1.25", "center_z": "0.5", "coefficients": ["1"]}"#;
        let s = SeriesFile::from_json(text).unwrap().to_series(&ctx).unwrap();
        assert_eq!(*s.a(), ctx.complex(0.5));
        let f = SeriesFile::from_series(&s);
        assert!(f.center_z.is_some());
    }
}
