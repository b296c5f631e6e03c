use rug::ops::Pow;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{parse_exact, PrecisionCtx, QParam};

/// Decay law asserted for the coefficients beyond (and including) the stored range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TailKind {
    /// `|a_n| <= scale * exp(-n^(1 + gamma))`, `gamma > 0`.
    StretchedExp { gamma: Rational },
    /// `|a_n| <= scale * q^(n^2)`.
    GaussQ,
    /// `|a_n| <= scale * q^(c n^2)`, `c > 0`.
    QPower { c: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailModel {
    pub kind: TailKind,
    pub scale: Rational,
}

impl TailModel {
    pub fn new(kind: TailKind) -> Self {
        Self { kind, scale: Rational::from(1) }
    }

    pub fn stretched_exp(gamma: Rational) -> Self {
        Self::new(TailKind::StretchedExp { gamma })
    }

    pub fn gauss_q() -> Self {
        Self::new(TailKind::GaussQ)
    }

    pub fn q_power(c: Rational) -> Self {
        Self::new(TailKind::QPower { c })
    }

    pub fn validate(&self) -> Result<()> {
        if self.scale <= 0 {
            return Err(Error::InvalidArgument("tail model scale must be positive".into()));
        }
        match &self.kind {
            TailKind::StretchedExp { gamma } if *gamma <= 0 => {
                Err(Error::InvalidArgument("stretched-exp tail needs gamma > 0".into()))
            }
            TailKind::QPower { c } if *c <= 0 => {
                Err(Error::InvalidArgument("q-power tail needs c > 0".into()))
            }
            _ => Ok(()),
        }
    }

    /// The same law with the scale multiplied by `factor`.
    pub fn scaled(&self, factor: &Rational) -> Self {
        Self { kind: self.kind.clone(), scale: Rational::from(&self.scale * factor) }
    }

    /// `ln` of the bound on `|a_n|`.
    pub fn log_bound(&self, n: usize, q: &QParam, ctx: &PrecisionCtx) -> Float {
        let ln_scale = ctx.real(&self.scale).ln();
        let nf = ctx.real(n);
        let core = match &self.kind {
            TailKind::StretchedExp { gamma } => {
                let e = ctx.real(gamma) + 1u32;
                -nf.pow(&e)
            }
            TailKind::GaussQ => q.ln(ctx) * ctx.real(nf.square_ref()),
            TailKind::QPower { c } => q.ln(ctx) * ctx.real(nf.square_ref()) * ctx.real(c),
        };
        core + ln_scale
    }

    /// Upper bound for `log_bound(m+1) - log_bound(m)` that is non-increasing in `m`.
    pub fn log_step_bound(&self, m: usize, q: &QParam, ctx: &PrecisionCtx) -> Float {
        let mf = ctx.real(m);
        let two_m_plus_one = ctx.real(2 * m as u64 + 1);
        match &self.kind {
            // (m+1)^p - m^p >= p m^(p-1) for p >= 1.
            TailKind::StretchedExp { gamma } => {
                let g = ctx.real(gamma);
                let p = ctx.real(&g + 1u32);
                -(p * mf.pow(&g))
            }
            TailKind::GaussQ => q.ln(ctx) * two_m_plus_one,
            TailKind::QPower { c } => q.ln(ctx) * two_m_plus_one * ctx.real(c),
        }
    }

    pub fn to_repr(&self) -> TailRepr {
        let (tag, gamma, c) = match &self.kind {
            TailKind::StretchedExp { gamma } => ("stretched-exp", Some(rational_text(gamma)), None),
            TailKind::GaussQ => ("gauss-q", None, None),
            TailKind::QPower { c } => ("q-power", None, Some(rational_text(c))),
        };
        TailRepr {
            tag: tag.to_string(),
            gamma,
            c,
            scale: (self.scale != 1).then(|| rational_text(&self.scale)),
        }
    }

    pub fn from_repr(r: &TailRepr) -> Result<Self> {
        let need = |v: &Option<String>, key: &str| -> Result<Rational> {
            let s = v
                .as_ref()
                .ok_or_else(|| Error::Parse(format!("tail_model {:?} is missing key `{key}`", r.tag)))?;
            parse_exact(s)
        };
        let kind = match r.tag.as_str() {
            "stretched-exp" => TailKind::StretchedExp { gamma: need(&r.gamma, "gamma")? },
            "gauss-q" => TailKind::GaussQ,
            "q-power" => TailKind::QPower { c: need(&r.c, "c")? },
            other => return Err(Error::Parse(format!("unknown tail_model tag {other:?}"))),
        };
        let scale = match &r.scale {
            Some(s) => parse_exact(s)?,
            None => Rational::from(1),
        };
        let m = Self { kind, scale };
        m.validate()?;
        Ok(m)
    }
}

/// Integer or `p/q` text for an exact rational.
pub fn rational_text(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        r.to_string()
    }
}

/// Serialized tail model: `{"tag": "stretched-exp", "gamma": "2"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailRepr {
    pub tag: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,
}
