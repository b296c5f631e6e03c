use std::path::PathBuf;

use rug::ops::Pow;
use rug::Rational;

use crate::awseries::{AWSeries, SeriesFile, TailModel};
use crate::error::{Error, Result};
use crate::numkit::{parse_exact, PrecisionCtx, QParam};
use crate::points::lift;

/// Built-in coefficient laws, all centered at `x0 = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyTag {
    /// `a_n = exp(-n^(1 + gamma))`.
    StretchedExp(Rational),
    /// `a_n = q^(n^2)`.
    GaussQ,
    /// `a_n = q^(c n^2)`.
    QPower(Rational),
    /// Coefficients read from a series file.
    Custom(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignRule {
    AllPositive,
    Alternating,
}

impl SignRule {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "all-positive" | "positive" => Ok(Self::AllPositive),
            "alternating" => Ok(Self::Alternating),
            other => Err(Error::InvalidArgument(format!(
                "unknown sign rule {other:?} (expected all-positive or alternating)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientFamily {
    pub tag: FamilyTag,
    pub sign: SignRule,
}

impl CoefficientFamily {
    pub fn new(tag: FamilyTag, sign: SignRule) -> Self {
        Self { tag, sign }
    }

    /// `stretched-exp:<gamma>`, `gauss-q`, `q-power:<c>` or `custom:<path>`.
    pub fn parse(tag: &str, sign: SignRule) -> Result<Self> {
        let (head, arg) = match tag.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (tag, None),
        };
        let need = |what: &str| {
            arg.filter(|a| !a.is_empty())
                .ok_or_else(|| Error::InvalidArgument(format!("family {head} needs `{head}:<{what}>`")))
        };
        let tag = match head {
            "stretched-exp" => {
                let g = parse_exact(need("gamma")?)?;
                if g <= 0 {
                    return Err(Error::InvalidArgument("stretched-exp needs gamma > 0".into()));
                }
                FamilyTag::StretchedExp(g)
            }
            "gauss-q" => FamilyTag::GaussQ,
            "q-power" => {
                let c = parse_exact(need("c")?)?;
                if c <= 0 {
                    return Err(Error::InvalidArgument("q-power needs c > 0".into()));
                }
                FamilyTag::QPower(c)
            }
            "custom" => FamilyTag::Custom(PathBuf::from(need("path")?)),
            other => return Err(Error::InvalidArgument(format!("unknown family {other:?}"))),
        };
        Ok(Self { tag, sign })
    }

    /// Builds the series with coefficients `0..=k` and the matching tail law.
    /// Custom families ignore `k` and `q` beyond checking consistency of `q`.
    pub fn build(&self, k: usize, q: &QParam, ctx: &PrecisionCtx) -> Result<AWSeries> {
        let signed = |n: usize, v: rug::Float| {
            if self.sign == SignRule::Alternating && n % 2 == 1 {
                ctx.complex(-v)
            } else {
                ctx.complex(v)
            }
        };
        let (coeffs, tail) = match &self.tag {
            FamilyTag::StretchedExp(g) => {
                let p = ctx.real(g) + 1u32;
                let c = (0..=k).map(|n| signed(n, (-ctx.real(n).pow(&p)).exp())).collect();
                (c, TailModel::stretched_exp(g.clone()))
            }
            FamilyTag::GaussQ => {
                let c = (0..=k).map(|n| signed(n, q.pow((n * n) as i64, ctx))).collect();
                (c, TailModel::gauss_q())
            }
            FamilyTag::QPower(cq) => {
                let lq = ctx.real(q.ln(ctx) * ctx.real(cq));
                let c = (0..=k).map(|n| signed(n, ctx.real(&lq * (n * n) as u64).exp())).collect();
                (c, TailModel::q_power(cq.clone()))
            }
            FamilyTag::Custom(path) => {
                let s = SeriesFile::read(path)?.to_series(ctx)?;
                if s.q().exact() != q.exact() {
                    return Err(Error::InvalidArgument(format!(
                        "series file has q = {} but q = {} was requested",
                        s.q(),
                        q
                    )));
                }
                return Ok(s);
            }
        };
        Ok(AWSeries::new(lift(&ctx.cone(), ctx), coeffs, q.clone(), Some(tail)))
    }
}
