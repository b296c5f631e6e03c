use rug::ops::Pow;
use rug::{Complex, Float, Rational};

use crate::awseries::{dq_series, eval_series, AWSeries};
use crate::error::{Error, Result};
use crate::numkit::{q_bracket, PrecisionCtx, QParam};

use super::maximal::maximal_term;
use super::GrowthConfig;

/// Scaling applied to `D_q^n f / f` before comparing with 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WvNormalization {
    /// `q^(nN - n(n+1)/2) (x/[N]_q)^n`.
    Stated,
    /// `q^(n(N-1)/2 - n(n-1)/4) x^n / ([N][N-1]...[N-n+1])`: the exact ratio
    /// for a lone term `phi_N` as `|x| -> infinity`.
    Leading,
}

impl WvNormalization {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "stated" => Ok(Self::Stated),
            "leading" => Ok(Self::Leading),
            other => Err(Error::InvalidArgument(format!(
                "unknown normalization {other:?} (expected stated or leading)"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Stated => "stated",
            Self::Leading => "leading",
        }
    }
}

#[derive(Clone, Debug)]
pub struct WvRatio {
    pub value: Complex,
    pub nu: usize,
    /// Multiplier applied to `D_q^n f / f`.
    pub normalization: Complex,
}

fn q_rational_pow(q: &QParam, e: &Rational, ctx: &PrecisionCtx) -> Float {
    (q.ln(ctx) * ctx.real(e)).exp()
}

/// Normalization factor at `x` for order `n` and central index `big_n`.
pub fn wv_normalization(
    x: &Complex,
    n: usize,
    big_n: usize,
    q: &QParam,
    kind: WvNormalization,
    ctx: &PrecisionCtx,
) -> Result<Complex> {
    let (ni, bn) = (n as i64, big_n as i64);
    let mut xn = ctx.cone();
    for _ in 0..n {
        xn *= x;
    }
    match kind {
        WvNormalization::Stated => {
            let e = Rational::from(ni * bn - ni * (ni + 1) / 2);
            let br = q_bracket(big_n as u64, q, ctx).pow(n as u32);
            Ok(ctx.complex(&xn * q_rational_pow(q, &e, ctx)) / br)
        }
        WvNormalization::Leading => {
            if big_n < n {
                return Err(Error::AsymptoticRegimeNotReached(format!("central index {big_n} is below the order {n}")));
            }
            let e = Rational::from((2 * ni * (bn - 1) - ni * (ni - 1), 4));
            let mut den = ctx.real(1);
            for i in 0..n {
                den *= q_bracket((big_n - i) as u64, q, ctx);
            }
            Ok(ctx.complex(&xn * q_rational_pow(q, &e, ctx)) / den)
        }
    }
}

/// Normalized `D_q^n f(x) / f(x)` at `x = -r` with `N = nu(r)`.
pub fn wv_ratio(
    s: &AWSeries,
    n: usize,
    r: &Float,
    cfg: &GrowthConfig,
    kind: WvNormalization,
    ctx: &PrecisionCtx,
) -> Result<WvRatio> {
    let mt = maximal_term(s, r, cfg, ctx)?;
    if mt.nu == 0 {
        return Err(Error::AsymptoticRegimeNotReached("central index is 0".into()));
    }
    let x = ctx.complex(-r.clone());
    let f = eval_series(s, &x, ctx).value;
    if f.is_zero() || !ctx.real(f.abs_ref()).is_normal() {
        return Err(Error::ZeroDenominator("f(-r) vanishes or underflows".into()));
    }
    let mut d = s.clone();
    for _ in 0..n {
        d = dq_series(&d, ctx);
    }
    let dv = eval_series(&d, &x, ctx).value;
    let norm = wv_normalization(&x, n, mt.nu, s.q(), kind, ctx)?;
    let value = ctx.complex(&dv / &f) * &norm;
    Ok(WvRatio { value, nu: mt.nu, normalization: norm })
}
