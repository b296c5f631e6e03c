use rug::float::Special;
use rug::Float;

use crate::awseries::AWSeries;
use crate::error::{Error, Result};
use crate::numkit::PrecisionCtx;

use super::maximal::maximal_term;
use super::profile::{GrowthProfile, RadiusGrid};
use super::GrowthConfig;

const MIN_NONZERO: usize = 32;

#[derive(Clone, Debug)]
pub struct LogOrder {
    /// `sigma_log = 1 + 1/(L - 1)`, infinite when `L <= 1`.
    pub sigma: Float,
    /// `L = min ln ln(1/|a_n|) / ln n` over the upper half of the stored range.
    pub l_min: Float,
    pub from: usize,
    pub to: usize,
}

/// Logarithmic order from the coefficient decay `|a_n| ~ exp(-n^L)`.
pub fn log_order_estimate(s: &AWSeries, ctx: &PrecisionCtx) -> Result<LogOrder> {
    if s.is_polynomial() {
        return Err(Error::NotTranscendental("series has no tail model".into()));
    }
    let nonzero = s.coeffs().iter().filter(|c| !c.is_zero()).count();
    if nonzero < MIN_NONZERO {
        return Err(Error::InsufficientCoefficients(format!("{nonzero} nonzero coefficients, need {MIN_NONZERO}")));
    }
    let k = s.truncation();
    let from = (k / 2).max(2);
    let mut l_min: Option<Float> = None;
    for n in from..=k {
        let c = &s.coeffs()[n];
        if c.is_zero() {
            continue;
        }
        let v = -ctx.real(c.abs_ref()).ln();
        if v <= 0 {
            return Err(Error::CoefficientNotDecaying(format!("|a_{n}| >= 1")));
        }
        let l = v.ln() / ctx.real(n).ln();
        if l_min.as_ref().is_none_or(|m| l < *m) {
            l_min = Some(l);
        }
    }
    let l_min = l_min.ok_or_else(|| Error::InsufficientCoefficients("no nonzero coefficient in the upper half".into()))?;
    let sigma = if l_min <= 1 {
        ctx.real(Special::Infinity)
    } else {
        ctx.real(1u32) + ctx.real(1u32) / ctx.real(&l_min - 1u32)
    };
    Ok(LogOrder { sigma, l_min, from, to: k })
}

/// `1 + max ln nu / ln ln r` over the upper half of a profile's radii.
pub fn log_order_from_profile(profile: &GrowthProfile, ctx: &PrecisionCtx) -> Result<Float> {
    let recs = profile.records();
    let mut best: Option<Float> = None;
    for rec in &recs[recs.len() / 2..] {
        let Some(nu) = rec.nu else { continue };
        let lnr = rec.radius.value.clone().ln();
        if nu == 0 || lnr <= 1 {
            continue;
        }
        let v = ctx.real(nu).ln() / lnr.ln();
        if best.as_ref().is_none_or(|b| v > *b) {
            best = Some(v);
        }
    }
    best.map(|b| b + 1u32)
        .ok_or_else(|| Error::AsymptoticRegimeNotReached("no radius with nu >= 1 and ln r > 1".into()))
}

#[derive(Clone, Debug)]
pub struct LogType {
    pub sigma: Float,
    /// `max ln mu(r) / (ln r)^2` over the upper half of the grid.
    pub tau_mu: Float,
    /// `(1/4) max n^2 / ln(1/|a_n|)` over the upper half of the stored range.
    pub coeff_limsup: Float,
    /// `1/(4/tau + 2 ln(1/q))`.
    pub lower: Float,
    /// `1/(1/tau - 2 ln(1/q))`, infinite when the denominator is not positive.
    pub upper: Float,
    pub bracket_ok: bool,
}

/// Relative slack on both ends of the type bracket.
const BRACKET_SLACK: f64 = 0.10;
/// Largest logarithmic-order deficit still treated as order two.
const ORDER_TWO_SLACK: f64 = 0.05;

/// Logarithmic type for series of logarithmic order two.
pub fn log_type_bounds(s: &AWSeries, grid: &RadiusGrid, cfg: &GrowthConfig, ctx: &PrecisionCtx) -> Result<LogType> {
    let order = log_order_estimate(s, ctx)?;
    if order.sigma < 2.0 * (1.0 - ORDER_TWO_SLACK) {
        return Err(Error::RegimeMismatch(format!(
            "logarithmic order {} is below 2",
            order.sigma.to_f64()
        )));
    }
    let radii = grid.radii(ctx);
    let mut tau: Option<Float> = None;
    for rad in &radii[radii.len() / 2..] {
        let lnr = rad.value.clone().ln();
        if lnr <= 0 {
            continue;
        }
        let mt = maximal_term(s, &rad.value, cfg, ctx)?;
        let v = mt.log_mu / lnr.square();
        if tau.as_ref().is_none_or(|t| v > *t) {
            tau = Some(v);
        }
    }
    let tau_mu = tau.ok_or_else(|| Error::AsymptoticRegimeNotReached("no radius with ln r > 0".into()))?;
    let mut lim: Option<Float> = None;
    for n in order.from..=order.to {
        let c = &s.coeffs()[n];
        if c.is_zero() {
            continue;
        }
        let v = ctx.real((n * n) as u64) / -ctx.real(c.abs_ref()).ln();
        if lim.as_ref().is_none_or(|m| v > *m) {
            lim = Some(v);
        }
    }
    let coeff_limsup = lim.expect("log_order_estimate found nonzero coefficients") / 4u32;
    let two_lninv = s.q().ln_inv(ctx) * 2u32;
    let inv_tau = ctx.real(1u32) / &tau_mu;
    let lower = ctx.real(1u32) / (ctx.real(&inv_tau * 4u32) + &two_lninv);
    let up_den = ctx.real(&inv_tau - &two_lninv);
    let upper = if up_den <= 0 { ctx.real(Special::Infinity) } else { ctx.real(1u32) / up_den };
    let lo_ok = ctx.real(&lower * (1.0 - BRACKET_SLACK)) <= coeff_limsup;
    let hi_ok = coeff_limsup <= ctx.real(&upper * (1.0 + BRACKET_SLACK));
    Ok(LogType { sigma: order.sigma, tau_mu, coeff_limsup, lower, upper, bracket_ok: lo_ok && hi_ok })
}
