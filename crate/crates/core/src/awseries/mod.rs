//! The basis `phi_k(x; x0)`, series in that basis, the `T(k, n)` numbers and
//! conversions between power and basis coefficients.

mod basis;
mod convert;
mod file;
mod tail;
mod tkn;

pub use basis::{
    node_root, phi_eval, phi_eval_root_form, phi_power_expand, phi_power_expand_with_max,
    PHI_EXPAND_MAX,
};
pub use convert::{
    aw_to_power, expand_from_evaluator, power_to_aw, power_to_aw_with_table, Expansion, PowerSeries,
    PowerToAw,
};
pub use file::{NumRepr, SeriesFile};
pub use tail::{rational_text, TailKind, TailModel, TailRepr};
pub use tkn::{tkn_bound, tkn_bound_constant, tkn_closed, TknTable};

use rug::{Complex, Float, Rational};

use crate::awop::PointEvaluator;
use crate::error::{Error, Result};
use crate::numkit::{q_bracket, PrecisionCtx, QParam};
use crate::points::{shift, ShiftIndex, UnitizedPoint};

/// `sum_k a_k phi_k(x; x0)` truncated at `K`, with an optional decay law for
/// the unstored tail. Without a tail model the series is exactly the stored
/// finite sum.
#[derive(Clone, Debug)]
pub struct AWSeries {
    center: UnitizedPoint,
    coeffs: Vec<Complex>,
    q: QParam,
    tail: Option<TailModel>,
}

impl AWSeries {
    pub fn new(center: UnitizedPoint, coeffs: Vec<Complex>, q: QParam, tail: Option<TailModel>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least one coefficient");
        Self { center, coeffs, q, tail }
    }

    pub fn center(&self) -> &UnitizedPoint {
        &self.center
    }

    /// Parameter `a` of the center.
    pub fn a(&self) -> &Complex {
        self.center.z()
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn q(&self) -> &QParam {
        &self.q
    }

    pub fn tail(&self) -> Option<&TailModel> {
        self.tail.as_ref()
    }

    pub fn set_tail(&mut self, tail: Option<TailModel>) {
        self.tail = tail;
    }

    /// Index of the last stored coefficient.
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Index of the last nonzero stored coefficient.
    pub fn last_nonzero(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    /// Finite series: no tail model, so the stored sum is the function.
    pub fn is_polynomial(&self) -> bool {
        self.tail.is_none()
    }

    /// Center at `x0 = 1` and every coefficient real and nonnegative, so each
    /// term is maximal in modulus on `|x| = r` at `x = -r`.
    pub fn is_all_positive(&self) -> bool {
        self.center.z().real() == &1
            && self.center.z().imag().is_zero()
            && self.coeffs.iter().all(|c| c.imag().is_zero() && !c.real().is_sign_negative())
    }

    /// `c * a_n` for every stored `n`; the tail law is rescaled accordingly.
    pub fn scaled(&self, c: &Rational, ctx: &PrecisionCtx) -> Self {
        let cf = ctx.real(c);
        Self {
            center: self.center.clone(),
            coeffs: self.coeffs.iter().map(|a| ctx.complex(a * &cf)).collect(),
            q: self.q.clone(),
            tail: self.tail.as_ref().map(|t| t.scaled(&Rational::from(c.abs_ref()))),
        }
    }
}

impl PointEvaluator for AWSeries {
    fn eval(&self, p: &UnitizedPoint, ctx: &PrecisionCtx) -> Complex {
        eval_series(self, p.x(), ctx).value
    }
}

/// Value of a truncated series and a heuristic estimate of the omitted tail.
#[derive(Clone, Debug)]
pub struct SeriesValue {
    pub value: Complex,
    /// Zero for finite series. Otherwise the geometric extrapolation of the
    /// last stored terms, infinite when they do not decay.
    pub tail_bound: Float,
    pub heuristic: bool,
}

/// Terms `a_k phi_k(x; x0)` for `k = 0..=K`.
pub fn series_terms(s: &AWSeries, x: &Complex, ctx: &PrecisionCtx) -> Vec<Complex> {
    let a = s.a();
    let qv = s.q.value(ctx);
    let two_ax = ctx.complex(a * x) * 2u32;
    let a2 = ctx.complex(a.square_ref());
    let mut phi = ctx.cone();
    let mut qk = ctx.real(1);
    let mut out = Vec::with_capacity(s.coeffs.len());
    for (k, c) in s.coeffs.iter().enumerate() {
        out.push(ctx.complex(c * &phi));
        if k + 1 < s.coeffs.len() {
            let q2k = ctx.real(qk.square_ref());
            let mut factor = ctx.complex(&a2 * &q2k);
            factor += 1u32;
            factor -= ctx.complex(&two_ax * &qk);
            phi *= factor;
            qk *= &qv;
        }
    }
    out
}

/// Sums the series at `x`, accumulating `phi_k` factor by factor.
pub fn eval_series(s: &AWSeries, x: &Complex, ctx: &PrecisionCtx) -> SeriesValue {
    let terms = series_terms(s, x, ctx);
    let mut value = ctx.czero();
    for t in &terms {
        value += t;
    }
    if s.is_polynomial() {
        return SeriesValue { value, tail_bound: ctx.zero(), heuristic: false };
    }
    let mags: Vec<Float> = terms.iter().map(|t| ctx.real(t.abs_ref())).collect();
    SeriesValue { value, tail_bound: geometric_tail(&mags, ctx), heuristic: true }
}

/// `|t_K| rho / (1 - rho)` with `rho` the largest of the last few term ratios.
fn geometric_tail(mags: &[Float], ctx: &PrecisionCtx) -> Float {
    const LOOKBACK: usize = 4;
    let k = mags.len();
    if k < 2 {
        return ctx.real(rug::float::Special::Infinity);
    }
    if mags[k - 1].is_zero() {
        return ctx.zero();
    }
    let start = k.saturating_sub(LOOKBACK + 1);
    let mut rho = ctx.zero();
    for i in start..k - 1 {
        if mags[i].is_zero() {
            return ctx.real(rug::float::Special::Infinity);
        }
        let r = ctx.real(&mags[i + 1] / &mags[i]);
        if r > rho {
            rho = r;
        }
    }
    if rho >= 1 {
        return ctx.real(rug::float::Special::Infinity);
    }
    let den = ctx.real(1u32 - &rho);
    ctx.real(&mags[k - 1] * &rho) / den
}

/// Termwise image under `D_q`: `a'_(k-1) = -2 a [k]_q a_k` at the center `x0^`.
pub fn dq_series(s: &AWSeries, ctx: &PrecisionCtx) -> AWSeries {
    let center = shift(&s.center, ShiftIndex(1), &s.q, ctx);
    let minus_two_a = ctx.complex(s.a() * -2i32);
    let coeffs: Vec<Complex> = if s.coeffs.len() == 1 {
        vec![ctx.czero()]
    } else {
        (1..s.coeffs.len())
            .map(|k| {
                let w = ctx.complex(&minus_two_a * q_bracket(k as u64, &s.q, ctx));
                ctx.complex(&s.coeffs[k] * &w)
            })
            .collect()
    };
    // |a'_k| <= 2|a| [k+1]_q |a_(k+1)| <= (2|a|/(1-q)) bound(k+1) <= (2|a|/(1-q)) bound(k).
    let tail = s.tail.as_ref().map(|t| {
        let f = ctx.real(s.a().abs_ref()) * 2u32 / (ctx.real(1) - s.q.value(ctx));
        let up = f.ceil().to_integer().unwrap_or_default() + 1u32;
        t.scaled(&Rational::from(up))
    });
    AWSeries { center, coeffs, q: s.q.clone(), tail }
}

/// Outcome of the numerical convergence dichotomy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convergence {
    ConvergesEverywhere,
    DivergesOffNodes,
    Undetermined,
}

/// Classifies the stored partial sums at a probe point away from the nodes.
pub fn classify_convergence(s: &AWSeries, probe: &Complex, ctx: &PrecisionCtx) -> Result<Convergence> {
    const CAUCHY_TERMS: usize = 8;
    const GROWTH_RUN: usize = 20;
    let tol = ctx.tolerance(8);
    for j in 0..=s.truncation() {
        let node = shift(&s.center, ShiftIndex(2 * j as i64), &s.q, ctx);
        let scale = ctx.real(node.x().abs_ref()).max(&ctx.real(1));
        let d = ctx.real(ctx.complex(probe - node.x()).abs_ref());
        if d <= ctx.real(&tol * &scale) {
            return Err(Error::ProbeIsNode { node: j });
        }
    }
    let last = match s.last_nonzero() {
        None => return Ok(Convergence::ConvergesEverywhere),
        Some(l) => l,
    };
    if s.is_polynomial() {
        return Ok(Convergence::ConvergesEverywhere);
    }
    let terms = series_terms(s, probe, ctx);
    let mags: Vec<Float> = terms.iter().map(|t| ctx.real(t.abs_ref())).collect();
    let k = mags.len();
    if k > GROWTH_RUN && last + 1 == k {
        let growing = (k - GROWTH_RUN..k).all(|i| mags[i] > mags[i - 1]);
        if growing {
            return Ok(Convergence::DivergesOffNodes);
        }
    }
    let mut sum = ctx.czero();
    for t in &terms {
        sum += t;
    }
    let sum_mag = ctx.real(sum.abs_ref());
    if k > CAUCHY_TERMS {
        let thresh = if sum_mag.is_zero() { ctx.tolerance(0) } else { ctx.real(&sum_mag * ctx.tolerance(0)) };
        if mags[k - CAUCHY_TERMS..].iter().all(|m| *m <= thresh) {
            return Ok(Convergence::ConvergesEverywhere);
        }
    }
    Ok(Convergence::Undetermined)
}
