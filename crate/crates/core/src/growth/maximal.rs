use rayon::prelude::*;
use rug::float::Special;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};

use crate::awop::PointEvaluator;
use crate::awseries::{eval_series, AWSeries};
use crate::error::{Error, Result};
use crate::numkit::{PrecisionCtx, QParam};
use crate::points::lift;

use super::GrowthConfig;

/// Incremental pieces of the term log-sizes for one series and radius.
pub(crate) struct TermWalker<'a> {
    s: &'a AWSeries,
    ctx: &'a PrecisionCtx,
    r: Float,
    a_abs: Float,
    ln_2a: Float,
    lnq: Float,
    a2_abs: Float,
}

impl<'a> TermWalker<'a> {
    pub(crate) fn new(s: &'a AWSeries, r: &Float, ctx: &'a PrecisionCtx) -> Self {
        let a_abs = ctx.real(s.a().abs_ref());
        let ln_2a = ctx.real(&a_abs * 2u32).ln();
        let a2_abs = ctx.real(a_abs.square_ref());
        Self { s, ctx, r: ctx.real(r), a_abs, ln_2a, lnq: s.q().ln(ctx), a2_abs }
    }

    /// `ln |a_n|`, minus infinity for a zero coefficient.
    pub(crate) fn ln_coeff(&self, n: usize) -> Float {
        let c = &self.s.coeffs()[n];
        if c.is_zero() {
            self.ctx.real(Special::NegInfinity)
        } else {
            self.ctx.real(c.abs_ref()).ln()
        }
    }

    /// `ln(2|a| q^k (r + |c_k|))`: passing from `phi_k` to `phi_(k+1)`.
    pub(crate) fn increment(&self, k: usize) -> Float {
        let ctx = self.ctx;
        let qk = self.s.q().pow(k as i64, ctx);
        let qmk = self.s.q().pow(-(k as i64), ctx);
        let a = self.s.a();
        let root = ctx.complex(a * &qk) + ctx.complex(&qmk / a);
        let root_abs = ctx.real(root.abs_ref()) / 2u32;
        ctx.real(&self.ln_2a + ctx.real(&self.lnq * k as u64)) + ctx.real(&self.r + &root_abs).ln()
    }

    /// Non-increasing upper bound for [`Self::increment`]:
    /// `ln(2|a| q^k r + |a|^2 q^(2k) + 1)`.
    pub(crate) fn increment_bound(&self, k: usize) -> Float {
        let ctx = self.ctx;
        let qk = self.s.q().pow(k as i64, ctx);
        let t = ctx.real(&self.a_abs * &qk) * 2u32 * &self.r;
        let u = ctx.real(&self.a2_abs * ctx.real(qk.square_ref()));
        (t + u + 1u32).ln()
    }
}

/// `ln |a_n phi_n(-r)|` style term sizes for `n = 0..=min(upto, K)`.
pub fn term_logs(s: &AWSeries, r: &Float, upto: usize, ctx: &PrecisionCtx) -> Vec<Float> {
    let w = TermWalker::new(s, r, ctx);
    let last = upto.min(s.truncation());
    let mut p = ctx.zero();
    let mut out = Vec::with_capacity(last + 1);
    for n in 0..=last {
        out.push(ctx.real(&w.ln_coeff(n) + &p));
        if n < last {
            p += w.increment(n);
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct MaximalTerm {
    /// `ln mu(r)`; minus infinity for the zero series.
    pub log_mu: Float,
    /// Largest index attaining the maximum.
    pub nu: usize,
    /// Last index whose term was evaluated.
    pub scanned: usize,
    /// Whether the scan stopped on the tail-model envelope.
    pub certified_by_tail: bool,
}

impl MaximalTerm {
    pub fn mu(&self) -> Float {
        self.log_mu.clone().exp()
    }
}

/// Maximal term and central index at radius `r`.
///
/// A series without a tail model is exact and is scanned completely. With a
/// tail model the scan stops once the terms have fallen for `cfg.window`
/// consecutive indices and the tail envelope proves no later term can reach
/// the current maximum; running out of stored terms first is an error.
pub fn maximal_term(s: &AWSeries, r: &Float, cfg: &GrowthConfig, ctx: &PrecisionCtx) -> Result<MaximalTerm> {
    if *r <= 0 {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    let w = TermWalker::new(s, r, ctx);
    let k_max = s.truncation();
    let mut p = ctx.zero();
    let mut best: Option<Float> = None;
    let mut nu = 0usize;
    let mut run = 0usize;
    let mut prev: Option<Float> = None;
    for n in 0..=k_max {
        let l = ctx.real(&w.ln_coeff(n) + &p);
        if best.as_ref().is_none_or(|b| l >= *b) {
            best = Some(l.clone());
            nu = n;
        }
        let decreased = match &prev {
            Some(pv) => l < *pv || l.is_infinite(),
            None => false,
        };
        run = if decreased { run + 1 } else { 0 };
        let inc = w.increment(n);
        p += &inc;
        if let (Some(tail), Some(b)) = (s.tail(), best.as_ref()) {
            if n > nu && run >= cfg.window {
                let m = n + 1;
                let env = ctx.real(&tail.log_bound(m, s.q(), ctx) + &p);
                let step = tail.log_step_bound(m, s.q(), ctx) + w.increment_bound(m);
                if env < *b && step <= 0 {
                    return Ok(MaximalTerm { log_mu: b.clone(), nu, scanned: n, certified_by_tail: true });
                }
            }
        }
        prev = Some(l);
    }
    if s.tail().is_some() {
        return Err(Error::TruncationTooShort { stored: k_max });
    }
    Ok(MaximalTerm { log_mu: best.expect("nonempty series"), nu, scanned: k_max, certified_by_tail: false })
}

#[derive(Clone, Debug)]
pub struct MaxModulus {
    pub value: Float,
    /// Argument of the maximizing point `x = r e^(i theta)`.
    pub theta: Float,
    /// True when found by angular search rather than exactly at `x = -r`.
    pub sampled: bool,
}

const ANGLES: usize = 256;
const REFINE_ARCS: usize = 3;

/// `max_{|x| = r} |f(x)|` for a stored series. Nonnegative coefficients at
/// `x0 = 1` attain it at `x = -r`; otherwise an angular search is used.
pub fn max_modulus(s: &AWSeries, r: &Float, ctx: &PrecisionCtx) -> Result<MaxModulus> {
    if *r <= 0 {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    if s.is_all_positive() {
        let x = ctx.complex(-r.clone());
        let v = ctx.real(eval_series(s, &x, ctx).value.abs_ref());
        return Ok(MaxModulus { value: v, theta: ctx.pi(), sampled: false });
    }
    Ok(angular_search(&|x: &Complex| ctx.real(eval_series(s, x, ctx).value.abs_ref()), r, ctx))
}

/// Angular search for `max_{|x| = r} |f(x)|` with a pointwise evaluator.
pub fn max_modulus_fn(f: &dyn PointEvaluator, r: &Float, ctx: &PrecisionCtx) -> Result<MaxModulus> {
    if *r <= 0 {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    Ok(angular_search(&|x: &Complex| ctx.real(f.eval(&lift(x, ctx), ctx).abs_ref()), r, ctx))
}

fn angular_search(g: &(dyn Fn(&Complex) -> Float + Sync), r: &Float, ctx: &PrecisionCtx) -> MaxModulus {
    let two_pi = ctx.pi() * 2u32;
    let at = |theta: &Float| -> Float {
        let (s, c) = theta.clone().sin_cos(ctx.real(0));
        g(&ctx.complex((ctx.real(r * &c), ctx.real(r * &s))))
    };
    let thetas: Vec<Float> = (0..ANGLES).map(|j| ctx.real(&two_pi * j as u64) / ANGLES as u64).collect();
    let vals: Vec<Float> = thetas.par_iter().map(|t| at(t)).collect();
    let mut order: Vec<usize> = (0..ANGLES).collect();
    order.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap_or(std::cmp::Ordering::Equal));
    let step = ctx.real(&two_pi / ANGLES as u64);
    let tol = ctx.pow2(-((ctx.bits() / 4).min(64) as i32));
    let refined: Vec<(Float, Float)> = order[..REFINE_ARCS]
        .par_iter()
        .map(|&j| golden_max(&at, ctx.real(&thetas[j] - &step), ctx.real(&thetas[j] + &step), &tol, ctx))
        .collect();
    let mut best = (thetas[order[0]].clone(), vals[order[0]].clone());
    for (t, v) in refined {
        if v > best.1 {
            best = (t, v);
        }
    }
    let theta = best.0.clone() % &two_pi;
    let theta = if theta < 0 { theta + &two_pi } else { theta };
    MaxModulus { value: best.1, theta, sampled: true }
}

fn golden_max(f: &dyn Fn(&Float) -> Float, mut lo: Float, mut hi: Float, tol: &Float, ctx: &PrecisionCtx) -> (Float, Float) {
    let inv_phi = (ctx.real(5).sqrt() - 1u32) / 2u32;
    let mut c = ctx.real(&hi - ctx.real(&inv_phi * ctx.real(&hi - &lo)));
    let mut d = ctx.real(&lo + ctx.real(&inv_phi * ctx.real(&hi - &lo)));
    let mut fc = f(&c);
    let mut fd = f(&d);
    while ctx.real(&hi - &lo) > *tol {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = ctx.real(&hi - ctx.real(&inv_phi * ctx.real(&hi - &lo)));
            fc = f(&c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = ctx.real(&lo + ctx.real(&inv_phi * ctx.real(&hi - &lo)));
            fd = f(&d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `K_n = ((1 + t)/(1 - t))^(n+1)` with `t = (q^n + q^-n)/(2 e^(n^gamma))`;
/// infinite for `n = 0` or when `t >= 1`.
pub fn kn_constant(n: usize, q: &QParam, gamma: &Rational, ctx: &PrecisionCtx) -> Float {
    if n == 0 {
        return ctx.real(Special::Infinity);
    }
    let num = q.pow(n as i64, ctx) + q.pow(-(n as i64), ctx);
    let den = ctx.real(n).pow(ctx.real(gamma)).exp() * 2u32;
    let t = num / den;
    if t >= 1 {
        return ctx.real(Special::Infinity);
    }
    let ratio = (ctx.real(1u32) + &t) / (ctx.real(1u32) - &t);
    ratio.pow((n + 1) as u64)
}

#[derive(Clone, Debug)]
pub struct Sandwich {
    pub nu: usize,
    pub mu: Float,
    pub big_m: Float,
    pub kn: Float,
    /// `mu(r) <= K_N M(r)`.
    pub lower_ok: bool,
    /// `K_N M(r) <= mu(r) (ln mu(r))^((1 - delta)/2 + eps)`.
    pub upper_ok: bool,
}

/// Both sides of the maximum-modulus sandwich at `N = nu(r)`.
pub fn mu_m_sandwich(s: &AWSeries, r: &Float, cfg: &GrowthConfig, ctx: &PrecisionCtx) -> Result<Sandwich> {
    let mt = maximal_term(s, r, cfg, ctx)?;
    let mm = max_modulus(s, r, ctx)?;
    let mu = mt.mu();
    let slack = ctx.real(1u32) + ctx.tolerance(16);
    if s.last_nonzero().unwrap_or(0) == 0 {
        let kn = ctx.real(1);
        let lower_ok = mu <= ctx.real(&mm.value * &slack);
        let upper_ok = mm.value <= ctx.real(&mu * &slack);
        return Ok(Sandwich { nu: mt.nu, mu, big_m: mm.value, kn, lower_ok, upper_ok });
    }
    if mt.nu == 0 {
        return Err(Error::AsymptoticRegimeNotReached("central index is 0".into()));
    }
    let cc = &cfg.comparison;
    let kn = kn_constant(mt.nu, s.q(), cc.gamma(), ctx);
    let km = ctx.real(&kn * &mm.value);
    let lower_ok = mu <= ctx.real(&km * &slack);
    let expo = (ctx.real(1u32) - ctx.real(cc.delta())) / 2u32 + ctx.real(&cfg.sandwich_eps);
    let upper_ok = if mt.log_mu > 0 {
        km <= ctx.real(&mu * ctx.real(&mt.log_mu).pow(&expo)) * &slack
    } else {
        km <= ctx.real(&mu * &slack)
    };
    Ok(Sandwich { nu: mt.nu, mu, big_m: mm.value, kn, lower_ok, upper_ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth::{CoefficientFamily, SignRule};

    fn ctx() -> PrecisionCtx {
        PrecisionCtx::with_bits(128).unwrap()
    }

    fn q() -> QParam {
        QParam::parse("0.5").unwrap()
    }

    fn brute_log_terms(s: &AWSeries, r: f64) -> Vec<f64> {
        // phi_n(-r; 1) = prod (1 + 2 q^k r + q^(2k)) at q = 1/2, in f64 logs.
        let mut out = vec![];
        let mut acc = 0.0f64;
        for (n, c) in s.coeffs().iter().enumerate() {
            let a = c.real().to_f64().abs();
            out.push(if a == 0.0 { f64::NEG_INFINITY } else { a.ln() + acc });
            let qk = 0.5f64.powi(n as i32);
            acc += (1.0 + 2.0 * qk * r + qk * qk).ln();
        }
        out
    }

    #[test]
    fn term_logs_match_product_form() {
        let c = ctx();
        let s = CoefficientFamily::parse("gauss-q", SignRule::AllPositive).unwrap().build(25, &q(), &c).unwrap();
        let r = c.real(1234.5);
        let ours = term_logs(&s, &r, 25, &c);
        let brute = brute_log_terms(&s, 1234.5);
        for (a, b) in ours.iter().zip(&brute) {
            assert!((a.to_f64() - b).abs() < 1e-9 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn maximal_term_agrees_with_full_scan() {
        let c = ctx();
        let cfg = GrowthConfig::default();
        let s = CoefficientFamily::parse("gauss-q", SignRule::AllPositive).unwrap().build(300, &q(), &c).unwrap();
        for e in [1u32, 5, 20, 60] {
            let r = c.real(10).pow(e);
            let mt = maximal_term(&s, &r, &cfg, &c).unwrap();
            assert!(mt.certified_by_tail);
            let logs = term_logs(&s, &r, 300, &c);
            let mut best = 0;
            for (i, l) in logs.iter().enumerate() {
                if *l >= logs[best] {
                    best = i;
                }
            }
            assert_eq!(mt.nu, best, "r=10^{e}");
            assert_eq!(mt.log_mu, logs[best]);
        }
    }

    #[test]
    fn short_truncation_is_reported() {
        let c = ctx();
        let cfg = GrowthConfig::default();
        let s = CoefficientFamily::parse("gauss-q", SignRule::AllPositive).unwrap().build(30, &q(), &c).unwrap();
        let err = maximal_term(&s, &c.real(1e6), &cfg, &c).unwrap_err();
        assert!(matches!(err, Error::TruncationTooShort { stored: 30 }));
    }

    #[test]
    fn polynomial_scans_everything() {
        let c = ctx();
        let cfg = GrowthConfig::default();
        let mut s = CoefficientFamily::parse("gauss-q", SignRule::AllPositive).unwrap().build(5, &q(), &c).unwrap();
        s.set_tail(None);
        let mt = maximal_term(&s, &c.real(1e30), &cfg, &c).unwrap();
        assert_eq!(mt.nu, 5);
        assert!(!mt.certified_by_tail);
    }

    #[test]
    fn sampled_modulus_matches_exact_for_positive_series() {
        let c = ctx();
        let s = CoefficientFamily::parse("stretched-exp:2", SignRule::AllPositive).unwrap().build(30, &q(), &c).unwrap();
        let r = c.real(50);
        let exact = max_modulus(&s, &r, &c).unwrap();
        assert!(!exact.sampled);
        let sampled = max_modulus_fn(&s, &r, &c).unwrap();
        let rel = c.real(&exact.value - &sampled.value).abs() / &exact.value;
        assert!(rel < 1e-12, "{rel}");
        let pi = c.pi();
        assert!(c.real(&sampled.theta - &pi).abs() < 1e-6);
    }

    #[test]
    fn constant_series_sandwich() {
        let c = ctx();
        let s = AWSeries::new(lift(&c.cone(), &c), vec![c.complex(3)], q(), None);
        let sw = mu_m_sandwich(&s, &c.real(100), &GrowthConfig::default(), &c).unwrap();
        assert!(sw.lower_ok && sw.upper_ok);
        assert_eq!(sw.mu, sw.big_m);
    }

    #[test]
    fn kn_limits() {
        let c = ctx();
        let g = Rational::from((3, 2));
        assert!(kn_constant(0, &q(), &g, &c).is_infinite());
        let k = kn_constant(30, &q(), &g, &c);
        assert!(k >= 1 && c.real(&k - 1u32) < 1e-40);
        // f64 oracle at n = 5.
        let t = (0.5f64.powi(5) + 2f64.powi(5)) / (2.0 * 5f64.powf(1.5).exp());
        let want = ((1.0 + t) / (1.0 - t)).powi(6);
        assert!((kn_constant(5, &q(), &g, &c).to_f64() - want).abs() < 1e-12 * want);
    }
}
