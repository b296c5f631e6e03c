use rug::ops::Pow;
use rug::Float;

use crate::awseries::AWSeries;
use crate::error::{Error, Result};
use crate::numkit::{q_bracket, PrecisionCtx};

use super::maximal::{maximal_term, term_logs};
use super::{b_of, ComparisonConfig, GrowthConfig};

/// `(ln alpha_n, ln rho_n)` with `ln alpha_n = -n^(1+delta)/(delta(1+delta))`
/// and `ln rho_n = n^delta / delta`.
pub fn comparison_seq_log(cfg: &ComparisonConfig, n: usize, ctx: &PrecisionCtx) -> (Float, Float) {
    let d = ctx.real(cfg.delta());
    let nf = ctx.real(n);
    let nd = ctx.real((&nf).pow(&d));
    let ln_rho = ctx.real(&nd / &d);
    let ln_alpha = -(nd * nf) / (ctx.real(&d * ctx.real(&d + 1u32)));
    (ln_alpha, ln_rho)
}

/// `(alpha_n, rho_n)`; `rho_n` is the ratio `alpha_(n-1)/alpha_n` up to the
/// concavity of `t^delta`.
pub fn comparison_seq(cfg: &ComparisonConfig, n: usize, ctx: &PrecisionCtx) -> (Float, Float) {
    let (a, r) = comparison_seq_log(cfg, n, ctx);
    (a.exp(), r.exp())
}

#[derive(Clone, Debug)]
pub struct NormalityReport {
    pub nu: usize,
    pub log_mu: Float,
    pub normal: bool,
    /// Indices whose term exceeds its comparison bound.
    pub violations: Vec<usize>,
    /// Number of stored indices compared.
    pub checked: usize,
}

fn slack(l: &Float, ctx: &PrecisionCtx) -> Float {
    ctx.tolerance(16) * (ctx.real(l.abs_ref()) + 1u32)
}

/// `ln(1 + eps_(n,N))` for `n = 0..N`, `eps_(n,N) = sum_(k=n)^(N-1) 2 q^-k / e^(N^gamma)`.
fn ln_one_plus_eps(big_n: usize, s: &AWSeries, cfg: &ComparisonConfig, ctx: &PrecisionCtx) -> Vec<Float> {
    let e = ctx.real(big_n).pow(ctx.real(cfg.gamma())).exp();
    let mut out = vec![ctx.zero(); big_n];
    let mut acc = ctx.zero();
    for n in (0..big_n).rev() {
        acc += s.q().pow(-(n as i64), ctx) * 2u32 / &e;
        out[n] = ctx.real(ctx.real(&acc + 1u32).ln());
    }
    out
}

/// Tests the normality inequalities at the single witness `N = nu(r)` for
/// every stored index.
pub fn q_normal_test(s: &AWSeries, r: &Float, cfg: &GrowthConfig, ctx: &PrecisionCtx) -> Result<NormalityReport> {
    let mt = maximal_term(s, r, cfg, ctx)?;
    let big_n = mt.nu;
    let logs = term_logs(s, r, s.truncation(), ctx);
    let cc = &cfg.comparison;
    let (la_n, lr_n) = comparison_seq_log(cc, big_n, ctx);
    let eps = ln_one_plus_eps(big_n, s, cc, ctx);
    let tol = slack(&mt.log_mu, ctx);
    let mut violations = Vec::new();
    for (n, l) in logs.iter().enumerate() {
        let (la, _) = comparison_seq_log(cc, n, ctx);
        let mut rhs = ctx.real(&mt.log_mu + &la) - &la_n + ctx.real(&lr_n * (n as i64 - big_n as i64));
        if n < big_n {
            rhs += &eps[n];
        }
        if *l > ctx.real(&rhs + &tol) {
            violations.push(n);
        }
    }
    Ok(NormalityReport { nu: big_n, log_mu: mt.log_mu, normal: violations.is_empty(), violations, checked: logs.len() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecaySide {
    Above,
    Below,
}

#[derive(Clone, Debug)]
pub struct DecayReport {
    pub nu: usize,
    pub checked: usize,
    /// `(side, k)` for each offset whose term breaks the envelope.
    pub violations: Vec<(DecaySide, usize)>,
}

impl DecayReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Gaussian envelopes around the central index:
/// above, `l_(N+k) - l_N <= -k^2 b(N+k)/2`;
/// below, `l_(N-k) - l_N <= ln(1 + 2 q^(1-N) / ((1-q) e^(N^gamma))) - k^2 b(N)/2`.
pub fn decay_envelope_check(s: &AWSeries, r: &Float, cfg: &GrowthConfig, ctx: &PrecisionCtx) -> Result<DecayReport> {
    let mt = maximal_term(s, r, cfg, ctx)?;
    let big_n = mt.nu;
    if big_n == 0 {
        return Err(Error::AsymptoticRegimeNotReached("central index is 0".into()));
    }
    let cc = &cfg.comparison;
    let logs = term_logs(s, r, s.truncation(), ctx);
    let tol = slack(&mt.log_mu, ctx);
    let mut violations = Vec::new();
    let mut checked = 0;
    for (n, l) in logs.iter().enumerate().skip(big_n + 1) {
        let k = n - big_n;
        let bound = -(b_of(n, cc.delta(), ctx) * (k * k) as u64) / 2u32;
        checked += 1;
        if ctx.real(l - &mt.log_mu) > ctx.real(&bound + &tol) {
            violations.push((DecaySide::Above, k));
        }
    }
    let qv = s.q().value(ctx);
    let lift = s.q().pow(1 - big_n as i64, ctx) * 2u32
        / (ctx.real(1u32 - &qv) * ctx.real(big_n).pow(ctx.real(cc.gamma())).exp());
    let ln_lift = (lift + 1u32).ln();
    let b_n = b_of(big_n, cc.delta(), ctx);
    for k in 1..=big_n {
        let bound = ctx.real(&ln_lift - ctx.real(&b_n * (k * k) as u64) / 2u32);
        checked += 1;
        if ctx.real(&logs[big_n - k] - &mt.log_mu) > ctx.real(&bound + &tol) {
            violations.push((DecaySide::Below, k));
        }
    }
    Ok(DecayReport { nu: big_n, checked, violations })
}

#[derive(Clone, Debug)]
pub struct TailSum {
    pub nu: usize,
    pub kappa: usize,
    /// `sum_(|k-N| >= kappa) q^(-hk) [k]^h |a_k phi_k(-r)|` over stored `k`.
    pub lhs: Float,
    /// `mu(r) q^(-hN) [N]^h b(N)^((omega-1)/2)`.
    pub scale: Float,
    pub ratio: Float,
}

/// Mass of the terms at distance at least `kappa` from the central index,
/// relative to the scale predicted for it.
pub fn tail_sum_check(s: &AWSeries, r: &Float, cfg: &GrowthConfig, ctx: &PrecisionCtx) -> Result<TailSum> {
    let mt = maximal_term(s, r, cfg, ctx)?;
    let big_n = mt.nu;
    if big_n == 0 {
        return Err(Error::AsymptoticRegimeNotReached("central index is 0".into()));
    }
    let cc = &cfg.comparison;
    let b = b_of(big_n, cc.delta(), ctx);
    let inner = ctx.real(cc.beta()) / &b * ctx.real(ctx.real(1u32) / &b).ln();
    let kappa = inner.sqrt().floor().to_f64().max(0.0) as usize;
    if kappa >= big_n {
        return Err(Error::KappaExceedsN { kappa, central: big_n });
    }
    let h = cc.h();
    let logs = term_logs(s, r, s.truncation(), ctx);
    let weight = |k: usize| -> Float {
        if h == 0 {
            return ctx.zero();
        }
        let br = q_bracket(k as u64, s.q(), ctx);
        ctx.real(&s.q().ln_inv(ctx) * (h as u64 * k as u64)) + br.ln() * h
    };
    let mut lhs = ctx.zero();
    for (k, l) in logs.iter().enumerate() {
        if k.abs_diff(big_n) >= kappa && !(h > 0 && k == 0) {
            lhs += ctx.real(l + &weight(k)).exp();
        }
    }
    let ln_scale = ctx.real(&mt.log_mu + &weight(big_n))
        + b.ln() * (ctx.real(cc.omega()) - 1u32) / 2u32;
    let scale = ln_scale.exp();
    let ratio = ctx.real(&lhs / &scale);
    Ok(TailSum { nu: big_n, kappa, lhs, scale, ratio })
}
