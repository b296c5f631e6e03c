//! Maximal term, central index, maximum modulus, q-normality and the
//! Wiman-Valiron diagnostics built on them.
//!
//! Term sizes are handled as natural logarithms throughout; a term of index
//! `n` at radius `r` has log-size
//! `ln|a_n| + n ln(2|a|) + n(n-1)/2 ln q + sum_{k<n} ln(r + |c_k|)` where
//! `c_k = (a q^k + q^-k / a)/2` are the basis roots. For the center `x0 = 1`
//! this is exactly `ln |a_n phi_n(-r; 1)|`.

mod family;
mod maximal;
mod normal;
mod order;
mod profile;
mod wv;

use std::sync::Mutex;

use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::numkit::{parse_exact, q_bracket, PrecisionCtx, QParam};

pub use family::{CoefficientFamily, FamilyTag, SignRule};
pub use maximal::{
    kn_constant, max_modulus, max_modulus_fn, maximal_term, mu_m_sandwich, term_logs, MaxModulus,
    MaximalTerm, Sandwich,
};
pub use normal::{
    comparison_seq, comparison_seq_log, decay_envelope_check, q_normal_test, tail_sum_check,
    DecayReport, DecaySide, NormalityReport, TailSum,
};
pub use order::{
    log_order_estimate, log_order_from_profile, log_type_bounds, LogOrder, LogType,
};
pub use profile::{ProfileOptions, GrowthProfile, Radius, RadiusGrid, RadiusRecord};
pub use wv::{wv_ratio, WvNormalization, WvRatio};

/// Parameters of the comparison sequences and of the tail-sum estimate.
#[derive(Debug)]
pub struct ComparisonConfig {
    delta: Rational,
    gamma: Rational,
    beta: Rational,
    omega: Rational,
    h: u32,
    m0_cache: Mutex<Option<(Rational, usize)>>,
}

impl Clone for ComparisonConfig {
    fn clone(&self) -> Self {
        Self {
            delta: self.delta.clone(),
            gamma: self.gamma.clone(),
            beta: self.beta.clone(),
            omega: self.omega.clone(),
            h: self.h,
            m0_cache: Mutex::new(self.m0_cache.lock().unwrap().clone()),
        }
    }
}

impl Default for ComparisonConfig {
    fn default() -> Self {
        Self::new(
            Rational::from((1, 2)),
            Rational::from((3, 2)),
            Rational::from(10),
            Rational::from(9),
            0,
        )
        .expect("default comparison parameters are valid")
    }
}

impl ComparisonConfig {
    pub fn new(delta: Rational, gamma: Rational, beta: Rational, omega: Rational, h: u32) -> Result<Self> {
        if delta <= 0 || delta >= 1 {
            return Err(Error::InvalidArgument(format!("delta must lie in (0,1), got {delta}")));
        }
        if gamma <= 1 {
            return Err(Error::InvalidArgument(format!("gamma must exceed 1, got {gamma}")));
        }
        if beta <= 0 {
            return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
        }
        if omega <= 0 || omega >= beta {
            return Err(Error::InvalidArgument(format!("omega must lie in (0, beta), got {omega}")));
        }
        Ok(Self { delta, gamma, beta, omega, h, m0_cache: Mutex::new(None) })
    }

    pub fn parse(delta: &str, gamma: &str, beta: &str, omega: &str, h: u32) -> Result<Self> {
        Self::new(parse_exact(delta)?, parse_exact(gamma)?, parse_exact(beta)?, parse_exact(omega)?, h)
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }
    pub fn gamma(&self) -> &Rational {
        &self.gamma
    }
    pub fn beta(&self) -> &Rational {
        &self.beta
    }
    pub fn omega(&self) -> &Rational {
        &self.omega
    }
    pub fn h(&self) -> u32 {
        self.h
    }

    /// Smallest `M0` with `2 q^(1-N) [N]_q / e^(N^gamma) < 1` for every `N >= M0`.
    pub fn m0(&self, q: &QParam, ctx: &PrecisionCtx) -> usize {
        if let Some((cq, v)) = self.m0_cache.lock().unwrap().as_ref() {
            if cq == q.exact() {
                return *v;
            }
        }
        let v = compute_m0(&self.gamma, q, ctx);
        *self.m0_cache.lock().unwrap() = Some((q.exact().clone(), v));
        v
    }
}

fn compute_m0(gamma: &Rational, q: &QParam, ctx: &PrecisionCtx) -> usize {
    let g = ctx.real(gamma);
    let lninv = q.ln_inv(ctx);
    let ln2 = ctx.real(2).ln();
    let ln_bracket_max = -(ctx.real(1) - q.value(ctx)).ln();
    let mut last_bad: Option<usize> = None;
    let mut n = 0usize;
    loop {
        let nf = ctx.real(n);
        let log_val = if n == 0 {
            None
        } else {
            Some(ctx.real(&ln2 + ctx.real(&lninv * (n as i64 - 1))) + q_bracket(n as u64, q, ctx).ln()
                - nf.clone().pow(&g))
        };
        if log_val.as_ref().is_some_and(|v| *v >= 0) {
            last_bad = Some(n);
        }
        // Past this point the exponent outgrows the q-power in value and slope.
        let slope_ok = n >= 1 && ctx.real(&g * nf.clone().pow(ctx.real(&g - 1u32))) > lninv;
        let value_ok = nf.clone().pow(&g) > ctx.real(&ln2 + ctx.real(&lninv * n as u64)) + &ln_bracket_max;
        if slope_ok && value_ok {
            break;
        }
        n += 1;
    }
    last_bad.map_or(0, |b| b + 1)
}

use rug::ops::Pow;

/// Settings shared by the growth operations.
#[derive(Clone, Debug)]
pub struct GrowthConfig {
    pub comparison: ComparisonConfig,
    /// Consecutive decreasing terms required before the scan may stop.
    pub window: usize,
    /// Exponent slack in the maximum-modulus sandwich.
    pub sandwich_eps: Rational,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        Self { comparison: ComparisonConfig::default(), window: 64, sandwich_eps: Rational::from((1, 20)) }
    }
}

impl GrowthConfig {
    pub fn with_comparison(comparison: ComparisonConfig) -> Self {
        Self { comparison, ..Self::default() }
    }
}

/// `b(N) = N^(delta - 1)`.
pub fn b_of(n: usize, delta: &Rational, ctx: &PrecisionCtx) -> Float {
    ctx.real(n).pow(ctx.real(delta) - 1u32)
}
