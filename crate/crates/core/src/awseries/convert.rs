use rayon::prelude::*;
use rug::{Complex, Float};

use crate::awop::{PointEvaluator, PolyRep};
use crate::error::{Error, Result};
use crate::numkit::{PrecisionCtx, QParam};
use crate::points::{lift, shift, ShiftIndex, UnitizedPoint};

use super::tkn::{tkn_bound_constant, TknTable};
use super::{AWSeries, TailModel};

/// Power-basis series `sum_k b_k x^k`, optionally with a decay law for `|b_k|`.
#[derive(Clone, Debug)]
pub struct PowerSeries {
    pub coeffs: Vec<Complex>,
    pub tail: Option<TailModel>,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<Complex>, tail: Option<TailModel>) -> Self {
        assert!(!coeffs.is_empty(), "power series needs at least one coefficient");
        Self { coeffs, tail }
    }

    pub fn from_poly(p: &PolyRep) -> Self {
        Self { coeffs: p.coeffs().to_vec(), tail: None }
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }
}

#[derive(Clone, Debug)]
pub struct PowerToAw {
    pub series: AWSeries,
    /// Per-`n` bound on `|sum_{k > K} b_k T(k, n)|`, when requested.
    pub truncation_bound: Option<Vec<Float>>,
}

/// Basis coefficients about `x0 = 1`: `a_n = sum_{k=n}^K b_k T(k, n)`.
pub fn power_to_aw(ps: &PowerSeries, q: &QParam, want_bound: bool, ctx: &PrecisionCtx) -> Result<PowerToAw> {
    let table = TknTable::build(ps.truncation(), q, ctx);
    power_to_aw_with_table(ps, q, &table, want_bound, ctx)
}

pub fn power_to_aw_with_table(
    ps: &PowerSeries,
    q: &QParam,
    table: &TknTable,
    want_bound: bool,
    ctx: &PrecisionCtx,
) -> Result<PowerToAw> {
    let big_k = ps.truncation();
    if table.kmax() < big_k {
        return Err(Error::InvalidArgument(format!(
            "T table of size {} is too small for truncation {big_k}",
            table.kmax()
        )));
    }
    if want_bound && ps.tail.is_none() {
        return Err(Error::MissingTailModel);
    }
    let coeffs: Vec<Complex> = (0..=big_k)
        .into_par_iter()
        .map(|n| {
            let mut acc = ctx.czero();
            for k in n..=big_k {
                if ps.coeffs[k].is_zero() {
                    continue;
                }
                acc += ctx.complex(&ps.coeffs[k] * table.get(k, n).unwrap());
            }
            acc
        })
        .collect();
    let truncation_bound = if want_bound {
        let tail = ps.tail.as_ref().unwrap();
        Some(truncation_tail(tail, big_k, q, ctx))
    } else {
        None
    };
    let series = AWSeries::new(lift(&ctx.complex(1), ctx), coeffs, q.clone(), None);
    Ok(PowerToAw { series, truncation_bound })
}

/// `sum_{k > K} |b_k| K_T q^(n(n+1)/2 - nk)` from the decay law of `|b_k|`.
fn truncation_tail(tail: &TailModel, big_k: usize, q: &QParam, ctx: &PrecisionCtx) -> Vec<Float> {
    let kt = tkn_bound_constant(q, ctx).ln();
    let lnq = q.ln(ctx);
    (0..=big_k)
        .map(|n| {
            let ni = n as i64;
            let mut total = ctx.zero();
            let mut k = big_k + 1;
            loop {
                let ki = k as i64;
                let e = ctx.real(&lnq * (ni * (ni + 1) / 2 - ni * ki));
                let l = tail.log_bound(k, q, ctx) + &kt + e;
                total += l.exp();
                // Once consecutive terms shrink by at least half, the rest sums
                // to less than the last term.
                let step = tail.log_step_bound(k, q, ctx) - ctx.real(&lnq * ni);
                if step < -ctx.real(2).ln() {
                    total *= 2u32;
                    break;
                }
                k += 1;
                if k > big_k + 100_000 {
                    total = ctx.real(rug::float::Special::Infinity);
                    break;
                }
            }
            total
        })
        .collect()
}

/// Power coefficients `b_m = sum_k a_k [x^m] phi_k(x; x0)`.
pub fn aw_to_power(s: &AWSeries, max: usize, ctx: &PrecisionCtx) -> Result<PowerSeries> {
    let big_k = s.truncation();
    if big_k > max {
        return Err(Error::InvalidArgument(format!("truncation {big_k} exceeds limit {max}")));
    }
    let a = s.a();
    let qv = s.q().value(ctx);
    let a2 = ctx.complex(a.square_ref());
    let mut out = vec![ctx.czero(); big_k + 1];
    let mut phi = PolyRep::constant(ctx.cone(), ctx);
    let mut qk = ctx.real(1);
    for (k, ak) in s.coeffs().iter().enumerate() {
        if !ak.is_zero() {
            for (m, c) in phi.coeffs().iter().enumerate() {
                out[m] += ctx.complex(ak * c);
            }
        }
        if k < big_k {
            // 1 - 2 a q^k x + a^2 q^(2k)
            let mut c0 = ctx.complex(&a2 * ctx.real(qk.square_ref()));
            c0 += 1u32;
            let c1 = ctx.complex(a * &qk) * -2i32;
            phi = phi.mul(&PolyRep::new(vec![c0, c1], ctx), ctx);
            qk *= &qv;
        }
    }
    Ok(PowerSeries::new(out, None))
}

#[derive(Clone, Debug)]
pub struct Expansion {
    pub series: AWSeries,
    /// `sum_j |w_(n,j) f_j|` for each `n`, the size of the cancelling sum.
    pub scales: Vec<Float>,
}

/// Basis coefficients of `f` about `center` from its values at the nodes `x0^(2j)`:
/// `a_n = q^n sum_j (-1)^j q^(j(j-1)/2) f(x0^(2j))
///        / ((q;q)_j (q;q)_(n-j) (q^j a^2;q)_j (q^(2j+1) a^2;q)_(n-j))`.
///
/// Each weight is assembled as a sum of logarithms and exponentiated once.
pub fn expand_from_evaluator(
    f: &dyn PointEvaluator,
    center: &UnitizedPoint,
    nmax: usize,
    q: &QParam,
    ctx: &PrecisionCtx,
) -> Result<Expansion> {
    let a = center.z();
    let a2 = ctx.complex(a.square_ref());
    let lnq = q.ln(ctx);
    let threshold = ctx.pow2(-(ctx.bits() as i32) / 2);

    // s[m] = sum_{i=1}^m ln(1 - q^i), lam[m] = sum_{i=1}^m Log(1 - q^i a^2).
    let mut s = Vec::with_capacity(nmax + 1);
    let mut lam = Vec::with_capacity(2 * nmax + 1);
    s.push(ctx.zero());
    lam.push(ctx.czero());
    let qv = q.value(ctx);
    let mut qi = qv.clone();
    let mut singular_at: Option<usize> = None;
    for i in 1..=2 * nmax {
        if i <= nmax {
            let v = ctx.real(1u32 - &qi).ln();
            let prev = s.last().unwrap().clone();
            s.push(prev + v);
        }
        let factor = ctx.complex(1u32 - ctx.complex(&a2 * &qi));
        if ctx.real(factor.abs_ref()) < threshold {
            singular_at.get_or_insert(i);
            lam.push(ctx.czero());
        } else {
            let prev = lam.last().unwrap().clone();
            lam.push(prev + factor.ln());
        }
        qi *= &qv;
    }
    if let Some(i) = singular_at {
        return Err(Error::SingularWeight { index: i });
    }

    let values: Vec<Complex> = (0..=nmax as i64)
        .into_par_iter()
        .map(|j| f.eval(&shift(center, ShiftIndex(2 * j), q, ctx), ctx))
        .collect();

    let rows: Vec<(Complex, Float)> = (0..=nmax)
        .into_par_iter()
        .map(|n| {
            let mut acc = ctx.czero();
            let mut scale = ctx.zero();
            for j in 0..=n {
                if values[j].is_zero() {
                    continue;
                }
                let ji = j as i64;
                let mut log_w = ctx.complex(ctx.real(&lnq * (n as i64 + ji * (ji - 1) / 2)));
                log_w -= &s[j];
                log_w -= &s[n - j];
                if j >= 1 {
                    log_w -= &lam[2 * j - 1];
                    log_w += &lam[j - 1];
                }
                log_w -= &lam[n + j];
                log_w += &lam[2 * j];
                let mut term = log_w.exp() * &values[j];
                if j % 2 == 1 {
                    term = -term;
                }
                scale += ctx.real(term.abs_ref());
                acc += term;
            }
            (acc, scale)
        })
        .collect();
    let (coeffs, scales): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    Ok(Expansion { series: AWSeries::new(center.clone(), coeffs, q.clone(), None), scales })
}
