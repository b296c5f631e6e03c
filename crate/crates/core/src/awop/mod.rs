//! The divided-difference operator `D_q`, the averaging operator `A_q`, the
//! one-sided shift `eta_q`, iterated differences and the Leibniz sum.

mod poly;

pub use poly::{dq_poly, PolyRep};

use rug::ops::Pow;
use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::numkit::{q_binomial_row, qq_pochhammer_table, PrecisionCtx, QParam};
use crate::points::{shift, ShiftIndex, UnitizedPoint};

/// Something that can be evaluated at a point given by its `z` parameter.
///
/// Implementations must be deterministic per `(point, ctx)`.
pub trait PointEvaluator: Sync {
    fn eval(&self, p: &UnitizedPoint, ctx: &PrecisionCtx) -> Complex;

    /// Whether the function is known to be entire.
    fn is_entire_hint(&self) -> bool {
        true
    }
}

impl<T: PointEvaluator + ?Sized> PointEvaluator for &T {
    fn eval(&self, p: &UnitizedPoint, ctx: &PrecisionCtx) -> Complex {
        (**self).eval(p, ctx)
    }

    fn is_entire_hint(&self) -> bool {
        (**self).is_entire_hint()
    }
}

/// Closure-backed evaluator.
pub struct FnEvaluator<F> {
    f: F,
    entire: bool,
}

impl<F> FnEvaluator<F>
where
    F: Fn(&UnitizedPoint, &PrecisionCtx) -> Complex + Sync,
{
    pub fn new(f: F) -> Self {
        Self { f, entire: true }
    }

    pub fn non_entire(f: F) -> Self {
        Self { f, entire: false }
    }
}

impl<F> PointEvaluator for FnEvaluator<F>
where
    F: Fn(&UnitizedPoint, &PrecisionCtx) -> Complex + Sync,
{
    fn eval(&self, p: &UnitizedPoint, ctx: &PrecisionCtx) -> Complex {
        (self.f)(p, ctx)
    }

    fn is_entire_hint(&self) -> bool {
        self.entire
    }
}

/// Direction of the one-sided shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `x -> x^`, `z -> q^(1/2) z`.
    Hat,
    /// `x -> x-check`, `z -> q^(-1/2) z`.
    Check,
}

impl Direction {
    pub fn steps(self) -> i64 {
        match self {
            Direction::Hat => 1,
            Direction::Check => -1,
        }
    }
}

/// Denominator `(q^(1/2) - q^(-1/2)) (z - 1/z) / 2` of the difference quotient at `p`.
fn dq_denominator(p: &UnitizedPoint, q: &QParam, ctx: &PrecisionCtx) -> Result<Complex> {
    let gap = p.branch_gap(ctx);
    let threshold = ctx.pow2(-(ctx.bits() as i32) / 2);
    if gap < threshold {
        return Err(Error::AtBranchPoint(crate::numkit::sci(&gap, 6)));
    }
    let zinv = ctx.complex(p.z().recip_ref());
    let mut d = ctx.complex(p.z() - &zinv);
    let s: Float = q.half_pow(1, ctx) - q.half_pow(-1, ctx);
    d *= &s;
    d >>= 1;
    Ok(d)
}

/// `(D_q f)(p)`.
pub fn apply_dq(
    f: &dyn PointEvaluator,
    p: &UnitizedPoint,
    q: &QParam,
    ctx: &PrecisionCtx,
) -> Result<Complex> {
    let den = dq_denominator(p, q, ctx)?;
    let up = f.eval(&shift(p, ShiftIndex(1), q, ctx), ctx);
    let down = f.eval(&shift(p, ShiftIndex(-1), q, ctx), ctx);
    Ok(ctx.complex(up - down) / den)
}

/// `(A_q f)(p)`.
pub fn apply_aq(f: &dyn PointEvaluator, p: &UnitizedPoint, q: &QParam, ctx: &PrecisionCtx) -> Complex {
    let up = f.eval(&shift(p, ShiftIndex(1), q, ctx), ctx);
    let down = f.eval(&shift(p, ShiftIndex(-1), q, ctx), ctx);
    let mut s = ctx.complex(up + down);
    s >>= 1;
    s
}

/// `f` at the shifted point.
pub fn apply_eta(
    f: &dyn PointEvaluator,
    p: &UnitizedPoint,
    q: &QParam,
    direction: Direction,
    ctx: &PrecisionCtx,
) -> Complex {
    f.eval(&shift(p, ShiftIndex(direction.steps()), q, ctx), ctx)
}

/// Where the closed-form iterated difference is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CooperForm {
    /// `(D^n f)(x0^(n))` from values at `x0^(2j)`, `j = 0..=n`.
    AtShiftedCenter,
    /// `(D^n f)(x0)` from values at `x0^(2j-n)`.
    AtCenter,
}

/// `prod_{i<len} (1 - c q^i)`, or `None` when a factor is numerically zero.
fn poch_checked(c: &Complex, q: &Float, len: usize, ctx: &PrecisionCtx) -> Option<Complex> {
    let threshold = ctx.pow2(-(ctx.bits() as i32) / 2);
    let mut term = ctx.complex(c);
    let mut acc = ctx.cone();
    for _ in 0..len {
        let factor = ctx.complex(1u32 - &term);
        if ctx.real(factor.abs_ref()) < threshold {
            return None;
        }
        acc *= factor;
        term *= q;
    }
    Some(acc)
}

/// Weights `w_j` and half-step offsets `s_j` such that the iterated
/// difference equals `sum_j w_j f(shift(p0, s_j))`.
pub fn cooper_weights(
    a: &Complex,
    n: usize,
    q: &QParam,
    form: CooperForm,
    ctx: &PrecisionCtx,
) -> Result<Vec<(Complex, i64)>> {
    let qv = q.value(ctx);
    let ni = n as i64;
    let a2 = ctx.complex(a.square_ref());
    let qq = qq_pochhammer_table(n, q, ctx);
    let binom = q_binomial_row(n, &qq);
    let half_exp = match form {
        CooperForm::AtShiftedCenter => ni * (3 + ni) / 2,
        CooperForm::AtCenter => ni * (3 - ni) / 2,
    };
    let one_minus_q = ctx.real(1u32 - &qv);
    let mut pref = ctx.complex(a * -2i32);
    pref = pref.pow(n as u32);
    pref *= q.half_pow(half_exp, ctx);
    pref /= one_minus_q.pow(n as u32);
    let mut out = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let ji = j as i64;
        let (c1, c2, offset) = match form {
            CooperForm::AtShiftedCenter => (ji, 2 * ji + 1, 2 * ji),
            CooperForm::AtCenter => (ji - ni, 2 * ji + 1 - ni, 2 * ji - ni),
        };
        let start1 = ctx.complex(&a2 * q.pow(c1, ctx));
        let start2 = ctx.complex(&a2 * q.pow(c2, ctx));
        let p1 = poch_checked(&start1, &qv, j, ctx).ok_or(Error::SingularWeight { index: j })?;
        let p2 = poch_checked(&start2, &qv, n - j, ctx).ok_or(Error::SingularWeight { index: j })?;
        let mut w = ctx.complex(&pref * &binom[j]);
        w *= q.pow(ji * (ji - 1) / 2, ctx);
        if j % 2 == 1 {
            w = -w;
        }
        w /= p1 * p2;
        out.push((w, offset));
    }
    Ok(out)
}

/// Iterated difference `D_q^n f` through the closed finite sum over shifted nodes.
pub fn dq_iterated(
    f: &dyn PointEvaluator,
    p0: &UnitizedPoint,
    n: usize,
    q: &QParam,
    form: CooperForm,
    ctx: &PrecisionCtx,
) -> Result<Complex> {
    if n == 0 {
        return Ok(f.eval(p0, ctx));
    }
    let weights = cooper_weights(p0.z(), n, q, form, ctx)?;
    let mut acc = ctx.czero();
    for (w, off) in weights {
        let v = f.eval(&shift(p0, ShiftIndex(off), q, ctx), ctx);
        acc += w * v;
    }
    Ok(acc)
}

/// `D_q^n f` at `p` by applying the two-point quotient `n` times.
///
/// Values at the `n + 1` nodes `shift(p, n - 2i)` are differenced level by
/// level, which is the nested definition with shared subexpressions.
pub fn dq_nested(
    f: &dyn PointEvaluator,
    p: &UnitizedPoint,
    n: usize,
    q: &QParam,
    ctx: &PrecisionCtx,
) -> Result<Complex> {
    let ni = n as i64;
    // level[i] holds the (k)-fold difference at half-step offset -(n-k) + 2i.
    let mut level: Vec<Complex> =
        (0..=ni).map(|i| f.eval(&shift(p, ShiftIndex(-ni + 2 * i), q, ctx), ctx)).collect();
    for k in 1..=ni {
        let span = ni - k;
        let mut next = Vec::with_capacity(level.len() - 1);
        for i in 0..=span {
            let at = shift(p, ShiftIndex(-span + 2 * i), q, ctx);
            let den = dq_denominator(&at, q, ctx)?;
            let i = i as usize;
            next.push(ctx.complex(&level[i + 1] - &level[i]) / den);
        }
        level = next;
    }
    Ok(level.pop().unwrap())
}

/// Default order limit for [`leibniz_rhs`].
pub const LEIBNIZ_MAX_ORDER: usize = 8;

/// Right-hand side of the Leibniz rule for `D_q^n (f g)` at `p`.
pub fn leibniz_rhs(
    f: &dyn PointEvaluator,
    g: &dyn PointEvaluator,
    p: &UnitizedPoint,
    n: usize,
    q: &QParam,
    ctx: &PrecisionCtx,
) -> Result<Complex> {
    leibniz_rhs_with_max(f, g, p, n, q, LEIBNIZ_MAX_ORDER, ctx)
}

pub fn leibniz_rhs_with_max(
    f: &dyn PointEvaluator,
    g: &dyn PointEvaluator,
    p: &UnitizedPoint,
    n: usize,
    q: &QParam,
    max_order: usize,
    ctx: &PrecisionCtx,
) -> Result<Complex> {
    if n > max_order {
        return Err(Error::InvalidArgument(format!("Leibniz order {n} exceeds limit {max_order}")));
    }
    let qq = qq_pochhammer_table(n, q, ctx);
    let binom = q_binomial_row(n, &qq);
    let mut acc = ctx.czero();
    for k in 0..=n {
        let ki = k as i64;
        let ni = n as i64;
        let left = dq_nested(f, &shift(p, ShiftIndex(ki), q, ctx), n - k, q, ctx)?;
        let right = dq_nested(g, &shift(p, ShiftIndex(-(ni - ki)), q, ctx), k, q, ctx)?;
        let w = ctx.real(&binom[k] * q.pow(-ki * (ni - ki), ctx).sqrt());
        acc += ctx.complex(left * right) * w;
    }
    Ok(acc)
}
