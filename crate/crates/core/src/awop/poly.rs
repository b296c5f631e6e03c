use rug::{Complex, Float, Integer};

use crate::error::{Error, Result};
use crate::numkit::{parse_exact, PrecisionCtx, QParam};
use crate::points::UnitizedPoint;

use super::PointEvaluator;

/// Polynomial in the power basis, `b_0 + b_1 x + ... + b_d x^d`.
///
/// Trailing zero coefficients are dropped, so the stored leading coefficient
/// is nonzero unless the polynomial is the zero constant.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyRep {
    coeffs: Vec<Complex>,
}

impl PolyRep {
    pub fn new(mut coeffs: Vec<Complex>, ctx: &PrecisionCtx) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(ctx.czero());
        }
        Self { coeffs }
    }

    pub fn zero(ctx: &PrecisionCtx) -> Self {
        Self { coeffs: vec![ctx.czero()] }
    }

    pub fn constant(c: Complex, ctx: &PrecisionCtx) -> Self {
        Self::new(vec![ctx.complex(c)], ctx)
    }

    /// `x^d`.
    pub fn monomial(d: usize, ctx: &PrecisionCtx) -> Self {
        let mut c = vec![ctx.czero(); d + 1];
        c[d] = ctx.cone();
        Self { coeffs: c }
    }

    /// Real coefficients from exact decimal strings.
    pub fn from_decimal_strs<S: AsRef<str>>(coeffs: &[S], ctx: &PrecisionCtx) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Parse("polynomial needs at least one coefficient".into()));
        }
        let v = coeffs
            .iter()
            .map(|s| parse_exact(s.as_ref()).map(|r| ctx.complex(&r)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(v, ctx))
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn leading(&self) -> &Complex {
        self.coeffs.last().unwrap()
    }

    pub fn eval(&self, x: &Complex, ctx: &PrecisionCtx) -> Complex {
        let mut acc = ctx.czero();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn add(&self, other: &Self, ctx: &PrecisionCtx) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n)
            .map(|i| {
                let mut s = ctx.czero();
                if let Some(a) = self.coeffs.get(i) {
                    s += a;
                }
                if let Some(b) = other.coeffs.get(i) {
                    s += b;
                }
                s
            })
            .collect();
        Self::new(v, ctx)
    }

    pub fn scale(&self, c: &Complex, ctx: &PrecisionCtx) -> Self {
        Self::new(self.coeffs.iter().map(|a| ctx.complex(a * c)).collect(), ctx)
    }

    pub fn mul(&self, other: &Self, ctx: &PrecisionCtx) -> Self {
        let mut v = vec![ctx.czero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                v[i + j] += ctx.complex(a * b);
            }
        }
        Self::new(v, ctx)
    }

    /// Multiplies by the linear factor `x - root`.
    pub fn mul_linear(&self, root: &Complex, ctx: &PrecisionCtx) -> Self {
        let d = self.coeffs.len();
        let mut v = vec![ctx.czero(); d + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            v[i + 1] += a;
            v[i] -= ctx.complex(a * root);
        }
        Self::new(v, ctx)
    }
}

impl PointEvaluator for PolyRep {
    fn eval(&self, p: &UnitizedPoint, ctx: &PrecisionCtx) -> Complex {
        PolyRep::eval(self, p.x(), ctx)
    }
}

/// Symmetric Laurent polynomial `sum_m A_m (z^m + z^-m)`, stored as `A_0..A_d`
/// with the convention that `A_0` multiplies `z^0` once.
fn to_laurent(p: &PolyRep, ctx: &PrecisionCtx) -> Vec<Complex> {
    let d = p.degree();
    let mut a = vec![ctx.czero(); d + 1];
    for (k, c) in p.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        // x^k = 2^-k sum_i C(k,i) z^(k-2i); keep m = k - 2i >= 0 once.
        for i in 0..=k / 2 {
            let m = k - 2 * i;
            let mut w = ctx.real(Integer::from(Integer::binomial_u(k as u32, i as u32)));
            w >>= k as i32;
            a[m] += ctx.complex(c * &w);
        }
    }
    a
}

fn from_laurent(mut a: Vec<Complex>, ctx: &PrecisionCtx) -> PolyRep {
    let d = a.len().saturating_sub(1);
    let mut b = vec![ctx.czero(); d + 1];
    for k in (0..=d).rev() {
        let mut top = ctx.complex(&a[k]);
        top <<= k as i32;
        if top.is_zero() {
            continue;
        }
        for i in 0..=k / 2 {
            let m = k - 2 * i;
            let mut w = ctx.real(Integer::from(Integer::binomial_u(k as u32, i as u32)));
            w >>= k as i32;
            a[m] -= ctx.complex(&top * &w);
        }
        b[k] = top;
    }
    PolyRep::new(b, ctx)
}

/// Exact image of a polynomial under the divided-difference operator.
pub fn dq_poly(p: &PolyRep, q: &QParam, ctx: &PrecisionCtx) -> PolyRep {
    let d = p.degree();
    if d == 0 {
        return PolyRep::zero(ctx);
    }
    let a = to_laurent(p, ctx);
    // Numerator p(q^(1/2) z) - p(q^(-1/2) z): coefficient of z^m is
    // A_m (q^(m/2) - q^(-m/2)), antisymmetric in m.
    let b: Vec<Complex> = (0..=d)
        .map(|m| {
            let f: Float = q.half_pow(m as i64, ctx) - q.half_pow(-(m as i64), ctx);
            ctx.complex(&a[m] * &f)
        })
        .collect();
    // Solve Q (z - 1/z) = B for symmetric Q of degree d-1:
    // B_m = Q_(m-1) - Q_(m+1).
    let mut quo = vec![ctx.czero(); d + 2];
    for m in (1..=d).rev() {
        let next = quo[m + 1].clone();
        quo[m - 1] = ctx.complex(&b[m] + &next);
    }
    quo.truncate(d);
    let s: Float = q.half_pow(1, ctx) - q.half_pow(-1, ctx);
    let scale = ctx.real(2) / s;
    for c in quo.iter_mut() {
        *c *= &scale;
    }
    from_laurent(quo, ctx)
}
