//! Precision context, the exact q parameter and elementary q-objects.

use std::fmt;
use std::str::FromStr;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Assign, Complex, Float, Integer, Rational};

use crate::error::{Error, Result};

pub type BigReal = Float;
pub type BigComplex = Complex;

/// Working precision descriptor. Every value built through a context uses
/// `bits + guard_bits` of mantissa.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrecisionCtx {
    bits: u32,
    guard_bits: u32,
}

impl PrecisionCtx {
    pub const MIN_BITS: u32 = 64;
    pub const DEFAULT_GUARD_BITS: u32 = 64;

    pub fn new(bits: u32, guard_bits: u32) -> Result<Self> {
        if bits < Self::MIN_BITS {
            return Err(Error::InvalidPrecision(format!(
                "precision must be at least {} bits, got {bits}",
                Self::MIN_BITS
            )));
        }
        if bits.checked_add(guard_bits).is_none_or(|p| p > 1 << 24) {
            return Err(Error::InvalidPrecision(format!("precision {bits}+{guard_bits} too large")));
        }
        Ok(Self { bits, guard_bits })
    }

    pub fn with_bits(bits: u32) -> Result<Self> {
        Self::new(bits, Self::DEFAULT_GUARD_BITS)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn guard_bits(&self) -> u32 {
        self.guard_bits
    }

    /// Mantissa bits used for every intermediate value.
    pub fn prec(&self) -> u32 {
        self.bits + self.guard_bits
    }

    pub fn real<T>(&self, v: T) -> Float
    where
        Float: Assign<T>,
    {
        Float::with_val(self.prec(), v)
    }

    pub fn complex<T>(&self, v: T) -> Complex
    where
        Complex: Assign<T>,
    {
        Complex::with_val(self.prec(), v)
    }

    pub fn zero(&self) -> Float {
        self.real(0)
    }

    pub fn czero(&self) -> Complex {
        self.complex(0)
    }

    pub fn cone(&self) -> Complex {
        self.complex(1)
    }

    pub fn pi(&self) -> Float {
        self.real(Constant::Pi)
    }

    /// `2^(-bits + slack)`.
    pub fn tolerance(&self, slack: i32) -> Float {
        let mut t = self.real(1);
        t <<= slack - self.bits as i32;
        t
    }

    pub fn pow2(&self, e: i32) -> Float {
        let mut t = self.real(1);
        t <<= e;
        t
    }
}

/// Parses a decimal (`-1.25e-3`), integer or rational (`3/7`) string exactly.
pub fn parse_exact(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if t.contains('/') {
        return Rational::from_str(t.trim_start_matches('+'))
            .map_err(|e| Error::Parse(format!("bad rational {t:?}: {e}")));
    }
    let (neg, body) = match t.as_bytes()[0] {
        b'-' => (true, &t[1..]),
        b'+' => (false, &t[1..]),
        _ => (false, t),
    };
    let (mant, exp) = match body.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = body[i + 1..]
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in {t:?}")))?;
            (&body[..i], e)
        }
        None => (body, 0),
    };
    let (ip, fp) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    if ip.is_empty() && fp.is_empty()
        || !ip.bytes().all(|b| b.is_ascii_digit())
        || !fp.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(Error::Parse(format!("bad decimal {t:?}")));
    }
    if exp.abs() > 100_000 {
        return Err(Error::Parse(format!("exponent out of range in {t:?}")));
    }
    let digits = format!("{ip}{fp}");
    let mut num = Integer::from_str(if digits.is_empty() { "0" } else { &digits })
        .map_err(|e| Error::Parse(format!("bad decimal {t:?}: {e}")))?;
    if neg {
        num = -num;
    }
    let e10 = exp - fp.len() as i64;
    let scale = Integer::from(10).pow(e10.unsigned_abs() as u32);
    Ok(if e10 >= 0 {
        Rational::from(num * scale)
    } else {
        Rational::from((num, scale))
    })
}

/// Parses a decimal or rational string to a real at context precision,
/// correctly rounded. Unlike [`parse_exact`] there is no exponent limit, so
/// values far below the double range (`1e-3000000`) are read directly.
pub fn parse_real(s: &str, ctx: &PrecisionCtx) -> Result<Float> {
    let t = s.trim();
    if t.contains('/') {
        return Ok(ctx.real(&parse_exact(t)?));
    }
    let body = t.strip_prefix(['+', '-']).unwrap_or(t);
    let (mant, exp) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    let exp_ok = exp.is_none_or(|e| {
        let d = e.strip_prefix(['+', '-']).unwrap_or(e);
        !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit())
    });
    if (ip.is_empty() && fp.is_empty())
        || !ip.bytes().all(|b| b.is_ascii_digit())
        || !fp.bytes().all(|b| b.is_ascii_digit())
        || !exp_ok
    {
        return Err(Error::Parse(format!("bad decimal {t:?}")));
    }
    let parsed = Float::parse(t).map_err(|e| Error::Parse(format!("bad decimal {t:?}: {e}")))?;
    Ok(Float::with_val(ctx.prec(), parsed))
}

/// The fixed real parameter `0 < q < 1`, kept exactly and rendered per context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QParam {
    exact: Rational,
    text: String,
}

impl QParam {
    pub fn parse(s: &str) -> Result<Self> {
        let exact = parse_exact(s).map_err(|e| Error::InvalidQ(e.to_string()))?;
        Self::build(exact, s.trim().to_string())
    }

    pub fn from_rational(r: Rational) -> Result<Self> {
        let text = r.to_string();
        Self::build(r, text)
    }

    fn build(exact: Rational, text: String) -> Result<Self> {
        if exact <= 0 || exact >= 1 {
            return Err(Error::InvalidQ(format!("q must satisfy 0 < q < 1, got {text}")));
        }
        Ok(Self { exact, text })
    }

    pub fn exact(&self) -> &Rational {
        &self.exact
    }

    /// The string the parameter was created from.
    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn value(&self, ctx: &PrecisionCtx) -> Float {
        ctx.real(&self.exact)
    }

    pub fn sqrt(&self, ctx: &PrecisionCtx) -> Float {
        self.value(ctx).sqrt()
    }

    pub fn ln(&self, ctx: &PrecisionCtx) -> Float {
        self.value(ctx).ln()
    }

    /// `ln(1/q) > 0`.
    pub fn ln_inv(&self, ctx: &PrecisionCtx) -> Float {
        -self.ln(ctx)
    }

    /// `q^k`.
    pub fn pow(&self, k: i64, ctx: &PrecisionCtx) -> Float {
        let q = self.value(ctx);
        match i32::try_from(k) {
            Ok(k) => q.pow(k),
            Err(_) => q.pow(ctx.real(k)),
        }
    }

    /// `q^(m/2)`. Even exponents go through the exact integer power.
    pub fn half_pow(&self, m: i64, ctx: &PrecisionCtx) -> Float {
        if m % 2 == 0 {
            self.pow(m / 2, ctx)
        } else {
            let s = self.sqrt(ctx);
            match i32::try_from(m) {
                Ok(m) => s.pow(m),
                Err(_) => s.pow(ctx.real(m)),
            }
        }
    }

    /// `ln q^(m/2) = (m/2) ln q`, exact up to one rounding of `ln q`.
    pub fn ln_half_pow(&self, m: i64, ctx: &PrecisionCtx) -> Float {
        let mut l = self.ln(ctx) * m;
        l >>= 1;
        l
    }
}

impl fmt::Display for QParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Length of an `(a;q)_n` product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PochOrder {
    Finite(usize),
    Infinite,
}

#[derive(Clone, Debug)]
pub struct Pochhammer {
    pub value: Complex,
    /// Number of factors multiplied. For infinite products this is the
    /// first index `k` whose term `|a q^k|` fell below `2^-(bits+guard)`.
    pub factors: usize,
}

/// `(a;q)_n = prod_{k<n} (1 - a q^k)`; infinite products stop on the term-size rule.
pub fn q_pochhammer(a: &Complex, q: &QParam, n: PochOrder, ctx: &PrecisionCtx) -> Pochhammer {
    let qv = q.value(ctx);
    let mut term = ctx.complex(a);
    let mut value = ctx.cone();
    let cutoff = ctx.pow2(-(ctx.prec() as i32));
    let mut k = 0usize;
    loop {
        match n {
            PochOrder::Finite(m) if k >= m => break,
            PochOrder::Infinite if Float::with_val(ctx.prec(), term.abs_ref()) < cutoff => break,
            _ => {}
        }
        value *= ctx.cone() - &term;
        term *= &qv;
        k += 1;
    }
    Pochhammer { value, factors: k }
}

/// Real-argument `(a;q)_n` for finite `n`.
pub fn q_pochhammer_real(a: &Float, q: &QParam, n: usize, ctx: &PrecisionCtx) -> Float {
    let qv = q.value(ctx);
    let mut term = ctx.real(a);
    let mut value = ctx.real(1);
    for _ in 0..n {
        value *= ctx.real(1) - &term;
        term *= &qv;
    }
    value
}

/// `(q;q)_n`.
pub fn qq_pochhammer(n: usize, q: &QParam, ctx: &PrecisionCtx) -> Float {
    q_pochhammer_real(&q.value(ctx), q, n, ctx)
}

/// `(q;q)_0, ..., (q;q)_n`.
pub fn qq_pochhammer_table(n: usize, q: &QParam, ctx: &PrecisionCtx) -> Vec<Float> {
    let qv = q.value(ctx);
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = ctx.real(1);
    let mut qk = qv.clone();
    out.push(acc.clone());
    for _ in 0..n {
        acc *= ctx.real(1) - &qk;
        qk *= &qv;
        out.push(acc.clone());
    }
    out
}

/// `[n]_q = (1 - q^n)/(1 - q)`.
pub fn q_bracket(n: u64, q: &QParam, ctx: &PrecisionCtx) -> Float {
    let qv = q.value(ctx);
    let num = ctx.real(1) - q.pow(n as i64, ctx);
    num / (ctx.real(1) - qv)
}

/// `[n]_q! = [1]_q [2]_q ... [n]_q`.
pub fn q_factorial(n: u64, q: &QParam, ctx: &PrecisionCtx) -> Float {
    let mut acc = ctx.real(1);
    for k in 1..=n {
        acc *= q_bracket(k, q, ctx);
    }
    acc
}

/// `[n]_q! = (q;q)_n / (1 - q)^n`.
pub fn q_factorial_via_pochhammer(n: u64, q: &QParam, ctx: &PrecisionCtx) -> Float {
    let one_minus_q = ctx.real(1) - q.value(ctx);
    qq_pochhammer(n as usize, q, ctx) / one_minus_q.pow(n as u32)
}

/// Gaussian binomial `[n, k]_q`. The evaluation order depends only on
/// `{k, n-k}`, so the result is symmetric bit for bit.
pub fn q_binomial(n: u64, k: u64, q: &QParam, ctx: &PrecisionCtx) -> Result<Float> {
    if k > n {
        return Err(Error::InvalidArgument(format!("q_binomial: k = {k} > n = {n}")));
    }
    let lo = k.min(n - k) as usize;
    let hi = k.max(n - k) as usize;
    let den = qq_pochhammer(lo, q, ctx) * qq_pochhammer(hi, q, ctx);
    Ok(qq_pochhammer(n as usize, q, ctx) / den)
}

/// Gaussian binomials `[n, k]_q` for `k = 0..=n` from a `(q;q)` table.
pub fn q_binomial_row(n: usize, qq: &[Float]) -> Vec<Float> {
    (0..=n)
        .map(|k| {
            let lo = k.min(n - k);
            let hi = k.max(n - k);
            Float::with_val(qq[n].prec(), &qq[n] / Float::with_val(qq[n].prec(), &qq[lo] * &qq[hi]))
        })
        .collect()
}

/// `|x|` for a complex value as a real at context precision.
pub fn cabs(z: &Complex, ctx: &PrecisionCtx) -> Float {
    ctx.real(z.abs_ref())
}

/// `|a - b| / max(|b|, floor)`.
pub fn rel_diff(a: &Complex, b: &Complex, floor: &Float, ctx: &PrecisionCtx) -> Float {
    let d = cabs(&ctx.complex(a - b), ctx);
    let mut s = cabs(b, ctx);
    if s < *floor {
        s.assign(floor);
    }
    d / s
}

/// True when `|a - b| <= tol * max(|b|, 1)`.
pub fn close_rel(a: &Complex, b: &Complex, tol: &Float, ctx: &PrecisionCtx) -> bool {
    rel_diff(a, b, &ctx.real(1), ctx) <= *tol
}

/// Real part and imaginary part as decimal strings with an explicit sign and
/// enough digits to round-trip at the value's precision.
pub fn complex_to_strings(z: &Complex) -> (String, String) {
    (real_to_string(z.real()), real_to_string(z.imag()))
}

pub fn real_to_string(x: &Float) -> String {
    let s = if x.is_zero() { "0".to_string() } else { x.to_string_radix(10, None) };
    if s.starts_with('-') {
        s
    } else {
        format!("+{s}")
    }
}

/// Scientific notation with `digits` significant digits, e.g. `-1.125e0`.
pub fn sci(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    if x.is_infinite() {
        return if x.is_sign_negative() { "-inf".into() } else { "inf".into() };
    }
    if x.is_nan() {
        return "nan".into();
    }
    let s = x.to_string_radix(10, Some(digits.max(1)));
    let (mant, exp) = match s.find('e') {
        Some(i) => (s[..i].to_string(), s[i + 1..].parse::<i64>().unwrap_or(0)),
        None => (s.clone(), 0),
    };
    let neg = mant.starts_with('-');
    let m = mant.trim_start_matches('-');
    let (ip, fp) = match m.find('.') {
        Some(i) => (&m[..i], &m[i + 1..]),
        None => (m, ""),
    };
    let all: String = format!("{ip}{fp}");
    let lead = all.find(|c: char| c != '0').unwrap_or(0);
    let digits_str = &all[lead..];
    let e = exp + ip.len() as i64 - 1 - lead as i64;
    let frac = digits_str[1..].trim_end_matches('0');
    let sign = if neg { "-" } else { "" };
    if frac.is_empty() {
        format!("{sign}{}e{e}", &digits_str[..1])
    } else {
        format!("{sign}{}.{frac}e{e}", &digits_str[..1])
    }
}

/// Plain decimal with up to `digits` significant digits and trailing zeros trimmed.
pub fn plain(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let s = sci(x, digits);
    let (mant, exp) = s.split_once('e').unwrap();
    let exp: i64 = exp.parse().unwrap();
    if !(-6..=digits as i64).contains(&exp) {
        return s;
    }
    let neg = mant.starts_with('-');
    let m: String = mant.trim_start_matches('-').chars().filter(|c| *c != '.').collect();
    let out = if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), m)
    } else {
        let point = exp as usize + 1;
        if m.len() <= point {
            format!("{}{}", m, "0".repeat(point - m.len()))
        } else {
            format!("{}.{}", &m[..point], &m[point..])
        }
    };
    if neg {
        format!("-{out}")
    } else {
        out
    }
}
