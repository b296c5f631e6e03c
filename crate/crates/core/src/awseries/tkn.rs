use rug::ops::Pow;
use rug::Float;

use crate::numkit::{q_pochhammer, qq_pochhammer_table, PochOrder, PrecisionCtx, QParam};

/// `T(k, n)` for `0 <= n <= k <= kmax`: the coefficients of `x^k` in the
/// basis `phi_n(x; 1)`.
#[derive(Clone, Debug)]
pub struct TknTable {
    rows: Vec<Vec<Float>>,
}

impl TknTable {
    /// Fills the table from `T(k, 0) = 1`, `T(0, n) = 0` by
    /// `T(k,n) = (q^n + q^-n)/2 T(k-1,n) - q^(1-n)/2 T(k-1,n-1)`.
    pub fn build(kmax: usize, q: &QParam, ctx: &PrecisionCtx) -> Self {
        let cosh: Vec<Float> = (0..=kmax as i64)
            .map(|n| {
                let mut c = q.pow(n, ctx) + q.pow(-n, ctx);
                c >>= 1;
                c
            })
            .collect();
        let lower: Vec<Float> = (0..=kmax as i64)
            .map(|n| {
                let mut c = q.pow(1 - n, ctx);
                c >>= 1;
                c
            })
            .collect();
        let mut rows: Vec<Vec<Float>> = Vec::with_capacity(kmax + 1);
        rows.push(vec![ctx.real(1)]);
        for k in 1..=kmax {
            let prev = &rows[k - 1];
            let mut row = Vec::with_capacity(k + 1);
            row.push(ctx.real(1));
            for n in 1..=k {
                let mut v = if n < k { ctx.real(&cosh[n] * &prev[n]) } else { ctx.zero() };
                v -= ctx.real(&lower[n] * &prev[n - 1]);
                row.push(v);
            }
            rows.push(row);
        }
        Self { rows }
    }

    pub fn kmax(&self) -> usize {
        self.rows.len() - 1
    }

    /// `T(k, n)`; zero when `n > k`.
    pub fn get(&self, k: usize, n: usize) -> Option<&Float> {
        self.rows.get(k).and_then(|r| r.get(n))
    }

    pub fn value(&self, k: usize, n: usize, ctx: &PrecisionCtx) -> Float {
        match self.get(k, n) {
            Some(v) => v.clone(),
            None if k <= self.kmax() => ctx.zero(),
            None => panic!("T({k}, {n}) outside table of size {}", self.kmax()),
        }
    }

    pub fn row(&self, k: usize) -> &[Float] {
        &self.rows[k]
    }
}

/// Explicit sum for `T(k, n)`:
/// `q^n [1/(q;q)_n^2 + sum_{j=1}^n (-1)^j q^(j(j-1)/2) (1 + q^j)
///  / ((q;q)_(n-j) (q;q)_(n+j)) ((q^j + q^-j)/2)^k]`.
///
/// The alternating sum cancels heavily when `n` is close to `k`, so it is
/// re-evaluated with extra bits until the measured cancellation leaves the
/// requested precision intact.
pub fn tkn_closed(k: usize, n: usize, q: &QParam, ctx: &PrecisionCtx) -> Float {
    let mut extra = 0u32;
    loop {
        let work = PrecisionCtx::new(ctx.bits() + extra, ctx.guard_bits()).expect("valid precision");
        let (sum, max_term) = closed_sum(k, n, q, &work);
        if sum.is_zero() {
            if extra > 4 * ctx.prec() {
                return ctx.zero();
            }
            extra = 2 * extra + 64;
            continue;
        }
        let lost = max_term.get_exp().unwrap_or(0) - sum.get_exp().unwrap_or(0);
        if lost.max(0) as u32 + 8 <= work.guard_bits() + extra {
            return ctx.real(sum * q.pow(n as i64, &work));
        }
        extra = lost.max(0) as u32 + 64;
    }
}

/// The bracketed sum and the largest magnitude among its terms.
fn closed_sum(k: usize, n: usize, q: &QParam, ctx: &PrecisionCtx) -> (Float, Float) {
    let qq = qq_pochhammer_table(2 * n, q, ctx);
    let mut sum = ctx.real(1) / ctx.real(qq[n].square_ref());
    let mut max_term = ctx.real(sum.abs_ref());
    for j in 1..=n {
        let ji = j as i64;
        let mut c = q.pow(ji, ctx) + q.pow(-ji, ctx);
        c >>= 1;
        let mut t = q.pow(ji * (ji - 1) / 2, ctx);
        t *= ctx.real(1) + q.pow(ji, ctx);
        t /= ctx.real(&qq[n - j] * &qq[n + j]);
        t *= c.pow(k as u32);
        if t > max_term {
            max_term = t.clone();
        }
        if j % 2 == 1 {
            sum -= t;
        } else {
            sum += t;
        }
    }
    (sum, max_term)
}

/// `K = 2 (-q;q)_inf / (q;q)_inf`, the constant in `(-1)^n T(k,n) <= K q^(n(n+1)/2) / q^(nk)`.
pub fn tkn_bound_constant(q: &QParam, ctx: &PrecisionCtx) -> Float {
    let qv = ctx.complex(q.value(ctx));
    let num = q_pochhammer(&ctx.complex(-&qv), q, PochOrder::Infinite, ctx).value;
    let den = q_pochhammer(&qv, q, PochOrder::Infinite, ctx).value;
    ctx.real(num.real() / den.real()) * 2u32
}

/// Right-hand side `K q^(n(n+1)/2 - nk)` of the bound.
pub fn tkn_bound(k: usize, n: usize, big_k: &Float, q: &QParam, ctx: &PrecisionCtx) -> Float {
    let (k, n) = (k as i64, n as i64);
    ctx.real(big_k * q.pow(n * (n + 1) / 2 - n * k, ctx))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionCtx {
        PrecisionCtx::with_bits(256).unwrap()
    }

    #[test]
    fn recursion_examples() {
        let c = ctx();
        let q = QParam::parse("0.5").unwrap();
        let t = TknTable::build(2, &q, &c);
        assert_eq!(t.value(1, 1, &c), -0.5);
        assert_eq!(t.value(2, 1, &c), -1.125);
        assert_eq!(t.value(2, 2, &c), 0.5);
        assert_eq!(t.value(1, 2, &c), 0);
        for k in 0..=2 {
            assert_eq!(t.value(k, 0, &c), 1);
        }
    }

    #[test]
    fn t11_is_independent_of_q() {
        let c = ctx();
        for qs in ["0.1", "0.77", "1/3"] {
            let q = QParam::parse(qs).unwrap();
            assert_eq!(TknTable::build(1, &q, &c).value(1, 1, &c), -0.5);
        }
    }

    #[test]
    fn closed_form_examples() {
        let c = ctx();
        let q = QParam::parse("0.5").unwrap();
        let tol = c.tolerance(32);
        let t = TknTable::build(5, &q, &c);
        for (k, n) in [(1, 1), (2, 2), (5, 2), (2, 1), (5, 5)] {
            let closed = tkn_closed(k, n, &q, &c);
            let table = t.value(k, n, &c);
            let rel = Float::with_val(c.prec(), &closed - &table).abs() / table.abs();
            assert!(rel <= tol, "({k},{n})");
        }
    }

    #[test]
    fn bound_constant_at_half() {
        // 2 (-1/2;1/2)_inf / (1/2;1/2)_inf from a 50-digit independent evaluation.
        let c = ctx();
        let q = QParam::parse("0.5").unwrap();
        let k = tkn_bound_constant(&q, &c);
        let frozen = c.real(Float::parse("16.511975871556500131088281698864546253054003233576").unwrap());
        assert!(Float::with_val(c.prec(), &k - &frozen).abs() < 1e-36);
    }
}
