use rug::ops::Pow;
use rug::Complex;

use crate::awop::PolyRep;
use crate::error::{Error, Result};
use crate::numkit::{PrecisionCtx, QParam};
use crate::points::UnitizedPoint;

/// Default degree limit for explicit power-basis expansions.
pub const PHI_EXPAND_MAX: usize = 512;

/// `phi_k(x; x0) = prod_{j<k} (1 - 2 a x q^j + a^2 q^(2j))`, `a` the parameter of the center.
pub fn phi_eval(k: usize, x: &Complex, center: &UnitizedPoint, q: &QParam, ctx: &PrecisionCtx) -> Complex {
    let a = center.z();
    let qv = q.value(ctx);
    let two_ax = ctx.complex(a * x) * 2u32;
    let a2 = ctx.complex(a.square_ref());
    let mut acc = ctx.cone();
    let mut qj = ctx.real(1);
    let mut q2j = ctx.real(1);
    for _ in 0..k {
        let mut factor = ctx.complex(&a2 * &q2j);
        factor += 1u32;
        factor -= ctx.complex(&two_ax * &qj);
        acc *= factor;
        qj *= &qv;
        q2j = ctx.real(qj.square_ref());
    }
    acc
}

/// Root-product form `(-2a)^k q^(k(k-1)/2) prod_{j<k} (x - (a q^j + q^-j / a)/2)`.
pub fn phi_eval_root_form(
    k: usize,
    x: &Complex,
    center: &UnitizedPoint,
    q: &QParam,
    ctx: &PrecisionCtx,
) -> Complex {
    let a = center.z();
    let mut acc = ctx.complex(a * -2i32).pow(k as u32);
    acc *= q.pow((k * k.saturating_sub(1) / 2) as i64, ctx);
    for j in 0..k {
        acc *= ctx.complex(x - node_root(j, a, q, ctx));
    }
    acc
}

/// Zero `x0^(2j) = (a q^j + q^-j / a)/2` of `phi_(j+1)`.
pub fn node_root(j: usize, a: &Complex, q: &QParam, ctx: &PrecisionCtx) -> Complex {
    let qj = q.pow(j as i64, ctx);
    let mut r = ctx.complex(a * &qj);
    r += ctx.complex(a.recip_ref()) / qj;
    r >>= 1;
    r
}

/// Power-basis coefficients of `phi_k(.; x0)` built from its roots.
pub fn phi_power_expand(k: usize, center: &UnitizedPoint, q: &QParam, ctx: &PrecisionCtx) -> Result<PolyRep> {
    phi_power_expand_with_max(k, center, q, PHI_EXPAND_MAX, ctx)
}

pub fn phi_power_expand_with_max(
    k: usize,
    center: &UnitizedPoint,
    q: &QParam,
    max: usize,
    ctx: &PrecisionCtx,
) -> Result<PolyRep> {
    if k > max {
        return Err(Error::InvalidArgument(format!("basis degree {k} exceeds limit {max}")));
    }
    let a = center.z();
    let mut lead = ctx.complex(a * -2i32).pow(k as u32);
    lead *= q.pow((k * k.saturating_sub(1) / 2) as i64, ctx);
    let mut p = PolyRep::constant(lead, ctx);
    for j in 0..k {
        p = p.mul_linear(&node_root(j, a, q, ctx), ctx);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::close_rel;
    use crate::points::lift;

    fn ctx() -> PrecisionCtx {
        PrecisionCtx::with_bits(256).unwrap()
    }

    #[test]
    fn examples() {
        let c = ctx();
        let q = QParam::parse("0.5").unwrap();
        let one = lift(&c.complex(1), &c);
        assert_eq!(phi_eval(0, &c.complex(3), &one, &q, &c), c.cone());
        assert_eq!(phi_eval(1, &c.czero(), &one, &q, &c), c.complex(2));
        // k = 2 on the negative axis: 4 q (r + 1)(r + (q + 1/q)/2).
        let r = c.real(7);
        let v = phi_eval(2, &c.complex(-&r), &one, &q, &c);
        let expect = c.real(4u32) * q.value(&c) * c.real(&r + 1u32) * (c.real(&r + 1.25));
        assert!(close_rel(&v, &c.complex(expect), &c.tolerance(8), &c));
        assert!(v.real().is_sign_positive());
    }

    #[test]
    fn product_and_root_forms_agree() {
        let c = ctx();
        let q = QParam::parse("0.3").unwrap();
        let center = lift(&c.complex((1.4, 0.6)), &c);
        for k in 0..25 {
            for x in [c.complex((0.3, -2.0)), c.complex(-40), c.complex((5, 5))] {
                let a = phi_eval(k, &x, &center, &q, &c);
                let b = phi_eval_root_form(k, &x, &center, &q, &c);
                assert!(close_rel(&a, &b, &c.tolerance(24), &c), "k={k}");
            }
        }
    }

    #[test]
    fn expansion_shape() {
        let c = ctx();
        let q = QParam::parse("0.5").unwrap();
        let one = lift(&c.complex(1), &c);
        assert_eq!(phi_power_expand(0, &one, &q, &c).unwrap().coeffs(), &[c.cone()]);
        let p1 = phi_power_expand(1, &one, &q, &c).unwrap();
        assert_eq!(p1.coeffs(), &[c.complex(2), c.complex(-2)]);
        let center = lift(&c.complex(2.5), &c);
        for k in [3usize, 9] {
            let p = phi_power_expand(k, &center, &q, &c).unwrap();
            assert_eq!(p.degree(), k);
            let lead = c.complex(center.z() * -2i32).pow(k as u32) * q.pow((k * (k - 1) / 2) as i64, &c);
            assert!(close_rel(p.leading(), &lead, &c.tolerance(8), &c));
            let x = c.complex((0.7, 0.2));
            assert!(close_rel(&p.eval(&x, &c), &phi_eval(k, &x, &center, &q, &c), &c.tolerance(24), &c));
        }
        assert!(phi_power_expand_with_max(5, &one, &q, 4, &c).is_err());
    }
}
