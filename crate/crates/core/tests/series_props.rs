use awcalc::awop::{apply_dq, dq_nested, PolyRep};
use awcalc::awseries::{
    aw_to_power, dq_series, eval_series, expand_from_evaluator, power_to_aw, tkn_bound, tkn_bound_constant,
    tkn_closed, PowerSeries, TknTable,
};
use awcalc::numkit::{cabs, q_factorial, rel_diff};
use awcalc::{lift, shift, PrecisionCtx, QParam, ShiftIndex};
use proptest::prelude::*;
use rug::ops::Pow;
use rug::Complex;

fn ctx() -> PrecisionCtx {
    PrecisionCtx::with_bits(256).unwrap()
}

fn unit_rel(a: &Complex, b: &Complex, ctx: &PrecisionCtx) -> rug::Float {
    let floor = cabs(b, ctx).max(&ctx.real(1));
    rel_diff(a, b, &floor, ctx)
}

fn poly_strategy(max_len: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..=max_len)
}

fn poly(c: &[(f64, f64)], ctx: &PrecisionCtx) -> PolyRep {
    PolyRep::new(c.iter().map(|&v| ctx.complex(v)).collect(), ctx)
}

#[test]
fn tkn_obeys_gaussian_bound() {
    let c = ctx();
    for qs in ["0.3", "0.5", "0.8"] {
        let q = QParam::parse(qs).unwrap();
        let table = TknTable::build(30, &q, &c);
        let big_k = tkn_bound_constant(&q, &c);
        for k in 0..=30 {
            for n in 0..=k {
                let t = table.value(k, n, &c);
                let signed = if n % 2 == 1 { -t.clone() } else { t.clone() };
                assert!(signed >= 0, "q = {qs}: sign of T({k},{n})");
                assert!(signed <= tkn_bound(k, n, &big_k, &q, &c), "q = {qs}: T({k},{n}) = {t}");
            }
        }
    }
}

#[test]
fn tkn_table_matches_closed_form() {
    let c = ctx();
    let q = QParam::parse("0.5").unwrap();
    let table = TknTable::build(24, &q, &c);
    for k in 0..=24 {
        for n in 0..=k {
            let a = table.value(k, n, &c);
            let b = tkn_closed(k, n, &q, &c);
            let err = c.real(&a - &b).abs() / c.real(b.abs_ref()).max(&c.real(1));
            assert!(err <= c.tolerance(16), "T({k},{n}): {a} vs {b}");
        }
    }
}

#[test]
fn nested_difference_recovers_coefficients() {
    let c = ctx();
    let q = QParam::parse("0.5").unwrap();
    let one = lift(&c.cone(), &c);
    for d in 0..=6usize {
        let mono = PolyRep::monomial(d, &c);
        let a = power_to_aw(&PowerSeries::from_poly(&mono), &q, false, &c).unwrap().series;
        for n in 0..=d {
            let v = dq_nested(&mono, &shift(&one, ShiftIndex(n as i64), &q, &c), n, &q, &c).unwrap();
            let mut den = c.real(-2).pow(n as u32) * q_factorial(n as u64, &q, &c);
            den *= q.half_pow((n * n.saturating_sub(1) / 2) as i64, &c);
            let got = v / den;
            assert!(unit_rel(&got, &a.coeffs()[n], &c) <= c.tolerance(32), "x^{d}, n = {n}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn conversion_paths_agree(f in poly_strategy(13)) {
        let c = ctx();
        let q = QParam::parse("0.5").unwrap();
        let p = poly(&f, &c);
        let d = p.degree();
        let one = lift(&c.cone(), &c);
        let a = power_to_aw(&PowerSeries::from_poly(&p), &q, false, &c).unwrap().series;
        let b = expand_from_evaluator(&p, &one, d, &q, &c).unwrap().series;
        for n in 0..=d {
            prop_assert!(unit_rel(&b.coeffs()[n], &a.coeffs()[n], &c) <= c.tolerance(40), "n = {}", n);
        }
    }

    #[test]
    fn power_round_trip(f in poly_strategy(16), num in 10u32..95) {
        let c = ctx();
        let q = QParam::parse(&format!("0.{num}")).unwrap();
        let p = poly(&f, &c);
        let a = power_to_aw(&PowerSeries::from_poly(&p), &q, false, &c).unwrap().series;
        let back = aw_to_power(&a, 64, &c).unwrap();
        // Small q makes the basis coefficients huge; the sum back cancels down to O(1).
        let mut floor = c.real(1);
        for an in a.coeffs() {
            floor = floor.max(&cabs(an, &c));
        }
        for (m, want) in p.coeffs().iter().enumerate() {
            prop_assert!(rel_diff(&back.coeffs[m], want, &floor, &c) <= c.tolerance(40), "m = {}", m);
        }
    }

    #[test]
    fn termwise_dq_matches_pointwise(f in poly_strategy(13), r in 0.0f64..4.0, t in 0.0f64..std::f64::consts::TAU) {
        let c = ctx();
        let q = QParam::parse("0.5").unwrap();
        let p = poly(&f, &c);
        let s = power_to_aw(&PowerSeries::from_poly(&p), &q, false, &c).unwrap().series;
        let pt = lift(&c.complex((r * t.cos(), r * t.sin())), &c);
        prop_assume!(pt.branch_gap(&c) > 1e-6);
        let termwise = eval_series(&dq_series(&s, &c), pt.x(), &c).value;
        let pointwise = apply_dq(&s, &pt, &q, &c).unwrap();
        prop_assert!(unit_rel(&termwise, &pointwise, &c) <= c.tolerance(40));
    }
}
