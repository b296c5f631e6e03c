//! Linear equations `a_n D_q^n y + ... + a_1 D_q y + a_0 y = 0` with
//! polynomial coefficients: substitution residuals, Newton polygons and the
//! central-index growth they predict.

mod polygon;

use std::path::Path;

use num_rational::Ratio;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::awop::{dq_poly, PolyRep};
use crate::awseries::{dq_series, eval_series, AWSeries};
use crate::error::{Error, Result};
use crate::growth::{log_order_estimate, log_order_from_profile, GrowthProfile};
use crate::numkit::{PrecisionCtx, QParam};
use crate::points::{lift, UnitizedPoint};

pub use polygon::{brute_force_slopes, generators, newton_polygon, NewtonPolygon};

#[derive(Clone, Debug)]
pub struct AWDiffEq {
    coeffs: Vec<PolyRep>,
    q: QParam,
}

impl AWDiffEq {
    /// `coeffs[k]` multiplies `D_q^k y`.
    pub fn new(coeffs: Vec<PolyRep>, q: QParam) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidArgument("equation needs order at least 1".into()));
        }
        if coeffs.last().is_some_and(PolyRep::is_zero) {
            return Err(Error::InvalidArgument("leading coefficient polynomial is zero".into()));
        }
        Ok(Self { coeffs, q })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[PolyRep] {
        &self.coeffs
    }

    pub fn q(&self) -> &QParam {
        &self.q
    }
}

/// On-disk equation: `coefficients[k]` holds the power-basis coefficients of
/// `a_k`, constant term first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationFile {
    pub q: String,
    pub coefficients: Vec<Vec<String>>,
}

impl EquationFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("equation file: {e}")))
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_equation(&self, ctx: &PrecisionCtx) -> Result<AWDiffEq> {
        let q = QParam::parse(&self.q)?;
        let coeffs = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if c.is_empty() {
                    return Ok(PolyRep::zero(ctx));
                }
                PolyRep::from_decimal_strs(c, ctx).map_err(|e| Error::Parse(format!("coefficient a_{k}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        AWDiffEq::new(coeffs, q)
    }
}

/// Function substituted into an equation.
#[derive(Clone, Copy, Debug)]
pub enum Operand<'a> {
    Series(&'a AWSeries),
    Poly(&'a PolyRep),
}

/// `sum_k a_k(x) (D_q^k y)(x)` and the matching scale `sum_k |a_k(x)| |D_q^k y(x)|`.
pub fn residual_with_scale(
    eq: &AWDiffEq,
    y: Operand<'_>,
    points: &[UnitizedPoint],
    ctx: &PrecisionCtx,
) -> Vec<(Complex, Float)> {
    let evals: Vec<Box<dyn Fn(&Complex) -> Complex + '_>> = match y {
        Operand::Series(s) => {
            let mut ds = vec![s.clone()];
            for _ in 0..eq.order() {
                let next = dq_series(ds.last().unwrap(), ctx);
                ds.push(next);
            }
            ds.into_iter()
                .map(|d| Box::new(move |x: &Complex| eval_series(&d, x, ctx).value) as Box<dyn Fn(&Complex) -> Complex>)
                .collect()
        }
        Operand::Poly(p) => {
            let mut ds = vec![p.clone()];
            for _ in 0..eq.order() {
                let next = dq_poly(ds.last().unwrap(), &eq.q, ctx);
                ds.push(next);
            }
            ds.into_iter()
                .map(|d| Box::new(move |x: &Complex| d.eval(x, ctx)) as Box<dyn Fn(&Complex) -> Complex>)
                .collect()
        }
    };
    points
        .iter()
        .map(|p| {
            let mut sum = ctx.czero();
            let mut scale = ctx.zero();
            for (a, d) in eq.coeffs.iter().zip(&evals) {
                let t = ctx.complex(a.eval(p.x(), ctx) * d(p.x()));
                scale += ctx.real(t.abs_ref());
                sum += t;
            }
            (sum, scale)
        })
        .collect()
}

pub fn residual(eq: &AWDiffEq, y: Operand<'_>, points: &[UnitizedPoint], ctx: &PrecisionCtx) -> Vec<Complex> {
    residual_with_scale(eq, y, points, ctx).into_iter().map(|(r, _)| r).collect()
}

/// `(chi / ln q^-1) ln r`.
pub fn predicted_nu(eq: &AWDiffEq, r: &Float, chi: &Ratio<i64>, ctx: &PrecisionCtx) -> Result<Float> {
    let poly = newton_polygon(eq);
    if !poly.has_positive_slope() {
        return Err(Error::NoPositiveSlope);
    }
    if !poly.contains_slope(chi) {
        return Err(Error::InvalidSlope(format!("{chi} is not a positive edge slope of the polygon")));
    }
    Ok(predicted_nu_raw(chi, r, eq.q(), ctx))
}

fn predicted_nu_raw(chi: &Ratio<i64>, r: &Float, q: &QParam, ctx: &PrecisionCtx) -> Float {
    let c = ctx.real(*chi.numer()) / ctx.real(*chi.denom());
    c / q.ln_inv(ctx) * ctx.real(r.ln_ref())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    ContradictsTheorem,
    PolynomialSolution,
    /// Neither band matched nor a contradiction found.
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Consistent => "CONSISTENT",
            Verdict::ContradictsTheorem => "CONTRADICTS_THEOREM",
            Verdict::PolynomialSolution => "POLYNOMIAL_SOLUTION",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// Relative band for `nu` against the prediction at the top radii.
pub const NU_BAND: f64 = 0.20;
/// Log-order threshold below which a transcendental solution is flagged.
pub const SIGMA_FLOOR: f64 = 1.8;

#[derive(Clone, Debug)]
pub struct CertificateOptions {
    /// Skip the substitution check and take `s` as a solution.
    pub assume_solution: bool,
    /// Use only radii marked normal when comparing with the prediction.
    pub normal_mask: bool,
    /// Points for the substitution check; a default set is used when empty.
    pub points: Vec<Complex>,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        Self { assume_solution: false, normal_mask: false, points: Vec::new() }
    }
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub verdict: Verdict,
    pub slopes: Vec<Ratio<i64>>,
    pub matched_slope: Option<Ratio<i64>>,
    /// Largest `|nu / predicted - 1|` for the best slope at the top radii.
    pub max_deviation: Option<f64>,
    pub sigma_coeff: Option<Float>,
    pub sigma_profile: Option<Float>,
    pub max_residual: Option<Float>,
}

fn default_points(ctx: &PrecisionCtx) -> Vec<Complex> {
    [(0.3, 0.2), (-1.7, 0.0), (2.5, 0.0), (0.0, 0.9), (-0.4, -1.1)]
        .iter()
        .map(|&(re, im)| ctx.complex((re, im)))
        .collect()
}

/// Compares a solution's growth profile with the Newton-polygon prediction.
pub fn growth_certificate(
    eq: &AWDiffEq,
    s: &AWSeries,
    profile: &GrowthProfile,
    opts: &CertificateOptions,
    ctx: &PrecisionCtx,
) -> Result<Certificate> {
    let mut cert = Certificate {
        verdict: Verdict::Inconclusive,
        slopes: newton_polygon(eq).edge_slopes,
        matched_slope: None,
        max_deviation: None,
        sigma_coeff: None,
        sigma_profile: None,
        max_residual: None,
    };
    if !opts.assume_solution {
        let pts = if opts.points.is_empty() { default_points(ctx) } else { opts.points.clone() };
        let pts: Vec<UnitizedPoint> = pts.iter().map(|x| lift(x, ctx)).collect();
        let tol = ctx.pow2(-((ctx.bits() / 2) as i32));
        let mut worst = ctx.zero();
        for (r, scale) in residual_with_scale(eq, Operand::Series(s), &pts, ctx) {
            let rel = ctx.real(r.abs_ref()) / scale.max(&ctx.real(1));
            if rel > worst {
                worst = rel;
            }
        }
        if worst > tol {
            return Err(Error::NotASolution(format!("relative residual {} exceeds {}", worst.to_f64(), tol.to_f64())));
        }
        cert.max_residual = Some(worst);
    }
    if s.is_polynomial() {
        cert.verdict = Verdict::PolynomialSolution;
        return Ok(cert);
    }
    let sigma_coeff = log_order_estimate(s, ctx)?.sigma;
    let contradicts = sigma_coeff < SIGMA_FLOOR;
    cert.sigma_coeff = Some(sigma_coeff);
    if contradicts {
        cert.verdict = Verdict::ContradictsTheorem;
        return Ok(cert);
    }
    cert.sigma_profile = log_order_from_profile(profile, ctx).ok();
    let recs: Vec<_> = profile
        .records()
        .iter()
        .filter(|r| r.nu.is_some() && (!opts.normal_mask || r.normal == Some(true)))
        .collect();
    if recs.is_empty() {
        return Ok(cert);
    }
    let top = &recs[recs.len() - recs.len().div_ceil(10)..];
    let mut best: Option<(Ratio<i64>, f64)> = None;
    for chi in &cert.slopes {
        let mut dev = 0f64;
        for rec in top {
            let pred = predicted_nu_raw(chi, &rec.radius.value, eq.q(), ctx);
            let d = (rec.nu.unwrap() as f64 / pred.to_f64() - 1.0).abs();
            dev = dev.max(d);
        }
        if best.as_ref().is_none_or(|(_, b)| dev < *b) {
            best = Some((*chi, dev));
        }
    }
    if let Some((chi, dev)) = best {
        cert.max_deviation = Some(dev);
        let order_ok = cert.sigma_profile.as_ref().is_some_and(|s| *s >= SIGMA_FLOOR);
        if dev <= NU_BAND && order_ok {
            cert.matched_slope = Some(chi);
            cert.verdict = Verdict::Consistent;
        }
    }
    Ok(cert)
}
