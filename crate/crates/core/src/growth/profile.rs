use std::io::Write;

use rayon::prelude::*;
use rug::{Complex, Float, Rational};

use crate::awseries::{rational_text, AWSeries};
use crate::error::{Error, Result};
use crate::numkit::{parse_exact, plain, sci, PrecisionCtx};

use super::maximal::{kn_constant, max_modulus, maximal_term};
use super::normal::{q_normal_test, tail_sum_check};
use super::wv::{wv_ratio, WvNormalization};
use super::GrowthConfig;

/// Radii `10^(start + i step)` for `i = 0..count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadiusGrid {
    pub start: Rational,
    pub step: Rational,
    pub count: usize,
}

#[derive(Clone, Debug)]
pub struct Radius {
    pub log10: Rational,
    pub value: Float,
}

impl Radius {
    /// `1e<k>` for integral exponents, otherwise scientific notation.
    pub fn label(&self) -> String {
        if *self.log10.denom() == 1 {
            format!("1e{}", self.log10.numer())
        } else {
            sci(&self.value, 17)
        }
    }
}

impl RadiusGrid {
    /// `log10:<start>:<step>:<count>`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 || parts[0] != "log10" {
            return Err(Error::InvalidArgument(format!(
                "radius grid {s:?} is not of the form log10:<start>:<step>:<count>"
            )));
        }
        let start = parse_exact(parts[1])?;
        let step = parse_exact(parts[2])?;
        let count: usize = parts[3]
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("grid count {:?} is not a count", parts[3])))?;
        if count == 0 {
            return Err(Error::InvalidArgument("grid count must be positive".into()));
        }
        if step <= 0 && count > 1 {
            return Err(Error::InvalidArgument("grid step must be positive".into()));
        }
        Ok(Self { start, step, count })
    }

    pub fn radii(&self, ctx: &PrecisionCtx) -> Vec<Radius> {
        let ln10 = ctx.real(10).ln();
        (0..self.count)
            .map(|i| {
                let e = Rational::from(&self.start + Rational::from(&self.step * i as u64));
                let value = (ctx.real(&e) * &ln10).exp();
                Radius { log10: e, value }
            })
            .collect()
    }

    pub fn describe(&self) -> String {
        format!("log10:{}:{}:{}", rational_text(&self.start), rational_text(&self.step), self.count)
    }
}

/// Which optional quantities to compute per radius.
#[derive(Clone, Debug)]
pub struct ProfileOptions {
    pub normality: bool,
    pub wv_order: Option<usize>,
    pub normalization: WvNormalization,
    pub tail_sum: bool,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self { normality: true, wv_order: Some(1), normalization: WvNormalization::Stated, tail_sum: true }
    }
}

#[derive(Clone, Debug)]
pub struct RadiusRecord {
    pub radius: Radius,
    pub log_mu: Option<Float>,
    pub nu: Option<usize>,
    pub log_m: Option<Float>,
    pub m_sampled: bool,
    pub kn: Option<Float>,
    pub normal: Option<bool>,
    pub wv_ratio: Option<Complex>,
    pub tail_ratio: Option<Float>,
    /// `ok`, or `;`-separated notes on the quantities that could not be formed.
    pub status: String,
}

#[derive(Clone, Debug)]
pub struct GrowthProfile {
    records: Vec<RadiusRecord>,
}

impl GrowthProfile {
    /// Evaluates every radius of the grid in parallel; records keep grid order.
    pub fn build(s: &AWSeries, grid: &RadiusGrid, cfg: &GrowthConfig, opts: &ProfileOptions, ctx: &PrecisionCtx) -> Self {
        let records = grid.radii(ctx).into_par_iter().map(|rad| record(s, rad, cfg, opts, ctx)).collect();
        Self { records }
    }

    pub fn records(&self) -> &[RadiusRecord] {
        &self.records
    }

    /// `nu` never decreases and `mu` never decreases along the grid; `mu`
    /// increases strictly once `nu >= 1`.
    pub fn check_monotone(&self) -> Result<()> {
        let mut prev: Option<(&RadiusRecord, usize, &Float)> = None;
        for rec in &self.records {
            let (Some(nu), Some(lm)) = (rec.nu, rec.log_mu.as_ref()) else { continue };
            if let Some((p, pnu, plm)) = prev {
                if nu < pnu {
                    return Err(Error::InvariantViolation(format!(
                        "nu drops from {pnu} at r = {} to {nu} at r = {}",
                        p.radius.label(),
                        rec.radius.label()
                    )));
                }
                let strict = pnu >= 1;
                if lm < plm || (strict && lm == plm) {
                    return Err(Error::InvariantViolation(format!(
                        "mu does not increase between r = {} and r = {}",
                        p.radius.label(),
                        rec.radius.label()
                    )));
                }
            }
            prev = Some((rec, nu, lm));
        }
        Ok(())
    }

    /// Fraction of radii with a normality verdict that are normal.
    pub fn normal_fraction(&self) -> Option<f64> {
        let judged: Vec<bool> = self.records.iter().filter_map(|r| r.normal).collect();
        if judged.is_empty() {
            return None;
        }
        Some(judged.iter().filter(|b| **b).count() as f64 / judged.len() as f64)
    }

    /// CSV with `#` comment lines first, then the header and one row per radius.
    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String], ctx: &PrecisionCtx) -> Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "radius", "log10_mu", "nu", "log10_M", "normal", "wv_ratio_re", "wv_ratio_im", "tail_ratio", "status",
        ])?;
        let ln10 = ctx.real(10).ln();
        let log10 = |v: &Float| plain(&ctx.real(v / &ln10), 17);
        for r in &self.records {
            let opt = |v: Option<String>| v.unwrap_or_default();
            w.write_record([
                r.radius.label(),
                opt(r.log_mu.as_ref().map(&log10)),
                opt(r.nu.map(|n| n.to_string())),
                opt(r.log_m.as_ref().map(&log10)),
                opt(r.normal.map(|b| b.to_string())),
                opt(r.wv_ratio.as_ref().map(|z| sci(z.real(), 17))),
                opt(r.wv_ratio.as_ref().map(|z| sci(z.imag(), 17))),
                opt(r.tail_ratio.as_ref().map(|t| sci(t, 17))),
                r.status.clone(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn record(s: &AWSeries, radius: Radius, cfg: &GrowthConfig, opts: &ProfileOptions, ctx: &PrecisionCtx) -> RadiusRecord {
    let r = &radius.value;
    let mut notes: Vec<String> = Vec::new();
    let mut rec = RadiusRecord {
        radius: radius.clone(),
        log_mu: None,
        nu: None,
        log_m: None,
        m_sampled: false,
        kn: None,
        normal: None,
        wv_ratio: None,
        tail_ratio: None,
        status: String::new(),
    };
    match maximal_term(s, r, cfg, ctx) {
        Ok(mt) => {
            rec.kn = Some(kn_constant(mt.nu, s.q(), cfg.comparison.gamma(), ctx));
            rec.log_mu = Some(mt.log_mu);
            rec.nu = Some(mt.nu);
        }
        Err(e) => {
            rec.status = e.to_string();
            return rec;
        }
    }
    match max_modulus(s, r, ctx) {
        Ok(m) => {
            rec.m_sampled = m.sampled;
            rec.log_m = Some(m.value.ln());
        }
        Err(e) => notes.push(format!("M: {e}")),
    }
    if opts.normality {
        match q_normal_test(s, r, cfg, ctx) {
            Ok(n) => rec.normal = Some(n.normal),
            Err(e) => notes.push(format!("normal: {e}")),
        }
    }
    if let Some(n) = opts.wv_order {
        match wv_ratio(s, n, r, cfg, opts.normalization, ctx) {
            Ok(w) => rec.wv_ratio = Some(w.value),
            Err(e) => notes.push(format!("wv: {e}")),
        }
    }
    if opts.tail_sum {
        match tail_sum_check(s, r, cfg, ctx) {
            Ok(t) => rec.tail_ratio = Some(t.ratio),
            Err(e) => notes.push(format!("tail: {e}")),
        }
    }
    rec.status = if notes.is_empty() { "ok".into() } else { notes.join("; ") };
    rec
}
