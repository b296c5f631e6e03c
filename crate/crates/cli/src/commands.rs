use std::path::PathBuf;

use awcalc::awdeq::{
    growth_certificate, newton_polygon, predicted_nu, CertificateOptions, EquationFile, NewtonPolygon,
};
use awcalc::awop::{FnEvaluator, PolyRep};
use awcalc::awseries::{
    eval_series, expand_from_evaluator, power_to_aw, AWSeries, NumRepr, PowerSeries, SeriesFile, TailModel,
    TailRepr, TknTable,
};
use awcalc::growth::{
    tail_sum_check, wv_ratio, CoefficientFamily, GrowthProfile, ProfileOptions, RadiusRecord, SignRule,
    WvNormalization,
};
use awcalc::numkit::{cabs, plain, sci};
use awcalc::{Error, PrecisionCtx, Result};
use clap::{ArgGroup, Args};
use num_rational::Ratio;
use rayon::prelude::*;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::config::{emit, to_json, write_comments, Format, Provenance, RunConfig};

/// Failure tagged with the library module it came from.
pub struct CmdError {
    pub module: &'static str,
    pub err: Error,
}

pub type CmdResult<T> = std::result::Result<T, CmdError>;

pub trait InModule<T> {
    fn in_module(self, module: &'static str) -> CmdResult<T>;
}

impl<T> InModule<T> for Result<T> {
    fn in_module(self, module: &'static str) -> CmdResult<T> {
        self.map_err(|err| CmdError { module, err })
    }
}

/// Digits needed to round-trip a value at the working precision.
fn digits(ctx: &PrecisionCtx) -> usize {
    (ctx.bits() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1
}

fn csv_bytes(prov: &Provenance, extra: &[String], header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_comments(&mut buf, prov)?;
    for line in extra {
        std::io::Write::write_all(&mut buf, format!("# {line}\n").as_bytes())?;
    }
    let mut w = csv::Writer::from_writer(buf);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").required(true).args(["family", "poly", "power_file"])))]
pub struct ExpandArgs {
    /// `monomial:<d>`, `stretched-exp:<gamma>`, `gauss-q`, `q-power:<c>` or `custom:<path>`.
    #[arg(long)]
    pub family: Option<String>,
    /// Power-basis coefficients, constant term first, comma separated.
    #[arg(long)]
    pub poly: Option<String>,
    /// JSON file with `coefficients` in the power basis and an optional `tail_model`.
    #[arg(long = "power-file")]
    pub power_file: Option<PathBuf>,
    #[arg(long, default_value = "all-positive")]
    pub sign: String,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct PowerFile {
    coefficients: Vec<NumRepr>,
    #[serde(default)]
    tail_model: Option<TailRepr>,
}

#[derive(Serialize)]
struct ExpandReport {
    config: Provenance,
    coefficients: usize,
    max_abs_coefficient: String,
    max_abs_index: usize,
    round_trip_residual: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncation_bound: Option<String>,
}

fn probe_points(ctx: &PrecisionCtx) -> Vec<Complex> {
    [(0.3, 0.2), (-1.7, 0.0), (2.5, 0.0), (0.0, 0.9)].iter().map(|&p| ctx.complex(p)).collect()
}

/// Largest `|S(x) - f(x)| / max(|f(x)|, 1)` over the probe points.
fn eval_residual(s: &AWSeries, f: &PolyRep, ctx: &PrecisionCtx) -> Float {
    let one = ctx.real(1);
    probe_points(ctx)
        .iter()
        .map(|x| {
            let want = f.eval(x, ctx);
            let got = eval_series(s, x, ctx).value;
            cabs(&ctx.complex(&got - &want), ctx) / cabs(&want, ctx).max(&one)
        })
        .fold(ctx.zero(), |a, b| a.max(&b))
}

/// Re-expands the series from its own values and compares the leading coefficients.
fn reexpand_residual(s: &AWSeries, ctx: &PrecisionCtx) -> Result<Float> {
    let m = s.truncation().min(24);
    let f = FnEvaluator::new(|p: &awcalc::UnitizedPoint, ctx: &PrecisionCtx| eval_series(s, p.x(), ctx).value);
    let e = expand_from_evaluator(&f, s.center(), m, s.q(), ctx)?;
    let mut worst = ctx.zero();
    for n in 0..=m {
        let a = &s.coeffs()[n];
        let d = cabs(&ctx.complex(&e.series.coeffs()[n] - a), ctx);
        let scale = e.scales[n].clone().max(&cabs(a, ctx));
        if !scale.is_zero() {
            worst = worst.max(&(d / scale));
        }
    }
    Ok(worst)
}

pub fn expand(cfg: &RunConfig, args: &ExpandArgs) -> CmdResult<()> {
    let ctx = &cfg.ctx;
    let mut inputs = Vec::new();
    let mut bound = None;
    let (series, residual) = if let Some(tag) = &args.family {
        inputs.push(("family", tag.clone()));
        if let Some(d) = tag.strip_prefix("monomial:") {
            let d: usize = d
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("monomial degree {d:?} is not a count")))
                .in_module("config")?;
            let p = PolyRep::monomial(d, ctx);
            let s = power_to_aw(&PowerSeries::from_poly(&p), &cfg.q, false, ctx).in_module("awseries")?.series;
            let r = eval_residual(&s, &p, ctx);
            (s, r)
        } else {
            inputs.push(("sign", args.sign.clone()));
            let sign = SignRule::parse(&args.sign).in_module("config")?;
            let fam = CoefficientFamily::parse(tag, sign).in_module("config")?;
            let s = fam.build(cfg.trunc - 1, &cfg.q, ctx).in_module("growth")?;
            let r = reexpand_residual(&s, ctx).in_module("awseries")?;
            (s, r)
        }
    } else if let Some(text) = &args.poly {
        inputs.push(("poly", text.clone()));
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        let p = PolyRep::from_decimal_strs(&parts, ctx).in_module("config")?;
        let s = power_to_aw(&PowerSeries::from_poly(&p), &cfg.q, false, ctx).in_module("awseries")?.series;
        let r = eval_residual(&s, &p, ctx);
        (s, r)
    } else {
        let path = args.power_file.as_ref().expect("clap enforces a source");
        inputs.push(("power_file", path.display().to_string()));
        let text = std::fs::read_to_string(path).map_err(Error::from).in_module("config")?;
        let pf: PowerFile =
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("power file: {e}"))).in_module("config")?;
        if pf.coefficients.is_empty() {
            return Err(Error::Parse("power file: `coefficients` must not be empty".into())).in_module("config");
        }
        let coeffs = pf
            .coefficients
            .iter()
            .take(cfg.trunc)
            .map(|c| c.to_complex(ctx))
            .collect::<Result<Vec<_>>>()
            .in_module("config")?;
        let tail = pf.tail_model.as_ref().map(TailModel::from_repr).transpose().in_module("config")?;
        let want_bound = tail.is_some();
        let ps = PowerSeries::new(coeffs.clone(), tail);
        let out = power_to_aw(&ps, &cfg.q, want_bound, ctx).in_module("awseries")?;
        bound = out.truncation_bound.map(|b| b.into_iter().fold(ctx.zero(), |a, v| a.max(&v)));
        let p = PolyRep::new(coeffs, ctx);
        let r = eval_residual(&out.series, &p, ctx);
        (out.series, r)
    };

    let (max_idx, max_abs) = series
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| (i, cabs(c, ctx)))
        .fold((0, ctx.zero()), |best, (i, v)| if v > best.1 { (i, v) } else { best });
    let prov = cfg.provenance("expand", &inputs);
    let report = ExpandReport {
        config: prov,
        coefficients: series.coeffs().len(),
        max_abs_coefficient: sci(&max_abs, 17),
        max_abs_index: max_idx,
        round_trip_residual: sci(&residual, 6),
        truncation_bound: bound.map(|b| sci(&b, 6)),
    };
    let report_bytes = match cfg.format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut rows = vec![
                vec!["coefficients".into(), report.coefficients.to_string()],
                vec!["max_abs_coefficient".into(), report.max_abs_coefficient.clone()],
                vec!["max_abs_index".into(), report.max_abs_index.to_string()],
                vec!["round_trip_residual".into(), report.round_trip_residual.clone()],
            ];
            if let Some(b) = &report.truncation_bound {
                rows.push(vec!["truncation_bound".into(), b.clone()]);
            }
            csv_bytes(&report.config, &[], &["key", "value"], &rows).in_module("config")?
        }
    };
    let file = SeriesFile::from_series(&series).to_json();
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, file).map_err(Error::from).in_module("config")?;
            emit(None, &report_bytes).in_module("config")
        }
        None => {
            emit(None, file.as_bytes()).in_module("config")?;
            eprint!("{}", String::from_utf8_lossy(&report_bytes));
            Ok(())
        }
    }
}

/// Where a series comes from: a series file or a built-in family.
#[derive(Args, Debug)]
#[command(group(ArgGroup::new("series_source").required(true).args(["series", "family"])))]
pub struct SeriesArgs {
    /// Series file as written by `expand`.
    #[arg(long)]
    pub series: Option<PathBuf>,
    /// Built-in family built with `--trunc` coefficients.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, default_value = "all-positive")]
    pub sign: String,
}

fn load_series(cfg: &mut RunConfig, src: &SeriesArgs, inputs: &mut Vec<(&'static str, String)>) -> CmdResult<AWSeries> {
    if let Some(path) = &src.series {
        inputs.push(("series", path.display().to_string()));
        let s = SeriesFile::read(path).and_then(|f| f.to_series(&cfg.ctx)).in_module("awseries")?;
        cfg.adopt_q(s.q(), "the series file").in_module("config")?;
        Ok(s)
    } else {
        let tag = src.family.as_ref().expect("clap enforces a source");
        inputs.push(("family", tag.clone()));
        inputs.push(("sign", src.sign.clone()));
        let sign = SignRule::parse(&src.sign).in_module("config")?;
        let fam = CoefficientFamily::parse(tag, sign).in_module("config")?;
        fam.build(cfg.trunc - 1, &cfg.q, &cfg.ctx).in_module("growth")
    }
}

#[derive(Args, Debug)]
pub struct GrowthArgs {
    #[command(flatten)]
    pub source: SeriesArgs,
    /// Order of the Wiman-Valiron ratio column; 0 leaves it out.
    #[arg(long = "wv-order", default_value_t = 1)]
    pub wv_order: usize,
    /// `stated` or `leading`.
    #[arg(long, default_value = "stated")]
    pub normalization: String,
}

#[derive(Serialize)]
struct RecordJson {
    radius: String,
    log10_mu: Option<String>,
    nu: Option<usize>,
    log10_m: Option<String>,
    normal: Option<bool>,
    wv_ratio_re: Option<String>,
    wv_ratio_im: Option<String>,
    tail_ratio: Option<String>,
    status: String,
}

fn record_json(r: &RadiusRecord, ctx: &PrecisionCtx) -> RecordJson {
    let ln10 = ctx.real(10).ln();
    let log10 = |v: &Float| plain(&ctx.real(v / &ln10), 17);
    RecordJson {
        radius: r.radius.label(),
        log10_mu: r.log_mu.as_ref().map(&log10),
        nu: r.nu,
        log10_m: r.log_m.as_ref().map(&log10),
        normal: r.normal,
        wv_ratio_re: r.wv_ratio.as_ref().map(|z| sci(z.real(), 17)),
        wv_ratio_im: r.wv_ratio.as_ref().map(|z| sci(z.imag(), 17)),
        tail_ratio: r.tail_ratio.as_ref().map(|t| sci(t, 17)),
        status: r.status.clone(),
    }
}

#[derive(Serialize)]
struct GrowthReport {
    config: Provenance,
    monotone: String,
    normal_fraction: Option<f64>,
    records: Vec<RecordJson>,
}

pub fn growth(cfg: &mut RunConfig, args: &GrowthArgs) -> CmdResult<()> {
    let mut inputs = Vec::new();
    let s = load_series(cfg, &args.source, &mut inputs)?;
    let normalization = WvNormalization::parse(&args.normalization).in_module("config")?;
    inputs.push(("wv_order", args.wv_order.to_string()));
    inputs.push(("normalization", normalization.as_str().to_string()));
    let opts = ProfileOptions {
        wv_order: (args.wv_order > 0).then_some(args.wv_order),
        normalization,
        ..ProfileOptions::default()
    };
    let ctx = &cfg.ctx;
    let profile = GrowthProfile::build(&s, &cfg.grid, &cfg.growth, &opts, ctx);
    let monotone = profile.check_monotone();
    let prov = cfg.provenance("growth", &inputs);
    let bytes = match cfg.format {
        Format::Csv => {
            let mut buf = Vec::new();
            profile.write_csv(&mut buf, &prov.comment_lines(), ctx).in_module("growth")?;
            buf
        }
        Format::Json => to_json(&GrowthReport {
            monotone: match &monotone {
                Ok(()) => "ok".into(),
                Err(e) => e.to_string(),
            },
            normal_fraction: profile.normal_fraction(),
            records: profile.records().iter().map(|r| record_json(r, ctx)).collect(),
            config: prov,
        }),
    };
    emit(cfg.out.as_deref(), &bytes).in_module("config")?;
    monotone.in_module("growth")
}

#[derive(Args, Debug)]
pub struct TknArgs {
    /// Largest k in the table.
    #[arg(long)]
    pub kmax: usize,
}

#[derive(Serialize)]
struct TknRow {
    k: usize,
    n: usize,
    value: String,
}

#[derive(Serialize)]
struct TknReport {
    config: Provenance,
    kmax: usize,
    rows: Vec<TknRow>,
}

pub fn tkn(cfg: &RunConfig, args: &TknArgs) -> CmdResult<()> {
    let ctx = &cfg.ctx;
    let table = TknTable::build(args.kmax, &cfg.q, ctx);
    let dg = digits(ctx);
    let rows: Vec<TknRow> = (0..=args.kmax)
        .flat_map(|k| (0..=k).map(move |n| (k, n)))
        .map(|(k, n)| TknRow { k, n, value: plain(&table.value(k, n, ctx), dg) })
        .collect();
    let prov = cfg.provenance("tkn", &[("kmax", args.kmax.to_string())]);
    let bytes = match cfg.format {
        Format::Json => to_json(&TknReport { config: prov, kmax: args.kmax, rows }),
        Format::Csv => {
            let rows: Vec<Vec<String>> =
                rows.into_iter().map(|r| vec![r.k.to_string(), r.n.to_string(), r.value]).collect();
            csv_bytes(&prov, &[], &["k", "n", "T"], &rows).in_module("config")?
        }
    };
    emit(cfg.out.as_deref(), &bytes).in_module("config")
}

#[derive(Args, Debug)]
pub struct DeqArgs {
    /// Equation file with `q` and `coefficients`.
    #[arg(long)]
    pub equation: PathBuf,
    /// Restrict predictions to this slope, e.g. `2` or `1/2`.
    #[arg(long)]
    pub chi: Option<String>,
    /// Candidate solution for the growth certificate.
    #[arg(long)]
    pub series: Option<PathBuf>,
    /// Skip the substitution check for the candidate solution.
    #[arg(long = "assume-solution")]
    pub assume_solution: bool,
    /// Compare with the prediction at normal radii only.
    #[arg(long = "normal-mask")]
    pub normal_mask: bool,
}

#[derive(Serialize)]
struct Prediction {
    chi: String,
    radius: String,
    predicted_nu: String,
}

#[derive(Serialize)]
struct CertificateJson {
    verdict: &'static str,
    matched_slope: Option<String>,
    max_deviation: Option<f64>,
    sigma_coeff: Option<String>,
    sigma_profile: Option<String>,
    max_residual: Option<String>,
}

#[derive(Serialize)]
struct DeqReport {
    config: Provenance,
    order: usize,
    generators: Vec<(i64, i64)>,
    vertices: Vec<(i64, i64)>,
    slopes: Vec<String>,
    predictions: Vec<Prediction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<CertificateJson>,
}

fn parse_chi(s: &str) -> Result<Ratio<i64>> {
    let c: Ratio<i64> = s.trim().parse().map_err(|_| Error::InvalidArgument(format!("slope {s:?} is not a rational")))?;
    if c <= Ratio::from_integer(0) {
        return Err(Error::InvalidSlope(format!("slope {c} must be positive")));
    }
    Ok(c)
}

pub fn deq(cfg: &mut RunConfig, args: &DeqArgs) -> CmdResult<()> {
    let mut inputs = vec![("equation", args.equation.display().to_string())];
    let file = EquationFile::read(&args.equation).in_module("awdeq")?;
    let eq = file.to_equation(&cfg.ctx).in_module("awdeq")?;
    cfg.adopt_q(eq.q(), "the equation file").in_module("config")?;
    let ctx = &cfg.ctx;
    let poly: NewtonPolygon = newton_polygon(&eq);
    let chis = match &args.chi {
        Some(s) => {
            inputs.push(("chi", s.clone()));
            let c = parse_chi(s).in_module("config")?;
            if !poly.contains_slope(&c) {
                return Err(Error::InvalidSlope(format!("{c} is not a positive edge slope of the polygon")))
                    .in_module("awdeq");
            }
            vec![c]
        }
        None => poly.edge_slopes.clone(),
    };
    let radii = cfg.grid.radii(ctx);
    let mut predictions = Vec::new();
    for chi in &chis {
        for rad in &radii {
            let nu = predicted_nu(&eq, &rad.value, chi, ctx).in_module("awdeq")?;
            predictions.push(Prediction { chi: chi.to_string(), radius: rad.label(), predicted_nu: plain(&nu, 17) });
        }
    }
    let certificate = match &args.series {
        None => None,
        Some(path) => {
            inputs.push(("series", path.display().to_string()));
            inputs.push(("assume_solution", args.assume_solution.to_string()));
            inputs.push(("normal_mask", args.normal_mask.to_string()));
            let s = SeriesFile::read(path).and_then(|f| f.to_series(ctx)).in_module("awseries")?;
            if s.q().exact() != eq.q().exact() {
                return Err(Error::InvalidArgument(format!(
                    "series file has q = {} but the equation has q = {}",
                    s.q(),
                    eq.q()
                )))
                .in_module("config");
            }
            let opts = ProfileOptions {
                normality: args.normal_mask,
                wv_order: None,
                tail_sum: false,
                ..ProfileOptions::default()
            };
            let profile = GrowthProfile::build(&s, &cfg.grid, &cfg.growth, &opts, ctx);
            let copts = CertificateOptions {
                assume_solution: args.assume_solution,
                normal_mask: args.normal_mask,
                ..CertificateOptions::default()
            };
            let c = growth_certificate(&eq, &s, &profile, &copts, ctx).in_module("awdeq")?;
            Some(CertificateJson {
                verdict: c.verdict.as_str(),
                matched_slope: c.matched_slope.map(|m| m.to_string()),
                max_deviation: c.max_deviation,
                sigma_coeff: c.sigma_coeff.as_ref().map(|v| plain(v, 17)),
                sigma_profile: c.sigma_profile.as_ref().map(|v| plain(v, 17)),
                max_residual: c.max_residual.as_ref().map(|v| sci(v, 6)),
            })
        }
    };
    let prov = cfg.provenance("deq", &inputs);
    let report = DeqReport {
        config: prov,
        order: eq.order(),
        generators: poly.generators.clone(),
        vertices: poly.vertices.clone(),
        slopes: poly.edge_slopes.iter().map(|c| c.to_string()).collect(),
        predictions,
        certificate,
    };
    let bytes = match cfg.format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut extra = vec![
                format!("order = {}", report.order),
                format!("slopes = {}", report.slopes.join(" ")),
            ];
            if let Some(c) = &report.certificate {
                extra.push(format!("verdict = {}", c.verdict));
            }
            let rows: Vec<Vec<String>> = report
                .predictions
                .iter()
                .map(|p| vec![p.chi.clone(), p.radius.clone(), p.predicted_nu.clone()])
                .collect();
            csv_bytes(&report.config, &extra, &["chi", "radius", "predicted_nu"], &rows).in_module("config")?
        }
    };
    emit(cfg.out.as_deref(), &bytes).in_module("config")
}

#[derive(Args, Debug)]
pub struct WvArgs {
    #[command(flatten)]
    pub source: SeriesArgs,
    /// Order of the difference operator.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// `stated` or `leading`.
    #[arg(long, default_value = "stated")]
    pub normalization: String,
}

#[derive(Serialize)]
struct WvRow {
    radius: String,
    nu: Option<usize>,
    ratio_re: Option<String>,
    ratio_im: Option<String>,
    abs_ratio_minus_one: Option<String>,
    tail_ratio: Option<String>,
    status: String,
}

#[derive(Serialize)]
struct WvReport {
    config: Provenance,
    n: usize,
    normalization: &'static str,
    verdict: &'static str,
    tail_verdict: &'static str,
    rows: Vec<WvRow>,
}

/// Trend over the grid: the last value is below the first and the last
/// (up to) five values fall strictly.
pub fn trend(values: &[Float]) -> &'static str {
    if values.len() < 2 {
        return "INSUFFICIENT_DATA";
    }
    let tail = &values[values.len() - values.len().min(5)..];
    let falling = tail.windows(2).all(|w| w[1] < w[0]);
    if falling && values[values.len() - 1] < values[0] {
        "DECREASING"
    } else {
        "NOT_DECREASING"
    }
}

pub fn wvcheck(cfg: &mut RunConfig, args: &WvArgs) -> CmdResult<()> {
    let mut inputs = Vec::new();
    let s = load_series(cfg, &args.source, &mut inputs)?;
    let normalization = WvNormalization::parse(&args.normalization).in_module("config")?;
    inputs.push(("n", args.n.to_string()));
    inputs.push(("normalization", normalization.as_str().to_string()));
    let ctx = &cfg.ctx;
    let results: Vec<_> = cfg
        .grid
        .radii(ctx)
        .into_par_iter()
        .map(|rad| {
            let w = wv_ratio(&s, args.n, &rad.value, &cfg.growth, normalization, ctx);
            let t = tail_sum_check(&s, &rad.value, &cfg.growth, ctx);
            (rad, w, t)
        })
        .collect();
    let mut devs = Vec::new();
    let mut tails = Vec::new();
    let mut rows = Vec::new();
    for (rad, w, t) in results {
        let mut notes = Vec::new();
        let mut row = WvRow {
            radius: rad.label(),
            nu: None,
            ratio_re: None,
            ratio_im: None,
            abs_ratio_minus_one: None,
            tail_ratio: None,
            status: String::new(),
        };
        match w {
            Ok(w) => {
                let d = cabs(&ctx.complex(&w.value - 1u32), ctx);
                row.nu = Some(w.nu);
                row.ratio_re = Some(sci(w.value.real(), 17));
                row.ratio_im = Some(sci(w.value.imag(), 17));
                row.abs_ratio_minus_one = Some(sci(&d, 17));
                devs.push(d);
            }
            Err(e) => notes.push(format!("wv: {e}")),
        }
        match t {
            Ok(t) => {
                row.tail_ratio = Some(sci(&t.ratio, 17));
                tails.push(t.ratio);
            }
            Err(e) => notes.push(format!("tail: {e}")),
        }
        row.status = if notes.is_empty() { "ok".into() } else { notes.join("; ") };
        rows.push(row);
    }
    let verdict = trend(&devs);
    let tail_verdict = trend(&tails);
    let prov = cfg.provenance("wvcheck", &inputs);
    let bytes = match cfg.format {
        Format::Json => to_json(&WvReport {
            config: prov,
            n: args.n,
            normalization: normalization.as_str(),
            verdict,
            tail_verdict,
            rows,
        }),
        Format::Csv => {
            let extra = vec![format!("verdict = {verdict}"), format!("tail_verdict = {tail_verdict}")];
            let opt = |v: &Option<String>| v.clone().unwrap_or_default();
            let rows: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.radius.clone(),
                        r.nu.map(|n| n.to_string()).unwrap_or_default(),
                        opt(&r.ratio_re),
                        opt(&r.ratio_im),
                        opt(&r.abs_ratio_minus_one),
                        opt(&r.tail_ratio),
                        r.status.clone(),
                    ]
                })
                .collect();
            csv_bytes(
                &prov,
                &extra,
                &["radius", "nu", "ratio_re", "ratio_im", "abs_ratio_minus_one", "tail_ratio", "status"],
                &rows,
            )
            .in_module("config")?
        }
    };
    emit(cfg.out.as_deref(), &bytes).in_module("config")
}
