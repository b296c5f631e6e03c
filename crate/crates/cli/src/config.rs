use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use awcalc::growth::{ComparisonConfig, GrowthConfig, RadiusGrid};
use awcalc::{Error, PrecisionCtx, QParam, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Flags shared by every subcommand. Numbers are decimal strings, parsed exactly.
#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Base q in (0,1); files that carry their own q must agree with it.
    #[arg(long, global = true)]
    pub q: Option<String>,
    #[arg(long = "precision-bits", global = true, default_value_t = 512)]
    pub precision_bits: u32,
    /// Number of series coefficients to build.
    #[arg(long, global = true, default_value_t = 400)]
    pub trunc: usize,
    #[arg(long, global = true, default_value = "0.5")]
    pub delta: String,
    #[arg(long, global = true, default_value = "1.5")]
    pub gamma: String,
    #[arg(long, global = true, default_value = "10")]
    pub beta: String,
    #[arg(long, global = true, default_value = "9")]
    pub omega: String,
    #[arg(long, global = true, default_value_t = 0)]
    pub h: u32,
    /// Radius grid `log10:<start>:<step>:<count>`.
    #[arg(long, global = true, default_value = "log10:10:10:100")]
    pub radii: String,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

pub const DEFAULT_Q: &str = "0.5";

/// Validated configuration; built before any computation starts.
pub struct RunConfig {
    pub q: QParam,
    /// Whether `--q` was given explicitly.
    pub q_explicit: bool,
    pub ctx: PrecisionCtx,
    pub trunc: usize,
    pub growth: GrowthConfig,
    pub grid: RadiusGrid,
    pub format: Format,
    pub out: Option<PathBuf>,
    args: GlobalArgs,
}

impl RunConfig {
    pub fn from_args(args: &GlobalArgs, default_format: Format) -> Result<Self> {
        let q = QParam::parse(args.q.as_deref().unwrap_or(DEFAULT_Q))?;
        let ctx = PrecisionCtx::with_bits(args.precision_bits)?;
        if args.trunc == 0 {
            return Err(Error::InvalidArgument("--trunc must be positive".into()));
        }
        let comparison = ComparisonConfig::parse(&args.delta, &args.gamma, &args.beta, &args.omega, args.h)?;
        let grid = RadiusGrid::parse(&args.radii)?;
        Ok(Self {
            q,
            q_explicit: args.q.is_some(),
            ctx,
            trunc: args.trunc,
            growth: GrowthConfig::with_comparison(comparison),
            grid,
            format: args.format.unwrap_or(default_format),
            out: args.out.clone(),
            args: args.clone(),
        })
    }

    /// Takes `q` from an input file, rejecting a conflicting `--q`.
    pub fn adopt_q(&mut self, file_q: &QParam, what: &str) -> Result<()> {
        if self.q_explicit && self.q.exact() != file_q.exact() {
            return Err(Error::InvalidArgument(format!("--q {} conflicts with q = {} in {what}", self.q, file_q)));
        }
        self.q = file_q.clone();
        Ok(())
    }

    pub fn provenance(&self, command: &str, inputs: &[(&str, String)]) -> Provenance {
        Provenance {
            tool: format!("awcalc {}", env!("CARGO_PKG_VERSION")),
            command: command.to_string(),
            q: self.q.as_str().to_string(),
            precision_bits: self.ctx.bits(),
            guard_bits: self.ctx.guard_bits(),
            trunc: self.trunc,
            delta: self.args.delta.clone(),
            gamma: self.args.gamma.clone(),
            beta: self.args.beta.clone(),
            omega: self.args.omega.clone(),
            h: self.args.h,
            radii: self.grid.describe(),
            format: self.format,
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        }
    }
}

/// Everything needed to reproduce a run; embedded in every output.
#[derive(Serialize, Debug)]
pub struct Provenance {
    pub tool: String,
    pub command: String,
    pub q: String,
    pub precision_bits: u32,
    pub guard_bits: u32,
    pub trunc: usize,
    pub delta: String,
    pub gamma: String,
    pub beta: String,
    pub omega: String,
    pub h: u32,
    pub radii: String,
    pub format: Format,
    pub inputs: BTreeMap<String, String>,
}

impl Provenance {
    /// `key = value` lines for CSV comment headers.
    pub fn comment_lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("tool = {}", self.tool),
            format!("command = {}", self.command),
            format!("q = {}", self.q),
            format!("precision_bits = {}", self.precision_bits),
            format!("guard_bits = {}", self.guard_bits),
            format!("trunc = {}", self.trunc),
            format!("delta = {}", self.delta),
            format!("gamma = {}", self.gamma),
            format!("beta = {}", self.beta),
            format!("omega = {}", self.omega),
            format!("h = {}", self.h),
            format!("radii = {}", self.radii),
            format!("format = {}", self.format.as_str()),
        ];
        out.extend(self.inputs.iter().map(|(k, v)| format!("{k} = {v}")));
        out
    }
}

pub fn write_comments<W: Write>(w: &mut W, prov: &Provenance) -> Result<()> {
    for line in prov.comment_lines() {
        writeln!(w, "# {line}")?;
    }
    Ok(())
}

/// Writes to `path`, or to stdout when absent.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
    }
    Ok(())
}

pub fn to_json<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("report serialization");
    s.push('\n');
    s.into_bytes()
}
