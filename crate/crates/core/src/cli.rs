//! Command-line front end for the `hqr` binary.
//!
//! Every option can also come from a `--config` file with one
//! `key = value` per line (`#` starts a comment); keys are the long flag
//! names and flags given on the command line win over the file.
//!
//! Exit status: 0 when every strict check passes (or the command is
//! informational), 1 when a strict check fails or is under-resolved, 2 on
//! usage or configuration errors.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::error::HqrError;
use crate::means::{default_radii, monotone_flag, radial_profile_on_grid, Quantity};
use crate::probe::{default_spaces, probe_spaces, probed_theorems, ProbeResult, DEFAULT_STEPS};
use crate::series::grid_size_for_degree;
use crate::verify::{
    flatten_params, run_suite, standard_suite, CellError, CheckOptions, InequalityReport, SuiteCell,
    SuiteOutcome, TheoremId, Verdict, STANDARD_RADII,
};
use crate::zoo::{FamilyId, FamilySpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// List the test families, their parameter domains and guarantees.
    ZooList,
    /// Radial profiles of integral means and the Zygmund functional.
    Means,
    /// Check inequalities on one family, or the standard suite with `--all`.
    Verify,
    /// Search for the largest lhs/rhs ratio of strict inequalities.
    Probe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, PartialEq, Parser)]
#[command(
    name = "hqr",
    version,
    about = "Integral-mean inequalities for harmonic quasiregular maps"
)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// Plain-text `key = value` file supplying defaults for any flag.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub theorem: Option<String>,
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    /// Use `−f` instead of `f`.
    #[arg(long)]
    pub negated: bool,
    /// Allow `c < 1` (experimental checks only).
    #[arg(long)]
    pub relaxed: bool,
    /// Radii, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub r: Vec<f64>,
    /// Exponents, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<f64>,
    /// Truncation degree `N` of the family's series.
    #[arg(long)]
    pub n: Option<usize>,
    /// Circle grid size `M`.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Quantities for `means`, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub quantity: Vec<String>,
    /// Run the standard suite (verify) or every strict theorem (probe).
    #[arg(long)]
    pub all: bool,
    /// Refinement evaluations per probe.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Include every probe evaluation in the output.
    #[arg(long)]
    pub trace: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Additionally write the report as CSV to this path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// A usage or configuration error; maps to exit status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<HqrError> for UsageError {
    fn from(e: HqrError) -> Self {
        UsageError(e.to_string())
    }
}

fn usage(message: impl Into<String>) -> UsageError {
    UsageError(message.into())
}

/// What a command produced: the exit status, the payload for stdout (empty
/// when written to `--out`) and diagnostics for stderr.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub exit: i32,
    pub stdout: String,
    pub stderr: String,
}

const CONFIG_KEYS: [&str; 20] = [
    "theorem", "family", "k", "c", "m", "alpha", "s", "negated", "relaxed", "r", "p", "n", "grid",
    "quantity", "all", "steps", "trace", "out", "format", "csv",
];

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, UsageError> {
    value
        .parse()
        .map_err(|_| usage(format!("config key `{key}`: cannot parse `{value}`")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>, UsageError> {
    value.split(',').map(|v| parse_value(key, v.trim())).collect()
}

/// Parses a `key = value` config file into a [`RunConfig`] with no command.
pub fn parse_config(text: &str) -> Result<RunConfig, UsageError> {
    let mut cfg = RunConfig::default();
    for (index, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected `key = value`", index + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "theorem" => cfg.theorem = Some(value.to_string()),
            "family" => cfg.family = Some(value.to_string()),
            "k" => cfg.k = Some(parse_value(key, value)?),
            "c" => cfg.c = Some(parse_value(key, value)?),
            "m" => cfg.m = Some(parse_value(key, value)?),
            "alpha" => cfg.alpha = Some(parse_value(key, value)?),
            "s" => cfg.s = Some(parse_value(key, value)?),
            "negated" => cfg.negated = parse_value(key, value)?,
            "relaxed" => cfg.relaxed = parse_value(key, value)?,
            "r" => cfg.r = parse_list(key, value)?,
            "p" => cfg.p = parse_list(key, value)?,
            "n" => cfg.n = Some(parse_value(key, value)?),
            "grid" => cfg.grid = Some(parse_value(key, value)?),
            "quantity" => cfg.quantity = value.split(',').map(|q| q.trim().to_string()).collect(),
            "all" => cfg.all = parse_value(key, value)?,
            "steps" => cfg.steps = Some(parse_value(key, value)?),
            "trace" => cfg.trace = parse_value(key, value)?,
            "out" => cfg.out = Some(PathBuf::from(value)),
            "format" => {
                cfg.format = Some(Format::from_str(value, false).map_err(|_| {
                    usage(format!(
                        "config key `format`: expected json or csv, got `{value}`"
                    ))
                })?)
            }
            "csv" => cfg.csv = Some(PathBuf::from(value)),
            _ => {
                return Err(usage(format!(
                    "unknown config key `{key}` on line {} (known keys: {})",
                    index + 1,
                    CONFIG_KEYS.join(", ")
                )))
            }
        }
    }
    Ok(cfg)
}

impl RunConfig {
    /// Fills every option not given on the command line from `file`.
    pub fn merged_with(self, file: RunConfig) -> RunConfig {
        fn list<T>(flag: Vec<T>, file: Vec<T>) -> Vec<T> {
            if flag.is_empty() {
                file
            } else {
                flag
            }
        }
        RunConfig {
            command: self.command.or(file.command),
            config: self.config,
            theorem: self.theorem.or(file.theorem),
            family: self.family.or(file.family),
            k: self.k.or(file.k),
            c: self.c.or(file.c),
            m: self.m.or(file.m),
            alpha: self.alpha.or(file.alpha),
            s: self.s.or(file.s),
            negated: self.negated || file.negated,
            relaxed: self.relaxed || file.relaxed,
            r: list(self.r, file.r),
            p: list(self.p, file.p),
            n: self.n.or(file.n),
            grid: self.grid.or(file.grid),
            quantity: list(self.quantity, file.quantity),
            all: self.all || file.all,
            steps: self.steps.or(file.steps),
            trace: self.trace || file.trace,
            out: self.out.or(file.out),
            format: self.format.or(file.format),
            csv: self.csv.or(file.csv),
        }
    }

    /// Names of the options that are set.
    fn given(&self) -> Vec<&'static str> {
        let flags = [
            ("theorem", self.theorem.is_some()),
            ("family", self.family.is_some()),
            ("k", self.k.is_some()),
            ("c", self.c.is_some()),
            ("m", self.m.is_some()),
            ("alpha", self.alpha.is_some()),
            ("s", self.s.is_some()),
            ("negated", self.negated),
            ("relaxed", self.relaxed),
            ("r", !self.r.is_empty()),
            ("p", !self.p.is_empty()),
            ("n", self.n.is_some()),
            ("grid", self.grid.is_some()),
            ("quantity", !self.quantity.is_empty()),
            ("all", self.all),
            ("steps", self.steps.is_some()),
            ("trace", self.trace),
        ];
        flags
            .into_iter()
            .filter(|(_, set)| *set)
            .map(|(name, _)| name)
            .collect()
    }

    fn reject_unused(&self, command: Command, allowed: &[&str]) -> Result<(), UsageError> {
        match self.given().into_iter().find(|name| !allowed.contains(name)) {
            Some(name) => Err(usage(format!(
                "--{name} is not used by `{}`",
                command
                    .to_possible_value()
                    .map(|v| v.get_name().to_string())
                    .unwrap_or_default()
            ))),
            None => Ok(()),
        }
    }

    fn options(&self) -> Result<CheckOptions, UsageError> {
        if self.grid == Some(0) {
            return Err(usage("--grid must be at least 1"));
        }
        Ok(CheckOptions { grid: self.grid })
    }

    fn theorem(&self) -> Result<Option<TheoremId>, UsageError> {
        self.theorem
            .as_deref()
            .map(|name| {
                TheoremId::from_name(name).ok_or_else(|| {
                    let known: Vec<_> = TheoremId::ALL.iter().map(|t| t.name()).collect();
                    usage(format!("unknown theorem `{name}` (known: {})", known.join(", ")))
                })
            })
            .transpose()
    }

    fn family_id(&self) -> Result<Option<FamilyId>, UsageError> {
        self.family
            .as_deref()
            .map(|name| match FamilyId::from_name(name) {
                Ok(FamilyId::Custom) | Err(_) => {
                    let known: Vec<_> = FamilyId::REGISTRY.iter().map(|f| f.name()).collect();
                    Err(usage(format!(
                        "unknown family `{name}` (known: {})",
                        known.join(", ")
                    )))
                }
                Ok(id) => Ok(id),
            })
            .transpose()
    }

    /// The family named by `--family` with the parameter flags that are set.
    fn family_spec(&self) -> Result<FamilySpec, UsageError> {
        let id = self.family_id()?.ok_or_else(|| usage("--family is required"))?;
        let params: Vec<(&str, f64)> = [
            ("k", self.k),
            ("c", self.c),
            ("m", self.m),
            ("alpha", self.alpha),
            ("s", self.s),
        ]
        .into_iter()
        .filter_map(|(name, value)| value.map(|v| (name, v)))
        .collect();
        let mut spec = FamilySpec::new(id, &params);
        if let Some(n) = self.n {
            if n == 0 {
                return Err(usage("--n must be at least 1"));
            }
            spec = spec.with_degree(n);
        }
        if self.negated {
            spec = spec.negated();
        }
        Ok(spec)
    }
}

/// Parses `args` (program name first) and runs the command. Help and
/// version requests come back with exit 0 and the text on stdout.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(cfg) => run(cfg),
        Err(e) => {
            let exit = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if exit == EXIT_OK {
                Outcome {
                    exit,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    exit,
                    stdout: String::new(),
                    stderr: text,
                }
            }
        }
    }
}

/// Runs a parsed configuration, merging its `--config` file first.
pub fn run(cfg: RunConfig) -> Outcome {
    match execute(cfg) {
        Ok(outcome) => outcome,
        Err(e) => Outcome {
            exit: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn execute(cfg: RunConfig) -> Result<Outcome, UsageError> {
    let cfg = match &cfg.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
            let file = parse_config(&text)?;
            cfg.merged_with(file)
        }
        None => cfg,
    };
    let command = cfg
        .command
        .ok_or_else(|| usage("a command is required: zoo-list, means, verify or probe"))?;
    let (exit, report, stderr) = match command {
        Command::ZooList => {
            cfg.reject_unused(command, &[])?;
            (EXIT_OK, zoo_list(), String::new())
        }
        Command::Means => {
            cfg.reject_unused(
                command,
                &[
                    "family", "k", "c", "m", "alpha", "s", "negated", "r", "p", "n", "grid", "quantity",
                ],
            )?;
            (EXIT_OK, means(&cfg)?, String::new())
        }
        Command::Verify => {
            cfg.reject_unused(
                command,
                &[
                    "theorem", "family", "k", "c", "m", "alpha", "s", "negated", "relaxed", "r", "p", "n",
                    "grid", "all",
                ],
            )?;
            verify(&cfg)?
        }
        Command::Probe => {
            cfg.reject_unused(command, &["theorem", "family", "grid", "all", "steps", "trace"])?;
            probe(&cfg)?
        }
    };
    emit(&cfg, command, report, exit, stderr)
}

/// A command's result in both output formats.
struct Report {
    json: String,
    csv: String,
    /// Human-readable form used when no format is requested (zoo-list only).
    text: Option<String>,
}

fn write_file(path: &Path, contents: &str) -> Result<(), UsageError> {
    fs::write(path, contents).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn emit(
    cfg: &RunConfig,
    command: Command,
    report: Report,
    exit: i32,
    stderr: String,
) -> Result<Outcome, UsageError> {
    let payload = match (cfg.format, &report.text) {
        (Some(Format::Csv), _) => report.csv.clone(),
        (None, Some(text)) if command == Command::ZooList => text.clone(),
        _ => report.json.clone(),
    };
    if let Some(path) = &cfg.csv {
        write_file(path, &report.csv)?;
    }
    let stdout = match &cfg.out {
        Some(path) => {
            write_file(path, &payload)?;
            String::new()
        }
        None => payload,
    };
    Ok(Outcome { exit, stdout, stderr })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

fn to_csv<T: Serialize>(header: &[&str], rows: impl IntoIterator<Item = T>) -> String {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    writer.write_record(header).expect("in-memory write");
    for row in rows {
        writer.serialize(row).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

#[derive(Serialize)]
struct ZooEntry {
    family_id: &'static str,
    parameters: BTreeMap<&'static str, &'static str>,
    guarantees: &'static str,
}

fn zoo_list() -> Report {
    let entries: Vec<ZooEntry> = FamilyId::REGISTRY
        .iter()
        .map(|f| ZooEntry {
            family_id: f.name(),
            parameters: f.parameter_domains().iter().copied().collect(),
            guarantees: f.guarantees(),
        })
        .collect();
    let describe = |f: &FamilyId| {
        f.parameter_domains()
            .iter()
            .map(|(name, domain)| format!("{name} in {domain}"))
            .collect::<Vec<_>>()
            .join("; ")
    };
    let mut text = format!("{:<20}  {:<42}  {}\n", "family", "parameters", "guarantees");
    for f in FamilyId::REGISTRY {
        text.push_str(&format!(
            "{:<20}  {:<42}  {}\n",
            f.name(),
            describe(&f),
            f.guarantees()
        ));
    }
    Report {
        json: to_json(&entries),
        csv: to_csv(
            &["family_id", "parameters", "guarantees"],
            FamilyId::REGISTRY
                .iter()
                .map(|f| (f.name(), describe(f), f.guarantees())),
        ),
        text: Some(text),
    }
}

#[derive(Serialize)]
struct ProfileOut {
    quantity: &'static str,
    p: f64,
    radii: Vec<f64>,
    values: Vec<f64>,
    monotone: bool,
}

#[derive(Serialize)]
struct MeansOut {
    family_id: String,
    params: BTreeMap<String, f64>,
    degree: usize,
    grid: usize,
    profiles: Vec<ProfileOut>,
}

fn means(cfg: &RunConfig) -> Result<Report, UsageError> {
    let spec = cfg.family_spec()?;
    let radii = if cfg.r.is_empty() {
        default_radii(10)
    } else {
        cfg.r.clone()
    };
    let increasing = radii.windows(2).all(|w| w[0] < w[1]);
    if !increasing || radii.iter().any(|r| !(0.0..1.0).contains(r)) {
        return Err(usage("--r must be strictly increasing radii in [0, 1)"));
    }
    let ps = if cfg.p.is_empty() {
        vec![1.0]
    } else {
        cfg.p.clone()
    };
    if let Some(&p) = ps.iter().find(|&&p| p.is_nan() || p <= 0.0) {
        return Err(usage(format!("--p {p} outside (0, inf]")));
    }
    let quantities = if cfg.quantity.is_empty() {
        Quantity::ALL.to_vec()
    } else {
        cfg.quantity
            .iter()
            .map(|tag| {
                Quantity::from_tag(tag).ok_or_else(|| {
                    let known: Vec<_> = Quantity::ALL.iter().map(|q| q.tag()).collect();
                    usage(format!("unknown quantity `{tag}` (known: {})", known.join(", ")))
                })
            })
            .collect::<Result<_, _>>()?
    };
    let r_max = *radii.last().expect("radii are nonempty");
    let family = spec.build(r_max)?;
    let degree = family.map.degree();
    let m = cfg
        .options()?
        .grid
        .unwrap_or_else(|| grid_size_for_degree(degree));
    let mut profiles = Vec::new();
    for q in quantities {
        // The Zygmund functional does not depend on p.
        let exps: &[f64] = if q == Quantity::ZygmundOfU { &[1.0] } else { &ps };
        for &p in exps {
            let profile = radial_profile_on_grid(&family.map, q, p, &radii, m)?;
            profiles.push(ProfileOut {
                quantity: q.tag(),
                p,
                monotone: monotone_flag(&profile),
                radii: profile.radii,
                values: profile.values,
            });
        }
    }
    let rows: Vec<_> = profiles
        .iter()
        .flat_map(|pr| {
            pr.radii
                .iter()
                .zip(&pr.values)
                .map(move |(&r, &v)| (pr.quantity, pr.p, r, v))
        })
        .collect();
    let out = MeansOut {
        family_id: spec.label(),
        params: spec.params.clone(),
        degree,
        grid: m,
        profiles,
    };
    Ok(Report {
        json: to_json(&out),
        csv: to_csv(&["quantity", "p", "r", "value"], rows),
        text: None,
    })
}

#[derive(Serialize)]
struct Summary {
    pass: usize,
    fail: usize,
    report_only: usize,
    under_resolved: usize,
    errors: usize,
}

#[derive(Serialize)]
struct VerifyOut<'a> {
    reports: &'a [InequalityReport],
    errors: &'a [CellError],
    summary: Summary,
}

/// One CSV row of a report, in the documented column order.
#[derive(Serialize)]
struct ReportRow<'a> {
    theorem_id: &'static str,
    family_id: &'a str,
    params: String,
    r: f64,
    p: Option<f64>,
    lhs: f64,
    rhs: f64,
    margin: f64,
    error_budget: f64,
    verdict: &'static str,
}

pub const REPORT_COLUMNS: [&str; 10] = [
    "theorem_id",
    "family_id",
    "params",
    "r",
    "p",
    "lhs",
    "rhs",
    "margin",
    "error_budget",
    "verdict",
];

fn report_rows(reports: &[InequalityReport]) -> impl Iterator<Item = ReportRow<'_>> {
    reports.iter().map(|r| ReportRow {
        theorem_id: r.theorem_id.name(),
        family_id: &r.family_id,
        params: flatten_params(&r.params),
        r: r.r,
        p: r.p,
        lhs: r.lhs,
        rhs: r.rhs,
        margin: r.margin,
        error_budget: r.error_budget,
        verdict: r.verdict.name(),
    })
}

fn verify_cells(cfg: &RunConfig) -> Result<Vec<SuiteCell>, UsageError> {
    if cfg.all {
        if let Some(name) = cfg.given().into_iter().find(|n| !["all", "grid"].contains(n)) {
            return Err(usage(format!("--{name} cannot be combined with --all")));
        }
        return Ok(standard_suite());
    }
    let theorem = cfg
        .theorem()?
        .ok_or_else(|| usage("--theorem (or --all) is required"))?;
    let spec = cfg.family_spec()?;
    spec.validate_with(cfg.relaxed)?;
    let radii = if cfg.r.is_empty() {
        STANDARD_RADII.to_vec()
    } else {
        cfg.r.clone()
    };
    if let Some(r) = radii.iter().find(|r| !(0.0..1.0).contains(*r)) {
        return Err(usage(format!("--r {r} outside [0, 1)")));
    }
    let ps: Vec<Option<f64>> = match theorem.exponent_domain() {
        Some((domain, ok)) => {
            if cfg.p.is_empty() {
                return Err(usage(format!("{theorem} needs --p in {domain}")));
            }
            if let Some(p) = cfg.p.iter().find(|&&p| !ok(p)) {
                return Err(usage(format!("--p {p} outside {domain} for {theorem}")));
            }
            cfg.p.iter().map(|&p| Some(p)).collect()
        }
        None if !cfg.p.is_empty() => return Err(usage(format!("{theorem} takes no exponent"))),
        None => vec![None],
    };
    let mut cells = Vec::new();
    for &r in &radii {
        for &p in &ps {
            cells.push(SuiteCell {
                theorem_id: theorem,
                family: spec.clone(),
                r,
                p,
                relaxed: cfg.relaxed,
            });
        }
    }
    Ok(cells)
}

fn verify(cfg: &RunConfig) -> Result<(i32, Report, String), UsageError> {
    let cells = verify_cells(cfg)?;
    let outcome: SuiteOutcome = run_suite(&cells, cfg.options()?);
    let failed = outcome
        .reports
        .iter()
        .any(|r| matches!(r.verdict, Verdict::Fail | Verdict::UnderResolved));
    let exit = if failed || (cfg.all && !outcome.errors.is_empty()) {
        EXIT_FAILED
    } else if !outcome.errors.is_empty() {
        EXIT_USAGE
    } else {
        EXIT_OK
    };
    let stderr: String = outcome
        .errors
        .iter()
        .map(|e| {
            format!(
                "error: {} on {} ({}) at r = {}: {}\n",
                e.theorem_id,
                e.family_id,
                flatten_params(&e.params),
                e.r,
                e.message
            )
        })
        .collect();
    let summary = Summary {
        pass: outcome.count(Verdict::Pass),
        fail: outcome.count(Verdict::Fail),
        report_only: outcome.count(Verdict::ReportOnly),
        under_resolved: outcome.count(Verdict::UnderResolved),
        errors: outcome.errors.len(),
    };
    let report = Report {
        json: to_json(&VerifyOut {
            reports: &outcome.reports,
            errors: &outcome.errors,
            summary,
        }),
        csv: to_csv(&REPORT_COLUMNS, report_rows(&outcome.reports)),
        text: None,
    };
    Ok((exit, report, stderr))
}

#[derive(Serialize)]
struct ProbeRow {
    theorem_id: &'static str,
    family_id: &'static str,
    best_ratio: f64,
    error_budget: f64,
    evaluations: usize,
    skipped: usize,
    argmax: String,
    within_budget: bool,
}

fn probe(cfg: &RunConfig) -> Result<(i32, Report, String), UsageError> {
    let theorems = match (cfg.all, cfg.theorem()?) {
        (true, None) => probed_theorems(),
        (false, Some(t)) => vec![t],
        (true, Some(_)) => return Err(usage("--theorem cannot be combined with --all")),
        (false, None) => return Err(usage("--theorem (or --all) is required")),
    };
    let family = cfg.family_id()?;
    let steps = cfg.steps.unwrap_or(DEFAULT_STEPS);
    let opts = cfg.options()?;
    let mut results: Vec<ProbeResult> = Vec::new();
    for theorem in theorems {
        let spaces: Vec<_> = default_spaces(theorem)
            .into_iter()
            .filter(|s| family.is_none_or(|f| s.family_id == f))
            .collect();
        if spaces.is_empty() {
            let scope = family.map_or(String::new(), |f| format!(" on {f}"));
            return Err(usage(format!("no probe space for {theorem}{scope}")));
        }
        results.push(probe_spaces(&spaces, steps, opts, cfg.trace)?);
    }
    let exit = if results.iter().all(ProbeResult::within_budget) {
        EXIT_OK
    } else {
        EXIT_FAILED
    };
    let stderr: String = results
        .iter()
        .filter(|r| !r.within_budget())
        .map(|r| {
            format!(
                "counterexample candidate: {} ratio {} exceeds 1 + {} at {}\n",
                r.theorem_id,
                r.best_ratio,
                r.error_budget,
                flatten_params(&r.argmax)
            )
        })
        .collect();
    let rows = results.iter().map(|r| ProbeRow {
        theorem_id: r.theorem_id.name(),
        family_id: r.family_id.name(),
        best_ratio: r.best_ratio,
        error_budget: r.error_budget,
        evaluations: r.evaluations,
        skipped: r.skipped,
        argmax: flatten_params(&r.argmax),
        within_budget: r.within_budget(),
    });
    let report = Report {
        csv: to_csv(
            &[
                "theorem_id",
                "family_id",
                "best_ratio",
                "error_budget",
                "evaluations",
                "skipped",
                "argmax",
                "within_budget",
            ],
            rows,
        ),
        json: to_json(&results),
        text: None,
    };
    Ok((exit, report, stderr))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &str) -> Outcome {
        run_args(std::iter::once("hqr").chain(args.split_whitespace()))
    }

    #[test]
    fn config_file_grammar() {
        let cfg =
            parse_config("# comment\nfamily = shifted-halfplane\nk = 0.5  # trailing\n\nr = 0.5, 0.9\n")
                .unwrap();
        assert_eq!(cfg.family.as_deref(), Some("shifted-halfplane"));
        assert_eq!(cfg.k, Some(0.5));
        assert_eq!(cfg.r, vec![0.5, 0.9]);
        assert!(parse_config("bogus = 1")
            .unwrap_err()
            .0
            .contains("unknown config key `bogus`"));
        assert!(parse_config("k 0.5").is_err());
        assert!(parse_config("k = half").is_err());
    }

    #[test]
    fn flags_win_over_file() {
        let flags = RunConfig {
            k: Some(0.2),
            ..RunConfig::default()
        };
        let file = parse_config("k = 0.5\nc = 2").unwrap();
        let merged = flags.merged_with(file);
        assert_eq!((merged.k, merged.c), (Some(0.2), Some(2.0)));
    }

    #[test]
    fn zero_exponent_on_means_is_usage_error() {
        let out = run_str("means --family shifted-halfplane --k 0 --c 1 --p 0");
        assert_eq!(out.exit, EXIT_USAGE);
        assert!(out.stderr.contains("--p 0 outside (0, inf]"), "{}", out.stderr);
    }

    #[test]
    fn unused_flag_is_rejected() {
        let out = run_str("zoo-list --k 0.5");
        assert_eq!(out.exit, EXIT_USAGE);
        assert!(out.stderr.contains("--k"));
    }

    #[test]
    fn single_verify_passes() {
        let out = run_str("verify --theorem zygmund-hqr --family shifted-halfplane --k 0.5 --c 1 --r 0.9");
        assert_eq!(out.exit, EXIT_OK, "{}", out.stderr);
        let json: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(json["reports"].as_array().unwrap().len(), 1);
        assert_eq!(json["reports"][0]["verdict"], "pass");
    }

    #[test]
    fn inapplicable_family_exits_two() {
        let out = run_str("verify --theorem zygmund-hqr --family tilted-halfplane --s 1 --c 1 --r 0.5");
        assert_eq!(out.exit, EXIT_USAGE);
        assert!(out.stderr.contains("hypothesis"));
    }

    #[test]
    fn out_of_domain_parameter_exits_two() {
        let out = run_str("verify --theorem zygmund-hqr --family shifted-halfplane --k 1.5 --c 1 --r 0.5");
        assert_eq!(out.exit, EXIT_USAGE);
        assert!(out.stderr.contains("`k`"), "{}", out.stderr);
    }

    #[test]
    fn missing_exponent_exits_two() {
        let out =
            run_str("verify --theorem kolmogorov-hqr-upper --family shifted-halfplane --k 0 --c 1 --r 0.5");
        assert_eq!(out.exit, EXIT_USAGE);
        assert!(out.stderr.contains("--p"));
    }

    #[test]
    fn csv_has_documented_columns() {
        let out = run_str(
            "verify --theorem zygmund-classical --family poisson --alpha 0.5 --c 1 --r 0.5,0.9 --format csv",
        );
        assert_eq!(out.exit, EXIT_OK, "{}", out.stderr);
        let mut lines = out.stdout.lines();
        assert_eq!(lines.next().unwrap(), REPORT_COLUMNS.join(","));
        let row: Vec<_> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[0], "zygmund-classical");
        assert_eq!(row[2], "alpha=0.5;c=1");
        assert_eq!(row[4], "");
        assert_eq!(out.stdout.lines().count(), 3);
    }

    #[test]
    fn zoo_list_table_and_json() {
        let table = run_str("zoo-list");
        assert_eq!(table.exit, EXIT_OK);
        for f in FamilyId::REGISTRY {
            assert!(table.stdout.contains(f.name()));
        }
        let json: serde_json::Value =
            serde_json::from_str(&run_str("zoo-list --format json").stdout).unwrap();
        assert_eq!(json.as_array().unwrap().len(), FamilyId::REGISTRY.len());
    }

    #[test]
    fn means_profile_is_monotone_for_f() {
        let out = run_str(
            "means --family shifted-halfplane --k 0.2 --c 1 --r 0.3,0.6,0.9 --quantity mean-of-f --p 1,2",
        );
        assert_eq!(out.exit, EXIT_OK, "{}", out.stderr);
        let json: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        let profiles = json["profiles"].as_array().unwrap();
        assert_eq!(profiles.len(), 2);
        assert!(profiles.iter().all(|p| p["monotone"] == true));
    }

    #[test]
    fn probe_rejects_report_only_theorem() {
        let out = run_str("probe --theorem riesz-ratio");
        assert_eq!(out.exit, EXIT_USAGE);
    }

    #[test]
    fn help_exits_zero() {
        let out = run_str("--help");
        assert_eq!(out.exit, EXIT_OK);
        assert!(out.stdout.contains("zoo-list"));
    }
}
