//! Command-line front end.
//!
//! Values come from three layers: built-in defaults, an optional TOML config
//! file (`--config`), and flags. A flag always wins over the config file.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::crack::{ComplianceModel, DEFAULT_KAPPA0};
use crate::error::Error;
use crate::model::{
    classify_chirality, omega_from_K, omega_nd, tube_diameter, ChiralityClass, ChiralitySpec,
    PresetTable, NM,
};
use crate::solver::{find_frequencies, mode_shape, SearchConfig};
use crate::sweep::{
    format_number, run_sweep, validation_table, write_csv, Nonlocal, Resolved, SweepContext,
    SweepCrack, SweepParameter, SweepSpec, DEFAULT_SPAN_NM,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const SHAPE_ZERO: f64 = 1e-12;
const VALIDATION_ETAS: [f64; 5] = [0.0, 1.0, 2.0, 3.0, 4.0];

#[derive(Debug, Parser)]
#[command(
    name = "arch-resonance",
    version,
    about = "Natural frequencies of cracked nonlocal CNT arches"
)]
pub struct Invocation {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Natural frequencies of one arch.
    Freq {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fundamental (or --mode) frequency over a parameter range.
    Sweep {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_enum)]
        param: ParamArg,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, default_value_t = 1)]
        mode: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sampled mode shape.
    Modeshape {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value_t = 1)]
        mode: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Straight-limit comparison with the reference table.
    Validate {
        #[arg(long, default_value_t = 0.05)]
        beta: f64,
        /// Span over which the table's nonlocal parameter (nm^2) is scaled.
        #[arg(long, default_value_t = DEFAULT_SPAN_NM)]
        span_nm: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParamArg {
    Beta,
    Eta,
    Radius,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrackModelArg {
    PowerLaw,
    Polynomial,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ProblemArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub presets: Option<PathBuf>,
    /// Central angle, rad.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Nonlocal parameter already divided by R^2.
    #[arg(long, conflicts_with = "eta_nm2")]
    pub eta: Option<f64>,
    /// Physical nonlocal parameter (e0 a)^2 in nm^2.
    #[arg(long)]
    pub eta_nm2: Option<f64>,
    #[arg(long)]
    pub radius_nm: Option<f64>,
    #[arg(long)]
    pub diameter_nm: Option<f64>,
    #[arg(long, requires = "m")]
    pub n: Option<u32>,
    #[arg(long, requires = "n")]
    pub m: Option<u32>,
    /// Preset class; sweeps run all three when unset.
    #[arg(long, value_parser = str::parse::<ChiralityClass>)]
    pub chirality: Option<ChiralityClass>,
    #[arg(long)]
    pub crack_alpha: Option<f64>,
    #[arg(long)]
    pub crack_psi: Option<f64>,
    #[arg(long, value_enum)]
    pub crack_model: Option<CrackModelArg>,
    #[arg(long)]
    pub modes: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Config file sections; keys mirror the flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub material: MaterialConfig,
    #[serde(default)]
    pub crack: CrackConfig,
    #[serde(default)]
    pub nonlocal: NonlocalConfig,
    #[serde(default)]
    pub search: SearchSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct GeometryConfig {
    pub beta: Option<f64>,
    pub radius_nm: Option<f64>,
    pub diameter_nm: Option<f64>,
    pub n: Option<u32>,
    pub m: Option<u32>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct MaterialConfig {
    pub chirality: Option<ChiralityClass>,
    /// Presets file, relative to the config file.
    pub presets: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrackConfig {
    pub model: Option<CrackModelArg>,
    pub kappa0: Option<f64>,
    pub coefficients: Option<Vec<f64>>,
    pub scale: Option<f64>,
    pub psi: Option<f64>,
    pub alpha_rad: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct NonlocalConfig {
    pub eta: Option<f64>,
    pub eta_nm2: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SearchSection {
    pub modes: Option<usize>,
    pub k_min: Option<f64>,
    pub k_max: Option<f64>,
    pub grid_points: Option<usize>,
    pub refine_tol: Option<f64>,
}

/// Failure of a command, split by exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Runtime(format!("i/o error: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

pub fn parse<I, T>(args: I) -> Result<Invocation, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Invocation::try_parse_from(args)
}

pub fn load_config(path: &Path) -> CliResult<ConfigFile> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut cfg: ConfigFile = toml::from_str(&text)
        .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))?;
    if let Some(p) = cfg.material.presets.as_mut() {
        if p.is_relative() {
            *p = path.parent().unwrap_or(Path::new(".")).join(&*p);
        }
    }
    Ok(cfg)
}

/// Resolved inputs shared by every problem-based command.
#[derive(Debug, Clone)]
pub struct Setup {
    pub context: SweepContext,
    pub chirality: Option<ChiralityClass>,
    pub modes: usize,
}

pub fn build_setup(args: &ProblemArgs) -> CliResult<Setup> {
    let cfg = match &args.config {
        Some(p) => load_config(p)?,
        None => ConfigFile::default(),
    };
    let mut ctx = SweepContext::default();

    if let Some(path) = args.presets.as_ref().or(cfg.material.presets.as_ref()) {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read presets {}: {e}", path.display())))?;
        ctx.presets = PresetTable::parse(&text).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    if let Some(beta) = args.beta.or(cfg.geometry.beta) {
        ctx.beta = beta;
    }

    ctx.nonlocal = match (args.eta, args.eta_nm2) {
        (Some(e), _) => Nonlocal::Dimensionless(e),
        (_, Some(e)) => Nonlocal::Physical(e * NM * NM),
        (None, None) => match (cfg.nonlocal.eta, cfg.nonlocal.eta_nm2) {
            (Some(_), Some(_)) => {
                return Err(CliError::Usage(
                    "[nonlocal] sets both eta and eta-nm2".into(),
                ))
            }
            (Some(e), None) => Nonlocal::Dimensionless(e),
            (None, Some(e)) => Nonlocal::Physical(e * NM * NM),
            (None, None) => ctx.nonlocal,
        },
    };

    let mut chirality = args.chirality.or(cfg.material.chirality);
    let indices = match (args.n, args.m) {
        (Some(n), Some(m)) => Some((n, m)),
        _ => match (cfg.geometry.n, cfg.geometry.m) {
            (Some(n), Some(m)) => Some((n, m)),
            (None, None) => None,
            _ => return Err(CliError::Usage("[geometry] needs both n and m".into())),
        },
    };
    if let Some((n, m)) = indices {
        let spec = ChiralitySpec::new(n, m).map_err(|e| CliError::Usage(e.to_string()))?;
        chirality.get_or_insert(classify_chirality(&spec));
        ctx.diameter = Some(tube_diameter(&spec) * NM);
    }
    if let Some(d) = args.diameter_nm.or(cfg.geometry.diameter_nm) {
        ctx.diameter = Some(d * NM);
    }
    if let Some(r) = args.radius_nm.or(cfg.geometry.radius_nm) {
        ctx.radius = Some(r * NM);
    }

    let psi = args.crack_psi.or(cfg.crack.psi);
    let alpha = args.crack_alpha.or(cfg.crack.alpha_rad);
    ctx.crack = match psi {
        Some(psi) => {
            let model = match args
                .crack_model
                .or(cfg.crack.model)
                .unwrap_or(CrackModelArg::PowerLaw)
            {
                CrackModelArg::PowerLaw => {
                    ComplianceModel::power_law(cfg.crack.kappa0.unwrap_or(DEFAULT_KAPPA0))?
                }
                CrackModelArg::Polynomial => {
                    let coefficients = cfg.crack.coefficients.clone().ok_or_else(|| {
                        CliError::Usage("polynomial crack model needs [crack] coefficients".into())
                    })?;
                    ComplianceModel::polynomial(coefficients, cfg.crack.scale.unwrap_or(1.0))?
                }
            };
            Some(SweepCrack { alpha, psi, model })
        }
        None if alpha.is_some() => {
            return Err(CliError::Usage(
                "crack position given without --crack-psi".into(),
            ))
        }
        None => None,
    };

    let s = &cfg.search;
    let defaults = SearchConfig::default();
    ctx.search = SearchConfig {
        k_min: s.k_min.unwrap_or(defaults.k_min),
        k_max: s.k_max.or(defaults.k_max),
        grid_points: s.grid_points.unwrap_or(defaults.grid_points),
        refine_tol: s.refine_tol.unwrap_or(defaults.refine_tol),
        max_modes: defaults.max_modes,
    };
    let modes = args.modes.or(s.modes).unwrap_or(defaults.max_modes);
    if modes == 0 {
        return Err(CliError::Usage("--modes must be at least 1".into()));
    }
    ctx.search.max_modes = modes;
    Ok(Setup {
        context: ctx,
        chirality,
        modes,
    })
}

fn problem_json(r: &Resolved) -> serde_json::Value {
    let p = &r.problem;
    json!({
        "chirality": r.chirality,
        "beta_rad": p.beta(),
        "eta_nd": p.eta_nd(),
        "radius_m": r.tube.radius(),
        "diameter_m": r.tube.diameter(),
        "youngs_modulus_pa": r.tube.youngs_modulus(),
        "wall_thickness_m": r.tube.wall_thickness(),
        "mass_per_length_kg_per_m": r.tube.mass_per_length(),
        "crack": p.crack().map(|c| json!({ "alpha_rad": c.alpha, "theta": c.theta, "psi": r.psi })),
    })
}

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &mut dyn Iterator<Item = &str>| {
        let parts: Vec<String> = cells
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&mut header.iter().copied());
    for row in rows {
        line(&mut row.iter().map(String::as_str));
    }
    out
}

fn blank_or(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

fn freq(setup: &Setup, format: Format) -> CliResult<String> {
    let point = setup
        .context
        .resolve(setup.chirality.unwrap_or(ChiralityClass::Armchair))?;
    let spectrum = find_frequencies(&point.problem, &setup.context.search)?;
    let beta = point.problem.beta();
    let rows: Vec<(usize, f64, f64, f64, &str)> = spectrum
        .modes
        .iter()
        .enumerate()
        .map(|(i, m)| {
            (
                i + 1,
                m.K,
                omega_nd(m.K, beta),
                omega_from_K(m.K, &point.tube),
                m.flag.as_str(),
            )
        })
        .collect();
    Ok(match format {
        Format::Json => {
            let spectrum: Vec<_> = rows
                .iter()
                .map(|&(mode, k, w, w_si, flag)| {
                    json!({ "mode": mode, "K": k, "omega_nd": w, "omega_rad_s": w_si, "flag": flag })
                })
                .collect();
            let doc = json!({ "problem": problem_json(&point), "spectrum": spectrum });
            serde_json::to_string_pretty(&doc).expect("json") + "\n"
        }
        Format::Csv => {
            let mut s = String::from("mode,K,omega_nd,omega_rad_s,flag\n");
            for &(mode, k, w, w_si, flag) in &rows {
                let _ = writeln!(
                    s,
                    "{mode},{},{},{},{flag}",
                    format_number(k),
                    format_number(w),
                    format_number(w_si)
                );
            }
            s
        }
        Format::Table => {
            let mut s = format!("K1 = {}\n", format_number(rows[0].1));
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|&(mode, k, w, w_si, flag)| {
                    vec![
                        mode.to_string(),
                        format_number(k),
                        format_number(w),
                        format_number(w_si),
                        flag.into(),
                    ]
                })
                .collect();
            s.push_str(&table(
                &["mode", "K", "omega_nd", "omega_rad_s", "flag"],
                &body,
            ));
            s
        }
    })
}

fn sweep(spec: &SweepSpec, format: Format) -> CliResult<String> {
    let rows = run_sweep(spec).map_err(|e| match e {
        Error::InvalidSpec(_) => CliError::Usage(e.to_string()),
        other => other.into(),
    })?;
    Ok(match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf)?;
            String::from_utf8(buf).expect("ascii csv")
        }
        Format::Json => serde_json::to_string_pretty(&rows).expect("json") + "\n",
        Format::Table => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.chirality.to_string(),
                        format_number(r.beta),
                        format_number(r.eta_nd),
                        format_number(r.radius_m),
                        r.mode.to_string(),
                        blank_or(r.K),
                        blank_or(r.omega_nd),
                        blank_or(r.omega_rad_s),
                        r.note.clone(),
                    ]
                })
                .collect();
            table(
                &[
                    "chirality",
                    "beta_rad",
                    "eta_nd",
                    "radius_m",
                    "mode",
                    "K",
                    "omega_nd",
                    "omega_rad_s",
                    "note",
                ],
                &body,
            )
        }
    })
}

fn modeshape(setup: &Setup, mode: usize, samples: usize, format: Format) -> CliResult<String> {
    if mode == 0 || samples < 2 {
        return Err(CliError::Usage(
            "--mode must be >= 1 and --samples >= 2".into(),
        ));
    }
    let point = setup
        .context
        .resolve(setup.chirality.unwrap_or(ChiralityClass::Armchair))?;
    let cfg = SearchConfig {
        max_modes: setup.modes.max(mode),
        ..setup.context.search
    };
    let spectrum = find_frequencies(&point.problem, &cfg)?;
    let m = spectrum
        .modes
        .get(mode - 1)
        .ok_or_else(|| CliError::Runtime(format!("only {} modes found", spectrum.len())))?;
    // round-off at the supports would otherwise print as platform-dependent noise
    let shape: Vec<(f64, f64)> = mode_shape(&point.problem, m, samples)
        .into_iter()
        .map(|(phi, x)| (phi, if x.abs() < SHAPE_ZERO { 0.0 } else { x }))
        .collect();
    Ok(match format {
        Format::Json => {
            let doc = json!({
                "problem": problem_json(&point),
                "mode": { "mode": mode, "K": m.K, "omega_nd": omega_nd(m.K, point.problem.beta()),
                          "omega_rad_s": omega_from_K(m.K, &point.tube), "flag": m.flag.as_str() },
                "shape": shape.iter().map(|&(phi, x)| json!({ "phi_rad": phi, "X": x })).collect::<Vec<_>>(),
            });
            serde_json::to_string_pretty(&doc).expect("json") + "\n"
        }
        Format::Csv => {
            let mut s = String::from("phi_rad,X\n");
            for &(phi, x) in &shape {
                let _ = writeln!(s, "{},{}", format_number(phi), format_number(x));
            }
            s
        }
        Format::Table => {
            let body: Vec<Vec<String>> = shape
                .iter()
                .map(|&(phi, x)| vec![format_number(phi), format_number(x)])
                .collect();
            table(&["phi_rad", "X"], &body)
        }
    })
}

fn validate(beta: f64, span_nm: f64, format: Format) -> CliResult<String> {
    let rows = validation_table(beta, &VALIDATION_ETAS, span_nm)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&rows).expect("json") + "\n",
        Format::Csv => {
            let mut s = String::from("mode,eta,eta_nd,omega,present,thai\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    r.mode,
                    format_number(r.eta),
                    format_number(r.eta_nd),
                    blank_or(r.omega),
                    blank_or(r.present),
                    blank_or(r.thai)
                );
            }
            s
        }
        Format::Table => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let fixed = |x: Option<f64>| x.map(|v| format!("{v:.5}")).unwrap_or_default();
                    vec![
                        r.mode.to_string(),
                        format!("{}", r.eta),
                        fixed(r.omega),
                        fixed(r.present),
                        fixed(r.thai),
                    ]
                })
                .collect();
            let mut s =
                format!("beta = {beta} rad, span = {span_nm} nm, Omega = sqrt(K1) beta^2\n");
            s.push_str(&table(&["mode", "eta", "Omega", "present", "thai"], &body));
            s
        }
    })
}

fn sweep_spec(
    setup: Setup,
    param: ParamArg,
    from: Option<f64>,
    to: Option<f64>,
    steps: Option<usize>,
    mode: usize,
) -> SweepSpec {
    let parameter = match param {
        ParamArg::Beta => SweepParameter::Beta,
        ParamArg::Eta => SweepParameter::Eta,
        ParamArg::Radius => SweepParameter::Radius,
    };
    // radius bounds are given in nm on the command line
    let unit = if parameter == SweepParameter::Radius {
        NM
    } else {
        1.0
    };
    let mut spec = SweepSpec::new(parameter, setup.context);
    spec.from = from.map_or(spec.from, |v| v * unit);
    spec.to = to.map_or(spec.to, |v| v * unit);
    spec.steps = steps.unwrap_or(spec.steps);
    spec.mode = mode;
    if let Some(c) = setup.chirality {
        spec.chiralities = vec![c];
    }
    spec
}

/// Executes a parsed invocation and returns the rendered output and target.
pub fn execute(inv: Invocation) -> CliResult<(String, Option<PathBuf>)> {
    let (text, output) = match inv.command {
        Command::Freq { problem, output } => {
            let setup = build_setup(&problem)?;
            (
                freq(&setup, output.format.unwrap_or(Format::Table))?,
                output,
            )
        }
        Command::Sweep {
            problem,
            param,
            from,
            to,
            steps,
            mode,
            output,
        } => {
            let spec = sweep_spec(build_setup(&problem)?, param, from, to, steps, mode);
            (sweep(&spec, output.format.unwrap_or(Format::Csv))?, output)
        }
        Command::Modeshape {
            problem,
            mode,
            samples,
            output,
        } => {
            let setup = build_setup(&problem)?;
            (
                modeshape(&setup, mode, samples, output.format.unwrap_or(Format::Csv))?,
                output,
            )
        }
        Command::Validate {
            beta,
            span_nm,
            output,
        } => (
            validate(beta, span_nm, output.format.unwrap_or(Format::Table))?,
            output,
        ),
    };
    Ok((text, output.out))
}

/// Full command-line run; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let inv = match parse(args) {
        Ok(inv) => inv,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    let result = execute(inv).and_then(|(text, path)| {
        match path {
            Some(p) => fs::write(&p, text)
                .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", p.display())))?,
            None => stdout.write_all(text.as_bytes())?,
        }
        Ok(())
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Runtime(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_FAILURE
        }
    }
}
