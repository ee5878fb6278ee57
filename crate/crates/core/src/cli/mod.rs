//! Command-line front end: `sweep`, `zeros`, `phase` and `reproduce`.
//!
//! Exit status is 0 on success, 1 for usage and configuration errors and 2
//! for physically invalid input or failed I/O.

pub mod config;
pub mod output;
pub mod presets;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::model::ModelError;
use crate::spectra::{self, SpectraError, Spectrum};

pub use config::{parse_config, ConfigError, ScenarioConfig};
pub use output::{format_g12, parse_manifest, write_manifest, Manifest, ManifestError};
pub use presets::{figure, figure_ids, preset_config, Curve, Figure, OutputKind};

pub const MANIFEST_FILE: &str = "manifest.txt";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Domain(_) | CliError::Io { .. } => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Domain(m) => f.write_str(m),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Usage(format!("invalid configuration: {e}"))
    }
}

impl From<ManifestError> for CliError {
    fn from(e: ManifestError) -> Self {
        CliError::Usage(format!("invalid manifest: {e}"))
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<SpectraError> for CliError {
    fn from(e: SpectraError) -> Self {
        CliError::Domain(e.to_string())
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Parser, Debug)]
#[command(name = "tridot", version, about = "Transport through a PT-symmetric triple quantum dot")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate T(ω), τ(ω) and the path weights as CSV.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Numerical and analytic transmission zeros.
    Zeros {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// π jumps of the transmission phase.
    Phase {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Also write the phase table to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate the data behind a figure.
    Reproduce {
        /// Figure identifier, e.g. fig4b.
        #[arg(required_unless_present = "manifest", conflicts_with = "manifest")]
        figure: Option<String>,
        /// Regenerate from a previously written manifest instead.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Directory for the CSV files and manifest.txt; created if missing.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct ScenarioArgs {
    /// Scenario file with `key = value` lines.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Use the parameters of a figure instead of a file.
    #[arg(long)]
    preset: Option<String>,
    /// Override the loss/gain rate.
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
}

fn unknown_figure(id: &str) -> CliError {
    CliError::Usage(format!(
        "unknown figure `{id}`; known: {}",
        figure_ids().join(", ")
    ))
}

impl ScenarioArgs {
    fn resolve(&self) -> Result<ScenarioConfig, CliError> {
        let base = match (&self.config, &self.preset) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path).map_err(io_err(path))?;
                parse_config(&text)?
            }
            (None, Some(id)) => preset_config(id, None).ok_or_else(|| unknown_figure(id))?,
            (None, None) => return Err(CliError::Usage("either --config or --preset is required".into())),
        };
        Ok(match self.gamma {
            Some(g) => base.with_gamma(g),
            None => base,
        })
    }
}

/// Sweep the grid of a configuration.
pub fn compute(config: &ScenarioConfig) -> Result<Spectrum, CliError> {
    let leads = config.leads()?;
    Ok(spectra::sweep(
        &config.system(),
        &leads,
        config.omega_min,
        config.omega_max,
        config.n_points,
    )?)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(io_err(path))
}

pub fn run_sweep(config: &ScenarioConfig, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let csv = output::spectrum_csv(&compute(config)?);
    match out {
        Some(path) => write_file(path, &csv),
        None => stdout.write_all(csv.as_bytes()).map_err(io_err(Path::new("<stdout>"))),
    }
}

fn describe(config: &ScenarioConfig) -> String {
    let mut s = format!(
        "{} t0={} E0={} E2={} tc={}",
        config.geometry.as_str(),
        config.t0,
        config.e0,
        config.e2,
        config.tc
    );
    if config.geometry == crate::model::Geometry::Ring {
        s.push_str(&format!(" t3={}", config.t3));
    }
    s.push_str(&format!(" v1={} v2={} gamma={}", config.v1, config.v2, config.gamma));
    s
}

fn join(xs: &[f64]) -> String {
    if xs.is_empty() {
        "none".into()
    } else {
        xs.iter().map(|x| format_g12(*x)).collect::<Vec<_>>().join(" ")
    }
}

/// Print the zero report. Machine-readable lines have the form
/// `zero <omega> <analytic|numeric|both>`.
pub fn run_zeros(config: &ScenarioConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let spectrum = compute(config)?;
    let report = spectra::find_zeros(&spectrum);
    let mut text = format!(
        "scenario  {}\ngrid      {} points on [{}, {}], spacing {}\n",
        describe(config),
        config.n_points,
        format_g12(config.omega_min),
        format_g12(config.omega_max),
        format_g12(report.spacing),
    );
    match &report.analytic {
        Some(a) => {
            text.push_str(&format!(
                "analytic  x={} delta={} discriminant={}{}\n          roots: {}  decoupled: {}\n",
                format_g12(a.x),
                format_g12(a.delta),
                format_g12(a.discriminant),
                if a.degenerate { " (double root)" } else { "" },
                join(&a.roots),
                join(&a.decoupled),
            ));
        }
        None => text.push_str("analytic  no closed form for this coupling pattern\n"),
    }

    let mut lines: Vec<(f64, String)> = Vec::new();
    for m in &report.matched {
        lines.push((m.analytic, "both".into()));
    }
    for &w in &report.unmatched_numeric {
        lines.push((w, "numeric".into()));
    }
    for &w in &report.unmatched_analytic {
        lines.push((w, "analytic".into()));
    }
    lines.sort_by(|a, b| a.0.total_cmp(&b.0));
    if lines.is_empty() {
        text.push_str("no real zeros\n");
    }
    for (w, source) in lines {
        let t = report
            .numeric_zeros
            .iter()
            .find(|z| (z.omega - w).abs() <= 2.0 * report.spacing)
            .map_or("-".to_string(), |z| format_g12(z.transmission));
        text.push_str(&format!("zero {:>20} {:<8} T={}\n", format_g12(w), source, t));
    }
    stdout
        .write_all(text.as_bytes())
        .map_err(io_err(Path::new("<stdout>")))
}

/// Print the π jumps of the transmission phase, `jump <omega> <size>` per line.
pub fn run_phase(config: &ScenarioConfig, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let spectrum = compute(config)?;
    let jumps = spectra::detect_phase_jumps(&spectrum);
    let report = spectra::find_zeros(&spectrum);
    let coincidence = spectra::phase_zero_coincidence(&jumps, &report, 2.0 * report.spacing);
    let mut text = format!("scenario  {}\n", describe(config));
    if jumps.is_empty() {
        text.push_str("no phase jumps\n");
    }
    for j in &jumps {
        text.push_str(&format!("jump {:>20} {:>16}\n", format_g12(j.omega), format_g12(j.jump)));
    }
    text.push_str(&format!(
        "coincidence  {} paired, {} unpaired jumps, {} unpaired simple zeros\n",
        coincidence.pairs.len(),
        coincidence.unpaired_jumps.len(),
        coincidence.unpaired_zeros.len()
    ));
    if let Some(path) = out {
        write_file(path, &output::phase_csv(&spectrum))?;
    }
    stdout
        .write_all(text.as_bytes())
        .map_err(io_err(Path::new("<stdout>")))
}

/// Write every file listed in a manifest, plus the manifest itself.
pub fn run_manifest(manifest: &Manifest, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut written = Vec::new();
    for curve in &manifest.curves {
        if curve.file.contains(['/', '\\']) || curve.file.starts_with('.') {
            return Err(CliError::Usage(format!("refusing to write `{}` outside the output directory", curve.file)));
        }
        let spectrum = compute(&curve.config)?;
        let path = out_dir.join(&curve.file);
        write_file(&path, &output::render(curve.kind, &spectrum))?;
        written.push(path);
    }
    let path = out_dir.join(MANIFEST_FILE);
    write_file(&path, &write_manifest(manifest))?;
    written.push(path);
    Ok(written)
}

pub fn run_reproduce(figure_id: &str, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let fig = figure(figure_id).ok_or_else(|| unknown_figure(figure_id))?;
    run_manifest(&Manifest::from(&fig), out_dir)
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Sweep { scenario, out } => run_sweep(&scenario.resolve()?, out.as_deref(), stdout),
        Command::Zeros { scenario } => run_zeros(&scenario.resolve()?, stdout),
        Command::Phase { scenario, out } => run_phase(&scenario.resolve()?, out.as_deref(), stdout),
        Command::Reproduce { figure, manifest, out } => {
            let written = match (figure, manifest) {
                (_, Some(path)) => {
                    let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
                    run_manifest(&parse_manifest(&text)?, &out)?
                }
                (Some(id), None) => run_reproduce(&id, &out)?,
                (None, None) => return Err(CliError::Usage("a figure id or --manifest is required".into())),
            };
            for p in written {
                writeln!(stdout, "wrote {}", p.display()).map_err(io_err(Path::new("<stdout>")))?;
            }
            Ok(())
        }
    }
}

/// Parse `args` (program name first), run, and return the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(rendered.as_bytes())
            } else {
                stderr.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut full = vec!["tridot"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_args(&[]).0, 1);
        assert_eq!(run_args(&["bogus"]).0, 1);
        assert_eq!(run_args(&["sweep"]).0, 1);
        assert_eq!(run_args(&["zeros", "--preset", "fig9"]).0, 1);
        assert_eq!(run_args(&["reproduce", "--out", "x"]).0, 1);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("reproduce"));
    }

    #[test]
    fn zeros_on_a_preset() {
        let (code, out, _) = run_args(&["zeros", "--preset", "fig5b", "--gamma", "0.4"]);
        assert_eq!(code, 0, "{out}");
        let zeros: Vec<(f64, &str)> = out
            .lines()
            .filter_map(|l| l.strip_prefix("zero "))
            .map(|l| {
                let mut it = l.split_whitespace();
                (it.next().unwrap().parse().unwrap(), it.next().unwrap())
            })
            .collect();
        assert_eq!(zeros, [(-0.5, "both"), (0.5, "both")]);
    }

    #[test]
    fn no_real_zeros_message() {
        let (code, out, _) = run_args(&["zeros", "--preset", "fig8c", "--gamma", "0.3"]);
        assert_eq!(code, 0);
        assert!(out.contains("no real zeros"), "{out}");
    }

    #[test]
    fn negative_gamma_is_accepted() {
        let (code, out, _) = run_args(&["phase", "--preset", "fig8a", "--gamma", "-0.3"]);
        assert_eq!(code, 0, "{out}");
    }
}
