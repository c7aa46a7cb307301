//! Command-line interface: `cluster`, `validate`, `extend`, `gen` and `score`.
//!
//! Exit codes: 0 on success, 1 on runtime failure, 2 on bad flags or invalid input.

pub mod io;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::affinity::KernelSpec;
use crate::datagen::{gaussian_circle, make_doublets, MixtureSpec};
use crate::error::{Error, Result};
use crate::fire::{cluster, online_assign, ClusterResult, FireParams};
use crate::metrics::{adjusted_rand_index, purity, silhouette};
use crate::montecarlo::{validate_labels, ValidationReport, DEFAULT_ALPHA, DEFAULT_TRIALS};
use io::{fmt_f64, labels_csv, matrix_csv, read_labels, read_matrix, write_atomic};

/// Environment variable capping worker threads (0 or unset = all cores).
pub const THREADS_ENV: &str = "FFC_THREADS";

#[derive(Debug, Parser)]
#[command(name = "ffc", version, about = "Forest Fire Clustering")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster a dataset and write labels plus the heat-over-time trace.
    Cluster(ClusterArgs),
    /// Monte Carlo validation of an existing labeling.
    Validate(ValidateArgs),
    /// Extend a labeled training set to new points.
    Extend(ExtendArgs),
    /// Generate a Gaussian mixture on a circle, optionally with doublets.
    Gen(GenArgs),
    /// Score predicted labels against reference labels.
    Score(ScoreArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelKind {
    Gaussian,
    Adaptive,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[arg(long, value_enum, default_value = "gaussian")]
    pub kernel: KernelKind,
    /// Gaussian bandwidth.
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    /// Neighbour rank for the adaptive bandwidth.
    #[arg(long)]
    pub k: Option<usize>,
    /// Decay exponent of the adaptive kernel.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
}

impl KernelArgs {
    pub fn spec(&self) -> Result<KernelSpec> {
        let kind = match self.kernel {
            KernelKind::Gaussian => "gaussian",
            KernelKind::Adaptive => "adaptive",
        };
        let missing = |name: &'static str| {
            Error::param(name, format!("--{name} is required for the {kind} kernel"))
        };
        match self.kernel {
            KernelKind::Gaussian => Ok(KernelSpec::Gaussian {
                sigma: self.sigma.ok_or_else(|| missing("sigma"))?,
            }),
            KernelKind::Adaptive => Ok(KernelSpec::Adaptive {
                k: self.k.ok_or_else(|| missing("k"))?,
                alpha: self.alpha.ok_or_else(|| missing("alpha"))?,
            }),
        }
    }
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub kernel: KernelArgs,
    /// Fire temperature.
    #[arg(long, allow_negative_numbers = true)]
    pub c: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub labels_out: PathBuf,
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Labels to validate (`index,label`).
    #[arg(long)]
    pub labels: PathBuf,
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub c: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_TRIALS as i64, allow_negative_numbers = true)]
    pub trials: i64,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha_cutoff: f64,
    #[arg(long)]
    pub report_out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExtendArgs {
    /// Training features.
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub train_labels: PathBuf,
    /// New points, processed in row order.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub c: f64,
    #[arg(long)]
    pub labels_out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long, default_value_t = 8)]
    pub k: usize,
    #[arg(long, default_value_t = 0.15)]
    pub sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Ground-truth component labels.
    #[arg(long)]
    pub labels_out: Option<PathBuf>,
    /// Replace 2·N rows by N heterotypic doublets.
    #[arg(long, default_value_t = 0)]
    pub doublets: usize,
    /// Per-row doublet flags (`index,doublet`).
    #[arg(long)]
    pub flags_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    /// Features for the silhouette score.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return 2;
    }
    match run(&cli.command) {
        Ok(summary) => {
            print!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                2
            } else {
                1
            }
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::param("FFC_THREADS", format!("not a thread count: `{raw}`")))?;
    // a second call in the same process is a no-op
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

/// Executes one command and returns the text it prints on success.
pub fn run(command: &Command) -> Result<String> {
    match command {
        Command::Cluster(a) => cmd_cluster(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Extend(a) => cmd_extend(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Score(a) => cmd_score(a),
    }
}

pub fn cmd_cluster(args: &ClusterArgs) -> Result<String> {
    let kernel = args.kernel.spec()?;
    let params = FireParams::new(args.c, args.seed)?;
    let data = read_matrix(&args.input)?;
    let start = Instant::now();
    let graph = kernel.build(&data)?;
    let result = cluster(&graph, params)?;
    let elapsed = start.elapsed();

    write_atomic(&args.labels_out, &labels_csv(&result.labels))?;
    if let Some(path) = &args.trace_out {
        write_atomic(path, &trace_csv(&result))?;
    }
    Ok(format!(
        "clusters: {}\nruntime_ms: {:.3}\n",
        result.num_clusters,
        elapsed.as_secs_f64() * 1e3
    ))
}

pub fn trace_csv(result: &ClusterResult) -> String {
    let mut out = String::from("step,vertex,cluster,heat\n");
    for e in result.trace.entries() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            e.step,
            e.vertex,
            e.cluster,
            fmt_f64(e.heat)
        );
    }
    out
}

pub fn cmd_validate(args: &ValidateArgs) -> Result<String> {
    let kernel = args.kernel.spec()?;
    if args.trials <= 0 {
        return Err(Error::param(
            "trials",
            format!("must be at least 1, got {}", args.trials),
        ));
    }
    let trials = u32::try_from(args.trials).map_err(|_| Error::param("trials", "too large"))?;
    if !(args.alpha_cutoff > 0.0 && args.alpha_cutoff < 1.0) {
        return Err(Error::param("alpha-cutoff", "must lie in (0, 1)"));
    }
    let data = read_matrix(&args.input)?;
    let labels = read_labels(&args.labels)?;
    if labels.len() != data.nrows() {
        return Err(Error::Validation(format!(
            "labels file has {} rows but input has {}",
            labels.len(),
            data.nrows()
        )));
    }
    let graph = kernel.build(&data)?;
    let mut report = validate_labels(&graph, &labels, args.c, trials, args.seed)?;
    report.alpha = args.alpha_cutoff;
    write_atomic(&args.report_out, &report_csv(&report))?;
    let significant = report.significant().iter().filter(|&&s| s).count();
    Ok(format!(
        "trials: {trials}\nsignificant: {significant}/{}\n",
        report.points.len()
    ))
}

pub fn report_csv(report: &ValidationReport) -> String {
    let mut out =
        String::from("index,label,p_value,entropy,coverage,significant,posterior_p_value\n");
    for (i, (p, sig)) in report.points.iter().zip(report.significant()).enumerate() {
        let _ = writeln!(
            out,
            "{i},{},{},{},{},{sig},{}",
            p.label,
            fmt_f64(p.p_value),
            fmt_f64(p.entropy),
            p.coverage,
            fmt_f64(p.posterior_p_value)
        );
    }
    out
}

pub fn cmd_extend(args: &ExtendArgs) -> Result<String> {
    let kernel = args.kernel.spec()?;
    let train = read_matrix(&args.train)?;
    let train_labels = read_labels(&args.train_labels)?;
    let new_points = read_matrix(&args.input)?;
    let out = online_assign(&train, &train_labels, &new_points, kernel, args.c)?;
    let mut csv = String::from("index,label,new_cluster\n");
    for (i, (l, novel)) in out.labels.iter().zip(&out.novel).enumerate() {
        let _ = writeln!(csv, "{i},{l},{novel}");
    }
    write_atomic(&args.labels_out, &csv)?;
    let opened = out
        .labels
        .iter()
        .max()
        .map_or(0, |&m| (m + 1).saturating_sub(out.first_new_id));
    Ok(format!(
        "points: {}\nnew_clusters: {opened}\n",
        out.labels.len()
    ))
}

pub fn cmd_gen(args: &GenArgs) -> Result<String> {
    let spec = MixtureSpec {
        n: args.n,
        k: args.k,
        sigma: args.sigma,
        radius: args.radius,
        seed: args.seed,
    };
    let mixture = gaussian_circle(&spec)?;
    let (data, labels, flags) = if args.doublets > 0 {
        let d = make_doublets(
            &mixture.data,
            &mixture.labels,
            args.doublets,
            args.seed ^ 0xd0b1,
        )?;
        (d.data, d.labels, d.flags)
    } else {
        let n = mixture.labels.len();
        (mixture.data, mixture.labels, vec![false; n])
    };
    write_atomic(&args.out, &matrix_csv(&data))?;
    if let Some(path) = &args.labels_out {
        write_atomic(path, &labels_csv(&labels))?;
    }
    if let Some(path) = &args.flags_out {
        let mut csv = String::from("index,doublet\n");
        for (i, f) in flags.iter().enumerate() {
            let _ = writeln!(csv, "{i},{f}");
        }
        write_atomic(path, &csv)?;
    }
    Ok(format!("points: {}\n", data.nrows()))
}

pub fn cmd_score(args: &ScoreArgs) -> Result<String> {
    let pred = read_labels(&args.pred)?;
    let truth = read_labels(&args.truth)?;
    let mut out = format!(
        "purity: {:.6}\nari: {:.6}\n",
        purity(&pred, &truth)?,
        adjusted_rand_index(&pred, &truth)?
    );
    if let Some(path) = &args.input {
        let data = read_matrix(path)?;
        let _ = writeln!(out, "silhouette: {:.6}", silhouette(&data, &pred)?);
    }
    Ok(out)
}
