use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use mesochaos_harness::{
    emit_figure, run, ExperimentSpec, FigureStyle, Kind, ResultRecord, OUT_ENV,
};

#[derive(Parser)]
#[command(
    name = "mesochaos",
    version,
    about = "Mesoscopic chaos experiments: CUE, sine process and Gaussian chaos"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment spec, TOML or JSON.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the master seed from the spec.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory [default: $MESOCHAOS_OUT, else ./results].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for row-level parallelism.
    #[arg(long)]
    threads: Option<usize>,
    /// Validate the spec and exit.
    #[arg(long)]
    check: bool,
    /// Also write an SVG figure in this style.
    #[arg(long, value_enum)]
    figure: Option<FigureStyle>,
}

#[derive(Subcommand)]
enum Command {
    /// Borodin–Okounkov identity residuals.
    BoCheck(RunArgs),
    /// CUE Laplace transform against the Gaussian prediction.
    CueLaplace(RunArgs),
    /// CUE chaos mass moments.
    CueMoments(RunArgs),
    /// Sine-process Laplace transform asymptotics.
    SineLaplace(RunArgs),
    /// Sine-process gap probabilities.
    SineGap(RunArgs),
    /// Sine-process chaos mass moments.
    SineMoments(RunArgs),
    /// Gaussian multiplicative chaos simulation.
    GmcSimulate(RunArgs),
    /// Covariance kernel assumption checks.
    CovarianceSuite(RunArgs),
    /// Selberg and Dyson integrals against quadrature.
    SelbergTable(RunArgs),
    /// Draw a figure from a stored record.
    Plot {
        /// Record CSV; its `.meta.json` sidecar must sit next to it.
        record: PathBuf,
        #[arg(long, value_enum)]
        style: FigureStyle,
        /// Output SVG [default: next to the record].
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn out_dir(arg: Option<PathBuf>, spec: &ExperimentSpec) -> PathBuf {
    arg.or_else(|| spec.output.clone())
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("results"))
}

fn run_kind(kind: Kind, args: RunArgs) -> Result<bool> {
    let mut spec = ExperimentSpec::from_path(&args.config)?;
    if spec.kind != kind {
        return Err(mesochaos_harness::HarnessError::KindMismatch {
            config: spec.kind.to_string(),
            requested: kind.to_string(),
        }
        .into());
    }
    if let Some(s) = args.seed {
        spec.seed = s;
    }
    let resolved = spec.resolve()?;
    if args.check {
        println!("{kind}: spec is valid");
        println!("{resolved:#?}");
        return Ok(true);
    }
    if let Some(k) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .context("configuring worker threads")?;
    }
    let dir = out_dir(args.out, &spec);
    let record = run(&spec)?;
    let paths = record.write(&dir)?;
    println!("wrote {}", paths.csv.display());
    println!("wrote {}", paths.meta.display());
    if let Some(style) = args.figure.or(spec.figure) {
        if record.rows.is_empty() {
            eprintln!("no rows, skipping figure");
        } else {
            let fig = emit_figure(&record, style)?;
            let svg = paths.csv.with_extension("svg");
            std::fs::write(&svg, fig.svg).with_context(|| format!("writing {}", svg.display()))?;
            println!("wrote {}", svg.display());
        }
    }
    let failed = record
        .meta
        .summary
        .get("failed_rows")
        .and_then(|v| v.as_u64())
        .unwrap_or(0);
    let all_pass = record
        .meta
        .summary
        .get("all_pass")
        .and_then(|v| v.as_bool());
    println!(
        "{kind} ({}): {} rows, {failed} failed, {:.1}s{}",
        record.meta.anchor,
        record.rows.len(),
        record.meta.wall_time_s,
        match all_pass {
            Some(true) => ", all within tolerance",
            Some(false) => ", some rows outside tolerance",
            None => "",
        }
    );
    Ok(failed == 0 && all_pass != Some(false))
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    let ok = match cli.command {
        Command::BoCheck(a) => run_kind(Kind::BoCheck, a)?,
        Command::CueLaplace(a) => run_kind(Kind::CueLaplace, a)?,
        Command::CueMoments(a) => run_kind(Kind::CueMoments, a)?,
        Command::SineLaplace(a) => run_kind(Kind::SineLaplace, a)?,
        Command::SineGap(a) => run_kind(Kind::SineGap, a)?,
        Command::SineMoments(a) => run_kind(Kind::SineMoments, a)?,
        Command::GmcSimulate(a) => run_kind(Kind::GmcSimulate, a)?,
        Command::CovarianceSuite(a) => run_kind(Kind::CovarianceSuite, a)?,
        Command::SelbergTable(a) => run_kind(Kind::SelbergTable, a)?,
        Command::Plot { record, style, out } => {
            let rec = ResultRecord::read(&record)?;
            let fig = emit_figure(&rec, style)?;
            let path = out.unwrap_or_else(|| record.with_extension("svg"));
            std::fs::write(&path, fig.svg)
                .with_context(|| format!("writing {}", path.display()))?;
            println!("wrote {}", path.display());
            true
        }
    };
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
