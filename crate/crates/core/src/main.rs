use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rn_spectra::cli::{gen_fixture, run_analysis, Fixture, RunConfig, DUAL_FORM_TOL};
use rn_spectra::models::{default_step, StageKind, StageSpec};
use rn_spectra::{DxMode, Error, Family};

#[derive(Parser)]
#[command(
    name = "rn-spectra",
    version,
    about = "Radon-Nikodym spectra of sampled timeseries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Interpolate a timeserie and write its pencil spectra
    Analyze {
        /// Two-column tab-separated input, `|` starts a comment line
        input: PathBuf,
        /// Basis dimension
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=150))]
        n: u32,
        #[arg(long, value_enum)]
        dx: DxArg,
        #[arg(long, value_enum, default_value_t = BasisArg::Chebyshev)]
        basis: BasisArg,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Write a model signal in the input format
    Gen {
        #[command(subcommand)]
        model: Model,
    },
}

#[derive(Subcommand)]
enum Model {
    /// Piecewise-linear two-stage degradation
    TwoStage(StageArgs),
    /// Piecewise-exponential multi-stage relaxation
    MultiExp(StageArgs),
    /// Runge function on [-1, 1]
    Runge {
        #[arg(long, default_value_t = 2001)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct StageArgs {
    /// Comma-separated slope (linear) or exponent (exponential) per stage
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    rates: Option<Vec<f64>>,
    /// Comma-separated stage durations
    #[arg(long, value_delimiter = ',')]
    lengths: Option<Vec<f64>>,
    /// Sampling interval; defaults to the shortest stage / 500
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DxArg {
    Sample,
    Analytical,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    Chebyshev,
    Legendre,
    Monomial,
}

impl StageArgs {
    fn spec(&self, kind: StageKind, rates: &[f64], lengths: &[f64]) -> Result<StageSpec, Error> {
        let rates = self.rates.clone().unwrap_or_else(|| rates.to_vec());
        let lengths = self.lengths.clone().unwrap_or_else(|| lengths.to_vec());
        let step = self.step.unwrap_or_else(|| default_step(&lengths));
        StageSpec::new(rates, lengths, step, kind)
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Analyze {
            input,
            n,
            dx,
            basis,
            out,
        } => {
            let cfg = RunConfig {
                input_path: input,
                n: n as usize,
                dx_mode: match dx {
                    DxArg::Sample => DxMode::SampleDX,
                    DxArg::Analytical => DxMode::AnalyticalDX,
                },
                basis: match basis {
                    BasisArg::Chebyshev => Family::Chebyshev,
                    BasisArg::Legendre => Family::Legendre,
                    BasisArg::Monomial => Family::Monomial,
                },
                output_dir: out,
            };
            let report = run_analysis(&cfg)?;
            if report.dual_form_discrepancy > DUAL_FORM_TOL {
                eprintln!(
                    "warning: direct and eigenbasis interpolation differ by {:.3e}, results are numerically unstable",
                    report.dual_form_discrepancy
                );
            }
            for kind in &report.defective {
                eprintln!("note: right-hand matrix of {kind:?} pencil is not positive definite, eigenvalues set to NaN");
            }
            eprintln!(
                "by-parts derivative moments differ from direct ones by {:.3e} (relative)",
                report.byparts_discrepancy
            );
            for f in &report.files {
                println!("{}", f.display());
            }
        }
        Command::Gen { model } => {
            let (fixture, out) = match model {
                Model::TwoStage(a) => (
                    Fixture::TwoStage(a.spec(
                        StageKind::LinearDecay,
                        &[-0.01, -0.1],
                        &[10.0, 10.0],
                    )?),
                    a.out,
                ),
                Model::MultiExp(a) => (
                    Fixture::MultiExp(a.spec(
                        StageKind::ExponentialDecay,
                        &[-0.4, -0.2, -0.1],
                        &[7.0, 7.0, 7.0],
                    )?),
                    a.out,
                ),
                Model::Runge { count, out } => (Fixture::Runge(count), out),
            };
            gen_fixture(&fixture, out.as_deref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
