use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qswitch::entanglement::LogBase;
use qswitch::sweep::{
    self, diff_sweep, emit, parse_angle, parse_axis, run_sweep, verify_config, verify_suite, Axis,
    ChannelSpec, Format, Measure, Perturb, SweepConfig, DEFAULT_P,
};
use qswitch::Error;

/// Sweeps, closed-form checks and noise comparisons for the three-qubit
/// quantum switch acting on |A01> with |A> = sin(a)|0> + cos(a)|1>.
#[derive(Parser)]
#[command(name = "qswitch", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a measure over an (a, t) grid.
    Sweep(GridArgs),
    /// |noisy - clean| of a measure over an (a, t) grid; needs --channel.
    Diff(GridArgs),
    /// Compare numeric pipelines with closed forms; exit 1 on any failure.
    Verify(VerifyArgs),
    /// Average gate fidelity over a (p, t) grid; the `a` column holds p.
    AvgFidelity(GridArgs),
}

#[derive(Args, Clone)]
struct GridArgs {
    /// schmidt, ppt, concurrence, iconcurrence, entropy, fidelity or avg_fidelity
    #[arg(long)]
    measure: Option<String>,
    /// Angle of |A>: a value or lo:hi, e.g. `pi/4` or `0:pi/2`
    #[arg(long, default_value = "0:pi/2")]
    a: String,
    #[arg(long, default_value_t = 21)]
    a_steps: usize,
    #[arg(long, default_value = "0")]
    t_min: String,
    #[arg(long, default_value = "pi/2")]
    t_max: String,
    #[arg(long, default_value_t = 101)]
    t_steps: usize,
    /// Noise channel: pf, bf, ad or pd
    #[arg(long)]
    channel: Option<String>,
    /// Decoherence probability; pf/bf are noiseless at 1, ad/pd at 0.
    /// avg-fidelity also accepts lo:hi (default 0:1).
    #[arg(long)]
    p: Option<String>,
    /// Points on the p axis of avg-fidelity
    #[arg(long, default_value_t = 21)]
    p_steps: usize,
    /// Qubit the channel acts on: 0 (A) or 1 (B); avg-fidelity also allows 2
    #[arg(long, default_value_t = 0)]
    noise_qubit: usize,
    /// Entropy logarithm: e (nats) or 2 (bits)
    #[arg(long, default_value = "e")]
    log_base: String,
    /// csv or json
    #[arg(long, default_value = "csv")]
    format: String,
    /// Output file; standard output when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for Monte Carlo checks
    #[arg(long, default_value_t = 2017)]
    seed: u64,
    /// Fill the closed-form and error columns
    #[arg(long)]
    compare: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Add 1e-6 to the closed form of one measure (or `all`) to confirm the
    /// suite fails
    #[arg(long)]
    perturb: Option<String>,
    /// Override the tolerance of a single-measure check
    #[arg(long)]
    tol: Option<f64>,
}

fn build_config(args: &GridArgs, measure: Measure) -> Result<SweepConfig, Error> {
    let t = Axis::new(parse_angle(&args.t_min)?, parse_angle(&args.t_max)?, args.t_steps)?;
    let kind = args.channel.as_deref().map(str::parse).transpose()?;
    let (a, p) = if measure == Measure::AvgFidelity {
        let axis = parse_axis(args.p.as_deref().unwrap_or("0:1"), args.p_steps)?;
        (axis, axis.min)
    } else {
        let p = match args.p.as_deref() {
            Some(s) if s.contains(':') => {
                return Err(Error::Config("--p takes a single value except for avg_fidelity".into()))
            }
            Some(s) => parse_angle(s)?,
            None => DEFAULT_P,
        };
        (parse_axis(&args.a, args.a_steps)?, p)
    };
    let cfg = SweepConfig {
        measure,
        a,
        t,
        channel: kind.map(|kind| ChannelSpec { kind, p, qubit: args.noise_qubit }),
        log_base: args.log_base.parse()?,
        compare: args.compare,
        seed: args.seed,
        closed_offset: 0.0,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn required_measure(args: &GridArgs) -> Result<Measure, Error> {
    args.measure
        .as_deref()
        .ok_or_else(|| Error::Config("--measure is required".into()))?
        .parse()
}

fn unit_note(cfg: &SweepConfig) {
    if cfg.measure == Measure::Entropy {
        eprintln!("# entropy unit: {}", cfg.log_base.unit());
    }
    if cfg.compare && (cfg.t.min < 0.0 || cfg.t.max > std::f64::consts::FRAC_PI_2) {
        eprintln!("# note: closed forms assume 0 <= t <= pi/2");
    }
}

fn write(args: &GridArgs, rows: &[sweep::SweepRow]) -> Result<(), Error> {
    let format: Format = args.format.parse()?;
    emit(rows, format, args.out.as_deref())
}

enum Outcome {
    Done,
    Failed,
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    match cli.command {
        Command::Sweep(args) => {
            let cfg = build_config(&args, required_measure(&args)?)?;
            unit_note(&cfg);
            write(&args, &run_sweep(&cfg)?)?;
        }
        Command::Diff(args) => {
            let cfg = build_config(&args, required_measure(&args)?)?;
            unit_note(&cfg);
            write(&args, &diff_sweep(&cfg)?)?;
        }
        Command::AvgFidelity(args) => {
            if let Some(m) = args.measure.as_deref() {
                if m.parse::<Measure>()? != Measure::AvgFidelity {
                    return Err(Error::Config(format!("avg-fidelity does not take --measure {m}")));
                }
            }
            let cfg = build_config(&args, Measure::AvgFidelity)?;
            unit_note(&cfg);
            write(&args, &run_sweep(&cfg)?)?;
        }
        Command::Verify(v) => {
            let perturb: Perturb = v.perturb.as_deref().map(str::parse).transpose()?.unwrap_or(Perturb::None);
            let checks = match v.grid.measure.as_deref() {
                None => {
                    let log_base: LogBase = v.grid.log_base.parse()?;
                    verify_suite(v.grid.seed, log_base, perturb)?.checks
                }
                Some(_) => {
                    let measure = required_measure(&v.grid)?;
                    let mut cfg = build_config(&v.grid, measure)?;
                    cfg.closed_offset = match perturb {
                        Perturb::All => sweep::PERTURBATION,
                        Perturb::Only(m) if m == measure => sweep::PERTURBATION,
                        _ => 0.0,
                    };
                    vec![verify_config(&cfg, v.tol)?]
                }
            };
            for c in &checks {
                println!("{c}");
            }
            let failed = checks.iter().filter(|c| !c.passed()).count();
            println!("{} checks, {failed} failed", checks.len());
            if failed > 0 {
                return Ok(Outcome::Failed);
            }
        }
    }
    Ok(Outcome::Done)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
