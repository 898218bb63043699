//! Command-line front end: builds an experiment config from flags or a
//! JSON file, runs it, and emits the canonical report.
//!
//! Exit codes: 0 success, 1 invalid config or usage, 2 invariant-suite
//! failure.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use walklab::config::{
    run_experiment, CohenAction, CohenParams, ExperimentConfig, ExperimentKind, PatternMode,
    PatternParams, PointSpace, RealSpec, RunOutcome, ThetaConfig,
};
use walklab::invariants::InvariantScale;
use walklab::CSeqSpec;
use walklab::Ordinal;

#[derive(Parser)]
#[command(name = "walklab", version, about = "Minimal-walk calculus laboratory")]
struct Cli {
    /// Seed override for the experiment.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Ordinal bound override, e.g. `w^3`.
    #[arg(long, global = true)]
    bound: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct CSeqArg {
    /// C-sequence rule: `canonical`, `jittered:<seed>` or
    /// `bitstream:<seed>:<bound>:<channels>`.
    #[arg(long, default_value = "canonical")]
    cseq: String,
}

impl CSeqArg {
    fn parse(&self) -> Result<CSeqSpec> {
        let parts: Vec<&str> = self.cseq.split(':').collect();
        match parts.as_slice() {
            ["canonical"] => Ok(CSeqSpec::Canonical),
            ["jittered", seed] => Ok(CSeqSpec::Jittered {
                seed: seed.parse().context("jitter seed")?,
            }),
            ["bitstream", seed, bound, channels] => Ok(CSeqSpec::Bitstream {
                seed: seed.parse().context("stream seed")?,
                bound: parse_ordinal(bound)?,
                channels: channels.parse().context("channels")?,
            }),
            _ => bail!("unrecognized C-sequence spec {:?}", self.cseq),
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Walk report for a pair alpha <= beta.
    Walk {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[command(flatten)]
        cseq: CSeqArg,
    },
    /// Oscillation set and count for a pair alpha < beta.
    Osc {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[command(flatten)]
        cseq: CSeqArg,
    },
    /// CSV of oscillation counts for all cross pairs of two ordinal lists
    /// (JSON files with arrays of ordinal strings).
    OscMatrix {
        #[arg(long = "A")]
        a: PathBuf,
        #[arg(long = "B")]
        b: PathBuf,
        #[command(flatten)]
        cseq: CSeqArg,
    },
    /// Point function evaluation with case tag and full-precision decimal.
    Point {
        #[arg(long, value_enum)]
        space: SpaceArg,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        alpha: String,
        #[command(flatten)]
        cseq: CSeqArg,
        /// Working precision in bits (128, 256 or 512).
        #[arg(long, default_value_t = 256)]
        precision: u32,
    },
    /// Kronecker approximation search (point targets) or uniform covering
    /// bound (open intervals).
    Kronecker {
        /// Real numbers, repeatable: `sqrt:2`, a decimal, or `p/q`.
        #[arg(long = "theta", required = true)]
        thetas: Vec<String>,
        /// Target points (decimals), one per theta; point mode.
        #[arg(long = "target")]
        targets: Vec<String>,
        /// Open intervals `lo:hi`, one per theta; covering mode.
        #[arg(long = "interval")]
        intervals: Vec<String>,
        #[arg(long, default_value = "0.001")]
        eps: String,
        #[arg(long, default_value_t = 100_000)]
        max_m: u64,
        #[arg(long, default_value_t = 64)]
        grid: u64,
        #[arg(long, default_value_t = 256)]
        precision: u32,
    },
    /// Pattern scanners and criteria; parameters come from a JSON file.
    PatternSearch {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        cseq: CSeqArg,
    },
    /// Forcing-environment operations.
    Cohen {
        #[arg(long, default_value_t = 4)]
        channels: u32,
        #[command(subcommand)]
        action: CohenCmd,
    },
    /// Run the full invariant suites; exits 2 on any failure.
    Invariants {},
    /// Run an experiment described entirely by a JSON config file.
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceArg {
    Vector,
    Field,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Anchor,
    Matrix,
    Starstar,
    Poset,
}

#[derive(Subcommand)]
enum CohenCmd {
    /// Decided sequence of one ordinal under a stream-prefix condition.
    Decide {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 4096)]
        prefix_len: u64,
    },
    /// Decided walk data under a stream-prefix condition.
    Walk {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long, default_value_t = 4096)]
        prefix_len: u64,
    },
    /// Prepare a base condition, then search for the one-point extension.
    Claim {
        #[arg(long)]
        delta: String,
        /// Increasing tuple, repeatable.
        #[arg(long = "a", required = true)]
        a: Vec<String>,
        /// Four designated ordinals for preparation.
        #[arg(long = "prepare-b", num_args = 4, required = true)]
        prepare_b: Vec<String>,
        /// Four designated ordinals for the claim.
        #[arg(long = "b", num_args = 4, required = true)]
        b: Vec<String>,
        #[arg(long, default_value_t = 0)]
        i0: usize,
        #[arg(long, default_value_t = 1)]
        j0: usize,
        #[arg(long, default_value_t = 5_000_000)]
        budget: u64,
    },
}

fn parse_ordinal(s: &str) -> Result<Ordinal> {
    s.parse::<Ordinal>().map_err(|e| anyhow!("{e}"))
}

fn parse_real_spec(s: &str) -> Result<RealSpec> {
    if let Some(n) = s.strip_prefix("sqrt:") {
        return Ok(RealSpec::Sqrt {
            n: n.parse().context("sqrt argument")?,
        });
    }
    if let Some((num, den)) = s.split_once('/') {
        return Ok(RealSpec::Ratio {
            num: num.parse().context("ratio numerator")?,
            den: den.parse().context("ratio denominator")?,
        });
    }
    Ok(RealSpec::Decimal {
        value: s.to_string(),
    })
}

fn ordinal_list_file(path: &PathBuf) -> Result<Vec<Ordinal>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let strings: Vec<String> = serde_json::from_str(&text)
        .with_context(|| format!("{} must be a JSON array of ordinal strings", path.display()))?;
    strings.iter().map(|s| parse_ordinal(s)).collect()
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig> {
    let kind = match &cli.cmd {
        Cmd::Walk { alpha, beta, .. } => ExperimentKind::Walk {
            alpha: parse_ordinal(alpha)?,
            beta: parse_ordinal(beta)?,
        },
        Cmd::Osc { alpha, beta, .. } => ExperimentKind::Osc {
            alpha: parse_ordinal(alpha)?,
            beta: parse_ordinal(beta)?,
        },
        Cmd::OscMatrix { a, b, .. } => ExperimentKind::OscMatrix {
            a: ordinal_list_file(a)?,
            b: ordinal_list_file(b)?,
        },
        Cmd::Point {
            space, beta, alpha, ..
        } => ExperimentKind::Point {
            space: match space {
                SpaceArg::Vector => PointSpace::Vector,
                SpaceArg::Field => PointSpace::Field,
            },
            beta: parse_ordinal(beta)?,
            alpha: parse_ordinal(alpha)?,
        },
        Cmd::Kronecker {
            thetas,
            targets,
            intervals,
            eps,
            max_m,
            grid,
            ..
        } => {
            let th: Vec<RealSpec> = thetas
                .iter()
                .map(|s| parse_real_spec(s))
                .collect::<Result<_>>()?;
            if !intervals.is_empty() {
                let iv: Vec<[String; 2]> = intervals
                    .iter()
                    .map(|s| {
                        s.split_once(':')
                            .map(|(a, b)| [a.to_string(), b.to_string()])
                            .ok_or_else(|| anyhow!("interval must be lo:hi, got {s:?}"))
                    })
                    .collect::<Result<_>>()?;
                ExperimentKind::Covering {
                    thetas: th,
                    intervals: iv,
                    grid: *grid,
                    max_m: *max_m,
                }
            } else {
                if targets.is_empty() {
                    bail!("kronecker requires --target points or --interval ranges");
                }
                ExperimentKind::Kronecker {
                    thetas: th,
                    targets: targets.clone(),
                    eps: eps.clone(),
                    max_m: *max_m,
                }
            }
        }
        Cmd::PatternSearch { mode, config, .. } => {
            let text = fs::read_to_string(config)
                .with_context(|| format!("reading {}", config.display()))?;
            let mut params: PatternParams = serde_json::from_str(&text)
                .map_err(|e| anyhow!("line {}, column {}: {e}", e.line(), e.column()))?;
            params.mode = match mode {
                ModeArg::Anchor => PatternMode::Anchor,
                ModeArg::Matrix => PatternMode::Matrix,
                ModeArg::Starstar => PatternMode::Starstar,
                ModeArg::Poset => PatternMode::Poset,
            };
            ExperimentKind::PatternSearch(params)
        }
        Cmd::Cohen { channels, action } => {
            let action = match action {
                CohenCmd::Decide { alpha, prefix_len } => CohenAction::Decide {
                    prefix_len: *prefix_len,
                    alpha: parse_ordinal(alpha)?,
                },
                CohenCmd::Walk {
                    alpha,
                    beta,
                    prefix_len,
                } => CohenAction::Walk {
                    prefix_len: *prefix_len,
                    alpha: parse_ordinal(alpha)?,
                    beta: parse_ordinal(beta)?,
                },
                CohenCmd::Claim {
                    delta,
                    a,
                    prepare_b,
                    b,
                    i0,
                    j0,
                    budget,
                } => {
                    let ords = |v: &[String]| -> Result<Vec<Ordinal>> {
                        v.iter().map(|s| parse_ordinal(s)).collect()
                    };
                    let quad = |v: &[String]| -> Result<[Ordinal; 4]> {
                        let o = ords(v)?;
                        o.try_into()
                            .map_err(|_| anyhow!("exactly four ordinals required"))
                    };
                    CohenAction::Claim {
                        delta: parse_ordinal(delta)?,
                        a: ords(a)?,
                        prepare_b: quad(prepare_b)?,
                        b: quad(b)?,
                        i0: *i0,
                        j0: *j0,
                        budget: *budget,
                    }
                }
            };
            ExperimentKind::Cohen(CohenParams {
                channels: *channels,
                action,
            })
        }
        Cmd::Invariants {} => ExperimentKind::Invariants {
            scale: InvariantScale::default(),
        },
        Cmd::Experiment { config } => {
            let text = fs::read_to_string(config)
                .with_context(|| format!("reading {}", config.display()))?;
            let mut cfg = ExperimentConfig::from_json(&text).map_err(|e| anyhow!("{e}"))?;
            apply_overrides(&mut cfg, cli)?;
            return Ok(cfg);
        }
    };
    let mut cfg = ExperimentConfig {
        seed: 0,
        bound: "w^3".parse().unwrap(),
        csequence: CSeqSpec::Canonical,
        theta: ThetaConfig::default(),
        budgets: Default::default(),
        kind,
    };
    // Subcommand-local settings.
    match &cli.cmd {
        Cmd::Walk { cseq, .. }
        | Cmd::Osc { cseq, .. }
        | Cmd::OscMatrix { cseq, .. }
        | Cmd::PatternSearch { cseq, .. } => cfg.csequence = cseq.parse()?,
        Cmd::Point {
            cseq, precision, ..
        } => {
            cfg.csequence = cseq.parse()?;
            cfg.theta.precision = *precision;
            cfg.theta.pairs = true;
            cfg.theta.mode = walklab::theta::ThetaMode::SeededRandom { seed: 0 };
        }
        Cmd::Kronecker { precision, .. } => cfg.theta.precision = *precision,
        _ => {}
    }
    apply_overrides(&mut cfg, cli)?;
    Ok(cfg)
}

fn apply_overrides(cfg: &mut ExperimentConfig, cli: &Cli) -> Result<()> {
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
        if let walklab::theta::ThetaMode::SeededRandom { seed: s } = &mut cfg.theta.mode {
            *s = seed;
        }
    }
    if let Some(bound) = &cli.bound {
        cfg.bound = parse_ordinal(bound)?;
    }
    Ok(())
}

fn emit(cli: &Cli, outcome: &RunOutcome) -> Result<()> {
    let text = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&outcome.report)?;
            s.push('\n');
            s
        }
        Format::Csv => outcome
            .csv
            .clone()
            .ok_or_else(|| anyhow!("this experiment kind has no CSV rendering"))?,
    };
    match &cli.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let outcome = match run_experiment(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = emit(&cli, &outcome) {
        eprintln!("output error: {e:#}");
        return ExitCode::from(1);
    }
    if matches!(cfg.kind, ExperimentKind::Invariants { .. }) && !outcome.pass {
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
