//! Batch command-line front end.
//!
//! Every run emits self-describing JSON-lines records: the full resolved
//! configuration, the artifact version and the seed are echoed next to the
//! result, so any number in the output can be reproduced from the record
//! alone. Timings go to stderr; identical runs produce byte-identical
//! output.
//!
//! Exit codes: 0 ok, 2 usage, 3 domain error, 4 budget exceeded,
//! 5 cross-check disagreement.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::arith::m_full_decompose;
use crate::circle::{
    self, CompareInstance, IntegralChoice, IntegralMethod, SeriesMode, Truncation,
};
use crate::counting::{self, CountBudget, CountMethod};
use crate::error::{Error, Result};
use crate::inclusion_exclusion::{enumerate_t, VarpiTable};
use crate::orbifold::{CampanaOrbifold, OrbifoldSpec, OrbifoldWeights};

#[derive(Debug, Parser)]
#[command(
    name = "campana",
    version = crate::VERSION,
    about = "Exact counting and circle-method prediction for m-full points on diagonal hypersurfaces"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// RNG seed for every stochastic component.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Cap on enumerated candidate tuples per scan.
    #[arg(long = "budget-ops", global = true, default_value_t = CountBudget::default().max_tuples)]
    pub budget_ops: u64,
    /// Cap on histogram cells (memory, in 8-byte cells).
    #[arg(long = "budget-mem", global = true, default_value_t = CountBudget::default().max_cells)]
    pub budget_mem: u64,
    /// Cap on elementary operations in exact local-density convolutions.
    #[arg(long = "budget-local-ops", global = true, default_value_t = CountBudget::default().max_local_ops)]
    pub budget_local_ops: u64,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::JsonLines)]
    pub format: Format,
    /// Output path; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    /// Worker-thread cap (0 = rayon default).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    JsonLines,
    Csv,
}

/// Orbifold selection shared by several subcommands: a JSON spec file or
/// inline flags.
#[derive(Debug, Args)]
pub struct OrbifoldArgs {
    /// Path to a JSON orbifold spec {"k": .., "c": [..], "m": [..]}.
    #[arg(long, conflicts_with_all = ["k", "c", "m"])]
    pub spec: Option<std::path::PathBuf>,
    /// Degree of the diagonal form.
    #[arg(long)]
    pub k: Option<u32>,
    /// Coefficients c_0,...,c_n (comma separated).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub c: Option<Vec<i64>>,
    /// Multiplicities m_0,...,m_n (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<u32>>,
}

impl OrbifoldArgs {
    pub fn resolve(&self) -> Result<(CampanaOrbifold, OrbifoldSpec)> {
        let spec = if let Some(path) = &self.spec {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::Usage(format!("cannot read {}: {e}", path.display()))
            })?;
            OrbifoldSpec::parse(&text)?
        } else {
            match (&self.k, &self.c, &self.m) {
                (Some(k), Some(c), Some(m)) => OrbifoldSpec {
                    k: *k,
                    c: c.clone(),
                    m: m.clone(),
                },
                _ => {
                    return Err(Error::Usage(
                        "provide --spec FILE or all of --k/--c/--m".into(),
                    ))
                }
            }
        };
        Ok((spec.build()?, spec))
    }
}

/// Power-box instance (d, zeta, m~) with a built-in preset.
#[derive(Debug, Args)]
pub struct PowerBoxArgs {
    /// Preset d = (1,1,1,1,-1,-1,-1), zeta = 1, m~ = (2,...,2).
    #[arg(long, conflicts_with_all = ["d", "zeta", "mtilde"])]
    pub quadratic7: bool,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub d: Option<Vec<i64>>,
    /// Box coefficients zeta (defaults to all ones).
    #[arg(long, value_delimiter = ',')]
    pub zeta: Option<Vec<u64>>,
    /// Exponents m~_0,...,m~_n.
    #[arg(long, value_delimiter = ',')]
    pub mtilde: Option<Vec<u32>>,
}

impl PowerBoxArgs {
    pub fn resolve(&self) -> Result<(Vec<i64>, Vec<u64>, Vec<u32>)> {
        if self.quadratic7 {
            return Ok((vec![1, 1, 1, 1, -1, -1, -1], vec![1; 7], vec![2; 7]));
        }
        let d = self
            .d
            .clone()
            .ok_or_else(|| Error::Usage("provide --d or --quadratic7".into()))?;
        let m = self
            .mtilde
            .clone()
            .ok_or_else(|| Error::Usage("provide --mtilde or --quadratic7".into()))?;
        let zeta = self.zeta.clone().unwrap_or_else(|| vec![1; d.len()]);
        if d.len() != m.len() || d.len() != zeta.len() {
            return Err(Error::InvalidParameter(
                "--d, --zeta and --mtilde must have equal lengths".into(),
            ));
        }
        Ok((d, zeta, m))
    }
}

/// Truncation knobs shared by the analytic subcommands.
#[derive(Debug, Args)]
pub struct TruncationArgs {
    /// Singular-series truncation for the q-sum mode.
    #[arg(long, default_value_t = 500)]
    pub qmax: u32,
    /// Prime cap for the Euler mode.
    #[arg(long, default_value_t = 101)]
    pub pmax: u64,
    /// Prime-power level for the Euler mode.
    #[arg(long, default_value_t = 3)]
    pub level: u32,
    /// Monte Carlo samples for the slab integral.
    #[arg(long, default_value_t = 10_000_000)]
    pub mc_samples: u64,
    /// Lambda cutoff for the oscillatory integral.
    #[arg(long, default_value_t = 1e3)]
    pub lambda_cutoff: f64,
    /// Relative refinement tolerance for the oscillatory integral.
    #[arg(long, default_value_t = 1e-3)]
    pub osc_rel_tol: f64,
    /// Weight cap for the (s,t,v~) sum of the leading constant.
    #[arg(long, default_value_t = 64)]
    pub tcap: u128,
    /// Euler prime cap inside the leading constant.
    #[arg(long, default_value_t = 29)]
    pub constant_pmax: u64,
    /// Euler level inside the leading constant.
    #[arg(long, default_value_t = 3)]
    pub constant_level: u32,
}

impl TruncationArgs {
    fn build(&self, seed: u64, series_mode: SeriesMode, integral: IntegralChoice) -> Truncation {
        Truncation {
            series_mode,
            integral,
            mc_samples: self.mc_samples,
            seed,
            slab_scale: None,
            lambda_cutoff: self.lambda_cutoff,
            osc_rel_tol: self.osc_rel_tol,
            t_cap: self.tcap,
            constant_p_max: self.constant_pmax,
            constant_level: self.constant_level,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CountMode {
    Campana,
    N,
    Nstar,
    M,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeriesCliMode {
    Qsum,
    Euler,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IntegralCliMethod {
    Slab,
    Oscillatory,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Canonical decomposition of an m-full integer.
    Decompose {
        x: i64,
        #[arg(long)]
        m: u32,
    },
    /// Exact admissibility report for an orbifold.
    Admissible {
        #[command(flatten)]
        orbifold: OrbifoldArgs,
    },
    /// Exact counts: Campana points, N(B), N*(B), or the power-box M.
    Count {
        #[arg(long, value_enum)]
        mode: CountMode,
        #[command(flatten)]
        orbifold: OrbifoldArgs,
        #[command(flatten)]
        powerbox: PowerBoxArgs,
        /// Height bound B (or B~ in mode m).
        #[arg(long = "B", visible_alias = "bound")]
        bound: u64,
        /// Force a counting method.
        #[arg(long, value_enum)]
        method: Option<CliCountMethod>,
    },
    /// Predicted main term for the power-box count.
    Predict {
        #[command(flatten)]
        powerbox: PowerBoxArgs,
        #[arg(long = "B")]
        bound: f64,
        #[command(flatten)]
        truncation: TruncationArgs,
        /// Evaluate the singular series by Euler product instead of q-sum.
        #[arg(long)]
        euler: bool,
        /// Evaluate the singular integral by oscillatory quadrature.
        #[arg(long)]
        oscillatory: bool,
    },
    /// Exact count against prediction over a grid of bounds.
    Compare {
        #[command(flatten)]
        orbifold: OrbifoldArgs,
        #[command(flatten)]
        powerbox: PowerBoxArgs,
        /// Comma-separated grid of bounds.
        #[arg(long, value_delimiter = ',')]
        grid: Vec<u64>,
        #[command(flatten)]
        truncation: TruncationArgs,
        #[arg(long)]
        euler: bool,
        #[arg(long)]
        oscillatory: bool,
    },
    /// Truncated singular series.
    Series {
        #[command(flatten)]
        powerbox: PowerBoxArgs,
        #[arg(long, value_enum, default_value_t = SeriesCliMode::Qsum)]
        mode: SeriesCliMode,
        #[command(flatten)]
        truncation: TruncationArgs,
        /// Run both modes and fail (exit 5) if they disagree beyond 1%.
        #[arg(long)]
        cross_check: bool,
    },
    /// Singular integral.
    Integral {
        #[command(flatten)]
        powerbox: PowerBoxArgs,
        #[arg(long, value_enum, default_value_t = IntegralCliMethod::Slab)]
        method: IntegralCliMethod,
        #[command(flatten)]
        truncation: TruncationArgs,
    },
    /// Truncated leading constant of the asymptotic, with convergence
    /// partials.
    Constant {
        #[command(flatten)]
        orbifold: OrbifoldArgs,
        #[command(flatten)]
        truncation: TruncationArgs,
        /// Assemble the full constant over coefficient sign patterns
        /// instead of reporting C_d for the given coefficients alone.
        #[arg(long)]
        full: bool,
    },
    /// Dump (s, t, varpi) triples up to a weight cap.
    VarpiTable {
        /// Multiplicities m_0,...,m_n.
        #[arg(long, value_delimiter = ',')]
        m: Vec<u32>,
        /// Per-coordinate weight cap.
        #[arg(long, default_value_t = 100)]
        cap: u128,
    },
    /// Sampled minor-arc suprema of the generating sums.
    Scan {
        #[command(flatten)]
        powerbox: PowerBoxArgs,
        #[arg(long = "B")]
        bound: f64,
        #[arg(long, default_value_t = 0.02)]
        delta: f64,
        #[arg(long, default_value_t = 512)]
        samples: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CliCountMethod {
    FullScan,
    MeetInTheMiddle,
    HistogramConvolution,
}

impl From<CliCountMethod> for CountMethod {
    fn from(m: CliCountMethod) -> Self {
        match m {
            CliCountMethod::FullScan => CountMethod::FullScan,
            CliCountMethod::MeetInTheMiddle => CountMethod::MeetInTheMiddle,
            CliCountMethod::HistogramConvolution => CountMethod::HistogramConvolution,
        }
    }
}

struct Emitter {
    sink: Box<dyn Write>,
}

impl Emitter {
    fn new(global: &GlobalOpts) -> Result<Emitter> {
        let sink: Box<dyn Write> = match &global.out {
            Some(path) => Box::new(std::fs::File::create(path).map_err(|e| {
                Error::InvalidParameter(format!("cannot create {}: {e}", path.display()))
            })?),
            None => Box::new(std::io::stdout()),
        };
        Ok(Emitter { sink })
    }

    fn record<T: Serialize>(&mut self, kind: &str, config: serde_json::Value, result: &T) -> Result<()> {
        let line = json!({
            "record": kind,
            "version": crate::VERSION,
            "config": config,
            "result": result,
        });
        writeln!(self.sink, "{line}").map_err(|e| Error::InvalidParameter(format!("write failed: {e}")))
    }

    fn csv_rows(&mut self, header: &str, rows: impl Iterator<Item = String>) -> Result<()> {
        writeln!(self.sink, "{header}")
            .and_then(|_| {
                for row in rows {
                    writeln!(self.sink, "{row}")?;
                }
                Ok(())
            })
            .map_err(|e| Error::InvalidParameter(format!("write failed: {e}")))
    }
}

/// Run a parsed command; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    if cli.global.threads > 0 {
        // ignore the error when a pool already exists (repeat calls in tests)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.threads)
            .build_global();
    }
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn budget_of(global: &GlobalOpts) -> CountBudget {
    CountBudget {
        max_tuples: global.budget_ops,
        max_cells: global.budget_mem,
        dense_cells: CountBudget::default().dense_cells.min(global.budget_mem),
        max_local_ops: global.budget_local_ops,
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let budget = budget_of(&cli.global);
    let seed = cli.global.seed;
    let mut emitter = Emitter::new(&cli.global)?;
    let base_config = |extra: serde_json::Value| -> serde_json::Value {
        let mut obj = json!({
            "seed": seed,
            "budget": {
                "max_tuples": budget.max_tuples,
                "max_cells": budget.max_cells,
                "max_local_ops": budget.max_local_ops,
            },
            "threads": cli.global.threads,
        });
        if let (Some(o), Some(e)) = (obj.as_object_mut(), extra.as_object()) {
            for (k, v) in e {
                o.insert(k.clone(), v.clone());
            }
        }
        obj
    };

    match &cli.command {
        Command::Decompose { x, m } => {
            let d = m_full_decompose(*x, *m)?;
            let result = json!({
                "x": x, "m": m, "sign": d.sign, "u": d.u, "v": d.v,
            });
            emitter.record("decomposition", base_config(json!({"x": x, "m": m})), &result)?;
            eprintln!("{x} = {}{}^{} * {:?} (exponents m+1..2m-1)", if d.sign < 0 { "-" } else { "" }, d.u, m, d.v);
            Ok(())
        }
        Command::Admissible { orbifold } => {
            let (orb, spec) = orbifold.resolve()?;
            let report = crate::orbifold::check_admissible(&orb)?;
            emitter.record(
                "admissibility",
                base_config(json!({"orbifold": spec})),
                &report,
            )?;
            eprintln!(
                "condition sum 1/(2 s0(k m_i)) > 1: {}",
                if report.condition_main { "PASS" } else { "FAIL" }
            );
            eprintln!(
                "Theta = {}/{}  kGamma = {}/{}  in theorem range: {}",
                report.theta.num,
                report.theta.den,
                report.k_gamma.num,
                report.k_gamma.den,
                report.in_theorem_range
            );
            Ok(())
        }
        Command::Count {
            mode,
            orbifold,
            powerbox,
            bound,
            method,
        } => {
            let method = method.map(CountMethod::from);
            match mode {
                CountMode::M => {
                    let (d, zeta, mt) = powerbox.resolve()?;
                    let sc = counting::count_m(&d, &zeta, &mt, *bound, &budget, method)?;
                    let config = base_config(json!({
                        "mode": "m", "d": d, "zeta": zeta, "m_tilde": mt, "bound": bound,
                    }));
                    emitter.record("count", config, &sc)?;
                    eprintln!("count = {} via {:?} in {:?}", sc.count, sc.method, sc.elapsed);
                }
                CountMode::Nstar => {
                    let (orb, spec) = orbifold.resolve()?;
                    let count = counting::count_n_star(
                        orb.form.coefficients(),
                        &orb.weights,
                        orb.form.k(),
                        *bound,
                        &budget,
                    )?;
                    let config = base_config(json!({
                        "mode": "nstar", "orbifold": spec, "bound": bound,
                    }));
                    emitter.record("count", config, &json!({"count": count, "bound": bound}))?;
                    eprintln!("count = {count}");
                }
                CountMode::Campana | CountMode::N => {
                    let (orb, spec) = orbifold.resolve()?;
                    let (label, sc) = match mode {
                        CountMode::Campana => {
                            ("campana", counting::count_campana(&orb, *bound, &budget)?)
                        }
                        _ => ("n", counting::count_n(&orb, *bound, &budget, method)?),
                    };
                    let config = base_config(json!({
                        "mode": label, "orbifold": spec, "bound": bound,
                    }));
                    emitter.record("count", config, &sc)?;
                    eprintln!("count = {} via {:?} in {:?}", sc.count, sc.method, sc.elapsed);
                }
            }
            Ok(())
        }
        Command::Predict {
            powerbox,
            bound,
            truncation,
            euler,
            oscillatory,
        } => {
            let (d, zeta, mt) = powerbox.resolve()?;
            let series_mode = if *euler {
                SeriesMode::Euler {
                    p_max: truncation.pmax,
                    level: truncation.level,
                }
            } else {
                SeriesMode::QSum {
                    q_max: truncation.qmax,
                }
            };
            let integral = if *oscillatory {
                IntegralChoice::Oscillatory
            } else {
                IntegralChoice::Slab
            };
            let trunc = truncation.build(seed, series_mode, integral);
            let pred = circle::predict_m(&d, &zeta, &mt, *bound, &trunc)?;
            let config = base_config(json!({
                "d": d, "zeta": zeta, "m_tilde": mt, "bound": bound,
            }));
            emitter.record("prediction", config, &pred)?;
            eprintln!(
                "main term = {:.6e} (uncertainty {:.1e}){}",
                pred.main_term,
                pred.uncertainty,
                if pred.outside_theorem { " [outside-theorem]" } else { "" }
            );
            Ok(())
        }
        Command::Compare {
            orbifold,
            powerbox,
            grid,
            truncation,
            euler,
            oscillatory,
        } => {
            let series_mode = if *euler {
                SeriesMode::Euler {
                    p_max: truncation.pmax,
                    level: truncation.level,
                }
            } else {
                SeriesMode::QSum {
                    q_max: truncation.qmax,
                }
            };
            let integral = if *oscillatory {
                IntegralChoice::Oscillatory
            } else {
                IntegralChoice::Slab
            };
            let trunc = truncation.build(seed, series_mode, integral);
            let (instance, config) = if powerbox.quadratic7 || powerbox.d.is_some() {
                let (d, zeta, mt) = powerbox.resolve()?;
                let cfg = base_config(json!({
                    "d": d, "zeta": zeta, "m_tilde": mt, "grid": grid, "truncation": trunc,
                }));
                (CompareInstance::PowerBox { d, zeta, m_tilde: mt }, cfg)
            } else {
                let (orb, spec) = orbifold.resolve()?;
                let cfg = base_config(json!({
                    "orbifold": spec, "grid": grid, "truncation": trunc,
                }));
                (CompareInstance::Orbifold(orb), cfg)
            };
            let table = circle::compare(&instance, grid, &trunc, &budget)?;
            match cli.global.format {
                Format::JsonLines => emitter.record("comparison", config, &table)?,
                Format::Csv => {
                    emitter.csv_rows(
                        "bound,exact,predicted,ratio",
                        table.rows.iter().map(|r| {
                            format!(
                                "{},{},{},{}",
                                r.bound,
                                r.exact.map_or(String::new(), |c| c.to_string()),
                                r.predicted,
                                r.ratio.map_or(String::new(), |x| x.to_string()),
                            )
                        }),
                    )?;
                    eprintln!(
                        "fitted exponent {:?} vs expected {}",
                        table.fitted_exponent, table.expected_exponent
                    );
                }
            }
            Ok(())
        }
        Command::Series {
            powerbox,
            mode,
            truncation,
            cross_check,
        } => {
            let (d, zeta, mt) = powerbox.resolve()?;
            let zeta_big: Vec<u128> = zeta.iter().map(|&z| z as u128).collect();
            let config = base_config(json!({
                "d": d, "zeta": zeta, "m_tilde": mt,
                "qmax": truncation.qmax, "pmax": truncation.pmax, "level": truncation.level,
            }));
            if *cross_check {
                let (qs, eu) = circle::series_cross_checked(
                    &d,
                    &zeta_big,
                    &mt,
                    truncation.qmax,
                    truncation.pmax,
                    truncation.level,
                    0.01,
                )?;
                emitter.record("series", config.clone(), &qs)?;
                emitter.record("series", config, &eu)?;
                return Ok(());
            }
            let sm = match mode {
                SeriesCliMode::Qsum => SeriesMode::QSum {
                    q_max: truncation.qmax,
                },
                SeriesCliMode::Euler => SeriesMode::Euler {
                    p_max: truncation.pmax,
                    level: truncation.level,
                },
            };
            let sv = circle::singular_series(&d, &zeta_big, &mt, &sm)?;
            emitter.record("series", config, &sv)?;
            match sv.tail_estimate {
                Some(t) => eprintln!("series = {:.8} (tail ~ {t:.1e})", sv.value),
                None => eprintln!("series = {:.8} (tail unbounded: outside regime)", sv.value),
            }
            Ok(())
        }
        Command::Integral {
            powerbox,
            method,
            truncation,
        } => {
            let (d, _zeta, mt) = powerbox.resolve()?;
            let config = base_config(json!({
                "d": d, "m_tilde": mt, "mc_samples": truncation.mc_samples,
                "lambda_cutoff": truncation.lambda_cutoff,
            }));
            match method {
                IntegralCliMethod::Both => {
                    let trunc = truncation.build(seed, SeriesMode::QSum { q_max: truncation.qmax }, IntegralChoice::Slab);
                    let (slab, osc) = circle::integral_cross_checked(&d, &mt, &trunc, 3.0)?;
                    emitter.record("integral", config.clone(), &slab)?;
                    emitter.record("integral", config, &osc)?;
                }
                IntegralCliMethod::Slab => {
                    let iv = circle::singular_integral(
                        &d,
                        &mt,
                        &IntegralMethod::Slab {
                            samples: truncation.mc_samples,
                            seed,
                            scale: None,
                        },
                    )?;
                    emitter.record("integral", config, &iv)?;
                    eprintln!("integral = {:.8} +- {:.1e}", iv.value, iv.std_error);
                }
                IntegralCliMethod::Oscillatory => {
                    let iv = circle::singular_integral(
                        &d,
                        &mt,
                        &IntegralMethod::Oscillatory {
                            lambda_cutoff: truncation.lambda_cutoff,
                            rel_tol: truncation.osc_rel_tol,
                        },
                    )?;
                    emitter.record("integral", config, &iv)?;
                    eprintln!("integral = {:.8} +- {:.1e}", iv.value, iv.std_error);
                }
            }
            Ok(())
        }
        Command::Constant {
            orbifold,
            truncation,
            full,
        } => {
            let (orb, spec) = orbifold.resolve()?;
            let trunc = truncation.build(
                seed,
                SeriesMode::Euler {
                    p_max: truncation.constant_pmax,
                    level: truncation.constant_level,
                },
                IntegralChoice::Slab,
            );
            let config = base_config(json!({
                "orbifold": spec, "truncation": trunc, "full": full,
            }));
            if *full {
                let est = circle::leading_constant_full(&orb, &trunc)?;
                emitter.record("leading-constant", config, &est)?;
                eprintln!("C = {:.6e} (uncertainty {:.1e})", est.value, est.uncertainty);
            } else {
                let est = circle::leading_constant(orb.form.coefficients(), &orb, &trunc)?;
                emitter.record("leading-constant", config, &est)?;
                eprintln!(
                    "C_d = {:.6e} (uncertainty {:.1e}, {} triples)",
                    est.value, est.uncertainty, est.triples_used
                );
            }
            Ok(())
        }
        Command::VarpiTable { m, cap } => {
            let weights = OrbifoldWeights::new(m.clone())?;
            let table = VarpiTable::new(&weights);
            let pairs = enumerate_t(*cap, &weights);
            // inherently tabular: CSV regardless of --format, with s slots
            // joined by | and t coordinate rows by ;
            emitter.csv_rows(
                "s,t,varpi,weight",
                pairs.iter().map(|p| {
                    format!(
                        "{},{},{},{}",
                        join(&p.s),
                        p.t.iter().map(|row| join(row)).collect::<Vec<_>>().join(";"),
                        table.varpi(p),
                        p.weight(&weights).unwrap_or(u128::MAX),
                    )
                }),
            )?;
            Ok(())
        }
        Command::Scan {
            powerbox,
            bound,
            delta,
            samples,
        } => {
            let (d, zeta, mt) = powerbox.resolve()?;
            let rows = circle::minor_arc_scan(&d, &zeta, &mt, *bound, *delta, *samples)?;
            let config = base_config(json!({
                "d": d, "zeta": zeta, "m_tilde": mt, "bound": bound,
                "delta": delta, "samples": samples,
            }));
            emitter.record("minor-arc-scan", config, &rows)?;
            Ok(())
        }
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("|")
}
