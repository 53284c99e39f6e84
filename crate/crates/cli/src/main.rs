//! `rtu`: score, rank and benchmark algorithms by expected utility.

mod run;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use runtime_utility::axioms::{run_suite, CheckReport};
use runtime_utility::config::{MaxEntConfig, UtilityConfig};
use runtime_utility::estimation::{estimate_distribution, plan};
use runtime_utility::maxent::solve;
use runtime_utility::runlog::{RunLog, RunRecord};
use runtime_utility::scoring::{classical_scores_of_samples, rank, score_empirical, score_quality, ClassicalScores};
use runtime_utility::{Error, ExtendedTime, RuntimeDistribution, SamplePlan, ScoreReport, UtilityFunction};

use run::{expand, run_all, Clock, Outcome};

#[derive(Parser)]
#[command(name = "rtu", version, about = "Expected-utility scoring of algorithm runtimes")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Score each algorithm in a run log.
    Score {
        runlog: PathBuf,
        utility: PathBuf,
        #[arg(long, default_value_t = 0.95)]
        confidence: f64,
        /// Also report mean, capped mean and PAR.
        #[arg(long)]
        classical: bool,
        #[arg(long, default_value_t = 10.0)]
        par_factor: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Rank the algorithms in a run log, grouping statistical ties.
    Rank {
        runlog: PathBuf,
        utility: PathBuf,
        #[arg(long, default_value_t = 0.95)]
        confidence: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Sample count and captime for an ε-accurate estimate.
    Plan {
        utility: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Simulate a planned estimate against a runtime distribution.
    Estimate {
        utility: PathBuf,
        /// Runtime distribution as JSON.
        #[arg(long)]
        distribution: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, env = "RUNTIME_UTILITY_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a command on every instance under a time cap and write a run log.
    Run {
        /// Command template; `{instance}` and `{seed}` are substituted.
        #[arg(long)]
        command: String,
        /// One instance per line.
        #[arg(long)]
        instances: PathBuf,
        /// Algorithm name recorded in the log.
        #[arg(long)]
        algorithm: String,
        /// Sample plan whose captime is enforced.
        #[arg(long, conflicts_with = "captime", required_unless_present = "captime")]
        plan: Option<PathBuf>,
        #[arg(long)]
        captime: Option<f64>,
        /// Runs per instance.
        #[arg(long, default_value_t = 1)]
        repeats: u64,
        #[arg(long, value_enum, default_value_t = Clock::Cpu)]
        clock: Clock,
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        #[arg(long, env = "RUNTIME_UTILITY_SEED", default_value_t = 0)]
        seed: u64,
        /// Append rows to an existing log.
        #[arg(long)]
        append: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Plot data: utility curve or maxent density.
    Curve {
        /// Utility config; omit with --maxent.
        utility: Option<PathBuf>,
        /// Maxent constraint config.
        #[arg(long, conflicts_with = "utility")]
        maxent: Option<PathBuf>,
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// `lo,hi`.
        #[arg(long)]
        range: Option<String>,
        /// Captime for step and linear money utilities.
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Brute-force checks of the representation theorem on random instances.
    AxiomCheck {
        utility: PathBuf,
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, env = "RUNTIME_UTILITY_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

const INPUT: u8 = 2;
const SEMANTIC: u8 = 3;
const CHILD: u8 = 4;

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. }
            | Error::Io(_)
            | Error::BadParameters(_)
            | Error::UnknownConstraintSet(_)
            | Error::QualityOutOfRange { .. }
            | Error::EmptyInput => INPUT,
            _ => SEMANTIC,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn with_path<T>(path: &Path, r: runtime_utility::Result<T>) -> CliResult<T> {
    r.map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

/// JSON number, or `"inf"` for an infinite value.
fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn report_json(name: &str, r: &ScoreReport) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("name".into(), json!(name));
    m.insert("score".into(), num(r.score));
    let (lo, hi, conf) = match &r.ci {
        Some(ci) => (num(ci.low), num(ci.high), num(ci.confidence)),
        None => (Value::Null, Value::Null, Value::Null),
    };
    m.insert("ci_low".into(), lo);
    m.insert("ci_high".into(), hi);
    m.insert("confidence".into(), conf);
    m.insert("n".into(), json!(r.n_samples));
    m.insert("method".into(), serde_json::to_value(r.method).expect("method serializes"));
    m.insert("total_compute_seconds".into(), num(r.total_compute));
    m
}

fn classical_json(c: &ClassicalScores) -> Value {
    json!({
        "mean": num(c.mean),
        "capped_mean": num(c.capped_mean),
        "par": num(c.par),
        "par_factor": num(c.par_factor),
        "fraction_solved": num(c.fraction_solved),
        "censoring_rate": num(c.censoring_rate),
    })
}

struct Sink {
    out: Box<dyn Write>,
}

impl Sink {
    fn open(path: Option<&Path>) -> CliResult<Self> {
        let out: Box<dyn Write> = match path {
            Some(p) => Box::new(std::io::BufWriter::new(
                std::fs::File::create(p).map_err(|e| fail(INPUT, format!("{}: {e}", p.display())))?,
            )),
            None => Box::new(std::io::stdout().lock()),
        };
        Ok(Sink { out })
    }

    fn line(&mut self, s: &str) -> CliResult<()> {
        writeln!(self.out, "{s}").map_err(|e| fail(INPUT, format!("write failed: {e}")))
    }

    fn finish(mut self) -> CliResult<()> {
        self.out.flush().map_err(|e| fail(INPUT, format!("write failed: {e}")))
    }
}

fn load_inputs(runlog: &Path, utility: &Path) -> CliResult<(RunLog, UtilityConfig)> {
    let log = with_path(runlog, RunLog::from_path(runlog))?;
    let cfg = with_path(utility, UtilityConfig::from_path(utility))?;
    Ok((log, cfg))
}

fn score_all(log: &RunLog, cfg: &UtilityConfig, confidence: f64) -> CliResult<Vec<(String, ScoreReport, Vec<RunRecord>)>> {
    let mut out = Vec::new();
    for name in log.algorithms() {
        let records: Vec<RunRecord> = log.records_of(name).cloned().collect();
        let report = match &cfg.quality {
            Some(uq) => {
                let samples: Vec<_> = records.iter().map(|r| r.quality_sample(uq.q0, uq.q1)).collect();
                score_quality(&samples, uq, confidence)
            }
            None => {
                let samples: Vec<_> = records.iter().map(RunRecord::sample).collect();
                score_empirical(&samples, &cfg.utility, confidence)
            }
        }
        .map_err(|e| {
            let mut f = Failure::from(e);
            f.message = format!("algorithm {name}: {}", f.message);
            f
        })?;
        out.push((name.to_string(), report, records));
    }
    Ok(out)
}

fn cmd_score(
    runlog: &Path,
    utility: &Path,
    confidence: f64,
    classical: bool,
    par_factor: f64,
    output: Option<&Path>,
) -> CliResult<()> {
    let (log, cfg) = load_inputs(runlog, utility)?;
    let scored = score_all(&log, &cfg, confidence)?;
    let mut sink = Sink::open(output)?;
    for (name, report, records) in &scored {
        let mut m = report_json(name, report);
        if classical {
            let samples: Vec<_> = records.iter().map(RunRecord::sample).collect();
            m.insert("classical".into(), classical_json(&classical_scores_of_samples(&samples, par_factor)?));
        }
        sink.line(&Value::Object(m).to_string())?;
    }
    sink.finish()
}

fn fixed(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.9}")
    } else {
        "inf".into()
    }
}

fn cmd_rank(runlog: &Path, utility: &Path, confidence: f64, output: Option<&Path>) -> CliResult<()> {
    let (log, cfg) = load_inputs(runlog, utility)?;
    let scored = score_all(&log, &cfg, confidence)?;
    let groups = rank(scored.into_iter().map(|(n, r, _)| (n, r)))?;
    let mut sink = Sink::open(output)?;
    sink.line("rank,name,score,ci_low,ci_high,n")?;
    for g in &groups {
        for (name, r) in &g.members {
            let (lo, hi) = r.ci.as_ref().map_or((String::new(), String::new()), |c| (fixed(c.low), fixed(c.high)));
            sink.line(&format!("{},{name},{},{lo},{hi},{}", g.rank, fixed(r.score), r.n_samples))?;
        }
    }
    sink.finish()
}

fn plan_json(p: &SamplePlan) -> Value {
    serde_json::to_value(p).expect("plan serializes")
}

fn cmd_plan(utility: &Path, epsilon: f64, delta: f64, output: Option<&Path>) -> CliResult<()> {
    let cfg = with_path(utility, UtilityConfig::from_path(utility))?;
    let p = plan(&cfg.utility, epsilon, delta)?;
    for w in &p.warnings {
        eprintln!("rtu: warning: {w}");
    }
    let mut sink = Sink::open(output)?;
    sink.line(&plan_json(&p).to_string())?;
    sink.finish()
}

fn cmd_estimate(utility: &Path, distribution: &Path, epsilon: f64, delta: f64, seed: u64, output: Option<&Path>) -> CliResult<()> {
    let cfg = with_path(utility, UtilityConfig::from_path(utility))?;
    let text = std::fs::read_to_string(distribution).map_err(|e| fail(INPUT, format!("{}: {e}", distribution.display())))?;
    let dist: RuntimeDistribution = serde_json::from_str(&text)
        .map_err(|e| fail(INPUT, format!("{}:{}: {e}", distribution.display(), e.line())))?;
    with_path(distribution, dist.validate())?;
    let p = plan(&cfg.utility, epsilon, delta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let est = estimate_distribution(&dist, &p, &cfg.utility, &mut rng)?;
    let mut m = report_json("estimate", &est.report);
    m.insert("plan".into(), plan_json(&p));
    let mut sink = Sink::open(output)?;
    sink.line(&Value::Object(m).to_string())?;
    sink.finish()
}

fn read_instances(path: &Path) -> CliResult<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| fail(INPUT, format!("{}: {e}", path.display())))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}

struct RunArgs<'a> {
    command: &'a str,
    instances: &'a Path,
    algorithm: &'a str,
    plan: Option<&'a Path>,
    captime: Option<f64>,
    repeats: u64,
    clock: Clock,
    parallel: usize,
    seed: u64,
    append: bool,
    output: Option<&'a Path>,
}

fn cmd_run(a: RunArgs<'_>) -> CliResult<()> {
    let template = shlex::split(a.command).ok_or_else(|| fail(INPUT, "command template does not parse"))?;
    if template.is_empty() || !template.iter().any(|t| t.contains("{instance}")) {
        return Err(fail(INPUT, "command template must contain {instance}"));
    }
    let captime = match (a.plan, a.captime) {
        (Some(p), _) => {
            let text = std::fs::read_to_string(p).map_err(|e| fail(INPUT, format!("{}: {e}", p.display())))?;
            let plan: SamplePlan =
                serde_json::from_str(&text).map_err(|e| fail(INPUT, format!("{}:{}: {e}", p.display(), e.line())))?;
            plan.captime
        }
        (None, Some(c)) => ExtendedTime::new(c)?,
        (None, None) => return Err(fail(INPUT, "need --plan or --captime")),
    };
    if !(captime.is_finite() && captime.seconds() > 0.0) {
        return Err(fail(INPUT, "captime must be positive and finite"));
    }
    if a.parallel == 0 {
        return Err(fail(INPUT, "--parallel must be at least 1"));
    }
    let instances = read_instances(a.instances)?;
    let mut rows = Vec::new();
    for inst in &instances {
        for r in 0..a.repeats {
            let seed = a.seed.wrapping_add(r);
            rows.push((inst.clone(), seed, expand(&template, inst, seed)));
        }
    }
    let jobs: Vec<Vec<String>> = rows.iter().map(|r| r.2.clone()).collect();
    let outcomes = run_all(&jobs, captime.seconds(), a.clock, a.parallel);

    let mut log = match (a.append, a.output) {
        (true, Some(p)) if p.exists() => with_path(p, RunLog::from_path(p))?,
        _ => RunLog::default(),
    };
    let mut failed = 0;
    for ((inst, seed, _), out) in rows.iter().zip(outcomes) {
        let (runtime, censored) = match out {
            Outcome::Finished { seconds } => {
                let t = ExtendedTime::secs(seconds);
                if t >= captime {
                    (captime, true)
                } else {
                    (t, false)
                }
            }
            Outcome::Capped => (captime, true),
            Outcome::Failed(msg) => {
                eprintln!("rtu: warning: {} on {inst} (seed {seed}) failed and is excluded: {msg}", a.algorithm);
                failed += 1;
                continue;
            }
        };
        log.records.push(RunRecord {
            algorithm: a.algorithm.to_string(),
            instance: inst.clone(),
            seed: *seed,
            runtime,
            censored,
            captime,
            quality: None,
        });
    }
    let result = match a.output {
        Some(p) => {
            let f = std::fs::File::create(p).map_err(|e| fail(INPUT, format!("{}: {e}", p.display())))?;
            log.write(std::io::BufWriter::new(f))
        }
        None => log.write(std::io::stdout().lock()),
    };
    result?;
    if failed > 0 {
        return Err(fail(CHILD, format!("{failed} of {} runs failed", rows.len())));
    }
    Ok(())
}

fn parse_range(s: &str) -> CliResult<(f64, f64)> {
    let bad = || fail(INPUT, format!("--range must be lo,hi with lo < hi, got {s:?}"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let lo: f64 = a.trim().parse().map_err(|_| bad())?;
    let hi: f64 = b.trim().parse().map_err(|_| bad())?;
    if lo < hi && lo >= 0.0 && hi.is_finite() {
        Ok((lo, hi))
    } else {
        Err(bad())
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn default_utility_range(u: &UtilityFunction, kappa: ExtendedTime) -> CliResult<(f64, f64)> {
    let hi = match u.inverse(1e-3) {
        Ok(t) if t.is_finite() && t.seconds() > 0.0 => t.seconds(),
        _ if kappa.is_finite() => kappa.seconds(),
        _ => return Err(fail(INPUT, "no natural range for this utility; pass --range")),
    };
    Ok((0.0, hi))
}

fn cmd_curve(
    utility: Option<&Path>,
    maxent: Option<&Path>,
    points: usize,
    range: Option<&str>,
    kappa: Option<f64>,
    output: Option<&Path>,
) -> CliResult<()> {
    if points == 0 {
        return Err(fail(INPUT, "--points must be at least 1"));
    }
    let range = range.map(parse_range).transpose()?;
    let mut sink = Sink::open(output)?;
    match (utility, maxent) {
        (Some(path), None) => {
            let cfg = with_path(path, UtilityConfig::from_path(path))?;
            let kappa = match kappa {
                Some(k) => ExtendedTime::new(k)?,
                None => cfg.kappa.unwrap_or(ExtendedTime::INFINITY),
            };
            let (lo, hi) = match range {
                Some(r) => r,
                None => default_utility_range(&cfg.utility, kappa)?,
            };
            sink.line("t,u")?;
            for t in grid(lo, hi, points) {
                let v = cfg.utility.evaluate(ExtendedTime::secs(t), kappa);
                sink.line(&format!("{},{}", fixed(t), fixed(v)))?;
            }
        }
        (None, Some(path)) => {
            let cfg = with_path(path, MaxEntConfig::from_path(path))?;
            let problem = with_path(path, cfg.problem())?;
            let sol = solve(&problem, cfg.tol)?;
            let e = &problem.edges;
            let (lo, hi) = range.unwrap_or((e[0], e[e.len() - 1]));
            sink.line("kappa,density")?;
            for k in grid(lo, hi, points) {
                sink.line(&format!("{},{}", fixed(k), fixed(sol.distribution.pdf(k))))?;
            }
        }
        _ => return Err(fail(INPUT, "pass a utility config or --maxent")),
    }
    sink.finish()
}

fn cmd_axiom_check(utility: &Path, instances: usize, seed: u64, output: Option<&Path>) -> CliResult<()> {
    let cfg = with_path(utility, UtilityConfig::from_path(utility))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let report: CheckReport = run_suite(&mut rng, &cfg.utility, instances);
    let mut sink = Sink::open(output)?;
    sink.line(
        &json!({
            "instances": instances,
            "checks": report.checks,
            "violations": report.violations.len(),
            "passed": report.passed(),
            "first_violations": report.violations.iter().take(10).collect::<Vec<_>>(),
        })
        .to_string(),
    )?;
    sink.finish()?;
    if report.passed() {
        Ok(())
    } else {
        Err(fail(SEMANTIC, format!("{} violations", report.violations.len())))
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Cmd::Score {
            runlog,
            utility,
            confidence,
            classical,
            par_factor,
            output,
        } => cmd_score(&runlog, &utility, confidence, classical, par_factor, output.as_deref()),
        Cmd::Rank {
            runlog,
            utility,
            confidence,
            output,
        } => cmd_rank(&runlog, &utility, confidence, output.as_deref()),
        Cmd::Plan {
            utility,
            epsilon,
            delta,
            output,
        } => cmd_plan(&utility, epsilon, delta, output.as_deref()),
        Cmd::Estimate {
            utility,
            distribution,
            epsilon,
            delta,
            seed,
            output,
        } => cmd_estimate(&utility, &distribution, epsilon, delta, seed, output.as_deref()),
        Cmd::Run {
            command,
            instances,
            algorithm,
            plan,
            captime,
            repeats,
            clock,
            parallel,
            seed,
            append,
            output,
        } => cmd_run(RunArgs {
            command: &command,
            instances: &instances,
            algorithm: &algorithm,
            plan: plan.as_deref(),
            captime,
            repeats,
            clock,
            parallel,
            seed,
            append,
            output: output.as_deref(),
        }),
        Cmd::Curve {
            utility,
            maxent,
            points,
            range,
            kappa,
            output,
        } => cmd_curve(
            utility.as_deref(),
            maxent.as_deref(),
            points,
            range.as_deref(),
            kappa,
            output.as_deref(),
        ),
        Cmd::AxiomCheck {
            utility,
            instances,
            seed,
            output,
        } => cmd_axiom_check(&utility, instances, seed, output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("rtu: error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
