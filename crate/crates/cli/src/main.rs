use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use tourpart::bounds::{chernoff_bound, hoeffding_bound, markov_bound, BoundResult, Tail};
use tourpart::complete::{partition_tournament, PartitionCertificate, CERTIFICATE_VERSION};
use tourpart::experiment::{threshold_experiment, to_csv, ExperimentConfig, Mode};
use tourpart::generators::{GenSpec, Model};
use tourpart::oracle::{bruteforce_partition_mixed, SearchOutcome};
use tourpart::profile::Profile;
use tourpart::{check_k_connected, connectivity, verify_partition, Tournament};

const VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "tourpart", version, about = "Strong k-connectivity and tournament partitioning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a tournament and write it in .trn form.
    Gen {
        #[arg(long, value_enum)]
        model: GenModel,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        max_tries: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Connectivity of a tournament, or a strong k-connectivity verdict.
    Conn {
        file: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        /// Include the separating witness when the test fails.
        #[arg(long)]
        witness: bool,
    },
    /// Run the partition pipeline and write a certificate.
    Partition {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
        /// `desk`, `paper`, `tiny`, or a JSON profile file.
        #[arg(long, default_value = "desk")]
        profile: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        max_rounds: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a certificate against a tournament.
    Verify { certificate: PathBuf, file: PathBuf },
    /// Exhaustive partition search on a small tournament.
    Oracle {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
        /// Per-part connectivity targets, overriding `--k`.
        #[arg(long, value_delimiter = ',')]
        targets: Option<Vec<usize>>,
        /// Wall-clock budget in milliseconds.
        #[arg(long, default_value_t = 60_000)]
        budget: u64,
    },
    /// Connectivity against partition success over a range of seeds.
    Experiment {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        base_seed: u64,
        #[arg(long, value_enum, default_value_t = ExpMode::Exact)]
        mode: ExpMode,
        #[arg(long, default_value = "tiny")]
        profile: String,
        #[arg(long, default_value_t = 64)]
        max_rounds: usize,
        #[arg(long, default_value_t = 60_000)]
        budget: u64,
        /// Fill the elapsed_ms column (output is then not reproducible).
        #[arg(long)]
        timing: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate a concentration bound.
    Bounds {
        #[command(subcommand)]
        kind: BoundKind,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenModel {
    Uniform,
    Rotational,
    Kconn,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExpMode {
    Exact,
    Pipeline,
}

#[derive(Clone, Copy, ValueEnum)]
enum TailArg {
    Lower,
    Upper,
}

#[derive(Subcommand)]
enum BoundKind {
    Hoeffding {
        #[arg(long)]
        eta1: f64,
        #[arg(long)]
        eta2: f64,
    },
    Markov {
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        r: u64,
    },
    Chernoff {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum)]
        tail: TailArg,
    },
}

struct Failure {
    code: u8,
    error: &'static str,
    detail: String,
    /// Printed on stdout before the error, e.g. a failure transcript.
    payload: Option<Value>,
}

impl Failure {
    fn new(error: &'static str, detail: impl Into<String>) -> Self {
        Self { code: 1, error, detail: detail.into(), payload: None }
    }

    fn usage(detail: impl Into<String>) -> Self {
        Self { code: 2, ..Self::new("invalid-arguments", detail) }
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::new("io", format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    s
}

fn load_tournament(path: &Path) -> Result<Tournament, Failure> {
    Tournament::from_trn(&read(path)?).map_err(|e| Failure::new("malformed-input", format!("{}: {e}", path.display())))
}

fn load_profile(name: &str) -> Result<Profile, Failure> {
    if let Some(p) = Profile::by_name(name) {
        return Ok(p);
    }
    let text = read(Path::new(name))?;
    serde_json::from_str(&text).map_err(|e| Failure::new("malformed-input", format!("profile {name}: {e}")))
}

fn bound_json(kind: &str, r: Result<BoundResult, tourpart::InputError>) -> Result<String, Failure> {
    let r = r.map_err(|e| Failure::usage(e.to_string()))?;
    Ok(to_json(&json!({
        "version": VERSION,
        "kind": kind,
        "bound": r.bound,
        "log_bound": r.log_bound,
        "threshold": r.threshold,
    })))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Gen { model, n, k, seed, max_tries, output } => {
            let model = match model {
                GenModel::Uniform => Model::Uniform,
                GenModel::Rotational => Model::Rotational,
                GenModel::Kconn => Model::RejectionKConnected,
            };
            let spec = GenSpec { model, n, k, seed, max_tries };
            let t = spec.generate().map_err(|e| Failure::new("generation-failed", e.to_string()))?;
            write_out(output.as_deref(), &t.to_trn())
        }
        Command::Conn { file, k, witness } => {
            let t = load_tournament(&file)?;
            let body = match k {
                None => json!({ "version": VERSION, "n": t.n(), "connectivity": connectivity(&t) }),
                Some(k) => {
                    let verdict = check_k_connected(&t, k);
                    let mut v = json!({ "version": VERSION, "n": t.n(), "k": k, "k_connected": verdict.is_ok() });
                    if let (true, Err(w)) = (witness, verdict) {
                        v["witness"] = serde_json::to_value(w).expect("serialisable");
                    }
                    v
                }
            };
            write_out(None, &to_json(&body))
        }
        Command::Partition { file, k, t: parts, profile, seed, max_rounds, output } => {
            let t = load_tournament(&file)?;
            let profile = load_profile(&profile)?;
            if parts >= 2 {
                let need = profile.gadget_count(k, parts);
                if need.is_none_or(|g| g > t.n()) {
                    return Err(Failure::new(
                        "infeasible-profile",
                        format!(
                            "profile {} needs sigma1 k t = {:e} gadgets, but the tournament has {} vertices",
                            profile.name,
                            profile.sigma1 * (k * parts) as f64,
                            t.n()
                        ),
                    ));
                }
            }
            match partition_tournament(&t, k, parts, &profile, seed, max_rounds) {
                Ok(cert) => write_out(output.as_deref(), &to_json(&cert)),
                Err(f) => Err(Failure {
                    payload: Some(json!({ "version": VERSION, "failure": f.failure, "stage_log": f.stage_log })),
                    ..Failure::new("partition-failed", f.failure.to_string())
                }),
            }
        }
        Command::Verify { certificate, file } => {
            let t = load_tournament(&file)?;
            let text = read(&certificate)?;
            let cert: PartitionCertificate =
                serde_json::from_str(&text).map_err(|e| Failure::new("malformed-input", format!("{}: {e}", certificate.display())))?;
            if cert.version != CERTIFICATE_VERSION {
                return Err(Failure::new("malformed-input", format!("certificate version {} is not supported", cert.version)));
            }
            if cert.n != t.n() {
                return Err(Failure::new("mismatch", format!("certificate is for n = {}, tournament has {}", cert.n, t.n())));
            }
            let report = verify_partition(&t, &cert.parts, cert.k);
            let valid = report.is_valid() && cert.parts.len() == cert.t;
            write_out(None, &to_json(&json!({ "version": VERSION, "valid": valid, "report": report })))?;
            if valid {
                return Ok(());
            }
            let detail = if !report.is_partition() {
                format!("not a partition: missing {:?}, overlaps {:?}, out of range {:?}", report.missing, report.overlaps, report.out_of_range)
            } else if cert.parts.len() != cert.t {
                format!("{} parts, certificate claims t = {}", cert.parts.len(), cert.t)
            } else {
                format!("failing parts {:?}", report.failing_parts())
            };
            Err(Failure::new("invalid-certificate", detail))
        }
        Command::Oracle { file, k, t: parts, targets, budget } => {
            let t = load_tournament(&file)?;
            let targets = targets.unwrap_or_else(|| vec![k; parts]);
            if targets.len() != parts {
                return Err(Failure::usage(format!("{} targets given for t = {parts}", targets.len())));
            }
            let out = bruteforce_partition_mixed(&t, &targets, Duration::from_millis(budget))
                .map_err(|e| Failure::new("limit-exceeded", e.to_string()))?;
            let mut body = serde_json::to_value(&out).expect("serialisable");
            body["version"] = json!(VERSION);
            body["targets"] = json!(targets);
            write_out(None, &to_json(&body))?;
            match out {
                SearchOutcome::Timeout { fraction } => Err(Failure {
                    code: 3,
                    ..Failure::new("timeout", format!("budget exhausted after {:.1}% of the search", 100.0 * fraction))
                }),
                _ => Ok(()),
            }
        }
        Command::Experiment { n, k, t, seeds, base_seed, mode, profile, max_rounds, budget, timing, output } => {
            let cfg = ExperimentConfig {
                n,
                k,
                t,
                base_seed,
                count: seeds,
                budget: Duration::from_millis(budget),
                mode: match mode {
                    ExpMode::Exact => Mode::Exact,
                    ExpMode::Pipeline => Mode::Pipeline,
                },
                profile: load_profile(&profile)?,
                max_rounds,
            };
            let rows = threshold_experiment(&cfg).map_err(|e| Failure::new("limit-exceeded", e.to_string()))?;
            write_out(output.as_deref(), &to_csv(&rows, timing))
        }
        Command::Bounds { kind } => {
            let text = match kind {
                BoundKind::Hoeffding { eta1, eta2 } => bound_json("hoeffding", hoeffding_bound(eta1, eta2))?,
                BoundKind::Markov { eta, r } => bound_json("markov", markov_bound(eta, r))?,
                BoundKind::Chernoff { mu, delta, tail } => {
                    let tail = match tail {
                        TailArg::Lower => Tail::Lower,
                        TailArg::Upper => Tail::Upper,
                    };
                    bound_json("chernoff", chernoff_bound(mu, delta, tail))?
                }
            };
            write_out(None, &text)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let detail = e.to_string().lines().next().unwrap_or_default().trim_start_matches("error: ").to_string();
            eprintln!("{}", json!({ "error": "invalid-arguments", "detail": detail }));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if let Some(p) = &f.payload {
                print!("{}", to_json(p));
            }
            eprintln!("{}", json!({ "error": f.error, "detail": f.detail }));
            ExitCode::from(f.code)
        }
    }
}
