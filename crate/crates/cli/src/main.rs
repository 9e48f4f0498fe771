use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use oscbound::harness::{
    critpoint, fresnel_decay, ift_checks, morse_check, parse_tau_spec, sweep, vdc_trials, Problem, ProblemConfig,
    SweepSpec,
};
use oscbound::hypotheses::{find_good_pair, pair_diagnostics};
use oscbound::stphase::CriticalSearch;
use oscbound::{parse_poly, Error};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "oscbound", version, about = "Certified checks and sweeps for oscillatory integrals of forms")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Problem file (TOML).
    config: PathBuf,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Absolute quadrature tolerance; overrides the config.
    #[arg(long)]
    tol: Option<f64>,
    /// Enclosure grid points per axis; overrides the config.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Case classification, ladder radii and the dimension cross-check.
    Classify(Common),
    /// First qualifying pair of variables.
    Pair(Common),
    /// Inverse-function certificates for Psi and the Morse map.
    CertifyIft {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        #[arg(long, default_value_t = 100)]
        targets: usize,
    },
    /// Critical point of the reference slice phase.
    Critpoint {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        tau: Option<f64>,
        /// Pair values `t_i,t_j`; needs --tau.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        t: Option<Vec<f64>>,
    },
    /// Residuals of the Morse normal form on the certified square.
    MorseCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Randomized trials of the one-dimensional decay bounds.
    VdcCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Maxima of partial Fresnel integrals and their decay slope.
    Fresnel {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "10:1e4:log7")]
        tau: String,
        #[arg(long, default_value_t = 1.0)]
        l: f64,
    },
    /// Integrate over a (tau, t) grid and report c_hat.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "1:1e3:log8")]
        tau: String,
        #[arg(long, default_value_t = 10.0)]
        tmax_mult: f64,
        /// Points per pair coordinate of the t grid.
        #[arg(long, default_value_t = 9)]
        t_points: usize,
        /// CSV path; defaults to the report path with extension `csv`.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Certification(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Io(_) | Error::Parse { .. } => Failure::Usage(e.to_string()),
            Error::Certification(_) | Error::RadiusUnderflow(_) => Failure::Certification(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn load(c: &Common) -> Result<ProblemConfig, Failure> {
    let mut cfg = ProblemConfig::load(&c.config)?;
    if let Some(t) = c.tol {
        cfg.tol = t;
    }
    if let Some(g) = c.grid {
        cfg.grid = Some(g);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn problem(c: &Common) -> Result<Problem, Failure> {
    Ok(Problem::from_config(load(c)?, c.seed)?)
}

fn emit_text(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            use std::io::Write;
            match writeln!(std::io::stdout().lock(), "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Runtime(e.to_string())),
                _ => Ok(()),
            }
        }
    }
}

fn emit<T: Serialize>(c: &Common, v: &T) -> Outcome {
    let s = serde_json::to_string_pretty(v).expect("report serializes");
    emit_text(c.out.as_deref(), &s)
}

fn check(ok: bool, what: &str) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(Failure::Certification(format!("{what} failed")))
    }
}

#[derive(Serialize)]
struct Tagged<'a, T: Serialize> {
    fingerprint: &'a str,
    report: T,
}

fn run(cmd: Cmd) -> Outcome {
    match cmd {
        Cmd::Classify(c) => {
            let p = problem(&c)?;
            let s = p.summary(c.seed);
            emit(&c, &s)?;
            check(s.ladder.is_some(), "classification")
        }
        Cmd::Pair(c) => {
            let cfg = load(&c)?;
            let f = parse_poly(&cfg.polynomial, Some(cfg.n))?;
            let found = find_good_pair(&f)?;
            #[derive(Serialize)]
            struct PairOut {
                pair: Option<[usize; 2]>,
                diagnostics: Option<oscbound::hypotheses::PairDiagnostics>,
            }
            let out = PairOut {
                pair: found.map(|(i, j)| [i + 1, j + 1]),
                diagnostics: found.map(|(i, j)| pair_diagnostics(&f, i, j)).transpose()?,
            };
            match found {
                Some((i, j)) => println!("({}, {})", i + 1, j + 1),
                None => println!("none"),
            }
            if c.out.is_some() {
                emit(&c, &out)?;
            }
            check(found.is_some(), "pair search")
        }
        Cmd::CertifyIft { common, pairs, targets } => {
            let p = problem(&common)?;
            let checks = ift_checks(&p, common.seed, pairs, targets)?;
            let ok = checks.iter().all(|c| c.passed);
            emit(&common, &Tagged { fingerprint: &p.fingerprint, report: &checks })?;
            check(ok, "certificate check")
        }
        Cmd::Critpoint { common, tau, t } => {
            let p = problem(&common)?;
            let arg = match (tau, t) {
                (Some(tau), Some(t)) if t.len() == 2 => Some((tau, [t[0], t[1]])),
                (None, None) => None,
                _ => return Err(Failure::Usage("--tau needs --t with two values".into())),
            };
            let r = critpoint(&p, arg)?;
            let ok = !matches!(r.result, CriticalSearch::Inconclusive);
            emit(&common, &Tagged { fingerprint: &p.fingerprint, report: &r })?;
            check(ok, "critical point search")
        }
        Cmd::MorseCheck { common, samples } => {
            let p = problem(&common)?;
            let r = morse_check(&p, samples, common.seed)?;
            emit(&common, &Tagged { fingerprint: &p.fingerprint, report: &r })?;
            check(r.passed, "Morse identity")
        }
        Cmd::VdcCheck { common, trials } => {
            let cfg = load(&common)?;
            let r = vdc_trials(common.seed, trials)?;
            emit(&common, &Tagged { fingerprint: &cfg.fingerprint(), report: &r })?;
            check(r.passed, "decay bound")
        }
        Cmd::Fresnel { common, tau, l } => {
            let cfg = load(&common)?;
            let taus = parse_tau_spec(&tau)?;
            let r = fresnel_decay(&taus, l)?;
            emit(&common, &Tagged { fingerprint: &cfg.fingerprint(), report: &r })
        }
        Cmd::Sweep {
            common,
            tau,
            tmax_mult,
            t_points,
            csv,
        } => {
            let p = problem(&common)?;
            let spec = SweepSpec {
                taus: parse_tau_spec(&tau)?,
                tmax_mult,
                t_points,
                tol: p.config.tol,
            };
            let r = sweep(&p, &spec)?;
            emit_text(common.out.as_deref(), &r.to_json())?;
            let csv = csv.or_else(|| common.out.as_ref().map(|o| o.with_extension("csv")));
            if let Some(path) = csv {
                emit_text(Some(&path), &r.to_csv())?;
            }
            log::info!(
                "c_hat {:?}, {} cells, {} flagged",
                r.c_hat,
                r.stats.cells,
                r.stats.flagged
            );
            check(r.stats.flagged == 0 && r.c_hat.is_some(), "sweep")
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Certification(m)) => {
            eprintln!("certification failure: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
