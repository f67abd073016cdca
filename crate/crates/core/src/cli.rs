//! Command-line front end.
//!
//! Every subcommand produces a text or JSON artifact and an exit status;
//! [`dispatch`] does the work and the binary only prints.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::degrees::{degree_table, DegreeRecord};
use crate::error::{Error, Result};
use crate::numeric::verify_component;
use crate::poly::{MultiPoly, PolyRecord};
use crate::relation::{into_unique, run_relation_search_with, FindOptions, VarSwap};
use crate::rosenhain::{rosenhain_triple, RosenhainRecord, RosenhainSeries};
use crate::s6::{fixed_group, orbit_table, Perm6};
use crate::theta::{humbert_params, restricted_theta, Discriminant, ThetaChar};

/// Environment variable naming the series cache directory.
pub const CACHE_ENV: &str = "HUMBERT_CACHE_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NO_RELATION: i32 = 2;
pub const EXIT_AMBIGUOUS: i32 = 3;
pub const EXIT_VERIFY_FAIL: i32 = 4;
pub const EXIT_PARSE: i32 = 5;
pub const EXIT_INTERNAL: i32 = 6;

#[derive(Parser, Debug, Clone)]
#[command(
    name = "humbert",
    version,
    about = "Humbert surface components in Rosenhain invariants"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Emit structured JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Cap on worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the artifact here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Degree table for every admissible discriminant up to a bound.
    Degrees {
        #[arg(long, default_value_t = 24)]
        max: u64,
    },
    /// Restricted expansion of one theta constant.
    Theta {
        #[arg(long)]
        disc: i64,
        /// Characteristic bits, e.g. 0000 or 1111.
        #[arg(long = "char", default_value = "0000")]
        characteristic: String,
        #[arg(long)]
        prec: u32,
    },
    /// Expansions of the Rosenhain triple.
    Rosenhain {
        #[arg(long)]
        disc: i64,
        #[arg(long)]
        prec: u32,
    },
    /// Search for the relation of a given degree.
    Find {
        #[arg(long)]
        disc: i64,
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        prec: Option<u32>,
        /// Exploit a variable swap, e.g. e1e2.
        #[arg(long)]
        symmetry: Option<String>,
    },
    /// S6-orbit of a component.
    Orbit(InputArgs),
    /// Stabilizer of a component in S6.
    Fixgroup(InputArgs),
    /// Numeric check of a component at sampled points.
    Verify {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        disc: i64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Polynomial file, printed text or JSON record.
    #[arg(long = "in")]
    pub input: PathBuf,
}

/// Exit status and emitted artifact of one command.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoRelation { .. } => EXIT_NO_RELATION,
        Error::AmbiguousKernel { .. } => EXIT_AMBIGUOUS,
        Error::Parse { .. } => EXIT_PARSE,
        Error::NotAdmissible(_)
        | Error::UnsupportedCharacteristic(_)
        | Error::Unsupported(..)
        | Error::SpecialCase
        | Error::InvalidPermutation(_)
        | Error::Config(_)
        | Error::Io(_) => EXIT_USAGE,
        _ => EXIT_INTERNAL,
    }
}

#[derive(Serialize)]
struct DegreesOut<'a> {
    schema: &'static str,
    rows: &'a [DegreeRecord],
}

#[derive(Serialize)]
struct OrbitOut {
    schema: &'static str,
    size: usize,
    elements: Vec<PolyRecord>,
}

#[derive(Serialize)]
struct FixgroupOut {
    schema: &'static str,
    order: usize,
    elements: Vec<Perm6>,
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable artifact") + "\n"
}

fn validate(cfg: &RunConfig) -> Result<()> {
    let prec = match &cfg.command {
        Command::Theta { prec, .. } | Command::Rosenhain { prec, .. } => Some(*prec),
        Command::Find { prec, .. } => *prec,
        _ => None,
    };
    if let Some(n) = prec {
        if n < 4 {
            return Err(Error::Config(format!("precision {n} is below 4")));
        }
    }
    match &cfg.command {
        Command::Orbit(i) | Command::Fixgroup(i) | Command::Verify { input: i, .. }
            if !i.input.is_file() =>
        {
            return Err(Error::Io(format!(
                "{} is not a readable file",
                i.input.display()
            )));
        }
        _ => {}
    }
    if let Command::Verify { tol, .. } = &cfg.command {
        if tol.is_nan() || *tol <= 0.0 {
            return Err(Error::Config("tolerance must be positive".into()));
        }
    }
    if let Some(out) = &cfg.out {
        if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
            if !dir.is_dir() {
                return Err(Error::Io(format!("{} is not a directory", dir.display())));
            }
        }
    }
    Ok(())
}

/// Cache file of the triple for `(delta, n)`, tagged with the crate version.
pub fn cache_path(dir: &Path, disc: Discriminant, n: u32) -> PathBuf {
    dir.join(format!(
        "rosenhain-v{}-d{}-n{}.json",
        env!("CARGO_PKG_VERSION"),
        disc.delta(),
        n
    ))
}

/// Rosenhain series, read from and written to the cache directory when
/// one is configured.
pub fn cached_triple(cache: Option<&Path>, disc: Discriminant, n: u32) -> Result<RosenhainSeries> {
    let Some(dir) = cache else {
        return rosenhain_triple(disc, n);
    };
    let path = cache_path(dir, disc, n);
    if let Ok(text) = fs::read_to_string(&path) {
        if let Ok(rec) = serde_json::from_str::<RosenhainRecord>(&text) {
            if let Ok(r) = RosenhainSeries::from_record(&rec) {
                if r.disc == disc && r.precision == n {
                    return Ok(r);
                }
            }
        }
    }
    let r = rosenhain_triple(disc, n)?;
    fs::create_dir_all(dir)?;
    // write then rename so concurrent readers never see a partial file
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::write(&tmp, serde_json::to_string(&r.to_record())?)?;
    fs::rename(&tmp, &path)?;
    Ok(r)
}

fn read_poly(path: &Path) -> Result<MultiPoly> {
    MultiPoly::read_any(&fs::read_to_string(path)?)
}

fn run(cfg: &RunConfig, cache: Option<&Path>) -> Result<Outcome> {
    let ok = |output: String| {
        Ok(Outcome {
            code: EXIT_OK,
            output,
        })
    };
    match &cfg.command {
        Command::Degrees { max } => {
            let rows = degree_table(*max)?;
            if cfg.json {
                return ok(to_json(&DegreesOut {
                    schema: "humbert.degrees.v1",
                    rows: &rows,
                }));
            }
            let mut s = String::from("delta  m  a_delta  deg_F*  deg_F\n");
            for r in &rows {
                let conj = r.deg_conjectured.map_or("-".to_string(), |v| v.to_string());
                writeln!(
                    s,
                    "{:>5} {:>2} {:>8} {:>7} {:>6}",
                    r.delta, r.m, r.a_delta, r.deg_fstar, conj
                )
                .expect("string write");
            }
            ok(s)
        }
        Command::Theta {
            disc,
            characteristic,
            prec,
        } => {
            let d = humbert_params(*disc)?;
            let ch: ThetaChar = characteristic.parse()?;
            let t = restricted_theta(ch, d, *prec);
            ok(if cfg.json {
                to_json(&t.to_record())
            } else {
                format!("{t}\n")
            })
        }
        Command::Rosenhain { disc, prec } => {
            let r = cached_triple(cache, humbert_params(*disc)?, *prec)?;
            ok(if cfg.json {
                to_json(&r.to_record())
            } else {
                format!("e1 = {}\ne2 = {}\ne3 = {}\n", r.e1, r.e2, r.e3)
            })
        }
        Command::Find {
            disc,
            degree,
            prec,
            symmetry,
        } => {
            let opts = FindOptions {
                precision: *prec,
                symmetry: symmetry.as_deref().map(VarSwap::parse).transpose()?,
            };
            let provider = |d: Discriminant, n: u32| cached_triple(cache, d, n);
            let report = run_relation_search_with(*disc, *degree, &opts, &provider)?;
            let text = if cfg.json {
                to_json(&report.to_record())
            } else {
                let mut s = format!(
                    "delta {}  degree {}  precision {}  kernel {}  monomials {}  columns {}\n",
                    report.disc.delta(),
                    report.degree,
                    report.precision,
                    report.kernel_dim,
                    report.monomial_count,
                    report.column_count
                );
                for (n, pass) in &report.residual_checks {
                    writeln!(s, "recheck at {n}: {}", if *pass { "ok" } else { "FAILED" })
                        .expect("string write");
                }
                if let Some(f) = &report.polynomial {
                    s.push_str(&f.print());
                    s.push('\n');
                }
                s
            };
            match into_unique(report) {
                Ok(_) => ok(text),
                Err(e) => Ok(Outcome {
                    code: exit_code(&e),
                    output: text,
                }),
            }
        }
        Command::Orbit(i) => {
            let f = read_poly(&i.input)?.normalize()?;
            let orb = orbit_table(&f)?;
            if cfg.json {
                return ok(to_json(&OrbitOut {
                    schema: "humbert.orbit.v1",
                    size: orb.len(),
                    elements: orb.elements.iter().map(|p| p.to_record()).collect(),
                }));
            }
            let mut s = format!("orbit size {}\n", orb.len());
            for p in &orb.elements {
                s.push_str(&p.print());
                s.push('\n');
            }
            ok(s)
        }
        Command::Fixgroup(i) => {
            let f = read_poly(&i.input)?.normalize()?;
            let g = fixed_group(&f)?;
            if cfg.json {
                return ok(to_json(&FixgroupOut {
                    schema: "humbert.fixgroup.v1",
                    order: g.len(),
                    elements: g,
                }));
            }
            let mut s = format!("order {}\n", g.len());
            for p in &g {
                s.push_str(&p.to_string());
                s.push('\n');
            }
            ok(s)
        }
        Command::Verify {
            input,
            disc,
            trials,
            tol,
            seed,
        } => {
            let f = read_poly(&input.input)?;
            let rep = verify_component(&f, humbert_params(*disc)?, *trials, *tol, *seed)?;
            let text = if cfg.json {
                to_json(&rep)
            } else {
                format!(
                    "delta {}  trials {}  max residual {:.3e}  tol {:.1e}  {}\n",
                    rep.delta,
                    rep.trials,
                    rep.max_residual,
                    rep.tol,
                    if rep.passed { "PASS" } else { "FAIL" }
                )
            };
            Ok(Outcome {
                code: if rep.passed {
                    EXIT_OK
                } else {
                    EXIT_VERIFY_FAIL
                },
                output: text,
            })
        }
    }
}

/// Runs one command, writing the artifact to `--out` when given.
pub fn dispatch(cfg: &RunConfig) -> Outcome {
    let cache = std::env::var_os(CACHE_ENV).map(PathBuf::from);
    dispatch_with_cache(cfg, cache.as_deref())
}

pub fn dispatch_with_cache(cfg: &RunConfig, cache: Option<&Path>) -> Outcome {
    let result = validate(cfg).and_then(|_| match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(|| run(cfg, cache)),
        None => run(cfg, cache),
    });
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            return Outcome {
                code: exit_code(&e),
                output: format!("error: {e}\n"),
            }
        }
    };
    if let Some(path) = &cfg.out {
        if let Err(e) = fs::write(path, &outcome.output) {
            return Outcome {
                code: EXIT_USAGE,
                output: format!("error: {e}\n"),
            };
        }
    }
    outcome
}

/// Parses arguments; help and version requests come back as `Err` with
/// exit status 0.
pub fn parse_args<I, T>(args: I) -> std::result::Result<RunConfig, Outcome>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    RunConfig::try_parse_from(args).map_err(|e| {
        use clap::error::ErrorKind;
        let code = match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
            _ => EXIT_USAGE,
        };
        Outcome {
            code,
            output: e.render().to_string(),
        }
    })
}
