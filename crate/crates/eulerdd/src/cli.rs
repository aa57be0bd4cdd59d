//! The `eulerdd` command line.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eulerdd_core::analysis::{classify, count_euler_zero, count_euler_zero_enumerated, monotone_euler_extrema};
use eulerdd_core::boolfun::BoolFun;
use eulerdd_core::circuit::{compile_query, Circuit};
use eulerdd_core::fragment::fragment;
use eulerdd_core::lattice::{characteristic_polynomials, cnf_lattice, dnf_lattice, safety_by_mobius, verify_big_coeff};
use eulerdd_core::pdb::{TidDatabase, ORACLE_MAX_FACTS};
use eulerdd_core::transform::{equivalence_witness, reduce_to_bot, verify_trace, ColoredGraph, RewriteTrace};

use crate::error::FormatError;
use crate::{bf, ddc, par, selftest, tid, trace};

#[derive(Debug, Parser)]
#[command(name = "eulerdd", version, about = "Euler-characteristic analysis and d-D compilation of H-queries")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Euler characteristic, Möbius values, safety and verdict
    Analyze {
        function: PathBuf,
        /// Emit the CNF lattice and the colored hypercube as DOT instead
        #[arg(long)]
        dot: bool,
    },
    /// Template and degenerate leaves for an eul = 0 function
    Fragment { function: PathBuf },
    /// A rewrite trace from the function to ⊥
    Reduce {
        function: PathBuf,
        #[arg(short)]
        output: Option<PathBuf>,
    },
    /// A rewrite trace between two functions with the same characteristic
    Witness {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
        #[arg(short)]
        output: Option<PathBuf>,
    },
    /// Replays a trace from --from and checks that it ends at --to (default ⊥)
    VerifyTrace {
        trace: PathBuf,
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: Option<PathBuf>,
    },
    /// Compiles the lineage of Q_φ on a database into a d-D
    Compile {
        function: PathBuf,
        database: PathBuf,
        #[arg(short)]
        output: Option<PathBuf>,
    },
    /// Exact probability of a circuit on a database
    Prob {
        circuit: PathBuf,
        database: PathBuf,
        /// Skip the determinism check
        #[arg(long)]
        unchecked: bool,
    },
    /// Exact probability by enumerating all sub-databases
    Oracle {
        function: PathBuf,
        database: PathBuf,
        #[arg(long, default_value_t = ORACLE_MAX_FACTS)]
        max_facts: usize,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Tractability verdict
    Classify { function: PathBuf },
    /// Perfect-matching scan over monotone eul = 0 functions
    Conjecture {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Extrema of eul over monotone functions
    Extrema {
        #[arg(long)]
        k: usize,
    },
    /// Number of functions with eul = 0
    CountEulerZero {
        #[arg(long)]
        k: usize,
        /// Also enumerate all functions (k ≤ 3)
        #[arg(long)]
        check: bool,
    },
    /// Exhaustive k ≤ 2 checks and golden cases
    Selftest,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable or malformed input.
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Domain(#[from] eulerdd_core::Error),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Domain(_) | CliError::Failed(_) => 1,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn parsed<T>(path: &Path, r: Result<T, FormatError>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_function(path: &Path) -> Result<BoolFun, CliError> {
    parsed(path, bf::parse_function(&read(path)?))
}

fn load_database(path: &Path) -> Result<TidDatabase, CliError> {
    parsed(path, tid::parse_database(&read(path)?))
}

/// Reads the database over the schema of `k`.
fn load_database_for(path: &Path, k: usize) -> Result<TidDatabase, CliError> {
    let db = load_database(path)?;
    if db.k() > k {
        return Err(CliError::Input(format!(
            "{}: database uses S{} but the function has k = {k}",
            path.display(),
            db.k()
        )));
    }
    Ok(db.lift(k)?)
}

fn write_output(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn or_na<T: ToString, E>(r: Result<T, E>) -> String {
    r.map_or_else(|_| "n/a".into(), |v| v.to_string())
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let text = match cli.command {
        Command::Analyze { function, dot } => {
            let phi = load_function(&function)?;
            if dot {
                dot_report(&phi)
            } else {
                analyze_report(&phi)
            }
        }
        Command::Fragment { function } => {
            let phi = load_function(&function)?;
            let fr = fragment(&phi)?;
            let mut s = format!("template {}\nleaves {}\n", fr.template, fr.leaves.len());
            for (i, leaf) in fr.leaves.iter().enumerate() {
                let _ = write!(s, "leaf H{i}\n{}", bf::write_function(leaf));
            }
            s
        }
        Command::Reduce { function, output } => {
            let phi = load_function(&function)?;
            emit_trace(&reduce_to_bot(&phi)?, output.as_deref())?
        }
        Command::Witness { from, to, output } => {
            let (a, b) = (load_function(&from)?, load_function(&to)?);
            emit_trace(&equivalence_witness(&a, &b)?, output.as_deref())?
        }
        Command::VerifyTrace { trace: path, from, to } => {
            let text = read(&path)?;
            let start = load_function(&from)?;
            let end = match &to {
                Some(p) => load_function(p)?,
                None => BoolFun::bot(start.k())?,
            };
            let t = parsed(&path, trace::parse_trace(&text, &start))?;
            verify_trace(&t, &end)?;
            format!("valid {} steps\n", t.len())
        }
        Command::Compile { function, database, output } => {
            let phi = load_function(&function)?;
            let db = load_database_for(&database, phi.k())?;
            let c = compile_query(&phi, &db)?;
            let text = parsed(&database, ddc::export(&c, &db))?;
            match output {
                Some(p) => {
                    write_output(&p, &text)?;
                    format!("gates {}\nfacts {}\n", c.len(), c.num_facts())
                }
                None => text,
            }
        }
        Command::Prob { circuit, database, unchecked } => {
            let text = read(&circuit)?;
            let db = load_database(&database)?;
            let c: Circuit = parsed(&circuit, ddc::import(&text, &db))?;
            let p = if unchecked { c.probability_unchecked(&db)? } else { c.probability(&db)? };
            format!("{}\n", tid::format_rational(&p))
        }
        Command::Oracle { function, database, max_facts, jobs } => {
            let phi = load_function(&function)?;
            let db = load_database_for(&database, phi.k())?;
            let p = par::with_jobs(jobs, || par::oracle_pqe(&phi, &db, max_facts))?;
            format!("{}\n", tid::format_rational(&p))
        }
        Command::Classify { function } => {
            let v = classify(&load_function(&function)?);
            format!("verdict {}\neuler {}\nreason {}\n", v.kind, v.euler, v.reason.tag())
        }
        Command::Conjecture { k, jobs } => {
            let r = par::with_jobs(jobs, || par::conjecture_check(k))?;
            let mut s = format!(
                "k {k}\nmonotone_euler_zero {}\nboth_sides {}\ncolored_only {}\nuncolored_only {}\ncounterexamples {}\n",
                r.entries.len(),
                r.both_sides(),
                r.one_sided().filter(|e| e.colored).count(),
                r.one_sided().filter(|e| e.uncolored).count(),
                r.counterexamples().count()
            );
            for e in r.counterexamples() {
                s.push_str(&bf::write_function(&e.phi));
            }
            s
        }
        Command::Extrema { k } => {
            let r = monotone_euler_extrema(k)?;
            let mut s = format!(
                "k {k}\nmonotone_functions {}\nmin {}\nmax {}\nsymmetric {}\nthreshold_window_agrees {}\n",
                r.monotone_count,
                r.min,
                r.max,
                yes_no(r.symmetric),
                yes_no(r.window_agrees)
            );
            for c in &r.candidates {
                let _ = writeln!(
                    s,
                    "threshold {} euler {} attains {} stated {}",
                    c.threshold,
                    c.euler,
                    yes_no(c.attains),
                    yes_no(c.stated)
                );
            }
            s
        }
        Command::CountEulerZero { k, check } => {
            let count = count_euler_zero(k)?;
            let mut s = format!("k {k}\ncount {count}\n");
            if check {
                let n = count_euler_zero_enumerated(k)?;
                let _ = writeln!(s, "enumerated {n}");
                if count != n.into() {
                    out.write_all(s.as_bytes())?;
                    return Err(CliError::Failed(format!("formula {count} differs from enumeration {n}")));
                }
            }
            s
        }
        Command::Selftest => {
            let checks = selftest::run();
            let mut s = String::new();
            for c in &checks {
                match &c.failure {
                    None => {
                        let _ = writeln!(s, "PASS {}", c.name);
                    }
                    Some(why) => {
                        let _ = writeln!(s, "FAIL {}: {why}", c.name);
                    }
                }
            }
            let failed = checks.iter().filter(|c| !c.passed()).count();
            if failed > 0 {
                out.write_all(s.as_bytes())?;
                return Err(CliError::Failed(format!("{failed} selftest check(s) failed")));
            }
            s
        }
    };
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn emit_trace(t: &RewriteTrace, output: Option<&Path>) -> Result<String, CliError> {
    let text = trace::write_trace(t);
    match output {
        Some(p) => {
            write_output(p, &text)?;
            Ok(format!("steps {}\nplus {}\n", t.len(), t.plus_count()))
        }
        None => Ok(text),
    }
}

/// Key-value report; quantities that do not exist for `φ` print `n/a`.
pub fn analyze_report(phi: &BoolFun) -> String {
    let mut s = String::new();
    let monotone = phi.is_monotone();
    let _ = writeln!(s, "k {}", phi.k());
    let _ = writeln!(s, "satisfying {}", phi.sat_count());
    let _ = writeln!(s, "euler {}", phi.euler());
    let _ = writeln!(s, "monotone {}", yes_no(monotone));
    let _ = writeln!(s, "degenerate {}", yes_no(phi.is_degenerate()));
    let cnf = if monotone { cnf_lattice(phi).ok() } else { None };
    let dnf = if monotone { dnf_lattice(phi).ok() } else { None };
    let _ = writeln!(s, "mu_cnf {}", cnf.as_ref().map_or("n/a".into(), |l| l.mobius_hat().to_string()));
    let _ = writeln!(s, "mu_dnf {}", dnf.as_ref().map_or("n/a".into(), |l| l.mobius_hat().to_string()));
    let _ =
        writeln!(s, "big_coefficient {}", or_na(verify_big_coeff(phi).map(|b| if b.ok { "ok" } else { "MISMATCH" })));
    let _ = writeln!(
        s,
        "char_polys {}",
        or_na(characteristic_polynomials(phi).map(|p| if p.all_equal() { "equal" } else { "DIFFER" }))
    );
    let _ = writeln!(s, "safety {}", or_na(safety_by_mobius(phi)));
    let _ = writeln!(s, "verdict {}", classify(phi).kind);
    if let Some(l) = &cnf {
        let _ = writeln!(s, "cnf_lattice {}", l.len());
        for (x, m) in l.mobius_values() {
            let _ = writeln!(s, "mobius {} {m}", bf::format_valuation(x).replace(' ', ","));
        }
    }
    s
}

fn dot_report(phi: &BoolFun) -> String {
    let mut s = String::new();
    if phi.is_monotone() {
        if let Ok(l) = cnf_lattice(phi) {
            s.push_str(&l.to_dot("cnf_lattice"));
        }
    }
    s.push_str(&ColoredGraph::new(phi).to_dot("hypercube"));
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use eulerdd_core::boolfun::phi9;

    fn run_args(args: &[&str]) -> Result<String, CliError> {
        let cli = Cli::try_parse_from(std::iter::once("eulerdd").chain(args.iter().copied())).unwrap();
        let mut out = Vec::new();
        run(cli, &mut out)?;
        Ok(String::from_utf8(out).unwrap())
    }

    #[test]
    fn analyze_phi9() {
        let r = analyze_report(&phi9());
        for line in ["euler 0", "mu_cnf 0", "verdict TRACTABLE_DD", "cnf_lattice 9", "mobius 0,1,2,3 0", "mobius . 1"] {
            assert!(r.lines().any(|l| l == line), "missing `{line}` in\n{r}");
        }
    }

    #[test]
    fn analyze_constants() {
        let top = analyze_report(&BoolFun::top(1).unwrap());
        assert!(top.contains("mu_cnf n/a"));
        let bot = analyze_report(&BoolFun::bot(1).unwrap());
        assert!(bot.contains("mu_dnf n/a"));
    }

    #[test]
    fn count_and_extrema() {
        assert_eq!(run_args(&["count-euler-zero", "--k", "2", "--check"]).unwrap(), "k 2\ncount 70\nenumerated 70\n");
        let e = run_args(&["extrema", "--k", "2"]).unwrap();
        assert!(e.contains("min -1\nmax 2\n"));
        assert!(matches!(run_args(&["extrema", "--k", "9"]), Err(CliError::Domain(_))));
    }

    #[test]
    fn missing_file_is_an_input_error() {
        let e = run_args(&["classify", "/nonexistent/x.bf"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
