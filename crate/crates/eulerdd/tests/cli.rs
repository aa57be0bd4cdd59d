use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const PHI9: &str = "k 3\nformula (2 | 3) & (0 | 3) & (1 | 3) & (0 | 1 | 2)\n";
const DB: &str = "\
# two constants, partial
R a 1/2
S1 a b 2/3
S2 a b 0.25
S3 a b 1
S1 a a 1/3
S2 a a 1/3
S3 a a 1/5
T b 3/4
T a 1/7
";

struct Dir(TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.0.path().join(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }
}

fn eulerdd<P: AsRef<Path>>(args: &[&str], paths: &[P]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_eulerdd"));
    cmd.args(args);
    for p in paths {
        cmd.arg(p.as_ref());
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn compile_then_prob_matches_the_oracle() {
    let d = Dir::new();
    let f = d.file("phi9.bf", PHI9);
    let db = d.file("db.tid", DB);
    let ddc = d.path("phi9.ddc");
    let o = eulerdd(&["compile"], &[&f, &db, &PathBuf::from("-o"), &ddc]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let prob = eulerdd(&["prob"], &[&ddc, &db]);
    let oracle = eulerdd(&["oracle"], &[&f, &db]);
    assert!(prob.status.success() && oracle.status.success());
    assert_eq!(stdout(&prob), stdout(&oracle));
    assert!(stdout(&prob).trim().contains('/'));
}

#[test]
fn nonzero_euler_compile_is_a_domain_error() {
    let d = Dir::new();
    let f = d.file("and.bf", "k 1\nformula 0 & 1\n");
    let db = d.file("db.tid", "R a 1/2\nS1 a b 1/2\nT b 1/2\n");
    let o = eulerdd(&["compile"], &[&f, &db]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));

    let c = eulerdd(&["classify"], &[&f]);
    assert!(c.status.success());
    assert!(stdout(&c).starts_with("verdict SHARP_P_HARD"));
}

#[test]
fn malformed_input_is_exit_2() {
    let d = Dir::new();
    let bad = d.file("bad.bf", "k 1\nsat\n0 0\n");
    let o = eulerdd(&["analyze"], &[&bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let missing = d.path("nope.bf");
    assert_eq!(eulerdd(&["classify"], &[&missing]).status.code(), Some(2));

    let f = d.file("phi9.bf", PHI9);
    let db = d.file("db.tid", "R a 2/1\n");
    assert_eq!(eulerdd(&["oracle"], &[&f, &db]).status.code(), Some(2));
}

#[test]
fn reduce_and_witness_traces_verify() {
    let d = Dir::new();
    let f = d.file("phi9.bf", PHI9);
    let g = d.file("g.bf", "k 3\nsat\n0\n1\n");
    let t = d.path("r.trace");
    assert!(eulerdd(&["reduce"], &[&f, &PathBuf::from("-o"), &t]).status.success());
    let v = eulerdd(&["verify-trace"], &[&t, &PathBuf::from("--from"), &f]);
    assert!(v.status.success());
    assert!(stdout(&v).starts_with("valid "));

    let w = d.path("w.trace");
    let o = eulerdd(&["witness"], &[&PathBuf::from("--from"), &f, &PathBuf::from("--to"), &g]);
    assert_eq!(o.status.code(), Some(1));

    let h = d.file("h.bf", "k 3\nsat\n0 1\n2\n");
    let args = [PathBuf::from("--from"), f.clone(), PathBuf::from("--to"), h.clone(), PathBuf::from("-o"), w.clone()];
    assert!(eulerdd(&["witness"], &args).status.success());
    let v = eulerdd(&["verify-trace"], &[&w, &PathBuf::from("--from"), &f, &PathBuf::from("--to"), &h]);
    assert!(v.status.success());
    // The same trace does not end at ⊥.
    assert_eq!(eulerdd(&["verify-trace"], &[&w, &PathBuf::from("--from"), &f]).status.code(), Some(1));
}

#[test]
fn tampered_circuit_is_rejected() {
    let d = Dir::new();
    let f = d.file("phi9.bf", PHI9);
    let db = d.file("db.tid", DB);
    let o = eulerdd(&["compile"], &[&f, &db]);
    let text = stdout(&o);
    // Turning an AND into an OR breaks determinism or decomposability.
    let tampered: String = text
        .lines()
        .map(|l| {
            let mut parts: Vec<&str> = l.split_whitespace().collect();
            if parts.get(1) == Some(&"a") && parts.len() > 3 {
                parts[1] = "o";
            }
            parts.join(" ") + "\n"
        })
        .collect();
    assert_ne!(tampered, text);
    let c = d.file("t.ddc", &tampered);
    assert_eq!(eulerdd(&["prob"], &[&c, &db]).status.code(), Some(1));
}

#[test]
fn small_reports() {
    let o = eulerdd::<&str>(&["count-euler-zero", "--k", "2", "--check"], &[]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("70"));

    let o = eulerdd::<&str>(&["extrema", "--k", "3"], &[]);
    let s = stdout(&o);
    assert!(s.contains("min -3\n") && s.contains("max 3\n"));

    let o = eulerdd::<&str>(&["conjecture", "--k", "3", "--jobs", "2"], &[]);
    assert!(stdout(&o).contains("counterexamples 0\n"));

    let o = eulerdd::<&str>(&["selftest"], &[]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn dot_output_is_only_dot() {
    let d = Dir::new();
    let f = d.file("phi9.bf", PHI9);
    let o = eulerdd(&["analyze", "--dot"], &[&f]);
    let s = stdout(&o);
    assert!(s.lines().next().unwrap().contains("graph"));
    assert!(!s.contains("euler 0"));
}
