//! Exhaustive checks over all functions with `k ≤ 2` plus the golden cases.

use eulerdd_core::analysis::{induced_perfect_matching, Side};
use eulerdd_core::boolfun::{phi9, phi_no_pm, BoolFun, Valuation};
use eulerdd_core::circuit::{compile_query, DeterminismMode};
use eulerdd_core::fragment::fragment;
use eulerdd_core::lattice::{characteristic_polynomials, cnf_lattice, verify_big_coeff};
use eulerdd_core::pdb::{oracle_pqe, TidDatabase};
use eulerdd_core::transform::{equivalence_witness, reduce_to_bot, verify_trace};
use eulerdd_core::Rational;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub failure: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

fn all_functions(k: usize) -> impl Iterator<Item = BoolFun> {
    (0..1u64 << (1u32 << (k + 1))).map(move |w| BoolFun::from_word(k, w).expect("k ≤ 2"))
}

fn small() -> impl Iterator<Item = BoolFun> {
    all_functions(1).chain(all_functions(2))
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(), String>) -> Check {
    Check { name, failure: f().err() }
}

pub fn run() -> Vec<Check> {
    vec![
        check("phi9 mobius values", phi9_golden),
        check("euler equals mobius (k <= 2)", || {
            for phi in small().filter(|f| f.is_monotone() && !f.is_degenerate()) {
                let b = verify_big_coeff(&phi).map_err(|e| e.to_string())?;
                if !b.ok {
                    return Err(format!("{phi:?}: {b:?}"));
                }
            }
            Ok(())
        }),
        check("characteristic polynomials (k <= 2)", || {
            for phi in small().filter(|f| f.is_monotone() && !f.is_degenerate()) {
                if !characteristic_polynomials(&phi).map_err(|e| e.to_string())?.all_equal() {
                    return Err(format!("{phi:?}"));
                }
            }
            Ok(())
        }),
        check("reduction traces replay (k <= 2)", || {
            for phi in small().filter(|f| f.euler() == 0) {
                let t = reduce_to_bot(&phi).map_err(|e| format!("{phi:?}: {e}"))?;
                verify_trace(&t, &BoolFun::bot(phi.k()).expect("k ≤ 2")).map_err(|e| format!("{phi:?}: {e}"))?;
            }
            Ok(())
        }),
        check("fragmentable iff euler 0 (k <= 2)", || {
            for phi in small() {
                match (fragment(&phi), phi.euler() == 0) {
                    (Ok(fr), true) => {
                        if !fr.is_valid_for(&phi).map_err(|e| e.to_string())? {
                            return Err(format!("invalid fragmentation of {phi:?}"));
                        }
                    }
                    (Err(_), false) => {}
                    (r, _) => return Err(format!("{phi:?}: {:?}", r.map(|_| ()))),
                }
            }
            Ok(())
        }),
        check("rewrite witnesses (k = 1)", || {
            for a in all_functions(1) {
                for b in all_functions(1) {
                    match equivalence_witness(&a, &b) {
                        Ok(t) => verify_trace(&t, &b).map_err(|e| format!("{a:?} -> {b:?}: {e}"))?,
                        Err(_) if a.euler() != b.euler() => {}
                        Err(e) => return Err(format!("{a:?} -> {b:?}: {e}")),
                    }
                }
            }
            Ok(())
        }),
        check("compiled probability equals oracle (k <= 2)", || {
            for k in 1..=2 {
                let db = TidDatabase::full(k, 2, &Rational::new(1.into(), 3.into())).expect("valid database");
                for phi in all_functions(k).filter(|f| f.euler() == 0) {
                    let c = compile_query(&phi, &db).map_err(|e| e.to_string())?;
                    if !c.check_decomposable()
                        || !c.check_deterministic(DeterminismMode::Semantic).map_err(|e| e.to_string())?
                    {
                        return Err(format!("{phi:?}: not a d-D"));
                    }
                    let (p, o) = (
                        c.probability(&db).map_err(|e| e.to_string())?,
                        oracle_pqe(&phi, &db).map_err(|e| e.to_string())?,
                    );
                    if p != o {
                        return Err(format!("{phi:?}: circuit {p} vs oracle {o}"));
                    }
                }
            }
            Ok(())
        }),
        check("no perfect matching function", || {
            let phi = phi_no_pm();
            if phi.euler() != 0 {
                return Err(format!("euler {}", phi.euler()));
            }
            for side in [Side::Colored, Side::Uncolored] {
                if induced_perfect_matching(&phi, side).is_some() {
                    return Err(format!("{side:?} side has a perfect matching"));
                }
            }
            let fr = fragment(&phi).map_err(|e| e.to_string())?;
            if !fr.is_valid_for(&phi).map_err(|e| e.to_string())? {
                return Err("invalid fragmentation".into());
            }
            Ok(())
        }),
    ]
}

fn phi9_golden() -> Result<(), String> {
    let v = |vars: &[usize]| Valuation::from_vars(vars.iter().copied());
    let expected = [
        (v(&[]), 1),
        (v(&[0, 3]), -1),
        (v(&[1, 3]), -1),
        (v(&[2, 3]), -1),
        (v(&[0, 1, 2]), -1),
        (v(&[0, 1, 3]), 1),
        (v(&[0, 2, 3]), 1),
        (v(&[1, 2, 3]), 1),
        (v(&[0, 1, 2, 3]), 0),
    ];
    let phi = phi9();
    let lattice = cnf_lattice(&phi).map_err(|e| e.to_string())?;
    if lattice.len() != expected.len() {
        return Err(format!("{} lattice elements", lattice.len()));
    }
    for (x, m) in expected {
        if lattice.mobius_to_top(x) != Some(m) {
            return Err(format!("mu({x}) = {:?}, expected {m}", lattice.mobius_to_top(x)));
        }
    }
    if phi.euler() != 0 || lattice.mobius_hat() != 0 {
        return Err("euler or mobius of the bottom is not 0".into());
    }
    Ok(())
}
