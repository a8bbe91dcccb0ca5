//! Independent oracles and helpers shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use gvpa::hml::Model;
use gvpa::sos::step_state;
use gvpa::{
    parse_spec, CommRule, ExplorationConfig, Expr, Formula, GvState, HmlFormula, Lts, MultiSet,
    RecursiveSpec, SemMultiAction, TransitionLabel, Valuation, ValueId, VarId,
};
use rand::Rng;

pub fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Compares `actual` with a golden file. With `GVPA_UPDATE_GOLDEN=1` the
/// file is rewritten instead.
pub fn check_golden(name: &str, actual: &str) -> Result<(), String> {
    let path = golden_dir().join(name);
    if std::env::var("GVPA_UPDATE_GOLDEN").as_deref() == Ok("1") {
        std::fs::write(&path, actual).map_err(|e| format!("{}: {e}", path.display()))?;
        return Ok(());
    }
    let expected =
        std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected == actual {
        Ok(())
    } else {
        Err(format!("{name} differs from golden file:\n{actual}"))
    }
}

/// Spec, root and initial valuation of a model file under `models/`.
pub fn load_model(name: &str) -> (RecursiveSpec, Expr, Valuation) {
    let path = repo_root().join("models").join(name);
    let text = std::fs::read_to_string(&path).unwrap();
    let (spec, init) = parse_spec(&text).unwrap();
    let init = init.expect("model has an init line");
    (spec, init.root, init.initial)
}

/// Greatest fixpoint of the bisimulation transfer condition, starting from
/// the pairs allowed by `compatible`. Quadratic per round.
pub fn naive_bisim<S, L>(lts: &Lts<S, L>, compatible: impl Fn(usize, usize) -> bool) -> Vec<Vec<bool>> {
    let n = lts.num_states();
    let mut rel: Vec<Vec<bool>> = (0..n)
        .map(|s| (0..n).map(|t| compatible(s, t)).collect())
        .collect();
    let matched = |rel: &Vec<Vec<bool>>, s: usize, t: usize| {
        lts.successors(s).iter().all(|&(l, s2)| {
            lts.successors(t)
                .iter()
                .any(|&(m, t2)| m == l && rel[s2][t2])
        })
    };
    loop {
        let mut changed = false;
        for s in 0..n {
            for t in 0..n {
                if rel[s][t] && !(matched(&rel, s, t) && matched(&rel, t, s)) {
                    rel[s][t] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            return rel;
        }
    }
}

/// The stateless relation on `exprs` by its pairwise definition: for every
/// valuation, each step of one side is matched by an equally labelled step
/// of the other reaching the same valuation and a related expression.
pub fn naive_stateless(
    spec: &RecursiveSpec,
    exprs: &[Expr],
    valuations: &[Valuation],
    cfg: &ExplorationConfig,
) -> Vec<Vec<bool>> {
    let idx = |e: &Expr| exprs.iter().position(|x| x == e).expect("closed set");
    // moves[e][j] = (label, target valuation, target expression index)
    let moves: Vec<Vec<Vec<(TransitionLabel, Valuation, usize)>>> = exprs
        .iter()
        .map(|e| {
            valuations
                .iter()
                .map(|v| {
                    step_state(spec, &GvState::new(e.clone(), v.clone()), cfg)
                        .unwrap()
                        .into_iter()
                        .map(|(l, st)| (l, st.valuation.clone(), idx(&st.expr)))
                        .collect()
                })
                .collect()
        })
        .collect();
    let n = exprs.len();
    let mut rel = vec![vec![true; n]; n];
    let matched = |rel: &Vec<Vec<bool>>, p: usize, q: usize| {
        (0..valuations.len()).all(|j| {
            moves[p][j].iter().all(|(l, v, p2)| {
                moves[q][j]
                    .iter()
                    .any(|(m, w, q2)| m == l && w == v && rel[*p2][*q2])
            })
        })
    };
    loop {
        let mut changed = false;
        for p in 0..n {
            for q in 0..n {
                if rel[p][q] && !(matched(&rel, p, q) && matched(&rel, q, p)) {
                    rel[p][q] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            return rel;
        }
    }
}

/// Every result of applying `rules` in any order until none matches.
pub fn brute_comm(rules: &[CommRule], m: &SemMultiAction) -> BTreeSet<SemMultiAction> {
    let mut out = BTreeSet::new();
    let mut applied = false;
    for rule in rules {
        for (first, _) in m.iter() {
            if &first.name != rule.lhs.first().unwrap() {
                continue;
            }
            let need: MultiSet<_> = rule
                .lhs
                .iter()
                .map(|n| gvpa::ActionLabel {
                    name: n.clone(),
                    args: first.args.clone(),
                })
                .collect();
            if need.is_subset(m) {
                applied = true;
                let mut next = m.sub(&need);
                next.insert(
                    gvpa::ActionLabel {
                        name: rule.rhs.clone(),
                        args: first.args.clone(),
                    },
                    1,
                );
                out.extend(brute_comm(rules, &next));
            }
        }
    }
    if !applied {
        out.insert(m.clone());
    }
    out
}

/// Direct recursive satisfaction, without memoization or state sets.
pub fn naive_sat<M: Model<Label = TransitionLabel>>(m: &M, s: usize, f: &HmlFormula) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Check(v, d) => m.check(s, *v, *d).expect("states carry valuations"),
        Formula::Not(g) => !naive_sat(m, s, g),
        Formula::And(l, r) => naive_sat(m, s, l) && naive_sat(m, s, r),
        Formula::Or(l, r) => naive_sat(m, s, l) || naive_sat(m, s, r),
        Formula::Diamond(t, g) => m
            .successors(s)
            .iter()
            .any(|&(l, u)| t.contains(&m.labels()[l]) && naive_sat(m, u, g)),
        Formula::Box(t, g) => m
            .successors(s)
            .iter()
            .all(|&(l, u)| !t.contains(&m.labels()[l]) || naive_sat(m, u, g)),
        Formula::Set(v, d, g) => naive_sat(m, m.set(s, *v, *d).expect("grid model"), g),
    }
}

/// A random formula over the spec's labels with modal depth at most `depth`.
pub fn random_formula<R: Rng>(rng: &mut R, spec: &RecursiveSpec, depth: usize, sets: bool) -> HmlFormula {
    let labels = spec.all_labels();
    let var = |rng: &mut R| VarId(rng.gen_range(0..spec.variables.len()) as u32);
    let val = |rng: &mut R| ValueId(rng.gen_range(0..spec.domain.len()) as u32);
    let top = if depth == 0 { 3 } else { 9 };
    match rng.gen_range(0..top) {
        0 => Formula::True,
        1 => Formula::False,
        2 => Formula::Check(var(rng), val(rng)),
        3 => Formula::not(random_formula(rng, spec, depth, sets)),
        4 => Formula::and(
            random_formula(rng, spec, depth - 1, sets),
            random_formula(rng, spec, depth - 1, sets),
        ),
        5 => Formula::or(
            random_formula(rng, spec, depth - 1, sets),
            random_formula(rng, spec, depth - 1, sets),
        ),
        6 | 7 => {
            let mut t: BTreeSet<TransitionLabel> = labels
                .iter()
                .copied()
                .filter(|_| rng.gen_bool(0.4))
                .collect();
            if t.is_empty() {
                t.insert(labels[rng.gen_range(0..labels.len())]);
            }
            let g = random_formula(rng, spec, depth - 1, sets);
            if rng.gen_bool(0.5) {
                Formula::Diamond(t, Box::new(g))
            } else {
                Formula::Box(t, Box::new(g))
            }
        }
        _ if sets => Formula::set(var(rng), val(rng), random_formula(rng, spec, depth - 1, sets)),
        _ => Formula::Check(var(rng), val(rng)),
    }
}

/// Deterministic formulas of the requested fragment up to modal depth
/// `depth`. Pure HML drops the check atoms; `sets` additionally wraps every
/// formula in each single assignment.
pub fn enumerate_fragment(
    spec: &RecursiveSpec,
    depth: usize,
    checks: bool,
    sets: bool,
    cap: usize,
) -> Vec<HmlFormula> {
    let labels = spec.all_labels();
    let base = if checks {
        gvpa::hml::enumerate_check_formulas(spec, &labels, depth, cap)
    } else {
        let mut plain = spec.clone();
        plain.variables.clear();
        // Assign labels keep their ids; only the check atoms disappear.
        gvpa::hml::enumerate_check_formulas(&plain, &labels, depth, cap)
    };
    if !sets {
        return base;
    }
    let mut out = base.clone();
    for f in &base {
        for v in spec.var_ids() {
            for d in spec.domain.ids() {
                out.push(Formula::set(v, d, f.clone()));
            }
        }
    }
    out
}
