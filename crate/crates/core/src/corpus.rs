//! Random specifications for property tests, acceptance runs and benchmarks.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::sos::{reachable_exprs, ExplorationConfig};
use crate::syntax::{
    ActionId, CommFunction, DomainDef, Expr, ProcId, ProcessExpr, RecursiveSpec, TransitionLabel,
    Valuation, ValueId, VarId,
};

#[derive(Debug, Clone, Copy)]
pub struct CorpusParams {
    pub max_names: usize,
    pub max_vars: usize,
    pub max_domain: usize,
    pub max_actions: usize,
    pub max_depth: usize,
    /// Upper bound on the reachable-expression closure of generated roots.
    pub max_closure: usize,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams {
            max_names: 3,
            max_vars: 2,
            max_domain: 3,
            max_actions: 3,
            max_depth: 3,
            max_closure: 50,
        }
    }
}

/// A spec with two root expressions to compare and a valuation.
#[derive(Debug, Clone)]
pub struct GuardedCase {
    pub spec: RecursiveSpec,
    pub p: Expr,
    pub q: Expr,
    pub valuation: Valuation,
}

/// A parallel-sequential root `∂_B(P)` (or plain `P`) with a valuation.
#[derive(Debug, Clone)]
pub struct ParSeqCase {
    pub spec: RecursiveSpec,
    pub root: Expr,
    pub valuation: Valuation,
}

const VALUE_NAMES: [&str; 4] = ["0", "1", "2", "3"];
const VAR_NAMES: [&str; 3] = ["v", "w", "x"];
const ACTION_NAMES: [&str; 4] = ["a", "b", "c", "e"];
const PROC_NAMES: [&str; 3] = ["X", "Y", "Z"];

fn signature<R: Rng>(rng: &mut R, params: &CorpusParams, vars: usize) -> RecursiveSpec {
    let domain = rng.gen_range(1..=params.max_domain.clamp(1, VALUE_NAMES.len()));
    let actions = rng.gen_range(1..=params.max_actions.clamp(1, ACTION_NAMES.len()));
    let names = rng.gen_range(1..=params.max_names.clamp(1, PROC_NAMES.len()));
    let mut comm = CommFunction::new();
    if actions >= 3 && rng.gen_bool(0.5) {
        // a|b -> c, with c never communicating further.
        comm.insert(ActionId(0), ActionId(1), ActionId(2));
    }
    RecursiveSpec {
        domain: DomainDef::new(VALUE_NAMES[..domain].iter().map(|s| s.to_string()).collect())
            .expect("distinct names"),
        variables: VAR_NAMES[..vars].iter().map(|s| s.to_string()).collect(),
        actions: ACTION_NAMES[..actions].iter().map(|s| s.to_string()).collect(),
        processes: PROC_NAMES[..names].iter().map(|s| s.to_string()).collect(),
        equations: vec![ProcessExpr::delta(); names],
        comm,
    }
}

fn pick_label<R: Rng>(rng: &mut R, spec: &RecursiveSpec) -> TransitionLabel {
    if rng.gen_bool(0.3) {
        TransitionLabel::Assign(pick_var(rng, spec), pick_value(rng, spec))
    } else {
        TransitionLabel::Action(ActionId(rng.gen_range(0..spec.actions.len()) as u32))
    }
}

fn pick_var<R: Rng>(rng: &mut R, spec: &RecursiveSpec) -> VarId {
    VarId(rng.gen_range(0..spec.variables.len()) as u32)
}

fn pick_value<R: Rng>(rng: &mut R, spec: &RecursiveSpec) -> ValueId {
    ValueId(rng.gen_range(0..spec.domain.len()) as u32)
}

fn pick_name<R: Rng>(rng: &mut R, spec: &RecursiveSpec) -> Expr {
    ProcessExpr::name(ProcId(rng.gen_range(0..spec.processes.len()) as u32))
}

/// Any expression of the full grammar; names only below a prefix unless
/// `guarded` is already true.
fn any_expr<R: Rng>(rng: &mut R, spec: &RecursiveSpec, depth: usize, guarded: bool) -> Expr {
    if depth == 0 {
        return match rng.gen_range(0..3) {
            0 => ProcessExpr::delta(),
            1 if guarded => pick_name(rng, spec),
            _ => ProcessExpr::prefix(pick_label(rng, spec), ProcessExpr::delta()),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..20) {
        0..=6 => ProcessExpr::prefix(pick_label(rng, spec), any_expr(rng, spec, d, true)),
        7..=10 => ProcessExpr::choice(any_expr(rng, spec, d, guarded), any_expr(rng, spec, d, guarded)),
        11..=13 => ProcessExpr::cond(pick_var(rng, spec), pick_value(rng, spec), any_expr(rng, spec, d, guarded)),
        14..=15 => ProcessExpr::par(any_expr(rng, spec, d, guarded), any_expr(rng, spec, d, guarded)),
        16 => {
            let blocked: BTreeSet<ActionId> = (0..spec.actions.len() as u32)
                .map(ActionId)
                .filter(|_| rng.gen_bool(0.4))
                .collect();
            ProcessExpr::encap(blocked, any_expr(rng, spec, d, guarded))
        }
        17 => ProcessExpr::delta(),
        _ if guarded => pick_name(rng, spec),
        _ => ProcessExpr::prefix(pick_label(rng, spec), any_expr(rng, spec, d, true)),
    }
}

/// A second root that is often equivalent to `p` in some sense, so that
/// the corpus has both related and unrelated pairs.
fn companion<R: Rng>(rng: &mut R, spec: &RecursiveSpec, p: &Expr, depth: usize) -> Expr {
    match rng.gen_range(0..8) {
        0 => ProcessExpr::choice(p.clone(), p.clone()),
        1 => ProcessExpr::choice(p.clone(), ProcessExpr::delta()),
        2 => match &**p {
            ProcessExpr::Choice(l, r) => ProcessExpr::choice(r.clone(), l.clone()),
            ProcessExpr::Parallel(l, r) => ProcessExpr::par(r.clone(), l.clone()),
            _ => p.clone(),
        },
        3 => ProcessExpr::cond(pick_var(rng, spec), pick_value(rng, spec), p.clone()),
        4 => match &**p {
            ProcessExpr::Name(x) => spec.equation(*x).clone(),
            _ => pick_name(rng, spec),
        },
        _ => any_expr(rng, spec, depth, true),
    }
}

/// A random guarded spec with two roots whose joint closure stays within
/// `params.max_closure`.
pub fn random_guarded_case<R: Rng>(rng: &mut R, params: &CorpusParams) -> GuardedCase {
    let cfg = ExplorationConfig {
        max_states: params.max_closure,
        ..ExplorationConfig::default()
    };
    loop {
        let vars = rng.gen_range(1..=params.max_vars.clamp(1, VAR_NAMES.len()));
        let mut spec = signature(rng, params, vars);
        for i in 0..spec.processes.len() {
            spec.equations[i] = any_expr(rng, &spec, params.max_depth, false);
        }
        let p = if rng.gen_bool(0.3) {
            pick_name(rng, &spec)
        } else {
            any_expr(rng, &spec, params.max_depth, true)
        };
        let q = companion(rng, &spec, &p, params.max_depth);
        if reachable_exprs(&spec, &[p.clone(), q.clone()], &cfg).is_err() {
            continue;
        }
        let valuation = random_valuation(rng, &spec);
        return GuardedCase { spec, p, q, valuation };
    }
}

pub fn random_valuation<R: Rng>(rng: &mut R, spec: &RecursiveSpec) -> Valuation {
    Valuation::new((0..spec.variables.len()).map(|_| pick_value(rng, spec)).collect())
}

/// Sequential expressions where conditions guard prefixes directly, so χ
/// maps distinct reachable expressions to distinct terms.
fn seq_expr<R: Rng>(rng: &mut R, spec: &RecursiveSpec, depth: usize) -> Expr {
    let prefix = |rng: &mut R, depth: usize| {
        let l = pick_label(rng, spec);
        let body = if depth == 0 || rng.gen_bool(0.45) {
            if rng.gen_bool(0.75) {
                pick_name(rng, spec)
            } else {
                ProcessExpr::delta()
            }
        } else {
            seq_expr(rng, spec, depth - 1)
        };
        ProcessExpr::prefix(l, body)
    };
    if depth == 0 {
        return prefix(rng, 0);
    }
    match rng.gen_range(0..10) {
        0..=3 => prefix(rng, depth),
        4..=6 => ProcessExpr::choice(seq_expr(rng, spec, depth - 1), seq_expr(rng, spec, depth - 1)),
        7..=8 => {
            let body = prefix(rng, depth - 1);
            ProcessExpr::cond(pick_var(rng, spec), pick_value(rng, spec), body)
        }
        _ => ProcessExpr::delta(),
    }
}

/// A random spec accepted by the translation, with `vars` variables and a
/// reachable state space of at most `max_states`.
pub fn random_parseq_case<R: Rng>(
    rng: &mut R,
    params: &CorpusParams,
    vars: usize,
    max_states: usize,
) -> ParSeqCase {
    let cfg = ExplorationConfig {
        max_states,
        ..ExplorationConfig::default()
    };
    loop {
        let mut spec = signature(rng, params, vars.clamp(1, VAR_NAMES.len()));
        for i in 0..spec.processes.len() {
            spec.equations[i] = seq_expr(rng, &spec, params.max_depth.min(2));
        }
        let width = rng.gen_range(1..=3);
        let mut parts: Vec<Expr> = (0..width)
            .map(|_| {
                if rng.gen_bool(0.6) {
                    pick_name(rng, &spec)
                } else {
                    seq_expr(rng, &spec, 1)
                }
            })
            .collect();
        parts.shuffle(rng);
        let body = parts
            .into_iter()
            .reduce(ProcessExpr::par)
            .expect("at least one component");
        let root = if !spec.comm.is_empty() && rng.gen_bool(0.6) {
            ProcessExpr::encap([ActionId(0), ActionId(1)].into_iter().collect(), body)
        } else if rng.gen_bool(0.2) {
            let blocked = (0..spec.actions.len() as u32)
                .map(ActionId)
                .filter(|_| rng.gen_bool(0.3))
                .collect();
            ProcessExpr::encap(blocked, body)
        } else {
            body
        };
        let valuation = random_valuation(rng, &spec);
        let start = crate::sos::GvState::new(root.clone(), valuation.clone());
        if crate::sos::generate_lts_from(&spec, &[start], &cfg).is_err() {
            continue;
        }
        return ParSeqCase {
            spec,
            root,
            valuation,
        };
    }
}

#[cfg(test)]
mod tests {
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    use super::*;
    use crate::syntax::validate_guardedness;
    use crate::translator::{validate_parseq, VariableMode};

    #[test]
    fn guarded_cases_are_guarded_and_small() {
        let mut rng = StdRng::seed_from_u64(7);
        let params = CorpusParams::default();
        for _ in 0..50 {
            let c = random_guarded_case(&mut rng, &params);
            assert!(validate_guardedness(&c.spec).is_ok(), "{}", c.spec.to_source(None));
            let closure =
                reachable_exprs(&c.spec, &[c.p.clone(), c.q.clone()], &ExplorationConfig::default())
                    .unwrap();
            assert!(closure.len() <= params.max_closure);
        }
    }

    #[test]
    fn parseq_cases_translate() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..50 {
            let c = random_parseq_case(&mut rng, &CorpusParams::default(), 1, 200);
            validate_parseq(&c.spec, &c.root, VariableMode::Single).unwrap();
        }
    }
}
