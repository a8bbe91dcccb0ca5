//! Operational semantics of the global-variable algebra.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, ResourceError, Result};
use crate::lts::{explore, Lts};
use crate::syntax::{
    Expr, InitSpec, ProcessExpr, RecursiveSpec, TransitionLabel, Valuation, DEFAULT_MAX_VALUATIONS,
};

/// A state `⟨P, V⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GvState {
    pub expr: Expr,
    pub valuation: Valuation,
}

impl GvState {
    pub fn new(expr: Expr, valuation: Valuation) -> Self {
        GvState { expr, valuation }
    }

    pub fn show(&self, spec: &RecursiveSpec) -> String {
        format!(
            "<{}, {}>",
            spec.show_expr(&self.expr),
            spec.show_valuation(&self.valuation)
        )
    }
}

impl fmt::Display for GvState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExplorationConfig {
    pub max_states: usize,
    pub max_depth: Option<usize>,
    pub max_valuations: usize,
    /// Name unfoldings allowed inside a single step derivation.
    pub max_unfold: usize,
}

impl Default for ExplorationConfig {
    fn default() -> Self {
        ExplorationConfig {
            max_states: 100_000,
            max_depth: None,
            max_valuations: DEFAULT_MAX_VALUATIONS,
            max_unfold: 256,
        }
    }
}

pub type GvLts = Lts<GvState, TransitionLabel>;

/// One transition out of `⟨expr, valuation⟩`: label, target expression and
/// target valuation. The result is sorted and free of duplicates.
pub fn step(
    spec: &RecursiveSpec,
    expr: &Expr,
    valuation: &Valuation,
    cfg: &ExplorationConfig,
) -> Result<Vec<(TransitionLabel, Expr, Valuation)>> {
    let mut out = Vec::new();
    derive(spec, expr, valuation, cfg.max_unfold, 0, &mut out)?;
    out.sort();
    out.dedup();
    Ok(out)
}

pub fn step_state(
    spec: &RecursiveSpec,
    s: &GvState,
    cfg: &ExplorationConfig,
) -> Result<Vec<(TransitionLabel, GvState)>> {
    Ok(step(spec, &s.expr, &s.valuation, cfg)?
        .into_iter()
        .map(|(l, e, v)| (l, GvState::new(e, v)))
        .collect())
}

fn derive(
    spec: &RecursiveSpec,
    e: &Expr,
    v: &Valuation,
    max_unfold: usize,
    unfolds: usize,
    out: &mut Vec<(TransitionLabel, Expr, Valuation)>,
) -> Result<()> {
    match &**e {
        ProcessExpr::Deadlock => {}
        ProcessExpr::Prefix(l, body) => {
            let target = match *l {
                TransitionLabel::Action(_) => v.clone(),
                TransitionLabel::Assign(x, d) => v.with(x, d),
            };
            out.push((*l, body.clone(), target));
        }
        ProcessExpr::Cond(x, d, body) => {
            if v.get(*x) == *d {
                derive(spec, body, v, max_unfold, unfolds, out)?;
            }
        }
        ProcessExpr::Name(x) => {
            if unfolds >= max_unfold {
                return Err(ResourceError::Unfold { limit: max_unfold }.into());
            }
            let body = spec
                .equations
                .get(x.index())
                .ok_or_else(|| Error::Semantic(format!("undefined process proc#{}", x.0)))?;
            derive(spec, body, v, max_unfold, unfolds + 1, out)?;
        }
        ProcessExpr::Choice(l, r) => {
            derive(spec, l, v, max_unfold, unfolds, out)?;
            derive(spec, r, v, max_unfold, unfolds, out)?;
        }
        ProcessExpr::Parallel(l, r) => {
            let mut left = Vec::new();
            let mut right = Vec::new();
            derive(spec, l, v, max_unfold, unfolds, &mut left)?;
            derive(spec, r, v, max_unfold, unfolds, &mut right)?;
            for (lab, l2, v2) in &left {
                out.push((*lab, ProcessExpr::par(l2.clone(), r.clone()), v2.clone()));
            }
            for (lab, r2, v2) in &right {
                out.push((*lab, ProcessExpr::par(l.clone(), r2.clone()), v2.clone()));
            }
            // Synchronisation only on actions, which leave V untouched.
            for (la, l2, _) in &left {
                let TransitionLabel::Action(a) = *la else { continue };
                for (lb, r2, _) in &right {
                    let TransitionLabel::Action(b) = *lb else { continue };
                    if let Some(c) = spec.comm.lookup(a, b) {
                        out.push((
                            TransitionLabel::Action(c),
                            ProcessExpr::par(l2.clone(), r2.clone()),
                            v.clone(),
                        ));
                    }
                }
            }
        }
        ProcessExpr::Encap(blocked, body) => {
            let mut inner = Vec::new();
            derive(spec, body, v, max_unfold, unfolds, &mut inner)?;
            for (lab, b2, v2) in inner {
                if let TransitionLabel::Action(a) = lab {
                    if blocked.contains(&a) {
                        continue;
                    }
                }
                out.push((lab, std::sync::Arc::new(ProcessExpr::Encap(blocked.clone(), b2)), v2));
            }
        }
    }
    Ok(())
}

pub fn generate_lts(spec: &RecursiveSpec, init: &InitSpec, cfg: &ExplorationConfig) -> Result<GvLts> {
    let root = GvState::new(init.root.clone(), init.initial.clone());
    Ok(generate_lts_from(spec, &[root], cfg)?.0)
}

/// Joint exploration from several roots; see [`explore`] for numbering.
pub fn generate_lts_from(
    spec: &RecursiveSpec,
    roots: &[GvState],
    cfg: &ExplorationConfig,
) -> Result<(GvLts, Vec<usize>)> {
    explore(roots, cfg.max_states, cfg.max_depth, |s| step_state(spec, s, cfg))
}

/// Expressions reachable from `roots` when every step may start from any
/// valuation. Returned in discovery order, roots first.
pub fn reachable_exprs(
    spec: &RecursiveSpec,
    roots: &[Expr],
    cfg: &ExplorationConfig,
) -> Result<Vec<Expr>> {
    let valuations = spec.enumerate_valuations(cfg.max_valuations)?;
    let mut seen: HashSet<Expr> = HashSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    for r in roots {
        if seen.insert(r.clone()) {
            order.push(r.clone());
            queue.push_back(r.clone());
        }
    }
    while let Some(e) = queue.pop_front() {
        for v in &valuations {
            for (_, e2, _) in step(spec, &e, v, cfg)? {
                if seen.insert(e2.clone()) {
                    if order.len() >= cfg.max_states {
                        return Err(ResourceError::Expressions {
                            limit: cfg.max_states,
                        }
                        .into());
                    }
                    order.push(e2.clone());
                    queue.push_back(e2);
                }
            }
        }
    }
    Ok(order)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImageFiniteness {
    /// Closure computed; carries its size.
    Finite(usize),
    BoundExceeded(ResourceError),
}

/// Successor sets are computed sets here, so image-finiteness reduces to the
/// reachable-expression closure terminating within the configured caps.
pub fn check_image_finite(
    spec: &RecursiveSpec,
    root: &Expr,
    cfg: &ExplorationConfig,
) -> Result<ImageFiniteness> {
    match reachable_exprs(spec, std::slice::from_ref(root), cfg) {
        Ok(exprs) => Ok(ImageFiniteness::Finite(exprs.len())),
        Err(Error::Resource(r)) => Ok(ImageFiniteness::BoundExceeded(r)),
        Err(e) => Err(e),
    }
}

/// Aldebaran export with labels rendered as in the spec syntax.
pub fn lts_to_aut(spec: &RecursiveSpec, lts: &GvLts) -> String {
    lts.to_aut(|l| spec.show_label(l))
}

pub fn lts_to_dot(spec: &RecursiveSpec, lts: &GvLts) -> String {
    lts.to_dot(|s| s.show(spec), |l| spec.show_label(l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_expr, parse_spec, parse_spec_with, ActionId, ParseOptions, ValueId, VarId};

    const TRAFFIC: &str = "
        domain { green, red }
        vars { t }
        acts { drive, brake }
        proc CAR = (t = green) -> drive.delta + (t = red) -> brake.(t = green) -> drive.delta
        proc TLC = (t = green) -> assign(t, red).TLC + (t = red) -> assign(t, green).TLC
        init CAR || TLC with { t = green }
    ";

    #[test]
    fn traffic_light_has_six_states_nine_transitions() {
        let (spec, init) = parse_spec(TRAFFIC).unwrap();
        let lts = generate_lts(&spec, &init.unwrap(), &ExplorationConfig::default()).unwrap();
        assert_eq!(lts.num_states(), 6);
        assert_eq!(lts.num_transitions(), 9);
        assert!(lts_to_aut(&spec, &lts).starts_with("des (0,9,6)\n"));
    }

    #[test]
    fn initial_traffic_steps() {
        let (spec, init) = parse_spec(TRAFFIC).unwrap();
        let init = init.unwrap();
        let steps = step(&spec, &init.root, &init.initial, &ExplorationConfig::default()).unwrap();
        let shown: Vec<String> = steps
            .iter()
            .map(|(l, e, v)| format!("{} {} {}", spec.show_label(l), spec.show_expr(e), spec.show_valuation(v)))
            .collect();
        assert_eq!(
            shown,
            vec![
                "drive delta || TLC { t = green }",
                "assign(t,red) CAR || TLC { t = red }",
            ]
        );
    }

    #[test]
    fn cond_gates_and_assign_updates() {
        let (spec, _) =
            parse_spec("domain { 0, 1 } vars { v } acts { a } proc X = a.X").unwrap();
        let e = parse_expr(&spec, "(v = 0) -> a.delta || assign(v, 1).delta").unwrap();
        let v0 = Valuation::new(vec![ValueId(0)]);
        let steps = step(&spec, &e, &v0, &ExplorationConfig::default()).unwrap();
        assert_eq!(steps.len(), 2);
        assert_eq!(steps[0].0, TransitionLabel::Action(ActionId(0)));
        assert_eq!(steps[0].2, v0);
        assert_eq!(steps[1].0, TransitionLabel::Assign(VarId(0), ValueId(1)));
        assert_eq!(steps[1].2, v0.with(VarId(0), ValueId(1)));
        let v1 = v0.with(VarId(0), ValueId(1));
        assert_eq!(step(&spec, &e, &v1, &ExplorationConfig::default()).unwrap().len(), 1);
    }

    #[test]
    fn communication_and_encapsulation() {
        let (spec, _) = parse_spec(
            "domain { 0 } acts { a, b, c } comm { a|b -> c } proc X = a.delta",
        )
        .unwrap();
        let e = parse_expr(&spec, "encap({a, b}) (a.delta || b.delta)").unwrap();
        let v = Valuation::new(vec![]);
        let steps = step(&spec, &e, &v, &ExplorationConfig::default()).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].0, TransitionLabel::Action(ActionId(2)));
    }

    #[test]
    fn deadlock_has_no_steps() {
        let (spec, _) = parse_spec("domain { 0 } acts { a } init delta").unwrap();
        let init = InitSpec {
            root: ProcessExpr::delta(),
            initial: Valuation::new(vec![]),
        };
        let lts = generate_lts(&spec, &init, &ExplorationConfig::default()).unwrap();
        assert_eq!(lts_to_aut(&spec, &lts), "des (0,0,1)\n");
    }

    #[test]
    fn reachable_exprs_of_car() {
        let (spec, _) = parse_spec(TRAFFIC).unwrap();
        let car = parse_expr(&spec, "CAR").unwrap();
        let exprs = reachable_exprs(&spec, &[car], &ExplorationConfig::default()).unwrap();
        let shown: Vec<String> = exprs.iter().map(|e| spec.show_expr(e)).collect();
        assert_eq!(shown, vec!["CAR", "delta", "(t = green) -> drive.delta"]);
    }

    #[test]
    fn unguarded_recursion_exceeds_bounds() {
        let (spec, _) = parse_spec_with(
            "domain { 0 } acts { a } proc A = a.delta || A",
            ParseOptions {
                check_guardedness: false,
            },
        )
        .unwrap();
        let a = parse_expr(&spec, "A").unwrap();
        let cfg = ExplorationConfig {
            max_states: 100,
            ..Default::default()
        };
        match check_image_finite(&spec, &a, &cfg).unwrap() {
            ImageFiniteness::BoundExceeded(_) => {}
            other => panic!("unexpected {other:?}"),
        }
        let init = InitSpec {
            root: a,
            initial: Valuation::new(vec![]),
        };
        assert!(generate_lts(&spec, &init, &cfg).unwrap_err().is_resource());
    }
}
