use crate::error::{Error, ResourceError, Result};
use crate::lts::{explore, Lts};
use crate::sos::ExplorationConfig;

use super::{
    allowed, apply_comm, apply_hide, sem_multiaction, DataValue, Mcrl2Process, Mcrl2Spec,
    MultiAction, Proc, SemMultiAction,
};

pub type Mcrl2Lts = Lts<Proc, SemMultiAction>;

/// Outgoing transitions of `p`, sorted and free of duplicates.
pub fn step_mcrl2(
    spec: &Mcrl2Spec,
    p: &Proc,
    cfg: &ExplorationConfig,
) -> Result<Vec<(SemMultiAction, Proc)>> {
    let mut out = Vec::new();
    derive(spec, p, cfg.max_unfold, 0, &mut out)?;
    out.sort();
    out.dedup();
    Ok(out)
}

fn check_arity(spec: &Mcrl2Spec, alpha: &MultiAction) -> Result<()> {
    match alpha {
        MultiAction::Tau => Ok(()),
        MultiAction::Act(a, args) => match spec.arity(a) {
            Some(n) if n == args.len() => Ok(()),
            Some(n) => Err(Error::Semantic(format!(
                "action `{a}` takes {n} parameters, got {}",
                args.len()
            ))),
            None => Err(Error::Semantic(format!("undeclared action `{a}`"))),
        },
        MultiAction::Bar(l, r) => {
            check_arity(spec, l)?;
            check_arity(spec, r)
        }
    }
}

fn derive(
    spec: &Mcrl2Spec,
    p: &Proc,
    max_unfold: usize,
    unfolds: usize,
    out: &mut Vec<(SemMultiAction, Proc)>,
) -> Result<()> {
    match &**p {
        Mcrl2Process::Deadlock => {}
        Mcrl2Process::Prefix(alpha, body) => {
            check_arity(spec, alpha)?;
            out.push((sem_multiaction(alpha)?, body.clone()));
        }
        Mcrl2Process::Choice(l, r) => {
            derive(spec, l, max_unfold, unfolds, out)?;
            derive(spec, r, max_unfold, unfolds, out)?;
        }
        Mcrl2Process::Par(l, r) => {
            let mut left = Vec::new();
            let mut right = Vec::new();
            derive(spec, l, max_unfold, unfolds, &mut left)?;
            derive(spec, r, max_unfold, unfolds, &mut right)?;
            for (a, l2) in &left {
                out.push((a.clone(), Mcrl2Process::par(l2.clone(), r.clone())));
            }
            for (b, r2) in &right {
                out.push((b.clone(), Mcrl2Process::par(l.clone(), r2.clone())));
            }
            for (a, l2) in &left {
                for (b, r2) in &right {
                    out.push((a.add(b), Mcrl2Process::par(l2.clone(), r2.clone())));
                }
            }
        }
        Mcrl2Process::Allow(m, body) => {
            let mut inner = Vec::new();
            derive(spec, body, max_unfold, unfolds, &mut inner)?;
            for (a, b2) in inner {
                if allowed(m, &a) {
                    out.push((a, std::sync::Arc::new(Mcrl2Process::Allow(m.clone(), b2))));
                }
            }
        }
        Mcrl2Process::Hide(i, body) => {
            let mut inner = Vec::new();
            derive(spec, body, max_unfold, unfolds, &mut inner)?;
            for (a, b2) in inner {
                out.push((
                    apply_hide(i, &a),
                    std::sync::Arc::new(Mcrl2Process::Hide(i.clone(), b2)),
                ));
            }
        }
        Mcrl2Process::Comm(c, body) => {
            let mut inner = Vec::new();
            derive(spec, body, max_unfold, unfolds, &mut inner)?;
            for (a, b2) in inner {
                out.push((
                    apply_comm(c, &a),
                    std::sync::Arc::new(Mcrl2Process::Comm(c.clone(), b2)),
                ));
            }
        }
        Mcrl2Process::Call(x, args) => {
            if unfolds >= max_unfold {
                return Err(ResourceError::Unfold { limit: max_unfold }.into());
            }
            let eq = spec
                .equation(x)
                .ok_or_else(|| Error::Semantic(format!("undefined process `{x}`")))?;
            if eq.params.len() != args.len() {
                return Err(Error::Semantic(format!(
                    "`{x}` takes {} parameters, got {}",
                    eq.params.len(),
                    args.len()
                )));
            }
            let mut body = eq.body.clone();
            for (param, arg) in eq.params.iter().zip(args) {
                body = Mcrl2Process::subst(&body, param, arg.eval()?);
            }
            derive(spec, &body, max_unfold, unfolds + 1, out)?;
        }
        Mcrl2Process::Sum(x, body) => {
            for d in spec.domain_values() {
                let inst = Mcrl2Process::subst(body, x, DataValue::Elem(d));
                derive(spec, &inst, max_unfold, unfolds, out)?;
            }
        }
    }
    Ok(())
}

pub fn generate_lts_mcrl2(spec: &Mcrl2Spec, root: &Proc, cfg: &ExplorationConfig) -> Result<Mcrl2Lts> {
    Ok(generate_lts_mcrl2_from(spec, std::slice::from_ref(root), cfg)?.0)
}

/// Joint reachable LTS of several roots; also returns the root indices.
pub fn generate_lts_mcrl2_from(
    spec: &Mcrl2Spec,
    roots: &[Proc],
    cfg: &ExplorationConfig,
) -> Result<(Mcrl2Lts, Vec<usize>)> {
    explore(roots, cfg.max_states, cfg.max_depth, |p| step_mcrl2(spec, p, cfg))
}
