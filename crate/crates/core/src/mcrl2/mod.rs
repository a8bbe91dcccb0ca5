//! The mCRL2 fragment targeted by the translation: data-parametrised
//! multi-actions, allow/hide/comm, finite sums and parametrised recursion.

mod multiset;
pub mod render;
mod semantics;

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::syntax::{ValueId, VarId};

pub use multiset::MultiSet;
pub use semantics::{generate_lts_mcrl2, generate_lts_mcrl2_from, step_mcrl2, Mcrl2Lts};

/// A ground data value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DataValue {
    /// An element of the data domain.
    Elem(ValueId),
    Bool(bool),
    /// A global variable name used as data, as in `assign(t, red)`.
    Var(VarId),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DataExpr {
    Value(DataValue),
    /// A bound data variable of sort `D`.
    Bound(Arc<str>),
    Eq(Box<DataExpr>, Box<DataExpr>),
    /// Conjunction; the empty conjunction is `true`.
    And(Vec<DataExpr>),
}

impl DataExpr {
    pub fn bound(name: &str) -> Self {
        DataExpr::Bound(name.into())
    }

    pub fn elem(d: ValueId) -> Self {
        DataExpr::Value(DataValue::Elem(d))
    }

    pub fn eval(&self) -> Result<DataValue> {
        Ok(match self {
            DataExpr::Value(v) => *v,
            DataExpr::Bound(x) => {
                return Err(Error::Semantic(format!("unbound data variable `{x}`")))
            }
            DataExpr::Eq(a, b) => DataValue::Bool(a.eval()? == b.eval()?),
            DataExpr::And(cs) => {
                let mut all = true;
                for c in cs {
                    match c.eval()? {
                        DataValue::Bool(b) => all &= b,
                        other => {
                            return Err(Error::Semantic(format!(
                                "conjunct evaluates to non-Boolean {other:?}"
                            )))
                        }
                    }
                }
                DataValue::Bool(all)
            }
        })
    }

    fn subst(&self, x: &str, v: DataValue) -> DataExpr {
        match self {
            DataExpr::Bound(y) if &**y == x => DataExpr::Value(v),
            DataExpr::Value(_) | DataExpr::Bound(_) => self.clone(),
            DataExpr::Eq(a, b) => DataExpr::Eq(Box::new(a.subst(x, v)), Box::new(b.subst(x, v))),
            DataExpr::And(cs) => DataExpr::And(cs.iter().map(|c| c.subst(x, v)).collect()),
        }
    }
}

/// A ground action label `a(d1, …, dn)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionLabel {
    pub name: Arc<str>,
    pub args: Vec<DataValue>,
}

impl ActionLabel {
    pub fn new(name: &str, args: Vec<DataValue>) -> Self {
        ActionLabel {
            name: name.into(),
            args,
        }
    }
}

/// `⟦α⟧`, the multiset of ground labels a multi-action denotes.
pub type SemMultiAction = MultiSet<ActionLabel>;

/// The name projection of a semantic multi-action.
pub fn names(m: &SemMultiAction) -> MultiSet<Arc<str>> {
    m.map(|l| l.name.clone())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MultiAction {
    Tau,
    Act(Arc<str>, Vec<DataExpr>),
    Bar(Box<MultiAction>, Box<MultiAction>),
}

impl MultiAction {
    pub fn act(name: &str, args: Vec<DataExpr>) -> Self {
        MultiAction::Act(name.into(), args)
    }

    /// `α1 | … | αn`, or `τ` when empty.
    pub fn bar_all(parts: Vec<MultiAction>) -> Self {
        parts
            .into_iter()
            .reduce(|a, b| MultiAction::Bar(Box::new(a), Box::new(b)))
            .unwrap_or(MultiAction::Tau)
    }

    fn subst(&self, x: &str, v: DataValue) -> MultiAction {
        match self {
            MultiAction::Tau => MultiAction::Tau,
            MultiAction::Act(a, args) => {
                MultiAction::Act(a.clone(), args.iter().map(|e| e.subst(x, v)).collect())
            }
            MultiAction::Bar(l, r) => {
                MultiAction::Bar(Box::new(l.subst(x, v)), Box::new(r.subst(x, v)))
            }
        }
    }
}

/// `⟦α⟧` for a ground multi-action.
pub fn sem_multiaction(alpha: &MultiAction) -> Result<SemMultiAction> {
    Ok(match alpha {
        MultiAction::Tau => MultiSet::new(),
        MultiAction::Act(a, args) => MultiSet::singleton(ActionLabel {
            name: a.clone(),
            args: args.iter().map(DataExpr::eval).collect::<Result<_>>()?,
        }),
        MultiAction::Bar(l, r) => sem_multiaction(l)?.add(&sem_multiaction(r)?),
    })
}

/// A renaming `a | … | b -> c`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CommRule {
    pub lhs: Vec<Arc<str>>,
    pub rhs: Arc<str>,
}

impl CommRule {
    pub fn new(lhs: &[&str], rhs: &str) -> Self {
        CommRule {
            lhs: lhs.iter().map(|&s| s.into()).collect(),
            rhs: rhs.into(),
        }
    }
}

/// `Γ_C(m)`: rules are applied in order, each until it no longer matches.
/// A match needs one label per left-hand name, all with identical
/// parameters, and is replaced by the right-hand name with those parameters.
pub fn apply_comm(rules: &[CommRule], m: &SemMultiAction) -> SemMultiAction {
    let mut out = m.clone();
    for rule in rules {
        let need: MultiSet<Arc<str>> = rule.lhs.iter().cloned().collect();
        let Some(first) = rule.lhs.first() else { continue };
        loop {
            let args = out
                .iter()
                .filter(|(l, _)| l.name == *first)
                .map(|(l, _)| l.args.clone())
                .find(|args| {
                    need.iter().all(|(n, k)| {
                        out.count(&ActionLabel {
                            name: n.clone(),
                            args: args.clone(),
                        }) >= k
                    })
                });
            let Some(args) = args else { break };
            for (n, k) in need.iter() {
                out.remove(
                    &ActionLabel {
                        name: n.clone(),
                        args: args.clone(),
                    },
                    k,
                );
            }
            out.insert(
                ActionLabel {
                    name: rule.rhs.clone(),
                    args,
                },
                1,
            );
        }
    }
    out
}

/// `θ_I(m)`: drops every label whose name is in `hidden`.
pub fn apply_hide(hidden: &[Arc<str>], m: &SemMultiAction) -> SemMultiAction {
    m.filter(|l| !hidden.contains(&l.name))
}

/// The allow side condition. `τ` always passes.
pub fn allowed(allow: &[MultiSet<Arc<str>>], m: &SemMultiAction) -> bool {
    m.is_empty() || allow.contains(&names(m))
}

pub type Proc = Arc<Mcrl2Process>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mcrl2Process {
    Prefix(MultiAction, Proc),
    Deadlock,
    Choice(Proc, Proc),
    Par(Proc, Proc),
    Allow(Arc<Vec<MultiSet<Arc<str>>>>, Proc),
    Hide(Arc<Vec<Arc<str>>>, Proc),
    Comm(Arc<Vec<CommRule>>, Proc),
    Call(Arc<str>, Vec<DataExpr>),
    /// `Σ_{x:D} P`, always over the data domain.
    Sum(Arc<str>, Proc),
}

impl Mcrl2Process {
    pub fn prefix(a: MultiAction, p: Proc) -> Proc {
        Arc::new(Mcrl2Process::Prefix(a, p))
    }

    pub fn delta() -> Proc {
        Arc::new(Mcrl2Process::Deadlock)
    }

    pub fn choice(l: Proc, r: Proc) -> Proc {
        Arc::new(Mcrl2Process::Choice(l, r))
    }

    /// Right-nested choice; `δ` when empty.
    pub fn choice_all(parts: Vec<Proc>) -> Proc {
        parts
            .into_iter()
            .rev()
            .reduce(|acc, p| Self::choice(p, acc))
            .unwrap_or_else(Self::delta)
    }

    pub fn par(l: Proc, r: Proc) -> Proc {
        Arc::new(Mcrl2Process::Par(l, r))
    }

    pub fn call(name: &str, args: Vec<DataExpr>) -> Proc {
        Arc::new(Mcrl2Process::Call(name.into(), args))
    }

    pub fn sum(x: &str, body: Proc) -> Proc {
        Arc::new(Mcrl2Process::Sum(x.into(), body))
    }

    /// Capture-avoiding substitution of a ground value; inner binders of
    /// the same name shadow `x`.
    pub fn subst(p: &Proc, x: &str, v: DataValue) -> Proc {
        match &**p {
            Mcrl2Process::Deadlock => p.clone(),
            Mcrl2Process::Prefix(a, body) => Self::prefix(a.subst(x, v), Self::subst(body, x, v)),
            Mcrl2Process::Choice(l, r) => Self::choice(Self::subst(l, x, v), Self::subst(r, x, v)),
            Mcrl2Process::Par(l, r) => Self::par(Self::subst(l, x, v), Self::subst(r, x, v)),
            Mcrl2Process::Allow(m, body) => {
                Arc::new(Mcrl2Process::Allow(m.clone(), Self::subst(body, x, v)))
            }
            Mcrl2Process::Hide(i, body) => {
                Arc::new(Mcrl2Process::Hide(i.clone(), Self::subst(body, x, v)))
            }
            Mcrl2Process::Comm(c, body) => {
                Arc::new(Mcrl2Process::Comm(c.clone(), Self::subst(body, x, v)))
            }
            Mcrl2Process::Call(n, args) => Arc::new(Mcrl2Process::Call(
                n.clone(),
                args.iter().map(|e| e.subst(x, v)).collect(),
            )),
            Mcrl2Process::Sum(y, _) if &**y == x => p.clone(),
            Mcrl2Process::Sum(y, body) => Arc::new(Mcrl2Process::Sum(y.clone(), Self::subst(body, x, v))),
        }
    }

    /// Number of top-level parallel components below any operator wrappers.
    pub fn parallel_width(&self) -> usize {
        match self {
            Mcrl2Process::Par(l, r) => l.parallel_width() + r.parallel_width(),
            Mcrl2Process::Allow(_, b) | Mcrl2Process::Hide(_, b) | Mcrl2Process::Comm(_, b) => {
                b.parallel_width()
            }
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sort {
    D,
    Bool,
    /// The sort of global variable names.
    Var,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionDecl {
    pub name: Arc<str>,
    pub sorts: Vec<Sort>,
}

/// `X(p1: D, …, pn: D) = body`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mcrl2Equation {
    pub name: Arc<str>,
    pub params: Vec<Arc<str>>,
    pub body: Proc,
}

/// A recursive mCRL2 specification over a finite domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mcrl2Spec {
    pub domain: Vec<String>,
    pub variables: Vec<String>,
    pub actions: Vec<ActionDecl>,
    pub equations: Vec<Mcrl2Equation>,
    index: HashMap<Arc<str>, usize>,
    arity: HashMap<Arc<str>, usize>,
}

impl Mcrl2Spec {
    pub fn new(
        domain: Vec<String>,
        variables: Vec<String>,
        actions: Vec<ActionDecl>,
        equations: Vec<Mcrl2Equation>,
    ) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, eq) in equations.iter().enumerate() {
            if index.insert(eq.name.clone(), i).is_some() {
                return Err(Error::Semantic(format!("duplicate equation for `{}`", eq.name)));
            }
        }
        let mut arity = HashMap::new();
        for a in &actions {
            if arity.insert(a.name.clone(), a.sorts.len()).is_some() {
                return Err(Error::Semantic(format!("duplicate action `{}`", a.name)));
            }
        }
        Ok(Mcrl2Spec {
            domain,
            variables,
            actions,
            equations,
            index,
            arity,
        })
    }

    pub fn equation(&self, name: &str) -> Option<&Mcrl2Equation> {
        self.index.get(name).map(|&i| &self.equations[i])
    }

    pub fn arity(&self, action: &str) -> Option<usize> {
        self.arity.get(action).copied()
    }

    pub fn domain_values(&self) -> impl Iterator<Item = ValueId> {
        (0..self.domain.len() as u32).map(ValueId)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab(name: &str, args: &[u32]) -> ActionLabel {
        ActionLabel::new(name, args.iter().map(|&d| DataValue::Elem(ValueId(d))).collect())
    }

    fn checkp(d: u32, b: bool) -> ActionLabel {
        ActionLabel::new("checkP", vec![DataValue::Elem(ValueId(d)), DataValue::Bool(b)])
    }

    fn checkg(d: u32) -> ActionLabel {
        ActionLabel::new("checkG", vec![DataValue::Elem(ValueId(d)), DataValue::Bool(true)])
    }

    #[test]
    fn comm_worked_example() {
        let mut m = MultiSet::new();
        m.insert(lab("a", &[]), 2);
        m.insert(lab("b", &[]), 3);
        let out = apply_comm(&[CommRule::new(&["a", "b"], "c")], &m);
        let mut want = MultiSet::new();
        want.insert(lab("b", &[]), 1);
        want.insert(lab("c", &[]), 2);
        assert_eq!(out, want);
    }

    #[test]
    fn comm_requires_matching_parameters() {
        let rules = [CommRule::new(&["checkP", "checkG"], "check")];
        let m: SemMultiAction = [checkp(0, true), checkg(0)].into_iter().collect();
        let out = apply_comm(&rules, &m);
        let want = ActionLabel::new("check", vec![DataValue::Elem(ValueId(0)), DataValue::Bool(true)]);
        assert_eq!(out, MultiSet::singleton(want));

        let m: SemMultiAction = [checkp(0, true), checkg(1)].into_iter().collect();
        assert_eq!(apply_comm(&rules, &m), m);
        let m: SemMultiAction = [checkp(0, false), checkg(0)].into_iter().collect();
        assert_eq!(apply_comm(&rules, &m), m);
    }

    #[test]
    fn hide_and_allow() {
        let check = ActionLabel::new("check", vec![DataValue::Elem(ValueId(0)), DataValue::Bool(true)]);
        let mut m = MultiSet::new();
        m.insert(check.clone(), 1);
        m.insert(lab("a", &[]), 1);
        let hidden: Vec<Arc<str>> = vec!["check".into()];
        assert_eq!(apply_hide(&hidden, &m), MultiSet::singleton(lab("a", &[])));
        assert_eq!(apply_hide(&[], &m), m);
        let mut twice = MultiSet::new();
        twice.insert(check, 2);
        assert!(apply_hide(&hidden, &twice).is_empty());

        let allow = vec![MultiSet::singleton(Arc::<str>::from("a"))];
        assert!(allowed(&allow, &MultiSet::singleton(lab("a", &[]))));
        assert!(!allowed(&allow, &m));
        assert!(allowed(&[], &MultiSet::new()));
    }

    #[test]
    fn semantic_multiaction() {
        assert!(sem_multiaction(&MultiAction::Tau).unwrap().is_empty());
        let a0 = MultiAction::act("a", vec![DataExpr::elem(ValueId(0))]);
        let m = sem_multiaction(&MultiAction::bar_all(vec![a0.clone(), a0])).unwrap();
        assert_eq!(m.count(&lab("a", &[0])), 2);
        let unbound = MultiAction::act("a", vec![DataExpr::bound("x")]);
        assert!(sem_multiaction(&unbound).is_err());
    }

    #[test]
    fn substitution_respects_shadowing() {
        let inner = Mcrl2Process::sum(
            "x",
            Mcrl2Process::prefix(MultiAction::act("a", vec![DataExpr::bound("x")]), Mcrl2Process::delta()),
        );
        let p = Mcrl2Process::prefix(MultiAction::act("b", vec![DataExpr::bound("x")]), inner.clone());
        let q = Mcrl2Process::subst(&p, "x", DataValue::Elem(ValueId(1)));
        match &*q {
            Mcrl2Process::Prefix(MultiAction::Act(_, args), body) => {
                assert_eq!(args[0], DataExpr::elem(ValueId(1)));
                assert_eq!(body, &inner);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
