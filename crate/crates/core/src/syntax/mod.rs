//! Term language of the global-variable algebra.
//!
//! Names (variables, values, actions, process names) are interned into
//! small integer ids in declaration order, so all derived orderings follow
//! the order in which the spec file declared them.

mod parser;
mod pretty;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, ResourceError, Result};

pub use parser::{parse_expr, parse_spec, parse_spec_with, parse_valuation, ParseOptions};
pub use validate::{validate_comm, validate_guardedness};

macro_rules! id_type {
    ($(#[$m:meta])* $name:ident) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
        pub struct $name(pub u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

id_type!(
    /// A global variable.
    VarId
);
id_type!(
    /// An element of the data domain.
    ValueId
);
id_type!(ActionId);
id_type!(
    /// A process name with a defining equation.
    ProcId
);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TransitionLabel {
    Action(ActionId),
    Assign(VarId, ValueId),
}

pub type Expr = Arc<ProcessExpr>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProcessExpr {
    Prefix(TransitionLabel, Expr),
    Deadlock,
    Choice(Expr, Expr),
    Parallel(Expr, Expr),
    /// Blocks the listed actions; assignments always pass.
    Encap(Arc<BTreeSet<ActionId>>, Expr),
    Name(ProcId),
    Cond(VarId, ValueId, Expr),
}

impl ProcessExpr {
    pub fn prefix(label: TransitionLabel, body: Expr) -> Expr {
        Arc::new(ProcessExpr::Prefix(label, body))
    }

    pub fn action(a: ActionId, body: Expr) -> Expr {
        Self::prefix(TransitionLabel::Action(a), body)
    }

    pub fn assign(v: VarId, d: ValueId, body: Expr) -> Expr {
        Self::prefix(TransitionLabel::Assign(v, d), body)
    }

    pub fn delta() -> Expr {
        Arc::new(ProcessExpr::Deadlock)
    }

    pub fn choice(l: Expr, r: Expr) -> Expr {
        Arc::new(ProcessExpr::Choice(l, r))
    }

    pub fn par(l: Expr, r: Expr) -> Expr {
        Arc::new(ProcessExpr::Parallel(l, r))
    }

    pub fn encap(blocked: BTreeSet<ActionId>, body: Expr) -> Expr {
        Arc::new(ProcessExpr::Encap(Arc::new(blocked), body))
    }

    pub fn name(x: ProcId) -> Expr {
        Arc::new(ProcessExpr::Name(x))
    }

    pub fn cond(v: VarId, d: ValueId, body: Expr) -> Expr {
        Arc::new(ProcessExpr::Cond(v, d, body))
    }

    /// Number of syntax nodes.
    pub fn size(&self) -> usize {
        match self {
            ProcessExpr::Deadlock | ProcessExpr::Name(_) => 1,
            ProcessExpr::Prefix(_, b) | ProcessExpr::Encap(_, b) | ProcessExpr::Cond(_, _, b) => {
                1 + b.size()
            }
            ProcessExpr::Choice(l, r) | ProcessExpr::Parallel(l, r) => 1 + l.size() + r.size(),
        }
    }
}

/// The finite data domain, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainDef {
    values: Vec<String>,
}

impl DomainDef {
    pub fn new(values: Vec<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Semantic("the data domain must not be empty".into()));
        }
        let mut seen = BTreeSet::new();
        for v in &values {
            if !seen.insert(v) {
                return Err(Error::Semantic(format!("duplicate domain value `{v}`")));
            }
        }
        Ok(DomainDef { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.values
    }

    pub fn ids(&self) -> impl Iterator<Item = ValueId> + '_ {
        (0..self.values.len() as u32).map(ValueId)
    }

    pub fn lookup(&self, name: &str) -> Option<ValueId> {
        self.values
            .iter()
            .position(|v| v == name)
            .map(|i| ValueId(i as u32))
    }

    pub fn name(&self, id: ValueId) -> &str {
        &self.values[id.index()]
    }
}

/// A partial, commutative communication function on actions.
///
/// Keys are stored with the smaller id first so that `lookup(a, b)` and
/// `lookup(b, a)` always agree.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CommFunction {
    entries: BTreeMap<(ActionId, ActionId), ActionId>,
}

impl CommFunction {
    pub fn new() -> Self {
        Self::default()
    }

    fn key(a: ActionId, b: ActionId) -> (ActionId, ActionId) {
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Adds `a|b -> c`; returns the previous result if the pair was defined.
    pub fn insert(&mut self, a: ActionId, b: ActionId, c: ActionId) -> Option<ActionId> {
        self.entries.insert(Self::key(a, b), c)
    }

    pub fn lookup(&self, a: ActionId, b: ActionId) -> Option<ActionId> {
        self.entries.get(&Self::key(a, b)).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (ActionId, ActionId, ActionId)> + '_ {
        self.entries.iter().map(|(&(a, b), &c)| (a, b, c))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A total map from the spec's variables to domain values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Valuation(Vec<ValueId>);

impl Valuation {
    pub fn new(values: Vec<ValueId>) -> Self {
        Valuation(values)
    }

    pub fn get(&self, v: VarId) -> ValueId {
        self.0[v.index()]
    }

    /// `V[v ↦ d]`
    pub fn with(&self, v: VarId, d: ValueId) -> Valuation {
        let mut next = self.0.clone();
        next[v.index()] = d;
        Valuation(next)
    }

    pub fn values(&self) -> &[ValueId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, ValueId)> + '_ {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &d)| (VarId(i as u32), d))
    }

    /// First variable on which the two valuations disagree.
    pub fn first_difference(&self, other: &Valuation) -> Option<VarId> {
        self.0
            .iter()
            .zip(&other.0)
            .position(|(a, b)| a != b)
            .map(|i| VarId(i as u32))
    }
}

/// A recursive specification together with its signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecursiveSpec {
    pub domain: DomainDef,
    pub variables: Vec<String>,
    pub actions: Vec<String>,
    pub processes: Vec<String>,
    /// Indexed by [`ProcId`].
    pub equations: Vec<Expr>,
    pub comm: CommFunction,
}

/// Initial state: a root expression and a starting valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitSpec {
    pub root: Expr,
    pub initial: Valuation,
}

pub const DEFAULT_MAX_VALUATIONS: usize = 4096;

impl RecursiveSpec {
    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.variables
            .iter()
            .position(|v| v == name)
            .map(|i| VarId(i as u32))
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.actions
            .iter()
            .position(|v| v == name)
            .map(|i| ActionId(i as u32))
    }

    pub fn proc_id(&self, name: &str) -> Option<ProcId> {
        self.processes
            .iter()
            .position(|v| v == name)
            .map(|i| ProcId(i as u32))
    }

    pub fn value_id(&self, name: &str) -> Option<ValueId> {
        self.domain.lookup(name)
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.variables[v.index()]
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.actions[a.index()]
    }

    pub fn proc_name(&self, x: ProcId) -> &str {
        &self.processes[x.index()]
    }

    pub fn value_name(&self, d: ValueId) -> &str {
        self.domain.name(d)
    }

    pub fn equation(&self, x: ProcId) -> &Expr {
        &self.equations[x.index()]
    }

    pub fn var_ids(&self) -> impl Iterator<Item = VarId> {
        (0..self.variables.len() as u32).map(VarId)
    }

    pub fn action_ids(&self) -> impl Iterator<Item = ActionId> {
        (0..self.actions.len() as u32).map(ActionId)
    }

    pub fn proc_ids(&self) -> impl Iterator<Item = ProcId> {
        (0..self.processes.len() as u32).map(ProcId)
    }

    /// Every transition label: actions first, then assignments in
    /// (variable, value) order.
    pub fn all_labels(&self) -> Vec<TransitionLabel> {
        let mut out: Vec<_> = self.action_ids().map(TransitionLabel::Action).collect();
        for v in self.var_ids() {
            for d in self.domain.ids() {
                out.push(TransitionLabel::Assign(v, d));
            }
        }
        out
    }

    /// All valuations, lexicographic in (variable order, domain order).
    pub fn enumerate_valuations(&self, cap: usize) -> Result<Vec<Valuation>> {
        let base = self.domain.len() as u128;
        let count = (0..self.variables.len()).try_fold(1u128, |acc, _| acc.checked_mul(base));
        match count {
            Some(c) if c <= cap as u128 => {}
            Some(c) => {
                return Err(ResourceError::Valuations {
                    count: c.to_string(),
                    cap,
                }
                .into())
            }
            None => {
                return Err(ResourceError::Valuations {
                    count: format!("{}^{}", base, self.variables.len()),
                    cap,
                }
                .into())
            }
        }
        let n = self.variables.len();
        let mut out = vec![Valuation(Vec::with_capacity(n))];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    self.domain.ids().map(move |d| {
                        let mut next = prefix.0.clone();
                        next.push(d);
                        Valuation(next)
                    })
                })
                .collect();
        }
        Ok(out)
    }

    /// Builds a valuation from `(variable, value)` name pairs; must be total.
    pub fn valuation_from_names(&self, pairs: &[(&str, &str)]) -> Result<Valuation> {
        let mut slots: Vec<Option<ValueId>> = vec![None; self.variables.len()];
        for (var, val) in pairs {
            let v = self
                .var_id(var)
                .ok_or_else(|| Error::Semantic(format!("unknown variable `{var}`")))?;
            let d = self
                .value_id(val)
                .ok_or_else(|| Error::Semantic(format!("unknown value `{val}`")))?;
            slots[v.index()] = Some(d);
        }
        let values = slots
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                s.ok_or_else(|| {
                    Error::Semantic(format!(
                        "valuation does not assign variable `{}`",
                        self.variables[i]
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Valuation(values))
    }

    pub fn show_label(&self, l: &TransitionLabel) -> String {
        match *l {
            TransitionLabel::Action(a) => self.action_name(a).to_string(),
            TransitionLabel::Assign(v, d) => {
                format!("assign({},{})", self.var_name(v), self.value_name(d))
            }
        }
    }

    pub fn show_expr(&self, e: &ProcessExpr) -> String {
        pretty::expr_to_string(self, e)
    }

    pub fn show_valuation(&self, v: &Valuation) -> String {
        let parts: Vec<String> = v
            .iter()
            .map(|(x, d)| format!("{} = {}", self.var_name(x), self.value_name(d)))
            .collect();
        format!("{{ {} }}", parts.join(", "))
    }

    /// Renders the whole specification in the concrete file syntax.
    pub fn to_source(&self, init: Option<&InitSpec>) -> String {
        pretty::spec_to_string(self, init)
    }
}

impl fmt::Display for TransitionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransitionLabel::Action(a) => write!(f, "act#{}", a.0),
            TransitionLabel::Assign(v, d) => write!(f, "assign(var#{},val#{})", v.0, d.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_with(values: &[&str], vars: &[&str]) -> RecursiveSpec {
        RecursiveSpec {
            domain: DomainDef::new(values.iter().map(|s| s.to_string()).collect()).unwrap(),
            variables: vars.iter().map(|s| s.to_string()).collect(),
            actions: vec![],
            processes: vec![],
            equations: vec![],
            comm: CommFunction::new(),
        }
    }

    #[test]
    fn enumerates_single_variable() {
        let spec = spec_with(&["green", "red"], &["t"]);
        let vals = spec.enumerate_valuations(4096).unwrap();
        assert_eq!(
            vals,
            vec![Valuation(vec![ValueId(0)]), Valuation(vec![ValueId(1)])]
        );
    }

    #[test]
    fn enumerates_lexicographically() {
        let spec = spec_with(&["0", "1"], &["u", "v"]);
        let vals: Vec<Vec<u32>> = spec
            .enumerate_valuations(4096)
            .unwrap()
            .into_iter()
            .map(|v| v.values().iter().map(|d| d.0).collect())
            .collect();
        assert_eq!(vals, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn valuation_cap_reports_count() {
        let values: Vec<String> = (0..17).map(|i| format!("d{i}")).collect();
        let refs: Vec<&str> = values.iter().map(|s| s.as_str()).collect();
        let spec = spec_with(&refs, &["a", "b", "c", "d"]);
        let err = spec.enumerate_valuations(4096).unwrap_err();
        assert_eq!(
            err,
            Error::Resource(ResourceError::Valuations {
                count: (17u64.pow(4)).to_string(),
                cap: 4096
            })
        );
        assert!(err.to_string().contains("83521"));
    }

    #[test]
    fn no_variables_means_one_valuation() {
        let spec = spec_with(&["x"], &[]);
        assert_eq!(spec.enumerate_valuations(1).unwrap().len(), 1);
    }

    #[test]
    fn comm_lookup_is_symmetric() {
        let mut c = CommFunction::new();
        c.insert(ActionId(3), ActionId(1), ActionId(7));
        assert_eq!(c.lookup(ActionId(1), ActionId(3)), Some(ActionId(7)));
        assert_eq!(c.lookup(ActionId(3), ActionId(1)), Some(ActionId(7)));
        assert_eq!(c.lookup(ActionId(1), ActionId(1)), None);
    }

    #[test]
    fn domain_rejects_duplicates() {
        assert!(DomainDef::new(vec!["a".into(), "a".into()]).is_err());
        assert!(DomainDef::new(vec![]).is_err());
    }
}
