//! Translation of `∂_B(P)` over parallel-sequential `P` into the mCRL2
//! fragment, the formula translation θ, and checks relating both sides.

mod consistency;
mod emit;

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use crate::error::{Error, Result, Violation};
use crate::hml::{Formula, HmlFormula, StatePayload};
use crate::mcrl2::{
    ActionDecl, ActionLabel, CommRule, DataExpr, DataValue, Mcrl2Equation, Mcrl2Process,
    Mcrl2Spec, MultiAction, MultiSet, Proc, SemMultiAction, Sort,
};
use crate::syntax::{ActionId, Expr, ProcessExpr, RecursiveSpec, TransitionLabel, Valuation, ValueId, VarId};

pub use consistency::{
    check_bisim_preservation, check_formula_preservation, consistency_map, verify_variable_consistency,
    ConsistencyViolation, BisimPreservationReport, Pipeline, FormulaPreservationReport,
};
pub use emit::{emit_mcrl2_files, render_mcf, render_mcrl2};

/// Names the translation introduces; source specs may not use them.
pub const RESERVED_ACTIONS: [&str; 7] =
    ["checkP", "checkG", "check", "assignP", "assignG", "assign", "value"];
pub const GLOBS: &str = "Globs";

/// Whether the translation accepts exactly one global variable or any
/// number of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariableMode {
    Single,
    Multi,
}

/// `∂_B(P)` split into its parts. A root without encapsulation is read as
/// `∂_∅(P)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParSeqInput {
    pub blocked: BTreeSet<ActionId>,
    pub body: Expr,
    pub encapsulated: bool,
}

impl ParSeqInput {
    /// The source expression whose states `ℓ` relates.
    pub fn root(&self) -> Expr {
        self.wrap(self.body.clone())
    }

    fn wrap(&self, body: Expr) -> Expr {
        if self.encapsulated {
            ProcessExpr::encap(self.blocked.clone(), body)
        } else {
            body
        }
    }

    fn unwrap<'e>(&self, e: &'e Expr) -> Option<&'e Expr> {
        match (&**e, self.encapsulated) {
            (ProcessExpr::Encap(b, inner), true) if **b == self.blocked => Some(inner),
            (_, false) => Some(e),
            _ => None,
        }
    }
}

fn violation(location: &str, message: &str) -> Violation {
    Violation {
        location: location.to_string(),
        message: message.to_string(),
    }
}

fn check_seq(e: &Expr, path: &str, out: &mut Vec<Violation>) {
    match &**e {
        ProcessExpr::Deadlock => {}
        ProcessExpr::Choice(l, r) => {
            check_seq(l, &format!("{path}.left"), out);
            check_seq(r, &format!("{path}.right"), out);
        }
        ProcessExpr::Cond(_, _, b) => check_seq(b, &format!("{path}.cond"), out),
        ProcessExpr::Prefix(_, b) => {
            if !matches!(**b, ProcessExpr::Name(_)) {
                check_seq(b, &format!("{path}.prefix"), out);
            }
        }
        ProcessExpr::Name(_) => out.push(violation(
            path,
            "a process name in a sequential expression must follow a prefix",
        )),
        ProcessExpr::Parallel(..) => out.push(violation(
            path,
            "parallel composition inside a sequential expression",
        )),
        ProcessExpr::Encap(..) => out.push(violation(
            path,
            "encapsulation inside a sequential expression",
        )),
    }
}

fn check_par(e: &Expr, path: &str, out: &mut Vec<Violation>) {
    match &**e {
        ProcessExpr::Parallel(l, r) => {
            check_par(l, &format!("{path}.left"), out);
            check_par(r, &format!("{path}.right"), out);
        }
        ProcessExpr::Name(_) => {}
        ProcessExpr::Encap(..) => out.push(violation(
            path,
            "nested encapsulation; only the root may be encapsulated",
        )),
        _ => check_seq(e, path, out),
    }
}

/// Checks that `expr` is `∂_B(P)` (or plain `P`) with `P`
/// parallel-sequential, that every equation is sequential, and that the
/// signature avoids the names the translation introduces.
pub fn validate_parseq(spec: &RecursiveSpec, expr: &Expr, mode: VariableMode) -> Result<ParSeqInput> {
    let mut errs = Vec::new();
    if mode == VariableMode::Single && spec.variables.len() != 1 {
        errs.push(violation(
            "vars",
            &format!(
                "single-variable translation needs exactly one variable, found {}",
                spec.variables.len()
            ),
        ));
    }
    if spec.variables.is_empty() {
        errs.push(violation("vars", "translation needs at least one variable"));
    }
    for a in &spec.actions {
        if RESERVED_ACTIONS.contains(&a.as_str()) {
            errs.push(violation("acts", &format!("action `{a}` is reserved by the translation")));
        }
    }
    if spec.processes.iter().any(|p| p == GLOBS) {
        errs.push(violation("proc", "process name `Globs` is reserved by the translation"));
    }
    for x in spec.proc_ids() {
        check_seq(spec.equation(x), &format!("proc {}", spec.proc_name(x)), &mut errs);
    }
    let input = match &**expr {
        ProcessExpr::Encap(b, body) => {
            check_par(body, "init: encap", &mut errs);
            ParSeqInput {
                blocked: (**b).clone(),
                body: body.clone(),
                encapsulated: true,
            }
        }
        _ => {
            check_par(expr, "init", &mut errs);
            ParSeqInput {
                blocked: BTreeSet::new(),
                body: expr.clone(),
                encapsulated: false,
            }
        }
    };
    if errs.is_empty() {
        Ok(input)
    } else {
        Err(Error::Validation(errs))
    }
}

/// Constraints gathered by χ from enclosing conditions.
pub type Constraints = BTreeSet<(VarId, ValueId)>;

/// The fixed tables of one translation: E′, C_Gγ, A_B and the hidden set.
#[derive(Debug, Clone)]
pub struct Translation {
    pub source: RecursiveSpec,
    pub mode: VariableMode,
    pub input: ParSeqInput,
    pub target: Mcrl2Spec,
    /// Variables in the order of the data slots of `checkP`/`checkG`.
    pub order: Vec<VarId>,
    pub comm: Arc<Vec<CommRule>>,
    pub allow: Arc<Vec<MultiSet<Arc<str>>>>,
    pub hidden: Arc<Vec<Arc<str>>>,
}

impl Translation {
    /// Validates `root` and builds the translated specification.
    pub fn new(spec: &RecursiveSpec, root: &Expr, mode: VariableMode) -> Result<Self> {
        let input = validate_parseq(spec, root, mode)?;
        let mut order: Vec<VarId> = spec.var_ids().collect();
        order.sort_by(|&a, &b| spec.var_name(a).cmp(spec.var_name(b)));
        let n = order.len();

        let mut actions: Vec<ActionDecl> = spec
            .actions
            .iter()
            .map(|a| ActionDecl {
                name: a.as_str().into(),
                sorts: vec![],
            })
            .collect();
        let mut check_sorts = vec![Sort::D; n];
        check_sorts.push(Sort::Bool);
        for name in ["checkP", "checkG", "check"] {
            actions.push(ActionDecl {
                name: name.into(),
                sorts: check_sorts.clone(),
            });
        }
        for name in ["assignP", "assignG", "assign", "value"] {
            actions.push(ActionDecl {
                name: name.into(),
                sorts: vec![Sort::Var, Sort::D],
            });
        }

        let mut tr = Translation {
            source: spec.clone(),
            mode,
            input,
            target: Mcrl2Spec::new(vec![], vec![], vec![], vec![])?,
            order,
            comm: Arc::new(vec![]),
            allow: Arc::new(vec![]),
            hidden: Arc::new(vec!["check".into()]),
        };
        let mut equations = Vec::new();
        for x in spec.proc_ids() {
            equations.push(Mcrl2Equation {
                name: spec.proc_name(x).into(),
                params: vec![],
                body: tr.chi(spec.equation(x), &Constraints::new())?,
            });
        }
        equations.push(tr.make_globs());
        tr.target = Mcrl2Spec::new(
            spec.domain.names().to_vec(),
            spec.variables.clone(),
            actions,
            equations,
        )?;
        tr.comm = Arc::new(comm_rules(spec));
        tr.allow = Arc::new(
            spec.action_ids()
                .filter(|a| !tr.input.blocked.contains(a))
                .map(|a| spec.action_name(a))
                .chain(["value", "assign"])
                .map(|n| MultiSet::singleton(Arc::<str>::from(n)))
                .collect(),
        );
        Ok(tr)
    }

    /// Binder of the `i`-th data slot in a χ sum.
    fn slot(&self, i: usize) -> String {
        format!("d{}", i + 1)
    }

    /// Parameter of `Globs` holding the `i`-th variable.
    fn globs_param(&self, i: usize) -> String {
        if self.order.len() == 1 {
            "d".into()
        } else {
            format!("d{}", i + 1)
        }
    }

    fn position(&self, v: VarId) -> usize {
        self.order.iter().position(|&w| w == v).expect("variable of the spec")
    }

    fn condition(&self, eps: &Constraints) -> DataExpr {
        let mut conj: Vec<(usize, ValueId)> = eps.iter().map(|&(v, d)| (self.position(v), d)).collect();
        conj.sort();
        let mut parts: Vec<DataExpr> = conj
            .into_iter()
            .map(|(i, d)| DataExpr::Eq(Box::new(DataExpr::bound(&self.slot(i))), Box::new(DataExpr::elem(d))))
            .collect();
        match parts.len() {
            0 => DataExpr::Value(DataValue::Bool(true)),
            1 => parts.pop().expect("one conjunct"),
            _ => DataExpr::And(parts),
        }
    }

    /// `χ(p, ε)`. Parallel composition is only accepted with `ε = ∅`.
    pub fn chi(&self, p: &Expr, eps: &Constraints) -> Result<Proc> {
        Ok(match &**p {
            ProcessExpr::Choice(l, r) => Mcrl2Process::choice(self.chi(l, eps)?, self.chi(r, eps)?),
            ProcessExpr::Cond(v, d, body) => {
                let mut e = eps.clone();
                e.insert((*v, *d));
                self.chi(body, &e)?
            }
            ProcessExpr::Prefix(l, body) => {
                let head = match *l {
                    TransitionLabel::Action(a) => MultiAction::act(self.source.action_name(a), vec![]),
                    TransitionLabel::Assign(v, d) => MultiAction::act(
                        "assignP",
                        vec![DataExpr::Value(DataValue::Var(v)), DataExpr::elem(d)],
                    ),
                };
                let mut check: Vec<DataExpr> =
                    (0..self.order.len()).map(|i| DataExpr::bound(&self.slot(i))).collect();
                check.push(self.condition(eps));
                let alpha = MultiAction::bar_all(vec![head, MultiAction::act("checkP", check)]);
                let mut out = Mcrl2Process::prefix(alpha, self.chi(body, &Constraints::new())?);
                for i in (0..self.order.len()).rev() {
                    out = Mcrl2Process::sum(&self.slot(i), out);
                }
                out
            }
            ProcessExpr::Name(x) => Mcrl2Process::call(self.source.proc_name(*x), vec![]),
            ProcessExpr::Deadlock => Mcrl2Process::delta(),
            ProcessExpr::Parallel(l, r) if eps.is_empty() => {
                Mcrl2Process::par(self.chi(l, eps)?, self.chi(r, eps)?)
            }
            ProcessExpr::Parallel(..) | ProcessExpr::Encap(..) => {
                return Err(Error::Contract(format!(
                    "χ is undefined on `{}`",
                    self.source.show_expr(p)
                )))
            }
        })
    }

    /// The defining equation of `Globs`, with one parameter per variable.
    pub fn make_globs(&self) -> Mcrl2Equation {
        let n = self.order.len();
        let params: Vec<String> = (0..n).map(|i| self.globs_param(i)).collect();
        let current: Vec<DataExpr> = params.iter().map(|p| DataExpr::bound(p)).collect();
        let check_g = || {
            let mut args = current.clone();
            args.push(DataExpr::Value(DataValue::Bool(true)));
            MultiAction::act("checkG", args)
        };
        let me = |args: Vec<DataExpr>| Mcrl2Process::call(GLOBS, args);

        let mut summands = vec![
            Mcrl2Process::prefix(check_g(), me(current.clone())),
            Mcrl2Process::prefix(MultiAction::bar_all(vec![check_g(), check_g()]), me(current.clone())),
        ];
        for (i, &v) in self.order.iter().enumerate() {
            let mut next = current.clone();
            next[i] = DataExpr::bound("new");
            let alpha = MultiAction::bar_all(vec![
                check_g(),
                MultiAction::act("assignG", vec![DataExpr::Value(DataValue::Var(v)), DataExpr::bound("new")]),
            ]);
            summands.push(Mcrl2Process::sum("new", Mcrl2Process::prefix(alpha, me(next))));
        }
        for (i, &v) in self.order.iter().enumerate() {
            let alpha = MultiAction::act("value", vec![DataExpr::Value(DataValue::Var(v)), current[i].clone()]);
            summands.push(Mcrl2Process::prefix(alpha, me(current.clone())));
        }
        Mcrl2Equation {
            name: GLOBS.into(),
            params: params.iter().map(|p| Arc::from(p.as_str())).collect(),
            body: Mcrl2Process::choice_all(summands),
        }
    }

    pub fn globs_call(&self, v: &Valuation) -> Proc {
        Mcrl2Process::call(
            GLOBS,
            self.order.iter().map(|&x| DataExpr::elem(v.get(x))).collect(),
        )
    }

    /// `Ψ(P, V)` for a parallel-sequential `P`.
    pub fn psi(&self, p: &Expr, v: &Valuation) -> Result<Proc> {
        let inner = Mcrl2Process::par(self.chi(p, &Constraints::new())?, self.globs_call(v));
        Ok(Arc::new(Mcrl2Process::Allow(
            self.allow.clone(),
            Arc::new(Mcrl2Process::Hide(
                self.hidden.clone(),
                Arc::new(Mcrl2Process::Comm(self.comm.clone(), inner)),
            )),
        )))
    }

    /// `Ψ` of the validated input under `v`.
    pub fn top(&self, v: &Valuation) -> Result<Proc> {
        self.psi(&self.input.body, v)
    }

    /// `ℓ(⟨∂_B(P′), V′⟩) = Ψ(P′, V′)`.
    pub fn ell(&self, expr: &Expr, v: &Valuation) -> Result<Proc> {
        let body = self.input.unwrap(expr).ok_or_else(|| {
            Error::Contract(format!(
                "`{}` does not have the encapsulation of the translated root",
                self.source.show_expr(expr)
            ))
        })?;
        self.psi(body, v)
    }

    pub fn label(&self, l: &TransitionLabel) -> SemMultiAction {
        translate_label(&self.source, l)
    }

    pub fn value_label(&self, v: VarId, d: ValueId) -> SemMultiAction {
        MultiSet::singleton(ActionLabel::new("value", vec![DataValue::Var(v), DataValue::Elem(d)]))
    }

    /// Every label condition 1 admits: `TL ∪ {value(v, d)}` in translated form.
    pub fn admitted_labels(&self) -> HashSet<SemMultiAction> {
        let mut out: HashSet<SemMultiAction> =
            self.source.all_labels().iter().map(|l| self.label(l)).collect();
        for v in self.source.var_ids() {
            for d in self.source.domain.ids() {
                out.insert(self.value_label(v, d));
            }
        }
        out
    }
}

/// `C_Gγ`: each `γ(a, b) = c` once, with `a|b` in lexicographic order of
/// the names, then the two rules for `Globs`.
fn comm_rules(spec: &RecursiveSpec) -> Vec<CommRule> {
    let mut rules: Vec<CommRule> = spec
        .comm
        .entries()
        .map(|(a, b, c)| {
            let (x, y) = (spec.action_name(a), spec.action_name(b));
            let (x, y) = if x <= y { (x, y) } else { (y, x) };
            CommRule::new(&[x, y], spec.action_name(c))
        })
        .collect();
    rules.sort();
    rules.push(CommRule::new(&["checkP", "checkG"], "check"));
    rules.push(CommRule::new(&["assignP", "assignG"], "assign"));
    rules
}

/// A transition label as the singleton multi-action the translation emits.
pub fn translate_label(spec: &RecursiveSpec, l: &TransitionLabel) -> SemMultiAction {
    MultiSet::singleton(match *l {
        TransitionLabel::Action(a) => ActionLabel::new(spec.action_name(a), vec![]),
        TransitionLabel::Assign(v, d) => {
            ActionLabel::new("assign", vec![DataValue::Var(v), DataValue::Elem(d)])
        }
    })
}

/// θ: replaces each check `(v = e)` by `⟨value(v, e)⟩ true` and maps
/// modal labels to their translated multi-actions.
pub fn translate_formula(spec: &RecursiveSpec, f: &HmlFormula) -> Result<Formula<SemMultiAction>> {
    Ok(match f {
        Formula::True => Formula::True,
        Formula::False => Formula::False,
        Formula::Check(v, d) => Formula::diamond(
            [MultiSet::singleton(ActionLabel::new("value", vec![DataValue::Var(*v), DataValue::Elem(*d)]))],
            Formula::True,
        ),
        Formula::Not(g) => Formula::not(translate_formula(spec, g)?),
        Formula::And(l, r) => Formula::and(translate_formula(spec, l)?, translate_formula(spec, r)?),
        Formula::Or(l, r) => Formula::or(translate_formula(spec, l)?, translate_formula(spec, r)?),
        Formula::Diamond(t, g) => Formula::Diamond(
            t.iter().map(|l| translate_label(spec, l)).collect(),
            Box::new(translate_formula(spec, g)?),
        ),
        Formula::Box(t, g) => Formula::Box(
            t.iter().map(|l| translate_label(spec, l)).collect(),
            Box::new(translate_formula(spec, g)?),
        ),
        Formula::Set(..) => {
            return Err(Error::Fragment(
                "θ is defined on HML with check only; the formula uses set".into(),
            ))
        }
    })
}

impl StatePayload for Proc {
    fn check(&self, _: VarId, _: ValueId) -> Option<bool> {
        None
    }

    fn with_value(&self, _: VarId, _: ValueId) -> Option<Self> {
        None
    }
}

/// Single-variable translation: `(translation, Ψ(P, V))`.
pub fn translate(spec: &RecursiveSpec, root: &Expr, v: &Valuation) -> Result<(Translation, Proc)> {
    let tr = Translation::new(spec, root, VariableMode::Single)?;
    let top = tr.top(v)?;
    Ok((tr, top))
}

/// Translation for any number of variables; `Globs` carries the whole
/// valuation.
pub fn translate_multi(spec: &RecursiveSpec, root: &Expr, v: &Valuation) -> Result<(Translation, Proc)> {
    let tr = Translation::new(spec, root, VariableMode::Multi)?;
    let top = tr.top(v)?;
    Ok((tr, top))
}
