//! Hennessy-Milner logic with valuation checks and valuation rewrites.
//!
//! [`Formula`] is generic over the label type so the same AST and
//! evaluator serve both the source algebra and the translated multi-action
//! side.

mod enumerate;
mod eval;
mod parser;

use std::collections::BTreeSet;

use crate::syntax::{RecursiveSpec, TransitionLabel, Valuation, ValueId, VarId};

pub use enumerate::enumerate_check_formulas;
pub use eval::{build_state_space, eval, satisfies, Model, StatePayload, StateSet, StateSpace};
pub use parser::parse_formula;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula<L> {
    True,
    False,
    /// `(v = d)`
    Check(VarId, ValueId),
    Not(Box<Formula<L>>),
    And(Box<Formula<L>>, Box<Formula<L>>),
    Or(Box<Formula<L>>, Box<Formula<L>>),
    Diamond(BTreeSet<L>, Box<Formula<L>>),
    Box(BTreeSet<L>, Box<Formula<L>>),
    /// `↓v:=d φ`
    Set(VarId, ValueId, Box<Formula<L>>),
}

pub type HmlFormula = Formula<TransitionLabel>;

/// Which extensions a formula uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fragment {
    Hml,
    Check,
    Set,
    CheckSet,
}

impl Fragment {
    pub fn name(self) -> &'static str {
        match self {
            Fragment::Hml => "HML",
            Fragment::Check => "HML^check",
            Fragment::Set => "HML^set",
            Fragment::CheckSet => "HML^check+set",
        }
    }
}

impl<L: Ord + Clone> Formula<L> {
    pub fn not(f: Self) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Self, r: Self) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Self, r: Self) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn diamond(labels: impl IntoIterator<Item = L>, f: Self) -> Self {
        Formula::Diamond(labels.into_iter().collect(), Box::new(f))
    }

    pub fn boxed(labels: impl IntoIterator<Item = L>, f: Self) -> Self {
        Formula::Box(labels.into_iter().collect(), Box::new(f))
    }

    pub fn set(v: VarId, d: ValueId, f: Self) -> Self {
        Formula::Set(v, d, Box::new(f))
    }

    /// Right-nested conjunction; the empty conjunction is `true`.
    pub fn and_all(fs: impl IntoIterator<Item = Self>) -> Self {
        let mut fs: Vec<Self> = fs.into_iter().collect();
        let Some(mut acc) = fs.pop() else {
            return Formula::True;
        };
        while let Some(f) = fs.pop() {
            acc = Formula::and(f, acc);
        }
        acc
    }

    /// `↓V φ`: one set per variable, in declaration order.
    pub fn set_all(v: &Valuation, f: Self) -> Self {
        v.iter()
            .collect::<Vec<_>>()
            .into_iter()
            .rev()
            .fold(f, |acc, (x, d)| Formula::set(x, d, acc))
    }

    pub fn fragment(&self) -> Fragment {
        let (mut check, mut set) = (false, false);
        self.visit(&mut |f| match f {
            Formula::Check(..) => check = true,
            Formula::Set(..) => set = true,
            _ => {}
        });
        match (check, set) {
            (false, false) => Fragment::Hml,
            (true, false) => Fragment::Check,
            (false, true) => Fragment::Set,
            (true, true) => Fragment::CheckSet,
        }
    }

    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Check(..) => 0,
            Formula::Not(f) | Formula::Set(_, _, f) => f.modal_depth(),
            Formula::And(l, r) | Formula::Or(l, r) => l.modal_depth().max(r.modal_depth()),
            Formula::Diamond(_, f) | Formula::Box(_, f) => 1 + f.modal_depth(),
        }
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    fn visit(&self, f: &mut dyn FnMut(&Self)) {
        f(self);
        match self {
            Formula::True | Formula::False | Formula::Check(..) => {}
            Formula::Not(g) | Formula::Set(_, _, g) | Formula::Diamond(_, g) | Formula::Box(_, g) => {
                g.visit(f)
            }
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.visit(f);
                r.visit(f);
            }
        }
    }

    /// Applies `f` to every modal label set, keeping the structure.
    pub fn map_labels<M: Ord + Clone>(&self, f: &dyn Fn(&L) -> M) -> Formula<M> {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Check(v, d) => Formula::Check(*v, *d),
            Formula::Not(g) => Formula::not(g.map_labels(f)),
            Formula::And(l, r) => Formula::and(l.map_labels(f), r.map_labels(f)),
            Formula::Or(l, r) => Formula::or(l.map_labels(f), r.map_labels(f)),
            Formula::Diamond(t, g) => Formula::diamond(t.iter().map(f), g.map_labels(f)),
            Formula::Box(t, g) => Formula::boxed(t.iter().map(f), g.map_labels(f)),
            Formula::Set(v, d, g) => Formula::set(*v, *d, g.map_labels(f)),
        }
    }

    /// Concrete syntax, using `label` for modal labels.
    pub fn render(
        &self,
        label: &dyn Fn(&L) -> String,
        var: &dyn Fn(VarId) -> String,
        value: &dyn Fn(ValueId) -> String,
    ) -> String {
        let mut out = String::new();
        self.write(0, label, var, value, &mut out);
        out
    }

    fn level(&self) -> u8 {
        match self {
            Formula::Or(..) => 0,
            Formula::And(..) => 1,
            _ => 2,
        }
    }

    fn write(
        &self,
        min: u8,
        label: &dyn Fn(&L) -> String,
        var: &dyn Fn(VarId) -> String,
        value: &dyn Fn(ValueId) -> String,
        out: &mut String,
    ) {
        if self.level() < min {
            out.push('(');
            self.write(0, label, var, value, out);
            out.push(')');
            return;
        }
        let labels = |t: &BTreeSet<L>| t.iter().map(label).collect::<Vec<_>>().join(", ");
        match self {
            Formula::True => out.push_str("true"),
            Formula::False => out.push_str("false"),
            Formula::Check(v, d) => out.push_str(&format!("({} = {})", var(*v), value(*d))),
            Formula::Not(g) => {
                out.push('!');
                g.write(2, label, var, value, out);
            }
            Formula::And(l, r) => {
                l.write(1, label, var, value, out);
                out.push_str(" && ");
                r.write(2, label, var, value, out);
            }
            Formula::Or(l, r) => {
                l.write(0, label, var, value, out);
                out.push_str(" || ");
                r.write(1, label, var, value, out);
            }
            Formula::Diamond(t, g) => {
                out.push_str(&format!("<{}> ", labels(t)));
                g.write(2, label, var, value, out);
            }
            Formula::Box(t, g) => {
                out.push_str(&format!("[{}] ", labels(t)));
                g.write(2, label, var, value, out);
            }
            Formula::Set(v, d, g) => {
                out.push_str(&format!("set {}:={} . ", var(*v), value(*d)));
                g.write(2, label, var, value, out);
            }
        }
    }
}

impl RecursiveSpec {
    /// Renders a formula in the syntax accepted by [`parse_formula`].
    pub fn show_formula(&self, f: &HmlFormula) -> String {
        f.render(
            &|l| match *l {
                TransitionLabel::Action(a) => self.action_name(a).to_string(),
                TransitionLabel::Assign(v, d) => {
                    format!("assign({}, {})", self.var_name(v), self.value_name(d))
                }
            },
            &|v| self.var_name(v).to_string(),
            &|d| self.value_name(d).to_string(),
        )
    }
}
