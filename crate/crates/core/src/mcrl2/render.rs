//! Concrete mCRL2 syntax for data, multi-actions, processes and formulas,
//! plus the canonical label strings used in `.aut` exports.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hml::Formula;

use super::{CommRule, DataExpr, DataValue, Mcrl2Process, Mcrl2Spec, MultiAction, MultiSet, SemMultiAction};

/// Maps a source identifier to a valid mCRL2 identifier. Names that do not
/// start with a letter or `_` get a `c_` prefix.
pub fn ident(name: &str) -> String {
    let ok_start = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
    let ok_rest = name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'');
    if ok_start && ok_rest {
        name.to_string()
    } else {
        let cleaned: String = name
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
            .collect();
        format!("c_{cleaned}")
    }
}

pub fn value(spec: &Mcrl2Spec, v: DataValue) -> String {
    match v {
        DataValue::Elem(d) => ident(&spec.domain[d.index()]),
        DataValue::Bool(b) => b.to_string(),
        DataValue::Var(x) => ident(&spec.variables[x.index()]),
    }
}

pub fn data(spec: &Mcrl2Spec, e: &DataExpr) -> String {
    match e {
        DataExpr::Value(v) => value(spec, *v),
        DataExpr::Bound(x) => x.to_string(),
        DataExpr::Eq(a, b) => format!("{} == {}", data(spec, a), data(spec, b)),
        DataExpr::And(cs) if cs.is_empty() => "true".into(),
        DataExpr::And(cs) => cs
            .iter()
            .map(|c| match c {
                DataExpr::And(_) => format!("({})", data(spec, c)),
                _ => data(spec, c),
            })
            .collect::<Vec<_>>()
            .join(" && "),
    }
}

fn call(name: &str, args: Vec<String>, sep: &str) -> String {
    if args.is_empty() {
        name.to_string()
    } else {
        format!("{name}({})", args.join(sep))
    }
}

pub fn multiaction(spec: &Mcrl2Spec, a: &MultiAction) -> String {
    match a {
        MultiAction::Tau => "tau".into(),
        MultiAction::Act(n, args) => call(n, args.iter().map(|e| data(spec, e)).collect(), ", "),
        MultiAction::Bar(l, r) => format!("{} | {}", multiaction(spec, l), multiaction(spec, r)),
    }
}

/// Canonical label text: elements in ascending order, repeated by
/// multiplicity, joined with `|`, no spaces; `tau` when empty.
pub fn canonical_label(spec: &Mcrl2Spec, m: &SemMultiAction) -> String {
    label_with(spec, m, ",", "|")
}

fn label_with(spec: &Mcrl2Spec, m: &SemMultiAction, arg_sep: &str, bar: &str) -> String {
    if m.is_empty() {
        return "tau".into();
    }
    m.elements()
        .map(|l| call(&l.name, l.args.iter().map(|&v| value(spec, v)).collect(), arg_sep))
        .collect::<Vec<_>>()
        .join(bar)
}

pub fn name_set(names: &MultiSet<Arc<str>>) -> String {
    names.elements().map(|n| n.to_string()).collect::<Vec<_>>().join("|")
}

pub fn comm_rule(r: &CommRule) -> String {
    let lhs: Vec<&str> = r.lhs.iter().map(|s| &**s).collect();
    format!("{} -> {}", lhs.join("|"), r.rhs)
}

/// A process term in mCRL2 syntax. Sums are parenthesised whenever they
/// are an operand, so the output does not depend on how far a reader
/// extends their scope.
pub fn process(spec: &Mcrl2Spec, p: &Mcrl2Process) -> String {
    let mut out = String::new();
    write_proc(spec, p, 0, &mut out);
    out
}

fn level(p: &Mcrl2Process) -> u8 {
    match p {
        Mcrl2Process::Choice(..) => 0,
        Mcrl2Process::Sum(..) => 1,
        Mcrl2Process::Par(..) => 2,
        Mcrl2Process::Prefix(..) => 3,
        _ => 4,
    }
}

fn write_proc(spec: &Mcrl2Spec, p: &Mcrl2Process, min: u8, out: &mut String) {
    let paren = level(p) < min;
    if paren {
        out.push('(');
    }
    match p {
        Mcrl2Process::Deadlock => out.push_str("delta"),
        Mcrl2Process::Prefix(a, body) => {
            out.push_str(&multiaction(spec, a));
            out.push_str(" . ");
            write_proc(spec, body, 3, out);
        }
        Mcrl2Process::Choice(l, r) => {
            write_proc(spec, l, 2, out);
            out.push_str(" + ");
            let rmin = if matches!(**r, Mcrl2Process::Choice(..)) { 0 } else { 2 };
            write_proc(spec, r, rmin, out);
        }
        Mcrl2Process::Par(l, r) => {
            write_proc(spec, l, 2, out);
            out.push_str(" || ");
            write_proc(spec, r, 3, out);
        }
        Mcrl2Process::Sum(x, body) => {
            out.push_str(&format!("sum {x}: D . "));
            write_proc(spec, body, 1, out);
        }
        Mcrl2Process::Call(x, args) => {
            out.push_str(&call(x, args.iter().map(|e| data(spec, e)).collect(), ", "));
        }
        Mcrl2Process::Allow(m, body) => {
            let items: Vec<String> = m.iter().map(name_set).collect();
            out.push_str(&format!("allow({{{}}}, ", items.join(", ")));
            write_proc(spec, body, 0, out);
            out.push(')');
        }
        Mcrl2Process::Hide(i, body) => {
            let items: Vec<&str> = i.iter().map(|s| &**s).collect();
            out.push_str(&format!("hide({{{}}}, ", items.join(", ")));
            write_proc(spec, body, 0, out);
            out.push(')');
        }
        Mcrl2Process::Comm(c, body) => {
            let items: Vec<String> = c.iter().map(comm_rule).collect();
            out.push_str(&format!("comm({{{}}}, ", items.join(", ")));
            write_proc(spec, body, 0, out);
            out.push(')');
        }
    }
    if paren {
        out.push(')');
    }
}

/// A modal formula over multi-action labels in `.mcf` syntax. Label sets
/// become action-formula unions, as in `<drive || brake>true`.
pub fn mcf_formula(spec: &Mcrl2Spec, f: &Formula<SemMultiAction>) -> Result<String> {
    let mut out = String::new();
    write_mcf(spec, f, 0, &mut out)?;
    Ok(out)
}

fn mcf_level(f: &Formula<SemMultiAction>) -> u8 {
    match f {
        Formula::Or(..) => 0,
        Formula::And(..) => 1,
        _ => 2,
    }
}

fn write_mcf(spec: &Mcrl2Spec, f: &Formula<SemMultiAction>, min: u8, out: &mut String) -> Result<()> {
    let paren = mcf_level(f) < min;
    if paren {
        out.push('(');
    }
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Not(g) => {
            out.push('!');
            write_mcf(spec, g, 2, out)?;
        }
        Formula::And(l, r) => {
            write_mcf(spec, l, 1, out)?;
            out.push_str(" && ");
            write_mcf(spec, r, 2, out)?;
        }
        Formula::Or(l, r) => {
            write_mcf(spec, l, 0, out)?;
            out.push_str(" || ");
            write_mcf(spec, r, 1, out)?;
        }
        Formula::Diamond(t, g) | Formula::Box(t, g) => {
            let (open, close) = if matches!(f, Formula::Diamond(..)) { ('<', '>') } else { ('[', ']') };
            let labels: Vec<String> = t.iter().map(|m| label_with(spec, m, ", ", "|")).collect();
            out.push(open);
            out.push_str(&labels.join(" || "));
            out.push(close);
            write_mcf(spec, g, 2, out)?;
        }
        Formula::Check(..) | Formula::Set(..) => {
            return Err(Error::Fragment(
                "check and set have no counterpart in mCRL2 modal formulas".into(),
            ))
        }
    }
    if paren {
        out.push(')');
    }
    Ok(())
}
