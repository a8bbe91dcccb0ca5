use std::fmt::Write;

use super::{InitSpec, ProcessExpr, RecursiveSpec, TransitionLabel};

fn level(e: &ProcessExpr) -> u8 {
    match e {
        ProcessExpr::Choice(..) => 0,
        ProcessExpr::Parallel(..) => 1,
        _ => 2,
    }
}

pub(crate) fn expr_to_string(spec: &RecursiveSpec, e: &ProcessExpr) -> String {
    let mut out = String::new();
    write_expr(spec, e, 0, &mut out);
    out
}

fn write_expr(spec: &RecursiveSpec, e: &ProcessExpr, min: u8, out: &mut String) {
    if level(e) < min {
        out.push('(');
        write_expr(spec, e, 0, out);
        out.push(')');
        return;
    }
    match e {
        ProcessExpr::Deadlock => out.push_str("delta"),
        ProcessExpr::Name(x) => out.push_str(spec.proc_name(*x)),
        ProcessExpr::Prefix(l, b) => {
            match *l {
                TransitionLabel::Action(a) => out.push_str(spec.action_name(a)),
                TransitionLabel::Assign(v, d) => {
                    let _ = write!(out, "assign({}, {})", spec.var_name(v), spec.value_name(d));
                }
            }
            out.push('.');
            write_expr(spec, b, 2, out);
        }
        ProcessExpr::Cond(v, d, b) => {
            let _ = write!(out, "({} = {}) -> ", spec.var_name(*v), spec.value_name(*d));
            write_expr(spec, b, 2, out);
        }
        ProcessExpr::Encap(blocked, b) => {
            let names: Vec<&str> = blocked.iter().map(|&a| spec.action_name(a)).collect();
            let _ = write!(out, "encap({{{}}}) ", names.join(", "));
            write_expr(spec, b, 2, out);
        }
        ProcessExpr::Choice(l, r) => {
            write_expr(spec, l, 0, out);
            out.push_str(" + ");
            write_expr(spec, r, 1, out);
        }
        ProcessExpr::Parallel(l, r) => {
            write_expr(spec, l, 1, out);
            out.push_str(" || ");
            write_expr(spec, r, 2, out);
        }
    }
}

pub(crate) fn spec_to_string(spec: &RecursiveSpec, init: Option<&InitSpec>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "domain {{ {} }}", spec.domain.names().join(", "));
    if !spec.variables.is_empty() {
        let _ = writeln!(out, "vars {{ {} }}", spec.variables.join(", "));
    }
    if !spec.actions.is_empty() {
        let _ = writeln!(out, "acts {{ {} }}", spec.actions.join(", "));
    }
    if !spec.comm.is_empty() {
        let entries: Vec<String> = spec
            .comm
            .entries()
            .map(|(a, b, c)| {
                format!(
                    "{}|{} -> {}",
                    spec.action_name(a),
                    spec.action_name(b),
                    spec.action_name(c)
                )
            })
            .collect();
        let _ = writeln!(out, "comm {{ {} }}", entries.join("; "));
    }
    for x in spec.proc_ids() {
        let _ = writeln!(
            out,
            "proc {} = {}",
            spec.proc_name(x),
            expr_to_string(spec, spec.equation(x))
        );
    }
    if let Some(init) = init {
        let _ = write!(out, "init {}", expr_to_string(spec, &init.root));
        if !spec.variables.is_empty() {
            let _ = write!(out, " with {}", spec.show_valuation(&init.initial));
        }
        out.push('\n');
    }
    out
}
