use std::collections::BTreeSet;

use crate::error::{Error, Result, Violation};

use super::{ActionId, CommFunction, ProcessExpr, RecursiveSpec};

/// Checks name membership and the handshake property of `comm`.
pub fn validate_comm(comm: &CommFunction, num_actions: usize) -> Result<()> {
    let mut out = Vec::new();
    let in_range = |a: ActionId| a.index() < num_actions;
    let mut operands = BTreeSet::new();
    for (a, b, c) in comm.entries() {
        let entry = format!("comm entry act#{}|act#{}->act#{}", a.0, b.0, c.0);
        if !(in_range(a) && in_range(b) && in_range(c)) {
            out.push(Violation {
                location: entry,
                message: "refers to an undeclared action".into(),
            });
            continue;
        }
        operands.insert(a);
        operands.insert(b);
    }
    for (a, b, c) in comm.entries() {
        if operands.contains(&c) {
            out.push(Violation {
                location: format!("comm entry act#{}|act#{}->act#{}", a.0, b.0, c.0),
                message: format!(
                    "handshake violated: result act#{} communicates again",
                    c.0
                ),
            });
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(out))
    }
}

/// Every process-name occurrence in every equation body must sit beneath
/// an action or assignment prefix. Conditions do not guard.
pub fn validate_guardedness(spec: &RecursiveSpec) -> Result<()> {
    let mut out = Vec::new();
    for x in spec.proc_ids() {
        let mut path = Vec::new();
        unguarded(spec.equation(x), &mut path, &mut |p, y| {
            out.push(Violation {
                location: format!("proc {}: {}", spec.proc_name(x), show_path(p)),
                message: format!("unguarded occurrence of `{}`", spec.proc_name(y)),
            })
        });
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(out))
    }
}

fn show_path(p: &[&str]) -> String {
    if p.is_empty() {
        "body".into()
    } else {
        p.join(".")
    }
}

fn unguarded<'a>(
    e: &ProcessExpr,
    path: &mut Vec<&'a str>,
    report: &mut dyn FnMut(&[&'a str], super::ProcId),
) {
    match e {
        ProcessExpr::Prefix(..) | ProcessExpr::Deadlock => {}
        ProcessExpr::Name(y) => report(path, *y),
        ProcessExpr::Choice(l, r) => {
            path.push("sum.left");
            unguarded(l, path, report);
            path.pop();
            path.push("sum.right");
            unguarded(r, path, report);
            path.pop();
        }
        ProcessExpr::Parallel(l, r) => {
            path.push("par.left");
            unguarded(l, path, report);
            path.pop();
            path.push("par.right");
            unguarded(r, path, report);
            path.pop();
        }
        ProcessExpr::Encap(_, b) => {
            path.push("encap");
            unguarded(b, path, report);
            path.pop();
        }
        ProcessExpr::Cond(_, _, b) => {
            path.push("cond");
            unguarded(b, path, report);
            path.pop();
        }
    }
}
