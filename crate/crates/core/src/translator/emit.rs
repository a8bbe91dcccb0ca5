use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::hml::Formula;
use crate::mcrl2::render::{self, ident};
use crate::mcrl2::{Mcrl2Process, Proc, SemMultiAction, Sort};

use super::Translation;

fn sort_name(s: Sort) -> &'static str {
    match s {
        Sort::D => "D",
        Sort::Bool => "Bool",
        Sort::Var => "Var",
    }
}

fn summands(p: &Proc, out: &mut Vec<Proc>) {
    match &**p {
        Mcrl2Process::Choice(l, r) => {
            summands(l, out);
            summands(r, out);
        }
        _ => out.push(p.clone()),
    }
}

/// The `.mcrl2` text for a translation with initial process `top`.
/// Equations whose body is a choice list one summand per line.
pub fn render_mcrl2(tr: &Translation, top: &Proc) -> String {
    let t = &tr.target;
    let mut out = String::new();
    let values: Vec<String> = t.domain.iter().map(|d| ident(d)).collect();
    let vars: Vec<String> = t.variables.iter().map(|v| ident(v)).collect();
    writeln!(out, "sort D = struct {};", values.join(" | ")).unwrap();
    writeln!(out, "sort Var = struct {};", vars.join(" | ")).unwrap();
    out.push('\n');

    let mut groups: Vec<(Vec<String>, &[Sort])> = Vec::new();
    for a in &t.actions {
        match groups.last_mut() {
            Some((names, sorts)) if *sorts == a.sorts.as_slice() => names.push(ident(&a.name)),
            _ => groups.push((vec![ident(&a.name)], &a.sorts)),
        }
    }
    for (names, sorts) in groups {
        if sorts.is_empty() {
            writeln!(out, "act {};", names.join(", ")).unwrap();
        } else {
            let sig: Vec<&str> = sorts.iter().map(|&s| sort_name(s)).collect();
            writeln!(out, "act {}: {};", names.join(", "), sig.join(" # ")).unwrap();
        }
    }
    out.push('\n');

    for eq in &t.equations {
        let head = if eq.params.is_empty() {
            ident(&eq.name)
        } else {
            let ps: Vec<String> = eq.params.iter().map(|p| format!("{p}: D")).collect();
            format!("{}({})", ident(&eq.name), ps.join(", "))
        };
        let mut parts = Vec::new();
        summands(&eq.body, &mut parts);
        if parts.len() == 1 {
            writeln!(out, "proc {head} = {};", render::process(t, &parts[0])).unwrap();
        } else {
            writeln!(out, "proc {head} =").unwrap();
            for (i, p) in parts.iter().enumerate() {
                let text = render::process(t, &Mcrl2Process::choice(p.clone(), Mcrl2Process::delta()));
                let text = text.strip_suffix(" + delta").expect("rendered choice");
                let lead = if i == 0 { "    " } else { "  + " };
                let end = if i + 1 == parts.len() { ";" } else { "" };
                writeln!(out, "{lead}{text}{end}").unwrap();
            }
        }
    }
    out.push('\n');
    writeln!(out, "init {};", render::process(t, top)).unwrap();
    out
}

/// A translated formula as the contents of a `.mcf` file.
pub fn render_mcf(tr: &Translation, f: &Formula<SemMultiAction>) -> Result<String> {
    Ok(format!("{}\n", render::mcf_formula(&tr.target, f)?))
}

/// Writes `<stem>.mcrl2` and `<stem>_<i>.mcf` (from 1) into `dir` and
/// returns the written paths in that order.
pub fn emit_mcrl2_files(
    tr: &Translation,
    top: &Proc,
    formulas: &[Formula<SemMultiAction>],
    dir: &Path,
    stem: &str,
) -> Result<Vec<PathBuf>> {
    let io = |path: &Path, e: std::io::Error| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut files = vec![(dir.join(format!("{stem}.mcrl2")), render_mcrl2(tr, top))];
    for (i, f) in formulas.iter().enumerate() {
        files.push((dir.join(format!("{stem}_{}.mcf", i + 1)), render_mcf(tr, f)?));
    }
    for (path, text) in &files {
        std::fs::write(path, text).map_err(|e| io(path, e))?;
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}
