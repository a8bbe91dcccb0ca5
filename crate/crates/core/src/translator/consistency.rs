use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::equivalences::{state_based_bisim, strong_bisim};
use crate::error::{Error, Result};
use crate::hml::{satisfies, HmlFormula};
use crate::mcrl2::{generate_lts_mcrl2, generate_lts_mcrl2_from, render, Mcrl2Lts, Proc};
use crate::sos::{generate_lts_from, ExplorationConfig, GvLts, GvState};
use crate::syntax::{Expr, RecursiveSpec, Valuation};

use super::{translate_formula, Translation, VariableMode};

/// The first violated condition of variable consistency, with a witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConsistencyViolation {
    pub condition: u8,
    pub state: Option<String>,
    pub transition: Option<String>,
    pub message: String,
}

impl fmt::Display for ConsistencyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition {} violated: {}", self.condition, self.message)?;
        if let Some(s) = &self.state {
            write!(f, "; state {s}")?;
        }
        if let Some(t) = &self.transition {
            write!(f, "; transition {t}")?;
        }
        Ok(())
    }
}

/// `ℓ` as indices: entry `i` is the translated-LTS state of source state
/// `i`, or `None` when `Ψ` of that state was not reached.
pub fn consistency_map(tr: &Translation, gv: &GvLts, m: &Mcrl2Lts) -> Result<Vec<Option<usize>>> {
    let index: HashMap<&Proc, usize> = m.states().iter().enumerate().map(|(i, p)| (p, i)).collect();
    gv.states()
        .iter()
        .map(|s| Ok(index.get(&tr.ell(&s.expr, &s.valuation)?).copied()))
        .collect()
}

fn show_gv(tr: &Translation, gv: &GvLts, s: usize) -> String {
    format!("#{s} {}", gv.state(s).show(&tr.source))
}

/// Checks the three conditions of variable consistency between a source
/// LTS and a translated LTS related by `ell`:
/// 1. every translated label is a transition label or a `value` label;
/// 2. `ℓ(s)` has a `value(v, d)` step iff `V(v) = d`, and all such steps
///    are self-loops;
/// 3. `s -λ-> s′` iff `ℓ(s) -λ-> ℓ(s′)`, for every transition label λ.
pub fn verify_variable_consistency(
    tr: &Translation,
    gv: &GvLts,
    m: &Mcrl2Lts,
    ell: &[Option<usize>],
) -> std::result::Result<(), ConsistencyViolation> {
    let label_text = |l: usize| render::canonical_label(&tr.target, m.label(l));
    let admitted = tr.admitted_labels();
    for &(s, l, t) in m.transitions() {
        if !admitted.contains(m.label(l)) {
            return Err(ConsistencyViolation {
                condition: 1,
                state: Some(format!("#{s}")),
                transition: Some(format!("(#{s}, {}, #{t})", label_text(l))),
                message: "translated label is neither a transition label nor a value label".into(),
            });
        }
    }

    let is_value = |l: usize| m.label(l).iter().any(|(a, _)| &*a.name == "value");
    for (s, st) in gv.states().iter().enumerate() {
        let Some(ms) = ell[s] else { continue };
        for &(l, u) in m.successors(ms) {
            if is_value(l) && u != ms {
                return Err(ConsistencyViolation {
                    condition: 2,
                    state: Some(show_gv(tr, gv, s)),
                    transition: Some(format!("(#{ms}, {}, #{u})", label_text(l))),
                    message: "value transition is not a self-loop".into(),
                });
            }
        }
        for v in tr.source.var_ids() {
            for d in tr.source.domain.ids() {
                let want = st.valuation.get(v) == d;
                let label = tr.value_label(v, d);
                let has = m.successors(ms).iter().any(|&(l, _)| *m.label(l) == label);
                if has != want {
                    let which = format!(
                        "value({},{})",
                        tr.source.var_name(v),
                        tr.source.value_name(d)
                    );
                    return Err(ConsistencyViolation {
                        condition: 2,
                        state: Some(show_gv(tr, gv, s)),
                        transition: None,
                        message: if want {
                            format!("missing {which} self-loop")
                        } else {
                            format!("unexpected {which} transition")
                        },
                    });
                }
            }
        }
    }

    let m_edges: HashSet<(usize, &_, usize)> =
        m.transitions().iter().map(|&(s, l, t)| (s, m.label(l), t)).collect();
    for (s, _) in gv.states().iter().enumerate() {
        let Some(ms) = ell[s] else {
            return Err(ConsistencyViolation {
                condition: 3,
                state: Some(show_gv(tr, gv, s)),
                transition: None,
                message: "the translated LTS has no state for this source state".into(),
            });
        };
        let mut expected = HashSet::new();
        for &(l, t) in gv.successors(s) {
            let label = tr.label(gv.label(l));
            let Some(mt) = ell[t] else {
                return Err(ConsistencyViolation {
                    condition: 3,
                    state: Some(show_gv(tr, gv, t)),
                    transition: None,
                    message: "the translated LTS has no state for this source state".into(),
                });
            };
            if !m_edges.contains(&(ms, &label, mt)) {
                return Err(ConsistencyViolation {
                    condition: 3,
                    state: Some(show_gv(tr, gv, s)),
                    transition: Some(format!(
                        "(#{s}, {}, #{t})",
                        tr.source.show_label(gv.label(l))
                    )),
                    message: "source transition has no translated counterpart".into(),
                });
            }
            expected.insert((label, mt));
        }
        for &(l, u) in m.successors(ms) {
            if is_value(l) {
                continue;
            }
            if !expected.contains(&(m.label(l).clone(), u)) {
                return Err(ConsistencyViolation {
                    condition: 3,
                    state: Some(show_gv(tr, gv, s)),
                    transition: Some(format!("(#{ms}, {}, #{u})", label_text(l))),
                    message: "translated transition has no source counterpart".into(),
                });
            }
        }
    }
    Ok(())
}

fn default_mode(spec: &RecursiveSpec) -> VariableMode {
    if spec.variables.len() == 1 {
        VariableMode::Single
    } else {
        VariableMode::Multi
    }
}

/// Both LTSs of one translation run together with `ℓ`.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub translation: Translation,
    pub initial: Valuation,
    pub gv: GvLts,
    pub m: Mcrl2Lts,
    pub ell: Vec<Option<usize>>,
}

impl Pipeline {
    pub fn build(
        spec: &RecursiveSpec,
        root: &Expr,
        v: &Valuation,
        mode: VariableMode,
        cfg: &ExplorationConfig,
    ) -> Result<Self> {
        let translation = Translation::new(spec, root, mode)?;
        let start = GvState::new(translation.input.root(), v.clone());
        let (gv, _) = generate_lts_from(spec, &[start], cfg)?;
        let m = generate_lts_mcrl2(&translation.target, &translation.top(v)?, cfg)?;
        let ell = consistency_map(&translation, &gv, &m)?;
        Ok(Pipeline {
            translation,
            initial: v.clone(),
            gv,
            m,
            ell,
        })
    }

    /// Single-variable mode when the spec has one variable, otherwise the
    /// multi-variable extension.
    pub fn build_auto(spec: &RecursiveSpec, root: &Expr, v: &Valuation, cfg: &ExplorationConfig) -> Result<Self> {
        Self::build(spec, root, v, default_mode(spec), cfg)
    }

    pub fn verify(&self) -> std::result::Result<(), ConsistencyViolation> {
        verify_variable_consistency(&self.translation, &self.gv, &self.m, &self.ell)
    }

    /// `φ` at the source root against `θ(φ)` at the translated root.
    pub fn check_formula(&self, f: &HmlFormula) -> Result<FormulaPreservationReport> {
        let theta = translate_formula(&self.translation.source, f)?;
        Ok(FormulaPreservationReport {
            source: satisfies(&self.gv, self.gv.initial(), f)?,
            translated: satisfies(&self.m, self.m.initial(), &theta)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FormulaPreservationReport {
    pub source: bool,
    pub translated: bool,
}

impl FormulaPreservationReport {
    pub fn agree(&self) -> bool {
        self.source == self.translated
    }
}

/// Evaluates `φ` at `⟨root, V⟩` and `θ(φ)` at `Ψ(P, V)`.
pub fn check_formula_preservation(
    spec: &RecursiveSpec,
    root: &Expr,
    v: &Valuation,
    f: &HmlFormula,
    cfg: &ExplorationConfig,
) -> Result<FormulaPreservationReport> {
    Pipeline::build_auto(spec, root, v, cfg)?.check_formula(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BisimPreservationReport {
    /// State-based bisimilarity of the source states.
    pub source: bool,
    /// Strong bisimilarity of the translations.
    pub translated: bool,
}

impl BisimPreservationReport {
    pub fn agree(&self) -> bool {
        self.source == self.translated
    }
}

/// Compares `⟨p, V1⟩ ∼sb ⟨q, V2⟩` with `Ψ(p, V1) ∼ Ψ(q, V2)`. Both roots
/// must carry the same encapsulation.
pub fn check_bisim_preservation(
    spec: &RecursiveSpec,
    p: &Expr,
    q: &Expr,
    v1: &Valuation,
    v2: &Valuation,
    cfg: &ExplorationConfig,
) -> Result<BisimPreservationReport> {
    let mode = default_mode(spec);
    let tp = Translation::new(spec, p, mode)?;
    let tq = Translation::new(spec, q, mode)?;
    if tp.input.blocked != tq.input.blocked || tp.input.encapsulated != tq.input.encapsulated {
        return Err(Error::Contract(
            "both processes must be encapsulated with the same set".into(),
        ));
    }
    let s = GvState::new(tp.input.root(), v1.clone());
    let t = GvState::new(tq.input.root(), v2.clone());
    let source = state_based_bisim(spec, &s, &t, cfg)?.verdict;
    let roots = [tp.top(v1)?, tp.psi(&tq.input.body, v2)?];
    let (m, ids) = generate_lts_mcrl2_from(&tp.target, &roots, cfg)?;
    let translated = strong_bisim(&m, ids[0], ids[1]).verdict;
    Ok(BisimPreservationReport { source, translated })
}
