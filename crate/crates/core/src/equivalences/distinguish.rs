//! Distinguishing formulas read off the refinement history.
//!
//! If `s` and `t` first separate in round `k`, some move `s -λ-> s'` has no
//! counterpart from `t` into the round `k-1` block of `s'`. The formula is
//! `⟨λ⟩` of the conjunction of formulas refuting every `λ`-successor of `t`;
//! recursion stops at round 0, where only a valuation check can separate.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::hml::{Formula, HmlFormula};
use crate::lts::Lts;
use crate::sos::{ExplorationConfig, GvState};
use crate::syntax::{Expr, RecursiveSpec, Valuation};

use super::{refine, state_based_bisim, stateless_bisim, Refinement};

/// The first `(label, successor)` of `s` whose `(label, block)` pair is
/// missing from `t`'s signature in `prev`.
fn unmatched_move(
    adj: &[Vec<(usize, usize)>],
    prev: &[usize],
    s: usize,
    t: usize,
) -> Option<(usize, usize)> {
    let sig_t: BTreeSet<(usize, usize)> = adj[t].iter().map(|&(l, u)| (l, prev[u])).collect();
    adj[s]
        .iter()
        .copied()
        .find(|&(l, s2)| !sig_t.contains(&(l, prev[s2])))
}

struct Synth<'a, L> {
    adj: &'a [Vec<(usize, usize)>],
    labels: &'a [L],
    refinement: &'a Refinement,
    base: &'a dyn Fn(usize, usize) -> Formula<L>,
    memo: HashMap<(usize, usize), Formula<L>>,
}

impl<L: Ord + Clone> Synth<'_, L> {
    /// A formula true at `s` and false at `t`.
    fn dist(&mut self, s: usize, t: usize) -> Formula<L> {
        if let Some(f) = self.memo.get(&(s, t)) {
            return f.clone();
        }
        let k = self
            .refinement
            .split_round(s, t)
            .expect("only called on separated states");
        let f = if k == 0 {
            (self.base)(s, t)
        } else {
            let prev = &self.refinement.history[k - 1];
            if let Some((l, s2)) = unmatched_move(self.adj, prev, s, t) {
                let targets: Vec<usize> = self.adj[t]
                    .iter()
                    .filter(|&&(lt, _)| lt == l)
                    .map(|&(_, u)| u)
                    .collect();
                let refutes: Vec<Formula<L>> = targets.into_iter().map(|u| self.dist(s2, u)).collect();
                Formula::diamond([self.labels[l].clone()], Formula::and_all(refutes))
            } else {
                Formula::not(self.dist(t, s))
            }
        };
        self.memo.insert((s, t), f.clone());
        f
    }
}

/// Pure HML formula separating two states of one LTS, or `None` if they
/// are strongly bisimilar.
pub fn distinguish_strong<S, L: Ord + Clone>(
    lts: &Lts<S, L>,
    s: usize,
    t: usize,
) -> Option<Formula<L>> {
    let refinement = refine(lts.adjacency(), &vec![0; lts.num_states()]);
    refinement.split_round(s, t)?;
    let base = |_: usize, _: usize| -> Formula<L> { unreachable!("one initial block") };
    let mut synth = Synth {
        adj: lts.adjacency(),
        labels: lts.labels(),
        refinement: &refinement,
        base: &base,
        memo: HashMap::new(),
    };
    Some(synth.dist(s, t))
}

/// HML^check formula holding at `s` and failing at `t`.
pub fn distinguishing_formula_state_based(
    spec: &RecursiveSpec,
    s: &GvState,
    t: &GvState,
    cfg: &ExplorationConfig,
) -> Result<HmlFormula> {
    let out = state_based_bisim(spec, s, t, cfg)?;
    if out.verdict {
        return Err(Error::Contract(
            "bisimilar: no distinguishing formula exists".into(),
        ));
    }
    let lts = &out.lts;
    let base = |a: usize, b: usize| -> HmlFormula {
        let (va, vb) = (&lts.state(a).valuation, &lts.state(b).valuation);
        let x = va.first_difference(vb).expect("round 0 splits on valuation");
        Formula::Check(x, va.get(x))
    };
    let mut synth = Synth {
        adj: lts.adjacency(),
        labels: lts.labels(),
        refinement: &out.refinement,
        base: &base,
        memo: HashMap::new(),
    };
    Ok(synth.dist(out.s, out.t))
}

/// HML^check+set formula `φ` and valuation `V` with `⟨p,V⟩ ⊨ φ` and
/// `⟨q,V⟩ ⊭ φ`. With `witness` given, `V` is that valuation.
pub fn distinguishing_formula_stateless(
    spec: &RecursiveSpec,
    p: &Expr,
    q: &Expr,
    witness: Option<&Valuation>,
    cfg: &ExplorationConfig,
) -> Result<(HmlFormula, Valuation)> {
    let out = stateless_bisim(spec, p, q, cfg)?;
    if out.verdict {
        return Err(Error::Contract(
            "bisimilar: no distinguishing formula exists".into(),
        ));
    }
    let mut synth = StatelessSynth {
        adj: out.exprs.adjacency(),
        labels: out.exprs.labels(),
        valuations: &out.space.valuations,
        refinement: &out.refinement,
        memo: HashMap::new(),
    };
    let (f, j) = synth.dist(out.p, out.q);
    let found = out.space.valuations[j].clone();
    match witness {
        Some(w) if *w != found => {
            let sets: Vec<_> = w
                .iter()
                .zip(found.iter())
                .filter(|((_, a), (_, b))| a != b)
                .map(|(_, (x, d))| (x, d))
                .collect();
            let f = sets
                .into_iter()
                .rev()
                .fold(f, |acc, (x, d)| Formula::set(x, d, acc));
            Ok((f, w.clone()))
        }
        _ => Ok((f, found)),
    }
}

type ExprLabel = (usize, crate::syntax::TransitionLabel, usize);

struct StatelessSynth<'a> {
    adj: &'a [Vec<(usize, usize)>],
    labels: &'a [ExprLabel],
    valuations: &'a [Valuation],
    refinement: &'a Refinement,
    memo: HashMap<(usize, usize), (HmlFormula, usize)>,
}

impl StatelessSynth<'_> {
    /// `(φ, j)` with `⟨P,V_j⟩ ⊨ φ` and `⟨Q,V_j⟩ ⊭ φ`.
    fn dist(&mut self, p: usize, q: usize) -> (HmlFormula, usize) {
        if let Some(r) = self.memo.get(&(p, q)) {
            return r.clone();
        }
        let k = self
            .refinement
            .split_round(p, q)
            .expect("only called on separated expressions");
        assert!(k > 0, "stateless refinement starts from a single block");
        let prev = &self.refinement.history[k - 1];
        let r = if let Some((l, p2)) = unmatched_move(self.adj, prev, p, q) {
            let (j, lambda, j2) = self.labels[l];
            let moves: Vec<(usize, usize)> = self.adj[q]
                .iter()
                .filter(|&&(lq, _)| {
                    let (jq, lam_q, _) = self.labels[lq];
                    jq == j && lam_q == lambda
                })
                .map(|&(lq, u)| (u, self.labels[lq].2))
                .collect();
            let mut refutes = Vec::new();
            for (u, ju) in moves {
                if ju != j2 {
                    let (want, got) = (&self.valuations[j2], &self.valuations[ju]);
                    let x = want.first_difference(got).expect("distinct valuations");
                    refutes.push(Formula::Check(x, want.get(x)));
                } else {
                    let (fi, wi) = self.dist(p2, u);
                    refutes.push(Formula::set_all(&self.valuations[wi], fi));
                }
            }
            (Formula::diamond([lambda], Formula::and_all(refutes)), j)
        } else {
            let (f, j) = self.dist(q, p);
            (Formula::not(f), j)
        };
        self.memo.insert((p, q), r.clone());
        r
    }
}
