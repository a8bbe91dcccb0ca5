//! Strong, state-based and stateless bisimilarity by signature refinement.

mod distinguish;

use std::collections::HashMap;

use crate::error::Result;
use crate::hml::{build_state_space, StateSpace};
use crate::lts::Lts;
use crate::sos::{generate_lts_from, ExplorationConfig, GvLts, GvState};
use crate::syntax::{Expr, RecursiveSpec, TransitionLabel};

pub use distinguish::{
    distinguish_strong, distinguishing_formula_state_based, distinguishing_formula_stateless,
};

/// Block assignments per refinement round. `history[0]` is the initial
/// partition and the last entry is stable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refinement {
    pub history: Vec<Vec<usize>>,
}

impl Refinement {
    pub fn blocks(&self) -> &[usize] {
        self.history.last().expect("at least the initial partition")
    }

    pub fn num_blocks(&self) -> usize {
        count_blocks(self.blocks())
    }

    /// Rounds that changed the partition.
    pub fn rounds(&self) -> usize {
        self.history.len() - 1
    }

    /// First round in which `s` and `t` sit in different blocks.
    pub fn split_round(&self, s: usize, t: usize) -> Option<usize> {
        self.history.iter().position(|b| b[s] != b[t])
    }

    pub fn related(&self, s: usize, t: usize) -> bool {
        self.blocks()[s] == self.blocks()[t]
    }

    /// Number of ordered pairs in the induced equivalence.
    pub fn relation_size(&self) -> usize {
        let mut sizes: HashMap<usize, usize> = HashMap::new();
        for &b in self.blocks() {
            *sizes.entry(b).or_default() += 1;
        }
        sizes.values().map(|n| n * n).sum()
    }
}

fn count_blocks(b: &[usize]) -> usize {
    b.iter().max().map_or(0, |m| m + 1)
}

fn normalise(initial: &[usize]) -> Vec<usize> {
    let mut ids = HashMap::new();
    initial
        .iter()
        .map(|&b| {
            let next = ids.len();
            *ids.entry(b).or_insert(next)
        })
        .collect()
}

/// Coarsest partition refining `initial` that is stable under `adj`
/// (`adj[s]` lists `(label, target)`).
pub fn refine(adj: &[Vec<(usize, usize)>], initial: &[usize]) -> Refinement {
    let mut history = vec![normalise(initial)];
    loop {
        let prev = history.last().expect("nonempty");
        let mut ids: HashMap<(usize, Vec<(usize, usize)>), usize> = HashMap::new();
        let next: Vec<usize> = adj
            .iter()
            .enumerate()
            .map(|(s, succ)| {
                let mut sig: Vec<(usize, usize)> =
                    succ.iter().map(|&(l, t)| (l, prev[t])).collect();
                sig.sort_unstable();
                sig.dedup();
                let fresh = ids.len();
                *ids.entry((prev[s], sig)).or_insert(fresh)
            })
            .collect();
        if ids.len() == count_blocks(prev) {
            return Refinement { history };
        }
        history.push(next);
    }
}

#[derive(Debug, Clone)]
pub struct StrongOutcome {
    pub verdict: bool,
    pub refinement: Refinement,
}

pub fn strong_bisim<S, L>(lts: &Lts<S, L>, s: usize, t: usize) -> StrongOutcome {
    let refinement = refine(lts.adjacency(), &vec![0; lts.num_states()]);
    StrongOutcome {
        verdict: refinement.related(s, t),
        refinement,
    }
}

/// Result of a state-based check on the joint reachable LTS of both roots.
#[derive(Debug, Clone)]
pub struct StateBasedOutcome {
    pub verdict: bool,
    pub lts: GvLts,
    pub s: usize,
    pub t: usize,
    pub refinement: Refinement,
}

/// Initial partition that separates states by valuation.
pub fn valuation_partition(lts: &GvLts) -> Vec<usize> {
    let mut ids = HashMap::new();
    lts.states()
        .iter()
        .map(|st| {
            let next = ids.len();
            *ids.entry(st.valuation.clone()).or_insert(next)
        })
        .collect()
}

pub fn state_based_bisim(
    spec: &RecursiveSpec,
    s: &GvState,
    t: &GvState,
    cfg: &ExplorationConfig,
) -> Result<StateBasedOutcome> {
    let (lts, roots) = generate_lts_from(spec, &[s.clone(), t.clone()], cfg)?;
    let refinement = refine(lts.adjacency(), &valuation_partition(&lts));
    Ok(StateBasedOutcome {
        verdict: refinement.related(roots[0], roots[1]),
        s: roots[0],
        t: roots[1],
        lts,
        refinement,
    })
}

/// Expression-level LTS whose labels `(j, λ, j')` record the source and
/// target valuation indices of each grid transition.
pub type ExprLts = Lts<usize, (usize, TransitionLabel, usize)>;

pub fn expression_lts(space: &StateSpace) -> ExprLts {
    let nv = space.num_valuations();
    let mut labels = Vec::new();
    let mut index = HashMap::new();
    let mut transitions = Vec::new();
    for &(s, l, t) in space.lts.transitions() {
        let key = (s % nv, *space.lts.label(l), t % nv);
        let li = *index.entry(key).or_insert_with(|| {
            labels.push(key);
            labels.len() - 1
        });
        transitions.push((s / nv, li, t / nv));
    }
    Lts::from_parts((0..space.exprs.len()).collect(), labels, transitions, 0)
}

#[derive(Debug, Clone)]
pub struct StatelessOutcome {
    pub verdict: bool,
    pub space: StateSpace,
    pub exprs: ExprLts,
    /// Expression indices of the two inputs.
    pub p: usize,
    pub q: usize,
    pub refinement: Refinement,
}

impl StatelessOutcome {
    /// Unordered related expression pairs `(i, j)` with `i <= j`.
    pub fn related_pairs(&self) -> Vec<(usize, usize)> {
        let b = self.refinement.blocks();
        let n = b.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i..n {
                if b[i] == b[j] {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Matching must hold for every valuation, so stateless bisimilarity is
/// strong bisimilarity of the expression LTS whose labels carry the
/// valuation indices.
pub fn stateless_bisim(
    spec: &RecursiveSpec,
    p: &Expr,
    q: &Expr,
    cfg: &ExplorationConfig,
) -> Result<StatelessOutcome> {
    let space = build_state_space(spec, &[p.clone(), q.clone()], cfg)?;
    let exprs = expression_lts(&space);
    let refinement = refine(exprs.adjacency(), &vec![0; exprs.num_states()]);
    let pi = space.expr_index(p).expect("root in closure");
    let qi = space.expr_index(q).expect("root in closure");
    Ok(StatelessOutcome {
        verdict: refinement.related(pi, qi),
        space,
        exprs,
        p: pi,
        q: qi,
        refinement,
    })
}
