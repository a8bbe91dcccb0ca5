use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::lts::{explore, Lts};
use crate::sos::{step_state, ExplorationConfig, GvLts, GvState};
use crate::syntax::{Expr, RecursiveSpec, TransitionLabel, Valuation, ValueId, VarId};

use super::Formula;

/// Membership vector indexed by state.
pub type StateSet = Vec<bool>;

/// What a formula may observe about a state.
pub trait Model {
    type Label: Ord;

    fn num_states(&self) -> usize;
    fn labels(&self) -> &[Self::Label];
    /// `(label index, target)` pairs.
    fn successors(&self, s: usize) -> &[(usize, usize)];
    /// `None` when states carry no valuation.
    fn check(&self, s: usize, v: VarId, d: ValueId) -> Option<bool>;
    /// The state reached by overwriting `v` with `d`, if the model has it.
    fn set(&self, s: usize, v: VarId, d: ValueId) -> Option<usize>;
}

/// State payloads that may expose a valuation.
pub trait StatePayload: Sized {
    fn check(&self, v: VarId, d: ValueId) -> Option<bool>;
    fn with_value(&self, v: VarId, d: ValueId) -> Option<Self>;
}

impl StatePayload for GvState {
    fn check(&self, v: VarId, d: ValueId) -> Option<bool> {
        Some(self.valuation.get(v) == d)
    }

    fn with_value(&self, v: VarId, d: ValueId) -> Option<Self> {
        Some(GvState::new(self.expr.clone(), self.valuation.with(v, d)))
    }
}

impl StatePayload for usize {
    fn check(&self, _: VarId, _: ValueId) -> Option<bool> {
        None
    }

    fn with_value(&self, _: VarId, _: ValueId) -> Option<Self> {
        None
    }
}

impl<S: StatePayload + Hash + Eq, L: Ord> Model for Lts<S, L> {
    type Label = L;

    fn num_states(&self) -> usize {
        Lts::num_states(self)
    }

    fn labels(&self) -> &[L] {
        Lts::labels(self)
    }

    fn successors(&self, s: usize) -> &[(usize, usize)] {
        Lts::successors(self, s)
    }

    fn check(&self, s: usize, v: VarId, d: ValueId) -> Option<bool> {
        self.state(s).check(v, d)
    }

    fn set(&self, s: usize, v: VarId, d: ValueId) -> Option<usize> {
        let target = self.state(s).with_value(v, d)?;
        self.index_of(&target)
    }
}

/// The grid `exprs × 𝒱`, closed under transitions and valuation rewrites.
/// State `e * |𝒱| + j` is `⟨exprs[e], valuations[j]⟩`.
#[derive(Debug, Clone)]
pub struct StateSpace {
    pub lts: GvLts,
    pub exprs: Vec<Expr>,
    pub valuations: Vec<Valuation>,
    domain_size: usize,
    expr_index: HashMap<Expr, usize>,
}

impl StateSpace {
    pub fn num_valuations(&self) -> usize {
        self.valuations.len()
    }

    pub fn expr_index(&self, e: &Expr) -> Option<usize> {
        self.expr_index.get(e).copied()
    }

    pub fn valuation_index(&self, v: &Valuation) -> usize {
        v.values()
            .iter()
            .fold(0, |acc, d| acc * self.domain_size + d.index())
    }

    pub fn state_of(&self, e: &Expr, v: &Valuation) -> Option<usize> {
        Some(self.expr_index(e)? * self.valuations.len() + self.valuation_index(v))
    }

    pub fn state(&self, s: usize) -> &GvState {
        self.lts.state(s)
    }
}

impl Model for StateSpace {
    type Label = TransitionLabel;

    fn num_states(&self) -> usize {
        self.lts.num_states()
    }

    fn labels(&self) -> &[TransitionLabel] {
        self.lts.labels()
    }

    fn successors(&self, s: usize) -> &[(usize, usize)] {
        self.lts.successors(s)
    }

    fn check(&self, s: usize, v: VarId, d: ValueId) -> Option<bool> {
        Some(self.lts.state(s).valuation.get(v) == d)
    }

    fn set(&self, s: usize, v: VarId, d: ValueId) -> Option<usize> {
        let nv = self.valuations.len();
        let (e, j) = (s / nv, s % nv);
        let target = self.valuations[j].with(v, d);
        Some(e * nv + self.valuation_index(&target))
    }
}

pub fn build_state_space(
    spec: &RecursiveSpec,
    roots: &[Expr],
    cfg: &ExplorationConfig,
) -> Result<StateSpace> {
    let exprs = crate::sos::reachable_exprs(spec, roots, cfg)?;
    let valuations = spec.enumerate_valuations(cfg.max_valuations)?;
    let grid: Vec<GvState> = exprs
        .iter()
        .flat_map(|e| valuations.iter().map(move |v| GvState::new(e.clone(), v.clone())))
        .collect();
    let cfg_grid = ExplorationConfig {
        max_states: cfg.max_states.max(grid.len()),
        max_depth: None,
        ..*cfg
    };
    let (lts, ids) = explore(&grid, cfg_grid.max_states, None, |s| {
        step_state(spec, s, &cfg_grid)
    })?;
    debug_assert!(ids.iter().enumerate().all(|(i, &id)| i == id));
    debug_assert_eq!(lts.num_states(), grid.len());
    let expr_index = exprs.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
    Ok(StateSpace {
        lts,
        exprs,
        valuations,
        domain_size: spec.domain.len(),
        expr_index,
    })
}

/// `⟦φ⟧` over `model`, bottom-up with one memo entry per distinct
/// subformula.
pub fn eval<M: Model>(model: &M, f: &Formula<M::Label>) -> Result<StateSet>
where
    M::Label: Clone,
{
    let mut memo = BTreeMap::new();
    eval_memo(model, f, &mut memo)
}

fn eval_memo<'f, M: Model>(
    model: &M,
    f: &'f Formula<M::Label>,
    memo: &mut BTreeMap<&'f Formula<M::Label>, StateSet>,
) -> Result<StateSet>
where
    M::Label: Clone,
{
    if let Some(s) = memo.get(f) {
        return Ok(s.clone());
    }
    let n = model.num_states();
    let out = match f {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Check(v, d) => (0..n)
            .map(|s| {
                model
                    .check(s, *v, *d)
                    .ok_or_else(|| Error::Fragment("check needs states with valuations".into()))
            })
            .collect::<Result<_>>()?,
        Formula::Not(g) => eval_memo(model, g, memo)?.into_iter().map(|b| !b).collect(),
        Formula::And(l, r) => {
            let a = eval_memo(model, l, memo)?;
            let b = eval_memo(model, r, memo)?;
            a.into_iter().zip(b).map(|(x, y)| x && y).collect()
        }
        Formula::Or(l, r) => {
            let a = eval_memo(model, l, memo)?;
            let b = eval_memo(model, r, memo)?;
            a.into_iter().zip(b).map(|(x, y)| x || y).collect()
        }
        Formula::Diamond(t, g) | Formula::Box(t, g) => {
            let inner = eval_memo(model, g, memo)?;
            let in_t: Vec<bool> = model.labels().iter().map(|l| t.contains(l)).collect();
            let diamond = matches!(f, Formula::Diamond(..));
            (0..n)
                .map(|s| {
                    let mut moves = model.successors(s).iter().filter(|&&(l, _)| in_t[l]);
                    if diamond {
                        moves.any(|&(_, u)| inner[u])
                    } else {
                        moves.all(|&(_, u)| inner[u])
                    }
                })
                .collect()
        }
        Formula::Set(v, d, g) => {
            let inner = eval_memo(model, g, memo)?;
            (0..n)
                .map(|s| {
                    model.set(s, *v, *d).map(|u| inner[u]).ok_or_else(|| {
                        Error::Fragment(
                            "set leaves the explored state space; evaluate on a StateSpace grid"
                                .into(),
                        )
                    })
                })
                .collect::<Result<_>>()?
        }
    };
    memo.insert(f, out.clone());
    Ok(out)
}

pub fn satisfies<M: Model>(model: &M, state: usize, f: &Formula<M::Label>) -> Result<bool>
where
    M::Label: Clone,
{
    if state >= model.num_states() {
        return Err(Error::Contract(format!(
            "state {state} is outside a model with {} states",
            model.num_states()
        )));
    }
    Ok(eval(model, f)?[state])
}
