use std::collections::BTreeSet;

use crate::syntax::{RecursiveSpec, TransitionLabel};

use super::{Formula, HmlFormula};

/// Deterministic enumeration of HML^check formulas of modal depth at most
/// `depth` over `labels`, truncated to `cap` formulas. Each depth level gets
/// an equal share of the budget so deep formulas are always represented.
pub fn enumerate_check_formulas(
    spec: &RecursiveSpec,
    labels: &[TransitionLabel],
    depth: usize,
    cap: usize,
) -> Vec<HmlFormula> {
    let share = (cap / (depth + 1)).max(1);
    let mut seen: BTreeSet<HmlFormula> = BTreeSet::new();
    let mut all: Vec<HmlFormula> = Vec::new();
    let mut push = |f: HmlFormula, all: &mut Vec<HmlFormula>, budget: &mut usize| {
        if *budget > 0 && all.len() < cap && seen.insert(f.clone()) {
            all.push(f);
            *budget -= 1;
        }
    };

    let mut budget = share;
    let mut atoms = vec![Formula::True, Formula::False];
    for v in spec.var_ids() {
        for d in spec.domain.ids() {
            atoms.push(Formula::Check(v, d));
        }
    }
    for a in &atoms {
        push(a.clone(), &mut all, &mut budget);
    }
    for a in atoms.iter().skip(2) {
        push(Formula::not(a.clone()), &mut all, &mut budget);
    }
    // Operands for the next level: the newest layer first, then the rest.
    let mut previous: Vec<HmlFormula> = all.clone();

    let mut wide: BTreeSet<TransitionLabel> = labels.iter().copied().collect();
    if wide.len() < 2 {
        wide.clear();
    }
    for _ in 1..=depth {
        let mut budget = share;
        let start = all.len();
        for f in &previous {
            for &l in labels {
                push(Formula::diamond([l], f.clone()), &mut all, &mut budget);
                push(Formula::boxed([l], f.clone()), &mut all, &mut budget);
            }
            if !wide.is_empty() {
                push(Formula::Diamond(wide.clone(), Box::new(f.clone())), &mut all, &mut budget);
            }
        }
        let fresh: Vec<HmlFormula> = all[start..].to_vec();
        for (i, f) in fresh.iter().enumerate() {
            push(Formula::not(f.clone()), &mut all, &mut budget);
            if let Some(g) = fresh.get(i + 1) {
                push(Formula::and(f.clone(), g.clone()), &mut all, &mut budget);
                push(Formula::or(f.clone(), g.clone()), &mut all, &mut budget);
            }
            if let Some(a) = atoms.get(2 + i % atoms.len().saturating_sub(2).max(1)) {
                push(Formula::and(a.clone(), f.clone()), &mut all, &mut budget);
            }
        }
        previous = all[start..].to_vec();
        previous.extend_from_slice(&all[..start]);
    }
    all
}
