//! Explicit labelled transition systems.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write;
use std::hash::Hash;

use crate::error::{ParseError, Pos, ResourceError, Result};

/// An explicit LTS with interned labels.
///
/// Transitions are kept sorted by `(source, label, target)` without
/// duplicates; `outgoing[s]` holds the `(label, target)` pairs of `s` in
/// the same order.
#[derive(Debug, Clone)]
pub struct Lts<S, L> {
    states: Vec<S>,
    labels: Vec<L>,
    transitions: Vec<(usize, usize, usize)>,
    outgoing: Vec<Vec<(usize, usize)>>,
    initial: usize,
}

impl<S, L> Lts<S, L> {
    /// Builds an LTS from raw parts. Transitions refer to indices into
    /// `states` and `labels`; out-of-range indices panic.
    pub fn from_parts(
        states: Vec<S>,
        labels: Vec<L>,
        mut transitions: Vec<(usize, usize, usize)>,
        initial: usize,
    ) -> Self {
        assert!(initial < states.len(), "initial state out of range");
        transitions.sort_unstable();
        transitions.dedup();
        let mut outgoing = vec![Vec::new(); states.len()];
        for &(s, l, t) in &transitions {
            assert!(l < labels.len() && t < states.len(), "transition out of range");
            outgoing[s].push((l, t));
        }
        Lts {
            states,
            labels,
            transitions,
            outgoing,
            initial,
        }
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &S {
        &self.states[i]
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &L {
        &self.labels[i]
    }

    pub fn transitions(&self) -> &[(usize, usize, usize)] {
        &self.transitions
    }

    /// `(label index, target)` pairs leaving `s`.
    pub fn successors(&self, s: usize) -> &[(usize, usize)] {
        &self.outgoing[s]
    }

    pub fn adjacency(&self) -> &[Vec<(usize, usize)>] {
        &self.outgoing
    }

    pub fn with_initial(mut self, initial: usize) -> Self {
        assert!(initial < self.states.len());
        self.initial = initial;
        self
    }

    /// Decomposes into `(states, labels, transitions, initial)`.
    pub fn into_parts(self) -> (Vec<S>, Vec<L>, Vec<(usize, usize, usize)>, usize) {
        (self.states, self.labels, self.transitions, self.initial)
    }

    pub fn map_states<T>(self, f: impl FnMut(S) -> T) -> Lts<T, L> {
        Lts {
            states: self.states.into_iter().map(f).collect(),
            labels: self.labels,
            transitions: self.transitions,
            outgoing: self.outgoing,
            initial: self.initial,
        }
    }

    /// Aldebaran rendering.
    pub fn to_aut(&self, label: impl Fn(&L) -> String) -> String {
        let mut out = format!(
            "des ({},{},{})\n",
            self.initial,
            self.transitions.len(),
            self.states.len()
        );
        for &(s, l, t) in &self.transitions {
            let _ = writeln!(out, "({},\"{}\",{})", s, label(&self.labels[l]), t);
        }
        out
    }

    pub fn to_dot(&self, state: impl Fn(&S) -> String, label: impl Fn(&L) -> String) -> String {
        let mut out = String::from("digraph lts {\n  node [shape=box];\n");
        let _ = writeln!(out, "  init [shape=point];\n  init -> s{};", self.initial);
        for (i, s) in self.states.iter().enumerate() {
            let _ = writeln!(out, "  s{} [label=\"{}\"];", i, escape(&state(s)));
        }
        for &(s, l, t) in &self.transitions {
            let _ = writeln!(
                out,
                "  s{} -> s{} [label=\"{}\"];",
                s,
                t,
                escape(&label(&self.labels[l]))
            );
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

impl<S: Hash + Eq, L> Lts<S, L> {
    pub fn index_of(&self, s: &S) -> Option<usize> {
        self.states.iter().position(|x| x == s)
    }
}

/// Breadth-first exploration from `roots`.
///
/// All roots are numbered first, in the given order (duplicates share an
/// index); discovered states follow in BFS order. Returns the LTS (initial
/// state = first root) and the index of every root.
pub fn explore<S, L, F>(
    roots: &[S],
    max_states: usize,
    max_depth: Option<usize>,
    mut step: F,
) -> Result<(Lts<S, L>, Vec<usize>)>
where
    S: Clone + Hash + Eq,
    L: Clone + Hash + Eq,
    F: FnMut(&S) -> Result<Vec<(L, S)>>,
{
    assert!(!roots.is_empty(), "explore needs at least one root");
    let mut index: HashMap<S, usize> = HashMap::new();
    let mut states: Vec<S> = Vec::new();
    let mut depth: Vec<usize> = Vec::new();
    let mut label_index: HashMap<L, usize> = HashMap::new();
    let mut labels: Vec<L> = Vec::new();
    let mut transitions = Vec::new();
    let mut queue = VecDeque::new();
    let mut root_ids = Vec::with_capacity(roots.len());

    for r in roots {
        let id = *index.entry(r.clone()).or_insert_with(|| {
            states.push(r.clone());
            depth.push(0);
            queue.push_back(states.len() - 1);
            states.len() - 1
        });
        root_ids.push(id);
    }
    if states.len() > max_states {
        return Err(ResourceError::States {
            limit: max_states,
            frontier: queue.len(),
        }
        .into());
    }

    while let Some(s) = queue.pop_front() {
        if max_depth.is_some_and(|d| depth[s] >= d) {
            continue;
        }
        let succ = step(&states[s])?;
        for (l, t) in succ {
            let li = *label_index.entry(l.clone()).or_insert_with(|| {
                labels.push(l);
                labels.len() - 1
            });
            let ti = match index.get(&t) {
                Some(&i) => i,
                None => {
                    if states.len() >= max_states {
                        return Err(ResourceError::States {
                            limit: max_states,
                            frontier: queue.len() + 1,
                        }
                        .into());
                    }
                    states.push(t.clone());
                    depth.push(depth[s] + 1);
                    index.insert(t, states.len() - 1);
                    queue.push_back(states.len() - 1);
                    states.len() - 1
                }
            };
            transitions.push((s, li, ti));
        }
    }
    let initial = root_ids[0];
    Ok((Lts::from_parts(states, labels, transitions, initial), root_ids))
}

/// Parses Aldebaran text into an LTS over plain state numbers.
pub fn parse_aut(text: &str) -> Result<Lts<usize, String>, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (hl, header) = lines
        .next()
        .ok_or_else(|| ParseError::new(Pos { line: 1, col: 1 }, "empty .aut file"))?;
    let at = |line: usize| Pos { line: line + 1, col: 1 };
    let nums = header
        .trim()
        .strip_prefix("des")
        .and_then(|r| r.trim().strip_prefix('('))
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| ParseError::new(at(hl), "expected `des (init,#trans,#states)`"))?;
    let nums: Vec<usize> = nums
        .split(',')
        .map(|n| n.trim().parse())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| ParseError::new(at(hl), "malformed header numbers"))?;
    let [initial, ntrans, nstates] = nums[..] else {
        return Err(ParseError::new(at(hl), "header needs three numbers"));
    };
    if initial >= nstates {
        return Err(ParseError::new(at(hl), "initial state out of range"));
    }
    let mut labels: Vec<String> = Vec::new();
    let mut transitions = Vec::new();
    for (ln, line) in lines {
        let body = line
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| ParseError::new(at(ln), "expected `(src,\"label\",dst)`"))?;
        let first = body
            .find(',')
            .ok_or_else(|| ParseError::new(at(ln), "missing label"))?;
        let last = body
            .rfind(',')
            .filter(|&l| l > first)
            .ok_or_else(|| ParseError::new(at(ln), "missing target"))?;
        let src: usize = body[..first]
            .trim()
            .parse()
            .map_err(|_| ParseError::new(at(ln), "bad source"))?;
        let dst: usize = body[last + 1..]
            .trim()
            .parse()
            .map_err(|_| ParseError::new(at(ln), "bad target"))?;
        let label = body[first + 1..last].trim();
        let label = label
            .strip_prefix('"')
            .and_then(|l| l.strip_suffix('"'))
            .unwrap_or(label)
            .to_string();
        if src >= nstates || dst >= nstates {
            return Err(ParseError::new(at(ln), "state out of range"));
        }
        let li = match labels.iter().position(|l| *l == label) {
            Some(i) => i,
            None => {
                labels.push(label);
                labels.len() - 1
            }
        };
        transitions.push((src, li, dst));
    }
    if transitions.len() != ntrans {
        return Err(ParseError::new(
            at(hl),
            format!(
                "header announces {ntrans} transitions, found {}",
                transitions.len()
            ),
        ));
    }
    Ok(Lts::from_parts(
        (0..nstates).collect(),
        labels,
        transitions,
        initial,
    ))
}

/// Searches for a bijection between the states of `a` and `b` that maps
/// the initial state to the initial state and every transition onto a
/// transition whose label satisfies `label_eq`. Returns `map[a_state]`.
pub fn find_isomorphism<S1, L1, S2, L2>(
    a: &Lts<S1, L1>,
    b: &Lts<S2, L2>,
    label_eq: impl Fn(&L1, &L2) -> bool,
) -> Option<Vec<usize>> {
    let n = a.num_states();
    if n != b.num_states() || a.num_transitions() != b.num_transitions() {
        return None;
    }
    let mut leq = vec![vec![false; b.labels.len()]; a.labels.len()];
    for (i, la) in a.labels.iter().enumerate() {
        for (j, lb) in b.labels.iter().enumerate() {
            leq[i][j] = label_eq(la, lb);
        }
    }
    let degrees = |outgoing: &[Vec<(usize, usize)>]| {
        let mut d = vec![(0usize, 0usize); outgoing.len()];
        for (s, succ) in outgoing.iter().enumerate() {
            d[s].0 = succ.len();
            for &(_, t) in succ {
                d[t].1 += 1;
            }
        }
        d
    };
    let (da, db) = (degrees(&a.outgoing), degrees(&b.outgoing));

    // Visit `a` in BFS order so that most states have a mapped neighbour.
    let mut order = vec![a.initial];
    let mut seen = vec![false; n];
    seen[a.initial] = true;
    let mut i = 0;
    while order.len() < n {
        if i == order.len() {
            let next = (0..n).find(|&s| !seen[s]).expect("unvisited state");
            seen[next] = true;
            order.push(next);
        }
        for &(_, t) in &a.outgoing[order[i]] {
            if !seen[t] {
                seen[t] = true;
                order.push(t);
            }
        }
        i += 1;
    }

    let consistent = |map: &[Option<usize>], s: usize, image: usize| -> bool {
        let matched =
            |lx: usize, y: usize, ty: usize| b.outgoing[y].iter().any(|&(ly, t)| t == ty && leq[lx][ly]);
        for &(l, t) in &a.outgoing[s] {
            if let Some(mt) = map[t] {
                if !matched(l, image, mt) {
                    return false;
                }
            }
        }
        for (p, succ) in a.outgoing.iter().enumerate() {
            if let Some(mp) = map[p] {
                for &(l, t) in succ {
                    if t == s && !matched(l, mp, image) {
                        return false;
                    }
                }
            }
        }
        true
    };

    fn search(
        k: usize,
        order: &[usize],
        map: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        candidates: &dyn Fn(usize) -> Vec<usize>,
        consistent: &dyn Fn(&[Option<usize>], usize, usize) -> bool,
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let s = order[k];
        for c in candidates(s) {
            if used[c] || !consistent(map, s, c) {
                continue;
            }
            map[s] = Some(c);
            used[c] = true;
            if search(k + 1, order, map, used, candidates, consistent) {
                return true;
            }
            map[s] = None;
            used[c] = false;
        }
        false
    }

    let candidates = |s: usize| -> Vec<usize> {
        if s == a.initial {
            return if da[s] == db[b.initial] {
                vec![b.initial]
            } else {
                vec![]
            };
        }
        (0..n).filter(|&c| da[s] == db[c]).collect()
    };
    let mut map = vec![None; n];
    let mut used = vec![false; n];
    if !search(0, &order, &mut map, &mut used, &candidates, &consistent) {
        return None;
    }
    let map: Vec<usize> = map.into_iter().map(|m| m.expect("complete")).collect();
    // Equal transition counts plus every a-edge having an image make the
    // edge correspondence a bijection only if images are distinct.
    let mut images: Vec<(usize, usize, usize)> = Vec::new();
    for &(s, l, t) in &a.transitions {
        let img = b.outgoing[map[s]]
            .iter()
            .filter(|&&(lb, tb)| tb == map[t] && leq[l][lb])
            .map(|&(lb, tb)| (map[s], lb, tb))
            .collect::<Vec<_>>();
        images.extend(img);
    }
    images.sort_unstable();
    images.dedup();
    (images.len() == b.num_transitions()).then_some(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(n: usize) -> Lts<usize, &'static str> {
        let t = (0..n).map(|i| (i, 0, (i + 1) % n)).collect();
        Lts::from_parts((0..n).collect(), vec!["a"], t, 0)
    }

    #[test]
    fn explore_numbers_bfs() {
        let (lts, roots) = explore(&[0u32], 100, None, |&s| {
            Ok(if s < 3 {
                vec![("up", s + 1), ("stay", s)]
            } else {
                vec![]
            })
        })
        .unwrap();
        assert_eq!(roots, vec![0]);
        assert_eq!(lts.num_states(), 4);
        assert_eq!(lts.num_transitions(), 6);
        assert_eq!(lts.states(), &[0, 1, 2, 3]);
    }

    #[test]
    fn explore_reports_state_cap() {
        let err = explore(&[0u64], 10, None, |&s| Ok(vec![((), s + 1)])).unwrap_err();
        assert!(err.is_resource());
    }

    #[test]
    fn explore_respects_depth() {
        let (lts, _) = explore(&[0u64], 100, Some(2), |&s| Ok(vec![((), s + 1)])).unwrap();
        assert_eq!(lts.num_states(), 3);
    }

    #[test]
    fn aut_round_trip() {
        let lts = ring(3);
        let text = lts.to_aut(|l| l.to_string());
        assert!(text.starts_with("des (0,3,3)\n"));
        let back = parse_aut(&text).unwrap();
        assert_eq!(back.num_transitions(), 3);
        assert!(find_isomorphism(&lts, &back, |a, b| a == b).is_some());
    }

    #[test]
    fn aut_rejects_count_mismatch() {
        assert!(parse_aut("des (0,2,2)\n(0,\"a\",1)\n").is_err());
        assert!(parse_aut("des (0,1,1)\n(0,\"a\",3)\n").is_err());
    }

    #[test]
    fn isomorphism_respects_labels_and_shape() {
        let a = ring(4);
        let b = Lts::from_parts(
            vec![0, 1, 2, 3],
            vec!["a"],
            vec![(0, 0, 2), (2, 0, 1), (1, 0, 3), (3, 0, 0)],
            0,
        );
        let m = find_isomorphism(&a, &b, |x, y| x == y).unwrap();
        assert_eq!(m, vec![0, 2, 1, 3]);
        assert!(find_isomorphism(&a, &ring(3), |x, y| x == y).is_none());
        let c = Lts::from_parts(
            vec![0, 1, 2, 3],
            vec!["a", "b"],
            vec![(0, 0, 1), (1, 0, 2), (2, 0, 3), (3, 1, 0)],
            0,
        );
        assert!(find_isomorphism(&a, &c, |x, y| x == y).is_none());
    }
}
