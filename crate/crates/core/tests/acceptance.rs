//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p gvpa-core --test acceptance`.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use gvpa::corpus::{random_guarded_case, random_parseq_case, CorpusParams, GuardedCase, ParSeqCase};
use gvpa::hml::{enumerate_check_formulas, Fragment};
use gvpa::mcrl2::render::canonical_label;
use gvpa::{
    apply_comm, build_state_space, check_bisim_preservation, distinguish_strong,
    distinguishing_formula_state_based, distinguishing_formula_stateless, emit_mcrl2_files, eval,
    find_isomorphism, generate_lts_from, parse_aut, parse_expr, parse_formula, satisfies,
    state_based_bisim, stateless_bisim, strong_bisim, translate, translate_formula,
    ActionLabel, CommRule, DataValue, ExplorationConfig, Expr, Formula, GvState, MultiSet,
    Pipeline, ProcessExpr, SemMultiAction, ValueId,
};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use common::*;

const GUARDED_CASES: usize = 200;
const PARSEQ_CASES: usize = 100;
const PARSEQ_MAX_STATES: usize = 200;
const PRESERVATION_PAIRS: usize = 100;
const HML_GRIDS: usize = 25;
const HML_FORMULAS_PER_GRID: usize = 20;
const HML_MAX_GRID: usize = 200;
const COMM_SAMPLES: usize = 1000;
const FORMULA_DEPTH: usize = 3;
const FORMULA_CAP: usize = 2000;
/// Formulas per fragment when confirming a bisimilar verdict.
const BISIM_FORMULA_CAP: usize = 1000;
const ORACLE_MAX_STATES: usize = 30;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn cfg() -> ExplorationConfig {
    ExplorationConfig::default()
}

fn guarded_corpus(seed: u64) -> Vec<GuardedCase> {
    let mut rng = StdRng::seed_from_u64(seed);
    let params = CorpusParams::default();
    (0..GUARDED_CASES).map(|_| random_guarded_case(&mut rng, &params)).collect()
}

fn parseq_corpus() -> Vec<ParSeqCase> {
    let mut rng = StdRng::seed_from_u64(0x7e57);
    let params = CorpusParams::default();
    (0..PARSEQ_CASES)
        .map(|_| random_parseq_case(&mut rng, &params, 1, PARSEQ_MAX_STATES))
        .collect()
}

fn c1_traffic_light() -> Outcome {
    let (spec, root, v) = load_model("traffic.gvpa");
    let (lts, _) = generate_lts_from(&spec, &[GvState::new(root, v)], &cfg()).map_err(err)?;
    ensure(lts.num_states() == 6 && lts.num_transitions() == 9, || {
        format!("{} states, {} transitions", lts.num_states(), lts.num_transitions())
    })?;
    let text = std::fs::read_to_string(golden_dir().join("traffic_figure.aut")).map_err(err)?;
    let figure = parse_aut(&text).map_err(err)?;
    let rename = |fig: &str| match fig {
        "change_red" => "assign(t,red)".to_string(),
        "change_green" => "assign(t,green)".to_string(),
        other => other.to_string(),
    };
    let iso = find_isomorphism(&lts, &figure, |l, f| spec.show_label(l) == rename(f));
    ensure(iso.is_some(), || "not isomorphic to the figure".into())?;
    Ok("6 states, 9 transitions, isomorphic".into())
}

fn c2_congruence() -> Outcome {
    let (spec, _, v) = load_model("congruence.gvpa");
    let e = |s: &str| parse_expr(&spec, s).unwrap();
    let strong = |p: &str, q: &str| {
        let (lts, ids) =
            generate_lts_from(&spec, &[GvState::new(e(p), v.clone()), GvState::new(e(q), v.clone())], &cfg())
                .unwrap();
        strong_bisim(&lts, ids[0], ids[1]).verdict
    };
    let pq = strong("P", "Q");
    let par = strong("P || R", "Q || R");
    let sl = stateless_bisim(&spec, &e("P"), &e("Q"), &cfg()).map_err(err)?.verdict;
    ensure(pq && !par && !sl, || format!("got {pq}, {par}, {sl}"))?;
    Ok("P~Q, P||R !~ Q||R, P !~sl Q".into())
}

/// Whether `f` separates or identifies two states of one evaluated model.
fn same_everywhere(sets: &[Vec<bool>], pairs: &[(usize, usize)]) -> bool {
    sets.iter().all(|set| pairs.iter().all(|&(a, b)| set[a] == set[b]))
}

fn c3_distinguishing_formulas() -> Outcome {
    let mut refuted = [0usize; 3];
    let mut confirmed = [0usize; 3];
    for (i, c) in guarded_corpus(3).into_iter().enumerate() {
        let fail = |what: &str| format!("case {i} ({what}):\n{}", c.spec.to_source(None));
        let s = GvState::new(c.p.clone(), c.valuation.clone());
        let t = GvState::new(c.q.clone(), c.valuation.clone());

        // Strong bisimilarity over the joint LTS, plain HML.
        let (lts, ids) = generate_lts_from(&c.spec, &[s.clone(), t.clone()], &cfg()).map_err(err)?;
        let out = strong_bisim(&lts, ids[0], ids[1]);
        if out.verdict {
            let fs = enumerate_fragment(&c.spec, out.refinement.rounds(), false, false, BISIM_FORMULA_CAP);
            let sets: Vec<Vec<bool>> = fs.iter().map(|f| eval(&lts, f).unwrap()).collect();
            ensure(same_everywhere(&sets, &[(ids[0], ids[1])]), || fail("strong enumeration"))?;
            confirmed[0] += 1;
        } else {
            let f = distinguish_strong(&lts, ids[0], ids[1]).ok_or_else(|| fail("strong synthesis"))?;
            ensure(f.fragment() == Fragment::Hml, || fail("strong fragment"))?;
            let ok = satisfies(&lts, ids[0], &f).map_err(err)? && !satisfies(&lts, ids[1], &f).map_err(err)?;
            ensure(ok, || fail("strong split"))?;
            refuted[0] += 1;
        }

        // State-based bisimilarity, HML with checks.
        let out = state_based_bisim(&c.spec, &s, &t, &cfg()).map_err(err)?;
        if out.verdict {
            let fs = enumerate_fragment(&c.spec, out.refinement.rounds(), true, false, BISIM_FORMULA_CAP);
            let sets: Vec<Vec<bool>> = fs.iter().map(|f| eval(&out.lts, f).unwrap()).collect();
            ensure(same_everywhere(&sets, &[(out.s, out.t)]), || fail("state-based enumeration"))?;
            confirmed[1] += 1;
        } else {
            let f = distinguishing_formula_state_based(&c.spec, &s, &t, &cfg()).map_err(err)?;
            ensure(matches!(f.fragment(), Fragment::Hml | Fragment::Check), || fail("state-based fragment"))?;
            let ok = satisfies(&out.lts, out.s, &f).map_err(err)?
                && !satisfies(&out.lts, out.t, &f).map_err(err)?;
            ensure(ok, || fail("state-based split"))?;
            refuted[1] += 1;
        }

        // Stateless bisimilarity, HML with checks and sets, every valuation.
        let out = stateless_bisim(&c.spec, &c.p, &c.q, &cfg()).map_err(err)?;
        let sp = &out.space;
        if out.verdict {
            let fs = enumerate_fragment(&c.spec, out.refinement.rounds(), true, true, BISIM_FORMULA_CAP);
            let pairs: Vec<(usize, usize)> = sp
                .valuations
                .iter()
                .map(|v| (sp.state_of(&c.p, v).unwrap(), sp.state_of(&c.q, v).unwrap()))
                .collect();
            let sets: Vec<Vec<bool>> = fs.iter().map(|f| eval(sp, f).unwrap()).collect();
            ensure(same_everywhere(&sets, &pairs), || fail("stateless enumeration"))?;
            confirmed[2] += 1;
        } else {
            let (f, w) = distinguishing_formula_stateless(&c.spec, &c.p, &c.q, None, &cfg()).map_err(err)?;
            let set = eval(sp, &f).map_err(err)?;
            let ok = set[sp.state_of(&c.p, &w).unwrap()] && !set[sp.state_of(&c.q, &w).unwrap()];
            ensure(ok, || fail("stateless split"))?;
            refuted[2] += 1;
        }
    }
    Ok(format!(
        "{GUARDED_CASES} cases; refuted/confirmed strong {}/{}, state-based {}/{}, stateless {}/{}",
        refuted[0], confirmed[0], refuted[1], confirmed[1], refuted[2], confirmed[2]
    ))
}

fn c4_hierarchy() -> Outcome {
    let mut implications = 0;
    for (i, c) in guarded_corpus(3).into_iter().enumerate() {
        if !stateless_bisim(&c.spec, &c.p, &c.q, &cfg()).map_err(err)?.verdict {
            continue;
        }
        for v in c.spec.enumerate_valuations(cfg().max_valuations).map_err(err)? {
            let s = GvState::new(c.p.clone(), v.clone());
            let t = GvState::new(c.q.clone(), v.clone());
            let sb = state_based_bisim(&c.spec, &s, &t, &cfg()).map_err(err)?.verdict;
            ensure(sb, || format!("case {i}: stateless but not state-based at {}", c.spec.show_valuation(&v)))?;
            implications += 1;
        }
    }
    ensure(implications > 0, || "corpus has no stateless-bisimilar pair".into())?;
    Ok(format!("{implications} valuation instances checked"))
}

fn c5_hml_laws() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let params = CorpusParams::default();
    let mut grids = 0;
    let mut formulas = 0;
    while grids < HML_GRIDS {
        let c = random_guarded_case(&mut rng, &params);
        let sp = build_state_space(&c.spec, &[c.p.clone(), c.q.clone()], &cfg()).map_err(err)?;
        let n = sp.lts.num_states();
        if n > HML_MAX_GRID {
            continue;
        }
        grids += 1;
        for _ in 0..HML_FORMULAS_PER_GRID {
            formulas += 1;
            let f = random_formula(&mut rng, &c.spec, 3, true);
            let shown = c.spec.show_formula(&f);
            let sem = eval(&sp, &f).map_err(err)?;
            for (s, &b) in sem.iter().enumerate() {
                ensure(naive_sat(&sp, s, &f) == b, || format!("evaluator disagrees with oracle on {shown}"))?;
            }
            let neg = eval(&sp, &Formula::not(f.clone())).map_err(err)?;
            ensure(neg.iter().zip(&sem).all(|(a, b)| a != b), || format!("negation law fails for {shown}"))?;

            let labels: BTreeSet<_> = c.spec.all_labels().into_iter().filter(|_| rng.gen_bool(0.5)).collect();
            let dia = eval(&sp, &Formula::Diamond(labels.clone(), Box::new(f.clone()))).map_err(err)?;
            let dual = Formula::not(Formula::Box(labels, Box::new(Formula::not(f.clone()))));
            ensure(dia == eval(&sp, &dual).map_err(err)?, || format!("modal duality fails for {shown}"))?;

            let v = gvpa::VarId(rng.gen_range(0..c.spec.variables.len()) as u32);
            let d = ValueId(rng.gen_range(0..c.spec.domain.len()) as u32);
            let e = ValueId(rng.gen_range(0..c.spec.domain.len()) as u32);
            let twice = Formula::set(v, d, Formula::set(v, e, f.clone()));
            let once = Formula::set(v, e, f.clone());
            ensure(eval(&sp, &twice).map_err(err)? == eval(&sp, &once).map_err(err)?, || {
                format!("set overwrite fails for {shown}")
            })?;
            let chk = eval(&sp, &Formula::set(v, d, Formula::Check(v, e))).map_err(err)?;
            ensure(chk.iter().all(|&b| b == (d == e)), || "set/check law fails".into())?;
        }
    }
    Ok(format!("{grids} grids, {formulas} formulas"))
}

fn label(name: &str, arg: Option<u32>) -> ActionLabel {
    ActionLabel::new(name, arg.map(|a| DataValue::Elem(ValueId(a))).into_iter().collect())
}

fn c6_multiset_comm() -> Outcome {
    let rules = [CommRule::new(&["a", "b"], "c")];
    let mut m = MultiSet::new();
    m.insert(label("a", None), 2);
    m.insert(label("b", None), 3);
    let mut want = MultiSet::new();
    want.insert(label("b", None), 1);
    want.insert(label("c", None), 2);
    let got = apply_comm(&rules, &m);
    ensure(got == want, || format!("worked example gave {got:?}"))?;

    let mut rng = StdRng::seed_from_u64(6);
    let names = ["a", "b", "c", "e", "f", "g", "h"];
    for i in 0..COMM_SAMPLES {
        // Disjoint handshakes: fresh left-hand names, results outside every left-hand side.
        let mut pool = names.to_vec();
        pool.shuffle(&mut rng);
        let k = rng.gen_range(1..=2);
        let mut rules: Vec<CommRule> = (0..k)
            .map(|j| CommRule::new(&[pool[2 * j], pool[2 * j + 1]], pool[2 * k + j % (pool.len() - 2 * k)]))
            .collect();
        let mut m: SemMultiAction = MultiSet::new();
        for _ in 0..rng.gen_range(0..8) {
            let arg = if rng.gen_bool(0.5) { None } else { Some(rng.gen_range(0..2)) };
            m.insert(label(names[rng.gen_range(0..names.len())], arg), 1);
        }
        let greedy = apply_comm(&rules, &m);
        let all = brute_comm(&rules, &m);
        ensure(all.len() == 1 && all.contains(&greedy), || format!("sample {i}: {m:?} -> {all:?}, greedy {greedy:?}"))?;
        rules.reverse();
        ensure(apply_comm(&rules, &m) == greedy, || format!("sample {i}: rule order matters"))?;
    }
    Ok(format!("worked example exact, {COMM_SAMPLES} samples agree"))
}

fn mutants_detected(p: &Pipeline) -> Result<usize, String> {
    let (states, labels, trans, init) = p.m.clone().into_parts();
    let is_value = |l: usize| labels[l].iter().any(|(a, _)| &*a.name == "value");
    let mut checked = 0;
    let mut expect = |condition: u8, trans: Vec<(usize, usize, usize)>, labels: Vec<SemMultiAction>| {
        let m = gvpa::Lts::from_parts(states.clone(), labels, trans, init);
        match gvpa::verify_variable_consistency(&p.translation, &p.gv, &m, &p.ell) {
            Err(v) if v.condition == condition => {
                checked += 1;
                Ok(())
            }
            other => Err(format!("mutant for condition {condition} gave {other:?}")),
        }
    };

    // Deleted value loop.
    let pos = trans.iter().position(|&(_, l, _)| is_value(l)).ok_or("no value loop")?;
    let mut t = trans.clone();
    t.remove(pos);
    expect(2, t, labels.clone())?;

    if let Some(pos) = trans.iter().position(|&(_, l, _)| !is_value(l)) {
        // Relabelled to an action outside the translated alphabet.
        let mut ls = labels.clone();
        ls.push(MultiSet::singleton(ActionLabel::new("foreign", vec![])));
        let mut t = trans.clone();
        t[pos].1 = ls.len() - 1;
        expect(1, t, ls)?;

        // Redirected to another state.
        if states.len() > 1 {
            let mut t = trans.clone();
            t[pos].2 = (t[pos].2 + 1) % states.len();
            expect(3, t, labels.clone())?;
        }
    }
    Ok(checked)
}

fn c7_variable_consistency() -> Outcome {
    let (spec, root, v) = load_model("traffic.gvpa");
    let p = Pipeline::build_auto(&spec, &root, &v, &cfg()).map_err(err)?;
    p.verify().map_err(|e| format!("traffic: {e}"))?;
    let mut mutants = mutants_detected(&p)?;
    for (i, c) in parseq_corpus().into_iter().enumerate() {
        let p = Pipeline::build_auto(&c.spec, &c.root, &c.valuation, &cfg()).map_err(err)?;
        p.verify().map_err(|e| format!("case {i}: {e}\n{}", c.spec.to_source(None)))?;
        mutants += mutants_detected(&p).map_err(|e| format!("case {i}: {e}"))?;
    }
    Ok(format!("traffic + {PARSEQ_CASES} specs consistent, {mutants} mutants detected"))
}

fn c8_formula_preservation() -> Outcome {
    let mut total = 0;
    for (i, c) in parseq_corpus().into_iter().enumerate() {
        let p = Pipeline::build_auto(&c.spec, &c.root, &c.valuation, &cfg()).map_err(err)?;
        let formulas = enumerate_check_formulas(&c.spec, &c.spec.all_labels(), FORMULA_DEPTH, FORMULA_CAP);
        for f in &formulas {
            let source = eval(&p.gv, f).map_err(err)?[p.gv.initial()];
            let theta = translate_formula(&c.spec, f).map_err(err)?;
            let translated = eval(&p.m, &theta).map_err(err)?[p.m.initial()];
            ensure(source == translated, || format!("case {i}: {} disagrees", c.spec.show_formula(f)))?;
        }
        total += formulas.len();
    }
    Ok(format!("{total} formula checks agree"))
}

/// The body of a root with its parallel components reversed.
fn commuted(e: &Expr) -> Expr {
    match &**e {
        ProcessExpr::Encap(b, body) => ProcessExpr::encap((**b).clone(), commuted(body)),
        ProcessExpr::Parallel(l, r) => ProcessExpr::par(commuted(r), commuted(l)),
        _ => e.clone(),
    }
}

fn c9_bisimilarity_preservation() -> Outcome {
    let mut rng = StdRng::seed_from_u64(9);
    let mut agree = [0usize; 2];
    for i in 0..PRESERVATION_PAIRS {
        let c = random_parseq_case(&mut rng, &CorpusParams::default(), 1, PARSEQ_MAX_STATES);
        let q = if rng.gen_bool(0.5) { commuted(&c.root) } else { c.root.clone() };
        let v2 = if rng.gen_bool(0.5) {
            c.valuation.clone()
        } else {
            gvpa::corpus::random_valuation(&mut rng, &c.spec)
        };
        let r = check_bisim_preservation(&c.spec, &c.root, &q, &c.valuation, &v2, &cfg()).map_err(err)?;
        ensure(r.agree(), || format!("pair {i}: {r:?}\n{}", c.spec.to_source(None)))?;
        agree[r.source as usize] += 1;
    }
    Ok(format!("{PRESERVATION_PAIRS} pairs agree ({} bisimilar, {} not)", agree[1], agree[0]))
}

fn source_width(e: &Expr) -> usize {
    match &**e {
        ProcessExpr::Encap(_, body) => source_width(body),
        ProcessExpr::Parallel(l, r) => source_width(l) + source_width(r),
        _ => 1,
    }
}

fn c10_structure() -> Outcome {
    let mut cases = parseq_corpus();
    let (spec, root, valuation) = load_model("traffic.gvpa");
    cases.push(ParSeqCase { spec, root, valuation });
    for (i, c) in cases.iter().enumerate() {
        let p = Pipeline::build_auto(&c.spec, &c.root, &c.valuation, &cfg()).map_err(err)?;
        let (n, vars) = (p.gv.num_states(), c.spec.variables.len());
        ensure(p.m.num_states() == n, || format!("case {i}: {} vs {n} states", p.m.num_states()))?;
        ensure(p.m.num_transitions() == p.gv.num_transitions() + n * vars, || {
            format!("case {i}: {} vs {} + {n}", p.m.num_transitions(), p.gv.num_transitions())
        })?;
        let (_, top) = translate(&c.spec, &c.root, &c.valuation).map_err(err)?;
        ensure(top.parallel_width() == source_width(&c.root) + 1, || format!("case {i}: width"))?;
    }
    Ok(format!("{} specs: counts and widths exact", cases.len()))
}

fn c11_oracles() -> Outcome {
    let mut compared = [0usize; 3];
    for (i, c) in guarded_corpus(11).into_iter().enumerate() {
        let s = GvState::new(c.p.clone(), c.valuation.clone());
        let t = GvState::new(c.q.clone(), c.valuation.clone());
        let (lts, _) = generate_lts_from(&c.spec, &[s.clone(), t.clone()], &cfg()).map_err(err)?;
        let n = lts.num_states();
        if n <= ORACLE_MAX_STATES {
            let strong = strong_bisim(&lts, 0, 0).refinement;
            let naive = naive_bisim(&lts, |_, _| true);
            let sb = state_based_bisim(&c.spec, &s, &t, &cfg()).map_err(err)?;
            let naive_sb = naive_bisim(&sb.lts, |a, b| sb.lts.state(a).valuation == sb.lts.state(b).valuation);
            for a in 0..n {
                for b in 0..n {
                    ensure(strong.related(a, b) == naive[a][b], || format!("case {i}: strong ({a},{b})"))?;
                    ensure(sb.refinement.related(a, b) == naive_sb[a][b], || {
                        format!("case {i}: state-based ({a},{b})")
                    })?;
                }
            }
            compared[0] += 1;
            compared[1] += 1;
        }
        let out = stateless_bisim(&c.spec, &c.p, &c.q, &cfg()).map_err(err)?;
        let k = out.space.exprs.len();
        if k <= ORACLE_MAX_STATES {
            let naive = naive_stateless(&c.spec, &out.space.exprs, &out.space.valuations, &cfg());
            for a in 0..k {
                for b in 0..k {
                    ensure(out.refinement.related(a, b) == naive[a][b], || format!("case {i}: stateless ({a},{b})"))?;
                }
            }
            compared[2] += 1;
        }
    }
    Ok(format!(
        "strong {} LTSs, state-based {}, stateless {} closures",
        compared[0], compared[1], compared[2]
    ))
}

fn c12_golden_files() -> Outcome {
    let (spec, root, v) = load_model("traffic.gvpa");
    let (tr, top) = translate(&spec, &root, &v).map_err(err)?;
    let formulas = ["(t = green)", "<drive> true", "[assign(t, red)] (t = red)"]
        .iter()
        .map(|s| translate_formula(&spec, &parse_formula(&spec, s).unwrap()))
        .collect::<gvpa::Result<Vec<_>>>()
        .map_err(err)?;
    let dir = std::env::temp_dir().join(format!("gvpa-acceptance-{}", std::process::id()));
    let files = emit_mcrl2_files(&tr, &top, &formulas, &dir, "traffic").map_err(err)?;
    for f in &files {
        let text = std::fs::read_to_string(f).map_err(err)?;
        check_golden(&f.file_name().unwrap().to_string_lossy(), &text)?;
    }
    std::fs::remove_dir_all(&dir).map_err(err)?;
    let m = gvpa::generate_lts_mcrl2(&tr.target, &top, &cfg()).map_err(err)?;
    let aut = m.to_aut(|l| canonical_label(&tr.target, l));
    check_golden("traffic_translated.aut", &aut)?;
    Ok(format!("{} emitted files and the translated .aut match", files.len()))
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "traffic-light reproduction", limit: Some(Duration::from_secs(1)), run: c1_traffic_light },
        Criterion { id: 2, name: "congruence counterexample", limit: Some(Duration::from_secs(1)), run: c2_congruence },
        Criterion { id: 3, name: "distinguishing-formula soundness", limit: Some(Duration::from_secs(60)), run: c3_distinguishing_formulas },
        Criterion { id: 4, name: "hierarchy", limit: None, run: c4_hierarchy },
        Criterion { id: 5, name: "HML laws", limit: Some(Duration::from_secs(10)), run: c5_hml_laws },
        Criterion { id: 6, name: "multiset communication", limit: None, run: c6_multiset_comm },
        Criterion { id: 7, name: "variable consistency", limit: Some(Duration::from_secs(60)), run: c7_variable_consistency },
        Criterion { id: 8, name: "formula preservation", limit: None, run: c8_formula_preservation },
        Criterion { id: 9, name: "bisimilarity preservation", limit: None, run: c9_bisimilarity_preservation },
        Criterion { id: 10, name: "structure preservation", limit: None, run: c10_structure },
        Criterion { id: 11, name: "brute-force oracles", limit: None, run: c11_oracles },
        Criterion { id: 12, name: "golden mCRL2 files", limit: None, run: c12_golden_files },
    ];
    let only: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for c in criteria.iter().filter(|c| only.map_or(true, |o| o == c.id)) {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run))
            .unwrap_or_else(|p| Err(format!("panicked: {}", panic_text(&p))));
        let elapsed = start.elapsed();
        let result = match (result, c.limit) {
            (Ok(_), Some(limit)) if elapsed > limit => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
            (r, _) => r,
        };
        match result {
            Ok(detail) => println!("criterion {}: PASS {} ({detail}; {elapsed:.2?})", c.id, c.name),
            Err(e) => {
                failed += 1;
                println!("criterion {}: FAIL {} ({e})", c.id, c.name);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

fn panic_text(p: &Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<String>()
        .cloned()
        .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_default()
}
