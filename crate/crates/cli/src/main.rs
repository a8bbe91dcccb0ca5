//! `gvpa`: batch front end for specs with global variables.
//!
//! Exit codes: 0 success or verdict true, 1 verdict false, 2 input error,
//! 3 resource cap exceeded.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gvpa::hml::{enumerate_check_formulas, Fragment};
use gvpa::mcrl2::render::canonical_label;
use gvpa::sos::{lts_to_aut, lts_to_dot};
use gvpa::{
    build_state_space, check_bisim_preservation, distinguish_strong, distinguishing_formula_state_based,
    distinguishing_formula_stateless, emit_mcrl2_files, eval, generate_lts_from, parse_expr,
    parse_formula, parse_spec, parse_valuation, satisfies, state_based_bisim, stateless_bisim,
    strong_bisim, translate_formula, Error, ExplorationConfig, Expr, GvState, HmlFormula,
    InitSpec, Pipeline, RecursiveSpec, Valuation,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "gvpa", version, about = "Process algebra with global variables")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true, default_value_t = 100_000)]
    max_states: usize,
    #[arg(long, global = true, default_value_t = 4096)]
    max_valuations: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and check a spec.
    Validate { file: PathBuf },
    /// Generate the reachable LTS of the init state.
    Lts {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "aut")]
        format: LtsFormat,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        state: StateArgs,
    },
    /// Decide bisimilarity of two processes.
    Bisim(PairArgs),
    /// Evaluate formulas at the init state.
    Modelcheck {
        file: PathBuf,
        #[command(flatten)]
        formulas: FormulaArgs,
        #[command(flatten)]
        state: StateArgs,
    },
    /// Emit the mCRL2 translation of the init state.
    Translate {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// HML^check formulas, one per line, emitted as .mcf files.
        #[arg(long)]
        formulas: Option<PathBuf>,
        /// Also write both LTSs as .aut files.
        #[arg(long)]
        aut: bool,
    },
    /// Check variable consistency, formula preservation and bisimilarity
    /// preservation for the init state.
    VerifyTranslation {
        file: PathBuf,
        /// Formulas to check; defaults to an enumeration up to depth 2.
        #[arg(long)]
        formulas: Option<PathBuf>,
    },
    /// Synthesize a formula that separates two processes.
    Distinguish(PairArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum LtsFormat {
    Aut,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Strong,
    StateBased,
    Stateless,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Strong => "strong",
            Mode::StateBased => "state-based",
            Mode::Stateless => "stateless",
        }
    }
}

#[derive(Args)]
struct StateArgs {
    /// Root expression replacing the init process.
    #[arg(long)]
    root: Option<String>,
    /// Valuation replacing the init valuation, e.g. "t = red".
    #[arg(long)]
    valuation: Option<String>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct FormulaArgs {
    #[arg(long)]
    formula: Option<String>,
    /// One formula per line; blank lines and `#` comments are skipped.
    #[arg(long)]
    formula_file: Option<PathBuf>,
}

#[derive(Args)]
struct PairArgs {
    file: PathBuf,
    #[arg(long, value_enum)]
    mode: Mode,
    /// Process name or expression.
    #[arg(long)]
    left: String,
    #[arg(long)]
    right: String,
    /// Valuation of both sides (left side only with --right-valuation).
    #[arg(long)]
    valuation: Option<String>,
    #[arg(long)]
    right_valuation: Option<String>,
}

struct Report {
    code: u8,
    text: String,
    json: Value,
}

impl Report {
    fn new(code: u8, text: impl Into<String>, json: Value) -> Self {
        Report {
            code,
            text: text.into(),
            json,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = ExplorationConfig {
        max_states: cli.max_states,
        max_valuations: cli.max_valuations,
        ..ExplorationConfig::default()
    };
    let report = run(&cli.command, &cfg).unwrap_or_else(|e| {
        let (code, kind) = match &e {
            Error::Resource(_) => (3, "resource"),
            Error::Contract(m) if m.starts_with("bisimilar") => (1, "bisimilar"),
            _ => (2, "input"),
        };
        Report::new(code, format!("error: {e}"), json!({ "error": e.to_string(), "kind": kind }))
    });
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&report.json).expect("serializable"));
    } else if report.code >= 2 || report.text.starts_with("error:") {
        eprintln!("{}", report.text);
    } else {
        print!("{}", report.text);
        if !report.text.ends_with('\n') {
            println!();
        }
    }
    ExitCode::from(report.code)
}

fn read(path: &Path) -> gvpa::Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn load(path: &Path) -> gvpa::Result<(RecursiveSpec, Option<InitSpec>)> {
    parse_spec(&read(path)?)
}

fn need_init(init: Option<InitSpec>) -> gvpa::Result<InitSpec> {
    init.ok_or_else(|| Error::Contract("the spec has no `init` line".into()))
}

/// The init state with any command-line overrides applied.
fn start_state(spec: &RecursiveSpec, init: Option<InitSpec>, args: &StateArgs) -> gvpa::Result<GvState> {
    let root = args.root.as_deref().map(|r| parse_expr(spec, r)).transpose()?;
    let valuation = args.valuation.as_deref().map(|v| parse_valuation(spec, v)).transpose()?;
    match (root, valuation) {
        (Some(r), Some(v)) => Ok(GvState::new(r, v)),
        (r, v) => {
            let init = need_init(init)?;
            Ok(GvState::new(r.unwrap_or(init.root), v.unwrap_or(init.initial)))
        }
    }
}

fn formula_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

fn read_formulas(spec: &RecursiveSpec, path: &Path) -> gvpa::Result<Vec<HmlFormula>> {
    formula_lines(&read(path)?)
        .map(|l| parse_formula(spec, l))
        .collect()
}

fn verdict(b: bool) -> u8 {
    if b {
        0
    } else {
        1
    }
}

fn run(cmd: &Command, cfg: &ExplorationConfig) -> gvpa::Result<Report> {
    match cmd {
        Command::Validate { file } => validate(file),
        Command::Lts {
            file,
            format,
            out,
            state,
        } => lts(file, *format, out.as_deref(), state, cfg),
        Command::Bisim(args) => bisim(args, cfg),
        Command::Modelcheck {
            file,
            formulas,
            state,
        } => modelcheck(file, formulas, state, cfg),
        Command::Translate {
            file,
            out,
            formulas,
            aut,
        } => translate(file, out, formulas.as_deref(), *aut, cfg),
        Command::VerifyTranslation { file, formulas } => verify_translation(file, formulas.as_deref(), cfg),
        Command::Distinguish(args) => distinguish(args, cfg),
    }
}

fn validate(file: &Path) -> gvpa::Result<Report> {
    let (spec, init) = load(file)?;
    let text = format!(
        "ok: {} values, {} variables, {} actions, {} processes{}",
        spec.domain.len(),
        spec.variables.len(),
        spec.actions.len(),
        spec.processes.len(),
        if init.is_some() { ", init" } else { "" }
    );
    Ok(Report::new(
        0,
        text,
        json!({
            "valid": true,
            "values": spec.domain.len(),
            "variables": spec.variables.len(),
            "actions": spec.actions.len(),
            "processes": spec.processes.len(),
            "init": init.is_some(),
        }),
    ))
}

fn lts(
    file: &Path,
    format: LtsFormat,
    out: Option<&Path>,
    state: &StateArgs,
    cfg: &ExplorationConfig,
) -> gvpa::Result<Report> {
    let (spec, init) = load(file)?;
    let start = start_state(&spec, init, state)?;
    let (lts, _) = generate_lts_from(&spec, &[start], cfg)?;
    let body = match format {
        LtsFormat::Aut => lts_to_aut(&spec, &lts),
        LtsFormat::Dot => lts_to_dot(&spec, &lts),
    };
    let summary = json!({
        "states": lts.num_states(),
        "transitions": lts.num_transitions(),
        "initial": lts.initial(),
    });
    let text = match out {
        Some(path) => {
            std::fs::write(path, &body).map_err(|e| Error::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            format!(
                "wrote {} ({} states, {} transitions)",
                path.display(),
                lts.num_states(),
                lts.num_transitions()
            )
        }
        None => body,
    };
    Ok(Report::new(0, text, summary))
}

struct Pair {
    spec: RecursiveSpec,
    left: Expr,
    right: Expr,
    v1: Option<Valuation>,
    v2: Option<Valuation>,
}

impl Pair {
    fn load(args: &PairArgs) -> gvpa::Result<Pair> {
        let (spec, init) = load(&args.file)?;
        let left = parse_expr(&spec, &args.left)?;
        let right = parse_expr(&spec, &args.right)?;
        let v1 = match &args.valuation {
            Some(v) => Some(parse_valuation(&spec, v)?),
            None => init.map(|i| i.initial),
        };
        let v2 = match &args.right_valuation {
            Some(v) => Some(parse_valuation(&spec, v)?),
            None => v1.clone(),
        };
        Ok(Pair {
            spec,
            left,
            right,
            v1,
            v2,
        })
    }

    fn states(&self) -> gvpa::Result<(GvState, GvState)> {
        let missing = || Error::Contract("this mode needs --valuation or an `init` line".into());
        let v1 = self.v1.clone().ok_or_else(missing)?;
        let v2 = self.v2.clone().ok_or_else(missing)?;
        Ok((GvState::new(self.left.clone(), v1), GvState::new(self.right.clone(), v2)))
    }
}

fn bisim(args: &PairArgs, cfg: &ExplorationConfig) -> gvpa::Result<Report> {
    let pair = Pair::load(args)?;
    let (verdict_, rounds, states) = match args.mode {
        Mode::Strong => {
            let (s, t) = pair.states()?;
            let (lts, ids) = generate_lts_from(&pair.spec, &[s, t], cfg)?;
            let out = strong_bisim(&lts, ids[0], ids[1]);
            (out.verdict, out.refinement.rounds(), lts.num_states())
        }
        Mode::StateBased => {
            let (s, t) = pair.states()?;
            let out = state_based_bisim(&pair.spec, &s, &t, cfg)?;
            (out.verdict, out.refinement.rounds(), out.lts.num_states())
        }
        Mode::Stateless => {
            let out = stateless_bisim(&pair.spec, &pair.left, &pair.right, cfg)?;
            (out.verdict, out.refinement.rounds(), out.space.lts.num_states())
        }
    };
    let word = if verdict_ { "bisimilar" } else { "not bisimilar" };
    Ok(Report::new(
        verdict(verdict_),
        format!("{word} ({})", args.mode.name()),
        json!({
            "mode": args.mode.name(),
            "bisimilar": verdict_,
            "rounds": rounds,
            "states": states,
        }),
    ))
}

fn modelcheck(
    file: &Path,
    formulas: &FormulaArgs,
    state: &StateArgs,
    cfg: &ExplorationConfig,
) -> gvpa::Result<Report> {
    let (spec, init) = load(file)?;
    let texts: Vec<String> = match (&formulas.formula, &formulas.formula_file) {
        (Some(f), _) => vec![f.clone()],
        (None, Some(path)) => formula_lines(&read(path)?).map(str::to_string).collect(),
        (None, None) => unreachable!("clap requires one formula source"),
    };
    let parsed = texts
        .iter()
        .map(|t| parse_formula(&spec, t))
        .collect::<gvpa::Result<Vec<_>>>()?;
    let start = start_state(&spec, init, state)?;
    // `set` may jump to states that are not reachable, so those formulas
    // are evaluated on the full grid.
    let needs_grid = parsed
        .iter()
        .any(|f| matches!(f.fragment(), Fragment::Set | Fragment::CheckSet));
    let results: Vec<bool> = if needs_grid {
        let space = build_state_space(&spec, std::slice::from_ref(&start.expr), cfg)?;
        let s = space.state_of(&start.expr, &start.valuation).expect("root in grid");
        parsed
            .iter()
            .map(|f| Ok(eval(&space, f)?[s]))
            .collect::<gvpa::Result<_>>()?
    } else {
        let (lts, ids) = generate_lts_from(&spec, &[start], cfg)?;
        parsed
            .iter()
            .map(|f| satisfies(&lts, ids[0], f))
            .collect::<gvpa::Result<_>>()?
    };
    let all = results.iter().all(|&b| b);
    let text = if results.len() == 1 {
        results[0].to_string()
    } else {
        texts
            .iter()
            .zip(&results)
            .map(|(t, r)| format!("{r}\t{t}\n"))
            .collect()
    };
    let items: Vec<Value> = texts
        .iter()
        .zip(&results)
        .map(|(t, r)| json!({ "formula": t, "holds": r }))
        .collect();
    Ok(Report::new(verdict(all), text, json!({ "results": items, "all": all })))
}

fn stem(file: &Path) -> String {
    file.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "spec".into())
}

fn translate(
    file: &Path,
    out: &Path,
    formulas: Option<&Path>,
    aut: bool,
    cfg: &ExplorationConfig,
) -> gvpa::Result<Report> {
    let (spec, init) = load(file)?;
    let init = need_init(init)?;
    let source = match formulas {
        Some(path) => read_formulas(&spec, path)?,
        None => Vec::new(),
    };
    let theta = source
        .iter()
        .map(|f| translate_formula(&spec, f))
        .collect::<gvpa::Result<Vec<_>>>()?;
    let pipeline = Pipeline::build_auto(&spec, &init.root, &init.initial, cfg)?;
    let top = pipeline.translation.top(&init.initial)?;
    let name = stem(file);
    let mut files = emit_mcrl2_files(&pipeline.translation, &top, &theta, out, &name)?;
    if aut {
        let target = &pipeline.translation.target;
        for (path, text) in [
            (out.join(format!("{name}_source.aut")), lts_to_aut(&spec, &pipeline.gv)),
            (
                out.join(format!("{name}_mcrl2.aut")),
                pipeline.m.to_aut(|l| canonical_label(target, l)),
            ),
        ] {
            std::fs::write(&path, text).map_err(|e| Error::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            files.push(path);
        }
    }
    let names: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
    Ok(Report::new(
        0,
        names.iter().map(|n| format!("wrote {n}\n")).collect::<String>(),
        json!({ "files": names }),
    ))
}

fn verify_translation(file: &Path, formulas: Option<&Path>, cfg: &ExplorationConfig) -> gvpa::Result<Report> {
    let (spec, init) = load(file)?;
    let init = need_init(init)?;
    let pipeline = Pipeline::build_auto(&spec, &init.root, &init.initial, cfg)?;
    let mut text = String::new();
    let mut ok = true;

    let consistency = pipeline.verify();
    match &consistency {
        Ok(()) => text.push_str(&format!(
            "variable consistency: ok ({} states, {} + {} transitions)\n",
            pipeline.gv.num_states(),
            pipeline.gv.num_transitions(),
            pipeline.m.num_transitions().saturating_sub(pipeline.gv.num_transitions()),
        )),
        Err(v) => {
            ok = false;
            text.push_str(&format!("variable consistency: FAILED, {v}\n"));
        }
    }

    let fs = match formulas {
        Some(path) => read_formulas(&spec, path)?,
        None => enumerate_check_formulas(&spec, &spec.all_labels(), 2, 200),
    };
    let mut formula_items = Vec::new();
    let mut disagreements = 0;
    for f in &fs {
        let r = pipeline.check_formula(f)?;
        if !r.agree() {
            disagreements += 1;
            text.push_str(&format!("formula disagrees: {}\n", spec.show_formula(f)));
        }
        formula_items.push(json!({
            "formula": spec.show_formula(f),
            "source": r.source,
            "translated": r.translated,
        }));
    }
    ok &= disagreements == 0;
    text.push_str(&format!(
        "formula preservation: {}/{} agree\n",
        fs.len() - disagreements,
        fs.len()
    ));

    let mut pair_items = Vec::new();
    let mut pair_disagreements = 0;
    let valuations = spec.enumerate_valuations(cfg.max_valuations)?;
    for v2 in &valuations {
        let r = check_bisim_preservation(&spec, &init.root, &init.root, &init.initial, v2, cfg)?;
        if !r.agree() {
            pair_disagreements += 1;
        }
        pair_items.push(json!({
            "valuation": spec.show_valuation(v2),
            "source": r.source,
            "translated": r.translated,
        }));
    }
    ok &= pair_disagreements == 0;
    text.push_str(&format!(
        "bisimilarity preservation: {}/{} valuations agree\n",
        valuations.len() - pair_disagreements,
        valuations.len()
    ));

    Ok(Report::new(
        verdict(ok),
        text,
        json!({
            "ok": ok,
            "consistency": consistency.err(),
            "formulas": formula_items,
            "bisimilarity_preservation": pair_items,
        }),
    ))
}

fn distinguish(args: &PairArgs, cfg: &ExplorationConfig) -> gvpa::Result<Report> {
    let pair = Pair::load(args)?;
    let spec = &pair.spec;
    let (formula, witness) = match args.mode {
        Mode::Strong => {
            let (s, t) = pair.states()?;
            let (lts, ids) = generate_lts_from(spec, &[s.clone(), t], cfg)?;
            let f = distinguish_strong(&lts, ids[0], ids[1]).ok_or_else(|| {
                Error::Contract("bisimilar: no distinguishing formula exists".into())
            })?;
            (f, s.valuation)
        }
        Mode::StateBased => {
            let (s, t) = pair.states()?;
            let f = distinguishing_formula_state_based(spec, &s, &t, cfg)?;
            (f, s.valuation)
        }
        Mode::Stateless => {
            distinguishing_formula_stateless(spec, &pair.left, &pair.right, args.valuation.as_ref().and(pair.v1.as_ref()), cfg)?
        }
    };
    let shown = spec.show_formula(&formula);
    let w = spec.show_valuation(&witness);
    Ok(Report::new(
        0,
        format!("{shown}\nwitness valuation: {w}\n"),
        json!({
            "mode": args.mode.name(),
            "formula": shown,
            "fragment": formula.fragment().name(),
            "witness": w,
        }),
    ))
}
