use std::collections::BTreeSet;

use crate::error::{Error, ParseError, Pos, Result};
use crate::lex::{Cursor, Tok};

use super::{
    validate_comm, validate_guardedness, ActionId, CommFunction, DomainDef, Expr, InitSpec,
    ProcessExpr, RecursiveSpec, TransitionLabel, Valuation, ValueId, VarId,
};

const KEYWORDS: &[&str] = &[
    "domain", "vars", "acts", "comm", "proc", "init", "with", "encap", "delta", "assign",
];

#[derive(Debug, Clone, Copy)]
pub struct ParseOptions {
    /// Reject specs whose recursion is unguarded. Turning this off is only
    /// useful to study divergent specs such as `A = a.delta || A`.
    pub check_guardedness: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            check_guardedness: true,
        }
    }
}

pub fn parse_spec(text: &str) -> Result<(RecursiveSpec, Option<InitSpec>)> {
    parse_spec_with(text, ParseOptions::default())
}

pub fn parse_spec_with(
    text: &str,
    opts: ParseOptions,
) -> Result<(RecursiveSpec, Option<InitSpec>)> {
    let mut p = SpecParser::new(text)?;
    let (spec, init) = p.spec()?;
    let mut violations = Vec::new();
    if let Err(Error::Validation(vs)) = validate_comm(&spec.comm, spec.actions.len()) {
        violations.extend(vs);
    }
    if opts.check_guardedness {
        if let Err(Error::Validation(vs)) = validate_guardedness(&spec) {
            violations.extend(vs);
        }
    }
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }
    Ok((spec, init))
}

/// Parses a standalone process expression against an existing spec.
pub fn parse_expr(spec: &RecursiveSpec, text: &str) -> Result<Expr> {
    let mut p = SpecParser::new(text)?;
    p.spec = spec.clone();
    let e = p.expr()?;
    if p.cur.peek() != &Tok::Eof {
        return Err(p.cur.unexpected(&["end of expression"]).into());
    }
    Ok(e)
}

/// Parses `x = v, y = w` (braces optional) into a total valuation.
pub fn parse_valuation(spec: &RecursiveSpec, text: &str) -> Result<Valuation> {
    let mut p = SpecParser::new(text)?;
    p.spec = spec.clone();
    let braced = p.cur.eat(&Tok::LBrace);
    let v = p.valuation_body(braced)?;
    if braced {
        p.cur.expect(Tok::RBrace)?;
    }
    if p.cur.peek() != &Tok::Eof {
        return Err(p.cur.unexpected(&["end of valuation"]).into());
    }
    Ok(v)
}

struct SpecParser {
    cur: Cursor,
    spec: RecursiveSpec,
    domain_seen: bool,
}

impl SpecParser {
    fn new(text: &str) -> Result<Self> {
        Ok(SpecParser {
            cur: Cursor::new(text)?,
            spec: RecursiveSpec {
                domain: DomainDef {
                    values: Vec::new(),
                },
                variables: Vec::new(),
                actions: Vec::new(),
                processes: Vec::new(),
                equations: Vec::new(),
                comm: CommFunction::new(),
            },
            domain_seen: false,
        })
    }

    fn err(&self, pos: Pos, msg: impl Into<String>) -> Error {
        ParseError::new(pos, msg).into()
    }

    fn spec(&mut self) -> Result<(RecursiveSpec, Option<InitSpec>)> {
        self.prescan_processes()?;
        let mut bodies: Vec<Option<Expr>> = vec![None; self.spec.processes.len()];
        let mut init = None;
        loop {
            let pos = self.cur.pos();
            match self.cur.peek().clone() {
                Tok::Eof => break,
                Tok::Ident(kw) => match kw.as_str() {
                    "domain" => {
                        self.cur.bump();
                        if self.domain_seen {
                            return Err(self.err(pos, "duplicate `domain` declaration"));
                        }
                        let names = self.name_list()?;
                        self.spec.domain = DomainDef::new(names).map_err(|e| match e {
                            Error::Semantic(m) => self.err(pos, m),
                            other => other,
                        })?;
                        self.domain_seen = true;
                    }
                    "vars" => {
                        self.cur.bump();
                        let names = self.name_list()?;
                        self.declare(pos, names, |s| &mut s.variables, "variable")?;
                    }
                    "acts" => {
                        self.cur.bump();
                        let names = self.name_list()?;
                        self.declare(pos, names, |s| &mut s.actions, "action")?;
                    }
                    "comm" => {
                        self.cur.bump();
                        self.comm_block()?;
                    }
                    "proc" => {
                        self.cur.bump();
                        let (name, npos) = self.cur.ident()?;
                        let x = self.spec.proc_id(&name).expect("prescanned");
                        self.cur.expect(Tok::Eq)?;
                        let body = self.expr()?;
                        if bodies[x.index()].is_some() {
                            return Err(self.err(npos, format!("duplicate equation for `{name}`")));
                        }
                        bodies[x.index()] = Some(body);
                    }
                    "init" => {
                        self.cur.bump();
                        if init.is_some() {
                            return Err(self.err(pos, "duplicate `init`"));
                        }
                        init = Some(self.init()?);
                    }
                    _ => {
                        return Err(self
                            .cur
                            .unexpected(&["`domain`", "`vars`", "`acts`", "`comm`", "`proc`", "`init`"])
                            .into())
                    }
                },
                _ => {
                    return Err(self
                        .cur
                        .unexpected(&["`domain`", "`vars`", "`acts`", "`comm`", "`proc`", "`init`"])
                        .into())
                }
            }
        }
        if !self.domain_seen {
            return Err(self.err(self.cur.pos(), "missing `domain` declaration"));
        }
        self.spec.equations = bodies
            .into_iter()
            .map(|b| b.expect("every prescanned name has a body"))
            .collect();
        Ok((self.spec.clone(), init))
    }

    /// Collects process names up front so equations may refer to names
    /// defined further down.
    fn prescan_processes(&mut self) -> Result<()> {
        let mut i = 0;
        loop {
            match self.cur.peek_at(i) {
                Tok::Eof => break,
                Tok::Ident(kw) if kw == "proc" => {
                    if let Tok::Ident(name) = self.cur.peek_at(i + 1) {
                        let name = name.clone();
                        if KEYWORDS.contains(&name.as_str()) {
                            return Err(self.err(self.cur.pos(), format!("`{name}` is a keyword")));
                        }
                        if self.spec.processes.contains(&name) {
                            return Err(self.err(
                                self.cur.pos(),
                                format!("duplicate equation for `{name}`"),
                            ));
                        }
                        self.spec.processes.push(name);
                    }
                }
                _ => {}
            }
            i += 1;
        }
        Ok(())
    }

    fn declare(
        &mut self,
        pos: Pos,
        names: Vec<String>,
        field: impl Fn(&mut RecursiveSpec) -> &mut Vec<String>,
        what: &str,
    ) -> Result<()> {
        if !field(&mut self.spec).is_empty() {
            return Err(self.err(pos, format!("duplicate {what} declaration block")));
        }
        for n in names {
            if KEYWORDS.contains(&n.as_str()) {
                return Err(self.err(pos, format!("`{n}` is a keyword")));
            }
            if self.spec.processes.contains(&n)
                || self.spec.actions.contains(&n)
                || self.spec.variables.contains(&n)
            {
                return Err(self.err(pos, format!("name `{n}` declared twice")));
            }
            field(&mut self.spec).push(n);
        }
        Ok(())
    }

    fn name_list(&mut self) -> Result<Vec<String>> {
        self.cur.expect(Tok::LBrace)?;
        let mut out = Vec::new();
        if self.cur.eat(&Tok::RBrace) {
            return Ok(out);
        }
        loop {
            out.push(self.cur.ident()?.0);
            if self.cur.eat(&Tok::RBrace) {
                return Ok(out);
            }
            self.cur.expect(Tok::Comma)?;
        }
    }

    fn action(&mut self) -> Result<ActionId> {
        let (name, pos) = self.cur.ident()?;
        self.spec
            .action_id(&name)
            .ok_or_else(|| self.err(pos, format!("unknown action `{name}`")))
    }

    fn var(&mut self) -> Result<VarId> {
        let (name, pos) = self.cur.ident()?;
        self.spec
            .var_id(&name)
            .ok_or_else(|| self.err(pos, format!("unknown variable `{name}`")))
    }

    fn value(&mut self) -> Result<ValueId> {
        let (name, pos) = self.cur.ident()?;
        self.spec
            .value_id(&name)
            .ok_or_else(|| self.err(pos, format!("unknown value `{name}`")))
    }

    fn comm_block(&mut self) -> Result<()> {
        self.cur.expect(Tok::LBrace)?;
        while !self.cur.eat(&Tok::RBrace) {
            let pos = self.cur.pos();
            let a = self.action()?;
            self.cur.expect(Tok::Bar)?;
            let b = self.action()?;
            self.cur.expect(Tok::Arrow)?;
            let c = self.action()?;
            if self.spec.comm.insert(a, b, c).is_some() {
                return Err(self.err(
                    pos,
                    format!(
                        "malformed comm: pair {}|{} defined twice",
                        self.spec.action_name(a),
                        self.spec.action_name(b)
                    ),
                ));
            }
            if !self.cur.eat(&Tok::Semi) {
                self.cur.expect(Tok::RBrace)?;
                break;
            }
        }
        Ok(())
    }

    fn init(&mut self) -> Result<InitSpec> {
        let root = self.expr()?;
        let initial = if self.cur.is_keyword("with") {
            self.cur.bump();
            self.cur.expect(Tok::LBrace)?;
            let v = self.valuation_body(true)?;
            self.cur.expect(Tok::RBrace)?;
            v
        } else if self.spec.variables.is_empty() {
            Valuation::new(Vec::new())
        } else {
            return Err(self
                .cur
                .unexpected(&["`with { ... }` giving the initial valuation"])
                .into());
        };
        Ok(InitSpec { root, initial })
    }

    fn valuation_body(&mut self, braced: bool) -> Result<Valuation> {
        let start = self.cur.pos();
        let mut slots: Vec<Option<ValueId>> = vec![None; self.spec.variables.len()];
        let at_end = |c: &Cursor| {
            if braced {
                c.peek() == &Tok::RBrace
            } else {
                c.peek() == &Tok::Eof
            }
        };
        while !at_end(&self.cur) {
            let v = self.var()?;
            self.cur.expect(Tok::Eq)?;
            let d = self.value()?;
            slots[v.index()] = Some(d);
            if !self.cur.eat(&Tok::Comma) {
                break;
            }
        }
        let mut values = Vec::with_capacity(slots.len());
        for (i, s) in slots.into_iter().enumerate() {
            match s {
                Some(d) => values.push(d),
                None => {
                    return Err(self.err(
                        start,
                        format!(
                            "valuation does not assign variable `{}`",
                            self.spec.variables[i]
                        ),
                    ))
                }
            }
        }
        Ok(Valuation::new(values))
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut left = self.par()?;
        while self.cur.eat(&Tok::Plus) {
            let right = self.par()?;
            left = ProcessExpr::choice(left, right);
        }
        Ok(left)
    }

    fn par(&mut self) -> Result<Expr> {
        let mut left = self.unary()?;
        while self.cur.eat(&Tok::ParBar) {
            let right = self.unary()?;
            left = ProcessExpr::par(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Expr> {
        let pos = self.cur.pos();
        match self.cur.peek().clone() {
            Tok::LParen => {
                let is_cond = matches!(self.cur.peek_at(1), Tok::Ident(_))
                    && self.cur.peek_at(2) == &Tok::Eq;
                self.cur.bump();
                if is_cond {
                    let v = self.var()?;
                    self.cur.expect(Tok::Eq)?;
                    let d = self.value()?;
                    self.cur.expect(Tok::RParen)?;
                    self.cur.expect(Tok::Arrow)?;
                    let body = self.unary()?;
                    Ok(ProcessExpr::cond(v, d, body))
                } else {
                    let e = self.expr()?;
                    self.cur.expect(Tok::RParen)?;
                    Ok(e)
                }
            }
            Tok::Ident(word) => match word.as_str() {
                "delta" => {
                    self.cur.bump();
                    Ok(ProcessExpr::delta())
                }
                "encap" => {
                    self.cur.bump();
                    self.cur.expect(Tok::LParen)?;
                    self.cur.expect(Tok::LBrace)?;
                    let mut blocked = BTreeSet::new();
                    if !self.cur.eat(&Tok::RBrace) {
                        loop {
                            blocked.insert(self.action()?);
                            if self.cur.eat(&Tok::RBrace) {
                                break;
                            }
                            self.cur.expect(Tok::Comma)?;
                        }
                    }
                    self.cur.expect(Tok::RParen)?;
                    let body = self.unary()?;
                    Ok(ProcessExpr::encap(blocked, body))
                }
                "assign" => {
                    self.cur.bump();
                    self.cur.expect(Tok::LParen)?;
                    let v = self.var()?;
                    self.cur.expect(Tok::Comma)?;
                    let d = self.value()?;
                    self.cur.expect(Tok::RParen)?;
                    self.cur.expect(Tok::Dot)?;
                    let body = self.unary()?;
                    Ok(ProcessExpr::prefix(TransitionLabel::Assign(v, d), body))
                }
                _ if self.cur.peek_at(1) == &Tok::Dot => {
                    self.cur.bump();
                    self.cur.bump();
                    let Some(a) = self.spec.action_id(&word) else {
                        let msg = if self.spec.proc_id(&word).is_some() {
                            format!("process name `{word}` cannot be used as a prefix")
                        } else {
                            format!("unknown action `{word}`")
                        };
                        return Err(self.err(pos, msg));
                    };
                    let body = self.unary()?;
                    Ok(ProcessExpr::action(a, body))
                }
                _ => {
                    self.cur.bump();
                    match self.spec.proc_id(&word) {
                        Some(x) => Ok(ProcessExpr::name(x)),
                        None if self.spec.action_id(&word).is_some() => Err(self.err(
                            pos,
                            format!("action `{word}` used as a process (missing `.`?)"),
                        )),
                        None => Err(self.err(pos, format!("unknown process name `{word}`"))),
                    }
                }
            },
            _ => Err(self
                .cur
                .unexpected(&["process expression"])
                .into()),
        }
    }
}
