use std::collections::BTreeSet;

use crate::error::{Error, ParseError, Result};
use crate::lex::{Cursor, Tok};
use crate::syntax::{RecursiveSpec, TransitionLabel};

use super::{Formula, HmlFormula};

/// Parses a formula over the labels and variables of `spec`.
///
/// `!`, modalities and `set` are prefix operators that take the smallest
/// following formula; `&&` binds tighter than `||`. `*` inside a modality
/// stands for every label of the spec.
pub fn parse_formula(spec: &RecursiveSpec, text: &str) -> Result<HmlFormula> {
    let mut p = FormulaParser {
        cur: Cursor::new(text)?,
        spec,
    };
    let f = p.or()?;
    if p.cur.peek() != &Tok::Eof {
        return Err(p.cur.unexpected(&["`&&`", "`||`", "end of formula"]).into());
    }
    Ok(f)
}

struct FormulaParser<'a> {
    cur: Cursor,
    spec: &'a RecursiveSpec,
}

impl FormulaParser<'_> {
    fn or(&mut self) -> Result<HmlFormula> {
        let mut f = self.and()?;
        while self.cur.eat(&Tok::ParBar) {
            f = Formula::or(f, self.and()?);
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<HmlFormula> {
        let mut f = self.unary()?;
        while self.cur.eat(&Tok::AndAnd) {
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<HmlFormula> {
        match self.cur.peek().clone() {
            Tok::Bang => {
                self.cur.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Lt => {
                self.cur.bump();
                let t = self.labels(Tok::Gt)?;
                Ok(Formula::Diamond(t, Box::new(self.unary()?)))
            }
            Tok::LBracket => {
                self.cur.bump();
                let t = self.labels(Tok::RBracket)?;
                Ok(Formula::Box(t, Box::new(self.unary()?)))
            }
            Tok::LParen => {
                let is_check = matches!(self.cur.peek_at(1), Tok::Ident(_))
                    && self.cur.peek_at(2) == &Tok::Eq;
                self.cur.bump();
                if is_check {
                    let v = self.var()?;
                    self.cur.expect(Tok::Eq)?;
                    let d = self.value()?;
                    self.cur.expect(Tok::RParen)?;
                    Ok(Formula::Check(v, d))
                } else {
                    let f = self.or()?;
                    self.cur.expect(Tok::RParen)?;
                    Ok(f)
                }
            }
            Tok::Ident(w) if w == "true" => {
                self.cur.bump();
                Ok(Formula::True)
            }
            Tok::Ident(w) if w == "false" => {
                self.cur.bump();
                Ok(Formula::False)
            }
            Tok::Ident(w) if w == "set" => {
                self.cur.bump();
                let v = self.var()?;
                self.cur.expect(Tok::ColonEq)?;
                let d = self.value()?;
                self.cur.expect(Tok::Dot)?;
                Ok(Formula::set(v, d, self.unary()?))
            }
            _ => Err(self
                .cur
                .unexpected(&["`true`", "`false`", "`(`", "`!`", "`<`", "`[`", "`set`"])
                .into()),
        }
    }

    fn labels(&mut self, close: Tok) -> Result<BTreeSet<TransitionLabel>> {
        let pos = self.cur.pos();
        let mut out = BTreeSet::new();
        if self.cur.eat(&close) {
            return Err(ParseError::new(pos, "modality needs a nonempty label set").into());
        }
        loop {
            if self.cur.eat(&Tok::Star) {
                out.extend(self.spec.all_labels());
            } else if self.cur.is_keyword("assign") {
                self.cur.bump();
                self.cur.expect(Tok::LParen)?;
                let v = self.var()?;
                self.cur.expect(Tok::Comma)?;
                let d = self.value()?;
                self.cur.expect(Tok::RParen)?;
                out.insert(TransitionLabel::Assign(v, d));
            } else {
                let (name, p) = self.cur.ident()?;
                let a = self
                    .spec
                    .action_id(&name)
                    .ok_or_else(|| Error::from(ParseError::new(p, format!("unknown action `{name}`"))))?;
                out.insert(TransitionLabel::Action(a));
            }
            if self.cur.eat(&close) {
                return Ok(out);
            }
            self.cur.expect(Tok::Comma)?;
        }
    }

    fn var(&mut self) -> Result<crate::syntax::VarId> {
        let (name, p) = self.cur.ident()?;
        self.spec
            .var_id(&name)
            .ok_or_else(|| ParseError::new(p, format!("unknown variable `{name}`")).into())
    }

    fn value(&mut self) -> Result<crate::syntax::ValueId> {
        let (name, p) = self.cur.ident()?;
        self.spec
            .value_id(&name)
            .ok_or_else(|| ParseError::new(p, format!("unknown value `{name}`")).into())
    }
}
