//! Recursive-descent parser for scripts.
//!
//! ```text
//! decl    := "ctx" name "=" ctxexpr
//!          | "type" name "=" ty "in" ctxspec
//!          | "term" name ":" ty "=" tm "in" ctxspec
//!          | "eval" name | "check" name
//! ctxexpr := "empty" "(" cat ")" | "yoneda" "(" cat "," object ")" | string
//! cat     := ident | string
//! ctxspec := name ("," ident ":" ty)*
//! ty      := "{" nat "}" | "Pi" "(" ident ":" ty ")" ty
//!          | "Sigma" "(" ident ":" ty ")" ty | ident | string | "(" ty ")"
//! tm      := "\" ident "." tm | postfix+ ["\" ident "." tm]
//! postfix := atom (".1" | ".2")*
//! atom    := ident | "#" nat | "(" tm ")" | "(" tm "," tm ")"
//! ```

use std::collections::HashSet;

use super::ast::{
    CatRef, CtxExpr, CtxSpec, Decl, Item, Script, SurfaceTerm, SurfaceType, KEYWORDS,
};
use super::lexer::{lex, Pos, Tok};
use crate::Result;

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T> {
        Err(self
            .pos()
            .error(format!("expected {wanted}, found {}", self.peek())))
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&t.to_string())
        }
    }

    fn keyword(&mut self, k: &str) -> Result<()> {
        match self.peek() {
            Tok::Ident(s) if s == k => {
                self.bump();
                Ok(())
            }
            _ => self.unexpected(&format!("`{k}`")),
        }
    }

    fn at_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == k)
    }

    fn name(&mut self) -> Result<String> {
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            Tok::Ident(s) => Err(self.pos().error(format!("`{s}` is a keyword"))),
            _ => self.unexpected("a name"),
        }
    }

    fn nat(&mut self) -> Result<usize> {
        match self.bump() {
            Tok::Nat(n) => Ok(n),
            _ => {
                self.at -= 1;
                self.unexpected("a number")
            }
        }
    }

    fn string(&mut self) -> Option<String> {
        match self.peek() {
            Tok::Str(s) => {
                let s = s.clone();
                self.bump();
                Some(s)
            }
            _ => None,
        }
    }

    fn cat(&mut self) -> Result<CatRef> {
        if let Some(s) = self.string() {
            return Ok(CatRef::File(s));
        }
        match self.peek() {
            Tok::Ident(_) => self.name().map(CatRef::Builtin),
            _ => self.unexpected("a category name or path"),
        }
    }

    fn ctx_expr(&mut self) -> Result<CtxExpr> {
        if let Some(s) = self.string() {
            return Ok(CtxExpr::File(s));
        }
        if self.at_keyword("empty") {
            self.bump();
            self.expect(Tok::LParen)?;
            let c = self.cat()?;
            self.expect(Tok::RParen)?;
            return Ok(CtxExpr::Empty(c));
        }
        if self.at_keyword("yoneda") {
            self.bump();
            self.expect(Tok::LParen)?;
            let c = self.cat()?;
            self.expect(Tok::Comma)?;
            let x = self.name()?;
            self.expect(Tok::RParen)?;
            return Ok(CtxExpr::Yoneda(c, x));
        }
        self.unexpected("`empty(..)`, `yoneda(..)` or a presheaf path")
    }

    fn ctx_spec(&mut self) -> Result<CtxSpec> {
        let base = self.name()?;
        let mut binders = Vec::new();
        while *self.peek() == Tok::Comma {
            self.bump();
            let pos = self.pos();
            let x = self.name()?;
            if binders.iter().any(|(y, _)| *y == x) {
                return Err(pos.error(format!("binder `{x}` declared twice")));
            }
            self.expect(Tok::Colon)?;
            binders.push((x, self.ty()?));
        }
        Ok(CtxSpec { base, binders })
    }

    fn ty(&mut self) -> Result<SurfaceType> {
        if let Some(s) = self.string() {
            return Ok(SurfaceType::File(s));
        }
        match self.peek().clone() {
            Tok::LBrace => {
                self.bump();
                let n = self.nat()?;
                self.expect(Tok::RBrace)?;
                Ok(SurfaceType::Discrete(n))
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(k) if k == "Pi" || k == "Sigma" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let x = self.name()?;
                self.expect(Tok::Colon)?;
                let a = Box::new(self.ty()?);
                self.expect(Tok::RParen)?;
                let b = Box::new(self.ty()?);
                Ok(if k == "Pi" {
                    SurfaceType::Pi(x, a, b)
                } else {
                    SurfaceType::Sigma(x, a, b)
                })
            }
            Tok::Ident(_) => self.name().map(SurfaceType::Ref),
            _ => self.unexpected("a type"),
        }
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => !KEYWORDS.contains(&s.as_str()),
            Tok::Hash | Tok::LParen => true,
            _ => false,
        }
    }

    fn lam(&mut self) -> Result<SurfaceTerm> {
        self.expect(Tok::Lambda)?;
        let x = self.name()?;
        self.expect(Tok::Dot)?;
        Ok(SurfaceTerm::Lam(x, Box::new(self.tm()?)))
    }

    fn tm(&mut self) -> Result<SurfaceTerm> {
        if *self.peek() == Tok::Lambda {
            return self.lam();
        }
        if !self.starts_atom() {
            return self.unexpected("a term");
        }
        let mut t = self.postfix()?;
        loop {
            if self.starts_atom() {
                t = SurfaceTerm::App(Box::new(t), Box::new(self.postfix()?));
            } else if *self.peek() == Tok::Lambda {
                return Ok(SurfaceTerm::App(Box::new(t), Box::new(self.lam()?)));
            } else {
                return Ok(t);
            }
        }
    }

    fn postfix(&mut self) -> Result<SurfaceTerm> {
        let mut t = self.atom()?;
        while *self.peek() == Tok::Dot {
            self.bump();
            let pos = self.pos();
            t = match self.nat()? {
                1 => SurfaceTerm::Proj1(Box::new(t)),
                2 => SurfaceTerm::Proj2(Box::new(t)),
                n => return Err(pos.error(format!("projection `.{n}` (only .1 and .2 exist)"))),
            };
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<SurfaceTerm> {
        match self.peek() {
            Tok::Hash => {
                self.bump();
                Ok(SurfaceTerm::Lit(self.nat()?))
            }
            Tok::LParen => {
                self.bump();
                let l = self.tm()?;
                if *self.peek() == Tok::Comma {
                    self.bump();
                    let r = self.tm()?;
                    self.expect(Tok::RParen)?;
                    return Ok(SurfaceTerm::Pair(Box::new(l), Box::new(r)));
                }
                self.expect(Tok::RParen)?;
                Ok(l)
            }
            _ => self.name().map(SurfaceTerm::Var),
        }
    }

    fn decl(&mut self) -> Result<Decl> {
        let kw = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return self.unexpected("a declaration (ctx, type, term, eval or check)"),
        };
        self.bump();
        match kw.as_str() {
            "ctx" => {
                let name = self.name()?;
                self.expect(Tok::Eq)?;
                Ok(Decl::Ctx {
                    name,
                    expr: self.ctx_expr()?,
                })
            }
            "type" => {
                let name = self.name()?;
                self.expect(Tok::Eq)?;
                let ty = self.ty()?;
                self.keyword("in")?;
                Ok(Decl::Type {
                    name,
                    ty,
                    ctx: self.ctx_spec()?,
                })
            }
            "term" => {
                let name = self.name()?;
                self.expect(Tok::Colon)?;
                let ty = self.ty()?;
                self.expect(Tok::Eq)?;
                let tm = self.tm()?;
                self.keyword("in")?;
                Ok(Decl::Term {
                    name,
                    ty,
                    tm,
                    ctx: self.ctx_spec()?,
                })
            }
            "eval" => self.name().map(Decl::Eval),
            "check" => self.name().map(Decl::Check),
            _ => {
                self.at -= 1;
                self.unexpected("a declaration (ctx, type, term, eval or check)")
            }
        }
    }
}

/// Parses a whole script. Names must be unique within each of the three
/// namespaces (contexts, types, terms).
pub fn parse_script(text: &str) -> Result<Script> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let mut items = Vec::new();
    let mut seen: [HashSet<String>; 3] = Default::default();
    while *p.peek() != Tok::Eof {
        let pos = p.pos();
        let decl = p.decl()?;
        let slot = match &decl {
            Decl::Ctx { name, .. } => Some((0, name)),
            Decl::Type { name, .. } => Some((1, name)),
            Decl::Term { name, .. } => Some((2, name)),
            _ => None,
        };
        if let Some((k, name)) = slot {
            if !seen[k].insert(name.clone()) {
                return Err(pos.error(format!("`{name}` is declared twice")));
            }
        }
        items.push(Item { pos, decl });
    }
    Ok(Script { items })
}

/// Parses a single term.
pub fn parse_term(text: &str) -> Result<SurfaceTerm> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let t = p.tm()?;
    match p.peek() {
        Tok::Eof => Ok(t),
        _ => p.unexpected("end of input"),
    }
}

/// Parses a single type.
pub fn parse_type(text: &str) -> Result<SurfaceType> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let t = p.ty()?;
    match p.peek() {
        Tok::Eof => Ok(t),
        _ => p.unexpected("end of input"),
    }
}
