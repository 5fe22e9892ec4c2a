use std::collections::HashMap;
use std::fmt;

use crate::model::{Atom, Clause, Literal, Mode, ModePattern, Program, Query, Term, Var, VarId};

/// A lexical or syntax error; positions are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, thiserror::Error)]
pub struct SourceError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub lexeme: String,
}

impl fmt::Display for SourceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)?;
        if !self.lexeme.is_empty() {
            write!(f, " near '{}'", self.lexeme)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Name(String),
    Var(String),
    At,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Pipe,
    Comma,
    Dot,
    Neck,
    Naf,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    text: String,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> (Vec<Token>, Vec<SourceError>) {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut errors = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let mut advance = |n: usize, i: &mut usize| {
            for _ in 0..n {
                if chars[*i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                *i += 1;
            }
        };
        if c.is_whitespace() {
            advance(1, &mut i);
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                advance(1, &mut i);
            }
            continue;
        }
        let simple = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '|' => Some(Tok::Pipe),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            '@' => Some(Tok::At),
            _ => None,
        };
        let (tok, len) = if let Some(t) = simple {
            (t, 1)
        } else if c == ':' && chars.get(i + 1) == Some(&'-') {
            (Tok::Neck, 2)
        } else if c == '\\' && chars.get(i + 1) == Some(&'+') {
            (Tok::Naf, 2)
        } else if c.is_alphanumeric() || c == '_' {
            let len = chars[i..].iter().take_while(|&&ch| ch.is_alphanumeric() || ch == '_').count();
            let word: String = chars[i..i + len].iter().collect();
            if c.is_uppercase() || c == '_' {
                (Tok::Var(word), len)
            } else {
                (Tok::Name(word), len)
            }
        } else {
            errors.push(SourceError {
                line: start_line,
                column: start_col,
                message: "unexpected character".into(),
                lexeme: c.to_string(),
            });
            advance(1, &mut i);
            continue;
        };
        let text: String = chars[i..i + len].iter().collect();
        advance(len, &mut i);
        out.push(Token { tok, text, line: start_line, column: start_col });
    }
    out.push(Token { tok: Tok::Eof, text: String::new(), line, column: col });
    (out, errors)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    next_var: VarId,
    scope: HashMap<String, Var>,
    inputs: Vec<String>,
    allow_inputs: bool,
}

type PResult<T> = Result<T, SourceError>;

impl Parser {
    fn new(toks: Vec<Token>) -> Self {
        Parser { toks, pos: 0, next_var: 0, scope: HashMap::new(), inputs: Vec::new(), allow_inputs: false }
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> SourceError {
        let t = self.peek();
        let lexeme = if t.tok == Tok::Eof { "end of input".to_string() } else { t.text.clone() };
        SourceError { line: t.line, column: t.column, message: message.into(), lexeme }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<()> {
        if self.peek().tok == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error_here(format!("expected {what}")))
        }
    }

    fn fresh(&mut self, name: &str) -> Var {
        let v = Var::new(self.next_var, name);
        self.next_var += 1;
        v
    }

    fn variable(&mut self, name: &str) -> Term {
        if name == "_" {
            return Term::Var(self.fresh("_"));
        }
        if let Some(v) = self.scope.get(name) {
            return Term::Var(v.clone());
        }
        let v = self.fresh(name);
        self.scope.insert(name.to_string(), v.clone());
        Term::Var(v)
    }

    fn clause(&mut self) -> PResult<Clause> {
        self.scope.clear();
        let head = self.atom()?;
        let mut body = Vec::new();
        if self.peek().tok == Tok::Neck {
            self.bump();
            body.push(self.literal()?);
            while self.peek().tok == Tok::Comma {
                self.bump();
                body.push(self.literal()?);
            }
        }
        self.expect(Tok::Dot, "'.' at end of clause")?;
        Ok(Clause { head, body, index: 0 })
    }

    fn literal(&mut self) -> PResult<Literal> {
        if self.peek().tok == Tok::Naf {
            self.bump();
            return Ok(Literal::neg(self.atom()?));
        }
        if !matches!(self.peek().tok, Tok::Name(_)) {
            return Err(self.error_here("expected a literal"));
        }
        Ok(Literal::pos(self.atom()?))
    }

    fn atom(&mut self) -> PResult<Atom> {
        let Tok::Name(name) = self.peek().tok.clone() else {
            return Err(self.error_here("expected a predicate name"));
        };
        self.bump();
        let args = if self.peek().tok == Tok::LParen { self.args()? } else { Vec::new() };
        Ok(Atom::new(&name, args))
    }

    fn args(&mut self) -> PResult<Vec<Term>> {
        self.expect(Tok::LParen, "'('")?;
        let mut args = vec![self.term()?];
        while self.peek().tok == Tok::Comma {
            self.bump();
            args.push(self.term()?);
        }
        self.expect(Tok::RParen, "')' or ','")?;
        Ok(args)
    }

    fn term(&mut self) -> PResult<Term> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Var(name) => {
                self.bump();
                Ok(self.variable(&name))
            }
            Tok::Name(name) => {
                self.bump();
                if self.peek().tok == Tok::LParen {
                    let args = self.args()?;
                    Ok(Term::compound(&name, args))
                } else {
                    Ok(Term::constant(&name))
                }
            }
            Tok::LBracket => self.list(),
            Tok::At if self.allow_inputs => {
                self.bump();
                let Tok::Var(name) = self.peek().tok.clone() else {
                    return Err(self.error_here("expected a variable after '@'"));
                };
                if name == "_" || self.inputs.contains(&name) || self.scope.contains_key(&name) {
                    return Err(self.error_here("input-mode variable is not distinct"));
                }
                self.bump();
                let v = self.variable(&name);
                self.inputs.push(name);
                Ok(v)
            }
            _ => Err(self.error_here("expected a term")),
        }
    }

    fn list(&mut self) -> PResult<Term> {
        self.expect(Tok::LBracket, "'['")?;
        if self.peek().tok == Tok::RBracket {
            self.bump();
            return Ok(Term::nil());
        }
        let mut items = vec![self.term()?];
        while self.peek().tok == Tok::Comma {
            self.bump();
            items.push(self.term()?);
        }
        let tail = if self.peek().tok == Tok::Pipe {
            self.bump();
            Some(self.term()?)
        } else {
            None
        };
        self.expect(Tok::RBracket, "']'")?;
        Ok(Term::list(items, tail))
    }

    /// Skips past the next '.' after an error.
    fn recover(&mut self) {
        while !matches!(self.peek().tok, Tok::Dot | Tok::Eof) {
            self.bump();
        }
        self.bump();
    }
}

/// Parses a program; on failure returns every error found.
pub fn parse_program(src: &str) -> Result<Program, Vec<SourceError>> {
    let (toks, mut errors) = lex(src);
    let mut p = Parser::new(toks);
    let mut clauses = Vec::new();
    while p.peek().tok != Tok::Eof {
        match p.clause() {
            Ok(c) => clauses.push(c),
            Err(e) => {
                errors.push(e);
                p.recover();
            }
        }
    }
    if errors.is_empty() {
        Ok(Program::new(clauses))
    } else {
        errors.sort_by_key(|e| (e.line, e.column));
        Err(errors)
    }
}

/// Parses a query such as `append(V1, @I, V3)`; `@Name` marks an input mode.
pub fn parse_query(src: &str) -> Result<Query, SourceError> {
    let (toks, errors) = lex(src);
    if let Some(e) = errors.into_iter().next() {
        return Err(e);
    }
    let mut p = Parser::new(toks);
    p.allow_inputs = true;
    let Tok::Name(name) = p.peek().tok.clone() else {
        return Err(p.error_here("expected a predicate name"));
    };
    p.bump();
    let mut args = Vec::new();
    let mut modes = Vec::new();
    if p.peek().tok == Tok::LParen {
        p.bump();
        loop {
            let before = p.inputs.len();
            let at = p.peek().clone();
            let arg = p.term()?;
            if p.inputs.len() > before {
                modes.push(Mode::Input);
            } else {
                modes.push(Mode::Open);
                // a plain occurrence of an earlier input name
                let mut clash = None;
                arg.for_each_var(&mut |v| {
                    if p.inputs.iter().any(|n| **n == *v.name) {
                        clash = Some(v.name.to_string());
                    }
                });
                if let Some(name) = clash {
                    return Err(SourceError {
                        line: at.line,
                        column: at.column,
                        message: "input-mode variable is not distinct".into(),
                        lexeme: name,
                    });
                }
            }
            args.push(arg);
            if p.peek().tok == Tok::Comma {
                p.bump();
            } else {
                break;
            }
        }
        p.expect(Tok::RParen, "')' or ','")?;
    }
    if p.peek().tok == Tok::Dot {
        p.bump();
    }
    if p.peek().tok != Tok::Eof {
        return Err(p.error_here("unexpected text after query"));
    }
    let at = p.peek().clone();
    Query::new(Atom::new(&name, args), ModePattern(modes)).map_err(|e| SourceError {
        line: at.line,
        column: at.column,
        message: e.to_string(),
        lexeme: String::new(),
    })
}
