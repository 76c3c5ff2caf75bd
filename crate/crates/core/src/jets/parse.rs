//! Recursive-descent parser for the surface-definition language.
//!
//! ```text
//! program  := { line NEWLINE }
//! line     := [ header | assign ] [ '#' comment ]
//! header   := 'params' ':' { IDENT }
//!           | 'domain' ':' range { 'x' range }
//!           | 'periodic' ':' { IDENT }
//! range    := '[' signed ',' signed ']'
//! assign   := ('x1' | 'x2' | 'y1' | 'y2' | 'x' | 'y') '=' expr
//! expr     := term { ('+' | '-') term }
//! term     := unary { ('*' | '/') unary }
//! unary    := ('-' | '+') unary | power
//! power    := atom [ '^' unary ]
//! atom     := NUMBER | 'i' | 'pi' | IDENT | FUNC '(' expr ')' | '(' expr ')'
//! FUNC     := 'sin' | 'cos' | 'exp' | 'sqrt' | 'ln'
//! ```

use super::expr::{Assignments, Expr, Func, SurfaceDef, REAL_COORDS};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    Newline,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::Newline => "end of line".into(),
        Tok::Eof => "end of input".into(),
    }
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let start_col = col;
        if c == '\n' {
            out.push(Token { tok: Tok::Newline, line, col });
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
                col += 1;
            }
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let b = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[b..i].iter().collect();
            col += i - b;
            let v: f64 = text.parse().map_err(|_| Error::Syntax {
                line,
                col: start_col,
                expected: vec!["number".into()],
            })?;
            out.push(Token { tok: Tok::Num(v), line, col: start_col });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let b = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - b;
            out.push(Token { tok: Tok::Ident(chars[b..i].iter().collect()), line, col: start_col });
            continue;
        }
        if "+-*/^()=,[]:".contains(c) {
            out.push(Token { tok: Tok::Sym(c), line, col });
            i += 1;
            col += 1;
            continue;
        }
        return Err(Error::Syntax { line, col, expected: vec!["token".into()] });
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

const RESERVED: [&str; 7] = ["i", "pi", "sin", "cos", "exp", "sqrt", "ln"];

fn implicit_param(name: &str) -> bool {
    REAL_COORDS.contains(&name)
        || (name.len() > 1 && name.starts_with('s') && name[1..].chars().all(|c| c.is_ascii_digit()))
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// Names referenced so far, indexed by the provisional `Expr::Var` ids.
    names: Vec<String>,
    declared: Option<Vec<String>>,
    /// Set while parsing the right-hand side of a real coordinate.
    real_only: bool,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T> {
        let t = self.peek();
        let mut exp: Vec<String> = expected.iter().map(|s| s.to_string()).collect();
        exp.push(format!("(found {})", describe(&t.tok)));
        Err(Error::Syntax { line: t.line, col: t.col, expected: exp })
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek().tok == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            self.fail(&[&format!("`{c}`")])
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_sym('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat_sym('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat_sym('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat_sym('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_sym('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat_sym('+') {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat_sym('^') {
            let e = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(e)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(*v))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if let Some(f) = Func::from_name(name) {
                    if self.peek().tok == Tok::Sym('(') {
                        self.bump();
                        let e = self.expr()?;
                        self.expect_sym(')')?;
                        return Ok(Expr::Call(f, Box::new(e)));
                    }
                    return self.fail(&["`(`"]);
                }
                match name.as_str() {
                    "i" => {
                        if self.real_only {
                            return Err(Error::Syntax {
                                line: t.line,
                                col: t.col,
                                expected: vec!["real-valued expression (found `i`)".into()],
                            });
                        }
                        Ok(Expr::Imag)
                    }
                    "pi" => Ok(Expr::Pi),
                    _ => {
                        let known = match &self.declared {
                            Some(d) => d.iter().any(|p| p == name),
                            None => implicit_param(name),
                        };
                        if !known {
                            return Err(Error::UnknownIdentifier(name.clone()));
                        }
                        let idx = match self.names.iter().position(|n| n == name) {
                            Some(k) => k,
                            None => {
                                self.names.push(name.clone());
                                self.names.len() - 1
                            }
                        };
                        Ok(Expr::Var(idx))
                    }
                }
            }
            _ => self.fail(&["number", "identifier", "`(`", "`-`"]),
        }
    }

    fn signed(&mut self) -> Result<f64> {
        let neg = self.eat_sym('-');
        if !neg {
            self.eat_sym('+');
        }
        match self.peek().tok.clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(if neg { -v } else { v })
            }
            Tok::Ident(s) if s == "pi" => {
                self.bump();
                let v = std::f64::consts::PI;
                Ok(if neg { -v } else { v })
            }
            _ => self.fail(&["number"]),
        }
    }

    fn ident_list(&mut self) -> Result<Vec<String>> {
        let mut v = Vec::new();
        while let Tok::Ident(s) = self.peek().tok.clone() {
            self.bump();
            v.push(s);
        }
        Ok(v)
    }

    fn end_of_line(&mut self) -> Result<()> {
        match self.peek().tok {
            Tok::Newline => {
                self.bump();
                Ok(())
            }
            Tok::Eof => Ok(()),
            _ => self.fail(&["end of line"]),
        }
    }
}

/// Parses a surface definition.
pub fn parse(src: &str) -> Result<SurfaceDef> {
    let mut p = Parser { toks: lex(src)?, pos: 0, names: Vec::new(), declared: None, real_only: false };
    let mut domain = None;
    let mut periodic_names: Vec<String> = Vec::new();
    let mut real: [Option<Expr>; 4] = [None, None, None, None];
    let mut cx: [Option<Expr>; 2] = [None, None];
    let mut seen_assign = false;
    loop {
        let t = p.peek().clone();
        match &t.tok {
            Tok::Eof => break,
            Tok::Newline => {
                p.bump();
                continue;
            }
            Tok::Ident(name) if p.toks[p.pos + 1].tok == Tok::Sym(':') => {
                if seen_assign {
                    return p.fail(&["assignment"]);
                }
                p.bump();
                p.bump();
                match name.as_str() {
                    "params" => {
                        if p.declared.is_some() {
                            return Err(Error::Syntax {
                                line: t.line,
                                col: t.col,
                                expected: vec!["single params header".into()],
                            });
                        }
                        let list = p.ident_list()?;
                        for (k, n) in list.iter().enumerate() {
                            if RESERVED.contains(&n.as_str()) || list[..k].contains(n) {
                                return Err(Error::Syntax {
                                    line: t.line,
                                    col: t.col,
                                    expected: vec![format!("parameter name (`{n}` is reserved or repeated)")],
                                });
                            }
                        }
                        p.declared = Some(list);
                    }
                    "domain" => {
                        let mut ranges = Vec::new();
                        loop {
                            p.expect_sym('[')?;
                            let a = p.signed()?;
                            p.expect_sym(',')?;
                            let b = p.signed()?;
                            p.expect_sym(']')?;
                            if !(a < b) {
                                return Err(Error::Syntax {
                                    line: t.line,
                                    col: t.col,
                                    expected: vec!["nonempty range".into()],
                                });
                            }
                            ranges.push((a, b));
                            match p.peek().tok.clone() {
                                Tok::Ident(s) if s == "x" => {
                                    p.bump();
                                }
                                _ => break,
                            }
                        }
                        domain = Some(ranges);
                    }
                    "periodic" => periodic_names = p.ident_list()?,
                    _ => {
                        return Err(Error::Syntax {
                            line: t.line,
                            col: t.col,
                            expected: vec!["`params`".into(), "`domain`".into(), "`periodic`".into()],
                        })
                    }
                }
                p.end_of_line()?;
            }
            Tok::Ident(name) => {
                let slot_real = REAL_COORDS.iter().position(|c| c == name);
                let slot_cx = ["x", "y"].iter().position(|c| c == name);
                if slot_real.is_none() && slot_cx.is_none() {
                    return p.fail(&["`x1`", "`x2`", "`y1`", "`y2`", "`x`", "`y`", "header"]);
                }
                let any_real = real.iter().any(|e| e.is_some());
                let any_cx = cx.iter().any(|e| e.is_some());
                if (slot_real.is_some() && any_cx) || (slot_cx.is_some() && any_real) {
                    return Err(Error::Syntax {
                        line: t.line,
                        col: t.col,
                        expected: vec!["assignments in one form only (real x1..y2 or complex x, y)".into()],
                    });
                }
                p.bump();
                p.expect_sym('=')?;
                seen_assign = true;
                p.real_only = slot_real.is_some();
                let e = p.expr()?;
                p.real_only = false;
                let slot = match (slot_real, slot_cx) {
                    (Some(k), _) => &mut real[k],
                    (_, Some(k)) => &mut cx[k],
                    _ => unreachable!(),
                };
                if slot.is_some() {
                    return Err(Error::Syntax {
                        line: t.line,
                        col: t.col,
                        expected: vec![format!("single assignment to `{name}`")],
                    });
                }
                *slot = Some(e);
                p.end_of_line()?;
            }
            _ => return p.fail(&["assignment", "header"]),
        }
    }

    let params = match &p.declared {
        Some(d) => d.clone(),
        None => {
            let mut v = p.names.clone();
            v.sort_by_key(|n| implicit_order(n));
            v
        }
    };
    let map: Vec<usize> =
        p.names.iter().map(|n| params.iter().position(|q| q == n).expect("resolved name")).collect();
    for e in real.iter_mut().chain(cx.iter_mut()).flatten() {
        e.remap(&map);
    }
    if let Some(d) = &domain {
        if d.len() != params.len() {
            return Err(Error::InvalidInput(format!(
                "domain has {} ranges for {} parameters",
                d.len(),
                params.len()
            )));
        }
    }
    let mut periodic = Vec::new();
    for n in &periodic_names {
        match params.iter().position(|q| q == n) {
            Some(k) => periodic.push(k),
            None => return Err(Error::UnknownIdentifier(n.clone())),
        }
    }
    let assigns = if cx.iter().any(|e| e.is_some()) {
        let [x, y] = cx;
        Assignments::Complex { x, y }
    } else {
        Assignments::Real(real)
    };
    Ok(SurfaceDef { params, domain, periodic, assigns })
}

fn implicit_order(n: &str) -> (usize, u64) {
    match REAL_COORDS.iter().position(|c| *c == n) {
        Some(k) => (k, 0),
        None => (4, n[1..].parse().unwrap_or(u64::MAX)),
    }
}

/// Parses a single expression over the given parameter names.
pub fn parse_expr(src: &str, params: &[&str]) -> Result<Expr> {
    let declared: Vec<String> = params.iter().map(|s| s.to_string()).collect();
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        names: declared.clone(),
        declared: Some(declared),
        real_only: false,
    };
    let e = p.expr()?;
    match p.peek().tok {
        Tok::Eof | Tok::Newline => Ok(e),
        _ => p.fail(&["operator", "end of input"]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::expr::Val;

    #[test]
    fn smallest_product() {
        let d = parse("y2 = x1*y1").unwrap();
        assert_eq!(d.params, vec!["x1", "y1"]);
        match &d.assigns {
            Assignments::Real(a) => {
                assert!(a[0].is_none() && a[1].is_none() && a[2].is_none());
                assert_eq!(a[3], Some(Expr::Mul(Box::new(Expr::Var(0)), Box::new(Expr::Var(1)))));
            }
            _ => panic!("real form expected"),
        }
    }

    #[test]
    fn undeclared_identifier() {
        assert_eq!(parse("y2 = a*x1^2"), Err(Error::UnknownIdentifier("a".into())));
        assert_eq!(parse("params: s t\nx1 = s + u"), Err(Error::UnknownIdentifier("u".into())));
    }

    #[test]
    fn trig_product_evaluates_to_zero() {
        let d = parse("x2 = sin(s1)*cos(s2)").unwrap();
        assert_eq!(d.params, vec!["s1", "s2"]);
        let v = d.eval(&[0.0, 0.0]).unwrap();
        assert_eq!(v[0].im, 0.0);
    }

    #[test]
    fn precedence_and_associativity() {
        let e = parse_expr("-2^2 + 3*4 - 2 - 1", &[]).unwrap();
        match e.eval::<f64>(&[]).unwrap() {
            Val::Re(v) => assert_eq!(v, -4.0 + 12.0 - 3.0),
            _ => panic!(),
        }
        let e = parse_expr("2^3^2", &[]).unwrap();
        match e.eval::<f64>(&[]).unwrap() {
            Val::Re(v) => assert!((v - 512.0).abs() < 1e-9),
            _ => panic!(),
        }
        let e = parse_expr("8/2/2", &[]).unwrap();
        match e.eval::<f64>(&[]).unwrap() {
            Val::Re(v) => assert_eq!(v, 2.0),
            _ => panic!(),
        }
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse("params: s t\nx1 = (s + t") {
            Err(Error::Syntax { line, col, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(col, 12);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("x1 = s1 +"), Err(Error::Syntax { line: 1, .. })));
        assert!(matches!(parse("y1 = i*s1"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("x = s1\ny1 = s2"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn complex_form_and_headers() {
        let src = "# paraboloid\nparams: s t\ndomain: [-1, 1] x [-1, 1]\nx = s\ny = t + i*(s^2 + t^2)/2\n";
        let d = parse(src).unwrap();
        assert_eq!(d.domain, Some(vec![(-1.0, 1.0), (-1.0, 1.0)]));
        let v = d.eval(&[0.5, 0.5]).unwrap();
        assert!((v[1].im - 0.25).abs() < 1e-15);
        let printed = d.print();
        assert_eq!(parse(&printed).unwrap(), d);
        assert_eq!(parse(&printed).unwrap().print(), printed);
    }

    #[test]
    fn division_by_zero_is_domain_error() {
        let d = parse("params: s t\nx1 = s/t\nx2 = t").unwrap();
        assert!(matches!(d.eval(&[1.0, 0.0]), Err(Error::Domain(_))));
        assert!(d.eval(&[1.0, 1e-13]).is_ok());
    }
}
