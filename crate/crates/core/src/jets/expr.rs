//! Abstract syntax of the surface-definition language, its canonical
//! printer and a generic evaluator.

use super::{Cx, Scalar};
use crate::{Error, Result};
use std::fmt::{self, Write as _};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Ln,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Ln => "ln",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "ln" => Func::Ln,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// The imaginary unit `i`.
    Imag,
    Pi,
    /// Index into the parameter list of the owning definition.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Value of a sub-expression: real until the imaginary unit shows up.
#[derive(Debug, Clone, Copy)]
pub enum Val<T> {
    Re(T),
    Cx(Cx<T>),
}

impl<T: Scalar> Val<T> {
    pub fn to_cx(self) -> Cx<T> {
        match self {
            Val::Re(r) => Cx::real(r),
            Val::Cx(c) => c,
        }
    }
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    /// True if the imaginary unit occurs anywhere in the tree.
    pub fn is_complex(&self) -> bool {
        match self {
            Expr::Imag => true,
            Expr::Num(_) | Expr::Pi | Expr::Var(_) => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.is_complex(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.is_complex() || b.is_complex(),
        }
    }

    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Var(i) => Some(*i),
            Expr::Num(_) | Expr::Pi | Expr::Imag => None,
            Expr::Neg(a) | Expr::Call(_, a) => a.max_var(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.max_var().max(b.max_var()),
        }
    }

    pub(crate) fn remap(&mut self, map: &[usize]) {
        match self {
            Expr::Var(i) => *i = map[*i],
            Expr::Num(_) | Expr::Pi | Expr::Imag => {}
            Expr::Neg(a) | Expr::Call(_, a) => a.remap(map),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => {
                a.remap(map);
                b.remap(map);
            }
        }
    }

    /// Integer value of a constant exponent such as `2` or `-3`.
    fn const_int(&self) -> Option<i32> {
        match self {
            Expr::Num(v) if v.fract() == 0.0 && v.abs() <= 64.0 => Some(*v as i32),
            Expr::Neg(a) => a.const_int().map(|n| -n),
            _ => None,
        }
    }

    pub fn eval<T: Scalar>(&self, vars: &[T]) -> Result<Val<T>> {
        use Val::{Cx as C, Re as R};
        Ok(match self {
            Expr::Num(v) => R(T::cst(*v)),
            Expr::Pi => R(T::cst(std::f64::consts::PI)),
            Expr::Imag => C(Cx::cst(0.0, 1.0)),
            Expr::Var(i) => R(*vars.get(*i).ok_or_else(|| {
                Error::InvalidInput(format!("parameter {i} not supplied"))
            })?),
            Expr::Neg(a) => match a.eval(vars)? {
                R(x) => R(-x),
                C(z) => C(-z),
            },
            Expr::Add(a, b) => match (a.eval(vars)?, b.eval(vars)?) {
                (R(x), R(y)) => R(x + y),
                (x, y) => C(x.to_cx() + y.to_cx()),
            },
            Expr::Sub(a, b) => match (a.eval(vars)?, b.eval(vars)?) {
                (R(x), R(y)) => R(x - y),
                (x, y) => C(x.to_cx() - y.to_cx()),
            },
            Expr::Mul(a, b) => match (a.eval(vars)?, b.eval(vars)?) {
                (R(x), R(y)) => R(x * y),
                (R(x), C(z)) | (C(z), R(x)) => C(z.scale(x)),
                (C(z), C(w)) => C(z * w),
            },
            Expr::Div(a, b) => match (a.eval(vars)?, b.eval(vars)?) {
                (x, R(y)) => {
                    if !y.is_safe_divisor() {
                        return Err(Error::Domain(format!(
                            "division by {:e} (below {:e})",
                            y.val(),
                            crate::tol::DIVISOR_FLOOR
                        )));
                    }
                    match x {
                        R(x) => R(x / y),
                        C(z) => C(Cx::new(z.re / y, z.im / y)),
                    }
                }
                (x, C(w)) => C(x.to_cx().checked_div(w)?),
            },
            Expr::Pow(a, b) => {
                let base = a.eval(vars)?;
                if let Some(n) = b.const_int() {
                    match base {
                        R(x) => {
                            if n < 0 && !x.is_safe_divisor() {
                                return Err(Error::Domain("negative power of zero".into()));
                            }
                            R(x.powi(n))
                        }
                        C(z) => C(z.powi(n)?),
                    }
                } else {
                    match (base, b.eval(vars)?) {
                        (R(x), R(e)) => {
                            if !x.is_positive() {
                                return Err(Error::Domain(format!(
                                    "non-integer power of non-positive base {:e}",
                                    x.val()
                                )));
                            }
                            R((e * x.ln()).exp())
                        }
                        _ => {
                            return Err(Error::Domain(
                                "complex powers need a constant integer exponent".into(),
                            ))
                        }
                    }
                }
            }
            Expr::Call(f, a) => match (f, a.eval(vars)?) {
                (Func::Sin, R(x)) => R(x.sin()),
                (Func::Cos, R(x)) => R(x.cos()),
                (Func::Exp, R(x)) => R(x.exp()),
                (Func::Sin, C(z)) => C(z.sin()),
                (Func::Cos, C(z)) => C(z.cos()),
                (Func::Exp, C(z)) => C(z.exp()),
                (Func::Sqrt, R(x)) => {
                    if x.val() < 0.0 {
                        return Err(Error::Domain(format!("sqrt of {:e}", x.val())));
                    }
                    R(x.sqrt())
                }
                (Func::Ln, R(x)) => {
                    if !x.is_positive() {
                        return Err(Error::Domain(format!("ln of {:e}", x.val())));
                    }
                    R(x.ln())
                }
                (f, C(_)) => {
                    return Err(Error::Domain(format!("{} of a complex argument", f.name())))
                }
            },
        })
    }

    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Num(v) if v.is_sign_negative() => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    /// Canonical text with the fewest parentheses that reparse to the same tree.
    pub fn print(&self, names: &[String]) -> String {
        let mut s = String::new();
        self.write(names, 0, &mut s);
        s
    }

    fn write(&self, names: &[String], min: u8, out: &mut String) {
        let p = self.prec();
        if p < min {
            out.push('(');
            self.write(names, 0, out);
            out.push(')');
            return;
        }
        match self {
            Expr::Num(v) if v.is_sign_negative() => {
                out.push('-');
                let _ = write!(out, "{}", -v);
            }
            Expr::Num(v) => {
                let _ = write!(out, "{v}");
            }
            Expr::Imag => out.push('i'),
            Expr::Pi => out.push_str("pi"),
            Expr::Var(i) => match names.get(*i) {
                Some(n) => out.push_str(n),
                None => {
                    let _ = write!(out, "s{}", i + 1);
                }
            },
            Expr::Neg(a) => {
                out.push('-');
                a.write(names, 3, out);
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.write(names, 1, out);
                out.push_str(if matches!(self, Expr::Add(..)) { " + " } else { " - " });
                b.write(names, 2, out);
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.write(names, 2, out);
                out.push_str(if matches!(self, Expr::Mul(..)) { "*" } else { "/" });
                b.write(names, 3, out);
            }
            Expr::Pow(a, b) => {
                a.write(names, 5, out);
                out.push('^');
                b.write(names, 3, out);
            }
            Expr::Call(f, a) => {
                out.push_str(f.name());
                out.push('(');
                a.write(names, 0, out);
                out.push(')');
            }
        }
    }
}

/// Coordinate assignments of a definition, either per real coordinate or
/// per complex coordinate.
#[derive(Debug, Clone, PartialEq)]
pub enum Assignments {
    /// `x1, x2, y1, y2` in that order.
    Real([Option<Expr>; 4]),
    Complex { x: Option<Expr>, y: Option<Expr> },
}

pub const REAL_COORDS: [&str; 4] = ["x1", "x2", "y1", "y2"];

/// A parsed surface definition: parameters, optional domain and periodicity
/// declarations, and the coordinate assignments.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceDef {
    pub params: Vec<String>,
    pub domain: Option<Vec<(f64, f64)>>,
    pub periodic: Vec<usize>,
    pub assigns: Assignments,
}

impl SurfaceDef {
    pub fn dim(&self) -> usize {
        self.params.len()
    }

    fn param_named(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p == name)
    }

    /// Evaluates the affine point (x, y) of ℂ². Unassigned coordinates equal the
    /// parameter of the same name when there is one, and zero otherwise.
    pub fn eval<T: Scalar>(&self, p: &[T]) -> Result<[Cx<T>; 2]> {
        if p.len() != self.params.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} parameters, got {}",
                self.params.len(),
                p.len()
            )));
        }
        let fallback = |name: &str| match self.param_named(name) {
            Some(i) => p[i],
            None => T::cst(0.0),
        };
        match &self.assigns {
            Assignments::Real(a) => {
                let mut r = [T::cst(0.0); 4];
                for k in 0..4 {
                    r[k] = match &a[k] {
                        Some(e) => match e.eval(p)? {
                            Val::Re(v) => v,
                            Val::Cx(_) => {
                                return Err(Error::Domain(format!(
                                    "{} evaluates to a complex number",
                                    REAL_COORDS[k]
                                )))
                            }
                        },
                        None => fallback(REAL_COORDS[k]),
                    };
                }
                Ok([Cx::new(r[0], r[1]), Cx::new(r[2], r[3])])
            }
            Assignments::Complex { x, y } => {
                let one = |e: &Option<Expr>, name: &str| -> Result<Cx<T>> {
                    match e {
                        Some(e) => Ok(e.eval(p)?.to_cx()),
                        None => Ok(Cx::real(fallback(name))),
                    }
                };
                Ok([one(x, "x")?, one(y, "y")?])
            }
        }
    }

    /// Canonical text form; reparses to an equal definition.
    pub fn print(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SurfaceDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "params: {}", self.params.join(" "))?;
        if let Some(d) = &self.domain {
            let parts: Vec<String> = d.iter().map(|(a, b)| format!("[{a}, {b}]")).collect();
            writeln!(f, "domain: {}", parts.join(" x "))?;
        }
        if !self.periodic.is_empty() {
            let names: Vec<&str> = self.periodic.iter().map(|&i| self.params[i].as_str()).collect();
            writeln!(f, "periodic: {}", names.join(" "))?;
        }
        match &self.assigns {
            Assignments::Real(a) => {
                for (k, e) in a.iter().enumerate() {
                    if let Some(e) = e {
                        writeln!(f, "{} = {}", REAL_COORDS[k], e.print(&self.params))?;
                    }
                }
            }
            Assignments::Complex { x, y } => {
                for (n, e) in [("x", x), ("y", y)] {
                    if let Some(e) = e {
                        writeln!(f, "{n} = {}", e.print(&self.params))?;
                    }
                }
            }
        }
        Ok(())
    }
}
