//! Warping-function expressions.
//!
//! Grammar, loosest to tightest binding:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          (right-associative)
//! primary := number | ident | func '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Functions are `exp log sqrt sin cos sinh cosh` (one argument) and
//! `pow` (two). The variable is `t` unless another variable list is given;
//! any other identifier is a scalar parameter bound at evaluation time.
//! [`WarpExpr`]'s `Display` writes a fully parenthesized form of the same
//! grammar, so `parse(&e.to_string())` rebuilds `e`.

mod jet;
mod parser;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use jet::Jet2;

/// Parameter name to value.
pub type Bindings = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Pow,
}

impl Func {
    pub const ALL: [Func; 8] = [
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Sin,
        Func::Cos,
        Func::Sinh,
        Func::Cosh,
        Func::Pow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Pow => "pow",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Pow => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Lit(f64),
    Param(String),
    /// Index into the expression's variable list.
    Var(usize),
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

/// A parsed expression tree together with its parameter and variable names.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpExpr {
    root: Node,
    params: BTreeSet<String>,
    vars: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedToken,
    UnknownIdentifier,
    UnknownFunction,
    ArityMismatch,
    EmptyInput,
    NestingTooDeep,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParseErrorKind::UnexpectedToken => "unexpected token",
            ParseErrorKind::UnknownIdentifier => "unknown identifier",
            ParseErrorKind::UnknownFunction => "unknown function",
            ParseErrorKind::ArityMismatch => "arity mismatch",
            ParseErrorKind::EmptyInput => "empty input",
            ParseErrorKind::NestingTooDeep => "nesting too deep",
        })
    }
}

/// Parse failure; `position` is a character index into the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("{kind} at index {position}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),
    #[error("{func} outside its domain at `{subexpr}` (argument {arg})")]
    Domain {
        func: &'static str,
        subexpr: String,
        arg: f64,
    },
    #[error("division by zero in `{0}`")]
    DivisionByZero(String),
    #[error("non-finite value produced by `{0}`")]
    NonFinite(String),
    #[error("expected {expected} variable values, got {got}")]
    VariableCount { expected: usize, got: usize },
}

/// Parses a warping function of `t`.
pub fn parse(source: &str) -> Result<WarpExpr, ParseError> {
    WarpExpr::parse(source)
}

/// `(f(t), f'(t), f''(t))` for a single-variable expression.
pub fn eval_jet2(expr: &WarpExpr, t: f64, bindings: &Bindings) -> Result<Jet2, EvalError> {
    expr.eval_jet2(t, bindings)
}

pub fn serialize(expr: &WarpExpr) -> String {
    expr.to_string()
}

impl WarpExpr {
    pub fn parse(source: &str) -> Result<Self, ParseError> {
        parser::parse_with_vars(source, &["t".to_string()])
    }

    /// Parses with an explicit variable list, e.g. `x_1, x_2` for graph functions.
    pub fn parse_with_vars<S: AsRef<str>>(source: &str, vars: &[S]) -> Result<Self, ParseError> {
        let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        parser::parse_with_vars(source, &vars)
    }

    /// Builds an expression from a tree, collecting its parameters.
    pub fn from_node(root: Node, vars: Vec<String>) -> Self {
        fn collect(n: &Node, out: &mut BTreeSet<String>) {
            match n {
                Node::Param(p) => {
                    out.insert(p.clone());
                }
                Node::Neg(a) => collect(a, out),
                Node::Binary(_, a, b) => {
                    collect(a, out);
                    collect(b, out);
                }
                Node::Call(_, args) => args.iter().for_each(|a| collect(a, out)),
                Node::Lit(_) | Node::Var(_) => {}
            }
        }
        let mut params = BTreeSet::new();
        collect(&root, &mut params);
        Self { root, params, vars }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn params(&self) -> &BTreeSet<String> {
        &self.params
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Returns the first parameter missing from `bindings`, if any.
    pub fn unbound_param<'a>(&'a self, bindings: &Bindings) -> Option<&'a str> {
        self.params
            .iter()
            .find(|p| !bindings.contains_key(*p))
            .map(String::as_str)
    }

    pub fn eval_jet2(&self, t: f64, bindings: &Bindings) -> Result<Jet2, EvalError> {
        self.eval_seeded(&[Jet2::variable(t)], bindings)
    }

    /// Plain value at a point in the variable space.
    pub fn eval(&self, point: &[f64], bindings: &Bindings) -> Result<f64, EvalError> {
        let seeds: Vec<Jet2> = point.iter().map(|&x| Jet2::constant(x)).collect();
        self.eval_seeded(&seeds, bindings).map(|j| j.v)
    }

    /// Evaluates with one jet per variable, so a caller can differentiate
    /// along any line through variable space.
    pub fn eval_seeded(&self, seeds: &[Jet2], bindings: &Bindings) -> Result<Jet2, EvalError> {
        if seeds.len() != self.vars.len() {
            return Err(EvalError::VariableCount {
                expected: self.vars.len(),
                got: seeds.len(),
            });
        }
        let j = self.eval_node(&self.root, seeds, bindings)?;
        Ok(j)
    }

    fn eval_node(&self, node: &Node, seeds: &[Jet2], b: &Bindings) -> Result<Jet2, EvalError> {
        let out = match node {
            Node::Lit(v) => Jet2::constant(*v),
            Node::Var(k) => seeds[*k],
            Node::Param(p) => Jet2::constant(
                *b.get(p)
                    .ok_or_else(|| EvalError::UnboundParameter(p.clone()))?,
            ),
            Node::Neg(a) => -self.eval_node(a, seeds, b)?,
            Node::Binary(op, l, r) => {
                let x = self.eval_node(l, seeds, b)?;
                let y = self.eval_node(r, seeds, b)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => x
                        .checked_div(y)
                        .ok_or_else(|| EvalError::DivisionByZero(self.show(node)))?,
                    BinOp::Pow => self.pow(node, x, y)?,
                }
            }
            Node::Call(func, args) => {
                let x = self.eval_node(&args[0], seeds, b)?;
                let domain = |arg: f64| EvalError::Domain {
                    func: func.name(),
                    subexpr: self.show(node),
                    arg,
                };
                match func {
                    Func::Exp => x.exp(),
                    Func::Log => x.ln().ok_or_else(|| domain(x.v))?,
                    Func::Sqrt => x.sqrt().ok_or_else(|| domain(x.v))?,
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Sinh => x.sinh(),
                    Func::Cosh => x.cosh(),
                    Func::Pow => {
                        let y = self.eval_node(&args[1], seeds, b)?;
                        self.pow(node, x, y)?
                    }
                }
            }
        };
        if !(out.v.is_finite() && out.d1.is_finite() && out.d2.is_finite()) {
            return Err(EvalError::NonFinite(self.show(node)));
        }
        Ok(out)
    }

    /// Constant exponents use the power rule; otherwise `exp(y * log x)` with `x > 0`.
    fn pow(&self, node: &Node, x: Jet2, y: Jet2) -> Result<Jet2, EvalError> {
        let domain = |arg: f64| EvalError::Domain {
            func: "pow",
            subexpr: self.show(node),
            arg,
        };
        if y.is_constant() {
            return x.powc(y.v).ok_or_else(|| domain(x.v));
        }
        let lx = x.ln().ok_or_else(|| domain(x.v))?;
        Ok((y * lx).exp())
    }

    fn show(&self, node: &Node) -> String {
        let mut s = String::new();
        write_node(&mut s, node, &self.vars).expect("writing to a String cannot fail");
        s
    }
}

fn write_node(out: &mut impl fmt::Write, node: &Node, vars: &[String]) -> fmt::Result {
    match node {
        // Debug formatting of f64 is the shortest round-tripping form.
        Node::Lit(v) => write!(out, "{v:?}"),
        Node::Param(p) => out.write_str(p),
        Node::Var(k) => out.write_str(&vars[*k]),
        Node::Neg(a) => {
            out.write_str("(-")?;
            write_node(out, a, vars)?;
            out.write_char(')')
        }
        Node::Binary(op, l, r) => {
            out.write_char('(')?;
            write_node(out, l, vars)?;
            out.write_char(op.symbol())?;
            write_node(out, r, vars)?;
            out.write_char(')')
        }
        Node::Call(func, args) => {
            out.write_str(func.name())?;
            out.write_char('(')?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.write_char(',')?;
                }
                write_node(out, a, vars)?;
            }
            out.write_char(')')
        }
    }
}

impl fmt::Display for WarpExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, &self.root, &self.vars)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jet(src: &str, t: f64) -> Jet2 {
        parse(src).unwrap().eval_jet2(t, &Bindings::new()).unwrap()
    }

    #[test]
    fn parses_single_call() {
        let e = parse("exp(t)").unwrap();
        assert_eq!(
            *e.root(),
            Node::Call(Func::Exp, vec![Node::Var(0)])
        );
        assert!(e.params().is_empty());
    }

    #[test]
    fn collects_parameters() {
        let e = parse("sqrt(a^2 - t^2)").unwrap();
        assert_eq!(e.params().iter().collect::<Vec<_>>(), vec!["a"]);
    }

    #[test]
    fn double_caret_is_rejected_at_second_caret() {
        let err = parse("2^^t").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedToken);
        assert_eq!(err.position, 2);
    }

    #[test]
    fn error_kinds() {
        assert_eq!(parse("").unwrap_err().kind, ParseErrorKind::EmptyInput);
        assert_eq!(parse("   ").unwrap_err().kind, ParseErrorKind::EmptyInput);
        let e = parse("foo(t)").unwrap_err();
        assert_eq!((e.kind, e.position), (ParseErrorKind::UnknownFunction, 0));
        let e = parse("1 + pow(t)").unwrap_err();
        assert_eq!((e.kind, e.position), (ParseErrorKind::ArityMismatch, 4));
        let e = parse("exp + 1").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownIdentifier);
        let e = parse("exp(t").unwrap_err();
        assert_eq!((e.kind, e.position), (ParseErrorKind::UnexpectedToken, 5));
        let e = parse("t $ 2").unwrap_err();
        assert_eq!((e.kind, e.position), (ParseErrorKind::UnexpectedToken, 2));
        let deep = "(".repeat(10_000);
        assert_eq!(parse(&deep).unwrap_err().kind, ParseErrorKind::NestingTooDeep);
    }

    #[test]
    fn precedence() {
        // -t^2 is -(t^2); 2^3^2 is 2^(3^2); a*t+b groups the product
        assert_eq!(parse("-t^2").unwrap().to_string(), "(-(t^2.0))");
        assert_eq!(jet("-t^2", 3.0).v, -9.0);
        assert_eq!(jet("2^3^2", 0.0).v, 512.0);
        assert_eq!(parse("a*t+b").unwrap().to_string(), "((a*t)+b)");
        assert_eq!(jet("2^-1", 0.0).v, 0.5);
        assert_eq!(jet("8/4/2", 0.0).v, 1.0);
        assert_eq!(jet("1-2-3", 0.0).v, -4.0);
    }

    #[test]
    fn serialize_examples() {
        assert_eq!(serialize(&parse("exp(t)").unwrap()), "exp(t)");
        let e = parse("sqrt(a^2 - t^2)").unwrap();
        assert_eq!(parse(&serialize(&e)).unwrap(), e);
        let e = parse("-t^2").unwrap();
        assert_eq!(parse(&serialize(&e)).unwrap(), e);
        assert_eq!(*e.root(), Node::Neg(Box::new(Node::Binary(
            BinOp::Pow,
            Box::new(Node::Var(0)),
            Box::new(Node::Lit(2.0)),
        ))));
    }

    #[test]
    fn jets_of_reference_functions() {
        assert_eq!(jet("exp(t)", 0.0), Jet2::new(1.0, 1.0, 1.0));
        let j = jet("t^(2/3)", 1.0);
        assert!((j.v - 1.0).abs() < 1e-15);
        assert!((j.d1 - 2.0 / 3.0).abs() < 1e-15);
        assert!((j.d2 + 2.0 / 9.0).abs() < 1e-15);
        assert_eq!(jet("exp(-t^2)", 0.0), Jet2::new(1.0, 0.0, -2.0));
        // variable exponent goes through exp(g log f): t^t at 1 -> (1, 1, 2)
        let j = jet("t^t", 1.0);
        assert!((j.v - 1.0).abs() < 1e-15 && (j.d1 - 1.0).abs() < 1e-15 && (j.d2 - 2.0).abs() < 1e-14);
        assert_eq!(jet("pow(t, 2)", -3.0), Jet2::new(9.0, -6.0, 2.0));
    }

    #[test]
    fn evaluation_errors_are_typed() {
        let e = parse("sqrt(a^2 - t^2)").unwrap();
        assert_eq!(
            e.eval_jet2(0.0, &Bindings::new()).unwrap_err(),
            EvalError::UnboundParameter("a".into())
        );
        let b = Bindings::from([("a".to_string(), 1.0)]);
        match e.eval_jet2(2.0, &b).unwrap_err() {
            EvalError::Domain { func, subexpr, arg } => {
                assert_eq!(func, "sqrt");
                assert_eq!(subexpr, "sqrt(((a^2.0)-(t^2.0)))");
                assert_eq!(arg, -3.0);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse("1/t").unwrap().eval_jet2(0.0, &b),
            Err(EvalError::DivisionByZero(_))
        ));
        assert!(matches!(
            parse("log(t)").unwrap().eval_jet2(-1.0, &b),
            Err(EvalError::Domain { func: "log", .. })
        ));
        assert!(matches!(
            parse("exp(exp(t))").unwrap().eval_jet2(10.0, &b),
            Err(EvalError::NonFinite(_))
        ));
    }

    #[test]
    fn graph_variables() {
        let e = WarpExpr::parse_with_vars("0.5*x_1 + x_2^2", &["x_1", "x_2"]).unwrap();
        assert_eq!(e.eval(&[2.0, 3.0], &Bindings::new()).unwrap(), 10.0);
        let err = WarpExpr::parse_with_vars("x_3", &["x_1", "x_2"]).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier);
        assert!(e.eval(&[1.0], &Bindings::new()).is_err());
    }
}
