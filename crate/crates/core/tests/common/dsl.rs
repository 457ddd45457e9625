//! Potential DSL oracles: a golden table and a second evaluator that works
//! directly on the text.

use graphnls::potential::parse;
use graphnls::Error;
use proptest::prelude::*;

pub enum Expect {
    Value(f64, f64),
    Syntax(usize),
    Unknown(usize),
    EvalFails(f64),
}

use Expect::*;

pub const GOLDEN: &[(&str, Expect)] = &[
    ("0", Value(0.0, 0.0)),
    ("2+3*4", Value(0.0, 14.0)),
    ("2^3^2", Value(0.0, 512.0)),
    ("(2^3)^2", Value(0.0, 64.0)),
    ("2*(1+1)*cos(0)", Value(0.0, 4.0)),
    ("x^2", Value(3.0, 9.0)),
    ("sech(x)", Value(0.0, 1.0)),
    ("-2^2", Value(0.0, -4.0)),
    ("(-2)^2", Value(0.0, 4.0)),
    ("2^-1", Value(0.0, 0.5)),
    ("10-4-3", Value(0.0, 3.0)),
    ("64/4/2", Value(0.0, 8.0)),
    ("2*3/4", Value(0.0, 1.5)),
    ("1-2*3+4", Value(0.0, -1.0)),
    ("-x", Value(2.0, -2.0)),
    ("--x", Value(2.0, 2.0)),
    ("2--3", Value(0.0, 5.0)),
    ("2*-3", Value(0.0, -6.0)),
    ("-x^2", Value(3.0, -9.0)),
    ("2^x^2", Value(3.0, 512.0)),
    (" 1 +\t2\n", Value(0.0, 3.0)),
    ("1.5e2", Value(0.0, 150.0)),
    ("2.5E-1", Value(0.0, 0.25)),
    (".5", Value(0.0, 0.5)),
    ("abs(-3)", Value(0.0, 3.0)),
    ("sqrt(16)", Value(0.0, 4.0)),
    ("exp(0)", Value(0.0, 1.0)),
    ("sin(0)+cos(0)", Value(0.0, 1.0)),
    ("sech(0)^2", Value(0.0, 1.0)),
    ("-2*exp(-x^2)", Value(0.0, -2.0)),
    ("x*x - 2*x + 1", Value(1.0, 0.0)),
    ("((x))", Value(7.0, 7.0)),
    ("abs(x-5)", Value(2.0, 3.0)),
    ("1/(1+x^2)", Value(1.0, 0.5)),
    ("-2^-2", Value(0.0, -0.25)),
    ("3*2^2", Value(0.0, 12.0)),
    ("2^2*3", Value(0.0, 12.0)),
    ("-3*-2", Value(0.0, 6.0)),
    ("sqrt(x)^2", Value(9.0, 9.0)),
    ("", Syntax(0)),
    ("2*+", Syntax(2)),
    ("(1+2", Syntax(4)),
    ("1 2", Syntax(2)),
    ("x^", Syntax(2)),
    ("foo(x)", Unknown(0)),
    ("3 $ 4", Syntax(2)),
    ("sin x", Syntax(4)),
    ("2+y", Unknown(2)),
    ("1..2", Syntax(0)),
    (")", Syntax(0)),
    ("2e", Syntax(1)),
    ("1/(x-x)", EvalFails(0.3)),
    ("sqrt(-1)", EvalFails(0.0)),
    ("(-8)^(1/3)", EvalFails(0.0)),
];

// Second evaluator: recursive descent over the raw bytes, computing values
// while parsing. Shares nothing with the library parser.
struct Direct<'a> {
    s: &'a [u8],
    i: usize,
    x: f64,
}

impl Direct<'_> {
    fn skip(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip();
        self.s.get(self.i).copied()
    }

    fn sum(&mut self) -> Result<f64, usize> {
        let mut v = self.product()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.i += 1;
                    v += self.product()?;
                }
                Some(b'-') => {
                    self.i += 1;
                    v -= self.product()?;
                }
                _ => return Ok(v),
            }
        }
    }

    fn product(&mut self) -> Result<f64, usize> {
        let mut v = self.signed()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.i += 1;
                    v *= self.signed()?;
                }
                Some(b'/') => {
                    self.i += 1;
                    v /= self.signed()?;
                }
                _ => return Ok(v),
            }
        }
    }

    fn signed(&mut self) -> Result<f64, usize> {
        if self.peek() == Some(b'-') {
            self.i += 1;
            return Ok(-self.signed()?);
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.i += 1;
            return Ok(base.powf(self.signed()?));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<f64, usize> {
        let start = self.i;
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let v = self.sum()?;
                self.close()?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let begin = self.i;
                while self.i < self.s.len() && (self.s[self.i].is_ascii_digit() || self.s[self.i] == b'.') {
                    self.i += 1;
                }
                if self.i < self.s.len() && matches!(self.s[self.i], b'e' | b'E') {
                    let mut j = self.i + 1;
                    if j < self.s.len() && matches!(self.s[j], b'+' | b'-') {
                        j += 1;
                    }
                    if j < self.s.len() && self.s[j].is_ascii_digit() {
                        while j < self.s.len() && self.s[j].is_ascii_digit() {
                            j += 1;
                        }
                        self.i = j;
                    }
                }
                std::str::from_utf8(&self.s[begin..self.i]).unwrap().parse().map_err(|_| begin)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let begin = self.i;
                while self.i < self.s.len() && self.s[self.i].is_ascii_alphanumeric() {
                    self.i += 1;
                }
                let name = std::str::from_utf8(&self.s[begin..self.i]).unwrap();
                if name == "x" {
                    return Ok(self.x);
                }
                let f: fn(f64) -> f64 = match name {
                    "exp" => f64::exp,
                    "sin" => f64::sin,
                    "cos" => f64::cos,
                    "sech" => |v| 1.0 / v.cosh(),
                    "sqrt" => f64::sqrt,
                    "abs" => f64::abs,
                    _ => return Err(begin),
                };
                if self.peek() != Some(b'(') {
                    return Err(self.i);
                }
                self.i += 1;
                let v = self.sum()?;
                self.close()?;
                Ok(f(v))
            }
            _ => Err(start),
        }
    }

    fn close(&mut self) -> Result<(), usize> {
        if self.peek() == Some(b')') {
            self.i += 1;
            Ok(())
        } else {
            Err(self.i)
        }
    }
}

pub fn oracle(src: &str, x: f64) -> Result<f64, usize> {
    let mut d = Direct { s: src.as_bytes(), i: 0, x };
    let v = d.sum()?;
    match d.peek() {
        None => Ok(v),
        Some(_) => Err(d.i),
    }
}

pub fn number() -> impl Strategy<Value = String> {
    prop_oneof![
        (0u32..100).prop_map(|a| a.to_string()),
        (0u32..100, 0u32..1000).prop_map(|(a, b)| format!("{a}.{b}")),
        (1u32..10, 0u32..4).prop_map(|(a, b)| format!("{a}e-{b}")),
    ]
}

/// Random well-formed expression text. Binary operators are joined without
/// protective parentheses half of the time, so precedence and associativity
/// decide the meaning.
pub fn expression() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![Just("x".to_string()), number()];
    leaf.prop_recursive(5, 48, 3, |inner| {
        prop_oneof![
            (inner.clone(), prop::sample::select(vec!["+", "-", "*", "/", "^"]), inner.clone(), any::<bool>())
                .prop_map(|(a, op, b, wrap)| if wrap {
                    format!("({a} {op} {b})")
                } else {
                    format!("{a}{op}{b}")
                }),
            inner.clone().prop_map(|a| format!("-{a}")),
            (prop::sample::select(vec!["exp", "sin", "cos", "sech", "sqrt", "abs"]), inner.clone())
                .prop_map(|(f, a)| format!("{f}( {a} )")),
            inner.prop_map(|a| format!("({a})")),
        ]
    })
}

/// Runs the golden table; returns the number of cases.
pub fn check_golden() -> Result<usize, String> {
    for (src, expect) in GOLDEN {
        let parsed = parse(src);
        match expect {
            Value(x, want) => {
                let got = parsed.map_err(|e| format!("{src:?}: {e}"))?.evaluate(*x).map_err(|e| format!("{src:?}: {e}"))?;
                if got != *want {
                    return Err(format!("{src:?} at x = {x}: {got} != {want}"));
                }
                if oracle(src, *x) != Ok(*want) {
                    return Err(format!("oracle disagrees on {src:?}"));
                }
            }
            Syntax(at) => match parsed {
                Err(Error::Syntax { offset, .. }) if offset == *at => {}
                other => return Err(format!("{src:?}: expected a syntax error at byte {at}, got {other:?}")),
            },
            Unknown(at) => match parsed {
                Err(Error::UnknownIdentifier { offset, .. }) if offset == *at => {}
                other => return Err(format!("{src:?}: expected an unknown identifier at byte {at}, got {other:?}")),
            },
            EvalFails(x) => {
                let e = parsed.map_err(|e| format!("{src:?}: {e}"))?;
                if !matches!(e.evaluate(*x), Err(Error::NonFinite { .. })) {
                    return Err(format!("{src:?}: evaluation at {x} should fail"));
                }
            }
        }
    }
    Ok(GOLDEN.len())
}

/// Library parser against the direct evaluator on one expression.
pub fn differential(src: &str, x: f64) -> Result<(), TestCaseError> {
    let expr = parse(src).map_err(|e| TestCaseError::fail(format!("{src:?}: {e}")))?;
    let want = oracle(src, x).map_err(|at| TestCaseError::fail(format!("oracle rejects {src:?} at {at}")))?;
    match expr.evaluate(x) {
        Ok(got) => prop_assert!((got - want).abs() <= 1e-14 * want.abs().max(1.0), "{src:?}: {got} vs {want}"),
        Err(_) => prop_assert!(!want.is_finite(), "{src:?}: library failed, oracle gave {want}"),
    }
    Ok(())
}
