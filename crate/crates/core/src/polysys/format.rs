//! Plain-text system files.
//!
//! ```text
//! n 2 d 1
//! x0^3*x1 - 1;
//! (0.5,-1)*x0 + ((1,0) + (0,2)*t)*x1^2 + t;
//! ```
//!
//! The optional header gives the variable count and the coefficient degree.
//! Each polynomial is a `;`-terminated sum of terms; a term is a product of
//! real numbers, complex literals `(re,im)`, powers `x<i>^e` and `t^k`, and
//! parenthesized sums in `t`. Every term becomes one monomial, so terms are
//! never merged. `#` starts a comment.

use super::{Monomial, PolysysError, SparseSystem};
use crate::series::TruncatedSeries;
use crate::xprec::{Complex, Real};

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor { src: text.as_bytes(), pos: 0 }
    }

    fn location(&self, pos: usize) -> (usize, usize) {
        let before = &self.src[..pos.min(self.src.len())];
        let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
        let column = pos - before.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1) + 1;
        (line, column)
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> PolysysError {
        let (line, column) = self.location(pos);
        PolysysError::Syntax { line, column, message: message.into() }
    }

    fn error(&self, message: impl Into<String>) -> PolysysError {
        self.error_at(self.pos, message)
    }

    fn skip_ws(&mut self) {
        while let Some(&b) = self.src.get(self.pos) {
            if b == b'#' {
                while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<(), PolysysError> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", b as char)))
        }
    }

    fn integer(&mut self) -> Result<u64, PolysysError> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.error_at(start, "integer too large"))
    }

    /// Unsigned decimal literal; returns its text.
    fn number_text(&mut self) -> Result<&'a str, PolysysError> {
        self.skip_ws();
        let start = self.pos;
        let digits = |c: &mut Self| {
            let s = c.pos;
            while c.src.get(c.pos).is_some_and(u8::is_ascii_digit) {
                c.pos += 1;
            }
            c.pos - s
        };
        let mut n = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            self.pos = start;
            return Err(self.error("expected a number"));
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = mark;
            }
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn real<R: Real>(&mut self) -> Result<R, PolysysError> {
        let negative = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let start = self.pos;
        let text = self.number_text()?;
        let v = R::parse_decimal(text).map_err(|e| self.error_at(start, e.to_string()))?;
        Ok(if negative { -v } else { v })
    }
}

struct Parser<'a> {
    cur: Cursor<'a>,
    /// Declared variable count; `None` grows it from the variables seen.
    n: Option<usize>,
    degree: usize,
    max_var: usize,
}

/// A term before the exponent vector is padded to the final `n`.
struct RawTerm<R> {
    coefficient: TruncatedSeries<R>,
    exponents: Vec<u32>,
}

impl<'a> Parser<'a> {
    fn header(&mut self) -> Result<(), PolysysError> {
        if self.cur.peek() != Some(b'n') {
            return Ok(());
        }
        self.cur.pos += 1;
        let n = self.cur.integer()? as usize;
        if n == 0 {
            return Err(self.cur.error("n must be at least 1"));
        }
        self.n = Some(n);
        if self.cur.eat(b'd') {
            self.degree = self.cur.integer()? as usize;
        }
        Ok(())
    }

    fn polynomial<R: Real>(&mut self) -> Result<Vec<RawTerm<R>>, PolysysError> {
        let mut terms = Vec::new();
        let mut negate = self.leading_sign();
        loop {
            let mut term = self.term::<R>(false)?;
            if negate {
                term.coefficient = term.coefficient.neg();
            }
            terms.push(term);
            match self.cur.peek() {
                Some(b'+') => negate = false,
                Some(b'-') => negate = true,
                _ => break,
            }
            self.cur.pos += 1;
        }
        Ok(terms)
    }

    fn leading_sign(&mut self) -> bool {
        if self.cur.eat(b'-') {
            true
        } else {
            self.cur.eat(b'+');
            false
        }
    }

    /// Sum of terms in `t` only, inside parentheses.
    fn t_sum<R: Real>(&mut self) -> Result<TruncatedSeries<R>, PolysysError> {
        let mut acc = TruncatedSeries::zero(self.degree);
        let mut negate = self.leading_sign();
        loop {
            let term = self.term::<R>(true)?;
            let c = if negate { term.coefficient.neg() } else { term.coefficient };
            acc = acc.add(&c).expect("same degree");
            match self.cur.peek() {
                Some(b'+') => negate = false,
                Some(b'-') => negate = true,
                _ => break,
            }
            self.cur.pos += 1;
        }
        Ok(acc)
    }

    fn term<R: Real>(&mut self, t_only: bool) -> Result<RawTerm<R>, PolysysError> {
        let mut coefficient: Option<TruncatedSeries<R>> = None;
        let mut exponents: Vec<u32> = Vec::new();
        let apply = |c: &mut Option<TruncatedSeries<R>>, f: TruncatedSeries<R>| {
            *c = Some(match c.take() {
                None => f,
                Some(prev) => prev.convolve(&f).expect("same degree"),
            });
        };
        loop {
            self.cur.skip_ws();
            let start = self.cur.pos;
            match self.cur.peek() {
                Some(b'x') if !t_only => {
                    self.cur.pos += 1;
                    let i = self.cur.integer()? as usize;
                    if let Some(n) = self.n {
                        if i >= n {
                            return Err(PolysysError::VariableOutOfRange { index: i, n });
                        }
                    }
                    let e = self.exponent()?;
                    self.max_var = self.max_var.max(i + 1);
                    if exponents.len() <= i {
                        exponents.resize(i + 1, 0);
                    }
                    exponents[i] += e;
                }
                Some(b'x') => return Err(self.cur.error("variables cannot appear inside a coefficient")),
                Some(b't') => {
                    self.cur.pos += 1;
                    let k = self.exponent()? as usize;
                    if k > self.degree {
                        return Err(self
                            .cur
                            .error_at(start, format!("t^{k} exceeds the coefficient degree {}", self.degree)));
                    }
                    let mut s = TruncatedSeries::zero(self.degree);
                    s.coeffs_mut()[k] = Complex::one();
                    apply(&mut coefficient, s);
                }
                Some(b'(') => {
                    self.cur.pos += 1;
                    let s = match self.complex_literal::<R>() {
                        Some(z) => TruncatedSeries::constant(z, self.degree),
                        None => {
                            self.cur.pos = start;
                            self.cur.expect(b'(')?;
                            let s = self.t_sum()?;
                            self.cur.expect(b')')?;
                            s
                        }
                    };
                    apply(&mut coefficient, s);
                }
                Some(b) if b.is_ascii_digit() || b == b'.' => {
                    let v: R = self.cur.real()?;
                    apply(&mut coefficient, TruncatedSeries::constant(Complex::from_real(v), self.degree));
                }
                _ => return Err(self.cur.error("expected a number, '(', 't' or a variable")),
            }
            if !self.cur.eat(b'*') {
                break;
            }
        }
        Ok(RawTerm { coefficient: coefficient.unwrap_or_else(|| TruncatedSeries::one(self.degree)), exponents })
    }

    /// After an opening parenthesis: `re , im )`. Leaves the cursor in an
    /// unspecified place when it returns `None`.
    fn complex_literal<R: Real>(&mut self) -> Option<Complex<R>> {
        let re = self.cur.real::<R>().ok()?;
        if !self.cur.eat(b',') {
            return None;
        }
        let im = self.cur.real::<R>().ok()?;
        self.cur.eat(b')').then(|| Complex::new(re, im))
    }

    fn exponent(&mut self) -> Result<u32, PolysysError> {
        if self.cur.eat(b'^') {
            let e = self.cur.integer()?;
            u32::try_from(e).map_err(|_| self.cur.error("exponent too large"))
        } else {
            Ok(1)
        }
    }
}

/// Parses a system at precision `R`. Decimal literals are rounded once to
/// the nearest value at that precision.
pub fn parse_system<R: Real>(text: &str) -> Result<SparseSystem<R>, PolysysError> {
    let mut p = Parser { cur: Cursor::new(text), n: None, degree: 0, max_var: 0 };
    p.header()?;
    let mut raw = Vec::new();
    while p.cur.peek().is_some() {
        raw.push(p.polynomial::<R>()?);
        p.cur.expect(b';')?;
    }
    if raw.is_empty() {
        return Err(p.cur.error("no polynomials"));
    }
    let n = p.n.unwrap_or(p.max_var.max(1));
    let polys = raw
        .into_iter()
        .map(|terms| {
            terms
                .into_iter()
                .map(|mut t| {
                    t.exponents.resize(n, 0);
                    Monomial::new(t.coefficient, t.exponents)
                })
                .collect()
        })
        .collect();
    SparseSystem::new(n, p.degree, polys)
}

fn complex_literal<R: Real>(z: &Complex<R>) -> String {
    format!("({},{})", z.re.to_decimal(), z.im.to_decimal())
}

fn coefficient_text<R: Real>(c: &TruncatedSeries<R>) -> String {
    let nonzero: Vec<(usize, &Complex<R>)> = c.coeffs().iter().enumerate().filter(|(_, z)| !z.is_zero()).collect();
    let t_power = |k: usize| match k {
        0 => String::new(),
        1 => "*t".to_string(),
        k => format!("*t^{k}"),
    };
    match nonzero.as_slice() {
        [] => "(0,0)".to_string(),
        [(k, z)] => format!("{}{}", complex_literal(*z), t_power(*k)),
        many => {
            let parts: Vec<String> =
                many.iter().map(|(k, z)| format!("{}{}", complex_literal(*z), t_power(*k))).collect();
            format!("({})", parts.join(" + "))
        }
    }
}

/// Writes a system in the format read by [`parse_system`]. Every number is
/// printed with the shortest decimal string that reads back to the same
/// value, so parsing the output at the same precision reproduces the system
/// exactly.
pub fn serialize_system<R: Real>(sys: &SparseSystem<R>) -> String {
    let mut out = format!("n {} d {}\n", sys.n(), sys.degree());
    for poly in sys.polys() {
        let terms: Vec<String> = poly
            .iter()
            .map(|m| {
                let mut s = coefficient_text(m.coefficient());
                for &i in m.support() {
                    match m.exponents()[i] {
                        1 => s.push_str(&format!("*x{i}")),
                        e => s.push_str(&format!("*x{i}^{e}")),
                    }
                }
                s
            })
            .collect();
        out.push_str(&terms.join("\n  + "));
        out.push_str(";\n");
    }
    out
}
