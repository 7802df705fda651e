//! Sparse homogeneous polynomials (forms) with exact rational coefficients.
//!
//! A [`SparseForm`] maps exponent vectors to nonzero [`Rational`]s. Every stored
//! exponent has the same length (`num_vars`) and the same total degree. The zero
//! form is representable: its term map is empty and its degree is whatever the
//! producing context recorded.
//!
//! The text grammar (whitespace ignored):
//!
//! ```text
//! form   := [sign] term { sign term }     sign  := '+' | '-'
//! term   := coeff [ '*' mono ] | mono     coeff := int [ '/' posint ]
//! mono   := factor { '*' factor }         factor := 'x' posint [ '^' posint ]
//! ```

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("form is not homogeneous: found total degrees {first} and {second}")]
    NotHomogeneous { first: u32, second: u32 },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Exponent vector `α ∈ ℕ₀ⁿ`.
///
/// Ordered graded-lexicographically: total degree first, then entries
/// lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(pub Vec<u32>);

impl ExponentVector {
    pub fn new(entries: Vec<u32>) -> Self {
        ExponentVector(entries)
    }

    pub fn zeros(n: usize) -> Self {
        ExponentVector(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn is_even(&self) -> bool {
        self.0.iter().all(|e| e % 2 == 0)
    }

    pub fn add(&self, other: &ExponentVector) -> ExponentVector {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn padded(&self, extra: usize) -> ExponentVector {
        let mut v = self.0.clone();
        v.extend(std::iter::repeat_n(0, extra));
        ExponentVector(v)
    }

    pub fn to_rationals(&self) -> Vec<Rational> {
        self.0.iter().map(|&e| Rational::from_integer(BigInt::from(e))).collect()
    }

    /// Monomial text such as `x1^4*x2^2`; the constant monomial renders as `1`.
    pub fn monomial_string(&self) -> String {
        let factors: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    format!("x{}", i + 1)
                } else {
                    format!("x{}^{}", i + 1, e)
                }
            })
            .collect();
        if factors.is_empty() {
            "1".to_string()
        } else {
            factors.join("*")
        }
    }
}

impl Ord for ExponentVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for ExponentVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl From<Vec<u32>> for ExponentVector {
    fn from(v: Vec<u32>) -> Self {
        ExponentVector(v)
    }
}

impl<const N: usize> From<[u32; N]> for ExponentVector {
    fn from(v: [u32; N]) -> Self {
        ExponentVector(v.to_vec())
    }
}

/// A homogeneous polynomial `f = Σ f_α x^α` with exact coefficients.
#[derive(Debug, Clone)]
pub struct SparseForm {
    num_vars: usize,
    degree: u32,
    terms: BTreeMap<ExponentVector, Rational>,
    name: Option<String>,
}

/// Equality is polynomial equality; the label is ignored.
/// Ignores the name. The recorded degree only matters through the terms, so
/// zero forms of any degree compare equal.
impl PartialEq for SparseForm {
    fn eq(&self, other: &Self) -> bool {
        self.num_vars == other.num_vars && self.terms == other.terms
    }
}

impl Eq for SparseForm {}

impl SparseForm {
    /// Builds a form from `(exponent, coefficient)` pairs, combining like terms
    /// and dropping zeros. `degree` is used only when every term cancels.
    pub fn from_terms<I>(num_vars: usize, degree: u32, terms: I) -> Result<Self, FormError>
    where
        I: IntoIterator<Item = (ExponentVector, Rational)>,
    {
        let mut map: BTreeMap<ExponentVector, Rational> = BTreeMap::new();
        let mut seen_degree: Option<u32> = None;
        for (exp, coeff) in terms {
            if exp.len() != num_vars {
                return Err(FormError::DimensionMismatch {
                    expected: num_vars,
                    found: exp.len(),
                });
            }
            let d = exp.degree();
            match seen_degree {
                None => seen_degree = Some(d),
                Some(prev) if prev != d => {
                    return Err(FormError::NotHomogeneous {
                        first: prev,
                        second: d,
                    })
                }
                _ => {}
            }
            *map.entry(exp).or_insert_with(Rational::zero) += coeff;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(SparseForm {
            num_vars,
            degree: seen_degree.unwrap_or(degree),
            terms: map,
            name: None,
        })
    }

    /// Convenience constructor from integer coefficients; panics on invalid data.
    pub fn from_int_terms(num_vars: usize, terms: &[(&[u32], i64)]) -> Self {
        let degree = terms.first().map(|(e, _)| e.iter().sum()).unwrap_or(0);
        Self::from_terms(
            num_vars,
            degree,
            terms.iter().map(|(e, c)| {
                (
                    ExponentVector(e.to_vec()),
                    Rational::from_integer(BigInt::from(*c)),
                )
            }),
        )
        .expect("valid integer form")
    }

    pub fn zero(num_vars: usize, degree: u32) -> Self {
        SparseForm {
            num_vars,
            degree,
            terms: BTreeMap::new(),
            name: None,
        }
    }

    /// The single variable `x_{index+1}` (0-based index).
    pub fn variable(num_vars: usize, index: usize) -> Self {
        let mut e = vec![0; num_vars];
        e[index] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(ExponentVector(e), Rational::one());
        SparseForm {
            num_vars,
            degree: 1,
            terms,
            name: None,
        }
    }

    pub fn constant(num_vars: usize, c: Rational) -> Self {
        let mut f = SparseForm::zero(num_vars, 0);
        if !c.is_zero() {
            f.terms.insert(ExponentVector::zeros(num_vars), c);
        }
        f
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<ExponentVector, Rational> {
        &self.terms
    }

    pub fn coefficient(&self, exp: &ExponentVector) -> Rational {
        self.terms.get(exp).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> Vec<ExponentVector> {
        self.terms.keys().cloned().collect()
    }

    /// Exact value `Σ f_α · pᵅ`.
    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational, FormError> {
        if point.len() != self.num_vars {
            return Err(FormError::DimensionMismatch {
                expected: self.num_vars,
                found: point.len(),
            });
        }
        let d = self.degree as usize;
        // powers[i][k] = point[i]^k
        let powers: Vec<Vec<Rational>> = point
            .iter()
            .map(|p| {
                let mut row = Vec::with_capacity(d + 1);
                row.push(Rational::one());
                for k in 1..=d {
                    let next = &row[k - 1] * p;
                    row.push(next);
                }
                row
            })
            .collect();
        let mut total = Rational::zero();
        for (exp, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in exp.0.iter().enumerate() {
                if e > 0 {
                    term *= &powers[i][e as usize];
                }
            }
            total += term;
        }
        Ok(total)
    }

    /// Double-precision evaluation; approximate.
    pub fn evaluate_float(&self, point: &[f64]) -> Result<f64, FormError> {
        if point.len() != self.num_vars {
            return Err(FormError::DimensionMismatch {
                expected: self.num_vars,
                found: point.len(),
            });
        }
        Ok(self
            .terms
            .iter()
            .map(|(exp, c)| {
                let mut t = c.to_f64().unwrap_or(f64::NAN);
                for (i, &e) in exp.0.iter().enumerate() {
                    t *= point[i].powi(e as i32);
                }
                t
            })
            .sum())
    }

    /// Largest absolute term value `|f_α pᵅ|` at a float point.
    pub fn max_term_magnitude(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(exp, c)| {
                let mut t = c.to_f64().unwrap_or(f64::NAN).abs();
                for (i, &e) in exp.0.iter().enumerate() {
                    t *= point[i].abs().powi(e as i32);
                }
                t
            })
            .fold(0.0, f64::max)
    }

    /// Same terms regarded as a form in `num_vars + m` variables.
    pub fn embed_variables(&self, m: usize) -> SparseForm {
        SparseForm {
            num_vars: self.num_vars + m,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.padded(m), c.clone()))
                .collect(),
            name: self.name.clone(),
        }
    }

    /// `x_{var_index}^{2ℓ} · f`, with `var_index` 1-based.
    pub fn multiply_monomial_square(&self, var_index: usize, ell: u32) -> Result<SparseForm, FormError> {
        if var_index == 0 || var_index > self.num_vars {
            return Err(FormError::DimensionMismatch {
                expected: self.num_vars,
                found: var_index,
            });
        }
        let shift = 2 * ell;
        Ok(SparseForm {
            num_vars: self.num_vars,
            degree: self.degree + shift,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut v = e.0.clone();
                    v[var_index - 1] += shift;
                    (ExponentVector(v), c.clone())
                })
                .collect(),
            name: self.name.clone(),
        })
    }

    /// `f(A·x)`, expanded exactly. `matrix` is `num_vars × num_vars`, row-major.
    pub fn substitute_linear(&self, matrix: &[Vec<Rational>]) -> Result<SparseForm, FormError> {
        let n = self.num_vars;
        if matrix.len() != n {
            return Err(FormError::DimensionMismatch {
                expected: n,
                found: matrix.len(),
            });
        }
        if let Some(row) = matrix.iter().find(|r| r.len() != n) {
            return Err(FormError::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
        // x_i ↦ Σ_j A_ij x_j
        let images: Vec<SparseForm> = matrix
            .iter()
            .map(|row| {
                SparseForm::from_terms(
                    n,
                    1,
                    row.iter().enumerate().map(|(j, a)| {
                        let mut e = vec![0; n];
                        e[j] = 1;
                        (ExponentVector(e), a.clone())
                    }),
                )
                .expect("linear form")
            })
            .collect();
        let d = self.degree as usize;
        let mut powers: Vec<Vec<SparseForm>> = Vec::with_capacity(n);
        for img in &images {
            let mut row = vec![SparseForm::constant(n, Rational::one())];
            for k in 1..=d {
                let next = row[k - 1].mul(img)?;
                row.push(next);
            }
            powers.push(row);
        }
        let mut out = SparseForm::zero(n, self.degree);
        for (exp, c) in &self.terms {
            let mut term = SparseForm::constant(n, c.clone());
            for (i, &e) in exp.0.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&powers[i][e as usize])?;
                }
            }
            out = out.add(&term)?;
        }
        out.degree = self.degree;
        out.name = self.name.clone();
        Ok(out)
    }

    pub fn add(&self, other: &SparseForm) -> Result<SparseForm, FormError> {
        if self.num_vars != other.num_vars {
            return Err(FormError::DimensionMismatch {
                expected: self.num_vars,
                found: other.num_vars,
            });
        }
        if !self.is_zero() && !other.is_zero() && self.degree != other.degree {
            return Err(FormError::NotHomogeneous {
                first: self.degree,
                second: other.degree,
            });
        }
        let degree = if self.is_zero() { other.degree } else { self.degree };
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            *terms.entry(e.clone()).or_insert_with(Rational::zero) += c;
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(SparseForm {
            num_vars: self.num_vars,
            degree,
            terms,
            name: None,
        })
    }

    pub fn sub(&self, other: &SparseForm) -> Result<SparseForm, FormError> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> SparseForm {
        if c.is_zero() {
            return SparseForm::zero(self.num_vars, self.degree);
        }
        SparseForm {
            num_vars: self.num_vars,
            degree: self.degree,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
            name: None,
        }
    }

    pub fn mul(&self, other: &SparseForm) -> Result<SparseForm, FormError> {
        if self.num_vars != other.num_vars {
            return Err(FormError::DimensionMismatch {
                expected: self.num_vars,
                found: other.num_vars,
            });
        }
        let mut terms: BTreeMap<ExponentVector, Rational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                *terms.entry(ea.add(eb)).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(SparseForm {
            num_vars: self.num_vars,
            degree: self.degree + other.degree,
            terms,
            name: None,
        })
    }

    pub fn pow(&self, k: u32) -> SparseForm {
        let mut acc = SparseForm::constant(self.num_vars, Rational::one());
        for _ in 0..k {
            acc = acc.mul(self).expect("same arity");
        }
        acc
    }
}

impl fmt::Display for SparseForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (exp, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let constant = exp.degree() == 0;
            if constant {
                write!(f, "{}", format_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", exp.monomial_string())?;
            } else {
                write!(f, "{}*{}", format_rational(&abs), exp.monomial_string())?;
            }
        }
        Ok(())
    }
}

/// Parses a form. When `num_vars` is `None`, the largest variable index used
/// determines the arity.
pub fn parse_form(text: &str, num_vars: Option<usize>) -> Result<SparseForm, FormError> {
    let raw = Parser::new(text).parse()?;
    let used = raw
        .iter()
        .flat_map(|(factors, _)| factors.iter().map(|(v, _)| *v))
        .max()
        .unwrap_or(1);
    let n = match num_vars {
        Some(n) if n < used => {
            return Err(FormError::Parse {
                pos: 0,
                msg: format!("variable x{used} exceeds declared arity {n}"),
            })
        }
        Some(0) => {
            return Err(FormError::Parse {
                pos: 0,
                msg: "arity must be positive".into(),
            })
        }
        Some(n) => n,
        None => used,
    };
    let mut degree = None;
    let mut terms = Vec::with_capacity(raw.len());
    for (factors, coeff) in raw {
        let mut e = vec![0u32; n];
        for (v, p) in factors {
            e[v - 1] += p;
        }
        let exp = ExponentVector(e);
        let d = exp.degree();
        match degree {
            None => degree = Some(d),
            Some(prev) if prev != d => {
                return Err(FormError::NotHomogeneous {
                    first: prev,
                    second: d,
                })
            }
            _ => {}
        }
        terms.push((exp, coeff));
    }
    SparseForm::from_terms(n, degree.unwrap_or(0), terms)
}

/// Parses the file format: `#`-prefixed metadata lines, the rest is the form.
///
/// Recognized metadata keys: `name` and `vars`.
pub fn parse_form_file(content: &str) -> Result<SparseForm, FormError> {
    let mut name = None;
    let mut vars = None;
    let mut body = String::new();
    for line in content.lines() {
        let trimmed = line.trim();
        if let Some(meta) = trimmed.strip_prefix('#') {
            if let Some((k, v)) = meta.split_once(':') {
                match k.trim() {
                    "name" => name = Some(v.trim().to_string()),
                    "vars" => {
                        vars = Some(v.trim().parse::<usize>().map_err(|_| FormError::Parse {
                            pos: 0,
                            msg: format!("bad vars metadata '{}'", v.trim()),
                        })?)
                    }
                    _ => {}
                }
            }
        } else {
            body.push_str(line);
            body.push(' ');
        }
    }
    let f = parse_form(&body, vars)?;
    Ok(match name {
        Some(n) => f.with_name(n),
        None => f,
    })
}

/// File rendering accepted by [`parse_form_file`].
pub fn format_form_file(f: &SparseForm) -> String {
    let mut out = String::new();
    if let Some(n) = f.name() {
        out.push_str(&format!("# name: {n}\n"));
    }
    out.push_str(&format!("# vars: {}\n", f.num_vars()));
    out.push_str(&f.to_string());
    out.push('\n');
    out
}

type RawTerm = (Vec<(usize, u32)>, Rational);

struct Parser {
    chars: Vec<(usize, char)>,
    idx: usize,
}

impl Parser {
    fn new(text: &str) -> Self {
        Parser {
            chars: text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect(),
            idx: 0,
        }
    }

    fn pos(&self) -> usize {
        self.chars.get(self.idx).map(|(p, _)| *p).unwrap_or(usize::MAX)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.idx).map(|(_, c)| *c)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, FormError> {
        let pos = self.pos();
        Err(FormError::Parse {
            pos: if pos == usize::MAX { self.chars.last().map(|(p, _)| p + 1).unwrap_or(0) } else { pos },
            msg: msg.into(),
        })
    }

    fn parse(mut self) -> Result<Vec<RawTerm>, FormError> {
        if self.chars.is_empty() {
            return self.err("empty form");
        }
        let mut out = Vec::new();
        let mut sign = match self.peek() {
            Some('+') => {
                self.idx += 1;
                1
            }
            Some('-') => {
                self.idx += 1;
                -1
            }
            _ => 1,
        };
        loop {
            let (factors, coeff) = self.term()?;
            let coeff = if sign < 0 { -coeff } else { coeff };
            out.push((factors, coeff));
            match self.peek() {
                None => break,
                Some('+') => {
                    self.idx += 1;
                    sign = 1;
                }
                Some('-') => {
                    self.idx += 1;
                    sign = -1;
                }
                Some(c) => return self.err(format!("unexpected '{c}'")),
            }
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<RawTerm, FormError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                let mut coeff = Rational::from_integer(num);
                if self.peek() == Some('/') {
                    self.idx += 1;
                    let den = self.integer()?;
                    if den.is_zero() {
                        return self.err("zero denominator");
                    }
                    coeff = Rational::new(coeff.to_integer(), den);
                }
                if self.peek() == Some('*') {
                    self.idx += 1;
                    let mono = self.mono()?;
                    Ok((mono, coeff))
                } else {
                    Ok((Vec::new(), coeff))
                }
            }
            Some('x') => Ok((self.mono()?, Rational::one())),
            Some(c) => self.err(format!("expected coefficient or variable, found '{c}'")),
            None => self.err("unexpected end of input"),
        }
    }

    fn mono(&mut self) -> Result<Vec<(usize, u32)>, FormError> {
        let mut factors = vec![self.factor()?];
        while self.peek() == Some('*') {
            self.idx += 1;
            factors.push(self.factor()?);
        }
        Ok(factors)
    }

    fn factor(&mut self) -> Result<(usize, u32), FormError> {
        if self.peek() != Some('x') {
            return self.err("expected variable 'x<index>'");
        }
        self.idx += 1;
        let var = self.small_posint()? as usize;
        let power = if self.peek() == Some('^') {
            self.idx += 1;
            self.small_posint()?
        } else {
            1
        };
        Ok((var, power))
    }

    fn small_posint(&mut self) -> Result<u32, FormError> {
        let v = self.integer()?;
        match v.to_u32() {
            Some(0) => self.err("expected positive integer"),
            Some(x) => Ok(x),
            None => self.err("integer too large"),
        }
    }

    fn integer(&mut self) -> Result<BigInt, FormError> {
        let start = self.idx;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.idx += 1;
        }
        if start == self.idx {
            return self.err("expected digits");
        }
        let s: String = self.chars[start..self.idx].iter().map(|(_, c)| c).collect();
        Ok(s.parse::<BigInt>().expect("digits"))
    }
}
