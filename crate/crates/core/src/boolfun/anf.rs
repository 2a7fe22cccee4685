use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use super::truth_table::{TruthTable, LOW_MASKS, MAX_VARS};
use crate::error::{check_cap, Error, ParseError, Result};

/// GF(2) multilinear polynomial: XOR of monomials plus a constant.
///
/// Each monomial is a nonzero mask of zero-based variable indices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Anf {
    n: usize,
    monomials: BTreeSet<u32>,
    constant: bool,
}

impl Anf {
    pub fn zero(n: usize) -> Result<Self> {
        check_cap("ANF", n, MAX_VARS)?;
        Ok(Self {
            n,
            monomials: BTreeSet::new(),
            constant: false,
        })
    }

    /// Builds an ANF from monomial masks; repeated masks cancel and a zero
    /// mask toggles the constant.
    pub fn new(n: usize, monomials: impl IntoIterator<Item = u32>, constant: bool) -> Result<Self> {
        let mut a = Self::zero(n)?;
        a.constant = constant;
        for m in monomials {
            if n < 32 && m >> n != 0 {
                return Err(Error::VariableOutOfRange {
                    var: 31 - m.leading_zeros() as usize,
                    n,
                });
            }
            a.toggle(m);
        }
        Ok(a)
    }

    /// Same as [`Anf::new`] but with monomials given as lists of zero-based
    /// variable indices.
    pub fn from_terms(n: usize, terms: &[&[usize]], constant: bool) -> Result<Self> {
        let mut masks = Vec::with_capacity(terms.len());
        for term in terms {
            let mut m = 0u32;
            for &v in *term {
                if v >= n {
                    return Err(Error::VariableOutOfRange { var: v, n });
                }
                m |= 1 << v;
            }
            masks.push(m);
        }
        Self::new(n, masks, constant)
    }

    fn toggle(&mut self, mask: u32) {
        if mask == 0 {
            self.constant ^= true;
        } else if !self.monomials.remove(&mask) {
            self.monomials.insert(mask);
        }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn monomials(&self) -> impl Iterator<Item = u32> + '_ {
        self.monomials.iter().copied()
    }

    pub fn constant(&self) -> bool {
        self.constant
    }

    pub fn degree(&self) -> usize {
        self.monomials
            .iter()
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Union of the monomial masks.
    pub fn variables(&self) -> u32 {
        self.monomials.iter().fold(0, |a, m| a | m)
    }

    pub fn evaluate(&self, x: &[bool]) -> Result<bool> {
        let idx = super::truth_table::point_index(self.n, x)? as u32;
        Ok(self.eval_index(idx))
    }

    pub(crate) fn eval_index(&self, idx: u32) -> bool {
        self.monomials
            .iter()
            .filter(|&&m| m & idx == m)
            .fold(self.constant, |acc, _| !acc)
    }

    /// Same polynomial over a larger variable count.
    pub fn widen(&self, n: usize) -> Result<Self> {
        if n < self.n {
            return Err(Error::InvalidParameter(format!(
                "cannot narrow ANF from {} to {n} variables",
                self.n
            )));
        }
        check_cap("ANF", n, MAX_VARS)?;
        Ok(Self { n, ..self.clone() })
    }
}

/// In-place GF(2) Moebius transform over a packed table; an involution.
fn moebius_in_place(words: &mut [u64], n: usize) {
    for (var, mask) in LOW_MASKS.iter().enumerate().take(n) {
        let shift = 1 << var;
        for w in words.iter_mut() {
            *w ^= (*w & mask) << shift;
        }
    }
    for var in 6..n {
        let stride = 1 << (var - 6);
        for i in 0..words.len() {
            if i & stride == 0 {
                words[i | stride] ^= words[i];
            }
        }
    }
}

/// Truth table of an ANF.
pub fn tt_from_anf(a: &Anf) -> TruthTable {
    let mut coeffs = TruthTable::zero(a.n).expect("ANF respects the cap");
    if a.constant {
        coeffs.set(0, true);
    }
    for &m in &a.monomials {
        coeffs.set(m as usize, true);
    }
    let mut words = coeffs.words().to_vec();
    moebius_in_place(&mut words, a.n);
    TruthTable::from_words(a.n, words).expect("transform preserves padding")
}

/// Unique ANF of a truth table.
pub fn anf_from_tt(t: &TruthTable) -> Anf {
    let mut words = t.words().to_vec();
    moebius_in_place(&mut words, t.num_vars());
    let coeffs = TruthTable::from_words(t.num_vars(), words).expect("transform preserves padding");
    let mut a = Anf::zero(t.num_vars()).expect("table respects the cap");
    a.constant = coeffs.get(0);
    for (wi, &w) in coeffs.words().iter().enumerate() {
        let mut bits = if wi == 0 { w & !1 } else { w };
        while bits != 0 {
            let b = bits.trailing_zeros() as usize;
            a.monomials.insert((wi * 64 + b) as u32);
            bits &= bits - 1;
        }
    }
    a
}

/// Orders monomials by descending degree, then by their ascending variable
/// lists lexicographically.
fn term_order(a: u32, b: u32) -> Ordering {
    if a.count_ones() != b.count_ones() {
        return b.count_ones().cmp(&a.count_ones());
    }
    let (mut a, mut b) = (a, b);
    loop {
        match (a, b) {
            (0, 0) => return Ordering::Equal,
            (0, _) => return Ordering::Less,
            (_, 0) => return Ordering::Greater,
            _ => {}
        }
        let (la, lb) = (a.trailing_zeros(), b.trailing_zeros());
        if la != lb {
            return la.cmp(&lb);
        }
        a &= a - 1;
        b &= b - 1;
    }
}

impl fmt::Display for Anf {
    /// Text format: `x1*x2 + x1*x3 + x2`, constant term `1` last, `0` for
    /// the zero polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<u32> = self.monomials.iter().copied().collect();
        terms.sort_by(|&a, &b| term_order(a, b));
        let mut parts: Vec<String> = terms
            .into_iter()
            .map(|m| {
                (0..32)
                    .filter(|v| m >> v & 1 == 1)
                    .map(|v| format!("x{}", v + 1))
                    .collect::<Vec<_>>()
                    .join("*")
            })
            .collect();
        if self.constant {
            parts.push("1".into());
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

impl FromStr for Anf {
    type Err = Error;

    /// Parses the text format. The variable count is the largest index
    /// mentioned; whitespace, including newlines, is insignificant.
    fn from_str(s: &str) -> Result<Self> {
        let mut p = AnfParser::new(s);
        let terms = p.parse()?;
        let n = terms
            .iter()
            .map(|m| 32 - m.leading_zeros() as usize)
            .max()
            .unwrap_or(0);
        check_cap("ANF", n, MAX_VARS)?;
        Anf::new(n, terms, false)
    }
}

struct AnfParser<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> AnfParser<'a> {
    fn new(s: &'a str) -> Self {
        Self {
            chars: s.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        ParseError::new(self.line, self.column, msg).into()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.chars.peek().is_some_and(|c| c.is_whitespace()) {
            self.bump();
        }
    }

    fn number(&mut self) -> Result<usize> {
        let mut digits = String::new();
        while let Some(&c) = self.chars.peek() {
            if !c.is_ascii_digit() {
                break;
            }
            digits.push(c);
            self.bump();
        }
        if digits.is_empty() {
            return Err(self.err("expected a variable index"));
        }
        digits
            .parse()
            .map_err(|_| self.err(format!("variable index {digits} too large")))
    }

    /// Each term is returned as a mask; `0` means the constant `1`, and the
    /// literal `0` term contributes nothing.
    fn parse(&mut self) -> Result<Vec<u32>> {
        let mut terms = Vec::new();
        loop {
            self.skip_ws();
            match self.chars.peek() {
                None if terms.is_empty() => return Err(self.err("empty polynomial")),
                None => return Err(self.err("expected a term after `+`")),
                Some('0') => {
                    self.bump();
                }
                Some('1') => {
                    self.bump();
                    terms.push(0);
                }
                Some('x') | Some('X') => terms.push(self.product()?),
                Some(&c) => return Err(self.err(format!("unexpected character {c:?}"))),
            }
            self.skip_ws();
            match self.chars.peek() {
                None => return Ok(terms),
                Some('+') => {
                    self.bump();
                }
                Some(&c) => return Err(self.err(format!("expected `+`, found {c:?}"))),
            }
        }
    }

    fn product(&mut self) -> Result<u32> {
        let mut mask = 0u32;
        loop {
            self.skip_ws();
            match self.chars.peek() {
                Some('x') | Some('X') => {
                    self.bump();
                }
                _ => return Err(self.err("expected a variable like `x3`")),
            }
            let (line, column) = (self.line, self.column);
            let idx = self.number()?;
            if idx == 0 || idx > MAX_VARS {
                return Err(ParseError::new(
                    line,
                    column,
                    format!("variable index {idx} outside 1..={MAX_VARS}"),
                )
                .into());
            }
            mask |= 1 << (idx - 1);
            self.skip_ws();
            if self.chars.peek() == Some(&'*') {
                self.bump();
            } else {
                return Ok(mask);
            }
        }
    }
}
