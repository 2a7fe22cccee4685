use std::fmt;
use std::ops::{BitAnd, BitOr, BitXor, Not};

use crate::error::{check_cap, Error, ParseError, Result};

/// Largest variable count a [`TruthTable`] may hold.
pub const MAX_VARS: usize = 24;

/// Bits of a word where variable `i` (i < 6) is zero.
pub(crate) const LOW_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// Complete value map of an n-variable Boolean function.
///
/// The output for the point `x` lives at index `sum_j x_j * 2^j` (variable 1
/// is the least significant bit). Bits are packed 64 to a word and every
/// padding bit beyond `2^n` is kept at zero, so derived `Eq`/`Hash` compare
/// functions exactly.
///
/// Variable indices in the Rust API are zero-based: `0` is `x1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthTable {
    n: usize,
    words: Vec<u64>,
}

fn word_count(n: usize) -> usize {
    if n <= 6 {
        1
    } else {
        1 << (n - 6)
    }
}

fn valid_mask(n: usize) -> u64 {
    if n >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << n)) - 1
    }
}

impl TruthTable {
    /// The constant-zero function on `n` variables.
    pub fn zero(n: usize) -> Result<Self> {
        check_cap("truth table", n, MAX_VARS)?;
        Ok(Self {
            n,
            words: vec![0; word_count(n)],
        })
    }

    pub fn constant(n: usize, value: bool) -> Result<Self> {
        let t = Self::zero(n)?;
        Ok(if value { !&t } else { t })
    }

    /// The projection `x_{var+1}`.
    pub fn literal(n: usize, var: usize) -> Result<Self> {
        if var >= n {
            return Err(Error::VariableOutOfRange { var, n });
        }
        let mut t = Self::zero(n)?;
        if var < 6 {
            let w = !LOW_MASKS[var] & valid_mask(n);
            t.words.iter_mut().for_each(|x| *x = w);
        } else {
            let stride = 1 << (var - 6);
            for (i, w) in t.words.iter_mut().enumerate() {
                if i & stride != 0 {
                    *w = u64::MAX;
                }
            }
        }
        Ok(t)
    }

    /// Tabulates `f` over every input index.
    pub fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Result<Self> {
        let mut t = Self::zero(n)?;
        for idx in 0..t.len() {
            if f(idx) {
                t.words[idx >> 6] |= 1 << (idx & 63);
            }
        }
        Ok(t)
    }

    pub fn from_words(n: usize, words: Vec<u64>) -> Result<Self> {
        check_cap("truth table", n, MAX_VARS)?;
        if words.len() != word_count(n) || words[0] & !valid_mask(n) != 0 {
            return Err(Error::TableSize {
                n,
                expected: 1 << n,
                got: words.len() * 64,
            });
        }
        Ok(Self { n, words })
    }

    /// Convenience constructor for tables of at most six variables.
    pub fn from_u64(n: usize, bits: u64) -> Result<Self> {
        check_cap("single-word truth table", n, 6)?;
        Self::from_words(n, vec![bits])
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    /// Number of entries, `2^n`.
    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Low word of the table; the whole table when `n <= 6`.
    pub fn low_word(&self) -> u64 {
        self.words[0]
    }

    #[inline]
    pub fn get(&self, idx: usize) -> bool {
        debug_assert!(idx < self.len());
        self.words[idx >> 6] >> (idx & 63) & 1 == 1
    }

    pub(crate) fn set(&mut self, idx: usize, value: bool) {
        let bit = 1u64 << (idx & 63);
        if value {
            self.words[idx >> 6] |= bit;
        } else {
            self.words[idx >> 6] &= !bit;
        }
    }

    /// Value at a point given coordinate-wise (`x[0]` is `x1`).
    pub fn evaluate(&self, x: &[bool]) -> Result<bool> {
        Ok(self.get(point_index(self.n, x)?))
    }

    /// Hamming weight of the table.
    pub fn weight(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn as_constant(&self) -> Option<bool> {
        if self.words.iter().all(|&w| w == 0) {
            Some(false)
        } else if self.weight() == self.len() as u64 {
            Some(true)
        } else {
            None
        }
    }

    pub fn depends_on(&self, var: usize) -> bool {
        if var >= self.n {
            return false;
        }
        if var < 6 {
            let shift = 1 << var;
            self.words
                .iter()
                .any(|&w| ((w >> shift) ^ w) & LOW_MASKS[var] != 0)
        } else {
            let stride = 1 << (var - 6);
            (0..self.words.len())
                .filter(|i| i & stride == 0)
                .any(|i| self.words[i] != self.words[i | stride])
        }
    }

    /// Bit mask of the influencing variables.
    pub fn support(&self) -> u32 {
        (0..self.n)
            .filter(|&v| self.depends_on(v))
            .fold(0, |m, v| m | 1 << v)
    }

    /// `f` with `x_var := value`, still on `n` variables (`x_var` becomes a dummy).
    pub fn fix(&self, var: usize, value: bool) -> Result<Self> {
        if var >= self.n {
            return Err(Error::VariableOutOfRange { var, n: self.n });
        }
        Ok(self.fix_unchecked(var, value))
    }

    pub(crate) fn fix_unchecked(&self, var: usize, value: bool) -> Self {
        let mut words = self.words.clone();
        if var < 6 {
            let shift = 1 << var;
            let m = LOW_MASKS[var];
            for w in &mut words {
                *w = if value {
                    let hi = *w & !m;
                    hi | (hi >> shift)
                } else {
                    let lo = *w & m;
                    lo | (lo << shift)
                };
            }
        } else {
            let stride = 1 << (var - 6);
            for i in (0..words.len()).filter(|i| i & stride == 0) {
                let src = if value { words[i | stride] } else { words[i] };
                words[i] = src;
                words[i | stride] = src;
            }
        }
        Self { n: self.n, words }
    }

    /// `f` with `x_j := x_i xor value`, still on `n` variables.
    pub fn substitute_parity(&self, i: usize, j: usize, value: bool) -> Result<Self> {
        for v in [i, j] {
            if v >= self.n {
                return Err(Error::VariableOutOfRange { var: v, n: self.n });
            }
        }
        if i == j {
            return Err(Error::RepeatedVariable(i));
        }
        Ok(self.substitute_parity_unchecked(i, j, value))
    }

    pub(crate) fn substitute_parity_unchecked(&self, i: usize, j: usize, value: bool) -> Self {
        let r0 = self.fix_unchecked(j, false);
        let r1 = self.fix_unchecked(j, true);
        let xi = Self::literal(self.n, i).expect("index checked");
        // x_j = 0 exactly where x_i == value
        let take_r0 = if value { xi } else { !&xi };
        &(&r0 & &take_r0) | &(&r1 & &!&take_r0)
    }

    /// Projects onto the variables in `mask` (ascending), dropping the rest.
    ///
    /// Dropped variables are read as zero, so this is only meaningful when they
    /// are dummies (or have been fixed with [`TruthTable::fix`]).
    pub fn compact(&self, mask: u32) -> Self {
        let kept: Vec<usize> = (0..self.n).filter(|&v| mask >> v & 1 == 1).collect();
        let mut out = Self::zero(kept.len()).expect("fewer variables than source");
        for y in 0..out.len() {
            let mut idx = 0usize;
            for (bit, &v) in kept.iter().enumerate() {
                idx |= (y >> bit & 1) << v;
            }
            if self.get(idx) {
                out.set(y, true);
            }
        }
        out
    }

    /// Re-embeds an `m`-variable function on `n` variables, sending variable
    /// `b` to `targets[b]`.
    pub fn embed(&self, n: usize, targets: &[usize]) -> Result<Self> {
        if targets.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: targets.len(),
            });
        }
        if let Some(&bad) = targets.iter().find(|&&t| t >= n) {
            return Err(Error::VariableOutOfRange { var: bad, n });
        }
        Self::from_fn(n, |idx| {
            let y = targets
                .iter()
                .enumerate()
                .fold(0usize, |acc, (b, &t)| acc | (idx >> t & 1) << b);
            self.get(y)
        })
    }

    /// Upper-case hex, most significant nibble first; bit 0 of the value is
    /// the output at input index 0.
    pub fn to_hex(&self) -> String {
        let digits = (self.len() / 4).max(1);
        let mut s = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let nib = (self.words[(d * 4) >> 6] >> ((d * 4) & 63)) & 0xF;
            s.push(
                char::from_digit(nib as u32, 16)
                    .unwrap()
                    .to_ascii_uppercase(),
            );
        }
        s
    }

    pub fn from_hex(n: usize, hex: &str) -> Result<Self> {
        let mut t = Self::zero(n)?;
        let hex = hex.trim().trim_start_matches("0x").trim_start_matches("0X");
        let digits: Vec<char> = hex.chars().filter(|c| *c != '_').collect();
        let expected = (t.len() / 4).max(1);
        if digits.len() != expected {
            return Err(Error::TableSize {
                n,
                expected: t.len(),
                got: digits.len() * 4,
            });
        }
        for (k, c) in digits.iter().rev().enumerate() {
            let nib = c
                .to_digit(16)
                .ok_or_else(|| ParseError::new(1, k + 1, format!("invalid hex digit {c:?}")))?
                as u64;
            t.words[(k * 4) >> 6] |= nib << ((k * 4) & 63);
        }
        if t.words[0] & !valid_mask(n) != 0 {
            return Err(Error::TableSize {
                n,
                expected: t.len(),
                got: 4,
            });
        }
        Ok(t)
    }

    /// The two-line truth-table file: `n=<k>` then the hex table.
    pub fn to_file_string(&self) -> String {
        format!("n={}\n{}\n", self.n, self.to_hex())
    }

    pub fn parse_file(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (ln, header) = lines
            .next()
            .ok_or_else(|| ParseError::new(1, 1, "empty truth-table file"))?;
        let rest = header
            .trim()
            .strip_prefix("n=")
            .ok_or_else(|| ParseError::new(ln + 1, 1, "expected header `n=<k>`"))?;
        let n: usize = rest
            .trim()
            .parse()
            .map_err(|_| ParseError::new(ln + 1, 3, format!("invalid variable count {rest:?}")))?;
        check_cap("truth table", n, MAX_VARS)?;
        let (ln, body) = lines
            .next()
            .ok_or_else(|| ParseError::new(ln + 2, 1, "missing hex table line"))?;
        if let Some((extra, _)) = lines.next() {
            return Err(ParseError::new(extra + 1, 1, "unexpected trailing content").into());
        }
        Self::from_hex(n, body).map_err(|e| match e {
            Error::Parse(p) => ParseError::new(ln + 1, p.column, p.message).into(),
            other => other,
        })
    }

    fn zip_with(&self, other: &Self, op: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(
            self.n, other.n,
            "truth tables over different variable counts"
        );
        Self {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        }
    }
}

/// Index of a coordinate-wise point.
pub fn point_index(n: usize, x: &[bool]) -> Result<usize> {
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    Ok(x.iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | (b as usize) << i))
}

/// Coordinates of input index `idx` on `n` variables.
pub fn index_point(n: usize, idx: usize) -> Vec<bool> {
    (0..n).map(|i| idx >> i & 1 == 1).collect()
}

impl BitAnd for &TruthTable {
    type Output = TruthTable;
    fn bitand(self, rhs: Self) -> TruthTable {
        self.zip_with(rhs, |a, b| a & b)
    }
}

impl BitOr for &TruthTable {
    type Output = TruthTable;
    fn bitor(self, rhs: Self) -> TruthTable {
        self.zip_with(rhs, |a, b| a | b)
    }
}

impl BitXor for &TruthTable {
    type Output = TruthTable;
    fn bitxor(self, rhs: Self) -> TruthTable {
        self.zip_with(rhs, |a, b| a ^ b)
    }
}

impl Not for &TruthTable {
    type Output = TruthTable;
    fn not(self) -> TruthTable {
        let mask = valid_mask(self.n);
        TruthTable {
            n: self.n,
            words: self.words.iter().map(|w| !w & mask).collect(),
        }
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable(n={}, 0x{})", self.n, self.to_hex())
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}
