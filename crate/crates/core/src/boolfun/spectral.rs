use std::fmt;

use super::truth_table::TruthTable;
use crate::error::{check_cap, Result};

pub const WALSH_MAX_VARS: usize = 20;
pub const REAL_POLY_MAX_VARS: usize = 16;

/// Walsh spectrum `W_f(a) = sum_x (-1)^(f(x) xor a.x)`, indexed by `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalshSpectrum {
    n: usize,
    values: Vec<i64>,
}

impl WalshSpectrum {
    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn get(&self, a: usize) -> i64 {
        self.values[a]
    }

    pub fn max_abs(&self) -> i64 {
        self.values.iter().map(|v| v.abs()).max().unwrap_or(0)
    }

    pub fn energy(&self) -> i128 {
        self.values.iter().map(|&v| (v as i128) * (v as i128)).sum()
    }
}

/// Fast Walsh-Hadamard transform of the sign table.
pub fn walsh_transform(f: &TruthTable) -> Result<WalshSpectrum> {
    let n = f.num_vars();
    check_cap("Walsh transform", n, WALSH_MAX_VARS)?;
    let mut v: Vec<i64> = (0..f.len())
        .map(|x| if f.get(x) { -1 } else { 1 })
        .collect();
    let mut h = 1;
    while h < v.len() {
        for block in v.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (s, d) = (*a + *b, *a - *b);
                *a = s;
                *b = d;
            }
        }
        h *= 2;
    }
    Ok(WalshSpectrum { n, values: v })
}

/// Hamming distance to the nearest affine function.
pub fn nonlinearity(f: &TruthTable) -> Result<u64> {
    let w = walsh_transform(f)?;
    Ok(((1i64 << f.num_vars()) / 2 - w.max_abs() / 2) as u64)
}

/// Unique real multilinear polynomial agreeing with `f` on the cube.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealPoly {
    n: usize,
    coeffs: Vec<i64>,
}

impl RealPoly {
    pub fn num_vars(&self) -> usize {
        self.n
    }

    /// Coefficient of the monomial over the variables in `mask`.
    pub fn coeff(&self, mask: usize) -> i64 {
        self.coeffs[mask]
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(s, _)| s.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Exact value at a 0/1 point given by its index.
    pub fn eval_index(&self, idx: usize) -> i64 {
        // sum of c_S over S subset of idx
        let mut total = self.coeffs[0];
        let mut s = idx;
        while s != 0 {
            total += self.coeffs[s];
            s = (s - 1) & idx;
        }
        total
    }

    /// Value at an arbitrary real point.
    pub fn eval_real(&self, x: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(s, &c)| {
                (0..self.n)
                    .filter(|v| s >> v & 1 == 1)
                    .fold(c as f64, |acc, v| acc * x[v])
            })
            .sum()
    }
}

impl fmt::Display for RealPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut masks: Vec<usize> = (0..self.coeffs.len())
            .filter(|&s| self.coeffs[s] != 0)
            .collect();
        masks.sort_by_key(|&s| (s.count_ones(), s));
        if masks.is_empty() {
            return f.write_str("0");
        }
        for (k, &s) in masks.iter().enumerate() {
            let c = self.coeffs[s];
            let sign = if c < 0 { "-" } else { "+" };
            if k == 0 {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let vars: Vec<String> = (0..self.n)
                .filter(|v| s >> v & 1 == 1)
                .map(|v| format!("x{}", v + 1))
                .collect();
            match (c.abs(), vars.is_empty()) {
                (a, true) => write!(f, "{a}")?,
                (1, false) => write!(f, "{}", vars.join("*"))?,
                (a, false) => write!(f, "{a}*{}", vars.join("*"))?,
            }
        }
        Ok(())
    }
}

/// Real Moebius inversion: `c_S = sum_{T subset S} (-1)^(|S|-|T|) f(T)`.
pub fn real_multilinear(f: &TruthTable) -> Result<RealPoly> {
    let n = f.num_vars();
    check_cap("real multilinear extension", n, REAL_POLY_MAX_VARS)?;
    let mut c: Vec<i64> = (0..f.len()).map(|x| f.get(x) as i64).collect();
    for var in 0..n {
        let bit = 1 << var;
        for s in 0..c.len() {
            if s & bit != 0 {
                c[s] -= c[s ^ bit];
            }
        }
    }
    Ok(RealPoly { n, coeffs: c })
}

pub fn real_degree(f: &TruthTable) -> Result<usize> {
    Ok(real_multilinear(f)?.degree())
}
