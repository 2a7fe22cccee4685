use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::truth_table::TruthTable;
use crate::error::{check_cap, Error, Result};

pub const PNP_MAX_VARS: usize = 6;

/// Input permutation, input negation and output complement.
///
/// Applied to `f` it yields `g(x) = f(y) xor complement` where
/// `y[perm[i]] = x[i] xor negation_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PnpWitness {
    pub perm: Vec<usize>,
    pub negation: u32,
    pub complement: bool,
}

impl PnpWitness {
    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            negation: 0,
            complement: false,
        }
    }

    fn map_index(&self, x: usize) -> usize {
        let x = x ^ self.negation as usize;
        self.perm
            .iter()
            .enumerate()
            .fold(0, |y, (i, &p)| y | (x >> i & 1) << p)
    }

    pub fn apply(&self, f: &TruthTable) -> Result<TruthTable> {
        let n = f.num_vars();
        if self.perm.len() != n || !self.perm.iter().copied().sorted().eq(0..n) {
            return Err(Error::InvalidParameter(format!(
                "witness permutation {:?} is not a permutation of {n} variables",
                self.perm
            )));
        }
        TruthTable::from_fn(n, |x| f.get(self.map_index(x)) ^ self.complement)
    }

    /// Witness mapping `g` back to `f`.
    pub fn inverse(&self) -> Self {
        let mut perm = vec![0; self.perm.len()];
        let mut negation = 0u32;
        for (i, &p) in self.perm.iter().enumerate() {
            perm[p] = i;
            negation |= (self.negation >> i & 1) << p;
        }
        Self {
            perm,
            negation,
            complement: self.complement,
        }
    }

    /// Witness for applying `self` and then `next`.
    pub fn then(&self, next: &Self) -> Self {
        let perm = next.perm.iter().map(|&q| self.perm[q]).collect();
        let negation = next
            .perm
            .iter()
            .enumerate()
            .fold(next.negation, |acc, (i, &q)| {
                acc ^ (self.negation >> q & 1) << i
            });
        Self {
            perm,
            negation,
            complement: self.complement ^ next.complement,
        }
    }
}

/// Finds a PNP transform taking `f` to `g`, if one exists.
pub fn pnp_equivalent(f: &TruthTable, g: &TruthTable) -> Result<Option<PnpWitness>> {
    let n = f.num_vars();
    if g.num_vars() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: g.num_vars(),
        });
    }
    check_cap("PNP equivalence", n, PNP_MAX_VARS)?;
    let (wf, wg) = (f.weight(), g.weight());
    let total = f.len() as u64;
    if wf != wg && wf != total - wg {
        return Ok(None);
    }
    for perm in (0..n).permutations(n) {
        for negation in 0..(1u32 << n) {
            for complement in [false, true] {
                if (if complement { total - wf } else { wf }) != wg {
                    continue;
                }
                let w = PnpWitness {
                    perm: perm.clone(),
                    negation,
                    complement,
                };
                if (0..f.len()).all(|x| f.get(w.map_index(x)) ^ complement == g.get(x)) {
                    return Ok(Some(w));
                }
            }
        }
    }
    Ok(None)
}
