//! Maiorana-McFarland bent functions `f(x, y) = phi(x).y xor h(x)`.
//!
//! Variables are block ordered: `x` is `x1..x(n/2)` and `y` the rest. The
//! permutation `phi` is a table indexed by the LSB-first encoding of `x`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boolfun::{walsh_transform, TruthTable};
use crate::error::{check_cap, Error, Result};
use crate::ptrees::{ParityDecisionTree, Query};
use crate::trees::DecisionTree;

pub const MM_MAX_VARS: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct MMBentSpec {
    n: usize,
    phi: Vec<u32>,
    h: TruthTable,
}

#[derive(Serialize, Deserialize)]
struct SpecRepr {
    n: usize,
    phi: Vec<u32>,
    h: String,
}

impl TryFrom<SpecRepr> for MMBentSpec {
    type Error = Error;

    fn try_from(r: SpecRepr) -> Result<Self> {
        if r.n % 2 == 1 {
            return Err(Error::OddVariableCount(r.n));
        }
        let h = TruthTable::from_hex(r.n / 2, &r.h)?;
        Self::new(r.n, r.phi, h)
    }
}

impl From<MMBentSpec> for SpecRepr {
    fn from(s: MMBentSpec) -> Self {
        Self {
            n: s.n,
            h: s.h.to_hex(),
            phi: s.phi,
        }
    }
}

impl MMBentSpec {
    pub fn new(n: usize, phi: Vec<u32>, h: TruthTable) -> Result<Self> {
        if n % 2 == 1 {
            return Err(Error::OddVariableCount(n));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 2".into()));
        }
        check_cap("Maiorana-McFarland construction", n, MM_MAX_VARS)?;
        let half = n / 2;
        if phi.len() != 1 << half {
            return Err(Error::DimensionMismatch {
                expected: 1 << half,
                got: phi.len(),
            });
        }
        let mut seen = vec![false; phi.len()];
        for &p in &phi {
            match seen.get_mut(p as usize) {
                Some(s) if !*s => *s = true,
                _ => return Err(Error::InvalidPermutation(p as usize)),
            }
        }
        if h.num_vars() != half {
            return Err(Error::DimensionMismatch {
                expected: half,
                got: h.num_vars(),
            });
        }
        Ok(Self { n, phi, h })
    }

    /// `phi` = identity, `h` = 0.
    pub fn identity(n: usize) -> Result<Self> {
        if n % 2 == 1 {
            return Err(Error::OddVariableCount(n));
        }
        let half = n / 2;
        let h = TruthTable::zero(half)?;
        Self::new(n, (0..1u32 << half).collect(), h)
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn half(&self) -> usize {
        self.n / 2
    }

    pub fn phi(&self) -> &[u32] {
        &self.phi
    }

    pub fn h(&self) -> &TruthTable {
        &self.h
    }

    /// The `x` with `phi(x)` all ones.
    pub fn all_ones_preimage(&self) -> usize {
        let ones = (1u32 << self.half()) - 1;
        self.phi
            .iter()
            .position(|&p| p == ones)
            .expect("phi is a bijection")
    }

    fn value(&self, x: usize, y: usize) -> bool {
        ((self.phi[x] as usize & y).count_ones() % 2 == 1) ^ self.h.get(x)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

pub fn mm_build(spec: &MMBentSpec) -> TruthTable {
    let half = spec.half();
    let mask = (1 << half) - 1;
    TruthTable::from_fn(spec.n, |idx| spec.value(idx & mask, idx >> half)).expect("size within cap")
}

/// `|W_f(a)| = 2^(n/2)` for every `a`.
pub fn is_bent(f: &TruthTable) -> Result<bool> {
    let n = f.num_vars();
    if n % 2 == 1 {
        return Err(Error::OddVariableCount(n));
    }
    let target = 1i64 << (n / 2);
    Ok(walsh_transform(f)?
        .values()
        .iter()
        .all(|w| w.abs() == target))
}

/// Complete tree on `x1..x(n/2)` in order, `under(a)` below assignment `a`.
fn x_block<T>(half: usize, under: &dyn Fn(usize) -> T, node: &dyn Fn(usize, T, T) -> T) -> T {
    fn go<T>(
        l: usize,
        a: usize,
        half: usize,
        under: &dyn Fn(usize) -> T,
        node: &dyn Fn(usize, T, T) -> T,
    ) -> T {
        if l == half {
            return under(a);
        }
        let zero = go(l + 1, a, half, under, node);
        let one = go(l + 1, a | 1 << l, half, under, node);
        node(l, zero, one)
    }
    go(0, 0, half, under, node)
}

/// Complete tree on `x`, then under each `a` a complete tree on the `y_i`
/// with `phi(a)_i = 1`. Depth `n`.
pub fn mm_classical_tree(spec: &MMBentSpec) -> DecisionTree {
    let half = spec.half();
    let under = |a: usize| {
        let ys: Vec<usize> = (0..half).filter(|i| spec.phi[a] >> i & 1 == 1).collect();
        fn chain(ys: &[usize], half: usize, acc: bool) -> DecisionTree {
            match ys.split_first() {
                None => DecisionTree::leaf(acc),
                Some((&i, rest)) => {
                    DecisionTree::query(half + i, chain(rest, half, acc), chain(rest, half, !acc))
                }
            }
        }
        chain(&ys, half, spec.h.get(a))
    };
    x_block(half, &under, &|l, zero, one| {
        DecisionTree::query(l, zero, one)
    })
}

/// Same `x` block; the selected `y_i` are then read two at a time by parity
/// queries. Depth at most `ceil(3n/4)`.
pub fn mm_parity_tree(spec: &MMBentSpec) -> ParityDecisionTree {
    let half = spec.half();
    let under = |a: usize| {
        let ys: Vec<usize> = (0..half)
            .filter(|i| spec.phi[a] >> i & 1 == 1)
            .map(|i| half + i)
            .collect();
        fn chain(ys: &[usize], acc: bool) -> ParityDecisionTree {
            let (query, rest) = match ys {
                [] => return ParityDecisionTree::leaf(acc),
                [i] => (Query::Var(*i), &ys[1..]),
                [i, j, ..] => (Query::Parity(*i, *j), &ys[2..]),
            };
            ParityDecisionTree::query(query, chain(rest, acc), chain(rest, !acc))
        }
        chain(&ys, spec.h.get(a))
    };
    x_block(half, &under, &|l, zero, one| {
        ParityDecisionTree::var(l, zero, one)
    })
}

/// Uniform `phi` (Fisher-Yates) and uniform `h`, deterministic in `seed`.
pub fn random_mm(n: usize, seed: u64) -> Result<MMBentSpec> {
    if n % 2 == 1 {
        return Err(Error::OddVariableCount(n));
    }
    if !(2..=MM_MAX_VARS).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "n must be in 2..={MM_MAX_VARS}, got {n}"
        )));
    }
    let half = n / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut phi: Vec<u32> = (0..1u32 << half).collect();
    phi.shuffle(&mut rng);
    let bits: Vec<bool> = (0..1usize << half).map(|_| rng.gen()).collect();
    let h = TruthTable::from_fn(half, |i| bits[i])?;
    MMBentSpec::new(n, phi, h)
}

/// `f` restricted to `x = a`, as a function of `y`.
pub fn restrict_x(f: &TruthTable, a: usize) -> TruthTable {
    let half = f.num_vars() / 2;
    TruthTable::from_fn(half, |y| f.get(a | y << half)).expect("half size")
}

/// `f` restricted to `y = b`, as a function of `x`.
pub fn restrict_y(f: &TruthTable, b: usize) -> TruthTable {
    let half = f.num_vars() / 2;
    TruthTable::from_fn(half, |x| f.get(x | b << half)).expect("half size")
}

/// Checks the two restrictions used by the lower-bound argument:
/// `f(x^, y)` is the parity of `y` xor `h(x^)` where `phi(x^)` is all ones,
/// and `f(x, 0) = h(x)`.
pub fn restriction_identities_hold(spec: &MMBentSpec) -> bool {
    let f = mm_build(spec);
    let a = spec.all_ones_preimage();
    let ha = spec.h.get(a);
    let parity =
        TruthTable::from_fn(spec.half(), |y| (y.count_ones() % 2 == 1) ^ ha).expect("half size");
    restrict_x(&f, a) == parity && restrict_y(&f, 0) == spec.h
}
