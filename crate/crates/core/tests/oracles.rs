//! Optimized searches checked against plain recursive definitions.

use qsep_core::boolfun::TruthTable;
use qsep_core::mmbent::{mm_build, random_mm};
use qsep_core::ptrees::{enumerate_parity_trees, ParityDepthSearch};
use qsep_core::trees::DepthSearch;

/// Explicit truth table on its own variables, no packing.
#[derive(Clone)]
struct Table {
    n: usize,
    bits: Vec<bool>,
}

impl Table {
    fn of(f: &TruthTable) -> Self {
        Self {
            n: f.num_vars(),
            bits: (0..f.len()).map(|i| f.get(i)).collect(),
        }
    }

    fn constant(&self) -> bool {
        self.bits.iter().all(|&b| b == self.bits[0])
    }

    /// Drop variable `v` after substituting `x_v := x_u xor b` (or `b` when
    /// `u` is `None`).
    fn substitute(&self, v: usize, u: Option<usize>, b: bool) -> Self {
        let mut bits = Vec::with_capacity(self.bits.len() / 2);
        for y in 0..1usize << (self.n - 1) {
            let low = y & ((1 << v) - 1);
            let high = (y >> v) << (v + 1);
            let rest = low | high;
            let xv = match u {
                None => b,
                Some(u) => (rest >> u & 1 == 1) ^ b,
            };
            bits.push(self.bits[rest | (xv as usize) << v]);
        }
        Self {
            n: self.n - 1,
            bits,
        }
    }
}

fn naive_depth(t: &Table) -> usize {
    if t.constant() {
        return 0;
    }
    (0..t.n)
        .map(|v| {
            1 + naive_depth(&t.substitute(v, None, false))
                .max(naive_depth(&t.substitute(v, None, true)))
        })
        .min()
        .unwrap()
}

fn naive_parity_depth(t: &Table) -> usize {
    if t.constant() {
        return 0;
    }
    let mut best = t.n;
    for v in 0..t.n {
        let d = 1 + naive_parity_depth(&t.substitute(v, None, false))
            .max(naive_parity_depth(&t.substitute(v, None, true)));
        best = best.min(d);
        for u in 0..t.n {
            if u == v {
                continue;
            }
            let d = 1 + naive_parity_depth(&t.substitute(v, Some(u), false))
                .max(naive_parity_depth(&t.substitute(v, Some(u), true)));
            best = best.min(d);
        }
    }
    best
}

#[test]
fn depth_matches_naive_recursion_on_all_three_variable_functions() {
    let d = DepthSearch::new(3);
    let p = ParityDepthSearch::new(3);
    for bits in 0..256u64 {
        let f = TruthTable::from_u64(3, bits).unwrap();
        let t = Table::of(&f);
        assert_eq!(d.depth(&f).unwrap(), naive_depth(&t), "{f}");
        assert_eq!(p.depth(&f).unwrap(), naive_parity_depth(&t), "{f}");
    }
}

#[test]
fn depth_matches_naive_recursion_on_sampled_four_variable_functions() {
    let d = DepthSearch::new(4);
    let p = ParityDepthSearch::new(4);
    for k in 0..300u64 {
        let bits = k.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 48;
        let f = TruthTable::from_u64(4, bits).unwrap();
        let t = Table::of(&f);
        assert_eq!(d.depth(&f).unwrap(), naive_depth(&t), "{f}");
        assert_eq!(p.depth(&f).unwrap(), naive_parity_depth(&t), "{f}");
    }
}

#[test]
fn bent_six_variable_depth_without_memo() {
    let f = mm_build(&random_mm(6, 0).unwrap());
    assert_eq!(DepthSearch::without_memo(6).depth(&f).unwrap(), 6);
    assert_eq!(DepthSearch::new(6).depth(&f).unwrap(), 6);
}

#[test]
fn depth_two_parity_functions_have_parity_depth_at_most_two() {
    let e = enumerate_parity_trees(4, 2).unwrap();
    let p = ParityDepthSearch::new(4);
    for f in &e.functions {
        assert!(p.depth(f).unwrap() <= 2, "{f}");
    }
    // and conversely every parity-depth <= 2 function on 4 variables appears
    let all = (0..1u64 << 16)
        .map(|b| TruthTable::from_u64(4, b).unwrap())
        .filter(|f| p.depth(f).unwrap() <= 2)
        .count();
    assert_eq!(all, e.functions.len());
}
