//! Statevector check that a parity decision tree is an exact quantum query
//! algorithm.
//!
//! Each node becomes a one-query subroutine on an index register of
//! `ceil(log2 n)` qubits and one target qubit: a fixed preparation unitary,
//! the oracle `O_x |i>|t> = |i>|t xor x_i>`, a fixed post-processing unitary
//! and a measurement. The tree is walked classically, measuring after every
//! query.

use std::collections::HashMap;

use nalgebra::{Complex, DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::boolfun::{index_point, TruthTable};
use crate::error::{check_cap, Error, Result};
use crate::ptrees::{PNode, ParityDecisionTree, Query};

pub type C64 = Complex<f64>;

pub const QSIM_MAX_VARS: usize = 12;
/// Allowed distance of an outcome probability from 1.
pub const OUTCOME_TOLERANCE: f64 = 1e-9;
/// Allowed drift of the state norm and of `U^dagger U` from the identity.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Index register wide enough to address `n` variables, plus the target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Register {
    n: usize,
    index_qubits: usize,
}

impl Register {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("no variables to query".into()));
        }
        check_cap("qsim", n, QSIM_MAX_VARS)?;
        let index_qubits = (usize::BITS - (n - 1).leading_zeros()).max(1) as usize;
        Ok(Self { n, index_qubits })
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn index_qubits(&self) -> usize {
        self.index_qubits
    }

    pub fn dim(&self) -> usize {
        2 << self.index_qubits
    }

    fn basis(i: usize, t: usize) -> usize {
        i << 1 | t
    }

    fn check(&self, var: usize) -> Result<()> {
        if var >= self.n {
            Err(Error::VariableOutOfRange { var, n: self.n })
        } else {
            Ok(())
        }
    }
}

/// State of the index and target register together with its query count.
#[derive(Clone, Debug)]
pub struct QueryState {
    amplitudes: DVector<C64>,
    queries: usize,
}

impl QueryState {
    /// `|0>|0>`.
    pub fn new(reg: &Register) -> Self {
        let mut amplitudes = DVector::zeros(reg.dim());
        amplitudes[0] = C64::new(1.0, 0.0);
        Self {
            amplitudes,
            queries: 0,
        }
    }

    pub fn from_amplitudes(amplitudes: DVector<C64>) -> Self {
        Self {
            amplitudes,
            queries: 0,
        }
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn queries(&self) -> usize {
        self.queries
    }

    pub fn norm_error(&self) -> f64 {
        (self.amplitudes.norm() - 1.0).abs()
    }

    pub fn apply(&mut self, u: &DMatrix<C64>) {
        self.amplitudes = u * &self.amplitudes;
    }

    /// One oracle call for the input with index `x` (LSB-first).
    pub fn query(&mut self, reg: &Register, x: usize) {
        apply_oracle(reg, x, &mut self.amplitudes);
        self.queries += 1;
    }

    /// Probability mass on index value `i`.
    pub fn index_probability(&self, i: usize) -> f64 {
        (0..2)
            .map(|t| self.amplitudes[Register::basis(i, t)].norm_sqr())
            .sum()
    }

    /// Probability that the target qubit reads 1.
    pub fn target_probability(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(b, _)| b & 1 == 1)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Mass on index values that do not name a variable.
    pub fn padding_probability(&self, reg: &Register) -> f64 {
        (reg.n..1 << reg.index_qubits)
            .map(|i| self.index_probability(i))
            .sum()
    }
}

/// `O_x` as a permutation of basis states; padded indices see `x_i = 0`.
pub fn apply_oracle(reg: &Register, x: usize, amplitudes: &mut DVector<C64>) {
    for i in 0..reg.n {
        if x >> i & 1 == 1 {
            amplitudes.swap_rows(Register::basis(i, 0), Register::basis(i, 1));
        }
    }
}

pub fn oracle_matrix(reg: &Register, x: usize) -> DMatrix<C64> {
    let mut m = DMatrix::identity(reg.dim(), reg.dim());
    for i in 0..reg.n {
        if x >> i & 1 == 1 {
            m.swap_rows(Register::basis(i, 0), Register::basis(i, 1));
        }
    }
    m
}

/// Frobenius distance of `U^dagger U` from the identity.
pub fn unitarity_error(u: &DMatrix<C64>) -> f64 {
    let d = u.nrows();
    (u.adjoint() * u - DMatrix::<C64>::identity(d, d)).norm()
}

fn swap_indices(reg: &Register, a: usize, b: usize) -> DMatrix<C64> {
    let mut m = DMatrix::identity(reg.dim(), reg.dim());
    for t in 0..2 {
        m.swap_rows(Register::basis(a, t), Register::basis(b, t));
    }
    m
}

/// Hadamard on the span of `|i>, |j>` of the index register.
fn hadamard_pair(reg: &Register, i: usize, j: usize) -> DMatrix<C64> {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut m = DMatrix::identity(reg.dim(), reg.dim());
    for t in 0..2 {
        let (a, b) = (Register::basis(i, t), Register::basis(j, t));
        m[(a, a)] = s;
        m[(a, b)] = s;
        m[(b, a)] = s;
        m[(b, b)] = -s;
    }
    m
}

/// `H X` on the target qubit: `|0> -> |->`.
fn minus_on_target(reg: &Register) -> DMatrix<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let hx = DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(s, 0.0),
            C64::new(s, 0.0),
            C64::new(-s, 0.0),
            C64::new(s, 0.0),
        ],
    );
    let eye = DMatrix::<C64>::identity(1 << reg.index_qubits, 1 << reg.index_qubits);
    eye.kronecker(&hx)
}

/// One node compiled to its fixed unitaries.
#[derive(Clone, Debug)]
pub struct CompiledQuery {
    reg: Register,
    query: Query,
    prep: DMatrix<C64>,
    post: DMatrix<C64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SingleOutcome {
    pub bit: bool,
    /// `|1 - P(bit)|`, including any mass left on padded index values.
    pub deviation: f64,
    /// Largest norm drift seen during the subroutine.
    pub norm_error: f64,
}

impl CompiledQuery {
    pub fn new(reg: Register, query: Query) -> Result<Self> {
        let dim = reg.dim();
        let (prep, post) = match query {
            Query::Var(i) => {
                reg.check(i)?;
                (swap_indices(&reg, 0, i), DMatrix::identity(dim, dim))
            }
            Query::Parity(i, j) => {
                reg.check(i)?;
                reg.check(j)?;
                if i == j {
                    return Err(Error::RepeatedVariable(i));
                }
                let h = hadamard_pair(&reg, i, j);
                let prep = &h * swap_indices(&reg, 0, i) * minus_on_target(&reg);
                (prep, h)
            }
        };
        for u in [&prep, &post] {
            let e = unitarity_error(u);
            if e > NORM_TOLERANCE {
                return Err(Error::InvalidParameter(format!(
                    "compiled operator is not unitary (error {e:e})"
                )));
            }
        }
        Ok(Self {
            reg,
            query,
            prep,
            post,
        })
    }

    pub fn query(&self) -> Query {
        self.query
    }

    /// Runs the subroutine on input `x` from `|0>|0>`.
    pub fn run(&self, x: usize) -> SingleOutcome {
        let mut st = QueryState::new(&self.reg);
        let mut norm_error: f64 = 0.0;
        st.apply(&self.prep);
        norm_error = norm_error.max(st.norm_error());
        st.query(&self.reg, x);
        norm_error = norm_error.max(st.norm_error());
        st.apply(&self.post);
        norm_error = norm_error.max(st.norm_error());
        debug_assert_eq!(st.queries(), 1);
        let padding = st.padding_probability(&self.reg);
        let (p0, p1) = match self.query {
            Query::Var(_) => {
                let p1 = st.target_probability();
                (1.0 - p1, p1)
            }
            Query::Parity(i, j) => (st.index_probability(i), st.index_probability(j)),
        };
        let bit = p1 > p0;
        let p = if bit { p1 } else { p0 };
        SingleOutcome {
            bit,
            deviation: (1.0 - p).abs().max(padding),
            norm_error,
        }
    }
}

/// Single subroutine on `n` variables at point `x`.
pub fn run_single_query(n: usize, query: Query, x: &[bool]) -> Result<SingleOutcome> {
    let reg = Register::new(n)?;
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    let idx = crate::boolfun::point_index(n, x)?;
    Ok(CompiledQuery::new(reg, query)?.run(idx))
}

#[derive(Clone, Debug, Serialize)]
pub struct InputRun {
    /// `x1 x2 ... xn` as a bit string.
    pub input: String,
    pub output: u8,
    pub expected: u8,
    pub queries: usize,
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub n: usize,
    pub tree_depth: usize,
    pub pass: bool,
    pub inputs_checked: usize,
    pub mismatches: usize,
    pub max_queries: usize,
    pub max_deviation: f64,
    pub max_norm_error: f64,
    pub transcript: Vec<InputRun>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Simulates `t` on every input and compares with `f`.
pub fn run_ptree_algorithm(t: &ParityDecisionTree, f: &TruthTable) -> Result<RunReport> {
    let n = f.num_vars();
    let reg = Register::new(n)?;
    if t.min_vars() > n {
        return Err(Error::VariableOutOfRange {
            var: t.min_vars() - 1,
            n,
        });
    }
    let mut compiled = HashMap::new();
    for q in t.queries() {
        if let std::collections::hash_map::Entry::Vacant(e) = compiled.entry(q) {
            e.insert(CompiledQuery::new(reg, q)?);
        }
    }
    let transcript_and_norms: Vec<(InputRun, f64)> = (0..1usize << n)
        .into_par_iter()
        .map(|x| {
            let mut node = t.root();
            let mut queries = 0;
            let mut deviation: f64 = 0.0;
            let mut norm: f64 = 0.0;
            let output = loop {
                match node {
                    PNode::Leaf(b) => break *b,
                    PNode::Query { query, zero, one } => {
                        let r = compiled[query].run(x);
                        queries += 1;
                        deviation = deviation.max(r.deviation);
                        norm = norm.max(r.norm_error);
                        node = if r.bit { one } else { zero };
                    }
                }
            };
            let input = index_point(n, x)
                .into_iter()
                .map(|b| if b { '1' } else { '0' })
                .collect();
            let run = InputRun {
                input,
                output: output as u8,
                expected: f.get(x) as u8,
                queries,
                deviation,
            };
            (run, norm)
        })
        .collect();
    let max_norm_error = transcript_and_norms.iter().map(|r| r.1).fold(0.0, f64::max);
    let transcript: Vec<InputRun> = transcript_and_norms.into_iter().map(|r| r.0).collect();
    let mismatches = transcript.iter().filter(|r| r.output != r.expected).count();
    let max_deviation = transcript.iter().map(|r| r.deviation).fold(0.0, f64::max);
    let max_queries = transcript.iter().map(|r| r.queries).max().unwrap_or(0);
    Ok(RunReport {
        n,
        tree_depth: t.depth(),
        pass: mismatches == 0
            && max_deviation <= OUTCOME_TOLERANCE
            && max_norm_error <= NORM_TOLERANCE,
        inputs_checked: transcript.len(),
        mismatches,
        max_queries,
        max_deviation,
        max_norm_error,
        transcript,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfun::{tt_from_anf, Anf};
    use crate::families::{build_fn2, FamilyKind, FamilySpec};
    use crate::mmbent::{mm_build, mm_classical_tree, mm_parity_tree, random_mm};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn anf(s: &str) -> TruthTable {
        tt_from_anf(&s.parse::<Anf>().unwrap())
    }

    #[test]
    fn register_sizes() {
        assert_eq!(Register::new(1).unwrap().index_qubits(), 1);
        assert_eq!(Register::new(2).unwrap().index_qubits(), 1);
        assert_eq!(Register::new(5).unwrap().index_qubits(), 3);
        assert_eq!(Register::new(8).unwrap().index_qubits(), 3);
        assert_eq!(Register::new(9).unwrap().dim(), 32);
        assert!(Register::new(0).is_err());
        assert!(Register::new(13).is_err());
    }

    #[test]
    fn single_queries() {
        let r = run_single_query(3, Query::Var(0), &[true, false, false]).unwrap();
        assert!(r.bit);
        assert!(r.deviation <= 1e-12);
        let x = [false, false, false, false, true];
        let r = run_single_query(5, Query::Parity(3, 4), &x).unwrap();
        assert!(r.bit);
        assert!(r.deviation <= 1e-12);
        let r = run_single_query(2, Query::Parity(0, 1), &[true, true]).unwrap();
        assert!(!r.bit);
        assert!(r.deviation <= 1e-12);
        assert!(run_single_query(2, Query::Var(2), &[true, true]).is_err());
        assert!(run_single_query(2, Query::Parity(1, 1), &[true, true]).is_err());
        assert!(run_single_query(2, Query::Var(0), &[true]).is_err());
    }

    #[test]
    fn every_single_query_reads_the_right_bit() {
        let reg = Register::new(5).unwrap();
        let mut queries = vec![];
        for i in 0..5 {
            queries.push(Query::Var(i));
            for j in i + 1..5 {
                queries.push(Query::Parity(i, j));
            }
        }
        for q in queries {
            let c = CompiledQuery::new(reg, q).unwrap();
            for x in 0..32 {
                let r = c.run(x);
                assert_eq!(r.bit, q.eval_index(x));
                assert!(r.deviation <= 1e-12 && r.norm_error <= 1e-12);
            }
        }
    }

    #[test]
    fn kickback_amplitudes() {
        // after the oracle: ((-1)^x_i |i> + (-1)^x_j |j>)/sqrt2 (x) |->
        let reg = Register::new(5).unwrap();
        let c = CompiledQuery::new(reg, Query::Parity(3, 4)).unwrap();
        let mut st = QueryState::new(&reg);
        st.apply(&c.prep);
        st.query(&reg, 0b10000);
        let s = 0.5;
        let amp = |i, t| st.amplitudes()[Register::basis(i, t)].re;
        assert!((amp(3, 0) - s).abs() < 1e-12);
        assert!((amp(3, 1) + s).abs() < 1e-12);
        assert!((amp(4, 0) + s).abs() < 1e-12);
        assert!((amp(4, 1) - s).abs() < 1e-12);
        assert_eq!(st.queries(), 1);
    }

    #[test]
    fn oracle_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [1, 3, 6, 12] {
            let reg = Register::new(n).unwrap();
            for _ in 0..10 {
                let v = DVector::from_fn(reg.dim(), |_, _| {
                    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                });
                let v = &v / C64::new(v.norm(), 0.0);
                let x = rng.gen_range(0..1usize << n);
                let mut w = v.clone();
                apply_oracle(&reg, x, &mut w);
                apply_oracle(&reg, x, &mut w);
                assert!((w - &v).norm() < 1e-12);
                let m = oracle_matrix(&reg, x);
                assert!(unitarity_error(&m) < 1e-12);
                assert!((&m * &m - DMatrix::identity(reg.dim(), reg.dim())).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn f5_walkthrough() {
        let (t, f) = build_fn2(5).unwrap();
        let rep = run_ptree_algorithm(&t, &f).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.inputs_checked, 32);
        assert_eq!(rep.max_queries, 2);
        let hit = rep.transcript.iter().find(|r| r.input == "10101").unwrap();
        assert_eq!((hit.output, hit.queries), (1, 2));
    }

    #[test]
    fn small_trees() {
        let x = anf("x1 + x2");
        let t = ParityDecisionTree::pair(
            0,
            1,
            ParityDecisionTree::leaf(false),
            ParityDecisionTree::leaf(true),
        )
        .unwrap();
        let rep = run_ptree_algorithm(&t, &x).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.max_queries, 1);
        // x1 xor x2 decides between x4 and x3
        let fp4 = anf("x1*x4 + x2*x4 + x3 + x1*x3 + x2*x3");
        let leaf = ParityDecisionTree::leaf;
        let fig4 = ParityDecisionTree::pair(
            0,
            1,
            ParityDecisionTree::var(2, leaf(false), leaf(true)),
            ParityDecisionTree::var(3, leaf(false), leaf(true)),
        )
        .unwrap();
        let rep = run_ptree_algorithm(&fig4, &fp4).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.max_queries, 2);
        // a wrong tree is caught
        let rep = run_ptree_algorithm(&fig4, &x.compact(0b11).embed(4, &[0, 1]).unwrap()).unwrap();
        assert!(!rep.pass);
        assert!(rep.mismatches > 0);
        assert!(run_ptree_algorithm(&fig4, &x).is_err());
    }

    #[test]
    fn emitted_trees_are_exact() {
        for kind in FamilyKind::ALL {
            for p in 1..=12 {
                let Ok(spec) = FamilySpec::new(kind, p) else {
                    continue;
                };
                if spec.num_vars() > 10 {
                    continue;
                }
                let c = spec.build().unwrap();
                let t = c.tree.to_parity();
                let rep = run_ptree_algorithm(&t, &c.function).unwrap();
                assert!(rep.pass, "{kind} {p}");
                assert!(rep.max_deviation <= 1e-9);
                assert_eq!(rep.max_queries, t.depth());
            }
        }
        for seed in 0..3 {
            let spec = random_mm(6, seed).unwrap();
            let f = mm_build(&spec);
            for t in [mm_parity_tree(&spec), (&mm_classical_tree(&spec)).into()] {
                let rep = run_ptree_algorithm(&t, &f).unwrap();
                assert!(rep.pass);
                assert!(rep.max_queries <= t.depth());
            }
        }
    }
}
