//! Deterministic decision trees and exact deterministic query complexity.

use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::boolfun::TruthTable;
use crate::error::{check_cap, Error, Result};
use crate::json::{NodeRepr, QueryRepr};
use crate::search::{support_vars, QueryModel, Solver};

/// Default variable cap for [`optimal_depth`].
pub const DEPTH_MAX_VARS: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Leaf(bool),
    Query {
        var: usize,
        zero: Box<Node>,
        one: Box<Node>,
    },
}

/// Classical query tree; internal nodes read one variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionTree {
    root: Node,
}

impl DecisionTree {
    pub fn leaf(value: bool) -> Self {
        Self {
            root: Node::Leaf(value),
        }
    }

    pub fn query(var: usize, zero: DecisionTree, one: DecisionTree) -> Self {
        Self {
            root: Node::Query {
                var,
                zero: Box::new(zero.root),
                one: Box::new(one.root),
            },
        }
    }

    pub fn from_root(root: Node) -> Self {
        Self { root }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn depth(&self) -> usize {
        fn go(n: &Node) -> usize {
            match n {
                Node::Leaf(_) => 0,
                Node::Query { zero, one, .. } => 1 + go(zero).max(go(one)),
            }
        }
        go(&self.root)
    }

    /// Number of nodes querying each variable.
    pub fn var_census(&self) -> BTreeMap<usize, usize> {
        fn go(n: &Node, acc: &mut BTreeMap<usize, usize>) {
            if let Node::Query { var, zero, one } = n {
                *acc.entry(*var).or_default() += 1;
                go(zero, acc);
                go(one, acc);
            }
        }
        let mut acc = BTreeMap::new();
        go(&self.root, &mut acc);
        acc
    }

    /// Smallest variable count the tree can be evaluated on.
    pub fn min_vars(&self) -> usize {
        self.var_census().keys().next_back().map_or(0, |v| v + 1)
    }

    pub fn eval(&self, x: &[bool]) -> Result<bool> {
        if let Some(v) = self.var_census().keys().copied().find(|&v| v >= x.len()) {
            return Err(Error::VariableOutOfRange { var: v, n: x.len() });
        }
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf(b) => return Ok(*b),
                Node::Query { var, zero, one } => node = if x[*var] { one } else { zero },
            }
        }
    }

    pub(crate) fn eval_index(&self, idx: usize) -> bool {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf(b) => return *b,
                Node::Query { var, zero, one } => {
                    node = if idx >> var & 1 == 1 { one } else { zero }
                }
            }
        }
    }

    /// The function computed by the tree on `n` variables.
    pub fn function(&self, n: usize) -> Result<TruthTable> {
        if self.min_vars() > n {
            return Err(Error::VariableOutOfRange {
                var: self.min_vars() - 1,
                n,
            });
        }
        TruthTable::from_fn(n, |idx| self.eval_index(idx))
    }

    pub(crate) fn to_repr(&self) -> NodeRepr {
        fn go(n: &Node) -> NodeRepr {
            match n {
                Node::Leaf(b) => NodeRepr::Leaf { leaf: *b as u8 },
                Node::Query { var, zero, one } => NodeRepr::Query {
                    q: QueryRepr::Var { i: var + 1 },
                    zero: Box::new(go(zero)),
                    one: Box::new(go(one)),
                },
            }
        }
        go(&self.root)
    }

    pub(crate) fn from_repr(r: &NodeRepr) -> Result<Self> {
        fn go(r: &NodeRepr) -> Result<Node> {
            Ok(match r {
                NodeRepr::Leaf { leaf } => Node::Leaf(leaf_bit(*leaf)?),
                NodeRepr::Query { q, zero, one } => match *q {
                    QueryRepr::Var { i } => Node::Query {
                        var: one_based(i)?,
                        zero: Box::new(go(zero)?),
                        one: Box::new(go(one)?),
                    },
                    QueryRepr::Parity { .. } => {
                        return Err(Error::TreeShape(
                            "parity query in a deterministic tree".into(),
                        ))
                    }
                },
            })
        }
        Ok(Self { root: go(r)? })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("tree serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_repr(&serde_json::from_str(s)?)
    }
}

pub(crate) fn leaf_bit(v: u8) -> Result<bool> {
    match v {
        0 => Ok(false),
        1 => Ok(true),
        other => Err(Error::TreeShape(format!(
            "leaf value {other} is not 0 or 1"
        ))),
    }
}

pub(crate) fn one_based(i: usize) -> Result<usize> {
    i.checked_sub(1)
        .ok_or_else(|| Error::TreeShape("variable indices start at 1".into()))
}

impl Serialize for DecisionTree {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_repr().serialize(s)
    }
}

impl<'de> Deserialize<'de> for DecisionTree {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = NodeRepr::deserialize(d)?;
        Self::from_repr(&r).map_err(D::Error::custom)
    }
}

pub fn eval_tree(t: &DecisionTree, x: &[bool]) -> Result<bool> {
    t.eval(x)
}

pub fn tree_function(t: &DecisionTree, n: usize) -> Result<TruthTable> {
    t.function(n)
}

/// `ceil(log2(n + 1))`, the least depth of any tree with `n` influencing
/// variables.
pub fn dq(n: usize) -> usize {
    (usize::BITS - n.leading_zeros()) as usize
}

pub(crate) struct SingleQueries;

impl QueryModel for SingleQueries {
    type Query = usize;

    fn queries(&self, support: u32) -> Vec<usize> {
        support_vars(support).collect()
    }

    fn branch(&self, f: &TruthTable, var: usize, outcome: bool) -> TruthTable {
        f.fix_unchecked(var, outcome)
    }
}

/// Exact minimum-depth search over deterministic trees.
///
/// The memo cache is safe to share across threads; one search value can be
/// reused across many functions of the same or different sizes.
pub struct DepthSearch {
    cap: usize,
    solver: Solver<SingleQueries>,
}

impl Default for DepthSearch {
    fn default() -> Self {
        Self::new(DEPTH_MAX_VARS)
    }
}

impl DepthSearch {
    pub fn new(cap: usize) -> Self {
        Self {
            cap,
            solver: Solver::new(SingleQueries, true),
        }
    }

    /// Same search with memoization disabled.
    pub fn without_memo(cap: usize) -> Self {
        Self {
            cap,
            solver: Solver::new(SingleQueries, false),
        }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn cached_entries(&self) -> usize {
        self.solver.cached_entries()
    }

    pub fn depth(&self, f: &TruthTable) -> Result<usize> {
        check_cap("optimal_depth", f.num_vars(), self.cap)?;
        Ok(self.solver.depth(f) as usize)
    }

    /// Optimal depth with a witness tree (lowest variable index on ties).
    pub fn optimal_tree(&self, f: &TruthTable) -> Result<(usize, DecisionTree)> {
        let d = self.depth(f)?;
        let tree = self
            .solver
            .witness(f, &DecisionTree::leaf, &DecisionTree::query);
        Ok((d, tree))
    }
}

/// Exact deterministic query complexity `D(f)` under the default cap.
pub fn optimal_depth(f: &TruthTable) -> Result<usize> {
    DepthSearch::default().depth(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfun::{anf_from_tt, influencing_variables, tt_from_anf, Anf};

    fn q(var: usize, zero: DecisionTree, one: DecisionTree) -> DecisionTree {
        DecisionTree::query(var, zero, one)
    }

    fn l(b: u8) -> DecisionTree {
        DecisionTree::leaf(b == 1)
    }

    /// Root x1; x1=0 reads x2, x1=1 reads x3 and negates it.
    fn fig2() -> DecisionTree {
        q(0, q(1, l(0), l(1)), q(2, l(1), l(0)))
    }

    fn f2_tree() -> DecisionTree {
        q(0, q(1, l(0), l(1)), q(2, l(0), l(1)))
    }

    fn table(s: &str) -> TruthTable {
        tt_from_anf(&s.parse::<Anf>().unwrap())
    }

    #[test]
    fn eval_examples() {
        assert!(fig2().eval(&[false, true, false]).unwrap());
        assert!(!l(0).eval(&[true, true]).unwrap());
        assert!(!f2_tree().eval(&[true, true, false]).unwrap());
        assert!(matches!(
            fig2().eval(&[false, true]),
            Err(Error::VariableOutOfRange { var: 2, n: 2 })
        ));
    }

    #[test]
    fn functions_of_trees() {
        assert_eq!(f2_tree().function(3).unwrap().low_word(), 0xE4);
        assert_eq!(l(1).function(2).unwrap().as_constant(), Some(true));
        assert_eq!(
            anf_from_tt(&fig2().function(3).unwrap()).to_string(),
            "x1*x2 + x1*x3 + x1 + x2"
        );
        let factored = table("x1*x2 + x2 + x1*x3 + x1");
        assert_eq!(fig2().function(3).unwrap(), factored);
        assert!(fig2().function(2).is_err());
    }

    #[test]
    fn optimal_depth_examples() {
        assert_eq!(optimal_depth(&TruthTable::zero(3).unwrap()).unwrap(), 0);
        assert_eq!(optimal_depth(&table("x1*x2 + x1*x3 + x2")).unwrap(), 2);
        assert_eq!(optimal_depth(&table("x1*x2 + x3*x4")).unwrap(), 4);
        let seven = TruthTable::zero(7).unwrap();
        assert!(matches!(
            optimal_depth(&seven),
            Err(Error::CapExceeded { n: 7, cap: 6, .. })
        ));
        assert_eq!(DepthSearch::new(7).depth(&seven).unwrap(), 0);
    }

    #[test]
    fn dq_values() {
        assert_eq!(dq(1), 1);
        assert_eq!(dq(5), 3);
        assert_eq!(dq(7), 3);
        assert_eq!(dq(8), 4);
    }

    #[test]
    fn witness_tree_is_optimal_and_correct() {
        let s = DepthSearch::default();
        for f in [
            table("x1*x2 + x1*x3 + x2"),
            table("x1*x2 + x3*x4"),
            table("x1*x2*x3 + x4 + x2*x4"),
        ] {
            let (d, t) = s.optimal_tree(&f).unwrap();
            assert_eq!(t.depth(), d);
            assert_eq!(t.function(f.num_vars()).unwrap(), f);
        }
        // tie-break: lowest index, so F3's witness is rooted at x1
        let (_, t) = s.optimal_tree(&table("x1*x2 + x1*x3 + x2")).unwrap();
        assert_eq!(t, f2_tree());
    }

    #[test]
    fn memo_on_and_off_agree_for_all_three_variable_functions() {
        let (a, b) = (DepthSearch::default(), DepthSearch::without_memo(6));
        for bits in 0..256u64 {
            let f = TruthTable::from_u64(3, bits).unwrap();
            assert_eq!(a.depth(&f).unwrap(), b.depth(&f).unwrap());
        }
        assert!(a.cached_entries() > 0);
        assert_eq!(b.cached_entries(), 0);
    }

    #[test]
    fn influencing_count_bounded_by_depth() {
        let s = DepthSearch::default();
        for bits in 0..256u64 {
            let f = TruthTable::from_u64(3, bits).unwrap();
            let d = s.depth(&f).unwrap();
            assert!(influencing_variables(&f).len() < 1 << d);
            assert_eq!(d == 0, f.as_constant().is_some());
        }
    }

    #[test]
    fn json_round_trip_and_schema() {
        let t = fig2();
        let s = t.to_json();
        assert!(s.starts_with(r#"{"q":{"kind":"var","i":1},"0":"#));
        assert_eq!(DecisionTree::from_json(&s).unwrap(), t);
        assert_eq!(DecisionTree::from_json(r#"{"leaf":1}"#).unwrap(), l(1));
        assert!(DecisionTree::from_json(r#"{"leaf":2}"#).is_err());
        assert!(DecisionTree::from_json(
            r#"{"q":{"kind":"parity","i":1,"j":2},"0":{"leaf":0},"1":{"leaf":1}}"#
        )
        .is_err());
        assert!(DecisionTree::from_json(
            r#"{"q":{"kind":"var","i":0},"0":{"leaf":0},"1":{"leaf":1}}"#
        )
        .is_err());
    }
}
