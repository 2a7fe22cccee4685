//! Parity decision trees: nodes read a variable or the XOR of two variables.

use std::collections::{BTreeMap, HashSet};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::boolfun::TruthTable;
use crate::error::{check_cap, Error, Result};
use crate::json::{NodeRepr, QueryRepr};
use crate::search::{support_vars, QueryModel, Solver};
use crate::trees::{leaf_bit, one_based, DecisionTree, Node};

/// Default variable cap for [`optimal_parity_depth`].
pub const PARITY_DEPTH_MAX_VARS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Query {
    Var(usize),
    /// `x_i xor x_j`, stored with `i < j`.
    Parity(usize, usize),
}

impl Query {
    pub fn parity(i: usize, j: usize) -> Result<Self> {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => Ok(Self::Parity(i, j)),
            std::cmp::Ordering::Greater => Ok(Self::Parity(j, i)),
            std::cmp::Ordering::Equal => Err(Error::RepeatedVariable(i)),
        }
    }

    pub fn eval_index(self, idx: usize) -> bool {
        match self {
            Self::Var(i) => idx >> i & 1 == 1,
            Self::Parity(i, j) => (idx >> i ^ idx >> j) & 1 == 1,
        }
    }

    fn max_var(self) -> usize {
        match self {
            Self::Var(i) => i,
            Self::Parity(_, j) => j,
        }
    }

    fn vars(self) -> impl Iterator<Item = usize> {
        let (a, b) = match self {
            Self::Var(i) => (i, None),
            Self::Parity(i, j) => (i, Some(j)),
        };
        std::iter::once(a).chain(b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PNode {
    Leaf(bool),
    Query {
        query: Query,
        zero: Box<PNode>,
        one: Box<PNode>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityDecisionTree {
    root: PNode,
}

impl ParityDecisionTree {
    pub fn leaf(value: bool) -> Self {
        Self {
            root: PNode::Leaf(value),
        }
    }

    pub fn query(query: Query, zero: Self, one: Self) -> Self {
        Self {
            root: PNode::Query {
                query,
                zero: Box::new(zero.root),
                one: Box::new(one.root),
            },
        }
    }

    pub fn var(i: usize, zero: Self, one: Self) -> Self {
        Self::query(Query::Var(i), zero, one)
    }

    pub fn pair(i: usize, j: usize, zero: Self, one: Self) -> Result<Self> {
        Ok(Self::query(Query::parity(i, j)?, zero, one))
    }

    pub fn from_root(root: PNode) -> Self {
        Self { root }
    }

    pub fn root(&self) -> &PNode {
        &self.root
    }

    /// Renames every variable `v` to `map(v)`.
    pub fn relabel(&self, map: &dyn Fn(usize) -> usize) -> Self {
        fn go(n: &PNode, map: &dyn Fn(usize) -> usize) -> PNode {
            match n {
                PNode::Leaf(b) => PNode::Leaf(*b),
                PNode::Query { query, zero, one } => PNode::Query {
                    query: match *query {
                        Query::Var(i) => Query::Var(map(i)),
                        Query::Parity(i, j) => {
                            let (a, b) = (map(i), map(j));
                            Query::Parity(a.min(b), a.max(b))
                        }
                    },
                    zero: Box::new(go(zero, map)),
                    one: Box::new(go(one, map)),
                },
            }
        }
        Self::from_root(go(&self.root, map))
    }

    pub fn depth(&self) -> usize {
        fn go(n: &PNode) -> usize {
            match n {
                PNode::Leaf(_) => 0,
                PNode::Query { zero, one, .. } => 1 + go(zero).max(go(one)),
            }
        }
        go(&self.root)
    }

    /// Largest number of pair queries on any root-to-leaf path.
    pub fn max_pairs_on_path(&self) -> usize {
        fn go(n: &PNode) -> usize {
            match n {
                PNode::Leaf(_) => 0,
                PNode::Query { query, zero, one } => {
                    matches!(query, Query::Parity(..)) as usize + go(zero).max(go(one))
                }
            }
        }
        go(&self.root)
    }

    /// Queries in pre-order.
    pub fn queries(&self) -> Vec<Query> {
        fn go(n: &PNode, acc: &mut Vec<Query>) {
            if let PNode::Query { query, zero, one } = n {
                acc.push(*query);
                go(zero, acc);
                go(one, acc);
            }
        }
        let mut acc = Vec::new();
        go(&self.root, &mut acc);
        acc
    }

    /// Number of query occurrences of each variable.
    pub fn var_census(&self) -> BTreeMap<usize, usize> {
        let mut acc = BTreeMap::new();
        for v in self.queries().into_iter().flat_map(Query::vars) {
            *acc.entry(v).or_default() += 1;
        }
        acc
    }

    pub fn min_vars(&self) -> usize {
        self.queries()
            .into_iter()
            .map(|q| q.max_var() + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &[bool]) -> Result<bool> {
        if self.min_vars() > x.len() {
            return Err(Error::VariableOutOfRange {
                var: self.min_vars() - 1,
                n: x.len(),
            });
        }
        let idx = crate::boolfun::point_index(x.len(), x)?;
        Ok(self.eval_index(idx))
    }

    pub(crate) fn eval_index(&self, idx: usize) -> bool {
        let mut node = &self.root;
        loop {
            match node {
                PNode::Leaf(b) => return *b,
                PNode::Query { query, zero, one } => {
                    node = if query.eval_index(idx) { one } else { zero }
                }
            }
        }
    }

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
        fn go(n: &PNode) -> NodeRepr {
            match n {
                PNode::Leaf(b) => NodeRepr::Leaf { leaf: *b as u8 },
                PNode::Query { query, zero, one } => NodeRepr::Query {
                    q: match *query {
                        Query::Var(i) => QueryRepr::Var { i: i + 1 },
                        Query::Parity(i, j) => QueryRepr::Parity { i: i + 1, j: j + 1 },
                    },
                    zero: Box::new(go(zero)),
                    one: Box::new(go(one)),
                },
            }
        }
        go(&self.root)
    }

    pub(crate) fn from_repr(r: &NodeRepr) -> Result<Self> {
        fn go(r: &NodeRepr) -> Result<PNode> {
            Ok(match r {
                NodeRepr::Leaf { leaf } => PNode::Leaf(leaf_bit(*leaf)?),
                NodeRepr::Query { q, zero, one } => PNode::Query {
                    query: match *q {
                        QueryRepr::Var { i } => Query::Var(one_based(i)?),
                        QueryRepr::Parity { i, j } => Query::parity(one_based(i)?, one_based(j)?)?,
                    },
                    zero: Box::new(go(zero)?),
                    one: Box::new(go(one)?),
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

impl From<&DecisionTree> for ParityDecisionTree {
    fn from(t: &DecisionTree) -> Self {
        fn go(n: &Node) -> PNode {
            match n {
                Node::Leaf(b) => PNode::Leaf(*b),
                Node::Query { var, zero, one } => PNode::Query {
                    query: Query::Var(*var),
                    zero: Box::new(go(zero)),
                    one: Box::new(go(one)),
                },
            }
        }
        Self { root: go(t.root()) }
    }
}

impl Serialize for ParityDecisionTree {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_repr().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ParityDecisionTree {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = NodeRepr::deserialize(d)?;
        Self::from_repr(&r).map_err(D::Error::custom)
    }
}

pub fn eval_ptree(t: &ParityDecisionTree, x: &[bool]) -> Result<bool> {
    t.eval(x)
}

pub fn ptree_function(t: &ParityDecisionTree, n: usize) -> Result<TruthTable> {
    t.function(n)
}

/// Expands every pair node into the two-level gadget: read `x_i`, then
/// `x_j` on both sides, with the original children swapped under `x_i = 1`.
/// The original 0-child is reached exactly when `x_i = x_j`.
pub fn parity_to_deterministic(t: &ParityDecisionTree) -> DecisionTree {
    fn go(n: &PNode) -> DecisionTree {
        match n {
            PNode::Leaf(b) => DecisionTree::leaf(*b),
            PNode::Query { query, zero, one } => {
                let (z, o) = (go(zero), go(one));
                match *query {
                    Query::Var(i) => DecisionTree::query(i, z, o),
                    Query::Parity(i, j) => DecisionTree::query(
                        i,
                        DecisionTree::query(j, z.clone(), o.clone()),
                        DecisionTree::query(j, o, z),
                    ),
                }
            }
        }
    }
    go(&t.root)
}

pub(crate) struct ParityQueries;

impl QueryModel for ParityQueries {
    type Query = Query;

    fn queries(&self, support: u32) -> Vec<Query> {
        let vars: Vec<usize> = support_vars(support).collect();
        let mut out = Vec::with_capacity(vars.len() * (vars.len() + 1) / 2);
        for (a, &i) in vars.iter().enumerate() {
            out.push(Query::Var(i));
            out.extend(vars[a + 1..].iter().map(|&j| Query::Parity(i, j)));
        }
        out
    }

    fn branch(&self, f: &TruthTable, q: Query, outcome: bool) -> TruthTable {
        match q {
            Query::Var(i) => f.fix_unchecked(i, outcome),
            Query::Parity(i, j) => f.substitute_parity_unchecked(i, j, outcome),
        }
    }
}

/// Exact minimum depth over parity trees with single and pair queries.
pub struct ParityDepthSearch {
    cap: usize,
    solver: Solver<ParityQueries>,
}

impl Default for ParityDepthSearch {
    fn default() -> Self {
        Self::new(PARITY_DEPTH_MAX_VARS)
    }
}

impl ParityDepthSearch {
    pub fn new(cap: usize) -> Self {
        Self {
            cap,
            solver: Solver::new(ParityQueries, true),
        }
    }

    pub fn without_memo(cap: usize) -> Self {
        Self {
            cap,
            solver: Solver::new(ParityQueries, false),
        }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn depth(&self, f: &TruthTable) -> Result<usize> {
        check_cap("optimal_parity_depth", f.num_vars(), self.cap)?;
        Ok(self.solver.depth(f) as usize)
    }

    pub fn optimal_tree(&self, f: &TruthTable) -> Result<(usize, ParityDecisionTree)> {
        let d = self.depth(f)?;
        let t = self
            .solver
            .witness(f, &ParityDecisionTree::leaf, &ParityDecisionTree::query);
        Ok((d, t))
    }
}

/// Minimum parity-tree depth under the default cap; an upper bound on the
/// exact quantum query complexity.
pub fn optimal_parity_depth(f: &TruthTable) -> Result<usize> {
    ParityDepthSearch::default().depth(f)
}

/// Every function computed by some parity tree of depth at most `depth`
/// over `n` variables, with the number of trees enumerated.
pub struct TreeEnumeration {
    pub trees: u64,
    pub functions: HashSet<TruthTable>,
}

pub const ENUMERATION_MAX_VARS: usize = 7;

/// Enumerates all parity trees of depth at most two (one for `depth = 1`).
///
/// Trees are counted individually, including ones that compute the same
/// function; only the resulting function set is deduplicated.
pub fn enumerate_parity_trees(n: usize, depth: usize) -> Result<TreeEnumeration> {
    check_cap("parity tree enumeration", n, ENUMERATION_MAX_VARS)?;
    if depth > 2 {
        return Err(Error::InvalidParameter(format!(
            "exhaustive enumeration supports depth <= 2, got {depth}"
        )));
    }
    let full: u128 = if n == 7 {
        u128::MAX
    } else {
        (1u128 << (1 << n)) - 1
    };
    let query_tables: Vec<u128> = ParityQueries
        .queries(((1u64 << n) - 1) as u32)
        .into_iter()
        .map(|q| {
            (0..1usize << n)
                .filter(|&x| q.eval_index(x))
                .fold(0u128, |acc, x| acc | 1 << x)
        })
        .collect();
    // every tree of depth <= d, as its table, one entry per tree
    let mut level: Vec<u128> = vec![0, full];
    for _ in 0..depth.saturating_sub(1) {
        let mut next = vec![0, full];
        for &qt in &query_tables {
            for &a in &level {
                for &b in &level {
                    next.push((a & !qt) | (b & qt));
                }
            }
        }
        level = next;
    }
    let mut functions = HashSet::new();
    let mut trees = 0u64;
    let to_table = |bits: u128| {
        let words = if n <= 6 {
            vec![bits as u64]
        } else {
            vec![bits as u64, (bits >> 64) as u64]
        };
        TruthTable::from_words(n, words).expect("mask matches n")
    };
    if depth == 0 {
        trees = 2;
        functions.extend([to_table(0), to_table(full)]);
        return Ok(TreeEnumeration { trees, functions });
    }
    let mut seen = HashSet::new();
    seen.extend([0, full]);
    trees += 2;
    for &qt in &query_tables {
        for &a in &level {
            for &b in &level {
                trees += 1;
                seen.insert((a & !qt) | (b & qt));
            }
        }
    }
    functions.extend(seen.into_iter().map(to_table));
    Ok(TreeEnumeration { trees, functions })
}
