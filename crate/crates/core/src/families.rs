//! Constructors for the query-friendly function families.
//!
//! Every construction labels its internal nodes in level order, left to
//! right, starting at `x1`; partially filled levels are filled from the
//! left; and a leaf reached along branch `b` holds the value `b`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::boolfun::TruthTable;
use crate::error::{check_cap, Error, Result};
use crate::ptrees::{PNode, ParityDecisionTree, Query};
use crate::trees::{dq, DecisionTree, Node};

/// Largest variable count for which a family's truth table is materialized.
pub const FAMILY_TABLE_MAX_VARS: usize = 15;
/// Largest variable count for tree-only output.
pub const FAMILY_TREE_MAX_VARS: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// Fully complete depth-k tree on `2^k - 1` variables.
    FullTree,
    /// Non-separable query-friendly function on n variables.
    Fn1,
    /// Separable query-friendly function on n variables.
    Fn2,
    /// Fully complete depth-k tree of pair queries on `2^(k+1) - 2` variables.
    ParityComplete,
    /// Depth `dq(n) - 1` parity tree on n variables.
    Separable,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 5] = [
        Self::FullTree,
        Self::Fn1,
        Self::Fn2,
        Self::ParityComplete,
        Self::Separable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::FullTree => "full-tree",
            Self::Fn1 => "fn1",
            Self::Fn2 => "fn2",
            Self::ParityComplete => "parity-complete",
            Self::Separable => "separable",
        }
    }

    /// Whether the parameter is a depth `k` rather than a variable count.
    pub fn takes_depth(self) -> bool {
        matches!(self, Self::FullTree | Self::ParityComplete)
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown family {s:?}")))
    }
}

/// A family tag with a validated parameter (`k` or `n`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub param: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Empty,
    Single,
    Pair,
}

/// Layout of a family's tree: which slots of each level hold which kind of
/// query.
struct Layout {
    depth: usize,
    slot: Box<dyn Fn(usize, usize) -> Slot>,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, param: usize) -> Result<Self> {
        let spec = Self { kind, param };
        spec.layout()?;
        Ok(spec)
    }

    /// Number of variables of the constructed function.
    pub fn num_vars(&self) -> usize {
        match self.kind {
            FamilyKind::FullTree => (1 << self.param) - 1,
            FamilyKind::ParityComplete => (1 << (self.param + 1)) - 2,
            _ => self.param,
        }
    }

    fn layout(&self) -> Result<Layout> {
        let bad = |why: String| Err(Error::InvalidParameter(why));
        let p = self.param;
        match self.kind {
            FamilyKind::FullTree => {
                if !(1..=14).contains(&p) {
                    return bad(format!("full tree needs 1 <= k <= 14, got {p}"));
                }
                Ok(Layout {
                    depth: p,
                    slot: Box::new(|_, _| Slot::Single),
                })
            }
            FamilyKind::ParityComplete => {
                if !(1..=13).contains(&p) {
                    return bad(format!("complete parity tree needs 1 <= k <= 13, got {p}"));
                }
                Ok(Layout {
                    depth: p,
                    slot: Box::new(|_, _| Slot::Pair),
                })
            }
            FamilyKind::Fn1 => {
                let k = dq(p);
                if p < 2 || p == (1 << k) - 1 || p > FAMILY_TREE_MAX_VARS {
                    return bad(format!(
                        "f(n,1) needs 2^(k-1)-1 < n < 2^k-1 for some k, got n={p} (use full-tree when n = 2^k-1)"
                    ));
                }
                let bottom = p - (1 << (k - 1)) + 1;
                Ok(Layout {
                    depth: k,
                    slot: Box::new(move |l, pos| {
                        if l < k || pos < bottom {
                            Slot::Single
                        } else {
                            Slot::Empty
                        }
                    }),
                })
            }
            FamilyKind::Fn2 => {
                let k = dq(p);
                if k < 2 || p > (1 << (k - 1)) + (1 << (k - 2)) - 1 || p > FAMILY_TREE_MAX_VARS {
                    return bad(format!(
                        "f(n,2) needs 2^(k-1)-1 < n <= 2^(k-1)+2^(k-2)-1 for some k >= 2, got n={p}"
                    ));
                }
                let rest = p - ((1 << (k - 2)) - 1);
                let nodes = rest.div_ceil(2);
                Ok(Layout {
                    depth: k - 1,
                    slot: Box::new(move |l, pos| {
                        if l < k - 1 {
                            Slot::Single
                        } else if pos >= nodes {
                            Slot::Empty
                        } else if pos == nodes - 1 && rest % 2 == 1 {
                            Slot::Single
                        } else {
                            Slot::Pair
                        }
                    }),
                })
            }
            FamilyKind::Separable => {
                let k = dq(p);
                if p < 2 || p == (1 << k) - 1 || p > FAMILY_TREE_MAX_VARS {
                    return bad(format!(
                        "separable construction needs 2^(k-1)-1 < n < 2^k-1 for some k, got n={p}"
                    ));
                }
                let depth = k - 1;
                let pairs = p - (1 << (k - 1)) + 1;
                Ok(Layout {
                    depth,
                    slot: Box::new(move |l, pos| {
                        // rank in deepest-level-first, left-to-right order
                        let deeper: usize = (l + 1..=depth).map(|d| 1usize << (d - 1)).sum();
                        if deeper + pos < pairs {
                            Slot::Pair
                        } else {
                            Slot::Single
                        }
                    }),
                })
            }
        }
    }

    /// The defining tree, without materializing the truth table.
    pub fn tree(&self) -> Result<ParityDecisionTree> {
        let layout = self.layout()?;
        // level-order variable labels
        let mut labels: Vec<Vec<Option<Query>>> = Vec::with_capacity(layout.depth);
        let mut next = 0usize;
        for l in 1..=layout.depth {
            let mut row = Vec::with_capacity(1 << (l - 1));
            for pos in 0..1usize << (l - 1) {
                let parent_exists = l == 1 || labels[l - 2][pos / 2].is_some();
                let q = match (parent_exists, (layout.slot)(l, pos)) {
                    (false, _) | (_, Slot::Empty) => None,
                    (true, Slot::Single) => {
                        next += 1;
                        Some(Query::Var(next - 1))
                    }
                    (true, Slot::Pair) => {
                        next += 2;
                        Some(Query::Parity(next - 2, next - 1))
                    }
                };
                row.push(q);
            }
            labels.push(row);
        }
        debug_assert_eq!(next, self.num_vars());
        fn build(labels: &[Vec<Option<Query>>], l: usize, pos: usize, bit: bool) -> PNode {
            match labels.get(l - 1).and_then(|row| row[pos]) {
                Some(query) => PNode::Query {
                    query,
                    zero: Box::new(build(labels, l + 1, 2 * pos, false)),
                    one: Box::new(build(labels, l + 1, 2 * pos + 1, true)),
                },
                None => PNode::Leaf(bit),
            }
        }
        Ok(ParityDecisionTree::from_root(build(&labels, 1, 0, false)))
    }

    pub fn build(&self) -> Result<Construction> {
        check_cap("family truth table", self.num_vars(), FAMILY_TABLE_MAX_VARS)?;
        let tree = self.tree()?;
        let function = tree.function(self.num_vars())?;
        let tree = match self.kind {
            FamilyKind::FullTree | FamilyKind::Fn1 => FamilyTree::Deterministic(
                as_deterministic(&tree).expect("single-variable queries only"),
            ),
            _ => FamilyTree::Parity(tree),
        };
        Ok(Construction {
            spec: *self,
            tree,
            function,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "model", content = "root", rename_all = "lowercase")]
pub enum FamilyTree {
    Deterministic(DecisionTree),
    Parity(ParityDecisionTree),
}

impl FamilyTree {
    pub fn depth(&self) -> usize {
        match self {
            Self::Deterministic(t) => t.depth(),
            Self::Parity(t) => t.depth(),
        }
    }

    pub fn to_parity(&self) -> ParityDecisionTree {
        match self {
            Self::Deterministic(t) => t.into(),
            Self::Parity(t) => t.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            Self::Deterministic(t) => t.to_json(),
            Self::Parity(t) => t.to_json(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Construction {
    pub spec: FamilySpec,
    pub tree: FamilyTree,
    pub function: TruthTable,
}

/// The deterministic tree when every query reads a single variable.
pub fn as_deterministic(t: &ParityDecisionTree) -> Option<DecisionTree> {
    fn go(n: &PNode) -> Option<Node> {
        Some(match n {
            PNode::Leaf(b) => Node::Leaf(*b),
            PNode::Query { query, zero, one } => match query {
                Query::Var(v) => Node::Query {
                    var: *v,
                    zero: Box::new(go(zero)?),
                    one: Box::new(go(one)?),
                },
                Query::Parity(..) => return None,
            },
        })
    }
    go(t.root()).map(DecisionTree::from_root)
}

fn deterministic(kind: FamilyKind, param: usize) -> Result<(DecisionTree, TruthTable)> {
    let c = FamilySpec::new(kind, param)?.build()?;
    match c.tree {
        FamilyTree::Deterministic(t) => Ok((t, c.function)),
        FamilyTree::Parity(_) => unreachable!("deterministic family"),
    }
}

fn parity(kind: FamilyKind, param: usize) -> Result<(ParityDecisionTree, TruthTable)> {
    let c = FamilySpec::new(kind, param)?.build()?;
    Ok((c.tree.to_parity(), c.function))
}

/// `f_k`: fully complete depth-k tree, each of the `2^k - 1` variables once.
pub fn build_full_tree(k: usize) -> Result<(DecisionTree, TruthTable)> {
    check_cap("full tree depth", k, 4)?;
    deterministic(FamilyKind::FullTree, k)
}

/// `f_(n,1)`: first `k - 1` levels full, the remaining variables at level k.
pub fn build_fn1(n: usize) -> Result<(DecisionTree, TruthTable)> {
    deterministic(FamilyKind::Fn1, n)
}

/// `f_(n,2)`: single queries above, pair queries on the last level.
pub fn build_fn2(n: usize) -> Result<(ParityDecisionTree, TruthTable)> {
    parity(FamilyKind::Fn2, n)
}

pub fn build_parity_complete(k: usize) -> Result<(ParityDecisionTree, TruthTable)> {
    check_cap("complete parity tree depth", k, 3)?;
    parity(FamilyKind::ParityComplete, k)
}

pub fn build_separable(n: usize) -> Result<(ParityDecisionTree, TruthTable)> {
    check_cap("separable construction", n, 14)?;
    parity(FamilyKind::Separable, n)
}

/// `s*g xor (s+1)*h`: `g` on the first variables, `h` on the next ones and
/// the selector `s` last.
pub fn selector_combine(g: &TruthTable, h: &TruthTable) -> Result<TruthTable> {
    let (ng, nh) = (g.num_vars(), h.num_vars());
    let n = ng + nh + 1;
    check_cap("selector combination", n, crate::boolfun::MAX_VARS)?;
    TruthTable::from_fn(n, |idx| {
        if idx >> (n - 1) & 1 == 1 {
            g.get(idx & ((1 << ng) - 1))
        } else {
            h.get((idx >> ng) & ((1 << nh) - 1))
        }
    })
}

/// Tree for [`selector_combine`] built from trees for `g` (on `ng`
/// variables) and `h`.
pub fn selector_tree(
    g: &ParityDecisionTree,
    ng: usize,
    h: &ParityDecisionTree,
    nh: usize,
) -> ParityDecisionTree {
    ParityDecisionTree::var(ng + nh, h.relabel(&|v| v + ng), g.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfun::{anf_from_tt, influencing_variables, restrict_var, tt_from_anf, Anf};
    use crate::ptrees::ParityDepthSearch;
    use crate::trees::DepthSearch;

    fn anf(t: &TruthTable) -> String {
        anf_from_tt(t).to_string()
    }

    fn table(s: &str) -> TruthTable {
        tt_from_anf(&s.parse::<Anf>().unwrap())
    }

    #[test]
    fn full_trees() {
        assert_eq!(anf(&build_full_tree(1).unwrap().1), "x1");
        assert_eq!(anf(&build_full_tree(2).unwrap().1), "x1*x2 + x1*x3 + x2");
        let (t, f) = build_full_tree(3).unwrap();
        assert_eq!(
            f,
            table("x1*x2*x4 + x1*x2*x5 + x1*x4 + x2*x4 + x2*x5 + x4 + x1*x3*x6 + x1*x3*x7 + x1*x6")
        );
        assert_eq!(t.depth(), 3);
        assert!(build_full_tree(5).is_err());
        assert!(build_full_tree(0).is_err());
        // tree-only output beyond the table cap
        let big = FamilySpec::new(FamilyKind::FullTree, 6)
            .unwrap()
            .tree()
            .unwrap();
        assert_eq!(big.depth(), 6);
        assert_eq!(big.var_census().len(), 63);
    }

    #[test]
    fn fn1_shapes() {
        let s = DepthSearch::default();
        let (t5, f5) = build_fn1(5).unwrap();
        assert_eq!(t5.depth(), 3);
        // x1; x2, x3; x4 and x5 under x2
        let json = t5.to_json();
        assert!(json.starts_with(r#"{"q":{"kind":"var","i":1},"0":{"q":{"kind":"var","i":2},"0":{"q":{"kind":"var","i":4}"#));
        assert_eq!(s.depth(&f5).unwrap(), 3);
        let (t4, f4) = build_fn1(4).unwrap();
        assert_eq!(t4.depth(), 3);
        assert_eq!(t4.var_census().len(), 4);
        assert_eq!(s.depth(&f4).unwrap(), 3);
        let (t6, f6) = build_fn1(6).unwrap();
        assert_eq!(t6.var_census().len(), 6);
        assert_eq!(s.depth(&f6).unwrap(), 3);
        assert!(build_fn1(7).is_err());
        assert!(build_fn1(3).is_err());
        assert_eq!(influencing_variables(&build_fn1(2).unwrap().1), vec![0, 1]);
    }

    #[test]
    fn fn2_shapes() {
        let (t5, f5) = build_fn2(5).unwrap();
        assert_eq!(anf(&f5), "x1*x2 + x1*x3 + x1*x4 + x1*x5 + x2 + x3");
        assert_eq!(t5.depth(), 2);
        let (t2, f2) = build_fn2(2).unwrap();
        assert_eq!(t2.queries(), vec![Query::Parity(0, 1)]);
        assert_eq!(anf(&f2), "x1 + x2");
        let (t4, f4) = build_fn2(4).unwrap();
        assert_eq!(
            t4.queries(),
            vec![Query::Var(0), Query::Parity(1, 2), Query::Var(3)]
        );
        assert_eq!(DepthSearch::default().depth(&f4).unwrap(), 3);
        assert_eq!(ParityDepthSearch::default().depth(&f4).unwrap(), 2);
        for bad in [1, 3, 6, 7] {
            assert!(build_fn2(bad).is_err(), "n={bad}");
        }
        assert_eq!(
            FamilySpec::new(FamilyKind::Fn2, 11)
                .unwrap()
                .tree()
                .unwrap()
                .depth(),
            3
        );
    }

    #[test]
    fn parity_complete() {
        assert_eq!(anf(&build_parity_complete(1).unwrap().1), "x1 + x2");
        let (t, f) = build_parity_complete(2).unwrap();
        assert_eq!(t.depth(), 2);
        assert_eq!(f.num_vars(), 6);
        assert_eq!(ParityDepthSearch::new(6).depth(&f).unwrap(), 2);
        assert_eq!(crate::boolfun::algebraic_degree(&f), 2);
        let mut r = f.clone();
        for v in [1, 3, 5] {
            r = r.fix(v, false).unwrap();
        }
        let r = r.compact(r.support());
        assert_eq!(r.num_vars(), 3);
        assert_eq!(DepthSearch::default().depth(&r).unwrap(), 2);
        assert_eq!(r, build_full_tree(2).unwrap().1);
        assert!(build_parity_complete(4).is_err());
    }

    #[test]
    fn separable() {
        let (t4, f4) = build_separable(4).unwrap();
        assert_eq!(t4.depth(), 2);
        assert_eq!(t4.max_pairs_on_path(), 1);
        assert_eq!(influencing_variables(&f4).len(), 4);
        let (t6, f6) = build_separable(6).unwrap();
        assert_eq!(
            t6.queries(),
            vec![
                Query::Parity(0, 1),
                Query::Parity(2, 3),
                Query::Parity(4, 5)
            ]
        );
        assert_eq!(ParityDepthSearch::new(6).depth(&f6).unwrap(), 2);
        assert_eq!(anf(&build_separable(2).unwrap().1), "x1 + x2");
        assert_eq!(build_separable(5).unwrap().1, build_fn2(5).unwrap().1);
        assert!(build_separable(7).is_err());
    }

    #[test]
    fn selector() {
        let (x1, x1b) = (table("x1"), table("x1"));
        let f = selector_combine(&x1, &x1b).unwrap();
        assert_eq!(anf(&f), "x1*x3 + x2*x3 + x2");
        let z = TruthTable::zero(0).unwrap();
        assert_eq!(selector_combine(&z, &z).unwrap().as_constant(), Some(false));
        let f3 = build_full_tree(2).unwrap().1;
        let f7 = selector_combine(&f3, &f3).unwrap();
        assert_eq!(f7.num_vars(), 7);
        let on = restrict_var(&f7, 6, true).unwrap();
        assert_eq!(on.function.compact(0b000111), f3);
        let (t3, _) = build_full_tree(2).unwrap();
        let pt = ParityDecisionTree::from(&t3);
        let st = selector_tree(&pt, 3, &pt, 3);
        assert_eq!(st.function(7).unwrap(), f7);
    }

    #[test]
    fn every_family_member_is_fully_influencing_and_matches_its_tree() {
        for kind in FamilyKind::ALL {
            for p in 1..=15 {
                let Ok(spec) = FamilySpec::new(kind, p) else {
                    continue;
                };
                let Ok(c) = spec.build() else { continue };
                let n = spec.num_vars();
                assert_eq!(c.function.support(), ((1u64 << n) - 1) as u32, "{kind} {p}");
                assert_eq!(c.tree.to_parity().function(n).unwrap(), c.function);
                assert_eq!(c.tree.to_parity().var_census().values().max(), Some(&1));
            }
        }
    }

    #[test]
    fn family_names_parse() {
        for k in FamilyKind::ALL {
            assert_eq!(k.name().parse::<FamilyKind>().unwrap(), k);
        }
        assert!("nope".parse::<FamilyKind>().is_err());
    }
}
