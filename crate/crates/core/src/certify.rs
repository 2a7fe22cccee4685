//! Checkable evidence about exact quantum query complexity: `AND_k`
//! reductions (lower bounds), bound intervals and query-friendly
//! classification.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::boolfun::{anf_from_tt, real_degree, Anf, TruthTable, REAL_POLY_MAX_VARS};
use crate::error::{check_cap, Error, Result};
use crate::ptrees::{ParityDecisionTree, ParityDepthSearch, PARITY_DEPTH_MAX_VARS};
use crate::search::support_vars;
use crate::trees::{dq, DecisionTree, DepthSearch, Node, DEPTH_MAX_VARS};

/// Variable cap for [`find_and_reduction`].
pub const AND_SEARCH_MAX_VARS: usize = 6;

/// The factor `x_var xor negated` of an `AND_k` monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

/// A partial assignment under which `f` becomes
/// `output_polarity xor prod(x_v xor negated_v)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "CertRepr", try_from = "CertRepr")]
pub struct ReductionCertificate {
    pub restriction: Vec<(usize, bool)>,
    pub literals: Vec<Literal>,
    pub output_polarity: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct CertRepr {
    k: usize,
    restriction: Vec<AssignRepr>,
    literals: Vec<LiteralRepr>,
    output_polarity: u8,
}

#[derive(Serialize, Deserialize)]
struct AssignRepr {
    var: usize,
    value: u8,
}

#[derive(Serialize, Deserialize)]
struct LiteralRepr {
    var: usize,
    negated: bool,
}

fn bit(v: u8) -> Result<bool> {
    match v {
        0 => Ok(false),
        1 => Ok(true),
        _ => Err(Error::InvalidCertificate(format!(
            "expected a bit, got {v}"
        ))),
    }
}

fn zero_based(v: usize) -> Result<usize> {
    v.checked_sub(1)
        .ok_or_else(|| Error::InvalidCertificate("variables are numbered from 1".into()))
}

impl From<ReductionCertificate> for CertRepr {
    fn from(c: ReductionCertificate) -> Self {
        Self {
            k: c.literals.len(),
            restriction: c
                .restriction
                .iter()
                .map(|&(var, b)| AssignRepr {
                    var: var + 1,
                    value: b as u8,
                })
                .collect(),
            literals: c
                .literals
                .iter()
                .map(|l| LiteralRepr {
                    var: l.var + 1,
                    negated: l.negated,
                })
                .collect(),
            output_polarity: c.output_polarity as u8,
        }
    }
}

impl TryFrom<CertRepr> for ReductionCertificate {
    type Error = Error;

    fn try_from(r: CertRepr) -> Result<Self> {
        let restriction = r
            .restriction
            .iter()
            .map(|a| Ok((zero_based(a.var)?, bit(a.value)?)))
            .collect::<Result<_>>()?;
        let literals = r
            .literals
            .iter()
            .map(|l| {
                Ok(Literal {
                    var: zero_based(l.var)?,
                    negated: l.negated,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if literals.len() != r.k {
            return Err(Error::InvalidCertificate(format!(
                "k = {} but {} literals",
                r.k,
                literals.len()
            )));
        }
        Ok(Self {
            restriction,
            literals,
            output_polarity: bit(r.output_polarity)?,
        })
    }
}

impl ReductionCertificate {
    pub fn k(&self) -> usize {
        self.literals.len()
    }

    /// `f` with the restriction applied, on the original variables.
    pub fn restrict(&self, f: &TruthTable) -> Result<TruthTable> {
        let mut g = f.clone();
        for &(v, b) in &self.restriction {
            g = g.fix(v, b)?;
        }
        Ok(g)
    }

    /// The ANF the restricted function must have.
    pub fn target(&self, n: usize) -> Result<Anf> {
        // expand prod(x_v + c_v) monomial by monomial
        let mut monomials = Vec::with_capacity(1 << self.k());
        for subset in 0..1u32 << self.k() {
            let keep = self
                .literals
                .iter()
                .enumerate()
                .all(|(t, l)| subset >> t & 1 == 1 || l.negated);
            if keep {
                let mask = self
                    .literals
                    .iter()
                    .enumerate()
                    .filter(|(t, _)| subset >> t & 1 == 1)
                    .fold(0u32, |m, (_, l)| m | 1 << l.var);
                monomials.push(mask);
            }
        }
        let constant_term = monomials.iter().filter(|&&m| m == 0).count() % 2 == 1;
        Anf::new(
            n,
            monomials.into_iter().filter(|&m| m != 0),
            constant_term ^ self.output_polarity,
        )
    }

    /// Re-applies the restriction to `f` and compares ANFs.
    pub fn verify(&self, f: &TruthTable) -> Result<()> {
        let n = f.num_vars();
        let mut used = vec![false; n];
        let vars = self
            .restriction
            .iter()
            .map(|r| r.0)
            .chain(self.literals.iter().map(|l| l.var));
        for v in vars {
            if v >= n {
                return Err(Error::VariableOutOfRange { var: v, n });
            }
            if std::mem::replace(&mut used[v], true) {
                return Err(Error::InvalidCertificate(format!(
                    "x{} appears twice",
                    v + 1
                )));
            }
        }
        if self.literals.is_empty() {
            return Err(Error::InvalidCertificate("no literals".into()));
        }
        let got = anf_from_tt(&self.restrict(f)?);
        let want = self.target(n)?;
        if got != want {
            return Err(Error::InvalidCertificate(format!(
                "restriction gives {got}, expected {want}"
            )));
        }
        Ok(())
    }

    fn relabel(&self, origin: &[usize]) -> Self {
        Self {
            restriction: self
                .restriction
                .iter()
                .map(|&(v, b)| (origin[v], b))
                .collect(),
            literals: self
                .literals
                .iter()
                .map(|l| Literal {
                    var: origin[l.var],
                    negated: l.negated,
                })
                .collect(),
            output_polarity: self.output_polarity,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// A path from the root that reads a query at every level down to full depth.
fn deep_paths(
    node: &Node,
    depth: usize,
    prefix: &mut Vec<(usize, bool)>,
    out: &mut Vec<Vec<(usize, bool)>>,
) {
    let Node::Query { var, zero, one } = node else {
        return;
    };
    if depth == 1 {
        out.push(prefix.iter().copied().chain([(*var, true)]).collect());
        return;
    }
    for (child, b) in [(one, true), (zero, false)] {
        if node_depth(child) == depth - 1 {
            prefix.push((*var, b));
            deep_paths(child, depth - 1, prefix, out);
            prefix.pop();
        }
    }
}

fn node_depth(n: &Node) -> usize {
    match n {
        Node::Leaf(_) => 0,
        Node::Query { zero, one, .. } => 1 + node_depth(zero).max(node_depth(one)),
    }
}

/// Assignments along some path of `node` ending in a leaf equal to `value`.
fn path_to_value(node: &Node, value: bool) -> Option<Vec<(usize, bool)>> {
    match node {
        Node::Leaf(b) => (*b == value).then(Vec::new),
        Node::Query { var, zero, one } => {
            [(zero, false), (one, true)].into_iter().find_map(|(c, b)| {
                let mut p = path_to_value(c, value)?;
                p.insert(0, (*var, b));
                Some(p)
            })
        }
    }
}

fn child(node: &Node, b: bool) -> &Node {
    match node {
        Node::Query { zero, one, .. } => {
            if b {
                one
            } else {
                zero
            }
        }
        Node::Leaf(_) => unreachable!("path runs through query nodes"),
    }
}

/// Certificate read off a read-once tree: follow a deepest path, send every
/// subtree hanging off it to a fixed leaf value, and the path variables form
/// an `AND_k` with `k` the tree depth.
pub fn reduction_from_tree(t: &DecisionTree) -> Result<ReductionCertificate> {
    if let Some((v, _)) = t.var_census().into_iter().find(|&(_, c)| c > 1) {
        return Err(Error::TreeShape(format!(
            "x{} is queried more than once",
            v + 1
        )));
    }
    let k = t.depth();
    if k == 0 {
        return Err(Error::TreeShape("a leaf has no AND reduction".into()));
    }
    let mut paths = Vec::new();
    deep_paths(t.root(), k, &mut Vec::new(), &mut paths);
    for path in paths {
        // walk to the last node
        let mut node = t.root();
        for &(_, b) in &path[..k - 1] {
            node = child(node, b);
        }
        let last = path[k - 1].0;
        for dk in [true, false] {
            let (Node::Leaf(hit), Node::Leaf(miss)) = (child(node, dk), child(node, !dk)) else {
                unreachable!("deepest node has leaf children")
            };
            let base = *miss;
            if *hit == base {
                continue;
            }
            let mut restriction = Vec::new();
            let mut ok = true;
            let mut walk = t.root();
            for &(_, b) in &path[..k - 1] {
                match path_to_value(child(walk, !b), base) {
                    Some(fixes) => restriction.extend(fixes),
                    None => {
                        ok = false;
                        break;
                    }
                }
                walk = child(walk, b);
            }
            if !ok {
                continue;
            }
            let literals = path[..k - 1]
                .iter()
                .copied()
                .chain([(last, dk)])
                .map(|(var, b)| Literal { var, negated: !b })
                .collect();
            return Ok(ReductionCertificate {
                restriction,
                literals,
                output_polarity: base,
            });
        }
    }
    Err(Error::TreeShape(
        "no deepest path admits an AND reduction".into(),
    ))
}

/// `Some` certificate when `g` (on its own variables) is an AND of `k`
/// literals on its support, possibly complemented.
fn and_shape(g: &TruthTable, k: usize) -> Option<(Vec<Literal>, bool)> {
    let support = g.support();
    if support.count_ones() as usize != k {
        return None;
    }
    let n = g.num_vars();
    let ones = g.weight();
    let (output, target) = if ones == 1u64 << (n - k) {
        (false, true)
    } else if ones == (1u64 << n) - (1u64 << (n - k)) {
        (true, false)
    } else {
        return None;
    };
    let point = (0..g.len()).find(|&i| g.get(i) == target)?;
    let literals = support_vars(support)
        .map(|v| Literal {
            var: v,
            negated: point >> v & 1 == 0,
        })
        .collect();
    Some((literals, output))
}

/// Smallest restriction (then lexicographically first) turning `f` into a
/// function isomorphic to `AND_k`.
pub fn find_and_reduction(f: &TruthTable, k: usize) -> Result<Option<ReductionCertificate>> {
    let n = f.num_vars();
    check_cap("find_and_reduction", n, AND_SEARCH_MAX_VARS)?;
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "k must be in 1..={n}, got {k}"
        )));
    }
    search_and(f, k)
}

/// Exact-search caps used by [`qe_bounds_with`] and [`classify_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub depth: usize,
    pub parity_depth: usize,
    pub and_search: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            depth: DEPTH_MAX_VARS,
            parity_depth: PARITY_DEPTH_MAX_VARS,
            and_search: AND_SEARCH_MAX_VARS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LowerSource {
    RealDegreeHalf,
    AndReduction,
    /// Fallback when every other source is over its cap: 1 for a
    /// non-constant function, 0 otherwise.
    NonConstant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum UpperSource {
    ParityTree,
    DeterministicTree,
    /// Fallback when both searches are over their caps: query every
    /// influencing variable.
    AllVariables,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QeBoundsCertificate {
    pub lo: usize,
    pub lo_source: LowerSource,
    pub hi: usize,
    pub hi_source: UpperSource,
    /// Set when some bound source was skipped because of a cap.
    pub partial: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub real_degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub and_reduction: Option<ReductionCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deterministic_depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parity_depth: Option<usize>,
    /// Tree of depth `hi` computing `f`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tree: Option<ParityDecisionTree>,
}

impl QeBoundsCertificate {
    /// Re-checks every attached witness against `f`.
    pub fn verify(&self, f: &TruthTable) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidCertificate(m));
        if self.lo > self.hi {
            return fail(format!("lo {} above hi {}", self.lo, self.hi));
        }
        match self.lo_source {
            LowerSource::RealDegreeHalf => {
                let d = real_degree(f)?;
                if Some(d) != self.real_degree || d.div_ceil(2) != self.lo {
                    return fail(format!("real degree is {d}"));
                }
            }
            LowerSource::AndReduction => match &self.and_reduction {
                Some(c) if c.k() == self.lo => c.verify(f)?,
                _ => return fail("missing AND reduction".into()),
            },
            LowerSource::NonConstant => {
                if self.lo != usize::from(f.as_constant().is_none()) {
                    return fail("wrong trivial lower bound".into());
                }
            }
        }
        match (&self.tree, self.hi_source) {
            (Some(t), UpperSource::ParityTree | UpperSource::DeterministicTree) => {
                if t.depth() != self.hi || t.function(f.num_vars())? != *f {
                    return fail("upper-bound tree does not compute f at depth hi".into());
                }
            }
            (None, UpperSource::AllVariables) => {
                if self.hi != f.support().count_ones() as usize {
                    return fail("wrong trivial upper bound".into());
                }
            }
            _ => return fail("upper-bound witness missing".into()),
        }
        Ok(())
    }
}

/// [`qe_bounds_with`] under the default caps.
pub fn qe_bounds(f: &TruthTable) -> Result<QeBoundsCertificate> {
    qe_bounds_with(f, &Caps::default())
}

/// Interval `[lo, hi]` containing `Q_E(f)`, each end with its witness.
/// Searches run on `f` compacted onto its influencing variables.
pub fn qe_bounds_with(f: &TruthTable, caps: &Caps) -> Result<QeBoundsCertificate> {
    let support = f.support();
    let origin: Vec<usize> = support_vars(support).collect();
    let g = f.compact(support);
    let m = origin.len();
    let mut partial = false;

    let rd = if m <= REAL_POLY_MAX_VARS {
        Some(real_degree(&g)?)
    } else {
        partial = true;
        None
    };
    let mut and_reduction = None;
    if m <= caps.and_search {
        for k in (1..=m).rev() {
            if let Some(c) = search_and(&g, k)? {
                and_reduction = Some(c.relabel(&origin));
                break;
            }
        }
    } else {
        partial = true;
    }
    let half = rd.map(|d| d.div_ceil(2));
    let and_k = and_reduction.as_ref().map(|c| c.k());
    let (lo, lo_source) = match (half, and_k) {
        (_, Some(a)) if a > half.unwrap_or(0) => (a, LowerSource::AndReduction),
        (Some(h), _) => (h, LowerSource::RealDegreeHalf),
        (None, _) => (usize::from(m > 0), LowerSource::NonConstant),
    };
    if lo_source != LowerSource::AndReduction {
        // keep only the witness that is used
        and_reduction = and_reduction.filter(|c| c.k() == lo);
    }

    let relabel = |t: &ParityDecisionTree| t.relabel(&|v| origin[v]);
    let det = if m <= caps.depth {
        let (d, t) = DepthSearch::new(caps.depth).optimal_tree(&g)?;
        Some((d, relabel(&ParityDecisionTree::from(&t))))
    } else {
        partial = true;
        None
    };
    let par = if m <= caps.parity_depth {
        Some(ParityDepthSearch::new(caps.parity_depth).optimal_tree(&g)?)
            .map(|(d, t)| (d, relabel(&t)))
    } else {
        partial = true;
        None
    };
    let (hi, hi_source, tree) = match (&det, &par) {
        (Some((d, t)), Some((p, _))) if d <= p => {
            (*d, UpperSource::DeterministicTree, Some(t.clone()))
        }
        (_, Some((p, t))) => (*p, UpperSource::ParityTree, Some(t.clone())),
        (Some((d, t)), None) => (*d, UpperSource::DeterministicTree, Some(t.clone())),
        (None, None) => (m, UpperSource::AllVariables, None),
    };
    let cert = QeBoundsCertificate {
        lo,
        lo_source,
        hi,
        hi_source,
        partial,
        real_degree: rd,
        and_reduction,
        deterministic_depth: det.map(|d| d.0),
        parity_depth: par.map(|p| p.0),
        tree,
    };
    debug_assert!(cert.lo <= cert.hi);
    Ok(cert)
}

fn search_and(f: &TruthTable, k: usize) -> Result<Option<ReductionCertificate>> {
    let n = f.num_vars();
    for r in 0..=n - k {
        for fixed in (0..n).combinations(r) {
            for bits in 0..1usize << r {
                // first fixed variable is the most significant digit
                let restriction: Vec<(usize, bool)> = fixed
                    .iter()
                    .enumerate()
                    .map(|(t, &v)| (v, bits >> (r - 1 - t) & 1 == 1))
                    .collect();
                let mut g = f.clone();
                for &(v, b) in &restriction {
                    g = g.fix_unchecked(v, b);
                }
                if let Some((literals, output_polarity)) = and_shape(&g, k) {
                    let cert = ReductionCertificate {
                        restriction,
                        literals,
                        output_polarity,
                    };
                    cert.verify(f)?;
                    return Ok(Some(cert));
                }
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Separability {
    Separable,
    NonSeparable,
    /// The certified interval does not decide it.
    Unknown,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QfClassification {
    pub is_qf: bool,
    pub separability: Separability,
    pub deterministic_depth: usize,
    pub influencing: usize,
}

/// [`classify_with`] under the default caps.
pub fn classify_query_friendly(f: &TruthTable) -> Result<QfClassification> {
    classify_with(f, &Caps::default())
}

/// Query friendly iff `D(f) = dq(#influencing)`; separable iff the certified
/// upper bound on `Q_E` is below `D(f)`.
pub fn classify_with(f: &TruthTable, caps: &Caps) -> Result<QfClassification> {
    let m = f.support().count_ones() as usize;
    check_cap("classify_query_friendly", m, caps.depth)?;
    let bounds = qe_bounds_with(f, caps)?;
    classify_from_bounds(f, &bounds)
}

/// Classification reusing an already computed bound certificate.
pub fn classify_from_bounds(
    f: &TruthTable,
    bounds: &QeBoundsCertificate,
) -> Result<QfClassification> {
    let m = f.support().count_ones() as usize;
    let d = bounds.deterministic_depth.ok_or(Error::CapExceeded {
        what: "classify_query_friendly",
        n: m,
        cap: DEPTH_MAX_VARS,
    })?;
    let separability = if bounds.hi < d {
        Separability::Separable
    } else if bounds.lo == d {
        Separability::NonSeparable
    } else {
        Separability::Unknown
    };
    Ok(QfClassification {
        is_qf: d == dq(m),
        separability,
        deterministic_depth: d,
        influencing: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfun::{tt_from_anf, TruthTable};
    use crate::families::{build_fn1, build_fn2, build_full_tree};
    use crate::mmbent::{mm_build, MMBentSpec};

    fn anf(s: &str) -> TruthTable {
        tt_from_anf(&s.parse::<Anf>().unwrap())
    }

    fn f3() -> TruthTable {
        anf("x1*x2 + x1*x3 + x2")
    }

    fn f5() -> TruthTable {
        anf("x1*x2 + x1*x3 + x1*x4 + x1*x5 + x2 + x3")
    }

    fn lit(var: usize) -> Literal {
        Literal {
            var,
            negated: false,
        }
    }

    #[test]
    fn certificate_from_full_tree() {
        let (t, f) = build_full_tree(2).unwrap();
        let c = reduction_from_tree(&t).unwrap();
        assert_eq!(c.restriction, vec![(1, false)]);
        assert_eq!(c.literals, vec![lit(0), lit(2)]);
        assert!(!c.output_polarity);
        c.verify(&f).unwrap();
        let (t3, f3) = build_full_tree(3).unwrap();
        let c3 = reduction_from_tree(&t3).unwrap();
        assert_eq!(c3.k(), 3);
        c3.verify(&f3).unwrap();
    }

    #[test]
    fn certificate_from_fn1() {
        for n in [2, 4, 5, 6] {
            let (t, f) = build_fn1(n).unwrap();
            let c = reduction_from_tree(&t).unwrap();
            assert_eq!(c.k(), dq(n), "n={n}");
            c.verify(&f).unwrap();
        }
    }

    #[test]
    fn tree_preconditions() {
        let t = DecisionTree::query(
            0,
            DecisionTree::query(0, DecisionTree::leaf(false), DecisionTree::leaf(true)),
            DecisionTree::leaf(true),
        );
        assert!(matches!(reduction_from_tree(&t), Err(Error::TreeShape(_))));
        assert!(reduction_from_tree(&DecisionTree::leaf(true)).is_err());
        // equal leaves under the deepest node
        let flat = DecisionTree::query(
            0,
            DecisionTree::query(1, DecisionTree::leaf(true), DecisionTree::leaf(true)),
            DecisionTree::leaf(false),
        );
        assert!(reduction_from_tree(&flat).is_err());
    }

    #[test]
    fn tampered_certificates_fail() {
        let (t, f) = build_full_tree(2).unwrap();
        let good = reduction_from_tree(&t).unwrap();
        let mut bad = good.clone();
        bad.restriction[0].1 = true;
        assert!(bad.verify(&f).is_err());
        let mut bad = good.clone();
        bad.output_polarity = true;
        assert!(bad.verify(&f).is_err());
        let mut bad = good.clone();
        bad.literals[0].negated = true;
        assert!(bad.verify(&f).is_err());
        let mut bad = good;
        bad.literals.push(lit(1));
        assert!(bad.verify(&f).is_err());
    }

    #[test]
    fn json_round_trip() {
        let (t, _) = build_full_tree(2).unwrap();
        let c = reduction_from_tree(&t).unwrap();
        let s = c.to_json();
        assert_eq!(
            s,
            r#"{"k":2,"restriction":[{"var":2,"value":0}],"literals":[{"var":1,"negated":false},{"var":3,"negated":false}],"outputPolarity":0}"#
        );
        assert_eq!(ReductionCertificate::from_json(&s).unwrap(), c);
        assert!(ReductionCertificate::from_json(&s.replace(r#""var":2"#, r#""var":0"#)).is_err());
    }

    #[test]
    fn and_search() {
        let c = find_and_reduction(&f3(), 2).unwrap().unwrap();
        assert_eq!(c.restriction, vec![(1, false)]);
        assert_eq!(c.literals, vec![lit(0), lit(2)]);
        let c5 = find_and_reduction(&f5(), 2).unwrap().unwrap();
        c5.verify(&f5()).unwrap();
        assert_eq!(find_and_reduction(&f5(), 3).unwrap(), None);
        assert_eq!(find_and_reduction(&anf("x1 + x2"), 2).unwrap(), None);
        assert!(find_and_reduction(&anf("x1 + x2"), 1).unwrap().is_some());
        assert!(find_and_reduction(&f3(), 0).is_err());
        assert!(find_and_reduction(&TruthTable::zero(7).unwrap(), 1).is_err());
        // complemented OR is an AND of negated literals
        let or = anf("x1*x2 + x1 + x2");
        let c = find_and_reduction(&or, 2).unwrap().unwrap();
        assert!(c.output_polarity);
        assert!(c.literals.iter().all(|l| l.negated));
    }

    #[test]
    fn and_search_brute_force() {
        // oracle: enumerate restrictions, compare the restricted function
        // against every polarity choice explicitly
        for seed in 0..40u64 {
            let f =
                TruthTable::from_fn(4, |x| (x as u64 * 0x9E37 + seed * 7919) % 5 < 2 + seed % 2)
                    .unwrap();
            for k in 1..=4 {
                let found = find_and_reduction(&f, k).unwrap();
                let mut exists = false;
                for assign in 0..81usize {
                    // base-3 digits: 0 = free, 1 = fix 0, 2 = fix 1
                    let digits: Vec<usize> = (0..4).map(|i| assign / 3usize.pow(i) % 3).collect();
                    let mut g = f.clone();
                    for (v, &d) in digits.iter().enumerate() {
                        if d > 0 {
                            g = g.fix(v, d == 2).unwrap();
                        }
                    }
                    let free: Vec<usize> = (0..4)
                        .filter(|&v| digits[v] == 0 && g.depends_on(v))
                        .collect();
                    if free.len() != k {
                        continue;
                    }
                    for pol in 0..1usize << k {
                        for out in [false, true] {
                            let h = TruthTable::from_fn(4, |x| {
                                out ^ free
                                    .iter()
                                    .enumerate()
                                    .all(|(t, &v)| (x >> v & 1) != (pol >> t & 1))
                            })
                            .unwrap();
                            exists |= h == g;
                        }
                    }
                }
                assert_eq!(found.is_some(), exists, "seed={seed} k={k}");
                if let Some(c) = found {
                    c.verify(&f).unwrap();
                }
            }
        }
    }

    #[test]
    fn and_reductions_are_downward_closed() {
        let (_, f) = build_fn1(5).unwrap();
        for k in 2..=3 {
            if find_and_reduction(&f, k).unwrap().is_some() {
                assert!(find_and_reduction(&f, k - 1).unwrap().is_some());
            }
        }
    }

    #[test]
    fn bound_intervals() {
        let zero = qe_bounds(&TruthTable::zero(3).unwrap()).unwrap();
        assert_eq!((zero.lo, zero.hi), (0, 0));
        let b5 = qe_bounds(&f5()).unwrap();
        assert_eq!((b5.lo, b5.hi), (2, 2));
        assert_eq!(b5.hi_source, UpperSource::ParityTree);
        b5.verify(&f5()).unwrap();
        let b3 = qe_bounds(&f3()).unwrap();
        assert_eq!((b3.lo, b3.hi), (2, 2));
        assert_eq!(b3.lo_source, LowerSource::AndReduction);
        b3.verify(&f3()).unwrap();
        let mm = mm_build(&MMBentSpec::identity(4).unwrap());
        let bm = qe_bounds(&mm).unwrap();
        assert_eq!((bm.lo, bm.hi), (2, 3));
        assert_eq!(bm.lo_source, LowerSource::RealDegreeHalf);
        assert!(!bm.partial);
        bm.verify(&mm).unwrap();
    }

    #[test]
    fn bounds_follow_the_original_variables() {
        // x2 and x4 are dummies
        let g = anf("x1*x3 + x5").compact(0b11111);
        let b = qe_bounds(&g).unwrap();
        b.verify(&g).unwrap();
        let tree = b.tree.unwrap();
        assert!(tree.var_census().keys().all(|v| [0, 2, 4].contains(v)));
    }

    #[test]
    fn bounds_degrade_past_caps() {
        let caps = Caps {
            depth: 2,
            parity_depth: 2,
            and_search: 2,
        };
        let b = qe_bounds_with(&f5(), &caps).unwrap();
        assert!(b.partial);
        assert_eq!(b.hi_source, UpperSource::AllVariables);
        assert_eq!(b.hi, 5);
        b.verify(&f5()).unwrap();
        let big = TruthTable::from_fn(18, |x| x.count_ones() % 3 == 0).unwrap();
        let b = qe_bounds(&big).unwrap();
        assert_eq!((b.lo, b.lo_source), (1, LowerSource::NonConstant));
        assert!(classify_query_friendly(&big).is_err());
    }

    #[test]
    fn classification() {
        let c3 = classify_query_friendly(&f3()).unwrap();
        assert!(c3.is_qf);
        assert_eq!(c3.separability, Separability::NonSeparable);
        let c5 = classify_query_friendly(&f5()).unwrap();
        assert!(c5.is_qf);
        assert_eq!(c5.separability, Separability::Separable);
        let c1 = classify_query_friendly(&build_fn1(5).unwrap().1).unwrap();
        assert!(c1.is_qf);
        assert_eq!(c1.separability, Separability::NonSeparable);
        let fn2_4 = build_fn2(4).unwrap().1;
        assert_eq!(
            classify_query_friendly(&fn2_4).unwrap().separability,
            Separability::Separable
        );
        let mm = mm_build(&MMBentSpec::identity(4).unwrap());
        let cm = classify_query_friendly(&mm).unwrap();
        assert!(!cm.is_qf);
        assert_eq!(cm.separability, Separability::Separable);
    }
}
