//! Memoized exact minimum-depth search shared by the deterministic and
//! parity query models.
//!
//! Subfunctions stay on the root's `n` variables (restricted variables
//! become dummies). The memo key is the support mask together with the
//! table compacted onto that support, so equal subfunctions reached along
//! different paths share one entry.

use dashmap::DashMap;

use crate::boolfun::TruthTable;

pub(crate) type MemoKey = (u32, TruthTable);

pub(crate) fn memo_key(f: &TruthTable) -> MemoKey {
    let s = f.support();
    (s, f.compact(s))
}

pub(crate) trait QueryModel: Send + Sync {
    type Query: Copy;

    /// Candidate queries over the influencing variables, in tie-break order.
    fn queries(&self, support: u32) -> Vec<Self::Query>;

    /// The subfunction seen after observing `outcome` for `query`.
    fn branch(&self, f: &TruthTable, query: Self::Query, outcome: bool) -> TruthTable;
}

pub(crate) struct Solver<M> {
    model: M,
    cache: Option<DashMap<MemoKey, u8>>,
}

impl<M: QueryModel> Solver<M> {
    pub(crate) fn new(model: M, memo: bool) -> Self {
        Self {
            model,
            cache: memo.then(DashMap::new),
        }
    }

    pub(crate) fn cached_entries(&self) -> usize {
        self.cache.as_ref().map_or(0, |c| c.len())
    }

    pub(crate) fn depth(&self, f: &TruthTable) -> u8 {
        if f.as_constant().is_some() {
            return 0;
        }
        let key = self.cache.as_ref().map(|_| memo_key(f));
        if let (Some(cache), Some(key)) = (&self.cache, &key) {
            if let Some(v) = cache.get(key) {
                return *v;
            }
        }
        let mut best = u8::MAX;
        for q in self.model.queries(f.support()) {
            let d0 = self.depth(&self.model.branch(f, q, false));
            if d0 + 1 >= best {
                continue;
            }
            let d1 = self.depth(&self.model.branch(f, q, true));
            best = best.min(1 + d0.max(d1));
            if best == 1 {
                break;
            }
        }
        if let (Some(cache), Some(key)) = (&self.cache, key) {
            // concurrent inserts for one key always carry the same value
            cache.insert(key, best);
        }
        best
    }

    /// Rebuilds an optimal tree, taking the first query in tie-break order
    /// that attains the optimum at every node.
    pub(crate) fn witness<T>(
        &self,
        f: &TruthTable,
        leaf: &impl Fn(bool) -> T,
        node: &impl Fn(M::Query, T, T) -> T,
    ) -> T {
        if let Some(b) = f.as_constant() {
            return leaf(b);
        }
        let target = self.depth(f);
        for q in self.model.queries(f.support()) {
            let f0 = self.model.branch(f, q, false);
            let f1 = self.model.branch(f, q, true);
            if 1 + self.depth(&f0).max(self.depth(&f1)) == target {
                let zero = self.witness(&f0, leaf, node);
                let one = self.witness(&f1, leaf, node);
                return node(q, zero, one);
            }
        }
        unreachable!("optimal depth is attained by some query")
    }
}

pub(crate) fn support_vars(support: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |v| support >> v & 1 == 1)
}
