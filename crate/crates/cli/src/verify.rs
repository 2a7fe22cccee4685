//! Instance checks of the family, bound and simulation results. Each criterion returns a short
//! detail string on success and the first violated expectation otherwise;
//! tolerances and time limits are fixed here.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use qsep_core::boolfun::{
    algebraic_degree, anf_from_tt, influencing_variables, nonlinearity, pnp_equivalent,
    real_degree, real_multilinear, tt_from_anf, walsh_transform, Anf, TruthTable,
};
use qsep_core::certify::{qe_bounds, reduction_from_tree};
use qsep_core::families::{build_fn1, build_fn2, build_full_tree, FamilyKind, FamilySpec};
use qsep_core::mmbent::{
    is_bent, mm_build, mm_classical_tree, mm_parity_tree, random_mm, restriction_identities_hold,
    MMBentSpec,
};
use qsep_core::ptrees::{
    enumerate_parity_trees, parity_to_deterministic, ParityDecisionTree, ParityDepthSearch,
};
use qsep_core::qsim::{run_ptree_algorithm, OUTCOME_TOLERANCE};
use qsep_core::trees::{dq, DepthSearch};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn core<T>(r: qsep_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub limit: Duration,
    run: fn() -> Outcome,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed_ms: u128,
    pub limit_ms: u128,
}

pub fn criteria() -> Vec<Criterion> {
    let secs = Duration::from_secs;
    vec![
        Criterion {
            id: 1,
            name: "worked example f(5,2)",
            limit: secs(1),
            run: worked_example,
        },
        Criterion {
            id: 2,
            name: "full trees: D = Q_E = k",
            limit: secs(60),
            run: full_trees,
        },
        Criterion {
            id: 3,
            name: "at most 3 influencing variables at depth 2",
            limit: secs(60),
            run: max_variables,
        },
        Criterion {
            id: 4,
            name: "f(n,1) suite",
            limit: secs(120),
            run: fn1_suite,
        },
        Criterion {
            id: 5,
            name: "separable f(n,2) suite",
            limit: secs(60),
            run: fn2_suite,
        },
        Criterion {
            id: 6,
            name: "depth-2 parity trees",
            limit: secs(120),
            run: depth_two_parity_trees,
        },
        Criterion {
            id: 7,
            name: "Maiorana-McFarland suite",
            limit: secs(15 * 60),
            run: mm_suite,
        },
        Criterion {
            id: 8,
            name: "B4 bounds",
            limit: secs(10),
            run: b4_bounds,
        },
        Criterion {
            id: 9,
            name: "property suites",
            limit: secs(10 * 60),
            run: properties,
        },
    ]
}

pub fn run_criterion(c: &Criterion) -> CriterionResult {
    let start = Instant::now();
    let outcome = (c.run)();
    let elapsed = start.elapsed();
    let (pass, detail) = match outcome {
        Ok(d) if elapsed <= c.limit => (true, d),
        Ok(d) => (false, format!("{d}; exceeded the {:?} limit", c.limit)),
        Err(e) => (false, e),
    };
    CriterionResult {
        id: c.id,
        name: c.name,
        pass,
        detail,
        elapsed_ms: elapsed.as_millis(),
        limit_ms: c.limit.as_millis(),
    }
}

/// Runs the selected criteria (all when `ids` is empty) in order.
pub fn run_suite(ids: &[u8]) -> Vec<CriterionResult> {
    criteria()
        .iter()
        .filter(|c| ids.is_empty() || ids.contains(&c.id))
        .map(run_criterion)
        .collect()
}

fn anf(s: &str) -> TruthTable {
    tt_from_anf(&s.parse::<Anf>().expect("valid ANF literal"))
}

fn worked_example() -> Outcome {
    let (t, f) = core(build_fn2(5))?;
    let text = anf_from_tt(&f).to_string();
    ensure(text == "x1*x2 + x1*x3 + x1*x4 + x1*x5 + x2 + x3", || {
        format!("ANF {text}")
    })?;
    let d = core(DepthSearch::new(5).depth(&f))?;
    ensure(d == 3, || format!("D = {d}"))?;
    let pd = core(ParityDepthSearch::new(5).depth(&f))?;
    ensure(pd == 2, || format!("parity depth {pd}"))?;
    let rep = core(run_ptree_algorithm(&t, &f))?;
    ensure(rep.pass && rep.inputs_checked == 32, || {
        "qsim run failed".into()
    })?;
    ensure(rep.max_queries <= 2, || {
        format!("{} queries", rep.max_queries)
    })?;
    let hit = rep.transcript.iter().find(|r| r.input == "10101");
    ensure(hit.is_some_and(|r| r.output == 1), || {
        "input 10101 did not give 1".into()
    })?;
    Ok(format!(
        "D=3, parity depth 2, 32/32 inputs exact, max deviation {:e}",
        rep.max_deviation
    ))
}

fn full_trees() -> Outcome {
    let mut details = vec![];
    for k in [2, 3] {
        let (t, f) = core(build_full_tree(k))?;
        let search = DepthSearch::new(f.num_vars());
        let start = Instant::now();
        let d = core(search.depth(&f))?;
        ensure(d == k, || format!("k={k}: D = {d}"))?;
        let cert = core(reduction_from_tree(&t))?;
        ensure(cert.k() == k, || {
            format!("k={k}: certificate has {} literals", cert.k())
        })?;
        core(cert.verify(&f))?;
        details.push(format!(
            "k={k}: D={d}, AND_{k} certificate verified ({} ms, {} memo entries)",
            start.elapsed().as_millis(),
            search.cached_entries()
        ));
    }
    Ok(details.join("; "))
}

fn max_variables() -> Outcome {
    let search = DepthSearch::new(4);
    let mut full = 0;
    for bits in 0..1u64 << 16 {
        let f = core(TruthTable::from_u64(4, bits))?;
        if f.support() != 0b1111 {
            continue;
        }
        full += 1;
        let d = core(search.depth(&f))?;
        ensure(d >= 3, || format!("table {bits:04x} has D = {d}"))?;
    }
    Ok(format!(
        "{full} functions with 4 influencing variables, all D >= 3"
    ))
}

fn fn1_suite() -> Outcome {
    let mut checked = vec![];
    for n in 1..=6 {
        let Ok(spec) = FamilySpec::new(FamilyKind::Fn1, n) else {
            continue;
        };
        let (t, f) = core(build_fn1(spec.param))?;
        let d = core(DepthSearch::new(6).depth(&f))?;
        ensure(d == dq(n), || format!("n={n}: D = {d}"))?;
        ensure(influencing_variables(&f).len() == n, || {
            format!("n={n}: dummy variable")
        })?;
        let cert = core(reduction_from_tree(&t))?;
        core(cert.verify(&f))?;
        checked.push(n.to_string());
    }
    ensure(checked == ["2", "4", "5", "6"], || {
        format!("admissible n: {checked:?}")
    })?;
    Ok(format!(
        "n in {{{}}}: D = dq(n), certificates verified",
        checked.join(",")
    ))
}

fn fn2_suite() -> Outcome {
    for n in [2, 4, 5] {
        let (t, f) = core(build_fn2(n))?;
        let pd = core(ParityDepthSearch::new(5).depth(&f))?;
        ensure(pd == dq(n) - 1, || format!("n={n}: parity depth {pd}"))?;
        let d = core(DepthSearch::new(5).depth(&f))?;
        ensure(d == dq(n), || format!("n={n}: D = {d}"))?;
        let det = parity_to_deterministic(&t);
        ensure(det.depth() == dq(n), || {
            format!("n={n}: converted depth {}", det.depth())
        })?;
        ensure(core(det.function(n))? == f, || {
            format!("n={n}: converted tree differs")
        })?;
    }
    Ok("n in {2,4,5}: parity depth dq(n)-1, D = dq(n), conversion exact".into())
}

fn depth_two_parity_trees() -> Outcome {
    let six = core(enumerate_parity_trees(6, 2))?;
    let search = DepthSearch::new(6);
    let mut full = 0;
    for f in &six.functions {
        if f.support() == 0b111111 {
            full += 1;
            let d = core(search.depth(f))?;
            ensure(d != 3, || {
                format!("{} has 6 influencing variables and D = 3", f.to_hex())
            })?;
        }
    }
    let seven = core(enumerate_parity_trees(7, 2))?;
    let most = seven
        .functions
        .iter()
        .map(|f| f.support().count_ones())
        .max()
        .unwrap_or(0);
    ensure(most <= 6, || {
        format!("a depth-2 parity tree has {most} influencing variables")
    })?;
    Ok(format!(
        "n=6: {} trees, {} functions, {full} with 6 influencing variables, none with D = 3; \
         n=7: {} trees, at most {most} influencing variables",
        six.trees,
        six.functions.len(),
        seven.trees
    ))
}

const MM_SEEDS: u64 = 25;
const MM_DEEP_SEEDS: u64 = 3;
const MM_DEEP_LIMIT: Duration = Duration::from_secs(5 * 60);

fn mm_suite() -> Outcome {
    for n in [2usize, 4, 6] {
        let bound = (3 * n).div_ceil(4);
        let search = DepthSearch::new(n);
        for seed in 0..MM_SEEDS {
            let spec = core(random_mm(n, seed))?;
            let f = mm_build(&spec);
            let tag = || format!("n={n} seed={seed}");
            ensure(core(is_bent(&f))?, || format!("{}: not bent", tag()))?;
            let nl = core(nonlinearity(&f))?;
            ensure(nl == (1 << (n - 1)) - (1 << (n / 2 - 1)), || {
                format!("{}: nonlinearity {nl}", tag())
            })?;
            ensure(core(real_degree(&f))? == n, || {
                format!("{}: real degree", tag())
            })?;
            let ct = mm_classical_tree(&spec);
            ensure(ct.depth() <= n && core(ct.function(n))? == f, || {
                format!("{}: classical tree", tag())
            })?;
            let pt = mm_parity_tree(&spec);
            ensure(pt.depth() <= bound && core(pt.function(n))? == f, || {
                format!("{}: parity tree", tag())
            })?;
            ensure(restriction_identities_hold(&spec), || {
                format!("{}: restrictions", tag())
            })?;
            if n <= 4 || seed < MM_DEEP_SEEDS {
                let start = Instant::now();
                let d = core(search.depth(&f))?;
                ensure(d == n, || format!("{}: D = {d}", tag()))?;
                ensure(start.elapsed() <= MM_DEEP_LIMIT, || {
                    format!("{}: D took {:?}", tag(), start.elapsed())
                })?;
            }
        }
    }
    Ok(format!(
        "{MM_SEEDS} specs each at n=2,4,6 bent with full nonlinearity and real degree; \
         trees exact; D = n at n=2,4 and on {MM_DEEP_SEEDS} specs at n=6"
    ))
}

/// The block-ordered analogues of the two B4 representatives.
pub fn b4_pair() -> (TruthTable, TruthTable) {
    let f1 = mm_build(&MMBentSpec::identity(4).expect("valid"));
    let h = anf("x1*x2");
    let f2 = mm_build(&MMBentSpec::new(4, vec![0, 1, 2, 3], h).expect("valid"));
    (f1, f2)
}

fn b4_bounds() -> Outcome {
    let (f1, f2) = b4_pair();
    for (name, f) in [("f1", &f1), ("f2", &f2)] {
        let b = core(qe_bounds(f))?;
        core(b.verify(f))?;
        ensure((b.lo, b.hi) == (2, 3), || {
            format!("{name}: [{}, {}]", b.lo, b.hi)
        })?;
        ensure(b.lo <= 3 && 3 <= b.hi, || format!("{name}: 3 outside"))?;
    }
    let eq = core(pnp_equivalent(&f1, &f2))?;
    ensure(eq.is_none(), || "f1 and f2 are PNP-equivalent".into())?;
    Ok("f1, f2 in [2,3] (cited value 3 inside); not PNP-equivalent".into())
}

const RANDOM_MOBIUS_SAMPLES: usize = 1000;
const PROPERTY_SEED: u64 = 0x5eed;

fn emitted_trees() -> Result<Vec<(String, ParityDecisionTree, TruthTable)>, String> {
    let mut out = vec![];
    for kind in FamilyKind::ALL {
        for p in 1..=12 {
            let Ok(spec) = FamilySpec::new(kind, p) else {
                continue;
            };
            if spec.num_vars() > 12 {
                continue;
            }
            let c = core(spec.build())?;
            out.push((format!("{kind} {p}"), c.tree.to_parity(), c.function));
        }
    }
    for n in [2, 4, 6] {
        for seed in 0..MM_SEEDS {
            let spec = core(random_mm(n, seed))?;
            let f = mm_build(&spec);
            out.push((
                format!("mm n={n} seed={seed} parity"),
                mm_parity_tree(&spec),
                f.clone(),
            ));
            out.push((
                format!("mm n={n} seed={seed} classical"),
                (&mm_classical_tree(&spec)).into(),
                f,
            ));
        }
    }
    Ok(out)
}

fn check_spectral(f: &TruthTable) -> Result<(), String> {
    let n = f.num_vars();
    ensure(tt_from_anf(&anf_from_tt(f)) == *f, || {
        format!("Mobius round trip fails on {f}")
    })?;
    let w = core(walsh_transform(f))?;
    ensure(w.energy() == 1i128 << (2 * n), || {
        format!("Parseval fails on {f}")
    })?;
    let p = core(real_multilinear(f))?;
    for x in 0..f.len() {
        ensure(p.eval_index(x) == f.get(x) as i64, || {
            format!("multilinear extension wrong on {f}")
        })?;
    }
    Ok(())
}

fn properties() -> Outcome {
    let mut exhaustive = 0;
    for n in 0..=4usize {
        for bits in 0..1u64 << (1 << n) {
            check_spectral(&core(TruthTable::from_u64(n, bits))?)?;
            exhaustive += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(PROPERTY_SEED);
    for _ in 0..RANDOM_MOBIUS_SAMPLES {
        let n = rng.gen_range(0..=10);
        let bits: Vec<bool> = (0..1usize << n).map(|_| rng.gen()).collect();
        check_spectral(&core(TruthTable::from_fn(n, |i| bits[i]))?)?;
    }

    let mut ordered = 0;
    for n in 0..=4usize {
        let det = DepthSearch::new(n);
        let par = ParityDepthSearch::new(n);
        for bits in 0..1u64 << (1 << n) {
            let f = core(TruthTable::from_u64(n, bits))?;
            let (d, pd) = (core(det.depth(&f))?, core(par.depth(&f))?);
            let deg = algebraic_degree(&f);
            ensure(deg <= pd && pd <= d, || {
                format!("{f}: degree {deg}, parity depth {pd}, D {d}")
            })?;
            ordered += 1;
        }
    }

    let trees = emitted_trees()?;
    let mut worst: f64 = 0.0;
    for (name, t, f) in &trees {
        let rep = core(run_ptree_algorithm(t, f))?;
        ensure(rep.pass, || format!("qsim rejects {name}"))?;
        worst = worst.max(rep.max_deviation);
    }
    ensure(worst <= OUTCOME_TOLERANCE, || {
        format!("deviation {worst:e}")
    })?;
    Ok(format!(
        "{exhaustive} exhaustive + {RANDOM_MOBIUS_SAMPLES} random spectral checks; \
         degree <= parity depth <= D on {ordered} functions; {} trees simulated, \
         max deviation {worst:e}",
        trees.len()
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct Finding {
    pub question: &'static str,
    pub searched: String,
    pub finding: String,
}

/// Tiny exhaustive searches around the open problems. Findings are
/// about parity trees only, which upper-bound but need not equal `Q_E`.
pub fn explore_open_problems() -> Result<Vec<Finding>, String> {
    let mut out = vec![];

    // 2^k - 1 variables with Q_E < k
    let d_search = DepthSearch::new(3);
    let p_search = ParityDepthSearch::new(3);
    let mut qf3 = 0;
    let mut lower = 0;
    for bits in 0..256u64 {
        let f = core(TruthTable::from_u64(3, bits))?;
        if f.support() == 0b111 && core(d_search.depth(&f))? == 2 {
            qf3 += 1;
            if core(p_search.depth(&f))? < 2 {
                lower += 1;
            }
        }
    }
    let seven = core(enumerate_parity_trees(7, 2))?;
    let seven_full = seven
        .functions
        .iter()
        .filter(|f| f.support() == 0x7f)
        .count();
    out.push(Finding {
        question: "is there f on 2^k - 1 variables with D = k and Q_E < k?",
        searched: format!(
            "k=2: all {qf3} three-variable functions with D = 2; k=3: all {} depth-2 parity trees on 7 variables",
            seven.trees
        ),
        finding: format!(
            "k=2: {lower} have parity depth below 2; k=3: {seven_full} depth-2 parity trees use all 7 variables. \
             No parity-tree witness; Q_E itself is not decided"
        ),
    });

    // separable query-friendly functions in the gap 2^(k-1)+2^(k-2)-1 < n < 2^k-2
    let mut gaps = vec![];
    for k in 3..=4usize {
        let lo = (1 << (k - 1)) + (1 << (k - 2)) - 1;
        let hi = (1 << k) - 2;
        gaps.push(format!(
            "k={k}: n in ({lo}, {hi}) = {:?}",
            (lo + 1..hi).collect::<Vec<_>>()
        ));
    }
    out.push(Finding {
        question: "are there separable query-friendly functions for 2^(k-1)+2^(k-2)-1 < n < 2^k-2?",
        searched: gaps.join("; "),
        finding: "k=3: the range is empty; k=4: n=12,13 exceed the exact-search caps. Not resolved"
            .into(),
    });

    // n = 6 boundary, from the depth-2 enumeration
    let six = core(enumerate_parity_trees(6, 2))?;
    let search = DepthSearch::new(6);
    let mut sep_qf = 0;
    let mut six_full: HashSet<&TruthTable> = HashSet::new();
    for f in six.functions.iter().filter(|f| f.support() == 0x3f) {
        six_full.insert(f);
        if core(search.depth(f))? == 3 {
            sep_qf += 1;
        }
    }
    out.push(Finding {
        question: "does the n = 2^k - 2 boundary hold at k = 3?",
        searched: format!(
            "{} functions on 6 influencing variables from depth-2 parity trees",
            six_full.len()
        ),
        finding: format!("{sep_qf} of them have D = 3"),
    });
    Ok(out)
}
