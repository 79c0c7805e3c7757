//! One PASS/FAIL line per acceptance criterion. Each check compares the
//! library against the brute-force oracles in `common`.

mod common;

use std::time::{Duration, Instant};

use common::{exhaustive_acyclic, random_raw, Raw};
use graph_cstar::ck::{self, RelativeSpec};
use graph_cstar::classify::{self, DichotomyResult, Dimension, VerdictTag};
use graph_cstar::cli::run_command;
use graph_cstar::families;
use graph_cstar::graph::{Cardinality, Graph, VertexId};
use graph_cstar::ideals::{self, VertexSet};
use graph_cstar::matrix::RationalSpan;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

const SEED: u64 = 0x5eed_c0de;
const BRATTELI_N12_LIMIT: Duration = Duration::from_secs(1);
const EXHAUSTIVE_LIMIT: Duration = Duration::from_secs(60);
const RANDOM_GRAPHS: usize = 10_000;
const CLOSURE_PAIRS: usize = 1_000;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Ladder with two parallel edges per step, as plain data.
fn raw_ladder2(n: usize) -> Raw {
    Raw::singles(n, &(0..n.saturating_sub(1)).flat_map(|i| [(i, i + 1), (i, i + 1)]).collect::<Vec<_>>())
}

fn criterion_1() -> Outcome {
    let mut slowest = Duration::ZERO;
    for n in 3..=12usize {
        let depth = n.to_string();
        let start = Instant::now();
        let (code, out) = run_command(["graph-cstar", "--json", "bratteli", "--family", "ladder2", "--depth", &depth]);
        let took = start.elapsed();
        slowest = slowest.max(took);
        check(code == 0, format!("N={n}: exit {code}: {out}"))?;
        let v: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
        let dims: Vec<u128> =
            v["data"]["dims"].as_array().unwrap().iter().map(|d| d.as_u64().unwrap() as u128).collect();
        let mults: Vec<u64> =
            v["data"]["multiplicities"].as_array().unwrap().iter().map(|m| m.as_u64().unwrap()).collect();
        check(dims.len() == n, format!("N={n}: {} levels", dims.len()))?;
        check(dims.windows(2).all(|w| w[1] == 2 * w[0]), format!("N={n}: dims {dims:?}"))?;
        check(mults.len() == n - 1 && mults.iter().all(|&m| m == 2), format!("N={n}: multiplicities {mults:?}"))?;
        check(
            v["data"]["limit"]["label"] == "UHF 2^infinity",
            format!("N={n}: label {}", v["data"]["limit"]["label"]),
        )?;
        // level k of the corner chain at w_1 has dimension #paths(w_1 -> w_k)
        let raw = raw_ladder2(n);
        let brute: Vec<u128> = (0..n).map(|k| raw.paths_between(0, k)).collect();
        check(dims == brute, format!("N={n}: dims {dims:?} vs enumeration {brute:?}"))?;
        if n == 12 {
            check(took < BRATTELI_N12_LIMIT, format!("N=12 took {took:?}"))?;
        }
    }
    Ok(format!("N=3..12, slowest {slowest:?}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let suite = exhaustive_acyclic(5, 6);
    let mut unique = 0;
    for raw in &suite {
        let g = raw.graph();
        let verdict = classify::naimark_verdict(&g).map_err(|e| e.to_string())?;
        let rep = ck::build_ck_family(&g, &RelativeSpec::full(&g)).map_err(|e| e.to_string())?;
        let blocks = ck::block_decomposition(&rep).map_err(|e| e.to_string())?;
        let sinks: Vec<usize> = (0..raw.n).filter(|&v| raw.is_sink(v)).collect();
        check(blocks.len() == sinks.len(), format!("{raw:?}: {} blocks, {} sinks", blocks.len(), sinks.len()))?;
        for (b, &s) in blocks.iter().zip(&sinks) {
            check(b.size as u128 == raw.paths_into(s), format!("{raw:?}: block at x{s} has size {}", b.size))?;
        }
        match verdict.tag {
            VerdictTag::UniqueIrrepCompacts(Dimension::Finite(d)) => {
                unique += 1;
                check(blocks.len() == 1 && blocks[0].size as u128 == d, format!("{raw:?}: dim={d} vs {blocks:?}"))?;
            }
            other => check(blocks.len() != 1, format!("{raw:?}: one block but verdict {other:?}"))?,
        }
    }
    let took = start.elapsed();
    check(took < EXHAUSTIVE_LIMIT, format!("suite took {took:?}"))?;
    Ok(format!("{} graphs, {unique} UniqueIrrepCompacts, {took:?}", suite.len()))
}

fn route_disagreement(g: &Graph) -> Option<String> {
    let bound = 1 << g.vertex_count();
    match classify::is_simple_bounded(g, bound) {
        Err(e) => Some(e.to_string()),
        Ok(r) if r.route3 != Some(r.route2) => Some(format!("route2={} route3={:?}", r.route2, r.route3)),
        Ok(_) => None,
    }
}

fn criterion_3() -> Outcome {
    let suite = exhaustive_acyclic(5, 6);
    let mut rng = StdRng::seed_from_u64(SEED);
    let random: Vec<Raw> = (0..RANDOM_GRAPHS).map(|_| random_raw(&mut rng, 8, true)).collect();
    let mut simple = 0;
    for raw in suite.iter().chain(&random) {
        let g = raw.graph();
        if let Some(msg) = route_disagreement(&g) {
            return Err(format!("{raw:?}: {msg}"));
        }
        simple += classify::is_simple(&g).map(|r| r.simple as usize).unwrap_or(0);
    }
    // the powerset oracle is feasible for the small random graphs
    for raw in random.iter().filter(|r| r.n <= 6).take(2_000) {
        let r = classify::is_simple(&raw.graph()).map_err(|e| e.to_string())?;
        check(r.simple == raw.simple_by_powerset(), format!("{raw:?}: powerset oracle disagrees"))?;
    }
    Ok(format!("{} graphs, 0 disagreements, {simple} simple", suite.len() + random.len()))
}

fn criterion_4() -> Outcome {
    let mut models = 0;
    for raw in exhaustive_acyclic(5, 6) {
        let g = raw.graph();
        let regulars: Vec<usize> = (0..raw.n).filter(|&v| raw.is_regular(v)).collect();
        for mask in 0u32..1 << regulars.len() {
            let s: Vec<usize> =
                regulars.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &v)| v).collect();
            let spec = RelativeSpec::new(&g, s.iter().map(|&v| VertexId(v))).map_err(|e| e.to_string())?;
            let rep = ck::build_ck_family(&g, &spec).map_err(|e| e.to_string())?;
            let report = ck::verify_ck(&rep);
            check(report.is_relative_family(&spec), format!("{raw:?} S={s:?}: {:?}", report.failures))?;
            for v in 0..raw.n {
                if raw.is_regular(v) {
                    let holds = report.ck3_at.get(&VertexId(v)).copied();
                    check(holds == Some(s.contains(&v)), format!("{raw:?} S={s:?}: CK3 at x{v} is {holds:?}"))?;
                }
            }
            let gaps = ck::gap_projections(&rep);
            for &v in regulars.iter().filter(|v| !s.contains(v)) {
                let q = gaps.get(&VertexId(v)).ok_or(format!("{raw:?} S={s:?}: no gap at x{v}"))?;
                check(q.nonzero && !q.matrix.is_zero(), format!("{raw:?} S={s:?}: zero gap at x{v}"))?;
            }
            models += 1;
        }
    }
    Ok(format!("{models} (graph, S) models verified exactly"))
}

fn criterion_5() -> Outcome {
    let mut case_one = 0;
    for raw in exhaustive_acyclic(5, 6) {
        let g = raw.graph();
        if !classify::is_simple(&g).map_err(|e| e.to_string())?.simple {
            continue;
        }
        let sinks: Vec<usize> = (0..raw.n).filter(|&v| raw.is_sink(v)).collect();
        check(sinks.len() == 1, format!("{raw:?}: simple with sinks {sinks:?}"))?;
        let d = classify::dichotomy(&g).map_err(|e| e.to_string())?;
        check(d == DichotomyResult::CaseI { sink: format!("x{}", sinks[0]) }, format!("{raw:?}: {d}"))?;
        case_one += 1;
    }

    let ray = families::ray();
    let d = classify::dichotomy_staged(&ray, 10).map_err(|e| e.to_string())?;
    let DichotomyResult::CaseII { tail } = d else { return Err(format!("ray: {d}")) };
    check(tail.len() == 19, format!("ray tail has {} entries", tail.len()))?;
    let stage = ray.stage(10).map_err(|e| e.to_string())?;
    for step in tail.chunks(2).filter(|c| c.len() == 2) {
        let v = stage.vertex(&step[0]).map_err(|e| e.to_string())?;
        let out = stage.out_bundles(v);
        check(out.len() == 1, format!("ray: {} emits {} bundles", step[0], out.len()))?;
        check(stage.bundle_name(out[0]) == step[1], format!("ray: {} emits {}", step[0], stage.bundle_name(out[0])))?;
        check(stage.cardinality(out[0]) == Cardinality::Finite(1), format!("ray: {} is not a single edge", step[1]))?;
    }
    for pair in tail.iter().step_by(2).collect::<Vec<_>>().windows(2) {
        let (a, b) = (stage.vertex(pair[0]).unwrap(), stage.vertex(pair[1]).unwrap());
        check(stage.successors(a).eq([b]), format!("ray: {} does not lead to {}", pair[0], pair[1]))?;
    }

    let ladder = families::ladder(2);
    check(ladder.profile().is_some(), "ladder2 carries no profile")?;
    let d = classify::dichotomy_staged(&ladder, 10).map_err(|e| e.to_string())?;
    check(matches!(d, DichotomyResult::Neither { .. }), format!("ladder2: {d}"))?;
    Ok(format!("{case_one} simple graphs CaseI; ray CaseII tail verified; ladder2 Neither"))
}

fn criterion_6() -> Outcome {
    let sg = families::ladder(2);
    for n in 2..=10usize {
        let stage = sg.stage(n).map_err(|e| e.to_string())?;
        let mut raw = Raw::from_graph(&stage);
        raw.edges.sort_by_key(|e| (e.0, e.1));
        check(raw == raw_ladder2(n), format!("stage {n} is not a doubled ladder"))?;
        let got = classify::ladder_length(&stage).map_err(|e| e.to_string())?.length;
        let brute = raw.ladder_by_search();
        check(got == n - 1 && brute == n - 1, format!("n={n}: ladder_length {got}, oracle {brute}"))?;
    }
    Ok("n=2..10 match n-1 and the oracle".into())
}

/// Dimension of `p_v A p_v` as the rank of `{s_a s_b* : a, b paths from v}`.
fn corner_rank(rep: &ck::MatrixRep, v: VertexId) -> usize {
    let from_v: Vec<_> =
        rep.graph.enumerate_paths(None, None).unwrap().into_iter().filter(|p| p.source() == v).collect();
    let ops: Vec<_> = from_v.iter().map(|p| rep.path_operator(p)).collect();
    let adjoints: Vec<_> = ops.iter().map(|m| m.adjoint()).collect();
    let mut span = RationalSpan::new();
    for a in &ops {
        for b in &adjoints {
            let m = a * b;
            if !m.is_zero() {
                span.insert(m.flat_entries());
            }
        }
    }
    span.dim()
}

fn criterion_7() -> Outcome {
    let sg = families::ladder(2);
    for n in 2..=8usize {
        let stage = sg.stage(n).map_err(|e| e.to_string())?;
        let rep = ck::build_ck_family(&stage, &RelativeSpec::full(&stage)).map_err(|e| e.to_string())?;
        let c = ck::corner(&rep, "w_1").map_err(|e| e.to_string())?;
        let expect = 1usize << (2 * (n - 1));
        let raw = Raw::from_graph(&stage);
        let w1 = stage.vertex("w_1").unwrap().0;
        let brute: u128 = (0..raw.n).filter(|&s| raw.is_sink(s)).map(|s| raw.paths_between(w1, s).pow(2)).sum();
        let rank = corner_rank(&rep, VertexId(w1));
        check(
            c.dimension == expect && brute == expect as u128 && rank == expect,
            format!("n={n}: corner {}, brute {brute}, rank {rank}", c.dimension),
        )?;
        let full_by_graph = raw.generated(1 << w1) == (1u32 << raw.n) - 1;
        check(c.full && full_by_graph, format!("n={n}: full={} oracle={full_by_graph}", c.full))?;
    }
    Ok("n=2..8 dimension (2^(n-1))^2, full".into())
}

fn criterion_8() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED ^ 8);
    for i in 0..CLOSURE_PAIRS {
        let raw = random_raw(&mut rng, 8, true);
        let g = raw.graph();
        let full = (1u32 << raw.n) - 1;
        let large_mask = rng.gen::<u32>() & full;
        let small_mask = large_mask & rng.gen::<u32>();
        let set = |m: u32| VertexSet::new(&g, (0..raw.n).filter(|i| m & (1 << i) != 0).map(VertexId)).unwrap();
        let (small, large) = (set(small_mask), set(large_mask));
        let her = |s: &VertexSet| ideals::hereditary_closure(&g, s).unwrap();
        let sat = |s: &VertexSet| ideals::saturate(&g, s).unwrap();
        let (hs, hl) = (her(&small), her(&large));
        let ctx = || format!("pair {i}: {raw:?} {small_mask:b}/{large_mask:b}");
        check(large.is_subset(&hl) && hs.is_subset(&hl) && her(&hl) == hl, format!("{}: hereditary closure", ctx()))?;
        let (ss, sl) = (sat(&hs), sat(&hl));
        check(hl.is_subset(&sl) && ss.is_subset(&sl) && sat(&sl) == sl, format!("{}: saturation", ctx()))?;
        let members: u32 = sl.members().iter().fold(0, |m, v| m | 1 << v.0);
        check(members == raw.generated(large_mask), format!("{}: generated set differs from oracle", ctx()))?;
        let v = VertexId(rng.gen_range(0..raw.n));
        check(ideals::downstream(&g, v) == her(&set(1 << v.0)), format!("{}: downstream({})", ctx(), v.0))?;
    }
    Ok(format!("{CLOSURE_PAIRS} pairs"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("ladder2 Bratteli chain doubles to UHF 2^infinity", criterion_1),
        ("unique irrep verdict iff one matrix block", criterion_2),
        ("simplicity routes agree", criterion_3),
        ("relative CK families verify on every S", criterion_4),
        ("dichotomy cases", criterion_5),
        ("forbidden ladder length", criterion_6),
        ("corner at w_1 is full of dimension 4^(n-1)", criterion_7),
        ("closure laws", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS  {}  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {}  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
