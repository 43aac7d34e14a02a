//! Acceptance gate: ten criteria, one PASS/FAIL line each.
//!
//! Runs with its own harness so the lines always print; exits nonzero when
//! any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use edgelim::experiment::{converge_models, Family};
use edgelim::graph::SimpleGraph;
use edgelim::graphon::{cut_seminorm_kernel, graph_to_graphon, tau};
use edgelim::hilbert::{seminorm, Dictionary, Tensor};
use edgelim::orbit::{act_tensor, orbit_distance, pi_invariance_check, GroupSpec, Metric};
use edgelim::regularity::{greedy_decompose, verify_energy_identity, Decomposition};
use edgelim::vertex_model::{
    cs_bound_check, lipschitz_bound_check, partition_function, rank_one_dictionaries, EdgeModel, Engine,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> Result<(), String> {
    ensure(elapsed < Duration::from_secs(limit_secs), || {
        format!("took {elapsed:.2?}, limit {limit_secs} s")
    })
}

struct Run {
    dict: Dictionary,
    dec: Decomposition,
}

fn regularity_runs() -> (Vec<Run>, Duration) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut runs = Vec::new();
    for trial in 0..1000 {
        let (dict, a) = if trial % 2 == 0 {
            let n = rng.random_range(1..=16);
            (Dictionary::standard_basis(n).unwrap(), Tensor::vector(unit_ball_vector(n, &mut rng)).unwrap())
        } else {
            let q = rng.random_range(1..=4);
            let dict = Dictionary::cut_products(random_measures(q, &mut rng)).unwrap();
            (dict, Tensor::new(2, q, unit_ball_vector(q * q, &mut rng)).unwrap())
        };
        for k in [4, 16, 64] {
            let dec = greedy_decompose(&a, &dict, k).unwrap();
            runs.push(Run { dict: dict.clone(), dec });
        }
    }
    (runs, start.elapsed())
}

fn criterion_1(runs: &[Run], elapsed: Duration) -> Outcome {
    for run in runs {
        let dec = &run.dec;
        let bound = 1.0 / (dec.k as f64).sqrt() + 1e-9;
        ensure(dec.steps <= dec.k, || format!("{} steps for k = {}", dec.steps, dec.k))?;
        let residual = seminorm(&dec.residual, &run.dict).unwrap().value;
        ensure(residual <= bound, || format!("residual {residual} above {bound} at k = {}", dec.k))?;
    }
    within(elapsed, 10)?;
    Ok(format!("{} decompositions in {elapsed:.2?}", runs.len()))
}

fn criterion_2(runs: &[Run]) -> Outcome {
    let mut worst: f64 = 0.0;
    for run in runs {
        let dec = &run.dec;
        let k = dec.k as f64;
        // replay a_{i+1} = a_i - c_i r_i independently of the library's audit
        let mut a = dec.original.clone();
        for (i, (c, r)) in dec.coeffs.iter().zip(&dec.atoms).enumerate() {
            let before = a.norm_squared();
            ensure(before <= 1.0 - i as f64 / k + 1e-9, || format!("chain broken at step {i}: {before}"))?;
            a.add_scaled(-c, r).unwrap();
            let predicted = before - c * c * (2.0 - r.norm_squared());
            worst = worst.max((a.norm_squared() - predicted).abs());
        }
        let last = a.norm_squared();
        ensure(last <= 1.0 - dec.steps as f64 / k + 1e-9, || format!("chain broken after {} steps", dec.steps))?;
        let report = verify_energy_identity(dec, &run.dict).unwrap();
        ensure(report.passed && report.chained_ok, || format!("library audit failed: {report:?}"))?;
    }
    ensure(worst <= 1e-9, || format!("identity off by {worst:e}"))?;
    Ok(format!("max identity defect {worst:.1e}"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let graphs: Vec<SimpleGraph> = (1..=5).flat_map(SimpleGraph::all_labelled).collect();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let model = EdgeModel::random_in_ball(rng.random_range(1..=3), 4, &mut rng).unwrap();
        for f in &graphs {
            let b = partition_function(&model, f, Engine::Brute).unwrap();
            let c = partition_function(&model, f, Engine::Contract).unwrap();
            let scale = b.abs().max(c.abs());
            let rel = if scale == 0.0 { 0.0 } else { (b - c).abs() / scale };
            worst = worst.max(rel);
        }
    }
    let elapsed = start.elapsed();
    ensure(worst <= 1e-9, || format!("relative difference {worst:e}"))?;
    within(elapsed, 60)?;
    Ok(format!("{} graphs x 20 models, max relative {worst:.1e}, {elapsed:.2?}", graphs.len()))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let m = random_symmetric_matrix(rng.random_range(1..=6), &mut rng);
        let model = matrix_model(&m);
        for (f, p) in [(SimpleGraph::complete(3), 3), (SimpleGraph::cycle(4).unwrap(), 4)] {
            let expected = trace_power(&m, p);
            for engine in [Engine::Brute, Engine::Contract] {
                let got = partition_function(&model, &f, engine).unwrap();
                worst = worst.max((got - expected).abs() / expected.abs());
            }
        }
    }
    ensure(worst <= 1e-9, || format!("relative error {worst:e}"))?;
    Ok(format!("max relative error {worst:.1e}"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let graphs = SimpleGraph::up_to_isomorphism(5);
    let mut tightest = f64::INFINITY;
    for _ in 0..500 {
        let f = &graphs[rng.random_range(0..graphs.len())];
        let a = random_assignment_padded(f, rng.random_range(1..=3), 1, &mut rng);
        let check = cs_bound_check(&a, f).unwrap();
        ensure(check.holds, || format!("product bound fails on {f:?}: {} > {}", check.lhs, check.rhs))?;
        tightest = tightest.min(check.rhs - check.lhs);
    }

    let cycles: Vec<SimpleGraph> = (3..=6).map(|n| SimpleGraph::cycle(n).unwrap()).collect();
    let low_degree: Vec<SimpleGraph> = SimpleGraph::up_to_isomorphism(6)
        .into_iter()
        .filter(|g| g.max_degree() <= 2)
        .collect();
    let mut lip_slack = f64::INFINITY;
    for i in 0..500 {
        let f = if i < 4 * 12 {
            &cycles[i % 4]
        } else {
            &low_degree[rng.random_range(0..low_degree.len())]
        };
        let dim = rng.random_range(1..=3);
        let g = random_assignment_in_ball(f, dim, &mut rng);
        let h = random_assignment_in_ball(f, dim, &mut rng);
        let check = lipschitz_bound_check(&g, &h, f, &rank_one_dictionaries(2, dim).unwrap()).unwrap();
        ensure(check.holds, || format!("telescoping bound fails on {f:?}: {} > {}", check.lhs, check.rhs))?;
        lip_slack = lip_slack.min(check.rhs - check.lhs);
    }
    Ok(format!("500 + 500 instances, smallest slack {tightest:.1e} / {lip_slack:.1e}"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let patterns = SimpleGraph::up_to_isomorphism(5);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.random_range(1..=6);
        let g = SimpleGraph::random_gnp(n, rng.random(), &mut rng);
        let w = graph_to_graphon(&g).unwrap();
        for f in &patterns {
            let scaled = tau(&w, f).unwrap() * (n as f64).powi(f.n_vertices() as i32);
            worst = worst.max((scaled - hom_count(f, &g) as f64).abs());
        }
    }
    ensure(worst <= 1e-9, || format!("absolute error {worst:e}"))?;
    Ok(format!("{} patterns x 20 graphs, max error {worst:.1e}", patterns.len()))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for q in [4, 8, 10] {
        for kernel in 0..10 {
            let mu = random_measures(q, &mut rng);
            let x = random_tensor(2, q, &mut rng);
            let best = cut_seminorm_kernel(&mu, &x).unwrap().value;
            for _ in 0..1000 {
                let (s, t) = (rng.random_range(0..1usize << q), rng.random_range(0..1usize << q));
                let v = rectangle_value(&mu, &x, s, t);
                ensure(v <= best + 1e-12, || format!("q = {q}, kernel {kernel}: ({s:b}, {t:b}) gives {v} > {best}"))?;
            }
        }
    }
    Ok("10^4 random rectangles per q in {4, 8, 10}".into())
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let graphs = SimpleGraph::up_to_isomorphism(4);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let model = EdgeModel::random_in_ball(2, 3, &mut rng).unwrap();
        let g = random_rotation(2, &mut rng);
        let report = pi_invariance_check(&model, &g, &graphs, Engine::Brute).unwrap();
        worst = worst.max(report.max_relative);
    }
    ensure(worst <= 1e-7, || format!("relative deviation {worst:e}"))?;
    Ok(format!("20 rotations x {} graphs, max relative {worst:.1e}", graphs.len()))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_self: f64 = 0.0;
    for trial in 0..200 {
        let signed = rng.random::<bool>();
        let n = if signed { rng.random_range(1..=3) } else { rng.random_range(1..=4) };
        let group = if signed { GroupSpec::signed_permutations(n) } else { GroupSpec::permutations(n) };
        let order = rng.random_range(1..=3);
        let metric = if order <= 2 && rng.random::<bool>() {
            Metric::Seminorm {
                dictionary: Dictionary::rank_one_ball(order, n).unwrap(),
            }
        } else {
            Metric::Hilbert
        };
        let d = |a: &Tensor, b: &Tensor| orbit_distance(a, b, &group, &metric).unwrap().value;
        let (x, y, z) = (
            random_tensor(order, n, &mut rng),
            random_tensor(order, n, &mut rng),
            random_tensor(order, n, &mut rng),
        );
        let elements = group.elements().unwrap();
        let g = &elements[rng.random_range(0..elements.len())];
        let self_dist = d(&x, &act_tensor(g, &x).unwrap());
        worst_self = worst_self.max(self_dist);
        ensure(self_dist <= 1e-9, || format!("triple {trial}: (d/G)(x, g.x) = {self_dist}"))?;
        let (xy, yz, xz) = (d(&x, &y), d(&y, &z), d(&x, &z));
        ensure(xz <= xy + yz + 1e-9, || format!("triple {trial}: {xz} > {xy} + {yz}"))?;
    }
    Ok(format!("200 triples, max (d/G)(x, g.x) = {worst_self:.1e}"))
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let small = [SimpleGraph::complete(3), SimpleGraph::cycle(4).unwrap(), SimpleGraph::path(3), SimpleGraph::complete(2)];
    let a = converge_models(
        &Family::Perturbed {
            dim: 2,
            max_order: 2,
            scale: 1.0,
        },
        &small,
        20,
        10,
        Engine::Contract,
    )
    .unwrap();
    ensure(a.gaps_dominated(1e-9), || "family (a), n = 2, K = 2: a gap exceeds its bound".into())?;
    let wide = [SimpleGraph::complete(4), SimpleGraph::star(3), SimpleGraph::complete(3)];
    let a3 = converge_models(
        &Family::Perturbed {
            dim: 3,
            max_order: 3,
            scale: 1.0,
        },
        &wide,
        20,
        11,
        Engine::Contract,
    )
    .unwrap();
    ensure(a3.gaps_dominated(1e-9), || "family (a), n = 3, K = 3: a gap exceeds its bound".into())?;

    let c = converge_models(&Family::Sampled { p: 0.5, step: 10 }, &[SimpleGraph::complete(2)], 8, 12, Engine::Contract)
        .unwrap();
    let last = c.rows.last().ok_or("family (c) produced no rows")?;
    ensure(last.i == 8, || format!("family (c) stopped at i = {}", last.i))?;
    let value = last.values[0];
    ensure((value - 0.5).abs() <= 0.05, || format!("tau(K2) = {value} at n = 80"))?;
    let elapsed = start.elapsed();
    within(elapsed, 120)?;
    Ok(format!(
        "final gap {:.1e} <= bound {:.1e}; tau(K2) at n = 80 is {value:.4}; {elapsed:.2?}",
        a.rows.last().unwrap().gaps.as_ref().unwrap()[0],
        a.rows.last().unwrap().bounds.as_ref().unwrap()[0],
    ))
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {msg}"))
    })
}

fn main() -> ExitCode {
    let (runs, regularity_time) = regularity_runs();
    let criteria: Vec<(&str, Box<dyn FnOnce() -> Outcome + '_>)> = vec![
        ("regularity guarantee", Box::new(|| criterion_1(&runs, regularity_time))),
        ("energy identity", Box::new(|| criterion_2(&runs))),
        ("engine equivalence", Box::new(criterion_3)),
        ("closed-form cycle oracles", Box::new(criterion_4)),
        ("inequality suite", Box::new(criterion_5)),
        ("homomorphism density", Box::new(criterion_6)),
        ("cut seminorm exactness", Box::new(criterion_7)),
        ("orthogonal invariance of pi", Box::new(criterion_8)),
        ("quotient pseudometric", Box::new(criterion_9)),
        ("convergence demo", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        match guarded(check) {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all 10 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 10 criteria fail");
        ExitCode::FAILURE
    }
}
