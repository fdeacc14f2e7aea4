//! Acceptance criteria. Each criterion prints one PASS or FAIL line; the
//! process exits non-zero if any fails.

use std::time::{Duration, Instant};

use cluster_torsion::cluster::{embed_pgl2, flip_map, mapping_class_map, mutate_x, reference_map, ClusterMap};
use cluster_torsion::quiver::{build_quiver, vertex_bijection, Quiver};
use cluster_torsion::ratfun::{parse_rational, RationalFunction};
use cluster_torsion::surface::{MappingWord, Triangulation, TriangulationIso};
use cluster_torsion::torsion::{
    full_pipeline, jacobian_at, multistart, MultistartOptions, PipelineOptions, SeedStrategy, SolveOptions,
};
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TARGET: [i64; 9] = [1, -16, 119, -432, 656, -432, 119, -16, 1];
const RUNTIME_LIMIT: Duration = Duration::from_secs(10);

type Outcome = Result<String, String>;

fn omega() -> Complex64 {
    Complex64::new(-0.5, 3f64.sqrt() / 2.0)
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn figure_eight_point() -> Vec<Complex64> {
    let w = omega();
    vec![c(1.0), c(1.0), w, c(1.0), w.conj(), w, w.conj(), c(1.0)]
}

fn word(w: &str) -> MappingWord {
    MappingWord::parse_torus(w).unwrap()
}

fn random_point(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|_| Complex64::from_polar(rng.random_range(0.5f64.ln()..2f64.ln()).exp(), rng.random_range(0.0..std::f64::consts::TAU)))
        .collect()
}

fn max_dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn max_norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn figure_eight_end_to_end() -> Outcome {
    let start = Instant::now();
    let r = full_pipeline(
        &Triangulation::once_punctured_torus(),
        &word("LR"),
        3,
        &SeedStrategy::default_for(3, 0),
        &PipelineOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let torsion = r.torsion.ok_or("torsion undefined")?;
    let torsion_err = (torsion.norm() - 84.0).abs();
    let coord_err = max_dist(&r.fixed_point, &figure_eight_point());
    let summary = format!(
        "|torsion| = {:.9}, max coordinate error {coord_err:.1e}, {:.2} s",
        torsion.norm(),
        elapsed.as_secs_f64()
    );
    if torsion_err < 1e-6 && coord_err < 1e-10 && elapsed < RUNTIME_LIMIT {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn alexander_polynomial() -> Outcome {
    let tri = Triangulation::once_punctured_torus();
    let numeric = full_pipeline(&tri, &word("LR"), 3, &SeedStrategy::default_for(3, 0), &PipelineOptions::default())
        .map_err(|e| e.to_string())?;
    let before = numeric.alexander.iter().zip(TARGET).map(|(z, k)| (z - k as f64).norm()).fold(0.0, f64::max);
    let after = numeric.alexander_integers.as_deref() == Some(&TARGET[..]);
    let opts = PipelineOptions { exact: Some(-3), ..PipelineOptions::default() };
    let exact = full_pipeline(&tri, &word("LR"), 3, &SeedStrategy::Point(figure_eight_point()), &opts)
        .map_err(|e| e.to_string())?
        .exact
        .ok_or("exact mode produced no report")?;
    let exact_ok = exact.alexander_integers.as_deref() == Some(&TARGET[..]);
    let summary = format!(
        "numeric max deviation {before:.1e}, snapped equal: {after}, exact Q(sqrt(-3)) equal: {exact_ok}"
    );
    if numeric.alexander.len() == TARGET.len() && before < 1e-6 && after && exact_ok {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn root_multiplicity() -> Outcome {
    let r = full_pipeline(
        &Triangulation::once_punctured_torus(),
        &word("LR"),
        3,
        &SeedStrategy::Point(figure_eight_point()),
        &PipelineOptions { exact: Some(-3), ..PipelineOptions::default() },
    )
    .map_err(|e| e.to_string())?;
    let exact = r.exact.as_ref().map(|e| e.t1_multiplicity);
    let summary = format!("numeric {}, exact {:?}, expected {}", r.t1_multiplicity, exact, r.normalization_exponent);
    if r.t1_multiplicity == 2 && exact == Some(2) && r.normalization_exponent == 2 {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn golden(name: &str) -> Vec<RationalFunction> {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| parse_rational(l, 8).unwrap())
        .collect()
}

fn golden_formulas() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    let mut mismatched = Vec::new();
    for (w, file) in [("L", "torus_n3_L.txt"), ("R", "torus_n3_R.txt"), ("LR", "torus_n3_phi.txt")] {
        let map = reference_map(&word(w), 3).map_err(|e| e.to_string())?;
        let expected = golden(file);
        let sym = map.symbolic().map_err(|e| e.to_string())?;
        if expected.len() != 8 || sym.components != expected {
            mismatched.push(w);
        }
        let mut points = 0;
        while points < 50 {
            let p = random_point(&mut rng, 8);
            let Ok(got) = map.apply(&p) else { continue };
            let want: Vec<Complex64> = expected.iter().map(|f| f.eval(&p).unwrap()).collect();
            for (g, x) in got.iter().zip(&want) {
                worst = worst.max((g - x).norm() / x.norm().max(f64::MIN_POSITIVE));
            }
            points += 1;
        }
    }
    let summary = format!("canonical mismatches {mismatched:?}, worst relative error at 150 points {worst:.1e}");
    if mismatched.is_empty() && worst < 1e-9 {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn random_quiver() -> impl Strategy<Value = Vec<Vec<i32>>> {
    (2usize..9).prop_flat_map(|l| {
        proptest::collection::vec(-3i32..=3, l * (l - 1) / 2).prop_map(move |upper| {
            let mut eps = vec![vec![0; l]; l];
            let mut it = upper.into_iter();
            for i in 0..l {
                for j in i + 1..l {
                    let v = it.next().unwrap();
                    eps[i][j] = v;
                    eps[j][i] = -v;
                }
            }
            eps
        })
    })
}

fn complex_unit_annulus() -> impl Strategy<Value = Complex64> {
    (0.5f64.ln()..2f64.ln(), 0.0..std::f64::consts::TAU).prop_map(|(r, a)| Complex64::from_polar(r.exp(), a))
}

fn involutivity() -> Result<(), String> {
    runner(1000)
        .run(&(random_quiver(), any::<prop::sample::Index>()), |(eps, k)| {
            let q = Quiver::unlabeled(eps).unwrap();
            let k = k.index(q.len());
            let back = q.mutate(k).unwrap().mutate(k).unwrap();
            prop_assert!(back.same_matrix(&q));
            Ok(())
        })
        .map_err(|e| format!("quiver: {e}"))?;
    let case = random_quiver().prop_flat_map(|eps| {
        let l = eps.len();
        (Just(eps), 0..l, proptest::collection::vec(complex_unit_annulus(), l))
    });
    runner(1000)
        .run(&case, |(eps, k, y)| {
            let q = Quiver::unlabeled(eps).unwrap();
            prop_assume!((y[k] + 1.0).norm() > 1e-3);
            let once = mutate_x(&y, &q, k).unwrap();
            let twice = mutate_x(&once, &q.mutate(k).unwrap(), k).unwrap();
            prop_assert!(max_dist(&twice, &y) <= 1e-9 * max_norm(&y), "{y:?} -> {twice:?}");
            Ok(())
        })
        .map_err(|e| format!("X-mutation: {e}"))
}

fn flip_consistency() -> Result<(), String> {
    let cases = [
        (Triangulation::once_punctured_torus(), vec![2, 3, 4]),
        (Triangulation::four_punctured_sphere(), vec![2, 3]),
    ];
    for (tri, ranks) in cases {
        for n in ranks {
            for e in 0..tri.edge_count() {
                let (map, record) = flip_map(&tri, e, n).map_err(|err| format!("n={n} edge {e}: {err}"))?;
                let rebuilt = build_quiver(&record.after, n).map_err(|err| err.to_string())?;
                if !map.final_quiver().same_matrix(&rebuilt) {
                    return Err(format!("n={n} edge {e}: mutated quiver differs from rebuilt"));
                }
            }
        }
    }
    Ok(())
}

fn equivariance() -> Result<(), String> {
    let tri = Triangulation::once_punctured_torus();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for w in ["LR", "L", "R", "LLR"] {
        let base = mapping_class_map(&tri, &word(w), 2).map_err(|e| e.to_string())?;
        for n in [3, 4] {
            let lifted = mapping_class_map(&tri, &word(w), n).map_err(|e| e.to_string())?;
            let mut points = 0;
            while points < 50 {
                let y = random_point(&mut rng, 3);
                let (Ok(down), Ok(up)) = (base.apply(&y), lifted.apply(&embed_pgl2(&tri, &y, n).unwrap())) else {
                    continue;
                };
                let expected = embed_pgl2(&tri, &down, n).unwrap();
                if max_dist(&up, &expected) > 1e-9 * max_norm(&expected) {
                    return Err(format!("{w}, n={n}: phi(iota(y)) != iota(phi(y)) at {y:?}"));
                }
                points += 1;
            }
        }
    }
    Ok(())
}

fn jacobian_vs_differences() -> Result<(), String> {
    let tri = Triangulation::once_punctured_torus();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut pairs = 0;
    let h = 1e-6;
    while pairs < 100 {
        let len = rng.random_range(1..=4);
        let w: String = (0..len).map(|_| if rng.random_bool(0.5) { 'L' } else { 'R' }).collect();
        let n = rng.random_range(2..=3);
        let map = mapping_class_map(&tri, &word(&w), n).map_err(|e| e.to_string())?;
        let p = random_point(&mut rng, map.dimension());
        let Ok(j) = jacobian_at(&map, &p) else { continue };
        let scale = j.matrix.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        let mut worst = 0.0f64;
        for i in 0..p.len() {
            let (mut up, mut down) = (p.clone(), p.clone());
            up[i] += h;
            down[i] -= h;
            let (fu, fd) = (map.apply(&up).map_err(|e| e.to_string())?, map.apply(&down).map_err(|e| e.to_string())?);
            for k in 0..p.len() {
                worst = worst.max(((fu[k] - fd[k]) / (2.0 * h) - j.matrix[i][k]).norm());
            }
        }
        if worst > 1e-5 * scale {
            return Err(format!("{w} n={n}: difference {worst:.1e} against scale {scale:.1e}"));
        }
        pairs += 1;
    }
    Ok(())
}

fn double_flip_identity() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (tri, ranks) in [
        (Triangulation::once_punctured_torus(), [2, 3, 4]),
        (Triangulation::four_punctured_sphere(), [2, 3, 4]),
    ] {
        for e in 0..tri.edge_count() {
            let first = tri.flip(e).map_err(|err| err.to_string())?;
            let second = first.after.flip(first.edge_map[e]).map_err(|err| err.to_string())?;
            let isos: Vec<TriangulationIso> = (0..tri.triangle_count())
                .flat_map(|img| (0..3).map(move |r| (img, r)))
                .filter_map(|(img, r)| TriangulationIso::from_anchor(&tri, &second.after, 0, img, r))
                .filter(|iso| {
                    (0..tri.edge_count())
                        .all(|f| iso.edge(&tri, &second.after, f) == second.edge_map[first.edge_map[f]])
                })
                .collect();
            for n in ranks {
                let (m1, _) = flip_map(&tri, e, n).map_err(|err| err.to_string())?;
                let (m2, _) = flip_map(&first.after, first.edge_map[e], n).map_err(|err| err.to_string())?;
                let both: ClusterMap = m1.then(&m2).map_err(|err| err.to_string())?;
                let psis: Vec<Vec<usize>> =
                    isos.iter().filter_map(|iso| vertex_bijection(&tri, &second.after, iso, n).ok()).collect();
                for _ in 0..10 {
                    let y = random_point(&mut rng, both.dimension());
                    let Ok(z) = both.apply(&y) else { continue };
                    let identity = psis.iter().any(|psi| {
                        let back: Vec<Complex64> = psi.iter().map(|&v| z[v]).collect();
                        max_dist(&back, &y) <= 1e-9 * max_norm(&y)
                    });
                    if !identity {
                        return Err(format!("edge {e}, n={n}: flipping twice is not the identity"));
                    }
                }
            }
        }
    }
    Ok(())
}

fn property_suites() -> Outcome {
    let parts: [(&str, fn() -> Result<(), String>); 5] = [
        ("a", involutivity),
        ("b", flip_consistency),
        ("c", equivariance),
        ("d", jacobian_vs_differences),
        ("e", double_flip_identity),
    ];
    let mut failed = Vec::new();
    for (name, check) in parts {
        if let Err(e) = check() {
            failed.push(format!("({name}) {e}"));
        }
    }
    if failed.is_empty() {
        Ok("(a) through (e) hold".into())
    } else {
        Err(failed.join("; "))
    }
}

fn pgl2_seed() -> Outcome {
    let map = reference_map(&word("LR"), 2).map_err(|e| e.to_string())?;
    let opts = MultistartOptions { starts: 100, seed: 0, ..MultistartOptions::default() };
    let starts = multistart(&map, &opts, &SolveOptions::default());
    let w = omega();
    let target = [c(1.0), w, w.conj()];
    let hits: Vec<usize> = starts
        .iter()
        .filter_map(|s| {
            let p = &s.outcome.as_ref().ok()?.point;
            let mut unused = vec![true; 3];
            for z in p {
                let slot = (0..3).find(|&i| unused[i] && (z - target[i]).norm() < 1e-10)?;
                unused[slot] = false;
            }
            Some(s.index)
        })
        .collect();
    let converged = starts.iter().filter(|s| s.outcome.is_ok()).count();
    let summary = format!("{} of 100 starts reach (1, w, conj w), {converged} converged", hits.len());
    if hits.is_empty() {
        Err(summary)
    } else {
        Ok(summary)
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 6] = [
        ("figure-eight end-to-end", figure_eight_end_to_end),
        ("Alexander polynomial", alexander_polynomial),
        ("root multiplicity at t = 1", root_multiplicity),
        ("symbolic formula golden files", golden_formulas),
        ("property suites", property_suites),
        ("PGL2 seed reproduction", pgl2_seed),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS  {}  {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL  {}  {name}: {detail}", i + 1);
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
