use cluster_torsion::cluster::{flip_map, reference_map};
use cluster_torsion::surface::{MappingWord, Triangulation};
use cluster_torsion::torsion::*;
use nalgebra::DMatrix;
use num_complex::Complex64;

const FIGURE_EIGHT: [i64; 9] = [1, -16, 119, -432, 656, -432, 119, -16, 1];

fn omega() -> Complex64 {
    Complex64::new(-0.5, 3f64.sqrt() / 2.0)
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn solution() -> Vec<Complex64> {
    let w = omega();
    vec![one(), one(), w, one(), w.conj(), w, w.conj(), one()]
}

fn lr() -> MappingWord {
    MappingWord::parse_torus("LR").unwrap()
}

fn torus() -> Triangulation {
    Triangulation::once_punctured_torus()
}

#[test]
fn figure_eight_default_pipeline() {
    let r = full_pipeline(&torus(), &lr(), 3, &SeedStrategy::default_for(3, 0), &PipelineOptions::default()).unwrap();
    for (a, b) in r.fixed_point.iter().zip(solution()) {
        assert!((a - b).norm() < 1e-10, "{a} vs {b}");
    }
    assert!(r.residual < 1e-12);
    assert_eq!(r.alexander_integers.as_deref(), Some(&FIGURE_EIGHT[..]));
    for (c, k) in r.alexander.iter().zip(FIGURE_EIGHT) {
        assert!((c - k as f64).norm() < 1e-6);
    }
    assert_eq!((r.t1_multiplicity, r.normalization_exponent), (2, 2));
    assert!((r.torsion.unwrap() - 84.0).norm() < 1e-6);
    assert!((r.torsion_raw.unwrap() + 84.0).norm() < 1e-6);
    assert!(r.diagnosis.is_none());
}

#[test]
fn figure_eight_exact_mode() {
    let opts = PipelineOptions { exact: Some(-3), ..PipelineOptions::default() };
    let r = full_pipeline(&torus(), &lr(), 3, &SeedStrategy::Point(solution()), &opts).unwrap();
    let e = r.exact.unwrap();
    assert_eq!(e.alexander_integers.as_deref(), Some(&FIGURE_EIGHT[..]));
    assert_eq!(e.t1_multiplicity, 2);
    assert_eq!(e.torsion_raw.as_deref(), Some("-84"));
    assert_eq!(e.torsion.as_deref(), Some("84"));
    assert_eq!(e.fixed_point[2], "-1/2 + 1/2*sqrt(-3)");
    assert!(e.deviation < 1e-6);
}

#[test]
fn exact_mode_rejects_points_outside_the_field() {
    let opts = PipelineOptions { exact: Some(-7), ..PipelineOptions::default() };
    let err = full_pipeline(&torus(), &lr(), 3, &SeedStrategy::Point(solution()), &opts).unwrap_err();
    assert_eq!(err.stage, Stage::Exact);
}

#[test]
fn rank_two_regression() {
    let r = full_pipeline(&torus(), &lr(), 2, &SeedStrategy::default_for(2, 0), &PipelineOptions::default()).unwrap();
    let w = omega();
    for (a, b) in r.fixed_point.iter().zip([one(), w, w.conj()]) {
        assert!((a - b).norm() < 1e-10);
    }
    assert_eq!(r.alexander_integers, Some(vec![-1, 6, -6, 1]));
    assert_eq!(r.t1_multiplicity, 1);
    assert!((r.torsion.unwrap() - 3.0).norm() < 1e-9);
}

#[test]
fn rank_four_regression() {
    let r = full_pipeline(&torus(), &lr(), 4, &SeedStrategy::default_for(4, 0), &PipelineOptions::default()).unwrap();
    assert_eq!(r.t1_multiplicity, 3);
    assert_eq!(r.polynomial_method, "interpolation");
    assert_eq!(
        r.alexander_integers,
        Some(vec![
            -1, 30, -771, 11607, -102873, 554175, -1760008, 3132903, -3132903, 1760008, -554175, 102873, -11607, 771,
            -30, 1
        ])
    );
    assert!((r.torsion.unwrap() - 120960.0).norm() < 1e-3);
}

#[test]
fn empty_word_is_degenerate() {
    let word = MappingWord::parse_torus("").unwrap();
    let r = full_pipeline(&torus(), &word, 3, &SeedStrategy::Point(solution()), &PipelineOptions::default()).unwrap();
    assert!(r.degenerate);
    assert_eq!(r.residual, 0.0);
    assert_eq!(r.alexander_integers, Some(vec![1, -8, 28, -56, 70, -56, 28, -8, 1]));
    assert_eq!(r.t1_multiplicity, 8);
    assert!(r.torsion.is_none());
    assert!(r.diagnosis.unwrap().contains("multiplicity 8"));
}

#[test]
fn jacobian_matches_central_differences() {
    let m = reference_map(&lr(), 3).unwrap();
    let p = solution();
    let j = jacobian_at(&m, &p).unwrap();
    let h = 1e-6;
    for i in 0..8 {
        let (mut up, mut down) = (p.clone(), p.clone());
        up[i] += h;
        down[i] -= h;
        let (fu, fd) = (m.apply(&up).unwrap(), m.apply(&down).unwrap());
        for jj in 0..8 {
            let fd_value = (fu[jj] - fd[jj]) / (2.0 * h);
            let exact = j.matrix[i][jj];
            assert!((fd_value - exact).norm() <= 1e-6 * exact.norm().max(1.0), "({i},{jj}): {fd_value} vs {exact}");
        }
    }
}

#[test]
fn polynomial_end_coefficients_are_determinants() {
    let m = reference_map(&lr(), 3).unwrap();
    let j = jacobian_at(&m, &solution()).unwrap();
    let p = alexander_poly(&j);
    assert!((p.coeffs()[0] - 1.0).norm() < 1e-12);
    let det = DMatrix::from_fn(8, 8, |r, c| j.matrix[r][c]).determinant();
    assert!((p.coeffs()[8] - det).norm() < 1e-9);
    let imag = p.coeffs().iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    assert!(imag < 1e-8);
}

#[test]
fn torsion_ignores_overall_sign() {
    let m = reference_map(&lr(), 3).unwrap();
    let p = alexander_poly(&jacobian_at(&m, &solution()).unwrap());
    let neg = cluster_torsion::ratfun::UniPoly::new(p.coeffs().iter().map(|c| -c).collect());
    let a = torsion_value(&p, 1, 3, 1e-6).unwrap();
    let b = torsion_value(&neg, 1, 3, 1e-6).unwrap();
    assert!((a.canonical - b.canonical).norm() < 1e-9);
    assert!((a.raw + b.raw).norm() < 1e-9);
}

#[test]
fn multistart_is_reproducible_across_thread_counts() {
    let run = |threads| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
            full_pipeline(&torus(), &lr(), 2, &SeedStrategy::default_for(2, 7), &PipelineOptions::default()).unwrap()
        })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn trivial_puncture_monodromy_is_flip_invariant() {
    // points with Casimir 1 and vanishing peripheral sum at puncture 0,
    // parametrized by the coordinates off the puncture
    let sphere = Triangulation::four_punctured_sphere();
    let cycle = sphere.puncture_cycles()[0].clone();
    assert_eq!(cycle.len(), 3);
    let (e1, e2, e3) = (cycle[0], cycle[1], cycle[2]);
    for k in 0..5 {
        let mut y: Vec<Complex64> = (0..6).map(|i| Complex64::new(0.7 + 0.1 * (i + k) as f64, 0.2 * k as f64 - 0.3)).collect();
        // y1 + y1 y2 + 1 = 0 and y1 y2 y3 = 1
        y[e2] = -(one() + y[e1]) / y[e1];
        y[e3] = one() / (y[e1] * y[e2]);
        assert!(peripheral_sums(&sphere, &y)[0].norm() < 1e-12);
        for e in 0..6 {
            let (map, record) = flip_map(&sphere, e, 2).unwrap();
            let z = map.apply(&y).unwrap();
            let sums = peripheral_sums(&record.after, &z);
            assert!(sums.iter().any(|s| s.norm() < 1e-10), "flip {e}: {sums:?}");
        }
    }
}
