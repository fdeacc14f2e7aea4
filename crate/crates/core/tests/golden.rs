use cluster_torsion::cluster::reference_map;
use cluster_torsion::ratfun::{parse_rational, RationalFunction};
use cluster_torsion::surface::MappingWord;

fn golden(name: &str) -> Vec<RationalFunction> {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| parse_rational(l, 8).unwrap())
        .collect()
}

fn check(word: &str, file: &str) {
    let map = reference_map(&MappingWord::parse_torus(word).unwrap(), 3).unwrap();
    let sym = map.symbolic().unwrap();
    assert!(sym.reduced);
    let expected = golden(file);
    for (i, (got, want)) in sym.components.iter().zip(&expected).enumerate() {
        assert_eq!(got, want, "component y{}", i + 1);
    }
}

#[test]
fn left_letter_matches_golden_formulas() {
    check("L", "torus_n3_L.txt");
}

#[test]
fn right_letter_matches_golden_formulas() {
    check("R", "torus_n3_R.txt");
}

#[test]
fn composite_matches_golden_formulas() {
    check("LR", "torus_n3_phi.txt");
}
