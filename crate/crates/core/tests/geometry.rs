use jlgeom::linalg;
use jlgeom::octahedron::{self, PoleSet, F, N, O, S, W};
use jlgeom::projline::{self, MoebiusMap, Point};
use jlgeom::unitary::{self, UnitarySetting};
use jlgeom::{AlgebraElement, JordanLieStructure, OctGroup};
use proptest::prelude::*;
use std::sync::OnceLock;

fn group() -> &'static OctGroup {
    static G: OnceLock<OctGroup> = OnceLock::new();
    G.get_or_init(|| octahedron::generate_group(&PoleSet::standard(1).unwrap()).unwrap())
}

#[test]
fn reports_serialize() {
    let g = group();
    let iso = octahedron::check_isomorphism(g);
    let json = serde_json::to_string(&iso).unwrap();
    assert_eq!(serde_json::from_str::<octahedron::IsomorphismReport>(&json).unwrap(), iso);
    let audit = octahedron::table_diff_report(g).unwrap();
    let json = serde_json::to_string(&audit).unwrap();
    assert!(json.contains("INVERSE-MATCH"));
    let rows = octahedron::derived_table(g);
    assert_eq!(serde_json::from_str::<Vec<octahedron::DerivedRow>>(&serde_json::to_string(&rows).unwrap()).unwrap(), rows);
}

#[test]
fn map_and_point_json_round_trip() {
    let mut rng = linalg::rng(1);
    let m = projline::random_moebius(2, &mut rng);
    let back: MoebiusMap = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
    let p = projline::random_point(2, &mut rng);
    assert!(back.apply(&p).unwrap().equals(&m.apply(&p).unwrap()));
    let q: Point = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
    assert!(q.equals(&p));
}

#[test]
fn poles_of_the_torsor() {
    let s = UnitarySetting::new(2).unwrap();
    for i in [O, W, F] {
        assert!(s.in_torsor(s.poles.get(i)));
    }
    for i in [N, S] {
        assert!(!s.in_torsor(s.poles.get(i)));
    }
}

#[test]
fn jordan_lie_json_survives_files() {
    let dir = std::env::temp_dir().join(format!("jlgeom-json-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("structure.json");
    let jl = JordanLieStructure::commutative_poisson(3);
    std::fs::write(&path, jl.to_json()).unwrap();
    let back = JordanLieStructure::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back, jl);
    std::fs::remove_dir_all(&dir).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn group_is_normalized_by_itself(i in 0usize..48, j in 0usize..48) {
        let g = group();
        let conj = g.elements[i].map.conjugate(&g.elements[j].map);
        let k = g.locate(&conj);
        prop_assert!(k.is_some());
        prop_assert_eq!(g.elements[k.unwrap()].order, g.elements[j].order);
    }

    #[test]
    fn cross_ratio_trace_is_invariant(seed in any::<u64>()) {
        let mut rng = linalg::rng(seed);
        let pts: Vec<Point> = (0..4).map(|_| projline::random_point(2, &mut rng)).collect();
        let g = projline::random_moebius(2, &mut rng);
        let before = projline::cross_ratio(&pts[0], &pts[1], &pts[2], &pts[3]).unwrap();
        let moved: Vec<Point> = pts.iter().map(|p| g.apply(p).unwrap()).collect();
        let after = projline::cross_ratio(&moved[0], &moved[1], &moved[2], &moved[3]).unwrap();
        let (a, b) = (linalg::trace(&before), linalg::trace(&after));
        prop_assert!((a - b).norm() <= 1e-7 * a.norm().max(1.0));
    }

    #[test]
    fn embedding_lands_in_the_torsor(seed in any::<u64>(), n in 1usize..=4) {
        let s = UnitarySetting::new(n).unwrap();
        let mut rng = linalg::rng(seed);
        let x = linalg::random_unitary(n, &mut rng);
        let p = unitary::embed_unitary(&AlgebraElement::new(x).unwrap(), &s).unwrap();
        prop_assert!(s.in_torsor(&p));
        let far = unitary::antipode(&p, &s).unwrap();
        prop_assert!(s.in_torsor(&far));
        prop_assert!(p.is_transversal(&far));
    }
}
