//! Acceptance criteria, one test each. Every test prints a single
//! `[PASS]`/`[FAIL]` line straight to stdout (bypassing capture) before
//! asserting.

use std::io::Write;
use std::time::{Duration, Instant};

use jlgeom::algebra::StarAlgebra;
use jlgeom::evolution::{self, CotangentVector, TangentVector};
use jlgeom::jordanlie::{self, check_axioms, relative_residual, ConversionParams, LinearSpace, MatrixJordanLie};
use jlgeom::linalg;
use jlgeom::octahedron::{self, PoleSet};
use jlgeom::unitary::{self, UnitarySetting};

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "[{status}] criterion {id}: {name} ({detail})");
    let _ = out.flush();
}

fn herm(n: usize) -> MatrixJordanLie {
    MatrixJordanLie::from_star_algebra(&StarAlgebra::new(n).unwrap(), &ConversionParams::default()).unwrap()
}

fn full(n: usize) -> MatrixJordanLie {
    MatrixJordanLie::from_associative(&StarAlgebra::new(n).unwrap(), &ConversionParams::associative(0.5, 0.5)).unwrap()
}

#[test]
fn criterion_01_jordan_lie_axioms() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut all = true;
    for n in 1..=3 {
        let r = check_axioms(&herm(n).jl, 200, 7).unwrap();
        worst = worst.max(r.max_residual);
        all &= r.pass && r.max_residual <= 1e-9;
    }
    let mut controls_fail = true;
    for (n, seed) in [(2, 1), (3, 2)] {
        let bad = herm(n).jl.with_perturbed_bracket(seed, 0.05);
        controls_fail &= !check_axioms(&bad, 200, 7).unwrap().pass;
    }
    let elapsed = start.elapsed();
    let pass = all && controls_fail && elapsed < Duration::from_secs(5);
    report(
        1,
        "Jordan-Lie axiom suite",
        pass,
        &format!("max residual {worst:.2e}, controls rejected {controls_fail}, {:.2} s", elapsed.as_secs_f64()),
    );
    assert!(pass);
}

#[test]
fn criterion_02_equivalence_round_trips() {
    let mut rng = linalg::rng(2);
    let mut worst_assoc: f64 = 0.0;
    let mut worst_jl: f64 = 0.0;
    let mut worst_involution: f64 = 0.0;
    for n in 1..=3 {
        let params = ConversionParams::associative(0.5, 0.5);
        let m = full(n);
        let assoc = jordanlie::to_associative(&m.jl, &params).unwrap();
        for _ in 0..50 {
            let (a, b) = (linalg::ginibre(n, &mut rng), linalg::ginibre(n, &mut rng));
            let got = m.to_matrix(&assoc.product(&m.coords(&a), &m.coords(&b)));
            let ab = &a * &b;
            worst_assoc = worst_assoc.max((got - &ab).norm() / ab.norm().max(1.0));
        }

        let h = herm(n);
        let star = jordanlie::complexify_to_star(&h.jl, &h.params).unwrap();
        for _ in 0..50 {
            let x = h.coords(&h.random_element(&mut rng));
            let y = h.coords(&h.random_element(&mut rng));
            let (j, l) = star.recovered_products(0.5, 1.0, &x, &y);
            worst_jl = worst_jl
                .max(relative_residual(&[j, h.jl.jordan(&x, &y).scaled(-1.0)]))
                .max(relative_residual(&[l, h.jl.lie(&x, &y).scaled(-1.0)]));
            let (za, zb) = (
                h.complex_coords(&linalg::ginibre(n, &mut rng)),
                h.complex_coords(&linalg::ginibre(n, &mut rng)),
            );
            let lhs = star.involution(&star.product(&za, &zb));
            let rhs = star.product(&star.involution(&zb), &star.involution(&za));
            worst_involution = worst_involution.max(relative_residual(&[lhs, rhs.scaled(-1.0)]));
        }
    }
    let pass = worst_assoc <= 1e-12 && worst_jl <= 1e-12 && worst_involution <= 1e-9;
    report(
        2,
        "equivalence round trips",
        pass,
        &format!("associative {worst_assoc:.2e}, Jordan-Lie {worst_jl:.2e}, involution {worst_involution:.2e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_03_tensor_product() {
    let (h2, h4) = (herm(2), herm(4));
    let t = jordanlie::tensor_product(&h2.jl, &h2.jl).unwrap();
    let axioms = check_axioms(&t, 200, 3).unwrap();
    let kappa_kept = (t.kappa - h2.jl.kappa).abs() <= 1e-15;
    let residual = jordanlie::kronecker_residual(&h2, &h2, &h4).unwrap();
    let pass = axioms.pass && kappa_kept && residual <= 1e-9;
    report(
        3,
        "tensor product",
        pass,
        &format!("axioms {:.2e}, kappa kept {kappa_kept}, Kronecker residual {residual:.2e}", axioms.max_residual),
    );
    assert!(pass);
}

#[test]
fn criterion_04_triple_systems() {
    let mut rng = linalg::rng(4);
    let mut worst_r: f64 = 0.0;
    let mut worst_t: f64 = 0.0;
    for n in 1..=3 {
        let h = herm(n);
        let m = full(n);
        for _ in 0..100 {
            let (x, y, z) = (h.random_element(&mut rng), h.random_element(&mut rng), h.random_element(&mut rng));
            worst_r = worst_r.max(jordanlie::triple_systems(&h.jl, &h.coords(&x), &h.coords(&y), &h.coords(&z)).residual);
            worst_t = worst_t.max(h.triple_realization_residual(&x, &y, &z));
            let (x, y, z) = (m.random_element(&mut rng), m.random_element(&mut rng), m.random_element(&mut rng));
            worst_r = worst_r.max(jordanlie::triple_systems(&m.jl, &m.coords(&x), &m.coords(&y), &m.coords(&z)).residual);
            worst_t = worst_t.max(m.triple_realization_residual(&x, &y, &z));
        }
    }
    let pass = worst_r <= 1e-9 && worst_t <= 1e-9;
    report(
        4,
        "triple systems",
        pass,
        &format!("curvature identity {worst_r:.2e}, associative realization {worst_t:.2e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_05_octahedral_group() {
    let mut details = Vec::new();
    let mut pass = true;
    for (n, limit) in [(1, 10.0), (2, 30.0)] {
        let start = Instant::now();
        let g = octahedron::generate_group(&PoleSet::standard(n).unwrap()).unwrap();
        let iso = octahedron::check_isomorphism(&g);
        let stab = octahedron::stabilizer_of_n(&g).unwrap();
        let cay = octahedron::cayley_elements(&g).unwrap();
        let secs = start.elapsed().as_secs_f64();
        let ok = g.len() == 48
            && g.holomorphic_count() == 24
            && iso.pass
            && iso.homomorphism_failures == 0
            && iso.zeta_central
            && stab.pass
            && cay.pass
            && secs < limit;
        pass &= ok;
        details.push(format!(
            "n={n}: {} elements ({} holomorphic), isomorphism {}, stabilizer {}, order-3 {} cyclic {}, {secs:.2} s",
            g.len(),
            g.holomorphic_count(),
            iso.pass,
            stab.pass,
            cay.elements.len(),
            cay.all_cyclic
        ));
    }
    report(5, "octahedral group", pass, &details.join("; "));
    assert!(pass);
}

#[test]
fn criterion_06_table_audit() {
    let g = octahedron::generate_group(&PoleSet::standard(1).unwrap()).unwrap();
    let audit = octahedron::table_diff_report(&g).unwrap();
    let mismatched: Vec<&str> = audit
        .rows
        .iter()
        .filter(|r| r.status == octahedron::AuditStatus::Mismatch)
        .map(|r| r.listed_cycle.as_str())
        .collect();
    report(
        6,
        "transformation table audit",
        audit.pass,
        &format!(
            "anchors match {}, (FWBO) inverse {}, MATCH {}, INVERSE-MATCH {}, MISMATCH {}: {}",
            audit.anchors_match,
            audit.fwbo_inverse,
            audit.matches,
            audit.inverse_matches,
            audit.mismatches,
            mismatched.join(" ")
        ),
    );
    assert!(audit.anchors_match && audit.fwbo_inverse && audit.mismatches == 0, "{}", audit.to_markdown());
}

#[test]
fn criterion_07_unitary_geometry() {
    let cay = unitary::cayley_check(100, 4, 7).unwrap();
    let mut pass = cay.max_unitarity_defect <= 1e-9;
    let mut details = vec![format!("Cayley defect {:.2e}", cay.max_unitarity_defect)];
    for n in 1..=3 {
        let s = UnitarySetting::new(n).unwrap();
        let affine = unitary::affine_completeness_check(&s, 1000, 70 + n as u64).unwrap();
        let sampler = unitary::real_form_report(&s, 200, 700 + n as u64, true).unwrap();
        pass &= affine.violations == 0
            && affine.heavy_tailed_trials > 0
            && affine.pass
            && sampler.outside_torsor == 0
            && sampler.nonchart_samples > 0
            && sampler.max_recovery_defect <= 1e-9;
        details.push(format!(
            "n={n}: violations {}, min margin {:.3} / heavy {:.3}, sampler outside {} ({} off-chart), recovery {:.2e}",
            affine.violations,
            affine.min_margin,
            affine.min_margin_heavy,
            sampler.outside_torsor,
            sampler.nonchart_samples,
            sampler.max_recovery_defect
        ));
    }
    report(7, "unitary geometry", pass, &details.join("; "));
    assert!(pass);
}

#[test]
fn criterion_08_evolution() {
    let grid = evolution::uniform_grid(10.0, 1000);
    let mut details = Vec::new();
    let mut pass = true;

    for n in 2..=4 {
        let setup = evolution::random_picture_setup(n, 1.0, 80 + n as u64).unwrap();
        let r = evolution::picture_equivalence_check(&setup.field, &setup.observable, &setup.state, &grid).unwrap();
        pass &= r.max_deviation() <= 1e-8;
        details.push(format!("n={n} pictures {:.2e}", r.max_deviation()));
    }

    let setup = evolution::random_picture_setup(2, 1.0, 88).unwrap();
    let x0 = setup.field.setting.unitary_coordinate(&setup.observable.foot).unwrap();
    let coarse = evolution::uniform_grid(10.0, 100);
    let exact = evolution::flow_closed_form(&setup.field, &x0, &coarse).unwrap();
    let rk = evolution::flow_rk4(&setup.field, &x0, &coarse, evolution::DEFAULT_STEP).unwrap();
    let rk_dev = rk.max_deviation(&exact);
    let conv = evolution::rk4_convergence(&setup.field, &x0, 2.0, 0.2, 3).unwrap();
    let order_ok = conv.observed_orders.iter().all(|o| (3.5..=4.5).contains(o));
    pass &= rk_dev <= 1e-6 && order_ok;
    details.push(format!("RK4 {rk_dev:.2e}, orders {:?}", conv.observed_orders.iter().map(|o| format!("{o:.2}")).collect::<Vec<_>>()));

    let s = &setup.field.setting;
    let base = jlgeom::evolution::pairing(&setup.observable, &setup.state, s).unwrap();
    let (vp, fp) = (setup.observable.as_point(s).unwrap(), setup.state.as_point(s).unwrap());
    let mut rng = linalg::rng(89);
    let mut worst_pairing: f64 = 0.0;
    for k in 0..50 {
        let g = linalg::random_unitary(2, &mut rng);
        let map = if k % 2 == 0 { unitary::torsor_left(&g) } else { unitary::torsor_right(&g) };
        let q = map.apply(&setup.observable.foot).unwrap();
        let v = TangentVector::from_pair(&map.apply(&vp).unwrap(), &q, 1.0, s).unwrap();
        let f = CotangentVector::from_pair(&map.apply(&fp).unwrap(), &q, s).unwrap();
        worst_pairing = worst_pairing.max((evolution::pairing(&v, &f, s).unwrap() - base).norm());
    }
    pass &= worst_pairing <= 1e-9;
    details.push(format!("pairing invariance {worst_pairing:.2e}"));

    let cov = evolution::hbar_covariance_check(&setup, 2.0, &evolution::uniform_grid(10.0, 200)).unwrap();
    pass &= cov.pass;
    details.push(format!(
        "hbar covariance {:.2e}",
        cov.max_flow_deviation.max(cov.max_picture_deviation)
    ));

    let abelian = evolution::random_picture_setup(1, 1.0, 81).unwrap();
    let r = evolution::picture_equivalence_check(&abelian.field, &abelian.observable, &abelian.state, &grid).unwrap();
    pass &= r.max_deviation() <= 1e-12;
    details.push(format!("n=1 pictures {:.2e}", r.max_deviation()));

    report(8, "evolution", pass, &details.join("; "));
    assert!(pass);
}

#[test]
fn criterion_09_positivity() {
    let mut pass = true;
    let mut details = Vec::new();
    for n in 1..=4 {
        let r = StarAlgebra::with_signature(n, 0).unwrap().check_p_star(200, 9).unwrap();
        pass &= r.is_p_star;
        details.push(format!("({n},0) {}", r.is_p_star));
    }
    let mixed = StarAlgebra::with_signature(1, 1).unwrap();
    let a = mixed.check_p_star(200, 9).unwrap();
    let b = mixed.check_p_star(200, 9).unwrap();
    let reproducible = a == b && !a.witnesses.is_empty();
    pass &= !a.is_p_star && reproducible;
    details.push(format!("(1,1) {} with {} witnesses, reproducible {reproducible}", a.is_p_star, a.witnesses.len()));
    report(9, "P* positivity dichotomy", pass, &details.join(", "));
    assert!(pass);
}

/// The module checks of criteria 1 to 9 at their stated sizes, serialized.
fn full_suite() -> String {
    let mut parts = Vec::new();
    for n in 1..=3 {
        parts.push(serde_json::to_string(&check_axioms(&herm(n).jl, 200, 7).unwrap()).unwrap());
    }
    let t = jordanlie::tensor_product(&herm(2).jl, &herm(2).jl).unwrap();
    parts.push(serde_json::to_string(&check_axioms(&t, 200, 3).unwrap()).unwrap());
    for n in [1, 2] {
        let g = octahedron::generate_group(&PoleSet::standard(n).unwrap()).unwrap();
        parts.push(serde_json::to_string(&octahedron::check_isomorphism(&g)).unwrap());
        parts.push(serde_json::to_string(&octahedron::cayley_elements(&g).unwrap()).unwrap());
        parts.push(serde_json::to_string(&octahedron::table_diff_report(&g).unwrap()).unwrap());
        parts.push(serde_json::to_string(&octahedron::commutant_check(&g, 20, 5).unwrap()).unwrap());
    }
    parts.push(serde_json::to_string(&unitary::cayley_check(100, 4, 7).unwrap()).unwrap());
    for n in 1..=3 {
        let s = UnitarySetting::new(n).unwrap();
        parts.push(serde_json::to_string(&unitary::affine_completeness_check(&s, 1000, 70).unwrap()).unwrap());
        parts.push(serde_json::to_string(&unitary::real_form_report(&s, 200, 700, true).unwrap()).unwrap());
    }
    let grid = evolution::uniform_grid(10.0, 1000);
    for n in 1..=4 {
        let setup = evolution::random_picture_setup(n, 1.0, 80).unwrap();
        let r = evolution::picture_equivalence_check(&setup.field, &setup.observable, &setup.state, &grid).unwrap();
        parts.push(serde_json::to_string(&r).unwrap());
    }
    for n in 1..=4 {
        parts.push(serde_json::to_string(&StarAlgebra::with_signature(n, 0).unwrap().check_p_star(200, 9).unwrap()).unwrap());
    }
    parts.push(serde_json::to_string(&StarAlgebra::with_signature(1, 1).unwrap().check_p_star(200, 9).unwrap()).unwrap());
    parts.join("\n")
}

#[test]
fn criterion_10_runtime_and_determinism() {
    let start = Instant::now();
    let first = full_suite();
    let elapsed = start.elapsed();
    let second = full_suite();
    let identical = first == second;
    let pass = elapsed < Duration::from_secs(60) && identical;
    report(
        10,
        "full-suite runtime and determinism",
        pass,
        &format!("{:.2} s single pass, byte-identical {identical}, {} bytes", elapsed.as_secs_f64(), first.len()),
    );
    assert!(pass);
}
