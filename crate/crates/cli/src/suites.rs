use clap::ValueEnum;
use jlgeom::algebra::StarAlgebra;
use jlgeom::jordanlie::{self, relative_residual, ConversionParams, LinearSpace, MatrixJordanLie};
use jlgeom::octahedron::{self, AuditStatus, PoleSet};
use jlgeom::unitary::{self, UnitarySetting};
use jlgeom::{linalg, AlgebraElement};

use crate::config::RunConfig;
use crate::report::Check;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Jordanlie,
    Octahedron,
    Unitary,
    All,
}

type SuiteResult = Result<Vec<Check>, String>;

fn err(e: jlgeom::Error) -> String {
    e.to_string()
}

pub fn run(suite: Suite, cfg: &RunConfig, parallel: bool) -> SuiteResult {
    let parts: Vec<fn(&RunConfig) -> SuiteResult> = match suite {
        Suite::Jordanlie => vec![jordanlie_suite],
        Suite::Octahedron => vec![octahedron_suite],
        Suite::Unitary => vec![unitary_suite],
        Suite::All => vec![jordanlie_suite, octahedron_suite, unitary_suite],
    };
    let results: Vec<SuiteResult> = if parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = parts.iter().map(|f| s.spawn(move || f(cfg))).collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or_else(|_| Err("suite thread panicked".into())))
                .collect()
        })
    } else {
        parts.iter().map(|f| f(cfg)).collect()
    };
    let mut checks = Vec::new();
    for r in results {
        checks.extend(r?);
    }
    Ok(checks)
}

const JL: &str = "jordanlie";

fn jordanlie_suite(cfg: &RunConfig) -> SuiteResult {
    let (p, q) = cfg.signature;
    let n = cfg.n;
    let alg = StarAlgebra::with_signature(p, q).map_err(err)?;
    let herm = MatrixJordanLie::from_star_algebra(&alg, &ConversionParams::quantum(cfg.hbar)).map_err(err)?;
    let assoc_params = ConversionParams::associative(0.5, 0.5);
    let full = MatrixJordanLie::from_associative(&StarAlgebra::new(n).map_err(err)?, &assoc_params).map_err(err)?;
    let mut out = Vec::new();

    let ax = jordanlie::check_axioms_tol(&herm.jl, cfg.trials, cfg.seed, cfg.tol).map_err(err)?;
    let name = |s: &str| format!("{s} on Herm({p},{q})");
    out.push(Check::residual(JL, &name("JL1"), "[x,[y,z]] + cyclic = 0, [x,y] = -[y,x]", ax.jl1, cfg.tol));
    out.push(Check::residual(JL, &name("JL2"), "x.y = y.x", ax.jl2, cfg.tol));
    out.push(Check::residual(JL, &name("JL3"), "[x, y.z] = [x,y].z + y.[x,z]", ax.jl3, cfg.tol));
    out.push(Check::residual(JL, &name("JL4"), "(x.y).z - x.(y.z) = kappa [[x,z],y]", ax.jl4, cfg.tol));
    out.push(Check::residual(JL, &name("Jordan identity"), "(x.y).(x.x) = x.(y.(x.x))", ax.jordan_identity, cfg.tol));
    if let Some(u) = ax.unit {
        out.push(Check::residual(JL, &name("unit"), "e.x = x, [e,x] = 0", u, cfg.tol));
    }

    let fx = jordanlie::check_axioms_tol(&full.jl, cfg.trials, cfg.seed, cfg.tol).map_err(err)?;
    out.push(
        Check::residual(JL, &format!("JL1-JL4 on M({n},C)"), "associative construction, kappa = -1", fx.max_residual, cfg.tol)
            .with_detail(format!("JL1 {:.2e}, JL2 {:.2e}, JL3 {:.2e}, JL4 {:.2e}", fx.jl1, fx.jl2, fx.jl3, fx.jl4)),
    );

    let bad = herm.jl.with_perturbed_bracket(cfg.seed, 0.05);
    let rejected = !jordanlie::check_axioms_tol(&bad, cfg.trials, cfg.seed, cfg.tol).map_err(err)?.pass;
    out.push(Check::holds(JL, "negative control", "a perturbed bracket violates the axioms", rejected));

    let mut rng = linalg::rng(cfg.seed);
    let assoc = jordanlie::to_associative(&full.jl, &assoc_params).map_err(err)?;
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.trials {
        let (a, b) = (linalg::ginibre(n, &mut rng), linalg::ginibre(n, &mut rng));
        let got = full.to_matrix(&assoc.product(&full.coords(&a), &full.coords(&b)));
        let ab = &a * &b;
        worst = worst.max((got - &ab).norm() / ab.norm().max(1.0));
    }
    out.push(Check::residual(JL, "associative round trip", "x*y = x.y + [x,y]/(2w u) recovers ab", worst, 1e-12));

    if q == 0 {
        let star = jordanlie::complexify_to_star(&herm.jl, &herm.params).map_err(err)?;
        let (mut worst_jl, mut worst_inv): (f64, f64) = (0.0, 0.0);
        let v = 1.0 / cfg.hbar;
        for _ in 0..cfg.trials {
            let x = herm.coords(&herm.random_element(&mut rng));
            let y = herm.coords(&herm.random_element(&mut rng));
            let (j, l) = star.recovered_products(0.5, v, &x, &y);
            worst_jl = worst_jl
                .max(relative_residual(&[j, herm.jl.jordan(&x, &y).scaled(-1.0)]))
                .max(relative_residual(&[l, herm.jl.lie(&x, &y).scaled(-1.0)]));
            let za = herm.complex_coords(&linalg::ginibre(n, &mut rng));
            let zb = herm.complex_coords(&linalg::ginibre(n, &mut rng));
            let lhs = star.involution(&star.product(&za, &zb));
            let rhs = star.product(&star.involution(&zb), &star.involution(&za));
            worst_inv = worst_inv.max(relative_residual(&[lhs, rhs.scaled(-1.0)]));
        }
        out.push(Check::residual(JL, "Jordan-Lie round trip", "complexify, then recover x.y and [x,y]", worst_jl, 1e-12));
        out.push(Check::residual(JL, "involution", "(ab)* = b* a* on the complexification", worst_inv, cfg.tol));
    }

    let h2 = MatrixJordanLie::from_star_algebra(&StarAlgebra::new(2).map_err(err)?, &ConversionParams::default()).map_err(err)?;
    let h4 = MatrixJordanLie::from_star_algebra(&StarAlgebra::new(4).map_err(err)?, &ConversionParams::default()).map_err(err)?;
    let t = jordanlie::tensor_product(&h2.jl, &h2.jl).map_err(err)?;
    let tax = jordanlie::check_axioms_tol(&t, cfg.trials, cfg.seed, cfg.tol).map_err(err)?;
    out.push(Check::residual(JL, "tensor axioms", "Herm(2) (x) Herm(2) satisfies JL1-JL4", tax.max_residual, cfg.tol));
    out.push(Check::residual(JL, "tensor kappa", "kappa of the product equals the common kappa", (t.kappa - h2.jl.kappa).abs(), 1e-15));
    let kr = jordanlie::kronecker_residual(&h2, &h2, &h4).map_err(err)?;
    out.push(Check::residual(JL, "tensor realization", "Kronecker map onto Herm(4) is an isomorphism", kr, cfg.tol));

    let (mut worst_r, mut worst_t): (f64, f64) = (0.0, 0.0);
    for m in [&herm, &full] {
        for _ in 0..cfg.trials {
            let (x, y, z) = (m.random_element(&mut rng), m.random_element(&mut rng), m.random_element(&mut rng));
            worst_r = worst_r.max(jordanlie::triple_systems(&m.jl, &m.coords(&x), &m.coords(&y), &m.coords(&z)).residual);
            worst_t = worst_t.max(m.triple_realization_residual(&x, &y, &z));
        }
    }
    out.push(Check::residual(JL, "triple system curvature", "R_T(x,y,z) = -2 kappa [[y,x],z]", worst_r, cfg.tol));
    out.push(Check::residual(JL, "triple system realization", "T(x,y,z) matches the associative triple product", worst_t, cfg.tol));

    let pos = alg.check_p_star(cfg.trials, cfg.seed).map_err(err)?;
    let expected = q == 0;
    out.push(
        Check::holds(JL, "positivity", "the P* property holds exactly for definite signature", pos.is_p_star == expected)
            .with_detail(format!("P* {}, {} witnesses", pos.is_p_star, pos.witnesses.len())),
    );
    Ok(out)
}

const OCT: &str = "octahedron";

fn octahedron_suite(cfg: &RunConfig) -> SuiteResult {
    let g = octahedron::generate_group(&PoleSet::standard(cfg.n).map_err(err)?).map_err(err)?;
    let mut out = Vec::new();
    out.push(
        Check::holds(OCT, "group order", "closure of the generators has 48 elements, 24 holomorphic", g.len() == 48 && g.holomorphic_count() == 24)
            .with_detail(format!("{} elements, {} holomorphic, {} rounds", g.len(), g.holomorphic_count(), g.rounds)),
    );
    let iso = octahedron::check_isomorphism(&g);
    out.push(Check::residual(
        OCT,
        "homomorphism table",
        "pole action respects all 48 x 48 products",
        iso.homomorphism_failures as f64,
        0.0,
    ));
    out.push(Check::holds(OCT, "isomorphism", "pole action is an isomorphism onto S4 x S2", iso.pass));
    out.push(Check::holds(OCT, "zeta central", "zeta commutes with every element", iso.zeta_central));
    let stab = octahedron::stabilizer_of_n(&g).map_err(err)?;
    out.push(Check::holds(OCT, "stabilizer of N", "holomorphic stabilizer of N is the cyclic dilation group of order 4", stab.pass));
    let cay = octahedron::cayley_elements(&g).map_err(err)?;
    out.push(
        Check::holds(OCT, "Cayley elements", "8 order-3 elements, each cycling the three major real forms", cay.pass)
            .with_detail(format!("{} elements, all cyclic {}", cay.elements.len(), cay.all_cyclic)),
    );
    let tr = octahedron::ns_transport(&g);
    out.push(Check::holds(OCT, "transport of (N,S)", "elements sending (N,S) to (W,O) and (O,W) exist", tr.pass));
    let com = octahedron::commutant_check(&g, cfg.trials, cfg.seed).map_err(err)?;
    out.push(
        Check::holds(OCT, "commutant", "unitary translations commute with zeta; the holomorphic commutant is the N stabilizer", com.pass)
            .with_detail(format!(
                "unitary vs zeta {:.2e}, diagonal vs zeta {:.2e}, diagonal vs antipode {:.2e}",
                com.unitary_vs_zeta, com.diagonal_vs_zeta, com.diagonal_vs_antipode
            )),
    );
    let audit = octahedron::table_diff_report(&g).map_err(err)?;
    let list = |s: AuditStatus| {
        audit
            .rows
            .iter()
            .filter(|r| r.status == s)
            .map(|r| r.listed_cycle.clone())
            .collect::<Vec<_>>()
            .join(" ")
    };
    out.push(
        Check::residual(OCT, "reference table audit", "listed cycles agree with the derived pole action", audit.mismatches as f64, 0.0)
            .with_detail(format!(
                "MATCH {}, INVERSE-MATCH {} [{}], MISMATCH {} [{}]",
                audit.matches,
                audit.inverse_matches,
                list(AuditStatus::InverseMatch),
                audit.mismatches,
                list(AuditStatus::Mismatch)
            ))
            .informational(),
    );
    Ok(out)
}

const UNI: &str = "unitary";

fn unitary_suite(cfg: &RunConfig) -> SuiteResult {
    let s = UnitarySetting::new(cfg.n).map_err(err)?;
    let mut out = Vec::new();
    let cay = unitary::cayley_check(cfg.trials, cfg.n, cfg.seed).map_err(err)?;
    out.push(Check::residual(UNI, "Cayley unitarity", "(z - i)(z + i)^-1 is unitary for hermitian z", cay.max_unitarity_defect, cfg.tol));
    out.push(Check::residual(UNI, "Cayley round trip", "inverse Cayley recovers z", cay.max_round_trip, 1e-8));

    let aff = unitary::affine_completeness_check(&s, cfg.trials, cfg.seed).map_err(err)?;
    out.push(
        Check::residual(UNI, "affine completeness", "every cell point is a torsor point", aff.violations as f64, 0.0).with_detail(format!(
            "min margin {:.3}, heavy-tailed {:.3} over {} heavy trials, redundancy disagreements {}",
            aff.min_margin, aff.min_margin_heavy, aff.heavy_tailed_trials, aff.redundancy_disagreements
        )),
    );
    let rf = unitary::real_form_report(&s, cfg.trials, cfg.seed, true).map_err(err)?;
    out.push(Check::residual(UNI, "real form sampler", "sampled tau-fixed points lie in the torsor", rf.outside_torsor as f64, 0.0)
        .with_detail(format!("{} samples, {} off the chart", rf.count, rf.nonchart_samples)));
    out.push(Check::residual(UNI, "unitary recovery", "unitary coordinate of a sample reproduces it", rf.max_recovery_defect, cfg.tol));

    let mut rng = linalg::rng(cfg.seed);
    let (mut outside, mut not_lagrangian, mut not_transversal) = (0usize, 0usize, 0usize);
    let mut involution: f64 = 0.0;
    for _ in 0..cfg.trials {
        let x = linalg::random_unitary(cfg.n, &mut rng);
        let p = unitary::embed_unitary(&AlgebraElement::new(x.clone()).map_err(err)?, &s).map_err(err)?;
        outside += usize::from(!s.in_torsor(&p));
        not_lagrangian += usize::from(!unitary::graph_is_lagrangian(&x));
        let far = unitary::antipode(&p, &s).map_err(err)?;
        not_transversal += usize::from(!p.is_transversal(&far));
        let back = unitary::antipode(&far, &s).map_err(err)?;
        let (u0, u1) = (s.unitary_coordinate(&p).map_err(err)?, s.unitary_coordinate(&back).map_err(err)?);
        involution = involution.max((u0 - u1).norm());
    }
    out.push(Check::residual(UNI, "embedding", "embedded unitaries lie in the torsor", outside as f64, 0.0));
    out.push(Check::residual(UNI, "Lagrangian graphs", "graphs of unitaries are Lagrangian", not_lagrangian as f64, 0.0));
    out.push(Check::residual(UNI, "antipode transversal", "p is transversal to its antipode", not_transversal as f64, 0.0));
    out.push(Check::residual(UNI, "antipode involution", "the antipode squares to the identity", involution, cfg.tol));
    Ok(out)
}
