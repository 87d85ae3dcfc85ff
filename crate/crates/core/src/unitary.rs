//! Unitary groups, the torsor of points fixed by the hermitian real form
//! and transversal to `N` and `S`, and Cayley transforms.
//!
//! Unitary coordinates: a torsor point `p` corresponds to the unitary `u`
//! with `p = K [(1, u)]`, where `K` is [`octahedron::unitary_chart`].
//! Under this identification `1 -> F`, `-1 -> B`, `-i -> O`, `i -> W`.

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, StarAlgebra, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, I, ONE};
use crate::octahedron::{self, PoleSet, B, F, N, O, S, W};
use crate::projline::{self, FormKind, FormMatrix, MoebiusMap, Point};

/// `U(M, A) = { A : A* M A = M = A M A* }`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryGroupSpec {
    pub alg: StarAlgebra,
    pub form: CMat,
}

impl UnitaryGroupSpec {
    /// `U(A)`, with `M = 1`.
    pub fn standard(alg: StarAlgebra) -> Self {
        UnitaryGroupSpec {
            form: linalg::identity(alg.n),
            alg,
        }
    }

    pub fn with_form(alg: StarAlgebra, form: CMat) -> Result<Self> {
        if form.nrows() != alg.n || form.ncols() != alg.n {
            return Err(Error::Dimension(format!("form must be {0}x{0}", alg.n)));
        }
        if !linalg::is_invertible(&form, alg.tol) {
            return Err(Error::Configuration("form matrix must be invertible".into()));
        }
        Ok(UnitaryGroupSpec { alg, form })
    }
}

/// Largest relative residual of `A* M A = M` and `A M A* = M`.
pub fn unitarity_residual(a: &CMat, spec: &UnitaryGroupSpec) -> f64 {
    let m = &spec.form;
    let a_star = spec.alg.adjoint_matrix(a);
    let scale = (a.norm().powi(2) * m.norm()).max(m.norm()).max(1.0);
    let left = (&a_star * m * a - m).norm();
    let right = (a * m * &a_star - m).norm();
    left.max(right) / scale
}

pub fn is_unitary(a: &AlgebraElement, spec: &UnitaryGroupSpec) -> bool {
    a.n() == spec.alg.n && unitarity_residual(a.matrix(), spec) <= spec.alg.tol
}

fn plain_unitary(u: &CMat) -> bool {
    linalg::unitarity_defect(u) <= DEFAULT_TOL * (u.nrows() as f64).max(1.0)
}

/// Poles, the hermitian real form `tau` (`z -> z*` in the standard chart)
/// and the origin `O`.
#[derive(Debug, Clone)]
pub struct UnitarySetting {
    pub poles: PoleSet,
    pub tau: MoebiusMap,
    pub origin: Point,
    chart: MoebiusMap,
    chart_inv: MoebiusMap,
    antipode: MoebiusMap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorsorMembership {
    pub tau_fixed: bool,
    pub transversal_n: bool,
    pub transversal_s: bool,
    pub margin_n: f64,
    pub margin_s: f64,
}

impl TorsorMembership {
    pub fn member(&self) -> bool {
        self.tau_fixed && self.transversal_n && self.transversal_s
    }
}

impl UnitarySetting {
    pub fn new(n: usize) -> Result<Self> {
        let poles = PoleSet::standard(n)?;
        let tau = projline::real_form_tau(poles.get(N), poles.get(S), poles.get(O))?;
        let chart = octahedron::unitary_chart(n);
        let setting = UnitarySetting {
            origin: poles.get(O).clone(),
            chart_inv: chart.inverse(),
            chart,
            antipode: projline::dilation(-ONE, poles.get(N), poles.get(S))?,
            tau,
            poles,
        };
        if !setting.tau.apply(setting.poles.get(N))?.equals(setting.poles.get(S))
            || !setting.tau.apply(setting.poles.get(S))?.equals(setting.poles.get(N))
        {
            return Err(Error::Consistency("tau does not exchange N and S".into()));
        }
        for i in [O, W, F, B] {
            if !setting.membership(setting.poles.get(i))?.member() {
                return Err(Error::Consistency(format!(
                    "pole {} is not in the torsor",
                    octahedron::POLE_NAMES[i]
                )));
            }
        }
        Ok(setting)
    }

    pub fn n(&self) -> usize {
        self.poles.n()
    }

    pub fn north(&self) -> &Point {
        self.poles.get(N)
    }

    pub fn south(&self) -> &Point {
        self.poles.get(S)
    }

    pub fn membership(&self, p: &Point) -> Result<TorsorMembership> {
        let margin_n = p.transversality_margin(self.north());
        let margin_s = p.transversality_margin(self.south());
        Ok(TorsorMembership {
            tau_fixed: self.tau.apply(p)?.equals(p),
            transversal_n: p.is_transversal(self.north()),
            transversal_s: p.is_transversal(self.south()),
            margin_n,
            margin_s,
        })
    }

    pub fn in_torsor(&self, p: &Point) -> bool {
        self.membership(p).is_ok_and(|m| m.member())
    }

    /// The point with unitary coordinate `u` (no unitarity check).
    pub fn point_of(&self, u: &CMat) -> Result<Point> {
        self.chart.apply(&Point::from_chart(u))
    }

    /// Unitary coordinate of a point transversal to `S`.
    pub fn unitary_coordinate(&self, p: &Point) -> Result<CMat> {
        self.chart_inv.apply(p)?.chart_value()
    }

    pub fn antipode_map(&self) -> &MoebiusMap {
        &self.antipode
    }
}

/// `x -> K [(1, x)]` for unitary `x`.
pub fn embed_unitary(x: &AlgebraElement, setting: &UnitarySetting) -> Result<Point> {
    if x.n() != setting.n() {
        return Err(Error::Dimension(format!("expected n = {}", setting.n())));
    }
    if !plain_unitary(x.matrix()) {
        return Err(Error::Precondition("embed_unitary needs a unitary element".into()));
    }
    setting.point_of(x.matrix())
}

/// The graph `[(1, x)]` before the change of chart; Lagrangian for the
/// hyperbolic form `diag(-1, 1)` exactly when `x` is unitary.
pub fn graph_point(x: &CMat) -> Point {
    Point::from_chart(x)
}

pub fn graph_is_lagrangian(x: &CMat) -> bool {
    projline::is_lagrangian(&graph_point(x), &FormMatrix::standard(FormKind::I11, x.nrows()))
}

fn hermitian_input(z: &AlgebraElement) -> Result<()> {
    let m = z.matrix();
    let scale = m.norm().max(1.0);
    if (m - m.adjoint()).norm() > DEFAULT_TOL * scale {
        return Err(Error::Precondition("cayley needs a hermitian element".into()));
    }
    Ok(())
}

/// `(z - i)(z + i)^-1`
pub fn cayley(z: &AlgebraElement) -> Result<AlgebraElement> {
    hermitian_input(z)?;
    let n = z.n();
    let zm = z.matrix();
    let shift = linalg::scalar(n, I);
    let den = linalg::inverse(&(zm + &shift), 0.0)?;
    AlgebraElement::new((zm - &shift) * den)
}

/// Inverse through the square of the order-3 Cayley matrix:
/// `z = -i (u + 1)(u - 1)^-1`.
pub fn inverse_cayley(u: &AlgebraElement) -> Result<AlgebraElement> {
    let um = u.matrix();
    if !plain_unitary(um) {
        return Err(Error::Precondition("inverse_cayley needs a unitary element".into()));
    }
    let n = u.n();
    let one = linalg::identity(n);
    let den = um - &one;
    let (smin, _) = linalg::singular_extremes(&den);
    if smin <= DEFAULT_TOL {
        return Err(Error::CayleyPole);
    }
    let den_inv = linalg::inverse(&den, 0.0)?;
    let z = (um + &one) * den_inv * c(0.0, -1.0);
    // Remove the rounding-level skew part.
    AlgebraElement::new((&z + z.adjoint()) * c(0.5, 0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineCompletenessReport {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub heavy_tailed_trials: usize,
    pub violations: usize,
    pub not_tau_fixed: usize,
    pub min_margin: f64,
    pub min_margin_heavy: f64,
    /// Samples where transversality to `N` and to `S` disagreed.
    pub redundancy_disagreements: usize,
    pub pass: bool,
}

/// Left translation by the unitary `g` in unitary coordinates, `u -> g u`.
pub fn torsor_left(g: &CMat) -> MoebiusMap {
    octahedron::left_translation(g)
}

/// Right translation `u -> u g`.
pub fn torsor_right(g: &CMat) -> MoebiusMap {
    octahedron::right_translation(g)
}

/// The chart map of the affine cell at `a`: sends `O` to `a` and `W` to the
/// antipode of `a`, commuting with `tau`.
pub fn cell_map(a_coord: &CMat) -> MoebiusMap {
    torsor_left(&(a_coord * I))
}

/// Heavy-tailed hermitian sample: a Gaussian hermitian matrix scaled by a
/// Cauchy variate.
pub fn heavy_tailed_hermitian(n: usize, rng: &mut linalg::SeededRng) -> CMat {
    linalg::random_hermitian(n, rng) * c(linalg::cauchy(rng), 0.0)
}

/// Odd trials use heavy-tailed chart coordinates.
pub fn affine_completeness_check(setting: &UnitarySetting, trials: usize, seed: u64) -> Result<AffineCompletenessReport> {
    if trials == 0 {
        return Err(Error::Configuration("trials must be at least 1".into()));
    }
    let n = setting.n();
    let mut rng = linalg::rng(seed);
    let mut violations = 0;
    let mut not_tau_fixed = 0;
    let mut disagreements = 0;
    let mut min_margin = f64::INFINITY;
    let mut min_margin_heavy = f64::INFINITY;
    let mut heavy = 0;
    for k in 0..trials {
        let a = linalg::random_unitary(n, &mut rng);
        let h = if k % 2 == 1 {
            heavy += 1;
            heavy_tailed_hermitian(n, &mut rng)
        } else {
            linalg::random_hermitian(n, &mut rng)
        };
        let x = cell_map(&a).apply(&Point::from_chart(&h))?;
        let m = setting.membership(&x)?;
        if !m.tau_fixed {
            not_tau_fixed += 1;
        }
        if !(m.transversal_n && m.transversal_s) {
            violations += 1;
        }
        if m.transversal_n != m.transversal_s {
            disagreements += 1;
        }
        let margin = m.margin_n.min(m.margin_s);
        if k % 2 == 1 {
            min_margin_heavy = min_margin_heavy.min(margin);
        } else {
            min_margin = min_margin.min(margin);
        }
    }
    Ok(AffineCompletenessReport {
        n,
        trials,
        seed,
        heavy_tailed_trials: heavy,
        violations,
        not_tau_fixed,
        min_margin,
        min_margin_heavy,
        redundancy_disagreements: disagreements,
        pass: violations == 0 && not_tau_fixed == 0 && disagreements == 0,
    })
}

/// Frame `(cos T g, sin T g)` for hermitian `T` and invertible `g`.
pub fn real_form_point(theta: &CMat, g: &CMat) -> Result<Point> {
    let cos = linalg::herm_fn(theta, |t| c(t.cos(), 0.0));
    let sin = linalg::herm_fn(theta, |t| c(t.sin(), 0.0));
    Point::from_frame(&linalg::vstack(&(cos * g), &(sin * g)))
}

/// Points of the real form, forcing an eigenvalue `pi/2` of `T` in every
/// other sample when `include_nonchart` is set.
pub fn sample_real_form(setting: &UnitarySetting, count: usize, seed: u64, include_nonchart: bool) -> Result<Vec<Point>> {
    if count == 0 {
        return Err(Error::Configuration("count must be at least 1".into()));
    }
    let n = setting.n();
    let mut rng = linalg::rng(seed);
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let h = linalg::random_hermitian(n, &mut rng);
        let (mut vals, vecs) = linalg::herm_eig(&h);
        if include_nonchart && k % 2 == 1 {
            vals[0] = std::f64::consts::FRAC_PI_2;
        }
        let d = linalg::diag(&vals.iter().map(|&v| c(v, 0.0)).collect::<Vec<_>>());
        let theta = &vecs * d * vecs.adjoint();
        let g = loop {
            let g = linalg::ginibre(n, &mut rng);
            if linalg::is_invertible(&g, DEFAULT_TOL) {
                break g;
            }
        };
        out.push(real_form_point(&theta, &g)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealFormReport {
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    pub nonchart_samples: usize,
    pub outside_torsor: usize,
    pub max_recovery_defect: f64,
    pub pass: bool,
}

/// Every sample must be in the torsor, and its unitary coordinate unitary.
pub fn real_form_report(setting: &UnitarySetting, count: usize, seed: u64, include_nonchart: bool) -> Result<RealFormReport> {
    let pts = sample_real_form(setting, count, seed, include_nonchart)?;
    let mut outside = 0;
    let mut nonchart = 0;
    let mut max_defect: f64 = 0.0;
    for p in &pts {
        if p.chart_value().is_err() {
            nonchart += 1;
        }
        if !setting.in_torsor(p) {
            outside += 1;
            continue;
        }
        let u = setting.unitary_coordinate(p)?;
        max_defect = max_defect.max(linalg::unitarity_defect(&u));
    }
    Ok(RealFormReport {
        n: setting.n(),
        count,
        seed,
        nonchart_samples: nonchart,
        outside_torsor: outside,
        max_recovery_defect: max_defect,
        pass: outside == 0 && max_defect <= 1e-9,
    })
}

/// `(-1)_{N,S}`, in the standard chart `z -> -z^-1`.
pub fn antipode(p: &Point, setting: &UnitarySetting) -> Result<Point> {
    setting.antipode.apply(p)
}

/// A triple `(h, w; p)` with `w` transversal to `p` and `h` transversal to
/// the antipode of `p`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Obstate {
    pub h: Point,
    pub w: Point,
    pub p: Point,
}

impl Obstate {
    /// Transversality margins of `(w, p)` and `(h, antipode(p))`.
    pub fn margins(&self, setting: &UnitarySetting) -> Result<(f64, f64)> {
        let far = antipode(&self.p, setting)?;
        Ok((
            self.w.transversality_margin(&self.p),
            self.h.transversality_margin(&far),
        ))
    }
}

pub fn make_obstate(h: &Point, w: &Point, p: &Point, setting: &UnitarySetting) -> Result<Obstate> {
    let n = setting.n();
    if h.n() != n || w.n() != n || p.n() != n {
        return Err(Error::Dimension(format!("obstate points must have n = {n}")));
    }
    if !w.is_transversal(p) {
        return Err(Error::not_transversal("w", "p"));
    }
    let far = antipode(p, setting)?;
    if !h.is_transversal(&far) {
        return Err(Error::not_transversal("h", "antipode(p)"));
    }
    Ok(Obstate {
        h: h.clone(),
        w: w.clone(),
        p: p.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CayleyReport {
    pub trials: usize,
    pub seed: u64,
    pub max_unitarity_defect: f64,
    pub max_round_trip: f64,
    pub pass: bool,
}

/// `cayley` on random hermitian `z` of sizes `1..=max_n`, cycling sizes.
pub fn cayley_check(trials: usize, max_n: usize, seed: u64) -> Result<CayleyReport> {
    if trials == 0 || max_n == 0 {
        return Err(Error::Configuration("trials and max_n must be at least 1".into()));
    }
    let mut rng = linalg::rng(seed);
    let mut defect: f64 = 0.0;
    let mut round: f64 = 0.0;
    for k in 0..trials {
        let n = 1 + k % max_n;
        let z = linalg::random_hermitian(n, &mut rng) * c(1.0 + 4.0 * linalg::uniform(&mut rng, 0.0, 1.0), 0.0);
        let u = cayley(&AlgebraElement::new(z.clone())?)?;
        defect = defect.max(linalg::unitarity_defect(u.matrix()));
        match inverse_cayley(&u) {
            Ok(back) => round = round.max((back.matrix() - &z).norm() / z.norm().max(1.0)),
            Err(Error::CayleyPole) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(CayleyReport {
        trials,
        seed,
        max_unitarity_defect: defect,
        max_round_trip: round,
        pass: defect <= 1e-9 && round <= 1e-9,
    })
}
