//! Tangent and cotangent vectors on the unitary torsor, left-invariant
//! fields, the geometric Schrödinger flow and the three pictures of time
//! evolution.
//!
//! Points of the torsor are handled through their unitary coordinates. At a
//! foot with coordinate `u`, a point with coordinate `y` has tangent value
//! `i(u - y)(u + y)^-1` (origin `p`, infinity the antipode) and cotangent
//! value `-i(u + y)(u - y)^-1` (origin the antipode, infinity `p`). At `O`
//! these are the standard chart value `h` of `[(1, h)]` and its inverse.

use serde::{Deserialize, Serialize};

use crate::algebra::DEFAULT_TOL;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, I};
use crate::projline::{self, Point};
use crate::unitary::{self, UnitarySetting};

/// `v -> hbar v`
pub fn quantum_identify(v: &CMat, hbar: f64) -> Result<CMat> {
    check_hbar(hbar)?;
    Ok(v * c(hbar, 0.0))
}

/// `v -> v / hbar`
pub fn quantum_unidentify(v: &CMat, hbar: f64) -> Result<CMat> {
    check_hbar(hbar)?;
    Ok(v * c(1.0 / hbar, 0.0))
}

fn check_hbar(hbar: f64) -> Result<()> {
    if hbar == 0.0 || !hbar.is_finite() {
        return Err(Error::Configuration(format!("hbar must be finite and nonzero, got {hbar}")));
    }
    Ok(())
}

fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * c(0.5, 0.0)
}

fn require_hermitian(m: &CMat, what: &str) -> Result<()> {
    if (m - m.adjoint()).norm() > DEFAULT_TOL * m.norm().max(1.0) {
        return Err(Error::Precondition(format!("{what} must be hermitian")));
    }
    Ok(())
}

fn require_foot(setting: &UnitarySetting, p: &Point) -> Result<CMat> {
    if !setting.in_torsor(p) {
        return Err(Error::Domain("foot point is not in the torsor".into()));
    }
    setting.unitary_coordinate(p)
}

fn shifted_inverse(m: &CMat, shift: num_complex::Complex64) -> Result<CMat> {
    let n = m.nrows();
    linalg::inverse(&(m + linalg::scalar(n, shift)), 0.0)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TangentVector {
    pub foot: Point,
    #[serde(with = "linalg::serde_cmat")]
    pub value: CMat,
    pub hbar: f64,
}

impl TangentVector {
    pub fn new(foot: Point, value: CMat, hbar: f64, setting: &UnitarySetting) -> Result<Self> {
        check_hbar(hbar)?;
        require_foot(setting, &foot)?;
        require_hermitian(&value, "tangent value")?;
        if value.nrows() != foot.n() {
            return Err(Error::Dimension("value and foot sizes differ".into()));
        }
        Ok(TangentVector { foot, value, hbar })
    }

    /// The tangent vector at `p` represented by the point `a`, which must be
    /// transversal to the antipode of `p`.
    pub fn from_pair(a: &Point, p: &Point, hbar: f64, setting: &UnitarySetting) -> Result<Self> {
        let u = require_foot(setting, p)?;
        let far = unitary::antipode(p, setting)?;
        if !a.is_transversal(&far) {
            return Err(Error::not_transversal("a", "antipode(p)"));
        }
        let y = setting.unitary_coordinate(a)?;
        let value = (&u - &y) * linalg::inverse(&(&u + &y), 0.0)? * I;
        TangentVector::new(p.clone(), hermitian_part(&value), hbar, setting)
    }

    /// The point `a` with `(a, foot)` representing this vector.
    pub fn as_point(&self, setting: &UnitarySetting) -> Result<Point> {
        let u = setting.unitary_coordinate(&self.foot)?;
        // value (u + y) = i (u - y)
        let y = shifted_inverse(&self.value, I)? * (linalg::scalar(u.nrows(), I) - &self.value) * &u;
        setting.point_of(&y)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CotangentVector {
    pub foot: Point,
    #[serde(with = "linalg::serde_cmat")]
    pub value: CMat,
}

impl CotangentVector {
    pub fn new(foot: Point, value: CMat, setting: &UnitarySetting) -> Result<Self> {
        require_foot(setting, &foot)?;
        require_hermitian(&value, "cotangent value")?;
        if value.nrows() != foot.n() {
            return Err(Error::Dimension("value and foot sizes differ".into()));
        }
        Ok(CotangentVector { foot, value })
    }

    /// The cotangent vector at `p` represented by the point `d`, which must
    /// be transversal to `p`.
    pub fn from_pair(d: &Point, p: &Point, setting: &UnitarySetting) -> Result<Self> {
        let u = require_foot(setting, p)?;
        if !d.is_transversal(p) {
            return Err(Error::not_transversal("d", "p"));
        }
        let y = setting.unitary_coordinate(d)?;
        let value = (&u + &y) * linalg::inverse(&(&u - &y), 0.0)? * c(0.0, -1.0);
        CotangentVector::new(p.clone(), hermitian_part(&value), setting)
    }

    pub fn as_point(&self, setting: &UnitarySetting) -> Result<Point> {
        let u = setting.unitary_coordinate(&self.foot)?;
        // value (u - y) = -i (u + y)
        let n = u.nrows();
        let y = shifted_inverse(&self.value, -I)? * (&self.value + linalg::scalar(n, I)) * &u;
        setting.point_of(&y)
    }
}

/// `tr CR(p, antipode(p); v, phi)`
pub fn pairing(v: &TangentVector, phi: &CotangentVector, setting: &UnitarySetting) -> Result<num_complex::Complex64> {
    if !v.foot.equals(&phi.foot) {
        return Err(Error::Domain("tangent and cotangent vectors have different feet".into()));
    }
    let p = &v.foot;
    let far = unitary::antipode(p, setting)?;
    let cr = projline::cross_ratio(p, &far, &v.as_point(setting)?, &phi.as_point(setting)?)?;
    Ok(linalg::trace(&cr))
}

/// The field generated by the hermitian `xi`; at a point with unitary
/// coordinate `u` its value is `u xi u^-1 / 2`, the velocity of `u e^{i t xi}`.
#[derive(Debug, Clone)]
pub struct LeftInvariantField {
    pub generator: CMat,
    pub hbar: f64,
    pub setting: UnitarySetting,
}

impl LeftInvariantField {
    pub fn new(generator: CMat, hbar: f64, setting: &UnitarySetting) -> Result<Self> {
        check_hbar(hbar)?;
        require_hermitian(&generator, "generator")?;
        if generator.nrows() != setting.n() {
            return Err(Error::Dimension("generator size differs from the setting".into()));
        }
        Ok(LeftInvariantField {
            generator,
            hbar,
            setting: setting.clone(),
        })
    }

    pub fn evaluate(&self, p: &Point) -> Result<TangentVector> {
        let u = require_foot(&self.setting, p)?;
        let value = self.value_at(&u);
        TangentVector::new(p.clone(), hermitian_part(&value), self.hbar, &self.setting)
    }

    /// Tangent value at unitary coordinate `u`.
    pub fn value_at(&self, u: &CMat) -> CMat {
        u * &self.generator * u.adjoint() * c(0.5, 0.0)
    }

    /// Matrix velocity `u (i xi / hbar)` of the flow at `u`.
    pub fn velocity(&self, u: &CMat) -> CMat {
        u * &self.generator * c(0.0, 1.0 / self.hbar)
    }

    /// The field of a Hamiltonian point `h` observed from `p`: generated by
    /// `2 u^-1 v u`, where `v` is the tangent value of `h` at `p`.
    pub fn from_observable(h: &Point, p: &Point, hbar: f64, setting: &UnitarySetting) -> Result<Self> {
        left_invariant_field(&TangentVector::from_pair(h, p, hbar, setting)?, setting)
    }
}

pub fn left_invariant_field(v: &TangentVector, setting: &UnitarySetting) -> Result<LeftInvariantField> {
    let u = require_foot(setting, &v.foot)?;
    let xi = u.adjoint() * &v.value * &u * c(2.0, 0.0);
    LeftInvariantField::new(hermitian_part(&xi), v.hbar, setting)
}

/// Field with generator `i [xi_a, xi_b]`, matching `[i xi_a, i xi_b]`.
pub fn field_bracket(a: &LeftInvariantField, b: &LeftInvariantField) -> Result<LeftInvariantField> {
    if a.setting.n() != b.setting.n() || a.hbar != b.hbar {
        return Err(Error::Configuration("fields belong to different settings".into()));
    }
    let g = linalg::commutator(&a.generator, &b.generator) * I;
    LeftInvariantField::new(hermitian_part(&g), a.hbar, &a.setting)
}

/// `DY(X) - DX(Y)` at `u` for the matrix velocities, by central differences.
pub fn finite_difference_bracket(a: &LeftInvariantField, b: &LeftInvariantField, u: &CMat, eps: f64) -> CMat {
    let e = c(eps, 0.0);
    let two_e = c(2.0 * eps, 0.0);
    let xa = a.velocity(u);
    let xb = b.velocity(u);
    let d_b = (b.velocity(&(u + &xa * e)) - b.velocity(&(u - &xa * e))) / two_e;
    let d_a = (a.velocity(&(u + &xb * e)) - a.velocity(&(u - &xb * e))) / two_e;
    d_b - d_a
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowMethod {
    ClosedForm,
    Rk4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowResult {
    pub times: Vec<f64>,
    pub points: Vec<linalg::MatrixData>,
    /// Energy: the pairing of the field value with the transported dual of
    /// its value at the start.
    pub expectations: Vec<f64>,
    pub method: FlowMethod,
}

impl FlowResult {
    pub fn matrices(&self) -> Vec<CMat> {
        self.points
            .iter()
            .map(|m| CMat::try_from(m).expect("stored matrices are well formed"))
            .collect()
    }

    pub fn max_unitarity_defect(&self) -> f64 {
        self.matrices().iter().map(linalg::unitarity_defect).fold(0.0, f64::max)
    }

    pub fn max_deviation(&self, other: &FlowResult) -> f64 {
        self.matrices()
            .iter()
            .zip(other.matrices())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn energies(field: &LeftInvariantField, points: &[CMat]) -> Result<Vec<f64>> {
    let setting = &field.setting;
    let Some(first) = points.first() else {
        return Ok(Vec::new());
    };
    let p0 = setting.point_of(first)?;
    let phi0 = CotangentVector::new(p0, hermitian_part(&field.value_at(first)), setting)?;
    let d0 = setting.unitary_coordinate(&phi0.as_point(setting)?)?;
    let x0_inv = first.adjoint();
    points
        .iter()
        .map(|x| {
            let p = setting.point_of(x)?;
            let v = field.evaluate(&p)?;
            // Right translation by x0^-1 x carries the start to x.
            let phi = CotangentVector::from_pair(&setting.point_of(&(&d0 * &x0_inv * x))?, &p, setting)?;
            Ok(pairing(&v, &phi, setting)?.re)
        })
        .collect()
}

fn check_start(x0: &CMat, setting: &UnitarySetting) -> Result<()> {
    if x0.nrows() != setting.n() || linalg::unitarity_defect(x0) > 1e-9 {
        return Err(Error::Precondition("start point must be a unitary of the setting size".into()));
    }
    Ok(())
}

/// `x0 e^{i t xi / hbar}` on the grid.
pub fn flow_closed_form(field: &LeftInvariantField, x0: &CMat, t_grid: &[f64]) -> Result<FlowResult> {
    check_start(x0, &field.setting)?;
    let points: Vec<CMat> = t_grid
        .iter()
        .map(|&t| x0 * linalg::expm_i_herm(&field.generator, t / field.hbar))
        .collect();
    Ok(FlowResult {
        times: t_grid.to_vec(),
        expectations: energies(field, &points)?,
        points: points.iter().map(linalg::MatrixData::from).collect(),
        method: FlowMethod::ClosedForm,
    })
}

pub const DEFAULT_STEP: f64 = 1e-2;
pub const MAX_DRIFT: f64 = 1e-3;

/// Classical RK4 for `dx/dt = x (i xi / hbar)` with polar reprojection after
/// every step; each grid interval is split into equal substeps `<= step`.
pub fn flow_rk4(field: &LeftInvariantField, x0: &CMat, t_grid: &[f64], step: f64) -> Result<FlowResult> {
    if step.is_nan() || step <= 0.0 || !step.is_finite() {
        return Err(Error::Configuration("step must be positive".into()));
    }
    check_start(x0, &field.setting)?;
    let mut x = x0.clone();
    let mut t_prev = 0.0;
    let mut points = Vec::with_capacity(t_grid.len());
    let half = c(0.5, 0.0);
    for &t in t_grid {
        let span = t - t_prev;
        let steps = (span.abs() / step).ceil().max(if span == 0.0 { 0.0 } else { 1.0 }) as usize;
        if steps > 0 {
            let h = span / steps as f64;
            let hc = c(h, 0.0);
            for _ in 0..steps {
                let k1 = field.velocity(&x);
                let k2 = field.velocity(&(&x + &k1 * hc * half));
                let k3 = field.velocity(&(&x + &k2 * hc * half));
                let k4 = field.velocity(&(&x + &k3 * hc));
                let next = &x + (k1 + k2 * c(2.0, 0.0) + k3 * c(2.0, 0.0) + k4) * c(h / 6.0, 0.0);
                let drift = linalg::unitarity_defect(&next);
                if drift > MAX_DRIFT || !drift.is_finite() {
                    return Err(Error::Integration(format!(
                        "unitarity drift {drift:.3e} exceeds {MAX_DRIFT:.0e}; reduce the step"
                    )));
                }
                x = linalg::polar_unitary(&next);
            }
        }
        t_prev = t;
        points.push(x.clone());
    }
    Ok(FlowResult {
        times: t_grid.to_vec(),
        expectations: energies(field, &points)?,
        points: points.iter().map(linalg::MatrixData::from).collect(),
        method: FlowMethod::Rk4,
    })
}

/// `e^{-itH/hbar} W e^{itH/hbar}`
pub fn schrodinger_reference(w: &CMat, h: &CMat, t: f64, hbar: f64) -> Result<CMat> {
    check_hbar(hbar)?;
    require_hermitian(w, "density matrix")?;
    require_hermitian(h, "Hamiltonian")?;
    let (vals, _) = linalg::herm_eig(w);
    let tr = linalg::trace(w);
    if vals.first().is_some_and(|&v| v < -DEFAULT_TOL) || (tr - c(1.0, 0.0)).norm() > DEFAULT_TOL {
        return Err(Error::Precondition("density matrix must be positive with trace one".into()));
    }
    let u = linalg::expm_i_herm(h, -t / hbar);
    Ok(&u * w * u.adjoint())
}

/// `e^{itH/hbar} A e^{-itH/hbar}`
pub fn heisenberg_reference(a: &CMat, h: &CMat, t: f64, hbar: f64) -> Result<CMat> {
    check_hbar(hbar)?;
    let u = linalg::expm_i_herm(h, t / hbar);
    Ok(&u * a * u.adjoint())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PictureSample {
    pub t: f64,
    pub schrodinger: f64,
    pub heisenberg: f64,
    pub geometric: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PictureReport {
    pub n: usize,
    pub hbar: f64,
    pub samples: Vec<PictureSample>,
    pub max_schrodinger_heisenberg: f64,
    pub max_schrodinger_geometric: f64,
    pub max_unitarity_defect: f64,
}

impl PictureReport {
    pub fn max_deviation(&self) -> f64 {
        self.max_schrodinger_heisenberg.max(self.max_schrodinger_geometric)
    }
}

/// The three pictures for the generator `xi` at `p`, with observable `v`
/// and state `phi`. The Hamiltonian seen at `p` is `H = u xi u^-1`.
///
/// (i) `tr(A W_t)` with `W_t = e^{-itH} W e^{itH}`; (ii) `tr(A_t W)` with
/// `A_t = e^{itH} A e^{-itH}`; (iii) the pairing at `q = u e^{it xi}` of
/// the left-transported `v` and the right-transported `phi`.
pub fn picture_equivalence_check(
    field: &LeftInvariantField,
    v: &TangentVector,
    phi: &CotangentVector,
    t_grid: &[f64],
) -> Result<PictureReport> {
    let setting = &field.setting;
    if !v.foot.equals(&phi.foot) {
        return Err(Error::Domain("observable and state have different feet".into()));
    }
    let hbar = field.hbar;
    let u = require_foot(setting, &v.foot)?;
    let ham = &u * &field.generator * u.adjoint();
    let a = &v.value;
    let w = &phi.value;
    let v_pt = setting.unitary_coordinate(&v.as_point(setting)?)?;
    let phi_pt = setting.unitary_coordinate(&phi.as_point(setting)?)?;
    let u_inv = u.adjoint();

    let mut samples = Vec::with_capacity(t_grid.len());
    let mut max_sh: f64 = 0.0;
    let mut max_sg: f64 = 0.0;
    let mut max_defect: f64 = 0.0;
    for &t in t_grid {
        let w_t = {
            let e = linalg::expm_i_herm(&ham, -t / hbar);
            &e * w * e.adjoint()
        };
        let schrodinger = linalg::trace(&(a * &w_t)).re;
        let heisenberg = linalg::trace(&(heisenberg_reference(a, &ham, t, hbar)? * w)).re;

        let q = &u * linalg::expm_i_herm(&field.generator, t / hbar);
        max_defect = max_defect.max(linalg::unitarity_defect(&q));
        let q_pt = setting.point_of(&q)?;
        // L_{q,p}(z) = q p^-1 z and R_{q,p}(z) = z p^-1 q.
        let left = &q * &u_inv;
        let right = &u_inv * &q;
        let v_t = TangentVector::from_pair(&setting.point_of(&(&left * &v_pt))?, &q_pt, hbar, setting)?;
        let phi_t = CotangentVector::from_pair(&setting.point_of(&(&phi_pt * &right))?, &q_pt, setting)?;
        let geometric = pairing(&v_t, &phi_t, setting)?.re;

        max_sh = max_sh.max((schrodinger - heisenberg).abs());
        max_sg = max_sg.max((schrodinger - geometric).abs());
        samples.push(PictureSample {
            t,
            schrodinger,
            heisenberg,
            geometric,
        });
    }
    Ok(PictureReport {
        n: setting.n(),
        hbar,
        samples,
        max_schrodinger_heisenberg: max_sh,
        max_schrodinger_geometric: max_sg,
        max_unitarity_defect: max_defect,
    })
}

/// `n + 1` equally spaced times on `[0, t_max]`.
pub fn uniform_grid(t_max: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|k| t_max * k as f64 / steps.max(1) as f64).collect()
}

/// Random density matrix `g g* / tr(g g*)`.
pub fn random_density(n: usize, rng: &mut linalg::SeededRng) -> CMat {
    let g = linalg::ginibre(n, rng);
    let w = &g * g.adjoint();
    let tr = linalg::trace(&w);
    hermitian_part(&(w / tr))
}

/// Randomly drawn data for the three pictures.
#[derive(Debug, Clone)]
pub struct PictureSetup {
    pub field: LeftInvariantField,
    pub observable: TangentVector,
    pub state: CotangentVector,
}

/// Generator, foot, observable and density state from one seed. The foot is
/// a random torsor point.
pub fn random_picture_setup(n: usize, hbar: f64, seed: u64) -> Result<PictureSetup> {
    let setting = UnitarySetting::new(n)?;
    let mut rng = linalg::rng(seed);
    let foot = setting.point_of(&linalg::random_unitary(n, &mut rng))?;
    let xi = linalg::random_hermitian(n, &mut rng);
    let field = LeftInvariantField::new(xi, hbar, &setting)?;
    let observable = TangentVector::new(foot.clone(), linalg::random_hermitian(n, &mut rng), hbar, &setting)?;
    let state = CotangentVector::new(foot, random_density(n, &mut rng), &setting)?;
    Ok(PictureSetup {
        field,
        observable,
        state,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceReport {
    pub hbar: f64,
    pub max_flow_deviation: f64,
    pub max_picture_deviation: f64,
    pub pass: bool,
}

/// Runs the pipeline with `hbar` at times `hbar t` and compares with
/// `hbar = 1` at times `t`. The Hamiltonian is held fixed; only the
/// exponent sees `hbar`.
pub fn hbar_covariance_check(setup: &PictureSetup, hbar: f64, t_grid: &[f64]) -> Result<CovarianceReport> {
    check_hbar(hbar)?;
    let setting = &setup.field.setting;
    let base = LeftInvariantField::new(setup.field.generator.clone(), 1.0, setting)?;
    let scaled = LeftInvariantField::new(setup.field.generator.clone(), hbar, setting)?;
    let scaled_grid: Vec<f64> = t_grid.iter().map(|t| t * hbar).collect();
    let x0 = setting.unitary_coordinate(&setup.observable.foot)?;
    let f1 = flow_closed_form(&base, &x0, t_grid)?;
    let f2 = flow_closed_form(&scaled, &x0, &scaled_grid)?;
    let p1 = picture_equivalence_check(&base, &setup.observable, &setup.state, t_grid)?;
    let p2 = picture_equivalence_check(&scaled, &setup.observable, &setup.state, &scaled_grid)?;
    let max_picture = p1
        .samples
        .iter()
        .zip(&p2.samples)
        .map(|(a, b)| {
            (a.schrodinger - b.schrodinger)
                .abs()
                .max((a.heisenberg - b.heisenberg).abs())
                .max((a.geometric - b.geometric).abs())
        })
        .fold(0.0, f64::max);
    let max_flow = f1.max_deviation(&f2);
    Ok(CovarianceReport {
        hbar,
        max_flow_deviation: max_flow,
        max_picture_deviation: max_picture,
        pass: max_flow <= 1e-9 && max_picture <= 1e-9,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    pub observed_orders: Vec<f64>,
}

/// RK4 error against the closed form at `t_max` for successive halvings.
pub fn rk4_convergence(field: &LeftInvariantField, x0: &CMat, t_max: f64, first_step: f64, halvings: usize) -> Result<ConvergenceReport> {
    let exact = flow_closed_form(field, x0, &[t_max])?;
    let mut steps = Vec::new();
    let mut errors = Vec::new();
    for k in 0..=halvings {
        let h = first_step / 2f64.powi(k as i32);
        let approx = flow_rk4(field, x0, &[t_max], h)?;
        steps.push(h);
        errors.push(approx.max_deviation(&exact));
    }
    let observed_orders = errors.windows(2).map(|e| (e[0] / e[1]).log2()).collect();
    Ok(ConvergenceReport {
        steps,
        errors,
        observed_orders,
    })
}
