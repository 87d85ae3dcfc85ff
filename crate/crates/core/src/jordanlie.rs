//! Jordan-Lie algebras as structure-constant tensors, the passage to and
//! from (star-)associative products, tensor products and triple systems.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{StarAlgebra, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat};

/// Minimal vector-space interface so associators can be taken for matrices
/// and coordinate vectors alike.
pub trait LinearSpace: Clone {
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn scaled(&self, k: f64) -> Self;
    fn size(&self) -> f64;
}

impl LinearSpace for Vec<f64> {
    fn plus(&self, other: &Self) -> Self {
        self.iter().zip(other).map(|(a, b)| a + b).collect()
    }
    fn minus(&self, other: &Self) -> Self {
        self.iter().zip(other).map(|(a, b)| a - b).collect()
    }
    fn scaled(&self, k: f64) -> Self {
        self.iter().map(|a| k * a).collect()
    }
    fn size(&self) -> f64 {
        self.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl LinearSpace for Vec<Complex64> {
    fn plus(&self, other: &Self) -> Self {
        self.iter().zip(other).map(|(a, b)| a + b).collect()
    }
    fn minus(&self, other: &Self) -> Self {
        self.iter().zip(other).map(|(a, b)| a - b).collect()
    }
    fn scaled(&self, k: f64) -> Self {
        self.iter().map(|a| a * k).collect()
    }
    fn size(&self) -> f64 {
        self.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}

impl LinearSpace for CMat {
    fn plus(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn minus(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn scaled(&self, k: f64) -> Self {
        self.mul(c(k, 0.0))
    }
    fn size(&self) -> f64 {
        linalg::max_abs(self)
    }
}

/// `A(x, y, z) = (xy)z - x(yz)`.
pub fn associator<T: LinearSpace>(product: impl Fn(&T, &T) -> T, x: &T, y: &T, z: &T) -> T {
    product(&product(x, y), z).minus(&product(x, &product(y, z)))
}

/// `J(x, y) = xy + yx` and `L(x, y) = xy - yx`, so that `xy = (J + L) / 2`.
pub fn split_sym_skew<T, F>(product: F) -> (impl Fn(&T, &T) -> T, impl Fn(&T, &T) -> T)
where
    T: LinearSpace,
    F: Fn(&T, &T) -> T + Clone,
{
    let p = product.clone();
    let sym = move |x: &T, y: &T| p(x, y).plus(&p(y, x));
    let skew = move |x: &T, y: &T| product(x, y).minus(&product(y, x));
    (sym, skew)
}

/// `max |sum| / max |term|`, zero when every term vanishes.
pub fn relative_residual<T: LinearSpace>(terms: &[T]) -> f64 {
    let scale = terms.iter().fold(0.0_f64, |m, t| m.max(t.size()));
    if scale == 0.0 {
        return 0.0;
    }
    let mut total = terms[0].clone();
    for t in &terms[1..] {
        total = total.plus(t);
    }
    total.size() / scale
}

/// Coefficient of the bracket in the passage to an associative product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BracketCoefficient {
    /// `[a, b]_u = u (ab - ba)` with real `u`.
    Real(f64),
    /// `[a, b]_{iv} = i v (ab - ba)` with real `v`.
    Imaginary(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConversionParams {
    pub w: f64,
    pub u: BracketCoefficient,
}

impl Default for ConversionParams {
    /// `w = 1/2`, `v = 1`: `hbar = 1`, `kappa = 1/4`.
    fn default() -> Self {
        Self::quantum(1.0)
    }
}

impl ConversionParams {
    /// `w = 1/2`, `v = 1/hbar`, hence `kappa = hbar^2 / 4`.
    pub fn quantum(hbar: f64) -> Self {
        ConversionParams {
            w: 0.5,
            u: BracketCoefficient::Imaginary(1.0 / hbar),
        }
    }

    pub fn quantum_v(w: f64, v: f64) -> Self {
        ConversionParams {
            w,
            u: BracketCoefficient::Imaginary(v),
        }
    }

    pub fn associative(w: f64, u: f64) -> Self {
        ConversionParams {
            w,
            u: BracketCoefficient::Real(u),
        }
    }

    fn validate(&self) -> Result<()> {
        let u = match self.u {
            BracketCoefficient::Real(u) | BracketCoefficient::Imaginary(u) => u,
        };
        if self.w == 0.0 || u == 0.0 || !self.w.is_finite() || !u.is_finite() {
            return Err(Error::Configuration(format!(
                "conversion parameters must be finite and nonzero: {self:?}"
            )));
        }
        Ok(())
    }

    /// `-w^2/u^2` for real `u`, `w^2/v^2` for `u = iv`.
    pub fn kappa(&self) -> f64 {
        match self.u {
            BracketCoefficient::Real(u) => -self.w * self.w / (u * u),
            BracketCoefficient::Imaginary(v) => self.w * self.w / (v * v),
        }
    }

    /// `2 sqrt(kappa)` in the quantum regime.
    pub fn hbar(&self) -> Option<f64> {
        let k = self.kappa();
        (k > 0.0).then(|| 2.0 * k.sqrt())
    }
}

/// Real Jordan-Lie algebra given by structure constants. Entry
/// `(i * dim + j) * dim + k` of `jordan` is the `e_k` coefficient of
/// `e_i . e_j`; likewise for `lie`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JordanLieStructure {
    pub dim: usize,
    pub jordan: Vec<f64>,
    pub lie: Vec<f64>,
    pub kappa: f64,
    pub basis_labels: Vec<String>,
    /// Distinguished Jordan unit, when one is known.
    pub unit: Option<Vec<f64>>,
}

fn bilinear(constants: &[f64], dim: usize, x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0.0 {
            continue;
        }
        for (j, &yj) in y.iter().enumerate() {
            let k = xi * yj;
            if k == 0.0 {
                continue;
            }
            let row = &constants[(i * dim + j) * dim..(i * dim + j + 1) * dim];
            for (o, r) in out.iter_mut().zip(row) {
                *o += k * r;
            }
        }
    }
    out
}

impl JordanLieStructure {
    pub fn new(
        dim: usize,
        jordan: Vec<f64>,
        lie: Vec<f64>,
        kappa: f64,
        basis_labels: Vec<String>,
        unit: Option<Vec<f64>>,
    ) -> Result<Self> {
        let cube = dim * dim * dim;
        if jordan.len() != cube || lie.len() != cube {
            return Err(Error::Dimension(format!(
                "structure constants must have {cube} entries"
            )));
        }
        if !kappa.is_finite() {
            return Err(Error::Configuration("kappa must be finite".into()));
        }
        if !basis_labels.is_empty() && basis_labels.len() != dim {
            return Err(Error::Dimension("one label per basis vector".into()));
        }
        if unit.as_ref().is_some_and(|u| u.len() != dim) {
            return Err(Error::Dimension("unit has the wrong length".into()));
        }
        Ok(JordanLieStructure {
            dim,
            jordan,
            lie,
            kappa,
            basis_labels,
            unit,
        })
    }

    /// Pointwise product on `R^dim` with zero bracket (`kappa = 0`).
    pub fn commutative_poisson(dim: usize) -> Self {
        let mut jordan = vec![0.0; dim * dim * dim];
        for i in 0..dim {
            jordan[(i * dim + i) * dim + i] = 1.0;
        }
        JordanLieStructure {
            dim,
            jordan,
            lie: vec![0.0; dim * dim * dim],
            kappa: 0.0,
            basis_labels: (0..dim).map(|i| format!("p{}", i + 1)).collect(),
            unit: Some(vec![1.0; dim]),
        }
    }

    pub fn jordan(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        bilinear(&self.jordan, self.dim, x, y)
    }

    pub fn lie(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        bilinear(&self.lie, self.dim, x, y)
    }

    pub fn jordan_c(&self, x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
        bilinear_c(&self.jordan, self.dim, x, y)
    }

    pub fn lie_c(&self, x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
        bilinear_c(&self.lie, self.dim, x, y)
    }

    /// Replace `.` by `mu .` and `[,]` by `lambda [,]`; `kappa` becomes
    /// `kappa mu^2 / lambda^2`.
    pub fn rescaled(&self, mu: f64, lambda: f64) -> Result<Self> {
        if mu == 0.0 || lambda == 0.0 {
            return Err(Error::Configuration("rescaling factors must be nonzero".into()));
        }
        Ok(JordanLieStructure {
            dim: self.dim,
            jordan: self.jordan.iter().map(|v| v * mu).collect(),
            lie: self.lie.iter().map(|v| v * lambda).collect(),
            kappa: self.kappa * mu * mu / (lambda * lambda),
            basis_labels: self.basis_labels.clone(),
            unit: self.unit.as_ref().map(|u| u.iter().map(|v| v / mu).collect()),
        })
    }

    /// Negative control: adds a seeded antisymmetric perturbation of size
    /// `magnitude` to the bracket constants.
    pub fn with_perturbed_bracket(&self, seed: u64, magnitude: f64) -> Self {
        let mut rng = linalg::rng(seed);
        let d = self.dim;
        let mut lie = self.lie.clone();
        for i in 0..d {
            for j in (i + 1)..d {
                for k in 0..d {
                    let e = magnitude * linalg::gaussian(&mut rng);
                    lie[(i * d + j) * d + k] += e;
                    lie[(j * d + i) * d + k] -= e;
                }
            }
        }
        JordanLieStructure { lie, ..self.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("structure serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: JordanLieStructure =
            serde_json::from_str(s).map_err(|e| Error::Configuration(e.to_string()))?;
        Self::new(raw.dim, raw.jordan, raw.lie, raw.kappa, raw.basis_labels, raw.unit)
    }
}

fn bilinear_c(constants: &[f64], dim: usize, x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![c(0.0, 0.0); dim];
    for (i, xi) in x.iter().enumerate() {
        for (j, yj) in y.iter().enumerate() {
            let k = xi * yj;
            if k == c(0.0, 0.0) {
                continue;
            }
            let row = &constants[(i * dim + j) * dim..(i * dim + j + 1) * dim];
            for (o, r) in out.iter_mut().zip(row) {
                *o += k * r;
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    /// Jacobi identity and skew-symmetry of the bracket.
    pub jl1: f64,
    /// Symmetry of the Jordan product.
    pub jl2: f64,
    /// The bracket is a derivation of the Jordan product.
    pub jl3: f64,
    /// `(x.y).z - x.(y.z) = kappa [[x,z],y]`.
    pub jl4: f64,
    pub jordan_identity: f64,
    /// `[x, x.x] = 0`.
    pub cubic: f64,
    /// `e.x = x` and `[e,x] = 0` for the distinguished unit.
    pub unit: Option<f64>,
    pub max_residual: f64,
    pub pass: bool,
}

pub fn check_axioms(jl: &JordanLieStructure, trials: usize, seed: u64) -> Result<AxiomReport> {
    check_axioms_tol(jl, trials, seed, DEFAULT_TOL)
}

pub fn check_axioms_tol(
    jl: &JordanLieStructure,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<AxiomReport> {
    if trials == 0 {
        return Err(Error::Configuration("trials must be at least 1".into()));
    }
    let mut rng = linalg::rng(seed);
    let (mut jl1, mut jl2, mut jl3, mut jl4, mut jid, mut cubic) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    let mut unit: Option<f64> = jl.unit.as_ref().map(|_| 0.0);
    let j = |a: &[f64], b: &[f64]| jl.jordan(a, b);
    let l = |a: &[f64], b: &[f64]| jl.lie(a, b);
    for _ in 0..trials {
        let x = linalg::gaussian_vec(jl.dim, &mut rng);
        let y = linalg::gaussian_vec(jl.dim, &mut rng);
        let z = linalg::gaussian_vec(jl.dim, &mut rng);

        let jacobi = relative_residual(&[l(&x, &l(&y, &z)), l(&y, &l(&z, &x)), l(&z, &l(&x, &y))]);
        let skew = relative_residual(&[l(&x, &y), l(&y, &x)]);
        jl1 = jl1.max(jacobi).max(skew);
        jl2 = jl2.max(relative_residual(&[j(&x, &y), j(&y, &x).scaled(-1.0)]));
        jl3 = jl3.max(relative_residual(&[
            l(&x, &j(&y, &z)),
            j(&l(&x, &y), &z).scaled(-1.0),
            j(&y, &l(&x, &z)).scaled(-1.0),
        ]));
        jl4 = jl4.max(relative_residual(&[
            j(&j(&x, &y), &z),
            j(&x, &j(&y, &z)).scaled(-1.0),
            l(&l(&x, &z), &y).scaled(-jl.kappa),
        ]));
        let xx = j(&x, &x);
        jid = jid.max(relative_residual(&[j(&j(&x, &y), &xx), j(&x, &j(&y, &xx)).scaled(-1.0)]));
        cubic = cubic.max(l(&x, &xx).size() / x.size().powi(3).max(f64::MIN_POSITIVE));
        if let (Some(e), Some(u)) = (jl.unit.as_ref(), unit.as_mut()) {
            let r = relative_residual(&[j(e, &x), x.scaled(-1.0)]);
            let commutes = l(e, &x).size() / (e.size() * x.size()).max(f64::MIN_POSITIVE);
            *u = u.max(r).max(commutes);
        }
    }
    let mut max_residual = [jl1, jl2, jl3, jl4, jid, cubic].into_iter().fold(0.0, f64::max);
    if let Some(u) = unit {
        max_residual = max_residual.max(u);
    }
    Ok(AxiomReport {
        trials,
        seed,
        tol,
        jl1,
        jl2,
        jl3,
        jl4,
        jordan_identity: jid,
        cubic,
        unit,
        max_residual,
        pass: max_residual <= tol,
    })
}

/// Jordan-Lie structure of a matrix algebra together with its basis, so
/// that coordinate vectors and matrices can be converted both ways.
#[derive(Debug, Clone)]
pub struct MatrixJordanLie {
    pub jl: JordanLieStructure,
    pub basis: Vec<CMat>,
    pub params: ConversionParams,
    pub alg: StarAlgebra,
    /// Whether the real space is all of `M(n, C)` rather than `Herm`.
    pub full: bool,
}

/// Orthonormal basis of the standard hermitian matrices under
/// `Re tr(a* b)`, with labels.
pub fn hermitian_basis(n: usize) -> Vec<(String, CMat)> {
    let mut out = Vec::with_capacity(n * n);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for k in 0..n {
        let mut m = linalg::zeros(n, n);
        m[(k, k)] = c(1.0, 0.0);
        out.push((format!("E{}{}", k + 1, k + 1), m));
    }
    for k in 0..n {
        for l in (k + 1)..n {
            let mut s = linalg::zeros(n, n);
            s[(k, l)] = c(r, 0.0);
            s[(l, k)] = c(r, 0.0);
            out.push((format!("S{}{}", k + 1, l + 1), s));
            let mut a = linalg::zeros(n, n);
            a[(k, l)] = c(0.0, r);
            a[(l, k)] = c(0.0, -r);
            out.push((format!("A{}{}", k + 1, l + 1), a));
        }
    }
    out
}

impl MatrixJordanLie {
    fn build(alg: &StarAlgebra, params: &ConversionParams, full: bool) -> Result<Self> {
        params.validate()?;
        let ipq = alg.ipq();
        let herm = hermitian_basis(alg.n);
        let mut labels: Vec<String> = herm.iter().map(|(l, _)| l.clone()).collect();
        let mut basis: Vec<CMat> = herm.iter().map(|(_, b)| &ipq * b).collect();
        if full {
            labels.extend(herm.iter().map(|(l, _)| format!("i{l}")));
            let imag: Vec<CMat> = basis.iter().map(|b| b * c(0.0, 1.0)).collect();
            basis.extend(imag);
        }
        let mut this = MatrixJordanLie {
            jl: JordanLieStructure {
                dim: basis.len(),
                jordan: Vec::new(),
                lie: Vec::new(),
                kappa: params.kappa(),
                basis_labels: labels,
                unit: None,
            },
            basis,
            params: *params,
            alg: *alg,
            full,
        };
        let d = this.jl.dim;
        let mut jordan = vec![0.0; d * d * d];
        let mut lie = vec![0.0; d * d * d];
        for i in 0..d {
            for j in 0..d {
                let jc = this.coords(&this.matrix_jordan(&this.basis[i], &this.basis[j]));
                let lc = this.coords(&this.matrix_lie(&this.basis[i], &this.basis[j]));
                let at = (i * d + j) * d;
                jordan[at..at + d].copy_from_slice(&jc);
                lie[at..at + d].copy_from_slice(&lc);
            }
        }
        this.jl.jordan = jordan;
        this.jl.lie = lie;
        let e = linalg::identity(alg.n) * c(1.0 / (2.0 * params.w), 0.0);
        this.jl.unit = Some(this.coords(&e));
        Ok(this)
    }

    /// `a . b = w(ab + ba)`, `[a, b]_u = u(ab - ba)` on all of `M(n, C)`
    /// viewed as a real vector space; `kappa = -w^2/u^2`.
    pub fn from_associative(alg: &StarAlgebra, params: &ConversionParams) -> Result<Self> {
        if !matches!(params.u, BracketCoefficient::Real(_)) {
            return Err(Error::Configuration(
                "the associative construction needs a real bracket coefficient".into(),
            ));
        }
        Self::build(alg, params, true)
    }

    /// `a . b = w(ab + ba)`, `[a, b] = iv(ab - ba)` on `Herm`; `kappa = w^2/v^2`.
    pub fn from_star_algebra(alg: &StarAlgebra, params: &ConversionParams) -> Result<Self> {
        if !matches!(params.u, BracketCoefficient::Imaginary(_)) {
            return Err(Error::Configuration(
                "the hermitian construction needs an imaginary bracket coefficient".into(),
            ));
        }
        Self::build(alg, params, false)
    }

    fn bracket_factor(&self) -> Complex64 {
        match self.params.u {
            BracketCoefficient::Real(u) => c(u, 0.0),
            BracketCoefficient::Imaginary(v) => c(0.0, v),
        }
    }

    pub fn matrix_jordan(&self, a: &CMat, b: &CMat) -> CMat {
        linalg::anticommutator(a, b) * c(self.params.w, 0.0)
    }

    pub fn matrix_lie(&self, a: &CMat, b: &CMat) -> CMat {
        linalg::commutator(a, b) * self.bracket_factor()
    }

    /// Complex coordinates `tr(B_k I_pq x)` of any matrix against the
    /// hermitian basis.
    pub fn complex_coords(&self, m: &CMat) -> Vec<Complex64> {
        let herm = hermitian_basis(self.alg.n);
        let ix = self.alg.ipq() * m;
        herm.iter().map(|(_, b)| linalg::trace(&(b * &ix))).collect()
    }

    pub fn from_complex_coords(&self, z: &[Complex64]) -> CMat {
        let k = hermitian_basis(self.alg.n).len();
        let mut m = linalg::zeros(self.alg.n, self.alg.n);
        for (b, zk) in self.basis[..k].iter().zip(z) {
            m += b * *zk;
        }
        m
    }

    /// Real coordinates of a matrix in the structure's basis. For the
    /// hermitian structure the anti-hermitian part is discarded.
    pub fn coords(&self, m: &CMat) -> Vec<f64> {
        let z = self.complex_coords(m);
        let mut out: Vec<f64> = z.iter().map(|v| v.re).collect();
        if self.full {
            out.extend(z.iter().map(|v| v.im));
        }
        out
    }

    pub fn to_matrix(&self, x: &[f64]) -> CMat {
        let mut m = linalg::zeros(self.alg.n, self.alg.n);
        for (b, xk) in self.basis.iter().zip(x) {
            m += b * c(*xk, 0.0);
        }
        m
    }

    /// Random element of the underlying real space.
    pub fn random_element(&self, rng: &mut linalg::SeededRng) -> CMat {
        if self.full {
            linalg::ginibre(self.alg.n, rng)
        } else {
            self.alg.random_hermitian(rng)
        }
    }

    /// `max |T(x,y,z) - 2w^2 (xyz + zyx)|`, relative.
    pub fn triple_realization_residual(&self, x: &CMat, y: &CMat, z: &CMat) -> f64 {
        let t = triple_systems(&self.jl, &self.coords(x), &self.coords(y), &self.coords(z)).t;
        let w = self.params.w;
        let expected = (x * y * z + z * y * x) * c(2.0 * w * w, 0.0);
        relative_residual(&[self.to_matrix(&t), expected.scaled(-1.0)])
    }
}

/// Associative product `ab = (1/2w) a.b + (1/2u) [a,b]` recovered from a
/// real Jordan-Lie algebra with negative or zero-free `kappa = -w^2/u^2`.
#[derive(Debug, Clone, Copy)]
pub struct AssociativeProduct<'a> {
    jl: &'a JordanLieStructure,
    jordan_coeff: f64,
    lie_coeff: f64,
}

impl AssociativeProduct<'_> {
    pub fn product(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        self.jl
            .jordan(x, y)
            .scaled(self.jordan_coeff)
            .plus(&self.jl.lie(x, y).scaled(self.lie_coeff))
    }

    /// The associative unit `2w e` belonging to the Jordan unit `e`.
    pub fn unit(&self) -> Option<Vec<f64>> {
        self.jl
            .unit
            .as_ref()
            .map(|e| e.scaled(1.0 / self.jordan_coeff))
    }
}

fn kappa_matches(jl: &JordanLieStructure, params: &ConversionParams) -> Result<()> {
    let k = params.kappa();
    if (jl.kappa - k).abs() > 1e-12 * k.abs().max(1.0) {
        return Err(Error::Configuration(format!(
            "structure kappa {} does not match parameter kappa {}",
            jl.kappa, k
        )));
    }
    Ok(())
}

pub fn to_associative<'a>(
    jl: &'a JordanLieStructure,
    params: &ConversionParams,
) -> Result<AssociativeProduct<'a>> {
    params.validate()?;
    let u = match params.u {
        BracketCoefficient::Real(u) => u,
        BracketCoefficient::Imaginary(_) => {
            return Err(Error::Configuration(
                "an imaginary bracket coefficient needs the complexification".into(),
            ))
        }
    };
    kappa_matches(jl, params)?;
    Ok(AssociativeProduct {
        jl,
        jordan_coeff: 1.0 / (2.0 * params.w),
        lie_coeff: 1.0 / (2.0 * u),
    })
}

/// The complex *-algebra `V (+) iV` with `ab = (1/2w) a.b + (1/(2iv)) [a,b]`
/// and complex conjugation of coordinates as involution.
#[derive(Debug, Clone, Copy)]
pub struct ComplexifiedStar<'a> {
    jl: &'a JordanLieStructure,
    jordan_coeff: Complex64,
    lie_coeff: Complex64,
}

impl ComplexifiedStar<'_> {
    pub fn product(&self, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        let j = self.jl.jordan_c(a, b);
        let l = self.jl.lie_c(a, b);
        j.iter()
            .zip(&l)
            .map(|(x, y)| self.jordan_coeff * x + self.lie_coeff * y)
            .collect()
    }

    pub fn involution(&self, a: &[Complex64]) -> Vec<Complex64> {
        a.iter().map(|z| z.conj()).collect()
    }

    /// Restriction to the real part: recovers `(., [,])` up to the
    /// parameters, `a.b = w(ab + ba)`, `[a,b] = iv(ab - ba)`.
    pub fn recovered_products(&self, w: f64, v: f64, x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let xc: Vec<Complex64> = x.iter().map(|&t| c(t, 0.0)).collect();
        let yc: Vec<Complex64> = y.iter().map(|&t| c(t, 0.0)).collect();
        let xy = self.product(&xc, &yc);
        let yx = self.product(&yc, &xc);
        let jordan = xy.iter().zip(&yx).map(|(a, b)| ((a + b) * w).re).collect();
        let lie = xy.iter().zip(&yx).map(|(a, b)| ((a - b) * c(0.0, v)).re).collect();
        (jordan, lie)
    }
}

pub fn complexify_to_star<'a>(
    jl: &'a JordanLieStructure,
    params: &ConversionParams,
) -> Result<ComplexifiedStar<'a>> {
    params.validate()?;
    if jl.kappa <= 0.0 {
        return Err(Error::Domain(format!(
            "complexification needs kappa > 0, got {}",
            jl.kappa
        )));
    }
    let v = match params.u {
        BracketCoefficient::Imaginary(v) => v,
        BracketCoefficient::Real(_) => {
            return Err(Error::Configuration(
                "complexification needs an imaginary bracket coefficient".into(),
            ))
        }
    };
    kappa_matches(jl, params)?;
    Ok(ComplexifiedStar {
        jl,
        jordan_coeff: c(1.0 / (2.0 * params.w), 0.0),
        lie_coeff: c(1.0, 0.0) / c(0.0, 2.0 * v),
    })
}

/// Tensor product with
/// `(a(x)b).(a'(x)b') = (a.a')(x)(b.b') - kappa [a,a'](x)[b,b']` and
/// `[a(x)b, a'(x)b'] = (a.a')(x)[b,b'] + [a,a'](x)(b.b')`.
pub fn tensor_product(a: &JordanLieStructure, b: &JordanLieStructure) -> Result<JordanLieStructure> {
    if a.kappa == 0.0 || b.kappa == 0.0 {
        return Err(Error::Domain("tensor products need kappa != 0".into()));
    }
    if (a.kappa - b.kappa).abs() > 1e-12 * a.kappa.abs() {
        return Err(Error::Domain(format!(
            "kappa mismatch: {} and {}",
            a.kappa, b.kappa
        )));
    }
    let kappa = a.kappa;
    let (da, db) = (a.dim, b.dim);
    let d = da * db;
    let mut jordan = vec![0.0; d * d * d];
    let mut lie = vec![0.0; d * d * d];
    let at = |dim: usize, i: usize, j: usize, k: usize| (i * dim + j) * dim + k;
    for i in 0..da {
        for k in 0..da {
            for j in 0..db {
                for l in 0..db {
                    let row = ((i * db + j) * d + (k * db + l)) * d;
                    for m in 0..da {
                        let ja = a.jordan[at(da, i, k, m)];
                        let la = a.lie[at(da, i, k, m)];
                        if ja == 0.0 && la == 0.0 {
                            continue;
                        }
                        for p in 0..db {
                            let jb = b.jordan[at(db, j, l, p)];
                            let lb = b.lie[at(db, j, l, p)];
                            jordan[row + m * db + p] += ja * jb - kappa * la * lb;
                            lie[row + m * db + p] += ja * lb + la * jb;
                        }
                    }
                }
            }
        }
    }
    let label = |v: &[String], i: usize| v.get(i).cloned().unwrap_or_else(|| format!("e{}", i + 1));
    let mut labels = Vec::with_capacity(d);
    for i in 0..da {
        for j in 0..db {
            labels.push(format!("{}⊗{}", label(&a.basis_labels, i), label(&b.basis_labels, j)));
        }
    }
    let unit = match (&a.unit, &b.unit) {
        (Some(ea), Some(eb)) => Some(ea.iter().flat_map(|x| eb.iter().map(move |y| x * y)).collect()),
        _ => None,
    };
    JordanLieStructure::new(d, jordan, lie, kappa, labels, unit)
}

/// Index permutation `(i, j) -> (j, i)` carrying `a (x) b` to `b (x) a`.
pub fn flip(x: &[f64], da: usize, db: usize) -> Vec<f64> {
    let mut out = vec![0.0; da * db];
    for i in 0..da {
        for j in 0..db {
            out[j * da + i] = x[i * db + j];
        }
    }
    out
}

/// Largest deviation between the tensor product structure of `a` and `b`
/// and the structure of `target`, compared through the Kronecker map
/// `B_i (x) B_j -> kron(B_i, B_j)`.
pub fn kronecker_residual(
    a: &MatrixJordanLie,
    b: &MatrixJordanLie,
    target: &MatrixJordanLie,
) -> Result<f64> {
    let t = tensor_product(&a.jl, &b.jl)?;
    if target.jl.dim != t.dim {
        return Err(Error::Dimension(format!(
            "tensor dimension {} against target dimension {}",
            t.dim, target.jl.dim
        )));
    }
    let images: Vec<Vec<f64>> = a
        .basis
        .iter()
        .flat_map(|x| b.basis.iter().map(move |y| (x, y)))
        .map(|(x, y)| target.coords(&linalg::kron(x, y)))
        .collect();
    let map = |v: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; t.dim];
        for (k, vk) in v.iter().enumerate() {
            for (o, im) in out.iter_mut().zip(&images[k]) {
                *o += vk * im;
            }
        }
        out
    };
    let mut worst: f64 = 0.0;
    let unit = |k: usize| {
        let mut e = vec![0.0; t.dim];
        e[k] = 1.0;
        e
    };
    for p in 0..t.dim {
        for q in 0..t.dim {
            let (ep, eq) = (unit(p), unit(q));
            let (mp, mq) = (&images[p], &images[q]);
            let dj = map(&t.jordan(&ep, &eq)).minus(&target.jl.jordan(mp, mq));
            let dl = map(&t.lie(&ep, &eq)).minus(&target.jl.lie(mp, mq));
            worst = worst.max(dj.size()).max(dl.size());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleProducts {
    pub t: Vec<f64>,
    pub r: Vec<f64>,
    /// Residual of `R_T(x,y,z) + 2 kappa [[y,x],z] = 0`, relative to the
    /// terms and to `|x| |y| |z|`.
    pub residual: f64,
}

/// Jordan triple `T(x,y,z) = (x.y).z + x.(y.z) - y.(x.z)` and Lie triple
/// `R_T(x,y,z) = T(y,x,z) - T(x,y,z)`.
pub fn triple_systems(jl: &JordanLieStructure, x: &[f64], y: &[f64], z: &[f64]) -> TripleProducts {
    let tri = |a: &[f64], b: &[f64], cc: &[f64]| {
        jl.jordan(&jl.jordan(a, b), cc)
            .plus(&jl.jordan(a, &jl.jordan(b, cc)))
            .minus(&jl.jordan(b, &jl.jordan(a, cc)))
    };
    let t = tri(x, y, z);
    let r = tri(y, x, z).minus(&t);
    let curvature = jl.lie(&jl.lie(y, x), z).scaled(2.0 * jl.kappa);
    // Scaled by the inputs as well, so rounding noise against an exactly
    // vanishing bracket does not count as a violation.
    let norm = |v: &[f64]| v.iter().map(|t| t * t).sum::<f64>().sqrt();
    let scale = r.size().max(curvature.size()).max(norm(x) * norm(y) * norm(z));
    let residual = if scale == 0.0 { 0.0 } else { r.plus(&curvature).size() / scale };
    TripleProducts { t, r, residual }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli_x, pauli_y, pauli_z};
    use proptest::prelude::*;

    fn herm(n: usize) -> MatrixJordanLie {
        MatrixJordanLie::from_star_algebra(&StarAlgebra::new(n).unwrap(), &ConversionParams::default()).unwrap()
    }

    fn close(a: &CMat, b: &CMat, tol: f64) -> bool {
        (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
    }

    #[test]
    fn associator_examples() {
        let mut rng = linalg::rng(1);
        let mat = |a: &CMat, b: &CMat| a * b;
        let (x, y, z) = (linalg::ginibre(3, &mut rng), linalg::ginibre(3, &mut rng), linalg::ginibre(3, &mut rng));
        assert!(associator(mat, &x, &y, &z).norm() < 1e-12);

        let h = herm(2);
        let jordan = |a: &CMat, b: &CMat| h.matrix_jordan(a, b);
        let scaled = |a: &CMat, b: &CMat| h.matrix_jordan(a, b) * c(3.0, 0.0);
        let (x, y, z) = (h.random_element(&mut rng), h.random_element(&mut rng), h.random_element(&mut rng));
        let a1 = associator(jordan, &x, &y, &z);
        let a3 = associator(scaled, &x, &y, &z);
        assert!(close(&a3, &(&a1 * c(9.0, 0.0)), 1e-12));

        let (x, y, z) = (pauli_x(), pauli_z(), pauli_x());
        let lhs = associator(jordan, &x, &y, &z);
        let rhs = h.matrix_lie(&h.matrix_lie(&x, &z), &y) * c(h.jl.kappa, 0.0);
        assert!(close(&lhs, &rhs, 1e-14));

        let (x, y, z) = (pauli_x(), pauli_x(), pauli_z());
        let lhs = associator(jordan, &x, &y, &z);
        let rhs = h.matrix_lie(&h.matrix_lie(&x, &z), &y) * c(h.jl.kappa, 0.0);
        assert!(close(&lhs, &rhs, 1e-14));
        assert!(lhs.norm() > 0.1);
    }

    #[test]
    fn split_examples() {
        let (j, l) = split_sym_skew(|a: &CMat, b: &CMat| a * b);
        assert!(j(&pauli_x(), &pauli_y()).norm() < 1e-15);
        assert!(close(&l(&pauli_x(), &pauli_y()), &(pauli_z() * c(0.0, 2.0)), 1e-15));

        let mut rng = linalg::rng(4);
        for _ in 0..100 {
            let (x, y, z) = (linalg::ginibre(2, &mut rng), linalg::ginibre(2, &mut rng), linalg::ginibre(2, &mut rng));
            let aj = associator(&j, &x, &y, &z);
            let al = associator(&l, &x, &y, &z);
            assert!(relative_residual(&[aj, al]) < 1e-12);
        }

        let (_, l) = split_sym_skew(|a: &Vec<f64>, b: &Vec<f64>| a.iter().zip(b).map(|(x, y)| x * y).collect());
        assert_eq!(l(&vec![1.0, 2.0], &vec![3.0, 4.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn kappa_from_parameters() {
        assert_eq!(ConversionParams::associative(0.5, 0.5).kappa(), -1.0);
        assert_eq!(ConversionParams::associative(1.0, 2.0).kappa(), -0.25);
        assert_eq!(ConversionParams::default().kappa(), 0.25);
        assert_eq!(ConversionParams::default().hbar(), Some(1.0));
        assert_eq!(ConversionParams::quantum(2.0).kappa(), 1.0);
        let alg = StarAlgebra::new(2).unwrap();
        let err = MatrixJordanLie::from_associative(&alg, &ConversionParams::associative(0.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::Configuration(_)));
    }

    #[test]
    fn from_associative_passes_axioms_and_round_trips() {
        let alg = StarAlgebra::new(2).unwrap();
        let params = ConversionParams::associative(0.5, 0.5);
        let m = MatrixJordanLie::from_associative(&alg, &params).unwrap();
        assert_eq!(m.jl.kappa, -1.0);
        assert!(check_axioms(&m.jl, 200, 3).unwrap().pass);
        let assoc = to_associative(&m.jl, &params).unwrap();
        let mut rng = linalg::rng(9);
        for _ in 0..50 {
            let (a, b) = (linalg::ginibre(2, &mut rng), linalg::ginibre(2, &mut rng));
            let got = m.to_matrix(&assoc.product(&m.coords(&a), &m.coords(&b)));
            assert!(close(&got, &(&a * &b), 1e-12));
        }
        let unit = m.to_matrix(&assoc.unit().unwrap());
        assert!(close(&unit, &linalg::identity(2), 1e-15));
    }

    #[test]
    fn associative_unit_for_general_w() {
        let alg = StarAlgebra::new(2).unwrap();
        let params = ConversionParams::associative(1.5, 0.75);
        let m = MatrixJordanLie::from_associative(&alg, &params).unwrap();
        let e = m.jl.unit.clone().unwrap();
        assert!(close(&m.to_matrix(&e), &(linalg::identity(2) * c(1.0 / 3.0, 0.0)), 1e-15));
        let assoc = to_associative(&m.jl, &params).unwrap();
        let one = assoc.unit().unwrap();
        let mut rng = linalg::rng(2);
        let x = m.coords(&linalg::ginibre(2, &mut rng));
        assert!(relative_residual(&[assoc.product(&one, &x), x.scaled(-1.0)]) < 1e-14);
    }

    #[test]
    fn to_associative_rejects_mismatched_kappa() {
        let alg = StarAlgebra::new(2).unwrap();
        let m = MatrixJordanLie::from_associative(&alg, &ConversionParams::associative(0.5, 0.5)).unwrap();
        let err = to_associative(&m.jl, &ConversionParams::associative(1.0, 0.5)).unwrap_err();
        assert!(matches!(err, Error::Configuration(_)));
    }

    #[test]
    fn from_star_algebra_examples() {
        let h = herm(2);
        assert_eq!(h.jl.kappa, 0.25);
        assert!(h.matrix_jordan(&pauli_x(), &pauli_y()).norm() < 1e-15);
        assert!(close(&h.matrix_lie(&pauli_x(), &pauli_y()), &(pauli_z() * c(-2.0, 0.0)), 1e-15));
        let mut rng = linalg::rng(5);
        for _ in 0..100 {
            let (x, y) = (h.random_element(&mut rng), h.random_element(&mut rng));
            assert!(h.alg.is_hermitian_matrix(&h.matrix_jordan(&x, &y)));
            assert!(h.alg.is_hermitian_matrix(&h.matrix_lie(&x, &y)));
        }
    }

    #[test]
    fn complexify_round_trip() {
        let h = herm(2);
        let star = complexify_to_star(&h.jl, &h.params).unwrap();
        let mut rng = linalg::rng(6);
        for _ in 0..100 {
            let (a, b) = (linalg::ginibre(2, &mut rng), linalg::ginibre(2, &mut rng));
            let (za, zb) = (h.complex_coords(&a), h.complex_coords(&b));
            let prod = h.from_complex_coords(&star.product(&za, &zb));
            assert!(close(&prod, &(&a * &b), 1e-12));
            let lhs = star.involution(&star.product(&za, &zb));
            let rhs = star.product(&star.involution(&zb), &star.involution(&za));
            assert!(relative_residual(&[lhs, rhs.scaled(-1.0)]) < 1e-9);
            assert!(close(&h.from_complex_coords(&star.involution(&za)), &a.adjoint(), 1e-12));
        }
        let x = h.coords(&h.random_element(&mut rng));
        let y = h.coords(&h.random_element(&mut rng));
        let (j, l) = star.recovered_products(0.5, 1.0, &x, &y);
        assert!(relative_residual(&[j, h.jl.jordan(&x, &y).scaled(-1.0)]) < 1e-12);
        assert!(relative_residual(&[l, h.jl.lie(&x, &y).scaled(-1.0)]) < 1e-12);
    }

    #[test]
    fn complexify_one_dimensional_is_complex_numbers() {
        let params = ConversionParams::quantum_v(0.5, 0.5);
        let h = MatrixJordanLie::from_star_algebra(&StarAlgebra::new(1).unwrap(), &params).unwrap();
        assert_eq!(h.jl.kappa, 1.0);
        let star = complexify_to_star(&h.jl, &params).unwrap();
        let p = star.product(&[c(1.0, 2.0)], &[c(3.0, -1.0)]);
        assert!((p[0] - c(1.0, 2.0) * c(3.0, -1.0)).norm() < 1e-15);
        assert_eq!(star.involution(&[c(1.0, 2.0)]), vec![c(1.0, -2.0)]);
    }

    #[test]
    fn complexify_rejects_nonpositive_kappa() {
        let poisson = JordanLieStructure::commutative_poisson(2);
        let err = complexify_to_star(&poisson, &ConversionParams::default()).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn axiom_suite_and_controls() {
        for n in 1..=3 {
            let report = check_axioms(&herm(n).jl, 200, 11).unwrap();
            assert!(report.pass, "n = {n}: {report:?}");
            assert!(report.unit.is_some());
        }
        let poisson = JordanLieStructure::commutative_poisson(5);
        assert!(check_axioms(&poisson, 50, 1).unwrap().pass);
        let bad = herm(2).jl.with_perturbed_bracket(3, 0.1);
        let report = check_axioms(&bad, 50, 1).unwrap();
        assert!(!report.pass);
        assert!(report.jl1 > 1e-9);
    }

    #[test]
    fn signature_structure_passes_axioms() {
        let alg = StarAlgebra::with_signature(1, 2).unwrap();
        let h = MatrixJordanLie::from_star_algebra(&alg, &ConversionParams::default()).unwrap();
        assert!(check_axioms(&h.jl, 100, 2).unwrap().pass);
    }

    #[test]
    fn rescaling_changes_kappa_quadratically() {
        let jl = herm(2).jl.rescaled(2.0, 0.5).unwrap();
        assert!((jl.kappa - 0.25 * 16.0).abs() < 1e-15);
        assert!(check_axioms(&jl, 50, 2).unwrap().pass);
    }

    #[test]
    fn json_round_trip() {
        let jl = herm(2).jl;
        assert_eq!(JordanLieStructure::from_json(&jl.to_json()).unwrap(), jl);
        assert!(JordanLieStructure::from_json("{\"dim\": 2}").is_err());
    }

    #[test]
    fn tensor_product_matches_kronecker() {
        let (h2, h4) = (herm(2), herm(4));
        let t = tensor_product(&h2.jl, &h2.jl).unwrap();
        assert_eq!(t.kappa, 0.25);
        assert!(check_axioms(&t, 100, 4).unwrap().pass);
        assert!(kronecker_residual(&h2, &h2, &h4).unwrap() <= 1e-9);
    }

    #[test]
    fn tensor_unit_and_flip() {
        let h2 = herm(2);
        let h1 = herm(1);
        let ab = tensor_product(&h2.jl, &h1.jl).unwrap();
        let ba = tensor_product(&h1.jl, &h2.jl).unwrap();
        let e = ab.unit.clone().unwrap();
        let mut rng = linalg::rng(3);
        let x = linalg::gaussian_vec(ab.dim, &mut rng);
        assert!(relative_residual(&[ab.jordan(&e, &x), x.scaled(-1.0)]) < 1e-14);
        let y = linalg::gaussian_vec(ab.dim, &mut rng);
        let lhs = flip(&ab.jordan(&x, &y), 4, 1);
        let rhs = ba.jordan(&flip(&x, 4, 1), &flip(&y, 4, 1));
        assert!(relative_residual(&[lhs, rhs.scaled(-1.0)]) < 1e-14);
    }

    #[test]
    fn tensor_rejects_bad_kappa() {
        let h = herm(2).jl;
        let other = h.rescaled(2.0, 1.0).unwrap();
        assert!(matches!(tensor_product(&h, &other), Err(Error::Domain(_))));
        let p = JordanLieStructure::commutative_poisson(2);
        assert!(matches!(tensor_product(&p, &p), Err(Error::Domain(_))));
    }

    #[test]
    fn triple_system_identities() {
        let h = herm(2);
        let mut rng = linalg::rng(12);
        for _ in 0..100 {
            let (x, y, z) = (h.random_element(&mut rng), h.random_element(&mut rng), h.random_element(&mut rng));
            let t = triple_systems(&h.jl, &h.coords(&x), &h.coords(&y), &h.coords(&z));
            assert!(t.residual <= 1e-9);
        }
        let e = h.jl.unit.clone().unwrap();
        assert!(triple_systems(&h.jl, &e, &e, &e).r.size() < 1e-15);

        let full = MatrixJordanLie::from_associative(&StarAlgebra::new(2).unwrap(), &ConversionParams::associative(0.5, 0.5)).unwrap();
        for _ in 0..20 {
            let (x, y, z) = (linalg::ginibre(2, &mut rng), linalg::ginibre(2, &mut rng), linalg::ginibre(2, &mut rng));
            assert!(full.triple_realization_residual(&x, &y, &z) <= 1e-9);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn jl4_holds_for_random_parameters(w in 0.1f64..3.0, v in 0.1f64..3.0, seed in 0u64..100) {
            let alg = StarAlgebra::new(2).unwrap();
            let h = MatrixJordanLie::from_star_algebra(&alg, &ConversionParams::quantum_v(w, v)).unwrap();
            let report = check_axioms(&h.jl, 10, seed).unwrap();
            prop_assert!(report.pass, "{:?}", report);
        }

        #[test]
        fn coordinates_round_trip(seed in 0u64..1000) {
            let h = herm(3);
            let mut rng = linalg::rng(seed);
            let x = h.random_element(&mut rng);
            prop_assert!(close(&h.to_matrix(&h.coords(&x)), &x, 1e-13));
        }
    }
}
