//! Matrix *-algebras `M(n, C)` with the involution `a* = I_pq conj(a)^t I_pq`,
//! the positive cone, and the ring extension of a Jordan-Lie algebra.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jordanlie::JordanLieStructure;
use crate::linalg::{self, c, CMat, SeededRng};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StarAlgebra {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraElement {
    #[serde(with = "linalg::serde_cmat")]
    entries: CMat,
}

impl AlgebraElement {
    pub fn new(entries: CMat) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::Dimension(format!(
                "algebra elements are square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if !linalg::is_finite(&entries) {
            return Err(Error::Domain("non-finite matrix entry".into()));
        }
        Ok(AlgebraElement { entries })
    }

    pub fn identity(n: usize) -> Self {
        AlgebraElement {
            entries: linalg::identity(n),
        }
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.entries
    }

    pub fn into_matrix(self) -> CMat {
        self.entries
    }

    pub fn mul(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        if self.n() != other.n() {
            return Err(Error::Dimension(format!(
                "cannot multiply sizes {} and {}",
                self.n(),
                other.n()
            )));
        }
        Ok(AlgebraElement {
            entries: &self.entries * &other.entries,
        })
    }
}

/// Inverse with the singular-value-ratio test.
pub fn invert(x: &AlgebraElement, tol: f64) -> Result<AlgebraElement> {
    Ok(AlgebraElement {
        entries: linalg::inverse(x.matrix(), tol)?,
    })
}

/// Which invertible elements the congruence condition of the P* check ranges
/// over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CongruenceVariant {
    /// `a b a` with `a` invertible hermitian.
    #[default]
    Hermitian,
    /// `g b g*` with `g` any invertible element.
    Invertible,
}

/// A pair `(a, b)` with `b` in the cone and `1 + a b a` outside of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(with = "linalg::serde_cmat")]
    pub a: CMat,
    #[serde(with = "linalg::serde_cmat")]
    pub b: CMat,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub is_p_star: bool,
    pub trials: usize,
    pub seed: u64,
    pub variant: CongruenceVariant,
    pub unit_in_cone: bool,
    pub congruence_failures: usize,
    pub shift_failures: usize,
    pub witnesses: Vec<Witness>,
}

const MAX_WITNESSES: usize = 3;

impl StarAlgebra {
    /// `M(n, C)` with the standard involution (conjugate transpose).
    pub fn new(n: usize) -> Result<Self> {
        Self::with_signature(n, 0)
    }

    pub fn with_signature(p: usize, q: usize) -> Result<Self> {
        if p + q == 0 {
            return Err(Error::Configuration("matrix size must be positive".into()));
        }
        Ok(StarAlgebra {
            n: p + q,
            p,
            q,
            tol: DEFAULT_TOL,
        })
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Configuration(format!("tolerance must be positive, got {tol}")));
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn is_standard(&self) -> bool {
        self.q == 0
    }

    /// `I_pq = diag(1,..,1,-1,..,-1)`.
    pub fn ipq(&self) -> CMat {
        let entries: Vec<_> = (0..self.n)
            .map(|k| if k < self.p { c(1.0, 0.0) } else { c(-1.0, 0.0) })
            .collect();
        linalg::diag(&entries)
    }

    fn check_size(&self, m: &CMat) -> Result<()> {
        if m.nrows() != self.n || m.ncols() != self.n {
            return Err(Error::Dimension(format!(
                "expected {0}x{0}, got {1}x{2}",
                self.n,
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(())
    }

    pub fn element(&self, m: CMat) -> Result<AlgebraElement> {
        self.check_size(&m)?;
        AlgebraElement::new(m)
    }

    pub fn adjoint_matrix(&self, m: &CMat) -> CMat {
        if self.is_standard() {
            m.adjoint()
        } else {
            let i = self.ipq();
            &i * m.adjoint() * &i
        }
    }

    pub fn adjoint(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_size(x.matrix())?;
        Ok(AlgebraElement {
            entries: self.adjoint_matrix(x.matrix()),
        })
    }

    pub fn is_hermitian_matrix(&self, m: &CMat) -> bool {
        let scale = m.norm();
        scale == 0.0 || (m - self.adjoint_matrix(m)).norm() <= self.tol * scale
    }

    pub fn is_hermitian(&self, x: &AlgebraElement) -> bool {
        x.n() == self.n && self.is_hermitian_matrix(x.matrix())
    }

    /// Smallest eigenvalue of `I_pq x` relative to its spectral radius, for a
    /// hermitian `x`. The cone is where this is positive beyond `tol`.
    pub fn cone_margin(&self, x: &CMat) -> f64 {
        let (vals, _) = linalg::herm_eig(&(self.ipq() * x));
        let radius = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if radius == 0.0 {
            return 0.0;
        }
        vals[0] / radius
    }

    pub fn in_cone(&self, x: &CMat) -> bool {
        self.is_hermitian_matrix(x) && self.cone_margin(x) > self.tol
    }

    /// Random element of `Herm`: `I_pq h` with `h` a hermitian Ginibre sample.
    pub fn random_hermitian(&self, rng: &mut SeededRng) -> CMat {
        self.ipq() * linalg::random_hermitian(self.n, rng)
    }

    /// Random element of the cone: `I_pq P` with `P` positive definite.
    pub fn random_cone_element(&self, rng: &mut SeededRng) -> CMat {
        self.ipq() * linalg::random_positive(self.n, rng)
    }

    /// Spectral check of the two order conditions on seeded random samples:
    /// congruence (`a b a` stays in the cone) and the shifted congruence
    /// `1 + a b a` in the cone.
    pub fn check_p_star(&self, trials: usize, seed: u64) -> Result<PositivityReport> {
        self.check_p_star_with(trials, seed, CongruenceVariant::default())
    }

    pub fn check_p_star_with(
        &self,
        trials: usize,
        seed: u64,
        variant: CongruenceVariant,
    ) -> Result<PositivityReport> {
        if trials == 0 {
            return Err(Error::Configuration("trials must be at least 1".into()));
        }
        let mut rng = linalg::rng(seed);
        let one = linalg::identity(self.n);
        let mut report = PositivityReport {
            is_p_star: true,
            trials,
            seed,
            variant,
            unit_in_cone: self.in_cone(&one),
            congruence_failures: 0,
            shift_failures: 0,
            witnesses: Vec::new(),
        };
        for _ in 0..trials {
            let b = self.random_cone_element(&mut rng);
            let g = match variant {
                CongruenceVariant::Hermitian => self.random_hermitian(&mut rng),
                CongruenceVariant::Invertible => linalg::ginibre(self.n, &mut rng),
            };
            if linalg::is_invertible(&g, self.tol) {
                let congruent = &g * &b * self.adjoint_matrix(&g);
                if !self.in_cone(&congruent) {
                    report.congruence_failures += 1;
                }
            }
            let a = self.random_hermitian(&mut rng);
            let shifted = &one + &a * &b * &a;
            if !self.in_cone(&shifted) {
                report.shift_failures += 1;
                if report.witnesses.len() < MAX_WITNESSES {
                    report.witnesses.push(Witness {
                        min_eigenvalue: self.cone_margin(&shifted),
                        a,
                        b,
                    });
                }
            }
        }
        report.is_p_star = report.congruence_failures == 0 && report.shift_failures == 0;
        Ok(report)
    }
}

/// Element `x + j y` of `V_R = V (+) jV` with `j^2 = -kappa`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingExtensionElement {
    pub real_part: Vec<f64>,
    pub j_part: Vec<f64>,
    pub kappa: f64,
}

impl RingExtensionElement {
    pub fn new(real_part: Vec<f64>, j_part: Vec<f64>, kappa: f64) -> Result<Self> {
        if real_part.len() != j_part.len() {
            return Err(Error::Dimension("real and j parts differ in length".into()));
        }
        Ok(RingExtensionElement {
            real_part,
            j_part,
            kappa,
        })
    }

    pub fn real(x: Vec<f64>, kappa: f64) -> Self {
        let j_part = vec![0.0; x.len()];
        RingExtensionElement {
            real_part: x,
            j_part,
            kappa,
        }
    }
}

fn axpy(acc: &mut [f64], k: f64, x: &[f64]) {
    for (a, v) in acc.iter_mut().zip(x) {
        *a += k * v;
    }
}

/// `ab = a.b + j[a,b]` extended bilinearly over `R = K[X]/(X^2 + kappa)`.
pub fn ring_extension_product(
    a: &RingExtensionElement,
    b: &RingExtensionElement,
    jl: &JordanLieStructure,
) -> Result<RingExtensionElement> {
    let same = |k: f64| (k - jl.kappa).abs() <= 1e-12 * jl.kappa.abs().max(1.0);
    if !same(a.kappa) || !same(b.kappa) {
        return Err(Error::Configuration(format!(
            "kappa mismatch: {} and {} against structure kappa {}",
            a.kappa, b.kappa, jl.kappa
        )));
    }
    for v in [&a.real_part, &a.j_part, &b.real_part, &b.j_part] {
        if v.len() != jl.dim {
            return Err(Error::Dimension(format!(
                "vector of length {} in a structure of dimension {}",
                v.len(),
                jl.dim
            )));
        }
    }
    let kappa = jl.kappa;
    let (a0, a1, b0, b1) = (&a.real_part, &a.j_part, &b.real_part, &b.j_part);
    let mut real = vec![0.0; jl.dim];
    let mut jpart = vec![0.0; jl.dim];
    axpy(&mut real, 1.0, &jl.jordan(a0, b0));
    axpy(&mut real, -kappa, &jl.jordan(a1, b1));
    axpy(&mut real, -kappa, &jl.lie(a0, b1));
    axpy(&mut real, -kappa, &jl.lie(a1, b0));
    axpy(&mut jpart, 1.0, &jl.jordan(a0, b1));
    axpy(&mut jpart, 1.0, &jl.jordan(a1, b0));
    axpy(&mut jpart, 1.0, &jl.lie(a0, b0));
    axpy(&mut jpart, -kappa, &jl.lie(a1, b1));
    Ok(RingExtensionElement {
        real_part: real,
        j_part: jpart,
        kappa,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jordanlie::{ConversionParams, MatrixJordanLie};
    use crate::linalg::{from_rows, from_real_rows, pauli_y, I, ONE, ZERO};
    use proptest::prelude::*;

    #[test]
    fn adjoint_examples() {
        let x = from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let std = StarAlgebra::new(2).unwrap();
        let got = std.adjoint(&AlgebraElement::new(x.clone()).unwrap()).unwrap();
        assert_eq!(got.matrix(), &from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]));
        let split = StarAlgebra::with_signature(1, 1).unwrap();
        let got = split.adjoint(&AlgebraElement::new(x).unwrap()).unwrap();
        assert_eq!(got.matrix(), &from_real_rows(&[&[0.0, 0.0], &[-1.0, 0.0]]));
        let one = AlgebraElement::identity(2);
        assert_eq!(split.adjoint(&one).unwrap(), one);
    }

    #[test]
    fn adjoint_rejects_wrong_size() {
        let alg = StarAlgebra::new(2).unwrap();
        let err = alg.adjoint(&AlgebraElement::identity(3)).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
    }

    #[test]
    fn invert_examples() {
        let d = linalg::diag(&[c(2.0, 0.0), c(4.0, 0.0)]);
        let inv = invert(&AlgebraElement::new(d).unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!(inv.matrix(), &linalg::diag(&[c(0.5, 0.0), c(0.25, 0.0)]));
        let nil = AlgebraElement::new(from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]])).unwrap();
        assert!(matches!(invert(&nil, DEFAULT_TOL), Err(Error::Singular { .. })));
    }

    #[test]
    fn hermitian_examples() {
        let alg = StarAlgebra::new(2).unwrap();
        let h = |m: CMat| alg.is_hermitian(&AlgebraElement::new(m).unwrap());
        assert!(h(linalg::diag(&[c(1.0, 0.0), c(-3.0, 0.0)])));
        assert!(!h(from_rows(&[&[ZERO, I], &[ZERO, ZERO]])));
        assert!(h(pauli_y()));
        assert!(h(linalg::zeros(2, 2)));
    }

    #[test]
    fn p_star_dichotomy() {
        for n in 1..=4 {
            let report = StarAlgebra::new(n).unwrap().check_p_star(100, 1).unwrap();
            assert!(report.is_p_star, "n = {n}");
            assert!(report.witnesses.is_empty());
        }
        let split = StarAlgebra::with_signature(1, 1).unwrap();
        let report = split.check_p_star(100, 1).unwrap();
        assert!(!report.is_p_star);
        assert!(!report.witnesses.is_empty());
        assert!(!report.unit_in_cone);
        assert_eq!(report, split.check_p_star(100, 1).unwrap());
    }

    #[test]
    fn p_star_invertible_variant_agrees() {
        let alg = StarAlgebra::new(3).unwrap();
        let r = alg
            .check_p_star_with(50, 4, CongruenceVariant::Invertible)
            .unwrap();
        assert!(r.is_p_star);
    }

    #[test]
    fn p_star_rejects_zero_trials() {
        let alg = StarAlgebra::new(2).unwrap();
        assert!(matches!(alg.check_p_star(0, 1), Err(Error::Configuration(_))));
    }

    fn random_pair(jl: &JordanLieStructure, rng: &mut SeededRng) -> RingExtensionElement {
        let v = |rng: &mut SeededRng| (0..jl.dim).map(|_| linalg::uniform(rng, -1.0, 1.0)).collect();
        RingExtensionElement::new(v(rng), v(rng), jl.kappa).unwrap()
    }

    fn assoc_residual(jl: &JordanLieStructure, seed: u64) -> f64 {
        let mut rng = linalg::rng(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let a = random_pair(jl, &mut rng);
            let b = random_pair(jl, &mut rng);
            let cc = random_pair(jl, &mut rng);
            let left = ring_extension_product(&ring_extension_product(&a, &b, jl).unwrap(), &cc, jl).unwrap();
            let right = ring_extension_product(&a, &ring_extension_product(&b, &cc, jl).unwrap(), jl).unwrap();
            let scale = left.real_part.iter().chain(&left.j_part).fold(1.0_f64, |m, v| m.max(v.abs()));
            for (l, r) in left.real_part.iter().chain(&left.j_part).zip(right.real_part.iter().chain(&right.j_part)) {
                worst = worst.max((l - r).abs() / scale);
            }
        }
        worst
    }

    #[test]
    fn ring_extension_is_associative() {
        let alg = StarAlgebra::new(2).unwrap();
        let herm = MatrixJordanLie::from_star_algebra(&alg, &ConversionParams::quantum_v(0.5, 0.5)).unwrap();
        assert!((herm.jl.kappa - 1.0).abs() < 1e-15);
        assert!(assoc_residual(&herm.jl, 7) <= 1e-9);

        let full = MatrixJordanLie::from_associative(&alg, &ConversionParams::associative(0.5, 0.5)).unwrap();
        assert!((full.jl.kappa + 1.0).abs() < 1e-15);
        assert!(assoc_residual(&full.jl, 8) <= 1e-9);

        let poisson = JordanLieStructure::commutative_poisson(4);
        assert!(assoc_residual(&poisson, 9) <= 1e-9);
    }

    #[test]
    fn ring_extension_unit_and_dual_numbers() {
        let alg = StarAlgebra::new(2).unwrap();
        let herm = MatrixJordanLie::from_star_algebra(&alg, &ConversionParams::default()).unwrap();
        let e = herm.jl.unit.clone().unwrap();
        let mut rng = linalg::rng(2);
        let x = herm.coords(&linalg::random_hermitian(2, &mut rng));
        let prod = ring_extension_product(
            &RingExtensionElement::real(e, herm.jl.kappa),
            &RingExtensionElement::real(x.clone(), herm.jl.kappa),
            &herm.jl,
        )
        .unwrap();
        for (p, v) in prod.real_part.iter().zip(&x) {
            assert!((p - v).abs() < 1e-12);
        }
        assert!(prod.j_part.iter().all(|v| v.abs() < 1e-12));

        let poisson = JordanLieStructure::commutative_poisson(3);
        let a = RingExtensionElement::new(vec![1.0, 2.0, 3.0], vec![0.5, 0.0, -1.0], 0.0).unwrap();
        let b = RingExtensionElement::new(vec![2.0, -1.0, 1.0], vec![1.0, 1.0, 1.0], 0.0).unwrap();
        let prod = ring_extension_product(&a, &b, &poisson).unwrap();
        assert_eq!(prod.real_part, vec![2.0, -2.0, 3.0]);
        assert_eq!(prod.j_part, vec![1.0 * 1.0 + 0.5 * 2.0, 2.0, 3.0 - 1.0]);
    }

    #[test]
    fn ring_extension_rejects_kappa_mismatch() {
        let poisson = JordanLieStructure::commutative_poisson(2);
        let a = RingExtensionElement::real(vec![1.0, 0.0], 1.0);
        let err = ring_extension_product(&a, &a, &poisson).unwrap_err();
        assert!(matches!(err, Error::Configuration(_)));
    }

    fn matrix_strategy(n: usize) -> impl Strategy<Value = CMat> {
        prop::collection::vec(-5.0..5.0f64, 2 * n * n)
            .prop_map(move |v| CMat::from_fn(n, n, |i, j| c(v[2 * (i * n + j)], v[2 * (i * n + j) + 1])))
    }

    proptest! {
        #[test]
        fn involution_is_anti_automorphism(
            x in matrix_strategy(3),
            y in matrix_strategy(3),
            p in 0usize..=3,
        ) {
            let alg = StarAlgebra::with_signature(p, 3 - p).unwrap();
            let xy = &x * &y;
            let lhs = alg.adjoint_matrix(&xy);
            let rhs = alg.adjoint_matrix(&y) * alg.adjoint_matrix(&x);
            let scale = xy.norm().max(1.0);
            prop_assert!((lhs - rhs).norm() <= alg.tol * scale);
            prop_assert!((alg.adjoint_matrix(&alg.adjoint_matrix(&x)) - &x).norm() <= alg.tol * x.norm().max(1.0));
        }

        #[test]
        fn double_inverse_is_identity(seed in 0u64..1000) {
            let mut rng = linalg::rng(seed);
            let g = linalg::ginibre(3, &mut rng) + linalg::scalar(3, ONE * 3.0);
            let x = AlgebraElement::new(g.clone()).unwrap();
            let back = invert(&invert(&x, DEFAULT_TOL).unwrap(), DEFAULT_TOL).unwrap();
            prop_assert!((back.matrix() - &g).norm() <= 10.0 * DEFAULT_TOL * g.norm());
        }
    }
}
