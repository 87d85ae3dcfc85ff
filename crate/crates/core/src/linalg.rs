//! Dense complex matrix helpers shared by every module.
//!
//! All matrices are `nalgebra::DMatrix<Complex64>`. Invertibility is decided
//! by the ratio of extreme singular values, never by the determinant.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;

/// Seeded generator used by every sampler in the crate.
pub type SeededRng = ChaCha8Rng;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> CMat {
    CMat::zeros(rows, cols)
}

pub fn scalar(n: usize, z: Complex64) -> CMat {
    identity(n) * z
}

pub fn diag(entries: &[Complex64]) -> CMat {
    let n = entries.len();
    let mut m = zeros(n, n);
    for (k, z) in entries.iter().enumerate() {
        m[(k, k)] = *z;
    }
    m
}

pub fn from_rows(rows: &[&[Complex64]]) -> CMat {
    let r = rows.len();
    let cols = rows.first().map_or(0, |row| row.len());
    CMat::from_fn(r, cols, |i, j| rows[i][j])
}

/// Entrywise real matrix lifted to complex.
pub fn from_real_rows(rows: &[&[f64]]) -> CMat {
    let r = rows.len();
    let cols = rows.first().map_or(0, |row| row.len());
    CMat::from_fn(r, cols, |i, j| c(rows[i][j], 0.0))
}

pub fn trace(m: &CMat) -> Complex64 {
    m.diagonal().iter().copied().sum()
}

/// Largest absolute entry, used as a cheap scale for relative residuals.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Extreme singular values `(min, max)`.
pub fn singular_extremes(m: &CMat) -> (f64, f64) {
    let sv = m.singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    (min, max)
}

/// `smin / smax`, zero for the zero matrix.
pub fn condition_ratio(m: &CMat) -> f64 {
    let (min, max) = singular_extremes(m);
    if max == 0.0 {
        0.0
    } else {
        min / max
    }
}

pub fn is_invertible(m: &CMat, tol: f64) -> bool {
    m.is_square() && condition_ratio(m) > tol
}

pub fn inverse(m: &CMat, tol: f64) -> Result<CMat> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "cannot invert a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    let ratio = condition_ratio(m);
    if ratio <= tol {
        return Err(Error::Singular { ratio });
    }
    m.clone().try_inverse().ok_or(Error::Singular { ratio })
}

/// Eigen-decomposition of a hermitian matrix: ascending eigenvalues and the
/// unitary matrix of eigenvectors (columns).
pub fn herm_eig(h: &CMat) -> (Vec<f64>, CMat) {
    let sym = (h + h.adjoint()) * c(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut pairs: Vec<(f64, usize)> = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .map(|(k, v)| (v, k))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = h.nrows();
    let mut vecs = zeros(n, n);
    for (col, (_, k)) in pairs.iter().enumerate() {
        vecs.set_column(col, &eig.eigenvectors.column(*k));
    }
    (pairs.into_iter().map(|p| p.0).collect(), vecs)
}

/// `f(h)` for hermitian `h` by the spectral theorem.
pub fn herm_fn(h: &CMat, f: impl Fn(f64) -> Complex64) -> CMat {
    let (vals, vecs) = herm_eig(h);
    let d = diag(&vals.iter().map(|&v| f(v)).collect::<Vec<_>>());
    &vecs * d * vecs.adjoint()
}

/// `exp(i t h)` for hermitian `h`; exactly unitary up to rounding.
pub fn expm_i_herm(h: &CMat, t: f64) -> CMat {
    herm_fn(h, |v| Complex64::from_polar(1.0, t * v))
}

/// Nearest unitary matrix (polar factor) via the SVD.
pub fn polar_unitary(m: &CMat) -> CMat {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd u requested");
    let v_t = svd.v_t.expect("svd v_t requested");
    u * v_t
}

/// `‖u* u − 1‖_F`
pub fn unitarity_defect(u: &CMat) -> f64 {
    (u.adjoint() * u - identity(u.nrows())).norm()
}

/// Stack `top` over `bottom`.
pub fn vstack(top: &CMat, bottom: &CMat) -> CMat {
    let mut m = zeros(top.nrows() + bottom.nrows(), top.ncols());
    m.view_mut((0, 0), (top.nrows(), top.ncols())).copy_from(top);
    m.view_mut((top.nrows(), 0), (bottom.nrows(), bottom.ncols()))
        .copy_from(bottom);
    m
}

/// Place `left` next to `right`.
pub fn hstack(left: &CMat, right: &CMat) -> CMat {
    let mut m = zeros(left.nrows(), left.ncols() + right.ncols());
    m.view_mut((0, 0), (left.nrows(), left.ncols())).copy_from(left);
    m.view_mut((0, left.ncols()), (right.nrows(), right.ncols()))
        .copy_from(right);
    m
}

/// 2×2 block matrix `[[a, b], [c, d]]` with square blocks of equal size.
pub fn block2(a: &CMat, b: &CMat, cc: &CMat, d: &CMat) -> CMat {
    vstack(&hstack(a, b), &hstack(cc, d))
}

/// Split a `2n×2n` matrix into its four `n×n` blocks.
pub fn blocks(m: &CMat) -> (CMat, CMat, CMat, CMat) {
    let n = m.nrows() / 2;
    (
        m.view((0, 0), (n, n)).into_owned(),
        m.view((0, n), (n, n)).into_owned(),
        m.view((n, 0), (n, n)).into_owned(),
        m.view((n, n), (n, n)).into_owned(),
    )
}

/// Lift a scalar 2×2 matrix to the block matrix with blocks `z · 1_n`.
pub fn lift2(m: [[Complex64; 2]; 2], n: usize) -> CMat {
    block2(
        &scalar(n, m[0][0]),
        &scalar(n, m[0][1]),
        &scalar(n, m[1][0]),
        &scalar(n, m[1][1]),
    )
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

pub fn pauli_x() -> CMat {
    from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_y() -> CMat {
    from_rows(&[&[ZERO, -I], &[I, ZERO]])
}

pub fn pauli_z() -> CMat {
    from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
}

pub fn gaussian(rng: &mut SeededRng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn gaussian_vec(len: usize, rng: &mut SeededRng) -> Vec<f64> {
    (0..len).map(|_| gaussian(rng)).collect()
}

/// Ginibre matrix: iid complex Gaussian entries with unit variance.
pub fn ginibre(n: usize, rng: &mut SeededRng) -> CMat {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_fn(n, n, |_, _| c(gaussian(rng) * scale, gaussian(rng) * scale))
}

/// Random hermitian matrix `(g + g*) / 2` from a Ginibre `g`.
pub fn random_hermitian(n: usize, rng: &mut SeededRng) -> CMat {
    let g = ginibre(n, rng);
    (&g + g.adjoint()) * c(0.5, 0.0)
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` pushed into `Q`.
pub fn random_unitary(n: usize, rng: &mut SeededRng) -> CMat {
    let qr = ginibre(n, rng).qr();
    let q = qr.q();
    let r = qr.r();
    let phases: Vec<Complex64> = (0..n)
        .map(|k| {
            let d = r[(k, k)];
            if d.norm() == 0.0 {
                ONE
            } else {
                d / d.norm()
            }
        })
        .collect();
    q * diag(&phases)
}

/// Random positive-definite matrix `g g* + 1/n`.
pub fn random_positive(n: usize, rng: &mut SeededRng) -> CMat {
    let g = ginibre(n, rng);
    &g * g.adjoint() + scalar(n, c(1.0 / n as f64, 0.0))
}

pub fn uniform(rng: &mut SeededRng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

/// Standard Cauchy variate.
pub fn cauchy(rng: &mut SeededRng) -> f64 {
    let u: f64 = rng.random_range(-0.499_999..0.499_999);
    (std::f64::consts::PI * u).tan()
}

/// Row-major plain-data form of a complex matrix, used for JSON export.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MatrixData {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&CMat> for MatrixData {
    fn from(m: &CMat) -> Self {
        MatrixData {
            rows: m.nrows(),
            cols: m.ncols(),
            re: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect())
                .collect(),
            im: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)].im).collect())
                .collect(),
        }
    }
}

impl TryFrom<&MatrixData> for CMat {
    type Error = Error;

    fn try_from(d: &MatrixData) -> Result<CMat> {
        let ok = d.re.len() == d.rows
            && d.im.len() == d.rows
            && d.re.iter().chain(d.im.iter()).all(|row| row.len() == d.cols);
        if !ok {
            return Err(Error::Dimension(format!(
                "matrix data does not match its {}x{} shape",
                d.rows, d.cols
            )));
        }
        Ok(CMat::from_fn(d.rows, d.cols, |i, j| c(d.re[i][j], d.im[i][j])))
    }
}

/// `serde(with = ...)` adapter for `CMat` fields.
pub mod serde_cmat {
    use super::{CMat, MatrixData};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &CMat, s: S) -> Result<S::Ok, S::Error> {
        MatrixData::from(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMat, D::Error> {
        let data = MatrixData::deserialize(d)?;
        CMat::try_from(&data).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_unitary_is_unitary() {
        let mut r = rng(3);
        for n in 1..=4 {
            let u = random_unitary(n, &mut r);
            assert!(unitarity_defect(&u) < 1e-12);
        }
    }

    #[test]
    fn expm_matches_scalar_exponential() {
        let h = diag(&[c(1.0, 0.0), c(-2.0, 0.0)]);
        let u = expm_i_herm(&h, 0.5);
        assert!((u[(0, 0)] - Complex64::from_polar(1.0, 0.5)).norm() < 1e-14);
        assert!((u[(1, 1)] - Complex64::from_polar(1.0, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn inverse_rejects_nilpotent() {
        let m = from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(inverse(&m, 1e-9), Err(Error::Singular { .. })));
    }

    #[test]
    fn polar_projection_of_scaled_unitary() {
        let mut r = rng(11);
        let u = random_unitary(3, &mut r);
        let p = polar_unitary(&(&u * c(2.5, 0.0)));
        assert!((p - u).norm() < 1e-12);
    }

    #[test]
    fn matrix_data_round_trip() {
        let mut r = rng(2);
        let m = ginibre(3, &mut r);
        let back = CMat::try_from(&MatrixData::from(&m)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn block_round_trip() {
        let mut r = rng(5);
        let m = ginibre(4, &mut r);
        let (a, b, cc, d) = blocks(&m);
        assert_eq!(block2(&a, &b, &cc, &d), m);
    }
}
