//! The projective line over `M(n, C)`: `n`-dimensional subspaces of
//! `C^2n`, stored as orthonormal `2n x n` frames.
//!
//! A frame `[r; s]` has chart value `z = s r^-1`. A Möbius map with chart
//! matrix `[[a, b], [c, d]]` acts on chart values as `(az + b)(cz + d)^-1`,
//! which on frames is left multiplication by `[[d, c], [b, a]]`.
//! Antiholomorphic maps are stored as `zeta o h`, `zeta` being the
//! Euclidean orthocomplement.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::DEFAULT_TOL;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, MatrixData, ONE, ZERO};

/// Principal-angle tolerance for projective equality.
pub const EQ_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointData", into = "PointData")]
pub struct Point {
    frame: CMat,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointData {
    pub r: MatrixData,
    pub s: MatrixData,
}

impl TryFrom<PointData> for Point {
    type Error = Error;

    fn try_from(d: PointData) -> Result<Point> {
        Point::from_pair(&CMat::try_from(&d.r)?, &CMat::try_from(&d.s)?)
    }
}

impl From<Point> for PointData {
    fn from(p: Point) -> Self {
        PointData {
            r: MatrixData::from(&p.r()),
            s: MatrixData::from(&p.s()),
        }
    }
}

impl Point {
    /// Canonicalizes a full-rank `2n x n` frame to its orthonormal QR factor.
    pub fn from_frame(frame: &CMat) -> Result<Point> {
        let (rows, n) = frame.shape();
        if n == 0 || rows != 2 * n {
            return Err(Error::Dimension(format!(
                "a frame must be 2n x n, got {rows}x{n}"
            )));
        }
        if !linalg::is_finite(frame) {
            return Err(Error::Domain("non-finite frame entry".into()));
        }
        let ratio = linalg::condition_ratio(frame);
        if ratio <= DEFAULT_TOL {
            return Err(Error::Singular { ratio });
        }
        Ok(Point {
            frame: frame.clone().qr().q(),
        })
    }

    pub fn from_pair(r: &CMat, s: &CMat) -> Result<Point> {
        if r.shape() != s.shape() || !r.is_square() {
            return Err(Error::Dimension("r and s must be square of equal size".into()));
        }
        Point::from_frame(&linalg::vstack(r, s))
    }

    /// `[(1, z)]`
    pub fn from_chart(z: &CMat) -> Point {
        let n = z.nrows();
        let frame = linalg::vstack(&linalg::identity(n), z);
        Point {
            frame: frame.qr().q(),
        }
    }

    /// `[(0, 1)]`, the point at infinity of the standard chart.
    pub fn infinity(n: usize) -> Point {
        Point::from_pair(&linalg::zeros(n, n), &linalg::identity(n)).expect("full rank")
    }

    pub fn n(&self) -> usize {
        self.frame.ncols()
    }

    pub fn frame(&self) -> &CMat {
        &self.frame
    }

    pub fn r(&self) -> CMat {
        let n = self.n();
        self.frame.view((0, 0), (n, n)).into_owned()
    }

    pub fn s(&self) -> CMat {
        let n = self.n();
        self.frame.view((n, 0), (n, n)).into_owned()
    }

    /// `s r^-1`, or `NotInChart` when `r` is singular. The frame is
    /// orthonormal, so the smallest singular value of `r` is already a
    /// relative quantity.
    pub fn chart_value(&self) -> Result<CMat> {
        let r = self.r();
        let (smin, _) = linalg::singular_extremes(&r);
        if smin <= DEFAULT_TOL {
            return Err(Error::NotInChart);
        }
        let ri = r.try_inverse().ok_or(Error::NotInChart)?;
        Ok(self.s() * ri)
    }

    /// Largest principal-angle sine between the two subspaces.
    pub fn distance(&self, other: &Point) -> f64 {
        let q = &self.frame;
        let residual = &other.frame - q * (q.adjoint() * &other.frame);
        residual.norm()
    }

    pub fn equals(&self, other: &Point) -> bool {
        self.n() == other.n() && self.distance(other) <= EQ_TOL
    }

    /// `smin / smax` of `[frame(p) | frame(q)]`.
    pub fn transversality_margin(&self, other: &Point) -> f64 {
        linalg::condition_ratio(&linalg::hstack(&self.frame, &other.frame))
    }

    pub fn is_transversal(&self, other: &Point) -> bool {
        self.n() == other.n() && self.transversality_margin(other) > DEFAULT_TOL
    }
}

pub fn point_from_chart(z: &CMat) -> Point {
    Point::from_chart(z)
}

pub fn chart_value(p: &Point) -> Result<CMat> {
    p.chart_value()
}

pub fn point_equals(p: &Point, q: &Point) -> bool {
    p.equals(q)
}

pub fn transversal(p: &Point, q: &Point) -> bool {
    p.is_transversal(q)
}

/// Euclidean orthocomplement of the column span of a `2n x n` frame.
fn euclid_complement(frame: &CMat) -> CMat {
    let n = frame.ncols();
    let q = frame.clone().qr().q();
    let proj = linalg::identity(2 * n) - &q * q.adjoint();
    let (_, vecs) = linalg::herm_eig(&proj);
    vecs.columns(n, n).into_owned()
}

/// Block swap `[[0, 1], [1, 0]]` relating chart and frame matrices.
fn swap(n: usize) -> CMat {
    let (o, z) = (linalg::identity(n), linalg::zeros(n, n));
    linalg::block2(&z, &o, &o, &z)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MoebiusData", into = "MoebiusData")]
pub struct MoebiusMap {
    matrix: CMat,
    antiholomorphic: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MoebiusData {
    pub a: MatrixData,
    pub b: MatrixData,
    pub c: MatrixData,
    pub d: MatrixData,
    pub antiholomorphic: bool,
}

impl TryFrom<MoebiusData> for MoebiusMap {
    type Error = Error;

    fn try_from(d: MoebiusData) -> Result<MoebiusMap> {
        let m = linalg::block2(
            &CMat::try_from(&d.a)?,
            &CMat::try_from(&d.b)?,
            &CMat::try_from(&d.c)?,
            &CMat::try_from(&d.d)?,
        );
        MoebiusMap::new(m, d.antiholomorphic)
    }
}

impl From<MoebiusMap> for MoebiusData {
    fn from(m: MoebiusMap) -> Self {
        let (a, b, cc, d) = linalg::blocks(&m.matrix);
        MoebiusData {
            a: MatrixData::from(&a),
            b: MatrixData::from(&b),
            c: MatrixData::from(&cc),
            d: MatrixData::from(&d),
            antiholomorphic: m.antiholomorphic,
        }
    }
}

impl MoebiusMap {
    /// Chart matrix `[[a, b], [c, d]]`; antiholomorphic maps are
    /// `zeta o (z -> (az + b)(cz + d)^-1)`.
    pub fn new(matrix: CMat, antiholomorphic: bool) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols || rows % 2 != 0 || rows == 0 {
            return Err(Error::Dimension(format!(
                "a Möbius matrix must be 2n x 2n, got {rows}x{cols}"
            )));
        }
        let ratio = linalg::condition_ratio(&matrix);
        if ratio <= DEFAULT_TOL {
            return Err(Error::Singular { ratio });
        }
        Ok(MoebiusMap {
            matrix,
            antiholomorphic,
        })
    }

    pub fn holomorphic(matrix: CMat) -> Result<Self> {
        Self::new(matrix, false)
    }

    /// Blocks `z * 1_n` from a scalar 2x2 chart matrix.
    pub fn from_scalar(m: [[Complex64; 2]; 2], n: usize, antiholomorphic: bool) -> Result<Self> {
        Self::new(linalg::lift2(m, n), antiholomorphic)
    }

    /// Build from a frame matrix `T` (acting on `[r; s]` from the left).
    pub fn from_frame_matrix(t: &CMat, antiholomorphic: bool) -> Result<Self> {
        let p = swap(t.nrows() / 2);
        Self::new(&p * t * &p, antiholomorphic)
    }

    pub fn identity(n: usize) -> Self {
        MoebiusMap {
            matrix: linalg::identity(2 * n),
            antiholomorphic: false,
        }
    }

    /// `zeta`: the Euclidean orthocomplement, `z -> -conj(z)^-1` for `n = 1`.
    pub fn zeta(n: usize) -> Self {
        MoebiusMap {
            matrix: linalg::identity(2 * n),
            antiholomorphic: true,
        }
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn is_antiholomorphic(&self) -> bool {
        self.antiholomorphic
    }

    pub fn blocks(&self) -> (CMat, CMat, CMat, CMat) {
        linalg::blocks(&self.matrix)
    }

    pub fn frame_matrix(&self) -> CMat {
        let p = swap(self.n());
        &p * &self.matrix * &p
    }

    fn inv_adjoint(m: &CMat) -> CMat {
        linalg::inverse(&m.adjoint(), 0.0).expect("Möbius matrices are invertible")
    }

    /// `self o other` (other applied first). Moving `zeta` of an
    /// antiholomorphic `other` to the front turns `M` into `M^-*`.
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        let left = if other.antiholomorphic {
            Self::inv_adjoint(&self.matrix)
        } else {
            self.matrix.clone()
        };
        MoebiusMap {
            matrix: left * &other.matrix,
            antiholomorphic: self.antiholomorphic != other.antiholomorphic,
        }
    }

    pub fn inverse(&self) -> MoebiusMap {
        let matrix = if self.antiholomorphic {
            self.matrix.adjoint()
        } else {
            linalg::inverse(&self.matrix, 0.0).expect("Möbius matrices are invertible")
        };
        MoebiusMap {
            matrix,
            antiholomorphic: self.antiholomorphic,
        }
    }

    pub fn apply(&self, p: &Point) -> Result<Point> {
        if p.n() != self.n() {
            return Err(Error::Dimension(format!(
                "map on n = {} applied to a point with n = {}",
                self.n(),
                p.n()
            )));
        }
        let image = self.frame_matrix() * p.frame();
        if self.antiholomorphic {
            Point::from_frame(&euclid_complement(&image))
        } else {
            Point::from_frame(&image)
        }
    }

    /// Action on a chart value; `NotInChart` when the image is at infinity.
    pub fn apply_chart(&self, z: &CMat) -> Result<CMat> {
        self.apply(&Point::from_chart(z))?.chart_value()
    }

    /// Conjugation `self o g o self^-1`.
    pub fn conjugate(&self, g: &MoebiusMap) -> MoebiusMap {
        self.compose(g).compose(&self.inverse())
    }
}

pub fn apply_moebius(m: &MoebiusMap, p: &Point) -> Result<Point> {
    m.apply(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormKind {
    /// `u1* v1 + u2* v2`
    Euclid,
    /// `[[0, 1], [-1, 0]]`
    J,
    /// `[[0, 1], [1, 0]]`
    F,
    /// `diag(-1, 1)`
    I11,
}

/// Sesquilinear form `<x, y> = x* M y` on `C^2n` in frame coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct FormMatrix {
    pub name: String,
    pub matrix: CMat,
}

impl FormMatrix {
    pub fn standard(kind: FormKind, n: usize) -> Self {
        let m = match kind {
            FormKind::Euclid => [[ONE, ZERO], [ZERO, ONE]],
            FormKind::J => [[ZERO, ONE], [-ONE, ZERO]],
            FormKind::F => [[ZERO, ONE], [ONE, ZERO]],
            FormKind::I11 => [[-ONE, ZERO], [ZERO, ONE]],
        };
        FormMatrix {
            name: format!("{kind:?}"),
            matrix: linalg::lift2(m, n),
        }
    }

    pub fn custom(name: &str, matrix: CMat) -> Result<Self> {
        if !matrix.is_square() || !matrix.nrows().is_multiple_of(2) {
            return Err(Error::Dimension("form matrices are 2n x 2n".into()));
        }
        if !linalg::is_invertible(&matrix, DEFAULT_TOL) {
            return Err(Error::Configuration(format!("form `{name}` is degenerate")));
        }
        Ok(FormMatrix {
            name: name.to_string(),
            matrix,
        })
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// The antiholomorphic map `x -> x^perp`, which is `zeta o M*`.
    pub fn orthocomplement_map(&self) -> Result<MoebiusMap> {
        if !linalg::is_invertible(&self.matrix, DEFAULT_TOL) {
            return Err(Error::Configuration(format!("form `{}` is degenerate", self.name)));
        }
        MoebiusMap::from_frame_matrix(&self.matrix.adjoint(), true)
    }
}

/// `{ y : x* M y = 0 for all x in p }`
pub fn orthocomplement(p: &Point, form: &FormMatrix) -> Result<Point> {
    form.orthocomplement_map()?.apply(p)
}

/// `frame* M frame = 0`, relative to `|M|`.
pub fn is_lagrangian(p: &Point, form: &FormMatrix) -> bool {
    let f = p.frame();
    let g = f.adjoint() * &form.matrix * f;
    g.norm() <= DEFAULT_TOL * form.matrix.norm().max(1.0) * 10.0
}

fn require_transversal(pairs: &[(&Point, &Point, &str, &str)]) -> Result<()> {
    for (p, q, a, b) in pairs {
        if !p.is_transversal(q) {
            return Err(Error::not_transversal(a, b));
        }
    }
    Ok(())
}

/// `[A | B]` for a transversal pair.
fn pair_frame(a: &Point, b: &Point) -> CMat {
    linalg::hstack(a.frame(), b.frame())
}

/// Holomorphic map acting as `lambda` on `b` and as the identity on `a`,
/// in the decomposition `C^2n = a (+) b`.
pub fn dilation(lambda: Complex64, a: &Point, b: &Point) -> Result<MoebiusMap> {
    require_transversal(&[(a, b, "a", "b")])?;
    if lambda == ZERO {
        return Err(Error::Domain("dilation factor must be nonzero".into()));
    }
    let n = a.n();
    let t = pair_frame(a, b);
    let d = linalg::block2(
        &linalg::identity(n),
        &linalg::zeros(n, n),
        &linalg::zeros(n, n),
        &linalg::scalar(n, lambda),
    );
    let ti = linalg::inverse(&t, 0.0)?;
    MoebiusMap::from_frame_matrix(&(&t * d * ti), false)
}

/// Frames `A', B'` of `a`, `b` normalized so that `A' + B'` spans `c`.
fn normalized_pair(a: &Point, b: &Point, cpt: &Point) -> Result<CMat> {
    require_transversal(&[(a, b, "a", "b"), (a, cpt, "a", "c"), (b, cpt, "b", "c")])?;
    let n = a.n();
    let t = pair_frame(a, b);
    let coeffs = linalg::inverse(&t, 0.0)? * cpt.frame();
    let alpha = coeffs.rows(0, n).into_owned();
    let beta = coeffs.rows(n, n).into_owned();
    let a2 = a.frame() * alpha;
    let b2 = b.frame() * beta;
    Ok(linalg::hstack(&a2, &b2))
}

/// Holomorphic involution swapping `a` and `b` and fixing `c`.
pub fn symmetry_j(a: &Point, b: &Point, cpt: &Point) -> Result<MoebiusMap> {
    let t = normalized_pair(a, b, cpt)?;
    let ti = linalg::inverse(&t, 0.0)?;
    MoebiusMap::from_frame_matrix(&(&t * swap(a.n()) * ti), false)
}

/// Antiholomorphic involution swapping `a` and `b` and fixing `c`: the
/// orthocomplement for `beta = u* u' - v* v'` in the normalized frame.
pub fn real_form_tau(a: &Point, b: &Point, cpt: &Point) -> Result<MoebiusMap> {
    let t = normalized_pair(a, b, cpt)?;
    let n = a.n();
    let ti = linalg::inverse(&t, 0.0)?;
    let beta = linalg::lift2([[ONE, ZERO], [ZERO, -ONE]], n);
    let q = ti.adjoint() * beta * ti;
    FormMatrix::custom("beta", q)?.orthocomplement_map()
}

/// Coordinates `(r, s)` of a frame in the basis `[A | B]`.
fn split_coords(t_inv: &CMat, p: &Point) -> (CMat, CMat) {
    let n = p.n();
    let v = t_inv * p.frame();
    (v.rows(0, n).into_owned(), v.rows(n, n).into_owned())
}

/// `z_c z'_d`: `z_c` is the value of `c` in the chart with origin `a` and
/// infinity `b`; `z'_d` the value of `d` in the chart with origin `b` and
/// infinity `a`. Defined up to conjugation, so its trace is invariant.
pub fn cross_ratio(a: &Point, b: &Point, cpt: &Point, d: &Point) -> Result<CMat> {
    require_transversal(&[(a, b, "a", "b"), (cpt, b, "c", "b"), (d, a, "d", "a")])?;
    let t_inv = linalg::inverse(&pair_frame(a, b), 0.0)?;
    let (rc, sc) = split_coords(&t_inv, cpt);
    let (rd, sd) = split_coords(&t_inv, d);
    let zc = sc * linalg::inverse(&rc, 0.0)?;
    let zd = rd * linalg::inverse(&sd, 0.0)?;
    Ok(zc * zd)
}

/// `c * 1_n`
pub fn scalar_point(z: Complex64, n: usize) -> Point {
    Point::from_chart(&linalg::scalar(n, z))
}

/// Chart value of a scalar point (`n = 1` or a multiple of the identity),
/// `None` at infinity.
pub fn scalar_chart_value(p: &Point) -> Option<Complex64> {
    p.chart_value().ok().map(|z| z[(0, 0)])
}

/// Sample a point `[(1, z)]` with Ginibre `z`.
pub fn random_point(n: usize, rng: &mut linalg::SeededRng) -> Point {
    Point::from_chart(&linalg::ginibre(n, rng))
}

/// Random holomorphic map with a Ginibre `2n x 2n` matrix.
pub fn random_moebius(n: usize, rng: &mut linalg::SeededRng) -> MoebiusMap {
    loop {
        let m = linalg::ginibre(2 * n, rng);
        if let Ok(map) = MoebiusMap::holomorphic(m) {
            return map;
        }
    }
}

/// Random holomorphic map whose matrix is unitary, so it commutes with `zeta`.
pub fn random_unitary_moebius(n: usize, rng: &mut linalg::SeededRng) -> MoebiusMap {
    MoebiusMap::holomorphic(linalg::random_unitary(2 * n, rng)).expect("unitary is invertible")
}

/// Scalar helper for tests and tables: `z -> (az + b)(cz + d)^-1`.
pub fn scalar_moebius(a: Complex64, b: Complex64, cc: Complex64, d: Complex64, n: usize) -> Result<MoebiusMap> {
    MoebiusMap::from_scalar([[a, b], [cc, d]], n, false)
}
