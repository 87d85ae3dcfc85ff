//! The six poles `O, W, N, S, F, B` (chart values `0, inf, i, -i, 1, -1`)
//! and the 48-element group of holomorphic and antiholomorphic maps that
//! permutes them.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, I, ONE, ZERO};
use crate::projline::{self, MoebiusMap, Point};

pub const POLE_NAMES: [&str; 6] = ["O", "W", "N", "S", "F", "B"];
pub const O: usize = 0;
pub const W: usize = 1;
pub const N: usize = 2;
pub const S: usize = 3;
pub const F: usize = 4;
pub const B: usize = 5;

/// Opposite pole: the pairs are `(O, W)`, `(N, S)`, `(F, B)`.
pub const fn opposite(i: usize) -> usize {
    i ^ 1
}

/// `perm[i]` is the image of pole `i`.
pub type Perm = [usize; 6];

pub const IDENTITY_PERM: Perm = [0, 1, 2, 3, 4, 5];

/// `(p o q)[i] = p[q[i]]`
pub fn compose_perm(p: &Perm, q: &Perm) -> Perm {
    let mut out = [0; 6];
    for i in 0..6 {
        out[i] = p[q[i]];
    }
    out
}

pub fn invert_perm(p: &Perm) -> Perm {
    let mut out = [0; 6];
    for i in 0..6 {
        out[p[i]] = i;
    }
    out
}

pub fn perm_order(p: &Perm) -> usize {
    let mut q = *p;
    let mut k = 1;
    while q != IDENTITY_PERM {
        q = compose_perm(p, &q);
        k += 1;
    }
    k
}

pub fn preserves_opposition(p: &Perm) -> bool {
    (0..6).all(|i| p[opposite(i)] == opposite(p[i]))
}

/// Cycle notation in pole letters, e.g. `(FNBS)`; `id` for the identity.
pub fn cycle_notation(p: &Perm) -> String {
    let mut seen = [false; 6];
    let mut out = String::new();
    for start in 0..6 {
        if seen[start] || p[start] == start {
            continue;
        }
        out.push('(');
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            out.push_str(POLE_NAMES[i]);
            i = p[i];
        }
        out.push(')');
    }
    if out.is_empty() {
        "id".into()
    } else {
        out
    }
}

/// Parses cycle notation read left to right: `(FNBS)` sends F to N.
pub fn parse_cycles(s: &str) -> Result<Perm> {
    let mut perm = IDENTITY_PERM;
    if s.trim() == "id" {
        return Ok(perm);
    }
    let idx = |ch: char| {
        POLE_NAMES
            .iter()
            .position(|n| n.starts_with(ch))
            .ok_or_else(|| Error::Configuration(format!("unknown pole `{ch}` in `{s}`")))
    };
    for cycle in s.split(')').map(|t| t.trim().trim_start_matches('(')).filter(|t| !t.is_empty()) {
        let labels: Vec<usize> = cycle.chars().filter(|ch| !ch.is_whitespace()).map(idx).collect::<Result<_>>()?;
        for (k, &from) in labels.iter().enumerate() {
            perm[from] = labels[(k + 1) % labels.len()];
        }
    }
    let mut hit = [false; 6];
    for &v in &perm {
        hit[v] = true;
    }
    if hit.iter().any(|h| !h) {
        return Err(Error::Configuration(format!("`{s}` is not a permutation")));
    }
    Ok(perm)
}

#[derive(Debug, Clone)]
pub struct PoleSet {
    pub points: [Point; 6],
}

impl PoleSet {
    /// `O = [(1,0)]`, `W = [(0,1)]`, `F = [(1,1)]` and the images of `F`
    /// under `z -> i^k z`.
    pub fn standard(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Configuration("n must be at least 1".into()));
        }
        let o = Point::from_chart(&linalg::zeros(n, n));
        let w = Point::infinity(n);
        let f = Point::from_chart(&linalg::identity(n));
        let rot = |k: i32| -> Result<Point> {
            projline::dilation(I.powi(k), &o, &w)?.apply(&f)
        };
        let nn = rot(1)?;
        let bb = rot(2)?;
        let ss = rot(3)?;
        Ok(PoleSet {
            points: [o, w, nn, ss, f, bb],
        })
    }

    pub fn n(&self) -> usize {
        self.points[0].n()
    }

    pub fn get(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn find(&self, p: &Point) -> Option<usize> {
        self.points.iter().position(|q| q.equals(p))
    }

    pub fn pairwise_transversal(&self) -> bool {
        (0..6).all(|i| ((i + 1)..6).all(|j| self.points[i].is_transversal(&self.points[j])))
    }
}

/// Image of every pole, matched back into the pole set.
pub fn derive_permutation(map: &MoebiusMap, poles: &PoleSet) -> Result<Perm> {
    let mut perm = [0; 6];
    for (i, p) in poles.points.iter().enumerate() {
        let image = map.apply(p)?;
        perm[i] = poles.find(&image).ok_or_else(|| {
            Error::Consistency(format!("image of pole {} is not a pole", POLE_NAMES[i]))
        })?;
    }
    let mut hit = [false; 6];
    for &v in &perm {
        hit[v] = true;
    }
    if hit.iter().any(|h| !h) || !preserves_opposition(&perm) {
        return Err(Error::Consistency(format!(
            "pole action {perm:?} is not an opposition-preserving bijection"
        )));
    }
    Ok(perm)
}

#[derive(Debug, Clone)]
pub struct OctElement {
    pub map: MoebiusMap,
    pub perm: Perm,
    pub holomorphic: bool,
    pub order: usize,
    pub label: Option<String>,
}

impl OctElement {
    fn new(map: MoebiusMap, poles: &PoleSet, label: Option<&str>) -> Result<Self> {
        let map = normalized(&map);
        let perm = derive_permutation(&map, poles)?;
        Ok(OctElement {
            holomorphic: !map.is_antiholomorphic(),
            map,
            perm,
            order: 0,
            label: label.map(str::to_string),
        })
    }

    /// Scalar chart matrix `(a, b, c, d)` read off the blocks.
    pub fn scalar_matrix(&self) -> [Complex64; 4] {
        let m = self.map.matrix();
        let n = m.nrows() / 2;
        [m[(0, 0)], m[(0, n)], m[(n, 0)], m[(n, n)]]
    }
}

/// Rescale so that `|M|_F = sqrt(2n)`; the projective map is unchanged.
fn normalized(map: &MoebiusMap) -> MoebiusMap {
    let m = map.matrix();
    let scale = (m.nrows() as f64).sqrt() / m.norm();
    MoebiusMap::new(m * c(scale, 0.0), map.is_antiholomorphic()).expect("rescaling keeps invertibility")
}

/// Maps agree on the six poles and on the probe points.
pub fn maps_equal(a: &MoebiusMap, b: &MoebiusMap, points: &[Point]) -> bool {
    a.is_antiholomorphic() == b.is_antiholomorphic()
        && points
            .iter()
            .all(|p| match (a.apply(p), b.apply(p)) {
                (Ok(x), Ok(y)) => x.equals(&y),
                _ => false,
            })
}

pub const MAX_ROUNDS: usize = 10;
const PROBE_SEED: u64 = 0x0c7a;

#[derive(Debug, Clone)]
pub struct OctGroup {
    pub poles: PoleSet,
    pub probes: Vec<Point>,
    pub elements: Vec<OctElement>,
    /// `cayley_table[i][j]` is the index of `elements[i] o elements[j]`.
    pub cayley_table: Vec<Vec<usize>>,
    pub rounds: usize,
}

/// The generators `i_{N,S}`, `i_{O,W}`, `i_{F,B}` and `zeta`.
pub fn standard_generators(poles: &PoleSet) -> Result<Vec<(String, MoebiusMap)>> {
    let p = |i| poles.get(i);
    Ok(vec![
        ("i_NS".into(), projline::dilation(I, p(N), p(S))?),
        ("i_OW".into(), projline::dilation(I, p(O), p(W))?),
        ("i_FB".into(), projline::dilation(I, p(F), p(B))?),
        ("zeta".into(), MoebiusMap::zeta(poles.n())),
    ])
}

pub fn generate_group(poles: &PoleSet) -> Result<OctGroup> {
    let gens = standard_generators(poles)?;
    generate_from(poles, &gens)
}

/// Breadth-first closure under composition, deduplicated by pole
/// permutation and by the images of three seeded probe points.
pub fn generate_from(poles: &PoleSet, generators: &[(String, MoebiusMap)]) -> Result<OctGroup> {
    let n = poles.n();
    let mut rng = linalg::rng(PROBE_SEED);
    let probes: Vec<Point> = (0..3).map(|_| projline::random_point(n, &mut rng)).collect();

    let find = |elements: &[OctElement], e: &OctElement| {
        elements
            .iter()
            .position(|x| x.perm == e.perm && x.holomorphic == e.holomorphic && maps_equal(&x.map, &e.map, &probes))
    };

    let mut elements = vec![OctElement::new(MoebiusMap::identity(n), poles, Some("id"))?];
    for (label, g) in generators {
        let e = OctElement::new(g.clone(), poles, Some(label))?;
        if find(&elements, &e).is_none() {
            elements.push(e);
        }
    }
    let mut rounds = 0;
    let mut closed = false;
    while rounds < MAX_ROUNDS {
        rounds += 1;
        let snapshot = elements.len();
        for i in 0..snapshot {
            for j in 0..snapshot {
                let prod = OctElement::new(elements[i].map.compose(&elements[j].map), poles, None)?;
                if find(&elements, &prod).is_none() {
                    elements.push(prod);
                }
            }
        }
        if elements.len() == snapshot {
            closed = true;
            break;
        }
    }
    if !closed {
        return Err(Error::Consistency(format!(
            "no closure after {MAX_ROUNDS} rounds ({} elements)",
            elements.len()
        )));
    }

    // Deterministic order: identity, holomorphic before antiholomorphic,
    // then by permutation.
    elements.sort_by_key(|e| (!e.holomorphic, e.perm));
    for e in &mut elements {
        e.order = perm_order(&e.perm);
    }
    let mut table = vec![vec![0; elements.len()]; elements.len()];
    for i in 0..elements.len() {
        for j in 0..elements.len() {
            let prod = OctElement::new(elements[i].map.compose(&elements[j].map), poles, None)?;
            table[i][j] = find(&elements, &prod).ok_or_else(|| {
                Error::Consistency(format!("product of elements {i} and {j} left the group"))
            })?;
        }
    }
    Ok(OctGroup {
        poles: poles.clone(),
        probes,
        elements,
        cayley_table: table,
        rounds,
    })
}

impl OctGroup {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn n(&self) -> usize {
        self.poles.n()
    }

    pub fn holomorphic_count(&self) -> usize {
        self.elements.iter().filter(|e| e.holomorphic).count()
    }

    /// Poles followed by the probe points.
    pub fn check_points(&self) -> Vec<Point> {
        let mut pts = self.poles.points.to_vec();
        pts.extend(self.probes.iter().cloned());
        pts
    }

    /// Index of the element equal to `map`, if it belongs to the group.
    pub fn locate(&self, map: &MoebiusMap) -> Option<usize> {
        let perm = derive_permutation(map, &self.poles).ok()?;
        self.elements
            .iter()
            .position(|e| e.perm == perm && maps_equal(&e.map, map, &self.probes))
    }

    pub fn identity_index(&self) -> usize {
        self.elements
            .iter()
            .position(|e| e.perm == IDENTITY_PERM && e.holomorphic)
            .expect("identity present")
    }

    pub fn zeta_index(&self) -> Option<usize> {
        self.locate(&MoebiusMap::zeta(self.n()))
    }

    pub fn inverse_index(&self, i: usize) -> usize {
        let id = self.identity_index();
        self.cayley_table[i]
            .iter()
            .position(|&k| k == id)
            .expect("group elements have inverses")
    }
}

/// Signed permutation of the three axes `(O,W)`, `(N,S)`, `(F,B)` with
/// positive ends `O`, `N`, `F`: its determinant.
pub fn axis_determinant(p: &Perm) -> i32 {
    let axes: Vec<usize> = (0..3).map(|k| p[2 * k] / 2).collect();
    let signs: i32 = (0..3).map(|k| if p[2 * k].is_multiple_of(2) { 1 } else { -1 }).product();
    let mut inversions = 0;
    for i in 0..3 {
        for j in (i + 1)..3 {
            if axes[i] > axes[j] {
                inversions += 1;
            }
        }
    }
    let sign = if inversions % 2 == 0 { 1 } else { -1 };
    sign * signs
}

/// Abstract symbol of a pole: `1, 1'` for `O, W`; `2, 2'` for `F, B`;
/// `3, 3'` for `N, S`.
pub fn abstract_symbol(i: usize) -> &'static str {
    ["1", "1'", "3", "3'", "2", "2'"][i]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbstractGroupReport {
    pub order: usize,
    pub zeta_central: bool,
    pub kernel_order: usize,
    pub image_order: usize,
    pub rotation_subgroup_order: usize,
    pub rotation_subgroup_closed: bool,
    pub direct_product: bool,
    pub pass: bool,
}

/// All permutations of the six symbols compatible with the pairing
/// `i <-> i'`.
pub fn abstract_octahedral_group() -> Vec<Perm> {
    let mut out = Vec::new();
    let axis_perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for axes in axis_perms {
        for flips in 0..8u32 {
            let mut p = [0; 6];
            for k in 0..3 {
                let flip = (flips >> k) & 1 == 1;
                let target = 2 * axes[k];
                p[2 * k] = if flip { target + 1 } else { target };
                p[2 * k + 1] = opposite(p[2 * k]);
            }
            out.push(p);
        }
    }
    out.sort();
    out
}

fn axis_image(p: &Perm) -> [usize; 3] {
    [p[0] / 2, p[2] / 2, p[4] / 2]
}

pub fn check_abstract_group(group: &[Perm]) -> AbstractGroupReport {
    let zeta: Perm = [1, 0, 3, 2, 5, 4];
    let zeta_central = group.contains(&zeta)
        && group
            .iter()
            .all(|g| compose_perm(g, &zeta) == compose_perm(&zeta, g));
    let kernel_order = group.iter().filter(|g| axis_image(g) == [0, 1, 2]).count();
    let mut images: Vec<[usize; 3]> = group.iter().map(axis_image).collect();
    images.sort();
    images.dedup();
    let rotations: Vec<Perm> = group.iter().copied().filter(|g| axis_determinant(g) == 1).collect();
    let rotation_subgroup_closed = rotations
        .iter()
        .all(|a| rotations.iter().all(|b| rotations.contains(&compose_perm(a, b))));
    let direct_product = !rotations.contains(&zeta)
        && group.iter().all(|g| {
            rotations.contains(g) || rotations.contains(&compose_perm(&zeta, g))
        });
    let order = group.len();
    AbstractGroupReport {
        order,
        zeta_central,
        kernel_order,
        image_order: images.len(),
        rotation_subgroup_order: rotations.len(),
        rotation_subgroup_closed,
        direct_product,
        pass: order == 48
            && zeta_central
            && kernel_order == 8
            && images.len() == 6
            && rotations.len() == 24
            && rotation_subgroup_closed
            && direct_product,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusEntry {
    pub order: usize,
    pub holomorphic: bool,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsomorphismReport {
    pub size: usize,
    pub holomorphic: usize,
    pub injective: bool,
    pub homomorphism_failures: usize,
    pub onto_abstract: bool,
    pub zeta_central: bool,
    pub holomorphic_iff_rotation: bool,
    pub census: Vec<CensusEntry>,
    pub pass: bool,
}

pub fn check_isomorphism(group: &OctGroup) -> IsomorphismReport {
    let perms: Vec<Perm> = group.elements.iter().map(|e| e.perm).collect();
    let mut sorted = perms.clone();
    sorted.sort();
    sorted.dedup();
    let injective = sorted.len() == perms.len();
    let mut failures = 0;
    for (i, row) in group.cayley_table.iter().enumerate() {
        for (j, &k) in row.iter().enumerate() {
            if perms[k] != compose_perm(&perms[i], &perms[j]) {
                failures += 1;
            }
        }
    }
    let onto_abstract = sorted == abstract_octahedral_group();
    let zeta_central = match group.zeta_index() {
        Some(z) => (0..group.len()).all(|g| group.cayley_table[z][g] == group.cayley_table[g][z]),
        None => false,
    };
    let holomorphic_iff_rotation = group
        .elements
        .iter()
        .all(|e| e.holomorphic == (axis_determinant(&e.perm) == 1));
    let mut census: Vec<CensusEntry> = Vec::new();
    for e in &group.elements {
        match census
            .iter_mut()
            .find(|c| c.order == e.order && c.holomorphic == e.holomorphic)
        {
            Some(entry) => entry.count += 1,
            None => census.push(CensusEntry {
                order: e.order,
                holomorphic: e.holomorphic,
                count: 1,
            }),
        }
    }
    census.sort_by_key(|c| (!c.holomorphic, c.order));
    let size = group.len();
    let holomorphic = group.holomorphic_count();
    IsomorphismReport {
        size,
        holomorphic,
        injective,
        homomorphism_failures: failures,
        onto_abstract,
        zeta_central,
        holomorphic_iff_rotation,
        census,
        pass: size == 48
            && holomorphic == 24
            && injective
            && failures == 0
            && onto_abstract
            && zeta_central
            && holomorphic_iff_rotation,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilizerReport {
    /// Holomorphic elements fixing `N`.
    pub elements: Vec<usize>,
    /// Which of `lambda = 1, i, -1, -i` each dilation `lambda_{N,S}` is found as.
    pub dilations: Vec<Option<usize>>,
    pub cyclic: bool,
    pub pass: bool,
}

pub fn stabilizer_of_n(group: &OctGroup) -> Result<StabilizerReport> {
    let elements: Vec<usize> = (0..group.len())
        .filter(|&i| group.elements[i].holomorphic && group.elements[i].perm[N] == N)
        .collect();
    let mut dilations = Vec::new();
    for k in 0..4 {
        let d = projline::dilation(I.powi(k), group.poles.get(N), group.poles.get(S))?;
        dilations.push(group.locate(&d));
    }
    let mut found: Vec<usize> = dilations.iter().flatten().copied().collect();
    found.sort();
    let cyclic = elements.iter().any(|&i| group.elements[i].order == 4);
    let pass = elements.len() == 4 && found == elements && cyclic;
    Ok(StabilizerReport {
        elements,
        dilations,
        cyclic,
        pass,
    })
}

/// The real forms fixed by `zeta o (-1)_{N,S}` (`z -> conj z`),
/// `zeta o (-1)_{F,B}` (`z -> -conj z`) and `zeta o (-1)_{O,W}`
/// (`z -> conj(z)^-1`).
pub fn major_real_forms(poles: &PoleSet) -> Result<[MoebiusMap; 3]> {
    let zeta = MoebiusMap::zeta(poles.n());
    let m = |a, b| -> Result<MoebiusMap> {
        Ok(zeta.compose(&projline::dilation(-ONE, poles.get(a), poles.get(b))?))
    };
    Ok([m(N, S)?, m(F, B)?, m(O, W)?])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CayleyReport {
    pub elements: Vec<usize>,
    /// For each element, the permutation it induces on the three major
    /// real forms by conjugation.
    pub real_form_action: Vec<Option<[usize; 3]>>,
    pub all_cyclic: bool,
    pub pass: bool,
}

pub fn cayley_elements(group: &OctGroup) -> Result<CayleyReport> {
    let forms = major_real_forms(&group.poles)?;
    let pts = group.check_points();
    let elements: Vec<usize> = (0..group.len())
        .filter(|&i| group.elements[i].holomorphic && group.elements[i].order == 3)
        .collect();
    let mut actions = Vec::new();
    for &i in &elements {
        let g = &group.elements[i].map;
        let mut action = [0; 3];
        let mut ok = true;
        for (k, tau) in forms.iter().enumerate() {
            let conj = g.conjugate(tau);
            match forms.iter().position(|t| maps_equal(t, &conj, &pts)) {
                Some(j) => action[k] = j,
                None => ok = false,
            }
        }
        actions.push(ok.then_some(action));
    }
    let is_three_cycle = |a: &[usize; 3]| a.iter().enumerate().all(|(k, &v)| v != k);
    let all_cyclic = actions.iter().all(|a| a.as_ref().is_some_and(is_three_cycle));
    let pass = elements.len() == 8 && all_cyclic;
    Ok(CayleyReport {
        elements,
        real_form_action: actions,
        all_cyclic,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportReport {
    /// Holomorphic elements with `N -> W`, `S -> O`, with their orders.
    pub to_wo: Vec<(usize, usize)>,
    /// Holomorphic elements with `N -> O`, `S -> W`, with their orders.
    pub to_ow: Vec<(usize, usize)>,
    pub pass: bool,
}

pub fn ns_transport(group: &OctGroup) -> TransportReport {
    let pick = |a: usize, b: usize| -> Vec<(usize, usize)> {
        group
            .elements
            .iter()
            .enumerate()
            .filter(|(_, e)| e.holomorphic && e.perm[N] == a && e.perm[S] == b)
            .map(|(i, e)| (i, e.order))
            .collect()
    };
    let to_wo = pick(W, O);
    let to_ow = pick(O, W);
    let orders = |v: &[(usize, usize)]| {
        let mut o: Vec<usize> = v.iter().map(|x| x.1).collect();
        o.sort();
        o
    };
    let pass = orders(&to_wo) == vec![2, 3, 3, 4] && orders(&to_ow) == vec![2, 3, 3, 4];
    TransportReport { to_wo, to_ow, pass }
}

/// `z -> (z + i)(iz + 1)^-1`, carrying unitary coordinates into the
/// hermitian picture (`1 -> F`, `-1 -> B`, `0 -> N`, `inf -> S`).
pub fn unitary_chart(n: usize) -> MoebiusMap {
    MoebiusMap::from_scalar([[ONE, I], [I, ONE]], n, false).expect("invertible")
}

/// `z -> (z - i)(z + i)^-1`
pub fn cayley_map(n: usize) -> MoebiusMap {
    MoebiusMap::from_scalar([[ONE, -I], [ONE, I]], n, false).expect("invertible")
}

/// Left translation `u -> g u` of unitary coordinates, as a map of the line.
pub fn left_translation(g: &CMat) -> MoebiusMap {
    let n = g.nrows();
    let k = unitary_chart(n);
    let d = MoebiusMap::holomorphic(linalg::block2(g, &linalg::zeros(n, n), &linalg::zeros(n, n), &linalg::identity(n)))
        .expect("unitary g");
    k.conjugate(&d)
}

/// Right translation `u -> u g` of unitary coordinates.
pub fn right_translation(g: &CMat) -> MoebiusMap {
    let n = g.nrows();
    let k = unitary_chart(n);
    let gi = g.adjoint();
    let d = MoebiusMap::holomorphic(linalg::block2(&linalg::identity(n), &linalg::zeros(n, n), &linalg::zeros(n, n), &gi))
        .expect("unitary g");
    k.conjugate(&d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutantReport {
    pub trials: usize,
    pub seed: u64,
    /// Largest displacement between `g zeta p` and `zeta g p` for random
    /// Euclidean-unitary `g`.
    pub unitary_vs_zeta: f64,
    /// Largest displacement for conjugated diagonal pairs against `zeta`
    /// and `(-1)_{N,S}`.
    pub diagonal_vs_zeta: f64,
    pub diagonal_vs_antipode: f64,
    /// Holomorphic group elements commuting with every sampled translation.
    pub holomorphic_commutant: Vec<usize>,
    pub antiholomorphic_commutant: usize,
    pub matches_stabilizer: bool,
    pub pass: bool,
}

const COMMUTE_TOL: f64 = 1e-9;

fn displacement(f: &MoebiusMap, g: &MoebiusMap, pts: &[Point]) -> f64 {
    pts.iter()
        .map(|p| {
            let a = f.apply(&g.apply(p).expect("valid")).expect("valid");
            let b = g.apply(&f.apply(p).expect("valid")).expect("valid");
            a.distance(&b)
        })
        .fold(0.0, f64::max)
}

pub fn commutant_check(group: &OctGroup, trials: usize, seed: u64) -> Result<CommutantReport> {
    if trials == 0 {
        return Err(Error::Configuration("trials must be at least 1".into()));
    }
    let n = group.n();
    let mut rng = linalg::rng(seed);
    let pts: Vec<Point> = (0..3).map(|_| projline::random_point(n, &mut rng)).collect();
    let zeta = MoebiusMap::zeta(n);
    let antipode = projline::dilation(-ONE, group.poles.get(N), group.poles.get(S))?;
    let cayley = cayley_map(n);

    let mut unitary_vs_zeta: f64 = 0.0;
    let mut diagonal_vs_zeta: f64 = 0.0;
    let mut diagonal_vs_antipode: f64 = 0.0;
    let mut translations = Vec::new();
    for _ in 0..trials {
        let u = projline::random_unitary_moebius(n, &mut rng);
        unitary_vs_zeta = unitary_vs_zeta.max(displacement(&u, &zeta, &pts));

        let (u1, u2) = (linalg::random_unitary(n, &mut rng), linalg::random_unitary(n, &mut rng));
        let d = MoebiusMap::holomorphic(linalg::block2(&u1, &linalg::zeros(n, n), &linalg::zeros(n, n), &u2))?;
        let conj = cayley.inverse().compose(&d).compose(&cayley);
        diagonal_vs_zeta = diagonal_vs_zeta.max(displacement(&conj, &zeta, &pts));
        diagonal_vs_antipode = diagonal_vs_antipode.max(displacement(&conj, &antipode, &pts));

        let g = linalg::random_unitary(n, &mut rng);
        translations.push(left_translation(&g));
        translations.push(right_translation(&g));
    }

    let commutes = |e: &OctElement| translations.iter().all(|t| displacement(&e.map, t, &pts) <= 1e-8);
    let holomorphic_commutant: Vec<usize> = (0..group.len())
        .filter(|&i| group.elements[i].holomorphic && commutes(&group.elements[i]))
        .collect();
    let antiholomorphic_commutant = group
        .elements
        .iter()
        .filter(|e| !e.holomorphic && commutes(e))
        .count();
    let stab = stabilizer_of_n(group)?;
    let matches_stabilizer = holomorphic_commutant == stab.elements;
    let pass = unitary_vs_zeta <= COMMUTE_TOL
        && diagonal_vs_zeta <= COMMUTE_TOL
        && diagonal_vs_antipode <= COMMUTE_TOL
        && matches_stabilizer;
    Ok(CommutantReport {
        trials,
        seed,
        unitary_vs_zeta,
        diagonal_vs_zeta,
        diagonal_vs_antipode,
        holomorphic_commutant,
        antiholomorphic_commutant,
        matches_stabilizer,
        pass,
    })
}

/// One row of the classical transformation table: the cycle it is listed
/// under, the matrix printed next to it and the chart formula.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceRow {
    pub section: &'static str,
    pub cycle: &'static str,
    pub matrix: Option<[&'static str; 4]>,
    /// `(a, b, c, d)` of `z -> (az + b)(cz + d)^-1`, with `conj z` in place
    /// of `z` for antiholomorphic rows.
    pub formula: [&'static str; 4],
    pub antiholomorphic: bool,
}

const fn holo(section: &'static str, cycle: &'static str, matrix: [&'static str; 4], formula: [&'static str; 4]) -> ReferenceRow {
    ReferenceRow {
        section,
        cycle,
        matrix: Some(matrix),
        formula,
        antiholomorphic: false,
    }
}

const fn anti(cycle: &'static str, formula: [&'static str; 4]) -> ReferenceRow {
    ReferenceRow {
        section: "antiholomorphic",
        cycle,
        matrix: None,
        formula,
        antiholomorphic: true,
    }
}

/// The classical table of the octahedral maps, transcribed as printed.
pub fn reference_table() -> Vec<ReferenceRow> {
    vec![
        holo("Klein", "id", ["1", "0", "0", "1"], ["1", "0", "0", "1"]),
        holo("Klein", "(NS)(FB)", ["-1", "0", "0", "1"], ["-1", "0", "0", "1"]),
        holo("Klein", "(OW)(NS)", ["0", "1", "1", "0"], ["0", "1", "1", "0"]),
        holo("Klein", "(OW)(FB)", ["0", "1", "-1", "0"], ["0", "-1", "1", "0"]),
        holo("4-cycles", "(FNBS)", ["i", "0", "0", "1"], ["i", "0", "0", "1"]),
        holo("4-cycles", "(SBNF)", ["-i", "0", "0", "1"], ["-i", "0", "0", "1"]),
        holo("4-cycles", "(FWBO)", ["1", "-1", "1", "1"], ["1", "-1", "1", "1"]),
        holo("4-cycles", "(OBWF)", ["1", "1", "-1", "1"], ["-1", "-1", "1", "-1"]),
        holo("4-cycles", "(NWSO)", ["1", "i", "i", "1"], ["1", "i", "i", "1"]),
        holo("4-cycles", "(OSWN)", ["1", "-i", "-i", "1"], ["1", "-i", "-i", "1"]),
        holo("transpositions", "(NF)(SB)(OW)", ["0", "1", "i", "0"], ["0", "-i", "1", "0"]),
        holo("transpositions", "(NB)(SF)(OW)", ["0", "i", "1", "0"], ["0", "i", "1", "0"]),
        holo("transpositions", "(FO)(BW)(NS)", ["-1", "1", "1", "1"], ["-1", "1", "1", "1"]),
        holo("transpositions", "(FW)(BO)(NS)", ["1", "1", "1", "-1"], ["1", "1", "1", "-1"]),
        holo("transpositions", "(NO)(SW)(FB)", ["-i", "1", "-1", "i"], ["-i", "1", "-1", "i"]),
        holo("transpositions", "(NW)(SO)(FB)", ["-1", "i", "-i", "1"], ["-1", "i", "-i", "1"]),
        holo("3-cycles", "(NBO)(SFW)", ["i", "-1", "i", "1"], ["1", "i", "1", "-i"]),
        holo("3-cycles", "(NOB)(SWF)", ["-i", "-i", "-1", "1"], ["i", "1", "1", "-1"]),
        holo("3-cycles", "(SBO)(WNF)", ["1", "-i", "1", "i"], ["1", "-i", "1", "i"]),
        holo("3-cycles", "(SOB)(NWF)", ["i", "i", "i", "-1"], ["i", "i", "-1", "1"]),
        holo("3-cycles", "(NBW)(SFO)", ["-1", "i", "1", "i"], ["-1", "i", "1", "i"]),
        holo("3-cycles", "(WBN)(FSO)", ["-i", "i", "1", "1"], ["-i", "i", "1", "1"]),
        holo("3-cycles", "(SWB)(NOF)", ["i", "-i", "1", "1"], ["i", "-i", "1", "1"]),
        holo("3-cycles", "(SBW)(NFO)", ["1", "i", "-1", "i"], ["1", "i", "-1", "i"]),
        anti("(NS)(OW)(FB)", ["0", "-1", "1", "0"]),
        anti("(NS)", ["1", "0", "0", "1"]),
        anti("(FB)", ["-1", "0", "0", "1"]),
        anti("(OW)", ["0", "1", "1", "0"]),
        anti("(FS)(NB)", ["i", "0", "0", "1"]),
    ]
}

fn parse_unit(s: &str) -> Result<Complex64> {
    match s {
        "0" => Ok(ZERO),
        "1" => Ok(ONE),
        "-1" => Ok(-ONE),
        "i" => Ok(I),
        "-i" => Ok(-I),
        _ => Err(Error::Configuration(format!("unsupported table entry `{s}`"))),
    }
}

fn parse_quad(q: &[&str; 4]) -> Result<[Complex64; 4]> {
    Ok([parse_unit(q[0])?, parse_unit(q[1])?, parse_unit(q[2])?, parse_unit(q[3])?])
}

/// The map `z -> (a w + b)(c w + d)^-1` with `w = z` or `w = conj z`.
pub fn formula_map(q: [Complex64; 4], antiholomorphic: bool, poles: &PoleSet) -> Result<MoebiusMap> {
    let n = poles.n();
    let h = MoebiusMap::from_scalar([[q[0], q[1]], [q[2], q[3]]], n, false)?;
    if antiholomorphic {
        let conj = projline::real_form_tau(poles.get(N), poles.get(S), poles.get(O))?;
        Ok(h.compose(&conj))
    } else {
        Ok(h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AuditStatus {
    #[serde(rename = "MATCH")]
    Match,
    #[serde(rename = "INVERSE-MATCH")]
    InverseMatch,
    #[serde(rename = "MISMATCH")]
    Mismatch,
}

impl AuditStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            AuditStatus::Match => "MATCH",
            AuditStatus::InverseMatch => "INVERSE-MATCH",
            AuditStatus::Mismatch => "MISMATCH",
        }
    }

    fn classify(listed: &Perm, derived: &Perm) -> Self {
        if listed == derived {
            AuditStatus::Match
        } else if invert_perm(listed) == *derived {
            AuditStatus::InverseMatch
        } else {
            AuditStatus::Mismatch
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub section: String,
    pub listed_cycle: String,
    pub formula: String,
    pub derived_cycle: String,
    pub status: AuditStatus,
    /// Status after exchanging the labels `N` and `S` in the listed cycle.
    pub status_ns_relabeled: AuditStatus,
    /// Whether the printed matrix defines the same map as the formula.
    pub matrix_agrees: Option<bool>,
    pub in_group: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableAudit {
    pub rows: Vec<AuditRow>,
    pub matches: usize,
    pub inverse_matches: usize,
    pub mismatches: usize,
    /// Klein rows together with `(FNBS)` and `(SBNF)` match exactly.
    pub anchors_match: bool,
    pub fwbo_inverse: bool,
    pub pass: bool,
}

pub fn table_diff_report(group: &OctGroup) -> Result<TableAudit> {
    let swap_ns: Perm = [0, 1, 3, 2, 4, 5];
    let mut rows = Vec::new();
    for r in reference_table() {
        let listed = parse_cycles(r.cycle)?;
        let q = parse_quad(&r.formula)?;
        let map = formula_map(q, r.antiholomorphic, &group.poles)?;
        // A formula that does not permute the poles is reported, not rejected.
        let derived = derive_permutation(&map, &group.poles).ok();
        let relabeled = compose_perm(&swap_ns, &compose_perm(&listed, &swap_ns));
        let classify = |p: &Perm| derived.map_or(AuditStatus::Mismatch, |d| AuditStatus::classify(p, &d));
        let matrix_agrees = match r.matrix {
            Some(m) => {
                let printed = formula_map(parse_quad(&m)?, r.antiholomorphic, &group.poles)?;
                Some(maps_equal(&printed, &map, &group.check_points()))
            }
            None => None,
        };
        rows.push(AuditRow {
            section: r.section.to_string(),
            listed_cycle: r.cycle.to_string(),
            formula: format_formula(&q, r.antiholomorphic),
            derived_cycle: derived.map_or_else(|| "not a pole permutation".into(), |d| cycle_notation(&d)),
            status: classify(&listed),
            status_ns_relabeled: classify(&relabeled),
            matrix_agrees,
            in_group: group.locate(&map).is_some(),
        });
    }
    let count = |s: AuditStatus| rows.iter().filter(|r| r.status == s).count();
    let anchors_match = rows
        .iter()
        .filter(|r| r.section == "Klein" || r.listed_cycle == "(FNBS)" || r.listed_cycle == "(SBNF)")
        .all(|r| r.status == AuditStatus::Match);
    let fwbo_inverse = rows
        .iter()
        .any(|r| r.listed_cycle == "(FWBO)" && r.status == AuditStatus::InverseMatch);
    let mismatches = count(AuditStatus::Mismatch);
    Ok(TableAudit {
        matches: count(AuditStatus::Match),
        inverse_matches: count(AuditStatus::InverseMatch),
        mismatches,
        anchors_match,
        fwbo_inverse,
        pass: anchors_match && fwbo_inverse && mismatches == 0,
        rows,
    })
}

impl TableAudit {
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str("# Transformation table audit\n\n");
        out.push_str("Each listed cycle is read left to right, `(FNBS)` sending F to N. The derived cycle is computed from the chart formula by evaluating it at the six poles.\n\n");
        out.push_str("| section | listed | formula | derived | status | N/S relabeled | matrix agrees | in group |\n");
        out.push_str("|---|---|---|---|---|---|---|---|\n");
        for r in &self.rows {
            let agrees = match r.matrix_agrees {
                Some(true) => "yes",
                Some(false) => "no",
                None => "-",
            };
            let _ = writeln!(
                out,
                "| {} | {} | `{}` | {} | {} | {} | {} | {} |",
                r.section,
                r.listed_cycle,
                r.formula,
                r.derived_cycle,
                r.status.as_str(),
                r.status_ns_relabeled.as_str(),
                agrees,
                if r.in_group { "yes" } else { "no" }
            );
        }
        let _ = write!(
            out,
            "\nMATCH: {}, INVERSE-MATCH: {}, MISMATCH: {}\n",
            self.matches, self.inverse_matches, self.mismatches
        );
        out
    }
}

/// Display form of a complex number with small integer-like parts.
pub fn format_complex(z: Complex64) -> String {
    let clean = |x: f64| {
        let r = (x * 1e6).round() / 1e6;
        if r == 0.0 {
            0.0
        } else {
            r
        }
    };
    let num = |x: f64| {
        let s = format!("{x:.6}");
        let s = s.trim_end_matches('0').trim_end_matches('.').to_string();
        s
    };
    let (re, im) = (clean(z.re), clean(z.im));
    let imag = |im: f64| match im {
        1.0 => "i".to_string(),
        -1.0 => "-i".to_string(),
        _ => format!("{}i", num(im)),
    };
    match (re == 0.0, im == 0.0) {
        (true, true) => "0".into(),
        (false, true) => num(re),
        (true, false) => imag(im),
        (false, false) => {
            let i = imag(im.abs());
            format!("{}{}{}", num(re), if im < 0.0 { "-" } else { "+" }, i)
        }
    }
}

pub fn format_formula(q: &[Complex64; 4], antiholomorphic: bool) -> String {
    let v = if antiholomorphic { "z̄" } else { "z" };
    let term = |a: Complex64, b: Complex64| {
        let a_s = match format_complex(a).as_str() {
            "0" => String::new(),
            "1" => v.to_string(),
            "-1" => format!("-{v}"),
            s if s.contains('+') || s[1..].contains('-') => format!("({s}){v}"),
            s => format!("{s}{v}"),
        };
        let b_s = format_complex(b);
        match (a_s.is_empty(), b_s.as_str()) {
            (true, _) => b_s,
            (false, "0") => a_s,
            (false, s) if s.starts_with('-') => format!("{a_s}{s}"),
            (false, s) => format!("{a_s}+{s}"),
        }
    };
    format!("z ↦ ({})({})^-1", term(q[0], q[1]), term(q[2], q[3]))
}

/// Divide by the first entry that is not negligible.
fn normalize_quad(q: [Complex64; 4]) -> [Complex64; 4] {
    let max = q.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    let lead = q.iter().copied().find(|z| z.norm() > 1e-9 * max).unwrap_or(ONE);
    q.map(|z| z / lead)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedRow {
    pub index: usize,
    pub label: String,
    pub holomorphic: bool,
    pub order: usize,
    /// `(a, b, c, d)` as `[re, im]` pairs, acting on `z` (holomorphic) or on
    /// `conj z` (antiholomorphic); normalized so the first nonzero entry is 1.
    pub matrix: Vec<[f64; 2]>,
    pub formula: String,
    /// Images of `O, W, N, S, F, B`.
    pub permutation: Vec<String>,
}

/// Formula coefficients of an element acting on `z` or on `conj z`.
pub fn element_formula(e: &OctElement) -> [Complex64; 4] {
    let [a, b, cc, d] = e.scalar_matrix();
    let q = if e.holomorphic {
        [a, b, cc, d]
    } else {
        // zeta((az + b)(cz + d)^-1) = -(conj(c) w + conj(d))(conj(a) w + conj(b))^-1, w = conj z
        [-cc.conj(), -d.conj(), a.conj(), b.conj()]
    };
    let q = normalize_quad(q);
    q.map(|z| {
        let r = |x: f64| {
            let v = (x * 1e9).round() / 1e9;
            if v == 0.0 {
                0.0
            } else {
                v
            }
        };
        c(r(z.re), r(z.im))
    })
}

pub fn derived_table(group: &OctGroup) -> Vec<DerivedRow> {
    group
        .elements
        .iter()
        .enumerate()
        .map(|(index, e)| {
            let q = element_formula(e);
            DerivedRow {
                index,
                label: cycle_notation(&e.perm),
                holomorphic: e.holomorphic,
                order: e.order,
                matrix: q.iter().map(|z| [z.re, z.im]).collect(),
                formula: format_formula(&q, !e.holomorphic),
                permutation: e.perm.iter().map(|&i| POLE_NAMES[i].to_string()).collect(),
            }
        })
        .collect()
}

pub fn derived_table_markdown(rows: &[DerivedRow]) -> String {
    let mut out = String::new();
    for (title, holomorphic) in [("Holomorphic maps", true), ("Antiholomorphic maps", false)] {
        let _ = writeln!(out, "## {title}\n");
        out.push_str("| # | cycle | order | formula | O W N S F B |\n|---|---|---|---|---|\n");
        for r in rows.iter().filter(|r| r.holomorphic == holomorphic) {
            let _ = writeln!(
                out,
                "| {} | {} | {} | `{}` | {} |",
                r.index,
                r.label,
                r.order,
                r.formula,
                r.permutation.join(" ")
            );
        }
        out.push('\n');
    }
    out
}
