//! Complete nonsingular fans given by primitive rays and maximal cones.
//!
//! A `Fan` is only obtainable through [`build_fan`], which verifies, in this
//! order:
//!   1. shape: ray/cone sizes match `dim`, indices in range, no repeats
//!      (`DimensionMismatch`);
//!   2. smoothness: every ray primitive (`NonPrimitiveRay`), every maximal
//!      cone unimodular, i.e. ray determinant +-1 (`NonUnimodularCone`);
//!   3. completeness: every ridge ((n-1)-subset of a maximal cone) lies in
//!      exactly two maximal cones and the adjacency graph is connected
//!      (`NotComplete`);
//!   4. fan condition: ray vectors pairwise distinct, no ray inside a cone
//!      that does not list it, and every pairwise intersection of maximal
//!      cones equals the cone on their shared rays, decided by one exact
//!      rational LP per pair (`NotAFan`). Cost O(#cones^2), fine at desk
//!      scale (a few dozen rays).
//!
//! Ray and cone indices are 0-based in this module; the JSON file format and
//! error messages use 1-based numbering.

use crate::linalg::{self, rat, Constraint, Rat};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Validation failure; messages name the offending ray/cone 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FanError {
    DimensionMismatch(String),
    NonPrimitiveRay { ray: usize },
    NonUnimodularCone { cone: usize },
    NotComplete(String),
    NotAFan(String),
}

impl fmt::Display for FanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FanError::DimensionMismatch(msg) => write!(f, "dimension mismatch: {msg}"),
            FanError::NonPrimitiveRay { ray } => {
                write!(f, "ray {} is zero or not primitive", ray + 1)
            }
            FanError::NonUnimodularCone { cone } => {
                write!(f, "maximal cone {} is not unimodular", cone + 1)
            }
            FanError::NotComplete(msg) => write!(f, "fan is not complete: {msg}"),
            FanError::NotAFan(msg) => write!(f, "not a fan: {msg}"),
        }
    }
}

impl std::error::Error for FanError {}

/// A wall: a ridge shared by exactly two maximal cones, together with the
/// integral relation sum(coeffs[i] * rays[i]) = 0 normalized so both
/// off-face rays carry coefficient +1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wall {
    /// Ray indices of the ridge, ascending; length n-1 (empty for n = 1).
    pub face: Vec<usize>,
    /// Indices of the two maximal cones containing the ridge, ascending.
    pub sides: (usize, usize),
    /// The off-face ray of `sides.0` and of `sides.1`.
    pub off_rays: (usize, usize),
    /// All n+1 ray indices involved (face plus both off-face rays), ascending.
    pub rays: Vec<usize>,
    /// Relation coefficients aligned with `rays`; entries at the off-face
    /// rays are +1 and sum(coeffs[i] * ray vector) = 0.
    pub coeffs: Vec<i64>,
}

/// A validated complete nonsingular fan.
#[derive(Debug, Clone)]
pub struct Fan {
    dim: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
    name: Option<String>,
    /// Per cone: inverse of the matrix whose columns are the cone's rays.
    /// Row-major n x n; coordinates of x in the cone's ray basis are
    /// inverse * x, and membership is "all coordinates >= 0".
    cone_inverses: Vec<Vec<Vec<Rat>>>,
}

/// Builds and fully validates a fan. `max_cones` uses 0-based ray indices.
pub fn build_fan(
    dim: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
    name: Option<String>,
) -> Result<Fan, FanError> {
    // Cones are canonicalized to ascending index order before any check.
    let max_cones: Vec<Vec<usize>> = max_cones
        .into_iter()
        .map(|mut c| {
            c.sort_unstable();
            c
        })
        .collect();
    validate(dim, &rays, &max_cones)?;
    let cone_inverses = max_cones
        .iter()
        .map(|cone| {
            let m: Vec<Vec<Rat>> = (0..dim)
                .map(|i| cone.iter().map(|&r| rat(rays[r][i])).collect())
                .collect();
            linalg::inverse(&m).expect("unimodular cone matrix is invertible")
        })
        .collect();
    Ok(Fan { dim, rays, max_cones, name, cone_inverses })
}

impl Fan {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_rays(&self) -> usize {
        self.rays.len()
    }

    /// Picard rank r = (#rays) - dim.
    pub fn picard_rank(&self) -> usize {
        self.rays.len() - self.dim
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Re-runs the full validation on the stored data.
    pub fn revalidate(&self) -> Result<(), FanError> {
        validate(self.dim, &self.rays, &self.max_cones)
    }

    /// Coordinates of `point` in the ray basis of maximal cone `cone`.
    pub fn cone_coordinates(&self, cone: usize, point: &[Rat]) -> Vec<Rat> {
        let inv = &self.cone_inverses[cone];
        (0..self.dim)
            .map(|i| {
                let mut acc = Rat::zero();
                for j in 0..self.dim {
                    acc += &inv[i][j] * &point[j];
                }
                acc
            })
            .collect()
    }

    /// True when `point` lies in maximal cone `cone` (boundary included).
    pub fn cone_contains(&self, cone: usize, point: &[Rat]) -> bool {
        self.cone_coordinates(cone, point).iter().all(|a| !a.is_negative())
    }

    /// Indices of all maximal cones containing `point`.
    pub fn cones_containing(&self, point: &[Rat]) -> Vec<usize> {
        (0..self.max_cones.len()).filter(|&c| self.cone_contains(c, point)).collect()
    }

    /// All walls, sorted by ridge index set. One wall per ridge of the fan.
    pub fn walls(&self) -> Vec<Wall> {
        let mut walls = Vec::new();
        for (face, cones) in ridge_map(&self.max_cones) {
            debug_assert_eq!(cones.len(), 2, "validated fan has two cones per ridge");
            let (p, q) = (cones[0], cones[1]);
            let off_p = *self.max_cones[p].iter().find(|r| !face.contains(r)).unwrap();
            let off_q = *self.max_cones[q].iter().find(|r| !face.contains(r)).unwrap();
            // Express the opposite off-ray in the ray basis of cone p ordered
            // as (face rays..., off_p); unimodularity makes the solution
            // integral and opposite sides force coefficient -1 on off_p.
            let basis: Vec<usize> = face.iter().copied().chain([off_p]).collect();
            let m: Vec<Vec<Rat>> = (0..self.dim)
                .map(|i| basis.iter().map(|&r| rat(self.rays[r][i])).collect())
                .collect();
            let b: Vec<Rat> = (0..self.dim).map(|i| rat(self.rays[off_q][i])).collect();
            let y = linalg::solve_square(&m, &b).expect("cone ray basis is invertible");
            assert!(
                y[self.dim - 1] == rat(-1),
                "wall between cones {} and {}: off-rays must lie on opposite sides",
                p + 1,
                q + 1
            );
            let mut rays: Vec<usize> = basis.clone();
            rays.push(off_q);
            rays.sort_unstable();
            let coeff_of = |r: usize| -> i64 {
                if r == off_p || r == off_q {
                    return 1;
                }
                let pos = face.iter().position(|&x| x == r).unwrap();
                let v = -y[pos].clone();
                assert!(v.is_integer(), "wall relation must be integral");
                v.to_integer().to_i64().expect("wall coefficient fits i64")
            };
            let coeffs: Vec<i64> = rays.iter().map(|&r| coeff_of(r)).collect();
            debug_assert!((0..self.dim).all(|i| {
                rays.iter().zip(&coeffs).map(|(&r, &c)| c * self.rays[r][i]).sum::<i64>() == 0
            }));
            walls.push(Wall {
                face,
                sides: (p, q),
                off_rays: (off_p, off_q),
                rays,
                coeffs,
            });
        }
        walls
    }

    /// Minimal non-faces of the fan, each ascending, the list ordered
    /// lexicographically. A minimal non-face has at most n+1 rays (any
    /// (n+1)-subset already fails to fit in an n-ray cone), so enumeration
    /// runs over subsets of size 1..n+1 with superset pruning.
    pub fn primitive_collections(&self) -> Vec<Vec<usize>> {
        let l = self.rays.len();
        assert!(l <= 128, "primitive collection enumeration uses 128-bit masks");
        let cone_masks: Vec<u128> =
            self.max_cones.iter().map(|c| c.iter().fold(0u128, |m, &r| m | (1 << r))).collect();
        let submask = |sub: u128, sup: u128| sub & sup == sub;
        let mut found: Vec<u128> = Vec::new();
        let mut result: Vec<Vec<usize>> = Vec::new();
        for k in 1..=self.dim + 1 {
            for_each_combination(l, k, |subset| {
                let mask = subset.iter().fold(0u128, |m, &r| m | (1 << r));
                if found.iter().any(|&f| submask(f, mask)) {
                    return;
                }
                if !cone_masks.iter().any(|&c| submask(mask, c)) {
                    found.push(mask);
                    result.push(subset.to_vec());
                }
            });
        }
        result.sort();
        result
    }
}

/// Calls `f` on every ascending k-subset of 0..l.
fn for_each_combination(l: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > l {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // Advance the rightmost index that still has room.
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + l - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Ridge -> containing maximal cones ((n-1)-subsets; the empty ridge for
/// n = 1). BTreeMap keys give the deterministic wall order.
fn ridge_map(max_cones: &[Vec<usize>]) -> BTreeMap<Vec<usize>, Vec<usize>> {
    let mut map: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (ci, cone) in max_cones.iter().enumerate() {
        for skip in 0..cone.len() {
            let ridge: Vec<usize> =
                cone.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &r)| r).collect();
            map.entry(ridge).or_default().push(ci);
        }
    }
    map
}

fn fmt_cone(cone: &[usize]) -> String {
    let inner: Vec<String> = cone.iter().map(|&r| (r + 1).to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

fn validate(dim: usize, rays: &[Vec<i64>], max_cones: &[Vec<usize>]) -> Result<(), FanError> {
    // Shape.
    if dim == 0 {
        return Err(FanError::DimensionMismatch("dim must be at least 1".into()));
    }
    if rays.is_empty() {
        return Err(FanError::DimensionMismatch("no rays given".into()));
    }
    if max_cones.is_empty() {
        return Err(FanError::DimensionMismatch("no maximal cones given".into()));
    }
    for (i, ray) in rays.iter().enumerate() {
        if ray.len() != dim {
            return Err(FanError::DimensionMismatch(format!(
                "ray {} has {} coordinates, expected {}",
                i + 1,
                ray.len(),
                dim
            )));
        }
    }
    for (ci, cone) in max_cones.iter().enumerate() {
        if cone.len() != dim {
            return Err(FanError::DimensionMismatch(format!(
                "maximal cone {} has {} rays, expected {}",
                ci + 1,
                cone.len(),
                dim
            )));
        }
        if cone.iter().any(|&r| r >= rays.len()) {
            return Err(FanError::DimensionMismatch(format!(
                "maximal cone {} references a ray index out of range",
                ci + 1
            )));
        }
        if cone.windows(2).any(|w| w[0] == w[1]) {
            return Err(FanError::DimensionMismatch(format!(
                "maximal cone {} repeats a ray",
                ci + 1
            )));
        }
    }
    for ci in 0..max_cones.len() {
        for cj in ci + 1..max_cones.len() {
            if max_cones[ci] == max_cones[cj] {
                return Err(FanError::DimensionMismatch(format!(
                    "maximal cones {} and {} coincide",
                    ci + 1,
                    cj + 1
                )));
            }
        }
    }

    // Smoothness.
    for (i, ray) in rays.iter().enumerate() {
        let g = ray.iter().fold(0i64, |g, &x| g.gcd(&x));
        if g != 1 {
            return Err(FanError::NonPrimitiveRay { ray: i });
        }
    }
    for (ci, cone) in max_cones.iter().enumerate() {
        let m: Vec<Vec<i64>> = cone.iter().map(|&r| rays[r].clone()).collect();
        let d = linalg::det_int(&m);
        if d != rat(1) && d != rat(-1) {
            return Err(FanError::NonUnimodularCone { cone: ci });
        }
    }

    // Completeness: every ridge in exactly two maximal cones, adjacency
    // connected.
    let ridges = ridge_map(max_cones);
    for (ridge, cones) in &ridges {
        if cones.len() != 2 {
            return Err(FanError::NotComplete(format!(
                "ridge {} lies in {} maximal cone(s), expected 2",
                fmt_cone(ridge),
                cones.len()
            )));
        }
    }
    let nc = max_cones.len();
    let mut seen = vec![false; nc];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(c) = stack.pop() {
        for cones in ridges.values() {
            if cones.contains(&c) {
                for &d in cones {
                    if !seen[d] {
                        seen[d] = true;
                        stack.push(d);
                    }
                }
            }
        }
    }
    if !seen.iter().all(|&s| s) {
        return Err(FanError::NotComplete("maximal cone adjacency graph is disconnected".into()));
    }

    // Fan condition.
    for i in 0..rays.len() {
        for j in i + 1..rays.len() {
            if rays[i] == rays[j] {
                return Err(FanError::NotAFan(format!("rays {} and {} coincide", i + 1, j + 1)));
            }
        }
    }
    let inverses: Vec<Vec<Vec<Rat>>> = max_cones
        .iter()
        .map(|cone| {
            let m: Vec<Vec<Rat>> =
                (0..dim).map(|i| cone.iter().map(|&r| rat(rays[r][i])).collect()).collect();
            linalg::inverse(&m).expect("unimodular cone matrix is invertible")
        })
        .collect();
    let coords_in = |cone: usize, v: &[i64]| -> Vec<Rat> {
        (0..dim)
            .map(|i| (0..dim).map(|j| &inverses[cone][i][j] * rat(v[j])).sum::<Rat>())
            .collect()
    };
    for (ri, ray) in rays.iter().enumerate() {
        for (ci, cone) in max_cones.iter().enumerate() {
            if !cone.contains(&ri) && coords_in(ci, ray).iter().all(|a| !a.is_negative()) {
                return Err(FanError::NotAFan(format!(
                    "ray {} lies inside maximal cone {} {}",
                    ri + 1,
                    ci + 1,
                    fmt_cone(&max_cones[ci])
                )));
            }
        }
    }
    for p in 0..nc {
        for q in p + 1..nc {
            let shared: Vec<bool> =
                max_cones[p].iter().map(|r| max_cones[q].contains(r)).collect();
            let rays_p: Vec<Vec<i64>> =
                max_cones[p].iter().map(|&r| rays[r].clone()).collect();
            let rays_q: Vec<Vec<i64>> =
                max_cones[q].iter().map(|&r| rays[r].clone()).collect();
            if !cones_meet_in_shared_face(&rays_p, &rays_q, &shared) {
                return Err(FanError::NotAFan(format!(
                    "maximal cones {} {} and {} {} intersect outside their shared rays",
                    p + 1,
                    fmt_cone(&max_cones[p]),
                    q + 1,
                    fmt_cone(&max_cones[q])
                )));
            }
        }
    }
    Ok(())
}

/// Decides cone(rays_p) intersect cone(rays_q) == cone(shared rays), for
/// simplicial full-dimensional cones given by ray coordinate columns.
/// `shared[j]` marks rays_p[j] as shared with rays_q.
///
/// In p's ray coordinates the intersection is {a >= 0, B a >= 0} with
/// B = Rq^-1 Rp; it equals the shared-ray cone iff a_j = 0 there for every
/// non-shared j, i.e. iff {a >= 0, B a >= 0, sum of non-shared a_j >= 1} is
/// infeasible (homogeneity lets >0 be scaled to >=1).
pub(crate) fn cones_meet_in_shared_face(
    rays_p: &[Vec<i64>],
    rays_q: &[Vec<i64>],
    shared: &[bool],
) -> bool {
    let n = rays_p[0].len();
    let mq: Vec<Vec<Rat>> =
        (0..n).map(|i| rays_q.iter().map(|r| rat(r[i])).collect()).collect();
    let inv_q = linalg::inverse(&mq).expect("simplicial cone matrix is invertible");
    let mut constraints: Vec<Constraint> = Vec::new();
    for i in 0..n {
        let mut coeffs = vec![Rat::zero(); n];
        coeffs[i] = rat(1);
        constraints.push(Constraint { coeffs, rhs: Rat::zero() });
    }
    for inv_row in &inv_q {
        // One row of B: the corresponding q-coordinate of each p-ray.
        let coeffs: Vec<Rat> = (0..n)
            .map(|j| (0..n).map(|k| &inv_row[k] * rat(rays_p[j][k])).sum::<Rat>())
            .collect();
        constraints.push(Constraint { coeffs, rhs: Rat::zero() });
    }
    let coeffs: Vec<Rat> =
        (0..n).map(|j| if shared[j] { Rat::zero() } else { rat(1) }).collect();
    if coeffs.iter().all(|c| c.is_zero()) {
        return true;
    }
    constraints.push(Constraint { coeffs, rhs: rat(1) });
    !linalg::lp_feasible(&constraints, n)
}
