//! Rational cohomology of a smooth complete toric variety, presented as the
//! Stanley-Reisner ring modulo the lattice-character linear forms.
//!
//! One variable x_rho per ray. The ideal is generated by the squarefree
//! monomials of the primitive collections together with the n linear forms
//! theta_j = sum_rho ray_rho[j] x_rho. Grading: deg x_rho = 1, so graded
//! piece d presents H^{2d}(X; Q).
//!
//! Each graded piece 0..=n is reduced once at build time: all degree-d
//! monomials are listed in descending grevlex order (variables ordered by
//! ray index), relation rows are row-reduced exactly over Q, pivot columns
//! are the leading monomials, and the non-pivot columns form the monomial
//! basis. A reduction table then rewrites any monomial in that basis.
//! Graded pieces above n vanish (the quotient is Artinian with socle in
//! degree n), so products are truncated there.
//!
//! The class of a point is the monomial of any maximal cone; the build
//! asserts all maximal cones reduce to one and the same nonzero multiple of
//! the top basis monomial, and `integrate` divides by that multiple.

use crate::fan::Fan;
use crate::linalg::{self, rat, Rat};
use crate::picard::{DivisorClass, WeightMatrix};
use num_traits::Zero;
use std::collections::BTreeMap;

/// Reduction data for one graded piece.
struct DegreeData {
    /// All exponent vectors of this total degree, descending grevlex.
    monomials: Vec<Vec<u32>>,
    index: BTreeMap<Vec<u32>, usize>,
    /// Columns of `monomials` that survive into the basis, ascending.
    basis_cols: Vec<usize>,
    /// Row per monomial column: its coordinates over the basis columns.
    reduce: Vec<Vec<Rat>>,
}

pub struct RingPresentation {
    n: usize,
    l: usize,
    basis_rays: Vec<usize>,
    degrees: Vec<DegreeData>,
    point_coeff: Rat,
}

/// A cohomology class: exact coefficients over the monomial basis of each
/// graded piece, `coeffs[d]` matching `RingPresentation::basis_monomials(d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohClass {
    pub coeffs: Vec<Vec<Rat>>,
}

impl CohClass {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|row| row.iter().all(Rat::is_zero))
    }

    /// Largest d with a nonzero degree-d part, or None if zero.
    pub fn top_degree(&self) -> Option<usize> {
        (0..self.coeffs.len()).rev().find(|&d| self.coeffs[d].iter().any(|c| !c.is_zero()))
    }

    /// Smallest d with a nonzero degree-d part, or None if zero.
    pub fn bottom_degree(&self) -> Option<usize> {
        (0..self.coeffs.len()).find(|&d| self.coeffs[d].iter().any(|c| !c.is_zero()))
    }

    pub fn add(&self, other: &CohClass) -> CohClass {
        debug_assert_eq!(self.coeffs.len(), other.coeffs.len());
        CohClass {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        }
    }

    pub fn scale(&self, s: &Rat) -> CohClass {
        CohClass {
            coeffs: self.coeffs.iter().map(|row| row.iter().map(|x| x * s).collect()).collect(),
        }
    }

    pub fn add_assign_scaled(&mut self, other: &CohClass, s: &Rat) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y * s;
            }
        }
    }

    /// Degree-0 coefficient (the scalar part).
    pub fn scalar_part(&self) -> Rat {
        self.coeffs[0][0].clone()
    }
}

/// Grevlex comparison of two exponent vectors of equal total degree:
/// the one whose last differing entry is smaller is the larger monomial.
fn grevlex_cmp(a: &[u32], b: &[u32]) -> std::cmp::Ordering {
    for i in (0..a.len()).rev() {
        if a[i] != b[i] {
            return b[i].cmp(&a[i]);
        }
    }
    std::cmp::Ordering::Equal
}

/// All exponent vectors over `l` variables of total degree `d`,
/// descending grevlex.
fn monomials_of_degree(l: usize, d: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; l];
    fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.clone());
            cur[pos] = 0;
            return;
        }
        for take in (0..=left).rev() {
            cur[pos] = take;
            rec(pos + 1, left - take, cur, out);
        }
        cur[pos] = 0;
    }
    if l == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, d, &mut cur, &mut out);
    out.sort_by(|a, b| grevlex_cmp(b, a));
    out
}

/// Builds the presentation from a fan and a weight matrix on the same fan.
/// The weight matrix only fixes which ray divisors serve as the divisor
/// basis for `divisor_class`.
pub fn build_ring(fan: &Fan, a: &WeightMatrix) -> RingPresentation {
    let n = fan.dim();
    let l = fan.n_rays();
    let collections = fan.primitive_collections();
    let mut degrees: Vec<DegreeData> = Vec::with_capacity(n + 1);
    for d in 0..=n as u32 {
        let monomials = monomials_of_degree(l, d);
        let index: BTreeMap<Vec<u32>, usize> =
            monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let ncols = monomials.len();
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        for c in &collections {
            let size = c.len() as u32;
            if size > d {
                continue;
            }
            let mut gen = vec![0u32; l];
            for &rho in c {
                gen[rho] = 1;
            }
            for m in monomials_of_degree(l, d - size) {
                let mut row = vec![rat(0); ncols];
                let prod: Vec<u32> = m.iter().zip(&gen).map(|(x, y)| x + y).collect();
                row[index[&prod]] = rat(1);
                rows.push(row);
            }
        }
        if d >= 1 {
            for j in 0..n {
                for m in monomials_of_degree(l, d - 1) {
                    let mut row = vec![rat(0); ncols];
                    for rho in 0..l {
                        let coeff = fan.rays()[rho][j];
                        if coeff != 0 {
                            let mut prod = m.clone();
                            prod[rho] += 1;
                            row[index[&prod]] += rat(coeff);
                        }
                    }
                    rows.push(row);
                }
            }
        }
        let pivots = linalg::rref(&mut rows);
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; ncols];
            for &p in &pivots {
                v[p] = true;
            }
            v
        };
        let basis_cols: Vec<usize> = (0..ncols).filter(|&c| !is_pivot[c]).collect();
        let basis_pos: BTreeMap<usize, usize> =
            basis_cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut reduce = vec![vec![rat(0); basis_cols.len()]; ncols];
        for (i, &c) in basis_cols.iter().enumerate() {
            reduce[c][i] = rat(1);
        }
        for (ri, &p) in pivots.iter().enumerate() {
            for (&c, &i) in &basis_pos {
                reduce[p][i] = -rows[ri][c].clone();
            }
        }
        degrees.push(DegreeData { monomials, index, basis_cols, reduce });
    }

    assert_eq!(degrees[0].basis_cols.len(), 1, "degree 0 must be one-dimensional");
    assert_eq!(degrees[n].basis_cols.len(), 1, "top degree must be one-dimensional");
    let euler: usize = degrees.iter().map(|dd| dd.basis_cols.len()).sum();
    assert_eq!(euler, fan.max_cones().len(), "Betti numbers must sum to the cone count");

    let mut ring = RingPresentation {
        n,
        l,
        basis_rays: a.basis_rays().to_vec(),
        degrees,
        point_coeff: rat(0),
    };
    let mut point: Option<Rat> = None;
    for cone in fan.max_cones() {
        let mut exp = vec![0u32; l];
        for &rho in cone {
            exp[rho] = 1;
        }
        let reduced = ring.reduce_monomial(&exp);
        let c = reduced.coeffs[n][0].clone();
        assert!(!c.is_zero(), "a maximal cone monomial must represent a point");
        match &point {
            None => point = Some(c),
            Some(prev) => {
                assert_eq!(prev, &c, "all maximal cones must give the same point class")
            }
        }
    }
    ring.point_coeff = point.expect("complete fan has at least one maximal cone");
    ring
}

impl RingPresentation {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn n_rays(&self) -> usize {
        self.l
    }

    pub fn basis_rays(&self) -> &[usize] {
        &self.basis_rays
    }

    /// Dimensions of the graded pieces 0..=n.
    pub fn betti(&self) -> Vec<usize> {
        self.degrees.iter().map(|dd| dd.basis_cols.len()).collect()
    }

    /// Basis monomials of graded piece d, ascending grevlex position
    /// (the order CohClass coefficient rows follow).
    pub fn basis_monomials(&self, d: usize) -> Vec<&Vec<u32>> {
        self.degrees[d].basis_cols.iter().map(|&c| &self.degrees[d].monomials[c]).collect()
    }

    pub fn zero(&self) -> CohClass {
        CohClass {
            coeffs: self.degrees.iter().map(|dd| vec![rat(0); dd.basis_cols.len()]).collect(),
        }
    }

    pub fn one(&self) -> CohClass {
        let mut c = self.zero();
        c.coeffs[0][0] = rat(1);
        c
    }

    pub fn scalar(&self, s: Rat) -> CohClass {
        let mut c = self.zero();
        c.coeffs[0][0] = s;
        c
    }

    /// Rewrites one monomial (total degree <= n) in the basis.
    pub fn reduce_monomial(&self, exp: &[u32]) -> CohClass {
        let d = exp.iter().sum::<u32>() as usize;
        assert!(d <= self.n, "monomial degree exceeds the socle degree");
        let dd = &self.degrees[d];
        let col = dd.index[exp];
        let mut out = self.zero();
        out.coeffs[d] = dd.reduce[col].clone();
        out
    }

    /// Class of the ray divisor D_rho.
    pub fn ray_class(&self, rho: usize) -> CohClass {
        let mut exp = vec![0u32; self.l];
        exp[rho] = 1;
        self.reduce_monomial(&exp)
    }

    /// Class of a divisor given in the weight-matrix basis.
    pub fn divisor_class(&self, d: &DivisorClass) -> CohClass {
        debug_assert_eq!(d.coords.len(), self.basis_rays.len());
        let mut out = self.zero();
        for (&coord, &rho) in d.coords.iter().zip(&self.basis_rays) {
            if coord != 0 {
                out.add_assign_scaled(&self.ray_class(rho), &rat(coord));
            }
        }
        out
    }

    /// Exact graded product, truncated above degree n where the ring
    /// vanishes.
    pub fn mul(&self, a: &CohClass, b: &CohClass) -> CohClass {
        let mut out = self.zero();
        for d1 in 0..=self.n {
            for (i, ca) in a.coeffs[d1].iter().enumerate() {
                if ca.is_zero() {
                    continue;
                }
                let ma = &self.degrees[d1].monomials[self.degrees[d1].basis_cols[i]];
                for d2 in 0..=(self.n - d1) {
                    let dd = &self.degrees[d1 + d2];
                    for (j, cb) in b.coeffs[d2].iter().enumerate() {
                        if cb.is_zero() {
                            continue;
                        }
                        let mb = &self.degrees[d2].monomials[self.degrees[d2].basis_cols[j]];
                        let prod: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                        let s = ca * cb;
                        let row = &dd.reduce[dd.index[&prod]];
                        for (k, r) in row.iter().enumerate() {
                            if !r.is_zero() {
                                out.coeffs[d1 + d2][k] += r * &s;
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Integration against the fundamental class: the top-degree
    /// coefficient normalized so any maximal-cone point integrates to 1.
    pub fn integrate(&self, c: &CohClass) -> Rat {
        &c.coeffs[self.n][0] / &self.point_coeff
    }

    /// Poincare pairing.
    pub fn pairing(&self, a: &CohClass, b: &CohClass) -> Rat {
        self.integrate(&self.mul(a, b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::picard::weight_matrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ring_of(fan: &Fan) -> RingPresentation {
        let a = weight_matrix(fan, None);
        build_ring(fan, &a)
    }

    #[test]
    fn p2_basis_is_hyperplane_powers() {
        let fan = fixtures::p2();
        let ring = ring_of(&fan);
        assert_eq!(ring.betti(), vec![1, 1, 1]);
        // Basis monomials are 1, x3, x3^2.
        assert_eq!(ring.basis_monomials(1), vec![&vec![0, 0, 1]]);
        assert_eq!(ring.basis_monomials(2), vec![&vec![0, 0, 2]]);
        // All three ray classes coincide with the hyperplane class.
        let h = ring.ray_class(2);
        assert_eq!(ring.ray_class(0), h);
        assert_eq!(ring.ray_class(1), h);
        // Integrals of H^d.
        assert_eq!(ring.integrate(&ring.mul(&h, &h)), rat(1));
        assert_eq!(ring.integrate(&h), rat(0));
        assert_eq!(ring.integrate(&ring.one()), rat(0));
    }

    #[test]
    fn f2_betti_and_self_intersections() {
        let fan = fixtures::f2();
        let ring = ring_of(&fan);
        assert_eq!(ring.betti(), vec![1, 2, 1]);
        let d = |rho: usize| ring.ray_class(rho);
        // Rays 1 and 2 are the fibers, ray 3 the +2-section, ray 4 the
        // -2-section: self-intersections 0, 0, 2, -2.
        assert_eq!(ring.pairing(&d(0), &d(0)), rat(0));
        assert_eq!(ring.pairing(&d(1), &d(1)), rat(0));
        assert_eq!(ring.pairing(&d(2), &d(2)), rat(2));
        assert_eq!(ring.pairing(&d(3), &d(3)), rat(-2));
        // Cross terms: D1.D2 = 0 (primitive collection), D3.D4 = 0,
        // D1.D3 = D1.D4 = 1 (transverse points).
        assert_eq!(ring.pairing(&d(0), &d(1)), rat(0));
        assert_eq!(ring.pairing(&d(2), &d(3)), rat(0));
        assert_eq!(ring.pairing(&d(0), &d(2)), rat(1));
        assert_eq!(ring.pairing(&d(0), &d(3)), rat(1));
        // Anticanonical self-intersection of a Hirzebruch surface is 8.
        let a = weight_matrix(&fan, None);
        let k = ring.divisor_class(&a.anticanonical());
        assert_eq!(ring.pairing(&k, &k), rat(8));
    }

    #[test]
    fn euler_characteristic_matches_cone_count() {
        for fan in [
            fixtures::p1(),
            fixtures::p2(),
            fixtures::p3(),
            fixtures::p4(),
            fixtures::p1xp1(),
            fixtures::f2(),
        ] {
            let ring = ring_of(&fan);
            let total: usize = ring.betti().iter().sum();
            assert_eq!(total, fan.max_cones().len());
            assert_eq!(ring.betti()[0], 1);
            assert_eq!(ring.betti()[fan.dim()], 1);
        }
    }

    #[test]
    fn stanley_reisner_monomials_vanish() {
        for fan in [fixtures::p2(), fixtures::p1xp1(), fixtures::f2(), fixtures::p3()] {
            let ring = ring_of(&fan);
            for c in fan.primitive_collections() {
                if c.len() > fan.dim() {
                    continue;
                }
                let mut exp = vec![0u32; fan.n_rays()];
                for &rho in &c {
                    exp[rho] = 1;
                }
                assert!(ring.reduce_monomial(&exp).is_zero());
            }
        }
    }

    #[test]
    fn linear_relations_vanish() {
        for fan in [fixtures::p1(), fixtures::p2(), fixtures::p3(), fixtures::f2()] {
            let ring = ring_of(&fan);
            for j in 0..fan.dim() {
                let mut theta = ring.zero();
                for rho in 0..fan.n_rays() {
                    let c = fan.rays()[rho][j];
                    if c != 0 {
                        theta.add_assign_scaled(&ring.ray_class(rho), &rat(c));
                    }
                }
                assert!(theta.is_zero());
            }
        }
    }

    #[test]
    fn divisor_class_respects_weight_columns() {
        // The class of O(D_rho) written in the divisor basis must reduce to
        // the ray class itself.
        for fan in [fixtures::p2(), fixtures::f2(), fixtures::p1xp1(), fixtures::p3()] {
            let a = weight_matrix(&fan, None);
            let ring = build_ring(&fan, &a);
            for rho in 0..fan.n_rays() {
                let via_basis = ring.divisor_class(&a.ray_divisor_class(rho));
                assert_eq!(via_basis, ring.ray_class(rho));
            }
        }
    }

    #[test]
    fn poincare_pairing_is_nondegenerate() {
        for fan in [fixtures::p1(), fixtures::p2(), fixtures::p3(), fixtures::f2(), fixtures::p1xp1()]
        {
            let ring = ring_of(&fan);
            let n = ring.dim();
            let betti = ring.betti();
            for d in 0..=n {
                let rows: Vec<CohClass> = (0..betti[d])
                    .map(|i| {
                        let mut c = ring.zero();
                        c.coeffs[d][i] = rat(1);
                        c
                    })
                    .collect();
                let cols: Vec<CohClass> = (0..betti[n - d])
                    .map(|j| {
                        let mut c = ring.zero();
                        c.coeffs[n - d][j] = rat(1);
                        c
                    })
                    .collect();
                let gram: Vec<Vec<Rat>> = rows
                    .iter()
                    .map(|r| cols.iter().map(|c| ring.pairing(r, c)).collect())
                    .collect();
                assert_eq!(linalg::rank(&gram), betti[d], "degree {} pairing degenerate", d);
            }
        }
    }

    #[test]
    fn random_products_commute_and_associate() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x7031_c0de);
        for fan in [fixtures::f2(), fixtures::p3()] {
            let ring = ring_of(&fan);
            let betti = ring.betti();
            let random_class = |rng: &mut ChaCha8Rng| {
                let mut c = ring.zero();
                for (d, &nb) in betti.iter().enumerate() {
                    for i in 0..nb {
                        c.coeffs[d][i] = rat(rng.gen_range(-4..=4));
                    }
                }
                c
            };
            for _ in 0..50 {
                let a = random_class(&mut rng);
                let b = random_class(&mut rng);
                let c = random_class(&mut rng);
                assert_eq!(ring.mul(&a, &b), ring.mul(&b, &a));
                assert_eq!(ring.mul(&ring.mul(&a, &b), &c), ring.mul(&a, &ring.mul(&b, &c)));
                let bc = b.add(&c);
                assert_eq!(ring.mul(&a, &bc), ring.mul(&a, &b).add(&ring.mul(&a, &c)));
                assert_eq!(ring.mul(&a, &ring.one()), a);
            }
        }
    }

    #[test]
    fn p3_hyperplane_integrals() {
        let fan = fixtures::p3();
        let ring = ring_of(&fan);
        assert_eq!(ring.betti(), vec![1, 1, 1, 1]);
        let h = ring.ray_class(3);
        let h2 = ring.mul(&h, &h);
        let h3 = ring.mul(&h2, &h);
        assert_eq!(ring.integrate(&h3), rat(1));
        assert_eq!(ring.integrate(&h2), rat(0));
        // Anticanonical degree of P^3: (4H)^3 = 64.
        let k = h.scale(&rat(4));
        let k3 = ring.mul(&ring.mul(&k, &k), &k);
        assert_eq!(ring.integrate(&k3), rat(64));
    }
}
