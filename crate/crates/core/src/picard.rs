//! Divisor classes, curve classes, and the weight matrix of a fan.
//!
//! Fixing a maximal cone sigma, the line bundles O(D_rho) for rays rho not
//! in sigma form a Z-basis of the Picard group (the divisors of sigma's rays
//! are eliminated by the lattice-character relations, which are unimodular
//! in those unknowns). The weight matrix A is r x l: column rho expresses
//! [D_rho] in that basis, so A carries an identity block on the complement
//! columns. Curve classes are recorded by their pairing vector
//! f_i = degree against the i-th basis divisor.
//!
//! Nef/ample tests reduce to wall-curve degrees; on a smooth complete toric
//! variety the Mori cone is generated by the wall curves (toric cone
//! theorem), so these finitely many checks are exact and complete.

use crate::fan::{Fan, Wall};
use crate::linalg::{self, rat};
use num_traits::ToPrimitive;
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PicardError {
    /// The supplied polarization is not ample (some wall curve has
    /// nonpositive degree against it).
    NotAmplePolarization(String),
}

impl fmt::Display for PicardError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PicardError::NotAmplePolarization(msg) => {
                write!(f, "polarization is not ample: {msg}")
            }
        }
    }
}

impl std::error::Error for PicardError {}

/// A divisor class in the basis {O(D_rho) : rho not in the basis cone},
/// complement rays taken in ascending index order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DivisorClass {
    pub coords: Vec<i64>,
}

/// A curve class, recorded as f_i = degree against the i-th basis divisor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CurveClass {
    pub f: Vec<i64>,
}

/// The weight matrix of a fan relative to a basis cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightMatrix {
    entries: Vec<Vec<i64>>,
    basis_cone: usize,
    basis_rays: Vec<usize>,
}

/// Computes the weight matrix. `basis_cone` defaults to the first maximal
/// cone; an out-of-range index is a caller bug and panics.
pub fn weight_matrix(fan: &Fan, basis_cone: Option<usize>) -> WeightMatrix {
    let sigma = basis_cone.unwrap_or(0);
    assert!(sigma < fan.max_cones().len(), "basis cone index out of range");
    let cone = &fan.max_cones()[sigma];
    let l = fan.n_rays();
    let r = fan.picard_rank();
    let n = fan.dim();
    let basis_rays: Vec<usize> = (0..l).filter(|ri| !cone.contains(ri)).collect();
    debug_assert_eq!(basis_rays.len(), r);
    // Columns of the cone's ray matrix; unimodular, so each solve below is
    // integral.
    let m: Vec<Vec<_>> =
        (0..n).map(|i| cone.iter().map(|&rho| rat(fan.rays()[rho][i])).collect()).collect();
    let mut entries = vec![vec![0i64; l]; r];
    for (i, &b) in basis_rays.iter().enumerate() {
        entries[i][b] = 1;
        let rhs: Vec<_> = (0..n).map(|j| rat(-fan.rays()[b][j])).collect();
        let x = linalg::solve_square(&m, &rhs).expect("basis cone matrix is invertible");
        for (pos, &rho) in cone.iter().enumerate() {
            assert!(x[pos].is_integer(), "weight matrix entries must be integral");
            entries[i][rho] = x[pos].to_integer().to_i64().expect("weight fits i64");
        }
    }
    WeightMatrix { entries, basis_cone: sigma, basis_rays }
}

impl WeightMatrix {
    /// Row-major entries, r rows by l columns.
    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn n_rays(&self) -> usize {
        self.entries.first().map_or(0, Vec::len)
    }

    pub fn basis_cone(&self) -> usize {
        self.basis_cone
    }

    /// Ray indices whose divisors form the Picard basis, ascending.
    pub fn basis_rays(&self) -> &[usize] {
        &self.basis_rays
    }

    /// Column rho: the class of O(D_rho).
    pub fn ray_divisor_class(&self, rho: usize) -> DivisorClass {
        DivisorClass { coords: self.entries.iter().map(|row| row[rho]).collect() }
    }

    /// Anticanonical class: sum of all ray divisor columns.
    pub fn anticanonical(&self) -> DivisorClass {
        DivisorClass {
            coords: self.entries.iter().map(|row| row.iter().sum()).collect(),
        }
    }

    /// Ray degrees d_rho = degree(beta, O(D_rho)) for all rays at once.
    pub fn ray_degrees(&self, beta: &CurveClass) -> Vec<i64> {
        (0..self.n_rays())
            .map(|rho| self.entries.iter().zip(&beta.f).map(|(row, &fi)| row[rho] * fi).sum())
            .collect()
    }
}

/// degree(beta, D) = sum_i f_i * coords_i.
pub fn degree(beta: &CurveClass, d: &DivisorClass) -> i64 {
    debug_assert_eq!(beta.f.len(), d.coords.len());
    beta.f.iter().zip(&d.coords).map(|(&a, &b)| a * b).sum()
}

/// Curve class of a wall. The wall relation coefficients are exactly the
/// ray degrees of the class, so f is read off at the basis rays and the
/// remaining coefficients are re-derived and asserted to match.
pub fn wall_curve_class(a: &WeightMatrix, wall: &Wall) -> CurveClass {
    let coeff_at = |rho: usize| -> i64 {
        wall.rays.iter().position(|&r| r == rho).map_or(0, |p| wall.coeffs[p])
    };
    let beta = CurveClass { f: a.basis_rays().iter().map(|&b| coeff_at(b)).collect() };
    let degrees = a.ray_degrees(&beta);
    for (rho, deg) in degrees.iter().enumerate() {
        assert_eq!(
            *deg,
            coeff_at(rho),
            "wall relation and weight matrix disagree at ray {}",
            rho + 1
        );
    }
    beta
}

/// Curve classes of all walls, in wall order (may repeat as classes).
pub fn wall_curve_classes(fan: &Fan, a: &WeightMatrix) -> Vec<CurveClass> {
    fan.walls().iter().map(|w| wall_curve_class(a, w)).collect()
}

/// Nef: nonnegative degree on every wall curve.
pub fn is_nef(fan: &Fan, a: &WeightMatrix, d: &DivisorClass) -> bool {
    wall_curve_classes(fan, a).iter().all(|beta| degree(beta, d) >= 0)
}

/// Ample: strictly positive degree on every wall curve.
pub fn is_ample(fan: &Fan, a: &WeightMatrix, d: &DivisorClass) -> bool {
    wall_curve_classes(fan, a).iter().all(|beta| degree(beta, d) > 0)
}

/// Fano: ample anticanonical class.
pub fn is_fano(fan: &Fan, a: &WeightMatrix) -> bool {
    is_ample(fan, a, &a.anticanonical())
}

/// All nonzero effective classes of polarization degree <= bound:
/// nonnegative integer combinations of wall curve classes, deduplicated,
/// sorted by (degree, lex f). Requires `polarization` ample so every
/// generator has degree >= 1 and the search terminates.
pub fn enumerate_effective(
    fan: &Fan,
    a: &WeightMatrix,
    polarization: &DivisorClass,
    bound: i64,
) -> Result<Vec<CurveClass>, PicardError> {
    if !is_ample(fan, a, polarization) {
        return Err(PicardError::NotAmplePolarization(format!(
            "class {:?} has nonpositive degree on some wall curve",
            polarization.coords
        )));
    }
    let mut generators: Vec<CurveClass> = wall_curve_classes(fan, a);
    generators.sort();
    generators.dedup();
    let zero = CurveClass { f: vec![0; a.rank()] };
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    seen.insert(zero.f.clone());
    let mut frontier = vec![zero];
    while let Some(cur) = frontier.pop() {
        for g in &generators {
            let cand = CurveClass {
                f: cur.f.iter().zip(&g.f).map(|(&x, &y)| x + y).collect(),
            };
            if degree(&cand, polarization) <= bound && seen.insert(cand.f.clone()) {
                frontier.push(cand);
            }
        }
    }
    let mut result: Vec<CurveClass> = seen
        .into_iter()
        .filter(|f| f.iter().any(|&x| x != 0))
        .map(|f| CurveClass { f })
        .collect();
    result.sort_by(|x, y| {
        (degree(x, polarization), &x.f).cmp(&(degree(y, polarization), &y.f))
    });
    Ok(result)
}
