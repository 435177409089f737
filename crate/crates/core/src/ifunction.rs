//! Hypergeometric I-function series, mirror maps, and closed-form
//! projective-space oracles.
//!
//! For a curve class beta with ray degrees d_rho, the beta coefficient is
//! the product over rays of
//!   d > 0:  1 / prod_{j=1}^{d} (D + j z)
//!   d = 0:  1
//!   d < 0:  prod_{j=d+1}^{0} (D + j z), including the bare factor D at j=0.
//! The small I-function multiplies each coefficient by e^{t/z} and
//! e^{int_beta t} with t = t_0 + sum_i t_i D_i over the divisor basis and
//! int_beta t = sum_i t_i f_i; the k=0 part of the big I-function keeps the
//! bare coefficients and a 1 + t/z unit term instead (k >= 1 summands are
//! not computed).
//!
//! Every beta coefficient is homogeneous of degree -int_beta c1 when z has
//! degree 1: each term satisfies (divisor degree) + (z exponent) =
//! -degree(beta, anticanonical).
//!
//! The mirror map is the z^{-1} coefficient of I, Novikov grading
//! retained; it must lie in H^0 + H^2 (MirrorMapNotSmall otherwise), is
//! inverted order by order in Novikov degree, and substituting the inverse
//! into I gives the J-function candidate. Derivative corrections beyond
//! the plain change of variables are out of scope, and the gate above is
//! what keeps us inside that regime.

use crate::cohomology::{CohClass, RingPresentation};
use crate::fan::Fan;
use crate::linalg::{self, rat, Rat};
use crate::picard::{self, CurveClass, DivisorClass, PicardError, WeightMatrix};
use crate::series::{TPoly, Trunc, ZSeries};
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MirrorError {
    /// Some retained z^{-1} coefficient has a component of cohomological
    /// degree 2 or more, outside the plain change-of-variable regime.
    MirrorMapNotSmall(String),
    /// The Novikov-degree-zero part of the map is not the identity.
    MirrorMapNotInvertible(String),
}

impl fmt::Display for MirrorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MirrorError::MirrorMapNotSmall(m) => write!(f, "mirror map is not small: {m}"),
            MirrorError::MirrorMapNotInvertible(m) => {
                write!(f, "mirror map is not invertible: {m}")
            }
        }
    }
}

impl std::error::Error for MirrorError {}

/// Which series a result represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    SmallI,
    BigIK0,
    JOracle,
    JFromI,
}

impl Part {
    pub fn as_str(&self) -> &'static str {
        match self {
            Part::SmallI => "small_I",
            Part::BigIK0 => "big_I_k0",
            Part::JOracle => "J_oracle",
            Part::JFromI => "J_from_I",
        }
    }
}

/// Everything an I-function computation needs. The polarization must be
/// ample (verified during enumeration) and bounds nonnegative.
pub struct IFunctionRequest<'a> {
    pub fan: &'a Fan,
    pub weights: &'a WeightMatrix,
    pub ring: &'a RingPresentation,
    pub polarization: DivisorClass,
    pub degree_bound: i64,
    pub t_trunc: u32,
    pub z_floor: i64,
    pub include_exp_factor: bool,
}

impl<'a> IFunctionRequest<'a> {
    pub fn trunc(&self) -> Trunc {
        Trunc {
            nt: self.weights.rank() + 1,
            t_trunc: self.t_trunc,
            z_floor: self.z_floor,
        }
    }
}

/// A Novikov-graded family of z-Laurent series, keyed by the f-coordinates
/// of the curve class (the zero vector is the constant-map term).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IFunctionSeries {
    pub part: Part,
    pub terms: BTreeMap<Vec<i64>, ZSeries>,
    pub polarization: DivisorClass,
    pub degree_bound: i64,
    pub trunc: Trunc,
}

/// Residue data of the constant-map fixed locus for one curve class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueClassK0 {
    pub beta: CurveClass,
    pub negative_rays: Vec<usize>,
    pub pushforward: ZSeries,
    pub virtual_codim: i64,
}

/// The per-ray factor of the beta coefficient for ray degree d.
pub(crate) fn ray_factor(
    ring: &RingPresentation,
    trunc: Trunc,
    class: &CohClass,
    d: i64,
) -> ZSeries {
    let t0 = vec![0u32; trunc.nt];
    if d == 0 {
        return ZSeries::one(ring, trunc);
    }
    if d > 0 {
        let mut denom = ZSeries::one(ring, trunc);
        for j in 1..=d {
            let mut factor = ZSeries::zero(trunc);
            factor.add_term(0, t0.clone(), class.clone());
            factor.add_term(1, t0.clone(), ring.scalar(rat(j)));
            denom = denom.mul(ring, &factor).expect("shared truncation");
        }
        denom
            .invert_unit(ring)
            .expect("the scalar part is the single monomial d! z^d")
    } else {
        let mut num = ZSeries::one(ring, trunc);
        for j in (d + 1)..=0 {
            let mut factor = ZSeries::zero(trunc);
            factor.add_term(0, t0.clone(), class.clone());
            if j != 0 {
                factor.add_term(1, t0.clone(), ring.scalar(rat(j)));
            }
            num = num.mul(ring, &factor).expect("shared truncation");
        }
        num
    }
}

/// Product over all rays of the degree-d_rho factor. Exact; not trimmed.
pub fn beta_coefficient(req: &IFunctionRequest, beta: &CurveClass) -> ZSeries {
    let trunc = req.trunc();
    let degrees = req.weights.ray_degrees(beta);
    let mut acc = ZSeries::one(req.ring, trunc);
    for (rho, &d) in degrees.iter().enumerate() {
        if d == 0 {
            continue;
        }
        let class = req.ring.ray_class(rho);
        let factor = ray_factor(req.ring, trunc, &class, d);
        acc = acc.mul(req.ring, &factor).expect("shared truncation");
    }
    acc
}

/// e^{t/z} with t = t_0 + sum_i t_i D_i; shared by every beta summand.
fn exp_t_over_z(req: &IFunctionRequest) -> ZSeries {
    let trunc = req.trunc();
    let mut arg = ZSeries::zero(trunc);
    let mut e0 = vec![0u32; trunc.nt];
    e0[0] = 1;
    arg.add_term(-1, e0, req.ring.one());
    for (i, &rho) in req.weights.basis_rays().iter().enumerate() {
        let mut e = vec![0u32; trunc.nt];
        e[1 + i] = 1;
        arg.add_term(-1, e, req.ring.ray_class(rho));
    }
    arg.exp(req.ring)
}

/// e^{int_beta t} = exp(sum_i t_i f_i), a scalar polynomial factor.
fn exp_integral_t(req: &IFunctionRequest, beta: &CurveClass) -> TPoly {
    let nt = req.weights.rank() + 1;
    let mut arg = TPoly::zero(nt, req.t_trunc);
    for (i, &fi) in beta.f.iter().enumerate() {
        if fi != 0 {
            let mut e = vec![0u32; nt];
            e[1 + i] = 1;
            arg.add_term(e, rat(fi));
        }
    }
    arg.exp()
}

fn thread_count() -> usize {
    std::env::var("TORICQ_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or(1)
}

/// Maps f over 0..count on up to `threads` workers; results are assembled
/// in index order, so the output is independent of scheduling.
fn parallel_map<T, F>(count: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    if threads <= 1 || count <= 1 {
        return (0..count).map(f).collect();
    }
    let workers = threads.min(count);
    let chunk = count.div_ceil(workers);
    let mut out: Vec<Option<T>> = Vec::new();
    out.resize_with(count, || None);
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..workers {
            let lo = w * chunk;
            let hi = ((w + 1) * chunk).min(count);
            let f = &f;
            handles.push(scope.spawn(move || (lo, (lo..hi).map(f).collect::<Vec<T>>())));
        }
        for h in handles {
            let (lo, vals) = h.join().expect("worker panicked");
            for (off, v) in vals.into_iter().enumerate() {
                out[lo + off] = Some(v);
            }
        }
    });
    out.into_iter().map(|v| v.expect("every index filled")).collect()
}

fn enumerate_with_zero(req: &IFunctionRequest) -> Result<Vec<CurveClass>, PicardError> {
    assert!(req.degree_bound >= 0, "degree bound must be nonnegative");
    let mut betas = vec![CurveClass { f: vec![0; req.weights.rank()] }];
    if req.degree_bound > 0 {
        betas.extend(picard::enumerate_effective(
            req.fan,
            req.weights,
            &req.polarization,
            req.degree_bound,
        )?);
    } else {
        // Bound zero still demands an ample polarization.
        picard::enumerate_effective(req.fan, req.weights, &req.polarization, 0)?;
    }
    Ok(betas)
}

fn small_i_with_threads(
    req: &IFunctionRequest,
    threads: usize,
) -> Result<IFunctionSeries, PicardError> {
    assert!(req.include_exp_factor, "the small I-function carries the exponential factors");
    let betas = enumerate_with_zero(req)?;
    let etz = exp_t_over_z(req);
    let trunc = req.trunc();
    let series = parallel_map(betas.len(), threads, |i| {
        let beta = &betas[i];
        let coeff = beta_coefficient(req, beta);
        let eint = ZSeries::from_tpoly(req.ring, trunc, &exp_integral_t(req, beta));
        etz.mul(req.ring, &eint)
            .and_then(|s| s.mul(req.ring, &coeff))
            .expect("shared truncation")
            .trim()
    });
    Ok(IFunctionSeries {
        part: Part::SmallI,
        terms: betas.into_iter().map(|b| b.f).zip(series).collect(),
        polarization: req.polarization.clone(),
        degree_bound: req.degree_bound,
        trunc,
    })
}

/// The small I-function: one z-Laurent series per enumerated curve class.
/// Worker count is taken from TORICQ_THREADS (default 1).
pub fn small_i(req: &IFunctionRequest) -> Result<IFunctionSeries, PicardError> {
    small_i_with_threads(req, thread_count())
}

fn big_i_k0_with_threads(
    req: &IFunctionRequest,
    threads: usize,
) -> Result<IFunctionSeries, PicardError> {
    assert!(
        !req.include_exp_factor,
        "the k=0 part of the big I-function has no exponential factors"
    );
    let betas = enumerate_with_zero(req)?;
    let trunc = req.trunc();
    let series = parallel_map(betas.len(), threads, |i| {
        let beta = &betas[i];
        if beta.f.iter().all(|&x| x == 0) {
            // 1 + t/z with t = t_0 + sum_i t_i D_i.
            let mut s = ZSeries::one(req.ring, trunc);
            let mut e0 = vec![0u32; trunc.nt];
            e0[0] = 1;
            s.add_term(-1, e0, req.ring.one());
            for (i, &rho) in req.weights.basis_rays().iter().enumerate() {
                let mut e = vec![0u32; trunc.nt];
                e[1 + i] = 1;
                s.add_term(-1, e, req.ring.ray_class(rho));
            }
            s.trim()
        } else {
            beta_coefficient(req, beta).trim()
        }
    });
    Ok(IFunctionSeries {
        part: Part::BigIK0,
        terms: betas.into_iter().map(|b| b.f).zip(series).collect(),
        polarization: req.polarization.clone(),
        degree_bound: req.degree_bound,
        trunc,
    })
}

/// The k=0 part of the big I-function (k >= 1 summands are out of scope).
pub fn big_i_k0(req: &IFunctionRequest) -> Result<IFunctionSeries, PicardError> {
    big_i_k0_with_threads(req, thread_count())
}

/// Residue data of the constant-map fixed locus: the pushforward equals
/// the beta coefficient, and the virtual codimension is
/// int_beta c1 + #{rho : d_rho < 0}.
pub fn residue_k0(req: &IFunctionRequest, beta: &CurveClass) -> ResidueClassK0 {
    assert!(beta.f.iter().any(|&x| x != 0), "the zero class has no residue locus");
    let degrees = req.weights.ray_degrees(beta);
    let negative_rays: Vec<usize> =
        (0..degrees.len()).filter(|&rho| degrees[rho] < 0).collect();
    let c1 = picard::degree(beta, &req.weights.anticanonical());
    ResidueClassK0 {
        beta: beta.clone(),
        negative_rays: negative_rays.clone(),
        pushforward: beta_coefficient(req, beta).trim(),
        virtual_codim: c1 + negative_rays.len() as i64,
    }
}

/// (1-g)(dim X - 3) + k + int_beta c1.
pub fn vdim_quasimap(fan: &Fan, a: &WeightMatrix, g: i64, k: i64, beta: &CurveClass) -> i64 {
    assert!(g >= 0 && k >= 0);
    (1 - g) * (fan.dim() as i64 - 3) + k + picard::degree(beta, &a.anticanonical())
}

/// dim X + k + int_beta c1 for the graph space.
pub fn vdim_graph(fan: &Fan, a: &WeightMatrix, k: i64, beta: &CurveClass) -> i64 {
    assert!(k >= 0);
    fan.dim() as i64 + k + picard::degree(beta, &a.anticanonical())
}

/// True homogeneity of a beta coefficient: every nonzero degree-d
/// component at z-exponent w satisfies d + w = -c1.
pub fn satisfies_homogeneous_grading(series: &ZSeries, c1: i64) -> bool {
    series.terms().all(|((z, _), class)| {
        class
            .coeffs
            .iter()
            .enumerate()
            .all(|(d, row)| row.iter().all(Rat::is_zero) || d as i64 + z == -c1)
    })
}

/// The grading equation in the form d - w = c1 for every term; holds only
/// for the leading scalar term, so this fails on any subleading term.
pub fn satisfies_stated_grading(series: &ZSeries, c1: i64) -> bool {
    series.terms().all(|((z, _), class)| {
        class
            .coeffs
            .iter()
            .enumerate()
            .all(|(d, row)| row.iter().all(Rat::is_zero) || d as i64 - z == c1)
    })
}

/// A Novikov-graded scalar t-polynomial: f-coordinate key -> TPoly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NovTPoly {
    pub terms: BTreeMap<Vec<i64>, TPoly>,
}

/// Novikov truncation data: keys are retained while their polarization
/// degree stays within the bound.
pub struct NovCap {
    pub polarization: DivisorClass,
    pub degree_bound: i64,
}

impl NovCap {
    fn rank(&self) -> usize {
        self.polarization.coords.len()
    }

    fn degree(&self, key: &[i64]) -> i64 {
        key.iter().zip(&self.polarization.coords).map(|(&a, &b)| a * b).sum()
    }
}

impl NovTPoly {
    pub fn zero() -> NovTPoly {
        NovTPoly { terms: BTreeMap::new() }
    }

    pub fn constant(r: usize, p: TPoly) -> NovTPoly {
        let mut out = NovTPoly::zero();
        out.add_term(vec![0; r], p);
        out
    }

    pub fn add_term(&mut self, key: Vec<i64>, p: TPoly) {
        if p.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(existing) => {
                *existing = existing.add(&p);
                if existing.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, p);
            }
        }
    }

    pub fn add(&self, other: &NovTPoly) -> NovTPoly {
        let mut out = self.clone();
        for (k, p) in &other.terms {
            out.add_term(k.clone(), p.clone());
        }
        out
    }

    pub fn scale(&self, s: &Rat) -> NovTPoly {
        let mut out = NovTPoly::zero();
        for (k, p) in &self.terms {
            out.add_term(k.clone(), p.scale(s));
        }
        out
    }

    pub fn mul(&self, other: &NovTPoly, cap: &NovCap) -> NovTPoly {
        let mut out = NovTPoly::zero();
        for (k1, p1) in &self.terms {
            for (k2, p2) in &other.terms {
                let k: Vec<i64> = k1.iter().zip(k2).map(|(&a, &b)| a + b).collect();
                if cap.degree(&k) > cap.degree_bound {
                    continue;
                }
                out.add_term(k, p1.mul(p2));
            }
        }
        out
    }
}

/// A change of variables on the parameter block: component 0 is the H^0
/// coordinate, component 1+i the coefficient of the i-th basis divisor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MirrorMap {
    pub components: Vec<NovTPoly>,
    pub rank: usize,
    pub nt: usize,
    pub t_trunc: u32,
}

/// The identity change of variables on r divisor directions.
pub fn identity_mirror_map(r: usize, t_trunc: u32) -> MirrorMap {
    let nt = r + 1;
    let components = (0..nt)
        .map(|j| NovTPoly::constant(r, TPoly::var(nt, t_trunc, j)))
        .collect();
    MirrorMap { components, rank: r, nt, t_trunc }
}

/// Extracts the z^{-1} coefficient of I with its Novikov grading and
/// re-expresses it in the coordinates (tau_0, tau_1..tau_r); errors if any
/// component has cohomological degree 2 or more.
pub fn mirror_map(
    i: &IFunctionSeries,
    ring: &RingPresentation,
) -> Result<MirrorMap, MirrorError> {
    let r = ring.basis_rays().len();
    let nt = i.trunc.nt;
    assert_eq!(nt, r + 1);
    let betti = ring.betti();
    assert_eq!(betti[1], r, "H^2 rank equals the Picard rank");
    // Columns: ring coordinates of each basis divisor class in degree 1.
    let m: Vec<Vec<Rat>> = (0..r)
        .map(|row| {
            (0..r)
                .map(|col| {
                    let mut coords = vec![0i64; r];
                    coords[col] = 1;
                    ring.divisor_class(&DivisorClass { coords }).coeffs[1][row].clone()
                })
                .collect()
        })
        .collect();
    let m_inv = linalg::inverse(&m).expect("basis divisors span H^2");
    let mut components = vec![NovTPoly::zero(); nt];
    for (beta, series) in &i.terms {
        for (t_exp, class) in series.z_slice(-1) {
            if let Some(top) = class.top_degree() {
                if top >= 2 {
                    return Err(MirrorError::MirrorMapNotSmall(format!(
                        "z^-1 coefficient at Novikov key {:?} has a degree-{} component",
                        beta, top
                    )));
                }
            }
            let scalar = class.scalar_part();
            if !scalar.is_zero() {
                let mut p = TPoly::zero(nt, i.trunc.t_trunc);
                p.add_term(t_exp.clone(), scalar);
                components[0].add_term(beta.clone(), p);
            }
            for idx in 0..r {
                let coord: Rat =
                    (0..r).map(|k| &m_inv[idx][k] * &class.coeffs[1][k]).sum();
                if !coord.is_zero() {
                    let mut p = TPoly::zero(nt, i.trunc.t_trunc);
                    p.add_term(t_exp.clone(), coord);
                    components[1 + idx].add_term(beta.clone(), p);
                }
            }
        }
    }
    Ok(MirrorMap { components, rank: r, nt, t_trunc: i.trunc.t_trunc })
}

/// Substitutes the map's components for the t variables of a polynomial.
fn substitute_nov(p: &TPoly, vals: &[NovTPoly], cap: &NovCap) -> NovTPoly {
    let r = cap.rank();
    let mut out = NovTPoly::zero();
    for (exp, c) in p.terms() {
        let mut term =
            NovTPoly::constant(r, TPoly::constant(p.nvars(), p.t_trunc(), c.clone()));
        for (j, &e) in exp.iter().enumerate() {
            for _ in 0..e {
                term = term.mul(&vals[j], cap);
            }
        }
        out = out.add(&term);
    }
    out
}

/// outer(inner(t)), truncated to the Novikov bound.
pub fn compose_mirror(outer: &MirrorMap, inner: &MirrorMap, cap: &NovCap) -> MirrorMap {
    assert_eq!(outer.nt, inner.nt);
    let components = outer
        .components
        .iter()
        .map(|comp| {
            let mut acc = NovTPoly::zero();
            for (key, p) in &comp.terms {
                let sub = substitute_nov(p, &inner.components, cap);
                for (k2, q) in sub.terms {
                    let total: Vec<i64> = key.iter().zip(&k2).map(|(&a, &b)| a + b).collect();
                    if cap.degree(&total) <= cap.degree_bound {
                        acc.add_term(total, q);
                    }
                }
            }
            acc
        })
        .collect();
    MirrorMap { components, rank: outer.rank, nt: outer.nt, t_trunc: outer.t_trunc }
}

/// Inverts tau = t + (Novikov-positive corrections) so that
/// inv(tau(t)) = t holds exactly on retained orders: each pass subtracts
/// the left-composition residual, which raises its lowest Novikov order
/// by at least one, so `degree_bound` passes suffice.
pub fn invert_mirror_map(tau: &MirrorMap, cap: &NovCap) -> Result<MirrorMap, MirrorError> {
    let r = tau.rank;
    let zero_key = vec![0i64; r];
    for (j, comp) in tau.components.iter().enumerate() {
        match comp.terms.get(&zero_key) {
            Some(p) if *p == TPoly::var(tau.nt, tau.t_trunc, j) => {}
            other => {
                return Err(MirrorError::MirrorMapNotInvertible(format!(
                    "component {} has Novikov-degree-0 part {:?}, expected the bare variable",
                    j, other
                )));
            }
        }
    }
    let identity = identity_mirror_map(r, tau.t_trunc);
    let mut inv = identity.clone();
    for _ in 0..cap.degree_bound.max(0) {
        let composed = compose_mirror(&inv, tau, cap);
        let residuals: Vec<NovTPoly> = composed
            .components
            .iter()
            .zip(&identity.components)
            .map(|(c, id)| c.add(&id.scale(&rat(-1))))
            .collect();
        if residuals.iter().all(|res| res.terms.is_empty()) {
            break;
        }
        let components = inv
            .components
            .iter()
            .zip(&residuals)
            .map(|(g, res)| g.add(&res.scale(&rat(-1))))
            .collect();
        inv = MirrorMap { components, rank: r, nt: tau.nt, t_trunc: tau.t_trunc };
    }
    Ok(inv)
}

/// Substitutes t <- tau^{-1}(t) into I and re-truncates: the J-function
/// candidate under the plain change of variables. When tau is the
/// identity this returns I with the part tag changed.
pub fn j_from_i(
    i: &IFunctionSeries,
    tau: &MirrorMap,
    cap: &NovCap,
) -> Result<IFunctionSeries, MirrorError> {
    let inv = invert_mirror_map(tau, cap)?;
    let mut out: BTreeMap<Vec<i64>, ZSeries> = BTreeMap::new();
    let mut cache: BTreeMap<Vec<u32>, NovTPoly> = BTreeMap::new();
    let r = cap.rank();
    for (beta, series) in &i.terms {
        for ((z, t_exp), class) in series.terms() {
            let sub = cache.entry(t_exp.clone()).or_insert_with(|| {
                let mut term = NovTPoly::constant(
                    r,
                    TPoly::constant(i.trunc.nt, i.trunc.t_trunc, rat(1)),
                );
                for (j, &e) in t_exp.iter().enumerate() {
                    for _ in 0..e {
                        term = term.mul(&inv.components[j], cap);
                    }
                }
                term
            });
            for (bk, p) in &sub.terms {
                let total: Vec<i64> = beta.iter().zip(bk).map(|(&a, &b)| a + b).collect();
                if cap.degree(&total) > cap.degree_bound {
                    continue;
                }
                let entry = out
                    .entry(total)
                    .or_insert_with(|| ZSeries::zero(i.trunc));
                for (e, c) in p.terms() {
                    entry.add_term(*z, e.clone(), class.scale(c));
                }
            }
        }
    }
    let terms = out
        .into_iter()
        .map(|(k, s)| (k, s.trim()))
        .filter(|(_, s)| !s.is_zero())
        .collect();
    Ok(IFunctionSeries {
        part: Part::JFromI,
        terms,
        polarization: i.polarization.clone(),
        degree_bound: i.degree_bound,
        trunc: i.trunc,
    })
}

/// Closed-form J-function of P^n through an independent single-variable
/// code path: coefficients are arrays over powers of H with H^{n+1} = 0,
/// and each 1/(H + jz) is expanded by the closed formula
/// sum_{m<=n} (-1)^m H^m j^{-m-1} z^{-m-1}.
pub fn closed_form_j_pn(
    n: usize,
    degree_bound: i64,
    t_trunc: u32,
    z_floor: i64,
) -> IFunctionSeries {
    assert!(n >= 1 && degree_bound >= 0);
    type HSeries = BTreeMap<i64, Vec<Rat>>;
    let hmul = |a: &HSeries, b: &HSeries| -> HSeries {
        let mut out: HSeries = BTreeMap::new();
        for (za, ha) in a {
            for (zb, hb) in b {
                let row = out.entry(za + zb).or_insert_with(|| vec![rat(0); n + 1]);
                for (i, ca) in ha.iter().enumerate() {
                    if ca.is_zero() {
                        continue;
                    }
                    for (j, cb) in hb.iter().enumerate() {
                        if i + j <= n && !cb.is_zero() {
                            row[i + j] += ca * cb;
                        }
                    }
                }
            }
        }
        out.retain(|_, row| row.iter().any(|c| !c.is_zero()));
        out
    };
    let trunc = Trunc { nt: 2, t_trunc, z_floor };
    let mut factorial = vec![rat(1)];
    for k in 1..=t_trunc as i64 {
        let last = factorial.last().expect("nonempty").clone();
        factorial.push(last * rat(k));
    }
    let mut terms: BTreeMap<Vec<i64>, ZSeries> = BTreeMap::new();
    for d in 0..=degree_bound {
        // 1 / prod_{j=1}^{d} (H + jz)^{n+1}.
        let mut denom_inv: HSeries = BTreeMap::new();
        denom_inv.insert(0, {
            let mut one = vec![rat(0); n + 1];
            one[0] = rat(1);
            one
        });
        for j in 1..=d {
            let mut inv1: HSeries = BTreeMap::new();
            let mut sign = rat(1);
            let mut jpow = rat(j);
            for m in 0..=n {
                let mut row = vec![rat(0); n + 1];
                row[m] = &sign / &jpow;
                inv1.insert(-(m as i64) - 1, row);
                sign = -sign;
                jpow *= rat(j);
            }
            for _ in 0..=n {
                denom_inv = hmul(&denom_inv, &inv1);
            }
        }
        // e^{t/z} e^{d t_1}: t_0^a t_1^{b+c} H^b z^{-a-b} d^c / (a! b! c!).
        let mut series = ZSeries::zero(trunc);
        for a in 0..=t_trunc {
            for b in 0..=(t_trunc - a).min(n as u32) {
                for c in 0..=(t_trunc - a - b) {
                    let scalar = rat(1)
                        / (&factorial[a as usize] * &factorial[b as usize])
                        * num_traits::pow::pow(rat(d), c as usize)
                        / &factorial[c as usize];
                    for (z, row) in &denom_inv {
                        for (m, coeff) in row.iter().enumerate() {
                            let h = m + b as usize;
                            if h > n || coeff.is_zero() {
                                continue;
                            }
                            let mut class_rows: Vec<Vec<Rat>> =
                                (0..=n).map(|_| vec![rat(0)]).collect();
                            class_rows[h][0] = coeff * &scalar;
                            let class = CohClass { coeffs: class_rows };
                            series.add_term(
                                z - a as i64 - b as i64,
                                vec![a, b + c],
                                class,
                            );
                        }
                    }
                }
            }
        }
        terms.insert(vec![d], series.trim());
    }
    IFunctionSeries {
        part: Part::JOracle,
        terms,
        polarization: DivisorClass { coords: vec![1] },
        degree_bound,
        trunc,
    }
}
