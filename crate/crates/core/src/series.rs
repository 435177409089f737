//! Truncated series arithmetic: polynomials in the parameters t_0..t_r and
//! Laurent series in z with cohomology-class coefficients.
//!
//! Truncation discipline: terms of total t-degree above `t_trunc` are
//! dropped everywhere (a ring quotient, so dropping eagerly is exact), and
//! cohomological grading kills products beyond the socle degree. Together
//! these make every series arising here finite without any cap on z
//! exponents, so arithmetic never drops z terms; `z_floor` is a
//! presentation window applied by `trim` before a series is reported or
//! compared against another backend.
//!
//! All binary operations require identical truncation data and report
//! `IncompatibleTruncation` otherwise. Inversion requires the scalar part
//! (t-degree 0, cohomology degree 0) to be a single monomial c z^k; the
//! rest is then nilpotent and the geometric series terminates.

use crate::cohomology::{CohClass, RingPresentation};
use crate::linalg::{rat, Rat};
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeriesError {
    /// Binary operation on series with different truncation data.
    IncompatibleTruncation(String),
    /// The scalar part is not a single monomial c z^k, so no Laurent
    /// inverse exists within this window.
    NotInvertible(String),
}

impl fmt::Display for SeriesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesError::IncompatibleTruncation(msg) => {
                write!(f, "incompatible truncation: {msg}")
            }
            SeriesError::NotInvertible(msg) => write!(f, "series is not invertible: {msg}"),
        }
    }
}

impl std::error::Error for SeriesError {}

/// Shared truncation data: number of t variables, total t-degree cap, and
/// the z window floor used when a series is trimmed for presentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Trunc {
    pub nt: usize,
    pub t_trunc: u32,
    pub z_floor: i64,
}

impl Trunc {
    fn check(&self, other: &Trunc) -> Result<(), SeriesError> {
        if self == other {
            Ok(())
        } else {
            Err(SeriesError::IncompatibleTruncation(format!(
                "{:?} vs {:?}",
                self, other
            )))
        }
    }
}

fn tdeg(exp: &[u32]) -> u32 {
    exp.iter().sum()
}

/// Polynomial in t_0..t_{nvars-1} over Q, truncated in total degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TPoly {
    nvars: usize,
    t_trunc: u32,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl TPoly {
    pub fn zero(nvars: usize, t_trunc: u32) -> TPoly {
        TPoly { nvars, t_trunc, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, t_trunc: u32, c: Rat) -> TPoly {
        let mut p = TPoly::zero(nvars, t_trunc);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, t_trunc: u32, i: usize) -> TPoly {
        assert!(i < nvars);
        let mut exp = vec![0u32; nvars];
        exp[i] = 1;
        let mut p = TPoly::zero(nvars, t_trunc);
        p.add_term(exp, rat(1));
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn t_trunc(&self) -> u32 {
        self.t_trunc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn get(&self, exp: &[u32]) -> Rat {
        self.terms.get(exp).cloned().unwrap_or_else(|| rat(0))
    }

    pub fn add_term(&mut self, exp: Vec<u32>, c: Rat) {
        assert_eq!(exp.len(), self.nvars);
        if tdeg(&exp) > self.t_trunc || c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &TPoly) -> TPoly {
        assert_eq!((self.nvars, self.t_trunc), (other.nvars, other.t_trunc));
        let mut out = self.clone();
        for (exp, c) in &other.terms {
            out.add_term(exp.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Rat) -> TPoly {
        if s.is_zero() {
            return TPoly::zero(self.nvars, self.t_trunc);
        }
        TPoly {
            nvars: self.nvars,
            t_trunc: self.t_trunc,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &TPoly) -> TPoly {
        assert_eq!((self.nvars, self.t_trunc), (other.nvars, other.t_trunc));
        let mut out = TPoly::zero(self.nvars, self.t_trunc);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exp: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(exp, ca * cb);
            }
        }
        out
    }

    /// exp of a polynomial with no constant term; the power series
    /// terminates at the t-degree cap.
    pub fn exp(&self) -> TPoly {
        assert!(self.get(&vec![0; self.nvars]).is_zero(), "exp needs a scalar-free argument");
        let mut sum = TPoly::constant(self.nvars, self.t_trunc, rat(1));
        let mut pow = TPoly::constant(self.nvars, self.t_trunc, rat(1));
        let mut k: i64 = 1;
        loop {
            pow = pow.mul(self).scale(&(rat(1) / rat(k)));
            if pow.is_zero() {
                break;
            }
            sum = sum.add(&pow);
            k += 1;
        }
        sum
    }

    /// Substitutes subs[i] for variable i; all polynomials share this
    /// polynomial's truncation data.
    pub fn substitute(&self, subs: &[TPoly]) -> TPoly {
        assert_eq!(subs.len(), self.nvars);
        let mut out = TPoly::zero(self.nvars, self.t_trunc);
        for (exp, c) in &self.terms {
            let mut term = TPoly::constant(self.nvars, self.t_trunc, c.clone());
            for (i, &e) in exp.iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&subs[i]);
                }
            }
            out = out.add(&term);
        }
        out
    }
}

/// Laurent series in z whose coefficients are cohomology-valued truncated
/// polynomials in t_0..t_{nt-1}. Keys are (z exponent, t exponent vector).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZSeries {
    trunc: Trunc,
    terms: BTreeMap<(i64, Vec<u32>), CohClass>,
}

impl ZSeries {
    pub fn zero(trunc: Trunc) -> ZSeries {
        ZSeries { trunc, terms: BTreeMap::new() }
    }

    pub fn one(ring: &RingPresentation, trunc: Trunc) -> ZSeries {
        let mut s = ZSeries::zero(trunc);
        s.add_term(0, vec![0; trunc.nt], ring.one());
        s
    }

    /// Embeds a scalar t-polynomial at z^0.
    pub fn from_tpoly(ring: &RingPresentation, trunc: Trunc, p: &TPoly) -> ZSeries {
        assert_eq!((p.nvars(), p.t_trunc()), (trunc.nt, trunc.t_trunc));
        let mut s = ZSeries::zero(trunc);
        for (exp, c) in p.terms() {
            s.add_term(0, exp.clone(), ring.scalar(c.clone()));
        }
        s
    }

    pub fn trunc(&self) -> &Trunc {
        &self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, Vec<u32>), &CohClass)> {
        self.terms.iter()
    }

    pub fn get(&self, z: i64, t_exp: &[u32]) -> Option<&CohClass> {
        self.terms.get(&(z, t_exp.to_vec()))
    }

    /// All terms at one z exponent.
    pub fn z_slice(&self, z: i64) -> Vec<(&Vec<u32>, &CohClass)> {
        self.terms
            .range((z, Vec::new())..(z + 1, Vec::new()))
            .map(|((_, t), c)| (t, c))
            .collect()
    }

    pub fn min_z(&self) -> Option<i64> {
        self.terms.keys().next().map(|(z, _)| *z)
    }

    pub fn max_z(&self) -> Option<i64> {
        self.terms.keys().next_back().map(|(z, _)| *z)
    }

    pub fn add_term(&mut self, z: i64, t_exp: Vec<u32>, class: CohClass) {
        assert_eq!(t_exp.len(), self.trunc.nt);
        if tdeg(&t_exp) > self.trunc.t_trunc || class.is_zero() {
            return;
        }
        let key = (z, t_exp);
        match self.terms.get_mut(&key) {
            Some(existing) => {
                existing.add_assign_scaled(&class, &rat(1));
                if existing.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, class);
            }
        }
    }

    pub fn add(&self, other: &ZSeries) -> Result<ZSeries, SeriesError> {
        self.trunc.check(&other.trunc)?;
        let mut out = self.clone();
        for ((z, t), c) in &other.terms {
            out.add_term(*z, t.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Rat) -> ZSeries {
        if s.is_zero() {
            return ZSeries::zero(self.trunc);
        }
        ZSeries {
            trunc: self.trunc,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c.scale(s))).collect(),
        }
    }

    pub fn mul_z_power(&self, k: i64) -> ZSeries {
        ZSeries {
            trunc: self.trunc,
            terms: self
                .terms
                .iter()
                .map(|((z, t), c)| ((z + k, t.clone()), c.clone()))
                .collect(),
        }
    }

    pub fn mul_coh(&self, ring: &RingPresentation, class: &CohClass) -> ZSeries {
        let mut out = ZSeries::zero(self.trunc);
        for ((z, t), c) in &self.terms {
            out.add_term(*z, t.clone(), ring.mul(c, class));
        }
        out
    }

    pub fn mul(&self, ring: &RingPresentation, other: &ZSeries) -> Result<ZSeries, SeriesError> {
        self.trunc.check(&other.trunc)?;
        let mut out = ZSeries::zero(self.trunc);
        for ((za, ta), ca) in &self.terms {
            for ((zb, tb), cb) in &other.terms {
                let t: Vec<u32> = ta.iter().zip(tb).map(|(x, y)| x + y).collect();
                if tdeg(&t) > self.trunc.t_trunc {
                    continue;
                }
                let c = ring.mul(ca, cb);
                out.add_term(za + zb, t, c);
            }
        }
        Ok(out)
    }

    /// Drops terms below the z window floor. Arithmetic is exact without
    /// this; call it before reporting or comparing output.
    pub fn trim(&self) -> ZSeries {
        ZSeries {
            trunc: self.trunc,
            terms: self
                .terms
                .iter()
                .filter(|((z, _), _)| *z >= self.trunc.z_floor)
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// The scalar part as a map z -> coefficient; inversion requires it to
    /// be a single monomial.
    fn scalar_monomials(&self) -> BTreeMap<i64, Rat> {
        let mut out = BTreeMap::new();
        let t0 = vec![0u32; self.trunc.nt];
        for ((z, t), c) in &self.terms {
            if *t == t0 {
                let s = c.scalar_part();
                if !s.is_zero() {
                    out.insert(*z, s);
                }
            }
        }
        out
    }

    /// Inverts c z^k (1 + nu) with nu scalar-free, hence nilpotent under
    /// the t-degree and cohomology-degree caps.
    pub fn invert_unit(&self, ring: &RingPresentation) -> Result<ZSeries, SeriesError> {
        let scalars = self.scalar_monomials();
        if scalars.len() != 1 {
            return Err(SeriesError::NotInvertible(format!(
                "scalar part has {} monomials, need exactly 1",
                scalars.len()
            )));
        }
        let (&k, c) = scalars.iter().next().expect("nonempty by the check above");
        let unit_inv = rat(1) / c;
        // nu = S / (c z^k) - 1.
        let mut nu = self.scale(&unit_inv).mul_z_power(-k);
        let one_key = (0i64, vec![0u32; self.trunc.nt]);
        match nu.terms.get_mut(&one_key) {
            Some(lead) => {
                lead.add_assign_scaled(&ring.one(), &rat(-1));
                if lead.is_zero() {
                    nu.terms.remove(&one_key);
                }
            }
            None => unreachable!("the scalar monomial sits at this key"),
        }
        let mut sum = ZSeries::one(ring, self.trunc);
        let mut pow = ZSeries::one(ring, self.trunc);
        loop {
            pow = pow.mul(ring, &nu)?.scale(&rat(-1));
            if pow.is_zero() {
                break;
            }
            sum = sum.add(&pow)?;
        }
        Ok(sum.scale(&unit_inv).mul_z_power(-k))
    }

    /// exp of a scalar-free series; terminates by the same nilpotency.
    pub fn exp(&self, ring: &RingPresentation) -> ZSeries {
        assert!(
            self.scalar_monomials().is_empty(),
            "exp needs a scalar-free argument"
        );
        let mut sum = ZSeries::one(ring, self.trunc);
        let mut pow = ZSeries::one(ring, self.trunc);
        let mut k: i64 = 1;
        loop {
            pow = pow
                .mul(ring, self)
                .expect("argument shares this truncation")
                .scale(&(rat(1) / rat(k)));
            if pow.is_zero() {
                break;
            }
            sum = sum.add(&pow).expect("argument shares this truncation");
            k += 1;
        }
        sum
    }
}
