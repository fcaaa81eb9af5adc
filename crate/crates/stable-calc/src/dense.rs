//! Dense multivariate polynomials with bounded per-variable degree, stored
//! as a sparse exponent-vector table. Backing store for products,
//! determinant expansions, polarization, and definition-level oracles.

use crate::error::Error;
use crate::multiaffine::MultiAffinePoly;
use crate::scalar::Coeff;
use crate::uni::UniPoly;
use std::collections::BTreeMap;

/// Exponent vectors map to coefficients; explicit zeros are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct DensePoly<T = f64> {
    n_vars: usize,
    max_deg: u32,
    terms: BTreeMap<Vec<u32>, T>,
}

impl<T: Coeff> DensePoly<T> {
    pub fn zero(n_vars: usize, max_deg: u32) -> Self {
        Self { n_vars, max_deg, terms: BTreeMap::new() }
    }

    pub fn constant(n_vars: usize, c: T) -> Self {
        let mut p = Self::zero(n_vars, 0);
        if !c.is_zero() {
            p.terms.insert(vec![0; n_vars], c);
        }
        p
    }

    /// Builds from explicit terms, validating lengths and the degree cap.
    pub fn from_terms(
        n_vars: usize,
        max_deg: u32,
        terms: impl IntoIterator<Item = (Vec<u32>, T)>,
    ) -> Result<Self, Error> {
        let mut p = Self::zero(n_vars, max_deg);
        for (expo, c) in terms {
            if expo.len() != n_vars {
                return Err(Error::DimensionMismatch { expected: n_vars, found: expo.len() });
            }
            for (var, &d) in expo.iter().enumerate() {
                if d > max_deg {
                    return Err(Error::DegreeExceedsCap { var, degree: d, cap: max_deg });
                }
            }
            p.accumulate(expo, c);
        }
        Ok(p)
    }

    /// Adds c to the coefficient at the exponent vector, dropping zeros.
    pub(crate) fn accumulate(&mut self, expo: Vec<u32>, c: T) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(expo);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn max_deg(&self) -> u32 {
        self.max_deg
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &T)> {
        self.terms.iter()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, expo: &[u32]) -> T {
        self.terms.get(expo).cloned().unwrap_or_else(T::zero)
    }

    /// Largest exponent of the given variable across all terms.
    pub fn deg_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        if self.n_vars != other.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                found: other.n_vars,
            });
        }
        let mut out = self.clone();
        out.max_deg = self.max_deg.max(other.max_deg);
        for (e, c) in &other.terms {
            out.accumulate(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, k: &T) -> Self {
        let mut out = Self::zero(self.n_vars, self.max_deg);
        if k.is_zero() {
            return out;
        }
        for (e, c) in &self.terms {
            out.accumulate(e.clone(), c.clone() * k.clone());
        }
        out
    }

    pub fn eval(&self, x: &[T]) -> Result<T, Error> {
        if x.len() != self.n_vars {
            return Err(Error::DimensionMismatch { expected: self.n_vars, found: x.len() });
        }
        let mut acc = T::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (i, &d) in e.iter().enumerate() {
                for _ in 0..d {
                    m = m * x[i].clone();
                }
            }
            acc = acc + m;
        }
        Ok(acc)
    }

    /// Embeds a multiaffine polynomial as 0/1 exponent vectors.
    pub fn from_multiaffine(p: &MultiAffinePoly<T>) -> Self {
        let n = p.n_vars();
        let mut out = Self::zero(n, 1);
        for s in p.support() {
            let expo: Vec<u32> = (0..n).map(|i| u32::from(s >> i & 1 == 1)).collect();
            out.accumulate(expo, p.coeff(s).clone());
        }
        out
    }

    /// Reads back a multiaffine polynomial; fails if any exponent exceeds 1.
    pub fn to_multiaffine(&self) -> Result<MultiAffinePoly<T>, Error> {
        let mut coeffs = vec![T::zero(); crate::subset::lattice_size(self.n_vars)];
        for (e, c) in &self.terms {
            let mut mask = 0u32;
            for (i, &d) in e.iter().enumerate() {
                match d {
                    0 => {}
                    1 => mask |= 1 << i,
                    _ => return Err(Error::DegreeExceedsCap { var: i, degree: d, cap: 1 }),
                }
            }
            coeffs[mask as usize] = c.clone();
        }
        MultiAffinePoly::new(self.n_vars, coeffs)
    }
}

/// Polynomial product; the degree cap grows to the sum of the caps.
pub fn dense_mul<T: Coeff>(p: &DensePoly<T>, q: &DensePoly<T>) -> Result<DensePoly<T>, Error> {
    if p.n_vars != q.n_vars {
        return Err(Error::DimensionMismatch { expected: p.n_vars, found: q.n_vars });
    }
    let mut out = DensePoly::zero(p.n_vars, p.max_deg + q.max_deg);
    for (e1, c1) in &p.terms {
        for (e2, c2) in &q.terms {
            let expo: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
            out.accumulate(expo, c1.clone() * c2.clone());
        }
    }
    Ok(out)
}

/// The differential operator prod_i (d/dz_i)^{t_i} with falling-factorial
/// coefficients.
pub fn dense_diffop<T: Coeff>(t: &[u32], p: &DensePoly<T>) -> Result<DensePoly<T>, Error> {
    if t.len() != p.n_vars {
        return Err(Error::DimensionMismatch { expected: p.n_vars, found: t.len() });
    }
    let mut out = DensePoly::zero(p.n_vars, p.max_deg);
    'term: for (e, c) in &p.terms {
        let mut factor = 1i64;
        let mut expo = Vec::with_capacity(e.len());
        for (&d, &k) in e.iter().zip(t) {
            if d < k {
                continue 'term;
            }
            for j in 0..k {
                factor *= i64::from(d - j);
            }
            expo.push(d - k);
        }
        out.accumulate(expo, c.clone() * T::from_i64(factor));
    }
    Ok(out)
}

/// Restriction to the diagonal z_1 = ... = z_n = x.
pub trait DiagRestrict {
    fn diag_restrict(&self) -> UniPoly;
}

impl DiagRestrict for MultiAffinePoly<f64> {
    fn diag_restrict(&self) -> UniPoly {
        let n = self.n_vars();
        let mut coeffs = vec![0.0; n + 1];
        for (s, &c) in self.coeffs().iter().enumerate() {
            coeffs[(s as u32).count_ones() as usize] += c;
        }
        UniPoly::new(coeffs)
    }
}

impl DiagRestrict for DensePoly<f64> {
    fn diag_restrict(&self) -> UniPoly {
        let top = self.n_vars as u32 * self.max_deg;
        let mut coeffs = vec![0.0; top as usize + 1];
        for (e, &c) in &self.terms {
            let total: u32 = e.iter().sum();
            coeffs[total as usize] += c;
        }
        UniPoly::new(coeffs)
    }
}

pub fn diag_restrict<P: DiagRestrict>(p: &P) -> UniPoly {
    p.diag_restrict()
}
