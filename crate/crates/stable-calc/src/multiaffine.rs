//! Multiaffine polynomials: degree at most one in each variable, stored as a
//! dense coefficient table indexed by subset bitmask.

use crate::error::Error;
use crate::scalar::Coeff;
use crate::subset::{self, Subset};

/// Hard cap on the variable count; the table has 2^n entries.
pub const MAX_VARS: usize = 26;

/// p(z_1,...,z_n) = sum over subsets S of p_S * prod_{i in S} z_i.
/// `coeffs[S]` is the coefficient of the monomial z^S.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiAffinePoly<T = f64> {
    n_vars: usize,
    coeffs: Vec<T>,
}

impl<T: Coeff> MultiAffinePoly<T> {
    /// Wraps a full coefficient table; the length must be exactly 2^n_vars.
    pub fn new(n_vars: usize, coeffs: Vec<T>) -> Result<Self, Error> {
        if n_vars > MAX_VARS {
            return Err(Error::TooManyVariables { n_vars, max: MAX_VARS });
        }
        if coeffs.len() != subset::lattice_size(n_vars) {
            return Err(Error::DimensionMismatch {
                expected: subset::lattice_size(n_vars),
                found: coeffs.len(),
            });
        }
        Ok(Self { n_vars, coeffs })
    }

    pub fn zero(n_vars: usize) -> Self {
        assert!(n_vars <= MAX_VARS);
        Self { n_vars, coeffs: vec![T::zero(); subset::lattice_size(n_vars)] }
    }

    pub fn constant(n_vars: usize, c: T) -> Self {
        let mut p = Self::zero(n_vars);
        p.coeffs[0] = c;
        p
    }

    /// The monomial c * z^s.
    pub fn monomial(n_vars: usize, s: Subset, c: T) -> Self {
        assert!((s as usize) < subset::lattice_size(n_vars));
        let mut p = Self::zero(n_vars);
        p.coeffs[s as usize] = c;
        p
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, s: Subset) -> &T {
        &self.coeffs[s as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Subsets with nonzero coefficient, ascending by bitmask.
    pub fn support(&self) -> Vec<Subset> {
        (0..self.coeffs.len())
            .filter(|&s| !self.coeffs[s].is_zero())
            .map(|s| s as Subset)
            .collect()
    }

    /// True when variable i occurs in some monomial with nonzero coefficient.
    pub fn involves(&self, i: usize) -> bool {
        (0..self.coeffs.len())
            .any(|s| subset::contains(s as Subset, i) && !self.coeffs[s].is_zero())
    }

    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        check_same_vars(self, other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Ok(Self { n_vars: self.n_vars, coeffs })
    }

    pub fn scale(&self, k: &T) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c.clone() * k.clone()).collect();
        Self { n_vars: self.n_vars, coeffs }
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> MultiAffinePoly<U> {
        MultiAffinePoly { n_vars: self.n_vars, coeffs: self.coeffs.iter().map(f).collect() }
    }
}

impl MultiAffinePoly<f64> {
    /// Guards against NaN/inf entering the table.
    pub fn check_finite(&self) -> Result<(), Error> {
        if self.coeffs.iter().all(|c| c.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFiniteValue)
        }
    }

    /// Sum of absolute coefficients; the scale used by tolerance checks.
    pub fn one_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }
}

pub(crate) fn check_same_vars<T: Coeff>(
    p: &MultiAffinePoly<T>,
    q: &MultiAffinePoly<T>,
) -> Result<(), Error> {
    if p.n_vars() == q.n_vars() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: p.n_vars(), found: q.n_vars() })
    }
}

/// Evaluates p at the point x.
pub fn ma_eval<T: Coeff>(p: &MultiAffinePoly<T>, x: &[T]) -> Result<T, Error> {
    if x.len() != p.n_vars() {
        return Err(Error::DimensionMismatch { expected: p.n_vars(), found: x.len() });
    }
    // Horner over variables: fold the table down one variable at a time,
    // g[S] <- g[S] + x_i * g[S | {i}] for S not containing i.
    let mut g = p.coeffs.clone();
    let mut len = g.len();
    for i in (0..p.n_vars()).rev() {
        len >>= 1;
        let bit = 1usize << i;
        for s in 0..len {
            let hi = g[s | bit].clone();
            g[s] = g[s].clone() + x[i].clone() * hi;
        }
    }
    Ok(g[0].clone())
}

/// Partial derivative with respect to variable i.
pub fn ma_partial<T: Coeff>(p: &MultiAffinePoly<T>, i: usize) -> Result<MultiAffinePoly<T>, Error> {
    if i >= p.n_vars() {
        return Err(Error::IndexOutOfRange { index: i, limit: p.n_vars() });
    }
    let bit = 1usize << i;
    let mut out = MultiAffinePoly::zero(p.n_vars());
    for s in 0..p.coeffs.len() {
        if s & bit == 0 {
            out.coeffs[s] = p.coeffs[s | bit].clone();
        }
    }
    Ok(out)
}

/// The flip: coefficient at S moves to the complement of S.
pub fn ma_flip<T: Coeff>(q: &MultiAffinePoly<T>) -> MultiAffinePoly<T> {
    let full = subset::full_mask(q.n_vars()) as usize;
    let mut out = MultiAffinePoly::zero(q.n_vars());
    for s in 0..q.coeffs.len() {
        out.coeffs[full & !s] = q.coeffs[s].clone();
    }
    out
}

/// Coefficientwise (Hadamard) product.
pub fn ma_hadamard<T: Coeff>(
    p: &MultiAffinePoly<T>,
    q: &MultiAffinePoly<T>,
) -> Result<MultiAffinePoly<T>, Error> {
    check_same_vars(p, q)?;
    let coeffs = p
        .coeffs
        .iter()
        .zip(&q.coeffs)
        .map(|(a, b)| a.clone() * b.clone())
        .collect();
    Ok(MultiAffinePoly { n_vars: p.n_vars, coeffs })
}

/// Elementary symmetric polynomial e_m in n variables.
pub fn elem_sym<T: Coeff>(n_vars: usize, m: usize) -> Result<MultiAffinePoly<T>, Error> {
    if m > n_vars {
        return Err(Error::IndexOutOfRange { index: m, limit: n_vars });
    }
    let mut p = MultiAffinePoly::zero(n_vars);
    for s in 0..p.coeffs.len() {
        if subset::cardinality(s as Subset) as usize == m {
            p.coeffs[s] = T::one();
        }
    }
    Ok(p)
}
