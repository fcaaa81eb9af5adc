//! Univariate real polynomials: restrictions, characteristic polynomials,
//! root extraction for real-rooted inputs.

use crate::error::Error;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Coefficients ascending by degree; trailing zeros are trimmed so the
/// leading coefficient is nonzero unless the polynomial is zero (empty).
#[derive(Debug, Clone, PartialEq)]
pub struct UniPoly {
    coeffs: Vec<f64>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![] }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// Monic polynomial with the given real roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        let mut p = Self::constant(1.0);
        for &r in roots {
            p = p.mul(&Self::new(vec![-r, 1.0]));
        }
        p
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of x^k (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<f64> {
        self.coeffs.last().copied()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| k as f64 * c)
            .collect();
        Self::new(coeffs)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Self::new(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::new(coeffs)
    }

    /// p(x + t) expanded in x.
    pub fn taylor_shift(&self, t: f64) -> Self {
        let d = self.coeffs.len();
        if d == 0 {
            return Self::zero();
        }
        // Repeated synthetic division by (x - (-t)) collects the shifted
        // coefficients in place.
        let mut work = self.coeffs.clone();
        let mut out = vec![0.0; d];
        for k in 0..d {
            for i in (k..d - 1).rev() {
                let next = work[i + 1];
                work[i] += t * next;
            }
            out[k] = work[k];
            // The next round divides the remaining quotient, which starts
            // one position higher.
        }
        // The loop above computes p(x+t) coefficients directly: after round
        // k, work[k] holds the coefficient of x^k of the shifted polynomial.
        Self::new(out)
    }

    /// Substitutes x <- k*x, scaling coefficient c_j by k^j.
    pub fn stretch(&self, k: f64) -> Self {
        let mut pow = 1.0;
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| {
                let v = c * pow;
                pow *= k;
                v
            })
            .collect();
        Self::new(coeffs)
    }

    /// All complex roots via the companion-matrix eigenvalues.
    pub fn complex_roots(&self) -> Result<Vec<Complex64>, Error> {
        let d = match self.degree() {
            None | Some(0) => return Err(Error::ZeroPolynomial),
            Some(d) => d,
        };
        let lead = self.coeffs[d];
        let comp = DMatrix::<f64>::from_fn(d, d, |i, j| {
            if j == d - 1 {
                -self.coeffs[i] / lead
            } else if i == j + 1 {
                1.0
            } else {
                0.0
            }
        });
        let eig = comp.complex_eigenvalues();
        Ok(eig.iter().copied().collect())
    }
}

/// Largest real root of a real-rooted polynomial.
///
/// Companion eigenvalues locate the root; a Newton polish from slightly
/// above the largest eigenvalue sharpens it to absolute accuracy 1e-10.
/// Inputs whose eigenvalues stray from the real axis are rejected; the gate
/// is loose (1e-4 relative) because clustered roots scatter eigenvalues by
/// a fractional power of machine epsilon.
pub fn uni_max_root(p: &UniPoly) -> Result<f64, Error> {
    let roots = p.complex_roots()?;
    let scale = roots.iter().map(|r| r.norm()).fold(1.0_f64, f64::max);
    let max_imag = roots.iter().map(|r| r.im.abs()).fold(0.0_f64, f64::max);
    if max_imag > 1e-4 * scale {
        return Err(Error::NotRealRooted { max_imag });
    }
    let lambda = roots.iter().map(|r| r.re).fold(f64::NEG_INFINITY, f64::max);

    // Normalize so the polynomial is positive above its largest root.
    let q = if p.leading().unwrap_or(1.0) < 0.0 { p.scale(-1.0) } else { p.clone() };
    let dq = q.derivative();
    let mut x = lambda + 1e-3 * (1.0 + lambda.abs());
    for _ in 0..500 {
        let v = q.eval(x);
        let dv = dq.eval(x);
        if dv == 0.0 {
            break;
        }
        let step = v / dv;
        let next = x - step;
        if !next.is_finite() {
            break;
        }
        x = next;
        if step.abs() <= 1e-13 * (1.0 + x.abs()) {
            break;
        }
    }
    // Newton never crosses below the top root from above; guard regardless.
    Ok(if x.is_finite() { x.max(lambda - 1e-9) } else { lambda })
}
