//! The convolution / flip / differential-operator calculus on multiaffine
//! polynomials, above-the-roots certification, barrier potentials, the
//! softened maximum root, and the finite free additive convolution.

use crate::dense::{dense_diffop, dense_mul, DensePoly};
use crate::error::Error;
use crate::multiaffine::{check_same_vars, MultiAffinePoly};
use crate::par;
use crate::scalar::Coeff;
use crate::subset::{self, Subset};
use crate::uni::{uni_max_root, UniPoly};

/// Relative tolerance against the coefficient 1-norm at every strict
/// positivity check.
pub const TAU: f64 = 1e-9;

/// Subset convolution on the covering lattice:
/// (p * q)_S = sum over R, T with R union T = [n] and R intersect T = S
/// of p_R q_T. Work is Theta(3^n): for each S the complement splits in
/// 2^(n-|S|) ways.
pub fn convolve<T: Coeff>(
    p: &MultiAffinePoly<T>,
    q: &MultiAffinePoly<T>,
) -> Result<MultiAffinePoly<T>, Error> {
    check_same_vars(p, q)?;
    let n = p.n_vars();
    let full = subset::full_mask(n);
    let pc = p.coeffs();
    let qc = q.coeffs();
    let coeffs = par::map_range(subset::lattice_size(n), |s| {
        let s = s as Subset;
        let comp = full & !s;
        let mut acc = T::zero();
        for x in subset::submasks(comp) {
            let r = (s | x) as usize;
            let t = (s | (comp & !x)) as usize;
            acc = acc + pc[r].clone() * qc[t].clone();
        }
        acc
    });
    MultiAffinePoly::new(n, coeffs)
}

/// Sequential twin of [`convolve`], kept for benchmarks.
pub fn convolve_seq(
    p: &MultiAffinePoly<f64>,
    q: &MultiAffinePoly<f64>,
) -> Result<MultiAffinePoly<f64>, Error> {
    check_same_vars(p, q)?;
    let n = p.n_vars();
    let full = subset::full_mask(n);
    let pc = p.coeffs();
    let qc = q.coeffs();
    let coeffs = par::map_range_seq(subset::lattice_size(n), |s| {
        let s = s as Subset;
        let comp = full & !s;
        let mut acc = 0.0;
        for x in subset::submasks(comp) {
            acc += pc[(s | x) as usize] * qc[(s | (comp & !x)) as usize];
        }
        acc
    });
    MultiAffinePoly::new(n, coeffs)
}

/// Definition-level oracle for the convolution: differentiate the product
/// once in every variable, then halve the argument. The result of
/// d^[n](pq) has degree at most one per variable, and substituting
/// z_i <- z_i/2 scales the coefficient at S by 2^(-|S|).
pub fn convolve_def_oracle<T: Coeff>(
    p: &MultiAffinePoly<T>,
    q: &MultiAffinePoly<T>,
) -> Result<MultiAffinePoly<T>, Error> {
    check_same_vars(p, q)?;
    let n = p.n_vars();
    let pq = dense_mul(&DensePoly::from_multiaffine(p), &DensePoly::from_multiaffine(q))?;
    let derived = dense_diffop(&vec![1u32; n], &pq)?;
    let ma = derived.to_multiaffine()?;
    let coeffs = ma
        .coeffs()
        .iter()
        .enumerate()
        .map(|(s, c)| {
            let card = (s as u32).count_ones();
            c.clone() / T::from_i64(1i64 << card)
        })
        .collect();
    MultiAffinePoly::new(n, coeffs)
}

/// Applies q as a constant-coefficient differential operator to p:
/// r_S = sum over T disjoint from S of q_T p_{S union T}.
///
/// Two gather strategies share the formula: a walk over submasks of the
/// complement (total 3^n) or a scan of q's support (|supp| * 2^n); the
/// cheaper one is chosen up front.
pub fn apply_diffop<T: Coeff>(
    q: &MultiAffinePoly<T>,
    p: &MultiAffinePoly<T>,
) -> Result<MultiAffinePoly<T>, Error> {
    apply_diffop_inner(q, p, false)
}

/// Sequential twin of [`apply_diffop`], kept for benchmarks.
pub fn apply_diffop_seq<T: Coeff>(
    q: &MultiAffinePoly<T>,
    p: &MultiAffinePoly<T>,
) -> Result<MultiAffinePoly<T>, Error> {
    apply_diffop_inner(q, p, true)
}

fn apply_diffop_inner<T: Coeff>(
    q: &MultiAffinePoly<T>,
    p: &MultiAffinePoly<T>,
    force_seq: bool,
) -> Result<MultiAffinePoly<T>, Error> {
    check_same_vars(q, p)?;
    let n = p.n_vars();
    let size = subset::lattice_size(n);
    let full = subset::full_mask(n);
    let pc = p.coeffs();
    let qc = q.coeffs();
    let support = q.support();
    let sparse = (support.len() as f64) * (size as f64) < 3f64.powi(n as i32);
    let body = |s: usize| {
        let s = s as Subset;
        let mut acc = T::zero();
        if sparse {
            for &t in &support {
                if t & s == 0 {
                    acc = acc + qc[t as usize].clone() * pc[(s | t) as usize].clone();
                }
            }
        } else {
            for t in subset::submasks(full & !s) {
                acc = acc + qc[t as usize].clone() * pc[(s | t) as usize].clone();
            }
        }
        acc
    };
    let coeffs =
        if force_seq { par::map_range_seq(size, body) } else { par::map_range(size, body) };
    MultiAffinePoly::new(n, coeffs)
}

// ---------------------------------------------------------------------------
// Above-the-roots certification
// ---------------------------------------------------------------------------

/// Flips the global sign so the top total-degree part has positive
/// coefficient sum; above-the-roots is scale invariant but the recursive
/// positivity criterion needs a fixed convention.
fn normalized_sign(coeffs: &[f64]) -> f64 {
    let mut top_deg = 0u32;
    let mut top_sum = 0.0;
    let mut top_first = 0.0;
    for (s, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let d = (s as u32).count_ones();
        if d > top_deg {
            top_deg = d;
            top_sum = 0.0;
            top_first = 0.0;
        }
        if d == top_deg {
            top_sum += c;
            if top_first == 0.0 {
                top_first = c;
            }
        }
    }
    let pivot = if top_sum != 0.0 { top_sum } else { top_first };
    if pivot < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// In-place butterfly: for every S without bit i, g[S] += m * g[S | bit_i].
fn level_combine(g: &mut [f64], i: usize, m: f64) {
    let block = 1usize << i;
    let combine = |pair: &mut [f64]| {
        let (lo, hi) = pair.split_at_mut(block);
        for (l, h) in lo.iter_mut().zip(hi) {
            *l += m * *h;
        }
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if g.len() >= 1 << 16 {
            g.par_chunks_mut(block * 2).for_each(combine);
            return;
        }
    }
    g.chunks_mut(block * 2).for_each(combine);
}

/// All mixed partial derivatives evaluated at a: returns the table
/// v[S] = (d^S p)(a), computed by n butterfly passes.
fn all_partials_at(coeffs: &[f64], n: usize, a: &[f64]) -> Vec<f64> {
    let mut g = coeffs.to_vec();
    for i in 0..n {
        level_combine(&mut g, i, a[i]);
    }
    g
}

/// Decides whether a lies above the roots via the recursive derivative
/// criterion: every not-identically-zero mixed partial must be strictly
/// positive at a (after sign normalization), with margin TAU relative to
/// that partial's coefficient 1-norm.
pub trait AboveRoots {
    fn above_roots_impl(&self, a: &[f64]) -> Result<bool, Error>;
}

pub fn above_roots<P: AboveRoots + ?Sized>(p: &P, a: &[f64]) -> Result<bool, Error> {
    p.above_roots_impl(a)
}

impl AboveRoots for MultiAffinePoly<f64> {
    fn above_roots_impl(&self, a: &[f64]) -> Result<bool, Error> {
        if a.len() != self.n_vars() {
            return Err(Error::DimensionMismatch { expected: self.n_vars(), found: a.len() });
        }
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("point coordinates must be finite"));
        }
        let sign = normalized_sign(self.coeffs());
        let signed: Vec<f64> = self.coeffs().iter().map(|&c| sign * c).collect();
        let n = self.n_vars();
        let v = all_partials_at(&signed, n, a);
        // w[S] = coefficient 1-norm of d^S p, a superset sum over |coeffs|.
        let mut w: Vec<f64> = signed.iter().map(|c| c.abs()).collect();
        for i in 0..n {
            level_combine(&mut w, i, 1.0);
        }
        Ok(v.iter().zip(&w).all(|(&vs, &ws)| ws == 0.0 || vs > TAU * ws))
    }
}

impl AboveRoots for DensePoly<f64> {
    fn above_roots_impl(&self, a: &[f64]) -> Result<bool, Error> {
        if a.len() != self.n_vars() {
            return Err(Error::DimensionMismatch { expected: self.n_vars(), found: a.len() });
        }
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("point coordinates must be finite"));
        }
        // Enumerate all derivative orders up to the per-variable degrees.
        let n = self.n_vars();
        let degs: Vec<u32> = (0..n).map(|i| self.deg_in(i)).collect();
        let mut top_deg = 0u32;
        let mut top_sum = 0.0;
        for (e, &c) in self.terms() {
            let d: u32 = e.iter().sum();
            use std::cmp::Ordering::*;
            match d.cmp(&top_deg) {
                Greater => {
                    top_deg = d;
                    top_sum = c;
                }
                Equal => top_sum += c,
                Less => {}
            }
        }
        let sign = if top_sum < 0.0 { -1.0 } else { 1.0 };
        let base = self.scale(&sign);

        let mut order = vec![0u32; n];
        loop {
            let d = dense_diffop_multi(&base, &order)?;
            if !d.is_zero() {
                let norm: f64 = d.terms().map(|(_, c)| c.abs()).sum();
                let val = d.eval(a)?;
                if val <= TAU * norm {
                    return Ok(false);
                }
            }
            // odometer over 0..=degs
            let mut pos = 0;
            loop {
                if pos == n {
                    return Ok(true);
                }
                if order[pos] < degs[pos] {
                    order[pos] += 1;
                    break;
                }
                order[pos] = 0;
                pos += 1;
            }
        }
    }
}

fn dense_diffop_multi(p: &DensePoly<f64>, order: &[u32]) -> Result<DensePoly<f64>, Error> {
    dense_diffop(order, p)
}

/// A point certified to lie above the roots of a specific polynomial,
/// identified by the digest of its canonical serialization.
#[derive(Debug, Clone, PartialEq)]
pub struct AboveRootsPoint {
    point: Vec<f64>,
    poly_digest: String,
}

impl AboveRootsPoint {
    pub fn certify_ma(p: &MultiAffinePoly<f64>, point: Vec<f64>) -> Result<Self, Error> {
        if !above_roots(p, &point)? {
            return Err(Error::NotAboveRoots);
        }
        Ok(Self { point, poly_digest: crate::io::digest_ma(p) })
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn poly_digest(&self) -> &str {
        &self.poly_digest
    }
}

// ---------------------------------------------------------------------------
// Barrier potentials
// ---------------------------------------------------------------------------

/// Direction of a potential: a coordinate index or a vector in the closed
/// positive orthant.
#[derive(Debug, Clone, PartialEq)]
pub enum Direction {
    Index(usize),
    Vector(Vec<f64>),
}

/// A directional logarithmic derivative D_v p / p evaluated above the roots.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialValue {
    pub value: f64,
    pub direction: Direction,
}

/// Phi^v_p(a) = D_v p(a) / p(a); for an index k this is d_k p(a) / p(a).
pub fn potential(
    p: &MultiAffinePoly<f64>,
    a: &[f64],
    direction: Direction,
) -> Result<PotentialValue, Error> {
    if a.len() != p.n_vars() {
        return Err(Error::DimensionMismatch { expected: p.n_vars(), found: a.len() });
    }
    let sign = normalized_sign(p.coeffs());
    let signed: Vec<f64> = p.coeffs().iter().map(|&c| sign * c).collect();
    let n = p.n_vars();
    let v = all_partials_at(&signed, n, a);
    let denom = v[0];
    if denom <= TAU * p.one_norm() {
        return Err(Error::NotAboveRoots);
    }
    let numer = match &direction {
        Direction::Index(k) => {
            if *k >= n {
                return Err(Error::IndexOutOfRange { index: *k, limit: n });
            }
            v[1usize << k]
        }
        Direction::Vector(vd) => {
            if vd.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: vd.len() });
            }
            if vd.iter().any(|&x| x < 0.0 || !x.is_finite()) {
                return Err(Error::Domain("direction must lie in the closed positive orthant"));
            }
            (0..n).map(|i| vd[i] * v[1usize << i]).sum()
        }
    };
    Ok(PotentialValue { value: numer / denom, direction })
}

/// All coordinate potentials (d_i p / p)(a) from a single butterfly pass.
pub(crate) fn index_potentials(p: &MultiAffinePoly<f64>, a: &[f64]) -> Result<Vec<f64>, Error> {
    if a.len() != p.n_vars() {
        return Err(Error::DimensionMismatch { expected: p.n_vars(), found: a.len() });
    }
    let sign = normalized_sign(p.coeffs());
    let signed: Vec<f64> = p.coeffs().iter().map(|&c| sign * c).collect();
    let n = p.n_vars();
    let v = all_partials_at(&signed, n, a);
    if v[0] <= TAU * p.one_norm() {
        return Err(Error::NotAboveRoots);
    }
    Ok((0..n).map(|i| v[1usize << i] / v[0]).collect())
}

// ---------------------------------------------------------------------------
// Diagonal threshold
// ---------------------------------------------------------------------------

/// Sentinel returned when every point is above the roots (constants).
pub const ALWAYS_ABOVE: f64 = f64::NEG_INFINITY;

/// inf { s : s * (1,...,1) is above the roots }, located by bracketed
/// bisection to 1e-9 absolute. Constant polynomials return ALWAYS_ABOVE.
pub fn diag_threshold(p: &MultiAffinePoly<f64>) -> Result<f64, Error> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let n = p.n_vars();
    if n == 0 || p.support().iter().all(|&s| s == 0) {
        return Ok(ALWAYS_ABOVE);
    }
    let probe = |s: f64| above_roots(p, &vec![s; n]);
    let mut hi = 1.0;
    let mut tries = 0;
    while !probe(hi)? {
        hi = hi * 2.0 + 1.0;
        tries += 1;
        if tries > 60 {
            return Err(Error::BracketFailure);
        }
    }
    let mut lo = -1.0;
    tries = 0;
    while probe(lo)? {
        lo = lo * 2.0 - 1.0;
        tries += 1;
        if tries > 60 {
            return Err(Error::BracketFailure);
        }
    }
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if probe(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

// ---------------------------------------------------------------------------
// Softened maximum root and finite free additive convolution
// ---------------------------------------------------------------------------

/// smax_phi(p) = largest root of p' - phi * p.
pub fn uni_smax(p: &UniPoly, phi: f64) -> Result<f64, Error> {
    if !(phi > 0.0) {
        return Err(Error::Domain("phi must be positive"));
    }
    uni_max_root(&p.derivative().sub(&p.scale(phi)))
}

/// Degree-d free additive convolution of monic real polynomials:
/// (p [+]_d q)(x + y) = (1/d!) * sum_k p^(k)(x) q^(d-k)(y).
///
/// The defining sum is evaluated at y = 0 to read off the result; a second
/// evaluation at y = 1 must agree with the shifted result (the definition
/// is independent of the split), enforced to 1e-8.
pub fn free_additive_convolution(p: &UniPoly, q: &UniPoly, d: usize) -> Result<UniPoly, Error> {
    if d == 0 {
        return Err(Error::Domain("degree must be positive"));
    }
    check_monic(p, d)?;
    check_monic(q, d)?;
    let mut d_fact = 1.0;
    for k in 1..=d {
        d_fact *= k as f64;
    }
    let p_derivs = derivative_tower(p, d);
    let q_derivs = derivative_tower(q, d);

    let assemble = |y: f64| {
        let mut acc = UniPoly::zero();
        for k in 0..=d {
            let qv = q_derivs[d - k].eval(y);
            acc = acc.add(&p_derivs[k].scale(qv));
        }
        acc.scale(1.0 / d_fact)
    };
    let at_zero = assemble(0.0);
    let at_one = assemble(1.0);
    let shifted = at_zero.taylor_shift(1.0);
    let scale = at_zero.coeffs().iter().map(|c| c.abs()).fold(1.0, f64::max);
    let residual = at_one
        .sub(&shifted)
        .coeffs()
        .iter()
        .map(|c| c.abs())
        .fold(0.0, f64::max);
    if residual > 1e-8 * scale {
        return Err(Error::Domain("free convolution split-independence residual too large"));
    }
    Ok(at_zero)
}

fn check_monic(p: &UniPoly, d: usize) -> Result<(), Error> {
    if p.degree() != Some(d) || (p.leading().unwrap() - 1.0).abs() > 1e-9 {
        return Err(Error::NotMonic { degree: d });
    }
    Ok(())
}

fn derivative_tower(p: &UniPoly, d: usize) -> Vec<UniPoly> {
    let mut out = Vec::with_capacity(d + 1);
    out.push(p.clone());
    for k in 1..=d {
        let next = out[k - 1].derivative();
        out.push(next);
    }
    out
}
