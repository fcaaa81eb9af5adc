//! Root-shift certificates for differential operators acting on stable
//! polynomials, the shift budget lemma, and the closed-form optimizations
//! behind the paving and mixed-characteristic bounds.

use crate::calculus::{above_roots, apply_diffop, index_potentials, TAU};
use crate::dense::DensePoly;
use crate::error::Error;
use crate::io::{digest_dense, digest_ma};
use crate::multiaffine::{ma_flip, MultiAffinePoly};
use crate::polarize::{polarize, replicate, symmetrize};
use crate::subset::{self, Subset};

/// Sentinel coordinate value for directions with vanishing potential:
/// the certified region is unbounded below there.
pub const UNBOUNDED: f64 = f64::NEG_INFINITY;

/// A certified point above the roots of q applied as a differential
/// operator to p. Coordinates with degenerate potential carry the
/// UNBOUNDED sentinel.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCertificate {
    pub c: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub phis: Vec<f64>,
    pub target_digest: String,
    pub verified: bool,
}

impl BoundCertificate {
    /// Coordinates reported as unbounded improvement.
    pub fn unbounded_coords(&self) -> Vec<usize> {
        self.c
            .iter()
            .enumerate()
            .filter(|(_, &x)| x == UNBOUNDED)
            .map(|(i, _)| i)
            .collect()
    }

    /// The certified point with unbounded coordinates replaced by the
    /// given finite stand-in (valid whenever the target does not involve
    /// those coordinates).
    pub fn finite_point(&self, stand_in: f64) -> Vec<f64> {
        self.c.iter().map(|&x| if x == UNBOUNDED { stand_in } else { x }).collect()
    }
}

fn certify(
    target_involves: impl Fn(usize) -> bool,
    check: impl Fn(&[f64]) -> Result<bool, Error>,
    a: &[f64],
    b: &[f64],
    phis: Vec<f64>,
    target_digest: String,
) -> Result<BoundCertificate, Error> {
    let n = a.len();
    let mut c = Vec::with_capacity(n);
    let mut sentinel_conflict = false;
    for i in 0..n {
        if phis[i] > TAU {
            c.push(a[i] + b[i] - 1.0 / phis[i]);
        } else {
            c.push(UNBOUNDED);
            if target_involves(i) {
                // cannot verify a point at -infinity in a live coordinate
                sentinel_conflict = true;
            }
        }
    }
    let probe: Vec<f64> = c.iter().map(|&x| if x == UNBOUNDED { 0.0 } else { x }).collect();
    let verified = !sentinel_conflict && check(&probe)?;
    Ok(BoundCertificate { c, a: a.to_vec(), b: b.to_vec(), phis, target_digest, verified })
}

/// Root-shift bound for q(d) applied to p: with a above the roots of p
/// and b above the roots of the flip of q, the point
/// c = a + b - (1/phi_1, ..., 1/phi_n),
/// phi_i = (d_i p / p)(a) + (d_i flip(q) / flip(q))(b),
/// lies above the roots of q(d)p. The certificate records the phis and
/// carries the result of re-checking the claim.
pub fn als_bound(
    p: &MultiAffinePoly<f64>,
    q: &MultiAffinePoly<f64>,
    a: &[f64],
    b: &[f64],
) -> Result<BoundCertificate, Error> {
    if !above_roots(p, a)? {
        return Err(Error::NotAboveRoots);
    }
    let flipped = ma_flip(q);
    if !above_roots(&flipped, b)? {
        return Err(Error::NotAboveRoots);
    }
    let target = apply_diffop(q, p)?;
    if target.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let pa = index_potentials(p, a)?;
    let fb = index_potentials(&flipped, b)?;
    let phis: Vec<f64> = pa.iter().zip(&fb).map(|(x, y)| x + y).collect();
    certify(
        |i| target.involves(i),
        |point| above_roots(&target, point),
        a,
        b,
        phis,
        digest_ma(&target),
    )
}

/// The polarized root-shift bound for higher-degree p: p is polarized
/// into k multiaffine copies per variable, the operator q is lifted to
/// blocks by substituting each z_i with the sum of its block variables,
/// and the certificate is read back in the original n coordinates. The
/// target q(d)p is recovered by block-symmetrizing the polarized image.
pub fn als_bound_polarized(
    p: &DensePoly<f64>,
    q: &MultiAffinePoly<f64>,
    a: &[f64],
    b: &[f64],
    k: u32,
) -> Result<BoundCertificate, Error> {
    let n = p.n_vars();
    if q.n_vars() != n {
        return Err(Error::DimensionMismatch { expected: n, found: q.n_vars() });
    }
    if a.len() != n || b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.len().max(b.len()) });
    }
    let pol = polarize(p, k)?;
    let lifted = lift_operator(q, k)?;
    let flipped = ma_flip(&lifted);
    let aa = replicate(a, k);
    let bb = replicate(b, k);
    if !above_roots(&pol, &aa)? {
        return Err(Error::NotAboveRoots);
    }
    if !above_roots(&flipped, &bb)? {
        return Err(Error::NotAboveRoots);
    }
    let image = apply_diffop(&lifted, &pol)?;
    if image.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let target = symmetrize(&image, k)?;
    let pot_p = index_potentials(&pol, &aa)?;
    let pot_q = index_potentials(&flipped, &bb)?;
    let ku = k as usize;
    let phis: Vec<f64> = (0..n).map(|i| pot_p[i * ku] + pot_q[i * ku]).collect();
    certify(
        |i| target.deg_in(i) > 0,
        |point| above_roots(&target, point),
        a,
        b,
        phis,
        digest_dense(&target),
    )
}

/// The lift of a multiaffine operator to the polarized variable set:
/// z_i is replaced by the sum of the k variables in block i, which keeps
/// the result multiaffine (one pick per block).
fn lift_operator(q: &MultiAffinePoly<f64>, k: u32) -> Result<MultiAffinePoly<f64>, Error> {
    let n = q.n_vars();
    let nk = n * k as usize;
    if nk > crate::multiaffine::MAX_VARS {
        return Err(Error::TooManyVariables { n_vars: nk, max: crate::multiaffine::MAX_VARS });
    }
    let mut coeffs = vec![0.0; subset::lattice_size(nk)];
    for s in q.support() {
        let c = *q.coeff(s);
        let vars = subset::to_indices(s);
        let m = vars.len();
        if m == 0 {
            coeffs[0] += c;
            continue;
        }
        // odometer over block-index choices, one per selected variable
        let mut picks = vec![0u32; m];
        'choices: loop {
            let mut mask: Subset = 0;
            for (t, &i) in vars.iter().enumerate() {
                mask |= 1 << (i as u32 * k + picks[t]);
            }
            coeffs[mask as usize] += c;
            let mut pos = 0;
            while picks[pos] + 1 == k {
                picks[pos] = 0;
                pos += 1;
                if pos == m {
                    break 'choices;
                }
            }
            picks[pos] += 1;
        }
    }
    MultiAffinePoly::new(nk, coeffs)
}

/// Admissible total shift budget in coordinates i and j from a point
/// above the roots: p(a) / (d_i p(a) + d_j p(a)). Spending at most this
/// much, split between the two coordinates, keeps every coordinate
/// potential from increasing.
pub fn shift_delta(
    p: &MultiAffinePoly<f64>,
    i: usize,
    j: usize,
    a: &[f64],
) -> Result<f64, Error> {
    let n = p.n_vars();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, limit: n });
    }
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, limit: n });
    }
    if i == j {
        return Err(Error::EqualIndices { index: i });
    }
    if !above_roots(p, a)? {
        return Err(Error::NotAboveRoots);
    }
    let phis = index_potentials(p, a)?;
    let denom = phis[i] + phis[j];
    if denom <= TAU {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / denom)
}

/// Minimizer of a -> a - 1/(eps/a + x) over a > 0: the minimum sits at
/// a = (sqrt(eps) - eps)/x with value -(1 - sqrt(eps))^2 / x.
pub fn min_a_closed_form(eps: f64, x: f64) -> Result<(f64, f64), Error> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain("eps must lie in (0, 1]"));
    }
    if !(x > 0.0) {
        return Err(Error::Domain("x must be positive"));
    }
    let s = eps.sqrt();
    Ok(((s - eps) / x, -(1.0 - s) * (1.0 - s) / x))
}

/// The paving barrier value
/// gamma = 2 sqrt(2 sqrt(eps) - eps) (1 - sqrt(eps)) sqrt(alpha (1 - alpha))
///         + alpha + (1 - 2 alpha)(2 sqrt(eps) - eps)
/// when sqrt(alpha) + sqrt(eps) <= 1, and the trivial estimate 1 beyond.
pub fn paving_gamma(eps: f64, alpha: f64) -> Result<f64, Error> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain("eps must lie in (0, 1]"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain("alpha must lie in (0, 1)"));
    }
    if alpha.sqrt() + eps.sqrt() > 1.0 {
        return Ok(1.0);
    }
    let u = 2.0 * eps.sqrt() - eps; // 1 - (1 - sqrt(eps))^2
    let gamma = 2.0 * (u * (alpha * (1.0 - alpha))).sqrt() * (1.0 - eps.sqrt())
        + alpha
        + (1.0 - 2.0 * alpha) * u;
    Ok(gamma.min(1.0))
}

/// Closed forms around the mixed characteristic polynomial of an
/// eps-trace decomposition raised through r-fold convolution powers.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedCharBound {
    /// Exact minimum of f(a,b) = a + b - 1/(eps/a + (b-r+1)/(b(b-r))):
    /// (sqrt(beta) + sqrt((1-beta)(r-1)))^2 with beta = (1-sqrt(eps))^2.
    pub exact_min: f64,
    /// The headline envelope (1 + sqrt(2r) eps^(1/4))^2.
    pub headline: f64,
    /// Rank-one comparison value (1 + sqrt(r eps))^2.
    pub mss_rank1: f64,
    /// General comparison value (1 + sqrt(eps))^2.
    pub mss_general: f64,
}

/// Root bound for the r-th convolution power construction, valid for
/// eps <= (1 - 1/sqrt(r))^2.
pub fn mixed_char_bound(eps: f64, r: u32) -> Result<MixedCharBound, Error> {
    if r < 1 {
        return Err(Error::Domain("r must be at least 1"));
    }
    if !(eps > 0.0) {
        return Err(Error::Domain("eps must be positive"));
    }
    let rf = f64::from(r);
    let edge = (1.0 - 1.0 / rf.sqrt()).powi(2);
    if eps > edge {
        return Err(Error::Domain("eps outside the validity regime (1 - 1/sqrt(r))^2"));
    }
    let beta = (1.0 - eps.sqrt()).powi(2);
    let exact_min = (beta.sqrt() + ((1.0 - beta) * (rf - 1.0)).sqrt()).powi(2);
    let headline = (1.0 + (2.0 * rf).sqrt() * eps.powf(0.25)).powi(2);
    Ok(MixedCharBound {
        exact_min,
        headline,
        mss_rank1: (1.0 + (rf * eps).sqrt()).powi(2),
        mss_general: (1.0 + eps.sqrt()).powi(2),
    })
}
