//! Matrix pavings: exhaustive search for the best partition of indices
//! into blocks, analytic quality bounds for PSD contractions, and the
//! expected-characteristic-polynomial route that certifies existence.

use crate::bounds::paving_gamma;
use crate::error::Error;
use crate::matrices::{block_diag, lambda_max, principal_submatrix, HermitianMatrix};
use crate::measures::{equal_size_partition_measure, expected_charpoly, partition_measure};
use crate::par;
use crate::subset::Subset;
use crate::uni::uni_max_root;

/// Enumeration guard for exhaustive search: at most 2^24 assignments.
pub const SEARCH_GUARD: u128 = 1 << 24;

/// Assignment cap below which `paving_certificate` runs the search
/// automatically to fill in `best_found`.
const AUTO_SEARCH_CAP: u128 = 1 << 18;

/// A partition of the index set into `r` blocks together with its
/// realized quality: the max over blocks of the top eigenvalue of the
/// corresponding principal submatrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Paving {
    assignment: Vec<usize>,
    r: usize,
    lambda_max: f64,
}

impl Paving {
    /// Block id per index.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Max over blocks of the top eigenvalue of the diagonal block.
    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    /// Index subsets of the blocks, as bitmasks.
    pub fn block_masks(&self) -> Vec<Subset> {
        let mut masks = vec![0 as Subset; self.r];
        for (i, &j) in self.assignment.iter().enumerate() {
            masks[j] |= 1 << i;
        }
        masks
    }
}

/// Quality of an explicit assignment: max over blocks of the block's top
/// eigenvalue. Empty blocks contribute nothing.
pub fn assignment_lambda_max(a: &HermitianMatrix, assignment: &[usize], r: usize) -> f64 {
    let mut masks = vec![0 as Subset; r];
    for (i, &j) in assignment.iter().enumerate() {
        masks[j] |= 1 << i;
    }
    let mut worst = f64::NEG_INFINITY;
    for &m in &masks {
        if m != 0 {
            let sub = principal_submatrix(a, m).expect("assignment indices in range");
            worst = worst.max(lambda_max(&sub));
        }
    }
    worst
}

fn decode_assignment(mut code: u128, n: usize, r: usize) -> Vec<usize> {
    // most-significant digit first, so code order is lexicographic order
    let mut out = vec![0usize; n];
    for slot in (0..n).rev() {
        out[slot] = (code % r as u128) as usize;
        code /= r as u128;
    }
    out
}

/// Exhaustive search for the assignment minimizing the max-block top
/// eigenvalue; ties break to the lexicographically smallest assignment
/// vector. With `equal_size`, only balanced assignments (all blocks of
/// size n/r) compete.
pub fn paving_search(a: &HermitianMatrix, r: usize, equal_size: bool) -> Result<Paving, Error> {
    let n = a.n();
    if n == 0 || r == 0 {
        return Err(Error::Domain("need a nonempty matrix and at least one block"));
    }
    if equal_size && n % r != 0 {
        return Err(Error::Domain("equal-size paving needs dimension divisible by block count"));
    }
    if r == 1 {
        return Ok(Paving { assignment: vec![0; n], r, lambda_max: lambda_max(a) });
    }
    let total = (r as u128).pow(n as u32);
    if total > SEARCH_GUARD {
        return Err(Error::SizeGuard { size: total, limit: SEARCH_GUARD });
    }
    // r >= 2 makes 2^n <= r^n <= guard, so a full minor table fits
    let table = par::map_range(1usize << n, |m| {
        let sub = principal_submatrix(a, m as Subset).expect("mask in range");
        lambda_max(&sub)
    });
    let cap = if equal_size { n / r } else { n };
    let value = |code: usize| -> f64 {
        let mut rest = code as u128;
        let mut masks = vec![0 as Subset; r];
        let mut counts = vec![0usize; r];
        for slot in (0..n).rev() {
            let j = (rest % r as u128) as usize;
            rest /= r as u128;
            counts[j] += 1;
            if counts[j] > cap {
                return f64::INFINITY;
            }
            masks[j] |= 1 << slot;
        }
        let mut worst = f64::NEG_INFINITY;
        for &m in &masks {
            worst = worst.max(table[m as usize]);
        }
        worst
    };
    let (best_code, best_val) =
        par::min_by_index(total as usize, value, |x, y| x < y).expect("nonempty enumeration");
    Ok(Paving {
        assignment: decode_assignment(best_code as u128, n, r),
        r,
        lambda_max: best_val,
    })
}

/// Analytic paving-quality bounds for a PSD contraction with small
/// diagonal, plus the realized optimum when enumeration is cheap.
#[derive(Debug, Clone, PartialEq)]
pub struct PavingBoundReport {
    /// 4 r^{-1/4} + alpha.
    pub simple_bound: f64,
    /// Barrier-argument bound from `paving_gamma(1/r, alpha)`.
    pub gamma_bound: f64,
    /// Best max-block top eigenvalue found by exhaustive search, when run.
    pub best_found: Option<f64>,
    pub r: usize,
    pub alpha: f64,
    pub n: usize,
    /// The simple bound exceeds 1 and says nothing for a contraction.
    pub simple_trivial: bool,
    /// The gamma bound saturated at 1 (outside its validity regime or
    /// at its boundary).
    pub gamma_trivial: bool,
}

fn check_paving_hypotheses(
    a: &HermitianMatrix,
    r: usize,
    equal_size: bool,
) -> Result<f64, Error> {
    let n = a.n();
    if n == 0 || r == 0 {
        return Err(Error::Domain("need a nonempty matrix and at least one block"));
    }
    if equal_size && n % r != 0 {
        return Err(Error::Domain("equal-size paving needs dimension divisible by block count"));
    }
    let eig = a.eigenvalues();
    let lo = *eig.first().expect("n >= 1");
    let hi = *eig.last().expect("n >= 1");
    if lo < -1e-10 {
        return Err(Error::NotPsd { min_eigenvalue: lo });
    }
    if hi > 1.0 + 1e-10 {
        return Err(Error::NotContraction { norm: hi });
    }
    let alpha = a.diag().into_iter().fold(0.0f64, f64::max);
    Ok(alpha)
}

/// Bound report for a PSD contraction: the simple bound 4 r^{-1/4} +
/// alpha, the sharper gamma bound, and (when the assignment count is at
/// most 2^18) the exhaustively found optimum, verified against
/// min(simple, 1). Alpha is the largest diagonal entry and must lie in
/// (0, 1).
pub fn paving_certificate(
    a: &HermitianMatrix,
    r: usize,
    equal_size: bool,
) -> Result<PavingBoundReport, Error> {
    let alpha = check_paving_hypotheses(a, r, equal_size)?;
    if alpha >= 1.0 {
        return Err(Error::Domain("diagonal entries must be strictly below 1"));
    }
    if alpha <= 0.0 {
        return Err(Error::Domain("gamma bound needs a positive diagonal entry"));
    }
    let n = a.n();
    let eps = 1.0 / r as f64;
    let simple_bound = 4.0 * (r as f64).powf(-0.25) + alpha;
    let gamma_bound = paving_gamma(eps, alpha)?;
    let best_found = if (r as u128).pow(n as u32) <= AUTO_SEARCH_CAP {
        Some(paving_search(a, r, equal_size)?.lambda_max)
    } else {
        None
    };
    if let Some(best) = best_found {
        // inside the validity regime the analytic bound applies; outside
        // it only the contraction bound 1 is asserted
        let cap = if alpha.sqrt() + eps.sqrt() <= 1.0 {
            simple_bound.min(1.0)
        } else {
            1.0
        };
        if best > cap + 1e-8 {
            return Err(Error::BoundViolation { bound: cap, found: best });
        }
    }
    Ok(PavingBoundReport {
        simple_bound,
        gamma_bound,
        best_found,
        r,
        alpha,
        n,
        simple_trivial: simple_bound >= 1.0,
        gamma_trivial: gamma_bound >= 1.0,
    })
}

/// Largest root of the expected characteristic polynomial of B(S) =
/// A(S_1) + ... + A(S_r) over the (equal-size) uniform random partition,
/// computed as block_diag(A, r) sampled under the matching partition
/// measure. Some paving realizes a max-block eigenvalue at or below this
/// value. Needs dim * r <= 26 measure variables.
pub fn expected_charpoly_paving_root(
    a: &HermitianMatrix,
    r: usize,
    equal_size: bool,
) -> Result<f64, Error> {
    check_paving_hypotheses(a, r, equal_size)?;
    let n = a.n();
    let vars = n * r;
    if vars > crate::multiaffine::MAX_VARS {
        return Err(Error::SizeGuard {
            size: vars as u128,
            limit: crate::multiaffine::MAX_VARS as u128,
        });
    }
    let mu = if equal_size {
        equal_size_partition_measure(n / r, r)?
    } else {
        partition_measure(n, r)?
    };
    let b = block_diag(a, r)?;
    let chi = expected_charpoly(&mu, &b)?;
    uni_max_root(&chi)
}
