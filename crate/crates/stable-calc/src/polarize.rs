//! Polarization: trading per-variable degree for extra multiaffine
//! variables, and the inverse symmetrization.
//!
//! Variable i of the input owns the contiguous polarized block
//! i*k .. i*k+k-1; z_i^kappa becomes e_kappa(block i) / binom(k, kappa).

use crate::dense::DensePoly;
use crate::error::Error;
use crate::multiaffine::{MultiAffinePoly, MAX_VARS};
use crate::subset::{cardinality, lattice_size, Subset};

fn binom(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut v = 1.0;
    for j in 0..k.min(n - k) {
        v = v * f64::from(n - j) / f64::from(j + 1);
    }
    v.round()
}

/// Subsets of a k-bit block with the given cardinality.
fn block_subsets(k: u32, size: u32) -> Vec<Subset> {
    (0..1u32 << k).filter(|&m| cardinality(m) == size).collect()
}

/// Polarizes p into a multiaffine polynomial over n*k variables.
/// Every per-variable degree of p must be at most k.
pub fn polarize(p: &DensePoly<f64>, k: u32) -> Result<MultiAffinePoly<f64>, Error> {
    let n = p.n_vars();
    if k == 0 {
        return Err(Error::Domain("polarization block size must be positive"));
    }
    let big_n = n * k as usize;
    if big_n > MAX_VARS {
        return Err(Error::TooManyVariables { n_vars: big_n, max: MAX_VARS });
    }
    for var in 0..n {
        let d = p.deg_in(var);
        if d > k {
            return Err(Error::DegreeExceedsCap { var, degree: d, cap: k });
        }
    }
    let mut coeffs = vec![0.0; lattice_size(big_n)];
    for (expo, &c) in p.terms() {
        let weight = c
            / expo
                .iter()
                .map(|&d| binom(k, d))
                .product::<f64>();
        // Distribute over all choices of a size-e_i subset inside block i.
        let mut masks = vec![0u32];
        for (i, &d) in expo.iter().enumerate() {
            let shift = i * k as usize;
            let choices = block_subsets(k, d);
            let mut next = Vec::with_capacity(masks.len() * choices.len());
            for &m in &masks {
                for &ch in &choices {
                    next.push(m | ch << shift);
                }
            }
            masks = next;
        }
        for m in masks {
            coeffs[m as usize] += weight;
        }
    }
    MultiAffinePoly::new(big_n, coeffs)
}

/// Inverse of [`polarize`] on block-symmetric polynomials.
///
/// Fails when coefficients within a block-cardinality class deviate by more
/// than 1e-9 relative to the coefficient scale.
pub fn symmetrize(p: &MultiAffinePoly<f64>, k: u32) -> Result<DensePoly<f64>, Error> {
    if k == 0 {
        return Err(Error::Domain("block size must be positive"));
    }
    let big_n = p.n_vars();
    if big_n % k as usize != 0 {
        return Err(Error::DimensionMismatch {
            expected: big_n.next_multiple_of(k as usize),
            found: big_n,
        });
    }
    let n = big_n / k as usize;
    let scale = 1.0_f64.max(p.one_norm());

    // Group coefficients by the per-block cardinality profile.
    let mut groups: std::collections::BTreeMap<Vec<u32>, (f64, f64, f64)> =
        std::collections::BTreeMap::new();
    for (s, &c) in p.coeffs().iter().enumerate() {
        let profile: Vec<u32> = (0..n)
            .map(|i| {
                let block = (s >> (i * k as usize)) as u32 & ((1u32 << k) - 1);
                cardinality(block)
            })
            .collect();
        let entry = groups.entry(profile).or_insert((f64::INFINITY, f64::NEG_INFINITY, 0.0));
        entry.0 = entry.0.min(c);
        entry.1 = entry.1.max(c);
        entry.2 += c;
    }

    let mut out_terms = Vec::new();
    for (profile, (lo, hi, sum)) in groups {
        if hi - lo > 1e-9 * scale {
            return Err(Error::BlockAsymmetry { residual: (hi - lo) / scale });
        }
        // q_e = P_S * prod binom(k, e_i) with P_S the (common) group value,
        // and the group has exactly prod binom(k, e_i) members, so the sum
        // over the class is already the coefficient of z^e.
        if sum != 0.0 {
            out_terms.push((profile, sum));
        }
    }
    DensePoly::from_terms(n, k, out_terms)
}

/// Replicates each coordinate k times: (a_1, ..., a_n) to the polarized
/// point (a_1, ..., a_1, ..., a_n, ..., a_n).
pub fn replicate(a: &[f64], k: u32) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() * k as usize);
    for &v in a {
        for _ in 0..k {
            out.push(v);
        }
    }
    out
}
