//! Self-check suites: each one exercises a fast path against an
//! independent oracle or a certified inequality on seeded random
//! instances, and reports a case/failure count for the CLI.

use crate::bounds::als_bound;
use crate::calculus::{
    apply_diffop, convolve, convolve_def_oracle, diag_threshold, free_additive_convolution,
};
use crate::dense::{diag_restrict, DensePoly};
use crate::matrices::mixed_char_poly;
use crate::measures::{
    determinantal_measure, expected_charpoly, expected_charpoly_oracle, product_measure,
    SRMeasure,
};
use crate::multiaffine::{elem_sym, ma_flip, MultiAffinePoly};
use crate::paving::{assignment_lambda_max, paving_search};
use crate::polarize::polarize;
use crate::random::{
    random_hermitian, random_psd_contraction, random_real_rooted_monic, random_stable_ma,
    rank_one_resolution,
};
use crate::subset;
use crate::uni::{uni_max_root, UniPoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one suite: how many cases ran and how many failed.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
}

pub fn all_green(outcomes: &[SuiteOutcome]) -> bool {
    outcomes.iter().all(|o| o.failures == 0)
}

fn suite_rng(seed: u64, suite: u64) -> ChaCha8Rng {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    bytes[8..16].copy_from_slice(&suite.to_le_bytes());
    ChaCha8Rng::from_seed(bytes)
}

fn rand_ma(n: usize, rng: &mut ChaCha8Rng) -> MultiAffinePoly<f64> {
    let coeffs = (0..subset::lattice_size(n)).map(|_| rng.gen_range(-1.0..1.0)).collect();
    MultiAffinePoly::new(n, coeffs).expect("sized coefficient table")
}

fn rel_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    let scale = a
        .iter()
        .chain(b)
        .fold(0.0f64, |m, &x| m.max(x.abs()))
        .max(1e-12);
    let len = a.len().max(b.len());
    (0..len).all(|i| {
        let x = a.get(i).copied().unwrap_or(0.0);
        let y = b.get(i).copied().unwrap_or(0.0);
        (x - y).abs() <= tol * scale
    })
}

fn uni_to_dense(p: &UniPoly) -> DensePoly<f64> {
    let d = p.degree().unwrap_or(0) as u32;
    DensePoly::from_terms(
        1,
        d,
        p.coeffs().iter().enumerate().map(|(k, &c)| (vec![k as u32], c)),
    )
    .expect("univariate terms")
}

fn uniform_k_measure(n: usize, k: usize) -> SRMeasure {
    let ek: MultiAffinePoly<f64> = elem_sym(n, k).expect("guarded size");
    let count: f64 = ek.coeffs().iter().sum();
    let gen = MultiAffinePoly::new(n, ek.coeffs().iter().map(|c| c / count).collect())
        .expect("sized table");
    SRMeasure::from_gen(gen, "uniform_k").expect("normalized")
}

fn convolution_suite(n_cap: usize, seed: u64) -> SuiteOutcome {
    let mut rng = suite_rng(seed, 1);
    let cases = 30;
    let mut failures = 0;
    for t in 0..cases {
        let n = 1 + t % n_cap.min(6);
        let p = rand_ma(n, &mut rng);
        let q = rand_ma(n, &mut rng);
        let fast = convolve(&p, &q).expect("same vars");
        let slow = convolve_def_oracle(&p, &q).expect("same vars");
        if !rel_close(fast.coeffs(), slow.coeffs(), 1e-10) {
            failures += 1;
        }
    }
    SuiteOutcome { name: "convolution-oracle", cases, failures }
}

fn flip_transport_suite(n_cap: usize, seed: u64) -> SuiteOutcome {
    let mut rng = suite_rng(seed, 2);
    let cases = 30;
    let mut failures = 0;
    for t in 0..cases {
        let n = 1 + t % n_cap.min(6);
        let p = rand_ma(n, &mut rng);
        let q = rand_ma(n, &mut rng);
        let applied = apply_diffop(&q, &p).expect("same vars");
        let transported = convolve(&ma_flip(&q), &p).expect("same vars");
        if !rel_close(applied.coeffs(), transported.coeffs(), 1e-10) {
            failures += 1;
        }
    }
    SuiteOutcome { name: "flip-transport", cases, failures }
}

fn free_convolution_suite(_n_cap: usize, seed: u64) -> SuiteOutcome {
    let mut rng = suite_rng(seed, 3);
    let cases = 20;
    let mut failures = 0;
    for t in 0..cases {
        let d = 1 + t % 4;
        let p = random_real_rooted_monic(d, 2.0, &mut rng);
        let q = random_real_rooted_monic(d, 2.0, &mut rng);
        let direct = free_additive_convolution(&p, &q, d).expect("monic inputs");
        let ok = (|| -> Option<bool> {
            let pol_p = polarize(&uni_to_dense(&p), d as u32).ok()?;
            let pol_q = polarize(&uni_to_dense(&q), d as u32).ok()?;
            let conv = convolve(&pol_p, &pol_q).ok()?;
            let restricted = diag_restrict(&conv);
            Some(rel_close(direct.coeffs(), restricted.coeffs(), 1e-8))
        })();
        if ok != Some(true) {
            failures += 1;
        }
    }
    SuiteOutcome { name: "free-convolution", cases, failures }
}

fn als_suite(n_cap: usize, seed: u64) -> SuiteOutcome {
    let mut rng = suite_rng(seed, 4);
    let cases = 20;
    let mut failures = 0;
    for t in 0..cases {
        let n = 1 + t % n_cap.min(6);
        let ok = (|| -> Option<bool> {
            let p = random_stable_ma(n, &mut rng).ok()?;
            let q = match t % 3 {
                0 => elem_sym(n, 1).ok()?,
                1 => random_stable_ma(n, &mut rng).ok()?,
                _ => MultiAffinePoly::monomial(n, 1 << (t % n), 1.0),
            };
            // constants report an infinitely low threshold; any finite
            // point is above their (empty) root set
            let base_a = diag_threshold(&p).ok()?.max(-10.0);
            let base_b = diag_threshold(&ma_flip(&q)).ok()?.max(-10.0);
            let a = vec![base_a + 1.0 + rng.gen_range(0.0..0.5); n];
            let b = vec![base_b + 1.0 + rng.gen_range(0.0..0.5); n];
            let cert = als_bound(&p, &q, &a, &b).ok()?;
            Some(cert.verified)
        })();
        if ok != Some(true) {
            failures += 1;
        }
    }
    SuiteOutcome { name: "als-soundness", cases, failures }
}

fn expchar_suite(n_cap: usize, seed: u64) -> SuiteOutcome {
    let mut rng = suite_rng(seed, 5);
    let cases = 20;
    let mut failures = 0;
    for t in 0..cases {
        let n = 1 + t % n_cap.min(7);
        let a = random_hermitian(n, 1.0, &mut rng);
        let ok = (|| -> Option<bool> {
            let mu = match t % 3 {
                0 => product_measure(
                    &(0..n).map(|_| rng.gen_range(0.0..1.0)).collect::<Vec<_>>(),
                )
                .ok()?,
                1 => {
                    let c = random_psd_contraction(n, 1.0, &mut rng).ok()?;
                    determinantal_measure(&c).ok()?
                }
                _ => uniform_k_measure(n, 1 + t % n),
            };
            let fast = expected_charpoly(&mu, &a).ok()?;
            let slow = expected_charpoly_oracle(&mu, &a).ok()?;
            Some(rel_close(fast.coeffs(), slow.coeffs(), 1e-8))
        })();
        if ok != Some(true) {
            failures += 1;
        }
    }
    SuiteOutcome { name: "expected-charpoly", cases, failures }
}

fn paving_suite(n_cap: usize, seed: u64) -> SuiteOutcome {
    let mut rng = suite_rng(seed, 6);
    let cases = 10;
    let mut failures = 0;
    for t in 0..cases {
        let n = 2 + t % n_cap.min(6);
        let r = 2 + t % 2;
        let ok = (|| -> Option<bool> {
            let a = random_psd_contraction(n, 0.2, &mut rng).ok()?;
            let paving = paving_search(&a, r, false).ok()?;
            let recomputed = assignment_lambda_max(&a, paving.assignment(), r);
            let consistent = (paving.lambda_max() - recomputed).abs() <= 1e-10;
            Some(consistent && paving.lambda_max() <= 1.0 + 1e-8)
        })();
        if ok != Some(true) {
            failures += 1;
        }
    }
    SuiteOutcome { name: "paving-search", cases, failures }
}

fn mixed_suite(_n_cap: usize, seed: u64) -> SuiteOutcome {
    let mut rng = suite_rng(seed, 7);
    let cases = 10;
    let mut failures = 0;
    for t in 0..cases {
        let n = 1 + t % 3;
        let m = 2 * n;
        let eps = 0.8;
        let ok = (|| -> Option<bool> {
            let dec = rank_one_resolution(n, m, eps, &mut rng).ok()?;
            let chi = mixed_char_poly(&dec).ok()?;
            let root = uni_max_root(&chi).ok()?;
            let bound = (1.0 + eps.sqrt()).powi(2);
            Some(root <= bound + 1e-8)
        })();
        if ok != Some(true) {
            failures += 1;
        }
    }
    SuiteOutcome { name: "mixed-roots", cases, failures }
}

/// Runs every suite at the given size cap and seed.
pub fn run_all(n_cap: usize, seed: u64) -> Vec<SuiteOutcome> {
    let n_cap = n_cap.clamp(1, 8);
    vec![
        convolution_suite(n_cap, seed),
        flip_transport_suite(n_cap, seed),
        free_convolution_suite(n_cap, seed),
        als_suite(n_cap, seed),
        expchar_suite(n_cap, seed),
        paving_suite(n_cap, seed),
        mixed_suite(n_cap, seed),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_green_at_moderate_size() {
        let outcomes = run_all(5, 7);
        assert_eq!(outcomes.len(), 7);
        for o in &outcomes {
            assert_eq!(o.failures, 0, "suite {} failed {} of {}", o.name, o.failures, o.cases);
            assert!(o.cases > 0);
        }
        assert!(all_green(&outcomes));
    }

    #[test]
    fn outcomes_are_seed_deterministic() {
        let a = run_all(3, 11);
        let b = run_all(3, 11);
        assert_eq!(a, b);
    }
}
