//! Strongly Rayleigh measures represented by their multiaffine generating
//! polynomials, their marginals, and the expected characteristic
//! polynomial of a randomly sampled principal submatrix.

use crate::calculus::apply_diffop;
use crate::dense::diag_restrict;
use crate::error::Error;
use crate::matrices::{char_multiaffine, principal_submatrix, HermitianMatrix};
use crate::multiaffine::{ma_flip, MultiAffinePoly};
use crate::par;
use crate::subset::{self, Subset};
use crate::uni::UniPoly;

/// A probability measure on subsets of [n], carried by its generating
/// polynomial sum_S mu(S) z^S.
#[derive(Debug, Clone, PartialEq)]
pub struct SRMeasure {
    gen: MultiAffinePoly<f64>,
    label: String,
}

impl SRMeasure {
    /// Wraps a generating polynomial after validating that it is a
    /// probability distribution: coefficients at least -1e-12 and total
    /// mass 1 within 1e-9.
    pub fn from_gen(gen: MultiAffinePoly<f64>, label: impl Into<String>) -> Result<Self, Error> {
        let mut mass = 0.0;
        for &c in gen.coeffs() {
            if c < -1e-12 {
                return Err(Error::InvalidMeasure { detail: "negative probability" });
            }
            mass += c;
        }
        if (mass - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidMeasure { detail: "total mass is not 1" });
        }
        Ok(Self { gen, label: label.into() })
    }

    pub fn gen(&self) -> &MultiAffinePoly<f64> {
        &self.gen
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n_vars(&self) -> usize {
        self.gen.n_vars()
    }

    /// Probability of the subset S.
    pub fn prob(&self, s: Subset) -> f64 {
        *self.gen.coeff(s)
    }

    /// Support subsets (nonzero probability), ascending by bitmask.
    pub fn support(&self) -> Vec<Subset> {
        self.gen.support()
    }

    /// The common cardinality of all support sets, if the measure is
    /// homogeneous; None otherwise.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut degree = None;
        for s in self.support() {
            let d = subset::cardinality(s) as usize;
            match degree {
                None => degree = Some(d),
                Some(k) if k != d => return None,
                _ => {}
            }
        }
        degree
    }
}

/// Uniform measure on assignments of n items to r blocks: the generating
/// polynomial is the product over items of the normalized block sums,
/// over n * r variables with variable j*n + i meaning "item i in block j".
pub fn partition_measure(n_items: usize, r: usize) -> Result<SRMeasure, Error> {
    if r == 0 || n_items == 0 {
        return Err(Error::Domain("need at least one item and one block"));
    }
    let n_vars = n_items * r;
    if n_vars > crate::multiaffine::MAX_VARS {
        return Err(Error::SizeGuard {
            size: n_vars as u128,
            limit: crate::multiaffine::MAX_VARS as u128,
        });
    }
    let total = (r as u64).pow(n_items as u32);
    let weight = 1.0 / total as f64;
    let mut coeffs = vec![0.0; subset::lattice_size(n_vars)];
    for code in 0..total {
        let mut rest = code;
        let mut mask: Subset = 0;
        for i in 0..n_items {
            let j = (rest % r as u64) as usize;
            rest /= r as u64;
            mask |= 1 << (j * n_items + i);
        }
        coeffs[mask as usize] += weight;
    }
    SRMeasure::from_gen(
        MultiAffinePoly::new(n_vars, coeffs)?,
        format!("partition(n={n_items}, r={r})"),
    )
}

/// Uniform measure on partitions of [r*m] into r blocks of size exactly
/// m: the Hadamard product of the per-item block-assignment measure with
/// the per-block m-subset measure, renormalized.
pub fn equal_size_partition_measure(m: usize, r: usize) -> Result<SRMeasure, Error> {
    if r == 0 || m == 0 {
        return Err(Error::Domain("need positive block size and count"));
    }
    let n_items = r * m;
    let n_vars = n_items * r;
    if n_vars > crate::multiaffine::MAX_VARS {
        return Err(Error::SizeGuard {
            size: n_vars as u128,
            limit: crate::multiaffine::MAX_VARS as u128,
        });
    }
    // count balanced assignments: (rm)! / (m!)^r
    let mut count = 1.0f64;
    {
        // multinomial via incremental binomials to stay in range
        let mut remaining = n_items;
        for _ in 0..r {
            let mut choose = 1.0f64;
            for t in 0..m {
                choose = choose * (remaining - t) as f64 / (t + 1) as f64;
            }
            count *= choose;
            remaining -= m;
        }
    }
    let weight = 1.0 / count;
    let mut coeffs = vec![0.0; subset::lattice_size(n_vars)];
    let total = (r as u64).pow(n_items as u32);
    for code in 0..total {
        let mut rest = code;
        let mut counts = vec![0usize; r];
        let mut mask: Subset = 0;
        let mut ok = true;
        for i in 0..n_items {
            let j = (rest % r as u64) as usize;
            rest /= r as u64;
            counts[j] += 1;
            if counts[j] > m {
                ok = false;
                break;
            }
            mask |= 1 << (j * n_items + i);
        }
        if ok {
            coeffs[mask as usize] += weight;
        }
    }
    SRMeasure::from_gen(
        MultiAffinePoly::new(n_vars, coeffs)?,
        format!("equal_partition(m={m}, r={r})"),
    )
}

/// Independent-coordinate measure with marginals p.
pub fn product_measure(p: &[f64]) -> Result<SRMeasure, Error> {
    let n = p.len();
    if n > crate::multiaffine::MAX_VARS {
        return Err(Error::SizeGuard {
            size: n as u128,
            limit: crate::multiaffine::MAX_VARS as u128,
        });
    }
    for &x in p {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain("marginals must lie in [0, 1]"));
        }
    }
    let coeffs = par::map_range(subset::lattice_size(n), |s| {
        let mut c = 1.0;
        for (i, &pi) in p.iter().enumerate() {
            c *= if subset::contains(s as Subset, i) { pi } else { 1.0 - pi };
        }
        c
    });
    SRMeasure::from_gen(MultiAffinePoly::new(n, coeffs)?, format!("product(n={n})"))
}

/// Determinantal measure with marginal kernel K (0 <= K <= I): the
/// generating polynomial is det[diag(z) K + (I - K)], whose coefficient
/// at S is the determinant mixing rows of K on S with rows of I - K off
/// S. Inclusion probabilities are det K_S.
pub fn determinantal_measure(k: &HermitianMatrix) -> Result<SRMeasure, Error> {
    let n = k.n();
    if n > crate::multiaffine::MAX_VARS {
        return Err(Error::SizeGuard {
            size: n as u128,
            limit: crate::multiaffine::MAX_VARS as u128,
        });
    }
    let eig = k.eigenvalues();
    if let (Some(&lo), Some(&hi)) = (eig.first(), eig.last()) {
        if lo < -1e-10 {
            return Err(Error::NotPsd { min_eigenvalue: lo });
        }
        if hi > 1.0 + 1e-10 {
            return Err(Error::NotContraction { norm: hi });
        }
    }
    use nalgebra::DMatrix;
    use num_complex::Complex64;
    let table = par::map_range(subset::lattice_size(n), |s| {
        let s = s as Subset;
        let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for i in 0..n {
            for j in 0..n {
                let kij = k.entry(i, j);
                m[(i, j)] = if subset::contains(s, i) {
                    kij
                } else {
                    let delta = if i == j { 1.0 } else { 0.0 };
                    Complex64::new(delta, 0.0) - kij
                };
            }
        }
        if n == 0 {
            return (1.0, 0.0);
        }
        let det = m.lu().determinant();
        (det.re, det.im.abs())
    });
    let worst_im = table.iter().fold(0.0f64, |m, &(_, im)| m.max(im));
    if worst_im > 1e-10 {
        return Err(Error::ImaginaryResidue { residual: worst_im });
    }
    // clamp roundoff-negative probabilities within tolerance
    let coeffs: Vec<f64> = table
        .into_iter()
        .map(|(re, _)| if re < 0.0 && re > -1e-12 { 0.0 } else { re })
        .collect();
    SRMeasure::from_gen(MultiAffinePoly::new(n, coeffs)?, format!("determinantal(n={n})"))
}

/// Marginal probabilities: the i-th entry is the derivative of the
/// generating polynomial in z_i at the all-ones point, i.e. the total
/// mass of sets containing i.
pub fn marginals(mu: &SRMeasure) -> Vec<f64> {
    let n = mu.n_vars();
    let mut out = vec![0.0; n];
    for s in mu.support() {
        let c = mu.prob(s);
        for i in subset::to_indices(s) {
            out[i] += c;
        }
    }
    out
}

/// Expected characteristic polynomial of the principal submatrix A(S)
/// under S ~ mu, via the differential formula: apply the flip of the
/// generating polynomial to det[Z - A], then restrict to the diagonal.
/// The result is checked to be real rooted (roots within 1e-7 of the
/// real axis).
pub fn expected_charpoly(mu: &SRMeasure, a: &HermitianMatrix) -> Result<UniPoly, Error> {
    if mu.n_vars() != a.n() {
        return Err(Error::DimensionMismatch { expected: a.n(), found: mu.n_vars() });
    }
    let p = char_multiaffine(a)?;
    let applied = apply_diffop(&ma_flip(mu.gen()), &p)?;
    let out = diag_restrict(&applied);
    if out.degree().map_or(false, |d| d >= 1) {
        let mut worst = 0.0f64;
        for root in out.complex_roots()? {
            worst = worst.max(root.im.abs());
        }
        if worst > 1e-7 {
            return Err(Error::NotRealRooted { max_imag: worst });
        }
    }
    Ok(out)
}

/// Brute-force oracle: the weighted sum of characteristic polynomials of
/// all principal submatrices, mu(S) * chi[A(S)], enumerated over the
/// subset lattice with a fixed-chunk deterministic reduction.
pub fn expected_charpoly_oracle(mu: &SRMeasure, a: &HermitianMatrix) -> Result<UniPoly, Error> {
    let n = a.n();
    if mu.n_vars() != n {
        return Err(Error::DimensionMismatch { expected: n, found: mu.n_vars() });
    }
    if n > 12 {
        return Err(Error::SizeGuard { size: n as u128, limit: 12 });
    }
    let gen = mu.gen();
    let width = n + 1;
    let coeffs = par::sum_vectors(subset::lattice_size(n), width, |s| {
        let w = gen.coeffs()[s];
        let mut acc = vec![0.0; width];
        if w == 0.0 {
            return acc;
        }
        let sub = principal_submatrix(a, s as Subset).expect("subset in range");
        let chi = UniPoly::from_roots(&sub.eigenvalues());
        for (k, c) in chi.coeffs().iter().enumerate() {
            acc[k] = w * c;
        }
        acc
    });
    Ok(UniPoly::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrices::lambda_max;
    use crate::uni::uni_max_root;
    use nalgebra::DMatrix;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};

    fn rand_hermitian(n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> HermitianMatrix {
        let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for i in 0..n {
            m[(i, i)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
            for j in i + 1..n {
                let e = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[(i, j)] = e;
                m[(j, i)] = e.conj();
            }
        }
        HermitianMatrix::new(m).unwrap()
    }

    fn rand_contraction_kernel(n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> HermitianMatrix {
        // V diag(u) V* with u in [0,1]: a valid marginal kernel
        let g = rand_hermitian(n, rng);
        let eig = g.matrix().clone().symmetric_eigen();
        let mut d = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for i in 0..n {
            d[(i, i)] = Complex64::new(rng.gen_range(0.0..1.0), 0.0);
        }
        let v = &eig.eigenvectors;
        HermitianMatrix::new(v * d * v.adjoint()).unwrap()
    }

    #[test]
    fn partition_measure_examples() {
        let mu = partition_measure(1, 2).unwrap();
        assert_eq!(mu.n_vars(), 2);
        assert!((mu.prob(0b01) - 0.5).abs() < 1e-15);
        assert!((mu.prob(0b10) - 0.5).abs() < 1e-15);
        assert_eq!(marginals(&mu), vec![0.5, 0.5]);

        let mu = partition_measure(2, 2).unwrap();
        assert_eq!(mu.support().len(), 4);
        for s in mu.support() {
            assert!((mu.prob(s) - 0.25).abs() < 1e-15);
        }
        assert_eq!(mu.homogeneous_degree(), Some(2));
        for m in marginals(&mu) {
            assert!((m - 0.5).abs() < 1e-12);
        }

        let mu = partition_measure(2, 3).unwrap();
        assert_eq!(mu.support().len(), 9);
        for m in marginals(&mu) {
            assert!((m - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_size_partition_examples() {
        let mu = equal_size_partition_measure(1, 2).unwrap();
        // items {1,2} into two singleton blocks: two balanced assignments
        assert_eq!(mu.support().len(), 2);
        for s in mu.support() {
            assert!((mu.prob(s) - 0.5).abs() < 1e-15);
        }
        let mu = equal_size_partition_measure(2, 2).unwrap();
        assert_eq!(mu.support().len(), 6); // 4!/(2!)^2
        assert_eq!(mu.homogeneous_degree(), Some(4));
        for m in marginals(&mu) {
            assert!((m - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn marginals_of_product_measure() {
        let p = [0.2, 0.7, 0.5];
        let mu = product_measure(&p).unwrap();
        let marg = marginals(&mu);
        for (a, b) in marg.iter().zip(&p) {
            assert!((a - b).abs() < 1e-12);
        }
        // homogeneity identity: E|S| = sum of marginals
        let mut esize = 0.0;
        for s in mu.support() {
            esize += mu.prob(s) * subset::cardinality(s) as f64;
        }
        let total: f64 = marg.iter().sum();
        assert!((esize - total).abs() < 1e-12);
    }

    #[test]
    fn measure_validation_rejects_bad_inputs() {
        let neg = MultiAffinePoly::new(1, vec![1.5, -0.5]).unwrap();
        assert!(matches!(
            SRMeasure::from_gen(neg, "bad"),
            Err(Error::InvalidMeasure { .. })
        ));
        let off = MultiAffinePoly::new(1, vec![0.6, 0.6]).unwrap();
        assert!(matches!(
            SRMeasure::from_gen(off, "bad"),
            Err(Error::InvalidMeasure { .. })
        ));
    }

    #[test]
    fn bernoulli_expected_charpoly() {
        for p in [0.0, 0.3, 1.0] {
            let gen = MultiAffinePoly::new(1, vec![1.0 - p, p]).unwrap();
            let mu = SRMeasure::from_gen(gen, "bernoulli").unwrap();
            let lam = 1.7;
            let a = HermitianMatrix::diagonal(&[lam]);
            let chi = expected_charpoly(&mu, &a).unwrap();
            // p (x - lam) + (1 - p)
            let expect = UniPoly::new(vec![1.0 - p - p * lam, p]);
            let diff = chi.sub(&expect);
            assert!(diff.coeffs().iter().all(|c| c.abs() < 1e-12));
        }
    }

    #[test]
    fn point_mass_on_everything_gives_charpoly() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(110);
        let a = rand_hermitian(4, &mut rng);
        let gen = MultiAffinePoly::monomial(4, 0b1111, 1.0);
        let mu = SRMeasure::from_gen(gen, "full").unwrap();
        let chi = expected_charpoly(&mu, &a).unwrap();
        let expect = UniPoly::from_roots(&a.eigenvalues());
        let diff = chi.sub(&expect);
        let scale = expect.coeffs().iter().fold(1.0f64, |m, c| m.max(c.abs()));
        assert!(diff.coeffs().iter().all(|c| c.abs() < 1e-9 * scale));
    }

    #[test]
    fn oracle_examples() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(111);
        let a = rand_hermitian(3, &mut rng);
        let empty = SRMeasure::from_gen(MultiAffinePoly::monomial(3, 0, 1.0), "empty").unwrap();
        assert_eq!(expected_charpoly_oracle(&empty, &a).unwrap().coeffs(), &[1.0]);

        let mut coeffs = vec![0.0; 8];
        coeffs[0] = 0.5;
        coeffs[7] = 0.5;
        let half = SRMeasure::from_gen(MultiAffinePoly::new(3, coeffs).unwrap(), "half").unwrap();
        let got = expected_charpoly_oracle(&half, &a).unwrap();
        let expect = UniPoly::from_roots(&a.eigenvalues()).scale(0.5).add(&UniPoly::constant(0.5));
        let diff = got.sub(&expect);
        assert!(diff.coeffs().iter().all(|c| c.abs() < 1e-10));
    }

    #[test]
    fn formula_matches_oracle_across_measures() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(112);
        for trial in 0..12 {
            let n = 2 + trial % 4; // 2..=5
            let a = rand_hermitian(n, &mut rng);
            let mu = match trial % 3 {
                0 => product_measure(
                    &(0..n).map(|_| rng.gen_range(0.0..1.0)).collect::<Vec<_>>(),
                )
                .unwrap(),
                1 => determinantal_measure(&rand_contraction_kernel(n, &mut rng)).unwrap(),
                _ => {
                    // uniform measure on k-subsets
                    let k = 1 + trial % n;
                    let ek: MultiAffinePoly<f64> = crate::multiaffine::elem_sym(n, k).unwrap();
                    let count: f64 = ek.coeffs().iter().sum();
                    let gen = MultiAffinePoly::new(
                        n,
                        ek.coeffs().iter().map(|c| c / count).collect(),
                    )
                    .unwrap();
                    SRMeasure::from_gen(gen, "uniform_k").unwrap()
                }
            };
            let fast = expected_charpoly(&mu, &a).unwrap();
            let slow = expected_charpoly_oracle(&mu, &a).unwrap();
            let scale = slow.coeffs().iter().fold(1.0f64, |m, c| m.max(c.abs()));
            let diff = fast.sub(&slow);
            assert!(
                diff.coeffs().iter().all(|c| c.abs() < 1e-8 * scale),
                "formula {:?} vs oracle {:?}",
                fast.coeffs(),
                slow.coeffs()
            );
        }
    }

    #[test]
    fn existence_transfer_on_support() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(113);
        for _ in 0..6 {
            let n = 4;
            let a = rand_hermitian(n, &mut rng);
            let mu = determinantal_measure(&rand_contraction_kernel(n, &mut rng)).unwrap();
            let expected = expected_charpoly(&mu, &a).unwrap();
            let bound = uni_max_root(&expected).unwrap();
            let mut best = f64::INFINITY;
            for s in mu.support() {
                let sub = principal_submatrix(&a, s).unwrap();
                best = best.min(lambda_max(&sub));
            }
            assert!(best <= bound + 1e-8, "min root {best} above expected bound {bound}");
        }
    }

    #[test]
    fn determinantal_examples() {
        let zero = determinantal_measure(&HermitianMatrix::zeros(3)).unwrap();
        assert_eq!(zero.support(), vec![0]);
        let id = determinantal_measure(&HermitianMatrix::diagonal(&[1.0, 1.0])).unwrap();
        assert_eq!(id.support(), vec![0b11]);
        let p = [0.3, 0.8];
        let diag = determinantal_measure(&HermitianMatrix::diagonal(&p)).unwrap();
        let prod = product_measure(&p).unwrap();
        for s in 0..4u32 {
            assert!((diag.prob(s) - prod.prob(s)).abs() < 1e-12);
        }
    }

    #[test]
    fn determinantal_inclusion_probabilities() {
        // P(S subset of X) = det K_S, checked exhaustively at n <= 5
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(114);
        for n in 2..=5 {
            let k = rand_contraction_kernel(n, &mut rng);
            let mu = determinantal_measure(&k).unwrap();
            for s in 0..subset::lattice_size(n) as u32 {
                let mut incl = 0.0;
                for t in 0..subset::lattice_size(n) as u32 {
                    if t & s == s {
                        incl += mu.prob(t);
                    }
                }
                let sub = principal_submatrix(&k, s).unwrap();
                let det = if sub.n() == 0 {
                    1.0
                } else {
                    sub.matrix().clone().lu().determinant().re
                };
                assert!(
                    (incl - det).abs() < 1e-9,
                    "inclusion {incl} vs det {det} at S={s:b}"
                );
            }
            // marginals are the kernel diagonal
            let marg = marginals(&mu);
            for (i, m) in marg.iter().enumerate() {
                assert!((m - k.entry(i, i).re).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn determinantal_defining_evaluation_identity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(115);
        let n = 4;
        let k = rand_contraction_kernel(n, &mut rng);
        let mu = determinantal_measure(&k).unwrap();
        for _ in 0..10 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let lhs = crate::multiaffine::ma_eval(mu.gen(), &x).unwrap();
            let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
            for i in 0..n {
                for j in 0..n {
                    let kij = k.entry(i, j);
                    let delta = if i == j { 1.0 } else { 0.0 };
                    m[(i, j)] = kij * Complex64::new(x[i], 0.0)
                        + (Complex64::new(delta, 0.0) - kij);
                }
            }
            let rhs = m.lu().determinant();
            assert!(rhs.im.abs() < 1e-9);
            assert!((lhs - rhs.re).abs() < 1e-9);
        }
    }

    #[test]
    fn oracle_size_guard() {
        let mu = product_measure(&vec![0.5; 13]).unwrap();
        let a = HermitianMatrix::zeros(13);
        assert!(matches!(
            expected_charpoly_oracle(&mu, &a),
            Err(Error::SizeGuard { .. })
        ));
    }
}
