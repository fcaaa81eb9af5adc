//! Seeded random instance generators for tests, sweeps, and the
//! verification suites: Haar unitaries, PSD contractions with a diagonal
//! budget, stable polynomials, and rank-one resolutions of the identity.

use crate::error::Error;
use crate::matrices::{char_multiaffine, HermitianMatrix, PSDDecomposition};
use crate::multiaffine::MultiAffinePoly;
use crate::uni::UniPoly;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Standard complex Gaussian entry: (x + iy)/sqrt(2) with x, y standard
/// normal.
fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Square matrix of iid standard complex Gaussians.
pub fn complex_ginibre<R: Rng>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// the R diagonal divided out.
pub fn haar_unitary<R: Rng>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    let qr = complex_ginibre(n, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// GUE-style Hermitian matrix (G + G*)/2 scaled entrywise.
pub fn random_hermitian<R: Rng>(n: usize, scale: f64, rng: &mut R) -> HermitianMatrix {
    let g = complex_ginibre(n, rng);
    let h = (&g + g.adjoint()) * Complex64::new(0.5 * scale, 0.0);
    HermitianMatrix::new(h).expect("symmetrized matrix is Hermitian")
}

/// PSD contraction with every diagonal entry at most `alpha`: V diag(u)
/// V* with Haar-random V and uniform u in [0, 1], then blended toward
/// the zero matrix (scaled) until the diagonal budget holds.
pub fn random_psd_contraction<R: Rng>(
    n: usize,
    alpha: f64,
    rng: &mut R,
) -> Result<HermitianMatrix, Error> {
    if n == 0 {
        return Err(Error::Domain("need a nonempty matrix"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain("diagonal budget must lie in (0, 1]"));
    }
    let v = haar_unitary(n, rng);
    let mut d = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for i in 0..n {
        d[(i, i)] = Complex64::new(rng.gen_range(0.0..1.0), 0.0);
    }
    let a = HermitianMatrix::new(&v * d * v.adjoint())?;
    let max_diag = a.diag().into_iter().fold(0.0f64, f64::max);
    if max_diag <= alpha {
        return Ok(a);
    }
    Ok(a.scale(alpha / max_diag))
}

/// Random real stable multiaffine polynomial: det[diag(z) - H] for a
/// random Hermitian H.
pub fn random_stable_ma<R: Rng>(n: usize, rng: &mut R) -> Result<MultiAffinePoly<f64>, Error> {
    char_multiaffine(&random_hermitian(n, 1.0, rng))
}

/// Monic real-rooted polynomial with the given number of roots drawn
/// uniformly from [-spread, spread].
pub fn random_real_rooted_monic<R: Rng>(degree: usize, spread: f64, rng: &mut R) -> UniPoly {
    let roots: Vec<f64> = (0..degree).map(|_| rng.gen_range(-spread..spread)).collect();
    UniPoly::from_roots(&roots)
}

/// Rank-one resolution of the identity in dimension n from m vectors:
/// w_i iid Gaussian, v_i = W^{-1/2} w_i with W = sum w_i w_i*, so that
/// sum v_i v_i* = I exactly. Rejection-samples until every trace
/// ||v_i||^2 is at most eps; needs eps >= n/m since the traces sum to n.
pub fn rank_one_resolution<R: Rng>(
    n: usize,
    m: usize,
    eps: f64,
    rng: &mut R,
) -> Result<PSDDecomposition, Error> {
    if n == 0 || m < n {
        return Err(Error::Domain("need at least as many vectors as dimensions"));
    }
    if eps * (m as f64) < n as f64 {
        return Err(Error::Domain("trace budget below n/m is infeasible"));
    }
    const TRIES: usize = 2000;
    for _ in 0..TRIES {
        let w: Vec<DMatrix<Complex64>> = (0..m)
            .map(|_| DMatrix::from_fn(n, 1, |_, _| complex_gaussian(rng)))
            .collect();
        let mut gram = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for wi in &w {
            gram += wi * wi.adjoint();
        }
        let eig = gram.symmetric_eigen();
        let max_e = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b));
        if eig.eigenvalues.iter().any(|&e| e < 1e-12 * max_e) {
            continue; // nearly singular frame, resample
        }
        let mut half_inv = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for i in 0..n {
            half_inv[(i, i)] = Complex64::new(1.0 / eig.eigenvalues[i].sqrt(), 0.0);
        }
        let root = &eig.eigenvectors * half_inv * eig.eigenvectors.adjoint();
        let v: Vec<DMatrix<Complex64>> = w.iter().map(|wi| &root * wi).collect();
        if v.iter().any(|vi| vi.norm_squared() > eps) {
            continue;
        }
        let mats = v
            .into_iter()
            .map(|vi| HermitianMatrix::new(&vi * vi.adjoint()))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(PSDDecomposition::new(mats, true)?);
    }
    Err(Error::Domain("rank-one resolution sampling exhausted its retry budget"))
}
