//! Hermitian matrices and their bridges into the polynomial calculus:
//! multiaffine characteristic polynomials, the two-fold diagonal
//! polynomial chi2, mixed characteristic polynomials of PSD families, and
//! eigenvalue utilities.

use nalgebra::{Complex, DMatrix};

use crate::calculus::convolve;
use crate::dense::diag_restrict;
use crate::error::Error;
use crate::multiaffine::MultiAffinePoly;
use crate::par;
use crate::subset::{self, Subset};
use crate::uni::UniPoly;

pub type Complex64 = Complex<f64>;

/// A conjugate-symmetric complex square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    m: DMatrix<Complex64>,
}

impl HermitianMatrix {
    /// Validates squareness, finiteness, and conjugate symmetry
    /// (residual at most 1e-12 relative to the largest entry).
    pub fn new(m: DMatrix<Complex64>) -> Result<Self, Error> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        let n = m.nrows();
        let mut scale = 1.0f64;
        for e in m.iter() {
            if !e.re.is_finite() || !e.im.is_finite() {
                return Err(Error::NonFiniteValue);
            }
            scale = scale.max(e.norm());
        }
        let mut residual = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                residual = residual.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if residual > 1e-12 * scale {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Self { n, m })
    }

    /// Builds from real and optional imaginary parts (row-major).
    pub fn from_parts(re: &[Vec<f64>], im: Option<&[Vec<f64>]>) -> Result<Self, Error> {
        let n = re.len();
        let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for (i, row) in re.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)].re = x;
            }
        }
        if let Some(im) = im {
            if im.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: im.len() });
            }
            for (i, row) in im.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: row.len() });
                }
                for (j, &x) in row.iter().enumerate() {
                    m[(i, j)].im = x;
                }
            }
        }
        Self::new(m)
    }

    pub fn from_real(rows: &[Vec<f64>]) -> Result<Self, Error> {
        Self::from_parts(rows, None)
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)].re = x;
        }
        Self { n, m }
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, m: DMatrix::from_element(n, n, Complex64::new(0.0, 0.0)) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    /// Real diagonal as a vector (imaginary parts vanish by symmetry).
    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.m[(i, i)].re).collect()
    }

    pub fn trace(&self) -> f64 {
        self.diag().iter().sum()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.n == 0 {
            return Vec::new();
        }
        let eig = self.m.clone().symmetric_eigen();
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Spectral norm (largest absolute eigenvalue).
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues().iter().fold(0.0, |m, &x| m.max(x.abs()))
    }

    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(Self { n: self.n, m: &self.m + &other.m })
    }

    pub fn scale(&self, k: f64) -> Self {
        Self { n: self.n, m: self.m.scale(k) }
    }
}

/// Largest eigenvalue of a Hermitian matrix; the empty matrix yields
/// negative infinity so maxima over pavings stay well defined.
pub fn lambda_max(a: &HermitianMatrix) -> f64 {
    a.eigenvalues().last().copied().unwrap_or(f64::NEG_INFINITY)
}

/// Rows and columns restricted to S, original order preserved.
pub fn principal_submatrix(a: &HermitianMatrix, s: Subset) -> Result<HermitianMatrix, Error> {
    let idx = subset::to_indices(s);
    if let Some(&hi) = idx.last() {
        if hi >= a.n() {
            return Err(Error::IndexOutOfRange { index: hi, limit: a.n() });
        }
    }
    let k = idx.len();
    let mut m = DMatrix::from_element(k, k, Complex64::new(0.0, 0.0));
    for (r, &i) in idx.iter().enumerate() {
        for (c, &j) in idx.iter().enumerate() {
            m[(r, c)] = a.entry(i, j);
        }
    }
    Ok(HermitianMatrix { n: k, m })
}

/// r-fold block-diagonal replication A + ... + A.
pub fn block_diag(a: &HermitianMatrix, r: usize) -> Result<HermitianMatrix, Error> {
    if r == 0 {
        return Err(Error::Domain("replication count must be at least 1"));
    }
    let n = a.n();
    let mut m = DMatrix::from_element(r * n, r * n, Complex64::new(0.0, 0.0));
    for b in 0..r {
        for i in 0..n {
            for j in 0..n {
                m[(b * n + i, b * n + j)] = a.entry(i, j);
            }
        }
    }
    Ok(HermitianMatrix { n: r * n, m })
}

fn complex_det(m: DMatrix<Complex64>) -> Complex64 {
    if m.nrows() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    m.lu().determinant()
}

/// Connected components of the off-diagonal nonzero pattern.
fn components(a: &HermitianMatrix) -> Vec<Vec<usize>> {
    let n = a.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            if a.entry(i, j).norm() > 0.0 {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = find(&mut parent, i);
        buckets[r].push(i);
    }
    buckets.into_iter().filter(|b| !b.is_empty()).collect()
}

/// The multiaffine characteristic polynomial det[Z - A] with
/// Z = diag(z_1, ..., z_n): the coefficient at S is
/// (-1)^(n-|S|) det(A restricted to the complement of S).
///
/// Block-diagonal inputs factor across connected components; each factor
/// is built from its 2^k principal-minor table, subsets in parallel.
pub fn char_multiaffine(a: &HermitianMatrix) -> Result<MultiAffinePoly<f64>, Error> {
    let n = a.n();
    if n > crate::multiaffine::MAX_VARS {
        return Err(Error::TooManyVariables { n_vars: n, max: crate::multiaffine::MAX_VARS });
    }
    let comps = components(a);
    if comps.len() <= 1 {
        return char_multiaffine_dense(a);
    }
    let factors: Vec<(Vec<usize>, MultiAffinePoly<f64>)> = comps
        .into_iter()
        .map(|c| {
            let mask = subset::from_indices(&c, a.n())?;
            let sub = principal_submatrix(a, mask)?;
            Ok((c, char_multiaffine_dense(&sub)?))
        })
        .collect::<Result<_, Error>>()?;
    let size = subset::lattice_size(n);
    let coeffs = par::map_range(size, |s| {
        let s = s as Subset;
        let mut prod = 1.0;
        for (c, p) in &factors {
            let mut local = 0u32;
            for (bit, &i) in c.iter().enumerate() {
                if subset::contains(s, i) {
                    local |= 1 << bit;
                }
            }
            prod *= p.coeffs()[local as usize];
        }
        prod
    });
    MultiAffinePoly::new(n, coeffs)
}

fn char_multiaffine_dense(a: &HermitianMatrix) -> Result<MultiAffinePoly<f64>, Error> {
    let n = a.n();
    let full = subset::full_mask(n);
    let size = subset::lattice_size(n);
    let table = par::map_range(size, |s| {
        let s = s as Subset;
        let comp = full & !s;
        let idx = subset::to_indices(comp);
        let k = idx.len();
        let mut m = DMatrix::from_element(k, k, Complex64::new(0.0, 0.0));
        for (r, &i) in idx.iter().enumerate() {
            for (c, &j) in idx.iter().enumerate() {
                m[(r, c)] = a.entry(i, j);
            }
        }
        let det = complex_det(m);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        (sign * det.re, det.im.abs())
    });
    let scale = table.iter().fold(1.0f64, |m, &(re, _)| m.max(re.abs()));
    let worst_im = table.iter().fold(0.0f64, |m, &(_, im)| m.max(im));
    if worst_im > 1e-10 * scale {
        return Err(Error::ImaginaryResidue { residual: worst_im });
    }
    MultiAffinePoly::new(n, table.into_iter().map(|(re, _)| re).collect())
}

/// chi_2 of A: the diagonal restriction of d^[n] det[Z - A]^2, equal to
/// (p * p)(2x, ..., 2x) for p = char_multiaffine(A).
pub fn chi2(a: &HermitianMatrix) -> Result<UniPoly, Error> {
    let p = char_multiaffine(a)?;
    let conv = convolve(&p, &p)?;
    Ok(diag_restrict(&conv).stretch(2.0))
}

/// A family of PSD matrices of common dimension, optionally certified to
/// sum to the identity.
#[derive(Debug, Clone)]
pub struct PSDDecomposition {
    mats: Vec<HermitianMatrix>,
    resolution: bool,
}

impl PSDDecomposition {
    /// Validates positive semidefiniteness (eigenvalues >= -1e-10) of
    /// every matrix; with `resolution` also checks ||sum - I|| <= 1e-9
    /// in spectral norm.
    pub fn new(mats: Vec<HermitianMatrix>, resolution: bool) -> Result<Self, Error> {
        let m = mats.len();
        if m == 0 {
            return Err(Error::Domain("decomposition needs at least one matrix"));
        }
        let n = mats[0].n();
        for a in &mats {
            if a.n() != n {
                return Err(Error::DimensionMismatch { expected: n, found: a.n() });
            }
            if let Some(&lo) = a.eigenvalues().first() {
                if lo < -1e-10 {
                    return Err(Error::NotPsd { min_eigenvalue: lo });
                }
            }
        }
        if resolution {
            let mut sum = HermitianMatrix::zeros(n);
            for a in &mats {
                sum = sum.add(a)?;
            }
            let minus_i = sum.add(&HermitianMatrix::diagonal(&vec![-1.0; n]).scale(1.0))?;
            let residual = minus_i.spectral_norm();
            if residual > 1e-9 {
                return Err(Error::Domain("resolution flag set but the family does not sum to I"));
            }
        }
        Ok(Self { mats, resolution })
    }

    pub fn matrices(&self) -> &[HermitianMatrix] {
        &self.mats
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.mats[0].n()
    }

    pub fn is_resolution(&self) -> bool {
        self.resolution
    }

    pub fn max_trace(&self) -> f64 {
        self.mats.iter().map(HermitianMatrix::trace).fold(0.0, f64::max)
    }
}

/// Mixed characteristic polynomial
/// mu(x) = prod_i (1 - d_i) det[xI + z_1 A_1 + ... + z_m A_m] at z = 0,
/// i.e. sum over T of (-1)^|T| [z^T] det[xI + sum z_i A_i].
///
/// Evaluation-interpolation on integer grids handles m <= 4; a symbolic
/// column-subset expansion of the determinant covers the rest. Both are
/// cross-checked in the test suite.
pub fn mixed_char_poly(dec: &PSDDecomposition) -> Result<UniPoly, Error> {
    let m = dec.len();
    let n = dec.dim();
    if m > 8 || n > 8 {
        return Err(Error::SizeGuard { size: (m.max(n)) as u128, limit: 8 });
    }
    if m <= 4 {
        mixed_char_interpolation(dec)
    } else {
        mixed_char_symbolic(dec)
    }
}

/// Interpolation route: det[xI + sum z_i A_i] is a polynomial of degree
/// at most n in each z_i; sampling z on the grid {0..n}^m and running
/// Newton divided differences per axis recovers its coefficient tensor,
/// from which the multiaffine slice is read off.
pub fn mixed_char_interpolation(dec: &PSDDecomposition) -> Result<UniPoly, Error> {
    let m = dec.len();
    let n = dec.dim();
    let pts = n + 1;
    let grid_len = pts.pow(m as u32);
    // F[node][k] = coefficient of x^k in det(xI + M(node)), computed from
    // eigenvalues of the Hermitian grid matrix.
    let mut grid: Vec<Vec<f64>> = Vec::with_capacity(grid_len);
    for node in 0..grid_len {
        let mut rest = node;
        let mut mat = HermitianMatrix::zeros(n);
        for a in dec.matrices() {
            let t = (rest % pts) as f64;
            rest /= pts;
            mat = mat.add(&a.scale(t))?;
        }
        let eig = mat.eigenvalues();
        let mut poly = UniPoly::constant(1.0);
        for lam in eig {
            poly = poly.mul(&UniPoly::new(vec![lam, 1.0]));
        }
        let mut coeffs = vec![0.0; n + 1];
        for (k, c) in poly.coeffs().iter().enumerate() {
            coeffs[k] = *c;
        }
        grid.push(coeffs);
    }
    // Per-axis Newton divided differences followed by expansion into
    // monomial coefficients; after axis a, index a holds z_a-exponents.
    let stride_of = |axis: usize| pts.pow(axis as u32);
    for axis in 0..m {
        let stride = stride_of(axis);
        let block = stride * pts;
        for base in 0..grid_len / block {
            for off in 0..stride {
                let start = base * block + off;
                let take = |j: usize, g: &Vec<Vec<f64>>| g[start + j * stride].clone();
                // divided differences over nodes 0..n
                let mut dd: Vec<Vec<f64>> = (0..pts).map(|j| take(j, &grid)).collect();
                for level in 1..pts {
                    for j in (level..pts).rev() {
                        let denom = level as f64;
                        for k in 0..=n {
                            dd[j][k] = (dd[j][k] - dd[j - 1][k]) / denom;
                        }
                    }
                }
                // expand Newton form to monomial coefficients in z_axis
                let mut mono: Vec<Vec<f64>> = vec![vec![0.0; n + 1]; pts];
                for level in (0..pts).rev() {
                    // mono <- mono * (t - level-1 node) + dd[level]
                    if level + 1 < pts {
                        let node = level as f64;
                        for j in (0..pts).rev() {
                            let mut next = vec![0.0; n + 1];
                            if j > 0 {
                                next.clone_from(&mono[j - 1]);
                            }
                            for k in 0..=n {
                                next[k] -= node * mono[j][k];
                            }
                            mono[j] = next;
                        }
                    }
                    for k in 0..=n {
                        mono[0][k] += dd[level][k];
                    }
                }
                for (j, row) in mono.into_iter().enumerate() {
                    grid[start + j * stride] = row;
                }
            }
        }
    }
    // multiaffine slice with signs
    let mut out = vec![0.0; n + 1];
    for t in 0..(1usize << m) {
        let mut node = 0;
        for i in 0..m {
            if t >> i & 1 == 1 {
                node += stride_of(i);
            }
        }
        let sign = if (t as u32).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        for k in 0..=n {
            out[k] += sign * grid[node][k];
        }
    }
    Ok(UniPoly::new(out))
}

/// Symbolic route: a column-subset determinant expansion whose values are
/// maps from z-monomial masks to x-coefficient vectors. Terms whose
/// z-degree exceeds one in any variable are dropped on the fly; degrees
/// only grow under multiplication, so this never loses a multiaffine
/// coefficient.
pub fn mixed_char_symbolic(dec: &PSDDecomposition) -> Result<UniPoly, Error> {
    use std::collections::HashMap;
    let m = dec.len();
    let n = dec.dim();
    type Val = HashMap<u32, Vec<Complex64>>;

    // entry (r, c): delta * x + sum_i (A_i)_{rc} z_i as (zmask, xpoly) terms
    let entry_terms = |r: usize, c: usize| -> Vec<(u32, Vec<Complex64>)> {
        let mut terms = Vec::new();
        if r == c {
            terms.push((0u32, vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]));
        }
        for (i, a) in dec.matrices().iter().enumerate() {
            let e = a.entry(r, c);
            if e.norm() > 0.0 {
                terms.push((1u32 << i, vec![e]));
            }
        }
        terms
    };

    let size = 1usize << n;
    let mut dp: Vec<Option<Val>> = vec![None; size];
    let mut empty = Val::new();
    empty.insert(0, vec![Complex64::new(1.0, 0.0)]);
    dp[0] = Some(empty);
    for s in 1..size {
        let row = (s as u32).count_ones() as usize - 1;
        let mut acc = Val::new();
        let cols = subset::to_indices(s as Subset);
        for (pos, &c) in cols.iter().enumerate() {
            let sub = dp[s & !(1 << c)].as_ref().expect("dp filled in mask order");
            let sign = if (row + pos) % 2 == 0 { 1.0 } else { -1.0 };
            for (zterm, xpoly) in entry_terms(row, c) {
                for (zmask, sub_x) in sub {
                    if zmask & zterm != 0 {
                        continue;
                    }
                    let slot = acc.entry(zmask | zterm).or_default();
                    if slot.len() < sub_x.len() + xpoly.len() {
                        slot.resize(sub_x.len() + xpoly.len(), Complex64::new(0.0, 0.0));
                    }
                    for (da, ca) in xpoly.iter().enumerate() {
                        for (db, cb) in sub_x.iter().enumerate() {
                            slot[da + db] += ca * cb * sign;
                        }
                    }
                }
            }
        }
        dp[s] = Some(acc);
    }
    let full = dp[size - 1].take().expect("full mask computed");
    let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
    for (zmask, xpoly) in &full {
        if (*zmask as usize) >= (1usize << m) {
            continue;
        }
        let sign = if zmask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        for (k, c) in xpoly.iter().enumerate() {
            if k <= n {
                out[k] += c * sign;
            }
        }
    }
    let scale = out.iter().fold(1.0f64, |mx, c| mx.max(c.re.abs()));
    let worst_im = out.iter().fold(0.0f64, |mx, c| mx.max(c.im.abs()));
    if worst_im > 1e-10 * scale {
        return Err(Error::ImaginaryResidue { residual: worst_im });
    }
    Ok(UniPoly::new(out.into_iter().map(|c| c.re).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{above_roots, diag_threshold, potential, Direction};
    use crate::dense::{dense_diffop, dense_mul, DensePoly, DiagRestrict};
    use crate::uni::uni_max_root;
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

    /// Symbolic cofactor expansion of det[Z - A] over complex multiaffine
    /// polynomials, used as an independent oracle.
    fn cofactor_oracle(a: &HermitianMatrix) -> MultiAffinePoly<Complex64> {
        fn det_rec(
            a: &HermitianMatrix,
            rows: &[usize],
            cols: &[usize],
            n_vars: usize,
        ) -> MultiAffinePoly<Complex64> {
            if rows.is_empty() {
                return MultiAffinePoly::constant(n_vars, Complex64::new(1.0, 0.0));
            }
            let r = rows[0];
            let rest: Vec<usize> = rows[1..].to_vec();
            let mut acc = MultiAffinePoly::zero(n_vars);
            for (pos, &c) in cols.iter().enumerate() {
                let sub_cols: Vec<usize> =
                    cols.iter().copied().filter(|&x| x != c).collect();
                let minor = det_rec(a, &rest, &sub_cols, n_vars);
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                // entry = z_r delta_{rc} - a_{rc}
                let mut term = minor.scale(&(-a.entry(r, c) * Complex64::new(sign, 0.0)));
                if r == c {
                    let mut shifted = vec![Complex64::new(0.0, 0.0); minor.coeffs().len()];
                    for (s, v) in minor.coeffs().iter().enumerate() {
                        if s as u32 & (1 << r) == 0 {
                            shifted[s | 1 << r] += v * Complex64::new(sign, 0.0);
                        }
                    }
                    term = term
                        .add(&MultiAffinePoly::new(n_vars, shifted).unwrap())
                        .unwrap();
                }
                acc = acc.add(&term).unwrap();
            }
            acc
        }
        let n = a.n();
        let all: Vec<usize> = (0..n).collect();
        det_rec(a, &all, &all, n)
    }

    #[test]
    fn char_multiaffine_examples() {
        let a = HermitianMatrix::from_real(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let p = char_multiaffine(&a).unwrap();
        assert_eq!(p.coeffs(), &[-1.0, 0.0, 0.0, 1.0]);
        let d = HermitianMatrix::diagonal(&[1.5, -2.0, 0.25]);
        let p = char_multiaffine(&d).unwrap();
        for s in 0..8u32 {
            let mut expect = 1.0;
            for (i, lam) in [1.5, -2.0, 0.25].iter().enumerate() {
                if s & (1 << i) == 0 {
                    expect *= -lam;
                }
            }
            assert!((p.coeffs()[s as usize] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn char_multiaffine_matches_cofactor_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(70);
        for n in 1..=6 {
            let a = rand_hermitian(n, &mut rng);
            let p = char_multiaffine(&a).unwrap();
            let oracle = cofactor_oracle(&a);
            let scale = 1.0f64.max(p.one_norm());
            for s in 0..p.coeffs().len() {
                let o = oracle.coeffs()[s];
                assert!(o.im.abs() < 1e-9 * scale);
                assert!((p.coeffs()[s] - o.re).abs() < 1e-9 * scale);
            }
        }
    }

    #[test]
    fn char_multiaffine_boundary_coefficients() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(71);
        let a = rand_hermitian(4, &mut rng);
        let p = char_multiaffine(&a).unwrap();
        assert_eq!(p.coeffs()[15], 1.0);
        let det = complex_det(a.matrix().clone());
        assert!((p.coeffs()[0] - det.re).abs() < 1e-10);
    }

    #[test]
    fn diag_restrict_of_char_is_characteristic_polynomial() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(72);
        for n in 1..=5 {
            let a = rand_hermitian(n, &mut rng);
            let chi = char_multiaffine(&a).unwrap().diag_restrict();
            let mut eig = a.eigenvalues();
            let mut roots: Vec<f64> = chi
                .complex_roots()
                .unwrap()
                .iter()
                .map(|z| z.re)
                .collect();
            roots.sort_by(f64::total_cmp);
            eig.sort_by(f64::total_cmp);
            for (r, e) in roots.iter().zip(&eig) {
                assert!((r - e).abs() < 1e-8, "root {r} vs eigenvalue {e}");
            }
        }
    }

    #[test]
    fn block_diagonal_fast_path_agrees_with_dense() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(73);
        let a = rand_hermitian(2, &mut rng);
        let b = block_diag(&a, 3).unwrap();
        let fast = char_multiaffine(&b).unwrap();
        let slow = char_multiaffine_dense(&b).unwrap();
        let scale = 1.0f64.max(slow.one_norm());
        for s in 0..fast.coeffs().len() {
            assert!((fast.coeffs()[s] - slow.coeffs()[s]).abs() < 1e-10 * scale);
        }
    }

    #[test]
    fn chi2_examples() {
        let a = HermitianMatrix::diagonal(&[0.0]);
        assert_eq!(chi2(&a).unwrap().coeffs(), &[0.0, 2.0]);
        let z = HermitianMatrix::zeros(2);
        assert_eq!(chi2(&z).unwrap().coeffs(), &[0.0, 0.0, 4.0]);
    }

    #[test]
    fn chi2_matches_dense_oracle_and_is_real_rooted() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(74);
        for n in 1..=5 {
            let a = rand_hermitian(n, &mut rng);
            let p = char_multiaffine(&a).unwrap();
            let c = chi2(&a).unwrap();
            // dense oracle: diagonal restriction of d^[n] (det[Z-A])^2
            let pd = DensePoly::from_multiaffine(&p);
            let sq = dense_mul(&pd, &pd).unwrap();
            let derived = dense_diffop(&vec![1u32; n], &sq).unwrap();
            let oracle = derived.diag_restrict();
            let scale = oracle.coeffs().iter().fold(1.0f64, |m, c| m.max(c.abs()));
            let diff = c.sub(&oracle);
            assert!(diff.coeffs().iter().all(|d| d.abs() < 1e-8 * scale));
            for root in c.complex_roots().unwrap() {
                assert!(root.im.abs() < 1e-7);
            }
        }
    }

    #[test]
    fn mixed_char_poly_examples() {
        let a1 = HermitianMatrix::from_real(&[vec![1.0]]).unwrap();
        let dec = PSDDecomposition::new(vec![a1], true).unwrap();
        assert_eq!(mixed_char_poly(&dec).unwrap().coeffs(), &[-1.0, 1.0]);

        // standard basis projectors: mu = (x-1)^n
        for n in [2usize, 3] {
            let mats: Vec<HermitianMatrix> = (0..n)
                .map(|i| {
                    let mut rows = vec![vec![0.0; n]; n];
                    rows[i][i] = 1.0;
                    HermitianMatrix::from_real(&rows).unwrap()
                })
                .collect();
            let dec = PSDDecomposition::new(mats, true).unwrap();
            let mu = mixed_char_poly(&dec).unwrap();
            let expect = UniPoly::from_roots(&vec![1.0; n]);
            let diff = mu.sub(&expect);
            assert!(diff.coeffs().iter().all(|d| d.abs() < 1e-9));
        }
    }

    #[test]
    fn mixed_char_paths_cross_check() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(75);
        for _ in 0..5 {
            let n = 3;
            let m = 3;
            let mats: Vec<HermitianMatrix> = (0..m)
                .map(|_| {
                    let g = rand_hermitian(n, &mut rng);
                    // square to force PSD
                    let sq = g.matrix() * g.matrix();
                    HermitianMatrix::new(sq).unwrap()
                })
                .collect();
            let dec = PSDDecomposition::new(mats, false).unwrap();
            let a = mixed_char_interpolation(&dec).unwrap();
            let b = mixed_char_symbolic(&dec).unwrap();
            let scale = a.coeffs().iter().fold(1.0f64, |m, c| m.max(c.abs()));
            let diff = a.sub(&b);
            assert!(
                diff.coeffs().iter().all(|d| d.abs() < 1e-8 * scale),
                "interpolation {:?} vs symbolic {:?}",
                a.coeffs(),
                b.coeffs()
            );
        }
    }

    #[test]
    fn mixed_char_rank_one_resolution_root_bound() {
        // Tight frame of three unit-trace-2/3 projectors resolving I_2.
        let m = 3;
        let eps = 2.0 / 3.0;
        let mats: Vec<HermitianMatrix> = (0..m)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * (k as f64) / 3.0;
                let (c, s) = (th.cos(), th.sin());
                let v = [c, s];
                let rows = vec![
                    vec![eps * v[0] * v[0], eps * v[0] * v[1]],
                    vec![eps * v[1] * v[0], eps * v[1] * v[1]],
                ];
                HermitianMatrix::from_real(&rows).unwrap()
            })
            .collect();
        let dec = PSDDecomposition::new(mats, true).unwrap();
        let mu = mixed_char_poly(&dec).unwrap();
        assert_eq!(mu.degree(), Some(2));
        assert!((mu.leading().unwrap() - 1.0).abs() < 1e-9);
        let root = uni_max_root(&mu).unwrap();
        let bound = (1.0 + eps.sqrt()).powi(2);
        assert!(root <= bound + 1e-8, "root {root} exceeds {bound}");
    }

    #[test]
    fn mixed_char_size_guard() {
        let a = HermitianMatrix::diagonal(&vec![0.1; 9]);
        let dec = PSDDecomposition::new(vec![a], false).unwrap();
        assert!(matches!(mixed_char_poly(&dec), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn lambda_max_examples() {
        let a = HermitianMatrix::from_real(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!((lambda_max(&a) - 1.0).abs() < 1e-10);
        let d = HermitianMatrix::diagonal(&[0.5, -3.0, 2.25]);
        assert!((lambda_max(&d) - 2.25).abs() < 1e-12);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(76);
        let r = rand_hermitian(4, &mut rng);
        let via_poly = uni_max_root(&char_multiaffine(&r).unwrap().diag_restrict()).unwrap();
        assert!((lambda_max(&r) - via_poly).abs() < 1e-8);
    }

    #[test]
    fn principal_submatrix_examples() {
        let a = HermitianMatrix::from_real(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(principal_submatrix(&a, 0b11).unwrap(), a);
        let empty = principal_submatrix(&a, 0).unwrap();
        assert_eq!(empty.n(), 0);
        assert_eq!(char_multiaffine(&empty).unwrap().coeffs(), &[1.0]);
        let single = principal_submatrix(&a, 0b01).unwrap();
        assert_eq!(single.entry(0, 0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn block_diag_examples() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let a = rand_hermitian(3, &mut rng);
        assert_eq!(block_diag(&a, 1).unwrap(), a);
        let b = block_diag(&a, 3).unwrap();
        assert!((lambda_max(&b) - lambda_max(&a)).abs() < 1e-9);
        // B(S) decomposes blockwise: check via characteristic polynomials
        let s1: Subset = 0b011; // block 0
        let s2: Subset = 0b101_000; // block 1
        let s = s1 | s2;
        let bs = principal_submatrix(&b, s).unwrap();
        let direct = char_multiaffine(&bs).unwrap().diag_restrict();
        let a1 = char_multiaffine(&principal_submatrix(&a, 0b011).unwrap())
            .unwrap()
            .diag_restrict();
        let a2 = char_multiaffine(&principal_submatrix(&a, 0b101).unwrap())
            .unwrap()
            .diag_restrict();
        let prod = a1.mul(&a2);
        let diff = direct.sub(&prod);
        let scale = prod.coeffs().iter().fold(1.0f64, |m, c| m.max(c.abs()));
        assert!(diff.coeffs().iter().all(|d| d.abs() < 1e-9 * scale));
    }

    #[test]
    fn hermitian_validation() {
        let bad = DMatrix::from_row_slice(2, 2, &[
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.5),
            Complex64::new(1.0, 0.5),
            Complex64::new(0.0, 0.0),
        ]);
        assert!(matches!(HermitianMatrix::new(bad), Err(Error::NotHermitian { .. })));
        let neg = HermitianMatrix::diagonal(&[1.0, -0.5]);
        assert!(matches!(
            PSDDecomposition::new(vec![neg], false),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn contraction_potential_bound() {
        // PSD contractions with diagonal at most alpha satisfy
        // potential(charMA(A), b*1, k) <= alpha/(b-1) + (1-alpha)/b.
        let cases = [
            (0.3, 0.2),  // [[a, c], [c, a]] with eigenvalues a +/- c
            (0.45, 0.3),
            (0.25, 0.25),
        ];
        for (alpha, c) in cases {
            let a =
                HermitianMatrix::from_real(&[vec![alpha, c], vec![c, alpha]]).unwrap();
            assert!(lambda_max(&a) <= 1.0);
            assert!(a.eigenvalues()[0] >= -1e-12);
            let p = char_multiaffine(&a).unwrap();
            for b in [1.1, 1.5, 2.0, 5.0] {
                assert!(above_roots(&p, &[b, b]).unwrap());
                for k in 0..2 {
                    let phi = potential(&p, &[b, b], Direction::Index(k)).unwrap();
                    let cap = alpha / (b - 1.0) + (1.0 - alpha) / b;
                    assert!(
                        phi.value <= cap + 1e-9,
                        "phi {} vs cap {} at b={}",
                        phi.value,
                        cap,
                        b
                    );
                }
            }
        }
    }

    #[test]
    fn diag_threshold_of_char_is_lambda_max() {
        let a = HermitianMatrix::from_real(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let p = char_multiaffine(&a).unwrap();
        let t = diag_threshold(&p).unwrap();
        assert!((t - 1.0).abs() < 1e-7);
    }
}
