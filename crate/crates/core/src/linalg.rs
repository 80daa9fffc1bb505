//! Dense complex linear-algebra helpers shared by every module.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn trace(m: &CMat) -> C64 {
    m.diagonal().iter().sum()
}

/// Kronecker product `a ⊗ b` with row index `i * b.nrows() + j`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Hilbert-Schmidt (Frobenius) norm `sqrt(Tr(A^dag A))`.
pub fn hs_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Max deviation from Hermiticity.
pub fn hermiticity_gap(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut gap: f64 = 0.0;
    for r in 0..n {
        for s in r..n {
            gap = gap.max((m[(r, s)] - m[(s, r)].conj()).norm());
        }
    }
    gap
}

/// `(A + A^dag) / 2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted
/// nonincreasing. Column `k` of the returned matrix is the eigenvector of
/// eigenvalue `k`.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix, nonincreasing.
pub fn eigvalsh(m: &CMat) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(hermitian_part(m))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Trace norm `Tr|A|` of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &CMat) -> f64 {
    eigvalsh(m).iter().map(|x| x.abs()).sum()
}

/// Rebuild `E diag(f(λ)) E^dag` from a Hermitian spectral decomposition.
pub fn spectral_map(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = eigh(m);
    let n = m.nrows();
    let mut out = CMat::zeros(n, n);
    for (k, &lam) in vals.iter().enumerate() {
        let col = vecs.column(k);
        out += (col * col.adjoint()).scale(f(lam));
    }
    out
}

/// Orthonormalize the columns of `m` (`m.nrows() >= m.ncols()`) by QR,
/// fixing the phase so that `R` has a real positive diagonal.
pub fn orthonormalize(m: &CMat) -> CMat {
    let qr = m.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..q.ncols() {
        let d = r[(k, k)];
        let n = d.norm();
        if n > 0.0 {
            let phase = d / n;
            let mut col = q.column_mut(k);
            col *= phase;
        }
    }
    q
}

/// Max entrywise deviation of `V^dag V` from the identity.
pub fn isometry_gap(v: &CMat) -> f64 {
    max_abs(&(v.adjoint() * v - identity(v.ncols())))
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed `rows x cols` isometry (`rows >= cols`).
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    orthonormalize(&complex_gaussian(rng, rows, cols))
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    random_isometry(rng, n, n)
}

/// Normalized vector reshaped as a `rows x cols` amplitude matrix.
pub fn random_amplitudes<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    let g = complex_gaussian(rng, rows, cols);
    let n = hs_norm(&g);
    g.unscale(n)
}

/// Row-major flattening of an amplitude matrix: index `i * cols + j`.
pub fn flatten_row_major(m: &CMat) -> CVec {
    let (rows, cols) = m.shape();
    CVec::from_fn(rows * cols, |k, _| m[(k / cols, k % cols)])
}

/// Inverse of [`flatten_row_major`].
pub fn unflatten_row_major(v: &CVec, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |i, j| v[i * cols + j])
}

/// Σ_{i<j, k<l} |a_ik a_jl − a_il a_jk|², the sum of squared 2x2 minors.
/// Each term is non-negative, so the result carries no cancellation error.
pub fn pair_minor_sum(a: &CMat) -> f64 {
    let (rows, cols) = a.shape();
    let mut total = 0.0;
    for i in 0..rows {
        for j in (i + 1)..rows {
            for k in 0..cols {
                let (aik, ajk) = (a[(i, k)], a[(j, k)]);
                for l in (k + 1)..cols {
                    total += (aik * a[(j, l)] - a[(i, l)] * ajk).norm_sqr();
                }
            }
        }
    }
    total
}

/// Σ_{k≠l} x_k x_l for non-negative weights, evaluated as a pair sum.
pub fn distinct_pair_product_sum(x: &[f64]) -> f64 {
    let mut acc = 0.0;
    let mut prefix = 0.0;
    for &v in x {
        acc += v * prefix;
        prefix += v;
    }
    2.0 * acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn orthonormalize_yields_isometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = random_isometry(&mut rng, 7, 3);
        assert!(isometry_gap(&v) < 1e-13);
        let u = random_unitary(&mut rng, 5);
        assert!(max_abs(&(&u * u.adjoint() - identity(5))) < 1e-13);
    }

    #[test]
    fn eigh_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = complex_gaussian(&mut rng, 5, 5);
        let h = hermitian_part(&g);
        let rebuilt = spectral_map(&h, |x| x);
        assert!(max_abs(&(rebuilt - &h)) < 1e-12);
        let vals = eigvalsh(&h);
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn kron_index_ordering() {
        let a = CMat::from_fn(2, 2, |i, j| c((2 * i + j) as f64, 0.0));
        let b = CMat::from_fn(3, 3, |i, j| c((3 * i + j) as f64, 1.0));
        let k = kron(&a, &b);
        for (i, j, i2, j2) in [(1, 2, 0, 1), (0, 0, 1, 2), (1, 1, 1, 0)] {
            assert_eq!(k[(i * 3 + j, i2 * 3 + j2)], a[(i, i2)] * b[(j, j2)]);
        }
    }

    #[test]
    fn pair_sums() {
        let x = [0.5, 0.3, 0.2];
        let brute: f64 = (0..3)
            .flat_map(|k| (0..3).map(move |l| (k, l)))
            .filter(|(k, l)| k != l)
            .map(|(k, l)| x[k] * x[l])
            .sum();
        assert!((distinct_pair_product_sum(&x) - brute).abs() < 1e-15);
        let m = CMat::from_fn(2, 2, |i, j| if i == j { c(0.5f64.sqrt(), 0.0) } else { ZERO });
        assert!((pair_minor_sum(&m) - 0.25).abs() < 1e-15);
    }
}
