//! Dense complex linear algebra on top of `nalgebra`.
//!
//! Tensor products are row-major with the A system as the most significant
//! factor: basis state `|i>|j>` of `C^dA ⊗ C^dB` has index `i * dB + j`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

pub type C64 = Complex64;
pub type CVector = DVector<C64>;
pub type CMatrix = DMatrix<C64>;

/// Which subsystem a partial trace removes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    /// Nonincreasing, nonnegative; `min(dA, dB)` entries.
    pub coefficients: Vec<f64>,
    pub left: Vec<CVector>,
    pub right: Vec<CVector>,
    /// Number of coefficients above `rank_tol * coefficients[0]`.
    pub rank: usize,
}

impl SchmidtDecomposition {
    pub fn reconstruct(&self) -> CVector {
        let da = self.left[0].len();
        let db = self.right[0].len();
        let mut out = CVector::zeros(da * db);
        for ((l, a), b) in self.coefficients.iter().zip(&self.left).zip(&self.right) {
            out += kron_vec(a, b) * C64::from(*l);
        }
        out
    }
}

/// `<u|v>`, conjugate-linear in `u`.
pub fn inner(u: &CVector, v: &CVector) -> Result<C64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    Ok(u.dotc(v))
}

/// Hilbert–Schmidt inner product `Tr(A† B)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Result<C64> {
    if a.shape() != b.shape() {
        return Err(Error::InvalidArgument(format!(
            "shape mismatch: {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(a.dotc(b))
}

pub fn basis_vector(d: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(d);
    v[i] = C64::new(1.0, 0.0);
    v
}

/// True iff there are exactly `dim` vectors and their Gram matrix is the
/// identity within `tol` entrywise.
pub fn is_orthonormal_basis(vecs: &[CVector], tol: f64) -> bool {
    let Some(first) = vecs.first() else {
        return false;
    };
    let d = first.len();
    if vecs.len() != d || vecs.iter().any(|v| v.len() != d) {
        return false;
    }
    for (i, u) in vecs.iter().enumerate() {
        for (j, v) in vecs.iter().enumerate().skip(i) {
            let g = u.dotc(v);
            let target = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            if (g - target).norm() > tol {
                return false;
            }
        }
    }
    true
}

/// Coefficient matrix `Ψ` with `ψ = Σ Ψ_ij |i>|j>`.
pub fn state_matrix(state: &CVector, da: usize, db: usize) -> Result<CMatrix> {
    if da * db != state.len() {
        return Err(Error::DimensionMismatch {
            expected: da * db,
            found: state.len(),
        });
    }
    Ok(CMatrix::from_fn(da, db, |i, j| state[i * db + j]))
}

pub fn schmidt(state: &CVector, da: usize, db: usize, rank_tol: f64) -> Result<SchmidtDecomposition> {
    let psi = state_matrix(state, da, db)?;
    let norm = state.norm();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidArgument(format!(
            "state is not normalized (norm {norm})"
        )));
    }
    // nalgebra's complex SVD loses accuracy on rank-deficient wide matrices,
    // so always decompose the tall orientation.
    let wide = da < db;
    let svd = if wide { psi.adjoint() } else { psi }.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let coefficients: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    // Ψ = U Σ V†, so ψ = Σ σ_k u_k ⊗ (row k of V†)^T. For Ψ† = U Σ V† the roles swap.
    let (left, right) = if wide {
        (
            order.iter().map(|&k| v_t.row(k).adjoint()).collect(),
            order.iter().map(|&k| u.column(k).conjugate()).collect(),
        )
    } else {
        (
            order.iter().map(|&k| u.column(k).into_owned()).collect(),
            order.iter().map(|&k| v_t.row(k).transpose()).collect(),
        )
    };
    let cutoff = rank_tol * coefficients[0];
    let rank = coefficients.iter().filter(|&&l| l > cutoff).count();
    Ok(SchmidtDecomposition {
        coefficients,
        left,
        right,
        rank,
    })
}

pub fn hermitian_deviation(a: &CMatrix) -> f64 {
    (a - a.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues (descending) and matching eigenvector columns of a Hermitian matrix.
pub fn hermitian_eigen(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if !a.is_square() {
        return Err(Error::InvalidArgument(format!(
            "expected a square matrix, got {:?}",
            a.shape()
        )));
    }
    let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let dev = hermitian_deviation(a);
    if dev > 1e-9 * scale {
        return Err(Error::NotHermitian(dev));
    }
    let h = (a + a.adjoint()) * C64::from(0.5);
    let eig = h.symmetric_eigen();
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Orthogonal projector onto the span of eigenvectors whose eigenvalue
/// exceeds `rank_tol * λ_max`.
pub fn support_projector(a: &CMatrix, rank_tol: f64) -> Result<CMatrix> {
    let (values, vectors) = hermitian_eigen(a)?;
    check_psd(&values, 1e-9)?;
    Ok(projector_from_eigen(&values, &vectors, rank_tol))
}

pub(crate) fn check_psd(values: &[f64], tol: f64) -> Result<()> {
    let top = values.first().copied().unwrap_or(0.0).max(1.0);
    match values.last() {
        Some(&low) if low < -tol * top => Err(Error::NotPsd(low)),
        _ => Ok(()),
    }
}

pub(crate) fn projector_from_eigen(values: &[f64], vectors: &CMatrix, rank_tol: f64) -> CMatrix {
    let n = vectors.nrows();
    let top = values.first().copied().unwrap_or(0.0);
    let mut p = CMatrix::zeros(n, n);
    if top <= 0.0 {
        return p;
    }
    for (k, &l) in values.iter().enumerate() {
        if l > rank_tol * top {
            let col = vectors.column(k);
            p += col * col.adjoint();
        }
    }
    p
}

/// Partial trace of an operator on `C^dA ⊗ C^dB`, removing `side`.
pub fn partial_trace(m: &CMatrix, da: usize, db: usize, side: Subsystem) -> Result<CMatrix> {
    let d = da * db;
    if m.shape() != (d, d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: m.nrows(),
        });
    }
    Ok(match side {
        Subsystem::B => CMatrix::from_fn(da, da, |i, k| {
            (0..db).map(|j| m[(i * db + j, k * db + j)]).sum()
        }),
        Subsystem::A => CMatrix::from_fn(db, db, |j, l| {
            (0..da).map(|i| m[(i * db + j, i * db + l)]).sum()
        }),
    })
}

/// Number of singular values above `rank_tol * σ_max`.
pub fn matrix_rank(a: &CMatrix, rank_tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let sv = a.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rank_tol * top).count()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

pub fn conj(a: &CMatrix) -> CMatrix {
    a.map(|z| z.conj())
}

pub fn outer(u: &CVector) -> CMatrix {
    u * u.adjoint()
}

/// Largest entrywise modulus of `a - b`; `INFINITY` on shape mismatch.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn is_unitary(u: &CMatrix, tol: f64) -> bool {
    u.is_square() && max_abs_diff(&(u.adjoint() * u), &CMatrix::identity(u.nrows(), u.ncols())) <= tol
}

/// Hermitian and idempotent within `tol`.
pub fn is_projector(p: &CMatrix, tol: f64) -> bool {
    p.is_square() && hermitian_deviation(p) <= tol && max_abs_diff(&(p * p), p) <= tol
}

/// `(1/√d) Σ_i |i>|i>`.
pub fn maximally_entangled(d: usize) -> CVector {
    let mut v = CVector::zeros(d * d);
    let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    for i in 0..d {
        v[i * d + i] = amp;
    }
    v
}

pub fn random_gaussian_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVector {
    CVector::from_fn(d, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn random_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVector {
    loop {
        let v = random_gaussian_vector(d, rng);
        let n = v.norm();
        if n > 1e-12 {
            return v / C64::from(n);
        }
    }
}

/// Haar-distributed unitary via QR of a complex Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    // fix the phase ambiguity of QR so the distribution is Haar
    let phases = CMatrix::from_fn(d, d, |i, j| {
        if i == j && r[(i, i)].norm() > 0.0 {
            r[(i, i)] / C64::from(r[(i, i)].norm())
        } else if i == j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    q * phases
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn cv(xs: &[f64]) -> CVector {
        CVector::from_iterator(xs.len(), xs.iter().map(|&x| c(x, 0.0)))
    }

    #[test]
    fn inner_examples() {
        let e1 = basis_vector(2, 0);
        let e2 = basis_vector(2, 1);
        assert_eq!(inner(&e1, &e1).unwrap(), c(1.0, 0.0));
        assert_eq!(inner(&e1, &e2).unwrap(), c(0.0, 0.0));
        let ie1 = &e1 * c(0.0, 1.0);
        assert_eq!(inner(&ie1, &e1).unwrap(), c(0.0, -1.0));
        let s = 0.5f64.sqrt();
        assert!(inner(&cv(&[s, s]), &cv(&[s, -s])).unwrap().norm() < 1e-15);
        assert!(inner(&e1, &basis_vector(3, 0)).is_err());
    }

    #[test]
    fn hs_inner_examples() {
        let i2 = CMatrix::identity(2, 2);
        assert_eq!(hs_inner(&i2, &i2).unwrap(), c(2.0, 0.0));
        let p1 = outer(&basis_vector(2, 0));
        let p2 = outer(&basis_vector(2, 1));
        assert_eq!(hs_inner(&p1, &p2).unwrap(), c(0.0, 0.0));
        let x = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(hs_inner(&x, &i2).unwrap(), c(0.0, 0.0));
        assert!(hs_inner(&i2, &CMatrix::identity(3, 3)).is_err());
    }

    #[test]
    fn orthonormal_basis_examples() {
        let std4: Vec<_> = (0..4).map(|i| basis_vector(4, i)).collect();
        assert!(is_orthonormal_basis(&std4, 1e-9));
        let dup = vec![basis_vector(2, 0), basis_vector(2, 0)];
        assert!(!is_orthonormal_basis(&dup, 1e-9));
        let w = C64::from_polar(1.0, std::f64::consts::TAU / 3.0);
        let fourier: Vec<CVector> = (0..3)
            .map(|k| CVector::from_fn(3, |j, _| w.powu((j * k) as u32) / C64::from(3f64.sqrt())))
            .collect();
        assert!(is_orthonormal_basis(&fourier, 1e-9));
        assert!(!is_orthonormal_basis(&fourier[..2], 1e-9));
        assert!(!is_orthonormal_basis(&[], 1e-9));
    }

    #[test]
    fn schmidt_examples() {
        let s = schmidt(&maximally_entangled(2), 2, 2, 1e-7).unwrap();
        assert_eq!(s.rank, 2);
        for l in &s.coefficients {
            assert!((l - 0.5f64.sqrt()).abs() < 1e-12);
        }

        let prod = kron_vec(&basis_vector(2, 0), &basis_vector(2, 1));
        assert_eq!(schmidt(&prod, 2, 2, 1e-7).unwrap().rank, 1);

        let mut st = CVector::zeros(4);
        st[0] = c(0.8, 0.0);
        st[3] = c(0.6, 0.0);
        let s = schmidt(&st, 2, 2, 1e-7).unwrap();
        assert!((s.coefficients[0] - 0.8).abs() < 1e-12);
        assert!((s.coefficients[1] - 0.6).abs() < 1e-12);
        assert_eq!(s.rank, 2);
        assert!((s.reconstruct() - &st).norm() < 1e-12);

        assert!(schmidt(&st, 3, 2, 1e-7).is_err());
        assert!(matches!(schmidt(&CVector::zeros(4), 2, 2, 1e-7), Err(Error::ZeroVector)));
    }

    #[test]
    fn support_projector_examples() {
        let d = |a: f64, b: f64| CMatrix::from_diagonal(&cv(&[a, b]));
        assert!(max_abs_diff(&support_projector(&d(1.0, 0.0), 1e-7).unwrap(), &d(1.0, 0.0)) < 1e-12);
        assert!(max_abs_diff(&support_projector(&d(0.3, 0.7), 1e-7).unwrap(), &d(1.0, 1.0)) < 1e-12);
        let s = 0.5f64.sqrt();
        let p = outer(&cv(&[s, s]));
        assert!(max_abs_diff(&support_projector(&p, 1e-7).unwrap(), &p) < 1e-12);
        assert!(matches!(support_projector(&d(1.0, -0.5), 1e-7), Err(Error::NotPsd(_))));
        let nh = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(support_projector(&nh, 1e-7), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn partial_trace_examples() {
        let d = 3;
        let psi = maximally_entangled(d);
        let rho = partial_trace(&outer(&psi), d, d, Subsystem::B).unwrap();
        assert!(max_abs_diff(&rho, &(CMatrix::identity(d, d) / C64::from(d as f64))) < 1e-12);

        let ra = CMatrix::from_diagonal(&cv(&[0.25, 0.75]));
        let rb = CMatrix::from_diagonal(&cv(&[1.0, 2.0, 3.0]));
        let t = partial_trace(&kron(&ra, &rb), 2, 3, Subsystem::B).unwrap();
        assert!(max_abs_diff(&t, &(&ra * C64::from(6.0))) < 1e-12);

        let k01 = kron_vec(&basis_vector(2, 0), &basis_vector(2, 1));
        let t = partial_trace(&outer(&k01), 2, 2, Subsystem::A).unwrap();
        assert!(max_abs_diff(&t, &outer(&basis_vector(2, 1))) < 1e-12);

        assert!(partial_trace(&CMatrix::identity(5, 5), 2, 2, Subsystem::A).is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(matrix_rank(&CMatrix::identity(5, 5), 1e-7), 5);
        assert_eq!(matrix_rank(&CMatrix::from_element(3, 3, c(1.0, 0.0)), 1e-7), 1);
        assert_eq!(matrix_rank(&CMatrix::zeros(3, 3), 1e-7), 0);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in 1..7 {
            assert!(is_unitary(&random_unitary(d, &mut rng), 1e-12));
        }
    }

    fn random_state(da: usize, db: usize, rng: &mut ChaCha8Rng) -> CVector {
        random_unit_vector(da * db, rng)
    }

    #[test]
    fn schmidt_reconstruction_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for da in 1..=8 {
            for db in 1..=8 {
                let st = random_state(da, db, &mut rng);
                let s = schmidt(&st, da, db, 1e-7).unwrap();
                assert!((s.reconstruct() - &st).norm() <= 1e-9);
                let sq: f64 = s.coefficients.iter().map(|l| l * l).sum();
                assert!((sq - 1.0).abs() < 1e-9);
                assert!(s.coefficients.windows(2).all(|w| w[0] >= w[1]));
                for fam in [&s.left, &s.right] {
                    for (i, u) in fam.iter().enumerate() {
                        for (j, v) in fam.iter().enumerate() {
                            let t = if i == j { 1.0 } else { 0.0 };
                            assert!((u.dotc(v) - C64::from(t)).norm() < 1e-9);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn schmidt_rank_deficient_wide_and_tall() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (da, db) in [(2, 5), (3, 4), (4, 3), (3, 6), (6, 2)] {
            for r in 1..=da.min(db) {
                let mut st = CVector::zeros(da * db);
                for _ in 0..r {
                    let a = random_unit_vector(da, &mut rng);
                    let b = random_unit_vector(db, &mut rng);
                    st += kron_vec(&a, &b);
                }
                st /= C64::from(st.norm());
                let s = schmidt(&st, da, db, 1e-7).unwrap();
                assert!((s.reconstruct() - &st).norm() <= 1e-12, "{da}x{db} rank {r}");
                assert_eq!(s.rank, r);
            }
        }
    }

    #[test]
    fn support_projector_properties_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 1..=8 {
            for rank in 0..=d {
                let mut a = CMatrix::zeros(d, d);
                for _ in 0..rank {
                    let g = random_gaussian_vector(d, &mut rng);
                    a += outer(&g);
                }
                let p = support_projector(&a, 1e-7).unwrap();
                assert!(max_abs_diff(&(&p * &p), &p) < 1e-9);
                assert!(hermitian_deviation(&p) < 1e-9);
                assert!(max_abs_diff(&(&p * &a * &p), &a) < 1e-9);
                assert_eq!(matrix_rank(&p, 1e-7), rank);
            }
        }
    }

    /// `Tr_B((I ⊗ F)|ψ><ψ|)` by explicit four-index contraction.
    fn naive_tr_b(psi: &CVector, f: &CMatrix, da: usize, db: usize) -> CMatrix {
        let mut out = CMatrix::zeros(da, da);
        for i in 0..da {
            for k in 0..da {
                let mut s = c(0.0, 0.0);
                for j in 0..db {
                    for l in 0..db {
                        s += f[(j, l)] * psi[i * db + l] * psi[k * db + j].conj();
                    }
                }
                out[(i, k)] = s;
            }
        }
        out
    }

    #[test]
    fn partial_trace_matches_index_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..100 {
            let da = 1 + trial % 4;
            let db = 1 + (trial / 4) % 4;
            let psi = random_state(da, db, &mut rng);
            let f = random_gaussian_matrix(db, &mut rng);
            let big = kron(&CMatrix::identity(da, da), &f) * outer(&psi);
            let fast = partial_trace(&big, da, db, Subsystem::B).unwrap();
            assert!(max_abs_diff(&fast, &naive_tr_b(&psi, &f, da, db)) <= 1e-12);
            let ta = partial_trace(&big, da, db, Subsystem::A).unwrap();
            assert!((ta.trace() - big.trace()).norm() < 1e-12);
        }
    }

    fn random_gaussian_matrix(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let v = random_gaussian_vector(d * d, rng);
        CMatrix::from_column_slice(d, d, v.as_slice())
    }
}
