//! Dense complex operator algebra and Hermitian eigendecomposition.
//!
//! Everything is dense and row-major. The Hermitian eigensolver is backed by
//! faer; real symmetric inputs (every circuit Hamiltonian in this crate) take
//! the real path, which is several times faster.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Relative tolerance for the Hermiticity precondition.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Square complex matrix with a basis tag.
#[derive(Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    entries: Vec<C64>,
    basis_label: String,
}

impl fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OperatorMatrix({}x{}, {:?})", self.dim, self.dim, self.basis_label)?;
        if self.dim <= 6 {
            for i in 0..self.dim {
                write!(f, "\n  ")?;
                for j in 0..self.dim {
                    let z = self[(i, j)];
                    write!(f, "{:>9.4}{:+.4}i ", z.re, z.im)?;
                }
            }
        }
        Ok(())
    }
}

impl OperatorMatrix {
    pub fn zeros(dim: usize, basis_label: impl Into<String>) -> Self {
        Self {
            dim,
            entries: vec![C64::new(0.0, 0.0); dim * dim],
            basis_label: basis_label.into(),
        }
    }

    pub fn identity(dim: usize, basis_label: impl Into<String>) -> Self {
        let mut m = Self::zeros(dim, basis_label);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(
        dim: usize,
        basis_label: impl Into<String>,
        mut f: impl FnMut(usize, usize) -> C64,
    ) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self {
            dim,
            entries,
            basis_label: basis_label.into(),
        }
    }

    pub fn from_real_diagonal(diag: &[f64], basis_label: impl Into<String>) -> Self {
        let mut m = Self::zeros(diag.len(), basis_label);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Builds from row-major entries; fails unless there are exactly `dim²` of them.
    pub fn from_entries(
        dim: usize,
        entries: Vec<C64>,
        basis_label: impl Into<String>,
    ) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::InvalidDimension {
                dim,
                reason: "entry count must equal dim squared",
            });
        }
        Ok(Self {
            dim,
            entries,
            basis_label: basis_label.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn basis_label(&self) -> &str {
        &self.basis_label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.basis_label = label.into();
        self
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, self.basis_label.clone(), |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&z| z * s).collect(),
            basis_label: self.basis_label.clone(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max |A - A†| over all entries.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Checks Hermiticity within [`HERMITIAN_TOL`] relative to the Frobenius norm.
    pub fn ensure_hermitian(&self) -> Result<()> {
        let tolerance = HERMITIAN_TOL * self.frobenius_norm();
        let deviation = self.hermiticity_error();
        if deviation <= tolerance {
            Ok(())
        } else {
            Err(Error::NotHermitian {
                deviation,
                tolerance,
            })
        }
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|z| z.im == 0.0)
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n, self.basis_label.clone());
        for i in 0..n {
            let out_row = &mut out.entries[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let b_row = &rhs.entries[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len(), "matvec dimension mismatch");
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// ⟨u|A|v⟩.
    pub fn expectation(&self, u: &[C64], v: &[C64]) -> C64 {
        let av = self.matvec(v);
        u.iter().zip(&av).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut out = Self::identity(self.dim, self.basis_label.clone());
        for _ in 0..k {
            out = out.matmul(self);
        }
        out
    }

    /// Commutator [A, B].
    pub fn commutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    /// Largest entrywise difference to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Adds `s * other` in place.
    pub fn add_scaled(&mut self, other: &Self, s: C64) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += b * s;
        }
    }
}

impl std::ops::Index<(usize, usize)> for OperatorMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.entries[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for OperatorMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        let mut out = self.clone();
        out.add_scaled(rhs, C64::new(1.0, 0.0));
        out
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        let mut out = self.clone();
        out.add_scaled(rhs, C64::new(-1.0, 0.0));
        out
    }
}

impl Neg for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn neg(self) -> OperatorMatrix {
        self.scale_real(-1.0)
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.matmul(rhs)
    }
}

/// Lowering operator on a `dim`-level number basis: entry (n, n+1) = √(n+1).
pub fn destroy(dim: usize) -> Result<OperatorMatrix> {
    if dim < 2 {
        return Err(Error::InvalidDimension {
            dim,
            reason: "ladder operators need at least two levels",
        });
    }
    let mut a = OperatorMatrix::zeros(dim, "fock");
    for n in 0..dim - 1 {
        a[(n, n + 1)] = C64::new(((n + 1) as f64).sqrt(), 0.0);
    }
    Ok(a)
}

/// Tensor product; entry (i·db + k, j·db + l) = a(i, j)·b(k, l).
pub fn kron(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    let (da, db) = (a.dim, b.dim);
    let n = da * db;
    let mut entries = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..da {
        for j in 0..da {
            let aij = a[(i, j)];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..db {
                let row = (i * db + k) * n + j * db;
                let b_row = b.row(k);
                for (l, &bkl) in b_row.iter().enumerate() {
                    entries[row + l] = aij * bkl;
                }
            }
        }
    }
    OperatorMatrix {
        dim: n,
        entries,
        basis_label: format!("{}⊗{}", a.basis_label, b.basis_label),
    }
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    dim: usize,
    // column-major: vector k occupies [k*dim, (k+1)*dim)
    vectors: Vec<C64>,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vector(&self, k: usize) -> &[C64] {
        &self.vectors[k * self.dim..(k + 1) * self.dim]
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<Vec<C64>>) {
        let dim = self.dim;
        let vectors = self.vectors.chunks(dim).map(<[C64]>::to_vec).collect();
        (self.values, vectors)
    }

    /// V · diag(f(λ)) · V†.
    pub fn reconstruct(&self, f: impl Fn(f64) -> f64, basis_label: &str) -> OperatorMatrix {
        let n = self.dim;
        let weights: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let mut out = OperatorMatrix::zeros(n, basis_label);
        for (k, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let v = self.vector(k);
            for i in 0..n {
                let vi = v[i] * w;
                if vi == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &mut out.entries[i * n..(i + 1) * n];
                for (o, vj) in row.iter_mut().zip(v) {
                    *o += vi * vj.conj();
                }
            }
        }
        out
    }
}

fn evd_error(e: faer::linalg::evd::EvdError) -> Error {
    Error::Numeric(format!("Hermitian eigensolver did not converge: {e:?}"))
}

/// Full eigendecomposition of a Hermitian matrix.
pub fn eig_hermitian(h: &OperatorMatrix) -> Result<HermitianEigen> {
    h.ensure_hermitian()?;
    let n = h.dim;
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            dim: 0,
            vectors: Vec::new(),
        });
    }
    if h.is_real() {
        let m = Mat::<f64>::from_fn(n, n, |i, j| h[(i, j)].re);
        let evd = m.self_adjoint_eigen(Side::Lower).map_err(evd_error)?;
        let s = evd.S().column_vector();
        let u = evd.U();
        let values = (0..n).map(|k| s[k]).collect();
        let mut vectors = Vec::with_capacity(n * n);
        for k in 0..n {
            for i in 0..n {
                vectors.push(C64::new(u[(i, k)], 0.0));
            }
        }
        Ok(HermitianEigen {
            values,
            dim: n,
            vectors,
        })
    } else {
        let m = Mat::<C64>::from_fn(n, n, |i, j| h[(i, j)]);
        let evd = m.self_adjoint_eigen(Side::Lower).map_err(evd_error)?;
        let s = evd.S().column_vector();
        let u = evd.U();
        let values = (0..n).map(|k| s[k].re).collect();
        let mut vectors = Vec::with_capacity(n * n);
        for k in 0..n {
            for i in 0..n {
                vectors.push(u[(i, k)]);
            }
        }
        Ok(HermitianEigen {
            values,
            dim: n,
            vectors,
        })
    }
}

/// Eigenvalues only, ascending. Cheaper than [`eig_hermitian`] for large matrices.
pub fn eigvals_hermitian(h: &OperatorMatrix) -> Result<Vec<f64>> {
    h.ensure_hermitian()?;
    let n = h.dim;
    if h.is_real() {
        let m = Mat::<f64>::from_fn(n, n, |i, j| h[(i, j)].re);
        m.self_adjoint_eigenvalues(Side::Lower).map_err(evd_error)
    } else {
        let m = Mat::<C64>::from_fn(n, n, |i, j| h[(i, j)]);
        m.self_adjoint_eigenvalues(Side::Lower).map_err(evd_error)
    }
}

/// f(H) = V · diag(f(λ)) · V† for Hermitian H.
pub fn apply_function_to_hermitian(
    h: &OperatorMatrix,
    f: impl Fn(f64) -> f64,
) -> Result<OperatorMatrix> {
    let eig = eig_hermitian(h)?;
    Ok(eig.reconstruct(f, &h.basis_label))
}

/// Euclidean norm of a state vector.
pub fn vector_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// ⟨u|v⟩.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn destroy_two_levels() {
        let a = destroy(2).unwrap();
        assert_eq!(a[(0, 1)], c(1.0));
        assert_eq!(a[(0, 0)], c(0.0));
        assert_eq!(a[(1, 0)], c(0.0));
        assert_eq!(a[(1, 1)], c(0.0));
    }

    #[test]
    fn destroy_three_levels_entry() {
        let a = destroy(3).unwrap();
        assert_eq!(a[(1, 2)], c(2f64.sqrt()));
    }

    #[test]
    fn destroy_rejects_tiny_dimension() {
        assert!(matches!(destroy(1), Err(Error::InvalidDimension { dim: 1, .. })));
        assert!(matches!(destroy(0), Err(Error::InvalidDimension { .. })));
    }

    #[test]
    fn number_operator_is_diagonal_ladder() {
        for d in [2, 5, 9] {
            let a = destroy(d).unwrap();
            let n = a.adjoint().matmul(&a);
            let expected: Vec<f64> = (0..d).map(|k| k as f64).collect();
            assert!(n.max_abs_diff(&OperatorMatrix::from_real_diagonal(&expected, "fock")) < 1e-14);
        }
    }

    #[test]
    fn canonical_commutator_except_top_level() {
        let d = 8;
        let a = destroy(d).unwrap();
        let comm = a.commutator(&a.adjoint());
        for i in 0..d - 1 {
            for j in 0..d - 1 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((comm[(i, j)] - c(want)).norm() < 1e-12);
            }
        }
        // truncation shows up only in the top level
        assert!((comm[(d - 1, d - 1)] - c(-((d - 1) as f64))).norm() < 1e-12);
    }

    #[test]
    fn kron_identities() {
        let i2 = OperatorMatrix::identity(2, "a");
        let i3 = OperatorMatrix::identity(3, "b");
        let k = kron(&i2, &i3);
        assert_eq!(k.dim(), 6);
        assert!(k.max_abs_diff(&OperatorMatrix::identity(6, "")) == 0.0);
        assert_eq!(k.basis_label(), "a⊗b");

        let d = OperatorMatrix::from_real_diagonal(&[0.0, 1.0], "q");
        let k = kron(&d, &i2);
        assert!(k.max_abs_diff(&OperatorMatrix::from_real_diagonal(&[0.0, 0.0, 1.0, 1.0], "")) == 0.0);
    }

    #[test]
    fn kron_entry_definition() {
        let a = OperatorMatrix::from_fn(2, "a", |i, j| C64::new(i as f64 + 1.0, j as f64));
        let b = OperatorMatrix::from_fn(3, "b", |i, j| C64::new((i * 3 + j) as f64, -1.0));
        let k = kron(&a, &b);
        for i in 0..2 {
            for j in 0..2 {
                for p in 0..3 {
                    for q in 0..3 {
                        assert_eq!(k[(i * 3 + p, j * 3 + q)], a[(i, j)] * b[(p, q)]);
                    }
                }
            }
        }
    }

    #[test]
    fn eig_of_diagonal_is_sorted() {
        let h = OperatorMatrix::from_real_diagonal(&[3.0, 1.0, 2.0], "x");
        let e = eig_hermitian(&h).unwrap();
        for (got, want) in e.values.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn eig_of_pauli_x() {
        let h = OperatorMatrix::from_fn(2, "q", |i, j| c(if i != j { 1.0 } else { 0.0 }));
        let e = eig_hermitian(&h).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let h = OperatorMatrix::from_fn(2, "q", |i, j| c(if i < j { 1.0 } else { 0.0 }));
        assert!(matches!(eig_hermitian(&h), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn cos_of_diagonal_phase() {
        let h = OperatorMatrix::from_real_diagonal(&[0.0, PI], "x");
        let ch = apply_function_to_hermitian(&h, f64::cos).unwrap();
        assert!(ch.max_abs_diff(&OperatorMatrix::from_real_diagonal(&[1.0, -1.0], "")) < 1e-14);
    }

    /// Σ_k (-1)^k X^{2k} / (2k)! summed until the terms vanish.
    fn cos_taylor(x: &OperatorMatrix) -> OperatorMatrix {
        let x2 = x.matmul(x);
        let mut term = OperatorMatrix::identity(x.dim(), "");
        let mut sum = term.clone();
        for k in 1..200 {
            let denom = ((2 * k - 1) * (2 * k)) as f64;
            term = term.matmul(&x2).scale_real(-1.0 / denom);
            sum = &sum + &term;
            if term.max_abs() < 1e-18 {
                break;
            }
        }
        sum
    }

    fn phase_operator(dim: usize, zpf: f64) -> OperatorMatrix {
        let a = destroy(dim).unwrap();
        (&a + &a.adjoint()).scale_real(zpf)
    }

    #[test]
    fn cos_of_phase_matches_taylor_series() {
        let phi = phase_operator(30, std::f64::consts::FRAC_1_SQRT_2);
        let spectral = apply_function_to_hermitian(&phi, f64::cos).unwrap();
        let taylor = cos_taylor(&phi);
        for i in 0..10 {
            for j in 0..10 {
                assert!((spectral[(i, j)] - taylor[(i, j)]).norm() <= 1e-6);
            }
        }
        // the low-lying block is insensitive to where the ladder is truncated
        let big = apply_function_to_hermitian(&phase_operator(80, std::f64::consts::FRAC_1_SQRT_2), f64::cos)
            .unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert!((spectral[(i, j)] - big[(i, j)]).norm() <= 1e-6);
            }
        }
    }

    fn hermitian_from(dim: usize, raw: &[(f64, f64)]) -> OperatorMatrix {
        let mut h = OperatorMatrix::zeros(dim, "rand");
        let mut it = raw.iter();
        for i in 0..dim {
            for j in i..dim {
                let &(re, im) = it.next().unwrap();
                if i == j {
                    h[(i, i)] = c(re);
                } else {
                    h[(i, j)] = C64::new(re, im);
                    h[(j, i)] = C64::new(re, -im);
                }
            }
        }
        h
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn eig_random_hermitian_contracts(raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 36)) {
            let h = hermitian_from(8, &raw);
            let norm = h.frobenius_norm();
            let e = eig_hermitian(&h).unwrap();
            for w in e.values.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
            for k in 0..8 {
                let v = e.vector(k);
                let hv = h.matvec(v);
                let resid: f64 = hv.iter().zip(v).map(|(a, b)| (a - b * e.values[k]).norm_sqr()).sum::<f64>().sqrt();
                prop_assert!(resid < 1e-8 * norm);
                for l in 0..8 {
                    let ip = inner(e.vector(l), v);
                    let want = if k == l { 1.0 } else { 0.0 };
                    prop_assert!((ip - c(want)).norm() < 1e-10);
                }
            }
            let rebuilt = e.reconstruct(|x| x, "");
            prop_assert!(rebuilt.max_abs_diff(&h) < 1e-10 * norm.max(1.0));
            let trace: f64 = e.values.iter().sum();
            prop_assert!((trace - h.trace().re).abs() < 1e-9 * norm.max(1.0));
        }

        #[test]
        fn identity_function_returns_input(raw in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 15)) {
            let h = hermitian_from(5, &raw);
            let back = apply_function_to_hermitian(&h, |x| x).unwrap();
            prop_assert!(back.max_abs_diff(&h) < 1e-10);
        }

        #[test]
        fn kron_is_associative(
            a in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4),
            b in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9),
            cc in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4),
        ) {
            let mk = |d: usize, raw: &[(f64, f64)]| OperatorMatrix::from_fn(d, "", |i, j| {
                let (re, im) = raw[i * d + j];
                C64::new(re, im)
            });
            let (a, b, cm) = (mk(2, &a), mk(3, &b), mk(2, &cc));
            let left = kron(&kron(&a, &b), &cm);
            let right = kron(&a, &kron(&b, &cm));
            prop_assert!(left.max_abs_diff(&right) < 1e-12);
        }
    }
}
