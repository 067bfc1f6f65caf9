//! Dense complex linear algebra sized for few-level quantum systems.
//!
//! Matrices are square, row-major, and small (n <= 8 in practice), so the
//! eigensolver is a cyclic complex Jacobi iteration: simple, allocation-light,
//! and accurate to a few ulps for well-conditioned Hermitian input, which is
//! all the propagator and the counterdiabatic construction need.

use num_complex::Complex;

use crate::{r, Scalar};

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<R> {
    n: usize,
    data: Vec<Complex<R>>,
}

impl<R: Scalar> CMatrix<R> {
    /// Zero matrix of dimension `n`.
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex::new(R::zero(), R::zero()); n * n],
        }
    }

    /// Identity matrix of dimension `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex::new(R::one(), R::zero());
        }
        m
    }

    /// Builds a matrix entry-wise from `f(row, col)`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex<R>) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a real matrix from rows of `f64` literals.
    pub fn from_rows_re(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        assert!(
            rows.iter().all(|row| row.len() == n),
            "rows must form a square matrix"
        );
        Self::from_fn(n, |i, j| Complex::new(r(rows[i][j]), R::zero()))
    }

    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Immutable view of the raw row-major data.
    pub fn data(&self) -> &[Complex<R>] {
        &self.data
    }

    /// Sum of two matrices.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += *b;
        }
        out
    }

    /// Difference of two matrices.
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= *b;
        }
        out
    }

    /// Matrix scaled by a real factor.
    pub fn scale(&self, factor: R) -> Self {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= factor;
        }
        out
    }

    /// Matrix scaled by a complex factor.
    pub fn scale_c(&self, factor: Complex<R>) -> Self {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= factor;
        }
        out
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik.norm_sqr() == R::zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    /// Matrix-vector product `self * v`.
    pub fn matvec(&self, v: &CVector<R>) -> CVector<R> {
        assert_eq!(self.n, v.len(), "dimension mismatch");
        let mut out = CVector::zeros(self.n);
        for i in 0..self.n {
            let mut acc = Complex::new(R::zero(), R::zero());
            for j in 0..self.n {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    /// Commutator `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    /// Unitary conjugation `u^dagger * self * u`.
    pub fn conjugated_by(&self, u: &Self) -> Self {
        u.adjoint().matmul(&self.matmul(u))
    }

    /// Hermitian part `(A + A^dagger) / 2`; scrubs anti-Hermitian round-off.
    pub fn hermitized(&self) -> Self {
        let half = r::<R>(0.5);
        Self::from_fn(self.n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * half)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> R {
        self.data.iter().map(|z| z.norm()).fold(R::zero(), R::max)
    }

    /// Largest magnitude of `A[i][j] - conj(A[j][i])`; zero for Hermitian `A`.
    pub fn hermiticity_defect(&self) -> R {
        let mut worst = R::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Eigenvalues (ascending) and matching orthonormal eigenvector columns of
    /// a Hermitian matrix, via cyclic complex Jacobi rotations.
    ///
    /// Column phases are fixed so each vector's largest-magnitude component is
    /// real and positive (first index wins ties), which makes the output
    /// deterministic. The caller must pass a Hermitian matrix; the hermiticity
    /// defect is only debug-asserted.
    pub fn eigh(&self) -> (Vec<R>, CMatrix<R>) {
        let n = self.n;
        debug_assert!(
            self.hermiticity_defect() <= r::<R>(1e-10) * (R::one() + self.max_abs()),
            "eigh expects a Hermitian matrix"
        );
        let mut a = self.clone();
        let mut v = CMatrix::identity(n);

        let fro2: R = a
            .data
            .iter()
            .map(|z| z.norm_sqr())
            .fold(R::zero(), |s, x| s + x);
        let eps = R::epsilon();
        let stop = fro2 * eps * eps;

        for _sweep in 0..64 {
            let mut off2 = R::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off2 += a[(p, q)].norm_sqr();
                }
            }
            if off2 <= stop || off2 == R::zero() {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    let mag = apq.norm();
                    if mag * mag <= stop / r(16.0) {
                        continue;
                    }
                    // Phase-align the pivot, then rotate the induced real
                    // symmetric 2x2 block by the classic small-angle choice.
                    let phase = apq / mag;
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let kappa = (app - aqq) / (r::<R>(2.0) * mag);
                    let sign = if kappa >= R::zero() {
                        R::one()
                    } else {
                        -R::one()
                    };
                    let t = sign / (kappa.abs() + (kappa * kappa + R::one()).sqrt());
                    let c = R::one() / (t * t + R::one()).sqrt();
                    let s = t * c;

                    // Columns of the plane rotation: J[(p,p)] = c,
                    // J[(p,q)] = -s*phase, J[(q,p)] = s*conj(phase), J[(q,q)] = c.
                    let jp = Complex::new(s, R::zero()) * phase.conj();
                    let jq = Complex::new(s, R::zero()) * phase;

                    // A <- J^dagger A J, touching only rows/columns p and q.
                    for k in 0..n {
                        if k == p || k == q {
                            continue;
                        }
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp * c + akq * jp;
                        a[(k, q)] = akq * c - akp * jq;
                        a[(p, k)] = a[(k, p)].conj();
                        a[(q, k)] = a[(k, q)].conj();
                    }
                    let app_new = app * c * c + aqq * s * s + r::<R>(2.0) * mag * s * c;
                    let aqq_new = app * s * s + aqq * c * c - r::<R>(2.0) * mag * s * c;
                    a[(p, p)] = Complex::new(app_new, R::zero());
                    a[(q, q)] = Complex::new(aqq_new, R::zero());
                    a[(p, q)] = Complex::new(R::zero(), R::zero());
                    a[(q, p)] = Complex::new(R::zero(), R::zero());

                    // V <- V J.
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * c + vkq * jp;
                        v[(k, q)] = vkq * c - vkp * jq;
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            a[(i, i)]
                .re
                .partial_cmp(&a[(j, j)].re)
                .expect("eigenvalues must be finite")
        });
        let energies: Vec<R> = order.iter().map(|&i| a[(i, i)].re).collect();
        let mut vectors = CMatrix::zeros(n);
        for (col, &src) in order.iter().enumerate() {
            for row in 0..n {
                vectors[(row, col)] = v[(row, src)];
            }
        }
        vectors.fix_column_phases();
        (energies, vectors)
    }

    /// Rotates each column so its largest-magnitude component is real and
    /// positive (first index wins ties).
    pub fn fix_column_phases(&mut self) {
        let n = self.n;
        for col in 0..n {
            let mut best = 0;
            let mut best_mag = R::zero();
            for row in 0..n {
                let mag = self[(row, col)].norm_sqr();
                if mag > best_mag {
                    best_mag = mag;
                    best = row;
                }
            }
            if best_mag == R::zero() {
                continue;
            }
            let z = self[(best, col)];
            let phase = (z / z.norm()).conj();
            for row in 0..n {
                self[(row, col)] *= phase;
            }
        }
    }

    /// Column `col` as a vector.
    pub fn column(&self, col: usize) -> CVector<R> {
        CVector::from((0..self.n).map(|row| self[(row, col)]).collect::<Vec<_>>())
    }
}

impl<R: Scalar> std::ops::Index<(usize, usize)> for CMatrix<R> {
    type Output = Complex<R>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<R> {
        &self.data[i * self.n + j]
    }
}

impl<R: Scalar> std::ops::IndexMut<(usize, usize)> for CMatrix<R> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<R> {
        &mut self.data[i * self.n + j]
    }
}

/// Dense complex vector.
#[derive(Clone, Debug, PartialEq)]
pub struct CVector<R> {
    data: Vec<Complex<R>>,
}

impl<R: Scalar> CVector<R> {
    /// Zero vector of length `n`.
    pub fn zeros(n: usize) -> Self {
        Self {
            data: vec![Complex::new(R::zero(), R::zero()); n],
        }
    }

    /// Standard basis vector `e_k` of length `n`.
    pub fn basis(n: usize, k: usize) -> Self {
        assert!(k < n, "basis index out of range");
        let mut v = Self::zeros(n);
        v[k] = Complex::new(R::one(), R::zero());
        v
    }

    /// Length of the vector.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    /// True when the vector has no components.
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Immutable view of the amplitudes.
    pub fn data(&self) -> &[Complex<R>] {
        &self.data
    }

    /// Inner product `<self|other>` (conjugate-linear in `self`).
    pub fn dot(&self, other: &Self) -> Complex<R> {
        assert_eq!(self.len(), other.len(), "dimension mismatch");
        let mut acc = Complex::new(R::zero(), R::zero());
        for (a, b) in self.data.iter().zip(&other.data) {
            acc += a.conj() * *b;
        }
        acc
    }

    /// Squared Euclidean norm.
    pub fn norm_sqr(&self) -> R {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .fold(R::zero(), |s, x| s + x)
    }

    /// Euclidean norm.
    pub fn norm(&self) -> R {
        self.norm_sqr().sqrt()
    }

    /// Sum of two vectors.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "dimension mismatch");
        Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }

    /// Difference of two vectors.
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "dimension mismatch");
        Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| *a - *b)
                .collect(),
        }
    }

    /// Vector scaled by a complex factor.
    pub fn scale_c(&self, factor: Complex<R>) -> Self {
        Self {
            data: self.data.iter().map(|a| *a * factor).collect(),
        }
    }

    /// Entry-wise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            data: self.data.iter().map(|a| a.conj()).collect(),
        }
    }

    /// Population (squared magnitude) of component `k`.
    pub fn population(&self, k: usize) -> R {
        self.data[k].norm_sqr()
    }
}

impl<R: Scalar> From<Vec<Complex<R>>> for CVector<R> {
    fn from(data: Vec<Complex<R>>) -> Self {
        Self { data }
    }
}

impl<R: Scalar> std::ops::Index<usize> for CVector<R> {
    type Output = Complex<R>;
    fn index(&self, i: usize) -> &Complex<R> {
        &self.data[i]
    }
}

impl<R: Scalar> std::ops::IndexMut<usize> for CVector<R> {
    fn index_mut(&mut self, i: usize) -> &mut Complex<R> {
        &mut self.data[i]
    }
}
