//! Complex dense linear algebra and polynomial root-finding kernel.
//!
//! Everything else in the crate reduces to the four primitives implemented
//! here: a row-major complex matrix type with the handful of operations the
//! spin-chain work needs (products, Kronecker/swap embeddings, LU solves), a
//! complex polynomial type, a cyclic-Jacobi Hermitian eigensolver, and an
//! Aberth–Ehrlich polynomial root finder. Matrices stay small (a few hundred
//! square at most), so O(n³)-per-sweep dense algorithms are deliberate.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

pub use num_complex::Complex64 as Complex;

/// Shorthand constructor for a complex scalar.
#[inline]
pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// Relative Hermitian-symmetry tolerance accepted by [`hermitian_eigen`]:
/// `max|M − M†|` must not exceed this times `max(1, max|M|)`.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Cap on full Jacobi sweeps; quadratic convergence makes ~10 typical even at
/// dimension 64, so hitting this cap signals a genuinely pathological input.
const JACOBI_MAX_SWEEPS: usize = 64;

/// Convergence threshold for the off-diagonal Frobenius mass, relative to the
/// Frobenius norm of the input.
const JACOBI_OFF_TOL: f64 = 1e-14;

/// Iteration cap for the Aberth–Ehrlich simultaneous root refinement.
const ABERTH_MAX_ITERS: usize = 400;

/// Aberth stops when every correction is below this, relative to the root
/// magnitude (or absolutely, for roots near zero).
const ABERTH_STEP_TOL: f64 = 1e-14;

/// Multiple of the floating-point evaluation noise floor below which a
/// polynomial value counts as zero. At a root of multiplicity `m` the step
/// criterion stalls (the value scales like `|z−r|^m`), so an iterate is also
/// accepted once `|p(z)|` cannot be distinguished from rounding error.
const ABERTH_NOISE_FACTOR: f64 = 4.0;

/// Errors surfaced by the kernel operations.
#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum LinalgError {
    /// The matrix failed the Hermitian symmetry check.
    #[error("matrix is not Hermitian: max|M - M\u{2020}| = {deviation:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },
    /// An iterative scheme hit its iteration cap before reaching tolerance.
    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },
    /// Root-finding was asked for the roots of the zero (or constant) polynomial.
    #[error("polynomial has no roots to find (zero or constant)")]
    ZeroPolynomial,
    /// Operands are not conformable.
    #[error("dimension mismatch: ({0}, {1}) vs ({2}, {3})", .left.0, .left.1, .right.0, .right.1)]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    /// An LU pivot vanished; the system is singular to working precision.
    #[error("matrix is numerically singular (pivot {pivot})")]
    SingularMatrix { pivot: usize },
    /// A constructor was handed NaN or infinity.
    #[error("non-finite entry at flat index {index}")]
    NonFinite { index: usize },
}

fn all_finite(entries: &[Complex]) -> Result<(), LinalgError> {
    for (index, z) in entries.iter().enumerate() {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(LinalgError::NonFinite { index });
        }
    }
    Ok(())
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex>,
}

impl CMatrix {
    /// Validated constructor: checks the entry count and rejects non-finite
    /// values. Internal builders that cannot produce bad values use the
    /// infallible constructors below.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex>) -> Result<Self, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                left: (rows, cols),
                right: (entries.len(), 1),
            });
        }
        all_finite(&entries)?;
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn diag(d: &[Complex]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &z) in d.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex] {
        &self.entries
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, z: Complex) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&e| e * z).collect(),
        }
    }

    pub fn trace(&self) -> Complex {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus (the max-entry norm used by all residual checks).
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `max |M_ij − conj(M_ji)|`; zero for an exactly Hermitian matrix.
    pub fn hermitian_deviation(&self) -> f64 {
        debug_assert!(self.is_square());
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Matrix–vector product.
    pub fn apply(&self, v: &[Complex]) -> Vec<Complex> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self[(i, j)] * v[j])
                    .sum::<Complex>()
            })
            .collect()
    }

    /// Kronecker product, `self ⊗ other` with `self` on the left (slow) index.
    pub fn kron(&self, other: &Self) -> Self {
        let (r1, c1, r2, c2) = (self.rows, self.cols, other.rows, other.cols);
        Self::from_fn(r1 * r2, c1 * c2, |i, j| {
            self[(i / r2, j / c2)] * other[(i % r2, j % c2)]
        })
    }

    /// Permutation matrix swapping Kronecker factors:
    /// `swap(d1, d2) · (v ⊗ w) = w ⊗ v` for `v ∈ C^{d1}`, `w ∈ C^{d2}`.
    pub fn swap(d1: usize, d2: usize) -> Self {
        let mut m = Self::zeros(d1 * d2, d1 * d2);
        for i in 0..d1 {
            for j in 0..d2 {
                m[(j * d1 + i, i * d2 + j)] = Complex::ONE;
            }
        }
        m
    }

    /// Contiguous block copy, rows `r0..r0+nr`, columns `c0..c0+nc`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols);
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn column(&self, j: usize) -> Vec<Complex> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[Complex]) {
        assert_eq!(v.len(), self.rows);
        for i in 0..self.rows {
            self[(i, j)] = v[i];
        }
    }

    /// Solves `self · x = b` by partial-pivot LU.
    pub fn solve(&self, b: &[Complex]) -> Result<Vec<Complex>, LinalgError> {
        assert!(self.is_square() && b.len() == self.rows);
        let n = self.rows;
        let (lu, perm, _) = self.lu_factor()?;
        // Forward substitution on the permuted right-hand side.
        let mut x: Vec<Complex> = perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            for k in 0..i {
                let l = lu[(i, k)];
                x[i] = x[i] - l * x[k];
            }
        }
        // Back substitution.
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = lu[(i, k)];
                x[i] = x[i] - u * x[k];
            }
            x[i] /= lu[(i, i)];
        }
        Ok(x)
    }

    /// Determinant by LU; returns zero when a pivot underflows.
    pub fn det(&self) -> Complex {
        assert!(self.is_square());
        match self.lu_factor() {
            Ok((lu, _, sign)) => {
                let mut d = Complex::new(sign, 0.0);
                for i in 0..self.rows {
                    d *= lu[(i, i)];
                }
                d
            }
            Err(_) => Complex::ZERO,
        }
    }

    /// Doolittle LU with partial pivoting: returns the packed factors, the row
    /// permutation (as "row i of LU came from row perm[i]"), and the
    /// permutation sign.
    fn lu_factor(&self) -> Result<(CMatrix, Vec<usize>, f64), LinalgError> {
        let n = self.rows;
        let mut lu = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let scale = self.max_abs().max(1.0);
        for k in 0..n {
            let (mut pivot_row, mut pivot_mag) = (k, lu[(k, k)].norm());
            for r in k + 1..n {
                let mag = lu[(r, k)].norm();
                if mag > pivot_mag {
                    pivot_row = r;
                    pivot_mag = mag;
                }
            }
            if pivot_mag < 1e-300 * scale {
                return Err(LinalgError::SingularMatrix { pivot: k });
            }
            if pivot_row != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(pivot_row, j)];
                    lu[(pivot_row, j)] = tmp;
                }
                perm.swap(k, pivot_row);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for r in k + 1..n {
                let factor = lu[(r, k)] / pivot;
                lu[(r, k)] = factor;
                for j in k + 1..n {
                    let sub = factor * lu[(k, j)];
                    lu[(r, j)] = lu[(r, j)] - sub;
                }
            }
        }
        Ok((lu, perm, sign))
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        &mut self.entries[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols);
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols);
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale(-Complex::ONE)
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matrix product dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == Complex::ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    let add = aik * rhs[(k, j)];
                    out[(i, j)] += add;
                }
            }
        }
        out
    }
}

impl Mul<Complex> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, z: Complex) -> CMatrix {
        self.scale(z)
    }
}

impl fmt::Display for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>+12.5e}{:>+12.5e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// `ab − ba`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, LinalgError> {
    conformable(a, b)?;
    Ok(&(a * b) - &(b * a))
}

/// `ab + ba`.
pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, LinalgError> {
    conformable(a, b)?;
    Ok(&(a * b) + &(b * a))
}

fn conformable(a: &CMatrix, b: &CMatrix) -> Result<(), LinalgError> {
    if !a.is_square() || !b.is_square() || a.rows() != b.rows() {
        return Err(LinalgError::DimensionMismatch {
            left: (a.rows(), a.cols()),
            right: (b.rows(), b.cols()),
        });
    }
    Ok(())
}

/// Conjugate-linear-in-the-first-argument inner product `⟨a, b⟩ = Σ ā_i b_i`.
pub fn vec_dot(a: &[Complex], b: &[Complex]) -> Complex {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x.conj() * y).sum()
}

/// Euclidean norm.
pub fn vec_norm(v: &[Complex]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
///
/// Returns the eigenvalues in ascending order and the matching unitary of
/// column eigenvectors, each with its first non-negligible component rotated
/// to the positive real axis so repeated runs produce identical output.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix), LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::DimensionMismatch {
            left: (m.rows(), m.cols()),
            right: (m.cols(), m.rows()),
        });
    }
    let n = m.rows();
    let scale = m.max_abs().max(1.0);
    let deviation = m.hermitian_deviation();
    if deviation > HERMITICITY_TOL * scale {
        return Err(LinalgError::NotHermitian {
            deviation,
            tolerance: HERMITICITY_TOL * scale,
        });
    }

    let mut a = m.clone();
    // Symmetrize exactly so rounding in the caller cannot bias the rotations.
    for i in 0..n {
        a[(i, i)] = Complex::new(a[(i, i)].re, 0.0);
        for j in i + 1..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = CMatrix::identity(n);
    let fro = a.frobenius_norm().max(1e-300);

    let mut converged = false;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| 2.0 * a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_OFF_TOL * fro {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                // Unitary 2x2 eliminating the (p,q) entry: a phase that makes
                // the pivot real, then a standard real Jacobi rotation.
                let phase = apq / r;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let cth = 1.0 / (1.0 + t * t).sqrt();
                let sth = t * cth;
                let (upp, upq) = (phase * cth, phase * sth);
                let (uqp, uqq) = (Complex::new(-sth, 0.0), Complex::new(cth, 0.0));
                // A <- U† A U, touching only rows/columns p and q.
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * upp + akq * uqp;
                    a[(k, q)] = akp * upq + akq * uqq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
                    a[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
                }
                // Pin the rotated pivot entries to their exact values.
                a[(p, q)] = Complex::ZERO;
                a[(q, p)] = Complex::ZERO;
                a[(p, p)] = Complex::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex::new(a[(q, q)].re, 0.0);
                // V <- V U.
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * upp + vkq * uqp;
                    v[(k, q)] = vkp * upq + vkq * uqq;
                }
            }
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence {
            iterations: JACOBI_MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src);
        // Deterministic phase: first component with non-negligible modulus
        // becomes real positive.
        if let Some(lead) = col.iter().find(|z| z.norm() > 1e-12) {
            let phase = lead.conj() / lead.norm();
            for z in col.iter_mut() {
                *z *= phase;
            }
        }
        vectors.set_column(dst, &col);
    }
    Ok((eigenvalues, vectors))
}

/// Complex polynomial with coefficients stored lowest-degree first.
///
/// The zero polynomial is the empty coefficient list; constructors trim
/// exactly-zero leading coefficients so `degree` is meaningful, but never
/// round away small ones (tiny leading coefficients are the caller's
/// responsibility — they carry meaning in the recurrence-generated
/// characteristic polynomials).
#[derive(Debug, Clone, PartialEq)]
pub struct CPolynomial {
    coeffs: Vec<Complex>,
}

impl CPolynomial {
    pub fn new(mut coeffs: Vec<Complex>) -> Result<Self, LinalgError> {
        all_finite(&coeffs)?;
        while coeffs.last() == Some(&Complex::ZERO) {
            coeffs.pop();
        }
        Ok(Self { coeffs })
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(z: Complex) -> Self {
        if z == Complex::ZERO {
            Self::zero()
        } else {
            Self { coeffs: vec![z] }
        }
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex]) -> Self {
        let mut coeffs = vec![Complex::ONE];
        for &r in roots {
            // Multiply by (X − r): new[k] = old[k−1] − r·old[k].
            let mut next = vec![Complex::ZERO; coeffs.len() + 1];
            for (k, &ck) in coeffs.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= r * ck;
            }
            coeffs = next;
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the convention that the zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Complex {
        self.coeffs.last().copied().unwrap_or(Complex::ZERO)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: Complex) -> Complex {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::ZERO, |acc, &ck| acc * x + ck)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &ck)| ck * k as f64)
                .collect(),
        }
    }

    pub fn scale(&self, z: Complex) -> Self {
        if z == Complex::ZERO {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|&ck| ck * z).collect(),
        }
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Add for &CPolynomial {
    type Output = CPolynomial;
    fn add(self, rhs: &CPolynomial) -> CPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = vec![Complex::ZERO; n];
        for (k, &ck) in self.coeffs.iter().enumerate() {
            coeffs[k] += ck;
        }
        for (k, &ck) in rhs.coeffs.iter().enumerate() {
            coeffs[k] += ck;
        }
        while coeffs.last() == Some(&Complex::ZERO) {
            coeffs.pop();
        }
        CPolynomial { coeffs }
    }
}

impl Sub for &CPolynomial {
    type Output = CPolynomial;
    fn sub(self, rhs: &CPolynomial) -> CPolynomial {
        &self.clone() + &rhs.scale(-Complex::ONE)
    }
}

impl Mul for &CPolynomial {
    type Output = CPolynomial;
    fn mul(self, rhs: &CPolynomial) -> CPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return CPolynomial::zero();
        }
        let mut coeffs = vec![Complex::ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        CPolynomial { coeffs }
    }
}

/// All complex roots (with multiplicity) by the Aberth–Ehrlich method with a
/// single Newton polish per root, sorted by `(re, im)` so fixtures are
/// deterministic. Degrees one and two use closed forms.
pub fn poly_roots(p: &CPolynomial) -> Result<Vec<Complex>, LinalgError> {
    if p.degree() < 1 || p.is_zero() {
        return Err(LinalgError::ZeroPolynomial);
    }
    let n = p.degree();
    let lead = p.leading();
    let mut roots = match n {
        1 => vec![-p.coeffs[0] / p.coeffs[1]],
        2 => quadratic_roots(p.coeffs[0], p.coeffs[1], p.coeffs[2]),
        _ => aberth(p)?,
    };
    // One Newton step against the original polynomial sharpens each root to
    // (near) machine precision without risking divergence.
    let dp = p.derivative();
    for z in roots.iter_mut() {
        let d = dp.eval(*z);
        if d.norm() > 1e-300 {
            *z -= p.eval(*z) / d;
        }
    }
    debug_assert!(lead.norm() > 0.0);
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

/// Numerically stable quadratic formula `c2 x² + c1 x + c0 = 0`.
fn quadratic_roots(c0: Complex, c1: Complex, c2: Complex) -> Vec<Complex> {
    let disc = (c1 * c1 - 4.0 * c2 * c0).sqrt();
    // Choose the sign that avoids cancellation in c1 ± disc.
    let q = if (c1 + disc).norm() >= (c1 - disc).norm() {
        -(c1 + disc) * 0.5
    } else {
        -(c1 - disc) * 0.5
    };
    if q.norm() > 1e-300 {
        vec![q / c2, c0 / q]
    } else {
        // c1 ≈ 0 and c0 ≈ 0: double root at the origin of the shifted problem.
        let r = (-c0 / c2).sqrt();
        vec![r, -r]
    }
}

fn aberth(p: &CPolynomial) -> Result<Vec<Complex>, LinalgError> {
    let n = p.degree();
    let lead = p.leading();
    let monic: Vec<Complex> = p.coeffs().iter().map(|&ck| ck / lead).collect();
    let poly = CPolynomial {
        coeffs: monic.clone(),
    };
    let dpoly = poly.derivative();

    // Cauchy bound on the root moduli, shrunk slightly, with an angular offset
    // so the start configuration shares no symmetry axis with real-coefficient
    // inputs.
    let radius = 1.0
        + monic[..n]
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max);
    let mut z: Vec<Complex> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex::from_polar(0.9 * radius, angle)
        })
        .collect();

    // Running a Horner evaluation at `x` accumulates roundoff bounded by a
    // small multiple of `eps · Σ|c_j| |x|^j`; below that floor the value is
    // indistinguishable from zero and the iterate counts as converged.
    let noise_floor = |x: Complex| {
        let ax = x.norm();
        let mut s = 0.0;
        for &cj in monic.iter().rev() {
            s = s * ax + cj.norm();
        }
        ABERTH_NOISE_FACTOR * f64::EPSILON * s
    };

    for _iter in 0..ABERTH_MAX_ITERS {
        let mut max_step = 0.0f64;
        let mut all_at_floor = true;
        for k in 0..n {
            let pk = poly.eval(z[k]);
            if pk.norm() <= noise_floor(z[k]) {
                continue;
            }
            all_at_floor = false;
            let dk = dpoly.eval(z[k]);
            let newton = if dk.norm() > 1e-300 {
                pk / dk
            } else {
                // Derivative vanished exactly on an iterate; nudge instead.
                Complex::new(1e-8, 1e-8)
            };
            let repulsion: Complex = (0..n)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).finv())
                .sum();
            let denom = Complex::ONE - newton * repulsion;
            let step = if denom.norm() > 1e-300 {
                newton / denom
            } else {
                newton
            };
            z[k] -= step;
            max_step = max_step.max(step.norm() / z[k].norm().max(1.0));
        }
        if all_at_floor || max_step < ABERTH_STEP_TOL {
            return Ok(z);
        }
    }
    Err(LinalgError::NoConvergence {
        iterations: ABERTH_MAX_ITERS,
    })
}

/// Characteristic polynomial `det(x·I − m)` (monic), recovered exactly from
/// determinant evaluations at scaled roots of unity by a discrete Fourier
/// average. Intended for the small non-Hermitian sector matrices where the
/// Jacobi oracle does not apply.
pub fn char_poly(m: &CMatrix) -> Result<CPolynomial, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::DimensionMismatch {
            left: (m.rows(), m.cols()),
            right: (m.cols(), m.rows()),
        });
    }
    let n = m.rows();
    if n == 0 {
        return Err(LinalgError::ZeroPolynomial);
    }
    let npts = n + 1;
    let radius = 1.0 + 2.0 * m.max_abs();
    let omega = Complex::from_polar(1.0, 2.0 * std::f64::consts::PI / npts as f64);
    let values: Vec<Complex> = (0..npts)
        .map(|k| {
            let xk = omega.powu(k as u32) * radius;
            let mut shifted = m.scale(-Complex::ONE);
            for i in 0..n {
                shifted[(i, i)] += xk;
            }
            shifted.det()
        })
        .collect();
    let mut coeffs = Vec::with_capacity(npts);
    for j in 0..npts {
        let mut cj = Complex::ZERO;
        for (k, &val) in values.iter().enumerate() {
            cj += val * omega.powu((k * j) as u32).conj();
        }
        cj /= npts as f64 * radius.powi(j as i32);
        coeffs.push(cj);
    }
    // The result is monic of degree n by construction; pin the leading
    // coefficient to kill the last rounding dust.
    coeffs[n] = Complex::ONE;
    CPolynomial::new(coeffs)
}
