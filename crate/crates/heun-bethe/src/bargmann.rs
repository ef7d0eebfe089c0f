//! Holomorphic (Bargmann) realization of the algebraic Heun operator.
//!
//! The spin-`s` module is carried by polynomials of degree ≤ 2s in one
//! variable, with
//!
//! ```text
//! J₊ = ∂ ,    J₃ = s − z∂ ,    J₋ = 2sz − z²∂ ,
//! ```
//!
//! so the monomial `z^k` has weight `m = s − k` — the same ordering as the
//! matrix representation of [`crate::spin_rep`]. Under this realization the
//! operator becomes second-order differential:
//!
//! ```text
//! W = i(z²−1)(a²z²−1)/(a²−1)·∂²
//!     + (q₃z³ + q₂z² + q₁z + q₀)·∂ + (p₂z² + p₁z + p₀) ,
//! ```
//!
//! a five-band matrix on the monomial basis. Its symbol vanishes at the five
//! regular singular points `{1, −1, 1/a, −1/a}` and `∞`; the band weights
//! conspire so the images of `z^{2s}` and `z^{2s−1}` never exceed degree
//! `2s` ([`degree_overflow`] returns the would-be excess coefficients so the
//! truncation can be asserted rather than trusted).
//!
//! On the slice `ρ₁ = ρ₂ = 0` the operator commutes with the parity
//! `z → −z` and the substitution `y = a²z²` folds each parity sector into a
//! genuine Heun-class equation — second order with the four regular singular
//! points `{0, 1, a², ∞}` — whose accessory parameter is the eigenvalue.
//! Polynomial (even sector) and `√y`-times-polynomial (odd sector) solutions
//! enumerate the whole spectrum; [`heun_ode_reduction`] constructs them and
//! certifies each against the multiplied-through equation pointwise.
//!
//! The realization is not unitary on monomials. Conjugating by the weight
//! normalisation `D = diag(√(k!(2s−k)!))` recovers, for `|a| = 1`, exactly
//! the Hermitian matrix built by [`crate::heun_operators::build_w`] — entry
//! by entry, not merely up to spectrum — which is the identity the tests pin.

use crate::heun_operators::HeunParams;
use crate::linalg_core::{
    c, char_poly, hermitian_eigen, poly_roots, CMatrix, CPolynomial, Complex, LinalgError,
};

/// Probe points for the pointwise defect of the reduced equation.
const ODE_SAMPLE_POINTS: usize = 20;

/// Errors surfaced by the holomorphic realization.
#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum BargmannError {
    /// The parity reduction exists only on the slice `ρ₁ = ρ₂ = 0`; the
    /// linear-in-`J₁`, `J₂` terms mix the sectors.
    #[error("no second-order reduction off the symmetric slice: ρ₁ = {rho1}, ρ₂ = {rho2}")]
    NotReduced { rho1: f64, rho2: f64 },
    /// Kernel failure (root finding, eigen decomposition).
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `z`-polynomial coefficients of the three differential orders of the
/// realized operator, ascending in the power of `z`.
///
/// The only three-term relations used downstream: `ρ₄ + 2i = 4ia²/(a²−1)`
/// collapses the `z³∂` and `z²` weights onto multiples of the leading symbol
/// coefficient `c₄ = ia²/(a²−1)`.
struct BandCoeffs {
    /// Degree-4 symbol of `∂²`: `[c₀, 0, c₂, 0, c₄]`.
    dd: [Complex; 5],
    /// Degree-3 coefficient of `∂`: `[q₀, q₁, q₂, q₃]`.
    d: [Complex; 4],
    /// Degree-2 multiplication part: `[p₀, p₁, p₂]`.
    v: [Complex; 3],
}

impl BandCoeffs {
    fn new(p: &HeunParams) -> Self {
        let s = p.spin.s();
        let rho4 = p.rho4();
        let denom = p.a * p.a - 1.0;
        let c4 = Complex::i() * p.a * p.a / denom;
        let c0 = Complex::i() / denom;
        Self {
            dd: [c0, Complex::ZERO, -rho4 / 2.0, Complex::ZERO, c4],
            d: [
                c(p.rho1 / 2.0, -p.rho2 / 2.0),
                rho4.scale(-(1.0 - 2.0 * s) / 2.0) - p.rho3,
                c(-p.rho1 / 2.0, -p.rho2 / 2.0),
                c4.scale(2.0 * (1.0 - 2.0 * s)),
            ],
            v: [
                rho4.scale(s / 2.0) + p.rho5() + s * p.rho3,
                c(s * p.rho1, s * p.rho2),
                c4.scale(2.0 * s * (2.0 * s - 1.0)),
            ],
        }
    }
}

/// The operator on the monomial basis `{1, z, …, z^{2s}}`; column `k` holds
/// the image of `z^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BargmannMatrix {
    /// Raw five-band matrix, `(2s+1) × (2s+1)`, generally non-Hermitian.
    pub m: CMatrix,
}

impl BargmannMatrix {
    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    /// Similarity transform `D·M·D⁻¹` with `D = diag(√(k!(2s−k)!))`.
    ///
    /// The weights are built as running ratios `d_{k+1}/d_k = √((k+1)/(2s−k))`
    /// — only ratios enter a similarity, and this avoids large factorials.
    /// For `|a| = 1` the result is the Hermitian weight-basis matrix of the
    /// operator (monomial `z^k` ↔ weight `m = s − k`); off the circle it is
    /// the same change of basis, generally non-Hermitian.
    pub fn hermitized(&self) -> CMatrix {
        let n = self.dim();
        let two_s = n - 1;
        let mut d = vec![1.0f64; n];
        for k in 0..two_s {
            d[k + 1] = d[k] * ((k + 1) as f64 / (two_s - k) as f64).sqrt();
        }
        CMatrix::from_fn(n, n, |r, col| self.m[(r, col)] * (d[r] / d[col]))
    }

    /// Eigenvalues, sorted by real part then imaginary part.
    ///
    /// On the unit circle the hermitized matrix passes the symmetry check and
    /// the Jacobi path returns real eigenvalues; otherwise the spectrum falls
    /// back to the characteristic polynomial of the (balanced) matrix.
    pub fn spectrum(&self) -> Result<Vec<Complex>, BargmannError> {
        let h = self.hermitized();
        match hermitian_eigen(&h) {
            Ok((vals, _)) => Ok(vals.into_iter().map(|v| c(v, 0.0)).collect()),
            Err(LinalgError::NotHermitian { .. }) => {
                let mut roots = poly_roots(&char_poly(&h)?)?;
                roots.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
                Ok(roots)
            }
            Err(e) => Err(e.into()),
        }
    }
}

/// Assembles the realized operator on the monomial basis.
///
/// Band contributions that would land above degree `2s` are dropped; they are
/// identically zero (see [`degree_overflow`]), so the drop loses nothing.
/// Rows below degree zero never arise — their `k(k−1)` or `k` prefactors
/// vanish first.
pub fn bargmann_matrix(p: &HeunParams) -> BargmannMatrix {
    let bands = BandCoeffs::new(p);
    let dim = p.spin.dim();
    let mut m = CMatrix::zeros(dim, dim);
    for k in 0..dim {
        let kf = k as f64;
        for (pow, coeff) in bands.dd.iter().enumerate() {
            if let Some(row) = (k + pow).checked_sub(2) {
                if row < dim {
                    m[(row, k)] += *coeff * (kf * (kf - 1.0));
                }
            }
        }
        for (pow, coeff) in bands.d.iter().enumerate() {
            if let Some(row) = (k + pow).checked_sub(1) {
                if row < dim {
                    m[(row, k)] += *coeff * kf;
                }
            }
        }
        for (pow, coeff) in bands.v.iter().enumerate() {
            let row = k + pow;
            if row < dim {
                m[(row, k)] += *coeff;
            }
        }
    }
    BargmannMatrix { m }
}

/// The would-be coefficients beyond degree `2s` in the images of the top
/// monomials: `z^{2s} → z^{2s+2}`, `z^{2s} → z^{2s+1}`, `z^{2s−1} → z^{2s+1}`.
///
/// All three vanish identically — `c₄k(k−1) + q₃k + p₂ = 2c₄(k−2s)(k−s+½)·…`
/// factors through `k = 2s` and `k = 2s − 1`, and `q₂·2s + p₁ = 0` — which is
/// what makes the degree-`2s` module invariant. Returned rather than asserted
/// so the truncation is checkable at any parameter point. (For `2s = 0` the
/// third entry has no source monomial and is reported as zero.)
pub fn degree_overflow(p: &HeunParams) -> [Complex; 3] {
    let b = BandCoeffs::new(p);
    let quad = |k: f64| b.dd[4] * (k * (k - 1.0)) + b.d[3] * k + b.v[2];
    let top = p.spin.two_s as f64;
    let second = if p.spin.two_s == 0 {
        Complex::ZERO
    } else {
        quad(top - 1.0)
    };
    [quad(top), b.d[2] * top + b.v[1], second]
}

/// Parity of an eigenfunction under `z → −z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// Coefficient record of the reduced second-order equation on the slice
/// `ρ₁ = ρ₂ = 0`, in the folded variable `y = a²z²`:
///
/// ```text
/// ψ″ + [ ½/y + (1−2s−iρ₃)/2/(y−1) + (1−2s+iρ₃)/2/(y−a²) ]·ψ′
///     + (v₁y + v₀)/(4y(y−1)(y−a²))·ψ  =  w·σ/(4y(y−1)(y−a²))·ψ .
/// ```
///
/// Three regular singular points in the finite plane plus `∞` — the Heun
/// class — against the five of the unreduced realization; the operator
/// eigenvalue `w` enters only through the accessory term `w·σ`. The even
/// sector takes `ψ = h(y)` analytic at the origin, the odd sector
/// `ψ = √y·h(y)` (local exponent `½`, forced by the `½/y` weight).
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedOde {
    /// Finite regular singular points `[0, 1, a²]`.
    pub singular_points: [Complex; 3],
    /// Residues of the `ψ′` coefficient at those points.
    pub prime_weights: [Complex; 3],
    /// Ascending coefficients `[v₀, v₁]` of the potential numerator
    /// `v₁y + v₀ = 2(2s−1)s·y + isρ₃(1−a²) + s(a²+1)`.
    pub potential: [Complex; 2],
    /// Accessory scale `σ = i(1−a²)` multiplying the eigenvalue.
    pub eigen_scale: Complex,
}

/// One eigenpair of the reduced equation.
#[derive(Debug, Clone)]
pub struct SectorSolution {
    /// Operator eigenvalue (the accessory parameter at which polynomial
    /// solutions exist).
    pub w: Complex,
    /// Sector under `z → −z`.
    pub parity: Parity,
    /// Polynomial factor: `ψ = h(y)` (even) or `ψ = √y·h(y)` (odd),
    /// normalised to `h(0) = 1`.
    pub h: CPolynomial,
    /// Worst relative pointwise defect of the multiplied-through equation
    /// over the probe contour.
    pub ode_residual: f64,
}

/// Outcome of [`heun_ode_reduction`]: the equation data and all `2s + 1`
/// eigenpairs, both sectors merged.
#[derive(Debug, Clone)]
pub struct HeunReduction {
    pub ode: ReducedOde,
    /// Sorted by eigenvalue (real part, then imaginary part).
    pub solutions: Vec<SectorSolution>,
}

/// Tridiagonal matrix of the folded operator on the sector basis
/// `{y^α, y^{α+1}, …}`, `α = 0` (even) or `α = ½` (odd).
///
/// Substituting `z² = y/a²` in the five-band realization leaves one
/// tridiagonal block per parity; the odd block is the even one with every
/// index shifted by the Frobenius exponent of the `√y` prefactor, so a
/// single entry table serves both. The sub-diagonal factors as
/// `κ(j−s)(j−s+½)` with `κ = 4i/(a²−1)`: it vanishes exactly at the top of
/// each sector (closing the truncation for integer and half-integer `s`
/// alike) and at no interior index.
fn sector_matrix(p: &HeunParams, parity: Parity) -> CMatrix {
    let b = BandCoeffs::new(p);
    let a2 = p.a * p.a;
    let kappa = c(0.0, 4.0) / (a2 - 1.0);
    let q1 = b.d[1];
    let q3 = b.d[3] / a2;
    let p2 = b.v[2] / a2;
    let p0 = b.v[0];
    let two_s = p.spin.two_s as usize;
    let (n, alpha) = match parity {
        Parity::Even => (two_s / 2 + 1, 0.0),
        Parity::Odd => ((two_s + 1) / 2, 0.5),
    };
    CMatrix::from_fn(n, n, |r, col| {
        let j = col as f64 + alpha;
        let jj = j * (j - 1.0);
        if r == col + 1 {
            kappa * jj + (kappa / 2.0 + q3 * 2.0) * j + p2
        } else if r == col {
            -kappa * (a2 + 1.0) * jj + (q1 * 2.0 - kappa * (a2 + 1.0) / 2.0) * j + p0
        } else if r + 1 == col {
            kappa * a2 * (j * (j - 0.5))
        } else {
            Complex::ZERO
        }
    })
}

/// Eigenvector of a tridiagonal sector matrix by forward substitution from
/// `b₀ = 1`.
///
/// The super-diagonal entries `κa²j(j−½)`, `j ≥ 1`, never vanish, and a
/// tridiagonal eigenvector with `b₀ = 0` would be forced to zero identically,
/// so the normalisation is always admissible.
fn sector_eigenvector(t: &CMatrix, w: Complex) -> Result<CPolynomial, LinalgError> {
    let n = t.rows();
    let mut b = vec![Complex::ZERO; n];
    b[0] = Complex::ONE;
    for col in 0..n - 1 {
        let mut acc = (t[(col, col)] - w) * b[col];
        if col > 0 {
            acc += t[(col, col - 1)] * b[col - 1];
        }
        let sup = t[(col, col + 1)];
        if sup.norm() == 0.0 {
            return Err(LinalgError::SingularMatrix { pivot: col });
        }
        b[col + 1] = -acc / sup;
    }
    CPolynomial::new(b)
}

/// Worst relative pointwise defect of the reduced equation, cleared of
/// denominators.
///
/// With `Q = 4y(y−1)(y−a²)`, `B` the cleared `ψ′` coefficient and
/// `V − σw` the cleared potential, the even sector checks
/// `Q·h″ + B·h′ + (V−σw)·h` and the odd sector the same identity at
/// `ψ = √y·h` with `√y` divided out:
/// `(y−1)(y−a²)(4y²h″ + 4yh′ − h) + B·(yh′ + h/2) + (V−σw)·y·h`.
/// Both are polynomial identities, so the probe points need no relation to
/// the singular locus.
fn reduced_residual(p: &HeunParams, w: Complex, h: &CPolynomial, parity: Parity) -> f64 {
    let a2 = p.a * p.a;
    let s = p.spin.s();
    let wplus = c(1.0 - 2.0 * s, p.rho3);
    let wminus = c(1.0 - 2.0 * s, -p.rho3);
    let v1 = c(2.0 * (2.0 * s - 1.0) * s, 0.0);
    let v0 = c(0.0, s * p.rho3) * (1.0 - a2) + (a2 + 1.0) * s;
    let sigma_w = Complex::i() * (1.0 - a2) * w;
    let h1 = h.derivative();
    let h2 = h1.derivative();
    let mut worst = 0.0f64;
    for t in 0..ODE_SAMPLE_POINTS {
        let y = c(
            -1.5 + 3.2 * t as f64 / (ODE_SAMPLE_POINTS - 1) as f64,
            0.4,
        );
        let bracket =
            2.0 * ((y - 1.0) * (y - a2) + wminus * y * (y - a2) + wplus * y * (y - 1.0));
        let potential = v1 * y + v0 - sigma_w;
        let (second, first, zeroth) = match parity {
            Parity::Even => (
                4.0 * y * (y - 1.0) * (y - a2) * h2.eval(y),
                bracket * h1.eval(y),
                potential * h.eval(y),
            ),
            Parity::Odd => (
                (y - 1.0) * (y - a2) * (4.0 * y * y * h2.eval(y) + 4.0 * y * h1.eval(y) - h.eval(y)),
                bracket * (y * h1.eval(y) + h.eval(y) / 2.0),
                potential * y * h.eval(y),
            ),
        };
        let defect = (second + first + zeroth).norm();
        let scale = second.norm() + first.norm() + zeroth.norm();
        worst = worst.max(defect / scale.max(1.0));
    }
    worst
}

/// Reduces the realized operator to the parity-folded Heun-class equation
/// and solves both sectors.
///
/// Requires `ρ₁ = ρ₂ = 0` exactly — the reduction is an identity, not an
/// approximation, so nonzero values (however small) are refused rather than
/// silently truncated. `ρ₃` is unrestricted. A `ρ₅` override shifts every
/// eigenvalue by a constant; the equation data is reported for the derived
/// `ρ₅` (zero on this slice) and the shift is restored on each reported `w`.
pub fn heun_ode_reduction(p: &HeunParams) -> Result<HeunReduction, BargmannError> {
    if p.rho1 != 0.0 || p.rho2 != 0.0 {
        return Err(BargmannError::NotReduced {
            rho1: p.rho1,
            rho2: p.rho2,
        });
    }
    let base = HeunParams {
        rho5_override: None,
        ..*p
    };
    let shift = p.rho5() - base.rho5();
    let a2 = p.a * p.a;
    let s = p.spin.s();
    let ode = ReducedOde {
        singular_points: [Complex::ZERO, Complex::ONE, a2],
        prime_weights: [
            c(0.5, 0.0),
            c((1.0 - 2.0 * s) / 2.0, -p.rho3 / 2.0),
            c((1.0 - 2.0 * s) / 2.0, p.rho3 / 2.0),
        ],
        potential: [
            c(0.0, s * p.rho3) * (1.0 - a2) + (a2 + 1.0) * s,
            c(2.0 * (2.0 * s - 1.0) * s, 0.0),
        ],
        eigen_scale: Complex::i() * (1.0 - a2),
    };
    let mut solutions = Vec::with_capacity(p.spin.dim());
    for parity in [Parity::Even, Parity::Odd] {
        let t = sector_matrix(&base, parity);
        if t.rows() == 0 {
            continue;
        }
        for w in poly_roots(&char_poly(&t)?)? {
            let h = sector_eigenvector(&t, w)?;
            let ode_residual = reduced_residual(&base, w, &h, parity);
            solutions.push(SectorSolution {
                w: w + shift,
                parity,
                h,
                ode_residual,
            });
        }
    }
    solutions.sort_by(|x, y| x.w.re.total_cmp(&y.w.re).then(x.w.im.total_cmp(&y.w.im)));
    Ok(HeunReduction { ode, solutions })
}
