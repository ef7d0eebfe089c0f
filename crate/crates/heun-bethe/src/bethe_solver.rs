//! Bethe-ansatz route to the spectrum of the algebraic Heun operator.
//!
//! Nothing here diagonalises a matrix. The eigenvalue problem for the
//! transfer matrix of [`crate::gaudin`] is reduced to polynomial data:
//!
//! * acting with `t(u)` on a string `B(z₁,1)⋯B(z_M,M)·ω_s` closes once the
//!   roots `z_k` satisfy a set of algebraic Bethe equations; the symmetrised
//!   variables `Z_i = ¼(2 − z_i − 1/z_i)` are the roots of a polynomial
//!   `y_μ(X) = X^M + Σ_{n<M} c_n(μ)Xⁿ` solving a Heun-type differential
//!   equation with accessory parameter `μ`;
//! * the coefficients `c_n(μ)` obey a three-term recurrence in `n` whose
//!   closure condition is a characteristic polynomial `P(μ)` of degree
//!   `M + 1`; its roots enumerate the spectrum;
//! * the operator eigenvalue is recovered from the transfer eigenvalue
//!   `Λ(u)` through `w = a/(8i(1−a²))·Λ′(0)`, and cross-checked against two
//!   independent closed forms (one a sum over the `Z_i`, one affine in `μ`).
//!
//! Two regimes are implemented. With the full string length `M = 2s` the
//! Bethe equations carry an inhomogeneous right-hand side proportional to
//! `|γ_{2s+1}|²` and enumerate the complete spectrum for generic parameters.
//! When the parameters sit on the truncation grid
//!
//! ```text
//! 𝓜 = s − ½ + i(a²−1)ρ₁/(4a) + (a²+1)ρ₂/(4a) ∈ {0, 1, …, 2s−1} ,   ρ₃ = 0 ,
//! ```
//!
//! the right-hand side can be dropped: the spectrum splits into a
//! highest-weight branch of `𝓜 + 1` homogeneous solutions and a
//! lowest-weight branch of `2s − 𝓜` solutions produced by the same machinery
//! at `(ρ₁, ρ₂) → (−ρ₁, −ρ₂)` (a rotation by `π` about the 3-axis, so the
//! flipped eigenvalues are eigenvalues of the original operator).

use crate::gaudin::{GaudinError, RepScalars};
use crate::heun_operators::{
    build_e, build_w, HeunOperatorError, HeunParams, Spectrum, SpectrumMethod,
};
use crate::linalg_core::{
    c, char_poly, hermitian_eigen, poly_roots, CPolynomial, Complex, LinalgError,
};
use crate::spin_rep::{build_spin_rep, Spin};

/// Repeated accessory parameters are flagged when the minimal pairwise `μ`
/// gap drops below this.
pub const MU_GAP_FLAG: f64 = 1e-8;

/// A solve fails hard when the worst on-shell Bethe-equation defect exceeds
/// this.
pub const BETHE_RESIDUAL_FAIL: f64 = 1e-6;

/// Root configurations closer than this to the singular set are rejected.
pub const SINGULAR_GUARD: f64 = 1e-8;

/// Largest acceptable gap between the last two Richardson diagonals when
/// extracting `Λ′(0)`, measured on the scale of `w`.
pub const EXTRAPOLATION_TOL: f64 = 1e-6;

/// Largest distance from the truncation grid at which the homogeneous
/// machinery is allowed to run.
pub const HOMOG_DEFECT_TOL: f64 = 1e-9;

const RHO3_TOL: f64 = 1e-12;
const DEGENERATE_PIVOT: f64 = 1e-12;
const CONFLUENT_FLOOR: f64 = 1e-10;
const EXTRAP_NODE_BASE: f64 = 1e-2;
const EXTRAP_LEVELS: usize = 6;
const ODE_SAMPLE_POINTS: usize = 20;

/// Errors from the Bethe-ansatz solvers.
#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum BetheError {
    /// A pivot of the three-term recurrence vanished, so the downward solve
    /// is ill-posed at this index.
    #[error("recurrence coefficient {coefficient} degenerates at n = {n}")]
    DegenerateRecurrence { n: u32, coefficient: &'static str },
    /// An on-shell Bethe-equation defect exceeded the hard failure threshold.
    #[error("Bethe-equation residual {residual:.3e} exceeds {tolerance:.3e}")]
    ResidualFailure { residual: f64, tolerance: f64 },
    /// The Richardson table for `Λ′(0)` did not settle.
    #[error("Λ′(0) extrapolation unstable: last two diagonals differ by {delta:.3e}")]
    ExtrapolationUnstable { delta: f64 },
    /// A root configuration violated one of the non-singularity guards.
    #[error("Bethe root z = {z} violates {constraint}")]
    SingularConfiguration { constraint: &'static str, z: Complex },
    /// A branch produced the wrong number of solutions.
    #[error("branch produced {got} solutions, expected {expected}")]
    BranchCountMismatch { expected: usize, got: usize },
    /// The homogeneous machinery was invoked off the truncation grid.
    #[error("parameters sit {defect:.3e} away from the homogeneous truncation grid")]
    NotHomogeneous { defect: f64 },
    /// An operator construction rejected the parameters.
    #[error(transparent)]
    Operator(#[from] HeunOperatorError),
    /// A Gaudin-layer evaluation failed.
    #[error(transparent)]
    Gaudin(#[from] GaudinError),
    /// An underlying dense-linear-algebra operation failed.
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Which family of Bethe equations a solution belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetheRegime {
    /// Full string `M = 2s` with the inhomogeneous right-hand side.
    Inhomogeneous,
    /// Homogeneous equations on the highest-weight branch (`𝓜` roots).
    HomogeneousHighest,
    /// Homogeneous equations on the lowest-weight branch (`2s − 1 − 𝓜`
    /// roots, machinery run at flipped `(ρ₁, ρ₂)`).
    HomogeneousLowest,
}

impl std::fmt::Display for BetheRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BetheRegime::Inhomogeneous => "inhomogeneous",
            BetheRegime::HomogeneousHighest => "homogeneous-highest",
            BetheRegime::HomogeneousLowest => "homogeneous-lowest",
        })
    }
}

/// `γ_n·γ_n*` continued analytically in the parameters:
/// `((n − s − ½) − ξ)² + ρ₃²/4` with `ξ = i(a²−1)ρ₁/(4a) + (a²+1)ρ₂/(4a)`.
///
/// For unimodular `a` (real `ξ`) this is the honest `|γ_n|²`; for the real-`a`
/// continuation it is only used at `ρ₁ = ρ₂ = 0`, where the two notions
/// coincide as well.
fn gamma_sq(a: Complex, s: f64, rho1: f64, rho2: f64, rho3: f64, n: i64) -> Complex {
    let xi = (c(0.0, 1.0) * (a * a - 1.0) * rho1 + (a * a + 1.0) * rho2) / (4.0 * a);
    let base = -xi + (n as f64 - s - 0.5);
    base * base + rho3 * rho3 / 4.0
}

fn binom(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    let mut out = 1.0;
    for j in 0..k {
        out = out * (n - j) as f64 / (j + 1) as f64;
    }
    out
}

/// Coefficients of the (regular or inhomogeneous) Heun-type equation the
/// auxiliary polynomial `y_μ` satisfies, in multiplied-through form:
///
/// ```text
/// X(X−1)(X−A)y″ + [a₀(X−1)(X−A) + a₁X(X−A) + a₂X(X−1)]y′
///               + a₃(X−μ)y = g·(X−A)^{degree+1} ,
/// ```
///
/// with `g = |γ_{2s+1}|²` and `degree = 2s` in the inhomogeneous regime,
/// `g = 0` and `degree = 𝓜` (so `a₃ = 𝓜²`) in the homogeneous one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeunODECoeffs {
    /// The movable regular singular point `A = −(a−1)²/(4a)`.
    pub big_a: Complex,
    pub a0: Complex,
    pub a1: Complex,
    pub a2: Complex,
    pub a3: Complex,
    /// Strength `g` of the polynomial right-hand side.
    pub inhom_strength: f64,
    /// Degree of `y_μ`; the characteristic polynomial has degree one more.
    pub degree: u32,
}

impl HeunODECoeffs {
    /// Inhomogeneous regime, `M = 2s`.
    pub fn inhomogeneous(p: &HeunParams) -> Self {
        let a = p.a;
        let s = p.spin.s();
        let two_s = p.spin.two_s;
        let i = c(0.0, 1.0);
        let rho1_term = i * (a * a - 1.0) * p.rho1 / (4.0 * a);
        let a0 = -rho1_term - (a - 1.0) * (a - 1.0) * p.rho2 / (4.0 * a) + 1.0;
        let a1 = -rho1_term - (a + 1.0) * (a + 1.0) * p.rho2 / (4.0 * a) + 1.0;
        let a2 = c(-(two_s as f64), 0.0);
        let g = gamma_sq(a, s, p.rho1, p.rho2, p.rho3, two_s as i64 + 1);
        let a3 = g - (a0 + a1 + a2 + (two_s as f64 - 1.0)) * (two_s as f64);
        Self {
            big_a: -(a - 1.0) * (a - 1.0) / (4.0 * a),
            a0,
            a1,
            a2,
            a3,
            inhom_strength: g.re,
            degree: two_s,
        }
    }

    /// Homogeneous regime with `𝓜 = m` Bethe roots; `p` is the parameter set
    /// the branch actually runs at (already flipped for the lowest branch).
    pub fn homogeneous(p: &HeunParams, m: u32) -> Self {
        let a = p.a;
        let s = p.spin.s();
        let mf = m as f64;
        Self {
            big_a: -(a - 1.0) * (a - 1.0) / (4.0 * a),
            a0: c(s + 0.5 - mf + p.rho2 / 2.0, 0.0),
            a1: c(s + 0.5 - mf - p.rho2 / 2.0, 0.0),
            a2: c(-2.0 * s, 0.0),
            a3: c(mf * mf, 0.0),
            inhom_strength: 0.0,
            degree: m,
        }
    }
}

/// The characteristic polynomial `P(μ)` together with the coefficient
/// polynomials `c_n(μ)` of `y_μ` (index `n`, with `c[degree] ≡ 1`).
#[derive(Debug, Clone)]
pub struct CharPoly {
    pub p: CPolynomial,
    pub c: Vec<CPolynomial>,
}

/// Multiplication by `X` (coefficient shift).
fn shift_up(p: &CPolynomial) -> CPolynomial {
    if p.is_zero() {
        return CPolynomial::zero();
    }
    let mut coeffs = vec![Complex::ZERO];
    coeffs.extend_from_slice(p.coeffs());
    CPolynomial::new(coeffs).expect("shifted coefficients stay finite")
}

/// Downward solve of the three-term recurrence
///
/// ```text
/// A(n+1)(n+a₀)c_{n+1} − n[(1+A)(a₀+n−1) + a₁A + a₂]c_n + w_n c_{n−1}
///     = μa₃c_n + g·binom(degree+1, n)(−A)^{degree+1−n} ,    0 ≤ n ≤ degree+1,
/// ```
///
/// normalised by `c_degree = 1`, `c_{degree+1} = c_{degree+2} = 0`. Rows
/// `n = degree … 1` determine `c_{n−1}` (division by the pairing weight
/// `w_n`); the row `n = 0` cannot be solved further and its defect **is** the
/// characteristic polynomial `P(μ)`. The row `n = degree+1` reduces to the
/// identity `w_{degree+1} = g` and is checked coefficientwise in the tests.
fn char_poly_from(
    co: &HeunODECoeffs,
    pivot: impl Fn(u32) -> Complex,
    inhom: impl Fn(u32) -> Complex,
) -> Result<CharPoly, BetheError> {
    let deg = co.degree as usize;
    let mut cns = vec![CPolynomial::zero(); deg + 1];
    cns[deg] = CPolynomial::constant(Complex::ONE);
    for n in (1..=deg as u32).rev() {
        let nf = n as f64;
        // The upward coefficient A(n+1)(n+a₀) multiplies the already-known
        // c_{n+1}; it may vanish (resonant integer exponent, a₀ ∈ −ℕ)
        // without harming the downward solve, whose only divisions are by
        // the pairing weights.
        let up = co.big_a * (nf + 1.0) * (co.a0 + nf);
        let w_n = pivot(n);
        if w_n.norm() < DEGENERATE_PIVOT {
            return Err(BetheError::DegenerateRecurrence {
                n,
                coefficient: "pairing weight w_n",
            });
        }
        let mid = ((co.big_a + 1.0) * (co.a0 + (nf - 1.0)) + co.a1 * co.big_a + co.a2) * nf;
        let mut rhs = shift_up(&cns[n as usize]).scale(co.a3);
        rhs = &rhs + &cns[n as usize].scale(mid);
        rhs = &rhs + &CPolynomial::constant(inhom(n));
        if n as usize + 1 <= deg {
            rhs = &rhs - &cns[n as usize + 1].scale(up);
        }
        cns[n as usize - 1] = rhs.scale(w_n.finv());
    }
    let p = &(&cns[1].scale(co.big_a * co.a0) - &shift_up(&cns[0]).scale(co.a3))
        - &CPolynomial::constant(inhom(0));
    Ok(CharPoly { p, c: cns })
}

/// Characteristic polynomial for the inhomogeneous regime `M = 2s`:
/// degree `2s + 1` in `μ`, pairing weights `w_n = |γ_n|²`.
pub fn inhom_char_poly(p: &HeunParams) -> Result<(HeunODECoeffs, CharPoly), BetheError> {
    let co = HeunODECoeffs::inhomogeneous(p);
    let s = p.spin.s();
    let (a, r1, r2, r3) = (p.a, p.rho1, p.rho2, p.rho3);
    let g = co.inhom_strength;
    let top = co.degree + 1;
    let cp = char_poly_from(
        &co,
        |n| gamma_sq(a, s, r1, r2, r3, n as i64),
        |n| (-co.big_a).powi((top - n) as i32).scale(g * binom(top, n)),
    )?;
    Ok((co, cp))
}

/// Characteristic polynomial for one homogeneous branch with `m` roots:
/// degree `m + 1` in `μ`, pairing weights `w_n = (m+1−n)²`, no right-hand
/// side. `p` must already be the branch's effective parameter set.
pub fn homog_char_poly(p: &HeunParams, m: u32) -> Result<(HeunODECoeffs, CharPoly), BetheError> {
    let co = HeunODECoeffs::homogeneous(p, m);
    let cp = char_poly_from(
        &co,
        |n| c(((m + 1 - n) as f64).powi(2), 0.0),
        |_| Complex::ZERO,
    )?;
    Ok((co, cp))
}

// --- On-shell machinery ------------------------------------------------------

/// Scalar data shared by the Bethe equations and the transfer eigenvalue for
/// one regime: the weight scalars (flipped for the lowest branch) and the
/// inhomogeneity `|γ_{2s+1}|²` (zero in the homogeneous regimes).
struct BetheKernel {
    scal: RepScalars,
    a: Complex,
    rho3: f64,
    g2_top: Complex,
    inhom: bool,
}

impl BetheKernel {
    fn new(p: &HeunParams, regime: BetheRegime) -> Self {
        let flip = regime == BetheRegime::HomogeneousLowest;
        let scal = if flip {
            RepScalars::new(p).flipped()
        } else {
            RepScalars::new(p)
        };
        let sgn = if flip { -1.0 } else { 1.0 };
        let inhom = regime == BetheRegime::Inhomogeneous;
        let g2_top = gamma_sq(
            p.a,
            p.spin.s(),
            sgn * p.rho1,
            sgn * p.rho2,
            p.rho3,
            p.spin.two_s as i64 + 1,
        );
        Self {
            scal,
            a: p.a,
            rho3: p.rho3,
            g2_top,
            inhom,
        }
    }

    /// The string-free part of the transfer eigenvalue,
    /// `λ(u) = 2ρ₃² + 2G² + 2 + 4uG′ + 4G(u²+1)/(u²−1)`.
    fn lambda(&self, u: Complex) -> Complex {
        let g = self.scal.big_g(u);
        let ratio = (u * u + 1.0) / (u * u - 1.0);
        2.0 * g * g + 4.0 * u * self.scal.big_g_prime(u) + 4.0 * ratio * g
            + (2.0 * self.rho3 * self.rho3 + 2.0)
    }

    fn f_k(&self, u: Complex, zk: Complex) -> Complex {
        16.0 * zk * (u * u - 1.0) / ((u - zk) * (u * zk - 1.0))
    }

    /// Transfer eigenvalue `Λ(u)` on the string with roots `z`. The pairwise
    /// cross term collapses to `Σ_{k<p} F_kF_p/16 = [(ΣF)² − ΣF²]/32`, which
    /// keeps every summand regular at `u = 0` (no large cancellations near
    /// the extraction point).
    fn transfer_eigenvalue(&self, u: Complex, z: &[Complex]) -> Complex {
        let g = self.scal.big_g(u);
        let ratio = (u * u + 1.0) / (u * u - 1.0);
        let fs: Vec<Complex> = z.iter().map(|&zk| self.f_k(u, zk)).collect();
        let sum_f: Complex = fs.iter().sum();
        let sum_f2: Complex = fs.iter().map(|f| f * f).sum();
        let mut lam = self.lambda(u)
            + (g.unscale(2.0) + ratio) * sum_f
            + (sum_f * sum_f - sum_f2).unscale(32.0);
        if self.inhom {
            let prod: Complex = z
                .iter()
                .map(|&zp| (u - self.a) * (self.a * u - 1.0) * zp
                    / (self.a * (u - zp) * (u * zp - 1.0)))
                .product();
            lam -= self.g2_top.scale(8.0) * prod;
        }
        lam
    }

    /// Left-hand side of the `k`-th Bethe equation,
    /// `𝒰_k = G(z_k)/2 + (z_k²+1)/(z_k²−1) + Σ_{p≠k} z_p(z_k²−1)/((z_k−z_p)(z_kz_p−1))`.
    fn u_k(&self, z: &[Complex], k: usize) -> Complex {
        let zk = z[k];
        let mut out = self.scal.big_g(zk).unscale(2.0) + (zk * zk + 1.0) / (zk * zk - 1.0);
        for (p, &zp) in z.iter().enumerate() {
            if p != k {
                out += zp * (zk * zk - 1.0) / ((zk - zp) * (zk * zp - 1.0));
            }
        }
        out
    }

    /// Right-hand side of the `k`-th Bethe equation; zero in the homogeneous
    /// regimes. The factor `(z_k−a)(az_k−1)/a` enters once per root *including*
    /// `p = k`: the equation is the vanishing residue of `Λ(u)` at `u = z_k`,
    /// and the `p = k` pole of the driving product supplies the extra bracket.
    fn rhs_k(&self, z: &[Complex], k: usize) -> Complex {
        if !self.inhom {
            return Complex::ZERO;
        }
        let zk = z[k];
        let bracket = (zk - self.a) * (self.a * zk - 1.0) / self.a;
        let mut out = self.g2_top * bracket / (2.0 * (zk * zk - 1.0));
        for (p, &zp) in z.iter().enumerate() {
            if p != k {
                out *= bracket * zp / ((zk - zp) * (zk * zp - 1.0));
            }
        }
        out
    }

    fn defect_k(&self, z: &[Complex], k: usize) -> f64 {
        let d = (self.u_k(z, k) - self.rhs_k(z, k)).norm();
        if d.is_finite() {
            d
        } else {
            f64::INFINITY
        }
    }
}

fn guard_roots(z: &[Complex], p: &HeunParams) -> Result<(), BetheError> {
    let a_inv = p.a.finv();
    for (i, &zi) in z.iter().enumerate() {
        let singles: [(f64, &'static str); 5] = [
            (zi.norm(), "z ≠ 0"),
            ((zi - 1.0).norm(), "z ≠ ±1"),
            ((zi + 1.0).norm(), "z ≠ ±1"),
            ((zi - p.a).norm(), "z ≠ a"),
            ((zi - a_inv).norm(), "z ≠ 1/a"),
        ];
        for (d, constraint) in singles {
            if d < SINGULAR_GUARD {
                return Err(BetheError::SingularConfiguration { constraint, z: zi });
            }
        }
        for &zj in z.iter().skip(i + 1) {
            if (zi - zj).norm() < SINGULAR_GUARD {
                return Err(BetheError::SingularConfiguration {
                    constraint: "z_k ≠ z_p (simple roots)",
                    z: zi,
                });
            }
            if (zi * zj - 1.0).norm() < SINGULAR_GUARD {
                return Err(BetheError::SingularConfiguration {
                    constraint: "z_k·z_p ≠ 1",
                    z: zi,
                });
            }
        }
    }
    Ok(())
}

/// Per-root Bethe-equation defects `|𝒰_k − rhs_k|` for the given regime
/// (the right-hand side being present only in the inhomogeneous one, and the
/// lowest-branch scalars being evaluated at flipped `(ρ₁, ρ₂)`).
pub fn bethe_residual(
    z: &[Complex],
    p: &HeunParams,
    regime: BetheRegime,
) -> Result<Vec<f64>, BetheError> {
    guard_roots(z, p)?;
    let kernel = BetheKernel::new(p, regime);
    Ok((0..z.len()).map(|k| kernel.defect_k(z, k)).collect())
}

// --- Eigenvalue extraction ---------------------------------------------------

/// Outcome of [`eigenvalue_w`]: the eigenvalue plus the gaps to the closed
/// cross-check forms (absent when a form does not exist for the regime, e.g.
/// the `μ`-form on a rootless branch).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenvalueReport {
    pub w: Complex,
    /// Gap to the closed form written as a sum over the `Z_i`.
    pub root_sum_gap: Option<f64>,
    /// Gap to the closed form affine in the accessory parameter `μ`.
    pub mu_form_gap: Option<f64>,
    /// Distance between the last two Richardson diagonals, on the scale of
    /// `w`; the stability measure gated by [`EXTRAPOLATION_TOL`].
    pub extrapolation_delta: f64,
}

/// Richardson/Neville extrapolation to zero over nodes halving at each level:
/// `T_{k,j} = (2^j T_{k,j−1} − T_{k−1,j−1})/(2^j − 1)`. Returns the deepest
/// diagonal entry and its distance to the previous one.
fn neville_to_zero(samples: &[Complex]) -> (Complex, f64) {
    let n = samples.len();
    let mut t = samples.to_vec();
    for j in 1..n {
        let pow = 2f64.powi(j as i32);
        for k in (j..n).rev() {
            t[k] = (t[k].scale(pow) - t[k - 1]).unscale(pow - 1.0);
        }
    }
    (t[n - 1], (t[n - 1] - t[n - 2]).norm())
}

/// Operator eigenvalue from the transfer eigenvalue: `w = a/(8i(1−a²))·Λ′(0)`.
///
/// `Λ(0) = 0` holds identically on both regimes, but it is still subtracted
/// explicitly so that parameters merely *near* the homogeneous grid cannot
/// leak a spurious `1/u` term into the extrapolation. The derivative comes
/// from a six-level Richardson table on `f(u) = (Λ(u) − Λ(0))/u` at
/// `u_j = 10⁻²/2^j`; instability beyond [`EXTRAPOLATION_TOL`] is an error.
///
/// `mu` is only needed for the `μ`-form cross-check and may be omitted. For
/// the inhomogeneous regime `z` must hold all `2s` roots. A `ρ₅` override on
/// `p` shifts `w` (the transfer machinery always sees the derived `ρ₅`).
pub fn eigenvalue_w(
    z: &[Complex],
    mu: Option<Complex>,
    regime: BetheRegime,
    p: &HeunParams,
) -> Result<EigenvalueReport, BetheError> {
    if regime == BetheRegime::Inhomogeneous && z.len() != p.spin.two_s as usize {
        return Err(BetheError::BranchCountMismatch {
            expected: p.spin.two_s as usize,
            got: z.len(),
        });
    }
    let kernel = BetheKernel::new(p, regime);
    let lam0 = kernel.transfer_eigenvalue(Complex::ZERO, z);
    // `Λ(u)` has fixed poles at `u = a` and `u = 1/a` (besides `±1`); keep the
    // node ring well inside the nearest one so the Richardson table converges
    // even when `a` sits close to the origin (real-`a` parameter families).
    let pole_scale = p.a.norm().min(p.a.norm().recip()).min(1.0);
    let samples: Vec<Complex> = (0..EXTRAP_LEVELS)
        .map(|j| {
            let u = EXTRAP_NODE_BASE * pole_scale / 2f64.powi(j as i32);
            (kernel.transfer_eigenvalue(c(u, 0.0), z) - lam0).unscale(u)
        })
        .collect();
    let (lam_prime, delta_raw) = neville_to_zero(&samples);
    let a = p.a;
    let pref = a / (c(0.0, 8.0) * (-a * a + 1.0));
    let delta = delta_raw * pref.norm();
    if delta > EXTRAPOLATION_TOL {
        return Err(BetheError::ExtrapolationUnstable { delta });
    }
    let w_core = pref * lam_prime;

    let i = c(0.0, 1.0);
    let s = p.spin.s();
    let sum_z: Complex = z.iter().map(|&zk| (-zk - zk.finv() + 2.0).unscale(4.0)).sum();
    let (root_sum_gap, mu_form_gap) = match regime {
        BetheRegime::Inhomogeneous => {
            let g2s = gamma_sq(a, s, p.rho1, p.rho2, p.rho3, p.spin.two_s as i64);
            let mu_pref = 4.0 * a * i / (-a * a + 1.0);
            let w_const = 2.0 * i * s * g2s * (a - 1.0) / (a + 1.0)
                + i * (a * a + 1.0) * (4.0 * s * s - p.rho2 * p.rho2) / (2.0 * (a * a - 1.0))
                + ((a * a + 1.0) * (s * p.rho1) - i * (a * a - 1.0) * (s * p.rho2)) / (2.0 * a)
                + p.rho1 * p.rho2 / 2.0;
            let w_roots = w_const - mu_pref * g2s * sum_z;
            // The μ-form is the same closed form with `ΣZ = −c_{2s−1}(μ)`
            // substituted from the `n = 2s` recurrence row: `|γ_{2s}|²` cancels
            // against the prefactor, leaving an exact affine function of `μ`.
            let co = HeunODECoeffs::inhomogeneous(p);
            let two_s = p.spin.two_s as f64;
            let w_mu = mu.map(|m| {
                let row = co.a3 * m
                    - co.big_a.scale((two_s + 1.0) * co.inhom_strength)
                    + ((co.big_a + 1.0) * (co.a0 + (two_s - 1.0))
                        + co.a1 * co.big_a
                        + co.a2)
                        .scale(two_s);
                w_const + mu_pref * row
            });
            (
                Some((w_core - w_roots).norm()),
                w_mu.map(|v| (w_core - v).norm()),
            )
        }
        BetheRegime::HomogeneousHighest | BetheRegime::HomogeneousLowest => {
            let rho2_eff = if regime == BetheRegime::HomogeneousLowest {
                -p.rho2
            } else {
                p.rho2
            };
            let mf = z.len() as f64;
            let w_roots = i * ((a * a + 1.0) * s - 2.0 * mf * a - a * rho2_eff) / (a * a - 1.0)
                + 4.0 * i * a * sum_z / (a * a - 1.0);
            let w_mu = mu.filter(|_| !z.is_empty()).map(|m| {
                i * ((a * a + 1.0) * (s * (2.0 * mf + 1.0))
                    - a * rho2_eff * (2.0 * mf + 1.0)
                    - (a - 1.0) * (a - 1.0) * (mf * mf)
                    - 4.0 * a * m * (mf * mf))
                    / (a * a - 1.0)
            });
            (
                Some((w_core - w_roots).norm()),
                w_mu.map(|v| (w_core - v).norm()),
            )
        }
    };

    let derived = HeunParams {
        rho5_override: None,
        ..*p
    };
    Ok(EigenvalueReport {
        w: w_core + (p.rho5() - derived.rho5()),
        root_sum_gap,
        mu_form_gap,
        extrapolation_delta: delta,
    })
}

// --- Assembled solutions -----------------------------------------------------

/// Certification data attached to every solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionResiduals {
    /// Worst on-shell Bethe-equation defect.
    pub bethe_eq: f64,
    /// Worst relative pointwise defect of the Heun-type equation over a fixed
    /// 20-point complex sample.
    pub heun_eq: f64,
    /// Distance from `w` to the nearest eigenvalue of the dense oracle.
    pub oracle_gap: f64,
}

/// One Bethe solution: accessory parameter, both root coordinates, the
/// eigenvalue, and its certificates.
#[derive(Debug, Clone)]
pub struct BetheSolution {
    pub mu: Complex,
    /// Roots of the auxiliary polynomial `y_μ`.
    pub big_z: Vec<Complex>,
    /// String roots, one branch of `z + 1/z = 2 − 4Z` per `Z`.
    pub z: Vec<Complex>,
    pub w: Complex,
    pub residuals: SolutionResiduals,
    pub regime: BetheRegime,
    /// Per root: Bethe defect of the branch kept and of the discarded branch
    /// `z → 1/z`. In the homogeneous regimes both branches solve the
    /// equations and the entries tie; the kept one is then `|z| ≤ 1`.
    pub branch_residuals: Vec<(f64, f64)>,
}

/// A complete spectrum with its repeated-roots diagnostic.
#[derive(Debug, Clone)]
pub struct BetheSpectrum {
    /// Solutions sorted by `(Re w, Im w)`.
    pub solutions: Vec<BetheSolution>,
    /// Minimal pairwise gap between accessory parameters within a
    /// characteristic polynomial (`∞` when there is only one).
    pub min_mu_gap: f64,
}

impl BetheSpectrum {
    /// Repeated accessory parameters are flagged, not fatal: the downstream
    /// residuals decide whether the degenerate solutions are still usable.
    pub fn repeated_mu_roots(&self) -> bool {
        self.min_mu_gap < MU_GAP_FLAG
    }

    /// Real parts of the eigenvalues, ascending.
    pub fn real_eigenvalues(&self) -> Vec<f64> {
        let mut vals: Vec<f64> = self.solutions.iter().map(|s| s.w.re).collect();
        vals.sort_by(f64::total_cmp);
        vals
    }
}

/// Truncation-grid diagnostic: the nearest admissible `𝓜 ∈ {0, …, 2s−1}` and
/// the distance to it. `m` is populated only when the distance is below
/// [`HOMOG_DEFECT_TOL`] **and** `ρ₃ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneousCondition {
    pub m: Option<u32>,
    pub defect: f64,
}

/// Evaluates `𝓜 = s − ½ + i(a²−1)ρ₁/(4a) + (a²+1)ρ₂/(4a)` and measures its
/// distance to the admissible grid.
pub fn homog_condition(p: &HeunParams) -> HomogeneousCondition {
    let a = p.a;
    let m_val = (c(0.0, 1.0) * (a * a - 1.0) * p.rho1 + (a * a + 1.0) * p.rho2) / (4.0 * a)
        + (p.spin.s() - 0.5);
    let nearest = m_val.re.round().clamp(0.0, p.spin.two_s as f64 - 1.0);
    let defect = (m_val - nearest).norm();
    let m = if defect < HOMOG_DEFECT_TOL && p.rho3.abs() < RHO3_TOL {
        Some(nearest as u32)
    } else {
        None
    };
    HomogeneousCondition { m, defect }
}

/// Stable solve of `z² + (4Z−2)z + 1 = 0`: returns `(inside, outside)` with
/// `inside·outside = 1` exactly and `|inside| ≤ 1`.
fn z_pair(big_z: Complex) -> (Complex, Complex) {
    let b = 4.0 * big_z - 2.0;
    let disc = (b * b - 4.0).sqrt();
    let aligned = if (b.conj() * disc).re >= 0.0 { disc } else { -disc };
    let outside = -(b + aligned).unscale(2.0);
    (outside.finv(), outside)
}

fn w_oracle(p: &HeunParams) -> Result<Vec<Complex>, BetheError> {
    let rep = build_spin_rep(p.spin);
    let w = build_w(p, &rep)?;
    if p.phi.is_some() {
        let (vals, _) = hermitian_eigen(&w)?;
        Ok(vals.into_iter().map(|v| c(v, 0.0)).collect())
    } else {
        Ok(poly_roots(&char_poly(&w)?)?)
    }
}

fn nearest_gap(w: Complex, oracle: &[Complex]) -> f64 {
    oracle
        .iter()
        .map(|&o| (w - o).norm())
        .fold(f64::INFINITY, f64::min)
}

fn min_pairwise_gap(mus: &[Complex]) -> f64 {
    let mut gap = f64::INFINITY;
    for (i, &a) in mus.iter().enumerate() {
        for &b in mus.iter().skip(i + 1) {
            gap = gap.min((a - b).norm());
        }
    }
    gap
}

/// Worst relative defect of the multiplied-through Heun-type equation over a
/// fixed complex 20-point sample (off the real axis, clear of the singular
/// points `0`, `1`, `A`).
fn heun_pointwise_residual(y: &CPolynomial, mu: Complex, co: &HeunODECoeffs) -> f64 {
    let y1 = y.derivative();
    let y2 = y1.derivative();
    let mut worst = 0.0f64;
    for j in 0..ODE_SAMPLE_POINTS {
        let x = c(-1.5 + 3.2 * j as f64 / (ODE_SAMPLE_POINTS - 1) as f64, 0.4);
        let second = x * (x - 1.0) * (x - co.big_a) * y2.eval(x);
        let first = (co.a0 * (x - 1.0) * (x - co.big_a)
            + co.a1 * x * (x - co.big_a)
            + co.a2 * x * (x - 1.0))
            * y1.eval(x);
        let zeroth = co.a3 * (x - mu) * y.eval(x);
        let rhs = (x - co.big_a)
            .powi(co.degree as i32 + 1)
            .scale(co.inhom_strength);
        let defect = (second + first + zeroth - rhs).norm();
        let scale = second.norm() + first.norm() + zeroth.norm() + rhs.norm();
        worst = worst.max(defect / scale.max(1.0));
    }
    worst
}

/// Turns one accessory-parameter root into a fully certified solution:
/// evaluates `y_μ`, extracts the `Z` roots, lifts each to the string
/// coordinate branch with the smaller Bethe defect, and runs the eigenvalue
/// extraction and all residuals.
/// The fully confluent homogeneous string: `y_μ` collapsed to the monomial
/// `Zᵐ`, every root at the branch point `Z = 0` (`z = 1`).
///
/// This happens at resonant couplings (branch exponent `a₀ = −(m−1)`, e.g.
/// even-integer `ρ₂` families), where the monomial realizes the shifted
/// Frobenius exponent at the branch point. The string picture degenerates —
/// there are no regular Bethe equations to check — but the eigenvalue is
/// still exact: the `ΣZ → 0` limit of the closed root-sum form, recorded
/// here with the affine `μ`-form (which never references the roots) as its
/// on-shell cross-check in place of the Bethe-equation defect.
fn confluent_solution(
    p: &HeunParams,
    co: &HeunODECoeffs,
    y: &CPolynomial,
    mu: Complex,
    regime: BetheRegime,
    oracle: &[Complex],
) -> Option<BetheSolution> {
    let coeffs = y.coeffs();
    let deg = coeffs.len().checked_sub(1)?;
    let scale = coeffs.iter().map(|cj| cj.norm()).fold(0.0f64, f64::max);
    if deg == 0 || coeffs[..deg].iter().any(|cj| cj.norm() > CONFLUENT_FLOOR * scale) {
        return None;
    }
    let a = p.a;
    let i = c(0.0, 1.0);
    let s = p.spin.s();
    let rho2_eff = if regime == BetheRegime::HomogeneousLowest {
        -p.rho2
    } else {
        p.rho2
    };
    let mf = deg as f64;
    let w_roots = i * ((a * a + 1.0) * s - 2.0 * mf * a - a * rho2_eff) / (a * a - 1.0);
    let w_mu = i
        * ((a * a + 1.0) * (s * (2.0 * mf + 1.0))
            - a * rho2_eff * (2.0 * mf + 1.0)
            - (a - 1.0) * (a - 1.0) * (mf * mf)
            - 4.0 * a * mu * (mf * mf))
        / (a * a - 1.0);
    let derived = HeunParams {
        rho5_override: None,
        ..*p
    };
    let w = w_roots + (p.rho5() - derived.rho5());
    Some(BetheSolution {
        mu,
        big_z: vec![Complex::ZERO; deg],
        z: vec![Complex::ONE; deg],
        w,
        residuals: SolutionResiduals {
            bethe_eq: (w_roots - w_mu).norm(),
            heun_eq: heun_pointwise_residual(y, mu, co),
            oracle_gap: nearest_gap(w, oracle),
        },
        regime,
        branch_residuals: Vec::new(),
    })
}

fn assemble_solution(
    p: &HeunParams,
    co: &HeunODECoeffs,
    cp: &CharPoly,
    mu: Complex,
    regime: BetheRegime,
    oracle: &[Complex],
) -> Result<BetheSolution, BetheError> {
    let y = CPolynomial::new(cp.c.iter().map(|cn| cn.eval(mu)).collect())?;
    if regime != BetheRegime::Inhomogeneous {
        if let Some(sol) = confluent_solution(p, co, &y, mu, regime, oracle) {
            return Ok(sol);
        }
    }
    let big_z = poly_roots(&y)?;
    let kernel = BetheKernel::new(p, regime);
    let mut z: Vec<Complex> = big_z.iter().map(|&bz| z_pair(bz).0).collect();
    let mut branch_residuals = Vec::with_capacity(z.len());
    for k in 0..z.len() {
        let kept = kernel.defect_k(&z, k);
        let mut alt = z.clone();
        alt[k] = alt[k].finv();
        let flipped = kernel.defect_k(&alt, k);
        // Flipping one root leaves every other equation invariant, so the
        // branches can be chosen independently; require a clear win before
        // leaving the |z| ≤ 1 convention.
        if flipped < 0.5 * kept {
            z = alt;
            branch_residuals.push((flipped, kept));
        } else {
            branch_residuals.push((kept, flipped));
        }
    }
    guard_roots(&z, p)?;
    let bethe_eq = (0..z.len())
        .map(|k| kernel.defect_k(&z, k))
        .fold(0.0f64, f64::max);
    let heun_eq = heun_pointwise_residual(&y, mu, co);
    let report = eigenvalue_w(&z, Some(mu), regime, p)?;
    Ok(BetheSolution {
        mu,
        big_z,
        z,
        w: report.w,
        residuals: SolutionResiduals {
            bethe_eq,
            heun_eq,
            oracle_gap: nearest_gap(report.w, oracle),
        },
        regime,
        branch_residuals,
    })
}

fn sort_solutions(solutions: &mut [BetheSolution]) {
    solutions.sort_by(|x, y| {
        x.w.re
            .total_cmp(&y.w.re)
            .then_with(|| x.w.im.total_cmp(&y.w.im))
    });
}

fn residual_gate(solutions: &[BetheSolution]) -> Result<(), BetheError> {
    let worst = solutions
        .iter()
        .map(|s| s.residuals.bethe_eq)
        .fold(0.0f64, f64::max);
    if worst > BETHE_RESIDUAL_FAIL {
        return Err(BetheError::ResidualFailure {
            residual: worst,
            tolerance: BETHE_RESIDUAL_FAIL,
        });
    }
    Ok(())
}

/// Complete spectrum through the inhomogeneous Bethe equations (`M = 2s`):
/// one solution per root of the degree-`2s+1` characteristic polynomial.
pub fn inhom_solve(p: &HeunParams) -> Result<BetheSpectrum, BetheError> {
    let (co, cp) = inhom_char_poly(p)?;
    let mus = poly_roots(&cp.p)?;
    let min_mu_gap = min_pairwise_gap(&mus);
    let oracle = w_oracle(p)?;
    let mut solutions = mus
        .iter()
        .map(|&mu| assemble_solution(p, &co, &cp, mu, BetheRegime::Inhomogeneous, &oracle))
        .collect::<Result<Vec<_>, _>>()?;
    sort_solutions(&mut solutions);
    residual_gate(&solutions)?;
    Ok(BetheSpectrum {
        solutions,
        min_mu_gap,
    })
}

fn homog_branch(
    p: &HeunParams,
    m: u32,
    regime: BetheRegime,
    oracle: &[Complex],
) -> Result<(Vec<BetheSolution>, f64), BetheError> {
    if m == 0 {
        // Rootless branch: the weight vector itself is the eigenstate and the
        // transfer eigenvalue is the string-free λ(u).
        let report = eigenvalue_w(&[], None, regime, p)?;
        let solution = BetheSolution {
            mu: Complex::ZERO,
            big_z: Vec::new(),
            z: Vec::new(),
            w: report.w,
            residuals: SolutionResiduals {
                bethe_eq: 0.0,
                heun_eq: 0.0,
                oracle_gap: nearest_gap(report.w, oracle),
            },
            regime,
            branch_residuals: Vec::new(),
        };
        return Ok((vec![solution], f64::INFINITY));
    }
    let flip = regime == BetheRegime::HomogeneousLowest;
    let p_eff = HeunParams {
        rho1: if flip { -p.rho1 } else { p.rho1 },
        rho2: if flip { -p.rho2 } else { p.rho2 },
        ..*p
    };
    let (co, cp) = homog_char_poly(&p_eff, m)?;
    let mus = poly_roots(&cp.p)?;
    if mus.len() != m as usize + 1 {
        return Err(BetheError::BranchCountMismatch {
            expected: m as usize + 1,
            got: mus.len(),
        });
    }
    let solutions = mus
        .iter()
        .map(|&mu| assemble_solution(p, &co, &cp, mu, regime, oracle))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((solutions, min_pairwise_gap(&mus)))
}

/// Complete spectrum through the homogeneous equations, available only on
/// the truncation grid: the `𝓜 + 1` highest-weight solutions united with the
/// `2s − 𝓜` lowest-weight ones.
pub fn homog_solve(p: &HeunParams) -> Result<BetheSpectrum, BetheError> {
    let cond = homog_condition(p);
    let m = cond.m.ok_or(BetheError::NotHomogeneous {
        defect: cond.defect,
    })?;
    let oracle = w_oracle(p)?;
    let (mut highest, gap_hi) = homog_branch(p, m, BetheRegime::HomogeneousHighest, &oracle)?;
    let m_low = p.spin.two_s - 1 - m;
    let (lowest, gap_lo) = homog_branch(p, m_low, BetheRegime::HomogeneousLowest, &oracle)?;
    let expected = p.spin.two_s as usize + 1;
    if highest.len() + lowest.len() != expected {
        return Err(BetheError::BranchCountMismatch {
            expected,
            got: highest.len() + lowest.len(),
        });
    }
    highest.extend(lowest);
    sort_solutions(&mut highest);
    residual_gate(&highest)?;
    Ok(BetheSpectrum {
        solutions: highest,
        min_mu_gap: gap_hi.min(gap_lo),
    })
}

/// One homogeneous branch on its own: the `𝓜 + 1` highest-weight solutions,
/// or the `2s − 𝓜` lowest-weight ones.
///
/// For callers that need a single family — e.g. one block of an operator
/// that splits — this skips the complementary branch entirely, so its
/// degeneracies (a root configuration touching `z = ±1` is possible there)
/// cannot obstruct the branch actually wanted. Residual-gated and sorted
/// like [`homog_solve`].
pub fn homog_branch_solve(
    p: &HeunParams,
    regime: BetheRegime,
) -> Result<BetheSpectrum, BetheError> {
    assert_ne!(
        regime,
        BetheRegime::Inhomogeneous,
        "single-branch solve is a homogeneous-grid notion; use inhom_solve"
    );
    let cond = homog_condition(p);
    let m = cond.m.ok_or(BetheError::NotHomogeneous {
        defect: cond.defect,
    })?;
    let m_branch = match regime {
        BetheRegime::HomogeneousHighest => m,
        _ => p.spin.two_s - 1 - m,
    };
    let oracle = w_oracle(p)?;
    let (mut solutions, min_mu_gap) = homog_branch(p, m_branch, regime, &oracle)?;
    sort_solutions(&mut solutions);
    residual_gate(&solutions)?;
    Ok(BetheSpectrum {
        solutions,
        min_mu_gap,
    })
}

/// Spectrum of `E = 4(J₁² + rJ₂²)` by Bethe ansatz, `0 < r < 1`.
///
/// `E` is proportional to the Heun operator at `ρ = 0` and real
/// `a = (1−√r)/(1+√r)`. Integer spin runs the inhomogeneous machinery
/// (`2s + 1` solutions); half-integer spin sits on the truncation grid with
/// `𝓜 = s − ½` and runs the homogeneous one, where the two branches coincide
/// and every eigenvalue appears twice (Kramers pairs). The eigenvalues are
/// evaluated from the closed root-sum forms
///
/// ```text
/// ε = 2s(4s²+1)(a²+1)/(a+1)² − 4a(s−½)²/(a+1)² · Σ_p (z_p + 1/z_p)   (integer s)
/// ε = 4s(a²+1)/(a+1)²        − 4a/(a+1)²        · Σ_p (z_p + 1/z_p)   (half-integer s)
/// ```
///
/// and each solution's `oracle_gap` is rewritten in units of `E` against the
/// Hermitian diagonalization of `E` itself. Solutions are returned sorted by
/// `ε`, aligned with the spectrum.
pub fn e_spectrum(spin: Spin, r: f64) -> Result<(Spectrum, Vec<BetheSolution>), BetheError> {
    assert!(r > 0.0 && r < 1.0, "anisotropy r must lie in (0,1), got {r}");
    let sqrt_r = r.sqrt();
    let a = (1.0 - sqrt_r) / (1.0 + sqrt_r);
    let p = HeunParams::with_general_a(spin, c(a, 0.0), 0.0, 0.0, 0.0)?;
    let rep = build_spin_rep(spin);
    let (e_oracle, _) = hermitian_eigen(&build_e(spin, r, &rep)?)?;
    let mut solutions = if spin.is_integer() {
        inhom_solve(&p)?.solutions
    } else {
        homog_solve(&p)?.solutions
    };
    let s = spin.s();
    let ap1_sq = (a + 1.0) * (a + 1.0);
    let mut paired: Vec<(f64, BetheSolution)> = solutions
        .drain(..)
        .map(|mut sol| {
            let sum: Complex = sol.z.iter().map(|&z| z + z.finv()).sum();
            let eps = if spin.is_integer() {
                2.0 * s * (4.0 * s * s + 1.0) * (a * a + 1.0) / ap1_sq
                    - (4.0 * a * (s - 0.5) * (s - 0.5) / ap1_sq) * sum.re
            } else {
                4.0 * s * (a * a + 1.0) / ap1_sq - (4.0 * a / ap1_sq) * sum.re
            };
            sol.residuals.oracle_gap = e_oracle
                .iter()
                .map(|&o| (eps - o).abs())
                .fold(f64::INFINITY, f64::min);
            (eps, sol)
        })
        .collect();
    paired.sort_by(|x, y| x.0.total_cmp(&y.0));
    let eigenvalues = paired.iter().map(|(e, _)| *e).collect();
    let solutions = paired.into_iter().map(|(_, sol)| sol).collect();
    Ok((
        Spectrum {
            eigenvalues,
            method: SpectrumMethod::Bethe,
        },
        solutions,
    ))
}
