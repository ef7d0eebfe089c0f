//! Free fermions on the Krawtchouk chain: correlation matrices, the
//! commuting tridiagonal operator, entanglement entropy, and the Bethe route
//! to its spectrum.
//!
//! The chain has `2s + 1` sites, hopping amplitudes
//! `sin(2θ)/2·√((n+1)(2s−n))` between neighbours and local fields
//! `cos(2θ)(s − n)`, so the single-particle Hamiltonian is
//! `Ĥ = cos(2θ)J₃ + sin(2θ)J₁` with spectrum `ω_k = k − s` for any `θ`. The
//! eigenvector overlaps `⟨n|ω_k⟩` are Krawtchouk polynomials at `p = sin²θ`
//! ([`overlap_matrix`]); the ground state fills all modes up to a Fermi
//! index `K`.
//!
//! Entanglement of the first `ℓ + 1` sites is governed by the chopped
//! correlation matrix `C = π_ℓ(Σ_{k≤K}|ω_k⟩⟨ω_k|)π_ℓ`; its eigenvalues
//! `λ_j ∈ [0, 1]` give the entropy `S = −Σ[λlnλ + (1−λ)ln(1−λ)]` (the
//! standard free-fermion form — a trace of `ρ ln ρ` alone would be
//! non-positive). `C` is hard to diagonalize directly but commutes with the
//! tridiagonal operator
//!
//! ```text
//! T = {Ĥ, J₃} + μJ₃ + νĤ ,    μ = 2s − 2K − 1 ,   ν = 2ℓ + 1 − 2s :
//! ```
//!
//! the off-diagonal entries of `T` are `Ĥ_{n,n+1}·2(ℓ − n)`, so `T` splits at
//! the cut into `π_ℓTπ_ℓ ⊕ (1−π_ℓ)T(1−π_ℓ)` and commutes with `π_ℓ` exactly.
//! [`spectrum_via_pt`] recovers `C`'s eigenvalues by expressing `C` as a
//! polynomial `P` of degree `ℓ` in the restricted `T` (tridiagonality makes
//! the triangular recurrence for the coefficients explicit).
//!
//! `T` is itself an algebraic Heun operator: the rotated generator triple
//! `J̃₁ = cos(2θ)J₃ + sin(2θ)J₁ = Ĥ`, `J̃₂ = sin(2θ)J₃ − cos(2θ)J₁`,
//! `J̃₃ = −J₂` identifies `T = sin(2θ)·(W − ρ₅)` with
//!
//! ```text
//! ρ₁ = cot(2θ)μ + ν/sin(2θ) ,   ρ₂ = μ ,   ρ₃ = 0 ,   a = e^{2iθ} ,
//! ```
//!
//! and the derived `ρ₅ = ρ₁ρ₂/2 − ρ₂²ρ₄/4` collapses to `μν/(2sin 2θ)` — no
//! override needed. These parameters sit on the homogeneous truncation grid
//! with `𝓜 = 2s − 1 − ℓ`, and the `ℓ + 1` eigenvalues of the restricted
//! block are exactly the lowest-weight branch, where the string carries `ℓ`
//! roots. [`t_spectrum_via_bethe`] evaluates them from the roots via
//!
//! ```text
//! t = s·cos(2θ) + μ(1 − ν)/2 − ½·Σᵢ (z̄ᵢ + 1/z̄ᵢ) ,
//! ```
//!
//! the constant term following from `t = sin(2θ)(w − ρ₅)` and the
//! lowest-branch closed form for `w` (expanding `ρ₅` contributes the `−μν/2`
//! that a naive reading would drop).

use crate::bethe_solver::{homog_branch_solve, BetheError, BetheRegime};
use crate::heun_operators::{HeunOperatorError, HeunParams};
use crate::linalg_core::{c, hermitian_eigen, CMatrix, Complex, LinalgError};
use crate::spin_rep::{build_spin_rep, Spin, SpinRep};

/// Restricted-`T` eigenvalue gap below which the polynomial reconstruction
/// is abandoned for direct diagonalization.
const DEGENERATE_T_GAP: f64 = 1e-9;
/// Relative floor for the `⟨0|Tʳ|r⟩` pivots of the reconstruction recurrence.
const ZERO_PIVOT_TOL: f64 = 1e-12;
/// Allowed excursion of chopped-correlation eigenvalues beyond `[0, 1]`.
const SPECTRUM_CLAMP_TOL: f64 = 1e-8;

/// Errors surfaced by the chain layer.
#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum ChainError {
    /// A scalar argument escaped its admissible domain.
    #[error("{name} = {value} violates {constraint}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },
    /// A `⟨0|Tʳ|r⟩` denominator of the reconstruction recurrence vanished;
    /// the chain is decoupled (e.g. `sin 2θ = 0`).
    #[error("reconstruction pivot \u{27e8}0|T^{index}|{index}\u{27e9} is numerically zero")]
    ZeroPivot { index: usize },
    /// Chopped-correlation eigenvalues strayed beyond `[0, 1]` by more than
    /// the clamping budget.
    #[error("correlation eigenvalue outside [0, 1] by {excess:.3e}")]
    SpectrumOutOfRange { excess: f64 },
    /// Parameter validation delegated to the operator layer.
    #[error(transparent)]
    Operator(#[from] HeunOperatorError),
    /// The Bethe machinery rejected the identified parameters.
    #[error(transparent)]
    Bethe(#[from] BetheError),
    /// Kernel failure.
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A chain instance: spin (the chain has `2s + 1` sites), mixing angle,
/// Fermi index and cut position.
///
/// Whether `fermi` really is "the largest `k` with `ω_k < 0` filled" is the
/// caller's choice — any filling `0 ≤ K ≤ 2s` yields a valid Slater state,
/// so the constructor only range-checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    pub spin: Spin,
    /// Mixing angle `θ`: hopping `∝ sin 2θ`, fields `∝ cos 2θ`.
    pub theta: f64,
    /// Fermi index `K`: modes `ω_0, …, ω_K` are filled.
    pub fermi: u32,
    /// Cut `ℓ`: the subsystem is sites `0, …, ℓ`.
    pub cut: u32,
}

impl ChainSpec {
    pub fn new(spin: Spin, theta: f64, fermi: u32, cut: u32) -> Result<Self, ChainError> {
        if !theta.is_finite() {
            return Err(ChainError::ParameterOutOfRange {
                name: "theta",
                value: theta,
                constraint: "finite",
            });
        }
        for (name, value) in [("fermi index K", fermi), ("cut \u{2113}", cut)] {
            if value > spin.two_s {
                return Err(HeunOperatorError::IndexOutOfRange {
                    name,
                    value,
                    bound: spin.two_s,
                }
                .into());
            }
        }
        Ok(Self {
            spin,
            theta,
            fermi,
            cut,
        })
    }

    /// Couplings of the commuting operator: `μ = 2s − 2K − 1`,
    /// `ν = 2ℓ + 1 − 2s`.
    pub fn mu_nu(&self) -> (f64, f64) {
        let two_s = self.spin.two_s as f64;
        (
            two_s - 2.0 * self.fermi as f64 - 1.0,
            2.0 * self.cut as f64 + 1.0 - two_s,
        )
    }
}

/// Ground-state correlation data: the full matrix and its leading block.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrices {
    /// `⟨c_m†c_n⟩ = Σ_{k≤K}|ω_k⟩⟨ω_k|`: an orthogonal projector of rank
    /// `K + 1`.
    pub full: CMatrix,
    /// Leading `(ℓ+1) × (ℓ+1)` principal submatrix; eigenvalues in `[0, 1]`.
    pub chopped: CMatrix,
}

fn binom(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    let mut out = 1.0;
    for j in 0..k {
        out = out * (n - j) as f64 / (j + 1) as f64;
    }
    out
}

/// Krawtchouk polynomial `K_n(x; p, N) = ₂F₁(−n, −x; −N; 1/p)` by its finite
/// hypergeometric sum (the `(−n)_j` factor truncates at `j = n`; the `(−N)_j`
/// denominator cannot vanish for `n ≤ N`).
pub fn krawtchouk_poly(n: u32, x: i64, p: f64, big_n: u32) -> Result<f64, ChainError> {
    if n > big_n {
        return Err(ChainError::ParameterOutOfRange {
            name: "degree n",
            value: n as f64,
            constraint: "n \u{2264} N",
        });
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(ChainError::ParameterOutOfRange {
            name: "p",
            value: p,
            constraint: "0 < p < 1",
        });
    }
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for j in 0..n as i64 {
        term *= (j as f64 - n as f64) * (j as f64 - x as f64)
            / ((j as f64 - big_n as f64) * (j + 1) as f64 * p);
        sum += term;
    }
    Ok(sum)
}

/// Closed-form eigenbasis of `Ĥ`: column `k` is `|ω_k⟩` with entries
///
/// ```text
/// ⟨n|ω_k⟩ = √(binom(2s,n)·binom(2s,2s−k)) · (sin θ)^{2s} · |cot θ|^{k−n}
///           · K_n(2s−k; sin²θ, 2s) .
/// ```
///
/// Needs `θ ∈ (0, π/2)` so that `sin θ`, `cos θ` > 0. Columns are unit
/// vectors up to rounding; signs are fixed by the formula itself, so
/// comparisons against numerically computed eigenvectors must be phase-free
/// (projectors or unitarity), never entrywise.
pub fn overlap_matrix(spec: &ChainSpec) -> Result<CMatrix, ChainError> {
    if !(spec.theta > 0.0 && spec.theta < std::f64::consts::FRAC_PI_2) {
        return Err(ChainError::ParameterOutOfRange {
            name: "theta",
            value: spec.theta,
            constraint: "0 < \u{3b8} < \u{3c0}/2 for the overlap formula",
        });
    }
    let two_s = spec.spin.two_s;
    let dim = spec.spin.dim();
    let sin = spec.theta.sin();
    let cot = spec.theta.cos() / sin;
    let sin_pow = sin.powi(two_s as i32);
    let mut u = CMatrix::zeros(dim, dim);
    for n in 0..dim as u32 {
        for k in 0..dim as u32 {
            let weight = (binom(two_s, n) * binom(two_s, two_s - k)).sqrt()
                * sin_pow
                * cot.powi(k as i32 - n as i32);
            u[(n as usize, k as usize)] = c(
                weight * krawtchouk_poly(n, (two_s - k) as i64, sin * sin, two_s)?,
                0.0,
            );
        }
    }
    Ok(u)
}

/// Single-particle Hamiltonian `Ĥ = cos(2θ)J₃ + sin(2θ)J₁`: real symmetric,
/// tridiagonal in the site basis, spectrum `{k − s}` for every `θ`.
pub fn hamiltonian(spec: &ChainSpec, rep: &SpinRep) -> CMatrix {
    assert_eq!(rep.spin, spec.spin, "representation spin mismatch");
    &rep.j3.scale(c((2.0 * spec.theta).cos(), 0.0))
        + &rep.j1.scale(c((2.0 * spec.theta).sin(), 0.0))
}

fn leading_block(m: &CMatrix, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| m[(i, j)])
}

/// Ground-state correlation matrices for the Fermi sea filled up to
/// `ω_fermi`, from the numerically diagonalized `Ĥ` (ascending eigenvalues,
/// so column `k` carries `ω_k = k − s`).
pub fn correlation(spec: &ChainSpec) -> Result<CorrelationMatrices, ChainError> {
    let rep = build_spin_rep(spec.spin);
    let h = hamiltonian(spec, &rep);
    let (_, vecs) = hermitian_eigen(&h)?;
    let dim = spec.spin.dim();
    let filled = spec.fermi as usize + 1;
    let full = CMatrix::from_fn(dim, dim, |i, j| {
        (0..filled).map(|k| vecs[(i, k)] * vecs[(j, k)].conj()).sum()
    });
    let chopped = leading_block(&full, spec.cut as usize + 1);
    Ok(CorrelationMatrices { full, chopped })
}

/// The tridiagonal operator `T = {Ĥ, J₃} + μJ₃ + νĤ` commuting with the
/// chopped correlation matrix.
///
/// Its upper-diagonal entries are `Ĥ_{n,n+1}·2(ℓ − n)`: the coupling across
/// the cut vanishes identically, which is the entire mechanism — `T` is block
/// diagonal with respect to `π_ℓ`, and the restricted block shares `C`'s
/// eigenvectors.
pub fn commuting_t(spec: &ChainSpec, rep: &SpinRep) -> CMatrix {
    let h = hamiltonian(spec, rep);
    let (mu, nu) = spec.mu_nu();
    let anti = &(&h * &rep.j3) + &(&rep.j3 * &h);
    &(&anti + &rep.j3.scale(c(mu, 0.0))) + &h.scale(c(nu, 0.0))
}

/// Outcome of the polynomial reconstruction `C = P(T)`.
///
/// `P` is carried in the monic Newton basis anchored at the restricted-`T`
/// eigenvalues,
///
/// ```text
/// P(t) = Σ_k coefficients[k] · Π_{j<k} (t − nodes[j]) ,
/// ```
///
/// with the nodes in Leja order. The triangular recurrence determining the
/// coefficients is the same in every monic basis — the pivots are untouched
/// by the shifts — but the raw monomial coefficients of the same `P` grow
/// past `1e9` on the longer chains (the mode occupations trace a sharp Fermi
/// step) and lose the spectrum to cancellation, while the Newton
/// coefficients are plain divided differences of the occupation profile.
#[derive(Debug, Clone, PartialEq)]
pub struct PtReconstruction {
    /// Eigenvalues of the chopped correlation matrix, ascending.
    pub eigenvalues: Vec<f64>,
    /// Newton coefficients of `P` against `nodes` (empty on the degenerate
    /// fallback).
    pub coefficients: Vec<f64>,
    /// Expansion points of the Newton basis: the restricted-`T` eigenvalues
    /// in Leja order (empty on the degenerate fallback).
    pub nodes: Vec<f64>,
    /// Eigenvalues of the restricted `T`, ascending.
    pub t_eigenvalues: Vec<f64>,
    /// Set when the restricted `T` had a near-degenerate pair and the
    /// eigenvalues were taken from direct diagonalization instead.
    pub degenerate_fallback: bool,
}

impl PtReconstruction {
    /// Evaluate the reconstructed `P` at `t` by the backward pass over the
    /// Newton form. `None` on the degenerate fallback, which carries no
    /// polynomial.
    pub fn evaluate(&self, t: f64) -> Option<f64> {
        let last = self.coefficients.len().checked_sub(1)?;
        let mut acc = self.coefficients[last];
        for k in (0..last).rev() {
            acc = acc * (t - self.nodes[k]) + self.coefficients[k];
        }
        Some(acc)
    }
}

/// Leja ordering: start from the extremal point, then greedily maximise the
/// distance product to the points already placed (log-sums, so the products
/// cannot over- or underflow). Interpolating on a Leja-ordered prefix never
/// extrapolates far outside the points it has seen, which is what keeps the
/// Newton partial sums small.
fn leja_order(points: &[f64]) -> Vec<f64> {
    let mut remaining = points.to_vec();
    let mut out: Vec<f64> = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let (idx, _) = remaining
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let merit = if out.is_empty() {
                    x.abs()
                } else {
                    out.iter().map(|&y| (x - y).abs().ln()).sum::<f64>()
                };
                (i, merit)
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty remaining set");
        out.push(remaining.swap_remove(idx));
    }
    out
}

/// Spectrum of the chopped correlation matrix through `C = P(T)`.
///
/// Since `⟨0|q(T)|m⟩ = 0` for any polynomial `q` of degree `< m`
/// (tridiagonality), expanding `P` over monic polynomials `N_k` of degree
/// `k` gives the triangular recurrence
///
/// ```text
/// a_ℓ = ⟨0|C|ℓ⟩ / ⟨0|N_ℓ(T)|ℓ⟩ ,
/// a_{ℓ−j} = [⟨0|C|ℓ−j⟩ − Σ_{r<j} a_{ℓ−r}⟨0|N_{ℓ−r}(T)|ℓ−j⟩] / ⟨0|N_{ℓ−j}(T)|ℓ−j⟩ ,
/// ```
///
/// whose pivots `⟨0|N_m(T)|m⟩ = Π_{r<m} T_{r,r+1}` are the same for every
/// monic choice — the plain powers `N_k = tᵏ` included — and vanish only
/// when the chain decouples (`sin 2θ = 0`), surfacing as
/// [`ChainError::ZeroPivot`]. The `N_k` used here are the Newton products
/// over the Leja-ordered restricted spectrum (see [`PtReconstruction`]).
///
/// `C`'s eigenvalues are `P(tᵢ)` at the eigenvalues `tᵢ` of the restricted
/// `T`. They are not read off by running Horner over the solved coefficients
/// — substitution through the triangular system amplifies roundoff
/// exponentially in the cut length on the sharp Fermi-step data — but from
/// the exact solution of the same system: sandwiching `C = P(T)` between
/// `⟨0|` and a `T`-eigenvector `vᵢ` collapses the recurrence to
///
/// ```text
/// P(tᵢ) = ⟨0|C|vᵢ⟩ / ⟨0|vᵢ⟩ ,
/// ```
///
/// well-defined because the first component of a tridiagonal eigenvector
/// vanishes only where a super-diagonal entry does (the same pivots again).
/// Only the first row of `C` enters, so agreement with the directly
/// diagonalized spectrum still certifies the reconstruction. A restricted
/// spectrum with a gap below `1e-9` makes `P` ill-conditioned between the
/// clustered nodes, so the routine falls back to diagonalizing `C` directly
/// and flags it.
pub fn spectrum_via_pt(spec: &ChainSpec) -> Result<PtReconstruction, ChainError> {
    let rep = build_spin_rep(spec.spin);
    let corr = correlation(spec)?;
    let n = spec.cut as usize + 1;
    let t_r = leading_block(&commuting_t(spec, &rep), n);
    let (t_eigenvalues, t_vectors) = hermitian_eigen(&t_r)?;
    let min_gap = t_eigenvalues
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    if min_gap < DEGENERATE_T_GAP {
        let (eigenvalues, _) = hermitian_eigen(&corr.chopped)?;
        return Ok(PtReconstruction {
            eigenvalues,
            coefficients: Vec::new(),
            nodes: Vec::new(),
            t_eigenvalues,
            degenerate_fallback: true,
        });
    }
    // The pivots ⟨0|N_m(T)|m⟩ are exactly the products Π_{r<m} T_{r,r+1}
    // (single tridiagonal path), so they vanish iff a super-diagonal factor
    // does; test the factors, which have a well-defined scale.
    let t_scale = t_r.max_abs().max(1.0);
    for m in 1..n {
        if t_r[(m - 1, m)].norm() < ZERO_PIVOT_TOL * t_scale {
            return Err(ChainError::ZeroPivot { index: m });
        }
    }
    let nodes = leja_order(&t_eigenvalues);
    // Rows ⟨0|N_k(T)|·⟩ of the Newton products N_{k+1}(T) = N_k(T)(T − nodes[k])
    // by repeated row multiplication: vᵀM = (Mᵀv)ᵀ.
    let t_t = t_r.transpose();
    let mut rows: Vec<Vec<Complex>> = Vec::with_capacity(n);
    let mut e0 = vec![Complex::ZERO; n];
    e0[0] = Complex::ONE;
    rows.push(e0);
    for k in 1..n {
        let prev = &rows[k - 1];
        let node = c(nodes[k - 1], 0.0);
        let next: Vec<Complex> = t_t
            .apply(prev)
            .iter()
            .zip(prev)
            .map(|(tp, p)| tp - node * p)
            .collect();
        rows.push(next);
    }
    let ell = n - 1;
    let mut coeffs = vec![Complex::ZERO; n];
    for j in 0..n {
        let m = ell - j;
        let mut num = corr.chopped[(0, m)];
        for r in 0..j {
            num -= coeffs[ell - r] * rows[ell - r][m];
        }
        coeffs[m] = num / rows[m][m];
    }
    let coefficients: Vec<f64> = coeffs.iter().map(|z| z.re).collect();
    let mut eigenvalues: Vec<f64> = (0..n)
        .map(|i| {
            let mut num = Complex::ZERO;
            for m in 0..n {
                num += corr.chopped[(0, m)] * t_vectors[(m, i)];
            }
            (num / t_vectors[(0, i)]).re
        })
        .collect();
    eigenvalues.sort_by(f64::total_cmp);
    Ok(PtReconstruction {
        eigenvalues,
        coefficients,
        nodes,
        t_eigenvalues,
        degenerate_fallback: false,
    })
}

/// Free-fermion entropy of a mode-occupation spectrum, with eigenvalues
/// clamped onto `[0, 1]` (rejecting excursions beyond the budget).
fn binary_entropy(vals: &[f64]) -> Result<f64, ChainError> {
    let mut excess = 0.0f64;
    let mut s = 0.0f64;
    for &v in vals {
        let lam = v.clamp(0.0, 1.0);
        excess = excess.max((v - lam).abs());
        for q in [lam, 1.0 - lam] {
            if q > 0.0 {
                s -= q * q.ln();
            }
        }
    }
    if excess > SPECTRUM_CLAMP_TOL {
        return Err(ChainError::SpectrumOutOfRange { excess });
    }
    Ok(s)
}

/// Entanglement entropy of sites `0, …, ℓ` in the filled-sea ground state:
/// `S = −Σ_j [λ_j ln λ_j + (1−λ_j) ln(1−λ_j)]` over the chopped-correlation
/// eigenvalues, with `0·ln 0 := 0`. Non-negative; zero for `ℓ = 2s` or
/// `K = 2s` (pure subsystem state).
pub fn entanglement_entropy(spec: &ChainSpec) -> Result<f64, ChainError> {
    let corr = correlation(spec)?;
    let (vals, _) = hermitian_eigen(&corr.chopped)?;
    binary_entropy(&vals)
}

/// One restricted-`T` eigenvalue obtained from a lowest-weight Bethe string.
#[derive(Debug, Clone)]
pub struct RestrictedTValue {
    pub t: f64,
    /// The `ℓ` string roots `z̄ᵢ`. At the empty filling `K = 0` one string
    /// is fully confluent — all roots exactly at `z̄ = 1` — and contributes
    /// `z̄ + 1/z̄ = 2` per root to the closed form while carrying no regular
    /// Bethe equation.
    pub roots: Vec<Complex>,
    /// Worst defect of the chain-native Bethe equations over the regular
    /// roots.
    pub residual: f64,
}

/// Chain-native Bethe equations (the homogeneous equations after the `2θ`
/// rotation, written directly in `(θ, μ, ν)`):
///
/// ```text
/// a·s(z²−1)/((az−1)(a−z)) + [(z²+1)(1−ν/2) − μz]/(z²−1)
///     + Σ_{p≠k} z_p(z²−1)/((z−z_p)(zz_p−1)) = 0 ,    a = e^{2iθ} .
/// ```
fn chain_bethe_defect(theta: f64, s: f64, mu: f64, nu: f64, z: &[Complex]) -> f64 {
    let a = Complex::from_polar(1.0, 2.0 * theta);
    let mut worst = 0.0f64;
    for (k, &zk) in z.iter().enumerate() {
        // Confluent roots sit exactly at the branch point z̄ = 1 and carry no
        // regular equation (they realize a shifted Frobenius exponent).
        if zk == Complex::ONE {
            continue;
        }
        let mut lhs = a * s * (zk * zk - 1.0) / ((a * zk - 1.0) * (a - zk))
            + ((zk * zk + 1.0) * (1.0 - nu / 2.0) - mu * zk) / (zk * zk - 1.0);
        for (p, &zp) in z.iter().enumerate() {
            if p != k {
                lhs += zp * (zk * zk - 1.0) / ((zk - zp) * (zk * zp - 1.0));
            }
        }
        worst = worst.max(lhs.norm());
    }
    worst
}

/// Eigenvalues of the restricted `T` by Bethe ansatz.
///
/// Runs the lowest-weight homogeneous branch at the identified operator
/// parameters (`ρ₁ = cot(2θ)μ + ν/sin(2θ)`, `ρ₂ = μ`, `ρ₃ = 0`,
/// `a = e^{2iθ}`; on the truncation grid with `𝓜 = 2s − 1 − ℓ`): its
/// `ℓ + 1` strings of `ℓ` roots correspond to the block below the cut. The
/// highest-weight family describes the complementary block and is skipped —
/// at the chain's integer couplings its strings can land exactly on the
/// `z = ±1` singular guard. Each value is evaluated from the closed form
/// `t = s·cos(2θ) + μ(1−ν)/2 − ½Σ(z̄ᵢ + 1/z̄ᵢ)` and certified against the
/// chain-native equations. Needs `θ ∈ (0, π/2)` (via the unimodular
/// constructor) and `ℓ < 2s` (otherwise the parameters leave the truncation
/// grid and the solver reports `NotHomogeneous`). Sorted ascending in `t`.
pub fn t_spectrum_via_bethe(spec: &ChainSpec) -> Result<Vec<RestrictedTValue>, ChainError> {
    let s = spec.spin.s();
    let (mu, nu) = spec.mu_nu();
    let sin2 = (2.0 * spec.theta).sin();
    let cos2 = (2.0 * spec.theta).cos();
    let rho1 = (cos2 * mu + nu) / sin2;
    let p = HeunParams::new(spec.spin, 2.0 * spec.theta, rho1, mu, 0.0)?;
    let spectrum = homog_branch_solve(&p, BetheRegime::HomogeneousLowest)?;
    let mut out: Vec<RestrictedTValue> = spectrum
        .solutions
        .iter()
        .map(|sol| {
            let root_sum: Complex = sol.z.iter().map(|&z| z + z.finv()).sum();
            RestrictedTValue {
                t: s * cos2 + mu * (1.0 - nu) / 2.0 - root_sum.re / 2.0,
                roots: sol.z.clone(),
                residual: chain_bethe_defect(spec.theta, s, mu, nu, &sol.z),
            }
        })
        .collect();
    if out.len() != spec.cut as usize + 1 {
        return Err(BetheError::BranchCountMismatch {
            expected: spec.cut as usize + 1,
            got: out.len(),
        }
        .into());
    }
    out.sort_by(|x, y| x.t.total_cmp(&y.t));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heun_operators::build_w;
    use proptest::prelude::*;

    fn fixture() -> ChainSpec {
        ChainSpec::new(Spin::new(10), 0.6, 4, 3).unwrap()
    }

    /// Complement-cut correlation block (sites `ℓ+1, …, 2s`).
    fn trailing_entropy(spec: &ChainSpec) -> f64 {
        let corr = correlation(spec).unwrap();
        let n = spec.spin.dim() - spec.cut as usize - 1;
        let off = spec.cut as usize + 1;
        let block = CMatrix::from_fn(n, n, |i, j| corr.full[(off + i, off + j)]);
        binary_entropy(&hermitian_eigen(&block).unwrap().0).unwrap()
    }

    fn max_entry_gap(x: &CMatrix, y: &CMatrix) -> f64 {
        let mut gap = 0.0f64;
        for i in 0..x.rows() {
            for j in 0..x.cols() {
                gap = gap.max((x[(i, j)] - y[(i, j)]).norm());
            }
        }
        gap
    }

    #[test]
    fn krawtchouk_degree_zero_and_one() {
        for (x, p, n) in [(3, 0.3, 7u32), (0, 0.8, 4), (5, 0.36, 10)] {
            assert_eq!(krawtchouk_poly(0, x, p, n).unwrap(), 1.0);
            let k1 = krawtchouk_poly(1, x, p, n).unwrap();
            assert!((k1 - (1.0 - x as f64 / (p * n as f64))).abs() < 1e-14);
        }
        assert!(matches!(
            krawtchouk_poly(5, 1, 0.4, 3),
            Err(ChainError::ParameterOutOfRange { .. })
        ));
        assert!(matches!(
            krawtchouk_poly(1, 1, 1.0, 3),
            Err(ChainError::ParameterOutOfRange { .. })
        ));
    }

    #[test]
    fn overlap_matrix_is_the_closed_form_eigenbasis() {
        // Unitarity and the eigen-residual jointly pin the normalisation, the
        // |cot θ| power, and the column order (ω_k ascending with k).
        let spec = ChainSpec::new(Spin::new(10), 0.6, 4, 3).unwrap();
        let u = overlap_matrix(&spec).unwrap();
        let gram = &u.transpose() * &u;
        let id = CMatrix::identity(u.rows());
        assert!(max_entry_gap(&gram, &id) < 1e-9);
        let rep = build_spin_rep(spec.spin);
        let h = hamiltonian(&spec, &rep);
        let hu = &h * &u;
        let s = spec.spin.s();
        let mut worst = 0.0f64;
        for k in 0..u.cols() {
            for n in 0..u.rows() {
                worst = worst.max((hu[(n, k)] - u[(n, k)] * (k as f64 - s)).norm());
            }
        }
        assert!(worst < 1e-9, "eigen-residual {worst:.3e}");
    }

    #[test]
    fn hamiltonian_carries_the_chain_couplings() {
        let spin = Spin::new(6);
        let rep = build_spin_rep(spin);
        // θ = 0: purely the field term, diagonal.
        let diag = hamiltonian(&ChainSpec::new(spin, 0.0, 2, 1).unwrap(), &rep);
        assert_eq!(diag, rep.j3);
        // Generic θ: hopping sin(2θ)/2·√((n+1)(2s−n)) on the off-diagonal and
        // spectrum {k − s} regardless of the angle.
        let spec = ChainSpec::new(spin, 0.37, 2, 1).unwrap();
        let h = hamiltonian(&spec, &rep);
        let beta = (2.0 * spec.theta).sin();
        for n in 0..6usize {
            let amp = beta / 2.0 * ((n as f64 + 1.0) * (6.0 - n as f64)).sqrt();
            assert!((h[(n, n + 1)] - amp).norm() < 1e-13);
        }
        let (vals, _) = hermitian_eigen(&h).unwrap();
        for (k, v) in vals.iter().enumerate() {
            assert!((v - (k as f64 - spin.s())).abs() < 1e-10);
        }
    }

    #[test]
    fn correlation_is_a_rank_k_projector() {
        let spec = fixture();
        let corr = correlation(&spec).unwrap();
        let sq = &corr.full * &corr.full;
        assert!(max_entry_gap(&sq, &corr.full) < 1e-10);
        let trace: Complex = (0..corr.full.rows()).map(|i| corr.full[(i, i)]).sum();
        assert!((trace - (spec.fermi as f64 + 1.0)).norm() < 1e-10);
        let (lam, _) = hermitian_eigen(&corr.chopped).unwrap();
        for v in lam {
            assert!(v > -1e-10 && v < 1.0 + 1e-10);
        }
    }

    #[test]
    fn filled_band_and_full_cut_are_pure() {
        let spin = Spin::new(8);
        // All modes filled: the projector is the identity.
        let filled = ChainSpec::new(spin, 0.9, 8, 3).unwrap();
        let corr = correlation(&filled).unwrap();
        assert!(max_entry_gap(&corr.full, &CMatrix::identity(spin.dim())) < 1e-10);
        assert!(entanglement_entropy(&filled).unwrap() < 1e-8);
        // Cut the whole chain: chopped = full, occupations in {0, 1}.
        let whole = ChainSpec::new(spin, 0.9, 3, 8).unwrap();
        assert!(entanglement_entropy(&whole).unwrap() < 1e-8);
    }

    #[test]
    fn correlation_matches_the_krawtchouk_sum() {
        // Independent construction of the chopped entries: the overlap
        // products summed over the Fermi sea,
        // C_mn = Σ_{k≤K} √(binom_m binom_n)·binom(2s,k)·(sin²θ)^{2s}
        //        ·|cot θ|^{2k−m−n}·K_m(2s−k)K_n(2s−k).
        let spec = ChainSpec::new(Spin::new(8), 0.7, 3, 8).unwrap();
        let two_s = spec.spin.two_s;
        let corr = correlation(&spec).unwrap();
        let sin = spec.theta.sin();
        let cot = spec.theta.cos() / sin;
        let p = sin * sin;
        let mut worst = 0.0f64;
        for m in 0..=two_s {
            for n in 0..=two_s {
                let mut val = 0.0f64;
                for k in 0..=spec.fermi {
                    val += (binom(two_s, m) * binom(two_s, n)).sqrt()
                        * binom(two_s, k)
                        * p.powi(two_s as i32)
                        * cot.powi((2 * k) as i32 - m as i32 - n as i32)
                        * krawtchouk_poly(m, (two_s - k) as i64, p, two_s).unwrap()
                        * krawtchouk_poly(n, (two_s - k) as i64, p, two_s).unwrap();
                }
                worst = worst.max((corr.full[(m as usize, n as usize)] - val).norm());
            }
        }
        assert!(worst < 1e-9, "entry gap {worst:.3e}");
    }

    #[test]
    fn commuting_t_splits_at_the_cut() {
        let spec = fixture();
        let rep = build_spin_rep(spec.spin);
        let t = commuting_t(&spec, &rep);
        // Tridiagonal, Hermitian, and decoupled exactly at n = ℓ.
        for i in 0..t.rows() {
            for j in 0..t.cols() {
                if i.abs_diff(j) > 1 {
                    assert!(t[(i, j)].norm() < 1e-12);
                }
                assert!((t[(i, j)] - t[(j, i)].conj()).norm() < 1e-12);
            }
        }
        let cut = spec.cut as usize;
        assert!(t[(cut, cut + 1)].norm() < 1e-12);
        let corr = correlation(&spec).unwrap();
        let t_r = leading_block(&t, cut + 1);
        let comm = &(&t_r * &corr.chopped) - &(&corr.chopped * &t_r);
        assert!(comm.max_abs() < 1e-10);
    }

    #[test]
    fn rotated_generators_identify_t_with_the_heun_operator() {
        // Building the Heun operator at the identified (ρ₁, ρ₂) on the
        // rotated triple (J̃₁ = Ĥ, J̃₂ = sin2θ·J₃ − cos2θ·J₁, J̃₃ = −J₂)
        // reproduces T entry by entry: T = sin(2θ)·(W − ρ₅), with
        // ρ₅ = μν/(2 sin 2θ) arising as the *derived* value — no override.
        let spec = ChainSpec::new(Spin::new(7), 0.55, 2, 4).unwrap();
        let rep = build_spin_rep(spec.spin);
        let (mu, nu) = spec.mu_nu();
        let (sin2, cos2) = ((2.0 * spec.theta).sin(), (2.0 * spec.theta).cos());
        let j1 = hamiltonian(&spec, &rep);
        let j2 = &rep.j3.scale(c(sin2, 0.0)) + &rep.j1.scale(c(-cos2, 0.0));
        let rotated = SpinRep {
            spin: spec.spin,
            j_plus: &j1 + &j2.scale(c(0.0, 1.0)),
            j_minus: &j1 - &j2.scale(c(0.0, 1.0)),
            j3: rep.j2.scale(c(-1.0, 0.0)),
            j1,
            j2,
        };
        let p = HeunParams::new(spec.spin, 2.0 * spec.theta, (cos2 * mu + nu) / sin2, mu, 0.0)
            .unwrap();
        assert!((p.rho5() - mu * nu / (2.0 * sin2)).norm() < 1e-12);
        let w = build_w(&p, &rotated).unwrap();
        let id = CMatrix::identity(spec.spin.dim());
        let predicted = (&w - &id.scale(p.rho5())).scale(c(sin2, 0.0));
        let t = commuting_t(&spec, &rep);
        assert!(max_entry_gap(&predicted, &t) < 1e-10);
    }

    #[test]
    fn pt_reconstruction_matches_direct_diagonalization() {
        let spec = fixture();
        let rec = spectrum_via_pt(&spec).unwrap();
        assert!(!rec.degenerate_fallback);
        // Frozen fixture: chopped-C and restricted-T spectra (independent
        // dense diagonalization, 2s = 10, θ = 0.6, K = 4, ℓ = 3).
        let c_frozen = [
            4.8898389784373961e-07,
            0.0011219913736076582,
            0.20370809954554212,
            0.95380578420069684,
        ];
        let t_frozen = [
            -3.1560901643648616,
            3.531923535968843,
            12.370695168225831,
            25.169083255630646,
        ];
        for (got, want) in rec.eigenvalues.iter().zip(&c_frozen) {
            assert!((got - want).abs() < 1e-8, "C eigenvalue {got} vs {want}");
        }
        for (got, want) in rec.t_eigenvalues.iter().zip(&t_frozen) {
            assert!((got - want).abs() < 1e-10);
        }
        // And the matrix-level identity C = P(T_restricted), with P
        // accumulated in the Newton form it was solved in.
        let rep = build_spin_rep(spec.spin);
        let t_r = leading_block(&commuting_t(&spec, &rep), spec.cut as usize + 1);
        let n = t_r.rows();
        let corr = correlation(&spec).unwrap();
        let mut p_of_t = CMatrix::identity(n).scale(c(rec.coefficients[n - 1], 0.0));
        for k in (0..n - 1).rev() {
            let shifted = &t_r - &CMatrix::identity(n).scale(c(rec.nodes[k], 0.0));
            p_of_t =
                &(&p_of_t * &shifted) + &CMatrix::identity(n).scale(c(rec.coefficients[k], 0.0));
        }
        assert!(max_entry_gap(&p_of_t, &corr.chopped) < 1e-8);
        // Scalar evaluation of the Newton form reproduces the spectrum on a
        // chain this short.
        let mut scalar: Vec<f64> = rec
            .t_eigenvalues
            .iter()
            .map(|&t| rec.evaluate(t).unwrap())
            .collect();
        scalar.sort_by(f64::total_cmp);
        for (got, want) in scalar.iter().zip(&rec.eigenvalues) {
            assert!((got - want).abs() < 1e-10);
        }
    }

    #[test]
    fn pt_on_a_single_site_is_the_constant() {
        let spec = ChainSpec::new(Spin::new(6), 0.8, 2, 0).unwrap();
        let rec = spectrum_via_pt(&spec).unwrap();
        let corr = correlation(&spec).unwrap();
        assert_eq!(rec.coefficients.len(), 1);
        assert!((rec.coefficients[0] - corr.chopped[(0, 0)].re).abs() < 1e-14);
    }

    #[test]
    fn decoupled_chain_has_no_reconstruction() {
        // θ = 0 kills the hopping: T is diagonal, every pivot ⟨0|Tʳ|r⟩
        // vanishes and the polynomial route must refuse.
        let spec = ChainSpec::new(Spin::new(4), 0.0, 1, 2).unwrap();
        assert!(matches!(
            spectrum_via_pt(&spec),
            Err(ChainError::ZeroPivot { .. })
        ));
    }

    #[test]
    fn entropy_fixture_and_complement_symmetry() {
        let spec = fixture();
        let s = entanglement_entropy(&spec).unwrap();
        assert!((s - 0.70140349004497959).abs() < 1e-10);
        // The ground state is pure, so both sides of the cut agree.
        assert!((s - trailing_entropy(&spec)).abs() < 1e-8);
    }

    #[test]
    fn bethe_route_reproduces_the_restricted_t() {
        for (two_s, theta, fermi, cut) in [(6u32, 0.5, 2u32, 2u32), (10, 0.6, 4, 3)] {
            let spec = ChainSpec::new(Spin::new(two_s), theta, fermi, cut).unwrap();
            let vals = t_spectrum_via_bethe(&spec).unwrap();
            assert_eq!(vals.len(), cut as usize + 1);
            let rep = build_spin_rep(spec.spin);
            let t_r = leading_block(&commuting_t(&spec, &rep), cut as usize + 1);
            let (oracle, _) = hermitian_eigen(&t_r).unwrap();
            for (v, o) in vals.iter().zip(&oracle) {
                assert!(
                    (v.t - o).abs() < 1e-7,
                    "t = {} vs oracle {o} at 2s = {two_s}",
                    v.t
                );
                assert!(v.residual < 1e-7, "Bethe defect {:.3e}", v.residual);
                assert_eq!(v.roots.len(), cut as usize);
            }
        }
    }

    #[test]
    fn bethe_route_on_a_single_site_is_rootless() {
        // ℓ = 0: the lowest-weight branch carries no roots and the closed
        // form collapses to t = s·cos2θ + μ(1−ν)/2 = T₀₀.
        let spec = ChainSpec::new(Spin::new(5), 0.8, 3, 0).unwrap();
        let vals = t_spectrum_via_bethe(&spec).unwrap();
        assert_eq!(vals.len(), 1);
        assert!(vals[0].roots.is_empty());
        assert_eq!(vals[0].residual, 0.0);
        let rep = build_spin_rep(spec.spin);
        let t = commuting_t(&spec, &rep);
        assert!((vals[0].t - t[(0, 0)].re).abs() < 1e-8);
    }

    #[test]
    fn empty_filling_confluesces_one_string() {
        // K = 0 puts the lowest-branch exponent at −(ℓ−1): one of the ℓ+1
        // strings collapses onto z̄ = 1 entirely. Its t value is still exact.
        let spec = ChainSpec::new(Spin::new(6), 0.5, 0, 3).unwrap();
        let vals = t_spectrum_via_bethe(&spec).unwrap();
        assert_eq!(vals.len(), 4);
        let confluent: Vec<_> = vals
            .iter()
            .filter(|v| v.roots.iter().all(|&z| z == Complex::ONE))
            .collect();
        assert_eq!(confluent.len(), 1);
        let rep = build_spin_rep(spec.spin);
        let t_r = leading_block(&commuting_t(&spec, &rep), 4);
        let (oracle, _) = hermitian_eigen(&t_r).unwrap();
        for (v, o) in vals.iter().zip(&oracle) {
            assert!((v.t - o).abs() < 1e-7, "t = {} vs oracle {o}", v.t);
            assert!(v.residual < 1e-7);
        }
    }

    #[test]
    fn full_cut_leaves_the_truncation_grid() {
        // ℓ = 2s puts 𝓜 = −1: not a homogeneous point, and the Bethe route
        // says so rather than inventing a branch.
        let spec = ChainSpec::new(Spin::new(4), 0.7, 1, 4).unwrap();
        assert!(matches!(
            t_spectrum_via_bethe(&spec),
            Err(ChainError::Bethe(BetheError::NotHomogeneous { .. }))
        ));
    }

    #[test]
    fn spec_constructor_range_checks() {
        assert!(ChainSpec::new(Spin::new(4), 0.7, 5, 1).is_err());
        assert!(ChainSpec::new(Spin::new(4), 0.7, 1, 5).is_err());
        assert!(ChainSpec::new(Spin::new(4), f64::NAN, 1, 1).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        /// Structural invariants across the parameter box: projector algebra,
        /// exact commutation at the cut, agreement of the polynomial route
        /// with direct diagonalization, and purity of the global state
        /// (complementary cuts share their entropy).
        #[test]
        fn prop_chain_invariants(
            two_s in 1u32..=20,
            theta in 0.15f64..1.4,
            fermi_frac in 0.0f64..1.0,
            cut_frac in 0.0f64..1.0,
        ) {
            let fermi = (fermi_frac * two_s as f64).round() as u32;
            let cut = (cut_frac * two_s as f64).round() as u32;
            let spec = ChainSpec::new(Spin::new(two_s), theta, fermi, cut).unwrap();
            let corr = correlation(&spec).unwrap();
            let sq = &corr.full * &corr.full;
            prop_assert!(max_entry_gap(&sq, &corr.full) < 1e-10);
            let rep = build_spin_rep(spec.spin);
            let t_r = leading_block(&commuting_t(&spec, &rep), cut as usize + 1);
            let comm = &(&t_r * &corr.chopped) - &(&corr.chopped * &t_r);
            prop_assert!(comm.max_abs() < 1e-10);
            let rec = spectrum_via_pt(&spec).unwrap();
            let (direct, _) = hermitian_eigen(&corr.chopped).unwrap();
            for (got, want) in rec.eigenvalues.iter().zip(&direct) {
                prop_assert!((got - want).abs() < 1e-8);
            }
            let s = entanglement_entropy(&spec).unwrap();
            prop_assert!(s >= 0.0);
            prop_assert!((s - trailing_entropy(&spec)).abs() < 1e-8);
        }
    }
}
