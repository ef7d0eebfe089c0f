//! Construction of the algebraic Heun operator of Lie type and its relatives.
//!
//! The central object is
//!
//! ```text
//! W = ρ₁J₁ + ρ₂J₂ + ρ₃J₃ + {J₁, J₂} + ρ₄J₁² + ρ₅·I
//! ```
//!
//! acting in a spin-`s` representation, with the quadratic coefficients tied
//! to a unimodular deformation parameter `a = e^{iφ}`:
//! `ρ₄ = 2i(a²+1)/(a²−1) = 2·cot φ` and
//! `ρ₅ = ρ₁ρ₂/2 − ρ₂²ρ₄/4`, both real for real φ, so `W` is Hermitian.
//! The module also builds the operator `E = 4(J₁² + rJ₂²)` (quantum Euler
//! top / non-subgroup-type O(3) basis), the tridiagonal chain operator
//! `T = {Ĥ, J₃} + μJ₃ + νĤ`, a site-basis tridiagonal realization of `W`
//! itself, and wraps the dense diagonalization oracle every other spectral
//! route is measured against.

use crate::linalg_core::{anticommutator, c, commutator, CMatrix, Complex, LinalgError};
use crate::spin_rep::{Spin, SpinRep};

/// Errors from operator construction.
#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum HeunOperatorError {
    /// Parameter bundle and representation carry different spins.
    #[error("spin mismatch: parameters carry s = {params}, representation carries s = {rep}")]
    SpinMismatch { params: Spin, rep: Spin },
    /// The bilinear form's first factor X = αJ₁ + βJ₂ collapsed to zero.
    #[error("X = \u{3b1}J\u{2081} + \u{3b2}J\u{2082} is degenerate: \u{3b1} = \u{3b2} = 0")]
    DegenerateX,
    /// A chain index escaped its admissible range.
    #[error("{name} = {value} outside 0..={bound}")]
    IndexOutOfRange {
        name: &'static str,
        value: u32,
        bound: u32,
    },
    /// The phase must lie strictly between 0 and π so that a = e^{iφ} ≠ ±1.
    #[error("phase \u{3c6} = {phi} outside the open interval (0, \u{3c0})")]
    PhaseOutOfRange { phi: f64 },
    /// General deformation parameters may not sit on the singular set.
    #[error("deformation parameter a = {a} too close to the singular set {{0, 1, -1}}")]
    SingularDeformation { a: Complex },
    /// The requested construction only exists for unimodular a = e^{iφ}.
    #[error("operation requires a unimodular deformation a = e^{{i\u{3c6}}}, got a = {a}")]
    PhaseRequired { a: Complex },
}

/// How a [`Spectrum`] was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumMethod {
    /// Dense Hermitian diagonalization.
    Oracle,
    /// Modified algebraic Bethe ansatz.
    Bethe,
    /// Bargmann (differential-operator) realization.
    Bargmann,
}

impl std::fmt::Display for SpectrumMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SpectrumMethod::Oracle => "oracle",
            SpectrumMethod::Bethe => "bethe",
            SpectrumMethod::Bargmann => "bargmann",
        })
    }
}

/// A real spectrum, ascending, tagged with the route that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub method: SpectrumMethod,
}

/// Parameter bundle for the algebraic Heun operator.
///
/// The structural constructor [`HeunParams::new`] takes the phase `φ ∈ (0, π)`
/// and sets `a = e^{iφ}`, which keeps `ρ₄`, `ρ₅` real and `W` Hermitian.
/// [`HeunParams::with_general_a`] is the expert escape hatch for constructions
/// (such as the Euler-top operator `E` with `0 < r < 1`) that analytically
/// continue to real `a`; spectra built that way are compared as multisets,
/// never fed to the Hermitian oracle.
///
/// `φ = π/2` (that is, `a = i`) needs no special handling: the `a² − 1`
/// denominators equal `−2` there, and `ρ₄ = 2·cot(π/2) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeunParams {
    pub spin: Spin,
    /// Deformation parameter; unimodular unless built via the escape hatch.
    pub a: Complex,
    /// The phase with `a = e^{iφ}`, when the structural constructor was used.
    pub phi: Option<f64>,
    pub rho1: f64,
    pub rho2: f64,
    pub rho3: f64,
    /// Replaces the derived `ρ₅` (a constant shift of the spectrum) when set.
    pub rho5_override: Option<f64>,
}

impl HeunParams {
    /// Standard constructor: `a = e^{iφ}` with `φ` strictly inside `(0, π)`.
    pub fn new(
        spin: Spin,
        phi: f64,
        rho1: f64,
        rho2: f64,
        rho3: f64,
    ) -> Result<Self, HeunOperatorError> {
        if !(phi > 0.0 && phi < std::f64::consts::PI) || !phi.is_finite() {
            return Err(HeunOperatorError::PhaseOutOfRange { phi });
        }
        Ok(Self {
            spin,
            a: Complex::from_polar(1.0, phi),
            phi: Some(phi),
            rho1,
            rho2,
            rho3,
            rho5_override: None,
        })
    }

    /// Escape hatch accepting any deformation parameter off the singular set
    /// `{0, 1, −1}`. Operators built from non-unimodular `a` are generally not
    /// Hermitian; only their spectra (computed by non-Hermitian means) are
    /// meaningful.
    pub fn with_general_a(
        spin: Spin,
        a: Complex,
        rho1: f64,
        rho2: f64,
        rho3: f64,
    ) -> Result<Self, HeunOperatorError> {
        let singular = a.norm() < 1e-12
            || (a - Complex::ONE).norm() < 1e-12
            || (a + Complex::ONE).norm() < 1e-12;
        if singular || !a.re.is_finite() || !a.im.is_finite() {
            return Err(HeunOperatorError::SingularDeformation { a });
        }
        Ok(Self {
            spin,
            a,
            phi: None,
            rho1,
            rho2,
            rho3,
            rho5_override: None,
        })
    }

    /// Overrides the derived `ρ₅`; shifts every eigenvalue by a constant.
    pub fn with_rho5(mut self, rho5: f64) -> Self {
        self.rho5_override = Some(rho5);
        self
    }

    /// `ρ₄ = 2i(a² + 1)/(a² − 1)`, which is `2·cot φ` for `a = e^{iφ}`.
    pub fn rho4(&self) -> Complex {
        let a2 = self.a * self.a;
        c(0.0, 2.0) * (a2 + 1.0) / (a2 - 1.0)
    }

    /// `ρ₅ = ρ₁ρ₂/2 − ρ₂²ρ₄/4` unless overridden.
    pub fn rho5(&self) -> Complex {
        if let Some(r5) = self.rho5_override {
            return c(r5, 0.0);
        }
        c(self.rho1 * self.rho2 / 2.0, 0.0) - self.rho4().scale(self.rho2 * self.rho2 / 4.0)
    }

    fn check_rep(&self, rep: &SpinRep) -> Result<(), HeunOperatorError> {
        if rep.spin != self.spin {
            return Err(HeunOperatorError::SpinMismatch {
                params: self.spin,
                rep: rep.spin,
            });
        }
        Ok(())
    }
}

/// `W = ρ₁J₁ + ρ₂J₂ + ρ₃J₃ + {J₁,J₂} + ρ₄J₁² + ρ₅·I` in the given
/// representation. Hermitian whenever the parameters came from a phase.
pub fn build_w(p: &HeunParams, rep: &SpinRep) -> Result<CMatrix, HeunOperatorError> {
    p.check_rep(rep)?;
    let d = rep.dim();
    let mut w = rep.j1.scale(c(p.rho1, 0.0));
    w = &w + &rep.j2.scale(c(p.rho2, 0.0));
    w = &w + &rep.j3.scale(c(p.rho3, 0.0));
    w = &w + &anticommutator(&rep.j1, &rep.j2).expect("same-dimension generators");
    w = &w + &(&rep.j1 * &rep.j1).scale(p.rho4());
    w = &w + &CMatrix::identity(d).scale(p.rho5());
    Ok(w)
}

/// The bilinear presentation `r₁[X,Y] + r₂{X,Y} + r₃X + r₄Y + r₅·I` with
/// `X = αJ₁ + βJ₂` and `Y = J₁`. Choosing `β = 1`, `α = ρ₄/2` and
/// `r = (0, 1, ρ₂, ρ₁ − ρ₂ρ₄/2, ρ₅)` reproduces [`build_w`] at `ρ₃ = 0`.
pub fn build_w_bilinear(
    alpha: f64,
    beta: f64,
    r: [f64; 5],
    rep: &SpinRep,
) -> Result<CMatrix, HeunOperatorError> {
    if alpha == 0.0 && beta == 0.0 {
        return Err(HeunOperatorError::DegenerateX);
    }
    let x = &rep.j1.scale(c(alpha, 0.0)) + &rep.j2.scale(c(beta, 0.0));
    let y = &rep.j1;
    let mut w = commutator(&x, y)
        .expect("same-dimension generators")
        .scale(c(r[0], 0.0));
    w = &w + &anticommutator(&x, y)
        .expect("same-dimension generators")
        .scale(c(r[1], 0.0));
    w = &w + &x.scale(c(r[2], 0.0));
    w = &w + &y.scale(c(r[3], 0.0));
    w = &w + &CMatrix::identity(rep.dim()).scale(c(r[4], 0.0));
    Ok(w)
}

/// `E = 4(J₁² + rJ₂²)`: the quantum Euler top / non-subgroup O(3) basis
/// operator. Hermitian for every `r`; the anisotropy is meaningful for
/// `0 < r ≤ 1`.
pub fn build_e(spin: Spin, r: f64, rep: &SpinRep) -> Result<CMatrix, HeunOperatorError> {
    if rep.spin != spin {
        return Err(HeunOperatorError::SpinMismatch {
            params: spin,
            rep: rep.spin,
        });
    }
    assert!(r > 0.0, "anisotropy r must be positive, got {r}");
    let j1sq = &rep.j1 * &rep.j1;
    let j2sq = &rep.j2 * &rep.j2;
    Ok((&j1sq + &j2sq.scale(c(r, 0.0))).scale(c(4.0, 0.0)))
}

/// The tridiagonal chain operator `T = {Ĥ, J₃} + μJ₃ + νĤ` with
/// `Ĥ = cos(2θ)J₃ + sin(2θ)J₁`, `μ = 2s − 2K − 1`, `ν = 2ℓ + 1 − 2s`.
pub fn build_t_kraw(
    spin: Spin,
    theta: f64,
    fermi: u32,
    cut: u32,
    rep: &SpinRep,
) -> Result<CMatrix, HeunOperatorError> {
    if rep.spin != spin {
        return Err(HeunOperatorError::SpinMismatch {
            params: spin,
            rep: rep.spin,
        });
    }
    if fermi > spin.two_s {
        return Err(HeunOperatorError::IndexOutOfRange {
            name: "fermi index K",
            value: fermi,
            bound: spin.two_s,
        });
    }
    if cut > spin.two_s {
        return Err(HeunOperatorError::IndexOutOfRange {
            name: "cut \u{2113}",
            value: cut,
            bound: spin.two_s,
        });
    }
    let mu = spin.two_s as f64 - 2.0 * fermi as f64 - 1.0;
    let nu = 2.0 * cut as f64 + 1.0 - spin.two_s as f64;
    let h = &rep.j3.scale(c((2.0 * theta).cos(), 0.0))
        + &rep.j1.scale(c((2.0 * theta).sin(), 0.0));
    let mut t = anticommutator(&h, &rep.j3).expect("same-dimension generators");
    t = &t + &rep.j3.scale(c(mu, 0.0));
    t = &t + &h.scale(c(nu, 0.0));
    Ok(t)
}

/// Site-basis tridiagonal realization of `W`: a matrix unitarily equivalent
/// to [`build_w`] whose only nonzero entries sit on the three central
/// diagonals.
///
/// The rotation `(J₁,J₂,J₃) → (sinφ·J₁ + cosφ·J₃, −cosφ·J₁ + sinφ·J₃, −J₂)`
/// is proper, so applying it inside `W` preserves the spectrum while turning
/// the quadratic part into `{Ĥ, J₃}/sinφ` with `Ĥ = cosφ·J₃ + sinφ·J₁`:
///
/// ```text
/// W ≅ ({Ĥ,J₃} + ρ₂J₃ + (ρ₁sinφ − ρ₂cosφ)Ĥ − ρ₃sinφ·J₂) / sinφ + ρ₅·I ,
/// ```
///
/// finally conjugated by the site-reversal permutation so that when the
/// nearest-neighbour coupling degenerates it does so between sites `M` and
/// `M+1` (counting from zero), splitting the chain into a block of `M+1`
/// sites and its complement.
pub fn tridiagonal_w(p: &HeunParams, rep: &SpinRep) -> Result<CMatrix, HeunOperatorError> {
    p.check_rep(rep)?;
    let phi = p.phi.ok_or(HeunOperatorError::PhaseRequired { a: p.a })?;
    let (sin_phi, cos_phi) = phi.sin_cos();
    let d = rep.dim();
    let h = &rep.j3.scale(c(cos_phi, 0.0)) + &rep.j1.scale(c(sin_phi, 0.0));
    let mut t = anticommutator(&h, &rep.j3).expect("same-dimension generators");
    t = &t + &rep.j3.scale(c(p.rho2, 0.0));
    t = &t + &h.scale(c(p.rho1 * sin_phi - p.rho2 * cos_phi, 0.0));
    t = &t - &rep.j2.scale(c(p.rho3 * sin_phi, 0.0));
    let m = &t.scale(c(1.0 / sin_phi, 0.0)) + &CMatrix::identity(d).scale(p.rho5());
    let rev = CMatrix::from_fn(d, d, |i, j| {
        if i + j == d - 1 {
            Complex::ONE
        } else {
            Complex::ZERO
        }
    });
    Ok(&(&rev * &m) * &rev)
}

/// Dense Hermitian diagonalization: the ground truth against which the Bethe
/// and Bargmann routes are checked.
pub fn oracle_spectrum(m: &CMatrix) -> Result<Spectrum, LinalgError> {
    let (eigenvalues, _) = crate::linalg_core::hermitian_eigen(m)?;
    Ok(Spectrum {
        eigenvalues,
        method: SpectrumMethod::Oracle,
    })
}
