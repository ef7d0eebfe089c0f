//! Finite-dimensional irreducible representations of su(2).
//!
//! The representation of spin `s` acts on the `2s + 1` weight vectors
//! `|s, m⟩`, ordered from the highest weight down: row `n` of every matrix
//! corresponds to `m = s − n`. With that ordering `j3` is diagonal with
//! entries `s, s−1, …, −s`, the raising operator `j_plus` sits on the first
//! superdiagonal with the usual `√(n(2s−n+1))` matrix elements, and
//! `j1, j2, j3` are Hermitian and satisfy `[j1, j2] = i·j3` cyclically.

use crate::linalg_core::{c, CMatrix, Complex};

/// A spin label, stored as `2s` so half-integer spins stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Spin {
    pub two_s: u32,
}

impl Spin {
    pub fn new(two_s: u32) -> Self {
        Self { two_s }
    }

    /// The spin value `s` as a float.
    pub fn s(self) -> f64 {
        self.two_s as f64 / 2.0
    }

    /// Dimension of the irreducible representation, `2s + 1`.
    pub fn dim(self) -> usize {
        self.two_s as usize + 1
    }

    /// Whether `s` is an integer (as opposed to half-odd-integer).
    pub fn is_integer(self) -> bool {
        self.two_s % 2 == 0
    }
}

impl std::fmt::Display for Spin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.two_s / 2)
        } else {
            write!(f, "{}/2", self.two_s)
        }
    }
}

/// The generator matrices of one spin-`s` irreducible representation.
#[derive(Debug, Clone)]
pub struct SpinRep {
    pub spin: Spin,
    /// Hermitian generator `(j_plus + j_minus)/2`.
    pub j1: CMatrix,
    /// Hermitian generator `(j_plus − j_minus)/(2i)`.
    pub j2: CMatrix,
    /// Diagonal weight generator, entries `s, s−1, …, −s`.
    pub j3: CMatrix,
    /// Raising operator (moves weight `m → m + 1`).
    pub j_plus: CMatrix,
    /// Lowering operator, the adjoint of `j_plus`.
    pub j_minus: CMatrix,
}

impl SpinRep {
    pub fn dim(&self) -> usize {
        self.spin.dim()
    }

    /// The quadratic Casimir `j1² + j2² + j3²`, equal to `s(s+1)·I` here.
    pub fn casimir(&self) -> CMatrix {
        let sq = |m: &CMatrix| m * m;
        &(&sq(&self.j1) + &sq(&self.j2)) + &sq(&self.j3)
    }
}

/// Builds the spin-`s` representation in the descending-weight basis.
pub fn build_spin_rep(spin: Spin) -> SpinRep {
    let d = spin.dim();
    let two_s = spin.two_s as f64;
    let s = spin.s();

    // ⟨s, m+1| J₊ |s, m⟩ = √(s(s+1) − m(m+1)) = √(n(2s − n + 1)) with
    // n = s − m the row index of the *target* weight.
    let mut j_plus = CMatrix::zeros(d, d);
    for n in 1..d {
        let nf = n as f64;
        j_plus[(n - 1, n)] = c((nf * (two_s - nf + 1.0)).sqrt(), 0.0);
    }
    let j_minus = j_plus.adjoint();
    let j3 = CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            c(s - i as f64, 0.0)
        } else {
            Complex::ZERO
        }
    });
    let j1 = (&j_plus + &j_minus).scale(c(0.5, 0.0));
    let j2 = (&j_plus - &j_minus).scale(c(0.0, -0.5));

    SpinRep {
        spin,
        j1,
        j2,
        j3,
        j_plus,
        j_minus,
    }
}
