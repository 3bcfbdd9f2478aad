//! Small fixed-dimension state vectors for one and two qubits.
//!
//! Two-qubit amplitudes are always ordered `|00>, |01>, |10>, |11>`; the
//! first tensor factor is the most significant bit.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Index of each two-qubit basis state in a [`Ket4`].
pub const BASIS_ORDER: [&str; 4] = ["00", "01", "10", "11"];

/// Common behaviour of fixed-dimension kets.
pub trait Ket<T: Real>: Clone + Sized {
    const DIM: usize;

    fn amplitudes(&self) -> &[Complex<T>];

    fn zero() -> Self;

    fn from_fn(f: impl FnMut(usize) -> Complex<T>) -> Self;

    fn norm_sqr(&self) -> T {
        self.amplitudes().iter().map(|a| a.norm_sqr()).sum()
    }

    fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    fn scale(&self, k: Complex<T>) -> Self {
        let a = self.amplitudes();
        Self::from_fn(|i| a[i] * k)
    }

    fn add(&self, other: &Self) -> Self {
        let (a, b) = (self.amplitudes(), other.amplitudes());
        Self::from_fn(|i| a[i] + b[i])
    }

    fn sub(&self, other: &Self) -> Self {
        let (a, b) = (self.amplitudes(), other.amplitudes());
        Self::from_fn(|i| a[i] - b[i])
    }
}

/// Single-qubit ket in the computational basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ket2<T> {
    pub amps: [Complex<T>; 2],
}

/// Two-qubit ket in the basis `|00>, |01>, |10>, |11>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ket4<T> {
    pub amps: [Complex<T>; 4],
}

impl<T: Real> Ket<T> for Ket2<T> {
    const DIM: usize = 2;

    fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    fn zero() -> Self {
        Self {
            amps: [Complex::new(T::zero(), T::zero()); 2],
        }
    }

    fn from_fn(mut f: impl FnMut(usize) -> Complex<T>) -> Self {
        Self { amps: [f(0), f(1)] }
    }
}

impl<T: Real> Ket<T> for Ket4<T> {
    const DIM: usize = 4;

    fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    fn zero() -> Self {
        Self {
            amps: [Complex::new(T::zero(), T::zero()); 4],
        }
    }

    fn from_fn(mut f: impl FnMut(usize) -> Complex<T>) -> Self {
        Self {
            amps: [f(0), f(1), f(2), f(3)],
        }
    }
}

impl<T: Real> Ket2<T> {
    pub fn new(a0: Complex<T>, a1: Complex<T>) -> Self {
        Self { amps: [a0, a1] }
    }

    pub fn real(a0: T, a1: T) -> Self {
        Self::new(Complex::new(a0, T::zero()), Complex::new(a1, T::zero()))
    }

    /// `|0>`
    pub fn zero_state() -> Self {
        Self::real(T::one(), T::zero())
    }

    /// `|1>`
    pub fn one_state() -> Self {
        Self::real(T::zero(), T::one())
    }

    /// `cos(angle)|0> + sin(angle)|1>`: a real state in the x-z plane,
    /// measured from `|0>` towards `|1>`.
    pub fn planar(angle: T) -> Self {
        Self::real(angle.cos(), angle.sin())
    }
}

impl<T: Real> Ket4<T> {
    pub fn new(amps: [Complex<T>; 4]) -> Self {
        Self { amps }
    }

    pub fn real(a: [T; 4]) -> Self {
        Self::from_fn(|i| Complex::new(a[i], T::zero()))
    }

    /// Computational basis state `|b0 b1>`.
    pub fn basis(b0: usize, b1: usize) -> Self {
        let idx = 2 * b0 + b1;
        Self::from_fn(|i| {
            if i == idx {
                Complex::new(T::one(), T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })
    }
}

/// `<bra|ket>`, conjugate-linear in `bra`.
pub fn inner_product<T: Real, K: Ket<T>>(bra: &K, ket: &K) -> Complex<T> {
    bra.amplitudes()
        .iter()
        .zip(ket.amplitudes())
        .fold(Complex::new(T::zero(), T::zero()), |acc, (b, k)| {
            acc + b.conj() * k
        })
}

/// `x ⊗ y` with component `(i, j)` stored at index `2i + j`.
pub fn tensor_product<T: Real>(x: &Ket2<T>, y: &Ket2<T>) -> Ket4<T> {
    Ket4::from_fn(|k| x.amps[k / 2] * y.amps[k % 2])
}

/// `Σ coeffs[i] · kets[i]`, without normalization.
pub fn linear_combination<T: Real, K: Ket<T>>(coeffs: &[Complex<T>], kets: &[K]) -> Result<K> {
    if coeffs.is_empty() {
        return Err(Error::Usage("linear combination of zero kets".into()));
    }
    if coeffs.len() != kets.len() {
        return Err(Error::Usage(format!(
            "{} coefficients for {} kets",
            coeffs.len(),
            kets.len()
        )));
    }
    Ok(coeffs
        .iter()
        .zip(kets)
        .fold(K::zero(), |acc, (c, k)| acc.add(&k.scale(*c))))
}
