//! Exact arithmetic in F_p and F_{p^2}, and dense univariate polynomials
//! over F_p.
//!
//! Everything downstream (q-series, trace formulas, divisor polynomials)
//! reduces to the arithmetic defined here. Values are immutable and `Copy`
//! where possible; no operation mutates its inputs.

mod factor;
mod poly;

pub use factor::{poly_factor, Factorization};
pub use poly::FpPolynomial;

use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is smaller than 5")]
    ModulusTooSmall(u64),
    #[error("division by the zero polynomial")]
    DivisionByZeroPoly,
    #[error("the zero polynomial cannot be factored")]
    ZeroPolynomial,
    #[error("power-mod modulus must have degree at least 1")]
    ConstantModulus,
}

/// A prime p >= 5, validated at construction.
///
/// Primality is checked by trial division; the moduli in play here are
/// desk-scale, far below where that matters.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p < 5 {
            return Err(FieldError::ModulusTooSmall(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(PrimeModulus(p))
    }

    pub fn value(self) -> u64 {
        self.0
    }

    /// Canonical residue of `v`.
    pub fn element(self, v: u64) -> FpElement {
        FpElement {
            value: v % self.0,
            modulus: self,
        }
    }

    /// Canonical residue of a signed integer.
    pub fn element_from_signed(self, v: i64) -> FpElement {
        let p = self.0 as i64;
        FpElement {
            value: v.rem_euclid(p) as u64,
            modulus: self,
        }
    }

    pub fn zero(self) -> FpElement {
        self.element(0)
    }

    pub fn one(self) -> FpElement {
        self.element(1)
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// A residue in F_p, stored canonically in [0, p).
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub struct FpElement {
    value: u64,
    modulus: PrimeModulus,
}

impl FpElement {
    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> PrimeModulus {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, mut e: u128) -> FpElement {
        let p = self.modulus.0;
        let mut base = self.value;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(acc, base, p);
            }
            base = mul_mod(base, base, p);
            e >>= 1;
        }
        self.modulus.element(acc)
    }

    /// Multiplicative inverse via Fermat: a^(p-2).
    ///
    /// Panics on zero.
    pub fn inv(self) -> FpElement {
        assert!(!self.is_zero(), "inverse of zero in F_{}", self.modulus);
        self.pow((self.modulus.0 - 2) as u128)
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn check_same_modulus(a: FpElement, b: FpElement) {
    assert_eq!(
        a.modulus, b.modulus,
        "mixed moduli: {} vs {}",
        a.modulus, b.modulus
    );
}

impl std::ops::Add for FpElement {
    type Output = FpElement;
    fn add(self, rhs: FpElement) -> FpElement {
        check_same_modulus(self, rhs);
        let p = self.modulus.0;
        let mut v = self.value + rhs.value;
        if v >= p {
            v -= p;
        }
        FpElement {
            value: v,
            modulus: self.modulus,
        }
    }
}

impl std::ops::Sub for FpElement {
    type Output = FpElement;
    fn sub(self, rhs: FpElement) -> FpElement {
        check_same_modulus(self, rhs);
        let p = self.modulus.0;
        let v = if self.value >= rhs.value {
            self.value - rhs.value
        } else {
            self.value + p - rhs.value
        };
        FpElement {
            value: v,
            modulus: self.modulus,
        }
    }
}

impl std::ops::Mul for FpElement {
    type Output = FpElement;
    fn mul(self, rhs: FpElement) -> FpElement {
        check_same_modulus(self, rhs);
        FpElement {
            value: mul_mod(self.value, rhs.value, self.modulus.0),
            modulus: self.modulus,
        }
    }
}

impl std::ops::Neg for FpElement {
    type Output = FpElement;
    fn neg(self) -> FpElement {
        if self.value == 0 {
            self
        } else {
            FpElement {
                value: self.modulus.0 - self.value,
                modulus: self.modulus,
            }
        }
    }
}

impl fmt::Display for FpElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Legendre symbol (a|p) via Euler's criterion a^((p-1)/2).
///
/// Returns 0 iff p | a, 1 iff a is a nonzero square mod p, -1 otherwise.
pub fn legendre_symbol(a: i64, p: PrimeModulus) -> i32 {
    let r = p.element_from_signed(a);
    if r.is_zero() {
        return 0;
    }
    let e = r.pow(((p.value() - 1) / 2) as u128);
    if e.value() == 1 {
        1
    } else {
        -1
    }
}

/// The quadratic extension F_{p^2} = F_p(w) with w^2 = d for the smallest
/// positive non-residue d mod p. Scanning for the smallest d keeps element
/// representations reproducible across runs.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct Fp2 {
    modulus: PrimeModulus,
    nonresidue: u64,
}

/// a + b*w in F_{p^2}.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub struct Fp2Element {
    pub a: FpElement,
    pub b: FpElement,
}

impl Fp2Element {
    pub fn is_zero(self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// True iff the element lies in the base field F_p.
    pub fn is_in_base_field(self) -> bool {
        self.b.is_zero()
    }
}

impl Fp2 {
    pub fn new(modulus: PrimeModulus) -> Fp2 {
        let d = (2..modulus.value())
            .find(|&d| legendre_symbol(d as i64, modulus) == -1)
            .expect("F_p with p >= 5 has a quadratic non-residue");
        Fp2 {
            modulus,
            nonresidue: d,
        }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn nonresidue(&self) -> u64 {
        self.nonresidue
    }

    pub fn element(&self, a: u64, b: u64) -> Fp2Element {
        Fp2Element {
            a: self.modulus.element(a),
            b: self.modulus.element(b),
        }
    }

    pub fn embed(&self, a: FpElement) -> Fp2Element {
        Fp2Element {
            a,
            b: self.modulus.zero(),
        }
    }

    pub fn zero(&self) -> Fp2Element {
        self.element(0, 0)
    }

    pub fn one(&self) -> Fp2Element {
        self.element(1, 0)
    }

    pub fn add(&self, x: Fp2Element, y: Fp2Element) -> Fp2Element {
        Fp2Element {
            a: x.a + y.a,
            b: x.b + y.b,
        }
    }

    pub fn sub(&self, x: Fp2Element, y: Fp2Element) -> Fp2Element {
        Fp2Element {
            a: x.a - y.a,
            b: x.b - y.b,
        }
    }

    pub fn neg(&self, x: Fp2Element) -> Fp2Element {
        Fp2Element { a: -x.a, b: -x.b }
    }

    /// (a + bw)(c + ew) = (ac + be*d) + (ae + bc)w.
    pub fn mul(&self, x: Fp2Element, y: Fp2Element) -> Fp2Element {
        let d = self.modulus.element(self.nonresidue);
        Fp2Element {
            a: x.a * y.a + x.b * y.b * d,
            b: x.a * y.b + x.b * y.a,
        }
    }

    pub fn pow(&self, x: Fp2Element, mut e: u128) -> Fp2Element {
        let mut base = x;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Norm a^2 - d*b^2 down to F_p.
    pub fn norm(&self, x: Fp2Element) -> FpElement {
        let d = self.modulus.element(self.nonresidue);
        x.a * x.a - d * x.b * x.b
    }

    pub fn inv(&self, x: Fp2Element) -> Fp2Element {
        assert!(!x.is_zero(), "inverse of zero in F_{{p^2}}");
        let n = self.norm(x).inv();
        Fp2Element {
            a: x.a * n,
            b: -x.b * n,
        }
    }

    /// The Frobenius x -> x^p, which sends a + bw to a - bw because
    /// w^p = d^((p-1)/2) w = -w.
    pub fn frobenius(&self, x: Fp2Element) -> Fp2Element {
        Fp2Element { a: x.a, b: -x.b }
    }
}
