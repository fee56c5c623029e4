//! Divisor polynomials of modular forms mod p.
//!
//! Every form f of even weight k >= 4 decomposes as
//! f = Delta^m E4^delta E6^eps F(f; j) with k = 12m + 4*delta + 6*eps, and
//! F(f; x) is its divisor polynomial: degree <= m, with degree exactly m
//! and leading coefficient equal to f's constant term when that constant
//! is nonzero. This module extracts F from a truncated q-expansion and
//! implements the product laws that move divisor polynomials between
//! weights congruent mod p - 1.

use crate::finite_field::{FpPolynomial, PrimeModulus};
use crate::qseries::{
    delta_series, eisenstein_series, j_series, Eisenstein, LaurentExpansion, QExpansion,
};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DivisorError {
    #[error("weight must be an even integer >= 4, got {0}")]
    InvalidWeight(i64),
    #[error("series has precision {got} but the weight-{k} extraction needs {need}")]
    InsufficientPrecision { k: u64, need: usize, got: usize },
    #[error("series weight tag {got} does not match profile weight {want}")]
    WeightMismatch { want: u64, got: i64 },
    #[error(
        "residual after extraction is nonzero at q^{exponent}: the series is not the \
         reduction of a weight-{k} form to this precision"
    )]
    NonmodularResidual { k: u64, exponent: i64 },
}

/// The unique decomposition k = 12m + 4*delta + 6*eps.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct WeightProfile {
    pub k: u64,
    pub m: u64,
    pub delta: u8,
    pub eps: u8,
}

pub fn weight_profile(k: u64) -> Result<WeightProfile, DivisorError> {
    if k < 4 || k % 2 != 0 {
        return Err(DivisorError::InvalidWeight(k as i64));
    }
    let delta = match k % 6 {
        0 => 0u8,
        4 => 1,
        2 => 2,
        _ => unreachable!("k is even"),
    };
    let eps = match k % 4 {
        0 => 0u8,
        2 => 1,
        _ => unreachable!("k is even"),
    };
    let m = (k - 4 * delta as u64 - 6 * eps as u64) / 12;
    debug_assert_eq!(k, 12 * m + 4 * delta as u64 + 6 * eps as u64);
    Ok(WeightProfile { k, m, delta, eps })
}

/// A form's weight profile together with its divisor polynomial: the input
/// q-expansion equals Delta^m E4^delta E6^eps F(j) through q^m.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DivisorDecomposition {
    pub profile: WeightProfile,
    pub poly: FpPolynomial,
}

/// Extracts the divisor polynomial by greedy elimination: form
/// L = f * (Delta^m E4^delta E6^eps)^{-1}, a Laurent expansion supported in
/// exponents >= -m, then peel coefficients of j^d for d = m down to 0.
/// The residual must vanish through q^0, which certifies the recomposition
/// through q^m.
pub fn divisor_polynomial(
    f: &QExpansion,
    profile: WeightProfile,
) -> Result<DivisorDecomposition, DivisorError> {
    let k = profile.k;
    let m = profile.m as usize;
    if f.weight() != k as i64 {
        return Err(DivisorError::WeightMismatch {
            want: k,
            got: f.weight(),
        });
    }
    let need = m + 1;
    if f.precision() < need {
        return Err(DivisorError::InsufficientPrecision {
            k,
            need,
            got: f.precision(),
        });
    }
    let p = f.modulus();
    // Work at the full precision of the input: the extraction itself only
    // needs m+1 coefficients, but any extras must also be reproduced, which
    // turns the residual check into a genuine modularity test.
    let rel = f.precision();
    let top = (rel - 1 - m) as i64; // highest exponent the residual covers

    // (Delta^m E4^delta E6^eps)^{-1}, exponents -m upward.
    let delta = LaurentExpansion::from_series(&delta_series(p, rel + 1));
    let mut weight_factor = delta.pow(profile.m);
    if profile.delta > 0 {
        let e4 = LaurentExpansion::from_series(&eisenstein_series(Eisenstein::E4, p, rel));
        weight_factor = weight_factor.mul(&e4.pow(profile.delta as u64));
    }
    if profile.eps > 0 {
        let e6 = LaurentExpansion::from_series(&eisenstein_series(Eisenstein::E6, p, rel));
        weight_factor = weight_factor.mul(&e6.pow(profile.eps as u64));
    }
    let inverse = weight_factor.inv().expect("Delta^m E4^d E6^e is nonzero");

    let mut residual = LaurentExpansion::from_series(f).mul(&inverse);

    // Powers of j truncated to the exponents the peeling will touch:
    // j^d is needed on [-d, top], and building ascending with cap
    // top + m - d keeps every later product correct there.
    let j = j_series(p, rel);
    let mut j_pows: Vec<LaurentExpansion> = Vec::with_capacity(m + 1);
    let one = LaurentExpansion::from_series(&QExpansion::constant(p, 0, 1, rel));
    j_pows.push(one);
    for d in 1..=m {
        let cap = top + (m - d) as i64;
        j_pows.push(j_pows[d - 1].mul_capped(&j, Some(cap)));
    }

    let mut coeffs = vec![0i64; m + 1];
    for d in (0..=m).rev() {
        let c = residual.coeff_at(-(d as i64));
        if !c.is_zero() {
            coeffs[d] = c.value() as i64;
            residual = residual.sub(&j_pows[d].scale(c));
        }
    }

    if !residual.is_zero_through(top) {
        let bad = residual.leading_exponent().unwrap();
        return Err(DivisorError::NonmodularResidual { k, exponent: bad });
    }

    Ok(DivisorDecomposition {
        profile,
        poly: FpPolynomial::from_coeffs(p, &coeffs),
    })
}

/// Exponents delta_p = [p = 2 mod 3] and eps_p = [p = 3 mod 4]: the
/// multiplicities of the forced roots j = 0 and j = 1728 of S_p.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct SupersingularExponents {
    pub delta_p: u8,
    pub eps_p: u8,
}

pub fn ssp_exponents(p: PrimeModulus) -> SupersingularExponents {
    SupersingularExponents {
        delta_p: if p.value() % 3 == 2 { 1 } else { 0 },
        eps_p: if p.value() % 4 == 3 { 1 } else { 0 },
    }
}

/// The correction exponents (a, b) in
/// F(fg; x) = x^a (x-1728)^b F(f; x) F(g; x), determined by the weights
/// mod 12. The table is symmetric.
pub fn product_exponents(k1: u64, k2: u64) -> (u8, u8) {
    assert!(k1 % 2 == 0 && k2 % 2 == 0, "weights are even");
    // Rows and columns indexed by (k mod 12)/2 in the order 0,2,4,6,8,10.
    const TABLE: [[(u8, u8); 6]; 6] = [
        [(0, 0), (0, 0), (0, 0), (0, 0), (0, 0), (0, 0)],
        [(0, 0), (1, 1), (1, 0), (0, 1), (1, 0), (1, 1)],
        [(0, 0), (1, 0), (0, 0), (0, 0), (1, 0), (0, 0)],
        [(0, 0), (0, 1), (0, 0), (0, 1), (0, 0), (0, 1)],
        [(0, 0), (1, 0), (1, 0), (0, 0), (1, 0), (1, 0)],
        [(0, 0), (1, 1), (0, 0), (0, 1), (1, 0), (0, 1)],
    ];
    TABLE[((k2 % 12) / 2) as usize][((k1 % 12) / 2) as usize]
}

/// Divisor polynomial of the n-th power of the weight-(p-1) Eisenstein
/// series, from the closed form
/// F^n x^{delta_p floor(n/3)} (x-1728)^{eps_p floor(n/2)} where F is the
/// base divisor polynomial.
pub fn epn_divisor_polynomial(
    p: PrimeModulus,
    n: u64,
    base: &FpPolynomial,
) -> FpPolynomial {
    let e = ssp_exponents(p);
    let x = FpPolynomial::x(p);
    let x1728 = FpPolynomial::linear(p, -1728);
    base.pow(n)
        .mul(&x.pow(e.delta_p as u64 * (n / 3)))
        .mul(&x1728.pow(e.eps_p as u64 * (n / 2)))
}

/// Same closed form computed the slow way, one product-law step at a time;
/// used to cross-check [`epn_divisor_polynomial`] on small n.
pub fn epn_divisor_polynomial_inductive(
    p: PrimeModulus,
    n: u64,
    base: &FpPolynomial,
) -> FpPolynomial {
    let x = FpPolynomial::x(p);
    let x1728 = FpPolynomial::linear(p, -1728);
    let k = p.value() - 1;
    let mut acc = base.clone();
    for i in 1..n {
        let (a, b) = product_exponents(k, i * k);
        acc = acc
            .mul(base)
            .mul(&x.pow(a as u64))
            .mul(&x1728.pow(b as u64));
    }
    acc
}

/// Moves a divisor polynomial up n steps of p-1 in weight: if f has weight
/// k and g of weight k + n(p-1) reduces to the same series mod p, then
///
///   F(g; x) = F(f; x) S~_p(x)^n x^{delta_p floor(n/3) + a}
///             (x - 1728)^{eps_p floor(n/2) + b}
///
/// with (a, b) = product_exponents(k, n(p-1)). `s_tilde` is S~_p. n = 0 is
/// the identity.
pub fn transfer_divisor_polynomial(
    ff: &FpPolynomial,
    k: u64,
    n: u64,
    p: PrimeModulus,
    s_tilde: &FpPolynomial,
) -> FpPolynomial {
    if n == 0 {
        return ff.clone();
    }
    let e = ssp_exponents(p);
    let (a, b) = product_exponents(k, n * (p.value() - 1));
    let x = FpPolynomial::x(p);
    let x1728 = FpPolynomial::linear(p, -1728);
    ff.mul(&s_tilde.pow(n))
        .mul(&x.pow(e.delta_p as u64 * (n / 3) + a as u64))
        .mul(&x1728.pow(e.eps_p as u64 * (n / 2) + b as u64))
}

/// Rebuilds the q-expansion Delta^m E4^delta E6^eps F(j) mod p to
/// `precision` coefficients; test support for round-trip checks.
pub fn recompose(
    decomp: &DivisorDecomposition,
    p: PrimeModulus,
    precision: usize,
) -> QExpansion {
    let prof = decomp.profile;
    let rel = precision + 1;
    let mut acc = LaurentExpansion::from_series(&QExpansion::zero(p, 0, rel));
    let j = j_series(p, rel);
    let mut j_pow = LaurentExpansion::from_series(&QExpansion::constant(p, 0, 1, rel));
    for d in 0..=decomp.poly.degree().map_or(0, |d| d) {
        let c = decomp.poly.coeff(d);
        if !c.is_zero() {
            acc = acc.add(&j_pow.scale(c));
        }
        if d < decomp.poly.degree().unwrap_or(0) {
            j_pow = j_pow.mul(&j);
        }
    }
    let delta = LaurentExpansion::from_series(&delta_series(p, rel + 1));
    let e4 = LaurentExpansion::from_series(&eisenstein_series(Eisenstein::E4, p, rel));
    let e6 = LaurentExpansion::from_series(&eisenstein_series(Eisenstein::E6, p, rel));
    let prod = acc
        .mul(&delta.pow(prof.m))
        .mul(&e4.pow(prof.delta as u64))
        .mul(&e6.pow(prof.eps as u64));
    prod.to_q_expansion()
        .expect("recomposition is a power series")
        .truncated(precision)
}
