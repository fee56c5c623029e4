//! Truncated q-expansions over F_p with weight tags.
//!
//! Everything is reduced mod p from the start; no characteristic-0
//! expansion is ever materialized. Precision is explicit and caller
//! supplied: binary operations truncate to the minimum of the input
//! precisions and never silently extend.

mod laurent;

pub use laurent::LaurentExpansion;

use crate::finite_field::{FpElement, PrimeModulus};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("cannot invert a series that is zero to its precision")]
    ZeroSeries,
}

/// A q-expansion c_0 + c_1 q + ... + c_{N-1} q^{N-1} over F_p, tagged with
/// the (even) weight of the modular form it reduces.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QExpansion {
    weight: i64,
    modulus: PrimeModulus,
    coeffs: Vec<u64>,
}

impl QExpansion {
    pub fn from_coeffs(weight: i64, modulus: PrimeModulus, coeffs: &[i64]) -> QExpansion {
        assert!(!coeffs.is_empty(), "precision must be at least 1");
        assert!(weight % 2 == 0, "weights are even, got {weight}");
        let p = modulus.value() as i64;
        QExpansion {
            weight,
            modulus,
            coeffs: coeffs.iter().map(|&v| v.rem_euclid(p) as u64).collect(),
        }
    }

    fn from_raw(weight: i64, modulus: PrimeModulus, coeffs: Vec<u64>) -> QExpansion {
        assert!(!coeffs.is_empty(), "precision must be at least 1");
        assert!(weight % 2 == 0, "weights are even, got {weight}");
        debug_assert!(coeffs.iter().all(|&c| c < modulus.value()));
        QExpansion {
            weight,
            modulus,
            coeffs,
        }
    }

    /// The constant series v + 0q + ... with an arbitrary weight tag.
    /// The tag is whatever weight the caller is treating the constant as
    /// having; `constant(p, p-1, 1, n)` stands in for the weight-(p-1)
    /// Eisenstein series, which is 1 mod p.
    pub fn constant(modulus: PrimeModulus, weight: i64, value: u64, precision: usize) -> Self {
        assert!(precision >= 1);
        let mut coeffs = vec![0u64; precision];
        coeffs[0] = value % modulus.value();
        QExpansion::from_raw(weight, modulus, coeffs)
    }

    pub fn zero(modulus: PrimeModulus, weight: i64, precision: usize) -> Self {
        assert!(precision >= 1);
        QExpansion::from_raw(weight, modulus, vec![0u64; precision])
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> FpElement {
        assert!(
            n < self.coeffs.len(),
            "coefficient {n} beyond precision {}",
            self.coeffs.len()
        );
        self.modulus.element(self.coeffs[n])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Index of the first nonzero coefficient, if any.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c != 0)
    }

    pub fn truncated(&self, precision: usize) -> QExpansion {
        assert!(precision >= 1 && precision <= self.coeffs.len());
        QExpansion::from_raw(
            self.weight,
            self.modulus,
            self.coeffs[..precision].to_vec(),
        )
    }

    /// Retags the series with a new weight without touching coefficients.
    /// Used when a q-expansion is reinterpreted as the reduction of a form
    /// of higher weight.
    pub fn with_weight(&self, weight: i64) -> QExpansion {
        QExpansion::from_raw(weight, self.modulus, self.coeffs.clone())
    }

    pub fn add(&self, rhs: &QExpansion) -> QExpansion {
        self.check_weight(rhs);
        let p = self.modulus.value();
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| (self.coeffs[i] + rhs.coeffs[i]) % p).collect();
        QExpansion::from_raw(self.weight, self.modulus, coeffs)
    }

    pub fn sub(&self, rhs: &QExpansion) -> QExpansion {
        self.check_weight(rhs);
        let p = self.modulus.value();
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|i| (self.coeffs[i] + p - rhs.coeffs[i]) % p)
            .collect();
        QExpansion::from_raw(self.weight, self.modulus, coeffs)
    }

    pub fn scale(&self, c: FpElement) -> QExpansion {
        assert_eq!(c.modulus(), self.modulus, "mixed moduli");
        let p = self.modulus.value() as u128;
        let coeffs = self
            .coeffs
            .iter()
            .map(|&a| (a as u128 * c.value() as u128 % p) as u64)
            .collect();
        QExpansion::from_raw(self.weight, self.modulus, coeffs)
    }

    /// Truncated product; weights add.
    pub fn mul(&self, rhs: &QExpansion) -> QExpansion {
        assert_eq!(self.modulus, rhs.modulus, "mixed moduli");
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let coeffs = convolve_mod(&self.coeffs, &rhs.coeffs, n, self.modulus.value());
        QExpansion::from_raw(self.weight + rhs.weight, self.modulus, coeffs)
    }

    /// Truncated inverse; the weight negates. The constant term must be a
    /// unit (this type has no negative exponents; Laurent normalization
    /// lives in [`LaurentExpansion`]).
    pub fn inv(&self) -> Result<QExpansion, SeriesError> {
        let c0 = self.coeffs[0];
        if c0 == 0 {
            return Err(SeriesError::ZeroSeries);
        }
        let p = self.modulus.value();
        let inv0 = self.modulus.element(c0).inv().value();
        let n = self.coeffs.len();
        let mut out = vec![0u64; n];
        out[0] = inv0;
        for k in 1..n {
            // c_k = -inv0 * sum_{i=1}^{k} a_i c_{k-i}
            let mut acc: u128 = 0;
            for i in 1..=k {
                acc += self.coeffs[i] as u128 * out[k - i] as u128;
            }
            let s = (acc % p as u128) as u64;
            out[k] = ((p - s) as u128 * inv0 as u128 % p as u128) as u64;
        }
        Ok(QExpansion::from_raw(-self.weight, self.modulus, out))
    }

    /// Truncated e-th power by binary exponentiation; the weight scales
    /// to e times the input weight through the repeated multiplications.
    pub fn pow(&self, e: u64) -> QExpansion {
        let mut acc = QExpansion::constant(self.modulus, 0, 1, self.coeffs.len());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// The operator q d/dq: c_n -> n*c_n. The result is the reduction of a
    /// form of weight k + p + 1, and is tagged as such.
    pub fn theta(&self) -> QExpansion {
        let p = self.modulus.value();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, &c)| ((n as u64 % p) as u128 * c as u128 % p as u128) as u64)
            .collect();
        QExpansion::from_raw(self.weight + p as i64 + 1, self.modulus, coeffs)
    }

    fn check_weight(&self, rhs: &QExpansion) {
        assert_eq!(self.modulus, rhs.modulus, "mixed moduli");
        assert_eq!(
            self.weight, rhs.weight,
            "weight mismatch: {} vs {}",
            self.weight, rhs.weight
        );
    }
}

/// First `n` coefficients of the product of two coefficient slices mod p.
/// Accumulates raw u128 sums: with p < 2^32 and fewer than 2^32 terms the
/// running sum stays below 2^96.
pub(crate) fn convolve_mod(a: &[u64], b: &[u64], n: usize, p: u64) -> Vec<u64> {
    let mut out = vec![0u64; n];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut acc: u128 = 0;
        let lo = k.saturating_sub(b.len() - 1);
        let hi = k.min(a.len() - 1);
        for i in lo..=hi {
            acc += a[i] as u128 * b[k - i] as u128;
        }
        *slot = (acc % p as u128) as u64;
    }
    out
}

/// Euler's product prod_{n>=1} (1 - q^n) via the pentagonal number series
/// sum_k (-1)^k q^(k(3k-1)/2).
fn euler_product(modulus: PrimeModulus, precision: usize) -> Vec<u64> {
    let p = modulus.value();
    let mut out = vec![0u64; precision];
    out[0] = 1;
    let mut k = 1i64;
    loop {
        let e1 = k * (3 * k - 1) / 2;
        let e2 = k * (3 * k + 1) / 2;
        if e1 as usize >= precision && e2 as usize >= precision {
            break;
        }
        let sign = if k % 2 == 0 { 1 } else { p - 1 };
        for e in [e1, e2] {
            if (e as usize) < precision {
                out[e as usize] = (out[e as usize] + sign) % p;
            }
        }
        k += 1;
    }
    out
}

/// The discriminant cusp form Delta = q prod (1-q^n)^24 mod p, weight 12.
pub fn delta_series(modulus: PrimeModulus, precision: usize) -> QExpansion {
    assert!(precision >= 1);
    if precision == 1 {
        return QExpansion::zero(modulus, 12, 1);
    }
    let eta = QExpansion::from_raw(0, modulus, euler_product(modulus, precision - 1));
    let eta24 = eta.pow(24);
    let mut coeffs = vec![0u64; precision];
    coeffs[1..].copy_from_slice(eta24.coeffs());
    QExpansion::from_raw(12, modulus, coeffs)
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Eisenstein {
    E4,
    E6,
}

/// E4 = 1 + 240 sum sigma_3(n) q^n or E6 = 1 - 504 sum sigma_5(n) q^n,
/// reduced mod p. Divisor sums are sieved in O(N log N).
pub fn eisenstein_series(
    which: Eisenstein,
    modulus: PrimeModulus,
    precision: usize,
) -> QExpansion {
    assert!(precision >= 1);
    let p = modulus.value();
    let (weight, scalar, power) = match which {
        Eisenstein::E4 => (4i64, modulus.element_from_signed(240), 3u32),
        Eisenstein::E6 => (6i64, modulus.element_from_signed(-504), 5u32),
    };
    let mut coeffs = vec![0u64; precision];
    coeffs[0] = 1;
    for d in 1..precision as u64 {
        let dp = modulus.element(d % p).pow(power as u128) * scalar;
        if dp.is_zero() {
            continue;
        }
        let mut m = d as usize;
        while m < precision {
            coeffs[m] = (coeffs[m] + dp.value()) % p;
            m += d as usize;
        }
    }
    QExpansion::from_raw(weight, modulus, coeffs)
}

/// The modular function j = E4^3 / Delta as a Laurent expansion with
/// leading term q^{-1}; `precision` counts stored coefficients.
pub fn j_series(modulus: PrimeModulus, precision: usize) -> LaurentExpansion {
    assert!(precision >= 1);
    let e4 = eisenstein_series(Eisenstein::E4, modulus, precision);
    let e4cubed = e4.pow(3);
    // Delta = q * eta24: invert the unit part, shift the q by hand.
    let eta24 = QExpansion::from_raw(0, modulus, euler_product(modulus, precision))
        .pow(24)
        .inv()
        .expect("unit constant term");
    let unit = e4cubed.mul(&eta24); // weight 12, the expansion of j*q
    LaurentExpansion::new(unit.weight() - 12, -1, unit.coeffs().to_vec(), modulus)
}

/// Families of weight-(p-1) forms defined through powers of
/// 1 - 3 E4 x^4 + 2 E6 x^6.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum HalfPowerFamily {
    /// Coefficient of x^{p-1} in the ((p-1)/2)-th power (Deuring-Hasse).
    DeuringHasse,
    /// Coefficient of x^{p-1} in the (-1/2)-th power (Kaneko-Zagier G).
    KanekoZagierG,
}

/// The weight-(p-1) form of the chosen family mod p: the x^{p-1}
/// coefficient of (1 - 3 E4 x^4 + 2 E6 x^6)^e with e = (p-1)/2 or -1/2.
///
/// For the -1/2 power the binomial coefficients C(-1/2, j) have only powers
/// of 2 in their denominators, so they reduce mod p.
pub fn binomial_half_expansion(
    modulus: PrimeModulus,
    family: HalfPowerFamily,
    precision: usize,
) -> QExpansion {
    let target = (modulus.value() - 1) as usize;
    let poly = half_power_x_expansion(modulus, family, target, precision);
    poly.into_iter()
        .nth(target)
        .expect("expansion reaches x^{p-1}")
        .with_weight(modulus.value() as i64 - 1)
}

/// The x-expansion underlying [`binomial_half_expansion`]: entry d is the
/// QExpansion coefficient of x^d, for d = 0..=max_x_degree.
pub(crate) fn half_power_x_expansion(
    modulus: PrimeModulus,
    family: HalfPowerFamily,
    max_x_degree: usize,
    precision: usize,
) -> Vec<QExpansion> {
    assert!(precision >= 1);
    let zero = QExpansion::zero(modulus, 0, precision);
    // u = -3 E4 x^4 + 2 E6 x^6, the non-constant part of the base.
    let e4 = eisenstein_series(Eisenstein::E4, modulus, precision).with_weight(0);
    let e6 = eisenstein_series(Eisenstein::E6, modulus, precision).with_weight(0);
    let mut u = vec![zero.clone(); max_x_degree + 1];
    if max_x_degree >= 4 {
        u[4] = e4.scale(modulus.element_from_signed(-3));
    }
    if max_x_degree >= 6 {
        u[6] = e6.scale(modulus.element(2));
    }

    match family {
        HalfPowerFamily::DeuringHasse => {
            // (1 + u)^((p-1)/2) by binary exponentiation in x.
            let mut base = u;
            base[0] = QExpansion::constant(modulus, 0, 1, precision);
            let mut acc = vec![zero.clone(); max_x_degree + 1];
            acc[0] = QExpansion::constant(modulus, 0, 1, precision);
            let mut e = (modulus.value() - 1) / 2;
            while e > 0 {
                if e & 1 == 1 {
                    acc = x_poly_mul(&acc, &base, max_x_degree, &zero);
                }
                e >>= 1;
                if e > 0 {
                    base = x_poly_mul(&base, &base, max_x_degree, &zero);
                }
            }
            acc
        }
        HalfPowerFamily::KanekoZagierG => {
            // (1 + u)^(-1/2) = sum_j C(-1/2, j) u^j; u has x-order 4 so
            // only j <= max_x_degree/4 terms contribute.
            let mut acc = vec![zero.clone(); max_x_degree + 1];
            acc[0] = QExpansion::constant(modulus, 0, 1, precision);
            let mut u_pow = acc.clone();
            let mut binom = modulus.one();
            for j in 1..=(max_x_degree / 4) as u64 {
                u_pow = x_poly_mul(&u_pow, &u, max_x_degree, &zero);
                // C(-1/2, j) = C(-1/2, j-1) * (-(2j-1)) / (2j)
                binom = binom
                    * modulus.element_from_signed(-(2 * j as i64 - 1))
                    * modulus.element(2 * j).inv();
                for (slot, term) in acc.iter_mut().zip(&u_pow) {
                    *slot = slot.add(&term.scale(binom));
                }
            }
            acc
        }
    }
}

/// Product of two x-polynomials with QExpansion coefficients, truncated at
/// x-degree `max_deg`.
fn x_poly_mul(
    a: &[QExpansion],
    b: &[QExpansion],
    max_deg: usize,
    zero: &QExpansion,
) -> Vec<QExpansion> {
    let mut out = vec![zero.clone(); max_deg + 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if i + j > max_deg {
                break;
            }
            if bj.is_zero() {
                continue;
            }
            out[i + j] = out[i + j].add(&ai.mul(bj).with_weight(0));
        }
    }
    out
}
