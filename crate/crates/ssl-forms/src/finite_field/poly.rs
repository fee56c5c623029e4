//! Dense univariate polynomials over F_p, lowest degree first.
//!
//! The coefficient list is kept canonical: no trailing zeros, so equality
//! is structural. The zero polynomial has an empty coefficient list and
//! `degree()` of `None`.

use super::{FieldError, FpElement, PrimeModulus};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FpPolynomial {
    coeffs: Vec<u64>,
    modulus: PrimeModulus,
}

impl FpPolynomial {
    /// Builds a polynomial from ascending coefficients, reducing each one
    /// and stripping trailing zeros.
    pub fn from_coeffs(modulus: PrimeModulus, coeffs: &[i64]) -> FpPolynomial {
        let p = modulus.value() as i64;
        let mut c: Vec<u64> = coeffs.iter().map(|&v| v.rem_euclid(p) as u64).collect();
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPolynomial { coeffs: c, modulus }
    }

    pub(crate) fn from_raw(modulus: PrimeModulus, mut coeffs: Vec<u64>) -> FpPolynomial {
        debug_assert!(coeffs.iter().all(|&c| c < modulus.value()));
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FpPolynomial { coeffs, modulus }
    }

    pub fn zero(modulus: PrimeModulus) -> FpPolynomial {
        FpPolynomial {
            coeffs: Vec::new(),
            modulus,
        }
    }

    pub fn constant(modulus: PrimeModulus, c: u64) -> FpPolynomial {
        FpPolynomial::from_raw(modulus, vec![c % modulus.value()])
    }

    pub fn one(modulus: PrimeModulus) -> FpPolynomial {
        FpPolynomial::constant(modulus, 1)
    }

    /// The monomial x.
    pub fn x(modulus: PrimeModulus) -> FpPolynomial {
        FpPolynomial {
            coeffs: vec![0, 1],
            modulus,
        }
    }

    /// x + c for a signed constant, e.g. `linear(p, -1728)` for x - 1728.
    pub fn linear(modulus: PrimeModulus, c: i64) -> FpPolynomial {
        FpPolynomial::from_coeffs(modulus, &[c, 1])
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial (degree "minus infinity").
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FpElement {
        self.modulus.element(*self.coeffs.get(i).unwrap_or(&0))
    }

    pub fn leading_coeff(&self) -> FpElement {
        self.modulus.element(*self.coeffs.last().unwrap_or(&0))
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    pub fn monic(&self) -> FpPolynomial {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        self.scale(self.leading_coeff().inv())
    }

    pub fn scale(&self, c: FpElement) -> FpPolynomial {
        assert_eq!(c.modulus(), self.modulus, "mixed moduli");
        if c.is_zero() {
            return FpPolynomial::zero(self.modulus);
        }
        let p = self.modulus.value();
        let coeffs = self
            .coeffs
            .iter()
            .map(|&a| ((a as u128 * c.value() as u128) % p as u128) as u64)
            .collect();
        FpPolynomial {
            coeffs,
            modulus: self.modulus,
        }
    }

    pub fn add(&self, rhs: &FpPolynomial) -> FpPolynomial {
        self.check(rhs);
        let p = self.modulus.value();
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![0u64; n];
        for (i, slot) in out.iter_mut().enumerate() {
            let a = self.coeffs.get(i).copied().unwrap_or(0);
            let b = rhs.coeffs.get(i).copied().unwrap_or(0);
            *slot = (a + b) % p;
        }
        FpPolynomial::from_raw(self.modulus, out)
    }

    pub fn sub(&self, rhs: &FpPolynomial) -> FpPolynomial {
        self.check(rhs);
        let p = self.modulus.value();
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![0u64; n];
        for (i, slot) in out.iter_mut().enumerate() {
            let a = self.coeffs.get(i).copied().unwrap_or(0);
            let b = rhs.coeffs.get(i).copied().unwrap_or(0);
            *slot = (a + p - b) % p;
        }
        FpPolynomial::from_raw(self.modulus, out)
    }

    /// Schoolbook product. deg(fg) = deg f + deg g for nonzero inputs.
    pub fn mul(&self, rhs: &FpPolynomial) -> FpPolynomial {
        self.check(rhs);
        if self.is_zero() || rhs.is_zero() {
            return FpPolynomial::zero(self.modulus);
        }
        let p = self.modulus.value() as u128;
        let mut out = vec![0u64; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                let acc = out[i + j] as u128 + a as u128 * b as u128;
                out[i + j] = (acc % p) as u64;
            }
        }
        FpPolynomial::from_raw(self.modulus, out)
    }

    /// Euclidean division: self = q*g + r with deg r < deg g.
    pub fn divrem(&self, g: &FpPolynomial) -> Result<(FpPolynomial, FpPolynomial), FieldError> {
        self.check(g);
        if g.is_zero() {
            return Err(FieldError::DivisionByZeroPoly);
        }
        let p = self.modulus.value();
        let dg = g.coeffs.len() - 1;
        if self.coeffs.len() <= dg {
            return Ok((FpPolynomial::zero(self.modulus), self.clone()));
        }
        let lead_inv = g.leading_coeff().inv().value();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; self.coeffs.len() - dg];
        for i in (dg..rem.len()).rev() {
            if rem[i] == 0 {
                continue;
            }
            let q = ((rem[i] as u128 * lead_inv as u128) % p as u128) as u64;
            quot[i - dg] = q;
            for (j, &gc) in g.coeffs.iter().enumerate() {
                let sub = (q as u128 * gc as u128 % p as u128) as u64;
                let idx = i - dg + j;
                rem[idx] = (rem[idx] + p - sub) % p;
            }
        }
        rem.truncate(dg);
        Ok((
            FpPolynomial::from_raw(self.modulus, quot),
            FpPolynomial::from_raw(self.modulus, rem),
        ))
    }

    /// Monic gcd by the Euclidean algorithm.
    pub fn gcd(&self, rhs: &FpPolynomial) -> FpPolynomial {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let r = a.divrem(&b).expect("nonzero divisor").1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> FpPolynomial {
        let p = self.modulus.value();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| ((i as u64 % p) as u128 * c as u128 % p as u128) as u64)
            .collect();
        FpPolynomial::from_raw(self.modulus, coeffs)
    }

    pub fn pow(&self, mut e: u64) -> FpPolynomial {
        let mut base = self.clone();
        let mut acc = FpPolynomial::one(self.modulus);
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

    /// self^e reduced mod m, by binary exponentiation.
    pub fn pow_mod(
        &self,
        e: impl Into<u128>,
        m: &FpPolynomial,
    ) -> Result<FpPolynomial, FieldError> {
        self.check(m);
        if m.is_zero() {
            return Err(FieldError::DivisionByZeroPoly);
        }
        if m.degree() == Some(0) {
            return Err(FieldError::ConstantModulus);
        }
        let mut e: u128 = e.into();
        let mut base = self.divrem(m)?.1;
        let mut acc = FpPolynomial::one(self.modulus).divrem(m)?.1;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).divrem(m)?.1;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).divrem(m)?.1;
            }
        }
        Ok(acc)
    }

    pub fn eval(&self, x: FpElement) -> FpElement {
        assert_eq!(x.modulus(), self.modulus, "mixed moduli");
        let mut acc = self.modulus.zero();
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + self.modulus.element(c);
        }
        acc
    }

    fn check(&self, rhs: &FpPolynomial) {
        assert_eq!(
            self.modulus, rhs.modulus,
            "mixed moduli: {} vs {}",
            self.modulus, rhs.modulus
        );
    }
}

impl fmt::Display for FpPolynomial {
    /// Descending powers with canonical residues, e.g. `x^2+31x+31`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => {
                    if c != 1 {
                        write!(f, "{c}")?;
                    }
                    write!(f, "x")?;
                }
                _ => {
                    if c != 1 {
                        write!(f, "{c}")?;
                    }
                    write!(f, "x^{i}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(v: u64) -> PrimeModulus {
        PrimeModulus::new(v).unwrap()
    }

    // Independent schoolbook oracle over i128, reduced at the end.
    fn schoolbook(modulus: u64, a: &[i64], b: &[i64]) -> Vec<i64> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![0i128; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += x as i128 * y as i128;
            }
        }
        out.iter()
            .map(|&v| (v.rem_euclid(modulus as i128)) as i64)
            .collect()
    }

    #[test]
    fn canonical_form_strips_trailing_zeros() {
        let f = FpPolynomial::from_coeffs(p(5), &[1, 2, 0, 0]);
        assert_eq!(f.coeffs(), &[1, 2]);
        assert_eq!(f.degree(), Some(1));
        assert!(FpPolynomial::from_coeffs(p(5), &[0, 0]).is_zero());
        assert_eq!(FpPolynomial::zero(p(5)).degree(), None);
    }

    #[test]
    fn mul_x_squared() {
        let m = p(5);
        let x = FpPolynomial::x(m);
        assert_eq!(x.mul(&x), FpPolynomial::from_coeffs(m, &[0, 0, 1]));
    }

    // (x+4)^12 mod 5 against a binomial-theorem oracle.
    #[test]
    fn mul_twelve_fold_product_matches_binomial_oracle() {
        let m = p(5);
        let f = FpPolynomial::linear(m, 4);
        let mut prod = FpPolynomial::one(m);
        for _ in 0..12 {
            prod = prod.mul(&f);
        }
        // C(12,i) * 4^(12-i) mod 5
        let mut expected = vec![0i64; 13];
        let mut binom = 1i128;
        for (i, e) in expected.iter_mut().enumerate() {
            let mut term = binom;
            for _ in 0..(12 - i) {
                term = term * 4 % 5;
            }
            *e = (term % 5) as i64;
            binom = binom * (12 - i as i128) / (i as i128 + 1);
        }
        assert_eq!(prod, FpPolynomial::from_coeffs(m, &expected));
        assert_eq!(prod, f.pow(12));
    }

    // The two factors of the supersingular polynomial at 37; the schoolbook
    // oracle gives x^3+23x^2+5x+11 (60 = 37+23, 930 = 25*37+5, 899 = 24*37+11).
    #[test]
    fn mul_degree_three_against_schoolbook_oracle() {
        let m = p(37);
        let a = FpPolynomial::linear(m, 29);
        let b = FpPolynomial::from_coeffs(m, &[31, 31, 1]);
        let expected = schoolbook(37, &[29, 1], &[31, 31, 1]);
        assert_eq!(expected, vec![11, 5, 23, 1]);
        assert_eq!(a.mul(&b), FpPolynomial::from_coeffs(m, &expected));
    }

    #[test]
    fn divrem_self_division() {
        let m = p(13);
        let f = FpPolynomial::linear(m, 8).pow(182);
        let (q, r) = f.divrem(&f).unwrap();
        assert_eq!(q, FpPolynomial::one(m));
        assert!(r.is_zero());
    }

    #[test]
    fn divrem_exact_factor() {
        let m = p(17);
        let f = FpPolynomial::from_coeffs(m, &[0, 9, 1]); // x^2 + 9x
        let g = FpPolynomial::linear(m, 9);
        let (q, r) = f.divrem(&g).unwrap();
        assert_eq!(q, FpPolynomial::x(m));
        assert!(r.is_zero());
    }

    // Long-division oracle by hand: x^2+1 = (x+1)(x+4) + 2 over F_5.
    #[test]
    fn divrem_with_remainder() {
        let m = p(5);
        let f = FpPolynomial::from_coeffs(m, &[1, 0, 1]);
        let g = FpPolynomial::linear(m, 1);
        let (q, r) = f.divrem(&g).unwrap();
        assert_eq!(q, FpPolynomial::linear(m, 4));
        assert_eq!(r, FpPolynomial::constant(m, 2));
    }

    #[test]
    fn divrem_zero_divisor_errors() {
        let m = p(5);
        let f = FpPolynomial::x(m);
        assert_eq!(
            f.divrem(&FpPolynomial::zero(m)),
            Err(FieldError::DivisionByZeroPoly)
        );
    }

    #[test]
    fn pow_mod_zero_exponent_is_one() {
        let m = p(7);
        let x = FpPolynomial::x(m);
        let modp = FpPolynomial::from_coeffs(m, &[1, 1, 1]);
        assert_eq!(x.pow_mod(0u64, &modp).unwrap(), FpPolynomial::one(m));
    }

    // x = -4 = 1 mod (x+4, 5), so x^25 = 1.
    #[test]
    fn pow_mod_linear_modulus() {
        let m = p(5);
        let x = FpPolynomial::x(m);
        let g = FpPolynomial::linear(m, 4);
        assert_eq!(x.pow_mod(25u64, &g).unwrap(), FpPolynomial::one(m));
    }

    // All roots of the supersingular polynomial at 29 lie in F_{p^2}, so
    // x^(p^2) fixes them: x^(p^2) = x mod S_29.
    #[test]
    fn pow_mod_frobenius_square_fixes_supersingular_roots() {
        let m = p(29);
        let s29 = FpPolynomial::x(m)
            .mul(&FpPolynomial::linear(m, 4))
            .mul(&FpPolynomial::linear(m, 27));
        let x = FpPolynomial::x(m);
        assert_eq!(x.pow_mod(29u64 * 29, &s29).unwrap(), x);
    }

    #[test]
    fn pow_mod_rejects_bad_modulus() {
        let m = p(5);
        let x = FpPolynomial::x(m);
        assert_eq!(
            x.pow_mod(3u64, &FpPolynomial::zero(m)),
            Err(FieldError::DivisionByZeroPoly)
        );
        assert_eq!(
            x.pow_mod(3u64, &FpPolynomial::one(m)),
            Err(FieldError::ConstantModulus)
        );
    }

    #[test]
    fn display_style() {
        let m = p(37);
        assert_eq!(
            FpPolynomial::from_coeffs(m, &[31, 31, 1]).to_string(),
            "x^2+31x+31"
        );
        assert_eq!(FpPolynomial::x(m).to_string(), "x");
        assert_eq!(FpPolynomial::zero(m).to_string(), "0");
        assert_eq!(FpPolynomial::linear(m, -1728).to_string(), "x+11");
    }

    proptest! {
        // divrem(f*g, g) = (f, 0) for nonzero g.
        #[test]
        fn prop_divrem_undoes_mul(
            fa in proptest::collection::vec(0i64..37, 0..12),
            ga in proptest::collection::vec(0i64..37, 1..12),
        ) {
            let m = p(37);
            let f = FpPolynomial::from_coeffs(m, &fa);
            let g = FpPolynomial::from_coeffs(m, &ga);
            prop_assume!(!g.is_zero());
            let (q, r) = f.mul(&g).divrem(&g).unwrap();
            prop_assert_eq!(q, f);
            prop_assert!(r.is_zero());
        }

        // f = q*g + r and deg r < deg g.
        #[test]
        fn prop_divrem_identity(
            fa in proptest::collection::vec(0i64..13, 0..16),
            ga in proptest::collection::vec(0i64..13, 1..10),
        ) {
            let m = p(13);
            let f = FpPolynomial::from_coeffs(m, &fa);
            let g = FpPolynomial::from_coeffs(m, &ga);
            prop_assume!(!g.is_zero());
            let (q, r) = f.divrem(&g).unwrap();
            prop_assert_eq!(q.mul(&g).add(&r), f.clone());
            if !r.is_zero() {
                prop_assert!(r.degree().unwrap() < g.degree().unwrap());
            }
        }

        // Product degrees add, and mul matches the independent oracle.
        #[test]
        fn prop_mul_matches_schoolbook(
            fa in proptest::collection::vec(0i64..23, 1..10),
            ga in proptest::collection::vec(0i64..23, 1..10),
        ) {
            let m = p(23);
            let f = FpPolynomial::from_coeffs(m, &fa);
            let g = FpPolynomial::from_coeffs(m, &ga);
            let expected = FpPolynomial::from_coeffs(m, &schoolbook(23, &fa, &ga));
            prop_assert_eq!(f.mul(&g), expected);
            if !f.is_zero() && !g.is_zero() {
                prop_assert_eq!(
                    f.mul(&g).degree().unwrap(),
                    f.degree().unwrap() + g.degree().unwrap()
                );
            }
        }
    }
}
