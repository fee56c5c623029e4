//! Laurent expansions: q-series with finitely many negative exponents.
//!
//! These show up when dividing by powers of Delta (whose expansion starts
//! at q) and as the home of the modular function j. The stored coefficient
//! list starts at `lead` and is normalized so the first stored coefficient
//! is nonzero unless the series is zero to its precision; the first unknown
//! exponent is `precision_bound`.

use super::{convolve_mod, QExpansion, SeriesError};
use crate::finite_field::{FpElement, PrimeModulus};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LaurentExpansion {
    weight: i64,
    lead: i64,
    coeffs: Vec<u64>,
    modulus: PrimeModulus,
}

impl LaurentExpansion {
    pub(crate) fn new(
        weight: i64,
        lead: i64,
        coeffs: Vec<u64>,
        modulus: PrimeModulus,
    ) -> LaurentExpansion {
        debug_assert!(coeffs.iter().all(|&c| c < modulus.value()));
        LaurentExpansion {
            weight,
            lead,
            coeffs,
            modulus,
        }
        .normalized()
    }

    fn normalized(mut self) -> LaurentExpansion {
        let skip = self
            .coeffs
            .iter()
            .position(|&c| c != 0)
            .unwrap_or(self.coeffs.len());
        self.lead += skip as i64;
        self.coeffs.drain(..skip);
        self
    }

    pub fn from_series(f: &QExpansion) -> LaurentExpansion {
        LaurentExpansion::new(f.weight(), 0, f.coeffs().to_vec(), f.modulus())
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    /// Exponent of the first stored (nonzero) coefficient; None when the
    /// series is zero to its precision.
    pub fn leading_exponent(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.lead)
        }
    }

    /// First exponent whose coefficient is unknown.
    pub fn precision_bound(&self) -> i64 {
        self.lead + self.coeffs.len() as i64
    }

    pub fn is_zero_to_precision(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient at exponent e; zero below the leading exponent. Asking
    /// at or beyond the precision bound is a caller bug.
    pub fn coeff_at(&self, e: i64) -> FpElement {
        assert!(
            e < self.precision_bound(),
            "exponent {e} at or beyond precision bound {}",
            self.precision_bound()
        );
        if e < self.lead {
            return self.modulus.zero();
        }
        self.modulus.element(self.coeffs[(e - self.lead) as usize])
    }

    /// Number of known coefficients counted from the leading exponent.
    pub fn relative_precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn scale(&self, c: FpElement) -> LaurentExpansion {
        assert_eq!(c.modulus(), self.modulus, "mixed moduli");
        let p = self.modulus.value() as u128;
        let coeffs = self
            .coeffs
            .iter()
            .map(|&a| (a as u128 * c.value() as u128 % p) as u64)
            .collect();
        LaurentExpansion::new(self.weight, self.lead, coeffs, self.modulus)
    }

    pub fn add(&self, rhs: &LaurentExpansion) -> LaurentExpansion {
        self.combine(rhs, |a, b, p| (a + b) % p)
    }

    pub fn sub(&self, rhs: &LaurentExpansion) -> LaurentExpansion {
        self.combine(rhs, |a, b, p| (a + p - b) % p)
    }

    fn combine(
        &self,
        rhs: &LaurentExpansion,
        op: impl Fn(u64, u64, u64) -> u64,
    ) -> LaurentExpansion {
        assert_eq!(self.modulus, rhs.modulus, "mixed moduli");
        assert_eq!(
            self.weight, rhs.weight,
            "weight mismatch: {} vs {}",
            self.weight, rhs.weight
        );
        let p = self.modulus.value();
        let bound = self.precision_bound().min(rhs.precision_bound());
        if self.is_zero_to_precision() && rhs.is_zero_to_precision() {
            return LaurentExpansion::new(self.weight, bound, Vec::new(), self.modulus);
        }
        let lead = match (self.leading_exponent(), rhs.leading_exponent()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a.min(bound),
            (None, Some(b)) => b.min(bound),
            (None, None) => unreachable!(),
        };
        let len = (bound - lead).max(0) as usize;
        let coeffs = (0..len)
            .map(|i| {
                let e = lead + i as i64;
                let a = if e < self.precision_bound() && e >= self.lead {
                    self.coeffs[(e - self.lead) as usize]
                } else {
                    0
                };
                let b = if e < rhs.precision_bound() && e >= rhs.lead {
                    rhs.coeffs[(e - rhs.lead) as usize]
                } else {
                    0
                };
                op(a, b, p)
            })
            .collect();
        LaurentExpansion::new(self.weight, lead, coeffs, self.modulus)
    }

    /// Truncated product: relative precision is the minimum of the inputs,
    /// leading exponents and weights add.
    pub fn mul(&self, rhs: &LaurentExpansion) -> LaurentExpansion {
        self.mul_capped(rhs, None)
    }

    /// Like [`Self::mul`] but additionally discards exponents above
    /// `cap`, reducing both work and the precision bound.
    pub fn mul_capped(&self, rhs: &LaurentExpansion, cap: Option<i64>) -> LaurentExpansion {
        assert_eq!(self.modulus, rhs.modulus, "mixed moduli");
        let weight = self.weight + rhs.weight;
        let rel = self.coeffs.len().min(rhs.coeffs.len());
        let lead = self.lead + rhs.lead;
        if self.is_zero_to_precision() || rhs.is_zero_to_precision() {
            // zero to the combined precision
            let bound = if self.is_zero_to_precision() {
                self.precision_bound() + rhs.lead
            } else {
                rhs.precision_bound() + self.lead
            };
            let bound = match cap {
                Some(c) => bound.min(c + 1),
                None => bound,
            };
            return LaurentExpansion::new(weight, bound, Vec::new(), self.modulus);
        }
        let mut n = rel;
        if let Some(c) = cap {
            let want = c + 1 - lead; // keep exponents lead .. cap
            if want <= 0 {
                return LaurentExpansion::new(weight, lead, Vec::new(), self.modulus);
            }
            n = n.min(want as usize);
        }
        let coeffs = convolve_mod(&self.coeffs, &rhs.coeffs, n, self.modulus.value());
        LaurentExpansion::new(weight, lead, coeffs, self.modulus)
    }

    /// Inverse: the unit part is inverted as a power series and the
    /// leading exponent negates, as does the weight.
    pub fn inv(&self) -> Result<LaurentExpansion, SeriesError> {
        if self.is_zero_to_precision() {
            return Err(SeriesError::ZeroSeries);
        }
        let unit = QExpansion::from_coeffs(
            0,
            self.modulus,
            &self.coeffs.iter().map(|&c| c as i64).collect::<Vec<_>>(),
        )
        .inv()?;
        Ok(LaurentExpansion::new(
            -self.weight,
            -self.lead,
            unit.coeffs().to_vec(),
            self.modulus,
        ))
    }

    pub fn pow(&self, e: u64) -> LaurentExpansion {
        let mut acc = LaurentExpansion::new(
            0,
            0,
            {
                let mut c = vec![0u64; self.coeffs.len().max(1)];
                c[0] = 1;
                c
            },
            self.modulus,
        );
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

    /// True iff every known coefficient at exponent <= `max_exp` vanishes.
    pub fn is_zero_through(&self, max_exp: i64) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, &c)| c == 0 || self.lead + i as i64 > max_exp)
    }

    /// Converts back to a plain q-expansion; requires no negative-exponent
    /// terms. Coefficients between q^0 and the leading exponent pad with
    /// zeros.
    pub fn to_q_expansion(&self) -> Option<QExpansion> {
        if let Some(lead) = self.leading_exponent() {
            if lead < 0 {
                return None;
            }
        }
        let bound = self.precision_bound();
        if bound < 1 {
            return None;
        }
        let mut coeffs = vec![0u64; bound as usize];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[(self.lead + i as i64) as usize] = c;
        }
        Some(QExpansion::from_coeffs(
            self.weight,
            self.modulus,
            &coeffs.iter().map(|&c| c as i64).collect::<Vec<_>>(),
        ))
    }
}
