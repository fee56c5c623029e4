//! Structured output for the command-line surface.
//!
//! Every command emits one [`OutputDocument`]: the echoed command line, a
//! structured payload, cache statistics, and a timing field. Identical
//! invocations produce identical payloads; only `timing_us` varies.
//! Serialization preserves field order, so parsing the emitted JSON and
//! re-serializing reproduces the bytes.

use crate::cache::CacheStats;
use crate::finite_field::{poly_factor, FpPolynomial};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct OutputDocument<T: Serialize> {
    pub command: String,
    pub payload: T,
    pub cache: Option<CacheStats>,
    pub timing_us: u64,
}

impl<T: Serialize> OutputDocument<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("output documents serialize")
    }
}

/// A polynomial as both an ascending coefficient list and display strings.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PolynomialOut {
    /// Canonical residues, constant term first.
    pub coefficients: Vec<u64>,
    /// Descending-power rendering, e.g. `x^2+31x+31`.
    pub display: String,
    /// Factored rendering, e.g. `x*(x+4)*(x+27)`.
    pub factored: String,
}

impl PolynomialOut {
    pub fn from_poly(f: &FpPolynomial) -> PolynomialOut {
        PolynomialOut {
            coefficients: f.coeffs().to_vec(),
            display: f.to_string(),
            factored: factored_string(f),
        }
    }
}

/// Renders a polynomial as `unit*fac1^e1*fac2^e2*...` with monic factors
/// sorted by degree then coefficients; bare `x` keeps no parentheses.
pub fn factored_string(f: &FpPolynomial) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let fz = poly_factor(f).expect("nonzero");
    let mut parts: Vec<String> = Vec::new();
    if fz.unit.value() != 1 || fz.factors.is_empty() {
        parts.push(fz.unit.to_string());
    }
    for (g, e) in &fz.factors {
        let base = if g == &FpPolynomial::x(f.modulus()) {
            "x".to_string()
        } else {
            format!("({g})")
        };
        parts.push(if *e == 1 {
            base
        } else {
            format!("{base}^{e}")
        });
    }
    parts.join("*")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::PrimeModulus;

    fn pm(v: u64) -> PrimeModulus {
        PrimeModulus::new(v).unwrap()
    }

    #[test]
    fn factored_display_styles() {
        let m = pm(29);
        let s29 = FpPolynomial::x(m)
            .mul(&FpPolynomial::linear(m, 4))
            .mul(&FpPolynomial::linear(m, 27));
        assert_eq!(factored_string(&s29), "x*(x+4)*(x+27)");

        let m = pm(13);
        let f = FpPolynomial::linear(m, 8).pow(182);
        assert_eq!(factored_string(&f), "(x+8)^182");

        let m = pm(5);
        assert_eq!(factored_string(&FpPolynomial::one(m)), "1");
        assert_eq!(factored_string(&FpPolynomial::constant(m, 3)), "3");
        let g = FpPolynomial::x(m).pow(4).scale(m.element(2));
        assert_eq!(factored_string(&g), "2*x^4");
    }

    #[test]
    fn json_preserves_field_order() {
        let doc = OutputDocument {
            command: "ssp --p 29".to_string(),
            payload: PolynomialOut::from_poly(&FpPolynomial::x(pm(29))),
            cache: None,
            timing_us: 12,
        };
        let text = doc.to_json();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        let again = serde_json::to_string_pretty(&value).unwrap();
        assert_eq!(text, again);
        let cmd_pos = text.find("\"command\"").unwrap();
        let payload_pos = text.find("\"payload\"").unwrap();
        let timing_pos = text.find("\"timing_us\"").unwrap();
        assert!(cmd_pos < payload_pos && payload_pos < timing_pos);
    }
}
