//! The supersingular locus at p, computed two independent ways.
//!
//! The oracle route scans every j in F_{p^2}, builds a curve with that
//! j-invariant, and tests supersingularity through the Hasse invariant:
//! y^2 = f(x) is supersingular iff the x^{p-1} coefficient of
//! f(x)^{(p-1)/2} vanishes. The arithmetic route extracts the divisor
//! polynomial of the constant series 1 tagged with weight p-1 (the
//! reduction of the weight-(p-1) Eisenstein series, which is 1 mod p).
//! Both produce
//!
//!   S_p(x) = x^{delta_p} (x - 1728)^{eps_p} S~_p(x),
//!
//! monic of degree floor(p/12) + delta_p + eps_p, squarefree, split over
//! F_{p^2}.

use crate::divisor_poly::{divisor_polynomial, ssp_exponents, weight_profile};
use crate::finite_field::{Fp2, Fp2Element, FpElement, FpPolynomial, PrimeModulus};
use crate::qseries::{binomial_half_expansion, HalfPowerFamily, QExpansion};
use thiserror::Error;

/// The j-scan is O(p^2) curve tests; this guard keeps accidental huge
/// inputs out. The divisor-polynomial route has no such bound.
pub const ORACLE_MAX_P: u64 = 1000;

/// Products in the Hasse-invariant power are truncated at degree
/// p - 1 + HASSE_TRUNCATION_MARGIN; only the x^{p-1} coefficient is read.
const HASSE_TRUNCATION_MARGIN: usize = 2;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SupersingularError {
    #[error("the F_{{p^2}} scan is guarded to p <= {ORACLE_MAX_P}, got {0}")]
    OracleGuard(u64),
    #[error("product over supersingular j-invariants left F_{{p^2}}: {0}")]
    CoefficientOutsideBaseField(String),
    #[error("family form has zero constant term at p = {0}; cannot normalize")]
    ZeroConstantTerm(u64),
}

/// S_p and S~_p for one prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupersingularLocus {
    pub p: PrimeModulus,
    pub s_poly: FpPolynomial,
    pub s_tilde: FpPolynomial,
}

/// Hasse-invariant supersingularity test for a single j in F_{p^2}.
///
/// The curve is y^2 = x^3 + 1 for j = 0, y^2 = x^3 + x for j = 1728, and
/// otherwise y^2 = x^3 + 3c x + 2c with c = j/(1728 - j); supersingularity
/// only depends on j, so any model works.
pub fn is_supersingular_j(field: &Fp2, j: Fp2Element) -> bool {
    let p = field.modulus();
    let j1728 = field.embed(p.element(1728 % p.value()));
    let (a, b) = if j.is_zero() {
        (field.zero(), field.one())
    } else if j == j1728 {
        (field.one(), field.zero())
    } else {
        let c = field.mul(j, field.inv(field.sub(j1728, j)));
        (
            field.mul(field.element(3, 0), c),
            field.mul(field.element(2, 0), c),
        )
    };
    // f(x) = x^3 + a x + b
    let f = vec![b, a, field.zero(), field.one()];
    let target = (p.value() - 1) as usize;
    let truncation = target + HASSE_TRUNCATION_MARGIN;
    let h = fp2_poly_pow_truncated(field, &f, (p.value() - 1) / 2, truncation);
    h.get(target).map_or(true, |c| c.is_zero())
}

/// base^e over F_{p^2}[x], discarding all terms of degree > max_deg at
/// every step. Discarding high terms never changes the surviving low ones.
fn fp2_poly_pow_truncated(
    field: &Fp2,
    base: &[Fp2Element],
    mut e: u64,
    max_deg: usize,
) -> Vec<Fp2Element> {
    let mut acc = vec![field.one()];
    let mut b: Vec<Fp2Element> = base.iter().copied().take(max_deg + 1).collect();
    while e > 0 {
        if e & 1 == 1 {
            acc = fp2_poly_mul_truncated(field, &acc, &b, max_deg);
        }
        e >>= 1;
        if e > 0 {
            b = fp2_poly_mul_truncated(field, &b, &b, max_deg);
        }
    }
    acc
}

fn fp2_poly_mul_truncated(
    field: &Fp2,
    a: &[Fp2Element],
    b: &[Fp2Element],
    max_deg: usize,
) -> Vec<Fp2Element> {
    let out_len = (a.len() + b.len() - 1).min(max_deg + 1);
    let mut out = vec![field.zero(); out_len];
    for (i, &ai) in a.iter().enumerate() {
        if ai.is_zero() || i > max_deg {
            continue;
        }
        for (k, &bk) in b.iter().enumerate() {
            if i + k > max_deg {
                break;
            }
            out[i + k] = field.add(out[i + k], field.mul(ai, bk));
        }
    }
    out
}

/// Brute-force S_p: scan all of F_{p^2} (conjugate pairs share one Hasse
/// test), multiply x - j over the supersingular ones in a sorted order,
/// and check the product lands in `F_p[x]`.
pub fn supersingular_oracle(p: PrimeModulus) -> Result<SupersingularLocus, SupersingularError> {
    if p.value() > ORACLE_MAX_P {
        return Err(SupersingularError::OracleGuard(p.value()));
    }
    let field = Fp2::new(p);
    let q = p.value();
    let mut roots: Vec<(u64, u64)> = Vec::new();
    for a in 0..q {
        for b in 0..=(q - 1) / 2 {
            let j = field.element(a, b);
            if is_supersingular_j(&field, j) {
                roots.push((a, b));
                if b != 0 {
                    // the conjugate a - bw is supersingular too
                    roots.push((a, q - b));
                }
            }
        }
    }
    roots.sort_unstable();

    let mut product = vec![field.one()];
    for &(a, b) in &roots {
        let j = field.element(a, b);
        // multiply by (x - j)
        let mut next = vec![field.zero(); product.len() + 1];
        for (i, &c) in product.iter().enumerate() {
            next[i + 1] = field.add(next[i + 1], c);
            next[i] = field.sub(next[i], field.mul(c, j));
        }
        product = next;
    }

    let mut coeffs = Vec::with_capacity(product.len());
    for (i, c) in product.iter().enumerate() {
        if !c.is_in_base_field() {
            return Err(SupersingularError::CoefficientOutsideBaseField(format!(
                "coefficient of x^{i} is {}+{}w",
                c.a, c.b
            )));
        }
        coeffs.push(c.a.value() as i64);
    }
    let s_poly = FpPolynomial::from_coeffs(p, &coeffs);
    let s_tilde = strip_forced_factors(p, &s_poly);
    Ok(SupersingularLocus {
        p,
        s_poly,
        s_tilde,
    })
}

fn strip_forced_factors(p: PrimeModulus, s: &FpPolynomial) -> FpPolynomial {
    let e = ssp_exponents(p);
    let mut out = s.clone();
    if e.delta_p == 1 {
        let (q, r) = out.divrem(&FpPolynomial::x(p)).expect("x is nonzero");
        assert!(r.is_zero(), "j = 0 must be a root when p = 2 mod 3");
        out = q;
    }
    if e.eps_p == 1 {
        let (q, r) = out
            .divrem(&FpPolynomial::linear(p, -1728))
            .expect("nonzero");
        assert!(r.is_zero(), "j = 1728 must be a root when p = 3 mod 4");
        out = q;
    }
    out
}

/// S_p by divisor polynomials: S~_p is the divisor polynomial of the
/// constant series 1 at weight p-1, and the forced factors x^{delta_p}
/// (x-1728)^{eps_p} complete it.
pub fn supersingular_deligne(p: PrimeModulus) -> SupersingularLocus {
    let profile = weight_profile(p.value() - 1).expect("p - 1 is even and >= 4");
    let one = QExpansion::constant(p, (p.value() - 1) as i64, 1, profile.m as usize + 1);
    let s_tilde = divisor_polynomial(&one, profile)
        .expect("the constant series is the reduction of a weight p-1 form")
        .poly;
    let e = ssp_exponents(p);
    let s_poly = FpPolynomial::x(p)
        .pow(e.delta_p as u64)
        .mul(&FpPolynomial::linear(p, -1728).pow(e.eps_p as u64))
        .mul(&s_tilde);
    SupersingularLocus {
        p,
        s_poly,
        s_tilde,
    }
}

/// Outcome of checking one of the classical weight-(p-1) families against
/// the oracle locus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyCrosscheck {
    pub family: HalfPowerFamily,
    pub matches: bool,
    /// The form's constant term before normalization; the unit relating its
    /// divisor polynomial to the monic S~_p.
    pub scalar: FpElement,
}

/// Computes the family form, normalizes it by its constant term, extracts
/// its divisor polynomial, and compares x^{delta_p} (x-1728)^{eps_p} F
/// against the oracle S_p (equality up to a unit; normalization makes both
/// sides monic).
pub fn crosscheck_families(
    p: PrimeModulus,
    family: HalfPowerFamily,
) -> Result<FamilyCrosscheck, SupersingularError> {
    let profile = weight_profile(p.value() - 1).expect("p - 1 is even and >= 4");
    let form = binomial_half_expansion(p, family, profile.m as usize + 1);
    let scalar = form.coeff(0);
    if scalar.is_zero() {
        return Err(SupersingularError::ZeroConstantTerm(p.value()));
    }
    let normalized = form.scale(scalar.inv());
    let f = divisor_polynomial(&normalized, profile)
        .expect("family forms are reductions of weight p-1 forms")
        .poly;
    let e = ssp_exponents(p);
    let candidate = FpPolynomial::x(p)
        .pow(e.delta_p as u64)
        .mul(&FpPolynomial::linear(p, -1728).pow(e.eps_p as u64))
        .mul(&f)
        .monic();
    let oracle = supersingular_oracle(p)?;
    Ok(FamilyCrosscheck {
        family,
        matches: candidate == oracle.s_poly,
        scalar,
    })
}
