//! Complete factorization over F_p: squarefree decomposition, then
//! distinct-degree splitting, then Cantor-Zassenhaus equal-degree splitting.
//!
//! Equal-degree splitting draws candidates from a splitmix64 stream seeded
//! by a fixed constant mixed with a hash of the input, so the output is
//! bit-reproducible run to run. Factors come back sorted by degree, then
//! lexicographically by ascending coefficients.

use super::poly::FpPolynomial;
use super::{FieldError, FpElement, PrimeModulus};

/// `unit * prod(factor_i^multiplicity_i)` equals the factored input;
/// every factor is monic irreducible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: FpElement,
    pub factors: Vec<(FpPolynomial, u64)>,
}

impl Factorization {
    /// Re-multiplies the factorization.
    pub fn expand(&self) -> FpPolynomial {
        let mut acc = FpPolynomial::constant(self.unit.modulus(), self.unit.value());
        for (f, e) in &self.factors {
            acc = acc.mul(&f.pow(*e));
        }
        acc
    }

    /// Multiplicity of a given monic factor, 0 if absent.
    pub fn multiplicity_of(&self, g: &FpPolynomial) -> u64 {
        self.factors
            .iter()
            .find(|(f, _)| f == g)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }
}

pub fn poly_factor(f: &FpPolynomial) -> Result<Factorization, FieldError> {
    if f.is_zero() {
        return Err(FieldError::ZeroPolynomial);
    }
    let unit = f.leading_coeff();
    let monic = f.monic();
    let mut factors: Vec<(FpPolynomial, u64)> = Vec::new();
    if monic.degree() == Some(0) {
        return Ok(Factorization { unit, factors });
    }

    let mut rng = SplitMix64::new(EDF_SEED ^ fnv1a_poly(f));
    for (part, mult) in squarefree_decomposition(&monic) {
        for (deg, prod) in distinct_degree_split(&part) {
            for irr in equal_degree_split(&prod, deg, &mut rng) {
                factors.push((irr, mult));
            }
        }
    }

    factors.sort_by(|(a, _), (b, _)| {
        a.degree()
            .cmp(&b.degree())
            .then_with(|| a.coeffs().cmp(b.coeffs()))
    });
    Ok(Factorization { unit, factors })
}

/// Splits a monic f of degree >= 1 into pairwise-coprime squarefree parts
/// with their multiplicities. Handles the characteristic-p wrinkle where a
/// vanishing derivative means f is a p-th power.
fn squarefree_decomposition(f: &FpPolynomial) -> Vec<(FpPolynomial, u64)> {
    let mut out = Vec::new();
    squarefree_rec(f.clone(), 1, &mut out);
    out
}

fn squarefree_rec(f: FpPolynomial, scale: u64, out: &mut Vec<(FpPolynomial, u64)>) {
    let p = f.modulus().value();
    let df = f.derivative();
    if df.is_zero() {
        // f = g(x^p) = g(x)^p since c^(1/p) = c in F_p.
        squarefree_rec(pth_root(&f), scale * p, out);
        return;
    }
    let mut t = f.gcd(&df);
    let mut v = f.divrem(&t).expect("gcd divides").0;
    let mut i = 1u64;
    while v.degree() > Some(0) {
        let w = t.gcd(&v);
        let a = v.divrem(&w).expect("gcd divides").0;
        if a.degree() > Some(0) {
            out.push((a, scale * i));
        }
        t = t.divrem(&w).expect("gcd divides").0;
        v = w;
        i += 1;
    }
    // Whatever survives all divisions is a p-th power.
    if t.degree() > Some(0) {
        squarefree_rec(pth_root(&t), scale * p, out);
    }
}

/// For f(x) = g(x^p), returns g. Coefficients carry over unchanged because
/// the Frobenius is the identity on F_p.
fn pth_root(f: &FpPolynomial) -> FpPolynomial {
    let p = f.modulus().value() as usize;
    let coeffs: Vec<i64> = f
        .coeffs()
        .iter()
        .step_by(p)
        .map(|&c| c as i64)
        .collect();
    FpPolynomial::from_coeffs(f.modulus(), &coeffs)
}

/// Splits a monic squarefree f into (d, product of its irreducible factors
/// of degree d), via gcds with x^(p^d) - x.
fn distinct_degree_split(f: &FpPolynomial) -> Vec<(usize, FpPolynomial)> {
    let modulus = f.modulus();
    let p = modulus.value();
    let x = FpPolynomial::x(modulus);
    let mut rest = f.clone();
    let mut power = x.divrem(&rest).expect("deg >= 1").1; // x^(p^0) mod rest
    let mut out = Vec::new();
    let mut d = 0usize;
    while rest.degree() > Some(0) && 2 * (d + 1) <= rest.degree().unwrap() {
        d += 1;
        power = power.pow_mod_base_p(p, &rest);
        let g = rest.gcd(&power.sub(&x));
        if g.degree() > Some(0) {
            out.push((d, g.clone()));
            rest = rest.divrem(&g).expect("gcd divides").0;
            power = power.divrem(&rest).expect("deg >= 1").1;
        }
    }
    if rest.degree() > Some(0) {
        out.push((rest.degree().unwrap(), rest));
    }
    out
}

impl FpPolynomial {
    /// self^p mod m; tiny wrapper so the DDF loop reads naturally.
    fn pow_mod_base_p(&self, p: u64, m: &FpPolynomial) -> FpPolynomial {
        self.pow_mod(p, m).expect("modulus has degree >= 1")
    }
}

/// Cantor-Zassenhaus equal-degree splitting of a monic squarefree product
/// of irreducibles all of degree d. p is odd here (p >= 5), so the
/// (p^d - 1)/2 power map separates factors.
fn equal_degree_split(
    f: &FpPolynomial,
    d: usize,
    rng: &mut SplitMix64,
) -> Vec<FpPolynomial> {
    let n = f.degree().expect("nonzero");
    if n == d {
        return vec![f.monic()];
    }
    let modulus = f.modulus();
    let p = modulus.value();
    let exp: u128 = (p as u128).pow(d as u32) / 2; // (p^d - 1)/2 for odd p^d
    let one = FpPolynomial::one(modulus);

    let mut stack = vec![f.monic()];
    let mut done = Vec::new();
    while let Some(g) = stack.pop() {
        let dg = g.degree().unwrap();
        if dg == d {
            done.push(g);
            continue;
        }
        // Draw random candidates until one splits g.
        loop {
            let a = random_poly(modulus, dg, rng);
            if a.degree().is_none() || a.degree() == Some(0) {
                continue;
            }
            let c = g.gcd(&a);
            let split = if c.degree() > Some(0) && c.degree() < g.degree() {
                Some(c)
            } else {
                let b = a.pow_mod(exp, &g).expect("deg >= 1").sub(&one);
                let c = g.gcd(&b);
                if c.degree() > Some(0) && c.degree() < g.degree() {
                    Some(c)
                } else {
                    None
                }
            };
            if let Some(c) = split {
                let rest = g.divrem(&c).expect("gcd divides").0;
                stack.push(c.monic());
                stack.push(rest.monic());
                break;
            }
        }
    }
    done
}

fn random_poly(modulus: PrimeModulus, max_deg: usize, rng: &mut SplitMix64) -> FpPolynomial {
    let p = modulus.value();
    let coeffs: Vec<i64> = (0..max_deg).map(|_| (rng.next() % p) as i64).collect();
    FpPolynomial::from_coeffs(modulus, &coeffs)
}

const EDF_SEED: u64 = 0x5353_4c5f_464f_524d; // "SSL_FORM"

fn fnv1a_poly(f: &FpPolynomial) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    let mut eat = |v: u64| {
        for byte in v.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x100_0000_01b3);
        }
    };
    eat(f.modulus().value());
    for &c in f.coeffs() {
        eat(c);
    }
    h
}

struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    fn next(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
}
