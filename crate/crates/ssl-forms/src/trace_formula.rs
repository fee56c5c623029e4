//! Hurwitz class numbers, the recurrence polynomials P_k(t, n), and traces
//! of Hecke operators on level-one cusp spaces via the Eichler-Selberg
//! trace formula
//!
//!   Tr_k(n) = -1/2 sum_t P_k(t,n) H(4n - t^2) - 1/2 sum_{dd'=n} min(d,d')^{k-1},
//!
//! where t runs over t^2 <= 4n and the divisor sum is over ordered
//! factorizations. All fractional bookkeeping uses 12*H(n) integers and one
//! final division by 24 (exact mode) or multiplication by (-24)^{-1}
//! (mod-p mode); p >= 5 keeps 24 invertible.

use crate::finite_field::{FpElement, PrimeModulus};
use crate::qseries::QExpansion;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceError {
    #[error("exact trace accumulator not divisible by 24 (k={k}, n={n})")]
    DivisibilityFailure { k: u64, n: u64 },
    #[error("Hurwitz table only reaches {have}, need {need}")]
    TableTooSmall { need: usize, have: usize },
    #[error("hurwitz table data malformed: {0}")]
    MalformedTable(String),
}

/// Table of 12*H(n) values for 0 <= n <= max_n. Entry 0 is -1 (H(0) =
/// -1/12); entries with n = 1, 2 mod 4 are 0; everything else is 12 times
/// the weighted count of reduced positive definite forms of discriminant
/// -n. Built once, then shared read-only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HurwitzTable {
    values: Vec<i64>,
}

impl HurwitzTable {
    /// Builds the table by a single sweep over reduced forms (a, b, c) with
    /// -a < b <= a <= c (b >= 0 when a = c), accumulating weight 4 for
    /// a = b = c, 6 for b = 0 with a = c, and 12 otherwise.
    pub fn up_to(max_n: usize) -> HurwitzTable {
        let mut values = vec![0i64; max_n + 1];
        values[0] = -1;
        let mut a = 1u64;
        while 3 * a * a <= max_n as u64 {
            for b in -(a as i64 - 1)..=(a as i64) {
                let mut c = a;
                loop {
                    let n = 4 * a * c - (b * b) as u64;
                    if n > max_n as u64 {
                        break;
                    }
                    if !(b < 0 && a == c) {
                        let w = if b == a as i64 && a == c {
                            4
                        } else if b == 0 && a == c {
                            6
                        } else {
                            12
                        };
                        values[n as usize] += w;
                    }
                    c += 1;
                }
            }
            a += 1;
        }
        HurwitzTable { values }
    }

    /// Wraps previously computed values (e.g. from the on-disk cache),
    /// validating the structural invariants.
    pub fn from_values(values: Vec<i64>) -> Result<HurwitzTable, TraceError> {
        if values.is_empty() || values[0] != -1 {
            return Err(TraceError::MalformedTable(
                "entry 0 must be -1".to_string(),
            ));
        }
        for (n, &v) in values.iter().enumerate().skip(1) {
            if n % 4 == 1 || n % 4 == 2 {
                if v != 0 {
                    return Err(TraceError::MalformedTable(format!(
                        "entry {n} = {v} but n = 1,2 mod 4 forces 0"
                    )));
                }
            } else if v < 0 {
                return Err(TraceError::MalformedTable(format!("entry {n} = {v} < 0")));
            }
        }
        Ok(HurwitzTable { values })
    }

    pub fn max_n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// 12*H(n); zero for negative n. Panics past the table end.
    pub fn twelve_h(&self, n: i64) -> i64 {
        if n < 0 {
            return 0;
        }
        assert!(
            (n as usize) < self.values.len(),
            "12H({n}) requested but table stops at {}",
            self.max_n()
        );
        self.values[n as usize]
    }

    /// Table size needed to evaluate traces up to q^n_max.
    pub fn required_for_trace(n_max: usize) -> usize {
        4 * n_max.max(1)
    }
}

/// 12*H(n) for a single n, by direct enumeration of reduced forms.
pub fn hurwitz_12(n: i64) -> i64 {
    if n < 0 || n % 4 == 1 || n % 4 == 2 {
        return 0;
    }
    if n == 0 {
        return -1;
    }
    let n = n as u64;
    let mut total = 0i64;
    let mut a = 1u64;
    while 3 * a * a <= n {
        for b in -(a as i64 - 1)..=(a as i64) {
            let num = (b * b) as u64 + n;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (b < 0 && a == c) {
                continue;
            }
            total += if b == a as i64 && a == c {
                4
            } else if b == 0 && a == c {
                6
            } else {
                12
            };
        }
        a += 1;
    }
    total
}

/// Checks the classical class number relation
/// sum_t H(4n - t^2) = sum_{dd'=n} max(d, d') at a single n, in 12H units.
pub fn kronecker_hurwitz_check(n: u64) -> bool {
    assert!(n >= 1);
    let mut lhs = 0i64;
    let bound = isqrt(4 * n) as i64;
    for t in -bound..=bound {
        lhs += hurwitz_12(4 * n as i64 - t * t);
    }
    let mut rhs = 0i64;
    for d in 1..=n {
        if n % d == 0 {
            rhs += d.max(n / d) as i64;
        }
    }
    lhs == 12 * rhs
}

/// Floor of the square root.
pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r > 0 && r * r > n {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|v| v <= n) {
        r += 1;
    }
    r
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum TraceMode {
    Exact,
    Mod(PrimeModulus),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TraceValue {
    Exact(BigInt),
    Modular(FpElement),
}

impl TraceValue {
    pub fn unwrap_exact(self) -> BigInt {
        match self {
            TraceValue::Exact(v) => v,
            TraceValue::Modular(_) => panic!("expected exact trace value"),
        }
    }

    pub fn unwrap_modular(self) -> FpElement {
        match self {
            TraceValue::Modular(v) => v,
            TraceValue::Exact(_) => panic!("expected modular trace value"),
        }
    }
}

/// P_k(t, n): the coefficient of x^{k-2} in 1/(1 - tx + nx^2), computed by
/// the recurrence p_0 = 1, p_1 = t, p_a = t p_{a-1} - n p_{a-2}.
///
/// In mod-p mode the weight is first reduced to 4 + ((k-4) mod p(p^2-1)):
/// for fixed (t, n) the values mod p are periodic in k with period dividing
/// p(p^2-1) in every ramification case, which turns O(k) work into O(p^3)
/// for very large weights. [`gegenbauer_p_unreduced_mod`] skips the
/// reduction for cross-checks.
pub fn gegenbauer_p(k: u64, t: i64, n: u64, mode: TraceMode) -> TraceValue {
    assert!(k >= 4 && k % 2 == 0, "need even weight >= 4, got {k}");
    match mode {
        TraceMode::Exact => TraceValue::Exact(gegenbauer_exact(k, t, n)),
        TraceMode::Mod(p) => {
            let period = p.value() * (p.value() * p.value() - 1);
            let k_red = 4 + (k - 4) % period;
            TraceValue::Modular(gegenbauer_p_unreduced_mod(k_red, t, n, p))
        }
    }
}

/// P_k(t, n) mod p by running the recurrence at the full weight k.
///
/// For p below 2^31 the loop runs on raw u64 words: with residues under p
/// the update t*cur + (p-n)*prev stays below 2^63, so one reduction per
/// step suffices.
pub fn gegenbauer_p_unreduced_mod(k: u64, t: i64, n: u64, p: PrimeModulus) -> FpElement {
    assert!(k >= 4 && k % 2 == 0, "need even weight >= 4, got {k}");
    let pv = p.value();
    if pv < (1 << 31) {
        let tm = t.rem_euclid(pv as i64) as u64;
        let n_neg = (pv - n % pv) % pv;
        let mut prev = 1u64; // p_0
        let mut cur = tm; // p_1
        for _ in 2..=(k - 2) {
            let next = (tm * cur + n_neg * prev) % pv;
            prev = cur;
            cur = next;
        }
        return p.element(cur);
    }
    let tm = p.element_from_signed(t);
    let nm = p.element(n % pv);
    let mut prev = p.one();
    let mut cur = tm;
    for _ in 2..=(k - 2) {
        let next = tm * cur - nm * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn gegenbauer_exact(k: u64, t: i64, n: u64) -> BigInt {
    let tb = BigInt::from(t);
    let nb = BigInt::from(n);
    let mut prev = BigInt::one();
    let mut cur = tb.clone();
    for _ in 2..=(k - 2) {
        let next = &tb * &cur - &nb * &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Trace of the Hecke operator T(n) on the weight-k cusp space.
///
/// Computes X = sum_t P_k(t,n) * 12H(4n - t^2) and Y = sum_{dd'=n}
/// min(d,d')^{k-1}, then -(X + 12Y)/24. Exact mode asserts 24 | X + 12Y
/// (a failure would mean an arithmetic bug); mod-p mode multiplies by the
/// inverse of -24.
pub fn eichler_selberg_trace(
    k: u64,
    n: u64,
    mode: TraceMode,
    table: &HurwitzTable,
) -> Result<TraceValue, TraceError> {
    assert!(k >= 4 && k % 2 == 0, "need even weight >= 4, got {k}");
    assert!(n >= 1, "trace index must be positive");
    let need = (4 * n) as usize;
    if table.max_n() < need {
        return Err(TraceError::TableTooSmall {
            need,
            have: table.max_n(),
        });
    }
    let bound = isqrt(4 * n) as i64;
    match mode {
        TraceMode::Exact => {
            let mut x = BigInt::zero();
            for t in -bound..=bound {
                let h = table.twelve_h(4 * n as i64 - t * t);
                if h != 0 {
                    x += gegenbauer_exact(k, t, n) * BigInt::from(h);
                }
            }
            let mut y = BigInt::zero();
            for d in 1..=n {
                if n % d == 0 {
                    y += BigInt::from(d.min(n / d)).pow((k - 1) as u32);
                }
            }
            let total = x + BigInt::from(12) * y;
            if (&total % BigInt::from(24)) != BigInt::zero() {
                return Err(TraceError::DivisibilityFailure { k, n });
            }
            Ok(TraceValue::Exact(-(total / BigInt::from(24))))
        }
        TraceMode::Mod(p) => {
            let mut x = p.zero();
            for t in -bound..=bound {
                let h = table.twelve_h(4 * n as i64 - t * t);
                if h != 0 {
                    let pk = gegenbauer_p(k, t, n, TraceMode::Mod(p)).unwrap_modular();
                    x = x + pk * p.element_from_signed(h);
                }
            }
            let mut y = p.zero();
            for d in 1..=n {
                if n % d == 0 {
                    y = y + p.element(d.min(n / d) % p.value()).pow((k - 1) as u128);
                }
            }
            let total = x + p.element(12) * y;
            let neg24inv = p.element_from_signed(-24).inv();
            Ok(TraceValue::Modular(total * neg24inv))
        }
    }
}

/// dim S_k for even k >= 4: the m in the unique decomposition
/// k = 12m + 4*delta + 6*eps with delta in {0,1,2}, eps in {0,1}.
pub fn dim_cusp_forms(k: u64) -> u64 {
    assert!(k >= 4 && k % 2 == 0, "need even weight >= 4, got {k}");
    if k % 12 == 2 {
        k / 12 - 1
    } else {
        k / 12
    }
}

/// The weight-k trace form: (dim S_k) q + sum_{n>=2} Tr_k(n) q^n mod p.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TraceForm {
    k: u64,
    series: QExpansion,
}

impl TraceForm {
    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn series(&self) -> &QExpansion {
        &self.series
    }

    pub fn into_series(self) -> QExpansion {
        self.series
    }
}

/// Builds T_k mod p to `precision` coefficients (c_0 = 0, c_1 = dim S_k).
pub fn trace_form(
    k: u64,
    p: PrimeModulus,
    precision: usize,
    table: &HurwitzTable,
) -> Result<TraceForm, TraceError> {
    assert!(precision >= 2, "trace forms need precision >= 2");
    let mut coeffs = vec![0u64; precision];
    coeffs[1] = dim_cusp_forms(k) % p.value();
    for (n, slot) in coeffs.iter_mut().enumerate().skip(2) {
        *slot = eichler_selberg_trace(k, n as u64, TraceMode::Mod(p), table)?
            .unwrap_modular()
            .value();
    }
    Ok(TraceForm {
        k,
        series: QExpansion::from_coeffs(
            k as i64,
            p,
            &coeffs.iter().map(|&c| c as i64).collect::<Vec<_>>(),
        ),
    })
}

/// The modified trace form: Tr_k(n) q^n summed over gcd(n, p) = 1. For
/// divisor-polynomial purposes it is the reduction of a form of weight
/// k + p^2 - 1, and its series carries that tag. Coefficientwise it equals
/// theta applied p-1 times to T_k.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModifiedTraceForm {
    k: u64,
    series: QExpansion,
}

impl ModifiedTraceForm {
    pub fn k(&self) -> u64 {
        self.k
    }

    /// The weight the reduction is treated as having: k + p^2 - 1.
    pub fn divisor_weight(&self) -> i64 {
        self.series.weight()
    }

    pub fn series(&self) -> &QExpansion {
        &self.series
    }

    pub fn into_series(self) -> QExpansion {
        self.series
    }
}

pub fn modified_trace_form(
    k: u64,
    p: PrimeModulus,
    precision: usize,
    table: &HurwitzTable,
) -> Result<ModifiedTraceForm, TraceError> {
    let base = trace_form(k, p, precision, table)?;
    let pv = p.value();
    let coeffs: Vec<i64> = base
        .series()
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, &c)| if n as u64 % pv == 0 { 0 } else { c as i64 })
        .collect();
    let tag = k as i64 + (pv * pv) as i64 - 1;
    Ok(ModifiedTraceForm {
        k,
        series: QExpansion::from_coeffs(tag, p, &coeffs),
    })
}
