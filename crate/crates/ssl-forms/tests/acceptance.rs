//! Acceptance suite: every documented deliverable of the crate, run at its
//! stated time budget. Each test prints one pass line; a failed assertion
//! is the fail line.

use num_bigint::BigInt;
use ssl_forms::divisor_poly::{divisor_polynomial, recompose, product_exponents, weight_profile};
use ssl_forms::finite_field::{poly_factor, FpPolynomial, PrimeModulus};
use ssl_forms::qseries::{delta_series, eisenstein_series, Eisenstein, QExpansion};
use ssl_forms::supersingular::{supersingular_deligne, supersingular_oracle};
use ssl_forms::trace_formula::{
    dim_cusp_forms, eichler_selberg_trace, gegenbauer_p, gegenbauer_p_unreduced_mod, hurwitz_12,
    isqrt, kronecker_hurwitz_check, modified_trace_form, trace_form, HurwitzTable, TraceMode,
};
use ssl_forms::verification::{
    check_congruence, classify_ramification, scan_congruences, sturm_bound,
    verify_trace_congruences, CongruenceCase, CongruenceClaim, FormKind, Ramification,
};
use std::process::Command;
use std::time::{Duration, Instant};

const PRIMES_TO_97: [u64; 23] = [
    5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

fn pm(v: u64) -> PrimeModulus {
    PrimeModulus::new(v).unwrap()
}

fn done(name: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    println!("acceptance {name}: PASS ({elapsed:.2?}, budget {budget:.2?})");
    assert!(
        elapsed <= budget,
        "{name} exceeded its time budget: {elapsed:.2?} > {budget:.2?}"
    );
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ssl-forms"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("no signal"),
        String::from_utf8(out.stdout).unwrap(),
    )
}

// Small-prime loci through the CLI, both computation routes, exact
// factored forms, under a second per prime.
#[test]
fn a01_small_prime_loci_via_cli() {
    let started = Instant::now();
    let expected = [
        (5u64, "x", "1"),
        (7, "(x+1)", "1"),
        (13, "(x+8)", "(x+8)"),
        (17, "x*(x+9)", "(x+9)"),
        (29, "x*(x+4)*(x+27)", "(x+4)*(x+27)"),
        (37, "(x+29)*(x^2+31x+31)", "(x+29)*(x^2+31x+31)"),
    ];
    for (p, s, s_tilde) in expected {
        let t = Instant::now();
        let (code, text) = run_cli(&[
            "ssp",
            "--p",
            &p.to_string(),
            "--method",
            "both",
            "--no-cache",
        ]);
        assert_eq!(code, 0, "p={p}");
        assert!(text.contains(&format!("S_{p} = {s}\n")), "p={p}: {text}");
        assert!(
            text.contains(&format!("S~_{p} = {s_tilde}\n")),
            "p={p}: {text}"
        );
        assert!(text.contains("methods agree: true"), "p={p}");
        assert!(t.elapsed() < Duration::from_secs(1), "p={p} took {:?}", t.elapsed());
    }
    done("01 small-prime loci (cli, both methods)", started, Duration::from_secs(6));
}

// The O(p^2) curve scan and the divisor-polynomial route agree for every
// prime up to 97, within a minute total.
#[test]
fn a02_oracle_deligne_agreement_to_97() {
    let started = Instant::now();
    for &p in &PRIMES_TO_97 {
        let m = pm(p);
        let oracle = supersingular_oracle(m).unwrap();
        let arithmetic = supersingular_deligne(m);
        assert_eq!(oracle, arithmetic, "p={p}");
    }
    done("02 oracle = divisor route, p <= 97", started, Duration::from_secs(60));
}

// The weight-2196 trace form mod 13: dimension, leading coefficients, and
// the pure power divisor polynomial.
#[test]
fn a03_weight_2196_trace_form_mod_13() {
    let started = Instant::now();
    assert_eq!(dim_cusp_forms(2196), 183);
    let p = pm(13);
    let profile = weight_profile(2196).unwrap();
    let precision = profile.m as usize + 1;
    let table = HurwitzTable::up_to(HurwitzTable::required_for_trace(precision - 1));
    let form = trace_form(2196, p, precision, &table).unwrap();
    assert_eq!(&form.series().coeffs()[..6], &[0, 1, 2, 5, 10, 7]);
    let f = divisor_polynomial(form.series(), profile).unwrap().poly;
    assert_eq!(f, FpPolynomial::linear(p, 8).pow(182));
    let n = 182u64;
    assert_eq!((13 * 13 + 13) * (2196 / (13 * 13 * 13 - 13)), n);
    done("03 weight-2196 trace form mod 13", started, Duration::from_secs(120));
}

// The exact second trace at weight 2196: a 329-digit integer with pinned
// head and tail.
#[test]
fn a04_exact_big_integer_trace() {
    let started = Instant::now();
    let table = HurwitzTable::up_to(8);
    let value = eichler_selberg_trace(2196, 2, TraceMode::Exact, &table)
        .unwrap()
        .unwrap_exact();
    assert!(value > BigInt::from(0));
    let digits = value.to_string();
    assert_eq!(digits.len(), 329);
    assert!(digits.starts_with("930885"), "head was {}", &digits[..6]);
    assert!(digits.ends_with("406856"), "tail was {}", &digits[digits.len() - 6..]);
    done("04 exact 329-digit trace", started, Duration::from_secs(5));
}

// The worked weight-24/28 comparison: recurrence values, class numbers,
// and the congruence both as weighted sums and coefficient by coefficient.
#[test]
fn a05_weight_24_28_example_values() {
    let started = Instant::now();
    let exact = |k, t| gegenbauer_p(k, t, 2, TraceMode::Exact).unwrap_exact();
    let table2 = [
        (0i64, -2048i64, -8192i64, 12i64), // t, P_24, P_28, 12H(8-t^2)
        (1, 967, 8279, 12),
        (-1, 967, 8279, 12),
        (2, -2048, 8192, 6),
        (-2, -2048, 8192, 6),
    ];
    for &(t, p24, p28, h12) in &table2 {
        assert_eq!(exact(24, t), BigInt::from(p24), "P_24({t},2)");
        assert_eq!(exact(28, t), BigInt::from(p28), "P_28({t},2)");
        assert_eq!(hurwitz_12(8 - t * t), h12, "12H(8-{t}^2)");
    }
    // the elliptic sums agree mod 5
    let sum = |col: fn(&(i64, i64, i64, i64)) -> i64| -> i64 {
        table2.iter().map(|row| col(row) * row.3).sum()
    };
    let s24 = sum(|r| r.1);
    let s28 = sum(|r| r.2);
    assert_eq!(s24.rem_euclid(5), s28.rem_euclid(5));
    // and the full congruence T_24 = T_28 mod 5 holds term by term to the
    // Sturm bound
    let p = pm(5);
    let table = HurwitzTable::up_to(HurwitzTable::required_for_trace(4));
    let claim = CongruenceClaim::new(p, 24, 28, p.one(), FormKind::TraceForm).unwrap();
    let report = check_congruence(&claim, &table).unwrap();
    assert!(report.passed(), "{report:?}");
    done("05 weight-24/28 worked values", started, Duration::from_secs(5));
}

// The full-period congruence at p = 23: T_12172 mod 23 and its completely
// factored divisor polynomial, using the weight-reduced recurrence.
#[test]
fn a06_weight_12172_factorization_mod_23() {
    let started = Instant::now();
    let p = pm(23);
    let profile = weight_profile(12172).unwrap();
    assert_eq!(profile.m, 1014);
    assert_eq!(dim_cusp_forms(12172), 1014);
    let precision = profile.m as usize + 1;
    let table = HurwitzTable::up_to(HurwitzTable::required_for_trace(precision - 1));
    // the exact q^2 coefficient is a 1832-digit integer with pinned ends
    let exact2 = eichler_selberg_trace(12172, 2, TraceMode::Exact, &table)
        .unwrap()
        .unwrap_exact()
        .to_string();
    assert_eq!(exact2.len(), 1832);
    assert!(exact2.starts_with("625630") && exact2.ends_with("201640"));
    let form = trace_form(12172, p, precision, &table).unwrap();
    assert_eq!(&form.series().coeffs()[..7], &[0, 2, 0, 18, 9, 18, 9]);
    let f = divisor_polynomial(form.series(), profile).unwrap().poly;
    let expected = FpPolynomial::linear(p, 7)
        .scale(p.element(2))
        .mul(&FpPolynomial::linear(p, 4).pow(552))
        .mul(&FpPolynomial::x(p).pow(184))
        .mul(&FpPolynomial::linear(p, 20).pow(276));
    assert_eq!(f, expected);
    // 552 = (23^2 + 23) floor(12172 / (23^3 - 23))
    assert_eq!((23 * 23 + 23) * (12172 / (23 * 23 * 23 - 23)), 552);
    // and the congruence behind it: T_12172 = T_28 mod 23 (weights differ
    // by p(p^2-1))
    let claim = CongruenceClaim::new(p, 28, 12172, p.one(), FormKind::TraceForm).unwrap();
    let report = check_congruence(&claim, &table).unwrap();
    assert!(report.passed(), "{report:?}");
    done("06 weight-12172 factorization mod 23", started, Duration::from_secs(900));
}

// The scaled congruence 3 T_28 = T_76 mod 5 and both divisor polynomials.
#[test]
fn a07_scaled_congruence_mod_5() {
    let started = Instant::now();
    let p = pm(5);
    let table = HurwitzTable::up_to(HurwitzTable::required_for_trace(
        sturm_bound(76) as usize
    ));
    // exact leading coefficients of both forms:
    // 3 T_28 = 6q - 24840q^2 - 3858840q^3, T_76 = 6q - 57080822040q^2 - ...
    let tr = |k, n| {
        eichler_selberg_trace(k, n, TraceMode::Exact, &table)
            .unwrap()
            .unwrap_exact()
    };
    assert_eq!(tr(28, 2) * 3, BigInt::from(-24840));
    assert_eq!(tr(28, 3) * 3, BigInt::from(-3858840));
    assert_eq!(tr(76, 2), BigInt::from(-57080822040i64));
    assert_eq!(tr(76, 3), BigInt::from(-785092363818710040i64));
    let claim = CongruenceClaim::new(p, 28, 76, p.element(3), FormKind::TraceForm).unwrap();
    let report = check_congruence(&claim, &table).unwrap();
    assert!(report.passed(), "{report:?}");

    let prof76 = weight_profile(76).unwrap();
    let t76 = trace_form(76, p, prof76.m as usize + 1, &table).unwrap();
    let f76 = divisor_polynomial(t76.series(), prof76).unwrap().poly;
    assert_eq!(
        f76,
        FpPolynomial::x(p).pow(4).mul(&FpPolynomial::linear(p, 4))
    );

    let prof28 = weight_profile(28).unwrap();
    let t28 = trace_form(28, p, prof28.m as usize + 1, &table).unwrap();
    let f28 = divisor_polynomial(t28.series(), prof28).unwrap().poly;
    assert_eq!(f28.scale(p.element(3)), FpPolynomial::linear(p, 4));
    done("07 scaled congruence mod 5", started, Duration::from_secs(1));
}

// The two modified-trace-form factorizations, matched against the printed
// irreducible factors, with the guaranteed multiplicities attained.
#[test]
fn a08_hat_form_factorizations() {
    let started = Instant::now();

    // p = 17, k = 582: F = 14 x^14 (x+9)^42 Q, Q irreducible of degree 15.
    let t = Instant::now();
    let p = pm(17);
    let tag = weight_profile(582 + 17 * 17 - 1).unwrap();
    let table = HurwitzTable::up_to(HurwitzTable::required_for_trace(tag.m as usize));
    let hat = modified_trace_form(582, p, tag.m as usize + 1, &table).unwrap();
    let f = divisor_polynomial(hat.series(), tag).unwrap().poly;
    let q_poly = FpPolynomial::from_coeffs(
        p,
        &[8, 0, 13, 4, 0, 0, 7, 15, 14, 13, 8, 4, 13, 10, 13, 1],
    );
    let expected = FpPolynomial::x(p)
        .pow(14)
        .mul(&FpPolynomial::linear(p, 9).pow(42))
        .mul(&q_poly)
        .scale(p.element(14));
    assert_eq!(f, expected);
    let fz = poly_factor(&f).unwrap();
    assert_eq!(fz.unit, p.element(14));
    assert_eq!(fz.multiplicity_of(&FpPolynomial::linear(p, 9)), 42);
    assert_eq!(fz.multiplicity_of(&q_poly), 1);
    let guaranteed = (17 + 1) * (582 / (17 * 17 - 1) - 1);
    assert_eq!(guaranteed, 18);
    assert!(42 >= guaranteed);
    // the lower form in the same chain: F at k = 294 is 7 x^8 (x+9)^24 Q
    // with the same irreducible Q, and the transfer multiplies in
    // 2 (x+9)^18 x^6
    let tag294 = weight_profile(294 + 17 * 17 - 1).unwrap();
    let hat294 = modified_trace_form(294, p, tag294.m as usize + 1, &table).unwrap();
    let f294 = divisor_polynomial(hat294.series(), tag294).unwrap().poly;
    let expected294 = FpPolynomial::x(p)
        .pow(8)
        .mul(&FpPolynomial::linear(p, 9).pow(24))
        .mul(&q_poly)
        .scale(p.element(7));
    assert_eq!(f294, expected294);
    let transferred = f294
        .scale(p.element(2))
        .mul(&FpPolynomial::linear(p, 9).pow(18))
        .mul(&FpPolynomial::x(p).pow(6));
    assert_eq!(f, transferred);
    assert!(t.elapsed() < Duration::from_secs(120));

    // p = 19, k = 724: F = 3 x^6 (x+1)^24 (x+12)^48 (x^2+7x+5) Q1 Q2.
    let t = Instant::now();
    let p = pm(19);
    let tag = weight_profile(724 + 19 * 19 - 1).unwrap();
    let table = HurwitzTable::up_to(HurwitzTable::required_for_trace(tag.m as usize));
    let hat = modified_trace_form(724, p, tag.m as usize + 1, &table).unwrap();
    let f = divisor_polynomial(hat.series(), tag).unwrap().poly;
    let quad = FpPolynomial::from_coeffs(p, &[5, 7, 1]);
    let q1 = FpPolynomial::from_coeffs(p, &[13, 17, 6, 11, 1]);
    let q2 = FpPolynomial::from_coeffs(p, &[4, 7, 1, 3, 9, 1]);
    let expected = FpPolynomial::x(p)
        .pow(6)
        .mul(&FpPolynomial::linear(p, 1).pow(24))
        .mul(&FpPolynomial::linear(p, 12).pow(48))
        .mul(&quad)
        .mul(&q1)
        .mul(&q2)
        .scale(p.element(3));
    assert_eq!(f, expected);
    let fz = poly_factor(&f).unwrap();
    assert_eq!(fz.unit, p.element(3));
    assert_eq!(fz.multiplicity_of(&FpPolynomial::x(p)), 6);
    assert_eq!(fz.multiplicity_of(&FpPolynomial::linear(p, 1)), 24);
    assert_eq!(fz.multiplicity_of(&FpPolynomial::linear(p, 12)), 48);
    assert_eq!(fz.multiplicity_of(&quad), 1);
    assert_eq!(fz.multiplicity_of(&q1), 1);
    assert_eq!(fz.multiplicity_of(&q2), 1);
    let guaranteed = (19 + 1) * (724 / (19 * 19 - 1) - 1);
    assert_eq!(guaranteed, 20);
    assert!(48 >= guaranteed);
    assert!(t.elapsed() < Duration::from_secs(120));

    done("08 modified-form factorizations", started, Duration::from_secs(240));
}

// The small-prime congruence families: exhaustive equal-dimension check
// for p = 5 to weight 124, the six scaled offsets over two scalar periods,
// and documented subsamples to weight 400 for p = 7 and p = 11.
#[test]
fn a09_congruence_families() {
    let started = Instant::now();

    let table = HurwitzTable::up_to(HurwitzTable::required_for_trace(
        sturm_bound(14 + 121 * 121) as usize,
    ));

    // p = 5, equal dimensions, exhaustive to weight 124.
    let p5 = pm(5);
    let report =
        verify_trace_congruences(p5, &CongruenceCase::EqualDimension { k_max: 124 }, &table)
            .unwrap();
    assert!(report.passed(), "{report:?}");
    assert!(report.checked > 0);

    // p = 5, scaled shifts: all six offsets, c covering two full periods of
    // the scalar c + 1 mod 5 (c = 4, 9 excluded by the theorem hypothesis).
    for c in 1..=10u64 {
        if (c + 1) % 5 == 0 {
            continue;
        }
        let report =
            verify_trace_congruences(p5, &CongruenceCase::ScaledShift { offset: None, c }, &table)
                .unwrap();
        assert!(report.passed(), "c={c}: {report:?}");
    }

    // p = 7 and p = 11: the full range is beyond desk scale; run the
    // documented subsample to weight 400 (every equal-dimension pair, and
    // the scaled shifts that fit under 400).
    for (q, c_values) in [(7u64, vec![1u64, 2, 3, 4, 5, 7]), (11, vec![1, 2])] {
        let p = pm(q);
        let report =
            verify_trace_congruences(p, &CongruenceCase::EqualDimension { k_max: 400 }, &table)
                .unwrap();
        assert!(report.passed(), "p={q}: {report:?}");
        for c in c_values {
            let report = verify_trace_congruences(
                p,
                &CongruenceCase::ScaledShift { offset: None, c },
                &table,
            )
            .unwrap();
            assert!(report.passed(), "p={q} c={c}: {report:?}");
        }
    }

    done("09 congruence families", started, Duration::from_secs(300));
}

// Bulk property suites: class-number relation, locus structure, the
// recurrence-shift grid, and the divisor-polynomial laws.
#[test]
fn a10_property_suites() {
    let started = Instant::now();

    // Kronecker-Hurwitz for every n <= 5000, against the shared table.
    let table = HurwitzTable::up_to(4 * 5000);
    for n in 1..=5000u64 {
        let bound = isqrt(4 * n) as i64;
        let lhs: i64 = (-bound..=bound)
            .map(|t| table.twelve_h(4 * n as i64 - t * t))
            .sum();
        let rhs: i64 = (1..=n)
            .filter(|d| n % d == 0)
            .map(|d| d.max(n / d) as i64)
            .sum();
        assert_eq!(lhs, 12 * rhs, "n={n}");
    }
    // the single-shot operation agrees on a sample
    for n in (1..=500).step_by(7) {
        assert!(kronecker_hurwitz_check(n), "n={n}");
    }

    // Locus structure for every p <= 97: degree, squarefree, splits over
    // F_{p^2}, only small factors.
    for &q in &PRIMES_TO_97 {
        let p = pm(q);
        let locus = supersingular_deligne(p);
        assert_eq!(
            locus.s_tilde.degree().map_or(0, |d| d as u64),
            q / 12,
            "deg S~ at p={q}"
        );
        let g = locus.s_poly.gcd(&locus.s_poly.derivative());
        assert_eq!(g.degree(), Some(0), "squarefree at p={q}");
        let x = FpPolynomial::x(p);
        let frob2 = x.pow_mod(q * q, &locus.s_poly).unwrap();
        assert_eq!(frob2, x.divrem(&locus.s_poly).unwrap().1, "split at p={q}");
        for (f, _) in poly_factor(&locus.s_poly).unwrap().factors {
            assert!(f.degree() <= Some(2), "factor degree at p={q}");
        }
    }

    // Recurrence-shift grid: p in {5,7,11}, k in {0,4,6,8,10,14}, m <= 4,
    // n <= 20, every t with t^2 <= 4n and p not dividing n.
    for q in [5u64, 7, 11] {
        let p = pm(q);
        for k in [0u64, 4, 6, 8, 10, 14] {
            for m in 1..=4u64 {
                for n in 1..=20u64 {
                    if n % q == 0 {
                        continue;
                    }
                    let bound = isqrt(4 * n) as i64;
                    for t in -bound..=bound {
                        let shifted = k + m * (q * q - 1);
                        let lhs = gegenbauer_p_unreduced_mod(shifted, t, n, p);
                        let n_el = p.element(n % q);
                        let rhs = match classify_ramification(t, n, p).unwrap() {
                            Ramification::Ramified => {
                                let coeff = p.element_from_signed(k as i64 - m as i64 - 1);
                                let power = if k == 0 {
                                    n_el.inv()
                                } else {
                                    n_el.pow(((k - 2) / 2) as u128)
                                };
                                coeff * power
                            }
                            _ => {
                                if k == 0 {
                                    -n_el.inv()
                                } else {
                                    gegenbauer_p_unreduced_mod(k, t, n, p)
                                }
                            }
                        };
                        assert_eq!(lhs, rhs, "p={q} k={k} m={m} t={t} n={n}");
                    }
                }
            }
        }
    }

    // Divisor-polynomial round trip and product law on monomial forms,
    // hitting every cell of the exponent table.
    let p = pm(13);
    let menu: [(u64, u64, u64); 6] =
        [(1, 0, 0), (1, 2, 1), (0, 1, 0), (0, 0, 1), (0, 2, 0), (0, 1, 1)];
    let build = |a: u64, b: u64, c: u64, prec: usize| {
        delta_series(p, prec)
            .pow(a)
            .mul(&eisenstein_series(Eisenstein::E4, p, prec).pow(b))
            .mul(&eisenstein_series(Eisenstein::E6, p, prec).pow(c))
    };
    let divisor = |f: &QExpansion, k: u64| {
        divisor_polynomial(f, weight_profile(k).unwrap()).unwrap().poly
    };
    for &(a1, b1, c1) in &menu {
        for &(a2, b2, c2) in &menu {
            let k1 = 12 * a1 + 4 * b1 + 6 * c1;
            let k2 = 12 * a2 + 4 * b2 + 6 * c2;
            let prec = ((k1 + k2) / 12 + 2) as usize;
            let f = build(a1, b1, c1, prec);
            let g = build(a2, b2, c2, prec);
            let (ea, eb) = product_exponents(k1, k2);
            let lhs = divisor(&f.mul(&g), k1 + k2);
            let rhs = FpPolynomial::x(p)
                .pow(ea as u64)
                .mul(&FpPolynomial::linear(p, -1728).pow(eb as u64))
                .mul(&divisor(&f, k1))
                .mul(&divisor(&g, k2));
            assert_eq!(lhs, rhs, "k1={k1} k2={k2}");
            // round trip
            let prof = weight_profile(k1 + k2).unwrap();
            let dec = divisor_polynomial(&f.mul(&g), prof).unwrap();
            let back = recompose(&dec, p, prof.m as usize + 1);
            assert_eq!(back.coeffs(), &f.mul(&g).coeffs()[..prof.m as usize + 1]);
        }
    }

    done("10 property suites", started, Duration::from_secs(120));
}

// The scanner finds no unpredicted congruence for p = 13 up to weight 300,
// driven through the CLI; the library route cross-checks the finding list.
#[test]
fn a11_scanner_mod_13_to_300() {
    let started = Instant::now();
    let (code, text) = run_cli(&[
        "scan", "--p", "13", "--kmax", "300", "--format", "json", "--no-cache",
    ]);
    assert_eq!(code, 0, "{text}");
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["payload"]["unpredicted"], 0, "{text}");

    let p = pm(13);
    let table = HurwitzTable::up_to(HurwitzTable::required_for_trace(
        sturm_bound(300) as usize
    ));
    let outcome = scan_congruences(p, 300, &table).unwrap();
    assert!(outcome.examined > 0);
    for finding in &outcome.findings {
        assert!(
            finding.predicted_by.is_some(),
            "unpredicted congruence: k1={} k2={} m={}",
            finding.claim.k1,
            finding.claim.k2,
            finding.claim.scalar
        );
    }
    done("11 scanner mod 13 to weight 300", started, Duration::from_secs(120));
}
