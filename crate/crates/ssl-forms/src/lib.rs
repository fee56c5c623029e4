//! Supersingular loci over F_p computed from Hecke trace forms.
//!
//! The crate computes the supersingular polynomial S_p(x) two independent
//! ways (a brute-force Hasse-invariant scan over F_{p^2}, and divisor
//! polynomials of weight-(p-1) forms mod p), evaluates Hecke traces with
//! the Eichler-Selberg trace formula, and mechanically verifies the
//! congruence and factorization laws that connect trace forms of different
//! weights to S_p(x).

pub mod cache;
pub mod divisor_poly;
pub mod finite_field;
pub mod output;
pub mod qseries;
pub mod supersingular;
pub mod trace_formula;
pub mod verification;

#[cfg(test)]
mod thread_safety {
    // Every domain value is immutable after construction and safe to
    // share or send between threads.
    fn assert_send_sync<T: Send + Sync>() {}

    #[test]
    fn domain_types_are_send_sync() {
        assert_send_sync::<crate::finite_field::PrimeModulus>();
        assert_send_sync::<crate::finite_field::FpElement>();
        assert_send_sync::<crate::finite_field::Fp2>();
        assert_send_sync::<crate::finite_field::FpPolynomial>();
        assert_send_sync::<crate::finite_field::Factorization>();
        assert_send_sync::<crate::qseries::QExpansion>();
        assert_send_sync::<crate::qseries::LaurentExpansion>();
        assert_send_sync::<crate::trace_formula::HurwitzTable>();
        assert_send_sync::<crate::trace_formula::TraceForm>();
        assert_send_sync::<crate::trace_formula::ModifiedTraceForm>();
        assert_send_sync::<crate::divisor_poly::DivisorDecomposition>();
        assert_send_sync::<crate::supersingular::SupersingularLocus>();
        assert_send_sync::<crate::verification::VerificationReport>();
    }
}
