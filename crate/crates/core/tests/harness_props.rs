use ou_harmonic::harness::{
    hypercontractive_exponent, hypercontractivity_suite, kernel_suite, ladder_partition, CaseKind,
    HypercontractivityConfig, KernelConfig, ReportBuilder,
};
use proptest::prelude::*;
use serde_json::json;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pass_rule(value in -10.0f64..10.0, bound in -10.0f64..10.0, slack in 0.0f64..1.0, kind in 0u8..3) {
        let mut b = ReportBuilder::new("probe");
        match kind {
            0 => b.assert_le("case", json!({}), value, bound, slack),
            1 => b.fitted_le("case", json!({}), value, bound, slack),
            _ => b.report("case", json!({}), value, bound),
        }
        let report = b.finish();
        let case = &report.cases[0];
        let holds = if case.kind == CaseKind::Reported { true } else { value <= bound + slack };
        prop_assert_eq!(case.pass, holds);
        prop_assert_eq!(report.summary.pass, holds);
    }

    #[test]
    fn ladder_partition_is_exact(log4_kappa in 1u32..4, k in 0u32..=8) {
        prop_assert_eq!(ladder_partition(4f64.powi(log4_kappa as i32), k).unwrap(), 1.0);
    }

    #[test]
    fn hypercontractive_exponent_grows(p in 1.01f64..4.0, t in 0.0f64..3.0, dt in 0.0f64..1.0) {
        let q = hypercontractive_exponent(p, t).unwrap();
        prop_assert!(q >= p);
        prop_assert!(hypercontractive_exponent(p, t + dt).unwrap() >= q);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn seeded_reports_are_bit_identical(seed in any::<u64>()) {
        let kernel = KernelConfig { seed, ..Default::default() };
        let a = serde_json::to_string(&kernel_suite(&kernel).unwrap()).unwrap();
        let b = serde_json::to_string(&kernel_suite(&kernel).unwrap()).unwrap();
        prop_assert_eq!(a, b);

        let hyper = HypercontractivityConfig { seed, trials: 20, ..Default::default() };
        let a = serde_json::to_string(&hypercontractivity_suite(&hyper).unwrap()).unwrap();
        let b = serde_json::to_string(&hypercontractivity_suite(&hyper).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }
}
