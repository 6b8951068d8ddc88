mod common;

use common::*;
use proptest::prelude::*;
use weibtail::tail::ConditionalTail;
use weibtail::{gamma_unconditional, Bandwidth, CensoredSample, HazardVariant, KernelSpec, TailVariant};

fn tail_of(sample: &CensoredSample, inst: &Instance) -> ConditionalTail {
    let kernel: KernelSpec = inst.kernel.parse().unwrap();
    let hv = if inst.nelson_aalen { HazardVariant::NelsonAalen } else { HazardVariant::NegLogKm };
    ConditionalTail::new(sample, inst.at, Bandwidth::new(inst.h).unwrap(), kernel, hv).unwrap()
}

#[test]
fn censored_with_all_events_is_complete_hazard() {
    for inst in instances(500, 40, 11) {
        let sample = CensoredSample::from_columns(&inst.x, &inst.z, &inst.d).unwrap();
        let k = inst.k();
        let complete = tail_of(&sample, &inst).estimate(k, TailVariant::CompleteHazard);
        let censored = tail_of(&sample.uncensored(), &inst).estimate(k, TailVariant::Censored);
        match (complete, censored) {
            (Ok(a), Ok(b)) => {
                assert_eq!(a.gamma_hat.to_bits(), b.gamma_hat.to_bits());
                assert_eq!(a.hazard_at_threshold, b.hazard_at_threshold);
                assert_eq!((a.y_n, a.n_exceedances), (b.y_n, b.n_exceedances));
            }
            (Err(a), Err(b)) => assert_eq!(a, b),
            (a, b) => panic!("{a:?} vs {b:?}"),
        }
    }
}

#[test]
fn all_variants_are_scale_invariant() {
    for inst in instances(200, 30, 12) {
        let sample = CensoredSample::from_columns(&inst.x, &inst.z, &inst.d).unwrap();
        let k = inst.k();
        let base = tail_of(&sample, &inst);
        for c in [1e-3, 7.0, 1e3] {
            let scaled = tail_of(&sample.scaled(c).unwrap(), &inst);
            for v in [TailVariant::Censored, TailVariant::CompleteHazard, TailVariant::CompleteLiteral] {
                match (base.estimate(k, v), scaled.estimate(k, v)) {
                    (Ok(a), Ok(b)) => assert!(close(b.gamma_hat, a.gamma_hat, 1e-10), "{v} c={c}"),
                    (Err(a), Err(b)) => assert_eq!(a, b),
                    (a, b) => panic!("{v} c={c}: {a:?} vs {b:?}"),
                }
            }
            let zc: Vec<f64> = inst.z.iter().map(|z| z * c).collect();
            let n = zc.len();
            let ku = 2 + ((n - 3) as f64 * inst.k_frac) as usize;
            let a = gamma_unconditional(&inst.z, ku).unwrap().gamma_hat;
            let b = gamma_unconditional(&zc, ku).unwrap().gamma_hat;
            assert!(close(b, a, 1e-10));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sample_order_does_not_matter(inst in instance_strategy(15), rot in 0usize..15) {
        let w = inst.weights();
        prop_assume!(w.iter().all(|v| v.is_finite()) && w.iter().filter(|&&v| v > 0.0).count() >= 3);
        let n = inst.x.len();
        let r = rot % n;
        let rotate = |v: &Vec<f64>| [&v[r..], &v[..r]].concat();
        let d2 = [&inst.d[r..], &inst.d[..r]].concat();
        let a = CensoredSample::from_columns(&inst.x, &inst.z, &inst.d).unwrap();
        let b = CensoredSample::from_columns(&rotate(&inst.x), &rotate(&inst.z), &d2).unwrap();
        let k = inst.k();
        for v in [TailVariant::Censored, TailVariant::CompleteHazard] {
            let ea = tail_of(&a, &inst).estimate(k, v).map(|e| e.gamma_hat);
            let eb = tail_of(&b, &inst).estimate(k, v).map(|e| e.gamma_hat);
            match (ea, eb) {
                (Ok(x), Ok(y)) => prop_assert!(close(x, y, 1e-12)),
                (Err(x), Err(y)) => prop_assert_eq!(x, y),
                (x, y) => prop_assert!(false, "{:?} vs {:?}", x, y),
            }
        }
    }
}
