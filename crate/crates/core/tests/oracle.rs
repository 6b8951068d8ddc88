mod common;

use common::*;
use weibtail::tail::{weissman_from_estimate, ConditionalTail};
use weibtail::{gamma_unconditional, Bandwidth, CensoredSample, HazardVariant, KernelSpec, TailVariant};

pub fn library_tail(inst: &Instance) -> ConditionalTail {
    let sample = CensoredSample::from_columns(&inst.x, &inst.z, &inst.d).unwrap();
    let h = Bandwidth::new(inst.h).unwrap();
    let kernel: KernelSpec = inst.kernel.parse().unwrap();
    let hv = if inst.nelson_aalen { HazardVariant::NelsonAalen } else { HazardVariant::NegLogKm };
    ConditionalTail::new(&sample, inst.at, h, kernel, hv).unwrap()
}

const TOL: f64 = 1e-12;
const P: f64 = 0.05;

#[test]
fn conditional_estimators_match_brute_force() {
    let mut checked = 0;
    for inst in instances(200, 20, 1) {
        let w = inst.weights();
        let k = inst.k();
        let tail = library_tail(&inst);
        let cases = [
            (TailVariant::Censored, gamma_hazard(&inst.z, &inst.d, &w, k, inst.nelson_aalen, false)),
            (TailVariant::CompleteHazard, gamma_hazard(&inst.z, &inst.d, &w, k, inst.nelson_aalen, true)),
        ];
        for (variant, oracle) in cases {
            let lib = tail.estimate(k, variant);
            match (lib, oracle) {
                (Ok(e), Some(o)) => {
                    assert!(close(e.gamma_hat, o.gamma, TOL), "{variant}: {} vs {} on {inst:?}", e.gamma_hat, o.gamma);
                    assert_eq!(e.y_n, o.y_n);
                    assert!(close(e.hazard_at_threshold.unwrap(), o.lambda_y, TOL));
                    let q = weissman_from_estimate(P, &e).unwrap().q_hat;
                    assert!(close(q, weissman(P, &o), TOL), "{variant} quantile on {inst:?}");
                    checked += 1;
                }
                (Err(_), None) => {}
                (l, o) => panic!("{variant}: library {l:?} but oracle defined = {} on {inst:?}", o.is_some()),
            }
        }
        // the rank-based variant has no hazard dependence in gamma
        match (tail.estimate(k, TailVariant::CompleteLiteral), gamma_literal(&inst.z, &w, k)) {
            (Ok(e), Some(o)) => {
                assert!(close(e.gamma_hat, o.gamma, TOL), "literal: {} vs {} on {inst:?}", e.gamma_hat, o.gamma);
                checked += 1;
            }
            (Err(_), None) => {}
            (l, o) => panic!("literal: library {l:?} but oracle defined = {}", o.is_some()),
        }
    }
    assert!(checked > 400, "only {checked} successful comparisons");
}

#[test]
fn unconditional_matches_brute_force() {
    for inst in instances(200, 20, 2) {
        let n = inst.z.len();
        let k = 2 + ((n - 3) as f64 * inst.k_frac) as usize;
        let e = gamma_unconditional(&inst.z, k).unwrap();
        assert!(close(e.gamma_hat, gamma_uncond(&inst.z, k), TOL));
    }
}

#[test]
fn hazard_curves_match_brute_force() {
    use weibtail::survival::cum_hazard_with_weights;
    for inst in instances(200, 20, 3) {
        let w = inst.weights();
        let sample = CensoredSample::from_columns(&inst.x, &inst.z, &inst.d).unwrap();
        for (na, hv) in [(true, HazardVariant::NelsonAalen), (false, HazardVariant::NegLogKm)] {
            let curve = cum_hazard_with_weights(&sample, &w, hv);
            for &y in inst.z.iter().chain([0.001, 100.0].iter()) {
                let (a, b) = (curve.eval(y), hazard(&inst.z, &inst.d, &w, y, na));
                assert!(a == b || close(a, b, TOL), "{hv:?} at {y}: {a} vs {b}");
            }
        }
    }
}
