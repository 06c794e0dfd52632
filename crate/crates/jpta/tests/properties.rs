//! Randomized invariant checks over the public API.

use std::f64::consts::TAU;

use jpta::array::{ArrayGeometry, BeamGrid};
use jpta::freq::{CarrierConfig, SubbandPlan};
use jpta::metrics::gain_profile;
use jpta::solver::{
    equivalent_precoder, quantize_phases, solve_ls, wrap_phase, DelayPhaseSolution,
    JptaArchitecture,
};
use proptest::prelude::*;

fn small_geometry() -> ArrayGeometry {
    ArrayGeometry::new(2, 4, 0.5).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wrap_phase_stays_in_range(x in -1e6f64..1e6) {
        let y = wrap_phase(x);
        prop_assert!((0.0..TAU).contains(&y));
        // Wrapping is periodic and idempotent.
        prop_assert!((wrap_phase(x + TAU) - y).abs() < 1e-9);
        prop_assert_eq!(wrap_phase(y), y);
    }

    #[test]
    fn equivalent_precoder_has_unit_modulus(
        taus in prop::collection::vec(0.0f64..10e-9, 8),
        phis in prop::collection::vec(0.0f64..TAU, 8),
        f_hz in -200e6f64..200e6,
    ) {
        let geometry = small_geometry();
        let solution = DelayPhaseSolution {
            taus,
            phis,
            architecture: JptaArchitecture::ThreeD,
            phase_bits: None,
        };
        let p = equivalent_precoder(&solution, &geometry, f_hz).unwrap();
        for entry in p {
            prop_assert!((entry.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn subband_partition_is_exhaustive_and_disjoint(
        n_sc in 16usize..400,
        n_beams in 1usize..=4,
    ) {
        let config = CarrierConfig::new(120e3, n_sc, 4, 2).unwrap();
        let beams: Vec<usize> = (0..n_beams).collect();
        let plan = SubbandPlan::equal_split(&config, &beams).unwrap();
        let mut seen = vec![0usize; plan.n_subbands()];
        for k in 0..n_sc {
            let sb = plan.subband_of(k).unwrap();
            prop_assert!(plan.range(sb).contains(&k));
            seen[sb] += 1;
        }
        prop_assert_eq!(seen.iter().sum::<usize>(), n_sc);
        // The design grid pins both edges of every subband.
        let design = plan.design_grid(&config).unwrap();
        for sb in 0..plan.n_subbands() {
            let range = plan.range(sb);
            prop_assert!(design.iter().any(|p| p.subband == sb && p.sc == range.start));
            prop_assert!(design.iter().any(|p| p.subband == sb && p.sc == range.end - 1));
        }
    }

    #[test]
    fn quantizer_snaps_to_grid_and_is_idempotent(
        phis in prop::collection::vec(-20.0f64..20.0, 8),
        bits in 1u8..=8,
    ) {
        let solution = DelayPhaseSolution {
            taus: vec![0.0; 8],
            phis,
            architecture: JptaArchitecture::ThreeD,
            phase_bits: None,
        };
        let step = TAU / f64::from(1u32 << bits) as f64;
        let q = quantize_phases(&solution, bits).unwrap();
        prop_assert_eq!(q.phase_bits, Some(bits));
        for (&orig, &snapped) in solution.phis.iter().zip(&q.phis) {
            let k = snapped / step;
            prop_assert!((k - k.round()).abs() < 1e-9);
            // Within half a step of the input, modulo a full turn.
            let mut err = (wrap_phase(orig) - snapped).abs();
            err = err.min(TAU - err);
            prop_assert!(err <= step / 2.0 + 1e-12);
        }
        let qq = quantize_phases(&q, bits).unwrap();
        prop_assert_eq!(&qq.phis, &q.phis);
    }

    #[test]
    fn gains_ignore_common_delay_and_common_phase(
        beam_a in 0usize..126,
        beam_b in 0usize..126,
        delay_shift in 0.0f64..5e-9,
        phase_shift in 0.0f64..TAU,
    ) {
        let geometry = small_geometry();
        let grid = BeamGrid::default();
        let config = CarrierConfig::new(120e3, 64, 16, 16).unwrap();
        let plan = SubbandPlan::equal_split(&config, &[beam_a, beam_b]).unwrap();
        let base = solve_ls(&plan, &grid, &geometry, JptaArchitecture::ThreeD, &config).unwrap();
        let reference = gain_profile(&base, &plan, &grid, &geometry, &config).unwrap();

        let mut shifted = base.clone();
        for t in &mut shifted.taus {
            *t += delay_shift;
        }
        for p in &mut shifted.phis {
            *p = wrap_phase(*p + phase_shift);
        }
        let moved = gain_profile(&shifted, &plan, &grid, &geometry, &config).unwrap();
        for (a, b) in reference.gains_db.iter().zip(&moved.gains_db) {
            prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }
}
