use disagg_sim::kernel::StopCondition;
use disagg_sim::metrics::{format_pct, overhead};
use disagg_sim::platform::PlatformConfig;
use disagg_sim::workload::{load_profile, Calibrator, InstructionMix, WorkloadProfile};
use proptest::prelude::*;

/// (ipc_disagg, printed overhead) at baseline IPC 1.37.
const TABLE: [(f64, f64); 8] = [
    (0.25, 81.75),
    (0.26, 81.02),
    (0.29, 78.83),
    (0.30, 78.10),
    (0.456, 66.72),
    (0.463, 66.20),
    (0.469, 65.77),
    (0.465, 66.06),
];

fn quick_calibrator() -> Calibrator {
    Calibrator {
        seeds: vec![1, 2],
        stop: StopCondition::MaxInstructions(40_000),
    }
}

#[test]
fn overhead_reproduces_printed_table() {
    for (ipc, printed) in TABLE {
        let got = overhead(1.37, ipc).unwrap();
        assert!((got - printed).abs() <= 0.03, "{ipc}: {got} vs {printed}");
    }
    assert_eq!(format_pct(overhead(1.37, 0.25).unwrap()), "81.75");
    assert_eq!(format_pct(overhead(1.37, 0.456).unwrap()), "66.72");
}

#[test]
fn overhead_rejects_bad_inputs() {
    assert!(overhead(0.0, 0.5).is_err());
    assert!(overhead(-1.0, 0.5).is_err());
    assert!(overhead(1.0, -0.1).is_err());
    assert_eq!(overhead(1.37, 1.37).unwrap(), 0.0);
}

#[test]
fn calibrating_to_own_ipc_is_a_no_op() {
    let cal = quick_calibrator();
    let platform = PlatformConfig::default();
    let profile = WorkloadProfile::fermin_like();
    let ipc = cal.baseline_ipc(&profile, &platform).unwrap();
    let out = cal.calibrate(&profile, &platform, ipc, 0.01, 30).unwrap();
    assert_eq!(out.iterations, 0);
    assert_eq!(out.profile, profile);
    assert!(out.converged);
}

#[test]
fn calibration_only_moves_dep_prob() {
    let cal = quick_calibrator();
    let platform = PlatformConfig::default();
    let start = WorkloadProfile {
        dep_prob: 0.9,
        ..WorkloadProfile::fermin_like()
    };
    let out = cal.calibrate(&start, &platform, 1.8, 0.02, 30).unwrap();
    assert!(out.converged);
    assert!(out.iterations >= 1);
    assert!(((out.achieved_ipc - 1.8) / 1.8).abs() <= 0.02);
    let restored = WorkloadProfile {
        dep_prob: start.dep_prob,
        ..out.profile.clone()
    };
    assert_eq!(restored, start);
}

#[test]
fn dependency_probability_lowers_ipc() {
    let cal = quick_calibrator();
    let platform = PlatformConfig::default();
    let mut prev = f64::INFINITY;
    for dep_prob in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let ipc = cal
            .baseline_ipc(&WorkloadProfile { dep_prob, ..WorkloadProfile::fermin_like() }, &platform)
            .unwrap();
        assert!(ipc < prev, "dep_prob {dep_prob}: {ipc} >= {prev}");
        prev = ipc;
    }
}

#[test]
fn bundled_profiles_round_trip() {
    for p in [WorkloadProfile::alu_only(), WorkloadProfile::fermin_like()] {
        let text = p.to_json();
        assert_eq!(load_profile(&text).unwrap(), p);
        assert_eq!(load_profile(&text).unwrap().to_json(), text);
    }
}

fn arb_profile() -> impl Strategy<Value = WorkloadProfile> {
    (
        prop::array::uniform6(0.0f64..1.0),
        prop::array::uniform4(0.0f64..=1.0),
        0.0f64..=1.0,
        1usize..64,
        0.0f64..=1.0,
    )
        .prop_filter("mix needs mass", |(w, ..)| w.iter().sum::<f64>() > 1e-3)
        .prop_map(|(w, cache, dep_prob, dep_window, miss)| {
            let total: f64 = w.iter().sum();
            let mut mix = InstructionMix {
                int_alu: w[0] / total,
                fp_alu: w[1] / total,
                branch: w[2] / total,
                load: w[3] / total,
                store: w[4] / total,
                nop: 0.0,
            };
            mix.nop = (1.0 - (mix.int_alu + mix.fp_alu + mix.branch + mix.load + mix.store)).max(0.0);
            WorkloadProfile {
                name: "arb".into(),
                mix,
                p_l1: cache[0],
                p_l2: cache[1],
                p_l3: cache[2],
                remote_fraction: cache[3],
                dep_prob,
                dep_window,
                branch_miss_prob: miss,
            }
        })
}

proptest! {
    #[test]
    fn any_valid_profile_round_trips(p in arb_profile()) {
        prop_assume!(p.validate().is_ok());
        let text = p.to_json();
        let back = load_profile(&text).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(back.to_json(), text);
    }

    #[test]
    fn overhead_is_antitone(base in 0.01f64..4.0, a in 0.0f64..4.0, b in 0.0f64..4.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(overhead(base, lo).unwrap() >= overhead(base, hi).unwrap());
    }
}
