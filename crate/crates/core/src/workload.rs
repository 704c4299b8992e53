//! Workload profiles and baseline calibration.
//!
//! A profile is the statistical summary of an application that drives
//! instruction generation: instruction mix, cache hit probabilities, the
//! share of memory-level misses served remotely, and dependency and branch
//! behaviour. Profiles are strict JSON documents; unknown keys are errors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::kernel::{InstructionKind, StopCondition};
use crate::platform::{simulate, PlatformConfig};

const MIX_TOLERANCE: f64 = 1e-9;

/// Probability of each instruction kind.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InstructionMix {
    pub int_alu: f64,
    pub fp_alu: f64,
    pub branch: f64,
    pub load: f64,
    pub store: f64,
    pub nop: f64,
}

impl InstructionMix {
    pub fn probability(&self, kind: InstructionKind) -> f64 {
        match kind {
            InstructionKind::IntAlu => self.int_alu,
            InstructionKind::FpAlu => self.fp_alu,
            InstructionKind::Branch => self.branch,
            InstructionKind::Load => self.load,
            InstructionKind::Store => self.store,
            InstructionKind::Nop => self.nop,
        }
    }

    pub fn sum(&self) -> f64 {
        InstructionKind::ALL.iter().map(|&k| self.probability(k)).sum()
    }

    /// Inverse-CDF lookup for a uniform draw in [0, 1).
    pub fn sample(&self, u: f64) -> InstructionKind {
        let mut acc = 0.0;
        let mut last = InstructionKind::IntAlu;
        for kind in InstructionKind::ALL {
            let p = self.probability(kind);
            if p <= 0.0 {
                continue;
            }
            acc += p;
            last = kind;
            if u < acc {
                return kind;
            }
        }
        last
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadProfile {
    pub name: String,
    pub mix: InstructionMix,
    pub p_l1: f64,
    pub p_l2: f64,
    pub p_l3: f64,
    /// Probability that an access missing every cache level is served by
    /// remote rather than local memory.
    pub remote_fraction: f64,
    /// Probability that an instruction depends on a recent older one.
    pub dep_prob: f64,
    /// How many of the most recent instructions a dependency may point at.
    pub dep_window: usize,
    pub branch_miss_prob: f64,
}

pub const ALU_ONLY_JSON: &str = include_str!("../profiles/alu-only.json");
pub const FERMIN_LIKE_JSON: &str = include_str!("../profiles/fermin-like.json");

impl WorkloadProfile {
    /// Bundled profile: integer ALU instructions only.
    pub fn alu_only() -> Self {
        load_profile(ALU_ONLY_JSON).expect("bundled profile is valid")
    }

    /// Bundled synthetic stand-in for the network-analytics workload, with
    /// `dep_prob` already calibrated to a baseline IPC of 1.37 on the
    /// default platform.
    pub fn fermin_like() -> Self {
        load_profile(FERMIN_LIKE_JSON).expect("bundled profile is valid")
    }

    pub fn validate(&self) -> Result<()> {
        let sum = self.mix.sum();
        for kind in InstructionKind::ALL {
            let p = self.mix.probability(kind);
            if !(0.0..=1.0).contains(&p) {
                return Err(SimError::config(format!("mix.{kind:?} = {p} is not a probability")));
            }
        }
        if (sum - 1.0).abs() > MIX_TOLERANCE {
            return Err(SimError::MixSum { sum });
        }
        for (key, p) in [
            ("p_l1", self.p_l1),
            ("p_l2", self.p_l2),
            ("p_l3", self.p_l3),
            ("remote_fraction", self.remote_fraction),
            ("dep_prob", self.dep_prob),
            ("branch_miss_prob", self.branch_miss_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(SimError::config(format!("{key} = {p} is not a probability")));
            }
        }
        if self.dep_window < 1 {
            return Err(SimError::config("dep_window must be >= 1"));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("profile serializes");
        s.push('\n');
        s
    }

    /// Copy with every memory-level miss served locally.
    pub fn without_remote(&self) -> Self {
        WorkloadProfile {
            remote_fraction: 0.0,
            ..self.clone()
        }
    }
}

/// Parses and validates a profile document.
pub fn load_profile(text: &str) -> Result<WorkloadProfile> {
    let profile: WorkloadProfile =
        serde_json::from_str(text).map_err(|e| SimError::config(format!("profile: {e}")))?;
    profile.validate()?;
    Ok(profile)
}

/// Result of a baseline calibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationOutcome {
    pub profile: WorkloadProfile,
    pub achieved_ipc: f64,
    /// Bisection midpoints evaluated.
    pub iterations: u32,
    pub converged: bool,
}

/// Seeds and run length used to estimate IPC during calibration.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibrator {
    pub seeds: Vec<u64>,
    pub stop: StopCondition,
}

impl Default for Calibrator {
    fn default() -> Self {
        Calibrator {
            seeds: vec![1, 2, 3, 4, 5],
            stop: StopCondition::default(),
        }
    }
}

impl Calibrator {
    /// Mean non-disaggregated IPC of `profile` over the seed set.
    pub fn baseline_ipc(&self, profile: &WorkloadProfile, platform: &PlatformConfig) -> Result<f64> {
        let local = profile.without_remote();
        let ipcs = self
            .seeds
            .par_iter()
            .map(|&seed| simulate(platform, &local, seed, self.stop).map(|r| r.ipc))
            .collect::<Result<Vec<_>>>()?;
        Ok(ipcs.iter().sum::<f64>() / ipcs.len() as f64)
    }

    /// Tunes `dep_prob` by bisection until the baseline IPC is within `tol`
    /// (relative) of `target`. Only `dep_prob` of the returned profile differs
    /// from the input.
    pub fn calibrate(
        &self,
        profile: &WorkloadProfile,
        platform: &PlatformConfig,
        target: f64,
        tol: f64,
        max_iter: u32,
    ) -> Result<CalibrationOutcome> {
        profile.validate()?;
        platform.validate()?;
        if self.seeds.is_empty() {
            return Err(SimError::config("calibration needs at least one seed"));
        }
        let width = platform.compute.issue_width as f64;
        if !(target > 0.0 && target <= width) {
            return Err(SimError::InfeasibleTarget {
                target,
                min_ipc: 0.0,
                max_ipc: width,
            });
        }
        let within = |ipc: f64| ((ipc - target) / target).abs() <= tol;
        let with_dep = |dep_prob: f64| WorkloadProfile {
            dep_prob,
            ..profile.clone()
        };

        let current = self.baseline_ipc(profile, platform)?;
        if within(current) {
            return Ok(CalibrationOutcome {
                profile: profile.clone(),
                achieved_ipc: current,
                iterations: 0,
                converged: true,
            });
        }

        let max_ipc = self.baseline_ipc(&with_dep(0.0), platform)?;
        let min_ipc = self.baseline_ipc(&with_dep(1.0), platform)?;
        if max_ipc < min_ipc {
            return Err(SimError::config(format!(
                "IPC is not monotone in dep_prob ({max_ipc} at 0, {min_ipc} at 1)"
            )));
        }
        for (dep, ipc) in [(0.0, max_ipc), (1.0, min_ipc)] {
            if within(ipc) {
                return Ok(CalibrationOutcome {
                    profile: with_dep(dep),
                    achieved_ipc: ipc,
                    iterations: 0,
                    converged: true,
                });
            }
        }
        if target > max_ipc || target < min_ipc {
            return Err(SimError::InfeasibleTarget { target, min_ipc, max_ipc });
        }

        // IPC falls as dep_prob rises.
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let mut best = (f64::INFINITY, profile.dep_prob, current);
        for iteration in 1..=max_iter {
            let mid = 0.5 * (lo + hi);
            let ipc = self.baseline_ipc(&with_dep(mid), platform)?;
            let err = ((ipc - target) / target).abs();
            if err < best.0 {
                best = (err, mid, ipc);
            }
            if within(ipc) {
                return Ok(CalibrationOutcome {
                    profile: with_dep(mid),
                    achieved_ipc: ipc,
                    iterations: iteration,
                    converged: true,
                });
            }
            if ipc > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(CalibrationOutcome {
            profile: with_dep(best.1),
            achieved_ipc: best.2,
            iterations: max_iter,
            converged: false,
        })
    }
}

/// [`Calibrator::calibrate`] with the default five seeds and run length.
pub fn calibrate_baseline(
    profile: &WorkloadProfile,
    platform: &PlatformConfig,
    target: f64,
    tol: f64,
    max_iter: u32,
) -> Result<CalibrationOutcome> {
    Calibrator::default().calibrate(profile, platform, target, tol, max_iter)
}
