//! Compute-brick model: statistical instruction generation, in-order issue
//! with dependency and branch stalls, ALU pools, and the cache cascade.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::kernel::{
    Frontend, InstructionKind, InstructionToken, IssuePort, MemTarget, Offer, QueueModuleSpec, RouteId, SimRng,
    TokenId,
};
use crate::workload::WorkloadProfile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ComputeBrickSpec {
    pub issue_width: usize,
    pub int_alu_count: usize,
    pub fp_alu_count: usize,
    pub int_alu_serv_time: u64,
    pub fp_alu_serv_time: u64,
    /// Waiting slots in front of each ALU pool.
    pub alu_queue_capacity: usize,
    /// Cycles issue stays blocked after a mispredicted branch executes.
    pub branch_flush_penalty: u64,
    /// L1, L2, L3 in that order.
    pub cache_levels: Vec<QueueModuleSpec>,
    pub local_memory: QueueModuleSpec,
}

impl Default for ComputeBrickSpec {
    fn default() -> Self {
        ComputeBrickSpec {
            issue_width: 4,
            int_alu_count: 3,
            fp_alu_count: 2,
            int_alu_serv_time: 1,
            fp_alu_serv_time: 2,
            alu_queue_capacity: 8,
            branch_flush_penalty: 5,
            cache_levels: vec![
                QueueModuleSpec::new("l1", 16, 1, 3),
                QueueModuleSpec::new("l2", 16, 2, 10),
                QueueModuleSpec::new("l3", 16, 4, 26),
            ],
            // ~60 ns at 2.3 GHz
            local_memory: QueueModuleSpec::new("local_mem", 32, 8, 130),
        }
    }
}

impl ComputeBrickSpec {
    pub fn validate(&self) -> Result<()> {
        if self.issue_width < 1 {
            return Err(SimError::config("issue_width must be >= 1"));
        }
        if self.int_alu_count < 1 || self.fp_alu_count < 1 {
            return Err(SimError::config("ALU counts must be >= 1"));
        }
        if self.int_alu_serv_time < 1 || self.fp_alu_serv_time < 1 {
            return Err(SimError::config("ALU service times must be >= 1"));
        }
        if self.alu_queue_capacity < 1 {
            return Err(SimError::config("alu_queue_capacity must be >= 1"));
        }
        if self.cache_levels.len() != 3 {
            return Err(SimError::config(format!(
                "expected 3 cache levels (L1, L2, L3), got {}",
                self.cache_levels.len()
            )));
        }
        for level in self.cache_levels.iter().chain(std::iter::once(&self.local_memory)) {
            level.validate()?;
        }
        let latencies: Vec<u64> = self.cache_levels.iter().map(QueueModuleSpec::uncontended_latency).collect();
        if latencies.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SimError::config(
                "cache levels must have strictly increasing serv_time + delay",
            ));
        }
        Ok(())
    }

    pub fn int_alu_module(&self) -> QueueModuleSpec {
        QueueModuleSpec::new("int_alu", self.alu_queue_capacity, self.int_alu_serv_time, 0)
            .with_servers(self.int_alu_count)
    }

    pub fn fp_alu_module(&self) -> QueueModuleSpec {
        QueueModuleSpec::new("fp_alu", self.alu_queue_capacity, self.fp_alu_serv_time, 0)
            .with_servers(self.fp_alu_count)
    }
}

/// Samples where a memory instruction is served. Always draws four
/// uniforms so the random stream does not depend on the outcome.
pub fn resolve_mem_target(profile: &WorkloadProfile, rng: &mut SimRng) -> MemTarget {
    let draws: [f64; 4] = rng.random();
    if draws[0] < profile.p_l1 {
        MemTarget::L1
    } else if draws[1] < profile.p_l2 {
        MemTarget::L2
    } else if draws[2] < profile.p_l3 {
        MemTarget::L3
    } else if draws[3] < profile.remote_fraction {
        MemTarget::RemoteMem
    } else {
        MemTarget::LocalMem
    }
}

/// Route for each (kind, target) a token can carry.
#[derive(Debug, Clone, Default)]
pub struct RouteTable {
    routes: HashMap<(InstructionKind, MemTarget), RouteId>,
}

impl RouteTable {
    pub fn insert(&mut self, kind: InstructionKind, target: MemTarget, route: RouteId) {
        self.routes.insert((kind, target), route);
    }

    pub fn get(&self, kind: InstructionKind, target: MemTarget) -> Option<RouteId> {
        self.routes.get(&(kind, target)).copied()
    }
}

/// Turns a profile into a stream of tokens with sequential ids.
///
/// Every token consumes the same number of draws (kind, dependency,
/// dependency slot, mispredict, four cache draws), so two profiles that
/// differ only in probabilities produce coupled streams from one seed.
#[derive(Debug, Clone, Default)]
pub struct InstructionGenerator {
    next_id: TokenId,
}

impl InstructionGenerator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn generated(&self) -> u64 {
        self.next_id
    }

    pub fn generate(
        &mut self,
        profile: &WorkloadProfile,
        rng: &mut SimRng,
        routes: &RouteTable,
    ) -> Result<InstructionToken> {
        let id = self.next_id;
        let kind = profile.mix.sample(rng.random::<f64>());
        let dep_draw: f64 = rng.random();
        let slot_draw: f64 = rng.random();
        let miss_draw: f64 = rng.random();
        let target = resolve_mem_target(profile, rng);
        let mem_target = if kind.is_memory() { target } else { MemTarget::None };

        let mut deps = Vec::new();
        if id > 0 && dep_draw < profile.dep_prob {
            let window = (profile.dep_window as u64).min(id);
            let back = ((slot_draw * window as f64) as u64).min(window - 1);
            deps.push(id - 1 - back);
        }
        let route = routes.get(kind, mem_target).ok_or_else(|| {
            SimError::config(format!("no route for {kind:?} targeting {mem_target:?}"))
        })?;
        let mut token = InstructionToken::new(id, kind, mem_target, route).with_deps(deps);
        token.mispredict = kind == InstructionKind::Branch && miss_draw < profile.branch_miss_prob;
        self.next_id += 1;
        Ok(token)
    }
}

/// Stall accounting for the issue stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssueStats {
    pub issued: u64,
    pub mispredicts: u64,
    pub dependency_stalls: u64,
    pub branch_stall_cycles: u64,
    pub structural_stalls: u64,
}

/// In-order issue stage of the compute brick.
///
/// Up to `issue_width` tokens issue per cycle, oldest first. A token whose
/// dependency has not retired stalls itself and everything younger. A
/// mispredicted branch blocks issue until it executes and then for
/// `branch_flush_penalty` more cycles.
#[derive(Debug, Clone)]
pub struct CoreFrontend {
    profile: WorkloadProfile,
    issue_width: usize,
    flush_penalty: u64,
    routes: RouteTable,
    generator: InstructionGenerator,
    next: Option<InstructionToken>,
    unresolved_branch: Option<TokenId>,
    blocked_until: u64,
    stats: IssueStats,
}

impl CoreFrontend {
    pub fn new(profile: WorkloadProfile, brick: &ComputeBrickSpec, routes: RouteTable) -> Self {
        CoreFrontend {
            profile,
            issue_width: brick.issue_width,
            flush_penalty: brick.branch_flush_penalty,
            routes,
            generator: InstructionGenerator::new(),
            next: None,
            unresolved_branch: None,
            blocked_until: 0,
            stats: IssueStats::default(),
        }
    }

    pub fn stats(&self) -> IssueStats {
        self.stats
    }

    pub fn profile(&self) -> &WorkloadProfile {
        &self.profile
    }
}

impl Frontend for CoreFrontend {
    fn issue(&mut self, port: &mut IssuePort<'_>) -> Result<()> {
        if self.unresolved_branch.is_some() || port.cycle() < self.blocked_until {
            self.stats.branch_stall_cycles += 1;
            return Ok(());
        }
        for _ in 0..self.issue_width {
            let token = match self.next.take() {
                Some(t) => t,
                None if port.can_inject() => self.generator.generate(&self.profile, port.rng(), &self.routes)?,
                None => break,
            };
            if token.deps.iter().any(|&d| !port.is_retired(d)) {
                self.stats.dependency_stalls += 1;
                self.next = Some(token);
                break;
            }
            let flush = token.mispredict.then_some(token.id);
            match port.offer(token)? {
                Offer::Rejected(t) => {
                    self.stats.structural_stalls += 1;
                    self.next = Some(t);
                    break;
                }
                Offer::Accepted => {
                    self.stats.issued += 1;
                    if flush.is_some() {
                        self.stats.mispredicts += 1;
                        self.unresolved_branch = flush;
                        break;
                    }
                }
            }
        }
        Ok(())
    }

    fn on_retire(&mut self, token: &InstructionToken, cycle: u64) {
        if self.unresolved_branch == Some(token.id) {
            self.unresolved_branch = None;
            self.blocked_until = cycle + self.flush_penalty;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workload::InstructionMix;
    use rand::SeedableRng;

    fn routes() -> RouteTable {
        let mut r = RouteTable::default();
        for (i, kind) in InstructionKind::ALL.iter().enumerate() {
            for (j, t) in [
                MemTarget::None,
                MemTarget::L1,
                MemTarget::L2,
                MemTarget::L3,
                MemTarget::LocalMem,
                MemTarget::RemoteMem,
            ]
            .iter()
            .enumerate()
            {
                r.insert(*kind, *t, RouteId(i * 6 + j));
            }
        }
        r
    }

    fn profile(mix: InstructionMix) -> WorkloadProfile {
        WorkloadProfile {
            mix,
            ..WorkloadProfile::alu_only()
        }
    }

    #[test]
    fn degenerate_mix_yields_one_kind() {
        let p = profile(InstructionMix { int_alu: 1.0, ..Default::default() });
        let mut rng = SimRng::seed_from_u64(1);
        let mut g = InstructionGenerator::new();
        for _ in 0..1000 {
            let t = g.generate(&p, &mut rng, &routes()).unwrap();
            assert_eq!(t.kind, InstructionKind::IntAlu);
            assert_eq!(t.mem_target, MemTarget::None);
        }
    }

    #[test]
    fn all_loads_hitting_l1() {
        let mut p = profile(InstructionMix { load: 1.0, ..Default::default() });
        p.p_l1 = 1.0;
        let mut rng = SimRng::seed_from_u64(2);
        let mut g = InstructionGenerator::new();
        for _ in 0..1000 {
            let t = g.generate(&p, &mut rng, &routes()).unwrap();
            assert_eq!((t.kind, t.mem_target), (InstructionKind::Load, MemTarget::L1));
        }
    }

    #[test]
    fn forced_miss_goes_remote() {
        let mut p = WorkloadProfile::alu_only();
        p.p_l1 = 0.0;
        p.p_l2 = 0.0;
        p.p_l3 = 0.0;
        p.remote_fraction = 1.0;
        let mut rng = SimRng::seed_from_u64(3);
        assert!((0..1000).all(|_| resolve_mem_target(&p, &mut rng) == MemTarget::RemoteMem));
        p.p_l1 = 1.0;
        assert!((0..1000).all(|_| resolve_mem_target(&p, &mut rng) == MemTarget::L1));
    }

    #[test]
    fn dependencies_stay_within_window() {
        let mut p = profile(InstructionMix { int_alu: 1.0, ..Default::default() });
        p.dep_prob = 1.0;
        p.dep_window = 3;
        let mut rng = SimRng::seed_from_u64(4);
        let mut g = InstructionGenerator::new();
        let first = g.generate(&p, &mut rng, &routes()).unwrap();
        assert!(first.deps.is_empty());
        for _ in 0..1000 {
            let t = g.generate(&p, &mut rng, &routes()).unwrap();
            assert_eq!(t.deps.len(), 1);
            let d = t.deps[0];
            assert!(d < t.id && t.id - d <= 3, "{} -> {}", t.id, d);
        }
    }

    #[test]
    fn brick_validation() {
        let ok = ComputeBrickSpec::default();
        assert!(ok.validate().is_ok());
        let mut bad = ok.clone();
        bad.cache_levels.swap(0, 1);
        assert!(bad.validate().is_err());
        let mut bad = ok.clone();
        bad.issue_width = 0;
        assert!(bad.validate().is_err());
        let mut bad = ok;
        bad.cache_levels.pop();
        assert!(bad.validate().is_err());
    }
}
