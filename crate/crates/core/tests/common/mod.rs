use std::collections::VecDeque;

use disagg_sim::kernel::{
    EngineBuilder, Frontend, InstructionKind, InstructionToken, IssuePort, MemTarget, Offer, QueueModuleSpec,
    Recording, RouteId, StopCondition,
};
use disagg_sim::Result;
use rand::{Rng, SeedableRng};

/// Offers tokens every cycle until the first module refuses.
pub struct Flood {
    route: RouteId,
    next_id: u64,
    pending: Option<InstructionToken>,
}

impl Flood {
    pub fn new(route: RouteId) -> Self {
        Flood {
            route,
            next_id: 0,
            pending: None,
        }
    }
}

impl Frontend for Flood {
    fn issue(&mut self, port: &mut IssuePort<'_>) -> Result<()> {
        loop {
            let token = match self.pending.take() {
                Some(t) => t,
                None if port.can_inject() => {
                    self.next_id += 1;
                    InstructionToken::new(self.next_id - 1, InstructionKind::IntAlu, MemTarget::None, self.route)
                }
                None => return Ok(()),
            };
            if let Offer::Rejected(t) = port.offer(token)? {
                self.pending = Some(t);
                return Ok(());
            }
        }
    }
}

/// Random arrivals spread over several routes.
pub struct MultiRoute {
    pub rate: f64,
    pub routes: Vec<RouteId>,
    next_id: u64,
    backlog: VecDeque<InstructionToken>,
}

impl MultiRoute {
    pub fn new(rate: f64, routes: Vec<RouteId>) -> Self {
        MultiRoute {
            rate,
            routes,
            next_id: 0,
            backlog: VecDeque::new(),
        }
    }
}

impl Frontend for MultiRoute {
    fn issue(&mut self, port: &mut IssuePort<'_>) -> Result<()> {
        let arrival = port.rng().random::<f64>() < self.rate;
        let pick = port.rng().random_range(0..self.routes.len());
        if arrival && port.can_inject() {
            self.backlog.push_back(InstructionToken::new(
                self.next_id,
                InstructionKind::Load,
                MemTarget::L1,
                self.routes[pick],
            ));
            self.next_id += 1;
        }
        while let Some(t) = self.backlog.pop_front() {
            if let Offer::Rejected(t) = port.offer(t)? {
                self.backlog.push_front(t);
                break;
            }
        }
        Ok(())
    }
}


/// Runs `configs` random module graphs, `tokens` tokens each, checking
/// conservation after every cycle and that every token retires once.
pub fn conservation_fuzz(seed: u64, configs: usize, tokens: u64) -> std::result::Result<(), String> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for config in 0..configs {
        let mut b = EngineBuilder::new(rng.random::<u64>());
        let mut ids = Vec::new();
        for i in 0..rng.random_range(1..=6usize) {
            let spec = QueueModuleSpec::new(
                format!("m{i}"),
                rng.random_range(1..=8),
                rng.random_range(1..=4),
                rng.random_range(0..=20),
            )
            .with_servers(rng.random_range(1..=3));
            ids.push(b.add_module(spec).map_err(|e| e.to_string())?);
        }
        let mut routes = Vec::new();
        for _ in 0..rng.random_range(1..=4) {
            let hops: Vec<_> = ids.iter().copied().filter(|_| rng.random_bool(0.6)).collect();
            routes.push(b.add_route(&hops).map_err(|e| e.to_string())?);
        }
        let frontend = Recording::new(MultiRoute::new(rng.random_range(0.05..1.0), routes));
        let mut engine = b.build(frontend).map_err(|e| e.to_string())?;
        engine.set_quota(Some(tokens));
        let mut cycles = 0u64;
        while engine.injected() < tokens || engine.in_flight() > 0 {
            engine.step().map_err(|e| format!("config {config}: {e}"))?;
            if engine.injected() != engine.retired() + engine.in_flight() {
                return Err(format!("config {config}: conservation broken at cycle {}", engine.clock()));
            }
            cycles += 1;
            if cycles > 10_000_000 {
                return Err(format!("config {config}: did not drain"));
            }
        }
        let mut retired: Vec<u64> = engine.frontend().retired.iter().map(|t| t.id).collect();
        retired.sort_unstable();
        if retired != (0..tokens).collect::<Vec<_>>() {
            return Err(format!("config {config}: retired ids are not a permutation of injected ids"));
        }
    }
    Ok(())
}

/// Mean occupancy, busy fraction and Little's-law prediction for a lone
/// Bernoulli-fed queue.
pub fn single_queue(rate: f64, serv_time: u64, cycles: u64, seed: u64) -> (f64, f64, f64) {
    let mut b = EngineBuilder::new(seed);
    let q = b.add_module(QueueModuleSpec::new("q", 1024, serv_time, 0)).unwrap();
    let r = b.add_route(&[q]).unwrap();
    let report = b
        .build(disagg_sim::kernel::BernoulliSource::new(rate, r))
        .unwrap()
        .run(StopCondition::MaxCycles(cycles))
        .unwrap();
    let s = &report.per_module["q"];
    (s.mean_occupancy, s.busy_fraction, rate * s.mean_transit(serv_time, 0))
}
