//! Cycle-driven engine built from queue/server/delay modules.
//!
//! A [`QueueModule`] is a bounded FIFO in front of `server_count` identical
//! servers, followed by a latency-only delay line. A token accepted at cycle
//! `a` that starts service at `s >= a` completes at `s + serv_time` and is
//! delivered downstream at `s + serv_time + delay`. The delay line holds no
//! queue or server slot, so it adds latency without reducing throughput.
//!
//! Within a cycle the engine ticks modules downstream first (highest module
//! index first). Routes must visit strictly increasing module indices, so
//! when a module delivers a token to its successor that successor has
//! already been ticked for the cycle. The successor starts that token's
//! service on its next tick, backdated to the acceptance cycle, which makes
//! the uncontended transit through a chain exactly `sum(serv_time + delay)`.
//!
//! Randomness comes from a single [`SimRng`] (ChaCha8) per engine seeded
//! with `seed_from_u64`, so a `(config, seed)` pair reproduces bit-identical
//! runs on every platform.

use std::collections::{HashSet, VecDeque};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::metrics::SimReport;

/// The engine's random number generator.
pub type SimRng = ChaCha8Rng;

pub type TokenId = u64;

/// Default number of cycles without a retirement before a run is declared deadlocked.
pub const DEFAULT_DEADLOCK_WINDOW: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstructionKind {
    IntAlu,
    FpAlu,
    Branch,
    Load,
    Store,
    Nop,
}

impl InstructionKind {
    pub const ALL: [InstructionKind; 6] = [
        InstructionKind::IntAlu,
        InstructionKind::FpAlu,
        InstructionKind::Branch,
        InstructionKind::Load,
        InstructionKind::Store,
        InstructionKind::Nop,
    ];

    pub fn is_memory(self) -> bool {
        matches!(self, InstructionKind::Load | InstructionKind::Store)
    }
}

/// Where a memory instruction is finally served.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemTarget {
    None,
    L1,
    L2,
    L3,
    LocalMem,
    RemoteMem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModuleId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RouteId(pub usize);

/// One in-flight instruction (a message in queue-model terms).
#[derive(Debug, Clone, PartialEq)]
pub struct InstructionToken {
    pub id: TokenId,
    pub kind: InstructionKind,
    pub mem_target: MemTarget,
    /// Older tokens that must retire before this one may issue.
    pub deps: Vec<TokenId>,
    /// Sampled at generation; only meaningful for branches.
    pub mispredict: bool,
    pub route: RouteId,
    pub inject_cycle: u64,
    pub retire_cycle: Option<u64>,
    pub accumulated_latency: u64,
    hop: usize,
    entered_at: u64,
}

impl InstructionToken {
    pub fn new(id: TokenId, kind: InstructionKind, mem_target: MemTarget, route: RouteId) -> Self {
        InstructionToken {
            id,
            kind,
            mem_target,
            deps: Vec::new(),
            mispredict: false,
            route,
            inject_cycle: 0,
            retire_cycle: None,
            accumulated_latency: 0,
            hop: 0,
            entered_at: 0,
        }
    }

    pub fn with_deps(mut self, deps: Vec<TokenId>) -> Self {
        self.deps = deps;
        self
    }
}

/// Static description of a queue + server + delay module.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueueModuleSpec {
    pub name: String,
    /// Waiting slots in front of the servers.
    pub capacity: usize,
    /// Cycles a server is occupied per token (the pipelining interval).
    pub serv_time: u64,
    /// Extra latency after service; occupies no slot.
    #[serde(default)]
    pub delay: u64,
    #[serde(default = "one")]
    pub server_count: usize,
}

fn one() -> usize {
    1
}

impl QueueModuleSpec {
    pub fn new(name: impl Into<String>, capacity: usize, serv_time: u64, delay: u64) -> Self {
        QueueModuleSpec {
            name: name.into(),
            capacity,
            serv_time,
            delay,
            server_count: 1,
        }
    }

    pub fn with_servers(mut self, server_count: usize) -> Self {
        self.server_count = server_count;
        self
    }

    /// Latency of one token through an idle module.
    pub fn uncontended_latency(&self) -> u64 {
        self.serv_time + self.delay
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(SimError::config("module name must not be empty"));
        }
        if self.capacity < 1 {
            return Err(SimError::config(format!("module `{}`: capacity must be >= 1", self.name)));
        }
        if self.serv_time < 1 {
            return Err(SimError::config(format!("module `{}`: serv_time must be >= 1", self.name)));
        }
        if self.server_count < 1 {
            return Err(SimError::config(format!(
                "module `{}`: server_count must be >= 1",
                self.name
            )));
        }
        Ok(())
    }
}

/// Result of offering a token to a module. A rejected token is handed back
/// to the caller, who retries on a later cycle.
#[derive(Debug)]
pub enum Offer {
    Accepted,
    Rejected(InstructionToken),
}

impl Offer {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Offer::Accepted)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct ModuleCounters {
    pub accepted: u64,
    pub rejected: u64,
    pub started: u64,
    pub total_wait: u64,
    pub busy_cycles: u64,
    pub occupancy_sum: u64,
    pub max_occupancy: usize,
    pub samples: u64,
}

#[derive(Debug)]
struct Server {
    busy: Option<InService>,
    free_at: u64,
}

#[derive(Debug)]
struct InService {
    token: InstructionToken,
    done_at: u64,
    seq: u64,
}

/// Runtime state of one module.
#[derive(Debug)]
pub struct QueueModule {
    spec: QueueModuleSpec,
    waiting: VecDeque<InstructionToken>,
    servers: Vec<Server>,
    busy_count: usize,
    next_seq: u64,
    delay_line: VecDeque<(InstructionToken, u64)>,
    outbox: VecDeque<InstructionToken>,
    completed_scratch: Vec<InService>,
    pub(crate) counters: ModuleCounters,
}

impl QueueModule {
    pub fn new(spec: QueueModuleSpec) -> Result<Self> {
        spec.validate()?;
        let servers = (0..spec.server_count)
            .map(|_| Server {
                busy: None,
                free_at: 0,
            })
            .collect();
        Ok(QueueModule {
            waiting: VecDeque::with_capacity(spec.capacity),
            servers,
            busy_count: 0,
            next_seq: 0,
            delay_line: VecDeque::new(),
            outbox: VecDeque::new(),
            completed_scratch: Vec::new(),
            counters: ModuleCounters::default(),
            spec,
        })
    }

    pub fn spec(&self) -> &QueueModuleSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn waiting_len(&self) -> usize {
        self.waiting.len()
    }

    pub fn in_service_len(&self) -> usize {
        self.busy_count
    }

    /// Tokens resident anywhere in the module: queue, servers, delay line,
    /// and delivered-but-blocked output.
    pub fn occupancy(&self) -> usize {
        self.waiting.len() + self.busy_count + self.delay_line.len() + self.outbox.len()
    }

    pub fn accepted(&self) -> u64 {
        self.counters.accepted
    }

    pub fn rejected(&self) -> u64 {
        self.counters.rejected
    }

    /// Appends `token` to the queue tail when a slot is free.
    pub fn offer(&mut self, mut token: InstructionToken, cycle: u64) -> Offer {
        if self.waiting.len() < self.spec.capacity {
            token.entered_at = cycle;
            self.waiting.push_back(token);
            self.counters.accepted += 1;
            Offer::Accepted
        } else {
            self.counters.rejected += 1;
            Offer::Rejected(token)
        }
    }

    /// Advances the module to `cycle` and returns the tokens delivered
    /// downstream this cycle, in acceptance order.
    pub fn tick(&mut self, cycle: u64) -> Vec<InstructionToken> {
        self.advance(cycle);
        self.outbox.drain(..).collect()
    }

    /// Like [`tick`](Self::tick) but leaves delivered tokens in the outbox.
    pub(crate) fn advance(&mut self, cycle: u64) {
        if self.waiting.is_empty() && self.busy_count == 0 && self.delay_line.is_empty() {
            return;
        }
        loop {
            self.complete(cycle);
            if !self.start_waiting(cycle) {
                break;
            }
        }
        while let Some((_, at)) = self.delay_line.front() {
            if *at > cycle {
                break;
            }
            let (token, _) = self.delay_line.pop_front().expect("front checked");
            self.outbox.push_back(token);
        }
    }

    fn complete(&mut self, cycle: u64) {
        if self.busy_count == 0 {
            return;
        }
        for server in &mut self.servers {
            if server.busy.as_ref().is_some_and(|s| s.done_at <= cycle) {
                let done = server.busy.take().expect("busy checked");
                server.free_at = done.done_at;
                self.completed_scratch.push(done);
            }
        }
        if self.completed_scratch.is_empty() {
            return;
        }
        self.busy_count -= self.completed_scratch.len();
        self.completed_scratch.sort_unstable_by_key(|s| s.seq);
        let delay = self.spec.delay;
        for done in self.completed_scratch.drain(..) {
            self.delay_line.push_back((done.token, done.done_at + delay));
        }
    }

    /// Starts queued tokens on idle servers. Returns true when some started
    /// token already finished by `cycle`, so another completion pass is due.
    fn start_waiting(&mut self, cycle: u64) -> bool {
        let mut finished_early = false;
        while !self.waiting.is_empty() && self.busy_count < self.servers.len() {
            let server = self
                .servers
                .iter_mut()
                .filter(|s| s.busy.is_none())
                .min_by_key(|s| s.free_at)
                .expect("an idle server exists");
            let token = self.waiting.pop_front().expect("non-empty");
            let start = token.entered_at.max(server.free_at);
            let done_at = start + self.spec.serv_time;
            self.counters.started += 1;
            self.counters.total_wait += start - token.entered_at;
            self.counters.busy_cycles += self.spec.serv_time;
            server.busy = Some(InService {
                token,
                done_at,
                seq: self.next_seq,
            });
            self.next_seq += 1;
            self.busy_count += 1;
            finished_early |= done_at <= cycle;
        }
        finished_early
    }

    pub(crate) fn sample(&mut self) {
        let occ = self.occupancy();
        self.counters.occupancy_sum += occ as u64;
        self.counters.max_occupancy = self.counters.max_occupancy.max(occ);
        self.counters.samples += 1;
    }

    /// Cycle at which the oldest resident token entered service or the queue.
    fn oldest_resident(&self) -> Option<u64> {
        let queued = self.waiting.front().map(|t| t.entered_at);
        let serving = self
            .servers
            .iter()
            .filter_map(|s| s.busy.as_ref().map(|b| b.token.entered_at))
            .min();
        let blocked = self.outbox.front().map(|t| t.entered_at);
        [queued, serving, blocked].into_iter().flatten().min()
    }
}

/// When a run stops accepting new instructions. In-flight work always drains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopCondition {
    MaxInstructions(u64),
    MaxCycles(u64),
}

impl Default for StopCondition {
    fn default() -> Self {
        StopCondition::MaxInstructions(1_000_000)
    }
}

/// Instruction supply feeding the module graph.
pub trait Frontend {
    /// Called once per cycle, after every module has ticked.
    fn issue(&mut self, port: &mut IssuePort<'_>) -> Result<()>;

    /// Called when a token leaves its last module.
    fn on_retire(&mut self, _token: &InstructionToken, _cycle: u64) {}
}

/// The frontend's view of the engine during [`Frontend::issue`].
pub struct IssuePort<'a> {
    cycle: u64,
    rng: &'a mut SimRng,
    modules: &'a mut [QueueModule],
    routes: &'a [Vec<ModuleId>],
    in_flight: &'a mut HashSet<TokenId>,
    injected: &'a mut u64,
    quota: Option<u64>,
    open: bool,
    last_id: &'a mut Option<TokenId>,
    immediate: &'a mut Vec<InstructionToken>,
}

impl IssuePort<'_> {
    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    pub fn rng(&mut self) -> &mut SimRng {
        self.rng
    }

    /// Whether the stop condition still admits new instructions.
    pub fn can_inject(&self) -> bool {
        self.open && self.quota.is_none_or(|q| *self.injected < q)
    }

    /// True once `id` was injected and has since retired.
    pub fn is_retired(&self, id: TokenId) -> bool {
        self.last_id.is_some_and(|last| id <= last) && !self.in_flight.contains(&id)
    }

    /// Injects `token` into the first module of its route. Tokens with an
    /// empty route retire in the same cycle.
    pub fn offer(&mut self, mut token: InstructionToken) -> Result<Offer> {
        if !self.can_inject() {
            return Ok(Offer::Rejected(token));
        }
        if self.last_id.is_some_and(|last| token.id <= last) {
            return Err(SimError::Internal {
                cycle: self.cycle,
                detail: format!("token id {} injected out of order", token.id),
            });
        }
        if token.deps.iter().any(|&d| d >= token.id) {
            return Err(SimError::Internal {
                cycle: self.cycle,
                detail: format!("token {} depends on a younger token", token.id),
            });
        }
        let route = self.routes.get(token.route.0).ok_or_else(|| SimError::Internal {
            cycle: self.cycle,
            detail: format!("unknown route {}", token.route.0),
        })?;
        token.inject_cycle = self.cycle;
        token.hop = 0;
        let id = token.id;
        match route.first() {
            None => self.immediate.push(token),
            Some(first) => {
                if let Offer::Rejected(t) = self.modules[first.0].offer(token, self.cycle) {
                    return Ok(Offer::Rejected(t));
                }
            }
        }
        self.in_flight.insert(id);
        *self.injected += 1;
        *self.last_id = Some(id);
        Ok(Offer::Accepted)
    }
}

/// Assembles modules and routes into an [`Engine`].
#[derive(Debug, Clone)]
pub struct EngineBuilder {
    modules: Vec<QueueModuleSpec>,
    routes: Vec<Vec<ModuleId>>,
    seed: u64,
    deadlock_window: u64,
    fingerprint: Option<String>,
}

impl EngineBuilder {
    pub fn new(seed: u64) -> Self {
        EngineBuilder {
            modules: Vec::new(),
            routes: Vec::new(),
            seed,
            deadlock_window: DEFAULT_DEADLOCK_WINDOW,
            fingerprint: None,
        }
    }

    /// Adds a module. Modules must be added upstream before downstream.
    pub fn add_module(&mut self, spec: QueueModuleSpec) -> Result<ModuleId> {
        spec.validate()?;
        if self.modules.iter().any(|m| m.name == spec.name) {
            return Err(SimError::config(format!("duplicate module name `{}`", spec.name)));
        }
        self.modules.push(spec);
        Ok(ModuleId(self.modules.len() - 1))
    }

    /// Registers a path through the module graph. Module indices must be
    /// strictly increasing, which keeps the graph acyclic.
    pub fn add_route(&mut self, hops: &[ModuleId]) -> Result<RouteId> {
        if let Some(bad) = hops.iter().find(|m| m.0 >= self.modules.len()) {
            return Err(SimError::config(format!("route references unknown module {}", bad.0)));
        }
        if hops.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SimError::config("route must visit modules in strictly increasing order"));
        }
        self.routes.push(hops.to_vec());
        Ok(RouteId(self.routes.len() - 1))
    }

    pub fn deadlock_window(mut self, cycles: u64) -> Self {
        self.deadlock_window = cycles;
        self
    }

    /// Sets the configuration fingerprint recorded in reports. Defaults to a
    /// hash of the module specs and routes.
    pub fn fingerprint(mut self, fingerprint: String) -> Self {
        self.fingerprint = Some(fingerprint);
        self
    }

    pub fn module_specs(&self) -> &[QueueModuleSpec] {
        &self.modules
    }

    pub fn build<F: Frontend>(self, frontend: F) -> Result<Engine<F>> {
        if self.deadlock_window == 0 {
            return Err(SimError::config("deadlock window must be positive"));
        }
        let fingerprint = match self.fingerprint {
            Some(f) => f,
            None => {
                let routes: Vec<Vec<usize>> = self
                    .routes
                    .iter()
                    .map(|r| r.iter().map(|m| m.0).collect())
                    .collect();
                crate::metrics::fingerprint(&(&self.modules, &routes))
            }
        };
        let modules = self
            .modules
            .into_iter()
            .map(QueueModule::new)
            .collect::<Result<Vec<_>>>()?;
        Ok(Engine {
            clock: 0,
            modules,
            routes: self.routes,
            frontend,
            rng: SimRng::seed_from_u64(self.seed),
            seed: self.seed,
            injected: 0,
            retired: 0,
            in_flight: HashSet::new(),
            last_id: None,
            quota: None,
            open: true,
            last_retire_cycle: 0,
            deadlock_window: self.deadlock_window,
            fingerprint,
            immediate: Vec::new(),
        })
    }
}

/// A cycle-driven simulation: module graph, frontend, counters, and RNG.
pub struct Engine<F> {
    clock: u64,
    modules: Vec<QueueModule>,
    routes: Vec<Vec<ModuleId>>,
    frontend: F,
    rng: SimRng,
    seed: u64,
    injected: u64,
    retired: u64,
    in_flight: HashSet<TokenId>,
    last_id: Option<TokenId>,
    quota: Option<u64>,
    open: bool,
    last_retire_cycle: u64,
    deadlock_window: u64,
    fingerprint: String,
    immediate: Vec<InstructionToken>,
}

impl<F: Frontend> Engine<F> {
    pub fn clock(&self) -> u64 {
        self.clock
    }

    pub fn injected(&self) -> u64 {
        self.injected
    }

    pub fn retired(&self) -> u64 {
        self.retired
    }

    pub fn in_flight(&self) -> u64 {
        self.in_flight.len() as u64
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn modules(&self) -> &[QueueModule] {
        &self.modules
    }

    pub fn module(&self, name: &str) -> Option<&QueueModule> {
        self.modules.iter().find(|m| m.name() == name)
    }

    pub fn frontend(&self) -> &F {
        &self.frontend
    }

    pub fn frontend_mut(&mut self) -> &mut F {
        &mut self.frontend
    }

    /// Stops (or resumes) admission of new instructions.
    pub fn set_injection_open(&mut self, open: bool) {
        self.open = open;
    }

    /// Caps the total number of injected instructions.
    pub fn set_quota(&mut self, quota: Option<u64>) {
        self.quota = quota;
    }

    /// Advances the whole engine by one cycle.
    pub fn step(&mut self) -> Result<()> {
        let cycle = self.clock;
        for m in (0..self.modules.len()).rev() {
            self.modules[m].advance(cycle);
            self.route_outbox(m, cycle)?;
        }

        let mut port = IssuePort {
            cycle,
            rng: &mut self.rng,
            modules: &mut self.modules,
            routes: &self.routes,
            in_flight: &mut self.in_flight,
            injected: &mut self.injected,
            quota: self.quota,
            open: self.open,
            last_id: &mut self.last_id,
            immediate: &mut self.immediate,
        };
        self.frontend.issue(&mut port)?;
        let mut immediate = std::mem::take(&mut self.immediate);
        for token in immediate.drain(..) {
            self.retire(token, cycle)?;
        }
        self.immediate = immediate;

        let mut resident = 0usize;
        for m in &mut self.modules {
            m.sample();
            resident += m.occupancy();
        }
        if self.injected != self.retired + self.in_flight.len() as u64 || resident != self.in_flight.len() {
            return Err(SimError::Internal {
                cycle,
                detail: format!(
                    "conservation violated: injected {}, retired {}, in flight {}, resident {}",
                    self.injected,
                    self.retired,
                    self.in_flight.len(),
                    resident
                ),
            });
        }
        self.clock += 1;
        Ok(())
    }

    fn route_outbox(&mut self, m: usize, cycle: u64) -> Result<()> {
        while let Some(mut token) = self.modules[m].outbox.pop_front() {
            let route = &self.routes[token.route.0];
            token.hop += 1;
            match route.get(token.hop) {
                None => self.retire(token, cycle)?,
                Some(next) => {
                    let next = next.0;
                    if let Offer::Rejected(mut back) = self.modules[next].offer(token, cycle) {
                        back.hop -= 1;
                        self.modules[m].outbox.push_front(back);
                        break;
                    }
                }
            }
        }
        Ok(())
    }

    fn retire(&mut self, mut token: InstructionToken, cycle: u64) -> Result<()> {
        if token.retire_cycle.is_some() || !self.in_flight.remove(&token.id) {
            return Err(SimError::Internal {
                cycle,
                detail: format!("token {} retired twice", token.id),
            });
        }
        token.retire_cycle = Some(cycle);
        token.accumulated_latency = cycle - token.inject_cycle;
        self.retired += 1;
        self.last_retire_cycle = cycle;
        self.frontend.on_retire(&token, cycle);
        Ok(())
    }

    /// Runs until the stop condition, drains in-flight work, and reports.
    /// Drain cycles count toward IPC.
    pub fn run(&mut self, stop: StopCondition) -> Result<SimReport> {
        match stop {
            StopCondition::MaxInstructions(0) | StopCondition::MaxCycles(0) => {
                return Err(SimError::config("stop condition must be positive"))
            }
            StopCondition::MaxInstructions(n) => self.quota = Some(n),
            StopCondition::MaxCycles(_) => {}
        }
        self.last_retire_cycle = self.clock;
        loop {
            let admitting = match stop {
                StopCondition::MaxInstructions(n) => self.injected < n,
                StopCondition::MaxCycles(c) => self.clock < c,
            };
            if !admitting {
                self.open = false;
                if self.in_flight.is_empty() {
                    break;
                }
            }
            self.step()?;
            let waiting_on_work = !self.in_flight.is_empty() || matches!(stop, StopCondition::MaxInstructions(_));
            if waiting_on_work && self.clock - self.last_retire_cycle > self.deadlock_window {
                return Err(SimError::Deadlock {
                    module: self.blocked_module(),
                    cycle: self.clock,
                    window: self.deadlock_window,
                });
            }
        }
        Ok(SimReport::from_engine(self))
    }

    /// Name of the module holding the oldest resident token.
    fn blocked_module(&self) -> String {
        self.modules
            .iter()
            .filter_map(|m| m.oldest_resident().map(|t| (t, m.name())))
            .min_by_key(|(t, _)| *t)
            .map(|(_, name)| name.to_string())
            .unwrap_or_else(|| "frontend".to_string())
    }
}

/// Wraps a frontend and keeps every retired token, in retirement order.
#[derive(Debug, Clone)]
pub struct Recording<F> {
    pub inner: F,
    pub retired: Vec<InstructionToken>,
}

impl<F> Recording<F> {
    pub fn new(inner: F) -> Self {
        Recording {
            inner,
            retired: Vec::new(),
        }
    }
}

impl<F: Frontend> Frontend for Recording<F> {
    fn issue(&mut self, port: &mut IssuePort<'_>) -> Result<()> {
        self.inner.issue(port)
    }

    fn on_retire(&mut self, token: &InstructionToken, cycle: u64) {
        self.inner.on_retire(token, cycle);
        self.retired.push(token.clone());
    }
}

/// Injects one token every `interval` cycles along a single route.
#[derive(Debug, Clone)]
pub struct FixedIntervalSource {
    interval: u64,
    route: RouteId,
    next_id: TokenId,
    pending: Option<InstructionToken>,
}

impl FixedIntervalSource {
    pub fn new(interval: u64, route: RouteId) -> Self {
        assert!(interval >= 1, "interval must be >= 1");
        FixedIntervalSource {
            interval,
            route,
            next_id: 0,
            pending: None,
        }
    }
}

impl Frontend for FixedIntervalSource {
    fn issue(&mut self, port: &mut IssuePort<'_>) -> Result<()> {
        if self.pending.is_none() && port.cycle().is_multiple_of(self.interval) && port.can_inject() {
            self.pending = Some(InstructionToken::new(
                self.next_id,
                InstructionKind::IntAlu,
                MemTarget::None,
                self.route,
            ));
            self.next_id += 1;
        }
        if let Some(token) = self.pending.take() {
            if let Offer::Rejected(t) = port.offer(token)? {
                self.pending = Some(t);
            }
        }
        Ok(())
    }
}

/// Injects a token with probability `rate` each cycle (a Bernoulli arrival
/// process). Arrivals that find the first module full wait in order.
#[derive(Debug, Clone)]
pub struct BernoulliSource {
    rate: f64,
    route: RouteId,
    next_id: TokenId,
    backlog: VecDeque<InstructionToken>,
}

impl BernoulliSource {
    pub fn new(rate: f64, route: RouteId) -> Self {
        assert!((0.0..=1.0).contains(&rate), "rate must be a probability");
        BernoulliSource {
            rate,
            route,
            next_id: 0,
            backlog: VecDeque::new(),
        }
    }
}

impl Frontend for BernoulliSource {
    fn issue(&mut self, port: &mut IssuePort<'_>) -> Result<()> {
        use rand::Rng;
        let arrival = port.rng().random::<f64>() < self.rate;
        if arrival && port.can_inject() {
            self.backlog.push_back(InstructionToken::new(
                self.next_id,
                InstructionKind::IntAlu,
                MemTarget::None,
                self.route,
            ));
            self.next_id += 1;
        }
        while let Some(token) = self.backlog.pop_front() {
            if let Offer::Rejected(t) = port.offer(token)? {
                self.backlog.push_front(t);
                break;
            }
        }
        Ok(())
    }
}
