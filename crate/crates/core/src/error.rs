use thiserror::Error;

/// Everything that can go wrong while configuring or running a simulation.
#[derive(Debug, Error)]
pub enum SimError {
    /// A configuration or profile document violated its schema or an invariant.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The mix probabilities of a workload profile do not sum to one.
    #[error("instruction mix probabilities sum to {sum}, expected 1")]
    MixSum { sum: f64 },

    /// No instruction retired for a whole deadlock window.
    #[error("deadlock: no instruction retired for {window} cycles (cycle {cycle}), blocked at `{module}`")]
    Deadlock {
        module: String,
        cycle: u64,
        window: u64,
    },

    /// A calibration target outside what the dependency knob can reach.
    #[error("target IPC {target} is infeasible: reachable range is [{min_ipc:.4}, {max_ipc:.4}]")]
    InfeasibleTarget {
        target: f64,
        min_ipc: f64,
        max_ipc: f64,
    },

    /// Bad argument to a pure computation (e.g. a non-positive baseline IPC).
    #[error("domain error: {0}")]
    Domain(String),

    /// Engine bookkeeping went inconsistent. Always a simulator bug.
    #[error("internal fault at cycle {cycle}: {detail}")]
    Internal { cycle: u64, detail: String },

    #[error("i/o error on `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl SimError {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        SimError::Config(msg.into())
    }

    /// True for the failures the command line maps to its "deadlock" exit code.
    pub fn is_deadlock(&self) -> bool {
        matches!(self, SimError::Deadlock { .. })
    }
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
