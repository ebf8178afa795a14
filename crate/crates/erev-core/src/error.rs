use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by the simulation toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A malformed row in a cycle or map CSV stream.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Structurally valid input that violates a domain invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// Input whose layout does not match the expected file format.
    #[error("format error: {0}")]
    Format(String),

    /// An argument outside its documented domain.
    #[error("argument error: {0}")]
    Argument(String),

    /// Unknown identifier in a lookup (builtin cycle, channel name, ...).
    #[error("unknown {kind}: {name}")]
    Lookup { kind: &'static str, name: String },

    /// Map query outside the gridded hull.
    #[error("{axis} value {value} outside map range [{lo}, {hi}]")]
    MapRange {
        axis: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// Operating point outside a component's torque/speed envelope.
    #[error("infeasible operating point: {0}")]
    Infeasible(String),

    /// Demand beyond the capability of the component set.
    #[error("capability exceeded: {0}")]
    Capability(String),

    /// Battery power demand beyond the open-circuit-voltage limit.
    #[error("battery power limit: requested {requested_w:.1} W exceeds {limit_w:.1} W at soc {soc:.3}")]
    BatteryPowerLimit {
        requested_w: f64,
        limit_w: f64,
        soc: f64,
    },

    /// Sizing procedure could not satisfy the performance constraints.
    #[error("sizing infeasible: {0}")]
    SizingInfeasible(String),

    /// The horizon solver found no feasible control at a stage.
    #[error("no feasible control at horizon stage {stage}: {msg}")]
    HorizonInfeasible { stage: usize, msg: String },

    /// A state constraint (SOC bounds) was violated during solving.
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    /// Simulation aborted at a specific cycle step.
    #[error("simulation aborted at step {step} (t = {time_s} s): {msg}")]
    SimulationAbort {
        step: usize,
        time_s: f64,
        msg: String,
    },

    /// Bad or inconsistent run configuration.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
