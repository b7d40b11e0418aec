use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("negative cost on {0}")]
    NegativeCost(String),
    #[error("duplicate edge ({facility}, {client})")]
    DuplicateEdge { facility: String, client: String },
    #[error("duplicate identifier {0:?}")]
    DuplicateId(String),
    #[error("unknown facility {0:?}")]
    UnknownFacility(String),
    #[error("unknown client {0:?}")]
    UnknownClient(String),
    #[error(
        "instance needs at least two facilities and two clients (got {facilities} and {clients})"
    )]
    TooSmall { facilities: usize, clients: usize },
    #[error("graph is not normalized to power-of-two costs")]
    NotNormalized,
    #[error("normalized cost {0} exceeds the supported range (2^62)")]
    CostOutOfRange(String),
    #[error("all costs are zero; aspect ratio is undefined")]
    NoPositiveCost,
    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
    #[error("duplicate request for client {0:?}")]
    DuplicateRequest(String),

    #[error("client {0:?} already arrived")]
    DuplicateArrival(String),
    #[error("client {0:?} has not arrived")]
    NotArrived(String),
    #[error("augmentation targeted zero-cost facility {0:?}")]
    ZeroCostAugmentation(String),
    #[error("serving client {client:?} exceeded the update bound {bound}")]
    NonTermination { client: String, bound: u64 },
    #[error("no good distance for client {0:?}")]
    NoGoodDistance(String),

    #[error("all facility costs are zero; potential is undefined")]
    DegenerateRho,
    #[error("both rounding choices for facility {facility:?} increase the potential ({before} -> {best})")]
    PotentialIncrease {
        facility: String,
        before: f64,
        best: f64,
    },
    #[error("no open facility adjacent to client {0:?}")]
    InfeasibleRounding(String),

    #[error("doubling exceeded phase limit {0}")]
    PhaseLimit(u32),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("client {0:?} has no incident edge")]
    InfeasibleInstance(String),
    #[error("size guard breached: {actual} > {limit}")]
    SizeGuard { limit: usize, actual: usize },

    #[error("audit {name} failed: {context}")]
    AuditFailure { name: String, context: String },
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
