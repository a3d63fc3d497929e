use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("edge `{edge}` references unknown vertex `{vertex}`")]
    DanglingEndpoint { edge: String, vertex: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("missing value for `{0}`")]
    MissingValue(String),
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("boundary word of face `{face}` breaks at position {position}: r({from}) != s({to})")]
    BrokenBoundaryWord {
        face: String,
        position: usize,
        from: String,
        to: String,
    },
    #[error("face `{0}` is not triangular")]
    NonTriangularFace(String),
    #[error("monomials live on different graphs or do not compose: {0}")]
    GraphMismatch(String),
    #[error("weight value for `{0}` must be strictly positive")]
    NonpositiveWeight(String),
    #[error("weight is not faithful: {0}")]
    NotFaithful(String),
    #[error("bad embedding: {0}")]
    BadEmbedding(String),
    #[error("incompatible attachment: {0}")]
    IncompatibleAttachment(String),
    #[error("mode error: {0}")]
    ModeError(String),
    #[error("invalid triple: {0}")]
    InvalidTriple(String),
    #[error("invalid incidence plane: {0}")]
    InvalidPlane(String),
    #[error("sector rule is not single-valued: {0}")]
    AmbiguousSector(String),
    #[error("base value for `{0}` must be strictly positive")]
    NonpositiveBase(String),
    #[error("division by an element that vanishes at the root")]
    DivisionByZero,
    #[error("cannot parse `{0}`")]
    Parse(String),
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
