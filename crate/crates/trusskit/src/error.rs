use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("edge {edge} references missing vertex {vertex}")]
    MissingVertex { edge: usize, vertex: usize },
    #[error("edge {edge} joins vertex {vertex} to itself")]
    SelfLoop { edge: usize, vertex: usize },
    #[error("edge {edge} duplicates edge {other} and is not flagged as a bigon")]
    DuplicateEdge { edge: usize, other: usize },
    #[error("edge {edge} has a non-positive or non-finite length")]
    BadLength { edge: usize },
    #[error("edge {edge} has zero length")]
    ZeroLength { edge: usize },
    #[error("no edge with id {0}")]
    UnknownEdge(usize),
    #[error("no vertex with id {0}")]
    UnknownVertex(usize),
    #[error("edge {0} is already removed")]
    AlreadyRemoved(usize),
    #[error("edge {0} is not removed")]
    NotRemoved(usize),
    #[error("graph of active edges is disconnected")]
    Disconnected,
    #[error("face {face} uses a vertex pair with no edge")]
    FaceWithoutEdge { face: usize },
    #[error("face {face} repeats a vertex")]
    DegenerateFaceIndex { face: usize },
    #[error("edge between {a} and {b} lies in more than two faces")]
    NonManifoldEdge { a: usize, b: usize },
    #[error("vertex {0} has a disconnected link")]
    PinchedVertex(usize),
    #[error("boundary loop through vertex {0} is not simple")]
    NonSimpleBoundary(usize),
    #[error("edges {0} and {1} cross; faces cannot be inferred")]
    CrossingEdges(usize, usize),
    #[error("vertices {0} and {1} coincide")]
    CoincidentVertices(usize, usize),
    #[error("truss has no faces")]
    NoFaces,
    #[error("vertex {0} is not an interior vertex")]
    NotInterior(usize),
    #[error("sector {sector} around vertex {center} is degenerate")]
    DegenerateSector { center: usize, sector: usize },
    #[error("truss has no active edges")]
    Empty,
    #[error("truss is not infinitesimally rigid (nullity {nullity})")]
    NotRigid { nullity: usize },
    #[error("gauge-augmented matrix is singular")]
    AugmentedSingular,
    #[error("length vector has {got} entries, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("prescribed elongations are incompatible (residual {residual:e})")]
    Incompatible { residual: f64 },
    #[error("region contains no interior vertices")]
    EmptyRegion,
    #[error("face {0} violates the strict triangle inequality")]
    DegenerateFace(usize),
    #[error("vertex {vertex} has curvature {curvature:e}; not developable")]
    NotFlat { vertex: usize, curvature: f64 },
    #[error("triangulation is not a topological disk")]
    NotDisk,
    #[error("region is not bounded by a single simple curve")]
    NotSimplyBounded,
    #[error("placements of face {face} disagree by {mismatch:e}")]
    PlacementMismatch { face: usize, mismatch: f64 },
    #[error("hole touches the outer boundary")]
    HoleTouchesBoundary,
    #[error("holes overlap")]
    OverlappingHoles,
    #[error("hole lies outside the cell")]
    HoleOutOfRange,
    #[error("cell boundary does not match the periodic tiling")]
    CellMisaligned,
    #[error("truss vertices are not on the triangular lattice")]
    NotLattice,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("pinned points {0} and {1} do not coincide")]
    PinMismatch(usize, usize),
    #[error("bigon pins the same pair twice")]
    RepeatedPin,
    #[error("triangle anchors are collinear")]
    CollinearAnchors,
    #[error("load is not balanced (net force/torque {0:e})")]
    Unbalanced(f64),
    #[error("load excites a flex mode (residual {0:e})")]
    ExcitesFlex(f64),
    #[error("spring constant for edge {0} must be positive")]
    BadSpring(usize),
    #[error("polynomial degree {0} exceeds the supported maximum")]
    DegreeTooHigh(u32),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
