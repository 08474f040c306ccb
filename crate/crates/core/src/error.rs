use thiserror::Error;

/// Errors raised by geometry primitives.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon coordinate is not finite")]
    NonFinite,
    #[error("polygon is degenerate (fewer than 3 non-collinear vertices or zero area)")]
    Degenerate,
    #[error("polygon is not rectilinear: edge {index} is not axis-aligned")]
    NotRectilinear { index: usize },
}

/// Errors raised by the conversion, bubble-diagram and prompt pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("duplicate room id {0:?}")]
    DuplicateId(String),
    #[error("channel-3 value {0} is not present in the category map")]
    UnmappedCategory(u8),
    #[error("room mask {key:?} has an interior hole")]
    MaskHasHole { key: (u8, u8) },
    #[error("raster: {0}")]
    Raster(String),
    #[error("category map: {0}")]
    CategoryMap(String),
    #[error("scene record: {0}")]
    Scene(String),
    #[error("graph with {nodes} nodes exceeds the exact search bound of {bound}; approximate edit distance is not supported")]
    GraphTooLarge { nodes: usize, bound: usize },
    #[error("constraint set is empty")]
    EmptyConstraintSet,
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Image(#[from] image::ImageError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
