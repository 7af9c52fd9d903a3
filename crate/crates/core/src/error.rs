use std::path::PathBuf;

use thiserror::Error;

use crate::geometry::PointId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {id} at ({x}, {y}) lies outside the grid extent")]
    OutsideExtent { id: PointId, x: f64, y: f64 },

    #[error("location ({x}, {y}) lies outside the grid extent")]
    LocationOutsideExtent { x: f64, y: f64 },

    #[error("duplicate point id {id} in relation {relation}")]
    DuplicateId { relation: String, id: PointId },

    #[error("relation {0} registered twice")]
    DuplicateRelation(String),

    #[error("unknown relation {0}")]
    UnknownRelation(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("{name} must be at least 1")]
    InvalidK { name: &'static str },

    #[error(
        "could not place {clusters} non-overlapping clusters of radius {radius} \
         after {attempts} attempts; try a smaller radius"
    )]
    ClusterPlacement {
        clusters: usize,
        radius: f64,
        attempts: usize,
    },

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
