//! Edge-ununfoldable polyhedra: spiked-solid constructions, edge and
//! general unfoldings, and exhaustive verification of unfoldability.

pub mod constructions;
pub mod geometry;
pub mod io;
pub mod mesh;
pub mod search;
pub mod unfold;

use thiserror::Error;

use constructions::ConstructionError;
use io::IoError;
use mesh::MeshError;
use search::SearchError;
use unfold::UnfoldError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Unfold(#[from] UnfoldError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{0}")]
    Usage(String),
}

impl Error {
    /// 2 validation, 3 parse, 4 search budget exceeded, 1 file system.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Search(SearchError::ModeUnsupported { .. }) => 4,
            Error::Io(IoError::Parse { .. }) | Error::Io(IoError::Json(_)) => 3,
            Error::Io(IoError::File { .. }) => 1,
            _ => 2,
        }
    }
}
