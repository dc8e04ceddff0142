use std::path::PathBuf;

use thiserror::Error;

use crate::classes::ClassError;
use crate::fan::FanError;
use crate::io::emit::EmitError;
use crate::io::ParseError;
use crate::lift::LiftError;
use crate::web::WebError;

/// Any failure of a run, tagged by the stage that raised it.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input: {0}")]
    Input(#[from] ParseError),
    #[error("fan: {0}")]
    Fan(#[from] FanError),
    #[error("classes: {0}")]
    Class(#[from] ClassError),
    #[error("web: {0}")]
    Web(#[from] WebError),
    #[error("lift: {0}")]
    Lift(#[from] LiftError),
    #[error("output: {0}")]
    Emit(#[from] EmitError),
    #[error("reading {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
}

impl Error {
    pub fn is_internal(&self) -> bool {
        match self {
            Error::Fan(e) => e.is_internal(),
            Error::Class(ClassError::Fan(e)) => e.is_internal(),
            Error::Web(e) => e.is_internal(),
            Error::Lift(e) => e.is_internal(),
            _ => false,
        }
    }

    /// 3 for internal consistency failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        if self.is_internal() {
            3
        } else {
            1
        }
    }
}
