use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NeuralError {
    #[error(transparent)]
    Candle(#[from] candle_core::Error),
    #[error("failed to access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("encoder directory {dir} is missing {file}")]
    MissingEncoderFile { dir: PathBuf, file: &'static str },
    #[error(
        "encoder weights at {path} do not match the model (expected sha256 \
         {expected}, found {found}); point LESBAR_ENCODER at the checkpoint \
         the model was trained with"
    )]
    EncoderMismatch {
        path: PathBuf,
        expected: String,
        found: String,
    },
    #[error("no usable encoder: {0}")]
    EncoderUnavailable(String),
    #[error("vocabulary error: {0}")]
    Vocab(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("training error: {0}")]
    Train(String),
    #[error(transparent)]
    Corpus(#[from] lesbar_core::corpus::CorpusError),
    #[error(transparent)]
    Provenance(#[from] lesbar_core::provenance::ProvenanceError),
}
