//! Document acquisition and preprocessing.

mod fetch;
mod html;
pub mod langid;
mod select;

use std::path::PathBuf;

use thiserror::Error;

pub use fetch::{fetch_document, list_local_inventory, FetchSource, RawDocument};
pub use html::html_to_paragraphs;
pub use langid::{
    guess_language, train_language_profile, verify_language, Guess, LanguageProfile, ProfileOptions, Verdict,
};
pub use select::{select_corpus, MIN_LANGUAGES, MIN_NEW_MEMBER_LANGUAGES};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("document not found: {0}")]
    NotFound(String),
    #[error("cannot decode {location} as {encoding}")]
    DecodeFailure { location: String, encoding: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("http request for {url} failed: {message}")]
    Http { url: String, message: String },
    #[error(transparent)]
    Celex(#[from] crate::celex::CelexError),
    #[error("insufficient training data for {lang}: {got} characters, need {needed}")]
    InsufficientTrainingData { lang: String, got: usize, needed: usize },
    #[error("cannot guess the language of empty text")]
    EmptyText,
    #[error("no language profiles supplied")]
    NoProfiles,
    #[error("no profile for expected language {0}")]
    MissingProfile(String),
    #[error("unknown language code {0:?}")]
    UnknownLanguage(String),
    #[error("bad profile line {line}: {content:?}")]
    BadProfile { line: usize, content: String },
}
