use thiserror::Error;

use crate::ranking::{ItemId, RankingId};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ranking is empty")]
    EmptyRanking,
    #[error("item {0} occurs more than once in ranking")]
    DuplicateItem(ItemId),
    #[error("item sets of the two rankings differ")]
    DomainMismatch,
    #[error("expected rankings of length {expected}, got {got}")]
    KMismatch { expected: usize, got: usize },
    #[error("ranking id {0} is used more than once")]
    DuplicateRankingId(RankingId),
    #[error("dataset contains no rankings")]
    EmptyDataset,
    #[error("line {line}: {cause}")]
    Parse { line: usize, cause: String },
    #[error("line {line}: expected {expected} items, found {got}")]
    InconsistentK {
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error("line {line}: ranking label {label:?} is used more than once")]
    DuplicateRankingLabel { line: usize, label: String },
    #[error("line {line}: item {item:?} occurs more than once")]
    DuplicateItemInLine { line: usize, item: String },
    #[error("domain of {domain} items cannot fill rankings of length {k}")]
    DomainTooSmall { domain: usize, k: usize },
    #[error("l = {l} outside 1..={max} available query pairs")]
    LTooLarge { l: usize, max: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
