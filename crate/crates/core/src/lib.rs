//! Exact and LSH-accelerated similarity search over top-k rankings under the
//! generalized Kendall's Tau distance K⁽⁰⁾ (penalty zero).
//!
//! Search follows filter-and-validate: an index proposes candidate rankings,
//! and each candidate's exact distance to the query decides membership in the
//! result set. Four index strategies are provided:
//!
//! - [`invindex::InvertedIndex::query`]: item-level inverted index, exact.
//! - [`invindex::InvertedIndex::query_drop`]: the same index scanning only
//!   `k - μ + 1` posting lists, where μ is the minimum overlap any result
//!   must have. Exact.
//! - [`pairindex::PairIndex`] with [`pairindex::Variant::Unsorted`]: LSH over
//!   co-occurring item pairs (Scheme 1). Approximate.
//! - [`pairindex::PairIndex`] with [`pairindex::Variant::Sorted`]: LSH over
//!   rank-ordered item pairs (Scheme 2). Approximate.
//!
//! ```
//! use topk_lsh::{Dataset, Method, QueryParams, Ranking, SearchEngine};
//!
//! let dataset = Dataset::new(vec![
//!     Ranking::from_ids(1, &[2, 5, 4, 3]).unwrap(),
//!     Ranking::from_ids(2, &[1, 4, 7, 5]).unwrap(),
//!     Ranking::from_ids(3, &[0, 8, 7, 5]).unwrap(),
//! ])
//! .unwrap();
//! let engine = SearchEngine::new(dataset);
//! let q = Ranking::from_ids(0, &[8, 1, 0, 6]).unwrap();
//! let params = QueryParams::new(0.5625, 4, 1, 0, Method::InvIn).unwrap();
//! let outcome = engine.search(&q, &params).unwrap();
//! assert_eq!(outcome.candidates, vec![2, 3]);
//! assert_eq!(outcome.result_ids(), vec![3]);
//! ```

pub mod bench;
pub mod cli;
pub mod data;
pub mod distance;
pub mod engine;
pub mod error;
pub mod invindex;
pub mod lshmodel;
pub mod pairindex;
pub mod ranking;

pub use engine::SearchEngine;
pub use error::{Error, Result};
pub use ranking::{
    overlap, Dataset, Hit, ItemId, Method, QueryOutcome, QueryParams, Ranking, RankingId,
};
