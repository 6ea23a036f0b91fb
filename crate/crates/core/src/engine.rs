//! A dataset together with lazily built indices, dispatching queries by method.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use crate::distance::kendall_k0;
use crate::error::{Error, Result};
use crate::invindex::InvertedIndex;
use crate::pairindex::{PairIndex, Variant};
use crate::ranking::{Dataset, Hit, Method, QueryOutcome, QueryParams, Ranking};

/// Validates every ranking of the dataset against the query.
pub fn linear_scan(dataset: &Dataset, q: &Ranking, params: &QueryParams) -> QueryOutcome {
    let start = Instant::now();
    let mut results: Vec<Hit> = dataset
        .iter()
        .filter_map(|r| {
            let distance = kendall_k0(r, q);
            params.accepts(distance).then_some(Hit {
                id: r.id(),
                distance,
            })
        })
        .collect();
    results.sort_unstable_by_key(|h| h.id);
    let mut candidates: Vec<u32> = dataset.iter().map(Ranking::id).collect();
    candidates.sort_unstable();
    QueryOutcome {
        results,
        distance_calls: candidates.len(),
        candidates,
        elapsed: start.elapsed(),
    }
}

#[derive(Debug)]
pub struct SearchEngine {
    dataset: Dataset,
    inverted: OnceLock<InvertedIndex>,
    unsorted: OnceLock<PairIndex>,
    sorted: OnceLock<PairIndex>,
}

impl SearchEngine {
    pub fn new(dataset: Dataset) -> Self {
        SearchEngine {
            dataset,
            inverted: OnceLock::new(),
            unsorted: OnceLock::new(),
            sorted: OnceLock::new(),
        }
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn inverted(&self) -> &InvertedIndex {
        self.inverted
            .get_or_init(|| InvertedIndex::build(&self.dataset))
    }

    pub fn pair_index(&self, variant: Variant) -> &PairIndex {
        let cell = match variant {
            Variant::Unsorted => &self.unsorted,
            Variant::Sorted => &self.sorted,
        };
        cell.get_or_init(|| PairIndex::build(&self.dataset, variant))
    }

    /// Builds the index `method` needs, returning the build time (zero if it
    /// already existed or the method needs none).
    pub fn prepare(&self, method: Method) -> Duration {
        let start = Instant::now();
        let built = match method {
            Method::InvIn | Method::InvInDrop => {
                let fresh = self.inverted.get().is_none();
                self.inverted();
                fresh
            }
            Method::Scheme1 => {
                let fresh = self.unsorted.get().is_none();
                self.pair_index(Variant::Unsorted);
                fresh
            }
            Method::Scheme2 => {
                let fresh = self.sorted.get().is_none();
                self.pair_index(Variant::Sorted);
                fresh
            }
            Method::Oracle => false,
        };
        if built {
            start.elapsed()
        } else {
            Duration::ZERO
        }
    }

    pub fn search(&self, q: &Ranking, params: &QueryParams) -> Result<QueryOutcome> {
        let ds = &self.dataset;
        match params.method {
            Method::InvIn => self.inverted().query(ds, q, params),
            Method::InvInDrop => self.inverted().query_drop(ds, q, params),
            Method::Scheme1 => self.pair_index(Variant::Unsorted).query(ds, q, params),
            Method::Scheme2 => self.pair_index(Variant::Sorted).query(ds, q, params),
            Method::Oracle => {
                if q.len() != ds.k() {
                    return Err(Error::KMismatch {
                        expected: ds.k(),
                        got: q.len(),
                    });
                }
                Ok(linear_scan(ds, q, params))
            }
        }
    }
}
