//! Item-level inverted index with filter-and-validate querying.

use std::collections::HashMap;
use std::time::Instant;

use crate::distance::{kendall_k0, min_overlap};
use crate::error::{Error, Result};
use crate::ranking::{
    overlap, Dataset, Hit, ItemId, QueryOutcome, QueryParams, Ranking, RankingId,
};

#[derive(Debug, Clone)]
pub struct InvertedIndex {
    postings: HashMap<ItemId, Vec<RankingId>>,
    k: usize,
    size: usize,
}

impl InvertedIndex {
    pub fn build(dataset: &Dataset) -> Self {
        let mut postings: HashMap<ItemId, Vec<RankingId>> =
            HashMap::with_capacity(dataset.domain().len());
        for r in dataset.iter() {
            for &item in r.items() {
                postings.entry(item).or_default().push(r.id());
            }
        }
        for list in postings.values_mut() {
            list.sort_unstable();
        }
        InvertedIndex {
            postings,
            k: dataset.k(),
            size: dataset.len(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn num_keys(&self) -> usize {
        self.postings.len()
    }

    pub fn postings(&self, item: ItemId) -> &[RankingId] {
        self.postings.get(&item).map_or(&[], Vec::as_slice)
    }

    fn check_query(&self, q: &Ranking) -> Result<()> {
        if q.len() != self.k {
            return Err(Error::KMismatch {
                expected: self.k,
                got: q.len(),
            });
        }
        Ok(())
    }

    fn union_of<'a>(&self, items: impl Iterator<Item = &'a ItemId>) -> Vec<RankingId> {
        let mut ids: Vec<RankingId> = items
            .flat_map(|&i| self.postings(i).iter().copied())
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Scans the posting lists of all query items.
    pub fn query(
        &self,
        dataset: &Dataset,
        q: &Ranking,
        params: &QueryParams,
    ) -> Result<QueryOutcome> {
        self.check_query(q)?;
        let start = Instant::now();
        let candidates = self.union_of(q.items().iter());
        let mut outcome = validate(dataset, q, params, candidates);
        outcome.elapsed = start.elapsed();
        Ok(outcome)
    }

    /// Scans only the first `k - μ + 1` query items' posting lists, where μ is
    /// the minimum overlap a result needs, and drops candidates sharing fewer
    /// than μ items before validation.
    pub fn query_drop(
        &self,
        dataset: &Dataset,
        q: &Ranking,
        params: &QueryParams,
    ) -> Result<QueryOutcome> {
        self.check_query(q)?;
        let start = Instant::now();
        let mu = min_overlap(self.k, params.theta_d);
        let mut candidates = self.union_of(q.items().iter().take(lists_scanned(self.k, mu)));
        candidates.retain(|&id| dataset.get(id).is_some_and(|r| overlap(r, q) >= mu));
        let mut outcome = validate(dataset, q, params, candidates);
        outcome.elapsed = start.elapsed();
        Ok(outcome)
    }
}

/// Number of query posting lists that must be scanned for overlap `mu`.
pub fn lists_scanned(k: usize, mu: usize) -> usize {
    (k + 1).saturating_sub(mu).min(k)
}

pub fn build_inverted(dataset: &Dataset) -> InvertedIndex {
    InvertedIndex::build(dataset)
}

pub fn query_invin(
    index: &InvertedIndex,
    dataset: &Dataset,
    q: &Ranking,
    params: &QueryParams,
) -> Result<QueryOutcome> {
    index.query(dataset, q, params)
}

pub fn query_invin_drop(
    index: &InvertedIndex,
    dataset: &Dataset,
    q: &Ranking,
    params: &QueryParams,
) -> Result<QueryOutcome> {
    index.query_drop(dataset, q, params)
}

/// Computes the exact distance of every candidate and keeps those within the threshold.
pub(crate) fn validate(
    dataset: &Dataset,
    q: &Ranking,
    params: &QueryParams,
    candidates: Vec<RankingId>,
) -> QueryOutcome {
    let results = candidates
        .iter()
        .filter_map(|&id| {
            let r = dataset.get(id)?;
            let distance = kendall_k0(r, q);
            params.accepts(distance).then_some(Hit { id, distance })
        })
        .collect();
    QueryOutcome {
        results,
        distance_calls: candidates.len(),
        candidates,
        elapsed: Default::default(),
    }
}
