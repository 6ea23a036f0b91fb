//! Pairwise inverted indices, read as LSH tables.
//!
//! The unsorted index keys each ranking by every co-occurring item pair in
//! canonical `(min, max)` form; a posting list is the `(1, 1)` bucket of the
//! projection `g = (h_i, h_j)` with `h_i(τ) = [i ∈ τ]` (Scheme 1). The sorted
//! index keys each pair by rank order, `(ahead, behind)`; a posting list is the
//! bucket of `h_ij` for rankings holding both items (Scheme 2). Looking up `l`
//! query pairs emulates `l` hash tables.

use std::collections::HashMap;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::distance::min_overlap;
use crate::error::{Error, Result};
use crate::invindex::{lists_scanned, validate};
use crate::ranking::{Dataset, ItemId, QueryOutcome, QueryParams, Ranking, RankingId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Unsorted,
    Sorted,
}

/// An item pair packed into one `u64` (`a` in the high half).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairKey(u64);

impl PairKey {
    pub fn new(a: ItemId, b: ItemId) -> Self {
        PairKey((u64::from(a.0) << 32) | u64::from(b.0))
    }

    /// Canonical unordered key: smaller item first.
    pub fn unordered(a: ItemId, b: ItemId) -> Self {
        if a < b {
            Self::new(a, b)
        } else {
            Self::new(b, a)
        }
    }

    pub fn a(self) -> ItemId {
        ItemId((self.0 >> 32) as u32)
    }

    pub fn b(self) -> ItemId {
        ItemId(self.0 as u32)
    }

    pub fn reversed(self) -> Self {
        Self::new(self.b(), self.a())
    }
}

impl From<(u32, u32)> for PairKey {
    fn from((a, b): (u32, u32)) -> Self {
        PairKey::new(ItemId(a), ItemId(b))
    }
}

impl std::fmt::Display for PairKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.a(), self.b())
    }
}

fn key_for(variant: Variant, ahead: ItemId, behind: ItemId) -> PairKey {
    match variant {
        Variant::Unsorted => PairKey::unordered(ahead, behind),
        Variant::Sorted => PairKey::new(ahead, behind),
    }
}

fn all_pairs(r: &Ranking, variant: Variant) -> Vec<PairKey> {
    let items = r.items();
    let mut keys = Vec::with_capacity(items.len() * items.len().saturating_sub(1) / 2);
    for (p, &ahead) in items.iter().enumerate() {
        for &behind in &items[p + 1..] {
            keys.push(key_for(variant, ahead, behind));
        }
    }
    keys
}

/// All `k(k-1)/2` co-occurring pairs of `r` with the smaller item first.
pub fn pairs_unsorted(r: &Ranking) -> Vec<PairKey> {
    all_pairs(r, Variant::Unsorted)
}

/// All `k(k-1)/2` pairs of `r` with the higher-ranked item first.
pub fn pairs_sorted(r: &Ranking) -> Vec<PairKey> {
    all_pairs(r, Variant::Sorted)
}

pub fn pair_count(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// Number of query pairs touching one of the first `k - μ + 1` query items.
/// Any ranking sharing at least two items with the query (and at least μ)
/// co-occurs with the query on one of these pairs.
pub fn safe_pair_budget(k: usize, theta_d: f64) -> usize {
    let t = lists_scanned(k, min_overlap(k, theta_d));
    (1..=t).map(|i| k - i).sum()
}

fn mix_seed(seed: u64, q: &Ranking) -> u64 {
    // splitmix64 folded over the query items
    let mut h = seed;
    for item in q.items() {
        h ^= u64::from(item.0);
        h = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = h;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        h = z ^ (z >> 31);
    }
    h
}

/// First `l` pairs of a seeded permutation of the query's pairs.
///
/// The permutation runs over position pairs of `q` and depends only on `q`
/// and `seed`, so both variants pick the same underlying item pairs and a
/// smaller `l` always selects a prefix of a larger one.
pub fn select_query_pairs(
    q: &Ranking,
    variant: Variant,
    l: usize,
    seed: u64,
) -> Result<Vec<PairKey>> {
    let total = pair_count(q.len());
    if l == 0 || l > total {
        return Err(Error::LTooLarge { l, max: total });
    }
    let mut positions: Vec<(usize, usize)> = Vec::with_capacity(total);
    for p in 0..q.len() {
        for r in p + 1..q.len() {
            positions.push((p, r));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, q));
    positions.shuffle(&mut rng);
    let items = q.items();
    Ok(positions[..l]
        .iter()
        .map(|&(p, r)| key_for(variant, items[p], items[r]))
        .collect())
}

/// Query pairs touching one of the first `k - μ + 1` query items.
pub fn select_safe_pairs(q: &Ranking, variant: Variant, theta_d: f64) -> Vec<PairKey> {
    let k = q.len();
    let t = lists_scanned(k, min_overlap(k, theta_d));
    let items = q.items();
    let mut keys = Vec::with_capacity(safe_pair_budget(k, theta_d));
    for p in 0..t {
        for r in p + 1..k {
            keys.push(key_for(variant, items[p], items[r]));
        }
    }
    keys
}

#[derive(Debug, Clone)]
pub struct PairIndex {
    variant: Variant,
    postings: HashMap<PairKey, Vec<RankingId>>,
    k: usize,
    size: usize,
}

impl PairIndex {
    pub fn build(dataset: &Dataset, variant: Variant) -> Self {
        let mut postings: HashMap<PairKey, Vec<RankingId>> = HashMap::new();
        for r in dataset.iter() {
            for key in all_pairs(r, variant) {
                postings.entry(key).or_default().push(r.id());
            }
        }
        for list in postings.values_mut() {
            list.sort_unstable();
        }
        PairIndex {
            variant,
            postings,
            k: dataset.k(),
            size: dataset.len(),
        }
    }

    pub fn variant(&self) -> Variant {
        self.variant
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

    pub fn total_entries(&self) -> usize {
        self.postings.values().map(Vec::len).sum()
    }

    pub fn postings(&self, key: PairKey) -> &[RankingId] {
        self.postings.get(&key).map_or(&[], Vec::as_slice)
    }

    pub fn keys(&self) -> impl Iterator<Item = PairKey> + '_ {
        self.postings.keys().copied()
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

    /// Looks up `params.l` seeded query pairs and validates the union of their buckets.
    pub fn query(
        &self,
        dataset: &Dataset,
        q: &Ranking,
        params: &QueryParams,
    ) -> Result<QueryOutcome> {
        self.check_query(q)?;
        let start = Instant::now();
        let keys = select_query_pairs(q, self.variant, params.l, params.seed)?;
        let mut outcome = self.lookup_and_validate(dataset, q, params, &keys);
        outcome.elapsed = start.elapsed();
        Ok(outcome)
    }

    /// Looks up every pair touching one of the first `k - μ + 1` query items.
    pub fn query_safe(
        &self,
        dataset: &Dataset,
        q: &Ranking,
        params: &QueryParams,
    ) -> Result<QueryOutcome> {
        self.check_query(q)?;
        let start = Instant::now();
        let keys = select_safe_pairs(q, self.variant, params.theta_d);
        let mut outcome = self.lookup_and_validate(dataset, q, params, &keys);
        outcome.elapsed = start.elapsed();
        Ok(outcome)
    }

    pub fn candidates_for(&self, keys: &[PairKey]) -> Vec<RankingId> {
        let mut ids: Vec<RankingId> = keys
            .iter()
            .flat_map(|&key| self.postings(key).iter().copied())
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    fn lookup_and_validate(
        &self,
        dataset: &Dataset,
        q: &Ranking,
        params: &QueryParams,
        keys: &[PairKey],
    ) -> QueryOutcome {
        validate(dataset, q, params, self.candidates_for(keys))
    }
}

pub fn build_pair_index(dataset: &Dataset, variant: Variant) -> PairIndex {
    PairIndex::build(dataset, variant)
}

pub fn query_lsh(
    index: &PairIndex,
    dataset: &Dataset,
    q: &Ranking,
    params: &QueryParams,
) -> Result<QueryOutcome> {
    index.query(dataset, q, params)
}
