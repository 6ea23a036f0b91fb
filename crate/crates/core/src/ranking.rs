//! Domain types shared across the crate: items, top-k rankings, datasets,
//! query parameters and query outcomes.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::time::Duration;

use crate::error::{Error, Result};

/// Opaque item identifier. Ordering is only used for canonical pair keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemId(pub u32);

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for ItemId {
    fn from(value: u32) -> Self {
        ItemId(value)
    }
}

pub type RankingId = u32;

/// A top-k list: `k` distinct items, leftmost item has rank 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ranking {
    id: RankingId,
    items: Vec<ItemId>,
}

impl Ranking {
    pub fn new(id: RankingId, items: Vec<ItemId>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::EmptyRanking);
        }
        let mut sorted = items.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateItem(w[0]));
        }
        Ok(Ranking { id, items })
    }

    /// Convenience constructor from raw integer ids.
    pub fn from_ids(id: RankingId, items: &[u32]) -> Result<Self> {
        Self::new(id, items.iter().copied().map(ItemId).collect())
    }

    pub fn id(&self) -> RankingId {
        self.id
    }

    pub fn items(&self) -> &[ItemId] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// 1-based rank of `item`, or `None` when the item is not in the list.
    pub fn rank_of(&self, item: ItemId) -> Option<usize> {
        self.items.iter().position(|&i| i == item).map(|p| p + 1)
    }

    pub fn contains(&self, item: ItemId) -> bool {
        self.items.contains(&item)
    }
}

pub fn make_ranking(id: RankingId, items: Vec<ItemId>) -> Result<Ranking> {
    Ranking::new(id, items)
}

/// Number of items shared by two rankings.
pub fn overlap(a: &Ranking, b: &Ranking) -> usize {
    a.items.iter().filter(|i| b.items.contains(i)).count()
}

/// Insertion-ordered mapping between external string labels and dense item ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dictionary {
    labels: Vec<String>,
    index: HashMap<String, ItemId>,
}

impl Dictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_insert(&mut self, label: &str) -> ItemId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = ItemId(self.labels.len() as u32);
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    pub fn get(&self, label: &str) -> Option<ItemId> {
        self.index.get(label).copied()
    }

    pub fn label(&self, item: ItemId) -> Option<&str> {
        self.labels.get(item.0 as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// String labels attached to a parsed dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labels {
    pub rankings: Vec<String>,
    pub items: Dictionary,
}

/// A collection of same-length rankings and the item domain they induce.
#[derive(Debug, Clone)]
pub struct Dataset {
    k: usize,
    rankings: Vec<Ranking>,
    domain: Vec<ItemId>,
    positions: HashMap<RankingId, usize>,
    labels: Option<Labels>,
}

impl Dataset {
    pub fn new(rankings: Vec<Ranking>) -> Result<Self> {
        let k = rankings.first().ok_or(Error::EmptyDataset)?.len();
        let mut positions = HashMap::with_capacity(rankings.len());
        let mut domain = BTreeSet::new();
        for (pos, r) in rankings.iter().enumerate() {
            if r.len() != k {
                return Err(Error::KMismatch {
                    expected: k,
                    got: r.len(),
                });
            }
            if positions.insert(r.id, pos).is_some() {
                return Err(Error::DuplicateRankingId(r.id));
            }
            domain.extend(r.items.iter().copied());
        }
        Ok(Dataset {
            k,
            rankings,
            domain: domain.into_iter().collect(),
            positions,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Labels) -> Result<Self> {
        if labels.rankings.len() != self.rankings.len() {
            return Err(Error::InvalidParameter(format!(
                "{} ranking labels for {} rankings",
                labels.rankings.len(),
                self.rankings.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.rankings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rankings.is_empty()
    }

    pub fn rankings(&self) -> &[Ranking] {
        &self.rankings
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Ranking> {
        self.rankings.iter()
    }

    /// Sorted distinct items occurring in any ranking.
    pub fn domain(&self) -> &[ItemId] {
        &self.domain
    }

    pub fn get(&self, id: RankingId) -> Option<&Ranking> {
        // ids usually equal positions
        match self.rankings.get(id as usize) {
            Some(r) if r.id == id => Some(r),
            _ => self.positions.get(&id).map(|&p| &self.rankings[p]),
        }
    }

    pub fn labels(&self) -> Option<&Labels> {
        self.labels.as_ref()
    }

    /// External label of a ranking: its parsed label, or the numeric id.
    pub fn ranking_label(&self, id: RankingId) -> String {
        match (&self.labels, self.positions.get(&id)) {
            (Some(labels), Some(&pos)) => labels.rankings[pos].clone(),
            _ => id.to_string(),
        }
    }

    pub fn item_label(&self, item: ItemId) -> String {
        self.labels
            .as_ref()
            .and_then(|l| l.items.label(item))
            .map(str::to_owned)
            .unwrap_or_else(|| item.0.to_string())
    }

    /// Maps query tokens to item ids. Tokens unknown to the dataset get fresh
    /// ids past every id in use, so they never match an indexed item.
    pub fn encode_query<S: AsRef<str>>(&self, id: RankingId, tokens: &[S]) -> Result<Ranking> {
        let mut next_fresh = self
            .labels
            .as_ref()
            .map(|l| l.items.len() as u32)
            .unwrap_or(0)
            .max(self.domain.last().map_or(0, |i| i.0 + 1));
        let mut fresh: HashMap<&str, ItemId> = HashMap::new();
        let mut items = Vec::with_capacity(tokens.len());
        for token in tokens {
            let token = token.as_ref();
            let known = match &self.labels {
                Some(labels) => labels.items.get(token),
                None => token
                    .parse::<u32>()
                    .ok()
                    .map(ItemId)
                    .filter(|i| self.domain.binary_search(i).is_ok()),
            };
            let item = match known {
                Some(item) => item,
                None => *fresh.entry(token).or_insert_with(|| {
                    let item = ItemId(next_fresh);
                    next_fresh += 1;
                    item
                }),
            };
            items.push(item);
        }
        Ranking::new(id, items)
    }
}

/// Query strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    InvIn,
    InvInDrop,
    Scheme1,
    Scheme2,
    Oracle,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::InvIn,
        Method::InvInDrop,
        Method::Scheme1,
        Method::Scheme2,
        Method::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::InvIn => "invin",
            Method::InvInDrop => "invin-drop",
            Method::Scheme1 => "scheme1",
            Method::Scheme2 => "scheme2",
            Method::Oracle => "oracle",
        }
    }

    /// Whether the method consumes the `l` lookup budget.
    pub fn uses_l(self) -> bool {
        matches!(self, Method::Scheme1 | Method::Scheme2)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryParams {
    /// Normalized threshold in `[0, 1)`.
    pub theta: f64,
    /// `theta * k^2`, compared against the integer distance.
    pub theta_d: f64,
    pub l: usize,
    pub seed: u64,
    pub method: Method,
}

impl QueryParams {
    pub fn new(theta: f64, k: usize, l: usize, seed: u64, method: Method) -> Result<Self> {
        if !(0.0..1.0).contains(&theta) {
            return Err(Error::InvalidParameter(format!(
                "theta must lie in [0, 1), got {theta}"
            )));
        }
        if k == 0 {
            return Err(Error::InvalidParameter("k must be positive".into()));
        }
        if l == 0 {
            return Err(Error::InvalidParameter("l must be positive".into()));
        }
        Ok(QueryParams {
            theta,
            theta_d: theta * (k * k) as f64,
            l,
            seed,
            method,
        })
    }

    pub fn accepts(&self, distance: u32) -> bool {
        f64::from(distance) <= self.theta_d
    }
}

/// A validated result with its exact distance to the query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hit {
    pub id: RankingId,
    pub distance: u32,
}

/// Candidates retrieved by the filter step and the results that passed validation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QueryOutcome {
    /// Ascending by ranking id.
    pub results: Vec<Hit>,
    /// Ascending, distinct ranking ids.
    pub candidates: Vec<RankingId>,
    pub distance_calls: usize,
    pub elapsed: Duration,
}

impl QueryOutcome {
    pub fn result_ids(&self) -> Vec<RankingId> {
        self.results.iter().map(|h| h.id).collect()
    }
}
