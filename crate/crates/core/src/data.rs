//! Rankings file I/O and synthetic workloads.
//!
//! File format: one ranking per line, `<label>\t<item> <item> ...`. Lines
//! starting with `#` and blank lines are skipped. Item tokens are arbitrary
//! non-whitespace strings mapped to dense ids in first-seen order; `k` is
//! taken from the first data line.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use rand::seq::{index, IndexedRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

use crate::error::{Error, Result};
use crate::pairindex::pair_count;
use crate::ranking::{Dataset, Dictionary, ItemId, Labels, Ranking};

pub fn parse_rankings<R: BufRead>(reader: R) -> Result<Dataset> {
    let mut dictionary = Dictionary::new();
    let mut labels: Vec<String> = Vec::new();
    let mut seen_labels: HashSet<String> = HashSet::new();
    let mut rankings: Vec<Ranking> = Vec::new();
    let mut k: Option<usize> = None;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            cause: e.to_string(),
        })?;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (label, rest) = trimmed.split_once('\t').ok_or_else(|| Error::Parse {
            line: line_no,
            cause: "missing tab between ranking id and items".into(),
        })?;
        let label = label.trim();
        if label.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                cause: "empty ranking id".into(),
            });
        }
        let tokens: Vec<&str> = rest.split_whitespace().collect();
        if tokens.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                cause: "ranking has no items".into(),
            });
        }
        let expected = *k.get_or_insert(tokens.len());
        if tokens.len() != expected {
            return Err(Error::InconsistentK {
                line: line_no,
                expected,
                got: tokens.len(),
            });
        }
        let mut line_items = HashSet::with_capacity(tokens.len());
        if let Some(dup) = tokens.iter().find(|t| !line_items.insert(**t)) {
            return Err(Error::DuplicateItemInLine {
                line: line_no,
                item: (*dup).to_owned(),
            });
        }
        if !seen_labels.insert(label.to_owned()) {
            return Err(Error::DuplicateRankingLabel {
                line: line_no,
                label: label.to_owned(),
            });
        }
        let items: Vec<ItemId> = tokens.iter().map(|t| dictionary.get_or_insert(t)).collect();
        rankings.push(Ranking::new(rankings.len() as u32, items)?);
        labels.push(label.to_owned());
    }

    Dataset::new(rankings)?.with_labels(Labels {
        rankings: labels,
        items: dictionary,
    })
}

pub fn parse_rankings_str(text: &str) -> Result<Dataset> {
    parse_rankings(text.as_bytes())
}

/// Writes `dataset` in the rankings file format, using its labels when present.
pub fn write_rankings<W: Write>(dataset: &Dataset, mut out: W) -> std::io::Result<()> {
    let mut line = String::new();
    for r in dataset.iter() {
        line.clear();
        line.push_str(&dataset.ranking_label(r.id()));
        line.push('\t');
        for (pos, &item) in r.items().iter().enumerate() {
            if pos > 0 {
                line.push(' ');
            }
            line.push_str(&dataset.item_label(item));
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    out.flush()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Popularity {
    Uniform,
    Zipf(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    pub n: usize,
    pub k: usize,
    pub domain_size: usize,
    pub popularity: Popularity,
    pub seed: u64,
}

impl GeneratorSpec {
    /// Uniform item popularity: each item occurs in few rankings.
    pub fn yago_like(seed: u64) -> Self {
        GeneratorSpec {
            n: 25_000,
            k: 10,
            domain_size: 6_000,
            popularity: Popularity::Uniform,
            seed,
        }
    }

    /// Zipf(1) item popularity: a few items occur in many rankings.
    pub fn nyt_like(seed: u64) -> Self {
        GeneratorSpec {
            n: 50_000,
            k: 10,
            domain_size: 100_000,
            popularity: Popularity::Zipf(1.0),
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if self.domain_size < self.k {
            return Err(Error::DomainTooSmall {
                domain: self.domain_size,
                k: self.k,
            });
        }
        if self.domain_size > u32::MAX as usize {
            return Err(Error::InvalidParameter(
                "domain exceeds 32-bit item ids".into(),
            ));
        }
        if let Popularity::Zipf(s) = self.popularity {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "zipf exponent must be positive, got {s}"
                )));
            }
        }
        Ok(())
    }
}

/// Draws `spec.n` rankings of `spec.k` distinct items. Item `i` is the
/// `(i+1)`-th most popular under the Zipf law; rank order is the draw order.
pub fn generate(spec: &GeneratorSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let zipf = match spec.popularity {
        Popularity::Zipf(s) => Some(
            Zipf::new(spec.domain_size as f64, s)
                .map_err(|e| Error::InvalidParameter(e.to_string()))?,
        ),
        Popularity::Uniform => None,
    };
    let mut rankings = Vec::with_capacity(spec.n);
    let mut items: Vec<ItemId> = Vec::with_capacity(spec.k);
    for id in 0..spec.n {
        items.clear();
        match &zipf {
            None => items.extend(
                index::sample(&mut rng, spec.domain_size, spec.k)
                    .into_iter()
                    .map(|i| ItemId(i as u32)),
            ),
            Some(zipf) => {
                while items.len() < spec.k {
                    let item = ItemId(zipf.sample(&mut rng) as u32 - 1);
                    if !items.contains(&item) {
                        items.push(item);
                    }
                }
            }
        }
        rankings.push(Ranking::new(id as u32, items.clone())?);
    }
    Dataset::new(rankings)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryMode {
    /// Copy a random dataset ranking, apply adjacent swaps, then replace items.
    Perturbed { swaps: usize, replacements: usize },
    /// Fresh uniformly random k-subsets of the dataset's domain.
    UniformRandom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryWorkloadSpec {
    pub count: usize,
    pub mode: QueryMode,
    pub seed: u64,
}

impl QueryWorkloadSpec {
    pub fn perturbed(count: usize, swaps: usize, replacements: usize, seed: u64) -> Self {
        QueryWorkloadSpec {
            count,
            mode: QueryMode::Perturbed {
                swaps,
                replacements,
            },
            seed,
        }
    }
}

/// Builds a query workload. Perturbed queries carry the id of their source
/// ranking; uniform random queries are numbered from 0.
///
/// When `swaps <= k / 2` the swapped adjacent positions are disjoint, so a
/// query with no replacements lies at distance exactly `swaps` from its source.
pub fn make_queries(dataset: &Dataset, spec: &QueryWorkloadSpec) -> Result<Vec<Ranking>> {
    let k = dataset.k();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let domain = dataset.domain();
    let mut queries = Vec::with_capacity(spec.count);
    match spec.mode {
        QueryMode::Perturbed {
            swaps,
            replacements,
        } => {
            if swaps + replacements > pair_count(k) + k {
                return Err(Error::InvalidParameter(format!(
                    "{swaps} swaps + {replacements} replacements exceed {} for k = {k}",
                    pair_count(k) + k
                )));
            }
            for _ in 0..spec.count {
                let source = dataset
                    .rankings()
                    .choose(&mut rng)
                    .ok_or(Error::EmptyDataset)?;
                let mut items = source.items().to_vec();
                apply_swaps(&mut items, swaps, &mut rng);
                if domain.len() > k {
                    for _ in 0..replacements {
                        let pos = rng.random_range(0..k);
                        let fresh = loop {
                            let candidate = domain[rng.random_range(0..domain.len())];
                            if !items.contains(&candidate) {
                                break candidate;
                            }
                        };
                        items[pos] = fresh;
                    }
                }
                queries.push(Ranking::new(source.id(), items)?);
            }
        }
        QueryMode::UniformRandom => {
            for id in 0..spec.count {
                let items = index::sample(&mut rng, domain.len(), k)
                    .into_iter()
                    .map(|i| domain[i])
                    .collect();
                queries.push(Ranking::new(id as u32, items)?);
            }
        }
    }
    Ok(queries)
}

fn apply_swaps(items: &mut [ItemId], swaps: usize, rng: &mut ChaCha8Rng) {
    let k = items.len();
    if k < 2 {
        return;
    }
    if 2 * swaps <= k {
        // Choose `swaps` sorted slots out of `k - swaps`; shifting the i-th by i
        // yields start positions at least two apart.
        let mut slots: Vec<usize> = index::sample(rng, k - swaps, swaps).into_vec();
        slots.sort_unstable();
        for (i, slot) in slots.into_iter().enumerate() {
            let p = slot + i;
            items.swap(p, p + 1);
        }
    } else {
        for _ in 0..swaps {
            let p = rng.random_range(0..k - 1);
            items.swap(p, p + 1);
        }
    }
}
