//! Benchmark grid runner: per (method, θ, l) cell, average candidates,
//! validated results, recall against the linear-scan oracle, and latency.

use std::io::Write;
use std::time::Duration;

use rayon::prelude::*;

use crate::distance::kendall_k0;
use crate::engine::SearchEngine;
use crate::error::{Error, Result};
use crate::pairindex::pair_count;
use crate::ranking::{Dataset, Method, QueryParams, Ranking, RankingId};

pub const CSV_HEADER: &str =
    "dataset,method,k,theta,l,queries,avg_candidates,avg_validated,recall,avg_query_us";

const WARMUP_QUERIES: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentGrid {
    pub methods: Vec<Method>,
    pub thetas: Vec<f64>,
    pub ls: Vec<usize>,
    pub query_count: usize,
    pub seed: u64,
    /// Run the queries of a cell on the rayon pool. Per-query timings are
    /// still measured, but are noisier than in sequential mode.
    pub parallel: bool,
}

impl ExperimentGrid {
    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.thetas.iter().find(|t| !(0.0..1.0).contains(*t)) {
            return Err(Error::InvalidParameter(format!("theta {t} outside [0, 1)")));
        }
        if self.ls.contains(&0) {
            return Err(Error::InvalidParameter("l must be positive".into()));
        }
        if self.ls.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidParameter(
                "l values must be sorted ascending".into(),
            ));
        }
        if self.methods.iter().any(|m| m.uses_l()) && self.ls.is_empty() {
            return Err(Error::InvalidParameter(
                "LSH methods need at least one l".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub dataset_label: String,
    pub method: Method,
    pub k: usize,
    pub theta: f64,
    /// Effective number of lookups; `None` for methods without `l`.
    pub l: Option<usize>,
    /// Set when the requested `l` exceeded `k(k-1)/2` and was clamped.
    pub l_clamped: bool,
    pub queries: usize,
    pub avg_candidates: f64,
    pub avg_validated: f64,
    pub recall: f64,
    pub avg_query_us: f64,
}

/// Ids of all rankings within `theta_d` of `q`, by linear scan.
pub fn ground_truth(dataset: &Dataset, q: &Ranking, theta_d: f64) -> Vec<RankingId> {
    let mut ids: Vec<RankingId> = dataset
        .iter()
        .filter(|r| f64::from(kendall_k0(r, q)) <= theta_d)
        .map(Ranking::id)
        .collect();
    ids.sort_unstable();
    ids
}

/// `|retrieved ∩ truth| / |truth|`, or 1 for an empty truth. Both slices ascending.
pub fn recall_of(retrieved: &[RankingId], truth: &[RankingId]) -> f64 {
    if truth.is_empty() {
        return 1.0;
    }
    let mut found = 0usize;
    let (mut x, mut y) = (0, 0);
    while x < retrieved.len() && y < truth.len() {
        match retrieved[x].cmp(&truth[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                found += 1;
                x += 1;
                y += 1;
            }
        }
    }
    found as f64 / truth.len() as f64
}

/// Ground truth per query and threshold, from one scan per query.
fn ground_truth_table(
    dataset: &Dataset,
    queries: &[Ranking],
    theta_ds: &[f64],
) -> Vec<Vec<Vec<RankingId>>> {
    let max_theta_d = theta_ds.iter().copied().fold(0.0, f64::max);
    queries
        .par_iter()
        .map(|q| {
            let near: Vec<(RankingId, u32)> = dataset
                .iter()
                .map(|r| (r.id(), kendall_k0(r, q)))
                .filter(|&(_, d)| f64::from(d) <= max_theta_d)
                .collect();
            theta_ds
                .iter()
                .map(|&t| {
                    let mut ids: Vec<RankingId> = near
                        .iter()
                        .filter(|&&(_, d)| f64::from(d) <= t)
                        .map(|&(id, _)| id)
                        .collect();
                    ids.sort_unstable();
                    ids
                })
                .collect()
        })
        .collect()
}

struct QueryStats {
    candidates: usize,
    validated: usize,
    recall: f64,
    elapsed: Duration,
}

pub fn run_grid(
    engine: &SearchEngine,
    label: &str,
    queries: &[Ranking],
    grid: &ExperimentGrid,
) -> Result<Vec<BenchRow>> {
    grid.validate()?;
    let dataset = engine.dataset();
    let k = dataset.k();
    if let Some(q) = queries.iter().find(|q| q.len() != k) {
        return Err(Error::KMismatch {
            expected: k,
            got: q.len(),
        });
    }
    let theta_ds: Vec<f64> = grid.thetas.iter().map(|t| t * (k * k) as f64).collect();
    let truth = ground_truth_table(dataset, queries, &theta_ds);
    let max_l = pair_count(k);

    let mut rows = Vec::new();
    for &method in &grid.methods {
        engine.prepare(method);
        let ls: Vec<Option<usize>> = if method.uses_l() {
            grid.ls.iter().map(|&l| Some(l)).collect()
        } else {
            vec![None]
        };
        for (ti, &theta) in grid.thetas.iter().enumerate() {
            for &requested_l in &ls {
                let l = requested_l.map(|l| l.min(max_l).max(1));
                let params = QueryParams::new(theta, k, l.unwrap_or(1), grid.seed, method)?;
                let run_one = |(qi, q): (usize, &Ranking)| -> Result<QueryStats> {
                    let out = engine.search(q, &params)?;
                    let retrieved = out.result_ids();
                    Ok(QueryStats {
                        candidates: out.candidates.len(),
                        validated: retrieved.len(),
                        recall: recall_of(&retrieved, &truth[qi][ti]),
                        elapsed: out.elapsed,
                    })
                };
                for q in queries.iter().take(WARMUP_QUERIES) {
                    engine.search(q, &params)?;
                }
                let stats: Vec<QueryStats> = if grid.parallel {
                    queries
                        .par_iter()
                        .enumerate()
                        .map(run_one)
                        .collect::<Result<_>>()?
                } else {
                    queries
                        .iter()
                        .enumerate()
                        .map(run_one)
                        .collect::<Result<_>>()?
                };
                rows.push(summarize(
                    label,
                    method,
                    k,
                    theta,
                    l,
                    requested_l != l,
                    &stats,
                ));
            }
        }
    }
    Ok(rows)
}

fn summarize(
    label: &str,
    method: Method,
    k: usize,
    theta: f64,
    l: Option<usize>,
    l_clamped: bool,
    stats: &[QueryStats],
) -> BenchRow {
    let n = stats.len().max(1) as f64;
    let mean = |f: &dyn Fn(&QueryStats) -> f64| stats.iter().map(f).sum::<f64>() / n;
    BenchRow {
        dataset_label: label.to_owned(),
        method,
        k,
        theta,
        l,
        l_clamped,
        queries: stats.len(),
        avg_candidates: mean(&|s| s.candidates as f64),
        avg_validated: mean(&|s| s.validated as f64),
        recall: if stats.is_empty() {
            1.0
        } else {
            mean(&|s| s.recall)
        },
        avg_query_us: mean(&|s| s.elapsed.as_secs_f64() * 1e6),
    }
}

/// Formats like C's `%.6g`: six significant digits, trailing zeros removed.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.5e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (5 - exp).max(0) as usize;
    strip_zeros(&format!("{:.*}", decimals, x)).to_owned()
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn csv_line(row: &BenchRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        row.dataset_label,
        row.method,
        row.k,
        format_sig6(row.theta),
        row.l.map(|l| l.to_string()).unwrap_or_default(),
        row.queries,
        format_sig6(row.avg_candidates),
        format_sig6(row.avg_validated),
        format_sig6(row.recall),
        format_sig6(row.avg_query_us),
    )
}

pub fn write_csv<W: Write>(rows: &[BenchRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", csv_line(row))?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate, make_queries, GeneratorSpec, Popularity, QueryWorkloadSpec};

    fn example() -> Dataset {
        Dataset::new(vec![
            Ranking::from_ids(1, &[2, 5, 4, 3]).unwrap(),
            Ranking::from_ids(2, &[1, 4, 7, 5]).unwrap(),
            Ranking::from_ids(3, &[0, 8, 7, 5]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn ground_truth_examples() {
        let ds = example();
        let q = Ranking::from_ids(0, &[8, 1, 0, 6]).unwrap();
        assert_eq!(ground_truth(&ds, &q, 9.0), vec![3]);
        assert_eq!(ground_truth(&ds, &q, 16.0), vec![1, 2, 3]);
        let t2 = ds.get(2).unwrap();
        assert!(ground_truth(&ds, t2, 0.0).contains(&2));
    }

    #[test]
    fn recall_examples() {
        assert_eq!(recall_of(&[1, 2], &[1, 2]), 1.0);
        assert_eq!(recall_of(&[1], &[1, 2]), 0.5);
        assert_eq!(recall_of(&[], &[]), 1.0);
        assert_eq!(recall_of(&[3, 4], &[1, 2]), 0.0);
    }

    #[test]
    fn sig6_formatting() {
        assert_eq!(format_sig6(0.1), "0.1");
        assert_eq!(format_sig6(1.0), "1");
        assert_eq!(format_sig6(0.0), "0");
        assert_eq!(format_sig6(123.456789), "123.457");
        assert_eq!(format_sig6(399.5), "399.5");
        assert_eq!(format_sig6(1234567.0), "1.23457e+06");
        assert_eq!(format_sig6(0.000012345678), "1.23457e-05");
        assert_eq!(format_sig6(0.999999), "0.999999");
        assert_eq!(format_sig6(0.9999996), "1");
        assert_eq!(format_sig6(999999.7), "1e+06");
    }

    fn small_setup() -> (SearchEngine, Vec<Ranking>) {
        let ds = generate(&GeneratorSpec {
            n: 2000,
            k: 10,
            domain_size: 400,
            popularity: Popularity::Uniform,
            seed: 8,
        })
        .unwrap();
        let queries = make_queries(&ds, &QueryWorkloadSpec::perturbed(10, 2, 1, 4)).unwrap();
        (SearchEngine::new(ds), queries)
    }

    #[test]
    fn grid_examples() {
        let (engine, queries) = small_setup();
        let grid = ExperimentGrid {
            methods: vec![Method::InvIn],
            thetas: vec![0.3],
            ls: vec![],
            query_count: 10,
            seed: 1,
            parallel: false,
        };
        let rows = run_grid(&engine, "t", &queries, &grid).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].recall, 1.0);
        assert_eq!(rows[0].l, None);

        let grid = ExperimentGrid {
            methods: vec![Method::Scheme1, Method::Scheme2],
            thetas: vec![0.1],
            ls: vec![1, 10],
            query_count: 10,
            seed: 1,
            parallel: true,
        };
        let rows = run_grid(&engine, "t", &queries, &grid).unwrap();
        assert_eq!(rows.len(), 4);
        let (s1, s2) = rows.split_at(2);
        for (a, b) in s1.iter().zip(s2) {
            assert!(b.avg_candidates <= a.avg_candidates);
            assert!(b.recall <= a.recall);
        }
        assert!(s1[1].recall >= s1[0].recall);
    }

    #[test]
    fn clamps_oversized_l() {
        let (engine, queries) = small_setup();
        let grid = ExperimentGrid {
            methods: vec![Method::Scheme1],
            thetas: vec![0.2],
            ls: vec![45, 60],
            query_count: 10,
            seed: 1,
            parallel: false,
        };
        let rows = run_grid(&engine, "t", &queries, &grid).unwrap();
        assert_eq!(rows[1].l, Some(45));
        assert!(rows[1].l_clamped && !rows[0].l_clamped);
        assert_eq!(rows[0].avg_candidates, rows[1].avg_candidates);
    }

    #[test]
    fn rejects_bad_grids() {
        let (engine, queries) = small_setup();
        let mut grid = ExperimentGrid {
            methods: vec![Method::Scheme1],
            thetas: vec![1.0],
            ls: vec![1],
            query_count: 10,
            seed: 1,
            parallel: false,
        };
        assert!(run_grid(&engine, "t", &queries, &grid).is_err());
        grid.thetas = vec![0.1];
        grid.ls = vec![3, 1];
        assert!(run_grid(&engine, "t", &queries, &grid).is_err());
        grid.ls = vec![1];
        let short = vec![Ranking::from_ids(0, &[1, 2]).unwrap()];
        assert!(matches!(
            run_grid(&engine, "t", &short, &grid),
            Err(Error::KMismatch { .. })
        ));
    }
}
