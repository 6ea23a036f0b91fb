//! Python bindings: a search engine over top-k rankings plus the distance
//! and sensitivity-model functions.

use std::fs::File;
use std::io::{BufReader, BufWriter};

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use topk_lsh::data::{self, GeneratorSpec, Popularity};
use topk_lsh::{distance, lshmodel, pairindex, Error, Method, QueryParams, Ranking, SearchEngine};

fn to_py(err: Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn ranking(items: &[u32]) -> PyResult<Ranking> {
    Ranking::from_ids(0, items).map_err(to_py)
}

/// A dataset of equal-length rankings with lazily built indices.
///
/// Ranking ids are positions in the input order.
#[pyclass(name = "Engine", module = "topk_lsh_py", frozen)]
struct PyEngine {
    inner: SearchEngine,
}

#[pymethods]
impl PyEngine {
    #[new]
    fn new(rankings: Vec<Vec<u32>>) -> PyResult<Self> {
        let rankings = rankings
            .iter()
            .enumerate()
            .map(|(id, items)| Ranking::from_ids(id as u32, items))
            .collect::<Result<Vec<_>, _>>()
            .map_err(to_py)?;
        let dataset = topk_lsh::Dataset::new(rankings).map_err(to_py)?;
        Ok(PyEngine {
            inner: SearchEngine::new(dataset),
        })
    }

    /// Reads a `label<TAB>item item ...` file.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let file = File::open(path).map_err(|e| PyIOError::new_err(format!("{path}: {e}")))?;
        let dataset = data::parse_rankings(BufReader::new(file)).map_err(to_py)?;
        Ok(PyEngine {
            inner: SearchEngine::new(dataset),
        })
    }

    /// Synthetic dataset; `dist` is "uniform" or "zipf".
    #[staticmethod]
    #[pyo3(signature = (n, k, domain, dist = "uniform", zipf_exponent = 1.0, seed = 0))]
    fn generate(
        n: usize,
        k: usize,
        domain: usize,
        dist: &str,
        zipf_exponent: f64,
        seed: u64,
    ) -> PyResult<Self> {
        let popularity = match dist {
            "uniform" => Popularity::Uniform,
            "zipf" => Popularity::Zipf(zipf_exponent),
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown distribution {other:?}"
                )))
            }
        };
        let spec = GeneratorSpec {
            n,
            k,
            domain_size: domain,
            popularity,
            seed,
        };
        let dataset = data::generate(&spec).map_err(to_py)?;
        Ok(PyEngine {
            inner: SearchEngine::new(dataset),
        })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        let file = File::create(path).map_err(|e| PyIOError::new_err(format!("{path}: {e}")))?;
        data::write_rankings(self.inner.dataset(), BufWriter::new(file))
            .map_err(|e| PyIOError::new_err(format!("{path}: {e}")))
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.dataset().k()
    }

    fn __len__(&self) -> usize {
        self.inner.dataset().len()
    }

    fn ranking(&self, id: u32) -> PyResult<Vec<u32>> {
        let r = self
            .inner
            .dataset()
            .get(id)
            .ok_or_else(|| PyValueError::new_err(format!("no ranking with id {id}")))?;
        Ok(r.items().iter().map(|i| i.0).collect())
    }

    /// Item labels of ranking `id`; ids survive a save/load round trip only as labels.
    fn item_labels(&self, id: u32) -> PyResult<Vec<String>> {
        let ds = self.inner.dataset();
        let r = ds
            .get(id)
            .ok_or_else(|| PyValueError::new_err(format!("no ranking with id {id}")))?;
        Ok(r.items().iter().map(|&i| ds.item_label(i)).collect())
    }

    fn label(&self, id: u32) -> String {
        self.inner.dataset().ranking_label(id)
    }

    /// Rankings within normalized distance `theta` of `q`, as `(id, distance)`
    /// pairs in id order. `l` defaults to the safe budget for the LSH methods.
    #[pyo3(signature = (q, theta, method = "oracle", l = None, seed = 0))]
    fn query(
        &self,
        q: Vec<u32>,
        theta: f64,
        method: &str,
        l: Option<usize>,
        seed: u64,
    ) -> PyResult<Vec<(u32, u32)>> {
        let method: Method = method.parse().map_err(to_py)?;
        let k = self.inner.dataset().k();
        let l = match l {
            Some(l) => l,
            None => pairindex::safe_pair_budget(k, theta * (k * k) as f64).max(1),
        };
        let params = QueryParams::new(theta, k, l, seed, method).map_err(to_py)?;
        let q = ranking(&q)?;
        let out = self.inner.search(&q, &params).map_err(to_py)?;
        Ok(out.results.iter().map(|h| (h.id, h.distance)).collect())
    }

    fn __repr__(&self) -> String {
        let ds = self.inner.dataset();
        format!("Engine(n={}, k={})", ds.len(), ds.k())
    }
}

/// Generalized Kendall's Tau with penalty 0 between two top-k lists.
#[pyfunction]
fn kendall_k0(a: Vec<u32>, b: Vec<u32>) -> PyResult<u32> {
    Ok(distance::kendall_k0(&ranking(&a)?, &ranking(&b)?))
}

#[pyfunction]
fn min_distance(k: usize, overlap: usize) -> u32 {
    distance::min_distance(k, overlap)
}

#[pyfunction]
fn min_overlap(k: usize, theta_d: f64) -> usize {
    distance::min_overlap(k, theta_d)
}

#[pyfunction]
fn p1_scheme1(k: usize, theta_d: f64) -> f64 {
    lshmodel::p1_scheme1(k, theta_d)
}

#[pyfunction]
fn p1_scheme2(k: usize, theta_d: f64) -> f64 {
    lshmodel::p1_scheme2(k, theta_d)
}

#[pyfunction]
fn candidate_probability(p1: f64, m: u32, l: u32) -> f64 {
    lshmodel::candidate_probability(p1, m, l)
}

#[pyfunction]
fn f_ratio(k: usize, theta_d: f64) -> f64 {
    lshmodel::f_ratio(k, theta_d)
}

#[pymodule]
fn topk_lsh_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEngine>()?;
    m.add_function(wrap_pyfunction!(kendall_k0, m)?)?;
    m.add_function(wrap_pyfunction!(min_distance, m)?)?;
    m.add_function(wrap_pyfunction!(min_overlap, m)?)?;
    m.add_function(wrap_pyfunction!(p1_scheme1, m)?)?;
    m.add_function(wrap_pyfunction!(p1_scheme2, m)?)?;
    m.add_function(wrap_pyfunction!(candidate_probability, m)?)?;
    m.add_function(wrap_pyfunction!(f_ratio, m)?)?;
    Ok(())
}
