//! Python bindings for the negotiation simulator.
//!
//! Exposes the catalog, persona bank, episode sessions, heuristic benchmark
//! runs, and the structured-action parser. Composite values cross into
//! Python as plain dicts/lists via JSON.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use haggle_core::buyer::BuyerConfig;
use haggle_core::catalog::{offer_bounds, sample_bundle};
use haggle_core::engine::{EpisodeKey, SellerAction, Session, StepResult};
use haggle_core::error::Error;
use haggle_core::eval::{bootstrap_ci, run_benchmark, summarize, BootstrapSettings, Metric, RunSettings};
use haggle_core::persona::generate_bank;
use haggle_core::policy::heuristics::{
    ConcessionParams, ConcessionPolicy, RandomPolicy, RandomPolicyParams,
};
use haggle_core::policy::llm::{parse_action as core_parse_action, render_prompt, ParseResult, PromptVersion};
use haggle_core::policy::SellerPolicy;
use haggle_core::rng::substream;
use haggle_core::trace::read_trace;

fn py_err(err: Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

/// Convert any serializable value into a Python object via JSON.
fn to_py<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value)
        .map_err(|e| PyValueError::new_err(format!("serialization failed: {e}")))?;
    let json = py.import("json")?;
    Ok(json.call_method1("loads", (text,))?.unbind())
}

/// The fixed customization catalog.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Catalog {
    inner: haggle_core::catalog::Catalog,
}

#[pymethods]
impl Catalog {
    /// The built-in 20-option, 11-dimension catalog.
    #[staticmethod]
    fn default() -> Catalog {
        Catalog { inner: haggle_core::catalog::Catalog::builtin_default() }
    }

    /// Load and validate a catalog JSON file.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Catalog> {
        let inner =
            haggle_core::catalog::Catalog::load(std::path::Path::new(path)).map_err(py_err)?;
        Ok(Catalog { inner })
    }

    fn option_count(&self) -> usize {
        self.inner.options().len()
    }

    fn dimensions(&self) -> Vec<String> {
        self.inner.dimensions().to_vec()
    }

    /// Shared heuristic offer bounds: {lower_usd, upper_usd, m_min, m_max}.
    fn offer_bounds(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &offer_bounds(&self.inner))
    }

    /// Draw the bundle of a given episode in the frozen stream.
    fn sample_bundle(&self, master_seed: u64, episode_index: u64) -> Bundle {
        let mut rng = substream(master_seed, "bundle", &[episode_index]);
        Bundle { inner: sample_bundle(&self.inner, &mut rng) }
    }
}

/// One sampled customization bundle.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Bundle {
    inner: haggle_core::catalog::Bundle,
}

#[pymethods]
impl Bundle {
    #[getter]
    fn total_msrp_delta_usd(&self) -> f64 {
        self.inner.total_msrp_delta_usd
    }

    #[getter]
    fn implementation_cost_usd(&self) -> f64 {
        self.inner.implementation_cost_usd
    }

    #[getter]
    fn aesthetic_proxy(&self) -> f64 {
        self.inner.aesthetic_proxy
    }

    fn option_keys(&self) -> Vec<String> {
        self.inner.selected.iter().map(|o| o.key.clone()).collect()
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner)
    }
}

/// A frozen persona bank.
#[pyclass]
struct PersonaBank {
    inner: haggle_core::persona::PersonaBank,
}

#[pymethods]
impl PersonaBank {
    /// Generate a bank of `n` personas from a master seed.
    #[staticmethod]
    #[pyo3(signature = (n, seed, stratify=true))]
    fn generate(n: u64, seed: u64, stratify: bool) -> PyResult<PersonaBank> {
        Ok(PersonaBank { inner: generate_bank(n, seed, stratify).map_err(py_err)? })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<PersonaBank> {
        let inner = haggle_core::persona::PersonaBank::load(std::path::Path::new(path))
            .map_err(py_err)?;
        Ok(PersonaBank { inner })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        self.inner.save(std::path::Path::new(path)).map_err(py_err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Full persona record (observable and hidden blocks) as a dict.
    fn persona(&self, py: Python<'_>, index: usize) -> PyResult<Py<PyAny>> {
        let record = self
            .inner
            .records
            .get(index)
            .ok_or_else(|| PyValueError::new_err(format!("index {index} out of range")))?;
        to_py(py, record)
    }
}

/// One live negotiation session from the frozen episode stream.
#[pyclass]
struct Episode {
    session: Session,
}

#[pymethods]
impl Episode {
    #[new]
    #[pyo3(signature = (catalog, bank, episode_index, master_seed, horizon=5))]
    fn new(
        catalog: &Catalog,
        bank: &PersonaBank,
        episode_index: u64,
        master_seed: u64,
        horizon: u32,
    ) -> PyResult<Episode> {
        let persona = bank
            .inner
            .records
            .get(episode_index as usize)
            .ok_or_else(|| PyValueError::new_err("episode_index exceeds bank size"))?
            .clone();
        let mut rng = substream(master_seed, "bundle", &[episode_index]);
        let bundle = sample_bundle(&catalog.inner, &mut rng);
        Ok(Episode {
            session: Session::new(
                persona,
                bundle,
                BuyerConfig::default(),
                horizon,
                EpisodeKey { master_seed, episode_index },
            ),
        })
    }

    /// Current seller-visible observation.
    fn observation(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.session.observation())
    }

    /// Render the LLM prompt ("v1" or "v2") for the current observation.
    fn render_prompt(&self, version: &str) -> PyResult<String> {
        let version = match version {
            "v1" => PromptVersion::V1,
            "v2" => PromptVersion::V2,
            other => return Err(PyValueError::new_err(format!("unknown version {other:?}"))),
        };
        Ok(render_prompt(&self.session.observation(), version))
    }

    fn is_terminal(&self) -> bool {
        self.session.is_terminal()
    }

    /// Apply a seller move ("offer" with a price, "accept", or "walkaway").
    /// Returns {"status": "continue", "observation": ...} or
    /// {"status": "terminal", "outcome": ...}.
    #[pyo3(signature = (r#move, price=None))]
    fn step(&mut self, py: Python<'_>, r#move: &str, price: Option<f64>) -> PyResult<Py<PyAny>> {
        let action = match (r#move, price) {
            ("offer", Some(p)) => SellerAction::Offer { price_offer_usd: p },
            ("offer", None) => {
                return Err(PyValueError::new_err("offer requires a price"));
            }
            ("accept", _) => SellerAction::Accept,
            ("walkaway", _) => SellerAction::Walkaway,
            (other, _) => {
                return Err(PyValueError::new_err(format!("unknown move {other:?}")));
            }
        };
        match self.session.step(action).map_err(py_err)? {
            StepResult::Continue(obs) => {
                let dict = PyDict::new(py);
                dict.set_item("status", "continue")?;
                dict.set_item("observation", to_py(py, &obs)?)?;
                Ok(dict.unbind().into())
            }
            StepResult::Terminal(outcome) => {
                let dict = PyDict::new(py);
                dict.set_item("status", "terminal")?;
                dict.set_item("outcome", to_py(py, &outcome)?)?;
                Ok(dict.unbind().into())
            }
        }
    }
}

/// Run the frozen episode stream under a heuristic policy and return the
/// metrics summary. Writes a JSONL trace when `out` is given.
#[pyfunction]
#[pyo3(signature = (policy, episodes, seed, horizon=5, concurrency=1, out=None))]
fn run_heuristic_benchmark(
    py: Python<'_>,
    policy: &str,
    episodes: u64,
    seed: u64,
    horizon: u32,
    concurrency: usize,
    out: Option<String>,
) -> PyResult<Py<PyAny>> {
    let catalog = haggle_core::catalog::Catalog::builtin_default();
    let bank = generate_bank(episodes, seed, true).map_err(py_err)?;
    let bounds = offer_bounds(&catalog);
    let policy: Box<dyn SellerPolicy> = match policy {
        "random" => Box::new(RandomPolicy::new(RandomPolicyParams::new(bounds)).map_err(py_err)?),
        "concession" => {
            Box::new(ConcessionPolicy::new(ConcessionParams::new(bounds)).map_err(py_err)?)
        }
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown heuristic policy {other:?} (expected \"random\" or \"concession\")"
            )))
        }
    };
    let settings = RunSettings {
        episodes,
        master_seed: seed,
        horizon,
        concurrency,
        out: out.map(std::path::PathBuf::from),
        ..RunSettings::default()
    };
    let records =
        run_benchmark(policy.as_ref(), &catalog, &bank, &BuyerConfig::default(), &settings)
            .map_err(py_err)?;
    to_py(py, &summarize(&records).map_err(py_err)?)
}

/// Summarize a previously written trace file.
#[pyfunction]
fn summarize_trace(py: Python<'_>, path: &str) -> PyResult<Py<PyAny>> {
    let (_, records) = read_trace(std::path::Path::new(path)).map_err(py_err)?;
    to_py(py, &summarize(&records).map_err(py_err)?)
}

/// Percentile bootstrap interval for "deal_rate" or "avg_profit" over a
/// trace file. Returns (lower, upper).
#[pyfunction]
fn trace_bootstrap_ci(path: &str, metric: &str) -> PyResult<(f64, f64)> {
    let metric = match metric {
        "deal_rate" => Metric::DealRate,
        "avg_profit" => Metric::AvgProfit,
        other => return Err(PyValueError::new_err(format!("unknown metric {other:?}"))),
    };
    let (_, records) = read_trace(std::path::Path::new(path)).map_err(py_err)?;
    let ci = bootstrap_ci(&records, metric, &BootstrapSettings::default()).map_err(py_err)?;
    Ok((ci.lower, ci.upper))
}

/// Strict structured-action parse of a model reply. Returns a dict with
/// either the action fields or the invalid category.
#[pyfunction]
fn parse_action(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    let dict = PyDict::new(py);
    match core_parse_action(text) {
        ParseResult::Action { action, reason } => {
            dict.set_item("valid", true)?;
            match action {
                SellerAction::Offer { price_offer_usd } => {
                    dict.set_item("move", "offer")?;
                    dict.set_item("price_offer_usd", price_offer_usd)?;
                }
                SellerAction::Accept => dict.set_item("move", "accept")?,
                SellerAction::Walkaway => dict.set_item("move", "walkaway")?,
            }
            if let Some(reason) = reason {
                dict.set_item("reason", reason)?;
            }
        }
        ParseResult::Invalid(kind) => {
            dict.set_item("valid", false)?;
            let name = serde_json::to_value(kind)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_else(|| format!("{kind:?}"));
            dict.set_item("invalid", name)?;
        }
    }
    Ok(dict.unbind().into())
}

#[pymodule]
fn haggle(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Catalog>()?;
    m.add_class::<Bundle>()?;
    m.add_class::<PersonaBank>()?;
    m.add_class::<Episode>()?;
    m.add_function(wrap_pyfunction!(run_heuristic_benchmark, m)?)?;
    m.add_function(wrap_pyfunction!(summarize_trace, m)?)?;
    m.add_function(wrap_pyfunction!(trace_bootstrap_ci, m)?)?;
    m.add_function(wrap_pyfunction!(parse_action, m)?)?;
    Ok(())
}
