//! Python bindings: an immutable `Network` class plus the free-standing
//! mutual-information helpers.

use std::path::PathBuf;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use reachnet::info::{self, rank_metrics};
use reachnet::io::{write_schedule, Schedule};
use reachnet::performance::{default_bin_count, delays};
use reachnet::synth::LayerWidth;
use reachnet::{
    bin_by_metric, estrada_rho, generate_dag, metric_suite, prune_isolated, reachability_table,
    rh_global, rh_local_all, simulate_delays, topological_order, weakly_connected_components,
    ActivityNetwork, DelayKind, DelayVector, FrequencyMatrix, GeneratorConfig, LogBase,
    MetricName, NoiseModel, PropagationConfig,
};

fn value_error(err: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn parse_delay(kind: &str) -> Result<DelayKind, String> {
    match kind {
        "start" | "start_delay" => Ok(DelayKind::Start),
        "end" | "end_delay" => Ok(DelayKind::End),
        other => Err(format!("unknown delay `{other}`, expected start or end")),
    }
}

fn parse<T: std::str::FromStr>(text: &str) -> PyResult<T>
where
    T::Err: std::fmt::Display,
{
    text.parse().map_err(value_error)
}

/// A validated activity DAG.
#[pyclass(frozen, module = "reachnet_py")]
struct Network {
    inner: ActivityNetwork,
}

impl Network {
    fn delay_vector(&self, kind: &str) -> PyResult<DelayVector> {
        delays(&self.inner, parse_delay(kind).map_err(value_error)?).map_err(value_error)
    }
}

#[pymethods]
impl Network {
    /// Reads activity and dependency CSV files. Isolated activities are
    /// removed unless `prune` is false.
    #[staticmethod]
    #[pyo3(signature = (activities, dependencies, prune = true))]
    fn from_csv(activities: PathBuf, dependencies: PathBuf, prune: bool) -> PyResult<Self> {
        let net = Schedule::read(&activities, &dependencies)
            .and_then(|s| s.build())
            .map_err(value_error)?;
        let inner = if prune {
            prune_isolated(&net).map_err(value_error)?
        } else {
            net
        };
        Ok(Self { inner })
    }

    /// Network on nodes `0..n` with the given `(source, target)` edges.
    #[staticmethod]
    fn from_edges(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        ActivityNetwork::from_edges(n, &edges)
            .map(|inner| Self { inner })
            .map_err(value_error)
    }

    /// Seeded layered project with planned dates only.
    #[staticmethod]
    #[pyo3(signature = (layers = 40, width = 17, edge_probability = 0.0215, skip_depth = 3, seed = 42, min_duration = 1, max_duration = 10, noise = "two-point:0.05:20"))]
    #[allow(clippy::too_many_arguments)]
    fn generate(
        layers: usize,
        width: usize,
        edge_probability: f64,
        skip_depth: usize,
        seed: u64,
        min_duration: u32,
        max_duration: u32,
        noise: &str,
    ) -> PyResult<Self> {
        let config = GeneratorConfig {
            layer_count: layers,
            layer_width: LayerWidth::Fixed(width),
            edge_probability,
            skip_depth,
            seed,
            base_duration_days: [min_duration, max_duration],
            endogenous_noise: parse(noise)?,
        };
        generate_dag(&config)
            .map(|inner| Self { inner })
            .map_err(value_error)
    }

    /// Copy with actual dates filled in by the delay propagation model.
    #[pyo3(signature = (seed, noise = "two-point:0.05:20", slack_days = 1, clamp_negative = true))]
    fn simulate(&self, seed: u64, noise: &str, slack_days: u32, clamp_negative: bool) -> PyResult<Self> {
        let noise: NoiseModel = parse(noise)?;
        let config = PropagationConfig {
            slack_days,
            clamp_negative,
        };
        simulate_delays(&self.inner, &config, &noise, seed)
            .map(|inner| Self { inner })
            .map_err(value_error)
    }

    /// Writes `activities.csv` and `dependencies.csv` into `directory`.
    fn write_csv(&self, directory: PathBuf) -> PyResult<()> {
        write_schedule(&self.inner, &directory).map_err(value_error)
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn __len__(&self) -> usize {
        self.inner.node_count()
    }

    fn __repr__(&self) -> String {
        format!(
            "Network(nodes={}, edges={})",
            self.inner.node_count(),
            self.inner.edge_count()
        )
    }

    /// Activity ids in index order.
    fn ids(&self) -> Vec<String> {
        self.inner.ids().map(str::to_string).collect()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().to_vec()
    }

    fn topological_order(&self) -> PyResult<Vec<usize>> {
        topological_order(&self.inner).map_err(value_error)
    }

    /// `(component_count, largest_component_size, membership)`.
    fn components(&self) -> (usize, usize, Vec<usize>) {
        let wcc = weakly_connected_components(&self.inner);
        (wcc.component_count, wcc.largest_component_size, wcc.membership)
    }

    /// `(descendants, ancestors)` counts per node.
    fn reachability(&self) -> (Vec<usize>, Vec<usize>) {
        let table = reachability_table(&self.inner);
        (table.descendants().to_vec(), table.ancestors().to_vec())
    }

    fn rh_global(&self) -> f64 {
        rh_global(&self.inner).value
    }

    fn rh_local(&self, node: usize) -> PyResult<f64> {
        reachnet::rh_local(&self.inner, node).map_err(value_error)
    }

    fn rh_local_all(&self, py: Python<'_>) -> Vec<f64> {
        py.detach(|| rh_local_all(&self.inner).values)
    }

    fn estrada_rho(&self) -> PyResult<f64> {
        estrada_rho(&self.inner).map(|s| s.value).map_err(value_error)
    }

    /// All eight node metrics as `{name: values}`, in suite order.
    fn metric_suite<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let suite = py.detach(|| metric_suite(&self.inner));
        let out = PyDict::new(py);
        for m in suite {
            out.set_item(m.name.as_str(), m.values)?;
        }
        Ok(out)
    }

    /// Start delay in days per node; `None` where the actual date is missing.
    fn start_delay(&self) -> PyResult<Vec<Option<i64>>> {
        Ok(self.delay_vector("start")?.values)
    }

    fn end_delay(&self) -> PyResult<Vec<Option<i64>>> {
        Ok(self.delay_vector("end")?.values)
    }

    /// Delay statistics in equal-width bins of `by`. Each bin is a dict with
    /// `lo, hi, count, mean, median, q25, q75, q16, q84`.
    #[pyo3(signature = (by = "local_rh", delay = "start", n_bins = None))]
    fn bins<'py>(
        &self,
        py: Python<'py>,
        by: &str,
        delay: &str,
        n_bins: Option<usize>,
    ) -> PyResult<Bound<'py, PyList>> {
        let name: MetricName = parse(by)?;
        let target = self.delay_vector(delay)?;
        let suite = py.detach(|| metric_suite(&self.inner));
        let metric = suite
            .into_iter()
            .find(|m| m.name == name)
            .expect("suite holds every metric");
        let n_bins = n_bins.unwrap_or_else(|| {
            let valid: Vec<f64> = metric
                .values
                .iter()
                .zip(&target.values)
                .filter(|(_, d)| d.is_some())
                .map(|(&x, _)| x)
                .collect();
            default_bin_count(&valid)
        });
        let stats = bin_by_metric(&metric.values, &target, n_bins).map_err(value_error)?;
        let out = PyList::empty(py);
        for b in stats.bins {
            let d = PyDict::new(py);
            d.set_item("lo", b.lo)?;
            d.set_item("hi", b.hi)?;
            d.set_item("count", b.count)?;
            d.set_item("mean", b.mean)?;
            d.set_item("median", b.median)?;
            d.set_item("q25", b.q25)?;
            d.set_item("q75", b.q75)?;
            d.set_item("q16", b.q16)?;
            d.set_item("q84", b.q84)?;
            out.append(d)?;
        }
        Ok(out)
    }

    /// Mutual information of every metric with the delay target, as
    /// `[(metric, mi, rank)]` in suite order.
    #[pyo3(signature = (delay = "start", n_bins = None, log_base = "e"))]
    fn benchmark(
        &self,
        py: Python<'_>,
        delay: &str,
        n_bins: Option<usize>,
        log_base: &str,
    ) -> PyResult<Vec<(String, f64, usize)>> {
        let base: LogBase = parse(log_base)?;
        let target = self.delay_vector(delay)?;
        let suite = py.detach(|| metric_suite(&self.inner));
        let report = rank_metrics(&suite, &target, n_bins, base).map_err(value_error)?;
        Ok(report
            .entries
            .into_iter()
            .map(|e| (e.metric.to_string(), e.mi, e.rank))
            .collect())
    }
}

/// Plug-in mutual information of a joint count matrix.
#[pyfunction]
#[pyo3(signature = (counts, log_base = "e"))]
fn mutual_information(counts: Vec<Vec<u64>>, log_base: &str) -> PyResult<f64> {
    let cols = counts.first().map_or(0, Vec::len);
    if counts.iter().any(|r| r.len() != cols) {
        return Err(PyValueError::new_err("count matrix rows differ in length"));
    }
    Ok(info::mutual_information(&FrequencyMatrix::from_counts(counts), parse(log_base)?))
}

/// Joint equal-width histogram of `metric` against `delays` (None entries
/// are skipped). Defaults to `floor(sqrt(valid))` bins per axis.
#[pyfunction]
#[pyo3(signature = (metric, delays, n_bins = None))]
fn frequency_matrix(
    metric: Vec<f64>,
    delays: Vec<Option<i64>>,
    n_bins: Option<usize>,
) -> PyResult<Vec<Vec<u64>>> {
    let target = DelayVector {
        kind: DelayKind::Start,
        values: delays,
    };
    info::frequency_matrix(&metric, &target, n_bins)
        .map(|m| m.to_rows())
        .map_err(value_error)
}

#[pymodule]
fn reachnet_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Network>()?;
    m.add_function(wrap_pyfunction!(mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(frequency_matrix, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delay_names() {
        assert_eq!(parse_delay("start"), Ok(DelayKind::Start));
        assert_eq!(parse_delay("end_delay"), Ok(DelayKind::End));
        assert!(parse_delay("middle").is_err());
    }
}
