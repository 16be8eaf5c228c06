//! Python bindings: a `Record` class plus module-level crosswalk, LPAP and
//! ingestion functions. Structured reports cross the boundary as JSON
//! strings so Python callers can `json.loads` them directly.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use xwalk_core::prelude::{
    add_value, builtin_registry, builtin_table, flatten, from_dc, get_values, join_path,
    parse_canonical_with, parse_path, parse_xml, serialize_canonical, serialize_oai_dc,
    strict_check, to_dc, validate_lpap, Error, IngestOutcome, LanguageFacts, LpapRecord, Record,
    SchemaId,
};

fn py_err(err: Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

/// A metadata record bound to one schema.
#[pyclass(name = "Record")]
#[derive(Clone)]
struct PyRecord {
    inner: Record,
}

#[pymethods]
impl PyRecord {
    #[new]
    fn new(schema: &str) -> Self {
        PyRecord {
            inner: Record::new(schema),
        }
    }

    /// Parse a canonical JSON document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyRecord {
            inner: parse_canonical_with(text, &builtin_registry()).map_err(py_err)?,
        })
    }

    /// Parse a generic XML document for the given schema.
    #[staticmethod]
    fn from_xml(text: &str, schema: &str) -> PyResult<Self> {
        Ok(PyRecord {
            inner: parse_xml(text, schema).map_err(py_err)?,
        })
    }

    #[getter]
    fn schema(&self) -> String {
        self.inner.schema.as_str().to_string()
    }

    /// Append a value at a '/'-joined element path; returns a new record.
    #[pyo3(signature = (path, value, lang=None))]
    fn add_value(&self, path: &str, value: &str, lang: Option<&str>) -> PyResult<Self> {
        let path = parse_path(path).map_err(py_err)?;
        Ok(PyRecord {
            inner: add_value(&self.inner, &path, value, lang.map(str::to_string))
                .map_err(py_err)?,
        })
    }

    fn get_values(&self, path: &str) -> PyResult<Vec<String>> {
        let path = parse_path(path).map_err(py_err)?;
        Ok(get_values(&self.inner, &path))
    }

    /// All nodes in document order as (path, value-or-None) pairs.
    fn flatten(&self) -> Vec<(String, Option<String>)> {
        flatten(&self.inner)
            .into_iter()
            .map(|e| (join_path(&e.path), e.value))
            .collect()
    }

    fn to_json(&self) -> String {
        serialize_canonical(&self.inner)
    }

    /// Serialize a DC record as an oai_dc XML fragment.
    fn to_oai_dc(&self) -> PyResult<String> {
        serialize_oai_dc(&self.inner).map_err(py_err)
    }

    /// Paths present in the record but absent from its schema.
    fn strict_check(&self) -> PyResult<Vec<String>> {
        Ok(strict_check(&builtin_registry(), &self.inner)
            .map_err(py_err)?
            .into_iter()
            .map(|f| join_path(&f.path))
            .collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Record(schema={:?}, leaves={})",
            self.inner.schema.as_str(),
            flatten(&self.inner).iter().filter(|e| e.value.is_some()).count()
        )
    }
}

/// (id, name, element count) for each built-in schema.
#[pyfunction]
fn list_schemas() -> Vec<(String, String, usize)> {
    builtin_registry()
        .schemas()
        .iter()
        .map(|s| (s.id.as_str().to_string(), s.name.clone(), s.elements().len()))
        .collect()
}

/// '/'-joined element paths of one schema.
#[pyfunction]
fn list_elements(schema: &str) -> PyResult<Vec<String>> {
    let registry = builtin_registry();
    Ok(xwalk_core::schema_registry::list_elements(&registry, &schema.into())
        .map_err(py_err)?
        .iter()
        .map(|e| e.path_str())
        .collect())
}

/// DC targets of one source element as (term, qualifier-or-None) pairs.
#[pyfunction]
fn map_element(schema: &str, path: &str) -> PyResult<Vec<(String, Option<String>)>> {
    let path = parse_path(path).map_err(py_err)?;
    Ok(xwalk_core::crosswalk::map_element(&builtin_table(), &schema.into(), &path))
}

/// Source paths of one schema feeding a DC target.
#[pyfunction]
#[pyo3(signature = (term, qualifier, schema))]
fn reverse_map(term: &str, qualifier: Option<String>, schema: &str) -> Vec<String> {
    xwalk_core::crosswalk::reverse_map(&builtin_table(), term, &qualifier, &schema.into())
        .into_iter()
        .map(|p| join_path(&p))
        .collect()
}

/// Crosswalk a record to a target schema through the DC pivot.
/// Returns (record, loss JSON, provenance JSON).
#[pyfunction]
fn transform(record: &PyRecord, to: &str) -> PyResult<(PyRecord, String, String)> {
    let result = xwalk_core::crosswalk::transform(
        &builtin_table(),
        &builtin_registry(),
        &record.inner,
        &to.into(),
    )
    .map_err(py_err)?;
    Ok((
        PyRecord {
            inner: result.output,
        },
        serde_json::to_string(&result.loss).unwrap(),
        serde_json::to_string(&result.provenance).unwrap(),
    ))
}

/// Coverage report JSON for the built-in crosswalk table.
#[pyfunction]
fn coverage_report() -> PyResult<String> {
    let report = xwalk_core::crosswalk::coverage_report(&builtin_table(), &builtin_registry()).map_err(py_err)?;
    Ok(serde_json::to_string(&report).unwrap())
}

/// DC targets every listed schema can populate.
#[pyfunction]
fn shared_terms(schemas: Vec<String>) -> Vec<String> {
    let ids: Vec<SchemaId> = schemas.into_iter().map(SchemaId::new).collect();
    xwalk_core::crosswalk::shared_terms(&builtin_table(), &ids).into_iter().collect()
}

/// Leaf elements of one schema with no crosswalk rule.
#[pyfunction]
fn unique_elements(schema: &str) -> PyResult<Vec<String>> {
    Ok(xwalk_core::crosswalk::unique_elements(&builtin_table(), &builtin_registry(), &schema.into())
        .map_err(py_err)?
        .iter()
        .map(|e| e.path_str())
        .collect())
}

/// Build a language record (JSON) from a DC record plus facts JSON.
#[pyfunction]
#[pyo3(signature = (dc, facts=None))]
fn lpap_from_dc(dc: &PyRecord, facts: Option<&str>) -> PyResult<String> {
    let facts: LanguageFacts = match facts {
        Some(text) => serde_json::from_str(text)
            .map_err(|e| PyValueError::new_err(format!("facts: {e}")))?,
        None => LanguageFacts::default(),
    };
    let record = from_dc(&dc.inner, &facts).map_err(py_err)?;
    Ok(serde_json::to_string(&record).unwrap())
}

/// Export a language record (JSON) to a DC record.
#[pyfunction]
fn lpap_to_dc(lpap: &str) -> PyResult<PyRecord> {
    let record: LpapRecord =
        serde_json::from_str(lpap).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let record = record.normalize().map_err(py_err)?;
    Ok(PyRecord {
        inner: to_dc(&record),
    })
}

/// FAIR report JSON for a language record (JSON).
#[pyfunction]
fn lpap_validate(lpap: &str) -> PyResult<String> {
    let record: LpapRecord =
        serde_json::from_str(lpap).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let record = record.normalize().map_err(py_err)?;
    Ok(serde_json::to_string(&validate_lpap(&record)).unwrap())
}

/// Ingest a directory of record files. Returns (filename, status, detail)
/// triples where status is "record", "error" or "skipped"; for records the
/// detail is canonical JSON.
#[pyfunction]
fn ingest_dir(path: &str, schema: &str) -> PyResult<Vec<(String, String, String)>> {
    let results = xwalk_core::harvest::ingest_dir(std::path::Path::new(path), &schema.into())
        .map_err(py_err)?;
    Ok(results
        .into_iter()
        .map(|(name, outcome)| match outcome {
            IngestOutcome::Record(r) => (name, "record".to_string(), serialize_canonical(&r)),
            IngestOutcome::Error(e) => (name, "error".to_string(), e),
            IngestOutcome::Skipped(s) => (name, "skipped".to_string(), s),
        })
        .collect())
}

#[pymodule]
fn xwalk_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRecord>()?;
    m.add_function(wrap_pyfunction!(list_schemas, m)?)?;
    m.add_function(wrap_pyfunction!(list_elements, m)?)?;
    m.add_function(wrap_pyfunction!(map_element, m)?)?;
    m.add_function(wrap_pyfunction!(reverse_map, m)?)?;
    m.add_function(wrap_pyfunction!(transform, m)?)?;
    m.add_function(wrap_pyfunction!(coverage_report, m)?)?;
    m.add_function(wrap_pyfunction!(shared_terms, m)?)?;
    m.add_function(wrap_pyfunction!(unique_elements, m)?)?;
    m.add_function(wrap_pyfunction!(lpap_from_dc, m)?)?;
    m.add_function(wrap_pyfunction!(lpap_to_dc, m)?)?;
    m.add_function(wrap_pyfunction!(lpap_validate, m)?)?;
    m.add_function(wrap_pyfunction!(ingest_dir, m)?)?;
    Ok(())
}
