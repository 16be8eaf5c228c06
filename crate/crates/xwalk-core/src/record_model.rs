//! Hierarchical metadata record instances, independent of serialization.
//!
//! Records are immutable values: every mutating operation returns a new
//! record and leaves its input untouched, so records are safe to share and
//! transform concurrently.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schema_registry::{join_path, Path, Registry, SchemaId};

/// One node of a record tree. A node may carry a value, children, or both
/// (mixed content is allowed in the model; validation polices it).
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ElementInstance {
    pub segment: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lang: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attrs: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<ElementInstance>,
}

impl ElementInstance {
    pub fn new(segment: impl Into<String>) -> Self {
        ElementInstance {
            segment: segment.into(),
            ..Default::default()
        }
    }

    pub fn with_value(segment: impl Into<String>, value: impl Into<String>) -> Self {
        ElementInstance {
            segment: segment.into(),
            value: Some(value.into()),
            ..Default::default()
        }
    }
}

/// A metadata record instance in one registered schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub schema: SchemaId,
    pub roots: Vec<ElementInstance>,
}

impl Record {
    pub fn new(schema: impl Into<SchemaId>) -> Self {
        Record {
            schema: schema.into(),
            roots: Vec::new(),
        }
    }
}

/// One entry of a flattened record: the full path plus the node's payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatEntry {
    pub path: Path,
    pub value: Option<String>,
    pub lang: Option<String>,
    pub attrs: BTreeMap<String, String>,
}

fn flatten_into(node: &ElementInstance, prefix: &[String], out: &mut Vec<FlatEntry>) {
    let mut path = prefix.to_vec();
    path.push(node.segment.clone());
    out.push(FlatEntry {
        path: path.clone(),
        value: node.value.clone(),
        lang: node.lang.clone(),
        attrs: node.attrs.clone(),
    });
    for child in &node.children {
        flatten_into(child, &path, out);
    }
}

/// Depth-first pre-order listing of every node with its full path.
pub fn flatten(record: &Record) -> Vec<FlatEntry> {
    let mut out = Vec::new();
    for root in &record.roots {
        flatten_into(root, &[], &mut out);
    }
    out
}

/// Values of every instance whose full path equals `path`, in document order.
pub fn get_values(record: &Record, path: &[String]) -> Vec<String> {
    flatten(record)
        .into_iter()
        .filter(|e| e.path == path)
        .filter_map(|e| e.value)
        .collect()
}

/// Add one value at `path`, creating intermediate containers as needed.
/// Returns a new record; the input is unmodified.
pub fn add_value(
    record: &Record,
    path: &[String],
    value: impl Into<String>,
    lang: Option<String>,
) -> Result<Record> {
    add_instance(record, path, Some(value.into()), lang, BTreeMap::new())
}

/// Like [`add_value`] but carries attributes, and permits a valueless leaf
/// when `value` is `None`.
pub fn add_instance(
    record: &Record,
    path: &[String],
    value: Option<String>,
    lang: Option<String>,
    attrs: BTreeMap<String, String>,
) -> Result<Record> {
    if path.is_empty() {
        return Err(Error::EmptyPath);
    }
    let mut out = record.clone();
    let leaf = ElementInstance {
        segment: path[path.len() - 1].clone(),
        value,
        lang,
        attrs,
        children: Vec::new(),
    };
    let mut nodes = &mut out.roots;
    for segment in &path[..path.len() - 1] {
        // Reuse the first existing container with this segment, else create one.
        let pos = nodes.iter().position(|n| &n.segment == segment);
        let idx = match pos {
            Some(i) => i,
            None => {
                nodes.push(ElementInstance::new(segment.clone()));
                nodes.len() - 1
            }
        };
        nodes = &mut nodes[idx].children;
    }
    nodes.push(leaf);
    Ok(out)
}

/// A path in a record that does not resolve in its schema definition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnknownPathFinding {
    /// Full path of the offending instance.
    pub path: Path,
    /// Zero-based position within the flattened record.
    pub position: usize,
}

/// Report every instance whose full path does not resolve in the registry.
/// An empty result means the record is fully conformant to its schema.
pub fn strict_check(registry: &Registry, record: &Record) -> Result<Vec<UnknownPathFinding>> {
    let schema = registry.schema(&record.schema)?;
    let mut findings = Vec::new();
    for (position, entry) in flatten(record).iter().enumerate() {
        if !schema.contains(&entry.path) {
            findings.push(UnknownPathFinding {
                path: entry.path.clone(),
                position,
            });
        }
    }
    Ok(findings)
}

/// Pretty path for messages.
pub fn path_display(path: &[String]) -> String {
    join_path(path)
}
