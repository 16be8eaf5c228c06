//! Bulk record acquisition: a minimal OAI-PMH harvesting client
//! (ListRecords with resumption tokens) and directory ingestion.

use std::time::Duration;

use crate::error::{Error, Result};
use crate::io_formats::{parse_canonical, parse_xml};
use crate::record_model::{ElementInstance, Record};
use crate::schema_registry::SchemaId;

/// Configuration for one harvest run.
#[derive(Debug, Clone)]
pub struct HarvestConfig {
    pub endpoint: String,
    pub metadata_prefix: String,
    pub from: Option<String>,
    pub set: Option<String>,
    pub max_records: Option<usize>,
    pub retry_limit: u32,
    pub backoff_base_millis: u64,
}

impl HarvestConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        HarvestConfig {
            endpoint: endpoint.into(),
            metadata_prefix: "oai_dc".to_string(),
            from: None,
            set: None,
            max_records: None,
            retry_limit: 3,
            backoff_base_millis: 500,
        }
    }

    fn validate(&self) -> Result<()> {
        let parsed = url::Url::parse(&self.endpoint)
            .map_err(|e| Error::BadConfig(format!("endpoint: {e}")))?;
        if parsed.scheme() != "http" && parsed.scheme() != "https" {
            return Err(Error::BadConfig(format!(
                "endpoint must be http(s), got {}",
                parsed.scheme()
            )));
        }
        if self.max_records == Some(0) {
            return Err(Error::BadConfig("maxRecords must be at least 1".to_string()));
        }
        Ok(())
    }
}

/// One harvested record with its OAI envelope fields.
#[derive(Debug, Clone)]
pub struct HarvestedRecord {
    pub identifier: String,
    pub datestamp: String,
    pub record: Record,
}

/// The outcome of a harvest run.
#[derive(Debug, Clone, Default)]
pub struct HarvestBatch {
    pub records: Vec<HarvestedRecord>,
    /// True when the run stopped before the endpoint was exhausted.
    pub incomplete: bool,
    /// Per-record failures; these never abort the batch.
    pub errors: Vec<(String, String)>,
}

fn fetch_with_retries(url: &str, config: &HarvestConfig) -> Result<String> {
    let client = reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs(30))
        .build()
        .map_err(|e| Error::BadConfig(e.to_string()))?;
    let mut last_error = String::new();
    let attempts = config.retry_limit + 1;
    for attempt in 0..attempts {
        if attempt > 0 {
            // deterministic backoff, doubling per attempt
            let delay = config.backoff_base_millis << (attempt - 1);
            std::thread::sleep(Duration::from_millis(delay));
        }
        match client.get(url).send() {
            Ok(response) if response.status().is_success() => {
                return response.text().map_err(|e| Error::NetworkUnreachable {
                    attempts: attempt + 1,
                    message: e.to_string(),
                });
            }
            Ok(response) => last_error = format!("HTTP {}", response.status()),
            Err(e) => last_error = e.to_string(),
        }
    }
    Err(Error::NetworkUnreachable {
        attempts,
        message: last_error,
    })
}

fn text_of(node: roxmltree::Node<'_, '_>) -> String {
    node.children()
        .filter_map(|c| c.text())
        .collect::<String>()
        .trim()
        .to_string()
}

fn child_named<'a>(
    node: roxmltree::Node<'a, 'a>,
    name: &str,
) -> Option<roxmltree::Node<'a, 'a>> {
    node.children()
        .find(|c| c.is_element() && c.tag_name().name() == name)
}

fn dc_record_from_metadata(metadata: roxmltree::Node<'_, '_>) -> Result<Record> {
    // the metadata payload is the oai_dc:dc container; its children become
    // one DC leaf each
    let container = metadata
        .children()
        .find(|c| c.is_element())
        .ok_or_else(|| Error::Protocol {
            code: "noMetadata".to_string(),
            message: "record has an empty metadata element".to_string(),
        })?;
    let mut record = Record::new(SchemaId::DC);
    for child in container.children().filter(|c| c.is_element()) {
        let mut instance = ElementInstance::new(child.tag_name().name());
        let value = text_of(child);
        if !value.is_empty() {
            instance.value = Some(value);
        }
        for attr in child.attributes() {
            if attr.name() == "lang" {
                instance.lang = Some(attr.value().to_string());
            }
        }
        record.roots.push(instance);
    }
    Ok(record)
}

/// Harvest records with ListRecords, following resumption tokens until the
/// endpoint is exhausted or `maxRecords` is reached.
pub fn harvest(config: &HarvestConfig) -> Result<HarvestBatch> {
    config.validate()?;
    let mut batch = HarvestBatch::default();
    let mut token: Option<String> = None;

    loop {
        let mut request_url = url::Url::parse(&config.endpoint).expect("validated");
        {
            let mut query = request_url.query_pairs_mut();
            query.append_pair("verb", "ListRecords");
            match &token {
                Some(t) => {
                    query.append_pair("resumptionToken", t);
                }
                None => {
                    query.append_pair("metadataPrefix", &config.metadata_prefix);
                    if let Some(from) = &config.from {
                        query.append_pair("from", from);
                    }
                    if let Some(set) = &config.set {
                        query.append_pair("set", set);
                    }
                }
            }
        }
        let body = fetch_with_retries(request_url.as_str(), config)?;
        let doc = roxmltree::Document::parse(&body).map_err(|e| Error::Protocol {
            code: "malformedResponse".to_string(),
            message: e.to_string(),
        })?;

        if let Some(error) = doc
            .descendants()
            .find(|n| n.is_element() && n.tag_name().name() == "error")
        {
            return Err(Error::Protocol {
                code: error.attribute("code").unwrap_or("unknown").to_string(),
                message: text_of(error),
            });
        }

        let mut next_token = None;
        let mut saw_more = false;
        for node in doc.descendants().filter(|n| n.is_element()) {
            match node.tag_name().name() {
                "record" => {
                    if batch.records.len() >= config.max_records.unwrap_or(usize::MAX) {
                        saw_more = true;
                        continue;
                    }
                    let header = child_named(node, "header");
                    let identifier = header
                        .and_then(|h| child_named(h, "identifier"))
                        .map(text_of)
                        .unwrap_or_default();
                    let datestamp = header
                        .and_then(|h| child_named(h, "datestamp"))
                        .map(text_of)
                        .unwrap_or_default();
                    if config.metadata_prefix != "oai_dc" {
                        batch.errors.push((
                            identifier,
                            format!("parse skipped: prefix {:?} is stored raw", config.metadata_prefix),
                        ));
                        continue;
                    }
                    match child_named(node, "metadata") {
                        Some(metadata) => match dc_record_from_metadata(metadata) {
                            Ok(record) => batch.records.push(HarvestedRecord {
                                identifier,
                                datestamp,
                                record,
                            }),
                            Err(e) => batch.errors.push((identifier, e.to_string())),
                        },
                        None => batch
                            .errors
                            .push((identifier, "record has no metadata (deleted?)".to_string())),
                    }
                }
                "resumptionToken" => {
                    let value = text_of(node);
                    if !value.is_empty() {
                        next_token = Some(value);
                    }
                }
                _ => {}
            }
        }

        let at_limit = config
            .max_records
            .is_some_and(|max| batch.records.len() >= max);
        if at_limit && (saw_more || next_token.is_some()) {
            batch.incomplete = true;
            return Ok(batch);
        }
        match next_token {
            Some(t) => token = Some(t),
            None => return Ok(batch),
        }
    }
}

/// Outcome of ingesting one file.
#[derive(Debug)]
pub enum IngestOutcome {
    Record(Record),
    Error(String),
    /// Extension did not match `.json` or `.xml`.
    Skipped(String),
}

/// Parse every file in a directory: `.json` as canonical, `.xml` as generic
/// XML in the given schema. Results are ordered lexicographically by file
/// name; individual failures never abort the run.
pub fn ingest_dir(dir: &std::path::Path, schema: &SchemaId) -> Result<Vec<(String, IngestOutcome)>> {
    if !dir.is_dir() {
        return Err(Error::DirectoryNotFound(dir.display().to_string()));
    }
    let mut names: Vec<String> = std::fs::read_dir(dir)?
        .filter_map(|entry| entry.ok())
        .filter(|entry| entry.path().is_file())
        .filter_map(|entry| entry.file_name().into_string().ok())
        .collect();
    names.sort();

    let mut results = Vec::new();
    for name in names {
        let path = dir.join(&name);
        let outcome = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => match std::fs::read_to_string(&path) {
                Ok(text) => match parse_canonical(&text) {
                    Ok(record) => IngestOutcome::Record(record),
                    Err(e) => IngestOutcome::Error(e.to_string()),
                },
                Err(e) => IngestOutcome::Error(e.to_string()),
            },
            Some("xml") => match std::fs::read_to_string(&path) {
                Ok(text) => match parse_xml(&text, schema.clone()) {
                    Ok(record) => IngestOutcome::Record(record),
                    Err(e) => IngestOutcome::Error(e.to_string()),
                },
                Err(e) => IngestOutcome::Error(e.to_string()),
            },
            other => IngestOutcome::Skipped(format!(
                "extension {:?} not ingestable; expected .json or .xml",
                other.unwrap_or("")
            )),
        };
        results.push((name, outcome));
    }
    Ok(results)
}
