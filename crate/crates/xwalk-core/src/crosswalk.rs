//! The mapping engine: the built-in crosswalk table, pivot transforms
//! through Dublin Core, and coverage reporting.
//!
//! All pairwise conversions are routed X -> DC -> Y; the table only ever
//! defines mappings to DC, so pairwise mappings are derived, never
//! hand-authored.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::record_model::{add_instance, flatten, Record};
use crate::schema_registry::{builtin_registry, join_path, ElementDef, Path, Registry, SchemaId};

/// How a source element relates to its DC target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleKind {
    /// One-to-one element correspondence.
    Exact,
    /// The mapping depends on the element's parent (2+ segment source path).
    Contextual,
    /// Several source elements of one schema feed the same DC target.
    Aggregate,
}

impl RuleKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "exact" => Some(RuleKind::Exact),
            "contextual" => Some(RuleKind::Contextual),
            "aggregate" => Some(RuleKind::Aggregate),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            RuleKind::Exact => "exact",
            RuleKind::Contextual => "contextual",
            RuleKind::Aggregate => "aggregate",
        }
    }
}

/// One row of the crosswalk: a source element and its DC target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MappingRule {
    pub source_schema: SchemaId,
    pub source_path: Path,
    pub dc_term: String,
    pub dc_qualifier: Option<String>,
    pub kind: RuleKind,
    pub note: String,
    pub ambiguous: bool,
}

impl MappingRule {
    /// The DC-side record path: `[term]` or `[term, qualifier]`.
    pub fn dc_path(&self) -> Path {
        let mut path = vec![self.dc_term.clone()];
        if let Some(q) = &self.dc_qualifier {
            path.push(q.clone());
        }
        path
    }
}

/// The ordered rule list with forward and reverse indexes.
#[derive(Debug, Clone)]
pub struct CrosswalkTable {
    rules: Vec<MappingRule>,
    forward: HashMap<(String, String), Vec<usize>>,
    reverse: HashMap<(String, String, String), Vec<usize>>,
}

fn qual_key(qualifier: &Option<String>) -> String {
    qualifier.clone().unwrap_or_default()
}

impl CrosswalkTable {
    /// Index a rule list, enforcing the table invariants: no duplicate
    /// (schema, path, term, qualifier) tuples and 2+ segment paths on
    /// contextual rules.
    pub fn new(rules: Vec<MappingRule>) -> Result<Self> {
        let mut forward: HashMap<(String, String), Vec<usize>> = HashMap::new();
        let mut reverse: HashMap<(String, String, String), Vec<usize>> = HashMap::new();
        let mut seen = BTreeSet::new();
        for (i, rule) in rules.iter().enumerate() {
            if rule.kind == RuleKind::Contextual && rule.source_path.len() < 2 {
                return Err(Error::MalformedPath(join_path(&rule.source_path)));
            }
            let tuple = (
                rule.source_schema.to_string(),
                join_path(&rule.source_path),
                rule.dc_term.clone(),
                qual_key(&rule.dc_qualifier),
            );
            if !seen.insert(tuple) {
                return Err(Error::DuplicatePath {
                    schema: rule.source_schema.to_string(),
                    path: join_path(&rule.source_path),
                });
            }
            forward
                .entry((rule.source_schema.to_string(), join_path(&rule.source_path)))
                .or_default()
                .push(i);
            reverse
                .entry((
                    rule.dc_term.clone(),
                    qual_key(&rule.dc_qualifier),
                    rule.source_schema.to_string(),
                ))
                .or_default()
                .push(i);
        }
        Ok(CrosswalkTable {
            rules,
            forward,
            reverse,
        })
    }

    pub fn rules(&self) -> &[MappingRule] {
        &self.rules
    }

    fn forward_rules(&self, schema: &SchemaId, path: &[String]) -> Vec<&MappingRule> {
        self.forward
            .get(&(schema.to_string(), join_path(path)))
            .map(|idx| idx.iter().map(|&i| &self.rules[i]).collect())
            .unwrap_or_default()
    }

    fn reverse_rules(
        &self,
        dc_term: &str,
        dc_qualifier: &Option<String>,
        target: &SchemaId,
    ) -> Vec<&MappingRule> {
        self.reverse
            .get(&(dc_term.to_string(), qual_key(dc_qualifier), target.to_string()))
            .map(|idx| idx.iter().map(|&i| &self.rules[i]).collect())
            .unwrap_or_default()
    }
}

const TABLE1_CSV: &str = include_str!("../../../data/table1.csv");

/// The built-in encoding of the published mapping table plus DC identity
/// rules. Validated against the built-in registry by the test suite.
pub fn builtin_table() -> CrosswalkTable {
    crate::io_formats::load_crosswalk_table(TABLE1_CSV, &builtin_registry())
        .expect("built-in table is valid")
}

/// Forward lookup: all DC targets for a source element, in table order.
/// Empty for unmapped (unique) elements.
pub fn map_element(
    table: &CrosswalkTable,
    schema: &SchemaId,
    path: &[String],
) -> Vec<(String, Option<String>)> {
    table
        .forward_rules(schema, path)
        .into_iter()
        .map(|r| (r.dc_term.clone(), r.dc_qualifier.clone()))
        .collect()
}

/// Reverse lookup: every target-schema path mapping to the DC target, in
/// table order. The first entry is the canonical emission target.
pub fn reverse_map(
    table: &CrosswalkTable,
    dc_term: &str,
    dc_qualifier: &Option<String>,
    target: &SchemaId,
) -> Vec<Path> {
    table
        .reverse_rules(dc_term, dc_qualifier, target)
        .into_iter()
        .map(|r| r.source_path.clone())
        .collect()
}

/// Accounting of what a crosswalk kept and lost.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossReport {
    /// Source paths with no applicable rule, with occurrence counts.
    pub unmapped: Vec<UnmappedEntry>,
    /// DC targets fed by more than one distinct source path.
    pub collisions: Vec<CollisionEntry>,
    /// mapped leaf values / total leaf values; 1.0 for an empty record.
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnmappedEntry {
    pub path: Path,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollisionEntry {
    pub target: Path,
    pub sources: Vec<Path>,
}

/// Where each output leaf came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProvenanceEntry {
    pub output_path: Path,
    pub source_path: Path,
    pub kind: RuleKind,
    /// Alternate emission targets that were not chosen, if any.
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

/// A transformed record plus loss accounting and provenance.
#[derive(Debug, Clone)]
pub struct CrosswalkResult {
    pub output: Record,
    pub loss: LossReport,
    pub provenance: Vec<ProvenanceEntry>,
}

struct LossTally {
    unmapped: BTreeMap<String, (Path, usize)>,
    total_leaves: usize,
    mapped_leaves: usize,
}

impl LossTally {
    fn new() -> Self {
        LossTally {
            unmapped: BTreeMap::new(),
            total_leaves: 0,
            mapped_leaves: 0,
        }
    }

    fn miss(&mut self, path: &Path) {
        self.unmapped
            .entry(join_path(path))
            .or_insert_with(|| (path.clone(), 0))
            .1 += 1;
    }

    fn finish(self, collisions: Vec<CollisionEntry>) -> LossReport {
        let fidelity = if self.total_leaves == 0 {
            1.0
        } else {
            self.mapped_leaves as f64 / self.total_leaves as f64
        };
        LossReport {
            unmapped: self.unmapped.into_values().map(|(path, count)| UnmappedEntry { path, count }).collect(),
            collisions,
            fidelity,
        }
    }
}

fn collisions_from(targets: &BTreeMap<String, (Path, BTreeSet<String>, Vec<Path>)>) -> Vec<CollisionEntry> {
    targets
        .values()
        .filter(|(_, distinct, _)| distinct.len() > 1)
        .map(|(target, _, sources)| CollisionEntry {
            target: target.clone(),
            sources: sources.clone(),
        })
        .collect()
}

/// Transform any registered record into its Dublin Core pivot form.
pub fn to_pivot(
    table: &CrosswalkTable,
    registry: &Registry,
    record: &Record,
) -> Result<CrosswalkResult> {
    registry.schema(&record.schema)?;
    let mut output = Record::new(SchemaId::DC);
    let mut tally = LossTally::new();
    let mut provenance = Vec::new();
    // target joined path -> (path, distinct source keys, source paths)
    let mut targets: BTreeMap<String, (Path, BTreeSet<String>, Vec<Path>)> = BTreeMap::new();
    for entry in flatten(record) {
        let Some(value) = entry.value else { continue };
        tally.total_leaves += 1;
        let rules = table.forward_rules(&record.schema, &entry.path);
        if rules.is_empty() {
            tally.miss(&entry.path);
            continue;
        }
        tally.mapped_leaves += 1;
        for rule in rules {
            let dc_path = rule.dc_path();
            output = add_instance(
                &output,
                &dc_path,
                Some(value.clone()),
                entry.lang.clone(),
                entry.attrs.clone(),
            )?;
            let slot = targets
                .entry(join_path(&dc_path))
                .or_insert_with(|| (dc_path.clone(), BTreeSet::new(), Vec::new()));
            if slot.1.insert(join_path(&entry.path)) {
                slot.2.push(entry.path.clone());
            }
            provenance.push(ProvenanceEntry {
                output_path: dc_path,
                source_path: entry.path.clone(),
                kind: rule.kind,
                note: String::new(),
            });
        }
    }
    let collisions = collisions_from(&targets);
    Ok(CrosswalkResult {
        output,
        loss: tally.finish(collisions),
        provenance,
    })
}

/// Emit a DC record into a target schema. Each DC leaf goes to the first
/// (canonical) reverse-mapped path; alternates are recorded in the
/// provenance note rather than duplicated.
pub fn from_pivot(
    table: &CrosswalkTable,
    registry: &Registry,
    dc_record: &Record,
    target: &SchemaId,
) -> Result<CrosswalkResult> {
    if !dc_record.schema.is_dc() {
        return Err(Error::WrongSchema {
            expected: "dc".to_string(),
            found: dc_record.schema.to_string(),
        });
    }
    registry.schema(target)?;
    let mut output = Record::new(target.clone());
    let mut tally = LossTally::new();
    let mut provenance = Vec::new();
    let mut targets: BTreeMap<String, (Path, BTreeSet<String>, Vec<Path>)> = BTreeMap::new();
    for entry in flatten(dc_record) {
        let Some(value) = entry.value else { continue };
        tally.total_leaves += 1;
        let (term, qualifier) = match entry.path.as_slice() {
            [term] => (term.clone(), None),
            [term, qualifier] => (term.clone(), Some(qualifier.clone())),
            _ => {
                tally.miss(&entry.path);
                continue;
            }
        };
        let candidates = table.reverse_rules(&term, &qualifier, target);
        let Some(canonical) = candidates.first() else {
            tally.miss(&entry.path);
            continue;
        };
        tally.mapped_leaves += 1;
        let out_path = canonical.source_path.clone();
        output = add_instance(
            &output,
            &out_path,
            Some(value.clone()),
            entry.lang.clone(),
            entry.attrs.clone(),
        )?;
        let note = if candidates.len() > 1 {
            let alternates: Vec<String> = candidates[1..]
                .iter()
                .map(|r| join_path(&r.source_path))
                .collect();
            format!("alternates: {}", alternates.join("; "))
        } else {
            String::new()
        };
        let slot = targets
            .entry(join_path(&out_path))
            .or_insert_with(|| (out_path.clone(), BTreeSet::new(), Vec::new()));
        if slot.1.insert(join_path(&entry.path)) {
            slot.2.push(entry.path.clone());
        }
        provenance.push(ProvenanceEntry {
            output_path: out_path,
            source_path: entry.path.clone(),
            kind: canonical.kind,
            note,
        });
    }
    let collisions = collisions_from(&targets);
    Ok(CrosswalkResult {
        output,
        loss: tally.finish(collisions),
        provenance,
    })
}

/// Full crosswalk: source schema to target schema through the DC pivot.
/// The loss report covers the whole chain; fidelity is end-to-end mapped
/// leaves over total input leaves.
pub fn transform(
    table: &CrosswalkTable,
    registry: &Registry,
    record: &Record,
    target: &SchemaId,
) -> Result<CrosswalkResult> {
    let pivot = to_pivot(table, registry, record)?;
    let final_leg = from_pivot(table, registry, &pivot.output, target)?;

    let total_leaves: usize = flatten(record).iter().filter(|e| e.value.is_some()).count();
    let dropped_first: usize = pivot.loss.unmapped.iter().map(|u| u.count).sum();
    let dropped_second: usize = final_leg.loss.unmapped.iter().map(|u| u.count).sum();
    let mapped = total_leaves.saturating_sub(dropped_first + dropped_second);
    let fidelity = if total_leaves == 0 {
        1.0
    } else {
        mapped as f64 / total_leaves as f64
    };

    let mut unmapped = pivot.loss.unmapped.clone();
    unmapped.extend(final_leg.loss.unmapped.iter().cloned());

    // Chain provenance back to the original source paths: the second leg's
    // source paths are DC paths produced by the first leg.
    let mut by_dc_path: BTreeMap<String, Vec<Path>> = BTreeMap::new();
    for entry in &pivot.provenance {
        by_dc_path
            .entry(join_path(&entry.output_path))
            .or_default()
            .push(entry.source_path.clone());
    }
    let provenance: Vec<ProvenanceEntry> = final_leg
        .provenance
        .iter()
        .map(|entry| {
            let original = by_dc_path
                .get_mut(&join_path(&entry.source_path))
                .and_then(|queue| if queue.is_empty() { None } else { Some(queue.remove(0)) })
                .unwrap_or_else(|| entry.source_path.clone());
            ProvenanceEntry {
                output_path: entry.output_path.clone(),
                source_path: original,
                kind: entry.kind,
                note: entry.note.clone(),
            }
        })
        .collect();

    Ok(CrosswalkResult {
        output: final_leg.output,
        loss: LossReport {
            unmapped,
            collisions: final_leg.loss.collisions.clone(),
            fidelity,
        },
        provenance,
    })
}

/// Group a DC target at core-element level, keeping spatial distinct as the
/// published findings do.
fn dc_group(term: &str, qualifier: &Option<String>) -> String {
    match (term, qualifier.as_deref()) {
        ("coverage", Some("spatial")) => "coverage.spatial".to_string(),
        _ => term.to_string(),
    }
}

/// DC targets reachable from every schema in the set. The empty set returns
/// the full DC group universe (vacuous universal quantification).
pub fn shared_terms(table: &CrosswalkTable, schemas: &[SchemaId]) -> BTreeSet<String> {
    if schemas.is_empty() {
        let mut universe: BTreeSet<String> = builtin_registry()
            .schema(&SchemaId::from(SchemaId::DC))
            .expect("dc is built in")
            .elements()
            .iter()
            .filter(|e| e.path.len() == 1)
            .map(|e| e.path[0].clone())
            .collect();
        universe.insert("coverage.spatial".to_string());
        return universe;
    }
    let mut shared: Option<BTreeSet<String>> = None;
    for schema in schemas {
        let reachable: BTreeSet<String> = table
            .rules()
            .iter()
            .filter(|r| &r.source_schema == schema)
            .map(|r| dc_group(&r.dc_term, &r.dc_qualifier))
            .collect();
        shared = Some(match shared {
            None => reachable,
            Some(acc) => acc.intersection(&reachable).cloned().collect(),
        });
    }
    shared.unwrap_or_default()
}

/// Leaf elements of a schema with no forward rule. Container elements
/// (those with children) are structural and excluded.
pub fn unique_elements<'r>(
    table: &CrosswalkTable,
    registry: &'r Registry,
    schema: &SchemaId,
) -> Result<Vec<&'r ElementDef>> {
    let def = registry.schema(schema)?;
    Ok(def
        .elements()
        .iter()
        .filter(|e| !def.is_container(&e.path))
        .filter(|e| table.forward_rules(schema, &e.path).is_empty())
        .collect())
}

pub const HERITAGE_SCHEMAS: [&str; 3] = [SchemaId::ARCHAEO_CORE, SchemaId::CARARE, SchemaId::LIDO];

/// Shared components as published in the source table's findings.
const CLAIMED_SHARED: [&str; 7] = [
    "source",
    "publisher",
    "identifier",
    "format",
    "coverage.spatial",
    "creator",
    "title",
];

#[derive(Debug, Clone, Serialize)]
pub struct SchemaCounts {
    pub mapped: usize,
    pub unmapped: usize,
    pub total: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeltaReport {
    /// In the computed shared set but not in the published claim.
    pub computed_not_claimed: Vec<String>,
    /// Claimed as shared but not supported by the encoded cells.
    pub claimed_not_computed: Vec<String>,
    /// Rules encoded from garbled or merged table cells.
    pub ambiguous_rules: Vec<String>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverageReport {
    pub shared: Vec<String>,
    pub unique: BTreeMap<String, Vec<String>>,
    pub counts: BTreeMap<String, SchemaCounts>,
    pub delta: DeltaReport,
}

/// Compute the coverage report: shared DC targets across the heritage
/// schemas, unique elements per schema, per-schema counts, and the delta
/// between the computed shared set and the published claim.
pub fn coverage_report(table: &CrosswalkTable, registry: &Registry) -> Result<CoverageReport> {
    let heritage: Vec<SchemaId> = HERITAGE_SCHEMAS.iter().map(|&s| SchemaId::from(s)).collect();
    let shared: Vec<String> = shared_terms(table, &heritage).into_iter().collect();

    let mut unique = BTreeMap::new();
    let mut counts = BTreeMap::new();
    for schema in &heritage {
        let uniques = unique_elements(table, registry, schema)?;
        let def = registry.schema(schema)?;
        let leaves = def
            .elements()
            .iter()
            .filter(|e| !def.is_container(&e.path))
            .count();
        counts.insert(
            schema.to_string(),
            SchemaCounts {
                mapped: leaves - uniques.len(),
                unmapped: uniques.len(),
                total: leaves,
            },
        );
        unique.insert(
            schema.to_string(),
            uniques.iter().map(|e| join_path(&e.path)).collect(),
        );
    }

    let shared_set: BTreeSet<&str> = shared.iter().map(String::as_str).collect();
    let claimed_set: BTreeSet<&str> = CLAIMED_SHARED.iter().copied().collect();
    let computed_not_claimed = shared_set
        .difference(&claimed_set)
        .map(|s| s.to_string())
        .collect();
    let claimed_not_computed = claimed_set
        .difference(&shared_set)
        .map(|s| s.to_string())
        .collect();
    let ambiguous_rules = table
        .rules()
        .iter()
        .filter(|r| r.ambiguous)
        .map(|r| format!("{}:{}", r.source_schema, join_path(&r.source_path)))
        .collect();
    let notes = vec![
        "Artefact Munsell Number is listed as unique to Archaeo-core in the findings but mapped to identifier in the table; the table reading is kept.".to_string(),
        "The claimed shared set is compared against the set computed from the encoded cells; divergences are listed, not forced into agreement.".to_string(),
    ];

    Ok(CoverageReport {
        shared,
        unique,
        counts,
        delta: DeltaReport {
            computed_not_claimed,
            claimed_not_computed,
            ambiguous_rules,
            notes,
        },
    })
}
