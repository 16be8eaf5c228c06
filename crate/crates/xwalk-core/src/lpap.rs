//! The Language Preservation Application Profile (v0.1): typed records,
//! construction from a Dublin Core pivot plus language facts, export back to
//! DC, and FAIR-oriented validation.
//!
//! Language-specific fields ride through DC as labeled description values
//! ("vowels: a, e, i"), so nothing is dropped in DC interchange; `from_dc`
//! parses the convention back.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::record_model::{add_instance, add_value, flatten, get_values, Record};
use crate::schema_registry::{parse_path, SchemaId};

/// Speaker population with the observation date; a count without a date is
/// of limited use for endangerment tracking, but the date stays optional.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Speakers {
    pub count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub as_of: Option<String>,
}

/// A typed language-preservation record.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct LpapRecord {
    pub identifier: String,
    pub language_name: String,
    pub alternate_names: Vec<String>,
    pub script: Vec<String>,
    pub vowels: Vec<String>,
    pub consonants: Vec<String>,
    pub grammatical_rules: Vec<String>,
    pub country_region: Vec<String>,
    pub community: Vec<String>,
    pub speakers: Option<Speakers>,
    /// Genetic lineage, broadest first.
    pub linguistic_family: Vec<String>,
    pub designations: Vec<String>,
    pub date_created: Option<String>,
    pub creator: Vec<String>,
    pub origin: Option<String>,
    pub spatial: Vec<String>,
    pub description: Vec<String>,
    pub rights: Option<String>,
    pub legal_body_name: Option<String>,
    pub source: Vec<String>,
}

/// The language-specific subset of [`LpapRecord`], supplied by the
/// cataloger alongside a DC record. An identifier may be supplied here when
/// the DC record has none.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct LanguageFacts {
    pub identifier: Option<String>,
    pub language_name: Option<String>,
    pub alternate_names: Vec<String>,
    pub script: Vec<String>,
    pub vowels: Vec<String>,
    pub consonants: Vec<String>,
    pub grammatical_rules: Vec<String>,
    pub country_region: Vec<String>,
    pub community: Vec<String>,
    pub speakers: Option<Speakers>,
    pub linguistic_family: Vec<String>,
}

fn dedup_tokens(tokens: Vec<String>) -> Vec<String> {
    let mut seen = std::collections::BTreeSet::new();
    tokens
        .into_iter()
        .map(|t| t.trim().to_string())
        .filter(|t| !t.is_empty())
        .filter(|t| seen.insert(t.clone()))
        .collect()
}

impl LpapRecord {
    /// Enforce the field invariants: required identifier and language name,
    /// deduplicated token inventories and lineage.
    pub fn normalize(mut self) -> Result<Self> {
        if self.identifier.trim().is_empty() {
            return Err(Error::MissingIdentifier);
        }
        if self.language_name.trim().is_empty() {
            return Err(Error::MissingLanguageName);
        }
        self.vowels = dedup_tokens(self.vowels);
        self.consonants = dedup_tokens(self.consonants);
        self.linguistic_family = dedup_tokens(self.linguistic_family);
        Ok(self)
    }
}

/// Keys used for the labeled-description interchange convention, in
/// emission order.
const FACT_KEYS: [&str; 10] = [
    "languageName",
    "alternateNames",
    "script",
    "vowels",
    "consonants",
    "grammaticalRules",
    "countryRegion",
    "community",
    "speakers",
    "linguisticFamily",
];

const LIST_SEP: &str = ", ";

fn format_speakers(s: &Speakers) -> String {
    match &s.as_of {
        Some(date) => format!("{} (as of {})", s.count, date),
        None => s.count.to_string(),
    }
}

fn parse_speakers(text: &str) -> Option<Speakers> {
    let text = text.trim();
    if let Some((count, rest)) = text.split_once(" (as of ") {
        let date = rest.strip_suffix(')')?;
        Some(Speakers {
            count: count.trim().parse().ok()?,
            as_of: Some(date.to_string()),
        })
    } else {
        Some(Speakers {
            count: text.parse().ok()?,
            as_of: None,
        })
    }
}

/// Facts recovered from labeled description values.
#[derive(Default)]
struct ParsedFacts {
    fields: BTreeMap<String, Vec<String>>,
    speakers: Option<Speakers>,
}

fn split_labeled(value: &str) -> Option<(&str, &str)> {
    let (key, rest) = value.split_once(": ")?;
    if FACT_KEYS.contains(&key) {
        Some((key, rest))
    } else {
        None
    }
}

const ORIGIN_ATTR: &str = "lpap-role";

/// Build an LPAP record from a DC record plus language facts. DC leaves
/// populate the shortlist fields, labeled description values restore
/// language-specific fields, and the facts argument wins on conflict.
pub fn from_dc(dc_record: &Record, facts: &LanguageFacts) -> Result<LpapRecord> {
    if !dc_record.schema.is_dc() {
        return Err(Error::WrongSchema {
            expected: "dc".to_string(),
            found: dc_record.schema.to_string(),
        });
    }
    let path = |s: &str| parse_path(s).expect("static path");

    let mut parsed = ParsedFacts::default();
    let mut description = Vec::new();
    for value in get_values(dc_record, &path("description")) {
        match split_labeled(&value) {
            Some(("speakers", rest)) => parsed.speakers = parse_speakers(rest),
            Some((key, rest)) => {
                parsed.fields.insert(
                    key.to_string(),
                    rest.split(LIST_SEP).map(str::to_string).collect(),
                );
            }
            None => description.push(value),
        }
    }

    // origin vs spatial: leaves emitted by to_dc carry a role attribute;
    // unattributed foreign records fall back to first-value-as-origin.
    let mut origin = None;
    let mut spatial = Vec::new();
    let mut untagged = Vec::new();
    for entry in flatten(dc_record) {
        if entry.path != path("coverage/spatial") {
            continue;
        }
        let Some(value) = entry.value else { continue };
        match entry.attrs.get(ORIGIN_ATTR).map(String::as_str) {
            Some("origin") => origin = origin.or(Some(value)),
            Some(_) => spatial.push(value),
            None => untagged.push(value),
        }
    }
    if !untagged.is_empty() {
        if origin.is_none() && spatial.is_empty() {
            origin = Some(untagged[0].clone());
        }
        spatial.extend(untagged);
    }

    let first = |p: &str| get_values(dc_record, &path(p)).into_iter().next();
    let all = |p: &str| get_values(dc_record, &path(p));

    let list_field = |key: &str, from_facts: &[String]| -> Vec<String> {
        if !from_facts.is_empty() {
            from_facts.to_vec()
        } else {
            parsed.fields.get(key).cloned().unwrap_or_default()
        }
    };

    let language_name = facts
        .language_name
        .clone()
        .or_else(|| parsed.fields.get("languageName").and_then(|v| v.first().cloned()))
        .ok_or(Error::MissingLanguageName)?;
    let identifier = facts
        .identifier
        .clone()
        .or_else(|| first("identifier"))
        .ok_or(Error::MissingIdentifier)?;

    LpapRecord {
        identifier,
        language_name,
        alternate_names: list_field("alternateNames", &facts.alternate_names),
        script: list_field("script", &facts.script),
        vowels: list_field("vowels", &facts.vowels),
        consonants: list_field("consonants", &facts.consonants),
        grammatical_rules: list_field("grammaticalRules", &facts.grammatical_rules),
        country_region: list_field("countryRegion", &facts.country_region),
        community: list_field("community", &facts.community),
        speakers: facts.speakers.clone().or(parsed.speakers),
        linguistic_family: list_field("linguisticFamily", &facts.linguistic_family),
        designations: all("date/available"),
        date_created: first("date/created"),
        creator: all("creator"),
        origin,
        spatial,
        description,
        rights: first("rights"),
        legal_body_name: first("publisher"),
        source: all("source"),
    }
    .normalize()
}

/// Export an LPAP record to a DC record. Shortlist fields invert the
/// `from_dc` field map; language-specific fields become labeled description
/// values so no information is dropped.
pub fn to_dc(record: &LpapRecord) -> Record {
    let path = |s: &str| parse_path(s).expect("static path");
    let mut dc = Record::new(SchemaId::DC);
    let push = |r: &Record, p: &str, v: &str| add_value(r, &path(p), v, None).expect("valid path");

    dc = push(&dc, "identifier", &record.identifier);
    if let Some(created) = &record.date_created {
        dc = push(&dc, "date/created", created);
    }
    for designation in &record.designations {
        dc = push(&dc, "date/available", designation);
    }
    for creator in &record.creator {
        dc = push(&dc, "creator", creator);
    }
    let spatial_path = path("coverage/spatial");
    if let Some(origin) = &record.origin {
        let attrs = BTreeMap::from([(ORIGIN_ATTR.to_string(), "origin".to_string())]);
        dc = add_instance(&dc, &spatial_path, Some(origin.clone()), None, attrs).expect("valid path");
    }
    for place in &record.spatial {
        let attrs = BTreeMap::from([(ORIGIN_ATTR.to_string(), "spatial".to_string())]);
        dc = add_instance(&dc, &spatial_path, Some(place.clone()), None, attrs).expect("valid path");
    }
    for d in &record.description {
        dc = push(&dc, "description", d);
    }
    let mut labeled: Vec<(String, String)> = Vec::new();
    labeled.push(("languageName".into(), record.language_name.clone()));
    let lists: [(&str, &Vec<String>); 8] = [
        ("alternateNames", &record.alternate_names),
        ("script", &record.script),
        ("vowels", &record.vowels),
        ("consonants", &record.consonants),
        ("grammaticalRules", &record.grammatical_rules),
        ("countryRegion", &record.country_region),
        ("community", &record.community),
        ("linguisticFamily", &record.linguistic_family),
    ];
    for (key, values) in lists {
        if !values.is_empty() {
            labeled.push((key.into(), values.join(LIST_SEP)));
        }
    }
    if let Some(speakers) = &record.speakers {
        labeled.push(("speakers".into(), format_speakers(speakers)));
    }
    for (key, value) in labeled {
        dc = push(&dc, "description", &format!("{key}: {value}"));
    }
    if let Some(rights) = &record.rights {
        dc = push(&dc, "rights", rights);
    }
    if let Some(publisher) = &record.legal_body_name {
        dc = push(&dc, "publisher", publisher);
    }
    for source in &record.source {
        dc = push(&dc, "source", source);
    }
    dc
}

/// Convert an LPAP record to the generic record model (schema id `lpap`)
/// for canonical serialization.
pub fn to_record(record: &LpapRecord) -> Record {
    let path = |s: &str| parse_path(s).expect("static path");
    let mut r = Record::new(SchemaId::LPAP);
    let push = |r: &Record, p: &str, v: &str| add_value(r, &path(p), v, None).expect("valid path");

    r = push(&r, "identifier", &record.identifier);
    r = push(&r, "languageName", &record.language_name);
    let lists: [(&str, &Vec<String>); 12] = [
        ("alternateNames", &record.alternate_names),
        ("script", &record.script),
        ("vowels", &record.vowels),
        ("consonants", &record.consonants),
        ("grammaticalRules", &record.grammatical_rules),
        ("countryRegion", &record.country_region),
        ("community", &record.community),
        ("linguisticFamily", &record.linguistic_family),
        ("designations", &record.designations),
        ("creator", &record.creator),
        ("spatial", &record.spatial),
        ("description", &record.description),
    ];
    for (p, values) in lists {
        for v in values {
            r = push(&r, p, v);
        }
    }
    if let Some(speakers) = &record.speakers {
        r = push(&r, "speakers/count", &speakers.count.to_string());
        if let Some(date) = &speakers.as_of {
            r = push(&r, "speakers/asOf", date);
        }
    }
    let singles: [(&str, &Option<String>); 5] = [
        ("dateCreated", &record.date_created),
        ("origin", &record.origin),
        ("rights", &record.rights),
        ("legalBodyName", &record.legal_body_name),
        ("source", &None),
    ];
    for (p, value) in singles {
        if let Some(v) = value {
            r = push(&r, p, v);
        }
    }
    for source in &record.source {
        r = push(&r, "source", source);
    }
    r
}

/// Parse a generic `lpap` record back into the typed form.
pub fn from_record(record: &Record) -> Result<LpapRecord> {
    if record.schema.as_str() != SchemaId::LPAP {
        return Err(Error::WrongSchema {
            expected: "lpap".to_string(),
            found: record.schema.to_string(),
        });
    }
    let path = |s: &str| parse_path(s).expect("static path");
    let first = |p: &str| get_values(record, &path(p)).into_iter().next();
    let all = |p: &str| get_values(record, &path(p));

    let speakers = match first("speakers/count") {
        Some(count) => Some(Speakers {
            count: count.parse().map_err(|_| Error::MalformedPath(format!("speakers/count: {count:?}")))?,
            as_of: first("speakers/asOf"),
        }),
        None => None,
    };

    LpapRecord {
        identifier: first("identifier").unwrap_or_default(),
        language_name: first("languageName").unwrap_or_default(),
        alternate_names: all("alternateNames"),
        script: all("script"),
        vowels: all("vowels"),
        consonants: all("consonants"),
        grammatical_rules: all("grammaticalRules"),
        country_region: all("countryRegion"),
        community: all("community"),
        speakers,
        linguistic_family: all("linguisticFamily"),
        designations: all("designations"),
        date_created: first("dateCreated"),
        creator: all("creator"),
        origin: first("origin"),
        spatial: all("spatial"),
        description: all("description"),
        rights: first("rights"),
        legal_body_name: first("legalBodyName"),
        source: all("source"),
    }
    .normalize()
}

/// Verdict for one FAIR facet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FairCheck {
    pub pass: bool,
    pub reasons: Vec<String>,
}

impl FairCheck {
    fn from_reasons(reasons: Vec<String>) -> Self {
        FairCheck {
            pass: reasons.is_empty(),
            reasons,
        }
    }
}

/// Record-level FAIR assessment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FairReport {
    pub findable: FairCheck,
    pub accessible: FairCheck,
    pub interoperable: FairCheck,
    pub reusable: FairCheck,
    pub overall: bool,
}

/// FAIR checks operationalized field by field: identifier and name make the
/// record findable, a locatable custodian makes it accessible, DC
/// exportability plus a lineage make it interoperable, and a rights
/// statement makes it reusable.
pub fn validate_lpap(record: &LpapRecord) -> FairReport {
    let mut findable = Vec::new();
    if record.identifier.trim().is_empty() {
        findable.push("identifier missing".to_string());
    }
    if record.language_name.trim().is_empty() {
        findable.push("language name missing".to_string());
    }

    let mut accessible = Vec::new();
    if record.source.is_empty() && record.legal_body_name.is_none() {
        accessible.push("no locatable custodian: source and legalBodyName both missing".to_string());
    }

    let mut interoperable = Vec::new();
    if record.linguistic_family.is_empty() {
        interoperable.push("linguisticFamily empty".to_string());
    }
    // to_dc is total for a well-formed record; exportability is checked by
    // round-tripping the export through the strict DC schema in tests.

    let mut reusable = Vec::new();
    if record.rights.as_deref().map_or(true, |r| r.trim().is_empty()) {
        reusable.push("rights missing".to_string());
    }

    let findable = FairCheck::from_reasons(findable);
    let accessible = FairCheck::from_reasons(accessible);
    let interoperable = FairCheck::from_reasons(interoperable);
    let reusable = FairCheck::from_reasons(reusable);
    let overall = findable.pass && accessible.pass && interoperable.pass && reusable.pass;
    FairReport {
        findable,
        accessible,
        interoperable,
        reusable,
        overall,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record_model::{add_value, strict_check};
    use crate::schema_registry::{builtin_registry, parse_path};

    fn sora_facts() -> LanguageFacts {
        LanguageFacts {
            language_name: Some("Sora".into()),
            linguistic_family: vec!["Austroasiatic".into(), "Munda".into(), "Sora-Gorum".into()],
            ..Default::default()
        }
    }

    fn full_record() -> LpapRecord {
        LpapRecord {
            identifier: "hdl:1/2".into(),
            language_name: "Sora".into(),
            alternate_names: vec!["Savara".into()],
            script: vec!["Sorang Sompeng".into()],
            vowels: vec!["a".into(), "e".into(), "i".into()],
            consonants: vec!["b".into(), "d".into()],
            grammatical_rules: vec!["SOV word order".into()],
            country_region: vec!["India".into()],
            community: vec!["Sora community".into()],
            speakers: Some(Speakers { count: 300000, as_of: Some("2011".into()) }),
            linguistic_family: vec!["Austroasiatic".into(), "Munda".into(), "Sora-Gorum".into()],
            designations: vec!["vulnerable".into()],
            date_created: Some("2024-05-01".into()),
            creator: vec!["A. Linguist".into()],
            origin: Some("Odisha".into()),
            spatial: vec!["Odisha".into(), "Andhra Pradesh".into()],
            description: vec!["Field notes".into()],
            rights: Some("CC-BY".into()),
            legal_body_name: Some("DRTC".into()),
            source: vec!["field survey".into()],
        }
    }

    #[test]
    fn from_dc_with_facts() {
        let dc = parse_dc(&[("identifier", "hdl:1/2"), ("creator", "A. Linguist")]);
        let record = from_dc(&dc, &sora_facts()).unwrap();
        assert_eq!(record.identifier, "hdl:1/2");
        assert_eq!(record.language_name, "Sora");
        assert_eq!(record.creator, ["A. Linguist"]);
        assert_eq!(record.linguistic_family, ["Austroasiatic", "Munda", "Sora-Gorum"]);
    }

    fn parse_dc(leaves: &[(&str, &str)]) -> Record {
        let mut dc = Record::new("dc");
        for (p, v) in leaves {
            dc = add_value(&dc, &parse_path(p).unwrap(), *v, None).unwrap();
        }
        dc
    }

    #[test]
    fn facts_only_construction() {
        let mut facts = sora_facts();
        facts.identifier = Some("urn:x:1".into());
        let record = from_dc(&Record::new("dc"), &facts).unwrap();
        assert_eq!(record.identifier, "urn:x:1");
    }

    #[test]
    fn missing_identifier_everywhere() {
        assert!(matches!(
            from_dc(&Record::new("dc"), &sora_facts()),
            Err(Error::MissingIdentifier)
        ));
    }

    #[test]
    fn missing_language_name() {
        let dc = parse_dc(&[("identifier", "x")]);
        assert!(matches!(
            from_dc(&dc, &LanguageFacts::default()),
            Err(Error::MissingLanguageName)
        ));
    }

    #[test]
    fn to_dc_echoes_identifier() {
        let record = LpapRecord {
            identifier: "hdl:1/2".into(),
            language_name: "Sora".into(),
            ..Default::default()
        };
        let dc = to_dc(&record);
        assert_eq!(get_values(&dc, &parse_path("identifier").unwrap()), ["hdl:1/2"]);
    }

    #[test]
    fn to_dc_labels_vowels() {
        let mut record = full_record();
        record.vowels = vec!["a".into(), "e".into()];
        let dc = to_dc(&record);
        let descriptions = get_values(&dc, &parse_path("description").unwrap());
        assert!(descriptions.iter().any(|d| d == "vowels: a, e"));
    }

    #[test]
    fn round_trip_preserves_everything() {
        let record = full_record();
        let back = from_dc(&to_dc(&record), &LanguageFacts::default()).unwrap();
        assert_eq!(back, record);
    }

    #[test]
    fn to_dc_passes_strict_check() {
        let reg = builtin_registry();
        let dc = to_dc(&full_record());
        assert!(strict_check(&reg, &dc).unwrap().is_empty());
    }

    #[test]
    fn generic_record_round_trip() {
        let record = full_record();
        let back = from_record(&to_record(&record)).unwrap();
        assert_eq!(back, record);
    }

    #[test]
    fn fully_populated_record_is_fair() {
        let report = validate_lpap(&full_record());
        assert!(report.overall);
    }

    #[test]
    fn missing_rights_fails_only_reusable() {
        let mut record = full_record();
        record.rights = None;
        let report = validate_lpap(&record);
        assert!(report.findable.pass);
        assert!(report.accessible.pass);
        assert!(report.interoperable.pass);
        assert!(!report.reusable.pass);
        assert_eq!(report.reusable.reasons, ["rights missing"]);
        assert!(!report.overall);
    }

    #[test]
    fn empty_family_fails_interoperable() {
        let mut record = full_record();
        record.linguistic_family.clear();
        let report = validate_lpap(&record);
        assert!(!report.interoperable.pass);
    }

    #[test]
    fn construction_implies_findable() {
        let dc = parse_dc(&[("identifier", "hdl:1/2")]);
        let record = from_dc(&dc, &sora_facts()).unwrap();
        assert!(validate_lpap(&record).findable.pass);
    }
}
