//! Parsing and serialization: the canonical JSON record format, generic XML,
//! the oai_dc interchange form, and crosswalk table CSV.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::crosswalk::{CrosswalkTable, MappingRule, RuleKind};
use crate::error::{Error, Result};
use crate::record_model::{flatten, ElementInstance, Record};
use crate::schema_registry::{
    builtin_registry, join_path, lookup_element, parse_path, Registry, SchemaId,
};

#[derive(Serialize)]
struct CanonicalDocOut<'a> {
    schema: &'a SchemaId,
    elements: &'a [ElementInstance],
}

#[derive(Deserialize)]
struct CanonicalDocIn {
    schema: SchemaId,
    elements: Vec<NodeIn>,
}

/// A canonical element is either a nested node (`segment` + optional
/// `children`) or the flat shorthand (`path` + `value`), which expands to
/// nested containers on parse.
#[derive(Deserialize)]
#[serde(untagged)]
enum NodeIn {
    Nested(ElementInstance),
    Flat {
        path: Vec<String>,
        #[serde(default)]
        value: Option<String>,
        #[serde(default)]
        lang: Option<String>,
        #[serde(default)]
        attrs: BTreeMap<String, String>,
    },
}

fn check_segments(path: &[String]) -> Result<()> {
    if path.is_empty() {
        return Err(Error::MalformedPath(String::new()));
    }
    for seg in path {
        if seg.trim().is_empty() {
            return Err(Error::MalformedPath(join_path(path)));
        }
    }
    Ok(())
}

fn check_nested(node: &ElementInstance) -> Result<()> {
    if node.segment.trim().is_empty() {
        return Err(Error::MalformedPath(node.segment.clone()));
    }
    for child in &node.children {
        check_nested(child)?;
    }
    Ok(())
}

fn expand_flat(
    path: Vec<String>,
    value: Option<String>,
    lang: Option<String>,
    attrs: BTreeMap<String, String>,
) -> ElementInstance {
    let mut node = ElementInstance {
        segment: path[path.len() - 1].clone(),
        value,
        lang,
        attrs,
        children: Vec::new(),
    };
    for segment in path[..path.len() - 1].iter().rev() {
        let mut parent = ElementInstance::new(segment.clone());
        parent.children.push(node);
        node = parent;
    }
    node
}

/// Parse a canonical JSON document against the built-in registry.
pub fn parse_canonical(text: &str) -> Result<Record> {
    parse_canonical_with(text, &builtin_registry())
}

/// Parse a canonical JSON document; the schema id must be registered.
pub fn parse_canonical_with(text: &str, registry: &Registry) -> Result<Record> {
    let doc: CanonicalDocIn = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if !registry.contains(&doc.schema) {
        return Err(Error::UnknownSchema(doc.schema.to_string()));
    }
    let mut roots = Vec::new();
    for node in doc.elements {
        match node {
            NodeIn::Nested(n) => {
                check_nested(&n)?;
                roots.push(n);
            }
            NodeIn::Flat {
                path,
                value,
                lang,
                attrs,
            } => {
                check_segments(&path)?;
                roots.push(expand_flat(path, value, lang, attrs));
            }
        }
    }
    Ok(Record {
        schema: doc.schema,
        roots,
    })
}

/// Serialize a record in the canonical format: keys in the order segment,
/// value, lang, attrs, children; 2-space indentation; trailing newline.
/// Byte-deterministic for equal records.
pub fn serialize_canonical(record: &Record) -> String {
    let doc = CanonicalDocOut {
        schema: &record.schema,
        elements: &record.roots,
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("record serializes");
    out.push('\n');
    out
}

fn xml_node_to_instance(node: roxmltree::Node<'_, '_>, path: &mut Vec<String>) -> Result<ElementInstance> {
    let segment = node.tag_name().name().to_string();
    path.push(segment.clone());
    let mut instance = ElementInstance::new(segment);
    for attr in node.attributes() {
        if attr.name() == "lang" {
            instance.lang = Some(attr.value().to_string());
        } else {
            instance
                .attrs
                .insert(attr.name().to_string(), attr.value().to_string());
        }
    }
    let text: String = node
        .children()
        .filter(|c| c.is_text())
        .filter_map(|c| c.text())
        .collect();
    let text = text.trim().to_string();
    let element_children: Vec<_> = node.children().filter(|c| c.is_element()).collect();
    if !text.is_empty() && !element_children.is_empty() {
        return Err(Error::MixedContent {
            path: join_path(path),
        });
    }
    if !text.is_empty() {
        instance.value = Some(text);
    }
    for child in element_children {
        instance.children.push(xml_node_to_instance(child, path)?);
    }
    path.pop();
    Ok(instance)
}

/// Parse a generic XML document into a record of the given schema. The
/// document's root element is a wrapper; its children become record roots.
/// Namespace prefixes are stripped to local names, `xml:lang` becomes the
/// language tag, and mixed content is rejected.
pub fn parse_xml(text: &str, schema: impl Into<SchemaId>) -> Result<Record> {
    let doc = roxmltree::Document::parse(text).map_err(|e| {
        let pos = e.pos();
        Error::Syntax {
            line: pos.row as usize,
            column: pos.col as usize,
            message: e.to_string(),
        }
    })?;
    let root = doc.root_element();
    let own_text: String = root
        .children()
        .filter(|c| c.is_text())
        .filter_map(|c| c.text())
        .collect();
    if !own_text.trim().is_empty() && root.children().any(|c| c.is_element()) {
        return Err(Error::MixedContent {
            path: root.tag_name().name().to_string(),
        });
    }
    let mut record = Record::new(schema);
    let mut path = Vec::new();
    for child in root.children().filter(|c| c.is_element()) {
        record.roots.push(xml_node_to_instance(child, &mut path)?);
    }
    Ok(record)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Emit the standard oai_dc container for a DC record. Qualified terms dumb
/// down to their parent core element, matching harvesting practice; the
/// canonical JSON form is the one that keeps full qualifier paths.
pub fn serialize_oai_dc(record: &Record) -> Result<String> {
    if !record.schema.is_dc() {
        return Err(Error::WrongSchema {
            expected: "dc".to_string(),
            found: record.schema.to_string(),
        });
    }
    let mut out = String::new();
    out.push_str(
        "<oai_dc:dc xmlns:oai_dc=\"http://www.openarchives.org/OAI/2.0/oai_dc/\" \
         xmlns:dc=\"http://purl.org/dc/elements/1.1/\" \
         xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" \
         xsi:schemaLocation=\"http://www.openarchives.org/OAI/2.0/oai_dc/ \
http://www.openarchives.org/OAI/2.0/oai_dc.xsd\">\n",
    );
    for entry in flatten(record) {
        let Some(value) = entry.value else { continue };
        let term = &entry.path[0];
        let lang = entry
            .lang
            .map(|l| format!(" xml:lang=\"{}\"", xml_escape(&l)))
            .unwrap_or_default();
        out.push_str(&format!(
            "  <dc:{term}{lang}>{}</dc:{term}>\n",
            xml_escape(&value)
        ));
    }
    out.push_str("</oai_dc:dc>\n");
    Ok(out)
}

/// Load a crosswalk table from CSV and validate every rule against the
/// registry: known source schema, resolvable source path, known DC target.
pub fn load_crosswalk_table(text: &str, registry: &Registry) -> Result<CrosswalkTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Syntax {
            line: 1,
            column: 1,
            message: e.to_string(),
        })?
        .clone();
    let expected = ["source_schema", "source_path", "dc_term", "dc_qualifier", "kind", "note"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Syntax {
            line: 1,
            column: 1,
            message: format!("expected header {}", expected.join(",")),
        });
    }
    let dc_id = SchemaId::from(SchemaId::DC);
    let mut rules = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::Syntax {
            line,
            column: 1,
            message: e.to_string(),
        })?;
        let field = |n: usize| row.get(n).unwrap_or("").trim().to_string();
        let schema = SchemaId::new(field(0));
        let source_path = parse_path(&field(1))?;
        let dc_term = field(2);
        let dc_qualifier = match field(3) {
            q if q.is_empty() => None,
            q => Some(q),
        };
        let kind = RuleKind::parse(&field(4)).ok_or_else(|| Error::Syntax {
            line,
            column: 1,
            message: format!("unknown rule kind {:?}", field(4)),
        })?;
        let note = field(5);

        if !registry.contains(&schema) {
            return Err(Error::UnknownSchema(schema.to_string()));
        }
        if lookup_element(registry, &schema, &source_path).is_err() {
            return Err(Error::UnresolvableSourcePath {
                row: line,
                schema: schema.to_string(),
                path: join_path(&source_path),
            });
        }
        let mut dc_path = vec![dc_term.clone()];
        if let Some(q) = &dc_qualifier {
            dc_path.push(q.clone());
        }
        if lookup_element(registry, &dc_id, &dc_path).is_err() {
            return Err(Error::UnknownDcTerm {
                term: dc_term.clone(),
                qualifier: dc_qualifier.clone(),
            });
        }
        // The CSV header has no dedicated ambiguity column; a note starting
        // with "ambiguous:" flags the rule.
        let ambiguous = note.starts_with("ambiguous:");
        rules.push(MappingRule {
            source_schema: schema,
            source_path,
            dc_term,
            dc_qualifier,
            kind,
            note,
            ambiguous,
        });
    }
    CrosswalkTable::new(rules)
}

/// Serialize a crosswalk table back to the CSV format; inverse of
/// [`load_crosswalk_table`].
pub fn serialize_crosswalk_table(table: &CrosswalkTable) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["source_schema", "source_path", "dc_term", "dc_qualifier", "kind", "note"])
        .expect("header writes");
    for rule in table.rules() {
        writer
            .write_record([
                rule.source_schema.as_str(),
                &join_path(&rule.source_path),
                &rule.dc_term,
                rule.dc_qualifier.as_deref().unwrap_or(""),
                rule.kind.as_str(),
                &rule.note,
            ])
            .expect("row writes");
    }
    String::from_utf8(writer.into_inner().expect("csv flushes")).expect("csv is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crosswalk::builtin_table;
    use crate::record_model::{add_value, get_values};
    use crate::schema_registry::parse_path;

    fn p(s: &str) -> Vec<String> {
        parse_path(s).unwrap()
    }

    #[test]
    fn parse_minimal_canonical() {
        let r = parse_canonical(r#"{"schema":"dc","elements":[{"path":["title"],"value":"Sora wordlist"}]}"#)
            .unwrap();
        assert_eq!(r.schema.as_str(), "dc");
        assert_eq!(get_values(&r, &p("title")), ["Sora wordlist"]);
    }

    #[test]
    fn parse_carare_appellation() {
        let r = parse_canonical(r#"{"schema":"carare","elements":[{"path":["Appellation"],"value":"T"}]}"#)
            .unwrap();
        assert_eq!(get_values(&r, &p("Appellation")), ["T"]);
    }

    #[test]
    fn truncated_document_is_syntax_error() {
        assert!(matches!(
            parse_canonical(r#"{"schema":"dc","elements":["#),
            Err(Error::Syntax { .. })
        ));
    }

    #[test]
    fn unknown_schema_rejected() {
        assert!(matches!(
            parse_canonical(r#"{"schema":"marc","elements":[]}"#),
            Err(Error::UnknownSchema(_))
        ));
    }

    #[test]
    fn serialize_empty_record() {
        let text = serialize_canonical(&Record::new("dc"));
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["schema"], "dc");
        assert_eq!(parsed["elements"].as_array().unwrap().len(), 0);
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn serialization_is_deterministic() {
        let r = add_value(&Record::new("dc"), &p("title"), "T", None).unwrap();
        assert_eq!(serialize_canonical(&r), serialize_canonical(&r));
    }

    #[test]
    fn canonical_round_trip() {
        let r = add_value(&Record::new("lido"), &p("titleSet/appellationValue"), "Y", Some("en".into()))
            .unwrap();
        let back = parse_canonical(&serialize_canonical(&r)).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn parse_xml_single_element() {
        let r = parse_xml("<record><Appellation>X</Appellation></record>", "carare").unwrap();
        assert_eq!(get_values(&r, &p("Appellation")), ["X"]);
    }

    #[test]
    fn parse_xml_nested_path_preserved() {
        let r = parse_xml(
            "<lido><titleSet><appellationValue>Y</appellationValue></titleSet></lido>",
            "lido",
        )
        .unwrap();
        assert_eq!(get_values(&r, &p("titleSet/appellationValue")), ["Y"]);
    }

    #[test]
    fn parse_xml_unclosed_tag() {
        assert!(matches!(
            parse_xml("<record><Appellation>X</record>", "carare"),
            Err(Error::Syntax { .. })
        ));
    }

    #[test]
    fn parse_xml_strips_namespace_prefixes() {
        let r = parse_xml(
            "<r xmlns:dc=\"http://purl.org/dc/elements/1.1/\"><dc:title>T</dc:title></r>",
            "dc",
        )
        .unwrap();
        assert_eq!(get_values(&r, &p("title")), ["T"]);
    }

    #[test]
    fn parse_xml_rejects_mixed_content() {
        assert!(matches!(
            parse_xml("<r><a>text<b>x</b></a></r>", "carare"),
            Err(Error::MixedContent { .. })
        ));
    }

    #[test]
    fn parse_xml_captures_lang_and_attrs() {
        let r = parse_xml(
            "<r><title xml:lang=\"en\" type=\"main\">T</title></r>",
            "dc",
        )
        .unwrap();
        let flat = flatten(&r);
        assert_eq!(flat[0].lang.as_deref(), Some("en"));
        assert_eq!(flat[0].attrs.get("type").map(String::as_str), Some("main"));
    }

    #[test]
    fn oai_dc_core_element() {
        let r = add_value(&Record::new("dc"), &p("title"), "T", None).unwrap();
        let xml = serialize_oai_dc(&r).unwrap();
        assert!(xml.contains("<dc:title>T</dc:title>"));
    }

    #[test]
    fn oai_dc_dumbs_down_qualifiers() {
        let r = add_value(&Record::new("dc"), &p("date/created"), "1921", None).unwrap();
        let xml = serialize_oai_dc(&r).unwrap();
        assert!(xml.contains("<dc:date>1921</dc:date>"));
        assert!(!xml.contains("created"));
    }

    #[test]
    fn oai_dc_empty_record_is_well_formed() {
        let xml = serialize_oai_dc(&Record::new("dc")).unwrap();
        assert!(roxmltree::Document::parse(&xml).is_ok());
        assert!(!xml.contains("<dc:"));
    }

    #[test]
    fn oai_dc_wrong_schema() {
        assert!(matches!(
            serialize_oai_dc(&Record::new("carare")),
            Err(Error::WrongSchema { .. })
        ));
    }

    #[test]
    fn load_single_row_table() {
        let reg = builtin_registry();
        let table = load_crosswalk_table(
            "source_schema,source_path,dc_term,dc_qualifier,kind,note\narchaeo-core,Artefact Title,title,,exact,\n",
            &reg,
        )
        .unwrap();
        assert_eq!(table.rules().len(), 1);
        assert_eq!(table.rules()[0].dc_term, "title");
    }

    #[test]
    fn unresolvable_source_path_rejected() {
        let reg = builtin_registry();
        let err = load_crosswalk_table(
            "source_schema,source_path,dc_term,dc_qualifier,kind,note\narchaeo-core,Nope,title,,exact,\n",
            &reg,
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnresolvableSourcePath { .. }));
    }

    #[test]
    fn unknown_dc_term_rejected() {
        let reg = builtin_registry();
        let err = load_crosswalk_table(
            "source_schema,source_path,dc_term,dc_qualifier,kind,note\ncarare,Appellation,frobnicate,,exact,\n",
            &reg,
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnknownDcTerm { .. }));
    }

    #[test]
    fn table_csv_round_trip() {
        let reg = builtin_registry();
        let table = builtin_table();
        let text = serialize_crosswalk_table(&table);
        let reloaded = load_crosswalk_table(&text, &reg).unwrap();
        assert_eq!(reloaded.rules(), table.rules());
    }
}
