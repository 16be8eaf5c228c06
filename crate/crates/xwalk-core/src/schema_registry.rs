//! Machine-readable definitions of the built-in metadata schemas and element lookup.
//!
//! Five schemas ship with the crate: `archaeo-core`, `carare`, `lido`, `dc`
//! (the pivot) and `lpap`. Their descriptors live under `schemas/` at the
//! repository root and are embedded at build time. Additional schemas can be
//! loaded from descriptor documents with [`load_schema`].

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of a registered schema, e.g. `"dc"` or `"carare"`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SchemaId(String);

impl SchemaId {
    pub const ARCHAEO_CORE: &'static str = "archaeo-core";
    pub const CARARE: &'static str = "carare";
    pub const LIDO: &'static str = "lido";
    pub const DC: &'static str = "dc";
    pub const LPAP: &'static str = "lpap";

    pub fn new(id: impl Into<String>) -> Self {
        SchemaId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_dc(&self) -> bool {
        self.0 == Self::DC
    }
}

impl fmt::Display for SchemaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for SchemaId {
    fn from(s: &str) -> Self {
        SchemaId(s.to_string())
    }
}

/// An element path: ordered label segments from the schema root.
pub type Path = Vec<String>;

/// Parse a `/`-separated path string into segments.
pub fn parse_path(s: &str) -> Result<Path> {
    if s.is_empty() {
        return Err(Error::EmptyPath);
    }
    let segments: Vec<String> = s.split('/').map(str::to_string).collect();
    for seg in &segments {
        if seg.trim().is_empty() {
            return Err(Error::MalformedPath(s.to_string()));
        }
    }
    Ok(segments)
}

/// Join path segments with `/`.
pub fn join_path(path: &[String]) -> String {
    path.join("/")
}

/// Datatype assigned to an element's values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Datatype {
    Text,
    Date,
    Coordinates,
    Identifier,
    Uri,
    ControlledTerm,
    Count,
}

/// Definition of one element within a schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementDef {
    #[serde(skip)]
    pub schema: SchemaId,
    pub path: Path,
    pub label: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub definition: String,
    pub datatype: Datatype,
    pub repeatable: bool,
    pub required: bool,
}

impl ElementDef {
    /// Joined path string, the lookup key within one schema.
    pub fn path_str(&self) -> String {
        join_path(&self.path)
    }
}

/// The element tree of one metadata standard.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaDef {
    pub id: SchemaId,
    pub name: String,
    pub description: String,
    elements: Vec<ElementDef>,
    index: HashMap<String, usize>,
}

impl SchemaDef {
    /// Build a schema from parts, enforcing the element invariants:
    /// non-empty paths, unique paths, and a registered parent for every
    /// nested path.
    pub fn new(
        id: SchemaId,
        name: impl Into<String>,
        description: impl Into<String>,
        mut elements: Vec<ElementDef>,
    ) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, elem) in elements.iter_mut().enumerate() {
            elem.schema = id.clone();
            if elem.path.is_empty() {
                return Err(Error::EmptyPath);
            }
            for seg in &elem.path {
                if seg.trim().is_empty() {
                    return Err(Error::MalformedPath(join_path(&elem.path)));
                }
            }
            let key = join_path(&elem.path);
            if index.insert(key.clone(), i).is_some() {
                return Err(Error::DuplicatePath {
                    schema: id.to_string(),
                    path: key,
                });
            }
        }
        // Parent check runs after the index is complete so declaration order
        // within the descriptor does not matter.
        for elem in &elements {
            if elem.path.len() > 1 {
                let parent = join_path(&elem.path[..elem.path.len() - 1]);
                if !index.contains_key(&parent) {
                    return Err(Error::OrphanChildPath {
                        schema: id.to_string(),
                        path: join_path(&elem.path),
                    });
                }
            }
        }
        Ok(SchemaDef {
            id,
            name: name.into(),
            description: description.into(),
            elements,
            index,
        })
    }

    /// Elements in document order of the descriptor.
    pub fn elements(&self) -> &[ElementDef] {
        &self.elements
    }

    pub fn get(&self, path: &[String]) -> Option<&ElementDef> {
        self.index.get(&join_path(path)).map(|&i| &self.elements[i])
    }

    pub fn contains(&self, path: &[String]) -> bool {
        self.index.contains_key(&join_path(path))
    }

    /// True if `path` resolves to an element that has child elements.
    pub fn is_container(&self, path: &[String]) -> bool {
        let prefix = join_path(path);
        self.elements.iter().any(|e| {
            e.path.len() > path.len() && join_path(&e.path[..path.len()]) == prefix
        })
    }
}

#[derive(Deserialize, Serialize)]
struct Descriptor {
    id: SchemaId,
    name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    description: String,
    elements: Vec<ElementDef>,
}

/// Parse a schema-descriptor document (JSON) into a validated [`SchemaDef`].
pub fn load_schema(document: &str) -> Result<SchemaDef> {
    let descriptor: Descriptor = serde_json::from_str(document).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    SchemaDef::new(
        descriptor.id,
        descriptor.name,
        descriptor.description,
        descriptor.elements,
    )
}

/// Serialize a schema back into the descriptor format.
pub fn serialize_schema(schema: &SchemaDef) -> String {
    let descriptor = Descriptor {
        id: schema.id.clone(),
        name: schema.name.clone(),
        description: schema.description.clone(),
        elements: schema.elements.clone(),
    };
    let mut out = serde_json::to_string_pretty(&descriptor).expect("descriptor serializes");
    out.push('\n');
    out
}

/// Holds registered schemas and answers element lookups. Immutable after
/// construction; lookups are read-only.
#[derive(Debug, Clone)]
pub struct Registry {
    schemas: Vec<SchemaDef>,
    index: HashMap<String, usize>,
}

const BUILTIN_DESCRIPTORS: [&str; 5] = [
    include_str!("../../../schemas/archaeo-core.json"),
    include_str!("../../../schemas/carare.json"),
    include_str!("../../../schemas/lido.json"),
    include_str!("../../../schemas/dc.json"),
    include_str!("../../../schemas/lpap.json"),
];

impl Registry {
    pub fn empty() -> Self {
        Registry {
            schemas: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn register(&mut self, schema: SchemaDef) -> Result<()> {
        if self.index.contains_key(schema.id.as_str()) {
            return Err(Error::DuplicatePath {
                schema: schema.id.to_string(),
                path: String::new(),
            });
        }
        self.index
            .insert(schema.id.as_str().to_string(), self.schemas.len());
        self.schemas.push(schema);
        Ok(())
    }

    pub fn schema(&self, id: &SchemaId) -> Result<&SchemaDef> {
        self.index
            .get(id.as_str())
            .map(|&i| &self.schemas[i])
            .ok_or_else(|| Error::UnknownSchema(id.to_string()))
    }

    pub fn contains(&self, id: &SchemaId) -> bool {
        self.index.contains_key(id.as_str())
    }

    /// Schema ids in registration order.
    pub fn schema_ids(&self) -> Vec<SchemaId> {
        self.schemas.iter().map(|s| s.id.clone()).collect()
    }

    pub fn schemas(&self) -> &[SchemaDef] {
        &self.schemas
    }
}

/// The registry holding the five built-in schema definitions. Total: the
/// embedded descriptors are validated by the test suite, so construction
/// cannot fail at runtime.
pub fn builtin_registry() -> Registry {
    let mut registry = Registry::empty();
    for doc in BUILTIN_DESCRIPTORS {
        let schema = load_schema(doc).expect("built-in descriptor is valid");
        registry.register(schema).expect("built-in ids are distinct");
    }
    registry
}

/// Look up one element by schema and path.
pub fn lookup_element<'r>(
    registry: &'r Registry,
    schema: &SchemaId,
    path: &[String],
) -> Result<&'r ElementDef> {
    let def = registry.schema(schema)?;
    def.get(path).ok_or_else(|| Error::UnknownPath {
        schema: schema.to_string(),
        path: join_path(path),
    })
}

/// All elements of a schema in descriptor document order.
pub fn list_elements<'r>(registry: &'r Registry, schema: &SchemaId) -> Result<&'r [ElementDef]> {
    Ok(registry.schema(schema)?.elements())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Path {
        parse_path(s).unwrap()
    }

    #[test]
    fn builtin_has_exactly_five_schemas() {
        let reg = builtin_registry();
        let ids: Vec<String> = reg.schema_ids().iter().map(|s| s.to_string()).collect();
        assert_eq!(ids, ["archaeo-core", "carare", "lido", "dc", "lpap"]);
    }

    #[test]
    fn lookup_artefact_title() {
        let reg = builtin_registry();
        let def = lookup_element(&reg, &SchemaId::from("archaeo-core"), &p("Artefact Title")).unwrap();
        assert_eq!(def.label, "Artefact Title");
    }

    #[test]
    fn lookup_nested_lido_title() {
        let reg = builtin_registry();
        assert!(lookup_element(&reg, &SchemaId::from("lido"), &p("titleSet/appellationValue")).is_ok());
    }

    #[test]
    fn dc_has_fifteen_core_elements() {
        let reg = builtin_registry();
        let core = list_elements(&reg, &SchemaId::from("dc"))
            .unwrap()
            .iter()
            .filter(|e| e.path.len() == 1)
            .count();
        assert_eq!(core, 15);
    }

    #[test]
    fn carare_appellation_lookup() {
        let reg = builtin_registry();
        let def = lookup_element(&reg, &SchemaId::from("carare"), &p("Appellation")).unwrap();
        assert_eq!(def.label, "Appellation");
    }

    #[test]
    fn dc_title_lookup() {
        let reg = builtin_registry();
        assert!(lookup_element(&reg, &SchemaId::from("dc"), &p("title")).is_ok());
    }

    #[test]
    fn unknown_path_is_an_error() {
        let reg = builtin_registry();
        let err = lookup_element(&reg, &SchemaId::from("lido"), &p("nonexistent")).unwrap_err();
        assert!(matches!(err, Error::UnknownPath { .. }));
    }

    #[test]
    fn unknown_schema_is_an_error() {
        let reg = builtin_registry();
        let err = list_elements(&reg, &SchemaId::from("marc")).unwrap_err();
        assert!(matches!(err, Error::UnknownSchema(_)));
    }

    #[test]
    fn list_elements_contains_uniques() {
        let reg = builtin_registry();
        let ac: Vec<&str> = list_elements(&reg, &SchemaId::from("archaeo-core"))
            .unwrap()
            .iter()
            .map(|e| e.label.as_str())
            .collect();
        assert!(ac.contains(&"Artefact Munsell Number"));

        let lpap: Vec<String> = list_elements(&reg, &SchemaId::from("lpap"))
            .unwrap()
            .iter()
            .map(|e| e.path_str())
            .collect();
        assert!(lpap.iter().any(|p| p == "vowels"));
        assert!(lpap.iter().any(|p| p == "consonants"));
    }

    #[test]
    fn list_elements_is_deterministic() {
        let a = builtin_registry();
        let b = builtin_registry();
        for id in ["archaeo-core", "carare", "lido", "dc", "lpap"] {
            let ea = list_elements(&a, &SchemaId::from(id)).unwrap();
            let eb = list_elements(&b, &SchemaId::from(id)).unwrap();
            assert_eq!(ea, eb);
        }
    }

    #[test]
    fn load_minimal_descriptor() {
        let doc = r#"{"id":"mini","name":"Mini","elements":[
            {"path":["foo"],"label":"Foo","datatype":"text","repeatable":true,"required":false}]}"#;
        let schema = load_schema(doc).unwrap();
        assert_eq!(schema.elements().len(), 1);
    }

    #[test]
    fn duplicate_path_rejected() {
        let doc = r#"{"id":"dup","name":"Dup","elements":[
            {"path":["foo"],"label":"Foo","datatype":"text","repeatable":true,"required":false},
            {"path":["foo"],"label":"Foo2","datatype":"text","repeatable":true,"required":false}]}"#;
        assert!(matches!(load_schema(doc), Err(Error::DuplicatePath { .. })));
    }

    #[test]
    fn orphan_child_rejected() {
        let doc = r#"{"id":"orph","name":"Orphan","elements":[
            {"path":["a","b"],"label":"B","datatype":"text","repeatable":true,"required":false}]}"#;
        assert!(matches!(load_schema(doc), Err(Error::OrphanChildPath { .. })));
    }

    #[test]
    fn parse_error_carries_position() {
        match load_schema("{ not json") {
            Err(Error::Syntax { line, .. }) => assert!(line >= 1),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn descriptor_round_trip() {
        let reg = builtin_registry();
        for id in ["archaeo-core", "carare", "lido", "dc", "lpap"] {
            let schema = reg.schema(&SchemaId::from(id)).unwrap();
            let text = serialize_schema(schema);
            let reloaded = load_schema(&text).unwrap();
            assert_eq!(&reloaded, schema, "round-trip mismatch for {id}");
        }
    }
}
