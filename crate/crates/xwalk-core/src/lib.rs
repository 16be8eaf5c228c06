//! Schema registry and crosswalk engine for cultural-heritage metadata.
//!
//! Transforms records among Archaeo-core, CARARE, LIDO and Dublin Core via a
//! Dublin Core pivot, builds and validates records in the Language
//! Preservation Application Profile (LPAP), and harvests records over
//! OAI-PMH.
//!
//! ```
//! use xwalk_core::prelude::*;
//!
//! let registry = builtin_registry();
//! let table = builtin_table();
//! let record = add_value(
//!     &Record::new("archaeo-core"),
//!     &parse_path("Artefact Title").unwrap(),
//!     "Ochre pot",
//!     None,
//! ).unwrap();
//! let result = transform(&table, &registry, &record, &"lido".into()).unwrap();
//! assert_eq!(result.loss.fidelity, 1.0);
//! ```

pub mod crosswalk;
pub mod error;
pub mod harvest;
pub mod io_formats;
pub mod lpap;
pub mod record_model;
pub mod schema_registry;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::crosswalk::{
        builtin_table, coverage_report, from_pivot, map_element, reverse_map, shared_terms,
        to_pivot, transform, unique_elements, CrosswalkResult, CrosswalkTable, LossReport,
        MappingRule, RuleKind,
    };
    pub use crate::error::{Error, Result};
    pub use crate::harvest::{harvest, ingest_dir, HarvestBatch, HarvestConfig, IngestOutcome};
    pub use crate::io_formats::{
        load_crosswalk_table, parse_canonical, parse_canonical_with, parse_xml,
        serialize_canonical, serialize_crosswalk_table, serialize_oai_dc,
    };
    pub use crate::lpap::{
        from_dc, to_dc, validate_lpap, FairReport, LanguageFacts, LpapRecord, Speakers,
    };
    pub use crate::record_model::{
        add_value, flatten, get_values, strict_check, ElementInstance, Record,
    };
    pub use crate::schema_registry::{
        builtin_registry, join_path, list_elements, load_schema, lookup_element, parse_path,
        ElementDef, Registry, SchemaDef, SchemaId,
    };
}
