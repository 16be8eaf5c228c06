//! `xwalk`: crosswalk heritage metadata records through the Dublin Core
//! pivot, inspect mapping coverage, build and validate language records,
//! and harvest OAI-PMH endpoints.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use xwalk_core::prelude::*;

// Exit codes are a scripting contract: 0 success, 1 findings present,
// 2 usage error (clap's default), 3 input parse error, 4 network error.
const EXIT_FINDINGS: u8 = 1;
const EXIT_PARSE: u8 = 3;
const EXIT_NETWORK: u8 = 4;

#[derive(Parser)]
#[command(name = "xwalk", version, about = "Metadata schema crosswalk toolkit")]
struct Cli {
    /// Output format for listings and summaries.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Suppress summary output on standard error.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InFormat {
    Json,
    Xml,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in schemas.
    Schemas,
    /// Transform a record between schemas through the Dublin Core pivot.
    Map {
        /// Input record file (.json canonical or .xml generic).
        input: PathBuf,
        /// Schema of the input record.
        #[arg(long)]
        from: String,
        /// Target schema.
        #[arg(long, default_value = "dc")]
        to: String,
        /// Output file (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the extension-inferred input format.
        #[arg(long, value_enum)]
        in_format: Option<InFormat>,
    },
    /// Print the coverage report for a crosswalk table.
    Report {
        /// Crosswalk table CSV (default: built-in table).
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Language-preservation records.
    Lpap {
        #[command(subcommand)]
        command: LpapCommand,
    },
    /// Harvest an OAI-PMH endpoint into a directory of canonical records.
    Harvest {
        #[arg(long)]
        endpoint: String,
        /// OAI metadata prefix.
        #[arg(long, default_value = "oai_dc")]
        prefix: String,
        /// Stop after this many records.
        #[arg(long)]
        max: Option<usize>,
        /// Output directory; one file per record.
        #[arg(long)]
        out: PathBuf,
        /// Retries after the first failed request.
        #[arg(long, default_value_t = 3)]
        retry_limit: u32,
        /// Base backoff delay in milliseconds, doubled per retry.
        #[arg(long, default_value_t = 500)]
        backoff_ms: u64,
    },
}

#[derive(Subcommand)]
enum LpapCommand {
    /// Build a language record from a DC record plus supplementary facts.
    Build {
        /// DC record in canonical JSON.
        #[arg(long)]
        dc: PathBuf,
        /// Language facts JSON file.
        #[arg(long)]
        facts: Option<PathBuf>,
    },
    /// Check a language record against the FAIR facets.
    Validate {
        /// Language record JSON file.
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(error_code(&err))
        }
    }
}

fn error_code(err: &Error) -> u8 {
    match err {
        Error::NetworkUnreachable { .. } | Error::Protocol { .. } => EXIT_NETWORK,
        _ => EXIT_PARSE,
    }
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Schemas => cmd_schemas(cli),
        Command::Map {
            input,
            from,
            to,
            out,
            in_format,
        } => cmd_map(cli, input, from, to, out.as_deref(), *in_format),
        Command::Report { table } => cmd_report(table.as_deref()),
        Command::Lpap { command } => match command {
            LpapCommand::Build { dc, facts } => cmd_lpap_build(dc, facts.as_deref()),
            LpapCommand::Validate { input } => cmd_lpap_validate(input),
        },
        Command::Harvest {
            endpoint,
            prefix,
            max,
            out,
            retry_limit,
            backoff_ms,
        } => cmd_harvest(cli, endpoint, prefix, *max, out, *retry_limit, *backoff_ms),
    }
}

fn read_input(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(Error::Io)
}

/// Write to standard output, ignoring a closed pipe (e.g. `xwalk ... | head`).
fn emit(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn emit_line(text: &str) {
    emit(text);
    emit("\n");
}

fn cmd_schemas(cli: &Cli) -> Result<u8> {
    let registry = builtin_registry();
    match cli.format {
        Format::Text => {
            for schema in registry.schemas() {
                emit_line(&format!(
                    "{}\t{}\t{} elements",
                    schema.id.as_str(),
                    schema.name,
                    schema.elements().len()
                ));
            }
        }
        Format::Json => {
            let listing: Vec<serde_json::Value> = registry
                .schemas()
                .iter()
                .map(|s| {
                    serde_json::json!({
                        "id": s.id.as_str(),
                        "name": s.name,
                        "elements": s.elements().len(),
                    })
                })
                .collect();
            emit_line(&serde_json::to_string_pretty(&listing).unwrap());
        }
    }
    Ok(0)
}

fn parse_record(text: &str, path: &Path, from: &str, in_format: Option<InFormat>) -> Result<Record> {
    let format = in_format.unwrap_or_else(|| {
        match path.extension().and_then(|e| e.to_str()) {
            Some("xml") => InFormat::Xml,
            _ => InFormat::Json,
        }
    });
    let record = match format {
        InFormat::Json => parse_canonical_with(text, &builtin_registry())?,
        InFormat::Xml => parse_xml(text, from)?,
    };
    if record.schema.as_str() != from {
        return Err(Error::WrongSchema {
            expected: from.to_string(),
            found: record.schema.as_str().to_string(),
        });
    }
    Ok(record)
}

fn cmd_map(
    cli: &Cli,
    input: &Path,
    from: &str,
    to: &str,
    out: Option<&Path>,
    in_format: Option<InFormat>,
) -> Result<u8> {
    let registry = builtin_registry();
    let table = builtin_table();
    let record = parse_record(&read_input(input)?, input, from, in_format)?;
    let result = transform(&table, &registry, &record, &to.into())?;
    let output = serialize_canonical(&result.output);
    match out {
        Some(path) => std::fs::write(path, output).map_err(Error::Io)?,
        None => emit(&output),
    }
    if !cli.quiet {
        eprintln!("{}", serde_json::to_string(&result.loss).unwrap());
    }
    Ok(if result.loss.fidelity == 1.0 { 0 } else { EXIT_FINDINGS })
}

fn cmd_report(table_path: Option<&Path>) -> Result<u8> {
    let registry = builtin_registry();
    let table = match table_path {
        Some(path) => load_crosswalk_table(&read_input(path)?, &registry)?,
        None => builtin_table(),
    };
    let report = coverage_report(&table, &registry)?;
    emit_line(&serde_json::to_string_pretty(&report).unwrap());
    Ok(0)
}

fn cmd_lpap_build(dc_path: &Path, facts_path: Option<&Path>) -> Result<u8> {
    let dc = parse_canonical_with(&read_input(dc_path)?, &builtin_registry())?;
    let facts: LanguageFacts = match facts_path {
        Some(path) => serde_json::from_str(&read_input(path)?)
            .map_err(|e| Error::Syntax {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?,
        None => LanguageFacts::default(),
    };
    let record = from_dc(&dc, &facts)?;
    emit_line(&serde_json::to_string_pretty(&record).unwrap());
    Ok(0)
}

fn cmd_lpap_validate(input: &Path) -> Result<u8> {
    let record: LpapRecord = serde_json::from_str(&read_input(input)?)
        .map_err(|e| Error::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
    let record = record.normalize()?;
    let report = validate_lpap(&record);
    emit_line(&serde_json::to_string_pretty(&report).unwrap());
    Ok(if report.overall { 0 } else { EXIT_FINDINGS })
}

fn sanitize_identifier(identifier: &str) -> String {
    identifier
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect()
}

fn cmd_harvest(
    cli: &Cli,
    endpoint: &str,
    prefix: &str,
    max: Option<usize>,
    out: &Path,
    retry_limit: u32,
    backoff_ms: u64,
) -> Result<u8> {
    let mut config = HarvestConfig::new(endpoint);
    config.metadata_prefix = prefix.to_string();
    config.max_records = max;
    config.retry_limit = retry_limit;
    config.backoff_base_millis = backoff_ms;
    let batch = harvest(&config)?;

    std::fs::create_dir_all(out).map_err(Error::Io)?;
    for harvested in &batch.records {
        let name = format!("{}.json", sanitize_identifier(&harvested.identifier));
        std::fs::write(out.join(name), serialize_canonical(&harvested.record))
            .map_err(Error::Io)?;
    }
    if !cli.quiet {
        match cli.format {
            Format::Text => eprintln!(
                "harvested {} records ({}), {} record errors",
                batch.records.len(),
                if batch.incomplete { "incomplete" } else { "complete" },
                batch.errors.len()
            ),
            Format::Json => eprintln!(
                "{}",
                serde_json::json!({
                    "records": batch.records.len(),
                    "incomplete": batch.incomplete,
                    "errors": batch.errors.len(),
                })
            ),
        }
    }
    Ok(0)
}
