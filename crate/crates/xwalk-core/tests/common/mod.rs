//! Shared fixtures: a canned-response OAI-PMH stub server and record
//! generators for property tests.
// each test binary uses a subset of these helpers
#![allow(dead_code)]

use std::io::{Read, Write};
use std::net::TcpListener;

use proptest::prelude::*;
use xwalk_core::prelude::*;

/// Serve canned HTTP responses on a local port. The handler receives the
/// request target (path + query) and returns the response body. Returns the
/// endpoint URL.
pub fn stub_server(handler: impl Fn(&str) -> String + Send + 'static) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").expect("bind stub server");
    let port = listener.local_addr().unwrap().port();
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let mut buf = [0u8; 8192];
            let mut request = Vec::new();
            loop {
                match stream.read(&mut buf) {
                    Ok(0) => break,
                    Ok(n) => {
                        request.extend_from_slice(&buf[..n]);
                        if request.windows(4).any(|w| w == b"\r\n\r\n") {
                            break;
                        }
                    }
                    Err(_) => break,
                }
            }
            let request = String::from_utf8_lossy(&request);
            let target = request
                .lines()
                .next()
                .and_then(|line| line.split_whitespace().nth(1))
                .unwrap_or("/")
                .to_string();
            let body = handler(&target);
            let response = format!(
                "HTTP/1.1 200 OK\r\nContent-Type: text/xml\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
                body.len(),
                body
            );
            let _ = stream.write_all(response.as_bytes());
        }
    });
    format!("http://127.0.0.1:{port}/oai")
}

/// Build a ListRecords response page. Each record is (identifier,
/// datestamp, DC leaves); `token` emits a resumptionToken element.
pub fn oai_page(records: &[(&str, &str, &[(&str, &str)])], token: Option<&str>) -> String {
    let mut body = String::from(
        r#"<?xml version="1.0" encoding="UTF-8"?>
<OAI-PMH xmlns="http://www.openarchives.org/OAI/2.0/">
<responseDate>2024-01-01T00:00:00Z</responseDate>
<ListRecords>
"#,
    );
    for (identifier, datestamp, leaves) in records {
        body.push_str("<record><header>");
        body.push_str(&format!("<identifier>{identifier}</identifier>"));
        body.push_str(&format!("<datestamp>{datestamp}</datestamp>"));
        body.push_str("</header><metadata>");
        body.push_str(
            r#"<oai_dc:dc xmlns:oai_dc="http://www.openarchives.org/OAI/2.0/oai_dc/" xmlns:dc="http://purl.org/dc/elements/1.1/">"#,
        );
        for (term, value) in *leaves {
            body.push_str(&format!("<dc:{term}>{value}</dc:{term}>"));
        }
        body.push_str("</oai_dc:dc></metadata></record>\n");
    }
    if let Some(token) = token {
        body.push_str(&format!("<resumptionToken>{token}</resumptionToken>\n"));
    }
    body.push_str("</ListRecords>\n</OAI-PMH>\n");
    body
}

pub fn oai_error(code: &str, message: &str) -> String {
    format!(
        r#"<?xml version="1.0" encoding="UTF-8"?>
<OAI-PMH xmlns="http://www.openarchives.org/OAI/2.0/">
<error code="{code}">{message}</error>
</OAI-PMH>
"#
    )
}

/// Leaf value strategy; no colons, so values never collide with the LPAP
/// labeled-description convention.
pub fn arb_value() -> impl Strategy<Value = String> {
    "[A-Za-z0-9 ]{0,20}"
}

fn schema_paths(schema: &str) -> Vec<Vec<String>> {
    let registry = builtin_registry();
    registry
        .schema(&schema.into())
        .unwrap()
        .elements()
        .iter()
        .map(|e| e.path.clone())
        .collect()
}

/// Random valid records of a built-in schema, built from add_value calls
/// over the schema's own element paths.
pub fn arb_record(schema: &'static str) -> impl Strategy<Value = Record> {
    let paths = schema_paths(schema);
    prop::collection::vec((0..paths.len(), arb_value()), 0..12).prop_map(move |leaves| {
        let mut record = Record::new(schema);
        for (idx, value) in leaves {
            record = add_value(&record, &paths[idx], value, None).unwrap();
        }
        record
    })
}

fn arb_token() -> impl Strategy<Value = String> {
    "[a-z]{1,6}"
}

fn arb_tokens(max: usize) -> impl Strategy<Value = Vec<String>> {
    prop::collection::btree_set(arb_token(), 0..max).prop_map(|s| s.into_iter().collect())
}

/// Random valid LPAP records.
pub fn arb_lpap_record() -> impl Strategy<Value = LpapRecord> {
    let part1 = (
        "[a-z0-9:/]{1,12}",
        arb_token(),
        arb_tokens(3),
        arb_tokens(3),
        arb_tokens(5),
        arb_tokens(5),
        arb_tokens(3),
        arb_tokens(3),
        arb_tokens(3),
        prop::option::of((any::<u32>(), prop::option::of("[0-9]{4}"))),
    );
    let part2 = (
        arb_tokens(4),
        arb_tokens(2),
        prop::option::of("[0-9]{4}-[0-9]{2}-[0-9]{2}"),
        arb_tokens(2),
        prop::option::of(arb_token()),
        arb_tokens(3),
        prop::collection::vec("[A-Za-z0-9 ]{1,20}", 0..3),
        prop::option::of(arb_token()),
        prop::option::of(arb_token()),
        arb_tokens(2),
    );
    (part1, part2).prop_map(|(p1, p2)| {
        let (identifier, language_name, alternate_names, script, vowels, consonants, grammatical_rules, country_region, community, speakers) = p1;
        let (linguistic_family, designations, date_created, creator, origin, spatial, description, rights, legal_body_name, source) = p2;
        LpapRecord {
            identifier,
            language_name,
            alternate_names,
            script,
            vowels,
            consonants,
            grammatical_rules,
            country_region,
            community,
            speakers: speakers.map(|(count, as_of)| Speakers {
                count: count as u64,
                as_of,
            }),
            linguistic_family,
            designations,
            date_created,
            creator,
            origin,
            spatial,
            description,
            rights,
            legal_body_name,
            source,
        }
    })
}
