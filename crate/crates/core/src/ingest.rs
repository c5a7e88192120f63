//! Corpus manifests and raw document loading.
//!
//! A manifest is a JSON file listing corpora; each corpus names one or more
//! text files (resolved relative to the manifest's directory) plus optional
//! declarative cleaning. Loading validates ids and file existence up front so
//! later stages never see a dangling path.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Text encoding of the files of one corpus entry.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Encoding {
    #[default]
    #[serde(rename = "utf-8", alias = "utf8", alias = "UTF-8")]
    Utf8,
    #[serde(
        rename = "latin-1",
        alias = "latin1",
        alias = "iso-8859-1",
        alias = "ISO-8859-1"
    )]
    Latin1,
}

impl Encoding {
    fn name(self) -> &'static str {
        match self {
            Encoding::Utf8 => "utf-8",
            Encoding::Latin1 => "latin-1",
        }
    }
}

/// Line filters applied to a document after concatenation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CleaningOptions {
    pub strip_blank_lines: bool,
    /// Lines starting with any of these literal prefixes are dropped.
    pub strip_lines_matching: Vec<String>,
    /// Collapse whitespace runs inside a line to one space and trim the line.
    pub normalize_whitespace: bool,
}

impl CleaningOptions {
    pub fn is_noop(&self) -> bool {
        !self.strip_blank_lines
            && !self.normalize_whitespace
            && self.strip_lines_matching.iter().all(|p| p.is_empty())
    }

    /// Apply the filters. Idempotent, and never inserts anything but single
    /// spaces.
    pub fn apply(&self, text: &str) -> String {
        if self.is_noop() {
            return text.to_string();
        }
        let mut out = String::with_capacity(text.len());
        for raw in text.split_inclusive('\n') {
            let (body, newline) = match raw.strip_suffix('\n') {
                Some(body) => (body, "\n"),
                None => (raw, ""),
            };
            let body = if self.normalize_whitespace {
                body.split_whitespace().collect::<Vec<_>>().join(" ")
            } else {
                body.to_string()
            };
            if self.strip_blank_lines && body.trim().is_empty() {
                continue;
            }
            if self
                .strip_lines_matching
                .iter()
                .any(|p| !p.is_empty() && body.starts_with(p.as_str()))
            {
                continue;
            }
            out.push_str(&body);
            out.push_str(newline);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub id: String,
    pub label: String,
    #[serde(rename = "language")]
    pub language_tag: String,
    #[serde(default)]
    pub genre: String,
    pub paths: Vec<PathBuf>,
    #[serde(default)]
    pub cleaning: CleaningOptions,
    #[serde(default)]
    pub encoding: Encoding,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusManifest {
    #[serde(rename = "corpora")]
    pub entries: Vec<CorpusEntry>,
}

impl CorpusManifest {
    pub fn entry(&self, id: &str) -> Result<&CorpusEntry> {
        self.entries
            .iter()
            .find(|e| e.id == id)
            .ok_or_else(|| Error::UnknownCorpus(id.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.id.as_str())
    }
}

/// The decoded, cleaned text of one corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub corpus_id: String,
    pub text: String,
    pub source_paths: Vec<PathBuf>,
    /// Bytes read from disk, before decoding and cleaning.
    pub byte_count: usize,
}

/// Load and validate a manifest file. Entry paths are resolved against the
/// manifest's directory and must exist.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<CorpusManifest> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let json = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_manifest(&json, base)
}

/// Parse manifest JSON, resolving relative paths against `base_dir`.
pub fn parse_manifest(json: &str, base_dir: &Path) -> Result<CorpusManifest> {
    let mut manifest: CorpusManifest =
        serde_json::from_str(json).map_err(|e| Error::MalformedManifest {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;

    let mut seen = HashSet::new();
    for entry in &mut manifest.entries {
        if entry.id.trim().is_empty() {
            return Err(Error::MalformedManifest {
                line: 0,
                column: 0,
                message: "corpus entry with empty id".into(),
            });
        }
        if !seen.insert(entry.id.clone()) {
            return Err(Error::DuplicateId(entry.id.clone()));
        }
        if entry.paths.is_empty() {
            return Err(Error::MalformedManifest {
                line: 0,
                column: 0,
                message: format!("corpus `{}` lists no paths", entry.id),
            });
        }
        for p in &mut entry.paths {
            if p.is_relative() {
                *p = base_dir.join(&*p);
            }
            if !p.is_file() {
                return Err(Error::MissingFile(p.clone()));
            }
        }
    }
    Ok(manifest)
}

fn decode(bytes: &[u8], encoding: Encoding, path: &Path) -> Result<String> {
    match encoding {
        Encoding::Utf8 => {
            let text = std::str::from_utf8(bytes).map_err(|e| Error::Decode {
                path: path.to_path_buf(),
                encoding: encoding.name().into(),
                offset: e.valid_up_to(),
            })?;
            Ok(text.strip_prefix('\u{feff}').unwrap_or(text).to_string())
        }
        Encoding::Latin1 => Ok(bytes.iter().map(|&b| char::from(b)).collect()),
    }
}

/// Read every file of an entry in listed order, joined by a single newline,
/// then apply the entry's cleaning options.
pub fn read_document(entry: &CorpusEntry) -> Result<RawDocument> {
    let mut parts = Vec::with_capacity(entry.paths.len());
    let mut byte_count = 0;
    for path in &entry.paths {
        let bytes = fs::read(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                Error::MissingFile(path.clone())
            } else {
                Error::io(path, e)
            }
        })?;
        byte_count += bytes.len();
        parts.push(decode(&bytes, entry.encoding, path)?);
    }
    let text = entry.cleaning.apply(&parts.join("\n"));
    Ok(RawDocument {
        corpus_id: entry.id.clone(),
        text,
        source_paths: entry.paths.clone(),
        byte_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use tempfile::TempDir;

    fn write(dir: &TempDir, name: &str, contents: &[u8]) -> PathBuf {
        let p = dir.path().join(name);
        fs::write(&p, contents).unwrap();
        p
    }

    fn entry(paths: Vec<PathBuf>, cleaning: CleaningOptions) -> CorpusEntry {
        CorpusEntry {
            id: "zulu".into(),
            label: "Zulu".into(),
            language_tag: "zul".into(),
            genre: String::new(),
            paths,
            cleaning,
            encoding: Encoding::Utf8,
        }
    }

    #[test]
    fn duplicate_id_rejected() {
        let dir = TempDir::new().unwrap();
        write(&dir, "a.txt", b"a");
        let json = r#"{"corpora": [
            {"id": "zulu", "label": "Zulu", "language": "zul", "genre": "", "paths": ["a.txt"]},
            {"id": "zulu", "label": "Zulu 2", "language": "zul", "genre": "", "paths": ["a.txt"]}
        ]}"#;
        assert!(matches!(
            parse_manifest(json, dir.path()),
            Err(Error::DuplicateId(id)) if id == "zulu"
        ));
    }

    #[test]
    fn missing_path_named() {
        let dir = TempDir::new().unwrap();
        let json = r#"{"corpora": [{"id": "x", "label": "X", "language": "x", "genre": "", "paths": ["nope.txt"]}]}"#;
        match parse_manifest(json, dir.path()) {
            Err(Error::MissingFile(p)) => assert!(p.ends_with("nope.txt")),
            other => panic!("expected MissingFile, got {other:?}"),
        }
    }

    #[test]
    fn malformed_manifest_reports_position() {
        let json = "{\"corpora\": [\n  {\"id\": 3}\n]}";
        match parse_manifest(json, Path::new(".")) {
            Err(Error::MalformedManifest { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected MalformedManifest, got {other:?}"),
        }
    }

    #[test]
    fn single_file_passes_through() {
        let dir = TempDir::new().unwrap();
        let p = write(&dir, "a.txt", b"abc\n");
        let doc = read_document(&entry(vec![p], CleaningOptions::default())).unwrap();
        assert_eq!(doc.text, "abc\n");
        assert_eq!(doc.byte_count, 4);
    }

    #[test]
    fn files_joined_by_newline_in_order() {
        let dir = TempDir::new().unwrap();
        let a = write(&dir, "a.txt", b"a");
        let b = write(&dir, "b.txt", b"b");
        let doc = read_document(&entry(vec![a.clone(), b.clone()], Default::default())).unwrap();
        assert_eq!(doc.text, "a\nb");
        let doc = read_document(&entry(vec![b, a], Default::default())).unwrap();
        assert_eq!(doc.text, "b\na");
    }

    #[test]
    fn prefix_filter_drops_line() {
        let dir = TempDir::new().unwrap();
        let p = write(&dir, "a.txt", b"Preamble\nkanti");
        let cleaning = CleaningOptions {
            strip_lines_matching: vec!["Preamble".into()],
            ..Default::default()
        };
        assert_eq!(read_document(&entry(vec![p], cleaning)).unwrap().text, "kanti");
    }

    #[test]
    fn invalid_utf8_reports_offset() {
        let dir = TempDir::new().unwrap();
        let p = write(&dir, "a.txt", b"abc\xffdef");
        match read_document(&entry(vec![p], Default::default())) {
            Err(Error::Decode { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("expected Decode, got {other:?}"),
        }
    }

    #[test]
    fn latin1_override_decodes() {
        let dir = TempDir::new().unwrap();
        let p = write(&dir, "a.txt", b"s\xea");
        let mut e = entry(vec![p], Default::default());
        e.encoding = Encoding::Latin1;
        assert_eq!(read_document(&e).unwrap().text, "sê");
    }

    #[test]
    fn encoding_field_parses() {
        let dir = TempDir::new().unwrap();
        write(&dir, "a.txt", b"a");
        let json = r#"{"corpora": [{"id": "x", "label": "X", "language": "x", "genre": "", "paths": ["a.txt"], "encoding": "latin-1"}]}"#;
        let m = parse_manifest(json, dir.path()).unwrap();
        assert_eq!(m.entries[0].encoding, Encoding::Latin1);
    }

    #[test]
    fn normalize_and_blank_lines() {
        let c = CleaningOptions {
            strip_blank_lines: true,
            normalize_whitespace: true,
            strip_lines_matching: vec![],
        };
        assert_eq!(c.apply("  a \t b \n\n   \nc\n"), "a b\nc\n");
    }

    fn cleaning_strategy() -> impl Strategy<Value = CleaningOptions> {
        (
            any::<bool>(),
            any::<bool>(),
            prop::collection::vec("[a-c ]{0,3}", 0..3),
        )
            .prop_map(|(b, n, p)| CleaningOptions {
                strip_blank_lines: b,
                normalize_whitespace: n,
                strip_lines_matching: p,
            })
    }

    proptest! {
        #[test]
        fn cleaning_is_idempotent(text in "[a-c \t\r\n]{0,40}", c in cleaning_strategy()) {
            let once = c.apply(&text);
            prop_assert_eq!(c.apply(&once), once);
        }

        #[test]
        fn cleaning_only_removes_or_adds_spaces(text in "[a-c \t\n]{0,40}", c in cleaning_strategy()) {
            let cleaned = c.apply(&text);
            for ch in cleaned.chars().filter(|ch| *ch != ' ') {
                let before = text.chars().filter(|x| *x == ch).count();
                let after = cleaned.chars().filter(|x| *x == ch).count();
                prop_assert!(after <= before);
            }
        }
    }
}
