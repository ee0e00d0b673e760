//! Parsers for the supported record export formats.
//!
//! All parsers are best-effort about content (unknown tags and fields are
//! skipped) but strict about structure: a tag line that cannot be read or a
//! record left open at end of input is a format error carrying the line
//! number. Input bytes are decoded as UTF-8 with lossy replacement.

use crate::{Error, Result};

use super::{FormatSpec, RawRecord, SourceFormat};

pub(super) fn parse(input: &[u8], format: &FormatSpec) -> Result<Vec<RawRecord>> {
    let text = String::from_utf8_lossy(input);
    match format {
        FormatSpec::AuthorLines => Ok(parse_author_lines(&text)),
        FormatSpec::Ris => parse_ris(&text),
        FormatSpec::WosPlain => parse_wos_plain(&text),
        FormatSpec::Csv { authors_column, separator, title_column, year_column } => {
            parse_csv(&text, authors_column, *separator, title_column.as_deref(), year_column.as_deref())
        }
    }
}

/// One raw author per non-blank line; the whole file is a stream of
/// single-author records. This is the canonical interchange format:
/// deduplicated area lists are written back out in it.
fn parse_author_lines(text: &str) -> Vec<RawRecord> {
    text.lines()
        .filter(|line| !line.trim().is_empty())
        .map(|line| RawRecord {
            source_format: SourceFormat::AuthorLines,
            authors: vec![line.to_string()],
            title: None,
            year: None,
        })
        .collect()
}

/// RIS tagged records: `XX  - value` lines, records closed by `ER  - `.
/// Authors come from `AU` and `A1` tags, one per tag line.
fn parse_ris(text: &str) -> Result<Vec<RawRecord>> {
    let mut records = Vec::new();
    let mut current: Option<RawRecord> = None;
    let mut open_line = 0usize;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (tag, value) = split_ris_line(line)
            .ok_or_else(|| Error::format(lineno, format!("not a RIS tag line: {line:?}")))?;
        if tag == "ER" {
            // a terminator with nothing open is an (allowed) empty record
            records.push(current.take().unwrap_or_else(|| RawRecord::empty(SourceFormat::Ris)));
            continue;
        }
        let record = current.get_or_insert_with(|| {
            open_line = lineno;
            RawRecord::empty(SourceFormat::Ris)
        });
        match tag {
            "AU" | "A1" => record.authors.push(value.to_string()),
            "TI" | "T1" => {
                record.title.get_or_insert_with(|| value.to_string());
            }
            "PY" | "Y1" => {
                record.year.get_or_insert_with(|| value.to_string());
            }
            _ => {}
        }
    }
    if current.is_some() {
        return Err(Error::format(open_line, "record not terminated by `ER  - `"));
    }
    Ok(records)
}

/// Splits `XX  - value`. The tag is two uppercase alphanumerics, followed
/// by two spaces, a dash, and an optional space before the value.
fn split_ris_line(line: &str) -> Option<(&str, &str)> {
    let tag = line.get(0..2)?;
    if !tag.chars().all(|c| c.is_ascii_uppercase() || c.is_ascii_digit()) {
        return None;
    }
    let rest = line.get(2..)?;
    let rest = rest.strip_prefix("  - ").or_else(|| rest.strip_prefix("  -"))?;
    Some((tag, rest.trim_end()))
}

/// Field-tagged plain export: a two-letter tag in columns 0-1, value from
/// column 3, continuation lines indented three spaces, records closed by
/// `ER`, optional `EF` end-of-file marker. Authors come from the `AU`
/// block, one per line.
fn parse_wos_plain(text: &str) -> Result<Vec<RawRecord>> {
    let mut records = Vec::new();
    let mut current: Option<RawRecord> = None;
    let mut current_tag = String::new();
    let mut open_line = 0usize;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (tag, value) = if let Some(cont) = line.strip_prefix("   ") {
            (current_tag.clone(), cont.trim().to_string())
        } else {
            let tag: String = line.chars().take(2).collect();
            if tag.len() < 2 || !tag.chars().all(|c| c.is_ascii_uppercase() || c.is_ascii_digit()) {
                return Err(Error::format(lineno, format!("not a tagged line: {line:?}")));
            }
            let value = line.get(2..).unwrap_or("").trim().to_string();
            current_tag = tag.clone();
            (tag, value)
        };

        match tag.as_str() {
            // file header / trailer markers
            "FN" | "VR" => {}
            "EF" => break,
            "ER" => {
                // a terminator with nothing open is an (allowed) empty record
                records.push(current.take().unwrap_or_else(|| RawRecord::empty(SourceFormat::WosPlain)));
                current_tag.clear();
            }
            _ => {
                let record = current.get_or_insert_with(|| {
                    open_line = lineno;
                    RawRecord::empty(SourceFormat::WosPlain)
                });
                match tag.as_str() {
                    "AU" => {
                        if !value.is_empty() {
                            record.authors.push(value);
                        }
                    }
                    "TI" => match &mut record.title {
                        Some(t) => {
                            t.push(' ');
                            t.push_str(&value);
                        }
                        None => record.title = Some(value),
                    },
                    "PY" => {
                        record.year.get_or_insert(value);
                    }
                    _ => {}
                }
            }
        }
    }
    if current.is_some() {
        return Err(Error::format(open_line, "record not terminated by `ER`"));
    }
    Ok(records)
}

/// One record per CSV row. The declared authors column holds all authors of
/// the record, joined by the declared separator.
fn parse_csv(
    text: &str,
    authors_column: &str,
    separator: char,
    title_column: Option<&str>,
    year_column: Option<&str>,
) -> Result<Vec<RawRecord>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| Error::format(1, format!("unreadable CSV header: {e}")))?
        .clone();
    let column_index = |name: &str| headers.iter().position(|h| h == name);
    let authors_idx = column_index(authors_column).ok_or_else(|| {
        Error::format(1, format!("declared authors column {authors_column:?} not in header"))
    })?;
    let title_idx = title_column.map(|c| {
        column_index(c).ok_or_else(|| Error::format(1, format!("declared title column {c:?} not in header")))
    }).transpose()?;
    let year_idx = year_column.map(|c| {
        column_index(c).ok_or_else(|| Error::format(1, format!("declared year column {c:?} not in header")))
    }).transpose()?;

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::format(line, format!("unreadable CSV row: {e}"))
        })?;
        let lineno = row.position().map(|p| p.line() as usize).unwrap_or(0);
        let cell = row.get(authors_idx).ok_or_else(|| {
            Error::format(lineno, format!("row has no value for column {authors_column:?}"))
        })?;
        let authors: Vec<String> = cell
            .split(separator)
            .map(str::trim)
            .filter(|a| !a.is_empty())
            .map(str::to_string)
            .collect();
        records.push(RawRecord {
            source_format: SourceFormat::Csv,
            authors,
            title: title_idx.and_then(|i| row.get(i)).map(str::to_string),
            year: year_idx.and_then(|i| row.get(i)).map(str::to_string),
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::super::{parse_records, FormatSpec, SourceFormat};
    use crate::Error;

    #[test]
    fn author_lines_direct_mapping() {
        let records = parse_records(b"Alvarez, M.J.\nBrandt, K.L.\n", &FormatSpec::AuthorLines).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].authors, vec!["Alvarez, M.J."]);
        assert_eq!(records[1].authors, vec!["Brandt, K.L."]);
    }

    #[test]
    fn empty_input_is_empty_record_list() {
        for spec in [
            FormatSpec::AuthorLines,
            FormatSpec::Ris,
            FormatSpec::WosPlain,
            FormatSpec::csv_with_defaults(),
        ] {
            assert!(parse_records(b"", &spec).unwrap().is_empty(), "{spec:?}");
        }
    }

    /// Hand-written five-record RIS fixture, checked field by field.
    #[test]
    fn ris_fixture() {
        let input = "\
TY  - JOUR
AU  - Alvarez, M.J.
AU  - Brandt, K.L.
TI  - First
PY  - 2011
ER  -
TY  - JOUR
A1  - Chen, L.
TI  - Second
ER  -
TY  - CONF
AU  - Dupont, J.
AU  - Egorov, V.
AU  - Fischer, R.
ER  -
TY  - JOUR
TI  - Authorless
ER  -
TY  - JOUR
AU  - Garcia, P.T.
PY  - 2012
ER  -
";
        let records = parse_records(input.as_bytes(), &FormatSpec::Ris).unwrap();
        assert_eq!(records.len(), 5);
        assert_eq!(records[0].authors, vec!["Alvarez, M.J.", "Brandt, K.L."]);
        assert_eq!(records[0].title.as_deref(), Some("First"));
        assert_eq!(records[0].year.as_deref(), Some("2011"));
        assert_eq!(records[1].authors, vec!["Chen, L."]);
        assert_eq!(records[2].authors.len(), 3);
        assert!(records[3].authors.is_empty());
        assert_eq!(records[4].authors, vec!["Garcia, P.T."]);
        for r in &records {
            assert_eq!(r.source_format, SourceFormat::Ris);
        }
    }

    #[test]
    fn ris_two_au_tags_one_record() {
        let input = "TY  - JOUR\nAU  - One, A.\nAU  - Two, B.\nER  - \n";
        let records = parse_records(input.as_bytes(), &FormatSpec::Ris).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].authors.len(), 2);
    }

    #[test]
    fn ris_malformed_line_names_line_number() {
        let input = "TY  - JOUR\nAU broken line\nER  - \n";
        match parse_records(input.as_bytes(), &FormatSpec::Ris) {
            Err(Error::Format { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn ris_unterminated_record() {
        let input = "TY  - JOUR\nAU  - One, A.\n";
        assert!(matches!(
            parse_records(input.as_bytes(), &FormatSpec::Ris),
            Err(Error::Format { line: 1, .. })
        ));
    }

    /// Hand-written five-record plain-export fixture, checked field by field.
    #[test]
    fn wos_plain_fixture() {
        let input = "\
FN Export
VR 1.0
PT J
AU Alvarez, MJ
   Brandt, KL
TI Common author overlap across
   research areas
PY 2012
ER

PT J
AU Chen, L
ER

PT C
AU Dupont, J
   Egorov, V
   Fischer, R
TI Third
ER

PT J
TI No authors here
ER

PT J
AU Garcia, PT
ER
EF
";
        let records = parse_records(input.as_bytes(), &FormatSpec::WosPlain).unwrap();
        assert_eq!(records.len(), 5);
        assert_eq!(records[0].authors, vec!["Alvarez, MJ", "Brandt, KL"]);
        assert_eq!(records[0].title.as_deref(), Some("Common author overlap across research areas"));
        assert_eq!(records[0].year.as_deref(), Some("2012"));
        assert_eq!(records[1].authors, vec!["Chen, L"]);
        assert_eq!(records[2].authors.len(), 3);
        assert!(records[3].authors.is_empty());
        assert_eq!(records[4].authors, vec!["Garcia, PT"]);
    }

    #[test]
    fn wos_unterminated_record_is_error() {
        let input = "PT J\nAU Alvarez, MJ\n";
        assert!(matches!(
            parse_records(input.as_bytes(), &FormatSpec::WosPlain),
            Err(Error::Format { .. })
        ));
    }

    /// Hand-written five-record CSV fixture, checked field by field.
    #[test]
    fn csv_fixture() {
        let input = "\
Title,Authors,Year
\"First\",\"Alvarez, M.J.; Brandt, K.L.\",2011
\"Second\",\"Chen, L.\",2011
\"Third\",\"Dupont, J.; Egorov, V.; Fischer, R.\",2012
\"Authorless\",\"\",2012
\"Fifth\",\"Garcia, P.T.\",2012
";
        let spec = FormatSpec::Csv {
            authors_column: "Authors".to_string(),
            separator: ';',
            title_column: Some("Title".to_string()),
            year_column: Some("Year".to_string()),
        };
        let records = parse_records(input.as_bytes(), &spec).unwrap();
        assert_eq!(records.len(), 5);
        assert_eq!(records[0].authors, vec!["Alvarez, M.J.", "Brandt, K.L."]);
        assert_eq!(records[0].title.as_deref(), Some("First"));
        assert_eq!(records[0].year.as_deref(), Some("2011"));
        assert_eq!(records[1].authors, vec!["Chen, L."]);
        assert_eq!(records[2].authors.len(), 3);
        assert!(records[3].authors.is_empty());
        assert_eq!(records[4].authors, vec!["Garcia, P.T."]);
    }

    #[test]
    fn csv_missing_declared_column() {
        let input = "Title,People\nX,\"A, B.\"\n";
        match parse_records(input.as_bytes(), &FormatSpec::csv_with_defaults()) {
            Err(Error::Format { line: 1, message }) => {
                assert!(message.contains("authors"), "{message}")
            }
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn non_utf8_is_replaced_not_fatal() {
        let mut input = b"Alvarez, M.J.\n".to_vec();
        input.extend_from_slice(&[0xff, 0xfe, b'\n']);
        let records = parse_records(&input, &FormatSpec::AuthorLines).unwrap();
        assert_eq!(records.len(), 2);
    }
}
