//! Minimal tab-separated helpers shared by the table writers.

use crate::error::{Error, Result};

pub(crate) fn write_row(out: &mut String, fields: &[&str]) {
    out.push_str(&fields.join("\t"));
    out.push('\n');
}

/// Splits `text` into header and data rows, checking every row has the
/// header's width. Line numbers in errors are 1-based.
pub(crate) fn read_rows(text: &str) -> Result<(Vec<&str>, Vec<(usize, Vec<&str>)>)> {
    let mut lines = text.lines().enumerate();
    let header: Vec<&str> = match lines.next() {
        Some((_, h)) => h.split('\t').collect(),
        None => return Err(Error::parse(1, "missing header")),
    };
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != header.len() {
            return Err(Error::parse(
                i + 1,
                format!("expected {} fields, found {}", header.len(), fields.len()),
            ));
        }
        rows.push((i + 1, fields));
    }
    Ok((header, rows))
}

pub(crate) fn parse_field<T: std::str::FromStr>(line: usize, name: &str, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::parse(line, format!("invalid {name}: {s:?}")))
}

pub(crate) fn expect_header(found: &[&str], expected: &[&str]) -> Result<()> {
    if found != expected {
        return Err(Error::parse(
            1,
            format!("expected header {:?}, found {:?}", expected.join("\t"), found.join("\t")),
        ));
    }
    Ok(())
}
