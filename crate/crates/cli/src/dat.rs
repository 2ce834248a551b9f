//! Two-column ASCII `.dat` files: `Ω_e ξ  ρ̃`, whitespace separated, LF
//! line endings, no header unless comments are requested.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

/// Renders rows with 17 significant digits, enough to round-trip any f64.
pub fn render(rows: &[(f64, f64)], comments: &[String]) -> String {
    let mut out = String::with_capacity(48 * rows.len());
    for c in comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    for (x, y) in rows {
        out.push_str(&format!("{x:.16e} {y:.16e}\n"));
    }
    out
}

/// Parses `.dat` text, skipping `#` comment lines and blank lines.
pub fn parse(text: &str) -> io::Result<Vec<(f64, f64)>> {
    let bad = |line: &str| io::Error::new(io::ErrorKind::InvalidData, format!("bad row {line:?}"));
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|line| {
            let mut cols = line.split_whitespace();
            let x = cols
                .next()
                .and_then(|c| c.parse().ok())
                .ok_or_else(|| bad(line))?;
            let y = cols
                .next()
                .and_then(|c| c.parse().ok())
                .ok_or_else(|| bad(line))?;
            if cols.next().is_some() {
                return Err(bad(line));
            }
            Ok((x, y))
        })
        .collect()
}

pub fn read(path: &Path) -> io::Result<Vec<(f64, f64)>> {
    parse(&fs::read_to_string(path)?)
}

/// Writes to a sibling temporary file, then renames it over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let file_name = path.file_name().ok_or_else(|| {
        io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name")
    })?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}
