//! Plot-ready CSV and JSON emission plus the loadable input formats:
//! IOWE tables, distance spectra, and channel-set descriptors.
//!
//! Every emitted file starts with `#` comment lines carrying the run
//! configuration, so a run is reproducible from its own output. Numbers
//! are printed with 12 significant digits; identical configurations
//! produce byte-identical files.

use std::fs;
use std::io::Write;
use std::path::Path;

use parbound_core::channels::{ChannelError, MbiosChannel, ParallelChannelSet};
use parbound_core::spectra::SpectraError;
use parbound_core::{DistanceSpectrum, Iowe};
use serde::{Deserialize, Serialize};

/// Formats a value with 12 significant digits. Log-domain columns can
/// carry `-inf` (empty weight classes); spreadsheets and plotting
/// libraries accept the token.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        "nan".to_owned()
    } else if x == f64::INFINITY {
        "inf".to_owned()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_owned()
    } else {
        format!("{x:.11e}")
    }
}

fn parse_cell(s: &str) -> Option<f64> {
    match s {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        _ => s.parse().ok(),
    }
}

#[derive(Debug)]
pub enum FormatError {
    Io(std::io::Error),
    /// Malformed content, with the 1-based line number.
    Parse {
        line: usize,
        msg: String,
    },
    Spectra(SpectraError),
    Channel(ChannelError),
}

impl std::fmt::Display for FormatError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FormatError::Io(e) => write!(f, "{e}"),
            FormatError::Parse { line, msg } => write!(f, "line {line}: {msg}"),
            FormatError::Spectra(e) => write!(f, "{e}"),
            FormatError::Channel(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for FormatError {}

impl From<std::io::Error> for FormatError {
    fn from(e: std::io::Error) -> Self {
        FormatError::Io(e)
    }
}

impl From<SpectraError> for FormatError {
    fn from(e: SpectraError) -> Self {
        FormatError::Spectra(e)
    }
}

impl From<ChannelError> for FormatError {
    fn from(e: ChannelError) -> Self {
        FormatError::Channel(e)
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse { line, msg: msg.into() }
}

/// A curve or table ready for emission: fixed column names, rows of
/// preformatted cells, and `key: value` metadata echoed into the header.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub meta: Vec<(&'static str, String)>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table { columns, meta: Vec::new(), rows: Vec::new() }
    }

    pub fn meta(mut self, key: &'static str, value: impl Into<String>) -> Self {
        self.meta.push((key, value.into()));
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Writes a table as CSV, or as JSON when the path ends in `.json`. The
/// config string is the serialized run configuration.
pub fn write_table(path: &Path, config_json: &str, table: &Table) -> Result<(), FormatError> {
    let body = if path.extension().is_some_and(|e| e == "json") {
        render_json(config_json, table)
    } else {
        render_csv(config_json, table)
    };
    let mut file = fs::File::create(path)?;
    file.write_all(body.as_bytes())?;
    Ok(())
}

fn render_csv(config_json: &str, table: &Table) -> String {
    let mut out = String::new();
    out.push_str("# parbound output\n");
    out.push_str(&format!("# config: {config_json}\n"));
    for (key, value) in &table.meta {
        out.push_str(&format!("# {key}: {value}\n"));
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn render_json(config_json: &str, table: &Table) -> String {
    let config: serde_json::Value =
        serde_json::from_str(config_json).unwrap_or(serde_json::Value::Null);
    let meta: serde_json::Map<String, serde_json::Value> = table
        .meta
        .iter()
        .map(|(k, v)| ((*k).to_owned(), serde_json::Value::String(v.clone())))
        .collect();
    let doc = serde_json::json!({
        "config": config,
        "meta": meta,
        "columns": table.columns,
        "rows": table.rows,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
    s.push('\n');
    s
}

/// Parsed generic table: header comments (`key` -> `value`), column names,
/// numeric rows.
pub struct LoadedTable {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<(usize, Vec<f64>)>,
}

impl LoadedTable {
    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// Reads a CSV table written by [`write_table`] (or hand-authored in the
/// same shape): `#` comments, one header row, numeric cells.
pub fn read_table(path: &Path) -> Result<LoadedTable, FormatError> {
    let text = fs::read_to_string(path)?;
    let mut meta = Vec::new();
    let mut columns: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once(':') {
                meta.push((key.trim().to_owned(), value.trim().to_owned()));
            }
            continue;
        }
        match &columns {
            None => {
                columns = Some(line.split(',').map(|c| c.trim().to_owned()).collect());
            }
            Some(cols) => {
                let cells: Vec<&str> = line.split(',').map(str::trim).collect();
                if cells.len() != cols.len() {
                    return Err(parse_err(
                        line_no,
                        format!("expected {} cells, found {}", cols.len(), cells.len()),
                    ));
                }
                let mut parsed = Vec::with_capacity(cells.len());
                for cell in cells {
                    let v = parse_cell(cell)
                        .ok_or_else(|| parse_err(line_no, format!("bad number {cell:?}")))?;
                    parsed.push(v);
                }
                rows.push((line_no, parsed));
            }
        }
    }
    let columns = columns.ok_or_else(|| parse_err(text.lines().count(), "missing header row"))?;
    Ok(LoadedTable { meta, columns, rows })
}

fn meta_u32(table: &LoadedTable, key: &str) -> Result<u32, FormatError> {
    table
        .meta_value(key)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| parse_err(1, format!("missing or bad `# {key}:` header")))
}

/// IOWE CSV: header comments `# k:` and `# n:`, columns `w,h,log_a`
/// (natural log of the average multiplicity).
pub fn write_iowe_csv(path: &Path, config_json: &str, iowe: &Iowe) -> Result<(), FormatError> {
    let mut table = Table::new(vec!["w", "h", "log_a"])
        .meta("k", iowe.k().to_string())
        .meta("n", iowe.n().to_string());
    for (w, h, log_a) in iowe.iter() {
        table.push(vec![w.to_string(), h.to_string(), fmt_sig(log_a)]);
    }
    write_table(path, config_json, &table)
}

pub fn read_iowe_csv(path: &Path) -> Result<Iowe, FormatError> {
    let table = read_table(path)?;
    if table.columns != ["w", "h", "log_a"] {
        return Err(parse_err(1, "IOWE tables need columns w,h,log_a"));
    }
    let k = meta_u32(&table, "k")?;
    let n = meta_u32(&table, "n")?;
    let mut entries = Vec::with_capacity(table.rows.len());
    for (line, row) in &table.rows {
        let (w, h, log_a) = (row[0], row[1], row[2]);
        if w.fract() != 0.0 || h.fract() != 0.0 || w < 0.0 || h < 0.0 {
            return Err(parse_err(*line, "w and h must be nonnegative integers"));
        }
        entries.push(((w as u32, h as u32), log_a));
    }
    Iowe::from_log_entries(k, n, entries).map_err(Into::into)
}

/// Distance-spectrum CSV: header comments `# k:` and `# n:`, columns
/// `h,log_a,log_a_bit` (the bit column is `-inf`-padded and dropped on
/// load when every entry is `-inf`).
pub fn write_spectrum_csv(
    path: &Path,
    config_json: &str,
    spectrum: &DistanceSpectrum,
) -> Result<(), FormatError> {
    let mut table = Table::new(vec!["h", "log_a", "log_a_bit"])
        .meta("k", spectrum.k().to_string())
        .meta("n", spectrum.n().to_string());
    for h in 0..=spectrum.n() {
        let bit = spectrum.log_a_bit(h).unwrap_or(f64::NEG_INFINITY);
        table.push(vec![h.to_string(), fmt_sig(spectrum.log_a(h)), fmt_sig(bit)]);
    }
    write_table(path, config_json, &table)
}

pub fn read_spectrum_csv(path: &Path) -> Result<DistanceSpectrum, FormatError> {
    let table = read_table(path)?;
    let has_bit = match table.columns.iter().map(String::as_str).collect::<Vec<_>>()[..] {
        ["h", "log_a"] => false,
        ["h", "log_a", "log_a_bit"] => true,
        _ => return Err(parse_err(1, "spectrum tables need columns h,log_a[,log_a_bit]")),
    };
    let k = meta_u32(&table, "k")?;
    let n = meta_u32(&table, "n")?;
    let mut log_a = vec![f64::NEG_INFINITY; n as usize + 1];
    let mut log_bit = vec![f64::NEG_INFINITY; n as usize + 1];
    for (line, row) in &table.rows {
        let h = row[0];
        if h.fract() != 0.0 || h < 0.0 || h > n as f64 {
            return Err(parse_err(*line, "h must be an integer in 0..=n"));
        }
        log_a[h as usize] = row[1];
        if has_bit {
            log_bit[h as usize] = row[2];
        }
    }
    let bit = if has_bit && log_bit.iter().skip(1).any(|&v| v > f64::NEG_INFINITY) {
        // The all-zero entry mirrors the block column's convention.
        log_bit[0] = 0.0;
        Some(log_bit)
    } else {
        None
    };
    DistanceSpectrum::new(n, k, log_a, bit).map_err(Into::into)
}

/// One channel of a JSON channel-set descriptor.
#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ChannelSpec {
    /// Binary-input AWGN with per-symbol SNR `nu`.
    Biawgn { nu: f64 },
    /// Binary symmetric channel with crossover probability `p`.
    Bsc { p: f64 },
    /// Binary erasure channel with erasure probability `eps`.
    Bec { eps: f64 },
}

/// JSON channel-set descriptor: `{"alphas": [...], "channels": [...]}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct ChannelSetSpec {
    pub alphas: Vec<f64>,
    pub channels: Vec<ChannelSpec>,
}

pub fn read_channel_set(path: &Path) -> Result<ParallelChannelSet, FormatError> {
    let text = fs::read_to_string(path)?;
    let spec: ChannelSetSpec =
        serde_json::from_str(&text).map_err(|e| parse_err(e.line(), e.to_string()))?;
    let mut channels = Vec::with_capacity(spec.channels.len());
    for ch in &spec.channels {
        channels.push(match *ch {
            ChannelSpec::Biawgn { nu } => MbiosChannel::biawgn(nu)?,
            ChannelSpec::Bsc { p } => MbiosChannel::bsc(p)?,
            ChannelSpec::Bec { eps } => MbiosChannel::bec(eps)?,
        });
    }
    ParallelChannelSet::new(channels, spec.alphas).map_err(Into::into)
}

#[cfg(test)]
mod tests {
    use super::*;
    use parbound_core::spectra::nsra_iowe;

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("parbound-format-tests");
        fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn sig_formatting_is_twelve_digits_and_lossless_tokens() {
        assert_eq!(fmt_sig(1.0 / 3.0), "3.33333333333e-1");
        assert_eq!(fmt_sig(f64::NEG_INFINITY), "-inf");
        assert_eq!(parse_cell("-inf"), Some(f64::NEG_INFINITY));
        assert_eq!(parse_cell("3.33333333333e-1"), Some(0.333333333333));
        assert_eq!(parse_cell("x"), None);
    }

    #[test]
    fn iowe_roundtrip_preserves_entries() {
        let iowe = nsra_iowe(3, 3).unwrap();
        let path = tmp("iowe_roundtrip.csv");
        write_iowe_csv(&path, "{}", &iowe).unwrap();
        let back = read_iowe_csv(&path).unwrap();
        assert_eq!(back.k(), iowe.k());
        assert_eq!(back.n(), iowe.n());
        for (w, h, log_a) in iowe.iter() {
            assert!(
                (back.log_get(w, h) - log_a).abs() < 1e-10,
                "({w},{h}): {} vs {log_a}",
                back.log_get(w, h)
            );
        }
    }

    #[test]
    fn spectrum_roundtrip_keeps_bit_marginal() {
        let spectrum = nsra_iowe(3, 3).unwrap().to_spectrum();
        assert!(spectrum.has_bit_weights());
        let path = tmp("spectrum_roundtrip.csv");
        write_spectrum_csv(&path, "{}", &spectrum).unwrap();
        let back = read_spectrum_csv(&path).unwrap();
        assert!(back.has_bit_weights());
        for h in 0..=spectrum.n() {
            assert!((back.log_a(h) - spectrum.log_a(h)).abs() < 1e-10);
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let path = tmp("bad_cells.csv");
        fs::write(&path, "# k: 2\n# n: 6\nw,h,log_a\n0,0,0\n1,2,oops\n").unwrap();
        match read_iowe_csv(&path) {
            Err(FormatError::Parse { line, msg }) => {
                assert_eq!(line, 5);
                assert!(msg.contains("oops"), "{msg}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        let path = tmp("short_row.csv");
        fs::write(&path, "# k: 2\n# n: 6\nw,h,log_a\n1,2\n").unwrap();
        match read_iowe_csv(&path) {
            Err(FormatError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn channel_set_descriptor_loads() {
        let path = tmp("set.json");
        fs::write(
            &path,
            r#"{"alphas": [0.5, 0.5],
                "channels": [{"kind": "biawgn", "nu": 0.4}, {"kind": "bsc", "p": 0.02}]}"#,
        )
        .unwrap();
        let set = read_channel_set(&path).unwrap();
        assert_eq!(set.len(), 2);
        assert!(set.avg_bhattacharyya() < 1.0);
    }

    #[test]
    fn json_output_embeds_config() {
        let mut table = Table::new(vec!["x", "y"]).meta("note", "demo");
        table.push(vec![fmt_sig(1.0), fmt_sig(2.0)]);
        let path = tmp("table.json");
        write_table(&path, r#"{"command":"demo"}"#, &table).unwrap();
        let doc: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(doc["config"]["command"], "demo");
        assert_eq!(doc["columns"][1], "y");
        assert_eq!(doc["rows"][0][0], "1.00000000000e0");
    }
}
