//! CSV tables with a `# key = value` footer.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    /// File stem.
    pub name: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &'static str, header: &[&'static str]) -> Self {
        Table {
            name,
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width in {}", self.name);
        self.rows.push(row);
    }

    pub fn render(&self, footer: &[(&str, String)]) -> io::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let mut bytes = w.into_inner().map_err(|e| e.into_error())?;
        for (k, v) in footer {
            bytes.extend_from_slice(format!("# {k} = {v}\n").as_bytes());
        }
        Ok(bytes)
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let i = self.header.iter().position(|h| *h == name)?;
        Some(self.rows.iter().map(|r| r[i].as_str()).collect())
    }
}

/// Shortest text that reads back to the same `f64`, in exponent form
/// outside `[1e-5, 1e16)`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x != 0.0 && x.is_finite() && !(1e-5..1e16).contains(&x.abs()) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// Writes every table into `dir`. If any write fails, files already written
/// by this call are removed.
pub fn write_tables(dir: &Path, tables: &[Table], footer: &[(&str, String)]) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for t in tables {
        let path = dir.join(format!("{}.csv", t.name));
        let result = t.render(footer).and_then(|b| fs::write(&path, b));
        if let Err(e) = result {
            let _ = fs::remove_file(&path);
            for p in &written {
                let _ = fs::remove_file(p);
            }
            return Err(e);
        }
        written.push(path);
    }
    Ok(written)
}

/// Splits rendered CSV text into its data part and footer pairs.
pub fn read_footer(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.strip_prefix("# "))
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.0, 1.0, -2.5, 0.1, 1e-300, 3.2e-33, 6.02e23, 12345.678, f64::MIN_POSITIVE, f64::MAX] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            assert!(s.len() < 30, "{s}");
        }
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(3.2e-33), "3.2e-33");
        assert_eq!(num(f64::NAN), "nan");
    }

    #[test]
    fn render_checks_quoting_and_footer() {
        let mut t = Table::new("t", &["a", "b"]);
        t.push(vec!["[0,16]".into(), "x".into()]);
        let text = String::from_utf8(t.render(&[("seed", "3".into())]).unwrap()).unwrap();
        assert_eq!(text, "a,b\n\"[0,16]\",x\n# seed = 3\n");
        assert_eq!(read_footer(&text), vec![("seed".to_string(), "3".to_string())]);
        assert_eq!(t.column("b").unwrap(), vec!["x"]);
    }
}
