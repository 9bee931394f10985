//! Pre-trained word embedding lookup.
//!
//! The table is loaded from a text file with one entry per line: the surface
//! form followed by 200 decimal floats, single-space separated. A line whose
//! form is the literal `<UNK>` defines the fallback row; without one the
//! fallback is the zero vector. Lookups never fail: exact match first, then
//! lowercase, then the fallback row.

use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Width of the dense embedding block.
pub const EMBED_DIM: usize = 200;

const UNK_FORM: &str = "<UNK>";

/// Immutable embedding table with a designated fallback row.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    index: HashMap<String, usize>,
    rows: Vec<f64>,
    unk: Vec<f64>,
}

impl EmbeddingTable {
    /// Empty table: every lookup hits the zero fallback row.
    pub fn empty() -> Self {
        EmbeddingTable {
            index: HashMap::new(),
            rows: Vec::new(),
            unk: vec![0.0; EMBED_DIM],
        }
    }

    /// Random uniform(-0.5, 0.5) rows for the given vocabulary, useful when
    /// no pre-trained file is available.
    pub fn random<S: AsRef<str>>(vocab: &[S], rng: &mut Rng) -> Self {
        let mut table = EmbeddingTable::empty();
        for form in vocab {
            let row: Vec<f64> = (0..EMBED_DIM).map(|_| rng.uniform(-0.5, 0.5)).collect();
            table.insert(form.as_ref(), &row);
        }
        table
    }

    /// Parses the text format from a reader; `name` labels diagnostics.
    pub fn read(reader: impl BufRead, name: &str) -> Result<Self> {
        let mut table = EmbeddingTable::empty();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(' ');
            let form = parts
                .next()
                .ok_or_else(|| Error::data_at(name, lineno + 1, "empty line"))?;
            let mut row = Vec::with_capacity(EMBED_DIM);
            for p in parts {
                let v: f64 = p.parse().map_err(|_| {
                    Error::data_at(name, lineno + 1, format!("bad float {p:?}"))
                })?;
                row.push(v);
            }
            if row.len() != EMBED_DIM {
                return Err(Error::data_at(
                    name,
                    lineno + 1,
                    format!("expected {} floats, got {}", EMBED_DIM, row.len()),
                ));
            }
            if form == UNK_FORM {
                table.unk = row;
            } else {
                table.insert(form, &row);
            }
        }
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read(
            std::io::BufReader::new(file),
            &path.display().to_string(),
        )
    }

    pub fn insert(&mut self, form: &str, row: &[f64]) {
        debug_assert_eq!(row.len(), EMBED_DIM);
        match self.index.get(form) {
            Some(&at) => self.rows[at * EMBED_DIM..(at + 1) * EMBED_DIM].copy_from_slice(row),
            None => {
                self.index.insert(form.to_string(), self.index.len());
                self.rows.extend_from_slice(row);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    fn row(&self, at: usize) -> &[f64] {
        &self.rows[at * EMBED_DIM..(at + 1) * EMBED_DIM]
    }

    /// Total lookup: exact form, then lowercased form, then the UNK row.
    pub fn embed(&self, surface: &str) -> &[f64] {
        if let Some(&at) = self.index.get(surface) {
            return self.row(at);
        }
        let lower = surface.to_lowercase();
        if let Some(&at) = self.index.get(lower.as_str()) {
            return self.row(at);
        }
        &self.unk
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn entry(form: &str, fill: f64) -> String {
        let vals: Vec<String> = (0..EMBED_DIM).map(|_| fill.to_string()).collect();
        format!("{form} {}", vals.join(" "))
    }

    #[test]
    fn exact_match_returns_stored_row() {
        let text = format!("{}\n{}\n", entry("san", 0.5), entry("francisco", -0.25));
        let t = EmbeddingTable::read(Cursor::new(text), "test").unwrap();
        assert_eq!(t.embed("san")[0], 0.5);
        assert_eq!(t.embed("francisco")[7], -0.25);
    }

    #[test]
    fn lowercase_fallback() {
        let text = entry("francisco", 0.75);
        let t = EmbeddingTable::read(Cursor::new(text), "test").unwrap();
        assert_eq!(t.embed("Francisco")[0], 0.75);
    }

    #[test]
    fn unknown_form_hits_unk_row() {
        let t = EmbeddingTable::read(Cursor::new(entry("a", 1.0)), "test").unwrap();
        assert!(t.embed("zzz").iter().all(|&v| v == 0.0));

        let with_unk = format!("{}\n{}\n", entry("a", 1.0), entry("<UNK>", 9.0));
        let t = EmbeddingTable::read(Cursor::new(with_unk), "test").unwrap();
        assert!(t.embed("zzz").iter().all(|&v| v == 9.0));
    }

    #[test]
    fn wrong_width_reports_line() {
        let text = format!("{}\nshort 1.0 2.0\n", entry("ok", 0.0));
        let err = EmbeddingTable::read(Cursor::new(text), "emb.txt").unwrap_err();
        assert!(err.to_string().contains("emb.txt:2"), "{err}");
    }

    #[test]
    fn random_table_covers_vocab() {
        let mut rng = Rng::seed(5);
        let t = EmbeddingTable::random(&["a", "b"], &mut rng);
        assert_eq!(t.len(), 2);
        assert_ne!(t.embed("a")[0], t.embed("b")[0]);
        assert!(t.embed("a").iter().all(|v| v.abs() <= 0.5));
    }
}
