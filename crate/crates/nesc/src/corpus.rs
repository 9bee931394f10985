//! Labeled corpus ingestion and the CoNLL-style TSV file format.
//!
//! One token per line, `surface TAB pos TAB label`, with a blank line
//! ending each sentence. POS tags come from the file; corpora without POS
//! annotations use the reserved tag `X`.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::{vectorize, EmbeddingTable, PosTag, Token, TokenVector};
use crate::ner::{decode_spans, EntitySpan, Label, TrainSentence};

/// Which partition a corpus plays in the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Split {
    #[default]
    Train,
    Validation,
    Test,
}

/// One labeled token from a corpus file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConllToken {
    pub surface: String,
    pub pos: PosTag,
    pub label: Label,
}

/// A list of labeled sentences.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub sentences: Vec<Vec<ConllToken>>,
    pub split: Split,
}

impl Corpus {
    pub fn new(sentences: Vec<Vec<ConllToken>>, split: Split) -> Self {
        Corpus { sentences, split }
    }

    /// Parses the TSV format, reporting `file:line` on any defect.
    pub fn read(reader: impl BufRead, name: &str) -> Result<Self> {
        let mut sentences = Vec::new();
        let mut current: Vec<ConllToken> = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim_end_matches('\r');
            let lineno = lineno + 1;
            if line.trim().is_empty() {
                if !current.is_empty() {
                    sentences.push(std::mem::take(&mut current));
                }
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(Error::data_at(
                    name,
                    lineno,
                    format!("expected 3 tab-separated columns, got {}", cols.len()),
                ));
            }
            if cols[0].is_empty() {
                return Err(Error::data_at(name, lineno, "empty token surface"));
            }
            let pos = PosTag::parse(cols[1]).map_err(|e| Error::data_at(name, lineno, e))?;
            let label = Label::parse(cols[2]).map_err(|e| Error::data_at(name, lineno, e))?;
            current.push(ConllToken {
                surface: cols[0].to_string(),
                pos,
                label,
            });
        }
        if !current.is_empty() {
            sentences.push(current);
        }
        Ok(Corpus {
            sentences,
            split: Split::Train,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        Self::read(std::io::BufReader::new(file), &path.display().to_string())
    }

    /// Writes the same TSV format back out; `load . save` is the identity.
    pub fn write(&self, mut w: impl Write) -> Result<()> {
        for sentence in &self.sentences {
            for tok in sentence {
                writeln!(w, "{}\t{}\t{}", tok.surface, tok.pos.name(), tok.label.tag())?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write(std::io::BufWriter::new(file))
    }

    pub fn with_split(mut self, split: Split) -> Self {
        self.split = split;
        self
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// Gold labels of one sentence.
    pub fn labels(&self, idx: usize) -> Vec<Label> {
        self.sentences[idx].iter().map(|t| t.label).collect()
    }

    /// Gold entity spans of one sentence, decoded from its labels.
    pub fn gold_spans(&self, idx: usize) -> Vec<EntitySpan> {
        decode_spans(&self.labels(idx))
    }

    /// Tokens of one sentence, ready for featurization.
    pub fn tokens(&self, idx: usize) -> Vec<Token> {
        self.sentences[idx]
            .iter()
            .map(|t| Token::from_surface(t.surface.clone(), t.pos))
            .collect()
    }

    /// Featurizes every sentence.
    pub fn vectorize(&self, table: &EmbeddingTable) -> Result<Vec<Vec<TokenVector>>> {
        self.sentences
            .iter()
            .map(|s| {
                s.iter()
                    .map(|t| vectorize(&Token::from_surface(t.surface.clone(), t.pos), table))
                    .collect()
            })
            .collect()
    }

    /// Featurized sentences paired with gold labels, for tagger training.
    pub fn to_training(&self, table: &EmbeddingTable) -> Result<Vec<TrainSentence>> {
        let vectors = self.vectorize(table)?;
        Ok(vectors
            .into_iter()
            .zip(&self.sentences)
            .map(|(vectors, sent)| TrainSentence {
                vectors,
                labels: sent.iter().map(|t| t.label).collect(),
            })
            .collect())
    }

    /// Total number of gold entities.
    pub fn entity_count(&self) -> usize {
        (0..self.len()).map(|i| self.gold_spans(i).len()).sum()
    }

    /// Total number of tokens.
    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }
}
