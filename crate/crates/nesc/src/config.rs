//! Pipeline configuration: every training and sampling hyperparameter,
//! readable from a `key=value` file.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sampling::SamplerConfig;
use crate::scorer::NescTrainConfig;
use crate::tensor::AdamConfig;

/// All knobs in one place. Field names double as the file keys.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Encoder hidden size per direction.
    pub hidden_size: usize,
    /// Dropout rate on encoder outputs during tagger training.
    pub dropout: f64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Global gradient-norm ceiling.
    pub clip_norm: f64,
    pub ner_epochs: usize,
    /// Span-classifier hidden size.
    pub nesc_hidden: usize,
    pub nesc_epochs: usize,
    /// Context size k around candidate spans.
    pub context_size: usize,
    pub random_negatives: usize,
    pub max_attempts: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            hidden_size: 100,
            dropout: 0.5,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            clip_norm: 5.0,
            ner_epochs: 30,
            nesc_hidden: 100,
            nesc_epochs: 30,
            context_size: 2,
            random_negatives: 2,
            max_attempts: 20,
        }
    }
}

impl Config {
    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            lr: self.learning_rate,
            beta1: self.beta1,
            beta2: self.beta2,
            eps: self.epsilon,
        }
    }

    pub fn ner_train(&self) -> crate::ner::NerTrainConfig {
        crate::ner::NerTrainConfig {
            hidden: self.hidden_size,
            dropout: self.dropout,
            epochs: self.ner_epochs,
            adam: self.adam(),
            clip_norm: self.clip_norm,
        }
    }

    pub fn nesc_train(&self) -> NescTrainConfig {
        NescTrainConfig {
            hidden: self.nesc_hidden,
            context_size: self.context_size,
            epochs: self.nesc_epochs,
            adam: self.adam(),
            clip_norm: self.clip_norm,
        }
    }

    pub fn sampler(&self) -> SamplerConfig {
        SamplerConfig {
            context_size: self.context_size,
            random_negatives_per_sentence: self.random_negatives,
            max_attempts: self.max_attempts,
        }
    }

    /// Parses `key=value` lines; `#` starts a comment. Unknown keys and
    /// unparsable values are data errors naming the line.
    pub fn read(reader: impl BufRead, name: &str) -> Result<Self> {
        let mut cfg = Config::default();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = lineno + 1;
            let line = line.trim_end_matches('\r').trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::data_at(name, lineno, "expected key=value"))?;
            let (key, value) = (key.trim(), value.trim());
            cfg.set(key, value)
                .map_err(|e| Error::data_at(name, lineno, e))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        Self::read(std::io::BufReader::new(file), &path.display().to_string())
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn uint(v: &str) -> Result<usize> {
            v.parse()
                .map_err(|_| Error::Data(format!("bad integer {v:?}")))
        }
        fn float(v: &str) -> Result<f64> {
            v.parse()
                .map_err(|_| Error::Data(format!("bad float {v:?}")))
        }
        match key {
            "hidden_size" => self.hidden_size = uint(value)?,
            "dropout" => self.dropout = float(value)?,
            "learning_rate" => self.learning_rate = float(value)?,
            "beta1" => self.beta1 = float(value)?,
            "beta2" => self.beta2 = float(value)?,
            "epsilon" => self.epsilon = float(value)?,
            "clip_norm" => self.clip_norm = float(value)?,
            "ner_epochs" => self.ner_epochs = uint(value)?,
            "nesc_hidden" => self.nesc_hidden = uint(value)?,
            "nesc_epochs" => self.nesc_epochs = uint(value)?,
            "context_size" => self.context_size = uint(value)?,
            "random_negatives" => self.random_negatives = uint(value)?,
            "max_attempts" => self.max_attempts = uint(value)?,
            other => return Err(Error::Data(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Serializes every key, one per line.
    pub fn write(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "hidden_size={}", self.hidden_size)?;
        writeln!(w, "dropout={}", self.dropout)?;
        writeln!(w, "learning_rate={}", self.learning_rate)?;
        writeln!(w, "beta1={}", self.beta1)?;
        writeln!(w, "beta2={}", self.beta2)?;
        writeln!(w, "epsilon={}", self.epsilon)?;
        writeln!(w, "clip_norm={}", self.clip_norm)?;
        writeln!(w, "ner_epochs={}", self.ner_epochs)?;
        writeln!(w, "nesc_hidden={}", self.nesc_hidden)?;
        writeln!(w, "nesc_epochs={}", self.nesc_epochs)?;
        writeln!(w, "context_size={}", self.context_size)?;
        writeln!(w, "random_negatives={}", self.random_negatives)?;
        writeln!(w, "max_attempts={}", self.max_attempts)?;
        Ok(())
    }
}
