//! Model persistence: a self-describing container with a text header and
//! raw little-endian `f64` arrays, so round-trips are bit-exact.
//!
//! Layout: a magic line with the format version, the config snapshot, an
//! embedding-file checksum (or `none`), an array directory of names and
//! shapes, a `BINARY` marker, then the arrays' raw data in directory order.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::calibration::IsotonicCalibrator;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::ner::NerParams;
use crate::sampling::LengthDistribution;
use crate::scorer::NescParams;
use crate::tensor::Tensor;

const MAGIC: &str = "NESC-BUNDLE";
const VERSION: u32 = 1;

/// Everything a trained pipeline needs at inference time, except the
/// embedding table itself (checked by checksum instead).
#[derive(Debug, Clone, PartialEq)]
pub struct ModelBundle {
    pub config: Config,
    pub ner: NerParams,
    pub nesc: Option<NescParams>,
    pub length_dist: Option<LengthDistribution>,
    pub calibrator: Option<IsotonicCalibrator>,
    pub embedding_checksum: Option<u64>,
}

impl ModelBundle {
    pub fn new(config: Config, ner: NerParams) -> Self {
        ModelBundle {
            config,
            ner,
            nesc: None,
            length_dist: None,
            calibrator: None,
            embedding_checksum: None,
        }
    }

    fn directory(&self) -> Vec<(String, Tensor)> {
        let mut arrays: Vec<(String, Tensor)> = Vec::new();
        for (name, t) in self.ner.blocks() {
            arrays.push((format!("ner.{name}"), t.clone()));
        }
        if let Some(nesc) = &self.nesc {
            for (name, t) in nesc.blocks() {
                arrays.push((format!("nesc.{name}"), t.clone()));
            }
            arrays.push((
                "nesc.class_weights".to_string(),
                Tensor::vector(&[nesc.w_pos, nesc.w_neg]),
            ));
        }
        if let Some(dist) = &self.length_dist {
            let lengths: Vec<f64> = dist.lengths().iter().map(|&l| l as f64).collect();
            arrays.push(("dist.lengths".to_string(), Tensor::vector(&lengths)));
            arrays.push(("dist.probs".to_string(), Tensor::vector(dist.probs())));
        }
        if let Some(cal) = &self.calibrator {
            arrays.push(("cal.thresholds".to_string(), Tensor::vector(cal.thresholds())));
            arrays.push(("cal.values".to_string(), Tensor::vector(cal.values())));
        }
        arrays
    }

    pub fn write(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "{MAGIC} {VERSION}")?;
        let mut cfg = Vec::new();
        self.config.write(&mut cfg)?;
        let cfg_lines: Vec<&str> = std::str::from_utf8(&cfg)
            .expect("config is utf-8")
            .lines()
            .collect();
        writeln!(w, "config {}", cfg_lines.len())?;
        for line in cfg_lines {
            writeln!(w, "{line}")?;
        }
        match self.embedding_checksum {
            Some(sum) => writeln!(w, "embeddings {sum:016x}")?,
            None => writeln!(w, "embeddings none")?,
        }
        let arrays = self.directory();
        writeln!(w, "arrays {}", arrays.len())?;
        for (name, t) in &arrays {
            write!(w, "{name} {}", t.shape().len())?;
            for d in t.shape() {
                write!(w, " {d}")?;
            }
            writeln!(w)?;
        }
        writeln!(w, "BINARY")?;
        for (_, t) in &arrays {
            for v in t.data() {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write(std::io::BufWriter::new(file))
    }

    pub fn read(mut r: impl BufRead) -> Result<Self> {
        let mut line = String::new();

        read_line(&mut r, &mut line)?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(MAGIC) {
            return Err(Error::Corrupt("missing bundle magic".into()));
        }
        let found: u32 = parts
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Corrupt("unreadable version".into()))?;
        if found != VERSION {
            return Err(Error::Version {
                found,
                expected: VERSION,
            });
        }

        read_line(&mut r, &mut line)?;
        let n_cfg: usize = field(&line, "config")?;
        let mut cfg_text = String::new();
        for _ in 0..n_cfg {
            read_line(&mut r, &mut line)?;
            cfg_text.push_str(&line);
            cfg_text.push('\n');
        }
        let config = Config::read(std::io::Cursor::new(cfg_text), "bundle config")?;

        read_line(&mut r, &mut line)?;
        let checksum_field = line
            .strip_prefix("embeddings ")
            .ok_or_else(|| Error::Corrupt("missing embeddings line".into()))?;
        let embedding_checksum = match checksum_field {
            "none" => None,
            hex => Some(
                u64::from_str_radix(hex, 16)
                    .map_err(|_| Error::Corrupt("unreadable embeddings checksum".into()))?,
            ),
        };

        read_line(&mut r, &mut line)?;
        let n_arrays: usize = field(&line, "arrays")?;
        let mut directory: Vec<(String, Vec<usize>)> = Vec::with_capacity(n_arrays);
        for _ in 0..n_arrays {
            read_line(&mut r, &mut line)?;
            let mut parts = line.split_whitespace();
            let name = parts
                .next()
                .ok_or_else(|| Error::Corrupt("empty array entry".into()))?
                .to_string();
            let ndim: usize = parts
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Corrupt(format!("bad rank for {name}")))?;
            let shape: Vec<usize> = parts
                .map(|p| p.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Corrupt(format!("bad shape for {name}")))?;
            if shape.len() != ndim {
                return Err(Error::Corrupt(format!("rank mismatch for {name}")));
            }
            directory.push((name, shape));
        }

        read_line(&mut r, &mut line)?;
        if line != "BINARY" {
            return Err(Error::Corrupt("missing BINARY marker".into()));
        }

        let mut arrays: Vec<(String, Tensor)> = Vec::with_capacity(directory.len());
        for (name, shape) in directory {
            let count: usize = shape.iter().product();
            let mut bytes = vec![0u8; count * 8];
            std::io::Read::read_exact(&mut r, &mut bytes)
                .map_err(|_| Error::Corrupt(format!("truncated data for {name}")))?;
            let data: Vec<f64> = bytes
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
                .collect();
            arrays.push((name, Tensor::new(shape, data)?));
        }

        Self::assemble(config, embedding_checksum, arrays)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        Self::read(std::io::BufReader::new(file))
    }

    fn assemble(
        config: Config,
        embedding_checksum: Option<u64>,
        arrays: Vec<(String, Tensor)>,
    ) -> Result<Self> {
        let mut ner = NerParams::zeros(config.hidden_size);
        ner.dropout = config.dropout;
        let mut nesc_arrays: Vec<(String, Tensor)> = Vec::new();
        let mut dist_lengths = None;
        let mut dist_probs = None;
        let mut cal_thresholds = None;
        let mut cal_values = None;
        let mut seen_ner = 0usize;

        for (name, tensor) in arrays {
            if let Some(rest) = name.strip_prefix("ner.") {
                let mut blocks = ner.blocks_mut();
                let slot = blocks
                    .iter_mut()
                    .find(|(n, _)| *n == rest)
                    .ok_or_else(|| Error::Corrupt(format!("unknown array {name}")))?;
                if slot.1.shape() != tensor.shape() {
                    return Err(Error::Corrupt(format!(
                        "array {name} has shape {:?}, config wants {:?}",
                        tensor.shape(),
                        slot.1.shape()
                    )));
                }
                *slot.1 = tensor;
                seen_ner += 1;
            } else if name.starts_with("nesc.") {
                nesc_arrays.push((name, tensor));
            } else if name == "dist.lengths" {
                dist_lengths = Some(tensor);
            } else if name == "dist.probs" {
                dist_probs = Some(tensor);
            } else if name == "cal.thresholds" {
                cal_thresholds = Some(tensor);
            } else if name == "cal.values" {
                cal_values = Some(tensor);
            } else {
                return Err(Error::Corrupt(format!("unknown array {name}")));
            }
        }
        if seen_ner != ner.blocks().len() {
            return Err(Error::Corrupt(format!(
                "expected {} tagger arrays, found {seen_ner}",
                ner.blocks().len()
            )));
        }

        let nesc = if nesc_arrays.is_empty() {
            None
        } else {
            let mut weights = None;
            let mut params = NescParams::zeros(
                2 * config.hidden_size,
                config.nesc_hidden,
                config.context_size,
            );
            let mut seen = 0usize;
            for (name, tensor) in nesc_arrays {
                let rest = name.strip_prefix("nesc.").expect("prefixed");
                if rest == "class_weights" {
                    if tensor.len() != 2 {
                        return Err(Error::Corrupt("class_weights wants 2 values".into()));
                    }
                    weights = Some((tensor.data()[0], tensor.data()[1]));
                    continue;
                }
                let mut blocks = params.blocks_mut();
                let slot = blocks
                    .iter_mut()
                    .find(|(n, _)| *n == rest)
                    .ok_or_else(|| Error::Corrupt(format!("unknown array {name}")))?;
                if slot.1.shape() != tensor.shape() {
                    return Err(Error::Corrupt(format!(
                        "array {name} has shape {:?}, config wants {:?}",
                        tensor.shape(),
                        slot.1.shape()
                    )));
                }
                *slot.1 = tensor;
                seen += 1;
            }
            if seen != params.blocks().len() {
                return Err(Error::Corrupt(format!(
                    "expected {} classifier arrays, found {seen}",
                    params.blocks().len()
                )));
            }
            let (w_pos, w_neg) =
                weights.ok_or_else(|| Error::Corrupt("missing class weights".into()))?;
            params.w_pos = w_pos;
            params.w_neg = w_neg;
            Some(params)
        };

        let length_dist = match (dist_lengths, dist_probs) {
            (None, None) => None,
            (Some(l), Some(p)) => Some(LengthDistribution::from_parts(
                l.data().iter().map(|&v| v as usize).collect(),
                p.data().to_vec(),
            )?),
            _ => return Err(Error::Corrupt("half a length distribution".into())),
        };
        let calibrator = match (cal_thresholds, cal_values) {
            (None, None) => None,
            (Some(t), Some(v)) => Some(IsotonicCalibrator::from_knots(
                t.data().to_vec(),
                v.data().to_vec(),
            )?),
            _ => return Err(Error::Corrupt("half a calibrator".into())),
        };

        Ok(ModelBundle {
            config,
            ner,
            nesc,
            length_dist,
            calibrator,
            embedding_checksum,
        })
    }
}

fn read_line(r: &mut impl BufRead, line: &mut String) -> Result<()> {
    line.clear();
    let n = r.read_line(line)?;
    if n == 0 {
        return Err(Error::Corrupt("unexpected end of file".into()));
    }
    while line.ends_with('\n') || line.ends_with('\r') {
        line.pop();
    }
    Ok(())
}

fn field<T: std::str::FromStr>(line: &str, key: &str) -> Result<T> {
    line.strip_prefix(key)
        .map(str::trim)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Corrupt(format!("expected `{key} <value>`, got {line:?}")))
}

/// FNV-1a over raw bytes, used to fingerprint embedding files.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Checksum of a file on disk.
pub fn file_checksum(path: &Path) -> Result<u64> {
    Ok(fnv1a64(&std::fs::read(path)?))
}
