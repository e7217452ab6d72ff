//! Minimal neural-network substrate: a feed-forward classifier for client
//! models and a recurrent regressor for sequence-to-distance prediction,
//! with hand-derived gradients and plain SGD.
//!
//! Parameters live in a single flat `f64` vector with an explicit block
//! layout (`shapes`), so models can be averaged coordinate-wise by the
//! gossip protocols and serialized bit-exactly.

mod lstm;
mod mlp;

pub use lstm::{init_lstm, lstm_mse_grad, lstm_regress, lstm_regress_grad};
pub use mlp::{cross_entropy_grad, forward_classify, init_mlp, predict_class};

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arch {
    MlpClassifier,
    LstmRegressor,
}

/// Flat parameter vector plus the block layout that gives it meaning.
///
/// `shapes` lists `(in_dim, out_dim)` blocks; a bias block is `(1, dim)`.
/// The flat vector concatenates the blocks in declaration order, each block
/// row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    arch: Arch,
    shapes: Vec<(usize, usize)>,
    values: Vec<f64>,
}

impl ModelParams {
    pub fn new(arch: Arch, shapes: Vec<(usize, usize)>, values: Vec<f64>) -> Result<Self> {
        let expect: usize = shapes.iter().map(|&(a, b)| a * b).sum();
        if values.len() != expect {
            return Err(Error::invalid(format!(
                "flat vector length {} does not match declared shapes (sum {expect})",
                values.len()
            )));
        }
        Ok(ModelParams {
            arch,
            shapes,
            values,
        })
    }

    pub fn arch(&self) -> Arch {
        self.arch
    }

    pub fn shapes(&self) -> &[(usize, usize)] {
        &self.shapes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Offset of block `idx` in the flat vector.
    pub fn block_offset(&self, idx: usize) -> usize {
        self.shapes[..idx].iter().map(|&(a, b)| a * b).sum()
    }

    pub fn block(&self, idx: usize) -> &[f64] {
        let off = self.block_offset(idx);
        let (a, b) = self.shapes[idx];
        &self.values[off..off + a * b]
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Same layout (arch + shapes) as another parameter set.
    pub fn layout_matches(&self, other: &ModelParams) -> bool {
        self.arch == other.arch && self.shapes == other.shapes
    }

    /// Serialize to the flat binary form: magic, arch tag, shape header,
    /// little-endian f64 values. Callers append their own metadata footer.
    pub fn write_binary<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(MODEL_MAGIC)?;
        w.write_all(&[match self.arch {
            Arch::MlpClassifier => 0u8,
            Arch::LstmRegressor => 1u8,
        }])?;
        w.write_all(&(self.shapes.len() as u32).to_le_bytes())?;
        for &(a, b) in &self.shapes {
            w.write_all(&(a as u32).to_le_bytes())?;
            w.write_all(&(b as u32).to_le_bytes())?;
        }
        w.write_all(&(self.values.len() as u64).to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    /// Inverse of [`write_binary`](Self::write_binary). Errors carry the byte
    /// offset where parsing stopped making sense.
    pub fn read_binary<R: Read>(r: &mut R) -> Result<Self> {
        let mut offset = 0u64;
        let mut take = |buf: &mut [u8], what: &str| -> Result<()> {
            r.read_exact(buf).map_err(|_| Error::Format {
                offset,
                message: format!("truncated while reading {what}"),
            })?;
            offset += buf.len() as u64;
            Ok(())
        };

        let mut magic = [0u8; 8];
        take(&mut magic, "magic")?;
        if &magic != MODEL_MAGIC {
            return Err(Error::Format {
                offset: 0,
                message: format!("bad magic {magic:02x?}, expected {MODEL_MAGIC:02x?}"),
            });
        }
        let mut tag = [0u8; 1];
        take(&mut tag, "arch tag")?;
        let arch = match tag[0] {
            0 => Arch::MlpClassifier,
            1 => Arch::LstmRegressor,
            t => {
                return Err(Error::Format {
                    offset: 8,
                    message: format!("unknown arch tag {t}"),
                })
            }
        };
        let mut u32buf = [0u8; 4];
        take(&mut u32buf, "shape count")?;
        let n_shapes = u32::from_le_bytes(u32buf) as usize;
        if n_shapes > 1024 {
            return Err(Error::Format {
                offset: 9,
                message: format!("implausible shape count {n_shapes}"),
            });
        }
        let mut shapes = Vec::with_capacity(n_shapes);
        for _ in 0..n_shapes {
            take(&mut u32buf, "shape")?;
            let a = u32::from_le_bytes(u32buf) as usize;
            take(&mut u32buf, "shape")?;
            let b = u32::from_le_bytes(u32buf) as usize;
            shapes.push((a, b));
        }
        let mut u64buf = [0u8; 8];
        take(&mut u64buf, "value count")?;
        let n_values = u64::from_le_bytes(u64buf) as usize;
        let expect: usize = shapes.iter().map(|&(a, b)| a * b).sum();
        if n_values != expect {
            return Err(Error::Format {
                offset,
                message: format!("value count {n_values} does not match shapes (sum {expect})"),
            });
        }
        let mut values = Vec::with_capacity(n_values);
        let mut f64buf = [0u8; 8];
        for _ in 0..n_values {
            take(&mut f64buf, "parameter value")?;
            values.push(f64::from_le_bytes(f64buf));
        }
        ModelParams::new(arch, shapes, values)
    }
}

pub const MODEL_MAGIC: &[u8; 8] = b"DFLMODL\x01";

/// Gradient with the same flat layout as its `ModelParams`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientVector {
    values: Vec<f64>,
}

impl GradientVector {
    pub fn zeros_like(m: &ModelParams) -> Self {
        GradientVector {
            values: vec![0.0; m.len()],
        }
    }

    pub fn from_values(values: Vec<f64>) -> Self {
        GradientVector { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scale(&mut self, k: f64) {
        for v in &mut self.values {
            *v *= k;
        }
    }

    pub fn add_assign(&mut self, other: &GradientVector) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
    }
}

/// `w ← w − lr·g`.
pub fn sgd_step(m: &ModelParams, g: &GradientVector, lr: f64) -> Result<ModelParams> {
    if g.len() != m.len() {
        return Err(Error::invalid(format!(
            "gradient length {} does not match params length {}",
            g.len(),
            m.len()
        )));
    }
    if !(lr >= 0.0 && lr.is_finite()) {
        return Err(Error::invalid(format!("learning rate must be finite and >= 0, got {lr}")));
    }
    let mut out = m.clone();
    for (w, gi) in out.values.iter_mut().zip(g.values()) {
        *w -= lr * gi;
    }
    Ok(out)
}

pub(crate) fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}
