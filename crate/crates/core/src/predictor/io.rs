//! Binary model files: magic, format version, dimension header, then every
//! tensor as little-endian f64 in storage order.

use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2};

use super::model::{Model, ModelConfig, Scaler};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"BOOLGNN\0";
pub const FORMAT_VERSION: u32 = 1;

/// Where a model's parameters came from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Lineage {
    pub train_seed: u64,
    pub epochs: u64,
}

struct Writer(Vec<u8>);

impl Writer {
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64s<'a>(&mut self, it: impl IntoIterator<Item = &'a f64>) {
        for v in it {
            self.0.extend_from_slice(&v.to_le_bytes());
        }
    }
}

struct Reader<'a> {
    b: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.b.len()).ok_or_else(|| Error::Model("truncated file".into()))?;
        let s = &self.b[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn dims(&mut self) -> Result<Vec<usize>> {
        let n = self.u32()? as usize;
        if n > 64 {
            return Err(Error::Model(format!("implausible layer count {n}")));
        }
        (0..n).map(|_| self.u32().map(|v| v as usize)).collect()
    }
    fn array1(&mut self, n: usize) -> Result<Array1<f64>> {
        (0..n).map(|_| self.f64()).collect::<Result<Vec<_>>>().map(Array1::from)
    }
}

pub fn model_to_bytes(model: &Model, lineage: Lineage) -> Vec<u8> {
    let c = &model.config;
    let mut w = Writer(Vec::with_capacity(64 + 8 * model.num_params()));
    w.0.extend_from_slice(MAGIC);
    w.u32(FORMAT_VERSION);
    w.u32(c.in_dim as u32);
    w.u32(c.conv_dims.len() as u32);
    c.conv_dims.iter().for_each(|&d| w.u32(d as u32));
    w.u32(c.dense_dims.len() as u32);
    c.dense_dims.iter().for_each(|&d| w.u32(d as u32));
    w.u64(c.dropout.to_bits());
    w.u64(c.seed);
    w.u64(lineage.train_seed);
    w.u64(lineage.epochs);
    w.f64s(&model.scaler.mean);
    w.f64s(&model.scaler.std);
    for p in &model.params {
        w.f64s(p.iter());
    }
    for j in 0..2 {
        w.f64s(&model.running_mean[j]);
        w.f64s(&model.running_var[j]);
    }
    w.0
}

pub fn model_from_bytes(bytes: &[u8]) -> Result<(Model, Lineage)> {
    let mut r = Reader { b: bytes, pos: 0 };
    if r.take(8)? != MAGIC {
        return Err(Error::Model("not a model file (bad magic)".into()));
    }
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(Error::Model(format!("unsupported format version {version}")));
    }
    let in_dim = r.u32()? as usize;
    let conv_dims = r.dims()?;
    let dense_dims = r.dims()?;
    let dropout = f64::from_bits(r.u64()?);
    let seed = r.u64()?;
    let lineage = Lineage { train_seed: r.u64()?, epochs: r.u64()? };
    let config = ModelConfig { in_dim, conv_dims, dense_dims, dropout, seed };
    config.validate().map_err(|e| Error::Model(format!("bad header: {e}")))?;
    let expected = 8 * (2 * in_dim + config.num_params() + 2 * (config.dense_dims[0] + config.dense_dims[1]));
    if bytes.len() - r.pos != expected {
        return Err(Error::Model(format!(
            "header promises {expected} bytes of tensors, file holds {}",
            bytes.len() - r.pos
        )));
    }
    let scaler = Scaler { mean: r.array1(in_dim)?, std: r.array1(in_dim)? };
    let mut params = Vec::new();
    for shape in config.param_shapes() {
        let v = r.array1(shape.0 * shape.1)?;
        params.push(Array2::from_shape_vec(shape, v.to_vec()).expect("length checked"));
    }
    let (w0, w1) = (config.dense_dims[0], config.dense_dims[1]);
    let rm0 = r.array1(w0)?;
    let rv0 = r.array1(w0)?;
    let rm1 = r.array1(w1)?;
    let rv1 = r.array1(w1)?;
    let model = Model { config, params, running_mean: [rm0, rm1], running_var: [rv0, rv1], scaler };
    Ok((model, lineage))
}

pub fn save_model(model: &Model, lineage: Lineage, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, model_to_bytes(model, lineage))?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<(Model, Lineage)> {
    model_from_bytes(&fs::read(path)?)
}
