//! Binary model file.
//!
//! ```text
//! "CMHM" | version: u8
//! per branch (image, then attribute):
//!   layer count L: u32 LE
//!   L + 1 layer dims: u32 LE each (input, hidden..., output)
//!   per layer: weights (out x in, row-major, f64 LE), then bias (out, f64 LE)
//! ```

use std::io::{Read, Write};

use super::matrix::Matrix;
use super::net::{Dense, FeatureNet};
use super::train::CoupledModel;
use crate::error::{Error, Result};

const MODEL_MAGIC: &[u8; 4] = b"CMHM";
const MODEL_VERSION: u8 = 1;
/// Sanity bound on layer counts and widths read from disk.
const MAX_DIM: u32 = 1 << 20;

fn write_net<W: Write>(w: &mut W, net: &FeatureNet) -> Result<()> {
    w.write_all(&(net.layers().len() as u32).to_le_bytes())?;
    for d in net.dims() {
        w.write_all(&(d as u32).to_le_bytes())?;
    }
    for layer in net.layers() {
        for v in layer.weights.as_slice().iter().chain(&layer.bias) {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64s<R: Read>(r: &mut R, n: usize) -> Result<Vec<f64>> {
    let mut buf = vec![0u8; n * 8];
    r.read_exact(&mut buf)?;
    Ok(buf.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
}

fn read_net<R: Read>(r: &mut R) -> Result<FeatureNet> {
    let layers = read_u32(r)?;
    if layers == 0 || layers > 64 {
        return Err(Error::Format(format!("implausible layer count {layers}")));
    }
    let mut dims = Vec::with_capacity(layers as usize + 1);
    for _ in 0..=layers {
        let d = read_u32(r)?;
        if d == 0 || d > MAX_DIM {
            return Err(Error::Format(format!("implausible layer width {d}")));
        }
        dims.push(d as usize);
    }
    let mut out = Vec::with_capacity(layers as usize);
    for w in dims.windows(2) {
        let (inputs, outputs) = (w[0], w[1]);
        let weights = Matrix::from_vec(outputs, inputs, read_f64s(r, inputs * outputs)?);
        let bias = read_f64s(r, outputs)?;
        out.push(Dense { weights, bias });
    }
    FeatureNet::from_layers(out)
}

pub fn write_model<W: Write>(model: &CoupledModel, mut w: W) -> Result<()> {
    w.write_all(MODEL_MAGIC)?;
    w.write_all(&[MODEL_VERSION])?;
    write_net(&mut w, &model.image_net)?;
    write_net(&mut w, &model.attr_net)?;
    w.flush()?;
    Ok(())
}

pub fn read_model<R: Read>(mut r: R) -> Result<CoupledModel> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MODEL_MAGIC {
        return Err(Error::Format("not a model file (bad magic)".into()));
    }
    let mut version = [0u8; 1];
    r.read_exact(&mut version)?;
    if version[0] != MODEL_VERSION {
        return Err(Error::Format(format!("unsupported model version {}", version[0])));
    }
    let image_net = read_net(&mut r)?;
    let attr_net = read_net(&mut r)?;
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(Error::Format("trailing bytes after model".into()));
    }
    CoupledModel::from_nets(image_net, attr_net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmh::train::TrainConfig;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn model() -> CoupledModel {
        let cfg = TrainConfig { image_hidden: vec![5], attr_hidden: vec![4, 4], ..TrainConfig::with_code_bits(8) };
        CoupledModel::init(&cfg, 3, 2, &mut ChaCha8Rng::seed_from_u64(1)).unwrap()
    }

    #[test]
    fn layout_and_round_trip() {
        let m = model();
        let mut buf = Vec::new();
        write_model(&m, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"CMHM");
        assert_eq!(buf[4], 1);
        assert_eq!(&buf[5..9], &2u32.to_le_bytes());
        assert_eq!(&buf[9..21], &[3u32, 5, 8].map(u32::to_le_bytes).concat()[..]);
        let first_weight = m.image_net.layers()[0].weights.get(0, 0);
        assert_eq!(&buf[21..29], &first_weight.to_le_bytes());
        let image_params = 3 * 5 + 5 + 5 * 8 + 8;
        let attr_params = 2 * 4 + 4 + 4 * 4 + 4 + 4 * 8 + 8;
        assert_eq!(buf.len(), 5 + 4 + 12 + 8 * image_params + 4 + 16 + 8 * attr_params);
        assert_eq!(read_model(&buf[..]).unwrap(), m);
    }

    #[test]
    fn rejects_corrupt_files() {
        let mut buf = Vec::new();
        write_model(&model(), &mut buf).unwrap();
        let mut bad = buf.clone();
        bad[1] = b'X';
        assert!(matches!(read_model(&bad[..]), Err(Error::Format(_))));
        let mut bad = buf.clone();
        bad[4] = 2;
        assert!(matches!(read_model(&bad[..]), Err(Error::Format(_))));
        assert!(read_model(&buf[..buf.len() - 3]).is_err());
        let mut bad = buf.clone();
        bad.push(1);
        assert!(read_model(&bad[..]).is_err());
    }
}
