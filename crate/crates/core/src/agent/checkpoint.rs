//! Binary checkpoints of a Q-network pair and its optimizer.
//!
//! Layout, all little-endian: the 8-byte magic `RLCQEDQN`, a `u32` version,
//! the `u32` pool size, then for each of the two networks a `u32` layer count
//! followed by `(n_in, n_out)` pairs and the `f64` weights and biases. The
//! optimizer section holds the step count, its five hyperparameters and the
//! first and second moments. A trailing `u64` records the train-step count.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::network::{Linear, QNetwork};
use super::optim::AdamW;
use super::AgentError;

const MAGIC: &[u8; 8] = b"RLCQEDQN";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Everything needed to resume training bit-for-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub online: QNetwork,
    pub target: QNetwork,
    pub optimizer: AdamW,
    pub train_steps: u64,
}

fn put_u32(w: &mut impl Write, x: u32) -> std::io::Result<()> {
    w.write_all(&x.to_le_bytes())
}

fn put_u64(w: &mut impl Write, x: u64) -> std::io::Result<()> {
    w.write_all(&x.to_le_bytes())
}

fn put_f64s(w: &mut impl Write, xs: &[f64]) -> std::io::Result<()> {
    xs.iter().try_for_each(|x| w.write_all(&x.to_le_bytes()))
}

fn get_u32(r: &mut impl Read) -> Result<u32, AgentError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn get_u64(r: &mut impl Read) -> Result<u64, AgentError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn get_f64s(r: &mut impl Read, n: usize) -> Result<Vec<f64>, AgentError> {
    let mut buf = vec![0u8; n * 8];
    r.read_exact(&mut buf)?;
    Ok(buf.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
}

fn write_network(w: &mut impl Write, net: &QNetwork) -> std::io::Result<()> {
    put_u32(w, net.layers().len() as u32)?;
    for l in net.layers() {
        put_u32(w, l.n_in as u32)?;
        put_u32(w, l.n_out as u32)?;
    }
    for l in net.layers() {
        put_f64s(w, &l.weight)?;
        put_f64s(w, &l.bias)?;
    }
    Ok(())
}

fn read_network(r: &mut impl Read) -> Result<QNetwork, AgentError> {
    let n_layers = get_u32(r)? as usize;
    if n_layers == 0 || n_layers > 1024 {
        return Err(AgentError::Checkpoint(format!("implausible layer count {n_layers}")));
    }
    let mut shapes = Vec::with_capacity(n_layers);
    for _ in 0..n_layers {
        let n_in = get_u32(r)? as usize;
        let n_out = get_u32(r)? as usize;
        if n_in == 0 || n_out == 0 || n_in.saturating_mul(n_out) > 1 << 28 {
            return Err(AgentError::Checkpoint(format!("implausible layer shape {n_in}x{n_out}")));
        }
        shapes.push((n_in, n_out));
    }
    let mut layers = Vec::with_capacity(n_layers);
    for (n_in, n_out) in shapes {
        let mut l = Linear::zeros(n_in, n_out);
        l.weight = get_f64s(r, n_in * n_out)?;
        l.bias = get_f64s(r, n_out)?;
        layers.push(l);
    }
    QNetwork::from_layers(layers)
}

impl Checkpoint {
    pub fn write_to(&self, w: &mut impl Write) -> Result<(), AgentError> {
        w.write_all(MAGIC)?;
        put_u32(w, CHECKPOINT_VERSION)?;
        put_u32(w, self.online.output_width() as u32)?;
        write_network(w, &self.online)?;
        write_network(w, &self.target)?;
        let o = &self.optimizer;
        put_u64(w, o.step_count())?;
        put_f64s(w, &[o.learning_rate, o.beta1, o.beta2, o.epsilon, o.weight_decay])?;
        let (m, v) = o.moments();
        for buf in m.iter().chain(v) {
            put_f64s(w, buf)?;
        }
        put_u64(w, self.train_steps)?;
        Ok(())
    }

    /// Reads a checkpoint; `expected_pool` rejects files built for another pool.
    pub fn read_from(r: &mut impl Read, expected_pool: Option<usize>) -> Result<Self, AgentError> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(AgentError::Checkpoint("bad magic bytes".into()));
        }
        let version = get_u32(r)?;
        if version != CHECKPOINT_VERSION {
            return Err(AgentError::Version { found: version, expected: CHECKPOINT_VERSION });
        }
        let pool = get_u32(r)? as usize;
        if let Some(expected) = expected_pool {
            if pool != expected {
                return Err(AgentError::WidthMismatch { expected, got: pool });
            }
        }
        let online = read_network(r)?;
        let target = read_network(r)?;
        if online.output_width() != pool || target.output_width() != pool {
            return Err(AgentError::Checkpoint("network output width differs from pool size".into()));
        }
        let same_shape =
            online.layers().iter().zip(target.layers()).all(|(a, b)| a.n_in == b.n_in && a.n_out == b.n_out);
        if online.layers().len() != target.layers().len() || !same_shape {
            return Err(AgentError::Checkpoint("online and target shapes differ".into()));
        }
        let step = get_u64(r)?;
        let hp = get_f64s(r, 5)?;
        let mut optimizer = AdamW::new(&online, hp[0], hp[1], hp[2], hp[3], hp[4]);
        let lengths: Vec<usize> = optimizer.moments().0.iter().map(Vec::len).collect();
        let m = lengths.iter().map(|&n| get_f64s(r, n)).collect::<Result<Vec<_>, _>>()?;
        let v = lengths.iter().map(|&n| get_f64s(r, n)).collect::<Result<Vec<_>, _>>()?;
        optimizer.restore(step, m, v);
        let train_steps = get_u64(r)?;
        Ok(Self { online, target, optimizer, train_steps })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), AgentError> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>, expected_pool: Option<usize>) -> Result<Self, AgentError> {
        Self::read_from(&mut BufReader::new(File::open(path)?), expected_pool)
    }
}
