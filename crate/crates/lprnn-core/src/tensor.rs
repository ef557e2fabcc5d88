//! Dense row-major 2-D tensors and the numeric primitives everything else is
//! built on.
//!
//! All operations are pure and deterministic. `matmul` accumulates strictly
//! left-to-right over the inner dimension (per output element, in f64,
//! rounded once to f32 at the end), so repeated runs produce bit-identical
//! results. Nothing here spawns threads or reorders reductions.

use crate::error::{Error, Result};

/// Dense 2-D array of f32 scalars, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    rows: usize,
    cols: usize,
    data: Vec<f32>,
}

impl Tensor {
    pub fn zeros(rows: usize, cols: usize) -> Tensor {
        Tensor { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f32>) -> Result<Tensor> {
        if data.len() != rows * cols {
            return Err(Error::DataLength { rows, cols, got: data.len() });
        }
        Ok(Tensor { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f32) -> Tensor {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Tensor { rows, cols, data }
    }

    pub fn identity(n: usize) -> Tensor {
        Tensor::from_fn(n, n, |r, c| if r == c { 1.0 } else { 0.0 })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> f32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn row(&self, r: usize) -> &[f32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn map(&self, f: impl Fn(f32) -> f32) -> Tensor {
        Tensor {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn transpose(&self) -> Tensor {
        Tensor::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    /// Largest absolute entry; 0 for an empty tensor.
    pub fn max_abs(&self) -> f32 {
        let mut m = 0.0f32;
        for &x in &self.data {
            let a = x.abs();
            if a > m {
                m = a;
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Columns `[start, end)` as a new tensor.
    pub fn slice_cols(&self, start: usize, end: usize) -> Tensor {
        assert!(start <= end && end <= self.cols, "column slice out of range");
        Tensor::from_fn(self.rows, end - start, |r, c| self.get(r, start + c))
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hconcat(&self, other: &Tensor) -> Result<Tensor> {
        if self.rows != other.rows {
            return Err(Error::ShapeMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Ok(Tensor { rows: self.rows, cols, data })
    }
}

fn check_same_shape(a: &Tensor, b: &Tensor) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch { left: a.shape(), right: b.shape() });
    }
    Ok(())
}

/// Matrix product with a fixed accumulation order: each output element sums
/// its inner-dimension terms left to right in f64 and is rounded to f32 once.
pub fn matmul(a: &Tensor, b: &Tensor) -> Result<Tensor> {
    if a.cols != b.rows {
        return Err(Error::ShapeMismatch { left: a.shape(), right: b.shape() });
    }
    let (m, n, p) = (a.rows, a.cols, b.cols);
    let mut acc = vec![0.0f64; m * p];
    for i in 0..m {
        let arow = a.row(i);
        let out = &mut acc[i * p..(i + 1) * p];
        for k in 0..n {
            let aik = arow[k] as f64;
            let brow = b.row(k);
            for j in 0..p {
                out[j] += aik * brow[j] as f64;
            }
        }
    }
    Ok(Tensor { rows: m, cols: p, data: acc.into_iter().map(|x| x as f32).collect() })
}

/// Elementwise sum.
pub fn add(a: &Tensor, b: &Tensor) -> Result<Tensor> {
    check_same_shape(a, b)?;
    Ok(Tensor {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(x, y)| x + y).collect(),
    })
}

/// Elementwise (Hadamard) product.
pub fn mul(a: &Tensor, b: &Tensor) -> Result<Tensor> {
    check_same_shape(a, b)?;
    Ok(Tensor {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(x, y)| x * y).collect(),
    })
}

pub fn scale(a: &Tensor, s: f32) -> Tensor {
    a.map(|x| x * s)
}

pub fn sigmoid(a: &Tensor) -> Tensor {
    a.map(sigmoid_scalar)
}

pub fn sigmoid_scalar(x: f32) -> f32 {
    1.0 / (1.0 + (-x).exp())
}

pub fn tanh(a: &Tensor) -> Tensor {
    a.map(f32::tanh)
}

/// Adds `bias` to every row of `a`.
pub fn add_bias(a: &Tensor, bias: &[f32]) -> Result<Tensor> {
    if bias.len() != a.cols {
        return Err(Error::ShapeMismatch { left: a.shape(), right: (1, bias.len()) });
    }
    Ok(Tensor::from_fn(a.rows, a.cols, |r, c| a.get(r, c) + bias[c]))
}

/// Row-wise softmax computed in f64 with max-subtraction.
///
/// Exposed separately from [`softmax_xent`] so evaluation code and tests can
/// inspect full-precision probabilities.
pub fn softmax_rows(logits: &Tensor) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(logits.rows);
    for r in 0..logits.rows {
        let row = logits.row(r);
        let mut max = f64::NEG_INFINITY;
        for &x in row {
            max = max.max(x as f64);
        }
        let mut exps: Vec<f64> = row.iter().map(|&x| ((x as f64) - max).exp()).collect();
        let sum: f64 = exps.iter().sum();
        for e in &mut exps {
            *e /= sum;
        }
        out.push(exps);
    }
    out
}

/// Mean negative log-likelihood of `targets` under row-wise softmax of
/// `logits`, plus its gradient `(softmax - onehot) / batch`.
pub fn softmax_xent(logits: &Tensor, targets: &[usize]) -> Result<(f64, Tensor)> {
    if targets.len() != logits.rows {
        return Err(Error::ShapeMismatch {
            left: logits.shape(),
            right: (targets.len(), 1),
        });
    }
    let vocab = logits.cols;
    for (row, &t) in targets.iter().enumerate() {
        if t >= vocab {
            return Err(Error::TargetOutOfRange { row, target: t, vocab });
        }
    }
    let batch = logits.rows as f64;
    let probs = softmax_rows(logits);
    let mut loss = 0.0f64;
    let mut grad = Tensor::zeros(logits.rows, vocab);
    for (r, row_probs) in probs.iter().enumerate() {
        loss -= row_probs[targets[r]].ln();
        for (c, &p) in row_probs.iter().enumerate() {
            let onehot = if c == targets[r] { 1.0 } else { 0.0 };
            grad.set(r, c, ((p - onehot) / batch) as f32);
        }
    }
    Ok((loss / batch, grad))
}

/// Deterministic seeded generator (SplitMix64).
///
/// The sequence depends only on the seed: plain 64-bit integer arithmetic,
/// no platform-specific paths, so runs are reproducible everywhere.
#[derive(Clone, Debug)]
pub struct SeededRng {
    state: u64,
}

impl SeededRng {
    pub fn new(seed: u64) -> SeededRng {
        SeededRng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform f32 in [0, 1) built from the top 24 bits of the next draw.
    pub fn next_f32(&mut self) -> f32 {
        const SCALE: f32 = 1.0 / (1u32 << 24) as f32;
        (self.next_u64() >> 40) as f32 * SCALE
    }

    pub fn uniform(&mut self, lo: f32, hi: f32) -> f32 {
        lo + (hi - lo) * self.next_f32()
    }

    /// Tensor with entries drawn uniformly from [-bound, bound], row-major
    /// draw order.
    pub fn uniform_tensor(&mut self, rows: usize, cols: usize, bound: f32) -> Tensor {
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            data.push(self.uniform(-bound, bound));
        }
        Tensor { rows, cols, data }
    }
}
