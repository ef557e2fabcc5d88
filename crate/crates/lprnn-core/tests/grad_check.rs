//! Backpropagation-through-time gradients checked against central finite
//! differences of an independent f64 forward pass.
//!
//! The oracle below re-implements the unquantized LSTM language model loss
//! in plain f64 loops, sharing no code with the production path it checks.

use lprnn_core::lstm::{backward, forward_sequence, LmModel};
use lprnn_core::quant::QuantSpec;
use lprnn_core::tensor::SeededRng;

#[derive(Clone)]
struct F64Model {
    emb: Vec<Vec<f64>>,
    w: Vec<Vec<f64>>,
    b: Vec<f64>,
    proj: Vec<Vec<f64>>,
    pb: Vec<f64>,
    e: usize,
    h: usize,
    v: usize,
}

fn widen(t: &lprnn_core::Tensor) -> Vec<Vec<f64>> {
    (0..t.rows()).map(|r| t.row(r).iter().map(|&x| x as f64).collect()).collect()
}

impl F64Model {
    fn from(model: &LmModel) -> F64Model {
        F64Model {
            emb: widen(&model.embedding),
            w: widen(&model.lstm.weights),
            b: model.lstm.bias.iter().map(|&x| x as f64).collect(),
            proj: widen(&model.projection),
            pb: model.projection_bias.iter().map(|&x| x as f64).collect(),
            e: model.embed_dim(),
            h: model.hidden(),
            v: model.vocab_size(),
        }
    }

    /// Mean NLL over all (t, b) positions, plain f64 arithmetic.
    fn loss(&self, inputs: &[Vec<u32>], targets: &[Vec<u32>]) -> f64 {
        let batch = inputs.len();
        let t_len = inputs[0].len();
        let (e, h, v) = (self.e, self.h, self.v);
        let mut hs = vec![vec![0.0f64; h]; batch];
        let mut cs = vec![vec![0.0f64; h]; batch];
        let mut total = 0.0f64;
        for t in 0..t_len {
            for bi in 0..batch {
                let x = &self.emb[inputs[bi][t] as usize];
                let mut gates = self.b.clone();
                for k in 0..e {
                    let xk = x[k];
                    for (j, g) in gates.iter_mut().enumerate() {
                        *g += xk * self.w[k][j];
                    }
                }
                for k in 0..h {
                    let hk = hs[bi][k];
                    for (j, g) in gates.iter_mut().enumerate() {
                        *g += hk * self.w[e + k][j];
                    }
                }
                let sig = |x: f64| 1.0 / (1.0 + (-x).exp());
                for j in 0..h {
                    let gi = sig(gates[j]);
                    let gf = sig(gates[h + j]);
                    let gg = gates[2 * h + j].tanh();
                    let go = sig(gates[3 * h + j]);
                    cs[bi][j] = gf * cs[bi][j] + gi * gg;
                    hs[bi][j] = go * cs[bi][j].tanh();
                }
                let mut logits = self.pb.clone();
                for k in 0..h {
                    let hk = hs[bi][k];
                    for (j, l) in logits.iter_mut().enumerate() {
                        *l += hk * self.proj[k][j];
                    }
                }
                let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let sum: f64 = logits.iter().map(|&l| (l - max).exp()).sum();
                let target = targets[bi][t] as usize;
                total -= (logits[target] - max) - sum.ln();
                let _ = v;
            }
        }
        total / (batch * t_len) as f64
    }
}

fn central_difference(
    oracle: &F64Model,
    inputs: &[Vec<u32>],
    targets: &[Vec<u32>],
    bump: impl Fn(&mut F64Model, f64),
) -> f64 {
    let h = 1e-5;
    let mut plus = oracle.clone();
    bump(&mut plus, h);
    let mut minus = oracle.clone();
    bump(&mut minus, -h);
    (plus.loss(inputs, targets) - minus.loss(inputs, targets)) / (2.0 * h)
}

/// Relative error with a floor that absorbs the f32 noise of the analytic
/// path on near-zero gradients.
fn rel_err(analytic: f64, fd: f64) -> f64 {
    let denom = analytic.abs().max(fd.abs()).max(1e-4);
    (analytic - fd).abs() / denom
}

#[test]
fn bptt_gradients_match_finite_differences_at_full_precision() {
    let (v, e, h, t_len, batch) = (20usize, 8usize, 16usize, 8usize, 2usize);
    let mut rng = SeededRng::new(0xBEEF);
    let model = LmModel::init(v, e, h, QuantSpec::full_precision(), true, &mut rng);

    let inputs: Vec<Vec<u32>> = (0..batch)
        .map(|_| (0..t_len).map(|_| (rng.next_u64() % v as u64) as u32).collect())
        .collect();
    let targets: Vec<Vec<u32>> = (0..batch)
        .map(|_| (0..t_len).map(|_| (rng.next_u64() % v as u64) as u32).collect())
        .collect();

    let (_, tape) = forward_sequence(&model, &inputs, None).unwrap();
    let (_, grads) = backward(&tape, &model, &targets).unwrap();

    let oracle = F64Model::from(&model);
    let mut worst = 0.0f64;
    let mut checked = 0usize;

    for r in 0..v {
        for c in 0..e {
            let fd = central_difference(&oracle, &inputs, &targets, |m, eps| m.emb[r][c] += eps);
            let an = grads.embedding.get(r, c) as f64;
            worst = worst.max(rel_err(an, fd));
            checked += 1;
        }
    }
    for r in 0..e + h {
        for c in 0..4 * h {
            let fd = central_difference(&oracle, &inputs, &targets, |m, eps| m.w[r][c] += eps);
            let an = grads.weights.get(r, c) as f64;
            worst = worst.max(rel_err(an, fd));
            checked += 1;
        }
    }
    for j in 0..4 * h {
        let fd = central_difference(&oracle, &inputs, &targets, |m, eps| m.b[j] += eps);
        worst = worst.max(rel_err(grads.bias[j] as f64, fd));
        checked += 1;
    }
    for r in 0..h {
        for c in 0..v {
            let fd = central_difference(&oracle, &inputs, &targets, |m, eps| m.proj[r][c] += eps);
            let an = grads.projection.get(r, c) as f64;
            worst = worst.max(rel_err(an, fd));
            checked += 1;
        }
    }
    for j in 0..v {
        let fd = central_difference(&oracle, &inputs, &targets, |m, eps| m.pb[j] += eps);
        worst = worst.max(rel_err(grads.projection_bias[j] as f64, fd));
        checked += 1;
    }

    println!("gradient check: {checked} parameters, max relative error {worst:.3e}");
    assert_eq!(checked, v * e + (e + h) * 4 * h + 4 * h + h * v + v);
    assert!(worst <= 1e-3, "max relative error {worst:.3e} exceeds 1e-3");
}
