//! Exact model-size, runtime-memory and compute accounting.
//!
//! Sizes are parameter counts times assigned bit widths in exact integer
//! arithmetic; ratios against the all-32-bit baseline are exact rationals, so
//! a uniform k-bit model reports exactly k/32. Biases are counted at their
//! layer's weight bit width.

use num_rational::Ratio;

use crate::widening::{LayerKind, LayerSpec, ModelSpec};

/// Parameters of one layer: weights plus biases.
///
/// FC/output: in*out + out. LSTM per direction: (in + H) * 4H + 4H.
/// Embedding: in*out, no bias.
pub fn layer_params(layer: &LayerSpec) -> u64 {
    let i = layer.in_dim as u64;
    let o = layer.out_dim as u64;
    match layer.kind {
        LayerKind::FullyConnected | LayerKind::Output => i * o + o,
        LayerKind::Embedding => i * o,
        LayerKind::Lstm => (i + o) * 4 * o + 4 * o,
        LayerKind::BidirectionalLstm => 2 * ((i + o) * 4 * o + 4 * o),
    }
}

/// Multiply-accumulates per timestep. Embedding lookups cost none.
pub fn layer_macs(layer: &LayerSpec) -> u64 {
    let i = layer.in_dim as u64;
    let o = layer.out_dim as u64;
    match layer.kind {
        LayerKind::FullyConnected | LayerKind::Output => i * o,
        LayerKind::Embedding => 0,
        LayerKind::Lstm => (i + o) * 4 * o,
        LayerKind::BidirectionalLstm => 2 * ((i + o) * 4 * o),
    }
}

/// Activation elements a layer produces for one batch element and timestep.
fn layer_activations(layer: &LayerSpec) -> u64 {
    match layer.kind {
        LayerKind::BidirectionalLstm => 2 * layer.out_dim as u64,
        _ => layer.out_dim as u64,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayerBits {
    pub name: String,
    pub params: u64,
    pub bits_per_value: u8,
    pub total_bits: u64,
}

/// Storage accounting for a spec, with the exact ratio against 32-bit.
#[derive(Clone, Debug, PartialEq)]
pub struct SizeReport {
    pub per_layer: Vec<LayerBits>,
    pub total_bits: u64,
    pub baseline_bits: u64,
    pub ratio: Ratio<u64>,
}

/// Activation-footprint accounting for a given batch and unroll length.
#[derive(Clone, Debug, PartialEq)]
pub struct MemoryReport {
    pub per_layer: Vec<LayerBits>,
    pub total_bits: u64,
    pub baseline_bits: u64,
    pub ratio: Ratio<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayerMacs {
    pub name: String,
    pub macs: u64,
}

/// MAC counts per timestep.
#[derive(Clone, Debug, PartialEq)]
pub struct ComputeReport {
    pub per_layer: Vec<LayerMacs>,
    pub total_macs: u64,
}

pub fn model_size(spec: &ModelSpec) -> SizeReport {
    let mut per_layer = Vec::with_capacity(spec.len());
    let mut total_bits = 0u64;
    let mut baseline_bits = 0u64;
    for layer in spec.layers() {
        let params = layer_params(layer);
        let bits = params * layer.weight_bits as u64;
        total_bits += bits;
        baseline_bits += params * 32;
        per_layer.push(LayerBits {
            name: layer.name.clone(),
            params,
            bits_per_value: layer.weight_bits,
            total_bits: bits,
        });
    }
    SizeReport { per_layer, total_bits, baseline_bits, ratio: Ratio::new(total_bits, baseline_bits) }
}

pub fn runtime_memory(spec: &ModelSpec, batch: u64, timesteps: u64) -> MemoryReport {
    let mut per_layer = Vec::with_capacity(spec.len());
    let mut total_bits = 0u64;
    let mut baseline_bits = 0u64;
    for layer in spec.layers() {
        let elements = layer_activations(layer) * batch * timesteps;
        let bits = elements * layer.activation_bits as u64;
        total_bits += bits;
        baseline_bits += elements * 32;
        per_layer.push(LayerBits {
            name: layer.name.clone(),
            params: elements,
            bits_per_value: layer.activation_bits,
            total_bits: bits,
        });
    }
    MemoryReport {
        per_layer,
        total_bits,
        baseline_bits,
        ratio: Ratio::new(total_bits, baseline_bits),
    }
}

pub fn compute_ops(spec: &ModelSpec) -> ComputeReport {
    let per_layer: Vec<LayerMacs> = spec
        .layers()
        .iter()
        .map(|l| LayerMacs { name: l.name.clone(), macs: layer_macs(l) })
        .collect();
    let total_macs = per_layer.iter().map(|l| l.macs).sum();
    ComputeReport { per_layer, total_macs }
}

/// Deltas of a variant against a baseline spec.
///
/// Size and memory deltas come in two forms because "an N% jump" is
/// ambiguous: `*_rel_pct` is the relative change of the totals, and
/// `*_points` is the change of the ratio-versus-32-bit expressed in
/// percentage points.
#[derive(Clone, Debug, PartialEq)]
pub struct CompareReport {
    pub size_rel_pct: f64,
    pub size_points: f64,
    pub memory_rel_pct: f64,
    pub memory_points: f64,
    pub compute_rel_pct: f64,
}

fn ratio_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn rel_pct(base: u64, variant: u64) -> f64 {
    (variant as f64 - base as f64) / base as f64 * 100.0
}

pub fn compare(baseline: &ModelSpec, variant: &ModelSpec, batch: u64, timesteps: u64) -> CompareReport {
    let size_b = model_size(baseline);
    let size_v = model_size(variant);
    let mem_b = runtime_memory(baseline, batch, timesteps);
    let mem_v = runtime_memory(variant, batch, timesteps);
    let ops_b = compute_ops(baseline);
    let ops_v = compute_ops(variant);
    CompareReport {
        size_rel_pct: rel_pct(size_b.total_bits, size_v.total_bits),
        size_points: (ratio_f64(size_v.ratio) - ratio_f64(size_b.ratio)) * 100.0,
        memory_rel_pct: rel_pct(mem_b.total_bits, mem_v.total_bits),
        memory_points: (ratio_f64(mem_v.ratio) - ratio_f64(mem_b.ratio)) * 100.0,
        compute_rel_pct: rel_pct(ops_b.total_macs, ops_v.total_macs),
    }
}
