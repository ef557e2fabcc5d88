//! Architecture descriptions and the neuron-increase transform: rank the
//! smaller layers, select as many as a size budget admits, scale their output
//! widths by a factor and re-plumb downstream input dimensions.

use crate::accounting;
use crate::error::{Error, Result};
use crate::quant::validate_bits;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LayerKind {
    FullyConnected,
    Lstm,
    BidirectionalLstm,
    Embedding,
    Output,
}

impl LayerKind {
    pub fn is_recurrent(&self) -> bool {
        matches!(self, LayerKind::Lstm | LayerKind::BidirectionalLstm)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            LayerKind::FullyConnected => "fc",
            LayerKind::Lstm => "lstm",
            LayerKind::BidirectionalLstm => "bilstm",
            LayerKind::Embedding => "embedding",
            LayerKind::Output => "output",
        }
    }
}

/// One layer of an architecture; `out_dim` is the layer's neuron count.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerSpec {
    pub name: String,
    pub kind: LayerKind,
    pub in_dim: usize,
    pub out_dim: usize,
    pub weight_bits: u8,
    pub activation_bits: u8,
}

impl LayerSpec {
    /// Width seen by the next layer: both directions of a bidirectional
    /// layer feed downstream.
    pub fn downstream_dim(&self) -> usize {
        match self.kind {
            LayerKind::BidirectionalLstm => 2 * self.out_dim,
            _ => self.out_dim,
        }
    }
}

/// An ordered, chain-consistent stack of layers.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    layers: Vec<LayerSpec>,
}

impl ModelSpec {
    pub fn new(layers: Vec<LayerSpec>) -> Result<ModelSpec> {
        if layers.is_empty() {
            return Err(Error::EmptyInput("model spec layers"));
        }
        for (index, layer) in layers.iter().enumerate() {
            if layer.in_dim == 0 {
                return Err(Error::InvalidLayerDim { index, dim: layer.in_dim });
            }
            if layer.out_dim == 0 {
                return Err(Error::InvalidLayerDim { index, dim: layer.out_dim });
            }
            validate_bits(layer.weight_bits)?;
            validate_bits(layer.activation_bits)?;
        }
        for index in 1..layers.len() {
            let expected = layers[index - 1].downstream_dim();
            if layers[index].in_dim != expected {
                return Err(Error::ChainMismatch {
                    index,
                    expected,
                    found: layers[index].in_dim,
                });
            }
        }
        Ok(ModelSpec { layers })
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }
}

/// Layers to widen plus the common width factor.
#[derive(Clone, Debug, PartialEq)]
pub struct WidenPlan {
    /// Indices into the spec's layer list, ascending.
    pub selected: Vec<usize>,
    pub factor: f64,
    /// Set when selection found no candidates at all.
    pub no_candidates: bool,
}

impl WidenPlan {
    pub fn empty(factor: f64) -> WidenPlan {
        WidenPlan { selected: Vec::new(), factor, no_candidates: false }
    }

    pub fn manual(selected: Vec<usize>, factor: f64) -> WidenPlan {
        let mut selected = selected;
        selected.sort_unstable();
        selected.dedup();
        WidenPlan { selected, factor, no_candidates: false }
    }
}

/// Ranks widening candidates by parameter count ascending and keeps
/// selecting while the projected total-size increase (at the layers'
/// assigned bit widths, including induced growth of adjacent layers) stays
/// within `budget_fraction`.
///
/// Output and recurrent layers are never auto-selected. A single-layer model
/// bypasses evaluation entirely and widens its one layer. Ties on parameter
/// count break toward the lower index.
pub fn select_layers(spec: &ModelSpec, budget_fraction: f64, factor: f64) -> Result<WidenPlan> {
    if !(factor > 1.0) {
        return Err(Error::InvalidFactor(factor));
    }
    if !(budget_fraction >= 0.0) {
        return Err(Error::InvalidBudget(budget_fraction));
    }
    if spec.len() == 1 {
        return Ok(WidenPlan { selected: vec![0], factor, no_candidates: false });
    }

    let sizes = accounting::model_size(spec);
    let base_bits = sizes.total_bits;
    let mut candidates: Vec<(u64, usize)> = spec
        .layers()
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.kind.is_recurrent() && l.kind != LayerKind::Output)
        .map(|(i, _)| (sizes.per_layer[i].params, i))
        .collect();
    if candidates.is_empty() {
        return Ok(WidenPlan { selected: Vec::new(), factor, no_candidates: true });
    }
    candidates.sort();

    let mut selected: Vec<usize> = Vec::new();
    for &(_, index) in &candidates {
        let mut trial = selected.clone();
        trial.push(index);
        trial.sort_unstable();
        let widened = apply_widening(spec, &WidenPlan::manual(trial.clone(), factor))?;
        let new_bits = accounting::model_size(&widened).total_bits;
        let increase = (new_bits - base_bits) as f64 / base_bits as f64;
        if increase <= budget_fraction {
            selected = trial;
        } else {
            break;
        }
    }
    Ok(WidenPlan { selected, factor, no_candidates: false })
}

/// Applies a widening plan: selected layers get `out_dim` scaled by the
/// factor (rounded half away from zero), downstream `in_dim`s are re-plumbed
/// to match, everything else keeps its own width.
pub fn apply_widening(spec: &ModelSpec, plan: &WidenPlan) -> Result<ModelSpec> {
    if plan.selected.is_empty() {
        return Ok(spec.clone());
    }
    if !(plan.factor > 1.0) {
        return Err(Error::InvalidFactor(plan.factor));
    }
    for &index in &plan.selected {
        if index >= spec.len() {
            return Err(Error::InvalidSelection { index, reason: "does not exist" });
        }
        if spec.layers()[index].kind == LayerKind::Output {
            return Err(Error::InvalidSelection { index, reason: "is the output layer" });
        }
    }

    let mut layers = spec.layers().to_vec();
    for (index, layer) in layers.iter_mut().enumerate() {
        if plan.selected.contains(&index) {
            let widened = (layer.out_dim as f64 * plan.factor).round() as usize;
            if widened == 0 {
                return Err(Error::InvalidLayerDim { index, dim: widened });
            }
            layer.out_dim = widened;
        }
    }
    for index in 1..layers.len() {
        layers[index].in_dim = layers[index - 1].downstream_dim();
    }
    // Re-validate; a failure here is an internal bug, not caller input.
    ModelSpec::new(layers)
}
