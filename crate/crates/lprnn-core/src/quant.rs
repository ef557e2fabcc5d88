//! k-bit uniform quantizers for weights and activations plus their
//! straight-through-estimator backward rules.
//!
//! Weights are squashed through tanh, rescaled by the tensor's maximum
//! absolute tanh value into [0, 1], rounded onto the 2^k-level unit grid and
//! mapped back to [-1, 1]. Activations are clipped to their range and rounded
//! onto the same grid. Bit width 32 is an identity sentinel on both the
//! forward and backward path.
//!
//! Rounding is half-away-from-zero everywhere; this is observable at 1- and
//! 2-bit widths and part of the contract.

use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Bit widths accepted for weights and activations.
pub const ALLOWED_BITS: [u8; 6] = [1, 2, 4, 8, 16, 32];

/// Identity sentinel: 32-bit means "do not quantize this path".
pub const FULL_PRECISION: u8 = 32;

pub fn validate_bits(bits: u8) -> Result<()> {
    if ALLOWED_BITS.contains(&bits) {
        Ok(())
    } else {
        Err(Error::InvalidBits(bits))
    }
}

/// Bit widths for the weight and activation paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuantSpec {
    weight_bits: u8,
    activation_bits: u8,
}

impl QuantSpec {
    pub fn new(weight_bits: u8, activation_bits: u8) -> Result<QuantSpec> {
        validate_bits(weight_bits)?;
        validate_bits(activation_bits)?;
        Ok(QuantSpec { weight_bits, activation_bits })
    }

    pub fn full_precision() -> QuantSpec {
        QuantSpec { weight_bits: FULL_PRECISION, activation_bits: FULL_PRECISION }
    }

    pub fn weight_bits(&self) -> u8 {
        self.weight_bits
    }

    pub fn activation_bits(&self) -> u8 {
        self.activation_bits
    }
}

/// Number of grid intervals, 2^bits - 1. Valid for bits in 1..=16.
pub(crate) fn grid_max(bits: u8) -> u32 {
    (1u32 << bits) - 1
}

/// The unit-grid level `code / (2^bits - 1)`.
///
/// This exact expression is shared by the quantizers and by
/// [`crate::packed::unpack`], which is what makes pack/unpack round-trips
/// bit-exact.
pub(crate) fn unit_level(code: u32, bits: u8) -> f32 {
    code as f32 / grid_max(bits) as f32
}

/// The symmetric-grid level `2 * code / (2^bits - 1) - 1`.
pub(crate) fn symmetric_level(code: u32, bits: u8) -> f32 {
    2.0 * unit_level(code, bits) - 1.0
}

fn quantize_unit_clipped(x: f32, bits: u8) -> f32 {
    let n = grid_max(bits) as f32;
    // f32::round ties away from zero, which is the documented tie rule.
    (x * n).round() / n
}

/// Rounds `x` in [0, 1] onto the `2^bits`-level unit grid.
pub fn quantize_unit(x: f32, bits: u8) -> Result<f32> {
    if !(1..=16).contains(&bits) {
        return Err(Error::InvalidBits(bits));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::UnitRange(x));
    }
    Ok(quantize_unit_clipped(x, bits))
}

/// Quantizes a weight tensor onto the symmetric `bits`-bit grid in [-1, 1].
///
/// Returns the quantized tensor and the normalizer `max_t = max |tanh(w)|`,
/// which the backward pass treats as a constant. At 32 bits the input is
/// returned unchanged. An all-zero tensor quantizes to all zeros (max_t = 0).
pub fn quantize_weights(w: &Tensor, bits: u8) -> Result<(Tensor, f32)> {
    validate_bits(bits)?;
    if bits == FULL_PRECISION {
        return Ok((w.clone(), 1.0));
    }
    let t = w.map(f32::tanh);
    let max_t = t.max_abs();
    if max_t == 0.0 {
        return Ok((Tensor::zeros(w.rows(), w.cols()), 0.0));
    }
    let half_span = 2.0 * max_t;
    let wq = t.map(|ti| {
        let u = (ti / half_span + 0.5).clamp(0.0, 1.0);
        2.0 * quantize_unit_clipped(u, bits) - 1.0
    });
    Ok((wq, max_t))
}

/// Representable range of an activation quantizer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActRange {
    /// Clip to [0, 1], quantize on the unit grid.
    Unit,
    /// Map [-1, 1] onto the unit grid and back.
    Symmetric,
}

/// Clips activations to the range and rounds them onto the `bits`-bit grid.
/// 32 bits is the identity.
pub fn quantize_activations(a: &Tensor, bits: u8, range: ActRange) -> Result<Tensor> {
    validate_bits(bits)?;
    if bits == FULL_PRECISION {
        return Ok(a.clone());
    }
    let out = match range {
        ActRange::Unit => a.map(|x| quantize_unit_clipped(x.clamp(0.0, 1.0), bits)),
        ActRange::Symmetric => a.map(|x| {
            let u = ((x + 1.0) / 2.0).clamp(0.0, 1.0);
            2.0 * quantize_unit_clipped(u, bits) - 1.0
        }),
    };
    Ok(out)
}

/// Which quantizer a gradient is flowing back through.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SteKind {
    /// tanh-rescaled weight quantizer; needs the forward `max_t`.
    Weight,
    /// Unit-range activation quantizer.
    ActivationUnit,
    /// Symmetric-range activation quantizer.
    ActivationSymmetric,
}

/// Straight-through-estimator backward rule.
///
/// The rounding step is treated as identity. For the weight kind the chain
/// through tanh and the constant normalizer gives `grad * sech^2(w) / max_t`;
/// for activations the gradient passes where the pre-clip input lies inside
/// the representable range (inclusive) and is zero outside. 32 bits passes
/// the gradient through unchanged.
pub fn ste_backward(
    grad_out: &Tensor,
    pre_quant_input: &Tensor,
    kind: SteKind,
    max_t: f32,
    bits: u8,
) -> Result<Tensor> {
    validate_bits(bits)?;
    if grad_out.shape() != pre_quant_input.shape() {
        return Err(Error::ShapeMismatch {
            left: grad_out.shape(),
            right: pre_quant_input.shape(),
        });
    }
    if bits == FULL_PRECISION {
        return Ok(grad_out.clone());
    }
    let (rows, cols) = grad_out.shape();
    let out = match kind {
        SteKind::Weight => {
            // max_t == 0 only for an all-zero tensor; fall back to a unit
            // normalizer so the gradient is not destroyed by a 0/0.
            let m = if max_t > 0.0 { max_t } else { 1.0 };
            Tensor::from_fn(rows, cols, |r, c| {
                let t = pre_quant_input.get(r, c).tanh();
                grad_out.get(r, c) * (1.0 - t * t) / m
            })
        }
        SteKind::ActivationUnit => Tensor::from_fn(rows, cols, |r, c| {
            let x = pre_quant_input.get(r, c);
            if (0.0..=1.0).contains(&x) {
                grad_out.get(r, c)
            } else {
                0.0
            }
        }),
        SteKind::ActivationSymmetric => Tensor::from_fn(rows, cols, |r, c| {
            let x = pre_quant_input.get(r, c);
            if (-1.0..=1.0).contains(&x) {
                grad_out.get(r, c)
            } else {
                0.0
            }
        }),
    };
    Ok(out)
}
