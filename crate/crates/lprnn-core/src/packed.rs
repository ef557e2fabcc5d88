//! Bit-packed storage for quantized tensors and an integer-accumulated
//! matrix multiply over the packed codes.
//!
//! Packed layout: codes are stored least-significant-bit-first within each
//! byte, elements in row-major order, with every row padded to a byte
//! boundary. Widths 1, 2, 4, 8 and 16 use exact-width codes (16-bit codes are
//! little-endian); 32-bit tensors are never packed, they stay raw f32.

use crate::error::{Error, Result};
use crate::quant::{grid_max, symmetric_level, unit_level};
use crate::tensor::Tensor;

/// Which affine decode a packed tensor uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PackRange {
    /// Codes decode onto the unit grid: value = code / (2^k - 1).
    Unit,
    /// Codes decode onto [-1, 1]: value = 2 * code / (2^k - 1) - 1.
    Symmetric,
}

/// Quantized tensor stored as bit-packed level codes plus decode metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct PackedTensor {
    bits: u8,
    rows: usize,
    cols: usize,
    range: PackRange,
    data: Vec<u8>,
}

fn packable_bits(bits: u8) -> Result<()> {
    match bits {
        1 | 2 | 4 | 8 | 16 => Ok(()),
        other => Err(Error::InvalidBits(other)),
    }
}

impl PackedTensor {
    pub fn bits(&self) -> u8 {
        self.bits
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn range(&self) -> PackRange {
        self.range
    }

    /// Packed bytes, row-major, rows padded to byte boundaries.
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    /// Multiplier of the affine decode `value = scale * code + offset`.
    pub fn scale(&self) -> f32 {
        match self.range {
            PackRange::Unit => 1.0 / grid_max(self.bits) as f32,
            PackRange::Symmetric => 2.0 / grid_max(self.bits) as f32,
        }
    }

    /// Constant term of the affine decode.
    pub fn offset(&self) -> f32 {
        match self.range {
            PackRange::Unit => 0.0,
            PackRange::Symmetric => -1.0,
        }
    }

    pub fn bytes_per_row(bits: u8, cols: usize) -> usize {
        (cols * bits as usize + 7) / 8
    }

    /// Rebuilds a packed tensor from raw parts, validating framing and pad
    /// bits. Used by checkpoint loading.
    pub fn from_parts(
        bits: u8,
        rows: usize,
        cols: usize,
        range: PackRange,
        data: Vec<u8>,
    ) -> Result<PackedTensor> {
        packable_bits(bits)?;
        let bpr = Self::bytes_per_row(bits, cols);
        if data.len() != rows * bpr {
            return Err(Error::DataLength { rows, cols, got: data.len() });
        }
        let p = PackedTensor { bits, rows, cols, range, data };
        // Trailing pad bits of each row must be zero; anything else is
        // corruption (or an encoder bug).
        let used_bits = cols * bits as usize;
        let pad_bits = bpr * 8 - used_bits;
        if pad_bits > 0 {
            for r in 0..rows {
                let last = p.data[r * bpr + bpr - 1];
                if last >> (8 - pad_bits) != 0 {
                    return Err(Error::NotOnGrid {
                        row: r,
                        col: cols.saturating_sub(1),
                        value: last as f32,
                        bits,
                    });
                }
            }
        }
        Ok(p)
    }

    /// The integer code at (r, c).
    pub fn code(&self, r: usize, c: usize) -> u32 {
        let bits = self.bits as usize;
        let bpr = Self::bytes_per_row(self.bits, self.cols);
        let row = &self.data[r * bpr..(r + 1) * bpr];
        match bits {
            8 => row[c] as u32,
            16 => u16::from_le_bytes([row[2 * c], row[2 * c + 1]]) as u32,
            _ => {
                let bit_off = c * bits;
                let byte = row[bit_off / 8];
                let shift = bit_off % 8;
                ((byte >> shift) as u32) & ((1u32 << bits) - 1)
            }
        }
    }

    fn decode(&self, code: u32) -> f32 {
        match self.range {
            PackRange::Unit => unit_level(code, self.bits),
            PackRange::Symmetric => symmetric_level(code, self.bits),
        }
    }

    /// Decodes one row of codes into `buf`.
    fn codes_into(&self, r: usize, buf: &mut [u32]) {
        for (c, slot) in buf.iter_mut().enumerate() {
            *slot = self.code(r, c);
        }
    }
}

/// Packs a tensor whose entries already lie on the `bits`-bit level grid.
///
/// Entries off the grid are rejected; the grid check is bit-exact against
/// the same level arithmetic the quantizers use, so `unpack(pack(wq))`
/// reproduces `wq` exactly.
pub fn pack(wq: &Tensor, bits: u8, range: PackRange) -> Result<PackedTensor> {
    packable_bits(bits)?;
    let n = grid_max(bits);
    let (rows, cols) = wq.shape();
    let bpr = PackedTensor::bytes_per_row(bits, cols);
    let mut data = vec![0u8; rows * bpr];
    for r in 0..rows {
        for c in 0..cols {
            let x = wq.get(r, c);
            let u = match range {
                PackRange::Unit => x as f64,
                PackRange::Symmetric => (x as f64 + 1.0) / 2.0,
            };
            let code = (u * n as f64).round();
            let off_grid = Error::NotOnGrid { row: r, col: c, value: x, bits };
            if !(0.0..=n as f64).contains(&code) {
                return Err(off_grid);
            }
            let code = code as u32;
            let reconstructed = match range {
                PackRange::Unit => unit_level(code, bits),
                PackRange::Symmetric => symmetric_level(code, bits),
            };
            if reconstructed.to_bits() != x.to_bits() {
                return Err(off_grid);
            }
            let row_base = r * bpr;
            match bits {
                8 => data[row_base + c] = code as u8,
                16 => {
                    let le = (code as u16).to_le_bytes();
                    data[row_base + 2 * c] = le[0];
                    data[row_base + 2 * c + 1] = le[1];
                }
                b => {
                    let bit_off = c * b as usize;
                    data[row_base + bit_off / 8] |= (code as u8) << (bit_off % 8);
                }
            }
        }
    }
    Ok(PackedTensor { bits, rows, cols, range, data })
}

/// Decodes a packed tensor back to dense f32. Exact inverse of [`pack`].
pub fn unpack(p: &PackedTensor) -> Tensor {
    Tensor::from_fn(p.rows, p.cols, |r, c| p.decode(p.code(r, c)))
}

/// Integer-accumulated product of two packed tensors.
///
/// The code matrices are multiplied with exact i64 accumulation; the affine
/// decode is applied afterwards using code row/column sums, so the result
/// matches `matmul(unpack(a), unpack(b))` up to the final rescale rounding.
pub fn quantized_matmul(a: &PackedTensor, b: &PackedTensor) -> Result<Tensor> {
    if a.cols != b.rows {
        return Err(Error::ShapeMismatch { left: (a.rows, a.cols), right: (b.rows, b.cols) });
    }
    let inner = a.cols;
    let max_a = grid_max(a.bits) as u64;
    let max_b = grid_max(b.bits) as u64;
    let needed = inner as u128 * max_a as u128 * max_b as u128;
    if needed > i64::MAX as u128 {
        return Err(Error::AccumulatorOverflow {
            inner,
            max_a,
            max_b,
            needed,
            limit: i64::MAX,
        });
    }

    // Affine decode terms in f64; the f32 metadata accessors would cost
    // precision the final rescale cannot recover.
    let scale64 = |p: &PackedTensor| match p.range {
        PackRange::Unit => 1.0 / grid_max(p.bits) as f64,
        PackRange::Symmetric => 2.0 / grid_max(p.bits) as f64,
    };
    let sa = scale64(a);
    let oa = a.offset() as f64;
    let sb = scale64(b);
    let ob = b.offset() as f64;

    // Decode b's codes once, column-major access is over these buffers.
    let mut b_codes = vec![0u32; b.rows * b.cols];
    let mut col_sums = vec![0i64; b.cols];
    for r in 0..b.rows {
        let row = &mut b_codes[r * b.cols..(r + 1) * b.cols];
        b.codes_into(r, row);
        for (j, &code) in row.iter().enumerate() {
            col_sums[j] += code as i64;
        }
    }

    let mut out = Tensor::zeros(a.rows, b.cols);
    let mut a_row = vec![0u32; a.cols];
    for i in 0..a.rows {
        a.codes_into(i, &mut a_row);
        let row_sum: i64 = a_row.iter().map(|&c| c as i64).sum();
        for j in 0..b.cols {
            let mut dot = 0i64;
            for (k, &ac) in a_row.iter().enumerate() {
                dot += ac as i64 * b_codes[k * b.cols + j] as i64;
            }
            let v = sa * sb * dot as f64
                + sa * ob * row_sum as f64
                + oa * sb * col_sums[j] as f64
                + inner as f64 * oa * ob;
            out.set(i, j, v as f32);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quant::{quantize_activations, quantize_weights, ActRange};
    use crate::tensor::{matmul, SeededRng};

    #[test]
    fn declared_bit_layout() {
        // Codes [0, 1, 2, 3] at 2 bits pack into one byte 0xE4, first code in
        // the least-significant bit pair.
        let levels = Tensor::from_vec(
            1,
            4,
            (0..4).map(|c| symmetric_level(c, 2)).collect(),
        )
        .unwrap();
        let p = pack(&levels, 2, PackRange::Symmetric).unwrap();
        assert_eq!(p.data(), &[0xE4]);
        assert_eq!(p.code(0, 0), 0);
        assert_eq!(p.code(0, 3), 3);
    }

    #[test]
    fn rows_pad_to_byte_boundary() {
        let t = Tensor::zeros(3, 3);
        let p = pack(&t, 2, PackRange::Unit).unwrap();
        // 3 codes x 2 bits = 6 bits -> 1 byte per row.
        assert_eq!(p.data().len(), 3);
        let p = pack(&Tensor::zeros(2, 5), 1, PackRange::Unit).unwrap();
        assert_eq!(p.data().len(), 2);
    }

    #[test]
    fn round_trip_is_exact() {
        let mut rng = SeededRng::new(21);
        for bits in [1u8, 2, 4, 8, 16] {
            let w = rng.uniform_tensor(7, 5, 2.0);
            let (wq, _) = quantize_weights(&w, bits).unwrap();
            let p = pack(&wq, bits, PackRange::Symmetric).unwrap();
            let back = unpack(&p);
            for (x, y) in wq.data().iter().zip(back.data()) {
                assert_eq!(x.to_bits(), y.to_bits(), "bits {bits}");
            }

            let a = rng.uniform_tensor(4, 9, 1.0).map(f32::abs);
            let aq = quantize_activations(&a, bits, ActRange::Unit).unwrap();
            let p = pack(&aq, bits, PackRange::Unit).unwrap();
            assert_eq!(unpack(&p), aq);
        }
    }

    #[test]
    fn off_grid_entry_is_rejected() {
        let t = Tensor::from_vec(1, 2, vec![0.0, 0.1]).unwrap();
        assert!(matches!(
            pack(&t, 1, PackRange::Unit),
            Err(Error::NotOnGrid { col: 1, .. })
        ));
        // 32-bit tensors are stored raw, never packed.
        assert!(matches!(pack(&t, 32, PackRange::Unit), Err(Error::InvalidBits(32))));
    }

    #[test]
    fn from_parts_rejects_bad_framing_and_pad_bits() {
        assert!(PackedTensor::from_parts(2, 2, 4, PackRange::Unit, vec![0; 3]).is_err());
        // 3 codes x 2 bits leaves 2 pad bits that must stay zero.
        assert!(PackedTensor::from_parts(2, 1, 3, PackRange::Unit, vec![0b1100_0000]).is_err());
        assert!(PackedTensor::from_parts(2, 1, 3, PackRange::Unit, vec![0b0011_1111]).is_ok());
    }

    #[test]
    fn quantized_matmul_one_by_one() {
        // Code 3 at 2 bits decodes to 1.0 on the symmetric grid.
        let one = Tensor::from_vec(1, 1, vec![1.0]).unwrap();
        let p = pack(&one, 2, PackRange::Symmetric).unwrap();
        let r = quantized_matmul(&p, &p).unwrap();
        assert_eq!(r.data(), &[1.0]);
    }

    #[test]
    fn quantized_matmul_all_offset_codes() {
        // All-zero symmetric codes decode to -1 everywhere.
        let t = Tensor::from_vec(2, 3, vec![-1.0; 6]).unwrap();
        let a = pack(&t, 4, PackRange::Symmetric).unwrap();
        let t2 = Tensor::from_vec(3, 2, vec![-1.0; 6]).unwrap();
        let b = pack(&t2, 4, PackRange::Symmetric).unwrap();
        let want = matmul(&unpack(&a), &unpack(&b)).unwrap();
        let got = quantized_matmul(&a, &b).unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn quantized_matmul_matches_float_oracle() {
        let mut rng = SeededRng::new(33);
        for bits in [2u8, 4, 8] {
            let (aq, _) = quantize_weights(&rng.uniform_tensor(8, 8, 1.5), bits).unwrap();
            let (bq, _) = quantize_weights(&rng.uniform_tensor(8, 8, 1.5), bits).unwrap();
            let pa = pack(&aq, bits, PackRange::Symmetric).unwrap();
            let pb = pack(&bq, bits, PackRange::Symmetric).unwrap();
            let got = quantized_matmul(&pa, &pb).unwrap();
            let want = matmul(&unpack(&pa), &unpack(&pb)).unwrap();
            for i in 0..got.data().len() {
                let w = want.data()[i] as f64;
                let g = got.data()[i] as f64;
                // Relative to the accumulated magnitude, the standard GEMM
                // error scale.
                let scale = 8.0f64.max(w.abs());
                assert!(
                    (g - w).abs() / scale <= 1e-6,
                    "bits {bits}, entry {i}: {g} vs {w}"
                );
            }
        }
    }

    #[test]
    fn quantized_matmul_overflow_guard() {
        let t = Tensor::zeros(1, 1);
        let mut p = pack(&t, 16, PackRange::Unit).unwrap();
        // Forge an enormous inner dimension to trip the bound check without
        // allocating; rows/cols are plain fields.
        p.cols = usize::MAX / 2;
        let q = PackedTensor { bits: 16, rows: p.cols, cols: 1, range: PackRange::Unit, data: vec![] };
        assert!(matches!(
            quantized_matmul(&p, &q),
            Err(Error::AccumulatorOverflow { .. })
        ));
    }
}
