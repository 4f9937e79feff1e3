//! Byte-packed rows for constant-time Hamming distance.
//!
//! Each row of up to `8 * stride` symbols is stored as `stride` little-endian
//! `u64` lanes, one symbol per byte, zero padded. The distance of two rows is
//! the number of nonzero bytes in their XOR.

const LOW7: u64 = 0x7f7f_7f7f_7f7f_7f7f;
const HIGH: u64 = 0x8080_8080_8080_8080;

/// Count of nonzero bytes in `x`.
#[inline(always)]
pub fn nonzero_bytes(x: u64) -> u32 {
    ((((x & LOW7) + LOW7) | x) & HIGH).count_ones()
}

#[derive(Clone, Debug)]
pub struct PackedRows {
    stride: usize,
    rows: usize,
    lanes: Vec<u64>,
}

impl PackedRows {
    /// Packs `rows` rows of `width` symbols read from a flat slice, keeping
    /// only the 0-based positions in `keep`.
    pub fn from_flat(flat: &[u8], width: usize, keep: &[usize]) -> Self {
        let rows = flat.len().checked_div(width).unwrap_or(0);
        let stride = keep.len().div_ceil(8).max(1);
        let mut lanes = vec![0u64; rows * stride];
        for r in 0..rows {
            let row = &flat[r * width..(r + 1) * width];
            let dst = &mut lanes[r * stride..(r + 1) * stride];
            for (j, &p) in keep.iter().enumerate() {
                dst[j / 8] |= (row[p] as u64) << (8 * (j % 8));
            }
        }
        Self {
            stride,
            rows,
            lanes,
        }
    }

    /// Packs every position.
    pub fn full(flat: &[u8], width: usize) -> Self {
        let keep: Vec<usize> = (0..width).collect();
        Self::from_flat(flat, width, &keep)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline(always)]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.lanes[i * self.stride..(i + 1) * self.stride]
    }

    #[inline(always)]
    pub fn distance(&self, i: usize, j: usize) -> u32 {
        lane_distance(self.row(i), self.row(j))
    }
}

#[inline(always)]
pub fn lane_distance(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| nonzero_bytes(x ^ y)).sum()
}

/// Packs a single row, keeping the given 0-based positions.
pub fn pack_row(row: &[u8], keep: &[usize], out: &mut [u64]) {
    out.iter_mut().for_each(|l| *l = 0);
    for (j, &p) in keep.iter().enumerate() {
        out[j / 8] |= (row[p] as u64) << (8 * (j % 8));
    }
}
