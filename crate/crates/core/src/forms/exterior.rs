//! Pointwise exterior algebra over a coordinate basis, with multi-indices
//! encoded as bitmasks.

use crate::liealg::{CMat, C64};

/// Strictly increasing k-subsets of `0..n` in lexicographic order.
pub fn multi_indices(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

pub fn to_mask(idx: &[usize]) -> u32 {
    idx.iter().fold(0u32, |m, &i| m | (1 << i))
}

pub fn from_mask(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

/// Masks of the canonical k-subsets, in component order.
pub fn masks(n: usize, k: usize) -> Vec<u32> {
    multi_indices(n, k).iter().map(|m| to_mask(m)).collect()
}

/// Position of a mask among the canonical k-subsets of `0..n`.
pub fn mask_position(n: usize, mask: u32) -> usize {
    // Combinatorial number system over lexicographic order.
    let idx = from_mask(mask);
    let k = idx.len();
    let mut pos = 0;
    let mut prev: isize = -1;
    for (slot, &i) in idx.iter().enumerate() {
        for skipped in (prev + 1) as usize..i {
            pos += binomial(n - skipped - 1, k - slot - 1);
        }
        prev = i as isize;
    }
    pos
}

/// Sign of `dx^a ∧ dx^b` relative to the sorted basis element `dx^(a ∪ b)`;
/// zero when the masks overlap.
pub fn wedge_sign(a: u32, b: u32) -> f64 {
    if a & b != 0 {
        return 0.0;
    }
    let mut swaps = 0u32;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        bb &= bb - 1;
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Precomputed products of canonical components: `(i, j, out, sign)`.
pub fn wedge_table(n: usize, k1: usize, k2: usize) -> Vec<(usize, usize, usize, f64)> {
    let m1 = masks(n, k1);
    let m2 = masks(n, k2);
    let mut table = Vec::new();
    for (i, &a) in m1.iter().enumerate() {
        for (j, &b) in m2.iter().enumerate() {
            let s = wedge_sign(a, b);
            if s != 0.0 {
                table.push((i, j, mask_position(n, a | b), s));
            }
        }
    }
    table
}

/// A mixed-degree matrix-valued element of the exterior algebra at a point.
#[derive(Debug, Clone, Default)]
pub struct Ext {
    pub terms: Vec<(u32, CMat)>,
}

impl Ext {
    pub fn new() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn from_homogeneous(n: usize, k: usize, values: Vec<CMat>) -> Self {
        Self { terms: masks(n, k).into_iter().zip(values).collect() }
    }

    pub fn scalar_part(m: CMat) -> Self {
        Self { terms: vec![(0, m)] }
    }

    pub fn accumulate(&mut self, mask: u32, value: CMat) {
        if let Some((_, v)) = self.terms.iter_mut().find(|(m, _)| *m == mask) {
            *v += value;
        } else {
            self.terms.push((mask, value));
        }
    }

    pub fn add(&self, other: &Ext) -> Ext {
        let mut out = self.clone();
        for (m, v) in &other.terms {
            out.accumulate(*m, v.clone());
        }
        out
    }

    pub fn scale(&self, s: C64) -> Ext {
        Ext { terms: self.terms.iter().map(|(m, v)| (*m, v * s)).collect() }
    }

    /// Graded product with a bilinear operation on the values.
    pub fn mul_with(&self, other: &Ext, op: impl Fn(&CMat, &CMat) -> CMat) -> Ext {
        let mut out = Ext::new();
        for (ma, va) in &self.terms {
            for (mb, vb) in &other.terms {
                let s = wedge_sign(*ma, *mb);
                if s != 0.0 {
                    out.accumulate(ma | mb, op(va, vb) * C64::new(s, 0.0));
                }
            }
        }
        out
    }

    /// Graded product with matrix multiplication.
    pub fn mul(&self, other: &Ext) -> Ext {
        self.mul_with(other, |a, b| a * b)
    }

    pub fn map(&self, f: impl Fn(&CMat) -> CMat) -> Ext {
        Ext { terms: self.terms.iter().map(|(m, v)| (*m, f(v))).collect() }
    }

    /// Degree-k part in canonical component order.
    pub fn homogeneous(&self, n: usize, k: usize, rows: usize, cols: usize) -> Vec<CMat> {
        let mut out = vec![CMat::zeros(rows, cols); binomial(n, k)];
        for (m, v) in &self.terms {
            if m.count_ones() as usize == k {
                out[mask_position(n, *m)] += v;
            }
        }
        out
    }

    /// Keeps only terms whose degree is odd or even as requested.
    pub fn is_even(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.count_ones() % 2 == 0)
    }

    pub fn is_odd(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.count_ones() % 2 == 1)
    }

    pub fn trace(&self) -> Ext {
        self.map(|v| CMat::from_element(1, 1, v.trace()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_positions_follow_lexicographic_order() {
        for n in 1..=7 {
            for k in 0..=n {
                for (pos, idx) in multi_indices(n, k).iter().enumerate() {
                    assert_eq!(mask_position(n, to_mask(idx)), pos);
                }
            }
        }
    }

    #[test]
    fn wedge_sign_matches_permutation_parity() {
        // dy ∧ dx = -dx ∧ dy
        assert_eq!(wedge_sign(0b10, 0b01), -1.0);
        assert_eq!(wedge_sign(0b01, 0b10), 1.0);
        // dz ∧ (dx ∧ dy) = dx ∧ dy ∧ dz
        assert_eq!(wedge_sign(0b100, 0b011), 1.0);
        // dy ∧ (dx ∧ dz) = -dx ∧ dy ∧ dz
        assert_eq!(wedge_sign(0b010, 0b101), -1.0);
        assert_eq!(wedge_sign(0b011, 0b010), 0.0);
    }

    #[test]
    fn binomial_counts_subsets() {
        for n in 0..8 {
            for k in 0..=n {
                assert_eq!(binomial(n, k), multi_indices(n, k).len());
            }
        }
    }
}
