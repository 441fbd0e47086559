//! Square bit matrices stored as per-vertex rows of 64-bit words.

/// An `n × n` bit matrix; row `v` is the neighbourhood bitset of `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        BitMatrix {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    /// The complete graph pattern: every off-diagonal bit set.
    pub fn complete(n: usize) -> Self {
        let mut mat = Self::new(n);
        for v in 0..n {
            let row = mat.row_mut(v);
            for w in 0..n / 64 {
                row[w] = u64::MAX;
            }
            if n % 64 != 0 {
                row[n / 64] = (1u64 << (n % 64)) - 1;
            }
            row[v / 64] &= !(1u64 << (v % 64));
        }
        mat
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> usize {
        self.words
    }

    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.bits[v * self.words..(v + 1) * self.words]
    }

    #[inline]
    pub fn row_mut(&mut self, v: usize) -> &mut [u64] {
        &mut self.bits[v * self.words..(v + 1) * self.words]
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, u: usize, v: usize) {
        self.bits[u * self.words + v / 64] |= 1u64 << (v % 64);
    }

    #[inline]
    pub fn clear(&mut self, u: usize, v: usize) {
        self.bits[u * self.words + v / 64] &= !(1u64 << (v % 64));
    }

    /// Sets both `(u, v)` and `(v, u)`.
    #[inline]
    pub fn set_sym(&mut self, u: usize, v: usize) {
        self.set(u, v);
        self.set(v, u);
    }

    #[inline]
    pub fn clear_sym(&mut self, u: usize, v: usize) {
        self.clear(u, v);
        self.clear(v, u);
    }

    pub fn row_count(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Total number of set bits.
    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Iterates the set columns of row `v` in ascending order.
    pub fn iter_row(&self, v: usize) -> BitIter<'_> {
        BitIter::new(self.row(v))
    }
}

/// `|a ∩ b|` for two rows.
#[inline]
pub fn and_count(a: &[u64], b: &[u64]) -> usize {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x & y).count_ones() as usize)
        .sum()
}

/// Calls `f` on each element of `a ∩ b` in ascending order.
#[inline]
pub fn for_each_and(a: &[u64], b: &[u64], mut f: impl FnMut(usize)) {
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        let mut w = x & y;
        while w != 0 {
            f(i * 64 + w.trailing_zeros() as usize);
            w &= w - 1;
        }
    }
}

/// Collects `a ∩ b` in ascending order.
pub fn and_list(a: &[u64], b: &[u64]) -> Vec<usize> {
    let mut out = Vec::new();
    for_each_and(a, b, |x| out.push(x));
    out
}

/// Ascending iterator over the set bits of a word slice.
pub struct BitIter<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl<'a> BitIter<'a> {
    pub fn new(words: &'a [u64]) -> Self {
        BitIter {
            words,
            idx: 0,
            cur: words.first().copied().unwrap_or(0),
        }
    }
}

impl Iterator for BitIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.cur == 0 {
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
        let bit = self.cur.trailing_zeros() as usize;
        self.cur &= self.cur - 1;
        Some(self.idx * 64 + bit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_has_no_diagonal() {
        for n in [1, 5, 64, 65, 130] {
            let m = BitMatrix::complete(n);
            assert_eq!(m.count(), n * (n - 1));
            for v in 0..n {
                assert!(!m.get(v, v));
            }
        }
    }

    #[test]
    fn iteration_is_ascending() {
        let mut m = BitMatrix::new(200);
        for c in [3, 64, 65, 127, 199] {
            m.set(0, c);
        }
        assert_eq!(m.iter_row(0).collect::<Vec<_>>(), vec![3, 64, 65, 127, 199]);
        assert_eq!(and_list(m.row(0), m.row(0)).len(), 5);
    }
}
