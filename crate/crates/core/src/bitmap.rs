//! Dense bit-vector over `[0, len)` with the word-parallel shift-OR kernel
//! used for iterated sumsets.

use rayon::prelude::*;

const WORD: usize = 64;
/// Output words handled per parallel task. 4096 words = 32 KiB.
const CHUNK_WORDS: usize = 4096;

#[derive(Clone, PartialEq, Eq)]
pub struct Bitmap {
    len: usize,
    words: Vec<u64>,
}

impl std::fmt::Debug for Bitmap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Bitmap")
            .field("len", &self.len)
            .field("ones", &self.count_ones())
            .finish()
    }
}

impl Bitmap {
    pub fn new(len: usize) -> Self {
        Bitmap {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut b = Bitmap::new(len);
        for i in indices {
            if i < len {
                b.set(i);
            }
        }
        b
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        i < self.len && self.words[i / WORD] & (1 << (i % WORD)) != 0
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + tz)
            })
        })
    }

    pub fn iter_zeros(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| !self.get(i))
    }

    /// Every bit set in `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &Bitmap) -> bool {
        self.len == other.len
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    fn clear_tail(&mut self) {
        let extra = self.words.len() * WORD - self.len;
        if extra > 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= u64::MAX >> extra;
            }
        }
    }

    /// Largest index whose bit is clear.
    pub fn last_zero(&self) -> Option<usize> {
        let extra = self.words.len() * WORD - self.len;
        for (wi, &w) in self.words.iter().enumerate().rev() {
            let mut inv = !w;
            if wi + 1 == self.words.len() && extra > 0 {
                inv &= u64::MAX >> extra;
            }
            if inv != 0 {
                return Some(wi * WORD + (WORD - 1 - inv.leading_zeros() as usize));
            }
        }
        None
    }

    /// `⋃_{s ∈ shifts} (self << s)`, truncated to the same length.
    pub fn shift_or(&self, shifts: &[usize]) -> Bitmap {
        let mut out = Bitmap::new(self.len);
        let src = &self.words;
        let n_words = src.len();
        out.words
            .par_chunks_mut(CHUNK_WORDS)
            .enumerate()
            .for_each(|(ci, chunk)| {
                let w0 = ci * CHUNK_WORDS;
                for &s in shifts {
                    let ws = s / WORD;
                    let bs = (s % WORD) as u32;
                    if ws >= n_words {
                        continue;
                    }
                    let start = w0.max(ws);
                    let end = w0 + chunk.len();
                    if start >= end {
                        continue;
                    }
                    if bs == 0 {
                        for w in start..end {
                            chunk[w - w0] |= src[w - ws];
                        }
                    } else {
                        let back = WORD as u32 - bs;
                        for w in start..end {
                            let hi = src[w - ws] << bs;
                            let lo = if w > ws { src[w - ws - 1] >> back } else { 0 };
                            chunk[w - w0] |= hi | lo;
                        }
                    }
                }
            });
        out.clear_tail();
        out
    }

    /// Raw little-endian bitmap: bit `i` lives in byte `i / 8` at position `i % 8`.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        let mut bytes: Vec<u8> = self.words.iter().flat_map(|w| w.to_le_bytes()).collect();
        bytes.truncate(self.len.div_ceil(8));
        bytes
    }

    pub fn from_le_bytes(len: usize, bytes: &[u8]) -> Bitmap {
        let mut b = Bitmap::new(len);
        for (wi, chunk) in bytes.chunks(8).enumerate().take(b.words.len()) {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            b.words[wi] = u64::from_le_bytes(buf);
        }
        b.clear_tail();
        b
    }

    /// Prefix popcounts per word, for O(1) rank queries.
    pub(crate) fn word_ranks(&self) -> Vec<u64> {
        let mut acc = 0u64;
        let mut ranks = Vec::with_capacity(self.words.len() + 1);
        ranks.push(0);
        for w in &self.words {
            acc += w.count_ones() as u64;
            ranks.push(acc);
        }
        ranks
    }

    /// Number of set bits strictly below `i`, given `word_ranks()`.
    pub(crate) fn rank(&self, ranks: &[u64], i: usize) -> u64 {
        let i = i.min(self.len);
        let (w, b) = (i / WORD, i % WORD);
        let partial = if b == 0 {
            0
        } else {
            (self.words[w] & ((1u64 << b) - 1)).count_ones() as u64
        };
        ranks[w] + partial
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_or_matches_naive() {
        let len = 300;
        let base = Bitmap::from_indices(len, [0, 1, 5, 63, 64, 65, 130, 299]);
        let shifts = [0usize, 1, 3, 64, 70, 128, 250, 400];
        let out = base.shift_or(&shifts);
        for i in 0..len {
            let expected = shifts.iter().any(|&s| i >= s && base.get(i - s));
            assert_eq!(out.get(i), expected, "bit {i}");
        }
    }

    #[test]
    fn le_bytes_layout() {
        let b = Bitmap::from_indices(20, [0, 9, 19]);
        let bytes = b.to_le_bytes();
        assert_eq!(bytes, vec![0b0000_0001, 0b0000_0010, 0b0000_1000]);
        assert_eq!(Bitmap::from_le_bytes(20, &bytes), b);
    }

    #[test]
    fn rank_counts_below() {
        let b = Bitmap::from_indices(200, [0, 3, 64, 127, 128, 199]);
        let r = b.word_ranks();
        assert_eq!(b.rank(&r, 0), 0);
        assert_eq!(b.rank(&r, 4), 2);
        assert_eq!(b.rank(&r, 128), 4);
        assert_eq!(b.rank(&r, 200), 6);
    }

    #[test]
    fn ones_and_zeros() {
        let b = Bitmap::from_indices(10, [2, 3, 9]);
        assert_eq!(b.iter_ones().collect::<Vec<_>>(), vec![2, 3, 9]);
        assert_eq!(b.iter_zeros().count(), 7);
        assert!(b.is_subset_of(&Bitmap::from_indices(10, [2, 3, 4, 9])));
        assert!(!b.is_subset_of(&Bitmap::from_indices(10, [2, 3])));
    }
}
