use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const LIMB: usize = 64;

/// A fixed-length binary vector.
///
/// Positions are 1-based in the public API. Internally position `p` lives in
/// bit `(p - 1) % 64` of limb `(p - 1) / 64`. Ordering treats position 1 as
/// the most significant bit, so words of equal length sort as integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    len: usize,
    limbs: Vec<u64>,
}

#[inline]
fn limb_count(len: usize) -> usize {
    len.div_ceil(LIMB)
}

impl Word {
    pub fn zeros(len: usize) -> Self {
        assert!(len >= 1, "word length must be positive");
        Self {
            len,
            limbs: vec![0; limb_count(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut w = Self::zeros(len);
        for l in w.limbs.iter_mut() {
            *l = u64::MAX;
        }
        w.trim();
        w
    }

    /// Unit vector with a single one at `pos`.
    pub fn unit(len: usize, pos: usize) -> Self {
        let mut w = Self::zeros(len);
        w.set(pos, true);
        w
    }

    /// Builds a word from 1-based positions holding a one.
    pub fn from_support(len: usize, positions: &[usize]) -> Result<Self> {
        let mut w = Self::zeros(len);
        for &p in positions {
            if p == 0 || p > len {
                return Err(Error::PositionOutOfRange { pos: p, len });
            }
            w.set(p, true);
        }
        Ok(w)
    }

    /// Integer view with position 1 as the most significant bit.
    pub fn from_int(value: u64, len: usize) -> Self {
        assert!(len <= 64, "integer view limited to 64 bits");
        let mut w = Self::zeros(len);
        for p in 1..=len {
            if (value >> (len - p)) & 1 == 1 {
                w.set(p, true);
            }
        }
        w
    }

    pub fn to_int(&self) -> u64 {
        assert!(self.len <= 64, "integer view limited to 64 bits");
        (1..=self.len).fold(0u64, |acc, p| (acc << 1) | self.get(p) as u64)
    }

    /// Raw mask with position `p` at bit `p - 1`; only for words of at most 64 bits.
    pub fn to_mask(&self) -> u64 {
        assert!(self.len <= 64, "mask view limited to 64 bits");
        self.limbs[0]
    }

    pub fn from_mask(mask: u64, len: usize) -> Self {
        assert!(len <= 64, "mask view limited to 64 bits");
        let mut w = Self::zeros(len);
        w.limbs[0] = mask;
        w.trim();
        w
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false; a word has at least one position.
    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn limbs(&self) -> &[u64] {
        &self.limbs
    }

    #[inline]
    pub fn get(&self, pos: usize) -> bool {
        debug_assert!(pos >= 1 && pos <= self.len);
        let i = pos - 1;
        (self.limbs[i / LIMB] >> (i % LIMB)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, pos: usize, value: bool) {
        assert!(
            pos >= 1 && pos <= self.len,
            "position {pos} out of range 1..={}",
            self.len
        );
        let i = pos - 1;
        let bit = 1u64 << (i % LIMB);
        if value {
            self.limbs[i / LIMB] |= bit;
        } else {
            self.limbs[i / LIMB] &= !bit;
        }
    }

    #[inline]
    pub fn flip(&mut self, pos: usize) {
        let v = self.get(pos);
        self.set(pos, !v);
    }

    pub fn weight(&self) -> usize {
        self.limbs.iter().map(|l| l.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    /// 1-based positions holding a one, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.weight());
        for (li, &limb) in self.limbs.iter().enumerate() {
            let mut l = limb;
            while l != 0 {
                let b = l.trailing_zeros() as usize;
                out.push(li * LIMB + b + 1);
                l &= l - 1;
            }
        }
        out
    }

    pub fn xor_assign(&mut self, other: &Word) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.limbs.iter_mut().zip(&other.limbs) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &Word) -> Word {
        let mut w = self.clone();
        w.xor_assign(other);
        w
    }

    pub fn and(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for (a, b) in w.limbs.iter_mut().zip(&other.limbs) {
            *a &= b;
        }
        w
    }

    pub fn or(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for (a, b) in w.limbs.iter_mut().zip(&other.limbs) {
            *a |= b;
        }
        w
    }

    pub fn and_not(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for (a, b) in w.limbs.iter_mut().zip(&other.limbs) {
            *a &= !b;
        }
        w
    }

    pub fn complement(&self) -> Word {
        let mut w = self.clone();
        for l in w.limbs.iter_mut() {
            *l = !*l;
        }
        w.trim();
        w
    }

    pub fn is_disjoint(&self, other: &Word) -> bool {
        self.limbs.iter().zip(&other.limbs).all(|(a, b)| a & b == 0)
    }

    pub fn is_subset_of(&self, other: &Word) -> bool {
        self.limbs
            .iter()
            .zip(&other.limbs)
            .all(|(a, b)| a & !b == 0)
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &Word) -> bool {
        self.limbs
            .iter()
            .zip(&other.limbs)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    /// Restriction to the positions of `mask`, packed in ascending position order.
    pub fn restrict(&self, mask: &Word) -> Option<Word> {
        let positions = mask.support();
        if positions.is_empty() {
            return None;
        }
        let mut w = Word::zeros(positions.len());
        for (i, &p) in positions.iter().enumerate() {
            if self.get(p) {
                w.set(i + 1, true);
            }
        }
        Some(w)
    }

    /// Word of length `len + 1` with `bit` appended at the new last position.
    pub fn append(&self, bit: bool) -> Word {
        let mut w = Word::zeros(self.len + 1);
        w.limbs[..self.limbs.len()].copy_from_slice(&self.limbs);
        w.set(self.len + 1, bit);
        w
    }

    /// Word of length `len - 1` with position `pos` removed.
    pub fn delete(&self, pos: usize) -> Word {
        assert!(self.len >= 2 && pos >= 1 && pos <= self.len);
        let mut w = Word::zeros(self.len - 1);
        let mut q = 1;
        for p in 1..=self.len {
            if p == pos {
                continue;
            }
            if self.get(p) {
                w.set(q, true);
            }
            q += 1;
        }
        w
    }

    pub fn distance(&self, other: &Word) -> usize {
        self.limbs
            .iter()
            .zip(&other.limbs)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    fn trim(&mut self) {
        let extra = self.limbs.len() * LIMB - self.len;
        if extra > 0 {
            let last = self.limbs.len() - 1;
            self.limbs[last] &= u64::MAX >> extra;
        }
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.len.cmp(&other.len) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.limbs.iter().zip(&other.limbs) {
            let d = a ^ b;
            if d != 0 {
                // lowest differing bit is the earliest position, hence most significant
                let bit = d & d.wrapping_neg();
                return if a & bit != 0 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                };
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in 1..=self.len {
            f.write_str(if self.get(p) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse {
                line: 0,
                msg: "empty word".into(),
            });
        }
        let mut w = Word::zeros(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => w.set(i + 1, true),
                other => {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!("unexpected character {other:?} in word"),
                    })
                }
            }
        }
        Ok(w)
    }
}

/// Hamming distance between two words of equal length.
pub fn hamming_distance(a: &Word, b: &Word) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(a.distance(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(hamming_distance(&w("000"), &w("000")).unwrap(), 0);
        assert_eq!(hamming_distance(&w("000"), &w("111")).unwrap(), 3);
        assert_eq!(hamming_distance(&w("10110"), &w("01101")).unwrap(), 4);
        assert!(matches!(
            hamming_distance(&w("00"), &w("000")),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn ordering_matches_integers() {
        let mut words: Vec<Word> = (0..32u64).rev().map(|v| Word::from_int(v, 5)).collect();
        words.sort();
        let ints: Vec<u64> = words.iter().map(Word::to_int).collect();
        assert_eq!(ints, (0..32).collect::<Vec<_>>());
    }

    #[test]
    fn ordering_across_limbs() {
        let mut a = Word::zeros(70);
        let mut b = Word::zeros(70);
        a.set(70, true);
        b.set(2, true);
        assert!(a < b);
        a.set(1, true);
        assert!(a > b);
    }

    #[test]
    fn display_round_trip() {
        let s = "0110100111";
        assert_eq!(w(s).to_string(), s);
        assert_eq!(w(s).support(), vec![2, 3, 5, 8, 9, 10]);
    }

    #[test]
    fn ones_is_trimmed() {
        let o = Word::ones(65);
        assert_eq!(o.weight(), 65);
        assert_eq!(o.complement().weight(), 0);
    }

    #[test]
    fn restrict_and_delete() {
        let x = w("10110");
        let mask = w("01011");
        assert_eq!(x.restrict(&mask).unwrap(), w("010"));
        assert_eq!(x.delete(1), w("0110"));
        assert_eq!(x.append(true), w("101101"));
    }
}
