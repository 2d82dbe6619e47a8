use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::Gf2Error;

/// A fixed-length vector over GF(2).
///
/// Coordinate 0 is the leftmost character of the textual form. Words are
/// packed with coordinate 0 in the most significant bit of the first word, so
/// the derived ordering is lexicographic for vectors of equal length.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

#[inline]
fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

#[inline]
fn mask(i: usize) -> u64 {
    1u64 << (63 - (i % 64))
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; word_count(len)],
            len,
        }
    }

    /// Unit vector with a single one at coordinate `i`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Builds a vector from the low `len` bits of `value`, most significant first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64, "from_u64 supports at most 64 coordinates");
        let mut v = Self::zeros(len);
        for i in 0..len {
            v.set(i, (value >> (len - 1 - i)) & 1 == 1);
        }
        v
    }

    /// Inverse of [`BitVector::from_u64`].
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= 64, "to_u64 supports at most 64 coordinates");
        if self.len == 0 {
            0
        } else {
            self.words[0] >> (64 - self.len)
        }
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = Self::zeros(len);
        for w in v.words.iter_mut() {
            *w = rng.gen();
        }
        v.clear_tail();
        v
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= !0u64 << (64 - rem);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "coordinate {i} out of range for length {}", self.len);
        self.words[i / 64] & mask(i) != 0
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "coordinate {i} out of range for length {}", self.len);
        if bit {
            self.words[i / 64] |= mask(i);
        } else {
            self.words[i / 64] &= !mask(i);
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "coordinate {i} out of range for length {}", self.len);
        self.words[i / 64] ^= mask(i);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the first nonzero coordinate.
    pub fn leading_one(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(k * 64 + w.leading_zeros() as usize);
            }
        }
        None
    }

    fn check_len(&self, other: &Self) -> Result<(), Gf2Error> {
        if self.len != other.len {
            return Err(Gf2Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        Ok(())
    }

    pub fn try_dot(&self, other: &Self) -> Result<bool, Gf2Error> {
        self.check_len(other)?;
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        Ok(ones % 2 == 1)
    }

    /// Inner product over GF(2). Panics on length mismatch.
    pub fn dot(&self, other: &Self) -> bool {
        self.try_dot(other).expect("dot product of vectors with different lengths")
    }

    pub fn try_xor(&self, other: &Self) -> Result<Self, Gf2Error> {
        self.check_len(other)?;
        let mut out = self.clone();
        out.xor_assign(other);
        Ok(out)
    }

    pub fn xor(&self, other: &Self) -> Self {
        self.try_xor(other).expect("xor of vectors with different lengths")
    }

    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn and(&self, other: &Self) -> Self {
        assert_eq!(self.len, other.len, "and of vectors with different lengths");
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bits(&self) -> Vec<bool> {
        self.iter().collect()
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.len + other.len);
        for i in 0..self.len {
            out.set(i, self.get(i));
        }
        for i in 0..other.len {
            out.set(self.len + i, other.get(i));
        }
        out
    }

    pub fn slice(&self, start: usize, end: usize) -> Self {
        assert!(start <= end && end <= self.len, "slice {start}..{end} out of range");
        let mut out = Self::zeros(end - start);
        for i in start..end {
            out.set(i - start, self.get(i));
        }
        out
    }

    /// Coordinates packed most significant first, final byte zero-padded.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.len.div_ceil(8));
        for k in 0..self.len.div_ceil(8) {
            let word = self.words[k / 8];
            out.push((word >> (56 - 8 * (k % 8))) as u8);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self, Gf2Error> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Gf2Error::Parse(format!(
                "expected {} bytes for {len} bits, found {}",
                len.div_ceil(8),
                bytes.len()
            )));
        }
        let mut v = Self::zeros(len);
        for (k, &b) in bytes.iter().enumerate() {
            v.words[k / 8] |= (b as u64) << (56 - 8 * (k % 8));
        }
        let before = v.clone();
        v.clear_tail();
        if v != before {
            return Err(Gf2Error::Parse("nonzero padding bits".into()));
        }
        Ok(v)
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Gf2Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut v = Self::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => {
                    return Err(Gf2Error::Parse(format!(
                        "invalid character {other:?} in bit string"
                    )))
                }
            }
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let v: BitVector = "1011001".parse().unwrap();
        assert_eq!(v.to_string(), "1011001");
        assert_eq!(v.len(), 7);
        assert!(v.get(0) && !v.get(1));
    }

    #[test]
    fn u64_packing_is_msb_first() {
        let v = BitVector::from_u64(0b110, 3);
        assert_eq!(v.to_string(), "110");
        assert_eq!(v.to_u64(), 6);
    }

    #[test]
    fn ordering_is_lexicographic() {
        let a: BitVector = "0111".parse().unwrap();
        let b: BitVector = "1000".parse().unwrap();
        assert!(a < b);
        let long_a = BitVector::unit(70, 69);
        let long_b = BitVector::unit(70, 0);
        assert!(long_a < long_b);
    }

    #[test]
    fn bytes_round_trip() {
        let v: BitVector = "1010101011".parse().unwrap();
        assert_eq!(v.to_bytes(), vec![0b1010_1010, 0b1100_0000]);
        assert_eq!(BitVector::from_bytes(&v.to_bytes(), 10).unwrap(), v);
        assert!(BitVector::from_bytes(&[0xff, 0xff], 10).is_err());
    }

    #[test]
    fn dot_and_leading_one() {
        let a: BitVector = "0110".parse().unwrap();
        let b: BitVector = "0100".parse().unwrap();
        assert!(a.dot(&b));
        assert_eq!(a.leading_one(), Some(1));
        assert_eq!(BitVector::zeros(5).leading_one(), None);
        assert!(a.try_dot(&BitVector::zeros(3)).is_err());
    }
}
