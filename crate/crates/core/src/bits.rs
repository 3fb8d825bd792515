//! Fixed-length bitsets.
//!
//! One type serves two carriers: sets of valuations (up to 2^16 bits) and
//! sets of base elements (desk scale). Order is the numeric value of the
//! bit string with index 0 as the least significant bit; it is total and
//! used wherever a canonical, deterministic enumeration of sets is needed.

use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl Bits {
    pub fn empty(len: usize) -> Self {
        Bits { len, words: vec![0; word_count(len)] }
    }

    pub fn full(len: usize) -> Self {
        let mut b = Bits { len, words: vec![!0u64; word_count(len)] };
        b.trim();
        b
    }

    pub fn singleton(len: usize, i: usize) -> Self {
        let mut b = Bits::empty(len);
        b.insert(i);
        b
    }

    /// Low 64 bits interpreted as a set over a universe of `len` elements.
    pub fn from_mask(len: usize, mask: u64) -> Self {
        assert!(len <= 64, "from_mask needs len <= 64");
        let mut b = Bits::empty(len);
        if !b.words.is_empty() {
            b.words[0] = mask;
        }
        b.trim();
        b
    }

    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut b = Bits::empty(len);
        for &i in indices {
            b.insert(i);
        }
        b
    }

    /// Clears bits at and above `len`.
    fn trim(&mut self) {
        let extra = self.len % 64;
        if extra != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << extra) - 1;
            }
        }
        if self.len == 0 {
            self.words.clear();
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn mask64(&self) -> u64 {
        debug_assert!(self.len <= 64);
        self.words.first().copied().unwrap_or(0)
    }

    pub fn union(&self, other: &Bits) -> Bits {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersect(&self, other: &Bits) -> Bits {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Bits) -> Bits {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> Bits {
        let mut b = Bits {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        b.trim();
        b
    }

    fn zip_with(&self, other: &Bits, f: impl Fn(u64, u64) -> u64) -> Bits {
        assert_eq!(self.len, other.len, "bitset length mismatch");
        Bits {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn is_subset(&self, other: &Bits) -> bool {
        assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).all(|(&a, &b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &Bits) -> bool {
        assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).any(|(&a, &b)| a & b != 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    /// All subsets of `self`, smallest numeric mask first. Desk scale only.
    pub fn subsets(&self) -> Vec<Bits> {
        let members: Vec<usize> = self.iter().collect();
        assert!(members.len() <= 24, "subset enumeration capped at 24 members");
        let mut out = Vec::with_capacity(1 << members.len());
        for code in 0u32..(1 << members.len()) {
            let mut s = Bits::empty(self.len);
            for (j, &i) in members.iter().enumerate() {
                if code >> j & 1 == 1 {
                    s.insert(i);
                }
            }
            out.push(s);
        }
        out.sort();
        out
    }

    /// Hex string, most significant nibble first, covering `len` bits.
    pub fn to_hex(&self) -> String {
        let nibbles = self.len.div_ceil(4).max(1);
        let mut s = String::with_capacity(nibbles);
        for ni in (0..nibbles).rev() {
            let bit = ni * 4;
            let word = self.words.get(bit / 64).copied().unwrap_or(0);
            let nib = (word >> (bit % 64)) & 0xf;
            s.push(char::from_digit(nib as u32, 16).unwrap());
        }
        s
    }

    pub fn from_hex(len: usize, hex: &str) -> Option<Bits> {
        let mut b = Bits::empty(len);
        let nibbles = len.div_ceil(4).max(1);
        if hex.len() != nibbles {
            return None;
        }
        for (pos, ch) in hex.chars().enumerate() {
            let ni = nibbles - 1 - pos;
            let nib = ch.to_digit(16)? as u64;
            let bit = ni * 4;
            if bit < b.words.len() * 64 {
                b.words[bit / 64] |= nib << (bit % 64);
            } else if nib != 0 {
                return None;
            }
        }
        let spare = b.clone();
        b.trim();
        if b != spare {
            return None;
        }
        Some(b)
    }
}

impl Ord for Bits {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter().rev().zip(other.words.iter().rev()) {
            match a.cmp(b) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Bits {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits[{}]{{", self.len)?;
        let mut first = true;
        for i in self.iter() {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
            first = false;
        }
        write!(f, "}}")
    }
}
