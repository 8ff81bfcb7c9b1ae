//! Linear algebra over GF(2).
//!
//! Vectors and matrices are bit-packed into `u64` words. Index 0 of a
//! [`BitVector`] is the first coordinate `x_1`; in word terms bit `i` lives at
//! position `i % 64` of word `i / 64`, so the integer encoding of a short
//! vector has `x_1` in the least significant bit.

use std::fmt;
use std::ops::{BitXor, BitXorAssign};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

fn word_count(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// A point of `{0,1}^n`, stored bit-packed.
///
/// Bits past `len` in the last word are kept at zero so that word-level
/// popcounts and comparisons are exact.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; word_count(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            len,
            words: vec![u64::MAX; word_count(len)],
        };
        v.clear_tail();
        v
    }

    /// The standard basis vector with a single one at `index`.
    pub fn unit(len: usize, index: usize) -> Result<Self> {
        if index >= len {
            return Err(Error::CoordinateOutOfRange { index, n: len });
        }
        let mut v = Self::zeros(len);
        v.set(index, true);
        Ok(v)
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector of length `len <= 64` from the integer encoding
    /// (bit `i` of `value` is coordinate `i`). Bits at or above `len` are dropped.
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= WORD_BITS, "from_u64 supports len <= 64");
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = value;
            v.clear_tail();
        }
        v
    }

    /// Integer encoding, available when `len <= 64`.
    pub fn to_u64(&self) -> Option<u64> {
        match self.len {
            0 => Some(0),
            l if l <= WORD_BITS => Some(self.words[0]),
            _ => None,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        assert!(
            index < self.len,
            "bit index {index} out of range {}",
            self.len
        );
        (self.words[index / WORD_BITS] >> (index % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, index: usize, value: bool) {
        assert!(
            index < self.len,
            "bit index {index} out of range {}",
            self.len
        );
        let mask = 1u64 << (index % WORD_BITS);
        if value {
            self.words[index / WORD_BITS] |= mask;
        } else {
            self.words[index / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, index: usize) {
        assert!(
            index < self.len,
            "bit index {index} out of range {}",
            self.len
        );
        self.words[index / WORD_BITS] ^= 1u64 << (index % WORD_BITS);
    }

    #[inline]
    pub fn hamming_weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// XOR of all bits.
    #[inline]
    pub fn parity(&self) -> bool {
        self.words.iter().fold(0u32, |acc, w| acc ^ w.count_ones()) & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len, "dot of vectors with different lengths");
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn hamming_distance(&self, other: &Self) -> usize {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Indices of the set bits in increasing order.
    pub fn ones_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD_BITS + tz)
            })
        })
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// The shift register in place: drop `x_1`, shift left, append the parity.
    #[inline]
    pub fn shift_register_in_place(&mut self) {
        if self.len == 0 {
            return;
        }
        let parity = self.parity();
        let last = self.words.len() - 1;
        for i in 0..last {
            self.words[i] = (self.words[i] >> 1) | (self.words[i + 1] << (WORD_BITS - 1));
        }
        self.words[last] >>= 1;
        if parity {
            self.set(self.len - 1, true);
        }
    }

    /// Packed hex, most significant nibble first, where the integer value has
    /// `x_1` as its least significant bit.
    pub fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4).max(1);
        let mut out = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let mut nibble = 0u8;
            for b in 0..4 {
                let i = d * 4 + b;
                if i < self.len && self.get(i) {
                    nibble |= 1 << b;
                }
            }
            out.push(char::from_digit(u32::from(nibble), 16).unwrap());
        }
        out
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for BitVector {
    /// Renders `x_1 x_2 ... x_n` left to right as `0`/`1` characters.
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
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bits(&bits))
    }
}

impl Serialize for BitVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl BitXorAssign<&BitVector> for BitVector {
    fn bitxor_assign(&mut self, rhs: &BitVector) {
        assert_eq!(self.len, rhs.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&rhs.words) {
            *a ^= b;
        }
    }
}

impl BitXor<&BitVector> for &BitVector {
    type Output = BitVector;

    fn bitxor(self, rhs: &BitVector) -> BitVector {
        let mut out = self.clone();
        out ^= rhs;
        out
    }
}

/// `f(x) = (x_2, ..., x_n, x_1 ⊕ ... ⊕ x_n)`.
pub fn shift_register(x: &BitVector) -> BitVector {
    let mut y = x.clone();
    y.shift_register_in_place();
    y
}

/// Dense matrix over GF(2), stored as bit-packed rows.
#[derive(Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<BitVector>,
}

impl Gf2Matrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            rows: vec![BitVector::zeros(n_cols); n_rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i].set(i, true);
        }
        m
    }

    pub fn from_rows(rows: Vec<BitVector>) -> Result<Self> {
        let n_cols = rows.first().map_or(0, BitVector::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != n_cols) {
            return Err(Error::DimensionMismatch {
                expected: n_cols,
                found: bad.len(),
            });
        }
        Ok(Self {
            n_rows: rows.len(),
            n_cols,
            rows,
        })
    }

    /// Builds an `n_rows x columns.len()` matrix column by column.
    pub fn from_columns(n_rows: usize, columns: &[BitVector]) -> Result<Self> {
        let mut m = Self::zeros(n_rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != n_rows {
                return Err(Error::DimensionMismatch {
                    expected: n_rows,
                    found: col.len(),
                });
            }
            for i in col.ones_indices() {
                m.rows[i].set(j, true);
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row].get(col)
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.rows[row].set(col, value);
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn column(&self, j: usize) -> BitVector {
        let mut c = BitVector::zeros(self.n_rows);
        for (i, row) in self.rows.iter().enumerate() {
            if row.get(j) {
                c.set(i, true);
            }
        }
        c
    }

    pub fn mul_vec(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.n_cols {
            return Err(Error::DimensionMismatch {
                expected: self.n_cols,
                found: v.len(),
            });
        }
        let mut out = BitVector::zeros(self.n_rows);
        for (i, row) in self.rows.iter().enumerate() {
            if row.dot(v) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// Matrix product by row combination: row `i` of the result is the XOR
    /// of the rows of `rhs` selected by the ones of row `i` of `self`.
    /// Cost scales with the number of ones in `self`, so sparse left factors
    /// such as powers of the companion matrix multiply quickly.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.n_cols != rhs.n_rows {
            return Err(Error::DimensionMismatch {
                expected: self.n_cols,
                found: rhs.n_rows,
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc = BitVector::zeros(rhs.n_cols);
                for k in row.ones_indices() {
                    acc ^= &rhs.rows[k];
                }
                acc
            })
            .collect();
        Ok(Self {
            n_rows: self.n_rows,
            n_cols: rhs.n_cols,
            rows,
        })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.n_rows != rhs.n_rows || self.n_cols != rhs.n_cols {
            return Err(Error::DimensionMismatch {
                expected: self.n_rows * self.n_cols,
                found: rhs.n_rows * rhs.n_cols,
            });
        }
        let rows = self
            .rows
            .iter()
            .zip(&rhs.rows)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(Self {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            rows,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && self
                .rows
                .iter()
                .enumerate()
                .all(|(i, r)| r.hamming_weight() == 1 && r.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.rows.iter().map(BitVector::hamming_weight).sum()
    }
}

impl fmt::Display for Gf2Matrix {
    /// Dense 0/1 grid, one row per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{row}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix {}x{}", self.n_rows, self.n_cols)?;
        write!(f, "{self}")
    }
}

impl FromStr for Gf2Matrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rows = s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<BitVector>>>()?;
        Self::from_rows(rows)
    }
}

/// The companion matrix of the shift register: ones on the superdiagonal of
/// rows `0..n-1` and an all-ones last row.
pub fn companion_matrix(n: usize) -> Result<Gf2Matrix> {
    if n < 2 {
        return Err(Error::InvalidDimension {
            n,
            reason: "companion matrix needs n >= 2",
        });
    }
    let mut m = Gf2Matrix::zeros(n, n);
    for i in 0..n - 1 {
        m.set(i, i + 1, true);
    }
    m.rows[n - 1] = BitVector::ones(n);
    Ok(m)
}

/// `m^k` by square-and-multiply.
pub fn mat_pow(m: &Gf2Matrix, mut k: u64) -> Result<Gf2Matrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.n_rows,
            cols: m.n_cols,
        });
    }
    let mut result = Gf2Matrix::identity(m.n_rows);
    let mut base = m.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = result.mul(&base)?;
        }
        k >>= 1;
        if k > 0 {
            base = base.mul(&base)?;
        }
    }
    Ok(result)
}

/// Gauss-Jordan elimination to the identity. Returns `false` on a missing
/// pivot. When `rhs` is given it receives the same row operations.
fn reduce(rows: &mut [BitVector], mut rhs: Option<&mut BitVector>) -> bool {
    let n = rows.len();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| rows[r].get(col)) else {
            return false;
        };
        rows.swap(col, pivot);
        if let Some(b) = rhs.as_deref_mut() {
            let (bc, bp) = (b.get(col), b.get(pivot));
            b.set(col, bp);
            b.set(pivot, bc);
        }
        let pivot_row = rows[col].clone();
        let pivot_bit = rhs.as_deref().is_some_and(|b| b.get(col));
        for (r, row) in rows.iter_mut().enumerate() {
            if r != col && row.get(col) {
                *row ^= &pivot_row;
                if pivot_bit {
                    if let Some(b) = rhs.as_deref_mut() {
                        b.flip(r);
                    }
                }
            }
        }
    }
    true
}

/// The unique `v` with `m · v = b`.
pub fn solve_linear(m: &Gf2Matrix, b: &BitVector) -> Result<BitVector> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.n_rows,
            cols: m.n_cols,
        });
    }
    if b.len() != m.n_rows {
        return Err(Error::DimensionMismatch {
            expected: m.n_rows,
            found: b.len(),
        });
    }
    let mut rows = m.rows.clone();
    let mut rhs = b.clone();
    if reduce(&mut rows, Some(&mut rhs)) {
        Ok(rhs)
    } else {
        Err(Error::SingularMatrix)
    }
}

/// Determinant over GF(2): 1 iff `m` is invertible.
pub fn det_gf2(m: &Gf2Matrix) -> Result<u8> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.n_rows,
            cols: m.n_cols,
        });
    }
    let mut rows = m.rows.clone();
    Ok(u8::from(reduce(&mut rows, None)))
}

/// Smallest `k >= 1` with `m^k = I`, searching up to `limit`.
pub fn multiplicative_order(m: &Gf2Matrix, limit: u64) -> Result<Option<u64>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.n_rows,
            cols: m.n_cols,
        });
    }
    let mut p = m.clone();
    for k in 1..=limit {
        if p.is_identity() {
            return Ok(Some(k));
        }
        p = p.mul(m)?;
    }
    Ok(None)
}
