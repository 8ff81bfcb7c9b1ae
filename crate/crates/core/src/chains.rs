//! The chains `Q1 = PΠ` and `Q2`, deterministic replay of driving
//! sequences, and symbolic (affine) evolution of the state.
//!
//! Coordinates are 0-based throughout the library: index 0 is `x_1`.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitVector, Gf2Matrix};
use crate::rng::{self, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainKind {
    /// Lazy update at a uniform coordinate, then the shift register.
    Q1,
    /// Lazy update at the middle coordinate `m` of `n = 2m`, then the shift register.
    Q2,
}

impl fmt::Display for ChainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChainKind::Q1 => "q1",
            ChainKind::Q2 => "q2",
        })
    }
}

impl FromStr for ChainKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "q1" => Ok(ChainKind::Q1),
            "q2" => Ok(ChainKind::Q2),
            other => Err(Error::Parse(format!(
                "unknown chain {other:?}, expected q1 or q2"
            ))),
        }
    }
}

/// A chain on `{0,1}^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Chain {
    kind: ChainKind,
    n: usize,
}

impl Chain {
    pub fn new(kind: ChainKind, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension {
                n,
                reason: "dimension must be at least 1",
            });
        }
        if kind == ChainKind::Q2 && n % 2 == 1 {
            return Err(Error::OddDimension(n));
        }
        Ok(Self { kind, n })
    }

    pub fn q1(n: usize) -> Result<Self> {
        Self::new(ChainKind::Q1, n)
    }

    pub fn q2(n: usize) -> Result<Self> {
        Self::new(ChainKind::Q2, n)
    }

    pub fn kind(&self) -> ChainKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The fixed update coordinate of `Q2` (index `m - 1`), `None` for `Q1`.
    pub fn middle(&self) -> Option<usize> {
        match self.kind {
            ChainKind::Q1 => None,
            ChainKind::Q2 => Some(self.n / 2 - 1),
        }
    }

    fn check_coord(&self, coord: usize) -> Result<()> {
        if coord >= self.n {
            return Err(Error::CoordinateOutOfRange {
                index: coord,
                n: self.n,
            });
        }
        if let Some(m) = self.middle() {
            if coord != m {
                return Err(Error::InvalidParameter(format!(
                    "Q2 updates only coordinate index {m}, got {coord}"
                )));
            }
        }
        Ok(())
    }

    fn check_state(&self, x: &BitVector) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// One step in place, without validation.
    #[inline]
    pub(crate) fn advance(x: &mut BitVector, coord: usize, bit: bool) {
        if bit {
            x.flip(coord);
        }
        x.shift_register_in_place();
    }

    /// Draws one `(coordinate, bit)` pair. `Q1` draws the coordinate first.
    #[inline]
    pub(crate) fn draw<R: Rng>(&self, rng: &mut R) -> (usize, bool) {
        match self.middle() {
            None => {
                let u = rng.random_range(0..self.n);
                (u, rng.random::<bool>())
            }
            Some(m) => (m, rng.random::<bool>()),
        }
    }

    /// Runs `t` random steps from `x` in place, calling `visit(s, state)` after
    /// each step `s = 1..=t`.
    pub(crate) fn run_random<F>(
        &self,
        x: &mut BitVector,
        t: usize,
        rng: &mut StreamRng,
        mut visit: F,
    ) where
        F: FnMut(usize, &BitVector),
    {
        for s in 1..=t {
            let (u, r) = self.draw(rng);
            Self::advance(x, u, r);
            visit(s, x);
        }
    }
}

/// One `Q1` step: add `bit` at coordinate `coord`, then apply the shift register.
pub fn step_q1(x: &BitVector, coord: usize, bit: bool) -> Result<BitVector> {
    let chain = Chain::q1(x.len())?;
    chain.check_coord(coord)?;
    let mut y = x.clone();
    Chain::advance(&mut y, coord, bit);
    Ok(y)
}

/// One `Q2` step: add `bit` at the middle coordinate, then apply the shift register.
pub fn step_q2(x: &BitVector, bit: bool) -> Result<BitVector> {
    let chain = Chain::q2(x.len())?;
    let mut y = x.clone();
    Chain::advance(&mut y, chain.middle().unwrap(), bit);
    Ok(y)
}

/// Update coordinates `U_1..U_t` (0-based) paired with update bits `R_1..R_t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrivingSequence {
    coords: Vec<usize>,
    bits: Vec<bool>,
}

impl DrivingSequence {
    pub fn new(coords: Vec<usize>, bits: Vec<bool>) -> Result<Self> {
        if coords.len() != bits.len() {
            return Err(Error::DimensionMismatch {
                expected: coords.len(),
                found: bits.len(),
            });
        }
        Ok(Self { coords, bits })
    }

    pub fn empty() -> Self {
        Self {
            coords: Vec::new(),
            bits: Vec::new(),
        }
    }

    /// A `Q2` driving sequence: every coordinate is the middle one.
    pub fn for_q2(n: usize, bits: Vec<bool>) -> Result<Self> {
        let m = Chain::q2(n)?.middle().unwrap();
        Ok(Self {
            coords: vec![m; bits.len()],
            bits,
        })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn validate_for(&self, chain: &Chain) -> Result<()> {
        self.coords.iter().try_for_each(|&u| chain.check_coord(u))
    }

    fn check_step(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return Err(Error::StepOutOfRange {
                index: i,
                len: self.len(),
            });
        }
        Ok(())
    }

    /// A copy with the update bit of step `i` (0-based) flipped.
    pub fn with_bit_flipped(&self, i: usize) -> Result<Self> {
        self.check_step(i)?;
        let mut out = self.clone();
        out.bits[i] = !out.bits[i];
        Ok(out)
    }

    /// A copy with the coordinate of step `i` (0-based) replaced.
    pub fn with_coord(&self, i: usize, coord: usize) -> Result<Self> {
        self.check_step(i)?;
        let mut out = self.clone();
        out.coords[i] = coord;
        Ok(out)
    }

    /// Draws a random sequence of `t` steps for `chain`.
    pub fn random<R: Rng>(chain: &Chain, t: usize, rng: &mut R) -> Self {
        let (coords, bits) = (0..t).map(|_| chain.draw(rng)).unzip();
        Self { coords, bits }
    }
}

/// Replays `driving` from `x0`, returning the configuration sequence `x_0..x_t`.
pub fn simulate(
    chain: &Chain,
    x0: &BitVector,
    driving: &DrivingSequence,
) -> Result<Vec<BitVector>> {
    chain.check_state(x0)?;
    driving.validate_for(chain)?;
    let mut states = Vec::with_capacity(driving.len() + 1);
    let mut x = x0.clone();
    states.push(x.clone());
    for (&u, &r) in driving.coords.iter().zip(&driving.bits) {
        Chain::advance(&mut x, u, r);
        states.push(x.clone());
    }
    Ok(states)
}

/// Final state of a replay, without keeping the intermediate states.
pub fn replay_final(chain: &Chain, x0: &BitVector, driving: &DrivingSequence) -> Result<BitVector> {
    chain.check_state(x0)?;
    driving.validate_for(chain)?;
    let mut x = x0.clone();
    for (&u, &r) in driving.coords.iter().zip(&driving.bits) {
        Chain::advance(&mut x, u, r);
    }
    Ok(x)
}

/// A realized trajectory together with the driving sequence that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    pub driving: DrivingSequence,
    pub states: Vec<BitVector>,
}

impl Trajectory {
    pub fn weights(&self) -> Vec<usize> {
        self.states.iter().map(BitVector::hamming_weight).collect()
    }

    /// CSV with header `t,state,weight`; states are written `x_1..x_n` left to right.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,state,weight")?;
        for (t, x) in self.states.iter().enumerate() {
            writeln!(w, "{t},{x},{}", x.hamming_weight())?;
        }
        Ok(())
    }
}

/// Draws a driving sequence from stream `(seed, 0)` and replays it.
pub fn simulate_random(chain: &Chain, x0: &BitVector, t: usize, seed: u64) -> Result<Trajectory> {
    let mut rng = rng::stream(seed, 0);
    let driving = DrivingSequence::random(chain, t, &mut rng);
    let states = simulate(chain, x0, &driving)?;
    Ok(Trajectory { driving, states })
}

/// `X_t = map · (R_1..R_t) ⊕ offset` for a fixed coordinate sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineState {
    pub map: Gf2Matrix,
    pub offset: BitVector,
}

impl AffineState {
    pub fn evaluate(&self, bits: &[bool]) -> Result<BitVector> {
        if bits.len() != self.map.n_cols() {
            return Err(Error::DimensionMismatch {
                expected: self.map.n_cols(),
                found: bits.len(),
            });
        }
        let mut x = self.offset.clone();
        for (j, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
            x ^= &self.map.column(j);
        }
        Ok(x)
    }
}

/// Symbolic evolution along the coordinate sequence `coords`.
///
/// Column `j` of the map is `A^{t-j} e_{u_j}` (0-based `j`) and the offset is
/// `A^t x0`, where `A` is the shift-register companion matrix.
pub fn evolve_symbolic(chain: &Chain, x0: &BitVector, coords: &[usize]) -> Result<AffineState> {
    chain.check_state(x0)?;
    coords.iter().try_for_each(|&u| chain.check_coord(u))?;
    let n = chain.n();
    let mut offset = x0.clone();
    let mut columns: Vec<BitVector> = Vec::with_capacity(coords.len());
    for &u in coords {
        columns.push(BitVector::unit(n, u)?);
        for c in &mut columns {
            c.shift_register_in_place();
        }
        offset.shift_register_in_place();
    }
    Ok(AffineState {
        map: Gf2Matrix::from_columns(n, &columns)?,
        offset,
    })
}

/// [`evolve_symbolic`] for `Q2`, whose coordinates are all the middle one.
pub fn evolve_symbolic_q2(chain: &Chain, x0: &BitVector, t: usize) -> Result<AffineState> {
    let m = chain.middle().ok_or_else(|| {
        Error::InvalidParameter("evolve_symbolic_q2 needs a Q2 chain".to_string())
    })?;
    evolve_symbolic(chain, x0, &vec![m; t])
}
