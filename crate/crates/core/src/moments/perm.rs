use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Conjugacy classes of S₄, labelled by cycle type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CycleClass {
    /// `[1⁴]`, the identity.
    Identity,
    /// `[1²,2]`, transpositions.
    Transposition,
    /// `[2²]`, double transpositions.
    DoubleTransposition,
    /// `[1,3]`, three-cycles.
    ThreeCycle,
    /// `[4]`, four-cycles.
    FourCycle,
}

impl CycleClass {
    pub const ALL: [CycleClass; 5] = [
        CycleClass::Identity,
        CycleClass::Transposition,
        CycleClass::DoubleTransposition,
        CycleClass::ThreeCycle,
        CycleClass::FourCycle,
    ];

    pub fn size(self) -> usize {
        match self {
            CycleClass::Identity => 1,
            CycleClass::Transposition => 6,
            CycleClass::DoubleTransposition => 3,
            CycleClass::ThreeCycle => 8,
            CycleClass::FourCycle => 6,
        }
    }

    /// Number of cycles, fixed points included.
    pub fn cycles(self) -> usize {
        match self {
            CycleClass::Identity => 4,
            CycleClass::Transposition => 3,
            CycleClass::DoubleTransposition | CycleClass::ThreeCycle => 2,
            CycleClass::FourCycle => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CycleClass::Identity => "[1^4]",
            CycleClass::Transposition => "[1^2,2]",
            CycleClass::DoubleTransposition => "[2^2]",
            CycleClass::ThreeCycle => "[1,3]",
            CycleClass::FourCycle => "[4]",
        }
    }
}

impl fmt::Display for CycleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A permutation of four symbols, stored 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm4 {
    images: [u8; 4],
}

impl Perm4 {
    pub const IDENTITY: Perm4 = Perm4 { images: [0, 1, 2, 3] };

    /// From one-line notation `(σ(1) σ(2) σ(3) σ(4))`, 1-based.
    pub fn from_one_line(images: [u8; 4]) -> Result<Self> {
        let mut seen = [false; 4];
        let mut zero_based = [0u8; 4];
        for (k, &v) in images.iter().enumerate() {
            if !(1..=4).contains(&v) || seen[(v - 1) as usize] {
                return Err(Error::param("perm", format!("{images:?} is not a permutation of 1..4")));
            }
            seen[(v - 1) as usize] = true;
            zero_based[k] = v - 1;
        }
        Ok(Perm4 { images: zero_based })
    }

    /// All 24 elements in lexicographic one-line order.
    pub fn all() -> Vec<Perm4> {
        let mut out = Vec::with_capacity(24);
        for a in 0..4u8 {
            for b in 0..4u8 {
                for c in 0..4u8 {
                    if a != b && a != c && b != c {
                        out.push(Perm4 { images: [a, b, c, 6 - a - b - c] });
                    }
                }
            }
        }
        out
    }

    /// `σ(k)` for 0-based `k`.
    pub fn apply(self, k: usize) -> usize {
        self.images[k] as usize
    }

    pub fn one_line(self) -> [u8; 4] {
        self.images.map(|v| v + 1)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(self, other: Perm4) -> Perm4 {
        Perm4 {
            images: [0, 1, 2, 3].map(|k| self.images[other.images[k] as usize]),
        }
    }

    pub fn inverse(self) -> Perm4 {
        let mut inv = [0u8; 4];
        for (k, &v) in self.images.iter().enumerate() {
            inv[v as usize] = k as u8;
        }
        Perm4 { images: inv }
    }

    pub fn cycle_lengths(self) -> Vec<usize> {
        let mut seen = [false; 4];
        let mut lengths = Vec::new();
        for start in 0..4 {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                k = self.images[k] as usize;
                len += 1;
            }
            lengths.push(len);
        }
        lengths.sort_unstable();
        lengths
    }

    pub fn cycle_class(self) -> CycleClass {
        match self.cycle_lengths().as_slice() {
            [1, 1, 1, 1] => CycleClass::Identity,
            [1, 1, 2] => CycleClass::Transposition,
            [2, 2] => CycleClass::DoubleTransposition,
            [1, 3] => CycleClass::ThreeCycle,
            [4] => CycleClass::FourCycle,
            other => unreachable!("cycle type {other:?} of a 4-permutation"),
        }
    }
}

impl fmt::Display for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.one_line();
        write!(f, "({a} {b} {c} {d})")
    }
}
