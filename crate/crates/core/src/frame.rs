//! Ternary frames: a carrier with a ternary relation and a distinguished
//! element, the relational companion of a bounded lattice.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{Lattice, DEFAULT_MAX_N};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("carrier must not be empty")]
    EmptyCarrier,
    #[error("carrier size {n} exceeds the cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("index {index} out of range for carrier size {n}")]
    IndexOutOfRange { index: usize, n: usize },
}

/// Carrier `{0..n-1}` with a ternary relation stored as a packed bit-vector
/// indexed by `a*n*n + b*n + c`, and a distinguished zero element.
#[derive(Clone, PartialEq, Eq)]
pub struct TernaryFrame {
    n: usize,
    zero: usize,
    words: Vec<u64>,
}

impl fmt::Debug for TernaryFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "TernaryFrame(n={}, zero={}, |R|={})",
            self.n,
            self.zero,
            self.len()
        )
    }
}

impl TernaryFrame {
    pub fn new(
        n: usize,
        zero: usize,
        triples: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Self, FrameError> {
        Self::new_with_cap(n, zero, triples, DEFAULT_MAX_N)
    }

    pub fn new_with_cap(
        n: usize,
        zero: usize,
        triples: impl IntoIterator<Item = (usize, usize, usize)>,
        cap: usize,
    ) -> Result<Self, FrameError> {
        if n == 0 {
            return Err(FrameError::EmptyCarrier);
        }
        if n > cap {
            return Err(FrameError::TooLarge { n, cap });
        }
        if zero >= n {
            return Err(FrameError::IndexOutOfRange { index: zero, n });
        }
        let mut frame = TernaryFrame {
            n,
            zero,
            words: vec![0; (n * n * n).div_ceil(64)],
        };
        for (a, b, c) in triples {
            for idx in [a, b, c] {
                if idx >= n {
                    return Err(FrameError::IndexOutOfRange { index: idx, n });
                }
            }
            frame.insert(a, b, c);
        }
        Ok(frame)
    }

    /// The relation induced by a bounded lattice: `R a b c` holds when the
    /// three pairwise joins coincide; zero is the lattice bottom.
    pub fn from_lattice(l: &Lattice) -> Self {
        let n = l.n();
        let mut frame = TernaryFrame {
            n,
            zero: l.bottom(),
            words: vec![0; (n * n * n).div_ceil(64)],
        };
        for a in 0..n {
            for b in 0..n {
                let ab = l.join(a, b);
                for c in 0..n {
                    if l.join(a, c) == ab && l.join(b, c) == ab {
                        frame.insert(a, b, c);
                    }
                }
            }
        }
        frame
    }

    fn bit(&self, a: usize, b: usize, c: usize) -> usize {
        (a * self.n + b) * self.n + c
    }

    fn insert(&mut self, a: usize, b: usize, c: usize) {
        let bit = self.bit(a, b, c);
        self.words[bit / 64] |= 1 << (bit % 64);
    }

    pub fn contains(&self, a: usize, b: usize, c: usize) -> bool {
        let bit = self.bit(a, b, c);
        self.words[bit / 64] >> (bit % 64) & 1 == 1
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn triples(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::with_capacity(self.len());
        for a in 0..self.n {
            for b in 0..self.n {
                for c in 0..self.n {
                    if self.contains(a, b, c) {
                        out.push((a, b, c));
                    }
                }
            }
        }
        out
    }

    /// Checks the four frame axioms exhaustively, reporting the first
    /// counterexample per axiom. Frames need not come from lattices.
    pub fn check_axioms(&self) -> FrameAxiomReport {
        FrameAxiomReport {
            identity: self.identity_violation(),
            reflexivity: (0..self.n).find(|&a| !self.contains(a, a, a)),
            symmetry: self.symmetry_violation(),
            pasch: self.pasch_violation(),
        }
    }

    fn identity_violation(&self) -> Option<IdentityViolation> {
        for a in 0..self.n {
            for b in 0..self.n {
                let related = self.contains(self.zero, a, b);
                if related && a != b {
                    return Some(IdentityViolation::Unequal { a, b });
                }
                if !related && a == b {
                    return Some(IdentityViolation::Missing { a });
                }
            }
        }
        None
    }

    fn symmetry_violation(&self) -> Option<(usize, usize, usize)> {
        for (a, b, c) in self.triples() {
            let perms = [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)];
            if perms.iter().any(|&(x, y, z)| !self.contains(x, y, z)) {
                return Some((a, b, c));
            }
        }
        None
    }

    pub fn pasch_violation(&self) -> Option<PaschViolation> {
        for (a, b, c) in self.triples() {
            for d in 0..self.n {
                for e in 0..self.n {
                    if !self.contains(c, d, e) {
                        continue;
                    }
                    let witnessed =
                        (0..self.n).any(|f| self.contains(a, d, f) && self.contains(f, b, e));
                    if !witnessed {
                        return Some(PaschViolation { a, b, c, d, e });
                    }
                }
            }
        }
        None
    }

    pub fn pasch_holds(&self) -> bool {
        self.pasch_violation().is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdentityViolation {
    /// `R zero a b` with distinct `a`, `b`.
    Unequal { a: usize, b: usize },
    /// `R zero a a` missing.
    Missing { a: usize },
}

impl fmt::Display for IdentityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdentityViolation::Unequal { a, b } => write!(f, "R 0 {a} {b} with {a} != {b}"),
            IdentityViolation::Missing { a } => write!(f, "R 0 {a} {a} missing"),
        }
    }
}

/// `R a b c` and `R c d e` with no `f` satisfying `R a d f` and `R f b e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaschViolation {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
    pub e: usize,
}

impl fmt::Display for PaschViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "R {} {} {} and R {} {} {} admit no mediating point",
            self.a, self.b, self.c, self.c, self.d, self.e
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameAxiomReport {
    /// `R 0 a b` iff `a = b`.
    pub identity: Option<IdentityViolation>,
    /// `R a a a` for every `a`; holds the failing element.
    pub reflexivity: Option<usize>,
    /// Membership is invariant under all six permutations of a triple.
    pub symmetry: Option<(usize, usize, usize)>,
    pub pasch: Option<PaschViolation>,
}

impl FrameAxiomReport {
    pub fn all_pass(&self) -> bool {
        self.identity.is_none()
            && self.reflexivity.is_none()
            && self.symmetry.is_none()
            && self.pasch.is_none()
    }

    pub fn first_failure(&self) -> Option<String> {
        if let Some(v) = &self.identity {
            return Some(format!("identity axiom failed: {v}"));
        }
        if let Some(a) = self.reflexivity {
            return Some(format!("reflexivity axiom failed at {a}"));
        }
        if let Some((a, b, c)) = self.symmetry {
            return Some(format!("total symmetry failed at ({a},{b},{c})"));
        }
        if let Some(v) = &self.pasch {
            return Some(format!("pasch failed: {v}"));
        }
        None
    }
}

impl fmt::Display for FrameAxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = |v: bool| if v { "pass" } else { "FAIL" };
        writeln!(f, "identity:    {}", verdict(self.identity.is_none()))?;
        if let Some(v) = &self.identity {
            writeln!(f, "  counterexample: {v}")?;
        }
        writeln!(f, "reflexivity: {}", verdict(self.reflexivity.is_none()))?;
        if let Some(a) = self.reflexivity {
            writeln!(f, "  counterexample: R {a} {a} {a} missing")?;
        }
        writeln!(f, "symmetry:    {}", verdict(self.symmetry.is_none()))?;
        if let Some((a, b, c)) = self.symmetry {
            writeln!(f, "  counterexample: ({a},{b},{c})")?;
        }
        writeln!(f, "pasch:       {}", verdict(self.pasch.is_none()))?;
        if let Some(v) = &self.pasch {
            writeln!(f, "  counterexample: {v}")?;
        }
        Ok(())
    }
}

/// Named cross-check: the modular law on a lattice and Pasch's Postulate on
/// its induced frame must always agree.
pub fn pasch_iff_modular(l: &Lattice) -> bool {
    l.is_modular() == TernaryFrame::from_lattice(l).pasch_holds()
}
