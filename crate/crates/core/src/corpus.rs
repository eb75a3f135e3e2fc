//! Bundled corpus of small lattices used by the verification suites and the
//! corpus runner: all chains up to five elements, the diamond and the
//! pentagon, the Boolean squares of rank two and three, and three stacked
//! diamond variants.

use crate::frame::TernaryFrame;
use crate::lattice::{Lattice, NamedLattice};
use crate::monoid::BooleanMonoid;
use crate::morphism::NamedAlgebra;

pub struct CorpusEntry {
    pub name: &'static str,
    pub n: usize,
    pub covers: &'static [[usize; 2]],
}

pub const CORPUS: &[CorpusEntry] = &[
    CorpusEntry {
        name: "chain1",
        n: 1,
        covers: &[],
    },
    CorpusEntry {
        name: "chain2",
        n: 2,
        covers: &[[0, 1]],
    },
    CorpusEntry {
        name: "chain3",
        n: 3,
        covers: &[[0, 1], [1, 2]],
    },
    CorpusEntry {
        name: "chain4",
        n: 4,
        covers: &[[0, 1], [1, 2], [2, 3]],
    },
    CorpusEntry {
        name: "chain5",
        n: 5,
        covers: &[[0, 1], [1, 2], [2, 3], [3, 4]],
    },
    CorpusEntry {
        name: "bool2",
        n: 4,
        covers: &[[0, 1], [0, 2], [1, 3], [2, 3]],
    },
    CorpusEntry {
        name: "bool3",
        n: 8,
        covers: &[
            [0, 1],
            [0, 2],
            [0, 4],
            [1, 3],
            [1, 5],
            [2, 3],
            [2, 6],
            [4, 5],
            [4, 6],
            [3, 7],
            [5, 7],
            [6, 7],
        ],
    },
    CorpusEntry {
        name: "m3",
        n: 5,
        covers: &[[0, 1], [0, 2], [0, 3], [1, 4], [2, 4], [3, 4]],
    },
    CorpusEntry {
        name: "n5",
        n: 5,
        covers: &[[0, 1], [1, 3], [0, 2], [3, 4], [2, 4]],
    },
    // Diamond with an extra element stacked on top.
    CorpusEntry {
        name: "m3_top",
        n: 6,
        covers: &[[0, 1], [0, 2], [0, 3], [1, 4], [2, 4], [3, 4], [4, 5]],
    },
    // Diamond with an extra element below the bottom.
    CorpusEntry {
        name: "m3_bot",
        n: 6,
        covers: &[[0, 1], [1, 2], [1, 3], [1, 4], [2, 5], [3, 5], [4, 5]],
    },
    // Two diamonds glued at the shared middle element.
    CorpusEntry {
        name: "m3_m3",
        n: 9,
        covers: &[
            [0, 1],
            [0, 2],
            [0, 3],
            [1, 4],
            [2, 4],
            [3, 4],
            [4, 5],
            [4, 6],
            [4, 7],
            [5, 8],
            [6, 8],
            [7, 8],
        ],
    },
];

impl CorpusEntry {
    pub fn lattice(&self) -> Lattice {
        Lattice::from_covers(self.n, self.covers).expect("corpus entry is a valid lattice")
    }

    /// Whether the entry satisfies the modular law (the pentagon is the only
    /// corpus member that does not).
    pub fn expect_modular(&self) -> bool {
        self.name != "n5"
    }
}

pub fn bundled() -> Vec<NamedLattice> {
    CORPUS
        .iter()
        .map(|e| NamedLattice {
            name: e.name.to_string(),
            lattice: e.lattice(),
        })
        .collect()
}

pub fn by_name(name: &str) -> Option<Lattice> {
    CORPUS
        .iter()
        .find(|e| e.name == name)
        .map(CorpusEntry::lattice)
}

/// The chain with `n` elements.
pub fn chain(n: usize) -> Lattice {
    let covers: Vec<[usize; 2]> = (0..n.saturating_sub(1)).map(|i| [i, i + 1]).collect();
    Lattice::from_covers(n, &covers).expect("chain is a valid lattice")
}

pub fn m3() -> Lattice {
    by_name("m3").unwrap()
}

pub fn n5() -> Lattice {
    by_name("n5").unwrap()
}

pub fn bool2() -> Lattice {
    by_name("bool2").unwrap()
}

pub fn bool3() -> Lattice {
    by_name("bool3").unwrap()
}

/// Default target class for bounded epi tests on lattices: the modular
/// corpus members with at most five elements.
pub fn default_lattice_targets() -> Vec<NamedLattice> {
    CORPUS
        .iter()
        .filter(|e| e.expect_modular() && e.n <= 5)
        .map(|e| NamedLattice {
            name: e.name.to_string(),
            lattice: e.lattice(),
        })
        .collect()
}

/// Default target class for bounded epi tests on algebras: the complex
/// algebras of the default lattice targets.
pub fn default_algebra_targets() -> Vec<NamedAlgebra> {
    default_lattice_targets()
        .into_iter()
        .map(|t| NamedAlgebra {
            algebra: BooleanMonoid::complex_algebra(&TernaryFrame::from_lattice(&t.lattice))
                .expect("modular corpus lattice yields a valid frame"),
            name: t.name,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_shape() {
        assert!(CORPUS.len() >= 12);
        let mut names: Vec<&str> = CORPUS.iter().map(|e| e.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), CORPUS.len(), "names must be unique");
        for entry in CORPUS {
            let l = entry.lattice();
            assert_eq!(l.n(), entry.n);
            assert_eq!(l.is_modular(), entry.expect_modular(), "{}", entry.name);
        }
    }

    #[test]
    fn default_targets() {
        let targets = default_lattice_targets();
        assert!(targets.iter().all(|t| t.lattice.n() <= 5));
        assert!(targets.iter().any(|t| t.name == "m3"));
        assert!(!targets.iter().any(|t| t.name == "n5"));
        assert_eq!(default_algebra_targets().len(), targets.len());
    }
}
