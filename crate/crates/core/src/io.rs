//! JSON file formats for lattices, frames, and algebra dumps.
//!
//! Lattice files: `{"name": string, "n": int, "covers": [[i,j],...]}` where
//! `[i,j]` means `i` is covered by `j`. Frame files:
//! `{"n": int, "zero": int, "triples": [[a,b,c],...]}`. Algebra dumps:
//! `{"atoms": m, "identity": [ints], "fusion": [[[ints],...],...]}` with an
//! optional `"converse": [ints]` defaulting to the identity map.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frame::{FrameError, TernaryFrame};
use crate::lattice::{Lattice, LatticeError};
use crate::monoid::{BooleanMonoid, MonoidError};
use crate::set::ElemSet;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error("unrecognized input: expected covers, triples, or fusion fields")]
    Unrecognized,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeFile {
    #[serde(default)]
    pub name: String,
    pub n: usize,
    pub covers: Vec<[usize; 2]>,
}

impl LatticeFile {
    pub fn to_lattice(&self, cap: usize) -> Result<Lattice, LatticeError> {
        Lattice::from_covers_with_cap(self.n, &self.covers, cap)
    }

    pub fn from_lattice(name: &str, lattice: &Lattice) -> Self {
        LatticeFile {
            name: name.to_string(),
            n: lattice.n(),
            covers: lattice.covers().iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameFile {
    pub n: usize,
    pub zero: usize,
    pub triples: Vec<[usize; 3]>,
}

impl FrameFile {
    pub fn to_frame(&self, cap: usize) -> Result<TernaryFrame, FrameError> {
        TernaryFrame::new_with_cap(
            self.n,
            self.zero,
            self.triples.iter().map(|&[a, b, c]| (a, b, c)),
            cap,
        )
    }

    pub fn from_frame(frame: &TernaryFrame) -> Self {
        FrameFile {
            n: frame.n(),
            zero: frame.zero(),
            triples: frame.triples().iter().map(|&(a, b, c)| [a, b, c]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub atoms: usize,
    pub identity: Vec<usize>,
    /// Atom-level fusion: `fusion[u][v]` lists the atoms in the fusion.
    pub fusion: Vec<Vec<Vec<usize>>>,
    /// Converse as a per-atom map; identity when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converse: Option<Vec<usize>>,
}

impl AlgebraFile {
    pub fn to_algebra(&self) -> Result<BooleanMonoid, MonoidError> {
        let m = self.atoms;
        if self.fusion.len() != m || self.fusion.iter().any(|row| row.len() != m) {
            return Err(MonoidError::Malformed(format!(
                "fusion table must be {m} x {m}"
            )));
        }
        let bounded = |elems: &[usize]| -> Result<ElemSet, MonoidError> {
            if let Some(&bad) = elems.iter().find(|&&e| e >= m) {
                return Err(MonoidError::Malformed(format!(
                    "atom index {bad} out of range for {m} atoms"
                )));
            }
            Ok(ElemSet::from_elems(m, elems.iter().copied()))
        };
        let mut fusion_atoms = Vec::with_capacity(m * m);
        for row in &self.fusion {
            for cell in row {
                fusion_atoms.push(bounded(cell)?);
            }
        }
        let identity = bounded(&self.identity)?;
        let converse = self.converse.clone().unwrap_or_else(|| (0..m).collect());
        BooleanMonoid::from_atom_structure(m, fusion_atoms, identity, converse)
    }

    pub fn from_algebra(alg: &BooleanMonoid) -> Self {
        let m = alg.atoms();
        AlgebraFile {
            atoms: m,
            identity: alg.identity().to_vec(),
            fusion: (0..m)
                .map(|u| (0..m).map(|v| alg.fusion_atom(u, v).to_vec()).collect())
                .collect(),
            converse: Some((0..m).map(|u| alg.converse_atom(u)).collect()),
        }
    }
}

/// Any of the three accepted input shapes, distinguished by their fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InputFile {
    Lattice(LatticeFile),
    Frame(FrameFile),
    Algebra(AlgebraFile),
}

pub fn parse_input(json: &str) -> Result<InputFile, IoError> {
    let parsed: InputFile = serde_json::from_str(json)?;
    Ok(parsed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn lattice_file_round_trip() {
        let l = corpus::m3();
        let file = LatticeFile::from_lattice("m3", &l);
        let json = serde_json::to_string(&file).unwrap();
        let parsed: LatticeFile = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, file);
        assert_eq!(parsed.to_lattice(16).unwrap(), l);
    }

    #[test]
    fn input_sniffing() {
        let lattice = r#"{"name":"c2","n":2,"covers":[[0,1]]}"#;
        assert!(matches!(
            parse_input(lattice).unwrap(),
            InputFile::Lattice(_)
        ));
        let frame = r#"{"n":1,"zero":0,"triples":[[0,0,0]]}"#;
        assert!(matches!(parse_input(frame).unwrap(), InputFile::Frame(_)));
        let algebra = r#"{"atoms":1,"identity":[0],"fusion":[[[0]]]}"#;
        assert!(matches!(
            parse_input(algebra).unwrap(),
            InputFile::Algebra(_)
        ));
        assert!(parse_input("{\"nonsense\": true}").is_err());
        assert!(parse_input("not json").is_err());
    }

    #[test]
    fn algebra_round_trip_through_dump() {
        let l = corpus::chain(3);
        let alg =
            BooleanMonoid::complex_algebra(&crate::frame::TernaryFrame::from_lattice(&l)).unwrap();
        let file = AlgebraFile::from_algebra(&alg);
        let rebuilt = file.to_algebra().unwrap();
        assert_eq!(rebuilt.atoms(), alg.atoms());
        for u in 0..3 {
            for v in 0..3 {
                assert_eq!(rebuilt.fusion_atom(u, v), alg.fusion_atom(u, v));
            }
        }
    }

    #[test]
    fn algebra_defaults_converse_to_identity() {
        let json = r#"{"atoms":2,"identity":[0],"fusion":[[[0],[1]],[[1],[0,1]]]}"#;
        let InputFile::Algebra(file) = parse_input(json).unwrap() else {
            panic!("expected algebra");
        };
        let alg = file.to_algebra().unwrap();
        assert_eq!(alg.converse_atom(0), 0);
        assert_eq!(alg.converse_atom(1), 1);
    }

    #[test]
    fn malformed_algebra_rejected() {
        let json = r#"{"atoms":2,"identity":[0],"fusion":[[[0],[5]],[[1],[0]]]}"#;
        let InputFile::Algebra(file) = parse_input(json).unwrap() else {
            panic!("expected algebra");
        };
        assert!(file.to_algebra().is_err());
    }
}
