//! Workbench for finite modular lattices and the atomic algebras they
//! induce.
//!
//! The pipeline runs in one direction: a finite bounded lattice yields a
//! ternary frame whose Pasch property tracks the modular law; the complex
//! algebra of that frame is a dense symmetric relation algebra whose
//! reflexive equivalence elements recover the lattice's ideals; a complete
//! sublattice induces a unique embedding between the complex algebras; and
//! the subalgebras generated by the two families of principal ideals give a
//! proper inclusion whenever the sublattice is proper. Epi testing for both
//! lattices and algebras is bounded: verdicts are always relative to an
//! explicit finite list of targets and carry replayable witnesses or
//! exhaustion certificates.
//!
//! Everything is exhaustively checked at desk scale; carriers are capped at
//! sixteen elements by default.
//!
//! ```
//! use kr_workbench::{BooleanMonoid, ElemSet, Lattice, TernaryFrame};
//! use kr_workbench::morphism::build_uv;
//!
//! // The three-element chain, given by its cover relation.
//! let lattice = Lattice::from_covers(3, &[[0, 1], [1, 2]])?;
//! assert!(lattice.is_modular());
//!
//! let frame = TernaryFrame::from_lattice(&lattice);
//! assert!(frame.pasch_holds());
//!
//! let algebra = BooleanMonoid::complex_algebra(&frame)?;
//! assert!(algebra.is_dense() && algebra.is_symmetric() && algebra.is_abelian());
//!
//! // The bounds form a complete sublattice; its generated subalgebra is
//! // a proper part of the one generated by all principal ideals.
//! let pair = build_uv(&lattice, &ElemSet::from_elems(3, [0, 2]))?;
//! assert_eq!((pair.u.len(), pair.v.len()), (4, 8));
//! assert!(pair.proper);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod corpus;
pub mod frame;
pub mod io;
pub mod lattice;
pub mod monoid;
pub mod morphism;
pub mod report;
pub mod set;

pub use frame::{pasch_iff_modular, FrameAxiomReport, TernaryFrame};
pub use lattice::{
    enumerate_lattice_homs, is_epic_sublattice_bounded, EpiOutcome, Lattice, LatticeError,
    LatticeHom, NamedLattice,
};
pub use monoid::{verify_maddux, AxiomReport, BooleanMonoid, CheckGates, MonoidError, Subalgebra};
pub use morphism::{
    build_uv, check_atom_map_conditions, enumerate_ra_homs, extend_atom_map, inclusion_atom_map,
    is_epic_subalgebra_bounded, restrict_to_equivalence_lattice, verify_embedding_commutes,
    verify_inclusion_identities, AtomMap, MorphError, NamedAlgebra, RaHom,
};
pub use set::ElemSet;
