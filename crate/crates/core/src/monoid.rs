//! Finite atomic algebras presented by their atom structure: an atom-level
//! fusion table, a set of identity atoms, and a converse map. Elements are
//! atom subsets; Boolean operations are pointwise and fusion extends
//! additively from atoms.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frame::TernaryFrame;
use crate::lattice::{Lattice, LatticeError};
use crate::set::ElemSet;

/// Hard cap on atoms; keeps the full carrier at or below 2^16 elements.
pub const MAX_ATOMS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonoidError {
    #[error("frame axioms fail: {0}")]
    FrameInvalid(String),
    #[error("algebra with {atoms} atoms exceeds the gate of {gate} for {check}")]
    TooLarge {
        atoms: usize,
        gate: usize,
        check: &'static str,
    },
    #[error("algebra is not abelian: atoms {a} and {b} fuse asymmetrically")]
    NotAbelian { a: usize, b: usize },
    #[error("closure failure: {0}")]
    ClosureFailure(String),
    #[error("mismatch found: {0}")]
    MismatchFound(String),
    #[error("malformed atom structure: {0}")]
    Malformed(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Atomic algebra with Boolean structure on atom subsets, an additive binary
/// fusion, an additive involution candidate, and a distinguished identity.
#[derive(Clone, PartialEq, Eq)]
pub struct BooleanMonoid {
    atoms: usize,
    fusion_atoms: Vec<ElemSet>,
    identity: ElemSet,
    converse_atoms: Vec<usize>,
    frame_checked: bool,
}

impl fmt::Debug for BooleanMonoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "BooleanMonoid(atoms={}, identity={}, frame_checked={})",
            self.atoms, self.identity, self.frame_checked
        )
    }
}

impl BooleanMonoid {
    pub fn from_atom_structure(
        atoms: usize,
        fusion_atoms: Vec<ElemSet>,
        identity: ElemSet,
        converse_atoms: Vec<usize>,
    ) -> Result<Self, MonoidError> {
        if atoms == 0 {
            return Err(MonoidError::Malformed("no atoms".into()));
        }
        if atoms > MAX_ATOMS {
            return Err(MonoidError::TooLarge {
                atoms,
                gate: MAX_ATOMS,
                check: "atom structure construction",
            });
        }
        if fusion_atoms.len() != atoms * atoms {
            return Err(MonoidError::Malformed(format!(
                "fusion table has {} entries, expected {}",
                fusion_atoms.len(),
                atoms * atoms
            )));
        }
        if fusion_atoms.iter().any(|s| s.width() != atoms) || identity.width() != atoms {
            return Err(MonoidError::Malformed("width mismatch".into()));
        }
        if identity.is_empty() {
            return Err(MonoidError::Malformed("identity set is empty".into()));
        }
        if converse_atoms.len() != atoms || converse_atoms.iter().any(|&u| u >= atoms) {
            return Err(MonoidError::Malformed("converse map out of range".into()));
        }
        Ok(BooleanMonoid {
            atoms,
            fusion_atoms,
            identity,
            converse_atoms,
            frame_checked: false,
        })
    }

    /// The complex algebra of a frame: atoms are the frame points, the
    /// fusion of atoms `a`, `b` collects every `c` with `R a b c`, the
    /// identity is the singleton of the zero point, and converse is the
    /// identity map. The frame axioms are verified first.
    pub fn complex_algebra(frame: &TernaryFrame) -> Result<Self, MonoidError> {
        if frame.n() > MAX_ATOMS {
            return Err(MonoidError::TooLarge {
                atoms: frame.n(),
                gate: MAX_ATOMS,
                check: "complex algebra construction",
            });
        }
        let report = frame.check_axioms();
        if let Some(failure) = report.first_failure() {
            return Err(MonoidError::FrameInvalid(failure));
        }
        let mut alg = Self::complex_algebra_unchecked(frame);
        alg.frame_checked = true;
        // With the axioms verified the identity is a two-sided unit on atoms.
        for u in 0..alg.atoms {
            let unit = ElemSet::singleton(alg.atoms, u);
            assert_eq!(alg.fuse(alg.identity, unit), unit);
            assert_eq!(alg.fuse(unit, alg.identity), unit);
        }
        Ok(alg)
    }

    /// Complex algebra without the frame-axiom gate; the result is flagged
    /// so reports can disclose that the precondition was waived.
    pub fn complex_algebra_unchecked(frame: &TernaryFrame) -> Self {
        let n = frame.n();
        assert!(n <= MAX_ATOMS, "frame too large for a complex algebra");
        let mut fusion_atoms = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                fusion_atoms.push(ElemSet::from_elems(
                    n,
                    (0..n).filter(|&c| frame.contains(a, b, c)),
                ));
            }
        }
        BooleanMonoid {
            atoms: n,
            fusion_atoms,
            identity: ElemSet::singleton(n, frame.zero()),
            converse_atoms: (0..n).collect(),
            frame_checked: false,
        }
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn element_count(&self) -> u64 {
        1u64 << self.atoms
    }

    pub fn identity(&self) -> ElemSet {
        self.identity
    }

    pub fn top(&self) -> ElemSet {
        ElemSet::full(self.atoms)
    }

    pub fn zero(&self) -> ElemSet {
        ElemSet::empty(self.atoms)
    }

    pub fn frame_checked(&self) -> bool {
        self.frame_checked
    }

    pub fn fusion_atom(&self, u: usize, v: usize) -> ElemSet {
        self.fusion_atoms[u * self.atoms + v]
    }

    pub fn converse_atom(&self, u: usize) -> usize {
        self.converse_atoms[u]
    }

    /// All elements in ascending bit order.
    pub fn elements(&self) -> impl Iterator<Item = ElemSet> {
        ElemSet::all_subsets(self.atoms)
    }

    /// Fusion of arbitrary elements, extended additively from the atom table.
    pub fn fuse(&self, a: ElemSet, b: ElemSet) -> ElemSet {
        let mut out = ElemSet::empty(self.atoms);
        for u in a.iter() {
            for v in b.iter() {
                out = out.union(self.fusion_atom(u, v));
            }
        }
        out
    }

    pub fn converse(&self, a: ElemSet) -> ElemSet {
        ElemSet::from_elems(self.atoms, a.iter().map(|u| self.converse_atoms[u]))
    }

    pub fn complement(&self, a: ElemSet) -> ElemSet {
        a.complement()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric_violation().is_none()
    }

    pub fn symmetric_violation(&self) -> Option<usize> {
        (0..self.atoms).find(|&u| self.converse_atoms[u] != u)
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian_violation().is_none()
    }

    pub fn abelian_violation(&self) -> Option<(usize, usize)> {
        for u in 0..self.atoms {
            for v in 0..self.atoms {
                if self.fusion_atom(u, v) != self.fusion_atom(v, u) {
                    return Some((u, v));
                }
            }
        }
        None
    }

    pub fn is_dense(&self) -> bool {
        self.dense_violation().is_none()
    }

    pub fn dense_violation(&self) -> Option<usize> {
        (0..self.atoms).find(|&u| !self.fusion_atom(u, u).contains(u))
    }

    /// Verifies the ten axioms, choosing per axiom between exhaustive
    /// element-level checks (within the gates), atom-level checks where the
    /// additivity of fusion and converse makes them sufficient, and
    /// representation-level justifications for the Boolean identities. The
    /// report discloses the method used for every axiom. The cycle law has
    /// no atom-level shortcut here, so carriers beyond the pair gate are
    /// rejected.
    pub fn check_axioms(&self, gates: &CheckGates) -> Result<AxiomReport, MonoidError> {
        let m = self.atoms;
        let pair_level = m <= gates.pair_atoms;
        let triple_level = m <= gates.triple_atoms;
        if !pair_level {
            return Err(MonoidError::TooLarge {
                atoms: m,
                gate: gates.pair_atoms,
                check: "cycle law (axiom 10) over element pairs",
            });
        }
        let count = self.element_count();
        let mut axioms = Vec::with_capacity(10);

        // 1: join commutativity.
        axioms.push(self.boolean_axiom(
            1,
            "join-commutativity",
            pair_level,
            count * count,
            |alg| {
                for a in alg.elements() {
                    for b in alg.elements() {
                        if a.union(b) != b.union(a) {
                            return Some(vec![a, b]);
                        }
                    }
                }
                None
            },
        ));

        // 2: join associativity.
        axioms.push(self.boolean_axiom(
            2,
            "join-associativity",
            triple_level,
            count * count * count,
            |alg| {
                for a in alg.elements() {
                    for b in alg.elements() {
                        for c in alg.elements() {
                            if a.union(b.union(c)) != a.union(b).union(c) {
                                return Some(vec![a, b, c]);
                            }
                        }
                    }
                }
                None
            },
        ));

        // 3: the complement identity recovering each element.
        axioms.push(self.boolean_axiom(
            3,
            "complement-recovery",
            pair_level,
            count * count,
            |alg| {
                for a in alg.elements() {
                    for b in alg.elements() {
                        let lhs = a
                            .complement()
                            .union(b)
                            .complement()
                            .union(a.complement().union(b.complement()).complement());
                        if lhs != a {
                            return Some(vec![a, b]);
                        }
                    }
                }
                None
            },
        ));

        // 4: fusion associativity. Atom level suffices by additivity.
        {
            let mut methods = vec![CheckMethod::AtomExhaustive {
                tuples: (m * m * m) as u64,
            }];
            let mut counterexample = None;
            'outer4: for u in 0..m {
                for v in 0..m {
                    for w in 0..m {
                        let uv = self.fusion_atom(u, v);
                        let vw = self.fusion_atom(v, w);
                        let lhs = self.fuse(uv, ElemSet::singleton(m, w));
                        let rhs = self.fuse(ElemSet::singleton(m, u), vw);
                        if lhs != rhs {
                            counterexample = Some(vec![
                                ElemSet::singleton(m, u),
                                ElemSet::singleton(m, v),
                                ElemSet::singleton(m, w),
                            ]);
                            break 'outer4;
                        }
                    }
                }
            }
            if triple_level && counterexample.is_none() {
                methods.push(CheckMethod::ElementExhaustive {
                    tuples: count * count * count,
                });
                'elem4: for a in self.elements() {
                    for b in self.elements() {
                        for c in self.elements() {
                            if self.fuse(a, self.fuse(b, c)) != self.fuse(self.fuse(a, b), c) {
                                counterexample = Some(vec![a, b, c]);
                                break 'elem4;
                            }
                        }
                    }
                }
            }
            axioms.push(AxiomCheck {
                number: 4,
                name: "fusion-associativity".to_string(),
                methods,
                pass: counterexample.is_none(),
                counterexample,
            });
        }

        // 5: right identity, over every element.
        {
            let counterexample = self
                .elements()
                .find(|&a| self.fuse(a, self.identity) != a)
                .map(|a| vec![a]);
            axioms.push(AxiomCheck {
                number: 5,
                name: "right-identity".to_string(),
                methods: vec![CheckMethod::ElementExhaustive { tuples: count }],
                pass: counterexample.is_none(),
                counterexample,
            });
        }

        // 6: converse involution, over every element.
        {
            let counterexample = self
                .elements()
                .find(|&a| self.converse(self.converse(a)) != a)
                .map(|a| vec![a]);
            axioms.push(AxiomCheck {
                number: 6,
                name: "converse-involution".to_string(),
                methods: vec![CheckMethod::ElementExhaustive { tuples: count }],
                pass: counterexample.is_none(),
                counterexample,
            });
        }

        // 7: converse of a fusion. Atom level suffices by additivity.
        {
            let mut methods = vec![CheckMethod::AtomExhaustive {
                tuples: (m * m) as u64,
            }];
            let mut counterexample = None;
            'outer7: for u in 0..m {
                for v in 0..m {
                    let su = ElemSet::singleton(m, u);
                    let sv = ElemSet::singleton(m, v);
                    if self.converse(self.fuse(su, sv))
                        != self.fuse(self.converse(sv), self.converse(su))
                    {
                        counterexample = Some(vec![su, sv]);
                        break 'outer7;
                    }
                }
            }
            if pair_level && counterexample.is_none() {
                methods.push(CheckMethod::ElementExhaustive {
                    tuples: count * count,
                });
                'elem7: for a in self.elements() {
                    for b in self.elements() {
                        if self.converse(self.fuse(a, b))
                            != self.fuse(self.converse(b), self.converse(a))
                        {
                            counterexample = Some(vec![a, b]);
                            break 'elem7;
                        }
                    }
                }
            }
            axioms.push(AxiomCheck {
                number: 7,
                name: "converse-antidistribution".to_string(),
                methods,
                pass: counterexample.is_none(),
                counterexample,
            });
        }

        // 8: fusion distributes over join on the right; holds by the
        // additive construction of element fusion.
        {
            let mut methods = vec![CheckMethod::Additivity];
            let mut counterexample = None;
            if triple_level {
                methods.push(CheckMethod::ElementExhaustive {
                    tuples: count * count * count,
                });
                'elem8: for a in self.elements() {
                    for b in self.elements() {
                        for c in self.elements() {
                            if self.fuse(a.union(b), c) != self.fuse(a, c).union(self.fuse(b, c)) {
                                counterexample = Some(vec![a, b, c]);
                                break 'elem8;
                            }
                        }
                    }
                }
            }
            axioms.push(AxiomCheck {
                number: 8,
                name: "fusion-right-distributivity".to_string(),
                methods,
                pass: counterexample.is_none(),
                counterexample,
            });
        }

        // 9: converse distributes over join; additive by construction.
        {
            let mut methods = vec![CheckMethod::Additivity];
            let mut counterexample = None;
            if pair_level {
                methods.push(CheckMethod::ElementExhaustive {
                    tuples: count * count,
                });
                'elem9: for a in self.elements() {
                    for b in self.elements() {
                        if self.converse(a.union(b)) != self.converse(a).union(self.converse(b)) {
                            counterexample = Some(vec![a, b]);
                            break 'elem9;
                        }
                    }
                }
            }
            axioms.push(AxiomCheck {
                number: 9,
                name: "converse-additivity".to_string(),
                methods,
                pass: counterexample.is_none(),
                counterexample,
            });
        }

        // 10: the cycle law, element pairs only.
        {
            let mut counterexample = None;
            'elem10: for a in self.elements() {
                for b in self.elements() {
                    let lhs = self
                        .fuse(self.converse(a), self.fuse(a, b).complement())
                        .union(b.complement());
                    if lhs != b.complement() {
                        counterexample = Some(vec![a, b]);
                        break 'elem10;
                    }
                }
            }
            axioms.push(AxiomCheck {
                number: 10,
                name: "cycle-law".to_string(),
                methods: vec![CheckMethod::ElementExhaustive {
                    tuples: count * count,
                }],
                pass: counterexample.is_none(),
                counterexample,
            });
        }

        Ok(AxiomReport {
            axioms,
            dense: FlagCheck {
                holds: self.is_dense(),
                counterexample: self.dense_violation().map(|u| vec![u]),
            },
            symmetric: FlagCheck {
                holds: self.is_symmetric(),
                counterexample: self.symmetric_violation().map(|u| vec![u]),
            },
            abelian: FlagCheck {
                holds: self.is_abelian(),
                counterexample: self.abelian_violation().map(|(u, v)| vec![u, v]),
            },
            frame_checked: self.frame_checked,
        })
    }

    fn boolean_axiom(
        &self,
        number: u8,
        name: &'static str,
        element_level: bool,
        tuples: u64,
        scan: impl Fn(&Self) -> Option<Vec<ElemSet>>,
    ) -> AxiomCheck {
        if element_level {
            let counterexample = scan(self);
            AxiomCheck {
                number,
                name: name.to_string(),
                methods: vec![CheckMethod::ElementExhaustive { tuples }],
                pass: counterexample.is_none(),
                counterexample,
            }
        } else {
            // Boolean operations are pointwise on packed sets.
            AxiomCheck {
                number,
                name: name.to_string(),
                methods: vec![CheckMethod::Representation],
                pass: true,
                counterexample: None,
            }
        }
    }

    /// All reflexive equivalence elements, found by scanning the supersets
    /// of the identity set, in ascending bit order.
    pub fn equivalence_elements(&self) -> Result<Vec<ElemSet>, MonoidError> {
        self.equivalence_elements_gated(MAX_ATOMS)
    }

    pub fn equivalence_elements_gated(
        &self,
        max_atoms: usize,
    ) -> Result<Vec<ElemSet>, MonoidError> {
        if self.atoms > max_atoms {
            return Err(MonoidError::TooLarge {
                atoms: self.atoms,
                gate: max_atoms,
                check: "equivalence element scan",
            });
        }
        Ok(self
            .identity
            .supersets()
            .filter(|&e| self.converse(e) == e && self.fuse(e, e).is_subset_of(&e))
            .collect())
    }

    /// The lattice formed by the reflexive equivalence elements of an
    /// abelian algebra, with fusion as join and intersection as meet. The
    /// closure of the element set under both operations, the agreement of
    /// fusion with the inclusion join, and modularity are all verified;
    /// in an abelian relation algebra none of them can fail, so a failure
    /// here traps an algebra that is not actually one.
    pub fn equivalence_lattice(&self) -> Result<EquivalenceLattice, MonoidError> {
        if let Some((a, b)) = self.abelian_violation() {
            return Err(MonoidError::NotAbelian { a, b });
        }
        let elements = self.equivalence_elements()?;
        let m = elements.len();
        let index: HashMap<u64, usize> = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.bits(), i))
            .collect();
        let mut leq = vec![false; m * m];
        for i in 0..m {
            for j in 0..m {
                leq[i * m + j] = elements[i].is_subset_of(&elements[j]);
            }
        }
        let lattice = Lattice::from_leq(m, leq)
            .map_err(|e| MonoidError::ClosureFailure(format!("inclusion order: {e}")))?;
        for i in 0..m {
            for j in 0..m {
                let fused = self.fuse(elements[i], elements[j]);
                match index.get(&fused.bits()) {
                    Some(&k) if k == lattice.join(i, j) => {}
                    Some(_) => {
                        return Err(MonoidError::ClosureFailure(format!(
                            "fusion of {} and {} is not the inclusion join",
                            elements[i], elements[j]
                        )))
                    }
                    None => {
                        return Err(MonoidError::ClosureFailure(format!(
                            "fusion of {} and {} left the equivalence elements",
                            elements[i], elements[j]
                        )))
                    }
                }
                let met = elements[i].intersect(elements[j]);
                match index.get(&met.bits()) {
                    Some(&k) if k == lattice.meet(i, j) => {}
                    _ => {
                        return Err(MonoidError::ClosureFailure(format!(
                            "meet of {} and {} left the equivalence elements",
                            elements[i], elements[j]
                        )))
                    }
                }
            }
        }
        if let Some(v) = lattice.modular_violation() {
            return Err(MonoidError::ClosureFailure(format!(
                "equivalence lattice is not modular at {v}"
            )));
        }
        // Identity at the bottom, the full carrier at the top.
        assert_eq!(elements[lattice.bottom()], self.identity);
        assert_eq!(elements[lattice.top()], self.top());
        Ok(EquivalenceLattice { lattice, elements })
    }

    /// Smallest subset containing the identity and the generators, closed
    /// under union, complement, fusion, and converse, computed by a
    /// deduplicating worklist. The resulting element set does not depend on
    /// generator order.
    pub fn subalgebra_generated(&self, generators: &[ElemSet]) -> Subalgebra {
        for g in generators {
            assert_eq!(g.width(), self.atoms, "generator width mismatch");
        }
        let mut elements: Vec<ElemSet> = Vec::new();
        let mut index: HashMap<u64, usize> = HashMap::new();
        let add = |elements: &mut Vec<ElemSet>, index: &mut HashMap<u64, usize>, e: ElemSet| {
            index.entry(e.bits()).or_insert_with(|| {
                elements.push(e);
                elements.len() - 1
            });
        };
        add(&mut elements, &mut index, self.identity);
        for &g in generators {
            add(&mut elements, &mut index, g);
        }
        let mut next = 0;
        while next < elements.len() {
            let x = elements[next];
            add(&mut elements, &mut index, x.complement());
            add(&mut elements, &mut index, self.converse(x));
            for j in 0..=next {
                let y = elements[j];
                add(&mut elements, &mut index, x.union(y));
                add(&mut elements, &mut index, self.fuse(x, y));
                add(&mut elements, &mut index, self.fuse(y, x));
            }
            next += 1;
        }
        elements.sort_by_key(ElemSet::bits);
        Subalgebra {
            ambient: self.clone(),
            elements,
            generators: generators.to_vec(),
        }
    }
}

/// Subalgebra of an ambient atomic algebra, closed under union, complement,
/// fusion, and converse, with the identity included.
#[derive(Debug, Clone)]
pub struct Subalgebra {
    ambient: BooleanMonoid,
    elements: Vec<ElemSet>,
    generators: Vec<ElemSet>,
}

impl Subalgebra {
    pub fn ambient(&self) -> &BooleanMonoid {
        &self.ambient
    }

    /// Elements in ascending bit order.
    pub fn elements(&self) -> &[ElemSet] {
        &self.elements
    }

    pub fn generators(&self) -> &[ElemSet] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, e: &ElemSet) -> Option<usize> {
        self.elements
            .binary_search_by_key(&e.bits(), |x| x.bits())
            .ok()
    }

    pub fn contains(&self, e: &ElemSet) -> bool {
        self.index_of(e).is_some()
    }

    pub fn is_contained_in(&self, other: &Subalgebra) -> bool {
        self.elements.iter().all(|e| other.contains(e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CheckMethod {
    /// Holds because the operation is pointwise on the packed representation.
    Representation,
    /// Holds because the operation is defined additively from atoms.
    Additivity,
    AtomExhaustive {
        tuples: u64,
    },
    ElementExhaustive {
        tuples: u64,
    },
}

impl fmt::Display for CheckMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckMethod::Representation => write!(f, "representation"),
            CheckMethod::Additivity => write!(f, "additivity"),
            CheckMethod::AtomExhaustive { tuples } => write!(f, "atom-exhaustive({tuples})"),
            CheckMethod::ElementExhaustive { tuples } => {
                write!(f, "element-exhaustive({tuples})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub number: u8,
    pub name: String,
    pub methods: Vec<CheckMethod>,
    pub pass: bool,
    pub counterexample: Option<Vec<ElemSet>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagCheck {
    pub holds: bool,
    /// Witness atoms for the failing flag.
    pub counterexample: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub axioms: Vec<AxiomCheck>,
    pub dense: FlagCheck,
    pub symmetric: FlagCheck,
    pub abelian: FlagCheck,
    /// Whether the algebra came from a frame whose axioms were verified.
    pub frame_checked: bool,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.axioms.iter().all(|a| a.pass)
    }

    pub fn is_boolean_monoid(&self) -> bool {
        self.all_pass() && self.dense.holds && self.symmetric.holds
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ax in &self.axioms {
            let methods: Vec<String> = ax.methods.iter().map(|m| m.to_string()).collect();
            writeln!(
                f,
                "axiom {:>2} {:<28} {} [{}]",
                ax.number,
                ax.name,
                if ax.pass { "pass" } else { "FAIL" },
                methods.join(", ")
            )?;
            if let Some(ce) = &ax.counterexample {
                let parts: Vec<String> = ce.iter().map(|e| e.to_string()).collect();
                writeln!(f, "   counterexample: {}", parts.join(", "))?;
            }
        }
        let flag = |v: bool| if v { "yes" } else { "no" };
        writeln!(
            f,
            "dense: {}  symmetric: {}  abelian: {}",
            flag(self.dense.holds),
            flag(self.symmetric.holds),
            flag(self.abelian.holds)
        )?;
        if !self.frame_checked {
            writeln!(f, "note: frame axioms were not verified for this algebra")?;
        }
        Ok(())
    }
}

/// Size gates for exhaustive element-level checks, in atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckGates {
    /// Checks quantifying over element pairs run when atoms <= this.
    pub pair_atoms: usize,
    /// Checks quantifying over element triples run when atoms <= this.
    pub triple_atoms: usize,
}

impl Default for CheckGates {
    fn default() -> Self {
        CheckGates {
            pair_atoms: 10,
            triple_atoms: 7,
        }
    }
}

impl CheckGates {
    /// Gates derived from a single element-level bound, keeping the pair
    /// gate at least at its default.
    pub fn from_max_exhaustive(triple_atoms: usize) -> Self {
        CheckGates {
            pair_atoms: triple_atoms.max(Self::default().pair_atoms),
            triple_atoms,
        }
    }
}

/// The equivalence lattice of an abelian algebra together with the witness
/// map from lattice indices back to algebra elements.
#[derive(Debug, Clone)]
pub struct EquivalenceLattice {
    pub lattice: Lattice,
    pub elements: Vec<ElemSet>,
}

/// Identification of the equivalence elements of a lattice's complex algebra
/// with the lattice's ideals, literally as subsets, with fusion matching
/// ideal join and intersection matching ideal meet on every pair.
#[derive(Debug, Clone)]
pub struct MadduxIdentification {
    pub ideals: Vec<ElemSet>,
    pub pairs_checked: usize,
}

pub fn verify_maddux(l: &Lattice) -> Result<MadduxIdentification, MonoidError> {
    let frame = TernaryFrame::from_lattice(l);
    let alg = BooleanMonoid::complex_algebra(&frame)?;
    let ideal_lattice = l.ideals();
    let equivalence = alg.equivalence_elements()?;
    if equivalence != ideal_lattice.ideals {
        return Err(MonoidError::MismatchFound(format!(
            "{} equivalence elements vs {} ideals, or unequal families",
            equivalence.len(),
            ideal_lattice.ideals.len()
        )));
    }
    let mut pairs_checked = 0;
    for i in 0..equivalence.len() {
        for j in 0..equivalence.len() {
            pairs_checked += 1;
            let fused = alg.fuse(equivalence[i], equivalence[j]);
            let ideal_join = ideal_lattice.ideals[ideal_lattice.lattice.join(i, j)];
            if fused != ideal_join {
                return Err(MonoidError::MismatchFound(format!(
                    "fusion of ideals {} and {} is {}, ideal join is {}",
                    equivalence[i], equivalence[j], fused, ideal_join
                )));
            }
            let met = equivalence[i].intersect(equivalence[j]);
            let ideal_meet = ideal_lattice.ideals[ideal_lattice.lattice.meet(i, j)];
            if met != ideal_meet {
                return Err(MonoidError::MismatchFound(format!(
                    "intersection of ideals {} and {} is not the ideal meet",
                    equivalence[i], equivalence[j]
                )));
            }
        }
    }
    Ok(MadduxIdentification {
        ideals: ideal_lattice.ideals,
        pairs_checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use proptest::prelude::*;

    fn cm(l: &Lattice) -> BooleanMonoid {
        BooleanMonoid::complex_algebra(&TernaryFrame::from_lattice(l)).unwrap()
    }

    #[test]
    fn two_chain_fusion_table() {
        let alg = cm(&corpus::chain(2));
        assert_eq!(alg.fusion_atom(1, 1), ElemSet::from_elems(2, [0, 1]));
        assert_eq!(alg.fusion_atom(0, 1), ElemSet::singleton(2, 1));
        assert_eq!(alg.identity(), ElemSet::singleton(2, 0));
    }

    #[test]
    fn three_chain_fusion_table() {
        let alg = cm(&corpus::chain(3));
        assert_eq!(alg.fusion_atom(1, 2), ElemSet::singleton(3, 2));
        assert_eq!(alg.fusion_atom(1, 1), ElemSet::from_elems(3, [0, 1]));
        assert_eq!(alg.fusion_atom(2, 2), ElemSet::full(3));
    }

    #[test]
    fn identity_is_unit() {
        let alg = cm(&corpus::m3());
        for x in alg.elements() {
            assert_eq!(alg.fuse(alg.identity(), x), x);
            assert_eq!(alg.fuse(x, alg.identity()), x);
        }
    }

    #[test]
    fn diamond_axioms_pass() {
        let alg = cm(&corpus::m3());
        let report = alg.check_axioms(&CheckGates::default()).unwrap();
        assert!(report.all_pass());
        assert!(report.dense.holds && report.symmetric.holds && report.abelian.holds);
        assert!(report.is_boolean_monoid());
        assert!(report.frame_checked);
    }

    #[test]
    fn two_chain_dense() {
        let alg = cm(&corpus::chain(2));
        let one = ElemSet::singleton(2, 1);
        assert!(one.is_subset_of(&alg.fuse(one, one)));
        assert!(alg.is_dense());
    }

    #[test]
    fn converse_identity_on_complex_algebras() {
        let alg = cm(&corpus::chain(3));
        for x in alg.elements() {
            assert_eq!(alg.converse(alg.converse(x)), x);
            assert_eq!(alg.converse(x), x);
        }
    }

    #[test]
    fn injected_asymmetry_detected() {
        // Two atoms, fusion table with 0 as unit but asymmetric at (1,1)/(1,0).
        let alg = BooleanMonoid::from_atom_structure(
            2,
            vec![
                ElemSet::singleton(2, 0),
                ElemSet::singleton(2, 1),
                ElemSet::from_elems(2, [0, 1]),
                ElemSet::singleton(2, 1),
            ],
            ElemSet::singleton(2, 0),
            vec![0, 1],
        )
        .unwrap();
        assert!(!alg.is_abelian());
        assert_eq!(alg.abelian_violation(), Some((0, 1)));
    }

    #[test]
    fn one_atom_algebra() {
        let alg = BooleanMonoid::from_atom_structure(
            1,
            vec![ElemSet::singleton(1, 0)],
            ElemSet::singleton(1, 0),
            vec![0],
        )
        .unwrap();
        assert!(alg.is_dense() && alg.is_symmetric() && alg.is_abelian());
        let report = alg.check_axioms(&CheckGates::default()).unwrap();
        assert!(report.all_pass());
    }

    #[test]
    fn broken_associativity_detected() {
        // 0 is a unit, but 1∘1 = {0} makes fusion non-associative with 1∘2.
        let alg = BooleanMonoid::from_atom_structure(
            3,
            vec![
                ElemSet::singleton(3, 0),
                ElemSet::singleton(3, 1),
                ElemSet::singleton(3, 2),
                ElemSet::singleton(3, 1),
                ElemSet::singleton(3, 0),
                ElemSet::singleton(3, 2),
                ElemSet::singleton(3, 2),
                ElemSet::singleton(3, 2),
                ElemSet::singleton(3, 1),
            ],
            ElemSet::singleton(3, 0),
            vec![0, 1, 2],
        )
        .unwrap();
        let report = alg.check_axioms(&CheckGates::default()).unwrap();
        let assoc = &report.axioms[3];
        assert_eq!(assoc.number, 4);
        assert!(!assoc.pass);
        assert!(assoc.counterexample.is_some());
    }

    #[test]
    fn gates_switch_strategy() {
        let alg = cm(&corpus::m3());
        let tight = CheckGates {
            pair_atoms: 10,
            triple_atoms: 4,
        };
        let report = alg.check_axioms(&tight).unwrap();
        let assoc = &report.axioms[3];
        assert_eq!(
            assoc.methods,
            vec![CheckMethod::AtomExhaustive { tuples: 125 }]
        );
        let report_wide = alg.check_axioms(&CheckGates::default()).unwrap();
        assert_eq!(report_wide.axioms[3].methods.len(), 2);
    }

    #[test]
    fn too_large_for_pair_checks() {
        let alg = cm(&corpus::m3());
        let err = alg
            .check_axioms(&CheckGates {
                pair_atoms: 4,
                triple_atoms: 4,
            })
            .unwrap_err();
        assert!(matches!(err, MonoidError::TooLarge { .. }));
    }

    #[test]
    fn pentagon_frame_rejected_but_waivable() {
        let frame = TernaryFrame::from_lattice(&corpus::n5());
        assert!(matches!(
            BooleanMonoid::complex_algebra(&frame),
            Err(MonoidError::FrameInvalid(_))
        ));
        // Waived construction is flagged, and the pasch failure resurfaces
        // as a fusion-associativity failure.
        let alg = BooleanMonoid::complex_algebra_unchecked(&frame);
        assert!(!alg.frame_checked());
        let report = alg.check_axioms(&CheckGates::default()).unwrap();
        assert!(!report.frame_checked);
        let assoc = &report.axioms[3];
        assert_eq!(assoc.number, 4);
        assert!(!assoc.pass, "pasch failure must break associativity");
    }

    #[test]
    fn equivalence_elements_two_chain() {
        let alg = cm(&corpus::chain(2));
        let eq = alg.equivalence_elements().unwrap();
        assert_eq!(
            eq,
            vec![ElemSet::singleton(2, 0), ElemSet::from_elems(2, [0, 1])]
        );
    }

    #[test]
    fn identity_and_top_always_qualify() {
        for entry in corpus::bundled() {
            if !entry.lattice.is_modular() {
                continue;
            }
            let alg = cm(&entry.lattice);
            let eq = alg.equivalence_elements().unwrap();
            assert!(eq.contains(&alg.identity()), "{}", entry.name);
            assert!(eq.contains(&alg.top()), "{}", entry.name);
            assert_eq!(eq.len(), entry.lattice.n(), "{}", entry.name);
        }
    }

    #[test]
    fn equivalence_scan_gate() {
        let alg = cm(&corpus::m3());
        assert!(matches!(
            alg.equivalence_elements_gated(2),
            Err(MonoidError::TooLarge {
                atoms: 5,
                gate: 2,
                ..
            })
        ));
    }

    #[test]
    fn equivalence_lattice_two_chain() {
        let alg = cm(&corpus::chain(2));
        let el = alg.equivalence_lattice().unwrap();
        assert_eq!(el.lattice.n(), 2);
        assert_eq!(el.elements[el.lattice.bottom()], alg.identity());
        assert_eq!(el.elements[el.lattice.top()], alg.top());
    }

    #[test]
    fn equivalence_lattice_rejects_non_abelian() {
        let alg = BooleanMonoid::from_atom_structure(
            2,
            vec![
                ElemSet::singleton(2, 0),
                ElemSet::singleton(2, 1),
                ElemSet::from_elems(2, [0, 1]),
                ElemSet::singleton(2, 1),
            ],
            ElemSet::singleton(2, 0),
            vec![0, 1],
        )
        .unwrap();
        assert!(matches!(
            alg.equivalence_lattice(),
            Err(MonoidError::NotAbelian { .. })
        ));
    }

    #[test]
    fn maddux_identification() {
        for name in ["chain1", "chain2", "m3"] {
            let l = corpus::by_name(name).unwrap();
            let id = verify_maddux(&l).unwrap();
            assert_eq!(id.ideals.len(), l.n(), "{name}");
            assert_eq!(id.pairs_checked, l.n() * l.n(), "{name}");
        }
    }

    #[test]
    fn subalgebra_generated_by_identity() {
        let alg = cm(&corpus::chain(2));
        let sub = alg.subalgebra_generated(&[alg.identity()]);
        let expected: Vec<ElemSet> = [0b00u64, 0b01, 0b10, 0b11]
            .iter()
            .map(|&b| ElemSet::from_bits(2, b))
            .collect();
        assert_eq!(sub.elements(), &expected[..]);
    }

    #[test]
    fn atoms_generate_everything() {
        let alg = cm(&corpus::chain(3));
        let atoms: Vec<ElemSet> = (0..3).map(|i| ElemSet::singleton(3, i)).collect();
        let sub = alg.subalgebra_generated(&atoms);
        assert_eq!(sub.len(), 8);
    }

    #[test]
    fn three_chain_principal_subalgebra() {
        let alg = cm(&corpus::chain(3));
        let gens = [ElemSet::singleton(3, 0), ElemSet::full(3)];
        let sub = alg.subalgebra_generated(&gens);
        let expected: Vec<ElemSet> = [0b000u64, 0b001, 0b110, 0b111]
            .iter()
            .map(|&b| ElemSet::from_bits(3, b))
            .collect();
        assert_eq!(sub.elements(), &expected[..]);
        // The fusion that forces the full downset stays inside.
        let upper = ElemSet::from_elems(3, [1, 2]);
        assert_eq!(alg.fuse(upper, upper), ElemSet::full(3));
    }

    #[test]
    fn generator_order_irrelevant() {
        let alg = cm(&corpus::m3());
        let a = alg.fusion_atom(1, 2);
        let b = ElemSet::from_elems(5, [0, 3]);
        let fwd = alg.subalgebra_generated(&[a, b]);
        let rev = alg.subalgebra_generated(&[b, a]);
        assert_eq!(fwd.elements(), rev.elements());
    }

    #[test]
    fn fusion_matches_direct_frame_definition() {
        // Independent oracle: collect c with R a b c ranging over members.
        for entry in corpus::bundled() {
            let l = &entry.lattice;
            if !l.is_modular() || l.n() > 4 {
                continue;
            }
            let frame = TernaryFrame::from_lattice(l);
            let alg = BooleanMonoid::complex_algebra(&frame).unwrap();
            for a in alg.elements() {
                for b in alg.elements() {
                    let direct = ElemSet::from_elems(
                        l.n(),
                        (0..l.n()).filter(|&c| {
                            a.iter().any(|x| b.iter().any(|y| frame.contains(x, y, c)))
                        }),
                    );
                    assert_eq!(alg.fuse(a, b), direct, "{}", entry.name);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn fusion_completely_additive(
            parts in proptest::collection::vec(0u64..32, 1..5),
            b_bits in 0u64..32,
        ) {
            let alg = cm(&corpus::m3());
            let b = ElemSet::from_bits(5, b_bits);
            let union = parts
                .iter()
                .fold(ElemSet::empty(5), |acc, &p| acc.union(ElemSet::from_bits(5, p)));
            let fused_union = alg.fuse(union, b);
            let union_fused = parts
                .iter()
                .fold(ElemSet::empty(5), |acc, &p| {
                    acc.union(alg.fuse(ElemSet::from_bits(5, p), b))
                });
            prop_assert_eq!(fused_union, union_fused);
        }

        #[test]
        fn equivalence_lattices_modular(idx in 0usize..12) {
            let entry = &corpus::CORPUS[idx];
            if entry.expect_modular() && entry.n <= 6 {
                let alg = cm(&entry.lattice());
                let el = alg.equivalence_lattice().unwrap();
                prop_assert!(el.lattice.is_modular());
            }
        }
    }
}
