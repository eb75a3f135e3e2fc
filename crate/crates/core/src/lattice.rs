//! Finite bounded lattices with explicit order, join, and meet tables.
//!
//! A [`Lattice`] is built from a cover relation (or a full order relation) and
//! is immutable after validation: the constructor computes the
//! reflexive-transitive closure, the least-upper-bound and
//! greatest-lower-bound tables, and the global bounds, and verifies the
//! lattice identities exhaustively. Carriers are capped at
//! [`DEFAULT_MAX_N`] elements unless a caller raises the cap explicitly.

use std::collections::HashMap;
use std::fmt;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::set::ElemSet;

/// Default carrier cap. Complex algebras square this to 2^16 elements.
pub const DEFAULT_MAX_N: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LatticeOp {
    Join,
    Meet,
}

impl fmt::Display for LatticeOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeOp::Join => write!(f, "join"),
            LatticeOp::Meet => write!(f, "meet"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bound {
    Bottom,
    Top,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Bottom => write!(f, "bottom"),
            Bound::Top => write!(f, "top"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("carrier must not be empty")]
    EmptyCarrier,
    #[error("carrier size {n} exceeds the cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("cover index {index} out of range for carrier size {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("cover relation has a cycle through element {element}")]
    CycleInCovers { element: usize },
    #[error("relation is not a partial order")]
    NotAPartialOrder,
    #[error("not a lattice: elements {a} and {b} lack a unique {op}")]
    NotALattice { a: usize, b: usize, op: LatticeOp },
    #[error("no unique {0} element")]
    NoBounds(Bound),
}

/// Finite bounded lattice over indices `0..n`.
#[derive(Clone, PartialEq, Eq)]
pub struct Lattice {
    n: usize,
    leq: Vec<bool>,
    join: Vec<usize>,
    meet: Vec<usize>,
    bottom: usize,
    top: usize,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Lattice(n={}, bottom={}, top={}, covers={:?})",
            self.n,
            self.bottom,
            self.top,
            self.covers()
        )
    }
}

impl Lattice {
    /// Builds a lattice from a cover list, `[i, j]` meaning `i` is covered by `j`.
    pub fn from_covers(n: usize, covers: &[[usize; 2]]) -> Result<Self, LatticeError> {
        Self::from_covers_with_cap(n, covers, DEFAULT_MAX_N)
    }

    pub fn from_covers_with_cap(
        n: usize,
        covers: &[[usize; 2]],
        cap: usize,
    ) -> Result<Self, LatticeError> {
        if n == 0 {
            return Err(LatticeError::EmptyCarrier);
        }
        let cap = cap.min(ElemSet::MAX_WIDTH);
        if n > cap {
            return Err(LatticeError::TooLarge { n, cap });
        }
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for &[lo, hi] in covers {
            for idx in [lo, hi] {
                if idx >= n {
                    return Err(LatticeError::IndexOutOfRange { index: idx, n });
                }
            }
            if lo == hi {
                return Err(LatticeError::CycleInCovers { element: lo });
            }
            leq[lo * n + hi] = true;
        }
        // Reflexive-transitive closure.
        for k in 0..n {
            for i in 0..n {
                if leq[i * n + k] {
                    for j in 0..n {
                        if leq[k * n + j] {
                            leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && leq[i * n + j] && leq[j * n + i] {
                    return Err(LatticeError::CycleInCovers { element: i.min(j) });
                }
            }
        }
        Self::from_leq(n, leq)
    }

    /// Builds a lattice from a full order relation given as an `n*n` matrix.
    pub fn from_leq(n: usize, leq: Vec<bool>) -> Result<Self, LatticeError> {
        if n == 0 {
            return Err(LatticeError::EmptyCarrier);
        }
        assert_eq!(leq.len(), n * n, "order matrix has wrong size");
        let at = |a: usize, b: usize| leq[a * n + b];
        for a in 0..n {
            if !at(a, a) {
                return Err(LatticeError::NotAPartialOrder);
            }
            for b in 0..n {
                if a != b && at(a, b) && at(b, a) {
                    return Err(LatticeError::NotAPartialOrder);
                }
                for c in 0..n {
                    if at(a, b) && at(b, c) && !at(a, c) {
                        return Err(LatticeError::NotAPartialOrder);
                    }
                }
            }
        }

        let bottom = (0..n)
            .find(|&r| (0..n).all(|x| at(r, x)))
            .ok_or(LatticeError::NoBounds(Bound::Bottom))?;
        let top = (0..n)
            .find(|&r| (0..n).all(|x| at(x, r)))
            .ok_or(LatticeError::NoBounds(Bound::Top))?;

        let mut join = vec![0usize; n * n];
        let mut meet = vec![0usize; n * n];
        for a in 0..n {
            for b in 0..n {
                join[a * n + b] = Self::lub(n, &leq, a, b).ok_or(LatticeError::NotALattice {
                    a,
                    b,
                    op: LatticeOp::Join,
                })?;
                meet[a * n + b] = Self::glb(n, &leq, a, b).ok_or(LatticeError::NotALattice {
                    a,
                    b,
                    op: LatticeOp::Meet,
                })?;
            }
        }

        let lat = Lattice {
            n,
            leq,
            join,
            meet,
            bottom,
            top,
        };
        lat.verify_identities();
        Ok(lat)
    }

    fn lub(n: usize, leq: &[bool], a: usize, b: usize) -> Option<usize> {
        (0..n).find(|&m| {
            leq[a * n + m]
                && leq[b * n + m]
                && (0..n).all(|c| !(leq[a * n + c] && leq[b * n + c]) || leq[m * n + c])
        })
    }

    fn glb(n: usize, leq: &[bool], a: usize, b: usize) -> Option<usize> {
        (0..n).find(|&m| {
            leq[m * n + a]
                && leq[m * n + b]
                && (0..n).all(|c| !(leq[c * n + a] && leq[c * n + b]) || leq[c * n + m])
        })
    }

    /// Exhaustive check of the lattice identities; a failure is a construction bug.
    fn verify_identities(&self) {
        let n = self.n;
        for a in 0..n {
            assert_eq!(self.join(a, a), a, "join not idempotent");
            assert_eq!(self.meet(a, a), a, "meet not idempotent");
            assert!(self.leq(self.bottom, a) && self.leq(a, self.top));
            for b in 0..n {
                assert_eq!(self.join(a, b), self.join(b, a));
                assert_eq!(self.meet(a, b), self.meet(b, a));
                assert_eq!(self.join(a, self.meet(a, b)), a, "absorption failed");
                assert_eq!(self.meet(a, self.join(a, b)), a, "absorption failed");
                for c in 0..n {
                    assert_eq!(
                        self.join(a, self.join(b, c)),
                        self.join(self.join(a, b), c),
                        "join not associative"
                    );
                    assert_eq!(
                        self.meet(a, self.meet(b, c)),
                        self.meet(self.meet(a, b), c),
                        "meet not associative"
                    );
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.n + b]
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.n + b]
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.n + b]
    }

    /// Join over a set; the empty join is the bottom element.
    pub fn join_set(&self, s: ElemSet) -> usize {
        s.iter().fold(self.bottom, |acc, e| self.join(acc, e))
    }

    /// Meet over a set; the empty meet is the top element.
    pub fn meet_set(&self, s: ElemSet) -> usize {
        s.iter().fold(self.top, |acc, e| self.meet(acc, e))
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    pub fn carrier(&self) -> ElemSet {
        ElemSet::full(self.n)
    }

    /// The downset `{b : b <= a}` as a set.
    pub fn downset(&self, a: usize) -> ElemSet {
        ElemSet::from_elems(self.n, (0..self.n).filter(|&b| self.leq(b, a)))
    }

    /// Recomputes the cover relation from the order.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in 0..self.n {
                if self.lt(a, b) && !(0..self.n).any(|c| self.lt(a, c) && self.lt(c, b)) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// First triple violating `x <= z  =>  x v (y ^ z) = (x v y) ^ z`, if any.
    pub fn modular_violation(&self) -> Option<ModularityViolation> {
        for x in 0..self.n {
            for y in 0..self.n {
                for z in 0..self.n {
                    if self.leq(x, z)
                        && self.join(x, self.meet(y, z)) != self.meet(self.join(x, y), z)
                    {
                        return Some(ModularityViolation { x, y, z });
                    }
                }
            }
        }
        None
    }

    pub fn is_modular(&self) -> bool {
        self.modular_violation().is_none()
    }

    /// Smallest superset of `seed` closed under binary join and meet.
    pub fn sublattice_closure(&self, seed: ElemSet) -> ElemSet {
        assert!(!seed.is_empty(), "seed must be nonempty");
        assert_eq!(seed.width(), self.n);
        let mut set = seed;
        loop {
            let mut next = set;
            for a in set.iter() {
                for b in set.iter() {
                    next.insert(self.join(a, b));
                    next.insert(self.meet(a, b));
                }
            }
            if next == set {
                return set;
            }
            set = next;
        }
    }

    /// A complete sublattice must be closed under binary join and meet and
    /// contain both bounds: closure under arbitrary subsets includes the
    /// empty one, whose meet and join are the top and bottom of the ambient
    /// lattice.
    pub fn is_complete_sublattice(&self, k: &ElemSet) -> bool {
        assert_eq!(k.width(), self.n);
        if k.is_empty() || !k.contains(self.bottom) || !k.contains(self.top) {
            return false;
        }
        for a in k.iter() {
            for b in k.iter() {
                if !k.contains(self.join(a, b)) || !k.contains(self.meet(a, b)) {
                    return false;
                }
            }
        }
        true
    }

    /// Every complete sublattice, in ascending bit order.
    pub fn complete_sublattices(&self) -> Vec<ElemSet> {
        let base = ElemSet::from_elems(self.n, [self.bottom, self.top]);
        base.supersets()
            .filter(|k| self.is_complete_sublattice(k))
            .collect()
    }

    /// The lattice induced on a complete sublattice, with the map back to
    /// ambient indices. Joins and meets agree with the ambient ones.
    pub fn induced_sublattice(&self, k: &ElemSet) -> (Lattice, Vec<usize>) {
        assert!(
            self.is_complete_sublattice(k),
            "subset is not a complete sublattice"
        );
        let elems: Vec<usize> = k.iter().collect();
        let m = elems.len();
        let mut leq = vec![false; m * m];
        for (i, &a) in elems.iter().enumerate() {
            for (j, &b) in elems.iter().enumerate() {
                leq[i * m + j] = self.leq(a, b);
            }
        }
        let sub = Lattice::from_leq(m, leq).expect("complete sublattice is a lattice");
        for i in 0..m {
            for j in 0..m {
                assert_eq!(
                    elems[sub.join(i, j)],
                    self.join(elems[i], elems[j]),
                    "sublattice join disagrees with ambient join"
                );
                assert_eq!(
                    elems[sub.meet(i, j)],
                    self.meet(elems[i], elems[j]),
                    "sublattice meet disagrees with ambient meet"
                );
            }
        }
        (sub, elems)
    }

    pub fn is_ideal(&self, s: &ElemSet) -> bool {
        assert_eq!(s.width(), self.n);
        if s.is_empty() {
            return false;
        }
        for a in s.iter() {
            for b in 0..self.n {
                if self.leq(b, a) && !s.contains(b) {
                    return false;
                }
            }
            for b in s.iter() {
                if !s.contains(self.join(a, b)) {
                    return false;
                }
            }
        }
        true
    }

    /// The principal ideal of `a`: its downset.
    pub fn principal_ideal(&self, a: usize) -> Ideal {
        assert!(a < self.n);
        Ideal {
            members: self.downset(a),
        }
    }

    /// The lattice of all ideals ordered by inclusion. In a finite lattice
    /// every ideal is principal, so the result is isomorphic to the lattice
    /// itself; the isomorphism is returned and verified.
    pub fn ideals(&self) -> IdealLattice {
        let ideals: Vec<ElemSet> = ElemSet::all_subsets(self.n)
            .filter(|s| self.is_ideal(s))
            .collect();
        let m = ideals.len();
        let mut leq = vec![false; m * m];
        for i in 0..m {
            for j in 0..m {
                leq[i * m + j] = ideals[i].is_subset_of(&ideals[j]);
            }
        }
        let lattice = Lattice::from_leq(m, leq).expect("ideal family forms a lattice");

        assert_eq!(m, self.n, "a finite lattice has one ideal per element");
        let principal_index: Vec<usize> = (0..self.n)
            .map(|a| {
                let down = self.downset(a);
                ideals
                    .iter()
                    .position(|i| *i == down)
                    .expect("principal ideal missing from ideal family")
            })
            .collect();
        // The principal ideal map is an isomorphism of lattices.
        for a in 0..self.n {
            for b in 0..self.n {
                assert_eq!(
                    principal_index[self.join(a, b)],
                    lattice.join(principal_index[a], principal_index[b]),
                    "principal ideal map does not preserve join"
                );
                assert_eq!(
                    principal_index[self.meet(a, b)],
                    lattice.meet(principal_index[a], principal_index[b]),
                    "principal ideal map does not preserve meet"
                );
            }
        }
        IdealLattice {
            lattice,
            ideals,
            principal_index,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModularityViolation {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

impl fmt::Display for ModularityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x={} y={} z={}", self.x, self.y, self.z)
    }
}

/// Nonempty, downward-closed, join-closed subset of a lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ideal {
    members: ElemSet,
}

impl Ideal {
    pub fn members(&self) -> ElemSet {
        self.members
    }
}

/// The ideal lattice of a finite lattice together with its witness data.
pub struct IdealLattice {
    pub lattice: Lattice,
    /// Ideals as subsets, index-aligned with `lattice`, ascending bit order.
    pub ideals: Vec<ElemSet>,
    /// For each ambient element, the index of its principal ideal.
    pub principal_index: Vec<usize>,
}

/// A lattice paired with a display name, for corpora and target lists.
#[derive(Debug, Clone)]
pub struct NamedLattice {
    pub name: String,
    pub lattice: Lattice,
}

/// Join- and meet-preserving map between two lattices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeHom {
    pub map: Vec<usize>,
    pub preserves_bounds: bool,
}

impl LatticeHom {
    pub fn identity(l: &Lattice) -> Self {
        LatticeHom {
            map: (0..l.n()).collect(),
            preserves_bounds: true,
        }
    }

    pub fn is_bijective(&self, target: &Lattice) -> bool {
        let mut seen = vec![false; target.n()];
        for &v in &self.map {
            if v >= target.n() || seen[v] {
                return false;
            }
            seen[v] = true;
        }
        self.map.len() == target.n()
    }

    /// Re-checks preservation of join and meet on every pair.
    pub fn verify(&self, source: &Lattice, target: &Lattice) -> bool {
        if self.map.len() != source.n() || self.map.iter().any(|&v| v >= target.n()) {
            return false;
        }
        for a in 0..source.n() {
            for b in 0..source.n() {
                if self.map[source.join(a, b)] != target.join(self.map[a], self.map[b])
                    || self.map[source.meet(a, b)] != target.meet(self.map[a], self.map[b])
                {
                    return false;
                }
            }
        }
        if self.preserves_bounds
            && (self.map[source.bottom()] != target.bottom()
                || self.map[source.top()] != target.top())
        {
            return false;
        }
        true
    }
}

/// Backtracking enumeration over images of elements in ascending index
/// order, failing fast on any join or meet constraint already determined by
/// the assigned prefix.
fn for_each_hom(
    source: &Lattice,
    target: &Lattice,
    require_bounds: bool,
    visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
) {
    fn rec(
        source: &Lattice,
        target: &Lattice,
        require_bounds: bool,
        assign: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let i = assign.len();
        if i == source.n() {
            return visit(assign);
        }
        'cand: for c in 0..target.n() {
            if require_bounds
                && ((i == source.bottom() && c != target.bottom())
                    || (i == source.top() && c != target.top()))
            {
                continue;
            }
            // A constraint triple (j, k, j op k) becomes fully assigned when
            // its largest member reaches i: either the pair involves i, or
            // the operation result is i itself.
            let value = |x: usize, assign: &[usize]| if x == i { c } else { assign[x] };
            for j in 0..=i {
                for k in j..=i {
                    let jv = source.join(j, k);
                    if jv <= i
                        && (k == i || jv == i)
                        && target.join(value(j, assign), value(k, assign)) != value(jv, assign)
                    {
                        continue 'cand;
                    }
                    let mv = source.meet(j, k);
                    if mv <= i
                        && (k == i || mv == i)
                        && target.meet(value(j, assign), value(k, assign)) != value(mv, assign)
                    {
                        continue 'cand;
                    }
                }
            }
            assign.push(c);
            let flow = rec(source, target, require_bounds, assign, visit);
            assign.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }
    let mut assign = Vec::with_capacity(source.n());
    let _ = rec(source, target, require_bounds, &mut assign, visit);
}

/// Every join- and meet-preserving map from `source` to `target`, in
/// deterministic lexicographic order. With `require_bounds`, only maps
/// sending bottom to bottom and top to top are produced.
pub fn enumerate_lattice_homs(
    source: &Lattice,
    target: &Lattice,
    require_bounds: bool,
) -> Vec<LatticeHom> {
    let mut out = Vec::new();
    for_each_hom(source, target, require_bounds, &mut |map| {
        out.push(LatticeHom {
            map: map.to_vec(),
            preserves_bounds: map[source.bottom()] == target.bottom()
                && map[source.top()] == target.top(),
        });
        ControlFlow::Continue(())
    });
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EpiOutcome {
    NotEpic,
    EpicRelativeToTargets,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeEpiWitness {
    pub target_index: usize,
    pub f: LatticeHom,
    pub g: LatticeHom,
}

/// What was examined before the verdict: targets by name, homomorphisms per
/// target, and how many agreeing pairs were compared.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpiCertificate {
    pub targets: Vec<String>,
    pub homs_examined: Vec<usize>,
    pub pairs_checked: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeEpiVerdict {
    pub outcome: EpiOutcome,
    pub witness: Option<LatticeEpiWitness>,
    pub certificate: EpiCertificate,
}

/// Tests whether the inclusion of the sublattice `k` is right-cancellable
/// relative to an explicit, finite list of targets: for each target, every
/// pair of bound-preserving homomorphisms agreeing on `k` must agree
/// everywhere. The verdict is always relative to the given list; epicness
/// against a whole variety is not decided here.
pub fn is_epic_sublattice_bounded(
    lattice: &Lattice,
    k: &ElemSet,
    targets: &[NamedLattice],
) -> LatticeEpiVerdict {
    assert!(
        !k.is_empty()
            && k.iter().all(|a| k
                .iter()
                .all(|b| k.contains(lattice.join(a, b)) && k.contains(lattice.meet(a, b)))),
        "k must be a sublattice"
    );
    let k_elems: Vec<usize> = k.iter().collect();
    let mut certificate = EpiCertificate {
        targets: targets.iter().map(|t| t.name.clone()).collect(),
        homs_examined: Vec::new(),
        pairs_checked: Vec::new(),
    };
    for (t_idx, target) in targets.iter().enumerate() {
        let mut groups: HashMap<Vec<usize>, LatticeHom> = HashMap::new();
        let mut homs = 0usize;
        let mut pairs = 0u64;
        let mut witness = None;
        for_each_hom(lattice, &target.lattice, true, &mut |map| {
            homs += 1;
            let restriction: Vec<usize> = k_elems.iter().map(|&e| map[e]).collect();
            let hom = LatticeHom {
                map: map.to_vec(),
                preserves_bounds: true,
            };
            if let Some(prev) = groups.get(&restriction) {
                pairs += 1;
                witness = Some(LatticeEpiWitness {
                    target_index: t_idx,
                    f: prev.clone(),
                    g: hom,
                });
                return ControlFlow::Break(());
            }
            groups.insert(restriction, hom);
            ControlFlow::Continue(())
        });
        certificate.homs_examined.push(homs);
        certificate.pairs_checked.push(pairs);
        if let Some(w) = witness {
            return LatticeEpiVerdict {
                outcome: EpiOutcome::NotEpic,
                witness: Some(w),
                certificate,
            };
        }
    }
    LatticeEpiVerdict {
        outcome: EpiOutcome::EpicRelativeToTargets,
        witness: None,
        certificate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn two_chain_tables_forced() {
        let l = Lattice::from_covers(2, &[[0, 1]]).unwrap();
        assert_eq!(l.join(0, 1), 1);
        assert_eq!(l.meet(0, 1), 0);
        assert_eq!((l.bottom(), l.top()), (0, 1));
    }

    #[test]
    fn m3_tables_from_scan() {
        let l = corpus::m3();
        // Exhaustive lub/glb scan: distinct atoms join to top, meet to bottom.
        for a in 1..=3 {
            for b in 1..=3 {
                if a != b {
                    assert_eq!(l.join(a, b), 4);
                    assert_eq!(l.meet(a, b), 0);
                }
            }
        }
    }

    #[test]
    fn cycle_detected() {
        assert_eq!(
            Lattice::from_covers(2, &[[0, 1], [1, 0]]),
            Err(LatticeError::CycleInCovers { element: 0 })
        );
        assert!(matches!(
            Lattice::from_covers(2, &[[1, 1]]),
            Err(LatticeError::CycleInCovers { element: 1 })
        ));
    }

    #[test]
    fn non_lattice_rejected() {
        // Two maximal elements: no top, and {1,2} has no join.
        let err = Lattice::from_covers(3, &[[0, 1], [0, 2]]).unwrap_err();
        assert!(matches!(
            err,
            LatticeError::NotALattice { .. } | LatticeError::NoBounds(_)
        ));
        // Two minimal elements: the bottom is missing.
        assert_eq!(
            Lattice::from_covers(3, &[[0, 2], [1, 2]]),
            Err(LatticeError::NoBounds(Bound::Bottom))
        );
    }

    #[test]
    fn degenerate_singleton_accepted() {
        let l = Lattice::from_covers(1, &[]).unwrap();
        assert_eq!(l.bottom(), l.top());
        assert!(l.is_modular());
        assert_eq!(l.ideals().ideals.len(), 1);
    }

    #[test]
    fn cap_enforced() {
        let covers: Vec<[usize; 2]> = (0..16).map(|i| [i, i + 1]).collect();
        assert_eq!(
            Lattice::from_covers(17, &covers),
            Err(LatticeError::TooLarge { n: 17, cap: 16 })
        );
        assert!(Lattice::from_covers_with_cap(17, &covers, 32).is_ok());
    }

    #[test]
    fn modularity_verdicts() {
        assert!(corpus::m3().is_modular());
        for n in 1..=5 {
            assert!(corpus::chain(n).is_modular());
        }
        let v = corpus::n5().modular_violation().unwrap();
        assert_eq!((v.x, v.y, v.z), (1, 2, 3));
        // Re-check the witness against the law directly.
        let l = corpus::n5();
        assert!(l.leq(v.x, v.z));
        assert_ne!(l.join(v.x, l.meet(v.y, v.z)), l.meet(l.join(v.x, v.y), v.z));
    }

    /// Independent oracle: both dual modularity identities over all triples.
    fn modular_by_dual_identities(l: &Lattice) -> bool {
        l.elements().all(|x| {
            l.elements().all(|y| {
                l.elements().all(|z| {
                    l.join(l.meet(x, y), l.meet(x, z)) == l.meet(x, l.join(y, l.meet(x, z)))
                        && l.meet(l.join(x, y), l.join(x, z)) == l.join(x, l.meet(y, l.join(x, z)))
                })
            })
        })
    }

    #[test]
    fn modularity_agrees_with_dual_identities() {
        for entry in corpus::bundled() {
            assert_eq!(
                entry.lattice.is_modular(),
                modular_by_dual_identities(&entry.lattice),
                "oracle disagreement on {}",
                entry.name
            );
        }
    }

    #[test]
    fn sublattice_closure_cases() {
        let m3 = corpus::m3();
        assert_eq!(
            m3.sublattice_closure(ElemSet::singleton(5, 0)),
            ElemSet::singleton(5, 0)
        );
        assert_eq!(
            m3.sublattice_closure(ElemSet::from_elems(5, [1, 2])),
            ElemSet::from_elems(5, [0, 1, 2, 4])
        );
        assert_eq!(m3.sublattice_closure(m3.carrier()), m3.carrier());
    }

    proptest::proptest! {
        #[test]
        fn closure_is_an_idempotent_monotone_hull(
            idx in 0usize..12,
            seed_bits in 1u64..512,
            extra_bits in 0u64..512,
        ) {
            let l = corpus::CORPUS[idx].lattice();
            let mask = l.carrier().bits();
            let seed = ElemSet::from_bits(l.n(), seed_bits & mask);
            if seed.is_empty() {
                return Ok(());
            }
            let closed = l.sublattice_closure(seed);
            proptest::prop_assert!(seed.is_subset_of(&closed));
            proptest::prop_assert_eq!(l.sublattice_closure(closed), closed);
            let bigger = seed.union(ElemSet::from_bits(l.n(), extra_bits & mask));
            proptest::prop_assert!(closed.is_subset_of(&l.sublattice_closure(bigger)));
        }
    }

    #[test]
    fn complete_sublattice_cases() {
        let c3 = corpus::chain(3);
        assert!(c3.is_complete_sublattice(&ElemSet::from_elems(3, [0, 2])));
        assert!(!c3.is_complete_sublattice(&ElemSet::from_elems(3, [0, 1])));
        assert!(c3.is_complete_sublattice(&c3.carrier()));
        assert_eq!(c3.complete_sublattices().len(), 2);
        assert_eq!(corpus::m3().complete_sublattices().len(), 8);
    }

    #[test]
    fn ideal_counts() {
        assert_eq!(corpus::chain(2).ideals().ideals.len(), 2);
        assert_eq!(corpus::m3().ideals().ideals.len(), 5);
    }

    #[test]
    fn principal_ideals() {
        let c3 = corpus::chain(3);
        assert_eq!(c3.principal_ideal(0).members(), ElemSet::singleton(3, 0));
        assert_eq!(c3.principal_ideal(2).members(), c3.carrier());
        assert_eq!(
            c3.principal_ideal(1).members(),
            ElemSet::from_elems(3, [0, 1])
        );
        assert!(c3.is_ideal(&c3.principal_ideal(1).members()));
    }

    #[test]
    fn ideal_lattice_isomorphic_over_corpus() {
        for entry in corpus::bundled() {
            let id = entry.lattice.ideals();
            assert_eq!(id.ideals.len(), entry.lattice.n(), "{}", entry.name);
        }
    }

    #[test]
    fn hom_counts() {
        let c2 = corpus::chain(2);
        let c3 = corpus::chain(3);
        let c1 = corpus::chain(1);
        assert_eq!(enumerate_lattice_homs(&c2, &c2, true).len(), 1);
        assert_eq!(enumerate_lattice_homs(&c3, &c3, true).len(), 3);
        assert_eq!(enumerate_lattice_homs(&c1, &c3, false).len(), 3);
        for hom in enumerate_lattice_homs(&c3, &c3, false) {
            assert!(hom.verify(&c3, &c3));
        }
    }

    /// Brute-force oracle: every map of the carrier, filtered by the
    /// preservation equations.
    fn brute_force_homs(source: &Lattice, target: &Lattice, bounds: bool) -> Vec<Vec<usize>> {
        let (n1, n2) = (source.n(), target.n());
        let mut out = Vec::new();
        let mut map = vec![0usize; n1];
        loop {
            let preserves = (0..n1).all(|a| {
                (0..n1).all(|b| {
                    map[source.join(a, b)] == target.join(map[a], map[b])
                        && map[source.meet(a, b)] == target.meet(map[a], map[b])
                })
            });
            let bounds_ok = !bounds
                || (map[source.bottom()] == target.bottom() && map[source.top()] == target.top());
            if preserves && bounds_ok {
                out.push(map.clone());
            }
            // Odometer over all n2^n1 maps, most significant index first.
            let mut pos = n1;
            while pos > 0 {
                pos -= 1;
                map[pos] += 1;
                if map[pos] < n2 {
                    break;
                }
                map[pos] = 0;
                if pos == 0 {
                    return out;
                }
            }
        }
    }

    #[test]
    fn enumerator_matches_brute_force() {
        let pairs = [
            ("chain3", "chain3"),
            ("chain4", "chain3"),
            ("chain3", "bool2"),
            ("bool2", "bool2"),
            ("m3", "chain3"),
            ("chain5", "m3"),
            ("m3", "m3"),
        ];
        for (src_name, tgt_name) in pairs {
            let src = corpus::by_name(src_name).unwrap();
            let tgt = corpus::by_name(tgt_name).unwrap();
            for bounds in [false, true] {
                let expected = brute_force_homs(&src, &tgt, bounds);
                let found: Vec<Vec<usize>> = enumerate_lattice_homs(&src, &tgt, bounds)
                    .into_iter()
                    .map(|h| h.map)
                    .collect();
                assert_eq!(
                    found, expected,
                    "{src_name} -> {tgt_name} (bounds: {bounds})"
                );
            }
        }
    }

    #[test]
    fn bijective_homs_form_group() {
        let m3 = corpus::m3();
        let bij: Vec<LatticeHom> = enumerate_lattice_homs(&m3, &m3, false)
            .into_iter()
            .filter(|h| h.is_bijective(&m3))
            .collect();
        // Automorphisms of the diamond: the symmetric group on its atoms.
        assert_eq!(bij.len(), 6);
        let maps: Vec<&Vec<usize>> = bij.iter().map(|h| &h.map).collect();
        assert!(maps.contains(&&(0..5).collect::<Vec<_>>()));
        for f in &bij {
            for g in &bij {
                let comp: Vec<usize> = (0..5).map(|x| f.map[g.map[x]]).collect();
                assert!(maps.contains(&&comp), "composition left the set");
            }
            let inv: Vec<usize> = (0..5)
                .map(|y| f.map.iter().position(|&v| v == y).unwrap())
                .collect();
            assert!(maps.contains(&&inv), "inverse left the set");
        }
    }

    #[test]
    fn epi_three_chain_not_epic() {
        let c3 = corpus::chain(3);
        let k = ElemSet::from_elems(3, [0, 2]);
        let targets = vec![NamedLattice {
            name: "chain3".into(),
            lattice: c3.clone(),
        }];
        let verdict = is_epic_sublattice_bounded(&c3, &k, &targets);
        assert_eq!(verdict.outcome, EpiOutcome::NotEpic);
        let w = verdict.witness.unwrap();
        assert_eq!(w.f.map, vec![0, 0, 2]);
        assert_eq!(w.g.map, vec![0, 1, 2]);
        assert!(w.f.verify(&c3, &c3) && w.g.verify(&c3, &c3));
    }

    #[test]
    fn epi_three_chain_against_default_class() {
        let c3 = corpus::chain(3);
        let k = ElemSet::from_elems(3, [0, 2]);
        let verdict = is_epic_sublattice_bounded(&c3, &k, &corpus::default_lattice_targets());
        assert_eq!(verdict.outcome, EpiOutcome::NotEpic);
        let w = verdict.witness.unwrap();
        // The two-chain already distinguishes: both bound-preserving maps
        // agree on the bounds and differ at the middle element.
        assert_eq!(verdict.certificate.targets[w.target_index], "chain2");
    }

    #[test]
    fn epi_diamond_bounds_not_epic() {
        // All six diamond automorphisms fix the bounds, so any two of them
        // witness failure against the diamond itself.
        let m3 = corpus::m3();
        let k = ElemSet::from_elems(5, [0, 4]);
        let verdict = is_epic_sublattice_bounded(
            &m3,
            &k,
            &[NamedLattice {
                name: "m3".into(),
                lattice: m3.clone(),
            }],
        );
        assert_eq!(verdict.outcome, EpiOutcome::NotEpic);
        let w = verdict.witness.unwrap();
        assert!(w.f.verify(&m3, &m3) && w.g.verify(&m3, &m3));
        assert!(w.f.is_bijective(&m3) && w.g.is_bijective(&m3));
    }

    #[test]
    fn epi_full_sublattice_is_epic() {
        let c2 = corpus::chain(2);
        let targets = vec![
            NamedLattice {
                name: "chain2".into(),
                lattice: c2.clone(),
            },
            NamedLattice {
                name: "chain3".into(),
                lattice: corpus::chain(3),
            },
        ];
        let verdict = is_epic_sublattice_bounded(&c2, &c2.carrier(), &targets);
        assert_eq!(verdict.outcome, EpiOutcome::EpicRelativeToTargets);
        assert_eq!(verdict.certificate.targets.len(), 2);
    }
}
