//! Atom maps, their unique extensions to embeddings, the embedding induced
//! by a complete sublattice, generated subalgebra pairs, homomorphism
//! enumeration for atomic algebras, and bounded epi testing.

use std::collections::HashMap;
use std::fmt;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frame::TernaryFrame;
use crate::lattice::{EpiCertificate, EpiOutcome, Lattice, LatticeHom, ModularityViolation};
use crate::monoid::{BooleanMonoid, CheckGates, EquivalenceLattice, MonoidError, Subalgebra};
use crate::set::ElemSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphError {
    #[error("lattice is not modular ({0})")]
    NotModular(ModularityViolation),
    #[error("subset is not a complete sublattice")]
    NotCompleteSublattice,
    #[error("atom-map conditions failed")]
    ConditionsFailed(Box<AtomMapReport>),
    #[error("extension is not an embedding: {0}")]
    ExtensionInvalid(String),
    #[error("embedding does not send the principal ideal of element {element} correctly")]
    CommutationMismatch { element: usize },
    #[error("source and target must be abelian")]
    NotAbelian,
    #[error("element {0} is not in the subalgebra")]
    NotInSubalgebra(ElemSet),
    #[error("mismatch found: {0}")]
    MismatchFound(String),
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
}

/// Map from the atoms of an atomic algebra into the elements of another.
#[derive(Debug, Clone)]
pub struct AtomMap {
    pub source: BooleanMonoid,
    pub target: BooleanMonoid,
    /// Image of each source atom, indexed by atom.
    pub images: Vec<ElemSet>,
}

/// Per-condition verdicts for an atom map, with the first counterexample
/// for each failing condition. The fusion condition is checked one
/// inclusion at a time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomMapReport {
    /// Source atom whose image is zero, if any.
    pub zero_image: Option<usize>,
    /// Pair of source atoms with overlapping images, if any.
    pub overlap: Option<(usize, usize)>,
    /// Whether the images join to the top of the target.
    pub covers: bool,
    /// Whether the target identity is the join of the images of the atoms
    /// below the source identity.
    pub identity_matches: bool,
    /// First atom pair where the fused images exceed the image of the fusion.
    pub fusion_left_to_right: Option<(usize, usize)>,
    /// First atom pair where the image of the fusion exceeds the fused images.
    pub fusion_right_to_left: Option<(usize, usize)>,
}

impl AtomMapReport {
    pub fn condition1(&self) -> bool {
        self.zero_image.is_none() && self.overlap.is_none() && self.covers
    }

    pub fn condition2(&self) -> bool {
        self.identity_matches
    }

    pub fn condition3(&self) -> bool {
        self.fusion_left_to_right.is_none() && self.fusion_right_to_left.is_none()
    }

    pub fn all_pass(&self) -> bool {
        self.condition1() && self.condition2() && self.condition3()
    }
}

impl fmt::Display for AtomMapReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = |v: bool| if v { "pass" } else { "FAIL" };
        writeln!(
            f,
            "condition 1 (nonzero, disjoint, covering): {}",
            verdict(self.condition1())
        )?;
        writeln!(
            f,
            "condition 2 (identity matches):            {}",
            verdict(self.condition2())
        )?;
        writeln!(
            f,
            "condition 3 (fusion of images):            {}",
            verdict(self.condition3())
        )
    }
}

/// Verifies the three conditions an atom map must satisfy to extend to a
/// complete embedding: images nonzero, mutually disjoint, and joining to
/// the top; the target identity recovered from the atoms below the source
/// identity; and the fusion of two images equal to the join of the images
/// of the atoms below the fusion, both inclusions checked separately.
pub fn check_atom_map_conditions(map: &AtomMap) -> AtomMapReport {
    let m = map.source.atoms();
    let zero_image = (0..m).find(|&u| map.images[u].is_empty());
    let mut overlap = None;
    'overlap: for u in 0..m {
        for v in u + 1..m {
            if !map.images[u].is_disjoint_from(&map.images[v]) {
                overlap = Some((u, v));
                break 'overlap;
            }
        }
    }
    let join_all = map
        .images
        .iter()
        .fold(map.target.zero(), |acc, &img| acc.union(img));
    let covers = join_all == map.target.top();

    let identity_join = map
        .source
        .identity()
        .iter()
        .fold(map.target.zero(), |acc, u| acc.union(map.images[u]));
    let identity_matches = identity_join == map.target.identity();

    let mut fusion_left_to_right = None;
    let mut fusion_right_to_left = None;
    for u in 0..m {
        for v in 0..m {
            let fused_images = map.target.fuse(map.images[u], map.images[v]);
            let image_of_fusion = map
                .source
                .fusion_atom(u, v)
                .iter()
                .fold(map.target.zero(), |acc, w| acc.union(map.images[w]));
            if fusion_left_to_right.is_none() && !fused_images.is_subset_of(&image_of_fusion) {
                fusion_left_to_right = Some((u, v));
            }
            if fusion_right_to_left.is_none() && !image_of_fusion.is_subset_of(&fused_images) {
                fusion_right_to_left = Some((u, v));
            }
        }
    }
    AtomMapReport {
        zero_image,
        overlap,
        covers,
        identity_matches,
        fusion_left_to_right,
        fusion_right_to_left,
    }
}

/// Homomorphism between atomic algebras, tabulated on an explicit domain.
/// The domain is sorted by ascending bit value; for full-algebra maps it is
/// the whole carrier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaHom {
    pub domain: Vec<ElemSet>,
    pub images: Vec<ElemSet>,
}

impl RaHom {
    pub fn image_of(&self, e: &ElemSet) -> Option<ElemSet> {
        self.domain
            .binary_search_by_key(&e.bits(), ElemSet::bits)
            .ok()
            .map(|i| self.images[i])
    }

    pub fn is_identity(&self) -> bool {
        self.domain == self.images
    }

    pub fn is_injective(&self) -> bool {
        let mut seen: Vec<u64> = self.images.iter().map(ElemSet::bits).collect();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    /// Re-checks the homomorphism equations over the whole tabulated domain,
    /// which must be closed under the operations of `source`.
    pub fn verify(&self, source: &BooleanMonoid, target: &BooleanMonoid) -> bool {
        if self.domain.len() != self.images.len() {
            return false;
        }
        let lookup = |e: &ElemSet| self.image_of(e);
        match lookup(&source.identity()) {
            Some(img) if img == target.identity() => {}
            _ => return false,
        }
        for (i, &x) in self.domain.iter().enumerate() {
            let fx = self.images[i];
            match lookup(&x.complement()) {
                Some(img) if img == fx.complement() => {}
                _ => return false,
            }
            match lookup(&source.converse(x)) {
                Some(img) if img == target.converse(fx) => {}
                _ => return false,
            }
            for (j, &y) in self.domain.iter().enumerate() {
                let fy = self.images[j];
                match lookup(&x.union(y)) {
                    Some(img) if img == fx.union(fy) => {}
                    _ => return false,
                }
                match lookup(&source.fuse(x, y)) {
                    Some(img) if img == target.fuse(fx, fy) => {}
                    _ => return false,
                }
            }
        }
        true
    }
}

/// Extends a passing atom map to the whole source algebra by joining atom
/// images, then verifies that the result is injective and preserves every
/// operation: complement, converse, and the identity on all elements, and
/// union and fusion on all pairs when the source fits the pair gate.
pub fn extend_atom_map(map: &AtomMap, gates: &CheckGates) -> Result<RaHom, MorphError> {
    let report = check_atom_map_conditions(map);
    if !report.all_pass() {
        return Err(MorphError::ConditionsFailed(Box::new(report)));
    }
    let m = map.source.atoms();
    let domain: Vec<ElemSet> = map.source.elements().collect();
    let images: Vec<ElemSet> = domain
        .iter()
        .map(|r| {
            r.iter()
                .fold(map.target.zero(), |acc, u| acc.union(map.images[u]))
        })
        .collect();
    let hom = RaHom { domain, images };

    if !hom.is_injective() {
        return Err(MorphError::ExtensionInvalid("not injective".into()));
    }
    if hom.image_of(&map.source.identity()) != Some(map.target.identity()) {
        return Err(MorphError::ExtensionInvalid(
            "identity not preserved".into(),
        ));
    }
    for (i, &x) in hom.domain.iter().enumerate() {
        let fx = hom.images[i];
        if hom.image_of(&x.complement()) != Some(fx.complement()) {
            return Err(MorphError::ExtensionInvalid(format!(
                "complement not preserved at {x}"
            )));
        }
        if hom.image_of(&map.source.converse(x)) != Some(map.target.converse(fx)) {
            return Err(MorphError::ExtensionInvalid(format!(
                "converse not preserved at {x}"
            )));
        }
    }
    if m <= gates.pair_atoms {
        for (i, &x) in hom.domain.iter().enumerate() {
            for (j, &y) in hom.domain.iter().enumerate() {
                let (fx, fy) = (hom.images[i], hom.images[j]);
                if hom.image_of(&x.union(y)) != Some(fx.union(fy)) {
                    return Err(MorphError::ExtensionInvalid(format!(
                        "union not preserved at {x}, {y}"
                    )));
                }
                if hom.image_of(&map.source.fuse(x, y)) != Some(map.target.fuse(fx, fy)) {
                    return Err(MorphError::ExtensionInvalid(format!(
                        "fusion not preserved at {x}, {y}"
                    )));
                }
            }
        }
    }
    Ok(hom)
}

/// The embedding data induced by a complete sublattice of a modular lattice:
/// an atom map from the complex algebra of the sublattice into the complex
/// algebra of the ambient lattice, together with the partition of the
/// ambient carrier by minimal covers.
#[derive(Debug, Clone)]
pub struct InclusionEmbedding {
    pub atom_map: AtomMap,
    /// The sublattice as a lattice in its own right.
    pub sub_lattice: Lattice,
    /// Sublattice index to ambient element.
    pub sub_elems: Vec<usize>,
    /// For each ambient element `x`, the least sublattice element above it.
    pub min_cover: Vec<usize>,
}

/// Builds the atom map sending the singleton of a sublattice element `a` to
/// the principal ideal of `a` in the ambient lattice minus the principal
/// ideals of the sublattice elements strictly below `a`. The minimal-cover
/// function `x -> meet of {b in K : x <= b}` is computed, its minimum
/// membership is asserted as a runtime check, and the images are verified
/// to partition the ambient carrier accordingly.
pub fn inclusion_atom_map(l: &Lattice, k: &ElemSet) -> Result<InclusionEmbedding, MorphError> {
    if let Some(v) = l.modular_violation() {
        return Err(MorphError::NotModular(v));
    }
    if !l.is_complete_sublattice(k) {
        return Err(MorphError::NotCompleteSublattice);
    }
    let (sub_lattice, sub_elems) = l.induced_sublattice(k);
    let source = BooleanMonoid::complex_algebra(&TernaryFrame::from_lattice(&sub_lattice))?;
    let target = BooleanMonoid::complex_algebra(&TernaryFrame::from_lattice(l))?;

    let n = l.n();
    let images: Vec<ElemSet> = sub_elems
        .iter()
        .map(|&a| {
            let mut img = l.downset(a);
            for &b in &sub_elems {
                if b != a && l.leq(b, a) {
                    img = img.minus(l.downset(b));
                }
            }
            img
        })
        .collect();

    let mut min_cover = Vec::with_capacity(n);
    for x in 0..n {
        let above = ElemSet::from_elems(n, sub_elems.iter().copied().filter(|&b| l.leq(x, b)));
        // The top belongs to K, so the filter is never empty.
        let a = l.meet_set(above);
        if !above.contains(a) {
            return Err(MorphError::InvariantViolated(format!(
                "meet of the covering filter of {x} is not its minimum"
            )));
        }
        min_cover.push(a);
    }
    for (x, &cover) in min_cover.iter().enumerate() {
        let owner = sub_elems
            .iter()
            .position(|&a| a == cover)
            .expect("minimal cover is a sublattice element");
        for (i, img) in images.iter().enumerate() {
            if img.contains(x) != (i == owner) {
                return Err(MorphError::InvariantViolated(format!(
                    "atom images do not partition the carrier at element {x}"
                )));
            }
        }
    }
    Ok(InclusionEmbedding {
        atom_map: AtomMap {
            source,
            target,
            images,
        },
        sub_lattice,
        sub_elems,
        min_cover,
    })
}

/// Replays the internal identities behind the fusion condition of the
/// inclusion embedding: whenever `R a b c` holds in the sublattice and `z`
/// lies in the image of `c`, the elements `x = (b v z) ^ a` and
/// `y = (a v z) ^ b` satisfy `R x y z` in the ambient lattice, and `a` and
/// `b` are the minimal covers of `x` and `y`. Returns the number of
/// instances checked.
pub fn verify_inclusion_identities(
    emb: &InclusionEmbedding,
    l: &Lattice,
) -> Result<u64, MorphError> {
    let kl = &emb.sub_lattice;
    let mut instances = 0u64;
    for ai in 0..kl.n() {
        for bi in 0..kl.n() {
            let ab = kl.join(ai, bi);
            for ci in 0..kl.n() {
                if kl.join(ai, ci) != ab || kl.join(bi, ci) != ab {
                    continue;
                }
                let (a, b) = (emb.sub_elems[ai], emb.sub_elems[bi]);
                for z in emb.atom_map.images[ci].iter() {
                    let x = l.meet(l.join(b, z), a);
                    let y = l.meet(l.join(a, z), b);
                    let xy = l.join(x, y);
                    if l.join(x, z) != xy || l.join(y, z) != xy {
                        return Err(MorphError::InvariantViolated(format!(
                            "frame relation fails at x={x} y={y} z={z}"
                        )));
                    }
                    if emb.min_cover[x] != a || emb.min_cover[y] != b {
                        return Err(MorphError::InvariantViolated(format!(
                            "minimal covers of x={x}, y={y} are not a={a}, b={b}"
                        )));
                    }
                    instances += 1;
                }
            }
        }
    }
    Ok(instances)
}

/// Checks that the extension of the inclusion atom map sends the principal
/// ideal of each sublattice element to its principal ideal in the ambient
/// lattice, as exact set equality.
pub fn verify_embedding_commutes(
    ext: &RaHom,
    emb: &InclusionEmbedding,
    l: &Lattice,
) -> Result<(), MorphError> {
    for (ki, &a) in emb.sub_elems.iter().enumerate() {
        let principal_sub = emb.sub_lattice.downset(ki);
        let image = ext
            .image_of(&principal_sub)
            .ok_or(MorphError::NotInSubalgebra(principal_sub))?;
        if image != l.downset(a) {
            return Err(MorphError::CommutationMismatch { element: a });
        }
    }
    Ok(())
}

/// The pair of subalgebras of the ambient complex algebra generated by the
/// principal ideals of the sublattice and of the whole lattice.
#[derive(Debug, Clone)]
pub struct UvPair {
    pub u: Subalgebra,
    pub v: Subalgebra,
    /// Whether `u` is a proper subalgebra of `v`.
    pub proper: bool,
}

/// Builds the subalgebra generated by the principal ideals of the
/// sublattice elements and the subalgebra generated by all principal
/// ideals, asserting containment and that properness transfers: the
/// sublattice is proper exactly when the generated subalgebra is.
pub fn build_uv(l: &Lattice, k: &ElemSet) -> Result<UvPair, MorphError> {
    if let Some(v) = l.modular_violation() {
        return Err(MorphError::NotModular(v));
    }
    if !l.is_complete_sublattice(k) {
        return Err(MorphError::NotCompleteSublattice);
    }
    let alg = BooleanMonoid::complex_algebra(&TernaryFrame::from_lattice(l))?;
    let k_gens: Vec<ElemSet> = k.iter().map(|a| l.downset(a)).collect();
    let v_gens: Vec<ElemSet> = (0..l.n()).map(|x| l.downset(x)).collect();
    let u = alg.subalgebra_generated(&k_gens);
    let v = alg.subalgebra_generated(&v_gens);
    if !u.is_contained_in(&v) {
        return Err(MorphError::InvariantViolated(
            "generated subalgebra left its ambient pair".into(),
        ));
    }
    let proper = u.len() < v.len();
    if proper != (k.len() < l.n()) {
        return Err(MorphError::InvariantViolated(
            "properness did not transfer from the sublattice".into(),
        ));
    }
    Ok(UvPair { u, v, proper })
}

/// An algebra paired with a display name, for epi-test target lists.
#[derive(Debug, Clone)]
pub struct NamedAlgebra {
    pub name: String,
    pub algebra: BooleanMonoid,
}

struct HomSearch<'a> {
    sub: &'a Subalgebra,
    target: &'a BooleanMonoid,
    values: Vec<Option<ElemSet>>,
    trail: Vec<usize>,
}

impl<'a> HomSearch<'a> {
    fn new(sub: &'a Subalgebra, target: &'a BooleanMonoid) -> Self {
        HomSearch {
            sub,
            target,
            values: vec![None; sub.len()],
            trail: Vec::new(),
        }
    }

    fn force(&mut self, idx: usize, val: ElemSet, queue: &mut Vec<usize>) -> bool {
        match self.values[idx] {
            Some(existing) => existing == val,
            None => {
                self.values[idx] = Some(val);
                self.trail.push(idx);
                queue.push(idx);
                true
            }
        }
    }

    /// Closes the partial assignment under the homomorphism equations:
    /// Boolean constraints first (complement, then union), then converse
    /// and fusion. Returns false on the first conflict.
    fn propagate(&mut self, mut queue: Vec<usize>) -> bool {
        let ambient = self.sub.ambient();
        while let Some(i) = queue.pop() {
            let x = self.sub.elements()[i];
            let vx = self.values[i].expect("queued elements are assigned");

            let complement_idx = self
                .sub
                .index_of(&x.complement())
                .expect("subalgebra is closed under complement");
            if !self.force(complement_idx, vx.complement(), &mut queue) {
                return false;
            }
            for j in 0..self.sub.len() {
                let Some(vy) = self.values[j] else { continue };
                let y = self.sub.elements()[j];
                let union_idx = self
                    .sub
                    .index_of(&x.union(y))
                    .expect("subalgebra is closed under union");
                if !self.force(union_idx, vx.union(vy), &mut queue) {
                    return false;
                }
            }

            let converse_idx = self
                .sub
                .index_of(&ambient.converse(x))
                .expect("subalgebra is closed under converse");
            if !self.force(converse_idx, self.target.converse(vx), &mut queue) {
                return false;
            }
            for j in 0..self.sub.len() {
                let Some(vy) = self.values[j] else { continue };
                let y = self.sub.elements()[j];
                let fwd_idx = self
                    .sub
                    .index_of(&ambient.fuse(x, y))
                    .expect("subalgebra is closed under fusion");
                if !self.force(fwd_idx, self.target.fuse(vx, vy), &mut queue) {
                    return false;
                }
                let rev_idx = self
                    .sub
                    .index_of(&ambient.fuse(y, x))
                    .expect("subalgebra is closed under fusion");
                if !self.force(rev_idx, self.target.fuse(vy, vx), &mut queue) {
                    return false;
                }
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let idx = self.trail.pop().unwrap();
            self.values[idx] = None;
        }
    }

    fn search(
        &mut self,
        generator_indices: &[usize],
        visit: &mut dyn FnMut(RaHom) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let Some((&gi, rest)) = generator_indices.split_first() else {
            if self.values.iter().any(Option::is_none) {
                // Unreachable for closed subalgebras; treat as a dead end.
                return ControlFlow::Continue(());
            }
            let hom = RaHom {
                domain: self.sub.elements().to_vec(),
                images: self.values.iter().map(|v| v.unwrap()).collect(),
            };
            return visit(hom);
        };
        if self.values[gi].is_some() {
            return self.search(rest, visit);
        }
        for candidate in self.target.elements() {
            let mark = self.trail.len();
            let mut queue = Vec::new();
            let ok = self.force(gi, candidate, &mut queue) && self.propagate(queue);
            let flow = if ok {
                self.search(rest, visit)
            } else {
                ControlFlow::Continue(())
            };
            self.undo_to(mark);
            flow?;
        }
        ControlFlow::Continue(())
    }
}

/// Streams every homomorphism from the subalgebra into the target algebra
/// extending the fixed partial map, by backtracking over generator images
/// in input order with candidates in ascending bit order, propagating the
/// homomorphism equations through the closure after each choice.
fn for_each_ra_hom(
    sub: &Subalgebra,
    target: &BooleanMonoid,
    fixed: &[(ElemSet, ElemSet)],
    visit: &mut dyn FnMut(RaHom) -> ControlFlow<()>,
) -> Result<(), MorphError> {
    let mut search = HomSearch::new(sub, target);
    let mut queue = Vec::new();
    let identity_idx = sub
        .index_of(&sub.ambient().identity())
        .expect("subalgebra contains the identity");
    let mut consistent = search.force(identity_idx, target.identity(), &mut queue);
    for &(elem, image) in fixed {
        let idx = sub
            .index_of(&elem)
            .ok_or(MorphError::NotInSubalgebra(elem))?;
        consistent = consistent && search.force(idx, image, &mut queue);
    }
    if consistent && search.propagate(queue) {
        let generator_indices: Vec<usize> = sub
            .generators()
            .iter()
            .map(|g| sub.index_of(g).expect("generators are in the closure"))
            .collect();
        let _ = search.search(&generator_indices, visit);
    }
    Ok(())
}

/// All homomorphisms extending `fixed`, in deterministic order.
pub fn enumerate_ra_homs(
    sub: &Subalgebra,
    target: &BooleanMonoid,
    fixed: &[(ElemSet, ElemSet)],
) -> Result<Vec<RaHom>, MorphError> {
    let mut out = Vec::new();
    for_each_ra_hom(sub, target, fixed, &mut |hom| {
        out.push(hom);
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaEpiWitness {
    pub target_index: usize,
    pub f: RaHom,
    pub g: RaHom,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaEpiVerdict {
    pub outcome: EpiOutcome,
    pub witness: Option<RaEpiWitness>,
    pub certificate: EpiCertificate,
}

/// Tests whether the inclusion of `u` in `v` is right-cancellable relative
/// to an explicit list of target algebras: for each target, every pair of
/// homomorphisms from `v` agreeing on `u` must agree everywhere. A witness
/// pair is returned on the first disagreement; otherwise the exhaustion
/// certificate lists what was examined. Verdicts are always relative.
pub fn is_epic_subalgebra_bounded(
    u: &Subalgebra,
    v: &Subalgebra,
    targets: &[NamedAlgebra],
) -> Result<RaEpiVerdict, MorphError> {
    if !u.is_contained_in(v) {
        return Err(MorphError::InvariantViolated(
            "first subalgebra is not contained in the second".into(),
        ));
    }
    let mut certificate = EpiCertificate {
        targets: targets.iter().map(|t| t.name.clone()).collect(),
        homs_examined: Vec::new(),
        pairs_checked: Vec::new(),
    };
    for (t_idx, target) in targets.iter().enumerate() {
        let mut groups: HashMap<Vec<u64>, RaHom> = HashMap::new();
        let mut homs = 0usize;
        let mut pairs = 0u64;
        let mut witness = None;
        for_each_ra_hom(v, &target.algebra, &[], &mut |hom| {
            homs += 1;
            let restriction: Vec<u64> = u
                .elements()
                .iter()
                .map(|e| hom.image_of(e).expect("u is contained in v").bits())
                .collect();
            if let Some(prev) = groups.get(&restriction) {
                pairs += 1;
                witness = Some(RaEpiWitness {
                    target_index: t_idx,
                    f: prev.clone(),
                    g: hom,
                });
                return ControlFlow::Break(());
            }
            groups.insert(restriction, hom);
            ControlFlow::Continue(())
        })?;
        certificate.homs_examined.push(homs);
        certificate.pairs_checked.push(pairs);
        if let Some(w) = witness {
            return Ok(RaEpiVerdict {
                outcome: EpiOutcome::NotEpic,
                witness: Some(w),
                certificate,
            });
        }
    }
    Ok(RaEpiVerdict {
        outcome: EpiOutcome::EpicRelativeToTargets,
        witness: None,
        certificate,
    })
}

/// A homomorphism restricted to the reflexive equivalence elements of its
/// domain, reinterpreted as a lattice homomorphism with fusion as join.
#[derive(Debug, Clone)]
pub struct EquivalenceRestriction {
    /// Equivalence elements of the source algebra lying in the domain,
    /// ascending, with their lattice.
    pub source: EquivalenceLattice,
    pub target: EquivalenceLattice,
    pub hom: LatticeHom,
}

/// Restricts a homomorphism to the equivalence elements in its domain.
/// Both algebras must be abelian. The image of every equivalence element
/// must be an equivalence element, and the restriction must preserve
/// lattice join (fusion) and meet (intersection); bounds are preserved
/// because homomorphisms fix the identity and the top.
pub fn restrict_to_equivalence_lattice(
    hom: &RaHom,
    source: &BooleanMonoid,
    target: &BooleanMonoid,
) -> Result<EquivalenceRestriction, MorphError> {
    if !source.is_abelian() || !target.is_abelian() {
        return Err(MorphError::NotAbelian);
    }
    let target_lattice = target.equivalence_lattice()?;
    let domain_eq: Vec<ElemSet> = source
        .equivalence_elements()?
        .into_iter()
        .filter(|e| hom.image_of(e).is_some())
        .collect();
    let m = domain_eq.len();
    let mut leq = vec![false; m * m];
    for i in 0..m {
        for j in 0..m {
            leq[i * m + j] = domain_eq[i].is_subset_of(&domain_eq[j]);
        }
    }
    let source_lattice = Lattice::from_leq(m, leq)
        .map_err(|e| MorphError::InvariantViolated(format!("domain equivalence order: {e}")))?;
    for i in 0..m {
        for j in 0..m {
            let fused = source.fuse(domain_eq[i], domain_eq[j]);
            if domain_eq
                .binary_search_by_key(&fused.bits(), ElemSet::bits)
                .map(|k| k == source_lattice.join(i, j))
                != Ok(true)
            {
                return Err(MorphError::InvariantViolated(
                    "domain equivalence elements are not fusion-closed".into(),
                ));
            }
        }
    }

    let mut map = Vec::with_capacity(m);
    for e in &domain_eq {
        let image = hom.image_of(e).expect("filtered to the domain");
        let idx = target_lattice
            .elements
            .binary_search_by_key(&image.bits(), ElemSet::bits)
            .map_err(|_| {
                MorphError::MismatchFound(format!(
                    "image {image} of equivalence element {e} is not an equivalence element"
                ))
            })?;
        map.push(idx);
    }
    for i in 0..m {
        for j in 0..m {
            if map[source_lattice.join(i, j)] != target_lattice.lattice.join(map[i], map[j])
                || map[source_lattice.meet(i, j)] != target_lattice.lattice.meet(map[i], map[j])
            {
                return Err(MorphError::InvariantViolated(
                    "restriction does not preserve join and meet".into(),
                ));
            }
        }
    }
    let preserves_bounds = map[source_lattice.bottom()] == target_lattice.lattice.bottom()
        && map[source_lattice.top()] == target_lattice.lattice.top();
    Ok(EquivalenceRestriction {
        source: EquivalenceLattice {
            lattice: source_lattice,
            elements: domain_eq,
        },
        target: target_lattice,
        hom: LatticeHom {
            map,
            preserves_bounds,
        },
    })
}
