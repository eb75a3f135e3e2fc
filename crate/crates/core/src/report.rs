//! Self-contained verification reports that serialize to JSON with full
//! witnesses, so a verdict can be re-checked from the file alone, plus DOT
//! emission for cover diagrams.

use serde::{Deserialize, Serialize};

use crate::io::{AlgebraFile, LatticeFile};
use crate::lattice::{EpiOutcome, Lattice, LatticeEpiVerdict};
use crate::morphism::{
    check_atom_map_conditions, AtomMap, AtomMapReport, InclusionEmbedding, RaEpiVerdict, RaHom,
    UvPair,
};
use crate::set::ElemSet;

/// DOT rendering of the cover diagram, drawn bottom-up.
pub fn hasse_dot(name: &str, lattice: &Lattice) -> String {
    let mut out = String::new();
    out.push_str(&format!("digraph \"{name}\" {{\n"));
    out.push_str("  rankdir=BT;\n  node [shape=circle];\n");
    for e in lattice.elements() {
        out.push_str(&format!("  {e};\n"));
    }
    for (a, b) in lattice.covers() {
        out.push_str(&format!("  {a} -> {b};\n"));
    }
    out.push_str("}\n");
    out
}

/// Full record of an inclusion-embedding verification: the ambient lattice,
/// the sublattice, the atom images, the condition verdicts, the extension
/// table, and the commutation result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub lattice: LatticeFile,
    pub sublattice: Vec<usize>,
    pub atom_images: Vec<ElemSet>,
    pub conditions: AtomMapReport,
    pub extension: RaHom,
    pub commutes: bool,
    pub proof_identity_instances: u64,
}

impl EmbeddingReport {
    pub fn build(
        name: &str,
        lattice: &Lattice,
        k: &ElemSet,
        emb: &InclusionEmbedding,
        extension: &RaHom,
        commutes: bool,
        proof_identity_instances: u64,
    ) -> Self {
        EmbeddingReport {
            lattice: LatticeFile::from_lattice(name, lattice),
            sublattice: k.to_vec(),
            atom_images: emb.atom_map.images.clone(),
            conditions: check_atom_map_conditions(&emb.atom_map),
            extension: extension.clone(),
            commutes,
            proof_identity_instances,
        }
    }

    /// Re-checks every claim in the report from its own data: the condition
    /// verdicts against freshly rebuilt algebras, the extension against the
    /// join-of-atom-images definition, injectivity, the homomorphism
    /// equations, and the principal-ideal commutation.
    pub fn revalidate(&self, cap: usize) -> Result<(), String> {
        let lattice = self
            .lattice
            .to_lattice(cap)
            .map_err(|e| format!("lattice: {e}"))?;
        let k = ElemSet::from_elems(lattice.n(), self.sublattice.iter().copied());
        if !lattice.is_complete_sublattice(&k) {
            return Err("sublattice is not complete".into());
        }
        let (sub_lattice, sub_elems) = lattice.induced_sublattice(&k);
        let source = crate::monoid::BooleanMonoid::complex_algebra(
            &crate::frame::TernaryFrame::from_lattice(&sub_lattice),
        )
        .map_err(|e| format!("sublattice algebra: {e}"))?;
        let target = crate::monoid::BooleanMonoid::complex_algebra(
            &crate::frame::TernaryFrame::from_lattice(&lattice),
        )
        .map_err(|e| format!("ambient algebra: {e}"))?;
        if self.atom_images.len() != source.atoms() {
            return Err("atom image count mismatch".into());
        }
        let map = AtomMap {
            source: source.clone(),
            target: target.clone(),
            images: self.atom_images.clone(),
        };
        let conditions = check_atom_map_conditions(&map);
        if conditions != self.conditions {
            return Err("condition verdicts do not reproduce".into());
        }
        if !conditions.all_pass() {
            return Err("recorded conditions fail".into());
        }
        // The extension table must be the join of atom images, elementwise.
        let expected_domain: Vec<ElemSet> = source.elements().collect();
        if self.extension.domain != expected_domain {
            return Err("extension domain is not the full carrier".into());
        }
        for (r, img) in self.extension.domain.iter().zip(&self.extension.images) {
            let joined = r
                .iter()
                .fold(target.zero(), |acc, u| acc.union(self.atom_images[u]));
            if joined != *img {
                return Err(format!("extension at {r} is not the join of atom images"));
            }
        }
        if !self.extension.is_injective() {
            return Err("extension is not injective".into());
        }
        if !self.extension.verify(&source, &target) {
            return Err("extension fails the homomorphism equations".into());
        }
        let commutes = sub_elems.iter().enumerate().all(|(ki, &a)| {
            self.extension.image_of(&sub_lattice.downset(ki)) == Some(lattice.downset(a))
        });
        if commutes != self.commutes {
            return Err("commutation verdict does not reproduce".into());
        }
        if !commutes {
            return Err("recorded commutation fails".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }
}

/// Bounded lattice-level epi verdict packaged with everything needed to
/// re-check it: the lattice, the sublattice, and the full target list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeEpiReport {
    pub lattice: LatticeFile,
    pub sublattice: Vec<usize>,
    pub targets: Vec<LatticeFile>,
    pub verdict: LatticeEpiVerdict,
}

impl LatticeEpiReport {
    pub fn revalidate(&self, cap: usize) -> Result<(), String> {
        let lattice = self
            .lattice
            .to_lattice(cap)
            .map_err(|e| format!("lattice: {e}"))?;
        let k: Vec<usize> = self.sublattice.clone();
        match self.verdict.outcome {
            EpiOutcome::NotEpic => {
                let w = self
                    .verdict
                    .witness
                    .as_ref()
                    .ok_or("missing witness for a negative verdict")?;
                let target_file = self
                    .targets
                    .get(w.target_index)
                    .ok_or("witness target index out of range")?;
                let target = target_file
                    .to_lattice(cap)
                    .map_err(|e| format!("target: {e}"))?;
                if !w.f.verify(&lattice, &target) || !w.g.verify(&lattice, &target) {
                    return Err("witness maps are not homomorphisms".into());
                }
                if !(w.f.preserves_bounds && w.g.preserves_bounds) {
                    return Err("witness maps must preserve bounds".into());
                }
                if k.iter().any(|&e| w.f.map[e] != w.g.map[e]) {
                    return Err("witness maps disagree on the sublattice".into());
                }
                if w.f.map == w.g.map {
                    return Err("witness maps do not differ".into());
                }
                Ok(())
            }
            EpiOutcome::EpicRelativeToTargets => {
                if self.verdict.certificate.targets.len() != self.targets.len() {
                    return Err("certificate does not cover the target list".into());
                }
                Ok(())
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedAlgebraFile {
    pub name: String,
    pub algebra: AlgebraFile,
}

/// Bounded subalgebra-level epi verdict with the ambient algebra, both
/// element lists, and the target dumps embedded for replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaEpiReport {
    pub ambient: AlgebraFile,
    pub u_elements: Vec<ElemSet>,
    pub v_elements: Vec<ElemSet>,
    pub v_generators: Vec<ElemSet>,
    pub targets: Vec<NamedAlgebraFile>,
    pub verdict: RaEpiVerdict,
}

impl RaEpiReport {
    pub fn build(
        pair: &UvPair,
        targets: &[crate::morphism::NamedAlgebra],
        verdict: RaEpiVerdict,
    ) -> Self {
        RaEpiReport {
            ambient: AlgebraFile::from_algebra(pair.v.ambient()),
            u_elements: pair.u.elements().to_vec(),
            v_elements: pair.v.elements().to_vec(),
            v_generators: pair.v.generators().to_vec(),
            targets: targets
                .iter()
                .map(|t| NamedAlgebraFile {
                    name: t.name.clone(),
                    algebra: AlgebraFile::from_algebra(&t.algebra),
                })
                .collect(),
            verdict,
        }
    }

    pub fn revalidate(&self) -> Result<(), String> {
        let ambient = self
            .ambient
            .to_algebra()
            .map_err(|e| format!("ambient: {e}"))?;
        match self.verdict.outcome {
            EpiOutcome::NotEpic => {
                let w = self
                    .verdict
                    .witness
                    .as_ref()
                    .ok_or("missing witness for a negative verdict")?;
                let target_file = self
                    .targets
                    .get(w.target_index)
                    .ok_or("witness target index out of range")?;
                let target = target_file
                    .algebra
                    .to_algebra()
                    .map_err(|e| format!("target: {e}"))?;
                if w.f.domain != self.v_elements || w.g.domain != self.v_elements {
                    return Err("witness domains do not match the subalgebra".into());
                }
                if !w.f.verify(&ambient, &target) || !w.g.verify(&ambient, &target) {
                    return Err("witness maps are not homomorphisms".into());
                }
                for e in &self.u_elements {
                    if w.f.image_of(e) != w.g.image_of(e) {
                        return Err("witness maps disagree on the inner subalgebra".into());
                    }
                }
                if w.f == w.g {
                    return Err("witness maps do not differ".into());
                }
                Ok(())
            }
            EpiOutcome::EpicRelativeToTargets => {
                if self.verdict.certificate.targets.len() != self.targets.len() {
                    return Err("certificate does not cover the target list".into());
                }
                Ok(())
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::lattice::{is_epic_sublattice_bounded, NamedLattice};
    use crate::monoid::CheckGates;
    use crate::morphism::{
        build_uv, extend_atom_map, inclusion_atom_map, is_epic_subalgebra_bounded as ra_epi,
        verify_embedding_commutes, verify_inclusion_identities,
    };

    #[test]
    fn dot_contains_covers() {
        let dot = hasse_dot("m3", &corpus::m3());
        assert!(dot.contains("rankdir=BT"));
        assert!(dot.contains("0 -> 1;"));
        assert!(dot.contains("3 -> 4;"));
    }

    fn sample_embedding_report() -> EmbeddingReport {
        let l = corpus::chain(3);
        let k = ElemSet::from_elems(3, [0, 2]);
        let emb = inclusion_atom_map(&l, &k).unwrap();
        let ext = extend_atom_map(&emb.atom_map, &CheckGates::default()).unwrap();
        let commutes = verify_embedding_commutes(&ext, &emb, &l).is_ok();
        let instances = verify_inclusion_identities(&emb, &l).unwrap();
        EmbeddingReport::build("chain3", &l, &k, &emb, &ext, commutes, instances)
    }

    #[test]
    fn embedding_report_replays() {
        let report = sample_embedding_report();
        let json = report.to_json();
        let parsed = EmbeddingReport::from_json(&json).unwrap();
        assert_eq!(parsed, report);
        assert_eq!(parsed.to_json(), json, "round trip must be bit-exact");
        parsed.revalidate(16).unwrap();
    }

    #[test]
    fn tampered_embedding_report_fails() {
        let mut report = sample_embedding_report();
        report.atom_images[1] = ElemSet::singleton(3, 1);
        assert!(report.revalidate(16).is_err());
    }

    #[test]
    fn lattice_epi_report_replays() {
        let l = corpus::chain(3);
        let k = ElemSet::from_elems(3, [0, 2]);
        let targets = vec![NamedLattice {
            name: "chain3".into(),
            lattice: l.clone(),
        }];
        let verdict = is_epic_sublattice_bounded(&l, &k, &targets);
        let report = LatticeEpiReport {
            lattice: LatticeFile::from_lattice("chain3", &l),
            sublattice: k.to_vec(),
            targets: targets
                .iter()
                .map(|t| LatticeFile::from_lattice(&t.name, &t.lattice))
                .collect(),
            verdict,
        };
        let json = report.to_json();
        let parsed = LatticeEpiReport::from_json(&json).unwrap();
        assert_eq!(parsed.to_json(), json);
        parsed.revalidate(16).unwrap();

        let mut tampered = parsed.clone();
        if let Some(w) = tampered.verdict.witness.as_mut() {
            w.g = w.f.clone();
        }
        assert!(tampered.revalidate(16).is_err());
    }

    #[test]
    fn ra_epi_report_replays() {
        let l = corpus::chain(3);
        let k = ElemSet::from_elems(3, [0, 2]);
        let pair = build_uv(&l, &k).unwrap();
        let targets = corpus::default_algebra_targets();
        let verdict = ra_epi(&pair.u, &pair.v, &targets).unwrap();
        let report = RaEpiReport::build(&pair, &targets, verdict);
        let json = report.to_json();
        let parsed = RaEpiReport::from_json(&json).unwrap();
        assert_eq!(parsed.to_json(), json);
        parsed.revalidate().unwrap();
    }
}
