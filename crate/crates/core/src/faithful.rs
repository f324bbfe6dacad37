use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::constructors::HnnRecipe;
use crate::cosets::{related, ClassStatus, Side};
use crate::error::Result;
use crate::hecke::HeckePair;
use crate::object::ObjectId;
use crate::ring::{FusionRing, RingExt};
use crate::subgroup::SubgroupSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaithfulStatus {
    CertifiedFaithful,
    Inconclusive,
}

impl FaithfulStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            FaithfulStatus::CertifiedFaithful => "certified-faithful",
            FaithfulStatus::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaithfulnessReport {
    pub status: FaithfulStatus,
    pub horizon: u32,
    /// `α ↦ γ_α` with no subobject of `α⊗γ_α` in `[γ_α]`.
    pub witnesses: BTreeMap<ObjectId, ObjectId>,
    pub missing: Vec<ObjectId>,
    pub argument: Option<String>,
}

/// True when no subobject of `α⊗γ` lies in the right class of `γ`.
pub fn is_witness(ring: &dyn FusionRing, sub: &SubgroupSet, alpha: &ObjectId, gamma: &ObjectId) -> Result<bool> {
    for (x, _) in ring.fuse(alpha, gamma)?.iter() {
        if related(ring, sub, Side::Right, x, gamma)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn is_trivial(ring: &dyn FusionRing, sub: &SubgroupSet) -> bool {
    sub.members().map_or(false, |m| m.len() == 1 && m.contains(&ring.unit()))
}

/// Searches a separating `γ_α` for every nontrivial `α` of grade `≤ g`.
pub fn faithful_sufficient(ring: &dyn FusionRing, sub: &SubgroupSet, g: u32) -> FaithfulnessReport {
    let window = ring.enumerate_up_to(g);
    let unit = ring.unit();
    let mut witnesses = BTreeMap::new();
    let mut missing = Vec::new();
    for alpha in window.iter().filter(|a| **a != unit) {
        let hinted = ring.faithfulness_hint(sub, alpha).into_iter();
        let found = hinted
            .chain(window.iter().cloned())
            .find(|gamma| is_witness(ring, sub, alpha, gamma).unwrap_or(false));
        match found {
            Some(gamma) => {
                witnesses.insert(alpha.clone(), gamma);
            }
            None => missing.push(alpha.clone()),
        }
    }
    let argument = if ring.is_finite() {
        Some("the ring is finite and every object has a witness".into())
    } else if is_trivial(ring, sub) {
        Some("the subgroup is trivial, so γ = 1 separates every nontrivial object".into())
    } else {
        ring.faithfulness_argument(sub)
    };
    let status = if missing.is_empty() && argument.is_some() {
        FaithfulStatus::CertifiedFaithful
    } else {
        FaithfulStatus::Inconclusive
    };
    FaithfulnessReport { status, horizon: g, witnesses, missing, argument }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CokernelSupport {
    pub objects: Vec<ObjectId>,
    pub status: ClassStatus,
    pub note: Option<String>,
}

/// Objects of grade `≤ g` in the support of some `p_σ * p_σ′`, over right classes
/// `σ` and left classes `σ′` with representatives of grade `≤ g`.
pub fn cokernel_support(pair: &HeckePair) -> Result<CokernelSupport> {
    let ring = pair.ring;
    let g = pair.horizon();
    let within = |x: &ObjectId| ring.grade(x).map_or(false, |d| d <= g);
    let rights: Vec<usize> = (0..pair.cosets.right.len()).filter(|&i| within(&pair.cosets.right[i].rep)).collect();
    let lefts: Vec<usize> = (0..pair.cosets.left.len()).filter(|&i| within(&pair.cosets.left[i].rep)).collect();
    let mut objects = BTreeSet::new();
    for delta in ring.enumerate_up_to(g) {
        'search: for &s in &rights {
            for &t in &lefts {
                if !pair.coefficient_at(s, t, &delta)?.is_zero() {
                    objects.insert(delta.clone());
                    break 'search;
                }
            }
        }
    }
    let mut objects: Vec<ObjectId> = objects.into_iter().collect();
    ring.sort_by_grade(&mut objects);
    let status = if pair.cosets.explicit && ring.is_finite() { ClassStatus::Exact } else { ClassStatus::WithinHorizon };
    let note = if pair.sub.is_finite() {
        None
    } else {
        Some("the subgroup is infinite, so the completion of a reduced pair is non-discrete".into())
    };
    Ok(CokernelSupport { objects, status, note })
}

/// `Dom θ^{kε}` restricted to base objects of grade `≤ k_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainStep {
    pub k: i64,
    pub members: Vec<ObjectId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaDomainReport {
    pub k_max: u32,
    pub sample: usize,
    pub chain: Vec<DomainStep>,
    pub intersection: Vec<ObjectId>,
    pub trivial: bool,
    pub argument: Option<String>,
}

/// `Dom θ^{(n+1)ε} = {α ∈ Dom θ^{nε} : θ^{nε}(α) ∈ Λ_ε}`, evaluated on base
/// objects of grade `≤ k_max` for `1 ≤ |k| ≤ k_max`.
pub fn hnn_theta_domains(recipe: &HnnRecipe, k_max: u32) -> ThetaDomainReport {
    let base = recipe.base.as_ref();
    let sample = base.enumerate_up_to(k_max);
    let mut chain = Vec::new();
    let mut inter: BTreeSet<ObjectId> = sample.iter().cloned().collect();
    for eps in [1i8, -1] {
        let lam = recipe.lambda(eps);
        let mut current: Vec<(ObjectId, ObjectId)> = sample.iter().map(|x| (x.clone(), x.clone())).collect();
        for k in 1..=k_max as i64 {
            current = current
                .into_iter()
                .filter(|(_, img)| lam.contains(base, img).unwrap_or(false))
                .filter_map(|(x, img)| recipe.theta_pow(&img, eps).map(|y| (x, y)))
                .collect();
            let members: Vec<ObjectId> = current.iter().map(|(x, _)| x.clone()).collect();
            let set: BTreeSet<ObjectId> = members.iter().cloned().collect();
            inter.retain(|x| set.contains(x));
            chain.push(DomainStep { k: k * eps as i64, members });
        }
    }
    chain.sort_by_key(|s| s.k);
    let mut intersection: Vec<ObjectId> = inter.into_iter().collect();
    base.sort_by_grade(&mut intersection);
    let trivial = intersection == [base.unit()];
    ThetaDomainReport { k_max, sample: sample.len(), chain, intersection, trivial, argument: recipe.theta.domain_argument() }
}

impl ThetaDomainReport {
    pub fn describe(&self, ring: &dyn FusionRing) -> Vec<(i64, String)> {
        self.chain
            .iter()
            .map(|s| {
                let shown: Vec<String> = s.members.iter().take(12).map(|x| ring.render(x)).collect();
                let more = if s.members.len() > 12 { format!(", … ({} total)", s.members.len()) } else { String::new() };
                (s.k, format!("{{{}{}}}", shown.join(", "), more))
            })
            .collect()
    }
}
