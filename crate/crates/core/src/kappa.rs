use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use spin::Mutex;

use crate::cosets::CosetData;
use crate::error::Result;
use crate::object::ObjectId;
use crate::ring::{FusionRing, RingExt};
use crate::scalar::Scalar;
use crate::subgroup::SubgroupSet;

/// `κ_{α,β}`: quantum dimension of the part of `α⊗β` lying in the subgroup.
pub fn kappa(ring: &dyn FusionRing, sub: &SubgroupSet, a: &ObjectId, b: &ObjectId) -> Result<Scalar> {
    let mut total = Scalar::zero();
    for (x, m) in ring.fuse(a, b)?.iter() {
        if sub.contains(ring, x)? {
            total += ring.qdim(x)?.mul_int(*m as u64);
        }
    }
    Ok(total)
}

/// `κ_α = κ_{ᾱ,α}`.
pub fn kappa_self(ring: &dyn FusionRing, sub: &SubgroupSet, a: &ObjectId) -> Result<Scalar> {
    kappa(ring, sub, &ring.conj(a)?, a)
}

/// Memoized κ values for one pair.
pub struct KappaTable<'a> {
    ring: &'a dyn FusionRing,
    sub: &'a SubgroupSet,
    memo: Mutex<BTreeMap<(ObjectId, ObjectId), Scalar>>,
}

impl<'a> KappaTable<'a> {
    pub fn new(ring: &'a dyn FusionRing, sub: &'a SubgroupSet) -> Self {
        KappaTable { ring, sub, memo: Mutex::new(BTreeMap::new()) }
    }

    pub fn kappa(&self, a: &ObjectId, b: &ObjectId) -> Result<Scalar> {
        let key = (a.clone(), b.clone());
        if let Some(v) = self.memo.lock().get(&key) {
            return Ok(v.clone());
        }
        let v = kappa(self.ring, self.sub, a, b)?;
        self.memo.lock().insert(key, v.clone());
        Ok(v)
    }

    pub fn kappa_self(&self, a: &ObjectId) -> Result<Scalar> {
        self.kappa(&self.ring.conj(a)?, a)
    }

    /// `qdim(α)²/κ_α`.
    pub fn weight(&self, a: &ObjectId) -> Result<Scalar> {
        let q = self.ring.qdim(a)?;
        Ok(&q * &q / self.kappa_self(a)?)
    }

    /// `qdim(α)²/κ_{α,ᾱ}`, the left-handed weight.
    pub fn left_weight(&self, a: &ObjectId) -> Result<Scalar> {
        let q = self.ring.qdim(a)?;
        Ok(&q * &q / self.kappa(a, &self.ring.conj(a)?)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvarianceViolation {
    pub law: String,
    pub first: Vec<ObjectId>,
    pub first_value: Scalar,
    pub second: Vec<ObjectId>,
    pub second_value: Scalar,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InvarianceReport {
    pub pairs_checked: u64,
    pub weights_checked: u64,
    pub skipped: u64,
    pub violations: Vec<InvarianceViolation>,
    /// `qdim²/κ` per right class, keyed by class index.
    pub weights: BTreeMap<usize, Scalar>,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that `κ_{ᾱ,β}/(qdim α qdim β)` and `qdim(α)²/κ_α` depend only on
/// right classes, and that `κ_{ᾱ,β} ≠ 0` exactly when the classes agree.
pub fn check_class_invariance(ring: &dyn FusionRing, sub: &SubgroupSet, data: &CosetData) -> InvarianceReport {
    let table = KappaTable::new(ring, sub);
    let mut report = InvarianceReport::default();
    let window: Vec<(ObjectId, usize)> = ring
        .enumerate_up_to(data.horizon)
        .into_iter()
        .filter_map(|x| data.right_of(&x).map(|c| (x, c)))
        .collect();

    let ratio = |a: &ObjectId, b: &ObjectId| -> Result<Scalar> {
        let ca = ring.conj(a)?;
        Ok(table.kappa(&ca, b)? / (ring.qdim(a)? * ring.qdim(b)?))
    };

    for (x, c) in &window {
        let rep = &data.right[*c].rep;
        match (table.weight(x), table.weight(rep)) {
            (Ok(wx), Ok(wr)) => {
                report.weights_checked += 1;
                report.weights.entry(*c).or_insert_with(|| wr.clone());
                if wx != wr {
                    report.violations.push(InvarianceViolation {
                        law: "weight".into(),
                        first: alloc::vec![rep.clone()],
                        first_value: wr,
                        second: alloc::vec![x.clone()],
                        second_value: wx,
                    });
                }
            }
            _ => report.skipped += 1,
        }
    }

    for (a, ca) in &window {
        for (b, cb) in &window {
            let (ra, rb) = (&data.right[*ca].rep, &data.right[*cb].rep);
            let (v, w) = match (ratio(a, b), ratio(ra, rb)) {
                (Ok(v), Ok(w)) => (v, w),
                _ => {
                    report.skipped += 1;
                    continue;
                }
            };
            report.pairs_checked += 1;
            if v != w {
                report.violations.push(InvarianceViolation {
                    law: "pair-ratio".into(),
                    first: alloc::vec![ra.clone(), rb.clone()],
                    first_value: w,
                    second: alloc::vec![a.clone(), b.clone()],
                    second_value: v,
                });
            } else if v.is_zero() == (ca == cb) {
                report.violations.push(InvarianceViolation {
                    law: "support".into(),
                    first: alloc::vec![a.clone(), b.clone()],
                    first_value: v.clone(),
                    second: alloc::vec![ra.clone(), rb.clone()],
                    second_value: w,
                });
            }
        }
    }
    report
}

/// Largest `κ_γ/κ_α` seen for one `β`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RtEntry {
    pub beta: ObjectId,
    pub ratio: Scalar,
    pub witness: Option<(ObjectId, ObjectId)>,
    pub skipped: u64,
}

/// For each `β` (all of grade `≤ g` unless given), the maximum of `κ_γ/κ_α`
/// over `γ ⊂ α⊗β` with `α`, `γ` of grade `≤ g`.
pub fn rt_scan(
    ring: &dyn FusionRing,
    sub: &SubgroupSet,
    g: u32,
    betas: Option<&[ObjectId]>,
) -> Vec<RtEntry> {
    let window = ring.enumerate_up_to(g);
    let betas: Vec<ObjectId> = match betas {
        Some(b) => b.to_vec(),
        None => window.clone(),
    };
    let table = KappaTable::new(ring, sub);
    let mut out = Vec::with_capacity(betas.len());
    for beta in betas {
        let mut entry = RtEntry { beta: beta.clone(), ratio: Scalar::zero(), witness: None, skipped: 0 };
        for alpha in &window {
            let (ka, d) = match (table.kappa_self(alpha), ring.fuse(alpha, &beta)) {
                (Ok(k), Ok(d)) => (k, d),
                _ => {
                    entry.skipped += 1;
                    continue;
                }
            };
            for (gamma, _) in d.iter() {
                match ring.grade(gamma) {
                    Ok(gg) if gg <= g => {}
                    Ok(_) => continue,
                    Err(_) => {
                        entry.skipped += 1;
                        continue;
                    }
                }
                let kg = match table.kappa_self(gamma) {
                    Ok(k) => k,
                    Err(_) => {
                        entry.skipped += 1;
                        continue;
                    }
                };
                let r = kg / &ka;
                if entry.witness.is_none() || r > entry.ratio {
                    entry.ratio = r;
                    entry.witness = Some((alpha.clone(), gamma.clone()));
                }
            }
        }
        out.push(entry);
    }
    out
}
