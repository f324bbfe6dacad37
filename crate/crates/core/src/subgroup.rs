use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::object::ObjectId;
use crate::ring::{FusionRing, RingExt};

/// Membership predicate for a subgroup too large to list.
pub trait SubgroupRule: Send + Sync {
    fn name(&self) -> String;

    fn contains(&self, id: &ObjectId) -> Result<bool>;

    /// Conjugation-closed generators; the flag is false when the list is
    /// only the part of an infinite generating set below `horizon`.
    fn generators(&self, horizon: u32) -> (Vec<ObjectId>, bool);
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosureCertificate {
    Closed,
    ClosedWithinGrade(u32),
    Rule(String),
}

#[derive(Clone)]
enum Membership {
    Finite(BTreeSet<ObjectId>),
    Rule(Arc<dyn SubgroupRule>),
}

/// A quantum subgroup given by its set of simple objects.
#[derive(Clone)]
pub struct SubgroupSet {
    membership: Membership,
    certificate: ClosureCertificate,
    generators: Vec<ObjectId>,
}

impl core::fmt::Debug for SubgroupSet {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match &self.membership {
            Membership::Finite(m) => write!(f, "SubgroupSet({} members, {:?})", m.len(), self.certificate),
            Membership::Rule(r) => write!(f, "SubgroupSet(rule {})", r.name()),
        }
    }
}

impl SubgroupSet {
    pub fn trivial(ring: &dyn FusionRing) -> Self {
        let mut members = BTreeSet::new();
        members.insert(ring.unit());
        SubgroupSet { membership: Membership::Finite(members), certificate: ClosureCertificate::Closed, generators: Vec::new() }
    }

    pub fn from_rule(rule: Arc<dyn SubgroupRule>) -> Self {
        let name = rule.name();
        SubgroupSet { membership: Membership::Rule(rule), certificate: ClosureCertificate::Rule(name), generators: Vec::new() }
    }

    /// Validates that `members` is closed and wraps it.
    pub fn from_members(ring: &dyn FusionRing, members: &[ObjectId]) -> Result<Self> {
        let set: BTreeSet<ObjectId> = members.iter().cloned().collect();
        let unit = ring.unit();
        if !set.contains(&unit) {
            return Err(Error::InvalidSubgroup("the unit is not a member".into()));
        }
        for a in &set {
            let c = ring.conj(a)?;
            if !set.contains(&c) {
                return Err(Error::InvalidSubgroup(format!(
                    "not closed under conjugation: {} has conjugate {}",
                    ring.render(a),
                    ring.render(&c)
                )));
            }
            for b in &set {
                for (x, _) in ring.fuse(a, b)?.iter() {
                    if !set.contains(x) {
                        return Err(Error::InvalidSubgroup(format!(
                            "not closed under fusion: {} ⊂ {} ⊗ {}",
                            ring.render(x),
                            ring.render(a),
                            ring.render(b)
                        )));
                    }
                }
            }
        }
        let generators = set.iter().filter(|x| **x != unit).cloned().collect();
        Ok(SubgroupSet { membership: Membership::Finite(set), certificate: ClosureCertificate::Closed, generators })
    }

    pub fn certificate(&self) -> &ClosureCertificate {
        &self.certificate
    }

    /// Name of the defining rule, if any.
    pub fn rule_name(&self) -> Option<String> {
        match &self.membership {
            Membership::Rule(r) => Some(r.name()),
            Membership::Finite(_) => None,
        }
    }

    /// True when the member list is known to be the whole subgroup.
    pub fn is_finite(&self) -> bool {
        matches!((&self.membership, &self.certificate), (Membership::Finite(_), ClosureCertificate::Closed))
    }

    /// Members, when the subgroup is given by a list.
    pub fn members(&self) -> Option<&BTreeSet<ObjectId>> {
        match &self.membership {
            Membership::Finite(m) => Some(m),
            Membership::Rule(_) => None,
        }
    }

    pub fn contains(&self, ring: &dyn FusionRing, id: &ObjectId) -> Result<bool> {
        match &self.membership {
            Membership::Rule(r) => r.contains(id),
            Membership::Finite(m) => {
                if m.contains(id) {
                    return Ok(true);
                }
                match self.certificate {
                    ClosureCertificate::ClosedWithinGrade(g) => {
                        let gr = ring.grade(id)?;
                        if gr <= g {
                            Ok(false)
                        } else {
                            Err(Error::HorizonExceeded(format!(
                                "membership of {} (grade {}) beyond subgroup closure grade {}",
                                ring.render(id),
                                gr,
                                g
                            )))
                        }
                    }
                    _ => Ok(false),
                }
            }
        }
    }

    /// Generators and whether they generate the whole subgroup.
    pub fn generators(&self, horizon: u32) -> (Vec<ObjectId>, bool) {
        match &self.membership {
            Membership::Rule(r) => r.generators(horizon),
            Membership::Finite(_) => (self.generators.clone(), true),
        }
    }

    /// Largest grade among listed members.
    pub fn max_member_grade(&self, ring: &dyn FusionRing) -> Option<u32> {
        self.members().map(|m| m.iter().filter_map(|x| ring.grade(x).ok()).max().unwrap_or(0))
    }
}

/// Least subgroup containing `seed`, restricted to grade at most `g`.
pub fn close_subgroup(ring: &dyn FusionRing, seed: &[ObjectId], g: u32) -> Result<SubgroupSet> {
    let unit = ring.unit();
    let mut set: BTreeSet<ObjectId> = BTreeSet::new();
    let mut order: Vec<ObjectId> = Vec::new();
    let mut escaped = false;
    let mut gens: BTreeSet<ObjectId> = BTreeSet::new();
    let push = |x: ObjectId, set: &mut BTreeSet<ObjectId>, order: &mut Vec<ObjectId>| {
        if set.insert(x.clone()) {
            order.push(x);
        }
    };
    push(unit.clone(), &mut set, &mut order);
    for s in seed {
        let o = ring.object(s)?;
        if o.grade > g {
            return Err(Error::HorizonExceeded(format!(
                "seed {} has grade {} above {}",
                ring.render(s),
                o.grade,
                g
            )));
        }
        if *s != unit {
            gens.insert(s.clone());
            gens.insert(o.conj.clone());
        }
        push(s.clone(), &mut set, &mut order);
        push(o.conj, &mut set, &mut order);
    }
    let mut i = 0;
    while i < order.len() {
        let x = order[i].clone();
        let mut j = 0;
        while j <= i {
            let y = order[j].clone();
            for (a, b) in [(&x, &y), (&y, &x)] {
                match ring.fuse(a, b) {
                    Ok(d) => {
                        for (c, _) in d.iter() {
                            if ring.grade(c)? <= g {
                                push(c.clone(), &mut set, &mut order);
                            } else {
                                escaped = true;
                            }
                        }
                    }
                    Err(e) if e.is_horizon() => escaped = true,
                    Err(e) => return Err(e),
                }
            }
            j += 1;
        }
        i += 1;
    }
    let certificate = if escaped { ClosureCertificate::ClosedWithinGrade(g) } else { ClosureCertificate::Closed };
    Ok(SubgroupSet { membership: Membership::Finite(set), certificate, generators: gens.into_iter().collect() })
}

/// The whole ring as a subgroup of itself.
pub struct WholeRing(pub Arc<dyn FusionRing>);

impl SubgroupRule for WholeRing {
    fn name(&self) -> String {
        "whole".into()
    }

    fn contains(&self, id: &ObjectId) -> Result<bool> {
        Ok(self.0.contains(id))
    }

    fn generators(&self, horizon: u32) -> (Vec<ObjectId>, bool) {
        self.0.generators(horizon)
    }
}
