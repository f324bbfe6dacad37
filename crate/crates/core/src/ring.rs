use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Result;
use crate::object::{Decomposition, ObjectId, SimpleObject};
use crate::scalar::Scalar;
use crate::subgroup::SubgroupSet;

/// A based fusion ring with exact dimension data.
pub trait FusionRing: Send + Sync {
    fn name(&self) -> String;

    fn unit(&self) -> ObjectId;

    fn object(&self, id: &ObjectId) -> Result<SimpleObject>;

    fn fuse(&self, a: &ObjectId, b: &ObjectId) -> Result<Decomposition>;

    /// All objects of grade at most `g`, sorted by `(grade, id)`.
    fn enumerate_up_to(&self, g: u32) -> Vec<ObjectId>;

    fn is_finite(&self) -> bool;

    fn is_kac(&self) -> bool {
        true
    }

    fn render(&self, id: &ObjectId) -> String;

    fn parse(&self, text: &str) -> Result<ObjectId>;

    /// A conjugation-closed generating set; the flag is false when only the
    /// part below `horizon` is returned.
    fn generators(&self, horizon: u32) -> (Vec<ObjectId>, bool) {
        (self.enumerate_up_to(horizon), self.is_finite())
    }

    /// Double class whose left or right count is provably unbounded.
    fn unbounded_class_witness(&self, _sub: &SubgroupSet) -> Option<(ObjectId, String)> {
        None
    }

    /// Preferred faithfulness witness for `alpha`, tried before generic search.
    fn faithfulness_hint(&self, _sub: &SubgroupSet, _alpha: &ObjectId) -> Option<ObjectId> {
        None
    }

    /// Structural argument that the action on the coset space is faithful.
    fn faithfulness_argument(&self, _sub: &SubgroupSet) -> Option<String> {
        None
    }
}

/// Shorthand accessors on any ring.
pub trait RingExt: FusionRing {
    fn conj(&self, id: &ObjectId) -> Result<ObjectId> {
        Ok(self.object(id)?.conj)
    }

    fn qdim(&self, id: &ObjectId) -> Result<Scalar> {
        Ok(self.object(id)?.qdim)
    }

    fn dim(&self, id: &ObjectId) -> Result<u64> {
        Ok(self.object(id)?.dim)
    }

    fn grade(&self, id: &ObjectId) -> Result<u32> {
        Ok(self.object(id)?.grade)
    }

    fn contains(&self, id: &ObjectId) -> bool {
        self.object(id).is_ok()
    }

    fn sort_by_grade(&self, ids: &mut Vec<ObjectId>) {
        let mut keyed: Vec<(u32, ObjectId)> = ids
            .drain(..)
            .map(|id| (self.grade(&id).unwrap_or(u32::MAX), id))
            .collect();
        keyed.sort();
        keyed.dedup();
        ids.extend(keyed.into_iter().map(|(_, id)| id));
    }

    /// `(grade, id)` key used for representatives.
    fn order_key(&self, id: &ObjectId) -> (u32, ObjectId) {
        (self.grade(id).unwrap_or(u32::MAX), id.clone())
    }

    fn render_decomposition(&self, d: &Decomposition) -> Vec<(String, u32)> {
        d.iter().map(|(id, m)| (self.render(id), *m)).collect()
    }
}

impl<T: FusionRing + ?Sized> RingExt for T {}

/// One axiom of the validation battery.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomCheck {
    pub axiom: String,
    pub checked: u64,
    pub skipped: u64,
    pub failures: Vec<String>,
}

impl AxiomCheck {
    fn new(axiom: &str) -> Self {
        AxiomCheck { axiom: axiom.into(), checked: 0, skipped: 0, failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, witness: String) {
        if self.failures.len() < 8 {
            self.failures.push(witness);
        } else if self.failures.len() == 8 {
            self.failures.push("...".into());
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub horizon: u32,
    pub objects: usize,
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(AxiomCheck::passed)
    }

    pub fn check(&self, axiom: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }
}

struct FuseTable<'a, R: FusionRing + ?Sized> {
    ring: &'a R,
    memo: BTreeMap<(ObjectId, ObjectId), Option<Decomposition>>,
    hard_errors: Vec<String>,
}

impl<'a, R: FusionRing + ?Sized> FuseTable<'a, R> {
    fn get(&mut self, a: &ObjectId, b: &ObjectId) -> Option<Decomposition> {
        let key = (a.clone(), b.clone());
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let v = match self.ring.fuse(a, b) {
            Ok(d) => Some(d),
            Err(e) if e.is_horizon() => None,
            Err(e) => {
                self.hard_errors.push(format!(
                    "{} ⊗ {}: {}",
                    self.ring.render(a),
                    self.ring.render(b),
                    e
                ));
                None
            }
        };
        self.memo.insert(key, v.clone());
        v
    }
}

/// Checks the fusion-ring axioms on every product of total grade at most `g`.
pub fn validate_ring<R: FusionRing + ?Sized>(ring: &R, g: u32) -> ValidationReport {
    let window = ring.enumerate_up_to(g);
    let mut objects: BTreeMap<ObjectId, SimpleObject> = BTreeMap::new();
    let mut data = AxiomCheck::new("object-data");
    for id in &window {
        match ring.object(id) {
            Ok(o) => {
                objects.insert(id.clone(), o);
            }
            Err(e) => data.fail(format!("{:?}: {}", id, e)),
        }
    }
    let unit = ring.unit();
    let name = |id: &ObjectId| ring.render(id);

    for (id, o) in &objects {
        data.checked += 1;
        if o.qdim < Scalar::one() {
            data.fail(format!("qdim({}) = {} < 1", name(id), o.qdim));
        }
        if o.dim == 0 {
            data.fail(format!("dim({}) = 0", name(id)));
        }
        match ring.object(&o.conj) {
            Ok(c) => {
                if c.conj != *id {
                    data.fail(format!("conj(conj({})) ≠ {}", name(id), name(id)));
                }
                if c.qdim != o.qdim || c.dim != o.dim {
                    data.fail(format!("dimensions of {} and its conjugate differ", name(id)));
                }
                if c.grade != o.grade {
                    data.fail(format!("grade({}) ≠ grade of its conjugate", name(id)));
                }
            }
            Err(e) => data.fail(format!("conj({}): {}", name(id), e)),
        }
    }
    match ring.object(&unit) {
        Ok(u) => {
            if !u.qdim.is_one() || u.dim != 1 || u.conj != unit {
                data.fail("unit must have dim = qdim = 1 and be self-conjugate".into());
            }
        }
        Err(e) => data.fail(format!("unit: {}", e)),
    }

    let mut table = FuseTable { ring, memo: BTreeMap::new(), hard_errors: Vec::new() };
    let mut unit_law = AxiomCheck::new("unit");
    let mut conj_unit = AxiomCheck::new("conjugate-unit");
    let mut frob = AxiomCheck::new("frobenius");
    let mut conj_sym = AxiomCheck::new("conjugation-symmetry");
    let mut qhom = AxiomCheck::new("qdim-homomorphism");
    let mut dhom = AxiomCheck::new("dim-homomorphism");
    let mut subadd = AxiomCheck::new("grade-subadditivity");
    let mut bound = AxiomCheck::new("subobject-bound");
    let mut assoc = AxiomCheck::new("associativity");

    let ids: Vec<ObjectId> = window.iter().filter(|x| objects.contains_key(x)).cloned().collect();
    let grades: Vec<u32> = ids.iter().map(|id| objects[id].grade).collect();
    // `ids` is sorted by grade, so `upto(k)` is the prefix of grade at most `k`.
    let upto = |k: u32| grades.partition_point(|&x| x <= k);

    for a in &ids {
        unit_law.checked += 1;
        let single = Decomposition::single(a.clone());
        match (table.get(&unit, a), table.get(a, &unit)) {
            (Some(l), Some(r)) => {
                if l != single || r != single {
                    unit_law.fail(format!("unit ⊗ {} or {} ⊗ unit is not {}", name(a), name(a), name(a)));
                }
            }
            _ => unit_law.skipped += 1,
        }
    }

    let info = |id: &ObjectId| -> Option<SimpleObject> {
        if let Some(o) = objects.get(id) {
            return Some(o.clone());
        }
        ring.object(id).ok()
    };

    for (i, a) in ids.iter().enumerate() {
        let ga = grades[i];
        if ga > g {
            break;
        }
        for (j, b) in ids[..upto(g - ga)].iter().enumerate() {
            let gb = grades[j];
            let d = match table.get(a, b) {
                Some(d) => d,
                None => {
                    for c in [&mut conj_unit, &mut frob, &mut qhom, &mut dhom, &mut subadd, &mut bound] {
                        c.skipped += 1;
                    }
                    continue;
                }
            };
            let (oa, ob) = (info(a).unwrap(), info(b).unwrap());
            let pair = || format!("({}, {})", name(a), name(b));

            conj_unit.checked += 1;
            let expected = if *b == oa.conj { 1 } else { 0 };
            if d.mult(&unit) != expected {
                conj_unit.fail(format!("{}: multiplicity of unit is {}", pair(), d.mult(&unit)));
            }

            let mut qsum = Scalar::zero();
            let mut dsum: u64 = 0;
            qhom.checked += 1;
            dhom.checked += 1;
            subadd.checked += 1;
            bound.checked += 1;
            for (c, m) in d.iter() {
                let oc = match info(c) {
                    Some(o) => o,
                    None => {
                        qhom.fail(format!("{}: summand {:?} unknown", pair(), c));
                        continue;
                    }
                };
                qsum += oc.qdim.mul_int(*m as u64);
                dsum += oc.dim * *m as u64;
                if oc.grade > ga + gb {
                    subadd.fail(format!("{}: summand {} has grade {}", pair(), name(c), oc.grade));
                }
                // Frobenius rotations.
                frob.checked += 1;
                match (table.get(&oa.conj, c), table.get(c, &ob.conj)) {
                    (Some(r1), Some(r2)) => {
                        if r1.mult(b) != *m || r2.mult(a) != *m {
                            frob.fail(format!(
                                "c[{}; {},{}] = {} but rotations give {} and {}",
                                name(c),
                                name(a),
                                name(b),
                                m,
                                r1.mult(b),
                                r2.mult(a)
                            ));
                        }
                    }
                    _ => frob.skipped += 1,
                }
                conj_sym.checked += 1;
                match table.get(&ob.conj, &oa.conj) {
                    Some(r) => {
                        if r.mult(&oc.conj) != *m {
                            conj_sym.fail(format!("{}: conjugate product disagrees at {}", pair(), name(c)));
                        }
                    }
                    None => conj_sym.skipped += 1,
                }
            }
            if qsum != oa.qdim.clone() * &ob.qdim {
                qhom.fail(format!("{}: Σ c·qdim = {} ≠ {}", pair(), qsum, oa.qdim.clone() * &ob.qdim));
            }
            if dsum != oa.dim * ob.dim {
                dhom.fail(format!("{}: Σ c·dim = {} ≠ {}", pair(), dsum, oa.dim * ob.dim));
            }
            if d.total() > ob.dim * ob.dim {
                bound.fail(format!("{}: {} summands exceed dim² = {}", pair(), d.total(), ob.dim * ob.dim));
            }
        }
    }

    for (i, a) in ids.iter().enumerate() {
        if grades[i] > g {
            break;
        }
        for (j, b) in ids[..upto(g - grades[i])].iter().enumerate() {
            let gab = grades[i] + grades[j];
            for c in &ids[..upto(g - gab)] {
                let (ab, bc) = match (table.get(a, b), table.get(b, c)) {
                    (Some(x), Some(y)) => (x, y),
                    _ => {
                        assoc.skipped += 1;
                        continue;
                    }
                };
                let mut left: Vec<(ObjectId, u32)> = Vec::new();
                let mut right: Vec<(ObjectId, u32)> = Vec::new();
                let mut ok = true;
                for (e, m) in ab.iter() {
                    match table.get(e, c) {
                        Some(d) => left.extend(d.iter().map(|(x, k)| (x.clone(), k * m))),
                        None => ok = false,
                    }
                }
                for (f, m) in bc.iter() {
                    match table.get(a, f) {
                        Some(d) => right.extend(d.iter().map(|(x, k)| (x.clone(), k * m))),
                        None => ok = false,
                    }
                }
                if !ok {
                    assoc.skipped += 1;
                    continue;
                }
                assoc.checked += 1;
                if Decomposition::from_terms(left) != Decomposition::from_terms(right) {
                    assoc.fail(format!("({} ⊗ {}) ⊗ {} ≠ {} ⊗ ({} ⊗ {})", name(a), name(b), name(c), name(a), name(b), name(c)));
                }
            }
        }
    }

    let mut fusion = AxiomCheck::new("fusion-defined");
    fusion.checked = table.memo.len() as u64;
    for e in table.hard_errors.drain(..) {
        fusion.fail(e);
    }

    ValidationReport {
        horizon: g,
        objects: objects.len(),
        checks: alloc::vec![data, fusion, unit_law, conj_unit, frob, conj_sym, qhom, dhom, subadd, bound, assoc],
    }
}

/// A ring handle that can be shared between threads.
pub type SharedRing = alloc::sync::Arc<dyn FusionRing>;
