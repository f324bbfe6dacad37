use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::object::ObjectId;
use crate::ring::{FusionRing, RingExt};
use crate::subgroup::SubgroupSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Right,
    Left,
    Double,
}

impl Side {
    pub fn prefix(self) -> &'static str {
        match self {
            Side::Right => "R",
            Side::Left => "L",
            Side::Double => "D",
        }
    }
}

/// How far the counts of a double class can be trusted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ClassStatus {
    /// Counts are exact.
    Exact,
    /// Counts are exact for the part of the subgroup generated below the horizon.
    WithinHorizon,
    /// Classes escaped the horizon; counts are lower bounds.
    Partial,
}

impl ClassStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassStatus::Exact => "exact",
            ClassStatus::WithinHorizon => "within-horizon",
            ClassStatus::Partial => "partial",
        }
    }
}

/// A right or left class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetClass {
    pub rep: ObjectId,
    /// Known members, sorted by `(grade, id)`.
    pub members: Vec<ObjectId>,
    /// True when `members` is the whole class.
    pub complete: bool,
    pub double: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleClass {
    pub rep: ObjectId,
    pub members: Vec<ObjectId>,
    pub complete: bool,
    /// Indices of the right classes inside this double class.
    pub right: Vec<usize>,
    pub left: Vec<usize>,
    pub status: ClassStatus,
}

impl DoubleClass {
    /// `R(τ)`, the number of right classes.
    pub fn r(&self) -> u64 {
        self.right.len() as u64
    }

    /// `L(τ)`, the number of left classes.
    pub fn l(&self) -> u64 {
        self.left.len() as u64
    }
}

/// Right, left and double classes of all objects up to a grade.
#[derive(Clone, Debug)]
pub struct CosetData {
    pub horizon: u32,
    pub right: Vec<CosetClass>,
    pub left: Vec<CosetClass>,
    pub double: Vec<DoubleClass>,
    /// Window objects whose class could not be decided.
    pub unresolved: Vec<ObjectId>,
    /// True when classes were computed as explicit finite sets.
    pub explicit: bool,
    right_of: BTreeMap<ObjectId, usize>,
    left_of: BTreeMap<ObjectId, usize>,
    double_of: BTreeMap<ObjectId, usize>,
}

/// `a ∼ b` (right) iff `Λ ∩ b̄⊗a ≠ ∅`; `a ∽ b` (left) iff `Λ ∩ a⊗b̄ ≠ ∅`.
pub fn related(ring: &dyn FusionRing, sub: &SubgroupSet, side: Side, a: &ObjectId, b: &ObjectId) -> Result<bool> {
    let d = match side {
        Side::Right => ring.fuse(&ring.conj(b)?, a)?,
        Side::Left => ring.fuse(a, &ring.conj(b)?)?,
        Side::Double => return Err(Error::Incomplete("double relation has no one-step test".into())),
    };
    for (x, _) in d.iter() {
        if sub.contains(ring, x)? {
            return Ok(true);
        }
    }
    Ok(false)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn add(&mut self) -> usize {
        self.0.push(self.0.len());
        self.0.len() - 1
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let n = self.0[y];
            self.0[y] = r;
            y = n;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

fn sorted(ring: &dyn FusionRing, set: BTreeSet<ObjectId>) -> Vec<ObjectId> {
    let mut v: Vec<ObjectId> = set.into_iter().collect();
    ring.sort_by_grade(&mut v);
    v
}

impl CosetData {
    pub fn right_of(&self, id: &ObjectId) -> Option<usize> {
        self.right_of.get(id).copied()
    }

    pub fn left_of(&self, id: &ObjectId) -> Option<usize> {
        self.left_of.get(id).copied()
    }

    pub fn double_of(&self, id: &ObjectId) -> Option<usize> {
        self.double_of.get(id).copied()
    }

    /// Right class of any object, by lookup or by testing against representatives.
    pub fn locate(&self, ring: &dyn FusionRing, sub: &SubgroupSet, side: Side, id: &ObjectId) -> Result<Option<usize>> {
        let (map, classes) = match side {
            Side::Right => (&self.right_of, &self.right),
            Side::Left => (&self.left_of, &self.left),
            Side::Double => {
                if let Some(d) = self.double_of(id) {
                    return Ok(Some(d));
                }
                if let Some(r) = self.locate(ring, sub, Side::Right, id)? {
                    return Ok(Some(self.right[r].double));
                }
                return Ok(None);
            }
        };
        if let Some(i) = map.get(id) {
            return Ok(Some(*i));
        }
        if self.explicit {
            return Ok(None);
        }
        for (i, c) in classes.iter().enumerate() {
            if related(ring, sub, side, id, &c.rep)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// `"R:rep"`, `"L:rep"` or `"D:rep"`.
    pub fn label(&self, ring: &dyn FusionRing, side: Side, idx: usize) -> String {
        let rep = match side {
            Side::Right => &self.right[idx].rep,
            Side::Left => &self.left[idx].rep,
            Side::Double => &self.double[idx].rep,
        };
        format!("{}:{}", side.prefix(), ring.render(rep))
    }

    /// Double class of the unit.
    pub fn unit_class(&self, ring: &dyn FusionRing) -> usize {
        self.double_of(&ring.unit()).expect("unit is always classified")
    }

    /// Double class containing the conjugates of `τ`.
    pub fn involution_class(&self, ring: &dyn FusionRing, sub: &SubgroupSet, tau: usize) -> Result<Option<usize>> {
        let c = ring.conj(&self.double[tau].rep)?;
        self.locate(ring, sub, Side::Double, &c)
    }

    /// Overall status: the worst status of any double class.
    pub fn status(&self) -> ClassStatus {
        let worst = self.double.iter().map(|d| d.status).max().unwrap_or(ClassStatus::Exact);
        if self.unresolved.is_empty() {
            worst
        } else {
            ClassStatus::Partial
        }
    }
}

/// Computes right, left and double classes of every object of grade at most `g`.
pub fn coset_classes(ring: &dyn FusionRing, sub: &SubgroupSet, g: u32) -> Result<CosetData> {
    if sub.is_finite() {
        explicit_classes(ring, sub, g)
    } else {
        window_classes(ring, sub, g)
    }
}

fn explicit_classes(ring: &dyn FusionRing, sub: &SubgroupSet, g: u32) -> Result<CosetData> {
    let lam: Vec<ObjectId> = sub.members().unwrap().iter().cloned().collect();
    let window = ring.enumerate_up_to(g);
    let mut data = CosetData {
        horizon: g,
        right: Vec::new(),
        left: Vec::new(),
        double: Vec::new(),
        unresolved: Vec::new(),
        explicit: true,
        right_of: BTreeMap::new(),
        left_of: BTreeMap::new(),
        double_of: BTreeMap::new(),
    };
    for c in &window {
        if data.double_of.contains_key(c) {
            continue;
        }
        let mut left_side = BTreeSet::new();
        for l in &lam {
            left_side.extend(ring.fuse(l, c)?.ids().cloned());
        }
        let mut members = BTreeSet::new();
        for x in &left_side {
            for l in &lam {
                members.extend(ring.fuse(x, l)?.ids().cloned());
            }
        }
        let members = sorted(ring, members);
        let di = data.double.len();
        let mut right = Vec::new();
        let mut left = Vec::new();
        for x in &members {
            data.double_of.insert(x.clone(), di);
            if !data.right_of.contains_key(x) {
                let mut cls = BTreeSet::new();
                for l in &lam {
                    cls.extend(ring.fuse(x, l)?.ids().cloned());
                }
                let cls = sorted(ring, cls);
                let ri = data.right.len();
                for y in &cls {
                    data.right_of.insert(y.clone(), ri);
                }
                data.right.push(CosetClass { rep: cls[0].clone(), members: cls, complete: true, double: di });
                right.push(ri);
            }
            if !data.left_of.contains_key(x) {
                let mut cls = BTreeSet::new();
                for l in &lam {
                    cls.extend(ring.fuse(l, x)?.ids().cloned());
                }
                let cls = sorted(ring, cls);
                let li = data.left.len();
                for y in &cls {
                    data.left_of.insert(y.clone(), li);
                }
                data.left.push(CosetClass { rep: cls[0].clone(), members: cls, complete: true, double: di });
                left.push(li);
            }
        }
        data.double.push(DoubleClass {
            rep: members[0].clone(),
            members,
            complete: true,
            right,
            left,
            status: ClassStatus::Exact,
        });
    }
    Ok(data)
}

struct Partition {
    reps: Vec<ObjectId>,
    members: Vec<Vec<ObjectId>>,
    of: BTreeMap<ObjectId, usize>,
    tainted: Vec<bool>,
    from_window: Vec<bool>,
}

impl Partition {
    fn new() -> Self {
        Partition { reps: Vec::new(), members: Vec::new(), of: BTreeMap::new(), tainted: Vec::new(), from_window: Vec::new() }
    }

    fn push(&mut self, x: ObjectId, window: bool) -> usize {
        let i = self.reps.len();
        self.reps.push(x.clone());
        self.members.push(alloc::vec![x.clone()]);
        self.of.insert(x, i);
        self.tainted.push(false);
        self.from_window.push(window);
        i
    }

    /// Class of `x` among existing classes; `Err` when undecidable.
    fn find(&self, ring: &dyn FusionRing, sub: &SubgroupSet, side: Side, x: &ObjectId) -> Result<Option<usize>> {
        if let Some(i) = self.of.get(x) {
            return Ok(Some(*i));
        }
        for (i, r) in self.reps.iter().enumerate() {
            if related(ring, sub, side, x, r)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }
}

fn window_classes(ring: &dyn FusionRing, sub: &SubgroupSet, g: u32) -> Result<CosetData> {
    let window = ring.enumerate_up_to(g);
    let mut parts = [Partition::new(), Partition::new()];
    let sides = [Side::Right, Side::Left];
    let mut unresolved_one_side: Vec<(ObjectId, usize)> = Vec::new();
    let mut unresolved = Vec::new();
    for x in &window {
        let mut failures = 0;
        for s in 0..2 {
            match parts[s].find(ring, sub, sides[s], x) {
                Ok(Some(i)) => {
                    parts[s].members[i].push(x.clone());
                    parts[s].of.insert(x.clone(), i);
                }
                Ok(None) => {
                    parts[s].push(x.clone(), true);
                }
                Err(e) if e.is_horizon() => {
                    failures += 1;
                    unresolved_one_side.push((x.clone(), s));
                }
                Err(e) => return Err(e),
            }
        }
        if failures == 2 {
            unresolved.push(x.clone());
        }
    }

    let (gens, gens_complete) = sub.generators(2 * g.max(1));
    let gens: Vec<ObjectId> = gens.into_iter().filter(|s| *s != ring.unit()).collect();
    let max_gen = gens.iter().filter_map(|s| ring.grade(s).ok()).max().unwrap_or(0);
    let bound = 2 * g + max_gen;

    // Union-find over right classes (even ids) and left classes (odd ids).
    let mut uf = UnionFind(Vec::new());
    let mut node: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for s in 0..2 {
        for _ in 0..parts[s].reps.len() {
            node[s].push(uf.add());
        }
    }
    for x in &window {
        if let (Some(r), Some(l)) = (parts[0].of.get(x), parts[1].of.get(x)) {
            uf.union(node[0][*r], node[1][*l]);
        }
    }
    for (x, s) in &unresolved_one_side {
        if let Some(i) = parts[1 - s].of.get(x) {
            parts[1 - s].tainted[*i] = true;
        }
    }

    let mut queue: Vec<(usize, usize)> = (0..2).flat_map(|s| (0..parts[s].reps.len()).map(move |i| (s, i))).collect();
    let mut head = 0;
    while head < queue.len() {
        let (s, i) = queue[head];
        head += 1;
        let rep = parts[s].reps[i].clone();
        for gen in &gens {
            let prod = if s == 0 { ring.fuse(gen, &rep) } else { ring.fuse(&rep, gen) };
            let d = match prod {
                Ok(d) => d,
                Err(e) if e.is_horizon() => {
                    parts[s].tainted[i] = true;
                    continue;
                }
                Err(e) => return Err(e),
            };
            for (z, _) in d.iter() {
                let j = match parts[s].find(ring, sub, sides[s], z) {
                    Ok(Some(j)) => j,
                    Ok(None) => {
                        match ring.grade(z) {
                            Ok(gz) if gz <= bound => {}
                            Ok(_) => {
                                parts[s].tainted[i] = true;
                                continue;
                            }
                            Err(e) if e.is_horizon() => {
                                parts[s].tainted[i] = true;
                                continue;
                            }
                            Err(e) => return Err(e),
                        }
                        let j = parts[s].push(z.clone(), false);
                        node[s].push(uf.add());
                        queue.push((s, j));
                        let o = 1 - s;
                        match parts[o].find(ring, sub, sides[o], z) {
                            Ok(Some(k)) => {
                                parts[o].members[k].push(z.clone());
                                parts[o].of.insert(z.clone(), k);
                                uf.union(node[s][j], node[o][k]);
                            }
                            Ok(None) => {
                                let k = parts[o].push(z.clone(), false);
                                node[o].push(uf.add());
                                queue.push((o, k));
                                uf.union(node[s][j], node[o][k]);
                            }
                            Err(e) if e.is_horizon() => parts[s].tainted[j] = true,
                            Err(e) => return Err(e),
                        }
                        j
                    }
                    Err(e) if e.is_horizon() => {
                        parts[s].tainted[i] = true;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                uf.union(node[s][i], node[s][j]);
            }
        }
    }

    // Assemble double classes in order of their minimal member.
    let mut groups: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for s in 0..2 {
        for i in 0..parts[s].reps.len() {
            let root = uf.find(node[s][i]);
            let e = groups.entry(root).or_default();
            if s == 0 {
                e.0.push(i)
            } else {
                e.1.push(i)
            }
        }
    }
    let mut doubles: Vec<(ObjectId, Vec<usize>, Vec<usize>)> = Vec::new();
    for (_, (r, l)) in groups {
        let mut members: Vec<ObjectId> = r.iter().flat_map(|i| parts[0].members[*i].iter().cloned()).collect();
        members.extend(l.iter().flat_map(|i| parts[1].members[*i].iter().cloned()));
        ring.sort_by_grade(&mut members);
        doubles.push((members[0].clone(), r, l));
    }
    doubles.sort_by_key(|(rep, _, _)| ring.order_key(rep));

    let mut data = CosetData {
        horizon: g,
        right: Vec::new(),
        left: Vec::new(),
        double: Vec::new(),
        unresolved,
        explicit: false,
        right_of: BTreeMap::new(),
        left_of: BTreeMap::new(),
        double_of: BTreeMap::new(),
    };
    let mut index: [BTreeMap<usize, usize>; 2] = [BTreeMap::new(), BTreeMap::new()];
    for (di, (_, r, l)) in doubles.iter().enumerate() {
        let mut order: [Vec<usize>; 2] = [r.clone(), l.clone()];
        for s in 0..2 {
            order[s].sort_by_key(|i| ring.order_key(&parts[s].reps[*i]));
        }
        let mut tainted = false;
        let mut ids: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
        for s in 0..2 {
            for &i in &order[s] {
                tainted |= parts[s].tainted[i];
                let mut members = parts[s].members[i].clone();
                ring.sort_by_grade(&mut members);
                let cls = CosetClass { rep: parts[s].reps[i].clone(), members, complete: false, double: di };
                let target = if s == 0 { &mut data.right } else { &mut data.left };
                index[s].insert(i, target.len());
                ids[s].push(target.len());
                target.push(cls);
            }
        }
        let mut members: Vec<ObjectId> = Vec::new();
        for &i in &order[0] {
            members.extend(parts[0].members[i].iter().cloned());
        }
        for &i in &order[1] {
            members.extend(parts[1].members[i].iter().cloned());
        }
        ring.sort_by_grade(&mut members);
        let status = if tainted {
            ClassStatus::Partial
        } else if gens_complete {
            ClassStatus::Exact
        } else {
            ClassStatus::WithinHorizon
        };
        for x in &members {
            data.double_of.insert(x.clone(), di);
        }
        let [right, left] = ids;
        data.double.push(DoubleClass { rep: doubles[di].0.clone(), members, complete: false, right, left, status });
    }
    for s in 0..2 {
        for (x, i) in &parts[s].of {
            let m = if s == 0 { &mut data.right_of } else { &mut data.left_of };
            m.insert(x.clone(), index[s][i]);
        }
    }
    Ok(data)
}

/// `L(τ)` and `R(τ)` of one double class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetCounts {
    pub class: String,
    pub l: u64,
    pub r: u64,
    pub status: ClassStatus,
}

pub fn coset_counts(ring: &dyn FusionRing, data: &CosetData) -> Vec<CosetCounts> {
    data.double
        .iter()
        .enumerate()
        .map(|(i, d)| CosetCounts { class: data.label(ring, Side::Double, i), l: d.l(), r: d.r(), status: d.status })
        .collect()
}

/// Answer of the Hecke-pair test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HeckeVerdict {
    CertifiedYes,
    YesWithinHorizon,
    No { witness: String, reason: String },
    Inconclusive(String),
}

pub fn is_hecke_pair(ring: &dyn FusionRing, sub: &SubgroupSet, data: &CosetData) -> HeckeVerdict {
    if let Some((w, reason)) = ring.unbounded_class_witness(sub) {
        return HeckeVerdict::No { witness: ring.render(&w), reason };
    }
    match data.status() {
        ClassStatus::Exact if ring.is_finite() => HeckeVerdict::CertifiedYes,
        ClassStatus::Exact | ClassStatus::WithinHorizon => HeckeVerdict::YesWithinHorizon,
        ClassStatus::Partial => HeckeVerdict::Inconclusive("some double classes escaped the horizon".into()),
    }
}

/// Objects whose double class has certified finite counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Commensurator {
    pub members: Vec<ObjectId>,
    /// Members whose certificate depends on the horizon.
    pub horizon_limited: Vec<ObjectId>,
    pub excluded: Vec<ObjectId>,
}

pub fn commensurator(ring: &dyn FusionRing, data: &CosetData) -> Commensurator {
    let mut out = Commensurator { members: Vec::new(), horizon_limited: Vec::new(), excluded: Vec::new() };
    for x in ring.enumerate_up_to(data.horizon) {
        match data.double_of(&x).map(|d| data.double[d].status) {
            Some(ClassStatus::Exact) => out.members.push(x),
            Some(ClassStatus::WithinHorizon) => {
                out.horizon_limited.push(x.clone());
                out.members.push(x);
            }
            _ => out.excluded.push(x),
        }
    }
    out
}
