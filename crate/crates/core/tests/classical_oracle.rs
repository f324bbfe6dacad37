//! Hecke pairs of pointed rings checked against direct double-coset counting
//! in the underlying finite group.

use std::collections::BTreeSet;

use qhecke_core::constructors::{GroupTable, TableRing};
use qhecke_core::{operator_norm_estimate, HeckePair, ObjectId, Scalar, SubgroupSet};

type Set = BTreeSet<usize>;

struct Oracle<'a> {
    g: &'a GroupTable,
    h: Set,
}

impl<'a> Oracle<'a> {
    fn left_coset(&self, x: usize) -> Set {
        self.h.iter().map(|&h| self.g.mul(x, h)).collect()
    }

    fn right_coset(&self, x: usize) -> Set {
        self.h.iter().map(|&h| self.g.mul(h, x)).collect()
    }

    fn double(&self, x: usize) -> Set {
        let mut out = Set::new();
        for &a in &self.h {
            for &b in &self.h {
                out.insert(self.g.mul(self.g.mul(a, x), b));
            }
        }
        out
    }

    fn partition(&self, f: impl Fn(usize) -> Set) -> Vec<Set> {
        let mut seen: BTreeSet<Set> = BTreeSet::new();
        for x in 0..self.g.order() {
            seen.insert(f(x));
        }
        seen.into_iter().collect()
    }

    /// Coefficient of the indicator of `target` in `1_d * 1_d2`, counting
    /// cosets `yH ⊂ d` with `y⁻¹x ∈ d2` for a point `x` of `target`.
    fn convolution(&self, d: &Set, d2: &Set, target: &Set) -> u64 {
        let x = *target.iter().next().unwrap();
        self.partition(|y| self.left_coset(y))
            .iter()
            .filter(|c| c.is_subset(d))
            .filter(|c| {
                let y = *c.iter().next().unwrap();
                d2.contains(&self.g.mul(self.g.inv(y), x))
            })
            .count() as u64
    }
}

fn subgroups(g: &GroupTable) -> Vec<Set> {
    let n = g.order();
    let close = |gens: &[usize]| -> Set {
        let mut s: Set = std::iter::once(g.identity()).chain(gens.iter().cloned()).collect();
        loop {
            let next: Set = s.iter().flat_map(|&a| s.iter().map(move |&b| (a, b))).map(|(a, b)| g.mul(a, b)).collect();
            if next == s {
                return s;
            }
            s = next;
        }
    };
    let mut out: BTreeSet<Set> = BTreeSet::new();
    for a in 0..n {
        for b in a..n {
            out.insert(close(&[a, b]));
        }
    }
    out.into_iter().collect()
}

fn atoms(s: &Set) -> Vec<ObjectId> {
    s.iter().map(|&i| ObjectId::Atom(i as u32)).collect()
}

fn member_set(ids: &[ObjectId]) -> Set {
    ids.iter().map(|x| x.as_atom().unwrap() as usize).collect()
}

fn check_pair(g: &GroupTable, h: &Set) {
    let ring = TableRing::pointed("G", g);
    let sub = SubgroupSet::from_members(&ring, &atoms(h)).unwrap();
    let pair = HeckePair::new(&ring, &sub, 0).unwrap();
    let oracle = Oracle { g, h: h.clone() };
    let ctx = format!("{:?} in group of order {}", h, g.order());

    let rights = oracle.partition(|x| oracle.left_coset(x));
    let lefts = oracle.partition(|x| oracle.right_coset(x));
    let doubles = oracle.partition(|x| oracle.double(x));
    assert_eq!(pair.cosets.right.len(), rights.len(), "{}", ctx);
    assert_eq!(pair.cosets.left.len(), lefts.len(), "{}", ctx);
    assert_eq!(pair.cosets.double.len(), doubles.len(), "{}", ctx);
    for c in &pair.cosets.right {
        assert!(c.complete);
        let rep = c.rep.as_atom().unwrap() as usize;
        assert_eq!(member_set(&c.members), oracle.left_coset(rep), "{}", ctx);
    }
    for c in &pair.cosets.left {
        let rep = c.rep.as_atom().unwrap() as usize;
        assert_eq!(member_set(&c.members), oracle.right_coset(rep), "{}", ctx);
    }
    let sets: Vec<Set> = pair.cosets.double.iter().map(|d| member_set(&d.members)).collect();
    for (d, set) in pair.cosets.double.iter().zip(&sets) {
        assert!(doubles.contains(set), "{}", ctx);
        let r = rights.iter().filter(|c| c.is_subset(set)).count() as u64;
        let l = lefts.iter().filter(|c| c.is_subset(set)).count() as u64;
        assert_eq!((d.r(), d.l()), (r, l), "{}", ctx);
    }

    let all: Vec<usize> = (0..sets.len()).collect();
    let table = pair.structure_table(&all).unwrap();
    assert!(table.passed(), "{}", ctx);
    for a in &all {
        for b in &all {
            for c in &all {
                let want = Scalar::from_u64(oracle.convolution(&sets[*a], &sets[*b], &sets[*c]));
                assert_eq!(table.n(*a, *b, *c).unwrap(), want, "N[{},{}]^{} for {}", a, b, c, ctx);
            }
            let prod = pair.double_class_product(*a, *b).unwrap();
            assert_eq!(prod, table.entries[&(*a, *b)]);
            let unit_coeff = oracle.convolution(&sets[*a], &sets[*b], &oracle.double(g.identity()));
            assert_eq!(pair.omega(&prod), Scalar::from_u64(unit_coeff), "{}", ctx);
        }
        assert_eq!(pair.nabla(*a).unwrap(), Scalar::one(), "{}", ctx);
    }
    for s in 0..pair.cosets.right.len() {
        assert_eq!(pair.mu(s).unwrap(), Scalar::one());
    }
    assert!(pair.verify_kms(&table).passed());
    assert!(pair.verify_grouplike(0).passed());

    for tau in &all {
        let m = pair.operator_matrix(*tau).unwrap();
        for (r, &rho) in m.classes.iter().enumerate() {
            for (c, &sigma) in m.classes.iter().enumerate() {
                let gr = pair.cosets.right[rho].rep.as_atom().unwrap() as usize;
                let gs = pair.cosets.right[sigma].rep.as_atom().unwrap() as usize;
                let hit = sets[*tau].contains(&g.mul(g.inv(gs), gr));
                assert_eq!(m.entries[r][c], Scalar::from_u64(hit as u64), "M[{}][{}] for {}", r, c, ctx);
            }
        }
        assert!(pair.verify_adjoint(*tau).unwrap().passed());
    }
}

#[test]
fn every_subgroup_of_small_groups_matches() {
    for g in [GroupTable::symmetric(3), GroupTable::dihedral(4), GroupTable::cyclic(4), GroupTable::quaternion()] {
        for h in subgroups(&g) {
            check_pair(&g, &h);
        }
    }
}

#[test]
fn selected_subgroups_of_s4_match() {
    let g = GroupTable::symmetric(4);
    let subs = subgroups(&g);
    for h in subs.iter().filter(|h| [2, 3, 4, 6].contains(&h.len())).take(8) {
        check_pair(&g, h);
    }
}

#[test]
fn s3_with_transposition() {
    let g = GroupTable::symmetric(3);
    let ring = TableRing::pointed("S3", &g);
    let ids = [ring_id(&ring, "e"), ring_id(&ring, "(12)")];
    let sub = SubgroupSet::from_members(&ring, &ids).unwrap();
    let pair = HeckePair::new(&ring, &sub, 0).unwrap();
    assert_eq!(pair.cosets.double.len(), 2);
    let t0 = pair.unit_class();
    let t1 = pair.find_double("(13)").unwrap();
    let p = pair.double_class_product(t1, t1).unwrap();
    assert_eq!(p.coeff(t0), Scalar::from_int(2));
    assert_eq!(p.coeff(t1), Scalar::from_int(1));
    assert_eq!((pair.cosets.double[t1].l(), pair.cosets.double[t1].r()), (2, 2));

    let m = pair.operator_matrix(t1).unwrap();
    let est = operator_norm_estimate(&m);
    assert!((est.lower - 2.0).abs() < 1e-9, "{:?}", est);
    assert!((est.upper - 2.0).abs() < 1e-9, "{:?}", est);
}

fn ring_id(ring: &TableRing, name: &str) -> ObjectId {
    use qhecke_core::FusionRing;
    ring.parse(name).unwrap()
}
