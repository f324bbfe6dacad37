use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use proptest::sample::Index;

use qhecke_core::constructors::{
    dual_q8, dual_s3, dual_z2, FreeProduct, GroupTable, Hnn, HnnRecipe, Integers, Product, RestrictedProduct,
    Su2Dual, TableRing,
};
use qhecke_core::faithful::{cokernel_support, faithful_sufficient, is_witness};
use qhecke_core::{
    coset_classes, kappa, rt_scan, CentralHeckeElement, Decomposition, FusionRing, HeckePair, ObjectId, RingExt,
    Scalar, SharedRing, SubgroupSet,
};

fn to_map(d: &Decomposition) -> BTreeMap<ObjectId, u32> {
    d.iter().cloned().collect()
}

fn tensor(ring: &dyn FusionRing, left: &BTreeMap<ObjectId, u32>, c: &ObjectId) -> BTreeMap<ObjectId, u32> {
    let mut out = BTreeMap::new();
    for (x, m) in left {
        for (y, n) in ring.fuse(x, c).unwrap().iter() {
            *out.entry(y.clone()).or_default() += m * n;
        }
    }
    out
}

struct Windowed {
    ring: SharedRing,
    window: Vec<ObjectId>,
}

fn rings() -> &'static Vec<Windowed> {
    static RINGS: OnceLock<Vec<Windowed>> = OnceLock::new();
    RINGS.get_or_init(|| {
        let hnn = HnnRecipe::profinite(Arc::new(dual_s3()), Arc::new(dual_z2())).unwrap();
        let list: Vec<(SharedRing, u32)> = vec![
            (Arc::new(Su2Dual), 16),
            (Arc::new(Integers), 16),
            (Arc::new(dual_q8()), 0),
            (Arc::new(Product::new(Arc::new(Su2Dual), Arc::new(dual_s3()))), 8),
            (Arc::new(RestrictedProduct::new(Arc::new(dual_s3()), Arc::new(dual_z2())).unwrap()), 6),
            (Arc::new(FreeProduct::new(Arc::new(Integers), Arc::new(dual_s3()))), 4),
            (Arc::new(FreeProduct::new(Arc::new(Su2Dual), Arc::new(dual_z2()))), 5),
            (Arc::new(Hnn::new(hnn, 4).unwrap()), 1),
            (Arc::new(Hnn::new(HnnRecipe::baumslag_solitar(2, 3).unwrap(), 6).unwrap()), 2),
        ];
        list.into_iter().map(|(ring, g)| Windowed { window: ring.enumerate_up_to(g), ring }).collect()
    })
}

fn pick(ix: Index) -> (&'static dyn FusionRing, &'static [ObjectId]) {
    let w = &rings()[ix.index(rings().len())];
    (w.ring.as_ref(), &w.window)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(192))]

    #[test]
    fn fusion_axioms_hold(r in any::<Index>(), i in any::<Index>(), j in any::<Index>(), k in any::<Index>()) {
        let (ring, window) = pick(r);
        let (a, b, c) = (i.get(window), j.get(window), k.get(window));
        let ab = to_map(&ring.fuse(a, b).unwrap());

        let left = tensor(ring, &ab, c);
        let mut right = BTreeMap::new();
        for (y, m) in ring.fuse(b, c).unwrap().iter() {
            for (z, n) in ring.fuse(a, y).unwrap().iter() {
                *right.entry(z.clone()).or_default() += m * n;
            }
        }
        prop_assert_eq!(left, right);

        let (oa, ob) = (ring.object(a).unwrap(), ring.object(b).unwrap());
        let mut q = Scalar::zero();
        let mut d = 0u64;
        for (x, m) in &ab {
            let o = ring.object(x).unwrap();
            q += o.qdim.mul_int(*m as u64);
            d += o.dim * *m as u64;
            prop_assert_eq!(to_map(&ring.fuse(x, &ob.conj).unwrap()).get(a).copied().unwrap_or(0), *m);
            prop_assert_eq!(to_map(&ring.fuse(&oa.conj, x).unwrap()).get(b).copied().unwrap_or(0), *m);
            prop_assert!(o.grade <= oa.grade + ob.grade);
        }
        prop_assert_eq!(q, &oa.qdim * &ob.qdim);
        prop_assert_eq!(d, oa.dim * ob.dim);

        let conj: BTreeMap<ObjectId, u32> =
            ab.iter().map(|(x, m)| (ring.conj(x).unwrap(), *m)).collect();
        prop_assert_eq!(conj, to_map(&ring.fuse(&ob.conj, &oa.conj).unwrap()));
        let au = ring.fuse(a, &ring.unit()).unwrap();
        prop_assert_eq!(au.as_single(), Some(a));
        prop_assert_eq!(to_map(&ring.fuse(a, &oa.conj).unwrap()).get(&ring.unit()).copied(), Some(1));
    }

    #[test]
    fn enumeration_is_deterministic(r in any::<Index>(), g in 0u32..4) {
        let w = &rings()[r.index(rings().len())];
        let first = w.ring.enumerate_up_to(g);
        prop_assert_eq!(&first, &w.ring.enumerate_up_to(g));
        let keys: Vec<(u32, ObjectId)> = first.iter().map(|x| w.ring.order_key(x)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(keys, sorted);
    }
}

fn group(ix: usize) -> &'static (GroupTable, TableRing) {
    static GROUPS: OnceLock<Vec<(GroupTable, TableRing)>> = OnceLock::new();
    let all = GROUPS.get_or_init(|| {
        [GroupTable::symmetric(4), GroupTable::dihedral(4), GroupTable::quaternion(), GroupTable::dihedral(6)]
            .into_iter()
            .map(|g| {
                let r = TableRing::pointed("G", &g);
                (g, r)
            })
            .collect()
    });
    &all[ix % all.len()]
}

fn generated(g: &GroupTable, gens: &[usize]) -> BTreeSet<usize> {
    let mut s: BTreeSet<usize> = gens.iter().map(|x| x % g.order()).collect();
    s.insert(g.identity());
    loop {
        let next: BTreeSet<usize> = s.iter().flat_map(|&a| s.iter().map(move |&b| g.mul(a, b))).collect();
        if next == s {
            return s;
        }
        s = next;
    }
}

fn atoms(s: &BTreeSet<usize>) -> Vec<ObjectId> {
    s.iter().map(|&i| ObjectId::Atom(i as u32)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn classes_partition_and_dualize(gi in 0usize..4, gens in prop::collection::vec(0usize..24, 0..3)) {
        let (g, ring) = group(gi);
        let h = generated(g, &gens);
        let sub = SubgroupSet::from_members(ring, &atoms(&h)).unwrap();
        let data = coset_classes(ring, &sub, 0).unwrap();
        for side in [&data.right, &data.left] {
            let mut seen = BTreeSet::new();
            for c in side.iter() {
                prop_assert_eq!(c.members.len(), h.len());
                for m in &c.members {
                    prop_assert!(seen.insert(m.clone()));
                }
            }
            prop_assert_eq!(seen.len(), g.order());
        }
        for c in &data.right {
            let image: BTreeSet<ObjectId> = c.members.iter().map(|x| ring.conj(x).unwrap()).collect();
            let l = data.left_of(&ring.conj(&c.rep).unwrap()).unwrap();
            let target: BTreeSet<ObjectId> = data.left[l].members.iter().cloned().collect();
            prop_assert_eq!(image, target);
        }
        for d in &data.double {
            let all: BTreeSet<ObjectId> = d.members.iter().cloned().collect();
            let from_right: BTreeSet<ObjectId> = d.right.iter().flat_map(|&r| data.right[r].members.iter().cloned()).collect();
            let from_left: BTreeSet<ObjectId> = d.left.iter().flat_map(|&l| data.left[l].members.iter().cloned()).collect();
            prop_assert_eq!(&all, &from_right);
            prop_assert_eq!(&all, &from_left);
        }
        for a in ring.enumerate_up_to(0) {
            for b in ring.enumerate_up_to(0) {
                let same = data.right_of(&a) == data.right_of(&b);
                let k = kappa(ring, &sub, &ring.conj(&a).unwrap(), &b).unwrap();
                prop_assert_eq!(!k.is_zero(), same);
            }
        }
    }

    #[test]
    fn witnesses_match_the_core(gi in 0usize..4, gens in prop::collection::vec(0usize..24, 0..3)) {
        let (g, ring) = group(gi);
        let h = generated(g, &gens);
        let sub = SubgroupSet::from_members(ring, &atoms(&h)).unwrap();
        let report = faithful_sufficient(ring, &sub, 0);
        let core: BTreeSet<usize> = h
            .iter()
            .cloned()
            .filter(|&x| (0..g.order()).all(|y| h.contains(&g.mul(g.mul(g.inv(y), x), y))))
            .filter(|&x| x != g.identity())
            .collect();
        let missing: BTreeSet<usize> = report.missing.iter().map(|x| x.as_atom().unwrap() as usize).collect();
        prop_assert_eq!(missing, core);
        for (alpha, gamma) in &report.witnesses {
            prop_assert!(is_witness(ring, &sub, alpha, gamma).unwrap());
        }

        let pair = HeckePair::new(ring, &sub, 0).unwrap();
        let support = cokernel_support(&pair).unwrap();
        prop_assert!(support.objects.contains(&ring.unit()));
        for x in &support.objects {
            prop_assert!(support.objects.contains(&ring.conj(x).unwrap()));
        }
        prop_assert!(support.note.is_none());
    }

    #[test]
    fn canonical_state_is_positive(gi in 0usize..4, gens in prop::collection::vec(0usize..24, 0..3),
                                   coeffs in prop::collection::vec(-5i64..=5, 12)) {
        let (g, ring) = group(gi);
        let h = generated(g, &gens);
        let sub = SubgroupSet::from_members(ring, &atoms(&h)).unwrap();
        let pair = HeckePair::new(ring, &sub, 0).unwrap();
        let classes: Vec<usize> = (0..pair.cosets.double.len()).collect();
        let table = pair.structure_table(&classes).unwrap();
        prop_assert!(table.passed());
        let c = |t: usize| Scalar::from_int(coeffs[t % coeffs.len()]);
        let mut value = Scalar::zero();
        for &a in &classes {
            let bar = pair.involution_class(a).unwrap();
            for &b in &classes {
                value += c(a) * c(b) * table.n(bar, b, pair.unit_class()).unwrap();
            }
        }
        prop_assert!(!value.is_negative());
        let x = CentralHeckeElement { coeffs: classes.iter().map(|&t| (t, c(t))).collect(), status: pair.cosets.status() };
        prop_assert_eq!(pair.omega(&x), c(pair.unit_class()));
    }
}

#[test]
fn rt_scan_is_monotone_in_the_grade() {
    let fp = Arc::new(FreeProduct::new(Arc::new(Integers), Arc::new(Su2Dual)));
    let sub = fp.factor_subgroup(1).unwrap();
    let beta = [fp.parse("1:-1").unwrap()];
    let mut last = Scalar::zero();
    for g in 2..=6 {
        let r = rt_scan(fp.as_ref(), &sub, g, Some(&beta))[0].ratio.clone();
        assert!(r >= last, "grade {}: {} < {}", g, r, last);
        last = r;
    }
    assert_eq!(last, Scalar::from_int(36));
}

#[test]
fn infinite_subgroup_noted_as_non_discrete() {
    let fp = Arc::new(FreeProduct::new(Arc::new(Integers), Arc::new(dual_s3())));
    let sub = fp.factor_subgroup(0).unwrap();
    let pair = HeckePair::new(fp.as_ref(), &sub, 2).unwrap();
    let support = cokernel_support(&pair).unwrap();
    assert!(support.note.unwrap().contains("non-discrete"));
    assert!(support.objects.contains(&fp.unit()));
}

/// `BS(1,n)` and `BS(m,1)` act faithfully on `ℚ` by affine maps, which gives
/// an independent normal form check.
#[test]
fn baumslag_solitar_words_match_affine_model() {
    for (m, n) in [(1i64, 2i64), (1, 3), (2, 1)] {
        let hnn = Hnn::new(HnnRecipe::baumslag_solitar(m, n).unwrap(), 6).unwrap();
        let slope = Scalar::ratio(n, m);
        let affine = |id: &ObjectId| -> (Scalar, Scalar) {
            let items = id.as_tuple().unwrap();
            let (mut s, mut t) = (Scalar::one(), Scalar::zero());
            let mut apply = |a: Scalar, b: Scalar| {
                t = &s * &b + &t;
                s = &s * &a;
            };
            for pair in items[..items.len() - 1].chunks(2) {
                apply(Scalar::one(), Scalar::from_int(pair[0].as_int().unwrap()));
                let e = pair[1].as_int().unwrap();
                let a = if e > 0 { slope.clone() } else { slope.recip().unwrap() };
                apply(a, Scalar::zero());
            }
            apply(Scalar::one(), Scalar::from_int(items[items.len() - 1].as_int().unwrap()));
            (s, t)
        };
        let window = hnn.enumerate_up_to(4);
        let images: BTreeSet<(Scalar, Scalar)> = window.iter().map(&affine).collect();
        assert_eq!(images.len(), window.len(), "BS({},{}) normal forms collide", m, n);
        for x in window.iter().take(60) {
            for y in window.iter().take(60) {
                let z = hnn.fuse(x, y).unwrap();
                let z = z.as_single().unwrap();
                let ((s1, t1), (s2, t2)) = (affine(x), affine(y));
                assert_eq!(affine(z), (&s1 * &s2, &s1 * &t2 + &t1));
            }
        }
    }
}
