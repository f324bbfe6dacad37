//! Fusion rules of the built-in rings against independent computations.

use std::collections::BTreeMap;
use std::sync::Arc;

use qhecke_core::constructors::{
    dual_q8, dual_s3, dual_z2, FreeProduct, Integers, Product, RestrictedProduct, Su2Dual, TableRing,
};
use qhecke_core::{validate_ring, Decomposition, FusionRing, ObjectId, RingExt, Scalar, SharedRing};

fn su2_weights(n: i64) -> Vec<i64> {
    (0..=n).map(|k| n - 2 * k).collect()
}

/// Peels highest weights off the weight multiset of the tensor product.
fn su2_oracle(m: i64, n: i64) -> BTreeMap<i64, u32> {
    let mut weights: BTreeMap<i64, i64> = BTreeMap::new();
    for a in su2_weights(m) {
        for b in su2_weights(n) {
            *weights.entry(a + b).or_default() += 1;
        }
    }
    let mut out = BTreeMap::new();
    while let Some((&top, _)) = weights.iter().rev().find(|(_, c)| **c > 0) {
        *out.entry(top).or_default() += 1;
        for w in su2_weights(top) {
            *weights.get_mut(&w).unwrap() -= 1;
        }
    }
    out
}

fn as_map(d: &Decomposition) -> BTreeMap<ObjectId, u32> {
    d.iter().cloned().collect()
}

#[test]
fn su2_matches_weight_multisets() {
    let ring = Su2Dual;
    for m in 0..=14 {
        for n in 0..=14 {
            let want: BTreeMap<ObjectId, u32> =
                su2_oracle(m, n).into_iter().map(|(k, c)| (ObjectId::Int(k), c)).collect();
            assert_eq!(as_map(&ring.fuse(&ObjectId::Int(m), &ObjectId::Int(n)).unwrap()), want, "{} x {}", m, n);
        }
        assert_eq!(ring.qdim(&ObjectId::Int(m)).unwrap(), Scalar::from_int(m + 1));
    }
}

/// Multiplicities `⟨χ_a χ_b, χ_c⟩` from a real character table.
fn character_oracle(ring: &TableRing, sizes: &[i64], chars: &[(&str, Vec<i64>)]) {
    let order: i64 = sizes.iter().sum();
    for (a, ca) in chars {
        for (b, cb) in chars {
            let mut want = BTreeMap::new();
            for (c, cc) in chars {
                let s: i64 = (0..sizes.len()).map(|k| sizes[k] * ca[k] * cb[k] * cc[k]).sum();
                assert_eq!(s % order, 0);
                if s != 0 {
                    want.insert(ring.parse(c).unwrap(), (s / order) as u32);
                }
            }
            let got = ring.fuse(&ring.parse(a).unwrap(), &ring.parse(b).unwrap()).unwrap();
            assert_eq!(as_map(&got), want, "{} x {} in {}", a, b, ring.name());
        }
        assert_eq!(ring.dim(&ring.parse(a).unwrap()).unwrap(), ca[0] as u64);
    }
    let total: i64 = chars.iter().map(|(_, c)| c[0] * c[0]).sum();
    assert_eq!(total, order);
}

#[test]
fn representation_rings_match_character_tables() {
    character_oracle(
        &dual_s3(),
        &[1, 3, 2],
        &[("1", vec![1, 1, 1]), ("sgn", vec![1, -1, 1]), ("v", vec![2, 0, -1])],
    );
    character_oracle(
        &dual_q8(),
        &[1, 1, 2, 2, 2],
        &[
            ("1", vec![1, 1, 1, 1, 1]),
            ("a", vec![1, 1, 1, -1, -1]),
            ("b", vec![1, 1, -1, 1, -1]),
            ("c", vec![1, 1, -1, -1, 1]),
            ("h", vec![2, -2, 0, 0, 0]),
        ],
    );
    character_oracle(&dual_z2(), &[1, 1], &[("1", vec![1, 1]), ("s", vec![1, -1])]);
}

#[test]
fn integers_and_products() {
    let z = Integers;
    for m in -6..=6 {
        for n in -6..=6 {
            let d = z.fuse(&ObjectId::Int(m), &ObjectId::Int(n)).unwrap();
            assert_eq!(d.as_single(), Some(&ObjectId::Int(m + n)));
        }
        assert_eq!(z.conj(&ObjectId::Int(m)).unwrap(), ObjectId::Int(-m));
    }

    let left: SharedRing = Arc::new(Su2Dual);
    let right: SharedRing = Arc::new(dual_s3());
    let p = Product::new(left.clone(), right.clone());
    for a in p.enumerate_up_to(3) {
        for b in p.enumerate_up_to(3) {
            let (x, y) = (a.as_tuple().unwrap(), b.as_tuple().unwrap());
            let mut want = BTreeMap::new();
            for (u, m) in left.fuse(&x[0], &y[0]).unwrap().iter() {
                for (v, n) in right.fuse(&x[1], &y[1]).unwrap().iter() {
                    *want.entry(Product::pair(u.clone(), v.clone())).or_default() += m * n;
                }
            }
            assert_eq!(as_map(&p.fuse(&a, &b).unwrap()), want);
        }
    }
}

#[test]
fn restricted_product_fuses_positionwise() {
    let plus: SharedRing = Arc::new(dual_s3());
    let minus: SharedRing = Arc::new(dual_z2());
    let rp = RestrictedProduct::new(plus.clone(), minus.clone()).unwrap();
    let window = rp.enumerate_up_to(4);
    for a in &window {
        for b in &window {
            let (la, lb) = (rp.letters(a).unwrap(), rp.letters(b).unwrap());
            let mut positions: Vec<i64> = la.iter().chain(&lb).map(|(k, _)| *k).collect();
            positions.sort();
            positions.dedup();
            let mut partial: Vec<(Vec<(i64, ObjectId)>, u32)> = vec![(vec![], 1)];
            for k in positions {
                let f = rp.factor_at(k);
                let get = |l: &[(i64, ObjectId)]| l.iter().find(|(p, _)| *p == k).map(|(_, x)| x.clone()).unwrap_or(f.unit());
                let d = f.fuse(&get(&la), &get(&lb)).unwrap();
                partial = partial
                    .into_iter()
                    .flat_map(|(w, m)| {
                        d.iter().map(move |(x, n)| {
                            let mut w = w.clone();
                            w.push((k, x.clone()));
                            (w, m * n)
                        }).collect::<Vec<_>>()
                    })
                    .collect();
            }
            let mut want = BTreeMap::new();
            for (w, m) in partial {
                *want.entry(rp.word(&w)).or_default() += m;
            }
            assert_eq!(as_map(&rp.fuse(a, b).unwrap()), want);
        }
    }
}

type Letter = (usize, ObjectId);

/// Worklist reduction of `u ⊗ v` for words in a free product.
fn free_oracle(factors: &[SharedRing; 2], u: &[Letter], v: &[Letter]) -> BTreeMap<ObjectId, u32> {
    let mut out = BTreeMap::new();
    let mut work: Vec<(Vec<Letter>, Vec<Letter>, u32)> = vec![(u.to_vec(), v.to_vec(), 1)];
    while let Some((mut l, mut r, m)) = work.pop() {
        match (l.last().cloned(), r.first().cloned()) {
            (Some(x), Some(y)) if x.0 == y.0 => {
                l.pop();
                r.remove(0);
                let f = &factors[x.0];
                for (z, n) in f.fuse(&x.1, &y.1).unwrap().iter() {
                    if *z == f.unit() {
                        work.push((l.clone(), r.clone(), m * n));
                    } else {
                        let mut w = l.clone();
                        w.push((x.0, z.clone()));
                        w.extend(r.iter().cloned());
                        *out.entry(FreeProduct::word(&w)).or_default() += m * n;
                    }
                }
            }
            _ => {
                l.extend(r);
                *out.entry(FreeProduct::word(&l)).or_default() += m;
            }
        }
    }
    out
}

fn check_free(first: SharedRing, second: SharedRing, g: u32) {
    let factors = [first.clone(), second.clone()];
    let fp = FreeProduct::new(first, second);
    let window = fp.enumerate_up_to(g);
    assert!(window.len() > 10);
    for a in &window {
        let la = fp.letters(a).unwrap();
        let o = fp.object(a).unwrap();
        let mut qdim = Scalar::one();
        let mut grade = 0;
        for (i, x) in &la {
            let fo = factors[*i].object(x).unwrap();
            qdim *= &fo.qdim;
            grade += fo.grade.max(1);
        }
        assert_eq!((o.qdim, o.grade), (qdim, grade));
        let conj: Vec<Letter> = la.iter().rev().map(|(i, x)| (*i, factors[*i].conj(x).unwrap())).collect();
        assert_eq!(o.conj, FreeProduct::word(&conj));
        for b in &window {
            let lb = fp.letters(b).unwrap();
            assert_eq!(as_map(&fp.fuse(a, b).unwrap()), free_oracle(&factors, &la, &lb));
        }
    }
}

#[test]
fn free_products_match_worklist_reduction() {
    check_free(Arc::new(Integers), Arc::new(dual_s3()), 4);
    check_free(Arc::new(Integers), Arc::new(Su2Dual), 4);
    check_free(Arc::new(dual_z2()), Arc::new(dual_q8()), 6);
}

/// `ℤ * ℤ/2` is pointed, so products are single reduced group words.
#[test]
fn pointed_free_product_is_a_group() {
    let fp = FreeProduct::new(Arc::new(Integers), Arc::new(dual_z2()));
    let window = fp.enumerate_up_to(5);
    let reduce = |mut w: Vec<Letter>| -> Vec<Letter> {
        let mut out: Vec<Letter> = Vec::new();
        for l in w.drain(..) {
            match out.last() {
                Some((0, ObjectId::Int(k))) if l.0 == 0 => {
                    let s = k + l.1.as_int().unwrap();
                    out.pop();
                    if s != 0 {
                        out.push((0, ObjectId::Int(s)));
                    }
                }
                Some((1, _)) if l.0 == 1 => {
                    out.pop();
                }
                _ => out.push(l),
            }
        }
        out
    };
    for a in &window {
        for b in &window {
            let mut w = fp.letters(a).unwrap();
            w.extend(fp.letters(b).unwrap());
            let d = fp.fuse(a, b).unwrap();
            assert_eq!(d.as_single(), Some(&FreeProduct::word(&reduce(w))));
        }
    }
}

#[test]
fn built_in_rings_validate() {
    let rings: Vec<(SharedRing, u32)> = vec![
        (Arc::new(dual_s3()), 0),
        (Arc::new(dual_q8()), 0),
        (Arc::new(dual_z2()), 0),
        (Arc::new(Su2Dual), 12),
        (Arc::new(Integers), 12),
        (Arc::new(RestrictedProduct::new(Arc::new(dual_s3()), Arc::new(dual_z2())).unwrap()), 5),
        (Arc::new(FreeProduct::new(Arc::new(Integers), Arc::new(dual_s3()))), 4),
    ];
    for (r, g) in rings {
        let rep = validate_ring(r.as_ref(), g);
        assert!(rep.passed(), "{}: {:?}", r.name(), rep);
        assert!(rep.checks.iter().any(|c| c.axiom == "associativity" && c.checked > 0));
    }
}
