use std::sync::Arc;

use qhecke_core::constructors::{dual_s3, dual_z2, EvenSpins, FreeProduct, Hnn, HnnRecipe, Integers, Su2Dual};
use qhecke_core::faithful::{faithful_sufficient, hnn_theta_domains, is_witness, FaithfulStatus};
use qhecke_core::{
    check_class_invariance, coset_classes, kappa_self, FusionRing, HeckePair, ObjectId, RingExt, Scalar, SubgroupSet,
};

fn int(n: i64) -> Scalar {
    Scalar::from_int(n)
}

#[test]
fn free_product_kappa_is_two_sided() {
    let fp = Arc::new(FreeProduct::new(Arc::new(Integers), Arc::new(dual_s3())));
    let sub = fp.factor_subgroup(1).unwrap();
    let v = fp.factor(1).parse("v").unwrap();
    let alpha = FreeProduct::word(&[(1, v.clone()), (0, ObjectId::Int(1))]);
    assert_eq!(kappa_self(fp.as_ref(), &sub, &alpha).unwrap(), int(1));
    let bar = fp.conj(&alpha).unwrap();
    assert_eq!(kappa_self(fp.as_ref(), &sub, &bar).unwrap(), int(4));
    assert_eq!(kappa_self(fp.as_ref(), &sub, &fp.embed(1, v)).unwrap(), int(4));

    let data = coset_classes(fp.as_ref(), &sub, 4).unwrap();
    assert!(check_class_invariance(fp.as_ref(), &sub, &data).passed());
}

#[test]
fn su2_over_so3_is_normal() {
    let ring = Su2Dual;
    let sub = SubgroupSet::from_rule(Arc::new(EvenSpins));
    let pair = HeckePair::new(&ring, &sub, 20).unwrap();
    assert_eq!(pair.cosets.double.len(), 2);
    for d in &pair.cosets.double {
        assert_eq!((d.l(), d.r()), (1, 1));
    }
    let zero = pair.unit_class();
    let odd = pair.find_double("1").unwrap();
    let table = pair.structure_table(&[zero, odd]).unwrap();
    assert!(table.passed());
    let expect = |a, b, c| if (a == odd) ^ (b == odd) == (c == odd) { int(1) } else { int(0) };
    for a in [zero, odd] {
        for b in [zero, odd] {
            for c in [zero, odd] {
                assert_eq!(table.n(a, b, c).unwrap(), expect(a, b, c));
            }
        }
    }
    let sigma = pair.cosets.double[odd].right[0];
    let left = pair.cosets.double[odd].left[0];
    let per_object = pair.class_product(sigma, left).unwrap();
    for x in &per_object.evaluated {
        let want = if x.as_int().unwrap() % 2 == 0 { int(1) } else { int(0) };
        assert_eq!(pair.coefficient_at(sigma, left, x).unwrap(), want, "at {:?}", x);
    }
    assert!(per_object.evaluated.len() >= 11);
    assert!(pair.verify_kms(&table).passed());
    assert!(pair.verify_grouplike(20).passed());
}

fn profinite() -> Arc<Hnn> {
    let recipe = HnnRecipe::profinite(Arc::new(dual_s3()), Arc::new(dual_z2())).unwrap();
    Arc::new(Hnn::new(recipe, 4).unwrap())
}

#[test]
fn profinite_hnn_matches_closed_forms() {
    let hnn = profinite();
    let sub = hnn.base_subgroup();
    let cf = hnn.recipe().closed_forms().unwrap();
    assert_eq!((cf.l_w, cf.r_w), (3, 2));
    assert_eq!((cf.l_tilde.clone(), cf.r_tilde.clone(), cf.nabla_w.clone()), (int(6), int(2), int(3)));

    let pair = HeckePair::new(hnn.as_ref(), &sub, 2).unwrap();
    let tw = pair.cosets.double_of(&hnn.w(1)).unwrap();
    let d = &pair.cosets.double[tw];
    assert_eq!((d.l(), d.r()), (3, 2));
    assert_eq!(pair.nabla(tw).unwrap(), int(3));
    let tbar = pair.cosets.double_of(&hnn.w(-1)).unwrap();
    assert_eq!(pair.nabla(tbar).unwrap(), Scalar::ratio(1, 3));
    let ww = pair.cosets.double_of(&hnn.w_power(2)).unwrap();
    assert_eq!(pair.nabla(ww).unwrap(), int(9));

    let classes: Vec<usize> = vec![pair.unit_class(), tw, tbar];
    let table = pair.structure_table(&classes).unwrap();
    assert!(pair.verify_kms(&table).passed());
    assert!(pair.verify_adjoint(tw).unwrap().passed());
}

#[test]
fn stable_letter_times_base_is_simple() {
    let hnn = profinite();
    for x in hnn.recipe().base.enumerate_up_to(3) {
        for eps in [1, -1] {
            let d = hnn.fuse(&hnn.embed(x.clone()), &hnn.w(eps)).unwrap();
            assert!(d.as_single().is_some(), "{:?}", d);
            assert_eq!(hnn.qdim(d.as_single().unwrap()).unwrap(), hnn.recipe().base.qdim(&x).unwrap());
        }
    }
}

#[test]
fn profinite_theta_domains_and_faithfulness() {
    let hnn = profinite();
    let report = hnn_theta_domains(hnn.recipe(), 5);
    assert!(report.trivial);
    assert_eq!(report.intersection, vec![hnn.recipe().base.unit()]);

    let sub = hnn.base_subgroup();
    let f = faithful_sufficient(hnn.as_ref(), &sub, 3);
    assert_eq!(f.status, FaithfulStatus::CertifiedFaithful);
    assert!(f.missing.is_empty());
    let base_objects: Vec<ObjectId> =
        hnn.enumerate_up_to(3).into_iter().filter(|x| hnn.as_base(x).is_some() && *x != hnn.unit()).collect();
    assert!(!base_objects.is_empty());
    for x in &base_objects {
        let gamma = &f.witnesses[x];
        let k = hnn.word_length(gamma).unwrap() as i64;
        assert!(k > 0 && (gamma == &hnn.w_power(k) || gamma == &hnn.w_power(-k)), "{:?}", gamma);
        assert!(is_witness(hnn.as_ref(), &sub, x, gamma).unwrap());
    }
}

#[test]
fn baumslag_solitar_indices() {
    for (m, n) in [(1, 2), (2, 3), (2, 2), (3, 1)] {
        let recipe = HnnRecipe::baumslag_solitar(m, n).unwrap();
        let cf = recipe.closed_forms().unwrap();
        assert_eq!((cf.l_w, cf.r_w), (m as u64, n as u64));
        assert_eq!(cf.nabla_w, Scalar::ratio(m, n));
        let hnn = Arc::new(Hnn::new(recipe, 6).unwrap());
        let sub = hnn.base_subgroup();
        let pair = HeckePair::new(hnn.as_ref(), &sub, 3).unwrap();
        let tw = pair.cosets.double_of(&hnn.w(1)).unwrap();
        let d = &pair.cosets.double[tw];
        assert_eq!((d.l(), d.r()), (m as u64, n as u64), "BS({},{})", m, n);
        assert_eq!(pair.nabla(tw).unwrap(), Scalar::ratio(m, n));
    }
}

#[test]
fn degenerate_hnn_cases() {
    let center = HnnRecipe::su2_center();
    let cf = center.closed_forms().unwrap();
    assert_eq!((cf.l_tilde, cf.r_tilde, cf.nabla_w), (int(2), int(2), int(1)));
    assert!(Hnn::new(center, 4).is_err());

    let trivial = HnnRecipe::trivial(Arc::new(dual_s3())).unwrap();
    let cf = trivial.closed_forms().unwrap();
    assert_eq!((cf.l_w, cf.r_w, cf.nabla_w.clone()), (1, 1, int(1)));
    let hnn = Arc::new(Hnn::new(trivial, 2).unwrap());
    let sub = hnn.base_subgroup();
    let pair = HeckePair::new(hnn.as_ref(), &sub, 2).unwrap();
    let tw = pair.cosets.double_of(&hnn.w(1)).unwrap();
    assert_eq!((pair.cosets.double[tw].l(), pair.cosets.double[tw].r()), (1, 1));
    assert_eq!(pair.nabla(tw).unwrap(), int(1));
}
