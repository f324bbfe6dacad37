use qhecke_core::constructors::GroupTable;
use qhecke_core::qdouble::{minimal_idempotents, DoubleAlgebra};
use qhecke_core::Scalar;

/// Number of conjugacy classes as `#{(a, b) : ab = ba} / |G|`.
fn class_count(g: &GroupTable) -> usize {
    let n = g.order();
    let commuting = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|&(a, b)| g.mul(a, b) == g.mul(b, a)).count();
    assert_eq!(commuting % n, 0);
    commuting / n
}

#[test]
fn convolution_has_closed_form() {
    for g in [GroupTable::cyclic(3), GroupTable::symmetric(3)] {
        let alg = DoubleAlgebra::new(g.clone());
        let n = g.order();
        assert_eq!(*alg.haar_scale(), Scalar::from_u64(n as u64));
        for (a, h) in (0..n).flat_map(|a| (0..n).map(move |h| (a, h))) {
            for (b, k) in (0..n).flat_map(|b| (0..n).map(move |k| (b, k))) {
                let got = alg.convolve(&alg.basis(a, h), &alg.basis(b, k));
                let conj = g.mul(g.mul(b, k), g.inv(b));
                let want = if h == conj { alg.basis(g.mul(a, b), k) } else { alg.zero() };
                assert_eq!(got, want, "({}, {}) * ({}, {})", a, h, b, k);
            }
        }
    }
}

#[test]
fn hecke_subalgebra_counts_classes() {
    for (g, classes) in [(GroupTable::cyclic(4), 4), (GroupTable::symmetric(3), 3), (GroupTable::cyclic(2), 2)] {
        assert_eq!(class_count(&g), classes);
        let alg = DoubleAlgebra::new(g);
        assert!(alg.verify_structure().iter().all(|c| c.passed()));
        let hecke = alg.hecke_subalgebra();
        let report = alg.verify_character_identification(&hecke);
        assert_eq!(report.dimension, classes);
        assert!(report.commutative);
        assert!(report.passed(), "{:?}", report);
        let idem = minimal_idempotents(&hecke).unwrap();
        let sum = idem.iter().fold(vec![Scalar::zero(); hecke.dim()], |acc, e| {
            acc.iter().zip(e).map(|(x, y)| x + y).collect()
        });
        assert_eq!(sum, hecke.unit);
        for (i, e) in idem.iter().enumerate() {
            for (j, f) in idem.iter().enumerate() {
                let p = hecke.mul(e, f);
                if i == j {
                    assert_eq!(&p, e);
                } else {
                    assert!(p.iter().all(|x| x.is_zero()));
                }
            }
        }
        assert!(alg.verify_endomorphism_correspondence(&hecke).iter().all(|c| c.passed()));
    }
}

#[test]
fn dihedral_and_quaternion_class_counts() {
    assert_eq!(class_count(&GroupTable::dihedral(4)), 5);
    assert_eq!(class_count(&GroupTable::quaternion()), 5);
    assert_eq!(GroupTable::dihedral(4).conjugacy_classes().len(), 5);
}
