use std::collections::BTreeMap;

use std::sync::Arc;

use qhecke_core::constructors::{dual_s3, GroupTable, HnnRecipe, Su2Dual, TableObject, TableRing};
use qhecke_core::{
    validate_ring, Decomposition, Error, FusionRing, ObjectId, Result, Scalar, SimpleObject, SubgroupSet,
    ValidationReport,
};

fn obj(name: &str, dim: u64, conj: u32) -> TableObject {
    TableObject { name: name.into(), grade: 0, dim, qdim: Scalar::from_u64(dim), conj }
}

/// `1, sgn, v` with the products of the representation ring of `S₃`.
fn s3_table() -> BTreeMap<(u32, u32), Vec<(u32, u32)>> {
    let mut t = BTreeMap::new();
    for a in 0..3 {
        t.insert((0, a), vec![(a, 1)]);
        t.insert((a, 0), vec![(a, 1)]);
    }
    t.insert((1, 1), vec![(0, 1)]);
    t.insert((1, 2), vec![(2, 1)]);
    t.insert((2, 1), vec![(2, 1)]);
    t.insert((2, 2), vec![(0, 1), (1, 1), (2, 1)]);
    t
}

fn s3_objects() -> Vec<TableObject> {
    vec![obj("1", 1, 0), obj("sgn", 1, 1), obj("v", 2, 2)]
}

fn failing(rep: &ValidationReport) -> Vec<&str> {
    rep.checks.iter().filter(|c| !c.passed()).map(|c| c.axiom.as_str()).collect()
}

fn witness<'a>(rep: &'a ValidationReport, axiom: &str) -> &'a str {
    let c = rep.check(axiom).unwrap();
    assert!(!c.failures.is_empty(), "{} passed", axiom);
    &c.failures[0]
}

#[test]
fn wrong_dimension_breaks_the_homomorphism() {
    let mut o = s3_objects();
    o[2].qdim = Scalar::from_u64(3);
    o[2].dim = 3;
    let rep = validate_ring(&TableRing::new("bad", o, 0, &s3_table(), true).unwrap(), 0);
    assert_eq!(failing(&rep), ["qdim-homomorphism", "dim-homomorphism"]);
    assert!(witness(&rep, "qdim-homomorphism").contains("(v, v)"));
}

#[test]
fn dropped_summand_breaks_frobenius_and_associativity() {
    let mut t = s3_table();
    t.insert((2, 2), vec![(0, 1), (2, 2)]);
    let rep = validate_ring(&TableRing::new("bad", s3_objects(), 0, &t, true).unwrap(), 0);
    let f = failing(&rep);
    for axiom in ["frobenius", "associativity", "qdim-homomorphism"] {
        assert!(f.contains(&axiom), "{:?}", f);
    }
    assert!(witness(&rep, "frobenius").contains("sgn"));
    assert!(witness(&rep, "associativity").contains("⊗"));
}

#[test]
fn broken_unit_and_conjugation() {
    let mut t = s3_table();
    t.insert((0, 1), vec![(2, 1)]);
    let rep = validate_ring(&TableRing::new("bad", s3_objects(), 0, &t, true).unwrap(), 0);
    assert!(witness(&rep, "unit").contains("sgn"));

    let mut o = s3_objects();
    o[1].conj = 2;
    let rep = validate_ring(&TableRing::new("bad", o, 0, &s3_table(), true).unwrap(), 0);
    assert!(witness(&rep, "object-data").contains("conj(conj(sgn))"));
    assert!(failing(&rep).contains(&"conjugate-unit"));
}

/// `SU(2)` with one summand missing from `4 ⊗ 5`.
struct CorruptSu2;

impl FusionRing for CorruptSu2 {
    fn name(&self) -> String {
        "corrupt-su2".into()
    }
    fn unit(&self) -> ObjectId {
        Su2Dual.unit()
    }
    fn object(&self, id: &ObjectId) -> Result<SimpleObject> {
        Su2Dual.object(id)
    }
    fn fuse(&self, a: &ObjectId, b: &ObjectId) -> Result<Decomposition> {
        let d = Su2Dual.fuse(a, b)?;
        if (a.as_int(), b.as_int()) == (Some(4), Some(5)) {
            return Ok(Decomposition::from_terms(d.iter().filter(|(x, _)| *x != ObjectId::Int(3)).cloned()));
        }
        Ok(d)
    }
    fn enumerate_up_to(&self, g: u32) -> Vec<ObjectId> {
        Su2Dual.enumerate_up_to(g)
    }
    fn is_finite(&self) -> bool {
        false
    }
    fn render(&self, id: &ObjectId) -> String {
        Su2Dual.render(id)
    }
    fn parse(&self, text: &str) -> Result<ObjectId> {
        Su2Dual.parse(text)
    }
}

#[test]
fn defect_beyond_small_grades_is_found_only_in_range() {
    assert!(validate_ring(&CorruptSu2, 6).passed());
    let rep = validate_ring(&CorruptSu2, 10);
    assert!(!rep.passed());
    assert!(witness(&rep, "qdim-homomorphism").contains("(4, 5)"));
    assert!(failing(&rep).contains(&"frobenius"));
}

#[test]
fn invalid_inputs_are_rejected() {
    let ring = dual_s3();
    let v = ring.parse("v").unwrap();
    let sgn = ring.parse("sgn").unwrap();
    let unit = ring.unit();
    match SubgroupSet::from_members(&ring, &[unit.clone(), v.clone()]) {
        Err(Error::InvalidSubgroup(msg)) => assert!(msg.contains("sgn ⊂ v ⊗ v"), "{}", msg),
        other => panic!("{:?}", other.map(|_| ())),
    }
    assert!(matches!(SubgroupSet::from_members(&ring, &[sgn.clone()]), Err(Error::InvalidSubgroup(_))));

    let names: Vec<String> = ["e", "a", "b"].iter().map(|s| s.to_string()).collect();
    let bad = vec![vec![0, 1, 2], vec![1, 0, 2], vec![2, 2, 0]];
    assert!(matches!(GroupTable::new(names, bad), Err(Error::InvalidTable(_))));

    let base = Arc::new(dual_s3());
    let whole = SubgroupSet::from_members(base.as_ref(), &[unit.clone(), sgn.clone(), v.clone()]).unwrap();
    let pairs = [(unit.clone(), unit.clone()), (sgn.clone(), v.clone()), (v.clone(), sgn.clone())];
    let recipe = HnnRecipe::from_pairs("bad", base, whole.clone(), whole, &pairs).unwrap();
    assert!(matches!(recipe.validate(0), Err(Error::InvalidTheta(_))));
}
