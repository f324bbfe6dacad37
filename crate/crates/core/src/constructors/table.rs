use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::group::GroupTable;
use crate::error::{Error, Result};
use crate::object::{Decomposition, ObjectId, SimpleObject};
use crate::ring::FusionRing;
use crate::scalar::Scalar;

/// One simple object of a finite ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableObject {
    pub name: String,
    pub grade: u32,
    pub dim: u64,
    pub qdim: Scalar,
    pub conj: u32,
}

/// A finite fusion ring given by its full multiplication table.
#[derive(Clone, Debug)]
pub struct TableRing {
    name: String,
    objects: Vec<TableObject>,
    unit: u32,
    fusion: Vec<Decomposition>,
    kac: bool,
    index: BTreeMap<String, u32>,
}

impl TableRing {
    /// Checks only structure; the axioms are left to `validate_ring`.
    pub fn new(
        name: &str,
        objects: Vec<TableObject>,
        unit: u32,
        fusion: &BTreeMap<(u32, u32), Vec<(u32, u32)>>,
        kac: bool,
    ) -> Result<Self> {
        let n = objects.len() as u32;
        if unit >= n {
            return Err(Error::InvalidRing("unit index out of range".into()));
        }
        let mut index = BTreeMap::new();
        for (i, o) in objects.iter().enumerate() {
            if o.name.is_empty() || o.name.trim() != o.name {
                return Err(Error::InvalidRing(format!("bad object name {:?}", o.name)));
            }
            if index.insert(o.name.clone(), i as u32).is_some() {
                return Err(Error::InvalidRing(format!("duplicate object {:?}", o.name)));
            }
            if o.conj >= n {
                return Err(Error::InvalidRing(format!("conjugate of {} out of range", o.name)));
            }
        }
        let mut table = Vec::with_capacity((n * n) as usize);
        for a in 0..n {
            for b in 0..n {
                let terms = fusion.get(&(a, b)).ok_or_else(|| {
                    Error::InvalidRing(format!(
                        "missing product {} ⊗ {}",
                        objects[a as usize].name, objects[b as usize].name
                    ))
                })?;
                if let Some((c, _)) = terms.iter().find(|(c, _)| *c >= n) {
                    return Err(Error::InvalidRing(format!("summand index {} out of range", c)));
                }
                table.push(Decomposition::from_terms(terms.iter().map(|&(c, m)| (ObjectId::Atom(c), m))));
            }
        }
        Ok(TableRing { name: name.into(), objects, unit, fusion: table, kac, index })
    }

    /// Builds a commutative ring from named objects and the products of
    /// non-unit pairs `a ≤ b`.
    pub fn commutative(
        name: &str,
        objects: &[(&str, u64, &str)],
        products: &[(&str, &str, &[(&str, u32)])],
    ) -> Result<Self> {
        let pos = |s: &str| -> Result<u32> {
            objects
                .iter()
                .position(|o| o.0 == s)
                .map(|i| i as u32)
                .ok_or_else(|| Error::UnknownObject(s.into()))
        };
        let mut objs = Vec::new();
        for &(nm, d, c) in objects {
            objs.push(TableObject { name: nm.into(), grade: 0, dim: d, qdim: Scalar::from_u64(d), conj: pos(c)? });
        }
        let n = objs.len() as u32;
        let mut fusion = BTreeMap::new();
        for a in 0..n {
            fusion.insert((0, a), alloc::vec![(a, 1)]);
            fusion.insert((a, 0), alloc::vec![(a, 1)]);
        }
        for &(a, b, terms) in products {
            let (ia, ib) = (pos(a)?, pos(b)?);
            let mut t = Vec::new();
            for &(c, m) in terms {
                t.push((pos(c)?, m));
            }
            fusion.insert((ia, ib), t.clone());
            fusion.insert((ib, ia), t);
        }
        TableRing::new(name, objs, 0, &fusion, true)
    }

    /// Pointed ring of a finite group.
    pub fn pointed(name: &str, group: &GroupTable) -> Self {
        let n = group.order();
        let objects = (0..n)
            .map(|i| TableObject {
                name: group.name(i).into(),
                grade: 0,
                dim: 1,
                qdim: Scalar::one(),
                conj: group.inv(i) as u32,
            })
            .collect();
        let mut fusion = BTreeMap::new();
        for a in 0..n {
            for b in 0..n {
                fusion.insert((a as u32, b as u32), alloc::vec![(group.mul(a, b) as u32, 1)]);
            }
        }
        TableRing::new(name, objects, group.identity() as u32, &fusion, true).unwrap()
    }

    pub fn objects(&self) -> &[TableObject] {
        &self.objects
    }

    pub fn unit_index(&self) -> u32 {
        self.unit
    }

    pub fn index_of(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    /// Product by indices.
    pub fn product(&self, a: u32, b: u32) -> &Decomposition {
        &self.fusion[(a as usize) * self.objects.len() + b as usize]
    }

    fn atom(&self, id: &ObjectId) -> Result<u32> {
        match id {
            ObjectId::Atom(a) if (*a as usize) < self.objects.len() => Ok(*a),
            _ => Err(Error::UnknownObject(format!("{:?}", id))),
        }
    }
}

impl FusionRing for TableRing {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn unit(&self) -> ObjectId {
        ObjectId::Atom(self.unit)
    }

    fn object(&self, id: &ObjectId) -> Result<SimpleObject> {
        let o = &self.objects[self.atom(id)? as usize];
        Ok(SimpleObject {
            id: id.clone(),
            grade: o.grade,
            dim: o.dim,
            qdim: o.qdim.clone(),
            conj: ObjectId::Atom(o.conj),
        })
    }

    fn fuse(&self, a: &ObjectId, b: &ObjectId) -> Result<Decomposition> {
        Ok(self.product(self.atom(a)?, self.atom(b)?).clone())
    }

    fn enumerate_up_to(&self, g: u32) -> Vec<ObjectId> {
        let mut v: Vec<(u32, ObjectId)> = self
            .objects
            .iter()
            .enumerate()
            .filter(|(_, o)| o.grade <= g)
            .map(|(i, o)| (o.grade, ObjectId::Atom(i as u32)))
            .collect();
        v.sort();
        v.into_iter().map(|(_, id)| id).collect()
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn is_kac(&self) -> bool {
        self.kac
    }

    fn render(&self, id: &ObjectId) -> String {
        match self.atom(id) {
            Ok(a) => self.objects[a as usize].name.clone(),
            Err(_) => format!("{:?}", id),
        }
    }

    fn parse(&self, text: &str) -> Result<ObjectId> {
        self.index
            .get(text.trim())
            .map(|&i| ObjectId::Atom(i))
            .ok_or_else(|| Error::UnknownObject(text.to_string()))
    }
}

/// Representation ring of `S₃`.
pub fn dual_s3() -> TableRing {
    TableRing::commutative(
        "dual(S3)",
        &[("1", 1, "1"), ("sgn", 1, "sgn"), ("v", 2, "v")],
        &[
            ("sgn", "sgn", &[("1", 1)]),
            ("sgn", "v", &[("v", 1)]),
            ("v", "v", &[("1", 1), ("sgn", 1), ("v", 1)]),
        ],
    )
    .unwrap()
}

/// Representation ring of `ℤ/2`.
pub fn dual_z2() -> TableRing {
    TableRing::commutative("dual(Z/2)", &[("1", 1, "1"), ("s", 1, "s")], &[("s", "s", &[("1", 1)])]).unwrap()
}

/// Representation ring of the quaternion group.
pub fn dual_q8() -> TableRing {
    TableRing::commutative(
        "dual(Q8)",
        &[("1", 1, "1"), ("a", 1, "a"), ("b", 1, "b"), ("c", 1, "c"), ("h", 2, "h")],
        &[
            ("a", "a", &[("1", 1)]),
            ("b", "b", &[("1", 1)]),
            ("c", "c", &[("1", 1)]),
            ("a", "b", &[("c", 1)]),
            ("a", "c", &[("b", 1)]),
            ("b", "c", &[("a", 1)]),
            ("a", "h", &[("h", 1)]),
            ("b", "h", &[("h", 1)]),
            ("c", "h", &[("h", 1)]),
            ("h", "h", &[("1", 1), ("a", 1), ("b", 1), ("c", 1)]),
        ],
    )
    .unwrap()
}
