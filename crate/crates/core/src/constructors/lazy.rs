use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::object::{Decomposition, ObjectId, SimpleObject};
use crate::ring::FusionRing;
use crate::scalar::Scalar;

/// Fusion ring of `SU(2)` representations, object `n` of dimension `n + 1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Su2Dual;

impl Su2Dual {
    fn spin(id: &ObjectId) -> Result<i64> {
        match id {
            ObjectId::Int(n) if *n >= 0 => Ok(*n),
            _ => Err(Error::UnknownObject(format!("{:?}", id))),
        }
    }
}

impl FusionRing for Su2Dual {
    fn name(&self) -> String {
        "su2-dual".into()
    }

    fn unit(&self) -> ObjectId {
        ObjectId::Int(0)
    }

    fn object(&self, id: &ObjectId) -> Result<SimpleObject> {
        let n = Self::spin(id)?;
        Ok(SimpleObject {
            id: id.clone(),
            grade: n as u32,
            dim: n as u64 + 1,
            qdim: Scalar::from_int(n + 1),
            conj: id.clone(),
        })
    }

    fn fuse(&self, a: &ObjectId, b: &ObjectId) -> Result<Decomposition> {
        let (m, n) = (Self::spin(a)?, Self::spin(b)?);
        let lo = (m - n).abs();
        Ok(Decomposition::from_terms((0..=m.min(n)).map(|k| (ObjectId::Int(lo + 2 * k), 1))))
    }

    fn enumerate_up_to(&self, g: u32) -> Vec<ObjectId> {
        (0..=g as i64).map(ObjectId::Int).collect()
    }

    fn is_finite(&self) -> bool {
        false
    }

    fn render(&self, id: &ObjectId) -> String {
        match id {
            ObjectId::Int(n) => n.to_string(),
            _ => format!("{:?}", id),
        }
    }

    fn parse(&self, text: &str) -> Result<ObjectId> {
        match text.trim().parse::<i64>() {
            Ok(n) if n >= 0 => Ok(ObjectId::Int(n)),
            _ => Err(Error::UnknownObject(text.into())),
        }
    }

    fn generators(&self, _horizon: u32) -> (Vec<ObjectId>, bool) {
        (alloc::vec![ObjectId::Int(1)], true)
    }
}

/// Pointed ring of the integers.
#[derive(Clone, Copy, Debug, Default)]
pub struct Integers;

impl Integers {
    fn value(id: &ObjectId) -> Result<i64> {
        id.as_int().ok_or_else(|| Error::UnknownObject(format!("{:?}", id)))
    }
}

impl FusionRing for Integers {
    fn name(&self) -> String {
        "z".into()
    }

    fn unit(&self) -> ObjectId {
        ObjectId::Int(0)
    }

    fn object(&self, id: &ObjectId) -> Result<SimpleObject> {
        let n = Self::value(id)?;
        Ok(SimpleObject {
            id: id.clone(),
            grade: n.unsigned_abs() as u32,
            dim: 1,
            qdim: Scalar::one(),
            conj: ObjectId::Int(-n),
        })
    }

    fn fuse(&self, a: &ObjectId, b: &ObjectId) -> Result<Decomposition> {
        Ok(Decomposition::single(ObjectId::Int(Self::value(a)? + Self::value(b)?)))
    }

    fn enumerate_up_to(&self, g: u32) -> Vec<ObjectId> {
        let mut v = alloc::vec![ObjectId::Int(0)];
        for k in 1..=g as i64 {
            v.push(ObjectId::Int(-k));
            v.push(ObjectId::Int(k));
        }
        v
    }

    fn is_finite(&self) -> bool {
        false
    }

    fn render(&self, id: &ObjectId) -> String {
        match id {
            ObjectId::Int(n) => n.to_string(),
            _ => format!("{:?}", id),
        }
    }

    fn parse(&self, text: &str) -> Result<ObjectId> {
        text.trim().parse::<i64>().map(ObjectId::Int).map_err(|_| Error::UnknownObject(text.into()))
    }

    fn generators(&self, _horizon: u32) -> (Vec<ObjectId>, bool) {
        (alloc::vec![ObjectId::Int(-1), ObjectId::Int(1)], true)
    }
}
