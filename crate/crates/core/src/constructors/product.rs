use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::object::{split_top_level, wrapped_in, Decomposition, ObjectId, SimpleObject};
use crate::ring::{FusionRing, RingExt, SharedRing};
use crate::subgroup::SubgroupRule;

/// Direct product of two fusion rings.
#[derive(Clone)]
pub struct Product {
    left: SharedRing,
    right: SharedRing,
}

impl Product {
    pub fn new(left: SharedRing, right: SharedRing) -> Self {
        Product { left, right }
    }

    pub fn factor(&self, i: usize) -> &SharedRing {
        if i == 0 {
            &self.left
        } else {
            &self.right
        }
    }

    pub fn pair(a: ObjectId, b: ObjectId) -> ObjectId {
        ObjectId::tuple(alloc::vec![a, b])
    }

    fn split(id: &ObjectId) -> Result<(&ObjectId, &ObjectId)> {
        match id.as_tuple() {
            Some([a, b]) => Ok((a, b)),
            _ => Err(Error::UnknownObject(format!("{:?}", id))),
        }
    }
}

impl FusionRing for Product {
    fn name(&self) -> String {
        format!("{} x {}", self.left.name(), self.right.name())
    }

    fn unit(&self) -> ObjectId {
        Self::pair(self.left.unit(), self.right.unit())
    }

    fn object(&self, id: &ObjectId) -> Result<SimpleObject> {
        let (a, b) = Self::split(id)?;
        let (oa, ob) = (self.left.object(a)?, self.right.object(b)?);
        Ok(SimpleObject {
            id: id.clone(),
            grade: oa.grade + ob.grade,
            dim: oa.dim * ob.dim,
            qdim: oa.qdim * ob.qdim,
            conj: Self::pair(oa.conj, ob.conj),
        })
    }

    fn fuse(&self, x: &ObjectId, y: &ObjectId) -> Result<Decomposition> {
        let (a, b) = Self::split(x)?;
        let (c, d) = Self::split(y)?;
        let l = self.left.fuse(a, c)?;
        let r = self.right.fuse(b, d)?;
        Ok(Decomposition::from_terms(
            l.iter().flat_map(|(p, m)| r.iter().map(move |(q, n)| (Self::pair(p.clone(), q.clone()), m * n))),
        ))
    }

    fn enumerate_up_to(&self, g: u32) -> Vec<ObjectId> {
        let mut out = Vec::new();
        for a in self.left.enumerate_up_to(g) {
            let ga = self.left.grade(&a).unwrap_or(0);
            for b in self.right.enumerate_up_to(g - ga) {
                out.push(Self::pair(a.clone(), b));
            }
        }
        self.sort_by_grade(&mut out);
        out
    }

    fn is_finite(&self) -> bool {
        self.left.is_finite() && self.right.is_finite()
    }

    fn is_kac(&self) -> bool {
        self.left.is_kac() && self.right.is_kac()
    }

    fn render(&self, id: &ObjectId) -> String {
        match Self::split(id) {
            Ok((a, b)) => format!("({},{})", self.left.render(a), self.right.render(b)),
            Err(_) => format!("{:?}", id),
        }
    }

    fn parse(&self, text: &str) -> Result<ObjectId> {
        let t = text.trim();
        if !wrapped_in(t, '(', ')') {
            return Err(Error::Parse(format!("expected (a,b), got {:?}", text)));
        }
        match split_top_level(&t[1..t.len() - 1], ',').as_slice() {
            [a, b] => Ok(Self::pair(self.left.parse(a)?, self.right.parse(b)?)),
            _ => Err(Error::Parse(format!("expected (a,b), got {:?}", text))),
        }
    }

    fn generators(&self, horizon: u32) -> (Vec<ObjectId>, bool) {
        let (lg, lc) = self.left.generators(horizon);
        let (rg, rc) = self.right.generators(horizon);
        let (lu, ru) = (self.left.unit(), self.right.unit());
        let mut out: Vec<ObjectId> = lg.into_iter().map(|a| Self::pair(a, ru.clone())).collect();
        out.extend(rg.into_iter().map(|b| Self::pair(lu.clone(), b)));
        (out, lc && rc)
    }
}

/// One factor of a product, embedded with the unit in the other slot.
pub struct ProductFactor {
    pub ring: Arc<Product>,
    pub index: usize,
}

impl SubgroupRule for ProductFactor {
    fn name(&self) -> String {
        format!("product-factor:{}", self.index + 1)
    }

    fn contains(&self, id: &ObjectId) -> Result<bool> {
        let (a, b) = Product::split(id)?;
        let other = if self.index == 0 { (b, self.ring.right.unit()) } else { (a, self.ring.left.unit()) };
        Ok(*other.0 == other.1)
    }

    fn generators(&self, horizon: u32) -> (Vec<ObjectId>, bool) {
        let f = self.ring.factor(self.index);
        let (gens, complete) = f.generators(horizon);
        let embed = |x: ObjectId| {
            if self.index == 0 {
                Product::pair(x, self.ring.right.unit())
            } else {
                Product::pair(self.ring.left.unit(), x)
            }
        };
        (gens.into_iter().map(embed).collect(), complete)
    }
}

/// Finitely supported tuples indexed by nonzero integers, with one finite
/// factor for positive and one for negative positions.
#[derive(Clone)]
pub struct RestrictedProduct {
    plus: SharedRing,
    minus: SharedRing,
}

impl RestrictedProduct {
    pub fn new(plus: SharedRing, minus: SharedRing) -> Result<Self> {
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::InvalidRing("restricted product requires finite factors".into()));
        }
        Ok(RestrictedProduct { plus, minus })
    }

    pub fn factor_at(&self, k: i64) -> &SharedRing {
        if k > 0 {
            &self.plus
        } else {
            &self.minus
        }
    }

    /// Builds an object from `(position, letter)` pairs, dropping unit letters.
    pub fn word(&self, letters: &[(i64, ObjectId)]) -> ObjectId {
        let mut v: Vec<(i64, ObjectId)> =
            letters.iter().filter(|(k, x)| *x != self.factor_at(*k).unit()).cloned().collect();
        v.sort();
        ObjectId::tuple(v.into_iter().map(|(k, x)| ObjectId::tuple(alloc::vec![ObjectId::Int(k), x])).collect())
    }

    /// `(position, letter)` pairs of a word.
    pub fn letters(&self, id: &ObjectId) -> Result<Vec<(i64, ObjectId)>> {
        let bad = || Error::UnknownObject(format!("{:?}", id));
        let items = id.as_tuple().ok_or_else(bad)?;
        let mut out = Vec::with_capacity(items.len());
        for it in items {
            match it.as_tuple() {
                Some([ObjectId::Int(k), x]) if *k != 0 => {
                    if out.last().map_or(false, |(p, _): &(i64, ObjectId)| *p >= *k) {
                        return Err(bad());
                    }
                    let f = self.factor_at(*k);
                    f.object(x)?;
                    if *x == f.unit() {
                        return Err(bad());
                    }
                    out.push((*k, x.clone()));
                }
                _ => return Err(bad()),
            }
        }
        Ok(out)
    }

    fn extend(&self, positions: &[i64], i: usize, budget: u32, acc: &mut Vec<(i64, ObjectId)>, out: &mut Vec<ObjectId>) {
        if i == positions.len() {
            out.push(self.word(acc));
            return;
        }
        self.extend(positions, i + 1, budget, acc, out);
        let k = positions[i];
        let w = k.unsigned_abs() as u32;
        if w > budget {
            return;
        }
        let f = self.factor_at(k);
        let unit = f.unit();
        for x in f.enumerate_up_to(u32::MAX) {
            if x == unit {
                continue;
            }
            acc.push((k, x));
            self.extend(positions, i + 1, budget - w, acc, out);
            acc.pop();
        }
    }
}

impl FusionRing for RestrictedProduct {
    fn name(&self) -> String {
        format!("restricted({}, {})", self.plus.name(), self.minus.name())
    }

    fn unit(&self) -> ObjectId {
        ObjectId::empty()
    }

    fn object(&self, id: &ObjectId) -> Result<SimpleObject> {
        let letters = self.letters(id)?;
        let mut grade = 0u32;
        let mut dim = 1u64;
        let mut qdim = crate::scalar::Scalar::one();
        let mut conj = Vec::with_capacity(letters.len());
        for (k, x) in &letters {
            let o = self.factor_at(*k).object(x)?;
            grade += k.unsigned_abs() as u32;
            dim *= o.dim;
            qdim *= &o.qdim;
            conj.push((*k, o.conj));
        }
        Ok(SimpleObject { id: id.clone(), grade, dim, qdim, conj: self.word(&conj) })
    }

    fn fuse(&self, a: &ObjectId, b: &ObjectId) -> Result<Decomposition> {
        let (la, lb) = (self.letters(a)?, self.letters(b)?);
        let mut positions: Vec<i64> = la.iter().chain(lb.iter()).map(|(k, _)| *k).collect();
        positions.sort_unstable();
        positions.dedup();
        let mut partial: Vec<(Vec<(i64, ObjectId)>, u32)> = alloc::vec![(Vec::new(), 1)];
        for k in positions {
            let f = self.factor_at(k);
            let find = |l: &[(i64, ObjectId)]| l.iter().find(|(p, _)| *p == k).map(|(_, x)| x.clone()).unwrap_or_else(|| f.unit());
            let d = f.fuse(&find(&la), &find(&lb))?;
            let mut next = Vec::with_capacity(partial.len() * d.len());
            for (acc, m) in &partial {
                for (z, n) in d.iter() {
                    let mut v = acc.clone();
                    v.push((k, z.clone()));
                    next.push((v, m * n));
                }
            }
            partial = next;
        }
        Ok(Decomposition::from_terms(partial.into_iter().map(|(v, m)| (self.word(&v), m))))
    }

    fn enumerate_up_to(&self, g: u32) -> Vec<ObjectId> {
        let g = g as i64;
        let positions: Vec<i64> = (-g..=g).filter(|k| *k != 0).collect();
        let mut out = Vec::new();
        self.extend(&positions, 0, g as u32, &mut Vec::new(), &mut out);
        self.sort_by_grade(&mut out);
        out
    }

    fn is_finite(&self) -> bool {
        false
    }

    fn is_kac(&self) -> bool {
        self.plus.is_kac() && self.minus.is_kac()
    }

    fn render(&self, id: &ObjectId) -> String {
        let letters = match self.letters(id) {
            Ok(l) => l,
            Err(_) => return format!("{:?}", id),
        };
        if letters.is_empty() {
            return "1".into();
        }
        let parts: Vec<String> = letters
            .iter()
            .map(|(k, x)| {
                let name = self.factor_at(*k).render(x);
                if name.contains('*') || name.contains('@') {
                    format!("[{}]@{}", name, k)
                } else {
                    format!("{}@{}", name, k)
                }
            })
            .collect();
        parts.join("*")
    }

    fn parse(&self, text: &str) -> Result<ObjectId> {
        let t = text.trim();
        if t == "1" {
            return Ok(self.unit());
        }
        let mut letters = Vec::new();
        for part in split_top_level(t, '*') {
            let at = part.rfind('@').ok_or_else(|| Error::Parse(format!("missing @ in {:?}", part)))?;
            let (name, pos) = (part[..at].trim(), part[at + 1..].trim());
            let k: i64 = pos.parse().map_err(|_| Error::Parse(format!("bad position {:?}", pos)))?;
            if k == 0 {
                return Err(Error::Parse("position 0 is not allowed".into()));
            }
            let name = if wrapped_in(name, '[', ']') { &name[1..name.len() - 1] } else { name };
            let x = self.factor_at(k).parse(name)?;
            if x == self.factor_at(k).unit() || letters.iter().any(|(p, _)| *p == k) {
                return Err(Error::Parse(format!("bad letter {:?}", part)));
            }
            letters.push((k, x));
        }
        Ok(self.word(&letters))
    }

    fn generators(&self, horizon: u32) -> (Vec<ObjectId>, bool) {
        let h = horizon.max(1) as i64;
        let mut out = Vec::new();
        for k in (-h..=h).filter(|k| *k != 0) {
            let f = self.factor_at(k);
            for x in f.enumerate_up_to(u32::MAX) {
                if x != f.unit() {
                    out.push(self.word(&[(k, x)]));
                }
            }
        }
        (out, false)
    }
}

/// Objects of a restricted product with no letter at `position`.
pub struct RestrictedOmit {
    pub ring: Arc<RestrictedProduct>,
    pub position: i64,
}

impl SubgroupRule for RestrictedOmit {
    fn name(&self) -> String {
        format!("omit:{}", self.position)
    }

    fn contains(&self, id: &ObjectId) -> Result<bool> {
        Ok(self.ring.letters(id)?.iter().all(|(k, _)| *k != self.position))
    }

    fn generators(&self, horizon: u32) -> (Vec<ObjectId>, bool) {
        let (all, _) = self.ring.generators(horizon);
        let keep = all
            .into_iter()
            .filter(|x| self.ring.letters(x).map_or(false, |l| l[0].0 != self.position))
            .collect();
        (keep, false)
    }
}
