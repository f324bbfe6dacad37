use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use spin::Mutex;

use crate::error::{Error, Result};
use crate::object::{split_top_level, wrapped_in, Decomposition, ObjectId, SimpleObject};
use crate::ring::{FusionRing, RingExt, SharedRing};
use crate::subgroup::{SubgroupRule, SubgroupSet};

type Letter = (usize, ObjectId);

/// Free product of two fusion rings; objects are alternating reduced words.
pub struct FreeProduct {
    factors: [SharedRing; 2],
    memo: Mutex<BTreeMap<(ObjectId, ObjectId), Decomposition>>,
}

impl FreeProduct {
    pub fn new(first: SharedRing, second: SharedRing) -> Self {
        FreeProduct { factors: [first, second], memo: Mutex::new(BTreeMap::new()) }
    }

    pub fn factor(&self, i: usize) -> &SharedRing {
        &self.factors[i]
    }

    /// Word from letters; adjacent letters must come from different factors.
    pub fn word(letters: &[Letter]) -> ObjectId {
        ObjectId::tuple(
            letters.iter().map(|(i, x)| ObjectId::tuple(alloc::vec![ObjectId::Atom(*i as u32), x.clone()])).collect(),
        )
    }

    /// Embeds an object of factor `i` as a one-letter word.
    pub fn embed(&self, i: usize, x: ObjectId) -> ObjectId {
        if x == self.factors[i].unit() {
            ObjectId::empty()
        } else {
            Self::word(&[(i, x)])
        }
    }

    pub fn letters(&self, id: &ObjectId) -> Result<Vec<Letter>> {
        let bad = || Error::UnknownObject(format!("{:?}", id));
        let items = id.as_tuple().ok_or_else(bad)?;
        let mut out: Vec<Letter> = Vec::with_capacity(items.len());
        for it in items {
            match it.as_tuple() {
                Some([ObjectId::Atom(i), x]) if *i < 2 => {
                    let i = *i as usize;
                    if out.last().map_or(false, |(p, _)| *p == i) {
                        return Err(bad());
                    }
                    let f = &self.factors[i];
                    f.object(x)?;
                    if *x == f.unit() {
                        return Err(bad());
                    }
                    out.push((i, x.clone()));
                }
                _ => return Err(bad()),
            }
        }
        Ok(out)
    }

    fn weight(&self, l: &Letter) -> u32 {
        self.factors[l.0].grade(&l.1).unwrap_or(0).max(1)
    }

    fn fuse_letters(&self, u: &[Letter], v: &[Letter]) -> Result<Vec<(Vec<Letter>, u32)>> {
        let (x, y) = match (u.last(), v.first()) {
            (Some(x), Some(y)) if x.0 == y.0 => (x, y),
            _ => {
                let mut w = u.to_vec();
                w.extend_from_slice(v);
                return Ok(alloc::vec![(w, 1)]);
            }
        };
        let f = &self.factors[x.0];
        let (head, tail) = (&u[..u.len() - 1], &v[1..]);
        let mut out = Vec::new();
        for (z, m) in f.fuse(&x.1, &y.1)?.iter() {
            if *z == f.unit() {
                for (w, n) in self.fuse_letters(head, tail)? {
                    out.push((w, m * n));
                }
            } else {
                let mut w = head.to_vec();
                w.push((x.0, z.clone()));
                w.extend_from_slice(tail);
                out.push((w, *m));
            }
        }
        Ok(out)
    }

    fn extend(&self, budget: u32, last: Option<usize>, acc: &mut Vec<Letter>, out: &mut Vec<ObjectId>) {
        out.push(Self::word(acc));
        for i in 0..2 {
            if last == Some(i) {
                continue;
            }
            let f = &self.factors[i];
            let unit = f.unit();
            for x in f.enumerate_up_to(budget) {
                if x == unit {
                    continue;
                }
                let l = (i, x);
                let w = self.weight(&l);
                if w > budget {
                    continue;
                }
                acc.push(l);
                self.extend(budget - w, Some(i), acc, out);
                acc.pop();
            }
        }
    }

    /// The subgroup given by factor `i`.
    pub fn factor_subgroup(self: &Arc<Self>, i: usize) -> Result<SubgroupSet> {
        let f = &self.factors[i];
        if f.is_finite() {
            let members: Vec<ObjectId> = f.enumerate_up_to(u32::MAX).into_iter().map(|x| self.embed(i, x)).collect();
            SubgroupSet::from_members(self.as_ref(), &members)
        } else {
            Ok(SubgroupSet::from_rule(Arc::new(FreeFactor { ring: self.clone(), index: i })))
        }
    }
}

impl FusionRing for FreeProduct {
    fn name(&self) -> String {
        format!("{} * {}", self.factors[0].name(), self.factors[1].name())
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
        for l in letters.iter().rev() {
            let o = self.factors[l.0].object(&l.1)?;
            grade += self.weight(l);
            dim *= o.dim;
            qdim *= &o.qdim;
            conj.push((l.0, o.conj));
        }
        Ok(SimpleObject { id: id.clone(), grade, dim, qdim, conj: Self::word(&conj) })
    }

    fn fuse(&self, a: &ObjectId, b: &ObjectId) -> Result<Decomposition> {
        let key = (a.clone(), b.clone());
        if let Some(d) = self.memo.lock().get(&key) {
            return Ok(d.clone());
        }
        let (u, v) = (self.letters(a)?, self.letters(b)?);
        let d = Decomposition::from_terms(self.fuse_letters(&u, &v)?.into_iter().map(|(w, m)| (Self::word(&w), m)));
        self.memo.lock().insert(key, d.clone());
        Ok(d)
    }

    fn enumerate_up_to(&self, g: u32) -> Vec<ObjectId> {
        let mut out = Vec::new();
        self.extend(g, None, &mut Vec::new(), &mut out);
        self.sort_by_grade(&mut out);
        out
    }

    fn is_finite(&self) -> bool {
        false
    }

    fn is_kac(&self) -> bool {
        self.factors.iter().all(|f| f.is_kac())
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
            .map(|(i, x)| {
                let name = self.factors[*i].render(x);
                if name.contains('*') || name.contains(':') {
                    format!("{}:[{}]", i + 1, name)
                } else {
                    format!("{}:{}", i + 1, name)
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
        let mut letters: Vec<Letter> = Vec::new();
        for part in split_top_level(t, '*') {
            let part = part.trim();
            let colon = part.find(':').ok_or_else(|| Error::Parse(format!("missing factor tag in {:?}", part)))?;
            let i = match &part[..colon] {
                "1" => 0,
                "2" => 1,
                other => return Err(Error::Parse(format!("bad factor tag {:?}", other))),
            };
            let name = part[colon + 1..].trim();
            let name = if wrapped_in(name, '[', ']') { &name[1..name.len() - 1] } else { name };
            let x = self.factors[i].parse(name)?;
            if x == self.factors[i].unit() || letters.last().map_or(false, |(p, _)| *p == i) {
                return Err(Error::Parse(format!("{:?} is not a reduced word", text)));
            }
            letters.push((i, x));
        }
        Ok(Self::word(&letters))
    }

    fn generators(&self, horizon: u32) -> (Vec<ObjectId>, bool) {
        let mut out = Vec::new();
        let mut complete = true;
        for i in 0..2 {
            let (gens, c) = self.factors[i].generators(horizon);
            complete &= c;
            out.extend(gens.into_iter().filter(|x| *x != self.factors[i].unit()).map(|x| self.embed(i, x)));
        }
        (out, complete)
    }

    fn unbounded_class_witness(&self, sub: &SubgroupSet) -> Option<(ObjectId, String)> {
        let name = sub.rule_name()?;
        let i = match name.as_str() {
            "free-factor:1" => 0,
            "free-factor:2" => 1,
            _ => return None,
        };
        let other = 1 - i;
        let f = &self.factors[other];
        let (gens, _) = f.generators(1);
        let s = gens.into_iter().find(|x| *x != f.unit())?;
        Some((
            self.embed(other, s.clone()),
            format!(
                "the words x*{} for the infinitely many x in the subgroup lie in pairwise distinct right classes of this double class",
                self.render(&self.embed(other, s.clone()))
            ),
        ))
    }
}

/// Words consisting of at most one letter from factor `index`.
pub struct FreeFactor {
    pub ring: Arc<FreeProduct>,
    pub index: usize,
}

impl SubgroupRule for FreeFactor {
    fn name(&self) -> String {
        format!("free-factor:{}", self.index + 1)
    }

    fn contains(&self, id: &ObjectId) -> Result<bool> {
        let l = self.ring.letters(id)?;
        Ok(l.is_empty() || (l.len() == 1 && l[0].0 == self.index))
    }

    fn generators(&self, horizon: u32) -> (Vec<ObjectId>, bool) {
        let f = self.ring.factor(self.index);
        let (gens, complete) = f.generators(horizon);
        (gens.into_iter().filter(|x| *x != f.unit()).map(|x| self.ring.embed(self.index, x)).collect(), complete)
    }
}
