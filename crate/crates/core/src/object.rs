use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::scalar::Scalar;

/// Opaque, totally ordered identifier of a simple object.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObjectId {
    Atom(u32),
    Int(i64),
    Tuple(Arc<[ObjectId]>),
}

impl ObjectId {
    pub fn tuple(items: Vec<ObjectId>) -> Self {
        ObjectId::Tuple(Arc::from(items))
    }

    pub fn empty() -> Self {
        ObjectId::Tuple(Arc::from(Vec::new()))
    }

    pub fn as_atom(&self) -> Option<u32> {
        match self {
            ObjectId::Atom(a) => Some(*a),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            ObjectId::Int(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_tuple(&self) -> Option<&[ObjectId]> {
        match self {
            ObjectId::Tuple(t) => Some(t),
            _ => None,
        }
    }
}

impl fmt::Debug for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectId::Atom(a) => write!(f, "#{}", a),
            ObjectId::Int(n) => write!(f, "{}", n),
            ObjectId::Tuple(t) => {
                write!(f, "(")?;
                for (i, x) in t.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{:?}", x)?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Decomposition of a tensor product into simple objects, sorted by id.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Decomposition(Vec<(ObjectId, u32)>);

impl Decomposition {
    pub fn single(id: ObjectId) -> Self {
        Decomposition(alloc::vec![(id, 1)])
    }

    /// Merges repeated ids and drops zero multiplicities.
    pub fn from_terms<I: IntoIterator<Item = (ObjectId, u32)>>(terms: I) -> Self {
        let mut map: BTreeMap<ObjectId, u32> = BTreeMap::new();
        for (id, m) in terms {
            if m > 0 {
                *map.entry(id).or_insert(0) += m;
            }
        }
        Decomposition(map.into_iter().collect())
    }

    pub fn terms(&self) -> &[(ObjectId, u32)] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &(ObjectId, u32)> {
        self.0.iter()
    }

    pub fn ids(&self) -> impl Iterator<Item = &ObjectId> {
        self.0.iter().map(|(id, _)| id)
    }

    pub fn mult(&self, id: &ObjectId) -> u32 {
        self.0
            .binary_search_by(|(x, _)| x.cmp(id))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn contains(&self, id: &ObjectId) -> bool {
        self.mult(id) > 0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of simple summands counted with multiplicity.
    pub fn total(&self) -> u64 {
        self.0.iter().map(|(_, m)| *m as u64).sum()
    }

    /// The unique summand when the product is simple.
    pub fn as_single(&self) -> Option<&ObjectId> {
        match self.0.as_slice() {
            [(id, 1)] => Some(id),
            _ => None,
        }
    }

    pub fn scaled(&self, k: u32) -> Self {
        Decomposition(self.0.iter().map(|(id, m)| (id.clone(), m * k)).collect())
    }
}

impl IntoIterator for Decomposition {
    type Item = (ObjectId, u32);
    type IntoIter = alloc::vec::IntoIter<(ObjectId, u32)>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

/// Data attached to a simple object.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SimpleObject {
    pub id: ObjectId,
    pub grade: u32,
    pub dim: u64,
    pub qdim: Scalar,
    pub conj: ObjectId,
}

/// Splits `s` at occurrences of `sep` outside any bracket pair.
pub fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            _ if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// True when `s` starts with `open` whose matching close is the last char.
pub fn wrapped_in(s: &str, open: char, close: char) -> bool {
    if !s.starts_with(open) || !s.ends_with(close) || s.len() < 2 {
        return false;
    }
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => {
                depth -= 1;
                if depth == 0 && i + c.len_utf8() < s.len() {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}
