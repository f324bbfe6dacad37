use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Multiplication table of a finite group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTable {
    names: Vec<String>,
    mult: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl GroupTable {
    /// Validates associativity, identity and inverses.
    pub fn new(names: Vec<String>, mult: Vec<Vec<usize>>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::InvalidTable("empty group".into()));
        }
        let mut seen = BTreeMap::new();
        for (i, s) in names.iter().enumerate() {
            if seen.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidTable(format!("duplicate element {:?}", s)));
            }
        }
        if mult.len() != n || mult.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::InvalidTable("table must be square with entries in range".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| mult[e][x] == x && mult[x][e] == x))
            .ok_or_else(|| Error::InvalidTable("no identity element".into()))?;
        let mut inverse = Vec::with_capacity(n);
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| mult[a][b] == identity && mult[b][a] == identity)
                .ok_or_else(|| Error::InvalidTable(format!("{} has no inverse", names[a])))?;
            inverse.push(inv);
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mult[mult[a][b]][c] != mult[a][mult[b][c]] {
                        return Err(Error::InvalidTable(format!(
                            "associativity fails at ({}, {}, {})",
                            names[a], names[b], names[c]
                        )));
                    }
                }
            }
        }
        Ok(GroupTable { names, mult, identity, inverse })
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|s| s == name)
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.mult
    }

    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut class_of = alloc::vec![usize::MAX; n];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            if class_of[x] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let mut members: Vec<usize> = (0..n).map(|g| self.mul(self.mul(g, x), self.inv(g))).collect();
            members.sort_unstable();
            members.dedup();
            for &m in &members {
                class_of[m] = id;
            }
            classes.push(members);
        }
        classes
    }

    pub fn trivial() -> Self {
        GroupTable::new(alloc::vec!["e".into()], alloc::vec![alloc::vec![0]]).unwrap()
    }

    /// Additive cyclic group with elements `0..n`.
    pub fn cyclic(n: usize) -> Self {
        let names = (0..n).map(|i| i.to_string()).collect();
        let mult = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        GroupTable::new(names, mult).unwrap()
    }

    /// Symmetric group on `{1..n}` with `(ab)(x) = a(b(x))`, elements in cycle notation.
    pub fn symmetric(n: usize) -> Self {
        let mut perms: Vec<Vec<usize>> = Vec::new();
        let mut current: Vec<usize> = (0..n).collect();
        permutations(&mut current, 0, &mut perms);
        let mut keyed: Vec<(usize, String, Vec<usize>)> = perms
            .into_iter()
            .map(|p| {
                let moved = p.iter().enumerate().filter(|(i, x)| *i != **x).count();
                (moved, cycle_notation(&p), p)
            })
            .collect();
        keyed.sort();
        let index: BTreeMap<Vec<usize>, usize> =
            keyed.iter().enumerate().map(|(i, (_, _, p))| (p.clone(), i)).collect();
        let mult = keyed
            .iter()
            .map(|(_, _, a)| {
                keyed
                    .iter()
                    .map(|(_, _, b)| {
                        let c: Vec<usize> = (0..n).map(|x| a[b[x]]).collect();
                        index[&c]
                    })
                    .collect()
            })
            .collect();
        GroupTable::new(keyed.into_iter().map(|(_, s, _)| s).collect(), mult).unwrap()
    }

    /// Dihedral group of order `2n`, elements `r^a s^b`.
    pub fn dihedral(n: usize) -> Self {
        let elems: Vec<(usize, usize)> = (0..2).flat_map(|b| (0..n).map(move |a| (a, b))).collect();
        let name = |a: usize, b: usize| -> String {
            let r = match a {
                0 => String::new(),
                1 => "r".into(),
                k => format!("r{}", k),
            };
            match (r.is_empty(), b) {
                (true, 0) => "e".into(),
                (false, 0) => r,
                (_, _) => format!("{}s", r),
            }
        };
        let names = elems.iter().map(|&(a, b)| name(a, b)).collect();
        let mult = elems
            .iter()
            .map(|&(a, b)| {
                elems
                    .iter()
                    .map(|&(c, d)| {
                        let rc = if b == 0 { c } else { (n - c) % n };
                        let prod = ((a + rc) % n, (b + d) % 2);
                        elems.iter().position(|&e| e == prod).unwrap()
                    })
                    .collect()
            })
            .collect();
        GroupTable::new(names, mult).unwrap()
    }

    /// Quaternion group `{±1, ±i, ±j, ±k}`.
    pub fn quaternion() -> Self {
        // unit index 0..4 = 1,i,j,k; sign 0 = +, 1 = -
        const UNIT: [[(usize, usize); 4]; 4] = [
            [(0, 0), (1, 0), (2, 0), (3, 0)],
            [(1, 0), (0, 1), (3, 0), (2, 1)],
            [(2, 0), (3, 1), (0, 1), (1, 0)],
            [(3, 0), (2, 0), (1, 1), (0, 1)],
        ];
        let labels = ["1", "i", "j", "k"];
        let elems: Vec<(usize, usize)> = (0..4).flat_map(|u| (0..2).map(move |s| (s, u))).collect();
        let names = elems
            .iter()
            .map(|&(s, u)| format!("{}{}", if s == 0 { "" } else { "-" }, labels[u]))
            .collect();
        let mult = elems
            .iter()
            .map(|&(s1, u1)| {
                elems
                    .iter()
                    .map(|&(s2, u2)| {
                        let (u, s) = UNIT[u1][u2];
                        let prod = ((s1 + s2 + s) % 2, u);
                        elems.iter().position(|&e| e == prod).unwrap()
                    })
                    .collect()
            })
            .collect();
        GroupTable::new(names, mult).unwrap()
    }
}

fn permutations(current: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == current.len() {
        out.push(current.clone());
        return;
    }
    for i in k..current.len() {
        current.swap(k, i);
        permutations(current, k + 1, out);
        current.swap(k, i);
    }
}

fn cycle_notation(p: &[usize]) -> String {
    let mut seen = alloc::vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            continue;
        }
        out.push('(');
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            out.push_str(&(x + 1).to_string());
            x = p[x];
        }
        out.push(')');
    }
    if out.is_empty() {
        out.push('e');
    }
    out
}
