//! The quantum double of a finite group and its Hecke algebra relative to the group.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::check::CheckReport;
use crate::constructors::GroupTable;
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;

pub type Element = Vec<Scalar>;

/// `O(H) ⊙ D(H)` with basis `δ_g ⊗ h`, stored at index `g·|H| + h`.
pub struct DoubleAlgebra {
    group: GroupTable,
    n: usize,
    /// `h_R(e)`, fixed by `φ(p_H) = 1`.
    haar_scale: Scalar,
    antipode_inv: Vec<usize>,
    conv: Vec<Vec<Vec<(usize, Scalar)>>>,
}

/// Biinvariant functions with their convolution table.
#[derive(Clone, Debug)]
pub struct HeckeSubalgebra {
    pub basis: Vec<Element>,
    /// `table[i][j]` holds the coordinates of `basis[i] * basis[j]`.
    pub table: Vec<Vec<Vec<Scalar>>>,
    pub unit: Vec<Scalar>,
}

impl HeckeSubalgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn mul(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let k = self.dim();
        let mut out = alloc::vec![Scalar::zero(); k];
        for i in 0..k {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..k {
                if y[j].is_zero() {
                    continue;
                }
                let c = &x[i] * &y[j];
                for (o, t) in out.iter_mut().zip(&self.table[i][j]) {
                    if !t.is_zero() {
                        *o += &c * t;
                    }
                }
            }
        }
        out
    }

    pub fn is_commutative(&self) -> bool {
        let k = self.dim();
        (0..k).all(|i| (0..k).all(|j| self.table[i][j] == self.table[j][i]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterReport {
    pub dimension: usize,
    pub conjugacy_classes: usize,
    pub commutative: bool,
    /// Number of pairwise orthogonal minimal idempotents found, summing to the unit.
    pub minimal_idempotents: Option<usize>,
    pub haar_scale: Scalar,
}

impl CharacterReport {
    pub fn passed(&self) -> bool {
        self.commutative
            && self.dimension == self.conjugacy_classes
            && self.minimal_idempotents == Some(self.conjugacy_classes)
    }
}

impl DoubleAlgebra {
    pub fn new(group: GroupTable) -> Self {
        let n = group.order();
        let mut alg = DoubleAlgebra { group, n, haar_scale: Scalar::one(), antipode_inv: Vec::new(), conv: Vec::new() };
        let s: Vec<usize> = (0..n * n).map(|i| alg.antipode_basis(i)).collect();
        let mut inv = alloc::vec![0; n * n];
        for (i, &j) in s.iter().enumerate() {
            inv[j] = i;
        }
        alg.antipode_inv = inv;
        let ph = alg.p_h();
        let raw = alg.haar(&ph);
        alg.haar_scale = Scalar::one() / raw;
        alg.conv = (0..n * n).map(|i| (0..n * n).map(|j| alg.convolve_basis(i, j)).collect()).collect();
        alg
    }

    pub fn group(&self) -> &GroupTable {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.n * self.n
    }

    pub fn haar_scale(&self) -> &Scalar {
        &self.haar_scale
    }

    fn idx(&self, g: usize, h: usize) -> usize {
        g * self.n + h
    }

    fn split(&self, i: usize) -> (usize, usize) {
        (i / self.n, i % self.n)
    }

    pub fn zero(&self) -> Element {
        alloc::vec![Scalar::zero(); self.dim()]
    }

    pub fn basis(&self, g: usize, h: usize) -> Element {
        let mut v = self.zero();
        v[self.idx(g, h)] = Scalar::one();
        v
    }

    /// `1 ⊗ e`.
    pub fn unit(&self) -> Element {
        let e = self.group.identity();
        let mut v = self.zero();
        for g in 0..self.n {
            v[self.idx(g, e)] = Scalar::one();
        }
        v
    }

    /// `p_H = 1 ⊗ p₀` with `p₀` the averaging idempotent.
    pub fn p_h(&self) -> Element {
        let w = Scalar::ratio(1, self.n as i64);
        alloc::vec![w; self.dim()]
    }

    /// Pointwise product in `O(H) ⊗ ℂH`.
    pub fn product(&self, f: &[Scalar], g: &[Scalar]) -> Element {
        let mut out = self.zero();
        for a in 0..self.n {
            for x in 0..self.n {
                let fx = &f[self.idx(a, x)];
                if fx.is_zero() {
                    continue;
                }
                for y in 0..self.n {
                    let gy = &g[self.idx(a, y)];
                    if !gy.is_zero() {
                        out[self.idx(a, self.group.mul(x, y))] += fx * gy;
                    }
                }
            }
        }
        out
    }

    /// `Δ(δ_g⊗h) = Σ_{ab=g} (δ_a⊗bhb⁻¹) ⊗ (δ_b⊗h)`.
    pub fn coproduct_basis(&self, i: usize) -> Vec<(usize, usize)> {
        let (g, h) = self.split(i);
        let t = &self.group;
        (0..self.n)
            .map(|b| {
                let a = t.mul(g, t.inv(b));
                (self.idx(a, t.mul(t.mul(b, h), t.inv(b))), self.idx(b, h))
            })
            .collect()
    }

    pub fn coproduct(&self, f: &[Scalar]) -> BTreeMap<(usize, usize), Scalar> {
        let mut out = BTreeMap::new();
        for (i, c) in f.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for k in self.coproduct_basis(i) {
                *out.entry(k).or_insert_with(Scalar::zero) += c;
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    pub fn counit(&self, f: &[Scalar]) -> Scalar {
        let e = self.group.identity();
        (0..self.n).map(|h| f[self.idx(e, h)].clone()).sum()
    }

    /// `S(δ_g⊗h) = δ_{g⁻¹} ⊗ g h⁻¹ g⁻¹`.
    fn antipode_basis(&self, i: usize) -> usize {
        let (g, h) = self.split(i);
        let t = &self.group;
        self.idx(t.inv(g), t.mul(t.mul(g, t.inv(h)), t.inv(g)))
    }

    pub fn antipode(&self, f: &[Scalar]) -> Element {
        let mut out = self.zero();
        for (i, c) in f.iter().enumerate() {
            out[self.antipode_basis(i)] += c;
        }
        out
    }

    /// `φ = ĥ ⊗ h_R`.
    pub fn haar(&self, f: &[Scalar]) -> Scalar {
        let e = self.group.identity();
        let s: Scalar = (0..self.n).map(|g| f[self.idx(g, e)].clone()).sum();
        s * &self.haar_scale / Scalar::from_u64(self.n as u64)
    }

    /// `e_i * e_j = (φ(e_i ·) ⊗ id)(S⁻¹ ⊗ id)Δ(e_j)`.
    fn convolve_basis(&self, i: usize, j: usize) -> Vec<(usize, Scalar)> {
        let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
        let ei = {
            let mut v = self.zero();
            v[i] = Scalar::one();
            v
        };
        for (l, r) in self.coproduct_basis(j) {
            let mut s = self.zero();
            s[self.antipode_inv[l]] = Scalar::one();
            let w = self.haar(&self.product(&ei, &s));
            if !w.is_zero() {
                *acc.entry(r).or_insert_with(Scalar::zero) += &w;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        acc.into_iter().collect()
    }

    pub fn convolve(&self, f: &[Scalar], g: &[Scalar]) -> Element {
        let mut out = self.zero();
        for (i, x) in f.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in g.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                for (k, c) in &self.conv[i][j] {
                    out[*k] += &(x * y) * c;
                }
            }
        }
        out
    }

    fn projector(&self, left: bool) -> Matrix {
        let p = self.p_h();
        let cols: Vec<Element> = (0..self.dim())
            .map(|i| {
                let mut e = self.zero();
                e[i] = Scalar::one();
                if left {
                    self.convolve(&p, &e)
                } else {
                    self.convolve(&e, &p)
                }
            })
            .collect();
        linalg::transpose(&cols)
    }

    fn image_basis(&self, m: &Matrix) -> Vec<Element> {
        let (red, pivots) = linalg::rref(linalg::transpose(m));
        red.into_iter().take(pivots.len()).collect()
    }

    /// `c_c(G/H) = {f : f * p_H = f}`.
    pub fn right_invariant_basis(&self) -> Vec<Element> {
        self.image_basis(&self.projector(false))
    }

    /// `p_H * O_c(G) * p_H`.
    pub fn hecke_subalgebra(&self) -> HeckeSubalgebra {
        let l = self.projector(true);
        let r = self.projector(false);
        let basis = self.image_basis(&linalg::mat_mul(&l, &r));
        let table = basis
            .iter()
            .map(|x| {
                basis
                    .iter()
                    .map(|y| linalg::solve(&basis, &self.convolve(x, y)).expect("biinvariants are closed under convolution"))
                    .collect()
            })
            .collect();
        let unit = linalg::solve(&basis, &self.p_h()).expect("p_H is biinvariant");
        HeckeSubalgebra { basis, table, unit }
    }

    /// Coassociativity, counit, antipode, multiplicativity of `Δ`, invariance of `φ`
    /// and the group-like projection identities.
    pub fn verify_structure(&self) -> Vec<CheckReport> {
        let d = self.dim();
        let mut coassoc = CheckReport::new("coassociativity");
        let mut counit = CheckReport::new("counit");
        let mut antipode = CheckReport::new("antipode");
        let mut invariance = CheckReport::new("haar-invariance");
        let unit = self.unit();
        for i in 0..d {
            let delta = self.coproduct_basis(i);
            let mut lhs: BTreeMap<(usize, usize, usize), Scalar> = BTreeMap::new();
            let mut rhs: BTreeMap<(usize, usize, usize), Scalar> = BTreeMap::new();
            for &(a, b) in &delta {
                for (x, y) in self.coproduct_basis(a) {
                    *lhs.entry((x, y, b)).or_insert_with(Scalar::zero) += &Scalar::one();
                }
                for (x, y) in self.coproduct_basis(b) {
                    *rhs.entry((a, x, y)).or_insert_with(Scalar::zero) += &Scalar::one();
                }
            }
            coassoc.record(lhs == rhs, || format!("basis element {}", i));

            let mut ei = self.zero();
            ei[i] = Scalar::one();
            let mut left = self.zero();
            let mut right = self.zero();
            let mut s_left = self.zero();
            let mut s_right = self.zero();
            let mut inv = self.zero();
            for &(a, b) in &delta {
                let (ea, eb) = (self.basis(a / self.n, a % self.n), self.basis(b / self.n, b % self.n));
                let (ca, cb) = (self.counit(&ea), self.counit(&eb));
                for (k, v) in eb.iter().enumerate() {
                    left[k] += &(&ca * v);
                }
                for (k, v) in ea.iter().enumerate() {
                    right[k] += &(&cb * v);
                }
                let p = self.product(&self.antipode(&ea), &eb);
                let q = self.product(&ea, &self.antipode(&eb));
                let hb = self.haar(&eb);
                for k in 0..d {
                    s_left[k] += &p[k];
                    s_right[k] += &q[k];
                    inv[k] += &(&hb * &ea[k]);
                }
            }
            counit.record(left == ei && right == ei, || format!("basis element {}", i));
            let eps = self.counit(&ei);
            let expect: Element = unit.iter().map(|u| u * &eps).collect();
            antipode.record(s_left == expect && s_right == expect, || format!("basis element {}", i));
            let h = self.haar(&ei);
            let expect: Element = unit.iter().map(|u| u * &h).collect();
            invariance.record(inv == expect, || format!("basis element {}", i));
        }

        let mut mult = CheckReport::new("coproduct-multiplicative");
        for i in 0..d {
            for j in 0..d {
                let (ei, ej) = (self.basis(i / self.n, i % self.n), self.basis(j / self.n, j % self.n));
                let lhs = self.coproduct(&self.product(&ei, &ej));
                let mut rhs: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
                for (a, b) in self.coproduct_basis(i) {
                    for (c, e) in self.coproduct_basis(j) {
                        let x = self.product(&self.basis(a / self.n, a % self.n), &self.basis(c / self.n, c % self.n));
                        let y = self.product(&self.basis(b / self.n, b % self.n), &self.basis(e / self.n, e % self.n));
                        for (k, u) in x.iter().enumerate().filter(|(_, u)| !u.is_zero()) {
                            for (l, v) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                                *rhs.entry((k, l)).or_insert_with(Scalar::zero) += &(u * v);
                            }
                        }
                    }
                }
                rhs.retain(|_, v| !v.is_zero());
                mult.record(lhs == rhs, || format!("basis pair ({}, {})", i, j));
            }
        }

        let mut proj = CheckReport::new("group-like-projection");
        let p = self.p_h();
        proj.record(self.product(&p, &p) == p, || "p_H is not a pointwise idempotent".into());
        proj.record(self.convolve(&p, &p) == p, || "p_H is not a convolution idempotent".into());
        proj.record(self.counit(&p).is_one(), || "counit(p_H) != 1".into());
        proj.record(self.haar(&p).is_one(), || "phi(p_H) != 1".into());
        let dp = self.coproduct(&p);
        let mut lhs: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
        for ((a, b), c) in &dp {
            let y = self.product(&self.basis(b / self.n, b % self.n), &p);
            for (l, v) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                *lhs.entry((*a, l)).or_insert_with(Scalar::zero) += &(c * v);
            }
        }
        lhs.retain(|_, v| !v.is_zero());
        let mut rhs = BTreeMap::new();
        for (a, x) in p.iter().enumerate() {
            for (b, y) in p.iter().enumerate() {
                rhs.insert((a, b), x * y);
            }
        }
        proj.record(lhs == rhs, || "Delta(p_H)(1 (x) p_H) != p_H (x) p_H".into());
        alloc::vec![coassoc, counit, antipode, invariance, mult, proj]
    }

    pub fn verify_character_identification(&self, hecke: &HeckeSubalgebra) -> CharacterReport {
        CharacterReport {
            dimension: hecke.dim(),
            conjugacy_classes: self.group.conjugacy_classes().len(),
            commutative: hecke.is_commutative(),
            minimal_idempotents: minimal_idempotents(hecke).map(|v| v.len()),
            haar_scale: self.haar_scale.clone(),
        }
    }

    /// `T(f)(h) = h * f` on `c_c(G/H)`: anti-multiplicativity, `T⁻¹T = id`,
    /// and commutation with left convolution.
    pub fn verify_endomorphism_correspondence(&self, hecke: &HeckeSubalgebra) -> Vec<CheckReport> {
        let space = self.right_invariant_basis();
        let p = self.p_h();
        let mut anti = CheckReport::new("anti-multiplicative");
        let mut inverse = CheckReport::new("inverse");
        let mut module = CheckReport::new("module-map");
        for (a, f) in hecke.basis.iter().enumerate() {
            inverse.record(self.convolve(&p, f) == *f, || format!("T^-1 T differs on basis element {}", a));
            for (b, g) in hecke.basis.iter().enumerate() {
                let fg = self.convolve(f, g);
                for h in &space {
                    let lhs = self.convolve(h, &fg);
                    let rhs = self.convolve(&self.convolve(h, f), g);
                    anti.record(lhs == rhs, || format!("T(f{} * f{}) != T(f{}) T(f{})", a, b, b, a));
                }
            }
            for k in 0..self.dim() {
                let mut e = self.zero();
                e[k] = Scalar::one();
                for h in &space {
                    let lhs = self.convolve(&self.convolve(&e, h), f);
                    let rhs = self.convolve(&e, &self.convolve(h, f));
                    module.record(lhs == rhs, || format!("T(f{}) fails to commute with basis element {}", a, k));
                }
            }
        }
        alloc::vec![anti, inverse, module]
    }
}

/// Minimal idempotents of a commutative algebra, when it splits over the rationals.
pub fn minimal_idempotents(alg: &HeckeSubalgebra) -> Option<Vec<Vec<Scalar>>> {
    let k = alg.dim();
    if k == 0 {
        return Some(Vec::new());
    }
    for attempt in 0..6u64 {
        let a: Vec<Scalar> = (0..k as u64).map(|i| Scalar::from_u64((i + 1).pow(1 + attempt as u32 % 3) + attempt * i)).collect();
        let mut powers = alloc::vec![alg.unit.clone()];
        let coeffs = loop {
            let next = alg.mul(powers.last().unwrap(), &a);
            if let Some(c) = linalg::solve(&powers, &next) {
                break c;
            }
            powers.push(next);
        };
        if powers.len() < k {
            continue;
        }
        // Minimal polynomial x^d - Σ c_i x^i.
        let mut poly: Vec<Scalar> = coeffs.iter().map(|c| -c).collect();
        poly.push(Scalar::one());
        let roots = rational_roots(&poly)?;
        if roots.len() != powers.len() {
            return None;
        }
        let mut idem = Vec::with_capacity(k);
        for (i, l) in roots.iter().enumerate() {
            let mut e = alg.unit.clone();
            for (j, m) in roots.iter().enumerate() {
                if i == j {
                    continue;
                }
                let shifted: Vec<Scalar> = a.iter().zip(&alg.unit).map(|(x, u)| x - &(u * m)).collect();
                let inv = (l - m).recip()?;
                e = alg.mul(&e, &shifted).into_iter().map(|x| x * &inv).collect();
            }
            idem.push(e);
        }
        let mut sum = alloc::vec![Scalar::zero(); k];
        for (i, e) in idem.iter().enumerate() {
            if alg.mul(e, e) != *e {
                return None;
            }
            for (j, f) in idem.iter().enumerate() {
                if i != j && alg.mul(e, f).iter().any(|x| !x.is_zero()) {
                    return None;
                }
            }
            for (s, x) in sum.iter_mut().zip(e) {
                *s += x;
            }
        }
        return if sum == alg.unit { Some(idem) } else { None };
    }
    None
}

fn eval(poly: &[Scalar], x: &Scalar) -> Scalar {
    poly.iter().rev().fold(Scalar::zero(), |acc, c| acc * x + c)
}

fn divisors(n: &BigInt) -> Option<Vec<u64>> {
    let n = n.abs().to_u64()?;
    if n > 1_000_000_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d != n / d {
                out.push(n / d);
            }
        }
        d += 1;
    }
    Some(out)
}

/// Distinct rational roots of a polynomial given lowest degree first.
fn rational_roots(poly: &[Scalar]) -> Option<Vec<Scalar>> {
    let mut lcm = BigInt::one();
    for c in poly {
        lcm = lcm.lcm(c.denom());
    }
    let mut ints: Vec<BigInt> = poly.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
    let mut roots = Vec::new();
    while ints.first().map_or(false, |c| c.is_zero()) {
        ints.remove(0);
        if !roots.contains(&Scalar::zero()) {
            roots.push(Scalar::zero());
        }
    }
    if ints.len() <= 1 {
        return Some(roots);
    }
    let (ps, qs) = (divisors(&ints[0])?, divisors(ints.last().unwrap())?);
    let scaled: Vec<Scalar> = ints.iter().map(|c| Scalar::from_big(num_rational::BigRational::from_integer(c.clone()))).collect();
    for p in &ps {
        for q in &qs {
            for sign in [1i64, -1] {
                let r = Scalar::ratio(sign * *p as i64, *q as i64);
                if !roots.contains(&r) && eval(&scaled, &r).is_zero() {
                    roots.push(r);
                }
            }
        }
    }
    roots.sort();
    Some(roots)
}
