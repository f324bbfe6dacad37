use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use spin::Mutex;

use super::lazy::{Integers, Su2Dual};
use super::product::{RestrictedOmit, RestrictedProduct};
use crate::error::{Error, Result};
use crate::object::{Decomposition, ObjectId, SimpleObject};
use crate::ring::{FusionRing, RingExt, SharedRing};
use crate::scalar::Scalar;
use crate::subgroup::{SubgroupRule, SubgroupSet, WholeRing};

/// The isomorphism `θ: Λ₁ → Λ₋₁` and its inverse.
pub trait ThetaMap: Send + Sync {
    fn name(&self) -> String;

    /// `θ` when `forward`, else `θ⁻¹`; `None` outside the domain.
    fn apply(&self, id: &ObjectId, forward: bool) -> Option<ObjectId>;

    /// Structural proof that the intersection of all `Dom θ^k` is trivial.
    fn domain_argument(&self) -> Option<String> {
        None
    }
}

/// `θ = id` on a subgroup.
pub struct IdentityTheta {
    pub ring: SharedRing,
    pub domain: SubgroupSet,
}

impl ThetaMap for IdentityTheta {
    fn name(&self) -> String {
        "identity".into()
    }

    fn apply(&self, id: &ObjectId, _forward: bool) -> Option<ObjectId> {
        match self.domain.contains(self.ring.as_ref(), id) {
            Ok(true) => Some(id.clone()),
            _ => None,
        }
    }
}

/// `θ(mk) = nk` on the integers.
pub struct ScaleTheta {
    pub m: i64,
    pub n: i64,
}

impl ThetaMap for ScaleTheta {
    fn name(&self) -> String {
        format!("scale:{}->{}", self.m, self.n)
    }

    fn apply(&self, id: &ObjectId, forward: bool) -> Option<ObjectId> {
        let k = id.as_int()?;
        let (from, to) = if forward { (self.m, self.n) } else { (self.n, self.m) };
        if k % from == 0 {
            Some(ObjectId::Int(k / from * to))
        } else {
            None
        }
    }
}

/// Position shift on a restricted product over `ℤ*`, moving every letter one
/// step towards negative infinity and skipping 0.
pub struct ShiftTheta {
    pub ring: Arc<RestrictedProduct>,
}

impl ThetaMap for ShiftTheta {
    fn name(&self) -> String {
        "shift".into()
    }

    fn apply(&self, id: &ObjectId, forward: bool) -> Option<ObjectId> {
        let letters = self.ring.letters(id).ok()?;
        let blocked = if forward { 1 } else { -1 };
        if letters.iter().any(|(k, _)| *k == blocked) {
            return None;
        }
        let step = if forward { -1 } else { 1 };
        let moved: Vec<(i64, ObjectId)> = letters.into_iter().map(|(k, x)| (k + step, x)).collect();
        Some(self.ring.word(&moved))
    }

    fn domain_argument(&self) -> Option<String> {
        Some(
            "Dom θ^k consists of the objects with no letter at positions 1..k (k > 0) or k..-1 (k < 0); \
             an object lying in every domain has empty support"
                .into(),
        )
    }
}

/// `θ` given by an explicit list of pairs `(a, θ(a))`.
pub struct PairsTheta {
    forward: BTreeMap<ObjectId, ObjectId>,
    backward: BTreeMap<ObjectId, ObjectId>,
}

impl PairsTheta {
    pub fn new(pairs: &[(ObjectId, ObjectId)]) -> Result<Self> {
        let mut forward = BTreeMap::new();
        let mut backward = BTreeMap::new();
        for (a, b) in pairs {
            if forward.insert(a.clone(), b.clone()).is_some() || backward.insert(b.clone(), a.clone()).is_some() {
                return Err(Error::InvalidTheta(format!("{:?} ↦ {:?} repeats a source or target", a, b)));
            }
        }
        Ok(PairsTheta { forward, backward })
    }
}

impl ThetaMap for PairsTheta {
    fn name(&self) -> String {
        format!("pairs:{}", self.forward.len())
    }

    fn apply(&self, id: &ObjectId, forward: bool) -> Option<ObjectId> {
        if forward { self.forward.get(id) } else { self.backward.get(id) }.cloned()
    }
}

/// Divisibility subgroup `mℤ` of the integers.
pub struct Multiples(pub i64);

impl SubgroupRule for Multiples {
    fn name(&self) -> String {
        format!("multiples:{}", self.0)
    }

    fn contains(&self, id: &ObjectId) -> Result<bool> {
        let k = id.as_int().ok_or_else(|| Error::UnknownObject(format!("{:?}", id)))?;
        Ok(k % self.0 == 0)
    }

    fn generators(&self, _horizon: u32) -> (Vec<ObjectId>, bool) {
        (alloc::vec![ObjectId::Int(-self.0), ObjectId::Int(self.0)], true)
    }
}

/// Even spins of `SU(2)`, i.e. the representations of `SO(3)`.
pub struct EvenSpins;

impl SubgroupRule for EvenSpins {
    fn name(&self) -> String {
        "even-spins".into()
    }

    fn contains(&self, id: &ObjectId) -> Result<bool> {
        match id.as_int() {
            Some(n) if n >= 0 => Ok(n % 2 == 0),
            _ => Err(Error::UnknownObject(format!("{:?}", id))),
        }
    }

    fn generators(&self, _horizon: u32) -> (Vec<ObjectId>, bool) {
        (alloc::vec![ObjectId::Int(2)], true)
    }
}

/// Data of an HNN extension over a base ring.
#[derive(Clone)]
pub struct HnnRecipe {
    pub name: String,
    pub base: SharedRing,
    pub lambda_plus: SubgroupSet,
    pub lambda_minus: SubgroupSet,
    pub theta: Arc<dyn ThetaMap>,
    /// Representatives of `I(Γ₀)/Λ₁`, unit first.
    pub reps_plus: Vec<ObjectId>,
    /// Representatives of `I(Γ₀)/Λ₋₁`, unit first.
    pub reps_minus: Vec<ObjectId>,
    /// Base objects that generate the extension together with `w`.
    pub grade_generators: Vec<ObjectId>,
    pub max_word_length: usize,
}

/// Closed-form coset data of the double class of `w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HnnClosedForms {
    pub l_w: u64,
    pub r_w: u64,
    pub l_tilde: Scalar,
    pub r_tilde: Scalar,
    pub nabla_w: Scalar,
}

fn min_rep(ring: &dyn FusionRing, ids: &[ObjectId]) -> ObjectId {
    ids.iter().min_by_key(|x| ring.order_key(x)).cloned().unwrap()
}

impl HnnRecipe {
    /// Restricted product of `plus` on positive and `minus` on negative
    /// positions, `Λ_ε` the objects without a letter at `ε`, `θ` the shift.
    pub fn profinite(plus: SharedRing, minus: SharedRing) -> Result<Self> {
        let rp = Arc::new(RestrictedProduct::new(plus.clone(), minus.clone())?);
        let base: SharedRing = rp.clone();
        let letters_at = |k: i64, f: &SharedRing| -> Vec<ObjectId> {
            let mut v = alloc::vec![rp.unit()];
            for x in f.enumerate_up_to(u32::MAX) {
                if x != f.unit() {
                    v.push(rp.word(&[(k, x)]));
                }
            }
            v
        };
        let reps_plus = letters_at(1, &plus);
        let reps_minus = letters_at(-1, &minus);
        let grade_generators = reps_plus[1..].iter().chain(reps_minus[1..].iter()).cloned().collect();
        Ok(HnnRecipe {
            name: format!("hnn-profinite({}, {})", plus.name(), minus.name()),
            base,
            lambda_plus: SubgroupSet::from_rule(Arc::new(RestrictedOmit { ring: rp.clone(), position: 1 })),
            lambda_minus: SubgroupSet::from_rule(Arc::new(RestrictedOmit { ring: rp.clone(), position: -1 })),
            theta: Arc::new(ShiftTheta { ring: rp }),
            reps_plus,
            reps_minus,
            grade_generators,
            max_word_length: 8,
        })
    }

    /// Baumslag–Solitar group `⟨a, w | w a^m w⁻¹ = a^n⟩`.
    pub fn baumslag_solitar(m: i64, n: i64) -> Result<Self> {
        if m <= 0 || n <= 0 {
            return Err(Error::InvalidRecipe("Baumslag–Solitar parameters must be positive".into()));
        }
        let base: SharedRing = Arc::new(Integers);
        let reps = |q: i64| -> Vec<ObjectId> {
            (0..q).map(|r| min_rep(base.as_ref(), &[ObjectId::Int(r), ObjectId::Int(r - q)])).collect()
        };
        Ok(HnnRecipe {
            name: format!("bs({},{})", m, n),
            base: base.clone(),
            lambda_plus: SubgroupSet::from_rule(Arc::new(Multiples(m))),
            lambda_minus: SubgroupSet::from_rule(Arc::new(Multiples(n))),
            theta: Arc::new(ScaleTheta { m, n }),
            reps_plus: reps(m),
            reps_minus: reps(n),
            grade_generators: alloc::vec![ObjectId::Int(-1), ObjectId::Int(1)],
            max_word_length: 8,
        })
    }

    /// `SU(2)`-dual base with `Λ₁ = Λ₋₁` the even spins and `θ = id`.
    pub fn su2_center() -> Self {
        let base: SharedRing = Arc::new(Su2Dual);
        let even = SubgroupSet::from_rule(Arc::new(EvenSpins));
        HnnRecipe {
            name: "hnn-su2-center".into(),
            base: base.clone(),
            lambda_plus: even.clone(),
            lambda_minus: even.clone(),
            theta: Arc::new(IdentityTheta { ring: base, domain: even }),
            reps_plus: alloc::vec![ObjectId::Int(0), ObjectId::Int(1)],
            reps_minus: alloc::vec![ObjectId::Int(0), ObjectId::Int(1)],
            grade_generators: alloc::vec![ObjectId::Int(1)],
            max_word_length: 8,
        }
    }

    /// `Λ₁ = Λ₋₁ = Γ₀` and `θ = id`.
    pub fn trivial(base: SharedRing) -> Result<Self> {
        let whole = if base.is_finite() {
            SubgroupSet::from_members(base.as_ref(), &base.enumerate_up_to(u32::MAX))?
        } else {
            SubgroupSet::from_rule(Arc::new(WholeRing(base.clone())))
        };
        let (gens, _) = base.generators(1);
        Ok(HnnRecipe {
            name: format!("hnn-trivial({})", base.name()),
            base: base.clone(),
            lambda_plus: whole.clone(),
            lambda_minus: whole.clone(),
            theta: Arc::new(IdentityTheta { ring: base.clone(), domain: whole }),
            reps_plus: alloc::vec![base.unit()],
            reps_minus: alloc::vec![base.unit()],
            grade_generators: gens.into_iter().filter(|x| *x != base.unit()).collect(),
            max_word_length: 8,
        })
    }

    /// Finite base with explicit subgroups and `θ` pairs; coset
    /// representatives are the `(grade, id)`-minimal members.
    pub fn from_pairs(
        name: &str,
        base: SharedRing,
        lambda_plus: SubgroupSet,
        lambda_minus: SubgroupSet,
        pairs: &[(ObjectId, ObjectId)],
    ) -> Result<Self> {
        if !base.is_finite() {
            return Err(Error::InvalidRecipe("explicit θ pairs require a finite base".into()));
        }
        let mut objects = base.enumerate_up_to(u32::MAX);
        objects.sort_by_key(|x| *x != base.unit());
        let reps = |lam: &SubgroupSet| -> Result<Vec<ObjectId>> {
            let mut out: Vec<ObjectId> = Vec::new();
            for r in &objects {
                let mut seen = false;
                for s in &out {
                    for (x, _) in base.fuse(&base.conj(s)?, r)?.iter() {
                        seen |= lam.contains(base.as_ref(), x)?;
                    }
                }
                if !seen {
                    out.push(r.clone());
                }
            }
            Ok(out)
        };
        let reps_plus = reps(&lambda_plus)?;
        let reps_minus = reps(&lambda_minus)?;
        let grade_generators = objects.iter().filter(|x| **x != base.unit()).cloned().collect();
        Ok(HnnRecipe {
            name: name.into(),
            base,
            lambda_plus,
            lambda_minus,
            theta: Arc::new(PairsTheta::new(pairs)?),
            reps_plus,
            reps_minus,
            grade_generators,
            max_word_length: 8,
        })
    }

    pub fn lambda(&self, eps: i8) -> &SubgroupSet {
        if eps > 0 {
            &self.lambda_plus
        } else {
            &self.lambda_minus
        }
    }

    /// Representatives of `I(Γ₀)/Λ_ε`.
    pub fn reps(&self, eps: i8) -> &[ObjectId] {
        if eps > 0 {
            &self.reps_plus
        } else {
            &self.reps_minus
        }
    }

    /// `θ^ε` for `ε = ±1`.
    pub fn theta_pow(&self, id: &ObjectId, eps: i8) -> Option<ObjectId> {
        self.theta.apply(id, eps > 0)
    }

    /// `κ` of `γ ⊗ γ̄` relative to `Λ_ε`.
    pub fn kappa(&self, gamma: &ObjectId, eps: i8) -> Result<Scalar> {
        let base = self.base.as_ref();
        let mut k = Scalar::zero();
        for (x, m) in base.fuse(gamma, &base.conj(gamma)?)?.iter() {
            if self.lambda(eps).contains(base, x)? {
                k += base.qdim(x)?.mul_int(*m as u64);
            }
        }
        Ok(k)
    }

    pub fn closed_forms(&self) -> Result<HnnClosedForms> {
        let tilde = |eps: i8| -> Result<Scalar> {
            let mut s = Scalar::zero();
            for g in self.reps(eps) {
                let q = self.base.qdim(g)?;
                s += q.clone() * q / self.kappa(g, eps)?;
            }
            Ok(s)
        };
        let l_tilde = tilde(1)?;
        let r_tilde = tilde(-1)?;
        let nabla_w = l_tilde.clone() / &r_tilde;
        Ok(HnnClosedForms {
            l_w: self.reps_plus.len() as u64,
            r_w: self.reps_minus.len() as u64,
            l_tilde,
            r_tilde,
            nabla_w,
        })
    }

    /// Checks `θ` and the coset representatives on base objects of grade at
    /// most `g`.
    pub fn validate(&self, g: u32) -> Result<()> {
        let base = self.base.as_ref();
        let unit = base.unit();
        for eps in [1i8, -1] {
            let lam = self.lambda(eps);
            if self.theta_pow(&unit, eps) != Some(unit.clone()) {
                return Err(Error::InvalidTheta("θ does not fix the unit".into()));
            }
            let window: Vec<ObjectId> =
                base.enumerate_up_to(g).into_iter().filter(|x| lam.contains(base, x).unwrap_or(false)).collect();
            for a in &window {
                let t = self.theta_pow(a, eps).ok_or_else(|| {
                    Error::InvalidTheta(format!("{} lies in the domain but θ is undefined there", base.render(a)))
                })?;
                if !self.lambda(-eps).contains(base, &t)? {
                    return Err(Error::InvalidTheta(format!("θ({}) leaves the target subgroup", base.render(a))));
                }
                if self.theta_pow(&t, -eps).as_ref() != Some(a) {
                    return Err(Error::InvalidTheta(format!("θ is not invertible at {}", base.render(a))));
                }
                let (oa, ot) = (base.object(a)?, base.object(&t)?);
                if oa.qdim != ot.qdim || oa.dim != ot.dim {
                    return Err(Error::InvalidTheta(format!("θ changes the dimension of {}", base.render(a))));
                }
                if self.theta_pow(&oa.conj, eps).as_ref() != Some(&ot.conj) {
                    return Err(Error::InvalidTheta(format!("θ does not commute with conjugation at {}", base.render(a))));
                }
            }
            for a in &window {
                for b in &window {
                    let (ta, tb) = (self.theta_pow(a, eps).unwrap(), self.theta_pow(b, eps).unwrap());
                    let mapped: Option<Vec<(ObjectId, u32)>> =
                        base.fuse(a, b)?.iter().map(|(x, m)| self.theta_pow(x, eps).map(|y| (y, *m))).collect();
                    let mapped = mapped.ok_or_else(|| {
                        Error::InvalidTheta(format!("θ undefined on {} ⊗ {}", base.render(a), base.render(b)))
                    })?;
                    if Decomposition::from_terms(mapped) != base.fuse(&ta, &tb)? {
                        return Err(Error::InvalidTheta(format!(
                            "θ is not multiplicative on {} ⊗ {}",
                            base.render(a),
                            base.render(b)
                        )));
                    }
                }
            }
            let reps = self.reps(eps);
            if reps.first() != Some(&unit) {
                return Err(Error::InvalidRecipe("the unit must be the first coset representative".into()));
            }
            for (i, r) in reps.iter().enumerate() {
                base.object(r)?;
                for s in &reps[..i] {
                    let mut related = false;
                    for (x, _) in base.fuse(&base.conj(s)?, r)?.iter() {
                        related |= lam.contains(base, x)?;
                    }
                    if related {
                        return Err(Error::InvalidRecipe(format!(
                            "representatives {} and {} lie in the same coset",
                            base.render(s),
                            base.render(r)
                        )));
                    }
                }
                let k = self.kappa(r, eps)?;
                if !k.is_one() {
                    return Err(Error::InvalidRecipe(format!(
                        "coset of {} is not factorizable: its Λ-part of γ⊗γ̄ has dimension {}",
                        base.render(r),
                        k
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Word {
    letters: Vec<(ObjectId, i8)>,
    tail: ObjectId,
}

impl Word {
    fn base(tail: ObjectId) -> Self {
        Word { letters: Vec::new(), tail }
    }

    fn id(&self) -> ObjectId {
        let mut v = Vec::with_capacity(2 * self.letters.len() + 1);
        for (g, e) in &self.letters {
            v.push(g.clone());
            v.push(ObjectId::Int(*e as i64));
        }
        v.push(self.tail.clone());
        ObjectId::tuple(v)
    }
}

struct Ball {
    layers: Vec<Vec<ObjectId>>,
    grade: BTreeMap<ObjectId, u32>,
}

/// HNN extension ring over reduced words `γ₁ w^{ε₁} ⋯ γₙ w^{εₙ} α`, with
/// `γᵢ` a coset representative of `I(Γ₀)/Λ_{-εᵢ}` and `α ∈ I(Γ₀)`.
pub struct Hnn {
    recipe: HnnRecipe,
    factor_cache: Mutex<BTreeMap<(ObjectId, i8), (ObjectId, ObjectId)>>,
    ball: Mutex<Ball>,
    grade_cap: u32,
}

impl Hnn {
    /// Validates the recipe on base objects up to `check_grade`.
    pub fn new(recipe: HnnRecipe, check_grade: u32) -> Result<Self> {
        recipe.validate(check_grade)?;
        let unit = Word::base(recipe.base.unit()).id();
        let mut grade = BTreeMap::new();
        grade.insert(unit.clone(), 0);
        Ok(Hnn {
            recipe,
            factor_cache: Mutex::new(BTreeMap::new()),
            ball: Mutex::new(Ball { layers: alloc::vec![alloc::vec![unit]], grade }),
            grade_cap: 12,
        })
    }

    pub fn recipe(&self) -> &HnnRecipe {
        &self.recipe
    }

    pub fn with_grade_cap(mut self, cap: u32) -> Self {
        self.grade_cap = cap;
        self
    }

    pub fn with_max_word_length(mut self, n: usize) -> Self {
        self.recipe.max_word_length = n;
        self
    }

    /// The stable letter `w^ε`.
    pub fn w(&self, eps: i8) -> ObjectId {
        let u = self.recipe.base.unit();
        Word { letters: alloc::vec![(u.clone(), eps)], tail: u }.id()
    }

    /// Embeds a base object.
    pub fn embed(&self, x: ObjectId) -> ObjectId {
        Word::base(x).id()
    }

    /// `w^k` for any integer `k`.
    pub fn w_power(&self, k: i64) -> ObjectId {
        let u = self.recipe.base.unit();
        let eps = if k >= 0 { 1 } else { -1 };
        Word { letters: (0..k.unsigned_abs()).map(|_| (u.clone(), eps)).collect(), tail: u }.id()
    }

    /// Base part of a word of length 0.
    pub fn as_base<'a>(&self, id: &'a ObjectId) -> Option<&'a ObjectId> {
        match id.as_tuple() {
            Some([x]) => Some(x),
            _ => None,
        }
    }

    /// Number of stable letters.
    pub fn word_length(&self, id: &ObjectId) -> Result<usize> {
        Ok(self.word(id)?.letters.len())
    }

    pub fn base_subgroup(self: &Arc<Self>) -> SubgroupSet {
        SubgroupSet::from_rule(Arc::new(HnnBase { ring: self.clone() }))
    }

    fn word(&self, id: &ObjectId) -> Result<Word> {
        let bad = |why: &str| Error::UnknownObject(format!("{:?}: {}", id, why));
        let items = id.as_tuple().ok_or_else(|| bad("not a word"))?;
        if items.len() % 2 == 0 {
            return Err(bad("not a word"));
        }
        let base = self.recipe.base.as_ref();
        let mut letters = Vec::with_capacity(items.len() / 2);
        let mut prev: Option<i8> = None;
        for pair in items[..items.len() - 1].chunks(2) {
            let eps = match pair[1].as_int() {
                Some(1) => 1i8,
                Some(-1) => -1i8,
                _ => return Err(bad("exponent must be ±1")),
            };
            let g = &pair[0];
            if !self.recipe.reps(-eps).contains(g) {
                return Err(bad("slot is not a coset representative"));
            }
            if prev == Some(-eps) && *g == base.unit() {
                return Err(bad("word is not reduced"));
            }
            prev = Some(eps);
            letters.push((g.clone(), eps));
        }
        let tail = items[items.len() - 1].clone();
        base.object(&tail)?;
        Ok(Word { letters, tail })
    }

    /// `z ≅ γ ⊗ λ` with `γ` a representative of `I(Γ₀)/Λ_{-ε}`.
    fn factorize(&self, z: &ObjectId, eps: i8) -> Result<(ObjectId, ObjectId)> {
        let key = (z.clone(), eps);
        if let Some(v) = self.factor_cache.lock().get(&key) {
            return Ok(v.clone());
        }
        let base = self.recipe.base.as_ref();
        let lam = self.recipe.lambda(-eps);
        for g in self.recipe.reps(-eps) {
            let d = base.fuse(&base.conj(g)?, z)?;
            let mut hits = Vec::new();
            for (x, m) in d.iter() {
                if lam.contains(base, x)? {
                    hits.push((x.clone(), *m));
                }
            }
            match hits.as_slice() {
                [] => continue,
                [(x, 1)] => {
                    let v = (g.clone(), x.clone());
                    self.factor_cache.lock().insert(key, v.clone());
                    return Ok(v);
                }
                _ => {
                    return Err(Error::InvalidRecipe(format!("{} does not factor through a single coset", base.render(z))))
                }
            }
        }
        Err(Error::InvalidRecipe(format!("{} lies in no listed coset", base.render(z))))
    }

    fn theta(&self, x: &ObjectId, eps: i8) -> Result<ObjectId> {
        self.recipe.theta_pow(x, eps).ok_or_else(|| {
            Error::InvalidTheta(format!("θ^{} undefined at {}", eps, self.recipe.base.render(x)))
        })
    }

    fn fuse_words(&self, u: &Word, v: &Word) -> Result<Vec<(Word, u32)>> {
        let base = self.recipe.base.as_ref();
        if v.letters.is_empty() {
            return Ok(base
                .fuse(&u.tail, &v.tail)?
                .iter()
                .map(|(z, m)| (Word { letters: u.letters.clone(), tail: z.clone() }, *m))
                .collect());
        }
        let (g1, e1) = (&v.letters[0].0, v.letters[0].1);
        let rest = Word { letters: v.letters[1..].to_vec(), tail: v.tail.clone() };
        let mut out = Vec::new();
        for (z, m) in base.fuse(&u.tail, g1)?.iter() {
            let (gz, lz) = self.factorize(z, e1)?;
            let cancel = gz == base.unit() && u.letters.last().map_or(false, |(_, en)| *en == -e1);
            if cancel {
                let n = u.letters.len();
                let en = u.letters[n - 1].1;
                let t = self.theta(z, en)?;
                let shorter = Word { letters: u.letters[..n - 1].to_vec(), tail: u.letters[n - 1].0.clone() };
                for (x, k) in self.fuse_words(&Word::base(t), &rest)? {
                    for (y, j) in self.fuse_words(&shorter, &x)? {
                        out.push((y, m * k * j));
                    }
                }
            } else {
                let t = self.theta(&lz, -e1)?;
                for (x, k) in self.fuse_words(&Word::base(t), &rest)? {
                    let mut letters = u.letters.clone();
                    letters.push((gz.clone(), e1));
                    letters.extend(x.letters);
                    out.push((Word { letters, tail: x.tail }, m * k));
                }
            }
        }
        Ok(out)
    }

    fn fuse_ids(&self, a: &ObjectId, b: &ObjectId) -> Result<Decomposition> {
        let (u, v) = (self.word(a)?, self.word(b)?);
        Ok(Decomposition::from_terms(self.fuse_words(&u, &v)?.into_iter().map(|(w, m)| (w.id(), m))))
    }

    fn single(&self, d: Vec<(Word, u32)>) -> Result<Word> {
        match d.as_slice() {
            [(w, 1)] => Ok(w.clone()),
            _ => Err(Error::InvalidRecipe("conjugate word is not simple".into())),
        }
    }

    fn conj_word(&self, w: &Word) -> Result<Word> {
        let base = self.recipe.base.as_ref();
        let unit = base.unit();
        let mut acc = Word::base(base.conj(&w.tail)?);
        for (g, e) in w.letters.iter().rev() {
            let step = Word { letters: alloc::vec![(unit.clone(), -*e)], tail: unit.clone() };
            acc = self.single(self.fuse_words(&acc, &step)?)?;
            acc = self.single(self.fuse_words(&acc, &Word::base(base.conj(g)?))?)?;
        }
        Ok(acc)
    }

    fn stable_generators(&self) -> Vec<ObjectId> {
        let mut v = alloc::vec![self.w(1), self.w(-1)];
        v.extend(self.recipe.grade_generators.iter().map(|x| self.embed(x.clone())));
        v
    }

    fn expand(&self, ball: &mut Ball) {
        let gens = self.stable_generators();
        let r = ball.layers.len() as u32;
        let mut next = Vec::new();
        for x in ball.layers.last().unwrap().clone() {
            for s in &gens {
                if let Ok(d) = self.fuse_ids(&x, s) {
                    for (z, _) in d.iter() {
                        if !ball.grade.contains_key(z) {
                            ball.grade.insert(z.clone(), r);
                            next.push(z.clone());
                        }
                    }
                }
            }
        }
        next.sort();
        ball.layers.push(next);
    }

    fn grade_of(&self, id: &ObjectId) -> Result<u32> {
        let mut ball = self.ball.lock();
        loop {
            if let Some(g) = ball.grade.get(id) {
                return Ok(*g);
            }
            let r = ball.layers.len() as u32;
            if r > self.grade_cap || ball.layers.last().map_or(true, |l| l.is_empty()) {
                return Err(Error::HorizonExceeded(format!(
                    "{} has word length above the materialization bound {}",
                    self.render(id),
                    self.grade_cap
                )));
            }
            self.expand(&mut ball);
        }
    }

    /// Base objects whose iterated images under `θ^ε` are defined.
    fn domain_depth(&self, x: &ObjectId, eps: i8, limit: u32) -> u32 {
        let mut cur = x.clone();
        for n in 0..limit {
            match self.recipe.theta_pow(&cur, eps) {
                Some(y) if self.recipe.lambda(eps).contains(self.recipe.base.as_ref(), &cur).unwrap_or(false) => cur = y,
                _ => return n,
            }
        }
        limit
    }
}

impl FusionRing for Hnn {
    fn name(&self) -> String {
        self.recipe.name.clone()
    }

    fn unit(&self) -> ObjectId {
        Word::base(self.recipe.base.unit()).id()
    }

    fn object(&self, id: &ObjectId) -> Result<SimpleObject> {
        let w = self.word(id)?;
        let base = self.recipe.base.as_ref();
        let mut dim = 1u64;
        let mut qdim = Scalar::one();
        for x in w.letters.iter().map(|(g, _)| g).chain(core::iter::once(&w.tail)) {
            let o = base.object(x)?;
            dim *= o.dim;
            qdim *= &o.qdim;
        }
        let grade = self.grade_of(id)?;
        let conj = self.conj_word(&w)?.id();
        Ok(SimpleObject { id: id.clone(), grade, dim, qdim, conj })
    }

    fn fuse(&self, a: &ObjectId, b: &ObjectId) -> Result<Decomposition> {
        let (u, v) = (self.word(a)?, self.word(b)?);
        let total = u.letters.len() + v.letters.len();
        if total > self.recipe.max_word_length {
            return Err(Error::LengthUnsupported(format!(
                "total word length {} exceeds {}",
                total, self.recipe.max_word_length
            )));
        }
        Ok(Decomposition::from_terms(self.fuse_words(&u, &v)?.into_iter().map(|(w, m)| (w.id(), m))))
    }

    fn enumerate_up_to(&self, g: u32) -> Vec<ObjectId> {
        let g = g.min(self.grade_cap);
        let mut ball = self.ball.lock();
        while (ball.layers.len() as u32) <= g && !ball.layers.last().map_or(true, |l| l.is_empty()) {
            self.expand(&mut ball);
        }
        ball.layers.iter().take(g as usize + 1).flatten().cloned().collect()
    }

    fn is_finite(&self) -> bool {
        false
    }

    fn is_kac(&self) -> bool {
        self.recipe.base.is_kac()
    }

    fn render(&self, id: &ObjectId) -> String {
        let w = match self.word(id) {
            Ok(w) => w,
            Err(_) => return format!("{:?}", id),
        };
        let base = self.recipe.base.as_ref();
        let unit = base.unit();
        let mut s = String::new();
        for (g, e) in &w.letters {
            if *g != unit {
                s.push('{');
                s.push_str(&base.render(g));
                s.push('}');
            }
            s.push(if *e > 0 { 'w' } else { 'W' });
        }
        if s.is_empty() && w.tail == unit {
            return "1".into();
        }
        if w.tail != unit {
            s.push('{');
            s.push_str(&base.render(&w.tail));
            s.push('}');
        }
        s
    }

    fn parse(&self, text: &str) -> Result<ObjectId> {
        let t = text.trim();
        if t == "1" {
            return Ok(self.unit());
        }
        let base = self.recipe.base.as_ref();
        let unit = base.unit();
        let mut acc = Word::base(unit.clone());
        let chars: Vec<(usize, char)> = t.char_indices().collect();
        let mut i = 0;
        while i < chars.len() {
            let (pos, c) = chars[i];
            let factor = match c {
                'w' | 'W' => {
                    i += 1;
                    Word { letters: alloc::vec![(unit.clone(), if c == 'w' { 1 } else { -1 })], tail: unit.clone() }
                }
                '{' => {
                    let mut depth = 0i32;
                    let mut j = i;
                    loop {
                        if j >= chars.len() {
                            return Err(Error::Parse(format!("unbalanced braces in {:?}", text)));
                        }
                        match chars[j].1 {
                            '{' | '(' | '[' => depth += 1,
                            '}' | ')' | ']' => depth -= 1,
                            _ => {}
                        }
                        if depth == 0 {
                            break;
                        }
                        j += 1;
                    }
                    let end = chars[j].0;
                    let inner = &t[pos + 1..end];
                    i = j + 1;
                    Word::base(base.parse(inner)?)
                }
                c if c.is_whitespace() => {
                    i += 1;
                    continue;
                }
                _ => return Err(Error::Parse(format!("unexpected {:?} in {:?}", c, text))),
            };
            acc = match self.fuse_words(&acc, &factor)?.as_slice() {
                [(w, 1)] => w.clone(),
                _ => return Err(Error::Parse(format!("{:?} is not a simple object", text))),
            };
        }
        Ok(acc.id())
    }

    fn generators(&self, _horizon: u32) -> (Vec<ObjectId>, bool) {
        (self.stable_generators(), true)
    }

    fn faithfulness_hint(&self, sub: &SubgroupSet, alpha: &ObjectId) -> Option<ObjectId> {
        if sub.rule_name().as_deref() != Some("hnn-base") {
            return None;
        }
        let x = self.as_base(alpha)?;
        if *x == self.recipe.base.unit() {
            return None;
        }
        let limit = self.grade_cap;
        let mut best: Option<(u32, i8)> = None;
        for eps in [1i8, -1] {
            let n = self.domain_depth(x, eps, limit);
            if n < limit && best.map_or(true, |(b, _)| n < b) {
                best = Some((n, eps));
            }
        }
        let (n, eps) = best?;
        Some(self.w_power(-((n as i64 + 1) * eps as i64)))
    }

    fn faithfulness_argument(&self, sub: &SubgroupSet) -> Option<String> {
        if sub.rule_name().as_deref() != Some("hnn-base") {
            return None;
        }
        self.recipe.theta.domain_argument()
    }
}

/// The base `Γ₀` inside an HNN extension.
pub struct HnnBase {
    pub ring: Arc<Hnn>,
}

impl SubgroupRule for HnnBase {
    fn name(&self) -> String {
        "hnn-base".into()
    }

    fn contains(&self, id: &ObjectId) -> Result<bool> {
        Ok(self.ring.word(id)?.letters.is_empty())
    }

    fn generators(&self, horizon: u32) -> (Vec<ObjectId>, bool) {
        let base = &self.ring.recipe.base;
        let (gens, complete) = base.generators(horizon);
        let keep = gens
            .into_iter()
            .filter(|x| *x != base.unit())
            .map(|x| self.ring.embed(x))
            .filter(|x| complete || self.ring.grade_of(x).map_or(false, |g| g <= horizon))
            .collect();
        (keep, complete)
    }
}
