//! The central Hecke algebra spanned by double-class projections.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::check::CheckReport;
use crate::cosets::{coset_classes, related, ClassStatus, CosetData, Side};
use crate::error::{Error, Result};
use crate::kappa::KappaTable;
use crate::object::ObjectId;
use crate::ring::{FusionRing, RingExt};
use crate::scalar::Scalar;
use crate::subgroup::SubgroupSet;

/// Per-object coefficients of a product of class projections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectCoefficients {
    /// Nonzero coefficients only.
    pub coeffs: BTreeMap<ObjectId, Scalar>,
    /// Every object at which the product was evaluated.
    pub evaluated: BTreeSet<ObjectId>,
    pub status: ClassStatus,
}

/// `Σ_τ c_τ p_τ`, keyed by double-class index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralHeckeElement {
    pub coeffs: BTreeMap<usize, Scalar>,
    pub status: ClassStatus,
}

impl CentralHeckeElement {
    pub fn basis(tau: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(tau, Scalar::one());
        CentralHeckeElement { coeffs, status: ClassStatus::Exact }
    }

    pub fn coeff(&self, tau: usize) -> Scalar {
        self.coeffs.get(&tau).cloned().unwrap_or_default()
    }
}

/// Structure constants `N_{τ,τ′}^{τ″}` over a list of double classes.
#[derive(Clone, Debug)]
pub struct StructureTable {
    pub classes: Vec<usize>,
    pub entries: BTreeMap<(usize, usize), CentralHeckeElement>,
    pub checks: Vec<CheckReport>,
}

impl StructureTable {
    pub fn n(&self, a: usize, b: usize, c: usize) -> Option<Scalar> {
        self.entries.get(&(a, b)).map(|e| e.coeff(c))
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }
}

/// Matrix of `a ↦ a * p_τ` on the right-class basis `p_[γ]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorMatrix {
    pub tau: usize,
    /// Right-class indices labelling both rows and columns.
    pub classes: Vec<usize>,
    /// `entries[row][col]`.
    pub entries: Vec<Vec<Scalar>>,
    pub gram: Vec<Scalar>,
}

impl OperatorMatrix {
    /// Entries in the orthonormal basis `p_[γ]/‖p_[γ]‖`.
    pub fn orthonormal(&self) -> Vec<Vec<f64>> {
        let g: Vec<f64> = self.gram.iter().map(|x| x.to_f64()).collect();
        self.entries
            .iter()
            .enumerate()
            .map(|(r, row)| row.iter().enumerate().map(|(c, x)| x.to_f64() * libm::sqrt(g[r] / g[c])).collect())
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormEstimate {
    pub lower: f64,
    pub upper: f64,
}

/// Lower bound by power iteration on `AᵀA`, upper bound by the Schur test.
pub fn operator_norm_estimate(m: &OperatorMatrix) -> NormEstimate {
    let a = m.orthonormal();
    let n = a.len();
    if n == 0 {
        return NormEstimate { lower: 0.0, upper: 0.0 };
    }
    let mut row_max: f64 = 0.0;
    let mut col = alloc::vec![0.0f64; n];
    for row in &a {
        row_max = row_max.max(row.iter().map(|x| libm::fabs(*x)).sum());
        for (c, x) in row.iter().enumerate() {
            col[c] += libm::fabs(*x);
        }
    }
    let col_max = col.iter().cloned().fold(0.0, f64::max);
    let upper = libm::sqrt(row_max * col_max);

    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 + 1.0) / (n as f64 + 7.0)).collect();
    let mut lambda = 0.0f64;
    for _ in 0..100_000 {
        let av: Vec<f64> = a.iter().map(|row| row.iter().zip(&v).map(|(x, y)| x * y).sum()).collect();
        let mut w = alloc::vec![0.0f64; n];
        for (r, row) in a.iter().enumerate() {
            for (c, x) in row.iter().enumerate() {
                w[c] += x * av[r];
            }
        }
        let norm = libm::sqrt(w.iter().map(|x| x * x).sum());
        if norm == 0.0 {
            lambda = 0.0;
            break;
        }
        for x in &mut w {
            *x /= norm;
        }
        let done = libm::fabs(norm - lambda) <= 1e-13 * norm.max(1.0);
        lambda = norm;
        v = w;
        if done {
            break;
        }
    }
    NormEstimate { lower: libm::sqrt(lambda).min(upper), upper }
}

/// A quantum subgroup together with its coset data and κ values.
pub struct HeckePair<'a> {
    pub ring: &'a dyn FusionRing,
    pub sub: &'a SubgroupSet,
    pub cosets: CosetData,
    pub kappa: KappaTable<'a>,
}

impl<'a> HeckePair<'a> {
    pub fn new(ring: &'a dyn FusionRing, sub: &'a SubgroupSet, g: u32) -> Result<Self> {
        let cosets = coset_classes(ring, sub, g)?;
        Ok(Self::from_cosets(ring, sub, cosets))
    }

    pub fn from_cosets(ring: &'a dyn FusionRing, sub: &'a SubgroupSet, cosets: CosetData) -> Self {
        HeckePair { ring, sub, cosets, kappa: KappaTable::new(ring, sub) }
    }

    pub fn horizon(&self) -> u32 {
        self.cosets.horizon
    }

    pub fn label(&self, side: Side, idx: usize) -> String {
        self.cosets.label(self.ring, side, idx)
    }

    pub fn unit_class(&self) -> usize {
        self.cosets.unit_class(self.ring)
    }

    /// Double class whose label or representative is `text`.
    pub fn find_double(&self, text: &str) -> Result<usize> {
        let t = text.trim();
        let t = t.strip_prefix("D:").unwrap_or(t);
        let id = self.ring.parse(t)?;
        self.cosets
            .locate(self.ring, self.sub, Side::Double, &id)?
            .ok_or_else(|| Error::Incomplete(format!("no double class found for {}", text)))
    }

    pub fn involution_class(&self, tau: usize) -> Result<usize> {
        self.cosets
            .involution_class(self.ring, self.sub, tau)?
            .ok_or_else(|| Error::Incomplete(format!("conjugate of {} is outside the horizon", self.label(Side::Double, tau))))
    }

    fn in_right_class(&self, x: &ObjectId, sigma: usize) -> Result<bool> {
        if let Some(c) = self.cosets.right_of(x) {
            return Ok(c == sigma);
        }
        if self.cosets.explicit {
            return Ok(false);
        }
        related(self.ring, self.sub, Side::Right, x, &self.cosets.right[sigma].rep)
    }

    /// Coefficient of `p_δ` in `p_σ * p_σ′` for a right class `σ` and left class `σ′`.
    pub fn coefficient_at(&self, sigma: usize, sigma_left: usize, delta: &ObjectId) -> Result<Scalar> {
        let ring = self.ring;
        let beta = &self.cosets.left[sigma_left].rep;
        let bbar = ring.conj(beta)?;
        let mut s = Scalar::zero();
        for (a, m) in ring.fuse(delta, &bbar)?.iter() {
            if self.in_right_class(a, sigma)? {
                s += ring.qdim(a)?.mul_int(*m as u64);
            }
        }
        if s.is_zero() {
            return Ok(s);
        }
        let pre = ring.qdim(beta)? / self.kappa.kappa(beta, &bbar)?;
        Ok(pre * s / ring.qdim(delta)?)
    }

    fn product_candidates(&self, right: &[usize], left: &[usize]) -> Result<BTreeSet<ObjectId>> {
        let ring = self.ring;
        let mut out: BTreeSet<ObjectId> = ring.enumerate_up_to(self.horizon()).into_iter().collect();
        for &s in right {
            for &t in left {
                let (rs, rt) = (&self.cosets.right[s], &self.cosets.left[t]);
                for m in &rs.members {
                    out.extend(ring.fuse(m, &rt.rep)?.ids().cloned());
                }
                for m in &rt.members {
                    out.extend(ring.fuse(&rs.rep, m)?.ids().cloned());
                }
            }
        }
        Ok(out)
    }

    fn base_status(&self, classes: &[usize]) -> ClassStatus {
        let worst = classes.iter().map(|t| self.cosets.double[*t].status).max().unwrap_or(ClassStatus::Exact);
        if self.cosets.explicit {
            worst
        } else {
            worst.max(ClassStatus::WithinHorizon)
        }
    }

    /// `p_σ * p_σ′` evaluated per object.
    pub fn class_product(&self, sigma: usize, sigma_left: usize) -> Result<ObjectCoefficients> {
        let evaluated = self.product_candidates(&[sigma], &[sigma_left])?;
        let mut coeffs = BTreeMap::new();
        for d in &evaluated {
            let c = self.coefficient_at(sigma, sigma_left, d)?;
            if !c.is_zero() {
                coeffs.insert(d.clone(), c);
            }
        }
        let status = self.base_status(&[self.cosets.right[sigma].double, self.cosets.left[sigma_left].double]);
        Ok(ObjectCoefficients { coeffs, evaluated, status })
    }

    /// `p_τ * p_τ′`, verified constant on every double class.
    pub fn double_class_product(&self, tau: usize, tau2: usize) -> Result<CentralHeckeElement> {
        let ring = self.ring;
        let right = self.cosets.double[tau].right.clone();
        let left = self.cosets.double[tau2].left.clone();
        let evaluated = self.product_candidates(&right, &left)?;
        let mut status = self.base_status(&[tau, tau2]);
        let mut by_class: BTreeMap<usize, (ObjectId, Scalar)> = BTreeMap::new();
        let mut zero_seen: BTreeMap<usize, ObjectId> = BTreeMap::new();
        for d in &evaluated {
            let mut c = Scalar::zero();
            for &s in &right {
                for &t in &left {
                    c += self.coefficient_at(s, t, d)?;
                }
            }
            let cls = match self.cosets.locate(ring, self.sub, Side::Double, d) {
                Ok(Some(k)) => k,
                Ok(None) => {
                    if !c.is_zero() {
                        status = ClassStatus::Partial;
                    }
                    continue;
                }
                Err(e) if e.is_horizon() => {
                    if !c.is_zero() {
                        status = ClassStatus::Partial;
                    }
                    continue;
                }
                Err(e) => return Err(e),
            };
            if c.is_zero() {
                if let Some((first, v)) = by_class.get(&cls) {
                    return Err(self.violation(cls, first, v, d, &c));
                }
                zero_seen.entry(cls).or_insert_with(|| d.clone());
                continue;
            }
            if let Some(z) = zero_seen.get(&cls) {
                return Err(self.violation(cls, z, &Scalar::zero(), d, &c));
            }
            match by_class.get(&cls) {
                Some((first, v)) if *v != c => return Err(self.violation(cls, first, v, d, &c)),
                Some(_) => {}
                None => {
                    by_class.insert(cls, (d.clone(), c));
                }
            }
        }
        Ok(CentralHeckeElement { coeffs: by_class.into_iter().map(|(k, (_, v))| (k, v)).collect(), status })
    }

    fn violation(&self, cls: usize, first: &ObjectId, fv: &Scalar, second: &ObjectId, sv: &Scalar) -> Error {
        Error::CentralityViolation {
            class: self.label(Side::Double, cls),
            first: self.ring.render(first),
            first_value: format!("{}", fv),
            second: self.ring.render(second),
            second_value: format!("{}", sv),
        }
    }

    /// Structure constants over `classes`, with unit, involution and associativity checks.
    pub fn structure_table(&self, classes: &[usize]) -> Result<StructureTable> {
        let mut entries = BTreeMap::new();
        for &a in classes {
            for &b in classes {
                entries.insert((a, b), self.double_class_product(a, b)?);
            }
        }
        let mut table = StructureTable { classes: classes.to_vec(), entries, checks: Vec::new() };
        table.checks = self.table_checks(&table);
        Ok(table)
    }

    fn table_checks(&self, table: &StructureTable) -> Vec<CheckReport> {
        let one = self.unit_class();
        let set: BTreeSet<usize> = table.classes.iter().cloned().collect();
        let lbl = |t: usize| self.label(Side::Double, t);

        let mut unit = CheckReport::new("unit");
        if set.contains(&one) {
            for &t in &table.classes {
                for (e, side) in [(&table.entries[&(one, t)], "left"), (&table.entries[&(t, one)], "right")] {
                    let ok = e.coeffs == CentralHeckeElement::basis(t).coeffs;
                    unit.record(ok, || format!("{} unit fails at {}", side, lbl(t)));
                }
            }
        }

        let bar: BTreeMap<usize, Option<usize>> =
            table.classes.iter().map(|&t| (t, self.involution_class(t).ok())).collect();
        let mut inv = CheckReport::new("involution");
        for (&(a, b), e) in &table.entries {
            let (ab, bb) = match (bar[&a], bar[&b]) {
                (Some(x), Some(y)) if set.contains(&x) && set.contains(&y) => (x, y),
                _ => {
                    inv.skipped += 1;
                    continue;
                }
            };
            let other = &table.entries[&(bb, ab)];
            for (&c, v) in &e.coeffs {
                match self.involution_class(c) {
                    Ok(cb) => inv.record(other.coeff(cb) == *v, || {
                        format!("N[{},{}]^{} = {} but N[{},{}]^{} = {}", lbl(a), lbl(b), lbl(c), v, lbl(bb), lbl(ab), lbl(cb), other.coeff(cb))
                    }),
                    Err(_) => inv.skipped += 1,
                }
            }
        }

        let mut assoc = CheckReport::new("associativity");
        let closed = |e: &CentralHeckeElement| e.status != ClassStatus::Partial && e.coeffs.keys().all(|k| set.contains(k));
        for &a in &table.classes {
            for &b in &table.classes {
                for &c in &table.classes {
                    let (ab, bc) = (&table.entries[&(a, b)], &table.entries[&(b, c)]);
                    let usable = closed(ab)
                        && closed(bc)
                        && ab.coeffs.keys().all(|r| closed(&table.entries[&(*r, c)]))
                        && bc.coeffs.keys().all(|r| closed(&table.entries[&(a, *r)]));
                    if !usable {
                        assoc.skipped += 1;
                        continue;
                    }
                    let mut lhs: BTreeMap<usize, Scalar> = BTreeMap::new();
                    for (r, x) in &ab.coeffs {
                        for (s, y) in &table.entries[&(*r, c)].coeffs {
                            *lhs.entry(*s).or_default() += x * y;
                        }
                    }
                    let mut rhs: BTreeMap<usize, Scalar> = BTreeMap::new();
                    for (r, x) in &bc.coeffs {
                        for (s, y) in &table.entries[&(a, *r)].coeffs {
                            *rhs.entry(*s).or_default() += x * y;
                        }
                    }
                    lhs.retain(|_, v| !v.is_zero());
                    rhs.retain(|_, v| !v.is_zero());
                    assoc.record(lhs == rhs, || format!("({} {}) {} differs from {} ({} {})", lbl(a), lbl(b), lbl(c), lbl(a), lbl(b), lbl(c)));
                }
            }
        }
        alloc::vec![unit, inv, assoc]
    }

    /// `μ(p_σ) = qdim(α)²/κ_α` for a right class.
    pub fn mu(&self, sigma: usize) -> Result<Scalar> {
        self.kappa.weight(&self.cosets.right[sigma].rep)
    }

    /// `(p_σ | p_σ′)`.
    pub fn inner_product(&self, sigma: usize, sigma2: usize) -> Result<Scalar> {
        if sigma == sigma2 {
            self.mu(sigma)
        } else {
            Ok(Scalar::zero())
        }
    }

    /// The canonical state: coefficient at the unit class.
    pub fn omega(&self, x: &CentralHeckeElement) -> Scalar {
        x.coeff(self.unit_class())
    }

    /// `∇_τ` in the Kac regime.
    pub fn nabla(&self, tau: usize) -> Result<Scalar> {
        if !self.ring.is_kac() {
            return Err(Error::RegimeUnavailable);
        }
        let d = &self.cosets.double[tau];
        if d.status == ClassStatus::Partial {
            return Err(Error::Incomplete(format!("{} has escaped classes", self.label(Side::Double, tau))));
        }
        let mut num = Scalar::zero();
        for &l in &d.left {
            num += self.kappa.left_weight(&self.cosets.left[l].rep)?;
        }
        let mut den = Scalar::zero();
        for &r in &d.right {
            den += self.kappa.weight(&self.cosets.right[r].rep)?;
        }
        Ok(num / den)
    }

    /// `N_{τ,τ′}^{⟦1⟧} = ∇_τ⁻¹ N_{τ′,τ}^{⟦1⟧}` over every pair in the table.
    pub fn verify_kms(&self, table: &StructureTable) -> CheckReport {
        let one = self.unit_class();
        let mut report = CheckReport::new("kms");
        for &a in &table.classes {
            let nabla = match self.nabla(a) {
                Ok(v) => v,
                Err(_) => {
                    report.skipped += table.classes.len() as u64;
                    continue;
                }
            };
            for &b in &table.classes {
                let (x, y) = (table.n(a, b, one).unwrap(), table.n(b, a, one).unwrap());
                report.record(&x * &nabla == y, || {
                    format!(
                        "N[{},{}]^1 = {}, N[{},{}]^1 = {}, nabla = {}",
                        self.label(Side::Double, a),
                        self.label(Side::Double, b),
                        x,
                        self.label(Side::Double, b),
                        self.label(Side::Double, a),
                        y,
                        nabla
                    )
                });
            }
        }
        report
    }

    /// `∇_{⟦δ⟧} = ∇_{⟦α⟧}∇_{⟦β⟧}` whenever `δ ⊂ α⊗β`, over objects of grade `≤ g`.
    pub fn verify_grouplike(&self, g: u32) -> CheckReport {
        let ring = self.ring;
        let mut report = CheckReport::new("grouplike");
        let mut memo: BTreeMap<usize, Option<Scalar>> = BTreeMap::new();
        let mut nabla_of = |x: &ObjectId| -> Option<Scalar> {
            let d = self.cosets.locate(ring, self.sub, Side::Double, x).ok().flatten()?;
            memo.entry(d).or_insert_with(|| self.nabla(d).ok()).clone()
        };
        let window = ring.enumerate_up_to(g);
        for a in &window {
            for b in &window {
                let d = match ring.fuse(a, b) {
                    Ok(d) => d,
                    Err(_) => {
                        report.skipped += 1;
                        continue;
                    }
                };
                let (na, nb) = match (nabla_of(a), nabla_of(b)) {
                    (Some(x), Some(y)) => (x, y),
                    _ => {
                        report.skipped += d.len() as u64;
                        continue;
                    }
                };
                let prod = &na * &nb;
                for (x, _) in d.iter() {
                    match nabla_of(x) {
                        Some(nx) => report.record(nx == prod, || {
                            format!("nabla({}) = {} but nabla({})nabla({}) = {}", ring.render(x), nx, ring.render(a), ring.render(b), prod)
                        }),
                        None => report.skipped += 1,
                    }
                }
            }
        }
        report
    }

    /// Right classes whose representative lies within the horizon.
    pub fn basis_classes(&self) -> Vec<usize> {
        let g = self.horizon();
        (0..self.cosets.right.len())
            .filter(|&i| self.ring.grade(&self.cosets.right[i].rep).map_or(false, |x| x <= g))
            .collect()
    }

    /// Matrix of `a ↦ a * p_τ` on the finite section spanned by `basis_classes`.
    pub fn operator_matrix(&self, tau: usize) -> Result<OperatorMatrix> {
        let classes = self.basis_classes();
        let left = self.cosets.double[tau].left.clone();
        let n = classes.len();
        let mut entries = alloc::vec![alloc::vec![Scalar::zero(); n]; n];
        for (c, &sigma) in classes.iter().enumerate() {
            for (r, &rho) in classes.iter().enumerate() {
                let cls = &self.cosets.right[rho];
                let mut first: Option<(ObjectId, Scalar)> = None;
                for x in core::iter::once(&cls.rep).chain(cls.members.iter().take(8)) {
                    let mut v = Scalar::zero();
                    for &t in &left {
                        v += self.coefficient_at(sigma, t, x)?;
                    }
                    match &first {
                        None => first = Some((x.clone(), v)),
                        Some((y, w)) if *w != v => {
                            return Err(Error::CentralityViolation {
                                class: self.label(Side::Right, rho),
                                first: self.ring.render(y),
                                first_value: format!("{}", w),
                                second: self.ring.render(x),
                                second_value: format!("{}", v),
                            })
                        }
                        Some(_) => {}
                    }
                }
                entries[r][c] = first.unwrap().1;
            }
        }
        let gram = classes.iter().map(|&s| self.mu(s)).collect::<Result<Vec<_>>>()?;
        Ok(OperatorMatrix { tau, classes, entries, gram })
    }

    /// `gram_row·M(τ̄)[row,col] = gram_col·M(τ)[col,row]`.
    pub fn verify_adjoint(&self, tau: usize) -> Result<CheckReport> {
        let bar = self.involution_class(tau)?;
        let m = self.operator_matrix(tau)?;
        let mb = if bar == tau { m.clone() } else { self.operator_matrix(bar)? };
        let mut report = CheckReport::new("adjoint");
        let n = m.classes.len();
        for r in 0..n {
            for c in 0..n {
                let lhs = &m.gram[r] * &mb.entries[r][c];
                let rhs = &m.gram[c] * &m.entries[c][r];
                report.record(lhs == rhs, || {
                    format!(
                        "row {} col {}: {} vs {}",
                        self.label(Side::Right, m.classes[r]),
                        self.label(Side::Right, m.classes[c]),
                        lhs,
                        rhs
                    )
                });
            }
        }
        Ok(report)
    }
}
