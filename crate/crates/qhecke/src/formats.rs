//! On-disk formats: ring tables, builder recipes, subgroups and group tables.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use qhecke_core::constructors::{
    dual_q8, dual_s3, dual_z2, EvenSpins, FreeProduct, GroupTable, Hnn, HnnRecipe, Integers, Multiples, Product,
    ProductFactor, RestrictedProduct, Su2Dual, TableObject, TableRing,
};
use qhecke_core::{close_subgroup, FusionRing, ObjectId, RingExt, Scalar, SharedRing, SubgroupSet, WholeRing};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const RING_FORMAT: &str = "qhecke-ring/1";
pub const RECIPE_FORMAT: &str = "qhecke-recipe/1";
pub const SUBGROUP_FORMAT: &str = "qhecke-subgroup/1";
pub const GROUP_FORMAT: &str = "qhecke-group/1";

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: line {line}, column {column}: {message}")]
    Syntax { path: String, line: usize, column: usize, message: String },
    #[error("{path}: field {field}: {message}")]
    Field { path: String, field: String, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

impl FormatError {
    /// True when the input parsed but failed a mathematical check.
    pub fn is_validation(&self) -> bool {
        matches!(self, FormatError::Invalid { .. })
    }
}

pub type FormatResult<T> = Result<T, FormatError>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingFile {
    pub format: String,
    #[serde(default)]
    pub name: Option<String>,
    pub unimodular_kac: bool,
    pub objects: Vec<RingObject>,
    pub unit: String,
    pub fusion: Vec<FusionEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingObject {
    pub id: String,
    pub dim: u64,
    pub qdim: String,
    pub conj: String,
    pub grade: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FusionEntry {
    pub left: String,
    pub right: String,
    pub decomp: Vec<(String, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubgroupFile {
    pub format: String,
    #[serde(default)]
    pub members: Option<Vec<String>>,
    #[serde(default)]
    pub seed: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    pub format: String,
    #[serde(default)]
    pub name: Option<String>,
    pub elements: Vec<String>,
    /// `mult[i][j]` is the name of `elements[i] * elements[j]`.
    pub mult: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecipeFile {
    pub format: String,
    pub builder: String,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub group: Option<Value>,
    #[serde(default)]
    pub ring: Option<Value>,
    #[serde(default)]
    pub factors: Option<Vec<Value>>,
    #[serde(default)]
    pub hnn: Option<HnnSpec>,
    #[serde(default)]
    pub subgroup: Option<SubgroupSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum HnnSpec {
    Profinite {
        plus: Value,
        minus: Value,
    },
    BaumslagSolitar {
        m: i64,
        n: i64,
    },
    Su2Center,
    Trivial {
        base: Value,
    },
    Pairs {
        base: Value,
        lambda_plus: Vec<String>,
        lambda_minus: Vec<String>,
        theta: Vec<(String, String)>,
    },
}

/// Subgroup carried by a recipe.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum SubgroupSpec {
    Members(Vec<String>),
    Seed(Vec<String>),
    Rule(String),
}

/// A ring together with the handle needed to resolve its named subgroups.
#[derive(Clone)]
pub enum Built {
    Table(Arc<TableRing>),
    Su2(Arc<Su2Dual>),
    Z(Arc<Integers>),
    Product(Arc<Product>),
    Restricted(Arc<RestrictedProduct>),
    Free(Arc<FreeProduct>),
    Hnn(Arc<Hnn>),
}

impl Built {
    pub fn shared(&self) -> SharedRing {
        match self {
            Built::Table(r) => r.clone(),
            Built::Su2(r) => r.clone(),
            Built::Z(r) => r.clone(),
            Built::Product(r) => r.clone(),
            Built::Restricted(r) => r.clone(),
            Built::Free(r) => r.clone(),
            Built::Hnn(r) => r.clone(),
        }
    }

    pub fn hnn(&self) -> Option<&Arc<Hnn>> {
        match self {
            Built::Hnn(h) => Some(h),
            _ => None,
        }
    }

    /// Resolves a named subgroup rule.
    pub fn rule(&self, name: &str) -> Result<SubgroupSet, String> {
        let ring = self.shared();
        let (head, arg) = name.split_once(':').unwrap_or((name, ""));
        let index = || -> Result<usize, String> {
            match arg {
                "1" => Ok(0),
                "2" => Ok(1),
                _ => Err(format!("factor index must be 1 or 2, got {:?}", arg)),
            }
        };
        match (head, self) {
            ("trivial", _) => Ok(SubgroupSet::trivial(ring.as_ref())),
            ("whole", _) if ring.is_finite() => {
                SubgroupSet::from_members(ring.as_ref(), &ring.enumerate_up_to(u32::MAX)).map_err(|e| e.to_string())
            }
            ("whole", _) => Ok(SubgroupSet::from_rule(Arc::new(WholeRing(ring)))),
            ("even-spins", Built::Su2(_)) => Ok(SubgroupSet::from_rule(Arc::new(EvenSpins))),
            ("multiples", Built::Z(_)) => {
                let m: i64 = arg.parse().map_err(|_| format!("bad modulus {:?}", arg))?;
                if m <= 0 {
                    return Err("modulus must be positive".into());
                }
                Ok(SubgroupSet::from_rule(Arc::new(Multiples(m))))
            }
            ("free-factor", Built::Free(f)) => f.factor_subgroup(index()?).map_err(|e| e.to_string()),
            ("product-factor", Built::Product(p)) => {
                let i = index()?;
                let f = p.factor(i);
                if f.is_finite() {
                    let members: Vec<ObjectId> = f
                        .enumerate_up_to(u32::MAX)
                        .into_iter()
                        .map(|x| if i == 0 { Product::pair(x, p.factor(1).unit()) } else { Product::pair(p.factor(0).unit(), x) })
                        .collect();
                    SubgroupSet::from_members(ring.as_ref(), &members).map_err(|e| e.to_string())
                } else {
                    Ok(SubgroupSet::from_rule(Arc::new(ProductFactor { ring: p.clone(), index: i })))
                }
            }
            ("hnn-base", Built::Hnn(h)) => Ok(h.base_subgroup()),
            _ => Err(format!("subgroup rule {:?} does not apply to {}", name, ring.name())),
        }
    }
}

/// Bytes of a file with its SHA-256 digest.
pub struct Input {
    pub path: PathBuf,
    pub bytes: Vec<u8>,
    pub sha256: String,
}

impl Input {
    pub fn read(path: &Path) -> FormatResult<Self> {
        let bytes = std::fs::read(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })?;
        let sha256 = format!("{:x}", Sha256::digest(&bytes));
        Ok(Input { path: path.to_path_buf(), bytes, sha256 })
    }

    fn name(&self) -> String {
        self.path.display().to_string()
    }

    fn json<T: for<'de> Deserialize<'de>>(&self) -> FormatResult<T> {
        serde_json::from_slice(&self.bytes).map_err(|e| syntax(&self.name(), &e))
    }

    /// The `format` tag of a JSON document.
    pub fn format_tag(&self) -> FormatResult<String> {
        let v: Value = self.json()?;
        tag_of(&v).ok_or_else(|| field(&self.name(), "format", "missing format tag"))
    }
}

fn syntax(path: &str, e: &serde_json::Error) -> FormatError {
    FormatError::Syntax { path: path.into(), line: e.line(), column: e.column(), message: e.to_string() }
}

fn field(path: &str, name: &str, message: impl Into<String>) -> FormatError {
    FormatError::Field { path: path.into(), field: name.into(), message: message.into() }
}

fn invalid(path: &str, message: impl Into<String>) -> FormatError {
    FormatError::Invalid { path: path.into(), message: message.into() }
}

fn tag_of(v: &Value) -> Option<String> {
    v.get("format").and_then(Value::as_str).map(str::to_string)
}

fn expect_tag(path: &str, got: &str, want: &str) -> FormatResult<()> {
    if got == want {
        Ok(())
    } else {
        Err(field(path, "format", format!("expected {:?}, found {:?}", want, got)))
    }
}

/// Builds a table ring from a ring file.
pub fn ring_from_file(path: &str, file: &RingFile) -> FormatResult<TableRing> {
    expect_tag(path, &file.format, RING_FORMAT)?;
    let mut index = BTreeMap::new();
    for (i, o) in file.objects.iter().enumerate() {
        if index.insert(o.id.as_str(), i as u32).is_some() {
            return Err(field(path, &format!("objects[{}].id", i), format!("duplicate id {:?}", o.id)));
        }
    }
    let lookup = |name: &str, at: &str| -> FormatResult<u32> {
        index.get(name).copied().ok_or_else(|| field(path, at, format!("unknown object {:?}", name)))
    };
    let mut objects = Vec::with_capacity(file.objects.len());
    for (i, o) in file.objects.iter().enumerate() {
        let qdim: Scalar =
            o.qdim.parse().map_err(|e: qhecke_core::Error| field(path, &format!("objects[{}].qdim", i), e.to_string()))?;
        objects.push(TableObject {
            name: o.id.clone(),
            grade: o.grade,
            dim: o.dim,
            qdim,
            conj: lookup(&o.conj, &format!("objects[{}].conj", i))?,
        });
    }
    let unit = lookup(&file.unit, "unit")?;
    let mut fusion = BTreeMap::new();
    for (i, f) in file.fusion.iter().enumerate() {
        let a = lookup(&f.left, &format!("fusion[{}].left", i))?;
        let b = lookup(&f.right, &format!("fusion[{}].right", i))?;
        let mut terms = Vec::new();
        for (j, (c, m)) in f.decomp.iter().enumerate() {
            terms.push((lookup(c, &format!("fusion[{}].decomp[{}]", i, j))?, *m));
        }
        if fusion.insert((a, b), terms).is_some() {
            return Err(field(path, &format!("fusion[{}]", i), format!("duplicate product {} ⊗ {}", f.left, f.right)));
        }
    }
    let name = file.name.clone().unwrap_or_else(|| path.to_string());
    TableRing::new(&name, objects, unit, &fusion, file.unimodular_kac).map_err(|e| invalid(path, e.to_string()))
}

/// Serializes a finite ring; objects keep the order of `enumerate_up_to`.
pub fn ring_to_file(ring: &dyn FusionRing) -> Result<RingFile, String> {
    if !ring.is_finite() {
        return Err(format!("{} is infinite and has no finite table", ring.name()));
    }
    let ids = ring.enumerate_up_to(u32::MAX);
    let mut objects = Vec::with_capacity(ids.len());
    for id in &ids {
        let o = ring.object(id).map_err(|e| e.to_string())?;
        objects.push(RingObject {
            id: ring.render(id),
            dim: o.dim,
            qdim: o.qdim.to_string(),
            conj: ring.render(&o.conj),
            grade: o.grade,
        });
    }
    let mut fusion = Vec::with_capacity(ids.len() * ids.len());
    for a in &ids {
        for b in &ids {
            let d = ring.fuse(a, b).map_err(|e| e.to_string())?;
            fusion.push(FusionEntry { left: ring.render(a), right: ring.render(b), decomp: ring.render_decomposition(&d) });
        }
    }
    Ok(RingFile {
        format: RING_FORMAT.into(),
        name: Some(ring.name()),
        unimodular_kac: ring.is_kac(),
        objects,
        unit: ring.render(&ring.unit()),
        fusion,
    })
}

pub fn group_from_file(path: &str, file: &GroupFile) -> FormatResult<GroupTable> {
    expect_tag(path, &file.format, GROUP_FORMAT)?;
    let index: BTreeMap<&str, usize> = file.elements.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mut mult = Vec::with_capacity(file.mult.len());
    for (i, row) in file.mult.iter().enumerate() {
        let mut r = Vec::with_capacity(row.len());
        for (j, x) in row.iter().enumerate() {
            r.push(*index.get(x.as_str()).ok_or_else(|| field(path, &format!("mult[{}][{}]", i, j), format!("unknown element {:?}", x)))?);
        }
        mult.push(r);
    }
    GroupTable::new(file.elements.clone(), mult).map_err(|e| invalid(path, e.to_string()))
}

pub fn group_to_file(name: &str, g: &GroupTable) -> GroupFile {
    GroupFile {
        format: GROUP_FORMAT.into(),
        name: Some(name.into()),
        elements: g.names().to_vec(),
        mult: g.table().iter().map(|row| row.iter().map(|&x| g.name(x).to_string()).collect()).collect(),
    }
}

/// `cyclic:n`, `symmetric:n`, `dihedral:n`, `quaternion` or `trivial`.
pub fn builtin_group(name: &str) -> Option<GroupTable> {
    let (head, arg) = name.split_once(':').unwrap_or((name, ""));
    let n = arg.parse::<usize>().ok();
    match (head, n) {
        ("cyclic", Some(n)) if n >= 1 => Some(GroupTable::cyclic(n)),
        ("symmetric", Some(n)) if (1..=5).contains(&n) => Some(GroupTable::symmetric(n)),
        ("dihedral", Some(n)) if n >= 1 => Some(GroupTable::dihedral(n)),
        ("quaternion", None) => Some(GroupTable::quaternion()),
        ("trivial", None) => Some(GroupTable::trivial()),
        _ => None,
    }
}

/// Loads a group from a group file path or a built-in name.
pub fn load_group(spec: &str) -> FormatResult<(GroupTable, Option<Input>)> {
    if let Some(g) = builtin_group(spec) {
        return Ok((g, None));
    }
    let input = Input::read(Path::new(spec))?;
    let file: GroupFile = input.json()?;
    Ok((group_from_file(&input.name(), &file)?, Some(input)))
}

fn builtin_ring(name: &str) -> Option<Built> {
    match name {
        "dual-s3" => Some(Built::Table(Arc::new(dual_s3()))),
        "dual-z2" => Some(Built::Table(Arc::new(dual_z2()))),
        "dual-q8" => Some(Built::Table(Arc::new(dual_q8()))),
        "su2-dual" => Some(Built::Su2(Arc::new(Su2Dual))),
        "z" => Some(Built::Z(Arc::new(Integers))),
        _ => None,
    }
}

/// Loading context: relative paths resolve against `dir`, `check_grade`
/// bounds the validation of infinite constructions.
pub struct Loader {
    pub check_grade: u32,
    pub inputs: Vec<(String, String)>,
}

impl Loader {
    pub fn new(check_grade: u32) -> Self {
        Loader { check_grade, inputs: Vec::new() }
    }

    /// Loads a ring file or a recipe file.
    pub fn load_ring(&mut self, path: &Path) -> FormatResult<(Built, Option<SubgroupSpec>)> {
        let input = Input::read(path)?;
        self.inputs.push((input.name(), input.sha256.clone()));
        let v: Value = input.json()?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        self.from_value(&input.name(), &dir, &v)
    }

    fn from_value(&mut self, path: &str, dir: &Path, v: &Value) -> FormatResult<(Built, Option<SubgroupSpec>)> {
        let tag = tag_of(v).ok_or_else(|| field(path, "format", "missing format tag"))?;
        let de = |e: serde_json::Error| field(path, "<document>", e.to_string());
        match tag.as_str() {
            RING_FORMAT => {
                let file: RingFile = serde_json::from_value(v.clone()).map_err(de)?;
                Ok((Built::Table(Arc::new(ring_from_file(path, &file)?)), None))
            }
            RECIPE_FORMAT => {
                let file: RecipeFile = serde_json::from_value(v.clone()).map_err(de)?;
                let built = self.build_recipe(path, dir, &file)?;
                Ok((built, file.subgroup.clone()))
            }
            other => Err(field(path, "format", format!("expected a ring or recipe, found {:?}", other))),
        }
    }

    fn ring_ref(&mut self, path: &str, dir: &Path, at: &str, v: &Value) -> FormatResult<Built> {
        match v {
            Value::String(s) => {
                if let Some(b) = builtin_ring(s) {
                    return Ok(b);
                }
                let p = dir.join(s);
                self.load_ring(&p).map(|(b, _)| b)
            }
            Value::Object(_) => self.from_value(&format!("{}#{}", path, at), dir, v).map(|(b, _)| b),
            _ => Err(field(path, at, "expected a built-in name, a relative path or an inline document")),
        }
    }

    fn build_recipe(&mut self, path: &str, dir: &Path, file: &RecipeFile) -> FormatResult<Built> {
        expect_tag(path, &file.format, RECIPE_FORMAT)?;
        let factors = |this: &mut Self| -> FormatResult<(Built, Built)> {
            match file.factors.as_deref() {
                Some([a, b]) => Ok((this.ring_ref(path, dir, "factors[0]", a)?, this.ring_ref(path, dir, "factors[1]", b)?)),
                _ => Err(field(path, "factors", "expected exactly two factors")),
            }
        };
        let built = match file.builder.as_str() {
            "pointed-group" => {
                let g = match &file.group {
                    Some(Value::String(s)) => match builtin_group(s) {
                        Some(g) => g,
                        None => {
                            let (g, input) = load_group(&dir.join(s).display().to_string())?;
                            if let Some(i) = input {
                                self.inputs.push((i.name(), i.sha256));
                            }
                            g
                        }
                    },
                    Some(v @ Value::Object(_)) => {
                        let gf: GroupFile =
                            serde_json::from_value(v.clone()).map_err(|e| field(path, "group", e.to_string()))?;
                        group_from_file(path, &gf)?
                    }
                    _ => return Err(field(path, "group", "expected a group name, path or inline table")),
                };
                let name = file.name.clone().unwrap_or_else(|| "pointed".into());
                Built::Table(Arc::new(TableRing::pointed(&name, &g)))
            }
            "rep-ring" => {
                let v = file.ring.as_ref().ok_or_else(|| field(path, "ring", "missing"))?;
                self.ring_ref(path, dir, "ring", v)?
            }
            "su2-dual" => Built::Su2(Arc::new(Su2Dual)),
            "z" => Built::Z(Arc::new(Integers)),
            "product" => {
                let (a, b) = factors(self)?;
                Built::Product(Arc::new(Product::new(a.shared(), b.shared())))
            }
            "restricted-product" => {
                let (a, b) = factors(self)?;
                Built::Restricted(Arc::new(
                    RestrictedProduct::new(a.shared(), b.shared()).map_err(|e| invalid(path, e.to_string()))?,
                ))
            }
            "free-product" => {
                let (a, b) = factors(self)?;
                Built::Free(Arc::new(FreeProduct::new(a.shared(), b.shared())))
            }
            "hnn" => {
                let spec = file.hnn.as_ref().ok_or_else(|| field(path, "hnn", "missing"))?;
                let recipe = self.hnn_recipe(path, dir, spec)?;
                let hnn = Hnn::new(recipe, self.check_grade.min(4)).map_err(|e| invalid(path, e.to_string()))?;
                Built::Hnn(Arc::new(hnn))
            }
            other => return Err(field(path, "builder", format!("unknown builder {:?}", other))),
        };
        Ok(built)
    }

    fn hnn_recipe(&mut self, path: &str, dir: &Path, spec: &HnnSpec) -> FormatResult<HnnRecipe> {
        let bad = |e: qhecke_core::Error| invalid(path, e.to_string());
        match spec {
            HnnSpec::Profinite { plus, minus } => {
                let p = self.ring_ref(path, dir, "hnn.plus", plus)?;
                let m = self.ring_ref(path, dir, "hnn.minus", minus)?;
                HnnRecipe::profinite(p.shared(), m.shared()).map_err(bad)
            }
            HnnSpec::BaumslagSolitar { m, n } => HnnRecipe::baumslag_solitar(*m, *n).map_err(bad),
            HnnSpec::Su2Center => Ok(HnnRecipe::su2_center()),
            HnnSpec::Trivial { base } => {
                let b = self.ring_ref(path, dir, "hnn.base", base)?;
                HnnRecipe::trivial(b.shared()).map_err(bad)
            }
            HnnSpec::Pairs { base, lambda_plus, lambda_minus, theta } => {
                let b = self.ring_ref(path, dir, "hnn.base", base)?.shared();
                let ids = |names: &[String], at: &str| -> FormatResult<Vec<ObjectId>> {
                    names
                        .iter()
                        .enumerate()
                        .map(|(i, s)| b.parse(s).map_err(|e| field(path, &format!("{}[{}]", at, i), e.to_string())))
                        .collect()
                };
                let lp = SubgroupSet::from_members(b.as_ref(), &ids(lambda_plus, "hnn.lambda_plus")?).map_err(bad)?;
                let lm = SubgroupSet::from_members(b.as_ref(), &ids(lambda_minus, "hnn.lambda_minus")?).map_err(bad)?;
                let mut pairs = Vec::with_capacity(theta.len());
                for (i, (x, y)) in theta.iter().enumerate() {
                    let at = format!("hnn.theta[{}]", i);
                    pairs.push((
                        b.parse(x).map_err(|e| field(path, &at, e.to_string()))?,
                        b.parse(y).map_err(|e| field(path, &at, e.to_string()))?,
                    ));
                }
                HnnRecipe::from_pairs(&format!("hnn-pairs({})", b.name()), b.clone(), lp, lm, &pairs).map_err(bad)
            }
        }
    }

    /// Loads a subgroup file against `built`.
    pub fn load_subgroup(&mut self, built: &Built, path: &Path) -> FormatResult<SubgroupSet> {
        let input = Input::read(path)?;
        self.inputs.push((input.name(), input.sha256.clone()));
        let file: SubgroupFile = input.json()?;
        expect_tag(&input.name(), &file.format, SUBGROUP_FORMAT)?;
        let spec = match (file.members, file.seed) {
            (Some(m), None) => SubgroupSpec::Members(m),
            (None, Some(s)) => SubgroupSpec::Seed(s),
            _ => return Err(field(&input.name(), "members", "give exactly one of members or seed")),
        };
        self.subgroup(built, &spec, &input.name())
    }

    pub fn subgroup(&self, built: &Built, spec: &SubgroupSpec, path: &str) -> FormatResult<SubgroupSet> {
        let ring = built.shared();
        let ids = |names: &[String], at: &str| -> FormatResult<Vec<ObjectId>> {
            names
                .iter()
                .enumerate()
                .map(|(i, s)| ring.parse(s).map_err(|e| field(path, &format!("{}[{}]", at, i), e.to_string())))
                .collect()
        };
        match spec {
            SubgroupSpec::Members(m) => {
                SubgroupSet::from_members(ring.as_ref(), &ids(m, "members")?).map_err(|e| invalid(path, e.to_string()))
            }
            SubgroupSpec::Seed(s) => {
                close_subgroup(ring.as_ref(), &ids(s, "seed")?, self.check_grade).map_err(|e| invalid(path, e.to_string()))
            }
            SubgroupSpec::Rule(r) => built.rule(r).map_err(|e| field(path, "subgroup.rule", e)),
        }
    }
}
