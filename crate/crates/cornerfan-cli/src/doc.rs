//! JSON documents. Keys are emitted in sorted order (serde_json's default
//! map) and big integers as decimal strings; on input, plain JSON integers
//! are accepted too.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use cornerfan::binomial::{normal_form, BinomialSystem};
use cornerfan::complex::{ComplexMorphism, ComplexRefinement, Id, MonoidalComplex};
use cornerfan::exact::{IntMat, IntVec, RatMat};
use cornerfan::fiber::FiberProblem;
use cornerfan::manifold::{BMap, CornerComplex};
use cornerfan::monoid::ToricMonoid;

pub const VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoadError {
    /// not a well-formed document: exit code 2
    Malformed(String),
    /// well-formed but fails its invariants: exit code 1
    Invalid(String),
}

impl std::fmt::Display for LoadError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoadError::Malformed(m) => write!(f, "malformed input: {m}"),
            LoadError::Invalid(m) => write!(f, "invalid document: {m}"),
        }
    }
}

type Res<T> = Result<T, LoadError>;

fn bad<T>(m: impl Into<String>) -> Res<T> {
    Err(LoadError::Malformed(m.into()))
}

fn invalid<T>(m: impl std::fmt::Display) -> Res<T> {
    Err(LoadError::Invalid(m.to_string()))
}

pub fn wrap(kind: &str, body: Value) -> Value {
    let mut m = match body {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    };
    m.insert("kind".into(), json!(kind));
    m.insert("version".into(), json!(VERSION));
    Value::Object(m)
}

pub fn kind_of(v: &Value) -> Res<&str> {
    if let Some(ver) = v.get("version") {
        if ver.as_u64() != Some(VERSION) {
            return bad(format!("unsupported version {ver}"));
        }
    }
    v.get("kind").and_then(Value::as_str).map_or_else(|| bad("missing \"kind\""), Ok)
}

fn expect_kind(v: &Value, kind: &str) -> Res<()> {
    match v.get("kind").and_then(Value::as_str) {
        None => Ok(()),
        Some(k) if k == kind => kind_of(v).map(|_| ()),
        Some(k) => bad(format!("expected a {kind} document, got {k}")),
    }
}

fn field<'a>(v: &'a Value, key: &str) -> Res<&'a Value> {
    v.get(key).map_or_else(|| bad(format!("missing field \"{key}\"")), Ok)
}

fn usize_field(v: &Value, key: &str) -> Res<usize> {
    field(v, key)?.as_u64().map(|x| x as usize).map_or_else(|| bad(format!("\"{key}\" must be a non-negative integer")), Ok)
}

fn str_of(v: &Value) -> Res<Id> {
    v.as_str().map(str::to_string).map_or_else(|| bad(format!("expected a string, got {v}")), Ok)
}

fn array<'a>(v: &'a Value, what: &str) -> Res<&'a Vec<Value>> {
    v.as_array().map_or_else(|| bad(format!("{what} must be an array")), Ok)
}

fn strings(v: &Value, what: &str) -> Res<Vec<Id>> {
    array(v, what)?.iter().map(str_of).collect()
}

// integers, vectors, matrices

pub fn int(x: &BigInt) -> Value {
    Value::String(x.to_string())
}

pub fn parse_int(v: &Value) -> Res<BigInt> {
    match v {
        Value::String(s) => s.trim().parse().map_or_else(|_| bad(format!("not an integer: {s:?}")), Ok),
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string().parse().expect("integer literal")),
        _ => bad(format!("not an integer: {v}")),
    }
}

pub fn vector(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int).collect())
}

pub fn parse_vector(v: &Value) -> Res<IntVec> {
    array(v, "vector")?.iter().map(parse_int).collect()
}

pub fn vectors(vs: &[IntVec]) -> Value {
    Value::Array(vs.iter().map(|v| vector(v)).collect())
}

pub fn parse_vectors(v: &Value, dim: usize) -> Res<Vec<IntVec>> {
    let out: Vec<IntVec> = array(v, "vector list")?.iter().map(parse_vector).collect::<Res<_>>()?;
    if out.iter().any(|x| x.len() != dim) {
        return bad(format!("vectors must have length {dim}"));
    }
    Ok(out)
}

pub fn matrix(m: &IntMat) -> Value {
    json!({ "rows": m.rows(), "cols": m.cols(), "entries": vectors(m.row_vecs()) })
}

/// A matrix is `{rows, cols, entries}` or a bare list of rows, the latter
/// needing `cols` from context when empty.
pub fn parse_matrix(v: &Value, cols_hint: Option<usize>) -> Res<IntMat> {
    let (entries, cols) = match v {
        Value::Object(_) => (field(v, "entries")?, Some(usize_field(v, "cols")?)),
        _ => (v, cols_hint),
    };
    let rows: Vec<IntVec> = array(entries, "matrix")?.iter().map(parse_vector).collect::<Res<_>>()?;
    let cols = match (cols, rows.first()) {
        (Some(c), _) => c,
        (None, Some(r)) => r.len(),
        (None, None) => return bad("cannot infer the width of an empty matrix"),
    };
    if rows.iter().any(|r| r.len() != cols) {
        return bad("matrix rows have different lengths");
    }
    if let Value::Object(_) = v {
        if usize_field(v, "rows")? != rows.len() {
            return bad("matrix row count does not match \"rows\"");
        }
    }
    Ok(IntMat::from_rows(cols, rows))
}

pub fn rat_matrix(m: &RatMat) -> Value {
    let rows: Vec<Value> = (0..m.rows()).map(|i| Value::Array((0..m.cols()).map(|j| json!(m.get(i, j).to_string())).collect())).collect();
    json!({ "rows": m.rows(), "cols": m.cols(), "entries": rows })
}

// monoids

/// Stored by its Hilbert basis, which generates it as a saturated monoid.
pub fn monoid(m: &ToricMonoid) -> Value {
    json!({ "ambient_dim": m.ambient_dim(), "generators": vectors(m.hilbert_basis()) })
}

pub fn parse_monoid(v: &Value) -> Res<ToricMonoid> {
    expect_kind(v, "monoid")?;
    let n = usize_field(v, "ambient_dim")?;
    let gens = parse_vectors(field(v, "generators")?, n)?;
    let result = match v.get("lattice") {
        Some(l) => ToricMonoid::new(n, &parse_vectors(l, n)?, &gens),
        None if gens.is_empty() => Ok(ToricMonoid::trivial(n)),
        None => ToricMonoid::from_generators(n, &gens),
    };
    result.or_else(invalid)
}

// complexes and morphisms

pub fn complex(q: &MonoidalComplex) -> Value {
    let elements: Vec<Value> = q.monoids().iter().map(|(id, m)| json!({ "id": id, "monoid": monoid(m) })).collect();
    let relations: Vec<Value> = q.maps().keys().map(|(a, b)| json!([a, b])).collect();
    let face_maps: Vec<Value> = q.maps().iter().map(|((a, b), m)| json!({ "pair": [a, b], "matrix": matrix(m) })).collect();
    json!({ "elements": elements, "relations": relations, "face_maps": face_maps })
}

/// Relations may be a generating set; the closure is taken. A relation
/// without a face map gets the identity.
pub fn parse_complex(v: &Value) -> Res<MonoidalComplex> {
    expect_kind(v, "complex")?;
    let mut monoids = BTreeMap::new();
    for e in array(field(v, "elements")?, "elements")? {
        let id = str_of(field(e, "id")?)?;
        if monoids.insert(id.clone(), parse_monoid(field(e, "monoid")?)?).is_some() {
            return bad(format!("duplicate element {id}"));
        }
    }
    let dim = |id: &Id| -> Res<usize> { monoids.get(id).map(ToricMonoid::ambient_dim).map_or_else(|| invalid(format!("unknown element {id}")), Ok) };
    let pair = |p: &Value| -> Res<(Id, Id)> {
        match array(p, "relation")?.as_slice() {
            [a, b] => Ok((str_of(a)?, str_of(b)?)),
            _ => bad("a relation is a pair [a, b]"),
        }
    };
    let mut maps = BTreeMap::new();
    if let Some(fm) = v.get("face_maps") {
        for e in array(fm, "face_maps")? {
            let (a, b) = pair(field(e, "pair")?)?;
            let m = parse_matrix(field(e, "matrix")?, Some(dim(&b)?))?;
            if m.rows() != dim(&a)? || m.cols() != dim(&b)? {
                return invalid(format!("face map {a} < {b} has the wrong shape"));
            }
            maps.insert((a, b), m);
        }
    }
    if let Some(rel) = v.get("relations") {
        for p in array(rel, "relations")? {
            let (a, b) = pair(p)?;
            let (da, db) = (dim(&a)?, dim(&b)?);
            if !maps.contains_key(&(a.clone(), b.clone())) {
                if da != db {
                    return invalid(format!("relation {a} < {b} needs a face map"));
                }
                maps.insert((a, b), IntMat::identity(da));
            }
        }
    }
    let q = MonoidalComplex::from_generating_maps(monoids, maps).or_else(invalid)?;
    match q.validate() {
        cornerfan::complex::ComplexReport::Pass => Ok(q),
        cornerfan::complex::ComplexReport::Fail { property, detail } => invalid(format!("{property}: {detail}")),
    }
}

pub fn morphism(m: &ComplexMorphism) -> Value {
    let homs: Map<String, Value> = m.homs.iter().map(|(k, h)| (k.clone(), matrix(h))).collect();
    json!({ "source": complex(&m.source), "target": complex(&m.target), "poset_map": m.poset_map, "homs": homs })
}

pub fn parse_morphism(v: &Value) -> Res<ComplexMorphism> {
    let source = parse_complex(field(v, "source")?)?;
    let target = parse_complex(field(v, "target")?)?;
    let mut poset_map = BTreeMap::new();
    let pm = field(v, "poset_map")?.as_object().map_or_else(|| bad("poset_map must be an object"), Ok)?;
    for (k, t) in pm {
        poset_map.insert(k.clone(), str_of(t)?);
    }
    let mut homs = BTreeMap::new();
    let hm = field(v, "homs")?.as_object().map_or_else(|| bad("homs must be an object"), Ok)?;
    for (k, h) in hm {
        let cols = poset_map.get(k).filter(|t| target.contains(t)).map(|t| target.monoid(t).ambient_dim());
        homs.insert(k.clone(), parse_matrix(h, cols)?);
    }
    let ids: BTreeSet<&Id> = source.ids().collect();
    if poset_map.keys().collect::<BTreeSet<_>>() != ids || homs.keys().collect::<BTreeSet<_>>() != ids {
        return invalid("poset_map and homs must cover every source element");
    }
    let m = ComplexMorphism { source, target, poset_map, homs };
    match m.validate() {
        cornerfan::complex::ComplexReport::Pass => Ok(m),
        cornerfan::complex::ComplexReport::Fail { property, detail } => invalid(format!("{property}: {detail}")),
    }
}

pub fn refinement(r: &ComplexRefinement) -> Value {
    morphism(&r.morphism)
}

pub fn parse_refinement(v: &Value) -> Res<ComplexRefinement> {
    expect_kind(v, "refinement")?;
    let m = parse_morphism(v)?;
    ComplexRefinement::from_morphism(m).or_else(invalid)
}

// manifolds and b-maps

pub fn manifold(x: &CornerComplex) -> Value {
    let faces: Vec<Value> = x
        .faces()
        .map(|f| {
            let below: Vec<&Id> = x.relations().iter().filter(|(_, b)| b == f).map(|(a, _)| a).collect();
            json!({ "id": f, "codim": x.codim(f), "hyps": x.incidence(f), "below": below })
        })
        .collect();
    json!({ "hypersurfaces": x.hypersurfaces(), "free_dim": x.free_dim, "faces": faces })
}

/// Either a full face list or `{"model": [n, m]}` for `ℝⁿ₊ × ℝᵐ`.
pub fn parse_manifold(v: &Value) -> Res<CornerComplex> {
    expect_kind(v, "manifold")?;
    if let Some(m) = v.get("model") {
        return match array(m, "model")?.as_slice() {
            [n, k] => match (n.as_u64(), k.as_u64()) {
                (Some(n), Some(k)) => Ok(CornerComplex::model(n as usize, k as usize)),
                _ => bad("model dimensions must be non-negative integers"),
            },
            _ => bad("model is [n, m]"),
        };
    }
    let free_dim = v.get("free_dim").map_or(Ok(0), |_| usize_field(v, "free_dim"))?;
    let mut incidence = BTreeMap::new();
    let mut relations = Vec::new();
    for f in array(field(v, "faces")?, "faces")? {
        let id = str_of(field(f, "id")?)?;
        let hyps: BTreeSet<Id> = strings(field(f, "hyps")?, "hyps")?.into_iter().collect();
        if let Some(c) = f.get("codim") {
            if c.as_u64() != Some(hyps.len() as u64) {
                return invalid(format!("face {id}: codim does not match its hypersurfaces"));
            }
        }
        if let Some(b) = f.get("below") {
            for g in strings(b, "below")? {
                relations.push((g, id.clone()));
            }
        }
        if incidence.insert(id.clone(), hyps).is_some() {
            return bad(format!("duplicate face {id}"));
        }
    }
    if let Some(h) = v.get("hypersurfaces") {
        let listed: BTreeSet<Id> = strings(h, "hypersurfaces")?.into_iter().collect();
        let have: BTreeSet<Id> = incidence.iter().filter(|(_, s)| s.len() == 1).map(|(k, _)| k.clone()).collect();
        if listed != have {
            return invalid("hypersurfaces do not match the codimension-one faces");
        }
    }
    CornerComplex::new(incidence, relations, free_dim).or_else(invalid)
}

pub fn bmap(f: &BMap) -> Value {
    json!({ "source": manifold(&f.source), "target": manifold(&f.target), "face_map": f.face_map, "alpha": matrix(&f.alpha) })
}

/// Without `face_map`, each source face goes to the unique target face
/// whose hypersurfaces are those hit by its exponents.
pub fn parse_bmap(v: &Value) -> Res<BMap> {
    expect_kind(v, "bmap")?;
    let source = parse_manifold(field(v, "source")?)?;
    let target = parse_manifold(field(v, "target")?)?;
    let (hs, ht) = (source.hypersurfaces(), target.hypersurfaces());
    let alpha = parse_matrix(field(v, "alpha")?, Some(ht.len()))?;
    if alpha.rows() != hs.len() || alpha.cols() != ht.len() {
        return invalid("alpha must have one row per source and one column per target hypersurface");
    }
    let face_map = match v.get("face_map") {
        Some(m) => {
            let obj = m.as_object().map_or_else(|| bad("face_map must be an object"), Ok)?;
            obj.iter().map(|(k, t)| Ok((k.clone(), str_of(t)?))).collect::<Res<BTreeMap<_, _>>>()?
        }
        None => derive_face_map(&source, &target, &alpha)?,
    };
    BMap::new(source, target, face_map, alpha).or_else(invalid)
}

fn derive_face_map(source: &CornerComplex, target: &CornerComplex, alpha: &IntMat) -> Res<BTreeMap<Id, Id>> {
    let cs = source.coordinate();
    let ht = target.hypersurfaces();
    let mut out = BTreeMap::new();
    for f in source.faces() {
        let hit: BTreeSet<Id> = source
            .incidence(f)
            .iter()
            .flat_map(|g| ht.iter().enumerate().filter(|(j, _)| alpha.get(cs[g], *j) != &BigInt::from(0)).map(|(_, h)| h.clone()))
            .collect();
        let matches: Vec<&Id> = target.faces().filter(|t| *target.incidence(t) == hit).collect();
        match matches.as_slice() {
            [t] => {
                out.insert(f.clone(), (*t).clone());
            }
            [] => return invalid(format!("no target face for {f}")),
            _ => return invalid(format!("face map is ambiguous at {f}; give face_map explicitly")),
        }
    }
    Ok(out)
}

// binomial systems and fiber problems

pub fn binomial_system(b: &BinomialSystem) -> Value {
    json!({
        "boundary_dim": b.boundary_dim,
        "tangential_dim": b.tangential_dim,
        "gammas": vectors(&b.gammas),
        "smooth_count": b.smooth_count,
    })
}

/// `equations: [{alpha, beta}]` are put into normal form; `gammas` are taken
/// as already normalized differences.
pub fn parse_binomial_system(v: &Value) -> Res<BinomialSystem> {
    expect_kind(v, "binomial_system")?;
    let n = usize_field(v, "boundary_dim")?;
    let t = v.get("tangential_dim").map_or(Ok(0), |_| usize_field(v, "tangential_dim"))?;
    let smooth = v.get("smooth_count").map_or(Ok(0), |_| usize_field(v, "smooth_count"))?;
    let mut eqs = Vec::new();
    if let Some(e) = v.get("equations") {
        for eq in array(e, "equations")? {
            let a = parse_vector(field(eq, "alpha")?)?;
            let b = parse_vector(field(eq, "beta")?)?;
            eqs.push((a, b));
        }
    }
    if let Some(g) = v.get("gammas") {
        for gamma in parse_vectors(g, n)? {
            let pos = gamma.iter().map(|x| x.clone().max(BigInt::from(0))).collect();
            let neg = gamma.iter().map(|x| (-x).max(BigInt::from(0))).collect();
            eqs.push((pos, neg));
        }
    }
    normal_form(n, t, &eqs, smooth).or_else(invalid)
}

pub fn fiber_problem(p: &FiberProblem) -> Value {
    json!({ "f1": bmap(&p.f1), "f2": bmap(&p.f2) })
}

pub fn parse_fiber_problem(v: &Value) -> Res<FiberProblem> {
    expect_kind(v, "fiber_problem")?;
    let f1 = parse_bmap(field(v, "f1")?)?;
    let f2 = parse_bmap(field(v, "f2")?)?;
    FiberProblem::new(f1, f2).or_else(invalid)
}

/// Any input document, parsed and validated.
pub enum Document {
    Monoid(ToricMonoid),
    Complex(MonoidalComplex),
    Morphism(ComplexMorphism),
    Refinement(ComplexRefinement),
    Manifold(CornerComplex),
    BMap(BMap),
    Binomial(BinomialSystem),
    Fiber(FiberProblem),
}

impl Document {
    pub fn parse(v: &Value) -> Res<Self> {
        Ok(match kind_of(v)? {
            "monoid" => Document::Monoid(parse_monoid(v)?),
            "complex" => Document::Complex(parse_complex(v)?),
            "morphism" => Document::Morphism(parse_morphism(v)?),
            "refinement" => Document::Refinement(parse_refinement(v)?),
            "manifold" => Document::Manifold(parse_manifold(v)?),
            "bmap" => Document::BMap(parse_bmap(v)?),
            "binomial_system" => Document::Binomial(parse_binomial_system(v)?),
            "fiber_problem" => Document::Fiber(parse_fiber_problem(v)?),
            k => return bad(format!("unknown document kind {k:?}")),
        })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Document::Monoid(_) => "monoid",
            Document::Complex(_) => "complex",
            Document::Morphism(_) => "morphism",
            Document::Refinement(_) => "refinement",
            Document::Manifold(_) => "manifold",
            Document::BMap(_) => "bmap",
            Document::Binomial(_) => "binomial_system",
            Document::Fiber(_) => "fiber_problem",
        }
    }

    /// Canonical serialization.
    pub fn to_json(&self) -> Value {
        let body = match self {
            Document::Monoid(m) => monoid(m),
            Document::Complex(q) => complex(q),
            Document::Morphism(m) => morphism(m),
            Document::Refinement(r) => refinement(r),
            Document::Manifold(x) => manifold(x),
            Document::BMap(f) => bmap(f),
            Document::Binomial(b) => binomial_system(b),
            Document::Fiber(p) => fiber_problem(p),
        };
        wrap(self.kind(), body)
    }
}

pub fn read(path: &std::path::Path) -> Res<Value> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s).or_else(|e| bad(format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).or_else(|e| bad(format!("{}: {e}", path.display())))?
    };
    serde_json::from_str(&text).or_else(|e| bad(format!("{}: {e}", path.display())))
}
