//! `cornerfan` command line: parse documents, dispatch, serialize results.

pub mod doc;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use cornerfan::binomial::{boundary_faces, resolve, universal_resolution, variety_complex, Resolution};
use cornerfan::complex::{
    extend_refinement, natural_smooth_refinement, planar_refine_complex, smooth_complex, star_subdivide_complex, ComplexRefinement,
    MonoidalComplex,
};
use cornerfan::fiber::{analyze, factor_through, resolve_fiber_product, theorem_b_check, ResolvedFiberProduct, TheoremB};
use cornerfan::manifold::{
    blowup_domain, chart_exponents, generalized_blowup, inhomogeneous_blowup, is_compatible, iterated_blowup, lift_bmap,
    ordinary_blowup, BMap, Blowup, ChartAtlas, Compatibility, CornerComplex,
};
use cornerfan::monoid::ToricMonoid;
use cornerfan::verify::{verify_lift, verify_transitions, SamplePlan, VerifyReport};

use doc::{Document, LoadError};

#[derive(Parser, Debug)]
#[command(name = "cornerfan", version, about = "Toric-monoid combinatorics of generalized blow-ups")]
pub struct Cli {
    /// write the result document here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// relative tolerance for numeric verification
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tolerance: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

/// How to blow up a manifold.
#[derive(Args, Debug, Clone, Default)]
pub struct BlowupOpts {
    /// blow up one face
    #[arg(long, value_name = "FACE")]
    pub ordinary: Option<String>,
    /// inhomogeneous blow-up of FACE, e.g. `x1&x2=1,2`
    #[arg(long, value_name = "FACE=W1,W2,...")]
    pub weights: Option<String>,
    /// blow up faces in order, lifting each; separated by `;`
    #[arg(long, value_name = "F1;F2;...")]
    pub iterated: Option<String>,
    /// smooth refinement of the basic complex
    #[arg(long, value_name = "FILE")]
    pub refinement: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Check any document against its invariants
    Validate { file: PathBuf },
    /// Hilbert basis and extremals of a monoid
    Hilbert { file: PathBuf },
    /// Face lattice of a monoid
    Faces { file: PathBuf },
    /// Refine a complex (or a single monoid)
    Subdivide {
        file: PathBuf,
        /// star subdivide the element ID (the unique maximal one if omitted)
        #[arg(long, value_name = "ID", num_args = 0..=1, default_missing_value = "", group = "how")]
        star: Option<String>,
        /// star vector, default the extremal sum
        #[arg(long, value_name = "V1,V2,...", requires = "star")]
        vector: Option<String>,
        /// planar refinement along an injective morphism into the complex
        #[arg(long, value_name = "FILE", group = "how")]
        planar: Option<PathBuf>,
        /// smoothing of a simplicial complex
        #[arg(long, group = "how")]
        smooth: bool,
    },
    /// Natural smooth refinement
    Ns { file: PathBuf },
    /// Extend a refinement of a subcomplex to the whole complex
    Extend { complex: PathBuf, refinement: PathBuf },
    /// Generalized blow-up of a manifold with corners
    Blowup {
        manifold: PathBuf,
        #[command(flatten)]
        opts: BlowupOpts,
    },
    /// Chart atlas of a blow-up over a corner
    Atlas {
        manifold: PathBuf,
        #[command(flatten)]
        opts: BlowupOpts,
        /// corner to chart, default the deepest face
        #[arg(long)]
        at: Option<String>,
    },
    /// Lift a b-map to a blow-up of its target
    Lift {
        bmap: PathBuf,
        #[command(flatten)]
        opts: BlowupOpts,
    },
    /// Blow up the domain of a b-map so it lifts
    BlowupDomain {
        bmap: PathBuf,
        #[command(flatten)]
        opts: BlowupOpts,
    },
    /// Interior binomial subvarieties
    #[command(subcommand)]
    Binomial(BinomialCmd),
    /// Fiber products of b-maps
    #[command(subcommand)]
    Fiber(FiberCmd),
    /// Numerically check a blow-up atlas, and optionally a lift into it
    Verify {
        manifold: PathBuf,
        #[command(flatten)]
        opts: BlowupOpts,
        /// b-map from a model corner into the manifold to lift chart by chart
        #[arg(long)]
        bmap: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        points: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum BinomialCmd {
    NormalForm { file: PathBuf },
    Faces { file: PathBuf },
    Complex { file: PathBuf },
    Resolve {
        file: PathBuf,
        /// smooth refinement of the variety's complex; default the complex itself
        #[arg(long, conflicts_with = "ns")]
        refinement: Option<PathBuf>,
        /// use the natural smooth refinement of the variety's complex
        #[arg(long)]
        ns: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum FiberCmd {
    Analyze {
        file: PathBuf,
        /// declared component count for a pair, `(F1,F2)=K`
        #[arg(long, value_name = "PAIR=K")]
        multiplicity: Vec<String>,
    },
    CheckSmooth { file: PathBuf },
    Resolve {
        file: PathBuf,
        #[arg(long)]
        refinement: Option<PathBuf>,
    },
    Factor {
        file: PathBuf,
        #[arg(long)]
        g1: PathBuf,
        #[arg(long)]
        g2: PathBuf,
        #[arg(long)]
        refinement: Option<PathBuf>,
    },
}

/// What a command produced.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub doc: Value,
    pub summary: String,
}

impl Outcome {
    fn ok(doc: Value, summary: impl Into<String>) -> Self {
        Outcome { code: 0, doc, summary: summary.into() }
    }

    fn failed(doc: Value, summary: impl Into<String>) -> Self {
        Outcome { code: 1, doc, summary: summary.into() }
    }

    fn error(e: LoadError) -> Self {
        let (code, class) = match e {
            LoadError::Malformed(_) => (2, "malformed"),
            LoadError::Invalid(_) => (1, "invalid"),
        };
        let msg = e.to_string();
        Outcome { code, doc: doc::wrap("error", json!({ "class": class, "message": msg })), summary: msg }
    }
}

type Res<T> = Result<T, LoadError>;

fn fail<T>(e: impl std::fmt::Display) -> Res<T> {
    Err(LoadError::Invalid(e.to_string()))
}

fn malformed<T>(e: impl std::fmt::Display) -> Res<T> {
    Err(LoadError::Malformed(e.to_string()))
}

fn load(path: &Path) -> Res<Document> {
    Document::parse(&doc::read(path)?)
}

fn load_complex(path: &Path) -> Res<MonoidalComplex> {
    match load(path)? {
        Document::Complex(q) => Ok(q),
        Document::Monoid(m) => Ok(MonoidalComplex::of_monoid(&m)),
        d => malformed(format!("expected a complex, got a {}", d.kind())),
    }
}

macro_rules! loader {
    ($name:ident, $variant:ident, $ty:ty, $what:literal) => {
        fn $name(path: &Path) -> Res<$ty> {
            match load(path)? {
                Document::$variant(x) => Ok(x),
                d => malformed(format!(concat!("expected a ", $what, ", got a {}"), d.kind())),
            }
        }
    };
}

loader!(load_monoid, Monoid, ToricMonoid, "monoid");
loader!(load_refinement, Refinement, ComplexRefinement, "refinement");
loader!(load_manifold, Manifold, CornerComplex, "manifold");
loader!(load_bmap, BMap, BMap, "bmap");
loader!(load_binomial, Binomial, cornerfan::binomial::BinomialSystem, "binomial_system");
loader!(load_fiber, Fiber, cornerfan::fiber::FiberProblem, "fiber_problem");

fn parse_ints(s: &str) -> Res<Vec<BigInt>> {
    s.split(',').map(|t| t.trim().parse::<BigInt>().or_else(|_| malformed(format!("not an integer: {t:?}")))).collect()
}

fn blowup_with(x: &CornerComplex, o: &BlowupOpts) -> Res<Blowup> {
    let chosen = [o.ordinary.is_some(), o.weights.is_some(), o.iterated.is_some(), o.refinement.is_some()];
    if chosen.iter().filter(|b| **b).count() != 1 {
        return malformed("choose exactly one of --ordinary, --weights, --iterated, --refinement");
    }
    let r = if let Some(f) = &o.ordinary {
        ordinary_blowup(x, f)
    } else if let Some(w) = &o.weights {
        let (face, ws) = w.rsplit_once('=').map_or_else(|| malformed("--weights is FACE=W1,W2,..."), Ok)?;
        let ws: Vec<u64> = ws.split(',').map(|t| t.trim().parse().or_else(|_| malformed(format!("bad weight {t:?}")))).collect::<Res<_>>()?;
        inhomogeneous_blowup(x, face, &ws)
    } else if let Some(it) = &o.iterated {
        let faces: Vec<String> = it.split(';').map(|s| s.trim().to_string()).collect();
        iterated_blowup(x, &faces)
    } else {
        let r = load_refinement(o.refinement.as_ref().expect("one option chosen"))?;
        generalized_blowup(x, &r)
    };
    r.or_else(fail)
}

fn blowup_doc(b: &Blowup) -> Value {
    json!({
        "space": doc::manifold(&b.space),
        "blowdown": doc::bmap(&b.blowdown),
        "refinement": doc::refinement(&b.refinement),
    })
}

fn atlas_doc(a: &ChartAtlas) -> Value {
    let charts: Vec<Value> = a.charts.iter().map(|c| json!({ "nu": doc::matrix(&c.nu), "monoid": doc::monoid(&c.monoid) })).collect();
    let transitions: Vec<Value> = a
        .transitions
        .iter()
        .map(|t| {
            json!({
                "from": t.from,
                "to": t.to,
                "matrix": doc::rat_matrix(&t.matrix),
                "common": t.common,
                "separating": doc::vector(&t.separating),
            })
        })
        .collect();
    json!({ "n": a.n, "free_dim": a.free_dim, "charts": charts, "transitions": transitions })
}

fn verify_doc(r: &VerifyReport) -> Value {
    let checks: Vec<Value> =
        r.checks.iter().map(|c| json!({ "label": c.label, "samples": c.samples, "max_error": c.max_error })).collect();
    json!({ "tolerance": r.tolerance, "max_error": r.max_error(), "passed": r.passed(), "checks": checks, "notes": r.notes })
}

fn deepest_corner(x: &CornerComplex) -> Res<String> {
    let n = x.hypersurfaces().len();
    x.faces().find(|f| x.codim(f) == n).cloned().map_or_else(|| fail("no face meets every hypersurface; use --at"), Ok)
}

fn resolution_doc(r: &Resolution) -> Value {
    let charts: Vec<Value> = r
        .charts
        .iter()
        .map(|c| {
            json!({ "chart": c.chart, "nu": doc::matrix(&c.nu), "transformed": doc::vectors(&c.transformed), "indefinite": c.indefinite, "face_compatible": c.face_compatible })
        })
        .collect();
    json!({ "r_x": doc::refinement(&r.r_x), "lifted": r.lifted, "charts": charts, "universal": r.universal, "indefinite_total": r.indefinite_total() })
}

fn resolved_fiber_doc(r: &ResolvedFiberProduct) -> Value {
    let systems: serde_json::Map<String, Value> = r
        .systems
        .iter()
        .map(|(k, s)| {
            let v = match s {
                Ok(b) => doc::binomial_system(b),
                Err(e) => json!({ "error": e.to_string() }),
            };
            (k.clone(), v)
        })
        .collect();
    json!({
        "fiber_complex": doc::complex(&r.fiber.complex),
        "refinement": doc::refinement(&r.refinement),
        "space": doc::manifold(&r.space),
        "h1": doc::bmap(&r.h1),
        "h2": doc::bmap(&r.h2),
        "systems": systems,
    })
}

fn execute(cli: &Cli) -> Res<Outcome> {
    let plan = SamplePlan::new(100, 0.1, 10.0, cli.seed, cli.tolerance).or_else(malformed)?;
    Ok(match &cli.cmd {
        Cmd::Validate { file } => {
            let v = doc::read(file)?;
            let kind = doc::kind_of(&v)?.to_string();
            match Document::parse(&v) {
                Ok(d) => Outcome::ok(
                    doc::wrap("validation", json!({ "document_kind": d.kind(), "valid": true })),
                    format!("{} document is valid", d.kind()),
                ),
                Err(LoadError::Invalid(detail)) => {
                    let body = json!({ "document_kind": kind, "valid": false, "detail": detail });
                    Outcome::failed(doc::wrap("validation", body), format!("{kind} document is not valid: {detail}"))
                }
                Err(e) => return Err(e),
            }
        }
        Cmd::Hilbert { file } => {
            let m = load_monoid(file)?;
            let body = json!({
                "monoid": doc::monoid(&m),
                "dim": m.dim(),
                "extremals": doc::vectors(m.extremals()),
                "hilbert_basis": doc::vectors(m.hilbert_basis()),
                "is_simplicial": m.is_simplicial(),
                "is_smooth": m.is_smooth(),
            });
            let s = format!("dim {}, {} extremals, Hilbert basis of size {}, smooth: {}", m.dim(), m.extremals().len(), m.hilbert_basis().len(), m.is_smooth());
            Outcome::ok(doc::wrap("hilbert_report", body), s)
        }
        Cmd::Faces { file } => {
            let m = load_monoid(file)?;
            let faces: Vec<Value> = m
                .faces()
                .iter()
                .map(|f| json!({ "dim": f.monoid.dim(), "extremals": doc::vectors(f.monoid.extremals()), "functional": doc::vector(&f.functional) }))
                .collect();
            let n = faces.len();
            Outcome::ok(doc::wrap("face_report", json!({ "faces": faces })), format!("{n} faces"))
        }
        Cmd::Subdivide { file, star, vector, planar, smooth } => {
            let q = load_complex(file)?;
            let (r, summary) = if let Some(id) = star {
                let id = if id.is_empty() {
                    match q.maximal().as_slice() {
                        [a] => a.clone(),
                        _ => return malformed("the complex has several maximal elements; name one with --star ID"),
                    }
                } else {
                    id.clone()
                };
                if !q.contains(&id) {
                    return fail(format!("unknown element {id}"));
                }
                let v = match vector {
                    Some(s) => parse_ints(s)?,
                    None => q.monoid(&id).extremal_sum(),
                };
                let r = star_subdivide_complex(&q, &id, &v).or_else(fail)?;
                (r, format!("star subdivision of {id}"))
            } else if let Some(p) = planar {
                let i = match load(p)? {
                    Document::Morphism(m) => m,
                    d => return malformed(format!("--planar expects a morphism, got a {}", d.kind())),
                };
                if i.target != q {
                    return fail("the morphism does not map into this complex");
                }
                let (r, _) = planar_refine_complex(&q, &i).or_else(fail)?;
                (r, "planar refinement".to_string())
            } else if *smooth {
                (smooth_complex(&q).or_else(fail)?, "smoothing".to_string())
            } else {
                return malformed("choose one of --star, --planar, --smooth");
            };
            let s = format!("{summary}: {} elements, smooth: {}", r.source().len(), r.is_smooth());
            Outcome::ok(doc::wrap("refinement", doc::refinement(&r)), s)
        }
        Cmd::Ns { file } => {
            let q = load_complex(file)?;
            let (r, steps) = natural_smooth_refinement(&q).or_else(fail)?;
            let st: Vec<Value> = steps
                .iter()
                .map(|s| json!({ "element": s.element, "member": doc::monoid(&s.member), "k": s.k, "before": s.before, "after": s.after }))
                .collect();
            let s = format!("{} star subdivisions, {} elements", steps.len(), r.source().len());
            Outcome::ok(doc::wrap("ns_result", json!({ "refinement": doc::refinement(&r), "steps": st })), s)
        }
        Cmd::Extend { complex, refinement } => {
            let q = load_complex(complex)?;
            let r0 = load_refinement(refinement)?;
            let (r, rep) = extend_refinement(&q, &r0).or_else(fail)?;
            let s = format!("extended to {} elements after {} rounds", r.source().len(), rep.damaged.len());
            Outcome::ok(doc::wrap("extension", json!({ "refinement": doc::refinement(&r), "damaged": rep.damaged, "ns_steps": rep.ns_steps.len() })), s)
        }
        Cmd::Blowup { manifold, opts } => {
            let x = load_manifold(manifold)?;
            let b = blowup_with(&x, opts)?;
            let s = format!("{} hypersurfaces, {} faces", b.space.hypersurfaces().len(), b.space.faces().count());
            Outcome::ok(doc::wrap("blowup", blowup_doc(&b)), s)
        }
        Cmd::Atlas { manifold, opts, at } => {
            let x = load_manifold(manifold)?;
            let b = blowup_with(&x, opts)?;
            let face = match at {
                Some(f) => f.clone(),
                None => deepest_corner(&x)?,
            };
            let a = b.atlas_at(&face).or_else(fail)?;
            let exact = a.check_exact();
            let mut body = atlas_doc(&a);
            body["exact_check"] = json!(exact.clone().err().unwrap_or_else(|| "pass".into()));
            let s = format!("{} charts, {} transitions, exact check: {}", a.charts.len(), a.transitions.len(), body["exact_check"]);
            if exact.is_err() {
                Outcome::failed(doc::wrap("atlas", body), s)
            } else {
                Outcome::ok(doc::wrap("atlas", body), s)
            }
        }
        Cmd::Lift { bmap, opts } => {
            let f = load_bmap(bmap)?;
            let b = blowup_with(&f.target, opts)?;
            match is_compatible(&f, &b.refinement).or_else(fail)? {
                c @ Compatibility::Factors(_) => {
                    let l = lift_bmap(&f, &b, &c).or_else(fail)?;
                    let body = json!({ "compatible": true, "lifted": doc::bmap(&l.map), "factorization": doc::morphism(&l.factorization) });
                    Outcome::ok(doc::wrap("lift", body), "compatible; lifted")
                }
                Compatibility::Incompatible { face } => {
                    let s = format!("not compatible at face {face}; try blowup-domain");
                    Outcome::failed(doc::wrap("lift", json!({ "compatible": false, "face": face })), s)
                }
            }
        }
        Cmd::BlowupDomain { bmap, opts } => {
            let f = load_bmap(bmap)?;
            let b = blowup_with(&f.target, opts)?;
            let d = blowup_domain(&f, &b.refinement).or_else(fail)?;
            let body = json!({
                "refinement": doc::refinement(&d.refinement),
                "domain": blowup_doc(&d.domain),
                "lifted": doc::bmap(&d.lifted.map),
                "minimal": d.minimal,
            });
            let s = format!("domain blown up to {} hypersurfaces", d.domain.space.hypersurfaces().len());
            Outcome::ok(doc::wrap("domain_blowup", body), s)
        }
        Cmd::Binomial(c) => binomial(c)?,
        Cmd::Fiber(c) => fiber(c)?,
        Cmd::Verify { manifold, opts, bmap, points } => {
            let plan = SamplePlan { points: *points, ..plan };
            let x = load_manifold(manifold)?;
            let b = blowup_with(&x, opts)?;
            let a = b.atlas_at(&deepest_corner(&x)?).or_else(fail)?;
            let mut reports = vec![("transitions".to_string(), verify_transitions(&a, &plan))];
            if let Some(p) = bmap {
                let f = load_bmap(p)?;
                if f.target != x {
                    return fail("the b-map does not map into this manifold");
                }
                // positive coefficients standing in for the smooth factors a(x)
                let coeffs: Vec<f64> = (0..x.hypersurfaces().len()).map(|j| 1.0 + 0.25 * ((cli.seed as usize + j) % 5) as f64).collect();
                for (i, mu) in chart_exponents(&f.alpha, &a) {
                    reports.push((format!("lift into chart {i}"), verify_lift(&f.alpha, &a.charts[i].nu, &mu, &coeffs, &plan)));
                }
            }
            let passed = reports.iter().all(|(_, r)| r.passed());
            let max = reports.iter().map(|(_, r)| r.max_error()).fold(0.0, f64::max);
            let body: BTreeMap<String, Value> = reports.iter().map(|(k, r)| (k.clone(), verify_doc(r))).collect();
            let s = format!("max relative error {max:.3e}, passed: {passed}");
            let d = doc::wrap("verification", json!({ "passed": passed, "max_error": max, "reports": body }));
            if passed {
                Outcome::ok(d, s)
            } else {
                Outcome::failed(d, s)
            }
        }
    })
}

fn binomial(c: &BinomialCmd) -> Res<Outcome> {
    Ok(match c {
        BinomialCmd::NormalForm { file } => {
            let b = load_binomial(file)?;
            let s = format!("{} indefinite equations, {} smooth", b.gammas.len(), b.smooth_count);
            Outcome::ok(doc::wrap("binomial_system", doc::binomial_system(&b)), s)
        }
        BinomialCmd::Faces { file } => {
            let v = boundary_faces(&load_binomial(file)?);
            let faces: Vec<Value> = v
                .faces
                .iter()
                .map(|(id, f)| json!({ "id": id, "coords": f.coords, "witness": doc::vector(&f.witness), "monoid": doc::monoid(&f.monoid) }))
                .collect();
            let s = format!("meets {} faces", faces.len());
            Outcome::ok(doc::wrap("binomial_faces", json!({ "subspace": doc::vectors(&v.subspace), "faces": faces })), s)
        }
        BinomialCmd::Complex { file } => {
            let (pd, inc) = variety_complex(&boundary_faces(&load_binomial(file)?));
            let body = json!({ "complex": doc::complex(&pd), "inclusion": doc::morphism(&inc), "smooth": pd.is_smooth() });
            let s = format!("{} elements, smooth: {}", pd.len(), pd.is_smooth());
            Outcome::ok(doc::wrap("binomial_complex", body), s)
        }
        BinomialCmd::Resolve { file, refinement, ns } => {
            let b = load_binomial(file)?;
            let r = if let Some(p) = refinement {
                resolve(&b, &load_refinement(p)?)
            } else if *ns {
                let (pd, _) = variety_complex(&boundary_faces(&b));
                let (n, _) = natural_smooth_refinement(&pd).or_else(fail)?;
                resolve(&b, &n)
            } else {
                universal_resolution(&b)
            };
            let r = r.or_else(fail)?;
            let s = format!("{} charts, {} indefinite exponents", r.charts.len(), r.indefinite_total());
            Outcome::ok(doc::wrap("binomial_resolution", resolution_doc(&r)), s)
        }
    })
}

fn fiber(c: &FiberCmd) -> Res<Outcome> {
    Ok(match c {
        FiberCmd::Analyze { file, multiplicity } => {
            let p = load_fiber(file)?;
            let rep = analyze(&p);
            let mut declared = BTreeMap::new();
            for m in multiplicity {
                let (k, v) = m.rsplit_once('=').map_or_else(|| malformed("--multiplicity is PAIR=K"), Ok)?;
                let v: u64 = v.parse().or_else(|_| malformed(format!("bad multiplicity {v:?}")))?;
                declared.insert(k.to_string(), v);
            }
            let pairs: Vec<Value> = rep
                .pairs
                .iter()
                .map(|q| {
                    json!({
                        "f1": q.f1, "f2": q.f2, "g": q.g,
                        "monoid": q.monoid.as_ref().map(doc::monoid),
                        "smooth": q.smooth,
                        "system": match &q.system { Ok(b) => doc::binomial_system(b), Err(e) => json!({ "error": e.to_string() }) },
                    })
                })
                .collect();
            let tv: Vec<Value> = rep
                .transversality
                .pairs
                .iter()
                .map(|v| {
                    json!({
                        "f1": v.f1, "f2": v.f2, "g": v.g, "rank": v.rank, "required": v.required,
                        "tangential": v.tangential, "normal_surjective": v.normal_surjective(), "passed": v.passed(),
                    })
                })
                .collect();
            let body = json!({
                "pairs": pairs,
                "exceptional": rep.exceptional().iter().map(|q| json!([q.f1, q.f2])).collect::<Vec<_>>(),
                "transversality": { "passed": rep.transversality.passed(), "pairs": tv, "note": cornerfan::fiber::TransversalityReport::NOTE },
                "complex": doc::complex(&rep.complex.complex),
                "declared_multiplicities": declared,
                "note": cornerfan::fiber::FiberReport::MULTIPLICITY_NOTE,
            });
            let s = format!(
                "{} face pairs, {} in the fiber complex, {} non-smooth, transversality (necessary part): {}",
                rep.pairs.len(),
                rep.complex.complex.len(),
                rep.offenders().len(),
                rep.transversality.passed()
            );
            Outcome::ok(doc::wrap("fiber_report", body), s)
        }
        FiberCmd::CheckSmooth { file } => {
            let p = load_fiber(file)?;
            match theorem_b_check(&p) {
                TheoremB::Smooth(r) => {
                    let body = json!({ "smooth": true, "offenders": [], "universal": resolved_fiber_doc(&r) });
                    Outcome::ok(doc::wrap("fiber_smoothness", body), "every fiber monoid is smooth")
                }
                TheoremB::NotSmooth { offenders } => {
                    let off: Vec<Value> = offenders
                        .iter()
                        .map(|(id, m)| json!({ "id": id, "monoid": doc::monoid(m), "extremals": doc::vectors(m.extremals()), "simplicial": m.is_simplicial() }))
                        .collect();
                    let s = format!("not smooth; offenders: {}", offenders.iter().map(|o| o.0.as_str()).collect::<Vec<_>>().join(", "));
                    Outcome::ok(doc::wrap("fiber_smoothness", json!({ "smooth": false, "offenders": off })), s)
                }
            }
        }
        FiberCmd::Resolve { file, refinement } => {
            let p = load_fiber(file)?;
            let r = match refinement {
                Some(f) => Some(load_refinement(f)?),
                None => None,
            };
            let res = resolve_fiber_product(&p, r).or_else(fail)?;
            let s = format!("resolved: {} hypersurfaces, {} faces", res.space.hypersurfaces().len(), res.space.faces().count());
            Outcome::ok(doc::wrap("fiber_resolution", resolved_fiber_doc(&res)), s)
        }
        FiberCmd::Factor { file, g1, g2, refinement } => {
            let p = load_fiber(file)?;
            let (g1, g2) = (load_bmap(g1)?, load_bmap(g2)?);
            let r = match refinement {
                Some(f) => Some(load_refinement(f)?),
                None => None,
            };
            let res = resolve_fiber_product(&p, r).or_else(fail)?;
            let f = factor_through(&p, &g1, &g2, &res).or_else(fail)?;
            let body = json!({
                "component": [f.component.0, f.component.1],
                "g": doc::bmap(&f.g),
                "blowup": f.blowup.as_ref().map(blowup_doc),
            });
            let s = if f.blowup.is_some() { "factors after blowing up the domain" } else { "factors directly" };
            Outcome::ok(doc::wrap("factorization", body), s)
        }
    })
}

/// Runs the command line and returns the outcome without printing.
pub fn run_cli(cli: &Cli) -> Outcome {
    execute(cli).unwrap_or_else(Outcome::error)
}

/// Full entry point: parses `args`, runs, and writes output. Returns the
/// exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(stdout, "{e}") } else { write!(stderr, "{e}") };
            return code;
        }
    };
    let out = run_cli(&cli);
    let text = serde_json::to_string_pretty(&out.doc).expect("values serialize") + "\n";
    let wrote = match &cli.out {
        Some(p) => std::fs::write(p, &text).map_err(|e| e.to_string()),
        None if cli.format == Format::Json => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
        None => Ok(()),
    };
    if let Err(e) = wrote {
        let _ = writeln!(stderr, "cannot write output: {e}");
        return 2;
    }
    let _ = if cli.format == Format::Text { writeln!(stdout, "{}", out.summary) } else { writeln!(stderr, "{}", out.summary) };
    out.code
}
