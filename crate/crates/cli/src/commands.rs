use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use extsym::geom::{self, EmbeddingSampler, GridSpec, Item, Tolerances};
use extsym::liecore::{self, EquivariantLie, MetricEquivariantAlgebra};
use extsym::quadext::{self, CatalogDescriptor, OrthogonalModule, QuadraticCocycle};
use extsym::report::{Check, Report, Status};
use extsym::weakext::{self, ClassifierDatum, Decomposability};
use extsym::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::run_report::RunReport;

/// Library errors that mean "outside the implemented scope" rather than "wrong".
fn scope_status(e: &Error) -> Status {
    match e {
        Error::Unsupported(_) | Error::FiltrationUnsupported(_) => Status::Unsupported,
        _ => Status::Fail,
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Inline JSON (starts with `{`) or a path to a JSON file.
fn json_arg(arg: &str) -> Result<Value> {
    if arg.trim_start().starts_with('{') {
        serde_json::from_str(arg).context("parsing inline JSON")
    } else {
        read_json(Path::new(arg))
    }
}

pub fn write_out(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

// ---- catalog ----------------------------------------------------------------

pub fn catalog(filter: Option<&str>) -> Result<RunReport> {
    let mut r = RunReport::new("catalog", filter.unwrap_or(""));
    let mut entries = Vec::new();
    // a full descriptor selects its family with those parameters, anything else is an id prefix
    let exact = filter.and_then(|f| f.parse::<CatalogDescriptor>().ok());
    for (id, summary) in quadext::families() {
        let desc: CatalogDescriptor = match (&exact, filter) {
            (Some(d), _) if format!("tfull-{}", d.case.id()) == id => d.clone(),
            (None, Some(f)) if id.starts_with(f) && f.len() > "tfull-".len() => id.parse().expect("family ids parse"),
            (_, None) => id.parse().expect("family ids parse"),
            _ => continue,
        };
        let dim = quadext::catalog_algebra(&desc).map(|g| g.dim()).ok();
        let mut e = json!({"family": id, "descriptor": desc.to_string(), "summary": summary, "dim": dim});
        if desc.case.parametrized() {
            e["parameters"] = json!(["k", "l", "m", "c", "a0"]);
        }
        entries.push(e);
    }
    r.set("entries", entries);
    Ok(r)
}

// ---- verify / build ---------------------------------------------------------

enum Input {
    Entry(EquivariantLie, OrthogonalModule, QuadraticCocycle),
    Algebra(MetricEquivariantAlgebra),
}

/// A catalog descriptor, or a `quadext.v1` / `algebra.v1` file.
fn load_input(arg: &str) -> Result<Input> {
    if arg.starts_with("tfull-") {
        let d: CatalogDescriptor = arg.parse()?;
        let e = quadext::catalog(&d)?;
        return Ok(Input::Entry(e.l, e.a, e.z));
    }
    let v = json_arg(arg)?;
    match v["schema"].as_str() {
        Some("quadext.v1") => {
            let (l, a, z) = quadext::entry_from_json(&v)?;
            Ok(Input::Entry(l, a, z))
        }
        Some("algebra.v1") => Ok(Input::Algebra(liecore::from_json(&v)?)),
        other => bail!("{arg}: expected a descriptor or a quadext.v1/algebra.v1 document, schema is {other:?}"),
    }
}

fn span_check(name: &str, res: extsym::Result<(bool, liecore::SpanCertificate)>) -> Check {
    match res {
        Ok((ok, cert)) => Check::new(
            name,
            ok,
            format!("bracket span {} of target {}, contained {}", cert.bracket_span_dim, cert.target_dim, cert.contained),
        ),
        Err(e) => Check::with_status(name, scope_status(&e), e.to_string()),
    }
}

fn verify_algebra_into(r: &mut RunReport, g: &MetricEquivariantAlgebra) {
    r.push_all("axioms", liecore::verify_algebra(g));
    r.push(span_check("triple/extrinsic", liecore::is_extrinsic_triple(g)));
    r.push(span_check("triple/full", liecore::is_full(g)));
    r.set("dim", g.dim());
}

pub fn verify(arg: &str) -> Result<RunReport> {
    let input = load_input(arg)?;
    let mut r = RunReport::new("verify", arg);
    match input {
        Input::Algebra(g) => {
            verify_algebra_into(&mut r, &g);
            let why = "an algebra.v1 file carries no quadratic extension data";
            r.push(Check::with_status("quadext/balanced", Status::Unsupported, why));
            r.push(Check::with_status("quadext/fullness", Status::Unsupported, why));
        }
        Input::Entry(l, a, z) => {
            let g = quadext::build_extension_unchecked(&l, &a, &z);
            verify_algebra_into(&mut r, &g);
            r.push_all("quadext/cocycle", quadext::is_cocycle(&l, &a, &z));
            match quadext::balanced_check(&l, &a, &z) {
                Ok(b) => {
                    r.push_all("quadext/balanced", b.report);
                    if !b.notes.is_empty() {
                        r.set("balanced_notes", b.notes);
                    }
                }
                Err(e) => r.push(Check::with_status("quadext/balanced", scope_status(&e), e.to_string())),
            }
            match quadext::fullness_t1_t2(&l, &a, &z) {
                Ok(f) => {
                    r.push(Check::new("quadext/t1", f.t1, format!("dim [l-,l-] = {}, dim l+ = {}", f.bracket_dim, f.l_plus_dim)));
                    r.push(Check::new(
                        "quadext/t2",
                        f.t2,
                        format!("dim (a^l)+ = {}, dim alpha0(ker) = {}", f.invariant_plus_dim, f.alpha0_kernel_dim),
                    ));
                }
                Err(e) => r.push(Check::with_status("quadext/fullness", scope_status(&e), e.to_string())),
            }
        }
    }
    Ok(r)
}

pub fn build(desc: &str, algebra_only: bool) -> Result<(RunReport, String)> {
    let d: CatalogDescriptor = desc.parse()?;
    let e = quadext::catalog(&d)?;
    let doc = if algebra_only {
        liecore::to_json(&e.build())
    } else {
        quadext::entry_to_json(&e.l, &e.a, &e.z, Some(&d.to_string()))
    };
    let mut r = RunReport::new("build", d.to_string());
    r.set("dim", e.build().dim());
    r.set("schema_written", doc["schema"].clone());
    Ok((r, serde_json::to_string_pretty(&doc)? + "\n"))
}

// ---- extend -----------------------------------------------------------------

pub fn extend(desc: &str, datum_arg: &str) -> Result<(RunReport, String)> {
    let d: CatalogDescriptor = desc.parse()?;
    let entry = quadext::catalog(&d)?;
    let g = entry.build();
    let ds = weakext::derivation_space(&g)?;
    let v = json_arg(datum_arg)?;
    let mut r = RunReport::new("extend", format!("{d} + {}", v["kind"].as_str().unwrap_or("?")));
    let (datum, classifier): (_, std::result::Result<ClassifierDatum, Error>) = match v["kind"].as_str() {
        Some("classifier") => {
            let x = weakext::classifier_from_json(&v)?;
            (weakext::realize(&entry, &ds, &x)?, Ok(x))
        }
        Some("central-extension") => {
            let w = weakext::datum_from_json(&v)?;
            let rep = weakext::check_datum(&g, &w);
            if !rep.all_pass() {
                let names: Vec<&str> = rep.failures().iter().map(|c| c.name.as_str()).collect();
                bail!("omega is not admissible on {d}: {}", names.join(", "));
            }
            let x = weakext::classify(&entry, &ds, &w);
            (w, x)
        }
        other => bail!("expected a weakext.v1 classifier or central-extension document, kind is {other:?}"),
    };
    r.push_all("datum", weakext::check_datum(&g, &datum));
    let ext = weakext::central_extension(&g, &datum)?;
    r.push_all("axioms", liecore::verify_algebra(&ext.algebra));
    let full = liecore::is_full(&ext.algebra);
    let full_direct = full.as_ref().map(|f| f.0).ok();
    r.push(Check::new(
        "fullness-routes-agree",
        full_direct == Some(ext.full),
        format!("kernel {} image {} of dim R = {}", ext.kernel_dim, ext.image_dim, datum.r_dim),
    ));
    let h2 = weakext::out_and_h2(&g, &ds, datum.r_dim);
    r.set("full", ext.full);
    r.set("r_dim", datum.r_dim);
    r.set("dim", ext.algebra.dim());
    r.set("out_dim", h2.out_dim);
    r.set("h2_dim", h2.dim());
    match classifier {
        Ok(x) => {
            r.set("classifier", weakext::classifier_to_json(&x));
            match weakext::is_indecomposable_datum(&x) {
                Ok(dec) => {
                    r.set("decomposability", dec.label());
                    let c = match &dec {
                        Decomposability::Indecomposable => Check::new("decomposability", true, "no splitting exists"),
                        Decomposability::Decomposable(w) => {
                            Check::new("decomposability", weakext::check_witness(&x, w), "splitting witness verified")
                        }
                        Decomposability::Undecided(why) => Check::with_status("decomposability", Status::Undecided, why.clone()),
                    };
                    r.push(c);
                }
                Err(e) => {
                    r.set("decomposability", "undecided");
                    r.push(Check::with_status("decomposability", Status::Undecided, e.to_string()));
                }
            }
        }
        Err(e) => {
            r.set("decomposability", "undecided");
            r.push(Check::with_status("decomposability", scope_status(&e).max(Status::Unsupported), e.to_string()));
        }
    }
    let doc = serde_json::to_string_pretty(&liecore::to_json(&ext.algebra))? + "\n";
    Ok((r, doc))
}

// ---- embed / geomcheck ------------------------------------------------------

fn parse_point(item: &Item, at: Option<&str>) -> Result<Vec<f64>> {
    let n = item.param_dim();
    let Some(s) = at else { return Ok(vec![0.0; n]) };
    let q: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| anyhow!("--at: {x:?} is not a number")))
        .collect::<Result<_>>()?;
    if q.len() != n || q.iter().any(|x| !x.is_finite()) {
        bail!("{item} takes {n} finite parameters, got {s:?}");
    }
    Ok(q)
}

pub fn embed(item: &str, grid: &str, orbit: bool) -> Result<(RunReport, geom::PointCloud)> {
    let it: Item = item.parse()?;
    let grid: GridSpec = grid.parse()?;
    let s = if orbit { EmbeddingSampler::orbit(&it)? } else { EmbeddingSampler::closed_form(&it) };
    let cloud = geom::sample_points(&s, &grid)?;
    let mut r = RunReport::new("embed", it.to_string());
    let bad = cloud.rows.iter().filter(|row| row.iter().any(|x| !x.is_finite())).count();
    r.push(Check::new("finite", bad == 0, format!("{bad} of {} rows have non-finite entries", cloud.rows.len())));
    r.set("grid", grid);
    r.set("rows", cloud.rows.len());
    r.set("source", if orbit { "orbit" } else { "closed-form" });
    Ok((r, cloud))
}

/// `count` probes uniform in the box of half-width `radius` around `base`.
pub fn probes(base: &[f64], count: usize, radius: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| base.iter().map(|b| b + radius * rng.gen_range(-1.0..=1.0)).collect()).collect()
}

pub struct GeomArgs<'a> {
    pub item: &'a str,
    pub at: Option<&'a str>,
    pub probes: usize,
    pub probe_radius: f64,
    pub seed: u64,
    pub tol: Tolerances,
}

pub fn geomcheck(a: &GeomArgs) -> Result<RunReport> {
    let it: Item = a.item.parse()?;
    let q = parse_point(&it, a.at)?;
    let ps = probes(&q, a.probes, a.probe_radius, a.seed);
    let mut r = RunReport::new("geomcheck", it.to_string());
    r.tolerances = Some(a.tol);
    let rep: Report = geom::geomcheck(&it, &q, &ps, &a.tol)?;
    for c in rep.checks {
        r.push(c);
    }
    r.set("params", &q);
    r.set("probes", a.probes);
    r.set("probe_radius", a.probe_radius);
    r.set("seed", a.seed);
    r.set("signature", it.signature());
    r.set("predicted_c", it.mean_curvature_constant());
    r.set("expected_flat", it.expected_flat());
    Ok(r)
}

// ---- report -----------------------------------------------------------------

pub fn load_report(path: &Path) -> Result<RunReport> {
    let v = read_json(path)?;
    serde_json::from_value(v).with_context(|| format!("{} is not a run report", path.display()))
}
