use std::f64::consts::PI;
use std::path::Path;

use nodal_core::discrete::{
    assemble_hamiltonian, check_genericity_with, eigen_decompose, reports_for, DiscreteError, Potential, Spectrum,
};
use nodal_core::io::{ensemble_report, fmt_real, genericity_flags, nodal_row, GraphFile, Report, NODAL_COLUMNS};
use nodal_core::metric::{
    build_star_counterexample, check_metric_genericity, eigenfunctions, find_eigenvalues_with, find_lowest_with,
    metric_nodal_count, support_nodal_count_metric, EigenFunction, MetricEigenpair, MetricError, MetricGraph,
    StarOffset,
};
use nodal_core::discrete::NodalReport;
use nodal_core::riccati::{
    locate_eigenvalues, nodal_count_via_riccati, riccati_sweep, ExtReal, RiccatiError,
};
use nodal_core::verify::{run_ensemble, EnsembleConfig, VerifyError};
use nodal_core::{Graph, GraphError, RootedTree, Tolerances};

use crate::{Failure, ModelArg, OffsetArg, SpectrumArgs};

const METRIC_DEFAULT_COUNT: usize = 10;

pub fn apply(mut tol: Tolerances, (gap, vanish): (Option<f64>, Option<f64>)) -> Tolerances {
    if let Some(g) = gap {
        tol.gap_rel = g;
    }
    if let Some(v) = vanish {
        tol.vanish_rel = v;
    }
    tol
}

fn load(path: &Path) -> Result<GraphFile, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    GraphFile::parse(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn metric_failure(e: MetricError) -> Failure {
    match e {
        MetricError::BadStar { .. } | MetricError::NotBoundaryVertex { .. } => Failure::input(e),
        _ => Failure::numeric(e),
    }
}

fn discrete_failure(e: DiscreteError) -> Failure {
    Failure::numeric(e)
}

enum Loaded {
    Discrete(Graph, Potential),
    Metric(MetricGraph),
}

fn load_as(path: &Path, model: Option<ModelArg>) -> Result<Loaded, Failure> {
    let file = load(path)?;
    let found = if file.is_metric() { ModelArg::Metric } else { ModelArg::Discrete };
    if model.is_some_and(|m| m != found) {
        return Err(Failure::mismatch(format!(
            "{} holds a {} graph",
            path.display(),
            if file.is_metric() { "metric" } else { "discrete" }
        )));
    }
    Ok(match file {
        GraphFile::Discrete { graph, potential } => Loaded::Discrete(graph, potential),
        GraphFile::Metric(mg) => Loaded::Metric(mg),
    })
}

fn discrete_spectrum(g: &Graph, q: &Potential) -> Result<Spectrum, Failure> {
    let h = assemble_hamiltonian(g, q).map_err(discrete_failure)?;
    eigen_decompose(&h).map_err(discrete_failure)
}

fn discrete_count(a: &SpectrumArgs, len: usize) -> Result<usize, Failure> {
    if a.kmax.is_some() {
        return Err(Failure::input("--kmax applies to metric graphs only"));
    }
    Ok(a.count.unwrap_or(len).min(len))
}

fn metric_pairs(a: &SpectrumArgs, mg: &MetricGraph, tol: &Tolerances) -> Result<Vec<MetricEigenpair>, Failure> {
    match a.kmax {
        Some(k) if !(k.is_finite() && k > 0.0) => Err(Failure::input("--kmax must be positive")),
        Some(k) => {
            let pairs = find_eigenvalues_with(mg, k * k, tol).map_err(metric_failure)?;
            // strictly below K; an eigenvalue within rounding of K is excluded
            Ok(pairs.into_iter().filter(|p| p.lambda < k * k * (1.0 - 1e-9)).collect())
        }
        None => find_lowest_with(mg, a.count.unwrap_or(METRIC_DEFAULT_COUNT), tol).map_err(metric_failure),
    }
}

/// One eigenfunction per pair; members of a cluster get successive basis
/// functions of its eigenspace.
fn metric_functions(mg: &MetricGraph, pairs: &[MetricEigenpair]) -> Result<Vec<EigenFunction>, Failure> {
    let mut out: Vec<EigenFunction> = Vec::with_capacity(pairs.len());
    let mut i = 0;
    while i < pairs.len() {
        let p = pairs[i];
        let basis = eigenfunctions(mg, p.lambda, p.multiplicity).map_err(metric_failure)?;
        let take = p.multiplicity.min(pairs.len() - i);
        out.extend(basis.into_iter().take(take));
        i += take;
    }
    Ok(out)
}

pub fn spectrum(a: &SpectrumArgs, tol: &Tolerances) -> Result<Report, Failure> {
    match load_as(&a.file, a.model)? {
        Loaded::Discrete(g, q) => {
            let s = discrete_spectrum(&g, &q)?;
            let mut r = Report::new("spectrum", &["n", "lambda", "generic", "flags"])
                .with_header("model", "discrete")
                .with_tolerances(tol);
            for n in 1..=discrete_count(a, s.len())? {
                let gr = check_genericity_with(&s, n, tol);
                r.push_row(vec![
                    n.to_string(),
                    fmt_real(s.eigenvalues[n - 1]),
                    gr.generic.to_string(),
                    genericity_flags(gr.simple, gr.nonvanishing),
                ]);
            }
            Ok(r)
        }
        Loaded::Metric(mg) => {
            let pairs = metric_pairs(a, &mg, tol)?;
            let fs = metric_functions(&mg, &pairs)?;
            let mut r = Report::new("spectrum", &["n", "lambda", "k", "multiplicity", "generic", "flags"])
                .with_header("model", "metric")
                .with_tolerances(tol);
            for (p, f) in pairs.iter().zip(&fs) {
                let gen = check_metric_genericity(&mg, p, f, tol);
                r.push_row(vec![
                    p.n.to_string(),
                    fmt_real(p.lambda),
                    fmt_real(p.k()),
                    p.multiplicity.to_string(),
                    gen.generic.to_string(),
                    genericity_flags(gen.simple, gen.nonvanishing),
                ]);
            }
            Ok(r)
        }
    }
}

pub fn nodal(a: &SpectrumArgs, tol: &Tolerances) -> Result<Report, Failure> {
    let (model, reports) = match load_as(&a.file, a.model)? {
        Loaded::Discrete(g, q) => {
            let s = discrete_spectrum(&g, &q)?;
            let count = discrete_count(a, s.len())?;
            let mut reports = reports_for(&g, &s, tol);
            reports.truncate(count);
            ("discrete", reports)
        }
        Loaded::Metric(mg) => {
            let pairs = metric_pairs(a, &mg, tol)?;
            let fs = metric_functions(&mg, &pairs)?;
            let ell = mg.graph().cycle_dimension();
            let mut reports = Vec::with_capacity(pairs.len());
            for (p, f) in pairs.iter().zip(&fs) {
                let gen = check_metric_genericity(&mg, p, f, tol);
                let nu = if gen.generic {
                    metric_nodal_count(&mg, f, tol).map_err(metric_failure)?
                } else {
                    support_nodal_count_metric(&mg, f, tol)
                };
                reports.push(NodalReport::new(p.n, p.lambda, nu, ell, gen.simple, gen.nonvanishing));
            }
            ("metric", reports)
        }
    };
    let mut r = Report::new("nodal", &NODAL_COLUMNS)
        .with_header("model", model)
        .with_tolerances(tol);
    for rep in &reports {
        r.push_row(nodal_row(rep));
    }
    r.push_summary("pairs", reports.len());
    r.push_summary("generic_pairs", reports.iter().filter(|x| x.generic).count());
    r.push_summary("violations", reports.iter().filter(|x| x.is_violation()).count());
    Ok(r)
}

fn ext(x: ExtReal) -> String {
    match x {
        ExtReal::Finite(v) => fmt_real(v),
        ExtReal::Pole => "pole".into(),
    }
}

fn rooted(path: &Path, root: usize) -> Result<(RootedTree, Potential), Failure> {
    let (g, q) = match load_as(path, None)? {
        Loaded::Discrete(g, q) => (g, q),
        Loaded::Metric(_) => {
            return Err(Failure::mismatch(format!("{} holds a metric graph; riccati needs a discrete tree", path.display())))
        }
    };
    if root == 0 || root > g.vertex_count() {
        return Err(Failure::input(format!("root {root} is not a vertex label 1..={}", g.vertex_count())));
    }
    let t = RootedTree::new(g, root - 1).map_err(|e| match e {
        GraphError::NotATree { .. } => Failure::mismatch(e),
        other => Failure::input(other),
    })?;
    Ok((t, q))
}

fn riccati_failure(e: RiccatiError) -> Failure {
    match e {
        RiccatiError::BadInterval { .. } => Failure::input(e),
        _ => Failure::numeric(e),
    }
}

pub fn riccati(path: &Path, lambda: Option<f64>, scan: Option<Vec<f64>>, root: usize) -> Result<Report, Failure> {
    let (t, q) = rooted(path, root)?;
    if let Some(lambda) = lambda {
        if !lambda.is_finite() {
            return Err(Failure::input("--lambda must be finite"));
        }
        let s = riccati_sweep(&t, &q, lambda).map_err(riccati_failure)?;
        let mut r = Report::new("riccati", &["vertex", "parent", "R", "n_less", "n_le"])
            .with_header("root", root)
            .with_header("lambda", fmt_real(lambda));
        let negative = |u: usize| s.values[u].is_negative();
        for v in 0..t.vertex_count() {
            let less = t.subtree(v).into_iter().filter(|&u| u != v && negative(u)).count();
            r.push_row(vec![
                (v + 1).to_string(),
                t.parent(v).map_or("-".into(), |p| (p + 1).to_string()),
                ext(s.values[v]),
                less.to_string(),
                (less + usize::from(negative(v))).to_string(),
            ]);
        }
        r.push_summary("eigenvalues_below", s.count_below());
        r.push_summary("root_value", ext(s.root_value));
        r.push_summary("nu_if_eigenvalue", s.n_less + 1);
        return Ok(r);
    }
    let ab = scan.expect("clap requires --lambda or --scan");
    let (a, b) = (ab[0], ab[1]);
    let found = locate_eigenvalues(&t, &q, a, b).map_err(riccati_failure)?;
    let offset = riccati_sweep(&t, &q, a).map_err(riccati_failure)?.count_below();
    let mut r = Report::new("riccati", &["n", "lambda", "nu"])
        .with_header("root", root)
        .with_header("scan", format!("{} {}", fmt_real(a), fmt_real(b)));
    for (i, &lambda) in found.iter().enumerate() {
        let nu = nodal_count_via_riccati(&t, &q, lambda).ok();
        r.push_row(vec![
            (offset + i + 1).to_string(),
            fmt_real(lambda),
            nu.map_or("-".into(), |n| n.to_string()),
        ]);
    }
    r.push_summary("eigenvalues", found.len());
    Ok(r)
}

pub fn counterexample(m: usize, edges: usize, offset: OffsetArg, tol: &Tolerances) -> Result<Report, Failure> {
    let offset = match offset {
        OffsetArg::Below => StarOffset::Below,
        OffsetArg::Above => StarOffset::Above,
    };
    let mg = build_star_counterexample(m, edges, offset).map_err(metric_failure)?;
    let k = m as f64 * PI;
    let expected = (m - 1) * (edges - 1) + 2;
    // scan past the expected index and take the eigenvalue nearest (mπ)²
    let pairs = find_lowest_with(&mg, expected + 2, tol).map_err(metric_failure)?;
    let pair = *pairs
        .iter()
        .min_by(|x, y| (x.k() - k).abs().total_cmp(&(y.k() - k).abs()))
        .expect("non-empty spectrum");
    let f = eigenfunctions(&mg, pair.lambda, 1).map_err(metric_failure)?.remove(0);
    let gen = check_metric_genericity(&mg, &pair, &f, tol);
    let nu = support_nodal_count_metric(&mg, &f, tol);
    let mut r = Report::new(
        "counterexample",
        &["n", "lambda", "k", "k_over_pi", "nu", "multiplicity", "generic", "flags"],
    )
    .with_header("m", m)
    .with_header("N", edges)
    .with_header("lengths", mg.lengths().iter().map(|l| l.to_string()).collect::<Vec<_>>().join(","))
    .with_tolerances(tol);
    r.push_row(vec![
        pair.n.to_string(),
        fmt_real(pair.lambda),
        fmt_real(pair.k()),
        fmt_real(pair.k() / PI),
        nu.to_string(),
        pair.multiplicity.to_string(),
        gen.generic.to_string(),
        genericity_flags(gen.simple, gen.nonvanishing),
    ]);
    r.push_summary("preceding_eigenvalues", pair.n - 1);
    r.push_summary("centre_vanishes", gen.vanishing_vertices.contains(&0));
    r.push_summary("k_error", fmt_real((pair.k() - k).abs()));
    Ok(r)
}

pub fn ensemble(path: &Path, seed: Option<u64>, overrides: (Option<f64>, Option<f64>)) -> Result<Report, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let mut cfg = EnsembleConfig::from_toml(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.tolerances = apply(cfg.tolerances, overrides);
    let rep = run_ensemble(&cfg).map_err(|e| match e {
        VerifyError::Config(_) => Failure::input(e),
        other => Failure::numeric(other),
    })?;
    Ok(ensemble_report(&rep))
}
