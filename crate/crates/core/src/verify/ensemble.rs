//! Seeded ensembles of random instances checked against the nodal bounds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cut::{metric_cut_audit, CutAudit};
use super::random::{max_cycle_dimension, random_connected_graph, Uniform};
use super::VerifyError;
use crate::discrete::{assemble_hamiltonian, eigen_decompose, reports_for, Potential};
use crate::metric::{
    check_metric_genericity, eigenfunctions, find_lowest_with, metric_nodal_count,
    support_nodal_count_metric, weyl_deviation, EdgePotential, MetricGraph, VertexCondition,
};
use crate::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Discrete,
    Metric,
}

fn default_length_law() -> Uniform {
    Uniform::new(0.5, 1.5)
}

fn default_budget() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub model: Model,
    pub instance_count: usize,
    /// Inclusive vertex count range.
    pub vertex_range: [usize; 2],
    /// Inclusive cycle dimension range, capped per instance by what a simple
    /// graph on the drawn vertex count allows.
    pub ell_range: [usize; 2],
    /// Vertex values (discrete) or one constant per edge (metric).
    pub potential_law: Uniform,
    #[serde(default = "default_length_law")]
    pub length_law: Uniform,
    /// Lowest eigenvalues examined per metric instance.
    #[serde(default = "default_budget")]
    pub eigenvalue_budget: usize,
    pub seed: u64,
    /// Run one cut experiment per metric instance with cycles.
    #[serde(default)]
    pub cut_audit: bool,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl EnsembleConfig {
    pub fn from_toml(text: &str) -> Result<Self, VerifyError> {
        let cfg: EnsembleConfig = toml::from_str(text).map_err(|e| VerifyError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), VerifyError> {
        let bad = |m: &str| Err(VerifyError::Config(m.to_string()));
        let [vlo, vhi] = self.vertex_range;
        let [llo, lhi] = self.ell_range;
        if vlo < 2 || vlo > vhi {
            return bad("vertex_range must satisfy 2 <= min <= max");
        }
        if llo > lhi {
            return bad("ell_range must satisfy min <= max");
        }
        if llo > max_cycle_dimension(vhi) {
            return bad("ell_range minimum exceeds what any simple graph in vertex_range allows");
        }
        if !self.potential_law.is_valid() {
            return bad("potential_law must be a finite interval lo <= hi");
        }
        if !self.length_law.is_valid() || self.length_law.lo <= 0.0 {
            return bad("length_law must be a finite interval 0 < lo <= hi");
        }
        if self.model == Model::Metric && self.eigenvalue_budget == 0 {
            return bad("eigenvalue_budget must be positive");
        }
        Ok(())
    }
}

/// One eigenpair of one instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub instance: usize,
    pub n: usize,
    pub lambda: f64,
    pub ell: usize,
    pub nu: usize,
    pub multiplicity: usize,
    pub generic: bool,
    pub lower_ok: bool,
    pub upper_ok: bool,
    /// Index of `λ_n` in the cut spectrum, for the pair used in a cut experiment.
    pub m: Option<usize>,
}

impl VerificationRecord {
    pub fn is_violation(&self) -> bool {
        self.generic && !(self.lower_ok && self.upper_ok)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub instance: usize,
    pub vertices: usize,
    pub edges: usize,
    pub ell: usize,
    /// Metric only: Weyl deviation of the computed eigenvalues.
    pub weyl_deviation: Option<f64>,
    /// Metric only: largest vertex residual over the eigenfunctions.
    pub max_residual: Option<f64>,
    pub cut: Option<CutAudit>,
    pub error: Option<String>,
}

impl InstanceSummary {
    /// Missed-root audit: deviation within `|V| + ℓ + 2`.
    pub fn weyl_ok(&self) -> bool {
        self.weyl_deviation
            .is_none_or(|d| d <= (self.vertices + self.ell + 2) as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub instances: usize,
    pub failed_instances: usize,
    pub pairs: usize,
    pub generic_pairs: usize,
    pub violations: usize,
    pub non_generic_rate: f64,
    /// Generic pairs on trees with `ν ≠ n`.
    pub tree_mismatches: usize,
    pub weyl_failures: usize,
    pub cut_failures: usize,
    /// Degenerate pairs with `ν > n + multiplicity − 1` (informational).
    pub courant_degenerate_exceed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub config: EnsembleConfig,
    pub records: Vec<VerificationRecord>,
    pub instances: Vec<InstanceSummary>,
    pub summary: EnsembleSummary,
}

/// The generator for instance `id`: the configured seed, stream `id`.
pub fn instance_rng(seed: u64, id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id as u64);
    rng
}

fn draw_shape(cfg: &EnsembleConfig, rng: &mut ChaCha8Rng) -> (usize, usize) {
    let [vlo, vhi] = cfg.vertex_range;
    let v = rng.random_range(vlo..=vhi);
    let [llo, lhi] = cfg.ell_range;
    let ell = rng.random_range(llo..=lhi).min(max_cycle_dimension(v));
    (v, ell)
}

/// Runs a discrete ensemble.
pub fn run_discrete_ensemble(cfg: &EnsembleConfig) -> Result<EnsembleReport, VerifyError> {
    if cfg.model != Model::Discrete {
        return Err(VerifyError::Config("run_discrete_ensemble needs model = \"discrete\"".into()));
    }
    cfg.validate()?;
    let results: Vec<_> = (0..cfg.instance_count)
        .into_par_iter()
        .map(|id| discrete_instance(cfg, id))
        .collect();
    Ok(assemble(cfg, results))
}

/// Runs a metric ensemble. Solver failures mark the instance and the run
/// continues.
pub fn run_metric_ensemble(cfg: &EnsembleConfig) -> Result<EnsembleReport, VerifyError> {
    if cfg.model != Model::Metric {
        return Err(VerifyError::Config("run_metric_ensemble needs model = \"metric\"".into()));
    }
    cfg.validate()?;
    let results: Vec<_> = (0..cfg.instance_count)
        .into_par_iter()
        .map(|id| metric_instance(cfg, id))
        .collect();
    Ok(assemble(cfg, results))
}

/// Dispatches on `cfg.model`.
pub fn run_ensemble(cfg: &EnsembleConfig) -> Result<EnsembleReport, VerifyError> {
    match cfg.model {
        Model::Discrete => run_discrete_ensemble(cfg),
        Model::Metric => run_metric_ensemble(cfg),
    }
}

type InstanceResult = (InstanceSummary, Vec<VerificationRecord>);

fn discrete_instance(cfg: &EnsembleConfig, id: usize) -> InstanceResult {
    let mut rng = instance_rng(cfg.seed, id);
    let (v, ell) = draw_shape(cfg, &mut rng);
    let g = random_connected_graph(&mut rng, v, ell);
    let q = Potential((0..v).map(|_| cfg.potential_law.sample(&mut rng)).collect());
    let mut summary = InstanceSummary {
        instance: id,
        vertices: v,
        edges: g.edge_count(),
        ell: g.cycle_dimension(),
        weyl_deviation: None,
        max_residual: None,
        cut: None,
        error: None,
    };
    let spectrum = match assemble_hamiltonian(&g, &q).and_then(|h| eigen_decompose(&h)) {
        Ok(s) => s,
        Err(e) => {
            summary.error = Some(e.to_string());
            return (summary, Vec::new());
        }
    };
    let gap = cfg.tolerances.gap_rel * spectrum.matrix_norm.max(1.0);
    let records = reports_for(&g, &spectrum, &cfg.tolerances)
        .into_iter()
        .map(|r| {
            let multiplicity = spectrum
                .eigenvalues
                .iter()
                .filter(|&&x| (x - r.lambda).abs() <= gap)
                .count();
            VerificationRecord {
                instance: id,
                n: r.n,
                lambda: r.lambda,
                ell: r.ell,
                nu: r.nu,
                multiplicity,
                generic: r.generic,
                lower_ok: r.lower_ok,
                upper_ok: r.upper_ok,
                m: None,
            }
        })
        .collect();
    (summary, records)
}

fn metric_instance(cfg: &EnsembleConfig, id: usize) -> InstanceResult {
    let mut rng = instance_rng(cfg.seed, id);
    let (v, ell) = draw_shape(cfg, &mut rng);
    let g = random_connected_graph(&mut rng, v, ell);
    let lengths: Vec<f64> = (0..g.edge_count()).map(|_| cfg.length_law.sample(&mut rng)).collect();
    let potentials: Vec<EdgePotential> = (0..g.edge_count())
        .map(|_| EdgePotential::constant(cfg.potential_law.sample(&mut rng)))
        .collect();
    let mut summary = InstanceSummary {
        instance: id,
        vertices: v,
        edges: g.edge_count(),
        ell: g.cycle_dimension(),
        weyl_deviation: None,
        max_residual: None,
        cut: None,
        error: None,
    };
    let conditions = vec![VertexCondition::Kirchhoff; v];
    let result = MetricGraph::new(g, lengths, conditions, potentials)
        .map_err(VerifyError::from)
        .and_then(|mg| metric_records(cfg, id, &mg, &mut rng, &mut summary));
    match result {
        Ok(records) => (summary, records),
        Err(e) => {
            summary.error = Some(e.to_string());
            (summary, Vec::new())
        }
    }
}

fn metric_records(
    cfg: &EnsembleConfig,
    id: usize,
    mg: &MetricGraph,
    rng: &mut ChaCha8Rng,
    summary: &mut InstanceSummary,
) -> Result<Vec<VerificationRecord>, VerifyError> {
    let tol = &cfg.tolerances;
    let ell = mg.graph().cycle_dimension();
    let pairs = find_lowest_with(mg, cfg.eigenvalue_budget, tol)?;
    let lambdas: Vec<f64> = pairs.iter().map(|p| p.lambda).collect();
    summary.weyl_deviation = Some(weyl_deviation(mg, &lambdas));

    let mut records = Vec::with_capacity(pairs.len());
    let mut max_residual: f64 = 0.0;
    let mut i = 0;
    while i < pairs.len() {
        let p = pairs[i];
        // a cluster shares one basis; the j-th pair takes the j-th vector
        let basis = eigenfunctions(mg, p.lambda, p.multiplicity)?;
        for (j, f) in basis.iter().enumerate().take(pairs.len() - i) {
            let q = pairs[i + j];
            max_residual = max_residual.max(f.residual(mg));
            let gen = check_metric_genericity(mg, &q, f, tol);
            let nu = if gen.generic {
                metric_nodal_count(mg, f, tol)?
            } else {
                support_nodal_count_metric(mg, f, tol)
            };
            records.push(VerificationRecord {
                instance: id,
                n: q.n,
                lambda: q.lambda,
                ell,
                nu,
                multiplicity: q.multiplicity,
                generic: gen.generic,
                lower_ok: nu + ell >= q.n,
                upper_ok: nu <= q.n,
                m: None,
            });
        }
        i += p.multiplicity.max(1);
    }
    summary.max_residual = Some(max_residual);

    if cfg.cut_audit && ell > 0 {
        if let Some(r) = records.iter().rev().find(|r| r.generic) {
            let audit = metric_cut_audit(mg, &pairs, r.n, rng, tol)?;
            let n = r.n;
            if let Some(rec) = records.iter_mut().find(|r| r.n == n) {
                rec.m = Some(audit.m);
            }
            summary.cut = Some(audit);
        }
    }
    Ok(records)
}

fn assemble(cfg: &EnsembleConfig, results: Vec<InstanceResult>) -> EnsembleReport {
    let mut records = Vec::new();
    let mut instances = Vec::with_capacity(results.len());
    for (s, r) in results {
        instances.push(s);
        records.extend(r);
    }
    let generic_pairs = records.iter().filter(|r| r.generic).count();
    let summary = EnsembleSummary {
        instances: instances.len(),
        failed_instances: instances.iter().filter(|s| s.error.is_some()).count(),
        pairs: records.len(),
        generic_pairs,
        violations: records.iter().filter(|r| r.is_violation()).count(),
        non_generic_rate: if records.is_empty() {
            0.0
        } else {
            (records.len() - generic_pairs) as f64 / records.len() as f64
        },
        tree_mismatches: records
            .iter()
            .filter(|r| r.generic && r.ell == 0 && r.nu != r.n)
            .count(),
        weyl_failures: instances.iter().filter(|s| !s.weyl_ok()).count(),
        cut_failures: instances
            .iter()
            .filter_map(|s| s.cut.as_ref())
            .filter(|c| !(c.m_ok() && c.interlacing.ok && c.max_a_sum <= 1e-9 && c.residual <= 1e-9))
            .count(),
        courant_degenerate_exceed: records
            .iter()
            .filter(|r| !r.generic && r.nu > r.n + r.multiplicity.max(1) - 1)
            .count(),
    };
    EnsembleReport {
        config: cfg.clone(),
        records,
        instances,
        summary,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn discrete_cfg() -> EnsembleConfig {
        EnsembleConfig {
            model: Model::Discrete,
            instance_count: 40,
            vertex_range: [4, 9],
            ell_range: [0, 3],
            potential_law: Uniform::new(-1.0, 1.0),
            length_law: default_length_law(),
            eigenvalue_budget: 10,
            seed: 1,
            cut_audit: false,
            tolerances: Tolerances::default(),
        }
    }

    #[test]
    fn toml_round_trip_and_validation() {
        let cfg = discrete_cfg();
        assert_eq!(EnsembleConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        let text = r#"
            model = "metric"
            instance_count = 3
            vertex_range = [2, 5]
            ell_range = [0, 1]
            potential_law = { lo = 0.0, hi = 0.0 }
            seed = 7
        "#;
        let m = EnsembleConfig::from_toml(text).unwrap();
        assert_eq!(m.eigenvalue_budget, 20);
        assert_eq!(m.length_law, Uniform::new(0.5, 1.5));
        let bad = text.replace("[2, 5]", "[5, 2]");
        assert!(matches!(EnsembleConfig::from_toml(&bad), Err(VerifyError::Config(_))));
        let unknown = format!("{text}\nextra = 1\n");
        assert!(EnsembleConfig::from_toml(&unknown).is_err());
    }

    #[test]
    fn discrete_ensemble_has_no_violations_and_is_deterministic() {
        let cfg = discrete_cfg();
        let a = run_discrete_ensemble(&cfg).unwrap();
        let b = run_discrete_ensemble(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.summary.violations, 0);
        assert_eq!(a.summary.tree_mismatches, 0);
        assert_eq!(a.summary.failed_instances, 0);
        assert!(a.summary.generic_pairs > 0);
    }

    #[test]
    fn single_edge_records() {
        let cfg = EnsembleConfig {
            instance_count: 1,
            vertex_range: [2, 2],
            ell_range: [0, 0],
            potential_law: Uniform::new(0.0, 0.0),
            ..discrete_cfg()
        };
        let r = run_discrete_ensemble(&cfg).unwrap();
        let got: Vec<(usize, usize)> = r.records.iter().map(|x| (x.n, x.nu)).collect();
        assert_eq!(got, vec![(1, 1), (2, 2)]);
    }

    #[test]
    fn single_edge_metric_is_sturm() {
        let cfg = EnsembleConfig {
            model: Model::Metric,
            instance_count: 2,
            vertex_range: [2, 2],
            ell_range: [0, 0],
            potential_law: Uniform::new(0.0, 0.0),
            eigenvalue_budget: 6,
            ..discrete_cfg()
        };
        let r = run_metric_ensemble(&cfg).unwrap();
        assert_eq!(r.records.len(), 12);
        assert!(r.records.iter().all(|x| x.generic && x.nu == x.n));
    }

    #[test]
    fn metric_graphs_with_cut_audit() {
        let cfg = EnsembleConfig {
            model: Model::Metric,
            instance_count: 6,
            vertex_range: [4, 7],
            ell_range: [1, 2],
            potential_law: Uniform::new(0.0, 0.0),
            eigenvalue_budget: 10,
            cut_audit: true,
            ..discrete_cfg()
        };
        let r = run_metric_ensemble(&cfg).unwrap();
        assert_eq!(r.summary.failed_instances, 0, "{:?}", r.instances);
        assert_eq!(r.summary.violations, 0);
        assert_eq!(r.summary.weyl_failures, 0);
        assert_eq!(r.summary.cut_failures, 0, "{:?}", r.instances);
        assert!(r.instances.iter().all(|s| s.cut.is_some()));
    }

    #[test]
    fn wrong_model_is_rejected() {
        assert!(run_metric_ensemble(&discrete_cfg()).is_err());
    }
}
