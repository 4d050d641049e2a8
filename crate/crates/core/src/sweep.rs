//! Seeded random instances and the batch checker behind the acceptance runs.
//!
//! Instance `i` of a sweep draws from its own ChaCha stream, so results do not depend
//! on how instances are split across workers. With the `parallel` feature the batch
//! runs on rayon; the sequential path is always available for comparison.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::certify::{
    self, brute_force_optimum, enumerate_optimal_vertices, verify_dominant, verify_dual,
    verify_half_integral, verify_matching, verify_optimal_pair, verify_tight_closure, LemmaReport,
};
use crate::error::{Error, Result};
use crate::instance::{Instance, InstanceFile, MatroidDef};
use crate::matroid::DEFAULT_FLAT_BUDGET;
use crate::polytope::MatchingPolytope;
use crate::rational::{self, from_usize, int, Rational};
use crate::weighted::{iteration_cap, solve_max_weight};

#[derive(Clone, Debug, Serialize)]
pub struct SweepConfig {
    pub seed: u64,
    pub count: usize,
    pub max_elements: usize,
    pub max_rank: usize,
    pub max_lines: usize,
    pub max_weight: u32,
    pub budget: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            seed: 1,
            count: 200,
            max_elements: 10,
            max_rank: 6,
            max_lines: 8,
            max_weight: 8,
            budget: DEFAULT_FLAT_BUDGET,
        }
    }
}

impl SweepConfig {
    /// Settings small enough for vertex enumeration.
    pub fn tiny(seed: u64, count: usize) -> Self {
        SweepConfig {
            seed,
            count,
            max_elements: 6,
            max_rank: 4,
            max_lines: 5,
            max_weight: 4,
            budget: DEFAULT_FLAT_BUDGET,
        }
    }

    fn rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }

    /// Instance `index`, cycling through uniform, free, graphic and GF(2) matroids.
    pub fn generate(&self, index: usize) -> InstanceFile {
        let mut rng = self.rng(index);
        let max_e = self.max_elements.max(1);
        let max_r = self.max_rank.max(1);
        let matroid = match index % 4 {
            0 => {
                let n = rng.random_range(1..=max_e);
                MatroidDef::Uniform {
                    n,
                    k: rng.random_range(1..=n.min(max_r)),
                }
            }
            1 => MatroidDef::Free {
                n: rng.random_range(1..=max_e.min(max_r)),
            },
            2 => {
                let vertices = rng.random_range(2..=max_r + 1);
                let m = rng.random_range(1..=max_e);
                let edges = (0..m)
                    .map(|_| {
                        let u = rng.random_range(0..vertices);
                        let v = (u + rng.random_range(1..vertices)) % vertices;
                        [u, v]
                    })
                    .collect();
                MatroidDef::Graphic { vertices, edges }
            }
            _ => {
                let rows = rng.random_range(1..=max_r);
                let m = rng.random_range(1..=max_e);
                let columns = (0..m)
                    .map(|_| {
                        let bits = rng.random_range(1..(1u32 << rows));
                        (0..rows).map(|r| ((bits >> r) & 1).to_string()).collect()
                    })
                    .collect();
                MatroidDef::LinearGf { p: 2, columns }
            }
        };
        let n = match &matroid {
            MatroidDef::Uniform { n, .. } | MatroidDef::Free { n } => *n,
            MatroidDef::Graphic { edges, .. } => edges.len(),
            MatroidDef::LinearGf { columns, .. } => columns.len(),
            _ => unreachable!("generator only emits four kinds"),
        };
        let count = rng.random_range(0..=self.max_lines);
        let lines = (0..count)
            .map(|_| {
                let a = rng.random_range(0..n);
                if n >= 2 && rng.random_bool(0.8) {
                    let b = (a + rng.random_range(1..n)) % n;
                    let mut pair = vec![a, b];
                    pair.sort_unstable();
                    pair
                } else {
                    vec![a]
                }
            })
            .collect();
        let weights = (0..count)
            .map(|_| rng.random_range(0..=self.max_weight).to_string())
            .collect();
        InstanceFile {
            matroid,
            lines,
            weights: Some(weights),
        }
    }
}

fn kind_of(file: &InstanceFile) -> &'static str {
    match file.matroid {
        MatroidDef::Uniform { .. } => "uniform",
        MatroidDef::Free { .. } => "free",
        MatroidDef::Graphic { .. } => "graphic",
        MatroidDef::LinearGf { .. } => "linear_gf",
        MatroidDef::LinearQ { .. } => "linear_q",
        MatroidDef::Partition { .. } => "partition",
    }
}

/// Per-instance results of the main sweep.
#[derive(Clone, Debug, Default, Serialize)]
pub struct InstanceOutcome {
    pub index: usize,
    pub kind: &'static str,
    pub ground: usize,
    pub rank: usize,
    pub lines: usize,
    pub objective: Option<String>,
    pub oracle: Option<String>,
    pub oracle_equal: bool,
    pub primal_feasible: bool,
    pub dual_feasible: bool,
    pub optimal_pair: bool,
    pub half_tdi: bool,
    pub lex_decreasing: bool,
    pub psi_bounded: bool,
    pub iterations: usize,
    pub within_cap: bool,
    pub error: Option<String>,
}

impl InstanceOutcome {
    pub fn passed(&self) -> bool {
        self.error.is_none()
            && self.oracle_equal
            && self.primal_feasible
            && self.dual_feasible
            && self.optimal_pair
            && self.half_tdi
            && self.lex_decreasing
            && self.psi_bounded
            && self.within_cap
    }
}

/// Solver, verifiers and oracle on one instance.
pub fn evaluate(config: &SweepConfig, index: usize) -> InstanceOutcome {
    let file = config.generate(index);
    let mut outcome = InstanceOutcome {
        index,
        kind: kind_of(&file),
        lines: file.lines.len(),
        ..InstanceOutcome::default()
    };
    if let Err(e) = evaluate_into(config, &file, &mut outcome) {
        outcome.error = Some(e.to_string());
    }
    outcome
}

fn evaluate_into(
    config: &SweepConfig,
    file: &InstanceFile,
    out: &mut InstanceOutcome,
) -> Result<()> {
    let Instance {
        matroid,
        lines,
        weights,
    } = file.build()?;
    let budget = config.budget;
    out.ground = matroid.ground_size();
    out.rank = matroid.full_rank();

    let solution = solve_max_weight(&matroid, &lines, &weights, budget)?;
    let objective = solution.objective(&weights);
    let oracle = brute_force_optimum(&matroid, &lines, &weights, false, budget)?
        .ok_or_else(|| Error::Internal("oracle reports an empty polytope".into()))?;
    out.objective = Some(rational::format(&objective));
    out.oracle = Some(rational::format(&oracle));
    out.oracle_equal = objective == oracle;
    out.primal_feasible = verify_matching(&matroid, &lines, &solution.matching, budget)?.passed();
    out.dual_feasible = verify_dual(&matroid, &lines, &weights, &solution.dual, false).passed();
    out.optimal_pair =
        verify_optimal_pair(&lines, &weights, &solution.matching, &solution.dual).passed();

    let y = MatchingPolytope::new(&matroid, &lines, budget)?.half_integer_dual(&weights)?;
    out.half_tdi = verify_half_integral(&y).passed()
        && y.rank() == oracle
        && verify_dual(&matroid, &lines, &weights, &y, false).passed();

    let r = out.rank;
    let trace = &solution.trace;
    out.iterations = trace.records.len();
    out.within_cap = out.iterations <= iteration_cap(r);
    out.lex_decreasing = trace.first_non_decrease(r).is_none();
    out.psi_bounded = trace.records.iter().all(|rec| rec.psi <= 4 * r * r);
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub passed: usize,
    pub failed: usize,
    pub oracle_equal: usize,
    pub instances: Vec<InstanceOutcome>,
}

impl SweepReport {
    fn new(config: &SweepConfig, instances: Vec<InstanceOutcome>) -> Self {
        let passed = instances.iter().filter(|o| o.passed()).count();
        SweepReport {
            config: config.clone(),
            passed,
            failed: instances.len() - passed,
            oracle_equal: instances.iter().filter(|o| o.oracle_equal).count(),
            instances,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

#[cfg(feature = "parallel")]
fn map_indices<T: Send>(count: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_indices<T: Send>(count: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..count).map(f).collect()
}

pub fn run_sweep_sequential(config: &SweepConfig) -> SweepReport {
    SweepReport::new(
        config,
        (0..config.count).map(|i| evaluate(config, i)).collect(),
    )
}

#[cfg(feature = "parallel")]
pub fn run_sweep_parallel(config: &SweepConfig) -> SweepReport {
    use rayon::prelude::*;
    SweepReport::new(
        config,
        (0..config.count)
            .into_par_iter()
            .map(|i| evaluate(config, i))
            .collect(),
    )
}

/// Parallel when the `parallel` feature is on, sequential otherwise.
pub fn run_sweep(config: &SweepConfig) -> SweepReport {
    SweepReport::new(config, map_indices(config.count, |i| evaluate(config, i)))
}

/// Vertex and dominant-cover checks on one tiny instance.
#[derive(Clone, Debug, Default, Serialize)]
pub struct TinyOutcome {
    pub index: usize,
    pub kind: &'static str,
    pub vertices: usize,
    pub half_integral: bool,
    /// Vertices with `|x| = r(cl(x))`.
    pub tight_literal: usize,
    /// Vertices with `2|x| = r(cl(x))`.
    pub tight_doubled: usize,
    pub dominant_valid: bool,
    pub dominant_failure: Option<serde_json::Value>,
    pub skipped: Option<String>,
    pub error: Option<String>,
}

impl TinyOutcome {
    pub fn evaluated(&self) -> bool {
        self.skipped.is_none() && self.error.is_none()
    }
}

pub fn evaluate_tiny(config: &SweepConfig, index: usize) -> TinyOutcome {
    let file = config.generate(index);
    let mut out = TinyOutcome {
        index,
        kind: kind_of(&file),
        ..TinyOutcome::default()
    };
    match evaluate_tiny_into(config, &file, &mut out) {
        Ok(()) => {}
        Err(Error::BudgetExceeded { what, cap }) if what.starts_with("vertex enumeration") => {
            out.skipped = Some(format!("{what} above {cap}"));
        }
        Err(e) => out.error = Some(e.to_string()),
    }
    out
}

fn evaluate_tiny_into(
    config: &SweepConfig,
    file: &InstanceFile,
    out: &mut TinyOutcome,
) -> Result<()> {
    let Instance {
        matroid,
        lines,
        weights,
    } = file.build()?;
    let budget = config.budget;
    let vertices = enumerate_optimal_vertices(&matroid, &lines, &weights, budget)?;
    out.vertices = vertices.len();
    out.half_integral = !vertices.is_empty() && vertices.iter().all(|v| v.is_half_integral());
    for v in &vertices {
        if let Some(cert) = verify_tight_closure(&matroid, &lines, v, budget)? {
            let w = cert.witness.unwrap_or_default();
            out.tight_literal += usize::from(w["literal"] == true);
            out.tight_doubled += usize::from(w["doubled"] == true);
        }
    }
    let polytope = MatchingPolytope::new(&matroid, &lines, budget)?;
    let cover = polytope.dominant_cover()?;
    let cert = verify_dominant(&matroid, &lines, &cover, budget)?;
    out.dominant_valid = cert.passed();
    out.dominant_failure = cert.violation;
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct TinyReport {
    pub evaluated: usize,
    pub skipped: usize,
    pub errors: usize,
    pub half_integral: usize,
    pub dominant_valid: usize,
    pub vertices: usize,
    pub tight_literal: usize,
    pub tight_doubled: usize,
    pub instances: Vec<TinyOutcome>,
}

/// Tiny instances until `config.count` were evaluated, skipping those beyond the
/// vertex-enumeration caps (at most `20 × count` draws).
pub fn run_tiny_sweep(config: &SweepConfig) -> TinyReport {
    let mut instances = Vec::new();
    let mut next = 0;
    let limit = config.count * 20;
    while instances
        .iter()
        .filter(|o: &&TinyOutcome| o.evaluated())
        .count()
        < config.count
        && next < limit
    {
        let missing = config.count
            - instances
                .iter()
                .filter(|o: &&TinyOutcome| o.evaluated())
                .count();
        let batch = map_indices(missing, |i| evaluate_tiny(config, next + i));
        next += missing;
        instances.extend(batch);
    }
    let ok: Vec<&TinyOutcome> = instances.iter().filter(|o| o.evaluated()).collect();
    TinyReport {
        evaluated: ok.len(),
        skipped: instances.iter().filter(|o| o.skipped.is_some()).count(),
        errors: instances.iter().filter(|o| o.error.is_some()).count(),
        half_integral: ok.iter().filter(|o| o.half_integral).count(),
        dominant_valid: ok.iter().filter(|o| o.dominant_valid).count(),
        vertices: ok.iter().map(|o| o.vertices).sum(),
        tight_literal: ok.iter().map(|o| o.tight_literal).sum(),
        tight_doubled: ok.iter().map(|o| o.tight_doubled).sum(),
        instances,
    }
}

/// Runs every structural check on `config.count` random matroids, `trials` each.
pub fn run_lemma_sweep(
    config: &SweepConfig,
    trials: usize,
) -> Result<BTreeMap<&'static str, LemmaReport>> {
    let per_instance = map_indices(config.count, |i| lemma_instance(config, i, trials));
    let mut totals: BTreeMap<&'static str, LemmaReport> = BTreeMap::new();
    for reports in per_instance {
        for report in reports? {
            totals
                .entry(report.name)
                .and_modify(|t| t.absorb(&report))
                .or_insert(report);
        }
    }
    Ok(totals)
}

fn lemma_instance(config: &SweepConfig, index: usize, trials: usize) -> Result<Vec<LemmaReport>> {
    let file = config.generate(index);
    let Instance {
        matroid, mut lines, ..
    } = file.build()?;
    let mut rng = config.rng(index ^ (1 << 40));
    lines.extend(certify::random_lines(&matroid, 4, &mut rng));
    let flats = matroid.enumerate_flats(config.budget)?;
    Ok(vec![
        certify::check_submodularity(&matroid, &flats, trials, &mut rng),
        certify::check_supermodularity(&matroid, &flats, &lines, trials, &mut rng),
        certify::check_star_rank(&matroid, &flats, trials, &mut rng)?,
        certify::check_degree_identity(&matroid, &flats, &lines, trials, &mut rng),
        certify::check_lift(
            &matroid,
            &flats,
            &lines,
            trials.div_ceil(4),
            config.budget,
            &mut rng,
        )?,
        certify::check_psi1(&matroid, &flats, trials, &mut rng),
        certify::check_psi2(&matroid, &flats, trials, &mut rng),
        certify::check_composition(&matroid, &flats, trials, &mut rng)?,
    ])
}

/// `ν*` and `r(E) − 2ν*`, for quick summaries.
pub fn deficiency(instance: &Instance, budget: usize) -> Result<(Rational, Rational)> {
    let (_, nu) =
        MatchingPolytope::new(&instance.matroid, &instance.lines, budget)?.max_size_matching()?;
    let gap = from_usize(instance.matroid.full_rank()) - &nu * int(2);
    Ok((nu, gap))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic_and_bounded() {
        let config = SweepConfig::default();
        for i in 0..40 {
            let a = config.generate(i);
            assert_eq!(a, config.generate(i));
            let inst = a.build().unwrap();
            assert!(inst.matroid.ground_size() <= 10);
            assert!(inst.matroid.full_rank() <= 6);
            assert!(inst.lines.len() <= 8);
            assert!(inst.weights.iter().all(|w| *w <= int(8)));
        }
        let kinds: Vec<&str> = (0..4).map(|i| kind_of(&config.generate(i))).collect();
        assert_eq!(kinds, ["uniform", "free", "graphic", "linear_gf"]);
    }

    #[test]
    fn small_sweep_passes() {
        let config = SweepConfig {
            count: 12,
            ..SweepConfig::default()
        };
        let report = run_sweep(&config);
        for o in &report.instances {
            assert!(o.passed(), "{o:?}");
        }
        let sequential = run_sweep_sequential(&config);
        assert_eq!(
            serde_json::to_string(&sequential).unwrap(),
            serde_json::to_string(&report).unwrap()
        );
    }

    #[test]
    fn tiny_sweep_runs() {
        let report = run_tiny_sweep(&SweepConfig::tiny(3, 6));
        assert_eq!(report.evaluated, 6);
        assert_eq!(report.half_integral, 6);
        assert_eq!(report.dominant_valid, 6, "{:?}", report.instances);
    }
}
