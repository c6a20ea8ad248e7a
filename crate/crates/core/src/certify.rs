//! Equivalence suite on a discretized domain: hull compactness, exhaustion, sublevel
//! polygons and a completeness witness, classified together.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::chain::CompactChain;
use crate::error::{Error, Result};
use crate::exhaustion::{
    build_exhaustion_components, build_exhaustion_cone, build_exhaustion_symmetric, cone_bound_violations,
    polygon_exhaustion, properness_check, ComponentPart, Construction, ConstructionFailure, ExhaustionFunction,
    ExhaustionPath, ProperReport,
};
use crate::families::{FunctionFamily, Point, Structure};
use crate::grid::Grid;
use crate::hull::{first_member, power_trick_refine, HullMode, HullProblem, PowerTrickReport};
use crate::scenario::{Scenario, ScenarioOptions};

pub const REPORT_VERSION: u32 = 1;

/// Largest family used by the degree-sweep trace.
const TRACE_MAX_FAMILY: usize = 161;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StageVerdict {
    Pass,
    Fail,
    /// Not run because an earlier stage produced nothing to work on.
    Skipped,
    /// The stage does not apply to this family.
    NotApplicable,
}

impl StageVerdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            StageVerdict::Pass
        } else {
            StageVerdict::Fail
        }
    }

    pub fn failed(self) -> bool {
        matches!(self, StageVerdict::Fail | StageVerdict::Skipped)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Consistent,
    Inconsistent,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Classification::Consistent => "consistent",
            Classification::Inconsistent => "inconsistent",
        })
    }
}

/// Consistent exactly when no stage failed or was skipped.
pub fn classify(verdicts: [StageVerdict; 4]) -> Classification {
    if verdicts.iter().any(|v| v.failed()) {
        Classification::Inconsistent
    } else {
        Classification::Consistent
    }
}

/// One (component, chain set, C) hull search over the margin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompactCheck {
    pub component: usize,
    pub set: usize,
    #[serde(rename = "C")]
    pub c: f64,
    pub mode: HullMode,
    pub degree: Option<u32>,
    pub sample_count: usize,
    pub margin_candidates: usize,
    pub escaped: bool,
}

/// A margin point inside the hull of a chain set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Escape {
    pub component: usize,
    pub set: usize,
    #[serde(rename = "C")]
    pub c: f64,
    pub mode: HullMode,
    pub degree: Option<u32>,
    pub point: usize,
    pub coords: Vec<f64>,
    /// Nonzero barycentric weights (sample index, weight) when the LP produced them.
    pub weights: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HullCompactness {
    pub pass: bool,
    pub checks: Vec<CompactCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub escape: Option<Escape>,
    /// Degree sweep at the outermost margin point (algebra families in one variable).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<PowerTrickReport>,
}

fn hull_setup(
    scenario: &Scenario,
    component: usize,
    c: f64,
    opts: &ScenarioOptions,
) -> Result<(FunctionFamily, HullMode, Option<u32>)> {
    let family = &scenario.families[component];
    let degree = family.max_degree();
    Ok(match family.structure() {
        Structure::ConeSample => (family.clone(), HullMode::Cone, None),
        _ if c == 1.0 => (family.clone(), HullMode::Linear, degree),
        Structure::AlgebraRealParts => {
            let d = degree.unwrap_or(1).max(opts.max_degree_sweep.unwrap_or(0));
            let gen = scenario.generator(component).ok_or_else(|| Error::invalid("algebra family without generator"))?;
            (gen.at(d)?, HullMode::Modulus, Some(d))
        }
        Structure::LinearSpan => (family.clone(), HullMode::C, None),
    })
}

/// Searches, for every chain set and constant, for a margin point inside the hull.
///
/// C = 1 uses the LP hull of the family. For C > 1 an algebra family is tested in modulus
/// form at the sweep degree, where the C-hulls have shrunk towards the C = 1 hull; a span
/// of affine functions uses the C-mode LP.
pub fn fconvexity_certify(scenario: &Scenario, cs: &[f64], tol: f64) -> Result<HullCompactness> {
    let opts = scenario.options();
    let grid = &scenario.grid;
    let mut checks = Vec::new();
    let mut escape = None;
    'outer: for (component, chain) in scenario.chains.iter().enumerate() {
        let margin: Vec<usize> = grid.component_indices(component).into_iter().filter(|&j| grid.is_margin(j)).collect();
        for i in 1..=chain.len() {
            let s = chain.points(grid, i);
            for &c in cs {
                let (family, mode, degree) = hull_setup(scenario, component, c, opts)?;
                let problem = HullProblem::new(&family, &s, mode, c, tol)?;
                let hit = first_member(&problem, grid, &margin)?;
                checks.push(CompactCheck {
                    component,
                    set: i,
                    c,
                    mode,
                    degree,
                    sample_count: s.len(),
                    margin_candidates: margin.len(),
                    escaped: hit.is_some(),
                });
                if let Some((point, verdict)) = hit {
                    let weights = verdict
                        .coefficients
                        .map(|w| w.into_iter().enumerate().filter(|(_, x)| *x > tol).collect())
                        .unwrap_or_default();
                    escape = Some(Escape {
                        component,
                        set: i,
                        c,
                        mode,
                        degree,
                        point,
                        coords: grid.point(point).coords().to_vec(),
                        weights,
                    });
                    break 'outer;
                }
            }
        }
    }
    let trace = degree_trace(scenario, cs, tol)?;
    Ok(HullCompactness { pass: escape.is_none(), checks, escape, trace })
}

fn degree_trace(scenario: &Scenario, cs: &[f64], tol: f64) -> Result<Option<PowerTrickReport>> {
    let family = scenario.family();
    let (Some(gen), Some(d0)) = (scenario.generator(0), family.max_degree()) else {
        return Ok(None);
    };
    if gen.n_complex != 1 || cs.iter().all(|&c| c == 1.0) {
        return Ok(None);
    }
    let per_degree = family.len().saturating_sub(1) as f64 / d0 as f64;
    let cap = ((TRACE_MAX_FAMILY - 1) as f64 / per_degree).floor() as u32;
    let d_max = scenario.options().max_degree_sweep.unwrap_or(d0).min(cap);
    if d_max < d0 {
        return Ok(None);
    }
    let grid = &scenario.grid;
    let chain = &scenario.chains[0];
    let center = grid.center(0);
    let Some(omega) = grid
        .component_indices(0)
        .into_iter()
        .filter(|&j| grid.is_margin(j))
        .max_by(|&a, &b| grid.point(a).distance(center).total_cmp(&grid.point(b).distance(center)).then(b.cmp(&a)))
    else {
        return Ok(None);
    };
    let s = chain.points(grid, chain.len());
    let report = power_trick_refine(&gen, &s, grid.point(omega), cs, d0, d_max, tol)?;
    Ok(Some(report))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExhaustionStage {
    pub verdict: StageVerdict,
    pub path: ExhaustionPath,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<ConstructionFailure>,
    pub levels: usize,
    pub level_guarantees_hold: bool,
    pub properness: Vec<ProperReport>,
    pub cone_bound_violations: usize,
}

/// Chooses the exhaustion path: components for several components, cone for cone samples,
/// symmetric otherwise.
pub fn auto_path(scenario: &Scenario) -> ExhaustionPath {
    if let Some(p) = scenario.options().path {
        p
    } else if scenario.grid.component_count() > 1 {
        ExhaustionPath::Components
    } else if scenario.family().structure() == Structure::ConeSample {
        ExhaustionPath::Cone
    } else {
        ExhaustionPath::Symmetric
    }
}

/// Runs one exhaustion construction on a scenario.
pub fn build_exhaustion(scenario: &Scenario, path: ExhaustionPath) -> Result<Construction> {
    let opts = &scenario.options().exhaustion;
    let grid = &scenario.grid;
    match path {
        ExhaustionPath::Components => {
            let parts: Vec<ComponentPart<'_>> = scenario
                .chains
                .iter()
                .zip(&scenario.families)
                .map(|(chain, family)| ComponentPart { family, chain })
                .collect();
            build_exhaustion_components(grid, &parts, opts)
        }
        single => {
            if grid.component_count() != 1 {
                return Err(Error::invalid(format!(
                    "the {single:?} path needs a single-component grid; use the components path"
                )));
            }
            let (family, chain) = (&scenario.families[0], &scenario.chains[0]);
            if single == ExhaustionPath::Symmetric {
                build_exhaustion_symmetric(family, grid, chain, opts)
            } else {
                build_exhaustion_cone(family, grid, chain, opts)
            }
        }
    }
}

fn exhaustion_stage(scenario: &Scenario, path: ExhaustionPath, built: &Construction) -> Result<ExhaustionStage> {
    let grid = &scenario.grid;
    let Some(p) = built.built() else {
        return Ok(ExhaustionStage {
            verdict: StageVerdict::Fail,
            path,
            failure: built.failure().cloned(),
            levels: 0,
            level_guarantees_hold: false,
            properness: Vec::new(),
            cone_bound_violations: 0,
        });
    };
    let values = p.eval_grid(grid)?;
    let properness: Vec<ProperReport> = scenario
        .chains
        .iter()
        .map(|chain| properness_check(&values, chain, grid, chain.len().saturating_sub(3)))
        .collect();
    let cone_bound = if path == ExhaustionPath::Symmetric {
        0
    } else {
        let mut shifted = values.clone();
        for (j, v) in shifted.iter_mut().enumerate() {
            if path == ExhaustionPath::Components {
                *v -= (grid.component(j) + 1) as f64;
            }
        }
        scenario.chains.iter().map(|chain| cone_bound_violations(&shifted, chain, grid).len()).sum()
    };
    let level_ok = p.level_reports.iter().all(|r| r.ok);
    let ok = level_ok && properness.iter().all(|r| r.pass) && cone_bound == 0;
    Ok(ExhaustionStage {
        verdict: StageVerdict::from_bool(ok),
        path,
        failure: None,
        levels: p.levels.len(),
        level_guarantees_hold: level_ok,
        properness,
        cone_bound_violations: cone_bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolygonStage {
    pub verdict: StageVerdict,
    pub count: usize,
    /// Number of leading polygons whose compactness and nesting are asserted.
    pub asserted: usize,
    pub sizes: Vec<usize>,
    pub constraint_counts: Vec<usize>,
    pub touches_margin: Vec<bool>,
    /// Nesting holds for every asserted polygon.
    pub nested: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Polygons `P_1..P_count` are built; compactness (no margin point) and nesting into the
/// margin-interior of `P_{i+1}` are asserted for `i ≤ proper`, the range where the chain
/// controls the sublevels.
fn polygon_stage(p: Option<&ExhaustionFunction>, grid: &Grid, count: usize, proper: usize) -> Result<PolygonStage> {
    let empty = |verdict, error| PolygonStage {
        verdict,
        count,
        asserted: proper.min(count),
        sizes: Vec::new(),
        constraint_counts: Vec::new(),
        touches_margin: Vec::new(),
        nested: false,
        error,
    };
    let Some(p) = p else {
        return Ok(empty(StageVerdict::Skipped, None));
    };
    let polys = match polygon_exhaustion(p, grid, count) {
        Ok(polys) => polys,
        Err(Error::InvalidParameter(m)) => return Ok(empty(StageVerdict::Fail, Some(m))),
        Err(e) => return Err(e),
    };
    let asserted = proper.min(count);
    let touches: Vec<bool> = polys.polygons.iter().map(|q| q.touches_margin).collect();
    let compact = !touches.iter().take(asserted).any(|&t| t);
    let nested = polys.nesting_violations.iter().all(|&(i, _)| i > asserted);
    let ok = asserted > 0 && compact && nested;
    Ok(PolygonStage {
        verdict: StageVerdict::from_bool(ok),
        count,
        asserted,
        sizes: polys.polygons.iter().map(|q| q.members.len()).collect(),
        constraint_counts: polys.polygons.iter().map(|q| q.constraints.len()).collect(),
        touches_margin: touches,
        nested,
        error: None,
    })
}

/// One term `a_j = 2^{-j} Re(θ (b / M_j)^k)` of the witness series.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessTerm {
    pub j: usize,
    /// Chain index of the compact K_j (after window shifts).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compact: Option<usize>,
    pub monomial: usize,
    pub description: String,
    pub target: Vec<f64>,
    /// `M_j = max|b|(K_j)`.
    pub compact_max: f64,
    /// Argument of θ.
    pub phase: f64,
    pub power: u32,
    /// Measured `max|a_j|(K_j)`, at most `2^{-j}`.
    pub sup_on_compact: f64,
    pub value_at_target: f64,
    /// `j + Σ_{i<j} |a_i(ω_j)|`, which `value_at_target` exceeds.
    pub required: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub degree: Option<u32>,
    pub terms: Vec<WitnessTerm>,
    pub shifts: Vec<String>,
    #[serde(skip)]
    family: Option<FunctionFamily>,
}

impl Witness {
    pub fn empty() -> Self {
        Witness { degree: None, terms: Vec::new(), shifts: Vec::new(), family: None }
    }

    fn term_at(&self, term: &WitnessTerm, omega: &Point) -> Result<f64> {
        let family = self.family.as_ref().ok_or_else(|| Error::invalid("witness has no family"))?;
        let b = family.monomial(term.monomial, omega)?;
        Ok(term_value(b, term.compact_max, term.power, term.phase, term.j))
    }

    /// Partial sum of the first `upto` terms.
    pub fn eval(&self, omega: &Point, upto: usize) -> Result<f64> {
        self.terms.iter().take(upto).map(|t| self.term_at(t, omega)).sum()
    }

    pub fn eval_all(&self, omega: &Point) -> Result<f64> {
        self.eval(omega, self.terms.len())
    }
}

/// `2^{-j} (|b|/M)^k cos(k arg b + phase)`, in log form to avoid overflow.
fn term_value(b: Complex64, m: f64, k: u32, phase: f64, j: usize) -> f64 {
    let r = b.norm();
    if r == 0.0 {
        return 0.0;
    }
    let log_mag = k as f64 * (r.ln() - m.ln()) - j as f64 * std::f64::consts::LN_2;
    log_mag.exp() * (k as f64 * b.arg() + phase).cos()
}

/// Builds the witness series for compacts `K_j = compacts[j-1]` and targets
/// `ω_j = sequence[j-1]`, j = 1..=j_max.
pub fn witness_build_sets(
    family: &FunctionFamily,
    compacts: &[Vec<Point>],
    sequence: &[Point],
    j_max: usize,
    k_cap: u32,
    tol: f64,
) -> Result<Witness> {
    if family.structure() != Structure::AlgebraRealParts {
        return Err(Error::invalid("witness series needs an algebra family"));
    }
    if compacts.len() < j_max || sequence.len() < j_max {
        return Err(Error::invalid(format!(
            "need {j_max} compacts and targets, got {} and {}",
            compacts.len(),
            sequence.len()
        )));
    }
    let mut w = Witness { degree: family.max_degree(), terms: Vec::with_capacity(j_max), shifts: Vec::new(), family: Some(family.clone()) };
    for j in 1..=j_max {
        let k_set = &compacts[j - 1];
        let omega = &sequence[j - 1];
        let verdict = HullProblem::new(family, k_set, HullMode::Modulus, 1.0, tol)?.query(omega)?;
        let cert = match (&verdict.member, verdict.certificate) {
            (false, Some(cert)) => cert,
            _ => {
                return Err(Error::invalid(format!(
                    "step {j}: target lies in the modulus hull of K_{j} at degree {:?}; no monomial separates it (a higher degree is needed)",
                    family.max_degree()
                )))
            }
        };
        let monomial = cert.monomial.ok_or_else(|| Error::invalid("modulus certificate without monomial"))?;
        let m = cert.sup_over_s;
        let b_target = family.monomial(monomial, omega)?;
        let rho = b_target.norm() / m;
        let mut required = j as f64;
        for t in &w.terms {
            required += w.term_at(t, omega)?.abs();
        }
        let needed = (required * 2f64.powi(j as i32)).ln() / rho.ln();
        let start = (needed.floor() as i64 - 1).clamp(1, k_cap as i64) as u32;
        let mut found = None;
        for k in start..=k_cap {
            let phase = -(k as f64) * b_target.arg();
            if term_value(b_target, m, k, phase, j) > required {
                found = Some((k, phase));
                break;
            }
        }
        let (power, phase) = found.ok_or_else(|| {
            Error::invalid(format!("step {j}: power search cap k <= {k_cap} exceeded (about {} needed)", needed.ceil()))
        })?;
        let mut term = WitnessTerm {
            j,
            compact: None,
            monomial,
            description: family.describe_monomial(monomial),
            target: omega.coords().to_vec(),
            compact_max: m,
            phase,
            power,
            sup_on_compact: 0.0,
            value_at_target: 0.0,
            required,
        };
        let mut sup: f64 = 0.0;
        for p in k_set {
            sup = sup.max(w.term_at(&term, p)?.abs());
        }
        term.sup_on_compact = sup;
        term.value_at_target = w.term_at(&term, omega)?;
        let bound = 0.5f64.powi(j as i32);
        if sup > bound * (1.0 + 1e-12) || !(term.value_at_target > required) {
            return Err(Error::Indeterminate(format!("step {j}: witness term violates its bounds")));
        }
        w.terms.push(term);
    }
    Ok(w)
}

/// Boundary sequence picked from a chain: ω_j is a point of the next chain set outside the
/// modulus hull of the current one, farthest from it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Escalator {
    pub points: Vec<usize>,
    /// Chain index of the compact each point escapes from.
    pub compacts: Vec<usize>,
    pub shifts: Vec<String>,
}

pub fn escalator(grid: &Grid, chain: &CompactChain, family: &FunctionFamily, tol: f64) -> Result<Escalator> {
    let n = chain.len();
    let mut out = Escalator { points: Vec::new(), compacts: Vec::new(), shifts: Vec::new() };
    let mut a = 1;
    while a < n {
        let inner = chain.points(grid, a);
        let problem = HullProblem::new(family, &inner, HullMode::Modulus, 1.0, tol)?;
        let mut found = None;
        for b in a + 1..=n {
            let mut best: Option<(f64, usize)> = None;
            for j in chain.shell(a, b) {
                if problem.query(grid.point(j))?.member {
                    continue;
                }
                let p = grid.point(j);
                let d = inner.iter().map(|q| q.distance(p)).fold(f64::INFINITY, f64::min);
                let better = match best {
                    None => true,
                    Some((bd, bj)) => d > bd || (d == bd && lex_less(p, grid.point(bj))),
                };
                if better {
                    best = Some((d, j));
                }
            }
            if let Some((_, j)) = best {
                found = Some((b, j));
                break;
            }
            out.shifts.push(format!("K_{b} lies in the hull of K_{a}; window shifted to K_{}", b + 1));
        }
        let Some((b, j)) = found else { break };
        out.points.push(j);
        out.compacts.push(a);
        a = b;
    }
    Ok(out)
}

fn lex_less(p: &Point, q: &Point) -> bool {
    for (a, b) in p.coords().iter().zip(q.coords()) {
        match a.total_cmp(b) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    false
}

/// Builds the witness on a scenario from the given boundary sequence, or from the chain's
/// escalator when none is given (component 0).
pub fn witness_build(scenario: &Scenario, boundary: Option<&[Point]>, j_max: Option<usize>) -> Result<Witness> {
    let grid = &scenario.grid;
    let chain = &scenario.chains[0];
    let opts = scenario.options();
    let gen = scenario.generator(0).ok_or_else(|| Error::invalid("witness series needs an algebra family"))?;
    let degree = opts.witness_degree.unwrap_or_else(|| scenario.family().max_degree().unwrap_or(1));
    let family = gen.at(degree)?;
    let (compacts, sequence, indices, shifts) = match boundary {
        Some(seq) => {
            let compacts: Vec<Vec<Point>> = (1..=chain.len()).map(|i| chain.points(grid, i)).collect();
            (compacts, seq.to_vec(), None, Vec::new())
        }
        None => {
            let esc = escalator(grid, chain, &family, opts.tol)?;
            let compacts = esc.compacts.iter().map(|&a| chain.points(grid, a)).collect();
            let seq = esc.points.iter().map(|&j| grid.point(j).clone()).collect();
            (compacts, seq, Some(esc.compacts), esc.shifts)
        }
    };
    let j_max = j_max.unwrap_or(sequence.len().min(compacts.len()));
    let mut w = witness_build_sets(&family, &compacts, &sequence, j_max, opts.k_cap, opts.tol)?;
    if let Some(idx) = indices {
        for (t, &a) in w.terms.iter_mut().zip(&idx) {
            t.compact = Some(a);
        }
    } else {
        for t in &mut w.terms {
            t.compact = Some(t.j);
        }
    }
    w.shifts = shifts;
    Ok(w)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergenceRow {
    pub j: usize,
    pub value: f64,
    pub bound: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergenceReport {
    pub rows: Vec<DivergenceRow>,
    pub pass: bool,
}

/// Checks `a(ω_j) ≥ j − 2^{-j}` for the full witness along the targets it was built on.
pub fn divergence_check(witness: &Witness, sequence: &[Point], tol: f64) -> Result<DivergenceReport> {
    let mut rows = Vec::new();
    for (idx, term) in witness.terms.iter().enumerate() {
        let omega = sequence.get(idx).ok_or_else(|| Error::invalid("sequence shorter than the witness"))?;
        let value = witness.eval_all(omega)?;
        let bound = term.j as f64 - 0.5f64.powi(term.j as i32);
        rows.push(DivergenceRow { j: term.j, value, bound, ok: value >= bound - tol });
    }
    let pass = rows.iter().all(|r| r.ok);
    Ok(DivergenceReport { rows, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessStage {
    pub verdict: StageVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence: Option<DivergenceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn witness_stage(scenario: &Scenario) -> Result<WitnessStage> {
    if scenario.family().structure() != Structure::AlgebraRealParts {
        return Ok(WitnessStage { verdict: StageVerdict::NotApplicable, witness: None, divergence: None, error: None });
    }
    let w = match witness_build(scenario, None, None) {
        Ok(w) => w,
        Err(Error::InvalidParameter(m)) => {
            return Ok(WitnessStage { verdict: StageVerdict::Fail, witness: None, divergence: None, error: Some(m) })
        }
        Err(e) => return Err(e),
    };
    let sequence: Vec<Point> = w.terms.iter().map(|t| Point::new(t.target.clone(), scenario.grid.dim())).collect::<Result<_>>()?;
    let div = divergence_check(&w, &sequence, scenario.options().tol)?;
    let ok = div.pass && !w.terms.is_empty();
    Ok(WitnessStage { verdict: StageVerdict::from_bool(ok), witness: Some(w), divergence: Some(div), error: None })
}

/// Agreement of the hull and exhaustion signals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Coherence {
    /// Hull compactness and exhaustion construction agree (both pass or both fail).
    pub agree: bool,
    pub dual_failure: bool,
    /// Uncovered exhaustion points tested for membership in the hull of the level's compact.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shared: Option<SharedPoints>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SharedPoints {
    pub level: usize,
    pub checked: usize,
    pub in_hull: usize,
}

fn shared_points(scenario: &Scenario, failure: &ConstructionFailure, tol: f64) -> Result<Option<SharedPoints>> {
    if failure.points.is_empty() {
        return Ok(None);
    }
    let component = failure.component.unwrap_or(0);
    let chain = &scenario.chains[component];
    let family = &scenario.families[component];
    let mode = if family.structure() == Structure::ConeSample { HullMode::Cone } else { HullMode::Linear };
    let s = chain.points(&scenario.grid, failure.level);
    let problem = HullProblem::new(family, &s, mode, 1.0, tol)?;
    let take = 16.min(failure.points.len());
    let step = failure.points.len() / take;
    let mut in_hull = 0;
    for k in 0..take {
        if problem.query(scenario.grid.point(failure.points[k * step]))?.member {
            in_hull += 1;
        }
    }
    Ok(Some(SharedPoints { level: failure.level, checked: take, in_hull }))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HullStage {
    pub verdict: StageVerdict,
    #[serde(flatten)]
    pub detail: HullCompactness,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Stages {
    pub hull_compactness: HullStage,
    pub exhaustion: ExhaustionStage,
    pub polygons: PolygonStage,
    pub witness: WitnessStage,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSummary {
    pub name: String,
    pub points: usize,
    pub margin_points: usize,
    pub components: usize,
    pub cell: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilySummary {
    pub size: usize,
    pub max_degree: Option<u32>,
    pub laurent: bool,
    pub fingerprint: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertReport {
    pub version: u32,
    pub scenario: String,
    pub grid: GridSummary,
    pub family: FamilySummary,
    pub chain_lengths: Vec<usize>,
    pub options: ScenarioOptions,
    pub stages: Stages,
    pub coherence: Coherence,
    pub classification: Classification,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
}

impl CertReport {
    pub fn verdicts(&self) -> [StageVerdict; 4] {
        [
            self.stages.hull_compactness.verdict,
            self.stages.exhaustion.verdict,
            self.stages.polygons.verdict,
            self.stages.witness.verdict,
        ]
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Runs the four stages in order and classifies the outcome.
pub fn cartan_thullen_report(scenario: &Scenario) -> Result<CertReport> {
    let opts = scenario.options();
    let grid = &scenario.grid;
    let hull = fconvexity_certify(scenario, &opts.cs, opts.tol).map_err(|e| Error::in_stage("hull_compactness", e))?;
    let path = auto_path(scenario);
    let built = build_exhaustion(scenario, path).map_err(|e| Error::in_stage("exhaustion", e))?;
    let exhaustion = exhaustion_stage(scenario, path, &built).map_err(|e| Error::in_stage("exhaustion", e))?;
    let proper = scenario.chains.iter().map(|c| c.len().saturating_sub(3)).min().unwrap_or(0);
    let polygons = polygon_stage(built.built(), grid, opts.polygon_count, proper).map_err(|e| Error::in_stage("polygons", e))?;
    let witness = witness_stage(scenario).map_err(|e| Error::in_stage("witness", e))?;
    let hull_verdict = StageVerdict::from_bool(hull.pass);
    let shared = match built.failure() {
        Some(f) => shared_points(scenario, f, opts.tol).map_err(|e| Error::in_stage("coherence", e))?,
        None => None,
    };
    let coherence = Coherence {
        agree: hull_verdict.failed() == exhaustion.verdict.failed(),
        dual_failure: hull_verdict.failed() && exhaustion.verdict.failed(),
        shared,
    };
    let stages = Stages { hull_compactness: HullStage { verdict: hull_verdict, detail: hull }, exhaustion, polygons, witness };
    let family = scenario.family();
    let mut report = CertReport {
        version: REPORT_VERSION,
        scenario: scenario.name().to_string(),
        grid: GridSummary {
            name: grid.name().to_string(),
            points: grid.len(),
            margin_points: grid.margin_indices().len(),
            components: grid.component_count(),
            cell: grid.cell(),
        },
        family: FamilySummary {
            size: family.len(),
            max_degree: family.max_degree(),
            laurent: family.laurent(),
            fingerprint: family.fingerprint(),
        },
        chain_lengths: scenario.chains.iter().map(|c| c.len()).collect(),
        options: opts.clone(),
        stages,
        coherence,
        classification: Classification::Consistent,
        expected: scenario.file.expected.clone(),
    };
    report.classification = classify(report.verdicts());
    Ok(report)
}

/// Plain-text rendering of a report.
pub fn render_text(r: &CertReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "scenario: {}", r.scenario);
    let _ = writeln!(
        s,
        "grid: {} ({} points, {} margin, {} component(s), cell {})",
        r.grid.name, r.grid.points, r.grid.margin_points, r.grid.components, r.grid.cell
    );
    let _ = writeln!(
        s,
        "family: {} functions, degree {}, fingerprint {}",
        r.family.size,
        r.family.max_degree.map_or("-".to_string(), |d| d.to_string()),
        r.family.fingerprint
    );
    let verdict = |v: StageVerdict| match v {
        StageVerdict::Pass => "pass",
        StageVerdict::Fail => "FAIL",
        StageVerdict::Skipped => "skipped",
        StageVerdict::NotApplicable => "n/a",
    };
    let h = &r.stages.hull_compactness;
    let _ = writeln!(s, "[1] hull compactness: {} ({} searches)", verdict(h.verdict), h.detail.checks.len());
    if let Some(e) = &h.detail.escape {
        let _ = writeln!(
            s,
            "    escape: hull of K_{} at C = {} ({} mode) contains margin point #{} {:?}",
            e.set, e.c, e.mode, e.point, e.coords
        );
    }
    if let Some(t) = &h.detail.trace {
        let _ = writeln!(
            s,
            "    degree sweep: C = 1 flip at {:?}, per-C flips {:?}",
            t.c1_flip_degree, t.flip_degrees
        );
    }
    let e = &r.stages.exhaustion;
    let _ = writeln!(s, "[2] exhaustion ({:?} path): {} ({} levels)", e.path, verdict(e.verdict), e.levels);
    if let Some(f) = &e.failure {
        let _ = writeln!(s, "    failed at level {}: {}", f.level, f.reason);
    }
    let p = &r.stages.polygons;
    let _ = writeln!(s, "[3] polygons: {} (sizes {:?}, first {} asserted, nested {})", verdict(p.verdict), p.sizes, p.asserted, p.nested);
    let w = &r.stages.witness;
    let _ = writeln!(s, "[4] witness: {}", verdict(w.verdict));
    if let Some(div) = &w.divergence {
        for row in &div.rows {
            let _ = writeln!(s, "    j = {}: a(ω_j) = {:.6} ≥ {:.6}", row.j, row.value, row.bound);
        }
    }
    if let Some(err) = &w.error {
        let _ = writeln!(s, "    {err}");
    }
    let _ = writeln!(
        s,
        "coherence: hull and exhaustion {} (dual failure: {})",
        if r.coherence.agree { "agree" } else { "disagree" },
        r.coherence.dual_failure
    );
    let _ = writeln!(
        s,
        "classification: {} at degree {} and grid resolution {}",
        r.classification,
        r.family.max_degree.map_or("-".to_string(), |d| d.to_string()),
        r.grid.cell
    );
    s
}
