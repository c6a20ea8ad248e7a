//! Exhaustion functions as finite maxima of scaled cone functions, their sublevel
//! polygons, and the grid checks that go with them.
//!
//! Three constructions are provided:
//! * symmetric: `p = max_i p_i` with `p_i = max_l |a_l| / (2^i·max|a_l|(K_i))`, the `a_l`
//!   chosen greedily so that `|a_l| > 4^i·max|a_l|(K_i)` covers the shell `K_{i+3}∖K_{i+2}`;
//! * cone: `p = max_i i·p_i` over annulus functions of consecutive windows
//!   `K_i ⊂ K_{i+1} ⊂ K_{i+2} ⊂ K_{i+3}`;
//! * components: one cone construction per grid component, offset by the component number.
//!
//! In both chain constructions the last window's shell is extended to every point of the
//! component outside `K_{N-1}`, so the lower bounds also hold between `K_N` and the margin.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::chain::CompactChain;
use crate::error::{Error, Result};
use crate::families::{FunctionFamily, Point, Structure};
use crate::gelfand::embed;
use crate::grid::Grid;
use crate::hull::{compute_hull, HullMode};

/// Constants of the constructions. The defaults are the ones of the covering argument.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExhaustionOptions {
    /// Shell points of level i must satisfy `|a| > threshold_base^i · max|a|(K_i)`.
    pub threshold_base: f64,
    /// Level i divides by `scale_base^i · max|a|(K_i)`.
    pub scale_base: f64,
    /// Required gap `max f(K_1) + gap_margin < max f(K_2)` for annulus functions.
    pub gap_margin: f64,
}

impl Default for ExhaustionOptions {
    fn default() -> Self {
        ExhaustionOptions { threshold_base: 4.0, scale_base: 2.0, gap_margin: 1e-9 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeKind {
    Basis,
    NegBasis,
    AbsBasis,
    Modulus,
}

/// One element of the cone generated by a family: `±a`, `|a|` for a basis element, or the
/// modulus `|z^α|` of a stored monomial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeFunction {
    pub kind: ConeKind,
    /// Basis index, or monomial index for `Modulus`.
    pub index: usize,
    pub description: String,
}

impl ConeFunction {
    fn new(family: &FunctionFamily, kind: ConeKind, index: usize) -> Self {
        let description = match kind {
            ConeKind::Basis => family.basis()[index].describe(),
            ConeKind::NegBasis => format!("-({})", family.basis()[index].describe()),
            ConeKind::AbsBasis => format!("|{}|", family.basis()[index].describe()),
            ConeKind::Modulus => format!("|{}|", family.describe_monomial(index)),
        };
        ConeFunction { kind, index, description }
    }

    /// Value from a feature vector of `family`.
    pub fn value(&self, family: &FunctionFamily, feats: &[f64]) -> f64 {
        match self.kind {
            ConeKind::Basis => feats[self.index],
            ConeKind::NegBasis => -feats[self.index],
            ConeKind::AbsBasis => feats[self.index].abs(),
            ConeKind::Modulus => {
                let pair = &family.monomial_pairs()[self.index];
                feats[pair.re].hypot(feats[pair.im])
            }
        }
    }

    pub fn eval(&self, family: &FunctionFamily, omega: &Point) -> Result<f64> {
        Ok(self.value(family, &family.features(omega)?))
    }
}

/// Nonnegative cone functions `|a|` used by the symmetric construction.
pub fn symmetric_candidates(family: &FunctionFamily) -> Vec<ConeFunction> {
    match family.structure() {
        Structure::AlgebraRealParts => {
            (0..family.monomial_pairs().len()).map(|k| ConeFunction::new(family, ConeKind::Modulus, k)).collect()
        }
        _ => nonconstant(family).map(|i| ConeFunction::new(family, ConeKind::AbsBasis, i)).collect(),
    }
}

/// Cone elements used by annulus functions.
pub fn cone_candidates(family: &FunctionFamily) -> Vec<ConeFunction> {
    match family.structure() {
        Structure::AlgebraRealParts => symmetric_candidates(family),
        Structure::LinearSpan => nonconstant(family)
            .flat_map(|i| [ConeFunction::new(family, ConeKind::Basis, i), ConeFunction::new(family, ConeKind::NegBasis, i)])
            .collect(),
        Structure::ConeSample => nonconstant(family).map(|i| ConeFunction::new(family, ConeKind::Basis, i)).collect(),
    }
}

fn nonconstant(family: &FunctionFamily) -> impl Iterator<Item = usize> + '_ {
    (0..family.len()).filter(move |&i| !family.basis()[i].is_constant())
}

/// Candidate values over a list of points: `values[c][p]`.
struct Table {
    funcs: Vec<ConeFunction>,
    values: Vec<Vec<f64>>,
}

impl Table {
    fn new(family: &FunctionFamily, funcs: Vec<ConeFunction>, points: &[Point]) -> Result<Self> {
        let fm = embed(family, points)?;
        let values = funcs.iter().map(|f| (0..points.len()).map(|j| f.value(family, fm.column(j))).collect()).collect();
        Ok(Table { funcs, values })
    }

    fn max_over(&self, c: usize, set: &[usize]) -> f64 {
        set.iter().map(|&p| self.values[c][p]).fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelectedFunction {
    pub function: ConeFunction,
    /// `max|a|(K_inner)`.
    pub inner_sup: f64,
}

/// Shell points no candidate could cover, with the best ratio `|a(ω)| / max|a|(K_inner)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Uncovered {
    pub points: Vec<usize>,
    pub best_ratios: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Cover {
    Covered { functions: Vec<SelectedFunction> },
    Uncoverable(Uncovered),
}

/// Greedy max-coverage cover: `covers[c][k]` tells whether candidate c covers shell point k.
/// Ties go to the lower candidate index. Returns chosen candidates or the uncovered points.
fn greedy(covers: &[Vec<bool>], shell_len: usize) -> std::result::Result<Vec<usize>, Vec<usize>> {
    let mut covered = vec![false; shell_len];
    let mut remaining = shell_len;
    let mut chosen = Vec::new();
    while remaining > 0 {
        let mut best: Option<(usize, usize)> = None;
        for (c, row) in covers.iter().enumerate() {
            let gain = row.iter().zip(&covered).filter(|(&hit, &done)| hit && !done).count();
            if gain > 0 && best.is_none_or(|(_, g)| gain > g) {
                best = Some((c, gain));
            }
        }
        let Some((c, gain)) = best else {
            return Err((0..shell_len).filter(|&k| !covered[k]).collect());
        };
        for (k, &hit) in covers[c].iter().enumerate() {
            covered[k] |= hit;
        }
        remaining -= gain;
        chosen.push(c);
    }
    Ok(chosen)
}

fn cover_symmetric(table: &Table, inner: &[usize], shell: &[usize], threshold: f64) -> Cover {
    let sups: Vec<f64> = (0..table.funcs.len()).map(|c| table.max_over(c, inner)).collect();
    let usable = |c: usize| sups[c].is_finite() && sups[c] > f64::MIN_POSITIVE;
    let covers: Vec<Vec<bool>> = (0..table.funcs.len())
        .map(|c| shell.iter().map(|&p| usable(c) && table.values[c][p] > threshold * sups[c]).collect())
        .collect();
    match greedy(&covers, shell.len()) {
        Ok(chosen) => Cover::Covered {
            functions: chosen
                .into_iter()
                .map(|c| SelectedFunction { function: table.funcs[c].clone(), inner_sup: sups[c] })
                .collect(),
        },
        Err(missing) => {
            let best_ratios = missing
                .iter()
                .map(|&k| {
                    (0..table.funcs.len())
                        .filter(|&c| usable(c))
                        .map(|c| table.values[c][shell[k]] / sups[c])
                        .fold(0.0, f64::max)
                })
                .collect();
            Cover::Uncoverable(Uncovered { points: missing.iter().map(|&k| shell[k]).collect(), best_ratios })
        }
    }
}

/// Greedily selects functions `|a|` with `|a(ω)| > threshold·max|a|(K_inner)` covering every
/// shell point. Uncovered point indices refer to `shell`.
pub fn select_covering_subfamily(
    family: &FunctionFamily,
    k_inner: &[Point],
    shell: &[Point],
    threshold: f64,
) -> Result<Cover> {
    reject_degenerate(family)?;
    if k_inner.is_empty() {
        return Err(Error::invalid("inner compact is empty"));
    }
    let points: Vec<Point> = k_inner.iter().chain(shell).cloned().collect();
    let table = Table::new(family, symmetric_candidates(family), &points)?;
    let inner: Vec<usize> = (0..k_inner.len()).collect();
    let shell_idx: Vec<usize> = (k_inner.len()..points.len()).collect();
    Ok(match cover_symmetric(&table, &inner, &shell_idx, threshold) {
        Cover::Uncoverable(u) => Cover::Uncoverable(Uncovered {
            points: u.points.iter().map(|p| p - k_inner.len()).collect(),
            best_ratios: u.best_ratios,
        }),
        covered => covered,
    })
}

fn reject_degenerate(family: &FunctionFamily) -> Result<()> {
    if family.is_degenerate() {
        return Err(Error::invalid("family contains only constants; no exhaustion can be built"));
    }
    Ok(())
}

/// `(f − shift) / scale` for one cone function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelTerm {
    pub function: ConeFunction,
    pub shift: f64,
    pub scale: f64,
}

/// `offset + weight · max(0, max_l (f_l − shift_l)/scale_l)`, active on `component` only
/// when set. A level without terms is the constant `offset`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelFunction {
    pub level: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component: Option<usize>,
    /// Index into the exhaustion's family list.
    pub family: usize,
    pub terms: Vec<LevelTerm>,
    pub weight: f64,
    pub offset: f64,
}

impl LevelFunction {
    fn raw(&self, family: &FunctionFamily, feats: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| (t.function.value(family, feats) - t.shift) / t.scale)
            .fold(0.0, f64::max)
    }

    fn value(&self, family: &FunctionFamily, feats: &[f64]) -> f64 {
        if self.weight == 0.0 {
            self.offset
        } else {
            self.offset + self.weight * self.raw(family, feats)
        }
    }

    pub fn eval(&self, family: &FunctionFamily, omega: &Point) -> Result<f64> {
        Ok(self.value(family, &family.features(omega)?))
    }
}

/// Level i of the symmetric construction: `max_l |a_l| / (scale_base^i · max|a_l|(K_i))`.
pub fn build_level(
    family: &FunctionFamily,
    k_i: &[Point],
    selected: &[SelectedFunction],
    i: usize,
    opts: &ExhaustionOptions,
) -> Result<LevelFunction> {
    if k_i.is_empty() {
        return Err(Error::invalid("level compact is empty"));
    }
    let fm = embed(family, k_i)?;
    let factor = opts.scale_base.powi(i as i32);
    let terms = selected
        .iter()
        .map(|s| {
            let sup = (0..k_i.len()).map(|j| s.function.value(family, fm.column(j))).fold(0.0, f64::max);
            if !(sup > 0.0) {
                return Err(Error::invalid(format!("{} vanishes on K_{i}; cannot normalize", s.function.description)));
            }
            Ok(LevelTerm { function: s.function.clone(), shift: 0.0, scale: factor * sup })
        })
        .collect::<Result<_>>()?;
    Ok(LevelFunction { level: i, component: None, family: 0, terms, weight: 1.0, offset: 0.0 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Combiner {
    Max,
    IndexedMax,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExhaustionPath {
    Symmetric,
    Cone,
    Components,
}

impl std::str::FromStr for ExhaustionPath {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric" => Ok(ExhaustionPath::Symmetric),
            "cone" => Ok(ExhaustionPath::Cone),
            "components" => Ok(ExhaustionPath::Components),
            other => Err(Error::invalid(format!("unknown exhaustion path `{other}`"))),
        }
    }
}

/// Pointwise guarantees of one level, measured on the grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelReport {
    pub level: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component: Option<usize>,
    pub selected: Vec<String>,
    pub shell_size: usize,
    /// Max of the level on its inner compact and the bound it must respect.
    pub inner_max: f64,
    pub inner_bound: f64,
    /// Min of the level on its shell (None for an empty shell) and the bound it must reach.
    pub shell_min: Option<f64>,
    pub shell_bound: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExhaustionFunction {
    pub path: ExhaustionPath,
    pub combiner: Combiner,
    pub levels: Vec<LevelFunction>,
    pub family_fingerprints: Vec<String>,
    pub level_reports: Vec<LevelReport>,
    /// For each chain set K_j, the levels attaining the maximum somewhere on K_j.
    pub active_sets: Vec<Vec<usize>>,
    #[serde(skip)]
    families: Vec<FunctionFamily>,
}

impl ExhaustionFunction {
    pub fn families(&self) -> &[FunctionFamily] {
        &self.families
    }

    /// Value at a point of the given grid component.
    pub fn eval(&self, omega: &Point, component: usize) -> Result<f64> {
        let feats: Vec<Vec<f64>> = self.families.iter().map(|f| f.features(omega)).collect::<Result<_>>()?;
        Ok(self.value(&feats, component))
    }

    fn value(&self, feats: &[Vec<f64>], component: usize) -> f64 {
        self.levels
            .iter()
            .filter(|l| l.component.is_none_or(|c| c == component))
            .map(|l| l.value(&self.families[l.family], &feats[l.family]))
            .reduce(f64::max)
            .unwrap_or(0.0)
    }

    /// Values at every grid point.
    pub fn eval_grid(&self, grid: &Grid) -> Result<Vec<f64>> {
        let tables: Vec<_> = self.families.iter().map(|f| embed(f, grid.points())).collect::<Result<_>>()?;
        Ok((0..grid.len())
            .map(|j| {
                let comp = grid.component(j);
                let mut best: Option<f64> = None;
                for l in &self.levels {
                    if l.component.is_none_or(|c| c == comp) {
                        let v = l.value(&self.families[l.family], tables[l.family].column(j));
                        best = Some(best.map_or(v, |b: f64| b.max(v)));
                    }
                }
                best.unwrap_or(0.0)
            })
            .collect())
    }

    /// Values of one level at every grid point (0 off its component).
    pub fn eval_level_grid(&self, level: usize, grid: &Grid) -> Result<Vec<f64>> {
        let l = &self.levels[level];
        let family = &self.families[l.family];
        let fm = embed(family, grid.points())?;
        Ok((0..grid.len())
            .map(|j| if l.component.is_none_or(|c| c == grid.component(j)) { l.value(family, fm.column(j)) } else { 0.0 })
            .collect())
    }
}

/// Why a construction stopped.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstructionFailure {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component: Option<usize>,
    pub level: usize,
    pub reason: String,
    /// Grid indices of the points that could not be covered.
    pub points: Vec<usize>,
    pub best_ratios: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Construction {
    Built(Box<ExhaustionFunction>),
    Failed(ConstructionFailure),
}

impl Construction {
    pub fn built(&self) -> Option<&ExhaustionFunction> {
        match self {
            Construction::Built(p) => Some(p),
            Construction::Failed(_) => None,
        }
    }

    pub fn failure(&self) -> Option<&ConstructionFailure> {
        match self {
            Construction::Built(_) => None,
            Construction::Failed(f) => Some(f),
        }
    }
}

/// Shell of window/level i: `K_{i+3} ∖ K_{i+2}`, or everything in the component outside
/// `K_{N-1}` for the last window.
fn shell(grid: &Grid, chain: &CompactChain, component: usize, i: usize, last: usize) -> Vec<usize> {
    if i == last {
        grid.component_indices(component)
            .into_iter()
            .filter(|&p| !chain.contains(chain.len() - 1, p))
            .collect()
    } else {
        chain.shell(i + 2, i + 3)
    }
}

fn chain_component(grid: &Grid, chain: &CompactChain) -> usize {
    grid.component(chain.set(1)[0])
}

/// Symmetric construction over a chain on one grid component.
pub fn build_exhaustion_symmetric(
    family: &FunctionFamily,
    grid: &Grid,
    chain: &CompactChain,
    opts: &ExhaustionOptions,
) -> Result<Construction> {
    reject_degenerate(family)?;
    if !(family.symmetric() || family.structure() != Structure::ConeSample) {
        return Err(Error::invalid("symmetric construction needs a symmetric family"));
    }
    let n = chain.len();
    if n < 4 {
        return Err(Error::invalid(format!("symmetric construction needs a chain of length >= 4, got {n}")));
    }
    let component = chain_component(grid, chain);
    let table = Table::new(family, symmetric_candidates(family), grid.points())?;
    let last = n - 3;
    let mut levels = Vec::with_capacity(n);
    let mut reports = Vec::with_capacity(n);
    for i in 1..=n {
        let inner = chain.set(i);
        let shell = if i <= last { shell(grid, chain, component, i, last) } else { Vec::new() };
        let threshold = opts.threshold_base.powi(i as i32);
        let selected = match cover_symmetric(&table, inner, &shell, threshold) {
            Cover::Covered { functions } => functions,
            Cover::Uncoverable(u) => {
                return Ok(Construction::Failed(ConstructionFailure {
                    component: None,
                    level: i,
                    reason: format!(
                        "{} shell point(s) of K_{}∖K_{} admit no |a| > {threshold}·max|a|(K_{i})",
                        u.points.len(),
                        (i + 3).min(n),
                        (i + 2).min(n)
                    ),
                    points: u.points,
                    best_ratios: u.best_ratios,
                }))
            }
        };
        let factor = opts.scale_base.powi(i as i32);
        let terms: Vec<LevelTerm> = selected
            .iter()
            .map(|s| LevelTerm { function: s.function.clone(), shift: 0.0, scale: factor * s.inner_sup })
            .collect();
        let level = LevelFunction { level: i, component: None, family: 0, terms, weight: 1.0, offset: 0.0 };
        reports.push(level_report(&level, family, grid, inner, &shell, 1.0 / factor, factor, true)?);
        levels.push(level);
    }
    let p = finish(ExhaustionPath::Symmetric, Combiner::Max, levels, vec![family.clone()], reports, grid, &[chain])?;
    Ok(Construction::Built(Box::new(p)))
}

fn level_report(
    level: &LevelFunction,
    family: &FunctionFamily,
    grid: &Grid,
    inner: &[usize],
    shell: &[usize],
    inner_bound: f64,
    shell_bound: f64,
    strict_inner: bool,
) -> Result<LevelReport> {
    let fm = embed(family, grid.points())?;
    let value = |p: usize| level.value(family, fm.column(p));
    let inner_max = inner.iter().map(|&p| value(p)).fold(0.0, f64::max);
    let shell_min = shell.iter().map(|&p| value(p)).reduce(f64::min);
    let slack = 1e-12 * (1.0 + inner_bound.abs());
    let inner_ok = if strict_inner { inner_max <= inner_bound + slack } else { inner_max <= slack };
    let shell_ok = shell_min.is_none_or(|m| m >= shell_bound);
    Ok(LevelReport {
        level: level.level,
        component: level.component,
        selected: level.terms.iter().map(|t| t.function.description.clone()).collect(),
        shell_size: shell.len(),
        inner_max,
        inner_bound,
        shell_min,
        shell_bound,
        ok: inner_ok && shell_ok,
    })
}

fn finish(
    path: ExhaustionPath,
    combiner: Combiner,
    levels: Vec<LevelFunction>,
    families: Vec<FunctionFamily>,
    level_reports: Vec<LevelReport>,
    grid: &Grid,
    chains: &[&CompactChain],
) -> Result<ExhaustionFunction> {
    let mut p = ExhaustionFunction {
        path,
        combiner,
        levels,
        family_fingerprints: families.iter().map(|f| f.fingerprint()).collect(),
        level_reports,
        active_sets: Vec::new(),
        families,
    };
    let per_level: Vec<Vec<f64>> = (0..p.levels.len()).map(|l| p.eval_level_grid(l, grid)).collect::<Result<_>>()?;
    let n = chains.iter().map(|c| c.len()).max().unwrap_or(0);
    for j in 1..=n {
        let mut active = BTreeSet::new();
        for chain in chains {
            for &pt in chain.set(j) {
                let comp = grid.component(pt);
                let relevant: Vec<usize> =
                    (0..p.levels.len()).filter(|&l| p.levels[l].component.is_none_or(|c| c == comp)).collect();
                let best = relevant.iter().map(|&l| per_level[l][pt]).fold(f64::NEG_INFINITY, f64::max);
                if best > 0.0 {
                    active.extend(relevant.iter().filter(|&&l| per_level[l][pt] == best).map(|&l| p.levels[l].level));
                }
            }
        }
        p.active_sets.push(active.into_iter().collect());
    }
    Ok(p)
}

/// Checks of one annulus function on the four compacts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnnulusCheck {
    /// `p = 0` on K1.
    pub vanishes_on_k1: bool,
    /// `p ≤ 1` on K2.
    pub bounded_on_k2: bool,
    /// `p > 1` on `K4 ∖ K3`.
    pub exceeds_on_shell: bool,
    /// Candidates excluded because `max f(K1) + margin ≥ max f(K2)`.
    pub gap_violations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Annulus {
    Built { level: LevelFunction, check: AnnulusCheck },
    Uncoverable { uncovered: Uncovered, gap_violations: Vec<String> },
}

type AnnulusOutcome = std::result::Result<(Vec<LevelTerm>, Vec<String>), (Uncovered, Vec<String>)>;

/// Annulus selection on index sets of a common point table.
fn annulus_core(
    table: &Table,
    k: [&[usize]; 4],
    shell: &[usize],
    margin: f64,
) -> Result<AnnulusOutcome> {
    let [k1, k2, _, _] = k;
    let mut gap_violations = Vec::new();
    let mut usable = vec![false; table.funcs.len()];
    let mut s1 = vec![0.0; table.funcs.len()];
    let mut s2 = vec![0.0; table.funcs.len()];
    for c in 0..table.funcs.len() {
        s1[c] = table.max_over(c, k1);
        s2[c] = table.max_over(c, k2);
        if s1[c] + margin < s2[c] {
            usable[c] = true;
        } else {
            gap_violations.push(table.funcs[c].description.clone());
        }
    }
    if !usable.iter().any(|&u| u) {
        return Err(Error::invalid(format!(
            "no cone function has max f(K1) + {margin} < max f(K2) (first violation: {}); zero denominator",
            gap_violations.first().map(String::as_str).unwrap_or("none")
        )));
    }
    let covers: Vec<Vec<bool>> = (0..table.funcs.len())
        .map(|c| shell.iter().map(|&p| usable[c] && table.values[c][p] > s2[c]).collect())
        .collect();
    match greedy(&covers, shell.len()) {
        Ok(chosen) => Ok(Ok((
            chosen
                .into_iter()
                .map(|c| LevelTerm { function: table.funcs[c].clone(), shift: s1[c], scale: s2[c] - s1[c] })
                .collect(),
            gap_violations,
        ))),
        Err(missing) => {
            let best_ratios = missing
                .iter()
                .map(|&m| {
                    (0..table.funcs.len())
                        .filter(|&c| usable[c])
                        .map(|c| (table.values[c][shell[m]] - s1[c]) / (s2[c] - s1[c]))
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .collect();
            Ok(Err((Uncovered { points: missing.iter().map(|&m| shell[m]).collect(), best_ratios }, gap_violations)))
        }
    }
}

/// Annulus function `max_l (f_l − max f_l(K1)) / (max f_l(K2) − max f_l(K1)) ∨ 0` with
/// `p > 1` on `K4 ∖ K3`. Shell points are the points of K4 not in K3 (by coordinates);
/// uncovered indices refer to K4.
pub fn build_annulus_function(
    family: &FunctionFamily,
    k1: &[Point],
    k2: &[Point],
    k3: &[Point],
    k4: &[Point],
    margin: f64,
) -> Result<Annulus> {
    reject_degenerate(family)?;
    if [k1, k2, k3, k4].iter().any(|k| k.is_empty()) {
        return Err(Error::invalid("annulus compacts must be nonempty"));
    }
    let key = |p: &Point| p.coords().iter().map(|c| c.to_bits()).collect::<Vec<u64>>();
    let in_k3: HashSet<Vec<u64>> = k3.iter().map(key).collect();
    let points: Vec<Point> = [k1, k2, k4].concat();
    let table = Table::new(family, cone_candidates(family), &points)?;
    let i1: Vec<usize> = (0..k1.len()).collect();
    let i2: Vec<usize> = (k1.len()..k1.len() + k2.len()).collect();
    let off4 = k1.len() + k2.len();
    let i4: Vec<usize> = (off4..points.len()).collect();
    let shell: Vec<usize> = i4.iter().copied().filter(|&p| !in_k3.contains(&key(&points[p]))).collect();
    match annulus_core(&table, [&i1, &i2, &[], &i4], &shell, margin)? {
        Ok((terms, gap_violations)) => {
            let level = LevelFunction { level: 1, component: None, family: 0, terms, weight: 1.0, offset: 0.0 };
            let fm = embed(family, &points)?;
            let v = |p: usize| level.value(family, fm.column(p));
            let check = AnnulusCheck {
                vanishes_on_k1: i1.iter().all(|&p| v(p) <= 0.0),
                bounded_on_k2: i2.iter().all(|&p| v(p) <= 1.0 + 1e-12),
                exceeds_on_shell: shell.iter().all(|&p| v(p) > 1.0),
                gap_violations,
            };
            Ok(Annulus::Built { level, check })
        }
        Err((u, gap_violations)) => Ok(Annulus::Uncoverable {
            uncovered: Uncovered { points: u.points.iter().map(|p| p - off4).collect(), best_ratios: u.best_ratios },
            gap_violations,
        }),
    }
}

/// Cone construction `p = max_i i·p_i` on one grid component.
pub fn build_exhaustion_cone(
    family: &FunctionFamily,
    grid: &Grid,
    chain: &CompactChain,
    opts: &ExhaustionOptions,
) -> Result<Construction> {
    let (levels, reports) = match cone_levels(family, grid, chain, opts, None, 0)? {
        Ok(v) => v,
        Err(f) => return Ok(Construction::Failed(f)),
    };
    let p = finish(ExhaustionPath::Cone, Combiner::IndexedMax, levels, vec![family.clone()], reports, grid, &[chain])?;
    Ok(Construction::Built(Box::new(p)))
}

type Levels = (Vec<LevelFunction>, Vec<LevelReport>);

fn cone_levels(
    family: &FunctionFamily,
    grid: &Grid,
    chain: &CompactChain,
    opts: &ExhaustionOptions,
    component_tag: Option<usize>,
    family_slot: usize,
) -> Result<std::result::Result<Levels, ConstructionFailure>> {
    reject_degenerate(family)?;
    let n = chain.len();
    if n < 4 {
        return Err(Error::invalid(format!(
            "cone construction needs a chain of length >= 4 (quadruple windows), got {n}; add chain sets"
        )));
    }
    let component = chain_component(grid, chain);
    let table = Table::new(family, cone_candidates(family), grid.points())?;
    let last = n - 3;
    let mut levels = Vec::new();
    let mut reports = Vec::new();
    for i in 1..=last {
        let sh = shell(grid, chain, component, i, last);
        let k = [chain.set(i), chain.set(i + 1), chain.set(i + 2), chain.set(i + 3)];
        match annulus_core(&table, k, &sh, opts.gap_margin)? {
            Ok((terms, _)) => {
                let level =
                    LevelFunction { level: i, component: component_tag, family: family_slot, terms, weight: i as f64, offset: 0.0 };
                let mut report = level_report(&level, family, grid, k[0], &sh, 0.0, i as f64, false)?;
                if let Some(m) = report.shell_min {
                    report.ok = report.ok && m > i as f64;
                }
                let fm = embed(family, grid.points())?;
                report.ok = report.ok && k[1].iter().all(|&p| level.value(family, fm.column(p)) <= i as f64 * (1.0 + 1e-12));
                reports.push(report);
                levels.push(level);
            }
            Err((u, _)) => {
                return Ok(Err(ConstructionFailure {
                    component: component_tag,
                    level: i,
                    reason: format!("{} point(s) outside K_{} admit no cone function above its max on K_{}", u.points.len(), i + 2, i + 1),
                    points: u.points,
                    best_ratios: u.best_ratios,
                }))
            }
        }
    }
    Ok(Ok((levels, reports)))
}

/// One component of a glued construction.
pub struct ComponentPart<'a> {
    pub family: &'a FunctionFamily,
    pub chain: &'a CompactChain,
}

/// Cone constructions per component glued as `p = p_c + c` on component c (1-based).
pub fn build_exhaustion_components(grid: &Grid, parts: &[ComponentPart<'_>], opts: &ExhaustionOptions) -> Result<Construction> {
    if parts.is_empty() {
        return Err(Error::invalid("no components given"));
    }
    let mut levels = Vec::new();
    let mut reports = Vec::new();
    let mut families = Vec::new();
    let mut seen = HashSet::new();
    for (slot, part) in parts.iter().enumerate() {
        let comp = chain_component(grid, part.chain);
        if !seen.insert(comp) {
            return Err(Error::invalid(format!("component {comp} given twice")));
        }
        let offset = (comp + 1) as f64;
        match cone_levels(part.family, grid, part.chain, opts, Some(comp), slot)? {
            Ok((mut lv, rp)) => {
                for l in &mut lv {
                    l.offset += offset;
                }
                lv.insert(0, LevelFunction { level: 0, component: Some(comp), family: slot, terms: Vec::new(), weight: 0.0, offset });
                levels.extend(lv);
                reports.extend(rp);
            }
            Err(mut f) => {
                f.component = Some(comp);
                return Ok(Construction::Failed(f));
            }
        }
        families.push(part.family.clone());
    }
    let chains: Vec<&CompactChain> = parts.iter().map(|p| p.chain).collect();
    let p = finish(ExhaustionPath::Components, Combiner::IndexedMax, levels, families, reports, grid, &chains)?;
    Ok(Construction::Built(Box::new(p)))
}

/// One affine piece `slope·t + intercept` of a convex nondecreasing function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffinePiece {
    pub slope: f64,
    pub intercept: f64,
}

/// `ξ(p)` for `ξ(t) = max_j (α_j t + β_j)`, expanded into the same finite-max form.
pub fn convex_post_compose(p: &ExhaustionFunction, xi: &[AffinePiece]) -> Result<ExhaustionFunction> {
    if xi.is_empty() {
        return Err(Error::invalid("convex function needs at least one affine piece"));
    }
    if let Some(bad) = xi.iter().find(|a| !(a.slope >= 0.0) || !a.intercept.is_finite() || !a.slope.is_finite()) {
        return Err(Error::invalid(format!("affine piece with slope {} is not nondecreasing", bad.slope)));
    }
    let mut levels = Vec::with_capacity(p.levels.len() * xi.len());
    for piece in xi {
        for l in &p.levels {
            let mut nl = l.clone();
            nl.weight = piece.slope * l.weight;
            nl.offset = piece.slope * l.offset + piece.intercept;
            if nl.weight == 0.0 {
                nl.terms.clear();
            }
            levels.push(nl);
        }
    }
    Ok(ExhaustionFunction {
        path: p.path,
        combiner: p.combiner,
        levels,
        family_fingerprints: p.family_fingerprints.clone(),
        level_reports: p.level_reports.clone(),
        active_sets: p.active_sets.clone(),
        families: p.families.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProperFailure {
    pub t: usize,
    pub point: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProperReport {
    pub checked: Vec<usize>,
    pub skipped: Vec<usize>,
    pub failures: Vec<ProperFailure>,
    pub pass: bool,
}

/// For t = 1..N−3: `{p ≤ t} ⊂ K_{t+3}` and `{p ≤ t}` avoids the grid margin, on the
/// component of the chain. Values of t above N−3 (up to `t_max`) are listed as skipped.
pub fn properness_check(values: &[f64], chain: &CompactChain, grid: &Grid, t_max: usize) -> ProperReport {
    let n = chain.len();
    let mut checked = Vec::new();
    let mut skipped = Vec::new();
    let mut failures = Vec::new();
    let comp = chain_component(grid, chain);
    for t in 1..=t_max.max(n.saturating_sub(3)) {
        if t + 3 > n {
            skipped.push(t);
            continue;
        }
        checked.push(t);
        for (j, &v) in values.iter().enumerate() {
            if grid.component(j) == comp && v <= t as f64 {
                if grid.is_margin(j) {
                    failures.push(ProperFailure { t, point: j, reason: "sublevel touches the margin".into() });
                } else if !chain.contains(t + 3, j) {
                    failures.push(ProperFailure { t, point: j, reason: format!("sublevel leaves K_{}", t + 3) });
                }
            }
        }
    }
    let pass = failures.is_empty() && !checked.is_empty();
    ProperReport { checked, skipped, failures, pass }
}

/// Points where the cone bound `p ≥ i` fails outside `K_{i+2}`, for i = 1..N−3.
pub fn cone_bound_violations(values: &[f64], chain: &CompactChain, grid: &Grid) -> Vec<(usize, usize)> {
    let comp = chain_component(grid, chain);
    let mut out = Vec::new();
    for i in 1..=chain.len().saturating_sub(3) {
        for j in grid.component_indices(comp) {
            if !chain.contains(i + 2, j) && values[j] < i as f64 {
                out.push((i, j));
            }
        }
    }
    out
}

/// `α·f(ω) + β ≤ 1` on the points of `component` (all points when None); a constraint
/// without function is the constant `β ≤ 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolygonConstraint {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub function: Option<ConeFunction>,
    pub family: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component: Option<usize>,
    pub coefficient: f64,
    pub constant: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Polygon {
    pub index: usize,
    pub constraints: Vec<PolygonConstraint>,
    pub members: Vec<usize>,
    pub touches_margin: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolygonExhaustion {
    pub polygons: Vec<Polygon>,
    /// Pairs (i, point) where a neighbor of a point of P_i is missing from P_{i+1}.
    pub nesting_violations: Vec<(usize, usize)>,
    pub nested: bool,
}

impl Polygon {
    /// Membership from the constraints alone.
    pub fn contains(&self, families: &[FunctionFamily], omega: &Point, component: usize, tol: f64) -> Result<bool> {
        for c in &self.constraints {
            if c.component.is_some_and(|k| k != component) {
                continue;
            }
            let f = match &c.function {
                Some(func) => func.eval(&families[c.family], omega)?,
                None => 0.0,
            };
            if c.coefficient * f + c.constant > 1.0 + tol {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Sublevel polygons `P_i = {p ≤ i}`, i = 1..count, each written as constraints `g ≤ 1`.
pub fn polygon_exhaustion(p: &ExhaustionFunction, grid: &Grid, count: usize) -> Result<PolygonExhaustion> {
    let values = p.eval_grid(grid)?;
    let tol = 1e-9;
    let mut polygons = Vec::with_capacity(count);
    for i in 1..=count {
        let t = i as f64;
        let mut constraints = Vec::new();
        for l in &p.levels {
            constraints.push(PolygonConstraint {
                function: None,
                family: l.family,
                component: l.component,
                coefficient: 0.0,
                constant: l.offset / t,
            });
            if l.weight == 0.0 {
                continue;
            }
            for term in &l.terms {
                constraints.push(PolygonConstraint {
                    function: Some(term.function.clone()),
                    family: l.family,
                    component: l.component,
                    coefficient: l.weight / (term.scale * t),
                    constant: (l.offset - l.weight * term.shift / term.scale) / t,
                });
            }
        }
        let members: Vec<usize> = (0..grid.len()).filter(|&j| values[j] <= t + tol).collect();
        if members.is_empty() {
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            return Err(Error::invalid(format!("polygon P_{i} is empty (min p = {min})")));
        }
        let touches_margin = members.iter().any(|&j| grid.is_margin(j));
        polygons.push(Polygon { index: i, constraints, members, touches_margin });
    }
    let mut nesting_violations = Vec::new();
    for w in polygons.windows(2) {
        let next: HashSet<usize> = w[1].members.iter().copied().collect();
        for &j in &w[0].members {
            let missing = !next.contains(&j) || grid.neighbors(j).iter().any(|q| !next.contains(q));
            if missing {
                nesting_violations.push((w[0].index, j));
            }
        }
    }
    let nested = nesting_violations.is_empty();
    Ok(PolygonExhaustion { polygons, nesting_violations, nested })
}

/// Hull of a sublevel set compared with the set itself.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SublevelReport {
    pub t: f64,
    pub sublevel_size: usize,
    pub hull_size: usize,
    /// Sublevel points the hull misses.
    pub missing: Vec<usize>,
    /// Hull points farther than one grid cell from the sublevel set.
    pub beyond_one_cell: Vec<usize>,
    pub pass: bool,
}

/// Computes the linear hull of `{p ≤ t}` over the grid and compares it with `{p ≤ t}`.
pub fn sublevel_hull_check(
    values: &[f64],
    family: &FunctionFamily,
    grid: &Grid,
    t: f64,
    tol: f64,
) -> Result<SublevelReport> {
    let set: Vec<usize> = (0..grid.len()).filter(|&j| values[j] <= t).collect();
    if set.is_empty() {
        return Err(Error::invalid(format!("sublevel {{p <= {t}}} is empty")));
    }
    let s: Vec<Point> = set.iter().map(|&j| grid.point(j).clone()).collect();
    let hull = compute_hull(family, &s, grid, 1.0, HullMode::Linear, tol)?;
    let in_set: HashSet<usize> = set.iter().copied().collect();
    let members = hull.members();
    let in_hull: HashSet<usize> = members.iter().copied().collect();
    let missing: Vec<usize> = set.iter().copied().filter(|j| !in_hull.contains(j)).collect();
    let reach = grid.cell() * (1.0 + 1e-9) * std::f64::consts::SQRT_2;
    let beyond_one_cell: Vec<usize> = members
        .iter()
        .copied()
        .filter(|j| !in_set.contains(j))
        .filter(|&j| !set.iter().any(|&k| grid.point(k).distance(grid.point(j)) <= reach))
        .collect();
    let pass = missing.is_empty() && beyond_one_cell.is_empty();
    Ok(SublevelReport { t, sublevel_size: set.len(), hull_size: members.len(), missing, beyond_one_cell, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{radial_chain, RadialSpec};
    use crate::families::circle_samples;
    use num_complex::Complex64;

    fn disc_grid() -> Grid {
        Grid::discs(&[Complex64::new(0.0, 0.0)], 1.0, 60, 1).unwrap()
    }

    fn z(x: f64) -> Point {
        Point::complex(&[Complex64::new(x, 0.0)]).unwrap()
    }

    #[test]
    fn covering_picks_lowest_sufficient_degree() {
        let fam = FunctionFamily::monomials(1, 6, false).unwrap();
        let inner = circle_samples(Complex64::new(0.0, 0.0), 0.5, 64);
        let mut shell = circle_samples(Complex64::new(0.0, 0.0), 0.875, 64);
        shell.extend(circle_samples(Complex64::new(0.0, 0.0), 0.9375, 64));
        match select_covering_subfamily(&fam, &inner, &shell, 4.0).unwrap() {
            Cover::Covered { functions } => {
                assert_eq!(functions.len(), 1);
                assert_eq!(fam.monomial_pairs()[functions[0].function.index].exponent, vec![3]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn covering_inside_inner_set_fails() {
        let fam = FunctionFamily::monomials(1, 6, false).unwrap();
        let inner = circle_samples(Complex64::new(0.0, 0.0), 0.5, 64);
        let shell = circle_samples(Complex64::new(0.0, 0.0), 0.4, 8);
        match select_covering_subfamily(&fam, &inner, &shell, 4.0).unwrap() {
            Cover::Uncoverable(u) => {
                assert_eq!(u.points.len(), 8);
                assert!(u.best_ratios.iter().all(|&r| r < 1.0));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            select_covering_subfamily(&fam, &inner, &[], 4.0).unwrap(),
            Cover::Covered { functions: vec![] }
        );
    }

    #[test]
    fn level_one_values() {
        let fam = FunctionFamily::monomials(1, 6, false).unwrap();
        let inner = circle_samples(Complex64::new(0.0, 0.0), 0.5, 64);
        let cube = ConeFunction::new(&fam, ConeKind::Modulus, 2);
        let sel = [SelectedFunction { function: cube, inner_sup: 0.125 }];
        let level = build_level(&fam, &inner, &sel, 1, &ExhaustionOptions::default()).unwrap();
        assert_eq!(level.eval(&fam, &z(0.0)).unwrap(), 0.0);
        let v = level.eval(&fam, &z(0.9375)).unwrap();
        assert!((v - 0.9375f64.powi(3) / 0.25).abs() < 1e-12);
        assert!(v >= 2.0);
    }

    #[test]
    fn symmetric_disc_construction() {
        let g = disc_grid();
        let chain = radial_chain(&g, 0, &RadialSpec::discs(vec![0.5, 0.75, 0.875, 0.9375])).unwrap();
        let fam = FunctionFamily::monomials(1, 6, false).unwrap();
        let built = build_exhaustion_symmetric(&fam, &g, &chain, &ExhaustionOptions::default()).unwrap();
        let p = built.built().expect("disc construction succeeds");
        assert_eq!(p.levels.len(), 4);
        assert!(p.level_reports.iter().all(|r| r.ok));
        let values = p.eval_grid(&g).unwrap();
        let origin = g.nearest(&z(0.0)).unwrap();
        assert_eq!(values[origin], 0.0);
        assert!(chain.set(1).iter().all(|&j| values[j] <= 0.5));
        assert!(properness_check(&values, &chain, &g, 1).pass);
    }

    #[test]
    fn annulus_function_sandwich() {
        let g = disc_grid();
        let chain = radial_chain(&g, 0, &RadialSpec::discs(vec![0.5, 0.625, 0.75, 0.875])).unwrap();
        let fam = FunctionFamily::monomials(1, 6, false).unwrap();
        let ks: Vec<Vec<Point>> = (1..=4).map(|i| chain.points(&g, i)).collect();
        match build_annulus_function(&fam, &ks[0], &ks[1], &ks[2], &ks[3], 1e-9).unwrap() {
            Annulus::Built { check, .. } => {
                assert!(check.vanishes_on_k1 && check.bounded_on_k2 && check.exceeds_on_shell);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(build_annulus_function(&fam, &ks[0], &ks[0], &ks[2], &ks[3], 1e-9).is_err());
    }

    #[test]
    fn cone_disc_construction_bounds() {
        let g = disc_grid();
        let chain = radial_chain(&g, 0, &RadialSpec::discs(vec![0.5, 0.625, 0.75, 0.875, 0.9375])).unwrap();
        let fam = FunctionFamily::monomials(1, 6, false).unwrap();
        let built = build_exhaustion_cone(&fam, &g, &chain, &ExhaustionOptions::default()).unwrap();
        let p = built.built().unwrap();
        let values = p.eval_grid(&g).unwrap();
        assert!(cone_bound_violations(&values, &chain, &g).is_empty());
        assert!(chain.set(1).iter().all(|&j| values[j] == 0.0));
        let report = properness_check(&values, &chain, &g, 2);
        assert_eq!(report.checked, vec![1, 2]);
        assert!(report.pass, "{:?}", report.failures);
        let short = radial_chain(&g, 0, &RadialSpec::discs(vec![0.5, 0.75, 0.875])).unwrap();
        assert!(build_exhaustion_cone(&fam, &g, &short, &ExhaustionOptions::default()).is_err());
    }

    #[test]
    fn two_disc_gluing_offsets() {
        let g = Grid::discs(&[Complex64::new(-2.0, 0.0), Complex64::new(2.0, 0.0)], 1.0, 40, 1).unwrap();
        let spec = RadialSpec::discs(vec![0.5, 0.625, 0.75, 0.875]);
        let c0 = radial_chain(&g, 0, &spec).unwrap();
        let c1 = radial_chain(&g, 1, &spec).unwrap();
        let gen = crate::hull::MonomialGenerator { n_complex: 1, laurent: false, center: None };
        let mut f0 = gen.clone();
        f0.center = Some(vec![Complex64::new(-2.0, 0.0)]);
        let mut f1 = gen;
        f1.center = Some(vec![Complex64::new(2.0, 0.0)]);
        let (fam0, fam1) = (f0.at(6).unwrap(), f1.at(6).unwrap());
        let parts = [ComponentPart { family: &fam0, chain: &c0 }, ComponentPart { family: &fam1, chain: &c1 }];
        let built = build_exhaustion_components(&g, &parts, &ExhaustionOptions::default()).unwrap();
        let p = built.built().unwrap();
        let values = p.eval_grid(&g).unwrap();
        for (j, &v) in values.iter().enumerate() {
            assert!(v >= (g.component(j) + 1) as f64);
            if v <= 1.5 {
                assert_eq!(g.component(j), 0);
            }
        }
    }

    #[test]
    fn post_composition() {
        let g = disc_grid();
        let chain = radial_chain(&g, 0, &RadialSpec::discs(vec![0.5, 0.75, 0.875, 0.9375])).unwrap();
        let fam = FunctionFamily::monomials(1, 6, false).unwrap();
        let p = build_exhaustion_symmetric(&fam, &g, &chain, &ExhaustionOptions::default()).unwrap();
        let p = p.built().unwrap();
        let base = p.eval_grid(&g).unwrap();
        let id = convex_post_compose(p, &[AffinePiece { slope: 1.0, intercept: 0.0 }]).unwrap();
        assert_eq!(id.eval_grid(&g).unwrap(), base);
        let xi = [AffinePiece { slope: 0.0, intercept: 0.0 }, AffinePiece { slope: 2.0, intercept: -1.0 }];
        let composed = convex_post_compose(p, &xi).unwrap().eval_grid(&g).unwrap();
        for j in 0..g.len() {
            assert!((composed[j] - (2.0 * base[j] - 1.0).max(0.0)).abs() < 1e-12);
            assert_eq!(composed[j] <= 1.0, base[j] <= 1.0);
        }
        let zero = convex_post_compose(p, &[AffinePiece { slope: 0.0, intercept: 0.0 }]).unwrap();
        let zv = zero.eval_grid(&g).unwrap();
        assert!(zv.iter().all(|&v| v == 0.0));
        assert!(!properness_check(&zv, &chain, &g, 1).pass);
        assert!(convex_post_compose(p, &[AffinePiece { slope: -1.0, intercept: 0.0 }]).is_err());
    }

    #[test]
    fn polygons_match_sublevels() {
        let g = disc_grid();
        let chain = radial_chain(&g, 0, &RadialSpec::discs(vec![0.5, 0.75, 0.875, 0.9375])).unwrap();
        let fam = FunctionFamily::monomials(1, 6, false).unwrap();
        let p = build_exhaustion_symmetric(&fam, &g, &chain, &ExhaustionOptions::default()).unwrap();
        let p = p.built().unwrap();
        let polys = polygon_exhaustion(p, &g, 3).unwrap();
        assert!(polys.nested);
        assert_eq!(polys.polygons.len(), 3);
        let first: HashSet<usize> = polys.polygons[0].members.iter().copied().collect();
        assert!(chain.set(1).iter().all(|j| first.contains(j)));
        for poly in &polys.polygons {
            let inside: HashSet<usize> = poly.members.iter().copied().collect();
            for j in 0..g.len() {
                assert_eq!(poly.contains(p.families(), g.point(j), 0, 1e-9).unwrap(), inside.contains(&j));
            }
        }
        assert!(polygon_exhaustion(p, &g, 0).unwrap().polygons.is_empty());
    }
}
