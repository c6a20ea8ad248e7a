//! Scenario files: grid, chain, family and options of one discretized domain.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::{radial_chain, CompactChain, RadialSpec};
use crate::error::{Error, Result};
use crate::exhaustion::{ExhaustionOptions, ExhaustionPath};
use crate::families::FunctionFamily;
use crate::grid::Grid;
use crate::hull::MonomialGenerator;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub grid: GridSpec,
    pub chain: ChainSpec,
    pub family: FamilySpec,
    #[serde(default)]
    pub options: ScenarioOptions,
    /// Expected classification, checked by regression runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridSpec {
    Rect { min: [f64; 2], max: [f64; 2], resolution: usize, margin_cells: usize },
    Disc { centers: Vec<[f64; 2]>, radius: f64, resolution: usize, margin_cells: usize },
    Annulus { center: [f64; 2], inner: f64, outer: f64, resolution: usize, margin_cells: usize },
    Bidisc { radius: f64, resolution: usize, angles: usize, margin_cells: usize },
    Hartogs { radius: f64, split: f64, resolution: usize, angles: usize, margin_cells: usize },
    /// Explicit points (real coordinates, complex points flattened as real then imaginary
    /// parts) with explicit margin indices and a nominal cell size.
    Points {
        points: Vec<Vec<f64>>,
        #[serde(default)]
        n_complex: usize,
        margin: Vec<usize>,
        cell: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChainSpec {
    /// Radial chain applied to every grid component.
    Radial {
        outer: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        inner: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        neck: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        floor: Option<Vec<f64>>,
    },
    /// Grid indices of each set, for single-component grids.
    Explicit { sets: Vec<Vec<usize>> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Affine,
    Monomial,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_real: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_complex: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<u32>,
    #[serde(default)]
    pub laurent: bool,
    /// Center the monomials at each component's center.
    #[serde(default)]
    pub local: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioOptions {
    #[serde(rename = "C")]
    pub cs: Vec<f64>,
    pub tol: f64,
    /// Highest degree of the modulus sweep used for C > 1 (algebra families).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_degree_sweep: Option<u32>,
    pub k_cap: u32,
    pub polygon_count: usize,
    /// Exhaustion path; chosen from the grid and family when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<ExhaustionPath>,
    /// Monomial degree of the witness family (defaults to the family degree).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_degree: Option<u32>,
    pub exhaustion: ExhaustionOptions,
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        ScenarioOptions {
            cs: vec![1.0],
            tol: 1e-9,
            max_degree_sweep: None,
            k_cap: 512,
            polygon_count: 3,
            path: None,
            witness_degree: None,
            exhaustion: ExhaustionOptions::default(),
        }
    }
}

/// A loaded and validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub grid: Grid,
    /// One chain per grid component.
    pub chains: Vec<CompactChain>,
    /// One family per grid component (identical unless the family is local).
    pub families: Vec<FunctionFamily>,
}

const BUILTINS: [(&str, &str); 5] = [
    ("disc", include_str!("../scenarios/disc.json")),
    ("annulus", include_str!("../scenarios/annulus.json")),
    ("polydisc", include_str!("../scenarios/polydisc.json")),
    ("two_disc", include_str!("../scenarios/two_disc.json")),
    ("hartogs", include_str!("../scenarios/hartogs.json")),
];

pub fn builtin_names() -> Vec<&'static str> {
    BUILTINS.iter().map(|(n, _)| *n).collect()
}

pub fn builtin_source(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

impl Scenario {
    /// Loads `builtin:NAME` or a JSON file path.
    pub fn load(spec: &str) -> Result<Self> {
        if let Some(name) = spec.strip_prefix("builtin:") {
            let text = builtin_source(name).ok_or_else(|| {
                Error::invalid(format!("unknown builtin scenario `{name}` (known: {})", builtin_names().join(", ")))
            })?;
            return Self::from_json(text);
        }
        let path = Path::new(spec);
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: spec.to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn builtin(name: &str) -> Result<Self> {
        Self::load(&format!("builtin:{name}"))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let key = if path == "." { "(root)".to_string() } else { path };
            Error::schema(key, e.into_inner().to_string())
        })?;
        Self::from_file(file)
    }

    pub fn from_file(file: ScenarioFile) -> Result<Self> {
        validate_options(&file.options)?;
        let grid = build_grid(&file.grid)?;
        let chains = build_chains(&grid, &file.chain)?;
        let families = build_families(&grid, &file.family)?;
        Ok(Scenario { file, grid, chains, families })
    }

    pub fn name(&self) -> &str {
        &self.file.name
    }

    pub fn options(&self) -> &ScenarioOptions {
        &self.file.options
    }

    /// Family of component 0.
    pub fn family(&self) -> &FunctionFamily {
        &self.families[0]
    }

    /// Monomial generator matching the family (None for affine families).
    pub fn generator(&self, component: usize) -> Option<MonomialGenerator> {
        let spec = &self.file.family;
        if spec.kind != FamilyKind::Monomial {
            return None;
        }
        Some(MonomialGenerator {
            n_complex: spec.n_complex.unwrap_or(1),
            laurent: spec.laurent,
            center: if spec.local { Some(self.grid.center(component).zs()) } else { None },
        })
    }

    /// Chain whose sets are the unions of the per-component chain sets.
    pub fn union_set(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.chains.iter().flat_map(|c| c.set(i).iter().copied()).collect();
        out.sort_unstable();
        out
    }

    pub fn chain_len(&self) -> usize {
        self.chains.iter().map(|c| c.len()).min().unwrap_or(0)
    }
}

fn validate_options(o: &ScenarioOptions) -> Result<()> {
    if o.cs.is_empty() || o.cs.iter().any(|&c| !(c >= 1.0) || !c.is_finite()) {
        return Err(Error::schema("options.C", "every C must be a finite number >= 1"));
    }
    if !(o.tol >= 0.0) || !o.tol.is_finite() {
        return Err(Error::schema("options.tol", "tolerance must be a finite number >= 0"));
    }
    if o.k_cap == 0 {
        return Err(Error::schema("options.k_cap", "must be positive"));
    }
    if matches!(o.max_degree_sweep, Some(0)) {
        return Err(Error::schema("options.max_degree_sweep", "must be positive"));
    }
    let e = &o.exhaustion;
    if !(e.threshold_base > 1.0) || !(e.scale_base > 1.0) || !(e.gap_margin >= 0.0) {
        return Err(Error::schema("options.exhaustion", "bases must exceed 1 and gap_margin must be >= 0"));
    }
    Ok(())
}

fn check_cells(resolution: usize, margin_cells: usize) -> Result<()> {
    if resolution < 8 {
        return Err(Error::schema("grid.resolution", format!("must be at least 8 cells per axis, got {resolution}")));
    }
    if margin_cells < 1 {
        return Err(Error::schema("grid.margin_cells", "must be at least 1"));
    }
    Ok(())
}

fn c(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn build_grid(spec: &GridSpec) -> Result<Grid> {
    let grid = match spec {
        GridSpec::Rect { min, max, resolution, margin_cells } => {
            check_cells(*resolution, *margin_cells)?;
            Grid::rect(*min, *max, *resolution, *margin_cells)
        }
        GridSpec::Disc { centers, radius, resolution, margin_cells } => {
            check_cells(*resolution, *margin_cells)?;
            let cs: Vec<Complex64> = centers.iter().map(|&p| c(p)).collect();
            Grid::discs(&cs, *radius, *resolution, *margin_cells)
        }
        GridSpec::Annulus { center, inner, outer, resolution, margin_cells } => {
            check_cells(*resolution, *margin_cells)?;
            Grid::annulus(c(*center), *inner, *outer, *resolution, *margin_cells)
        }
        GridSpec::Bidisc { radius, resolution, angles, margin_cells } => {
            check_cells(*resolution, *margin_cells)?;
            Grid::bidisc(*radius, *resolution, *angles, *margin_cells)
        }
        GridSpec::Hartogs { radius, split, resolution, angles, margin_cells } => {
            check_cells(*resolution, *margin_cells)?;
            Grid::hartogs(*radius, *split, *resolution, *angles, *margin_cells)
        }
        GridSpec::Points { points, n_complex, margin, cell } => {
            let pts = points
                .iter()
                .map(|coords| {
                    let n_real = coords.len().checked_sub(2 * n_complex).ok_or_else(|| {
                        Error::schema("grid.points", format!("point has {} coordinates, fewer than 2·n_complex", coords.len()))
                    })?;
                    crate::families::Point::new(coords.clone(), crate::families::Dim { n_real, n_complex: *n_complex })
                })
                .collect::<Result<Vec<_>>>()?;
            Grid::from_points("points", pts, margin, *cell)
        }
    };
    grid.map_err(|e| match e {
        Error::InvalidParameter(m) => Error::schema("grid", m),
        other => other,
    })
}

fn build_chains(grid: &Grid, spec: &ChainSpec) -> Result<Vec<CompactChain>> {
    match spec {
        ChainSpec::Radial { outer, inner, neck, floor } => {
            let radial = RadialSpec { outer: outer.clone(), inner: inner.clone(), neck: neck.clone(), floor: floor.clone() };
            (0..grid.component_count()).map(|comp| radial_chain(grid, comp, &radial)).collect()
        }
        ChainSpec::Explicit { sets } => {
            if grid.component_count() != 1 {
                return Err(Error::schema("chain.sets", "explicit chains need a single-component grid"));
            }
            Ok(vec![CompactChain::new(grid, sets.clone())?])
        }
    }
}

fn build_families(grid: &Grid, spec: &FamilySpec) -> Result<Vec<FunctionFamily>> {
    let dim = grid.dim();
    let missing = |key: &str| Error::schema(format!("family.{key}"), "required for this family kind");
    match spec.kind {
        FamilyKind::Affine => {
            let n = spec.n_real.ok_or_else(|| missing("n_real"))?;
            if n != dim.n_real || dim.n_complex != 0 {
                return Err(Error::schema("family.n_real", format!("grid has {} real coordinates", dim.n_real)));
            }
            if spec.n_complex.is_some() || spec.max_degree.is_some() || spec.laurent || spec.local {
                return Err(Error::schema("family", "affine families take only n_real"));
            }
            let fam = FunctionFamily::affine(n)?;
            Ok(vec![fam; grid.component_count()])
        }
        FamilyKind::Monomial => {
            let n = spec.n_complex.ok_or_else(|| missing("n_complex"))?;
            let d = spec.max_degree.ok_or_else(|| missing("max_degree"))?;
            if n != dim.n_complex || dim.n_real != 0 {
                return Err(Error::schema("family.n_complex", format!("grid has {} complex coordinates", dim.n_complex)));
            }
            if d == 0 {
                return Err(Error::schema("family.max_degree", "must be at least 1"));
            }
            (0..grid.component_count())
                .map(|comp| {
                    let center = if spec.local { Some(grid.center(comp).zs()) } else { None };
                    FunctionFamily::monomials_centered(n, d, spec.laurent, center.as_deref())
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_load() {
        for name in builtin_names() {
            let s = Scenario::builtin(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(s.name(), name);
            assert_eq!(s.chains.len(), s.grid.component_count());
            assert!(s.chain_len() >= 4);
        }
    }

    #[test]
    fn unknown_keys_are_named() {
        let mut v: serde_json::Value = serde_json::from_str(builtin_source("disc").unwrap()).unwrap();
        v["grid"]["resolutoin"] = serde_json::json!(60);
        match Scenario::from_json(&v.to_string()) {
            Err(Error::Schema { message, .. }) => assert!(message.contains("resolutoin"), "{message}"),
            other => panic!("unexpected {other:?}"),
        }
        let mut v: serde_json::Value = serde_json::from_str(builtin_source("disc").unwrap()).unwrap();
        v["options"]["k_cap"] = serde_json::json!("many");
        match Scenario::from_json(&v.to_string()) {
            Err(Error::Schema { key, .. }) => assert_eq!(key, "options.k_cap"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn resolution_floor() {
        let mut v: serde_json::Value = serde_json::from_str(builtin_source("disc").unwrap()).unwrap();
        v["grid"]["resolution"] = serde_json::json!(6);
        match Scenario::from_json(&v.to_string()) {
            Err(Error::Schema { key, .. }) => assert_eq!(key, "grid.resolution"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_builtin() {
        assert!(Scenario::load("builtin:torus").is_err());
        assert!(matches!(Scenario::load("/nonexistent/scenario.json"), Err(Error::Io { .. })));
    }
}
