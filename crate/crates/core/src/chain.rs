//! Nested compact chains K_1 ⊂ K_2 ⊂ ... ⊂ K_N of grid points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::Point;
use crate::grid::Grid;

#[derive(Clone, Debug, PartialEq)]
pub struct CompactChain {
    sets: Vec<Vec<usize>>,
    member: Vec<Vec<bool>>,
}

impl CompactChain {
    /// Validates strict nesting, one-cell interior margins (every neighbor of a point of
    /// K_i lies in K_{i+1}) and disjointness from the grid margin.
    pub fn new(grid: &Grid, sets: Vec<Vec<usize>>) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::Chain("chain needs at least one set".into()));
        }
        let n = grid.len();
        let mut member = Vec::with_capacity(sets.len());
        let mut sorted_sets = Vec::with_capacity(sets.len());
        for (i, set) in sets.into_iter().enumerate() {
            let mut s = set;
            s.sort_unstable();
            s.dedup();
            if s.is_empty() {
                return Err(Error::Chain(format!("K_{} is empty", i + 1)));
            }
            let mut flags = vec![false; n];
            for &p in &s {
                if p >= n {
                    return Err(Error::Chain(format!("K_{} references point #{p} outside the grid", i + 1)));
                }
                if grid.is_margin(p) {
                    return Err(Error::Chain(format!("K_{} touches the margin at point #{p}", i + 1)));
                }
                flags[p] = true;
            }
            member.push(flags);
            sorted_sets.push(s);
        }
        for i in 0..sorted_sets.len() - 1 {
            let outer = &member[i + 1];
            if sorted_sets[i + 1].len() <= sorted_sets[i].len() {
                return Err(Error::Chain(format!("K_{} ⊂ K_{} is not strict", i + 1, i + 2)));
            }
            for &p in &sorted_sets[i] {
                if !outer[p] {
                    return Err(Error::Chain(format!("K_{} is not contained in K_{} (point #{p})", i + 1, i + 2)));
                }
                if let Some(&q) = grid.neighbors(p).iter().find(|&&q| !outer[q]) {
                    return Err(Error::Chain(format!(
                        "K_{} is not one cell inside K_{}: neighbor #{q} of #{p} is missing",
                        i + 1,
                        i + 2
                    )));
                }
            }
        }
        Ok(CompactChain { sets: sorted_sets, member })
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Grid indices of K_i (1-based); indices beyond N return K_N.
    pub fn set(&self, i: usize) -> &[usize] {
        let k = i.clamp(1, self.sets.len());
        &self.sets[k - 1]
    }

    /// Membership of a grid point in K_i (1-based, clamped as in [`CompactChain::set`]).
    pub fn contains(&self, i: usize, p: usize) -> bool {
        let k = i.clamp(1, self.sets.len());
        self.member[k - 1][p]
    }

    pub fn points(&self, grid: &Grid, i: usize) -> Vec<Point> {
        self.set(i).iter().map(|&p| grid.point(p).clone()).collect()
    }

    /// Points of K_outer ∖ K_inner.
    pub fn shell(&self, inner: usize, outer: usize) -> Vec<usize> {
        self.set(outer).iter().copied().filter(|&p| !self.contains(inner, p)).collect()
    }
}

/// Radial chain description around a component center.
///
/// In one complex (or two real) dimensions K_i = {inner_i ≤ r ≤ outer_i}. In two complex
/// dimensions K_i = {|z| ≤ outer_i, |w| ≤ outer_i}, further restricted to
/// {|z| ≤ neck_i or |w| ≥ floor_i} when both are given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialSpec {
    pub outer: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neck: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor: Option<Vec<f64>>,
}

impl RadialSpec {
    pub fn discs(outer: Vec<f64>) -> Self {
        RadialSpec { outer, inner: None, neck: None, floor: None }
    }

    fn validate(&self) -> Result<()> {
        let n = self.outer.len();
        for (key, v) in [("inner", &self.inner), ("neck", &self.neck), ("floor", &self.floor)] {
            if let Some(v) = v {
                if v.len() != n {
                    return Err(Error::schema(format!("chain.{key}"), format!("expected {n} entries, got {}", v.len())));
                }
            }
        }
        if self.neck.is_some() != self.floor.is_some() {
            return Err(Error::schema("chain.neck", "neck and floor must be given together"));
        }
        Ok(())
    }

    fn contains(&self, i: usize, p: &Point, center: &Point) -> bool {
        const EPS: f64 = 1e-9;
        let dim = p.dim();
        if dim.n_complex == 2 {
            let rz = (p.z(0) - center.z(0)).norm();
            let rw = (p.z(1) - center.z(1)).norm();
            let o = self.outer[i];
            if rz > o + EPS || rw > o + EPS {
                return false;
            }
            match (&self.neck, &self.floor) {
                (Some(nk), Some(fl)) => rz <= nk[i] + EPS || rw >= fl[i] - EPS,
                _ => true,
            }
        } else {
            let r = p.distance(center);
            let lo = self.inner.as_ref().map_or(0.0, |v| v[i]);
            r <= self.outer[i] + EPS && r >= lo - EPS
        }
    }
}

/// Builds a radial chain on one grid component.
pub fn radial_chain(grid: &Grid, component: usize, spec: &RadialSpec) -> Result<CompactChain> {
    spec.validate()?;
    let center = grid.center(component);
    let idx = grid.component_indices(component);
    let sets = (0..spec.outer.len())
        .map(|i| {
            idx.iter()
                .copied()
                .filter(|&p| spec.contains(i, grid.point(p), center))
                .collect()
        })
        .collect();
    CompactChain::new(grid, sets)
}
