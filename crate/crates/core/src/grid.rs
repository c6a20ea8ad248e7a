//! Discretized domains: finite point sets with adjacency, an outer margin layer and
//! component labels.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::families::{Dim, Point};

/// Lattice position of a planar grid point, used for rendering.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatticeCell {
    pub ix: i64,
    pub iy: i64,
}

#[derive(Clone, Debug)]
pub struct Grid {
    name: String,
    dim: Dim,
    points: Vec<Point>,
    margin: Vec<bool>,
    outside: Vec<bool>,
    component: Vec<usize>,
    centers: Vec<Point>,
    neighbors: Vec<Vec<usize>>,
    cell: f64,
    lattice: Option<Vec<LatticeCell>>,
    lattice_frame: Option<(f64, f64, f64)>,
}

impl Grid {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    /// True for points on the outer margin layer (including points outside the domain).
    pub fn is_margin(&self, i: usize) -> bool {
        self.margin[i]
    }

    pub fn margin_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.margin[i]).collect()
    }

    /// True for grid points that lie outside the domain itself.
    pub fn is_outside(&self, i: usize) -> bool {
        self.outside[i]
    }

    pub fn component(&self, i: usize) -> usize {
        self.component[i]
    }

    pub fn component_count(&self) -> usize {
        self.centers.len()
    }

    pub fn component_indices(&self, c: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.component[i] == c).collect()
    }

    pub fn center(&self, c: usize) -> &Point {
        &self.centers[c]
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    /// Grid spacing (radial step for polar grids).
    pub fn cell(&self) -> f64 {
        self.cell
    }

    pub fn lattice(&self) -> Option<&[LatticeCell]> {
        self.lattice.as_deref()
    }

    /// (x0, y0, step) mapping lattice cells back to coordinates.
    pub fn lattice_frame(&self) -> Option<(f64, f64, f64)> {
        self.lattice_frame
    }

    /// Index of the grid point closest to `p` (lowest index on ties).
    pub fn nearest(&self, p: &Point) -> Option<usize> {
        let mut best: Option<(f64, usize)> = None;
        for (i, q) in self.points.iter().enumerate() {
            let d = q.distance(p);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, i));
            }
        }
        best.map(|(_, i)| i)
    }

    /// Explicit point grid without adjacency.
    pub fn from_points(name: &str, points: Vec<Point>, margin: &[usize], cell: f64) -> Result<Self> {
        let dim = points
            .first()
            .map(|p| p.dim())
            .ok_or_else(|| Error::invalid("point grid needs at least one point"))?;
        if points.iter().any(|p| p.dim() != dim) {
            return Err(Error::invalid("point grid mixes dimensions"));
        }
        let n = points.len();
        let mut flags = vec![false; n];
        for &i in margin {
            if i >= n {
                return Err(Error::invalid(format!("margin index {i} out of range")));
            }
            flags[i] = true;
        }
        let center = Point::new(vec![0.0; dim.len()], dim)?;
        Ok(Grid {
            name: name.to_string(),
            dim,
            points,
            margin: flags,
            outside: vec![false; n],
            component: vec![0; n],
            centers: vec![center],
            neighbors: vec![Vec::new(); n],
            cell,
            lattice: None,
            lattice_frame: None,
        })
    }

    /// Axis-aligned real rectangle with `resolution` cells per axis.
    pub fn rect(min: [f64; 2], max: [f64; 2], resolution: usize, margin_cells: usize) -> Result<Self> {
        check_resolution(resolution, margin_cells)?;
        if !(max[0] > min[0]) || !(max[1] > min[1]) || (max[0] - min[0] - (max[1] - min[1])).abs() > 1e-12 {
            return Err(Error::invalid("rect grid needs a square with max > min"));
        }
        let step = (max[0] - min[0]) / resolution as f64;
        let center = [(min[0] + max[0]) / 2.0, (min[1] + max[1]) / 2.0];
        let comp = PlanarComponent {
            origin: min,
            step,
            resolution,
            center: Point::real(center.to_vec())?,
            inside: Box::new(|_, _| true),
        };
        build_planar("rect", vec![comp], margin_cells, false)
    }

    /// Union of open discs of equal radius, one component per center.
    pub fn discs(centers: &[Complex64], radius: f64, resolution: usize, margin_cells: usize) -> Result<Self> {
        check_resolution(resolution, margin_cells)?;
        if !(radius > 0.0) || centers.is_empty() {
            return Err(Error::invalid("disc grid needs a positive radius and a center"));
        }
        for (a, ca) in centers.iter().enumerate() {
            for cb in &centers[a + 1..] {
                if (ca - cb).norm() <= 2.0 * radius {
                    return Err(Error::invalid("disc components must be disjoint"));
                }
            }
        }
        let step = 2.0 * radius / resolution as f64;
        let comps = centers
            .iter()
            .map(|&c| {
                Ok(PlanarComponent {
                    origin: [c.re - radius, c.im - radius],
                    step,
                    resolution,
                    center: Point::complex(&[c])?,
                    inside: Box::new(move |x: f64, y: f64| (Complex64::new(x, y) - c).norm() < radius - 1e-12),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        build_planar("disc", comps, margin_cells, true)
    }

    /// Open annulus inner < |z - center| < outer.
    pub fn annulus(center: Complex64, inner: f64, outer: f64, resolution: usize, margin_cells: usize) -> Result<Self> {
        check_resolution(resolution, margin_cells)?;
        if !(inner > 0.0 && outer > inner) {
            return Err(Error::invalid("annulus needs 0 < inner < outer"));
        }
        let step = 2.0 * outer / resolution as f64;
        let comp = PlanarComponent {
            origin: [center.re - outer, center.im - outer],
            step,
            resolution,
            center: Point::complex(&[center])?,
            inside: Box::new(move |x: f64, y: f64| {
                let r = (Complex64::new(x, y) - center).norm();
                r > inner + 1e-12 && r < outer - 1e-12
            }),
        };
        build_planar("annulus", vec![comp], margin_cells, true)
    }

    /// Polar product grid of the bidisc {|z| < radius, |w| < radius}.
    pub fn bidisc(radius: f64, resolution: usize, angles: usize, margin_cells: usize) -> Result<Self> {
        build_polar("bidisc", radius, resolution, angles, margin_cells, None)
    }

    /// Polar product grid of the bidisc together with the Hartogs figure
    /// {|z| < split or |w| > split}; points of the removed block are kept as margin points.
    pub fn hartogs(radius: f64, split: f64, resolution: usize, angles: usize, margin_cells: usize) -> Result<Self> {
        if !(split > 0.0 && split < radius) {
            return Err(Error::invalid("hartogs split must lie strictly between 0 and the radius"));
        }
        build_polar("hartogs", radius, resolution, angles, margin_cells, Some(split))
    }
}

fn check_resolution(resolution: usize, margin_cells: usize) -> Result<()> {
    if resolution < 8 {
        return Err(Error::invalid(format!("resolution must be at least 8 cells per axis, got {resolution}")));
    }
    if margin_cells < 1 {
        return Err(Error::invalid("margin_cells must be at least 1"));
    }
    Ok(())
}

struct PlanarComponent {
    origin: [f64; 2],
    step: f64,
    resolution: usize,
    center: Point,
    inside: Box<dyn Fn(f64, f64) -> bool>,
}

fn build_planar(name: &str, comps: Vec<PlanarComponent>, margin_cells: usize, complex: bool) -> Result<Grid> {
    let mut points = Vec::new();
    let mut component = Vec::new();
    let mut lattice = Vec::new();
    let mut margin = Vec::new();
    let mut neighbors = Vec::new();
    let mut centers = Vec::new();
    let step = comps[0].step;
    let frame_origin = comps
        .iter()
        .fold([f64::INFINITY, f64::INFINITY], |a, c| [a[0].min(c.origin[0]), a[1].min(c.origin[1])]);
    let mc = margin_cells as i64;
    for (ci, comp) in comps.iter().enumerate() {
        let n = comp.resolution as i64;
        let coord = |ix: i64, iy: i64| {
            (comp.origin[0] + ix as f64 * comp.step, comp.origin[1] + iy as f64 * comp.step)
        };
        let inside_at = |ix: i64, iy: i64| {
            if ix < 0 || iy < 0 || ix > n || iy > n {
                return false;
            }
            let (x, y) = coord(ix, iy);
            (comp.inside)(x, y)
        };
        let mut index = std::collections::HashMap::new();
        for iy in 0..=n {
            for ix in 0..=n {
                if !inside_at(ix, iy) {
                    continue;
                }
                let (x, y) = coord(ix, iy);
                let p = if complex {
                    Point::complex(&[Complex64::new(x, y)])?
                } else {
                    Point::real(vec![x, y])?
                };
                index.insert((ix, iy), points.len());
                points.push(p);
                component.push(ci);
                let gx = ((comp.origin[0] - frame_origin[0]) / step).round() as i64 + ix;
                let gy = ((comp.origin[1] - frame_origin[1]) / step).round() as i64 + iy;
                lattice.push(LatticeCell { ix: gx, iy: gy });
                let mut near_outside = false;
                'scan: for dy in -mc..=mc {
                    for dx in -mc..=mc {
                        if !inside_at(ix + dx, iy + dy) {
                            near_outside = true;
                            break 'scan;
                        }
                    }
                }
                margin.push(near_outside);
            }
        }
        for iy in 0..=n {
            for ix in 0..=n {
                if let Some(&i) = index.get(&(ix, iy)) {
                    let mut nb = Vec::new();
                    for dy in -1..=1 {
                        for dx in -1..=1 {
                            if (dx, dy) == (0, 0) {
                                continue;
                            }
                            if let Some(&j) = index.get(&(ix + dx, iy + dy)) {
                                nb.push(j);
                            }
                        }
                    }
                    nb.sort_unstable();
                    debug_assert_eq!(i, neighbors.len());
                    neighbors.push(nb);
                }
            }
        }
        centers.push(comp.center.clone());
    }
    if points.is_empty() {
        return Err(Error::invalid("grid has no points inside the domain"));
    }
    let dim = points[0].dim();
    let n = points.len();
    Ok(Grid {
        name: name.to_string(),
        dim,
        points,
        margin,
        outside: vec![false; n],
        component,
        centers,
        neighbors,
        cell: step,
        lattice: Some(lattice),
        lattice_frame: Some((frame_origin[0], frame_origin[1], step)),
    })
}

/// Positions (ring, angle) of one polar factor: the center, then rings 1..resolution-1.
fn polar_factor(resolution: usize, angles: usize) -> Vec<(usize, usize)> {
    let mut out = vec![(0, 0)];
    for r in 1..resolution {
        for t in 0..angles {
            out.push((r, t));
        }
    }
    out
}

fn polar_neighbors(pos: (usize, usize), resolution: usize, angles: usize) -> Vec<(usize, usize)> {
    let (r, t) = pos;
    let mut out = Vec::new();
    let rings = [r.checked_sub(1), Some(r), if r + 1 < resolution { Some(r + 1) } else { None }];
    for rr in rings.into_iter().flatten() {
        if rr == 0 {
            out.push((0, 0));
        } else if r == 0 {
            for tt in 0..angles {
                out.push((rr, tt));
            }
        } else {
            for dt in [angles - 1, 0, 1] {
                out.push((rr, (t + dt) % angles));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn build_polar(
    name: &str,
    radius: f64,
    resolution: usize,
    angles: usize,
    margin_cells: usize,
    split: Option<f64>,
) -> Result<Grid> {
    check_resolution(resolution, margin_cells)?;
    if !(radius > 0.0) {
        return Err(Error::invalid("polar grid needs a positive radius"));
    }
    if angles < 4 {
        return Err(Error::invalid("polar grid needs at least 4 angles per ring"));
    }
    let step = radius / resolution as f64;
    let factor = polar_factor(resolution, angles);
    let slot = |p: (usize, usize)| if p.0 == 0 { 0 } else { 1 + (p.0 - 1) * angles + p.1 };
    let nf = factor.len();
    let to_z = |p: (usize, usize)| {
        let r = p.0 as f64 * step;
        let th = 2.0 * std::f64::consts::PI * p.1 as f64 / angles as f64;
        Complex64::from_polar(r, th)
    };
    let mut points = Vec::with_capacity(nf * nf);
    let mut outside = Vec::with_capacity(nf * nf);
    let mut touch = Vec::with_capacity(nf * nf);
    for &pz in &factor {
        for &pw in &factor {
            points.push(Point::complex(&[to_z(pz), to_z(pw)])?);
            let rz = pz.0 as f64 * step;
            let rw = pw.0 as f64 * step;
            let out = match split {
                Some(s) => !(rz < s - 1e-12 || rw > s + 1e-12),
                None => false,
            };
            outside.push(out);
            touch.push(pz.0 + 1 == resolution || pw.0 + 1 == resolution);
        }
    }
    let mut neighbors = Vec::with_capacity(nf * nf);
    for &pz in &factor {
        let nz = polar_neighbors(pz, resolution, angles);
        for &pw in &factor {
            let nw = polar_neighbors(pw, resolution, angles);
            let own = slot(pz) * nf + slot(pw);
            let mut nb = Vec::with_capacity(nz.len() * nw.len());
            for &a in &nz {
                for &b in &nw {
                    let j = slot(a) * nf + slot(b);
                    if j != own {
                        nb.push(j);
                    }
                }
            }
            nb.sort_unstable();
            neighbors.push(nb);
        }
    }
    let mut margin = dilate(&outside, &neighbors, margin_cells);
    let edge = dilate(&touch, &neighbors, margin_cells - 1);
    for (m, e) in margin.iter_mut().zip(edge) {
        *m |= e;
    }
    let n = points.len();
    Ok(Grid {
        name: name.to_string(),
        dim: Dim::complex(2),
        points,
        margin,
        outside,
        component: vec![0; n],
        centers: vec![Point::complex(&[Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)])?],
        neighbors,
        cell: step,
        lattice: None,
        lattice_frame: None,
    })
}

/// Grows a flag set along adjacency `steps` times.
fn dilate(seed: &[bool], neighbors: &[Vec<usize>], steps: usize) -> Vec<bool> {
    let mut cur = seed.to_vec();
    for _ in 0..steps {
        let mut next = cur.clone();
        for (i, nb) in neighbors.iter().enumerate() {
            if cur[i] {
                for &j in nb {
                    next[j] = true;
                }
            }
        }
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_grid_shape() {
        let g = Grid::discs(&[Complex64::new(0.0, 0.0)], 1.0, 60, 1).unwrap();
        assert!((g.cell() - 1.0 / 30.0).abs() < 1e-15);
        assert!(g.points().iter().all(|p| p.z(0).norm() < 1.0));
        // every margin point is within one diagonal cell of the unit circle
        for i in g.margin_indices() {
            assert!(g.point(i).z(0).norm() > 1.0 - 2.0_f64.sqrt() / 30.0 - 1e-12);
        }
        let origin = g.nearest(&Point::complex(&[Complex64::new(0.0, 0.0)]).unwrap()).unwrap();
        assert_eq!(g.neighbors(origin).len(), 8);
        assert!(!g.is_margin(origin));
    }

    #[test]
    fn neighbors_are_symmetric() {
        let g = Grid::hartogs(1.0, 0.5, 10, 8, 1).unwrap();
        for i in 0..g.len() {
            for &j in g.neighbors(i) {
                assert!(g.neighbors(j).contains(&i));
            }
        }
        let d = Grid::discs(&[Complex64::new(-2.0, 0.0), Complex64::new(2.0, 0.0)], 1.0, 20, 1).unwrap();
        assert_eq!(d.component_count(), 2);
        for i in 0..d.len() {
            for &j in d.neighbors(i) {
                assert!(d.neighbors(j).contains(&i));
                assert_eq!(d.component(i), d.component(j));
            }
        }
    }

    #[test]
    fn hartogs_outside_block_is_margin() {
        let g = Grid::hartogs(1.0, 0.5, 20, 8, 1).unwrap();
        let target = Point::complex(&[Complex64::new(0.7, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        let i = g.nearest(&target).unwrap();
        assert!(g.point(i).distance(&target) < 1e-12);
        assert!(g.is_outside(i) && g.is_margin(i));
        let inner = g.nearest(&Point::complex(&[Complex64::new(0.2, 0.0), Complex64::new(0.2, 0.0)]).unwrap()).unwrap();
        assert!(!g.is_margin(inner));
    }

    #[test]
    fn rejects_coarse_resolution() {
        assert!(Grid::discs(&[Complex64::new(0.0, 0.0)], 1.0, 4, 1).is_err());
        assert!(Grid::bidisc(1.0, 10, 8, 0).is_err());
    }
}
