//! Planar convex hull by gift wrapping, used as an independent check of the affine case.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalHull {
    /// Hull vertices in counter-clockwise order; one or two entries for degenerate input.
    pub vertices: Vec<[f64; 2]>,
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

pub fn classical_hull_oracle(points: &[[f64; 2]]) -> Result<ClassicalHull> {
    if points.is_empty() {
        return Err(Error::invalid("hull of an empty point set"));
    }
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() == 1 {
        return Ok(ClassicalHull { vertices: pts });
    }
    let start = pts[0];
    let mut hull = vec![start];
    let mut current = start;
    for _ in 0..=pts.len() {
        let mut next = if pts[0] == current { pts[1] } else { pts[0] };
        for &r in &pts {
            if r == current {
                continue;
            }
            let o = orient(current, next, r);
            if o < 0.0 || (o == 0.0 && dist2(current, r) > dist2(current, next)) {
                next = r;
            }
        }
        if next == start {
            break;
        }
        hull.push(next);
        current = next;
    }
    Ok(ClassicalHull { vertices: hull })
}

impl ClassicalHull {
    /// Inclusive membership with tolerance `tol` measured as Euclidean distance.
    pub fn contains(&self, p: [f64; 2], tol: f64) -> bool {
        match self.vertices.len() {
            1 => dist2(self.vertices[0], p).sqrt() <= tol,
            2 => segment_distance(self.vertices[0], self.vertices[1], p) <= tol,
            n => (0..n).all(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % n];
                orient(a, b, p) / dist2(a, b).sqrt() >= -tol
            }),
        }
    }
}

fn segment_distance(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> f64 {
    let l2 = dist2(a, b);
    let t = (((p[0] - a[0]) * (b[0] - a[0]) + (p[1] - a[1]) * (b[1] - a[1])) / l2).clamp(0.0, 1.0);
    dist2([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])], p).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle() {
        let h = classical_hull_oracle(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.2, 0.2]]).unwrap();
        assert_eq!(h.vertices.len(), 3);
        assert!(h.contains([0.25, 0.25], 1e-12));
        assert!(!h.contains([1.0, 1.0], 1e-12));
        assert!(h.contains([0.5, 0.5], 1e-12));
    }

    #[test]
    fn degenerate_inputs() {
        let seg = classical_hull_oracle(&[[0.0, 0.0], [0.5, 0.0], [1.0, 0.0]]).unwrap();
        assert_eq!(seg.vertices, vec![[0.0, 0.0], [1.0, 0.0]]);
        assert!(seg.contains([0.3, 0.0], 1e-12));
        assert!(!seg.contains([0.3, 0.1], 1e-12));
        let one = classical_hull_oracle(&[[0.3, 0.4], [0.3, 0.4]]).unwrap();
        assert_eq!(one.vertices, vec![[0.3, 0.4]]);
        assert!(one.contains([0.3, 0.4], 0.0));
        assert!(classical_hull_oracle(&[]).is_err());
    }

    #[test]
    fn square_with_collinear_edge_points() {
        let mut pts = Vec::new();
        for i in 0..=4 {
            for j in 0..=4 {
                pts.push([i as f64, j as f64]);
            }
        }
        let h = classical_hull_oracle(&pts).unwrap();
        assert_eq!(h.vertices.len(), 4);
    }
}
