//! Feature embedding: each point becomes the column of its basis evaluations.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{FunctionFamily, Point};

/// m x k evaluation matrix, stored column by column.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    m: usize,
    k: usize,
    data: Vec<f64>,
    fingerprint: String,
    descriptions: Vec<String>,
    points: Vec<Point>,
}

impl FeatureMatrix {
    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.k
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.m..(j + 1) * self.m]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.m + i]
    }

    /// Column-major backing store.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.k).map(|j| self.get(i, j)).collect()
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn descriptions(&self) -> &[String] {
        &self.descriptions
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// Row-major CSV with one header line of basis descriptions.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.descriptions.iter().map(|d| csv_quote(d)).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for i in 0..self.m {
            let row: Vec<String> = (0..self.k)
                .map(|j| crate::output::fmt_f64(self.get(i, j)))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Evaluates every basis function at every point of `s`.
pub fn embed(family: &FunctionFamily, s: &[Point]) -> Result<FeatureMatrix> {
    if s.is_empty() {
        return Err(Error::invalid("cannot embed an empty point set"));
    }
    let columns: Vec<Vec<f64>> = s
        .par_iter()
        .enumerate()
        .map(|(j, p)| family.features(p).map_err(|e| Error::at_point(j, e)))
        .collect::<Result<_>>()?;
    let m = family.len();
    let mut data = Vec::with_capacity(m * s.len());
    for c in columns {
        data.extend_from_slice(&c);
    }
    Ok(FeatureMatrix {
        m,
        k: s.len(),
        data,
        fingerprint: family.fingerprint(),
        descriptions: family.descriptions(),
        points: s.to_vec(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnseparatedPair {
    pub first: usize,
    pub second: usize,
    pub distance: f64,
}

/// Pairs of points whose feature columns are closer than `tol` in max-norm.
pub fn separation_check(
    family: &FunctionFamily,
    s: &[Point],
    tol: f64,
) -> Result<Vec<UnseparatedPair>> {
    if !(tol > 0.0) {
        return Err(Error::invalid("separation tolerance must be positive"));
    }
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let fm = embed(family, s)?;
    let mut out = Vec::new();
    for a in 0..fm.cols() {
        for b in a + 1..fm.cols() {
            let d = fm
                .column(a)
                .iter()
                .zip(fm.column(b))
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            if d < tol {
                out.push(UnseparatedPair { first: a, second: b, distance: d });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{BasisFunction, Dim};
    use num_complex::Complex64;

    fn z(re: f64, im: f64) -> Point {
        Point::complex(&[Complex64::new(re, im)]).unwrap()
    }

    #[test]
    fn embed_examples() {
        let a = embed(&FunctionFamily::affine(2).unwrap(), &[Point::real(vec![0.0, 0.0]).unwrap()])
            .unwrap();
        assert_eq!(a.column(0), &[1.0, 0.0, 0.0]);

        let m1 = embed(&FunctionFamily::monomials(1, 1, false).unwrap(), &[z(1.0, 0.0)]).unwrap();
        assert_eq!(m1.column(0), &[1.0, 1.0, 0.0]);

        let w = Complex64::new(0.5, 0.5);
        let sq = w * w;
        let m2 = embed(&FunctionFamily::monomials(1, 2, false).unwrap(), &[z(0.5, 0.5)]).unwrap();
        assert_eq!(m2.column(0), &[1.0, w.re, w.im, sq.re, sq.im]);
        assert_eq!(m2.column(0), &[1.0, 0.5, 0.5, 0.0, 0.5]);
    }

    #[test]
    fn embed_rejects_empty_and_reports_index() {
        let fam = FunctionFamily::monomials(1, 1, true).unwrap();
        assert!(embed(&fam, &[]).is_err());
        match embed(&fam, &[z(1.0, 0.0), z(0.0, 0.0)]) {
            Err(Error::AtPoint { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected indexed error, got {other:?}"),
        }
    }

    #[test]
    fn separation_examples() {
        let aff = FunctionFamily::affine(2).unwrap();
        let pts = vec![
            Point::real(vec![0.0, 0.0]).unwrap(),
            Point::real(vec![1.0, 0.0]).unwrap(),
        ];
        assert!(separation_check(&aff, &pts, 1e-9).unwrap().is_empty());

        let m1 = FunctionFamily::monomials(1, 1, false).unwrap();
        let pm = vec![z(0.5, 0.0), z(-0.5, 0.0)];
        assert!(separation_check(&m1, &pm, 1e-9).unwrap().is_empty());

        let deg2 = FunctionFamily::linear_span(
            Dim::complex(1),
            vec![BasisFunction::re_monomial(vec![2]), BasisFunction::im_monomial(vec![2])],
        )
        .unwrap();
        let flagged = separation_check(&deg2, &pm, 1e-9).unwrap();
        assert_eq!(flagged.len(), 1);
        assert_eq!((flagged[0].first, flagged[0].second), (0, 1));
    }

    #[test]
    fn csv_export_is_row_major() {
        let fm = embed(
            &FunctionFamily::affine(1).unwrap(),
            &[Point::real(vec![2.0]).unwrap(), Point::real(vec![3.0]).unwrap()],
        )
        .unwrap();
        let csv = fm.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "1,x1");
        assert_eq!(lines.len(), 3);
        assert!(lines[2].starts_with("2.0000000000000000e0"));
    }
}
