//! Membership in generalized convex hulls.
//!
//! Four modes share one verdict type:
//! * `Cone`: direct check of every cone element, `f(ω) ≤ C·max f(S)`.
//! * `Linear`: `Φ(ω) ∈ conv Φ(S)`, decided by phase-1 LP; infeasibility yields the
//!   separating combination `a` with `a(ω) > max a(S)`.
//! * `C`: `a(ω) ≤ C·max|a|(S)` for all `a` in the span.
//! * `Modulus`: `|b(ω)| ≤ C·max|b|(S)` for every stored complex monomial `b`.
//!
//! The `C` mode is solved as feasibility of
//! `Σ_j C(λ_j − μ_j) Φ(s_j) = Φ(ω)`, `Σ_j (λ_j + μ_j) = 1`, `λ, μ ≥ 0`.
//! Its dual: a Farkas vector `(c, t)` has `±C·c·Φ(s_j) + t ≤ 0` for all j and
//! `c·Φ(ω) + t > 0`, so `a = Σ c_i basis_i` satisfies `a(ω) > −t ≥ C·max|a|(S)`.
//! The sum row lets the constant function take part on equal footing instead of being
//! dropped, which is what makes the support-function reading `C·max|a|` exact.

mod oracle;
mod power;

pub use oracle::{classical_hull_oracle, ClassicalHull};
pub use power::{power_trick_refine, MonomialGenerator, PowerTrickReport, PowerTrickStep};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{FunctionFamily, Point, Structure};
use crate::gelfand::{embed, FeatureMatrix};
use crate::grid::Grid;
use crate::lp::{convex_feasibility, dot, Combination, LpOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HullMode {
    #[serde(rename = "cone")]
    Cone,
    #[serde(rename = "linear")]
    Linear,
    #[serde(rename = "C")]
    C,
    #[serde(rename = "modulus")]
    Modulus,
}

impl std::fmt::Display for HullMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            HullMode::Cone => "cone",
            HullMode::Linear => "linear",
            HullMode::C => "C",
            HullMode::Modulus => "modulus",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for HullMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cone" => Ok(HullMode::Cone),
            "linear" => Ok(HullMode::Linear),
            "C" | "c" => Ok(HullMode::C),
            "modulus" => Ok(HullMode::Modulus),
            other => Err(Error::invalid(format!("unknown hull mode `{other}`"))),
        }
    }
}

/// A function violating the hull inequality at the query point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    /// Coefficients over the basis of the separating function (linear modes), or empty
    /// for a modulus certificate.
    pub coefficients: Vec<f64>,
    /// Index of the violating monomial (modulus mode).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monomial: Option<usize>,
    pub description: String,
    pub value_at_query: f64,
    /// The bound the value must not exceed: `C·max f(S)` (cone), `max a(S)` (linear),
    /// `C·max|a|(S)` (C) or `C·max|b|(S)` (modulus).
    pub sup_over_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HullVerdict {
    pub member: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    /// Violation beyond tolerance for non-members; LP residual (or 0) for members.
    pub gap: f64,
}

impl HullVerdict {
    fn member(coefficients: Option<Vec<f64>>, gap: f64) -> Self {
        HullVerdict { member: true, coefficients, certificate: None, gap }
    }
}

/// A hull query prepared once for a fixed family, sample set, mode and constant.
pub struct HullProblem<'a> {
    family: &'a FunctionFamily,
    mode: HullMode,
    c: f64,
    tol: f64,
    features: FeatureMatrix,
    row_max: Vec<f64>,
    row_min: Vec<f64>,
    modulus_max: Vec<f64>,
    lp_rows: usize,
    lp_cols: Vec<f64>,
    sum_row: usize,
    lp: LpOptions,
}

impl<'a> HullProblem<'a> {
    pub fn new(family: &'a FunctionFamily, s: &[Point], mode: HullMode, c: f64, tol: f64) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::invalid("hull sample set is empty"));
        }
        if family.is_degenerate() {
            return Err(Error::invalid("family contains only constants and separates no points"));
        }
        if !(tol >= 0.0) {
            return Err(Error::invalid("tolerance must be nonnegative"));
        }
        if !(c >= 1.0) || !c.is_finite() {
            return Err(Error::invalid(format!("hull constant must satisfy C >= 1, got {c}")));
        }
        match mode {
            HullMode::Cone if family.structure() != Structure::ConeSample => {
                return Err(Error::invalid("cone mode needs a cone-sample family"));
            }
            HullMode::Linear | HullMode::C if family.structure() == Structure::ConeSample => {
                return Err(Error::invalid("LP modes need a linear-span or algebra family"));
            }
            HullMode::Linear if c != 1.0 => {
                return Err(Error::invalid("linear mode is the C = 1 hull; use mode C"));
            }
            HullMode::Modulus if family.monomial_pairs().is_empty() => {
                return Err(Error::invalid("modulus mode needs an algebra family with monomial pairing"));
            }
            _ => {}
        }
        let features = embed(family, s)?;
        let m = features.rows();
        let k = features.cols();
        let mut row_max = vec![f64::NEG_INFINITY; m];
        let mut row_min = vec![f64::INFINITY; m];
        for j in 0..k {
            for (i, &v) in features.column(j).iter().enumerate() {
                row_max[i] = row_max[i].max(v);
                row_min[i] = row_min[i].min(v);
            }
        }
        let modulus_max = family
            .monomial_pairs()
            .iter()
            .map(|p| {
                (0..k)
                    .map(|j| features.get(p.re, j).hypot(features.get(p.im, j)))
                    .fold(0.0, f64::max)
            })
            .collect();
        let (lp_rows, lp_cols, sum_row) = match mode {
            HullMode::Linear => (m, features.data().to_vec(), 0),
            HullMode::C => {
                let rows = m + 1;
                let mut cols = Vec::with_capacity(2 * k * rows);
                for sign in [1.0, -1.0] {
                    for j in 0..k {
                        cols.extend(features.column(j).iter().map(|v| sign * c * v));
                        cols.push(1.0);
                    }
                }
                (rows, cols, m)
            }
            _ => (0, Vec::new(), 0),
        };
        let lp = LpOptions { feasibility_tol: tol.min(1e-9), ..LpOptions::default() };
        Ok(HullProblem { family, mode, c, tol, features, row_max, row_min, modulus_max, lp_rows, lp_cols, sum_row, lp })
    }

    pub fn family(&self) -> &FunctionFamily {
        self.family
    }

    pub fn mode(&self) -> HullMode {
        self.mode
    }

    pub fn sample_count(&self) -> usize {
        self.features.cols()
    }

    pub fn query(&self, omega: &Point) -> Result<HullVerdict> {
        let feats = self.family.features(omega)?;
        self.query_features(&feats)
    }

    /// Decides membership for a point given by its feature column.
    pub fn query_features(&self, feats: &[f64]) -> Result<HullVerdict> {
        match self.mode {
            HullMode::Cone => Ok(self.cone(feats)),
            HullMode::Modulus => Ok(self.modulus(feats)),
            HullMode::Linear => {
                if let Some(v) = self.prefilter_linear(feats) {
                    return Ok(v);
                }
                if let Some(j) = self.sample_column(feats) {
                    return Ok(HullVerdict::member(Some(unit(self.features.cols(), j, 1.0)), 0.0));
                }
                self.solve_linear(feats)
            }
            HullMode::C => {
                if let Some(v) = self.prefilter_c(feats) {
                    return Ok(v);
                }
                self.solve_c(feats)
            }
        }
    }

    fn cone(&self, feats: &[f64]) -> HullVerdict {
        for (i, &v) in feats.iter().enumerate() {
            let bound = self.c * self.row_max[i];
            if v > bound + self.tol {
                return self.reject(unit(feats.len(), i, 1.0), None, self.family.basis()[i].describe(), v, bound);
            }
        }
        HullVerdict::member(None, 0.0)
    }

    fn modulus(&self, feats: &[f64]) -> HullVerdict {
        let mut worst: Option<(f64, usize, f64, f64)> = None;
        for (k, pair) in self.family.monomial_pairs().iter().enumerate() {
            let value = feats[pair.re].hypot(feats[pair.im]);
            let bound = self.c * self.modulus_max[k];
            if value > bound * (1.0 + self.tol) && value > bound {
                let ratio = if bound > 0.0 { value / bound } else { f64::INFINITY };
                if worst.is_none_or(|w| ratio > w.0) {
                    worst = Some((ratio, k, value, bound));
                }
            }
        }
        match worst {
            None => HullVerdict::member(None, 0.0),
            Some((_, k, value, bound)) => {
                let cert = Certificate {
                    coefficients: Vec::new(),
                    monomial: Some(k),
                    description: format!("|{}|", self.family.describe_monomial(k)),
                    value_at_query: value,
                    sup_over_s: bound,
                };
                let gap = value - bound * (1.0 + self.tol);
                HullVerdict { member: false, coefficients: None, certificate: Some(cert), gap }
            }
        }
    }

    /// Rejections that need no LP: a single basis direction or a rotated monomial.
    /// Index of a sample whose feature column equals `feats` exactly.
    fn sample_column(&self, feats: &[f64]) -> Option<usize> {
        (0..self.features.cols()).find(|&j| self.features.column(j).iter().eq(feats.iter()))
    }

    fn prefilter_linear(&self, feats: &[f64]) -> Option<HullVerdict> {
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut consider = |viol: f64, coeffs: Vec<f64>| {
            if viol > self.tol && best.as_ref().is_none_or(|b| viol > b.0) {
                best = Some((viol, coeffs));
            }
        };
        for i in 1..feats.len() {
            consider(feats[i] - self.row_max[i], unit(feats.len(), i, 1.0));
            consider(self.row_min[i] - feats[i], unit(feats.len(), i, -1.0));
        }
        for (k, pair) in self.family.monomial_pairs().iter().enumerate() {
            let value = feats[pair.re].hypot(feats[pair.im]);
            if value - self.modulus_max[k] > self.tol {
                let coeffs = self.rotated(feats, pair.re, pair.im, value);
                let sup = self.sample_max(&coeffs);
                consider(value - sup, coeffs);
            }
        }
        let (_, coeffs) = best?;
        Some(self.certificate_linear(coeffs, feats))
    }

    fn prefilter_c(&self, feats: &[f64]) -> Option<HullVerdict> {
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut consider = |viol: f64, coeffs: Vec<f64>| {
            if viol > self.tol && best.as_ref().is_none_or(|b| viol > b.0) {
                best = Some((viol, coeffs));
            }
        };
        for i in 0..feats.len() {
            let abs_max = self.row_max[i].abs().max(self.row_min[i].abs());
            let sign = if feats[i] >= 0.0 { 1.0 } else { -1.0 };
            consider(feats[i].abs() - self.c * abs_max, unit(feats.len(), i, sign));
        }
        for (k, pair) in self.family.monomial_pairs().iter().enumerate() {
            let value = feats[pair.re].hypot(feats[pair.im]);
            if value - self.c * self.modulus_max[k] > self.tol {
                let coeffs = self.rotated(feats, pair.re, pair.im, value);
                let sup = self.c * self.sample_abs_max(&coeffs);
                consider(value - sup, coeffs);
            }
        }
        let (_, coeffs) = best?;
        Some(self.certificate_c(coeffs, feats))
    }

    /// cos ψ·Re b + sin ψ·Im b with ψ = arg b(ω), so the combination equals |b(ω)| at ω.
    fn rotated(&self, feats: &[f64], re: usize, im: usize, value: f64) -> Vec<f64> {
        let mut coeffs = vec![0.0; feats.len()];
        coeffs[re] = feats[re] / value;
        coeffs[im] = feats[im] / value;
        coeffs
    }

    fn sample_max(&self, coeffs: &[f64]) -> f64 {
        (0..self.features.cols())
            .map(|j| dot(coeffs, self.features.column(j)))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn sample_abs_max(&self, coeffs: &[f64]) -> f64 {
        (0..self.features.cols())
            .map(|j| dot(coeffs, self.features.column(j)).abs())
            .fold(0.0, f64::max)
    }

    fn certificate_linear(&self, coeffs: Vec<f64>, feats: &[f64]) -> HullVerdict {
        let value = dot(&coeffs, feats);
        let sup = self.sample_max(&coeffs);
        let desc = describe_combination(self.family, &coeffs);
        self.reject(coeffs, None, desc, value, sup)
    }

    fn certificate_c(&self, coeffs: Vec<f64>, feats: &[f64]) -> HullVerdict {
        let value = dot(&coeffs, feats);
        let sup = self.c * self.sample_abs_max(&coeffs);
        let desc = describe_combination(self.family, &coeffs);
        self.reject(coeffs, None, desc, value, sup)
    }

    fn reject(&self, coeffs: Vec<f64>, monomial: Option<usize>, description: String, value: f64, sup: f64) -> HullVerdict {
        HullVerdict {
            member: false,
            coefficients: None,
            certificate: Some(Certificate { coefficients: coeffs, monomial, description, value_at_query: value, sup_over_s: sup }),
            gap: value - sup - self.tol,
        }
    }

    fn solve_linear(&self, feats: &[f64]) -> Result<HullVerdict> {
        match convex_feasibility(self.lp_rows, &self.lp_cols, feats, self.sum_row, self.tol, &self.lp)? {
            Combination::Feasible { weights, residual } => Ok(HullVerdict::member(Some(weights), residual)),
            Combination::Infeasible { farkas, approx, residual, .. } => {
                let normalized = normalize(farkas);
                let verdict = self.certificate_linear(normalized, feats);
                if verdict.gap > 0.0 {
                    Ok(verdict)
                } else {
                    Ok(HullVerdict::member(Some(approx), residual))
                }
            }
        }
    }

    fn solve_c(&self, feats: &[f64]) -> Result<HullVerdict> {
        let mut rhs = feats.to_vec();
        rhs.push(1.0);
        match convex_feasibility(self.lp_rows, &self.lp_cols, &rhs, self.sum_row, self.tol, &self.lp)? {
            Combination::Feasible { weights, residual } => {
                // Report signed weights C(λ_j − μ_j) per sample.
                let k = self.features.cols();
                let signed = (0..k).map(|j| self.c * (weights[j] - weights[k + j])).collect();
                Ok(HullVerdict::member(Some(signed), residual))
            }
            Combination::Infeasible { mut farkas, approx, residual, .. } => {
                farkas.truncate(self.lp_rows - 1);
                let normalized = normalize(farkas);
                let verdict = self.certificate_c(normalized, feats);
                if verdict.gap > 0.0 {
                    Ok(verdict)
                } else {
                    let k = self.features.cols();
                    let signed = (0..k).map(|j| self.c * (approx[j] - approx[k + j])).collect();
                    Ok(HullVerdict::member(Some(signed), residual))
                }
            }
        }
    }
}

fn unit(len: usize, i: usize, sign: f64) -> Vec<f64> {
    let mut v = vec![0.0; len];
    v[i] = sign;
    v
}

/// Scales a certificate so its largest non-constant coefficient has magnitude 1.
fn normalize(mut c: Vec<f64>) -> Vec<f64> {
    let s = c.iter().skip(1).fold(0.0_f64, |a, v| a.max(v.abs()));
    if s > 0.0 {
        for v in &mut c {
            *v /= s;
        }
    }
    c
}

fn describe_combination(family: &FunctionFamily, coeffs: &[f64]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.abs() > 1e-12)
        .map(|(i, c)| format!("{}*[{}]", crate::output::fmt_short(*c), family.basis()[i].describe()))
        .collect();
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

pub fn membership_cone_direct(family: &FunctionFamily, s: &[Point], omega: &Point, c: f64, tol: f64) -> Result<HullVerdict> {
    HullProblem::new(family, s, HullMode::Cone, c, tol)?.query(omega)
}

pub fn membership_linear(family: &FunctionFamily, s: &[Point], omega: &Point, tol: f64) -> Result<HullVerdict> {
    if family.len() < 2 {
        return Err(Error::invalid("linear hull needs at least two basis functions"));
    }
    HullProblem::new(family, s, HullMode::Linear, 1.0, tol)?.query(omega)
}

pub fn membership_c(family: &FunctionFamily, s: &[Point], omega: &Point, c: f64, tol: f64) -> Result<HullVerdict> {
    if family.len() < 2 {
        return Err(Error::invalid("C-hull needs at least two basis functions"));
    }
    HullProblem::new(family, s, HullMode::C, c, tol)?.query(omega)
}

pub fn membership_modulus(family: &FunctionFamily, s: &[Point], omega: &Point, c: f64, tol: f64) -> Result<HullVerdict> {
    if family.structure() != Structure::AlgebraRealParts {
        return Err(Error::invalid("modulus hull needs an algebra family"));
    }
    HullProblem::new(family, s, HullMode::Modulus, c, tol)?.query(omega)
}

/// Per-point verdicts over a grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridHull {
    pub grid: String,
    pub mode: HullMode,
    #[serde(rename = "C")]
    pub c: f64,
    pub tol: f64,
    pub sample_count: usize,
    pub verdicts: Vec<HullVerdict>,
    /// True when some margin point is a member (evidence that the hull is not compact
    /// in the domain).
    pub escape: bool,
    pub escaping: Vec<usize>,
}

impl GridHull {
    pub fn members(&self) -> Vec<usize> {
        (0..self.verdicts.len()).filter(|&i| self.verdicts[i].member).collect()
    }
}

pub fn compute_hull(family: &FunctionFamily, s: &[Point], grid: &Grid, c: f64, mode: HullMode, tol: f64) -> Result<GridHull> {
    let problem = HullProblem::new(family, s, mode, c, tol)?;
    let verdicts: Vec<HullVerdict> = grid
        .points()
        .par_iter()
        .enumerate()
        .map(|(i, p)| problem.query(p).map_err(|e| Error::at_point(i, e)))
        .collect::<Result<_>>()?;
    let escaping: Vec<usize> = (0..grid.len()).filter(|&i| grid.is_margin(i) && verdicts[i].member).collect();
    Ok(GridHull {
        grid: grid.name().to_string(),
        mode,
        c,
        tol,
        sample_count: s.len(),
        verdicts,
        escape: !escaping.is_empty(),
        escaping,
    })
}

/// First point of `candidates` (in the given order) that is a hull member.
pub fn first_member(problem: &HullProblem<'_>, grid: &Grid, candidates: &[usize]) -> Result<Option<(usize, HullVerdict)>> {
    for &i in candidates {
        let v = problem.query(grid.point(i)).map_err(|e| Error::at_point(i, e))?;
        if v.member {
            return Ok(Some((i, v)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{circle_samples, BasisFunction, Dim};
    use num_complex::Complex64;

    fn pt(x: f64, y: f64) -> Point {
        Point::real(vec![x, y]).unwrap()
    }

    fn z(x: f64, y: f64) -> Point {
        Point::complex(&[Complex64::new(x, y)]).unwrap()
    }

    #[test]
    fn linear_triangle_examples() {
        let fam = FunctionFamily::affine(2).unwrap();
        let s = vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(0.0, 1.0)];
        let inside = membership_linear(&fam, &s, &pt(0.25, 0.25), 1e-9).unwrap();
        assert!(inside.member);
        let w = inside.coefficients.unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9);

        let out = membership_linear(&fam, &s, &pt(1.0, 1.0), 1e-9).unwrap();
        assert!(!out.member);
        let cert = out.certificate.unwrap();
        // x + y separates: 2 > 1
        assert!((cert.coefficients[1] - cert.coefficients[2]).abs() < 1e-9);
        assert!(cert.coefficients[1] > 0.0);
        assert!(cert.value_at_query > cert.sup_over_s);

        let single = membership_linear(&fam, &[pt(0.3, 0.7)], &pt(0.3, 0.7), 1e-9).unwrap();
        assert!(single.member);
        assert_eq!(single.coefficients.unwrap(), vec![1.0]);
    }

    #[test]
    fn cone_direct_examples() {
        let fam = FunctionFamily::cone_sample(Dim::complex(1), vec![BasisFunction::re_monomial(vec![1])])
            .unwrap()
            .symmetrize()
            .unwrap();
        let s = circle_samples(Complex64::new(0.0, 0.0), 0.75, 32);
        let far = membership_cone_direct(&fam, &s, &z(0.9, 0.0), 1.0, 1e-9).unwrap();
        assert!(!far.member);
        assert_eq!(far.certificate.unwrap().description, "Re z^(1)");
        assert!(membership_cone_direct(&fam, &s, &z(0.0, 0.0), 1.0, 1e-9).unwrap().member);
        assert!(membership_cone_direct(&fam, &s, &s[5], 1.0, 1e-9).unwrap().member);
        let degenerate = FunctionFamily::cone_sample(Dim::complex(1), vec![]).unwrap();
        assert!(membership_cone_direct(&degenerate, &s, &s[0], 1.0, 1e-9).is_err());
    }

    #[test]
    fn c_hull_segment_examples() {
        let fam = FunctionFamily::affine(2).unwrap();
        let s: Vec<Point> = (0..=10).map(|t| pt(t as f64 / 10.0, 0.0)).collect();
        for c in [1.0, 10.0, 1000.0] {
            let v = membership_c(&fam, &s, &pt(0.5, 0.2), c, 1e-9).unwrap();
            assert!(!v.member);
            let cert = v.certificate.unwrap();
            assert!(cert.coefficients[2].abs() > 0.5, "certificate must use y: {:?}", cert.coefficients);
        }
        // threshold by hand: C(Λ − M) = 1 with −C·M = −1 needs Λ + M = 3/C ≤ 1
        assert!(!membership_c(&fam, &s, &pt(-1.0, 0.0), 2.9, 1e-9).unwrap().member);
        assert!(membership_c(&fam, &s, &pt(-1.0, 0.0), 3.1, 1e-9).unwrap().member);
        assert!(membership_c(&fam, &s, &pt(-1.0, 0.0), 10.0, 1e-9).unwrap().member);
    }

    #[test]
    fn c_hull_at_one_is_linear_hull() {
        let fam = FunctionFamily::affine(2).unwrap();
        let s = vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(0.0, 1.0), pt(0.8, 0.9)];
        for q in [pt(0.3, 0.3), pt(0.9, 0.9), pt(-0.1, 0.2), pt(0.5, 0.6)] {
            let a = membership_linear(&fam, &s, &q, 1e-9).unwrap().member;
            let b = membership_c(&fam, &s, &q, 1.0, 1e-9).unwrap().member;
            assert_eq!(a, b);
        }
    }

    #[test]
    fn modulus_examples() {
        let fam = FunctionFamily::monomials(1, 4, false).unwrap();
        let s = circle_samples(Complex64::new(0.0, 0.0), 0.75, 64);
        assert!(membership_modulus(&fam, &s, &z(0.0, 0.0), 1.0, 1e-9).unwrap().member);
        let v = membership_modulus(&fam, &s, &z(0.9, 0.0), 1.0, 1e-9).unwrap();
        assert!(!v.member);
        let cert = v.certificate.unwrap();
        assert_eq!(cert.description, "|z^(4)|");
        assert!((cert.value_at_query - 0.6561).abs() < 1e-12);
        assert!((cert.sup_over_s - 0.75_f64.powi(4)).abs() < 1e-12);
        assert!(membership_modulus(&fam, &s, &s[3], 1.0, 1e-9).unwrap().member);
        let aff = FunctionFamily::affine(2).unwrap();
        assert!(membership_modulus(&aff, &[pt(0.0, 0.0)], &pt(0.0, 0.0), 1.0, 1e-9).is_err());
    }

    #[test]
    fn mode_parsing_round_trips() {
        for m in [HullMode::Cone, HullMode::Linear, HullMode::C, HullMode::Modulus] {
            assert_eq!(m.to_string().parse::<HullMode>().unwrap(), m);
        }
        assert!("bogus".parse::<HullMode>().is_err());
    }
}
