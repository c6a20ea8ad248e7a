//! Degree sweeps: hulls of an algebra family shrink as the truncation degree grows, and
//! for large degree the C-hull collapses onto the C = 1 hull.

use num_complex::Complex64;
use serde::Serialize;

use super::{HullMode, HullProblem};
use crate::error::{Error, Result};
use crate::families::{FunctionFamily, Point};

/// Produces the monomial family of a given degree.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialGenerator {
    pub n_complex: usize,
    pub laurent: bool,
    pub center: Option<Vec<Complex64>>,
}

impl MonomialGenerator {
    pub fn new(n_complex: usize, laurent: bool) -> Self {
        MonomialGenerator { n_complex, laurent, center: None }
    }

    pub fn at(&self, degree: u32) -> Result<FunctionFamily> {
        FunctionFamily::monomials_centered(self.n_complex, degree, self.laurent, self.center.as_deref())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerTrickStep {
    pub degree: u32,
    /// Membership in the C = 1 (linear) hull.
    pub member_c1: bool,
    /// C-hull membership for each tested constant.
    pub members: Vec<bool>,
    /// Modulus-hull membership for each tested constant.
    pub modulus_members: Vec<bool>,
    /// The positive-part test f(ω) ≤ C·(max f(S))₊ over ± basis elements.
    pub positive_part_members: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerTrickReport {
    #[serde(rename = "C")]
    pub cs: Vec<f64>,
    pub steps: Vec<PowerTrickStep>,
    /// First tested degree from which the point stays outside the C = 1 hull.
    pub c1_flip_degree: Option<u32>,
    /// For each C, first tested degree from which the point stays outside the C-hull.
    pub flip_degrees: Vec<Option<u32>>,
    /// `Some(true)` when the point left the C = 1 hull and every tested C-hull followed;
    /// `None` when the point never left the C = 1 hull.
    pub collapse_certified: Option<bool>,
}

fn flip(seq: &[bool], degrees: &[u32]) -> Option<u32> {
    let mut first = None;
    for (k, &member) in seq.iter().enumerate().rev() {
        if member {
            break;
        }
        first = Some(degrees[k]);
    }
    first
}

/// Evaluates hull membership of `omega` at degrees d0, 2·d0, ... ≤ d_max.
pub fn power_trick_refine(
    generator: &MonomialGenerator,
    s: &[Point],
    omega: &Point,
    cs: &[f64],
    d0: u32,
    d_max: u32,
    tol: f64,
) -> Result<PowerTrickReport> {
    if d0 == 0 || d_max < d0 {
        return Err(Error::invalid("degree sweep needs 1 <= d0 <= d_max"));
    }
    if cs.iter().any(|&c| !(c >= 1.0)) {
        return Err(Error::invalid("every tested C must be >= 1"));
    }
    let mut steps = Vec::new();
    let mut degree = d0;
    while degree <= d_max {
        let fam = generator.at(degree)?;
        let member_c1 = HullProblem::new(&fam, s, HullMode::Linear, 1.0, tol)?.query(omega)?.member;
        let mut members = Vec::with_capacity(cs.len());
        let mut modulus_members = Vec::with_capacity(cs.len());
        let mut positive_part_members = Vec::with_capacity(cs.len());
        let feats = fam.features(omega)?;
        let sample_feats: Vec<Vec<f64>> = s.iter().map(|p| fam.features(p)).collect::<Result<_>>()?;
        for &c in cs {
            members.push(HullProblem::new(&fam, s, HullMode::C, c, tol)?.query_features(&feats)?.member);
            modulus_members.push(HullProblem::new(&fam, s, HullMode::Modulus, c, tol)?.query_features(&feats)?.member);
            let ok = (1..fam.len()).all(|i| {
                [1.0, -1.0].iter().all(|&sign| {
                    let sup = sample_feats.iter().map(|f| sign * f[i]).fold(f64::NEG_INFINITY, f64::max);
                    sign * feats[i] <= c * sup.max(0.0) + tol
                })
            });
            positive_part_members.push(ok);
        }
        steps.push(PowerTrickStep { degree, member_c1, members, modulus_members, positive_part_members });
        degree += d0;
    }
    let degrees: Vec<u32> = steps.iter().map(|s| s.degree).collect();
    let c1: Vec<bool> = steps.iter().map(|s| s.member_c1).collect();
    let c1_flip_degree = flip(&c1, &degrees);
    let flip_degrees: Vec<Option<u32>> = (0..cs.len())
        .map(|k| flip(&steps.iter().map(|s| s.members[k]).collect::<Vec<_>>(), &degrees))
        .collect();
    let collapse_certified = c1_flip_degree.map(|_| flip_degrees.iter().all(|f| f.is_some()));
    Ok(PowerTrickReport { cs: cs.to_vec(), steps, c1_flip_degree, flip_degrees, collapse_certified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::circle_samples;

    #[test]
    fn origin_stays_inside() {
        let s = circle_samples(Complex64::new(0.0, 0.0), 0.75, 64);
        let zero = Point::complex(&[Complex64::new(0.0, 0.0)]).unwrap();
        let r = power_trick_refine(&MonomialGenerator::new(1, false), &s, &zero, &[1.0, 10.0], 2, 12, 1e-9).unwrap();
        assert!(r.steps.iter().all(|st| st.member_c1 && st.members.iter().all(|&m| m)));
        assert_eq!(r.collapse_certified, None);
        let on = power_trick_refine(&MonomialGenerator::new(1, false), &s, &s[7], &[10.0], 4, 12, 1e-9).unwrap();
        assert!(on.steps.iter().all(|st| st.member_c1 && st.members[0] && st.modulus_members[0]));
    }

    #[test]
    fn flip_helper() {
        assert_eq!(flip(&[true, false, false], &[1, 2, 3]), Some(2));
        assert_eq!(flip(&[false, true, false], &[1, 2, 3]), Some(3));
        assert_eq!(flip(&[true, true], &[1, 2]), None);
    }
}
