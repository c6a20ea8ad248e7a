//! Function families: affine spans, (Laurent) monomial algebras and explicit cone samples.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default lower bound on |z_j| for coordinates raised to a negative power.
pub const DEFAULT_LAURENT_FLOOR: f64 = 1e-6;

/// Shape of a point: real coordinates followed by complex ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dim {
    pub n_real: usize,
    pub n_complex: usize,
}

impl Dim {
    pub fn real(n: usize) -> Self {
        Dim { n_real: n, n_complex: 0 }
    }

    pub fn complex(n: usize) -> Self {
        Dim { n_real: 0, n_complex: n }
    }

    pub fn len(&self) -> usize {
        self.n_real + 2 * self.n_complex
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl std::fmt::Display for Dim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(n_real={}, n_complex={})", self.n_real, self.n_complex)
    }
}

/// A point of R^n_real x C^n_complex stored as flat reals: real coordinates,
/// then the real parts of the complex coordinates, then their imaginary parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    coords: Vec<f64>,
    dim: Dim,
}

impl Point {
    pub fn new(coords: Vec<f64>, dim: Dim) -> Result<Self> {
        if coords.len() != dim.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} coordinates for {}", dim.len(), dim),
                got: format!("{} coordinates", coords.len()),
            });
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::Domain(format!("coordinate {i} is not finite")));
        }
        Ok(Point { coords, dim })
    }

    pub fn real(coords: Vec<f64>) -> Result<Self> {
        let dim = Dim::real(coords.len());
        Point::new(coords, dim)
    }

    pub fn complex(zs: &[Complex64]) -> Result<Self> {
        let mut coords: Vec<f64> = zs.iter().map(|z| z.re).collect();
        coords.extend(zs.iter().map(|z| z.im));
        Point::new(coords, Dim::complex(zs.len()))
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    /// The j-th complex coordinate.
    pub fn z(&self, j: usize) -> Complex64 {
        let base = self.dim.n_real;
        Complex64::new(
            self.coords[base + j],
            self.coords[base + self.dim.n_complex + j],
        )
    }

    pub fn zs(&self) -> Vec<Complex64> {
        (0..self.dim.n_complex).map(|j| self.z(j)).collect()
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisKind {
    Constant,
    Affine { coeffs: Vec<f64>, offset: f64 },
    ReMonomial { exponent: Vec<i32> },
    ImMonomial { exponent: Vec<i32> },
}

/// One real-valued generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisFunction {
    pub kind: BasisKind,
    pub scale: f64,
    /// Expansion point for monomials, given as (re, im) pairs; origin when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<[f64; 2]>>,
}

impl BasisFunction {
    pub fn constant() -> Self {
        BasisFunction { kind: BasisKind::Constant, scale: 1.0, center: None }
    }

    pub fn affine(coeffs: Vec<f64>, offset: f64) -> Self {
        BasisFunction { kind: BasisKind::Affine { coeffs, offset }, scale: 1.0, center: None }
    }

    pub fn re_monomial(exponent: Vec<i32>) -> Self {
        BasisFunction { kind: BasisKind::ReMonomial { exponent }, scale: 1.0, center: None }
    }

    pub fn im_monomial(exponent: Vec<i32>) -> Self {
        BasisFunction { kind: BasisKind::ImMonomial { exponent }, scale: 1.0, center: None }
    }

    pub fn with_center(mut self, center: &[Complex64]) -> Self {
        self.center = Some(center.iter().map(|c| [c.re, c.im]).collect());
        self
    }

    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        out.scale = -out.scale;
        out
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, BasisKind::Constant)
    }

    pub fn exponent(&self) -> Option<&[i32]> {
        match &self.kind {
            BasisKind::ReMonomial { exponent } | BasisKind::ImMonomial { exponent } => {
                Some(exponent)
            }
            _ => None,
        }
    }

    fn center_vec(&self) -> Option<Vec<Complex64>> {
        self.center
            .as_ref()
            .map(|c| c.iter().map(|p| Complex64::new(p[0], p[1])).collect())
    }

    pub fn describe(&self) -> String {
        let body = match &self.kind {
            BasisKind::Constant => "1".to_string(),
            BasisKind::Affine { coeffs, offset } => describe_affine(coeffs, *offset),
            BasisKind::ReMonomial { exponent } => {
                format!("Re {}", describe_monomial(exponent, self.center.as_deref()))
            }
            BasisKind::ImMonomial { exponent } => {
                format!("Im {}", describe_monomial(exponent, self.center.as_deref()))
            }
        };
        if self.scale == 1.0 {
            body
        } else if self.scale == -1.0 {
            format!("-{body}")
        } else {
            format!("{}*{}", self.scale, body)
        }
    }
}

fn describe_affine(coeffs: &[f64], offset: f64) -> String {
    let nonzero: Vec<usize> = (0..coeffs.len()).filter(|&i| coeffs[i] != 0.0).collect();
    if offset == 0.0 && nonzero.len() == 1 && coeffs[nonzero[0]] == 1.0 {
        return format!("x{}", nonzero[0] + 1);
    }
    let mut parts: Vec<String> = nonzero
        .iter()
        .map(|&i| format!("{}*x{}", coeffs[i], i + 1))
        .collect();
    if offset != 0.0 || parts.is_empty() {
        parts.push(format!("{offset}"));
    }
    parts.join(" + ")
}

fn describe_monomial(exponent: &[i32], center: Option<&[[f64; 2]]>) -> String {
    let exps: Vec<String> = exponent.iter().map(|e| e.to_string()).collect();
    match center {
        Some(c) => {
            let cs: Vec<String> = c.iter().map(|p| format!("{}{:+}i", p[0], p[1])).collect();
            format!("(z-[{}])^({})", cs.join(","), exps.join(","))
        }
        None => format!("z^({})", exps.join(",")),
    }
}

fn check_dim(expected: Dim, got: Dim) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch {
            expected: expected.to_string(),
            got: got.to_string(),
        });
    }
    Ok(())
}

/// Complex value of prod_j (z_j - c_j)^{alpha_j}.
pub fn monomial_value(
    exponent: &[i32],
    center: Option<&[Complex64]>,
    omega: &Point,
    laurent_floor: f64,
) -> Result<Complex64> {
    if exponent.len() != omega.dim().n_complex {
        return Err(Error::DimensionMismatch {
            expected: format!("{} complex coordinates", exponent.len()),
            got: omega.dim().to_string(),
        });
    }
    let mut acc = Complex64::new(1.0, 0.0);
    for (j, &a) in exponent.iter().enumerate() {
        if a == 0 {
            continue;
        }
        let mut z = omega.z(j);
        if let Some(c) = center {
            z -= c[j];
        }
        if a < 0 && z.norm() < laurent_floor {
            return Err(Error::Domain(format!(
                "negative power of coordinate {} with |z|={:e} below the floor {:e}",
                j + 1,
                z.norm(),
                laurent_floor
            )));
        }
        acc *= sequential_power(z, a);
    }
    Ok(acc)
}

/// z^a by repeated multiplication (by 1/z for negative a), matching the feature tables bit for bit.
fn sequential_power(z: Complex64, a: i32) -> Complex64 {
    let step = if a < 0 { z.inv() } else { z };
    let mut v = Complex64::new(1.0, 0.0);
    for _ in 0..a.unsigned_abs() {
        v *= step;
    }
    v
}

pub fn eval(f: &BasisFunction, omega: &Point) -> Result<f64> {
    eval_with_floor(f, omega, DEFAULT_LAURENT_FLOOR)
}

pub fn eval_with_floor(f: &BasisFunction, omega: &Point, laurent_floor: f64) -> Result<f64> {
    let raw = match &f.kind {
        BasisKind::Constant => 1.0,
        BasisKind::Affine { coeffs, offset } => {
            if coeffs.len() != omega.coords().len() {
                return Err(Error::DimensionMismatch {
                    expected: format!("{} coordinates", coeffs.len()),
                    got: format!("{} coordinates", omega.coords().len()),
                });
            }
            coeffs.iter().zip(omega.coords()).map(|(a, x)| a * x).sum::<f64>() + offset
        }
        BasisKind::ReMonomial { exponent } => {
            monomial_value(exponent, f.center_vec().as_deref(), omega, laurent_floor)?.re
        }
        BasisKind::ImMonomial { exponent } => {
            monomial_value(exponent, f.center_vec().as_deref(), omega, laurent_floor)?.im
        }
    };
    Ok(f.scale * raw)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    LinearSpan,
    ConeSample,
    AlgebraRealParts,
}

/// A complex monomial whose real and imaginary parts sit at `re` and `im` in the basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonomialPair {
    pub exponent: Vec<i32>,
    pub re: usize,
    pub im: usize,
}

impl MonomialPair {
    pub fn degree(&self) -> u32 {
        self.exponent.iter().map(|e| e.unsigned_abs()).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionFamily {
    basis: Vec<BasisFunction>,
    structure: Structure,
    symmetric: bool,
    contains_constants: bool,
    dim: Dim,
    laurent: bool,
    max_degree: Option<u32>,
    center: Option<Vec<[f64; 2]>>,
    monomials: Vec<MonomialPair>,
    laurent_floor: f64,
}

/// Multi-indices with sum of |alpha_j| equal to `total`, in descending lexicographic order.
fn multi_indices(n: usize, total: i32, laurent: bool, out: &mut Vec<Vec<i32>>) {
    fn rec(n: usize, left: i32, laurent: bool, prefix: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        if n == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            if laurent && left > 0 {
                prefix.push(-left);
                out.push(prefix.clone());
                prefix.pop();
            }
            return;
        }
        let lo = if laurent { -left } else { 0 };
        for a in (lo..=left).rev() {
            prefix.push(a);
            rec(n - 1, left - a.abs(), laurent, prefix, out);
            prefix.pop();
        }
    }
    rec(n, total, laurent, &mut Vec::new(), out);
}

impl FunctionFamily {
    /// The linear span {1, x_1, ..., x_n} on R^n.
    pub fn affine(n_real: usize) -> Result<Self> {
        if n_real == 0 {
            return Err(Error::invalid("affine family needs n_real >= 1"));
        }
        let mut basis = vec![BasisFunction::constant()];
        for i in 0..n_real {
            let mut coeffs = vec![0.0; n_real];
            coeffs[i] = 1.0;
            basis.push(BasisFunction::affine(coeffs, 0.0));
        }
        Ok(FunctionFamily {
            basis,
            structure: Structure::LinearSpan,
            symmetric: true,
            contains_constants: true,
            dim: Dim::real(n_real),
            laurent: false,
            max_degree: Some(1),
            center: None,
            monomials: Vec::new(),
            laurent_floor: DEFAULT_LAURENT_FLOOR,
        })
    }

    /// Real and imaginary parts of all monomials z^alpha with 1 <= |alpha|_1 <= max_degree.
    pub fn monomials(n_complex: usize, max_degree: u32, laurent: bool) -> Result<Self> {
        Self::monomials_centered(n_complex, max_degree, laurent, None)
    }

    /// As [`FunctionFamily::monomials`], expanded around `center`.
    pub fn monomials_centered(
        n_complex: usize,
        max_degree: u32,
        laurent: bool,
        center: Option<&[Complex64]>,
    ) -> Result<Self> {
        if n_complex == 0 {
            return Err(Error::invalid("monomial family needs n_complex >= 1"));
        }
        if max_degree == 0 {
            return Err(Error::invalid("monomial family needs max_degree >= 1"));
        }
        if let Some(c) = center {
            if c.len() != n_complex {
                return Err(Error::invalid("center length must equal n_complex"));
            }
        }
        let mut basis = vec![BasisFunction::constant()];
        let mut monomials = Vec::new();
        for t in 1..=max_degree as i32 {
            let mut alphas = Vec::new();
            multi_indices(n_complex, t, laurent, &mut alphas);
            for alpha in alphas {
                let mut re = BasisFunction::re_monomial(alpha.clone());
                let mut im = BasisFunction::im_monomial(alpha.clone());
                if let Some(c) = center {
                    re = re.with_center(c);
                    im = im.with_center(c);
                }
                monomials.push(MonomialPair { exponent: alpha, re: basis.len(), im: basis.len() + 1 });
                basis.push(re);
                basis.push(im);
            }
        }
        Ok(FunctionFamily {
            basis,
            structure: Structure::AlgebraRealParts,
            symmetric: true,
            contains_constants: true,
            dim: Dim::complex(n_complex),
            laurent,
            max_degree: Some(max_degree),
            center: center.map(|c| c.iter().map(|z| [z.re, z.im]).collect()),
            monomials,
            laurent_floor: DEFAULT_LAURENT_FLOOR,
        })
    }

    /// An explicit finite cone sample; the constant 1 is prepended when missing.
    pub fn cone_sample(dim: Dim, elements: Vec<BasisFunction>) -> Result<Self> {
        let mut basis = vec![BasisFunction::constant()];
        for f in elements {
            if basis.contains(&f) {
                if f == BasisFunction::constant() {
                    continue;
                }
                return Err(Error::invalid(format!("duplicate basis element {}", f.describe())));
            }
            basis.push(f);
        }
        let symmetric = basis.iter().all(|f| basis.contains(&f.negated()));
        Ok(FunctionFamily {
            basis,
            structure: Structure::ConeSample,
            symmetric,
            contains_constants: true,
            dim,
            laurent: false,
            max_degree: None,
            center: None,
            monomials: Vec::new(),
            laurent_floor: DEFAULT_LAURENT_FLOOR,
        })
    }

    /// A linear-span family with an explicit basis (constant 1 prepended when missing).
    pub fn linear_span(dim: Dim, elements: Vec<BasisFunction>) -> Result<Self> {
        let mut fam = Self::cone_sample(dim, elements)?;
        fam.structure = Structure::LinearSpan;
        fam.symmetric = true;
        Ok(fam)
    }

    /// Appends the negation of every element whose negation is missing.
    pub fn symmetrize(&self) -> Result<Self> {
        if self.structure != Structure::ConeSample {
            return Err(Error::invalid("symmetrize applies to cone samples only"));
        }
        let mut basis = self.basis.clone();
        for f in &self.basis {
            let neg = f.negated();
            if !basis.contains(&neg) {
                basis.push(neg);
            }
        }
        let mut out = self.clone();
        out.basis = basis;
        out.symmetric = true;
        Ok(out)
    }

    pub fn with_laurent_floor(mut self, floor: f64) -> Result<Self> {
        if !(floor > 0.0) {
            return Err(Error::invalid("laurent floor must be positive"));
        }
        self.laurent_floor = floor;
        Ok(self)
    }

    pub fn basis(&self) -> &[BasisFunction] {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    pub fn symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn contains_constants(&self) -> bool {
        self.contains_constants
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn laurent(&self) -> bool {
        self.laurent
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.max_degree
    }

    pub fn center(&self) -> Option<Vec<Complex64>> {
        self.center
            .as_ref()
            .map(|c| c.iter().map(|p| Complex64::new(p[0], p[1])).collect())
    }

    pub fn monomial_pairs(&self) -> &[MonomialPair] {
        &self.monomials
    }

    pub fn laurent_floor(&self) -> f64 {
        self.laurent_floor
    }

    /// True when every basis element is constant.
    pub fn is_degenerate(&self) -> bool {
        self.basis.iter().all(|f| f.is_constant())
    }

    pub fn descriptions(&self) -> Vec<String> {
        self.basis.iter().map(|f| f.describe()).collect()
    }

    pub fn eval(&self, index: usize, omega: &Point) -> Result<f64> {
        check_dim(self.dim, omega.dim())?;
        eval_with_floor(&self.basis[index], omega, self.laurent_floor)
    }

    /// All basis values at one point (the feature column).
    pub fn features(&self, omega: &Point) -> Result<Vec<f64>> {
        check_dim(self.dim, omega.dim())?;
        if self.structure == Structure::AlgebraRealParts && !self.monomials.is_empty() {
            return self.algebra_features(omega);
        }
        self.basis
            .iter()
            .map(|f| eval_with_floor(f, omega, self.laurent_floor))
            .collect()
    }

    /// Feature column via per-variable power tables; same values as evaluating each element.
    fn algebra_features(&self, omega: &Point) -> Result<Vec<f64>> {
        let d = self.max_degree.unwrap_or(0) as i32;
        let n = self.dim.n_complex;
        let center = self.center();
        let mut tables: Vec<Vec<Complex64>> = Vec::with_capacity(n);
        for j in 0..n {
            let mut zj = omega.z(j);
            if let Some(c) = &center {
                zj -= c[j];
            }
            let mut t = vec![Complex64::new(0.0, 0.0); (2 * d + 1) as usize];
            t[d as usize] = Complex64::new(1.0, 0.0);
            for e in 1..=d {
                t[(d + e) as usize] = t[(d + e - 1) as usize] * zj;
            }
            if self.laurent {
                if zj.norm() < self.laurent_floor {
                    return Err(Error::Domain(format!(
                        "negative power of coordinate {} with |z|={:e} below the floor {:e}",
                        j + 1,
                        zj.norm(),
                        self.laurent_floor
                    )));
                }
                let inv = zj.inv();
                for e in 1..=d {
                    t[(d - e) as usize] = t[(d - e + 1) as usize] * inv;
                }
            }
            tables.push(t);
        }
        let mut out = vec![0.0; self.basis.len()];
        out[0] = 1.0;
        for pair in &self.monomials {
            let mut v = Complex64::new(1.0, 0.0);
            for (j, &a) in pair.exponent.iter().enumerate() {
                if a != 0 {
                    v *= tables[j][(d + a) as usize];
                }
            }
            out[pair.re] = self.basis[pair.re].scale * v.re;
            out[pair.im] = self.basis[pair.im].scale * v.im;
        }
        Ok(out)
    }

    /// Value of sum_i coeffs_i * basis_i at a point.
    pub fn eval_combination(&self, coeffs: &[f64], omega: &Point) -> Result<f64> {
        if coeffs.len() != self.basis.len() {
            return Err(Error::invalid("coefficient vector length must match the basis"));
        }
        let feats = self.features(omega)?;
        Ok(coeffs.iter().zip(&feats).map(|(c, v)| c * v).sum())
    }

    /// Complex value of the k-th stored monomial.
    pub fn monomial(&self, k: usize, omega: &Point) -> Result<Complex64> {
        check_dim(self.dim, omega.dim())?;
        let pair = self
            .monomials
            .get(k)
            .ok_or_else(|| Error::invalid(format!("no monomial #{k}")))?;
        monomial_value(&pair.exponent, self.center().as_deref(), omega, self.laurent_floor)
    }

    /// Description of the k-th stored monomial, e.g. `z^(3)`.
    pub fn describe_monomial(&self, k: usize) -> String {
        describe_monomial(&self.monomials[k].exponent, self.center.as_deref())
    }

    /// Short fingerprint identifying the basis (for provenance in exported matrices).
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let text = serde_json::to_string(&self.basis).unwrap_or_default();
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxPrincipleEntry {
    pub index: usize,
    pub description: String,
    pub max_k: f64,
    pub max_u: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxPrincipleReport {
    pub entries: Vec<MaxPrincipleEntry>,
    pub skipped_constants: Vec<usize>,
    pub pass: bool,
}

/// Checks max f(K) + margin <= max f(U) for every non-constant basis element.
pub fn maximum_principle_test(
    family: &FunctionFamily,
    k: &[Point],
    u: &[Point],
    margin: f64,
) -> Result<MaxPrincipleReport> {
    if k.is_empty() || u.is_empty() {
        return Err(Error::invalid("maximum principle test needs nonempty K and U"));
    }
    if !(margin > 0.0) {
        return Err(Error::invalid("margin must be positive"));
    }
    let max_over = |i: usize, pts: &[Point]| -> Result<f64> {
        let mut m = f64::NEG_INFINITY;
        for (j, p) in pts.iter().enumerate() {
            m = m.max(family.eval(i, p).map_err(|e| Error::at_point(j, e))?);
        }
        Ok(m)
    };
    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    for (i, f) in family.basis().iter().enumerate() {
        if f.is_constant() {
            skipped.push(i);
            continue;
        }
        let max_k = max_over(i, k)?;
        let max_u = max_over(i, u)?;
        entries.push(MaxPrincipleEntry {
            index: i,
            description: f.describe(),
            max_k,
            max_u,
            pass: max_k + margin <= max_u,
        });
    }
    let pass = entries.iter().all(|e| e.pass);
    Ok(MaxPrincipleReport { entries, skipped_constants: skipped, pass })
}

/// `n` equally spaced points on the circle |z - center| = r, starting on the positive real axis.
pub fn circle_samples(center: Complex64, r: f64, n: usize) -> Vec<Point> {
    (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            Point::complex(&[center + Complex64::from_polar(r, t)]).expect("finite sample")
        })
        .collect()
}

/// Product samples of the torus {|z| = r1, |w| = r2}.
pub fn torus_samples(r1: f64, r2: f64, n1: usize, n2: usize) -> Vec<Point> {
    let mut out = Vec::with_capacity(n1 * n2);
    for a in 0..n1 {
        let s = 2.0 * std::f64::consts::PI * a as f64 / n1 as f64;
        for b in 0..n2 {
            let t = 2.0 * std::f64::consts::PI * b as f64 / n2 as f64;
            out.push(
                Point::complex(&[Complex64::from_polar(r1, s), Complex64::from_polar(r2, t)])
                    .expect("finite sample"),
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(re: f64, im: f64) -> Point {
        Point::complex(&[Complex64::new(re, im)]).unwrap()
    }

    #[test]
    fn eval_examples() {
        let p = z(0.5, 0.0);
        assert_eq!(eval(&BasisFunction::constant(), &p).unwrap(), 1.0);
        assert_eq!(eval(&BasisFunction::re_monomial(vec![2]), &p).unwrap(), 0.25);
        assert_eq!(eval(&BasisFunction::re_monomial(vec![-1]), &p).unwrap(), 2.0);
    }

    #[test]
    fn laurent_floor_is_enforced() {
        let f = BasisFunction::re_monomial(vec![-1]);
        assert!(matches!(eval(&f, &z(1e-8, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let fam = FunctionFamily::affine(2).unwrap();
        let p = Point::real(vec![1.0]).unwrap();
        assert!(matches!(fam.eval(1, &p), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn point_rejects_nan() {
        assert!(Point::real(vec![f64::NAN]).is_err());
        assert!(Point::new(vec![1.0, 2.0], Dim::complex(2)).is_err());
    }

    #[test]
    fn affine_family_shapes() {
        let f2 = FunctionFamily::affine(2).unwrap();
        assert_eq!(f2.descriptions(), vec!["1", "x1", "x2"]);
        assert_eq!(FunctionFamily::affine(1).unwrap().len(), 2);
        assert!(FunctionFamily::affine(0).is_err());
        let p = Point::real(vec![1.0, 2.0]).unwrap();
        assert_eq!(f2.eval_combination(&[0.0, 1.0, 1.0], &p).unwrap(), 3.0);
    }

    #[test]
    fn monomial_enumeration() {
        let f = FunctionFamily::monomials(1, 2, false).unwrap();
        assert_eq!(
            f.descriptions(),
            vec!["1", "Re z^(1)", "Im z^(1)", "Re z^(2)", "Im z^(2)"]
        );
        let l = FunctionFamily::monomials(1, 1, true).unwrap();
        assert_eq!(
            l.descriptions(),
            vec!["1", "Re z^(1)", "Im z^(1)", "Re z^(-1)", "Im z^(-1)"]
        );
        let two = FunctionFamily::monomials(2, 2, false).unwrap();
        assert_eq!(two.len(), 11);
        let exps: Vec<Vec<i32>> = two.monomial_pairs().iter().map(|m| m.exponent.clone()).collect();
        assert_eq!(exps, vec![vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert!(FunctionFamily::monomials(1, 0, false).is_err());
        assert!(FunctionFamily::monomials(0, 2, false).is_err());
    }

    #[test]
    fn laurent_degree_counts() {
        // exponents in [-d, d] with total |alpha| <= d in one variable: 2d monomials
        let l = FunctionFamily::monomials(1, 8, true).unwrap();
        assert_eq!(l.monomial_pairs().len(), 16);
        assert_eq!(l.len(), 33);
    }

    #[test]
    fn degree_monotone() {
        for n in 1..=2 {
            let a = FunctionFamily::monomials(n, 3, false).unwrap();
            let b = FunctionFamily::monomials(n, 4, false).unwrap();
            assert!(a.basis().iter().all(|f| b.basis().contains(f)));
        }
    }

    #[test]
    fn symmetrize_examples() {
        let x = BasisFunction::affine(vec![1.0], 0.0);
        let f = FunctionFamily::cone_sample(Dim::real(1), vec![x.clone()]).unwrap();
        let s = f.symmetrize().unwrap();
        assert_eq!(s.descriptions(), vec!["1", "x1", "-1", "-x1"]);
        assert!(s.symmetric());
        assert_eq!(s.symmetrize().unwrap().len(), 4);
        let re = FunctionFamily::cone_sample(Dim::complex(1), vec![BasisFunction::re_monomial(vec![1])])
            .unwrap()
            .symmetrize()
            .unwrap();
        let d = re.descriptions();
        assert!(d.contains(&"Re z^(1)".to_string()) && d.contains(&"-Re z^(1)".to_string()));
        assert!(FunctionFamily::affine(1).unwrap().symmetrize().is_err());
    }

    #[test]
    fn cone_sample_rejects_duplicates() {
        let x = BasisFunction::affine(vec![1.0], 0.0);
        assert!(FunctionFamily::cone_sample(Dim::real(1), vec![x.clone(), x]).is_err());
        let only_const = FunctionFamily::cone_sample(Dim::real(1), vec![]).unwrap();
        assert!(only_const.is_degenerate());
    }

    #[test]
    fn maximum_principle_examples() {
        let f = FunctionFamily::monomials(1, 2, false).unwrap();
        let k = circle_samples(Complex64::new(0.0, 0.0), 0.5, 32);
        let u = circle_samples(Complex64::new(0.0, 0.0), 0.9, 64);
        let r = maximum_principle_test(&f, &k, &u, 1e-6).unwrap();
        assert!(r.pass);
        assert_eq!(r.skipped_constants, vec![0]);
        assert_eq!(r.entries.len(), 4);

        let aff = FunctionFamily::affine(2).unwrap();
        let mut sq = Vec::new();
        for i in 0..=4 {
            for j in 0..=4 {
                sq.push(Point::real(vec![-1.0 + 0.5 * i as f64, -1.0 + 0.5 * j as f64]).unwrap());
            }
        }
        let r = maximum_principle_test(&aff, &sq, &sq, 1e-6).unwrap();
        assert!(!r.pass);
        assert!(maximum_principle_test(&aff, &[], &sq, 1e-6).is_err());
    }

    #[test]
    fn centered_monomials_shift() {
        let c = [Complex64::new(2.0, 0.0)];
        let f = FunctionFamily::monomials_centered(1, 1, false, Some(&c)).unwrap();
        let p = z(2.5, 0.0);
        assert!((f.eval(1, &p).unwrap() - 0.5).abs() < 1e-15);
    }
}
