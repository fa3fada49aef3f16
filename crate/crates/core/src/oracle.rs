//! Brute-force reference roots: companion matrices for univariate
//! polynomials, Sylvester resultants for two equations, and a cascade of
//! Sylvester eliminations for square systems in more variables.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::linalg::{eig, CMatrix, LinalgError, Lu, RMatrix};
use crate::poly::{CoefficientAssignment, Monomial, PolyError, SystemTemplate};

/// Points passing this normalized residual are reported.
pub const ORACLE_RESIDUAL: f64 = 1e-8;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("zero polynomial has no finite root set")]
    ZeroPolynomial,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("{0}")]
    Unsupported(String),
}

/// Polynomial with numeric complex coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct NumPoly {
    pub nvars: usize,
    pub terms: BTreeMap<Monomial, Complex64>,
}

impl NumPoly {
    pub fn new(nvars: usize) -> Self {
        NumPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_real(nvars: usize, terms: &[(Vec<u32>, f64)]) -> Self {
        let mut p = NumPoly::new(nvars);
        for (e, c) in terms {
            p.add_term(Monomial(e.clone()), Complex64::new(*c, 0.0));
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Complex64) {
        *self.terms.entry(m).or_insert(Complex64::new(0.0, 0.0)) += c;
    }

    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        self.terms.iter().map(|(m, c)| c * m.eval(x)).sum()
    }

    /// Σ |c x^α|, the scale used by the normalized residual.
    pub fn magnitude(&self, x: &[Complex64]) -> f64 {
        self.terms.iter().map(|(m, c)| (c * m.eval(x)).norm()).sum()
    }

    pub fn degree_in(&self, v: usize) -> usize {
        self.terms.keys().map(|m| m.0[v] as usize).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    /// Coefficients of powers of x_v, evaluated at `x` in every other variable.
    fn coeffs_in(&self, v: usize, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.degree_in(v) + 1];
        let mut pt = x.to_vec();
        pt[v] = Complex64::new(1.0, 0.0);
        for (m, c) in &self.terms {
            out[m.0[v] as usize] += c * m.eval(&pt);
        }
        out
    }

    fn partial(&self, v: usize) -> NumPoly {
        let mut p = NumPoly::new(self.nvars);
        for (m, c) in &self.terms {
            if m.0[v] > 0 {
                let mut e = m.clone();
                e.0[v] -= 1;
                p.add_term(e, c * m.0[v] as f64);
            }
        }
        p
    }

    /// Instantiate every polynomial of a template.
    pub fn from_system(sys: &SystemTemplate, coeffs: &CoefficientAssignment) -> Result<Vec<NumPoly>, PolyError> {
        sys.polys
            .iter()
            .map(|f| {
                let mut p = NumPoly::new(sys.n_vars());
                for t in &f.terms {
                    p.add_term(t.exps.clone(), Complex64::new(t.coeff.value(coeffs)?, 0.0));
                }
                Ok(p)
            })
            .collect()
    }
}

/// max_i |f_i(x)| / (Σ|c x^α| + 1)
pub fn residual(polys: &[NumPoly], x: &[Complex64]) -> f64 {
    polys
        .iter()
        .map(|f| f.eval(x).norm() / (f.magnitude(x) + 1.0))
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OracleRoots {
    pub points: Vec<Vec<Complex64>>,
    pub residuals: Vec<f64>,
    /// The eliminant vanished identically.
    pub positive_dimensional: bool,
}

impl OracleRoots {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Roots of Σ c_i x^i (ascending). Zero leading coefficients are dropped.
pub fn univariate_roots(coeffs: &[f64]) -> Result<Vec<Complex64>, OracleError> {
    let c: Vec<Complex64> = coeffs.iter().map(|&a| Complex64::new(a, 0.0)).collect();
    complex_roots(&c, 0.0)
}

/// Roots of a complex polynomial, dropping leading coefficients with
/// |c| ≤ rel · max|c|.
fn complex_roots(coeffs: &[Complex64], rel: f64) -> Result<Vec<Complex64>, OracleError> {
    let big = coeffs.iter().fold(0.0f64, |a, c| a.max(c.norm()));
    if big == 0.0 {
        return Err(OracleError::ZeroPolynomial);
    }
    let mut d = coeffs.len() - 1;
    while coeffs[d].norm() <= rel * big {
        d -= 1;
    }
    let low = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let mut roots = vec![Complex64::new(0.0, 0.0); low];
    let c = &coeffs[low..=d];
    let d = c.len() - 1;
    if d == 0 {
        return Ok(roots);
    }
    let big = c.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    if c.iter().all(|z| z.im.abs() <= 1e-14 * big) {
        // real companion matrix
        let mut m = RMatrix::zeros(d, d);
        for i in 1..d {
            m[(i, i - 1)] = 1.0;
        }
        for i in 0..d {
            m[(i, d - 1)] = -c[i].re / c[d].re;
        }
        roots.extend(eig(&m)?.values);
    } else {
        roots.extend(complex_companion_roots(c)?);
    }
    Ok(roots)
}

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |a, &ci| a * z + ci)
}

/// Complex coefficients: the real 2d×2d embedding [[Re, -Im], [Im, Re]] has
/// the eigenvalues of C and their conjugates. Take the best-fitting one,
/// deflate, repeat.
fn complex_companion_roots(c: &[Complex64]) -> Result<Vec<Complex64>, OracleError> {
    let mut cur = c.to_vec();
    let mut out = Vec::new();
    while cur.len() > 1 {
        let d = cur.len() - 1;
        let lead = cur[d];
        let mut m = CMatrix::zeros(d, d);
        for i in 1..d {
            m[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        for i in 0..d {
            m[(i, d - 1)] = -cur[i] / lead;
        }
        let mut r = RMatrix::zeros(2 * d, 2 * d);
        for i in 0..d {
            for j in 0..d {
                let z = m[(i, j)];
                r[(i, j)] = z.re;
                r[(i, j + d)] = -z.im;
                r[(i + d, j)] = z.im;
                r[(i + d, j + d)] = z.re;
            }
        }
        let vals = eig(&r)?.values;
        let score = |z: Complex64| {
            let s: f64 = cur.iter().enumerate().map(|(i, ci)| ci.norm() * z.norm().powi(i as i32)).sum();
            horner(&cur, z).norm() / (s + 1e-300)
        };
        let mut z = vals
            .into_iter()
            .min_by(|a, b| score(*a).total_cmp(&score(*b)))
            .expect("nonempty spectrum");
        for _ in 0..3 {
            let dp: Vec<Complex64> = c.iter().enumerate().skip(1).map(|(i, ci)| ci * i as f64).collect();
            let den = horner(&dp, z);
            if den.norm() == 0.0 {
                break;
            }
            let step = horner(c, z) / den;
            if !(step.norm() < 1e-3 * (1.0 + z.norm())) {
                break;
            }
            z -= step;
        }
        // synthetic division by (x - z)
        let mut q = vec![Complex64::new(0.0, 0.0); d];
        let mut acc = Complex64::new(0.0, 0.0);
        for i in (0..d).rev() {
            acc = acc * z + cur[i + 1];
            q[i] = acc;
        }
        out.push(z);
        cur = q;
    }
    Ok(out)
}

/// Sylvester matrix of two univariate coefficient vectors (ascending).
fn sylvester_matrix(f: &[Complex64], g: &[Complex64]) -> CMatrix {
    let p = f.len() - 1;
    let q = g.len() - 1;
    let n = p + q;
    let mut s = CMatrix::zeros(n, n);
    for i in 0..q {
        for (j, c) in f.iter().rev().enumerate() {
            s[(i, i + j)] = *c;
        }
    }
    for i in 0..p {
        for (j, c) in g.iter().rev().enumerate() {
            s[(q + i, i + j)] = *c;
        }
    }
    s
}

fn det_c(m: &CMatrix) -> Complex64 {
    if m.rows() == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        Lu::new(m).det()
    }
}

/// Res_{x_v}(f, g) as a polynomial in the other variables, by evaluation on
/// a grid of roots of unity and an inverse DFT.
pub fn resultant_poly(f: &NumPoly, g: &NumPoly, v: usize) -> NumPoly {
    let n = f.nvars;
    let (p, q) = (f.degree_in(v), g.degree_in(v));
    let bounds: Vec<usize> = (0..n)
        .map(|w| {
            if w == v {
                0
            } else {
                q * f.degree_in(w) + p * g.degree_in(w)
            }
        })
        .collect();
    let sizes: Vec<usize> = bounds.iter().map(|&b| 2 * b + 1).collect();
    let total: usize = sizes.iter().product();
    let mut vals = Vec::with_capacity(total);
    let mut idx = vec![0usize; n];
    let unit = |k: usize, size: usize| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / size as f64);
    for _ in 0..total {
        let x: Vec<Complex64> = (0..n).map(|w| unit(idx[w], sizes[w])).collect();
        let fc = f.coeffs_in(v, &x);
        let gc = g.coeffs_in(v, &x);
        vals.push((idx.clone(), det_c(&sylvester_matrix(&fc, &gc))));
        for w in 0..n {
            idx[w] += 1;
            if idx[w] < sizes[w] {
                break;
            }
            idx[w] = 0;
        }
    }
    let mut out = NumPoly::new(n);
    let mut e = vec![0usize; n];
    let n_coef: usize = bounds.iter().map(|b| b + 1).product();
    for _ in 0..n_coef {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, val) in &vals {
            let mut phase = 0.0;
            for w in 0..n {
                phase -= 2.0 * PI * (k[w] * e[w]) as f64 / sizes[w] as f64;
            }
            acc += val * Complex64::from_polar(1.0, phase);
        }
        acc /= total as f64;
        out.add_term(Monomial(e.iter().map(|&x| x as u32).collect()), acc);
        for w in 0..n {
            e[w] += 1;
            if e[w] <= bounds[w] {
                break;
            }
            e[w] = 0;
        }
    }
    let big = out.terms.values().fold(0.0f64, |a, c| a.max(c.norm()));
    out.terms.retain(|_, c| c.norm() > 1e-13 * big);
    out
}

/// Complex Newton iterations on a square system.
fn newton_polish(polys: &[NumPoly], x0: &[Complex64], iters: usize) -> Vec<Complex64> {
    let n = x0.len();
    let jac: Vec<Vec<NumPoly>> = polys.iter().map(|f| (0..n).map(|v| f.partial(v)).collect()).collect();
    let mut x = x0.to_vec();
    let mut best = (residual(polys, &x), x.clone());
    for _ in 0..iters {
        let fx: Vec<Complex64> = polys.iter().map(|f| f.eval(&x)).collect();
        let mut j = CMatrix::zeros(n, n);
        for i in 0..n {
            for v in 0..n {
                j[(i, v)] = jac[i][v].eval(&x);
            }
        }
        let lu = Lu::new(&j);
        if lu.is_singular() {
            break;
        }
        let dx = lu.solve(&CMatrix::from_vec(n, 1, fx));
        for v in 0..n {
            x[v] -= dx[(v, 0)];
        }
        if !x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            break;
        }
        let r = residual(polys, &x);
        if r < best.0 {
            best = (r, x.clone());
        }
        if r < 1e-15 {
            break;
        }
    }
    best.1
}

/// Candidate points over `active` variables: eliminate the first active
/// variable against every other polynomial, recurse, then back-substitute.
fn cascade(polys: &[NumPoly], active: &[usize]) -> Result<(Vec<Vec<Complex64>>, bool), OracleError> {
    let n = polys[0].nvars;
    let v = active[0];
    if active.len() == 1 {
        let f = polys.iter().find(|f| !f.is_zero()).ok_or(OracleError::ZeroPolynomial)?;
        let pt = vec![Complex64::new(0.0, 0.0); n];
        let roots = complex_roots(&f.coeffs_in(v, &pt), 1e-12)?;
        return Ok((
            roots
                .into_iter()
                .map(|z| {
                    let mut p = pt.clone();
                    p[v] = z;
                    p
                })
                .collect(),
            false,
        ));
    }
    let pivot = polys
        .iter()
        .position(|f| f.degree_in(v) > 0)
        .ok_or_else(|| OracleError::Unsupported("variable does not occur".into()))?;
    let mut reduced = Vec::new();
    for (i, g) in polys.iter().enumerate() {
        if i == pivot {
            continue;
        }
        reduced.push(if g.degree_in(v) == 0 {
            g.clone()
        } else {
            resultant_poly(&polys[pivot], g, v)
        });
    }
    if reduced.iter().all(NumPoly::is_zero) {
        return Ok((Vec::new(), true));
    }
    let reduced: Vec<NumPoly> = reduced.into_iter().filter(|f| !f.is_zero()).collect();
    let (partial, posdim) = cascade(&reduced, &active[1..])?;
    let mut out = Vec::new();
    for pt in partial {
        for f in std::iter::once(&polys[pivot]).chain(polys.iter()) {
            let c = f.coeffs_in(v, &pt);
            if c.iter().skip(1).all(|z| z.norm() == 0.0) {
                continue;
            }
            if let Ok(zs) = complex_roots(&c, 1e-12) {
                for z in zs {
                    let mut p = pt.clone();
                    p[v] = z;
                    out.push(p);
                }
            }
            break;
        }
    }
    Ok((out, posdim))
}

fn finish(polys: &[NumPoly], cands: Vec<Vec<Complex64>>, posdim: bool) -> OracleRoots {
    let square = polys.len() == polys[0].nvars;
    let mut out = OracleRoots {
        positive_dimensional: posdim,
        ..Default::default()
    };
    for c in cands {
        let p = if square { newton_polish(polys, &c, 30) } else { c };
        let r = residual(polys, &p);
        if !(r <= ORACLE_RESIDUAL) {
            continue;
        }
        let scale = 1.0 + p.iter().fold(0.0f64, |a, z| a.max(z.norm()));
        if out
            .points
            .iter()
            .any(|q| q.iter().zip(&p).all(|(a, b)| (a - b).norm() <= 1e-7 * scale))
        {
            continue;
        }
        out.points.push(p);
        out.residuals.push(r);
    }
    out
}

/// Common roots of two bivariate polynomials, eliminating the variable other
/// than `hide`.
pub fn sylvester_bivariate(f: &NumPoly, g: &NumPoly, hide: usize) -> Result<OracleRoots, OracleError> {
    if f.nvars != 2 || g.nvars != 2 || hide > 1 {
        return Err(OracleError::Unsupported("expected two bivariate polynomials".into()));
    }
    if f.is_zero() || g.is_zero() {
        return Err(OracleError::ZeroPolynomial);
    }
    let polys = [f.clone(), g.clone()];
    let elim = 1 - hide;
    let (cands, posdim) = if f.degree_in(elim) == 0 && g.degree_in(elim) == 0 {
        return Err(OracleError::Unsupported("eliminated variable does not occur".into()));
    } else {
        cascade(&polys, &[elim, hide])?
    };
    Ok(finish(&polys, cands, posdim))
}

/// Roots of a square system by cascaded Sylvester elimination. Spurious
/// candidates are removed by Newton polishing and the residual filter.
pub fn cascade_roots(polys: &[NumPoly]) -> Result<OracleRoots, OracleError> {
    let n = polys.first().map_or(0, |f| f.nvars);
    if n == 0 || polys.len() != n {
        return Err(OracleError::Unsupported(format!("{} equations in {n} variables", polys.len())));
    }
    if polys.iter().any(NumPoly::is_zero) {
        return Err(OracleError::ZeroPolynomial);
    }
    let active: Vec<usize> = (0..n).collect();
    let (cands, posdim) = cascade(polys, &active)?;
    Ok(finish(polys, cands, posdim))
}

/// Oracle roots of an instantiated template.
pub fn system_roots(sys: &SystemTemplate, coeffs: &CoefficientAssignment) -> Result<OracleRoots, OracleError> {
    let polys = NumPoly::from_system(sys, coeffs)?;
    cascade_roots(&polys)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_re(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn univariate_examples() {
        let r = sorted_re(univariate_roots(&[6.0, -5.0, 1.0]).unwrap());
        assert!((r[0] - 2.0).norm() < 1e-12 && (r[1] - 3.0).norm() < 1e-12);
        let r = sorted_re(univariate_roots(&[1.0, 0.0, 1.0]).unwrap());
        assert!((r[0] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((r[1] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        let r = univariate_roots(&[-1.0, 3.0, -3.0, 1.0]).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r.iter().all(|z| (z - 1.0).norm() < 1e-4));
        let r = univariate_roots(&[6.0, -5.0, 1.0, 0.0]).unwrap();
        assert_eq!(r.len(), 2);
        assert!(matches!(univariate_roots(&[0.0, 0.0]), Err(OracleError::ZeroPolynomial)));
    }

    #[test]
    fn complex_coefficients() {
        // (x - i)(x - 2)
        let c = [
            Complex64::new(0.0, 2.0),
            Complex64::new(-2.0, -1.0),
            Complex64::new(1.0, 0.0),
        ];
        let r = sorted_re(complex_roots(&c, 0.0).unwrap());
        assert!((r[0] - Complex64::new(0.0, 1.0)).norm() < 1e-10, "{r:?}");
        assert!((r[1] - 2.0).norm() < 1e-10);
    }

    #[test]
    fn conics() {
        let f = NumPoly::from_real(2, &[(vec![2, 0], 1.0), (vec![0, 2], 1.0), (vec![0, 0], -1.0)]);
        let g = NumPoly::from_real(2, &[(vec![1, 1], 1.0), (vec![0, 0], -0.25)]);
        let r = sylvester_bivariate(&f, &g, 1).unwrap();
        assert_eq!(r.len(), 4);
        let big = (0.5 + 0.75f64.sqrt() / 2.0).sqrt();
        for p in &r.points {
            assert!(((p[0] * p[1]) - 0.25).norm() < 1e-12);
            let ax = p[0].re.abs();
            assert!((ax - big).abs() < 1e-9 || (ax - 0.25 / big).abs() < 1e-9);
        }
    }

    #[test]
    fn lines_and_inconsistent() {
        let f = NumPoly::from_real(2, &[(vec![1, 0], 1.0), (vec![0, 0], -1.0)]);
        let g = NumPoly::from_real(2, &[(vec![0, 1], 1.0), (vec![0, 0], -2.0)]);
        let r = sylvester_bivariate(&f, &g, 1).unwrap();
        assert_eq!(r.points.len(), 1);
        assert!((r.points[0][0] - 1.0).norm() < 1e-12 && (r.points[0][1] - 2.0).norm() < 1e-12);
        let f = NumPoly::from_real(2, &[(vec![1, 1], 1.0)]);
        let g = NumPoly::from_real(2, &[(vec![1, 1], 1.0), (vec![0, 0], -1.0)]);
        assert!(sylvester_bivariate(&f, &g, 1).unwrap().is_empty());
    }

    #[test]
    fn resultant_of_lines() {
        // Res_x(x - y, x + y - 2) = 2 - 2y up to sign
        let f = NumPoly::from_real(2, &[(vec![1, 0], 1.0), (vec![0, 1], -1.0)]);
        let g = NumPoly::from_real(2, &[(vec![1, 0], 1.0), (vec![0, 1], 1.0), (vec![0, 0], -2.0)]);
        let r = resultant_poly(&f, &g, 0);
        let y = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(r.eval(&y).norm() < 1e-12);
        assert!(r.degree_in(1) == 1);
    }
}
