//! Online solver: fill M(u0) for a numeric instance, reduce to the Schur
//! complement, eigendecompose and read roots off the eigenvectors.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{eig, pivot_solve, CMatrix, LinalgError, RMatrix};
use crate::poly::{normalized_residual, CoefficientAssignment, Monomial, PolyError, HIDDEN_SLOT};
use crate::resgen::{SolverPlan, Variant};

/// Residual above which a root counts as a failure.
pub const FAIL_THRESHOLD: f64 = 1e-3;
/// Default imaginary-part tolerance for the real flag.
pub const REAL_TOL: f64 = 1e-6;
const LOG_FLOOR: f64 = 1e-20;

#[derive(Debug, thiserror::Error)]
pub enum RuntimeError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("variable `{0}` cannot be recovered from the eigenvectors")]
    Unrecoverable(String),
    #[error("eigenvector has length {got}, expected {expected}")]
    Dimension { got: usize, expected: usize },
}

/// Numeric blocks of M(u0) for one instance. The lower block is
/// `l0 + u0 * l1`, split over the B1 and B2 columns.
#[derive(Clone, Debug)]
pub struct SolverInstance<'a> {
    pub plan: &'a SolverPlan,
    pub coeffs: CoefficientAssignment,
    pub a11: RMatrix,
    pub a12: RMatrix,
    pub l0_b1: RMatrix,
    pub l0_b2: RMatrix,
    pub l1_b1: RMatrix,
    pub l1_b2: RMatrix,
}

impl SolverInstance<'_> {
    /// The blocks entering X: (A21, A22) for V1, (B21, B22) for V2.
    pub fn lower_blocks(&self) -> (&RMatrix, &RMatrix) {
        match self.plan.variant {
            Variant::V1 => (&self.l0_b1, &self.l0_b2),
            Variant::V2 => (&self.l1_b1, &self.l1_b2),
        }
    }

    /// The full square matrix M(u0).
    pub fn matrix_at(&self, u0: Complex64) -> CMatrix {
        let up = self.a11.rows();
        let n1 = self.a11.cols();
        let n = self.plan.eps();
        let mut m = CMatrix::zeros(self.plan.layout.n_rows(), n);
        for i in 0..up {
            for j in 0..n1 {
                m[(i, j)] = self.a11[(i, j)].into();
            }
            for j in 0..n - n1 {
                m[(i, n1 + j)] = self.a12[(i, j)].into();
            }
        }
        for i in 0..self.l0_b1.rows() {
            for j in 0..n1 {
                m[(up + i, j)] = u0 * self.l1_b1[(i, j)] + self.l0_b1[(i, j)];
            }
            for j in 0..n - n1 {
                m[(up + i, n1 + j)] = u0 * self.l1_b2[(i, j)] + self.l0_b2[(i, j)];
            }
        }
        m
    }

    /// The eigenproblem matrix X and Y with A12 Y = A11.
    pub fn schur(&self) -> Result<(RMatrix, RMatrix), RuntimeError> {
        let y = pivot_solve(&self.a12, &self.a11)?;
        let (c21, c22) = self.lower_blocks();
        Ok((c21.sub(&c22.matmul(&y)), y))
    }
}

/// Write every layout cell from its (poly, term, multiplier) source.
pub fn fill<'a>(plan: &'a SolverPlan, coeffs: &CoefficientAssignment) -> Result<SolverInstance<'a>, RuntimeError> {
    coeffs.covers(&plan.system)?;
    let l = &plan.layout;
    let (up, n1, n) = (l.upper, l.b1_len, l.n_cols());
    let low = l.n_rows() - up;
    let aug = plan.augmented();
    let mut a11 = RMatrix::zeros(up, n1);
    let mut a12 = RMatrix::zeros(up, n - n1);
    let mut l0 = RMatrix::zeros(low, n);
    let mut l1 = RMatrix::zeros(low, n);
    for &[r, c, poly, term] in &l.cells {
        let coeff = &aug.polys[poly].terms[term].coeff;
        if r < up {
            let v = coeff.value(coeffs)?;
            if c < n1 {
                a11[(r, c)] += v;
            } else {
                a12[(r, c - n1)] += v;
            }
        } else if coeff.slot.as_deref() == Some(HIDDEN_SLOT) {
            l1[(r - up, c)] += coeff.scale as f64;
        } else {
            l0[(r - up, c)] += coeff.value(coeffs)?;
        }
    }
    Ok(SolverInstance {
        plan,
        coeffs: coeffs.clone(),
        a11,
        a12,
        l0_b1: l0.block(0, low, 0, n1),
        l0_b2: l0.block(0, low, n1, n),
        l1_b1: l1.block(0, low, 0, n1),
        l1_b2: l1.block(0, low, n1, n),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub point: Vec<Complex64>,
    pub eigvalue: Complex64,
    pub residual: f64,
    pub is_real: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolutionSet {
    pub roots: Vec<Root>,
}

impl SolutionSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn real(&self) -> impl Iterator<Item = &Root> {
        self.roots.iter().filter(|r| r.is_real)
    }

    /// Residuals in ascending order.
    pub fn sorted_residuals(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.roots.iter().map(|r| r.residual).collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Is the point real up to `tol` relative to its magnitude?
pub fn is_real_point(p: &[Complex64], tol: f64) -> bool {
    let im = p.iter().fold(0.0f64, |a, z| a.max(z.im.abs()));
    let mag = p.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    im <= tol * (1.0 + mag)
}

/// Eigendecompose X and recover one root per usable eigenpair. `tol` is the
/// imaginary-part tolerance of the real flag.
pub fn solve(inst: &SolverInstance, tol: f64) -> Result<SolutionSet, RuntimeError> {
    let plan = inst.plan;
    let (x, y) = inst.schur()?;
    let e = eig(&x)?;
    let scale = x.max_abs().max(1.0);
    let mut roots = Vec::new();
    for j in 0..e.values.len() {
        let mu = e.values[j];
        let xk = match plan.variant {
            Variant::V1 => mu,
            Variant::V2 => {
                if mu.norm() <= 1e-14 * scale {
                    continue;
                }
                -1.0 / mu
            }
        };
        let v = e.vector(j);
        let point = recover_with(&v, plan, xk, Some(&y))?;
        let residual = if point.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            normalized_residual(&plan.system, &inst.coeffs, &point)?
        } else {
            f64::INFINITY
        };
        roots.push(Root {
            is_real: is_real_point(&point, tol),
            point,
            eigvalue: mu,
            residual,
        });
    }
    Ok(SolutionSet { roots })
}

/// Fill and solve in one step.
pub fn solve_instance(plan: &SolverPlan, coeffs: &CoefficientAssignment, tol: f64) -> Result<SolutionSet, RuntimeError> {
    solve(&fill(plan, coeffs)?, tol)
}

/// Recover a full point from an eigenvector over B1. The hidden coordinate
/// is `hidden_value`; every other x_i is the least-squares ratio over pairs
/// (m, x_i m) of B1.
pub fn recover(eigvec: &[Complex64], plan: &SolverPlan, hidden_value: Complex64) -> Result<Vec<Complex64>, RuntimeError> {
    recover_with(eigvec, plan, hidden_value, None)
}

fn ratio_pairs(cols: &[Monomial], i: usize) -> Vec<(usize, usize)> {
    let index: HashMap<&Monomial, usize> = cols.iter().enumerate().map(|(j, m)| (m, j)).collect();
    cols.iter()
        .enumerate()
        .filter_map(|(a, m)| index.get(&m.times_var(i)).map(|&b| (a, b)))
        .collect()
}

fn least_squares_ratio(v: &[Complex64], pairs: &[(usize, usize)]) -> Complex64 {
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for &(a, b) in pairs {
        num += v[a].conj() * v[b];
        den += v[a].norm_sqr();
    }
    num / den
}

/// With `y`, variables without a pair inside B1 fall back to the full vector
/// over B, where the B2 part is -Y v1.
fn recover_with(
    eigvec: &[Complex64],
    plan: &SolverPlan,
    hidden_value: Complex64,
    y: Option<&RMatrix>,
) -> Result<Vec<Complex64>, RuntimeError> {
    let b1 = plan.b1();
    if eigvec.len() != b1.len() {
        return Err(RuntimeError::Dimension {
            got: eigvec.len(),
            expected: b1.len(),
        });
    }
    let n = plan.system.n_vars();
    let one = Monomial::one(n);
    let mut v: Vec<Complex64> = eigvec.to_vec();
    if let Some(j) = b1.iter().position(|m| *m == one) {
        if v[j].norm() > 0.0 {
            let s = v[j];
            v.iter_mut().for_each(|z| *z /= s);
        }
    }
    let mut full: Option<Vec<Complex64>> = None;
    let mut point = vec![Complex64::new(0.0, 0.0); n];
    for (i, p) in point.iter_mut().enumerate() {
        if i == plan.hidden {
            *p = hidden_value;
            continue;
        }
        let pairs = ratio_pairs(b1, i);
        if !pairs.is_empty() {
            *p = least_squares_ratio(&v, &pairs);
            continue;
        }
        let Some(y) = y else {
            return Err(RuntimeError::Unrecoverable(plan.system.var_names[i].clone()));
        };
        let cols = &plan.layout.cols;
        let pairs = ratio_pairs(cols, i);
        if pairs.is_empty() {
            return Err(RuntimeError::Unrecoverable(plan.system.var_names[i].clone()));
        }
        let w = full.get_or_insert_with(|| {
            let b2 = y.to_complex().matvec(&v);
            v.iter().copied().chain(b2.into_iter().map(|z| -z)).collect()
        });
        *p = least_squares_ratio(w, &pairs);
    }
    Ok(point)
}

/// Produces the coefficients of trial `t`.
pub trait InstanceGenerator: Sync {
    fn instance(&self, trial: u64) -> CoefficientAssignment;
}

impl<F: Fn(u64) -> CoefficientAssignment + Sync> InstanceGenerator for F {
    fn instance(&self, trial: u64) -> CoefficientAssignment {
        self(trial)
    }
}

/// Independent standard-normal coefficient per slot; trial t draws from its
/// own stream so results do not depend on scheduling.
#[derive(Clone, Debug)]
pub struct UnitNormal {
    pub slots: Vec<String>,
    pub seed: u64,
}

impl UnitNormal {
    pub fn new(slots: Vec<String>, seed: u64) -> Self {
        UnitNormal { slots, seed }
    }

    pub fn for_plan(plan: &SolverPlan, seed: u64) -> Self {
        Self::new(plan.system.slots(), seed)
    }
}

impl InstanceGenerator for UnitNormal {
    fn instance(&self, trial: u64) -> CoefficientAssignment {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        let mut c = CoefficientAssignment::new();
        for s in &self.slots {
            c.set(s, StandardNormal.sample(&mut rng));
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub p50: f64,
    pub p95: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub trials: usize,
    pub mean_log10: f64,
    pub median_log10: f64,
    pub fail_pct: f64,
    /// Real roots with residual under the threshold -> number of trials.
    pub n_solutions_histogram: BTreeMap<usize, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_us: Option<Timing>,
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}

struct Trial {
    residuals: Option<Vec<f64>>,
    n_good: usize,
    micros: f64,
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[idx]
}

/// Run `trials` instances. Per trial the r best residuals are scored when
/// the system declares its root count r, otherwise all of them. A trial
/// fails on a solve error or any scored residual above `tol`.
pub fn benchmark(
    plan: &SolverPlan,
    generator: &dyn InstanceGenerator,
    trials: usize,
    tol: f64,
    timing: bool,
) -> BenchReport {
    let r = plan.system.roots;
    let results: Vec<Trial> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let coeffs = generator.instance(t);
            let start = Instant::now();
            let sol = solve_instance(plan, &coeffs, REAL_TOL);
            let micros = start.elapsed().as_secs_f64() * 1e6;
            match sol {
                Ok(s) => {
                    let mut res = s.sorted_residuals();
                    if let Some(r) = r {
                        res.truncate(r);
                    }
                    let n_good = s.real().filter(|x| x.residual <= tol).count();
                    Trial {
                        residuals: Some(res),
                        n_good,
                        micros,
                    }
                }
                Err(_) => Trial {
                    residuals: None,
                    n_good: 0,
                    micros,
                },
            }
        })
        .collect();

    let mut logs = Vec::new();
    let mut fails = 0usize;
    let mut hist = BTreeMap::new();
    let mut times = Vec::with_capacity(results.len());
    for t in &results {
        times.push(t.micros);
        *hist.entry(t.n_good).or_insert(0) += 1;
        match &t.residuals {
            Some(res) => {
                if res.is_empty() || res.iter().any(|&x| !(x <= tol)) {
                    fails += 1;
                }
                logs.extend(res.iter().map(|&x| if x.is_finite() { x.max(LOG_FLOOR).log10() } else { f64::MAX.log10() }));
            }
            None => fails += 1,
        }
    }
    logs.sort_by(f64::total_cmp);
    times.sort_by(f64::total_cmp);
    let mean = if logs.is_empty() {
        f64::NAN
    } else {
        logs.iter().sum::<f64>() / logs.len() as f64
    };
    let median = if logs.is_empty() {
        f64::NAN
    } else if logs.len() % 2 == 1 {
        logs[logs.len() / 2]
    } else {
        0.5 * (logs[logs.len() / 2 - 1] + logs[logs.len() / 2])
    };
    BenchReport {
        trials,
        mean_log10: mean,
        median_log10: median,
        fail_pct: 100.0 * fails as f64 / trials.max(1) as f64,
        n_solutions_histogram: hist,
        timing_us: timing.then(|| Timing {
            p50: percentile(&times, 0.5),
            p95: percentile(&times, 0.95),
        }),
    }
}
