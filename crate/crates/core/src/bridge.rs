//! Action-matrix solvers and their translation to and from resultant plans.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::geom::Displacement;
use crate::linalg::{exact_rank, gj_eliminate, FpMatrix, RMatrix};
use crate::poly::{
    Coefficient, CoefficientAssignment, Monomial, MonomialOrder, PolyError, PolynomialTemplate, SystemTemplate,
    Term,
};
use crate::resgen::{augment, Cell, FpInstance, Layout, RankProtocol, ResgenError, RowSpec, SolverPlan, Variant};
use crate::runtime::{fill, RuntimeError, UnitNormal, InstanceGenerator};

pub const AM_PLAN_KIND: &str = "action-matrix";
pub const LAMBDA: &str = "lambda";

#[derive(Debug, thiserror::Error)]
pub enum BridgeError {
    #[error("no template: {0}")]
    NoTemplate(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("elimination template is numerically singular")]
    Singular,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Resgen(#[from] ResgenError),
    #[error(transparent)]
    Runtime(#[from] RuntimeError),
    #[error("plan parse error at line {line}, column {column}: {message}")]
    PlanParse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
}

/// Elimination template of an action-matrix solver. Columns are ordered
/// [excess, reducible, basis]; the first `excess.len()` rows form the
/// invertible upper-left block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmPlan {
    /// The template system; with `rabinowitsch` it carries the extra
    /// variable and polynomial.
    pub system: SystemTemplate,
    pub order: MonomialOrder,
    pub seed: u64,
    pub action: usize,
    pub basis: Vec<Monomial>,
    pub reducible: Vec<Monomial>,
    pub excess: Vec<Monomial>,
    /// Dependent excess columns dropped from the template.
    pub removed_excess: Vec<Monomial>,
    pub multipliers: Vec<Vec<Monomial>>,
    pub rows: Vec<RowSpec>,
    pub cells: Vec<Cell>,
    /// Index of x_k when the plan acts by lambda = 1/x_k.
    pub rabinowitsch: Option<usize>,
}

/// M_f over `basis`: M_f b_a = f b_a.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionMatrix {
    pub matrix: RMatrix,
    pub basis: Vec<Monomial>,
}

impl AmPlan {
    pub fn cols(&self) -> Vec<Monomial> {
        self.excess.iter().chain(&self.reducible).chain(&self.basis).cloned().collect()
    }

    /// (rows, cols) of the template.
    pub fn size(&self) -> (usize, usize) {
        (self.rows.len(), self.excess.len() + self.reducible.len() + self.basis.len())
    }

    /// Template size outside the identity block contributed by the
    /// x_k lambda - 1 rows.
    pub fn core_size(&self) -> (usize, usize) {
        let (r, c) = self.size();
        match self.rabinowitsch {
            Some(_) => (r - self.reducible.len(), c - self.reducible.len()),
            None => (r, c),
        }
    }

    /// Row j of M_f is a unit row at `Some(l)` when f m_j = basis[l].
    pub fn unit_rows(&self) -> Vec<Option<usize>> {
        let index: HashMap<&Monomial, usize> = self.basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        self.basis
            .iter()
            .map(|m| index.get(&m.times_var(self.action)).copied())
            .collect()
    }

    fn validate(&self) -> Result<(), BridgeError> {
        let k = self.excess.len() + self.reducible.len();
        if self.rows.len() != k {
            return Err(BridgeError::InvalidPlan(format!(
                "{} rows for a {k}-column pivot block",
                self.rows.len()
            )));
        }
        let cols = self.cols();
        let all: BTreeSet<&Monomial> = cols.iter().collect();
        if all.len() != cols.len() {
            return Err(BridgeError::InvalidPlan("column sets overlap".into()));
        }
        for m in &self.basis {
            let fm = m.times_var(self.action);
            if !all.contains(&fm) {
                return Err(BridgeError::InvalidPlan("f times a basis monomial is not a column".into()));
            }
        }
        let cells = build_cells(&self.system, &self.rows, &cols, &self.removed_excess)?;
        if cells != self.cells {
            return Err(BridgeError::InvalidPlan("cell map does not match rows and columns".into()));
        }
        Ok(())
    }
}

fn build_cells(
    sys: &SystemTemplate,
    rows: &[RowSpec],
    cols: &[Monomial],
    removed: &[Monomial],
) -> Result<Vec<Cell>, BridgeError> {
    let index: HashMap<&Monomial, usize> = cols.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let removed: BTreeSet<&Monomial> = removed.iter().collect();
    let mut cells = Vec::new();
    for (r, spec) in rows.iter().enumerate() {
        let f = sys
            .polys
            .get(spec.poly)
            .ok_or_else(|| BridgeError::InvalidPlan(format!("row {r} names polynomial {}", spec.poly)))?;
        for (j, t) in f.terms.iter().enumerate() {
            let m = t.exps.mul(&spec.mult);
            match index.get(&m) {
                Some(&c) => cells.push([r, c, spec.poly, j]),
                None if removed.contains(&m) => {}
                None => {
                    return Err(BridgeError::InvalidPlan(format!(
                        "row {r}: monomial {:?} is not a column",
                        m.0
                    )))
                }
            }
        }
    }
    Ok(cells)
}

fn fp_template(sys: &SystemTemplate, rows: &[RowSpec], cols: &[Monomial], inst: &FpInstance) -> FpMatrix {
    let index: HashMap<&Monomial, usize> = cols.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut out = FpMatrix::zeros(inst.p, rows.len(), cols.len());
    for (r, spec) in rows.iter().enumerate() {
        for t in &sys.polys[spec.poly].terms {
            if let Some(&c) = index.get(&t.exps.mul(&spec.mult)) {
                out.add_to(r, c, t.coeff.value_mod(&inst.slots, inst.p));
            }
        }
    }
    out
}

/// Rank of the selected rows and columns.
fn sub_rank(m: &FpMatrix, rows: &[usize], cols: &[usize]) -> usize {
    exact_rank(&m.select(rows, cols))
}

/// Offline action-matrix construction: expand by the multipliers, split the
/// columns into excess, reducible and basis monomials, drop dependent excess
/// columns and pick rows making [C_e C_r] square and invertible.
pub fn build_template(
    sys: &SystemTemplate,
    basis: &[Monomial],
    action: usize,
    multipliers: &[Vec<Monomial>],
    seed: u64,
) -> Result<AmPlan, BridgeError> {
    let n = sys.n_vars();
    if basis.is_empty() {
        return Err(BridgeError::NoTemplate("empty basis".into()));
    }
    if action >= n {
        return Err(BridgeError::NoTemplate(format!("action variable {action} out of range")));
    }
    if multipliers.len() != sys.polys.len() {
        return Err(BridgeError::NoTemplate(format!(
            "{} multiplier sets for {} polynomials",
            multipliers.len(),
            sys.polys.len()
        )));
    }
    let order = MonomialOrder::grevlex(n);
    let mut all_rows = Vec::new();
    let mut mons = BTreeSet::new();
    for (i, ti) in multipliers.iter().enumerate() {
        for t in ti {
            all_rows.push(RowSpec {
                poly: i,
                mult: t.clone(),
            });
            for term in &sys.polys[i].terms {
                mons.insert(term.exps.mul(t));
            }
        }
    }
    let basis_set: BTreeSet<&Monomial> = basis.iter().collect();
    if let Some(m) = basis.iter().find(|m| !mons.contains(*m)) {
        return Err(BridgeError::NoTemplate(format!("basis monomial {:?} is not in mon(F')", m.0)));
    }
    let mut reducible = Vec::new();
    for m in basis {
        let fm = m.times_var(action);
        if basis_set.contains(&fm) {
            continue;
        }
        if !mons.contains(&fm) {
            return Err(BridgeError::NoTemplate(format!(
                "{} times {:?} is not in mon(F')",
                sys.var_names[action], m.0
            )));
        }
        if !reducible.contains(&fm) {
            reducible.push(fm);
        }
    }
    let red_set: BTreeSet<&Monomial> = reducible.iter().collect();
    let mut excess: Vec<Monomial> = mons
        .iter()
        .filter(|m| !basis_set.contains(m) && !red_set.contains(m))
        .cloned()
        .collect();
    order.sort(&mut excess);

    let cols: Vec<Monomial> = excess.iter().chain(&reducible).chain(basis).cloned().collect();
    let protocol = RankProtocol::standard(seed);
    let insts = protocol.instances(&augment(sys, action)?);
    let mats: Vec<FpMatrix> = insts.iter().map(|i| fp_template(sys, &all_rows, &cols, i)).collect();
    let all_r: Vec<usize> = (0..all_rows.len()).collect();

    // independent excess columns, left to right
    let mut kept: Vec<usize> = Vec::new();
    for j in 0..excess.len() {
        let mut trial = kept.clone();
        trial.push(j);
        if sub_rank(&mats[0], &all_r, &trial) == trial.len() {
            kept = trial;
        }
    }
    let ne = kept.len();
    let nr = reducible.len();
    let pivot_cols: Vec<usize> = kept.iter().copied().chain(excess.len()..excess.len() + nr).collect();
    for m in &mats {
        if sub_rank(m, &all_r, &pivot_cols) != ne + nr {
            return Err(BridgeError::NoTemplate(
                "reducible block is singular after eliminating the excess columns".into(),
            ));
        }
    }

    // rows: first an invertible excess block, then complete the pivot block
    let mut chosen: Vec<usize> = Vec::new();
    for r in 0..all_rows.len() {
        if chosen.len() == ne {
            break;
        }
        let mut trial = chosen.clone();
        trial.push(r);
        if sub_rank(&mats[0], &trial, &kept) == trial.len() {
            chosen = trial;
        }
    }
    for r in 0..all_rows.len() {
        if chosen.len() == ne + nr {
            break;
        }
        if chosen.contains(&r) {
            continue;
        }
        let mut trial = chosen.clone();
        trial.push(r);
        if sub_rank(&mats[0], &trial, &pivot_cols) == trial.len() {
            chosen = trial;
        }
    }
    if chosen.len() != ne + nr
        || mats.iter().any(|m| {
            sub_rank(m, &chosen[..ne], &kept) != ne || sub_rank(m, &chosen, &pivot_cols) != ne + nr
        })
    {
        return Err(BridgeError::NoTemplate("no invertible row selection".into()));
    }

    let kept_set: BTreeSet<usize> = kept.iter().copied().collect();
    let removed_excess: Vec<Monomial> = (0..excess.len())
        .filter(|j| !kept_set.contains(j))
        .map(|j| excess[j].clone())
        .collect();
    let excess: Vec<Monomial> = kept.iter().map(|&j| excess[j].clone()).collect();
    let rows: Vec<RowSpec> = chosen.iter().map(|&r| all_rows[r].clone()).collect();
    let cols: Vec<Monomial> = excess.iter().chain(&reducible).chain(basis).cloned().collect();
    let cells = build_cells(sys, &rows, &cols, &removed_excess)?;
    Ok(AmPlan {
        system: sys.clone(),
        order,
        seed,
        action,
        basis: basis.to_vec(),
        reducible,
        excess,
        removed_excess,
        multipliers: multipliers.to_vec(),
        rows,
        cells,
        rabinowitsch: None,
    })
}

/// Template from the system's action hint.
pub fn build_from_hint(sys: &SystemTemplate, seed: u64) -> Result<AmPlan, BridgeError> {
    let hint = sys
        .action
        .as_ref()
        .ok_or_else(|| BridgeError::NoTemplate("system has no action hint".into()))?;
    let k = sys
        .var_index(&hint.action_var)
        .ok_or_else(|| BridgeError::NoTemplate(format!("unknown action variable `{}`", hint.action_var)))?;
    build_template(sys, &hint.basis, k, &hint.multipliers, seed)
}

/// Numeric template for one instance.
pub fn fill_template(plan: &AmPlan, coeffs: &CoefficientAssignment) -> Result<RMatrix, BridgeError> {
    let (r, c) = plan.size();
    let mut m = RMatrix::zeros(r, c);
    for &[row, col, poly, term] in &plan.cells {
        m[(row, col)] += plan.system.polys[poly].terms[term].coeff.value(coeffs)?;
    }
    Ok(m)
}

/// G-J eliminate the template and read off M_f.
pub fn extract_action_matrix(plan: &AmPlan, coeffs: &CoefficientAssignment) -> Result<ActionMatrix, BridgeError> {
    coeffs.covers(&plan.system)?;
    let c = fill_template(plan, coeffs)?;
    let k = plan.excess.len() + plan.reducible.len();
    let rref = gj_eliminate(&c);
    if rref.pivots.len() < k || rref.pivots[..k].iter().enumerate().any(|(i, &p)| p != i) {
        return Err(BridgeError::Singular);
    }
    let ne = plan.excess.len();
    let na = plan.basis.len();
    let red: HashMap<&Monomial, usize> = plan.reducible.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut m = RMatrix::zeros(na, na);
    for (j, unit) in plan.unit_rows().into_iter().enumerate() {
        match unit {
            Some(l) => m[(j, l)] = 1.0,
            None => {
                let fm = plan.basis[j].times_var(plan.action);
                let r = ne + red[&fm];
                for l in 0..na {
                    m[(j, l)] = -rref.matrix[(r, k + l)];
                }
            }
        }
    }
    if !m.is_finite() {
        return Err(BridgeError::Singular);
    }
    Ok(ActionMatrix {
        matrix: m,
        basis: plan.basis.clone(),
    })
}

/// Resultant plan equivalent to an action-matrix plan: hidden variable =
/// action variable, B1 = basis, B2 = excess then reducible, upper rows =
/// template rows, lower rows = basis multiples of x_k - u0.
pub fn am_to_res(am: &AmPlan) -> Result<SolverPlan, BridgeError> {
    if am.rabinowitsch.is_some() {
        return Err(BridgeError::Unsupported("plans acting by 1/x have no direct resultant form".into()));
    }
    if !am.removed_excess.is_empty() {
        let removed: BTreeSet<&Monomial> = am.removed_excess.iter().collect();
        let touches = am.rows.iter().any(|r| {
            am.system.polys[r.poly]
                .terms
                .iter()
                .any(|t| removed.contains(&t.exps.mul(&r.mult)))
        });
        if touches {
            return Err(BridgeError::Unsupported(
                "template rows touch dropped excess columns".into(),
            ));
        }
    }
    let aug = augment(&am.system, am.action)?;
    let extra = am.system.polys.len();
    let mut rows = am.rows.clone();
    rows.extend(am.basis.iter().map(|t| RowSpec {
        poly: extra,
        mult: t.clone(),
    }));
    let cols: Vec<Monomial> = am.basis.iter().chain(&am.excess).chain(&am.reducible).cloned().collect();
    let layout = Layout::build(&aug, rows, am.rows.len(), cols, am.basis.len())?;
    let plan = SolverPlan {
        system: am.system.clone(),
        order: am.order.clone(),
        seed: am.seed,
        hidden: am.action,
        variant: Variant::V1,
        delta: Displacement::zero(am.system.n_vars()),
        subset: Vec::new(),
        layout,
        deleted_rows: Vec::new(),
    };
    plan.validate()?;
    Ok(plan)
}

/// True when setting x_k = 0 leaves a system with no solutions: some
/// polynomial becomes a nonzero constant, or more equations than unknowns
/// remain and not all of them vanish at the origin.
pub fn excludes_zero_coordinate(sys: &SystemTemplate, k: usize) -> bool {
    let n = sys.n_vars();
    let mut remaining = 0;
    let mut all_homogeneous = true;
    for f in &sys.polys {
        let terms: Vec<&Term> = f.terms.iter().filter(|t| t.exps.0[k] == 0).collect();
        if terms.is_empty() {
            // the polynomial vanishes identically on x_k = 0
            return false;
        }
        if terms.iter().all(|t| t.exps.degree() == 0) {
            return true;
        }
        remaining += 1;
        if terms.iter().any(|t| t.exps.degree() == 0) {
            all_homogeneous = false;
        }
    }
    remaining > n - 1 && !all_homogeneous
}

/// Action-matrix plan equivalent to a resultant plan with N = r.
pub fn res_to_am(plan: &SolverPlan) -> Result<AmPlan, BridgeError> {
    let n1 = plan.n_solutions();
    if plan.variant == Variant::V2 && !excludes_zero_coordinate(&plan.system, plan.hidden) {
        return Err(BridgeError::Unsupported(format!(
            "cannot rule out roots with {} = 0",
            plan.system.var_names[plan.hidden]
        )));
    }
    match plan.system.roots {
        Some(r) if r == n1 => {}
        Some(r) => {
            return Err(BridgeError::Unsupported(format!(
                "eigenproblem size {n1} exceeds the root count {r}"
            )))
        }
        None => {
            return Err(BridgeError::Unsupported(
                "the system does not declare its root count".into(),
            ))
        }
    }
    let l = &plan.layout;
    let m = plan.system.polys.len();
    let upper: Vec<RowSpec> = l.rows[..l.upper].to_vec();
    let lower: Vec<Monomial> = l.rows[l.upper..].iter().map(|r| r.mult.clone()).collect();
    let k = plan.hidden;
    match plan.variant {
        Variant::V1 => {
            let b1: BTreeSet<&Monomial> = plan.b1().iter().collect();
            let mut reducible = Vec::new();
            for t in plan.b1() {
                let fm = t.times_var(k);
                if !b1.contains(&fm) && !reducible.contains(&fm) {
                    reducible.push(fm);
                }
            }
            let red: BTreeSet<&Monomial> = reducible.iter().collect();
            let excess: Vec<Monomial> = plan.b2().iter().filter(|m| !red.contains(m)).cloned().collect();
            let mut multipliers = vec![Vec::new(); m];
            for r in &upper {
                multipliers[r.poly].push(r.mult.clone());
            }
            let cols: Vec<Monomial> = excess.iter().chain(&reducible).chain(plan.b1()).cloned().collect();
            let cells = build_cells(&plan.system, &upper, &cols, &[])?;
            let am = AmPlan {
                system: plan.system.clone(),
                order: plan.order.clone(),
                seed: plan.seed,
                action: k,
                basis: plan.b1().to_vec(),
                reducible,
                excess,
                removed_excess: Vec::new(),
                multipliers,
                rows: upper,
                cells,
                rabinowitsch: None,
            };
            am.validate()?;
            Ok(am)
        }
        Variant::V2 => {
            let sys = rabinowitsch_system(&plan.system, k)?;
            let pad = |x: &Monomial| x.pad(1);
            let lam = sys.n_vars() - 1;
            let mut rows: Vec<RowSpec> = upper
                .iter()
                .map(|r| RowSpec {
                    poly: r.poly,
                    mult: pad(&r.mult),
                })
                .collect();
            rows.extend(lower.iter().map(|t| RowSpec {
                poly: m,
                mult: pad(t),
            }));
            let basis: Vec<Monomial> = plan.b1().iter().map(pad).collect();
            let reducible: Vec<Monomial> = basis.iter().map(|b| b.times_var(lam)).collect();
            let excess: Vec<Monomial> = plan.b2().iter().map(pad).collect();
            let mut multipliers = vec![Vec::new(); m + 1];
            for r in &rows {
                multipliers[r.poly].push(r.mult.clone());
            }
            let cols: Vec<Monomial> = excess.iter().chain(&reducible).chain(&basis).cloned().collect();
            let cells = build_cells(&sys, &rows, &cols, &[])?;
            let am = AmPlan {
                system: sys,
                order: MonomialOrder::grevlex(plan.system.n_vars() + 1),
                seed: plan.seed,
                action: lam,
                basis,
                reducible,
                excess,
                removed_excess: Vec::new(),
                multipliers,
                rows,
                cells,
                rabinowitsch: Some(k),
            };
            am.validate()?;
            Ok(am)
        }
    }
}

/// Append the variable lambda and the polynomial x_k lambda - 1.
pub fn rabinowitsch_system(sys: &SystemTemplate, k: usize) -> Result<SystemTemplate, BridgeError> {
    let n = sys.n_vars();
    if sys.var_names.iter().any(|v| v == LAMBDA) {
        return Err(BridgeError::Unsupported(format!("variable `{LAMBDA}` already exists")));
    }
    let mut names = sys.var_names.clone();
    names.push(LAMBDA.into());
    let mut polys: Vec<PolynomialTemplate> = sys
        .polys
        .iter()
        .map(|f| {
            PolynomialTemplate::new(
                f.terms
                    .iter()
                    .map(|t| Term {
                        coeff: t.coeff.clone(),
                        exps: t.exps.pad(1),
                    })
                    .collect(),
            )
        })
        .collect();
    let mut xl = Monomial::var(n + 1, k);
    xl.0[n] = 1;
    polys.push(PolynomialTemplate::new(vec![
        Term {
            coeff: Coefficient::constant(1),
            exps: xl,
        },
        Term {
            coeff: Coefficient::constant(-1),
            exps: Monomial::one(n + 1),
        },
    ]));
    let mut out = SystemTemplate::new(names, polys)?;
    out.roots = sys.roots;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    pub size_match: bool,
    pub trials: usize,
    /// max over trials of |M_f - X|_max / (1 + |X|_F)
    pub max_rel_diff: f64,
    pub failures: usize,
}

/// Relative tolerance on max |M_f - X|.
pub const EQUIV_TOL: f64 = 1e-8;

/// Compare M_f against X (or -X for plans acting by 1/x_k) on random
/// instances, and the template size against the upper block.
pub fn check_equivalence(am: &AmPlan, res: &SolverPlan, trials: usize, seed: u64) -> EquivalenceReport {
    check_equivalence_with(am, res, &UnitNormal::for_plan(res, seed), trials)
}

pub fn check_equivalence_with(
    am: &AmPlan,
    res: &SolverPlan,
    generator: &dyn InstanceGenerator,
    trials: usize,
) -> EquivalenceReport {
    let size_match = am.core_size() == (res.layout.upper, res.eps());
    let strip = |m: &Monomial| match am.rabinowitsch {
        Some(_) => Monomial(m.0[..m.0.len() - 1].to_vec()),
        None => m.clone(),
    };
    let am_basis: Vec<Monomial> = am.basis.iter().map(strip).collect();
    let pos: HashMap<&Monomial, usize> = am_basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let perm: Option<Vec<usize>> = res.b1().iter().map(|m| pos.get(m).copied()).collect();
    let same_action = match am.rabinowitsch {
        Some(k) => res.variant == Variant::V2 && k == res.hidden,
        None => res.variant == Variant::V1 && am.action == res.hidden,
    };
    let mut report = EquivalenceReport {
        equivalent: false,
        size_match,
        trials,
        max_rel_diff: 0.0,
        failures: 0,
    };
    let Some(perm) = perm.filter(|p| p.len() == am_basis.len() && same_action) else {
        report.max_rel_diff = f64::INFINITY;
        return report;
    };
    let sign = if am.rabinowitsch.is_some() { -1.0 } else { 1.0 };
    let diffs: Vec<Option<f64>> = (0..trials as u64)
        .map(|t| {
            let c = generator.instance(t);
            let mf = extract_action_matrix(am, &c).ok()?;
            let inst = fill(res, &c).ok()?;
            let (x, _) = inst.schur().ok()?;
            let n = x.rows();
            let mut worst: f64 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let d = (mf.matrix[(perm[i], perm[j])] - sign * x[(i, j)]).abs();
                    worst = worst.max(d);
                }
            }
            Some(worst / (1.0 + x.frobenius()))
        })
        .collect();
    for d in &diffs {
        match d {
            Some(v) => report.max_rel_diff = report.max_rel_diff.max(*v),
            None => report.failures += 1,
        }
    }
    report.equivalent = size_match && report.failures == 0 && report.max_rel_diff <= EQUIV_TOL;
    report
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AmFile {
    kind: String,
    meta: AmMeta,
    system: SystemTemplate,
    monomials: AmMonomials,
    multipliers: Vec<Vec<Monomial>>,
    rows: Vec<RowSpec>,
    blocks: AmBlocks,
    cells: Vec<Cell>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AmMeta {
    seed: u64,
    order: MonomialOrder,
    action: usize,
    action_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rabinowitsch: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AmMonomials {
    excess: Vec<Monomial>,
    reducible: Vec<Monomial>,
    basis: Vec<Monomial>,
    removed_excess: Vec<Monomial>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AmBlocks {
    upper_rows: usize,
    lower_rows: usize,
    excess_cols: usize,
    reducible_cols: usize,
    basis_cols: usize,
}

pub fn emit_am_plan(plan: &AmPlan) -> String {
    let file = AmFile {
        kind: AM_PLAN_KIND.into(),
        meta: AmMeta {
            seed: plan.seed,
            order: plan.order.clone(),
            action: plan.action,
            action_name: plan.system.var_names[plan.action].clone(),
            rabinowitsch: plan.rabinowitsch,
        },
        system: plan.system.clone(),
        monomials: AmMonomials {
            excess: plan.excess.clone(),
            reducible: plan.reducible.clone(),
            basis: plan.basis.clone(),
            removed_excess: plan.removed_excess.clone(),
        },
        multipliers: plan.multipliers.clone(),
        rows: plan.rows.clone(),
        blocks: AmBlocks {
            upper_rows: plan.excess.len(),
            lower_rows: plan.rows.len() - plan.excess.len(),
            excess_cols: plan.excess.len(),
            reducible_cols: plan.reducible.len(),
            basis_cols: plan.basis.len(),
        },
        cells: plan.cells.clone(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("serializable");
    s.push('\n');
    s
}

pub fn load_am_plan(text: &str) -> Result<AmPlan, BridgeError> {
    let f: AmFile = serde_json::from_str(text).map_err(|e| BridgeError::PlanParse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if f.kind != AM_PLAN_KIND {
        return Err(BridgeError::InvalidPlan(format!("kind `{}` is not `{AM_PLAN_KIND}`", f.kind)));
    }
    let b = &f.blocks;
    if b.upper_rows != f.monomials.excess.len()
        || b.excess_cols != f.monomials.excess.len()
        || b.reducible_cols != f.monomials.reducible.len()
        || b.basis_cols != f.monomials.basis.len()
        || b.upper_rows + b.lower_rows != f.rows.len()
    {
        return Err(BridgeError::InvalidPlan("block extents disagree with rows and columns".into()));
    }
    if f.meta.action >= f.system.n_vars() {
        return Err(BridgeError::InvalidPlan("action variable out of range".into()));
    }
    let plan = AmPlan {
        system: f.system,
        order: f.meta.order,
        seed: f.meta.seed,
        action: f.meta.action,
        basis: f.monomials.basis,
        reducible: f.monomials.reducible,
        excess: f.monomials.excess,
        removed_excess: f.monomials.removed_excess,
        multipliers: f.multipliers,
        rows: f.rows,
        cells: f.cells,
        rabinowitsch: f.meta.rabinowitsch,
    };
    plan.validate()?;
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eig;
    use crate::poly::parse_system;
    use crate::resgen::{generate, GenConfig};

    fn mono(e: &[u32]) -> Monomial {
        Monomial(e.to_vec())
    }

    const QUAD: &str = r#"{"variables":["x"],"polynomials":["a*x^2 + b*x + c"],"roots":2}"#;

    #[test]
    fn quadratic_template() {
        let sys = parse_system(QUAD).unwrap();
        let am = build_template(&sys, &[mono(&[0]), mono(&[1])], 0, &[vec![mono(&[0])]], 1).unwrap();
        assert_eq!(am.reducible, vec![mono(&[2])]);
        assert!(am.excess.is_empty());
        assert_eq!(am.size(), (1, 3));
        let c = CoefficientAssignment::from_pairs([("a", 1.0), ("b", -5.0), ("c", 6.0)]);
        let t = fill_template(&am, &c).unwrap();
        assert_eq!(t.to_rows(), vec![vec![1.0, 6.0, -5.0]]);
        let mf = extract_action_matrix(&am, &c).unwrap();
        assert_eq!(mf.matrix.to_rows(), vec![vec![0.0, 1.0], vec![-6.0, 5.0]]);
        let mut ev: Vec<f64> = eig(&mf.matrix).unwrap().values.iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] - 2.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);

        let c = CoefficientAssignment::from_pairs([("a", 1.0), ("b", 0.0), ("c", -1.0)]);
        let mf = extract_action_matrix(&am, &c).unwrap();
        assert_eq!(mf.matrix.to_rows(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn missing_reducible_is_rejected() {
        let sys = parse_system(QUAD).unwrap();
        let r = build_template(&sys, &[mono(&[0]), mono(&[1]), mono(&[2])], 0, &[vec![mono(&[0])]], 1);
        assert!(matches!(r, Err(BridgeError::NoTemplate(_))));
    }

    #[test]
    fn quadratic_round_trip() {
        let sys = parse_system(QUAD).unwrap();
        let am = build_template(&sys, &[mono(&[0]), mono(&[1])], 0, &[vec![mono(&[0])]], 1).unwrap();
        let res = am_to_res(&am).unwrap();
        assert_eq!(res.size(), (1, 3));
        let c = CoefficientAssignment::from_pairs([("a", 1.0), ("b", -5.0), ("c", 6.0)]);
        let (x, _) = fill(&res, &c).unwrap().schur().unwrap();
        assert_eq!(x.to_rows(), vec![vec![0.0, 1.0], vec![-6.0, 5.0]]);
        let rep = check_equivalence(&am, &res, 20, 3);
        assert!(rep.equivalent, "{rep:?}");
    }

    #[test]
    fn linear_res_to_am() {
        let sys = parse_system(r#"{"variables":["x"],"polynomials":["a*x + b"],"roots":1}"#).unwrap();
        let res = generate(
            &sys,
            &GenConfig {
                variants: vec![Variant::V1],
                ..GenConfig::default()
            },
        )
        .unwrap();
        let am = res_to_am(&res).unwrap();
        let c = CoefficientAssignment::from_pairs([("a", 1.0), ("b", -2.0)]);
        let mf = extract_action_matrix(&am, &c).unwrap();
        assert_eq!(mf.matrix.to_rows(), vec![vec![2.0]]);
        assert!(check_equivalence(&am, &res, 10, 1).equivalent);
        let text = emit_am_plan(&am);
        assert_eq!(load_am_plan(&text).unwrap(), am);
    }

    #[test]
    fn zero_coordinate_structure() {
        let sys = parse_system(r#"{"variables":["x","y"],"polynomials":["a*x*y + b*x","c*x + d*y + e"]}"#).unwrap();
        assert!(!excludes_zero_coordinate(&sys, 0));
        let sys = parse_system(r#"{"variables":["x","y"],"polynomials":["a*x^2 + b*y^2 + c","d*x*y + e"]}"#).unwrap();
        assert!(excludes_zero_coordinate(&sys, 0));
        assert!(excludes_zero_coordinate(&sys, 1));
        let sys = parse_system(r#"{"variables":["x"],"polynomials":["a*x^2 + b*x"]}"#).unwrap();
        assert!(!excludes_zero_coordinate(&sys, 0));
    }
}
