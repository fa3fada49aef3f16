//! Offline generator: augmentation, favourable monomial search, block
//! partition, row/column reductions and plan emission.

mod plan;
mod rank;
mod reduce;
mod search;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::geom::Displacement;
use crate::linalg::FpMatrix;
use crate::poly::{
    Coefficient, Monomial, MonomialOrder, OrderKind, PolyError, PolynomialTemplate, SystemTemplate,
    Term, HIDDEN_SLOT,
};

pub use plan::{emit_plan, load_plan, SolverPlan};
pub use rank::{FpInstance, RankProtocol};
pub use reduce::{reduce_rowcol, squarify, Reduced};
pub use search::{search_candidates, select_best, test_partition, Verdict};

#[derive(Debug, thiserror::Error)]
pub enum ResgenError {
    #[error("no solver: {0}")]
    NoSolver(String),
    #[error("row removal exhausted after {attempts} seeds")]
    Exhausted { attempts: usize },
    #[error("variable index {index} out of range for {n} variables")]
    InvalidVariable { index: usize, n: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("plan parse error at line {line}, column {column}: {message}")]
    PlanParse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("{polys} polynomials in {vars} variables: need at least as many polynomials as variables")]
    Underdetermined { polys: usize, vars: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    V1,
    V2,
}

impl Variant {
    pub fn parse_list(s: &str) -> Option<Vec<Variant>> {
        match s.to_ascii_lowercase().as_str() {
            "v1" => Some(vec![Variant::V1]),
            "v2" => Some(vec![Variant::V2]),
            "both" => Some(vec![Variant::V1, Variant::V2]),
            _ => None,
        }
    }
}

/// One row of the coefficient matrix: polynomial `poly` times `mult`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RowSpec {
    pub poly: usize,
    pub mult: Monomial,
}

/// Matrix entry source: (row, col, poly, term).
pub type Cell = [usize; 4];

/// Append f_{m+1} = x_k - u0 (k is 0-based).
pub fn augment(sys: &SystemTemplate, k: usize) -> Result<SystemTemplate, ResgenError> {
    let n = sys.n_vars();
    if k >= n {
        return Err(ResgenError::InvalidVariable { index: k, n });
    }
    let mut out = sys.clone();
    out.polys.push(PolynomialTemplate::new(vec![
        Term {
            coeff: Coefficient::constant(1),
            exps: Monomial::var(n, k),
        },
        Term {
            coeff: Coefficient {
                scale: -1,
                slot: Some(HIDDEN_SLOT.to_string()),
            },
            exps: Monomial::one(n),
        },
    ]));
    Ok(out)
}

/// A favourable monomial set with its multiplier sets and partition variant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub hidden: usize,
    pub variant: Variant,
    pub delta: Displacement,
    /// Indices into the augmented system whose polytopes were summed.
    pub subset: Vec<usize>,
    /// T_1 .. T_{m+1}, each ascending in the monomial order.
    pub t: Vec<Vec<Monomial>>,
    /// All columns, ascending in the monomial order.
    pub b: Vec<Monomial>,
}

impl Candidate {
    pub fn rows(&self) -> usize {
        self.t.iter().map(Vec::len).sum()
    }

    pub fn upper_rows(&self) -> usize {
        self.rows() - self.t.last().map_or(0, Vec::len)
    }

    pub fn eps(&self) -> usize {
        self.b.len()
    }

    /// (B1 in T_{m+1} order, B2 in B order).
    pub fn partition(&self) -> (Vec<Monomial>, Vec<Monomial>) {
        let last = self.t.last().expect("augmented system");
        let b1: Vec<Monomial> = match self.variant {
            Variant::V1 => last.clone(),
            Variant::V2 => last.iter().map(|t| t.times_var(self.hidden)).collect(),
        };
        let set: std::collections::BTreeSet<&Monomial> = b1.iter().collect();
        let b2 = self.b.iter().filter(|m| !set.contains(m)).cloned().collect();
        (b1, b2)
    }

    pub fn n_solutions(&self) -> usize {
        self.t.last().map_or(0, Vec::len)
    }

    /// Row specs: upper rows by polynomial then multiplier, lower rows last.
    pub fn row_specs(&self) -> Vec<RowSpec> {
        self.t
            .iter()
            .enumerate()
            .flat_map(|(i, ti)| ti.iter().map(move |m| RowSpec { poly: i, mult: m.clone() }))
            .collect()
    }

    pub fn layout(&self, aug: &SystemTemplate) -> Result<Layout, ResgenError> {
        let (b1, b2) = self.partition();
        let n1 = b1.len();
        let cols: Vec<Monomial> = b1.into_iter().chain(b2).collect();
        Layout::build(aug, self.row_specs(), self.upper_rows(), cols, n1)
    }

    /// Selection key: |B1|, p*eps, p, then a deterministic layout comparison.
    pub fn key(&self) -> CandidateKey {
        let p = self.rows();
        let (b1, b2) = self.partition();
        CandidateKey {
            n: self.n_solutions(),
            size: p * self.eps(),
            rows: p,
            variant: self.variant,
            hidden: self.hidden,
            cols: b1.into_iter().chain(b2).map(|m| m.0).collect(),
            row_specs: self.row_specs().into_iter().map(|r| (r.poly, r.mult.0)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CandidateKey {
    pub n: usize,
    pub size: usize,
    pub rows: usize,
    pub variant: Variant,
    pub hidden: usize,
    pub cols: Vec<Vec<u32>>,
    pub row_specs: Vec<(usize, Vec<u32>)>,
}

/// Row/column layout of the coefficient matrix of an augmented system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub rows: Vec<RowSpec>,
    /// Leading rows belonging to the original polynomials.
    pub upper: usize,
    pub cols: Vec<Monomial>,
    /// Leading columns forming B1.
    pub b1_len: usize,
    pub cells: Vec<Cell>,
}

impl Layout {
    pub fn build(
        aug: &SystemTemplate,
        rows: Vec<RowSpec>,
        upper: usize,
        cols: Vec<Monomial>,
        b1_len: usize,
    ) -> Result<Layout, ResgenError> {
        let index: HashMap<&Monomial, usize> = cols.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut cells = Vec::new();
        for (r, spec) in rows.iter().enumerate() {
            let f = aug
                .polys
                .get(spec.poly)
                .ok_or_else(|| ResgenError::InvalidPlan(format!("row {r} names polynomial {}", spec.poly)))?;
            for (j, term) in f.terms.iter().enumerate() {
                let m = term.exps.mul(&spec.mult);
                let c = *index.get(&m).ok_or_else(|| {
                    ResgenError::InvalidPlan(format!("row {r}: monomial {:?} is not a column", m.0))
                })?;
                cells.push([r, c, spec.poly, j]);
            }
        }
        Ok(Layout {
            rows,
            upper,
            cols,
            b1_len,
            cells,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    /// Instantiate over Z/p.
    pub fn fp_matrix(&self, aug: &SystemTemplate, inst: &FpInstance) -> FpMatrix {
        let mut m = FpMatrix::zeros(inst.p, self.n_rows(), self.n_cols());
        for &[r, c, poly, term] in &self.cells {
            let coeff = &aug.polys[poly].terms[term].coeff;
            m.add_to(r, c, coeff.value_mod(&inst.slots, inst.p));
        }
        m
    }

    pub fn upper_rows(&self) -> Vec<usize> {
        (0..self.upper).collect()
    }

    pub fn b2_cols(&self) -> Vec<usize> {
        (self.b1_len..self.n_cols()).collect()
    }

    /// Check the lower-block pattern required by the partition variant.
    pub fn lower_structure_ok(&self, aug: &SystemTemplate, hidden: usize, variant: Variant) -> bool {
        let extra = aug.polys.len() - 1;
        let lower = self.n_rows() - self.upper;
        if lower != self.b1_len {
            return false;
        }
        let mut seen = vec![0usize; lower];
        for &[r, c, poly, term] in &self.cells {
            if r < self.upper {
                if poly == extra {
                    return false;
                }
                continue;
            }
            if poly != extra {
                return false;
            }
            let i = r - self.upper;
            let is_u0 = aug.polys[poly].terms[term].coeff.slot.as_deref() == Some(HIDDEN_SLOT);
            let t = &self.rows[r].mult;
            let expect = match (variant, is_u0) {
                // B21 = -I, B22 = 0
                (Variant::V1, true) => c == i,
                (Variant::V1, false) => self.cols[c] == t.times_var(hidden),
                // A21 = I, A22 = 0
                (Variant::V2, false) => c == i,
                (Variant::V2, true) => self.cols[c] == *t,
            };
            if !expect {
                return false;
            }
            seen[i] += 1;
        }
        seen.iter().all(|&s| s == 2)
    }
}

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub magnitudes: Vec<f64>,
    /// Largest subset of polytopes to sum; `None` means all.
    pub max_subset: Option<usize>,
    pub order: OrderKind,
    pub variants: Vec<Variant>,
    pub seed: u64,
    /// Restrict the hidden variable.
    pub hidden: Option<usize>,
    pub retry_cap: usize,
    pub reduce: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            magnitudes: vec![0.1, 0.001],
            max_subset: None,
            order: OrderKind::Grevlex,
            variants: vec![Variant::V1, Variant::V2],
            seed: 1,
            hidden: None,
            retry_cap: 32,
            reduce: true,
        }
    }
}

/// Full offline pipeline: search, select, reduce, squarify.
pub fn generate(sys: &SystemTemplate, cfg: &GenConfig) -> Result<SolverPlan, ResgenError> {
    if sys.polys.len() < sys.n_vars() {
        return Err(ResgenError::Underdetermined {
            polys: sys.polys.len(),
            vars: sys.n_vars(),
        });
    }
    let order = MonomialOrder::new(cfg.order, sys.n_vars());
    let protocol = RankProtocol::standard(cfg.seed);
    let cands = search_candidates(sys, cfg, &order);
    if cands.is_empty() {
        return Err(ResgenError::NoSolver(
            "no monomial set satisfies the row-count and coverage conditions".into(),
        ));
    }
    let best = search::first_valid(sys, cands, &protocol)?;
    let aug = augment(sys, best.hidden)?;
    let (cand, mut deleted) = if cfg.reduce {
        let r = reduce_rowcol(&aug, best, &protocol, cfg.seed);
        (r.candidate, r.deleted)
    } else {
        (best, Vec::new())
    };
    let sq = squarify(&aug, cand, &protocol, cfg.seed, cfg.retry_cap)?;
    deleted.extend(sq.deleted);
    SolverPlan::from_candidate(sys, &sq.candidate, order, cfg.seed, deleted)
}

/// Slot values for every slot of the augmented system, mod p.
pub(crate) fn slot_names(aug: &SystemTemplate) -> Vec<String> {
    let mut s = aug.slots();
    if !s.iter().any(|x| x == HIDDEN_SLOT) {
        s.push(HIDDEN_SLOT.to_string());
    }
    s
}

pub(crate) fn slot_map(names: &[String], vals: &[u64]) -> BTreeMap<String, u64> {
    names.iter().cloned().zip(vals.iter().copied()).collect()
}
