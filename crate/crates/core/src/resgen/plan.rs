use serde::{Deserialize, Serialize};

use super::{augment, Candidate, Cell, Layout, RankProtocol, ResgenError, RowSpec, Variant};
use crate::geom::Displacement;
use crate::poly::{Monomial, MonomialOrder, SystemTemplate};

/// Everything the online solver needs: the system, the hidden variable, the
/// partition and the matrix layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverPlan {
    pub system: SystemTemplate,
    pub order: MonomialOrder,
    pub seed: u64,
    pub hidden: usize,
    pub variant: Variant,
    pub delta: Displacement,
    pub subset: Vec<usize>,
    pub layout: Layout,
    pub deleted_rows: Vec<RowSpec>,
}

impl SolverPlan {
    pub fn from_candidate(
        sys: &SystemTemplate,
        cand: &Candidate,
        order: MonomialOrder,
        seed: u64,
        deleted_rows: Vec<RowSpec>,
    ) -> Result<Self, ResgenError> {
        let aug = augment(sys, cand.hidden)?;
        let plan = SolverPlan {
            system: sys.clone(),
            order,
            seed,
            hidden: cand.hidden,
            variant: cand.variant,
            delta: cand.delta.clone(),
            subset: cand.subset.clone(),
            layout: cand.layout(&aug)?,
            deleted_rows,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn augmented(&self) -> SystemTemplate {
        augment(&self.system, self.hidden).expect("hidden index checked on construction")
    }

    /// Eigenproblem size N = |B1|.
    pub fn n_solutions(&self) -> usize {
        self.layout.b1_len
    }

    pub fn eps(&self) -> usize {
        self.layout.n_cols()
    }

    /// (upper-block rows, columns): the "A x B" size.
    pub fn size(&self) -> (usize, usize) {
        (self.layout.upper, self.eps())
    }

    pub fn b1(&self) -> &[Monomial] {
        &self.layout.cols[..self.layout.b1_len]
    }

    pub fn b2(&self) -> &[Monomial] {
        &self.layout.cols[self.layout.b1_len..]
    }

    /// Multiplier sets T_1 .. T_{m+1} in row order.
    pub fn multipliers(&self) -> Vec<Vec<Monomial>> {
        let mut t = vec![Vec::new(); self.system.polys.len() + 1];
        for r in &self.layout.rows {
            t[r.poly].push(r.mult.clone());
        }
        t
    }

    /// Structural checks: square, pivot block square, lower pattern, cells.
    pub fn validate(&self) -> Result<(), ResgenError> {
        let l = &self.layout;
        if self.hidden >= self.system.n_vars() {
            return Err(ResgenError::InvalidPlan("hidden variable out of range".into()));
        }
        if l.n_rows() != l.n_cols() {
            return Err(ResgenError::InvalidPlan(format!(
                "matrix is {}x{}, not square",
                l.n_rows(),
                l.n_cols()
            )));
        }
        if l.upper + l.b1_len != l.n_cols() {
            return Err(ResgenError::InvalidPlan("pivot block is not square".into()));
        }
        let aug = self.augmented();
        let rebuilt = Layout::build(&aug, l.rows.clone(), l.upper, l.cols.clone(), l.b1_len)?;
        if rebuilt.cells != l.cells {
            return Err(ResgenError::InvalidPlan("cell map does not match rows and columns".into()));
        }
        if !l.lower_structure_ok(&aug, self.hidden, self.variant) {
            return Err(ResgenError::InvalidPlan("lower block pattern".into()));
        }
        if self.multipliers().iter().any(Vec::is_empty) {
            return Err(ResgenError::InvalidPlan("empty multiplier set".into()));
        }
        Ok(())
    }

    /// Re-check the rank conditions from scratch under `protocol`.
    pub fn revalidate(&self, protocol: &RankProtocol) -> bool {
        self.validate().is_ok() && protocol.check(&self.augmented(), &self.layout, true)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanFile {
    kind: String,
    meta: Meta,
    system: SystemTemplate,
    monomials: Monomials,
    rows: Vec<RowSpec>,
    blocks: Blocks,
    cells: Vec<Cell>,
    deleted_rows: Vec<RowSpec>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Meta {
    seed: u64,
    order: MonomialOrder,
    variant: Variant,
    hidden: usize,
    hidden_name: String,
    root_transform: String,
    delta: Displacement,
    subset: Vec<usize>,
    n_solutions: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Monomials {
    b: Vec<Monomial>,
    b1_len: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Blocks {
    upper_rows: usize,
    lower_rows: usize,
    b1_cols: usize,
    b2_cols: usize,
}

pub const PLAN_KIND: &str = "resultant";

pub fn emit_plan(plan: &SolverPlan) -> String {
    let l = &plan.layout;
    let file = PlanFile {
        kind: PLAN_KIND.into(),
        meta: Meta {
            seed: plan.seed,
            order: plan.order.clone(),
            variant: plan.variant,
            hidden: plan.hidden,
            hidden_name: plan.system.var_names[plan.hidden].clone(),
            root_transform: match plan.variant {
                Variant::V1 => "x = lambda".into(),
                Variant::V2 => "x = -1/lambda".into(),
            },
            delta: plan.delta.clone(),
            subset: plan.subset.clone(),
            n_solutions: plan.n_solutions(),
        },
        system: plan.system.clone(),
        monomials: Monomials {
            b: l.cols.clone(),
            b1_len: l.b1_len,
        },
        rows: l.rows.clone(),
        blocks: Blocks {
            upper_rows: l.upper,
            lower_rows: l.n_rows() - l.upper,
            b1_cols: l.b1_len,
            b2_cols: l.n_cols() - l.b1_len,
        },
        cells: l.cells.clone(),
        deleted_rows: plan.deleted_rows.clone(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("serializable");
    s.push('\n');
    s
}

pub fn load_plan(text: &str) -> Result<SolverPlan, ResgenError> {
    let file: PlanFile = serde_json::from_str(text).map_err(|e| ResgenError::PlanParse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if file.kind != PLAN_KIND {
        return Err(ResgenError::InvalidPlan(format!("kind `{}` is not `{PLAN_KIND}`", file.kind)));
    }
    if file.blocks.upper_rows + file.blocks.lower_rows != file.rows.len()
        || file.blocks.b1_cols != file.monomials.b1_len
        || file.blocks.b1_cols + file.blocks.b2_cols != file.monomials.b.len()
        || file.meta.n_solutions != file.monomials.b1_len
    {
        return Err(ResgenError::InvalidPlan("block extents disagree with rows and columns".into()));
    }
    let plan = SolverPlan {
        system: file.system,
        order: file.meta.order,
        seed: file.meta.seed,
        hidden: file.meta.hidden,
        variant: file.meta.variant,
        delta: file.meta.delta,
        subset: file.meta.subset,
        layout: Layout {
            rows: file.rows,
            upper: file.blocks.upper_rows,
            cols: file.monomials.b,
            b1_len: file.monomials.b1_len,
            cells: file.cells,
        },
        deleted_rows: file.deleted_rows,
    };
    plan.validate()?;
    Ok(plan)
}
