use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Candidate, RankProtocol, ResgenError, RowSpec};
use crate::poly::SystemTemplate;

/// A candidate after row (and column) removals, with the removed rows in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduced {
    pub candidate: Candidate,
    pub deleted: Vec<RowSpec>,
}

/// Rows nonempty per polynomial, row count, lower pattern, full column rank
/// and the pivot-block condition.
pub(crate) fn still_valid(aug: &SystemTemplate, c: &Candidate, protocol: &RankProtocol) -> bool {
    if c.t.iter().any(Vec::is_empty) || c.rows() < c.eps() {
        return false;
    }
    if c.upper_rows() < c.eps() - c.n_solutions() {
        return false;
    }
    let Ok(layout) = c.layout(aug) else {
        return false;
    };
    layout.lower_structure_ok(aug, c.hidden, c.variant) && protocol.check(aug, &layout, true)
}

fn drop_rows(c: &Candidate, rows: &BTreeSet<RowSpec>) -> Candidate {
    let mut out = c.clone();
    for (i, ti) in out.t.iter_mut().enumerate() {
        ti.retain(|m| {
            !rows.contains(&RowSpec {
                poly: i,
                mult: m.clone(),
            })
        });
    }
    out
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Row-column removal: pick columns in a seeded random order; drop the rows
/// hitting the column, the columns those rows hit, and every row touching a
/// dropped column. Keep a removal only if the reduced matrix stays valid.
/// Repeats until no column yields a valid removal.
pub fn reduce_rowcol(aug: &SystemTemplate, cand: Candidate, protocol: &RankProtocol, seed: u64) -> Reduced {
    let mut rng = rng_for(seed, 0x616c_6732);
    let mut cur = cand;
    let mut deleted = Vec::new();
    while let Ok(layout) = cur.layout(aug) {
        let mut col_rows = vec![Vec::new(); layout.n_cols()];
        let mut row_cols = vec![Vec::new(); layout.n_rows()];
        for &[r, c, _, _] in &layout.cells {
            col_rows[c].push(r);
            row_cols[r].push(c);
        }
        let mut order: Vec<usize> = (0..layout.n_cols()).collect();
        order.shuffle(&mut rng);
        let mut accepted = None;
        for c in order {
            let cols_hit: BTreeSet<usize> = col_rows[c].iter().flat_map(|&r| row_cols[r].iter().copied()).collect();
            let rows_rm: BTreeSet<usize> = cols_hit.iter().flat_map(|&k| col_rows[k].iter().copied()).collect();
            let specs: BTreeSet<RowSpec> = rows_rm.iter().map(|&r| layout.rows[r].clone()).collect();
            let mut trial = drop_rows(&cur, &specs);
            let used: BTreeSet<&crate::poly::Monomial> = (0..layout.n_rows())
                .filter(|r| !rows_rm.contains(r))
                .flat_map(|r| row_cols[r].iter().map(|&k| &layout.cols[k]))
                .collect();
            trial.b.retain(|m| used.contains(m));
            if trial.n_solutions() > cur.n_solutions() {
                continue;
            }
            if still_valid(aug, &trial, protocol) {
                accepted = Some((trial, rows_rm));
                break;
            }
        }
        match accepted {
            Some((trial, rows_rm)) => {
                assert!(trial.n_solutions() <= cur.n_solutions());
                deleted.extend(rows_rm.iter().map(|&r| layout.rows[r].clone()));
                cur = trial;
            }
            None => break,
        }
    }
    Reduced {
        candidate: cur,
        deleted,
    }
}

/// Remove surplus rows until the matrix is square, trying rows of the extra
/// polynomial first and then random rows of the others. Each removal is
/// re-validated. Dead ends restart with the next seed, up to `retry_cap`.
pub fn squarify(
    aug: &SystemTemplate,
    cand: Candidate,
    protocol: &RankProtocol,
    seed: u64,
    retry_cap: usize,
) -> Result<Reduced, ResgenError> {
    if cand.rows() < cand.eps() {
        return Err(ResgenError::NoSolver(format!(
            "{} rows for {} columns",
            cand.rows(),
            cand.eps()
        )));
    }
    let extra = cand.t.len() - 1;
    let attempts = retry_cap.max(1);
    for attempt in 0..attempts {
        let mut rng = rng_for(seed, 0x616c_6733 + attempt as u64);
        let mut cur = cand.clone();
        let mut deleted = Vec::new();
        let mut checked: BTreeSet<RowSpec> = BTreeSet::new();
        while cur.rows() > cur.eps() {
            let open: Vec<RowSpec> = cur
                .row_specs()
                .into_iter()
                .filter(|r| !checked.contains(r))
                .collect();
            let lower: Vec<&RowSpec> = open.iter().filter(|r| r.poly == extra).collect();
            let pick = if !lower.is_empty() {
                lower[rng.random_range(0..lower.len())].clone()
            } else if !open.is_empty() {
                open[rng.random_range(0..open.len())].clone()
            } else {
                break;
            };
            checked.insert(pick.clone());
            let trial = drop_rows(&cur, &BTreeSet::from([pick.clone()]));
            if still_valid(aug, &trial, protocol) {
                cur = trial;
                deleted.push(pick);
            }
        }
        if cur.rows() == cur.eps() && still_valid(aug, &cur, protocol) {
            return Ok(Reduced {
                candidate: cur,
                deleted,
            });
        }
    }
    Err(ResgenError::Exhausted { attempts })
}
