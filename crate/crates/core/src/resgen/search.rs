use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::{augment, Candidate, GenConfig, Layout, RankProtocol, ResgenError};
use crate::geom::{convex_hull, lattice_points, minkowski_sum, unit_simplex, Displacement, LatticePolytope};
use crate::poly::{extend_system, Monomial, MonomialOrder, SystemTemplate};

/// Nonempty subsets of 0..m by increasing size, then lexicographically.
pub(crate) fn subsets(m: usize, max_size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in 1..=max_size.min(m) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.push(idx.clone());
            let mut i = size;
            let mut advanced = false;
            while i > 0 {
                i -= 1;
                if idx[i] < m - size + i {
                    idx[i] += 1;
                    for j in i + 1..size {
                        idx[j] = idx[j - 1] + 1;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
    }
    out
}

fn newton_polytopes(aug: &SystemTemplate) -> Vec<LatticePolytope> {
    aug.polys
        .iter()
        .map(|f| {
            let pts: Vec<Vec<i64>> = f.terms.iter().map(|t| t.exps.to_i64()).collect();
            convex_hull(&pts)
        })
        .collect()
}

fn displacements(n: usize, magnitudes: &[f64]) -> Vec<Displacement> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &d in magnitudes {
        for delta in Displacement::all(n, d) {
            if seen.insert(delta.clone()) {
                out.push(delta);
            }
        }
    }
    out
}

/// Enumerate favourable candidates over hidden variables, polytope subsets and
/// displacements. Candidates pass the row-count and coverage conditions; rank
/// conditions are left to [`test_partition`].
pub fn search_candidates(sys: &SystemTemplate, cfg: &GenConfig, order: &MonomialOrder) -> Vec<Candidate> {
    let n = sys.n_vars();
    let hidden: Vec<usize> = match cfg.hidden {
        Some(k) => vec![k],
        None => (0..n).collect(),
    };
    let deltas = displacements(n, &cfg.magnitudes);
    let np0 = unit_simplex(n);
    let augs: BTreeMap<usize, (SystemTemplate, Vec<LatticePolytope>)> = hidden
        .iter()
        .filter_map(|&k| {
            augment(sys, k).ok().map(|a| {
                let p = newton_polytopes(&a);
                (k, (a, p))
            })
        })
        .collect();
    let mut tasks = Vec::new();
    for (&k, (aug, _)) in &augs {
        let m1 = aug.polys.len();
        for s in subsets(m1, cfg.max_subset.unwrap_or(m1)) {
            tasks.push((k, s));
        }
    }

    let found: Vec<Vec<Candidate>> = tasks
        .par_iter()
        .map(|(k, subset)| {
            let (aug, polys) = &augs[k];
            let mut parts = vec![np0.clone()];
            parts.extend(subset.iter().map(|&i| polys[i].clone()));
            let q = minkowski_sum(&parts);
            let mut seen: BTreeSet<Vec<Monomial>> = BTreeSet::new();
            let mut out = Vec::new();
            for delta in &deltas {
                let pts = lattice_points(&q, delta);
                if pts.is_empty() {
                    continue;
                }
                let bprime: BTreeSet<Monomial> =
                    pts.into_iter().map(|p| Monomial(p.into_iter().map(|x| x as u32).collect())).collect();
                let ext = extend_system(&aug.polys, &bprime, order);
                if ext.b.is_empty() || !seen.insert(ext.b.clone()) {
                    continue;
                }
                if ext.rows() < ext.b.len() || ext.t.iter().any(Vec::is_empty) {
                    continue;
                }
                for &variant in &cfg.variants {
                    out.push(Candidate {
                        hidden: *k,
                        variant,
                        delta: delta.clone(),
                        subset: subset.clone(),
                        t: ext.t.clone(),
                        b: ext.b.clone(),
                    });
                }
            }
            out
        })
        .collect();

    let mut seen = BTreeSet::new();
    found
        .into_iter()
        .flatten()
        .filter(|c| seen.insert((c.hidden, c.variant, c.b.clone())))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accepted(Layout),
    /// C(u0) is not of full column rank.
    RankDeficient,
    /// A12 lacks full column rank or the lower block has the wrong pattern.
    NoSchurComplement(String),
}

/// Verify the block partition of a candidate.
pub fn test_partition(aug: &SystemTemplate, cand: &Candidate, protocol: &RankProtocol) -> Verdict {
    let layout = match cand.layout(aug) {
        Ok(l) => l,
        Err(e) => return Verdict::NoSchurComplement(e.to_string()),
    };
    if !layout.lower_structure_ok(aug, cand.hidden, cand.variant) {
        return Verdict::NoSchurComplement("lower block does not have the required pattern".into());
    }
    if protocol.check(aug, &layout, true) {
        Verdict::Accepted(layout)
    } else if !protocol.check(aug, &layout, false) {
        Verdict::RankDeficient
    } else {
        Verdict::NoSchurComplement("A12 is not of full column rank".into())
    }
}

/// Smallest candidate by |B1|, then p*eps, then p, then layout.
pub fn select_best(cands: Vec<Candidate>) -> Option<Candidate> {
    cands.into_iter().min_by_key(Candidate::key)
}

/// Test candidates in key order and return the first valid one. This gives
/// the same answer as validating all of them and calling [`select_best`].
pub(crate) fn first_valid(
    sys: &SystemTemplate,
    mut cands: Vec<Candidate>,
    protocol: &RankProtocol,
) -> Result<Candidate, ResgenError> {
    let mut keyed: Vec<_> = cands.drain(..).map(|c| (c.key(), c)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    let mut augs = BTreeMap::new();
    for (_, c) in keyed {
        let aug = match augs.entry(c.hidden) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => e.insert(augment(sys, c.hidden)?),
        };
        if c.upper_rows() < c.eps() - c.n_solutions() {
            continue;
        }
        if let Verdict::Accepted(_) = test_partition(aug, &c, protocol) {
            return Ok(c);
        }
    }
    Err(ResgenError::NoSolver(
        "no candidate has a full-rank coefficient matrix with an invertible pivot block".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_system;
    use crate::resgen::Variant;

    #[test]
    fn subset_order() {
        let s = subsets(3, 3);
        assert_eq!(
            s,
            vec![vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]]
        );
        assert_eq!(subsets(4, 1).len(), 4);
    }

    #[test]
    fn univariate_linear_candidate() {
        let sys = parse_system(r#"{"variables":["x"],"polynomials":["a*x + b"]}"#).unwrap();
        let cfg = GenConfig::default();
        let order = MonomialOrder::grevlex(1);
        let cands = search_candidates(&sys, &cfg, &order);
        let m = |e: u32| Monomial(vec![e]);
        let c = cands
            .iter()
            .find(|c| c.variant == Variant::V1 && c.b == vec![m(0), m(1)])
            .expect("B = {1, x}");
        assert_eq!(c.t, vec![vec![m(0)], vec![m(0)]]);
        let (b1, b2) = c.partition();
        assert_eq!((b1, b2), (vec![m(0)], vec![m(1)]));
        let aug = augment(&sys, 0).unwrap();
        match test_partition(&aug, c, &RankProtocol::standard(1)) {
            Verdict::Accepted(l) => assert!(l.lower_structure_ok(&aug, 0, Variant::V1)),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn empty_multiplier_set_is_rejected() {
        // over B = {1, x, x^2} the second polynomial has no multiples
        let sys = parse_system(r#"{"variables":["x"],"polynomials":["a*x + b", "c*x^5 + d*x^4"]}"#).unwrap();
        let cands = search_candidates(&sys, &GenConfig::default(), &MonomialOrder::grevlex(1));
        assert!(!cands.is_empty());
        assert!(cands.iter().all(|c| c.t.iter().all(|t| !t.is_empty())));
        let small: Vec<Monomial> = (0..3).map(|e| Monomial(vec![e])).collect();
        assert!(cands.iter().all(|c| c.b != small));
    }

    #[test]
    fn singular_a12_rejected() {
        let sys = parse_system(r#"{"variables":["x"],"polynomials":["x - a"]}"#).unwrap();
        let aug = augment(&sys, 0).unwrap();
        let m = |e: u32| Monomial(vec![e]);
        let c = Candidate {
            hidden: 0,
            variant: Variant::V1,
            delta: Displacement::zero(1),
            subset: vec![0],
            t: vec![vec![m(0)], vec![m(0), m(1)]],
            b: vec![m(0), m(1), m(2)],
        };
        // the only upper row misses the x^2 column, so A12 = [0]
        assert!(matches!(
            test_partition(&aug, &c, &RankProtocol::standard(3)),
            Verdict::NoSchurComplement(_)
        ));
    }

    #[test]
    fn select_best_examples() {
        let m = |e: u32| Monomial(vec![e]);
        let mk = |n1: usize, extra_rows: usize| Candidate {
            hidden: 0,
            variant: Variant::V1,
            delta: Displacement::zero(1),
            subset: vec![0],
            t: vec![(0..extra_rows as u32).map(m).collect(), (0..n1 as u32).map(m).collect()],
            b: (0..(n1 + extra_rows) as u32).map(m).collect(),
        };
        let a = mk(5, 2);
        let b = mk(3, 2);
        assert_eq!(select_best(vec![a.clone(), b.clone()]), Some(b.clone()));
        assert_eq!(select_best(vec![a.clone()]), Some(a));
        let small = mk(3, 2);
        let mut big = mk(3, 2);
        big.t[0].push(m(9));
        assert_eq!(select_best(vec![big, small.clone()]), Some(small));
    }
}
