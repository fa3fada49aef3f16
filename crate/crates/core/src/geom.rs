//! Integer polytopes: hulls, Minkowski sums and shifted lattice points.
//!
//! Hulls use the double description method on homogenized points (1, v), in
//! exact integer arithmetic.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePolytope {
    ambient: usize,
    vertices: Vec<Vec<i64>>,
    dim: usize,
    /// Rows (y0, y) meaning y0 + y.x >= 0.
    facets: Vec<Vec<i128>>,
    /// Rows (y0, y) meaning y0 + y.x = 0.
    equalities: Vec<Vec<i128>>,
}

impl LatticePolytope {
    /// Extreme points, sorted.
    pub fn vertices(&self) -> &[Vec<i64>] {
        &self.vertices
    }

    /// Affine dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn facets(&self) -> &[Vec<i128>] {
        &self.facets
    }

    pub fn equalities(&self) -> &[Vec<i128>] {
        &self.equalities
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        let val = |y: &Vec<i128>| y[0] + y[1..].iter().zip(p).map(|(a, &b)| a * b as i128).sum::<i128>();
        self.equalities.iter().all(|y| val(y) == 0) && self.facets.iter().all(|y| val(y) >= 0)
    }
}

/// Shift vector with entries in {-d, 0, d}, d = num/den.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Displacement {
    pub signs: Vec<i8>,
    pub num: i64,
    pub den: i64,
}

impl Displacement {
    pub fn zero(n: usize) -> Self {
        Displacement {
            signs: vec![0; n],
            num: 0,
            den: 1,
        }
    }

    /// Build from signs and a decimal magnitude such as 0.1 or 0.001.
    pub fn new(signs: Vec<i8>, magnitude: f64) -> Self {
        let (num, den) = decimal_ratio(magnitude);
        Displacement { signs, num, den }.normalized()
    }

    pub fn uniform(n: usize, value: f64) -> Self {
        let s = if value > 0.0 {
            1
        } else if value < 0.0 {
            -1
        } else {
            0
        };
        Displacement::new(vec![s; n], value.abs())
    }

    fn normalized(mut self) -> Self {
        if self.num == 0 || self.signs.iter().all(|&s| s == 0) {
            self.num = 0;
            self.den = 1;
            self.signs.iter_mut().for_each(|s| *s = 0);
        } else {
            let g = gcd(self.num as i128, self.den as i128) as i64;
            self.num /= g;
            self.den /= g;
        }
        self
    }

    pub fn magnitude(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn values(&self) -> Vec<f64> {
        self.signs.iter().map(|&s| s as f64 * self.magnitude()).collect()
    }

    /// Every vector in {-d, 0, d}^n.
    pub fn all(n: usize, magnitude: f64) -> Vec<Displacement> {
        let mut out = Vec::new();
        let total = 3usize.pow(n as u32);
        for mut code in 0..total {
            let mut signs = vec![0i8; n];
            for s in signs.iter_mut() {
                *s = [0i8, -1, 1][code % 3];
                code /= 3;
            }
            out.push(Displacement::new(signs, magnitude));
        }
        out
    }
}

fn decimal_ratio(x: f64) -> (i64, i64) {
    let x = x.abs();
    let mut den = 1i64;
    for _ in 0..12 {
        let v = x * den as f64;
        if (v - v.round()).abs() <= 1e-9 * v.max(1.0) {
            return (v.round() as i64, den);
        }
        den *= 10;
    }
    ((x * den as f64).round() as i64, den)
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

fn dot(a: &[i128], b: &[i128]) -> i128 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.checked_mul(*y).expect("hull arithmetic overflow"))
        .fold(0i128, |s, v| s.checked_add(v).expect("hull arithmetic overflow"))
}

fn reduce(v: &mut [i128]) {
    let g = v.iter().fold(0i128, |g, &x| gcd(g, x));
    if g > 1 {
        v.iter_mut().for_each(|x| *x /= g);
    }
}

/// c1*a + c2*b, gcd-reduced.
fn combine(c1: i128, a: &[i128], c2: i128, b: &[i128]) -> Vec<i128> {
    let mut v: Vec<i128> = a
        .iter()
        .zip(b)
        .map(|(x, y)| {
            c1.checked_mul(*x)
                .and_then(|p| c2.checked_mul(*y).and_then(|q| p.checked_add(q)))
                .expect("hull arithmetic overflow")
        })
        .collect();
    reduce(&mut v);
    v
}

/// Rank of an integer matrix by fraction-free elimination.
pub fn integer_rank(rows: &[Vec<i128>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank].clone();
        for r in rank + 1..m.len() {
            if m[r][c] != 0 {
                let f = m[r][c];
                m[r] = combine(pivot[c], &m[r], -f, &pivot);
            }
        }
        rank += 1;
    }
    rank
}

type Bits = Vec<u64>;

fn bit_set(b: &mut Bits, i: usize) {
    let w = i / 64;
    if b.len() <= w {
        b.resize(w + 1, 0);
    }
    b[w] |= 1 << (i % 64);
}

fn bits_and(a: &Bits, b: &Bits) -> Bits {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn bits_subset(a: &Bits, b: &Bits) -> bool {
    a.iter()
        .enumerate()
        .all(|(i, x)| x & !b.get(i).copied().unwrap_or(0) == 0)
}

fn bits_count(a: &Bits) -> usize {
    a.iter().map(|x| x.count_ones() as usize).sum()
}

struct Ray {
    v: Vec<i128>,
    zeros: Bits,
}

/// Generators of {y : a_j . y >= 0}: (lineality basis, extreme rays).
fn double_description(constraints: &[Vec<i128>], d: usize) -> (Vec<Vec<i128>>, Vec<Ray>) {
    let mut lin: Vec<Vec<i128>> = (0..d)
        .map(|i| {
            let mut e = vec![0; d];
            e[i] = 1;
            e
        })
        .collect();
    let mut rays: Vec<Ray> = Vec::new();
    for (j, a) in constraints.iter().enumerate() {
        if let Some(pos) = lin.iter().position(|l| dot(a, l) != 0) {
            let mut star = lin.remove(pos);
            let sa = dot(a, &star);
            if sa < 0 {
                star.iter_mut().for_each(|x| *x = -*x);
            }
            let sa = sa.abs();
            lin = lin
                .iter()
                .map(|l| combine(sa, l, -dot(a, l), &star))
                .collect();
            for r in rays.iter_mut() {
                let ar = dot(a, &r.v);
                if ar != 0 {
                    r.v = combine(sa, &r.v, -ar, &star);
                }
                bit_set(&mut r.zeros, j);
            }
            rays.push(Ray {
                v: star,
                zeros: Bits::new(),
            });
            // the new ray is zero on every earlier constraint
            let last = rays.last_mut().unwrap();
            for i in 0..j {
                bit_set(&mut last.zeros, i);
            }
            continue;
        }
        let vals: Vec<i128> = rays.iter().map(|r| dot(a, &r.v)).collect();
        let plus: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] > 0).collect();
        let minus: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] < 0).collect();
        let eff = d - lin.len();
        let mut fresh: Vec<Ray> = Vec::new();
        for &p in &plus {
            for &q in &minus {
                let common = bits_and(&rays[p].zeros, &rays[q].zeros);
                if eff >= 2 && bits_count(&common) + 2 < eff {
                    continue;
                }
                let adjacent = (0..rays.len())
                    .filter(|&r| r != p && r != q)
                    .all(|r| !bits_subset(&common, &rays[r].zeros));
                if !adjacent {
                    continue;
                }
                let v = combine(vals[p], &rays[q].v, -vals[q], &rays[p].v);
                let mut zeros = common;
                bit_set(&mut zeros, j);
                fresh.push(Ray { v, zeros });
            }
        }
        let mut kept: Vec<Ray> = Vec::new();
        for (i, mut r) in rays.into_iter().enumerate() {
            if vals[i] == 0 {
                bit_set(&mut r.zeros, j);
            }
            if vals[i] >= 0 {
                kept.push(r);
            }
        }
        kept.extend(fresh);
        rays = kept;
    }
    (lin, rays)
}

/// Hull of a nonempty set of integer points of common length.
pub fn convex_hull(points: &[Vec<i64>]) -> LatticePolytope {
    assert!(!points.is_empty(), "convex_hull of an empty set");
    let n = points[0].len();
    assert!(points.iter().all(|p| p.len() == n), "points differ in length");
    let pts: Vec<Vec<i64>> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let cons: Vec<Vec<i128>> = pts
        .iter()
        .map(|p| std::iter::once(1i128).chain(p.iter().map(|&x| x as i128)).collect())
        .collect();
    let (lin, rays) = double_description(&cons, n + 1);
    let facets: Vec<Vec<i128>> = rays.into_iter().map(|r| r.v).collect();
    let mut vertices = Vec::new();
    for (p, a) in pts.iter().zip(&cons) {
        let mut tight: Vec<Vec<i128>> = facets.iter().filter(|f| dot(a, f) == 0).cloned().collect();
        tight.extend(lin.iter().cloned());
        if integer_rank(&tight) == n {
            vertices.push(p.clone());
        }
    }
    LatticePolytope {
        ambient: n,
        dim: n - lin.len(),
        vertices,
        facets,
        equalities: lin,
    }
}

/// Hull of pairwise vertex sums, folded left.
pub fn minkowski_sum(polys: &[LatticePolytope]) -> LatticePolytope {
    assert!(!polys.is_empty(), "minkowski_sum of nothing");
    let mut acc = polys[0].clone();
    for q in &polys[1..] {
        assert_eq!(acc.ambient, q.ambient, "ambient dimensions differ");
        let mut sums = BTreeSet::new();
        for a in &acc.vertices {
            for b in &q.vertices {
                sums.insert(a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<i64>>());
            }
        }
        acc = convex_hull(&sums.into_iter().collect::<Vec<_>>());
    }
    acc
}

pub fn unit_simplex(n: usize) -> LatticePolytope {
    assert!(n >= 1, "unit simplex needs n >= 1");
    let mut pts = vec![vec![0i64; n]];
    for i in 0..n {
        let mut e = vec![0i64; n];
        e[i] = 1;
        pts.push(e);
    }
    convex_hull(&pts)
}

fn floor_div(a: i128, b: i128) -> i128 {
    a.div_euclid(b)
}

/// All z in Z^n with z - delta in Q, sorted.
pub fn lattice_points(q: &LatticePolytope, delta: &Displacement) -> Vec<Vec<i64>> {
    let n = q.ambient;
    assert_eq!(delta.signs.len(), n, "displacement length");
    let num = delta.num as i128;
    let den = delta.den as i128;
    let shift: Vec<i128> = delta.signs.iter().map(|&s| s as i128 * num).collect();
    let mut lo = vec![0i64; n];
    let mut hi = vec![0i64; n];
    for i in 0..n {
        let mn = q.vertices.iter().map(|v| v[i]).min().unwrap() as i128;
        let mx = q.vertices.iter().map(|v| v[i]).max().unwrap() as i128;
        lo[i] = -floor_div(-(mn * den + shift[i]), den) as i64;
        hi[i] = floor_div(mx * den + shift[i], den) as i64;
    }
    if (0..n).any(|i| lo[i] > hi[i]) {
        return Vec::new();
    }
    // den*y0 + y.(den*z - shift)
    let value = |y: &Vec<i128>, z: &[i64]| -> i128 {
        let mut s = den * y[0];
        for i in 0..n {
            s += y[i + 1] * (den * z[i] as i128 - shift[i]);
        }
        s
    };
    let mut out = Vec::new();
    let mut z = lo.clone();
    loop {
        if q.equalities.iter().all(|y| value(y, &z) == 0) && q.facets.iter().all(|y| value(y, &z) >= 0) {
            out.push(z.clone());
        }
        let mut i = 0;
        loop {
            if i == n {
                out.sort();
                return out;
            }
            if z[i] < hi[i] {
                z[i] += 1;
                break;
            }
            z[i] = lo[i];
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[&[i64]]) -> Vec<Vec<i64>> {
        let mut s: Vec<Vec<i64>> = v.iter().map(|x| x.to_vec()).collect();
        s.sort();
        s
    }

    #[test]
    fn hull_examples() {
        let h = convex_hull(&set(&[&[2, 0], &[0, 1], &[1, 0], &[0, 0]]));
        assert_eq!(h.vertices(), set(&[&[0, 0], &[2, 0], &[0, 1]]).as_slice());
        assert_eq!(h.dim(), 2);
        let h = convex_hull(&[vec![3, 3]]);
        assert_eq!(h.vertices(), &[vec![3, 3]]);
        assert_eq!(h.dim(), 0);
        let h = convex_hull(&set(&[&[0, 0], &[1, 0], &[2, 0]]));
        assert_eq!(h.vertices(), set(&[&[0, 0], &[2, 0]]).as_slice());
        assert_eq!(h.dim(), 1);
    }

    #[test]
    fn cube_and_interior() {
        let mut pts = Vec::new();
        for x in 0..3 {
            for y in 0..3 {
                for z in 0..3 {
                    pts.push(vec![x, y, z]);
                }
            }
        }
        let h = convex_hull(&pts);
        assert_eq!(h.vertices().len(), 8);
        assert_eq!(h.facets().len(), 6);
    }

    #[test]
    fn minkowski_examples() {
        let p = convex_hull(&set(&[&[0, 0], &[2, 0], &[0, 1]]));
        let o = convex_hull(&[vec![0, 0]]);
        assert_eq!(minkowski_sum(&[p.clone(), o]).vertices(), p.vertices());
        let a = convex_hull(&set(&[&[0, 0], &[1, 0]]));
        let b = convex_hull(&set(&[&[0, 0], &[0, 1]]));
        let sq = minkowski_sum(&[a, b]);
        assert_eq!(sq.vertices(), set(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]).as_slice());
    }

    #[test]
    fn unit_simplices() {
        assert_eq!(unit_simplex(1).vertices(), &[vec![0], vec![1]]);
        assert_eq!(unit_simplex(2).vertices().len(), 3);
        assert_eq!(unit_simplex(3).vertices().len(), 4);
    }

    #[test]
    fn simplex_lattice_points() {
        let s = unit_simplex(2);
        assert_eq!(lattice_points(&s, &Displacement::zero(2)), set(&[&[0, 0], &[1, 0], &[0, 1]]));
        assert_eq!(lattice_points(&s, &Displacement::uniform(2, -0.1)), vec![vec![0, 0]]);
        assert!(lattice_points(&s, &Displacement::uniform(2, 0.1)).is_empty());
    }

    #[test]
    fn degenerate_lattice_points() {
        let seg = convex_hull(&set(&[&[0, 0], &[2, 2]]));
        assert_eq!(lattice_points(&seg, &Displacement::zero(2)), set(&[&[0, 0], &[1, 1], &[2, 2]]));
        assert!(lattice_points(&seg, &Displacement::new(vec![1, 0], 0.1)).is_empty());
        assert_eq!(
            lattice_points(&seg, &Displacement::new(vec![0, 0], 0.1)),
            set(&[&[0, 0], &[1, 1], &[2, 2]])
        );
    }

    #[test]
    fn displacement_grid() {
        let all = Displacement::all(2, 0.1);
        assert_eq!(all.len(), 9);
        assert_eq!(all[0], Displacement::zero(2));
        let d = Displacement::new(vec![-1, 1], 0.001);
        assert_eq!((d.num, d.den), (1, 1000));
    }
}
