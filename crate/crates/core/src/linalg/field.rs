//! Matrices over Z/p for p < 2^32.

/// Dense row-major matrix over Z/p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpMatrix {
    pub p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl FpMatrix {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        assert!((2..1 << 32).contains(&p), "modulus out of range");
        FpMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_rows(p: u64, rows: &[Vec<u64>]) -> Self {
        let mut m = Self::zeros(p, rows.len(), rows.first().map_or(0, Vec::len));
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.p;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: u64) {
        let k = i * self.cols + j;
        self.data[k] = (self.data[k] + v % self.p) % self.p;
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut m = Self::zeros(self.p, rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.data[a * cols.len() + b] = self.get(i, j);
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// Row echelon form in place; returns pivot columns.
    fn echelon(&mut self, reduced: bool) -> Vec<usize> {
        let p = self.p;
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == self.rows {
                break;
            }
            let Some(piv) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            self.swap_rows(r, piv);
            let inv = inv_mod(self.get(r, c), p);
            for j in c..cols {
                let k = r * cols + j;
                self.data[k] = self.data[k] * inv % p;
            }
            let start = if reduced { 0 } else { r + 1 };
            for i in start..self.rows {
                if i == r {
                    continue;
                }
                let f = self.get(i, c);
                if f == 0 {
                    continue;
                }
                let nf = p - f;
                for j in c..cols {
                    let v = self.data[r * cols + j];
                    if v != 0 {
                        let k = i * cols + j;
                        self.data[k] = (self.data[k] + nf * v) % p;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u128;
    let mut b128 = (b % m) as u128;
    let m128 = m as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b128 % m128;
        }
        b128 = b128 * b128 % m128;
        e >>= 1;
    }
    b = r as u64;
    b
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(sp) {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The `count` largest primes below `bound`, descending.
pub fn primes_below(bound: u64, count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut n = bound - 1;
    while out.len() < count && n >= 2 {
        if is_prime(n) {
            out.push(n);
        }
        n -= 1;
    }
    out
}

/// Rank by Gaussian elimination over Z/p.
pub fn exact_rank(m: &FpMatrix) -> usize {
    let mut a = m.clone();
    a.echelon(false).len()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpRref {
    pub matrix: FpMatrix,
    pub pivots: Vec<usize>,
}

pub fn fp_gj_eliminate(m: &FpMatrix) -> FpRref {
    let mut a = m.clone();
    let pivots = a.echelon(true);
    FpRref { matrix: a, pivots }
}
