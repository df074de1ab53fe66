//! Independent oracles shared by the integration tests: dense F₂ elimination
//! on `Vec<u64>` bit rows, homology by rank counting, a brute-force
//! spectral-sequence page computation, and random filtered complexes.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeMap;

use eck::{ChainComplex, Generator};
use proptest::prelude::*;

/// Dense bit vector over F₂.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bits(pub Vec<u64>);

impl Bits {
    pub fn zeros(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }
    pub fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    pub fn flip(&mut self, i: usize) {
        self.0[i / 64] ^= 1 << (i % 64);
    }
    pub fn xor(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
    fn lowest(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }
}

/// Rank of a list of vectors by plain Gaussian elimination.
pub fn dense_rank(vectors: &[Bits]) -> usize {
    let mut basis: Vec<Bits> = Vec::new();
    for v in vectors {
        let mut v = v.clone();
        for b in &basis {
            let p = b.lowest().unwrap();
            if v.get(p) {
                v.xor(b);
            }
        }
        if let Some(p) = v.lowest() {
            for b in basis.iter_mut() {
                if b.get(p) {
                    b.xor(&v);
                }
            }
            basis.push(v);
        }
    }
    basis.len()
}

/// Columns `d(x_i)` of a complex as dense vectors.
pub fn columns(c: &ChainComplex) -> Vec<Bits> {
    let n = c.len();
    let mut cols = vec![Bits::zeros(n); n];
    for (s, t) in c.entries() {
        cols[s].flip(t);
    }
    cols
}

/// `d ∘ d = 0` checked densely.
pub fn d_squared_zero(c: &ChainComplex) -> bool {
    let cols = columns(c);
    cols.iter().all(|col| {
        let mut acc = Bits::zeros(c.len());
        for t in 0..c.len() {
            if col.get(t) {
                acc.xor(&cols[t]);
            }
        }
        acc.is_zero()
    })
}

/// Total homology rank `n − 2 rank(d)`, valid when `d² = 0`.
pub fn homology_rank(c: &ChainComplex) -> usize {
    assert!(d_squared_zero(c));
    c.len() - 2 * dense_rank(&columns(c))
}

/// Homology rank per value of `key`, which the differential must preserve.
pub fn homology_by<F: Fn(&Generator) -> i64>(c: &ChainComplex, key: F) -> BTreeMap<i64, usize> {
    let mut out = BTreeMap::new();
    let keys: Vec<i64> = c.generators().iter().map(&key).collect();
    for (s, t) in c.entries() {
        assert_eq!(keys[s], keys[t], "grading not preserved");
    }
    for &k in &keys {
        out.entry(k).or_insert(0);
    }
    for (k, rank) in out.iter_mut() {
        let piece = c.subcomplex(|g| key(g) == *k).unwrap();
        *rank = homology_rank(&piece);
    }
    out
}

/// Whether `v` is a cycle that is not a boundary.
pub fn is_nonzero_class(c: &ChainComplex, v: &Bits) -> bool {
    classes_independent(c, std::slice::from_ref(v))
}

/// Whether the cycles `vs` are linearly independent in homology.
pub fn classes_independent(c: &ChainComplex, vs: &[Bits]) -> bool {
    let cols = columns(c);
    for v in vs {
        let mut dv = Bits::zeros(c.len());
        for s in 0..c.len() {
            if v.get(s) {
                dv.xor(&cols[s]);
            }
        }
        if !dv.is_zero() {
            return false;
        }
    }
    let boundaries = dense_rank(&cols);
    let mut all = cols.clone();
    all.extend_from_slice(vs);
    dense_rank(&all) == boundaries + vs.len()
}

pub fn vector_of(c: &ChainComplex, ids: &[&str]) -> Bits {
    let mut v = Bits::zeros(c.len());
    for id in ids {
        v.flip(c.index_of(id).unwrap_or_else(|| panic!("unknown id {id}")));
    }
    v
}

/// Brute-force spectral-sequence dimensions for an ascending filtration
/// `level` (the differential never raises it):
/// `E_r^p = Z_r^p / (Z_{r−1}^{p−1} + B_{r−1}^p)` with
/// `Z_r^p = F_p ∩ d^{-1}(F_{p−r})` and `B_{r−1}^p = d(F_{p+r−1}) ∩ F_p`,
/// split by the parity of the generators.
pub fn ss_dimensions(c: &ChainComplex, level: &[i64], r: i64) -> BTreeMap<(i64, u8), usize> {
    let n = c.len();
    let parity: Vec<u8> = c.generators().iter().map(|g| g.z2).collect();
    let cols = columns(c);
    let mut levels: Vec<i64> = level.to_vec();
    levels.sort();
    levels.dedup();
    let mut out = BTreeMap::new();
    for &p in &levels {
        for sigma in 0..2u8 {
            let z = cycles(n, &cols, level, &parity, sigma, p, r);
            let z_prev = cycles(n, &cols, level, &parity, sigma, p - 1, r - 1);
            let b = boundaries(n, &cols, level, &parity, sigma, p, r - 1);
            let mut sum = z_prev;
            sum.extend(b);
            let dim = dense_rank(&z) - dense_rank(&sum);
            if dim > 0 {
                out.insert((p, sigma), dim);
            }
        }
    }
    out
}

/// A basis of `{x ∈ F_p, parity σ : dx ∈ F_{p−r}}`.
fn cycles(
    n: usize,
    cols: &[Bits],
    level: &[i64],
    parity: &[u8],
    sigma: u8,
    p: i64,
    r: i64,
) -> Vec<Bits> {
    let domain: Vec<usize> = (0..n)
        .filter(|&i| level[i] <= p && parity[i] == sigma)
        .collect();
    // Kernel of x ↦ (dx projected to levels > p − r), over the domain.
    let projected: Vec<Bits> = domain
        .iter()
        .map(|&i| {
            let mut v = Bits::zeros(n);
            for t in 0..n {
                if cols[i].get(t) && level[t] > p - r {
                    v.flip(t);
                }
            }
            v
        })
        .collect();
    kernel_combinations(n, &domain, &projected)
}

/// A spanning set of `d(F_q) ∩ F_p` (parity σ), `q = p + s`.
fn boundaries(
    n: usize,
    cols: &[Bits],
    level: &[i64],
    parity: &[u8],
    sigma: u8,
    p: i64,
    s: i64,
) -> Vec<Bits> {
    let domain: Vec<usize> = (0..n)
        .filter(|&i| level[i] <= p + s && parity[i] != sigma)
        .collect();
    // Combinations whose boundary vanishes above level p.
    let projected: Vec<Bits> = domain
        .iter()
        .map(|&i| {
            let mut v = Bits::zeros(n);
            for t in 0..n {
                if cols[i].get(t) && level[t] > p {
                    v.flip(t);
                }
            }
            v
        })
        .collect();
    kernel_combinations(n, &domain, &projected)
        .into_iter()
        .map(|x| {
            let mut dx = Bits::zeros(n);
            for i in 0..n {
                if x.get(i) {
                    dx.xor(&cols[i]);
                }
            }
            dx
        })
        .collect()
}

/// Basis of the combinations `Σ λ_k e_{domain[k]}` with `Σ λ_k images[k] = 0`,
/// returned as vectors in the full space.
fn kernel_combinations(n: usize, domain: &[usize], images: &[Bits]) -> Vec<Bits> {
    // Row-reduce pairs (image, combination).
    let mut rows: Vec<(Bits, Bits)> = domain
        .iter()
        .zip(images)
        .map(|(&i, img)| {
            let mut comb = Bits::zeros(n);
            comb.flip(i);
            (img.clone(), comb)
        })
        .collect();
    let mut kernel = Vec::new();
    let mut pivots: Vec<(usize, Bits, Bits)> = Vec::new();
    for (mut img, mut comb) in rows.drain(..) {
        for (p, pi, pc) in &pivots {
            if img.get(*p) {
                img.xor(pi);
                comb.xor(pc);
            }
        }
        match img.lowest() {
            None => kernel.push(comb),
            Some(p) => pivots.push((p, img, comb)),
        }
    }
    kernel
}

/// Parameters of a random filtered complex.
#[derive(Clone, Debug)]
pub struct RandomComplex {
    pub levels: Vec<i64>,
    pub parities: Vec<u8>,
    /// Canonical arrows `(source, target)` before the change of basis.
    pub pairs: Vec<(usize, usize)>,
    /// Strictly upper-triangular change-of-basis entries `(i, j)`, `i < j`.
    pub conjugation: Vec<(usize, usize)>,
}

/// Random filtered complex: a direct sum of arrows `a → b` (level of `b` at
/// most that of `a`, parities opposite) and isolated generators, conjugated
/// by a parity- and filtration-preserving unitriangular change of basis.
pub fn random_complex_strategy(max_gens: usize) -> impl Strategy<Value = RandomComplex> {
    (1..=max_gens)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec(0i64..4, n),
                proptest::collection::vec(any::<bool>(), n),
                proptest::collection::vec(any::<bool>(), n * n),
                proptest::collection::vec(0u8..3, n),
            )
        })
        .prop_map(|(mut levels, pair_bits, conj_bits, roles)| {
            let n = levels.len();
            levels.sort();
            // Pair generators greedily: role 0 = try to pair with the next
            // unpaired lower-level generator.
            let mut parities = vec![0u8; n];
            let mut used = vec![false; n];
            let mut pairs = Vec::new();
            for a in (0..n).rev() {
                if used[a] || roles[a] != 0 {
                    continue;
                }
                if let Some(b) = (0..a).rev().find(|&b| !used[b] && pair_bits[b]) {
                    used[a] = true;
                    used[b] = true;
                    parities[a] = u8::from(conj_bits[a * n + a]);
                    parities[b] = parities[a] ^ 1;
                    pairs.push((a, b));
                }
            }
            for i in 0..n {
                if !used[i] {
                    parities[i] = roles[i] % 2;
                }
            }
            let conjugation = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| conj_bits[i * n + j] && parities[i] == parities[j])
                .collect();
            RandomComplex {
                levels,
                parities,
                pairs,
                conjugation,
            }
        })
}

impl RandomComplex {
    /// Builds `P d P^{-1}` with `P = I + N`, `N` from `conjugation`;
    /// generators are sorted by level so `P` preserves the filtration.
    pub fn build(&self) -> ChainComplex {
        let n = self.levels.len();
        // d as dense columns in the canonical basis.
        let mut d = vec![Bits::zeros(n); n];
        for &(a, b) in &self.pairs {
            d[a].flip(b);
        }
        let mut p_cols = vec![Bits::zeros(n); n];
        for (j, col) in p_cols.iter_mut().enumerate() {
            col.flip(j);
        }
        for &(i, j) in &self.conjugation {
            p_cols[j].flip(i);
        }
        // P^{-1} by solving P x = e_j (upper unitriangular).
        let mut p_inv = vec![Bits::zeros(n); n];
        for j in 0..n {
            let mut x = Bits::zeros(n);
            for i in (0..n).rev() {
                // Row i of P x: x_i + Σ_{k>i} P[i][k] x_k = δ_ij.
                let mut v = u8::from(i == j);
                for k in i + 1..n {
                    if p_cols[k].get(i) && x.get(k) {
                        v ^= 1;
                    }
                }
                if v == 1 {
                    x.flip(i);
                }
            }
            p_inv[j] = x;
        }
        let apply = |m: &[Bits], v: &Bits| {
            let mut out = Bits::zeros(n);
            for k in 0..n {
                if v.get(k) {
                    out.xor(&m[k]);
                }
            }
            out
        };
        let mut entries = Vec::new();
        for j in 0..n {
            let col = apply(&p_cols, &apply(&d, &p_inv[j]));
            for t in 0..n {
                if col.get(t) {
                    entries.push((j, t));
                }
            }
        }
        let generators = (0..n)
            .map(|i| {
                Generator::new(format!("x{i}"), self.levels[i], 0, self.parities[i])
                    .with_extra("F", self.levels[i])
            })
            .collect();
        ChainComplex::from_indices(generators, entries).unwrap()
    }
}

/// Dense integer polynomial product (coefficients by ascending degree).
pub fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact polynomial division by a divisor with leading coefficient ±1;
/// panics on a nonzero remainder.
pub fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dl = den.len() - 1;
    let lead = den[dl];
    assert!(lead == 1 || lead == -1);
    let mut quot = vec![0; rem.len().saturating_sub(dl).max(1)];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dl] * lead;
        quot[k] = c;
        for (j, &d) in den.iter().enumerate() {
            rem[k + j] -= c * d;
        }
    }
    assert!(rem.iter().all(|&x| x == 0), "inexact division");
    quot
}

/// `t^k − 1` as a coefficient vector.
pub fn t_pow_minus_one(k: usize) -> Vec<i64> {
    let mut v = vec![0; k + 1];
    v[0] = -1;
    v[k] = 1;
    v
}

/// The Alexander polynomial of T(p,q) from its closed form
/// `(t^{pq} − 1)(t − 1) / ((t^p − 1)(t^q − 1))`.
pub fn torus_alexander(p: usize, q: usize) -> Vec<i64> {
    let num = poly_mul(&t_pow_minus_one(p * q), &t_pow_minus_one(1));
    let den = poly_mul(&t_pow_minus_one(p), &t_pow_minus_one(q));
    let mut out = poly_div_exact(&num, &den);
    while out.len() > 1 && *out.last().unwrap() == 0 {
        out.pop();
    }
    out
}
