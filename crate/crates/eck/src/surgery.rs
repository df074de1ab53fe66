//! The large-negative-framing surgery formula for T(2,m).
//!
//! For framing `−n` with `n > 2g`, the hat ECK of the surgered knot splits
//! over residue classes `[j]`, `0 ≤ j < n`:
//!
//! * for `2g ≤ j < n` the class is `H(A_j)` in Alexander grading `j`;
//! * for `0 ≤ j < 2g` it is `H(A_j)` in grading `j` plus `H(B_{2g−j})` in
//!   grading `j + n`.
//!
//! `A_j` is the part of the zeroth column with Alexander grading at most `j`
//! and `B_i` is the part of the row `A = 2g` of the full complex with `e₊`
//! power below `i`, keeping only the row-internal (horizontal) arrows.
//!
//! Tower rows are realised inside the full complex of the knot.  The tower
//! generators of the surgered knot also carry powers of the elliptic orbit
//! `e₋` (weight 1, Lefschetz sign +1); padding by `e₋` is a bijection that
//! changes neither ranks nor parities, so the computations here drop it and
//! [`padded_a_complex`] exhibits the bijection explicitly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chaincx::{
    mapping_cone, spectral_sequence, ChainComplex, ChainError, ChainMap, Direction, FiltrationSpec,
    Generator, Grading, Page,
};
use crate::f2linalg::rank;
use crate::orbits::OrbitSet;
use crate::torusknot::{e_minus, e_plus, e_two, TorusKnot};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurgeryError {
    #[error("the surgery formula needs framing -n with n > 2g = {two_g} (got n = {n})")]
    FramingTooSmall { n: i64, two_g: i64 },
    #[error("residue class {j} is outside 0..{n}")]
    BadClass { j: i64, n: i64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// Surgery on T(2,m) with framing `−n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SurgerySpec {
    pub knot: TorusKnot,
    /// The absolute value of the (negative) framing.
    pub n: i64,
}

impl SurgerySpec {
    pub fn new(knot: TorusKnot, n: i64) -> Result<Self, SurgeryError> {
        let two_g = 2 * knot.genus();
        if n <= two_g {
            return Err(SurgeryError::FramingTooSmall { n, two_g });
        }
        Ok(SurgerySpec { knot, n })
    }
}

/// `A_j`: the column generators with Alexander grading at most `j`.
pub fn a_complex(knot: &TorusKnot, j: i64) -> ChainComplex {
    knot.zeroth_column()
        .subcomplex(|g| g.alexander <= j)
        .expect("the differential lowers the Alexander grading")
}

/// Row `k` of the full complex with only its horizontal arrows.
pub fn tower_row(knot: &TorusKnot, k: i64) -> ChainComplex {
    let imax = u32::try_from(k.max(0)).expect("small row index");
    knot.full_complex(imax)
        .retain_entries(|s, t| s.alexander == t.alexander)
        .subcomplex(|g| g.alexander == k)
        .expect("horizontal arrows stay in the row")
}

/// `B_i`: the row `A = 2g` restricted to `e₊` powers below `i`.
pub fn b_complex(knot: &TorusKnot, i: i64) -> ChainComplex {
    tower_row(knot, 2 * knot.genus())
        .subcomplex(|g| g.eplus < i)
        .expect("horizontal arrows lower the e+ power")
}

/// The padding bijection `Γ ↦ e₋^{j−A(Γ)} Γ` on the generators of `A_j`,
/// as `(original id, padded id)` pairs.
pub fn padding(knot: &TorusKnot, j: i64) -> Vec<(String, String)> {
    let alphabet = knot.alphabet();
    a_complex(knot, j)
        .generators()
        .iter()
        .map(|g| {
            let set = OrbitSet::parse(&g.id, &alphabet).expect("ids are orbit sets");
            (g.id.clone(), pad(&set, j).to_string())
        })
        .collect()
}

fn pad(set: &OrbitSet, j: i64) -> OrbitSet {
    let k = u32::try_from(j - set.alexander()).expect("A(Γ) ≤ j");
    OrbitSet::power(e_minus(), k)
        .and_then(|p| p.multiply(set))
        .expect("e- is elliptic")
}

/// `A_j` with every generator padded by `e₋` up to Alexander grading `j`.
pub fn padded_a_complex(knot: &TorusKnot, j: i64) -> ChainComplex {
    let alphabet = knot.alphabet();
    a_complex(knot, j)
        .map_generators(|g| {
            let set = OrbitSet::parse(&g.id, &alphabet).expect("ids are orbit sets");
            let padded = pad(&set, j);
            Generator::new(padded.to_string(), padded.alexander(), g.eplus, padded.z2())
        })
        .expect("padding is injective")
}

/// Name of the slope-`1/n` hyperbolic orbit used to mark the second tower.
pub fn twist_orbit_name(n: i64) -> String {
    format!("h_{{1/{n}}}")
}

/// One Alexander grading of a residue class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedPiece {
    pub grading: i64,
    pub rank: usize,
    /// Each representative is a sum of generators, listed by id.
    pub representatives: Vec<Vec<String>>,
    /// ℤ/2 grading of each representative.
    pub z2: Vec<u8>,
}

/// The hat groups of one residue class `[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassResult {
    pub class: i64,
    pub pieces: Vec<GradedPiece>,
}

impl ClassResult {
    pub fn rank_at(&self, grading: i64) -> usize {
        self.pieces
            .iter()
            .filter(|p| p.grading == grading)
            .map(|p| p.rank)
            .sum()
    }

    pub fn total_rank(&self) -> usize {
        self.pieces.iter().map(|p| p.rank).sum()
    }
}

/// Hat ECK of the surgered knot, per residue class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurgeryResult {
    pub m: i64,
    pub n: i64,
    pub classes: Vec<ClassResult>,
}

impl SurgeryResult {
    pub fn class(&self, j: i64) -> Result<&ClassResult, SurgeryError> {
        self.classes
            .iter()
            .find(|c| c.class == j)
            .ok_or(SurgeryError::BadClass { j, n: self.n })
    }

    /// A zero-differential complex on the representatives, graded by
    /// Alexander grading and ℤ/2.
    pub fn as_complex(&self) -> ChainComplex {
        let mut generators = Vec::new();
        for class in &self.classes {
            for piece in &class.pieces {
                for (rep, &z2) in piece.representatives.iter().zip(&piece.z2) {
                    let id = format!("[{}] {}", class.class, rep.join(" + "));
                    generators.push(
                        Generator::new(id, piece.grading, 0, z2).with_extra("class", class.class),
                    );
                }
            }
        }
        ChainComplex::new(generators, Vec::<(String, String)>::new())
            .expect("representative ids are distinct")
    }
}

fn piece_from(c: &ChainComplex, grading: i64, prefix: &str, flip: u8) -> GradedPiece {
    let h = c.total_homology().expect("tower complexes satisfy d² = 0");
    let z2 = h
        .representatives
        .iter()
        .map(|rep| {
            let parity = c.generator(&rep[0]).expect("representative ids exist").z2;
            debug_assert!(rep.iter().all(|id| c.generator(id).unwrap().z2 == parity));
            parity ^ flip
        })
        .collect();
    let representatives = h
        .representatives
        .into_iter()
        .map(|rep| rep.into_iter().map(|id| format!("{prefix}{id}")).collect())
        .collect();
    GradedPiece {
        grading,
        rank: h.rank,
        representatives,
        z2,
    }
}

/// Hat ECK of the surgered knot for every residue class.  Representatives
/// of the second tower carry the factor `h_{1/n}`, which flips ℤ/2.
pub fn surgery_eck_hat(spec: &SurgerySpec) -> SurgeryResult {
    let two_g = 2 * spec.knot.genus();
    let prefix = format!("{}·", twist_orbit_name(spec.n));
    let classes = (0..spec.n)
        .map(|j| {
            let mut pieces = vec![piece_from(&a_complex(&spec.knot, j), j, "", 0)];
            if j < two_g {
                let b = b_complex(&spec.knot, two_g - j);
                pieces.push(piece_from(&b, j + spec.n, &prefix, 1));
            }
            ClassResult { class: j, pieces }
        })
        .collect();
    SurgeryResult {
        m: spec.knot.n(),
        n: spec.n,
        classes,
    }
}

/// The complex whose filtration by twist level `F` gives the two-tower
/// first page in grading `j`: level 0 is `A_j`, level 1 (present when
/// `j ≥ n`) is `h_{1/n}` times row `j − n`.  Every generator has Alexander
/// grading `j`; the tower `e₊` power is kept in the extra grading
/// `eplus_tower` and the level in `F`.  The only arrow between levels is
/// `∅ → h_{1/n}·e₊^{j−n−2g}e₂^g`, present when `j − n ≥ 2g`.
pub fn two_tower_complex(knot: &TorusKnot, n: i64, j: i64) -> ChainComplex {
    let a = a_complex(knot, j);
    let mut generators: Vec<Generator> = a
        .generators()
        .iter()
        .map(|g| {
            Generator::new(g.id.clone(), j, 0, g.z2)
                .with_extra("eplus_tower", 0)
                .with_extra("F", 0)
        })
        .collect();
    let mut entries: Vec<(String, String)> = a.entry_ids();
    if j >= n {
        let prefix = format!("{}·", twist_orbit_name(n));
        let row = tower_row(knot, j - n);
        for g in row.generators() {
            generators.push(
                Generator::new(format!("{prefix}{}", g.id), j, 0, g.z2 ^ 1)
                    .with_extra("eplus_tower", g.eplus)
                    .with_extra("F", 1),
            );
        }
        entries.extend(
            row.entry_ids()
                .into_iter()
                .map(|(s, t)| (format!("{prefix}{s}"), format!("{prefix}{t}"))),
        );
        let two_g = 2 * knot.genus();
        if j - n >= two_g {
            let top = top_row_class(knot, j - n);
            entries.push(("1".to_string(), format!("{prefix}{top}")));
        }
    }
    ChainComplex::new(generators, entries).expect("tower ids are distinct")
}

/// The generator `e₊^{k−2g} e₂^g` spanning the homology of row `k ≥ 2g`.
pub fn top_row_class(knot: &TorusKnot, k: i64) -> String {
    let g = knot.genus();
    let i = u32::try_from(k - 2 * g).expect("k ≥ 2g");
    let gu = u32::try_from(g).expect("small genus");
    OrbitSet::power(e_plus(), i)
        .and_then(|p| p.multiply(&OrbitSet::power(e_two(), gu)?))
        .expect("elliptic powers")
        .to_string()
}

/// Dimensions and homology of the two-tower first page.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwoTowerE1 {
    /// `E⁰` dimension per twist level.
    pub e0: BTreeMap<i64, usize>,
    /// `E¹` rank per twist level.
    pub e1: BTreeMap<i64, usize>,
    /// Ranks on the page where the sequence has stabilised.
    pub e_infinity: BTreeMap<i64, usize>,
}

/// Runs the twist-level spectral sequence of [`two_tower_complex`].
pub fn two_tower_e1(knot: &TorusKnot, n: i64, j: i64) -> TwoTowerE1 {
    let c = two_tower_complex(knot, n, j);
    let f = FiltrationSpec::from_grading(&c, &Grading::Extra("F".into()), Direction::Descending)
        .expect("arrows never lower the twist level");
    let pages: Vec<Page> = spectral_sequence(&c, &f, 3, None).expect("valid complex");
    let e0 = pages[0].by_level();
    // Levels that die keep an explicit zero.
    let fill = |page: &Page| -> BTreeMap<i64, usize> {
        let ranks = page.by_level();
        e0.keys()
            .map(|&k| (k, ranks.get(&k).copied().unwrap_or(0)))
            .collect()
    };
    TwoTowerE1 {
        e1: fill(&pages[1]),
        e_infinity: fill(&pages[pages.len() - 1]),
        e0,
    }
}

fn check_cone_range(knot: &TorusKnot, n: i64, j: i64) -> Result<(), SurgeryError> {
    let two_g = 2 * knot.genus();
    if j <= two_g || n < 1 || n > j {
        return Err(SurgeryError::Precondition(format!(
            "need j > 2g = {two_g} and 1 <= n <= j (got n = {n}, j = {j})"
        )));
    }
    Ok(())
}

/// The quotient map `U^{n−1}`: row `j−1` → row `j−n`, sending `e₊^i Γ` to
/// `e₊^{i−n+1} Γ` (zero when `i < n−1`).
pub fn u_power_map(knot: &TorusKnot, n: i64, j: i64) -> Result<ChainMap, SurgeryError> {
    check_cone_range(knot, n, j)?;
    let source = tower_row(knot, j - 1);
    let target = tower_row(knot, j - n);
    let alphabet = knot.alphabet();
    let shift = u32::try_from(n - 1).expect("n ≥ 1");
    let divisor = OrbitSet::power(e_plus(), shift).expect("elliptic");
    let entries: Vec<(String, String)> = source
        .generators()
        .iter()
        .filter(|g| g.eplus >= n - 1)
        .map(|g| {
            let set = OrbitSet::parse(&g.id, &alphabet).expect("ids are orbit sets");
            let image = set.divide(&divisor).expect("enough e+ factors");
            (g.id.clone(), image.to_string())
        })
        .collect();
    Ok(ChainMap::new(source, target, entries)?)
}

/// The mapping cone of [`u_power_map`].
pub fn u_power_cone(knot: &TorusKnot, n: i64, j: i64) -> Result<ChainComplex, SurgeryError> {
    Ok(mapping_cone(&u_power_map(knot, n, j)?))
}

/// The kernel of [`u_power_map`]: row `j−1` with `e₊` power at most `n−2`.
pub fn u_power_kernel(knot: &TorusKnot, n: i64, j: i64) -> Result<ChainComplex, SurgeryError> {
    check_cone_range(knot, n, j)?;
    Ok(tower_row(knot, j - 1)
        .subcomplex(|g| g.eplus <= n - 2)
        .expect("horizontal arrows lower the e+ power"))
}

/// The composed map `d_{F,1}` on homology for grading `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DF1Summary {
    pub domain_rank: usize,
    pub codomain_rank: usize,
    pub map_rank: usize,
    /// Rank of the homology of the cone: `domain + codomain − 2·map`.
    pub cone_rank: usize,
}

/// `d_{F,1}` for framing `−n` in grading `j`, computed as `U^{n−1}_* ∘ d⁽¹⁾`:
/// `d⁽¹⁾` is the base-case isomorphism `H(A_j) → H(row j−1)`,
/// `[∅] ↦ [e₊^{j−1−2g} e₂^g]`, and `U^{n−1}` lands in row `j − n`.  On the
/// rows used here the interior differential vanishes, so the comparison map
/// `Φ` is the inclusion of the `e₊⁰` part and does not appear explicitly.
pub fn d_f1_chain(knot: &TorusKnot, n: i64, j: i64) -> Result<DF1Summary, SurgeryError> {
    check_cone_range(knot, n, j)?;
    let domain = a_complex(knot, j);
    let middle = tower_row(knot, j - 1);
    let base = ChainMap::new(
        domain,
        middle,
        [("1".to_string(), top_row_class(knot, j - 1))],
    )?;
    let u = u_power_map(knot, n, j)?;
    let composed = compose(&base, &u)?;
    let domain_rank = composed.source.homology_rank()?;
    let codomain_rank = composed.target.homology_rank()?;
    let map_rank = rank(&composed.induced_on_homology());
    Ok(DF1Summary {
        domain_rank,
        codomain_rank,
        map_rank,
        cone_rank: domain_rank + codomain_rank - 2 * map_rank,
    })
}

/// `g ∘ f`.
pub fn compose(f: &ChainMap, g: &ChainMap) -> Result<ChainMap, SurgeryError> {
    let mut entries = Vec::new();
    for (s, m) in f.entries() {
        for (m2, t) in g.entries() {
            if m == m2 {
                entries.push((
                    f.source.generators()[s].id.clone(),
                    g.target.generators()[t].id.clone(),
                ));
            }
        }
    }
    Ok(ChainMap::new(f.source.clone(), g.target.clone(), entries)?)
}

/// A model of the interior complex: generators by Alexander level with an
/// auxiliary map `d′` lowering the level by one.  It generates the tower
/// complexes `⊕ᵢ e₊^i ⊗ (Int(k−i) ⊕ h₋·Int(k−i−1))` with
/// `d(e₊^i Γ) = e₊^{i−1} h₋Γ + e₊^i h₋ d′Γ`, and the comparison map
/// `Φ(Γ) = Σᵢ e₊^i (d′)^i Γ` from `Int(k)` (zero differential).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InteriorModel {
    levels: Vec<Vec<String>>,
    dprime: BTreeMap<String, Vec<String>>,
}

impl InteriorModel {
    /// `levels[k]` lists the generators of level `k`; each `d′` entry must
    /// go from some level `k` to level `k − 1`.
    pub fn new(
        levels: Vec<Vec<String>>,
        dprime: Vec<(String, String)>,
    ) -> Result<Self, SurgeryError> {
        let mut level_of = BTreeMap::new();
        for (k, gens) in levels.iter().enumerate() {
            for g in gens {
                if level_of.insert(g.clone(), k).is_some() {
                    return Err(SurgeryError::Precondition(format!(
                        "duplicate generator {g}"
                    )));
                }
            }
        }
        let mut map: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (s, t) in dprime {
            match (level_of.get(&s), level_of.get(&t)) {
                (Some(&ks), Some(&kt)) if ks == kt + 1 => {
                    let ts = map.entry(s).or_default();
                    if let Some(pos) = ts.iter().position(|x| *x == t) {
                        ts.remove(pos);
                    } else {
                        ts.push(t);
                    }
                }
                _ => {
                    return Err(SurgeryError::Precondition(format!(
                        "d' entry {s} -> {t} must lower the level by one"
                    )))
                }
            }
        }
        for ts in map.values_mut() {
            ts.sort();
        }
        Ok(InteriorModel {
            levels,
            dprime: map,
        })
    }

    /// The torus-knot interior: products `e₂^a e_m^b` of weights 2 and `m`
    /// at level `2a + mb`, with `d′ = 0`, for levels `0..=max_level`.
    pub fn torus(m: i64, max_level: i64) -> Self {
        let mut levels = vec![Vec::new(); usize::try_from(max_level + 1).expect("nonnegative")];
        for b in 0..=max_level / m {
            for a in 0..=(max_level - m * b) / 2 {
                let k = usize::try_from(2 * a + m * b).expect("nonnegative");
                let name = match (a, b) {
                    (0, 0) => "1".to_string(),
                    _ => {
                        let mut parts = Vec::new();
                        if a > 0 {
                            parts.push(power_name("e2", a));
                        }
                        if b > 0 {
                            parts.push(power_name(&format!("e{m}"), b));
                        }
                        parts.join("·")
                    }
                };
                levels[k].push(name);
            }
        }
        InteriorModel {
            levels,
            dprime: BTreeMap::new(),
        }
    }

    pub fn level(&self, k: i64) -> &[String] {
        usize::try_from(k)
            .ok()
            .and_then(|k| self.levels.get(k))
            .map_or(&[], Vec::as_slice)
    }

    fn apply_dprime(&self, v: &[String]) -> Vec<String> {
        let mut acc: BTreeMap<&str, bool> = BTreeMap::new();
        for x in v {
            for t in self.dprime.get(x).into_iter().flatten() {
                let e = acc.entry(t.as_str()).or_insert(false);
                *e = !*e;
            }
        }
        acc.into_iter()
            .filter(|&(_, on)| on)
            .map(|(t, _)| t.to_string())
            .collect()
    }

    /// `Int(k)` with zero differential.
    pub fn interior(&self, k: i64) -> ChainComplex {
        let generators = self
            .level(k)
            .iter()
            .map(|g| Generator::new(g.clone(), k, 0, 0))
            .collect();
        ChainComplex::new(generators, Vec::<(String, String)>::new()).expect("distinct")
    }

    /// The tower complex in Alexander grading `k`.
    pub fn tower(&self, k: i64) -> ChainComplex {
        let mut generators = Vec::new();
        let mut entries = Vec::new();
        for i in 0..=k.max(0) {
            for x in self.level(k - i) {
                generators.push(Generator::new(tower_id(i, false, x), k, i, 0));
                if i >= 1 {
                    entries.push((tower_id(i, false, x), tower_id(i - 1, true, x)));
                }
                for y in self.apply_dprime(std::slice::from_ref(x)) {
                    entries.push((tower_id(i, false, x), tower_id(i, true, &y)));
                }
            }
            for x in self.level(k - i - 1) {
                generators.push(Generator::new(tower_id(i, true, x), k, i, 1));
            }
        }
        ChainComplex::new(generators, entries).expect("distinct tower ids")
    }

    /// `Φ: Int(k) → Tower(k)`.
    pub fn phi(&self, k: i64) -> Result<ChainMap, SurgeryError> {
        let mut entries = Vec::new();
        for x in self.level(k) {
            let mut current = vec![x.clone()];
            let mut i = 0;
            while !current.is_empty() {
                for y in &current {
                    entries.push((x.clone(), tower_id(i, false, y)));
                }
                current = self.apply_dprime(&current);
                i += 1;
            }
        }
        Ok(ChainMap::new(self.interior(k), self.tower(k), entries)?)
    }

    /// `U: Tower(k) → Tower(k−1)`, dividing by `e₊`.
    pub fn u_map(&self, k: i64) -> Result<ChainMap, SurgeryError> {
        let source = self.tower(k);
        let target = self.tower(k - 1);
        let mut entries = Vec::new();
        for i in 1..=k.max(0) {
            for x in self.level(k - i) {
                entries.push((tower_id(i, false, x), tower_id(i - 1, false, x)));
            }
            for x in self.level(k - i - 1) {
                entries.push((tower_id(i, true, x), tower_id(i - 1, true, x)));
            }
        }
        Ok(ChainMap::new(source, target, entries)?)
    }

    /// Applies `d′` to a single generator.
    pub fn dprime_of(&self, x: &str) -> Vec<String> {
        self.apply_dprime(&[x.to_string()])
    }
}

fn power_name(base: &str, k: i64) -> String {
    if k == 1 {
        base.to_string()
    } else {
        format!("{base}^{k}")
    }
}

fn tower_id(i: i64, with_h: bool, x: &str) -> String {
    let mut parts = Vec::new();
    if i > 0 {
        parts.push(power_name("e+", i));
    }
    if with_h {
        parts.push("h-".to_string());
    }
    if x != "1" || parts.is_empty() {
        parts.push(x.to_string());
    }
    parts.join("·")
}
