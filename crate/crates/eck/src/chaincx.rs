//! Finite graded chain complexes over F₂.
//!
//! A [`ChainComplex`] is a list of [`Generator`]s together with a sparse
//! differential.  Every generator carries an Alexander grading, an
//! e₊-multiplicity grading, a ℤ/2 homological grading and any number of named
//! extra gradings.  The module provides validation, homology with
//! deterministic representatives, sub- and quotient complexes, associated
//! graded complexes, mapping cones, Gaussian cancellation and spectral
//! sequences of filtered complexes.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::f2linalg::{kernel_basis, BitMatrix, Echelon, F2Vector};

/// Errors raised by chain-complex operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("duplicate generator id `{0}`")]
    DuplicateId(String),
    #[error("unknown generator id `{0}`")]
    UnknownId(String),
    #[error("z2 grading of `{0}` must be 0 or 1")]
    BadZ2(String),
    #[error("kept set is not closed under the differential: {}", fmt_pairs(.0))]
    NotClosed(Vec<(String, String)>),
    #[error("grading `{grading}` is not preserved by the entry {source_id} -> {target_id}")]
    GradingNotPreserved {
        grading: String,
        source_id: String,
        target_id: String,
    },
    #[error("grading `{0}` is not homogeneous for the differential")]
    GradingNotHomogeneous(String),
    #[error("unknown grading `{0}`")]
    UnknownGrading(String),
    #[error("map is not a chain map; d f != f d on {0:?}")]
    NotChainMap(Vec<String>),
    #[error("cannot cancel {a} -> {b}: the coefficient <d({a}), {b}> is zero")]
    NotCancellable { a: String, b: String },
    #[error("filtration `{name}` is violated by the entry {source_id} -> {target_id}")]
    FiltrationViolated {
        name: String,
        source_id: String,
        target_id: String,
    },
    #[error("invalid complex: {0}")]
    Invalid(String),
    #[error("json: {0}")]
    Json(String),
}

fn fmt_pairs(pairs: &[(String, String)]) -> String {
    pairs
        .iter()
        .map(|(a, b)| format!("{a} -> {b}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// One basis element of a complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub id: String,
    pub alexander: i64,
    pub eplus: i64,
    pub z2: u8,
    #[serde(default)]
    pub extra: BTreeMap<String, i64>,
}

impl Generator {
    pub fn new(id: impl Into<String>, alexander: i64, eplus: i64, z2: u8) -> Self {
        Generator {
            id: id.into(),
            alexander,
            eplus,
            z2,
            extra: BTreeMap::new(),
        }
    }

    pub fn with_extra(mut self, name: impl Into<String>, value: i64) -> Self {
        self.extra.insert(name.into(), value);
        self
    }
}

/// A named grading on generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Grading {
    Alexander,
    Eplus,
    Z2,
    Extra(String),
}

impl Grading {
    /// The value on a generator; `None` when an extra grading is absent.
    pub fn value(&self, g: &Generator) -> Option<i64> {
        match self {
            Grading::Alexander => Some(g.alexander),
            Grading::Eplus => Some(g.eplus),
            Grading::Z2 => Some(i64::from(g.z2)),
            Grading::Extra(name) => g.extra.get(name).copied(),
        }
    }
}

impl FromStr for Grading {
    type Err = ChainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "alexander" => Grading::Alexander,
            "eplus" => Grading::Eplus,
            "z2" => Grading::Z2,
            "" => return Err(ChainError::UnknownGrading(String::new())),
            other => Grading::Extra(other.to_string()),
        })
    }
}

impl fmt::Display for Grading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grading::Alexander => f.write_str("alexander"),
            Grading::Eplus => f.write_str("eplus"),
            Grading::Z2 => f.write_str("z2"),
            Grading::Extra(name) => f.write_str(name),
        }
    }
}

/// Which way the differential may move a filtration level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// The differential never raises the level: `F_p = {level ≤ p}` are subcomplexes.
    Ascending,
    /// The differential never lowers the level: `F_p = {level ≥ p}` are subcomplexes.
    Descending,
}

impl Direction {
    /// Whether an entry from level `source` to level `target` is allowed.
    pub fn allows(self, source: i64, target: i64) -> bool {
        match self {
            Direction::Ascending => target <= source,
            Direction::Descending => target >= source,
        }
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ascending" | "asc" => Ok(Direction::Ascending),
            "descending" | "desc" => Ok(Direction::Descending),
            other => Err(format!("unknown direction `{other}`")),
        }
    }
}

/// An integer filtration on the generators of a complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationSpec {
    pub name: String,
    pub value: BTreeMap<String, i64>,
    pub direction: Direction,
}

impl FiltrationSpec {
    /// Reads a filtration off one of the gradings of `c` and checks that the
    /// differential respects it.
    pub fn from_grading(
        c: &ChainComplex,
        grading: &Grading,
        direction: Direction,
    ) -> Result<Self, ChainError> {
        let mut value = BTreeMap::new();
        for g in &c.generators {
            let v = grading
                .value(g)
                .ok_or_else(|| ChainError::UnknownGrading(grading.to_string()))?;
            value.insert(g.id.clone(), v);
        }
        let spec = FiltrationSpec {
            name: grading.to_string(),
            value,
            direction,
        };
        spec.check(c)?;
        Ok(spec)
    }

    /// A filtration with the same level everywhere.
    pub fn constant(c: &ChainComplex, name: &str) -> Self {
        FiltrationSpec {
            name: name.to_string(),
            value: c.generators.iter().map(|g| (g.id.clone(), 0)).collect(),
            direction: Direction::Ascending,
        }
    }

    pub fn level(&self, id: &str) -> Option<i64> {
        self.value.get(id).copied()
    }

    /// Checks that every generator has a level and that no entry moves
    /// strictly against the direction.
    pub fn check(&self, c: &ChainComplex) -> Result<(), ChainError> {
        for g in &c.generators {
            if !self.value.contains_key(&g.id) {
                return Err(ChainError::UnknownId(g.id.clone()));
            }
        }
        for (s, t) in c.entries() {
            let (sid, tid) = (&c.generators[s].id, &c.generators[t].id);
            if !self.direction.allows(self.value[sid], self.value[tid]) {
                return Err(ChainError::FiltrationViolated {
                    name: self.name.clone(),
                    source_id: sid.clone(),
                    target_id: tid.clone(),
                });
            }
        }
        Ok(())
    }
}

/// Everything wrong with a complex; empty iff the complex is valid.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    /// Pairs `(x, z)` with `⟨d d x, z⟩ ≠ 0`.
    pub d_squared: Vec<(String, String)>,
    /// Entries joining generators of equal ℤ/2 grading.
    pub parity: Vec<(String, String)>,
    /// Entries raising the Alexander or e₊ grading, tagged with the grading.
    pub filtration: Vec<(String, String, String)>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.d_squared.is_empty() && self.parity.is_empty() && self.filtration.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("valid");
        }
        for (a, b) in &self.d_squared {
            writeln!(f, "d^2 != 0 at {a} -> {b}")?;
        }
        for (a, b) in &self.parity {
            writeln!(f, "parity violation at {a} -> {b}")?;
        }
        for (a, b, g) in &self.filtration {
            writeln!(f, "{g} filtration violated at {a} -> {b}")?;
        }
        Ok(())
    }
}

/// Homology in one grading: its rank and cycles whose classes form a basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyGroup {
    pub rank: usize,
    pub representatives: Vec<Vec<String>>,
}

/// A chosen basis of homology, able to express cycles in that basis.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    representatives: Vec<F2Vector>,
    echelon: Echelon,
}

impl HomologyBasis {
    pub fn rank(&self) -> usize {
        self.representatives.len()
    }

    pub fn representatives(&self) -> &[F2Vector] {
        &self.representatives
    }

    /// Coordinates of the class of `cycle` in the representative basis, or
    /// `None` if `cycle` is not a cycle.
    pub fn coordinates(&self, cycle: &F2Vector) -> Option<F2Vector> {
        let (rem, tag) = self.echelon.reduce(cycle);
        rem.is_zero().then_some(tag)
    }
}

/// A finite chain complex over F₂.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    generators: Vec<Generator>,
    index: HashMap<String, usize>,
    /// Sorted target indices for each source index.
    d: Vec<Vec<usize>>,
}

impl PartialEq for ChainComplex {
    fn eq(&self, other: &Self) -> bool {
        self.generators == other.generators && self.d == other.d
    }
}

impl Eq for ChainComplex {}

impl ChainComplex {
    /// Builds a complex from generators and `(source, target)` entries given
    /// by id.  An entry listed twice cancels.
    pub fn new<I, S, T>(generators: Vec<Generator>, entries: I) -> Result<Self, ChainError>
    where
        I: IntoIterator<Item = (S, T)>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        let index = build_index(&generators)?;
        let mut pairs = Vec::new();
        for (s, t) in entries {
            let si = *index
                .get(s.as_ref())
                .ok_or_else(|| ChainError::UnknownId(s.as_ref().to_string()))?;
            let ti = *index
                .get(t.as_ref())
                .ok_or_else(|| ChainError::UnknownId(t.as_ref().to_string()))?;
            pairs.push((si, ti));
        }
        Ok(Self::assemble(generators, index, pairs))
    }

    /// Builds a complex from generators and `(source, target)` entries given
    /// by position.
    pub fn from_indices<I>(generators: Vec<Generator>, entries: I) -> Result<Self, ChainError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let index = build_index(&generators)?;
        let n = generators.len();
        let pairs: Vec<_> = entries.into_iter().collect();
        if let Some(&(s, t)) = pairs.iter().find(|(s, t)| *s >= n || *t >= n) {
            return Err(ChainError::UnknownId(format!("#{}", s.max(t))));
        }
        Ok(Self::assemble(generators, index, pairs))
    }

    fn assemble(
        generators: Vec<Generator>,
        index: HashMap<String, usize>,
        pairs: Vec<(usize, usize)>,
    ) -> Self {
        let mut sets = vec![BTreeSet::new(); generators.len()];
        for (s, t) in pairs {
            if !sets[s].remove(&t) {
                sets[s].insert(t);
            }
        }
        ChainComplex {
            generators,
            index,
            d: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        }
    }

    pub fn empty() -> Self {
        ChainComplex {
            generators: Vec::new(),
            index: HashMap::new(),
            d: Vec::new(),
        }
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn generator(&self, id: &str) -> Option<&Generator> {
        self.index_of(id).map(|i| &self.generators[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    /// The targets of `d(id)` in generator order.
    pub fn differential_of(&self, id: &str) -> Result<Vec<&str>, ChainError> {
        let i = self
            .index_of(id)
            .ok_or_else(|| ChainError::UnknownId(id.to_string()))?;
        Ok(self.d[i]
            .iter()
            .map(|&t| self.generators[t].id.as_str())
            .collect())
    }

    /// Whether `⟨d(source), target⟩ = 1`.
    pub fn has_entry(&self, source: &str, target: &str) -> bool {
        match (self.index_of(source), self.index_of(target)) {
            (Some(s), Some(t)) => self.d[s].binary_search(&t).is_ok(),
            _ => false,
        }
    }

    /// All `(source, target)` index pairs in source-major order.
    pub fn entries(&self) -> Vec<(usize, usize)> {
        self.d
            .iter()
            .enumerate()
            .flat_map(|(s, ts)| ts.iter().map(move |&t| (s, t)))
            .collect()
    }

    /// All `(source, target)` id pairs in source-major order.
    pub fn entry_ids(&self) -> Vec<(String, String)> {
        self.entries()
            .into_iter()
            .map(|(s, t)| (self.generators[s].id.clone(), self.generators[t].id.clone()))
            .collect()
    }

    pub fn entry_count(&self) -> usize {
        self.d.iter().map(Vec::len).sum()
    }

    /// The differential as a square matrix, rows = targets, cols = sources.
    pub fn matrix(&self) -> BitMatrix {
        let n = self.len();
        BitMatrix::from_entries(n, n, self.entries().into_iter().map(|(s, t)| (t, s)))
            .expect("entries are in range")
    }

    /// Applies the differential to a chain given as a vector.
    pub fn apply(&self, v: &F2Vector) -> F2Vector {
        let mut out = F2Vector::zeros(self.len());
        for s in v.ones() {
            for &t in &self.d[s] {
                out.flip(t);
            }
        }
        out
    }

    /// A chain (list of ids) as a vector.
    pub fn vector_of<S: AsRef<str>>(&self, ids: &[S]) -> Result<F2Vector, ChainError> {
        let mut v = F2Vector::zeros(self.len());
        for id in ids {
            let i = self
                .index_of(id.as_ref())
                .ok_or_else(|| ChainError::UnknownId(id.as_ref().to_string()))?;
            v.flip(i);
        }
        Ok(v)
    }

    /// A vector as a list of ids in generator order.
    pub fn ids_of(&self, v: &F2Vector) -> Vec<String> {
        v.ones()
            .into_iter()
            .map(|i| self.generators[i].id.clone())
            .collect()
    }

    /// Lists every violated invariant.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for x in 0..self.len() {
            let dd = self.apply(&self.apply(&F2Vector::unit(self.len(), x)));
            for z in dd.ones() {
                report
                    .d_squared
                    .push((self.generators[x].id.clone(), self.generators[z].id.clone()));
            }
        }
        for (s, t) in self.entries() {
            let (gs, gt) = (&self.generators[s], &self.generators[t]);
            if gs.z2 == gt.z2 {
                report.parity.push((gs.id.clone(), gt.id.clone()));
            }
            if gt.alexander > gs.alexander {
                report
                    .filtration
                    .push((gs.id.clone(), gt.id.clone(), "alexander".into()));
            }
            if gt.eplus > gs.eplus {
                report
                    .filtration
                    .push((gs.id.clone(), gt.id.clone(), "eplus".into()));
            }
        }
        report
    }

    fn require_d_squared_zero(&self) -> Result<(), ChainError> {
        let report = self.validate();
        if report.d_squared.is_empty() {
            Ok(())
        } else {
            Err(ChainError::Invalid(format!(
                "d^2 != 0 at {}",
                fmt_pairs(&report.d_squared)
            )))
        }
    }

    /// Whether every entry keeps the value of `grading` fixed.
    pub fn preserves(&self, grading: &Grading) -> Result<(), ChainError> {
        for (s, t) in self.entries() {
            let (gs, gt) = (&self.generators[s], &self.generators[t]);
            let vs = grading
                .value(gs)
                .ok_or_else(|| ChainError::UnknownGrading(grading.to_string()))?;
            let vt = grading
                .value(gt)
                .ok_or_else(|| ChainError::UnknownGrading(grading.to_string()))?;
            if vs != vt {
                return Err(ChainError::GradingNotPreserved {
                    grading: grading.to_string(),
                    source_id: gs.id.clone(),
                    target_id: gt.id.clone(),
                });
            }
        }
        Ok(())
    }

    /// A homology basis with deterministic representatives: kernel vectors of
    /// the differential, taken in order, that are independent modulo
    /// boundaries and earlier representatives.
    pub fn homology_basis(&self) -> HomologyBasis {
        let d = self.matrix();
        let boundaries = d.columns();
        let mut probe = Echelon::new(self.len(), 0);
        for b in &boundaries {
            probe.insert(b);
        }
        let representatives: Vec<F2Vector> = kernel_basis(&d)
            .into_iter()
            .filter(|z| probe.insert(z))
            .collect();
        let mut echelon = Echelon::new(self.len(), representatives.len());
        for b in &boundaries {
            echelon.insert(b);
        }
        for (k, z) in representatives.iter().enumerate() {
            echelon.insert_tagged(z, &F2Vector::unit(representatives.len(), k));
        }
        HomologyBasis {
            representatives,
            echelon,
        }
    }

    /// Total homology.
    pub fn total_homology(&self) -> Result<HomologyGroup, ChainError> {
        self.require_d_squared_zero()?;
        let basis = self.homology_basis();
        Ok(HomologyGroup {
            rank: basis.rank(),
            representatives: basis
                .representatives
                .iter()
                .map(|v| self.ids_of(v))
                .collect(),
        })
    }

    /// Homology split by the values of a grading the differential preserves;
    /// without a grading the whole homology is reported under the key 0.
    pub fn homology(
        &self,
        group_by: Option<&Grading>,
    ) -> Result<BTreeMap<i64, HomologyGroup>, ChainError> {
        let Some(grading) = group_by else {
            return Ok(BTreeMap::from([(0, self.total_homology()?)]));
        };
        self.require_d_squared_zero()?;
        self.preserves(grading)?;
        let mut values = BTreeSet::new();
        for g in &self.generators {
            values.insert(
                grading
                    .value(g)
                    .ok_or_else(|| ChainError::UnknownGrading(grading.to_string()))?,
            );
        }
        let mut out = BTreeMap::new();
        for v in values {
            let piece = self.subcomplex(|g| grading.value(g) == Some(v))?;
            out.insert(v, piece.total_homology()?);
        }
        Ok(out)
    }

    /// Total homology rank.
    pub fn homology_rank(&self) -> Result<usize, ChainError> {
        Ok(self.total_homology()?.rank)
    }

    /// Restriction to the generators satisfying `keep`, which must be closed
    /// under the differential.
    pub fn subcomplex<F>(&self, keep: F) -> Result<ChainComplex, ChainError>
    where
        F: Fn(&Generator) -> bool,
    {
        let kept: Vec<bool> = self.generators.iter().map(&keep).collect();
        let mut offending = Vec::new();
        for (s, t) in self.entries() {
            if kept[s] && !kept[t] {
                offending.push((self.generators[s].id.clone(), self.generators[t].id.clone()));
            }
        }
        if !offending.is_empty() {
            return Err(ChainError::NotClosed(offending));
        }
        Ok(self.restrict_to(&kept))
    }

    /// Quotient by the generators *not* satisfying `keep`; those must span a
    /// subcomplex.
    pub fn quotient<F>(&self, keep: F) -> Result<ChainComplex, ChainError>
    where
        F: Fn(&Generator) -> bool,
    {
        let kept: Vec<bool> = self.generators.iter().map(&keep).collect();
        let mut offending = Vec::new();
        for (s, t) in self.entries() {
            if !kept[s] && kept[t] {
                offending.push((self.generators[s].id.clone(), self.generators[t].id.clone()));
            }
        }
        if !offending.is_empty() {
            return Err(ChainError::NotClosed(offending));
        }
        Ok(self.restrict_to(&kept))
    }

    /// Keeps the flagged generators and the entries between them.
    fn restrict_to(&self, kept: &[bool]) -> ChainComplex {
        let mut new_index = vec![usize::MAX; self.len()];
        let mut generators = Vec::new();
        for (i, g) in self.generators.iter().enumerate() {
            if kept[i] {
                new_index[i] = generators.len();
                generators.push(g.clone());
            }
        }
        let pairs: Vec<_> = self
            .entries()
            .into_iter()
            .filter(|&(s, t)| kept[s] && kept[t])
            .map(|(s, t)| (new_index[s], new_index[t]))
            .collect();
        let index = build_index(&generators).expect("ids stay unique");
        Self::assemble(generators, index, pairs)
    }

    /// Drops the entries for which `keep(source, target)` is false.  The
    /// result need not satisfy d² = 0; callers validate.
    pub fn retain_entries<F>(&self, keep: F) -> ChainComplex
    where
        F: Fn(&Generator, &Generator) -> bool,
    {
        let pairs: Vec<_> = self
            .entries()
            .into_iter()
            .filter(|&(s, t)| keep(&self.generators[s], &self.generators[t]))
            .collect();
        Self::assemble(self.generators.clone(), self.index.clone(), pairs)
    }

    /// Replaces every generator by `f(generator)`; ids must stay unique.
    pub fn map_generators<F>(&self, f: F) -> Result<ChainComplex, ChainError>
    where
        F: Fn(&Generator) -> Generator,
    {
        let generators: Vec<_> = self.generators.iter().map(f).collect();
        let index = build_index(&generators)?;
        Ok(Self::assemble(generators, index, self.entries()))
    }

    /// Same generators; entries that strictly change the filtration level
    /// are dropped.
    pub fn associated_graded(&self, f: &FiltrationSpec) -> ChainComplex {
        self.retain_entries(|s, t| f.level(&s.id) == f.level(&t.id))
    }

    /// Cancels the pair `a → b`, returning the reduced complex on the
    /// remaining generators with `d'(x) = d(x) + ⟨d(x), b⟩ d(a)`.
    pub fn gaussian_cancel(&self, a: &str, b: &str) -> Result<ChainComplex, ChainError> {
        let ai = self
            .index_of(a)
            .ok_or_else(|| ChainError::UnknownId(a.to_string()))?;
        let bi = self
            .index_of(b)
            .ok_or_else(|| ChainError::UnknownId(b.to_string()))?;
        if self.d[ai].binary_search(&bi).is_err() {
            return Err(ChainError::NotCancellable {
                a: a.to_string(),
                b: b.to_string(),
            });
        }
        let da: BTreeSet<usize> = self.d[ai].iter().copied().collect();
        let mut rows: Vec<BTreeSet<usize>> = Vec::with_capacity(self.len());
        for (x, targets) in self.d.iter().enumerate() {
            let mut set: BTreeSet<usize> = targets.iter().copied().collect();
            if x != ai && set.contains(&bi) {
                set = set.symmetric_difference(&da).copied().collect();
            }
            rows.push(set);
        }
        let kept: Vec<bool> = (0..self.len()).map(|i| i != ai && i != bi).collect();
        let mut new_index = vec![usize::MAX; self.len()];
        let mut generators = Vec::new();
        for (i, g) in self.generators.iter().enumerate() {
            if kept[i] {
                new_index[i] = generators.len();
                generators.push(g.clone());
            }
        }
        let mut pairs = Vec::new();
        for (x, set) in rows.iter().enumerate() {
            if !kept[x] {
                continue;
            }
            for &t in set {
                if kept[t] {
                    pairs.push((new_index[x], new_index[t]));
                }
            }
        }
        let index = build_index(&generators)?;
        Ok(Self::assemble(generators, index, pairs))
    }

    /// Structural equality up to the order in which generators are listed.
    pub fn same_up_to_order(&self, other: &ChainComplex) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let mine: BTreeMap<&str, &Generator> =
            self.generators.iter().map(|g| (g.id.as_str(), g)).collect();
        for g in &other.generators {
            if mine.get(g.id.as_str()) != Some(&g) {
                return false;
            }
        }
        let a: BTreeSet<_> = self.entry_ids().into_iter().collect();
        let b: BTreeSet<_> = other.entry_ids().into_iter().collect();
        a == b
    }

    /// JSON interchange form.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("complex serializes")
    }

    pub fn from_json(text: &str) -> Result<ChainComplex, ChainError> {
        let raw: RawComplex =
            serde_json::from_str(text).map_err(|e| ChainError::Json(e.to_string()))?;
        Self::from_raw(raw)
    }

    fn to_raw(&self) -> RawComplex {
        let mut differential = BTreeMap::new();
        for (s, ts) in self.d.iter().enumerate() {
            if !ts.is_empty() {
                differential.insert(
                    self.generators[s].id.clone(),
                    ts.iter().map(|&t| self.generators[t].id.clone()).collect(),
                );
            }
        }
        RawComplex {
            generators: self.generators.clone(),
            differential,
        }
    }

    fn from_raw(raw: RawComplex) -> Result<ChainComplex, ChainError> {
        for g in &raw.generators {
            if g.z2 > 1 {
                return Err(ChainError::BadZ2(g.id.clone()));
            }
        }
        let entries: Vec<(String, String)> = raw
            .differential
            .into_iter()
            .flat_map(|(s, ts)| ts.into_iter().map(move |t| (s.clone(), t)))
            .collect();
        ChainComplex::new(raw.generators, entries)
    }
}

impl Serialize for ChainComplex {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_raw().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ChainComplex {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawComplex::deserialize(deserializer)?;
        ChainComplex::from_raw(raw).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct RawComplex {
    generators: Vec<Generator>,
    #[serde(default)]
    differential: BTreeMap<String, Vec<String>>,
}

fn build_index(generators: &[Generator]) -> Result<HashMap<String, usize>, ChainError> {
    let mut index = HashMap::with_capacity(generators.len());
    for (i, g) in generators.iter().enumerate() {
        if index.insert(g.id.clone(), i).is_some() {
            return Err(ChainError::DuplicateId(g.id.clone()));
        }
    }
    Ok(index)
}

/// A chain map between two complexes.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub source: ChainComplex,
    pub target: ChainComplex,
    /// Sorted target indices for each source index.
    action: Vec<Vec<usize>>,
}

impl ChainMap {
    /// Builds the map from `(source id, target id)` entries and checks that
    /// it commutes with the differentials.
    pub fn new<I, S, T>(
        source: ChainComplex,
        target: ChainComplex,
        entries: I,
    ) -> Result<Self, ChainError>
    where
        I: IntoIterator<Item = (S, T)>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        let mut sets = vec![BTreeSet::new(); source.len()];
        for (s, t) in entries {
            let si = source
                .index_of(s.as_ref())
                .ok_or_else(|| ChainError::UnknownId(s.as_ref().to_string()))?;
            let ti = target
                .index_of(t.as_ref())
                .ok_or_else(|| ChainError::UnknownId(t.as_ref().to_string()))?;
            if !sets[si].remove(&ti) {
                sets[si].insert(ti);
            }
        }
        let map = ChainMap {
            source,
            target,
            action: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        };
        let bad = map.failures();
        if bad.is_empty() {
            Ok(map)
        } else {
            Err(ChainError::NotChainMap(bad))
        }
    }

    /// The zero map.
    pub fn zero(source: ChainComplex, target: ChainComplex) -> Self {
        let action = vec![Vec::new(); source.len()];
        ChainMap {
            source,
            target,
            action,
        }
    }

    /// The identity map of a complex.
    pub fn identity(c: ChainComplex) -> Self {
        let action = (0..c.len()).map(|i| vec![i]).collect();
        ChainMap {
            source: c.clone(),
            target: c,
            action,
        }
    }

    fn failures(&self) -> Vec<String> {
        (0..self.source.len())
            .filter(|&x| {
                let e = F2Vector::unit(self.source.len(), x);
                self.target.apply(&self.apply(&e)) != self.apply(&self.source.apply(&e))
            })
            .map(|x| self.source.generators[x].id.clone())
            .collect()
    }

    pub fn apply(&self, v: &F2Vector) -> F2Vector {
        let mut out = F2Vector::zeros(self.target.len());
        for s in v.ones() {
            for &t in &self.action[s] {
                out.flip(t);
            }
        }
        out
    }

    /// `(source index, target index)` pairs.
    pub fn entries(&self) -> Vec<(usize, usize)> {
        self.action
            .iter()
            .enumerate()
            .flat_map(|(s, ts)| ts.iter().map(move |&t| (s, t)))
            .collect()
    }

    /// The induced map on homology in the deterministic representative
    /// bases: rows index target classes, columns source classes.
    pub fn induced_on_homology(&self) -> BitMatrix {
        let hs = self.source.homology_basis();
        let ht = self.target.homology_basis();
        let columns: Vec<F2Vector> = hs
            .representatives()
            .iter()
            .map(|z| {
                ht.coordinates(&self.apply(z))
                    .expect("chain maps send cycles to cycles")
            })
            .collect();
        BitMatrix::from_columns(ht.rank(), &columns)
    }

    /// Rank of the induced map on homology.
    pub fn homology_rank(&self) -> usize {
        crate::f2linalg::rank(&self.induced_on_homology())
    }
}

/// Prefix for source-copy ids in a mapping cone.
pub const CONE_SOURCE_PREFIX: &str = "src:";
/// Prefix for target-copy ids in a mapping cone.
pub const CONE_TARGET_PREFIX: &str = "tgt:";

/// The mapping cone of `f`: generators are the source (ℤ/2 grading flipped)
/// and the target; the differential is `d_source ⊕ d_target` plus the
/// entries of `f` from the source copy to the target copy.
pub fn mapping_cone(f: &ChainMap) -> ChainComplex {
    let ns = f.source.len();
    let mut generators = Vec::with_capacity(ns + f.target.len());
    for g in f.source.generators() {
        let mut g = g.clone();
        g.id = format!("{CONE_SOURCE_PREFIX}{}", g.id);
        g.z2 ^= 1;
        generators.push(g);
    }
    for g in f.target.generators() {
        let mut g = g.clone();
        g.id = format!("{CONE_TARGET_PREFIX}{}", g.id);
        generators.push(g);
    }
    let mut pairs = f.source.entries();
    pairs.extend(
        f.target
            .entries()
            .into_iter()
            .map(|(s, t)| (s + ns, t + ns)),
    );
    pairs.extend(f.entries().into_iter().map(|(s, t)| (s, t + ns)));
    ChainComplex::from_indices(generators, pairs).expect("prefixed ids are unique")
}

/// One page of a spectral sequence: ranks indexed by
/// `(filtration level, auxiliary grading)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Page {
    pub r: usize,
    pub ranks: BTreeMap<(i64, i64), usize>,
}

impl Page {
    pub fn total(&self) -> usize {
        self.ranks.values().sum()
    }

    /// Ranks summed over the auxiliary grading.
    pub fn by_level(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for (&(p, _), &r) in &self.ranks {
            *out.entry(p).or_insert(0) += r;
        }
        out
    }
}

/// Pages `E^0 … E^{r_max}` of the spectral sequence of the filtration `f`.
///
/// The algorithm eliminates arrows in order of filtration length: after all
/// arrows of length `< r` have been cancelled, the surviving generators form
/// a basis of `E^r` and the remaining length-`r` arrows are `d_r`.
/// Cancelling a length-`r` arrow only creates arrows of length `≥ r`, and its
/// effect on the length-`r` part is one step of Gaussian elimination of
/// `d_r`, so the survivors after clearing length `r` are a basis of
/// `E^{r+1}`.  The auxiliary grading (default ℤ/2) must shift uniformly
/// along the differential.
pub fn spectral_sequence(
    c: &ChainComplex,
    f: &FiltrationSpec,
    r_max: usize,
    aux: Option<&Grading>,
) -> Result<Vec<Page>, ChainError> {
    c.require_d_squared_zero()?;
    f.check(c)?;
    let aux = aux.cloned().unwrap_or(Grading::Z2);
    let aux_of: Vec<i64> = c
        .generators()
        .iter()
        .map(|g| {
            aux.value(g)
                .ok_or_else(|| ChainError::UnknownGrading(aux.to_string()))
        })
        .collect::<Result<_, _>>()?;
    check_homogeneous(c, &aux, &aux_of)?;
    let level: Vec<i64> = c.generators().iter().map(|g| f.value[&g.id]).collect();
    // Normalised so that every arrow has nonnegative length.
    let length = |s: usize, t: usize| match f.direction {
        Direction::Ascending => level[s] - level[t],
        Direction::Descending => level[t] - level[s],
    };

    let n = c.len();
    let mut alive = vec![true; n];
    let mut fwd: Vec<BTreeSet<usize>> = (0..n).map(|s| c.d[s].iter().copied().collect()).collect();
    let mut bwd: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (s, t) in c.entries() {
        bwd[t].insert(s);
    }
    let page = |r: usize, alive: &[bool]| Page {
        r,
        ranks: {
            let mut m = BTreeMap::new();
            for i in (0..n).filter(|&i| alive[i]) {
                *m.entry((level[i], aux_of[i])).or_insert(0) += 1;
            }
            m
        },
    };
    let mut pages = vec![page(0, &alive)];
    for r in 0..r_max {
        let r_len = r as i64;
        loop {
            let next = (0..n).filter(|&a| alive[a]).find_map(|a| {
                fwd[a]
                    .iter()
                    .find(|&&b| length(a, b) == r_len)
                    .map(|&b| (a, b))
            });
            let Some((a, b)) = next else { break };
            cancel_in_place(&mut fwd, &mut bwd, a, b);
            alive[a] = false;
            alive[b] = false;
        }
        pages.push(page(r + 1, &alive));
    }
    Ok(pages)
}

fn check_homogeneous(c: &ChainComplex, aux: &Grading, aux_of: &[i64]) -> Result<(), ChainError> {
    if *aux == Grading::Z2 {
        return Ok(());
    }
    let mut shift = None;
    for (s, t) in c.entries() {
        let delta = aux_of[t] - aux_of[s];
        match shift {
            None => shift = Some(delta),
            Some(d) if d != delta => {
                return Err(ChainError::GradingNotHomogeneous(aux.to_string()))
            }
            _ => {}
        }
    }
    Ok(())
}

/// Zig-zag cancellation on adjacency sets: every `x` with `x → b` gains the
/// arrows of `a`, then `a` and `b` are detached.
fn cancel_in_place(fwd: &mut [BTreeSet<usize>], bwd: &mut [BTreeSet<usize>], a: usize, b: usize) {
    let da: Vec<usize> = fwd[a].iter().copied().collect();
    let into_b: Vec<usize> = bwd[b].iter().copied().filter(|&x| x != a).collect();
    for x in into_b {
        for &y in &da {
            if fwd[x].remove(&y) {
                bwd[y].remove(&x);
            } else {
                fwd[x].insert(y);
                bwd[y].insert(x);
            }
        }
    }
    for v in [a, b] {
        let outs: Vec<usize> = fwd[v].iter().copied().collect();
        for y in outs {
            bwd[y].remove(&v);
        }
        fwd[v].clear();
        let ins: Vec<usize> = bwd[v].iter().copied().collect();
        for x in ins {
            fwd[x].remove(&v);
        }
        bwd[v].clear();
    }
}
