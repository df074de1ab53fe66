//! Reeb orbits and orbit sets.
//!
//! An [`OrbitSet`] is a monomial in labelled orbits.  Hyperbolic orbits may
//! appear at most once; any product or quotient that would break this (or
//! produce a negative multiplicity) is the distinguished zero, represented
//! here as `None`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chaincx::Direction;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitError {
    #[error("unknown orbit `{0}`")]
    UnknownOrbit(String),
    #[error("bad multiplicity in `{0}`")]
    BadMultiplicity(String),
    #[error("hyperbolic orbit `{0}` cannot appear with multiplicity above 1")]
    HyperbolicPower(String),
}

/// Classification of a nondegenerate orbit by its linearized return map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitKind {
    Elliptic,
    PositiveHyperbolic,
    NegativeHyperbolic,
}

impl OrbitKind {
    pub fn is_hyperbolic(self) -> bool {
        self != OrbitKind::Elliptic
    }

    /// Lefschetz sign: −1 exactly for positive hyperbolic orbits.
    pub fn lefschetz(self) -> i8 {
        match self {
            OrbitKind::PositiveHyperbolic => -1,
            OrbitKind::Elliptic | OrbitKind::NegativeHyperbolic => 1,
        }
    }
}

/// A simple Reeb orbit.  Names are opaque; the grading data lives in the
/// weight fields.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Orbit {
    pub name: String,
    pub kind: OrbitKind,
    /// Contribution to the Alexander grading.
    pub alexander_weight: i64,
    /// Contribution to the twist filtration (the longitude coefficient).
    pub longitude_winding: i64,
}

impl Orbit {
    pub fn new(
        name: impl Into<String>,
        kind: OrbitKind,
        alexander_weight: i64,
        longitude_winding: i64,
    ) -> Self {
        Orbit {
            name: name.into(),
            kind,
            alexander_weight,
            longitude_winding,
        }
    }

    pub fn elliptic(name: impl Into<String>, alexander_weight: i64) -> Self {
        Orbit::new(name, OrbitKind::Elliptic, alexander_weight, 0)
    }

    pub fn positive_hyperbolic(name: impl Into<String>, alexander_weight: i64) -> Self {
        Orbit::new(name, OrbitKind::PositiveHyperbolic, alexander_weight, 0)
    }

    pub fn with_winding(mut self, longitude_winding: i64) -> Self {
        self.longitude_winding = longitude_winding;
        self
    }
}

/// A finite monomial of orbits with multiplicities.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrbitSet {
    factors: BTreeMap<Orbit, u32>,
}

impl OrbitSet {
    /// The empty orbit set ∅, written `1`.
    pub fn empty() -> Self {
        OrbitSet::default()
    }

    pub fn single(orbit: Orbit) -> Self {
        OrbitSet {
            factors: BTreeMap::from([(orbit, 1)]),
        }
    }

    /// `orbit^m`, or zero for a hyperbolic power above 1.
    pub fn power(orbit: Orbit, m: u32) -> Option<Self> {
        OrbitSet::from_factors([(orbit, m)])
    }

    /// Builds a monomial; zero multiplicities are dropped and repeated
    /// orbits are combined.  Returns zero if a hyperbolic orbit ends up with
    /// multiplicity above 1.
    pub fn from_factors<I: IntoIterator<Item = (Orbit, u32)>>(factors: I) -> Option<Self> {
        let mut map: BTreeMap<Orbit, u32> = BTreeMap::new();
        for (o, m) in factors {
            if m > 0 {
                *map.entry(o).or_insert(0) += m;
            }
        }
        if map.iter().any(|(o, &m)| o.kind.is_hyperbolic() && m > 1) {
            return None;
        }
        Some(OrbitSet { factors: map })
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> impl Iterator<Item = (&Orbit, u32)> {
        self.factors.iter().map(|(o, &m)| (o, m))
    }

    pub fn multiplicity(&self, orbit: &Orbit) -> u32 {
        self.factors.get(orbit).copied().unwrap_or(0)
    }

    pub fn multiplicity_by_name(&self, name: &str) -> u32 {
        self.factors
            .iter()
            .find(|(o, _)| o.name == name)
            .map_or(0, |(_, &m)| m)
    }

    /// Product; zero when a hyperbolic multiplicity would exceed 1.
    pub fn multiply(&self, other: &OrbitSet) -> Option<OrbitSet> {
        OrbitSet::from_factors(
            self.factors
                .iter()
                .chain(other.factors.iter())
                .map(|(o, &m)| (o.clone(), m)),
        )
    }

    /// Quotient; zero when a multiplicity would become negative.
    pub fn divide(&self, other: &OrbitSet) -> Option<OrbitSet> {
        let mut factors = self.factors.clone();
        for (o, &m) in &other.factors {
            let have = factors.get(o).copied().unwrap_or(0);
            if have < m {
                return None;
            }
            if have == m {
                factors.remove(o);
            } else {
                factors.insert(o.clone(), have - m);
            }
        }
        Some(OrbitSet { factors })
    }

    /// Weighted sum of Alexander weights.
    pub fn alexander(&self) -> i64 {
        self.factors
            .iter()
            .map(|(o, &m)| o.alexander_weight * i64::from(m))
            .sum()
    }

    /// Weighted sum of longitude windings.
    pub fn longitude_winding(&self) -> i64 {
        self.factors
            .iter()
            .map(|(o, &m)| o.longitude_winding * i64::from(m))
            .sum()
    }

    /// Product of the Lefschetz signs with multiplicity.
    pub fn lefschetz(&self) -> i8 {
        self.factors
            .iter()
            .map(|(o, &m)| if m % 2 == 1 { o.kind.lefschetz() } else { 1 })
            .product()
    }

    /// ℤ/2 grading: 0 exactly when the Lefschetz sign is +1.
    pub fn z2(&self) -> u8 {
        u8::from(self.lefschetz() < 0)
    }

    /// Number of hyperbolic factors.
    pub fn hyperbolic_count(&self) -> usize {
        self.factors
            .keys()
            .filter(|o| o.kind.is_hyperbolic())
            .count()
    }

    /// Parses the `name^mult·name…` form produced by `Display`, resolving
    /// names in `alphabet`.  `1` (or `∅`) is the empty set.
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<OrbitSet, OrbitError> {
        let text = text.trim();
        if text == "1" || text == "∅" || text.is_empty() {
            return Ok(OrbitSet::empty());
        }
        let mut factors = Vec::new();
        for part in text.split('·') {
            let (name, mult) = match part.rsplit_once('^') {
                Some((n, m)) if !n.ends_with('{') => {
                    let m: u32 = m
                        .parse()
                        .map_err(|_| OrbitError::BadMultiplicity(part.to_string()))?;
                    (n, m)
                }
                _ => (part, 1),
            };
            if mult == 0 {
                return Err(OrbitError::BadMultiplicity(part.to_string()));
            }
            let orbit = alphabet
                .get(name)
                .ok_or_else(|| OrbitError::UnknownOrbit(name.to_string()))?;
            if orbit.kind.is_hyperbolic() && mult > 1 {
                return Err(OrbitError::HyperbolicPower(name.to_string()));
            }
            factors.push((orbit.clone(), mult));
        }
        OrbitSet::from_factors(factors).ok_or_else(|| OrbitError::HyperbolicPower(text.to_string()))
    }
}

impl fmt::Display for OrbitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(o, &m)| {
                if m == 1 {
                    o.name.clone()
                } else {
                    format!("{}^{m}", o.name)
                }
            })
            .collect();
        f.write_str(&parts.join("·"))
    }
}

/// A lookup table of orbits by name.
#[derive(Clone, Debug, Default)]
pub struct Alphabet {
    orbits: BTreeMap<String, Orbit>,
}

impl Alphabet {
    pub fn new<I: IntoIterator<Item = Orbit>>(orbits: I) -> Self {
        Alphabet {
            orbits: orbits.into_iter().map(|o| (o.name.clone(), o)).collect(),
        }
    }

    pub fn get(&self, name: &str) -> Option<&Orbit> {
        self.orbits.get(name)
    }

    pub fn insert(&mut self, orbit: Orbit) {
        self.orbits.insert(orbit.name.clone(), orbit);
    }

    pub fn orbits(&self) -> impl Iterator<Item = &Orbit> {
        self.orbits.values()
    }
}

/// A caller-supplied grading that differentials must move monotonically.
pub struct ExtraGrading<'a> {
    pub name: &'a str,
    pub value: &'a dyn Fn(&OrbitSet) -> i64,
    pub direction: Direction,
}

/// The constraint set used by [`admissible`].
#[derive(Default)]
pub struct Rules<'a> {
    pub extra: Vec<ExtraGrading<'a>>,
}

/// A violated necessary condition for a differential entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    /// The ℤ/2 grading must flip.
    Parity,
    /// The Alexander grading must not increase.
    Alexander,
    /// The longitude winding must not decrease (descending twist filtration).
    LongitudeWinding,
    /// A caller-supplied grading moved against its direction.
    Extra(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Admissibility {
    pub admissible: bool,
    pub violations: Vec<Rule>,
}

/// Checks the necessary conditions for `source → target` to be a
/// differential entry.
pub fn admissible(source: &OrbitSet, target: &OrbitSet, rules: &Rules<'_>) -> Admissibility {
    let mut violations = Vec::new();
    if source.z2() == target.z2() {
        violations.push(Rule::Parity);
    }
    if target.alexander() > source.alexander() {
        violations.push(Rule::Alexander);
    }
    if target.longitude_winding() < source.longitude_winding() {
        violations.push(Rule::LongitudeWinding);
    }
    for g in &rules.extra {
        if !g.direction.allows((g.value)(source), (g.value)(target)) {
            violations.push(Rule::Extra(g.name.to_string()));
        }
    }
    Admissibility {
        admissible: violations.is_empty(),
        violations,
    }
}
