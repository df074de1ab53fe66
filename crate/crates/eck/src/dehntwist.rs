//! Combinatorial periodic Floer homology of a positive Dehn twist.
//!
//! Generators are left-turning lattice paths from `(0,0)` to `(Q,P)` whose
//! edges have rational slopes `p/q` drawn from a slope interval; each edge of
//! lattice length `M` is labelled either `e_{p/q}^M` or `e_{p/q}^{M-1} h_{p/q}`.
//! The differential is dual to corner rounding: `⟨d Γ', Γ⟩ = 1` when `Γ'` is
//! obtained from `Γ` by rounding one corner.
//!
//! Rounding a corner `v` between edges `E1` (primitive vector `u1`) and `E2`
//! (primitive vector `u2`), at least one of which carries an `h`:
//!
//! * let `a = v - u1` and `b = v + u2`; the new local path is the lower convex
//!   hull of the lattice points of the closed triangle `(a, v, b)` other than
//!   `v`, and all its edges are labelled `e`;
//! * `E1` and `E2` each lose one primitive step;
//! * if only one of `E1`, `E2` carries an `h`, that `h` is consumed and every
//!   local edge is elliptic;
//! * if both carry an `h`, one is consumed and the other may end up on any of
//!   the local edges (the remnant of `E1`, a new edge, or the remnant of
//!   `E2`).  Each distinct outcome is counted once.
//!
//! Counting the outcomes of a doubly hyperbolic corner with multiplicity
//! instead breaks `d² = 0`; the set rule above yields `d² = 0` and the
//! two-dimensional homology of the closed-form description in every case
//! tested.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::chaincx::{ChainComplex, Generator};
use crate::orbits::{Orbit, OrbitKind, OrbitSet};

/// A slope `p/q` in lowest terms with `q ≥ 1`.
pub type Slope = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DehnError {
    #[error("bad slope interval: {0}")]
    BadInterval(String),
    #[error("bad path: {0}")]
    BadPath(String),
    #[error("no corner at vertex {0}")]
    NoCorner(usize),
    #[error("the chosen edge at vertex {0} carries no h")]
    NoAdjacentH(usize),
    #[error("rounding {from} produced {to}, which is not a generator of the complex")]
    RoundingEscaped { from: String, to: String },
    #[error("d^2 != 0 in the rounding complex at {0:?}")]
    DSquaredNonzero(Vec<(String, String)>),
    #[error("twist-region complexes exist only for k = n or k = n + 1 (got n = {n}, k = {k})")]
    BadTwistRegion { n: i64, k: i64 },
}

/// Which side of an endpoint an infinitesimal offset lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Offset {
    Minus,
    Plus,
}

/// A rational number shifted by an infinitesimal, standing in for an
/// irrational interval endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Endpoint {
    pub value: Slope,
    pub offset: Offset,
}

impl Endpoint {
    pub fn new(value: Slope, offset: Offset) -> Self {
        Endpoint { value, offset }
    }
}

impl PartialOrd for Endpoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Endpoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value
            .cmp(&other.value)
            .then(self.offset.cmp(&other.offset))
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.offset {
            Offset::Minus => '-',
            Offset::Plus => '+',
        };
        if self.value.is_zero() {
            write!(f, "{sign}e")
        } else {
            write!(f, "{}{sign}e", self.value)
        }
    }
}

impl FromStr for Endpoint {
    type Err = DehnError;

    /// Accepts `-e`, `+e`, `r-e` and `r+e` where `r` is an integer or a
    /// fraction `p/q`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DehnError::BadInterval(format!("cannot parse endpoint `{s}`"));
        let s = s.trim();
        let (body, offset) = if let Some(b) = s.strip_suffix("+e") {
            (b, Offset::Plus)
        } else if let Some(b) = s.strip_suffix("-e") {
            (b, Offset::Minus)
        } else {
            return Err(DehnError::BadInterval(format!(
                "endpoint `{s}` needs an infinitesimal offset (+e or -e)"
            )));
        };
        let value = if body.is_empty() {
            Slope::zero()
        } else if let Some((p, q)) = body.split_once('/') {
            let p: i64 = p.parse().map_err(|_| bad())?;
            let q: i64 = q.parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Slope::new(p, q)
        } else {
            Slope::from_integer(body.parse().map_err(|_| bad())?)
        };
        Ok(Endpoint { value, offset })
    }
}

/// An interval of allowed slopes with infinitesimally shifted endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SlopeInterval {
    pub lo: Endpoint,
    pub hi: Endpoint,
}

impl SlopeInterval {
    pub fn new(lo: Endpoint, hi: Endpoint) -> Result<Self, DehnError> {
        if lo >= hi {
            return Err(DehnError::BadInterval(format!("({lo}, {hi}) is empty")));
        }
        Ok(SlopeInterval { lo, hi })
    }

    /// The interval `(−ε, 1/n + ε)` of the twist region, i.e. slopes in `[0, 1/n]`.
    pub fn twist(n: i64) -> Self {
        assert!(n >= 1, "twist interval needs n >= 1");
        SlopeInterval {
            lo: Endpoint::new(Slope::zero(), Offset::Minus),
            hi: Endpoint::new(Slope::new(1, n), Offset::Plus),
        }
    }

    pub fn contains(&self, s: Slope) -> bool {
        let above_lo = match self.lo.offset {
            Offset::Minus => s >= self.lo.value,
            Offset::Plus => s > self.lo.value,
        };
        let below_hi = match self.hi.offset {
            Offset::Plus => s <= self.hi.value,
            Offset::Minus => s < self.hi.value,
        };
        above_lo && below_hi
    }

    /// All slopes `p/q` in the interval with `1 ≤ q ≤ max_q`, ascending.
    pub fn slopes(&self, max_q: i64) -> Vec<Slope> {
        let mut out = BTreeSet::new();
        for q in 1..=max_q {
            let lo = (self.lo.value * q).floor().to_integer() - 1;
            let hi = (self.hi.value * q).ceil().to_integer() + 1;
            for p in lo..=hi {
                let s = Slope::new(p, q);
                if *s.denom() == q && self.contains(s) {
                    out.insert(s);
                }
            }
        }
        out.into_iter().collect()
    }
}

impl fmt::Display for SlopeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

fn slope_label(s: Slope) -> String {
    format!("{}/{}", s.numer(), s.denom())
}

/// The elliptic orbit `e_{p/q}`: Alexander weight `q`, winding `p`.
pub fn e_orbit(s: Slope) -> Orbit {
    Orbit::new(
        format!("e_{{{}}}", slope_label(s)),
        OrbitKind::Elliptic,
        *s.denom(),
        *s.numer(),
    )
}

/// The hyperbolic orbit `h_{p/q}`: Alexander weight `q`, winding `p`.
pub fn h_orbit(s: Slope) -> Orbit {
    Orbit::new(
        format!("h_{{{}}}", slope_label(s)),
        OrbitKind::PositiveHyperbolic,
        *s.denom(),
        *s.numer(),
    )
}

/// The boundary orbit `h₊` of a twist region for framing `n`.
pub fn h_plus_orbit(n: i64) -> Orbit {
    Orbit::new("h+", OrbitKind::PositiveHyperbolic, n, 1)
}

/// One maximal straight piece of a path: `M` primitive steps of slope `s`,
/// labelled `e_s^M`, or `e_s^{M-1} h_s` when `hyperbolic`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub slope: Slope,
    pub mult: u32,
    pub hyperbolic: bool,
}

impl Edge {
    fn step(&self) -> (i64, i64) {
        (*self.slope.denom(), *self.slope.numer())
    }
}

/// Label of an entry in the orbit-by-orbit description of a path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    E,
    H,
}

/// One factor `e_s^m` or `h_s` of a path monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Entry {
    pub slope: Slope,
    pub label: Label,
    pub mult: u32,
}

/// Which edge at a corner supplies the consumed `h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A left-turning lattice path with elliptic/hyperbolic edge labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathMonomial {
    edges: Vec<Edge>,
}

impl PathMonomial {
    /// Builds a path from edges with strictly increasing slopes.
    pub fn new(edges: Vec<Edge>) -> Result<Self, DehnError> {
        for e in &edges {
            if e.mult == 0 {
                return Err(DehnError::BadPath("edge of length 0".into()));
            }
        }
        if edges.windows(2).any(|w| w[0].slope >= w[1].slope) {
            return Err(DehnError::BadPath("slopes must increase strictly".into()));
        }
        Ok(PathMonomial { edges })
    }

    /// The empty path (the orbit set ∅).
    pub fn empty() -> Self {
        PathMonomial { edges: Vec::new() }
    }

    /// Builds a path from orbit factors; an `e` and an `h` factor of the same
    /// slope merge into one edge.
    pub fn from_entries(entries: &[Entry]) -> Result<Self, DehnError> {
        let mut sorted = entries.to_vec();
        sorted.sort_by(|a, b| a.slope.cmp(&b.slope).then(a.label.cmp(&b.label)));
        let mut edges: Vec<Edge> = Vec::new();
        for en in sorted {
            if en.mult == 0 || (en.label == Label::H && en.mult != 1) {
                return Err(DehnError::BadPath(format!("bad multiplicity in {en:?}")));
            }
            match edges.last_mut() {
                Some(last) if last.slope == en.slope => {
                    if en.label == Label::H && last.hyperbolic || en.label == Label::E {
                        return Err(DehnError::BadPath("repeated factor".into()));
                    }
                    last.mult += 1;
                    last.hyperbolic = true;
                }
                _ => edges.push(Edge {
                    slope: en.slope,
                    mult: en.mult,
                    hyperbolic: en.label == Label::H,
                }),
            }
        }
        PathMonomial::new(edges)
    }

    /// Parses the orbit-set form, e.g. `e_{0/1}^2·h_{1/4}·e_{3/1}`.
    pub fn parse(text: &str) -> Result<Self, DehnError> {
        let text = text.trim();
        if text == "1" || text.is_empty() {
            return Ok(PathMonomial::empty());
        }
        let bad = |t: &str| DehnError::BadPath(format!("cannot parse `{t}`"));
        let mut entries = Vec::new();
        for part in text.split('·') {
            let (name, mult) = match part.rsplit_once("}^") {
                Some((n, m)) => (format!("{n}}}"), m.parse::<u32>().map_err(|_| bad(part))?),
                None => (part.to_string(), 1),
            };
            let (label, rest) = if let Some(r) = name.strip_prefix("e_{") {
                (Label::E, r)
            } else if let Some(r) = name.strip_prefix("h_{") {
                (Label::H, r)
            } else {
                return Err(bad(part));
            };
            let inner = rest.strip_suffix('}').ok_or_else(|| bad(part))?;
            let (p, q) = inner.split_once('/').ok_or_else(|| bad(part))?;
            let p: i64 = p.parse().map_err(|_| bad(part))?;
            let q: i64 = q.parse().map_err(|_| bad(part))?;
            if q <= 0 || p.gcd(&q) != 1 {
                return Err(bad(part));
            }
            entries.push(Entry {
                slope: Slope::new(p, q),
                label,
                mult,
            });
        }
        PathMonomial::from_entries(&entries)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Orbit factors in slope order, `e` before `h` at a shared slope.
    pub fn entries(&self) -> Vec<Entry> {
        let mut out = Vec::new();
        for e in &self.edges {
            let elliptic = if e.hyperbolic { e.mult - 1 } else { e.mult };
            if elliptic > 0 {
                out.push(Entry {
                    slope: e.slope,
                    label: Label::E,
                    mult: elliptic,
                });
            }
            if e.hyperbolic {
                out.push(Entry {
                    slope: e.slope,
                    label: Label::H,
                    mult: 1,
                });
            }
        }
        out
    }

    /// Vertices of the lattice path at the ends of the edges.
    pub fn points(&self) -> Vec<(i64, i64)> {
        let mut pts = vec![(0, 0)];
        for e in &self.edges {
            let (dx, dy) = e.step();
            let m = i64::from(e.mult);
            let (x, y) = *pts.last().expect("nonempty");
            pts.push((x + m * dx, y + m * dy));
        }
        pts
    }

    /// Vertices of the path at the ends of the orbit factors.
    pub fn entry_points(&self) -> Vec<(i64, i64)> {
        let mut pts = vec![(0, 0)];
        for en in self.entries() {
            let m = i64::from(en.mult);
            let (x, y) = *pts.last().expect("nonempty");
            pts.push((x + m * en.slope.denom(), y + m * en.slope.numer()));
        }
        pts
    }

    /// The endpoint `(Q, P)`.
    pub fn endpoint(&self) -> (i64, i64) {
        *self.points().last().expect("nonempty")
    }

    pub fn hyperbolic_count(&self) -> usize {
        self.edges.iter().filter(|e| e.hyperbolic).count()
    }

    pub fn orbit_set(&self) -> OrbitSet {
        let mut factors = Vec::new();
        for e in &self.edges {
            let elliptic = if e.hyperbolic { e.mult - 1 } else { e.mult };
            factors.push((e_orbit(e.slope), elliptic));
            if e.hyperbolic {
                factors.push((h_orbit(e.slope), 1));
            }
        }
        OrbitSet::from_factors(factors).expect("each slope carries at most one h")
    }

    /// Multiplies by `e_s`.
    pub fn times_e(&self, s: Slope) -> PathMonomial {
        let mut edges = self.edges.clone();
        match edges.iter().position(|e| e.slope >= s) {
            Some(i) if edges[i].slope == s => edges[i].mult += 1,
            Some(i) => edges.insert(
                i,
                Edge {
                    slope: s,
                    mult: 1,
                    hyperbolic: false,
                },
            ),
            None => edges.push(Edge {
                slope: s,
                mult: 1,
                hyperbolic: false,
            }),
        }
        PathMonomial { edges }
    }

    /// All distinct roundings of the corner between edge `k-1` and edge `k`.
    fn roundings_at_edge_vertex(&self, k: usize) -> Vec<PathMonomial> {
        let (e1, e2) = (self.edges[k - 1], self.edges[k]);
        if !e1.hyperbolic && !e2.hyperbolic {
            return Vec::new();
        }
        let v = self.points()[k];
        let (u1, u2) = (e1.step(), e2.step());
        let a = (v.0 - u1.0, v.1 - u1.1);
        let b = (v.0 + u2.0, v.1 + u2.1);
        let new_edges = hull_edges(a, v, b);

        let pre = &self.edges[..k - 1];
        let post = &self.edges[k + 1..];
        let build = |h1: bool, h_new: Option<usize>, h2: bool| -> Option<PathMonomial> {
            let mut edges = pre.to_vec();
            if e1.mult > 1 {
                edges.push(Edge {
                    mult: e1.mult - 1,
                    hyperbolic: h1,
                    ..e1
                });
            } else if h1 {
                return None;
            }
            for (i, ne) in new_edges.iter().enumerate() {
                edges.push(Edge {
                    hyperbolic: h_new == Some(i),
                    ..*ne
                });
            }
            if e2.mult > 1 {
                edges.push(Edge {
                    mult: e2.mult - 1,
                    hyperbolic: h2,
                    ..e2
                });
            } else if h2 {
                return None;
            }
            edges.extend_from_slice(post);
            Some(PathMonomial { edges })
        };

        let mut out = BTreeSet::new();
        if e1.hyperbolic && e2.hyperbolic {
            out.extend(build(true, None, false));
            for i in 0..new_edges.len() {
                out.extend(build(false, Some(i), false));
            }
            out.extend(build(false, None, true));
        } else {
            out.extend(build(false, None, false));
        }
        out.into_iter().collect()
    }

    /// Every rounding of every corner, one entry per (corner, outcome).
    pub fn all_roundings(&self) -> Vec<PathMonomial> {
        (1..self.edges.len())
            .flat_map(|k| self.roundings_at_edge_vertex(k))
            .collect()
    }

    /// Rounds the corner at vertex `corner_index` of the factor-by-factor
    /// path (see [`PathMonomial::entry_points`]), consuming the `h` of the
    /// edge on `h_side`.  When both adjacent edges are hyperbolic the
    /// surviving `h` may land on any local edge, so several outcomes are
    /// returned.
    pub fn round_corner(
        &self,
        corner_index: usize,
        h_side: Side,
    ) -> Result<Vec<PathMonomial>, DehnError> {
        let entries = self.entries();
        if corner_index == 0 || corner_index >= entries.len() {
            return Err(DehnError::NoCorner(corner_index));
        }
        if entries[corner_index - 1].slope == entries[corner_index].slope {
            return Err(DehnError::NoCorner(corner_index));
        }
        let target = self.entry_points()[corner_index];
        let k = self
            .points()
            .iter()
            .position(|&p| p == target)
            .expect("a corner is an edge vertex");
        let side_edge = match h_side {
            Side::Left => self.edges[k - 1],
            Side::Right => self.edges[k],
        };
        if !side_edge.hyperbolic {
            return Err(DehnError::NoAdjacentH(corner_index));
        }
        Ok(self.roundings_at_edge_vertex(k))
    }
}

impl fmt::Display for PathMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.orbit_set())
    }
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn in_closed_triangle(p: (i64, i64), a: (i64, i64), v: (i64, i64), b: (i64, i64)) -> bool {
    let d1 = cross(a, v, p);
    let d2 = cross(v, b, p);
    let d3 = cross(b, a, p);
    let neg = d1 < 0 || d2 < 0 || d3 < 0;
    let pos = d1 > 0 || d2 > 0 || d3 > 0;
    !(neg && pos)
}

/// Lower convex hull (left-turning) of a point set sorted by `(x, y)`.
fn lower_hull(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &p in points {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull
}

fn chain_edges(chain: &[(i64, i64)]) -> Vec<Edge> {
    chain
        .windows(2)
        .map(|w| {
            let (dx, dy) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            let g = dx.gcd(&dy);
            Edge {
                slope: Slope::new(dy, dx),
                mult: u32::try_from(g).expect("positive length"),
                hyperbolic: false,
            }
        })
        .collect()
}

/// Edges of the lower hull of the lattice points of triangle `(a, v, b)`
/// other than the peg `v`, running from `a` to `b`.
fn hull_edges(a: (i64, i64), v: (i64, i64), b: (i64, i64)) -> Vec<Edge> {
    let (x0, x1) = (a.0.min(v.0).min(b.0), a.0.max(v.0).max(b.0));
    let (y0, y1) = (a.1.min(v.1).min(b.1), a.1.max(v.1).max(b.1));
    let mut pts = Vec::new();
    for x in x0..=x1 {
        for y in y0..=y1 {
            if (x, y) != v && in_closed_triangle((x, y), a, v, b) {
                pts.push((x, y));
            }
        }
    }
    let hull = lower_hull(&pts);
    debug_assert_eq!(hull.first(), Some(&a));
    debug_assert_eq!(hull.last(), Some(&b));
    chain_edges(&hull)
}

/// All generators with endpoint `(Q, P)` over the slopes of `iv` with
/// denominator at most `Q`, in a fixed order.
pub fn enumerate_generators(iv: &SlopeInterval, p_total: i64, q_total: i64) -> Vec<PathMonomial> {
    if q_total < 0 {
        return Vec::new();
    }
    if q_total == 0 {
        return if p_total == 0 {
            vec![PathMonomial::empty()]
        } else {
            Vec::new()
        };
    }
    let slopes = iv.slopes(q_total);
    let mut out = Vec::new();
    let mut acc = Vec::new();
    enumerate_rec(&slopes, 0, 0, 0, p_total, q_total, &mut acc, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn enumerate_rec(
    slopes: &[Slope],
    i: usize,
    x: i64,
    y: i64,
    p_total: i64,
    q_total: i64,
    acc: &mut Vec<Edge>,
    out: &mut Vec<PathMonomial>,
) {
    if x == q_total {
        if y == p_total {
            out.push(PathMonomial { edges: acc.clone() });
        }
        return;
    }
    if i == slopes.len() {
        return;
    }
    // Remaining rise must fit between the smallest and largest slopes left.
    let rest = Slope::from_integer(q_total - x);
    let need = Slope::from_integer(p_total - y);
    if need < slopes[i] * rest || need > slopes[slopes.len() - 1] * rest {
        return;
    }
    let s = slopes[i];
    let (dx, dy) = (*s.denom(), *s.numer());
    enumerate_rec(slopes, i + 1, x, y, p_total, q_total, acc, out);
    let mut m: i64 = 1;
    while x + m * dx <= q_total {
        for hyperbolic in [false, true] {
            acc.push(Edge {
                slope: s,
                mult: u32::try_from(m).expect("small"),
                hyperbolic,
            });
            enumerate_rec(
                slopes,
                i + 1,
                x + m * dx,
                y + m * dy,
                p_total,
                q_total,
                acc,
                out,
            );
            acc.pop();
        }
        m += 1;
    }
}

fn generator_for(path: &PathMonomial, q_total: i64) -> Generator {
    Generator::new(
        path.to_string(),
        q_total,
        0,
        (path.hyperbolic_count() % 2) as u8,
    )
}

/// Index-level rounding incidence: `(rounded, original)` pairs, i.e. the
/// differential entries `rounded → original`.
fn rounding_entries(gens: &[PathMonomial]) -> Result<Vec<(usize, usize)>, DehnError> {
    let pos: std::collections::HashMap<&PathMonomial, usize> =
        gens.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let mut pairs = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        for r in g.all_roundings() {
            let j = *pos.get(&r).ok_or_else(|| DehnError::RoundingEscaped {
                from: g.to_string(),
                to: r.to_string(),
            })?;
            pairs.push((j, i));
        }
    }
    Ok(pairs)
}

/// The Dehn-twist complex on [`enumerate_generators`]; the differential is
/// dual to corner rounding.  Fails if `d² ≠ 0`.
pub fn pfc_complex(
    iv: &SlopeInterval,
    p_total: i64,
    q_total: i64,
) -> Result<ChainComplex, DehnError> {
    let gens = enumerate_generators(iv, p_total, q_total);
    let pairs = rounding_entries(&gens)?;
    let generators = gens.iter().map(|g| generator_for(g, q_total)).collect();
    let c = ChainComplex::from_indices(generators, pairs).expect("distinct monomials");
    let report = c.validate();
    if !report.d_squared.is_empty() {
        return Err(DehnError::DSquaredNonzero(report.d_squared));
    }
    Ok(c)
}

/// The closed-form homology generators: `E` is the all-elliptic path along
/// the lower convex hull of the lattice points allowed by the interval, and
/// `H` holds the paths with the same edges and exactly one `h`.  `None` when
/// `P/Q` lies outside the interval.
pub fn closed_form_generators(
    iv: &SlopeInterval,
    p_total: i64,
    q_total: i64,
) -> Option<(PathMonomial, Vec<PathMonomial>)> {
    if q_total <= 0 {
        return None;
    }
    if !iv.contains(Slope::new(p_total, q_total)) {
        return None;
    }
    let mut pts = vec![(0, 0)];
    for x in 1..q_total {
        let from_lo = min_above(iv.lo.value * x, iv.lo.offset == Offset::Plus);
        let from_hi = min_above(
            Slope::from_integer(p_total) - iv.hi.value * (q_total - x),
            iv.hi.offset == Offset::Minus,
        );
        pts.push((x, from_lo.max(from_hi)));
    }
    pts.push((q_total, p_total));
    let hull = lower_hull(&pts);
    let edges = chain_edges(&hull);
    let e = PathMonomial {
        edges: edges.clone(),
    };
    let hs = (0..edges.len())
        .map(|i| {
            let mut es = edges.clone();
            es[i].hyperbolic = true;
            PathMonomial { edges: es }
        })
        .collect();
    Some((e, hs))
}

/// Least integer `y` with `y ≥ bound`, or `y > bound` when `strict`.
fn min_above(bound: Slope, strict: bool) -> i64 {
    let c = bound.ceil().to_integer();
    if strict && bound.is_integer() {
        c + 1
    } else {
        c
    }
}

/// The complex obtained by adjoining `h₊` to the twist region of framing `n`:
/// generators `h₊^δ ⊗ Γ` with `Γ` a path in the interval `[0, 1/n]` ending at
/// `(j_T − δn, p − δ)`, and `d(h₊Γ) = h₊ dΓ + e_{1/n} Γ`.
pub fn augmented_complex(n: i64, j_t: i64, p: i64) -> Result<ChainComplex, DehnError> {
    assert!(n >= 1, "framing must be positive");
    let iv = SlopeInterval::twist(n);
    let base = enumerate_generators(&iv, p, j_t);
    let raised = if p >= 1 && j_t >= n {
        enumerate_generators(&iv, p - 1, j_t - n)
    } else {
        Vec::new()
    };
    let h_plus = OrbitSet::single(h_plus_orbit(n));
    let e_step = Slope::new(1, n);

    let mut generators: Vec<Generator> = base
        .iter()
        .map(|g| generator_for(g, j_t).with_extra("delta", 0))
        .collect();
    for g in &raised {
        let id = h_plus
            .multiply(&g.orbit_set())
            .expect("h+ is not a slope orbit")
            .to_string();
        let z2 = ((g.hyperbolic_count() + 1) % 2) as u8;
        generators.push(Generator::new(id, j_t, 0, z2).with_extra("delta", 1));
    }

    let nb = base.len();
    let mut pairs = rounding_entries(&base)?;
    pairs.extend(
        rounding_entries(&raised)?
            .into_iter()
            .map(|(s, t)| (s + nb, t + nb)),
    );
    let pos: std::collections::HashMap<&PathMonomial, usize> =
        base.iter().enumerate().map(|(i, g)| (g, i)).collect();
    for (i, g) in raised.iter().enumerate() {
        let target = g.times_e(e_step);
        let j = *pos.get(&target).ok_or_else(|| DehnError::RoundingEscaped {
            from: g.to_string(),
            to: target.to_string(),
        })?;
        pairs.push((i + nb, j));
    }
    let c = ChainComplex::from_indices(generators, pairs).expect("distinct monomials");
    let report = c.validate();
    if !report.d_squared.is_empty() {
        return Err(DehnError::DSquaredNonzero(report.d_squared));
    }
    Ok(c)
}

/// The twist-region complexes `C_{1/n}` (`k = n`) and `C_{1/(n+1)}`
/// (`k = n + 1`), both derived from corner rounding.
pub fn twist_region_complex(n: i64, k: i64) -> Result<ChainComplex, DehnError> {
    if n < 1 || (k != n && k != n + 1) {
        return Err(DehnError::BadTwistRegion { n, k });
    }
    augmented_complex(n, k, 1)
}

/// `C'_{1/(n+1)}`: the subcomplex of `C_{1/(n+1)}` without `h_{1/(n+1)}`.
pub fn twist_region_reduced(n: i64) -> Result<ChainComplex, DehnError> {
    let full = twist_region_complex(n, n + 1)?;
    let omit = h_orbit(Slope::new(1, n + 1)).name;
    Ok(full
        .subcomplex(|g| g.id != omit)
        .expect("nothing maps onto h_{1/(n+1)}"))
}

/// Whether a slope is nonnegative; convenience for callers filtering
/// twist-region data.
pub fn is_nonnegative(s: Slope) -> bool {
    !s.is_negative()
}
