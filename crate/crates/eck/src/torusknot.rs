//! ECK complexes of the torus knots T(2,n), n odd.
//!
//! The zeroth column (no `e₊`) is generated by `e₂^k` in Alexander grading
//! `2k` and `h₋e₂^k` in grading `2k+1`, up to grading `2g = n − 1`, with
//! `d(e₂^k) = h₋e₂^{k−1}`.  The full bi-filtered complex tensors in powers of
//! `e₊` with `d(e₊^i Γ) = e₊^{i−1} h₋Γ + e₊^i dΓ`, where `h₋² = 0` and
//! generators above grading `2g` in the column are absent.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::chaincx::{ChainComplex, Generator, Grading, HomologyGroup};
use crate::orbits::{Alphabet, Orbit, OrbitSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorusError {
    #[error("T(2,n) needs n odd and at least 3 (got {0})")]
    BadN(i64),
}

/// The knot T(2,n) with its orbit alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TorusKnot {
    n: i64,
}

pub fn h_minus() -> Orbit {
    Orbit::positive_hyperbolic("h-", 1)
}

pub fn e_two() -> Orbit {
    Orbit::elliptic("e2", 2)
}

pub fn e_plus() -> Orbit {
    Orbit::elliptic("e+", 1)
}

pub fn h_plus() -> Orbit {
    Orbit::positive_hyperbolic("h+", 1)
}

pub fn e_minus() -> Orbit {
    Orbit::elliptic("e-", 1)
}

impl TorusKnot {
    pub fn new(n: i64) -> Result<Self, TorusError> {
        if n < 3 || n % 2 == 0 {
            return Err(TorusError::BadN(n));
        }
        Ok(TorusKnot { n })
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    /// The Seifert genus `(n − 1)/2`.
    pub fn genus(&self) -> i64 {
        (self.n - 1) / 2
    }

    /// Orbits appearing in the complexes.
    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new([h_minus(), e_two(), e_plus(), h_plus(), e_minus()])
    }

    /// Column generators in ascending Alexander grading `0..=2g`.
    pub fn column_orbit_sets(&self) -> Vec<OrbitSet> {
        (0..=2 * self.genus())
            .map(|a| column_set(a).expect("nonnegative grading"))
            .collect()
    }

    /// The zeroth column.
    pub fn zeroth_column(&self) -> ChainComplex {
        self.full_complex(0)
    }

    /// The full complex with `e₊` powers `0..=imax`.
    pub fn full_complex(&self, imax: u32) -> ChainComplex {
        let top = 2 * self.genus();
        let mut generators = Vec::new();
        let mut entries = Vec::new();
        for i in 0..=imax {
            for a in 0..=top {
                let gamma = column_set(a).expect("nonnegative grading");
                let g = tensor(i, &gamma);
                generators.push(generator(i, &g));
                if a % 2 == 0 {
                    // Γ = e₂^k: horizontal arrow to e₊^{i−1}h₋Γ when that
                    // generator exists, vertical arrow to e₊^i h₋e₂^{k−1}.
                    if i >= 1 && a < top {
                        entries.push((
                            g.to_string(),
                            tensor(i - 1, &column_set(a + 1).unwrap()).to_string(),
                        ));
                    }
                    if a >= 2 {
                        entries.push((
                            g.to_string(),
                            tensor(i, &column_set(a - 1).unwrap()).to_string(),
                        ));
                    }
                }
            }
        }
        ChainComplex::new(generators, entries).expect("generators are distinct")
    }

    /// Per-grading hat homology: the homology of the column's associated
    /// graded complex for the Alexander filtration.  Gradings above `2g`
    /// are absent (rank 0).
    pub fn eck_hat(&self) -> EckHat {
        let col = self.zeroth_column();
        let graded = col.retain_entries(|s, t| s.alexander == t.alexander);
        let groups = graded
            .homology(Some(&Grading::Alexander))
            .expect("associated graded preserves the Alexander grading");
        EckHat { groups }
    }

    /// The hat complex: the table's generators with zero differential.
    pub fn eck_hat_complex(&self) -> ChainComplex {
        self.zeroth_column()
            .retain_entries(|s, t| s.alexander == t.alexander)
    }
}

/// Hat homology split by Alexander grading.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EckHat {
    pub groups: BTreeMap<i64, HomologyGroup>,
}

impl EckHat {
    pub fn rank(&self, grading: i64) -> usize {
        self.groups.get(&grading).map_or(0, |g| g.rank)
    }

    pub fn generator(&self, grading: i64) -> Option<String> {
        let group = self.groups.get(&grading)?;
        match group.representatives.as_slice() {
            [rep] => Some(rep.join(" + ")),
            _ => None,
        }
    }
}

/// The column generator of Alexander grading `a`: `e₂^{a/2}` or `h₋e₂^{(a−1)/2}`.
fn column_set(a: i64) -> Option<OrbitSet> {
    if a < 0 {
        return None;
    }
    let k = u32::try_from(a / 2).ok()?;
    let e = OrbitSet::power(e_two(), k)?;
    if a % 2 == 0 {
        Some(e)
    } else {
        e.multiply(&OrbitSet::single(h_minus()))
    }
}

fn tensor(i: u32, gamma: &OrbitSet) -> OrbitSet {
    OrbitSet::power(e_plus(), i)
        .and_then(|p| p.multiply(gamma))
        .expect("e+ is elliptic")
}

fn generator(i: u32, g: &OrbitSet) -> Generator {
    Generator::new(g.to_string(), g.alexander(), i64::from(i), g.z2())
}

/// The quotient of `c` by the generators with `e₊` power below `shift`,
/// with every remaining generator divided by `e₊^shift`.
pub fn shifted_quotient(knot: &TorusKnot, c: &ChainComplex, shift: u32) -> ChainComplex {
    let alphabet = knot.alphabet();
    let divisor = OrbitSet::power(e_plus(), shift).expect("elliptic");
    let q = c
        .quotient(|g| g.eplus >= i64::from(shift))
        .expect("low e+ powers span a subcomplex");
    q.map_generators(|g| {
        let set = OrbitSet::parse(&g.id, &alphabet).expect("ids are orbit sets");
        let reduced = set.divide(&divisor).expect("e+ power is large enough");
        Generator::new(
            reduced.to_string(),
            reduced.alexander(),
            g.eplus - i64::from(shift),
            reduced.z2(),
        )
    })
    .expect("division is injective")
}

/// Dot-and-arrow diagram: rows are Alexander gradings (ascending upward),
/// columns are `e₊` powers.  A cell shows `o` (or the number of generators
/// if more than one), `<-` marks an arrow to the left neighbour in the same
/// row and `v` marks an arrow to the cell directly below.  Other arrows are
/// counted in a footer.
pub fn render_diagram(c: &ChainComplex) -> String {
    if c.is_empty() {
        return "(empty complex)\n".to_string();
    }
    let mut cells: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    for g in c.generators() {
        *cells.entry((g.alexander, g.eplus)).or_default() += 1;
    }
    let mut left = std::collections::BTreeSet::new();
    let mut down = std::collections::BTreeSet::new();
    let mut other = 0usize;
    for (s, t) in c.entries() {
        let (gs, gt) = (&c.generators()[s], &c.generators()[t]);
        if gs.alexander == gt.alexander && gs.eplus == gt.eplus + 1 {
            left.insert((gs.alexander, gs.eplus));
        } else if gs.eplus == gt.eplus && gs.alexander == gt.alexander + 1 {
            down.insert((gs.alexander, gs.eplus));
        } else {
            other += 1;
        }
    }
    let a_min = cells.keys().map(|k| k.0).min().expect("nonempty");
    let a_max = cells.keys().map(|k| k.0).max().expect("nonempty");
    let e_min = cells.keys().map(|k| k.1).min().expect("nonempty");
    let e_max = cells.keys().map(|k| k.1).max().expect("nonempty");
    let width = usize::try_from(e_max - e_min + 1).expect("ordered");
    let label_width = a_min.to_string().len().max(a_max.to_string().len());

    let mut out = String::new();
    for a in (a_min..=a_max).rev() {
        let mut row = vec![' '; 5 * width];
        let mut below = vec![' '; 5 * width];
        for e in e_min..=e_max {
            let x = 5 * usize::try_from(e - e_min).expect("ordered");
            if let Some(&count) = cells.get(&(a, e)) {
                row[x] = if count == 1 {
                    'o'
                } else {
                    char::from_digit(count.min(9) as u32, 10).expect("digit")
                };
            }
            if left.contains(&(a, e)) {
                row[x - 3] = '<';
                row[x - 2] = '-';
            }
            if down.contains(&(a, e)) {
                below[x] = 'v';
            }
        }
        let line: String = row.into_iter().collect();
        let _ = writeln!(out, "{a:>label_width$} | {}", line.trim_end());
        if a > a_min {
            let line: String = below.into_iter().collect();
            let _ = writeln!(
                out,
                "{}",
                format!("{:>label_width$} | {}", "", line).trim_end()
            );
        }
    }
    let axis: String = (e_min..=e_max).map(|e| format!("{e:<5}")).collect();
    let _ = writeln!(out, "{:>label_width$}   {}", "", axis.trim_end());
    let _ = writeln!(out, "rows: Alexander grading; columns: e+ power");
    if other > 0 {
        let _ = writeln!(out, "({other} further arrows not drawn)");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bad_n() {
        assert_eq!(TorusKnot::new(4), Err(TorusError::BadN(4)));
        assert_eq!(TorusKnot::new(1), Err(TorusError::BadN(1)));
    }

    #[test]
    fn column_for_trefoil() {
        let k = TorusKnot::new(3).unwrap();
        let c = k.zeroth_column();
        let ids: Vec<&str> = c.generators().iter().map(|g| g.id.as_str()).collect();
        assert_eq!(ids, ["1", "h-", "e2"]);
        assert_eq!(c.entry_ids(), vec![("e2".to_string(), "h-".to_string())]);
        assert_eq!(c.homology_rank().unwrap(), 1);
    }

    #[test]
    fn column_for_t25() {
        let k = TorusKnot::new(5).unwrap();
        let c = k.zeroth_column();
        assert_eq!(c.len(), 5);
        let h = c.total_homology().unwrap();
        assert_eq!(h.representatives, vec![vec!["1".to_string()]]);
    }

    #[test]
    fn eck_hat_table() {
        let k = TorusKnot::new(5).unwrap();
        let hat = k.eck_hat();
        let gens: Vec<String> = (0..=4).map(|a| hat.generator(a).unwrap()).collect();
        assert_eq!(gens, ["1", "h-", "e2", "e2·h-", "e2^2"]);
        assert_eq!(hat.rank(7), 0);
    }

    #[test]
    fn full_complex_arrows() {
        let k = TorusKnot::new(5).unwrap();
        let c = k.full_complex(4);
        assert!(c.has_entry("e+", "h-"));
        assert!(c.has_entry("e+·e2", "e2·h-"));
        assert!(c.has_entry("e+·e2^2", "e+·e2·h-"));
        assert!(!c.has_entry("e+·e2^2", "e2^2·h-"));
        assert!(c.validate().is_empty());
        assert!(k.full_complex(0).same_up_to_order(&k.zeroth_column()));
    }

    #[test]
    fn diagram_marks() {
        let k = TorusKnot::new(3).unwrap();
        let text = render_diagram(&k.full_complex(1));
        assert!(text.contains("<-"));
        assert!(text.contains('v'));
    }
}
