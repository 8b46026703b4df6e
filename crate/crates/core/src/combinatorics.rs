//! Invariants read off the intersection lattice.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::arrangement::{Arrangement, ArrangementError, Lattice, Line, ProjPoint, WeakCombinatorics};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombError {
    #[error("tau_max({d}, {d1}) needs 0 <= d1 < d")]
    TauMaxRange { d: i64, d1: i64 },
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
}

/// `τ = Σ n_r (r-1)^2`.
pub fn tjurina(wc: &WeakCombinatorics) -> i64 {
    wc.n.iter()
        .map(|(&r, &c)| (c * (r - 1) * (r - 1)) as i64)
        .sum()
}

/// Same value, summed point by point.
pub fn tjurina_from_lattice(lat: &Lattice) -> i64 {
    lat.points
        .iter()
        .map(|p| {
            let r = p.multiplicity() as i64;
            (r - 1) * (r - 1)
        })
        .sum()
}

/// `(d-1)^2 - d1(d-d1-1)`. A pencil has `d1 = 0`, so zero is allowed.
pub fn tau_max(d: i64, d1: i64) -> Result<i64, CombError> {
    if d1 < 0 || d1 >= d {
        return Err(CombError::TauMaxRange { d, d1 });
    }
    Ok((d - 1) * (d - 1) - d1 * (d - d1 - 1))
}

/// `t^2 - c1 t + c0`, the characteristic polynomial divided by `t - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CharPolyReduced {
    pub c1: i64,
    pub c0: i64,
}

impl CharPolyReduced {
    pub fn eval(&self, t: i64) -> i64 {
        t * t - self.c1 * t + self.c0
    }

    /// Integer roots `(r1 <= r2)` if the polynomial splits over `Z`.
    pub fn integer_roots(&self) -> Option<(i64, i64)> {
        let disc = self.c1 * self.c1 - 4 * self.c0;
        if disc < 0 {
            return None;
        }
        let s = disc.isqrt();
        if s * s != disc || (self.c1 + s) % 2 != 0 {
            return None;
        }
        Some(((self.c1 - s) / 2, (self.c1 + s) / 2))
    }
}

impl std::fmt::Display for CharPolyReduced {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.integer_roots() {
            Some((a, b)) if a == b => write!(f, "(t-{a})^2"),
            Some((a, b)) => write!(f, "(t-{a})(t-{b})"),
            None => write!(f, "t^2 - {}t + {}", self.c1, self.c0),
        }
    }
}

pub fn char_poly_reduced(wc: &WeakCombinatorics) -> CharPolyReduced {
    let d = wc.d as i64;
    let s: i64 = wc.n.iter().map(|(&r, &c)| ((r - 1) * c) as i64).sum();
    CharPolyReduced {
        c1: d - 1,
        c0: s - d + 1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DeletionIdentity {
    pub line: usize,
    pub r_l: i64,
    pub lhs: i64,
    pub rhs: i64,
    pub ok: bool,
}

/// Compares `τ(A) - τ(A \ L)` from both lattices with `2(d-1) - r_L`.
pub fn deletion_identity_check(a: &Arrangement, line: usize) -> Result<DeletionIdentity, CombError> {
    let reduced = a.delete_index(line)?;
    let lhs = tjurina_from_lattice(&a.lattice()) - tjurina_from_lattice(&reduced.lattice());
    let r_l = a.incidence_count(a.line(line)) as i64;
    let rhs = 2 * (a.d() as i64 - 1) - r_l;
    Ok(DeletionIdentity {
        line,
        r_l,
        lhs,
        rhs,
        ok: lhs == rhs,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Supersolvability {
    /// Modular lattice points, in lattice order.
    pub modular_points: Vec<ProjPoint>,
    pub supersolvable: bool,
}

/// A point is modular when the join with every other multiple point is a
/// line of the arrangement.
pub fn modular_and_supersolvable(a: &Arrangement) -> Supersolvability {
    modular_points_of(a, &a.lattice())
}

pub fn modular_points_of(a: &Arrangement, lat: &Lattice) -> Supersolvability {
    let lines: BTreeSet<&Line> = a.lines().iter().collect();
    let modular_points: Vec<ProjPoint> = lat
        .points
        .iter()
        .filter(|p| {
            lat.points.iter().all(|q| {
                q.coords == p.coords
                    || Line::join(&p.coords, &q.coords).is_some_and(|l| lines.contains(&l))
            })
        })
        .map(|p| p.coords.clone())
        .collect();
    Supersolvability {
        supersolvable: !modular_points.is_empty(),
        modular_points,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DivisionalWitness {
    pub line: usize,
    pub r_l: i64,
    pub root: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisionalFreeness {
    pub divisionally_free: bool,
    pub witnesses: Vec<DivisionalWitness>,
}

/// Root test `χ̄(r_L - 1) = 0` over all lines.
pub fn divisional_freeness(a: &Arrangement) -> DivisionalFreeness {
    let lat = a.lattice();
    let chi = char_poly_reduced(&lat.weak_combinatorics());
    let witnesses: Vec<DivisionalWitness> = (0..a.d())
        .filter_map(|i| {
            let r_l = lat.points_on(i).count() as i64;
            (chi.eval(r_l - 1) == 0).then_some(DivisionalWitness {
                line: i,
                r_l,
                root: r_l - 1,
            })
        })
        .collect();
    DivisionalFreeness {
        divisionally_free: !witnesses.is_empty(),
        witnesses,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub m: i64,
    pub eps: i64,
    pub d_min: i64,
    pub d_max: i64,
}

impl BoundsReport {
    pub fn feasible(&self) -> bool {
        self.d_min <= self.d_max
    }
}

/// `2m + 2ε + 1 <= d <= ⌊m(m+2+ε)/2⌋` for free arrangements with `d1 = m + ε`.
pub fn degree_bounds(m: i64, eps: i64) -> BoundsReport {
    BoundsReport {
        m,
        eps,
        d_min: 2 * m + 2 * eps + 1,
        d_max: m * (m + 2 + eps) / 2,
    }
}

/// Smallest `m >= 2` with a nonempty degree window, and that window's `d_min`.
pub fn min_feasible(eps: i64) -> BoundsReport {
    (2..)
        .map(|m| degree_bounds(m, eps))
        .find(BoundsReport::feasible)
        .expect("the window opens for large m")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CombSumBound {
    pub lhs: i64,
    pub bound: i64,
    pub sharp: bool,
}

/// `Σ (r-1) n_r` against `⌊(d-1)(d+3)/4⌋`.
pub fn comb_sum_bound(wc: &WeakCombinatorics) -> CombSumBound {
    let d = wc.d as i64;
    let lhs: i64 = wc.n.iter().map(|(&r, &c)| ((r - 1) * c) as i64).sum();
    let bound = (d - 1) * (d + 3) / 4;
    CombSumBound {
        lhs,
        bound,
        sharp: lhs == bound,
    }
}
