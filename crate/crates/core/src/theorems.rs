//! Verifiers for the classification results on arrangements with
//! `τ` close to `τ_max`. Each verifier decides the case from combinatorics
//! only and then checks the predicted exponents against computed profiles.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::arrangement::{Arrangement, ArrangementError, Line, ProjPoint};
use crate::combinatorics::{modular_points_of, tau_max, tjurina};
use crate::gallery::GalleryEntry;
use crate::syzygy::{classify_resolution, mdr, Classification, ProfileOptions, ResolutionProfile, SyzygyError};

#[derive(Debug, Error)]
pub enum TheoremError {
    #[error(transparent)]
    Syzygy(#[from] SyzygyError),
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
    #[error("precondition not met: {0}")]
    Precondition(String),
    #[error("unknown theorem id {0:?}")]
    UnknownTheorem(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum TheoremId {
    /// Deleting a line from `A` with `τ = τ_max(d, m+1)`.
    #[serde(rename = "thm02")]
    Thm02,
    /// Adding a line through a point of maximal multiplicity.
    #[serde(rename = "thm03")]
    Thm03,
    /// Free or plus-one generated, nothing else.
    #[serde(rename = "thmAe1")]
    ThmAe1,
    /// Four cases for `(A, A \ L)`.
    #[serde(rename = "corAe1")]
    CorAe1,
    /// `τ = τ_max(d, m-1)`.
    #[serde(rename = "prop00")]
    Prop00,
    /// `τ = τ_max(d, m)`.
    #[serde(rename = "prop01")]
    Prop01,
}

impl TheoremId {
    pub const ALL: [TheoremId; 6] = [
        TheoremId::Thm02,
        TheoremId::Thm03,
        TheoremId::ThmAe1,
        TheoremId::CorAe1,
        TheoremId::Prop00,
        TheoremId::Prop01,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremId::Thm02 => "thm02",
            TheoremId::Thm03 => "thm03",
            TheoremId::ThmAe1 => "thmAe1",
            TheoremId::CorAe1 => "corAe1",
            TheoremId::Prop00 => "prop00",
            TheoremId::Prop01 => "prop01",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = TheoremError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| TheoremError::UnknownTheorem(s.to_string()))
    }
}

/// One predicted fact and what was computed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub subject: String,
    pub expected: String,
    pub computed: String,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseReport {
    pub theorem: TheoremId,
    pub arrangement: String,
    /// Index of the deleted line in `A`.
    pub line: Option<usize>,
    pub covector: Option<String>,
    pub point: Option<String>,
    pub r_l: Option<usize>,
    pub hypothesis: bool,
    pub note: Option<String>,
    pub case: Option<u8>,
    pub checks: Vec<Check>,
    /// Vacuously true when the hypothesis fails.
    pub agreement: bool,
}

impl CaseReport {
    fn new(theorem: TheoremId, arrangement: &str) -> Self {
        CaseReport {
            theorem,
            arrangement: arrangement.to_string(),
            line: None,
            covector: None,
            point: None,
            r_l: None,
            hypothesis: true,
            note: None,
            case: None,
            checks: Vec::new(),
            agreement: true,
        }
    }

    fn skipped(mut self, note: String) -> Self {
        self.hypothesis = false;
        self.note = Some(note);
        self
    }

    fn settle(mut self) -> Self {
        self.agreement = !self.hypothesis || (self.case.is_some() && self.checks.iter().all(|c| c.ok));
        self
    }

    /// Hypothesis holds and some prediction failed.
    pub fn is_disagreement(&self) -> bool {
        self.hypothesis && !self.agreement
    }
}

fn exps_string(e: &[i64]) -> String {
    let parts: Vec<String> = e.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn describe(d: i64, exps: &[i64]) -> String {
    let mut e = exps.to_vec();
    e.sort_unstable();
    if e.iter().any(|&x| x < 0) {
        return format!("impossible {}", exps_string(&e));
    }
    let u: Vec<usize> = e.iter().map(|&x| x as usize).collect();
    format!("{} {}", Classification::from_degrees(d as usize, &u), exps_string(&e))
}

fn computed(p: &ResolutionProfile) -> String {
    format!("{} {}", p.classification, p.exponents_string())
}

fn matches(p: &ResolutionProfile, exps: &[i64]) -> bool {
    let mut e = exps.to_vec();
    e.sort_unstable();
    e.len() == p.degrees.len() && e.iter().zip(&p.degrees).all(|(&x, &y)| x == y as i64)
}

/// `p` has one of the listed exponent vectors.
fn check_any(subject: &str, d: i64, alternatives: &[Vec<i64>], p: &ResolutionProfile) -> Check {
    let expected: Vec<String> = alternatives.iter().map(|e| describe(d, e)).collect();
    Check {
        subject: subject.to_string(),
        expected: expected.join(" or "),
        computed: computed(p),
        ok: alternatives.iter().any(|e| matches(p, e)),
    }
}

fn check(subject: &str, d: i64, exps: &[i64], p: &ResolutionProfile) -> Check {
    check_any(subject, d, &[exps.to_vec()], p)
}

fn fact(subject: &str, holds: bool, computed: String) -> Check {
    Check {
        subject: subject.to_string(),
        expected: "true".into(),
        computed,
        ok: holds,
    }
}

fn profile(a: &Arrangement, opts: &ProfileOptions) -> Result<ResolutionProfile, SyzygyError> {
    classify_resolution(a, ProfileOptions { defect: false, ..*opts })
}

/// `(d, m, τ)` of an arrangement.
fn basics(a: &Arrangement) -> (i64, i64, i64) {
    let wc = a.weak_combinatorics();
    (a.d() as i64, wc.m as i64, tjurina(&wc))
}

/// Checks `τ = τ_max(d, m+1)` and `m <= (d-3)/2`; the error is the note.
fn near_maximal(a: &Arrangement) -> Result<(i64, i64), String> {
    let (d, m, tau) = basics(a);
    if 2 * m > d - 3 {
        return Err(format!("m = {m} exceeds (d-3)/2 for d = {d}"));
    }
    let bound = tau_max(d, m + 1).expect("m + 1 < d");
    if tau != bound {
        return Err(format!("τ = {tau} but τ_max(d, m+1) = {bound}"));
    }
    Ok((d, m))
}

/// Deletion of each line `L` of `A`: cases by `r_L`.
pub fn verify_deletion_trichotomy(
    a: &Arrangement,
    name: &str,
    opts: &ProfileOptions,
) -> Result<Vec<CaseReport>, TheoremError> {
    let base = CaseReport::new(TheoremId::Thm02, name);
    let (d, m) = match near_maximal(a) {
        Ok(x) => x,
        Err(note) => return Ok(vec![base.skipped(note)]),
    };
    let pa = profile(a, opts)?;
    let mut out = Vec::with_capacity(a.d());
    for i in 0..a.d() {
        let l = a.line(i);
        let r = a.incidence_count(l) as i64;
        let mut rep = base.clone();
        rep.line = Some(i);
        rep.covector = Some(l.to_string());
        rep.r_l = Some(r as usize);
        let a1 = a.delete_index(i)?;
        let m1 = a1.lattice().max_multiplicity() as i64;
        if m1 != m {
            out.push(rep.skipped(format!("m(A \\ L) = {m1}, not {m}")));
            continue;
        }
        let p1 = profile(&a1, opts)?;
        if r == 2 * (d - 1) - 3 * m {
            rep.case = Some(1);
            rep.checks.push(check("A'", d - 1, &[m - 1, d - m - 1], &p1));
            rep.checks.push(check("A", d, &[m, d - m, r - 1], &pa));
            rep.checks.push(fact("3m >= d-1", 3 * m >= d - 1, format!("3m = {}, d-1 = {}", 3 * m, d - 1)));
        } else if r == d - m - 1 {
            rep.case = Some(2);
            rep.checks.push(check("A'", d - 1, &[m, d - m - 2], &p1));
            rep.checks.push(check("A", d, &[m + 1, d - m - 2], &pa));
        } else {
            rep.case = Some(3);
            rep.checks.push(fact("r_L < d-1-m", r < d - 1 - m, format!("r_L = {r}, d-1-m = {}", d - 1 - m)));
            if matches(&pa, &[m + 1, d - m - 2]) {
                let mut alts = Vec::new();
                if m + 1 < d - m - 2 {
                    alts.push(vec![m + 1, d - m - 3]);
                }
                alts.push(vec![m + 1, d - m - 2, d - 1 - r]);
                rep.checks.push(check_any("A'", d - 1, &alts, &p1));
            }
        }
        out.push(rep.settle());
    }
    Ok(out)
}

/// Adding `l` through the point `p` of multiplicity `m`.
pub fn verify_addition_trichotomy(
    a: &Arrangement,
    name: &str,
    p: &ProjPoint,
    l: &Line,
    opts: &ProfileOptions,
) -> Result<CaseReport, TheoremError> {
    let mut rep = CaseReport::new(TheoremId::Thm03, name);
    rep.point = Some(p.to_string());
    rep.covector = Some(l.to_string());
    let (d, m) = match near_maximal(a) {
        Ok(x) => x,
        Err(note) => return Ok(rep.skipped(note)),
    };
    if a.position(l).is_some() {
        return Ok(rep.skipped("the line is already in A".into()));
    }
    if !l.contains(p) {
        return Ok(rep.skipped("the line does not pass through the point".into()));
    }
    let lat = a.lattice();
    let mp = lat.points.iter().find(|q| &q.coords == p).map_or(1, |q| q.multiplicity()) as i64;
    if mp != m {
        return Ok(rep.skipped(format!("the point has multiplicity {mp}, not m = {m}")));
    }
    let r = a.incidence_count(l) as i64;
    rep.r_l = Some(r as usize);
    let b = a.add(l.clone())?;
    let pb = profile(&b, opts)?;
    let pa = profile(a, opts)?;
    if r == 3 * (m + 1) - d {
        rep.case = Some(1);
        rep.checks.push(check("B", d + 1, &[m, d - m], &pb));
        rep.checks.push(check("A", d, &[m, d - m, 2 * d - 3 * (m + 1)], &pa));
        rep.checks.push(fact("3m >= d-2", 3 * m >= d - 2, format!("3m = {}, d-2 = {}", 3 * m, d - 2)));
    } else if r == m + 2 {
        rep.case = Some(2);
        rep.checks.push(check("B", d + 1, &[m + 1, d - m - 1], &pb));
        rep.checks.push(check("A", d, &[m + 1, d - m - 2], &pa));
    } else {
        rep.case = Some(3);
        rep.checks.push(fact("r_L > m+2", r > m + 2, format!("r_L = {r}, m+2 = {}", m + 2)));
        if matches(&pa, &[m + 1, d - m - 2]) {
            let mut alts = Vec::new();
            if m + 1 < d - m - 2 && r == d - m - 1 {
                alts.push(vec![m + 2, d - m - 2]);
            }
            alts.push(vec![m + 2, d - m - 1, r - 1]);
            rep.checks.push(check_any("B", d + 1, &alts, &pb));
        }
    }
    Ok(rep.settle())
}

/// Lines through `p` joining it to another lattice point, not in `A`,
/// followed by those `extras` that pass through `p`.
pub fn addition_candidates(a: &Arrangement, p: &ProjPoint, extras: &[Line]) -> Vec<Line> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let joins = a
        .lattice()
        .points
        .into_iter()
        .filter(|q| &q.coords != p)
        .filter_map(|q| Line::join(p, &q.coords));
    for l in joins.chain(extras.iter().filter(|l| l.contains(p)).cloned()) {
        if a.position(&l).is_none() && seen.insert(l.clone()) {
            out.push(l);
        }
    }
    out
}

/// Addition at every point of multiplicity `m` with its candidate lines.
pub fn verify_additions(
    a: &Arrangement,
    name: &str,
    extras: &[Line],
    opts: &ProfileOptions,
) -> Result<Vec<CaseReport>, TheoremError> {
    if let Err(note) = near_maximal(a) {
        return Ok(vec![CaseReport::new(TheoremId::Thm03, name).skipped(note)]);
    }
    let lat = a.lattice();
    let m = lat.max_multiplicity();
    let mut out = Vec::new();
    for pt in lat.points.iter().filter(|q| q.multiplicity() == m) {
        for l in addition_candidates(a, &pt.coords, extras) {
            out.push(verify_addition_trichotomy(a, name, &pt.coords, &l, opts)?);
        }
    }
    Ok(out)
}

/// Plus-one generated `(m, d-m, 2d-3m-3)` or free `(m+1, d-m-2)`.
pub fn verify_dichotomy(a: &Arrangement, name: &str, opts: &ProfileOptions) -> Result<CaseReport, TheoremError> {
    let mut rep = CaseReport::new(TheoremId::ThmAe1, name);
    let (d, m) = match near_maximal(a) {
        Ok(x) => x,
        Err(note) => return Ok(rep.skipped(note)),
    };
    let pa = profile(a, opts)?;
    let pog = vec![m, d - m, 2 * d - 3 * m - 3];
    let free = vec![m + 1, d - m - 2];
    rep.case = if matches(&pa, &pog) {
        Some(1)
    } else if matches(&pa, &free) {
        Some(2)
    } else {
        None
    };
    rep.checks.push(check_any("A", d, &[pog, free], &pa));
    Ok(rep.settle())
}

/// Assigns each line one of the four cases from `r_L` alone.
fn corollary_case(d: i64, m: i64, r: i64) -> Option<u8> {
    if r == 2 * d - 3 * m - 2 {
        Some(1)
    } else if r == d - m - 1 {
        Some(2)
    } else if r == m + 2 && r < d - m - 1 {
        Some(3)
    } else if r < d - m - 1 {
        Some(4)
    } else {
        None
    }
}

pub fn verify_corollary_cases(
    a: &Arrangement,
    name: &str,
    opts: &ProfileOptions,
) -> Result<Vec<CaseReport>, TheoremError> {
    let base = CaseReport::new(TheoremId::CorAe1, name);
    let (d, m) = match near_maximal(a) {
        Ok(x) => x,
        Err(note) => return Ok(vec![base.skipped(note)]),
    };
    let pa = profile(a, opts)?;
    let mut out = Vec::with_capacity(a.d());
    for i in 0..a.d() {
        let l = a.line(i);
        let r = a.incidence_count(l) as i64;
        let mut rep = base.clone();
        rep.line = Some(i);
        rep.covector = Some(l.to_string());
        rep.r_l = Some(r as usize);
        rep.case = corollary_case(d, m, r);
        let p1 = profile(&a.delete_index(i)?, opts)?;
        let free_a = [m + 1, d - m - 2];
        match rep.case {
            Some(1) => {
                rep.checks.push(check("A", d, &[m, d - m, 2 * d - 3 * m - 3], &pa));
                rep.checks.push(check("A'", d - 1, &[m - 1, d - m - 1], &p1));
                rep.checks.push(fact("3m >= d-1", 3 * m >= d - 1, format!("3m = {}, d-1 = {}", 3 * m, d - 1)));
            }
            Some(2) => {
                rep.checks.push(check("A", d, &free_a, &pa));
                rep.checks.push(check("A'", d - 1, &[m, d - m - 2], &p1));
            }
            Some(3) => {
                rep.checks.push(check("A", d, &free_a, &pa));
                rep.checks.push(check("A'", d - 1, &[m + 1, d - m - 3], &p1));
                rep.checks.push(fact("m < (d-3)/2", 2 * m < d - 3, format!("2m = {}, d-3 = {}", 2 * m, d - 3)));
            }
            Some(_) => {
                rep.checks.push(check("A", d, &free_a, &pa));
                rep.checks.push(check("A'", d - 1, &[m + 1, d - m - 2, d - 1 - r], &p1));
            }
            None => {
                rep.note = Some(format!("r_L = {r} fits none of the four cases"));
            }
        }
        out.push(rep.settle());
    }
    Ok(out)
}

/// `τ = τ_max(d, m-1)`: free `(m-1, d-m)`, supersolvable, every point of
/// multiplicity `m` modular. `τ = τ_max(d, m)`: free `(m, d-m-1)`.
pub fn verify_tau_max_lower_cases(
    a: &Arrangement,
    name: &str,
    opts: &ProfileOptions,
) -> Result<CaseReport, TheoremError> {
    let (d, m, tau) = basics(a);
    let lower = if m >= 1 { tau_max(d, m - 1).ok() } else { None };
    let upper = tau_max(d, m).ok();
    if lower == Some(tau) {
        let mut rep = CaseReport::new(TheoremId::Prop00, name);
        let pa = profile(a, opts)?;
        rep.case = Some(1);
        rep.checks.push(check("A", d, &[m - 1, d - m], &pa));
        let lat = a.lattice();
        let ss = modular_points_of(a, &lat);
        rep.checks.push(fact("supersolvable", ss.supersolvable, format!("{} modular points", ss.modular_points.len())));
        let maximal: Vec<&ProjPoint> = lat
            .points
            .iter()
            .filter(|p| p.multiplicity() as i64 == m)
            .map(|p| &p.coords)
            .collect();
        let all_modular = maximal.iter().all(|p| ss.modular_points.contains(p));
        rep.checks.push(fact(
            "points of multiplicity m are modular",
            all_modular,
            format!("{} of {} modular", maximal.iter().filter(|p| ss.modular_points.contains(p)).count(), maximal.len()),
        ));
        Ok(rep.settle())
    } else if upper == Some(tau) {
        let mut rep = CaseReport::new(TheoremId::Prop01, name);
        let pa = profile(a, opts)?;
        rep.case = Some(1);
        rep.checks.push(check("A", d, &[m, d - m - 1], &pa));
        Ok(rep.settle())
    } else {
        Ok(CaseReport::new(TheoremId::Prop00, name)
            .skipped(format!("τ = {tau} equals neither τ_max(d, m-1) nor τ_max(d, m)")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Completion {
    pub covector: String,
    #[serde(skip)]
    pub line: Line,
    /// `|L ∩ A|`.
    pub r_l: usize,
    pub supersolvable: bool,
}

/// Tests `A ∪ L` for supersolvability over all joins of two multiple
/// points not in `A`, plus `extras`. Requires `mdr(A) = m(A)`.
pub fn completion_search(a: &Arrangement, extras: &[Line]) -> Result<Vec<Completion>, TheoremError> {
    let lat = a.lattice();
    let m = lat.max_multiplicity();
    let d1 = mdr(a)? as usize;
    if d1 != m {
        return Err(TheoremError::Precondition(format!("mdr = {d1} differs from m = {m}")));
    }
    let mut seen = BTreeSet::new();
    let mut candidates = Vec::new();
    for (i, p) in lat.points.iter().enumerate() {
        for q in &lat.points[i + 1..] {
            if let Some(l) = Line::join(&p.coords, &q.coords) {
                if a.position(&l).is_none() && seen.insert(l.clone()) {
                    candidates.push(l);
                }
            }
        }
    }
    for l in extras {
        if a.position(l).is_none() && seen.insert(l.clone()) {
            candidates.push(l.clone());
        }
    }
    candidates
        .into_iter()
        .map(|l| {
            let b = a.add(l.clone())?;
            let supersolvable = modular_points_of(&b, &b.lattice()).supersolvable;
            Ok(Completion {
                covector: l.to_string(),
                r_l: a.incidence_count(&l),
                line: l,
                supersolvable,
            })
        })
        .collect()
}

/// Runs one verifier over a gallery entry; `prop00` and `prop01` share a driver.
pub fn verify_entry(
    theorem: TheoremId,
    entry: &GalleryEntry,
    opts: &ProfileOptions,
) -> Result<Vec<CaseReport>, TheoremError> {
    verify(theorem, &entry.arrangement, &entry.name, &entry.extra_lines, opts)
}

pub fn verify(
    theorem: TheoremId,
    a: &Arrangement,
    name: &str,
    extras: &[Line],
    opts: &ProfileOptions,
) -> Result<Vec<CaseReport>, TheoremError> {
    match theorem {
        TheoremId::Thm02 => verify_deletion_trichotomy(a, name, opts),
        TheoremId::Thm03 => verify_additions(a, name, extras, opts),
        TheoremId::ThmAe1 => Ok(vec![verify_dichotomy(a, name, opts)?]),
        TheoremId::CorAe1 => verify_corollary_cases(a, name, opts),
        TheoremId::Prop00 | TheoremId::Prop01 => Ok(vec![verify_tau_max_lower_cases(a, name, opts)?]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::FieldSpec;
    use crate::gallery;

    fn opts() -> ProfileOptions {
        ProfileOptions::without_defect()
    }

    #[test]
    fn ids_round_trip() {
        for t in TheoremId::ALL {
            assert_eq!(t.as_str().parse::<TheoremId>().unwrap(), t);
        }
        assert!("thm99".parse::<TheoremId>().is_err());
    }

    #[test]
    fn corollary_cases_partition_r() {
        let (d, m) = (11, 4);
        let cases: Vec<Option<u8>> = (0..d).map(|r| corollary_case(d, m, r)).collect();
        assert_eq!(cases[6], Some(2));
        assert_eq!(cases[5], Some(4));
        assert_eq!(cases[10], None);
        assert!(2 * (d - 1) - 3 * m > d - m - 1);
    }

    #[test]
    fn a13_fails_the_near_maximal_hypothesis() {
        let a = gallery::build("A13").unwrap();
        let r = verify_dichotomy(&a, "A13", &opts()).unwrap();
        assert!(!r.hypothesis);
        assert!(r.agreement);
    }

    #[test]
    fn pentagram_dichotomy_is_free() {
        let a = gallery::build("pentagram").unwrap();
        let r = verify_dichotomy(&a, "pentagram", &opts()).unwrap();
        assert!(r.hypothesis && r.agreement);
        assert_eq!(r.case, Some(2));
    }

    #[test]
    fn near_pencil_takes_the_lower_branch() {
        let k = FieldSpec::rationals();
        let mut covs: Vec<[i64; 3]> = (0..5).map(|i| [1, i, 0]).collect();
        covs.push([0, 0, 1]);
        let a = Arrangement::from_int_covectors(&k, &covs).unwrap();
        let r = verify_tau_max_lower_cases(&a, "near-pencil", &opts()).unwrap();
        assert_eq!(r.theorem, TheoremId::Prop00);
        assert!(r.hypothesis && r.agreement, "{r:?}");
    }

    #[test]
    fn completion_precondition() {
        let a = gallery::build("free55").unwrap();
        assert!(matches!(completion_search(&a, &[]), Err(TheoremError::Precondition(_))));
    }
}
