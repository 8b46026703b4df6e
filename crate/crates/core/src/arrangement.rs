//! Lines, arrangements and their intersection lattices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactfield::{format_rational, parse_rational, FieldElem, FieldError, FieldSpec, Rational};
use crate::polyring::HomPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArrangementError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("zero covector")]
    ZeroCovector,
    #[error("lines {first} and {second} are proportional")]
    DuplicateLine { first: usize, second: usize },
    #[error("line {0} is not in the arrangement")]
    NotAMember(String),
    #[error("line {0} is already in the arrangement")]
    AlreadyPresent(String),
    #[error("operation needs at least {needed} lines, arrangement has {found}")]
    TooFewLines { needed: usize, found: usize },
    #[error("malformed arrangement document: {0}")]
    Document(String),
}

/// Scales so the first nonzero entry is 1; `None` for the zero vector.
fn normalize(v: [FieldElem; 3]) -> Result<Option<[FieldElem; 3]>, FieldError> {
    let Some(lead) = v.iter().find(|c| !c.is_zero()) else {
        return Ok(None);
    };
    if lead.is_one() {
        return Ok(Some(v));
    }
    let inv = lead.inv()?;
    Ok(Some(v.map(|c| &c * &inv)))
}

fn cross(a: &[FieldElem; 3], b: &[FieldElem; 3]) -> [FieldElem; 3] {
    [
        &(&a[1] * &b[2]) - &(&a[2] * &b[1]),
        &(&a[2] * &b[0]) - &(&a[0] * &b[2]),
        &(&a[0] * &b[1]) - &(&a[1] * &b[0]),
    ]
}

fn dot(a: &[FieldElem; 3], b: &[FieldElem; 3]) -> FieldElem {
    &(&(&a[0] * &b[0]) + &(&a[1] * &b[1])) + &(&a[2] * &b[2])
}

fn write_triple(f: &mut fmt::Formatter<'_>, v: &[FieldElem; 3], sep: &str) -> fmt::Result {
    write!(f, "({}{sep}{}{sep}{})", v[0], v[1], v[2])
}

/// A point of the projective plane, first nonzero coordinate equal to 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    coords: [FieldElem; 3],
}

impl ProjPoint {
    pub fn new(coords: [FieldElem; 3]) -> Result<Self, ArrangementError> {
        normalize(coords)?
            .map(|coords| ProjPoint { coords })
            .ok_or(ArrangementError::ZeroCovector)
    }

    pub fn from_ints(field: &FieldSpec, c: [i64; 3]) -> Result<Self, ArrangementError> {
        Self::new(c.map(|x| field.from_int(x)))
    }

    pub fn coords(&self) -> &[FieldElem; 3] {
        &self.coords
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_triple(f, &self.coords, ":")
    }
}

/// The line `α x + β y + γ z = 0`, first nonzero entry equal to 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Line {
    covector: [FieldElem; 3],
}

impl Line {
    pub fn new(covector: [FieldElem; 3]) -> Result<Self, ArrangementError> {
        normalize(covector)?
            .map(|covector| Line { covector })
            .ok_or(ArrangementError::ZeroCovector)
    }

    pub fn from_ints(field: &FieldSpec, c: [i64; 3]) -> Result<Self, ArrangementError> {
        Self::new(c.map(|x| field.from_int(x)))
    }

    pub fn covector(&self) -> &[FieldElem; 3] {
        &self.covector
    }

    pub fn field(&self) -> &FieldSpec {
        self.covector[0].field()
    }

    pub fn eval(&self, p: &ProjPoint) -> FieldElem {
        dot(&self.covector, &p.coords)
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        self.eval(p).is_zero()
    }

    /// Intersection point; `None` when the lines coincide.
    pub fn meet(&self, other: &Line) -> Option<ProjPoint> {
        ProjPoint::new(cross(&self.covector, &other.covector)).ok()
    }

    /// The line through two points; `None` when they coincide.
    pub fn join(p: &ProjPoint, q: &ProjPoint) -> Option<Line> {
        Line::new(cross(&p.coords, &q.coords)).ok()
    }

    pub fn linear_form(&self) -> HomPoly {
        HomPoly::linear(&self.covector).expect("covector entries share a field")
    }
}

impl fmt::Debug for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_triple(f, &self.covector, ", ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePoint {
    pub coords: ProjPoint,
    /// Indices of the lines through the point, ascending.
    pub incident: Vec<usize>,
}

impl LatticePoint {
    pub fn multiplicity(&self) -> usize {
        self.incident.len()
    }

    pub fn contains_line(&self, i: usize) -> bool {
        self.incident.binary_search(&i).is_ok()
    }
}

/// All intersection points, sorted by canonical coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    pub d: usize,
    pub points: Vec<LatticePoint>,
}

impl Lattice {
    pub fn points_on(&self, line: usize) -> impl Iterator<Item = &LatticePoint> {
        self.points.iter().filter(move |p| p.contains_line(line))
    }

    pub fn weak_combinatorics(&self) -> WeakCombinatorics {
        let mut n = BTreeMap::new();
        for p in &self.points {
            *n.entry(p.multiplicity()).or_insert(0) += 1;
        }
        WeakCombinatorics::new(self.d, n)
    }

    pub fn max_multiplicity(&self) -> usize {
        self.points.iter().map(|p| p.multiplicity()).max().unwrap_or(0)
    }
}

/// The counts `n_r` of points of multiplicity `r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakCombinatorics {
    pub d: usize,
    pub n: BTreeMap<usize, usize>,
    pub m: usize,
}

impl WeakCombinatorics {
    pub fn new(d: usize, n: BTreeMap<usize, usize>) -> Self {
        let n: BTreeMap<usize, usize> = n.into_iter().filter(|&(_, c)| c > 0).collect();
        let m = n.keys().next_back().copied().unwrap_or(0);
        WeakCombinatorics { d, n, m }
    }

    pub fn n(&self, r: usize) -> usize {
        self.n.get(&r).copied().unwrap_or(0)
    }

    /// `Σ C(r,2)·n_r`, which equals `C(d,2)` for any arrangement.
    pub fn pair_count(&self) -> usize {
        self.n.iter().map(|(&r, &c)| r * (r - 1) / 2 * c).sum()
    }
}

impl fmt::Display for WeakCombinatorics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={}, m={}", self.d, self.m)?;
        for (r, c) in &self.n {
            write!(f, ", n{r}={c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub enum Edit {
    Delete(Line),
    Add(Line),
}

/// A reduced line arrangement; lines keep their input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrangement {
    field: FieldSpec,
    lines: Vec<Line>,
}

impl Arrangement {
    pub fn new(field: &FieldSpec, lines: Vec<Line>) -> Result<Self, ArrangementError> {
        let mut seen: BTreeMap<&Line, usize> = BTreeMap::new();
        for (i, l) in lines.iter().enumerate() {
            if l.field() != field {
                return Err(FieldError::FieldMismatch.into());
            }
            if let Some(&first) = seen.get(l) {
                return Err(ArrangementError::DuplicateLine { first, second: i });
            }
            seen.insert(l, i);
        }
        Ok(Arrangement {
            field: field.clone(),
            lines,
        })
    }

    pub fn from_covectors(
        field: &FieldSpec,
        covectors: Vec<[FieldElem; 3]>,
    ) -> Result<Self, ArrangementError> {
        let lines = covectors
            .into_iter()
            .map(Line::new)
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(field, lines)
    }

    pub fn from_int_covectors(field: &FieldSpec, covectors: &[[i64; 3]]) -> Result<Self, ArrangementError> {
        Self::from_covectors(field, covectors.iter().map(|c| c.map(|x| field.from_int(x))).collect())
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn d(&self) -> usize {
        self.lines.len()
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn line(&self, i: usize) -> &Line {
        &self.lines[i]
    }

    pub fn position(&self, l: &Line) -> Option<usize> {
        self.lines.iter().position(|x| x == l)
    }

    /// The defining polynomial, the product of the linear forms.
    pub fn polynomial(&self) -> HomPoly {
        if self.lines.is_empty() {
            return HomPoly::constant(self.field.one());
        }
        let forms: Vec<HomPoly> = self.lines.iter().map(Line::linear_form).collect();
        HomPoly::product(&forms).expect("lines share the field")
    }

    pub fn lattice(&self) -> Lattice {
        let mut points: BTreeMap<ProjPoint, BTreeSet<usize>> = BTreeMap::new();
        for i in 0..self.d() {
            for j in i + 1..self.d() {
                let p = self.lines[i]
                    .meet(&self.lines[j])
                    .expect("distinct lines meet in a point");
                let e = points.entry(p).or_default();
                e.insert(i);
                e.insert(j);
            }
        }
        Lattice {
            d: self.d(),
            points: points
                .into_iter()
                .map(|(coords, inc)| LatticePoint {
                    coords,
                    incident: inc.into_iter().collect(),
                })
                .collect(),
        }
    }

    pub fn weak_combinatorics(&self) -> WeakCombinatorics {
        self.lattice().weak_combinatorics()
    }

    /// `r_L`: distinct points of `L ∩ (A \ {L})`.
    pub fn incidence_count(&self, l: &Line) -> usize {
        let pts: BTreeSet<ProjPoint> = self
            .lines
            .iter()
            .filter_map(|other| if other == l { None } else { l.meet(other) })
            .collect();
        pts.len()
    }

    pub fn delete(&self, l: &Line) -> Result<Arrangement, ArrangementError> {
        let i = self
            .position(l)
            .ok_or_else(|| ArrangementError::NotAMember(l.to_string()))?;
        self.delete_index(i)
    }

    pub fn delete_index(&self, i: usize) -> Result<Arrangement, ArrangementError> {
        if self.d() < 3 {
            return Err(ArrangementError::TooFewLines {
                needed: 3,
                found: self.d(),
            });
        }
        let mut lines = self.lines.clone();
        lines.remove(i);
        Ok(Arrangement {
            field: self.field.clone(),
            lines,
        })
    }

    /// Appends `l` as the last line.
    pub fn add(&self, l: Line) -> Result<Arrangement, ArrangementError> {
        if l.field() != &self.field {
            return Err(FieldError::FieldMismatch.into());
        }
        if self.position(&l).is_some() {
            return Err(ArrangementError::AlreadyPresent(l.to_string()));
        }
        let mut lines = self.lines.clone();
        lines.push(l);
        Ok(Arrangement {
            field: self.field.clone(),
            lines,
        })
    }

    pub fn modify(&self, edit: Edit) -> Result<Arrangement, ArrangementError> {
        match edit {
            Edit::Delete(l) => self.delete(&l),
            Edit::Add(l) => self.add(l),
        }
    }

    /// The lines at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Arrangement, ArrangementError> {
        Self::new(&self.field, indices.iter().map(|&i| self.lines[i].clone()).collect())
    }

    /// Same lines regardless of order.
    pub fn same_lines(&self, other: &Arrangement) -> bool {
        let a: BTreeSet<&Line> = self.lines.iter().collect();
        let b: BTreeSet<&Line> = other.lines.iter().collect();
        self.field == other.field && a == b
    }

    pub fn to_document(&self) -> ArrangementDoc {
        ArrangementDoc {
            name: None,
            field: FieldDoc {
                modulus: self
                    .field
                    .modulus()
                    .iter()
                    .map(|c| RationalDoc::Text(format_rational(c)))
                    .collect(),
            },
            lines: self
                .lines
                .iter()
                .map(|l| {
                    l.covector.clone().map(|c| {
                        ElemDoc::Coeffs(c.to_strings().into_iter().map(RationalDoc::Text).collect())
                    })
                })
                .collect(),
        }
    }

    pub fn from_document(doc: &ArrangementDoc) -> Result<Self, ArrangementError> {
        let modulus = doc
            .field
            .modulus
            .iter()
            .map(RationalDoc::to_rational)
            .collect::<Result<Vec<_>, _>>()?;
        let field = FieldSpec::new(modulus)?;
        let covectors = doc
            .lines
            .iter()
            .map(|cov| {
                let [a, b, c] = cov;
                Ok([a.to_elem(&field)?, b.to_elem(&field)?, c.to_elem(&field)?])
            })
            .collect::<Result<Vec<_>, ArrangementError>>()?;
        Self::from_covectors(&field, covectors)
    }

    pub fn from_json(text: &str) -> Result<Self, ArrangementError> {
        let doc: ArrangementDoc =
            serde_json::from_str(text).map_err(|e| ArrangementError::Document(e.to_string()))?;
        Self::from_document(&doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("document serializes")
    }
}

/// On-disk form: `{"field": {"modulus": [...]}, "lines": [[a, b, g], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrangementDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub field: FieldDoc,
    pub lines: Vec<[ElemDoc; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldDoc {
    pub modulus: Vec<RationalDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalDoc {
    Int(i64),
    Text(String),
}

impl RationalDoc {
    pub fn to_rational(&self) -> Result<Rational, FieldError> {
        match self {
            RationalDoc::Int(n) => Ok(crate::exactfield::rat(*n)),
            RationalDoc::Text(s) => parse_rational(s),
        }
    }
}

/// A field element as its coefficient list, or a bare rational.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElemDoc {
    Coeffs(Vec<RationalDoc>),
    Scalar(RationalDoc),
}

impl ElemDoc {
    pub fn to_elem(&self, field: &FieldSpec) -> Result<FieldElem, FieldError> {
        match self {
            ElemDoc::Scalar(q) => Ok(field.from_rational(q.to_rational()?)),
            ElemDoc::Coeffs(cs) => {
                let qs = cs
                    .iter()
                    .map(RationalDoc::to_rational)
                    .collect::<Result<Vec<_>, _>>()?;
                field.elem(qs)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    #[test]
    fn proportional_lines_rejected() {
        let k = q();
        let err = Arrangement::from_int_covectors(&k, &[[1, 0, 0], [2, 0, 0]]).unwrap_err();
        assert_eq!(err, ArrangementError::DuplicateLine { first: 0, second: 1 });
        assert_eq!(
            Line::from_ints(&k, [0, 0, 0]).unwrap_err(),
            ArrangementError::ZeroCovector
        );
    }

    #[test]
    fn normalization_is_canonical() {
        let k = q();
        let a = Line::from_ints(&k, [0, 3, -6]).unwrap();
        let b = Line::from_ints(&k, [0, -1, 2]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "(0, 1, -2)");
    }

    #[test]
    fn two_generic_lines() {
        let k = q();
        let a = Arrangement::from_int_covectors(&k, &[[1, 0, 0], [0, 1, 0]]).unwrap();
        let lat = a.lattice();
        assert_eq!(lat.points.len(), 1);
        assert_eq!(lat.points[0].incident, vec![0, 1]);
        assert_eq!(lat.points[0].coords.to_string(), "(0:0:1)");
    }

    #[test]
    fn pencil() {
        let k = q();
        let a = Arrangement::from_int_covectors(&k, &[[1, 0, 0], [0, 1, 0], [1, 1, 0], [1, -1, 0]]).unwrap();
        let wc = a.weak_combinatorics();
        assert_eq!(wc.n, BTreeMap::from([(4, 1)]));
        assert_eq!(wc.m, 4);
        for l in a.lines() {
            assert_eq!(a.incidence_count(l), 1);
        }
    }

    #[test]
    fn incidence_count_outside_line() {
        let k = q();
        let a = Arrangement::from_int_covectors(&k, &[[1, 0, 0], [0, 1, 0], [0, 0, 1]]).unwrap();
        // x + y passes through (0:0:1), meets z = 0 elsewhere
        assert_eq!(a.incidence_count(&Line::from_ints(&k, [1, 1, 0]).unwrap()), 2);
        assert_eq!(a.incidence_count(&Line::from_ints(&k, [1, 1, 1]).unwrap()), 3);
    }

    #[test]
    fn add_delete_round_trip() {
        let k = q();
        let a = Arrangement::from_int_covectors(&k, &[[1, 0, 0], [0, 1, 0], [0, 0, 1]]).unwrap();
        let l = Line::from_ints(&k, [1, 1, 1]).unwrap();
        let b = a.modify(Edit::Add(l.clone())).unwrap();
        assert_eq!(b.d(), 4);
        assert!(b.add(l.clone()).is_err());
        let c = b.modify(Edit::Delete(l.clone())).unwrap();
        assert_eq!(c, a);
        assert!(a.delete(&l).is_err());
    }

    #[test]
    fn document_round_trip() {
        let k = FieldSpec::from_integer_modulus(&[1, -1, 1]).unwrap();
        let e = k.generator();
        let a = Arrangement::from_covectors(
            &k,
            vec![
                [k.one(), k.zero(), k.zero()],
                [k.one(), e.clone(), k.zero()],
                [k.zero(), k.one(), -&e],
            ],
        )
        .unwrap();
        let text = a.to_json();
        assert_eq!(Arrangement::from_json(&text).unwrap(), a);
        let hand = r#"{"field": {"modulus": [1, -1, 1]},
                       "lines": [[1, 0, 0], [[1, 0], [0, 1], 0], [0, 1, ["0", "-1"]]]}"#;
        assert_eq!(Arrangement::from_json(hand).unwrap(), a);
        assert!(Arrangement::from_json(r#"{"field": {"modulus": [1]}, "lines": []}"#).is_err());
        assert!(Arrangement::from_json(r#"{"field": {"modulus": [0, 1]}, "lines": [["1/0", 0, 0]]}"#).is_err());
    }
}
