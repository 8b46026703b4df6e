//! Built-in arrangements with their known invariants.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::arrangement::{Arrangement, Line};
use crate::exactfield::{FieldElem, FieldSpec};
use crate::syzygy::Classification;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GalleryError {
    #[error("unknown gallery entry {0:?}")]
    Unknown(String),
}

/// Invariants an entry must reproduce; `None` or empty means not recorded.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Expected {
    pub d: usize,
    pub n: BTreeMap<usize, usize>,
    pub m: Option<usize>,
    pub mdr: Option<usize>,
    pub classification: Option<Classification>,
    pub exponents: Option<Vec<usize>>,
    pub tau: Option<i64>,
    pub nu: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct GalleryEntry {
    pub name: String,
    /// Defining polynomial as printed in the source, with its field relation.
    pub equation: String,
    pub arrangement: Arrangement,
    /// One label per line, `L1, L2, …` in factor order of the source.
    pub labels: Vec<String>,
    /// Lines outside the arrangement offered as addition candidates.
    pub extra_lines: Vec<Line>,
    pub expected: Expected,
}

impl GalleryEntry {
    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

pub const CATALOG: &[&str] = &[
    "A7",
    "A8",
    "A9",
    "A10",
    "A11",
    "A12",
    "A13",
    "B11",
    "B12",
    "C14",
    "Cprime",
    "D12",
    "monomial(3)",
    "monomial(4)",
    "monomial(5)",
    "monomial(6)",
    "full_monomial(3)",
    "full_monomial(4)",
    "full_monomial(5)",
    "ex15",
    "free55",
    "free56",
    "pentagram",
];

fn field(coeffs: &[i64]) -> FieldSpec {
    FieldSpec::from_integer_modulus(coeffs).expect("monic modulus")
}

/// `e^2 - e + 1`, a primitive sixth root of unity.
fn sixth_roots() -> FieldSpec {
    field(&[1, -1, 1])
}

/// A field containing a primitive `n`-th root of unity, and that root.
pub fn cyclotomic(n: u32) -> (FieldSpec, FieldElem) {
    match n {
        1 => {
            let k = FieldSpec::rationals();
            let one = k.one();
            (k, one)
        }
        2 => {
            let k = FieldSpec::rationals();
            let m = k.from_int(-1);
            (k, m)
        }
        3 => {
            let k = field(&[1, 1, 1]);
            let g = k.generator();
            (k, g)
        }
        4 => {
            let k = field(&[1, 0, 1]);
            let g = k.generator();
            (k, g)
        }
        5 => {
            let k = field(&[1, 1, 1, 1, 1]);
            let g = k.generator();
            (k, g)
        }
        6 => {
            let k = sixth_roots();
            let g = k.generator();
            (k, g)
        }
        _ => panic!("no built-in field for {n}-th roots of unity"),
    }
}

/// Covector from three integer polynomials in the field generator.
fn cov(k: &FieldSpec, entries: [&[i64]; 3]) -> Line {
    Line::new(entries.map(|p| k.from_int_poly(p))).expect("nonzero covector")
}

fn labelled(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("L{i}")).collect()
}

fn pick(lines: &[Line], labels: &[String], keep: impl Fn(usize) -> bool) -> (Vec<Line>, Vec<String>) {
    lines
        .iter()
        .zip(labels)
        .enumerate()
        .filter(|(i, _)| keep(*i))
        .map(|(_, (l, s))| (l.clone(), s.clone()))
        .unzip()
}

fn n_map(pairs: &[(usize, usize)]) -> BTreeMap<usize, usize> {
    pairs.iter().copied().collect()
}

fn a13_lines(k: &FieldSpec) -> Vec<Line> {
    vec![
        cov(k, [&[1], &[0], &[0]]),
        cov(k, [&[0], &[1], &[0]]),
        cov(k, [&[0], &[0], &[1]]),
        cov(k, [&[1], &[1], &[0]]),
        cov(k, [&[1], &[0], &[1]]),
        cov(k, [&[0], &[1], &[1]]),
        cov(k, [&[1], &[1], &[1]]),
        cov(k, [&[1], &[0, 0, 1], &[0]]),
        cov(k, [&[1], &[0], &[0, 1]]),
        cov(k, [&[0], &[0, 1], &[1]]),
        cov(k, [&[1], &[0, 1], &[0, 1]]),
        cov(k, [&[1], &[0, 1], &[1]]),
        cov(k, [&[1], &[0, 0, 1], &[0, 1]]),
    ]
}

fn c14_lines(k: &FieldSpec) -> Vec<Line> {
    vec![
        cov(k, [&[1], &[0], &[0]]),
        cov(k, [&[0], &[1], &[0]]),
        cov(k, [&[0], &[0], &[1]]),
        cov(k, [&[1], &[1], &[0]]),
        cov(k, [&[1], &[0], &[1]]),
        cov(k, [&[1], &[1, -1], &[0]]),
        cov(k, [&[1], &[0], &[-1, 1]]),
        cov(k, [&[0], &[1], &[-1, 1]]),
        cov(k, [&[1], &[2, -1], &[1]]),
        cov(k, [&[1], &[1], &[-1, 1]]),
        cov(k, [&[0], &[1], &[-2, 1]]),
        cov(k, [&[1], &[1, -1], &[1]]),
        cov(k, [&[1], &[2, -1], &[-1, 1]]),
        cov(k, [&[1], &[2, -1], &[0, 1]]),
    ]
}

const A13_EQ: &str = "xyz(x+y)(x+z)(y+z)(x+y+z)(x+e^2y)(x+ez)(ey+z)(x+ey+ez)(x+ey+z)(x+e^2y+ez), e^2-e+1=0";
const C14_EQ: &str = "xyz(x+y)(x+z)(x+(1-e)y)(x+(e-1)z)(y+(e-1)z)(x+(2-e)y+z)(x+y+(e-1)z)(y+(e-2)z)(x+(1-e)y+z)(x+(2-e)y+(e-1)z)(x+(2-e)y+ez), e^2-3e+3=0";

fn entry(
    name: &str,
    equation: String,
    k: &FieldSpec,
    lines: Vec<Line>,
    labels: Vec<String>,
    expected: Expected,
) -> GalleryEntry {
    let arrangement = Arrangement::new(k, lines).expect("gallery lines are distinct");
    debug_assert_eq!(arrangement.d(), expected.d);
    GalleryEntry {
        name: name.to_string(),
        equation,
        arrangement,
        labels,
        extra_lines: Vec::new(),
        expected,
    }
}

fn free(exps: [usize; 2]) -> (Option<Classification>, Option<Vec<usize>>) {
    (Some(Classification::Free), Some(exps.to_vec()))
}

fn a_chain(n: usize) -> GalleryEntry {
    let k = if n == 7 { FieldSpec::rationals() } else { sixth_roots() };
    let all = if n == 7 {
        [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 0], [1, 0, 1], [0, 1, 1], [1, 1, 1]]
            .iter()
            .map(|c| Line::from_ints(&k, *c).expect("nonzero"))
            .collect()
    } else {
        a13_lines(&k)
    };
    let (lines, labels) = pick(&all, &labelled(13), |i| i < n);
    let (classification, exponents, nu) = match n {
        7 => (Some(Classification::Free), Some(vec![3, 3]), Some(0)),
        8 => (Some(Classification::NearlyFree), Some(vec![4, 4, 4]), Some(1)),
        9 => (Some(Classification::Syzygy { s: 4 }), Some(vec![5, 5, 5, 5]), Some(2)),
        10 => (Some(Classification::Syzygy { s: 4 }), Some(vec![5, 6, 6, 6]), Some(3)),
        11 => (Some(Classification::Syzygy { s: 4 }), Some(vec![6, 6, 6, 6]), Some(2)),
        12 => (Some(Classification::NearlyFree), Some(vec![6, 6, 6]), Some(1)),
        _ => (Some(Classification::Free), Some(vec![6, 6]), Some(0)),
    };
    let mut expected = Expected {
        d: n,
        classification,
        exponents,
        nu,
        ..Default::default()
    };
    if n == 7 {
        expected.n = n_map(&[(2, 3), (3, 6)]);
        expected.m = Some(3);
        expected.tau = Some(27);
    }
    if n == 13 {
        expected.n = n_map(&[(2, 9), (3, 9), (4, 7)]);
        expected.m = Some(4);
        expected.mdr = Some(6);
        expected.tau = Some(108);
    }
    let equation = if n == 7 {
        "xyz(x+y)(x+z)(y+z)(x+y+z)".to_string()
    } else {
        format!("first {n} factors of {A13_EQ}")
    };
    entry(&format!("A{n}"), equation, &k, lines, labels, expected)
}

fn monomial(m: u32) -> GalleryEntry {
    let (k, z) = cyclotomic(m);
    let mut lines = Vec::new();
    for (a, b) in [(0, 1), (1, 2), (0, 2)] {
        for j in 0..m {
            let mut c = [k.zero(), k.zero(), k.zero()];
            c[a] = k.one();
            c[b] = -z.pow(j);
            lines.push(Line::new(c).expect("nonzero"));
        }
    }
    let mu = m as usize;
    let mut n = BTreeMap::new();
    *n.entry(3).or_insert(0) += mu * mu;
    *n.entry(mu).or_insert(0) += 3;
    let (classification, exponents) = free([mu + 1, 2 * mu - 2]);
    let expected = Expected {
        d: 3 * mu,
        n,
        m: Some(mu),
        classification,
        exponents,
        tau: Some(7 * (m as i64).pow(2) - 6 * m as i64 + 3),
        nu: Some(0),
        ..Default::default()
    };
    let d = lines.len();
    let extra = Line::from_ints(&k, [1, 2, 0]).expect("nonzero");
    let mut e = entry(
        &format!("monomial({m})"),
        format!("(x^{m}-y^{m})(y^{m}-z^{m})(x^{m}-z^{m})"),
        &k,
        lines,
        labelled(d),
        expected,
    );
    e.extra_lines.push(extra);
    e
}

fn full_monomial(m: u32) -> GalleryEntry {
    let n = m - 1;
    let (k, z) = cyclotomic(n);
    let mut lines = vec![Line::from_ints(&k, [1, 0, 0]).expect("nonzero")];
    for (a, b) in [(0, 1), (1, 2), (0, 2)] {
        for j in 0..n {
            let mut c = [k.zero(), k.zero(), k.zero()];
            c[a] = k.one();
            c[b] = -z.pow(j);
            lines.push(Line::new(c).expect("nonzero"));
        }
    }
    let mu = m as usize;
    let (classification, exponents) = free([mu, 2 * mu - 3]);
    let expected = Expected {
        d: 3 * mu - 2,
        m: Some(mu),
        mdr: Some(mu),
        classification,
        exponents,
        ..Default::default()
    };
    let d = lines.len();
    entry(
        &format!("full_monomial({m})"),
        format!("x(x^{n}-y^{n})(y^{n}-z^{n})(x^{n}-z^{n})"),
        &k,
        lines,
        labelled(d),
        expected,
    )
}

fn ex15() -> GalleryEntry {
    let k = field(&[1, 0, 1]);
    let i = [&[0, 1][..], &[0, -1][..]];
    let mut lines = vec![cov(&k, [&[0], &[1], &[0]]), cov(&k, [&[0], &[0], &[1]])];
    for (a, b) in [(0, 1), (1, 2), (0, 2)] {
        let roots: [&[i64]; 4] = [&[-1], &[1], i[1], i[0]];
        for r in roots {
            let mut c: [&[i64]; 3] = [&[0], &[0], &[0]];
            c[a] = &[1];
            c[b] = r;
            lines.push(cov(&k, c));
        }
    }
    lines.push(cov(&k, [&[1], &[-2], &[0]]));
    let expected = Expected {
        d: 15,
        m: Some(6),
        classification: Some(Classification::NearlyFree),
        exponents: Some(vec![6, 9, 9]),
        tau: Some(147),
        ..Default::default()
    };
    entry(
        "ex15",
        "yz(x^4-y^4)(y^4-z^4)(x^4-z^4)(x-2y), i^2+1=0".into(),
        &k,
        lines,
        labelled(15),
        expected,
    )
}

fn free55() -> GalleryEntry {
    let k = FieldSpec::rationals();
    let covs: [[i64; 3]; 11] = [
        [1, 0, 0],
        [0, 1, 0],
        [0, 0, 1],
        [1, 1, 0],
        [1, -1, 0],
        [1, 0, 1],
        [1, 0, -1],
        [0, 2, -1],
        [1, 2, -1],
        [1, -2, 1],
        [0, 1, -1],
    ];
    let lines = covs.iter().map(|c| Line::from_ints(&k, *c).expect("nonzero")).collect();
    let (classification, exponents) = free([5, 5]);
    let expected = Expected {
        d: 11,
        n: n_map(&[(2, 13), (3, 2), (4, 6)]),
        m: Some(4),
        classification,
        exponents,
        ..Default::default()
    };
    entry(
        "free55",
        "xyz(x+y)(x-y)(x+z)(x-z)(2y-z)(x+2y-z)(x-2y+z)(y-z)".into(),
        &k,
        lines,
        labelled(11),
        expected,
    )
}

fn free56() -> GalleryEntry {
    let k = sixth_roots();
    let lines = vec![
        cov(&k, [&[1], &[0], &[0]]),
        cov(&k, [&[0], &[1], &[0]]),
        cov(&k, [&[0], &[0], &[1]]),
        cov(&k, [&[1], &[1], &[0]]),
        cov(&k, [&[1], &[0, 1], &[0]]),
        cov(&k, [&[1], &[0], &[1]]),
        cov(&k, [&[1], &[0], &[0, 1]]),
        cov(&k, [&[0], &[1], &[0, -1]]),
        cov(&k, [&[1], &[0, 1], &[0, 0, -1]]),
        cov(&k, [&[1], &[0, 0, 1], &[1]]),
        cov(&k, [&[0], &[1], &[-1]]),
        cov(&k, [&[1], &[0, -1], &[0, 1]]),
    ];
    let (classification, exponents) = free([5, 6]);
    let expected = Expected {
        d: 12,
        n: n_map(&[(2, 9), (3, 7), (4, 6)]),
        m: Some(4),
        classification,
        exponents,
        ..Default::default()
    };
    entry(
        "free56",
        "xyz(x+y)(x+ey)(x+z)(x+ez)(y-ez)(x+ey-e^2z)(x+e^2y+z)(y-z)(x-ey+ez), e^2-e+1=0".into(),
        &k,
        lines,
        labelled(12),
        expected,
    )
}

fn pentagram() -> GalleryEntry {
    let k = field(&[-1, -1, 1]);
    let lines = vec![
        cov(&k, [&[1], &[0], &[0]]),
        cov(&k, [&[0], &[1], &[0]]),
        cov(&k, [&[0], &[0], &[1]]),
        cov(&k, [&[1], &[1], &[0]]),
        cov(&k, [&[1], &[1, 1], &[0]]),
        cov(&k, [&[1], &[0], &[1]]),
        cov(&k, [&[1], &[0], &[0, 1]]),
        cov(&k, [&[0], &[1], &[-1]]),
        cov(&k, [&[0], &[1], &[1, -1]]),
        cov(&k, [&[1], &[0, -1], &[1, 1]]),
        cov(&k, [&[1], &[0, -1], &[0, 1]]),
    ];
    let (classification, exponents) = free([5, 5]);
    let expected = Expected {
        d: 11,
        n: n_map(&[(2, 10), (3, 5), (4, 5)]),
        m: Some(4),
        classification,
        exponents,
        tau: Some(75),
        nu: Some(0),
        ..Default::default()
    };
    entry(
        "pentagram",
        "xyz(x+y)(x+(1+a)y)(x+z)(x+az)(y-z)(y+(1-a)z)(x-ay+(1+a)z)(x-ay+az), a^2-a-1=0".into(),
        &k,
        lines,
        labelled(11),
        expected,
    )
}

fn parse_param(name: &str, prefix: &str) -> Option<u32> {
    name.strip_prefix(prefix)?.strip_suffix(')')?.parse().ok()
}

pub fn entry_by_name(name: &str) -> Result<GalleryEntry, GalleryError> {
    let unknown = || GalleryError::Unknown(name.to_string());
    Ok(match name {
        "A7" | "A8" | "A9" | "A10" | "A11" | "A12" | "A13" => {
            a_chain(name[1..].parse().expect("digits"))
        }
        "B11" | "B12" => {
            let k = sixth_roots();
            let drop_l4 = name == "B11";
            let (lines, labels) = pick(&a13_lines(&k), &labelled(13), |i| i != 7 && (i != 3 || !drop_l4));
            let (classification, exponents) = if drop_l4 { free([4, 6]) } else { free([5, 6]) };
            let d = lines.len();
            let equation = if drop_l4 {
                "A13 without L4, L8".to_string()
            } else {
                "A13 without L8".to_string()
            };
            entry(
                name,
                format!("{equation}; {A13_EQ}"),
                &k,
                lines,
                labels,
                Expected {
                    d,
                    mdr: Some(if drop_l4 { 4 } else { 5 }),
                    classification,
                    exponents,
                    nu: Some(0),
                    ..Default::default()
                },
            )
        }
        "C14" | "Cprime" | "D12" => {
            let k = field(&[3, -3, 1]);
            let keep = |i: usize| match name {
                "C14" => true,
                "Cprime" => i != 5,
                _ => i != 3 && i != 5,
            };
            let (lines, labels) = pick(&c14_lines(&k), &labelled(14), keep);
            let d = lines.len();
            let mut expected = Expected {
                d,
                nu: Some(0),
                ..Default::default()
            };
            match name {
                "C14" => {
                    (expected.classification, expected.exponents) = free([6, 7]);
                    expected.n = n_map(&[(2, 13), (3, 6), (4, 10)]);
                    expected.m = Some(4);
                    expected.tau = Some(127);
                    expected.mdr = Some(6);
                }
                "Cprime" => {
                    (expected.classification, expected.exponents) = free([5, 7]);
                    expected.mdr = Some(5);
                }
                _ => {
                    (expected.classification, expected.exponents) = free([4, 7]);
                    expected.tau = Some(93);
                    expected.mdr = Some(4);
                }
            }
            let equation = match name {
                "C14" => C14_EQ.to_string(),
                "Cprime" => format!("C14 without L6; {C14_EQ}"),
                _ => format!("C14 without L4, L6; {C14_EQ}"),
            };
            entry(name, equation, &k, lines, labels, expected)
        }
        "ex15" => ex15(),
        "free55" => free55(),
        "free56" => free56(),
        "pentagram" => pentagram(),
        _ => {
            if let Some(m) = parse_param(name, "monomial(") {
                if !(3..=6).contains(&m) {
                    return Err(unknown());
                }
                monomial(m)
            } else if let Some(m) = parse_param(name, "full_monomial(") {
                if !(3..=7).contains(&m) {
                    return Err(unknown());
                }
                full_monomial(m)
            } else {
                return Err(unknown());
            }
        }
    })
}

pub fn build(name: &str) -> Result<Arrangement, GalleryError> {
    entry_by_name(name).map(|e| e.arrangement)
}

/// Every catalog entry, in catalog order.
pub fn list() -> Vec<GalleryEntry> {
    CATALOG
        .iter()
        .map(|n| entry_by_name(n).expect("catalog names resolve"))
        .collect()
}
