use std::collections::BTreeSet;

use freelines::arrangement::Line;
use freelines::combinatorics::tjurina;
use freelines::gallery::{self, GalleryEntry};
use freelines::syzygy::{classify_resolution, Classification, ProfileOptions};

fn check_entry(e: &GalleryEntry) {
    let x = &e.expected;
    let a = &e.arrangement;
    assert_eq!(a.d(), x.d, "{} d", e.name);
    let wc = a.weak_combinatorics();
    if !x.n.is_empty() {
        assert_eq!(wc.n, x.n, "{} n-vector", e.name);
    }
    if let Some(m) = x.m {
        assert_eq!(wc.m, m, "{} m", e.name);
    }
    if let Some(tau) = x.tau {
        assert_eq!(tjurina(&wc), tau, "{} τ", e.name);
    }
    let opts = ProfileOptions {
        defect: x.nu.is_some(),
        ..ProfileOptions::default()
    };
    let p = classify_resolution(a, opts).unwrap_or_else(|err| panic!("{}: {err}", e.name));
    if let Some(mdr) = x.mdr {
        assert_eq!(p.mdr, mdr, "{} mdr", e.name);
    }
    if let Some(c) = x.classification {
        assert_eq!(p.classification, c, "{} classification", e.name);
    }
    if let Some(ex) = &x.exponents {
        assert_eq!(&p.degrees, ex, "{} exponents", e.name);
    }
    if let Some(nu) = x.nu {
        assert_eq!(p.defect.as_ref().map(|d| d.nu), Some(nu), "{} ν", e.name);
    }
}

#[test]
fn every_entry_reproduces_its_record() {
    for e in gallery::list() {
        check_entry(&e);
    }
}

#[test]
fn ladder_types() {
    let types: Vec<i64> = ["A7", "A8", "A9", "A10", "A11", "A12", "A13"]
        .iter()
        .map(|n| {
            classify_resolution(&gallery::build(n).unwrap(), ProfileOptions::without_defect())
                .unwrap()
                .type_t
        })
        .collect();
    assert_eq!(types, vec![0, 1, 2, 2, 2, 1, 0]);
}

fn line_set(e: &GalleryEntry) -> BTreeSet<Line> {
    e.arrangement.lines().iter().cloned().collect()
}

fn with_labels(base: &GalleryEntry, from: &GalleryEntry, labels: &[&str]) -> BTreeSet<Line> {
    let mut s = line_set(base);
    for l in labels {
        let i = from.label_index(l).unwrap();
        assert!(s.insert(from.arrangement.line(i).clone()), "{l} already present");
    }
    s
}

#[test]
fn a13_is_b11_plus_l4_l8() {
    let a13 = gallery::entry_by_name("A13").unwrap();
    let b11 = gallery::entry_by_name("B11").unwrap();
    assert_eq!(with_labels(&b11, &a13, &["L4", "L8"]), line_set(&a13));
}

#[test]
fn c14_is_d12_plus_l4_l6() {
    let c14 = gallery::entry_by_name("C14").unwrap();
    let d12 = gallery::entry_by_name("D12").unwrap();
    assert_eq!(with_labels(&d12, &c14, &["L4", "L6"]), line_set(&c14));
    let cprime = gallery::entry_by_name("Cprime").unwrap();
    assert_eq!(with_labels(&d12, &c14, &["L4"]), line_set(&cprime));
}

#[test]
fn a13_worst_line_census() {
    let e = gallery::entry_by_name("A13").unwrap();
    let lat = e.arrangement.lattice();
    let quadruple = |label: &str| {
        let i = e.label_index(label).unwrap();
        lat.points_on(i).filter(|p| p.multiplicity() == 4).count()
    };
    assert_eq!(quadruple("L1"), 4);
    assert_eq!(quadruple("L2"), 4);
    assert_eq!(quadruple("L4"), 1);
    assert_eq!(quadruple("L8"), 1);
}

#[test]
fn monomial_family_in_closed_form() {
    for m in 3..=6usize {
        let a = gallery::build(&format!("monomial({m})")).unwrap();
        let wc = a.weak_combinatorics();
        if m == 3 {
            assert_eq!(wc.n(3), m * m + 3);
        } else {
            assert_eq!(wc.n(3), m * m);
            assert_eq!(wc.n(m), 3);
        }
        let mi = m as i64;
        assert_eq!(tjurina(&wc), 7 * mi * mi - 6 * mi + 3);
        let p = classify_resolution(&a, ProfileOptions::without_defect()).unwrap();
        assert_eq!(p.classification, Classification::Free);
        assert_eq!(p.degrees, vec![m + 1, 2 * m - 2]);
    }
}

#[test]
fn emitted_documents_round_trip() {
    for e in gallery::list() {
        let text = e.arrangement.to_json();
        let back = freelines::arrangement::Arrangement::from_json(&text).unwrap();
        assert!(back.same_lines(&e.arrangement), "{}", e.name);
    }
}
