//! Acceptance criteria for the `freelines` engine. Each criterion is a
//! check with a wall-clock budget; the `acceptance` test prints one line per
//! criterion and fails if any check or budget fails.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use freelines::arrangement::{Arrangement, Line, ProjPoint};
use freelines::combinatorics::{
    comb_sum_bound, deletion_identity_check, degree_bounds, divisional_freeness, min_feasible, tau_max, tjurina,
};
use freelines::gallery::{self, GalleryEntry};
use freelines::report::analyze;
use freelines::syzygy::{
    ar_dim, certificate_from, classify_resolution, dis_bookkeeping, Classification, DimSource, ProfileOptions,
    ResolutionProfile,
};
use freelines::theorems::{self, TheoremId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type CheckResult = Result<String, String>;

pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub budget: Duration,
    pub check: fn() -> CheckResult,
}

pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub elapsed: Duration,
    pub budget: Duration,
    pub detail: String,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} [{:>2}] {} ({:.1?} of {:?}): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed,
            self.budget,
            self.detail
        )
    }
}

pub fn run(c: &Criterion) -> Outcome {
    let start = Instant::now();
    let result = (c.check)();
    let elapsed = start.elapsed();
    let (ok, mut detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    let in_budget = elapsed <= c.budget;
    if ok && !in_budget {
        detail = format!("over budget; {detail}");
    }
    Outcome {
        id: c.id,
        title: c.title,
        passed: ok && in_budget,
        elapsed,
        budget: c.budget,
        detail,
    }
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn entry(name: &str) -> Result<GalleryEntry, String> {
    gallery::entry_by_name(name).map_err(err)
}

fn profile(a: &Arrangement, defect: bool) -> Result<ResolutionProfile, String> {
    let opts = ProfileOptions {
        defect,
        ..ProfileOptions::default()
    };
    classify_resolution(a, opts).map_err(err)
}

fn n_vector(a: &Arrangement) -> Vec<usize> {
    let wc = a.weak_combinatorics();
    (2..=wc.m).map(|r| wc.n(r)).collect()
}

fn witness_labels(e: &GalleryEntry) -> Vec<String> {
    divisional_freeness(&e.arrangement)
        .witnesses
        .iter()
        .map(|w| e.labels[w.line].clone())
        .collect()
}

fn expect_free(name: &str, p: &ResolutionProfile, exps: &[usize]) -> Result<(), String> {
    ensure!(
        p.classification == Classification::Free && p.degrees == exps,
        "{name}: {} {}, expected free {exps:?}",
        p.classification,
        p.exponents_string()
    );
    Ok(())
}

fn line_of(a: &Arrangement, c: [i64; 3]) -> Result<usize, String> {
    let l = Line::from_ints(a.field(), c).map_err(err)?;
    a.position(&l).ok_or_else(|| format!("{c:?} is not a line of the arrangement"))
}

fn criterion_a13() -> CheckResult {
    let e = entry("A13")?;
    let a = &e.arrangement;
    let wc = a.weak_combinatorics();
    ensure!(n_vector(a) == [9, 9, 7], "n-vector {:?}", n_vector(a));
    ensure!(wc.m == 4, "m = {}", wc.m);
    let tau = tjurina(&wc);
    ensure!(tau == 108 && tau_max(13, 6).map_err(err)? == 108, "τ = {tau}");
    let p = profile(a, true)?;
    ensure!(p.mdr == 6, "mdr = {}", p.mdr);
    expect_free("A13", &p, &[6, 6])?;
    let nu = p.defect.as_ref().map(|d| d.nu);
    ensure!(nu == Some(0), "ν = {nu:?}");
    let w = witness_labels(&e);
    ensure!(w.iter().any(|l| l == "L8"), "divisional witnesses {w:?}");
    Ok(format!("free (6,6), τ 108, ν 0, divisional witnesses {}", w.join(",")))
}

fn criterion_c14() -> CheckResult {
    let e = entry("C14")?;
    let a = &e.arrangement;
    ensure!(n_vector(a) == [13, 6, 10], "n-vector {:?}", n_vector(a));
    let tau = tjurina(&a.weak_combinatorics());
    ensure!(tau == 127 && tau_max(14, 6).map_err(err)? == 127, "τ = {tau}");
    expect_free("C14", &profile(a, false)?, &[6, 7])?;
    let w = witness_labels(&e);
    ensure!(w.iter().any(|l| l == "L6"), "divisional witnesses {w:?}");
    Ok(format!("free (6,7), τ 127, divisional witnesses {}", w.join(",")))
}

fn criterion_deletion_chain() -> CheckResult {
    let b11 = entry("B11")?;
    expect_free("B11", &profile(&b11.arrangement, false)?, &[4, 6])?;
    let b12 = entry("B12")?;
    expect_free("B12", &profile(&b12.arrangement, false)?, &[5, 6])?;
    let g = b12.arrangement.polynomial();
    let d4 = ar_dim(&g, 4).map_err(err)?.dim();
    let d5 = ar_dim(&g, 5).map_err(err)?.dim();
    ensure!((d4, d5) == (0, 1), "B12 dim D0(g)_4 = {d4}, dim D0(g)_5 = {d5}");
    let d12 = entry("D12")?;
    expect_free("D12", &profile(&d12.arrangement, false)?, &[4, 7])?;
    let cp = entry("Cprime")?;
    let p = profile(&cp.arrangement, false)?;
    ensure!(p.classification == Classification::Free && p.mdr == 5, "Cprime {} mdr {}", p.classification, p.mdr);
    Ok(format!("B11 (4,6), B12 (5,6) with dims 0,1 in degrees 4,5, D12 (4,7), Cprime free {}", p.exponents_string()))
}

fn criterion_ladder() -> CheckResult {
    let expected: [(&str, Classification, &[usize], usize); 5] = [
        ("A8", Classification::NearlyFree, &[4, 4, 4], 1),
        ("A9", Classification::Syzygy { s: 4 }, &[5, 5, 5, 5], 2),
        ("A10", Classification::Syzygy { s: 4 }, &[5, 6, 6, 6], 3),
        ("A11", Classification::Syzygy { s: 4 }, &[6, 6, 6, 6], 2),
        ("A12", Classification::NearlyFree, &[6, 6, 6], 1),
    ];
    let mut types = Vec::new();
    for name in ["A7", "A8", "A9", "A10", "A11", "A12", "A13"] {
        let p = profile(&entry(name)?.arrangement, true)?;
        if let Some((_, c, exps, nu)) = expected.iter().find(|x| x.0 == name) {
            ensure!(p.classification == *c && p.degrees == *exps, "{name}: {} {}", p.classification, p.exponents_string());
            let got = p.defect.as_ref().map(|d| d.nu);
            ensure!(got == Some(*nu), "{name}: ν = {got:?}, expected {nu}");
        }
        types.push(p.type_t);
    }
    ensure!(types == [0, 1, 2, 2, 2, 1, 0], "types {types:?}");
    Ok(format!("types {types:?}"))
}

fn criterion_monomial() -> CheckResult {
    let opts = ProfileOptions::without_defect();
    for m in 3..=6usize {
        let e = entry(&format!("monomial({m})"))?;
        let a = &e.arrangement;
        if m == 5 {
            ensure!(a.field().degree() == 4, "monomial(5) field degree {}", a.field().degree());
        }
        expect_free(&e.name, &profile(a, false)?, &[m + 1, 2 * m - 2])?;
        for i in 0..a.d() {
            let p = profile(&a.delete_index(i).map_err(err)?, false)?;
            ensure!(
                p.classification == Classification::NearlyFree && p.degrees == [m + 1, 2 * m - 2, 2 * m - 2],
                "{} minus line {i}: {} {}",
                e.name,
                p.classification,
                p.exponents_string()
            );
        }
        let pt = ProjPoint::from_ints(a.field(), [0, 0, 1]).map_err(err)?;
        let x0 = Line::from_ints(a.field(), [1, 0, 0]).map_err(err)?;
        let r = theorems::verify_addition_trichotomy(a, &e.name, &pt, &x0, &opts).map_err(err)?;
        ensure!(r.case == Some(2) && r.agreement, "{}: adding x = 0 gave {r:?}", e.name);
        let x2y = Line::from_ints(a.field(), [1, 2, 0]).map_err(err)?;
        let r = theorems::verify_addition_trichotomy(a, &e.name, &pt, &x2y, &opts).map_err(err)?;
        ensure!(r.case == Some(3) && r.agreement, "{}: adding x + 2y = 0 gave {r:?}", e.name);
        let pb = profile(&a.add(x2y).map_err(err)?, false)?;
        ensure!(pb.degrees == [m + 2, 2 * m - 1, 2 * m], "{}: B {}", e.name, pb.exponents_string());
    }
    Ok("m = 3..6: free, every deletion nearly free, additions in cases 2 and 3".into())
}

fn criterion_pentagram() -> CheckResult {
    let e = entry("pentagram")?;
    let a = &e.arrangement;
    ensure!(n_vector(a) == [10, 5, 5], "n-vector {:?}", n_vector(a));
    let tau = tjurina(&a.weak_combinatorics());
    ensure!(tau == 75 && tau_max(11, 5).map_err(err)? == 75, "τ = {tau}");
    let lat = a.lattice();
    for i in 0..a.d() {
        let r = lat.points_on(i).count();
        ensure!(r == 5, "line {i} carries {r} multiple points");
    }
    let reports = theorems::verify_corollary_cases(a, "pentagram", &ProfileOptions::without_defect()).map_err(err)?;
    for r in &reports {
        ensure!(r.case == Some(4) && r.agreement, "{r:?}");
    }
    let report = analyze(a, Some("pentagram"), &ProfileOptions::without_defect(), &[]).map_err(err)?;
    ensure!(report.profile.classification == Classification::Free, "not free");
    expect_free("pentagram", &report.profile, &[5, 5])?;
    ensure!(!report.divisional.divisionally_free, "root test found a witness");
    let s = report.summary();
    ensure!(s.contains("not divisionally free"), "summary {s:?}");
    Ok(s)
}

fn criterion_ex15() -> CheckResult {
    let a = gallery::build("ex15").map_err(err)?;
    let i = line_of(&a, [1, -2, 0])?;
    let reports = theorems::verify_deletion_trichotomy(&a, "ex15", &ProfileOptions::without_defect()).map_err(err)?;
    let r = reports.iter().find(|r| r.line == Some(i)).ok_or("no report for x - 2y")?;
    ensure!(r.case == Some(1) && r.r_l == Some(10) && r.agreement, "{r:?}");
    let p = profile(&a, false)?;
    ensure!(
        p.classification == Classification::NearlyFree && p.degrees == [6, 9, 9],
        "A: {} {}",
        p.classification,
        p.exponents_string()
    );
    Ok("x - 2y: case 1, r_L 10, A plus-one generated (6,9,9)".into())
}

fn criterion_bounds() -> CheckResult {
    let b42 = degree_bounds(4, 2);
    ensure!((b42.d_min, b42.d_max) == (13, 16), "(4,2) -> {b42:?}");
    let b41 = degree_bounds(4, 1);
    ensure!((b41.d_min, b41.d_max) == (11, 14), "(4,1) -> {b41:?}");
    let e3 = min_feasible(3);
    ensure!(e3.d_min == 15, "ε = 3 -> {e3:?}");
    let c = comb_sum_bound(&gallery::build("A13").map_err(err)?.weak_combinatorics());
    ensure!(c.lhs == 48 && c.bound == 48 && c.sharp, "A13 {c:?}");
    Ok("(13,16), (11,14), d >= 15, 48 = 48".into())
}

/// Intersection points from pairwise meets, independent of the lattice code.
fn brute_tau(a: &Arrangement) -> i64 {
    let mut pts: BTreeMap<ProjPoint, BTreeSet<usize>> = BTreeMap::new();
    for i in 0..a.d() {
        for j in i + 1..a.d() {
            if let Some(p) = a.line(i).meet(a.line(j)) {
                let s = pts.entry(p).or_default();
                s.insert(i);
                s.insert(j);
            }
        }
    }
    pts.values().map(|s| (s.len() as i64 - 1).pow(2)).sum()
}

fn property_corpus() -> Vec<(String, Arrangement, bool)> {
    let pool: Vec<(String, Arrangement)> = gallery::list().into_iter().map(|e| (e.name, e.arrangement)).collect();
    let mut out: Vec<(String, Arrangement, bool)> = pool.iter().map(|(n, a)| (n.clone(), a.clone(), true)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    for k in 0..200 {
        let (name, a) = pool.choose(&mut rng).expect("nonempty gallery");
        let mut idx: Vec<usize> = (0..a.d()).collect();
        idx.shuffle(&mut rng);
        idx.truncate(rng.gen_range(3..=a.d()));
        idx.sort_unstable();
        out.push((format!("{name}#{k}"), a.subset(&idx).expect("valid indices"), false));
    }
    out
}

fn property_violations(name: &str, a: &Arrangement, in_gallery: bool, rng: &mut ChaCha8Rng) -> Result<Vec<String>, String> {
    let mut bad = Vec::new();
    let d = a.d();
    let lat = a.lattice();
    let pairs: usize = lat.points.iter().map(|p| p.multiplicity() * (p.multiplicity() - 1) / 2).sum();
    if pairs != d * (d - 1) / 2 {
        bad.push(format!("{name}: Σ C(r,2) n_r = {pairs}"));
    }
    for i in 0..d {
        let through: usize = lat.points_on(i).map(|p| p.multiplicity() - 1).sum();
        if through != d - 1 {
            bad.push(format!("{name}: Bézout on line {i}"));
        }
        if !deletion_identity_check(a, i).map_err(err)?.ok {
            bad.push(format!("{name}: deletion identity at {i}"));
        }
    }
    let tau = brute_tau(a);
    if tau != tjurina(&a.weak_combinatorics()) {
        bad.push(format!("{name}: τ differs from pairwise count"));
    }
    let p = profile(a, true)?;
    if tau > tau_max(d as i64, p.mdr as i64).map_err(err)? {
        bad.push(format!("{name}: τ above τ_max(d, mdr)"));
    }
    let cert = certificate_from(a, p.mdr as i64).map_err(err)?.free;
    let nu0 = p.defect.as_ref().is_some_and(|x| x.nu == 0);
    if !(cert == (p.s == 2) && cert == nu0) {
        bad.push(format!("{name}: freeness routes {cert}, {}, {nu0}", p.s == 2));
    }
    let milnor = p.milnor_hilbert.as_ref().ok_or("no Milnor vector")?;
    let top = 3 * (d - 2);
    let from = if in_gallery { top - 2 } else { (top - 2).max((2 * d - 3).saturating_sub(p.mdr)) };
    for k in from..=top {
        if milnor[k] as i64 != tau {
            bad.push(format!("{name}: dim M(f)_{k} = {}", milnor[k]));
        }
    }
    if d >= 4 {
        let line = rng.gen_range(0..d);
        for k in 0..=8 {
            if !dis_bookkeeping(a, line, k, DimSource::Derivation).map_err(err)?.ok {
                bad.push(format!("{name}: bookkeeping at line {line}, k = {k}"));
            }
        }
    }
    Ok(bad)
}

fn criterion_properties() -> CheckResult {
    let corpus = property_corpus();
    let mut rng = ChaCha8Rng::seed_from_u64(0xb00c);
    let mut bad = Vec::new();
    for (name, a, in_gallery) in &corpus {
        bad.extend(property_violations(name, a, *in_gallery, &mut rng)?);
    }
    ensure!(bad.is_empty(), "{} violations, first: {}", bad.len(), bad[0]);
    Ok(format!("{} arrangements, zero violations", corpus.len()))
}

fn criterion_verifiers() -> CheckResult {
    let opts = ProfileOptions::without_defect();
    let ids = [TheoremId::Thm02, TheoremId::Thm03, TheoremId::ThmAe1, TheoremId::CorAe1, TheoremId::Prop00];
    let mut satisfied = 0;
    let mut bad = Vec::new();
    for e in gallery::list() {
        for t in ids {
            for r in theorems::verify_entry(t, &e, &opts).map_err(err)? {
                satisfied += usize::from(r.hypothesis);
                if r.is_disagreement() {
                    bad.push(format!("{t} {} line {}", e.name, r.line.map_or("-".into(), |l| format!("L{}", l + 1))));
                }
            }
        }
    }
    ensure!(
        bad.is_empty(),
        "{} of {satisfied} hypothesis-satisfied reports disagree: {}",
        bad.len(),
        bad.join(", ")
    );
    Ok(format!("{satisfied} hypothesis-satisfied reports, all in agreement"))
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, title: "A13 end to end", budget: secs(60), check: criterion_a13 },
        Criterion { id: 2, title: "C14 end to end", budget: secs(90), check: criterion_c14 },
        Criterion { id: 3, title: "deletion chain B11, B12, D12, Cprime", budget: secs(60), check: criterion_deletion_chain },
        Criterion { id: 4, title: "A7 to A13 ladder with defect", budget: secs(10 * 60), check: criterion_ladder },
        Criterion { id: 5, title: "monomial family m = 3..6", budget: secs(5 * 60), check: criterion_monomial },
        Criterion { id: 6, title: "pentagram", budget: secs(60), check: criterion_pentagram },
        Criterion { id: 7, title: "ex15 deletion of x - 2y", budget: secs(120), check: criterion_ex15 },
        Criterion { id: 8, title: "degree bounds", budget: secs(1), check: criterion_bounds },
        Criterion { id: 9, title: "property suites", budget: secs(15 * 60), check: criterion_properties },
        Criterion { id: 10, title: "verifier gate over the gallery", budget: secs(15 * 60), check: criterion_verifiers },
    ]
}
