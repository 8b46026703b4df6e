//! Invariants over the gallery and seeded random sub-arrangements of it.

use std::collections::{BTreeMap, BTreeSet};

use freelines::arrangement::{Arrangement, ProjPoint};
use freelines::combinatorics::{deletion_identity_check, tau_max, tjurina};
use freelines::gallery;
use freelines::syzygy::{certificate_from, classify_resolution, dis_bookkeeping, DimSource, ProfileOptions};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RANDOM_SAMPLES: usize = 200;

/// Intersection points from pairwise meets, with incident line sets.
/// Independent of the library's lattice construction.
fn brute_points(a: &Arrangement) -> BTreeMap<ProjPoint, BTreeSet<usize>> {
    let mut pts: BTreeMap<ProjPoint, BTreeSet<usize>> = BTreeMap::new();
    for i in 0..a.d() {
        for j in i + 1..a.d() {
            let p = a.line(i).meet(a.line(j)).expect("distinct lines meet in a point");
            let entry = pts.entry(p).or_default();
            entry.insert(i);
            entry.insert(j);
        }
    }
    pts
}

fn brute_tau(a: &Arrangement) -> i64 {
    brute_points(a)
        .values()
        .map(|s| (s.len() as i64 - 1).pow(2))
        .sum()
}

fn gallery_arrangements() -> Vec<(String, Arrangement)> {
    gallery::list().into_iter().map(|e| (e.name, e.arrangement)).collect()
}

fn random_subarrangements(n: usize, seed: u64) -> Vec<(String, Arrangement)> {
    let pool = gallery_arrangements();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|k| {
            let (name, a) = pool.choose(&mut rng).expect("nonempty gallery");
            let size = rng.gen_range(3..=a.d());
            let mut idx: Vec<usize> = (0..a.d()).collect();
            idx.shuffle(&mut rng);
            idx.truncate(size);
            idx.sort_unstable();
            (format!("{name}#{k}{idx:?}"), a.subset(&idx).expect("valid indices"))
        })
        .collect()
}

fn corpus() -> Vec<(String, Arrangement)> {
    let mut all = gallery_arrangements();
    all.extend(random_subarrangements(RANDOM_SAMPLES, 0x5eed));
    all
}

fn binom2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

#[test]
fn combinatorial_identities() {
    for (name, a) in corpus() {
        let d = a.d();
        let pts = brute_points(&a);
        let lat = a.lattice();
        assert_eq!(lat.points.len(), pts.len(), "{name}: point count");
        // each pair of lines meets exactly once
        let pairs: usize = lat.points.iter().map(|p| binom2(p.multiplicity())).sum();
        assert_eq!(pairs, binom2(d), "{name}: Σ C(r,2) n_r");
        // Bézout on each line: the other d-1 lines are distributed over its points
        for i in 0..d {
            let through: usize = lat.points_on(i).map(|p| p.multiplicity() - 1).sum();
            assert_eq!(through, d - 1, "{name}: line {i}");
        }
        assert_eq!(tjurina(&a.weak_combinatorics()), brute_tau(&a), "{name}: τ");
        for i in 0..d {
            let c = deletion_identity_check(&a, i).unwrap();
            assert!(c.ok, "{name}: deletion identity at {i}: {c:?}");
            let smaller = a.delete_index(i).unwrap();
            assert_eq!(brute_tau(&a) - brute_tau(&smaller), 2 * (d as i64 - 1) - c.r_l, "{name}: {i}");
        }
    }
}

#[test]
fn freeness_routes_tau_bound_and_milnor_stabilization() {
    for (name, a) in corpus() {
        let p = classify_resolution(&a, ProfileOptions::default()).unwrap_or_else(|e| panic!("{name}: {e}"));
        let d = a.d() as i64;
        let tau = brute_tau(&a);
        let tm = tau_max(d, p.mdr as i64).unwrap();
        assert!(tau <= tm, "{name}: τ {tau} > τ_max {tm}");
        let cert = certificate_from(&a, p.mdr as i64).unwrap();
        let nu = p.defect.as_ref().expect("defect requested").nu;
        let routes = (cert.free, p.s == 2, nu == 0);
        assert!(
            routes == (true, true, true) || routes == (false, false, false),
            "{name}: routes disagree {routes:?}"
        );
        let milnor = p.milnor_hilbert.as_ref().expect("defect requested");
        let top = 3 * (a.d() - 2);
        // pencils and other tiny cases stabilize only from 2d - 3 - mdr
        let from = (top - 2).max(2 * a.d() - 3 - p.mdr.min(2 * a.d() - 3));
        let from = if gallery::CATALOG.contains(&name.as_str()) { top - 2 } else { from };
        for k in from..=top {
            assert_eq!(milnor[k] as i64, tau, "{name}: dim M(f)_{k}");
        }
    }
}

#[test]
fn deletion_bookkeeping_in_low_degrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xb00c);
    for (name, a) in corpus() {
        if a.d() < 4 {
            continue;
        }
        let line = rng.gen_range(0..a.d());
        for k in 0..=8 {
            let b = dis_bookkeeping(&a, line, k, DimSource::Derivation).unwrap();
            assert!(b.ok, "{name}: line {line}: {b:?}");
        }
    }
}

#[test]
fn bookkeeping_with_jacobian_kernels_on_small_members() {
    for (name, a) in gallery_arrangements().into_iter().filter(|(_, a)| a.d() <= 9) {
        for line in 0..a.d() {
            for k in 0..=6 {
                let j = dis_bookkeeping(&a, line, k, DimSource::Jacobian).unwrap();
                let m = dis_bookkeeping(&a, line, k, DimSource::Derivation).unwrap();
                assert!(j.ok, "{name}: {j:?}");
                assert_eq!(
                    (j.dim_smaller, j.dim_larger),
                    (m.dim_smaller, m.dim_larger),
                    "{name}: Jacobian and derivation kernels disagree at k={k}"
                );
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn subsets_keep_lattice_identities(seed in any::<u64>()) {
        let (name, a) = random_subarrangements(1, seed).pop().unwrap();
        let lat = a.lattice();
        let pairs: usize = lat.points.iter().map(|p| binom2(p.multiplicity())).sum();
        prop_assert_eq!(pairs, binom2(a.d()), "{}", name);
        prop_assert_eq!(tjurina(&a.weak_combinatorics()), brute_tau(&a), "{}", name);
        let i = (seed as usize) % a.d();
        prop_assert!(deletion_identity_check(&a, i).unwrap().ok, "{}", name);
    }
}
