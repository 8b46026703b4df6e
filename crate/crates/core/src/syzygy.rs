//! Graded pieces of the module of Jacobian relations
//! `AR(f) = {(a, b, c) : a f_x + b f_y + c f_z = 0}`.
//!
//! Two linear models are used. The Jacobian model is the multiplication map
//! `S_k^3 → S_{k+d-1}`. The derivation model parametrizes derivations `θ` with
//! `θ(α_H) = 0` for the first line `H` by their two remaining components and
//! imposes `θ(α_i) ≡ 0` on every other line by evaluation at `k + 1` points.
//! Over a field of characteristic zero both kernels have the same dimension in
//! every degree; the second matrix is several times smaller.
//!
//! Exact answers come from elimination over the number field. Dimension
//! scans, generator degrees and the saturation defect run modulo a large prime
//! where `h` has a root; a modular kernel dimension is never smaller than the
//! exact one, which is what makes the hybrid minimal-degree search rigorous.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::arrangement::{Arrangement, ArrangementError};
use crate::combinatorics::{tau_max, tjurina, CombError};
use crate::exactfield::{FieldElem, FieldError, FieldSpec};
use crate::lift::lift_vector;
use crate::linalg::{echelon_mod, rank_mod, rref, Echelon, IncrementalBasis, ModMatrix, Scalars};
use crate::modp::{prime_sequence, PrimeField, Reduction};
use crate::polyring::{dim_s, graded_basis, HomPoly, Monomial, PolyError};

#[derive(Debug, Clone, Error)]
pub enum SyzygyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
    #[error(transparent)]
    Comb(#[from] CombError),
    #[error("need at least {0} lines")]
    TooSmall(usize),
    #[error("no relation found up to degree {0}")]
    NoRelation(usize),
    #[error("new generators still appear at the cap K = {}", .0.cap)]
    CapTooSmall(Box<ResolutionProfile>),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

/// Basis of `AR(f)_k` as triples `(a, b, c)`.
#[derive(Debug, Clone)]
pub struct GradedKernelBasis {
    pub degree: u32,
    pub basis: Vec<[HomPoly; 3]>,
}

impl GradedKernelBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

fn jacobian_rows_exact(f: &HomPoly, k: u32) -> Vec<Vec<FieldElem>> {
    let field = f.field();
    let d = f.degree();
    let jac = f.jacobian_triple();
    let basis_k = graded_basis(k);
    let sk = basis_k.len();
    let mut rows = vec![vec![field.zero(); 3 * sk]; dim_s((k + d - 1) as i64)];
    // column (v, μ) holds μ·f_v
    for (v, fv) in jac.iter().enumerate() {
        for (i, mu) in basis_k.iter().enumerate() {
            for (m, c) in fv.terms() {
                rows[mu.mul(m).index()][v * sk + i] = c.clone();
            }
        }
    }
    rows
}

fn jacobian_matrix_mod(jac: &[Vec<u64>; 3], d: u32, k: u32) -> ModMatrix {
    let basis_k = graded_basis(k);
    let basis_j = graded_basis(d - 1);
    let sk = basis_k.len();
    let mut m = ModMatrix::zeros(dim_s((k + d - 1) as i64), 3 * sk);
    for v in 0..3 {
        for (i, mu) in basis_k.iter().enumerate() {
            for (jdx, nu) in basis_j.iter().enumerate() {
                let c = jac[v][jdx];
                if c != 0 {
                    m.set(mu.mul(nu).index(), v * sk + i, c);
                }
            }
        }
    }
    m
}

fn check_f(f: &HomPoly) -> Result<(), SyzygyError> {
    if f.degree() < 1 {
        return Err(SyzygyError::TooSmall(1));
    }
    Ok(())
}

/// Exact kernel of `(a, b, c) ↦ a f_x + b f_y + c f_z` on `S_k^3`.
pub fn ar_dim(f: &HomPoly, k: u32) -> Result<GradedKernelBasis, SyzygyError> {
    check_f(f)?;
    let field = f.field();
    let sk = dim_s(k as i64);
    let rows = jacobian_rows_exact(f, k);
    let ech = rref(field, rows, 3 * sk)?;
    let basis_k = graded_basis(k);
    let basis = ech
        .kernel_basis(field)
        .into_iter()
        .map(|v| {
            let comp = |b: usize| {
                HomPoly::from_terms(
                    field,
                    k,
                    basis_k.iter().zip(&v[b * sk..(b + 1) * sk]).map(|(m, c)| (*m, c.clone())),
                )
            };
            Ok([comp(0)?, comp(1)?, comp(2)?])
        })
        .collect::<Result<Vec<_>, PolyError>>()?;
    Ok(GradedKernelBasis { degree: k, basis })
}

/// `a f_x + b f_y + c f_z`.
pub fn syzygy_residual(f: &HomPoly, t: &[HomPoly; 3]) -> Result<HomPoly, PolyError> {
    let jac = f.jacobian_triple();
    let mut acc = t[0].mul(&jac[0])?;
    acc = acc.add(&t[1].mul(&jac[1])?)?;
    acc.add(&t[2].mul(&jac[2])?)
}

/// `dim AR(f)_k` modulo the reduction, or `None` if `f` is not integral there.
pub fn ar_dim_mod(f: &HomPoly, k: u32, red: &Reduction) -> Option<usize> {
    let jac = f.jacobian_triple();
    let dense = [
        jac[0].to_dense_mod(red)?,
        jac[1].to_dense_mod(red)?,
        jac[2].to_dense_mod(red)?,
    ];
    let m = jacobian_matrix_mod(&dense, f.degree(), k);
    let ncols = m.ncols;
    Some(ncols - rank_mod(red.field(), m))
}

fn reductions_for<'a>(
    field: &'a FieldSpec,
    ok: impl Fn(&Reduction) -> bool + 'a,
) -> impl Iterator<Item = Reduction> + 'a {
    prime_sequence(field)
        .map(move |sp| Reduction::new(field, sp.field, sp.roots[0]))
        .filter(move |r| ok(r))
}

/// Minimal degree of a relation from the polynomial alone.
///
/// Degrees with zero modular kernel have zero exact kernel; the first degree
/// with a modular relation is confirmed exactly.
pub fn mdr_of_polynomial(f: &HomPoly) -> Result<u32, SyzygyError> {
    check_f(f)?;
    let d = f.degree();
    let red = reductions_for(f.field(), |r| f.to_dense_mod(r).is_some())
        .next()
        .expect("some prime reduces f");
    for k in 0..d {
        if ar_dim_mod(f, k, &red).expect("f reduces") == 0 {
            continue;
        }
        if ar_dim(f, k)?.dim() > 0 {
            return Ok(k);
        }
    }
    Err(SyzygyError::NoRelation(d as usize - 1))
}

/// Derivations vanishing on the first line, in the coordinates of their two
/// free components, over an arbitrary scalar field.
#[derive(Debug, Clone)]
pub struct DerivationModel<S: Scalars> {
    scalars: S,
    d: usize,
    /// Coordinate solved for by `θ(α_H) = 0`, and the two free coordinates.
    pivot: usize,
    free: [usize; 2],
    h: [S::Elem; 3],
    covectors: Vec<[S::Elem; 3]>,
    constraints: Vec<LineConstraint<S::Elem>>,
}

#[derive(Debug, Clone)]
struct LineConstraint<E> {
    u: E,
    w: E,
    p: [E; 3],
    q: [E; 3],
}

/// Two points spanning the line with normalized covector `a`.
fn spanning_points<S: Scalars>(s: &S, a: &[S::Elem; 3]) -> ([S::Elem; 3], [S::Elem; 3]) {
    let (z, o) = (s.zero(), s.one());
    if !s.is_zero(&a[0]) {
        (
            [s.neg(&a[1]), o.clone(), z.clone()],
            [s.neg(&a[2]), z, o],
        )
    } else if !s.is_zero(&a[1]) {
        ([o.clone(), z.clone(), z.clone()], [z, s.neg(&a[2]), o])
    } else {
        ([o.clone(), z.clone(), z.clone()], [z, o, s.zero()])
    }
}

impl<S: Scalars> DerivationModel<S> {
    /// `covectors` must be normalized (first nonzero entry 1) and distinct.
    pub fn new(scalars: S, covectors: Vec<[S::Elem; 3]>) -> Self {
        let s = &scalars;
        let h = covectors[0].clone();
        let pivot = (0..3).find(|&v| !s.is_zero(&h[v])).expect("nonzero covector");
        let free = match pivot {
            0 => [1, 2],
            1 => [0, 2],
            _ => [0, 1],
        };
        let constraints = covectors[1..]
            .iter()
            .map(|a| {
                // θ(α) = Σ_{l free} (α_l - α_pivot h_l) θ_l
                let u = s.sub(&a[free[0]], &s.mul(&a[pivot], &h[free[0]]));
                let w = s.sub(&a[free[1]], &s.mul(&a[pivot], &h[free[1]]));
                let (p, q) = spanning_points(s, a);
                LineConstraint { u, w, p, q }
            })
            .collect();
        DerivationModel {
            d: covectors.len(),
            scalars,
            pivot,
            free,
            h,
            covectors,
            constraints,
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn scalars(&self) -> &S {
        &self.scalars
    }

    fn power_table(&self, x: &S::Elem, k: u32) -> Vec<S::Elem> {
        let s = &self.scalars;
        let mut out = vec![s.one()];
        for _ in 0..k {
            let last = out.last().expect("nonempty").clone();
            out.push(s.mul(&last, x));
        }
        out
    }

    /// Evaluations of the degree-`k` basis at `pt`.
    fn monomial_values(&self, pt: &[S::Elem; 3], k: u32) -> Vec<S::Elem> {
        let s = &self.scalars;
        let pw: Vec<Vec<S::Elem>> = pt.iter().map(|c| self.power_table(c, k)).collect();
        graded_basis(k)
            .iter()
            .map(|m| {
                let [i, j, l] = m.exps.map(|e| e as usize);
                s.mul(&s.mul(&pw[0][i], &pw[1][j]), &pw[2][l])
            })
            .collect()
    }

    /// `(d-1)(k+1)` rows, `2 s_k` columns.
    pub fn constraint_rows(&self, k: u32) -> Vec<Vec<S::Elem>> {
        let s = &self.scalars;
        let sk = dim_s(k as i64);
        let mut rows = Vec::with_capacity(self.constraints.len() * (k as usize + 1));
        for c in &self.constraints {
            let mut t = s.zero();
            for _ in 0..=k {
                let pt = [0, 1, 2].map(|v| s.add(&c.p[v], &s.mul(&t, &c.q[v])));
                let vals = self.monomial_values(&pt, k);
                let mut row = Vec::with_capacity(2 * sk);
                row.extend(vals.iter().map(|x| s.mul(x, &c.u)));
                row.extend(vals.iter().map(|x| s.mul(x, &c.w)));
                rows.push(row);
                t = s.add(&t, &s.one());
            }
        }
        rows
    }

    /// Full derivation `(θ_x, θ_y, θ_z)` from free-coordinate coefficients.
    pub fn components(&self, v: &[S::Elem], k: u32) -> [Vec<S::Elem>; 3] {
        let s = &self.scalars;
        let sk = dim_s(k as i64);
        let (b, c) = (&v[..sk], &v[sk..2 * sk]);
        let mut out: [Vec<S::Elem>; 3] = [vec![], vec![], vec![]];
        out[self.free[0]] = b.to_vec();
        out[self.free[1]] = c.to_vec();
        out[self.pivot] = b
            .iter()
            .zip(c)
            .map(|(x, y)| {
                s.neg(&s.add(&s.mul(&self.h[self.free[0]], x), &s.mul(&self.h[self.free[1]], y)))
            })
            .collect();
        out
    }
}

impl DerivationModel<FieldSpec> {
    pub fn exact(a: &Arrangement) -> Self {
        DerivationModel::new(
            a.field().clone(),
            a.lines().iter().map(|l| l.covector().clone()).collect(),
        )
    }

    /// Exact `dim AR(f)_k`.
    pub fn dim(&self, k: u32) -> Result<usize, FieldError> {
        let sk = dim_s(k as i64);
        let e = rref(&self.scalars, self.constraint_rows(k), 2 * sk)?;
        Ok(e.nullity())
    }
}

impl DerivationModel<PrimeField> {
    /// `None` when the reduction is not integral or changes the lattice.
    pub fn modular(a: &Arrangement, red: &Reduction) -> Option<Self> {
        let covs: Vec<[u64; 3]> = a
            .lines()
            .iter()
            .map(|l| {
                let c = l.covector();
                Some([red.map(&c[0])?, red.map(&c[1])?, red.map(&c[2])?])
            })
            .collect::<Option<_>>()?;
        if !same_lattice_mod(a, &covs, red.field()) {
            return None;
        }
        Some(DerivationModel::new(*red.field(), covs))
    }

    pub fn matrix(&self, k: u32) -> ModMatrix {
        let sk = dim_s(k as i64);
        ModMatrix::from_rows(&self.constraint_rows(k), 2 * sk)
    }

    pub fn dim(&self, k: u32) -> usize {
        let m = self.matrix(k);
        m.ncols - rank_mod(&self.scalars, m)
    }

    pub fn kernel(&self, k: u32) -> Echelon<u64> {
        echelon_mod(&self.scalars, self.matrix(k), true)
    }

    /// Value of the defining polynomial at a point.
    fn f_at(&self, q: &[u64; 3]) -> u64 {
        let fp = &self.scalars;
        self.covectors.iter().fold(1, |acc, a| {
            let v = (0..3).fold(0, |s, i| fp.add(s, fp.mul(a[i], q[i])));
            fp.mul(acc, v)
        })
    }
}

/// Compares the incidence structure of the reduced lines with the exact one.
fn same_lattice_mod(a: &Arrangement, covs: &[[u64; 3]], fp: &PrimeField) -> bool {
    let normalize = |v: [u64; 3]| -> Option<[u64; 3]> {
        let lead = *v.iter().find(|&&x| x != 0)?;
        let inv = fp.inv(lead);
        Some(v.map(|x| fp.mul(x, inv)))
    };
    let cross = |a: &[u64; 3], b: &[u64; 3]| {
        [
            fp.sub(fp.mul(a[1], b[2]), fp.mul(a[2], b[1])),
            fp.sub(fp.mul(a[2], b[0]), fp.mul(a[0], b[2])),
            fp.sub(fp.mul(a[0], b[1]), fp.mul(a[1], b[0])),
        ]
    };
    let mut pts: BTreeMap<[u64; 3], Vec<usize>> = BTreeMap::new();
    for i in 0..covs.len() {
        for j in i + 1..covs.len() {
            let Some(p) = normalize(cross(&covs[i], &covs[j])) else {
                return false;
            };
            let e = pts.entry(p).or_default();
            e.push(i);
            e.push(j);
        }
    }
    let mut modular: Vec<Vec<usize>> = pts
        .into_values()
        .map(|mut v| {
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    modular.sort();
    let mut exact: Vec<Vec<usize>> = a.lattice().points.into_iter().map(|p| p.incident).collect();
    exact.sort();
    modular == exact
}

/// A reduction of the arrangement that preserves its lattice.
pub fn modular_model(a: &Arrangement) -> (Reduction, DerivationModel<PrimeField>) {
    prime_sequence(a.field())
        .find_map(|sp| {
            let red = Reduction::new(a.field(), sp.field, sp.roots[0]);
            DerivationModel::modular(a, &red).map(|m| (red, m))
        })
        .expect("all but finitely many primes preserve the lattice")
}

/// Minimal degree `d1` of a relation of the arrangement polynomial,
/// certified exactly.
pub fn mdr(a: &Arrangement) -> Result<u32, SyzygyError> {
    if a.d() < 2 {
        return Err(SyzygyError::TooSmall(2));
    }
    let (_, model) = modular_model(a);
    mdr_with(a, &model)
}

fn mdr_with(a: &Arrangement, model: &DerivationModel<PrimeField>) -> Result<u32, SyzygyError> {
    let exact = DerivationModel::exact(a);
    for k in 0..a.d() as u32 {
        if model.dim(k) == 0 {
            continue;
        }
        if kernel_witness(a, &exact, k).is_some() || exact.dim(k)? > 0 {
            return Ok(k);
        }
    }
    Err(SyzygyError::NoRelation(a.d() - 1))
}

/// Exact `dim AR(f)_k`. A kernel basis is lifted from completely split
/// primes and checked exactly; its size bounds the exact dimension from
/// below, and any good reduction bounds it from above. Falls back to exact
/// elimination when no lift is found.
pub fn ar_dim_certified(a: &Arrangement, k: u32) -> Result<usize, SyzygyError> {
    let (_, model) = modular_model(a);
    let upper = model.dim(k);
    if upper == 0 {
        return Ok(0);
    }
    let exact = DerivationModel::exact(a);
    let s = a.field();
    let rows = exact.constraint_rows(k);
    let width = 2 * dim_s(k as i64);
    let lifted = lift_vector(
        s,
        |red| {
            let m = DerivationModel::modular(a, red)?;
            let e = m.kernel(k);
            let basis = e.kernel_basis(red.field());
            (basis.len() == upper).then(|| (e.pivots, basis.concat()))
        },
        |v| {
            // RREF kernel vectors carry a unit at their own free column, so
            // the lifted ones are independent once each is a relation.
            v.chunks(width).all(|b| {
                rows.iter()
                    .all(|r| r.iter().zip(b).fold(s.zero(), |acc, (x, y)| &acc + &(x * y)).is_zero())
            })
        },
    );
    match lifted {
        Some(_) => Ok(upper),
        None => Ok(exact.dim(k)?),
    }
}

/// A nonzero exact element of `AR(f)_k` in free coordinates, lifted from
/// completely split primes and checked against the exact constraint rows.
pub fn kernel_witness(a: &Arrangement, exact: &DerivationModel<FieldSpec>, k: u32) -> Option<Vec<FieldElem>> {
    let s = a.field();
    let rows = exact.constraint_rows(k);
    lift_vector(
        s,
        |red| {
            let m = DerivationModel::modular(a, red)?;
            let e = m.kernel(k);
            let v = e.kernel_basis(red.field()).into_iter().next()?;
            Some((e.pivots, v))
        },
        |v| {
            v.iter().any(|x| !x.is_zero())
                && rows
                    .iter()
                    .all(|r| r.iter().zip(v).fold(s.zero(), |acc, (x, y)| &acc + &(x * y)).is_zero())
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum CapStatus {
    /// Two generators of degrees summing to `d - 1` with nonvanishing
    /// Saito determinant; the list is provably complete.
    SaitoCertified { degree: usize },
    /// No new generators appeared at the cap.
    CompleteToCap,
    /// New generators still appear at the cap.
    Incomplete,
}

#[derive(Debug, Clone, Serialize)]
pub struct GeneratorDegrees {
    pub degrees: Vec<usize>,
    pub cap: usize,
    pub status: CapStatus,
    /// `dim AR(f)_k` for every degree scanned.
    pub ar_dims: Vec<usize>,
    pub prime: u64,
}

/// `2d - 4`, but never below the Koszul degree `d - 1`.
pub fn default_cap(d: usize) -> usize {
    (2 * d).saturating_sub(4).max(d.saturating_sub(1))
}

pub fn certified_cap(d: usize) -> usize {
    3 * d.saturating_sub(2)
}

/// Degrees of a minimal generating set of `AR(f)`, scanning `k = 0..=cap`.
pub fn generator_degrees(a: &Arrangement, cap: usize) -> Result<GeneratorDegrees, SyzygyError> {
    if a.d() < 2 {
        return Err(SyzygyError::TooSmall(2));
    }
    let (red, model) = modular_model(a);
    Ok(generator_degrees_with(a, &model, red.field().p(), cap))
}

fn generator_degrees_with(
    a: &Arrangement,
    model: &DerivationModel<PrimeField>,
    prime: u64,
    cap: usize,
) -> GeneratorDegrees {
    let fp = *model.scalars();
    let mut gens: Vec<(u32, Vec<u64>)> = Vec::new();
    let mut ar_dims = Vec::new();
    let mut status = CapStatus::CompleteToCap;
    for k in 0..=cap as u32 {
        let ker = model.kernel(k);
        let dim = ker.nullity();
        ar_dims.push(dim);
        if dim == 0 {
            continue;
        }
        let free = ker.free_columns();
        let sk = dim_s(k as i64);
        let mut span = IncrementalBasis::new(fp, dim);
        'outer: for (e, g) in &gens {
            let basis_e = graded_basis(*e);
            let se = basis_e.len();
            for mu in graded_basis(k - e) {
                let mut v = vec![0u64; 2 * sk];
                for (i, nu) in basis_e.iter().enumerate() {
                    let idx = mu.mul(nu).index();
                    v[idx] = g[i];
                    v[sk + idx] = g[se + i];
                }
                span.insert(free.iter().map(|&c| v[c]).collect());
                if span.is_full() {
                    break 'outer;
                }
            }
        }
        let new = dim - span.rank();
        if new > 0 {
            let kernel = ker.kernel_basis(&fp);
            for (slot, vec) in kernel.into_iter().enumerate() {
                let mut unit = vec![0u64; dim];
                unit[slot] = 1;
                if span.insert(unit) {
                    gens.push((k, vec));
                }
            }
            if k as usize == cap {
                status = CapStatus::Incomplete;
            }
        }
        if gens.len() == 2 && gens[0].0 as usize + gens[1].0 as usize == a.d() - 1 {
            let (k1, k2) = (gens[0].0, gens[1].0);
            let t1 = model.components(&gens[0].1, k1);
            let t2 = model.components(&gens[1].1, k2);
            if saito_nonzero(model, (&t1, k1), (&t2, k2)) {
                status = CapStatus::SaitoCertified { degree: k as usize };
                break;
            }
        }
    }
    GeneratorDegrees {
        degrees: gens.iter().map(|(e, _)| *e as usize).collect(),
        cap,
        status,
        ar_dims,
        prime,
    }
}

fn eval_dense(fp: &PrimeField, coeffs: &[u64], k: u32, q: &[u64; 3]) -> u64 {
    graded_basis(k).iter().zip(coeffs).fold(0, |acc, (m, &c)| {
        if c == 0 {
            return acc;
        }
        let t = (0..3).fold(c, |t, v| fp.mul(t, fp.pow(q[v], m.exps[v] as u64)));
        fp.add(acc, t)
    })
}

/// `det[E; θ1; θ2]` at a point off the arrangement. The determinant is a
/// multiple of `f`, so one nonzero value shows it is a nonzero multiple.
fn saito_nonzero(
    model: &DerivationModel<PrimeField>,
    t1: (&[Vec<u64>; 3], u32),
    t2: (&[Vec<u64>; 3], u32),
) -> bool {
    let fp = model.scalars();
    let q = (1u64..)
        .map(|s| [1, s + 1, s * s + 3])
        .find(|q| model.f_at(q) != 0)
        .expect("finitely many lines");
    let r1: Vec<u64> = (0..3).map(|v| eval_dense(fp, &t1.0[v], t1.1, &q)).collect();
    let r2: Vec<u64> = (0..3).map(|v| eval_dense(fp, &t2.0[v], t2.1, &q)).collect();
    let m = [q.to_vec(), r1, r2];
    let det = (0..3).fold(0, |acc, i| {
        let term = fp.mul(m[0][i], fp.sub(
            fp.mul(m[1][(i + 1) % 3], m[2][(i + 2) % 3]),
            fp.mul(m[1][(i + 2) % 3], m[2][(i + 1) % 3]),
        ));
        fp.add(acc, term)
    });
    det != 0
}

/// `dim M(f)_k` from `dim AR(f)_{k-d+1}` via rank–nullity.
pub fn milnor_from_ar(d: usize, k: usize, mut ar: impl FnMut(usize) -> usize) -> usize {
    let k = k as i64;
    let j = k - d as i64 + 1;
    if j < 0 {
        return dim_s(k);
    }
    dim_s(k) + ar(j as usize) - 3 * dim_s(j)
}

/// Exact `dim M(f)_k = dim S_k - rank(S_{k-d+1}^3 → S_k)`.
pub fn milnor_hilbert(f: &HomPoly, k: u32) -> Result<usize, SyzygyError> {
    check_f(f)?;
    let d = f.degree() as usize;
    if (k as usize) < d - 1 {
        return Ok(dim_s(k as i64));
    }
    let j = k - (d as u32 - 1);
    let dim = ar_dim(f, j)?.dim();
    Ok(milnor_from_ar(d, k as usize, |_| dim))
}

/// Hilbert function of the Milnor algebra for `k = 0..=upto`, modulo `p`.
pub fn milnor_vector(a: &Arrangement, upto: usize) -> Vec<usize> {
    let (_, model) = modular_model(a);
    milnor_vector_with(&model, upto, &mut BTreeMap::new())
}

fn milnor_vector_with(
    model: &DerivationModel<PrimeField>,
    upto: usize,
    cache: &mut BTreeMap<usize, usize>,
) -> Vec<usize> {
    let d = model.d();
    (0..=upto)
        .map(|k| {
            milnor_from_ar(d, k, |j| *cache.entry(j).or_insert_with(|| model.dim(j as u32)))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Defect {
    pub nu: usize,
    /// `dim N(f)_k` for `k = 0..=3(d-2)`.
    pub n_vector: Vec<usize>,
    /// Degree at which the top-down saturation was started.
    pub start_degree: usize,
    /// Diagnostic only: `dim N_k = dim N_{T-k}` for all `k`.
    pub self_dual: bool,
}

/// Dense Jacobian `(f_x, f_y, f_z)` modulo `p`.
fn jacobian_mod(a: &Arrangement, red: &Reduction) -> [Vec<u64>; 3] {
    let jac = a.polynomial().jacobian_triple();
    jac.map(|p| p.to_dense_mod(red).expect("integral reduction"))
}

/// `rank` of `(J : m^{s-k})_k` complement, i.e. `dim S_k - dim (J_s : m^{s-k})_k`,
/// for `k = 0..s`.
fn saturation_codims(fp: &PrimeField, jac: &[Vec<u64>; 3], d: u32, s: u32) -> Vec<usize> {
    // rows μ·f_v span J_s
    let gen_deg = s - (d - 1);
    let basis_g = graded_basis(gen_deg);
    let basis_j = graded_basis(d - 1);
    let ncols = dim_s(s as i64);
    let mut gens = ModMatrix::zeros(3 * basis_g.len(), ncols);
    for v in 0..3 {
        for (i, mu) in basis_g.iter().enumerate() {
            let row = v * basis_g.len() + i;
            for (jdx, nu) in basis_j.iter().enumerate() {
                let c = jac[v][jdx];
                if c != 0 {
                    gens.set(row, mu.mul(nu).index(), c);
                }
            }
        }
    }
    let ech = echelon_mod(fp, gens, true);
    // rows of `proj` cut out J_s as their common kernel
    let mut proj: Vec<Vec<u64>> = ech.kernel_basis(fp);
    let mut codims = vec![0; s as usize + 1];
    codims[s as usize] = proj.len();
    for k in (0..s).rev() {
        if proj.is_empty() {
            break;
        }
        let basis_k = graded_basis(k);
        let shifted: Vec<[usize; 3]> = basis_k
            .iter()
            .map(|m| [0, 1, 2].map(|v| m.mul(&Monomial::var(v)).index()))
            .collect();
        let mut m = ModMatrix::zeros(3 * proj.len(), basis_k.len());
        for (r, row) in proj.iter().enumerate() {
            for v in 0..3 {
                let out = m.row_mut(3 * r + v);
                for (c, sh) in shifted.iter().enumerate() {
                    out[c] = row[sh[v]];
                }
            }
        }
        proj = echelon_mod(fp, m, false).rows;
        codims[k as usize] = proj.len();
    }
    codims
}

/// Saturation defect: `dim N(f)_k = dim M(f)_k - dim (S/I)_k` with `I` the
/// saturation of `J_f`, computed top-down from degree `3(d-2) + 1` and
/// confirmed by restarting one degree higher.
pub fn nu_defect(a: &Arrangement) -> Result<Defect, SyzygyError> {
    let (red, model) = modular_model(a);
    nu_defect_with(a, &red, &model, &mut BTreeMap::new())
}

fn nu_defect_with(
    a: &Arrangement,
    red: &Reduction,
    model: &DerivationModel<PrimeField>,
    cache: &mut BTreeMap<usize, usize>,
) -> Result<Defect, SyzygyError> {
    let d = a.d();
    if d < 3 {
        return Err(SyzygyError::TooSmall(3));
    }
    let t = 3 * (d - 2);
    let fp = red.field();
    let jac = jacobian_mod(a, red);
    let milnor = milnor_vector_with(model, t, cache);
    let limit = t + 4;
    let mut start = t + 1;
    let mut codims = saturation_codims(fp, &jac, d as u32, start as u32);
    loop {
        if start >= limit {
            return Err(SyzygyError::Invariant(format!(
                "saturation did not stabilize by degree {limit}"
            )));
        }
        let next = saturation_codims(fp, &jac, d as u32, start as u32 + 1);
        if codims[..=t] == next[..=t] {
            break;
        }
        start += 1;
        codims = next;
    }
    let mut n_vector = Vec::with_capacity(t + 1);
    for k in 0..=t {
        let n = milnor[k].checked_sub(codims[k]).ok_or_else(|| {
            SyzygyError::Invariant(format!("saturation larger than Jacobian ideal in degree {k}"))
        })?;
        n_vector.push(n);
    }
    let nu = n_vector.iter().copied().max().unwrap_or(0);
    let self_dual = (0..=t).all(|k| n_vector[k] == n_vector[t - k]);
    Ok(Defect {
        nu,
        n_vector,
        start_degree: start,
        self_dual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Classification {
    Free,
    NearlyFree,
    PlusOneGenerated,
    Syzygy { s: usize },
}

impl Classification {
    pub fn from_degrees(d: usize, degrees: &[usize]) -> Self {
        match degrees {
            [_, _] => Classification::Free,
            [d1, d2, d3] if d1 + d2 == d => {
                if d2 == d3 {
                    Classification::NearlyFree
                } else {
                    Classification::PlusOneGenerated
                }
            }
            _ => Classification::Syzygy { s: degrees.len() },
        }
    }

    /// Nearly free counts as plus-one generated.
    pub fn is_plus_one(&self) -> bool {
        matches!(self, Classification::NearlyFree | Classification::PlusOneGenerated)
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Classification::Free => write!(f, "free"),
            Classification::NearlyFree => write!(f, "nearly free"),
            Classification::PlusOneGenerated => write!(f, "plus-one generated"),
            Classification::Syzygy { s } => write!(f, "{s}-syzygy"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProfileOptions {
    pub cap: Option<usize>,
    pub certified: bool,
    pub defect: bool,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            cap: None,
            certified: false,
            defect: true,
        }
    }
}

impl ProfileOptions {
    pub fn without_defect() -> Self {
        ProfileOptions {
            defect: false,
            ..Self::default()
        }
    }

    pub fn cap_for(&self, d: usize) -> usize {
        match (self.cap, self.certified) {
            (Some(c), _) => c,
            (None, true) => certified_cap(d),
            (None, false) => default_cap(d),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolutionProfile {
    pub d: usize,
    pub mdr: usize,
    pub degrees: Vec<usize>,
    pub s: usize,
    pub classification: Classification,
    pub type_t: i64,
    pub tau: i64,
    pub cap: usize,
    pub cap_status: CapStatus,
    pub prime: u64,
    pub defect: Option<Defect>,
    pub milnor_hilbert: Option<Vec<usize>>,
}

impl ResolutionProfile {
    pub fn exponents_string(&self) -> String {
        let parts: Vec<String> = self.degrees.iter().map(|x| x.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

/// Assembles minimal degree, generator degrees, classification, type, `τ`,
/// and optionally the defect and Milnor Hilbert function.
pub fn classify_resolution(a: &Arrangement, opts: ProfileOptions) -> Result<ResolutionProfile, SyzygyError> {
    let d = a.d();
    if d < 2 {
        return Err(SyzygyError::TooSmall(2));
    }
    let (red, model) = modular_model(a);
    let d1 = mdr_with(a, &model)? as usize;
    let cap = opts.cap_for(d).max(d1);
    let gd = generator_degrees_with(a, &model, red.field().p(), cap);
    let tau = tjurina(&a.weak_combinatorics());
    let mut cache: BTreeMap<usize, usize> = gd.ar_dims.iter().copied().enumerate().collect();
    let (defect, milnor) = if opts.defect && d >= 3 {
        let defect = nu_defect_with(a, &red, &model, &mut cache)?;
        let milnor = milnor_vector_with(&model, 3 * (d - 2), &mut cache);
        (Some(defect), Some(milnor))
    } else {
        (None, None)
    };
    let degrees = gd.degrees.clone();
    if degrees.first() != Some(&d1) {
        return Err(SyzygyError::Invariant(format!(
            "exact minimal degree {d1} but modular generators start at {:?}",
            degrees.first()
        )));
    }
    let classification = Classification::from_degrees(d, &degrees);
    let type_t = if degrees.len() >= 2 {
        (degrees[0] + degrees[1]) as i64 - d as i64 + 1
    } else {
        0
    };
    let profile = ResolutionProfile {
        d,
        mdr: d1,
        s: degrees.len(),
        degrees,
        classification,
        type_t,
        tau,
        cap,
        cap_status: gd.status,
        prime: gd.prime,
        defect,
        milnor_hilbert: milnor,
    };
    if profile.classification == Classification::Free && profile.degrees[0] + profile.degrees[1] != d - 1 {
        return Err(SyzygyError::Invariant(format!(
            "two generators {} not summing to d - 1",
            profile.exponents_string()
        )));
    }
    if profile.cap_status == CapStatus::Incomplete {
        return Err(SyzygyError::CapTooSmall(Box::new(profile)));
    }
    Ok(profile)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FreenessCertificate {
    pub d: i64,
    pub d1: i64,
    pub tau: i64,
    pub tau_max: i64,
    pub free: bool,
    pub gap: i64,
}

/// `A` is free iff `τ = τ_max(d, mdr)`.
pub fn freeness_certificate(a: &Arrangement) -> Result<FreenessCertificate, SyzygyError> {
    let d1 = mdr(a)? as i64;
    certificate_from(a, d1)
}

pub fn certificate_from(a: &Arrangement, d1: i64) -> Result<FreenessCertificate, SyzygyError> {
    let d = a.d() as i64;
    let tau = tjurina(&a.weak_combinatorics());
    let tm = tau_max(d, d1)?;
    Ok(FreenessCertificate {
        d,
        d1,
        tau,
        tau_max: tm,
        free: tau == tm,
        gap: tm - tau,
    })
}

/// Which kernel computation a bookkeeping check uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimSource {
    /// Exact Jacobian kernel.
    Jacobian,
    /// Exact derivation-model kernel.
    Derivation,
}

fn exact_dim(a: &Arrangement, k: i64, source: DimSource) -> Result<usize, SyzygyError> {
    if k < 0 {
        return Ok(0);
    }
    match source {
        DimSource::Jacobian => Ok(ar_dim(&a.polynomial(), k as u32)?.dim()),
        DimSource::Derivation => ar_dim_certified(a, k as u32),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bookkeeping {
    pub k: i64,
    pub r: i64,
    pub dim_smaller: usize,
    pub dim_larger: usize,
    pub dim_r: usize,
    pub ok: bool,
}

/// For `B` and `L ∈ B` with `B' = B \ L`, `r = |L ∩ B'|`:
/// `dim D0(B')_{k-1} <= dim D0(B)_k <= dim D0(B')_{k-1} + dim R_{k+1-r}`.
pub fn dis_bookkeeping(
    b: &Arrangement,
    line: usize,
    k: i64,
    source: DimSource,
) -> Result<Bookkeeping, SyzygyError> {
    let smaller = b.delete_index(line)?;
    let r = b.incidence_count(b.line(line)) as i64;
    let dim_smaller = exact_dim(&smaller, k - 1, source)?;
    let dim_larger = exact_dim(b, k, source)?;
    let dim_r = (k + 2 - r).max(0) as usize;
    Ok(Bookkeeping {
        k,
        r,
        dim_smaller,
        dim_larger,
        dim_r,
        ok: dim_smaller <= dim_larger && dim_larger <= dim_smaller + dim_r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    fn arr(covs: &[[i64; 3]]) -> Arrangement {
        Arrangement::from_int_covectors(&q(), covs).unwrap()
    }

    #[test]
    fn pencil_has_degree_zero_relation() {
        let a = arr(&[[1, 0, 0], [0, 1, 0], [1, 1, 0], [1, -1, 0]]);
        let f = a.polynomial();
        let b = ar_dim(&f, 0).unwrap();
        assert_eq!(b.dim(), 1);
        let [x, y, z] = &b.basis[0];
        assert!(x.is_zero() && y.is_zero());
        assert_eq!(z.to_string(), "1");
        assert_eq!(mdr(&a).unwrap(), 0);
        assert_eq!(mdr_of_polynomial(&f).unwrap(), 0);
    }

    #[test]
    fn kernel_vectors_are_relations() {
        let a = arr(&[[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1], [1, 2, 3]]);
        let f = a.polynomial();
        for k in 0..5 {
            let b = ar_dim(&f, k).unwrap();
            for t in &b.basis {
                assert!(syzygy_residual(&f, t).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn two_lines_free_zero_one() {
        let a = arr(&[[1, 0, 0], [0, 1, 0]]);
        let p = classify_resolution(&a, ProfileOptions::default()).unwrap();
        assert_eq!(p.degrees, vec![0, 1]);
        assert_eq!(p.classification, Classification::Free);
    }

    #[test]
    fn generic_arrangement_dims_agree_across_models() {
        let a = arr(&[[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1], [1, 2, 3], [1, -1, 2]]);
        let f = a.polynomial();
        let exact = DerivationModel::exact(&a);
        let (red, model) = modular_model(&a);
        for k in 0..7 {
            let jac = ar_dim(&f, k).unwrap().dim();
            assert_eq!(exact.dim(k).unwrap(), jac, "k={k}");
            assert_eq!(model.dim(k), jac, "k={k}");
            assert_eq!(ar_dim_mod(&f, k, &red).unwrap(), jac, "k={k}");
        }
    }

    #[test]
    fn certified_dims_match_exact_elimination() {
        let k = FieldSpec::from_integer_modulus(&[1, 0, 1]).unwrap();
        let i = k.generator();
        let covs = [
            [k.one(), k.zero(), k.zero()],
            [k.zero(), k.one(), k.zero()],
            [k.zero(), k.zero(), k.one()],
            [k.one(), i.clone(), k.zero()],
            [k.one(), -i.clone(), k.zero()],
            [k.zero(), k.one(), i.clone()],
            [k.one(), k.one(), k.one()],
        ];
        let lines = covs.into_iter().map(|c| crate::arrangement::Line::new(c).unwrap()).collect();
        let a = Arrangement::new(&k, lines).unwrap();
        let exact = DerivationModel::exact(&a);
        for deg in 0..7 {
            assert_eq!(ar_dim_certified(&a, deg).unwrap(), exact.dim(deg).unwrap(), "k={deg}");
        }
    }

    #[test]
    fn generic_six_lines_profile() {
        let a = arr(&[[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1], [1, 2, 3], [1, -1, 2]]);
        let p = classify_resolution(&a, ProfileOptions::default()).unwrap();
        assert_eq!(p.mdr, 4);
        assert_eq!(p.tau, 15);
        let m = p.milnor_hilbert.as_ref().unwrap();
        let tail = &m[3 * 6 - 8..=3 * 6 - 6];
        assert!(tail.iter().all(|&x| x as i64 == p.tau));
    }

    #[test]
    fn near_pencil_is_free() {
        let a = arr(&[[1, 0, 0], [0, 1, 0], [1, 1, 0], [1, 2, 0], [0, 0, 1]]);
        let p = classify_resolution(&a, ProfileOptions::default()).unwrap();
        assert_eq!(p.degrees, vec![1, 3]);
        assert_eq!(p.classification, Classification::Free);
        assert_eq!(p.defect.unwrap().nu, 0);
        let c = freeness_certificate(&a).unwrap();
        assert!(c.free);
    }

    #[test]
    fn milnor_exact_matches_modular() {
        let a = arr(&[[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 0], [1, 0, 1]]);
        let f = a.polynomial();
        let v = milnor_vector(&a, 9);
        for k in 0..=9 {
            assert_eq!(milnor_hilbert(&f, k as u32).unwrap(), v[k]);
        }
        assert_eq!(milnor_hilbert(&f, 0).unwrap(), 1);
    }

    #[test]
    fn bookkeeping_degree_zero() {
        let a = arr(&[[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1], [1, 2, 3]]);
        for src in [DimSource::Jacobian, DimSource::Derivation] {
            let b = dis_bookkeeping(&a, 4, 0, src).unwrap();
            assert!(b.ok);
            assert_eq!(b.dim_larger, 0);
        }
    }
}
