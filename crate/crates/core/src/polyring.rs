//! Homogeneous polynomials in `x, y, z`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed};
use thiserror::Error;

use crate::exactfield::{format_rational, FieldElem, FieldError, FieldSpec};
use crate::modp::Reduction;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: u32, right: u32 },
    #[error("monomial of degree {found} in a polynomial of degree {expected}")]
    WrongMonomialDegree { expected: u32, found: u32 },
    #[error("empty product")]
    EmptyProduct,
}

/// `x^i y^j z^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub exps: [u32; 3],
}

/// Number of monomials of degree `k`.
pub fn dim_s(k: i64) -> usize {
    if k < 0 {
        0
    } else {
        let k = k as usize;
        (k + 1) * (k + 2) / 2
    }
}

impl Monomial {
    pub fn new(i: u32, j: u32, k: u32) -> Self {
        Monomial { exps: [i, j, k] }
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    /// Position in [`graded_basis`] of its degree.
    pub fn index(&self) -> usize {
        let n = self.degree() as usize;
        let [i, j, _] = self.exps.map(|e| e as usize);
        (n - i) * (n - i + 1) / 2 + (n - i - j)
    }

    pub fn from_index(degree: u32, index: usize) -> Self {
        let n = degree as usize;
        // t = n - i is the largest t with t(t+1)/2 <= index
        let mut t = 0;
        while (t + 1) * (t + 2) / 2 <= index {
            t += 1;
        }
        let rest = index - t * (t + 1) / 2;
        let i = n - t;
        let j = n - i - rest;
        Monomial::new(i as u32, j as u32, (n - i - j) as u32)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: [
                self.exps[0] + other.exps[0],
                self.exps[1] + other.exps[1],
                self.exps[2] + other.exps[2],
            ],
        }
    }

    pub fn var(v: usize) -> Self {
        let mut exps = [0; 3];
        exps[v] = 1;
        Monomial { exps }
    }
}

/// Graded lexicographic with `x > y > z`.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 0 {
            return write!(f, "1");
        }
        let mut first = true;
        for (v, &e) in ["x", "y", "z"].iter().zip(&self.exps) {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// All monomials of degree `k`, leading monomial `x^k` first.
pub fn graded_basis(k: u32) -> Vec<Monomial> {
    let mut out = Vec::with_capacity(dim_s(k as i64));
    for i in (0..=k).rev() {
        for j in (0..=k - i).rev() {
            out.push(Monomial::new(i, j, k - i - j));
        }
    }
    out
}

#[derive(Clone, PartialEq, Eq)]
pub struct HomPoly {
    field: FieldSpec,
    degree: u32,
    terms: BTreeMap<Monomial, FieldElem>,
}

impl HomPoly {
    pub fn zero(field: &FieldSpec, degree: u32) -> Self {
        HomPoly {
            field: field.clone(),
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: FieldElem) -> Self {
        let mut p = HomPoly::zero(c.field(), 0);
        if !c.is_zero() {
            p.terms.insert(Monomial::new(0, 0, 0), c);
        }
        p
    }

    /// `a·x + b·y + c·z`.
    pub fn linear(covector: &[FieldElem; 3]) -> Result<Self, PolyError> {
        let field = covector[0].field().clone();
        Self::from_terms(
            &field,
            1,
            covector
                .iter()
                .enumerate()
                .map(|(v, c)| (Monomial::var(v), c.clone())),
        )
    }

    /// Sums repeated monomials and drops zero coefficients.
    pub fn from_terms<I>(field: &FieldSpec, degree: u32, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Monomial, FieldElem)>,
    {
        let mut out = HomPoly::zero(field, degree);
        for (m, c) in terms {
            if m.degree() != degree {
                return Err(PolyError::WrongMonomialDegree {
                    expected: degree,
                    found: m.degree(),
                });
            }
            if c.field() != field {
                return Err(FieldError::FieldMismatch.into());
            }
            out.add_term(m, c);
        }
        Ok(out)
    }

    fn add_term(&mut self, m: Monomial, c: FieldElem) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let s = &old + &c;
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, FieldElem> {
        &self.terms
    }

    pub fn coefficient(&self, m: &Monomial) -> FieldElem {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    fn compatible(&self, other: &HomPoly) -> Result<(), PolyError> {
        if self.field != other.field {
            return Err(FieldError::FieldMismatch.into());
        }
        if self.degree != other.degree {
            return Err(PolyError::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &HomPoly) -> Result<HomPoly, PolyError> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &HomPoly) -> Result<HomPoly, PolyError> {
        self.add(&other.scale(&-self.field.one()))
    }

    pub fn scale(&self, c: &FieldElem) -> HomPoly {
        let mut out = HomPoly::zero(&self.field, self.degree);
        if c.is_zero() {
            return out;
        }
        for (m, a) in &self.terms {
            out.terms.insert(*m, a * c);
        }
        out
    }

    pub fn mul_monomial(&self, mono: &Monomial) -> HomPoly {
        HomPoly {
            field: self.field.clone(),
            degree: self.degree + mono.degree(),
            terms: self.terms.iter().map(|(m, c)| (m.mul(mono), c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &HomPoly) -> Result<HomPoly, PolyError> {
        if self.field != other.field {
            return Err(FieldError::FieldMismatch.into());
        }
        let mut out = HomPoly::zero(&self.field, self.degree + other.degree);
        for (ma, a) in &self.terms {
            for (mb, b) in &other.terms {
                out.add_term(ma.mul(mb), a * b);
            }
        }
        Ok(out)
    }

    /// Exact product of a nonempty list over one field.
    pub fn product(ps: &[HomPoly]) -> Result<HomPoly, PolyError> {
        let (first, rest) = ps.split_first().ok_or(PolyError::EmptyProduct)?;
        rest.iter().try_fold(first.clone(), |acc, p| acc.mul(p))
    }

    /// Partial derivative in variable `v` (0, 1, 2 for x, y, z).
    pub fn derivative(&self, v: usize) -> HomPoly {
        let mut out = HomPoly::zero(&self.field, self.degree.saturating_sub(1));
        for (m, c) in &self.terms {
            let e = m.exps[v];
            if e == 0 {
                continue;
            }
            let mut exps = m.exps;
            exps[v] -= 1;
            out.add_term(Monomial { exps }, c * &self.field.from_int(e as i64));
        }
        out
    }

    /// `(f_x, f_y, f_z)`.
    pub fn jacobian_triple(&self) -> [HomPoly; 3] {
        [self.derivative(0), self.derivative(1), self.derivative(2)]
    }

    pub fn eval(&self, point: &[FieldElem; 3]) -> FieldElem {
        let mut acc = self.field.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for v in 0..3 {
                if m.exps[v] > 0 {
                    t = &t * &point[v].pow(m.exps[v]);
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Coefficients in [`graded_basis`] order.
    pub fn to_dense(&self) -> Vec<FieldElem> {
        let mut v = vec![self.field.zero(); dim_s(self.degree as i64)];
        for (m, c) in &self.terms {
            v[m.index()] = c.clone();
        }
        v
    }

    pub fn to_dense_mod(&self, red: &Reduction) -> Option<Vec<u64>> {
        let mut v = vec![0; dim_s(self.degree as i64)];
        for (m, c) in &self.terms {
            v[m.index()] = red.map(c)?;
        }
        Some(v)
    }
}

impl fmt::Debug for HomPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for HomPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms.iter().rev().enumerate() {
            let rational = c.as_rational();
            let negative = rational.is_some_and(|q| q.is_negative());
            match (n, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let is_const = m.degree() == 0;
            match rational {
                Some(q) => {
                    let a = q.abs();
                    if is_const || !a.is_one() {
                        write!(f, "{}", format_rational(&a))?;
                        if !is_const {
                            write!(f, "*")?;
                        }
                    }
                }
                None => {
                    write!(f, "({c})")?;
                    if !is_const {
                        write!(f, "*")?;
                    }
                }
            }
            if !is_const {
                write!(f, "{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    fn lin(k: &FieldSpec, a: i64, b: i64, c: i64) -> HomPoly {
        HomPoly::linear(&[k.from_int(a), k.from_int(b), k.from_int(c)]).unwrap()
    }

    #[test]
    fn basis_sizes_and_order() {
        assert_eq!(graded_basis(0), vec![Monomial::new(0, 0, 0)]);
        assert_eq!(
            graded_basis(1),
            vec![Monomial::new(1, 0, 0), Monomial::new(0, 1, 0), Monomial::new(0, 0, 1)]
        );
        assert_eq!(graded_basis(4).len(), 15);
        for k in 0..20 {
            let b = graded_basis(k);
            assert_eq!(b.len(), dim_s(k as i64));
            for (i, m) in b.iter().enumerate() {
                assert_eq!(m.index(), i);
                assert_eq!(Monomial::from_index(k, i), *m);
            }
            assert!(b.windows(2).all(|w| w[0] > w[1]));
        }
    }

    #[test]
    fn difference_of_squares() {
        let k = q();
        let p = HomPoly::product(&[lin(&k, 1, 1, 0), lin(&k, 1, -1, 0)]).unwrap();
        assert_eq!(p.to_string(), "x^2 - y^2");
        let [fx, fy, fz] = p.jacobian_triple();
        assert_eq!(fx.to_string(), "2*x");
        assert_eq!(fy.to_string(), "-2*y");
        assert!(fz.is_zero());
    }

    #[test]
    fn xyz_jacobian() {
        let k = q();
        let f = HomPoly::product(&[lin(&k, 1, 0, 0), lin(&k, 0, 1, 0), lin(&k, 0, 0, 1)]).unwrap();
        let [fx, fy, fz] = f.jacobian_triple();
        assert_eq!(
            (fx.to_string(), fy.to_string(), fz.to_string()),
            ("y*z".into(), "x*z".into(), "x*y".into())
        );
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = lin(&q(), 1, 0, 0);
        let e = FieldSpec::from_integer_modulus(&[1, -1, 1]).unwrap();
        let b = lin(&e, 1, 0, 0);
        assert!(matches!(
            HomPoly::product(&[a, b]),
            Err(PolyError::Field(FieldError::FieldMismatch))
        ));
        assert_eq!(HomPoly::product(&[]).unwrap_err(), PolyError::EmptyProduct);
    }

    fn euler_holds(f: &HomPoly) -> bool {
        let k = f.field();
        let [fx, fy, fz] = f.jacobian_triple();
        let lhs = f.scale(&k.from_int(f.degree() as i64));
        let x = Monomial::var(0);
        let y = Monomial::var(1);
        let z = Monomial::var(2);
        let rhs = fx
            .mul_monomial(&x)
            .add(&fy.mul_monomial(&y))
            .and_then(|s| s.add(&fz.mul_monomial(&z)))
            .unwrap();
        lhs == rhs
    }

    #[test]
    fn euler_on_extension_field() {
        let k = FieldSpec::from_integer_modulus(&[1, -1, 1]).unwrap();
        let e = k.generator();
        let l = HomPoly::linear(&[k.one(), e.clone(), e.pow(2)]).unwrap();
        let f = HomPoly::product(&[l, lin(&k, 1, 1, 1), lin(&k, 0, 1, -1)]).unwrap();
        assert!(euler_holds(&f));
    }

    fn small_poly(deg: u32) -> impl Strategy<Value = HomPoly> {
        proptest::collection::vec(-3i64..4, dim_s(deg as i64)).prop_map(move |cs| {
            let k = q();
            HomPoly::from_terms(
                &k,
                deg,
                graded_basis(deg).into_iter().zip(cs).map(|(m, c)| (m, k.from_int(c))),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn product_is_commutative_and_associative(
            a in small_poly(1), b in small_poly(2), c in small_poly(2)
        ) {
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(
                a.mul(&b).unwrap().mul(&c).unwrap(),
                a.mul(&b.mul(&c).unwrap()).unwrap()
            );
        }

        #[test]
        fn euler_for_products_of_linear_forms(
            covs in proptest::collection::vec((-4i64..5, -4i64..5, -4i64..5), 1..7)
        ) {
            let k = q();
            let forms: Vec<HomPoly> = covs
                .into_iter()
                .filter(|&(a, b, c)| (a, b, c) != (0, 0, 0))
                .map(|(a, b, c)| lin(&k, a, b, c))
                .collect();
            prop_assume!(!forms.is_empty());
            let f = HomPoly::product(&forms).unwrap();
            prop_assert_eq!(f.degree() as usize, forms.len());
            prop_assert!(euler_holds(&f));
        }
    }
}
