//! Exact arithmetic in `Q` and in simple extensions `Q[θ]/(h(θ))`.
//!
//! A [`FieldSpec`] is a cheap, shareable handle on a monic modulus `h`. Elements
//! are stored as `n` reduced rationals `c0 + c1·θ + … + c_{n-1}·θ^{n-1}`, so two
//! elements are equal exactly when their coefficient lists are identical.
//!
//! Irreducibility of `h` is never checked up front. An inversion that hits a
//! nonzero non-unit reports [`FieldError::ReducibleModulus`] instead.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus must be monic of degree at least 1")]
    InvalidModulus,
    #[error("division by zero")]
    DivisionByZero,
    #[error("modulus is reducible: {element} is a nonzero non-unit")]
    ReducibleModulus { element: String },
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("malformed rational {0:?}")]
    MalformedRational(String),
    #[error("element needs {expected} coefficients, found {found}")]
    WrongLength { expected: usize, found: usize },
}

/// Parses `"p/q"` (q > 0) or a decimal integer.
pub fn parse_rational(text: &str) -> Result<Rational, FieldError> {
    let bad = || FieldError::MalformedRational(text.to_string());
    let t = text.trim();
    match t.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if !q.is_positive() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => {
            let p: BigInt = t.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(p))
        }
    }
}

pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug)]
struct FieldData {
    /// `h_0, …, h_{n-1}, 1`.
    modulus: Vec<Rational>,
    /// `θ^{n+j}` reduced modulo `h`, for `j = 0 .. n-1`.
    high_powers: Vec<Vec<Rational>>,
}

/// Handle on `Q[θ]/(h)`; cloning is cheap.
#[derive(Clone)]
pub struct FieldSpec(Arc<FieldData>);

impl FieldSpec {
    /// Builds the field from the coefficients of `h`, constant term first.
    pub fn new(modulus: Vec<Rational>) -> Result<Self, FieldError> {
        if modulus.len() < 2 || !modulus.last().is_some_and(|c| c.is_one()) {
            return Err(FieldError::InvalidModulus);
        }
        let n = modulus.len() - 1;
        let mut high_powers = Vec::with_capacity(n);
        // θ^n = -(h_0 + … + h_{n-1} θ^{n-1})
        let mut current: Vec<Rational> = modulus[..n].iter().map(|c| -c).collect();
        for _ in 0..n {
            high_powers.push(current.clone());
            // multiply by θ and reduce the overflowing top coefficient
            let top = current[n - 1].clone();
            for i in (1..n).rev() {
                current[i] = current[i - 1].clone() - &top * &modulus[i];
            }
            current[0] = -(&top * &modulus[0]);
        }
        Ok(FieldSpec(Arc::new(FieldData {
            modulus,
            high_powers,
        })))
    }

    pub fn from_integer_modulus(coeffs: &[i64]) -> Result<Self, FieldError> {
        Self::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    /// Plain `Q`, encoded by `h = θ`.
    pub fn rationals() -> Self {
        Self::from_integer_modulus(&[0, 1]).expect("θ is monic")
    }

    pub fn degree(&self) -> usize {
        self.0.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[Rational] {
        &self.0.modulus
    }

    pub fn is_rational(&self) -> bool {
        self.degree() == 1
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem {
            field: self.clone(),
            coeffs: vec![Rational::zero(); self.degree()],
        }
    }

    pub fn one(&self) -> FieldElem {
        self.from_rational(Rational::one())
    }

    pub fn from_int(&self, n: i64) -> FieldElem {
        self.from_rational(rat(n))
    }

    pub fn from_rational(&self, q: Rational) -> FieldElem {
        let mut e = self.zero();
        e.coeffs[0] = q;
        e
    }

    /// The class of `θ`.
    pub fn generator(&self) -> FieldElem {
        self.reduce(vec![Rational::zero(), Rational::one()])
    }

    /// An element from exactly `n` coefficients.
    pub fn elem(&self, coeffs: Vec<Rational>) -> Result<FieldElem, FieldError> {
        if coeffs.len() != self.degree() {
            return Err(FieldError::WrongLength {
                expected: self.degree(),
                found: coeffs.len(),
            });
        }
        Ok(FieldElem {
            field: self.clone(),
            coeffs,
        })
    }

    /// Reduces an arbitrary-length coefficient list modulo `h`.
    pub fn reduce(&self, mut coeffs: Vec<Rational>) -> FieldElem {
        let n = self.degree();
        if coeffs.len() > 2 * n - 1 {
            // generic fallback: fold the top coefficient down repeatedly
            while coeffs.len() > n {
                let top = coeffs.pop().expect("len > n");
                let shift = coeffs.len() - n;
                for (i, h) in self.0.modulus[..n].iter().enumerate() {
                    coeffs[shift + i] -= &top * h;
                }
            }
        } else if coeffs.len() > n {
            let extra: Vec<Rational> = coeffs.drain(n..).collect();
            for (j, c) in extra.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (i, p) in self.0.high_powers[j].iter().enumerate() {
                    coeffs[i] += c * p;
                }
            }
        }
        coeffs.resize(n, Rational::zero());
        FieldElem {
            field: self.clone(),
            coeffs,
        }
    }

    /// Evaluates `Σ c_i θ^i` for integer coefficients.
    pub fn from_int_poly(&self, coeffs: &[i64]) -> FieldElem {
        self.reduce(coeffs.iter().map(|&c| rat(c)).collect())
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.modulus == other.0.modulus
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldSpec(")?;
        write_poly(f, &self.0.modulus, "θ")?;
        write!(f, ")")
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() && self.0.modulus[0].is_zero() {
            return write!(f, "Q");
        }
        write!(f, "Q[θ]/(")?;
        write_poly(f, &self.0.modulus, "θ")?;
        write!(f, ")")
    }
}

fn write_poly(f: &mut fmt::Formatter<'_>, coeffs: &[Rational], var: &str) -> fmt::Result {
    let mut first = true;
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let abs = c.abs();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { '-' } else { '+' })?;
        }
        first = false;
        let show_coeff = i == 0 || !abs.is_one();
        if show_coeff {
            write!(f, "{}", format_rational(&abs))?;
        }
        match i {
            0 => {}
            1 => write!(f, "{}{var}", if show_coeff { "*" } else { "" })?,
            _ => write!(f, "{}{var}^{i}", if show_coeff { "*" } else { "" })?,
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

/// An element of `Q[θ]/(h)` in canonical form.
#[derive(Clone)]
pub struct FieldElem {
    field: FieldSpec,
    coeffs: Vec<Rational>,
}

impl FieldElem {
    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The element as a rational, if it lies in `Q`.
    pub fn as_rational(&self) -> Option<&Rational> {
        self.coeffs[1..]
            .iter()
            .all(Zero::is_zero)
            .then_some(&self.coeffs[0])
    }

    fn check_same(&self, other: &FieldElem) -> Result<(), FieldError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch)
        }
    }

    pub fn try_add(&self, other: &FieldElem) -> Result<FieldElem, FieldError> {
        self.check_same(other)?;
        Ok(FieldElem {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &FieldElem) -> Result<FieldElem, FieldError> {
        self.check_same(other)?;
        Ok(FieldElem {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn try_mul(&self, other: &FieldElem) -> Result<FieldElem, FieldError> {
        self.check_same(other)?;
        let n = self.coeffs.len();
        if n == 1 {
            return Ok(FieldElem {
                field: self.field.clone(),
                coeffs: vec![&self.coeffs[0] * &other.coeffs[0]],
            });
        }
        let mut prod = vec![Rational::zero(); 2 * n - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        Ok(self.field.reduce(prod))
    }

    pub fn scale(&self, q: &Rational) -> FieldElem {
        FieldElem {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm on
    /// coefficient polynomials.
    pub fn inv(&self) -> Result<FieldElem, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Ok(self.field.from_rational(q.recip()));
        }
        let (g, s) = ext_gcd(trimmed(self.coeffs.clone()), self.field.modulus().to_vec());
        if g.len() != 1 {
            return Err(FieldError::ReducibleModulus {
                element: self.to_string(),
            });
        }
        let g0 = g[0].recip();
        Ok(self.field.reduce(s.into_iter().map(|c| c * &g0).collect()))
    }

    pub fn try_div(&self, other: &FieldElem) -> Result<FieldElem, FieldError> {
        self.check_same(other)?;
        self.try_mul(&other.inv()?)
    }

    pub fn pow(&self, mut e: u32) -> FieldElem {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Rough bit size, used as a pivoting heuristic.
    pub fn weight(&self) -> u64 {
        self.coeffs
            .iter()
            .map(|c| c.numer().bits() + c.denom().bits())
            .sum()
    }

    /// Coefficient encoding as strings, constant term first.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(format_rational).collect()
    }
}

fn trimmed(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn poly_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let b = trimmed(b.to_vec());
    let mut r = trimmed(a.to_vec());
    let db = b.len() - 1;
    let lead_inv = b[db].recip();
    if r.len() < b.len() {
        return (vec![Rational::zero()], r);
    }
    let mut q = vec![Rational::zero(); r.len() - db];
    while r.len() >= b.len() && !(r.len() == 1 && r[0].is_zero()) {
        let shift = r.len() - b.len();
        let c = r.last().expect("nonempty") * &lead_inv;
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] -= &c * bi;
        }
        q[shift] = c;
        r.pop();
        r = trimmed(r);
        if r.len() < b.len() {
            break;
        }
    }
    (trimmed(q), r)
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trimmed(out)
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    let mut out = vec![Rational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trimmed(out)
}

fn is_zero_poly(p: &[Rational]) -> bool {
    p.iter().all(Zero::is_zero)
}

/// Returns `(g, s)` with `s·a ≡ g (mod m)` and `g = gcd(a, m)`.
fn ext_gcd(a: Vec<Rational>, m: Vec<Rational>) -> (Vec<Rational>, Vec<Rational>) {
    let (mut r0, mut r1) = (m, a);
    let (mut s0, mut s1) = (vec![Rational::zero()], vec![Rational::one()]);
    while !is_zero_poly(&r1) {
        let (q, r) = poly_divrem(&r0, &r1);
        let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    (trimmed(r0), s0)
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.coeffs == other.coeffs
    }
}

impl Eq for FieldElem {}

impl Hash for FieldElem {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl PartialOrd for FieldElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on coefficients; only meaningful within one field.
impl Ord for FieldElem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs.cmp(&other.coeffs)
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, &self.coeffs, "θ")
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&FieldElem> for &FieldElem {
            type Output = FieldElem;
            /// Panics when the operands live in different fields.
            fn $method(self, rhs: &FieldElem) -> FieldElem {
                self.$checked(rhs).expect("operands share a field")
            }
        }
        impl $trait<FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: FieldElem) -> FieldElem {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}
