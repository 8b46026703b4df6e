//! Word-size prime fields and reduction of `Q[θ]/(h)` modulo primes at which
//! `h` acquires a root.
//!
//! Primes stay below `2^28` so that a product of two residues fits in 56 bits
//! and 128 of them can be summed in a `u64` before reducing.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::exactfield::{FieldElem, FieldSpec, Rational};

pub const PRIME_CEILING: u64 = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Self {
        assert!(p > 2 && p < PRIME_CEILING && is_prime(p), "bad prime {p}");
        PrimeField { p }
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1;
        a %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Panics on zero.
    pub fn inv(&self, a: u64) -> u64 {
        assert!(a % self.p != 0, "inverting zero mod {}", self.p);
        self.pow(a, self.p - 2)
    }

    pub fn from_i64(&self, a: i64) -> u64 {
        a.rem_euclid(self.p as i64) as u64
    }

    fn from_bigint(&self, a: &BigInt) -> u64 {
        let r = a.mod_floor(&BigInt::from(self.p));
        r.to_u64().expect("residue fits")
    }

    /// `None` when `p` divides the denominator.
    pub fn from_rational(&self, q: &Rational) -> Option<u64> {
        let den = self.from_bigint(q.denom());
        if den == 0 {
            return None;
        }
        Some(self.mul(self.from_bigint(q.numer()), self.inv(den)))
    }

    /// Symmetric lift to `(-p/2, p/2]`.
    pub fn lift(&self, a: u64) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut f = 3;
    while f * f <= n {
        if n % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

// Dense polynomials over F_p, constant term first, no trailing zeros.

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(fp: &PrimeField, a: &[u64], m: &[u64]) -> Vec<u64> {
    let mut r = trim(a.to_vec());
    let dm = m.len() - 1;
    let lead_inv = fp.inv(m[dm]);
    while r.len() > dm {
        let top = fp.mul(*r.last().expect("nonempty"), lead_inv);
        let shift = r.len() - 1 - dm;
        for (i, &c) in m.iter().enumerate() {
            r[shift + i] = fp.sub(r[shift + i], fp.mul(top, c));
        }
        r = trim(r);
    }
    r
}

fn poly_div(fp: &PrimeField, a: &[u64], m: &[u64]) -> Vec<u64> {
    let mut r = trim(a.to_vec());
    let dm = m.len() - 1;
    if r.len() <= dm {
        return Vec::new();
    }
    let lead_inv = fp.inv(m[dm]);
    let mut q = vec![0; r.len() - dm];
    while r.len() > dm {
        let top = fp.mul(*r.last().expect("nonempty"), lead_inv);
        let shift = r.len() - 1 - dm;
        q[shift] = top;
        for (i, &c) in m.iter().enumerate() {
            r[shift + i] = fp.sub(r[shift + i], fp.mul(top, c));
        }
        r = trim(r);
    }
    trim(q)
}

fn poly_mulmod(fp: &PrimeField, a: &[u64], b: &[u64], m: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = fp.add(out[i + j], fp.mul(x, y));
        }
    }
    poly_rem(fp, &out, m)
}

fn poly_powmod(fp: &PrimeField, base: &[u64], mut e: u64, m: &[u64]) -> Vec<u64> {
    let mut acc = vec![1];
    let mut b = poly_rem(fp, base, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(fp, &acc, &b, m);
        }
        b = poly_mulmod(fp, &b, &b, m);
        e >>= 1;
    }
    acc
}

fn poly_gcd(fp: &PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_rem(fp, &a, &b);
        a = std::mem::replace(&mut b, r);
    }
    if let Some(&lead) = a.last() {
        let li = fp.inv(lead);
        a.iter_mut().for_each(|c| *c = fp.mul(*c, li));
    }
    a
}

/// Distinct roots of `h` in `F_p`, ascending.
pub fn roots(fp: &PrimeField, h: &[u64]) -> Vec<u64> {
    let h = trim(h.to_vec());
    if h.len() < 2 {
        return Vec::new();
    }
    // gcd(h, x^p - x) collects the linear factors
    let xp = poly_powmod(fp, &[0, 1], fp.p(), &h);
    let mut xp_minus_x = xp;
    xp_minus_x.resize(xp_minus_x.len().max(2), 0);
    xp_minus_x[1] = fp.sub(xp_minus_x[1], 1);
    let g = poly_gcd(fp, &h, &xp_minus_x);
    let mut out = Vec::new();
    split_linear(fp, g, &mut out);
    out.sort_unstable();
    out
}

fn split_linear(fp: &PrimeField, g: Vec<u64>, out: &mut Vec<u64>) {
    match g.len() {
        0 | 1 => {}
        2 => out.push(fp.neg(fp.mul(g[0], fp.inv(g[1])))),
        _ => {
            for a in 0..fp.p() {
                let mut w = poly_powmod(fp, &[a, 1], (fp.p() - 1) / 2, &g);
                if w.is_empty() {
                    w.push(0);
                }
                w[0] = fp.sub(w[0], 1);
                let u = poly_gcd(fp, &g, &w);
                if u.len() > 1 && u.len() < g.len() {
                    let v = poly_div(fp, &g, &u);
                    split_linear(fp, u, out);
                    split_linear(fp, v, out);
                    return;
                }
            }
            unreachable!("equal-degree splitting exhausted shifts");
        }
    }
}

/// A ring map `Q[θ]/(h) → F_p` sending `θ` to a root of `h mod p`.
#[derive(Debug, Clone)]
pub struct Reduction {
    field: PrimeField,
    root: u64,
    root_powers: Vec<u64>,
}

impl Reduction {
    pub fn new(spec: &FieldSpec, field: PrimeField, root: u64) -> Self {
        let mut root_powers = vec![1];
        for _ in 1..spec.degree() {
            let last = *root_powers.last().expect("nonempty");
            root_powers.push(field.mul(last, root));
        }
        Reduction {
            field,
            root,
            root_powers,
        }
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn root(&self) -> u64 {
        self.root
    }

    /// `None` when some coefficient is not `p`-integral.
    pub fn map(&self, x: &FieldElem) -> Option<u64> {
        let mut acc = 0;
        for (c, &w) in x.coeffs().iter().zip(&self.root_powers) {
            if c.is_zero() {
                continue;
            }
            acc = self.field.add(acc, self.field.mul(self.field.from_rational(c)?, w));
        }
        Some(acc)
    }
}

/// A prime together with all roots of `h` modulo it.
#[derive(Debug, Clone)]
pub struct SplittingPrime {
    pub field: PrimeField,
    pub roots: Vec<u64>,
}

impl SplittingPrime {
    pub fn reductions(&self, spec: &FieldSpec) -> Vec<Reduction> {
        self.roots
            .iter()
            .map(|&r| Reduction::new(spec, self.field, r))
            .collect()
    }

    pub fn splits_completely(&self, spec: &FieldSpec) -> bool {
        self.roots.len() == spec.degree()
    }
}

/// Primes below [`PRIME_CEILING`], descending, at which `h` is `p`-integral and
/// has at least one root.
pub fn prime_sequence(spec: &FieldSpec) -> impl Iterator<Item = SplittingPrime> + '_ {
    let mut candidate = PRIME_CEILING - 1;
    std::iter::from_fn(move || {
        while candidate > 3 {
            let n = candidate;
            candidate -= 2;
            if !is_prime(n) {
                continue;
            }
            let fp = PrimeField::new(n);
            let Some(h) = spec
                .modulus()
                .iter()
                .map(|c| fp.from_rational(c))
                .collect::<Option<Vec<u64>>>()
            else {
                continue;
            };
            let rs = roots(&fp, &h);
            if !rs.is_empty() {
                return Some(SplittingPrime { field: fp, roots: rs });
            }
        }
        None
    })
}

/// The first reduction in [`prime_sequence`]; used for all fast modular ranks.
pub fn primary_reduction(spec: &FieldSpec) -> Reduction {
    let sp = prime_sequence(spec)
        .next()
        .expect("infinitely many primes split h");
    Reduction::new(spec, sp.field, sp.roots[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::rat;

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime(268_435_399));
    }

    #[test]
    fn inverse_and_rationals() {
        let fp = PrimeField::new(101);
        for a in 1..101 {
            assert_eq!(fp.mul(a, fp.inv(a)), 1);
        }
        let half = Rational::new(1.into(), 2.into());
        assert_eq!(fp.from_rational(&half), Some(51));
        let bad = Rational::new(1.into(), 101.into());
        assert_eq!(fp.from_rational(&bad), None);
        assert_eq!(fp.from_rational(&rat(-1)), Some(100));
    }

    #[test]
    fn roots_of_split_quadratic() {
        let fp = PrimeField::new(13);
        // (x - 3)(x - 5) = x^2 - 8x + 15
        let h = vec![fp.from_i64(15), fp.from_i64(-8), 1];
        assert_eq!(roots(&fp, &h), vec![3, 5]);
        // x^2 + 1 has roots mod 13 (5^2 = 25 = -1)
        assert_eq!(roots(&fp, &[1, 0, 1]), vec![5, 8]);
        // x^2 + 1 is irreducible mod 7
        assert!(roots(&PrimeField::new(7), &[1, 0, 1]).is_empty());
    }

    #[test]
    fn reduction_is_ring_map() {
        let spec = FieldSpec::from_integer_modulus(&[1, -1, 1]).unwrap();
        for sp in prime_sequence(&spec).take(3) {
            assert!(sp.splits_completely(&spec));
            for red in sp.reductions(&spec) {
                let e = spec.generator();
                let a = &e + &spec.from_int(7);
                let b = &(&e * &e) - &spec.from_int(3);
                let fp = red.field();
                assert_eq!(
                    red.map(&(&a * &b)).unwrap(),
                    fp.mul(red.map(&a).unwrap(), red.map(&b).unwrap())
                );
                assert_eq!(red.map(&e.pow(6)).unwrap(), 1);
            }
        }
    }

    #[test]
    fn quartic_cyclotomic_roots() {
        let spec = FieldSpec::from_integer_modulus(&[1, 1, 1, 1, 1]).unwrap();
        let sp = prime_sequence(&spec).next().unwrap();
        assert_eq!(sp.field.p() % 5, 1);
        assert_eq!(sp.roots.len(), 4);
        for &r in &sp.roots {
            assert_eq!(sp.field.pow(r, 5), 1);
        }
    }
}
