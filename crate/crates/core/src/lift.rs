//! Lifting vectors over `Q[θ]/(h)` from their images at completely split
//! primes: interpolation in `θ`, Chinese remaindering, rational reconstruction.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exactfield::{FieldElem, FieldSpec, Rational};
use crate::linalg::rref;
use crate::modp::{prime_sequence, PrimeField, Reduction};

/// Upper limit on primes consumed by a single lift.
pub const MAX_LIFT_PRIMES: usize = 64;

/// `n/d ≡ a (mod m)` with `|n|, d <= sqrt(m/2)`, if such a fraction exists.
pub fn rational_reconstruction(a: &BigInt, m: &BigInt) -> Option<Rational> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        (r0, r1) = (r1, r2);
        (t0, t1) = (t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    if t1.sign() == Sign::Minus {
        (r1, t1) = (-r1, -t1);
    }
    Some(Rational::new(r1, t1))
}

/// Residues modulo a growing product of primes.
#[derive(Debug, Clone)]
pub struct Crt {
    modulus: BigInt,
    residues: Vec<BigInt>,
}

impl Crt {
    pub fn new(len: usize) -> Self {
        Crt {
            modulus: BigInt::one(),
            residues: vec![BigInt::zero(); len],
        }
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn absorb(&mut self, fp: &PrimeField, values: &[u64]) {
        assert_eq!(values.len(), self.residues.len());
        let p = BigInt::from(fp.p());
        let m_mod_p = (&self.modulus % &p).to_u64_digits().1.first().copied().unwrap_or(0);
        let m_inv = fp.inv(m_mod_p);
        for (x, &v) in self.residues.iter_mut().zip(values) {
            let x_mod_p = (&*x % &p).to_u64_digits().1.first().copied().unwrap_or(0);
            let t = fp.mul(fp.sub(v, x_mod_p), m_inv);
            *x += &self.modulus * BigInt::from(t);
        }
        self.modulus *= p;
    }

    pub fn reconstruct(&self) -> Option<Vec<Rational>> {
        self.residues
            .iter()
            .map(|x| rational_reconstruction(x, &self.modulus))
            .collect()
    }
}

/// Inverse of the Vandermonde matrix `V[j][i] = ρ_j^i`.
fn vandermonde_inverse(fp: &PrimeField, roots: &[u64]) -> Vec<Vec<u64>> {
    let n = roots.len();
    let rows: Vec<Vec<u64>> = roots
        .iter()
        .enumerate()
        .map(|(j, &r)| {
            let mut row: Vec<u64> = (0..n).map(|i| fp.pow(r, i as u64)).collect();
            row.extend((0..n).map(|c| u64::from(c == j)));
            row
        })
        .collect();
    let e = rref(fp, rows, 2 * n).expect("prime field");
    assert_eq!(&e.pivots[..], &(0..n).collect::<Vec<_>>()[..], "distinct roots");
    e.rows.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Lifts a vector whose image under every reduction is produced by
/// `image`, which also returns a shape key (e.g. pivot columns) that
/// must agree across reductions. Candidates are handed to `verify`; the
/// first accepted one is returned.
pub fn lift_vector<K: PartialEq>(
    spec: &FieldSpec,
    mut image: impl FnMut(&Reduction) -> Option<(K, Vec<u64>)>,
    mut verify: impl FnMut(&[FieldElem]) -> bool,
) -> Option<Vec<FieldElem>> {
    let n = spec.degree();
    let mut key: Option<K> = None;
    let mut crt: Option<Crt> = None;
    let mut previous: Option<Vec<Rational>> = None;
    let primes = prime_sequence(spec)
        .filter(|sp| sp.splits_completely(spec))
        .take(MAX_LIFT_PRIMES);
    for sp in primes {
        let fp = sp.field;
        let mut images = Vec::with_capacity(n);
        for red in sp.reductions(spec) {
            let Some((k, v)) = image(&red) else { break };
            match &key {
                Some(expected) if *expected != k => break,
                Some(_) => {}
                None => key = Some(k),
            }
            images.push(v);
        }
        if images.len() != n {
            continue;
        }
        let len = images[0].len();
        let vinv = vandermonde_inverse(&fp, &sp.roots);
        // coefficient i of entry e sits at e * n + i
        let mut coeffs = vec![0u64; len * n];
        for e in 0..len {
            for i in 0..n {
                coeffs[e * n + i] = (0..n).fold(0, |acc, j| fp.add(acc, fp.mul(vinv[i][j], images[j][e])));
            }
        }
        let acc = crt.get_or_insert_with(|| Crt::new(len * n));
        acc.absorb(&fp, &coeffs);
        let Some(candidate) = acc.reconstruct() else {
            previous = None;
            continue;
        };
        if previous.as_ref() == Some(&candidate) {
            let elems: Vec<FieldElem> = candidate
                .chunks(n)
                .map(|c| spec.elem(c.to_vec()).expect("degree-sized chunk"))
                .collect();
            if verify(&elems) {
                return Some(elems);
            }
        }
        previous = Some(candidate);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::{parse_rational, rat};
    use proptest::prelude::*;

    #[test]
    fn reconstructs_small_fractions() {
        let m = BigInt::from(1_000_003u64) * BigInt::from(999_983u64);
        let q = parse_rational("-17/41").unwrap();
        let a = (q.numer() * q.denom().modinv(&m).unwrap()).mod_floor(&m);
        assert_eq!(rational_reconstruction(&a, &m), Some(q));
        assert_eq!(rational_reconstruction(&BigInt::zero(), &m), Some(rat(0)));
    }

    #[test]
    fn lifts_a_quadratic_vector() {
        let k = FieldSpec::from_integer_modulus(&[1, -1, 1]).unwrap();
        let target = vec![k.from_int_poly(&[3, -2]), k.from_rational(parse_rational("5/7").unwrap()), k.zero()];
        let got = lift_vector(
            &k,
            |red| Some(((), target.iter().map(|x| red.map(x).unwrap()).collect())),
            |v| v == &target[..],
        );
        assert_eq!(got, Some(target));
    }

    proptest! {
        #[test]
        fn crt_round_trip(n in -5000i64..5000, d in 1i64..5000) {
            let k = FieldSpec::rationals();
            let q = Rational::new(BigInt::from(n), BigInt::from(d));
            let x = k.from_rational(q.clone());
            let got = lift_vector(&k, |red| red.map(&x).map(|v| ((), vec![v])), |_| true);
            prop_assert_eq!(got.map(|v| v[0].clone()), Some(x));
        }
    }
}
