//! Modular and polynomial arithmetic utilities: Legendre symbols, modular
//! inverses, F_p[x] arithmetic, and the direct-expansion oracle for the
//! Hasse-Witt matrix.

use rug::ops::RemRounding;
use rug::Integer;

use crate::{Error, Result};

/// A vector of residues with its modulus, as produced by the remainder tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueVector {
    pub modulus: Integer,
    pub entries: Vec<Integer>,
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % m as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Jacobi symbol (a | n) for odd n >= 1, computed by quadratic reciprocity.
pub fn jacobi(a: i64, n: u64) -> i32 {
    debug_assert!(n % 2 == 1);
    let mut num = a.rem_euclid(n as i64) as u64;
    let mut den = n;
    let mut sign = 1i32;
    while num != 0 {
        while num % 2 == 0 {
            num /= 2;
            if den % 8 == 3 || den % 8 == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut num, &mut den);
        if num % 4 == 3 && den % 4 == 3 {
            sign = -sign;
        }
        num %= den;
    }
    if den == 1 {
        sign
    } else {
        0
    }
}

/// Legendre symbol (a | p) for an odd prime p.
pub fn legendre(a: i64, p: u64) -> i32 {
    jacobi(a, p)
}

/// Legendre symbol of an arbitrary-precision integer.
pub fn legendre_int(a: &Integer, p: u64) -> i32 {
    let r = reduce_int(a, p);
    jacobi(r as i64, p)
}

/// Least non-negative residue of an arbitrary-precision integer mod m.
pub fn reduce_int(a: &Integer, m: u64) -> u64 {
    let r = Integer::from(a.rem_euc(&Integer::from(m)));
    r.to_u64().expect("residue fits in u64")
}

/// Inverse of a modulo m via the extended Euclidean algorithm.
pub fn mod_inverse(a: u64, m: u64) -> Result<u64> {
    let a = a % m;
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(Error::NotInvertible(a, m));
    }
    Ok(old_s.rem_euclid(m as i128) as u64)
}

/// A residue for a Legendre symbol value in {-1, 0, 1}.
pub fn symbol_to_residue(s: i32, p: u64) -> u64 {
    match s {
        1 => 1,
        -1 => p - 1,
        _ => 0,
    }
}

// --- F_p[x] arithmetic ------------------------------------------------------

/// Reduce an integer polynomial mod p, trimming leading zeros.
pub fn poly_mod_p(coeffs: &[Integer], p: u64) -> Vec<u64> {
    let mut out: Vec<u64> = coeffs.iter().map(|c| reduce_int(c, p)).collect();
    trim(&mut out);
    out
}

pub fn trim(poly: &mut Vec<u64>) {
    while let Some(&0) = poly.last() {
        poly.pop();
    }
}

/// Degree of a trimmed polynomial; None for the zero polynomial.
pub fn poly_degree(poly: &[u64]) -> Option<usize> {
    poly.iter().rposition(|&c| c != 0)
}

pub fn poly_derivative(poly: &[u64], p: u64) -> Vec<u64> {
    let mut out: Vec<u64> = poly
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| mul_mod(i as u64 % p, c, p))
        .collect();
    trim(&mut out);
    out
}

pub fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut acc = vec![0u128; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            acc[i + j] += ai as u128 * bj as u128;
        }
    }
    let mut out: Vec<u64> = acc.iter().map(|&c| (c % p as u128) as u64).collect();
    trim(&mut out);
    out
}

/// Remainder of a divided by b in F_p[x]; b must be nonzero.
pub fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let db = poly_degree(b).expect("division by zero polynomial");
    let lead_inv = mod_inverse(b[db], p).expect("leading coefficient invertible");
    let mut rem = a.to_vec();
    trim(&mut rem);
    while let Some(da) = poly_degree(&rem) {
        if da < db {
            break;
        }
        let factor = mul_mod(rem[da], lead_inv, p);
        let shift = da - db;
        for i in 0..=db {
            rem[i + shift] = sub_mod(rem[i + shift], mul_mod(factor, b[i], p), p);
        }
        trim(&mut rem);
    }
    rem
}

pub fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// True iff the reduced polynomial is squarefree over F_p.
pub fn poly_is_squarefree(poly: &[u64], p: u64) -> bool {
    match poly_degree(poly) {
        None => false,
        Some(0) => true,
        Some(_) => {
            let deriv = poly_derivative(poly, p);
            if deriv.is_empty() {
                // f = g(x^p); has repeated roots in char p
                return false;
            }
            let g = poly_gcd(poly, &deriv, p);
            poly_degree(&g) == Some(0)
        }
    }
}

/// Expand fbar^((p-1)/2) in F_p[x] by binary powering with full schoolbook
/// products and read off the g x g matrix [w_ij] with w_ij the coefficient
/// of x^(p*i - j). This is the reference oracle for every other W_p path;
/// it is O(p^2 g^2) and intended for p up to around 2^14.
pub fn direct_expansion_matrix(fbar: &[u64], g: usize, p: u64) -> Vec<Vec<u64>> {
    let n = (p - 1) / 2;
    let mut acc: Vec<u64> = vec![1 % p];
    let mut sq = fbar.to_vec();
    trim(&mut sq);
    let mut exp = n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = poly_mul(&acc, &sq, p);
        }
        exp >>= 1;
        if exp > 0 {
            sq = poly_mul(&sq, &sq, p);
        }
    }
    let coeff = |k: i64| -> u64 {
        if k < 0 || k as usize >= acc.len() {
            0
        } else {
            acc[k as usize]
        }
    };
    (1..=g)
        .map(|i| {
            (1..=g)
                .map(|j| coeff(p as i64 * i as i64 - j as i64))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::primes_up_to;

    #[test]
    fn legendre_small_values() {
        assert_eq!(legendre(2, 7), 1);
        assert_eq!(legendre(0, 5), 0);
        assert_eq!(legendre(3, 7), -1);
    }

    #[test]
    fn legendre_matches_euler_criterion_exhaustively() {
        for p in primes_up_to(200).into_iter().filter(|&p| p > 2) {
            for a in 0..p {
                let euler = pow_mod(a, (p - 1) / 2, p);
                let sym = symbol_to_residue(legendre(a as i64, p), p);
                assert_eq!(sym, euler, "a = {a}, p = {p}");
            }
        }
    }

    #[test]
    fn legendre_via_reciprocity_matches_exponentiation_oracle() {
        // (23 | 97) against the modular exponentiation oracle 23^48 mod 97
        let oracle = pow_mod(23, 48, 97);
        assert_eq!(symbol_to_residue(legendre(23, 97), 97), oracle);
    }

    #[test]
    fn mod_inverse_basics() {
        assert_eq!(mod_inverse(3, 7).unwrap(), 5);
        assert_eq!(mod_inverse(1, 101).unwrap(), 1);
        assert_eq!(mod_inverse(4, 8), Err(Error::NotInvertible(4, 8)));
    }

    #[test]
    fn wilson_factorial_inverse() {
        // ((p-1)!)^-1 = p-1 mod p by Wilson's theorem
        let p = 13u64;
        let fact = (1..p).fold(1u64, |acc, k| mul_mod(acc, k, p));
        assert_eq!(fact, p - 1);
        assert_eq!(mod_inverse(fact, p).unwrap(), p - 1);
    }

    #[test]
    fn direct_expansion_cubic_mod_5() {
        // f = x^3 + x + 1, p = 5: f^2 = x^6 + 2x^4 + 2x^3 + x^2 + 2x + 1,
        // w_11 = coefficient of x^4 = 2
        let w = direct_expansion_matrix(&[1, 1, 0, 1], 1, 5);
        assert_eq!(w, vec![vec![2]]);
    }

    #[test]
    fn direct_expansion_exponent_one() {
        // p = 3: exponent (p-1)/2 = 1, entries are coefficients of f itself
        let f = [1u64, 1, 0, 1];
        let w = direct_expansion_matrix(&f, 1, 3);
        assert_eq!(w[0][0], f[2]); // coefficient of x^(3*1-1)
    }

    #[test]
    fn squarefree_detection() {
        // (x+1)^2 = x^2 + 2x + 1 mod 5
        assert!(!poly_is_squarefree(&[1, 2, 1], 5));
        assert!(poly_is_squarefree(&[1, 1, 0, 1], 5));
        // x^5 + 1 mod 5 = (x+1)^5
        assert!(!poly_is_squarefree(&[1, 0, 0, 0, 0, 1], 5));
    }

    proptest::proptest! {
        #[test]
        fn jacobi_is_multiplicative(a in -500i64..500, b in -500i64..500, i in 0usize..5) {
            let n = [3u64, 15, 21, 97, 1001][i];
            proptest::prop_assert_eq!(jacobi(a.wrapping_mul(b), n), jacobi(a, n) * jacobi(b, n));
        }

        #[test]
        fn mod_inverse_round_trips(a in 1u64..100_000, i in 0usize..4) {
            let p = [101u64, 4099, 65537, 1_000_003][i];
            let a = a % p;
            if a != 0 {
                let inv = mod_inverse(a, p).unwrap();
                proptest::prop_assert_eq!(mul_mod(a, inv, p), 1);
            }
        }
    }

    #[test]
    fn poly_gcd_agrees_with_factor_structure() {
        let p = 7;
        let a = poly_mul(&[1, 1], &[2, 0, 1], p); // (x+1)(x^2+2)
        let b = poly_mul(&[1, 1], &[3, 1], p); // (x+1)(x+3)
        let g = poly_gcd(&a, &b, p);
        // gcd is a scalar multiple of x+1
        assert_eq!(poly_degree(&g), Some(1));
        let r = poly_rem(&g, &[1, 1], p);
        assert!(r.is_empty());
    }
}
