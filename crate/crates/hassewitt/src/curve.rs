//! Input normalization and prime classification for hyperelliptic curves
//! y^2 = f(x) with f in Z[x] squarefree.

use rug::Integer;

use crate::modarith::{poly_degree, poly_is_squarefree, poly_mod_p};
use crate::sieve::primes_up_to;
use crate::{Error, Result};

/// A normalized hyperelliptic equation y^2 = f(x) = x^c * h(x), with
/// c in {0,1}, d = deg f in {2g+1, 2g+2}, r = d - c and e = 2 - c.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveData {
    /// Coefficients of f, constant term first, length d+1.
    pub f: Vec<Integer>,
    /// Lowest index with f_c != 0; at most 1 since f is squarefree.
    pub c: usize,
    /// Degree of f.
    pub d: usize,
    /// Genus.
    pub g: usize,
    /// r = d - c, the dimension of the recurrence.
    pub r: usize,
    /// e = 2 - c; the number of transition matrices per prime is e*n.
    pub e: usize,
    /// Coefficients of h = f / x^c, length r+1.
    pub h: Vec<Integer>,
}

/// How a prime participates in the computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimeKind {
    /// Bad reduction (always includes p = 2).
    Bad,
    /// Good reduction with p < g; handled by direct expansion.
    SmallGood,
    /// Good reduction, p >= g, but p divides some a_i - a_j or some
    /// nonzero f(a_i); handled by the single-prime algorithm.
    ExceptionalGood,
    /// Good reduction, eligible for the batch first-row forests.
    BatchAdmissible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeStatus {
    pub p: u64,
    pub kind: PrimeKind,
}

/// Normalize f into a [`CurveData`], rejecting inputs that do not define a
/// hyperelliptic curve over Q.
pub fn normalize(f_coeffs: &[Integer]) -> Result<CurveData> {
    let mut f: Vec<Integer> = f_coeffs.to_vec();
    while f.last().is_some_and(|c| *c == 0) {
        f.pop();
    }
    let d = f.len().saturating_sub(1);
    if f.is_empty() || d < 3 {
        return Err(Error::DegreeOutOfRange(d));
    }
    let c = f.iter().position(|x| *x != 0).unwrap();
    if c >= 2 {
        return Err(Error::TooDivisibleByX);
    }
    if !int_poly_is_squarefree(&f) {
        return Err(Error::NotSquarefree);
    }
    let g = (d - 1) / 2;
    let r = d - c;
    let e = 2 - c;
    let h = f[c..].to_vec();
    Ok(CurveData { f, c, d, g, r, e, h })
}

/// Convenience constructor from machine integers.
pub fn normalize_i64(f_coeffs: &[i64]) -> Result<CurveData> {
    let f: Vec<Integer> = f_coeffs.iter().map(|&x| Integer::from(x)).collect();
    normalize(&f)
}

impl CurveData {
    /// f(a) as an exact integer.
    pub fn eval(&self, a: i64) -> Integer {
        let a = Integer::from(a);
        let mut acc = Integer::new();
        for coeff in self.f.iter().rev() {
            acc *= &a;
            acc += coeff;
        }
        acc
    }

    /// The translated curve y^2 = f(x + a), renormalized.
    pub fn translated(&self, a: i64) -> Result<CurveData> {
        normalize(&taylor_shift(&self.f, a))
    }

    /// f mod p with leading zeros trimmed.
    pub fn reduce_mod(&self, p: u64) -> Vec<u64> {
        poly_mod_p(&self.f, p)
    }

    /// True iff y^2 = f(x) mod p defines a genus-g hyperelliptic curve:
    /// p odd, f mod p squarefree of degree at least 2g+1.
    pub fn is_good_prime(&self, p: u64) -> bool {
        if p == 2 {
            return false;
        }
        let fbar = self.reduce_mod(p);
        match poly_degree(&fbar) {
            Some(deg) if deg >= 2 * self.g + 1 => poly_is_squarefree(&fbar, p),
            _ => false,
        }
    }

    /// True iff p is admissible for the batch algorithm: good and p does not
    /// divide h_0.
    pub fn is_admissible(&self, p: u64) -> bool {
        self.is_good_prime(p) && !self.h[0].is_divisible_u(p as u32)
    }
}

/// Coefficients of f(x + a).
pub fn taylor_shift(f: &[Integer], a: i64) -> Vec<Integer> {
    let mut out = f.to_vec();
    let n = out.len();
    let a = Integer::from(a);
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let add = Integer::from(&a * &out[j + 1]);
            out[j] += add;
        }
    }
    out
}

/// Classify every prime p <= N (p = 2 and all odd primes) for the driver.
pub fn classify_primes(curve: &CurveData, n_bound: u64, a_list: &[i64]) -> Vec<PrimeStatus> {
    let f_vals: Vec<Integer> = a_list.iter().map(|&a| curve.eval(a)).collect();
    let mut diffs: Vec<Integer> = Vec::new();
    for i in 0..a_list.len() {
        for j in 0..i {
            diffs.push(Integer::from(a_list[i] - a_list[j]));
        }
    }
    primes_up_to(n_bound)
        .into_iter()
        .map(|p| {
            let kind = if !curve.is_good_prime(p) {
                PrimeKind::Bad
            } else if p < curve.g as u64 {
                PrimeKind::SmallGood
            } else {
                let divides_diff = diffs.iter().any(|d| d.is_divisible_u(p as u32));
                let divides_val = f_vals
                    .iter()
                    .any(|v| *v != 0 && v.is_divisible_u(p as u32));
                if divides_diff || divides_val {
                    PrimeKind::ExceptionalGood
                } else {
                    PrimeKind::BatchAdmissible
                }
            };
            PrimeStatus { p, kind }
        })
        .collect()
}

// --- squarefreeness over Q via a fraction-free gcd --------------------------

fn int_poly_is_squarefree(f: &[Integer]) -> bool {
    let deriv: Vec<Integer> = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| Integer::from(c * i as u64))
        .collect();
    let g = int_poly_gcd(f, &deriv);
    g.len() == 1
}

fn int_trim(p: &mut Vec<Integer>) {
    while p.last().is_some_and(|c| *c == 0) {
        p.pop();
    }
}

fn primitive_part(p: &mut Vec<Integer>) {
    int_trim(p);
    if p.is_empty() {
        return;
    }
    let mut content = Integer::new();
    for c in p.iter() {
        content.gcd_mut(c);
    }
    if content > 1 {
        for c in p.iter_mut() {
            c.div_exact_mut(&content);
        }
    }
}

/// Pseudo-remainder of a by b (b nonzero), over Z.
fn int_poly_prem(a: &[Integer], b: &[Integer]) -> Vec<Integer> {
    let db = b.len() - 1;
    let lead = &b[db];
    let mut rem = a.to_vec();
    int_trim(&mut rem);
    while rem.len() > db {
        let da = rem.len() - 1;
        let factor = rem[da].clone();
        for c in rem.iter_mut() {
            *c *= lead;
        }
        let shift = da - db;
        for i in 0..=db {
            let sub = Integer::from(&factor * &b[i]);
            rem[i + shift] -= sub;
        }
        int_trim(&mut rem);
    }
    rem
}

/// Primitive gcd of two integer polynomials (up to sign).
fn int_poly_gcd(a: &[Integer], b: &[Integer]) -> Vec<Integer> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    primitive_part(&mut a);
    primitive_part(&mut b);
    while !b.is_empty() {
        let mut r = int_poly_prem(&a, &b);
        primitive_part(&mut r);
        a = b;
        b = r;
    }
    a
}
