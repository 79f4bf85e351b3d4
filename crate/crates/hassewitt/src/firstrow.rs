//! First rows of Hasse-Witt matrices: for all admissible primes p <= N at
//! once through a remainder forest, or for one prime by a linear scan.
//!
//! For p = 2n+1 the first row consists of the last g entries, reversed, of
//!   (2|p)^e * ((h_0|p)^{e-1} * (en)!)^{-1} * V_0 M'_1 ... M'_n  mod p,
//! with V_0 = [0, ..., 0, 1].

use std::collections::BTreeMap;

use rug::Integer;

use crate::curve::CurveData;
use crate::modarith::{
    legendre, legendre_int, mod_inverse, mul_mod, poly_degree, poly_is_squarefree, reduce_int,
    symbol_to_residue,
};
use crate::recurrence::build_primed;
use crate::remtree::{default_kappa, scalar_remainder_forest, ForestRun};
use crate::sieve::is_prime;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowProvenance {
    Batch,
    SinglePrime,
}

/// First row of the Hasse-Witt matrix of y^2 = f(x + a) mod p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HasseWittRow {
    pub p: u64,
    pub a: i64,
    /// w_{11}(a), ..., w_{1g}(a), reduced mod p.
    pub entries: Vec<u64>,
    pub provenance: RowProvenance,
}

/// Forest length parameters for a bound N: the index n runs over [0, 2^ell).
fn forest_length(n_bound: u64) -> usize {
    debug_assert!(n_bound > 1);
    let ell = 64 - (n_bound - 1).leading_zeros() - 1;
    1usize << ell.max(1)
}

/// Moduli vector m_0..m_{b-1}: m_n = p when p = 2n+1 is prime, p <= N and
/// accepted by the filter, otherwise 1.
fn forest_moduli(b: usize, n_bound: u64, accept: impl Fn(u64) -> bool) -> Vec<Integer> {
    (0..b)
        .map(|n| {
            let p = 2 * n as u64 + 1;
            if n > 0 && p <= n_bound && is_prime(p) && accept(p) {
                Integer::from(p)
            } else {
                Integer::from(1)
            }
        })
        .collect()
}

/// delta_n = (en)! mod m_n for every n, via a scalar remainder forest whose
/// k-th value is k+1 (e = 1) or (2k+1)(2k+2) (e = 2). The e = 2 case is the
/// cross-check path for the Wilson shortcut delta_n = -1.
pub fn delta_forest(e: usize, moduli: &[Integer], kappa: u32) -> Vec<Integer> {
    let values: Vec<Integer> = (0..moduli.len() as u64)
        .map(|k| match e {
            1 => Integer::from(k + 1),
            _ => Integer::from((2 * k + 1) * (2 * k + 2)),
        })
        .collect();
    scalar_remainder_forest(&values, moduli, kappa)
}

/// The scalar in front of u_n for one admissible prime. `delta` is (en)! mod
/// p when e = 1; ignored for e = 2 where Wilson's theorem gives -1.
fn row_scale(curve: &CurveData, p: u64, delta: u64) -> Result<u64> {
    let sym2 = symbol_to_residue(legendre(2, p), p);
    match curve.e {
        1 => {
            let inv = mod_inverse(delta, p)?;
            Ok(mul_mod(sym2, inv, p))
        }
        _ => {
            // (2|p)^2 = 1 and 1/(p-1)! = -1, so the scale is -(h_0|p)
            let symh = symbol_to_residue(legendre_int(&curve.h[0], p), p);
            Ok(p - symh)
        }
    }
}

fn assemble_row(
    curve: &CurveData,
    p: u64,
    u: &[Integer],
    delta: u64,
    a: i64,
    provenance: RowProvenance,
) -> Result<HasseWittRow> {
    let scale = row_scale(curve, p, delta)?;
    let r = curve.r;
    let entries: Vec<u64> = (1..=curve.g)
        .map(|j| mul_mod(scale, reduce_int(&u[r - j], p), p))
        .collect();
    Ok(HasseWittRow {
        p,
        a,
        entries,
        provenance,
    })
}

/// Internal driver for one curve and one prepared moduli vector, labelling
/// the rows with translation a.
fn rows_for_moduli(
    curve: &CurveData,
    moduli: &[Integer],
    kappa: u32,
    a: i64,
) -> Result<Vec<HasseWittRow>> {
    let mut v0 = vec![Integer::new(); curve.r];
    v0[curve.r - 1] = Integer::from(1);
    let leaf = |k: usize| build_primed(curve, k as u64 + 1);
    let mut run = ForestRun::new(v0, leaf, moduli, kappa);

    let deltas = if curve.e == 1 {
        Some(delta_forest(1, moduli, kappa))
    } else {
        None
    };

    let mut out = Vec::new();
    while let Some((start, chunk)) = run.next_subtree() {
        for (off, rv) in chunk.into_iter().enumerate() {
            let n = start + off;
            if n >= moduli.len() || rv.modulus == 1 {
                continue;
            }
            let p = rv.modulus.to_u64().expect("prime modulus fits in u64");
            let delta = match &deltas {
                Some(d) => d[n].to_u64().expect("residue fits in u64"),
                None => p - 1,
            };
            out.push(assemble_row(curve, p, &rv.entries, delta, a, RowProvenance::Batch)?);
        }
    }
    Ok(out)
}

/// First rows for every admissible prime p <= N (good reduction, p odd,
/// p not dividing h_0), keyed by p.
pub fn compute_first_rows(
    curve: &CurveData,
    n_bound: u64,
    kappa_override: Option<u32>,
) -> Result<BTreeMap<u64, HasseWittRow>> {
    let b = forest_length(n_bound);
    let kappa = kappa_override.unwrap_or_else(|| default_kappa(b.trailing_zeros()));
    let moduli = forest_moduli(b, n_bound, |p| curve.is_admissible(p));
    let rows = rows_for_moduli(curve, &moduli, kappa, 0)?;
    Ok(rows.into_iter().map(|row| (row.p, row)).collect())
}

/// Interleaved batch over the g translated curves y^2 = f(x + a_i): the g
/// forests share one moduli vector (the primes admissible for every
/// translate) and are stepped subtree by subtree, so each batch of primes
/// yields all g rows together. Output is grouped by p, ascending.
pub fn batch_interleaved(
    curve: &CurveData,
    n_bound: u64,
    a_list: &[i64],
    kappa_override: Option<u32>,
) -> Result<Vec<(u64, Vec<HasseWittRow>)>> {
    let translates: Vec<CurveData> = a_list
        .iter()
        .map(|&a| curve.translated(a))
        .collect::<Result<_>>()?;
    let b = forest_length(n_bound);
    let kappa = kappa_override.unwrap_or_else(|| default_kappa(b.trailing_zeros()));
    // a batch prime must keep the translation points distinct mod p (so the
    // later Vandermonde solve works) and be admissible for every translate
    let distinct_mod = |p: u64| {
        (0..a_list.len()).all(|i| {
            (0..i).all(|j| (a_list[i] - a_list[j]).rem_euclid(p as i64) != 0)
        })
    };
    let moduli = forest_moduli(b, n_bound, |p| {
        distinct_mod(p) && translates.iter().all(|t| t.is_admissible(p))
    });

    // n! mod m_n is curve-independent; shared by every e = 1 translate.
    let factorials = if translates.iter().any(|t| t.e == 1) {
        Some(delta_forest(1, &moduli, kappa))
    } else {
        None
    };

    let mut runs: Vec<ForestRun<_>> = translates
        .iter()
        .map(|t| {
            let mut v0 = vec![Integer::new(); t.r];
            v0[t.r - 1] = Integer::from(1);
            ForestRun::new(v0, move |k: usize| build_primed(t, k as u64 + 1), &moduli, kappa)
        })
        .collect();

    let mut grouped: BTreeMap<u64, Vec<HasseWittRow>> = BTreeMap::new();
    loop {
        let mut done = true;
        for (i, run) in runs.iter_mut().enumerate() {
            let Some((start, chunk)) = run.next_subtree() else {
                continue;
            };
            done = false;
            let t = &translates[i];
            for (off, rv) in chunk.into_iter().enumerate() {
                let n = start + off;
                if n >= moduli.len() || rv.modulus == 1 {
                    continue;
                }
                let p = rv.modulus.to_u64().expect("prime modulus fits in u64");
                let delta = match (&factorials, t.e) {
                    (Some(f), 1) => f[n].to_u64().expect("residue fits in u64"),
                    _ => p - 1,
                };
                let mut row =
                    assemble_row(t, p, &rv.entries, delta, a_list[i], RowProvenance::Batch)?;
                row.a = a_list[i];
                grouped.entry(p).or_default().push(row);
            }
        }
        if done {
            break;
        }
    }
    Ok(grouped.into_iter().collect())
}

/// First row at a single prime by the linear scan u_k = u_{k-1} M_k,
/// delta_k = delta_{k-1} k for k = 1..en, in O(g log p) space. The input is
/// re-normalized over F_p, so p dividing f_0 or the leading coefficient of
/// the global model is handled transparently.
pub fn compute_first_row_single(fbar: &[u64], p: u64) -> Result<HasseWittRow> {
    if p == 2 || !is_prime(p) {
        return Err(Error::BadPrime(p));
    }
    let mut fbar: Vec<u64> = fbar.iter().map(|&c| c % p).collect();
    crate::modarith::trim(&mut fbar);
    let d = match poly_degree(&fbar) {
        Some(d) if d >= 3 => d,
        _ => return Err(Error::NotHyperelliptic(p)),
    };
    if !poly_is_squarefree(&fbar, p) {
        return Err(Error::NotHyperelliptic(p));
    }
    let c = fbar.iter().position(|&x| x != 0).unwrap();
    if c >= 2 {
        return Err(Error::NotHyperelliptic(p));
    }
    let g = (d - 1) / 2;
    let r = d - c;
    let e = 2 - c;
    let h = &fbar[c..];
    let n = (p - 1) / 2;

    let mut u = vec![0u64; r];
    u[r - 1] = 1;
    let mut delta = 1u64;
    let two_h0 = mul_mod(2, h[0], p);
    for k in 1..=(e as u64) * n {
        let kp = k % p;
        let sub = mul_mod(kp, two_h0, p);
        let mut next = vec![0u64; r];
        // column i-1 picks up u_i * 2k h_0; the last column is the dense one
        for j in 0..r - 1 {
            next[j] = mul_mod(u[j + 1], sub, p);
        }
        let mut acc = 0u64;
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0 || h[r - i] == 0 {
                continue;
            }
            let coeff = (r as i128 - i as i128 - 2 * k as i128).rem_euclid(p as i128) as u64;
            acc = crate::modarith::add_mod(acc, mul_mod(coeff, mul_mod(h[r - i], ui, p), p), p);
        }
        next[r - 1] = crate::modarith::add_mod(next[r - 1], acc, p);
        u = next;
        delta = mul_mod(delta, kp, p);
    }

    let sym2 = symbol_to_residue(legendre(2, p), p);
    let sym2e = if e == 1 { sym2 } else { 1 };
    let symh = if e == 2 {
        symbol_to_residue(legendre(h[0] as i64, p), p)
    } else {
        1
    };
    let inv = mod_inverse(mul_mod(symh, delta, p), p)?;
    let scale = mul_mod(sym2e, inv, p);
    let entries: Vec<u64> = (1..=g).map(|j| mul_mod(scale, u[r - j], p)).collect();
    Ok(HasseWittRow {
        p,
        a: 0,
        entries,
        provenance: RowProvenance::SinglePrime,
    })
}
