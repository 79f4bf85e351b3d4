//! End-to-end orchestration: the whole Hasse-Witt matrix at one prime, and
//! at every odd good prime p <= N.
//!
//! The all-primes path classifies each prime and dispatches: p < g to direct
//! expansion, exceptional p (dividing some nonzero f(a_i)) to the
//! single-prime scan, and the rest to g interleaved remainder forests over
//! the translates f(x + a_i), a_i = i - 1, followed by reconstruction.

use crate::curve::{classify_primes, CurveData, PrimeKind};
use crate::firstrow::{batch_interleaved, compute_first_row_single};
use crate::modarith::{direct_expansion_matrix, mul_mod, poly_degree, trim};
use crate::reconstruct::{reconstruct_matrix, HasseWittMatrix, MatrixProvenance};
use crate::{Error, Result};

/// Coefficients of fbar(x + a) over F_p.
pub fn poly_shift_mod(fbar: &[u64], a: u64, p: u64) -> Vec<u64> {
    let mut out: Vec<u64> = fbar.iter().map(|&c| c % p).collect();
    let a = a % p;
    let n = out.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            out[j] = crate::modarith::add_mod(out[j], mul_mod(a, out[j + 1], p), p);
        }
    }
    out
}

/// W_p of y^2 = fbar(x) over F_p: first rows of the g translates
/// fbar(x + a_i), a_i = i - 1, then one reconstruction.
pub fn compute_matrix_single(fbar: &[u64], p: u64) -> Result<HasseWittMatrix> {
    if p == 2 || !crate::sieve::is_prime(p) {
        return Err(Error::BadPrime(p));
    }
    let mut fbar: Vec<u64> = fbar.iter().map(|&c| c % p).collect();
    trim(&mut fbar);
    let d = match poly_degree(&fbar) {
        Some(d) if d >= 3 => d,
        _ => return Err(Error::NotHyperelliptic(p)),
    };
    let g = (d - 1) / 2;
    if g as u64 > p {
        return Err(Error::GenusExceedsPrime(g, p));
    }
    let rows = (0..g as u64)
        .map(|a| {
            let shifted = poly_shift_mod(&fbar, a, p);
            let mut row = compute_first_row_single(&shifted, p)?;
            row.a = a as i64;
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut w = reconstruct_matrix(&rows, p)?;
    w.provenance = MatrixProvenance::SinglePrimeWhole;
    Ok(w)
}

/// W_p for every odd prime of good reduction p <= N, sorted ascending.
pub fn compute_matrices(
    curve: &CurveData,
    n_bound: u64,
    kappa_override: Option<u32>,
) -> Result<Vec<HasseWittMatrix>> {
    let a_list: Vec<i64> = (0..curve.g as i64).collect();
    let statuses = classify_primes(curve, n_bound, &a_list);

    let mut out: Vec<HasseWittMatrix> = Vec::new();
    for s in &statuses {
        match s.kind {
            PrimeKind::Bad => {}
            PrimeKind::SmallGood => {
                let fbar = curve.reduce_mod(s.p);
                out.push(HasseWittMatrix {
                    p: s.p,
                    entries: direct_expansion_matrix(&fbar, curve.g, s.p),
                    provenance: MatrixProvenance::DirectExpansion,
                });
            }
            PrimeKind::ExceptionalGood => {
                out.push(compute_matrix_single(&curve.reduce_mod(s.p), s.p)?);
            }
            PrimeKind::BatchAdmissible => {}
        }
    }

    for (p, rows) in batch_interleaved(curve, n_bound, &a_list, kappa_override)? {
        out.push(reconstruct_matrix(&rows, p)?);
    }
    out.sort_by_key(|w| w.p);
    Ok(out)
}
