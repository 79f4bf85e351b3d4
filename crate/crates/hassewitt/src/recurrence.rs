//! The p-independent integer transition matrices of the coefficient
//! recurrence for h^n, and a naive scalar recurrence used as a test
//! reference.
//!
//! M_k has subdiagonal entries 2k*h_0 and last column (r-i-2k)*h_{r-i};
//! multiplying the window vector [h^n_{k-r+1}, ..., h^n_k] on the right by
//! M_k advances it one step, up to the scalar factor 2k*h_0.

use rug::Integer;

use crate::curve::CurveData;
use crate::modarith::{mod_inverse, mul_mod, reduce_int};
use crate::remtree::IntMatrix;
use crate::{Error, Result};

/// The r x r matrix M_k over Z. Nonzero entries: subdiagonal 2k*h_0 and
/// last column (r-i-2k)*h_{r-i} at row i, so at most 2r-1 in total.
pub fn build_transition(curve: &CurveData, k: u64) -> IntMatrix {
    let r = curve.r;
    let mut m = IntMatrix::zero(r);
    let two_k_h0 = Integer::from(2 * k) * &curve.h[0];
    for i in 1..r {
        m.set(i, i - 1, two_k_h0.clone());
    }
    for i in 0..r {
        let coeff = Integer::from(r as i64 - i as i64 - 2 * k as i64);
        m.set(i, r - 1, coeff * &curve.h[r - i]);
    }
    m
}

/// M'_k: equal to M_k when e = 1, and to the exact integer product
/// M_{2k-1} * M_{2k} when e = 2, unifying the indexing of the two cases.
pub fn build_primed(curve: &CurveData, k: u64) -> IntMatrix {
    match curve.e {
        1 => build_transition(curve, k),
        _ => build_transition(curve, 2 * k - 1).mul(&build_transition(curve, 2 * k)),
    }
}

/// Iterate the scalar recurrence
///   h^n_k = (1 / (k h_0)) * sum_{j=1..r} ((n+1) j - k) h_j h^n_{k-j}
/// modulo p, starting from the window [0, ..., 0, h_0^n], and return the
/// window [h^n_{m-r+1}, ..., h^n_m] mod p. Test-only reference for the
/// matrix formulation.
pub fn naive_vnm(curve: &CurveData, n: u64, m: u64, p: u64) -> Result<Vec<u64>> {
    let r = curve.r;
    let h: Vec<u64> = curve.h.iter().map(|c| reduce_int(c, p)).collect();
    let mut window = vec![0u64; r];
    window[r - 1] = crate::modarith::pow_mod(h[0], n, p);
    for k in 1..=m {
        let divisor = mul_mod(k % p, h[0], p);
        if divisor == 0 {
            return Err(Error::DivisorVanishes(p, k));
        }
        let inv = mod_inverse(divisor, p)?;
        let mut acc: u64 = 0;
        for j in 1..=r.min(k as usize) {
            // h^n_{k-j} is window[r - j] of the previous window
            let coeff = ((n as i128 + 1) * j as i128 - k as i128).rem_euclid(p as i128) as u64;
            let term = mul_mod(coeff, mul_mod(h[j], window[r - j], p), p);
            acc = crate::modarith::add_mod(acc, term, p);
        }
        window.rotate_left(1);
        window[r - 1] = mul_mod(acc, inv, p);
    }
    Ok(window)
}
