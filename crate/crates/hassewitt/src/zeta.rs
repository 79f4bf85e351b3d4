//! Zeta-function data derived from W_p: characteristic polynomial mod p,
//! L_p mod p, the lifted Frobenius trace, and Sato-Tate a1 statistics.
//!
//! L_p(T) = det(I - T W_p) mod p is the reversed characteristic polynomial;
//! for p > 16g^2 the Weil bound |a_p| <= 2g sqrt(p) pins down the trace in Z.

use crate::modarith::{add_mod, mod_inverse, mul_mod, sub_mod};
use crate::reconstruct::HasseWittMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ZetaRecord {
    pub p: u64,
    /// Coefficients of det(xI - W_p) mod p, x^0 first, monic of degree g.
    pub charpoly_modp: Vec<u64>,
    /// Coefficients of det(I - T W_p) mod p, T^0 first (constant term 1).
    pub lp_modp: Vec<u64>,
    /// a_p with |a_p| <= 2g sqrt(p), present when p > 16g^2.
    pub trace_lifted: Option<i64>,
    /// -a_p / sqrt(p), present with the trace.
    pub a1: Option<f64>,
}

/// Characteristic polynomial of a square matrix mod p: similarity reduction
/// to upper Hessenberg form, then the standard leading-minor recurrence.
pub fn charpoly_modp(m: &[Vec<u64>], p: u64) -> Vec<u64> {
    let g = m.len();
    let mut h: Vec<Vec<u64>> = m.to_vec();
    for col in 0..g.saturating_sub(2) {
        let Some(pivot) = (col + 1..g).find(|&i| h[i][col] != 0) else {
            continue;
        };
        if pivot != col + 1 {
            h.swap(col + 1, pivot);
            for row in h.iter_mut() {
                row.swap(col + 1, pivot);
            }
        }
        let inv = mod_inverse(h[col + 1][col], p).expect("pivot invertible");
        for i in col + 2..g {
            let f = mul_mod(h[i][col], inv, p);
            if f == 0 {
                continue;
            }
            for j in 0..g {
                let s = mul_mod(f, h[col + 1][j], p);
                h[i][j] = sub_mod(h[i][j], s, p);
            }
            for row in h.iter_mut() {
                let s = mul_mod(f, row[i], p);
                row[col + 1] = add_mod(row[col + 1], s, p);
            }
        }
    }

    // p_k(x) = (x - h_kk) p_{k-1} - sum_m h_{k-m,k} (prod of subdiagonals) p_{k-m-1}
    let mut polys: Vec<Vec<u64>> = vec![vec![1 % p]];
    for k in 1..=g {
        let mut next = vec![0u64; k + 1];
        let prev = &polys[k - 1];
        for (i, &c) in prev.iter().enumerate() {
            next[i + 1] = add_mod(next[i + 1], c, p);
            next[i] = sub_mod(next[i], mul_mod(h[k - 1][k - 1], c, p), p);
        }
        let mut subdiag = 1u64;
        for m in 1..k {
            subdiag = mul_mod(subdiag, h[k - m][k - m - 1], p);
            if subdiag == 0 {
                break;
            }
            let coeff = mul_mod(h[k - m - 1][k - 1], subdiag, p);
            for (i, &c) in polys[k - m - 1].iter().enumerate() {
                next[i] = sub_mod(next[i], mul_mod(coeff, c, p), p);
            }
        }
        polys.push(next);
    }
    polys.pop().unwrap()
}

/// trace(W_p) as a least non-negative residue.
pub fn trace_modp(w: &HasseWittMatrix) -> u64 {
    w.entries
        .iter()
        .enumerate()
        .fold(0, |acc, (i, row)| add_mod(acc, row[i], w.p))
}

/// The unique a_p = trace(W_p) mod p with |a_p| <= 2g sqrt(p), when p is
/// large enough (p > 16g^2) for the Weil interval to contain one residue.
pub fn lift_trace(trace: u64, g: usize, p: u64) -> Option<i64> {
    if p <= 16 * (g * g) as u64 {
        return None;
    }
    let bound = 4 * (g * g) as i128 * p as i128;
    let fits = |t: i64| (t as i128) * (t as i128) <= bound;
    let t0 = trace as i64;
    let t1 = t0 - p as i64;
    match (fits(t0), fits(t1)) {
        (true, false) => Some(t0),
        (false, true) => Some(t1),
        _ => unreachable!("Weil interval shorter than p admits one candidate"),
    }
}

/// Full zeta record for one matrix.
pub fn zeta_record(w: &HasseWittMatrix) -> ZetaRecord {
    let g = w.genus();
    let chi = charpoly_modp(&w.entries, w.p);
    let lp: Vec<u64> = chi.iter().rev().copied().collect();
    let trace_lifted = lift_trace(trace_modp(w), g, w.p);
    let a1 = trace_lifted.map(|t| -(t as f64) / (w.p as f64).sqrt());
    ZetaRecord {
        p: w.p,
        charpoly_modp: chi,
        lp_modp: lp,
        trace_lifted,
        a1,
    }
}

/// One bin of an a1 histogram over [-2g, 2g].
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: u64,
    pub density: f64,
}

/// Bin the a1 values of records with a lifted trace into `bins` equal-width
/// bins over [-2g, 2g]; bins are half-open, the last one closed.
pub fn a1_histogram(records: &[ZetaRecord], g: usize, bins: usize) -> Result<Vec<HistogramBin>> {
    let values: Vec<f64> = records.iter().filter_map(|r| r.a1).collect();
    if values.is_empty() || bins == 0 {
        return Err(Error::EmptyInput);
    }
    let lo = -(2.0 * g as f64);
    let width = 4.0 * g as f64 / bins as f64;
    let mut counts = vec![0u64; bins];
    for &a in &values {
        let idx = (((a - lo) / width).floor() as i64).clamp(0, bins as i64 - 1) as usize;
        counts[idx] += 1;
    }
    let total = values.len() as f64;
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistogramBin {
            lo: lo + i as f64 * width,
            hi: lo + (i + 1) as f64 * width,
            count,
            density: count as f64 / (total * width),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reconstruct::MatrixProvenance;

    fn wmat(p: u64, entries: Vec<Vec<u64>>) -> HasseWittMatrix {
        HasseWittMatrix {
            p,
            entries,
            provenance: MatrixProvenance::DirectExpansion,
        }
    }

    /// det(xI - M) by permutation expansion; fine for g <= 4.
    fn charpoly_oracle(m: &[Vec<u64>], p: u64) -> Vec<u64> {
        fn perms(n: usize) -> Vec<(Vec<usize>, bool)> {
            if n == 1 {
                return vec![(vec![0], true)];
            }
            let mut out = Vec::new();
            for (perm, even) in perms(n - 1) {
                for pos in 0..n {
                    let mut q = perm.clone();
                    q.insert(pos, n - 1);
                    out.push((q, even == ((n - 1 - pos) % 2 == 0)));
                }
            }
            out
        }
        let g = m.len();
        let mut acc = vec![0u64; g + 1];
        for (perm, even) in perms(g) {
            // product over i of (x*[i==perm_i] - m[i][perm_i])
            let mut poly = vec![if even { 1 % p } else { p - 1 }];
            for (i, &j) in perm.iter().enumerate() {
                let mut next = vec![0u64; poly.len() + 1];
                for (k, &c) in poly.iter().enumerate() {
                    if i == j {
                        next[k + 1] = add_mod(next[k + 1], c, p);
                    }
                    next[k] = sub_mod(next[k], mul_mod(m[i][j], c, p), p);
                }
                poly = next;
            }
            for (k, &c) in poly.iter().enumerate() {
                acc[k] = add_mod(acc[k], c, p);
            }
        }
        acc
    }

    #[test]
    fn zero_matrix_gives_trivial_lp() {
        let w = wmat(13, vec![vec![0, 0], vec![0, 0]]);
        let rec = zeta_record(&w);
        assert_eq!(rec.lp_modp, vec![1, 0, 0]);
        assert_eq!(rec.charpoly_modp, vec![0, 0, 1]);
    }

    #[test]
    fn genus_one_lp() {
        let w = wmat(13, vec![vec![5]]);
        let rec = zeta_record(&w);
        assert_eq!(rec.lp_modp, vec![1, 13 - 5]);
    }

    #[test]
    fn charpoly_matches_permutation_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..60 {
            let g = rng.gen_range(1..=4usize);
            let p = [97u64, 101, 3][rng.gen_range(0..3)];
            let m: Vec<Vec<u64>> = (0..g)
                .map(|_| (0..g).map(|_| rng.gen_range(0..p)).collect())
                .collect();
            assert_eq!(charpoly_modp(&m, p), charpoly_oracle(&m, p), "p = {p}, m = {m:?}");
        }
    }

    #[test]
    fn paper_matrix_charpoly() {
        let m = vec![vec![9u64, 37, 54], vec![70, 62, 16], vec![61, 4, 26]];
        assert_eq!(charpoly_modp(&m, 97), charpoly_oracle(&m, 97));
    }

    #[test]
    fn lp_is_reversed_charpoly() {
        let w = wmat(97, vec![vec![9, 37, 54], vec![70, 62, 16], vec![61, 4, 26]]);
        let rec = zeta_record(&w);
        let mut rev = rec.charpoly_modp.clone();
        rev.reverse();
        assert_eq!(rec.lp_modp, rev);
        assert_eq!(rec.lp_modp[0], 1);
    }

    #[test]
    fn conjugation_invariance() {
        use crate::reconstruct::{mat_mul, translation_matrix};
        let p = 101;
        let m = vec![vec![9u64, 37, 54], vec![70, 62, 16], vec![61, 4, 26]];
        let chi = charpoly_modp(&m, p);
        for a in [-7i64, 1, 3, 50] {
            let t = translation_matrix(a, 3, p);
            let tn = translation_matrix(-a, 3, p);
            let conj = mat_mul(&t.mul(&m, p), &tn.entries, p);
            assert_eq!(charpoly_modp(&conj, p), chi, "a = {a}");
        }
    }

    #[test]
    fn trace_lifting_examples() {
        // g=1, p=101: only t=3 satisfies t^2 <= 4*101
        assert_eq!(lift_trace(3, 1, 101), Some(3));
        assert_eq!(lift_trace(98, 1, 101), Some(-3));
        // p = 5 <= 16: both 2 and -3 lie within the Hasse bound
        assert_eq!(lift_trace(2, 1, 5), None);
    }

    #[test]
    fn genus_one_lifted_traces_match_point_counts() {
        use crate::curve::normalize_i64;
        use crate::driver::compute_matrices;
        use crate::modarith::legendre;
        let cd = normalize_i64(&[1, 1, 0, 1]).unwrap();
        for w in compute_matrices(&cd, 500, None).unwrap() {
            let rec = zeta_record(&w);
            if w.p <= 16 {
                assert_eq!(rec.trace_lifted, None);
                continue;
            }
            let p = w.p;
            let count: i64 = (0..p)
                .map(|x| {
                    let fx = add_mod(add_mod(mul_mod(mul_mod(x, x, p), x, p), x, p), 1, p);
                    1 + legendre(fx as i64, p) as i64
                })
                .sum::<i64>()
                + 1;
            assert_eq!(rec.trace_lifted, Some(p as i64 + 1 - count), "p = {p}");
        }
    }

    #[test]
    fn histogram_basics() {
        let rec = ZetaRecord {
            p: 101,
            charpoly_modp: vec![0, 1],
            lp_modp: vec![1, 0],
            trace_lifted: Some(0),
            a1: Some(0.0),
        };
        let hist = a1_histogram(&[rec.clone()], 1, 4).unwrap();
        assert_eq!(hist.len(), 4);
        let counts: Vec<u64> = hist.iter().map(|b| b.count).collect();
        assert_eq!(counts, vec![0, 0, 1, 0]);
        assert_eq!(hist[0].lo, -2.0);
        assert_eq!(hist[3].hi, 2.0);
        assert_eq!(a1_histogram(&[], 1, 4), Err(Error::EmptyInput));
        // records without a lifted trace carry no mass
        let empty = ZetaRecord { trace_lifted: None, a1: None, ..rec };
        assert_eq!(a1_histogram(&[empty], 1, 4), Err(Error::EmptyInput));
    }

    #[test]
    fn histogram_mass_and_support() {
        use crate::curve::normalize_i64;
        use crate::driver::compute_matrices;
        let cd = normalize_i64(&[1, -1, 0, 0, 0, 0, 0, 1]).unwrap();
        let recs: Vec<ZetaRecord> = compute_matrices(&cd, 2000, None)
            .unwrap()
            .iter()
            .map(zeta_record)
            .collect();
        let lifted = recs.iter().filter(|r| r.a1.is_some()).count() as u64;
        assert!(lifted > 0);
        for r in &recs {
            if let Some(a1) = r.a1 {
                assert!(a1.abs() <= 2.0 * cd.g as f64 + 1e-9, "p = {}", r.p);
            }
        }
        let hist = a1_histogram(&recs, cd.g, 20).unwrap();
        assert_eq!(hist.iter().map(|b| b.count).sum::<u64>(), lifted);
    }
}
