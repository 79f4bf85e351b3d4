//! Reconstruction of the full Hasse-Witt matrix from the first rows of g
//! translated curves.
//!
//! W_p(a) = T(a) W_p T(-a) with T(a) the upper-triangular binomial matrix,
//! so the first rows of g translates determine W_p column by column through
//! one Vandermonde solve per column.

use rug::Integer;

use crate::firstrow::HasseWittRow;
use crate::modarith::{mod_inverse, mul_mod, pow_mod, reduce_int, sub_mod};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixProvenance {
    Reconstructed,
    DirectExpansion,
    SinglePrimeWhole,
}

/// The g x g Hasse-Witt matrix W_p = [w_ij], entries reduced mod p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HasseWittMatrix {
    pub p: u64,
    pub entries: Vec<Vec<u64>>,
    pub provenance: MatrixProvenance,
}

impl HasseWittMatrix {
    pub fn genus(&self) -> usize {
        self.entries.len()
    }
}

/// The conjugating matrix T(a) with t_ij = C(j-1, i-1) a^{j-i}, upper
/// triangular with unit diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationMatrix {
    pub a: i64,
    pub entries: Vec<Vec<u64>>,
}

/// Pascal's triangle of exact binomial coefficients, rows 0..=n.
pub fn pascal(n: usize) -> Vec<Vec<Integer>> {
    let mut rows: Vec<Vec<Integer>> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut row = vec![Integer::from(1); i + 1];
        for j in 1..i {
            row[j] = Integer::from(&rows[i - 1][j - 1] + &rows[i - 1][j]);
        }
        rows.push(row);
    }
    rows
}

pub fn translation_matrix(a: i64, g: usize, p: u64) -> TranslationMatrix {
    let binom = pascal(g.saturating_sub(1));
    let a_res = (a % p as i64 + p as i64) as u64 % p;
    let entries = (1..=g)
        .map(|i| {
            (1..=g)
                .map(|j| {
                    if j < i {
                        0
                    } else {
                        let b = reduce_int(&binom[j - 1][i - 1], p);
                        mul_mod(b, pow_mod(a_res, (j - i) as u64, p), p)
                    }
                })
                .collect()
        })
        .collect();
    TranslationMatrix { a, entries }
}

impl TranslationMatrix {
    /// self * rhs mod p.
    pub fn mul(&self, rhs: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
        mat_mul(&self.entries, rhs, p)
    }
}

pub fn mat_mul(a: &[Vec<u64>], b: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let g = a.len();
    (0..g)
        .map(|i| {
            (0..g)
                .map(|j| {
                    (0..g).fold(0u64, |acc, k| {
                        crate::modarith::add_mod(acc, mul_mod(a[i][k], b[k][j], p), p)
                    })
                })
                .collect()
        })
        .collect()
}

/// The correction w_j(a) = sum_{l < j} C(j-1, l-1) (-a)^{j-l} beta_l(a)
/// with beta_l(a) = sum_k a^{k-1} w_kl; depends only on a and the first
/// j-1 columns. `cols[l-1][k-1]` holds w_kl. Columns are 1-based in j.
pub fn correction_term(j: usize, a: i64, cols: &[Vec<u64>], p: u64) -> u64 {
    debug_assert!(cols.len() >= j - 1);
    let binom = pascal(j.saturating_sub(1));
    let a_res = (a % p as i64 + p as i64) as u64 % p;
    let neg_a = (p - a_res) % p;
    let mut acc = 0u64;
    for l in 1..j {
        let beta = cols[l - 1]
            .iter()
            .enumerate()
            .fold(0u64, |s, (k, &w)| {
                crate::modarith::add_mod(s, mul_mod(pow_mod(a_res, k as u64, p), w, p), p)
            });
        let coeff = mul_mod(
            reduce_int(&binom[j - 1][l - 1], p),
            pow_mod(neg_a, (j - l) as u64, p),
            p,
        );
        acc = crate::modarith::add_mod(acc, mul_mod(coeff, beta, p), p);
    }
    acc
}

/// Inverse of a g x g matrix mod p by Gauss-Jordan elimination; the caller
/// guarantees invertibility (Vandermonde with distinct nodes).
fn invert_matrix(m: &[Vec<u64>], p: u64) -> Result<Vec<Vec<u64>>> {
    let g = m.len();
    let mut aug: Vec<Vec<u64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..g).map(|j| u64::from(i == j)));
            r
        })
        .collect();
    for col in 0..g {
        let pivot = (col..g)
            .find(|&i| aug[i][col] != 0)
            .ok_or(Error::NotInvertible(0, p))?;
        aug.swap(col, pivot);
        let inv = mod_inverse(aug[col][col], p)?;
        for x in aug[col].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        for i in 0..g {
            if i == col || aug[i][col] == 0 {
                continue;
            }
            let f = aug[i][col];
            for j in 0..2 * g {
                let s = mul_mod(f, aug[col][j], p);
                aug[i][j] = sub_mod(aug[i][j], s, p);
            }
        }
    }
    Ok(aug.into_iter().map(|r| r[g..].to_vec()).collect())
}

/// Recover W_p from first rows of the translates y^2 = f(x + a_i), solving
/// for the columns successively: V(a_1..a_g) * col_j = [w_{1j}(a_i) - w_j(a_i)].
pub fn reconstruct_matrix(rows: &[HasseWittRow], p: u64) -> Result<HasseWittMatrix> {
    let g = rows.len();
    debug_assert!(rows.iter().all(|r| r.p == p && r.entries.len() == g));
    let a_res: Vec<u64> = rows
        .iter()
        .map(|r| (r.a % p as i64 + p as i64) as u64 % p)
        .collect();
    for i in 0..g {
        for j in 0..i {
            if a_res[i] == a_res[j] {
                return Err(Error::DuplicateTranslations(p));
            }
        }
    }
    let vandermonde: Vec<Vec<u64>> = a_res
        .iter()
        .map(|&a| (0..g).map(|k| pow_mod(a, k as u64, p)).collect())
        .collect();
    let vinv = invert_matrix(&vandermonde, p)?;

    let mut cols: Vec<Vec<u64>> = Vec::with_capacity(g);
    for j in 1..=g {
        let rhs: Vec<u64> = rows
            .iter()
            .map(|row| sub_mod(row.entries[j - 1], correction_term(j, row.a, &cols, p), p))
            .collect();
        let col: Vec<u64> = (0..g)
            .map(|k| {
                rhs.iter().enumerate().fold(0u64, |acc, (i, &b)| {
                    crate::modarith::add_mod(acc, mul_mod(vinv[k][i], b, p), p)
                })
            })
            .collect();
        cols.push(col);
    }
    let entries: Vec<Vec<u64>> = (0..g).map(|i| (0..g).map(|j| cols[j][i]).collect()).collect();
    Ok(HasseWittMatrix {
        p,
        entries,
        provenance: MatrixProvenance::Reconstructed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::firstrow::{compute_first_row_single, HasseWittRow, RowProvenance};

    fn row(p: u64, a: i64, entries: Vec<u64>) -> HasseWittRow {
        HasseWittRow {
            p,
            a,
            entries,
            provenance: RowProvenance::SinglePrime,
        }
    }

    #[test]
    fn translation_identity_and_pascal_row() {
        let t0 = translation_matrix(0, 3, 97);
        assert_eq!(t0.entries, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let t1 = translation_matrix(1, 3, 97);
        assert_eq!(t1.entries, vec![vec![1, 1, 1], vec![0, 1, 2], vec![0, 0, 1]]);
    }

    #[test]
    fn translation_inverse_and_composition() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let id = translation_matrix(0, 4, 101).entries;
        for _ in 0..30 {
            let a = rng.gen_range(-100i64..=100);
            let b = rng.gen_range(-100i64..=100);
            let ta = translation_matrix(a, 4, 101);
            let tna = translation_matrix(-a, 4, 101);
            assert_eq!(ta.mul(&tna.entries, 101), id);
            let tb = translation_matrix(b, 4, 101);
            let tab = translation_matrix(a + b, 4, 101);
            assert_eq!(ta.mul(&tb.entries, 101), tab.entries);
        }
    }

    #[test]
    fn correction_terms_paper_example() {
        // columns of W_97 = [[9,37,54],[70,62,16],[61,4,26]]
        let cols = vec![vec![9u64, 70, 61], vec![37, 62, 4], vec![54, 16, 26]];
        assert_eq!(correction_term(1, 1, &cols, 97), 0);
        assert_eq!(correction_term(2, 0, &cols, 97), 0);
        assert_eq!(correction_term(2, 1, &cols, 97), 54);
        assert_eq!(correction_term(2, 2, &cols, 97), 87);
        assert_eq!(correction_term(3, 1, &cols, 97), 31);
        assert_eq!(correction_term(3, 2, &cols, 97), 88);
    }

    #[test]
    fn paper_example_reconstruction() {
        let rows = vec![
            row(97, 0, vec![9, 37, 54]),
            row(97, 1, vec![43, 60, 30]),
            row(97, 2, vec![5, 70, 84]),
        ];
        let w = reconstruct_matrix(&rows, 97).unwrap();
        assert_eq!(w.entries, vec![vec![9, 37, 54], vec![70, 62, 16], vec![61, 4, 26]]);
    }

    #[test]
    fn genus_one_is_identity_operation() {
        let rows = vec![row(13, 0, vec![7])];
        let w = reconstruct_matrix(&rows, 13).unwrap();
        assert_eq!(w.entries, vec![vec![7]]);
    }

    #[test]
    fn duplicate_translations_rejected() {
        let rows = vec![row(5, 1, vec![1, 2]), row(5, 6, vec![3, 4])];
        assert_eq!(reconstruct_matrix(&rows, 5), Err(Error::DuplicateTranslations(5)));
    }

    #[test]
    fn round_trip_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let g = rng.gen_range(1..=4usize);
            let p = [101u64, 211, 1009][rng.gen_range(0..3)];
            let w: Vec<Vec<u64>> = (0..g)
                .map(|_| (0..g).map(|_| rng.gen_range(0..p)).collect())
                .collect();
            // synthesize first rows of T(a) W T(-a)
            let rows: Vec<HasseWittRow> = (0..g as i64)
                .map(|a| {
                    let ta = translation_matrix(a, g, p);
                    let tna = translation_matrix(-a, g, p);
                    let conj = mat_mul(&ta.mul(&w, p), &tna.entries, p);
                    row(p, a, conj[0].clone())
                })
                .collect();
            let got = reconstruct_matrix(&rows, p).unwrap();
            assert_eq!(got.entries, w);
        }
    }

    #[test]
    fn reconstruction_from_single_prime_rows_matches_oracle() {
        use crate::curve::normalize_i64;
        use crate::modarith::direct_expansion_matrix;
        // random-looking fixed genus-2 curve
        let cd = normalize_i64(&[3, -4, 1, 7, 0, 1]).unwrap();
        let p = 101;
        assert!(cd.is_good_prime(p));
        let rows: Vec<HasseWittRow> = (0..cd.g as i64)
            .map(|a| {
                let mut r =
                    compute_first_row_single(&cd.translated(a).unwrap().reduce_mod(p), p).unwrap();
                r.a = a;
                r
            })
            .collect();
        let got = reconstruct_matrix(&rows, p).unwrap();
        assert_eq!(got.entries, direct_expansion_matrix(&cd.reduce_mod(p), cd.g, p));
    }
}
