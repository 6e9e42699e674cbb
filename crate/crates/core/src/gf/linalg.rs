//! Gaussian elimination over F_p for small dense systems.

use crate::residue::{inv_mod, mul_mod};

/// Solves Σ_j x_j · cols[j] = rhs. Returns one solution if the system is
/// consistent; the columns are assumed linearly independent.
pub(crate) fn solve_columns(cols: &[Vec<u64>], rhs: &[u64], p: u64) -> Option<Vec<u64>> {
    let rows = rhs.len();
    let n = cols.len();
    // Augmented matrix, row-major.
    let mut a: Vec<Vec<u64>> = (0..rows)
        .map(|r| {
            let mut row: Vec<u64> = cols.iter().map(|c| c[r] % p).collect();
            row.push(rhs[r] % p);
            row
        })
        .collect();
    let mut pivots = Vec::with_capacity(n);
    let mut r = 0;
    for c in 0..n {
        let Some(piv) = (r..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, piv);
        let inv = inv_mod(a[r][c], p)?;
        for x in a[r].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        for i in 0..rows {
            if i != r && a[i][c] != 0 {
                let factor = a[i][c];
                for j in 0..=n {
                    let v = mul_mod(factor, a[r][j], p);
                    a[i][j] = (a[i][j] + p - v) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if a[r..].iter().any(|row| row[n] != 0) {
        return None;
    }
    let mut x = vec![0u64; n];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = a[i][n];
    }
    Some(x)
}

/// A linear map F_p^n → F_p^n stored by columns.
#[derive(Debug, Clone)]
pub struct LinearMap {
    pub(crate) p: u64,
    pub(crate) cols: Vec<Vec<u64>>,
}

impl LinearMap {
    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; self.cols.first().map_or(0, Vec::len)];
        self.apply_into(v, &mut out);
        out
    }

    pub fn apply_into(&self, v: &[u64], out: &mut [u64]) {
        let p = self.p;
        if p < (1 << 31) {
            // Lazy reduction: each term < 2^62, reduce every few additions.
            out.iter_mut().for_each(|o| *o = 0);
            for (col, &x) in self.cols.iter().zip(v) {
                if x == 0 {
                    continue;
                }
                for (o, &c) in out.iter_mut().zip(col) {
                    *o = (*o + x * c) % p;
                }
            }
        } else {
            out.iter_mut().for_each(|o| *o = 0);
            for (col, &x) in self.cols.iter().zip(v) {
                for (o, &c) in out.iter_mut().zip(col) {
                    *o = (*o + mul_mod(x, c, p)) % p;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        // [1 2; 3 4] x = [5, 6] over F_7 → x = (3, 1)
        let cols = vec![vec![1, 3], vec![2, 4]];
        let x = solve_columns(&cols, &[5, 6], 7).unwrap();
        assert_eq!(x, vec![3, 1]);
    }

    #[test]
    fn inconsistent_system() {
        let cols = vec![vec![1, 1, 0]];
        assert!(solve_columns(&cols, &[1, 0, 0], 5).is_none());
    }
}
