//! Linear congruence systems `A a ≡ b (mod M)` by Smith-style
//! diagonalisation.
//!
//! Entries are kept as representatives in `[0, M)`. Row operations act on
//! the equations (and `b`), column operations on the unknowns (tracked in
//! `V`, so `a = V y`). Division with remainder on representatives is exact
//! integer arithmetic, which is all the Euclidean reduction needs.

use num_integer::Integer;

/// One solution of `A a ≡ b (mod modulus)`, or `None` if the system is
/// inconsistent. Free variables are set to zero.
#[allow(clippy::needless_range_loop)]
pub fn solve_congruences(a: &[Vec<i64>], b: &[i64], modulus: u64) -> Option<Vec<u64>> {
    let m = modulus as i128;
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut mat: Vec<Vec<i128>> = a
        .iter()
        .map(|r| r.iter().map(|&v| (v as i128).rem_euclid(m)).collect())
        .collect();
    let mut rhs: Vec<i128> = b.iter().map(|&v| (v as i128).rem_euclid(m)).collect();
    let mut v: Vec<Vec<i128>> = (0..cols)
        .map(|i| (0..cols).map(|j| (i == j) as i128).collect())
        .collect();

    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero representative in the trailing block
        let Some((pi, pj)) = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| mat[i][j] != 0)
            .min_by_key(|&(i, j)| (mat[i][j], i, j))
        else {
            break;
        };
        mat.swap(t, pi);
        rhs.swap(t, pi);
        for row in mat.iter_mut() {
            row.swap(t, pj);
        }
        for row in v.iter_mut() {
            row.swap(t, pj);
        }
        let p = mat[t][t];
        let mut clean = true;
        for i in t + 1..rows {
            let q = mat[i][t] / p;
            if q != 0 {
                for j in t..cols {
                    mat[i][j] = (mat[i][j] - q * mat[t][j]).rem_euclid(m);
                }
                rhs[i] = (rhs[i] - q * rhs[t]).rem_euclid(m);
            }
            clean &= mat[i][t] == 0;
        }
        for j in t + 1..cols {
            let q = mat[t][j] / p;
            if q != 0 {
                for i in t..rows {
                    mat[i][j] = (mat[i][j] - q * mat[i][t]).rem_euclid(m);
                }
                for row in v.iter_mut() {
                    row[j] = (row[j] - q * row[t]).rem_euclid(m);
                }
            }
            clean &= mat[t][j] == 0;
        }
        if clean {
            t += 1;
        }
    }

    let rank = t;
    let mut y = vec![0i128; cols];
    for i in 0..rank {
        let d = mat[i][i];
        let g = d.gcd(&m);
        if rhs[i] % g != 0 {
            return None;
        }
        let reduced = m / g;
        let inv = mod_inverse(d / g, reduced)?;
        y[i] = ((rhs[i] / g) * inv).rem_euclid(reduced);
    }
    if rhs[rank..].iter().any(|&r| r != 0) {
        return None;
    }
    Some(
        (0..cols)
            .map(|i| (0..cols).fold(0i128, |acc, j| (acc + v[i][j] * y[j]).rem_euclid(m)) as u64)
            .collect(),
    )
}

fn mod_inverse(a: i128, m: i128) -> Option<i128> {
    if m == 1 {
        return Some(0);
    }
    let e = a.rem_euclid(m).extended_gcd(&m);
    (e.gcd == 1).then(|| e.x.rem_euclid(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check(a: &[Vec<i64>], b: &[i64], m: u64, x: &[u64]) -> bool {
        a.iter().zip(b).all(|(row, &bi)| {
            let lhs: i128 = row.iter().zip(x).map(|(&r, &xi)| r as i128 * xi as i128).sum();
            (lhs - bi as i128).rem_euclid(m as i128) == 0
        })
    }

    #[test]
    fn square_root_of_minus_one() {
        // -2a ≡ 1 (mod 2) is inconsistent, -2a ≡ 2 (mod 4) is not
        assert_eq!(solve_congruences(&[vec![-2]], &[1], 2), None);
        let x = solve_congruences(&[vec![-2]], &[2], 4).unwrap();
        assert!(check(&[vec![-2]], &[2], 4, &x));
    }

    #[test]
    fn inconsistent_zero_row() {
        assert_eq!(solve_congruences(&[vec![0, 0]], &[1], 5), None);
        assert_eq!(solve_congruences(&[vec![1, 1], vec![2, 2]], &[1, 1], 4), None);
    }

    proptest! {
        /// Systems built around a planted solution are always solved.
        #[test]
        fn planted_solutions(
            m in 2u64..30,
            rows in prop::collection::vec(prop::collection::vec(-5i64..6, 3), 1..6),
            planted in prop::collection::vec(0u64..30, 3),
        ) {
            let b: Vec<i64> = rows
                .iter()
                .map(|r| r.iter().zip(&planted).map(|(&a, &x)| a * x as i64).sum::<i64>())
                .collect();
            let x = solve_congruences(&rows, &b, m).expect("planted system is consistent");
            prop_assert!(check(&rows, &b, m, &x));
        }
    }
}
