//! Tiny dense GF(2) linear algebra for syndrome/correction solves.

/// Solve `A·x = b` over GF(2). `a` holds rows of length `vars`. Returns one
/// solution (free variables set to 0), or `None` if the system is
/// inconsistent.
pub(crate) fn solve(a: &[Vec<bool>], b: &[bool], vars: usize) -> Option<Vec<bool>> {
    let rows = a.len();
    debug_assert_eq!(rows, b.len());
    // Augmented matrix.
    let mut m: Vec<Vec<bool>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            debug_assert_eq!(row.len(), vars);
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    let mut pivot_col_of_row = Vec::new();
    let mut rank = 0usize;
    for col in 0..vars {
        let Some(pivot) = (rank..rows).find(|&r| m[r][col]) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in 0..rows {
            if r != rank && m[r][col] {
                let (head, tail) = if r < rank {
                    let (a, b) = m.split_at_mut(rank);
                    (&mut a[r], &b[0])
                } else {
                    let (a, b) = m.split_at_mut(r);
                    (&mut b[0], &a[rank])
                };
                for c in col..=vars {
                    head[c] ^= tail[c];
                }
            }
        }
        pivot_col_of_row.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    // Inconsistent if a zero row has rhs 1.
    for r in rank..rows {
        if m[r][vars] && m[r][..vars].iter().all(|&v| !v) {
            return None;
        }
    }
    let mut x = vec![false; vars];
    for (r, &col) in pivot_col_of_row.iter().enumerate() {
        x[col] = m[r][vars];
    }
    Some(x)
}

/// Rank of a GF(2) matrix given as rows of equal length.
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn rank(a: &[Vec<bool>]) -> usize {
    if a.is_empty() {
        return 0;
    }
    let vars = a[0].len();
    let mut m: Vec<Vec<bool>> = a.to_vec();
    let mut rank = 0usize;
    for col in 0..vars {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][col]) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in 0..m.len() {
            if r != rank && m[r][col] {
                let (head, tail) = if r < rank {
                    let (x, y) = m.split_at_mut(rank);
                    (&mut x[r], &y[0])
                } else {
                    let (x, y) = m.split_at_mut(r);
                    (&mut y[0], &x[rank])
                };
                for c in col..vars {
                    head[c] ^= tail[c];
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_systems() {
        // x0 ⊕ x1 = 1, x1 = 1 → x0 = 0.
        let a = vec![vec![true, true], vec![false, true]];
        let x = solve(&a, &[true, true], 2).unwrap();
        assert_eq!(x, vec![false, true]);

        // Inconsistent: x0 = 0 and x0 = 1.
        let a = vec![vec![true], vec![true]];
        assert!(solve(&a, &[false, true], 1).is_none());

        // Underdetermined: returns some valid solution.
        let a = vec![vec![true, true, false]];
        let x = solve(&a, &[true], 3).unwrap();
        assert!(x[0] ^ x[1]);
    }

    #[test]
    fn rank_counts_independent_rows() {
        let a = vec![
            vec![true, false, true],
            vec![false, true, true],
            vec![true, true, false], // sum of the first two
        ];
        assert_eq!(rank(&a), 2);
        assert_eq!(rank(&[vec![false, false]]), 0);
    }
}
