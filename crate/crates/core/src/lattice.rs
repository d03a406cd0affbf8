//! Exact integer arithmetic on lattice vectors.

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i64
}

/// gcd of all components (0 for the zero vector).
pub fn content(v: &[i64]) -> i64 {
    v.iter().fold(0, |g, &x| gcd(g, x))
}

/// Divides by the content; the zero vector is returned unchanged.
pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = content(v);
    if g == 0 {
        return v.to_vec();
    }
    v.iter().map(|&x| x / g).collect()
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det(rows: &[Vec<i64>]) -> i128 {
    let n = rows.len();
    if n == 0 {
        return 1;
    }
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Adjugate matrix: `rows · adj = det · I`.
pub fn adjugate(rows: &[Vec<i64>]) -> Vec<Vec<i128>> {
    let n = rows.len();
    if n == 1 {
        return vec![vec![1]];
    }
    let mut adj = vec![vec![0i128; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<i64>> = rows
                .iter()
                .enumerate()
                .filter(|&(r, _)| r != i)
                .map(|(_, row)| {
                    row.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let cof = det(&minor) * if (i + j) % 2 == 0 { 1 } else { -1 };
            adj[j][i] = cof;
        }
    }
    adj
}

/// Rank of an integer matrix (exact, via rational elimination in i128).
pub fn rank(rows: &[Vec<i64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let (a, b) = (m[r][c], m[i][c]);
                for j in 0..cols {
                    m[i][j] = m[i][j] * a - m[r][j] * b;
                }
                let g = m[i].iter().fold(0i128, |g, &x| gcd128(g, x));
                if g > 1 {
                    m[i].iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

fn gcd128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_and_primitive() {
        assert_eq!(content(&[2, 4]), 2);
        assert_eq!(content(&[-1, -1]), 1);
        assert_eq!(primitive(&[-2, 6, 4]), vec![-1, 3, 2]);
        assert_eq!(content(&[0, 0]), 0);
    }

    #[test]
    fn bareiss_determinant() {
        assert_eq!(det(&[vec![0, 1], vec![1, 0]]), -1);
        assert_eq!(det(&[vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]]), 18);
        assert_eq!(det(&[vec![1, 2], vec![2, 4]]), 0);
    }

    #[test]
    fn adjugate_identity() {
        let m = vec![vec![1, 2, 0], vec![0, 1, -1], vec![3, 0, 1]];
        let adj = adjugate(&m);
        let d = det(&m);
        for i in 0..3 {
            for j in 0..3 {
                let s: i128 = (0..3).map(|k| m[i][k] as i128 * adj[k][j]).sum();
                assert_eq!(s, if i == j { d } else { 0 });
            }
        }
    }

    #[test]
    fn rank_detects_dependence() {
        assert_eq!(rank(&[vec![1, 0], vec![2, 0], vec![-1, 0]]), 1);
        assert_eq!(rank(&[vec![1, 0], vec![0, 1], vec![-1, -1]]), 2);
    }
}
