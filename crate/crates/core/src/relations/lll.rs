//! Integral LLL reduction (all arithmetic exact, Lovasz constant 3/4).
//!
//! Works on the Gram-Schmidt data scaled by the leading principal minors
//! `d_i`, so no rational numbers ever appear.

use rug::Integer;

fn dot(a: &[Integer], b: &[Integer]) -> Integer {
    let mut s = Integer::new();
    for (x, y) in a.iter().zip(b) {
        s += Integer::from(x * y);
    }
    s
}

/// Rounds `num / den` to the nearest integer (`den > 0`).
use rug::ops::DivRounding;

fn round_div(num: &Integer, den: &Integer) -> Integer {
    let twice = Integer::from(num * 2u32) + den;
    let two_den = Integer::from(den * 2u32);
    twice.div_floor(two_den)
}

struct State {
    b: Vec<Vec<Integer>>,
    lam: Vec<Vec<Integer>>,
    d: Vec<Integer>,
}

impl State {
    fn red(&mut self, k: usize, l: usize) {
        // indices are 1-based; d[0] = 1
        let two_lam = Integer::from(self.lam[k][l].abs_ref()) * 2u32;
        if two_lam <= self.d[l] {
            return;
        }
        let q = round_div(&self.lam[k][l], &self.d[l]);
        for i in 0..self.b[k].len() {
            let t = Integer::from(&q * &self.b[l][i]);
            self.b[k][i] -= t;
        }
        let t = Integer::from(&q * &self.d[l]);
        self.lam[k][l] -= t;
        for i in 1..l {
            let t = Integer::from(&q * &self.lam[l][i]);
            self.lam[k][i] -= t;
        }
    }

    fn swap(&mut self, k: usize, kmax: usize) {
        self.b.swap(k, k - 1);
        for j in 1..k - 1 {
            let t = self.lam[k][j].clone();
            self.lam[k][j] = std::mem::replace(&mut self.lam[k - 1][j], t);
        }
        let lam = self.lam[k][k - 1].clone();
        let big_b = (Integer::from(&self.d[k - 2] * &self.d[k]) + Integer::from(lam.square_ref())) / &self.d[k - 1];
        for i in k + 1..=kmax {
            let t = self.lam[i][k].clone();
            let lik = (Integer::from(&self.d[k] * &self.lam[i][k - 1]) - Integer::from(&lam * &t)) / &self.d[k - 1];
            let lik1 = (Integer::from(&big_b * &t) + Integer::from(&lam * &lik)) / &self.d[k];
            self.lam[i][k] = lik;
            self.lam[i][k - 1] = lik1;
        }
        self.d[k - 1] = big_b;
    }
}

/// LLL-reduces linearly independent integer row vectors. Returns `None`
/// when the rows are dependent.
pub fn lll_reduce(rows: &[Vec<Integer>]) -> Option<Vec<Vec<Integer>>> {
    let n = rows.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let mut st = State {
        b: std::iter::once(Vec::new()).chain(rows.iter().cloned()).collect(),
        lam: vec![vec![Integer::new(); n + 1]; n + 1],
        d: vec![Integer::new(); n + 1],
    };
    st.d[0] = Integer::from(1);
    st.d[1] = dot(&st.b[1], &st.b[1]);
    if st.d[1] == 0 {
        return None;
    }
    let mut k = 2;
    let mut kmax = 1;
    while k <= n {
        if k > kmax {
            kmax = k;
            for j in 1..=k {
                let mut u = dot(&st.b[k], &st.b[j]);
                for i in 1..j {
                    u = (Integer::from(&st.d[i] * &u) - Integer::from(&st.lam[k][i] * &st.lam[j][i])) / &st.d[i - 1];
                }
                if j < k {
                    st.lam[k][j] = u;
                } else {
                    if u == 0 {
                        return None;
                    }
                    st.d[k] = u;
                }
            }
        }
        loop {
            st.red(k, k - 1);
            // 4 d_k d_{k-2} < 3 d_{k-1}^2 - 4 lam^2
            let lhs = Integer::from(&st.d[k] * &st.d[k - 2]) * 4u32;
            let rhs = Integer::from(st.d[k - 1].square_ref()) * 3u32 - Integer::from(st.lam[k][k - 1].square_ref()) * 4u32;
            if lhs < rhs {
                st.swap(k, kmax);
                k = (k - 1).max(2);
            } else {
                break;
            }
        }
        for l in (1..k - 1).rev() {
            st.red(k, l);
        }
        k += 1;
    }
    Some(st.b.into_iter().skip(1).collect())
}

/// Basis of the integer kernel `{x : M x = 0}` for an integer matrix `M`
/// with `cols` columns, found by reducing `[I | W M^T]` with a large weight.
pub fn integer_kernel(m: &[Vec<Integer>], cols: usize) -> Vec<Vec<Integer>> {
    let mut weight = Integer::from(1) << 64u32;
    for row in m {
        for x in row {
            let a = Integer::from(x.abs_ref());
            if a > weight {
                weight = a;
            }
        }
    }
    let weight = Integer::from(&weight * &weight) * cols as u32;
    let rows: Vec<Vec<Integer>> = (0..cols)
        .map(|i| {
            let mut r = vec![Integer::new(); cols];
            r[i] = Integer::from(1);
            for eq in m {
                r.push(Integer::from(&eq[i] * &weight));
            }
            r
        })
        .collect();
    let reduced = lll_reduce(&rows).expect("identity block keeps rows independent");
    reduced.into_iter().filter(|r| r[cols..].iter().all(|x| *x == 0)).map(|r| r[..cols].to_vec()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(v: &[i64]) -> Vec<Integer> {
        v.iter().map(|&x| Integer::from(x)).collect()
    }

    fn norm2(v: &[Integer]) -> Integer {
        dot(v, v)
    }

    #[test]
    fn reduces_textbook_basis() {
        // Cohen's example style lattice; the reduced first vector is short.
        let rows = vec![iv(&[1, 1, 1]), iv(&[-1, 0, 2]), iv(&[3, 5, 6])];
        let red = lll_reduce(&rows).unwrap();
        assert!(norm2(&red[0]) <= 2);
        let det = |b: &[Vec<Integer>]| {
            let g = |i: usize, j: usize| b[i][j].clone();
            g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1)) - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
                + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
        };
        assert_eq!(det(&rows).abs(), det(&red).abs());
    }

    #[test]
    fn dependent_rows_rejected() {
        assert!(lll_reduce(&[iv(&[1, 2]), iv(&[2, 4])]).is_none());
    }

    #[test]
    fn kernel_of_small_system() {
        // x + 2y - z = 0 and y - w = 0
        let m = vec![iv(&[1, 2, -1, 0]), iv(&[0, 1, 0, -1])];
        let k = integer_kernel(&m, 4);
        assert_eq!(k.len(), 2);
        for v in &k {
            for eq in &m {
                assert_eq!(dot(v, eq), 0);
            }
        }
    }
}
