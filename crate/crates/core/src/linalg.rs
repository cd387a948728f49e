//! Dense linear algebra over a [`Field`]; matrices are row vectors.

use crate::field::{Elem, Field};

pub type Matrix = Vec<Vec<Elem>>;

/// Reduced row echelon form and the pivot columns.
pub fn rref(f: &Field, m: &Matrix) -> (Matrix, Vec<usize>) {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !f.is_zero(&a[i][c])) else { continue };
        a.swap(r, pr);
        let inv = f.inv(&a[r][c]).unwrap();
        for x in a[r].iter_mut() {
            *x = f.mul(x, &inv);
        }
        for i in 0..rows {
            if i != r && !f.is_zero(&a[i][c]) {
                let factor = a[i][c].clone();
                for j in 0..cols {
                    let t = f.mul(&factor, &a[r][j]);
                    a[i][j] = f.sub(&a[i][j], &t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(f: &Field, m: &Matrix) -> usize {
    rref(f, m).1.len()
}

/// Basis of the right kernel `{v : m v = 0}`, one vector per free column.
pub fn kernel(f: &Field, m: &Matrix, cols: usize) -> Vec<Vec<Elem>> {
    let (r, pivots) = rref(f, m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![f.zero(); cols];
            v[fc] = f.one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(&r[i][fc]);
            }
            v
        })
        .collect()
}

pub fn inverse(f: &Field, m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { f.one() } else { f.zero() }));
            r
        })
        .collect();
    let (r, pivots) = rref(f, &aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn mat_vec(f: &Field, m: &Matrix, v: &[Elem]) -> Vec<Elem> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_and_inverse_small() {
        let f = Field::prime_u64(101).unwrap();
        let e = |x: i64| f.from_i64(x);
        let m = vec![vec![e(1), e(2), e(3)], vec![e(2), e(4), e(6)]];
        assert_eq!(rank(&f, &m), 1);
        let k = kernel(&f, &m, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(mat_vec(&f, &m, v).iter().all(|x| f.is_zero(x)));
        }
        let sq = vec![vec![e(2), e(1)], vec![e(7), e(4)]];
        let inv = inverse(&f, &sq).unwrap();
        let id = mat_vec(&f, &sq, &[inv[0][0].clone(), inv[1][0].clone()]);
        assert_eq!(id, vec![f.one(), f.zero()]);
        assert!(inverse(&f, &vec![vec![e(1), e(2)], vec![e(2), e(4)]]).is_none());
    }
}
