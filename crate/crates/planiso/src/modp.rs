//! Arithmetic modulo a prime, and dense matrices over Z/p.
//!
//! Primes here are small (they fit comfortably in u64 with room for u128
//! intermediates), so a plain dense representation with Gaussian
//! elimination is the right tool. Nothing in this module knows about
//! graphs; it is the numeric substrate for the Tutte machinery.

use crate::EngineError;

/// x + y mod p.
#[inline]
pub fn add(x: u64, y: u64, p: u64) -> u64 {
    let s = x + y;
    if s >= p { s - p } else { s }
}

/// x - y mod p.
#[inline]
pub fn sub(x: u64, y: u64, p: u64) -> u64 {
    if x >= y { x - y } else { x + p - y }
}

/// x * y mod p, via u128.
#[inline]
pub fn mul(x: u64, y: u64, p: u64) -> u64 {
    ((x as u128 * y as u128) % p as u128) as u64
}

/// x^e mod p.
pub fn pow(mut x: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    x %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, x, p);
        }
        x = mul(x, x, p);
        e >>= 1;
    }
    acc
}

/// Multiplicative inverse mod a prime, or None for zero.
pub fn inv(x: u64, p: u64) -> Option<u64> {
    let x = x % p;
    if x == 0 {
        None
    } else {
        Some(pow(x, p - 2, p))
    }
}

/// Reduces a signed integer into [0, p).
#[inline]
pub fn reduce_i64(x: i64, p: u64) -> u64 {
    let r = x.rem_euclid(p as i64);
    r as u64
}

/// Deterministic primality by trial division; fine for the sizes we draw.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// The first prime >= n, scanning upward.
pub fn next_prime_at_least(mut n: u64) -> u64 {
    if n <= 2 {
        return 2;
    }
    if n % 2 == 0 {
        n += 1;
    }
    while !is_prime(n) {
        n += 2;
    }
    n
}

/// A dense square-free-form matrix over Z/p, row major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZpMat {
    pub rows: usize,
    pub cols: usize,
    pub p: u64,
    data: Vec<u64>,
}

impl ZpMat {
    pub fn zero(rows: usize, cols: usize, p: u64) -> Self {
        ZpMat { rows, cols, p, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize, p: u64) -> Self {
        let mut m = ZpMat::zero(n, n, p);
        for i in 0..n {
            m.set(i, i, 1 % p);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u64>], p: u64) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = ZpMat::zero(r, c, p);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, x % p);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: u64) {
        self.data[i * self.cols + j] = x % self.p;
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, x: u64) {
        let cur = self.get(i, j);
        self.data[i * self.cols + j] = add(cur, x % self.p, self.p);
    }

    #[inline]
    pub fn sub_at(&mut self, i: usize, j: usize, x: u64) {
        let cur = self.get(i, j);
        self.data[i * self.cols + j] = sub(cur, x % self.p, self.p);
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> ZpMat {
        let mut t = ZpMat::zero(self.cols, self.rows, self.p);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, other: &ZpMat) -> ZpMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        assert_eq!(self.p, other.p, "modulus mismatch");
        let p = self.p;
        let mut out = ZpMat::zero(self.rows, other.cols, p);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b != 0 {
                        out.add_at(i, j, mul(a, b, p));
                    }
                }
            }
        }
        out
    }

    pub fn add_mat(&self, other: &ZpMat) -> ZpMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.add_at(i, j, other.get(i, j));
            }
        }
        out
    }

    pub fn sub_mat(&self, other: &ZpMat) -> ZpMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.sub_at(i, j, other.get(i, j));
            }
        }
        out
    }

    pub fn neg(&self) -> ZpMat {
        let mut out = ZpMat::zero(self.rows, self.cols, self.p);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, sub(0, self.get(i, j), self.p));
            }
        }
        out
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting (any
    /// nonzero pivot works over a field).
    pub fn inverse(&self) -> Result<ZpMat, EngineError> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let p = self.p;
        let mut a = self.clone();
        let mut b = ZpMat::identity(n, p);
        for col in 0..n {
            let pivot = (col..n).find(|&r| a.get(r, col) != 0);
            let pivot = match pivot {
                Some(r) => r,
                None => return Err(EngineError::NotInvertible),
            };
            if pivot != col {
                for j in 0..n {
                    let (x, y) = (a.get(col, j), a.get(pivot, j));
                    a.set(col, j, y);
                    a.set(pivot, j, x);
                    let (x, y) = (b.get(col, j), b.get(pivot, j));
                    b.set(col, j, y);
                    b.set(pivot, j, x);
                }
            }
            let pinv = inv(a.get(col, col), p).expect("pivot is nonzero");
            for j in 0..n {
                a.set(col, j, mul(a.get(col, j), pinv, p));
                b.set(col, j, mul(b.get(col, j), pinv, p));
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col);
                if f == 0 {
                    continue;
                }
                for j in 0..n {
                    let s = mul(f, a.get(col, j), p);
                    a.sub_at(r, j, s);
                    let s = mul(f, b.get(col, j), p);
                    b.sub_at(r, j, s);
                }
            }
        }
        Ok(b)
    }

    pub fn is_identity(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                let want = if i == j { 1 % self.p } else { 0 };
                if self.get(i, j) != want {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops_mod_seven() {
        let p = 7;
        assert_eq!(add(5, 4, p), 2);
        assert_eq!(sub(2, 5, p), 4);
        assert_eq!(mul(3, 5, p), 1);
        assert_eq!(inv(3, p), Some(5));
        assert_eq!(inv(0, p), None);
        assert_eq!(pow(3, 6, p), 1);
    }

    #[test]
    fn one_by_one_inverse_mod_seven() {
        let m = ZpMat::from_rows(&[vec![2]], 7);
        let inv = m.inverse().unwrap();
        assert_eq!(inv.get(0, 0), 4);
    }

    #[test]
    fn inverse_roundtrip() {
        let p = 1_048_583; // prime just above 2^20
        let m = ZpMat::from_rows(
            &[
                vec![3, 1, 0, 2],
                vec![1, 4, 1, 0],
                vec![0, 1, 5, 1],
                vec![2, 0, 1, 6],
            ],
            p,
        );
        let mi = m.inverse().unwrap();
        assert!(m.matmul(&mi).is_identity());
        assert!(mi.matmul(&m).is_identity());
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let m = ZpMat::from_rows(&[vec![1, 2], vec![2, 4]], 5);
        assert_eq!(m.inverse(), Err(EngineError::NotInvertible));
    }

    #[test]
    fn singular_only_mod_p() {
        // det = 7, invertible over Q but zero mod 7.
        let m = ZpMat::from_rows(&[vec![3, 1], vec![2, 3]], 7);
        assert_eq!(m.inverse(), Err(EngineError::NotInvertible));
        let m5 = ZpMat::from_rows(&[vec![3, 1], vec![2, 3]], 5);
        assert!(m5.inverse().is_ok());
    }

    #[test]
    fn primality_and_scanning() {
        assert!(is_prime(2));
        assert!(is_prime(1_048_583));
        assert!(!is_prime(1));
        assert!(!is_prime(1_048_585));
        assert_eq!(next_prime_at_least(1 << 20), 1_048_583);
        assert_eq!(next_prime_at_least(5), 5);
        assert_eq!(next_prime_at_least(6), 7);
    }

    #[test]
    fn matmul_against_hand_product() {
        let p = 11;
        let a = ZpMat::from_rows(&[vec![1, 2], vec![3, 4]], p);
        let b = ZpMat::from_rows(&[vec![5, 6], vec![7, 8]], p);
        let c = a.matmul(&b);
        assert_eq!(c.get(0, 0), (1 * 5 + 2 * 7) % 11);
        assert_eq!(c.get(0, 1), (1 * 6 + 2 * 8) % 11);
        assert_eq!(c.get(1, 0), (3 * 5 + 4 * 7) % 11);
        assert_eq!(c.get(1, 1), (3 * 6 + 4 * 8) % 11);
    }
}
