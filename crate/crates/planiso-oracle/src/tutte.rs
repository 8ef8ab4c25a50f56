//! Exact rational Tutte systems.
//!
//! The coordinate system T x = b pins three vertices and places every other
//! vertex at the average of its neighbours (Tutte's spring embedding). Here
//! the system is solved over arbitrary-precision rationals by Gaussian
//! elimination, giving the exact coordinates the engine's modular bundles
//! are compared against.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::graph::{bits, CompactGraph};
use crate::{OracleError, SIZE_LIMIT_EXACT};

pub type Rat = BigRational;

fn rat(i: i64) -> Rat {
    BigRational::from_integer(BigInt::from(i))
}

/// Exact Tutte coordinates with the given pin positions. Returns the x and y
/// coordinate vectors, indexed by vertex.
pub fn oracle_tutte_exact(
    g: &CompactGraph,
    pins: [usize; 3],
    positions: [(Rat, Rat); 3],
) -> Result<(Vec<Rat>, Vec<Rat>), OracleError> {
    let n = g.n();
    if n > SIZE_LIMIT_EXACT {
        return Err(OracleError::SizeLimit);
    }
    assert!(pins.iter().all(|&p| p < n));
    assert!(pins[0] != pins[1] && pins[1] != pins[2] && pins[0] != pins[2]);

    // T with pinned rows replaced by unit rows; two right-hand sides
    let mut a = vec![vec![Rat::zero(); n + 2]; n];
    for v in 0..n {
        if let Some(k) = pins.iter().position(|&p| p == v) {
            a[v][v] = Rat::one();
            a[v][n] = positions[k].0.clone();
            a[v][n + 1] = positions[k].1.clone();
        } else {
            a[v][v] = rat(g.degree(v) as i64);
            for w in bits(g.adj(v)) {
                a[v][w] = -Rat::one();
            }
        }
    }

    // Gaussian elimination, exact pivots
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(OracleError::Singular)?;
        a.swap(col, pivot);
        let inv = a[col][col].clone();
        for j in col..n + 2 {
            a[col][j] = &a[col][j] / &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in col..n + 2 {
                    a[r][j] = &a[r][j] - &f * &a[col][j];
                }
            }
        }
    }
    let xs = a.iter().map(|row| row[n].clone()).collect();
    let ys = a.iter().map(|row| row[n + 1].clone()).collect();
    Ok((xs, ys))
}

/// Canonical pin positions (0,0), (1,0), (0,1).
pub fn canonical_positions() -> [(Rat, Rat); 3] {
    [
        (rat(0), rat(0)),
        (rat(1), rat(0)),
        (rat(0), rat(1)),
    ]
}

/// Reduce a rational mod p; None when the denominator vanishes mod p.
pub fn rational_mod_p(r: &Rat, p: u64) -> Option<u64> {
    use num_traits::ToPrimitive;
    let pb = BigInt::from(p);
    let den = (r.denom() % &pb + &pb) % &pb;
    let num = (r.numer() % &pb + &pb) % &pb;
    let den_u = den.to_u64().unwrap();
    let num_u = num.to_u64().unwrap();
    if den_u == 0 {
        return None;
    }
    // Fermat inverse; p is prime and well below 2^32 in the default window
    let inv = mod_pow(den_u, p - 2, p);
    Some((u128::from(num_u) * u128::from(inv) % u128::from(p)) as u64)
}

fn mod_pow(b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut base = u128::from(b % p);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % u128::from(p);
        }
        base = base * base % u128::from(p);
        e >>= 1;
    }
    acc as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k4_barycentre() {
        let g = CompactGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let (xs, ys) = oracle_tutte_exact(&g, [0, 1, 2], canonical_positions()).unwrap();
        let third = Rat::new(BigInt::from(1), BigInt::from(3));
        assert_eq!(xs[3], third);
        assert_eq!(ys[3], third);
        assert_eq!((xs[1].clone(), ys[1].clone()), (rat(1), rat(0)));
    }

    #[test]
    fn all_pinned_echoes_positions() {
        let g = CompactGraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]);
        let (xs, ys) = oracle_tutte_exact(&g, [0, 1, 2], canonical_positions()).unwrap();
        assert_eq!(xs, vec![rat(0), rat(1), rat(0)]);
        assert_eq!(ys, vec![rat(0), rat(0), rat(1)]);
    }

    #[test]
    fn unpinned_vertices_sit_at_neighbour_averages() {
        // prism, pins on the triangle 0-1-2
        let g = CompactGraph::from_edges(
            6,
            &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)],
        );
        let (xs, ys) = oracle_tutte_exact(&g, [0, 1, 2], canonical_positions()).unwrap();
        for v in 3..6 {
            let deg = rat(g.degree(v) as i64);
            let (mut sx, mut sy) = (Rat::zero(), Rat::zero());
            for w in bits(g.adj(v)) {
                sx += &xs[w];
                sy += &ys[w];
            }
            assert_eq!(&xs[v] * &deg, sx);
            assert_eq!(&ys[v] * &deg, sy);
        }
    }

    #[test]
    fn trees_are_fine_too() {
        // connectivity, not 3-connectivity, is what invertibility needs
        let g = CompactGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (2, 4)]);
        let r = oracle_tutte_exact(&g, [0, 1, 4], canonical_positions());
        assert!(r.is_ok());
    }

    #[test]
    fn mod_p_reduction() {
        let third = Rat::new(BigInt::from(1), BigInt::from(3));
        // 1/3 mod 7 = 5
        assert_eq!(rational_mod_p(&third, 7), Some(5));
        let seventh = Rat::new(BigInt::from(1), BigInt::from(7));
        assert_eq!(rational_mod_p(&seventh, 7), None);
        assert_eq!(rational_mod_p(&rat(-1), 7), Some(6));
    }
}
