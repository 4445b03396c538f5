//! Reference and random instances: the five-site configuration used
//! throughout the tests, the staircase family, and seeded random sites.

use rand::Rng;

use crate::rational::{int, ratio, Rational};
use crate::tropical::{SiteMatrix, TropicalPoint};

/// Five sites in the 3-dimensional torus whose unique Fermat–Weber point
/// is `(9, -6, -3)`.
pub fn example_sites() -> SiteMatrix {
    SiteMatrix::from_ints(&[&[14, -7, -7], &[13, -14, 1], &[11, -13, 2], &[10, 1, -11], &[3, -3, 0]])
        .expect("valid fixture")
}

/// `v_ij = (i - 1)(j - 1)`: points on the tropical moment curve. The
/// Fermat–Weber set is a cube of dimension `gcd(m, n) - 1`.
pub fn staircase(m: usize, n: usize) -> SiteMatrix {
    let rows = (0..m).map(|i| (0..n).map(|j| int((i * j) as i64)).collect()).collect();
    SiteMatrix::new(rows).expect("staircase needs m >= 1 and n >= 2")
}

/// Entries `p / q` with `|p| <= range * q` and `q` in `1..=max_denom`.
pub fn random_rational<R: Rng + ?Sized>(rng: &mut R, range: i64, max_denom: i64) -> Rational {
    let q = rng.gen_range(1..=max_denom.max(1));
    let p = rng.gen_range(-range * q..=range * q);
    ratio(p, q)
}

pub fn random_point<R: Rng + ?Sized>(rng: &mut R, n: usize, range: i64, max_denom: i64) -> TropicalPoint {
    let raw = (0..n).map(|_| random_rational(rng, range, max_denom)).collect();
    TropicalPoint::normalize(raw).expect("n >= 2")
}

pub fn random_sites<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize, range: i64, max_denom: i64) -> SiteMatrix {
    let rows = (0..m).map(|_| (0..n).map(|_| random_rational(rng, range, max_denom)).collect()).collect();
    SiteMatrix::new(rows).expect("m >= 1 and n >= 2")
}
