//! Benchmark workloads: the dimension-vs-gcd scan over random tree
//! samples and the staircase family.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::consensus::median_of_ultrametrics;
use crate::error::Result;
use crate::fw::{dimension, fw_polytrope, tropical_vertices, FacetMethod};
use crate::instances::staircase;
use crate::trees::{random_equidistant_tree, tree_to_ultrametric, Ultrametric};

pub const GCD_SCAN_HEADER: &str = "m,dim,vertices,micros";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanRow {
    pub m: usize,
    pub dim: usize,
    pub vertices: usize,
    pub micros: u128,
}

/// `m` random equidistant trees on `n_taxa` leaves for each `m`, timing
/// the polytrope and median computation. Each `m` draws from its own
/// stream derived from `seed`, so rows do not depend on the range scanned.
pub fn bench_gcd_scan(n_taxa: usize, ms: impl IntoIterator<Item = usize>, seed: u64) -> Result<Vec<ScanRow>> {
    ms.into_iter()
        .map(|m| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(m as u64);
            let inputs: Vec<Ultrametric> = (0..m)
                .map(|_| tree_to_ultrametric(&random_equidistant_tree(&mut rng, n_taxa)))
                .collect::<Result<_>>()?;
            let start = Instant::now();
            let result = median_of_ultrametrics(&inputs, None, FacetMethod::default())?;
            let micros = start.elapsed().as_micros();
            Ok(ScanRow { m, dim: result.fw_dimension, vertices: result.tropical_vertex_count, micros })
        })
        .collect()
}

pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from(GCD_SCAN_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.m, r.dim, r.vertices, r.micros));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaircaseRow {
    pub m: usize,
    pub n: usize,
    pub dim: usize,
    pub vertices: usize,
    pub micros: u128,
}

pub fn bench_staircase(m: usize, n: usize) -> Result<StaircaseRow> {
    let sites = staircase(m, n);
    let start = Instant::now();
    let p = fw_polytrope(&sites)?;
    let vertices = tropical_vertices(&p).len();
    let micros = start.elapsed().as_micros();
    Ok(StaircaseRow { m, n, dim: dimension(&p), vertices, micros })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;

    fn columns(rows: &[ScanRow]) -> Vec<(usize, usize, usize)> {
        rows.iter().map(|r| (r.m, r.dim, r.vertices)).collect()
    }

    #[test]
    fn scan_is_seeded_and_respects_the_gcd_bound() {
        let a = bench_gcd_scan(4, 1..=12, 7).unwrap();
        let b = bench_gcd_scan(4, 1..=12, 7).unwrap();
        assert_eq!(columns(&a), columns(&b));
        for r in &a {
            assert!(r.dim < r.m.gcd(&6).min(3), "{r:?}");
        }
        let single = bench_gcd_scan(4, [9], 7).unwrap();
        assert_eq!(columns(&single), columns(&a[8..9]));
    }

    #[test]
    fn csv_layout() {
        let rows = vec![ScanRow { m: 3, dim: 0, vertices: 1, micros: 12 }];
        assert_eq!(scan_csv(&rows), "m,dim,vertices,micros\n3,0,1,12\n");
    }

    #[test]
    fn staircase_six_by_nine() {
        let r = bench_staircase(6, 9).unwrap();
        assert_eq!(r.dim, 2);
    }
}
