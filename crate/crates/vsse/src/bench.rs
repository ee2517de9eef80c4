//! Complexity-shape benchmark: per-role wall-clock medians and counted
//! operation costs over synthetic single-keyword databases.
//!
//! The claims under test are shapes, not absolute numbers: the proof stays
//! the same size whatever the result cardinality, the auditor always pays
//! exactly two pairings, the owner pays one multiply-add per returned pair,
//! and the cloud pays one table lookup per pair plus one group
//! multiplication per pair after the first. Wall-clock medians are
//! recorded so the shapes are visible as times too, but assertions should
//! bind to the counted costs wherever possible.

use std::time::Instant;

use rand::{CryptoRng, RngCore};
use serde::Serialize;

use crate::backend::{DocId, Keyword, PlainDb};
use crate::signed::{self, ForwardVKeys, SearchProof};

/// One synthetic database size, measured.
#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    /// Result cardinality |R_w| of the single benched keyword.
    pub result_size: u64,
    /// Median wall-clock per phase, microseconds.
    pub owner_micros: f64,
    pub cloud_micros: f64,
    pub auditor_micros: f64,
    /// Serialized proof size. Constant by construction; recorded to show it.
    pub proof_bytes: usize,
    /// Signature table rows after build. Equals the pair count.
    pub tsig_entries: usize,
    /// Counted costs from the same runs.
    pub owner_mul_adds: u64,
    pub cloud_lookups: u64,
    pub cloud_group_muls: u64,
    pub auditor_pairings: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub repetitions: u32,
    pub rows: Vec<BenchRow>,
}

fn median(mut samples: Vec<f64>) -> f64 {
    samples.sort_by(|a, b| a.total_cmp(b));
    samples[samples.len() / 2]
}

/// Times each role of one verified search over a fresh single-keyword
/// database of `size` pairs, taking medians over `repetitions` runs of
/// the same built store.
fn bench_size<R: RngCore + CryptoRng>(size: u64, repetitions: u32, rng: &mut R) -> BenchRow {
    let keys = ForwardVKeys::generate(rng);
    let w = Keyword::new("bench").expect("fixed keyword");
    let mut db = PlainDb::new();
    let mut seen = std::collections::BTreeSet::new();
    while (db.postings(&w).len() as u64) < size {
        let mut id = [0u8; 16];
        rng.fill_bytes(&mut id);
        if seen.insert(id) {
            db.insert(w.clone(), DocId(id)).expect("fresh id");
        }
    }
    let (structure, states) = signed::build(&keys, &db, rng).expect("build");
    let pk = keys.public_key();

    let mut owner_times = Vec::with_capacity(repetitions as usize);
    let mut cloud_times = Vec::with_capacity(repetitions as usize);
    let mut auditor_times = Vec::with_capacity(repetitions as usize);
    let mut costs = None;

    for _ in 0..repetitions {
        let request = signed::search_request(&keys, signed::StructureKind::Add, &w, &states);

        let t = Instant::now();
        let (result, cloud_half, cloud_cost) =
            signed::cloud_search(&structure, &request).expect("honest store answers");
        cloud_times.push(t.elapsed().as_secs_f64() * 1e6);

        let t = Instant::now();
        let (owner_half, owner_cost) =
            signed::owner_proof(&keys, signed::StructureKind::Add, &w, &result, &states)
                .expect("honest result verifies");
        owner_times.push(t.elapsed().as_secs_f64() * 1e6);

        let proof = SearchProof { cloud_half, owner_half };
        let t = Instant::now();
        let (ok, audit_cost) = signed::audit(&pk, &proof);
        auditor_times.push(t.elapsed().as_secs_f64() * 1e6);
        assert!(ok, "honest bench search must accept");

        costs = Some((proof.to_bytes().len(), owner_cost, cloud_cost, audit_cost));
    }

    let (proof_bytes, owner_cost, cloud_cost, audit_cost) = costs.expect("repetitions >= 1");
    BenchRow {
        result_size: size,
        owner_micros: median(owner_times),
        cloud_micros: median(cloud_times),
        auditor_micros: median(auditor_times),
        proof_bytes,
        tsig_entries: structure.tsig.len(),
        owner_mul_adds: owner_cost.mul_adds,
        cloud_lookups: cloud_cost.lookups,
        cloud_group_muls: cloud_cost.group_muls,
        auditor_pairings: audit_cost.pairings,
    }
}

/// Runs the benchmark over the given sizes. Repetitions are clamped to at
/// least 5 so medians mean something.
pub fn run<R: RngCore + CryptoRng>(sizes: &[u64], repetitions: u32, rng: &mut R) -> BenchReport {
    let repetitions = repetitions.max(5);
    let rows = sizes.iter().map(|&size| bench_size(size, repetitions, rng)).collect();
    BenchReport { repetitions, rows }
}

impl BenchReport {
    /// Least-squares slope of owner time against result size,
    /// microseconds per pair.
    pub fn owner_time_slope(&self) -> f64 {
        let n = self.rows.len() as f64;
        let mean_x = self.rows.iter().map(|r| r.result_size as f64).sum::<f64>() / n;
        let mean_y = self.rows.iter().map(|r| r.owner_micros).sum::<f64>() / n;
        let mut num = 0.0;
        let mut den = 0.0;
        for r in &self.rows {
            let dx = r.result_size as f64 - mean_x;
            num += dx * (r.owner_micros - mean_y);
            den += dx * dx;
        }
        num / den
    }

    /// Ratio of slowest to fastest auditor median across sizes. Near 1
    /// when verification cost is independent of result size.
    pub fn auditor_spread(&self) -> f64 {
        let mut min = f64::INFINITY;
        let mut max = 0.0f64;
        for r in &self.rows {
            min = min.min(r.auditor_micros);
            max = max.max(r.auditor_micros);
        }
        max / min
    }

    pub fn proof_bytes_constant(&self) -> bool {
        self.rows.windows(2).all(|w| w[0].proof_bytes == w[1].proof_bytes)
    }
}

impl std::fmt::Display for BenchReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "{:>8} {:>12} {:>12} {:>14} {:>11} {:>12} {:>9} {:>12} {:>9}",
            "|R_w|",
            "owner us",
            "cloud us",
            "auditor us",
            "proof B",
            "tsig rows",
            "mul-adds",
            "lookups+muls",
            "pairings"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:>8} {:>12.1} {:>12.1} {:>14.1} {:>11} {:>12} {:>9} {:>7}+{:<4} {:>9}",
                r.result_size,
                r.owner_micros,
                r.cloud_micros,
                r.auditor_micros,
                r.proof_bytes,
                r.tsig_entries,
                r.owner_mul_adds,
                r.cloud_lookups,
                r.cloud_group_muls,
                r.auditor_pairings
            )?;
        }
        writeln!(f, "medians of {} repetitions", self.repetitions)
    }
}

/// Deterministic default sizes covering the required decades.
pub const DEFAULT_SIZES: [u64; 3] = [1, 10, 100];

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn report_covers_shapes() {
        let mut rng = ChaCha20Rng::seed_from_u64(90);
        let report = run(&[1, 10, 40], 5, &mut rng);
        assert_eq!(report.rows.len(), 3);
        assert!(report.proof_bytes_constant());
        for row in &report.rows {
            assert_eq!(row.auditor_pairings, 2);
            assert_eq!(row.owner_mul_adds, row.result_size);
            assert_eq!(row.cloud_lookups, row.result_size);
            assert_eq!(row.cloud_group_muls, row.result_size.saturating_sub(1));
            assert_eq!(row.tsig_entries as u64, row.result_size);
            assert_eq!(row.proof_bytes, 80);
        }
        let text = report.to_string();
        assert!(text.contains("pairings"));
    }

    #[test]
    fn repetitions_are_clamped_to_five() {
        let mut rng = ChaCha20Rng::seed_from_u64(91);
        let report = run(&[1], 1, &mut rng);
        assert_eq!(report.repetitions, 5);
    }
}
