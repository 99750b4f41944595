//! Multi-threaded enumeration.
//!
//! Cosets are independent, so when there are at least as many cosets as
//! workers each worker takes whole cosets. Otherwise the cosets are taken one
//! at a time and large orbits inside a coset are explored by parallel sweeps
//! over a shared atomic bitmap. Either way the census is sorted before it is
//! returned, so the output does not depend on the worker count.

use std::sync::atomic::{AtomicU64, Ordering};

use f2orbits_core::actions::Height;
use f2orbits_core::orbits::{assemble, stratum_cosets, CosetPlan, Enumerable, LocalGen, OrbitCensus};
use f2orbits_core::Result;
use rayon::prelude::*;

/// Orbits up to this size are finished by a single worker.
const SERIAL_ORBIT_LIMIT: usize = 1 << 16;

/// Words of the bitmap handled per parallel task during a sweep.
const SWEEP_CHUNK: usize = 1 << 10;

pub struct Runner {
    pool: rayon::ThreadPool,
    threads: usize,
}

impl Runner {
    /// `None` uses the available parallelism.
    pub fn new(threads: Option<usize>) -> std::result::Result<Self, rayon::ThreadPoolBuildError> {
        let threads = threads.unwrap_or_else(|| {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        });
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
        Ok(Runner { pool, threads })
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    pub fn enumerate<S: Enumerable + ?Sized>(&self, spec: &S) -> Result<OrbitCensus> {
        let plan = CosetPlan::new(spec.mask_action()?);
        let cosets: Vec<u64> = (0..plan.coset_count()).collect();
        Ok(self.run(&plan, &cosets))
    }

    pub fn enumerate_stratum<S: Enumerable + ?Sized>(
        &self,
        spec: &S,
        height: &Height,
    ) -> Result<OrbitCensus> {
        let plan = CosetPlan::new(spec.mask_action()?);
        let cosets = stratum_cosets(&plan, height)?;
        Ok(self.run(&plan, &cosets))
    }

    fn run(&self, plan: &CosetPlan, cosets: &[u64]) -> OrbitCensus {
        let orbits: Vec<(u64, u64)> = if self.threads == 1 {
            cosets.iter().flat_map(|&u| plan.enumerate_coset(u)).collect()
        } else if cosets.len() >= self.threads {
            self.pool.install(|| {
                cosets
                    .par_iter()
                    .map(|&u| plan.enumerate_coset(u))
                    .collect::<Vec<_>>()
                    .into_iter()
                    .flatten()
                    .collect()
            })
        } else {
            self.pool.install(|| {
                cosets
                    .iter()
                    .flat_map(|&u| enumerate_coset_shared(plan, u))
                    .collect()
            })
        };
        assemble(plan, cosets.len(), orbits)
    }
}

struct AtomicBitmap {
    words: Vec<AtomicU64>,
}

impl AtomicBitmap {
    fn new(len: u64) -> Self {
        AtomicBitmap {
            words: (0..len.div_ceil(64)).map(|_| AtomicU64::new(0)).collect(),
        }
    }

    /// Sets bit `i`, returning whether this call set it.
    #[inline]
    fn insert(&self, i: u64) -> bool {
        let bit = 1u64 << (i & 63);
        self.words[(i >> 6) as usize].fetch_or(bit, Ordering::Relaxed) & bit == 0
    }

    fn next_clear(&self, from: u64, len: u64) -> Option<u64> {
        if from >= len {
            return None;
        }
        let mut w = (from >> 6) as usize;
        let mut word = !self.words[w].load(Ordering::Relaxed) & (u64::MAX << (from & 63));
        loop {
            if word != 0 {
                let i = ((w as u64) << 6) | word.trailing_zeros() as u64;
                return (i < len).then_some(i);
            }
            w += 1;
            if w == self.words.len() {
                return None;
            }
            word = !self.words[w].load(Ordering::Relaxed);
        }
    }
}

/// One coset, with parallel sweeps for orbits too large for one worker.
fn enumerate_coset_shared(plan: &CosetPlan, u: u64) -> Vec<(u64, u64)> {
    let label = plan.coset_label(u);
    let gens = plan.local_generators(label);
    let len = plan.coset_size();
    let visited = AtomicBitmap::new(len);
    let pending = AtomicBitmap::new(len);
    let mut out = Vec::new();
    let mut queue = Vec::new();
    let mut from = 0;
    while let Some(seed) = visited.next_clear(from, len) {
        from = seed + 1;
        visited.insert(seed);
        let (min, count) = match serial_orbit(&gens, &visited, seed, &mut queue) {
            Ok(done) => done,
            Err((min, count)) => {
                for &a in &queue {
                    pending.insert(a);
                }
                queue.clear();
                parallel_sweeps(&gens, &visited, &pending, min, count)
            }
        };
        out.push((plan.to_state(label, min), count));
    }
    out
}

/// Breadth-first search from `seed`; gives up with the partial `(min, count)`
/// and the unexplored frontier left in `queue` once the orbit is large.
fn serial_orbit(
    gens: &[LocalGen],
    visited: &AtomicBitmap,
    seed: u64,
    queue: &mut Vec<u64>,
) -> std::result::Result<(u64, u64), (u64, u64)> {
    queue.clear();
    queue.push(seed);
    let mut head = 0;
    let mut min = seed;
    let mut count = 1u64;
    while head < queue.len() {
        if queue.len() > SERIAL_ORBIT_LIMIT {
            queue.drain(..head);
            return Err((min, count));
        }
        let a = queue[head];
        head += 1;
        for g in gens {
            let b = g.apply(a);
            if visited.insert(b) {
                count += 1;
                min = min.min(b);
                queue.push(b);
            }
        }
    }
    Ok((min, count))
}

fn parallel_sweeps(
    gens: &[LocalGen],
    visited: &AtomicBitmap,
    pending: &AtomicBitmap,
    min: u64,
    count: u64,
) -> (u64, u64) {
    let mut min = min;
    let mut count = count;
    loop {
        let (active, found, low) = pending
            .words
            .par_chunks(SWEEP_CHUNK)
            .enumerate()
            .map(|(c, chunk)| {
                let mut active = false;
                let mut found = 0u64;
                let mut low = u64::MAX;
                for (k, word) in chunk.iter().enumerate() {
                    let w = (c * SWEEP_CHUNK + k) as u64;
                    loop {
                        let mut bits = word.swap(0, Ordering::Relaxed);
                        if bits == 0 {
                            break;
                        }
                        active = true;
                        while bits != 0 {
                            let a = (w << 6) | bits.trailing_zeros() as u64;
                            bits &= bits - 1;
                            for g in gens {
                                let b = g.apply(a);
                                if visited.insert(b) {
                                    found += 1;
                                    low = low.min(b);
                                    pending.insert(b);
                                }
                            }
                        }
                    }
                }
                (active, found, low)
            })
            .reduce(
                || (false, 0, u64::MAX),
                |x, y| (x.0 || y.0, x.1 + y.1, x.2.min(y.2)),
            );
        count += found;
        min = min.min(low);
        if !active {
            return (min, count);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use f2orbits_core::actions::{ActionKind, ActionSpec};
    use f2orbits_core::lattice::{Graph, LatticeSpec};
    use f2orbits_core::orbits::enumerate;

    #[test]
    fn worker_counts_agree_with_the_serial_engine() {
        let spec = ActionSpec::new(5, ActionKind::First).unwrap();
        let serial = enumerate(&spec).unwrap();
        for threads in [1, 2, 3, 8] {
            let runner = Runner::new(Some(threads)).unwrap();
            assert_eq!(runner.enumerate(&spec).unwrap(), serial);
        }
    }

    #[test]
    fn shared_coset_search_handles_large_orbits() {
        // One coset of dimension 21 with two orbits far above the serial limit.
        let spec = LatticeSpec::build_full(Graph::hex(7).unwrap()).unwrap();
        let serial = enumerate(&spec).unwrap();
        let runner = Runner::new(Some(4)).unwrap();
        assert_eq!(runner.enumerate(&spec).unwrap(), serial);
        let plan = CosetPlan::new(spec.mask_action().unwrap());
        assert!(plan.coset_count() < 4);
    }

    #[test]
    fn strata_in_parallel() {
        let spec = ActionSpec::new(6, ActionKind::Second).unwrap();
        let runner = Runner::new(Some(2)).unwrap();
        let h = Height::from_bits(&[true, true, true]);
        assert_eq!(
            runner.enumerate_stratum(&spec, &h).unwrap(),
            f2orbits_core::orbits::enumerate_stratum(&spec, &h).unwrap()
        );
    }
}
