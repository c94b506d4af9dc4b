//! Exact enumeration of directed self-avoiding walks on the 8-branching
//! tree of lattice cells, producing the hyperbolic length spectrum.
//!
//! A walk is an index word (i_1, ..., i_N), i_t in 1..=8, with no immediate
//! backtrack |i_t - i_{t-1}| = 4. Its length is the sum over t of the
//! distance from the origin to gamma_{i_1}...gamma_{i_t}[0].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::MoebiusMap;
use crate::octagon::OctagonGeometry;

/// True iff a step from index `i` to index `j` (1-based) is allowed,
/// i.e. j is not the inverse of i.
pub fn transition_allowed(i: u8, j: u8) -> bool {
    (i as i32 - j as i32).abs() != 4
}

/// Number of walks of N generations: 8 * 7^(N-1).
pub fn walk_count(generations: u32) -> u64 {
    8 * 7u64.pow(generations - 1)
}

/// Enumeration request: how deep to walk, and the guard that keeps the
/// exponential tree within an exact-enumeration budget.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct WalkPolicy {
    pub generations: u32,
    pub max_generations_guard: u32,
}

impl WalkPolicy {
    /// Default guard: 8*7^11 ~ 1.6e10 paths is the practical ceiling.
    pub const DEFAULT_GUARD: u32 = 12;

    pub fn new(generations: u32) -> WalkPolicy {
        assert!(generations >= 1, "need at least one generation");
        WalkPolicy {
            generations,
            max_generations_guard: Self::DEFAULT_GUARD,
        }
    }

    pub fn with_guard(mut self, guard: u32) -> WalkPolicy {
        self.max_generations_guard = guard;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.generations > self.max_generations_guard {
            return Err(Error::GenerationBudgetExceeded {
                requested: self.generations,
                guard: self.max_generations_guard,
            });
        }
        Ok(())
    }
}

/// Streaming first/second-moment accumulator (Welford update, parallel
/// merge in a caller-fixed order for determinism).
#[derive(Clone, Copy, Debug)]
struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
    min: f64,
    max: f64,
}

impl RunningStats {
    fn new() -> Self {
        RunningStats {
            count: 0,
            mean: 0.0,
            m2: 0.0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }

    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
        self.min = self.min.min(x);
        self.max = self.max.max(x);
    }

    fn merge(&mut self, o: &RunningStats) {
        if o.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *o;
            return;
        }
        let n1 = self.count as f64;
        let n2 = o.count as f64;
        let n = n1 + n2;
        let delta = o.mean - self.mean;
        self.mean += delta * (n2 / n);
        self.m2 += o.m2 + delta * delta * (n1 * n2 / n);
        self.count += o.count;
        self.min = self.min.min(o.min);
        self.max = self.max.max(o.max);
    }

    fn variance(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.m2 / self.count as f64
        }
    }
}

/// The enumerated multiset of walk lengths with its summary statistics.
///
/// `lengths` is ordered by the lexicographic order of the underlying index
/// words, independent of worker count.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LengthSpectrum {
    pub generation: u32,
    pub lengths: Vec<f64>,
    pub count: u64,
    pub mean: f64,
    pub variance: f64,
}

impl LengthSpectrum {
    pub fn min_length(&self) -> f64 {
        self.lengths.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_length(&self) -> f64 {
        self.lengths
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// ln Z(q) = ln sum_i exp(q L_i / N), max-shifted so that no
    /// intermediate overflows; the shift is exact because the extreme
    /// exponent sits at an extreme length.
    pub fn log_partition(&self, q: f64) -> f64 {
        let n = self.generation as f64;
        if q == 0.0 {
            return (self.count as f64).ln();
        }
        let scale = q / n;
        let shift = if q > 0.0 {
            scale * self.max_length()
        } else {
            scale * self.min_length()
        };
        let mut acc = 0.0;
        for &l in &self.lengths {
            acc += (scale * l - shift).exp();
        }
        shift + acc.ln()
    }
}

/// ln Z(q) of a spectrum; free-function form of `LengthSpectrum::log_partition`.
pub fn partition_function(spectrum: &LengthSpectrum, q: f64) -> f64 {
    spectrum.log_partition(q)
}

/// A histogram of the spectrum with a moment-matched Gaussian overlay.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub gaussian_fit: GaussianFit,
}

/// Method-of-moments Gaussian: count * bin_width * normal density.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GaussianFit {
    pub mean: f64,
    pub variance: f64,
    pub amplitude: f64,
}

/// Bin the spectrum into `bins` uniform cells spanning [min, max].
pub fn histogram(spectrum: &LengthSpectrum, bins: usize) -> Histogram {
    assert!(bins >= 10, "need at least 10 bins");
    let lo = spectrum.min_length();
    let hi = spectrum.max_length();
    let (lo, hi) = if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, lo + 0.5)
    };
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &x in &spectrum.lengths {
        let idx = (((x - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let bin_edges = (0..=bins)
        .map(|k| if k == bins { hi } else { lo + k as f64 * width })
        .collect();
    let amplitude = if spectrum.variance > 0.0 {
        spectrum.count as f64 * width / (2.0 * std::f64::consts::PI * spectrum.variance).sqrt()
    } else {
        0.0
    };
    Histogram {
        bin_edges,
        counts,
        gaussian_fit: GaussianFit {
            mean: spectrum.mean,
            variance: spectrum.variance,
            amplitude,
        },
    }
}

/// One worker task: a fixed one- or two-symbol word prefix.
#[derive(Clone, Copy)]
struct Prefix {
    word: [u8; 2],
    len: usize,
}

fn prefixes(n: u32) -> Vec<Prefix> {
    let mut out = Vec::new();
    if n == 1 {
        for i in 1..=8u8 {
            out.push(Prefix {
                word: [i, 0],
                len: 1,
            });
        }
    } else {
        for i in 1..=8u8 {
            for j in 1..=8u8 {
                if transition_allowed(i, j) {
                    out.push(Prefix {
                        word: [i, j],
                        len: 2,
                    });
                }
            }
        }
    }
    out
}

/// Depth-first enumeration below one prefix with an explicit stack;
/// memory stays O(branching * depth).
fn run_prefix(
    geom: &OctagonGeometry,
    n: u32,
    prefix: Prefix,
    collect: bool,
    reversed: bool,
) -> (RunningStats, Vec<f64>) {
    let g = &geom.generators;
    let mut stats = RunningStats::new();
    let mut lengths = Vec::new();
    let mut emit = |x: f64, lengths: &mut Vec<f64>| {
        stats.push(x);
        if collect {
            lengths.push(x);
        }
    };

    let mut map = MoebiusMap::IDENTITY;
    let mut sum = 0.0;
    for &i in &prefix.word[..prefix.len] {
        map = map.compose(&g[i as usize - 1]);
        sum += map.origin_displacement();
    }
    if prefix.len as u32 == n {
        emit(sum, &mut lengths);
        return (stats, lengths);
    }

    // Stack of pending nodes (cumulative map, cumulative length, last
    // index, depth); children are pushed so that pops are lexicographic.
    let mut stack: Vec<(MoebiusMap, f64, u8, u32)> = Vec::with_capacity(7 * n as usize);
    let push_children = |stack: &mut Vec<(MoebiusMap, f64, u8, u32)>,
                         m: &MoebiusMap,
                         s: f64,
                         last: u8,
                         depth: u32| {
        for k in 0..8u8 {
            let j = if reversed { k + 1 } else { 8 - k };
            if transition_allowed(last, j) {
                let nm = m.compose(&g[j as usize - 1]);
                let ns = s + nm.origin_displacement();
                stack.push((nm, ns, j, depth + 1));
            }
        }
    };

    push_children(
        &mut stack,
        &map,
        sum,
        prefix.word[prefix.len - 1],
        prefix.len as u32,
    );
    while let Some((m, s, last, depth)) = stack.pop() {
        if depth == n {
            emit(s, &mut lengths);
        } else {
            push_children(&mut stack, &m, s, last, depth);
        }
    }
    (stats, lengths)
}

fn enumerate_inner(
    geom: &OctagonGeometry,
    policy: &WalkPolicy,
    collect: bool,
    reversed: bool,
) -> LengthSpectrum {
    let n = policy.generations;
    let tasks = prefixes(n);
    let results: Vec<(RunningStats, Vec<f64>)> = tasks
        .par_iter()
        .map(|p| run_prefix(geom, n, *p, collect, reversed))
        .collect();

    // Fixed-order reduction: identical bytes for any worker count.
    let mut stats = RunningStats::new();
    let mut lengths = Vec::with_capacity(if collect { walk_count(n) as usize } else { 0 });
    for (s, l) in results {
        stats.merge(&s);
        lengths.extend_from_slice(&l);
    }
    LengthSpectrum {
        generation: n,
        lengths,
        count: stats.count,
        mean: stats.mean,
        variance: stats.variance(),
    }
}

/// Enumerate every walk of `policy.generations` steps and return the full
/// spectrum. Parallel over two-symbol prefixes on the ambient thread pool;
/// the result is bitwise independent of the worker count.
pub fn enumerate_spectrum(geom: &OctagonGeometry, policy: &WalkPolicy) -> Result<LengthSpectrum> {
    policy.validate()?;
    Ok(enumerate_inner(geom, policy, true, false))
}

/// Like `enumerate_spectrum`, but on a dedicated pool of `workers` threads
/// (0 means the ambient pool).
pub fn enumerate_spectrum_with_workers(
    geom: &OctagonGeometry,
    policy: &WalkPolicy,
    workers: usize,
) -> Result<LengthSpectrum> {
    policy.validate()?;
    if workers == 0 {
        return Ok(enumerate_inner(geom, policy, true, false));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("failed to build enumeration thread pool");
    Ok(pool.install(|| enumerate_inner(geom, policy, true, false)))
}

/// Summary statistics without retaining the lengths (streaming mode for
/// generation counts where the full spectrum would not fit in memory).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub generation: u32,
    pub count: u64,
    pub mean: f64,
    pub variance: f64,
    pub min: f64,
    pub max: f64,
}

/// Enumerate and reduce without keeping individual lengths.
pub fn enumerate_summary(geom: &OctagonGeometry, policy: &WalkPolicy) -> Result<SpectrumSummary> {
    policy.validate()?;
    let n = policy.generations;
    let tasks = prefixes(n);
    let results: Vec<RunningStats> = tasks
        .par_iter()
        .map(|p| run_prefix(geom, n, *p, false, false).0)
        .collect();
    let mut stats = RunningStats::new();
    for s in &results {
        stats.merge(s);
    }
    Ok(SpectrumSummary {
        generation: n,
        count: stats.count,
        mean: stats.mean,
        variance: stats.variance(),
        min: stats.min,
        max: stats.max,
    })
}
