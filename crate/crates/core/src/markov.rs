//! Analytic approximation pipeline for the length spectrum: per-family
//! step lengths, the pairwise logarithmic correction matrix xi, the
//! triangle-rule length estimate, an inhomogeneous Markov multiplicative
//! chain for the partition function, kernel/ergodicity diagnostics, and a
//! Gaussian closed form with erf tail cutoffs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::distance_from_origin;
use crate::numeric::erf;
use crate::octagon::{is_plus_family, OctagonGeometry};
use crate::walk::transition_allowed;

/// The two first-generation displacements; each is shared by the four
/// generators of its family.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct StepLengths {
    pub l_plus: f64,
    pub l_minus: f64,
}

impl StepLengths {
    /// Step length of the 1-based generator index.
    pub fn for_index(&self, i: u8) -> f64 {
        if is_plus_family(i as usize - 1) {
            self.l_plus
        } else {
            self.l_minus
        }
    }

    pub fn min(&self) -> f64 {
        self.l_plus.min(self.l_minus)
    }

    pub fn max(&self) -> f64 {
        self.l_plus.max(self.l_minus)
    }

    pub fn mean(&self) -> f64 {
        0.5 * (self.l_plus + self.l_minus)
    }
}

/// l_plus/l_minus from the side-pairing targets: d(0, omega) = ln((1+|w|)/(1-|w|)).
pub fn step_lengths(geom: &OctagonGeometry) -> StepLengths {
    StepLengths {
        l_plus: distance_from_origin(&geom.omega[0]),
        l_minus: distance_from_origin(&geom.omega[1]),
    }
}

/// Second-generation correction matrix:
/// xi[i][j] = d(0, gamma_i gamma_j [0]) - (l_i + l_j)/2 (0-based storage).
///
/// Symmetric with xi[i][i] = l_i. Entries at the forbidden pairs
/// |i - j| = 4 are computed (they equal -l_i since the two maps cancel)
/// but are never used: every consumer masks them with the transition rule.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct XiMatrix {
    pub xi: [[f64; 8]; 8],
    /// Mean over the 56 allowed ordered pairs.
    pub mean_xi: f64,
}

impl XiMatrix {
    pub fn min_allowed(&self) -> f64 {
        self.fold_allowed(f64::INFINITY, f64::min)
    }

    pub fn max_allowed(&self) -> f64 {
        self.fold_allowed(f64::NEG_INFINITY, f64::max)
    }

    /// Population variance over the 56 allowed ordered pairs.
    pub fn variance_allowed(&self) -> f64 {
        let mean = self.mean_xi;
        let mut acc = 0.0;
        let mut n = 0.0;
        for i in 0..8 {
            for j in 0..8 {
                if transition_allowed(i as u8 + 1, j as u8 + 1) {
                    let d = self.xi[i][j] - mean;
                    acc += d * d;
                    n += 1.0;
                }
            }
        }
        acc / n
    }

    fn fold_allowed(&self, init: f64, f: impl Fn(f64, f64) -> f64) -> f64 {
        let mut acc = init;
        for i in 0..8 {
            for j in 0..8 {
                if transition_allowed(i as u8 + 1, j as u8 + 1) {
                    acc = f(acc, self.xi[i][j]);
                }
            }
        }
        acc
    }
}

/// Compute the xi matrix by exact two-step distances.
#[allow(clippy::needless_range_loop)] // indexed form mirrors the matrix algebra
pub fn xi_matrix(geom: &OctagonGeometry) -> XiMatrix {
    let steps = step_lengths(geom);
    let mut xi = [[0.0; 8]; 8];
    let mut sum = 0.0;
    for i in 0..8 {
        let li = steps.for_index(i as u8 + 1);
        for j in 0..8 {
            let lj = steps.for_index(j as u8 + 1);
            let two = geom.generators[i].compose(&geom.generators[j]);
            let entry = two.origin_displacement() - 0.5 * (li + lj);
            xi[i][j] = entry;
            if transition_allowed(i as u8 + 1, j as u8 + 1) {
                sum += entry;
            }
        }
    }
    XiMatrix {
        xi,
        mean_xi: sum / 56.0,
    }
}

fn validate_word(word: &[u8]) -> Result<()> {
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    for (pos, &i) in word.iter().enumerate() {
        if !(1..=8).contains(&i) {
            return Err(Error::IndexOutOfRange {
                index: i,
                position: pos,
            });
        }
        if pos > 0 && !transition_allowed(word[pos - 1], i) {
            return Err(Error::ForbiddenWord {
                prev: word[pos - 1],
                next: i,
                position: pos,
            });
        }
    }
    Ok(())
}

/// Triangle-rule length estimate for an admissible word (1-based indices):
/// N l_{i_1} + sum_{t=2..N} (N + 1 - t) xi_{i_{t-1}, i_t}.
/// Exact for the constant words (i, i, ..., i).
pub fn approx_length(word: &[u8], steps: &StepLengths, xi: &XiMatrix) -> Result<f64> {
    validate_word(word)?;
    let n = word.len();
    let mut total = n as f64 * steps.for_index(word[0]);
    for t in 2..=n {
        let w = (n + 1 - t) as f64;
        total += w * xi.xi[word[t - 2] as usize - 1][word[t - 1] as usize - 1];
    }
    Ok(total)
}

/// The three closed-form spectrum markers at generation N.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TheoreticalBounds {
    /// Lower estimate: N min(l) + N(N-1)/2 min_allowed(xi).
    pub l_min: f64,
    /// Mean estimate: N (l_+ + l_-)/2 + N(N-1)/2 mean(xi).
    pub l_mean: f64,
    /// Exact maximum: N(N+1)/2 max(l), attained by the straight words.
    pub l_max: f64,
}

pub fn theoretical_bounds(steps: &StepLengths, xi: &XiMatrix, n: u32) -> TheoreticalBounds {
    let nf = n as f64;
    let pairs = nf * (nf - 1.0) / 2.0;
    TheoreticalBounds {
        l_min: nf * steps.min() + pairs * xi.min_allowed(),
        l_mean: nf * steps.mean() + pairs * xi.mean_xi,
        l_max: nf * (nf + 1.0) / 2.0 * steps.max(),
    }
}

/// Mean length density l_mean(N)/N^2; converges to mean_xi/2 as N grows.
pub fn mean_length_density(steps: &StepLengths, xi: &XiMatrix, n: u32) -> f64 {
    theoretical_bounds(steps, xi, n).l_mean / (n as f64 * n as f64)
}

/// Asymptotic mean step: lim_N l_mean(N)/N^2 = mean_xi / 2.
pub fn mean_step_limit(xi: &XiMatrix) -> f64 {
    0.5 * xi.mean_xi
}

/// Everything the chain evaluation produces for one (N, q).
///
/// `kernel` is stored scaled so its largest entry is 1; `kernel_log_scale`
/// is the logarithm of the factored-out magnitude. All derived ratios
/// (transition probabilities, family means relative to each other) are
/// scale-free; the partition values fold the scale back in.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainReport {
    pub kernel: [[f64; 8]; 8],
    pub kernel_log_scale: f64,
    /// Row sums K_i of the kernel (same scaling as `kernel`).
    pub k_vector: [f64; 8],
    /// Family means of `k_vector`.
    pub k_plus: f64,
    pub k_minus: f64,
    /// P_{i,f}: probability that a chain started at i ends at f.
    pub transition_probs: [[f64; 8]; 8],
    /// ln Z from the stabilized vector iteration.
    pub log_z_chain: f64,
    /// ln Z from ln(4 e^{q l_+} K_+ + 4 e^{q l_-} K_-); agrees with
    /// `log_z_chain` to rounding by the family symmetry of the kernel.
    pub log_z_decomposition: f64,
}

/// Partition function of the approximate lengths as an inhomogeneous
/// multiplicative chain: Z = sum exp(q l_{i_1}) prod_{t=2..N} w_t with
/// step weights w_t = exp(q (N+1-t) xi / N) on allowed transitions.
///
/// Both the vector iteration and the kernel product are rescaled at every
/// step, so the evaluation stays finite for any q of practical size.
#[allow(clippy::needless_range_loop)] // indexed form mirrors the matrix algebra
pub fn chain_partition_function(steps: &StepLengths, xi: &XiMatrix, n: u32, q: f64) -> ChainReport {
    assert!(n >= 1, "chain needs at least one generation");
    let nf = n as f64;
    let weight = |t: u32, j: usize, i: usize| -> f64 {
        if transition_allowed(j as u8 + 1, i as u8 + 1) {
            (q * (nf + 1.0 - t as f64) * xi.xi[j][i] / nf).exp()
        } else {
            0.0
        }
    };

    // Vector iteration for ln Z.
    let mut x = [0.0f64; 8];
    for (i, xi_) in x.iter_mut().enumerate() {
        *xi_ = (q * steps.for_index(i as u8 + 1)).exp();
    }
    let mut log_scale = 0.0;
    let rescale = |v: &mut [f64], log_scale: &mut f64| {
        let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if m > 0.0 && m.is_finite() {
            for e in v.iter_mut() {
                *e /= m;
            }
            *log_scale += m.ln();
        }
    };
    rescale(&mut x, &mut log_scale);
    for t in 2..=n {
        let mut y = [0.0f64; 8];
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, &xj) in x.iter().enumerate() {
                acc += weight(t, j, i) * xj;
            }
            *yi = acc;
        }
        x = y;
        rescale(&mut x, &mut log_scale);
    }
    let log_z_chain = log_scale + x.iter().sum::<f64>().ln();

    // Kernel product K_{i,f} over t = 2..N, rescaled per step.
    let mut kernel = [[0.0f64; 8]; 8];
    for (i, row) in kernel.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let mut kernel_log_scale = 0.0;
    for t in 2..=n {
        let mut next = [[0.0f64; 8]; 8];
        let mut max_entry = 0.0f64;
        for i in 0..8 {
            for f in 0..8 {
                let mut acc = 0.0;
                for m in 0..8 {
                    acc += kernel[i][m] * weight(t, m, f);
                }
                next[i][f] = acc;
                max_entry = max_entry.max(acc);
            }
        }
        if max_entry > 0.0 {
            for row in next.iter_mut() {
                for e in row.iter_mut() {
                    *e /= max_entry;
                }
            }
            kernel_log_scale += max_entry.ln();
        }
        kernel = next;
    }

    let mut k_vector = [0.0f64; 8];
    for i in 0..8 {
        k_vector[i] = kernel[i].iter().sum();
    }
    let mut k_plus = 0.0;
    let mut k_minus = 0.0;
    for (i, &k) in k_vector.iter().enumerate() {
        if is_plus_family(i) {
            k_plus += k / 4.0;
        } else {
            k_minus += k / 4.0;
        }
    }
    let mut transition_probs = [[0.0f64; 8]; 8];
    for i in 0..8 {
        for f in 0..8 {
            transition_probs[i][f] = kernel[i][f] / k_vector[i];
        }
    }
    let log_z_decomposition = kernel_log_scale
        + (4.0 * (q * steps.l_plus).exp() * k_plus + 4.0 * (q * steps.l_minus).exp() * k_minus)
            .ln();

    ChainReport {
        kernel,
        kernel_log_scale,
        k_vector,
        k_plus,
        k_minus,
        transition_probs,
        log_z_chain,
        log_z_decomposition,
    }
}

/// Reference evaluation of the chain partition function by explicit
/// summation of the triangle-rule weights over every admissible word.
/// Exponential in N; intended as a small-instance oracle.
pub fn brute_force_log_partition(steps: &StepLengths, xi: &XiMatrix, n: u32, q: f64) -> f64 {
    fn rec(
        word: &mut Vec<u8>,
        n: u32,
        q: f64,
        steps: &StepLengths,
        xi: &XiMatrix,
        acc: &mut crate::numeric::LogSumExp,
    ) {
        if word.len() == n as usize {
            let l = approx_length(word, steps, xi).expect("generated words are admissible");
            acc.push(q * l / n as f64);
            return;
        }
        for i in 1..=8u8 {
            if word.last().is_none_or(|&last| transition_allowed(last, i)) {
                word.push(i);
                rec(word, n, q, steps, xi, acc);
                word.pop();
            }
        }
    }
    let mut acc = crate::numeric::LogSumExp::new();
    rec(&mut Vec::new(), n, q, steps, xi, &mut acc);
    acc.value()
}

/// Gaussian closed form for ln Z with erf tail cutoffs.
///
/// `cutoffs` = (lower, upper) bounds on the per-generation length L/N;
/// pass infinities to disable the cut. Returns (ln Z, C) where C is the
/// finite-window correction coefficient.
pub fn gaussian_closed_form(
    steps: &StepLengths,
    xi: &XiMatrix,
    n: u32,
    q: f64,
    cutoffs: (f64, f64),
) -> Result<(f64, f64)> {
    let s2 = xi.variance_allowed() / 3.0;
    if s2 <= 0.0 {
        return Err(Error::DegenerateVariance { s2 });
    }
    let nf = n as f64;
    let l_bar = mean_length_density(steps, xi, n);
    let center = nf * l_bar;
    let u = center + q * nf * s2;
    let sigma = (2.0 * nf * s2).sqrt();
    let (lo, hi) = cutoffs;
    let num = erf((hi - u) / sigma) + erf((u - lo) / sigma);
    let den = erf((hi - center) / sigma) + erf((center - lo) / sigma);
    let c = num / den;
    let log_z = (8.0f64 / 7.0).ln() + c.ln() + nf * (q * q * s2 / 2.0 + q * l_bar + 7.0f64.ln());
    Ok((log_z, c))
}
