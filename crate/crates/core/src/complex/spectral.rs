//! Power iteration and the spectral rank-deficiency test for `L1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Laplacian1;
use crate::graph::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerConfig {
    /// Stop when successive eigenvalue estimates differ by less than this,
    /// relative to the estimate (or to `scale`, whichever is larger).
    pub rel_tol: f64,
    /// Iteration cap; `None` means 10 times the matrix dimension.
    pub max_iters: Option<usize>,
    pub seed: u64,
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig {
            rel_tol: 1e-10,
            max_iters: None,
            seed: 0,
        }
    }
}

impl PowerConfig {
    pub fn cap(&self, dim: usize) -> usize {
        self.max_iters.unwrap_or(10 * dim).max(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PowerOutcome {
    Converged { value: f64, iterations: usize },
    Inconclusive { estimate: f64, iterations: usize },
}

impl PowerOutcome {
    pub fn value(&self) -> f64 {
        match *self {
            PowerOutcome::Converged { value, .. } => value,
            PowerOutcome::Inconclusive { estimate, .. } => estimate,
        }
    }

    pub fn iterations(&self) -> usize {
        match *self {
            PowerOutcome::Converged { iterations, .. }
            | PowerOutcome::Inconclusive { iterations, .. } => iterations,
        }
    }

    pub fn converged(&self) -> bool {
        matches!(self, PowerOutcome::Converged { .. })
    }
}

/// Convergence bookkeeping shared by the centralized and distributed
/// iterations so both stop on exactly the same rule.
#[derive(Debug, Clone)]
pub(crate) struct Tracker {
    rel_tol: f64,
    scale: f64,
    cap: usize,
    prev: Option<f64>,
    pub iterations: usize,
}

impl Tracker {
    pub fn new(cfg: &PowerConfig, dim: usize, scale: f64) -> Self {
        Tracker {
            rel_tol: cfg.rel_tol,
            scale: scale.abs(),
            cap: cfg.cap(dim),
            prev: None,
            iterations: 0,
        }
    }

    /// Records one Rayleigh quotient; returns the outcome once finished.
    pub fn observe(&mut self, lambda: f64) -> Option<PowerOutcome> {
        self.iterations += 1;
        if let Some(p) = self.prev {
            if (lambda - p).abs() <= self.rel_tol * lambda.abs().max(self.scale) {
                return Some(PowerOutcome::Converged {
                    value: lambda.abs(),
                    iterations: self.iterations,
                });
            }
        }
        self.prev = Some(lambda);
        if self.iterations >= self.cap {
            return Some(PowerOutcome::Inconclusive {
                estimate: lambda.abs(),
                iterations: self.iterations,
            });
        }
        None
    }

    /// The iterate vanished: the operator annihilates the whole Krylov space.
    pub fn zero(&mut self) -> PowerOutcome {
        self.iterations += 1;
        PowerOutcome::Converged {
            value: 0.0,
            iterations: self.iterations,
        }
    }
}

pub(crate) fn spectral_tracker(cfg: &PowerConfig, dim: usize, scale: f64) -> Tracker {
    Tracker::new(cfg, dim, scale)
}

/// Start value for the edge `{a, b}`; depends only on the seed and the
/// endpoint ids so that the owning node can compute it locally.
pub fn edge_start_value(seed: u64, e: [NodeId; 2]) -> f64 {
    let (a, b) = if e[0] <= e[1] {
        (e[0], e[1])
    } else {
        (e[1], e[0])
    };
    let key = ((a.0 as u64) << 32) | b.0 as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ key.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    // bounded away from zero so no coordinate starts orthogonal by accident
    let mag: f64 = rng.random_range(0.5..1.5);
    if rng.random::<bool>() {
        mag
    } else {
        -mag
    }
}

pub fn start_vector(l: &Laplacian1, seed: u64) -> Vec<f64> {
    (0..l.dim())
        .map(|i| edge_start_value(seed, l.label(i)))
        .collect()
}

/// Spectral radius of `shift·I − L` (or of `L` itself when `shift` is
/// `None`) by power iteration with Rayleigh-quotient estimates.
pub fn power_iteration(l: &Laplacian1, shift: Option<f64>, cfg: &PowerConfig) -> PowerOutcome {
    let n = l.dim();
    let mut x = start_vector(l, cfg.seed);
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
    let mut y = vec![0.0; n];
    let mut tracker = Tracker::new(cfg, n, shift.unwrap_or(0.0));
    loop {
        l.matvec(&x, &mut y);
        if let Some(s) = shift {
            for i in 0..n {
                y[i] = s * x[i] - y[i];
            }
        }
        let lambda: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if ny == 0.0 {
            return tracker.zero();
        }
        for i in 0..n {
            x[i] = y[i] / ny;
        }
        if let Some(out) = tracker.observe(lambda) {
            return out;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Deficient,
    FullRank,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralVerdict {
    pub verdict: Verdict,
    pub rho1: f64,
    pub rho2: f64,
    /// `(ρ1 − ρ2) / ρ1`, an estimate of `λ_min / λ_max`.
    pub margin: f64,
    pub iterations: usize,
}

impl SpectralVerdict {
    /// Combines the two spectral radii into a verdict.
    pub fn from_radii(rho1: PowerOutcome, rho2: PowerOutcome, tol: f64) -> Self {
        let (r1, r2) = (rho1.value(), rho2.value());
        let margin = if r1 > 0.0 { (r1 - r2) / r1 } else { 0.0 };
        let verdict = if !rho1.converged() || !rho2.converged() {
            Verdict::Inconclusive
        } else if margin < tol {
            Verdict::Deficient
        } else {
            Verdict::FullRank
        };
        SpectralVerdict {
            verdict,
            rho1: r1,
            rho2: r2,
            margin,
            iterations: rho1.iterations() + rho2.iterations(),
        }
    }
}

/// Deficient iff `(ρ1 − ρ2)/ρ1 < tol` with `ρ1 = ρ(L)` and
/// `ρ2 = ρ(ρ1·I − L)`. Non-convergence of either iteration is reported as
/// [`Verdict::Inconclusive`].
pub fn rank_deficiency_test(l: &Laplacian1, tol: f64, cfg: &PowerConfig) -> SpectralVerdict {
    let rho1 = power_iteration(l, None, cfg);
    if !rho1.converged() {
        return SpectralVerdict::from_radii(rho1, rho1, tol);
    }
    let rho2 = power_iteration(l, Some(rho1.value()), cfg);
    SpectralVerdict::from_radii(rho1, rho2, tol)
}

/// [`rank_deficiency_test`], repeated once with the iteration cap multiplied
/// by `retry_factor` if the first attempt is inconclusive. Returns the verdict
/// and whether the retry was needed.
pub fn rank_test_with_retry(
    l: &Laplacian1,
    tol: f64,
    cfg: &PowerConfig,
    retry_factor: usize,
) -> (SpectralVerdict, bool) {
    let first = rank_deficiency_test(l, tol, cfg);
    if first.verdict != Verdict::Inconclusive {
        return (first, false);
    }
    let cfg = PowerConfig {
        max_iters: Some(cfg.cap(l.dim()) * retry_factor.max(1)),
        ..*cfg
    };
    (rank_deficiency_test(l, tol, &cfg), true)
}
