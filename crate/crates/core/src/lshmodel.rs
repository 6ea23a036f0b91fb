//! Closed-form sensitivity model for the two pairwise LSH schemes.
//!
//! Here μ = k − √θ_d stays real-valued; query-time pruning uses the integer
//! [`min_overlap`](crate::distance::min_overlap) instead.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    One,
    Two,
}

impl Scheme {
    /// Hash functions concatenated per bucket label.
    pub fn m(self) -> u32 {
        match self {
            Scheme::One => 2,
            Scheme::Two => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::One => "scheme1",
            Scheme::Two => "scheme2",
        }
    }
}

/// (r, cr, P₁, P₂)-sensitivity of one scheme at a given threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityModel {
    pub k: usize,
    pub theta_d: f64,
    pub scheme: Scheme,
    pub m: u32,
    pub c: f64,
    /// Near radius: Jaccard distance for Scheme 1, K⁽⁰⁾ distance for Scheme 2.
    pub r: f64,
    pub p1: f64,
    pub p2: f64,
}

impl SensitivityModel {
    pub fn new(k: usize, theta_d: f64, scheme: Scheme, c: f64) -> Self {
        let p1 = match scheme {
            Scheme::One => p1_scheme1(k, theta_d),
            Scheme::Two => p1_scheme2(k, theta_d),
        };
        let r = match scheme {
            Scheme::One => 1.0 - p1,
            Scheme::Two => theta_d,
        };
        SensitivityModel {
            k,
            theta_d,
            scheme,
            m: scheme.m(),
            c,
            r,
            p1,
            p2: p2_of(p1, c),
        }
    }

    pub fn candidate_probability(&self, l: u32) -> f64 {
        candidate_probability(self.p1, self.m, l)
    }
}

fn real_mu(k: usize, theta_d: f64) -> f64 {
    k as f64 - theta_d.sqrt()
}

/// Jaccard similarity of two top-k lists sharing μ items: `μ / (2k − μ)`.
pub fn p1_scheme1(k: usize, theta_d: f64) -> f64 {
    let mu = real_mu(k, theta_d);
    mu / (2.0 * k as f64 - mu)
}

pub fn p1_scheme2(k: usize, theta_d: f64) -> f64 {
    1.0 - theta_d / (k * k) as f64
}

/// Far-point collision probability `1 − c(1 − p1)`, clamped to `[0, 1]`.
pub fn p2_of(p1: f64, c: f64) -> f64 {
    (1.0 - c * (1.0 - p1)).clamp(0.0, 1.0)
}

/// Probability that a point colliding per function with probability `p1`
/// shares a bucket in at least one of `l` tables of `m`-wise concatenations.
pub fn candidate_probability(p1: f64, m: u32, l: u32) -> f64 {
    1.0 - (1.0 - p1.powi(m as i32)).powi(l as i32)
}

/// Scheme 1 candidate probability at `l = 1`: `(k − √θ_d)² / (k + √θ_d)²`.
pub fn f1(k: usize, theta_d: f64) -> f64 {
    let (k, s) = (k as f64, theta_d.sqrt());
    (k - s).powi(2) / (k + s).powi(2)
}

/// Scheme 2 candidate probability at `l = 1`: `1 − θ_d / k²`.
pub fn f2(k: usize, theta_d: f64) -> f64 {
    1.0 - theta_d / (k * k) as f64
}

/// `f1 / f2` in the closed form `k²(k − √θ_d) / (k + √θ_d)³`.
pub fn f_ratio(k: usize, theta_d: f64) -> f64 {
    let (k, s) = (k as f64, theta_d.sqrt());
    k * k * (k - s) / (k + s).powi(3)
}
