//! Closed-form bounds on the critical curve q_c(p).
//!
//! * `1 / (2 s chi_d(p))` is a lower bound on q_c(p) for every d and s.
//! * Below that value the mean cluster size obeys the geometric series bound
//!   `chi(p, q) <= sum_n (2s)^n chi_d^(n+1) q^n = chi_d / (1 - 2 s q chi_d)`.
//! * For d = 1, `chi_1(p) = (1 + p) / (1 - p)` exactly, and for d = s = 1 the
//!   critical curve is the line `p + q = 1`.
//! * For d = 1 and s >= 2 a good-vertex renormalisation gives a certificate
//!   of percolation: with `q > alpha (1 - p) / (1 + p)` each site of Z^s is
//!   good with probability at least `(1 - 3 eps)(1 - e^{-alpha eps})^s`,
//!   provided `p^{(1+p) eps / (1-p)} >= 1 - 3 eps`. If that exceeds the site
//!   threshold of Z^s, the bond process percolates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_probability(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} = {x} is not a probability")))
    }
}

/// Mean cluster size of one-dimensional bond percolation.
pub fn chi_1_exact(p: f64) -> Result<f64> {
    check_probability("p", p)?;
    if p == 1.0 {
        return Err(Error::domain("chi_1 diverges at p = 1"));
    }
    Ok((1.0 + p) / (1.0 - p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub p: f64,
    pub q: f64,
    pub d: usize,
    pub s: usize,
    /// Mean cluster size of the p-sublattice Z^d at `p`.
    pub chi_d: f64,
}

impl BoundInputs {
    /// Inputs for d = 1 with the exact `chi_1`.
    pub fn exact_d1(p: f64, q: f64, s: usize) -> Result<Self> {
        Ok(BoundInputs {
            p,
            q,
            d: 1,
            s,
            chi_d: chi_1_exact(p)?,
        })
    }

    fn validate(&self) -> Result<()> {
        check_probability("p", self.p)?;
        check_probability("q", self.q)?;
        if self.s < 1 || self.d < 1 {
            return Err(Error::domain("d and s must be positive"));
        }
        if !self.chi_d.is_finite() || self.chi_d <= 0.0 {
            return Err(Error::domain(format!(
                "chi_d = {} must be finite and positive",
                self.chi_d
            )));
        }
        Ok(())
    }
}

/// `1 / (2 s chi_d)`, clamped to 1: no percolation for any smaller q.
pub fn qc_lower_bound(inputs: &BoundInputs) -> Result<f64> {
    inputs.validate()?;
    Ok((1.0 / (2.0 * inputs.s as f64 * inputs.chi_d)).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum SeriesBound {
    Finite(f64),
    Divergent,
}

impl SeriesBound {
    pub fn finite(self) -> Option<f64> {
        match self {
            SeriesBound::Finite(x) => Some(x),
            SeriesBound::Divergent => None,
        }
    }
}

/// Closed form of `sum_n (2s)^n chi_d^(n+1) q^n`.
pub fn series_chi_bound(inputs: &BoundInputs) -> Result<SeriesBound> {
    inputs.validate()?;
    let ratio = 2.0 * inputs.s as f64 * inputs.q * inputs.chi_d;
    if ratio >= 1.0 {
        Ok(SeriesBound::Divergent)
    } else {
        Ok(SeriesBound::Finite(inputs.chi_d / (1.0 - ratio)))
    }
}

/// Exact critical curve of Z x Z: `q_c(p) = 1 - p`.
pub fn kesten_line(p: f64) -> Result<f64> {
    check_probability("p", p)?;
    Ok(1.0 - p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunTail {
    pub probability: f64,
    /// `p` was 0 or 1.
    pub degenerate: bool,
}

/// Probability `p^k` that a one-directional run of `k` edges is open.
pub fn run_tail_probability(p: f64, k: f64) -> Result<RunTail> {
    check_probability("p", p)?;
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::domain(format!("run length k = {k} must be finite and nonnegative")));
    }
    let degenerate = p == 0.0 || p == 1.0;
    let probability = if k == 0.0 { 1.0 } else { p.powf(k) };
    Ok(RunTail {
        probability,
        degenerate,
    })
}

/// The long-run condition `p^{(1+p) eps / (1-p)} >= 1 - 3 eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterTailCheck {
    /// Run length `(1 + p) eps / (1 - p)`.
    pub run_length: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn cluster_tail_condition(p: f64, epsilon: f64) -> Result<ClusterTailCheck> {
    let run_length = chi_1_exact(p)? * epsilon;
    let lhs = run_tail_probability(p, run_length)?.probability;
    let rhs = 1.0 - 3.0 * epsilon;
    Ok(ClusterTailCheck {
        run_length,
        lhs,
        rhs,
        holds: lhs >= rhs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenormInputs {
    pub p: f64,
    pub q: f64,
    pub s: usize,
    pub epsilon: f64,
    pub alpha: f64,
    /// Site percolation threshold of Z^s, from the constants table.
    pub site_threshold_s: Option<f64>,
}

impl RenormInputs {
    fn validate(&self) -> Result<()> {
        check_probability("p", self.p)?;
        check_probability("q", self.q)?;
        if self.p == 1.0 {
            return Err(Error::domain("the renormalisation needs p < 1"));
        }
        if self.s < 2 {
            return Err(Error::domain("the renormalisation needs s >= 2"));
        }
        if !(self.epsilon > 0.0) || !(self.alpha > 0.0) {
            return Err(Error::domain("epsilon and alpha must be positive"));
        }
        Ok(())
    }

    /// `alpha (1 - p) / (1 + p)`, the q above which the certificate applies.
    pub fn q_threshold(&self) -> f64 {
        self.alpha * (1.0 - self.p) / (1.0 + self.p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GoodVertexBound {
    Valid { p_bar_lower: f64 },
    /// `eps >= 1/3` makes the bound nonpositive.
    NonPositive { value: f64 },
    /// The long-run condition fails at this `(p, eps)`.
    InvalidRegime { lhs: f64, rhs: f64 },
}

impl GoodVertexBound {
    pub fn valid(self) -> Option<f64> {
        match self {
            GoodVertexBound::Valid { p_bar_lower } => Some(p_bar_lower),
            _ => None,
        }
    }
}

/// `(1 - 3 eps)(1 - e^{-alpha eps})^s` without the validity checks.
pub fn good_vertex_formula(epsilon: f64, alpha: f64, s: usize) -> f64 {
    (1.0 - 3.0 * epsilon) * (-(-alpha * epsilon).exp_m1()).powi(s as i32)
}

/// Lower bound on the probability that a site of Z^s is good.
pub fn good_vertex_prob_lower(inputs: &RenormInputs) -> Result<GoodVertexBound> {
    inputs.validate()?;
    let value = good_vertex_formula(inputs.epsilon, inputs.alpha, inputs.s);
    if inputs.epsilon >= 1.0 / 3.0 {
        return Ok(GoodVertexBound::NonPositive { value });
    }
    let tail = cluster_tail_condition(inputs.p, inputs.epsilon)?;
    if !tail.holds {
        return Ok(GoodVertexBound::InvalidRegime {
            lhs: tail.lhs,
            rhs: tail.rhs,
        });
    }
    Ok(GoodVertexBound::Valid { p_bar_lower: value })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateStatus {
    Certified,
    BelowSiteThreshold,
    /// `q <= alpha (1 - p) / (1 + p)`.
    HypothesisFails,
    NonPositiveBound,
    InvalidRegime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub certified: bool,
    pub status: CertificateStatus,
    pub q_threshold: f64,
    pub p_bar_lower: Option<f64>,
    pub site_threshold: f64,
    /// `p_bar_lower - site_threshold` when the bound is valid.
    pub margin: Option<f64>,
}

/// Whether the good-vertex process provably percolates at these inputs.
pub fn renorm_certifies_percolation(inputs: &RenormInputs) -> Result<Certificate> {
    let site_threshold = inputs.site_threshold_s.ok_or_else(|| {
        Error::config(
            format!("constants.site_pc.{}", inputs.s),
            "site percolation threshold is required",
        )
    })?;
    let bound = good_vertex_prob_lower(inputs)?;
    let q_threshold = inputs.q_threshold();
    let p_bar_lower = bound.valid();
    let margin = p_bar_lower.map(|b| b - site_threshold);
    let status = match bound {
        GoodVertexBound::NonPositive { .. } => CertificateStatus::NonPositiveBound,
        GoodVertexBound::InvalidRegime { .. } => CertificateStatus::InvalidRegime,
        GoodVertexBound::Valid { p_bar_lower } => {
            if inputs.q <= q_threshold {
                CertificateStatus::HypothesisFails
            } else if p_bar_lower > site_threshold {
                CertificateStatus::Certified
            } else {
                CertificateStatus::BelowSiteThreshold
            }
        }
    };
    Ok(Certificate {
        certified: status == CertificateStatus::Certified,
        status,
        q_threshold,
        p_bar_lower,
        site_threshold,
        margin,
    })
}

/// `q_c(p) * chi_d(p)`; boundedness in p supports `q_c <= beta / chi_d`.
pub fn qc_chi_product(chi_d: f64, qc_estimate: f64) -> Result<f64> {
    if !chi_d.is_finite() || !qc_estimate.is_finite() {
        return Err(Error::domain("q_c chi product needs finite inputs"));
    }
    Ok(qc_estimate * chi_d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn chi_1_values() {
        assert_eq!(chi_1_exact(0.0).unwrap(), 1.0);
        assert_eq!(chi_1_exact(0.5).unwrap(), 3.0);
        assert!(close(chi_1_exact(0.9).unwrap(), 19.0, 1e-12));
        assert!(chi_1_exact(1.0).is_err());
        assert!(chi_1_exact(-0.1).is_err());
    }

    #[test]
    fn lower_bound_values() {
        let b = |p, s| qc_lower_bound(&BoundInputs::exact_d1(p, 0.0, s).unwrap()).unwrap();
        assert!(close(b(0.5, 1), 1.0 / 6.0, 1e-15));
        assert_eq!(b(0.0, 2), 0.25);
        assert!(close(b(0.9, 1), 1.0 / 38.0, 1e-15));
        let bad = BoundInputs { p: 0.5, q: 0.0, d: 1, s: 1, chi_d: 0.0 };
        assert!(qc_lower_bound(&bad).is_err());
    }

    #[test]
    fn series_values() {
        let at = |q| series_chi_bound(&BoundInputs::exact_d1(0.5, q, 1).unwrap()).unwrap();
        assert_eq!(at(0.0), SeriesBound::Finite(3.0));
        assert!(close(at(1.0 / 12.0).finite().unwrap(), 6.0, 1e-12));
        assert_eq!(at(1.0 / 6.0), SeriesBound::Divergent);
    }

    #[test]
    fn series_closed_form_matches_partial_sums() {
        let inputs = BoundInputs { p: 0.3, q: 0.02, d: 2, s: 3, chi_d: 4.5 };
        let direct: f64 = (0..200)
            .map(|n| (2.0 * 3.0f64).powi(n) * 4.5f64.powi(n + 1) * 0.02f64.powi(n))
            .sum();
        let closed = series_chi_bound(&inputs).unwrap().finite().unwrap();
        assert!(close(direct, closed, 1e-10));
    }

    #[test]
    fn kesten_values() {
        assert!(close(kesten_line(0.3).unwrap(), 0.7, 1e-15));
        assert_eq!(kesten_line(1.0).unwrap(), 0.0);
        assert_eq!(kesten_line(0.5).unwrap(), 0.5);
    }

    #[test]
    fn run_tail_values() {
        assert_eq!(run_tail_probability(0.5, 3.0).unwrap().probability, 0.125);
        assert_eq!(run_tail_probability(0.37, 0.0).unwrap().probability, 1.0);
        let t = run_tail_probability(0.0, 2.0).unwrap();
        assert!(t.degenerate && t.probability == 0.0);
        assert_eq!(run_tail_probability(1.0, 2.0).unwrap().probability, 1.0);
        let check = cluster_tail_condition(0.99, 0.01).unwrap();
        assert!(close(check.run_length, 1.99, 1e-12));
        assert!(close(check.lhs, 0.99f64.powf(1.99), 1e-15));
        assert!(close(check.lhs, 0.9802, 1e-4));
        assert!(check.holds && check.rhs == 1.0 - 0.03);
    }

    fn worked(alpha: f64) -> RenormInputs {
        RenormInputs {
            p: 0.999,
            q: 0.05,
            s: 2,
            epsilon: 0.1,
            alpha,
            site_threshold_s: Some(0.592746),
        }
    }

    #[test]
    fn good_vertex_values() {
        let v = good_vertex_prob_lower(&worked(50.0)).unwrap().valid().unwrap();
        assert!(close(v, 0.7 * (1.0 - (-5.0f64).exp()).powi(2), 1e-15));
        assert!(close(v, 0.6906, 1e-4));
        let tiny = good_vertex_prob_lower(&worked(1e-12)).unwrap().valid().unwrap();
        assert!(tiny < 1e-20);
        let check = cluster_tail_condition(0.999, 0.1).unwrap();
        assert!(close(check.run_length, 199.9, 1e-9));
        assert!(close(check.lhs, 0.819, 1e-3) && check.holds);
        let mut big_eps = worked(50.0);
        big_eps.epsilon = 0.4;
        assert!(matches!(good_vertex_prob_lower(&big_eps).unwrap(), GoodVertexBound::NonPositive { .. }));
    }

    #[test]
    fn certificate_worked_example() {
        let c = renorm_certifies_percolation(&worked(50.0)).unwrap();
        assert!(c.certified);
        assert!(close(c.q_threshold, 0.025, 1e-4));
        assert!(close(c.margin.unwrap(), 0.098, 1e-3));
        assert!(!renorm_certifies_percolation(&worked(1e-9)).unwrap().certified);
        let mut missing = worked(50.0);
        missing.site_threshold_s = None;
        assert!(matches!(renorm_certifies_percolation(&missing), Err(Error::Config { .. })));
        let mut low_q = worked(50.0);
        low_q.q = 0.02;
        assert_eq!(renorm_certifies_percolation(&low_q).unwrap().status, CertificateStatus::HypothesisFails);
    }

    #[test]
    fn half_bound_does_not_certify() {
        // alpha chosen so that the bound is 0.5 at eps = 0.1, s = 2.
        let alpha = -10.0 * (1.0 - (0.5f64 / 0.7).sqrt()).ln();
        let mut inputs = worked(alpha);
        inputs.q = 0.9;
        let c = renorm_certifies_percolation(&inputs).unwrap();
        assert!(close(c.p_bar_lower.unwrap(), 0.5, 1e-12));
        assert_eq!(c.status, CertificateStatus::BelowSiteThreshold);
    }

    #[test]
    fn kesten_line_chi_product() {
        for p in [0.0, 0.3, 0.6, 0.9, 0.99] {
            let r = qc_chi_product(chi_1_exact(p).unwrap(), kesten_line(p).unwrap()).unwrap();
            assert!(close(r, 1.0 + p, 1e-12));
        }
    }
}
