//! Closed-form throughput and full-duplex gain analysis for UL-DL, 3-node,
//! and n-user TDMA networks, plus Jain's fairness index.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// SNR/interference inputs for the throughput formulas. All ratios linear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainScenario {
    pub bandwidth_hz: f64,
    pub gamma_ul: f64,
    pub gamma_dl: f64,
    pub gamma_iui: f64,
    /// Residual self-interference-to-noise ratio (XINR) at the FD node.
    pub gamma_self: f64,
    /// Per-user link SNRs for heterogeneous networks.
    #[serde(default)]
    pub snrs: Vec<f64>,
    /// Per-user FD capability, parallel to `snrs`.
    #[serde(default)]
    pub fd_mask: Vec<bool>,
}

impl GainScenario {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gamma_ul", self.gamma_ul),
            ("gamma_dl", self.gamma_dl),
            ("gamma_iui", self.gamma_iui),
            ("gamma_self", self.gamma_self),
        ] {
            if !(v >= 0.0) {
                return Err(Error::invalid(format!("{name} must be >= 0, got {v}")));
            }
        }
        if self.snrs.iter().any(|&g| !(g >= 0.0)) {
            return Err(Error::invalid("per-user SNRs must be >= 0"));
        }
        if !self.fd_mask.is_empty() && self.fd_mask.len() != self.snrs.len() {
            return Err(Error::invalid("fd_mask length must match snrs length"));
        }
        Ok(())
    }
}

pub fn db_to_ratio(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn ratio_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// Shannon rate B log2(1 + gamma) in bits/s.
pub fn shannon_rate(bandwidth_hz: f64, gamma_linear: f64) -> Result<f64> {
    if !(gamma_linear >= 0.0) {
        return Err(Error::invalid(format!("SNR must be >= 0, got {gamma_linear}")));
    }
    Ok(bandwidth_hz * (1.0 + gamma_linear).log2())
}

/// Throughput gain, or `None` when the HD baseline is zero.
pub type GainRatio = Option<f64>;

fn gain(r_fd: f64, r_hd: f64) -> GainRatio {
    (r_hd > 0.0).then(|| r_fd / r_hd)
}

/// UL-DL network: half-duplex baseline, FD throughput, and their ratio.
///
/// HD: (B/2) log2(1+g_ul) + (B/2) log2(1+g_dl).
/// FD: B log2(1 + g_ul/(1+g_self)) + B log2(1 + g_dl/(1+g_iui)).
pub fn uldl_throughputs(s: &GainScenario) -> Result<(f64, f64, GainRatio)> {
    s.validate()?;
    let b = s.bandwidth_hz;
    let r_hd = shannon_rate(b / 2.0, s.gamma_ul)? + shannon_rate(b / 2.0, s.gamma_dl)?;
    let r_fd = shannon_rate(b, s.gamma_ul / (1.0 + s.gamma_self))?
        + shannon_rate(b, s.gamma_dl / (1.0 + s.gamma_iui))?;
    Ok((r_hd, r_fd, gain(r_fd, r_hd)))
}

/// Outputs of the 3-node analysis: baseline, each single-FD-user case, the
/// both-FD case, and the gains of the three FD cases over the baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThreeNodeThroughputs {
    pub r_hd: f64,
    pub r_user1_fd: f64,
    pub r_user2_fd: f64,
    pub r_both_fd: f64,
    pub gain_user1_fd: GainRatio,
    pub gain_user2_fd: GainRatio,
    pub gain_both_fd: GainRatio,
}

/// 3-node network (one FD base station, two users with SNRs g1, g2 taken
/// from `snrs[0..2]`).
pub fn three_node_throughputs(s: &GainScenario) -> Result<ThreeNodeThroughputs> {
    s.validate()?;
    if s.snrs.len() != 2 {
        return Err(Error::invalid(format!(
            "3-node analysis needs exactly 2 user SNRs, got {}",
            s.snrs.len()
        )));
    }
    let (g1, g2) = (s.snrs[0], s.snrs[1]);
    let b = s.bandwidth_hz;
    let gs = s.gamma_self;
    let r_hd = shannon_rate(b / 2.0, g1)? + shannon_rate(b / 2.0, g2)?;
    let fd_term = |g: f64| shannon_rate(b, g / (1.0 + gs));
    let r_user1_fd = fd_term(g1)? + shannon_rate(b / 2.0, g2)?;
    let r_user2_fd = fd_term(g2)? + shannon_rate(b / 2.0, g1)?;
    let r_both_fd = fd_term(g1)? + fd_term(g2)?;
    Ok(ThreeNodeThroughputs {
        r_hd,
        r_user1_fd,
        r_user2_fd,
        r_both_fd,
        gain_user1_fd: gain(r_user1_fd, r_hd),
        gain_user2_fd: gain(r_user2_fd, r_hd),
        gain_both_fd: gain(r_both_fd, r_hd),
    })
}

/// Equal-share TDMA throughput for n users, each HD or FD.
///
/// An FD user's slot carries traffic both ways: (B/n) * 2 log2(1 + g/(1+g_self)).
/// An HD user's slot carries (B/n) log2(1 + g). Reduces to the 3-node
/// formulas for n = 2.
pub fn tdma_network_throughput(
    snrs: &[f64],
    fd_mask: &[bool],
    gamma_self: f64,
    bandwidth_hz: f64,
) -> Result<f64> {
    if snrs.is_empty() {
        return Err(Error::invalid("network needs at least one user"));
    }
    if snrs.len() != fd_mask.len() {
        return Err(Error::invalid("fd_mask length must match snrs length"));
    }
    if !(gamma_self >= 0.0) {
        return Err(Error::invalid("gamma_self must be >= 0"));
    }
    let n = snrs.len() as f64;
    let share = bandwidth_hz / n;
    let mut total = 0.0;
    for (&g, &fd) in snrs.iter().zip(fd_mask) {
        total += if fd {
            2.0 * shannon_rate(share, g / (1.0 + gamma_self))?
        } else {
            shannon_rate(share, g)?
        };
    }
    Ok(total)
}

/// Jain's fairness index (sum r)^2 / (n * sum r^2), in (0, 1].
pub fn jains_fairness(rates: &[f64]) -> Result<f64> {
    if rates.is_empty() {
        return Err(Error::invalid("JFI needs at least one rate"));
    }
    if rates.iter().any(|&r| !(r >= 0.0)) {
        return Err(Error::invalid("rates must be >= 0"));
    }
    let sum: f64 = rates.iter().sum();
    let sum_sq: f64 = rates.iter().map(|r| r * r).sum();
    if sum_sq == 0.0 {
        return Err(Error::invalid("all rates are zero"));
    }
    Ok(sum * sum / (rates.len() as f64 * sum_sq))
}

/// One axis of a gain surface tabulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl AxisSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.steps <= 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.start + i as f64 * step).collect()
    }
}

/// Which pair of linear ratios a surface sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceKind {
    /// x = gamma_dl, y = gamma_iui, UL-DL network gain.
    DlVsIui,
    /// x = g1, y = g2, 3-node both-FD gain.
    User1VsUser2,
}

/// Dense (x, y, gain) tabulation of an FD-gain surface.
pub fn gain_surface(
    kind: SurfaceKind,
    x_axis: &AxisSpec,
    y_axis: &AxisSpec,
    base: &GainScenario,
) -> Result<Vec<(f64, f64, f64)>> {
    base.validate()?;
    let mut rows = Vec::with_capacity(x_axis.steps * y_axis.steps);
    for &x in &x_axis.values() {
        for &y in &y_axis.values() {
            let g = match kind {
                SurfaceKind::DlVsIui => {
                    let mut s = base.clone();
                    s.gamma_dl = x;
                    s.gamma_iui = y;
                    uldl_throughputs(&s)?.2
                }
                SurfaceKind::User1VsUser2 => {
                    let mut s = base.clone();
                    s.snrs = vec![x, y];
                    three_node_throughputs(&s)?.gain_both_fd
                }
            };
            rows.push((x, y, g.unwrap_or(f64::NAN)));
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn scenario(ul: f64, dl: f64, iui: f64, xinr: f64) -> GainScenario {
        GainScenario {
            bandwidth_hz: 20e6,
            gamma_ul: ul,
            gamma_dl: dl,
            gamma_iui: iui,
            gamma_self: xinr,
            snrs: vec![],
            fd_mask: vec![],
        }
    }

    #[test]
    fn shannon_rate_values() {
        assert_eq!(shannon_rate(20e6, 0.0).unwrap(), 0.0);
        assert_relative_eq!(shannon_rate(20e6, 1.0).unwrap(), 20e6, max_relative = 1e-12);
        assert_relative_eq!(
            shannon_rate(20e6, 10.0).unwrap(),
            20e6 * 11f64.log2(),
            max_relative = 1e-12
        );
        assert!((shannon_rate(20e6, 10.0).unwrap() / 1e6 - 69.189).abs() < 1e-3);
        assert!(shannon_rate(20e6, -0.1).is_err());
    }

    #[test]
    fn uldl_hand_values() {
        let (r_hd, r_fd, g) = uldl_throughputs(&scenario(10.0, 10.0, 0.0, 1.0)).unwrap();
        assert!((r_hd / 1e6 - 69.189).abs() < 1e-3);
        assert!((r_fd / 1e6 - 120.888).abs() < 1e-3);
        assert!((g.unwrap() - 1.747).abs() < 1e-3);
    }

    #[test]
    fn uldl_limits() {
        // Huge IUI kills the DL FD term.
        let (_, r_fd, _) = uldl_throughputs(&scenario(10.0, 10.0, 1e15, 1.0)).unwrap();
        let ul_only = shannon_rate(20e6, 10.0 / 2.0).unwrap();
        assert_relative_eq!(r_fd, ul_only, max_relative = 1e-6);

        // Perfect cancellation and no IUI doubles the symmetric baseline.
        let (r_hd, r_fd, g) = uldl_throughputs(&scenario(10.0, 10.0, 0.0, 0.0)).unwrap();
        assert_relative_eq!(r_fd, 2.0 * r_hd, max_relative = 1e-12);
        assert_relative_eq!(g.unwrap(), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn zero_baseline_has_no_gain() {
        let (r_hd, _, g) = uldl_throughputs(&scenario(0.0, 0.0, 0.0, 1.0)).unwrap();
        assert_eq!(r_hd, 0.0);
        assert!(g.is_none());
    }

    #[test]
    fn three_node_hand_values() {
        let mut s = scenario(0.0, 0.0, 0.0, 1.0);
        s.snrs = vec![100.0, 100.0];
        let t = three_node_throughputs(&s).unwrap();
        assert!((t.r_hd / 1e6 - 20.0 * 101f64.log2()).abs() < 1e-6);
        assert!((t.r_hd / 1e6 - 133.16).abs() < 0.01);
        assert!((t.r_both_fd / 1e6 - 40.0 * 51f64.log2()).abs() < 1e-6);
        assert!((t.r_both_fd / 1e6 - 226.90).abs() < 0.01);
        assert!((t.gain_both_fd.unwrap() - 1.704).abs() < 1e-3);
    }

    #[test]
    fn three_node_symmetry() {
        let mut s = scenario(0.0, 0.0, 0.0, 1.0);
        s.snrs = vec![50.0, 200.0];
        let t = three_node_throughputs(&s).unwrap();
        s.snrs = vec![200.0, 50.0];
        let u = three_node_throughputs(&s).unwrap();
        assert_relative_eq!(t.r_hd, u.r_hd, max_relative = 1e-12);
        assert_relative_eq!(t.r_both_fd, u.r_both_fd, max_relative = 1e-12);
        assert_relative_eq!(t.r_user1_fd, u.r_user2_fd, max_relative = 1e-12);
        assert_relative_eq!(t.r_user2_fd, u.r_user1_fd, max_relative = 1e-12);
    }

    #[test]
    fn three_node_degenerate_user2() {
        let mut s = scenario(0.0, 0.0, 0.0, 1.0);
        s.snrs = vec![100.0, 0.0];
        let t = three_node_throughputs(&s).unwrap();
        let single_hd = shannon_rate(10e6, 100.0).unwrap();
        let single_fd = shannon_rate(20e6, 50.0).unwrap();
        assert_relative_eq!(t.r_hd, single_hd, max_relative = 1e-12);
        assert_relative_eq!(t.r_user1_fd, single_fd, max_relative = 1e-12);
    }

    #[test]
    fn tdma_reduces_to_three_node() {
        let mut s = scenario(0.0, 0.0, 0.0, 1.0);
        s.snrs = vec![100.0, 40.0];
        let t = three_node_throughputs(&s).unwrap();
        let b = 20e6;
        for (mask, expected) in [
            (vec![false, false], t.r_hd),
            (vec![true, false], t.r_user1_fd),
            (vec![false, true], t.r_user2_fd),
            (vec![true, true], t.r_both_fd),
        ] {
            let r = tdma_network_throughput(&s.snrs, &mask, 1.0, b).unwrap();
            assert_relative_eq!(r, expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn tdma_all_hd_and_monotone_in_fd_users() {
        let snrs = vec![100.0, 100.0, 100.0];
        let all_hd = tdma_network_throughput(&snrs, &[false; 3], 1.0, 20e6).unwrap();
        assert_relative_eq!(all_hd, 20e6 * 101f64.log2(), max_relative = 1e-12);
        let one_fd = tdma_network_throughput(&snrs, &[true, false, false], 1.0, 20e6).unwrap();
        let two_fd = tdma_network_throughput(&snrs, &[true, true, false], 1.0, 20e6).unwrap();
        assert!(two_fd > one_fd && one_fd > all_hd);
        assert!(tdma_network_throughput(&[], &[], 1.0, 20e6).is_err());
    }

    #[test]
    fn jfi_values() {
        assert_relative_eq!(jains_fairness(&[5.0, 5.0, 5.0]).unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(jains_fairness(&[7.0, 0.0]).unwrap(), 0.5, max_relative = 1e-12);
        assert_relative_eq!(jains_fairness(&[1.0, 3.0]).unwrap(), 0.8, max_relative = 1e-12);
        assert!(jains_fairness(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn surface_monotone_in_iui() {
        let base = scenario(10.0, 10.0, 0.0, 1.0);
        let x = AxisSpec { start: 10.0, stop: 10.0, steps: 1 };
        let y = AxisSpec { start: 0.0, stop: 10.0, steps: 11 };
        let rows = gain_surface(SurfaceKind::DlVsIui, &x, &y, &base).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].2 <= w[0].2 + 1e-12);
        }
    }
}
