//! Squeezed-state CVQKD with reverse reconciliation over a 1-to-2 pure-loss
//! broadcast channel.
//!
//! Alice keeps mode `A` of a TMSV with mean photon number `μ` and homodynes
//! it; `A′` is split between Bob (`η_B`), Charlie (`η_C`) and the environment.
//! Bob and Charlie heterodyne, which is modelled as 50% loss followed by a
//! homodyne. Eavesdroppers for the Alice–Bob key are the environment together
//! with Charlie (`CE`), and symmetrically `BE` for Alice–Charlie.
//!
//! The joint covariance is built by propagating the TMSV through the channel
//! rather than written down entry by entry. Only `x`-quadrature outcomes are
//! used; the `p` branch is a sign-mirrored copy with identical information
//! content.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::channel::{channel_apply, BroadcastChannel};
use crate::error::{Error, Result};
use crate::gaussian::{
    g_function, tmsv_covariance, ClassicalGaussian, CovarianceMatrix, Quadrature, TmsvParams,
};

/// Membership slack used by the region comparisons.
pub const REGION_TOL: f64 = 1e-12;

/// Transmittances to Bob and Charlie and the modulation strength `μ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioJson", into = "ScenarioJson")]
pub struct QkdScenario {
    eta_b: f64,
    eta_c: f64,
    mu: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct ScenarioJson {
    eta_b: f64,
    eta_c: f64,
    mu: f64,
}

impl TryFrom<ScenarioJson> for QkdScenario {
    type Error = Error;

    fn try_from(j: ScenarioJson) -> Result<Self> {
        QkdScenario::new(j.eta_b, j.eta_c, j.mu)
    }
}

impl From<QkdScenario> for ScenarioJson {
    fn from(s: QkdScenario) -> Self {
        ScenarioJson { eta_b: s.eta_b, eta_c: s.eta_c, mu: s.mu }
    }
}

impl QkdScenario {
    pub fn new(eta_b: f64, eta_c: f64, mu: f64) -> Result<Self> {
        BroadcastChannel::new(vec![eta_b, eta_c])?;
        if eta_b > 1.0 || eta_c > 1.0 {
            return Err(Error::InvalidChannel(format!("transmittances ({eta_b}, {eta_c}) exceed 1")));
        }
        TmsvParams::new(mu)?;
        Ok(Self { eta_b, eta_c, mu })
    }

    pub fn eta_b(&self) -> f64 {
        self.eta_b
    }

    pub fn eta_c(&self) -> f64 {
        self.eta_c
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `v = 2μ + 1`.
    pub fn v(&self) -> f64 {
        2.0 * self.mu + 1.0
    }

    /// Same scenario with Bob and Charlie exchanged.
    pub fn swapped(&self) -> Self {
        Self { eta_b: self.eta_c, eta_c: self.eta_b, mu: self.mu }
    }
}

/// Pure state over `(A, B, C, E)` before detection.
pub fn channel_output(s: &QkdScenario) -> Result<CovarianceMatrix> {
    let ch = BroadcastChannel::new(vec![s.eta_b, s.eta_c])?;
    channel_apply(&ch, &tmsv_covariance(TmsvParams::new(s.mu)?))
}

/// Covariance over `(A, B, C)` with the heterodyne loss already applied to
/// `B` and `C`.
pub fn build_joint_covariance(s: &QkdScenario) -> Result<CovarianceMatrix> {
    channel_output(s)?.heterodyne_as_loss(1)?.heterodyne_as_loss(2)?.partial_trace(&[0, 1, 2])
}

/// Joint distribution of the homodyne outcomes `X`, `Y`, `Z`.
pub fn outcome_distribution(s: &QkdScenario, quadrature: Quadrature) -> Result<ClassicalGaussian> {
    build_joint_covariance(s)?.quadrature_block(quadrature, &[0, 1, 2], &["X", "Y", "Z"])
}

/// Classical and quantum information terms of one scenario, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfoReport {
    pub h_x: f64,
    pub h_y: f64,
    pub h_z: f64,
    pub h_xy: f64,
    pub h_xz: f64,
    pub h_xyz: f64,
    pub i_x_y: f64,
    pub i_x_z: f64,
    /// `I(XZ;Y)`.
    pub i_xz_y: f64,
    /// `I(XY;Z)`.
    pub i_xy_z: f64,
    /// `I(Y;Z|X)`.
    pub i_y_z_given_x: f64,
    /// `I(Y;CE)`, leakage of Bob's outcome to Charlie and the environment.
    pub holevo_b: f64,
    /// `I(Z;BE)`.
    pub holevo_c: f64,
}

/// Holevo leakage from the closed-form single-mode expressions.
fn leakage_closed_form(eta: f64, v: f64) -> Result<f64> {
    let lost = (1.0 - eta) * (v - 1.0);
    let h_eve = g_function(lost / 2.0)?;
    let alpha = lost / (eta * (v - 1.0) / 2.0 + 1.0) + 1.0;
    let beta = lost + 1.0;
    let h_eve_given = g_function((((alpha * beta).sqrt() - 1.0) / 2.0).max(0.0))?;
    Ok(h_eve - h_eve_given)
}

/// `I(Y;CE) = H(CE) − H(CE|Y)` with `H(CE) = g((1 − η_B)(v − 1)/2)` and
/// `H(CE|Y) = g((√(αβ) − 1)/2)`, where `diag(α, β)` is the state of the
/// combined `CE` mode conditioned on Bob's outcome.
pub fn holevo_leakage_b(s: &QkdScenario) -> Result<f64> {
    leakage_closed_form(s.eta_b, s.v())
}

/// `I(Z;BE)`, the mirror image of [`holevo_leakage_b`].
pub fn holevo_leakage_c(s: &QkdScenario) -> Result<f64> {
    leakage_closed_form(s.eta_c, s.v())
}

/// Entropy of the eavesdroppers' modes before and after conditioning on the
/// receiver's outcome, from the full covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeakageTerms {
    /// Entropy of the eavesdropper modes, computed directly.
    pub h_eve: f64,
    /// Entropy of `A` plus the receiver's mode, which equals `h_eve` because
    /// the four-mode state is pure.
    pub h_complement: f64,
    pub h_eve_given_outcome: f64,
}

impl LeakageTerms {
    pub fn leakage(&self) -> f64 {
        self.h_complement - self.h_eve_given_outcome
    }
}

fn leakage_pipeline(state: &CovarianceMatrix, receiver: usize, eves: [usize; 2]) -> Result<LeakageTerms> {
    let h_eve = state.partial_trace(&eves)?.von_neumann_entropy()?;
    let h_complement = state.partial_trace(&[0, receiver])?.von_neumann_entropy()?;
    // Heterodyne noise is traced out, then Bob's x outcome is conditioned on.
    let detected = state.heterodyne_as_loss(receiver)?;
    let conditioned = detected.homodyne_condition(receiver, Quadrature::X)?;
    // Removing `receiver` shifts the later mode indices down by one.
    let shift = |k: usize| if k > receiver { k - 1 } else { k };
    let h_eve_given_outcome =
        conditioned.partial_trace(&[shift(eves[0]), shift(eves[1])])?.von_neumann_entropy()?;
    Ok(LeakageTerms { h_eve, h_complement, h_eve_given_outcome })
}

/// `I(Y;CE)` terms from the covariance pipeline.
pub fn holevo_leakage_b_pipeline(s: &QkdScenario) -> Result<LeakageTerms> {
    leakage_pipeline(&channel_output(s)?, 1, [2, 3])
}

/// `I(Z;BE)` terms from the covariance pipeline.
pub fn holevo_leakage_c_pipeline(s: &QkdScenario) -> Result<LeakageTerms> {
    leakage_pipeline(&channel_output(s)?, 2, [1, 3])
}

/// Every information quantity entering the key rates.
pub fn info_report(s: &QkdScenario) -> Result<InfoReport> {
    let dist = outcome_distribution(s, Quadrature::X)?;
    let h = |vars: &[&str]| dist.entropy(vars);
    let (h_x, h_y, h_z) = (h(&["X"])?, h(&["Y"])?, h(&["Z"])?);
    let (h_xy, h_xz, h_yz, h_xyz) = (h(&["X", "Y"])?, h(&["X", "Z"])?, h(&["Y", "Z"])?, h(&["X", "Y", "Z"])?);
    let _ = h_yz;
    Ok(InfoReport {
        h_x,
        h_y,
        h_z,
        h_xy,
        h_xz,
        h_xyz,
        i_x_y: h_x + h_y - h_xy,
        i_x_z: h_x + h_z - h_xz,
        i_xz_y: h_xz + h_y - h_xyz,
        i_xy_z: h_xy + h_z - h_xyz,
        i_y_z_given_x: h_xy + h_xz - h_x - h_xyz,
        holevo_b: holevo_leakage_b(s)?,
        holevo_c: holevo_leakage_c(s)?,
    })
}

/// Secret-key rates `(K_AB, K_AC)` in bits per channel use, unclamped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KeyRatePair {
    pub k_ab: f64,
    pub k_ac: f64,
}

impl KeyRatePair {
    /// Rates floored at zero, for display.
    pub fn clamped(&self) -> Self {
        Self { k_ab: self.k_ab.max(0.0), k_ac: self.k_ac.max(0.0) }
    }

    pub fn as_point(&self) -> (f64, f64) {
        (self.k_ab, self.k_ac)
    }
}

impl InfoReport {
    /// Both receivers reconcile independently on the same data.
    pub fn simultaneous(&self) -> KeyRatePair {
        KeyRatePair { k_ab: self.i_x_y - self.holevo_b, k_ac: self.i_x_z - self.holevo_c }
    }

    /// Charlie reconciles first, after which Alice also holds `Z`.
    pub fn charlie_first(&self) -> KeyRatePair {
        KeyRatePair { k_ab: self.i_xz_y - self.holevo_b, k_ac: self.i_x_z - self.holevo_c }
    }

    /// Bob reconciles first, after which Alice also holds `Y`.
    pub fn bob_first(&self) -> KeyRatePair {
        KeyRatePair { k_ab: self.i_x_y - self.holevo_b, k_ac: self.i_xy_z - self.holevo_c }
    }
}

pub fn key_rates_simultaneous(s: &QkdScenario) -> Result<KeyRatePair> {
    Ok(info_report(s)?.simultaneous())
}

pub fn key_rates_charlie_first(s: &QkdScenario) -> Result<KeyRatePair> {
    Ok(info_report(s)?.charlie_first())
}

pub fn key_rates_bob_first(s: &QkdScenario) -> Result<KeyRatePair> {
    Ok(info_report(s)?.bob_first())
}

/// Convex region in the nonnegative quadrant that is closed under lowering
/// either coordinate, described by its outer vertices ordered from the
/// `K_AC` axis towards the `K_AB` axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DownClosedRegion {
    pub outer: Vec<(f64, f64)>,
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

impl DownClosedRegion {
    /// Takes the down-closure of the convex hull of `points` (negative
    /// coordinates are floored at zero).
    pub fn from_points(points: &[(f64, f64)]) -> Self {
        let mut pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.max(0.0), y.max(0.0))).collect();
        let x_max = pts.iter().fold(0.0_f64, |a, p| a.max(p.0));
        let y_max = pts.iter().fold(0.0_f64, |a, p| a.max(p.1));
        pts.push((0.0, y_max));
        pts.push((x_max, 0.0));
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
        pts.dedup();
        // Upper hull, left to right.
        let mut hull: Vec<(f64, f64)> = Vec::new();
        for p in pts {
            while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) >= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        // Keep the part that descends from the top-left to the bottom-right.
        let top = hull.iter().position(|p| p.1 == y_max).unwrap_or(0);
        let outer = hull[top..].to_vec();
        Self { outer }
    }

    fn polygon(&self) -> Vec<(f64, f64)> {
        let mut poly = vec![(0.0, 0.0)];
        let last = *self.outer.last().expect("outer boundary is never empty");
        poly.push((last.0, 0.0));
        poly.extend(self.outer.iter().rev());
        poly.push((0.0, self.outer[0].1));
        poly
    }

    pub fn contains(&self, p: (f64, f64), tol: f64) -> bool {
        if p.0 < -tol || p.1 < -tol {
            return false;
        }
        let poly = self.polygon();
        poly.iter().zip(poly.iter().cycle().skip(1)).all(|(&a, &b)| {
            let len = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
            len == 0.0 || cross(a, b, p) / len >= -tol
        })
    }

    /// Every point of `other` lies in `self`.
    pub fn includes(&self, other: &DownClosedRegion, tol: f64) -> bool {
        other.polygon().iter().all(|&p| self.contains(p, tol))
    }

    /// `self ⊇ other` and some point of `self` lies outside `other` by more
    /// than `margin`.
    pub fn strictly_includes(&self, other: &DownClosedRegion, margin: f64) -> bool {
        self.includes(other, REGION_TOL) && self.polygon().iter().any(|&p| !other.contains(p, margin))
    }

    /// Boundary polyline from the `K_AC` axis to the `K_AB` axis, each edge
    /// split into `resolution` segments.
    pub fn boundary(&self, resolution: usize) -> Vec<(f64, f64)> {
        let first = (0.0, self.outer[0].1);
        let last = (self.outer[self.outer.len() - 1].0, 0.0);
        let mut vertices = vec![first];
        vertices.extend(self.outer.iter().copied());
        vertices.push(last);
        vertices.dedup();
        let mut out = vec![vertices[0]];
        let resolution = resolution.max(1);
        for w in vertices.windows(2) {
            for s in 1..=resolution {
                let t = s as f64 / resolution as f64;
                out.push((w[0].0 + t * (w[1].0 - w[0].0), w[0].1 + t * (w[1].1 - w[0].1)));
            }
        }
        out
    }
}

/// The three regions compared for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QkdRegions {
    pub charlie_first: KeyRatePair,
    pub bob_first: KeyRatePair,
    pub simultaneous: KeyRatePair,
    /// Time sharing of the two ordered-reconciliation rate pairs.
    pub broadcast: DownClosedRegion,
    /// Rectangle of the simultaneous point-to-point rates.
    pub point_to_point: DownClosedRegion,
    /// Time sharing between serving only Bob and serving only Charlie.
    pub time_sharing: DownClosedRegion,
    /// `I(Y;Z|X)`, the gain of reconciling second.
    pub gain_b: f64,
    /// `I(Y;Z|X)` again for Charlie's side (the quantity is symmetric).
    pub gain_c: f64,
}

pub fn qkd_regions(s: &QkdScenario) -> Result<QkdRegions> {
    let report = info_report(s)?;
    let (cf, bf, sim) = (report.charlie_first(), report.bob_first(), report.simultaneous());
    Ok(QkdRegions {
        charlie_first: cf,
        bob_first: bf,
        simultaneous: sim,
        broadcast: DownClosedRegion::from_points(&[cf.as_point(), bf.as_point()]),
        point_to_point: DownClosedRegion::from_points(&[sim.as_point()]),
        time_sharing: DownClosedRegion::from_points(&[(sim.k_ab, 0.0), (0.0, sim.k_ac)]),
        gain_b: cf.k_ab - sim.k_ab,
        gain_c: bf.k_ac - sim.k_ac,
    })
}

/// A labelled boundary curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionCurve {
    pub label: &'static str,
    pub points: Vec<(f64, f64)>,
}

/// Boundary polylines of the broadcast, simultaneous and time-sharing
/// regions, with `resolution` segments per edge.
pub fn bc_rate_region(s: &QkdScenario, resolution: usize) -> Result<Vec<RegionCurve>> {
    let regions = qkd_regions(s)?;
    Ok(vec![
        RegionCurve { label: "bc-cvqkd", points: regions.broadcast.boundary(resolution) },
        RegionCurve { label: "simultaneous", points: regions.point_to_point.boundary(resolution) },
        RegionCurve { label: "time-sharing", points: regions.time_sharing.boundary(resolution) },
    ])
}

/// `x` block of the joint covariance, `[[a, d, f], [d, b, e], [f, e, c]]`.
pub fn x_block(s: &QkdScenario) -> Result<DMatrix<f64>> {
    let g = build_joint_covariance(s)?;
    Ok(g.entries().view((0, 0), (3, 3)).into_owned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fig3(mu: f64) -> QkdScenario {
        QkdScenario::new(0.3, 0.3, mu).unwrap()
    }

    #[test]
    fn scenario_validation() {
        assert!(QkdScenario::new(0.6, 0.5, 1.0).is_err());
        assert!(QkdScenario::new(-0.1, 0.5, 1.0).is_err());
        assert!(QkdScenario::new(0.1, 0.5, -1.0).is_err());
        let s: QkdScenario = serde_json::from_str(r#"{"eta_b":0.3,"eta_c":0.2,"mu":5}"#).unwrap();
        assert_eq!(s, QkdScenario::new(0.3, 0.2, 5.0).unwrap());
        assert!(serde_json::from_str::<QkdScenario>(r#"{"eta_b":0.9,"eta_c":0.2,"mu":5}"#).is_err());
    }

    #[test]
    fn joint_covariance_entries() {
        let vac = build_joint_covariance(&QkdScenario::new(0.2, 0.4, 0.0).unwrap()).unwrap();
        assert!((vac.entries() - DMatrix::identity(6, 6)).amax() < 1e-14);

        let (eb, ec, mu) = (0.25, 0.35, 2.0);
        let s = QkdScenario::new(eb, ec, mu).unwrap();
        let v = s.v();
        let g = build_joint_covariance(&s).unwrap();
        let x = |r: usize, c: usize| g.get(r, c);
        let p = |r: usize, c: usize| g.get(3 + r, 3 + c);
        assert_abs_diff_eq!(x(0, 0), v, epsilon = 1e-12);
        assert_abs_diff_eq!(x(1, 1), eb * (v - 1.0) / 2.0 + 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(x(2, 2), ec * (v - 1.0) / 2.0 + 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(x(0, 1), (eb * (v * v - 1.0) / 2.0).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(x(0, 2), (ec * (v * v - 1.0) / 2.0).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(x(1, 2), (eb * ec).sqrt() * (v - 1.0) / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p(0, 1), -x(0, 1), epsilon = 1e-12);
        assert_abs_diff_eq!(p(0, 2), -x(0, 2), epsilon = 1e-12);
        assert_abs_diff_eq!(p(1, 2), x(1, 2), epsilon = 1e-12);
        for r in 0..3 {
            for c in 0..3 {
                assert_abs_diff_eq!(g.get(r, 3 + c), 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn symmetric_scenario_is_swap_invariant() {
        let g = build_joint_covariance(&fig3(5.0)).unwrap();
        let swapped = g.permute_modes(&[0, 2, 1]).unwrap();
        assert!((g.entries() - swapped.entries()).amax() < 1e-12);
    }

    #[test]
    fn classical_entropies_match_single_and_pair_closed_forms() {
        let pe = std::f64::consts::PI * std::f64::consts::E;
        for (eb, ec, mu) in [(0.3, 0.3, 1.0), (0.3, 0.2, 5.0), (0.1, 0.6, 20.0)] {
            let s = QkdScenario::new(eb, ec, mu).unwrap();
            let v = s.v();
            let r = info_report(&s).unwrap();
            assert_abs_diff_eq!(r.h_x, 0.5 * (pe * v).log2(), epsilon = 1e-10);
            assert_abs_diff_eq!(r.h_y, 0.5 * (pe * (eb / 2.0 * (v - 1.0) + 1.0)).log2(), epsilon = 1e-10);
            assert_abs_diff_eq!(r.h_z, 0.5 * (pe * (ec / 2.0 * (v - 1.0) + 1.0)).log2(), epsilon = 1e-10);
            let det_xy = (1.0 - eb / 2.0) * (v - 1.0) + 1.0;
            let det_xz = (1.0 - ec / 2.0) * (v - 1.0) + 1.0;
            assert_abs_diff_eq!(r.h_xy, 0.5 * (pe * pe * det_xy).log2(), epsilon = 1e-10);
            assert_abs_diff_eq!(r.h_xz, 0.5 * (pe * pe * det_xz).log2(), epsilon = 1e-10);
            // Conditioning Y, Z on X leaves a 2x2 block with determinant
            // 1 − (p + q)(v − 1)/v, where p = η_B/2, q = η_C/2.
            let det_xyz = (1.0 - (eb + ec) / 2.0) * (v - 1.0) + 1.0;
            assert_abs_diff_eq!(r.h_xyz, 0.5 * (pe.powi(3) * det_xyz).log2(), epsilon = 1e-10);
        }
    }

    #[test]
    fn p_branch_carries_the_same_information() {
        let s = QkdScenario::new(0.3, 0.2, 5.0).unwrap();
        let x = outcome_distribution(&s, Quadrature::X).unwrap();
        let p = outcome_distribution(&s, Quadrature::P).unwrap();
        let sign = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, 1.0, 1.0]));
        assert!((&sign * x.covariance() * &sign - p.covariance()).amax() < 1e-12);
        for (a, b) in [(&["X"][..], &["Y"][..]), (&["X", "Z"][..], &["Y"][..]), (&["X", "Y"][..], &["Z"][..])] {
            assert_abs_diff_eq!(
                x.mutual_information(a, b).unwrap(),
                p.mutual_information(a, b).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn leakage_closed_form_vs_pipeline() {
        for (eb, ec, mu) in [(0.3, 0.3, 5.0), (0.3, 0.3, 1.0), (0.2, 0.5, 3.0), (0.7, 0.1, 0.5)] {
            let s = QkdScenario::new(eb, ec, mu).unwrap();
            let pb = holevo_leakage_b_pipeline(&s).unwrap();
            let pc = holevo_leakage_c_pipeline(&s).unwrap();
            assert_abs_diff_eq!(pb.leakage(), holevo_leakage_b(&s).unwrap(), epsilon = 1e-8);
            assert_abs_diff_eq!(pc.leakage(), holevo_leakage_c(&s).unwrap(), epsilon = 1e-8);
            let h_ce = g_function((1.0 - eb) * (s.v() - 1.0) / 2.0).unwrap();
            assert_abs_diff_eq!(pb.h_complement, h_ce, epsilon = 1e-8);
            assert_abs_diff_eq!(pb.h_eve, h_ce, epsilon = 1e-8);
        }
    }

    #[test]
    fn leakage_edge_cases() {
        assert_eq!(holevo_leakage_b(&QkdScenario::new(0.3, 0.3, 0.0).unwrap()).unwrap(), 0.0);
        let lossless = QkdScenario::new(1.0, 0.0, 4.0).unwrap();
        assert_abs_diff_eq!(holevo_leakage_b(&lossless).unwrap(), 0.0, epsilon = 1e-14);
        let terms = holevo_leakage_b_pipeline(&lossless).unwrap();
        assert_abs_diff_eq!(terms.h_eve, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(terms.leakage(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn vacuum_modulation_gives_nothing() {
        let r = info_report(&QkdScenario::new(0.3, 0.3, 0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(r.i_x_y, 0.0, epsilon = 1e-14);
        for pair in [r.simultaneous(), r.charlie_first(), r.bob_first()] {
            assert_abs_diff_eq!(pair.k_ab, 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(pair.k_ac, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn ordered_reconciliation_gain() {
        for mu in [0.5, 1.0, 5.0, 20.0] {
            let r = info_report(&fig3(mu)).unwrap();
            let gain = r.charlie_first().k_ab - r.simultaneous().k_ab;
            assert_abs_diff_eq!(gain, r.i_y_z_given_x, epsilon = 1e-10);
            assert!(r.i_y_z_given_x > 0.0);
            assert!(r.i_xz_y >= r.i_x_y - 1e-9);
            let sim = r.simultaneous();
            assert_abs_diff_eq!(sim.k_ab, sim.k_ac, epsilon = 1e-12);
            let (cf, bf) = (r.charlie_first(), r.bob_first());
            assert_abs_diff_eq!(cf.k_ab, bf.k_ac, epsilon = 1e-12);
            assert_abs_diff_eq!(cf.k_ac, bf.k_ab, epsilon = 1e-12);
        }
    }

    #[test]
    fn region_inclusions_at_fig3() {
        let regions = qkd_regions(&fig3(5.0)).unwrap();
        assert!(regions.simultaneous.k_ab > 0.0);
        assert!(regions.broadcast.strictly_includes(&regions.point_to_point, 1e-9));
        assert!(regions.point_to_point.strictly_includes(&regions.time_sharing, 1e-9));
        assert!(!regions.time_sharing.includes(&regions.point_to_point, REGION_TOL));
    }

    #[test]
    fn region_collapses_without_modulation() {
        for curve in bc_rate_region(&fig3(0.0), 4).unwrap() {
            assert!(curve.points.iter().all(|p| p.0.abs() < 1e-14 && p.1.abs() < 1e-14), "{}", curve.label);
        }
    }

    #[test]
    fn region_symmetric_under_swap() {
        for curve in bc_rate_region(&fig3(5.0), 3).unwrap() {
            let n = curve.points.len();
            for k in 0..n {
                assert_abs_diff_eq!(curve.points[k].0, curve.points[n - 1 - k].1, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn down_closed_region_geometry() {
        let r = DownClosedRegion::from_points(&[(1.0, 0.5), (0.5, 1.0)]);
        assert_eq!(r.outer, vec![(0.0, 1.0), (0.5, 1.0), (1.0, 0.5), (1.0, 0.0)]);
        assert!(r.contains((0.75, 0.75), 1e-12));
        assert!(!r.contains((0.8, 0.8), 1e-12));
        assert!(!r.contains((1.01, 0.1), 1e-12));
        let rect = DownClosedRegion::from_points(&[(0.5, 0.5)]);
        assert!(r.strictly_includes(&rect, 1e-9));
        assert!(!rect.includes(&r, 1e-12));
        // A dominated interior point does not change the hull.
        assert_eq!(DownClosedRegion::from_points(&[(1.0, 0.5), (0.5, 1.0), (0.6, 0.6)]), r);
    }

    #[test]
    fn rates_finite_at_huge_modulation() {
        let r = info_report(&fig3(1e6)).unwrap();
        for pair in [r.simultaneous(), r.charlie_first(), r.bob_first()] {
            assert!(pair.k_ab.is_finite() && pair.k_ac.is_finite());
        }
        let big = info_report(&fig3(1e5)).unwrap().simultaneous().k_ab;
        assert!((r.simultaneous().k_ab - big).abs() < 1e-3);
    }

    #[test]
    fn simultaneous_rate_grows_with_bob_transmittance() {
        for mu in [1.0, 5.0, 20.0] {
            let mut last = f64::NEG_INFINITY;
            for k in 0..=60 {
                let eb = k as f64 * 0.01;
                let rate = key_rates_simultaneous(&QkdScenario::new(eb, 0.3, mu).unwrap()).unwrap().k_ab;
                assert!(rate >= last - 1e-12, "mu {mu}, eta_b {eb}");
                last = rate;
            }
        }
    }
}
