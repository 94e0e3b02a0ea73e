//! Capacity regions of pure-loss broadcast channels for LOCC-assisted
//! entanglement plus secret-key distillation.
//!
//! For every nonempty receiver subset `T` with complement `T̄` the combined
//! rates obey
//!
//! ```text
//! Σ_{i∈T} (E_i + K_i) ≤ log₂((1 − η_T̄) / (1 − η_B))
//! ```
//!
//! and the constraint set is tight. A finite-energy TMSV input reaches
//! `g((1 − η_T̄) N_S) − g((1 − η_B) N_S)` per subset, which converges to the
//! bound as `N_S → ∞`.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::channel::{channel_apply, BroadcastChannel};
use crate::error::{Error, Result};
use crate::gaussian::{g_function, tmsv_covariance, TmsvParams};

/// Largest receiver count for which all `2^m − 1` subsets are enumerated.
pub const MAX_RECEIVERS: usize = 20;
/// Slack allowed by membership tests.
pub const MEMBERSHIP_TOL: f64 = 1e-12;
/// `η_B` within this distance of 1 makes the full-set bound diverge.
const SATURATION_TOL: f64 = 1e-12;

/// A rate bound in bits per channel use; `Unbounded` when the closed form
/// diverges (all power reaches the receivers).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateBound {
    Finite(f64),
    Unbounded,
}

impl RateBound {
    /// The bound as a float, `+∞` when unbounded.
    pub fn value(self) -> f64 {
        match self {
            RateBound::Finite(v) => v,
            RateBound::Unbounded => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            RateBound::Finite(v) => Some(v),
            RateBound::Unbounded => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, RateBound::Finite(_))
    }

    fn map(self, f: impl FnOnce(f64) -> f64) -> RateBound {
        match self {
            RateBound::Finite(v) => RateBound::Finite(f(v)),
            RateBound::Unbounded => RateBound::Unbounded,
        }
    }
}

impl fmt::Display for RateBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateBound::Finite(v) => write!(f, "{v}"),
            RateBound::Unbounded => write!(f, "inf"),
        }
    }
}

impl Serialize for RateBound {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            RateBound::Finite(v) => serializer.serialize_f64(*v),
            RateBound::Unbounded => serializer.serialize_str("inf"),
        }
    }
}

/// Nonempty subset of the receivers, stored as a bitmask (bit `i` is `B_{i+1}`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset {
    mask: u32,
}

impl Subset {
    pub fn new(mask: u32, m: usize) -> Result<Self> {
        if m > MAX_RECEIVERS {
            return Err(Error::TooManyReceivers { m, limit: MAX_RECEIVERS });
        }
        if mask == 0 || mask >> m != 0 {
            return Err(Error::Domain(format!("subset mask {mask:#b} is empty or exceeds {m} receivers")));
        }
        Ok(Self { mask })
    }

    pub fn from_indices(indices: &[usize], m: usize) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= m.min(MAX_RECEIVERS)) {
            return Err(Error::Domain(format!("receiver index {bad} out of range for m = {m}")));
        }
        Self::new(indices.iter().fold(0, |acc, &i| acc | (1 << i)), m)
    }

    pub fn full(m: usize) -> Result<Self> {
        if m > MAX_RECEIVERS {
            return Err(Error::TooManyReceivers { m, limit: MAX_RECEIVERS });
        }
        Self::new((1u32 << m) - 1, m)
    }

    /// All `2^m − 1` nonempty subsets in increasing mask order.
    pub fn all(m: usize) -> Result<impl Iterator<Item = Subset>> {
        if m > MAX_RECEIVERS {
            return Err(Error::TooManyReceivers { m, limit: MAX_RECEIVERS });
        }
        Ok((1u32..(1u32 << m)).map(|mask| Subset { mask }))
    }

    pub fn mask(self) -> u32 {
        self.mask
    }

    pub fn contains(self, receiver: usize) -> bool {
        receiver < 32 && self.mask & (1 << receiver) != 0
    }

    pub fn members(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.mask & (1 << i) != 0)
    }

    pub fn len(self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.mask == 0
    }

    fn check(self, m: usize) -> Result<()> {
        if self.mask >> m != 0 {
            return Err(Error::DimensionMismatch { expected: m, got: 32 - self.mask.leading_zeros() as usize });
        }
        Ok(())
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.members().map(|i| format!("B{}", i + 1)).collect();
        write!(f, "{}", names.join("+"))
    }
}

/// `(η_T, η_T̄)` for a subset of the channel's receivers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsetSpec {
    pub subset: Subset,
    pub eta_in: f64,
    pub eta_out: f64,
}

impl SubsetSpec {
    pub fn new(ch: &BroadcastChannel, subset: Subset) -> Result<Self> {
        subset.check(ch.m())?;
        let (mut eta_in, mut eta_out) = (0.0, 0.0);
        for (i, &eta) in ch.transmittances().iter().enumerate() {
            if subset.contains(i) {
                eta_in += eta;
            } else {
                eta_out += eta;
            }
        }
        Ok(Self { subset, eta_in, eta_out })
    }

    /// `η_B = η_T + η_T̄`.
    pub fn eta_total(&self) -> f64 {
        self.eta_in + self.eta_out
    }
}

/// `log₂((1 − η_T̄)/(1 − η_B))`.
pub fn capacity_bound(ch: &BroadcastChannel, subset: Subset) -> Result<RateBound> {
    let spec = SubsetSpec::new(ch, subset)?;
    let outside = 1.0 - spec.eta_total();
    if outside <= SATURATION_TOL {
        // T receives nothing: the bound has a removable 0/0 and equals 0.
        if spec.eta_in == 0.0 {
            return Ok(RateBound::Finite(0.0));
        }
        return Ok(RateBound::Unbounded);
    }
    Ok(RateBound::Finite(((1.0 - spec.eta_out) / outside).log2().max(0.0)))
}

/// Finite-energy rate `g((1 − η_T̄) N_S) − g((1 − η_B) N_S)` reached with a
/// TMSV input of mean photon number `N_S`.
pub fn achievable_rate(ch: &BroadcastChannel, subset: Subset, n_s: f64) -> Result<f64> {
    let spec = SubsetSpec::new(ch, subset)?;
    let n_s = TmsvParams::new(n_s)?.mean_photons();
    let lhs = g_function(((1.0 - spec.eta_out) * n_s).max(0.0))?;
    let rhs = g_function(((1.0 - spec.eta_total()) * n_s).max(0.0))?;
    Ok(lhs - rhs)
}

/// Same quantity as [`achievable_rate`], computed as `H(A T̄) − H(A T T̄)` from
/// the covariance matrix of the channel output.
pub fn achievable_rate_via_entropy(ch: &BroadcastChannel, subset: Subset, n_s: f64) -> Result<f64> {
    subset.check(ch.m())?;
    let input = tmsv_covariance(TmsvParams::new(n_s)?);
    let out = channel_apply(ch, &input)?;
    // Modes: A = 0, B_i = 1 + i, E = m + 1.
    let a_and_outside: Vec<usize> =
        std::iter::once(0).chain((0..ch.m()).filter(|&i| !subset.contains(i)).map(|i| 1 + i)).collect();
    let a_and_receivers: Vec<usize> = (0..=ch.m()).collect();
    let h_outside = out.partial_trace(&a_and_outside)?.von_neumann_entropy()?;
    let h_all = out.partial_trace(&a_and_receivers)?.von_neumann_entropy()?;
    Ok(h_outside - h_all)
}

/// Error tolerance and block length of the one-shot converse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConverseParams {
    epsilon: f64,
    n: u64,
}

impl ConverseParams {
    pub fn new(epsilon: f64, n: u64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        if n == 0 {
            return Err(Error::Domain("number of channel uses must be positive".into()));
        }
        Ok(Self { epsilon, n })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `C(ε) = log₂ 6 + 2 log₂((1 + ε)/(1 − ε))`.
    pub fn correction(&self) -> f64 {
        6f64.log2() + 2.0 * ((1.0 + self.epsilon) / (1.0 - self.epsilon)).log2()
    }
}

/// Strong-converse bound `capacity_bound(T) + C(ε)/n`.
pub fn converse_bound(ch: &BroadcastChannel, subset: Subset, params: ConverseParams) -> Result<RateBound> {
    let extra = params.correction() / params.n as f64;
    Ok(capacity_bound(ch, subset)?.map(|b| b + extra))
}

/// Nonnegative combined rates `E_i + K_i`, one per receiver.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatePoint(Vec<f64>);

impl RatePoint {
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        if let Some(bad) = rates.iter().find(|&&r| !r.is_finite() || r < 0.0) {
            return Err(Error::Domain(format!("rates must be finite and nonnegative, got {bad}")));
        }
        Ok(Self(rates))
    }

    pub fn rates(&self) -> &[f64] {
        &self.0
    }

    fn subset_sum(&self, subset: Subset) -> f64 {
        subset.members().map(|i| self.0[i]).sum()
    }
}

/// Polytope `{ r ≥ 0 : Σ_{i∈T} r_i ≤ bound(T) for every nonempty T }`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRegion {
    m: usize,
    bounds: Vec<RateBound>,
}

impl RateRegion {
    fn from_fn(m: usize, mut f: impl FnMut(Subset) -> Result<RateBound>) -> Result<Self> {
        if m > MAX_RECEIVERS {
            return Err(Error::TooManyReceivers { m, limit: MAX_RECEIVERS });
        }
        let bounds = Subset::all(m)?.map(&mut f).collect::<Result<Vec<_>>>()?;
        Ok(Self { m, bounds })
    }

    /// Region built from finite-energy rates at mean photon number `n_s`.
    pub fn achievable(ch: &BroadcastChannel, n_s: f64) -> Result<Self> {
        Self::from_fn(ch.m(), |t| achievable_rate(ch, t, n_s).map(RateBound::Finite))
    }

    /// Region built from the converse bounds at finite block length.
    pub fn converse(ch: &BroadcastChannel, params: ConverseParams) -> Result<Self> {
        Self::from_fn(ch.m(), |t| converse_bound(ch, t, params))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn bound(&self, subset: Subset) -> Result<RateBound> {
        subset.check(self.m)?;
        Ok(self.bounds[subset.mask as usize - 1])
    }

    /// `(subset, bound)` pairs in increasing mask order.
    pub fn constraints(&self) -> impl Iterator<Item = (Subset, RateBound)> + '_ {
        self.bounds.iter().enumerate().map(|(k, &b)| (Subset { mask: k as u32 + 1 }, b))
    }

    pub fn contains(&self, point: &RatePoint) -> Result<bool> {
        self.contains_within(point, MEMBERSHIP_TOL)
    }

    pub fn contains_within(&self, point: &RatePoint, tol: f64) -> Result<bool> {
        if point.0.len() != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, got: point.0.len() });
        }
        Ok(self.constraints().all(|(t, b)| point.subset_sum(t) <= b.value() + tol))
    }

    /// Outer boundary of a two-receiver region from the `r₂` axis to the
    /// `r₁` axis, each edge split into `resolution` segments.
    pub fn boundary_1to2(&self, resolution: usize) -> Result<Vec<(f64, f64)>> {
        if self.m != 2 {
            return Err(Error::Domain(format!("boundary extraction needs m = 2, got m = {}", self.m)));
        }
        if resolution == 0 {
            return Err(Error::Domain("resolution must be at least 1".into()));
        }
        let get = |mask: u32| {
            self.bounds[mask as usize - 1]
                .finite()
                .ok_or_else(|| Error::Unbounded("all power reaches the receivers".into()))
        };
        let (c1, c2, c12) = (get(1)?, get(2)?, get(3)?);
        let top = c2.min(c12);
        let right = c1.min(c12);
        let corners = [(0.0, top), ((c12 - c2).max(0.0), top), (right, (c12 - c1).max(0.0)), (right, 0.0)];
        let mut vertices: Vec<(f64, f64)> = Vec::with_capacity(corners.len());
        for p in corners {
            if vertices.last().is_none_or(|q: &(f64, f64)| (q.0 - p.0).abs() > 1e-15 || (q.1 - p.1).abs() > 1e-15) {
                vertices.push(p);
            }
        }
        let mut out = vec![vertices[0]];
        for w in vertices.windows(2) {
            let (a, b) = (w[0], w[1]);
            for s in 1..=resolution {
                let t = s as f64 / resolution as f64;
                out.push((a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)));
            }
        }
        Ok(out)
    }
}

/// Capacity region: one constraint per nonempty receiver subset.
pub fn capacity_region(ch: &BroadcastChannel) -> Result<RateRegion> {
    RateRegion::from_fn(ch.m(), |t| capacity_bound(ch, t))
}

/// Boundary polyline of the two-receiver capacity region.
pub fn region_boundary_1to2(ch: &BroadcastChannel, resolution: usize) -> Result<Vec<(f64, f64)>> {
    capacity_region(ch)?.boundary_1to2(resolution)
}

/// Convex hull of the origin and the single-receiver capacities
/// `−log₂(1 − η_i)` placed on each axis.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSharingRegion {
    single_user: Vec<RateBound>,
}

impl TimeSharingRegion {
    /// Point-to-point capacity of each receiver.
    pub fn single_user(&self) -> &[RateBound] {
        &self.single_user
    }

    /// Hull vertices other than the origin (finite ones only).
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        let m = self.single_user.len();
        self.single_user
            .iter()
            .enumerate()
            .filter_map(|(i, b)| {
                b.finite().map(|c| {
                    let mut v = vec![0.0; m];
                    v[i] = c;
                    v
                })
            })
            .collect()
    }

    /// Largest rate sum reachable by time sharing.
    pub fn max_sum(&self) -> RateBound {
        self.single_user.iter().fold(RateBound::Finite(0.0), |acc, &b| match (acc, b) {
            (RateBound::Finite(a), RateBound::Finite(c)) => RateBound::Finite(a.max(c)),
            _ => RateBound::Unbounded,
        })
    }

    pub fn contains(&self, point: &RatePoint) -> Result<bool> {
        if point.0.len() != self.single_user.len() {
            return Err(Error::DimensionMismatch { expected: self.single_user.len(), got: point.0.len() });
        }
        let mut weight = 0.0;
        for (&r, &b) in point.0.iter().zip(&self.single_user) {
            match b {
                RateBound::Unbounded => {}
                RateBound::Finite(c) if c > 0.0 => weight += r / c,
                RateBound::Finite(_) => {
                    if r > MEMBERSHIP_TOL {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(weight <= 1.0 + MEMBERSHIP_TOL)
    }
}

pub fn time_sharing_region(ch: &BroadcastChannel) -> TimeSharingRegion {
    let single_user = ch
        .transmittances()
        .iter()
        .map(|&eta| {
            if 1.0 - eta <= SATURATION_TOL {
                RateBound::Unbounded
            } else {
                RateBound::Finite(-(1.0 - eta).log2())
            }
        })
        .collect();
    TimeSharingRegion { single_user }
}

fn check_symmetric_args(eta: f64, m: usize) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Domain(format!("total transmittance must lie in [0, 1], got {eta}")));
    }
    if m == 0 {
        return Err(Error::Domain("m must be at least 1".into()));
    }
    Ok(())
}

fn neg_log2_one_minus(x: f64) -> RateBound {
    if 1.0 - x <= SATURATION_TOL {
        RateBound::Unbounded
    } else {
        RateBound::Finite(-(-x).ln_1p() / std::f64::consts::LN_2)
    }
}

/// Equal-rate sums for `m` receivers sharing total transmittance `eta`
/// equally: `(−log₂(1 − η), −log₂(1 − η/m))` for the optimal protocol and
/// for time sharing.
pub fn symmetric_rate_sums(eta: f64, m: usize) -> Result<(RateBound, RateBound)> {
    check_symmetric_args(eta, m)?;
    Ok((neg_log2_one_minus(eta), neg_log2_one_minus(eta / m as f64)))
}

/// Rate-sum bound implied by the size-`l` subsets of the symmetric channel,
/// `(m/l) log₂((1 − (m − l) η/m)/(1 − η))`.
pub fn symmetric_constraint(eta: f64, m: usize, l: usize) -> Result<RateBound> {
    check_symmetric_args(eta, m)?;
    if l == 0 || l > m {
        return Err(Error::Domain(format!("l must satisfy 1 <= l <= m = {m}, got {l}")));
    }
    if 1.0 - eta <= SATURATION_TOL {
        return Ok(RateBound::Unbounded);
    }
    let per = eta / m as f64;
    let ratio = (1.0 - (m - l) as f64 * per) / (1.0 - eta);
    Ok(RateBound::Finite(m as f64 / l as f64 * ratio.log2()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn fig2a() -> BroadcastChannel {
        BroadcastChannel::new(vec![0.2, 0.3]).unwrap()
    }

    fn bound(ch: &BroadcastChannel, idx: &[usize]) -> f64 {
        capacity_bound(ch, Subset::from_indices(idx, ch.m()).unwrap()).unwrap().value()
    }

    #[test]
    fn capacity_bound_examples() {
        let ch = fig2a();
        assert_abs_diff_eq!(bound(&ch, &[0]), (0.7f64 / 0.5).log2(), epsilon = 1e-15);
        assert_abs_diff_eq!(bound(&ch, &[0]), 0.485427, epsilon = 1e-6);
        assert_abs_diff_eq!(bound(&ch, &[0, 1]), 1.0, epsilon = 1e-15);
        let dark = BroadcastChannel::new(vec![0.0]).unwrap();
        assert_eq!(bound(&dark, &[0]), 0.0);
    }

    #[test]
    fn saturated_channel_is_unbounded() {
        let ch = BroadcastChannel::new(vec![0.4, 0.6]).unwrap();
        let full = Subset::full(2).unwrap();
        assert_eq!(capacity_bound(&ch, full).unwrap(), RateBound::Unbounded);
        let ch = BroadcastChannel::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(capacity_bound(&ch, Subset::from_indices(&[1], 2).unwrap()).unwrap(), RateBound::Finite(0.0));
        assert_eq!(serde_json_value(RateBound::Unbounded), "\"inf\"");
    }

    fn serde_json_value(b: RateBound) -> String {
        serde_json::to_string(&b).unwrap()
    }

    #[test]
    fn region_examples() {
        let one = capacity_region(&BroadcastChannel::new(vec![0.5]).unwrap()).unwrap();
        assert_eq!(one.constraints().count(), 1);
        assert_abs_diff_eq!(one.bound(Subset::full(1).unwrap()).unwrap().value(), 1.0, epsilon = 1e-15);

        let two = capacity_region(&fig2a()).unwrap();
        let values: Vec<f64> = two.constraints().map(|(_, b)| b.value()).collect();
        assert_abs_diff_eq!(values[0], 0.485427, epsilon = 1e-6);
        assert_abs_diff_eq!(values[1], 0.678072, epsilon = 1e-6);
        assert_abs_diff_eq!(values[2], 1.0, epsilon = 1e-15);

        let zero = capacity_region(&BroadcastChannel::new(vec![0.0, 0.0]).unwrap()).unwrap();
        assert!(zero.constraints().all(|(_, b)| b == RateBound::Finite(0.0)));
    }

    #[test]
    fn too_many_receivers() {
        let ch = BroadcastChannel::new(vec![0.01; 21]).unwrap();
        assert_eq!(capacity_region(&ch).unwrap_err(), Error::TooManyReceivers { m: 21, limit: 20 });
    }

    #[test]
    fn membership() {
        let region = capacity_region(&fig2a()).unwrap();
        assert!(region.contains(&RatePoint::new(vec![0.3, 0.5]).unwrap()).unwrap());
        assert!(!region.contains(&RatePoint::new(vec![0.6, 0.5]).unwrap()).unwrap());
        assert!(region.contains(&RatePoint::new(vec![0.0, 0.0]).unwrap()).unwrap());
        assert!(region.contains(&RatePoint::new(vec![0.1]).unwrap()).is_err());
        assert!(RatePoint::new(vec![-0.1, 0.0]).is_err());
    }

    #[test]
    fn achievable_examples() {
        let ch = fig2a();
        let full = Subset::full(2).unwrap();
        assert_eq!(achievable_rate(&ch, full, 0.0).unwrap(), 0.0);
        // g(1) − g(0.5)
        let expected = 2.0 - (1.5 * 1.5f64.log2() + 0.5);
        assert_abs_diff_eq!(achievable_rate(&ch, full, 1.0).unwrap(), expected, epsilon = 1e-14);
        assert_abs_diff_eq!(expected, 0.622556, epsilon = 1e-6);
        for mask in 1..4 {
            let t = Subset::new(mask, 2).unwrap();
            let gap = capacity_bound(&ch, t).unwrap().value() - achievable_rate(&ch, t, 1e4).unwrap();
            assert!(gap > 0.0 && gap < 1e-3);
        }
        assert!(achievable_rate(&ch, full, -1.0).is_err());
    }

    #[test]
    fn entropy_route_matches_closed_form() {
        let ch = fig2a();
        for mask in 1..4 {
            let t = Subset::new(mask, 2).unwrap();
            let closed = achievable_rate(&ch, t, 1.0).unwrap();
            let pipeline = achievable_rate_via_entropy(&ch, t, 1.0).unwrap();
            assert_abs_diff_eq!(closed, pipeline, epsilon = 1e-8);
            assert_abs_diff_eq!(achievable_rate_via_entropy(&ch, t, 0.0).unwrap(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn converse_examples() {
        let third = ConverseParams::new(1.0 / 3.0, 1).unwrap();
        assert_abs_diff_eq!(third.correction(), 6f64.log2() + 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(third.correction(), 4.584963, epsilon = 1e-6);

        let ch = fig2a();
        let full = Subset::full(2).unwrap();
        let p = ConverseParams::new(0.01, 1000).unwrap();
        assert_abs_diff_eq!(converse_bound(&ch, full, p).unwrap().value(), 1.0 + 2.6427e-3, epsilon = 1e-7);
        let far = ConverseParams::new(0.01, 100_000_000).unwrap();
        assert_abs_diff_eq!(converse_bound(&ch, full, far).unwrap().value(), 1.0, epsilon = 1e-7);

        assert!(ConverseParams::new(0.0, 10).is_err());
        assert!(ConverseParams::new(1.0, 10).is_err());
        assert!(ConverseParams::new(0.5, 0).is_err());
    }

    #[test]
    fn time_sharing_examples() {
        let ts = time_sharing_region(&fig2a());
        let v = ts.vertices();
        assert_abs_diff_eq!(v[0][0], -(0.8f64.log2()), epsilon = 1e-15);
        assert_abs_diff_eq!(v[0][0], 0.321928, epsilon = 1e-6);
        assert_abs_diff_eq!(v[1][1], 0.514573, epsilon = 1e-6);
        assert!(ts.contains(&RatePoint::new(vec![0.16, 0.25]).unwrap()).unwrap());
        assert!(!ts.contains(&RatePoint::new(vec![0.17, 0.26]).unwrap()).unwrap());

        let single = BroadcastChannel::new(vec![0.4]).unwrap();
        let ts = time_sharing_region(&single);
        let cap = capacity_bound(&single, Subset::full(1).unwrap()).unwrap();
        assert_eq!(ts.single_user()[0], cap);
    }

    #[test]
    fn symmetric_examples() {
        let (opt, ts) = symmetric_rate_sums(0.1, 4).unwrap();
        assert_abs_diff_eq!(opt.value(), 0.152003, epsilon = 1e-6);
        assert_abs_diff_eq!(ts.value(), 0.036526, epsilon = 1e-6);
        let (opt, ts) = symmetric_rate_sums(0.3, 1).unwrap();
        assert_eq!(opt, ts);
        assert_eq!(symmetric_rate_sums(0.0, 3).unwrap(), (RateBound::Finite(0.0), RateBound::Finite(0.0)));
        assert!(symmetric_rate_sums(1.1, 2).is_err());

        assert_abs_diff_eq!(symmetric_constraint(0.1, 4, 1).unwrap().value(), 4.0 * (0.925f64 / 0.9).log2(), epsilon = 1e-14);
        assert_abs_diff_eq!(symmetric_constraint(0.1, 4, 1).unwrap().value(), 0.158113, epsilon = 1e-6);
        assert_abs_diff_eq!(symmetric_constraint(0.1, 4, 4).unwrap().value(), -(0.9f64.log2()), epsilon = 1e-14);
        assert!(symmetric_constraint(0.1, 4, 5).is_err());
        assert!(symmetric_constraint(0.1, 4, 0).is_err());
    }

    #[test]
    fn boundary_examples() {
        let b = region_boundary_1to2(&fig2a(), 1).unwrap();
        assert_eq!(b.len(), 4);
        assert_abs_diff_eq!(b[1].0, 0.321928, epsilon = 1e-6);
        assert_abs_diff_eq!(b[1].1, 0.678072, epsilon = 1e-6);
        assert_abs_diff_eq!(b[2].0, 0.485427, epsilon = 1e-6);
        assert_abs_diff_eq!(b[2].1, 0.514573, epsilon = 1e-6);

        let sym = region_boundary_1to2(&BroadcastChannel::new(vec![0.25, 0.25]).unwrap(), 3).unwrap();
        let n = sym.len();
        for k in 0..n {
            assert_abs_diff_eq!(sym[k].0, sym[n - 1 - k].1, epsilon = 1e-14);
        }

        let degenerate = region_boundary_1to2(&BroadcastChannel::new(vec![0.4, 0.0]).unwrap(), 1).unwrap();
        assert_eq!(degenerate.len(), 2);
        assert!(degenerate.iter().all(|p| p.1 == 0.0));

        assert!(region_boundary_1to2(&BroadcastChannel::new(vec![0.4]).unwrap(), 1).is_err());
        assert!(region_boundary_1to2(&BroadcastChannel::new(vec![0.4, 0.6]).unwrap(), 1).is_err());
    }

    #[test]
    fn gap_decays_like_inverse_energy() {
        let ch = fig2a();
        for mask in 1..4 {
            let t = Subset::new(mask, 2).unwrap();
            let cap = capacity_bound(&ch, t).unwrap().value();
            let gap = |n: f64| cap - achievable_rate(&ch, t, n).unwrap();
            let c = 2.0 * gap(10.0) * 10.0;
            for k in 1..=50 {
                let n = 10f64.powf(1.0 + k as f64 * 0.1);
                assert!(gap(n) > 0.0);
                assert!(gap(n) <= c / n, "mask {mask}, N_S = {n}");
            }
        }
    }

    fn channel_strategy(max_m: usize) -> impl Strategy<Value = BroadcastChannel> {
        proptest::collection::vec(0.0f64..1.0, 2..=max_m + 1).prop_map(|w| {
            // Last weight goes to the environment.
            let total: f64 = w.iter().sum::<f64>().max(1e-9);
            BroadcastChannel::new(w[..w.len() - 1].iter().map(|x| x / total).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn finite_energy_stays_below_capacity(ch in channel_strategy(4), n_s in 0.01f64..50.0, mask_seed in 1u32..1000) {
            let t = Subset::new(mask_seed % ((1 << ch.m()) - 1) + 1, ch.m()).unwrap();
            let rate = achievable_rate(&ch, t, n_s).unwrap();
            let cap = capacity_bound(&ch, t).unwrap().value();
            let spec = SubsetSpec::new(&ch, t).unwrap();
            if spec.eta_in > 1e-9 {
                prop_assert!(rate < cap);
            }
            let via = achievable_rate_via_entropy(&ch, t, n_s).unwrap();
            prop_assert!((rate - via).abs() < 1e-8, "{rate} vs {via}");
            let conv = converse_bound(&ch, t, ConverseParams::new(0.1, 1000).unwrap()).unwrap().value();
            prop_assert!(conv >= rate);
        }

        #[test]
        fn time_sharing_strictly_inside(ch in channel_strategy(4)) {
            prop_assume!(ch.m() >= 2 && ch.transmittances().iter().all(|&e| e > 1e-6));
            let ts = time_sharing_region(&ch);
            let region = capacity_region(&ch).unwrap();
            for v in ts.vertices() {
                prop_assert!(region.contains(&RatePoint::new(v).unwrap()).unwrap());
            }
            let full = region.bound(Subset::full(ch.m()).unwrap()).unwrap().value();
            prop_assert!(ts.max_sum().value() < full - 1e-9);
        }

        #[test]
        fn enlarging_a_receiver_never_shrinks_its_bounds(ch in channel_strategy(4), which in 0usize..4, frac in 0.0f64..1.0) {
            let i = which % ch.m();
            let mut etas = ch.transmittances().to_vec();
            etas[i] += frac * ch.environment();
            let bigger = BroadcastChannel::new(etas).unwrap();
            for t in Subset::all(ch.m()).unwrap().filter(|t| t.contains(i)) {
                prop_assert!(capacity_bound(&bigger, t).unwrap().value() >= capacity_bound(&ch, t).unwrap().value() - 1e-12);
            }
        }
    }

    #[test]
    fn symmetric_constraint_decreases_in_l() {
        for k in 1..=19 {
            let eta = 0.05 * k as f64;
            for m in 1..=16 {
                let values: Vec<f64> = (1..=m).map(|l| symmetric_constraint(eta, m, l).unwrap().value()).collect();
                for w in values.windows(2) {
                    assert!(w[1] <= w[0] + 1e-12, "eta {eta}, m {m}: {values:?}");
                }
            }
        }
    }
}
