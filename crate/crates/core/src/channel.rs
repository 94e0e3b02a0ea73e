//! Passive linear-optical broadcast channels.
//!
//! A single sender mode `A′` enters an `l`-mode interferometer whose other
//! inputs are vacuum. Some outputs belong to receivers `B₁ … B_m`, the rest
//! to the environment `E`. Only the column `U[·, A′]` of the interferometer
//! matters for the reduced channel, which is equivalent to a cascade of `m`
//! beam splitters tapping power off a single line.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{apply_symplectic, beam_splitter, CovarianceMatrix, SymplecticTransform};

/// Tolerance on `U†U = I` (Frobenius norm).
pub const UNITARY_TOL: f64 = 1e-10;
/// Tolerance on `Σ η ≤ 1`.
pub const POWER_TOL: f64 = 1e-12;

/// An `l`-mode interferometer with one signal input and `m` receiver outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOpticalNetwork {
    unitary: DMatrix<Complex64>,
    input_mode: usize,
    receiver_modes: Vec<usize>,
}

/// Frobenius norm of `U†U − I`.
pub fn unitarity_residual(u: &DMatrix<Complex64>) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - DMatrix::<Complex64>::identity(n, n)).norm()
}

impl LinearOpticalNetwork {
    pub fn new(unitary: DMatrix<Complex64>, input_mode: usize, receiver_modes: Vec<usize>) -> Result<Self> {
        if !unitary.is_square() || unitary.nrows() == 0 {
            return Err(Error::Domain(format!(
                "network matrix must be square and non-empty, got {}x{}",
                unitary.nrows(),
                unitary.ncols()
            )));
        }
        let l = unitary.nrows();
        let residual = unitarity_residual(&unitary);
        if residual.is_nan() || residual > UNITARY_TOL {
            return Err(Error::NotUnitary(residual));
        }
        if input_mode >= l {
            return Err(Error::InvalidModes(format!("input mode {input_mode} out of range for l = {l}")));
        }
        if receiver_modes.is_empty() {
            return Err(Error::InvalidModes("at least one receiver is required".into()));
        }
        for (i, &r) in receiver_modes.iter().enumerate() {
            if r >= l {
                return Err(Error::InvalidModes(format!("receiver mode {r} out of range for l = {l}")));
            }
            if receiver_modes[..i].contains(&r) {
                return Err(Error::InvalidModes(format!("receiver mode {r} listed twice")));
            }
        }
        Ok(Self { unitary, input_mode, receiver_modes })
    }

    pub fn l(&self) -> usize {
        self.unitary.nrows()
    }

    pub fn unitary(&self) -> &DMatrix<Complex64> {
        &self.unitary
    }

    pub fn input_mode(&self) -> usize {
        self.input_mode
    }

    pub fn receiver_modes(&self) -> &[usize] {
        &self.receiver_modes
    }

    /// Amplitude of the signal arriving at output `mode`.
    pub fn amplitude(&self, mode: usize) -> Complex64 {
        self.unitary[(mode, self.input_mode)]
    }

    /// Sends the last mode of `input` through the full interferometer with
    /// vacuum on every other port.
    ///
    /// Returns the covariance over the untouched input modes followed by all
    /// `l` network outputs.
    pub fn simulate_full(&self, input: &CovarianceMatrix) -> Result<CovarianceMatrix> {
        let k = input.n_modes();
        let l = self.l();
        let kept = k - 1;
        // Joint modes: [A…, A′, vacua…] reordered so that A′ sits at the
        // network's input port.
        let joint = input.direct_sum(&CovarianceMatrix::vacuum(l - 1));
        let mut order: Vec<usize> = (0..kept).collect();
        let mut next_vacuum = k;
        for port in 0..l {
            if port == self.input_mode {
                order.push(kept);
            } else {
                order.push(next_vacuum);
                next_vacuum += 1;
            }
        }
        let arranged = joint.permute_modes(&order)?;
        let total = kept + l;
        let mut u = DMatrix::<Complex64>::identity(total, total);
        u.view_mut((kept, kept), (l, l)).copy_from(&self.unitary);
        let s = SymplecticTransform::from_passive_unitary(&u)?;
        apply_symplectic(&s, &arranged)
    }

    /// Covariance over the untouched input modes and the receivers, with each
    /// receiver's phase rotated so its signal amplitude is real and positive.
    /// The rotation is local to each receiver.
    pub fn receiver_marginal(&self, input: &CovarianceMatrix) -> Result<CovarianceMatrix> {
        let full = self.simulate_full(input)?;
        let kept = input.n_modes() - 1;
        let mut aligned = full;
        for &r in &self.receiver_modes {
            let phi = -self.amplitude(r).arg();
            let rot = SymplecticTransform::phase_shift(phi, kept + r, aligned.n_modes())?;
            aligned = apply_symplectic(&rot, &aligned)?;
        }
        let keep: Vec<usize> = (0..kept).chain(self.receiver_modes.iter().map(|&r| kept + r)).collect();
        aligned.partial_trace(&keep)
    }
}

/// Haar-distributed random unitary (QR of a complex Ginibre matrix with the
/// phases of `R`'s diagonal removed).
pub fn haar_unitary<R: Rng + ?Sized>(l: usize, rng: &mut R) -> DMatrix<Complex64> {
    let ginibre = DMatrix::from_fn(l, l, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = ginibre.qr();
    let (mut q, r) = qr.unpack();
    for c in 0..l {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for row in 0..l {
            q[(row, c)] *= phase;
        }
    }
    q
}

/// A 2x2 element on modes `(mode_a, mode_b)` with matrix
/// `[[e^{iφ} cos θ, −sin θ], [e^{iφ} sin θ, cos θ]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitterElement {
    pub mode_a: usize,
    pub mode_b: usize,
    pub theta: f64,
    pub phi: f64,
}

impl BeamSplitterElement {
    /// Power transmittance `cos² θ`.
    pub fn transmittance(&self) -> f64 {
        self.theta.cos().powi(2)
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let (s, c) = self.theta.sin_cos();
        let e = Complex64::from_polar(1.0, self.phi);
        [[e * c, Complex64::new(-s, 0.0)], [e * s, Complex64::new(c, 0.0)]]
    }

    /// Left-multiplies `target` by this element embedded in the identity.
    fn apply_left(&self, target: &mut DMatrix<Complex64>) {
        let t = self.matrix();
        for col in 0..target.ncols() {
            let a = target[(self.mode_a, col)];
            let b = target[(self.mode_b, col)];
            target[(self.mode_a, col)] = t[0][0] * a + t[0][1] * b;
            target[(self.mode_b, col)] = t[1][0] * a + t[1][1] * b;
        }
    }

    /// Right-multiplies `target` by the adjoint of this element.
    fn apply_adjoint_right(&self, target: &mut DMatrix<Complex64>) {
        let t = self.matrix();
        for row in 0..target.nrows() {
            let a = target[(row, self.mode_a)];
            let b = target[(row, self.mode_b)];
            target[(row, self.mode_a)] = a * t[0][0].conj() + b * t[0][1].conj();
            target[(row, self.mode_b)] = a * t[1][0].conj() + b * t[1][1].conj();
        }
    }
}

/// `U = D T_K ⋯ T₁`: elements in the order light meets them, then a layer of
/// output phases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReckDecomposition {
    pub l: usize,
    pub elements: Vec<BeamSplitterElement>,
    pub output_phases: Vec<f64>,
}

impl ReckDecomposition {
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::<Complex64>::identity(self.l, self.l);
        for e in &self.elements {
            e.apply_left(&mut m);
        }
        for (r, &phase) in self.output_phases.iter().enumerate() {
            let d = Complex64::from_polar(1.0, phase);
            for c in 0..self.l {
                m[(r, c)] *= d;
            }
        }
        m
    }

    /// Frobenius distance between the reconstruction and `u`.
    pub fn residual(&self, u: &DMatrix<Complex64>) -> f64 {
        (self.reconstruct() - u).norm()
    }
}

/// Triangular decomposition into at most `l(l−1)/2` nearest-neighbour
/// elements. Entries below the diagonal are nulled row by row from the
/// bottom, each by an element acting on a pair of adjacent columns; the
/// leftover diagonal is the output phase layer.
pub fn reck_decompose(net: &LinearOpticalNetwork) -> Result<ReckDecomposition> {
    let u = net.unitary();
    let residual = unitarity_residual(u);
    if residual.is_nan() || residual > UNITARY_TOL {
        return Err(Error::NotUnitary(residual));
    }
    let l = u.nrows();
    let mut work = u.clone();
    let mut elements = Vec::new();
    let zero = 1e-15;
    for row in (1..l).rev() {
        for col in 0..row {
            let a = work[(row, col)];
            if a.norm() <= zero {
                continue;
            }
            let b = work[(row, col + 1)];
            let element = BeamSplitterElement {
                mode_a: col,
                mode_b: col + 1,
                theta: a.norm().atan2(b.norm()),
                phi: a.arg() - if b.norm() > 0.0 { b.arg() } else { 0.0 },
            };
            element.apply_adjoint_right(&mut work);
            work[(row, col)] = Complex64::new(0.0, 0.0);
            elements.push(element);
        }
    }
    let output_phases = (0..l).map(|k| work[(k, k)].arg()).collect();
    Ok(ReckDecomposition { l, elements, output_phases })
}

/// Power transmittances from the sender to each receiver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct BroadcastChannel {
    transmittances: Vec<f64>,
}

impl TryFrom<Vec<f64>> for BroadcastChannel {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        BroadcastChannel::new(v)
    }
}

impl From<BroadcastChannel> for Vec<f64> {
    fn from(ch: BroadcastChannel) -> Self {
        ch.transmittances
    }
}

impl BroadcastChannel {
    pub fn new(transmittances: Vec<f64>) -> Result<Self> {
        if transmittances.is_empty() {
            return Err(Error::InvalidChannel("at least one receiver is required".into()));
        }
        if let Some(bad) = transmittances.iter().find(|&&t| !t.is_finite() || t < 0.0) {
            return Err(Error::InvalidChannel(format!("transmittance {bad} is not a finite nonnegative number")));
        }
        let total: f64 = transmittances.iter().sum();
        if total > 1.0 + POWER_TOL {
            return Err(Error::InvalidChannel(format!("transmittances sum to {total} > 1")));
        }
        Ok(Self { transmittances })
    }

    /// Number of receivers `m`.
    pub fn m(&self) -> usize {
        self.transmittances.len()
    }

    pub fn transmittances(&self) -> &[f64] {
        &self.transmittances
    }

    pub fn eta(&self, receiver: usize) -> f64 {
        self.transmittances[receiver]
    }

    /// `η_B`, the total power reaching the receivers.
    pub fn total(&self) -> f64 {
        self.transmittances.iter().sum()
    }

    /// `η_E = 1 − η_B`.
    pub fn environment(&self) -> f64 {
        (1.0 - self.total()).max(0.0)
    }

    fn power(&self, label: OutputLabel) -> f64 {
        match label {
            OutputLabel::Receiver(i) => self.transmittances[i],
            OutputLabel::Environment => self.environment(),
        }
    }

    /// Receivers in order, then the environment.
    pub fn natural_ordering(&self) -> Vec<OutputLabel> {
        (0..self.m()).map(OutputLabel::Receiver).chain([OutputLabel::Environment]).collect()
    }
}

/// An output branch of the broadcast channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OutputLabel {
    /// Zero-based receiver index (`Receiver(0)` is `B1`).
    Receiver(usize),
    Environment,
}

impl fmt::Display for OutputLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutputLabel::Receiver(i) => write!(f, "B{}", i + 1),
            OutputLabel::Environment => write!(f, "E"),
        }
    }
}

impl std::str::FromStr for OutputLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "E" => Ok(OutputLabel::Environment),
            _ => s
                .strip_prefix('B')
                .and_then(|n| n.parse::<usize>().ok())
                .filter(|&n| n >= 1)
                .map(|n| OutputLabel::Receiver(n - 1))
                .ok_or_else(|| Error::Domain(format!("unknown output label {s:?}"))),
        }
    }
}

impl Serialize for OutputLabel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for OutputLabel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One splitter of the cascade: `output` taps `1 − transmittance` of the
/// power still on the line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CascadeStage {
    pub output: OutputLabel,
    pub transmittance: f64,
}

/// A line of beam splitters; whatever survives all stages exits at `terminal`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cascade {
    pub stages: Vec<CascadeStage>,
    pub terminal: OutputLabel,
}

impl Cascade {
    /// Power delivered to each output, in cascade order (terminal last).
    pub fn output_powers(&self) -> Vec<(OutputLabel, f64)> {
        let mut remaining = 1.0;
        let mut out = Vec::with_capacity(self.stages.len() + 1);
        for stage in &self.stages {
            out.push((stage.output, remaining * (1.0 - stage.transmittance)));
            remaining *= stage.transmittance;
        }
        out.push((self.terminal, remaining));
        out
    }

    pub fn ordering(&self) -> Vec<OutputLabel> {
        self.stages.iter().map(|s| s.output).chain([self.terminal]).collect()
    }
}

fn check_ordering(ch: &BroadcastChannel, ordering: &[OutputLabel]) -> Result<()> {
    let mut expected = ch.natural_ordering();
    let mut given = ordering.to_vec();
    expected.sort();
    given.sort();
    if expected != given {
        return Err(Error::InvalidChannel(format!(
            "ordering must list each of the {} receivers and E exactly once",
            ch.m()
        )));
    }
    Ok(())
}

fn build_cascade(ch: &BroadcastChannel, ordering: &[OutputLabel], strict: bool) -> Result<Cascade> {
    check_ordering(ch, ordering)?;
    let mut tapped = 0.0;
    let mut stages = Vec::with_capacity(ch.m());
    for (j, &label) in ordering[..ordering.len() - 1].iter().enumerate() {
        let before = 1.0 - tapped;
        tapped += ch.power(label);
        let after = 1.0 - tapped;
        let transmittance = if before > POWER_TOL {
            (after / before).clamp(0.0, 1.0)
        } else if strict {
            return Err(Error::ExhaustedPower { stage: j + 1 });
        } else {
            1.0
        };
        stages.push(CascadeStage { output: label, transmittance });
    }
    Ok(Cascade { stages, terminal: *ordering.last().expect("ordering is non-empty") })
}

/// Cascade visiting the outputs in `ordering`; stage `j` has transmittance
/// `(1 − Σ_{k≤j} η_k) / (1 − Σ_{k<j} η_k)`.
pub fn cascade_from_ordering(ch: &BroadcastChannel, ordering: &[OutputLabel]) -> Result<Cascade> {
    build_cascade(ch, ordering, true)
}

/// Result of reducing a network to its broadcast channel.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkReduction {
    pub channel: BroadcastChannel,
    pub cascade: Cascade,
    pub decomposition: ReckDecomposition,
    /// Indices into `decomposition.elements` of the splitters the signal
    /// actually passes through; the rest only mix vacua.
    pub retained: Vec<usize>,
    /// Signal amplitudes at every output, propagated through the retained
    /// elements only.
    pub pruned_amplitudes: Vec<Complex64>,
    pub reconstruction_residual: f64,
}

/// Decomposes the network, drops elements whose inputs are both vacuum and
/// returns the equivalent receiver channel and cascade.
pub fn prune_to_cascade(net: &LinearOpticalNetwork) -> Result<NetworkReduction> {
    let decomposition = reck_decompose(net)?;
    let l = net.l();
    let mut lit = vec![false; l];
    lit[net.input_mode()] = true;
    let mut amps = DMatrix::<Complex64>::zeros(l, 1);
    amps[(net.input_mode(), 0)] = Complex64::new(1.0, 0.0);
    let mut retained = Vec::new();
    for (idx, e) in decomposition.elements.iter().enumerate() {
        if !lit[e.mode_a] && !lit[e.mode_b] {
            continue;
        }
        lit[e.mode_a] = true;
        lit[e.mode_b] = true;
        e.apply_left(&mut amps);
        retained.push(idx);
    }
    let pruned_amplitudes: Vec<Complex64> = (0..l)
        .map(|k| amps[(k, 0)] * Complex64::from_polar(1.0, decomposition.output_phases[k]))
        .collect();

    let etas: Vec<f64> = net.receiver_modes().iter().map(|&r| net.amplitude(r).norm_sqr()).collect();
    let total: f64 = etas.iter().sum();
    let etas = if total > 1.0 { etas.iter().map(|e| e / total).collect() } else { etas };
    let channel = BroadcastChannel::new(etas)?;
    let cascade = build_cascade(&channel, &channel.natural_ordering(), false)?;
    let reconstruction_residual = decomposition.residual(net.unitary());
    Ok(NetworkReduction { channel, cascade, decomposition, retained, pruned_amplitudes, reconstruction_residual })
}

/// Sends the last mode of `input` (the sender's `A′`) through the channel
/// using the natural cascade order.
///
/// The result holds the remaining input modes, then `B₁ … B_m`, then `E`.
pub fn channel_apply(ch: &BroadcastChannel, input: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    channel_apply_ordered(ch, input, &ch.natural_ordering())
}

/// As [`channel_apply`], realising the channel with the cascade visiting
/// outputs in `ordering`. The returned mode order does not depend on it.
pub fn channel_apply_ordered(
    ch: &BroadcastChannel,
    input: &CovarianceMatrix,
    ordering: &[OutputLabel],
) -> Result<CovarianceMatrix> {
    let cascade = build_cascade(ch, ordering, false)?;
    apply_cascade(ch.m(), &cascade, input)
}

/// Runs `input`'s last mode through `cascade`. Each stage mixes the line
/// with a fresh vacuum so that the tapped amplitude is `+√(1 − η̃)`.
pub fn apply_cascade(m: usize, cascade: &Cascade, input: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    if cascade.stages.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: cascade.stages.len() });
    }
    let k = input.n_modes();
    let signal = k - 1;
    let total = k + m;
    let mut state = input.direct_sum(&CovarianceMatrix::vacuum(m));
    for (j, stage) in cascade.stages.iter().enumerate() {
        let bs = beam_splitter(stage.transmittance, k + j, signal, total)?;
        state = apply_symplectic(&bs, &state)?;
    }
    let position = |label: OutputLabel| match label {
        OutputLabel::Receiver(i) => signal + i,
        OutputLabel::Environment => signal + m,
    };
    let mut order = vec![0; total];
    for (a, slot) in order.iter_mut().take(signal).enumerate() {
        *slot = a;
    }
    for (j, stage) in cascade.stages.iter().enumerate() {
        order[position(stage.output)] = k + j;
    }
    order[position(cascade.terminal)] = signal;
    state.permute_modes(&order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{tmsv_covariance, TmsvParams};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    #[test]
    fn identity_has_no_elements() {
        let net = LinearOpticalNetwork::new(DMatrix::identity(3, 3), 0, vec![0]).unwrap();
        let dec = reck_decompose(&net).unwrap();
        assert!(dec.elements.is_empty());
        assert!(dec.output_phases.iter().all(|p| p.abs() < 1e-15));
        let red = prune_to_cascade(&net).unwrap();
        assert_eq!(red.channel.transmittances(), &[1.0]);
        assert_abs_diff_eq!(red.cascade.stages[0].transmittance, 0.0);
    }

    #[test]
    fn balanced_splitter_is_one_element() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let u = DMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(-h, 0.0), c(h, 0.0), c(h, 0.0)]);
        let net = LinearOpticalNetwork::new(u.clone(), 0, vec![1]).unwrap();
        let dec = reck_decompose(&net).unwrap();
        assert_eq!(dec.elements.len(), 1);
        assert_abs_diff_eq!(dec.elements[0].transmittance(), 0.5, epsilon = 1e-15);
        assert!(dec.residual(&u) < 1e-14);
    }

    #[test]
    fn haar_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for l in 1..=6 {
            let u = haar_unitary(l, &mut rng);
            assert!(unitarity_residual(&u) < 1e-12);
            let net = LinearOpticalNetwork::new(u.clone(), 0, vec![l - 1]).unwrap();
            let dec = reck_decompose(&net).unwrap();
            assert!(dec.elements.len() <= l * (l - 1) / 2);
            assert!(dec.residual(&u) < 1e-10, "l = {l}: {}", dec.residual(&u));
        }
    }

    #[test]
    fn non_unitary_rejected() {
        let u = DMatrix::from_element(2, 2, c(1.0, 0.0));
        assert!(matches!(LinearOpticalNetwork::new(u, 0, vec![1]), Err(Error::NotUnitary(_))));
        let id = DMatrix::<Complex64>::identity(3, 3);
        assert!(LinearOpticalNetwork::new(id.clone(), 3, vec![0]).is_err());
        assert!(LinearOpticalNetwork::new(id.clone(), 0, vec![1, 1]).is_err());
        assert!(LinearOpticalNetwork::new(id, 0, vec![]).is_err());
    }

    #[test]
    fn single_splitter_network() {
        let eta: f64 = 0.37;
        let (t, r) = (eta.sqrt(), (1.0 - eta).sqrt());
        let u = DMatrix::from_row_slice(2, 2, &[c(t, 0.0), c(-r, 0.0), c(r, 0.0), c(t, 0.0)]);
        let net = LinearOpticalNetwork::new(u, 0, vec![0]).unwrap();
        let red = prune_to_cascade(&net).unwrap();
        assert_abs_diff_eq!(red.channel.eta(0), eta, epsilon = 1e-15);
        assert_eq!(red.cascade.stages.len(), 1);
    }

    #[test]
    fn pruning_drops_vacuum_only_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = haar_unitary(5, &mut rng);
        // Sender on the last port: elements acting on the first ports before
        // light reaches them mix vacua only.
        let net = LinearOpticalNetwork::new(u.clone(), 4, vec![0, 2]).unwrap();
        let red = prune_to_cascade(&net).unwrap();
        assert!(red.retained.len() < red.decomposition.elements.len());
        for k in 0..5 {
            assert!((red.pruned_amplitudes[k] - u[(k, 4)]).norm() < 1e-12);
        }
        let env: f64 = red.channel.environment();
        assert_abs_diff_eq!(red.channel.total() + env, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn cascade_ordering_example() {
        let ch = BroadcastChannel::new(vec![0.2, 0.3]).unwrap();
        let order = [OutputLabel::Receiver(0), OutputLabel::Environment, OutputLabel::Receiver(1)];
        let cas = cascade_from_ordering(&ch, &order).unwrap();
        assert_abs_diff_eq!(cas.stages[0].transmittance, 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(cas.stages[1].transmittance, 0.375, epsilon = 1e-15);
        assert_eq!(cas.terminal, OutputLabel::Receiver(1));

        let single = BroadcastChannel::new(vec![0.4]).unwrap();
        let cas = cascade_from_ordering(&single, &single.natural_ordering()).unwrap();
        assert_eq!(cas.stages.len(), 1);
        assert_abs_diff_eq!(cas.stages[0].transmittance, 0.6, epsilon = 1e-15);
    }

    #[test]
    fn exhausted_power_is_an_error() {
        let ch = BroadcastChannel::new(vec![1.0, 0.0]).unwrap();
        let err = cascade_from_ordering(&ch, &ch.natural_ordering()).unwrap_err();
        assert_eq!(err, Error::ExhaustedPower { stage: 2 });
        let bad_order = [OutputLabel::Receiver(0), OutputLabel::Environment];
        assert!(cascade_from_ordering(&ch, &bad_order).is_err());
    }

    #[test]
    fn channel_validation() {
        assert!(BroadcastChannel::new(vec![]).is_err());
        assert!(BroadcastChannel::new(vec![-0.1]).is_err());
        assert!(BroadcastChannel::new(vec![0.6, 0.5]).is_err());
        assert!(BroadcastChannel::new(vec![0.5, 0.5]).is_ok());
        let json: BroadcastChannel = serde_json::from_str("[0.2, 0.3]").unwrap();
        assert_abs_diff_eq!(json.environment(), 0.5, epsilon = 1e-15);
        assert!(serde_json::from_str::<BroadcastChannel>("[0.9, 0.3]").is_err());
    }

    #[test]
    fn label_round_trip() {
        for label in [OutputLabel::Receiver(0), OutputLabel::Receiver(11), OutputLabel::Environment] {
            assert_eq!(label.to_string().parse::<OutputLabel>().unwrap(), label);
        }
        assert!("B0".parse::<OutputLabel>().is_err());
        assert!("C".parse::<OutputLabel>().is_err());
    }

    #[test]
    fn channel_apply_examples() {
        let tmsv = tmsv_covariance(TmsvParams::new(1.0).unwrap());
        let dark = BroadcastChannel::new(vec![0.0, 0.0]).unwrap();
        let out = channel_apply(&dark, &tmsv).unwrap();
        let ae = out.partial_trace(&[0, 3]).unwrap();
        assert!(max_abs_diff(ae.entries(), tmsv.entries()) < 1e-14);

        let ch = BroadcastChannel::new(vec![0.2, 0.3]).unwrap();
        let out = channel_apply(&ch, &tmsv).unwrap();
        assert_eq!(out.n_modes(), 4);
        assert_abs_diff_eq!(out.get(1, 1), 1.4, epsilon = 1e-14);
        assert_abs_diff_eq!(out.get(2, 2), 1.6, epsilon = 1e-14);
        assert_abs_diff_eq!(out.get(3, 3), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(out.von_neumann_entropy().unwrap(), 0.0, epsilon = 1e-9);

        assert!(channel_apply(&ch, &CovarianceMatrix::vacuum(1)).is_ok());
    }

    #[test]
    fn ordering_invariance_two_receivers() {
        let ch = BroadcastChannel::new(vec![0.25, 0.35]).unwrap();
        let tmsv = tmsv_covariance(TmsvParams::new(0.8).unwrap());
        let reference = channel_apply(&ch, &tmsv).unwrap();
        let labels = ch.natural_ordering();
        for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let ordering: Vec<_> = perm.iter().map(|&i| labels[i]).collect();
            let out = channel_apply_ordered(&ch, &tmsv, &ordering).unwrap();
            assert!(max_abs_diff(out.entries(), reference.entries()) < 1e-12, "{ordering:?}");
        }
    }
}
