//! Brute-force Fock-space oracle for the Gaussian entropy formulas.
//!
//! States are kept pure as sparse real amplitudes over occupation tuples;
//! every operation used here (TMSV preparation, real beam splitters) keeps
//! amplitudes real. Reduced states are block diagonal in a photon-number
//! charge, which keeps partial-trace spectra cheap enough for three or four
//! receivers.
//!
//! Truncation is never renormalized away: the discarded TMSV mass is carried
//! along as `tail` so callers can fold it into their tolerances.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Largest tail mass accepted by [`oracle_conditional_entropy`].
pub const DEFAULT_TAIL_LIMIT: f64 = 1e-10;

/// Occupation numbers, one per mode.
pub type Occupation = Vec<u16>;

/// Pure state on a truncated multimode Fock space.
#[derive(Debug, Clone)]
pub struct FockState {
    n_modes: usize,
    cutoff: usize,
    amplitudes: HashMap<Occupation, f64>,
    tail: f64,
    /// Integer weights `w` with `Σ w_k n_k = 0` on every basis state in the
    /// support, when known. They make reduced states block diagonal.
    charge: Option<Vec<i64>>,
}

/// Weight `λ_m = N^m / (N + 1)^{m+1}` of `|m⟩|m⟩` in the TMSV.
pub fn schmidt_weight(n_s: f64, m: usize) -> f64 {
    if n_s == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    (m as f64 * (n_s / (n_s + 1.0)).ln()).exp() / (n_s + 1.0)
}

/// Mass `Σ_{m>d} λ_m = (N/(N+1))^{d+1}` dropped by truncating at `d`.
pub fn tmsv_tail(n_s: f64, cutoff: usize) -> f64 {
    if n_s == 0.0 {
        return 0.0;
    }
    ((cutoff as f64 + 1.0) * (n_s / (n_s + 1.0)).ln()).exp()
}

/// Smallest cutoff whose tail mass does not exceed `limit`.
pub fn cutoff_for_tail(n_s: f64, limit: f64) -> Result<usize> {
    if !(n_s >= 0.0 && n_s.is_finite()) || !(limit > 0.0 && limit < 1.0) {
        return Err(Error::Domain(format!("cutoff_for_tail({n_s}, {limit})")));
    }
    if n_s == 0.0 {
        return Ok(0);
    }
    let d = (limit.ln() / (n_s / (n_s + 1.0)).ln() - 1.0).ceil().max(0.0) as usize;
    // Guard against the ceiling landing one short through rounding.
    Ok(if tmsv_tail(n_s, d) > limit { d + 1 } else { d })
}

/// Truncated TMSV `Σ_{m≤d} √λ_m |m⟩|m⟩`, not renormalized.
pub fn tmsv_fock(n_s: f64, cutoff: usize) -> Result<FockState> {
    if !(n_s >= 0.0 && n_s.is_finite()) {
        return Err(Error::Domain(format!("mean photon number must be finite and nonnegative, got {n_s}")));
    }
    if cutoff > u16::MAX as usize {
        return Err(Error::Domain(format!("cutoff {cutoff} too large")));
    }
    let amplitudes = (0..=cutoff)
        .map(|m| (vec![m as u16, m as u16], schmidt_weight(n_s, m).sqrt()))
        .filter(|(_, a)| *a != 0.0)
        .collect();
    Ok(FockState { n_modes: 2, cutoff, amplitudes, tail: tmsv_tail(n_s, cutoff), charge: Some(vec![1, -1]) })
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn binomial(n: usize, k: usize) -> f64 {
    (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp().round()
}

/// Spectrum entropy `−Σ λ log₂ λ` of possibly subnormalized weights.
fn spectrum_entropy(weights: &[f64]) -> f64 {
    weights.iter().filter(|&&w| w > 0.0).map(|&w| -w * w.log2()).sum()
}

impl FockState {
    /// State from explicit basis amplitudes. Every occupation must fit under
    /// `cutoff`.
    pub fn from_amplitudes(n_modes: usize, cutoff: usize, amplitudes: Vec<(Occupation, f64)>) -> Result<Self> {
        let mut map = HashMap::new();
        for (occ, a) in amplitudes {
            if occ.len() != n_modes {
                return Err(Error::DimensionMismatch { expected: n_modes, got: occ.len() });
            }
            if occ.iter().any(|&k| k as usize > cutoff) {
                return Err(Error::Truncation { tail: f64::NAN, limit: cutoff as f64 });
            }
            *map.entry(occ).or_insert(0.0) += a;
        }
        Ok(Self { n_modes, cutoff, amplitudes: map, tail: 0.0, charge: None })
    }

    /// Product of a number state per mode.
    pub fn number_state(occupation: &[u16], cutoff: usize) -> Result<Self> {
        Self::from_amplitudes(occupation.len(), cutoff, vec![(occupation.to_vec(), 1.0)])
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Probability mass dropped by truncation.
    pub fn tail(&self) -> f64 {
        self.tail
    }

    /// Squared norm, `1 − tail` up to rounding.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a * a).sum()
    }

    pub fn amplitude(&self, occupation: &[u16]) -> f64 {
        self.amplitudes.get(occupation).copied().unwrap_or(0.0)
    }

    pub fn support_size(&self) -> usize {
        self.amplitudes.len()
    }

    /// Appends `count` vacuum modes.
    pub fn with_vacuum_modes(&self, count: usize) -> Self {
        let amplitudes = self
            .amplitudes
            .iter()
            .map(|(occ, &a)| {
                let mut occ = occ.clone();
                occ.resize(occ.len() + count, 0);
                (occ, a)
            })
            .collect();
        // Vacuum modes join the side that will exchange photons with them.
        let charge = self.charge.as_ref().map(|w| {
            let mut w = w.clone();
            w.resize(w.len() + count, -1);
            w
        });
        Self { n_modes: self.n_modes + count, cutoff: self.cutoff, amplitudes, tail: self.tail, charge }
    }

    /// Reorders modes so that new mode `k` is old mode `order[k]`.
    pub fn permute_modes(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n_modes];
        if order.len() != self.n_modes || order.iter().any(|&k| k >= self.n_modes || std::mem::replace(&mut seen[k], true)) {
            return Err(Error::InvalidModes(format!("{order:?} is not a permutation of {} modes", self.n_modes)));
        }
        let amplitudes =
            self.amplitudes.iter().map(|(occ, &a)| (order.iter().map(|&k| occ[k]).collect(), a)).collect();
        let charge = self.charge.as_ref().map(|w| order.iter().map(|&k| w[k]).collect());
        Ok(Self { amplitudes, charge, ..self.clone() })
    }

    /// Mean photon number of one mode.
    pub fn mean_photons(&self, mode: usize) -> f64 {
        self.amplitudes.iter().map(|(occ, a)| a * a * occ[mode] as f64).sum()
    }

    /// Mean total photon number.
    pub fn total_photons(&self) -> f64 {
        (0..self.n_modes).map(|k| self.mean_photons(k)).sum()
    }

    /// Photon-number distribution of one mode.
    pub fn photon_distribution(&self, mode: usize) -> Vec<f64> {
        let mut dist = vec![0.0; self.cutoff + 1];
        for (occ, a) in &self.amplitudes {
            dist[occ[mode] as usize] += a * a;
        }
        dist
    }

    /// Beam splitter of power transmittance `eta` acting as
    /// `a_i† ↦ √η a_i† + √(1−η) a_j†`, `a_j† ↦ −√(1−η) a_i† + √η a_j†`.
    /// Photon number is conserved, so the cutoff holds automatically when
    /// the total photon number of every basis state is within it.
    pub fn beam_splitter(&self, eta: f64, i: usize, j: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::Domain(format!("beam splitter transmittance {eta} outside [0, 1]")));
        }
        if i == j || i >= self.n_modes || j >= self.n_modes {
            return Err(Error::InvalidModes(format!("beam splitter on modes ({i}, {j}) of {}", self.n_modes)));
        }
        let (c, s) = (eta.sqrt(), (1.0 - eta).sqrt());
        let mut out: HashMap<Occupation, f64> = HashMap::with_capacity(self.amplitudes.len());
        for (occ, &amp) in &self.amplitudes {
            let (na, nb) = (occ[i] as usize, occ[j] as usize);
            let n = na + nb;
            if n > self.cutoff {
                return Err(Error::Truncation { tail: self.tail, limit: self.cutoff as f64 });
            }
            let norm = -0.5 * (ln_factorial(na) + ln_factorial(nb));
            // (c a† + s b†)^na (−s a† + c b†)^nb collected by the power of a†.
            let mut coeff = vec![0.0; n + 1];
            for p in 0..=na {
                let cp = binomial(na, p) * c.powi(p as i32) * s.powi((na - p) as i32);
                for q in 0..=nb {
                    let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
                    let cq = sign * binomial(nb, q) * s.powi(q as i32) * c.powi((nb - q) as i32);
                    coeff[p + q] += cp * cq;
                }
            }
            for (k, w) in coeff.into_iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let scale = (norm + 0.5 * (ln_factorial(k) + ln_factorial(n - k))).exp();
                let mut target = occ.clone();
                target[i] = k as u16;
                target[j] = (n - k) as u16;
                *out.entry(target).or_insert(0.0) += amp * w * scale;
            }
        }
        out.retain(|_, a| a.abs() > 1e-300);
        let charge = self.charge.clone().filter(|w| w[i] == w[j]);
        Ok(Self { amplitudes: out, charge, ..self.clone() })
    }

    /// Groups the amplitude matrix `ψ[s, s̄]` of the bipartition `keep | rest`
    /// into blocks of equal charge and returns, per block, the kept-side
    /// index map, the complement-side index map and the nonzero entries.
    fn charge_blocks(&self, keep: &[usize]) -> Result<Vec<ChargeBlock>> {
        let mut in_keep = vec![false; self.n_modes];
        for &k in keep {
            if k >= self.n_modes || std::mem::replace(&mut in_keep[k], true) {
                return Err(Error::InvalidModes(format!("{keep:?} for {} modes", self.n_modes)));
            }
        }
        let mut blocks: BTreeMap<i64, ChargeBlock> = BTreeMap::new();
        for (occ, &a) in &self.amplitudes {
            let mut kept = Vec::with_capacity(keep.len());
            let mut rest = Vec::with_capacity(self.n_modes - keep.len());
            for (mode, &n) in occ.iter().enumerate() {
                if in_keep[mode] {
                    kept.push(n);
                } else {
                    rest.push(n);
                }
            }
            // The kept-side charge equals minus the complement-side charge on
            // the support, so distinct charges never share a row or column.
            let charge = match &self.charge {
                Some(w) => keep.iter().map(|&k| w[k] * occ[k] as i64).sum(),
                None => 0,
            };
            let block = blocks.entry(charge).or_default();
            let r = block.intern_row(kept);
            let c = block.intern_col(rest);
            block.entries.push((r, c, a));
        }
        Ok(blocks.into_values().collect())
    }

    /// Eigenvalues of the reduced density matrix on `keep`, including zeros
    /// only where a block is rank deficient.
    pub fn reduced_spectrum(&self, keep: &[usize]) -> Result<Vec<f64>> {
        if keep.is_empty() || keep.len() == self.n_modes {
            return Ok(vec![self.norm_sqr()]);
        }
        let mut spectrum = Vec::new();
        for block in self.charge_blocks(keep)? {
            spectrum.extend(block.gram_eigenvalues());
        }
        Ok(spectrum)
    }

    /// Von Neumann entropy (bits) of the reduced state on `keep`, computed
    /// from the unnormalized spectrum.
    pub fn entropy(&self, keep: &[usize]) -> Result<f64> {
        Ok(spectrum_entropy(&self.reduced_spectrum(keep)?))
    }

    /// Explicit reduced density matrix on `keep`, one dense block per
    /// charge sector, with rows labelled by the kept occupations.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<BlockDensityMatrix> {
        let blocks = self
            .charge_blocks(keep)?
            .into_iter()
            .map(|b| {
                let m = b.dense();
                (b.rows_in_order(), &m * m.transpose())
            })
            .collect();
        Ok(BlockDensityMatrix { blocks })
    }
}

#[derive(Debug, Default)]
struct ChargeBlock {
    rows: HashMap<Occupation, usize>,
    cols: HashMap<Occupation, usize>,
    entries: Vec<(usize, usize, f64)>,
}

impl ChargeBlock {
    fn intern_row(&mut self, occ: Occupation) -> usize {
        let n = self.rows.len();
        *self.rows.entry(occ).or_insert(n)
    }

    fn intern_col(&mut self, occ: Occupation) -> usize {
        let n = self.cols.len();
        *self.cols.entry(occ).or_insert(n)
    }

    fn dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows.len(), self.cols.len());
        for &(r, c, a) in &self.entries {
            m[(r, c)] += a;
        }
        m
    }

    fn rows_in_order(&self) -> Vec<Occupation> {
        let mut rows = vec![Vec::new(); self.rows.len()];
        for (occ, &k) in &self.rows {
            rows[k] = occ.clone();
        }
        rows
    }

    /// Nonzero squared singular values, from the Gram matrix on the smaller
    /// side.
    fn gram_eigenvalues(&self) -> Vec<f64> {
        let m = self.dense();
        let gram = if m.nrows() <= m.ncols() { &m * m.transpose() } else { m.transpose() * &m };
        if gram.nrows() == 1 {
            return vec![gram[(0, 0)]];
        }
        SymmetricEigen::new(gram).eigenvalues.iter().map(|&x| x.max(0.0)).collect()
    }
}

/// Reduced density matrix stored as charge-sector blocks.
#[derive(Debug, Clone)]
pub struct BlockDensityMatrix {
    pub blocks: Vec<(Vec<Occupation>, DMatrix<f64>)>,
}

impl BlockDensityMatrix {
    pub fn trace(&self) -> f64 {
        self.blocks.iter().map(|(_, b)| b.trace()).sum()
    }

    /// Largest `|ρ − ρᵀ|` entry.
    pub fn asymmetry(&self) -> f64 {
        self.blocks.iter().map(|(_, b)| (b - b.transpose()).amax()).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .map(|(_, b)| SymmetricEigen::new(b.clone()).eigenvalues.min())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn entropy(&self) -> f64 {
        let eig: Vec<f64> = self
            .blocks
            .iter()
            .flat_map(|(_, b)| SymmetricEigen::new(b.clone()).eigenvalues.iter().copied().collect::<Vec<_>>())
            .collect();
        spectrum_entropy(&eig)
    }
}

/// Output of the broadcast channel on half of a TMSV, modes ordered
/// `(A, B1, …, Bm, E)`.
pub fn broadcast_fock(eta: &[f64], n_s: f64, cutoff: usize) -> Result<FockState> {
    if eta.iter().any(|&e| !(0.0..=1.0).contains(&e)) || eta.iter().sum::<f64>() > 1.0 + 1e-12 {
        return Err(Error::InvalidChannel(format!("transmittances {eta:?}")));
    }
    let m = eta.len();
    // Mode 1 carries the signal and is what remains for the environment.
    let mut state = tmsv_fock(n_s, cutoff)?.with_vacuum_modes(m);
    let mut remaining = 1.0;
    for (k, &e) in eta.iter().enumerate() {
        let tapped = if remaining > 1e-15 { (e / remaining).min(1.0) } else { 0.0 };
        // Receiver k picks up the fraction `tapped` of the remaining signal.
        state = state.beam_splitter(1.0 - tapped, 2 + k, 1)?;
        remaining -= e;
    }
    let mut order = vec![0];
    order.extend(2..2 + m);
    order.push(1);
    state.permute_modes(&order)
}

/// Coherent information `−H(T | A T̄) = H(A T̄) − H(A B1…Bm)` evaluated on a
/// truncated Fock state, with `subset` listing the receivers in `T`
/// (0-based).
pub fn oracle_conditional_entropy(eta: &[f64], n_s: f64, subset: &[usize], cutoff: usize) -> Result<f64> {
    oracle_conditional_entropy_with_limit(eta, n_s, subset, cutoff, DEFAULT_TAIL_LIMIT)
}

/// As [`oracle_conditional_entropy`] with an explicit tail-mass limit.
pub fn oracle_conditional_entropy_with_limit(
    eta: &[f64],
    n_s: f64,
    subset: &[usize],
    cutoff: usize,
    tail_limit: f64,
) -> Result<f64> {
    let m = eta.len();
    if subset.iter().any(|&k| k >= m) {
        return Err(Error::InvalidModes(format!("subset {subset:?} for {m} receivers")));
    }
    let tail = tmsv_tail(n_s, cutoff);
    if tail > tail_limit {
        return Err(Error::Truncation { tail, limit: tail_limit });
    }
    let state = broadcast_fock(eta, n_s, cutoff)?;
    let complement: Vec<usize> = std::iter::once(0).chain((0..m).filter(|k| !subset.contains(k)).map(|k| k + 1)).collect();
    let all: Vec<usize> = (0..=m).collect();
    Ok(state.entropy(&complement)? - state.entropy(&all)?)
}
