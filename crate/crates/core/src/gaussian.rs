//! Covariance-matrix calculus for zero-mean Gaussian states.
//!
//! Conventions used throughout the crate:
//!
//! - quadratures are ordered `xxpp`: all position quadratures first, then all
//!   momentum quadratures, so mode `k` of an `n`-mode state owns rows `k` and
//!   `n + k`;
//! - the vacuum has variance 1 in every quadrature, hence a thermal mode with
//!   mean photon number `N` has covariance `(2N + 1) I₂`;
//! - entropies are in bits.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the symmetry of a covariance matrix, relative to its largest entry.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Symplectic eigenvalues in `[1 - PHYSICAL_TOL, 1)` are treated as 1.
pub const PHYSICAL_TOL: f64 = 1e-6;
/// Tolerance on `S Ω Sᵀ = Ω`.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// `g(x) = (x + 1) log₂(x + 1) − x log₂ x`, the entropy in bits of a thermal
/// mode with mean photon number `x`.
pub fn g_function(x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!("g(x) requires finite x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    // log₂(x + 1) + x log₂(1 + 1/x), which avoids cancellation for large x.
    Ok((x.ln_1p() + x * (1.0 / x).ln_1p()) / std::f64::consts::LN_2)
}

/// Which quadrature a homodyne detector measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrature {
    X,
    P,
}

/// Standard symplectic form for `n` modes in `xxpp` ordering.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(k, n_modes + k)] = 1.0;
        omega[(n_modes + k, k)] = -1.0;
    }
    omega
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Second moments of a zero-mean Gaussian state of `n_modes` bosonic modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CovarianceJson", into = "CovarianceJson")]
pub struct CovarianceMatrix {
    n_modes: usize,
    entries: DMatrix<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CovarianceJson {
    n_modes: usize,
    ordering: String,
    entries: Vec<Vec<f64>>,
}

impl From<CovarianceMatrix> for CovarianceJson {
    fn from(gamma: CovarianceMatrix) -> Self {
        let dim = gamma.dim();
        let entries = (0..dim)
            .map(|r| (0..dim).map(|c| gamma.entries[(r, c)]).collect())
            .collect();
        CovarianceJson { n_modes: gamma.n_modes, ordering: "xxpp".into(), entries }
    }
}

impl TryFrom<CovarianceJson> for CovarianceMatrix {
    type Error = Error;

    fn try_from(json: CovarianceJson) -> Result<Self> {
        if json.ordering != "xxpp" {
            return Err(Error::Domain(format!("unsupported ordering {:?}", json.ordering)));
        }
        let dim = 2 * json.n_modes;
        if json.entries.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: json.entries.len() });
        }
        let mut m = DMatrix::zeros(dim, dim);
        for (r, row) in json.entries.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
            }
            for (c, v) in row.iter().enumerate() {
                m[(r, c)] = *v;
            }
        }
        CovarianceMatrix::new(m)
    }
}

impl CovarianceMatrix {
    /// Validates symmetry and physicality (`γ + iΩ ⪰ 0`).
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || !entries.nrows().is_multiple_of(2) || entries.nrows() == 0 {
            return Err(Error::Domain(format!(
                "covariance must be a non-empty 2n x 2n matrix, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let asym = max_abs(&(&entries - entries.transpose()));
        if asym > SYMMETRY_TOL * max_abs(&entries).max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
        let gamma = Self { n_modes: entries.nrows() / 2, entries: symmetrize(&entries) };
        gamma.symplectic_eigenvalues()?;
        Ok(gamma)
    }

    /// Wraps the result of an operation that is physical by construction.
    pub(crate) fn from_trusted(entries: DMatrix<f64>) -> Self {
        debug_assert!(entries.nrows().is_multiple_of(2) && entries.is_square());
        Self { n_modes: entries.nrows() / 2, entries: symmetrize(&entries) }
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self::from_trusted(DMatrix::identity(2 * n_modes, 2 * n_modes))
    }

    /// Single thermal mode with the given mean photon number.
    pub fn thermal(mean_photons: f64) -> Result<Self> {
        if !mean_photons.is_finite() || mean_photons < 0.0 {
            return Err(Error::Domain(format!("mean photon number must be >= 0, got {mean_photons}")));
        }
        Ok(Self::from_trusted(DMatrix::identity(2, 2) * (2.0 * mean_photons + 1.0)))
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        2 * self.n_modes
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Row of the `x` quadrature of `mode`.
    pub fn x_index(&self, mode: usize) -> usize {
        mode
    }

    /// Row of the `p` quadrature of `mode`.
    pub fn p_index(&self, mode: usize) -> usize {
        self.n_modes + mode
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[(row, col)]
    }

    /// Same matrix reordered as `x₁ p₁ x₂ p₂ …`, for display.
    pub fn to_xpxp(&self) -> DMatrix<f64> {
        let n = self.n_modes;
        let perm: Vec<usize> = (0..n).flat_map(|k| [k, n + k]).collect();
        DMatrix::from_fn(2 * n, 2 * n, |r, c| self.entries[(perm[r], perm[c])])
    }

    /// Tensor product `self ⊕ other`; modes of `other` are appended.
    pub fn direct_sum(&self, other: &CovarianceMatrix) -> CovarianceMatrix {
        let (n1, n2) = (self.n_modes, other.n_modes);
        let n = n1 + n2;
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        let place = |k: usize, src_n: usize, offset: usize| {
            if k < src_n {
                offset + k
            } else {
                n + offset + (k - src_n)
            }
        };
        for r in 0..2 * n1 {
            for c in 0..2 * n1 {
                m[(place(r, n1, 0), place(c, n1, 0))] = self.entries[(r, c)];
            }
        }
        for r in 0..2 * n2 {
            for c in 0..2 * n2 {
                m[(place(r, n2, n1), place(c, n2, n1))] = other.entries[(r, c)];
            }
        }
        Self::from_trusted(m)
    }

    fn check_modes(&self, modes: &[usize]) -> Result<()> {
        if modes.is_empty() {
            return Err(Error::InvalidModes("empty mode set".into()));
        }
        for (i, &k) in modes.iter().enumerate() {
            if k >= self.n_modes {
                return Err(Error::InvalidModes(format!(
                    "mode {k} out of range for {} modes",
                    self.n_modes
                )));
            }
            if modes[..i].contains(&k) {
                return Err(Error::InvalidModes(format!("mode {k} listed twice")));
            }
        }
        Ok(())
    }

    fn quadrature_rows(&self, modes: &[usize]) -> Vec<usize> {
        modes
            .iter()
            .copied()
            .chain(modes.iter().map(|&k| self.n_modes + k))
            .collect()
    }

    /// Reduced state on `keep`, in the order given.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<CovarianceMatrix> {
        self.check_modes(keep)?;
        let rows = self.quadrature_rows(keep);
        Ok(Self::from_trusted(self.entries.select_rows(&rows).select_columns(&rows)))
    }

    /// Reorders modes: mode `k` of the result is mode `order[k]` of `self`.
    pub fn permute_modes(&self, order: &[usize]) -> Result<CovarianceMatrix> {
        if order.len() != self.n_modes {
            return Err(Error::DimensionMismatch { expected: self.n_modes, got: order.len() });
        }
        self.partial_trace(order)
    }

    /// Sorted symplectic eigenvalues, one per mode.
    ///
    /// Computed from the spectrum of `R Ω R` with `R = γ^{1/2}`: that matrix
    /// is real antisymmetric and `i R Ω R` is isospectral to `iΩγ`, so its
    /// singular values are the symplectic eigenvalues, each appearing twice.
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.n_modes;
        let eig = SymmetricEigen::new(self.entries.clone());
        let min_eig = eig.eigenvalues.min();
        if min_eig.is_nan() || min_eig <= 0.0 {
            return Err(Error::Unphysical(0.0));
        }
        let sqrt_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
        let root = &eig.eigenvectors * sqrt_diag * eig.eigenvectors.transpose();
        let m = &root * symplectic_form(n) * &root;
        let gram = symmetrize(&(m.transpose() * &m));
        let mut squares: Vec<f64> = SymmetricEigen::new(gram).eigenvalues.iter().copied().collect();
        squares.sort_by(f64::total_cmp);
        let mut nu: Vec<f64> = squares
            .chunks(2)
            .map(|pair| (0.5 * (pair[0] + pair[1])).max(0.0).sqrt())
            .collect();
        let smallest = nu[0];
        if smallest < 1.0 - PHYSICAL_TOL {
            return Err(Error::Unphysical(smallest));
        }
        for v in nu.iter_mut() {
            *v = v.max(1.0);
        }
        Ok(nu)
    }

    /// Von Neumann entropy in bits, `Σₖ g((νₖ − 1)/2)`.
    pub fn von_neumann_entropy(&self) -> Result<f64> {
        self.symplectic_eigenvalues()?
            .into_iter()
            .map(|nu| g_function((nu - 1.0) / 2.0))
            .sum()
    }

    /// Conditional state of the other modes after an ideal homodyne
    /// measurement of `quadrature` on `mode`.
    ///
    /// This is the infinite-squeezing limit of `A − C (B + γ_M)⁻¹ Cᵀ`: the
    /// inverse collapses to the Moore–Penrose inverse of the measured
    /// quadrature's 1x1 block, and the orthogonal quadrature drops out. The
    /// result does not depend on the measurement outcome.
    pub fn homodyne_condition(&self, mode: usize, quadrature: Quadrature) -> Result<CovarianceMatrix> {
        self.check_modes(&[mode])?;
        if self.n_modes < 2 {
            return Err(Error::InvalidModes("conditioning needs at least two modes".into()));
        }
        let measured = match quadrature {
            Quadrature::X => self.x_index(mode),
            Quadrature::P => self.p_index(mode),
        };
        let variance = self.entries[(measured, measured)];
        if variance.is_nan() || variance <= 0.0 {
            return Err(Error::Domain(format!("measured variance must be positive, got {variance}")));
        }
        let rest: Vec<usize> = (0..self.n_modes).filter(|&k| k != mode).collect();
        let rows = self.quadrature_rows(&rest);
        let a = self.entries.select_rows(&rows).select_columns(&rows);
        let c = DMatrix::from_fn(rows.len(), 1, |r, _| self.entries[(rows[r], measured)]);
        let schur = a - (&c * c.transpose()) / variance;
        Ok(Self::from_trusted(schur))
    }

    /// Pure loss of transmittance `eta` on one mode (vacuum ancilla traced out).
    pub fn pure_loss(&self, mode: usize, eta: f64) -> Result<CovarianceMatrix> {
        self.check_modes(&[mode])?;
        let n = self.n_modes;
        let extended = self.direct_sum(&CovarianceMatrix::vacuum(1));
        let bs = beam_splitter(eta, mode, n, n + 1)?;
        let mixed = apply_symplectic(&bs, &extended)?;
        mixed.partial_trace(&(0..n).collect::<Vec<_>>())
    }

    /// Heterodyne detection modelled as 50% pure loss ahead of a homodyne
    /// detector; this applies the loss part.
    pub fn heterodyne_as_loss(&self, mode: usize) -> Result<CovarianceMatrix> {
        self.pure_loss(mode, 0.5)
    }

    /// Joint distribution of ideal homodyne outcomes of `quadrature` on
    /// `modes`, labelled by `labels`.
    pub fn quadrature_block(
        &self,
        quadrature: Quadrature,
        modes: &[usize],
        labels: &[&str],
    ) -> Result<ClassicalGaussian> {
        self.check_modes(modes)?;
        let rows: Vec<usize> = modes
            .iter()
            .map(|&k| match quadrature {
                Quadrature::X => self.x_index(k),
                Quadrature::P => self.p_index(k),
            })
            .collect();
        let block = self.entries.select_rows(&rows).select_columns(&rows);
        ClassicalGaussian::new(labels.iter().map(|s| s.to_string()).collect(), block)
    }
}

/// Mean photon number of one arm of a two-mode squeezed vacuum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TmsvParams {
    mean_photons: f64,
}

impl TmsvParams {
    pub fn new(mean_photons: f64) -> Result<Self> {
        if !mean_photons.is_finite() || mean_photons < 0.0 {
            return Err(Error::Domain(format!("N_S must be finite and >= 0, got {mean_photons}")));
        }
        Ok(Self { mean_photons })
    }

    pub fn mean_photons(&self) -> f64 {
        self.mean_photons
    }
}

/// Two-mode squeezed vacuum: diagonal blocks `v I₂`, `x`-`x` correlation
/// `+√(v²−1)` and `p`-`p` correlation `−√(v²−1)` with `v = 2N_S + 1`.
pub fn tmsv_covariance(params: TmsvParams) -> CovarianceMatrix {
    let v = 2.0 * params.mean_photons + 1.0;
    // √(v²−1) = 2√(N(N+1)), exact at N = 0.
    let n = params.mean_photons;
    let c = 2.0 * (n * (n + 1.0)).sqrt();
    let mut m = DMatrix::identity(4, 4) * v;
    m[(0, 1)] = c;
    m[(1, 0)] = c;
    m[(2, 3)] = -c;
    m[(3, 2)] = -c;
    CovarianceMatrix::from_trusted(m)
}

/// Real symplectic matrix acting on `n_modes` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    n_modes: usize,
    matrix: DMatrix<f64>,
}

impl SymplecticTransform {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || !matrix.nrows().is_multiple_of(2) || matrix.nrows() == 0 {
            return Err(Error::Domain("symplectic matrix must be 2n x 2n".into()));
        }
        let n = matrix.nrows() / 2;
        let omega = symplectic_form(n);
        let residual = max_abs(&(&matrix * &omega * matrix.transpose() - &omega));
        if residual > SYMPLECTIC_TOL {
            return Err(Error::NotSymplectic(residual));
        }
        Ok(Self { n_modes: n, matrix })
    }

    pub fn identity(n_modes: usize) -> Self {
        Self { n_modes, matrix: DMatrix::identity(2 * n_modes, 2 * n_modes) }
    }

    /// Symplectic image of a passive linear-optical unitary acting on the
    /// annihilation operators as `a ↦ U a`.
    pub fn from_passive_unitary(u: &DMatrix<num_complex::Complex64>) -> Result<Self> {
        if !u.is_square() || u.nrows() == 0 {
            return Err(Error::Domain("unitary must be square and non-empty".into()));
        }
        let n = u.nrows();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                let z = u[(r, c)];
                m[(r, c)] = z.re;
                m[(r, n + c)] = -z.im;
                m[(n + r, c)] = z.im;
                m[(n + r, n + c)] = z.re;
            }
        }
        Self::new(m)
    }

    /// Phase rotation `a ↦ e^{iφ} a` on one mode.
    pub fn phase_shift(phi: f64, mode: usize, n_modes: usize) -> Result<Self> {
        if mode >= n_modes {
            return Err(Error::InvalidModes(format!("mode {mode} out of range for {n_modes} modes")));
        }
        let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
        let (x, p) = (mode, n_modes + mode);
        let (s, c) = phi.sin_cos();
        m[(x, x)] = c;
        m[(x, p)] = -s;
        m[(p, x)] = s;
        m[(p, p)] = c;
        Ok(Self { n_modes, matrix: m })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `self` applied after `first`.
    pub fn compose(&self, first: &SymplecticTransform) -> Result<Self> {
        if self.n_modes != first.n_modes {
            return Err(Error::DimensionMismatch { expected: self.n_modes, got: first.n_modes });
        }
        Ok(Self { n_modes: self.n_modes, matrix: &self.matrix * &first.matrix })
    }
}

/// Beam splitter of transmittance `eta` between modes `i` and `j`:
/// `x_i ↦ √η x_i + √(1−η) x_j`, `x_j ↦ −√(1−η) x_i + √η x_j`, and likewise
/// for the momenta.
pub fn beam_splitter(eta: f64, i: usize, j: usize, n_modes: usize) -> Result<SymplecticTransform> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Domain(format!("transmittance must lie in [0, 1], got {eta}")));
    }
    if i == j {
        return Err(Error::InvalidModes(format!("beam splitter needs two distinct modes, got {i} twice")));
    }
    if i >= n_modes || j >= n_modes {
        return Err(Error::InvalidModes(format!("modes ({i}, {j}) out of range for {n_modes} modes")));
    }
    let t = eta.sqrt();
    let r = (1.0 - eta).sqrt();
    let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
    for offset in [0, n_modes] {
        let (a, b) = (offset + i, offset + j);
        m[(a, a)] = t;
        m[(a, b)] = r;
        m[(b, a)] = -r;
        m[(b, b)] = t;
    }
    Ok(SymplecticTransform { n_modes, matrix: m })
}

/// `S γ Sᵀ`.
pub fn apply_symplectic(s: &SymplecticTransform, gamma: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    if s.n_modes != gamma.n_modes {
        return Err(Error::DimensionMismatch { expected: gamma.n_modes, got: s.n_modes });
    }
    Ok(CovarianceMatrix::from_trusted(&s.matrix * &gamma.entries * s.matrix.transpose()))
}

/// Normalisation constant inside the differential entropy
/// `½ log₂(cⁿ det Σ)`. Mutual informations do not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EntropyConvention {
    /// `c = πe`, natural for quadratures with unit vacuum variance.
    #[default]
    PiE,
    /// `c = 2πe`, the textbook Gaussian entropy.
    TwoPiE,
}

impl EntropyConvention {
    fn constant(self) -> f64 {
        let pe = std::f64::consts::PI * std::f64::consts::E;
        match self {
            EntropyConvention::PiE => pe,
            EntropyConvention::TwoPiE => 2.0 * pe,
        }
    }
}

/// Zero-mean jointly Gaussian classical variables (e.g. homodyne outcomes).
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalGaussian {
    labels: Vec<String>,
    covariance: DMatrix<f64>,
}

impl ClassicalGaussian {
    pub fn new(labels: Vec<String>, covariance: DMatrix<f64>) -> Result<Self> {
        if !covariance.is_square() || covariance.nrows() == 0 {
            return Err(Error::Domain("covariance must be square and non-empty".into()));
        }
        if labels.len() != covariance.nrows() {
            return Err(Error::DimensionMismatch { expected: covariance.nrows(), got: labels.len() });
        }
        let scale = max_abs(&covariance).max(1.0);
        let asym = max_abs(&(&covariance - covariance.transpose()));
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric(asym));
        }
        let covariance = symmetrize(&covariance);
        let min_eig = SymmetricEigen::new(covariance.clone()).eigenvalues.min();
        if min_eig < -1e-10 * scale {
            return Err(Error::Domain(format!("covariance is not positive semidefinite (eigenvalue {min_eig})")));
        }
        Ok(Self { labels, covariance })
    }

    pub fn n_vars(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    fn indices(&self, names: &[&str]) -> Result<Vec<usize>> {
        names
            .iter()
            .map(|name| {
                self.labels
                    .iter()
                    .position(|l| l == name)
                    .ok_or_else(|| Error::InvalidModes(format!("unknown variable {name:?}")))
            })
            .collect()
    }

    fn log2_det(&self, idx: &[usize]) -> Result<f64> {
        let sub = self.covariance.select_rows(idx).select_columns(idx);
        let chol = Cholesky::new(sub.clone()).ok_or_else(|| Error::Singular(sub.determinant()))?;
        let log_det: f64 = chol.l_dirty().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
        if !log_det.is_finite() {
            return Err(Error::Singular(sub.determinant()));
        }
        Ok(log_det / std::f64::consts::LN_2)
    }

    /// Joint differential entropy of the named variables in bits, πe convention.
    pub fn entropy(&self, names: &[&str]) -> Result<f64> {
        self.entropy_with(names, EntropyConvention::PiE)
    }

    pub fn entropy_with(&self, names: &[&str], convention: EntropyConvention) -> Result<f64> {
        let idx = self.indices(names)?;
        if idx.is_empty() {
            return Ok(0.0);
        }
        let n = idx.len() as f64;
        Ok(0.5 * (n * convention.constant().log2() + self.log2_det(&idx)?))
    }

    /// Joint differential entropy of all variables.
    pub fn differential_entropy(&self) -> Result<f64> {
        let all: Vec<&str> = self.labels.iter().map(String::as_str).collect();
        self.entropy(&all)
    }

    /// `I(a; b)` in bits.
    pub fn mutual_information(&self, a: &[&str], b: &[&str]) -> Result<f64> {
        self.mutual_information_with(a, b, EntropyConvention::PiE)
    }

    pub fn mutual_information_with(&self, a: &[&str], b: &[&str], convention: EntropyConvention) -> Result<f64> {
        let joint: Vec<&str> = a.iter().chain(b).copied().collect();
        Ok(self.entropy_with(a, convention)? + self.entropy_with(b, convention)?
            - self.entropy_with(&joint, convention)?)
    }

    /// `I(a; b | c)` in bits.
    pub fn conditional_mutual_information(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        let ac: Vec<&str> = a.iter().chain(c).copied().collect();
        let bc: Vec<&str> = b.iter().chain(c).copied().collect();
        let abc: Vec<&str> = a.iter().chain(b).chain(c).copied().collect();
        Ok(self.entropy(&ac)? + self.entropy(&bc)? - self.entropy(c)? - self.entropy(&abc)?)
    }
}
