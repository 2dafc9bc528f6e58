//! Dense spin-`s` operators, their embedding into the `N`-site product space and
//! the Ising / Ising + field Hamiltonians.
//!
//! Basis convention: lexicographic with site 0 varying slowest; on each site the
//! projections run `m = s, s-1, …, -s`. Projections are carried as doubled integers
//! (`two_m = 2m`) so half-integer spins stay exact.

use alloc::vec::Vec;

use libm::{cos, sin, sqrt};
use nalgebra::{DMatrix, DVector};

use crate::analytic::FieldConfig;
use crate::error::{Error, Result};
use crate::C64;

/// Default upper bound on the Hilbert dimension `(2s+1)^N`.
pub const DEFAULT_DIM_LIMIT: usize = 20_000;

/// Label attached to every many-body object built here.
pub const BASIS_LABEL: &str = "product-z/site0-slowest/m-descending";

/// Static description of the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinSystem {
    n_sites: usize,
    two_s: u32,
    coupling_j: f64,
    gamma: f64,
    dim_limit: usize,
}

impl SpinSystem {
    /// `n_sites ≥ 2` spins of magnitude `s = two_s / 2` coupled with strength `coupling_j` (Hz).
    pub fn new(n_sites: usize, two_s: u32, coupling_j: f64) -> Result<Self> {
        Self::with_limit(n_sites, two_s, coupling_j, DEFAULT_DIM_LIMIT)
    }

    pub fn with_limit(n_sites: usize, two_s: u32, coupling_j: f64, dim_limit: usize) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::Domain("n_sites must be at least 2"));
        }
        if two_s == 0 {
            return Err(Error::Domain("two_s must be positive (s = 0 is trivial)"));
        }
        if !coupling_j.is_finite() {
            return Err(Error::Domain("coupling must be finite"));
        }
        Ok(Self {
            n_sites,
            two_s,
            coupling_j,
            gamma: 1.0,
            dim_limit,
        })
    }

    /// Same system with the metric scale factor `γ` replaced.
    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Domain("gamma must be positive and finite"));
        }
        self.gamma = gamma;
        Ok(self)
    }

    /// Same system with coupling `J` replaced.
    pub fn with_coupling(mut self, coupling_j: f64) -> Result<Self> {
        if !coupling_j.is_finite() {
            return Err(Error::Domain("coupling must be finite"));
        }
        self.coupling_j = coupling_j;
        Ok(self)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn two_s(&self) -> u32 {
        self.two_s
    }

    pub fn spin(&self) -> f64 {
        f64::from(self.two_s) / 2.0
    }

    pub fn coupling(&self) -> f64 {
        self.coupling_j
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dim_limit(&self) -> usize {
        self.dim_limit
    }

    pub fn is_half_integer(&self) -> bool {
        self.two_s % 2 == 1
    }

    /// `2s + 1`.
    pub fn local_dim(&self) -> usize {
        self.two_s as usize + 1
    }

    /// `(2s+1)^N`, saturating on overflow.
    pub fn dim(&self) -> usize {
        let mut d: usize = 1;
        for _ in 0..self.n_sites {
            d = d.saturating_mul(self.local_dim());
        }
        d
    }

    /// Fails when the product space exceeds the dimension guard.
    pub fn check_dim(&self) -> Result<usize> {
        let dim = self.dim();
        if dim > self.dim_limit {
            return Err(Error::DimensionGuard {
                dim,
                limit: self.dim_limit,
            });
        }
        Ok(dim)
    }

    /// Period of the zero-field evolution in `χ`: `2π` for half-integer `s`, `π` otherwise.
    pub fn chi_period(&self) -> f64 {
        if self.is_half_integer() {
            2.0 * core::f64::consts::PI
        } else {
            core::f64::consts::PI
        }
    }

    /// Doubled projections `2m_i` of every site for basis index `index`.
    pub fn basis_label(&self, index: usize) -> Vec<i64> {
        let local = self.local_dim();
        let mut label = alloc::vec![0i64; self.n_sites];
        let mut rest = index;
        for site in (0..self.n_sites).rev() {
            let k = rest % local;
            rest /= local;
            label[site] = i64::from(self.two_s) - 2 * k as i64;
        }
        label
    }

    /// Stride of `site` in the flat basis index.
    fn stride(&self, site: usize) -> usize {
        let mut stride = 1;
        for _ in site + 1..self.n_sites {
            stride *= self.local_dim();
        }
        stride
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinAxis {
    X,
    Y,
    Z,
}

/// A single-site spin component as a dense `(2s+1) × (2s+1)` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteOperator {
    pub matrix: DMatrix<C64>,
    pub kind: SpinAxis,
}

/// A dense operator on the full product space.
#[derive(Debug, Clone, PartialEq)]
pub struct ManyBodyOperator {
    pub matrix: DMatrix<C64>,
}

impl ManyBodyOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn basis_label(&self) -> &'static str {
        BASIS_LABEL
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.matrix * v
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            matrix: self.matrix.map(|z| z * factor),
        }
    }

    /// Largest elementwise deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }
}

pub(crate) fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// A point on the unit sphere given by polar and azimuthal angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub polar: f64,
    pub azimuth: f64,
}

impl Direction {
    pub fn new(polar: f64, azimuth: f64) -> Result<Self> {
        if !(0.0..=core::f64::consts::PI).contains(&polar) || !azimuth.is_finite() {
            return Err(Error::Domain("direction polar angle must lie in [0, pi]"));
        }
        Ok(Self { polar, azimuth })
    }

    /// `+z`.
    pub fn z() -> Self {
        Self {
            polar: 0.0,
            azimuth: 0.0,
        }
    }

    /// `(sinθ cosφ, sinθ sinφ, cosθ)`.
    pub fn unit_vector(&self) -> [f64; 3] {
        [
            sin(self.polar) * cos(self.azimuth),
            sin(self.polar) * sin(self.azimuth),
            cos(self.polar),
        ]
    }
}

/// Builds `(Sx, Sy, Sz)` for spin `s = two_s / 2` from the ladder actions
/// `S± |m⟩ = √(s(s+1) − m(m±1)) |m±1⟩`.
pub fn build_spin_operators(two_s: u32) -> Result<(SiteOperator, SiteOperator, SiteOperator)> {
    if two_s == 0 {
        return Err(Error::Domain("two_s must be positive (s = 0 is trivial)"));
    }
    let dim = two_s as usize + 1;
    let s = f64::from(two_s) / 2.0;
    let m_of = |k: usize| s - k as f64;

    let mut sx = DMatrix::<C64>::zeros(dim, dim);
    let mut sy = DMatrix::<C64>::zeros(dim, dim);
    let mut sz = DMatrix::<C64>::zeros(dim, dim);
    for k in 0..dim {
        let m = m_of(k);
        sz[(k, k)] = C64::new(m, 0.0);
        // S+ maps |m⟩ (index k) to |m+1⟩ (index k-1)
        if k > 0 {
            let c = sqrt(s * (s + 1.0) - m * (m + 1.0)) / 2.0;
            sx[(k - 1, k)] += C64::new(c, 0.0);
            sy[(k - 1, k)] += C64::new(0.0, -c);
        }
        if k + 1 < dim {
            let c = sqrt(s * (s + 1.0) - m * (m - 1.0)) / 2.0;
            sx[(k + 1, k)] += C64::new(c, 0.0);
            sy[(k + 1, k)] += C64::new(0.0, c);
        }
    }
    Ok((
        SiteOperator {
            matrix: sx,
            kind: SpinAxis::X,
        },
        SiteOperator {
            matrix: sy,
            kind: SpinAxis::Y,
        },
        SiteOperator {
            matrix: sz,
            kind: SpinAxis::Z,
        },
    ))
}

/// `1 ⊗ … ⊗ op ⊗ … ⊗ 1` with `op` on `site` (0-based, site 0 slowest).
pub fn embed_site_operator(op: &SiteOperator, site: usize, sys: &SpinSystem) -> Result<ManyBodyOperator> {
    embed_matrix(&op.matrix, site, sys)
}

fn embed_matrix(op: &DMatrix<C64>, site: usize, sys: &SpinSystem) -> Result<ManyBodyOperator> {
    if site >= sys.n_sites() {
        return Err(Error::SiteOutOfRange {
            site,
            n_sites: sys.n_sites(),
        });
    }
    if op.nrows() != sys.local_dim() || op.ncols() != sys.local_dim() {
        return Err(Error::Domain("site operator does not match the local dimension"));
    }
    sys.check_dim()?;
    let local = sys.local_dim();
    let identity = DMatrix::<C64>::identity(local, local);
    let mut out = DMatrix::<C64>::identity(1, 1);
    for k in 0..sys.n_sites() {
        out = out.kronecker(if k == site { op } else { &identity });
    }
    Ok(ManyBodyOperator { matrix: out })
}

/// `Σ_{i<j} (2m_i)(2m_j)` per basis index, i.e. four times `Σ_{i<j} m_i m_j`.
pub fn ising_pair_sums_x4(sys: &SpinSystem) -> Result<Vec<i64>> {
    let dim = sys.check_dim()?;
    Ok((0..dim)
        .map(|idx| {
            let label = sys.basis_label(idx);
            let mut acc = 0i64;
            for i in 0..label.len() {
                for j in i + 1..label.len() {
                    acc += label[i] * label[j];
                }
            }
            acc
        })
        .collect())
}

/// `2 Σ_j m_j` per basis index.
pub fn total_sz_x2(sys: &SpinSystem) -> Result<Vec<i64>> {
    let dim = sys.check_dim()?;
    Ok((0..dim).map(|idx| sys.basis_label(idx).iter().sum()).collect())
}

/// `H = 2J Σ_{i<j} S_i^z S_j^z`, diagonal in the product basis.
pub fn build_ising_hamiltonian(sys: &SpinSystem) -> Result<ManyBodyOperator> {
    let sums = ising_pair_sums_x4(sys)?;
    let diag = DVector::<C64>::from_iterator(
        sums.len(),
        sums.iter()
            .map(|&p| C64::new(sys.coupling() * p as f64 / 2.0, 0.0)),
    );
    Ok(ManyBodyOperator {
        matrix: DMatrix::from_diagonal(&diag),
    })
}

/// `Σ_j S_j · n` as a dense many-body operator.
pub fn collective_spin_along(sys: &SpinSystem, direction: &Direction) -> Result<ManyBodyOperator> {
    sys.check_dim()?;
    let (sx, sy, sz) = build_spin_operators(sys.two_s())?;
    let [nx, ny, nz] = direction.unit_vector();
    let local = sx.matrix * C64::from(nx) + sy.matrix * C64::from(ny) + sz.matrix * C64::from(nz);
    let dim = sys.dim();
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    for site in 0..sys.n_sites() {
        out += embed_matrix(&local, site, sys)?.matrix;
    }
    Ok(ManyBodyOperator { matrix: out })
}

/// `H = 2J Σ_{i<j} S_i^z S_j^z + h Σ_j S_j · n'` with an absolute field strength `h` (Hz).
pub fn build_hamiltonian_with_strength(
    sys: &SpinSystem,
    h: f64,
    direction: &Direction,
) -> Result<ManyBodyOperator> {
    let mut out = build_ising_hamiltonian(sys)?;
    if h != 0.0 {
        out.matrix += collective_spin_along(sys, direction)?.matrix * C64::from(h);
    }
    Ok(out)
}

/// `H = 2J Σ_{i<j} S_i^z S_j^z + h Σ_j S_j · n'` with `h = (h/J) · J`.
pub fn build_field_hamiltonian(sys: &SpinSystem, field: &FieldConfig) -> Result<ManyBodyOperator> {
    build_hamiltonian_with_strength(sys, field.ratio_h_over_j * sys.coupling(), &field.direction)
}

/// Dimensionless generator of `χ`: `G = 2 Σ_{i<j} S_i^z S_j^z + (h/J) Σ_j S_j · n'`,
/// so that `H = J G`.
pub fn build_chi_generator(sys: &SpinSystem, field: Option<&FieldConfig>) -> Result<ManyBodyOperator> {
    let unit = sys.with_coupling(1.0)?;
    match field {
        Some(f) => build_hamiltonian_with_strength(&unit, f.ratio_h_over_j, &f.direction),
        None => build_ising_hamiltonian(&unit),
    }
}

/// `Σ_j op_j |v⟩` for a single-site matrix `op`, without forming the many-body matrix.
pub fn apply_collective(sys: &SpinSystem, op: &DMatrix<C64>, v: &DVector<C64>) -> DVector<C64> {
    let local = sys.local_dim();
    let dim = v.len();
    let mut out = DVector::<C64>::zeros(dim);
    for site in 0..sys.n_sites() {
        let stride = sys.stride(site);
        for idx in 0..dim {
            let amp = v[idx];
            if amp == C64::new(0.0, 0.0) {
                continue;
            }
            let k = (idx / stride) % local;
            let base = idx - k * stride;
            for row in 0..local {
                let c = op[(row, k)];
                if c != C64::new(0.0, 0.0) {
                    out[base + row * stride] += c * amp;
                }
            }
        }
    }
    out
}
