//! Truncated two-mode Fock-space density operators.
//!
//! Basis layout: the product state `|i⟩_a |j⟩_b` sits at row/column
//! `i * Db + j`, with `Da`, `Db` the per-mode cutoffs (levels `0..D-1`).
//! Partial transposition, the moment traces and every oracle rely on it.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::{self, SCHEMA_VERSION};
use crate::opalg::{MultiIndex, NormalPolynomial};

/// Construction is refused when more population than this sits in the top two levels.
pub const TAIL_THRESHOLD: f64 = 1e-6;

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct FockState {
    dims: (usize, usize),
    rho: DMatrix<Complex64>,
    label: String,
}

impl FockState {
    /// Wrap a dense matrix. Checks shape, Hermiticity and unit trace but not
    /// positivity, so partial transposes are representable too.
    pub fn from_matrix(
        dims: (usize, usize),
        rho: DMatrix<Complex64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let d = dims.0 * dims.1;
        if dims.0 == 0 || dims.1 == 0 || rho.nrows() != d || rho.ncols() != d {
            return Err(Error::InvalidState(format!(
                "matrix is {}x{}, expected {d}x{d} for cutoffs {dims:?}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let deviation = hermitian_deviation(&rho);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = rho.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        Ok(FockState {
            dims,
            rho,
            label: label.into(),
        })
    }

    /// Pure state from an amplitude vector in the `i * Db + j` layout; normalizes it.
    pub fn from_pure(
        dims: (usize, usize),
        psi: &[Complex64],
        label: impl Into<String>,
    ) -> Result<Self> {
        let norm = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState(
                "zero or non-finite state vector".into(),
            ));
        }
        let d = psi.len();
        let rho = DMatrix::from_fn(d, d, |r, c| psi[r] * psi[c].conj() / (norm * norm));
        Self::from_matrix(dims, rho, label)
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.0 * self.dims.1
    }

    pub fn rho(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.dims.1 + j
    }

    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }

    /// Weighted sum of states with equal cutoffs.
    pub fn mix(parts: &[(f64, FockState)], label: impl Into<String>) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let dims = first.1.dims;
        let mut rho = DMatrix::zeros(first.1.dim(), first.1.dim());
        for (w, s) in parts {
            if s.dims != dims {
                return Err(Error::InvalidState(
                    "mixture components differ in cutoffs".into(),
                ));
            }
            rho += &s.rho * Complex64::new(*w, 0.0);
        }
        Self::from_matrix(dims, rho, label)
    }

    /// Dense dump `{"version", "label", "dims", "re", "im"}` with row-major matrices.
    pub fn to_json(&self) -> serde_json::Value {
        let d = self.dim();
        let re: Vec<Vec<f64>> = (0..d)
            .map(|r| (0..d).map(|c| self.rho[(r, c)].re).collect())
            .collect();
        let im: Vec<Vec<f64>> = (0..d)
            .map(|r| (0..d).map(|c| self.rho[(r, c)].im).collect())
            .collect();
        serde_json::json!({
            "version": SCHEMA_VERSION,
            "label": self.label,
            "dims": [self.dims.0, self.dims.1],
            "re": re,
            "im": im,
        })
    }

    /// Trace of `ρ · a†ⁿaᵐb†ᵏbˡ`, with no check on the truncation margin.
    pub(crate) fn monomial_trace(&self, u: &MultiIndex) -> Complex64 {
        let fa = ladder_action(self.dims.0, u.n, u.m);
        let fb = ladder_action(self.dims.1, u.k, u.l);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, ai) in fa.iter().enumerate() {
            let Some((ti, ci)) = ai else { continue };
            for (j, bj) in fb.iter().enumerate() {
                let Some((tj, cj)) = bj else { continue };
                // X|r⟩ = f(r)|t(r)⟩, so tr(ρX) = Σ_r ρ[r, t(r)] f(r)
                acc += self.rho[(self.index(i, j), self.index(*ti, *tj))] * (ci * cj);
            }
        }
        acc
    }
}

/// Action of `a†ⁿ aᵐ` on `|i⟩` for `i < dim`: `Some((target, factor))`, or `None`
/// when the state is annihilated or leaves the truncated space.
fn ladder_action(dim: usize, n: u32, m: u32) -> Vec<Option<(usize, f64)>> {
    let (n, m) = (n as usize, m as usize);
    (0..dim)
        .map(|i| {
            if i < m || i - m + n >= dim {
                return None;
            }
            let mut f = 1.0f64;
            for t in (i - m + 1)..=i {
                f *= t as f64;
            }
            for t in (i - m + 1)..=(i - m + n) {
                f *= t as f64;
            }
            Some((i - m + n, f.sqrt()))
        })
        .collect()
}

pub(crate) fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..m.nrows() {
        for c in r..m.ncols() {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (cutoffs {}x{})",
            self.label, self.dims.0, self.dims.1
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+", alias = "plus")]
    Plus,
    #[serde(rename = "-", alias = "minus")]
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// One factor of a product component in a mixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SingleMode {
    Vacuum,
    Coherent {
        #[serde(with = "json::complex")]
        alpha: Complex64,
    },
    Thermal {
        nbar: f64,
    },
    Fock {
        n: usize,
    },
}

impl SingleMode {
    /// Density matrix on levels `0..dim`, renormalized after truncation.
    fn density(&self, dim: usize) -> Result<DMatrix<Complex64>> {
        let from_vec = |v: Vec<Complex64>| {
            let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum();
            DMatrix::from_fn(dim, dim, |r, c| v[r] * v[c].conj() / norm)
        };
        Ok(match self {
            SingleMode::Vacuum => from_vec(fock_vector(0, dim)),
            SingleMode::Fock { n } => {
                if *n >= dim {
                    return Err(Error::InvalidState(format!(
                        "Fock level {n} does not fit cutoff {dim}"
                    )));
                }
                from_vec(fock_vector(*n, dim))
            }
            SingleMode::Coherent { alpha } => from_vec(coherent_amplitudes(*alpha, dim)),
            SingleMode::Thermal { nbar } => {
                if nbar.is_nan() || *nbar < 0.0 {
                    return Err(Error::InvalidState(format!(
                        "thermal occupation {nbar} must be >= 0"
                    )));
                }
                let ratio = nbar / (nbar + 1.0);
                let pops: Vec<f64> = (0..dim).map(|k| ratio.powi(k as i32)).collect();
                let total: f64 = pops.iter().sum();
                DMatrix::from_fn(dim, dim, |r, c| {
                    if r == c {
                        Complex64::new(pops[r] / total, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub a: SingleMode,
    pub b: SingleMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum StateKind {
    Vacuum,
    CoherentProduct {
        #[serde(with = "json::complex")]
        alpha: Complex64,
        #[serde(with = "json::complex")]
        beta: Complex64,
    },
    EntangledCoherent {
        #[serde(with = "json::complex")]
        alpha: Complex64,
        #[serde(with = "json::complex")]
        beta: Complex64,
        sign: Sign,
    },
    Tmsv {
        xi: f64,
    },
    ThermalProduct {
        nbar_a: f64,
        nbar_b: f64,
    },
    Mixture {
        components: Vec<MixtureComponent>,
    },
}

/// Serialized as `{"kind": "...", "params": {...}, "cutoffs": [Da, Db]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct StateSpec {
    #[serde(flatten)]
    pub kind: StateKind,
    pub cutoffs: [usize; 2],
}

// Lets parameterless kinds carry `"params": {}` or `null`.
#[derive(Deserialize)]
struct RawSpec {
    kind: serde_json::Value,
    #[serde(default)]
    params: serde_json::Value,
    cutoffs: [usize; 2],
}

impl TryFrom<RawSpec> for StateSpec {
    type Error = serde_json::Error;

    fn try_from(raw: RawSpec) -> std::result::Result<Self, Self::Error> {
        let mut doc = serde_json::Map::new();
        doc.insert("kind".into(), raw.kind);
        let empty = raw.params.is_null() || raw.params.as_object().is_some_and(|m| m.is_empty());
        if !empty {
            doc.insert("params".into(), raw.params);
        }
        Ok(StateSpec {
            kind: serde_json::from_value(serde_json::Value::Object(doc))?,
            cutoffs: raw.cutoffs,
        })
    }
}

impl StateSpec {
    pub fn new(kind: StateKind, cutoffs: (usize, usize)) -> Self {
        StateSpec {
            kind,
            cutoffs: [cutoffs.0, cutoffs.1],
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("state spec serializes")
    }

    fn label(&self) -> String {
        match &self.kind {
            StateKind::Vacuum => "vacuum".into(),
            StateKind::CoherentProduct { alpha, beta } => {
                format!("coherent_product({alpha}, {beta})")
            }
            StateKind::EntangledCoherent { alpha, beta, sign } => {
                let s = if *sign == Sign::Plus { '+' } else { '-' };
                format!("entangled_coherent({alpha}, {beta}, {s})")
            }
            StateKind::Tmsv { xi } => format!("tmsv({xi})"),
            StateKind::ThermalProduct { nbar_a, nbar_b } => {
                format!("thermal_product({nbar_a}, {nbar_b})")
            }
            StateKind::Mixture { components } => {
                format!("mixture({} components)", components.len())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BuildOptions {
    /// Skip the tail-mass gate.
    pub allow_truncation: bool,
}

pub fn build(spec: &StateSpec) -> Result<FockState> {
    build_with(spec, BuildOptions::default())
}

pub fn build_with(spec: &StateSpec, opts: BuildOptions) -> Result<FockState> {
    let [da, db] = spec.cutoffs;
    if da < 2 || db < 2 {
        return Err(Error::InvalidState(format!(
            "cutoffs must be >= 2, got [{da}, {db}]"
        )));
    }
    let dims = (da, db);
    let label = spec.label();
    let state = match &spec.kind {
        StateKind::Vacuum => product(&SingleMode::Vacuum, &SingleMode::Vacuum, dims, label)?,
        StateKind::CoherentProduct { alpha, beta } => product(
            &SingleMode::Coherent { alpha: *alpha },
            &SingleMode::Coherent { alpha: *beta },
            dims,
            label,
        )?,
        StateKind::ThermalProduct { nbar_a, nbar_b } => product(
            &SingleMode::Thermal { nbar: *nbar_a },
            &SingleMode::Thermal { nbar: *nbar_b },
            dims,
            label,
        )?,
        StateKind::EntangledCoherent { alpha, beta, sign } => {
            let norm = entangled_coherent_normalization(*alpha, *beta, *sign)?;
            let pa = coherent_amplitudes(*alpha, da);
            let pb = coherent_amplitudes(*beta, db);
            let ma = coherent_amplitudes(-alpha, da);
            let mb = coherent_amplitudes(-beta, db);
            let s = sign.value();
            let mut psi = vec![Complex64::new(0.0, 0.0); da * db];
            for i in 0..da {
                for j in 0..db {
                    psi[i * db + j] = (pa[i] * pb[j] + ma[i] * mb[j] * s) * norm;
                }
            }
            FockState::from_pure(dims, &psi, label)?
        }
        StateKind::Tmsv { xi } => {
            let t = xi.tanh();
            let d = da.min(db);
            let mut psi = vec![Complex64::new(0.0, 0.0); da * db];
            for n in 0..d {
                psi[n * db + n] = Complex64::new(t.powi(n as i32) / xi.cosh(), 0.0);
            }
            FockState::from_pure(dims, &psi, label)?
        }
        StateKind::Mixture { components } => {
            if components.is_empty() {
                return Err(Error::InvalidState(
                    "mixture needs at least one component".into(),
                ));
            }
            if components
                .iter()
                .any(|c| c.weight.is_nan() || c.weight < 0.0)
            {
                return Err(Error::InvalidState("mixture weights must be >= 0".into()));
            }
            let total: f64 = components.iter().map(|c| c.weight).sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidState(format!(
                    "mixture weights sum to {total}, expected 1"
                )));
            }
            let parts = components
                .iter()
                .map(|c| Ok((c.weight, product(&c.a, &c.b, dims, String::new())?)))
                .collect::<Result<Vec<_>>>()?;
            FockState::mix(&parts, label)?
        }
    };
    if !opts.allow_truncation {
        let tail = tail_mass(&state);
        if tail > TAIL_THRESHOLD {
            return Err(Error::Truncation {
                tail_mass: tail,
                threshold: TAIL_THRESHOLD,
            });
        }
    }
    Ok(state)
}

/// `[2(1 ± e^{-2(|α|²+|β|²)})]^{-1/2}` for `(|α,β⟩ ± |-α,-β⟩)`.
pub fn entangled_coherent_normalization(
    alpha: Complex64,
    beta: Complex64,
    sign: Sign,
) -> Result<f64> {
    let x = alpha.norm_sqr() + beta.norm_sqr();
    let inner = 2.0 * (1.0 + sign.value() * (-2.0 * x).exp());
    if inner <= 0.0 {
        return Err(Error::InvalidState(
            "odd entangled coherent state with zero amplitudes".into(),
        ));
    }
    Ok(inner.powf(-0.5))
}

fn product(
    a: &SingleMode,
    b: &SingleMode,
    dims: (usize, usize),
    label: String,
) -> Result<FockState> {
    let ra = a.density(dims.0)?;
    let rb = b.density(dims.1)?;
    FockState::from_matrix(dims, ra.kronecker(&rb), label)
}

fn fock_vector(n: usize, dim: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    v[n] = Complex64::new(1.0, 0.0);
    v
}

/// `e^{-|α|²/2} αⁿ/√(n!)` for `n < dim`, without renormalization.
fn coherent_amplitudes(alpha: Complex64, dim: usize) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(dim);
    let mut c = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..dim {
        v.push(c);
        c = c * alpha / ((n + 1) as f64).sqrt();
    }
    v
}

/// Population with either Fock index in the top two levels of its mode.
pub fn tail_mass(s: &FockState) -> f64 {
    let (da, db) = s.dims;
    let mut mass = 0.0;
    for i in 0..da {
        for j in 0..db {
            if i + 2 >= da || j + 2 >= db {
                mass += s.rho[(s.index(i, j), s.index(i, j))].re;
            }
        }
    }
    mass
}

/// Transpose of the b factor: entry `((i,j),(i',j'))` of the result is entry
/// `((i,j'),(i',j))` of the input.
pub fn partial_transpose(s: &FockState) -> FockState {
    let (da, db) = s.dims;
    let d = s.dim();
    let rho = DMatrix::from_fn(d, d, |r, c| {
        let (i, j) = (r / db, r % db);
        let (ip, jp) = (c / db, c % db);
        s.rho[(i * db + jp, ip * db + j)]
    });
    debug_assert_eq!(da * db, d);
    FockState {
        dims: s.dims,
        rho,
        label: format!("PT[{}]", s.label),
    }
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &DMatrix<Complex64>) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::Domain("min_eigenvalue needs a square matrix".into()));
    }
    let deviation = hermitian_deviation(m);
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(m.clone().symmetric_eigenvalues().min())
}

/// `tr(ρ p)` using the ladder-operator action on the truncated basis.
pub fn expectation(s: &FockState, p: &NormalPolynomial) -> Result<Complex64> {
    let limit = s.dims.0.min(s.dims.1) as u32 - 1;
    if p.degree() > limit {
        return Err(Error::CutoffMargin {
            degree: p.degree(),
            limit,
        });
    }
    Ok(p.terms().map(|(u, c)| c * s.monomial_trace(u)).sum())
}
