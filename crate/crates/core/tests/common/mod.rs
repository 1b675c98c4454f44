#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ptwitness::moments::MomentSource;
use ptwitness::opalg::{MultiIndex, NormalPolynomial};
use ptwitness::states::{build, FockState, MixtureComponent, SingleMode, StateKind, StateSpec};
use ptwitness::Result;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Dense truncated ladder matrices: the independent oracle for the algebra.
// ---------------------------------------------------------------------------

/// Truncated annihilation operator on levels `0..dim`.
pub fn dense_a(dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |r, col| {
        if col == r + 1 {
            c((col as f64).sqrt(), 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

pub fn dense_ad(dim: usize) -> DMatrix<Complex64> {
    dense_a(dim).adjoint()
}

fn mat_pow(m: &DMatrix<Complex64>, e: u32) -> DMatrix<Complex64> {
    let mut out = DMatrix::identity(m.nrows(), m.ncols());
    for _ in 0..e {
        out = &out * m;
    }
    out
}

/// `a†ⁿ aᵐ` on one mode, as a product of truncated matrices.
pub fn dense_single(n: u32, m: u32, dim: usize) -> DMatrix<Complex64> {
    mat_pow(&dense_ad(dim), n) * mat_pow(&dense_a(dim), m)
}

/// Two-mode monomial on cutoffs `(da, db)` in the `i * db + j` layout.
pub fn dense_monomial(u: &MultiIndex, da: usize, db: usize) -> DMatrix<Complex64> {
    dense_single(u.n, u.m, da).kronecker(&dense_single(u.k, u.l, db))
}

pub fn dense_poly(p: &NormalPolynomial, da: usize, db: usize) -> DMatrix<Complex64> {
    let mut out = DMatrix::zeros(da * db, da * db);
    for (u, coeff) in p.terms() {
        out += dense_monomial(u, da, db) * *coeff;
    }
    out
}

/// Entry-wise relative agreement on the block of levels `< keep` in both modes.
pub fn block_agrees(
    x: &DMatrix<Complex64>,
    y: &DMatrix<Complex64>,
    dim: usize,
    keep: usize,
    rtol: f64,
) -> bool {
    for i in 0..keep {
        for j in 0..keep {
            for ip in 0..keep {
                for jp in 0..keep {
                    let (r, col) = (i * dim + j, ip * dim + jp);
                    let (a, b) = (x[(r, col)], y[(r, col)]);
                    if (a - b).norm() > rtol * b.norm().max(1.0) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// `tr(ρ X)` with dense matrices.
pub fn dense_expectation(s: &FockState, x: &DMatrix<Complex64>) -> Complex64 {
    (s.rho() * x).trace()
}

// ---------------------------------------------------------------------------
// Random polynomials and states.
// ---------------------------------------------------------------------------

pub fn random_complex<R: Rng>(r: &mut R, scale: f64) -> Complex64 {
    c(r.random_range(-scale..scale), r.random_range(-scale..scale))
}

pub fn random_poly<R: Rng>(r: &mut R, terms: usize, max_exp: u32) -> NormalPolynomial {
    NormalPolynomial::from_terms((0..terms).map(|_| {
        (
            MultiIndex::new(
                r.random_range(0..=max_exp),
                r.random_range(0..=max_exp),
                r.random_range(0..=max_exp),
                r.random_range(0..=max_exp),
            ),
            random_complex(r, 1.0),
        )
    }))
}

/// Random pure two-mode state supported on levels `< support`.
pub fn random_pure<R: Rng>(r: &mut R, dims: (usize, usize), support: usize) -> FockState {
    let mut psi = vec![c(0.0, 0.0); dims.0 * dims.1];
    for i in 0..support.min(dims.0) {
        for j in 0..support.min(dims.1) {
            psi[i * dims.1 + j] = random_complex(r, 1.0);
        }
    }
    FockState::from_pure(dims, &psi, "random pure").unwrap()
}

/// Random mixture of `k` random pure states (generally entangled).
pub fn random_mixed<R: Rng>(
    r: &mut R,
    dims: (usize, usize),
    support: usize,
    k: usize,
) -> FockState {
    let weights: Vec<f64> = (0..k).map(|_| r.random_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let parts: Vec<(f64, FockState)> = weights
        .iter()
        .map(|w| (w / total, random_pure(r, dims, support)))
        .collect();
    FockState::mix(&parts, "random mixed").unwrap()
}

pub fn random_single<R: Rng>(r: &mut R, max_amp: f64) -> SingleMode {
    match r.random_range(0..4) {
        0 => SingleMode::Vacuum,
        1 => {
            let amp = r.random_range(0.0..max_amp);
            let phase = r.random_range(0.0..2.0 * PI);
            SingleMode::Coherent {
                alpha: Complex64::from_polar(amp, phase),
            }
        }
        2 => SingleMode::Thermal {
            nbar: r.random_range(0.0..0.2),
        },
        _ => SingleMode::Fock {
            n: r.random_range(0..3),
        },
    }
}

/// Random separable mixture of up to four product components.
pub fn random_separable_spec<R: Rng>(r: &mut R, cutoff: usize) -> StateSpec {
    let k = r.random_range(1..=4);
    let raw: Vec<f64> = (0..k).map(|_| r.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut components: Vec<MixtureComponent> = raw
        .iter()
        .map(|w| MixtureComponent {
            weight: w / total,
            a: random_single(r, 1.0),
            b: random_single(r, 1.0),
        })
        .collect();
    // exact unit sum for the 1e-12 weight check
    let rest: f64 = components.iter().skip(1).map(|m| m.weight).sum();
    components[0].weight = 1.0 - rest;
    StateSpec::new(StateKind::Mixture { components }, (cutoff, cutoff))
}

pub fn random_separable<R: Rng>(r: &mut R, cutoff: usize) -> FockState {
    build(&random_separable_spec(r, cutoff)).unwrap()
}

pub fn spec_state(kind: StateKind, d: usize) -> FockState {
    build(&StateSpec::new(kind, (d, d))).unwrap()
}

pub fn tmsv(xi: f64, d: usize) -> FockState {
    spec_state(StateKind::Tmsv { xi }, d)
}

pub fn entangled_coherent_minus(alpha: f64, beta: f64, d: usize) -> FockState {
    spec_state(
        StateKind::EntangledCoherent {
            alpha: c(alpha, 0.0),
            beta: c(beta, 0.0),
            sign: ptwitness::states::Sign::Minus,
        },
        d,
    )
}

// ---------------------------------------------------------------------------
// Closed-form moment providers (independent of the Fock path).
// ---------------------------------------------------------------------------

/// `|α⟩|β⟩`: normally ordered moments are `α*ⁿ αᵐ β*ᵏ βˡ`.
pub struct CoherentClosedForm {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl MomentSource for CoherentClosedForm {
    fn moment(&self, u: &MultiIndex) -> Result<Complex64> {
        Ok(self.alpha.conj().powu(u.n)
            * self.alpha.powu(u.m)
            * self.beta.conj().powu(u.k)
            * self.beta.powu(u.l))
    }

    fn max_degree(&self) -> u32 {
        ptwitness::opalg::MAX_DEGREE
    }

    fn describe(&self) -> String {
        "coherent closed form".into()
    }
}

/// Two-mode squeezed vacuum, second moments only:
/// `⟨a†a⟩ = ⟨b†b⟩ = sinh²ξ`, `⟨ab⟩ = ⟨a†b†⟩ = sinh ξ cosh ξ`, the rest zero.
pub struct TmsvSecondMoments {
    pub xi: f64,
}

impl MomentSource for TmsvSecondMoments {
    fn moment(&self, u: &MultiIndex) -> Result<Complex64> {
        let (s, ch) = (self.xi.sinh(), self.xi.cosh());
        Ok(match u.as_array() {
            [0, 0, 0, 0] => c(1.0, 0.0),
            [1, 1, 0, 0] | [0, 0, 1, 1] => c(s * s, 0.0),
            [0, 1, 0, 1] | [1, 0, 1, 0] => c(s * ch, 0.0),
            _ => c(0.0, 0.0),
        })
    }

    fn max_degree(&self) -> u32 {
        2
    }

    fn describe(&self) -> String {
        format!("tmsv({}) second moments", self.xi)
    }
}

/// `-|α|²|β|⁴ coth(x) / sinh²(x)`, `x = |α|² + |β|²`.
pub fn s_closed_form(alpha: f64, beta: f64) -> f64 {
    let x = alpha * alpha + beta * beta;
    -alpha * alpha * beta.powi(4) * (x.cosh() / x.sinh()) / x.sinh().powi(2)
}
