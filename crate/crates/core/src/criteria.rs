//! Partial-transpose moment matrices and the determinant hierarchy.
//!
//! For an operator `f = Σ_j c_j f_j` expanded in a basis `{f_j}`, positivity
//! of the partially transposed state forces `⟨f†f⟩^PT = Σ c_i* c_j M_ij ≥ 0`
//! with `M_ij = ⟨f_i† f_j⟩^PT`. Every principal minor of `M` must then be
//! nonnegative; a negative one certifies negative partial transposition.
//!
//! Rows carry the conjugated basis element, so the canonical 5×5 matrix reads
//! `1, ⟨a⟩, ⟨a†⟩, ⟨b†⟩, ⟨b⟩` along its first row.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::MomentTable;
use crate::opalg::{enumerate_indices, MultiIndex, NormalPolynomial};

const HERMITIAN_RTOL: f64 = 1e-10;
const IMAG_RTOL: f64 = 1e-8;
/// Pools up to this size are searched exhaustively.
pub const EXHAUSTIVE_POOL_LIMIT: usize = 12;
const GREEDY_SEEDS: usize = 4;

/// Ordered list of operators that `f` is expanded in.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorBasis {
    elements: Vec<NormalPolynomial>,
    label: String,
}

impl OperatorBasis {
    /// Rejects zero elements and elements that are scalar multiples of one another.
    pub fn new(elements: Vec<NormalPolynomial>, label: impl Into<String>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidBasis("basis is empty".into()));
        }
        for (i, e) in elements.iter().enumerate() {
            if e.is_zero() {
                return Err(Error::InvalidBasis(format!("element {i} is zero")));
            }
            for (j, f) in elements.iter().enumerate().skip(i + 1) {
                if proportional(e, f) {
                    return Err(Error::InvalidBasis(format!(
                        "elements {i} and {j} are proportional"
                    )));
                }
            }
        }
        Ok(OperatorBasis {
            elements,
            label: label.into(),
        })
    }

    /// The first `n` monomials in canonical order.
    pub fn canonical(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidBasis("canonical basis needs N >= 1".into()));
        }
        Self::from_indices(&enumerate_indices(n), format!("canonical({n})"))
    }

    pub fn from_indices(indices: &[MultiIndex], label: impl Into<String>) -> Result<Self> {
        Self::new(
            indices
                .iter()
                .map(|u| NormalPolynomial::monomial(*u))
                .collect(),
            label,
        )
    }

    /// `f = c₁ + c₂a + c₃b`.
    pub fn d_basis() -> Self {
        Self::new(
            vec![
                NormalPolynomial::one(),
                NormalPolynomial::a(),
                NormalPolynomial::b(),
            ],
            "d: [1, a, b]",
        )
        .expect("valid basis")
    }

    /// `f = c₁ + c₂b + c₃ab`; reproduces the 3×3 matrix with first row `1, ⟨b†⟩, ⟨ab†⟩`.
    pub fn s_basis() -> Self {
        Self::from_indices(
            &[
                MultiIndex::IDENTITY,
                MultiIndex::new(0, 0, 0, 1),
                MultiIndex::new(0, 1, 0, 1),
            ],
            "s: [1, b, ab]",
        )
        .expect("valid basis")
    }

    pub fn elements(&self) -> &[NormalPolynomial] {
        &self.elements
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Single-monomial elements are reported by index in witnesses.
    pub fn monomial_index(&self, i: usize) -> Option<MultiIndex> {
        let e = &self.elements[i];
        match e.terms().next() {
            Some((u, c)) if e.len() == 1 && *c == Complex64::new(1.0, 0.0) => Some(*u),
            _ => None,
        }
    }
}

fn proportional(p: &NormalPolynomial, q: &NormalPolynomial) -> bool {
    if p.len() != q.len() || p.terms().zip(q.terms()).any(|((u, _), (v, _))| u != v) {
        return false;
    }
    let mut pairs = p.terms().zip(q.terms()).map(|((_, a), (_, b))| (*a, *b));
    let (a0, b0) = pairs.next().expect("nonzero polynomial");
    let ratio = b0 / a0;
    pairs.all(|(a, b)| (b - a * ratio).norm() <= 1e-14 * b.norm().max(1.0))
}

/// `⟨f_i† f_j⟩^PT` for every basis pair, plus the basis it came from.
#[derive(Debug, Clone)]
pub struct MomentMatrix {
    entries: DMatrix<Complex64>,
    basis: OperatorBasis,
    source: String,
}

impl MomentMatrix {
    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn basis(&self) -> &OperatorBasis {
        &self.basis
    }

    /// Description of the moment table the entries were evaluated on.
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.nrows() == 0
    }

    pub fn determinant(&self) -> Result<f64> {
        determinant(&self.entries)
    }

    /// Submatrix keeping the rows and columns in `positions`.
    pub fn submatrix(&self, positions: &[usize]) -> DMatrix<Complex64> {
        DMatrix::from_fn(positions.len(), positions.len(), |r, c| {
            self.entries[(positions[r], positions[c])]
        })
    }

    pub fn principal_minor(&self, positions: &[usize]) -> Result<f64> {
        determinant(&self.submatrix(positions))
    }

    /// Leading minor of order `n` (the first `n` rows and columns).
    pub fn leading_minor(&self, n: usize) -> Result<f64> {
        determinant(&self.entries.view((0, 0), (n, n)).into_owned())
    }
}

/// `max(1, Π |M_ii|)`: Hadamard's bound on a positive semidefinite determinant,
/// floored at 1 so vanishing diagonals do not zero the tolerance.
pub fn minor_scale(m: &DMatrix<Complex64>) -> f64 {
    m.diagonal()
        .iter()
        .map(|z| z.norm())
        .product::<f64>()
        .max(1.0)
}

/// Real determinant of a Hermitian matrix by partial-pivoted LU.
pub fn determinant(m: &DMatrix<Complex64>) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::Domain("determinant needs a square matrix".into()));
    }
    let magnitude = m.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
    let deviation = crate::states::hermitian_deviation(m);
    if deviation > HERMITIAN_RTOL * magnitude {
        return Err(Error::NotHermitian { deviation });
    }
    if m.nrows() == 0 {
        return Ok(1.0);
    }
    let det = m.clone().lu().determinant();
    let scale = minor_scale(m);
    if det.im.abs() > IMAG_RTOL * scale {
        return Err(Error::ComplexDeterminant {
            imag: det.im,
            scale,
        });
    }
    Ok(det.re)
}

/// Entries `pt(f_i† f_j)` as normally ordered polynomials: each entry is the
/// plain moment expression whose value is `⟨f_i† f_j⟩^PT`.
pub fn symbolic_matrix(basis: &OperatorBasis) -> Result<Vec<Vec<NormalPolynomial>>> {
    let e = basis.elements();
    e.iter()
        .map(|fi| {
            let adj = fi.adjoint();
            e.iter()
                .map(|fj| Ok(adj.multiply(fj)?.pt_transform()))
                .collect()
        })
        .collect()
}

/// `M_ij = ⟨f_i† f_j⟩^PT`, evaluated entry by entry in parallel.
pub fn build_matrix(t: &MomentTable, basis: &OperatorBasis) -> Result<MomentMatrix> {
    let n = basis.len();
    let e = basis.elements();
    let max_degree = t.max_degree();
    for i in 0..n {
        for j in 0..n {
            let degree = e[i].degree() + e[j].degree();
            if degree > max_degree {
                return Err(Error::BasisDegree {
                    i,
                    j,
                    degree,
                    max_degree,
                });
            }
        }
    }
    let adjoints: Vec<NormalPolynomial> = e.iter().map(NormalPolynomial::adjoint).collect();
    let values = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            t.eval_pt(&adjoints[i].multiply(&e[j])?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MomentMatrix {
        entries: DMatrix::from_row_slice(n, n, &values),
        basis: basis.clone(),
        source: t.describe(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    NptDetected,
    PtNonnegativeUpToOrder,
    /// The requested order could not be reached; nothing negative below it.
    Inconclusive,
}

impl VerdictKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            VerdictKind::NptDetected => "npt_detected",
            VerdictKind::PtNonnegativeUpToOrder => "pt_nonnegative_up_to_order",
            VerdictKind::Inconclusive => "inconclusive",
        }
    }
}

/// A negative minor: the basis positions it keeps and its value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub positions: Vec<usize>,
    /// Multi-indices of the kept rows, when the basis elements are monomials.
    pub indices: Vec<MultiIndex>,
    pub value: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub witness: Option<Witness>,
    pub order_reached: usize,
}

impl Verdict {
    pub fn is_npt(&self) -> bool {
        self.kind == VerdictKind::NptDetected
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeadingMinor {
    pub order: usize,
    pub value: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub verdict: Verdict,
    pub determinants: Vec<LeadingMinor>,
}

/// Largest `N <= n_max` whose canonical basis fits the table's degree budget.
pub fn reachable_order(t: &MomentTable, n_max: usize) -> usize {
    let budget = t.max_degree();
    let idx = enumerate_indices(n_max);
    idx.iter().take_while(|u| 2 * u.degree() <= budget).count()
}

fn witness(basis: &OperatorBasis, positions: Vec<usize>, value: f64, scale: f64) -> Witness {
    let indices = positions
        .iter()
        .filter_map(|p| basis.monomial_index(*p))
        .collect();
    Witness {
        positions,
        indices,
        value,
        scale,
    }
}

/// Leading minors `D_1 … D_N` of the canonical moment matrix; NPT is reported
/// at the first `D_N < -tolerance * max(1, Π diag)`.
pub fn hierarchy_scan(t: &MomentTable, n_max: usize, tolerance: f64) -> Result<ScanReport> {
    if n_max == 0 || tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::Domain(
            "hierarchy scan needs N_max >= 1 and tolerance > 0".into(),
        ));
    }
    let order = reachable_order(t, n_max);
    let basis = OperatorBasis::canonical(order)?;
    let m = build_matrix(t, &basis)?;
    let mut determinants = Vec::with_capacity(order);
    let mut found = None;
    for n in 1..=order {
        let sub = m.entries().view((0, 0), (n, n)).into_owned();
        let value = determinant(&sub)?;
        let scale = minor_scale(&sub);
        if found.is_none() && value < -tolerance * scale {
            found = Some(witness(&basis, (0..n).collect(), value, scale));
        }
        determinants.push(LeadingMinor {
            order: n,
            value,
            scale,
        });
    }
    let kind = match (&found, order < n_max) {
        (Some(_), _) => VerdictKind::NptDetected,
        (None, false) => VerdictKind::PtNonnegativeUpToOrder,
        (None, true) => VerdictKind::Inconclusive,
    };
    let order_reached = found.as_ref().map_or(order, |w| w.positions.len());
    Ok(ScanReport {
        verdict: Verdict {
            kind,
            witness: found,
            order_reached,
        },
        determinants,
    })
}

/// The most negative principal minor located by [`principal_minor_search`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinorHit {
    pub indices: Vec<MultiIndex>,
    pub positions: Vec<usize>,
    pub value: f64,
    pub scale: f64,
}

impl MinorHit {
    pub fn normalized(&self) -> f64 {
        self.value / self.scale
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinorSearch {
    pub best: MinorHit,
    pub evaluated: usize,
    pub exhaustive: bool,
}

impl MinorSearch {
    pub fn verdict(&self, tolerance: f64) -> Verdict {
        let hit = &self.best;
        if hit.value < -tolerance * hit.scale {
            Verdict {
                kind: VerdictKind::NptDetected,
                witness: Some(Witness {
                    positions: hit.positions.clone(),
                    indices: hit.indices.clone(),
                    value: hit.value,
                    scale: hit.scale,
                }),
                order_reached: hit.positions.len(),
            }
        } else {
            Verdict {
                kind: VerdictKind::PtNonnegativeUpToOrder,
                witness: None,
                order_reached: hit.positions.len(),
            }
        }
    }
}

struct MinorEval<'a> {
    m: &'a DMatrix<Complex64>,
    evaluated: usize,
}

impl MinorEval<'_> {
    fn eval(&mut self, positions: &[usize]) -> Result<(f64, f64)> {
        self.evaluated += 1;
        let sub = DMatrix::from_fn(positions.len(), positions.len(), |r, c| {
            self.m[(positions[r], positions[c])]
        });
        Ok((determinant(&sub)?, minor_scale(&sub)))
    }
}

/// Search the principal minors of the moment matrix over `pool` (sizes
/// `1..=max_size`) for the most negative normalized value `det / max(1, Π diag)`.
///
/// Pools of at most [`EXHAUSTIVE_POOL_LIMIT`] indices are searched
/// exhaustively. Larger pools grow greedily from the most negative 2×2 minors,
/// adding at each step the index that lowers the normalized minor most. Ties go
/// to the earlier subset in pool order, so the search is deterministic.
pub fn principal_minor_search(
    t: &MomentTable,
    pool: &[MultiIndex],
    max_size: usize,
) -> Result<MinorSearch> {
    if pool.is_empty() || max_size == 0 {
        return Err(Error::Domain(
            "minor search needs a nonempty pool and max_size >= 1".into(),
        ));
    }
    let basis = OperatorBasis::from_indices(pool, "minor pool")?;
    let m = build_matrix(t, &basis)?;
    let max_size = max_size.min(pool.len());
    let mut ev = MinorEval {
        m: m.entries(),
        evaluated: 0,
    };
    let mut best: Option<(Vec<usize>, f64, f64)> = None;
    let mut consider = |positions: &[usize], value: f64, scale: f64| {
        let better = match &best {
            None => true,
            Some((_, v, s)) => value / scale < v / s,
        };
        if better {
            best = Some((positions.to_vec(), value, scale));
        }
    };

    let exhaustive = pool.len() <= EXHAUSTIVE_POOL_LIMIT;
    if exhaustive {
        for size in 1..=max_size {
            let mut subset: Vec<usize> = (0..size).collect();
            loop {
                let (v, s) = ev.eval(&subset)?;
                consider(&subset, v, s);
                if !next_combination(&mut subset, pool.len()) {
                    break;
                }
            }
        }
    } else {
        for i in 0..pool.len() {
            let (v, s) = ev.eval(&[i])?;
            consider(&[i], v, s);
        }
        let mut pairs = Vec::new();
        if max_size >= 2 {
            for i in 0..pool.len() {
                for j in i + 1..pool.len() {
                    let (v, s) = ev.eval(&[i, j])?;
                    consider(&[i, j], v, s);
                    pairs.push((vec![i, j], v / s));
                }
            }
        }
        // stable sort keeps pool order among equal values
        pairs.sort_by(|a, b| a.1.total_cmp(&b.1));
        for (seed, _) in pairs.into_iter().take(GREEDY_SEEDS) {
            let mut current = seed;
            while current.len() < max_size {
                let mut step: Option<(Vec<usize>, f64, f64)> = None;
                for cand in 0..pool.len() {
                    if current.contains(&cand) {
                        continue;
                    }
                    let mut next = current.clone();
                    next.push(cand);
                    next.sort_unstable();
                    let (v, s) = ev.eval(&next)?;
                    if step.as_ref().is_none_or(|(_, bv, bs)| v / s < bv / bs) {
                        step = Some((next, v, s));
                    }
                }
                let Some((next, v, s)) = step else { break };
                consider(&next, v, s);
                current = next;
            }
        }
    }

    let (positions, value, scale) = best.expect("at least one minor evaluated");
    Ok(MinorSearch {
        best: MinorHit {
            indices: positions.iter().map(|p| pool[*p]).collect(),
            positions,
            value,
            scale,
        },
        evaluated: ev.evaluated,
        exhaustive,
    })
}

/// Advance `subset` to the next combination of `0..n` in lexicographic order.
fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    for i in (0..k).rev() {
        if subset[i] < n - k + i {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Central moments through the algebra: `Δa = a - ⟨a⟩`, `Δb = b - ⟨b⟩`.
struct Fluctuations {
    da: NormalPolynomial,
    db: NormalPolynomial,
}

impl Fluctuations {
    fn new(t: &MomentTable) -> Result<Self> {
        let a = NormalPolynomial::a();
        let b = NormalPolynomial::b();
        let mean_a = t.eval(&a)?;
        let mean_b = t.eval(&b)?;
        Ok(Fluctuations {
            da: &a - &NormalPolynomial::constant(mean_a),
            db: &b - &NormalPolynomial::constant(mean_b),
        })
    }

    /// `(Δx, Δp)` with `x = (a + a†)/√2`, `p = (a - a†)/(i√2)`.
    fn quadratures(d: &NormalPolynomial) -> (NormalPolynomial, NormalPolynomial) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let dd = d.adjoint();
        let x = &(d + &dd) * s;
        let p = &(d - &dd) * Complex64::new(0.0, -s);
        (x, p)
    }
}

/// `½⟨XY + YX⟩`, real part.
fn sym_cov(t: &MomentTable, x: &NormalPolynomial, y: &NormalPolynomial) -> Result<f64> {
    let anti = &(x * y) + &(y * x);
    Ok(0.5 * t.eval(&anti)?.re)
}

/// The second-moment invariant
/// `S = det A₁ det A₂ + (¼ + det C)² - tr(A₁JCJA₂JCᵀJ) - ¼(det A₁ + det A₂)`,
/// with `A_i` the local quadrature covariance matrices and `C` the cross block.
pub fn simon_s(t: &MomentTable) -> Result<f64> {
    let f = Fluctuations::new(t)?;
    let (x1, p1) = Fluctuations::quadratures(&f.da);
    let (x2, p2) = Fluctuations::quadratures(&f.db);
    let local = |x: &NormalPolynomial, p: &NormalPolynomial| -> Result<Matrix2<f64>> {
        let xp = sym_cov(t, x, p)?;
        Ok(Matrix2::new(sym_cov(t, x, x)?, xp, xp, sym_cov(t, p, p)?))
    };
    let a1 = local(&x1, &p1)?;
    let a2 = local(&x2, &p2)?;
    let cross =
        |u: &NormalPolynomial, v: &NormalPolynomial| -> Result<f64> { Ok(t.eval(&(u * v))?.re) };
    let c = Matrix2::new(
        cross(&x1, &x2)?,
        cross(&x1, &p2)?,
        cross(&p1, &x2)?,
        cross(&p1, &p2)?,
    );
    let j = Matrix2::new(0.0, 1.0, -1.0, 0.0);
    let (d1, d2, dc) = (a1.determinant(), a2.determinant(), c.determinant());
    let tr = (a1 * j * c * j * a2 * j * c.transpose() * j).trace();
    Ok(d1 * d2 + (0.25 + dc).powi(2) - tr - 0.25 * (d1 + d2))
}

/// `⟨(Δu)²⟩ + ⟨(Δv)²⟩ - (r² + r⁻²)` with `u = |r|x₁ + x₂/r`, `v = |r|p₁ - p₂/r`.
pub fn duan(t: &MomentTable, r: f64) -> Result<f64> {
    if r == 0.0 || !r.is_finite() {
        return Err(Error::Domain(format!(
            "duan parameter must be finite and nonzero, got {r}"
        )));
    }
    let f = Fluctuations::new(t)?;
    let (x1, p1) = Fluctuations::quadratures(&f.da);
    let (x2, p2) = Fluctuations::quadratures(&f.db);
    let du = &(&x1 * r.abs()) + &(&x2 * r.recip());
    let dv = &(&p1 * r.abs()) - &(&p2 * r.recip());
    let var_u = t.eval(&(&du * &du))?.re;
    let var_v = t.eval(&(&dv * &dv))?.re;
    Ok(var_u + var_v - (r * r + (r * r).recip()))
}

/// The `r`-optimized form `⟨Δa†Δa⟩⟨Δb†Δb⟩ - Re²⟨ΔaΔb⟩`.
pub fn duan_min(t: &MomentTable) -> Result<f64> {
    let f = Fluctuations::new(t)?;
    let na = t.eval(&(&f.da.adjoint() * &f.da))?.re;
    let nb = t.eval(&(&f.db.adjoint() * &f.db))?.re;
    let ab = t.eval(&(&f.da * &f.db))?;
    Ok(na * nb - ab.re * ab.re)
}

/// Determinant for `f = c₁ + c₂a + c₃b`.
pub fn det_d(t: &MomentTable) -> Result<f64> {
    build_matrix(t, &OperatorBasis::d_basis())?.determinant()
}

/// Determinant for `f = c₁ + c₂b + c₃ab`.
pub fn det_s(t: &MomentTable) -> Result<f64> {
    build_matrix(t, &OperatorBasis::s_basis())?.determinant()
}

/// `⟨f_u†f_u⟩^PT ⟨f_v†f_v⟩^PT - |⟨f_u†f_v⟩^PT|²` for the monomials `f_u`, `f_v`.
pub fn two_term_condition(t: &MomentTable, u: &MultiIndex, v: &MultiIndex) -> Result<f64> {
    let fu = NormalPolynomial::monomial(*u);
    let fv = NormalPolynomial::monomial(*v);
    let max_degree = t.max_degree();
    let degree = 2 * u.degree().max(v.degree());
    if degree > max_degree {
        return Err(Error::BasisDegree {
            i: 0,
            j: 1,
            degree,
            max_degree,
        });
    }
    let uu = t.eval_pt(&(&fu.adjoint() * &fu))?.re;
    let vv = t.eval_pt(&(&fv.adjoint() * &fv))?.re;
    let uv = t.eval_pt(&(&fu.adjoint() * &fv))?;
    Ok(uu * vv - uv.norm_sqr())
}

/// One line of a criterion report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub criterion: String,
    pub value: f64,
    pub threshold: f64,
    pub verdict: String,
    pub witness_indices: Vec<MultiIndex>,
    pub basis_label: String,
}

impl CriterionReport {
    /// Flags NPT when `value < -threshold`.
    pub fn new(
        criterion: impl Into<String>,
        value: f64,
        threshold: f64,
        witness_indices: Vec<MultiIndex>,
        basis_label: impl Into<String>,
    ) -> Self {
        let verdict = if value < -threshold {
            "npt_detected"
        } else {
            "not_violated"
        };
        CriterionReport {
            criterion: criterion.into(),
            value,
            threshold,
            verdict: verdict.into(),
            witness_indices,
            basis_label: basis_label.into(),
        }
    }

    pub fn detected(&self) -> bool {
        self.verdict == "npt_detected"
    }
}

/// All named criteria at tolerance `tol` (thresholds scale like the minors).
pub fn named_criteria(t: &MomentTable, tol: f64) -> Result<Vec<CriterionReport>> {
    let mut out = Vec::new();
    let canonical5 = enumerate_indices(5);
    out.push(CriterionReport::new(
        "simon",
        simon_s(t)?,
        tol,
        canonical5,
        "canonical(5)",
    ));
    out.push(CriterionReport::new(
        "duan_min",
        duan_min(t)?,
        tol,
        vec![],
        "second moments",
    ));
    out.push(CriterionReport::new(
        "duan_r1",
        duan(t, 1.0)?,
        tol,
        vec![],
        "r = 1",
    ));

    let d = build_matrix(t, &OperatorBasis::d_basis())?;
    out.push(CriterionReport::new(
        "d",
        d.determinant()?,
        tol * minor_scale(d.entries()),
        vec![
            MultiIndex::IDENTITY,
            MultiIndex::new(0, 1, 0, 0),
            MultiIndex::new(0, 0, 0, 1),
        ],
        d.basis().label(),
    ));
    if t.max_degree() >= 4 {
        let s = build_matrix(t, &OperatorBasis::s_basis())?;
        let basis = s.basis().clone();
        out.push(CriterionReport::new(
            "s",
            s.determinant()?,
            tol * minor_scale(s.entries()),
            (0..3).filter_map(|i| basis.monomial_index(i)).collect(),
            basis.label(),
        ));
    }
    let idx = enumerate_indices(15);
    for v in idx.iter().skip(1) {
        if 2 * v.degree() > t.max_degree() {
            break;
        }
        let value = two_term_condition(t, &MultiIndex::IDENTITY, v)?;
        let scale = t
            .eval_pt(&(&NormalPolynomial::monomial(v.adjoint()) * &NormalPolynomial::monomial(*v)))?
            .norm()
            .max(1.0);
        out.push(CriterionReport::new(
            format!("two_term[{}]", v),
            value,
            tol * scale,
            vec![MultiIndex::IDENTITY, *v],
            "two-term",
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{build, Sign, StateKind, StateSpec};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn table(kind: StateKind, d: usize) -> MomentTable {
        MomentTable::from_state(build(&StateSpec::new(kind, (d, d))).unwrap())
    }

    #[test]
    fn basis_validation() {
        assert!(OperatorBasis::new(vec![], "x").is_err());
        assert!(OperatorBasis::new(vec![NormalPolynomial::zero()], "x").is_err());
        let a = NormalPolynomial::a();
        assert!(OperatorBasis::new(vec![a.clone(), &a * c(0.0, 2.0)], "x").is_err());
        assert!(OperatorBasis::new(vec![a.clone(), &a + &NormalPolynomial::b()], "x").is_ok());
        assert_eq!(
            OperatorBasis::canonical(1).unwrap().elements(),
            &[NormalPolynomial::one()]
        );
        assert!(OperatorBasis::canonical(0).is_err());
    }

    #[test]
    fn one_by_one_matrix() {
        let t = table(StateKind::Tmsv { xi: 0.3 }, 8);
        let m = build_matrix(&t, &OperatorBasis::canonical(1).unwrap()).unwrap();
        assert!((m.entries()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((m.determinant().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vacuum_d5_vanishes() {
        let t = table(StateKind::Vacuum, 6);
        let m = build_matrix(&t, &OperatorBasis::canonical(5).unwrap()).unwrap();
        assert!(m.determinant().unwrap().abs() < 1e-14);
        assert_eq!(det_d(&t).unwrap(), 0.0);
    }

    #[test]
    fn degree_overflow_names_pair() {
        let t = table(StateKind::Vacuum, 4);
        let basis = OperatorBasis::canonical(6).unwrap();
        match build_matrix(&t, &basis) {
            Err(Error::BasisDegree { i, j, degree, .. }) => assert_eq!((i, j, degree), (1, 5, 3)),
            other => panic!("expected degree error, got {other:?}"),
        }
    }

    #[test]
    fn determinant_contract() {
        let mut m = DMatrix::from_element(2, 2, c(1.0, 0.0));
        m[(0, 1)] = c(0.0, 1.0);
        assert!(matches!(determinant(&m), Err(Error::NotHermitian { .. })));
        assert_eq!(
            determinant(&DMatrix::from_element(1, 1, c(1.0, 0.0))).unwrap(),
            1.0
        );
    }

    #[test]
    fn scan_vacuum_and_truncation() {
        let t = table(StateKind::Vacuum, 6);
        let r = hierarchy_scan(&t, 10, 1e-9).unwrap();
        assert_eq!(r.verdict.kind, VerdictKind::PtNonnegativeUpToOrder);
        assert_eq!(r.verdict.order_reached, 10);
        assert_eq!(r.determinants.len(), 10);

        // max_degree 2 only supports degree-1 elements
        let small = table(StateKind::Vacuum, 4);
        let r = hierarchy_scan(&small, 10, 1e-9).unwrap();
        assert_eq!(r.verdict.kind, VerdictKind::Inconclusive);
        assert_eq!(r.verdict.order_reached, 5);
        assert!(hierarchy_scan(&small, 0, 1e-9).is_err());
        assert!(hierarchy_scan(&small, 3, 0.0).is_err());
    }

    #[test]
    fn scan_detects_tmsv_at_five() {
        let t = table(StateKind::Tmsv { xi: 0.5 }, 14);
        let r = hierarchy_scan(&t, 5, 1e-9).unwrap();
        assert!(r.verdict.is_npt());
        // [1, a, a†, b] already holds the d-type block, so D_4 is the first negative minor
        let w = r.verdict.witness.unwrap();
        assert_eq!(w.positions.len(), 4);
        assert!(w.value < 0.0);
        assert!(r.determinants[4].value < 0.0);
    }

    #[test]
    fn combinations_enumerate() {
        let mut s = vec![0, 1];
        let mut count = 1;
        while next_combination(&mut s, 5) {
            count += 1;
        }
        assert_eq!(count, 10);
        assert_eq!(s, vec![3, 4]);
    }

    #[test]
    fn minor_search_vacuum_clean() {
        let t = table(StateKind::Vacuum, 8);
        let pool = enumerate_indices(10);
        let r = principal_minor_search(&t, &pool, 4).unwrap();
        assert!(r.exhaustive);
        assert!(!r.verdict(1e-9).is_npt());
    }

    #[test]
    fn minor_search_is_deterministic_on_large_pools() {
        let t = table(StateKind::Tmsv { xi: 0.4 }, 10);
        let pool = enumerate_indices(15);
        let r1 = principal_minor_search(&t, &pool, 4).unwrap();
        let r2 = principal_minor_search(&t, &pool, 4).unwrap();
        assert!(!r1.exhaustive);
        assert_eq!(r1, r2);
        assert!(r1.verdict(1e-9).is_npt());
    }

    #[test]
    fn vacuum_named_values() {
        let t = table(StateKind::Vacuum, 8);
        assert!(simon_s(&t).unwrap().abs() < 1e-14);
        assert!(duan(&t, 1.0).unwrap().abs() < 1e-14);
        assert!(duan(&t, 0.0).is_err());
        for rep in named_criteria(&t, 1e-9).unwrap() {
            assert!(!rep.detected(), "{rep:?}");
        }
    }

    #[test]
    fn two_term_identical_terms_saturate() {
        let t = table(StateKind::Tmsv { xi: 0.5 }, 12);
        let u = MultiIndex::new(0, 1, 1, 0);
        assert!(two_term_condition(&t, &u, &u).unwrap().abs() < 1e-12);
    }

    #[test]
    fn two_term_a_b_detects_tmsv() {
        let xi: f64 = 0.5;
        let t = table(StateKind::Tmsv { xi }, 16);
        let v = two_term_condition(
            &t,
            &MultiIndex::new(0, 1, 0, 0),
            &MultiIndex::new(0, 0, 0, 1),
        )
        .unwrap();
        let (s, ch) = (xi.sinh(), xi.cosh());
        assert!((v - (s.powi(4) - s * s * ch * ch)).abs() < 1e-8);
    }

    #[test]
    fn entangled_coherent_s_witness() {
        let t = table(
            StateKind::EntangledCoherent {
                alpha: c(1.0, 0.0),
                beta: c(1.0, 0.0),
                sign: Sign::Minus,
            },
            16,
        );
        assert!(det_s(&t).unwrap() < -0.07);
    }
}
