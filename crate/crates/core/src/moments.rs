//! Normally ordered moments `⟨a†ⁿaᵐb†ᵏbˡ⟩` and their partial-transpose images.
//!
//! A [`MomentTable`] is the single moment source for every criterion. It is
//! backed either by a simulated [`FockState`], by a table of measured values
//! imported from JSON, or by any user-supplied [`MomentSource`]. Values are
//! memoized; concurrent readers may race to fill the same entry, which is
//! harmless because every source is deterministic.
//!
//! Partial transposition acts on normally ordered moments as the swap of the
//! `b` exponents: `⟨a†ⁿaᵐb†ᵏbˡ⟩^PT = ⟨a†ⁿaᵐb†ˡbᵏ⟩`.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::{self, SCHEMA_VERSION};
use crate::opalg::{indices_of_degree, MultiIndex, NormalPolynomial, MAX_DEGREE};
use crate::states::FockState;

/// Anything that can supply raw normally ordered moments.
pub trait MomentSource: Send + Sync {
    fn moment(&self, u: &MultiIndex) -> Result<Complex64>;

    /// Largest total degree whose moments are trustworthy.
    fn max_degree(&self) -> u32;

    fn describe(&self) -> String;
}

/// Moments traced against a truncated density matrix.
pub struct FockSource {
    state: Arc<FockState>,
}

impl FockSource {
    pub fn new(state: Arc<FockState>) -> Self {
        FockSource { state }
    }
}

impl MomentSource for FockSource {
    fn moment(&self, u: &MultiIndex) -> Result<Complex64> {
        Ok(self.state.monomial_trace(u))
    }

    // one level of reserve on top of the `min(Da, Db) - 1` reach of a monomial
    fn max_degree(&self) -> u32 {
        let (da, db) = self.state.dims();
        (da.min(db) as u32).saturating_sub(2)
    }

    fn describe(&self) -> String {
        self.state.to_string()
    }
}

/// One record of the moment interchange format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRecord {
    pub index: MultiIndex,
    #[serde(with = "json::complex")]
    pub value: Complex64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MomentDocument {
    Bare(Vec<MomentRecord>),
    Wrapped { moments: Vec<MomentRecord> },
}

/// Measured (or otherwise externally supplied) moments, treated as exact.
pub struct ImportedMoments {
    values: HashMap<MultiIndex, Complex64>,
    max_degree: u32,
}

impl ImportedMoments {
    pub fn new(records: impl IntoIterator<Item = (MultiIndex, Complex64)>) -> Result<Self> {
        let mut values: HashMap<MultiIndex, Complex64> = HashMap::new();
        for (u, v) in records {
            if let Some(prev) = values.insert(u, v) {
                if prev != v {
                    return Err(Error::Parse(format!(
                        "moment {u} given twice with different values"
                    )));
                }
            }
        }
        match values.get(&MultiIndex::IDENTITY) {
            None => {
                values.insert(MultiIndex::IDENTITY, Complex64::new(1.0, 0.0));
            }
            Some(v) if (v - Complex64::new(1.0, 0.0)).norm() > 1e-10 => {
                return Err(Error::Parse(format!(
                    "normalization moment is {v}, expected 1"
                )));
            }
            Some(_) => {}
        }
        let covered = |u: &MultiIndex| values.contains_key(u) || values.contains_key(&u.adjoint());
        let mut max_degree = 0;
        for d in 1..=MAX_DEGREE {
            if indices_of_degree(d).iter().all(covered) {
                max_degree = d;
            } else {
                break;
            }
        }
        Ok(ImportedMoments { values, max_degree })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let records = match serde_json::from_str::<MomentDocument>(text)? {
            MomentDocument::Bare(r) | MomentDocument::Wrapped { moments: r } => r,
        };
        Self::new(records.into_iter().map(|r| (r.index, r.value)))
    }
}

impl MomentSource for ImportedMoments {
    fn moment(&self, u: &MultiIndex) -> Result<Complex64> {
        if let Some(v) = self.values.get(u) {
            return Ok(*v);
        }
        self.values
            .get(&u.adjoint())
            .map(|v| v.conj())
            .ok_or(Error::MissingMoment(*u))
    }

    fn max_degree(&self) -> u32 {
        self.max_degree
    }

    fn describe(&self) -> String {
        format!(
            "imported moments ({} entries, complete to degree {})",
            self.values.len(),
            self.max_degree
        )
    }
}

pub struct MomentTable {
    source: Arc<dyn MomentSource>,
    state: Option<Arc<FockState>>,
    cache: Option<RwLock<HashMap<MultiIndex, Complex64>>>,
}

impl MomentTable {
    pub fn from_state(state: FockState) -> Self {
        Self::from_shared_state(Arc::new(state))
    }

    pub fn from_shared_state(state: Arc<FockState>) -> Self {
        MomentTable {
            source: Arc::new(FockSource::new(state.clone())),
            state: Some(state),
            cache: Some(RwLock::default()),
        }
    }

    pub fn from_source(source: Arc<dyn MomentSource>) -> Self {
        MomentTable {
            source,
            state: None,
            cache: Some(RwLock::default()),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(Self::from_source(Arc::new(ImportedMoments::from_json(
            text,
        )?)))
    }

    /// Disable memoization; results must not change.
    pub fn without_cache(mut self) -> Self {
        self.cache = None;
        self
    }

    /// The simulated state behind the table, if there is one.
    pub fn state(&self) -> Option<&Arc<FockState>> {
        self.state.as_ref()
    }

    pub fn max_degree(&self) -> u32 {
        self.source.max_degree()
    }

    pub fn describe(&self) -> String {
        self.source.describe()
    }

    pub fn moment(&self, u: &MultiIndex) -> Result<Complex64> {
        let max_degree = self.max_degree();
        if u.degree() > max_degree {
            return Err(Error::MomentDegree {
                index: *u,
                degree: u.degree(),
                max_degree,
            });
        }
        let Some(cache) = &self.cache else {
            return self.source.moment(u);
        };
        if let Some(v) = cache.read().expect("moment cache poisoned").get(u) {
            return Ok(*v);
        }
        let v = self.source.moment(u)?;
        Ok(*cache
            .write()
            .expect("moment cache poisoned")
            .entry(*u)
            .or_insert(v))
    }

    /// Moment of the partially transposed state.
    pub fn pt_moment(&self, u: &MultiIndex) -> Result<Complex64> {
        self.moment(&u.pt())
    }

    /// `⟨p⟩` of the state itself.
    pub fn eval(&self, p: &NormalPolynomial) -> Result<Complex64> {
        p.terms().map(|(u, c)| Ok(c * self.moment(u)?)).sum()
    }

    /// `⟨p⟩^PT`, the expectation of `p` in the partially transposed state.
    pub fn eval_pt(&self, p: &NormalPolynomial) -> Result<Complex64> {
        p.terms().map(|(u, c)| Ok(c * self.pt_moment(u)?)).sum()
    }

    pub fn records(&self, indices: &[MultiIndex]) -> Result<Vec<MomentRecord>> {
        indices
            .iter()
            .map(|u| {
                Ok(MomentRecord {
                    index: *u,
                    value: self.moment(u)?,
                })
            })
            .collect()
    }

    /// Export in the interchange format `{"version", "moments": [{index, value}]}`.
    pub fn to_json(&self, indices: &[MultiIndex]) -> Result<String> {
        let doc = serde_json::json!({
            "version": SCHEMA_VERSION,
            "moments": self.records(indices)?,
        });
        Ok(serde_json::to_string_pretty(&doc)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::indices_up_to_degree;
    use crate::states::{build, StateKind, StateSpec};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn table(kind: StateKind, d: usize) -> MomentTable {
        MomentTable::from_state(build(&StateSpec::new(kind, (d, d))).unwrap())
    }

    #[test]
    fn vacuum_moments() {
        let t = table(StateKind::Vacuum, 6);
        assert_eq!(t.max_degree(), 4);
        for u in indices_up_to_degree(4) {
            let want = if u == MultiIndex::IDENTITY { 1.0 } else { 0.0 };
            assert!((t.moment(&u).unwrap() - c(want, 0.0)).norm() < 1e-14);
        }
        assert!(matches!(
            t.moment(&MultiIndex::new(5, 0, 0, 0)),
            Err(Error::MomentDegree { degree: 5, .. })
        ));
    }

    #[test]
    fn coherent_product_moment() {
        let (alpha, beta) = (c(0.6, -0.3), c(0.2, 0.5));
        let t = table(StateKind::CoherentProduct { alpha, beta }, 16);
        let got = t.moment(&MultiIndex::new(1, 1, 1, 1)).unwrap();
        let want = alpha.norm_sqr() * beta.norm_sqr();
        assert!((got - c(want, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn pt_moment_swaps_b() {
        let t = table(
            StateKind::CoherentProduct {
                alpha: c(0.3, 0.0),
                beta: c(0.4, 0.7),
            },
            12,
        );
        let b = MultiIndex::new(0, 0, 0, 1);
        let bd = MultiIndex::new(0, 0, 1, 0);
        assert_eq!(t.pt_moment(&b).unwrap(), t.moment(&bd).unwrap());
        let sym = MultiIndex::new(1, 2, 1, 1);
        assert_eq!(t.pt_moment(&sym).unwrap(), t.moment(&sym).unwrap());
    }

    #[test]
    fn cache_is_transparent() {
        let spec = StateSpec::new(StateKind::Tmsv { xi: 0.4 }, (10, 10));
        let cached = MomentTable::from_state(build(&spec).unwrap());
        let raw = MomentTable::from_state(build(&spec).unwrap()).without_cache();
        for u in indices_up_to_degree(4) {
            assert_eq!(cached.moment(&u).unwrap(), raw.moment(&u).unwrap());
            assert_eq!(cached.moment(&u).unwrap(), raw.moment(&u).unwrap());
        }
    }

    #[test]
    fn eval_pt_identity() {
        let t = table(StateKind::Tmsv { xi: 0.2 }, 8);
        assert!((t.eval_pt(&NormalPolynomial::one()).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn imported_round_trip_and_conjugates() {
        let t = table(
            StateKind::CoherentProduct {
                alpha: c(0.5, 0.2),
                beta: c(-0.3, 0.1),
            },
            12,
        );
        // export only one member of each adjoint pair
        let idx: Vec<_> = indices_up_to_degree(3)
            .into_iter()
            .filter(|u| *u <= u.adjoint())
            .collect();
        let text = t.to_json(&idx).unwrap();
        let imported = MomentTable::from_json(&text).unwrap();
        assert_eq!(imported.max_degree(), 3);
        for u in indices_up_to_degree(3) {
            assert!((imported.moment(&u).unwrap() - t.moment(&u).unwrap()).norm() < 1e-15);
        }
        assert!(imported.moment(&MultiIndex::new(4, 0, 0, 0)).is_err());
        assert!(imported.state().is_none());
    }

    #[test]
    fn imported_bare_list_and_bad_normalization() {
        let bare = r#"[{"index":[0,1,0,0],"value":[0.5,0]},{"index":[0,0,0,1],"value":0.25}]"#;
        let t = MomentTable::from_json(bare).unwrap();
        assert_eq!(t.max_degree(), 1);
        assert_eq!(t.moment(&MultiIndex::new(1, 0, 0, 0)).unwrap(), c(0.5, 0.0));
        let bad = r#"[{"index":[0,0,0,0],"value":[2,0]}]"#;
        assert!(MomentTable::from_json(bad).is_err());
    }
}
