//! Dempster-Shafer mass functions over finite frames of discernment.
//!
//! Subsets of a [`Frame`] are bitmasks over its ordered hypotheses, so every
//! subset has exactly one representation and intersection is a single `&`.
//! A [`MassFunction`] stores only its focal elements (strictly positive
//! weights on nonempty subsets).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Tolerance on `|sum - 1|` accepted when constructing a mass function.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Combination is refused once the conflict factor reaches `1 - TOTAL_CONFLICT_MARGIN`.
pub const TOTAL_CONFLICT_MARGIN: f64 = 1e-12;

/// Largest supported frame; subsets are `u64` bitmasks.
pub const MAX_HYPOTHESES: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DstError {
    #[error("frame of discernment must contain at least one hypothesis")]
    EmptyFrame,
    #[error("hypothesis `{0}` appears more than once in the frame")]
    DuplicateHypothesis(String),
    #[error("frame has {0} hypotheses, at most {MAX_HYPOTHESES} are supported")]
    FrameTooLarge(usize),
    #[error("unknown hypothesis `{0}`")]
    UnknownHypothesis(String),
    #[error("subset {0:#x} references hypotheses outside the frame")]
    SubsetOutOfFrame(u64),
    #[error("the empty set carries mass {0}")]
    EmptySetMass(f64),
    #[error("mass {weight} on subset {subset:#x} is negative or not finite")]
    InvalidWeight { subset: u64, weight: f64 },
    #[error("masses sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("mass functions are defined over different frames")]
    FrameMismatch,
    #[error("total conflict between sources (K = {0})")]
    TotalConflict(f64),
    #[error("no mass functions to combine")]
    EmptyInput,
}

impl DstError {
    /// Stable machine-readable error name.
    pub fn code(&self) -> &'static str {
        match self {
            DstError::EmptyFrame => "EmptyFrame",
            DstError::DuplicateHypothesis(_) => "DuplicateHypothesis",
            DstError::FrameTooLarge(_) => "FrameTooLarge",
            DstError::UnknownHypothesis(_) => "UnknownHypothesis",
            DstError::SubsetOutOfFrame(_) => "UnknownHypothesis",
            DstError::EmptySetMass(_) => "EmptySetMass",
            DstError::InvalidWeight { .. } => "InvalidWeight",
            DstError::NotNormalized(_) => "NotNormalized",
            DstError::FrameMismatch => "FrameMismatch",
            DstError::TotalConflict(_) => "TotalConflict",
            DstError::EmptyInput => "EmptyInput",
        }
    }
}

/// A subset of a frame, as a bitmask over the frame's hypothesis order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Subset(u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub const fn from_bits(bits: u64) -> Self {
        Subset(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub const fn singleton(index: usize) -> Self {
        Subset(1 << index)
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub const fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub const fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub const fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub const fn intersects(self, other: Subset) -> bool {
        self.0 & other.0 != 0
    }
}

/// Ordered set of mutually exclusive hypotheses.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Frame {
    hypotheses: Vec<String>,
}

impl Frame {
    pub fn new<I, S>(hypotheses: I) -> Result<Self, DstError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let hypotheses: Vec<String> = hypotheses.into_iter().map(Into::into).collect();
        if hypotheses.is_empty() {
            return Err(DstError::EmptyFrame);
        }
        if hypotheses.len() > MAX_HYPOTHESES {
            return Err(DstError::FrameTooLarge(hypotheses.len()));
        }
        for (i, h) in hypotheses.iter().enumerate() {
            if hypotheses[..i].contains(h) {
                return Err(DstError::DuplicateHypothesis(h.clone()));
            }
        }
        Ok(Frame { hypotheses })
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }

    pub fn hypotheses(&self) -> &[String] {
        &self.hypotheses
    }

    pub fn index_of(&self, hypothesis: &str) -> Option<usize> {
        self.hypotheses.iter().position(|h| h == hypothesis)
    }

    /// The whole frame, Θ.
    pub fn full(&self) -> Subset {
        if self.hypotheses.len() == MAX_HYPOTHESES {
            Subset(u64::MAX)
        } else {
            Subset((1u64 << self.hypotheses.len()) - 1)
        }
    }

    pub fn singleton(&self, hypothesis: &str) -> Result<Subset, DstError> {
        self.index_of(hypothesis)
            .map(Subset::singleton)
            .ok_or_else(|| DstError::UnknownHypothesis(hypothesis.to_string()))
    }

    pub fn subset<S: AsRef<str>>(&self, hypotheses: &[S]) -> Result<Subset, DstError> {
        hypotheses.iter().try_fold(Subset::EMPTY, |acc, h| {
            Ok(acc.union(self.singleton(h.as_ref())?))
        })
    }

    pub fn contains(&self, subset: Subset) -> bool {
        subset.is_subset_of(self.full())
    }

    /// Names of the hypotheses in `subset`, in frame order.
    pub fn names(&self, subset: Subset) -> Vec<&str> {
        self.hypotheses
            .iter()
            .enumerate()
            .filter(|(i, _)| subset.bits() >> i & 1 == 1)
            .map(|(_, h)| h.as_str())
            .collect()
    }

    fn check(&self, subset: Subset) -> Result<(), DstError> {
        if self.contains(subset) {
            Ok(())
        } else {
            Err(DstError::SubsetOutOfFrame(subset.bits()))
        }
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.hypotheses.join(","))
    }
}

/// Basic probability assignment over the power set of a frame.
#[derive(Debug, Clone, PartialEq)]
pub struct MassFunction {
    frame: Arc<Frame>,
    focal: BTreeMap<Subset, f64>,
}

impl MassFunction {
    /// Validates and builds a mass function. Repeated subsets accumulate,
    /// zero weights are dropped and the result is rescaled by its exact sum.
    pub fn new<I>(frame: Arc<Frame>, assignments: I) -> Result<Self, DstError>
    where
        I: IntoIterator<Item = (Subset, f64)>,
    {
        let mut focal = BTreeMap::new();
        for (subset, weight) in assignments {
            if !weight.is_finite() || weight < 0.0 {
                return Err(DstError::InvalidWeight {
                    subset: subset.bits(),
                    weight,
                });
            }
            frame.check(subset)?;
            if subset.is_empty() {
                if weight > 0.0 {
                    return Err(DstError::EmptySetMass(weight));
                }
                continue;
            }
            if weight > 0.0 {
                *focal.entry(subset).or_insert(0.0) += weight;
            }
        }
        let total: f64 = focal.values().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(DstError::NotNormalized(total));
        }
        if total != 1.0 {
            for w in focal.values_mut() {
                *w /= total;
            }
        }
        Ok(MassFunction { frame, focal })
    }

    /// Builds a mass function from hypothesis names, e.g. `[(&["N"], 0.7), (&["N", "F"], 0.3)]`.
    pub fn from_named<S: AsRef<str>>(
        frame: Arc<Frame>,
        assignments: &[(&[S], f64)],
    ) -> Result<Self, DstError> {
        let mut pairs = Vec::with_capacity(assignments.len());
        for (names, weight) in assignments {
            pairs.push((frame.subset(names)?, *weight));
        }
        Self::new(frame, pairs)
    }

    /// Total ignorance: all mass on Θ.
    pub fn vacuous(frame: Arc<Frame>) -> Self {
        let full = frame.full();
        MassFunction {
            frame,
            focal: BTreeMap::from([(full, 1.0)]),
        }
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    /// Mass assigned to exactly `subset` (0 for non-focal subsets).
    pub fn mass(&self, subset: Subset) -> f64 {
        self.focal.get(&subset).copied().unwrap_or(0.0)
    }

    pub fn singleton_mass(&self, hypothesis: &str) -> Result<f64, DstError> {
        Ok(self.mass(self.frame.singleton(hypothesis)?))
    }

    /// Focal elements in canonical (bitmask) order.
    pub fn focal_elements(&self) -> impl Iterator<Item = (Subset, f64)> + '_ {
        self.focal.iter().map(|(s, w)| (*s, *w))
    }

    pub fn total(&self) -> f64 {
        self.focal.values().sum()
    }

    pub fn is_vacuous(&self) -> bool {
        self.focal.len() == 1 && self.focal.contains_key(&self.frame.full())
    }

    pub fn is_bayesian(&self) -> bool {
        self.focal.keys().all(|s| s.len() == 1)
    }

    /// Bel(A): total mass of focal elements contained in `subset`.
    pub fn belief(&self, subset: Subset) -> Result<f64, DstError> {
        self.frame.check(subset)?;
        Ok(self
            .focal
            .iter()
            .filter(|(s, _)| s.is_subset_of(subset))
            .map(|(_, w)| w)
            .sum())
    }

    /// Pl(A): total mass of focal elements intersecting `subset`.
    pub fn plausibility(&self, subset: Subset) -> Result<f64, DstError> {
        self.frame.check(subset)?;
        Ok(self
            .focal
            .iter()
            .filter(|(s, _)| s.intersects(subset))
            .map(|(_, w)| w)
            .sum())
    }

    fn same_frame(&self, other: &MassFunction) -> Result<(), DstError> {
        if Arc::ptr_eq(&self.frame, &other.frame) || self.frame == other.frame {
            Ok(())
        } else {
            Err(DstError::FrameMismatch)
        }
    }
}

/// K: total product mass landing on empty intersections.
pub fn conflict_factor(m1: &MassFunction, m2: &MassFunction) -> Result<f64, DstError> {
    m1.same_frame(m2)?;
    let mut k = 0.0;
    for (x, wx) in m1.focal_elements() {
        for (y, wy) in m2.focal_elements() {
            if !x.intersects(y) {
                k += wx * wy;
            }
        }
    }
    Ok(k.min(1.0))
}

/// Dempster's rule of combination, `m1 ⊕ m2`.
///
/// The output is normalized by the computed sum of the non-conflicting
/// products rather than `1 - K`, so iterated fusion does not drift.
pub fn combine(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction, DstError> {
    m1.same_frame(m2)?;
    let mut conflict = 0.0;
    let mut joint: BTreeMap<Subset, f64> = BTreeMap::new();
    for (x, wx) in m1.focal_elements() {
        for (y, wy) in m2.focal_elements() {
            let z = x.intersection(y);
            if z.is_empty() {
                conflict += wx * wy;
            } else {
                *joint.entry(z).or_insert(0.0) += wx * wy;
            }
        }
    }
    let agreement: f64 = joint.values().sum();
    if conflict >= 1.0 - TOTAL_CONFLICT_MARGIN || agreement <= 0.0 {
        return Err(DstError::TotalConflict(conflict));
    }
    joint.retain(|_, w| {
        *w /= agreement;
        *w > 0.0
    });
    Ok(MassFunction {
        frame: Arc::clone(&m1.frame),
        focal: joint,
    })
}

/// Left fold of [`combine`] over all sources.
pub fn combine_all<'a, I>(masses: I) -> Result<MassFunction, DstError>
where
    I: IntoIterator<Item = &'a MassFunction>,
{
    let mut iter = masses.into_iter();
    let first = iter.next().ok_or(DstError::EmptyInput)?.clone();
    iter.try_fold(first, |acc, m| combine(&acc, m))
}
