//! Result records shared by the weight checks, the fitter and the verifiers.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionTag {
    Delta2,
    Bp,
    B1,
    Quasiconcave,
    Admissible,
    NonDegenerate,
    QuasinormSufficient,
}

/// Outcome of a "for some C" condition on the truncated domain.
///
/// `best_constant` is the extremal ratio over the grid. `boundary_attained`
/// is set when the sup over the whole grid exceeds the sup over the interior
/// (a decade in from each end) by more than 1%, which is how a condition that
/// fails in the continuum shows up on a finite grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: ConditionTag,
    pub holds: bool,
    #[serde(with = "crate::extreal")]
    pub best_constant: f64,
    #[serde(with = "crate::extreal::vec")]
    pub witness_t: Vec<f64>,
    pub boundary_attained: bool,
}

/// Relative excess of the full-grid sup over the interior sup that counts as boundary attainment.
pub const BOUNDARY_EXCESS: f64 = 1.01;

impl ConditionReport {
    /// Builds a report from `(t, ratio)` samples: the constant is the max ratio,
    /// `interior` picks the samples that count as interior.
    pub fn from_samples<I>(tag: ConditionTag, samples: I, interior: impl Fn(f64) -> bool) -> Self
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut best = (f64::NAN, 0.0_f64);
        let mut inner = 0.0_f64;
        for (t, r) in samples {
            if r.is_nan() {
                continue;
            }
            if best.0.is_nan() || r > best.1 {
                best = (t, r);
            }
            if interior(t) {
                inner = inner.max(r);
            }
        }
        let boundary = best.1 > BOUNDARY_EXCESS * inner;
        ConditionReport {
            condition: tag,
            holds: best.1.is_finite() && !boundary,
            best_constant: best.1,
            witness_t: if best.0.is_nan() { Vec::new() } else { vec![best.0] },
            boundary_attained: boundary,
        }
    }
}

/// Empirical two-sided constants `lower ≤ A/B ≤ upper` over a sample set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivReport {
    #[serde(with = "crate::extreal")]
    pub lower: f64,
    #[serde(with = "crate::extreal")]
    pub upper: f64,
    pub lower_witness: String,
    pub upper_witness: String,
    pub samples: usize,
    pub flags: Vec<String>,
}

impl EquivReport {
    /// Min and max of the ratios `a/b`. Pairs with `a = b = 0` or both infinite are skipped.
    pub fn from_pairs<I, L>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (f64, f64, L)>,
        L: Into<String>,
    {
        let mut rep = EquivReport {
            lower: f64::INFINITY,
            upper: 0.0,
            lower_witness: String::new(),
            upper_witness: String::new(),
            samples: 0,
            flags: Vec::new(),
        };
        let mut skipped = 0usize;
        for (a, b, label) in pairs {
            let r = a / b;
            if r.is_nan() {
                skipped += 1;
                continue;
            }
            let label = label.into();
            rep.samples += 1;
            if r < rep.lower {
                rep.lower = r;
                rep.lower_witness = label.clone();
            }
            if r > rep.upper {
                rep.upper = r;
                rep.upper_witness = label;
            }
        }
        if skipped > 0 {
            rep.flags.push(format!("skipped_indeterminate:{skipped}"));
        }
        if rep.samples == 0 {
            rep.lower = 0.0;
        }
        rep
    }

    pub fn flag(&mut self, f: impl Into<String>) {
        let f = f.into();
        if !self.flags.contains(&f) {
            self.flags.push(f);
        }
    }

    /// Both constants lie in `[lo, hi]`.
    pub fn within(&self, lo: f64, hi: f64) -> bool {
        self.samples > 0 && self.lower >= lo && self.upper <= hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn condition_report_json_fields() {
        let r = ConditionReport::from_samples(ConditionTag::Delta2, vec![(1.0, 2.0), (2.0, f64::INFINITY)], |t| {
            t < 1.5
        });
        assert!(!r.holds);
        assert!(r.boundary_attained);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(
            s,
            r#"{"condition":"delta2","holds":false,"best_constant":"inf","witness_t":[2.0],"boundary_attained":true}"#
        );
        let back: ConditionReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn equiv_report_skips_indeterminate() {
        let r = EquivReport::from_pairs(vec![(1.0, 2.0, "a"), (0.0, 0.0, "b"), (3.0, 2.0, "c")]);
        assert_eq!(r.samples, 2);
        assert_eq!((r.lower, r.upper), (0.5, 1.5));
        assert_eq!(r.upper_witness, "c");
        assert_eq!(r.flags, vec!["skipped_indeterminate:1".to_string()]);
    }
}
