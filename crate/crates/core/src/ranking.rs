//! Pooled and gender-stratified ranking lists, percentile rank shifts and
//! their classification.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::corpus::Gender;
use crate::error::{Error, Result};
use crate::fss::FssScore;
use crate::scalar::Scalar;
use crate::stats::descriptive::{mean, median_sorted, sample_stdev};

/// Percentiles on a 0 (worst) to 100 (best) scale.
///
/// Each value gets `100 * (R - 1) / (n - 1)` where `R` is its 1-based
/// ascending rank, averaged over tied values (midrank).
pub fn percentile_ranks<T: Scalar>(scores: &[T]) -> Result<Vec<T>> {
    let n = scores.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "percentiles need at least 2 scores, got {n}"
        )));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidInput("percentiles need finite scores".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap_or(Ordering::Equal));

    let hundred = T::lit(100.0);
    let denominator = T::from_count(2 * (n - 1));
    let mut out = vec![T::zero(); n];
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end + 1 < n && scores[order[end + 1]] == scores[order[start]] {
            end += 1;
        }
        // Midrank of positions start..=end (0-based) is (start + end) / 2 + 1,
        // so 2 * (R - 1) = start + end, kept integral until the final division.
        let value = hundred * T::from_count(start + end) / denominator;
        for &idx in &order[start..=end] {
            out[idx] = value;
        }
        start = end + 1;
    }
    Ok(out)
}

/// How the gender-normalized list is turned into percentiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum StratifiedRanking {
    /// All field members ranked together on their gender-normalized ratio.
    #[default]
    Merged,
    /// Each gender ranked separately on its own ratio.
    WithinGender,
}

impl StratifiedRanking {
    pub fn as_str(self) -> &'static str {
        match self {
            StratifiedRanking::Merged => "merged",
            StratifiedRanking::WithinGender => "within_gender",
        }
    }
}

impl std::str::FromStr for StratifiedRanking {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "merged" => Ok(StratifiedRanking::Merged),
            "within_gender" => Ok(StratifiedRanking::WithinGender),
            other => Err(format!("expected merged or within_gender, got `{other}`")),
        }
    }
}

/// A researcher's FSS relative to the productive field mean, pooled and per gender.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceRatio<T> {
    pub researcher_id: String,
    pub field_code: String,
    pub gender: Gender,
    pub fss: T,
    pub ratio_pooled: T,
    pub ratio_gender: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankEntry<T> {
    pub researcher_id: String,
    pub field_code: String,
    pub gender: Gender,
    pub fss: T,
    pub ratio_pooled: T,
    pub ratio_gender: T,
    pub percentile_pooled: T,
    pub percentile_gender: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankShift<T> {
    pub researcher_id: String,
    pub field_code: String,
    pub gender: Gender,
    /// Gender-stratified percentile minus pooled percentile.
    pub shift: T,
}

fn productive_mean<'a, T: Scalar>(values: impl Iterator<Item = &'a T>) -> Option<T> {
    let productive: Vec<T> = values.copied().filter(|v| *v > T::zero()).collect();
    (!productive.is_empty()).then(|| mean(&productive))
}

/// Ratios of each member's FSS to the mean over productive members of the
/// field (pooled) and of their own gender. Unproductive members get 0.
///
/// Fails with [`Error::Degenerate`] when either gender has no productive member.
pub fn distance_ratios<T: Scalar>(scores: &[FssScore<T>]) -> Result<Vec<DistanceRatio<T>>> {
    let field = scores.first().map_or("<empty>", |s| s.field_code.as_str());
    let pooled = productive_mean(scores.iter().map(|s| &s.value))
        .ok_or_else(|| Error::Degenerate(format!("field {field}: no productive members")))?;
    let mut by_gender = BTreeMap::new();
    for g in Gender::BOTH {
        let m = productive_mean(scores.iter().filter(|s| s.gender == g).map(|s| &s.value))
            .ok_or_else(|| {
                Error::Degenerate(format!(
                    "field {field}: no productive {g} members, gender ratios undefined"
                ))
            })?;
        by_gender.insert(g, m);
    }
    Ok(scores
        .iter()
        .map(|s| DistanceRatio {
            researcher_id: s.researcher_id.clone(),
            field_code: s.field_code.clone(),
            gender: s.gender,
            fss: s.value,
            ratio_pooled: s.value / pooled,
            ratio_gender: s.value / by_gender[&s.gender],
        })
        .collect())
}

/// Percentiles under both lists for one field. Needs at least two members of each gender.
pub fn rank_field<T: Scalar>(
    ratios: &[DistanceRatio<T>],
    variant: StratifiedRanking,
) -> Result<Vec<RankEntry<T>>> {
    let field = ratios.first().map_or("<empty>", |r| r.field_code.as_str());
    for g in Gender::BOTH {
        let count = ratios.iter().filter(|r| r.gender == g).count();
        if count < 2 {
            return Err(Error::Degenerate(format!(
                "field {field}: {count} {g} member(s), need at least 2"
            )));
        }
    }

    let pooled: Vec<T> = ratios.iter().map(|r| r.ratio_pooled).collect();
    let percentile_pooled = percentile_ranks(&pooled)?;

    let percentile_gender = match variant {
        StratifiedRanking::Merged => {
            let gender: Vec<T> = ratios.iter().map(|r| r.ratio_gender).collect();
            percentile_ranks(&gender)?
        }
        StratifiedRanking::WithinGender => {
            let mut out = vec![T::zero(); ratios.len()];
            for g in Gender::BOTH {
                let idx: Vec<usize> = (0..ratios.len())
                    .filter(|&i| ratios[i].gender == g)
                    .collect();
                let values: Vec<T> = idx.iter().map(|&i| ratios[i].ratio_gender).collect();
                for (i, p) in idx.into_iter().zip(percentile_ranks(&values)?) {
                    out[i] = p;
                }
            }
            out
        }
    };

    Ok(ratios
        .iter()
        .zip(percentile_pooled)
        .zip(percentile_gender)
        .map(|((r, pp), pg)| RankEntry {
            researcher_id: r.researcher_id.clone(),
            field_code: r.field_code.clone(),
            gender: r.gender,
            fss: r.fss,
            ratio_pooled: r.ratio_pooled,
            ratio_gender: r.ratio_gender,
            percentile_pooled: pp,
            percentile_gender: pg,
        })
        .collect())
}

pub fn rank_shifts<T: Scalar>(entries: &[RankEntry<T>]) -> Vec<RankShift<T>> {
    entries
        .iter()
        .map(|e| RankShift {
            researcher_id: e.researcher_id.clone(),
            field_code: e.field_code.clone(),
            gender: e.gender,
            shift: e.percentile_gender - e.percentile_pooled,
        })
        .collect()
}

/// Bins of mean percentile shift, with half-open boundaries at -8, -4, 0, +4, +8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ShiftClass {
    /// < -8
    Cl1,
    /// [-8, -4)
    Cl2,
    /// [-4, 0)
    Cl3,
    /// [0, +4)
    Cl4,
    /// [+4, +8)
    Cl5,
    /// >= +8
    Cl6,
}

impl ShiftClass {
    pub const ALL: [ShiftClass; 6] = [
        ShiftClass::Cl1,
        ShiftClass::Cl2,
        ShiftClass::Cl3,
        ShiftClass::Cl4,
        ShiftClass::Cl5,
        ShiftClass::Cl6,
    ];

    pub fn classify<T: Scalar>(mean_shift: T) -> Result<Self> {
        if !mean_shift.is_finite() {
            return Err(Error::InvalidInput(format!(
                "cannot classify non-finite shift {mean_shift}"
            )));
        }
        let m = mean_shift.as_f64();
        Ok(if m < -8.0 {
            ShiftClass::Cl1
        } else if m < -4.0 {
            ShiftClass::Cl2
        } else if m < 0.0 {
            ShiftClass::Cl3
        } else if m < 4.0 {
            ShiftClass::Cl4
        } else if m < 8.0 {
            ShiftClass::Cl5
        } else {
            ShiftClass::Cl6
        })
    }

    pub fn label(self) -> &'static str {
        match self {
            ShiftClass::Cl1 => "Cl-1",
            ShiftClass::Cl2 => "Cl-2",
            ShiftClass::Cl3 => "Cl-3",
            ShiftClass::Cl4 => "Cl-4",
            ShiftClass::Cl5 => "Cl-5",
            ShiftClass::Cl6 => "Cl-6",
        }
    }
}

impl fmt::Display for ShiftClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldClass<T> {
    pub field_code: String,
    pub gender: Gender,
    pub members: usize,
    pub mean_shift: T,
    pub class: ShiftClass,
}

/// Mean shift of one gender within a field and its class.
pub fn classify_field_shifts<T: Scalar>(
    shifts: &[RankShift<T>],
    gender: Gender,
) -> Result<FieldClass<T>> {
    let values: Vec<T> = shifts
        .iter()
        .filter(|s| s.gender == gender)
        .map(|s| s.shift)
        .collect();
    let first = shifts
        .iter()
        .find(|s| s.gender == gender)
        .ok_or_else(|| Error::InvalidInput(format!("no {gender} shifts to classify")))?;
    let mean_shift = mean(&values);
    Ok(FieldClass {
        field_code: first.field_code.clone(),
        gender,
        members: values.len(),
        mean_shift,
        class: ShiftClass::classify(mean_shift)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftSummary<T> {
    pub group: String,
    pub gender: Gender,
    pub count: usize,
    pub mean: T,
    pub median: T,
    pub stdev: T,
    pub min: T,
    pub max: T,
}

/// Descriptive statistics of shifts per (group, gender). `group_of` maps a
/// shift to its group key, e.g. its field or that field's area. Sample
/// standard deviation; zero for single-member groups.
pub fn shift_summary<T: Scalar>(
    shifts: &[RankShift<T>],
    group_of: impl Fn(&RankShift<T>) -> String,
) -> Vec<ShiftSummary<T>> {
    let mut groups: BTreeMap<(String, Gender), Vec<T>> = BTreeMap::new();
    for s in shifts {
        groups
            .entry((group_of(s), s.gender))
            .or_default()
            .push(s.shift);
    }
    groups
        .into_iter()
        .map(|((group, gender), mut values)| {
            values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
            ShiftSummary {
                group,
                gender,
                count: values.len(),
                mean: mean(&values),
                median: median_sorted(&values),
                stdev: sample_stdev(&values),
                min: values[0],
                max: values[values.len() - 1],
            }
        })
        .collect()
}
