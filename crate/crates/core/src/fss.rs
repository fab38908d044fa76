//! Fractional Scientific Strength: wage- and time-normalized, field-normalized,
//! fractionally counted citation impact per researcher.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::corpus::{Corpus, Gender, Researcher, WageTable};
use crate::credit::ShareSet;
use crate::error::{Error, Result};
use crate::impact::{normalized_impact, CitationBaseline};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FssScore<T> {
    pub researcher_id: String,
    pub field_code: String,
    pub gender: Gender,
    pub value: T,
    pub productive: bool,
}

impl<T: Scalar> FssScore<T> {
    pub fn new(researcher_id: &str, field_code: &str, gender: Gender, value: T) -> Self {
        Self {
            researcher_id: researcher_id.to_string(),
            field_code: field_code.to_string(),
            gender,
            value,
            productive: value > T::zero(),
        }
    }
}

/// `FSS = 1/w * 1/t * sum_i (c_i / c_bar) * f_i` over the researcher's
/// publications in the window, where `w` is the wage of their rank, `t` their
/// active years, and `f_i` their share of publication `i`.
pub fn compute_fss<T: Scalar>(
    researcher: &Researcher,
    corpus: &Corpus,
    shares: &ShareSet<T>,
    baselines: &CitationBaseline<T>,
    wages: &WageTable,
) -> Result<FssScore<T>> {
    let wage = wages
        .get(&researcher.rank)
        .ok_or_else(|| Error::Inconsistent(format!("no wage for rank `{}`", researcher.rank)))?;
    if !(wage > 0.0) {
        return Err(Error::NonPositiveWage {
            rank: researcher.rank.0.clone(),
            wage,
        });
    }
    if researcher.years_active == 0 {
        return Err(Error::InvalidInput(format!(
            "researcher `{}` has zero active years",
            researcher.id
        )));
    }

    let mut total = T::zero();
    for (publication, slot) in corpus.authored(&researcher.id) {
        if !corpus.window().contains(publication.year) {
            continue;
        }
        let vector = shares.get(&publication.id).ok_or_else(|| {
            Error::Inconsistent(format!(
                "no share vector for publication `{}`",
                publication.id
            ))
        })?;
        let share = *vector.shares.get(slot).ok_or_else(|| {
            Error::Inconsistent(format!(
                "share vector of `{}` has no slot {slot}",
                publication.id
            ))
        })?;
        total = total + normalized_impact(publication, baselines)? * share;
    }

    let denominator = T::lit(wage) * T::from_u64_exact(u64::from(researcher.years_active));
    let value = total / denominator;
    if !value.is_finite() {
        return Err(Error::Inconsistent(format!(
            "non-finite FSS for researcher `{}`",
            researcher.id
        )));
    }
    Ok(FssScore::new(
        &researcher.id,
        &researcher.field_code,
        researcher.gender,
        value,
    ))
}

/// Scores of every researcher, grouped by field and ordered by researcher id.
/// Fields without researchers do not appear.
pub fn compute_all_fss<T: Scalar>(
    corpus: &Corpus,
    shares: &ShareSet<T>,
    baselines: &CitationBaseline<T>,
    wages: &WageTable,
) -> Result<BTreeMap<String, Vec<FssScore<T>>>> {
    let mut by_field: BTreeMap<String, Vec<FssScore<T>>> = BTreeMap::new();
    for researcher in corpus.researchers() {
        let score = compute_fss(researcher, corpus, shares, baselines, wages)?;
        by_field
            .entry(researcher.field_code.clone())
            .or_default()
            .push(score);
    }
    for scores in by_field.values_mut() {
        scores.sort_by(|a, b| a.researcher_id.cmp(&b.researcher_id));
    }
    Ok(by_field)
}
