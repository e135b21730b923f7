//! Ranked citation lists and the classical scalar citation metrics.
//!
//! Ranks are 0-based throughout: `counts()[0]` is c_0, the most-cited
//! publication. Human-facing output may additionally show 1-based ranks, but
//! every formula in this crate uses the 0-based convention.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// An author's per-publication citation counts, validated and ranked
/// descending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CitationList {
    counts: Vec<u64>,
}

impl CitationList {
    /// Builds a list from known non-negative counts, sorting them descending.
    pub fn from_counts(mut counts: Vec<u64>) -> Self {
        counts.sort_unstable_by(|a, b| b.cmp(a));
        CitationList { counts }
    }

    /// Counts in decreasing order; `counts()[n]` is c_n.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of publications N.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// c_0, the top citation count (0 for an empty list).
    pub fn top(&self) -> u64 {
        self.counts.first().copied().unwrap_or(0)
    }
}

/// Classical scalar metrics derived from a [`CitationList`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    /// S, the sum of all counts.
    pub total: u64,
    /// c_0.
    pub top: u64,
    /// h-index.
    pub h: u64,
    pub i10: u64,
    pub i20: u64,
    /// i_1, the number of cited publications.
    pub cited_count: u64,
    /// Leading-digit occurrence counts over nonzero entries.
    pub digit_histogram: BTreeMap<u8, u64>,
}

/// Validates raw counts (any order) and returns them ranked descending.
///
/// Rejects negative entries, naming the first offending index.
pub fn make_citation_list(raw: &[i64]) -> Result<CitationList> {
    let mut counts = Vec::with_capacity(raw.len());
    for (index, &value) in raw.iter().enumerate() {
        if value < 0 {
            return Err(Error::NegativeCount { index, value });
        }
        counts.push(value as u64);
    }
    Ok(CitationList::from_counts(counts))
}

/// S, the total number of citations for the author.
pub fn total_citations(list: &CitationList) -> u64 {
    list.counts().iter().sum()
}

/// The h-index: the largest h such that h publications have at least h
/// citations each (the side of the biggest square under the curve).
pub fn h_index(list: &CitationList) -> u64 {
    list.counts()
        .iter()
        .enumerate()
        .take_while(|&(n, &c)| c >= n as u64 + 1)
        .count() as u64
}

/// The i_k-index: the number of publications with at least k citations.
pub fn i_index(list: &CitationList, k: u64) -> Result<u64> {
    if k == 0 {
        return Err(Error::Domain(
            "i_k requires k >= 1; every count is >= 0".into(),
        ));
    }
    Ok(list.counts().iter().take_while(|&&c| c >= k).count() as u64)
}

/// Tallies the leading decimal digit of every entry >= 1.
pub fn first_digit_histogram(list: &CitationList) -> BTreeMap<u8, u64> {
    let mut histogram = BTreeMap::new();
    for &count in list.counts() {
        if count == 0 {
            continue;
        }
        let mut d = count;
        while d >= 10 {
            d /= 10;
        }
        *histogram.entry(d as u8).or_insert(0) += 1;
    }
    histogram
}

/// Empirical cumulative density prob(C < threshold) over the list.
pub fn empirical_cdf(list: &CitationList, threshold: u64) -> Result<f64> {
    if list.is_empty() {
        return Err(Error::Degenerate("empirical CDF of an empty list".into()));
    }
    if threshold == 0 {
        return Ok(0.0);
    }
    let at_least = i_index(list, threshold)?;
    Ok(1.0 - at_least as f64 / list.len() as f64)
}

/// Assembles every scalar metric in one pass.
pub fn metrics_summary(list: &CitationList) -> MetricsSummary {
    MetricsSummary {
        total: total_citations(list),
        top: list.top(),
        h: h_index(list),
        i10: i_index(list, 10).expect("k = 10 is valid"),
        i20: i_index(list, 20).expect("k = 20 is valid"),
        cited_count: i_index(list, 1).expect("k = 1 is valid"),
        digit_histogram: first_digit_histogram(list),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn list(raw: &[i64]) -> CitationList {
        make_citation_list(raw).unwrap()
    }

    #[test]
    fn make_citation_list_sorts_descending() {
        assert_eq!(list(&[3, 9, 0, 9]).counts(), &[9, 9, 3, 0]);
        assert_eq!(list(&[]).counts(), &[] as &[u64]);
        assert_eq!(list(&[5]).counts(), &[5]);
    }

    #[test]
    fn make_citation_list_rejects_negatives_with_index() {
        let err = make_citation_list(&[3, -2, 5]).unwrap_err();
        assert_eq!(err, Error::NegativeCount { index: 1, value: -2 });
    }

    #[test]
    fn total_citations_cases() {
        assert_eq!(total_citations(&list(&[])), 0);
        assert_eq!(total_citations(&list(&[9, 9, 3, 0])), 21);
    }

    #[test]
    fn h_index_cases() {
        assert_eq!(h_index(&list(&[])), 0);
        assert_eq!(h_index(&list(&[3, 2, 2])), 2);
        assert_eq!(h_index(&list(&[10, 10, 10])), 3);
        assert_eq!(h_index(&list(&[0, 0])), 0);
    }

    // Largest h such that at least h entries are >= h, checked by exhaustion.
    fn h_brute(counts: &[u64]) -> u64 {
        (0..=counts.len() as u64)
            .filter(|&h| counts.iter().filter(|&&c| c >= h).count() as u64 >= h)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn h_index_matches_brute_force() {
        let cases: &[&[i64]] = &[
            &[3, 2, 2],
            &[10, 10, 10],
            &[1, 1, 1, 1],
            &[5, 4, 3, 2, 1, 0],
            &[100],
            &[2, 2, 2, 2, 2, 2, 2],
        ];
        for raw in cases {
            let l = list(raw);
            assert_eq!(h_index(&l), h_brute(l.counts()), "list {raw:?}");
        }
    }

    #[test]
    fn i_index_cases() {
        assert_eq!(i_index(&list(&[10, 10, 9]), 10).unwrap(), 2);
        assert_eq!(i_index(&list(&[5, 3, 0, 0]), 1).unwrap(), 2);
        assert_eq!(i_index(&list(&[]), 7).unwrap(), 0);
        assert!(matches!(
            i_index(&list(&[1, 2]), 0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn first_digit_histogram_cases() {
        let h = first_digit_histogram(&list(&[123, 99, 12, 7]));
        assert_eq!(h, BTreeMap::from([(1, 2), (7, 1), (9, 1)]));
        assert!(first_digit_histogram(&list(&[0, 0])).is_empty());
        let ones = first_digit_histogram(&list(&[1, 10, 100, 19]));
        assert_eq!(ones, BTreeMap::from([(1, 4)]));
    }

    #[test]
    fn empirical_cdf_cases() {
        let l = list(&[5, 3, 1, 0]);
        assert_eq!(empirical_cdf(&l, 0).unwrap(), 0.0);
        assert_eq!(empirical_cdf(&l, 1).unwrap(), 0.25);
        assert_eq!(empirical_cdf(&l, 4).unwrap(), 0.75);
        assert_eq!(empirical_cdf(&l, 6).unwrap(), 1.0);
        assert!(matches!(
            empirical_cdf(&list(&[]), 1),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn empirical_cdf_is_monotone_and_saturates() {
        let l = list(&[40, 17, 17, 3, 1, 0, 0]);
        let mut prev = 0.0;
        for threshold in 0..=41 {
            let p = empirical_cdf(&l, threshold).unwrap();
            assert!(p >= prev, "threshold {threshold}");
            prev = p;
        }
        assert_eq!(empirical_cdf(&l, 41).unwrap(), 1.0);
    }

    #[test]
    fn metrics_summary_assembles_consistently() {
        let l = list(&[25, 21, 12, 10, 9, 2, 0]);
        let m = metrics_summary(&l);
        assert_eq!(m.total, 79);
        assert_eq!(m.top, 25);
        assert_eq!(m.h, 5);
        assert_eq!(m.i10, 4);
        assert_eq!(m.i20, 2);
        assert_eq!(m.cited_count, 6);
        assert_eq!(m.digit_histogram.values().sum::<u64>(), 6);
    }
}
