use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Rank 1 goes to the largest weight; exact ties fall to the smaller name.
pub fn rank_attributes(weights: &BTreeMap<String, f64>) -> Result<BTreeMap<String, usize>> {
    if weights.is_empty() {
        return Err(Error::data("no weights to rank"));
    }
    let mut order: Vec<(&String, f64)> = weights.iter().map(|(k, &v)| (k, v)).collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    Ok(order
        .into_iter()
        .enumerate()
        .map(|(i, (name, _))| (name.clone(), i + 1))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankSummary {
    pub mean_rank: BTreeMap<String, f64>,
    pub overall_rank: BTreeMap<String, usize>,
}

/// Mean of each attribute's per-algorithm ranks, then overall ranks by
/// ascending mean (ties to the smaller name). Rank sums are compared as
/// integers so equal means tie exactly.
pub fn aggregate_ranks(ranks: &BTreeMap<String, Vec<usize>>) -> Result<RankSummary> {
    let width = ranks
        .values()
        .next()
        .map(Vec::len)
        .ok_or_else(|| Error::data("empty rank matrix"))?;
    if width == 0 || ranks.values().any(|r| r.len() != width) {
        return Err(Error::data("ragged rank matrix"));
    }
    let mut sums: Vec<(&String, usize)> = ranks.iter().map(|(k, r)| (k, r.iter().sum())).collect();
    let mean_rank = sums
        .iter()
        .map(|(k, s)| ((*k).clone(), *s as f64 / width as f64))
        .collect();
    sums.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(b.0)));
    let overall_rank = sums
        .into_iter()
        .enumerate()
        .map(|(i, (k, _))| (k.clone(), i + 1))
        .collect();
    Ok(RankSummary {
        mean_rank,
        overall_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn map(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn ranks_by_descending_weight() {
        let r = rank_attributes(&map(&[("a", 0.5), ("b", 0.2), ("c", 0.9)])).unwrap();
        assert_eq!((r["c"], r["a"], r["b"]), (1, 2, 3));
    }

    #[test]
    fn ties_break_by_name() {
        let r = rank_attributes(&map(&[("b", 0.3), ("a", 0.3)])).unwrap();
        assert_eq!((r["a"], r["b"]), (1, 2));
        assert!(rank_attributes(&BTreeMap::new()).is_err());
    }

    #[test]
    fn constant_row_means_itself() {
        let ranks: BTreeMap<String, Vec<usize>> =
            [("a".to_string(), vec![2; 6]), ("b".to_string(), vec![1; 6])].into();
        let s = aggregate_ranks(&ranks).unwrap();
        assert_eq!(s.mean_rank["a"], 2.0);
        assert_eq!(s.overall_rank["b"], 1);
    }

    #[test]
    fn ragged_matrix_is_rejected() {
        let ranks: BTreeMap<String, Vec<usize>> =
            [("a".to_string(), vec![1, 2]), ("b".to_string(), vec![2])].into();
        assert!(aggregate_ranks(&ranks).is_err());
    }

    proptest! {
        #[test]
        fn ranks_survive_increasing_transforms(ws in proptest::collection::vec(-5.0f64..5.0, 1..12)) {
            let weights: BTreeMap<String, f64> =
                ws.iter().enumerate().map(|(i, &w)| (format!("f{i:02}"), w)).collect();
            let shifted: BTreeMap<String, f64> =
                weights.iter().map(|(k, &w)| (k.clone(), w.exp() * 3.0 + 1.0)).collect();
            let r = rank_attributes(&weights).unwrap();
            prop_assert_eq!(&r, &rank_attributes(&shifted).unwrap());
            let mut seen: Vec<usize> = r.values().copied().collect();
            seen.sort_unstable();
            prop_assert_eq!(seen, (1..=ws.len()).collect::<Vec<_>>());
        }
    }
}
