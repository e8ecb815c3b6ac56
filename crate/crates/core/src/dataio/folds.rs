use rand::seq::SliceRandom;

use super::table::Table;
use crate::error::{Error, Result};
use crate::seed;

/// Assignment of every row to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    k: usize,
    assignment: Vec<usize>,
}

impl FoldPlan {
    /// A plan from an explicit assignment. Every fold must be non-empty.
    pub fn new(k: usize, assignment: Vec<usize>) -> Result<Self> {
        if k < 2 {
            return Err(Error::config(format!("k = {k} must be at least 2")));
        }
        let mut sizes = vec![0usize; k];
        for &f in &assignment {
            if f >= k {
                return Err(Error::config(format!(
                    "fold id {f} out of range for k = {k}"
                )));
            }
            sizes[f] += 1;
        }
        if sizes.contains(&0) {
            return Err(Error::config("every fold needs at least one row"));
        }
        Ok(FoldPlan { k, assignment })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn test_rows(&self, fold: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, &f)| f == fold)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Stratified `k`-fold plan: each class is shuffled with the seed and dealt
/// round-robin, the dealing cursor carrying over from positives to negatives
/// so fold sizes also differ by at most one.
pub fn stratified_folds(table: &Table, k: usize, seed: u64) -> Result<FoldPlan> {
    let n = table.n_rows();
    if k < 2 || k > n {
        return Err(Error::config(format!("k = {k} out of range [2, {n}]")));
    }
    let labels = table.labels();
    let mut positives: Vec<usize> = (0..n).filter(|&i| labels[i]).collect();
    let mut negatives: Vec<usize> = (0..n).filter(|&i| !labels[i]).collect();
    if positives.len() < k || negatives.len() < k {
        return Err(Error::data(format!(
            "a class has fewer than k = {k} rows ({} positive, {} negative)",
            positives.len(),
            negatives.len()
        )));
    }
    let mut rng = seed::stage_rng(seed, "folds", 0);
    positives.shuffle(&mut rng);
    negatives.shuffle(&mut rng);
    let mut assignment = vec![0; n];
    for (cursor, &row) in positives.iter().chain(&negatives).enumerate() {
        assignment[row] = cursor % k;
    }
    Ok(FoldPlan { k, assignment })
}

/// `(train, test)` where test holds the rows assigned to `fold`.
pub fn split(table: &Table, plan: &FoldPlan, fold: usize) -> Result<(Table, Table)> {
    if fold >= plan.k {
        return Err(Error::config(format!(
            "fold {fold} out of range for k = {}",
            plan.k
        )));
    }
    if plan.assignment.len() != table.n_rows() {
        return Err(Error::data("fold plan does not match the table"));
    }
    let (test, train): (Vec<usize>, Vec<usize>) =
        (0..table.n_rows()).partition(|&i| plan.assignment[i] == fold);
    Ok((table.select_rows(&train), table.select_rows(&test)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::{Column, ColumnSchema, Schema};
    use proptest::prelude::*;

    fn table(pos: usize, neg: usize) -> Table {
        let schema = Schema::new(vec![
            ColumnSchema::numeric("x"),
            ColumnSchema::label("y", "p"),
        ])
        .unwrap();
        let n = pos + neg;
        let y = (0..n)
            .map(|i| if i < pos { "p" } else { "n" }.to_string())
            .collect();
        Table::new(
            schema,
            vec![
                Column::Numeric((0..n).map(|i| i as f64).collect()),
                Column::Categorical(y),
            ],
            "n",
        )
        .unwrap()
    }

    fn positives_per_fold(t: &Table, plan: &FoldPlan) -> Vec<usize> {
        let labels = t.labels();
        let mut counts = vec![0; plan.k()];
        for (i, &f) in plan.assignment().iter().enumerate() {
            if labels[i] {
                counts[f] += 1;
            }
        }
        counts
    }

    #[test]
    fn hundred_rows_ten_folds() {
        let t = table(64, 36);
        let plan = stratified_folds(&t, 10, 1).unwrap();
        for f in 0..10 {
            assert_eq!(plan.test_rows(f).len(), 10);
        }
        for c in positives_per_fold(&t, &plan) {
            assert!(c == 6 || c == 7);
        }
    }

    #[test]
    fn rejects_bad_k() {
        let t = table(20, 20);
        assert!(stratified_folds(&t, 1, 0).is_err());
        assert!(stratified_folds(&t, 41, 0).is_err());
        assert!(stratified_folds(&table(3, 20), 5, 0).is_err());
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let t = table(30, 20);
        assert_eq!(
            stratified_folds(&t, 5, 9).unwrap(),
            stratified_folds(&t, 5, 9).unwrap()
        );
        assert_ne!(
            stratified_folds(&t, 5, 9).unwrap(),
            stratified_folds(&t, 5, 10).unwrap()
        );
    }

    #[test]
    fn split_sizes_and_range() {
        let t = table(5, 5);
        let plan = FoldPlan::new(10, (0..10).collect()).unwrap();
        let (train, test) = split(&t, &plan, 3).unwrap();
        assert_eq!((train.n_rows(), test.n_rows()), (9, 1));
        assert!(split(&t, &plan, 10).is_err());
        assert!(FoldPlan::new(3, vec![0, 1, 1]).is_err());
        assert!(FoldPlan::new(2, vec![0, 2]).is_err());
    }

    proptest! {
        #[test]
        fn folds_partition_and_stratify(pos in 2usize..60, neg in 2usize..60, k in 2usize..10, seed in any::<u64>()) {
            prop_assume!(pos >= k && neg >= k);
            let t = table(pos, neg);
            let plan = stratified_folds(&t, k, seed).unwrap();
            let mut seen = vec![0usize; t.n_rows()];
            for f in 0..k {
                let (train, test) = split(&t, &plan, f).unwrap();
                prop_assert_eq!(train.n_rows() + test.n_rows(), t.n_rows());
                for o in test.origin() {
                    seen[o.unwrap()] += 1;
                }
            }
            prop_assert!(seen.iter().all(|&c| c == 1));
            let counts = positives_per_fold(&t, &plan);
            let spread = counts.iter().max().unwrap() - counts.iter().min().unwrap();
            prop_assert!(spread <= 1);
        }
    }
}
