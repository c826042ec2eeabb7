//! Exhaustive check of the grouping accuracy scorer on every pair of
//! partitions of up to six messages.

use ustep_core::eval::{grouping_accuracy, parsing_accuracy, LabeledRecord};
use ustep_core::TemplateId;

/// All set partitions of `n` items as restricted growth strings.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn grow(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let next = prefix.iter().max().map_or(0, |m| m + 1);
        for label in 0..=next {
            prefix.push(label);
            grow(prefix, n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::new(), n, &mut out);
    out
}

/// Direct reading of the definition: a truth group is correct when all its
/// messages share a prediction and nothing outside it has that prediction.
fn oracle(truth: &[usize], predicted: &[usize]) -> f64 {
    let n = truth.len();
    let mut correct = 0;
    for i in 0..n {
        let same_truth: Vec<usize> = (0..n).filter(|&j| truth[j] == truth[i]).collect();
        let same_pred: Vec<usize> = (0..n).filter(|&j| predicted[j] == predicted[i]).collect();
        if same_truth == same_pred {
            correct += 1;
        }
    }
    correct as f64 / n as f64
}

fn records(truth: &[usize]) -> Vec<LabeledRecord> {
    truth
        .iter()
        .enumerate()
        .map(|(i, t)| LabeledRecord {
            line_id: i as u64 + 1,
            content: String::new(),
            event_id: format!("E{t}"),
            event_template: None,
        })
        .collect()
}

#[test]
fn scorer_matches_definition_exhaustively() {
    for n in 1..=6 {
        let all = partitions(n);
        for truth in &all {
            let recs = records(truth);
            for predicted in &all {
                let expected = oracle(truth, predicted);
                // Relabel predictions so ids are not simply 0..k.
                let ids: Vec<TemplateId> = predicted.iter().map(|&p| TemplateId(100 - p as u64 * 7)).collect();
                let report = grouping_accuracy("x", &recs, &ids).unwrap();
                assert_eq!(report.parsing_accuracy, expected, "truth {truth:?} predicted {predicted:?}");
                assert_eq!(parsing_accuracy(truth, predicted), expected);
                assert_eq!(expected == 1.0, truth == predicted);
            }
        }
    }
}

#[test]
fn merging_inside_a_group_only_helps_when_it_completes_it() {
    for n in 2..=6 {
        for truth in partitions(n) {
            for predicted in partitions(n) {
                let base = oracle(&truth, &predicted);
                let k = predicted.iter().max().unwrap() + 1;
                for a in 0..k {
                    for b in a + 1..k {
                        let predicted = &predicted;
                        let members = |p: usize| (0..n).filter(move |&i| predicted[i] == p);
                        let group = truth[members(a).next().unwrap()];
                        let inside = members(a).chain(members(b)).all(|i| truth[i] == group);
                        if !inside {
                            continue;
                        }
                        let merged: Vec<usize> = predicted.iter().map(|&p| if p == b { a } else { p }).collect();
                        let after = oracle(&truth, &merged);
                        let completes = (0..n).filter(|&i| truth[i] == group).all(|i| merged[i] == a);
                        assert!(after >= base);
                        assert_eq!(after > base, completes, "truth {truth:?} pred {predicted:?} merge {a}+{b}");
                    }
                }
            }
        }
    }
}

#[test]
fn relabeling_never_changes_accuracy() {
    let truth = [0, 0, 1, 1, 2, 0];
    let predicted = [5u64, 5, 9, 9, 9, 5];
    let recs = records(&truth);
    let base = grouping_accuracy("x", &recs, &predicted.map(TemplateId)).unwrap().parsing_accuracy;
    let shifted = grouping_accuracy("x", &recs, &predicted.map(|p| TemplateId(p * 13 + 1))).unwrap();
    assert_eq!(base, shifted.parsing_accuracy);
    assert_eq!(base, 0.5);
}
