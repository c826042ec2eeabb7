use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use super::{EvalError, LabeledRecord};
use crate::template::TemplateId;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupDetail {
    pub event_id: String,
    pub size: usize,
    /// Distinct predicted template ids given to this group's messages.
    pub predicted: Vec<TemplateId>,
    pub correct: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupingReport {
    pub dataset_name: String,
    pub total_messages: usize,
    pub parsing_accuracy: f64,
    pub correct_groups: usize,
    pub total_groups: usize,
    pub groups: Vec<GroupDetail>,
}

/// Parsing accuracy of `predicted` against the ground-truth events.
///
/// A ground-truth group counts as correct when all of its messages got one
/// single template id and no message outside the group got that id. PA is
/// the fraction of messages that belong to correct groups.
pub fn grouping_accuracy(
    dataset_name: &str,
    records: &[LabeledRecord],
    predicted: &[TemplateId],
) -> Result<GroupingReport, EvalError> {
    if records.len() != predicted.len() {
        return Err(EvalError::LengthMismatch { records: records.len(), predicted: predicted.len() });
    }
    let truth: Vec<&str> = records.iter().map(|r| r.event_id.as_str()).collect();
    let groups = score_groups(&truth, predicted);
    let correct_messages: usize = groups.iter().filter(|g| g.correct).map(|g| g.size).sum();
    let total = records.len();
    Ok(GroupingReport {
        dataset_name: dataset_name.to_owned(),
        total_messages: total,
        parsing_accuracy: if total == 0 { 0.0 } else { correct_messages as f64 / total as f64 },
        correct_groups: groups.iter().filter(|g| g.correct).count(),
        total_groups: groups.len(),
        groups,
    })
}

/// Label-agnostic form of [`grouping_accuracy`]: fraction of messages in
/// exactly matched groups. Empty input scores 0.
pub fn parsing_accuracy<T: Hash + Eq, P: Hash + Eq + Copy>(truth: &[T], predicted: &[P]) -> f64 {
    assert_eq!(truth.len(), predicted.len(), "truth/prediction length mismatch");
    if truth.is_empty() {
        return 0.0;
    }
    let mut predicted_sizes: HashMap<P, usize> = HashMap::new();
    for p in predicted {
        *predicted_sizes.entry(*p).or_default() += 1;
    }
    let mut by_truth: HashMap<&T, (usize, Option<P>, bool)> = HashMap::new();
    for (t, p) in truth.iter().zip(predicted) {
        let entry = by_truth.entry(t).or_insert((0, Some(*p), true));
        entry.0 += 1;
        if entry.1 != Some(*p) {
            entry.2 = false;
        }
    }
    let correct: usize = by_truth
        .values()
        .filter(|(size, p, uniform)| *uniform && p.map(|p| predicted_sizes[&p]) == Some(*size))
        .map(|(size, _, _)| size)
        .sum();
    correct as f64 / truth.len() as f64
}

fn score_groups(truth: &[&str], predicted: &[TemplateId]) -> Vec<GroupDetail> {
    let mut predicted_sizes: HashMap<TemplateId, usize> = HashMap::new();
    for p in predicted {
        *predicted_sizes.entry(*p).or_default() += 1;
    }
    let mut members: BTreeMap<&str, (usize, Vec<TemplateId>)> = BTreeMap::new();
    for (t, p) in truth.iter().zip(predicted) {
        let entry = members.entry(t).or_default();
        entry.0 += 1;
        if !entry.1.contains(p) {
            entry.1.push(*p);
        }
    }
    members
        .into_iter()
        .map(|(event_id, (size, mut ids))| {
            ids.sort();
            let correct = ids.len() == 1 && predicted_sizes[&ids[0]] == size;
            GroupDetail { event_id: event_id.to_owned(), size, predicted: ids, correct }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn records(events: &[&str]) -> Vec<LabeledRecord> {
        events
            .iter()
            .enumerate()
            .map(|(i, e)| LabeledRecord {
                line_id: i as u64 + 1,
                content: String::new(),
                event_id: e.to_string(),
                event_template: None,
            })
            .collect()
    }

    fn ids(raw: &[u64]) -> Vec<TemplateId> {
        raw.iter().copied().map(TemplateId).collect()
    }

    #[test]
    fn perfect_parse() {
        let r = grouping_accuracy("t", &records(&["A", "A", "B"]), &ids(&[7, 7, 3])).unwrap();
        assert_eq!(r.parsing_accuracy, 1.0);
        assert_eq!((r.correct_groups, r.total_groups), (2, 2));
    }

    #[test]
    fn over_merged_groups_both_wrong() {
        let r = grouping_accuracy("t", &records(&["A", "A", "B", "B"]), &ids(&[1, 1, 1, 2])).unwrap();
        assert_eq!(r.parsing_accuracy, 0.0);
        assert_eq!(r.groups[0].predicted, ids(&[1]));
        assert!(!r.groups[0].correct);
    }

    #[test]
    fn split_group_wrong_other_right() {
        let r = grouping_accuracy("t", &records(&["A", "A", "B", "B"]), &ids(&[1, 1, 2, 3])).unwrap();
        assert_eq!(r.parsing_accuracy, 0.5);
        assert_eq!(r.groups[1].predicted, ids(&[2, 3]));
    }

    #[test]
    fn length_mismatch_is_error() {
        assert!(matches!(
            grouping_accuracy("t", &records(&["A"]), &ids(&[1, 2])),
            Err(EvalError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn singleton_dataset() {
        let r = grouping_accuracy("t", &records(&["A"]), &ids(&[1])).unwrap();
        assert_eq!(r.parsing_accuracy, 1.0);
        assert_eq!(parsing_accuracy(&["A"], &[5u8]), 1.0);
    }
}
