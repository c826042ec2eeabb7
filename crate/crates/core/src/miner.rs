//! Per-message pipeline: mask, tokenize, descend, assign a template, split.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, InvariantViolation};
use crate::mask::MaskRules;
use crate::template::{matching_positions, Template, TemplateId};
use crate::token::{tokenize, Token, TokenizedMessage};
use crate::tree::{select_pivot, Label, NodeId, NodeKind, SearchTree};

/// Miner parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinerConfig {
    /// Similarity a best match must strictly exceed to reuse a template.
    pub sigma: f64,
    /// Number of templates a leaf may hold before it is split.
    pub phi: usize,
    /// Regexes masked to `<*>` before tokenization, applied in order.
    #[serde(default)]
    pub mask_rules: Vec<String>,
    /// When set, a template wildcard only matches a masked message token.
    #[serde(default)]
    pub strict_wildcard_sim: bool,
}

impl Default for MinerConfig {
    fn default() -> Self {
        MinerConfig { sigma: 0.5, phi: 8, mask_rules: Vec::new(), strict_wildcard_sim: false }
    }
}

impl MinerConfig {
    pub fn new(sigma: f64, phi: usize) -> MinerConfig {
        MinerConfig { sigma, phi, ..MinerConfig::default() }
    }

    pub fn with_masks<S: Into<String>>(mut self, rules: impl IntoIterator<Item = S>) -> Self {
        self.mask_rules = rules.into_iter().map(Into::into).collect();
        self
    }

    pub fn strict(mut self, strict: bool) -> Self {
        self.strict_wildcard_sim = strict;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0..=1.0).contains(&self.sigma) {
            return Err(ConfigError::InvalidSigma(self.sigma));
        }
        if self.phi < 1 {
            return Err(ConfigError::InvalidPhi(self.phi));
        }
        MaskRules::compile(&self.mask_rules).map(|_| ())
    }
}

/// The template/variables pair produced for one message.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseResult {
    pub template_id: TemplateId,
    /// Template as rendered right after this message was absorbed.
    pub template_text: String,
    /// Message tokens at the template's wildcard positions.
    pub variables: Vec<String>,
    pub created_new: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinerStats {
    pub node_count: usize,
    pub template_count: usize,
    pub messages_processed: u64,
    pub splits_performed: u64,
    pub max_depth: usize,
}

/// Work counters for a single message.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WorkTrace {
    pub message_len: usize,
    pub descent_steps: usize,
    pub sim_evaluations: usize,
    /// Template tokens inspected while choosing split pivots.
    pub pivot_scans: usize,
    pub splits: usize,
    /// False when the reached leaf was flagged non-splittable before this
    /// message, in which case it may legitimately hold more than phi templates.
    pub leaf_was_splittable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateSummary {
    pub id: TemplateId,
    pub template: String,
    pub match_count: u64,
}

/// Streaming template miner.
///
/// A miner is a single-writer state machine; feed it lines in order.
#[derive(Clone, Debug)]
pub struct Miner {
    pub(crate) config: MinerConfig,
    pub(crate) masks: MaskRules,
    pub(crate) tree: SearchTree,
    /// Indexed by `id - 1`.
    pub(crate) templates: Vec<Template>,
    pub(crate) messages_processed: u64,
    pub(crate) splits_performed: u64,
}

impl Miner {
    pub fn new(config: MinerConfig) -> Result<Miner, ConfigError> {
        config.validate()?;
        let masks = MaskRules::compile(&config.mask_rules)?;
        Ok(Miner {
            config,
            masks,
            tree: SearchTree::new(),
            templates: Vec::new(),
            messages_processed: 0,
            splits_performed: 0,
        })
    }

    pub fn config(&self) -> &MinerConfig {
        &self.config
    }

    pub fn tree(&self) -> &SearchTree {
        &self.tree
    }

    pub fn template(&self, id: TemplateId) -> Option<&Template> {
        let index = usize::try_from(id.0).ok()?.checked_sub(1)?;
        self.templates.get(index)
    }

    pub fn templates(&self) -> &[Template] {
        &self.templates
    }

    pub fn template_summaries(&self) -> Vec<TemplateSummary> {
        self.templates
            .iter()
            .map(|t| TemplateSummary { id: t.id, template: t.render(), match_count: t.match_count })
            .collect()
    }

    pub fn stats(&self) -> MinerStats {
        MinerStats {
            node_count: self.tree.len(),
            template_count: self.templates.len(),
            messages_processed: self.messages_processed,
            splits_performed: self.splits_performed,
            max_depth: self.tree.max_depth(),
        }
    }

    /// Masks and tokenizes a raw line without touching miner state.
    pub fn prepare(&self, line: &str) -> TokenizedMessage {
        tokenize(&self.masks.apply(line))
    }

    pub fn process_message(&mut self, line: &str) -> ParseResult {
        self.process_traced(line).0
    }

    pub fn process_traced(&mut self, line: &str) -> (ParseResult, WorkTrace) {
        let message = self.prepare(line);
        self.process_tokens(&message.tokens)
    }

    /// Runs an already tokenized message through the tree.
    pub fn process_tokens(&mut self, tokens: &[Token]) -> (ParseResult, WorkTrace) {
        let mut trace = WorkTrace { message_len: tokens.len(), ..WorkTrace::default() };
        let descent = self.tree.descend(tokens);
        trace.descent_steps = descent.steps;
        trace.leaf_was_splittable = self.tree.node(descent.leaf).is_splittable();

        let (id, created_new) = self.assign_template(descent.leaf, tokens, &mut trace);
        if created_new {
            self.rebalance(descent.leaf, &mut trace);
        }
        self.messages_processed += 1;

        let template = &self.templates[(id.0 - 1) as usize];
        let result = ParseResult {
            template_id: id,
            template_text: template.render(),
            variables: template.extract_variables(tokens),
            created_new,
        };
        (result, trace)
    }

    /// Picks the most similar template of `leaf` if its similarity strictly
    /// exceeds sigma (lowest id on ties) and absorbs the message into it;
    /// otherwise appends a new template equal to the message.
    fn assign_template(
        &mut self,
        leaf: NodeId,
        tokens: &[Token],
        trace: &mut WorkTrace,
    ) -> (TemplateId, bool) {
        let candidates = self.tree.node(leaf).templates();
        let mut best: Option<(TemplateId, f64)> = None;
        for &id in candidates {
            trace.sim_evaluations += 1;
            let template = &self.templates[(id.0 - 1) as usize];
            let similarity = if tokens.is_empty() {
                // Every empty line shares the one empty template.
                1.0
            } else {
                matching_positions(tokens, &template.tokens, self.config.strict_wildcard_sim) as f64
                    / tokens.len() as f64
            };
            let better = match best {
                None => true,
                Some((best_id, best_sim)) => {
                    similarity > best_sim || (similarity == best_sim && id < best_id)
                }
            };
            if better {
                best = Some((id, similarity));
            }
        }

        match best {
            Some((id, similarity)) if similarity > self.config.sigma || tokens.is_empty() => {
                self.templates[(id.0 - 1) as usize].absorb(tokens);
                (id, false)
            }
            _ => {
                let id = TemplateId(self.templates.len() as u64 + 1);
                self.templates.push(Template::new(id, tokens.to_vec()));
                self.tree.push_template(leaf, id);
                (id, true)
            }
        }
    }

    /// Splits `leaf` if it holds more than phi templates, then re-examines
    /// every resulting child the same way.
    fn rebalance(&mut self, leaf: NodeId, trace: &mut WorkTrace) {
        let mut pending = vec![leaf];
        while let Some(node) = pending.pop() {
            let ids = self.tree.node(node).templates();
            if ids.len() <= self.config.phi {
                continue;
            }
            let rows: Vec<&[Token]> =
                ids.iter().map(|id| self.templates[(id.0 - 1) as usize].tokens.as_slice()).collect();
            trace.pivot_scans += rows.len() * rows[0].len();
            let excluded = self.tree.ancestor_pivots(node);
            match select_pivot(&rows, &excluded) {
                None => self.tree.mark_unsplittable(node),
                Some(pivot) => {
                    let templates = &self.templates;
                    let children = self
                        .tree
                        .split(node, pivot, |id| &templates[(id.0 - 1) as usize].tokens[pivot]);
                    self.splits_performed += 1;
                    trace.splits += 1;
                    pending.extend(children);
                }
            }
        }
    }

    /// Verifies every structural invariant of the tree and template store.
    pub fn check_invariants(&self) -> Result<(), InvariantViolation> {
        let fail = |msg: String| Err(InvariantViolation(msg));
        let nodes = self.tree.nodes();

        for (index, template) in self.templates.iter().enumerate() {
            if template.id.0 != index as u64 + 1 {
                return fail(format!("template at slot {index} has id {}", template.id));
            }
            if template.match_count < 1 {
                return fail(format!("template {} has zero matches", template.id));
            }
        }

        match nodes.first() {
            Some(root) if matches!(root.kind, NodeKind::Root { .. }) && root.parent.is_none() && root.label.is_none() => {}
            _ => return fail("node 0 is not a bare root".into()),
        }

        let mut reached = vec![false; nodes.len()];
        reached[0] = true;
        let mut placed: HashSet<TemplateId> = HashSet::new();
        // (node, token count of the path, pivots on the path)
        let mut stack: Vec<(NodeId, Option<usize>, Vec<usize>)> = vec![(NodeId::ROOT, None, Vec::new())];
        while let Some((id, length, pivots)) = stack.pop() {
            let node = self.tree.node(id);
            match &node.kind {
                NodeKind::Root { .. } if id != NodeId::ROOT => {
                    return fail(format!("{id} is a second root"));
                }
                NodeKind::Root { .. } | NodeKind::Internal { .. } => {
                    let mut pivots = pivots.clone();
                    if let Some(pivot) = node.pivot() {
                        let len = length.unwrap_or(0);
                        if pivot >= len {
                            return fail(format!("{id} pivot {pivot} outside length {len}"));
                        }
                        if pivots.contains(&pivot) {
                            return fail(format!("{id} repeats pivot {pivot} on its path"));
                        }
                        pivots.push(pivot);
                    }
                    for (label, child) in node.sorted_children() {
                        let Some(child_node) = nodes.get(child.index()) else {
                            return fail(format!("{id} points at missing node {child}"));
                        };
                        if reached[child.index()] {
                            return fail(format!("{child} reachable twice"));
                        }
                        reached[child.index()] = true;
                        if child_node.parent != Some(id) || child_node.label.as_ref() != Some(&label) {
                            return fail(format!("{child} parent/label disagree with {id}"));
                        }
                        if child_node.depth != node.depth + 1 {
                            return fail(format!("{child} has depth {}", child_node.depth));
                        }
                        let child_len = match (&node.kind, &label) {
                            (NodeKind::Root { .. }, Label::Length(n)) => Some(*n),
                            (NodeKind::Internal { .. }, Label::Token(_)) => length,
                            _ => return fail(format!("{child} has a label of the wrong kind")),
                        };
                        stack.push((child, child_len, pivots.clone()));
                    }
                }
                NodeKind::Leaf { templates, splittable } => {
                    let len = length.unwrap_or(0);
                    if *splittable && templates.len() > self.config.phi {
                        return fail(format!("{id} holds {} > phi templates", templates.len()));
                    }
                    if templates.windows(2).any(|w| w[0] >= w[1]) {
                        return fail(format!("{id} templates out of id order"));
                    }
                    // Templates below a concrete label carry that token at the parent's pivot.
                    let routed = match (&node.label, node.parent.and_then(|p| self.tree.node(p).pivot())) {
                        (Some(Label::Token(tok)), Some(pivot)) if !tok.is_wildcard() => Some((pivot, tok)),
                        _ => None,
                    };
                    for tid in templates {
                        let Some(template) = self.template(*tid) else {
                            return fail(format!("{id} references unknown template {tid}"));
                        };
                        if !placed.insert(*tid) {
                            return fail(format!("template {tid} attached twice"));
                        }
                        if template.len() != len {
                            return fail(format!("template {tid} length {} under length {len}", template.len()));
                        }
                        if let Some((pivot, tok)) = routed {
                            if &template.tokens[pivot] != tok {
                                return fail(format!("template {tid} disagrees with label {tok}"));
                            }
                        }
                    }
                }
            }
        }
        if let Some(orphan) = reached.iter().position(|r| !r) {
            return fail(format!("node #{orphan} unreachable"));
        }
        if placed.len() != self.templates.len() {
            return fail("some templates are attached to no leaf".into());
        }
        Ok(())
    }
}
