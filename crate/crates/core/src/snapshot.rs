//! Miner persistence.
//!
//! A snapshot is a one-line magic header `USTEP-SNAPSHOT <version>` followed
//! by a JSON body. Children are written in sorted order so identical miners
//! produce identical bytes.

use std::collections::HashMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::SnapshotError;
use crate::mask::MaskRules;
use crate::miner::{Miner, MinerConfig};
use crate::template::{Template, TemplateId};
use crate::token::Token;
use crate::tree::{Label, Node, NodeId, NodeKind, SearchTree};

pub const SNAPSHOT_MAGIC: &str = "USTEP-SNAPSHOT";
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Body {
    config: MinerConfig,
    messages_processed: u64,
    splits_performed: u64,
    templates: Vec<Template>,
    nodes: Vec<NodeRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeRecord {
    label: Option<Label>,
    parent: Option<NodeId>,
    kind: KindRecord,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum KindRecord {
    Root { children: Vec<(usize, NodeId)> },
    Internal { pivot: usize, children: Vec<(Token, NodeId)> },
    Leaf { templates: Vec<TemplateId>, splittable: bool },
}

impl Miner {
    /// Serializes the full miner state.
    pub fn snapshot(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_snapshot(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn write_snapshot<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        let nodes = self
            .tree
            .nodes()
            .iter()
            .map(|node| NodeRecord {
                label: node.label.clone(),
                parent: node.parent,
                kind: match &node.kind {
                    NodeKind::Root { .. } => KindRecord::Root {
                        children: node
                            .sorted_children()
                            .into_iter()
                            .map(|(l, id)| match l {
                                Label::Length(n) => (n, id),
                                Label::Token(_) => unreachable!("root children are keyed by length"),
                            })
                            .collect(),
                    },
                    NodeKind::Internal { pivot, .. } => KindRecord::Internal {
                        pivot: *pivot,
                        children: node
                            .sorted_children()
                            .into_iter()
                            .map(|(l, id)| match l {
                                Label::Token(t) => (t, id),
                                Label::Length(_) => unreachable!("internal children are keyed by token"),
                            })
                            .collect(),
                    },
                    NodeKind::Leaf { templates, splittable } => {
                        KindRecord::Leaf { templates: templates.clone(), splittable: *splittable }
                    }
                },
            })
            .collect();
        let body = Body {
            config: self.config.clone(),
            messages_processed: self.messages_processed,
            splits_performed: self.splits_performed,
            templates: self.templates.clone(),
            nodes,
        };
        writeln!(writer, "{SNAPSHOT_MAGIC} {SNAPSHOT_VERSION}")?;
        serde_json::to_writer(&mut writer, &body)?;
        writer.write_all(b"\n")
    }

    /// Rebuilds a miner from [`Miner::snapshot`] output. The result is fully
    /// validated; on any error nothing is returned.
    pub fn restore(bytes: &[u8]) -> Result<Miner, SnapshotError> {
        let newline = bytes.iter().position(|&b| b == b'\n').ok_or(SnapshotError::BadMagic)?;
        let header = std::str::from_utf8(&bytes[..newline]).map_err(|_| SnapshotError::BadMagic)?;
        let version = header
            .strip_prefix(SNAPSHOT_MAGIC)
            .and_then(|rest| rest.strip_prefix(' '))
            .ok_or(SnapshotError::BadMagic)?;
        let version: u32 = version.trim().parse().map_err(|_| SnapshotError::BadMagic)?;
        if version != SNAPSHOT_VERSION {
            return Err(SnapshotError::VersionMismatch { found: version, expected: SNAPSHOT_VERSION });
        }
        let body: Body = serde_json::from_slice(&bytes[newline + 1..])
            .map_err(|e| SnapshotError::Corrupt(e.to_string()))?;
        build(body)
    }

    pub fn read_snapshot<R: Read>(mut reader: R) -> Result<Miner, SnapshotError> {
        let mut bytes = Vec::new();
        reader.read_to_end(&mut bytes)?;
        Miner::restore(&bytes)
    }
}

fn build(body: Body) -> Result<Miner, SnapshotError> {
    body.config.validate()?;
    let masks = MaskRules::compile(&body.config.mask_rules)?;
    let corrupt = |msg: String| SnapshotError::Corrupt(msg);

    let mut nodes: Vec<Node> = Vec::with_capacity(body.nodes.len());
    for (index, record) in body.nodes.into_iter().enumerate() {
        // Parents are always created before their children.
        let depth = match record.parent {
            None => 0,
            Some(p) if p.index() < index => nodes[p.index()].depth + 1,
            Some(p) => return Err(corrupt(format!("node {index} has forward parent {p}"))),
        };
        let kind = match record.kind {
            KindRecord::Root { children } => NodeKind::Root { children: unique(children, index)? },
            KindRecord::Internal { pivot, children } => {
                NodeKind::Internal { pivot, children: unique(children, index)? }
            }
            KindRecord::Leaf { templates, splittable } => NodeKind::Leaf { templates, splittable },
        };
        nodes.push(Node { label: record.label, parent: record.parent, depth, kind });
    }
    if nodes.is_empty() {
        return Err(corrupt("no root node".into()));
    }

    let miner = Miner {
        config: body.config,
        masks,
        tree: SearchTree::from_nodes(nodes),
        templates: body.templates,
        messages_processed: body.messages_processed,
        splits_performed: body.splits_performed,
    };
    miner.check_invariants().map_err(|e| corrupt(e.to_string()))?;
    Ok(miner)
}

fn unique<K: std::hash::Hash + Eq>(
    children: Vec<(K, NodeId)>,
    index: usize,
) -> Result<HashMap<K, NodeId>, SnapshotError> {
    let count = children.len();
    let map: HashMap<K, NodeId> = children.into_iter().collect();
    if map.len() != count {
        return Err(SnapshotError::Corrupt(format!("node {index} has duplicate child labels")));
    }
    Ok(map)
}
