//! The weighted directed retweet graph.
//!
//! Nodes are users, an edge `(u, v)` means `u` retweeted `v`, and the weight
//! is the retweet count. Duplicate `(src, dst)` pairs in the input are summed
//! before the weight threshold is applied, so splitting a count across rows
//! never changes the graph.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Serialize;

use crate::corpus::{RawEdge, UserId};
use crate::error::{Error, Result};

/// Immutable weighted directed graph with nodes indexed `0..node_count()` in
/// `user_id` order. Out- and in-adjacency are kept as mutually consistent
/// transposes.
#[derive(Debug, Clone, PartialEq)]
pub struct RetweetGraph {
    ids: Vec<UserId>,
    index: BTreeMap<UserId, usize>,
    out_adj: Vec<Vec<(usize, u64)>>,
    in_adj: Vec<Vec<(usize, u64)>>,
    edge_count: usize,
}

/// Sanity metrics over a built graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegreeStats {
    pub node_count: usize,
    pub edge_count: usize,
    pub mean_total_degree: f64,
}

impl RetweetGraph {
    /// Build from raw edges. The node set is every user mentioned as an
    /// endpoint, even when all of its edges fall below `min_weight`.
    pub fn build(edges: &[RawEdge], min_weight: u64) -> Self {
        let endpoints = edges.iter().flat_map(|e| [&e.src, &e.dst]);
        Self::build_with_nodes(endpoints, edges, min_weight)
    }

    /// Build with an explicit node set (typically every user surviving
    /// preprocessing, so isolated users still get embedded from text alone).
    /// Edge endpoints are added to the node set if missing.
    pub fn build_with_nodes<'a>(
        nodes: impl IntoIterator<Item = &'a UserId>,
        edges: &[RawEdge],
        min_weight: u64,
    ) -> Self {
        let mut id_set: BTreeSet<UserId> = nodes.into_iter().cloned().collect();
        for e in edges {
            id_set.insert(e.src.clone());
            id_set.insert(e.dst.clone());
        }
        let ids: Vec<UserId> = id_set.into_iter().collect();
        let index: BTreeMap<UserId, usize> =
            ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();

        let mut merged: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for e in edges {
            if e.src == e.dst {
                continue;
            }
            let s = index[&e.src];
            let d = index[&e.dst];
            *merged.entry((s, d)).or_insert(0) += e.count;
        }

        let mut out_adj = vec![Vec::new(); ids.len()];
        let mut in_adj = vec![Vec::new(); ids.len()];
        let mut edge_count = 0;
        for ((s, d), w) in merged {
            if w >= min_weight {
                out_adj[s].push((d, w));
                in_adj[d].push((s, w));
                edge_count += 1;
            }
        }
        // BTreeMap iteration already yields out_adj sorted; in_adj needs it.
        for list in &mut in_adj {
            list.sort_unstable();
        }
        RetweetGraph {
            ids,
            index,
            out_adj,
            in_adj,
            edge_count,
        }
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Node ids in index order (lexicographic).
    pub fn nodes(&self) -> impl Iterator<Item = &UserId> {
        self.ids.iter()
    }

    pub fn index_of(&self, user: &UserId) -> Option<usize> {
        self.index.get(user).copied()
    }

    pub fn user_id(&self, node: usize) -> &UserId {
        &self.ids[node]
    }

    /// Weight of the directed edge `src -> dst`, if present.
    pub fn weight(&self, src: &UserId, dst: &UserId) -> Option<u64> {
        let s = self.index_of(src)?;
        let d = self.index_of(dst)?;
        self.out_adj[s]
            .binary_search_by_key(&d, |&(n, _)| n)
            .ok()
            .map(|pos| self.out_adj[s][pos].1)
    }

    /// Outgoing `(neighbor, weight)` pairs, sorted by neighbor index.
    pub fn out_neighbors(&self, node: usize) -> &[(usize, u64)] {
        &self.out_adj[node]
    }

    /// Incoming `(neighbor, weight)` pairs, sorted by neighbor index.
    pub fn in_neighbors(&self, node: usize) -> &[(usize, u64)] {
        &self.in_adj[node]
    }

    /// Neighbors of `u` ignoring edge direction.
    pub fn undirected_neighbors(&self, user: &UserId) -> Result<BTreeSet<UserId>> {
        let node = self
            .index_of(user)
            .ok_or_else(|| Error::UnknownUser(user.to_string()))?;
        Ok(self
            .undirected_neighbor_indices(node)
            .into_iter()
            .map(|(n, _)| self.ids[n].clone())
            .collect())
    }

    /// Undirected `(neighbor, weight)` view of one node: weights of the two
    /// directions summed, sorted by neighbor index.
    pub fn undirected_neighbor_indices(&self, node: usize) -> Vec<(usize, u64)> {
        let mut merged: Vec<(usize, u64)> = Vec::with_capacity(
            self.out_adj[node].len() + self.in_adj[node].len(),
        );
        let (mut i, mut j) = (0, 0);
        let (out, inc) = (&self.out_adj[node], &self.in_adj[node]);
        while i < out.len() || j < inc.len() {
            match (out.get(i), inc.get(j)) {
                (Some(&(a, wa)), Some(&(b, wb))) if a == b => {
                    merged.push((a, wa + wb));
                    i += 1;
                    j += 1;
                }
                (Some(&(a, wa)), Some(&(b, _))) if a < b => {
                    merged.push((a, wa));
                    i += 1;
                }
                (Some(_), Some(&(b, wb))) => {
                    merged.push((b, wb));
                    j += 1;
                }
                (Some(&(a, wa)), None) => {
                    merged.push((a, wa));
                    i += 1;
                }
                (None, Some(&(b, wb))) => {
                    merged.push((b, wb));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        merged
    }

    /// Every undirected edge `{a, b}` exactly once, as `(a, b)` with `a < b`.
    pub fn undirected_edges(&self) -> Vec<(usize, usize)> {
        let mut pairs = BTreeSet::new();
        for (a, list) in self.out_adj.iter().enumerate() {
            for &(b, _) in list {
                pairs.insert((a.min(b), a.max(b)));
            }
        }
        pairs.into_iter().collect()
    }

    pub fn is_isolated(&self, node: usize) -> bool {
        self.out_adj[node].is_empty() && self.in_adj[node].is_empty()
    }

    pub fn degree_stats(&self) -> DegreeStats {
        let n = self.node_count();
        let total: usize = self.out_adj.iter().map(Vec::len).sum::<usize>()
            + self.in_adj.iter().map(Vec::len).sum::<usize>();
        DegreeStats {
            node_count: n,
            edge_count: self.edge_count,
            mean_total_degree: if n == 0 { 0.0 } else { total as f64 / n as f64 },
        }
    }

    /// Dump as an edge-list CSV identical to the input format. Isolated
    /// nodes are not representable in this format and are omitted.
    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let edges: Vec<RawEdge> = self
            .out_adj
            .iter()
            .enumerate()
            .flat_map(|(s, list)| {
                list.iter().map(move |&(d, w)| RawEdge {
                    src: self.ids[s].clone(),
                    dst: self.ids[d].clone(),
                    count: w,
                })
            })
            .collect();
        crate::corpus::save_edges(path, &edges)
    }

    #[cfg(test)]
    fn assert_transpose_consistent(&self) {
        for (s, list) in self.out_adj.iter().enumerate() {
            for &(d, w) in list {
                let back = self.in_adj[d]
                    .binary_search_by_key(&s, |&(n, _)| n)
                    .map(|pos| self.in_adj[d][pos].1);
                assert_eq!(back, Ok(w), "out_adj[{s}][{d}] missing from in_adj");
            }
        }
        let n_out: usize = self.out_adj.iter().map(Vec::len).sum();
        let n_in: usize = self.in_adj.iter().map(Vec::len).sum();
        assert_eq!(n_out, n_in);
        assert_eq!(n_out, self.edge_count);
    }
}
