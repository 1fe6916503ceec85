//! Agglomerative hierarchical clustering over a distance matrix, partition
//! extraction, and dendrogram serialization.

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use serde::Serialize;

/// Inter-cluster dissimilarity rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Linkage {
    /// Largest pairwise distance between members.
    Complete,
    /// Smallest pairwise distance between members.
    Single,
    /// Unweighted mean over all member pairs.
    Average,
}

impl std::fmt::Display for Linkage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Linkage::Complete => "complete",
            Linkage::Single => "single",
            Linkage::Average => "average",
        })
    }
}

impl std::str::FromStr for Linkage {
    type Err = Error;
    fn from_str(s: &str) -> Result<Linkage> {
        match s {
            "complete" => Ok(Linkage::Complete),
            "single" => Ok(Linkage::Single),
            "average" => Ok(Linkage::Average),
            other => Err(Error::Domain(format!(
                "unknown linkage {other:?} (available: complete, single, average)"
            ))),
        }
    }
}

/// One agglomeration step: clusters `left` and `right` joined at `height`
/// into a cluster of `size` leaves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

/// The full merge history. Node ids 0..n−1 are leaves (in label order);
/// node n−1+i is the cluster created by `merges[i−1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dendrogram {
    pub leaf_labels: Vec<String>,
    pub merges: Vec<Merge>,
}

/// Builds the dendrogram by repeatedly merging the closest pair of clusters.
/// Deterministic: ties are broken toward the lexicographically smallest
/// (smaller id, larger id) pair. The working matrix shrinks by one row per
/// merge (Lance–Williams updates), an O(n³) scan that is plenty for tens of
/// samples.
pub fn agglomerate(dm: &DistanceMatrix, linkage: Linkage) -> Result<Dendrogram> {
    dm.validate()?;
    let n = dm.n();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }

    // Active clusters, each a (node id, leaf count) slot with a live
    // distance row; slot order is stable so scans are deterministic.
    let mut ids: Vec<usize> = (0..n).collect();
    let mut sizes: Vec<usize> = vec![1; n];
    let mut dist: Vec<Vec<f64>> = (0..n).map(|i| dm.d.row(i).to_vec()).collect();
    let mut merges = Vec::with_capacity(n - 1);

    for step in 0..n - 1 {
        let m = ids.len();
        let (mut ba, mut bb) = (0, 1);
        let mut best = f64::INFINITY;
        for a in 0..m {
            for b in a + 1..m {
                let d = dist[a][b];
                let key = (ids[a].min(ids[b]), ids[a].max(ids[b]));
                let best_key = (ids[ba].min(ids[bb]), ids[ba].max(ids[bb]));
                if d < best || (d == best && key < best_key) {
                    best = d;
                    ba = a;
                    bb = b;
                }
            }
        }

        let (left, right) = (ids[ba].min(ids[bb]), ids[ba].max(ids[bb]));
        let size = sizes[ba] + sizes[bb];
        merges.push(Merge {
            left,
            right,
            height: best,
            size,
        });

        // Fold slot bb into slot ba, then drop bb.
        let (sa, sb) = (sizes[ba] as f64, sizes[bb] as f64);
        #[allow(clippy::needless_range_loop)] // x indexes both rows and columns
        for x in 0..m {
            if x == ba || x == bb {
                continue;
            }
            let merged = match linkage {
                Linkage::Complete => dist[ba][x].max(dist[bb][x]),
                Linkage::Single => dist[ba][x].min(dist[bb][x]),
                Linkage::Average => (sa * dist[ba][x] + sb * dist[bb][x]) / (sa + sb),
            };
            dist[ba][x] = merged;
            dist[x][ba] = merged;
        }
        dist[ba][ba] = 0.0;
        ids[ba] = n + step;
        sizes[ba] = size;
        ids.remove(bb);
        sizes.remove(bb);
        dist.remove(bb);
        for row in &mut dist {
            row.remove(bb);
        }
    }

    Ok(Dendrogram {
        leaf_labels: dm.labels.clone(),
        merges,
    })
}

impl Dendrogram {
    pub fn n_leaves(&self) -> usize {
        self.leaf_labels.len()
    }

    /// Cluster id per leaf (aligned with `leaf_labels`) after undoing the
    /// last k−1 merges. Ids run 0..k in order of first leaf appearance.
    pub fn cut(&self, k: usize) -> Result<Vec<usize>> {
        let n = self.n_leaves();
        if k < 1 || k > n {
            return Err(Error::Domain(format!(
                "cut must keep between 1 and {n} clusters, asked for {k}"
            )));
        }
        let mut parent: Vec<Option<usize>> = vec![None; 2 * n - 1];
        for (i, m) in self.merges[..n - k].iter().enumerate() {
            parent[m.left] = Some(n + i);
            parent[m.right] = Some(n + i);
        }
        let root = |mut v: usize| {
            while let Some(p) = parent[v] {
                v = p;
            }
            v
        };
        let mut cluster_of_root: Vec<Option<usize>> = vec![None; 2 * n - 1];
        let mut next = 0;
        let mut assignment = Vec::with_capacity(n);
        for leaf in 0..n {
            let r = root(leaf);
            let id = *cluster_of_root[r].get_or_insert_with(|| {
                let id = next;
                next += 1;
                id
            });
            assignment.push(id);
        }
        debug_assert_eq!(next, k);
        Ok(assignment)
    }

    /// The cut as label groups, ordered by first leaf appearance.
    pub fn cut_groups(&self, k: usize) -> Result<Vec<Vec<String>>> {
        let assignment = self.cut(k)?;
        let clusters = assignment.iter().max().map_or(0, |m| m + 1);
        let mut groups = vec![Vec::new(); clusters];
        for (leaf, &c) in assignment.iter().enumerate() {
            groups[c].push(self.leaf_labels[leaf].clone());
        }
        Ok(groups)
    }

    /// Left-to-right leaf order induced by the merge tree (children of each
    /// merge drawn smaller-id side first).
    pub fn leaf_order(&self) -> Vec<usize> {
        let n = self.n_leaves();
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![2 * n - 2];
        while let Some(node) = stack.pop() {
            if node < n {
                order.push(node);
            } else {
                let m = &self.merges[node - n];
                stack.push(m.right);
                stack.push(m.left);
            }
        }
        order
    }

    /// Height of a node: 0 for leaves, merge height for internal nodes.
    fn node_height(&self, node: usize) -> f64 {
        if node < self.n_leaves() {
            0.0
        } else {
            self.merges[node - self.n_leaves()].height
        }
    }

    /// Newick text with branch lengths (parent height minus child height).
    pub fn to_newick(&self) -> String {
        fn quote(label: &str) -> String {
            let plain = label
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || "_.|-".contains(c));
            if plain {
                label.to_string()
            } else {
                format!("'{}'", label.replace('\'', "''"))
            }
        }
        fn node(tree: &Dendrogram, id: usize) -> String {
            let n = tree.n_leaves();
            if id < n {
                quote(&tree.leaf_labels[id])
            } else {
                let m = &tree.merges[id - n];
                format!(
                    "({}:{},{}:{})",
                    node(tree, m.left),
                    m.height - tree.node_height(m.left),
                    node(tree, m.right),
                    m.height - tree.node_height(m.right),
                )
            }
        }
        format!("{};", node(self, 2 * self.n_leaves() - 2))
    }
}
