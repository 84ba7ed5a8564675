//! The randomized EdgeColor/Recolor procedure and its witness forests.
//!
//! Recolor calls nest; the nesting is kept on an explicit stack so long
//! executions cannot exhaust the call stack. Every call becomes an internal
//! node of the witness forest, marked with the `(edge, cycle)` it was given.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::census::CanonicalTree;
use crate::coloring::{
    assign_with, edges_on_bichromatic_cycles, first_flawed_unchecked, Assignment, ColorConfig,
    ColorError, EdgeColoring, Scratch,
};
use crate::graph::{Cycle, EdgeId, Graph};

/// Default bound on Recolor calls per run.
pub const DEFAULT_CAP: u64 = 1_000_000;

pub type NodeId = usize;

/// One Recolor call. Unmarked padding leaves are stored as a count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessNode {
    pub edge: EdgeId,
    pub cycle: Cycle,
    pub children: Vec<NodeId>,
}

impl WitnessNode {
    /// `|C| - 2`, the outdegree once padding leaves are added.
    pub fn outdegree(&self) -> usize {
        self.cycle.len().saturating_sub(2)
    }

    pub fn padding_leaves(&self) -> usize {
        self.outdegree().saturating_sub(self.children.len())
    }
}

/// Marked, unordered forest of Recolor calls stored as an arena.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessForest {
    nodes: Vec<WitnessNode>,
    roots: Vec<NodeId>,
}

impl WitnessForest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_root(&mut self, edge: EdgeId, cycle: Cycle) -> NodeId {
        let id = self.push(edge, cycle);
        self.roots.push(id);
        id
    }

    pub fn add_child(&mut self, parent: NodeId, edge: EdgeId, cycle: Cycle) -> NodeId {
        let id = self.push(edge, cycle);
        self.nodes[parent].children.push(id);
        id
    }

    fn push(&mut self, edge: EdgeId, cycle: Cycle) -> NodeId {
        self.nodes.push(WitnessNode {
            edge,
            cycle,
            children: Vec::new(),
        });
        self.nodes.len() - 1
    }

    pub fn node(&self, id: NodeId) -> &WitnessNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[WitnessNode] {
        &self.nodes
    }

    pub fn roots(&self) -> &[NodeId] {
        &self.roots
    }

    pub fn n_internal(&self) -> usize {
        self.nodes.len()
    }

    /// Total node count, padding leaves included.
    pub fn n(&self) -> usize {
        self.nodes.len()
            + self
                .nodes
                .iter()
                .map(WitnessNode::padding_leaves)
                .sum::<usize>()
    }

    /// Outdegree → number of internal nodes.
    pub fn degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for node in &self.nodes {
            *h.entry(node.outdegree()).or_insert(0) += 1;
        }
        h
    }

    /// Internal nodes in depth-first (pre-)order, roots in creation order.
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack: Vec<NodeId> = self.roots.iter().rev().copied().collect();
        while let Some(id) = stack.pop() {
            out.push(id);
            stack.extend(self.nodes[id].children.iter().rev());
        }
        out
    }

    /// The unmarked shape of each tree, padding leaves included.
    pub fn shapes(&self) -> Vec<CanonicalTree> {
        let mut built: Vec<Option<CanonicalTree>> = vec![None; self.nodes.len()];
        // children are always created after their parent
        for id in (0..self.nodes.len()).rev() {
            let node = &self.nodes[id];
            let mut kids: Vec<CanonicalTree> = node
                .children
                .iter()
                .map(|&c| built[c].take().expect("child built first"))
                .collect();
            kids.extend(std::iter::repeat_with(CanonicalTree::leaf).take(node.padding_leaves()));
            built[id] = Some(CanonicalTree::from_children(kids));
        }
        self.roots
            .iter()
            .map(|&r| built[r].take().expect("root"))
            .collect()
    }

    pub fn summary(&self) -> ForestSummary {
        ForestSummary {
            n: self.n(),
            n_internal: self.n_internal(),
            degree_histogram: self.degree_histogram(),
        }
    }

    /// Nested JSON: `[{edge, cycle, leaves, children: [...]}, ...]`.
    pub fn to_nested_json(&self) -> serde_json::Value {
        let mut built: Vec<Option<serde_json::Value>> = vec![None; self.nodes.len()];
        for id in (0..self.nodes.len()).rev() {
            let node = &self.nodes[id];
            let children: Vec<serde_json::Value> = node
                .children
                .iter()
                .map(|&c| built[c].take().expect("child built first"))
                .collect();
            built[id] = Some(serde_json::json!({
                "edge": node.edge,
                "cycle": node.cycle.edges(),
                "leaves": node.padding_leaves(),
                "children": children,
            }));
        }
        serde_json::Value::Array(
            self.roots
                .iter()
                .map(|&r| built[r].take().expect("root"))
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestSummary {
    pub n: usize,
    pub n_internal: usize,
    pub degree_histogram: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub seed: u64,
    pub recolor_calls: u64,
    pub halted: bool,
    pub cap: u64,
    #[serde(skip)]
    pub forest: WitnessForest,
    pub assignments: u64,
    /// Smallest safe-color set seen at any assignment.
    pub min_safe_set: usize,
    pub progress_checks: u64,
    pub progress_violations: u64,
}

impl RunStats {
    /// `{seed, recolor_calls, halted, forest: {n, n_internal, degree_histogram}}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "seed": self.seed,
            "recolor_calls": self.recolor_calls,
            "halted": self.halted,
            "forest": self.forest.summary(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub cap: u64,
    /// Re-verify the progress property on exit from every Recolor call.
    /// Costly; meant for instrumented test runs.
    pub check_progress: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            cap: DEFAULT_CAP,
            check_progress: false,
        }
    }
}

struct Frame {
    node: NodeId,
    scope: Vec<EdgeId>,
    /// Edges on no bichromatic cycle when the call started.
    clean_at_entry: Option<Vec<bool>>,
}

struct Runner<'a> {
    g: &'a Graph,
    palette: usize,
    col: EdgeColoring,
    scratch: Scratch,
    stats: RunStats,
}

impl Runner<'_> {
    fn assign(&mut self, e: EdgeId, rng: &mut ChaCha8Rng) -> Result<Assignment, ColorError> {
        let a = assign_with(
            self.g,
            &mut self.col,
            e,
            self.palette,
            rng,
            &mut self.scratch,
        )?;
        self.stats.assignments += 1;
        self.stats.min_safe_set = self.stats.min_safe_set.min(a.safe_count);
        Ok(a)
    }

    /// Opens a Recolor call: records the node and recolors its scope.
    fn enter(
        &mut self,
        parent: Option<NodeId>,
        edge: EdgeId,
        cycle: Cycle,
        check: bool,
        rng: &mut ChaCha8Rng,
    ) -> Result<Frame, ColorError> {
        let clean_at_entry = check.then(|| {
            edges_on_bichromatic_cycles(self.g, &self.col)
                .into_iter()
                .map(|on| !on)
                .collect::<Vec<_>>()
        });
        let scope = cycle.scope(edge)?.edges;
        let node = match parent {
            None => self.stats.forest.add_root(edge, cycle),
            Some(p) => self.stats.forest.add_child(p, edge, cycle),
        };
        self.stats.recolor_calls += 1;
        for &f in &scope {
            self.assign(f, rng)?;
        }
        Ok(Frame {
            node,
            scope,
            clean_at_entry,
        })
    }

    fn leave(&mut self, frame: &Frame) {
        let Some(clean) = &frame.clean_at_entry else {
            return;
        };
        let on_cycle = edges_on_bichromatic_cycles(self.g, &self.col);
        self.stats.progress_checks += 1;
        let violated =
            (0..self.g.edge_count()).any(|e| on_cycle[e] && (clean[e] || frame.scope.contains(&e)));
        if violated {
            self.stats.progress_violations += 1;
        }
    }
}

/// Runs EdgeColor with the generator seeded from `cfg.rng_seed`.
pub fn edge_color(
    g: &Graph,
    cfg: &ColorConfig,
    opts: RunOptions,
) -> Result<(EdgeColoring, RunStats), ColorError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    edge_color_with_rng(g, cfg, &mut rng, opts)
}

/// EdgeColor: color every edge, then Recolor the first flawed edge/cycle
/// until no bichromatic cycle remains or `opts.cap` calls have been made.
pub fn edge_color_with_rng(
    g: &Graph,
    cfg: &ColorConfig,
    rng: &mut ChaCha8Rng,
    opts: RunOptions,
) -> Result<(EdgeColoring, RunStats), ColorError> {
    let mut run = Runner {
        g,
        palette: cfg.palette_size,
        col: EdgeColoring::empty(g.edge_count()),
        scratch: Scratch::default(),
        stats: RunStats {
            seed: cfg.rng_seed,
            recolor_calls: 0,
            halted: false,
            cap: opts.cap,
            forest: WitnessForest::new(),
            assignments: 0,
            min_safe_set: usize::MAX,
            progress_checks: 0,
            progress_violations: 0,
        },
    };
    for e in 0..g.edge_count() {
        run.assign(e, rng)?;
    }

    let mut stack: Vec<Frame> = Vec::new();
    loop {
        let restrict = stack.last().map(|f| f.scope.as_slice());
        match first_flawed_unchecked(g, &run.col, restrict) {
            Some((edge, cycle)) => {
                if run.stats.recolor_calls >= opts.cap {
                    return Ok((run.col, run.stats));
                }
                let parent = stack.last().map(|f| f.node);
                let frame = run.enter(parent, edge, cycle, opts.check_progress, rng)?;
                stack.push(frame);
            }
            None => match stack.pop() {
                Some(frame) => run.leave(&frame),
                None => break,
            },
        }
    }
    run.stats.halted = true;
    Ok((run.col, run.stats))
}

/// Runs EdgeColor once per seed, in parallel.
pub fn run_many(
    g: &Graph,
    cfg: &ColorConfig,
    seeds: impl IntoParallelIterator<Item = u64>,
    opts: RunOptions,
) -> Result<Vec<(EdgeColoring, RunStats)>, ColorError> {
    seeds
        .into_par_iter()
        .map(|seed| edge_color(g, &cfg.with_seed(seed), opts))
        .collect()
}

/// Row of the decay experiment: runs with exactly / at least `n` internal nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub n_internal: usize,
    pub count: usize,
    pub at_least: usize,
    pub freq_at_least: f64,
    pub log_freq_at_least: f64,
}

/// Histogram of witness-forest sizes (internal nodes) over many seeds.
pub fn decay_histogram(
    g: &Graph,
    cfg: &ColorConfig,
    seeds: std::ops::Range<u64>,
    opts: RunOptions,
) -> Result<Vec<DecayRow>, ColorError> {
    let runs = seeds.end.saturating_sub(seeds.start) as usize;
    let sizes: Vec<usize> = seeds
        .into_par_iter()
        .map(|seed| edge_color(g, &cfg.with_seed(seed), opts).map(|(_, s)| s.forest.n_internal()))
        .collect::<Result<_, _>>()?;
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for s in sizes {
        *hist.entry(s).or_insert(0) += 1;
    }
    let max = hist.keys().next_back().copied().unwrap_or(0);
    let mut rows = Vec::with_capacity(max + 1);
    let mut remaining = runs;
    for n in 0..=max {
        let count = hist.get(&n).copied().unwrap_or(0);
        let freq = remaining as f64 / runs.max(1) as f64;
        rows.push(DecayRow {
            n_internal: n,
            count,
            at_least: remaining,
            freq_at_least: freq,
            log_freq_at_least: freq.ln(),
        });
        remaining -= count;
    }
    Ok(rows)
}

/// Violation of one of the structural witness-forest properties.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessViolation {
    /// Two roots whose scopes share an edge.
    RootScopesOverlap { roots: [NodeId; 2], edge: EdgeId },
    /// Two children of one node whose cycle-marks share an edge.
    ChildCyclesOverlap {
        parent: NodeId,
        children: [NodeId; 2],
        edge: EdgeId,
    },
    /// A child whose edge-mark is outside its parent's scope.
    ChildOutsideScope {
        parent: NodeId,
        child: NodeId,
        edge: EdgeId,
    },
    /// Odd or short cycle-mark, edge-mark off its cycle, unknown edges, or
    /// more children than the outdegree allows.
    Malformed { node: NodeId, reason: String },
}

/// Checks the three structural properties every witness forest has: root
/// scopes pairwise edge-disjoint, children's cycle-marks pairwise
/// edge-disjoint, and each child's edge-mark inside its parent's scope.
pub fn check_witness(forest: &WitnessForest, g: &Graph) -> Vec<WitnessViolation> {
    let mut out = Vec::new();
    for (id, node) in forest.nodes().iter().enumerate() {
        let c = &node.cycle;
        let reason = if c.len() < 6 || c.len() % 2 != 0 {
            Some(format!("cycle-mark has length {}", c.len()))
        } else if !c.contains(node.edge) {
            Some(format!("edge-mark {} not on its cycle-mark", node.edge))
        } else if let Some(&e) = c.edges().iter().find(|&&e| e >= g.edge_count()) {
            Some(format!("edge {e} not in graph"))
        } else if node.children.len() > node.outdegree() {
            Some(format!(
                "{} children exceed outdegree {}",
                node.children.len(),
                node.outdegree()
            ))
        } else {
            None
        };
        if let Some(reason) = reason {
            out.push(WitnessViolation::Malformed { node: id, reason });
        }
    }

    let scope_of = |id: NodeId| -> Vec<EdgeId> {
        let n = forest.node(id);
        n.cycle.scope(n.edge).map(|s| s.edges).unwrap_or_default()
    };
    let roots = forest.roots();
    for (i, &a) in roots.iter().enumerate() {
        let sa = scope_of(a);
        for &b in &roots[i + 1..] {
            if let Some(&edge) = scope_of(b).iter().find(|e| sa.contains(e)) {
                out.push(WitnessViolation::RootScopesOverlap {
                    roots: [a, b],
                    edge,
                });
            }
        }
    }

    for (parent, node) in forest.nodes().iter().enumerate() {
        let scope = scope_of(parent);
        for (i, &a) in node.children.iter().enumerate() {
            let ca = &forest.node(a).cycle;
            for &b in &node.children[i + 1..] {
                if let Some(edge) = ca.shares_edge_with(&forest.node(b).cycle) {
                    out.push(WitnessViolation::ChildCyclesOverlap {
                        parent,
                        children: [a, b],
                        edge,
                    });
                }
            }
            let edge = forest.node(a).edge;
            if !scope.contains(&edge) {
                out.push(WitnessViolation::ChildOutsideScope {
                    parent,
                    child: a,
                    edge,
                });
            }
        }
    }
    out
}
