//! Palettes, the forbidden-color rule that keeps colorings proper and
//! 4-acyclic, bichromatic cycle detection and coloring verification.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, ToPrimitive};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Cycle, EdgeId, Graph, GraphError, VertexId};

pub type Color = u32;

/// Palette coefficient used when no gamma is given (`2 + gamma = 3.142`).
pub const DEFAULT_GAMMA: &str = "1.142";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ColorError {
    #[error("gamma must be at least 1, got {0}")]
    GammaTooSmall(Rational64),
    #[error("cannot parse gamma `{0}`")]
    BadGamma(String),
    #[error("maximum degree {0} is below 2")]
    DegreeTooSmall(usize),
    #[error("palette of {given} colors is below the required {required}")]
    PaletteTooSmall { given: usize, required: usize },
    #[error("edges {0} and {1} share a vertex and color {2}")]
    Improper(EdgeId, EdgeId, Color),
    #[error("edge {0} is uncolored")]
    Uncolored(EdgeId),
    #[error("no safe color for edge {edge} (palette {palette}, {forbidden} forbidden)")]
    NoSafeColor {
        edge: EdgeId,
        palette: usize,
        forbidden: usize,
    },
    #[error("coloring has {got} entries, graph has {expected} edges")]
    LengthMismatch { got: usize, expected: usize },
    #[error("color {color} on edge {edge} is outside the palette")]
    ColorOutOfRange { edge: EdgeId, color: Color },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Parses a decimal (`1.142`) or fraction (`571/500`) into an exact rational.
pub fn parse_gamma(text: &str) -> Result<Rational64, ColorError> {
    let bad = || ColorError::BadGamma(text.to_string());
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational64::new(n, d));
    }
    let (int, frac) = t.split_once('.').unwrap_or((t, ""));
    if frac.len() > 15 || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let int: i64 = if int.is_empty() {
        0
    } else {
        int.parse().map_err(|_| bad())?
    };
    if int < 0 || t.starts_with('-') {
        return Err(bad());
    }
    let scale = 10_i64.pow(frac.len() as u32);
    let frac: i64 = if frac.is_empty() {
        0
    } else {
        frac.parse().map_err(|_| bad())?
    };
    Ok(Rational64::new(int * scale + frac, scale))
}

/// `ceil((2 + gamma)(delta - 1)) + 1`.
pub fn required_palette(gamma: Rational64, delta: usize) -> usize {
    let x = (Rational64::from_integer(2) + gamma) * Rational64::from_integer(delta as i64 - 1);
    let (q, r) = x.numer().div_rem(x.denom());
    (q + i64::from(r > 0)) as usize + 1
}

/// `gamma (delta - 1) + 1`, the guaranteed lower bound on every safe set.
pub fn safe_set_floor(gamma: Rational64, delta: usize) -> Rational64 {
    gamma * Rational64::from_integer(delta as i64 - 1) + Rational64::one()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColorConfig {
    pub gamma: Rational64,
    pub palette_size: usize,
    pub rng_seed: u64,
}

impl ColorConfig {
    /// Checks `gamma >= 1` and that the palette (default: the minimum for
    /// `gamma`) is large enough for `g`.
    pub fn new(
        g: &Graph,
        gamma: Rational64,
        palette: Option<usize>,
        seed: u64,
    ) -> Result<Self, ColorError> {
        if gamma < Rational64::one() {
            return Err(ColorError::GammaTooSmall(gamma));
        }
        let delta = g.max_degree();
        if delta < 2 {
            return Err(ColorError::DegreeTooSmall(delta));
        }
        let required = required_palette(gamma, delta);
        let palette_size = palette.unwrap_or(required);
        if palette_size < required {
            return Err(ColorError::PaletteTooSmall {
                given: palette_size,
                required,
            });
        }
        Ok(ColorConfig {
            gamma,
            palette_size,
            rng_seed: seed,
        })
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        ColorConfig {
            rng_seed: seed,
            ..self.clone()
        }
    }

    pub fn gamma_f64(&self) -> f64 {
        self.gamma.to_f64().unwrap_or(f64::NAN)
    }
}

/// Partial assignment edge → color.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeColoring {
    colors: Vec<Option<Color>>,
}

impl EdgeColoring {
    pub fn empty(edge_count: usize) -> Self {
        EdgeColoring {
            colors: vec![None; edge_count],
        }
    }

    pub fn from_colors(colors: Vec<Option<Color>>) -> Self {
        EdgeColoring { colors }
    }

    pub fn total(colors: &[Color]) -> Self {
        EdgeColoring {
            colors: colors.iter().copied().map(Some).collect(),
        }
    }

    pub fn get(&self, e: EdgeId) -> Option<Color> {
        self.colors[e]
    }

    pub fn set(&mut self, e: EdgeId, c: Color) {
        self.colors[e] = Some(c);
    }

    pub fn clear(&mut self, e: EdgeId) {
        self.colors[e] = None;
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn is_total(&self) -> bool {
        self.colors.iter().all(Option::is_some)
    }

    pub fn as_slice(&self) -> &[Option<Color>] {
        &self.colors
    }

    /// `[{"edge": [u, v], "color": c}, ...]` with original vertex labels.
    pub fn to_json(&self, g: &Graph) -> serde_json::Value {
        let entries: Vec<ColoredEdge> = (0..g.edge_count())
            .filter_map(|e| {
                self.colors[e].map(|color| {
                    let (u, v) = g.edge_labels(e);
                    ColoredEdge {
                        edge: [u, v],
                        color,
                    }
                })
            })
            .collect();
        serde_json::to_value(entries).expect("plain data")
    }

    pub fn from_json(g: &Graph, value: &serde_json::Value) -> Result<Self, ColorError> {
        let entries: Vec<ColoredEdge> = serde_json::from_value(value.clone()).map_err(|e| {
            ColorError::Graph(GraphError::Parse {
                line: 0,
                message: e.to_string(),
            })
        })?;
        let mut col = EdgeColoring::empty(g.edge_count());
        for entry in entries {
            let [u, v] = entry.edge;
            let missing = |l: i64| GraphError::Parse {
                line: 0,
                message: format!("unknown vertex {l}"),
            };
            let a = g.vertex_by_label(u).ok_or_else(|| missing(u))?;
            let b = g.vertex_by_label(v).ok_or_else(|| missing(v))?;
            let e = g.edge_between(a, b).ok_or_else(|| GraphError::Parse {
                line: 0,
                message: format!("no edge {{{u}, {v}}} in graph"),
            })?;
            col.set(e, entry.color);
        }
        Ok(col)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ColoredEdge {
    edge: [i64; 2],
    color: Color,
}

/// Color of the unique edge at `v` with color `c`, ignoring `skip`.
fn edge_with_color(
    g: &Graph,
    col: &EdgeColoring,
    v: VertexId,
    c: Color,
    skip: EdgeId,
) -> Option<(VertexId, EdgeId)> {
    g.neighbors(v)
        .iter()
        .copied()
        .find(|&(_, f)| f != skip && col.get(f) == Some(c))
}

/// Visits every color that assigning to `e` would make improper or create a
/// bichromatic 4-cycle. Colors may be visited more than once.
fn visit_forbidden(g: &Graph, col: &EdgeColoring, e: EdgeId, mut visit: impl FnMut(Color)) {
    let (u, v) = g.endpoints(e);
    for &(x, f) in g.neighbors(u) {
        if f == e {
            continue;
        }
        let Some(c) = col.get(f) else { continue };
        visit(c);
        // homochromatic pair (u,x), (v,y): the edge {x, y} closes a 4-cycle
        if let Some((y, _)) = edge_with_color(g, col, v, c, e) {
            if y != x {
                if let Some(c3) = g.edge_between(x, y).and_then(|h| col.get(h)) {
                    visit(c3);
                }
            }
        }
    }
    for &(_, f) in g.neighbors(v) {
        if f != e {
            if let Some(c) = col.get(f) {
                visit(c);
            }
        }
    }
}

/// Colors that `e` must avoid to keep the coloring proper and 4-acyclic.
/// The current color of `e` is ignored.
pub fn forbidden_colors(g: &Graph, col: &EdgeColoring, e: EdgeId) -> BTreeSet<Color> {
    let mut out = BTreeSet::new();
    visit_forbidden(g, col, e, |c| {
        out.insert(c);
    });
    out
}

/// Outcome of one random color assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Assignment {
    pub edge: EdgeId,
    pub color: Color,
    pub safe_count: usize,
    pub forbidden_count: usize,
}

/// Reusable marker buffer for the safe-set computation.
#[derive(Debug, Default)]
pub(crate) struct Scratch {
    marks: Vec<u64>,
    stamp: u64,
    safe: Vec<Color>,
}

impl Scratch {
    pub(crate) fn safe_set(
        &mut self,
        g: &Graph,
        col: &EdgeColoring,
        e: EdgeId,
        palette: usize,
    ) -> usize {
        if self.marks.len() < palette {
            self.marks.resize(palette, 0);
        }
        self.stamp += 1;
        let stamp = self.stamp;
        let marks = &mut self.marks;
        let mut forbidden = 0;
        visit_forbidden(g, col, e, |c| {
            if let Some(m) = marks.get_mut(c as usize) {
                if *m != stamp {
                    *m = stamp;
                    forbidden += 1;
                }
            }
        });
        self.safe.clear();
        self.safe
            .extend((0..palette as Color).filter(|&c| self.marks[c as usize] != stamp));
        forbidden
    }
}

pub(crate) fn assign_with(
    g: &Graph,
    col: &mut EdgeColoring,
    e: EdgeId,
    palette: usize,
    rng: &mut impl Rng,
    scratch: &mut Scratch,
) -> Result<Assignment, ColorError> {
    let forbidden = scratch.safe_set(g, col, e, palette);
    let safe = &scratch.safe;
    if safe.is_empty() {
        return Err(ColorError::NoSafeColor {
            edge: e,
            palette,
            forbidden,
        });
    }
    let color = safe[rng.gen_range(0..safe.len())];
    col.set(e, color);
    Ok(Assignment {
        edge: e,
        color,
        safe_count: safe.len(),
        forbidden_count: forbidden,
    })
}

/// Assigns `e` a color drawn uniformly from the palette minus
/// [`forbidden_colors`].
pub fn assign_safe_color(
    g: &Graph,
    col: &mut EdgeColoring,
    e: EdgeId,
    cfg: &ColorConfig,
    rng: &mut impl Rng,
) -> Result<Assignment, ColorError> {
    assign_with(g, col, e, cfg.palette_size, rng, &mut Scratch::default())
}

/// First pair of adjacent edges sharing a color, ignoring uncolored edges.
pub fn find_improper_pair(g: &Graph, col: &EdgeColoring) -> Option<(EdgeId, EdgeId, Color)> {
    for v in 0..g.vertex_count() {
        let nb = g.neighbors(v);
        for (i, &(_, f)) in nb.iter().enumerate() {
            let Some(c) = col.get(f) else { continue };
            if let Some(&(_, h)) = nb[i + 1..].iter().find(|&&(_, h)| col.get(h) == Some(c)) {
                return Some((f.min(h), f.max(h), c));
            }
        }
    }
    None
}

fn ensure_proper(g: &Graph, col: &EdgeColoring) -> Result<(), ColorError> {
    if col.len() != g.edge_count() {
        return Err(ColorError::LengthMismatch {
            got: col.len(),
            expected: g.edge_count(),
        });
    }
    match find_improper_pair(g, col) {
        Some((a, b, c)) => Err(ColorError::Improper(a, b, c)),
        None => Ok(()),
    }
}

/// Every bichromatic cycle, each in canonical traversal, sorted.
///
/// Works one color pair at a time: under a proper coloring the edges of two
/// colors form paths and cycles. Uncolored edges are ignored.
pub fn bichromatic_cycles(g: &Graph, col: &EdgeColoring) -> Result<Vec<Cycle>, ColorError> {
    ensure_proper(g, col)?;
    let palette: BTreeSet<Color> = col.as_slice().iter().flatten().copied().collect();
    let palette: Vec<Color> = palette.into_iter().collect();
    let mut cycles = Vec::new();
    let mut visited = vec![usize::MAX; g.edge_count()];
    let mut pair_id = 0;
    for (i, &a) in palette.iter().enumerate() {
        for &b in &palette[i + 1..] {
            pair_id += 1;
            for start in 0..g.edge_count() {
                let c = col.get(start);
                if (c != Some(a) && c != Some(b)) || visited[start] == pair_id {
                    continue;
                }
                if let Some(walk) = two_color_walk(g, col, start, [a, b]) {
                    for &e in &walk {
                        visited[e] = pair_id;
                    }
                    cycles.push(Cycle::from_edges(g, &walk)?);
                } else {
                    visited[start] = pair_id;
                }
            }
        }
    }
    cycles.sort();
    Ok(cycles)
}

/// Follows the `{a, b}`-colored component of `start` in one direction and
/// returns its edges if the component closes into a cycle.
fn two_color_walk(
    g: &Graph,
    col: &EdgeColoring,
    start: EdgeId,
    pair: [Color; 2],
) -> Option<Vec<EdgeId>> {
    let first = col.get(start)?;
    let other = if first == pair[0] { pair[1] } else { pair[0] };
    let (u, v) = g.endpoints(start);
    let mut walk = vec![start];
    let (mut at, mut want, mut last) = (v, other, start);
    loop {
        let (next, f) = edge_with_color(g, col, at, want, last)?;
        if f == start {
            return Some(walk);
        }
        walk.push(f);
        if next == u {
            // closes only if the edge into u has the color u is missing
            return (want == other).then_some(walk);
        }
        if walk.len() > g.vertex_count() {
            return None;
        }
        at = next;
        last = f;
        want = if want == first { other } else { first };
    }
}

/// The bichromatic cycle through `e` using colors `{col(e), other}`, if any.
pub(crate) fn cycle_through(
    g: &Graph,
    col: &EdgeColoring,
    e: EdgeId,
    other: Color,
) -> Option<Vec<EdgeId>> {
    let c = col.get(e)?;
    if c == other {
        return None;
    }
    two_color_walk(g, col, e, [c, other])
}

/// Least bichromatic cycle through `e` (by sorted color pair), if any.
pub(crate) fn least_cycle_through(g: &Graph, col: &EdgeColoring, e: EdgeId) -> Option<Cycle> {
    let c = col.get(e)?;
    let (_, v) = g.endpoints(e);
    let mut best: Option<((Color, Color), Vec<EdgeId>)> = None;
    for &(_, f) in g.neighbors(v) {
        let Some(b) = col.get(f) else { continue };
        if f == e || b == c {
            continue;
        }
        let key = (c.min(b), c.max(b));
        if best.as_ref().is_some_and(|(k, _)| *k <= key) {
            continue;
        }
        if let Some(walk) = cycle_through(g, col, e, b) {
            best = Some((key, walk));
        }
    }
    best.map(|(_, walk)| Cycle::from_edges(g, &walk).expect("two-color walk is a cycle"))
}

pub(crate) fn first_flawed_unchecked(
    g: &Graph,
    col: &EdgeColoring,
    restrict: Option<&[EdgeId]>,
) -> Option<(EdgeId, Cycle)> {
    let search = |e: EdgeId| least_cycle_through(g, col, e).map(|c| (e, c));
    match restrict {
        None => (0..g.edge_count()).find_map(search),
        Some(set) => {
            let mut ordered = set.to_vec();
            ordered.sort_unstable();
            ordered.dedup();
            ordered.into_iter().find_map(search)
        }
    }
}

/// The first edge (in edge order, optionally within `restrict`) lying on a
/// bichromatic cycle, with the bichromatic cycle through it whose color pair
/// is lexicographically least.
pub fn first_flawed(
    g: &Graph,
    col: &EdgeColoring,
    restrict: Option<&[EdgeId]>,
) -> Result<Option<(EdgeId, Cycle)>, ColorError> {
    ensure_proper(g, col)?;
    Ok(first_flawed_unchecked(g, col, restrict))
}

/// Edges lying on at least one bichromatic cycle.
pub(crate) fn edges_on_bichromatic_cycles(g: &Graph, col: &EdgeColoring) -> Vec<bool> {
    (0..g.edge_count())
        .map(|e| least_cycle_through(g, col, e).is_some())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Uncolored {
        edge: EdgeId,
    },
    AdjacentSameColor {
        edges: [EdgeId; 2],
        color: Color,
    },
    BichromaticCycle {
        edges: Vec<EdgeId>,
        colors: [Color; 2],
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub proper: bool,
    pub four_acyclic: bool,
    pub acyclic: bool,
    pub witness: Option<Witness>,
}

fn cycle_colors(col: &EdgeColoring, c: &Cycle) -> [Color; 2] {
    let a = col.get(c.edges()[0]).unwrap_or_default();
    let b = col.get(c.edges()[1]).unwrap_or_default();
    [a.min(b), a.max(b)]
}

/// Checks properness, 4-acyclicity and acyclicity of a total coloring.
pub fn verify(g: &Graph, col: &EdgeColoring) -> VerifyReport {
    let fail = |witness| VerifyReport {
        proper: false,
        four_acyclic: false,
        acyclic: false,
        witness: Some(witness),
    };
    if col.len() != g.edge_count() {
        return fail(Witness::Uncolored {
            edge: col.len().min(g.edge_count()),
        });
    }
    if let Some(edge) = (0..g.edge_count()).find(|&e| col.get(e).is_none()) {
        return fail(Witness::Uncolored { edge });
    }
    if let Some((a, b, color)) = find_improper_pair(g, col) {
        return fail(Witness::AdjacentSameColor {
            edges: [a, b],
            color,
        });
    }
    let cycles = bichromatic_cycles(g, col).expect("checked proper");
    let witness_of = |c: &Cycle| Witness::BichromaticCycle {
        edges: c.edges().to_vec(),
        colors: cycle_colors(col, c),
    };
    if let Some(c4) = cycles.iter().find(|c| c.len() == 4) {
        return VerifyReport {
            proper: true,
            four_acyclic: false,
            acyclic: false,
            witness: Some(witness_of(c4)),
        };
    }
    match cycles.first() {
        Some(c) => VerifyReport {
            proper: true,
            four_acyclic: true,
            acyclic: false,
            witness: Some(witness_of(c)),
        },
        None => VerifyReport {
            proper: true,
            four_acyclic: true,
            acyclic: true,
            witness: None,
        },
    }
}
