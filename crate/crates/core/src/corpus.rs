//! Bundled test graphs: complete graphs K4..K8, the Petersen graph, the
//! hypercubes Q3 and Q4, three random cubic graphs with fixed seeds and two
//! trees.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

pub const NAMES: [&str; 13] = [
    "K4",
    "K5",
    "K6",
    "K7",
    "K8",
    "petersen",
    "Q3",
    "Q4",
    "cubic10-a",
    "cubic12-b",
    "cubic14-c",
    "tree-spider",
    "tree-binary",
];

const CUBIC: [(&str, usize, u64); 3] = [
    ("cubic10-a", 10, 11),
    ("cubic12-b", 12, 23),
    ("cubic14-c", 14, 37),
];

pub fn complete(n: usize) -> Graph {
    let edges: Vec<_> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    Graph::new(n, &edges).expect("complete graph is simple")
}

pub fn petersen() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
    }
    Graph::new(10, &edges).expect("petersen graph is simple")
}

pub fn hypercube(d: u32) -> Graph {
    let n = 1usize << d;
    let edges: Vec<_> = (0..n)
        .flat_map(|u| {
            (0..d)
                .map(move |b| (u, u ^ (1 << b)))
                .filter(|&(u, v)| u < v)
        })
        .collect();
    Graph::new(n, &edges).expect("hypercube is simple")
}

/// Random cubic graph from the pairing model, resampled until simple.
pub fn random_cubic(n: usize, seed: u64) -> Graph {
    assert!(
        n.is_multiple_of(2) && n >= 4,
        "cubic graphs need an even number of vertices >= 4"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<usize> = (0..3 * n).map(|p| p / 3).collect();
    loop {
        points.shuffle(&mut rng);
        let edges: Vec<_> = points.chunks(2).map(|p| (p[0], p[1])).collect();
        if let Ok(g) = Graph::new(n, &edges) {
            return g;
        }
    }
}

/// Three legs of length three joined at a center.
pub fn spider() -> Graph {
    let edges = [
        (0, 1),
        (1, 2),
        (2, 3),
        (0, 4),
        (4, 5),
        (5, 6),
        (0, 7),
        (7, 8),
        (8, 9),
    ];
    Graph::new(10, &edges).expect("spider is simple")
}

/// Complete binary tree on 15 vertices.
pub fn binary_tree() -> Graph {
    let edges: Vec<_> = (1..15).map(|v| ((v - 1) / 2, v)).collect();
    Graph::new(15, &edges).expect("binary tree is simple")
}

pub fn by_name(name: &str) -> Option<Graph> {
    let g = match name {
        "K4" | "K5" | "K6" | "K7" | "K8" => complete(name[1..].parse().ok()?),
        "petersen" => petersen(),
        "Q3" => hypercube(3),
        "Q4" => hypercube(4),
        "tree-spider" => spider(),
        "tree-binary" => binary_tree(),
        _ => {
            let &(_, n, seed) = CUBIC.iter().find(|(c, _, _)| *c == name)?;
            random_cubic(n, seed)
        }
    };
    Some(g)
}

pub fn all() -> Vec<(&'static str, Graph)> {
    NAMES
        .iter()
        .map(|&name| (name, by_name(name).expect("bundled name")))
        .collect()
}
