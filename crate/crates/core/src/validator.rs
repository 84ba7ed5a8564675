//! EdgeValidation on admissible sequences, the bounds on its success
//! probability, and Monte Carlo checks of those bounds.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::census::CanonicalTree;
use crate::coloring::{assign_with, cycle_through, ColorConfig, ColorError, EdgeColoring, Scratch};
use crate::graph::{Cycle, EdgeId, Graph};
use crate::recolor::{check_witness, WitnessForest};

/// One-sided slack, in binomial standard deviations.
pub const SIGMA_SLACK: f64 = 3.0;
pub const DEFAULT_TRIALS: u64 = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValidationError {
    #[error("half-length k = {0} must be at least 3")]
    ShortCycle(usize),
    #[error("edge {0} not in graph")]
    UnknownEdge(EdgeId),
    #[error("no {len}-cycle has edge {e2} right after edge {e1}")]
    NotAdmissible { e1: EdgeId, e2: EdgeId, len: usize },
    #[error("malformed witness forest: {0}")]
    MalformedForest(String),
    #[error(transparent)]
    Color(#[from] ColorError),
}

/// `(e1, e2, k)`: `e2` follows `e1` on some `2k`-cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AdmissibleTriple {
    pub e1: EdgeId,
    pub e2: EdgeId,
    pub k: usize,
}

impl AdmissibleTriple {
    pub fn new(g: &Graph, e1: EdgeId, e2: EdgeId, k: usize) -> Result<Self, ValidationError> {
        if k < 3 {
            return Err(ValidationError::ShortCycle(k));
        }
        for e in [e1, e2] {
            if e >= g.edge_count() {
                return Err(ValidationError::UnknownEdge(e));
            }
        }
        if g.cycles_with_successive(e1, e2, 2 * k).is_empty() {
            return Err(ValidationError::NotAdmissible { e1, e2, len: 2 * k });
        }
        Ok(AdmissibleTriple { e1, e2, k })
    }
}

/// Every admissible triple of half-length `k`.
pub fn admissible_triples(g: &Graph, k: usize) -> Vec<AdmissibleTriple> {
    let mut out = Vec::new();
    for e1 in 0..g.edge_count() {
        let (u, v) = g.endpoints(e1);
        for w in [u, v] {
            for &(_, e2) in g.neighbors(w) {
                if e2 != e1 {
                    if let Ok(t) = AdmissibleTriple::new(g, e1, e2, k) {
                        out.push(t);
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibleSequence {
    pub triples: Vec<AdmissibleTriple>,
}

impl AdmissibleSequence {
    pub fn new(triples: Vec<AdmissibleTriple>) -> Self {
        AdmissibleSequence { triples }
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn k_list(&self) -> Vec<usize> {
        self.triples.iter().map(|t| t.k).collect()
    }
}

/// The cycle recolored in each phase of a successful validation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuccessCertificate {
    pub cycles: Vec<Cycle>,
}

/// The sequence of `(edge, successor, |C|/2)` over the forest's nodes in
/// depth-first order.
pub fn admissible_from_forest(
    forest: &WitnessForest,
    g: &Graph,
) -> Result<AdmissibleSequence, ValidationError> {
    if let Some(v) = check_witness(forest, g).into_iter().next() {
        return Err(ValidationError::MalformedForest(format!("{v:?}")));
    }
    let mut triples = Vec::with_capacity(forest.nodes().len());
    for id in forest.preorder() {
        let node = forest.node(id);
        let e2 = node.cycle.successor(node.edge).ok_or_else(|| {
            ValidationError::MalformedForest(format!("node {id}: edge off its cycle"))
        })?;
        triples.push(AdmissibleTriple {
            e1: node.edge,
            e2,
            k: node.cycle.len() / 2,
        });
    }
    Ok(AdmissibleSequence { triples })
}

/// EdgeValidation: colors every edge, then for each triple looks for the
/// bichromatic `2k`-cycle on which `e2` follows `e1` and recolors its scope
/// from `e1`. Fails at the first phase without such a cycle.
///
/// Under a proper coloring the candidate is unique: it is the cycle of the
/// two colors of `e1` and `e2` through `e1`.
pub fn edge_validation(
    g: &Graph,
    seq: &AdmissibleSequence,
    cfg: &ColorConfig,
    rng: &mut impl Rng,
) -> Result<Option<SuccessCertificate>, ColorError> {
    let mut col = EdgeColoring::empty(g.edge_count());
    let mut scratch = Scratch::default();
    for e in 0..g.edge_count() {
        assign_with(g, &mut col, e, cfg.palette_size, rng, &mut scratch)?;
    }
    let mut cycles = Vec::with_capacity(seq.len());
    for t in &seq.triples {
        let Some(other) = col.get(t.e2) else {
            return Ok(None);
        };
        let Some(walk) = cycle_through(g, &col, t.e1, other) else {
            return Ok(None);
        };
        let cycle = Cycle::from_edges(g, &walk)?;
        if cycle.len() != 2 * t.k || cycle.successor(t.e1) != Some(t.e2) {
            return Ok(None);
        }
        for f in cycle.scope(t.e1)?.edges {
            assign_with(g, &mut col, f, cfg.palette_size, rng, &mut scratch)?;
        }
        cycles.push(cycle);
    }
    Ok(Some(SuccessCertificate { cycles }))
}

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn gamma_big(gamma: num_rational::Rational64) -> BigRational {
    BigRational::new(BigInt::from(*gamma.numer()), BigInt::from(*gamma.denom()))
}

/// `q^s prod_i (1 - (1 - q)^(delta-1))^(2k_i - 3)` with `q = 1/(gamma(delta-1)+1)`.
pub fn success_bound(
    k_list: &[usize],
    gamma: num_rational::Rational64,
    delta: usize,
) -> BigRational {
    let d = delta as i64 - 1;
    let q = big(1) / (gamma_big(gamma) * big(d) + big(1));
    let miss = num_traits::pow(big(1) - &q, d as usize);
    let hit = big(1) - miss;
    k_list.iter().fold(BigRational::one(), |acc, &k| {
        acc * &q * num_traits::pow(hit.clone(), 2 * k - 3)
    })
}

/// `(delta-1)^-s prod_i (1/gamma)(1 - e^(-1/gamma))^(2k_i - 3)`.
pub fn success_bound_relaxed(k_list: &[usize], gamma: f64, delta: usize) -> f64 {
    let hit = 1.0 - (-1.0 / gamma).exp();
    k_list
        .iter()
        .map(|&k| hit.powi(2 * k as i32 - 3) / (gamma * (delta - 1) as f64))
        .product()
}

/// `(1 - e^(-1/gamma))^(3/4)`.
pub fn decay_threshold(gamma: f64) -> f64 {
    (1.0 - (-1.0 / gamma).exp()).powf(0.75)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestEventBound {
    /// `prod over internal nodes (1/gamma)(1 - e^(-1/gamma))^(outdegree - 1)`.
    pub product: f64,
    /// `(1 - e^(-1/gamma))^(3/4 |F|)`.
    pub relaxed: f64,
    /// `(1 - e^(-1/gamma))^(-3/4 t)` for `t` trees: roots receive no share.
    pub constant: f64,
    pub holds: bool,
}

/// Bound on the probability of the event attached to an unmarked forest.
///
/// Each internal node hands its exponent `2k - 3` in equal parts to its
/// `2k - 2` children, at least `3/4` each; every non-root node receives
/// one share.
pub fn forest_event_bound(forest: &[CanonicalTree], gamma: f64) -> ForestEventBound {
    let hit = 1.0 - (-1.0 / gamma).exp();
    let mut product = 1.0;
    let mut size = 0;
    for tree in forest {
        size += tree.size();
        for d in tree.internal_outdegrees() {
            product *= hit.powi(d as i32 - 1) / gamma;
        }
    }
    let relaxed = hit.powf(0.75 * size as f64);
    let constant = hit.powf(-0.75 * forest.len() as f64);
    let holds = product <= constant * relaxed * (1.0 + 1e-12);
    ForestEventBound {
        product,
        relaxed,
        constant,
        holds,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub s: usize,
    pub k_list: Vec<usize>,
    /// Exact bound as `numerator/denominator`.
    pub bound_exact_rational: String,
    pub bound_exact: f64,
    pub bound_relaxed: f64,
    pub successes: u64,
    pub empirical: f64,
    pub trials: u64,
    pub sigma: f64,
    pub pass: bool,
}

/// Runs EdgeValidation `trials` times, trial `t` on stream `t` of a
/// generator seeded from `seed`, and compares the success rate with
/// [`success_bound_relaxed`] plus [`SIGMA_SLACK`] standard deviations.
pub fn monte_carlo(
    g: &Graph,
    seq: &AdmissibleSequence,
    cfg: &ColorConfig,
    trials: u64,
    seed: u64,
) -> Result<ValidationReport, ColorError> {
    let successes = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            edge_validation(g, seq, cfg, &mut rng).map(|c| u64::from(c.is_some()))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let delta = g.max_degree();
    let k_list = seq.k_list();
    let exact = success_bound(&k_list, cfg.gamma, delta);
    let bound_exact = exact.to_f64().unwrap_or(f64::NAN);
    let bound_relaxed = success_bound_relaxed(&k_list, cfg.gamma_f64(), delta);
    let empirical = successes as f64 / trials.max(1) as f64;
    let p = bound_relaxed.min(1.0);
    let sigma = (p * (1.0 - p) / trials.max(1) as f64).sqrt();
    let pass = empirical <= bound_relaxed + SIGMA_SLACK * sigma && bound_exact <= bound_relaxed;
    Ok(ValidationReport {
        s: seq.len(),
        k_list,
        bound_exact_rational: exact.to_string(),
        bound_exact,
        bound_relaxed,
        successes,
        empirical,
        trials,
        sigma,
        pass,
    })
}
