//! The clustering loop.
//!
//! [`Mode::Literal`] transcribes the published loop exactly: draw an
//! unvisited line at random, collect its neighbour set, and either emit the
//! set as a new cluster or mark the line as noise. Nothing is expanded, so
//! clusters may overlap and a line may belong to several of them.
//!
//! [`Mode::Expand`] grows each cluster DBSCAN-style through the neighbour
//! sets of core members, giving every line exactly one label.
//!
//! Neither mode stores the relation; working memory is `O(n)`.

pub mod rng;

use std::collections::VecDeque;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::SegmentLike;
use crate::neighborhood::{ConfigError, NeighbourhoodRelation, NeighbourhoodSpec, Relation};

pub use rng::DeliRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClusterId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Cluster(ClusterId),
    Noise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Literal,
    #[default]
    Expand,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Cluster,
    Noise,
}

/// One draw of the main loop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub iteration: usize,
    pub chosen: usize,
    pub neighbours: usize,
    pub decision: Decision,
    pub cluster: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RunStats {
    /// Number of `relates` evaluations.
    pub relation_evals: u64,
    /// Peak bytes held by the engine's own working buffers.
    pub peak_aux_bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterLabels {
    /// Final label per line; in literal mode the lowest cluster id wins.
    pub assignment: Vec<Label>,
    /// Members of `C_1 .. C_k`, each sorted ascending.
    pub clusters: Vec<Vec<usize>>,
    /// Core status of every line whose neighbour set was computed.
    pub core: Vec<Option<bool>>,
    pub seed_order: Vec<usize>,
    pub trace: Vec<TraceEvent>,
    pub clusters_may_overlap: bool,
    pub stats: RunStats,
}

impl ClusterLabels {
    pub fn num_clusters(&self) -> usize {
        self.clusters.len()
    }

    pub fn noise(&self) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == Label::Noise)
            .collect()
    }

    /// Every cluster containing line `i`.
    pub fn memberships(&self, i: usize) -> Vec<ClusterId> {
        self.clusters
            .iter()
            .enumerate()
            .filter(|(_, m)| m.binary_search(&i).is_ok())
            .map(|(j, _)| ClusterId(j as u32 + 1))
            .collect()
    }

    /// Flat labels: cluster ids as `1..=k`, noise as 0.
    pub fn flat(&self) -> Vec<usize> {
        self.assignment
            .iter()
            .map(|l| match l {
                Label::Cluster(c) => c.0 as usize,
                Label::Noise => 0,
            })
            .collect()
    }

    /// Trace as JSON lines.
    pub fn write_trace<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for ev in &self.trace {
            serde_json::to_writer(&mut w, ev)?;
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Picks the next `l_U` from the current unvisited lines.
pub trait Chooser {
    /// Returns a position into `unvisited` (which is sorted ascending).
    fn choose(&mut self, unvisited: &[usize]) -> usize;
}

/// Uniform choice driven by [`DeliRng`].
#[derive(Debug, Clone)]
pub struct SeededChooser(pub DeliRng);

impl SeededChooser {
    pub fn new(seed: u64) -> Self {
        SeededChooser(DeliRng::seed_from_u64(seed))
    }
}

impl Chooser for SeededChooser {
    fn choose(&mut self, unvisited: &[usize]) -> usize {
        self.0.uniform_index(unvisited.len())
    }
}

/// Replays a fixed list of positions; used for hand-checked traces.
#[derive(Debug, Clone)]
pub struct ScriptedChooser {
    positions: Vec<usize>,
    next: usize,
}

impl ScriptedChooser {
    pub fn new(positions: Vec<usize>) -> Self {
        ScriptedChooser { positions, next: 0 }
    }
}

impl Chooser for ScriptedChooser {
    fn choose(&mut self, unvisited: &[usize]) -> usize {
        let p = self.positions[self.next];
        self.next += 1;
        assert!(p < unvisited.len(), "scripted position {p} out of range");
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub spec: NeighbourhoodSpec,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub rng_seed: u64,
    /// Worker threads for one neighbour-set evaluation; 1 runs inline.
    #[serde(default = "one")]
    pub threads: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Unvisited,
    Visited,
    Noise,
}

/// Runs the configured mode over `lines`.
pub fn cluster(lines: &[SegmentLike], cfg: &RunConfig) -> Result<ClusterLabels, ConfigError> {
    let relation = NeighbourhoodRelation::new(lines, &cfg.spec)?;
    let mut chooser = SeededChooser::new(cfg.rng_seed);
    let engine = Engine::new(&relation, cfg.spec.cardinality).threads(cfg.threads);
    Ok(match cfg.mode {
        Mode::Literal => engine.run_literal(&mut chooser),
        Mode::Expand => engine.run_expand(&mut chooser),
    })
}

/// `|neighbor_set(i)| >= c`.
pub fn is_core<R: Relation + ?Sized>(relation: &R, i: usize, cardinality: usize) -> bool {
    (0..relation.len()).filter(|&j| relation.relates(i, j)).count() >= cardinality
}

/// Draw loop over an arbitrary [`Relation`].
pub struct Engine<'r, R: Relation + ?Sized> {
    relation: &'r R,
    cardinality: usize,
    pool: Option<rayon::ThreadPool>,
}

struct Work {
    evals: u64,
    peak_aux: usize,
}

impl Work {
    fn note(&mut self, bytes: usize) {
        self.peak_aux = self.peak_aux.max(bytes);
    }
}

impl<'r, R: Relation + ?Sized> Engine<'r, R> {
    pub fn new(relation: &'r R, cardinality: usize) -> Self {
        Engine {
            relation,
            cardinality,
            pool: None,
        }
    }

    /// Evaluate each neighbour set on `threads` workers (1 = inline).
    pub fn threads(mut self, threads: usize) -> Self {
        self.pool = if threads > 1 {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().ok()
        } else {
            None
        };
        self
    }

    fn neighbours_into(&self, i: usize, out: &mut Vec<usize>, work: &mut Work) {
        let n = self.relation.len();
        out.clear();
        match &self.pool {
            Some(pool) => {
                let rel = self.relation;
                let found: Vec<usize> =
                    pool.install(|| (0..n).into_par_iter().filter(|&j| rel.relates(i, j)).collect());
                out.extend(found);
            }
            None => out.extend((0..n).filter(|&j| self.relation.relates(i, j))),
        }
        work.evals += n as u64;
    }

    /// Plain draw loop: no expansion, overlapping clusters recorded.
    pub fn run_literal(&self, chooser: &mut impl Chooser) -> ClusterLabels {
        let n = self.relation.len();
        let mut work = Work { evals: 0, peak_aux: 0 };
        let mut state = vec![State::Unvisited; n];
        let mut unvisited: Vec<usize> = (0..n).collect();
        let mut nbrs: Vec<usize> = Vec::with_capacity(n);
        let mut core = vec![None; n];
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        let mut seed_order = Vec::new();
        let mut trace = Vec::new();
        let aux = |u: &Vec<usize>, b: &Vec<usize>| {
            n * std::mem::size_of::<State>() + (u.capacity() + b.capacity()) * std::mem::size_of::<usize>()
        };
        work.note(aux(&unvisited, &nbrs));

        while !unvisited.is_empty() {
            let pos = chooser.choose(&unvisited);
            let u = unvisited[pos];
            seed_order.push(u);
            self.neighbours_into(u, &mut nbrs, &mut work);
            work.note(aux(&unvisited, &nbrs));
            let is_core = nbrs.len() >= self.cardinality;
            core[u] = Some(is_core);
            let iteration = trace.len();
            if is_core {
                state[u] = State::Visited;
                let mut members = nbrs.clone();
                if members.binary_search(&u).is_err() {
                    members.push(u);
                    members.sort_unstable();
                }
                for &m in &members {
                    state[m] = State::Visited;
                }
                clusters.push(members);
                trace.push(TraceEvent {
                    iteration,
                    chosen: u,
                    neighbours: nbrs.len(),
                    decision: Decision::Cluster,
                    cluster: Some(clusters.len() as u32),
                });
                unvisited.retain(|&i| state[i] == State::Unvisited);
            } else {
                state[u] = State::Noise;
                unvisited.remove(pos);
                trace.push(TraceEvent {
                    iteration,
                    chosen: u,
                    neighbours: nbrs.len(),
                    decision: Decision::Noise,
                    cluster: None,
                });
            }
        }

        let mut assignment = vec![Label::Noise; n];
        for (j, members) in clusters.iter().enumerate().rev() {
            for &m in members {
                assignment[m] = Label::Cluster(ClusterId(j as u32 + 1));
            }
        }
        ClusterLabels {
            assignment,
            clusters,
            core,
            seed_order,
            trace,
            clusters_may_overlap: true,
            stats: RunStats {
                relation_evals: work.evals,
                peak_aux_bytes: work.peak_aux,
            },
        }
    }

    /// DBSCAN-style growth from randomly drawn core lines.
    ///
    /// Non-core lines reached from a core member join as border lines; a
    /// border line reachable from two clusters stays with the first.
    pub fn run_expand(&self, chooser: &mut impl Chooser) -> ClusterLabels {
        let n = self.relation.len();
        let mut work = Work { evals: 0, peak_aux: 0 };
        let mut state = vec![State::Unvisited; n];
        let mut assignment = vec![Label::Noise; n];
        let mut unvisited: Vec<usize> = (0..n).collect();
        let mut nbrs: Vec<usize> = Vec::with_capacity(n);
        let mut queue: VecDeque<usize> = VecDeque::new();
        let mut queued = vec![false; n];
        let mut core = vec![None; n];
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        let mut seed_order = Vec::new();
        let mut trace = Vec::new();
        let aux = |u: &Vec<usize>, b: &Vec<usize>, q: &VecDeque<usize>| {
            n * (std::mem::size_of::<State>() + std::mem::size_of::<Label>() + 1)
                + (u.capacity() + b.capacity() + q.capacity()) * std::mem::size_of::<usize>()
        };

        while !unvisited.is_empty() {
            let pos = chooser.choose(&unvisited);
            let u = unvisited[pos];
            seed_order.push(u);
            self.neighbours_into(u, &mut nbrs, &mut work);
            work.note(aux(&unvisited, &nbrs, &queue));
            state[u] = State::Visited;
            let is_core = nbrs.len() >= self.cardinality;
            core[u] = Some(is_core);
            let iteration = trace.len();
            if !is_core {
                state[u] = State::Noise;
                unvisited.remove(pos);
                trace.push(TraceEvent {
                    iteration,
                    chosen: u,
                    neighbours: nbrs.len(),
                    decision: Decision::Noise,
                    cluster: None,
                });
                continue;
            }

            let id = ClusterId(clusters.len() as u32 + 1);
            trace.push(TraceEvent {
                iteration,
                chosen: u,
                neighbours: nbrs.len(),
                decision: Decision::Cluster,
                cluster: Some(id.0),
            });
            let mut members = vec![u];
            assignment[u] = Label::Cluster(id);
            queue.clear();
            for &j in &nbrs {
                if !queued[j] {
                    queued[j] = true;
                    queue.push_back(j);
                }
            }
            while let Some(q) = queue.pop_front() {
                queued[q] = false;
                match state[q] {
                    State::Noise => {
                        if assignment[q] == Label::Noise {
                            assignment[q] = Label::Cluster(id);
                            members.push(q);
                        }
                    }
                    State::Visited => {}
                    State::Unvisited => {
                        state[q] = State::Visited;
                        assignment[q] = Label::Cluster(id);
                        members.push(q);
                        self.neighbours_into(q, &mut nbrs, &mut work);
                        let q_core = nbrs.len() >= self.cardinality;
                        core[q] = Some(q_core);
                        if q_core {
                            for &j in &nbrs {
                                if !queued[j] && state[j] != State::Visited {
                                    queued[j] = true;
                                    queue.push_back(j);
                                }
                            }
                        } else {
                            // Known non-core; never expanded again.
                            state[q] = State::Noise;
                        }
                        work.note(aux(&unvisited, &nbrs, &queue));
                    }
                }
            }
            members.sort_unstable();
            clusters.push(members);
            unvisited.retain(|&i| state[i] == State::Unvisited);
        }

        ClusterLabels {
            assignment,
            clusters,
            core,
            seed_order,
            trace,
            clusters_may_overlap: false,
            stats: RunStats {
                relation_evals: work.evals,
                peak_aux_bytes: work.peak_aux,
            },
        }
    }
}
