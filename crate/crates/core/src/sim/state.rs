use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::fenwick::CumulativeIndex;
use super::occupancy::{EmpiricalJoint, Occupancy, OccupancyCaps};
use super::uniform::{uniform_pair, uniform_triple};
use super::SimError;
use crate::params::ModelParams;

/// Name of the generator, recorded in run metadata.
pub const RNG_ALGORITHM: &str =
    "ChaCha8 (rand_chacha 0.3), key = seed_from_u64(seed) (PCG32-expanded), stream = replication stream id";

/// How the interacting triple of a step was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// New vertex joins the endpoints of a weight-proportional edge.
    NewPreferential,
    /// New vertex joins two uniformly chosen old vertices.
    NewUniform,
    /// Weight-proportional triangle of old vertices.
    OldPreferential,
    /// Uniform triple of old vertices.
    OldUniform,
    /// Triple supplied by the caller, see [`Graph::apply_triple`].
    Scripted,
}

impl Branch {
    pub const RANDOM: [Branch; 4] = [
        Branch::NewPreferential,
        Branch::NewUniform,
        Branch::OldPreferential,
        Branch::OldUniform,
    ];

    pub fn adds_vertex(self) -> bool {
        matches!(self, Branch::NewPreferential | Branch::NewUniform)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub step: u64,
    pub branch: Branch,
    /// Labels of the interacting vertices; a new vertex comes first.
    pub triple: [i64; 3],
    pub created_edges: u8,
    pub new_vertex: Option<i64>,
}

/// A sampled but not yet applied interaction, in vertex indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interaction {
    pub branch: Branch,
    /// `vertices[0]` is the new vertex when `new_vertex` is set.
    pub vertices: [u32; 3],
    pub new_vertex: bool,
    /// Position of the edge `vertices[1]-vertices[2]` when already known.
    edge_hint: Option<u32>,
    /// Position of the triangle when already known.
    triangle_hint: Option<u32>,
}

impl Interaction {
    /// The interacting vertices as labels.
    pub fn labels(&self) -> [i64; 3] {
        self.vertices.map(label_of)
    }
}

#[inline]
pub(crate) fn label_of(index: u32) -> i64 {
    index as i64 - 2
}

#[inline]
fn edge_key(a: u32, b: u32) -> u64 {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    (a as u64) << 32 | b as u64
}

#[inline]
fn sorted3(mut t: [u32; 3]) -> [u32; 3] {
    t.sort_unstable();
    t
}

#[inline]
fn triangle_key(t: [u32; 3]) -> u128 {
    let [a, b, c] = sorted3(t);
    (a as u128) << 64 | (b as u128) << 32 | c as u128
}

/// The evolving graph: vertex weights and degrees, weighted edges and
/// triangles, and the derived occupancy table.
///
/// Vertices are stored by index; index `i` carries label `i - 2`, so the
/// initial triangle is `-2, -1, 0` and later vertices are `1, 2, ...` in
/// birth order.
#[derive(Debug, Clone)]
pub struct Graph {
    params: ModelParams,
    p: f64,
    q: f64,
    r: f64,
    step: u64,
    new_vertex_steps: u64,
    weights: Vec<u64>,
    degrees: Vec<u64>,
    births: Vec<u64>,
    edges: Vec<[u32; 2]>,
    edge_lookup: FxHashMap<u64, u32>,
    edge_index: CumulativeIndex,
    triangles: Vec<[u32; 3]>,
    triangle_lookup: FxHashMap<u128, u32>,
    triangle_index: CumulativeIndex,
    occupancy: Occupancy,
    max_weight: u64,
    max_degree: u64,
}

impl Graph {
    /// The initial triangle: three vertices, three edges and one triangle,
    /// all of weight one.
    pub fn new(params: ModelParams, caps: OccupancyCaps) -> Self {
        let mut g = Self::empty(params, caps);
        for _ in 0..3 {
            g.weights.push(1);
            g.degrees.push(2);
            g.births.push(0);
            g.occupancy.add(2, 1);
        }
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            g.edge_lookup.insert(edge_key(a, b), g.edges.len() as u32);
            g.edges.push([a, b]);
            g.edge_index.push(1);
        }
        g.triangle_lookup.insert(triangle_key([0, 1, 2]), 0);
        g.triangles.push([0, 1, 2]);
        g.triangle_index.push(1);
        g.max_weight = 1;
        g.max_degree = 2;
        g
    }

    fn empty(params: ModelParams, caps: OccupancyCaps) -> Self {
        Self {
            p: params.p_f64(),
            q: params.q_f64(),
            r: params.r_f64(),
            params,
            step: 0,
            new_vertex_steps: 0,
            weights: Vec::new(),
            degrees: Vec::new(),
            births: Vec::new(),
            edges: Vec::new(),
            edge_lookup: FxHashMap::default(),
            edge_index: CumulativeIndex::new(),
            triangles: Vec::new(),
            triangle_lookup: FxHashMap::default(),
            triangle_index: CumulativeIndex::new(),
            occupancy: Occupancy::new(caps),
            max_weight: 0,
            max_degree: 0,
        }
    }

    /// Pre-allocates room for the edges and triangles expected in the next
    /// `steps` steps.
    pub fn reserve(&mut self, steps: u64) {
        let (p, q) = (self.p, self.q);
        let uniform_old = (1.0 - p) * (1.0 - q);
        let edges = ((2.0 * p + 3.0 * uniform_old) * steps as f64) as usize;
        let triangles = ((p + uniform_old) * steps as f64) as usize;
        let vertices = (p * steps as f64) as usize;
        self.edges.reserve(edges);
        self.edge_lookup.reserve(edges);
        self.edge_index.reserve(edges);
        self.triangles.reserve(triangles);
        self.triangle_lookup.reserve(triangles);
        self.triangle_index.reserve(triangles);
        self.weights.reserve(vertices);
        self.degrees.reserve(vertices);
        self.births.reserve(vertices);
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Number of completed steps `n`.
    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn vertex_count(&self) -> u64 {
        self.weights.len() as u64
    }

    pub fn new_vertex_steps(&self) -> u64 {
        self.new_vertex_steps
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn total_edge_weight(&self) -> u64 {
        self.edge_index.total()
    }

    pub fn total_triangle_weight(&self) -> u64 {
        self.triangle_index.total()
    }

    pub fn max_weight(&self) -> u64 {
        self.max_weight
    }

    pub fn max_degree(&self) -> u64 {
        self.max_degree
    }

    pub fn caps(&self) -> OccupancyCaps {
        self.occupancy.caps()
    }

    fn index_of(&self, label: i64) -> Option<u32> {
        let i = label.checked_add(2)?;
        (i >= 0 && (i as u64) < self.vertex_count()).then_some(i as u32)
    }

    pub fn labels(&self) -> impl Iterator<Item = i64> {
        (0..self.vertex_count() as u32).map(label_of)
    }

    /// `W[n, j]`, or zero if vertex `j` does not exist yet.
    pub fn weight(&self, label: i64) -> u64 {
        self.index_of(label).map_or(0, |i| self.weights[i as usize])
    }

    /// `D[n, j]`, or zero if vertex `j` does not exist yet.
    pub fn degree(&self, label: i64) -> u64 {
        self.index_of(label).map_or(0, |i| self.degrees[i as usize])
    }

    pub fn birth_step(&self, label: i64) -> Option<u64> {
        self.index_of(label).map(|i| self.births[i as usize])
    }

    pub fn has_edge(&self, a: i64, b: i64) -> bool {
        self.edge_weight(a, b) > 0
    }

    pub fn edge_weight(&self, a: i64, b: i64) -> u64 {
        match (self.index_of(a), self.index_of(b)) {
            (Some(a), Some(b)) => self
                .edge_lookup
                .get(&edge_key(a, b))
                .map_or(0, |&e| self.edge_index.weight(e as usize)),
            _ => 0,
        }
    }

    pub fn triangle_weight(&self, t: [i64; 3]) -> u64 {
        let idx: Option<Vec<u32>> = t.iter().map(|&l| self.index_of(l)).collect();
        match idx {
            Some(v) => self
                .triangle_lookup
                .get(&triangle_key([v[0], v[1], v[2]]))
                .map_or(0, |&k| self.triangle_index.weight(k as usize)),
            None => 0,
        }
    }

    /// Edges as `(label, label, weight)` in insertion order.
    pub fn edges(&self) -> impl Iterator<Item = (i64, i64, u64)> + '_ {
        self.edges
            .iter()
            .zip(self.edge_index.weights())
            .map(|([a, b], w)| (label_of(*a), label_of(*b), *w))
    }

    /// Triangles as `([label; 3], weight)` in insertion order.
    pub fn triangles(&self) -> impl Iterator<Item = ([i64; 3], u64)> + '_ {
        self.triangles
            .iter()
            .zip(self.triangle_index.weights())
            .map(|(t, w)| (t.map(label_of), *w))
    }

    pub fn occupancy(&self) -> EmpiricalJoint {
        self.occupancy.snapshot(self.step, self.vertex_count())
    }

    /// Draws the next interaction without changing the graph.
    pub fn sample_interaction<R: Rng + ?Sized>(&self, rng: &mut R) -> Interaction {
        let v = self.vertex_count() as u32;
        if self.p >= 1.0 || rng.gen::<f64>() < self.p {
            if self.r >= 1.0 || (self.r > 0.0 && rng.gen::<f64>() < self.r) {
                let e = self.edge_index.sample(rng).expect("edge weights are positive");
                let [a, b] = self.edges[e];
                Interaction {
                    branch: Branch::NewPreferential,
                    vertices: [v, a, b],
                    new_vertex: true,
                    edge_hint: Some(e as u32),
                    triangle_hint: None,
                }
            } else {
                let [a, b] = uniform_pair(rng, v);
                Interaction {
                    branch: Branch::NewUniform,
                    vertices: [v, a, b],
                    new_vertex: true,
                    edge_hint: None,
                    triangle_hint: None,
                }
            }
        } else if self.q >= 1.0 || (self.q > 0.0 && rng.gen::<f64>() < self.q) {
            let t = self
                .triangle_index
                .sample(rng)
                .expect("triangle weights are positive");
            Interaction {
                branch: Branch::OldPreferential,
                vertices: self.triangles[t],
                new_vertex: false,
                edge_hint: None,
                triangle_hint: Some(t as u32),
            }
        } else {
            Interaction {
                branch: Branch::OldUniform,
                vertices: uniform_triple(rng, v),
                new_vertex: false,
                edge_hint: None,
                triangle_hint: None,
            }
        }
    }

    fn create_edge(&mut self, a: u32, b: u32) {
        self.edge_lookup.insert(edge_key(a, b), self.edges.len() as u32);
        self.edges.push([a, b]);
        self.edge_index.push(1);
        self.degrees[a as usize] += 1;
        self.degrees[b as usize] += 1;
    }

    /// Executes an interaction as step `n + 1`.
    pub fn apply(&mut self, it: Interaction) -> StepOutcome {
        let [x, y, z] = it.vertices;
        let mut before = [(0u64, 0u64); 3];
        for (k, &v) in it.vertices.iter().enumerate() {
            if !(it.new_vertex && k == 0) {
                before[k] = (self.degrees[v as usize], self.weights[v as usize]);
            }
        }
        if it.new_vertex {
            debug_assert_eq!(x as u64, self.vertex_count());
            self.weights.push(0);
            self.degrees.push(0);
            self.births.push(self.step + 1);
        }

        let mut created = 0u8;
        for (k, (a, b)) in [(x, y), (x, z), (y, z)].into_iter().enumerate() {
            if it.new_vertex && k < 2 {
                self.create_edge(a, b);
                created += 1;
                continue;
            }
            let known = if k == 2 { it.edge_hint } else { None };
            match known.or_else(|| self.edge_lookup.get(&edge_key(a, b)).copied()) {
                Some(e) => self.edge_index.add(e as usize, 1),
                None => {
                    self.create_edge(a, b);
                    created += 1;
                }
            }
        }

        let existing = if it.new_vertex {
            None
        } else {
            it.triangle_hint
                .or_else(|| self.triangle_lookup.get(&triangle_key(it.vertices)).copied())
        };
        match existing {
            Some(t) => self.triangle_index.add(t as usize, 1),
            None => {
                self.triangle_lookup
                    .insert(triangle_key(it.vertices), self.triangles.len() as u32);
                self.triangles.push(sorted3(it.vertices));
                self.triangle_index.push(1);
            }
        }

        for (k, &v) in it.vertices.iter().enumerate() {
            let v = v as usize;
            self.weights[v] += 1;
            let (d, w) = (self.degrees[v], self.weights[v]);
            if it.new_vertex && k == 0 {
                self.occupancy.add(d, w);
            } else {
                self.occupancy.remove(before[k].0, before[k].1);
                self.occupancy.add(d, w);
            }
            self.max_weight = self.max_weight.max(w);
            self.max_degree = self.max_degree.max(d);
        }

        self.step += 1;
        if it.new_vertex {
            self.new_vertex_steps += 1;
        }

        #[cfg(debug_assertions)]
        self.local_check(&it.vertices);

        StepOutcome {
            step: self.step,
            branch: it.branch,
            triple: it.vertices.map(label_of),
            created_edges: created,
            new_vertex: it.new_vertex.then(|| label_of(x)),
        }
    }

    #[cfg(debug_assertions)]
    fn local_check(&self, touched: &[u32; 3]) {
        assert_eq!(self.triangle_index.total(), self.step + 1, "triangle weight total");
        assert_eq!(self.edge_index.total(), 3 * (self.step + 1), "edge weight total");
        assert_eq!(
            self.vertex_count(),
            3 + self.new_vertex_steps,
            "vertex count"
        );
        for &v in touched {
            let (d, w) = (self.degrees[v as usize], self.weights[v as usize]);
            assert!(2 <= d && d <= 2 * w, "vertex {}: d={d} w={w}", label_of(v));
        }
    }

    /// Applies a caller-chosen triple as the next step. At most one label
    /// may be new, and it must be the next label to be born.
    pub fn apply_triple(&mut self, triple: [i64; 3]) -> Result<StepOutcome, SimError> {
        let bad = |msg: &str| SimError::InvalidTriple(format!("{triple:?}: {msg}"));
        if triple[0] == triple[1] || triple[0] == triple[2] || triple[1] == triple[2] {
            return Err(bad("labels must be distinct"));
        }
        let next = label_of(self.vertex_count() as u32);
        let mut new_vertex = false;
        let mut olds = Vec::with_capacity(3);
        for &l in &triple {
            if l == next {
                new_vertex = true;
            } else {
                olds.push(self.index_of(l).ok_or_else(|| bad("unknown label"))?);
            }
        }
        let vertices = if new_vertex {
            [self.vertex_count() as u32, olds[0], olds[1]]
        } else {
            [olds[0], olds[1], olds[2]]
        };
        let mut out = self.apply(Interaction {
            branch: Branch::Scripted,
            vertices,
            new_vertex,
            edge_hint: None,
            triangle_hint: None,
        });
        out.branch = Branch::Scripted;
        Ok(out)
    }

    /// Recomputes every derived quantity from the edge and triangle lists
    /// and compares with the maintained state.
    pub fn check_invariants(&self) -> Result<(), SimError> {
        let fail = |msg: String| Err(SimError::Invariant(format!("after step {}: {msg}", self.step)));
        let n = self.step;
        let v = self.weights.len();
        if v as u64 != 3 + self.new_vertex_steps {
            return fail(format!("{v} vertices, expected {}", 3 + self.new_vertex_steps));
        }
        if self.degrees.len() != v || self.births.len() != v {
            return fail("per-vertex arrays out of sync".into());
        }
        if self.triangle_index.total() != n + 1 {
            return fail(format!("triangle weight {} != n + 1", self.triangle_index.total()));
        }
        if self.edge_index.total() != 3 * (n + 1) {
            return fail(format!("edge weight {} != 3(n + 1)", self.edge_index.total()));
        }
        if self.edge_lookup.len() != self.edges.len()
            || self.edge_index.len() != self.edges.len()
            || self.triangle_lookup.len() != self.triangles.len()
            || self.triangle_index.len() != self.triangles.len()
        {
            return fail("lookup tables out of sync".into());
        }
        let mut tri_sum = vec![0u64; v];
        for (t, &w) in self.triangles.iter().zip(self.triangle_index.weights()) {
            if w == 0 {
                return fail(format!("triangle {t:?} has zero weight"));
            }
            for &x in t {
                tri_sum[x as usize] += w;
            }
        }
        let mut edge_sum = vec![0u64; v];
        let mut deg = vec![0u64; v];
        for (&[a, b], &w) in self.edges.iter().zip(self.edge_index.weights()) {
            if a == b || w == 0 {
                return fail(format!("bad edge {a}-{b} of weight {w}"));
            }
            edge_sum[a as usize] += w;
            edge_sum[b as usize] += w;
            deg[a as usize] += 1;
            deg[b as usize] += 1;
        }
        let mut occ = Occupancy::new(self.occupancy.caps());
        let (mut max_w, mut max_d) = (0, 0);
        for i in 0..v {
            let (w, d) = (self.weights[i], self.degrees[i]);
            let l = label_of(i as u32);
            if tri_sum[i] != w {
                return fail(format!("vertex {l}: weight {w} != triangle sum {}", tri_sum[i]));
            }
            if edge_sum[i] != 2 * w {
                return fail(format!("vertex {l}: edge sum {} != 2 * {w}", edge_sum[i]));
            }
            if deg[i] != d {
                return fail(format!("vertex {l}: degree {d} != {} neighbours", deg[i]));
            }
            if !(2 <= d && d <= 2 * w) {
                return fail(format!("vertex {l}: d={d} outside [2, 2w={}]", 2 * w));
            }
            occ.add(d, w);
            max_w = max_w.max(w);
            max_d = max_d.max(d);
        }
        if occ != self.occupancy {
            return fail("occupancy table differs from a recount".into());
        }
        if (max_w, max_d) != (self.max_weight, self.max_degree) {
            return fail("running maxima differ from a recount".into());
        }
        Ok(())
    }

    pub(crate) fn to_parts(&self) -> GraphParts {
        GraphParts {
            step: self.step,
            new_vertex_steps: self.new_vertex_steps,
            vertices: (0..self.weights.len())
                .map(|i| [self.weights[i], self.degrees[i], self.births[i]])
                .collect(),
            edges: self
                .edges
                .iter()
                .zip(self.edge_index.weights())
                .map(|([a, b], w)| (*a, *b, *w))
                .collect(),
            triangles: self
                .triangles
                .iter()
                .zip(self.triangle_index.weights())
                .map(|([a, b, c], w)| (*a, *b, *c, *w))
                .collect(),
        }
    }

    pub(crate) fn from_parts(
        params: ModelParams,
        caps: OccupancyCaps,
        parts: GraphParts,
    ) -> Result<Self, SimError> {
        let mut g = Self::empty(params, caps);
        g.step = parts.step;
        g.new_vertex_steps = parts.new_vertex_steps;
        let v = parts.vertices.len() as u32;
        for [w, d, b] in parts.vertices {
            g.weights.push(w);
            g.degrees.push(d);
            g.births.push(b);
            g.occupancy.add(d, w);
            g.max_weight = g.max_weight.max(w);
            g.max_degree = g.max_degree.max(d);
        }
        let mut edge_weights = Vec::with_capacity(parts.edges.len());
        for (a, b, w) in parts.edges {
            if a >= v || b >= v {
                return Err(SimError::Snapshot(format!("edge {a}-{b} out of range")));
            }
            if g.edge_lookup.insert(edge_key(a, b), g.edges.len() as u32).is_some() {
                return Err(SimError::Snapshot(format!("duplicate edge {a}-{b}")));
            }
            g.edges.push([a, b]);
            edge_weights.push(w);
        }
        g.edge_index = CumulativeIndex::from_weights(&edge_weights);
        let mut tri_weights = Vec::with_capacity(parts.triangles.len());
        for (a, b, c, w) in parts.triangles {
            if a >= v || b >= v || c >= v {
                return Err(SimError::Snapshot(format!("triangle {a}-{b}-{c} out of range")));
            }
            let t = [a, b, c];
            if g.triangle_lookup.insert(triangle_key(t), g.triangles.len() as u32).is_some() {
                return Err(SimError::Snapshot(format!("duplicate triangle {t:?}")));
            }
            g.triangles.push(t);
            tri_weights.push(w);
        }
        g.triangle_index = CumulativeIndex::from_weights(&tri_weights);
        g.check_invariants()
            .map_err(|e| SimError::Snapshot(format!("inconsistent snapshot: {e}")))?;
        Ok(g)
    }
}

/// Plain-data form of a [`Graph`], in vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub(crate) struct GraphParts {
    pub step: u64,
    pub new_vertex_steps: u64,
    /// `[weight, degree, birth_step]` per vertex index.
    pub vertices: Vec<[u64; 3]>,
    pub edges: Vec<(u32, u32, u64)>,
    pub triangles: Vec<(u32, u32, u32, u64)>,
}

/// Seed and stream selecting one replication's random sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// A [`Graph`] together with the random generator driving it.
#[derive(Debug, Clone)]
pub struct GraphState {
    pub(crate) graph: Graph,
    pub(crate) rng: ChaCha8Rng,
    pub(crate) seed: RngSeed,
}

impl GraphState {
    pub fn init(params: ModelParams, seed: u64) -> Self {
        Self::init_with(params, RngSeed::new(seed), OccupancyCaps::default())
    }

    pub fn init_with(params: ModelParams, seed: RngSeed, caps: OccupancyCaps) -> Self {
        Self {
            graph: Graph::new(params, caps),
            rng: seed.rng(),
            seed,
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn seed(&self) -> RngSeed {
        self.seed
    }

    pub fn step(&mut self) -> StepOutcome {
        let it = self.graph.sample_interaction(&mut self.rng);
        self.graph.apply(it)
    }

    /// See [`Graph::apply_triple`].
    pub fn apply_triple(&mut self, triple: [i64; 3]) -> Result<StepOutcome, SimError> {
        self.graph.apply_triple(triple)
    }
}
