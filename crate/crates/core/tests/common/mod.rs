//! Fixtures and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use covfit::gaussian::io;
use covfit::random::random_model_covariance;
use covfit::{BidirectedGraph, CovarianceMatrix, Dag, SampleSummary, SeparationQuery};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const WVXY_CORRELATIONS: &str = include_str!("../../data/wvxy_correlations.csv");
pub const WVXY_GRAPH: &str = include_str!("../../data/wvxy_model.graph");
pub const FOUR_PATH: &str = include_str!("../../data/four_path.graph");
pub const FOUR_PATH_DAG: &str = include_str!("../../data/four_path_latent.dag");

pub fn wvxy_summary() -> SampleSummary {
    let cov = io::read_correlation_table(WVXY_CORRELATIONS).unwrap();
    SampleSummary::from_covariance(cov, 39, false).unwrap()
}

pub fn wvxy_graph() -> BidirectedGraph {
    BidirectedGraph::parse(WVXY_GRAPH).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn labels(p: usize) -> Vec<String> {
    (1..=p).map(|i| format!("v{i}")).collect()
}

/// Graph on `p` vertices whose edges are the set bits of `mask` over the
/// pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn graph_from_mask(p: usize, mask: u64) -> BidirectedGraph {
    let mut edges = Vec::new();
    let mut bit = 0;
    for i in 0..p {
        for j in i + 1..p {
            if mask >> bit & 1 == 1 {
                edges.push((format!("v{}", i + 1), format!("v{}", j + 1)));
            }
            bit += 1;
        }
    }
    BidirectedGraph::new(&labels(p), &edges).unwrap()
}

pub fn pair_count(p: usize) -> usize {
    p * p.saturating_sub(1) / 2
}

pub fn random_graph<R: Rng>(p: usize, prob: f64, rng: &mut R) -> BidirectedGraph {
    let mut mask = 0u64;
    for bit in 0..pair_count(p) {
        if rng.random_bool(prob) {
            mask |= 1 << bit;
        }
    }
    graph_from_mask(p, mask)
}

/// A `p × n` standard normal matrix transformed to covariance `cov`.
pub fn normal_data<R: Rng>(cov: &DMatrix<f64>, n: usize, rng: &mut R) -> DMatrix<f64> {
    let l = cov.clone().cholesky().unwrap().l();
    let z = DMatrix::from_fn(cov.nrows(), n, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
    l * z
}

/// Random summary with `n` subjects drawn from a model covariance of `g`.
pub fn random_summary<R: Rng>(g: &BidirectedGraph, n: usize, centered: bool, rng: &mut R) -> SampleSummary {
    let truth = random_model_covariance(g, rng);
    let y = normal_data(truth.matrix(), n, rng);
    SampleSummary::from_data(g.labels().to_vec(), &y, centered).unwrap()
}

/// A random positive-definite matrix in the model of `g`.
pub fn random_interior<R: Rng>(g: &BidirectedGraph, rng: &mut R) -> CovarianceMatrix {
    random_model_covariance(g, rng)
}

/// All queries `(A, B, S)` over `p` vertices with `A`, `B` non-empty and the
/// three sets pairwise disjoint.
pub fn all_queries(p: usize) -> Vec<SeparationQuery> {
    let mut out = Vec::new();
    for code in 0..4usize.pow(p as u32) {
        let (mut a, mut b, mut s) = (vec![], vec![], vec![]);
        let mut c = code;
        for k in 0..p {
            match c % 4 {
                1 => a.push(k),
                2 => b.push(k),
                3 => s.push(k),
                _ => {}
            }
            c /= 4;
        }
        if !a.is_empty() && !b.is_empty() {
            out.push(SeparationQuery::from_indices(p, a, b, s).unwrap());
        }
    }
    out
}

pub fn random_query<R: Rng>(p: usize, rng: &mut R) -> SeparationQuery {
    loop {
        let roles: Vec<u8> = (0..p).map(|_| rng.random_range(0..4)).collect();
        let pick = |r: u8| (0..p).filter(|&k| roles[k] == r).collect::<Vec<_>>();
        let (a, b, s) = (pick(1), pick(2), pick(3));
        if !a.is_empty() && !b.is_empty() {
            return SeparationQuery::from_indices(p, a, b, s).unwrap();
        }
    }
}

/// Simple paths `start, ..., end` in an undirected skeleton, handed to
/// `visit` until it returns `true`.
fn any_simple_path(
    adj: &dyn Fn(usize, usize) -> bool,
    p: usize,
    path: &mut Vec<usize>,
    end: usize,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    let last = *path.last().unwrap();
    if last == end {
        return visit(path);
    }
    for next in 0..p {
        if adj(last, next) && !path.contains(&next) {
            path.push(next);
            if any_simple_path(adj, p, path, end, visit) {
                return true;
            }
            path.pop();
        }
    }
    false
}

/// m-separation by enumerating every simple path between `A` and `B`.
pub fn brute_m_separated(g: &BidirectedGraph, q: &SeparationQuery) -> bool {
    let adj = |i: usize, j: usize| g.adjacent(i, j);
    for &a in q.a() {
        for &b in q.b() {
            let mut path = vec![a];
            let open = any_simple_path(&adj, g.len(), &mut path, b, &mut |path| {
                path[1..path.len() - 1].iter().all(|v| q.given().contains(v))
            });
            if open {
                return false;
            }
        }
    }
    true
}

/// d-separation by enumerating every simple path of the skeleton.
pub fn brute_d_separated(d: &Dag, q: &SeparationQuery) -> bool {
    let p = d.len();
    let adj = |i: usize, j: usize| d.adjacent(i, j);
    let conditioned_descendant = |v: usize| {
        let desc = d.descendants(v);
        q.given().iter().any(|&s| desc[s])
    };
    for &a in q.a() {
        for &b in q.b() {
            let mut path = vec![a];
            let open = any_simple_path(&adj, p, &mut path, b, &mut |path| {
                path.windows(3).all(|w| {
                    let collider = d.has_edge(w[0], w[1]) && d.has_edge(w[2], w[1]);
                    if collider {
                        conditioned_descendant(w[1])
                    } else {
                        !q.given().contains(&w[1])
                    }
                })
            });
            if open {
                return false;
            }
        }
    }
    true
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for k in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(k);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Whether some four vertices induce a path or a cycle on four vertices,
/// found by trying every ordering of every 4-subset.
pub fn has_induced_four_path_or_cycle(g: &BidirectedGraph) -> bool {
    let p = g.len();
    for a in 0..p {
        for b in a + 1..p {
            for c in b + 1..p {
                for d in c + 1..p {
                    for o in permutations(&[a, b, c, d]) {
                        let chain = g.adjacent(o[0], o[1]) && g.adjacent(o[1], o[2]) && g.adjacent(o[2], o[3]);
                        let chords = g.adjacent(o[0], o[2]) || g.adjacent(o[1], o[3]);
                        if chain && !chords {
                            return true;
                        }
                    }
                }
            }
        }
    }
    false
}

/// Whether some `a - b - c` with `a`, `c` non-adjacent has `b` as a
/// non-collider.
pub fn has_unshielded_noncollider(d: &Dag) -> bool {
    let p = d.len();
    for b in 0..p {
        for a in 0..p {
            for c in a + 1..p {
                if a == b || c == b || !d.adjacent(a, b) || !d.adjacent(b, c) || d.adjacent(a, c) {
                    continue;
                }
                if !(d.has_edge(a, b) && d.has_edge(c, b)) {
                    return true;
                }
            }
        }
    }
    false
}

/// Every DAG on `p` labelled vertices, from all orientations of all
/// skeletons.
pub fn all_dags(p: usize) -> Vec<Dag> {
    let pairs: Vec<(usize, usize)> = (0..p).flat_map(|i| (i + 1..p).map(move |j| (i, j))).collect();
    let vertices = covfit::graph::Vertices::new(labels(p)).unwrap();
    let mut out = Vec::new();
    for code in 0..3usize.pow(pairs.len() as u32) {
        let mut c = code;
        let mut edges = Vec::new();
        for &(i, j) in &pairs {
            match c % 3 {
                1 => edges.push((i, j)),
                2 => edges.push((j, i)),
                _ => {}
            }
            c /= 3;
        }
        if let Ok(d) = Dag::from_index_edges(vertices.clone(), edges, &[]) {
            out.push(d);
        }
    }
    out
}

/// A random DAG whose observed vertices are childless: latent vertices in
/// a random topological order with forward edges, each latent pointing at a
/// random subset of the observed vertices.
pub fn random_latent_dag<R: Rng>(rng: &mut R) -> Dag {
    let observed = rng.random_range(2..=5);
    let latent = rng.random_range(1..=4);
    let p = observed + latent;
    let names: Vec<String> = (0..observed)
        .map(|i| format!("o{}", i + 1))
        .chain((0..latent).map(|i| format!("u{}", i + 1)))
        .collect();
    let mut edges = Vec::new();
    for u in observed..p {
        for w in u + 1..p {
            if rng.random_bool(0.4) {
                edges.push((u, w));
            }
        }
        for o in 0..observed {
            if rng.random_bool(0.5) {
                edges.push((u, o));
            }
        }
    }
    let latent: Vec<usize> = (observed..p).collect();
    Dag::from_index_edges(covfit::graph::Vertices::new(names).unwrap(), edges, &latent).unwrap()
}
