//! Seeded instance generators for the three problem families.
//!
//! Scheduling instances model a cluster running many independent jobs: each
//! job is a small layered DAG whose node count follows a geometric
//! distribution with p = 0.09 clamped to [2, 18] (mean about 9.17), durations
//! are log-uniform between 16.3 and 4964.5 seconds, and resource demands are
//! uniform on [1, 593] against a shared capacity of 6000.
//!
//! Edit-distance instances pair a sparse labeled graph with a perturbed,
//! relabeled, and permuted copy. Cycle-search instances plant a hamiltonian
//! cycle and bury it under noise edges; the planted witness is returned so
//! experiments can verify solvability.

use bihyb_core::graph::{DagInstance, HcpInstance, LabeledGraph, WeightedDigraph};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::format::secs_to_micros;

pub const DAG_CAPACITY: u64 = 6000;
pub const DAG_RESOURCE_MAX: u64 = 593;
pub const DUR_MIN_SECS: f64 = 16.3;
pub const DUR_MAX_SECS: f64 = 4964.5;
pub const JOB_SIZE_P: f64 = 0.09;
pub const JOB_MIN_NODES: usize = 2;
pub const JOB_MAX_NODES: usize = 18;
pub const GED_LABELS: u32 = 10;

/// Geometric sample clamped to the job size range.
pub fn sample_job_node_count(rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.gen_range(0.0..1.0);
    let raw = 1.0 + (1.0 - u).ln() / (1.0 - JOB_SIZE_P).ln();
    (raw as usize).clamp(JOB_MIN_NODES, JOB_MAX_NODES)
}

fn sample_duration_us(rng: &mut ChaCha8Rng) -> u64 {
    let lo = DUR_MIN_SECS.ln();
    let hi = DUR_MAX_SECS.ln();
    let secs = (lo + rng.gen_range(0.0..1.0) * (hi - lo)).exp();
    secs_to_micros(secs).expect("sampled durations are finite and positive")
}

/// A disjoint union of `jobs` independent job graphs sharing one resource
/// pool. Each job is either a pipeline (a chain with occasional skip edges)
/// or a fan (one root feeding the rest, with occasional gating edges),
/// the two shapes that dominate analytic query plans.
pub fn generate_dag(jobs: usize, rng: &mut ChaCha8Rng) -> DagInstance {
    assert!(jobs >= 1, "at least one job");
    let mut sizes = Vec::with_capacity(jobs);
    let mut total = 0usize;
    for _ in 0..jobs {
        let m = sample_job_node_count(rng);
        sizes.push(m);
        total += m;
    }
    let mut g = WeightedDigraph::new(total);
    let mut duration_us = Vec::with_capacity(total);
    let mut resource = Vec::with_capacity(total);
    let mut base = 0usize;
    for &m in &sizes {
        let fan = rng.gen_bool(0.5);
        for i in 1..m {
            let mandatory = if fan { 0 } else { i - 1 };
            g.add_edge(base + mandatory, base + i, 0).unwrap();
            if i >= 2 && rng.gen_bool(0.10) {
                let extra = if fan { rng.gen_range(1..i) } else { rng.gen_range(0..i - 1) };
                if !g.has_edge(base + extra, base + i) {
                    g.add_edge(base + extra, base + i, 0).unwrap();
                }
            }
        }
        base += m;
    }
    for _ in 0..total {
        duration_us.push(sample_duration_us(rng));
        resource.push(rng.gen_range(1..=DAG_RESOURCE_MAX));
    }
    DagInstance::new(g, duration_us, resource, DAG_CAPACITY).expect("generated dag is valid")
}

/// A sparse labeled graph and a perturbed copy: a few label rewrites, a few
/// edge toggles, and a node permutation.
pub fn generate_ged(n: usize, rng: &mut ChaCha8Rng) -> (LabeledGraph, LabeledGraph) {
    assert!(n >= 2, "need at least two nodes");
    let labels: Vec<u32> = (0..n).map(|_| rng.gen_range(0..GED_LABELS)).collect();
    let mut g1 = LabeledGraph::new(labels.clone());
    let edge_p = (2.5 / (n as f64 - 1.0)).min(1.0);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(edge_p) {
                g1.add_edge(u, v).unwrap();
            }
        }
    }

    let relabels = (n / 5).max(1);
    let toggles = (n / 5).max(1);
    let mut labels2 = labels;
    for _ in 0..relabels {
        let v = rng.gen_range(0..n);
        labels2[v] = rng.gen_range(0..GED_LABELS);
    }
    let mut toggled = g1.clone();
    for _ in 0..toggles {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            toggled = toggled.with_toggled_edge(u, v).unwrap();
        }
    }

    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut permuted_labels = vec![0u32; n];
    for v in 0..n {
        permuted_labels[perm[v]] = labels2[v];
    }
    let mut g2 = LabeledGraph::new(permuted_labels);
    for (u, v) in toggled.edges() {
        g2.add_edge(perm[u], perm[v]).unwrap();
    }
    (g1, g2)
}

/// A graph with a planted hamiltonian cycle plus `noise_factor * n` random
/// extra edges. Returns the instance and the planted cycle as a witness.
pub fn generate_hcp(n: usize, noise_factor: f64, rng: &mut ChaCha8Rng) -> (HcpInstance, Vec<usize>) {
    assert!(n >= 3, "need at least three nodes");
    let mut witness: Vec<usize> = (0..n).collect();
    witness.shuffle(rng);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut present = vec![false; n * n];
    let push = |edges: &mut Vec<(usize, usize)>, present: &mut Vec<bool>, u: usize, v: usize| {
        let (a, b) = (u.min(v), u.max(v));
        if a != b && !present[a * n + b] {
            present[a * n + b] = true;
            edges.push((a, b));
            true
        } else {
            false
        }
    };
    for i in 0..n {
        push(&mut edges, &mut present, witness[i], witness[(i + 1) % n]);
    }
    let target = (noise_factor * n as f64).floor() as usize;
    let mut added = 0usize;
    let mut attempts = 0usize;
    while added < target && attempts < 100 * (target + 1) {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if push(&mut edges, &mut present, u, v) {
            added += 1;
        }
        attempts += 1;
    }
    let inst = HcpInstance::new(n, &edges).expect("planted instance is valid");
    (inst, witness)
}
