//! Recursive clique strategy: build a seed clique, attach every draw to it
//! through per-draw hit counters and a fixed assignment of seed subsets,
//! detect completed attachment patterns among the saturated draws, and
//! finish the remaining outside edges through designated slots.

use std::collections::{HashMap, HashSet};

use itertools::Itertools;

use super::{fresh_vertices, PhaseClock};
use crate::analysis::ell_k;
use crate::error::{Error, Result};
use crate::hypergraph::{Edge, Embedding, Vertex};
use crate::process::{ProcessView, Strategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Seed,
    Attach,
    Finish,
}

struct CliqueCopy {
    /// Hosts of the non-seed vertices, ascending; canonical free vertex
    /// `ell + 1 + i` maps to `w[i]`.
    w: Vec<Vertex>,
    remaining: u64,
    /// Host r-set -> (outside-edge indices assigned to it, served count).
    slots: HashMap<Edge, (Vec<usize>, usize)>,
}

/// Builds `K_k` with `s`-edges in the game with `r` random vertices.
///
/// The seed size comes from the exact constraint solver; a seed of size
/// below `s` is just a fixed vertex set, larger seeds are built recursively.
pub struct CliqueBuilder {
    k: u32,
    s: u32,
    r: u32,
    ell: u32,
    budget_override: Option<u64>,
    phase: Phase,
    clock: Option<PhaseClock>,
    phase1_start: u64,
    inner: Option<Box<CliqueBuilder>>,
    /// Canonical seed vertex i+1 -> host.
    l_host: Vec<Vertex>,
    l_index: HashMap<Vertex, u32>,

    /// Canonical seed subsets: assignment target T (sorted) -> ordered list
    /// of source sets S with that assignment.
    assign: HashMap<Vec<u32>, Vec<Vec<u32>>>,
    /// For each draw-arity j (index j-1): the assignment keys of size r - j.
    constraints_by_j: Vec<Vec<Vec<u32>>>,
    /// Canonical outside edges (fewer than s - r seed vertices) and their
    /// designated r-subsets (canonical non-seed ids).
    h2_edges: Vec<Vec<u32>>,
    h2_slot_pattern: Vec<Vec<u32>>,
    eta2: u64,

    hits: HashMap<Edge, u32>,
    saturated: HashSet<Edge>,
    vertex_sat: HashMap<Vertex, u32>,
    copies: Vec<CliqueCopy>,
    copy_vertex: HashMap<Vertex, Vec<usize>>,
    slot_lookup: HashMap<Edge, usize>,
    claim: Option<Embedding>,
    search_nodes: usize,
    searches_capped: u64,
}

/// Backtracking nodes allowed per copy search; see the starplus ledger for
/// the rationale.
const SEARCH_NODE_BUDGET: usize = 200_000;

impl CliqueBuilder {
    pub fn new(k: u32, s: u32, r: u32) -> Result<CliqueBuilder> {
        if !(2 <= r && r < s && s <= k) {
            return Err(Error::parameter(format!(
                "clique builder needs 2 <= r < s <= k, got r={r}, s={s}, k={k}"
            )));
        }
        if k == s {
            // Single-edge base case.
            return Ok(CliqueBuilder::empty(k, s, r, 0));
        }
        let ell = ell_k(r, s, k)?;
        let mut b = CliqueBuilder::empty(k, s, r, ell);
        if ell >= s {
            b.inner = Some(Box::new(CliqueBuilder::new(ell, s, r)?));
            b.phase = Phase::Seed;
        } else {
            b.adopt_seed((1..=ell).collect());
        }
        b.build_templates();
        Ok(b)
    }

    fn empty(k: u32, s: u32, r: u32, ell: u32) -> CliqueBuilder {
        CliqueBuilder {
            k,
            s,
            r,
            ell,
            budget_override: None,
            phase: Phase::Attach,
            clock: None,
            phase1_start: 0,
            inner: None,
            l_host: Vec::new(),
            l_index: HashMap::new(),
            assign: HashMap::new(),
            constraints_by_j: Vec::new(),
            h2_edges: Vec::new(),
            h2_slot_pattern: Vec::new(),
            eta2: 0,
            hits: HashMap::new(),
            saturated: HashSet::new(),
            vertex_sat: HashMap::new(),
            copies: Vec::new(),
            copy_vertex: HashMap::new(),
            slot_lookup: HashMap::new(),
            claim: None,
            search_nodes: 0,
            searches_capped: 0,
        }
    }

    fn adopt_seed(&mut self, hosts: Vec<Vertex>) {
        self.l_index = hosts
            .iter()
            .enumerate()
            .map(|(i, &h)| (h, i as u32 + 1))
            .collect();
        self.l_host = hosts;
        self.phase = Phase::Attach;
    }

    /// Fixed subset assignments: each (s-j)-subset S of the canonical seed
    /// gets its lexicographically smallest (r-j)-subset; the outside edges
    /// get the lexicographically smallest r-subset avoiding the seed.
    fn build_templates(&mut self) {
        let (k, s, r, ell) = (self.k, self.s as usize, self.r as usize, self.ell);
        let j0 = 1.max(s as i64 - ell as i64) as usize;
        for j in j0..=r {
            for sset in (1..=ell).combinations(s - j) {
                let t: Vec<u32> = sset[..r - j].to_vec();
                self.assign.entry(t).or_default().push(sset);
            }
        }
        self.constraints_by_j = (1..=r)
            .map(|j| {
                self.assign
                    .keys()
                    .filter(|t| t.len() == r - j)
                    .cloned()
                    .sorted()
                    .collect()
            })
            .collect();
        for edge in (1..=k).combinations(s) {
            let seed_part = edge.iter().filter(|&&v| v <= ell).count();
            if seed_part >= s - r {
                continue;
            }
            let outside: Vec<u32> = edge.iter().copied().filter(|&v| v > ell).collect();
            self.h2_slot_pattern.push(outside[..r].to_vec());
            self.h2_edges.push(edge);
        }
        self.eta2 = self.h2_edges.len() as u64;
    }

    fn resolve_clock(&mut self, view: &ProcessView<'_>) -> PhaseClock {
        if let Some(c) = self.clock {
            return c;
        }
        let budget = self.budget_override.unwrap_or(view.budget);
        let clock = PhaseClock::clique_default(budget, self.inner.is_some());
        if self.inner.is_none() {
            self.phase1_start = view.step;
        }
        if let Some(inner) = self.inner.as_deref_mut() {
            inner.budget_override = Some(clock.t0.max(1));
        }
        self.clock = Some(clock);
        clock
    }

    fn base_case(&mut self, view: &ProcessView<'_>, u: &Edge) -> Vec<u32> {
        let v = fresh_vertices(view.n, view.s - view.r as usize, u, &HashSet::new());
        let mut map: Vec<u32> = u.iter().chain(v.iter().copied()).collect();
        map.sort_unstable();
        self.claim = Some(Embedding { map });
        v
    }

    fn attach_step(&mut self, u: &Edge) -> Option<Vec<u32>> {
        let seed_hits: Vec<Vertex> = u.iter().filter(|v| self.l_index.contains_key(v)).collect();
        if seed_hits.len() == self.r as usize {
            return None;
        }
        let t_canon: Vec<u32> = seed_hits
            .iter()
            .map(|v| self.l_index[v])
            .sorted()
            .collect();
        let s_list = self.assign.get(&t_canon)?;
        let count = self.hits.entry(u.clone()).or_insert(0);
        if *count as usize >= s_list.len() {
            return None;
        }
        let s_canon = s_list[*count as usize].clone();
        *count += 1;
        let saturated_now = *count as usize == s_list.len();
        let response: Vec<u32> = s_canon
            .iter()
            .map(|&ci| self.l_host[(ci - 1) as usize])
            .filter(|h| !u.contains(*h))
            .collect();
        if saturated_now {
            self.mark_saturated(u.clone());
        }
        Some(response)
    }

    fn mark_saturated(&mut self, u: Edge) {
        let free: Vec<Vertex> = u
            .iter()
            .filter(|v| !self.l_index.contains_key(v))
            .collect();
        self.saturated.insert(u);
        for &v in &free {
            *self.vertex_sat.entry(v).or_insert(0) += 1;
        }
        self.search_copies(&free);
    }

    /// All requirement r-sets formed by `v`, a subset of `w_partial`, and an
    /// assigned seed subset must already be saturated.
    fn consistent_with(&self, w_partial: &[Vertex], v: Vertex) -> bool {
        for j in 1..=self.r as usize {
            let ts = &self.constraints_by_j[j - 1];
            if ts.is_empty() || w_partial.len() + 1 < j {
                continue;
            }
            for q in w_partial.iter().copied().combinations(j - 1) {
                for t in ts {
                    let mut verts: Vec<Vertex> = q.clone();
                    verts.push(v);
                    verts.extend(t.iter().map(|&ci| self.l_host[(ci - 1) as usize]));
                    let edge = Edge::new(verts).expect("distinct");
                    if !self.saturated.contains(&edge) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn search_copies(&mut self, seed_free: &[Vertex]) {
        let h = (self.k - self.ell) as usize;
        let mut w: Vec<Vertex> = Vec::with_capacity(h);
        for &v in seed_free {
            if !self.consistent_with(&w, v) {
                return;
            }
            w.push(v);
        }
        // Candidate pool: outside vertices already appearing in some
        // saturated draw, individually consistent with the seed edges.
        let pool: Vec<Vertex> = self
            .vertex_sat
            .keys()
            .copied()
            .filter(|v| !w.contains(v) && self.consistent_with(&[], *v))
            .sorted()
            .collect();
        self.search_nodes = 0;
        self.extend_copy(&mut w, &pool, 0);
        if self.search_nodes > SEARCH_NODE_BUDGET {
            self.searches_capped += 1;
        }
    }

    fn extend_copy(&mut self, w: &mut Vec<Vertex>, pool: &[Vertex], start: usize) -> bool {
        self.search_nodes += 1;
        if self.search_nodes > SEARCH_NODE_BUDGET {
            return false;
        }
        let h = (self.k - self.ell) as usize;
        if w.len() == h {
            return self.accept_copy(w);
        }
        for idx in start..pool.len() {
            let v = pool[idx];
            if w.contains(&v) || self.shares_too_much(w, v) || !self.consistent_with(w, v) {
                continue;
            }
            w.push(v);
            if self.extend_copy(w, pool, idx + 1) {
                return true;
            }
            w.pop();
        }
        false
    }

    /// True when `w + v` already matches some collected copy in r or more
    /// outside vertices.
    fn shares_too_much(&self, w: &[Vertex], v: Vertex) -> bool {
        let mut per_copy: HashMap<usize, usize> = HashMap::new();
        for x in w.iter().chain(std::iter::once(&v)) {
            if let Some(list) = self.copy_vertex.get(x) {
                for &c in list {
                    let e = per_copy.entry(c).or_insert(0);
                    *e += 1;
                    if *e >= self.r as usize {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn accept_copy(&mut self, w: &[Vertex]) -> bool {
        // Fewer than r shared outside vertices with every collected copy.
        let mut per_copy: HashMap<usize, usize> = HashMap::new();
        for v in w {
            if let Some(list) = self.copy_vertex.get(v) {
                for &c in list {
                    let e = per_copy.entry(c).or_insert(0);
                    *e += 1;
                    if *e >= self.r as usize {
                        return false;
                    }
                }
            }
        }
        let mut w_sorted = w.to_vec();
        w_sorted.sort_unstable();
        let idx = self.copies.len();
        let mut slots: HashMap<Edge, (Vec<usize>, usize)> = HashMap::new();
        for (i, pattern) in self.h2_slot_pattern.iter().enumerate() {
            let host = Edge::new(
                pattern
                    .iter()
                    .map(|&ci| w_sorted[(ci - self.ell - 1) as usize])
                    .collect(),
            )
            .expect("distinct");
            slots.entry(host).or_default().0.push(i);
        }
        for key in slots.keys() {
            self.slot_lookup.insert(key.clone(), idx);
        }
        for &v in &w_sorted {
            self.copy_vertex.entry(v).or_default().push(idx);
        }
        self.copies.push(CliqueCopy {
            w: w_sorted,
            remaining: self.eta2,
            slots,
        });
        if self.eta2 == 0 {
            self.claim = Some(self.build_claim(idx));
        }
        true
    }

    fn finish_step(&mut self, u: &Edge) -> Option<Vec<u32>> {
        let idx = *self.slot_lookup.get(u)?;
        let copy = &mut self.copies[idx];
        let (list, served) = copy.slots.get_mut(u)?;
        if *served >= list.len() {
            return None;
        }
        let edge_idx = list[*served];
        *served += 1;
        copy.remaining -= 1;
        let done = copy.remaining == 0;
        let edge = &self.h2_edges[edge_idx];
        let w = &self.copies[idx].w;
        let response: Vec<u32> = edge
            .iter()
            .map(|&ci| {
                if ci <= self.ell {
                    self.l_host[(ci - 1) as usize]
                } else {
                    w[(ci - self.ell - 1) as usize]
                }
            })
            .filter(|h| !u.contains(*h))
            .collect();
        if done {
            self.claim = Some(self.build_claim(idx));
        }
        Some(response)
    }

    fn build_claim(&self, idx: usize) -> Embedding {
        let w = &self.copies[idx].w;
        let mut map = Vec::with_capacity(self.k as usize);
        for i in 1..=self.k {
            if i <= self.ell {
                map.push(self.l_host[(i - 1) as usize]);
            } else {
                map.push(w[(i - self.ell - 1) as usize]);
            }
        }
        Embedding { map }
    }

    /// Collected attachment copies, for inspection in tests.
    pub fn copies_found(&self) -> usize {
        self.copies.len()
    }
}

impl Strategy for CliqueBuilder {
    fn respond(&mut self, view: &ProcessView<'_>, u: &Edge) -> Vec<u32> {
        if self.claim.is_some() {
            let reserved: HashSet<u32> = self.l_host.iter().copied().collect();
            return fresh_vertices(view.n, view.s - view.r as usize, u, &reserved);
        }
        if self.k == self.s {
            return self.base_case(view, u);
        }
        let clock = self.resolve_clock(view);
        if self.phase == Phase::Seed {
            let inner = self.inner.as_mut().expect("seed phase has inner builder");
            let v = inner.respond(view, u);
            if let Some(seed) = inner.report_success() {
                let hosts: Vec<Vertex> = seed.map[..self.ell as usize].to_vec();
                self.adopt_seed(hosts);
                self.phase1_start = view.step + 1;
            }
            return v;
        }
        if self.phase == Phase::Attach && view.step >= self.phase1_start + clock.t1 {
            self.phase = Phase::Finish;
        }
        let out = match self.phase {
            Phase::Attach => self.attach_step(u),
            Phase::Finish => self.finish_step(u),
            Phase::Seed => unreachable!(),
        };
        out.unwrap_or_else(|| {
            let reserved: HashSet<u32> = self.l_host.iter().copied().collect();
            fresh_vertices(view.n, view.s - view.r as usize, u, &reserved)
        })
    }

    fn report_success(&self) -> Option<Embedding> {
        self.claim.clone()
    }

    fn diagnostics(&self) -> Vec<(String, u64)> {
        vec![
            ("attachment_copies".to_string(), self.copies.len() as u64),
            ("saturated_draws".to_string(), self.saturated.len() as u64),
            ("searches_capped".to_string(), self.searches_capped),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{build_target, verify_embedding, TargetSpec};
    use crate::process::{run, trial_rng, RunOptions};

    #[test]
    fn base_case_succeeds_on_first_step() {
        let target = build_target(&TargetSpec::Clique { k: 3, s: 3 }).unwrap();
        let mut strat = CliqueBuilder::new(3, 3, 2).unwrap();
        let mut rng = trial_rng(1, 0);
        let out = run(
            50,
            2,
            3,
            &mut strat,
            &target,
            &mut rng,
            &RunOptions::new(5),
        )
        .unwrap();
        assert_eq!(out.success_step, Some(1));
    }

    #[test]
    fn assignment_multiplicities_sum_correctly() {
        // For each j, the assigned source sets partition the (s-j)-subsets
        // of the seed.
        for (k, s, r) in [(6u32, 3u32, 2u32), (8, 3, 2), (9, 4, 2), (8, 4, 3)] {
            let b = CliqueBuilder::new(k, s, r).unwrap();
            let ell = b.ell;
            let j0 = 1.max(s as i64 - ell as i64) as usize;
            for j in j0..=r as usize {
                let total: usize = b
                    .assign
                    .iter()
                    .filter(|(t, _)| t.len() == r as usize - j)
                    .map(|(_, list)| list.iter().filter(|s_| s_.len() == s as usize - j).count())
                    .sum();
                let expect = crate::analysis::big_binomial(ell as u64, (s as usize - j) as u64);
                assert_eq!(
                    num::BigInt::from(total as i64),
                    expect,
                    "k={k} s={s} r={r} j={j}"
                );
            }
        }
    }

    #[test]
    fn k6_assignment_matches_ladder_rule() {
        // Seed {1, 2}: a draw {u, 1} is extended by 2 on its first hit; a
        // draw outside the seed goes to 1 then 2; draws containing 2 but
        // not 1 are wasted.
        let b = CliqueBuilder::new(6, 3, 2).unwrap();
        assert_eq!(b.ell, 2);
        assert_eq!(b.assign.get(&vec![1]).unwrap(), &vec![vec![1, 2]]);
        assert_eq!(
            b.assign.get(&vec![] as &Vec<u32>).unwrap(),
            &vec![vec![1], vec![2]]
        );
        assert!(b.assign.get(&vec![2]).is_none());
        // Phase 2 pattern: the four outside triples of K_6 with seed size 2.
        assert_eq!(b.eta2, 4);
    }

    #[test]
    fn k4_succeeds_at_moderate_scale() {
        let target = build_target(&TargetSpec::Clique { k: 4, s: 3 }).unwrap();
        let mut hits = 0;
        for trial in 0..10 {
            let mut strat = CliqueBuilder::new(4, 3, 2).unwrap();
            let mut rng = trial_rng(77, trial);
            let out = run(
                300,
                2,
                3,
                &mut strat,
                &target,
                &mut rng,
                &RunOptions::new(6000),
            )
            .unwrap();
            if out.success_step.is_some() {
                let claim = strat.report_success().unwrap();
                assert!(verify_embedding(&out.final_graph, &target, &claim));
                hits += 1;
            }
        }
        assert!(hits >= 8, "clique builder succeeded only {hits}/10 times");
    }

    #[test]
    fn k5_with_seed_one() {
        let target = build_target(&TargetSpec::Clique { k: 5, s: 3 }).unwrap();
        let mut strat = CliqueBuilder::new(5, 3, 2).unwrap();
        assert_eq!(strat.ell, 1);
        let mut rng = trial_rng(123, 0);
        let out = run(
            150,
            2,
            3,
            &mut strat,
            &target,
            &mut rng,
            &RunOptions::new(25_000),
        )
        .unwrap();
        if let Some(_step) = out.success_step {
            let claim = strat.report_success().unwrap();
            assert!(verify_embedding(&out.final_graph, &target, &claim));
        } else {
            assert!(strat.copies_found() > 0 || out.final_graph.edge_count() > 0);
        }
    }

    #[test]
    fn k6_recursive_seed() {
        // ell_6 = 2 < s: no recursion. K_8 has ell = 3 = s: one level.
        let b8 = CliqueBuilder::new(8, 3, 2).unwrap();
        assert_eq!(b8.ell, 3);
        assert!(b8.inner.is_some());
        let target = build_target(&TargetSpec::Clique { k: 6, s: 3 }).unwrap();
        let mut strat = CliqueBuilder::new(6, 3, 2).unwrap();
        let mut rng = trial_rng(5, 3);
        // Small run: exercises attach bookkeeping; success unlikely here.
        let out = run(
            120,
            2,
            3,
            &mut strat,
            &target,
            &mut rng,
            &RunOptions::new(4000),
        )
        .unwrap();
        let _ = out;
    }
}
