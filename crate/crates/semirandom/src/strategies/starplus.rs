//! Two-phase starplus strategy: reserve the center, star every clean draw
//! through it, collect well-separated flower copies among the drawn r-sets,
//! and wait for draws landing on the designated cap slots.

use std::collections::{HashMap, HashSet};

use super::{fresh_vertices, PhaseClock};
use crate::analysis::{Condition14, StarplusDecomposition};
use crate::error::{Error, Result};
use crate::hypergraph::{Edge, Embedding, MultiHypergraph, Vertex};
use crate::process::{ProcessView, Strategy};

/// One collected flower copy: a copy of the flower pattern among the starred
/// r-sets, edge-disjoint from and sharing fewer than r vertices with every
/// other collected copy.
struct FlowerCopy {
    /// Host vertex for each compacted flower vertex (1-based).
    host: Vec<Vertex>,
    edges: Vec<Edge>,
    /// Unserved cap slots remaining.
    remaining: u64,
    /// Host r-set -> list of cap-edge indices assigned to it, and how many
    /// were already served.
    slots: HashMap<Edge, (Vec<usize>, usize)>,
}

/// The ledger of collected copies; its invariants are checked by tests via
/// [`StarplusBuilder::ledger_copies`].
struct FlowerLedger {
    copies: Vec<FlowerCopy>,
    used_edges: HashSet<Edge>,
    vertex_copies: HashMap<Vertex, Vec<usize>>,
}

impl FlowerLedger {
    fn new() -> FlowerLedger {
        FlowerLedger {
            copies: Vec::new(),
            used_edges: HashSet::new(),
            vertex_copies: HashMap::new(),
        }
    }

    /// True when `hostset` shares at least r vertices with some copy.
    fn shares_too_much(&self, hostset: &[Vertex], r: usize) -> bool {
        let mut per_copy: HashMap<usize, usize> = HashMap::new();
        for v in hostset {
            if let Some(list) = self.vertex_copies.get(v) {
                for &c in list {
                    let e = per_copy.entry(c).or_insert(0);
                    *e += 1;
                    if *e >= r {
                        return true;
                    }
                }
            }
        }
        false
    }
}

/// Strategy for targets with a starplus decomposition whose flower is
/// edge-balanced and whose ray-excess ratio condition holds.
pub struct StarplusBuilder {
    target_n: u32,
    r: u32,
    s: usize,
    /// Reserved center hosts: 1..=c.
    center_hosts: Vec<Vertex>,
    /// Target labels of the center, sorted.
    center_labels: Vec<Vertex>,
    /// Compacted flower pattern and its original target labels.
    flower: MultiHypergraph,
    flower_labels: Vec<Vertex>,
    /// Cap edges in target labels, sorted edge order.
    cap_edges: Vec<Edge>,
    /// Per cap edge: the designated r-subset, in compacted flower vertex ids.
    cap_slot_pattern: Vec<Vec<u32>>,
    lambda2: u64,
    split: Option<PhaseClock>,
    resolved_split: Option<PhaseClock>,
    cond_strict: bool,

    // Runtime state.
    starred: HashSet<Edge>,
    adj: HashMap<Vertex, Vec<Edge>>,
    ledger: FlowerLedger,
    slot_lookup: HashMap<Edge, usize>,
    claim: Option<Embedding>,
    search_nodes: usize,
    searches_capped: u64,
}

/// Backtracking nodes allowed per collection attempt. In the sparse regimes
/// the strategies play in, searches stay local and tiny; the cap only binds
/// far above threshold, where missing a copy is harmless.
const SEARCH_NODE_BUDGET: usize = 200_000;

impl StarplusBuilder {
    /// Validates the decomposition certificates and fixes the cap slot
    /// template (the lexicographically smallest r-subset of each cap edge
    /// avoiding the center).
    pub fn new(
        target: &MultiHypergraph,
        decomposition: &StarplusDecomposition,
        r: u32,
        split: Option<PhaseClock>,
    ) -> Result<StarplusBuilder> {
        let s = target.s();
        if decomposition.s != s || decomposition.k != target.n() {
            return Err(Error::parameter(
                "decomposition does not describe the target",
            ));
        }
        if decomposition.center.len() != s - r as usize {
            return Err(Error::parameter(format!(
                "center size {} must equal s - r = {}",
                decomposition.center.len(),
                s - r as usize
            )));
        }
        let cond_strict = match decomposition.condition14 {
            Condition14::Strict => true,
            Condition14::Equality => false,
            Condition14::Violated => {
                return Err(Error::parameter(
                    "ray-excess ratio condition violated; no matching strategy",
                ))
            }
        };
        if !decomposition.flower_edge_balanced {
            return Err(Error::parameter("flower is not edge-balanced"));
        }
        let (flower, flower_labels) = decomposition.flower.compacted();
        let mut label_index: HashMap<Vertex, u32> = HashMap::new();
        for (i, &v) in flower_labels.iter().enumerate() {
            label_index.insert(v, i as u32 + 1);
        }
        let center_labels = decomposition.center.clone();
        let mut cap_edges: Vec<Edge> = decomposition.cap.distinct_edges().cloned().collect();
        cap_edges.sort();
        let mut cap_slot_pattern = Vec::with_capacity(cap_edges.len());
        for e in &cap_edges {
            let outside: Vec<Vertex> = e
                .iter()
                .filter(|v| !center_labels.contains(v))
                .collect();
            if outside.len() < r as usize {
                return Err(Error::parameter(format!(
                    "cap edge {e:?} has fewer than r vertices outside the center"
                )));
            }
            let mut slot: Vec<u32> = Vec::with_capacity(r as usize);
            for &v in outside.iter().take(r as usize) {
                match label_index.get(&v) {
                    Some(&idx) => slot.push(idx),
                    None => {
                        return Err(Error::parameter(format!(
                            "cap edge {e:?} uses vertex {v} outside the flower span"
                        )))
                    }
                }
            }
            cap_slot_pattern.push(slot);
        }
        // Cap edges may touch the center but every other cap vertex must lie
        // in the flower span for the copy to close over the same k vertices.
        for e in &cap_edges {
            for v in e.iter() {
                if !center_labels.contains(&v) && !label_index.contains_key(&v) {
                    return Err(Error::parameter(format!(
                        "cap edge {e:?} adds vertex {v} outside the starplus span"
                    )));
                }
            }
        }
        let c = center_labels.len();
        Ok(StarplusBuilder {
            target_n: target.n(),
            r,
            s,
            center_hosts: (1..=c as u32).collect(),
            center_labels,
            flower,
            flower_labels,
            cap_edges,
            cap_slot_pattern,
            lambda2: decomposition.lambda2,
            split,
            resolved_split: None,
            cond_strict,
            starred: HashSet::new(),
            adj: HashMap::new(),
            ledger: FlowerLedger::new(),
            slot_lookup: HashMap::new(),
            claim: None,
            search_nodes: 0,
            searches_capped: 0,
        })
    }

    fn split_for(&mut self, view: &ProcessView<'_>) -> PhaseClock {
        if let Some(c) = self.resolved_split {
            return c;
        }
        let clock = self.split.unwrap_or_else(|| {
            PhaseClock::starplus_default(view.budget, view.n, self.cond_strict, self.lambda2)
        });
        self.resolved_split = Some(clock);
        clock
    }

    fn in_phase1(&mut self, view: &ProcessView<'_>) -> bool {
        let clock = self.split_for(view);
        self.lambda2 == 0 || view.step < clock.t1
    }

    /// Collects a new flower copy through the starred edge `u`, if one
    /// exists among the starred r-sets that respects the ledger separation
    /// rules.
    fn try_collect(&mut self, u: &Edge) {
        let pattern_edges: Vec<Edge> = self.flower.distinct_edges().cloned().collect();
        if pattern_edges.is_empty() {
            return;
        }
        self.search_nodes = 0;
        let fn_vertices = self.flower.n() as usize;
        // Map each pattern edge onto u in every vertex order; extend by
        // backtracking over the remaining pattern vertices.
        for anchor in &pattern_edges {
            let anchor_vs: Vec<u32> = anchor.iter().collect();
            let mut perm_iter = permutations(u.vertices());
            while let Some(perm) = perm_iter.next_perm() {
                let mut assign: Vec<Vertex> = vec![0; fn_vertices + 1];
                let mut used: HashSet<Vertex> = HashSet::new();
                let mut share: HashMap<usize, usize> = HashMap::new();
                let mut ok = true;
                for (pv, hv) in anchor_vs.iter().zip(perm.iter()) {
                    assign[*pv as usize] = *hv;
                    used.insert(*hv);
                    if !bump_share(&self.ledger, &mut share, *hv, self.r as usize) {
                        ok = false;
                        break;
                    }
                }
                if ok && self.extend_copy(&pattern_edges, &mut assign, &mut used, &mut share) {
                    return;
                }
                if self.search_nodes > SEARCH_NODE_BUDGET {
                    self.searches_capped += 1;
                    return;
                }
            }
        }
    }

    fn extend_copy(
        &mut self,
        pattern_edges: &[Edge],
        assign: &mut Vec<Vertex>,
        used: &mut HashSet<Vertex>,
        share: &mut HashMap<usize, usize>,
    ) -> bool {
        self.search_nodes += 1;
        if self.search_nodes > SEARCH_NODE_BUDGET {
            return false;
        }
        // Next unassigned pattern vertex, preferring one sharing an edge
        // with the assigned part.
        let next = (1..=self.flower.n()).find(|&v| assign[v as usize] == 0);
        let Some(pv) = next else {
            return self.accept_copy(pattern_edges, assign);
        };
        let mut candidates: Vec<Vertex> = Vec::new();
        let mut anchored = false;
        for e in pattern_edges {
            if !e.contains(pv) {
                continue;
            }
            for w in e.iter() {
                if w != pv && assign[w as usize] != 0 {
                    anchored = true;
                    if let Some(edges) = self.adj.get(&assign[w as usize]) {
                        for he in edges {
                            for cand in he.iter() {
                                if !used.contains(&cand) && !candidates.contains(&cand) {
                                    candidates.push(cand);
                                }
                            }
                        }
                    }
                    break;
                }
            }
            if anchored {
                break;
            }
        }
        if !anchored {
            // Disconnected flower piece: fall back to vertices seen in any
            // starred edge.
            for he in self.starred.iter() {
                for cand in he.iter() {
                    if !used.contains(&cand) && !candidates.contains(&cand) {
                        candidates.push(cand);
                    }
                }
            }
        }
        candidates.sort_unstable();
        for cand in candidates {
            if !bump_share(&self.ledger, share, cand, self.r as usize) {
                continue;
            }
            assign[pv as usize] = cand;
            used.insert(cand);
            let ok = pattern_edges.iter().all(|e| {
                if e.iter().any(|w| assign[w as usize] == 0) {
                    return true;
                }
                let image = Edge::new(e.iter().map(|w| assign[w as usize]).collect())
                    .expect("injective");
                self.starred.contains(&image) && !self.ledger.used_edges.contains(&image)
            });
            if ok && self.extend_copy(pattern_edges, assign, used, share) {
                return true;
            }
            used.remove(&cand);
            assign[pv as usize] = 0;
            drop_share(&self.ledger, share, cand);
        }
        false
    }

    fn accept_copy(&mut self, pattern_edges: &[Edge], assign: &[Vertex]) -> bool {
        let host: Vec<Vertex> = (1..=self.flower.n())
            .map(|v| assign[v as usize])
            .collect();
        if self.ledger.shares_too_much(&host, self.r as usize) {
            return false;
        }
        let mut images = Vec::with_capacity(pattern_edges.len());
        for e in pattern_edges {
            let image =
                Edge::new(e.iter().map(|w| assign[w as usize]).collect()).expect("injective");
            if self.ledger.used_edges.contains(&image) {
                return false;
            }
            images.push(image);
        }
        let idx = self.ledger.copies.len();
        for img in &images {
            self.ledger.used_edges.insert(img.clone());
        }
        for &v in &host {
            self.ledger.vertex_copies.entry(v).or_default().push(idx);
        }
        // Designate the cap slots for this copy.
        let mut slots: HashMap<Edge, (Vec<usize>, usize)> = HashMap::new();
        for (cap_idx, slot) in self.cap_slot_pattern.iter().enumerate() {
            let host_set =
                Edge::new(slot.iter().map(|&fv| host[(fv - 1) as usize]).collect())
                    .expect("injective");
            slots.entry(host_set).or_default().0.push(cap_idx);
        }
        for key in slots.keys() {
            self.slot_lookup.insert(key.clone(), idx);
        }
        let remaining = self.lambda2;
        self.ledger.copies.push(FlowerCopy {
            host,
            edges: images,
            remaining,
            slots,
        });
        if remaining == 0 {
            self.claim = Some(self.build_claim(idx));
        }
        true
    }

    /// Assembles the target-vertex -> host embedding for a completed copy.
    fn build_claim(&self, idx: usize) -> Embedding {
        let copy = &self.ledger.copies[idx];
        let mut map: Vec<Vertex> = Vec::with_capacity(self.target_n as usize);
        let mut used: HashSet<Vertex> = HashSet::new();
        let mut assigned: HashMap<Vertex, Vertex> = HashMap::new();
        for (i, &label) in self.center_labels.iter().enumerate() {
            assigned.insert(label, self.center_hosts[i]);
        }
        for (i, &label) in self.flower_labels.iter().enumerate() {
            assigned.insert(label, copy.host[i]);
        }
        used.extend(assigned.values().copied());
        let mut spare = (1..=u32::MAX).filter(|v| !used.contains(v));
        for v in 1..=self.target_n {
            match assigned.get(&v) {
                Some(&h) => map.push(h),
                None => map.push(spare.next().expect("hosts available")),
            }
        }
        Embedding { map }
    }

    /// Serves a cap slot hit: returns the response completing the cap edge.
    fn serve_slot(&mut self, u: &Edge) -> Option<Vec<u32>> {
        let idx = *self.slot_lookup.get(u)?;
        let copy = &mut self.ledger.copies[idx];
        let (cap_list, served) = copy.slots.get_mut(u)?;
        if *served >= cap_list.len() {
            return None;
        }
        let cap_idx = cap_list[*served];
        *served += 1;
        copy.remaining -= 1;
        let done = copy.remaining == 0;
        // Host image of the cap edge: center labels to reserved hosts,
        // flower labels through the copy.
        let cap_edge = self.cap_edges[cap_idx].clone();
        let copy_host = self.ledger.copies[idx].host.clone();
        let mut response = Vec::with_capacity(self.s - self.r as usize);
        for v in cap_edge.iter() {
            let host = if let Some(pos) = self.center_labels.iter().position(|&c| c == v) {
                self.center_hosts[pos]
            } else {
                let fi = self
                    .flower_labels
                    .iter()
                    .position(|&f| f == v)
                    .expect("validated at construction");
                copy_host[fi]
            };
            if !u.contains(host) {
                response.push(host);
            }
        }
        if done {
            self.claim = Some(self.build_claim(idx));
        }
        Some(response)
    }

    /// Ledger inspection for tests: (host vertex sets, host edge sets).
    pub fn ledger_copies(&self) -> Vec<(Vec<Vertex>, Vec<Edge>)> {
        self.ledger
            .copies
            .iter()
            .map(|c| (c.host.clone(), c.edges.clone()))
            .collect()
    }
}

/// Tracks how many vertices the partial assignment shares with each ledger
/// copy; returns false when some copy would reach r shared vertices.
fn bump_share(
    ledger: &FlowerLedger,
    share: &mut HashMap<usize, usize>,
    v: Vertex,
    r: usize,
) -> bool {
    if let Some(list) = ledger.vertex_copies.get(&v) {
        for &c in list {
            if share.get(&c).copied().unwrap_or(0) + 1 >= r {
                return false;
            }
        }
        for &c in list {
            *share.entry(c).or_insert(0) += 1;
        }
    }
    true
}

fn drop_share(ledger: &FlowerLedger, share: &mut HashMap<usize, usize>, v: Vertex) {
    if let Some(list) = ledger.vertex_copies.get(&v) {
        for &c in list {
            if let Some(e) = share.get_mut(&c) {
                *e -= 1;
            }
        }
    }
}

/// Tiny permutation iterator over a small slice (Heap's algorithm).
struct Permutations {
    items: Vec<u32>,
    c: Vec<usize>,
    i: usize,
    first: bool,
}

fn permutations(items: &[u32]) -> Permutations {
    Permutations {
        items: items.to_vec(),
        c: vec![0; items.len()],
        i: 0,
        first: true,
    }
}

impl Permutations {
    fn next_perm(&mut self) -> Option<&[u32]> {
        if self.first {
            self.first = false;
            return Some(&self.items);
        }
        let n = self.items.len();
        while self.i < n {
            if self.c[self.i] < self.i {
                if self.i % 2 == 0 {
                    self.items.swap(0, self.i);
                } else {
                    self.items.swap(self.c[self.i], self.i);
                }
                self.c[self.i] += 1;
                self.i = 0;
                return Some(&self.items);
            }
            self.c[self.i] = 0;
            self.i += 1;
        }
        None
    }
}

impl Strategy for StarplusBuilder {
    fn respond(&mut self, view: &ProcessView<'_>, u: &Edge) -> Vec<u32> {
        let phase1 = self.in_phase1(view);
        if self.claim.is_some() {
            return fresh_vertices(
                view.n,
                view.s - view.r as usize,
                u,
                &self.center_hosts.iter().copied().collect(),
            );
        }
        if phase1 {
            if u.iter().any(|v| self.center_hosts.contains(&v)) {
                return fresh_vertices(
                    view.n,
                    view.s - view.r as usize,
                    u,
                    &self.center_hosts.iter().copied().collect(),
                );
            }
            // Star the draw through the center and update the ledger.
            if self.starred.insert(u.clone()) {
                for v in u.iter() {
                    self.adj.entry(v).or_default().push(u.clone());
                }
                self.try_collect(u);
            }
            return self.center_hosts.iter().map(|&v| v).collect();
        }
        match self.serve_slot(u) {
            Some(v) => v,
            None => fresh_vertices(
                view.n,
                view.s - view.r as usize,
                u,
                &self.center_hosts.iter().copied().collect(),
            ),
        }
    }

    fn report_success(&self) -> Option<Embedding> {
        self.claim.clone()
    }

    fn diagnostics(&self) -> Vec<(String, u64)> {
        vec![
            ("flower_copies".to_string(), self.ledger.copies.len() as u64),
            ("searches_capped".to_string(), self.searches_capped),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::starplus_decompose;
    use crate::hypergraph::{build_target, verify_embedding, TargetSpec};
    use crate::process::{run, trial_rng, RunOptions};

    fn build_strategy(spec: &TargetSpec, r: u32) -> (MultiHypergraph, StarplusBuilder) {
        let target = build_target(spec).unwrap();
        let d = starplus_decompose(&target, target.s() - r as usize)
            .unwrap()
            .unwrap();
        let strat = StarplusBuilder::new(&target, &d, r, None).unwrap();
        (target, strat)
    }

    #[test]
    fn k4_3_as_starplus_succeeds() {
        let spec = TargetSpec::Clique { k: 4, s: 3 };
        let mut hits = 0;
        for trial in 0..10 {
            let (target, mut strat) = build_strategy(&spec, 2);
            let mut rng = trial_rng(55, trial);
            let out = run(
                300,
                2,
                3,
                &mut strat,
                &target,
                &mut rng,
                &RunOptions::new(4000),
            )
            .unwrap();
            if let Some(_step) = out.success_step {
                hits += 1;
                let claim = strat.report_success().unwrap();
                assert!(verify_embedding(&out.final_graph, &target, &claim));
            }
        }
        assert!(hits >= 8, "starplus builder succeeded only {hits}/10 times");
    }

    #[test]
    fn single_phase_when_no_excess() {
        // A pure star: K_4^(3) minus the non-center triple, center {1}.
        let spec = TargetSpec::FullStarplus {
            k: 4,
            s: 3,
            c: 1,
            cap: vec![],
        };
        let (target, mut strat) = build_strategy(&spec, 2);
        let mut rng = trial_rng(9, 0);
        let out = run(
            200,
            2,
            3,
            &mut strat,
            &target,
            &mut rng,
            &RunOptions::new(3000),
        )
        .unwrap();
        assert!(out.success_step.is_some());
    }

    #[test]
    fn ledger_copies_are_separated() {
        let spec = TargetSpec::Clique { k: 4, s: 3 };
        let (target, mut strat) = build_strategy(&spec, 2);
        let mut rng = trial_rng(14, 2);
        let _ = run(
            150,
            2,
            3,
            &mut strat,
            &target,
            &mut rng,
            &RunOptions::new(2000),
        )
        .unwrap();
        let copies = strat.ledger_copies();
        assert!(!copies.is_empty(), "no copies collected");
        for (i, (vi, ei)) in copies.iter().enumerate() {
            for (vj, ej) in copies.iter().skip(i + 1) {
                let shared = vi.iter().filter(|v| vj.contains(v)).count();
                assert!(shared < 2, "copies share {shared} vertices");
                for e in ei {
                    assert!(!ej.contains(e), "copies share edge {e:?}");
                }
            }
            // Every copy avoids the reserved center host.
            assert!(!vi.contains(&1));
            let _ = ei;
        }
    }

    #[test]
    fn wheel_strategy_constructs() {
        // W_8^(5,1) with r = 4: equality case of the ratio condition.
        // Success is not expected at this scale; the contract holding
        // throughout is the point.
        let spec = TargetSpec::Wheel { k: 8, s: 5, c: 1 };
        let (target, mut strat) = build_strategy(&spec, 4);
        let mut rng = trial_rng(31, 0);
        let out = run(
            300,
            4,
            5,
            &mut strat,
            &target,
            &mut rng,
            &RunOptions::new(2000),
        )
        .unwrap();
        let _ = out;
    }

    #[test]
    fn rejects_violated_condition() {
        let target = build_target(&TargetSpec::Clique { k: 6, s: 3 }).unwrap();
        let d = starplus_decompose(&target, 1).unwrap().unwrap();
        assert!(StarplusBuilder::new(&target, &d, 2, None).is_err());
    }
}
