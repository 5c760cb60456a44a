//! Loose-cycle builders for the regimes where the random set must supply
//! part of the closing overlap: a path is grown first, two families of edges
//! are attached to its ends, and the player waits for a draw that splits
//! across one edge of each family.

use std::collections::{HashMap, HashSet};

use super::paths::PathGrower;
use super::{fresh_vertices, try_fresh_vertices};
use crate::error::{Error, Result};
use crate::hypergraph::{Edge, Embedding};
use crate::process::{ProcessView, Strategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Zero,
    One,
    Two,
}

/// Shared bookkeeping: the initial path, the two overlap sets fixed on its
/// ends, and the canonical cyclic order assembled at completion.
struct CycleCore {
    m: u32,
    s: u32,
    ell: u32,
    grower: Option<PathGrower>,
    /// Overlap set on the path's far end (`pending` side).
    l_prime: Vec<u32>,
    /// Overlap set on the path's start (`start_free` side); equals `l_prime`
    /// when m = 3.
    l_dprime: Vec<u32>,
    /// V(P), or the fixed overlap set when m = 3.
    path_vertices: HashSet<u32>,
    /// Everything the strategy has built; wasted moves and fresh picks stay
    /// outside it.
    structure: HashSet<u32>,
}

impl CycleCore {
    fn new(m: u32, s: u32, ell: u32, r: u32) -> CycleCore {
        let grower = (m >= 4).then(|| PathGrower::new(m - 3, s, ell, r));
        CycleCore {
            m,
            s,
            ell,
            grower,
            l_prime: Vec::new(),
            l_dprime: Vec::new(),
            path_vertices: HashSet::new(),
            structure: HashSet::new(),
        }
    }

    /// Runs phase 0. Returns the response when the draw was consumed; once
    /// the path is complete the overlap sets are fixed.
    fn phase0_step(&mut self, view: &ProcessView<'_>, u: &Edge) -> Option<Vec<u32>> {
        let grower = self.grower.as_mut().expect("phase 0 only when m >= 4");
        let v = grower.try_step(view, u)?;
        if grower.complete() {
            self.fix_overlaps();
        }
        Some(v)
    }

    fn phase0_done(&self) -> bool {
        match &self.grower {
            Some(g) => g.complete(),
            None => true,
        }
    }

    /// Vertices a wasted move must avoid.
    fn reserved(&self) -> &HashSet<u32> {
        match &self.grower {
            Some(g) if !g.complete() => &g.vertices,
            _ => &self.structure,
        }
    }

    /// For m = 3 there is no path; the shared overlap set is the ell
    /// smallest vertices.
    fn init_m3(&mut self) {
        let l: Vec<u32> = (1..=self.ell).collect();
        self.l_prime = l.clone();
        self.l_dprime = l.clone();
        self.path_vertices = l.iter().copied().collect();
        self.structure = self.path_vertices.clone();
    }

    fn fix_overlaps(&mut self) {
        let ell = self.ell as usize;
        let g = self.grower.as_ref().expect("path exists");
        if self.m == 4 {
            // Single-edge path: carve both overlap sets out of e1.
            let e1 = &g.pending;
            self.l_dprime = e1[..ell].to_vec();
            self.l_prime = e1[e1.len() - ell..].to_vec();
        } else {
            self.l_prime = g.pending[..ell].to_vec();
            self.l_dprime = g.start_free[..ell].to_vec();
        }
        self.path_vertices = g.vertices.clone();
        self.structure = g.vertices.clone();
    }

    /// Cyclic canonical order of the completed copy.
    #[allow(clippy::too_many_arguments)]
    fn assemble_order(
        &self,
        hit_p: &[u32],
        e_prime_rest: &[u32],
        u_mid: &[u32],
        hit_pp: &[u32],
        e_dprime_rest: &[u32],
    ) -> Vec<u32> {
        let ell = self.ell as usize;
        let mut order = Vec::with_capacity(((self.s - self.ell) * self.m) as usize);
        if self.m == 3 {
            order.extend_from_slice(hit_p);
            order.extend_from_slice(e_prime_rest);
            order.extend(self.l_prime.iter().copied());
            order.extend_from_slice(e_dprime_rest);
            order.extend_from_slice(hit_pp);
            order.extend_from_slice(u_mid);
            return order;
        }
        let g = self.grower.as_ref().expect("path exists");
        if self.m == 4 {
            let e1 = &g.pending;
            order.extend(self.l_dprime.iter().copied());
            order.extend_from_slice(&e1[ell..e1.len() - ell]);
            order.extend(self.l_prime.iter().copied());
        } else {
            order.extend(self.l_dprime.iter().copied());
            order.extend_from_slice(&g.start_free[ell..]);
            order.extend(g.middle.iter().copied());
            order.extend_from_slice(&g.pending[ell..]);
            order.extend(self.l_prime.iter().copied());
        }
        order.extend_from_slice(e_prime_rest);
        order.extend_from_slice(hit_p);
        order.extend_from_slice(u_mid);
        order.extend_from_slice(hit_pp);
        order.extend_from_slice(e_dprime_rest);
        order
    }
}

fn check_cycle_params(m: u32, s: u32, ell: u32, r: u32) -> Result<()> {
    if m < 3 || s < 3 || ell < 1 || 2 * ell > s || s < r + ell || r < 1 {
        return Err(Error::parameter(format!(
            "cycle builder needs m >= 3, s >= 3, 1 <= ell <= s/2, s - r >= ell \
             (got m={m}, s={s}, ell={ell}, r={r})"
        )));
    }
    Ok(())
}

fn sorted(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable();
    v
}

/// Three-phase builder for the regime `s - r = 2 ell - 1`: the closing draw
/// must contribute exactly one vertex of some attached edge.
pub struct CycleThreePhase {
    core: CycleCore,
    phase: Phase,
    phase1_start: u64,
    t1: u64,
    side_cap: u64,
    parity: u64,
    /// Free parts (edge minus overlap set) of the attached edges; pairwise
    /// disjoint by construction.
    e_prime: Vec<Vec<u32>>,
    e_dprime: Vec<Vec<u32>>,
    /// Free-part vertex -> (side, index).
    owner: HashMap<u32, (bool, u32)>,
    claim: Option<Embedding>,
}

impl CycleThreePhase {
    pub fn new(m: u32, s: u32, ell: u32, r: u32) -> Result<CycleThreePhase> {
        check_cycle_params(m, s, ell, r)?;
        if s - r != 2 * ell - 1 {
            return Err(Error::parameter(format!(
                "three-phase builder needs s - r = 2 ell - 1 (got s={s}, ell={ell}, r={r})"
            )));
        }
        Ok(CycleThreePhase {
            core: CycleCore::new(m, s, ell, r),
            phase: Phase::Zero,
            phase1_start: 0,
            t1: 0,
            side_cap: 0,
            parity: 0,
            e_prime: Vec::new(),
            e_dprime: Vec::new(),
            owner: HashMap::new(),
            claim: None,
        })
    }

    fn start_phase1(&mut self, view: &ProcessView<'_>) {
        if self.core.m == 3 && self.core.path_vertices.is_empty() {
            self.core.init_m3();
        }
        self.phase = Phase::One;
        self.phase1_start = view.step;
        self.t1 = view.budget.saturating_sub(self.core.m as u64 - 3) / 2;
        self.side_cap = (self.t1 / 3).max(1);
    }

    fn phase1_step(&mut self, view: &ProcessView<'_>, u: &Edge) -> Option<Vec<u32>> {
        let take_prime = self.parity % 2 == 0;
        self.parity += 1;
        let side_len = if take_prime {
            self.e_prime.len()
        } else {
            self.e_dprime.len()
        };
        if side_len as u64 >= self.side_cap {
            return None;
        }
        if u.iter().any(|x| self.core.structure.contains(&x)) {
            return None;
        }
        let ell = self.core.ell as usize;
        let mut excluded = self.core.structure.clone();
        excluded.extend(u.iter());
        let fresh = try_fresh_vertices(view.n, ell - 1, u, &excluded)?;
        let overlap = if take_prime {
            &self.core.l_prime
        } else {
            &self.core.l_dprime
        };
        let free: Vec<u32> = sorted(u.iter().chain(fresh.iter().copied()).collect());
        let idx = side_len as u32;
        for &v in &free {
            self.owner.insert(v, (!take_prime, idx));
        }
        self.core.structure.extend(free.iter().copied());
        if take_prime {
            self.e_prime.push(free);
        } else {
            self.e_dprime.push(free);
        }
        let mut response = overlap.clone();
        response.extend(fresh);
        Some(response)
    }

    fn phase2_step(&mut self, u: &Edge) -> Option<Vec<u32>> {
        if u.iter().any(|x| self.core.path_vertices.contains(&x)) {
            return None;
        }
        if self.e_dprime.is_empty() {
            return None;
        }
        // Hits per attached edge; free parts are disjoint so each vertex
        // names at most one edge.
        let mut prime_hits: HashMap<u32, u32> = HashMap::new();
        let mut dprime_touched: HashSet<u32> = HashSet::new();
        let mut hit_vertex: HashMap<u32, u32> = HashMap::new();
        for v in u.iter() {
            if let Some(&(is_dprime, idx)) = self.owner.get(&v) {
                if is_dprime {
                    dprime_touched.insert(idx);
                } else {
                    *prime_hits.entry(idx).or_insert(0) += 1;
                    hit_vertex.entry(idx).or_insert(v);
                }
            }
        }
        let chosen_prime = prime_hits
            .iter()
            .filter(|(_, &c)| c == 1)
            .map(|(&i, _)| i)
            .min()?;
        let chosen_dprime = (0..self.e_dprime.len() as u32).find(|i| !dprime_touched.contains(i))?;
        let u0 = hit_vertex[&chosen_prime];

        let ell = self.core.ell as usize;
        let free_p = &self.e_prime[chosen_prime as usize];
        let free_pp = &self.e_dprime[chosen_dprime as usize];
        let picks_p: Vec<u32> = free_p.iter().copied().filter(|&v| v != u0).take(ell - 1).collect();
        let picks_pp: Vec<u32> = free_pp.iter().copied().take(ell).collect();

        let hit_p = sorted([vec![u0], picks_p.clone()].concat());
        let hit_pp = sorted(picks_pp.clone());
        let e_prime_rest: Vec<u32> = free_p.iter().copied().filter(|v| !hit_p.contains(v)).collect();
        let e_dprime_rest: Vec<u32> =
            free_pp.iter().copied().filter(|v| !hit_pp.contains(v)).collect();
        let u_mid: Vec<u32> = u.iter().filter(|&v| v != u0).collect();

        let order = self
            .core
            .assemble_order(&hit_p, &e_prime_rest, &u_mid, &hit_pp, &e_dprime_rest);
        self.claim = Some(Embedding { map: order });
        let mut response = picks_p;
        response.extend(picks_pp);
        Some(response)
    }
}

impl Strategy for CycleThreePhase {
    fn respond(&mut self, view: &ProcessView<'_>, u: &Edge) -> Vec<u32> {
        if self.claim.is_some() {
            return fresh_vertices(view.n, view.s - view.r as usize, u, self.core.reserved());
        }
        if self.phase == Phase::Zero && self.core.phase0_done() {
            self.start_phase1(view);
        }
        if self.phase == Phase::One && view.step >= self.phase1_start + self.t1 {
            self.phase = Phase::Two;
        }
        let out = match self.phase {
            Phase::Zero => self.core.phase0_step(view, u),
            Phase::One => self.phase1_step(view, u),
            Phase::Two => self.phase2_step(u),
        };
        out.unwrap_or_else(|| {
            fresh_vertices(view.n, view.s - view.r as usize, u, self.core.reserved())
        })
    }

    fn report_success(&self) -> Option<Embedding> {
        self.claim.clone()
    }
}

/// Builder for the regimes `x = 2 ell - (s - r)` with `2 <= x <= min(r, ell)`:
/// the vertex set is partitioned into three parts, attached edges grow inside
/// the first two, and the closing draw must split with `floor(x/2)` vertices
/// on one attached edge, `ceil(x/2)` on the other, remainder in the third
/// part.
pub struct CycleGeneralX {
    core: CycleCore,
    r: u32,
    x: u32,
    phase: Phase,
    phase1_start: u64,
    t1: u64,
    /// 0 = path vertex, otherwise the part index 1..3.
    part_of: Vec<u8>,
    e_prime: Vec<Vec<u32>>,
    e_dprime: Vec<Vec<u32>>,
    owner1: HashMap<u32, Vec<u32>>,
    owner2: HashMap<u32, Vec<u32>>,
    /// Times each floor(x/2)-subset of a draw has been seen; the analysis
    /// relies on at most three occurrences per subset.
    subset_counts: HashMap<Vec<u32>, u8>,
    subset_overflows: u64,
    claim: Option<Embedding>,
}

impl CycleGeneralX {
    pub fn new(m: u32, s: u32, ell: u32, r: u32) -> Result<CycleGeneralX> {
        check_cycle_params(m, s, ell, r)?;
        if s < 2 * ell || s - r >= 2 * ell - 1 {
            return Err(Error::parameter(format!(
                "general-x builder needs s - r <= 2 ell - 2 (got s={s}, ell={ell}, r={r})"
            )));
        }
        let x = 2 * ell - (s - r);
        if x < 2 || x > r.min(ell) {
            return Err(Error::parameter(format!(
                "x = {x} outside [2, min(r, ell)] for s={s}, ell={ell}, r={r}"
            )));
        }
        Ok(CycleGeneralX {
            core: CycleCore::new(m, s, ell, r),
            r,
            x,
            phase: Phase::Zero,
            phase1_start: 0,
            t1: 0,
            part_of: Vec::new(),
            e_prime: Vec::new(),
            e_dprime: Vec::new(),
            owner1: HashMap::new(),
            owner2: HashMap::new(),
            subset_counts: HashMap::new(),
            subset_overflows: 0,
            claim: None,
        })
    }

    fn record_subsets(&mut self, u: &Edge) {
        use itertools::Itertools;
        let q = (self.x / 2) as usize;
        for sub in u.vertices().iter().copied().combinations(q) {
            let c = self.subset_counts.entry(sub).or_insert(0);
            *c = c.saturating_add(1);
            if *c == 4 {
                self.subset_overflows += 1;
            }
        }
    }

    fn start_phase1(&mut self, view: &ProcessView<'_>) {
        if self.core.m == 3 && self.core.path_vertices.is_empty() {
            self.core.init_m3();
        }
        self.phase = Phase::One;
        self.phase1_start = view.step;
        self.t1 = view.budget.saturating_sub(self.core.m as u64 - 3) / 2;
        // Balanced three-way partition of the non-path vertices.
        self.part_of = vec![0; view.n as usize + 1];
        let mut next = 1u8;
        for v in 1..=view.n {
            if self.core.path_vertices.contains(&v) {
                continue;
            }
            self.part_of[v as usize] = next;
            next = next % 3 + 1;
        }
    }

    fn phase1_step(&mut self, view: &ProcessView<'_>, u: &Edge) -> Option<Vec<u32>> {
        let part = self.part_of[u.vertices()[0] as usize];
        if part == 0 || part == 3 || u.iter().any(|v| self.part_of[v as usize] != part) {
            return None;
        }
        let take_prime = part == 1;
        let extra_count = (self.core.ell - self.x) as usize;
        let mut extras = Vec::with_capacity(extra_count);
        if extra_count > 0 {
            for v in 1..=view.n {
                if extras.len() == extra_count {
                    break;
                }
                if self.part_of[v as usize] == part
                    && !u.contains(v)
                    && !self.core.structure.contains(&v)
                {
                    extras.push(v);
                }
            }
            if extras.len() < extra_count {
                return None;
            }
        }
        let free: Vec<u32> = sorted(u.iter().chain(extras.iter().copied()).collect());
        let (list, owner) = if take_prime {
            (&mut self.e_prime, &mut self.owner1)
        } else {
            (&mut self.e_dprime, &mut self.owner2)
        };
        let idx = list.len() as u32;
        for &v in &free {
            owner.entry(v).or_default().push(idx);
        }
        list.push(free);
        self.core.structure.extend(extras.iter().copied());
        self.core.structure.extend(u.iter());
        let overlap = if take_prime {
            &self.core.l_prime
        } else {
            &self.core.l_dprime
        };
        let mut response = overlap.clone();
        response.extend(extras);
        Some(response)
    }

    fn phase2_step(&mut self, u: &Edge) -> Option<Vec<u32>> {
        let lo = (self.x / 2) as usize;
        let hi = self.x as usize - lo;
        let mut in1 = Vec::new();
        let mut in2 = Vec::new();
        let mut in3 = Vec::new();
        for v in u.iter() {
            match self.part_of[v as usize] {
                1 => in1.push(v),
                2 => in2.push(v),
                3 => in3.push(v),
                _ => return None,
            }
        }
        if in1.len() != lo || in2.len() != hi || in3.len() != self.r as usize - self.x as usize {
            return None;
        }
        let chosen_prime = smallest_common_edge(&self.owner1, &in1)?;
        let chosen_dprime = smallest_common_edge(&self.owner2, &in2)?;
        let ell = self.core.ell as usize;
        let free_p = &self.e_prime[chosen_prime as usize];
        let free_pp = &self.e_dprime[chosen_dprime as usize];
        let picks_p: Vec<u32> = free_p
            .iter()
            .copied()
            .filter(|v| !u.contains(*v))
            .take(ell - lo)
            .collect();
        let picks_pp: Vec<u32> = free_pp
            .iter()
            .copied()
            .filter(|v| !u.contains(*v))
            .take(ell - hi)
            .collect();
        if picks_p.len() < ell - lo || picks_pp.len() < ell - hi {
            return None;
        }
        let hit_p = sorted([in1.clone(), picks_p.clone()].concat());
        let hit_pp = sorted([in2.clone(), picks_pp.clone()].concat());
        let e_prime_rest: Vec<u32> = free_p.iter().copied().filter(|v| !hit_p.contains(v)).collect();
        let e_dprime_rest: Vec<u32> =
            free_pp.iter().copied().filter(|v| !hit_pp.contains(v)).collect();
        let order = self
            .core
            .assemble_order(&hit_p, &e_prime_rest, &in3, &hit_pp, &e_dprime_rest);
        self.claim = Some(Embedding { map: order });
        let mut response = picks_p;
        response.extend(picks_pp);
        Some(response)
    }
}

/// Smallest edge index containing all the given vertices.
fn smallest_common_edge(owner: &HashMap<u32, Vec<u32>>, vs: &[u32]) -> Option<u32> {
    let mut iter = vs.iter();
    let first = iter.next()?;
    let mut candidates: Vec<u32> = owner.get(first)?.clone();
    for v in iter {
        let list = owner.get(v)?;
        candidates.retain(|i| list.contains(i));
        if candidates.is_empty() {
            return None;
        }
    }
    candidates.into_iter().min()
}

impl Strategy for CycleGeneralX {
    fn respond(&mut self, view: &ProcessView<'_>, u: &Edge) -> Vec<u32> {
        self.record_subsets(u);
        if self.claim.is_some() {
            return fresh_vertices(view.n, view.s - view.r as usize, u, self.core.reserved());
        }
        if self.phase == Phase::Zero && self.core.phase0_done() {
            self.start_phase1(view);
        }
        if self.phase == Phase::One && view.step >= self.phase1_start + self.t1 {
            self.phase = Phase::Two;
        }
        let out = match self.phase {
            Phase::Zero => self.core.phase0_step(view, u),
            Phase::One => self.phase1_step(view, u),
            Phase::Two => self.phase2_step(u),
        };
        out.unwrap_or_else(|| {
            fresh_vertices(view.n, view.s - view.r as usize, u, self.core.reserved())
        })
    }

    fn report_success(&self) -> Option<Embedding> {
        self.claim.clone()
    }

    fn diagnostics(&self) -> Vec<(String, u64)> {
        vec![("q_subset_overflows".to_string(), self.subset_overflows)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{build_target, verify_embedding, TargetSpec};
    use crate::process::{run, trial_rng, RunOptions};

    fn run_cycle(
        strat: &mut dyn Strategy,
        spec: &TargetSpec,
        n: u32,
        r: u32,
        budget: u64,
        seed: u64,
        trial: u64,
    ) -> Option<u64> {
        let target = build_target(spec).unwrap();
        let mut rng = trial_rng(seed, trial);
        let out = run(
            n,
            r,
            target.s(),
            strat,
            &target,
            &mut rng,
            &RunOptions::new(budget),
        )
        .unwrap();
        if let Some(step) = out.success_step {
            let claim = strat.report_success().unwrap();
            assert!(verify_embedding(&out.final_graph, &target, &claim));
            return Some(step);
        }
        None
    }

    #[test]
    fn three_phase_c4_31() {
        let spec = TargetSpec::TightCycle { m: 4, s: 3, ell: 1 };
        let mut hits = 0;
        for trial in 0..10 {
            let mut strat = CycleThreePhase::new(4, 3, 1, 2).unwrap();
            if run_cycle(&mut strat, &spec, 2000, 2, 700, 21, trial).is_some() {
                hits += 1;
            }
        }
        assert!(hits >= 8, "three-phase succeeded only {hits}/10 times");
    }

    #[test]
    fn three_phase_small_m_cases() {
        // m = 3 and m = 4 use the special overlap layouts.
        for (m, s, ell, r, budget) in [(3u32, 3u32, 1u32, 2u32, 800u64), (4, 5, 2, 2, 900)] {
            let spec = TargetSpec::TightCycle { m, s, ell };
            let mut hits = 0;
            for trial in 0..8 {
                let mut strat = CycleThreePhase::new(m, s, ell, r).unwrap();
                if run_cycle(&mut strat, &spec, 2500, r, budget, 33, trial).is_some() {
                    hits += 1;
                }
            }
            assert!(hits >= 6, "m={m} s={s}: {hits}/8");
        }
    }

    #[test]
    fn three_phase_c6_52() {
        let spec = TargetSpec::TightCycle { m: 6, s: 5, ell: 2 };
        let mut strat = CycleThreePhase::new(6, 5, 2, 2).unwrap();
        assert!(run_cycle(&mut strat, &spec, 3000, 2, 1200, 5, 0).is_some());
    }

    #[test]
    fn general_x_c4_42() {
        let spec = TargetSpec::TightCycle { m: 4, s: 4, ell: 2 };
        let mut hits = 0;
        for trial in 0..8 {
            let mut strat = CycleGeneralX::new(4, 4, 2, 2).unwrap();
            if run_cycle(&mut strat, &spec, 900, 2, 2500, 77, trial).is_some() {
                hits += 1;
            }
        }
        assert!(hits >= 6, "general-x succeeded only {hits}/8 times");
    }

    #[test]
    fn general_x_c5_73() {
        // x = 2 with r = 3: the draw splits 1 + 1 + 1 across the three parts.
        let spec = TargetSpec::TightCycle { m: 5, s: 7, ell: 3 };
        let mut strat = CycleGeneralX::new(5, 7, 3, 3).unwrap();
        let got = run_cycle(&mut strat, &spec, 1500, 3, 60_000, 13, 3);
        assert!(got.is_some());
    }

    #[test]
    fn regime_validation() {
        assert!(CycleThreePhase::new(4, 4, 2, 2).is_err());
        assert!(CycleThreePhase::new(2, 3, 1, 2).is_err());
        assert!(CycleGeneralX::new(4, 3, 1, 2).is_err());
        assert!(CycleGeneralX::new(4, 8, 3, 2).is_err());
        assert!(CycleGeneralX::new(4, 6, 3, 2).is_ok());
    }
}
