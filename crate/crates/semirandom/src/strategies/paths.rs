//! Growing a single loose path, and closing it into a loose cycle in the
//! regime where the player can supply both connecting overlap sets.

use std::collections::HashSet;

use super::{fresh_vertices, try_fresh_vertices};
use crate::hypergraph::{Edge, Embedding};
use crate::process::{ProcessView, Strategy};

/// Bookkeeping for one growing `ell`-tight path.
///
/// The linear order of the canonical copy is assembled lazily: the first
/// edge's degree-one vertices (`start_free`) and the last edge's degree-one
/// vertices (`pending`) stay unordered until a neighbor commits them, so a
/// closing edge can still choose which of them take the boundary positions.
pub(crate) struct PathGrower {
    pub m_goal: u32,
    pub s: u32,
    pub ell: u32,
    pub r: u32,
    pub edges_built: u32,
    pub start_free: Vec<u32>,
    pub middle: Vec<u32>,
    pub pending: Vec<u32>,
    pub vertices: HashSet<u32>,
}

impl PathGrower {
    pub fn new(m_goal: u32, s: u32, ell: u32, r: u32) -> PathGrower {
        PathGrower {
            m_goal,
            s,
            ell,
            r,
            edges_built: 0,
            start_free: Vec::new(),
            middle: Vec::new(),
            pending: Vec::new(),
            vertices: HashSet::new(),
        }
    }

    pub fn complete(&self) -> bool {
        self.edges_built >= self.m_goal
    }

    /// Tries to use the draw `u` to begin or extend the path. Returns the
    /// response vertices on success; `None` means the caller should waste
    /// the move.
    pub fn try_step(&mut self, view: &ProcessView<'_>, u: &Edge) -> Option<Vec<u32>> {
        if self.complete() {
            return None;
        }
        let s = self.s as usize;
        let ell = self.ell as usize;
        let r = self.r as usize;
        if self.edges_built == 0 {
            let v = try_fresh_vertices(view.n, s - r, u, &self.vertices)?;
            self.pending = u.iter().chain(v.iter().copied()).collect();
            self.pending.sort_unstable();
            self.vertices.extend(self.pending.iter().copied());
            self.edges_built = 1;
            return Some(v);
        }
        if u.iter().any(|x| self.vertices.contains(&x)) {
            return None;
        }
        // Overlap: the ell smallest degree-one vertices of the end edge.
        let mut excluded = self.vertices.clone();
        excluded.extend(u.iter());
        let fresh = try_fresh_vertices(view.n, s - ell - r, u, &excluded)?;
        let overlap: Vec<u32> = self.pending[..ell].to_vec();
        let rest: Vec<u32> = self.pending[ell..].to_vec();
        if self.edges_built == 1 {
            self.start_free = rest;
        } else {
            self.middle.extend(rest);
        }
        self.middle.extend(overlap.iter().copied());
        let mut new_pending: Vec<u32> = u.iter().chain(fresh.iter().copied()).collect();
        new_pending.sort_unstable();
        self.vertices.extend(new_pending.iter().copied());
        self.pending = new_pending;
        self.edges_built += 1;
        let mut response = overlap;
        response.extend(fresh);
        Some(response)
    }

    /// Canonical linear order once the path is complete.
    pub fn linear_order(&self) -> Vec<u32> {
        let mut order = self.start_free.clone();
        order.extend(self.middle.iter().copied());
        order.extend(self.pending.iter().copied());
        order
    }
}

/// Grows one loose path edge by edge, wasting every draw that touches the
/// structure built so far. Needs `ell <= s/2` and `s - r >= ell` so the
/// player can always contribute the overlap plus fresh vertices.
pub struct PathBuilder {
    grower: PathGrower,
    claim: Option<Embedding>,
}

impl PathBuilder {
    pub fn new(m: u32, s: u32, ell: u32, r: u32) -> crate::Result<PathBuilder> {
        check_regime(m, s, ell, r)?;
        Ok(PathBuilder {
            grower: PathGrower::new(m, s, ell, r),
            claim: None,
        })
    }
}

fn check_regime(m: u32, s: u32, ell: u32, r: u32) -> crate::Result<()> {
    if m < 1 || ell < 1 || 2 * ell > s || s < r + ell || r < 1 {
        return Err(crate::Error::parameter(format!(
            "path/cycle builder needs m >= 1, 1 <= ell <= s/2, s - r >= ell \
             (got m={m}, s={s}, ell={ell}, r={r})"
        )));
    }
    Ok(())
}

impl Strategy for PathBuilder {
    fn respond(&mut self, view: &ProcessView<'_>, u: &Edge) -> Vec<u32> {
        if self.claim.is_some() {
            return waste(view, u, &self.grower.vertices);
        }
        match self.grower.try_step(view, u) {
            Some(v) => {
                if self.grower.complete() {
                    self.claim = Some(Embedding {
                        map: self.grower.linear_order(),
                    });
                }
                v
            }
            None => waste(view, u, &self.grower.vertices),
        }
    }

    fn report_success(&self) -> Option<Embedding> {
        self.claim.clone()
    }
}

fn waste(view: &ProcessView<'_>, u: &Edge, reserved: &HashSet<u32>) -> Vec<u32> {
    fresh_vertices(view.n, view.s - view.r as usize, u, reserved)
}

/// Builds a loose cycle in the regime `s - r >= 2 ell`: grows a path with
/// `m - 1` edges, then closes it with one edge taking `ell` degree-one
/// vertices from each end plus `s - 2 ell - r` fresh vertices.
pub struct LooseCycleBuilder {
    s: u32,
    ell: u32,
    r: u32,
    grower: PathGrower,
    claim: Option<Embedding>,
}

impl LooseCycleBuilder {
    pub fn new(m: u32, s: u32, ell: u32, r: u32) -> crate::Result<LooseCycleBuilder> {
        check_regime(m, s, ell, r)?;
        if s < 2 * ell + r {
            return Err(crate::Error::parameter(format!(
                "loose cycle closing needs s - r >= 2 ell (got s={s}, ell={ell}, r={r})"
            )));
        }
        if m < (s + 1) / (s - ell) || m < 2 {
            return Err(crate::Error::parameter(format!(
                "cycle too short: m={m} for s={s}, ell={ell}"
            )));
        }
        Ok(LooseCycleBuilder {
            s,
            ell,
            r,
            grower: PathGrower::new(m - 1, s, ell, r),
            claim: None,
        })
    }

    fn try_close(&mut self, view: &ProcessView<'_>, u: &Edge) -> Option<Vec<u32>> {
        let ell = self.ell as usize;
        let s = self.s as usize;
        let r = self.r as usize;
        if u.iter().any(|x| self.grower.vertices.contains(&x)) {
            return None;
        }
        let mut excluded = self.grower.vertices.clone();
        excluded.extend(u.iter());
        let fresh = try_fresh_vertices(view.n, s - 2 * ell - r, u, &excluded)?;
        let mut new_block: Vec<u32> = u.iter().chain(fresh.iter().copied()).collect();
        new_block.sort_unstable();

        let order = if self.grower.edges_built == 1 {
            // Single-edge path: both overlap sets come out of the same edge.
            let e1 = &self.grower.pending;
            let l_end: Vec<u32> = e1[..ell].to_vec();
            let l_start: Vec<u32> = e1[ell..2 * ell].to_vec();
            let rest: Vec<u32> = e1[2 * ell..].to_vec();
            let mut order = l_start.clone();
            order.extend(rest);
            order.extend(l_end.iter().copied());
            order.extend(new_block.iter().copied());
            self.claim_response(order, l_start, l_end, fresh)
        } else {
            let l_end: Vec<u32> = self.grower.pending[..ell].to_vec();
            let end_rest: Vec<u32> = self.grower.pending[ell..].to_vec();
            let l_start: Vec<u32> = self.grower.start_free[..ell].to_vec();
            let start_rest: Vec<u32> = self.grower.start_free[ell..].to_vec();
            let mut order = l_start.clone();
            order.extend(start_rest);
            order.extend(self.grower.middle.iter().copied());
            order.extend(end_rest);
            order.extend(l_end.iter().copied());
            order.extend(new_block.iter().copied());
            self.claim_response(order, l_start, l_end, fresh)
        };
        Some(order)
    }

    fn claim_response(
        &mut self,
        order: Vec<u32>,
        l_start: Vec<u32>,
        l_end: Vec<u32>,
        fresh: Vec<u32>,
    ) -> Vec<u32> {
        self.claim = Some(Embedding { map: order });
        let mut response = l_start;
        response.extend(l_end);
        response.extend(fresh);
        response
    }
}

impl Strategy for LooseCycleBuilder {
    fn respond(&mut self, view: &ProcessView<'_>, u: &Edge) -> Vec<u32> {
        if self.claim.is_some() {
            return waste(view, u, &self.grower.vertices);
        }
        if !self.grower.complete() {
            return match self.grower.try_step(view, u) {
                Some(v) => v,
                None => waste(view, u, &self.grower.vertices),
            };
        }
        match self.try_close(view, u) {
            Some(v) => v,
            None => waste(view, u, &self.grower.vertices),
        }
    }

    fn report_success(&self) -> Option<Embedding> {
        self.claim.clone()
    }
}
