//! Mutable construction and surgery for webs.
//!
//! The builder tolerates intermediate states a `Web` cannot represent: open
//! edge ends (danglings) and edges awaiting deletion. `finish` compacts to a
//! closed web, deleting color-0 edges, contracting 2-valent vertices, and
//! collecting self-closed edges into the free-loop counter.

use std::collections::BTreeMap;

use super::{Dart, Web, WebError};

/// One end of an edge: 0 = tail (edge points away), 1 = head.
pub type End = u8;

#[derive(Clone, Debug)]
struct BEdge {
    color: u32,
    /// Attachment per end: (vertex, slot), or None while dangling.
    ends: [Option<(usize, u8)>; 2],
}

#[derive(Clone, Debug)]
pub struct WebBuilder {
    edges: Vec<Option<BEdge>>,
    /// verts[v] = three (edge, end) attachments in counterclockwise order.
    verts: Vec<Option<[(usize, End); 3]>>,
    loops: BTreeMap<u32, u64>,
}

impl WebBuilder {
    pub fn new() -> Self {
        WebBuilder {
            edges: Vec::new(),
            verts: Vec::new(),
            loops: BTreeMap::new(),
        }
    }

    pub fn from_web(w: &Web) -> Self {
        let mut b = WebBuilder::new();
        for e in 0..w.num_edges() {
            b.edges.push(Some(BEdge {
                color: w.color(e),
                ends: [None, None],
            }));
        }
        for (v, darts) in w.verts().iter().enumerate() {
            let mut attach = [(0usize, 0u8); 3];
            for (s, &d) in darts.iter().enumerate() {
                let e = Web::edge_of(d);
                let end: End = if Web::is_tail(d) { 0 } else { 1 };
                attach[s] = (e, end);
                b.edges[e].as_mut().unwrap().ends[end as usize] = Some((v, s as u8));
            }
            b.verts.push(Some(attach));
        }
        for (&c, &n) in w.loops() {
            *b.loops.entry(c).or_insert(0) += n;
        }
        b
    }

    /// New edge with both ends dangling. Color must be nonzero.
    pub fn new_edge(&mut self, color: u32) -> usize {
        assert!(color > 0, "color-0 edges are never created");
        self.edges.push(Some(BEdge {
            color,
            ends: [None, None],
        }));
        self.edges.len() - 1
    }

    /// New trivalent vertex attaching three dangling edge ends, given in
    /// counterclockwise order.
    pub fn new_vertex(&mut self, attach: [(usize, End); 3]) -> usize {
        let v = self.verts.len();
        for (s, &(e, end)) in attach.iter().enumerate() {
            let be = self.edges[e].as_mut().expect("edge exists");
            assert!(be.ends[end as usize].is_none(), "end already attached");
            be.ends[end as usize] = Some((v, s as u8));
        }
        self.verts.push(Some(attach));
        v
    }

    pub fn add_loop(&mut self, color: u32, count: u64) {
        if color > 0 && count > 0 {
            *self.loops.entry(color).or_insert(0) += count;
        }
    }

    pub fn color(&self, e: usize) -> u32 {
        self.edges[e].as_ref().unwrap().color
    }

    pub fn set_color(&mut self, e: usize, color: u32) {
        self.edges[e].as_mut().unwrap().color = color;
    }

    /// Reverse an edge's orientation, keeping its position in the embedding.
    pub fn reverse_edge(&mut self, e: usize) {
        let be = self.edges[e].as_mut().unwrap();
        be.ends.swap(0, 1);
        let ends = be.ends;
        for (end, slot) in ends.iter().enumerate() {
            if let Some((v, s)) = slot {
                self.verts[*v].as_mut().unwrap()[*s as usize] = (e, end as End);
            }
        }
    }

    /// Join two dangling ends directly (no vertex): the two edges become one,
    /// or a free loop if they are the same edge. The joined ends must have
    /// opposite roles (one tail, one head) and equal colors.
    pub fn splice(&mut self, e1: usize, end1: End, e2: usize, end2: End) {
        assert_ne!(end1, end2, "splice joins a head to a tail");
        let c1 = self.color(e1);
        let c2 = self.color(e2);
        assert_eq!(c1, c2, "spliced ends must agree in color");
        if e1 == e2 {
            // the edge closes on itself: a free loop
            self.edges[e1] = None;
            self.add_loop(c1, 1);
            return;
        }
        // keep e1; its `end1` takes over e2's other end
        let far = self.edges[e2].as_ref().unwrap().ends[(1 - end2) as usize];
        assert!(
            self.edges[e1].as_ref().unwrap().ends[end1 as usize].is_none(),
            "splice requires a dangling end"
        );
        assert!(
            self.edges[e2].as_ref().unwrap().ends[end2 as usize].is_none(),
            "splice requires a dangling end"
        );
        self.edges[e1].as_mut().unwrap().ends[end1 as usize] = far;
        if let Some((v, s)) = far {
            self.verts[v].as_mut().unwrap()[s as usize] = (e1, end1);
        }
        self.edges[e2] = None;
    }

    /// Detach an edge end from its vertex, leaving it dangling; returns the
    /// old attachment. Internal helper for deletions.
    fn detach(&mut self, e: usize, end: End) -> Option<(usize, u8)> {
        let be = self.edges[e].as_mut().unwrap();
        be.ends[end as usize].take()
    }

    /// Delete an edge entirely; each endpoint vertex (if any) drops to
    /// valence 2 and is contracted immediately. Contraction requires the two
    /// remaining edges to be a through-flow pair (equal colors, one in one
    /// out); a remaining pair on the same edge becomes a free loop.
    pub fn remove_edge_and_contract(&mut self, e: usize) {
        let ends = self.edges[e].as_ref().unwrap().ends;
        self.edges[e] = None;
        let mut touched = Vec::new();
        for slot in ends.iter().flatten() {
            touched.push(slot.0);
        }
        for v in touched {
            self.contract_vertex(v, e);
        }
    }

    /// Contract a vertex after one of its edges (`gone`) was deleted.
    fn contract_vertex(&mut self, v: usize, gone: usize) {
        let Some(attach) = self.verts[v] else {
            return;
        };
        let remaining: Vec<(usize, End)> = attach
            .iter()
            .copied()
            .filter(|&(e, _)| e != gone && self.edges[e].is_some())
            .collect();
        assert_eq!(remaining.len(), 2, "contract expects a 2-valent vertex");
        self.verts[v] = None;
        let (ea, enda) = remaining[0];
        let (eb, endb) = remaining[1];
        self.detach(ea, enda);
        self.detach(eb, endb);
        // through-flow: the vertex-side ends must be one head, one tail
        self.splice(ea, enda, eb, endb);
    }

    /// Remove a vertex, leaving its edges' ends dangling.
    pub fn dissolve_vertex(&mut self, v: usize) {
        let attach = self.verts[v].take().expect("vertex exists");
        for (e, end) in attach {
            if self.edges[e].is_some() {
                self.detach(e, end);
            }
        }
    }

    /// Delete a fully detached edge.
    pub fn delete_edge(&mut self, e: usize) {
        let be = self.edges[e].take().expect("edge exists");
        assert!(
            be.ends.iter().all(|x| x.is_none()),
            "delete requires a detached edge"
        );
    }

    /// Remove a digon: two edges `e1`, `e2` joining vertices `va`, `vb`.
    /// Both vertices disappear and their external edges are spliced into a
    /// single edge (or a free loop if they are the same edge). The external
    /// colors must agree, which the flow condition guarantees.
    pub fn remove_digon(&mut self, va: usize, vb: usize, e1: usize, e2: usize) {
        let find_ext = |slots: &[(usize, End); 3]| {
            slots
                .iter()
                .copied()
                .find(|&(e, _)| e != e1 && e != e2)
                .expect("digon vertex has an external edge")
        };
        let (xa, xa_end) = find_ext(self.verts[va].as_ref().unwrap());
        let (xb, xb_end) = find_ext(self.verts[vb].as_ref().unwrap());
        self.edges[e1] = None;
        self.edges[e2] = None;
        self.verts[va] = None;
        self.verts[vb] = None;
        self.detach(xa, xa_end);
        self.detach(xb, xb_end);
        self.splice(xa, xa_end, xb, xb_end);
    }

    /// Compact to a closed web. Fails if any end is still dangling or the
    /// result violates web invariants.
    pub fn finish(self) -> Result<Web, WebError> {
        // compact edges
        let mut emap = vec![usize::MAX; self.edges.len()];
        let mut colors = Vec::new();
        for (e, be) in self.edges.iter().enumerate() {
            if let Some(be) = be {
                emap[e] = colors.len();
                colors.push(be.color);
            }
        }
        // compact vertices and emit dart triples
        let mut verts = Vec::new();
        for vslots in self.verts.iter().flatten() {
            let mut darts = [0 as Dart; 3];
            for (s, &(e, end)) in vslots.iter().enumerate() {
                let be = self.edges[e]
                    .as_ref()
                    .ok_or_else(|| WebError::Malformed(format!("vertex uses deleted edge {e}")))?;
                if be.ends[end as usize].is_none() {
                    return Err(WebError::Malformed(format!("edge {e} end {end} dangling")));
                }
                darts[s] = 2 * emap[e] as Dart + end as Dart;
            }
            verts.push(darts);
        }
        for (e, be) in self.edges.iter().enumerate() {
            if let Some(be) = be {
                for end in 0..2 {
                    if be.ends[end].is_none() {
                        return Err(WebError::Malformed(format!("edge {e} end {end} dangling")));
                    }
                }
            }
        }
        Web::new(verts, colors, self.loops)
    }
}

impl Default for WebBuilder {
    fn default() -> Self {
        Self::new()
    }
}
