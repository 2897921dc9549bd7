//! Trivalent planar webs: oriented graphs whose edges carry nonnegative
//! integer colors, with a flow condition at every vertex (colors i and j fork
//! into i+j, or fuse back), no sinks or sources, and a planar embedding given
//! as a rotation system.
//!
//! Representation: edge e owns two darts, 2e (tail end) and 2e+1 (head end);
//! each trivalent vertex lists its three incident darts in counterclockwise
//! order. Isolated colored circles live in a free-loop counter. Color-0
//! edges and 2-valent vertices are never stored; builders eliminate them.

pub mod builder;
pub mod canonical;
pub mod coloring;
pub mod corpus;
pub mod evaluate;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::RationalFn;

pub type Dart = u32;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum WebError {
    #[error("vertex {0} is not trivalent")]
    NonTrivalent(usize),
    #[error("dart {0} is out of range or used more than once")]
    BadDart(Dart),
    #[error("flow violated at vertex {0}: incoming and outgoing colors differ")]
    FlowViolation(usize),
    #[error("vertex {0} is a sink or a source")]
    SinkOrSource(usize),
    #[error("component containing vertex {0} is not planar (Euler check failed)")]
    NonPlanar(usize),
    #[error("edge {0} has color 0; color-0 edges must be deleted on construction")]
    ZeroColor(usize),
    #[error("malformed web data: {0}")]
    Malformed(String),
}

/// A closed trivalent colored web with a planar rotation system.
#[derive(Clone, PartialEq, Eq)]
pub struct Web {
    /// verts[v] = the three incident darts in counterclockwise order.
    verts: Vec<[Dart; 3]>,
    /// colors[e] = color of edge e; its darts are 2e (tail) and 2e+1 (head).
    colors: Vec<u32>,
    /// Isolated circles: color -> multiplicity.
    loops: BTreeMap<u32, u64>,
}

impl Web {
    /// Build and validate a web from raw parts.
    pub fn new(
        verts: Vec<[Dart; 3]>,
        colors: Vec<u32>,
        loops: BTreeMap<u32, u64>,
    ) -> Result<Self, WebError> {
        let w = Web {
            verts,
            colors,
            loops,
        };
        w.validate()?;
        Ok(w)
    }

    /// A web with no vertices and no circles.
    pub fn empty() -> Self {
        Web {
            verts: Vec::new(),
            colors: Vec::new(),
            loops: BTreeMap::new(),
        }
    }

    /// A disjoint union of colored circles.
    pub fn circles(loops: BTreeMap<u32, u64>) -> Self {
        Web {
            verts: Vec::new(),
            colors: Vec::new(),
            loops,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.verts.len()
    }

    pub fn num_edges(&self) -> usize {
        self.colors.len()
    }

    pub fn num_darts(&self) -> u32 {
        2 * self.colors.len() as u32
    }

    pub fn verts(&self) -> &[[Dart; 3]] {
        &self.verts
    }

    pub fn color(&self, e: usize) -> u32 {
        self.colors[e]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn loops(&self) -> &BTreeMap<u32, u64> {
        &self.loops
    }

    /// The web with its free loops removed (they factor out of evaluation).
    pub fn without_loops(&self) -> Web {
        Web {
            verts: self.verts.clone(),
            colors: self.colors.clone(),
            loops: BTreeMap::new(),
        }
    }

    pub fn edge_of(d: Dart) -> usize {
        (d / 2) as usize
    }

    /// True if the dart is the tail end (the edge points away from it).
    pub fn is_tail(d: Dart) -> bool {
        d % 2 == 0
    }

    /// The other dart of the same edge.
    pub fn mate(d: Dart) -> Dart {
        d ^ 1
    }

    /// For each dart, its (vertex, slot) position.
    pub fn dart_positions(&self) -> Vec<(usize, u8)> {
        let mut pos = vec![(usize::MAX, 0u8); self.num_darts() as usize];
        for (v, darts) in self.verts.iter().enumerate() {
            for (s, &d) in darts.iter().enumerate() {
                pos[d as usize] = (v, s as u8);
            }
        }
        pos
    }

    /// Next dart counterclockwise around the same vertex.
    fn rot_next(&self, pos: &[(usize, u8)], d: Dart) -> Dart {
        let (v, s) = pos[d as usize];
        self.verts[v][((s + 1) % 3) as usize]
    }

    /// Face orbits of the permutation d -> rot_next(mate(d)); each orbit is
    /// the dart cycle bounding one region of the embedding.
    pub fn faces(&self) -> Vec<Vec<Dart>> {
        let pos = self.dart_positions();
        let nd = self.num_darts() as usize;
        let mut seen = vec![false; nd];
        let mut faces = Vec::new();
        for start in 0..nd as u32 {
            if seen[start as usize] {
                continue;
            }
            let mut face = Vec::new();
            let mut d = start;
            loop {
                seen[d as usize] = true;
                face.push(d);
                d = self.rot_next(&pos, Self::mate(d));
                if d == start {
                    break;
                }
            }
            faces.push(face);
        }
        faces
    }

    /// Connected components of vertices (via edges); returns a component id
    /// per vertex and the number of components.
    fn vertex_components(&self) -> (Vec<usize>, usize) {
        let pos = self.dart_positions();
        let n = self.verts.len();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        for v0 in 0..n {
            if comp[v0] != usize::MAX {
                continue;
            }
            let mut stack = vec![v0];
            comp[v0] = count;
            while let Some(v) = stack.pop() {
                for &d in &self.verts[v] {
                    let (w, _) = pos[Self::mate(d) as usize];
                    if comp[w] == usize::MAX {
                        comp[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    /// Check every structural invariant, returning the first violation.
    pub fn validate(&self) -> Result<(), WebError> {
        let nd = self.num_darts();
        let mut used = vec![false; nd as usize];
        for (v, darts) in self.verts.iter().enumerate() {
            for &d in darts {
                if d >= nd || used[d as usize] {
                    return Err(if d >= nd {
                        WebError::BadDart(d)
                    } else {
                        WebError::BadDart(d)
                    });
                }
                used[d as usize] = true;
            }
            let _ = v;
        }
        if let Some(d) = used.iter().position(|u| !u) {
            return Err(WebError::BadDart(d as Dart));
        }
        for (e, &c) in self.colors.iter().enumerate() {
            if c == 0 {
                return Err(WebError::ZeroColor(e));
            }
        }
        if let Some(c) = self.loops.keys().find(|&&c| c == 0) {
            let _ = c;
            return Err(WebError::ZeroColor(usize::MAX));
        }
        // Flow and sink/source checks.
        for (v, darts) in self.verts.iter().enumerate() {
            let mut inc: i64 = 0;
            let mut out: i64 = 0;
            let mut n_in = 0;
            let mut n_out = 0;
            for &d in darts {
                let c = self.colors[Self::edge_of(d)] as i64;
                if Self::is_tail(d) {
                    out += c;
                    n_out += 1;
                } else {
                    inc += c;
                    n_in += 1;
                }
            }
            if n_in == 0 || n_out == 0 {
                return Err(WebError::SinkOrSource(v));
            }
            if inc != out {
                return Err(WebError::FlowViolation(v));
            }
        }
        // Planarity: V - E + F = 2 on each connected component.
        let (comp, count) = self.vertex_components();
        if count > 0 {
            let pos = self.dart_positions();
            let mut v_c = vec![0i64; count];
            let mut e_c = vec![0i64; count];
            let mut f_c = vec![0i64; count];
            for (v, &c) in comp.iter().enumerate() {
                let _ = v;
                v_c[c] += 1;
            }
            for e in 0..self.colors.len() {
                let (v, _) = pos[(2 * e) as usize];
                e_c[comp[v]] += 1;
            }
            for face in self.faces() {
                let (v, _) = pos[face[0] as usize];
                f_c[comp[v]] += 1;
            }
            for c in 0..count {
                if v_c[c] - e_c[c] + f_c[c] != 2 {
                    let v = comp.iter().position(|&x| x == c).unwrap();
                    return Err(WebError::NonPlanar(v));
                }
            }
        }
        Ok(())
    }

    /// Canonical code; see the canonical module.
    pub fn canonical_code(&self) -> Vec<u32> {
        canonical::canonical_code(self)
    }

    /// Canonical code as a printable string, for debugging and error reports.
    pub fn code_string(&self) -> String {
        let code = self.canonical_code();
        code.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(".")
    }
}

/// Validate a raw web, per the module contract. Identity on valid input.
pub fn validate_web(raw: Web) -> Result<Web, WebError> {
    raw.validate()?;
    Ok(raw)
}

impl fmt::Debug for Web {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Web{{V={}, E={}, colors={:?}, loops={:?}}}",
            self.verts.len(),
            self.colors.len(),
            self.colors,
            self.loops
        )
    }
}

/// A formal linear combination of webs with rational-function coefficients,
/// merged by canonical code and with zero coefficients dropped.
#[derive(Clone, Debug, Default)]
pub struct WebCombination {
    terms: Vec<(RationalFn, Web)>,
}

impl WebCombination {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(coef: RationalFn, web: Web) -> Self {
        let mut c = Self::new();
        c.push(coef, web);
        c
    }

    pub fn push(&mut self, coef: RationalFn, web: Web) {
        if coef.is_zero() {
            return;
        }
        let code = web.canonical_code();
        if let Some(i) = self
            .terms
            .iter()
            .position(|(_, w)| w.canonical_code() == code)
        {
            self.terms[i].0 = &self.terms[i].0 + &coef;
            if self.terms[i].0.is_zero() {
                self.terms.remove(i);
            }
        } else {
            self.terms.push((coef, web));
        }
    }

    pub fn extend_scaled(&mut self, scale: &RationalFn, other: &WebCombination) {
        for (c, w) in &other.terms {
            self.push(scale * c, w.clone());
        }
    }

    pub fn terms(&self) -> &[(RationalFn, Web)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Serialized web: vertex dart triples, edge records, loop records.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct WebRepr {
    pub vertices: Vec<Vec<Dart>>,
    pub edges: Vec<EdgeRepr>,
    pub loops: Vec<LoopRepr>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct EdgeRepr {
    pub tail: Dart,
    pub head: Dart,
    pub color: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct LoopRepr {
    pub color: u32,
    pub count: u64,
}

impl WebRepr {
    pub fn from_web(w: &Web) -> Self {
        WebRepr {
            vertices: w.verts.iter().map(|d| d.to_vec()).collect(),
            edges: w
                .colors
                .iter()
                .enumerate()
                .map(|(e, &c)| EdgeRepr {
                    tail: 2 * e as Dart,
                    head: 2 * e as Dart + 1,
                    color: c,
                })
                .collect(),
            loops: w
                .loops
                .iter()
                .map(|(&color, &count)| LoopRepr { color, count })
                .collect(),
        }
    }

    pub fn to_web(&self) -> Result<Web, WebError> {
        let mut verts = Vec::with_capacity(self.vertices.len());
        for v in &self.vertices {
            let arr: [Dart; 3] = v
                .as_slice()
                .try_into()
                .map_err(|_| WebError::NonTrivalent(verts.len()))?;
            verts.push(arr);
        }
        let mut colors = vec![0u32; self.edges.len()];
        for (e, er) in self.edges.iter().enumerate() {
            if er.tail != 2 * e as Dart || er.head != 2 * e as Dart + 1 {
                return Err(WebError::Malformed(format!(
                    "edge {} darts must be {} and {}",
                    e,
                    2 * e,
                    2 * e + 1
                )));
            }
            colors[e] = er.color;
        }
        let mut loops = BTreeMap::new();
        for l in &self.loops {
            if l.count == 0 {
                continue;
            }
            *loops.entry(l.color).or_insert(0) += l.count;
        }
        Web::new(verts, colors, loops)
    }
}
