//! Canonical codes for webs: a relabeling-invariant encoding of the rotation
//! system, colors, and orientations, minimized over all starting darts and
//! both orientations of the surface.
//!
//! Mirror images share a code. This is sound for evaluation because the
//! reduction rule set is closed under reflection with identical coefficients
//! (reflecting a digon gives a digon with the same colors; reflecting a
//! square switch swaps the roles of the two rungs but leaves the binomial
//! coefficient unchanged), so mirror webs always evaluate equally; the
//! property is also exercised empirically on the random corpus.

use super::{Dart, Web};

/// Code for one connected component starting from `start`, traversing
/// rotations counterclockwise (`reflect = false`) or clockwise.
///
/// Per visited vertex the code emits, for its three darts in rotation order
/// beginning at the entry dart: the first-encounter edge number, the dart's
/// parity (tail/head), and the edge color.
fn component_code(
    web: &Web,
    pos: &[(usize, u8)],
    start: Dart,
    reflect: bool,
) -> Vec<u32> {
    let mut vmap = vec![u32::MAX; web.num_vertices()];
    let mut emap = vec![u32::MAX; web.num_edges()];
    let mut next_v = 0u32;
    let mut next_e = 0u32;
    let mut code = Vec::new();
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(start);
    while let Some(d0) = queue.pop_front() {
        let (v, s0) = pos[d0 as usize];
        if vmap[v] != u32::MAX {
            continue;
        }
        vmap[v] = next_v;
        next_v += 1;
        for k in 0..3u8 {
            let s = if reflect {
                (s0 + 3 - k % 3) % 3
            } else {
                (s0 + k) % 3
            };
            let d = web.verts()[v][s as usize];
            let e = Web::edge_of(d);
            if emap[e] == u32::MAX {
                emap[e] = next_e;
                next_e += 1;
            }
            code.push(emap[e]);
            code.push(if Web::is_tail(d) { 0 } else { 1 });
            code.push(web.color(e));
            queue.push_back(Web::mate(d));
        }
    }
    code
}

/// Minimal component code over all starting darts within the component of
/// `seed` and both orientations.
fn best_component_code(web: &Web, pos: &[(usize, u8)], seed: Dart) -> Vec<u32> {
    // collect the component's darts
    let mut darts = Vec::new();
    let mut seen_v = vec![false; web.num_vertices()];
    let mut stack = vec![pos[seed as usize].0];
    seen_v[pos[seed as usize].0] = true;
    while let Some(v) = stack.pop() {
        for &d in &web.verts()[v] {
            darts.push(d);
            let (w, _) = pos[Web::mate(d) as usize];
            if !seen_v[w] {
                seen_v[w] = true;
                stack.push(w);
            }
        }
    }
    let mut best: Option<Vec<u32>> = None;
    for &d in &darts {
        for reflect in [false, true] {
            let c = component_code(web, pos, d, reflect);
            if best.as_ref().map_or(true, |b| c < *b) {
                best = Some(c);
            }
        }
    }
    best.unwrap()
}

/// The full canonical code: sorted per-component codes, then loop records.
pub fn canonical_code(web: &Web) -> Vec<u32> {
    let pos = web.dart_positions();
    let mut comp_codes: Vec<Vec<u32>> = Vec::new();
    let mut assigned = vec![false; web.num_vertices()];
    for v in 0..web.num_vertices() {
        if assigned[v] {
            continue;
        }
        let code = best_component_code(web, &pos, web.verts()[v][0]);
        // mark the component visited
        let mut stack = vec![v];
        assigned[v] = true;
        while let Some(u) = stack.pop() {
            for &d in &web.verts()[u] {
                let (w, _) = pos[Web::mate(d) as usize];
                if !assigned[w] {
                    assigned[w] = true;
                    stack.push(w);
                }
            }
        }
        comp_codes.push(code);
    }
    comp_codes.sort();
    let mut out = Vec::new();
    for c in comp_codes {
        out.push(u32::MAX); // component separator
        out.extend(c);
    }
    for (&color, &count) in web.loops() {
        out.push(u32::MAX - 1); // loop separator
        out.push(color);
        out.push(count as u32);
        out.push((count >> 32) as u32);
    }
    out
}
