//! Random web corpus: seeded generation of valid closed webs, used by the
//! property suites (confluence, positivity, specialization coherence,
//! multiplicativity, coloring-lattice rank).
//!
//! Webs are generated as ladder closures: a few upward strands carrying
//! colors, transfer rungs moving color between neighboring strands, and a
//! plat closure of every strand onto itself. Candidate rung words are
//! rejection-sampled until each strand returns to its initial color, which
//! is exactly the condition for the closure to satisfy the flow condition.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::builder::WebBuilder;
use super::{Web, WebError};

/// A transfer rung between strand `pos` and `pos + 1`, moving `t` units of
/// color to the right (`to_right`) or to the left.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rung {
    pub pos: usize,
    pub to_right: bool,
    pub t: u32,
}

/// Build the closure of a ladder: `colors[p]` enters strand `p` at the
/// bottom, the rungs apply in order bottom to top, and each strand closes
/// onto itself. Fails unless every strand's color returns to its initial
/// value at the top. Strands of color 0 carry no edge; they may pick up
/// color from a rung mid-ladder as long as they return to 0 at the top.
pub fn ladder_closure(colors: &[u32], rungs: &[Rung]) -> Result<Web, WebError> {
    let s = colors.len();
    let mut b = WebBuilder::new();
    let mut cur: Vec<u32> = colors.to_vec();
    // per strand: the bottom edge (its tail stays open for the closure) and
    // the current top handle (edge, end), or None while the strand carries
    // color 0
    let mut bottom: Vec<Option<usize>> = Vec::with_capacity(s);
    let mut dangling: Vec<Option<(usize, u8)>> = Vec::with_capacity(s);
    for &c in colors {
        if c == 0 {
            bottom.push(None);
            dangling.push(None);
        } else {
            let e = b.new_edge(c);
            bottom.push(Some(e));
            dangling.push(Some((e, 1)));
        }
    }
    for r in rungs {
        if r.pos + 1 >= s {
            return Err(WebError::Malformed("rung position out of range".into()));
        }
        let (donor, recv) = if r.to_right {
            (r.pos, r.pos + 1)
        } else {
            (r.pos + 1, r.pos)
        };
        if r.t == 0 || r.t > cur[donor] {
            return Err(WebError::Malformed("rung transfers too much color".into()));
        }
        let cd = cur[donor] - r.t;
        let cr = cur[recv] + r.t;
        // the donor side: either a fork vertex, or (when fully drained) the
        // strand itself bends into the rung
        let rung_handle: (usize, u8) = if cd == 0 {
            dangling[donor].take().expect("drained strand has a top")
        } else {
            let below = dangling[donor].take().expect("donor strand has a top");
            let rung = b.new_edge(r.t);
            let above = b.new_edge(cd);
            if donor < recv {
                // donor on the left, rung leaves to the right:
                // counterclockwise order below, rung, above
                b.new_vertex([below, (rung, 0), (above, 0)]);
            } else {
                // donor on the right, rung leaves to the left
                b.new_vertex([below, (above, 0), (rung, 0)]);
            }
            dangling[donor] = Some((above, 1));
            (rung, 1)
        };
        // the receiver side: a fuse vertex, or the rung becomes the strand
        if cur[recv] == 0 {
            dangling[recv] = Some(rung_handle);
        } else {
            let below = dangling[recv].take().expect("receiver strand has a top");
            let above = b.new_edge(cr);
            if recv > donor {
                // receiver on the right, rung arrives from the left
                b.new_vertex([below, (above, 0), rung_handle]);
            } else {
                // receiver on the left, rung arrives from the right
                b.new_vertex([below, rung_handle, (above, 0)]);
            }
            dangling[recv] = Some((above, 1));
        }
        cur[donor] = cd;
        cur[recv] = cr;
    }
    if cur != colors {
        return Err(WebError::Malformed(
            "strand colors do not close up".into(),
        ));
    }
    // plat closure: each strand's top joins its own bottom
    for p in 0..s {
        let Some(be) = bottom[p] else { continue };
        let (te, tend) = dangling[p].take().expect("closing strand has a top");
        b.splice(te, tend, be, 0);
        if te != be {
            // `be` was absorbed into `te`; its open tail end now lives on
            // `te` at `tend` — remap any later handle that pointed at it
            for q in p + 1..s {
                if let Some(h) = dangling[q] {
                    if h.0 == be {
                        dangling[q] = Some((te, tend));
                    }
                }
            }
        }
    }
    b.finish()
}

/// Deterministically generate `count` distinct valid closed webs with at
/// most `max_edges` edges and all colors at most `max_color`.
pub fn random_closed_webs(
    seed: u64,
    count: usize,
    max_edges: usize,
    max_color: u32,
) -> Vec<Web> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut attempts = 0usize;
    while out.len() < count && attempts < count.max(1) * 10_000 {
        attempts += 1;
        let s = rng.gen_range(2..=3usize);
        let colors: Vec<u32> = (0..s).map(|_| rng.gen_range(1..=max_color)).collect();
        let n_rungs = rng.gen_range(2..=5usize);
        let mut cur = colors.clone();
        let mut rungs = Vec::with_capacity(n_rungs);
        let mut ok = true;
        for _ in 0..n_rungs {
            let pos = rng.gen_range(0..s - 1);
            let to_right = rng.gen_bool(0.5);
            let donor = if to_right { pos } else { pos + 1 };
            let recv = if to_right { pos + 1 } else { pos };
            let tmax = cur[donor].min(max_color.saturating_sub(cur[recv]));
            if tmax == 0 {
                ok = false;
                break;
            }
            let t = rng.gen_range(1..=tmax);
            cur[donor] -= t;
            cur[recv] += t;
            rungs.push(Rung { pos, to_right, t });
        }
        if !ok || cur != colors {
            continue;
        }
        let Ok(w) = ladder_closure(&colors, &rungs) else {
            continue;
        };
        if w.num_edges() > max_edges {
            continue;
        }
        if seen.insert(w.canonical_code()) {
            out.push(w);
        }
    }
    out
}

/// The disjoint union of two webs (side-by-side embedding).
pub fn disjoint_union(w1: &Web, w2: &Web) -> Web {
    let off = w1.num_darts();
    let mut verts = w1.verts().to_vec();
    for darts in w2.verts() {
        verts.push([darts[0] + off, darts[1] + off, darts[2] + off]);
    }
    let mut colors = w1.colors().to_vec();
    colors.extend_from_slice(w2.colors());
    let mut loops = w1.loops().clone();
    for (&c, &n) in w2.loops() {
        *loops.entry(c).or_insert(0) += n;
    }
    Web::new(verts, colors, loops).expect("disjoint union of valid webs is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::laurent::Subst;
    use crate::web::coloring::{bounded_faces, coloring_basis};
    use crate::web::evaluate::{Evaluator, Mode, Policy};

    fn corpus() -> Vec<Web> {
        random_closed_webs(42, 100, 12, 3)
    }

    #[test]
    fn generator_reaches_target_count() {
        let webs = corpus();
        assert_eq!(webs.len(), 100);
        for w in &webs {
            assert!(w.validate().is_ok());
            assert!(w.num_edges() <= 12);
            assert!(w.colors().iter().all(|&c| (1..=3).contains(&c)));
        }
    }

    #[test]
    fn ladder_closure_rejects_unbalanced() {
        assert!(ladder_closure(
            &[1, 1],
            &[Rung {
                pos: 0,
                to_right: true,
                t: 1
            }]
        )
        .is_err());
    }

    #[test]
    fn confluence_on_corpus() {
        let webs = corpus();
        let base = Evaluator::new();
        let alt1 = Evaluator::new();
        let alt2 = Evaluator::new();
        for (i, w) in webs.iter().enumerate() {
            let v0 = base.evaluate(w, Mode::Symbolic).unwrap();
            let v1 = alt1
                .evaluate_with_policy(w, Mode::Symbolic, Policy::Seeded(7))
                .unwrap();
            let v2 = alt2
                .evaluate_with_policy(w, Mode::Symbolic, Policy::Seeded(99))
                .unwrap();
            assert_eq!(v0, v1, "web {i} differs between policies");
            assert_eq!(v0, v2, "web {i} differs between policies");
        }
    }

    #[test]
    fn positivity_and_coherence_on_corpus() {
        let webs = corpus();
        let ev = Evaluator::new();
        for (i, w) in webs.iter().enumerate() {
            let sym = ev.evaluate(w, Mode::Symbolic).unwrap();
            for n in 2..=4 {
                let direct = ev.evaluate(w, Mode::AtN(n)).unwrap();
                let via = sym.specialize(&Subst::a_to_qpow(n)).unwrap();
                assert_eq!(direct, via, "web {i}, N = {n}: coherence");
                let p = direct.as_poly().expect("specialization is polynomial");
                assert!(
                    p.coeffs_nonnegative(),
                    "web {i}, N = {n}: negative coefficient in {p}"
                );
            }
        }
    }

    #[test]
    fn multiplicativity_on_corpus() {
        let webs = corpus();
        let ev = Evaluator::new();
        for pair in webs.chunks(2).take(20) {
            let [w1, w2] = pair else { continue };
            let both = disjoint_union(w1, w2);
            let v1 = ev.evaluate(w1, Mode::Symbolic).unwrap();
            let v2 = ev.evaluate(w2, Mode::Symbolic).unwrap();
            let v = ev.evaluate(&both, Mode::Symbolic).unwrap();
            assert_eq!(v, &v1 * &v2);
        }
    }

    #[test]
    fn coloring_rank_matches_bounded_faces_on_corpus() {
        for w in corpus() {
            assert_eq!(coloring_basis(&w).len(), bounded_faces(&w));
        }
    }
}
