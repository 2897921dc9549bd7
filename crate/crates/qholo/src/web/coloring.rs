//! The coloring lattice of a web.
//!
//! Forgetting colors, the admissible integer colorings of a web's underlying
//! graph form the kernel of the incidence boundary map ∂(e) = head − tail,
//! i.e. the integer cycle space. For a connected graph this lattice has rank
//! |E| − |V| + 1, which for a planar embedding equals the number of bounded
//! faces.
//!
//! Basis vectors are indexed by the web's edges, followed by one coordinate
//! per free circle (circles are listed by ascending color, multiplicities
//! expanded). Components are processed in order of their smallest vertex and
//! their bases concatenated; the free-circle unit vectors come last.

use super::Web;

/// Number of coordinates of a coloring vector: edges, then individual
/// circles.
pub fn coloring_dim(w: &Web) -> usize {
    let circles: u64 = w.loops().values().sum();
    w.num_edges() + circles as usize
}

/// A basis for the integer lattice of flow-preserving edge recolorings,
/// computed from fundamental cycles of a spanning forest. Each basis vector
/// assigns an integer per coordinate (see `coloring_dim`); adding any
/// integer combination to an admissible coloring preserves the flow
/// condition at every vertex.
pub fn coloring_basis(w: &Web) -> Vec<Vec<i64>> {
    let dim = coloring_dim(w);
    let nv = w.num_vertices();
    let ne = w.num_edges();
    let pos = w.dart_positions();
    // endpoint vertices per edge: (tail, head)
    let ends: Vec<(usize, usize)> = (0..ne)
        .map(|e| (pos[2 * e].0, pos[2 * e + 1].0))
        .collect();
    // adjacency: vertex -> (edge, neighbor, +1 if the edge leaves here)
    let mut adj: Vec<Vec<(usize, usize, i64)>> = vec![Vec::new(); nv];
    for (e, &(t, h)) in ends.iter().enumerate() {
        adj[t].push((e, h, 1));
        adj[h].push((e, t, -1));
    }
    let mut basis = Vec::new();
    // spanning forest: parent[v] = (edge to parent, +1 if that edge leaves v)
    let mut parent: Vec<Option<(usize, i64)>> = vec![None; nv];
    let mut visited = vec![false; nv];
    let mut tree_edge = vec![false; ne];
    for root in 0..nv {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut order = vec![root];
        let mut qi = 0;
        while qi < order.len() {
            let v = order[qi];
            qi += 1;
            for &(e, u, sgn) in &adj[v] {
                if !visited[u] {
                    visited[u] = true;
                    tree_edge[e] = true;
                    // the edge connects u to its parent v; it leaves u iff it
                    // entered v
                    parent[u] = Some((e, -sgn));
                    order.push(u);
                }
            }
        }
        // one fundamental cycle per non-tree edge of this component
        for e in 0..ne {
            if tree_edge[e] || !comp_contains(&ends, e, &order) {
                continue;
            }
            let (t, h) = ends[e];
            let mut x = vec![0i64; dim];
            x[e] = 1;
            // close the cycle through the tree: walk h -> root with +, then
            // cancel against t -> root with −; shared ancestors cancel
            walk_to_root(&parent, &ends, h, 1, &mut x);
            walk_to_root(&parent, &ends, t, -1, &mut x);
            basis.push(x);
        }
    }
    // each free circle recolors independently
    let mut coord = ne;
    for (_, &count) in w.loops() {
        for _ in 0..count {
            let mut x = vec![0i64; dim];
            x[coord] = 1;
            basis.push(x);
            coord += 1;
        }
    }
    basis
}

fn comp_contains(ends: &[(usize, usize)], e: usize, order: &[usize]) -> bool {
    order.contains(&ends[e].0)
}

/// Add `sign` times the tree path from `v` to its root into `x`: for each
/// step to the parent, +1 if the tree edge is traversed with its
/// orientation, −1 against it.
fn walk_to_root(
    parent: &[Option<(usize, i64)>],
    ends: &[(usize, usize)],
    mut v: usize,
    sign: i64,
    x: &mut [i64],
) {
    while let Some((e, leaves)) = parent[v] {
        x[e] += sign * leaves;
        let (t, h) = ends[e];
        v = if v == t { h } else { t };
    }
}

/// Bounded faces across all components: each component contributes its face
/// count minus one (its outer region), and each free circle bounds one disk.
pub fn bounded_faces(w: &Web) -> usize {
    let circles: u64 = w.loops().values().sum();
    if w.num_vertices() == 0 {
        return circles as usize;
    }
    let pos = w.dart_positions();
    let (comp, count) = {
        // component id per vertex via edges
        let nv = w.num_vertices();
        let mut comp = vec![usize::MAX; nv];
        let mut count = 0;
        for v0 in 0..nv {
            if comp[v0] != usize::MAX {
                continue;
            }
            let mut stack = vec![v0];
            comp[v0] = count;
            while let Some(v) = stack.pop() {
                for &d in &w.verts()[v] {
                    let (u, _) = pos[Web::mate(d) as usize];
                    if comp[u] == usize::MAX {
                        comp[u] = count;
                        stack.push(u);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    };
    let mut faces_per = vec![0usize; count];
    for face in w.faces() {
        faces_per[comp[pos[face[0] as usize].0]] += 1;
    }
    faces_per.iter().map(|&f| f - 1).sum::<usize>() + circles as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn theta() -> Web {
        Web::new(vec![[5, 0, 2], [1, 4, 3]], vec![1, 1, 2], BTreeMap::new()).unwrap()
    }

    /// Integer rank of a matrix by fraction-free Gaussian elimination; an
    /// independent oracle for the expected basis size.
    fn int_rank(mut m: Vec<Vec<i64>>) -> usize {
        let rows = m.len();
        if rows == 0 {
            return 0;
        }
        let cols = m[0].len();
        let mut rank = 0;
        let mut col = 0;
        while rank < rows && col < cols {
            let Some(p) = (rank..rows).find(|&r| m[r][col] != 0) else {
                col += 1;
                continue;
            };
            m.swap(rank, p);
            for r in 0..rows {
                if r != rank && m[r][col] != 0 {
                    let (a, b) = (m[rank][col], m[r][col]);
                    let g = gcd(a.abs(), b.abs());
                    let (fa, fb) = (b / g, a / g);
                    for c in 0..cols {
                        m[r][c] = m[r][c] * fb - m[rank][c] * fa;
                    }
                }
            }
            rank += 1;
            col += 1;
        }
        rank
    }

    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    /// Signed vertex-by-edge incidence matrix.
    fn incidence(w: &Web) -> Vec<Vec<i64>> {
        let pos = w.dart_positions();
        let mut m = vec![vec![0i64; w.num_edges()]; w.num_vertices()];
        for e in 0..w.num_edges() {
            let (t, _) = pos[2 * e];
            let (h, _) = pos[2 * e + 1];
            m[t][e] -= 1;
            m[h][e] += 1;
        }
        m
    }

    fn check_web(w: &Web) {
        let basis = coloring_basis(w);
        // every basis vector is a flow (kernel of the incidence map)
        let inc = incidence(w);
        for x in &basis {
            for row in &inc {
                let dot: i64 = row.iter().zip(&x[..w.num_edges()]).map(|(a, b)| a * b).sum();
                assert_eq!(dot, 0, "basis vector not a flow");
            }
        }
        // independence
        assert_eq!(int_rank(basis.clone()), basis.len());
        // rank oracle: |E| + circles − rank(incidence)
        let circles: u64 = w.loops().values().sum();
        let expect = w.num_edges() + circles as usize - int_rank(inc);
        assert_eq!(basis.len(), expect);
        // planar count
        assert_eq!(basis.len(), bounded_faces(w));
    }

    #[test]
    fn circle_rank_one() {
        let mut loops = BTreeMap::new();
        loops.insert(1u32, 1u64);
        let w = Web::circles(loops);
        let basis = coloring_basis(&w);
        assert_eq!(basis, vec![vec![1]]);
        check_web(&w);
    }

    #[test]
    fn theta_rank_two() {
        let w = theta();
        let basis = coloring_basis(&w);
        assert_eq!(basis.len(), 2);
        check_web(&w);
    }

    #[test]
    fn ladder_web_rank() {
        // the 4-vertex ladder closure: |E| = 6, |V| = 4, connected -> r = 3
        let w = {
            use crate::web::builder::WebBuilder;
            let mut b = WebBuilder::new();
            let l0 = b.new_edge(2);
            let l1 = b.new_edge(1);
            let r0 = b.new_edge(1);
            let r1 = b.new_edge(2);
            let rung1 = b.new_edge(1);
            let rung2 = b.new_edge(1);
            b.new_vertex([(l0, 1), (rung1, 0), (l1, 0)]);
            b.new_vertex([(r0, 1), (r1, 0), (rung1, 1)]);
            b.new_vertex([(l1, 1), (rung2, 1), (l0, 0)]);
            b.new_vertex([(r1, 1), (r0, 0), (rung2, 0)]);
            b.finish().unwrap()
        };
        let basis = coloring_basis(&w);
        assert_eq!(basis.len(), w.num_edges() - w.num_vertices() + 1);
        check_web(&w);
    }

    #[test]
    fn disjoint_union_concatenates() {
        // theta plus two circles: ranks add
        let t = theta();
        let mut loops = BTreeMap::new();
        loops.insert(1u32, 2u64);
        let w = Web::new(t.verts().to_vec(), t.colors().to_vec(), loops).unwrap();
        let basis = coloring_basis(&w);
        assert_eq!(basis.len(), 2 + 2);
        check_web(&w);
    }
}
