//! Standard small triangulated surfaces used by tests, examples and the CLI.

use std::collections::HashMap;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::PLMetric;
use crate::mesh::Triangulation;

/// Boundary of a tetrahedron, outward oriented. χ = 2.
pub fn tetrahedron() -> Triangulation {
    Triangulation::from_faces(4, &[[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]])
        .expect("tetrahedron is valid")
}

/// Vertex `(a, b)` of the 3×3 torus grid.
fn tv(a: usize, b: usize) -> usize {
    3 * (a % 3) + (b % 3)
}

/// The 9-vertex, 18-face torus: a 3×3 grid of squares, each split along the
/// same diagonal, with opposite sides identified. Every vertex has degree 6.
pub fn torus9() -> Triangulation {
    Triangulation::from_faces(9, &torus9_faces()).expect("torus is valid")
}

pub fn torus9_faces() -> Vec<[usize; 3]> {
    let mut faces = Vec::with_capacity(18);
    for a in 0..3 {
        for b in 0..3 {
            faces.push([tv(a, b), tv(a + 1, b), tv(a + 1, b + 1)]);
            faces.push([tv(a, b), tv(a + 1, b + 1), tv(a, b + 1)]);
        }
    }
    faces
}

/// Flat metric on [`torus9`] induced by the lattice spanned by `e1` (one grid
/// step in the first index) and `e2` (one step in the second). Any
/// independent pair gives K ≡ 0.
pub fn flat_torus_metric(tri: &Triangulation, e1: [f64; 2], e2: [f64; 2]) -> PLMetric {
    let step = |d: usize| -> f64 {
        match d % 3 {
            0 => 0.0,
            1 => 1.0,
            _ => -1.0,
        }
    };
    PLMetric::from_fn(tri, |e| {
        let [p, q] = tri.edge(e).expect("live edge").endpoints;
        let da = step(q / 3 + 3 - p / 3);
        let db = step(q % 3 + 3 - p % 3);
        let x = da * e1[0] + db * e2[0];
        let y = da * e1[1] + db * e2[1];
        x.hypot(y)
    })
    .expect("flat torus lengths are positive")
}

/// The equilateral flat torus: every edge has unit length.
pub fn equilateral_torus() -> (Triangulation, PLMetric) {
    let t = torus9();
    let m = PLMetric::uniform(&t, 1.0).expect("positive");
    (t, m)
}

/// The equilateral torus with one edge lengthened to 2 and the rest set to
/// 1.2. Exactly that edge violates the Delaunay condition; its flip length is
/// `2·sqrt(1.2² − 1)`.
pub fn kite_torus() -> (Triangulation, PLMetric) {
    let t = torus9();
    let long = t.find_edge(tv(0, 0), tv(1, 1)).expect("diagonal exists");
    let m = PLMetric::from_fn(&t, |e| if e == long { 2.0 } else { 1.2 }).expect("positive");
    (t, m)
}

/// Log-factors used to build [`surgery_demo_torus`].
pub const SURGERY_DEMO_U: [f64; 9] = [
    -0.4987884077572027,
    0.2757041549757504,
    0.189524084006375,
    -0.24349484780956354,
    0.10925637557214052,
    0.3459126861101982,
    0.09308234425501993,
    -0.07217964262517773,
    -0.41987036730390837,
];

/// The equilateral torus scaled by [`SURGERY_DEMO_U`] and then flipped to its
/// Delaunay triangulation (five flips). Flowing back to a flat metric
/// requires undoing those flips: on the fixed triangulation the α = 0 Yamabe
/// flow drives a face to degeneracy.
pub fn surgery_demo_torus() -> (Triangulation, PLMetric) {
    let (t, m) = equilateral_torus();
    let scaled = crate::geometry::scale_metric(&t, &m, &SURGERY_DEMO_U).expect("in range");
    let (t, m, _) = crate::geometry::make_delaunay(&t, &scaled).expect("nondegenerate");
    (t, m)
}

pub const CUBE_POSITIONS: [[f64; 3]; 8] = [
    [0.0, 0.0, 0.0],
    [1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [1.0, 1.0, 0.0],
    [0.0, 0.0, 1.0],
    [1.0, 0.0, 1.0],
    [0.0, 1.0, 1.0],
    [1.0, 1.0, 1.0],
];

pub const CUBE_FACES: [[usize; 3]; 12] = [
    [0, 2, 3],
    [0, 3, 1],
    [4, 5, 7],
    [4, 7, 6],
    [0, 1, 5],
    [0, 5, 4],
    [2, 6, 7],
    [2, 7, 3],
    [0, 4, 6],
    [0, 6, 2],
    [1, 3, 7],
    [1, 7, 5],
];

/// Unit cube surface, each square split by one diagonal, with its
/// Euclidean edge lengths. Every vertex has K = π/2.
pub fn cube() -> (Triangulation, PLMetric) {
    let t = Triangulation::from_faces(8, &CUBE_FACES).expect("cube is valid");
    let m = PLMetric::from_fn(&t, |e| {
        let [a, b] = t.edge(e).expect("live edge").endpoints;
        let (p, q) = (CUBE_POSITIONS[a], CUBE_POSITIONS[b]);
        ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
    })
    .expect("positive");
    (t, m)
}

/// A genus-2 surface with 7 vertices, 27 edges and 18 faces (χ = −2).
///
/// Built from a 16-gon whose sides are identified by the word
/// a b a⁻¹ b⁻¹ c d c⁻¹ d⁻¹, each letter covering two sides. The even corners
/// all become one vertex; the side midpoints become four more; two interior
/// points P and Q fan the two halves of the polygon. The result has several
/// pairs of parallel edges, so it is given by an explicit gluing.
pub fn genus2() -> Triangulation {
    let (faces, glue) = genus2_gluing();
    Triangulation::from_glued_faces(7, &faces, &glue).expect("genus-2 gluing is valid")
}

pub fn genus2_gluing() -> (Vec<[usize; 3]>, Vec<[usize; 3]>) {
    #[derive(Clone, Copy, PartialEq, Eq, Hash)]
    enum Key {
        Side(usize),
        P(usize),
        Q(usize),
        PQ,
    }
    const P: usize = 5;
    const Q: usize = 6;
    let partner = [5, 4, 7, 6, 1, 0, 3, 2, 13, 12, 15, 14, 9, 8, 11, 10];
    let corner = |t: usize| -> usize {
        match t % 16 {
            t if t % 2 == 0 => 0,
            1 | 5 => 1,
            3 | 7 => 2,
            9 | 13 => 3,
            _ => 4,
        }
    };
    let mut ids: HashMap<Key, usize> = HashMap::new();
    let mut id = |k: Key| {
        let n = ids.len();
        *ids.entry(k).or_insert(n)
    };
    let side = |t: usize| Key::Side(t.min(partner[t]));

    let mut faces = Vec::with_capacity(18);
    let mut glue = Vec::with_capacity(18);
    for t in 0..8 {
        faces.push([corner(t), corner(t + 1), P]);
        glue.push([id(Key::P(t + 1)), id(Key::P(t)), id(side(t))]);
    }
    for t in 8..16 {
        faces.push([corner(t), corner(t + 1), Q]);
        glue.push([id(Key::Q((t + 1) % 16)), id(Key::Q(t)), id(side(t))]);
    }
    faces.push([corner(0), P, Q]);
    glue.push([id(Key::PQ), id(Key::Q(0)), id(Key::P(0))]);
    faces.push([P, corner(8), Q]);
    glue.push([id(Key::Q(8)), id(Key::PQ), id(Key::P(8))]);
    (faces, glue)
}

/// Random lengths in [1, 1.5): every triangle inequality holds strictly.
pub fn random_metric(tri: &Triangulation, seed: u64) -> PLMetric {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PLMetric::from_fn(tri, |_| rng.random_range(1.0..1.5)).expect("positive")
}

/// One nondegenerate metric on each standard surface: tetrahedron, 9-vertex
/// torus, cube and genus 2.
pub fn sample_meshes(seed: u64) -> Vec<(Triangulation, PLMetric)> {
    let tet = tetrahedron();
    let tor = torus9();
    let g2 = genus2();
    let (cube_t, _) = cube();
    vec![
        (tet.clone(), random_metric(&tet, seed)),
        (tor.clone(), random_metric(&tor, seed.wrapping_add(1))),
        (cube_t.clone(), random_metric(&cube_t, seed.wrapping_add(2))),
        (g2.clone(), random_metric(&g2, seed.wrapping_add(3))),
    ]
}
