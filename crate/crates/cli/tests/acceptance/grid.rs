//! Criterion 3: grid distances equal breadth-first search on unit-cost
//! 4-connected grids, and behave like a metric with diagonals on.

use antiplan::grid::{shortest_dist_with, Connectivity, DistanceField, OccupancyGrid};
use antiplan::Cell;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;

fn random_grid(rng: &mut ChaCha8Rng, w: u32, h: u32, blockage: f64) -> OccupancyGrid {
    let mut g = OccupancyGrid::new(w, h, 1.0);
    for y in 0..h {
        for x in 0..w {
            if rng.gen_bool(blockage) {
                g.set_blocked(Cell::new(x, y), true);
            }
        }
    }
    g
}

fn bfs_hops(g: &OccupancyGrid, source: Cell) -> Vec<Option<u32>> {
    let idx = |c: Cell| (c.y * g.width() + c.x) as usize;
    let mut hops = vec![None; (g.width() * g.height()) as usize];
    hops[idx(source)] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(c) = queue.pop_front() {
        let d = hops[idx(c)].unwrap();
        for (dx, dy) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
            let nx = c.x as i64 + dx;
            let ny = c.y as i64 + dy;
            if nx < 0 || ny < 0 {
                continue;
            }
            let n = Cell::new(nx as u32, ny as u32);
            if !g.in_bounds(n) || g.is_blocked(n) || hops[idx(n)].is_some() {
                continue;
            }
            hops[idx(n)] = Some(d + 1);
            queue.push_back(n);
        }
    }
    hops
}

#[test]
fn criterion_3_grid_distances() {
    let mut rng = crate::support::rng(0xAC03);

    // 200 random 12x12 grids, diagonals off, against breadth-first search
    let mut grids = 0;
    while grids < 200 {
        let g = random_grid(&mut rng, 12, 12, 0.2);
        let free: Vec<Cell> = g.free_cells().collect();
        if free.is_empty() {
            continue;
        }
        let src = free[rng.gen_range(0..free.len())];
        let field = DistanceField::compute_with(&g, src, Connectivity::Four).unwrap();
        let hops = bfs_hops(&g, src);
        for &c in &free {
            let d = field.dist(c);
            match hops[(c.y * g.width() + c.x) as usize] {
                Some(h) => assert!(
                    (d - h as f64).abs() < 1e-9,
                    "grid {grids}: {src}->{c} dijkstra {d} vs bfs {h}"
                ),
                None => assert!(d.is_infinite(), "grid {grids}: {src}->{c} should be unreachable"),
            }
        }
        grids += 1;
    }

    // symmetry and monotonicity with diagonals on
    for _ in 0..50 {
        let g = random_grid(&mut rng, 12, 12, 0.2);
        let free: Vec<Cell> = g.free_cells().collect();
        if free.len() < 3 {
            continue;
        }
        for _ in 0..10 {
            let a = free[rng.gen_range(0..free.len())];
            let b = free[rng.gen_range(0..free.len())];
            let c = free[rng.gen_range(0..free.len())];
            let ab = shortest_dist_with(&g, a, b, Connectivity::Eight).unwrap();
            let ba = shortest_dist_with(&g, b, a, Connectivity::Eight).unwrap();
            if ab.is_finite() {
                assert!((ab - ba).abs() < 1e-9, "symmetry: {a}<->{b} {ab} vs {ba}");
            } else {
                assert!(ba.is_infinite());
            }
            let bc = shortest_dist_with(&g, b, c, Connectivity::Eight).unwrap();
            let ac = shortest_dist_with(&g, a, c, Connectivity::Eight).unwrap();
            assert!(ac <= ab + bc + 1e-9, "triangle: {a}->{c} {ac} > {}", ab + bc);
            // extra moves can only shorten paths
            let a4 = shortest_dist_with(&g, a, b, Connectivity::Four).unwrap();
            assert!(ab <= a4 + 1e-9, "monotone: octile {ab} > axis {a4} for {a}->{b}");
        }
    }
    println!("[criterion 3] grid distances: PASS (200/200 grids match bfs, metric properties hold)");
}
