fn main() {
    use mesonet::graph::build_graph;
    use mesonet::models::{solve_ubcm, solve_dcsbm_joint};
    use mesonet::Partition;
    let edges = [
        (0u64, 1u64), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3),
        (0, 4), (4, 5), (4, 6), (4, 7), (5, 6), (6, 7), (3, 7),
    ];
    let g = build_graph(&edges, None).unwrap();
    let p = Partition::from_labels(vec![0, 0, 0, 0, 1, 1, 1, 1]).unwrap();
    let u = solve_ubcm(&g.degrees(), 1e-10, 500).unwrap();
    println!("ubcm converged={} res={:.3e}", u.converged, u.residual);
    let j = solve_dcsbm_joint(&g, &p, &u.x).unwrap();
    println!("joint converged={} deg={:.3e} blk={:.3e}", j.converged, j.degree_residual, j.block_residual);
    println!("x = {:?}", j.x);
    for r in 0..2 { for s in r..2 { println!("chi({r},{s}) = {} sat={}", j.chi(r,s), j.is_saturated(r,s)); } }
}
