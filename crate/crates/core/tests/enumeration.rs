use nalgebra::DMatrix;
use trichain::enumeration::DEFAULT_LIMIT;
use trichain::switch::{all_switches, triangle_delta};
use trichain::*;

fn space(d: &DegreeSequence) -> StateSpace {
    StateSpace::enumerate(d, DEFAULT_LIMIT).unwrap()
}

fn regular(n: usize, k: usize) -> DegreeSequence {
    DegreeSequence::regular(n, k).unwrap()
}

/// Every edge subset of `K_n` with the right degrees, as sorted bit keys.
fn brute_force(d: &DegreeSequence) -> Vec<u128> {
    let n = d.n();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let mut out = Vec::new();
    let mut deg = vec![0usize; n];
    for mask in 0u32..(1u32 << pairs.len()) {
        deg.iter_mut().for_each(|x| *x = 0);
        for (b, &(u, v)) in pairs.iter().enumerate() {
            if mask >> b & 1 == 1 {
                deg[u] += 1;
                deg[v] += 1;
            }
        }
        if deg == d.degrees() {
            let edges: Vec<_> = pairs
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &p)| p)
                .collect();
            out.push(Graph::from_edges(n, &edges).unwrap().edge_bits());
        }
    }
    out.sort_unstable();
    out
}

#[test]
fn enumeration_matches_brute_force_up_to_seven_vertices() {
    for degrees in [
        vec![3, 3, 3, 3, 3, 3],
        vec![4, 4, 3, 3, 2, 2, 2],
        vec![3, 3, 3, 3, 2, 2, 2],
        vec![4, 4, 4, 4, 4, 4, 4],
        vec![6, 3, 3, 3, 3, 3, 3],
        vec![5, 4, 3, 3, 3, 3, 1],
    ] {
        let d = DegreeSequence::new(degrees).unwrap();
        assert_eq!(space(&d).states(), brute_force(&d).as_slice(), "{d}");
    }
}

#[test]
fn labelled_counts() {
    assert_eq!(space(&regular(4, 3)).len(), 1);
    assert_eq!(space(&regular(4, 2)).len(), 3);
    assert_eq!(space(&regular(6, 3)).len(), 70);
    assert_eq!(space(&regular(8, 3)).len(), 19355);
    // labelled 2-regular graphs
    for (n, count) in [(5, 12), (6, 70), (7, 465), (8, 3507)] {
        assert_eq!(space(&regular(n, 2)).len(), count, "2x{n}");
    }
    // complement of 2-regular on 7 vertices
    assert_eq!(space(&regular(7, 4)).len(), 465);
}

#[test]
fn every_state_realizes_the_sequence() {
    let d = DegreeSequence::new(vec![5, 4, 4, 3, 3, 3, 2]).unwrap();
    let s = space(&d);
    for i in 0..s.len() {
        let g = s.graph(i);
        let mut got = g.degrees();
        got.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(got, d.degrees());
        assert_eq!(g.count_triangles(), s.triangles()[i]);
    }
}

#[test]
fn cubic_six_census() {
    // 10 labelled copies of K_{3,3} (6!/72) and 60 prisms (6!/12)
    let s = space(&regular(6, 3));
    assert_eq!(s.census(), &[10, 0, 60, 0, 0, 0, 0]);
    assert_eq!(s.census().iter().sum::<u64>(), 70);
}

#[test]
fn cubic_eight_has_triangle_free_states() {
    let s = space(&regular(8, 3));
    assert!(s.census()[0] > 0);
    let cube = Graph::from_edges(
        8,
        &[
            (0, 1),
            (1, 3),
            (3, 2),
            (2, 0),
            (4, 5),
            (5, 7),
            (7, 6),
            (6, 4),
            (0, 4),
            (1, 5),
            (2, 6),
            (3, 7),
        ],
    )
    .unwrap();
    let i = s.index_of(cube.edge_bits()).expect("cube is a state");
    assert_eq!(s.triangles()[i], 0);
    // 2K4 is the unique maximum
    assert_eq!(s.census().iter().rposition(|&c| c > 0), Some(8));
    assert_eq!(s.census()[8], 35);
}

#[test]
fn space_too_large() {
    assert_eq!(
        StateSpace::enumerate(&regular(8, 3), 1000).unwrap_err(),
        Error::SpaceTooLarge { limit: 1000 }
    );
    assert!(matches!(
        StateSpace::enumerate(&regular(18, 3), DEFAULT_LIMIT),
        Err(Error::InvalidConfig(_))
    ));
}

#[test]
fn matrix_rows_and_diagonal() {
    for d in [
        regular(6, 3),
        regular(7, 4),
        DegreeSequence::new(vec![4, 4, 3, 3, 3, 3]).unwrap(),
    ] {
        let mut s = space(&d);
        for (which, lambda, nu) in [
            (ChainKind::Switch, 1.0, None),
            (ChainKind::TriSwitch, 1.0, None),
            (ChainKind::TriSwitch, 3.0, Some(2)),
        ] {
            s.build_matrix(which, lambda, nu);
            let m = s.matrix().unwrap();
            assert!(m.max_row_sum_error() < 1e-12);
            assert!(m.min_diagonal() >= 1.0 / 3.0 - 1e-12);
        }
    }
}

#[test]
fn unit_activity_matrix_is_symmetric() {
    let mut s = space(&regular(6, 3));
    s.build_matrix(ChainKind::TriSwitch, 1.0, None);
    let dense = s.matrix().unwrap().dense();
    assert!((dense.clone() - dense.transpose()).abs().max() < 1e-15);
}

#[test]
fn support_does_not_depend_on_activity() {
    let mut s = space(&DegreeSequence::new(vec![4, 4, 3, 3, 3, 3, 2]).unwrap());
    let support = |s: &StateSpace| -> Vec<Vec<usize>> {
        s.matrix()
            .unwrap()
            .rows
            .iter()
            .map(|r| r.iter().map(|e| e.0).collect())
            .collect()
    };
    s.build_matrix(ChainKind::TriSwitch, 1.0, None);
    let base = support(&s);
    for (lambda, nu) in [(2.0, None), (7.5, Some(1)), (3.0, Some(4))] {
        s.build_matrix(ChainKind::TriSwitch, lambda, nu);
        assert_eq!(support(&s), base);
    }
}

#[test]
fn switch_chain_is_irreducible() {
    for d in [
        regular(6, 2),
        regular(7, 2),
        regular(8, 3),
        DegreeSequence::new(vec![3, 2, 2, 2, 1]).unwrap(),
    ] {
        let mut s = space(&d);
        s.build_matrix(ChainKind::Switch, 1.0, None);
        assert!(s.check_irreducible().unwrap(), "{d}");
    }
}

#[test]
fn low_degree_tri_chain_can_be_reducible() {
    // every 2-regular graph on 5 vertices is a 5-cycle: no switch can
    // change the (empty) triangle set, so each state is isolated
    let mut s = space(&regular(5, 2));
    s.build_matrix(ChainKind::TriSwitch, 1.0, None);
    assert_eq!(s.component_count().unwrap(), 12);
    assert_eq!(s.stationary_exact(), Err(Error::NotIrreducible));
    s.build_matrix(ChainKind::Switch, 1.0, None);
    assert!(s.check_irreducible().unwrap());
    // 2x7 mixes 7-cycles with triangle-plus-square states and stays connected
    let mut s = space(&regular(7, 2));
    s.build_matrix(ChainKind::TriSwitch, 1.0, None);
    assert!(s.check_irreducible().unwrap());
}

#[test]
fn stationary_matches_closed_form() {
    let mut s = space(&regular(6, 3));
    for lambda in [1.0, 2.0, 5.0] {
        for nu in [None, Some(1), Some(3)] {
            s.build_matrix(ChainKind::TriSwitch, lambda, nu);
            let pi = s.stationary_exact().unwrap();
            let closed = s.closed_form_stationary(lambda, nu);
            for (a, b) in pi.iter().zip(&closed) {
                assert!((a - b).abs() < 1e-10);
            }
            assert!(s.detailed_balance_error(&pi).unwrap() < 1e-12);
        }
    }
    s.build_matrix(ChainKind::TriSwitch, 1.0, None);
    for p in s.stationary_exact().unwrap() {
        assert!((p - 1.0 / 70.0).abs() < 1e-12);
    }
}

#[test]
fn stationary_by_power_iteration_on_a_large_space() {
    let mut s = space(&regular(8, 3));
    s.build_matrix(ChainKind::TriSwitch, 2.0, Some(3));
    let pi = s.stationary_exact().unwrap();
    let closed = s.closed_form_stationary(2.0, Some(3));
    let err = pi
        .iter()
        .zip(&closed)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-10, "{err}");
}

#[test]
fn spectral_report_matches_dense_eigensolver() {
    for (d, lambda) in [
        (regular(6, 3), 1.0),
        (regular(6, 3), 2.0),
        (regular(6, 3), 5.0),
        (regular(7, 4), 2.0),
    ] {
        let mut s = space(&d);
        s.build_matrix(ChainKind::TriSwitch, lambda, None);
        let r = s.spectral_report(0.01).unwrap();
        let pi = s.stationary_exact().unwrap();
        let p = s.matrix().unwrap().dense();
        let n = p.nrows();
        let sym = DMatrix::from_fn(n, n, |i, j| (pi[i] / pi[j]).sqrt() * p[(i, j)]);
        let sym = (sym.clone() + sym.transpose()) * 0.5;
        let mut eig: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
        eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!((eig[0] - 1.0).abs() < 1e-10);
        assert!(
            (r.mu1.unwrap() - eig[1]).abs() < 1e-8,
            "{d} λ={lambda}: {} vs {}",
            r.mu1.unwrap(),
            eig[1]
        );
        assert!((r.mu_min.unwrap() - eig[n - 1]).abs() < 1e-8);
        assert!(r.bound_chain_holds);
        assert!(r.smallest_eig_lhs.unwrap() <= 1.5);
        let expected = ((1.0 / r.pi_min).ln() + 100f64.ln()) / (1.0 - r.mu_star.unwrap());
        assert!((r.tau_bound - expected).abs() < 1e-9);
    }
}

#[test]
fn spectral_report_on_a_single_state() {
    let mut s = space(&regular(4, 3));
    s.build_matrix(ChainKind::TriSwitch, 2.0, None);
    let r = s.spectral_report(0.25).unwrap();
    assert_eq!(r.n_states, 1);
    assert_eq!(r.mu1, None);
    assert_eq!(r.tau_bound, 0.0);
}

#[test]
fn exact_tv_curve_is_non_increasing() {
    let mut s = space(&regular(6, 3));
    s.build_matrix(ChainKind::TriSwitch, 2.0, None);
    let pi = s.stationary_exact().unwrap();
    for start in [0, 17, 69] {
        let curve = s.exact_tv_curve(start, &pi, 60).unwrap();
        assert!(curve.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        assert!(curve[60] < curve[0]);
    }
}

#[test]
fn two_k4_destroying_moves_accept_with_lambda_to_minus_four() {
    let lambda = 10.0;
    let mut s = space(&regular(8, 3));
    let a = s.degrees().nonincident_pairs() as f64;
    s.build_matrix(ChainKind::TriSwitch, lambda, Some(8));
    let m = s.matrix().unwrap();
    let maxima: Vec<usize> = (0..s.len()).filter(|&i| s.triangles()[i] == 8).collect();
    assert_eq!(maxima.len(), 35);
    for &i in &maxima {
        let g = s.graph(i);
        let moves = all_switches(&g);
        assert_eq!(moves.len(), m.rows[i].len());
        for sw in &moves {
            assert_eq!(triangle_delta(&g, sw).unwrap(), -4);
        }
        for &(_, p) in &m.rows[i] {
            assert!((p - lambda.powi(-4) / (3.0 * a)).abs() < 1e-18);
        }
    }
}

#[test]
fn path_ensemble_constants_on_cubic_six() {
    let s = space(&regular(6, 3));
    let flat = s.path_ensemble_stats(1.0, None).unwrap();
    assert_eq!(flat.d_gap, 1.0);
    assert!((flat.r_ratio - 1.0).abs() < 1e-12);
    assert_eq!(flat.failures, 0);
    assert!(flat.ell <= 5);
    assert!(flat.b_sigma <= flat.b_bound);
    // 10 states with t=0 and 60 with t=2: Ẑ = 10 + 60·4 = 250
    let tilted = s.path_ensemble_stats(2.0, None).unwrap();
    assert!((tilted.d_gap - 250.0 / 70.0).abs() < 1e-12);
    assert!((tilted.d_gap_bound - 250.0 / 70.0).abs() < 1e-12);
    assert!((tilted.r_ratio - (4.0 * 70.0 / 250.0f64).powi(2)).abs() < 1e-12);
    assert_eq!(tilted.b_sigma, flat.b_sigma);
    // same tallies on a second run
    assert_eq!(s.path_ensemble_stats(1.0, None).unwrap(), flat);
}

#[test]
fn path_ensemble_requires_min_degree_three() {
    let s = space(&regular(6, 2));
    assert_eq!(
        s.path_ensemble_stats(1.0, None),
        Err(Error::MinDegreeTooSmall(2))
    );
}

#[test]
fn census_report() {
    let s = space(&regular(8, 3));
    let r = s.census_ratio_check(&[0, 1, 2, 4]);
    assert!((r.mu - 4.0 / 3.0).abs() < 1e-12);
    assert_eq!(r.tail[0], (0, 1.0));
    for w in r.tail.windows(2) {
        assert!(w[1].1 <= w[0].1);
    }
    for row in &r.rows {
        assert_eq!(row.n_t, s.census()[row.t]);
        assert!((row.ratio - row.n_t1 as f64 / row.n_t as f64).abs() < 1e-15);
    }
}

#[test]
fn cache_round_trip_through_a_file() {
    let s = space(&DegreeSequence::new(vec![4, 4, 3, 3, 3, 3, 2]).unwrap());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("space.bin");
    s.write_cache(std::fs::File::create(&path).unwrap())
        .unwrap();
    let back = StateSpace::read_cache(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(back.states(), s.states());
    assert_eq!(back.degrees(), s.degrees());
    let mut bytes = std::fs::read(&path).unwrap();
    bytes.truncate(bytes.len() - 3);
    assert!(StateSpace::read_cache(bytes.as_slice()).is_err());
    let summary = serde_json::to_value(s.summary()).unwrap();
    assert_eq!(summary["size"], s.len());
}
