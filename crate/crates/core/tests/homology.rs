use std::collections::VecDeque;

use proptest::prelude::*;

use neckflow::homology::{
    betti_numbers, core_circle, fixture_zoo, CubicalComplex, SliceCycle, SpacetimeComplement, VoxelBox, VoxelRegion,
};
use neckflow::harness::fixture_zoo_check;

fn mask_strategy(dims: Vec<usize>) -> impl Strategy<Value = (Vec<usize>, Vec<bool>)> {
    let len = dims.iter().product::<usize>();
    (Just(dims), prop::collection::vec(prop::bool::weighted(0.7), len))
}

// face-adjacent components of a mask, first axis fastest
fn components(dims: &[usize], mask: &[bool]) -> usize {
    let mut strides = vec![1usize; dims.len()];
    for a in 1..dims.len() {
        strides[a] = strides[a - 1] * dims[a - 1];
    }
    let coord = |v: usize, a: usize| v / strides[a] % dims[a];
    let mut seen = vec![false; mask.len()];
    let mut count = 0;
    for s in 0..mask.len() {
        if !mask[s] || seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for a in 0..dims.len() {
                let mut next = Vec::new();
                if coord(v, a) > 0 {
                    next.push(v - strides[a]);
                }
                if coord(v, a) + 1 < dims[a] {
                    next.push(v + strides[a]);
                }
                for w in next {
                    if mask[w] && !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
    }
    count
}

fn bbox() -> VoxelBox {
    VoxelBox { half_width: 1.0, z_min: -1.0, z_max: 1.0 }
}

fn solid_torus(n: usize) -> VoxelRegion {
    VoxelRegion::from_fn(n, bbox(), |p| (p[0].hypot(p[1]) - 0.55).hypot(p[2]) < 0.3).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn boundary_of_boundary_vanishes_3d((dims, mask) in prop::collection::vec(2usize..5, 3).prop_flat_map(mask_strategy)) {
        let cx = CubicalComplex::new(&dims, &mask);
        for k in 2..=cx.dimension() {
            for idx in 0..cx.count(k) as u32 {
                prop_assert!(cx.boundary_of_chain(k - 1, &cx.boundary(k, idx)).is_empty());
            }
        }
    }

    #[test]
    fn boundary_of_boundary_vanishes_4d((dims, mask) in prop::collection::vec(2usize..4, 4).prop_flat_map(mask_strategy)) {
        let cx = CubicalComplex::new(&dims, &mask);
        for k in 2..=cx.dimension() {
            for idx in 0..cx.count(k) as u32 {
                prop_assert!(cx.boundary_of_chain(k - 1, &cx.boundary(k, idx)).is_empty());
            }
        }
    }

    #[test]
    fn planar_b1_is_components_minus_euler((dims, mask) in prop::collection::vec(2usize..9, 2).prop_flat_map(mask_strategy)) {
        let cx = CubicalComplex::new(&dims, &mask);
        let b = betti_numbers(&cx);
        let b0 = components(&dims, &mask) as i64;
        prop_assert_eq!(b[0] as i64, b0);
        prop_assert_eq!(b[1] as i64, b0 - cx.euler_characteristic());
        prop_assert_eq!(b[2], 0);
    }

    #[test]
    fn spatial_b0_is_component_count((dims, mask) in prop::collection::vec(2usize..6, 3).prop_flat_map(mask_strategy)) {
        let cx = CubicalComplex::new(&dims, &mask);
        let b = betti_numbers(&cx);
        prop_assert_eq!(b[0], components(&dims, &mask));
        let chi: i64 = b.iter().enumerate().map(|(k, &x)| if k % 2 == 0 { x as i64 } else { -(x as i64) }).sum();
        prop_assert_eq!(chi, cx.euler_characteristic());
    }
}

#[test]
fn static_descent_is_time_symmetric() {
    let n = 12;
    let w = solid_torus(n);
    let gamma = core_circle(&w, 0.55, 0.0).unwrap();
    let slices = vec![w.clone(); 4];
    let fwd = SpacetimeComplement::new(slices.clone()).unwrap();
    let back = SpacetimeComplement::new(slices.into_iter().rev().collect()).unwrap();
    let empty = SliceCycle::default();
    let a = fwd.verify_descent(&gamma, 0, &gamma, 3).unwrap();
    let b = back.verify_descent(&gamma, 3, &gamma, 0).unwrap();
    assert!(a.descends() && b.descends());
    assert!(!fwd.verify_descent(&gamma, 0, &empty, 3).unwrap().descends());
    assert!(!back.verify_descent(&gamma, 3, &empty, 0).unwrap().descends());
    for k in 0..4 {
        assert_eq!(fwd.slice_mask(k), w.mask);
    }
}

#[test]
fn one_square_perturbation_keeps_the_verdict() {
    let n = 12;
    let w = solid_torus(n);
    let gamma = core_circle(&w, 0.55, 0.0).unwrap();
    let cx = w.complex();
    // boundary of a square that shares an edge with gamma
    let on_gamma = |v: usize, axis: u8| gamma.edges.contains(&(v, axis));
    let square = (0..cx.count(2) as u32)
        .find(|&i| {
            cx.boundary(2, i).iter().any(|&e| {
                let (v, m) = cx.decode(cx.cells(1)[e as usize]);
                on_gamma(v, m.trailing_zeros() as u8)
            })
        })
        .expect("a square next to the core circle");
    let edges: Vec<(usize, u8)> = cx
        .boundary(2, square)
        .iter()
        .map(|&e| {
            let (v, m) = cx.decode(cx.cells(1)[e as usize]);
            (v, m.trailing_zeros() as u8)
        })
        .collect();
    let moved = gamma.sum(&SliceCycle::new(edges));
    assert_ne!(moved, gamma);

    let st = SpacetimeComplement::new(vec![w.clone(), w.clone(), w]).unwrap();
    assert!(st.verify_descent(&gamma, 0, &moved, 2).unwrap().descends());
    assert_eq!(
        st.verify_descent(&gamma, 0, &gamma, 2).unwrap().descends(),
        st.verify_descent(&moved, 0, &gamma, 2).unwrap().descends()
    );
    assert_eq!(
        st.verify_descent(&gamma, 0, &SliceCycle::default(), 2).unwrap().descends(),
        st.verify_descent(&moved, 0, &SliceCycle::default(), 2).unwrap().descends()
    );
}

#[test]
fn zoo_betti_numbers() {
    let dir = std::env::temp_dir().join(format!("neckflow-zoo-{}", std::process::id()));
    let rows = fixture_zoo_check(24, &dir).unwrap();
    assert_eq!(rows.len(), fixture_zoo(24).unwrap().len());
    for r in &rows {
        assert!(r.passed(), "{r:?}");
    }
    let find = |name: &str| rows.iter().find(|r| r.name == name).unwrap();
    assert_eq!(find("ball").betti, vec![1, 0, 0, 0]);
    assert_eq!(find("solid_torus").betti, vec![1, 1, 0, 0]);
    assert_eq!(find("torus_shell").betti, vec![1, 2, 1, 0]);
    assert_eq!(find("stacked_tori").betti[0], 2);
    std::fs::remove_dir_all(&dir).ok();
}
