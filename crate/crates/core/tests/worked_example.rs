mod common;

use common::WorkedExample;
use ripsnet::complex::{
    betti_exact, boundary_matrix, homologous_check, laplacian1, rank_deficiency_test, Chain,
    HomologyChecker, PowerConfig, Verdict,
};
use ripsnet::locator::{detect_hole, Detection, LocatorConfig};
use ripsnet::Error;

#[test]
fn counts_and_betti_numbers() {
    let w = WorkedExample::load();
    let x = w.complex();
    assert_eq!(
        (x.vertices().len(), x.edges().len(), x.triangles().len()),
        (8, 12, 4)
    );
    let b = betti_exact(&x);
    assert_eq!(b.b1, w.expected.betti1);
    assert_eq!(b.dim_ker_d1, w.expected.dim_ker_d1);
    assert_eq!(b.rank_d2, w.expected.rank_d2);
    assert_eq!(b.b0, 1);
}

#[test]
fn the_graph_fills_exactly_the_listed_triangles() {
    let w = WorkedExample::load();
    assert_eq!(ripsnet::complex::build_rips(&w.graph()), w.complex());
}

#[test]
fn ranks_agree_with_a_floating_point_oracle() {
    let w = WorkedExample::load();
    let x = w.complex();
    let rank = |k| {
        let d = boundary_matrix(k, &x).to_dense();
        let m = nalgebra::DMatrix::from_fn(d.len(), d[0].len(), |i, j| d[i][j] as f64);
        m.rank(1e-9)
    };
    assert_eq!(12 - rank(1), 5);
    assert_eq!(rank(2), 4);
}

#[test]
fn outer_loop_and_hole_loop_are_homologous() {
    let w = WorkedExample::load();
    let x = w.complex();
    let c1 = w.chain(&x, "c1");
    let c3 = w.chain(&x, "c3");
    assert!(c1.boundary(&x).is_zero() && c3.boundary(&x).is_zero());
    assert!(homologous_check(&c1, &c3, &x).unwrap());
    assert!(!HomologyChecker::new(&x).is_boundary(&c1).unwrap());
}

#[test]
fn fan_loop_bounds_the_four_triangles() {
    let w = WorkedExample::load();
    let x = w.complex();
    let c2 = w.chain(&x, "c2");
    assert!(homologous_check(&c2, &Chain::zero(1), &x).unwrap());
    // c2 = ∂(T4 − T3 + T2 − T1) with the figure's triangle orientations
    let t = |name: &str| {
        let [a, b, c] = &w.triangles[name];
        Chain::triangle(&x, [w.id(a), w.id(b), w.id(c)]).unwrap()
    };
    let filling = t("T4") - t("T3") + t("T2") - t("T1");
    assert_eq!(filling.boundary(&x), c2);
}

#[test]
fn outer_minus_hole_loop_is_the_fan_loop() {
    let w = WorkedExample::load();
    let x = w.complex();
    assert_eq!(w.chain(&x, "c1") - w.chain(&x, "c3"), w.chain(&x, "c2"));
}

#[test]
fn fan_loop_with_printed_sign_is_not_a_cycle() {
    let w = WorkedExample::load();
    let x = w.complex();
    let c = w.chain(&x, "c2_as_printed");
    assert_eq!(
        homologous_check(&c, &Chain::zero(1), &x),
        Err(Error::NotACycle)
    );
}

#[test]
fn laplacian_is_rank_deficient() {
    let w = WorkedExample::load();
    let l = laplacian1(&w.complex()).unwrap();
    let v = rank_deficiency_test(&l, 1e-6, &PowerConfig::default());
    assert_eq!(v.verdict, Verdict::Deficient);
    let ev = common::eigenvalues(&l);
    assert!(ev[0].abs() < 1e-9 && ev[1] > 1e-3);
}

#[test]
fn partition_detects_its_hole() {
    let w = WorkedExample::load();
    let g = w.graph();
    let all = g.nodes().collect();
    let h = detect_hole(&g, &all, &LocatorConfig::default()).unwrap();
    assert_eq!(h.detection, Detection::HasHole);
}
