use hodgekit_core::exactmath::linalg::{self, MatrixQ};
use hodgekit_core::exactmath::{rat, Field, NumberField, QPoly, Rationals};
use hodgekit_core::hodge::{
    endomorphism_field, hodge_classes_tensor_square, transcendental_lattice, validate_period, Classification, K3Hodge,
    MtDescriptor, MtFamily, PeriodCandidate,
};
use hodgekit_core::ksympl::{clifford_operators, rank_at_point, verify_k_symplectic, KSymplecticCandidate, QuadricPoint};
use hodgekit_core::qforms::QuadraticSpace;
use hodgekit_core::symalg::{build_tha, ThaError, ThaMode};

fn gaussian() -> K3Hodge {
    let k = NumberField::new(QPoly::from_ints(&[1, 0, 1])).unwrap();
    let space = QuadraticSpace::diagonal(&[rat(1), rat(1)]).unwrap();
    let omega = vec![k.one(), k.gen()];
    let p = validate_period(PeriodCandidate { space, field: k, embedding: 0, omega }).unwrap();
    transcendental_lattice(p).unwrap()
}

/// (√2, i, 1) over ℚ[x]/(x⁴+1), where √2 = x − x³ and i = x².
fn sqrt2_i_1(embedding: usize) -> K3Hodge {
    let k = NumberField::new(QPoly::from_ints(&[1, 0, 0, 0, 1])).unwrap();
    let space = QuadraticSpace::diagonal(&[rat(1), rat(1), rat(-1)]).unwrap();
    let x = k.gen();
    let omega = vec![&x - &x.pow(3), x.pow(2), k.one()];
    let p = validate_period(PeriodCandidate { space, field: k, embedding, omega }).unwrap();
    transcendental_lattice(p).unwrap()
}

#[test]
fn gaussian_pipeline() {
    let h = gaussian();
    let ef = endomorphism_field(&h).unwrap();
    assert_eq!((h.dim_t(), ef.e, ef.classification), (2, 2, Classification::Cm));
    assert_eq!(ef.mt, MtDescriptor { family: MtFamily::Unitary, rank: 1 });
    assert_eq!(hodge_classes_tensor_square(&h).len(), 2);
    let t = build_tha(&h, &ef, 3).unwrap();
    assert_eq!(t.mode, ThaMode::FullE);
    assert_eq!(t.graded_dims_q, vec![2, 2, 2, 2]);
}

#[test]
fn sqrt2_pipeline_at_every_embedding() {
    for emb in 0..4 {
        let h = sqrt2_i_1(emb);
        assert_eq!(h.dim_t(), 3);
        let ef = endomorphism_field(&h).unwrap();
        assert_eq!(ef.e, 1);
        assert_eq!(ef.classification, Classification::TotallyReal);
        assert_eq!(ef.mt, MtDescriptor { family: MtFamily::SpecialOrthogonal, rank: 3 });
        assert_eq!(hodge_classes_tensor_square(&h).len(), 1);
        let t = build_tha(&h, &ef, 2).unwrap();
        assert_eq!(t.mode, ThaMode::HarmonicE);
        assert_eq!(t.graded_dims_q, vec![1, 3, 5]);
    }
}

#[test]
fn tha_rejects_n_zero() {
    let h = gaussian();
    let ef = endomorphism_field(&h).unwrap();
    assert!(matches!(build_tha(&h, &ef, 0), Err(ThaError::NTooSmall)));
}

fn m4(rows: [[i64; 4]; 4]) -> MatrixQ {
    MatrixQ::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect(), 4)
}

fn quaternion() -> Vec<MatrixQ> {
    vec![
        m4([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]),
        m4([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]]),
        m4([[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]),
    ]
}

fn doubled(a: &MatrixQ) -> MatrixQ {
    MatrixQ::from_fn(8, 8, |i, j| if i / 4 == j / 4 { a.get(i % 4, j % 4).clone() } else { rat(0) })
}

#[test]
fn quaternion_rank_at_one_i_zero() {
    let c = KSymplecticCandidate::new(quaternion()).unwrap();
    let k = NumberField::new(QPoly::from_ints(&[1, 0, 1])).unwrap();
    let pt = QuadricPoint { field_poly: k.poly().clone(), coords: vec![k.one(), k.gen(), k.zero()] };
    assert_eq!(rank_at_point(&c, &pt), 2);
}

#[test]
fn doubled_quaternion() {
    let c = KSymplecticCandidate::new(quaternion().iter().map(doubled).collect()).unwrap();
    let r = verify_k_symplectic(&c).unwrap();
    assert!(r.ok, "{:?}", r.failure);
    assert_eq!(r.power, 2);
    assert_eq!(r.rank_on_quadric, Some(4));
    let cl = clifford_operators(&c, &r, &[rat(1), rat(0), rat(0)]).unwrap();
    assert_eq!(cl.operators.len(), 2);
    assert_eq!(cl.operators[0].rows(), 8);
    let id = linalg::identity(&Rationals, 8);
    for (a, l) in cl.operators.iter().zip(&cl.lambdas) {
        assert_eq!(linalg::mat_mul(&Rationals, a, a), linalg::mat_scale(&Rationals, l, &id));
    }
}
