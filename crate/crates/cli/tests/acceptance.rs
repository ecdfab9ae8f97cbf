//! The acceptance suite. Each criterion runs in order and reports one line;
//! the test fails if any criterion does.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hodgekit_core::exactmath::linalg::{self, MatrixQ};
use hodgekit_core::exactmath::rational::rational_sqrt;
use hodgekit_core::exactmath::{rat, Field, NumberField, QPoly, Rational, Rationals};
use hodgekit_core::hodge::{
    endomorphism_field, hodge_classes_tensor_square, transcendental_lattice, validate_period, Classification, K3Hodge,
    MtDescriptor, MtFamily, PeriodCandidate,
};
use hodgekit_core::ksympl::{
    clifford_operators, default_base_point, divisibility_bound, rank_at_point, subvariety_bound, torus_bound,
    verify_k_symplectic, KSymplecticCandidate,
};
use hodgekit_core::perdom::{check_family, essential_dim_bound, griffiths_check, random_isotropic_path, PeriodPath};
use hodgekit_core::qforms::{diagonalize, signature_of, QuadraticSpace};
use hodgekit_core::symalg::{build_tha, harm_dim, monomials, sym_decompose_dims, sym_dim, Mode, SymAlgebra};

fn zero() -> Rational {
    rat(0)
}

// ---- 1. harmonic dimensions ----

/// dim ker(Λ: Sym^i → Sym^{i−2}) for the standard form, by exact rank.
fn brute_harm_dim(m: usize, i: usize) -> u64 {
    let src = monomials(m, i);
    if i < 2 {
        return src.len() as u64;
    }
    let dst = monomials(m, i - 2);
    let mut a = MatrixQ::from_fn(dst.len(), src.len(), |_, _| zero());
    for (c, mono) in src.iter().enumerate() {
        for j in 0..m {
            let k = mono.exps()[j];
            if k >= 2 {
                let mut e = mono.exps().to_vec();
                e[j] -= 2;
                let r = dst.iter().position(|d| d.exps() == e.as_slice()).unwrap();
                let v = a.get(r, c) + rat((k * (k - 1)) as i64);
                a.set(r, c, v);
            }
        }
    }
    (src.len() - linalg::rank(&Rationals, &a)) as u64
}

fn harmonic_dimensions() {
    for m in 3..=6 {
        for i in 0..=6usize {
            assert_eq!(harm_dim(m, i as i64), brute_harm_dim(m, i), "harm_dim({m}, {i})");
            let total: u64 = sym_decompose_dims(m, i).iter().sum();
            assert_eq!(total, sym_dim(m, i as i64), "decomposition of Sym^{i}, m = {m}");
        }
    }
}

// ---- 2. nondegeneracy of powers ----

fn power_nondegeneracy() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for m in 3..=5 {
        for n in 2..=3 {
            for indefinite in [false, true] {
                let gram = MatrixQ::from_fn(m, m, |i, j| {
                    if i != j {
                        zero()
                    } else if indefinite && i >= 2 {
                        rat(-1)
                    } else {
                        rat(1)
                    }
                });
                let alg = SymAlgebra::new(Rationals, gram, Mode::Harmonic, n).unwrap();
                let mut trials = 0;
                while trials < 200 {
                    let x: Vec<Rational> = (0..m).map(|_| rat(rng.gen_range(-5..=5))).collect();
                    if x.iter().all(|v| *v == zero()) {
                        continue;
                    }
                    let p = alg.power_top(&x).unwrap_or_else(|e| panic!("m={m} n={n} x={x:?}: {e}"));
                    assert!(!p.is_zero());
                    trials += 1;
                }
                if indefinite {
                    // e_1 + e_3 is isotropic for diag(1, 1, −1, …)
                    let mut x = vec![zero(); m];
                    x[0] = rat(1);
                    x[2] = rat(1);
                    let p = alg.power_top(&x).unwrap_or_else(|e| panic!("isotropic x, m={m} n={n}: {e}"));
                    assert!(!p.is_zero());
                }
            }
        }
    }
}

// ---- 3 and 4. recovery of CM and totally real examples ----

fn gaussian() -> K3Hodge {
    let k = NumberField::new(QPoly::from_ints(&[1, 0, 1])).unwrap();
    let space = QuadraticSpace::diagonal(&[rat(1), rat(1)]).unwrap();
    let omega = vec![k.one(), k.gen()];
    let p = validate_period(PeriodCandidate { space, field: k, embedding: 0, omega }).unwrap();
    transcendental_lattice(p).unwrap()
}

fn cm_recovery() {
    let h = gaussian();
    assert_eq!(h.dim_t(), 2);
    let ef = endomorphism_field(&h).unwrap();
    assert_eq!(ef.e, 2);
    assert_eq!(ef.classification, Classification::Cm);
    assert_eq!(ef.fixed_subalgebra.len(), 1, "E0 = Q");
    assert_eq!(ef.mt, MtDescriptor { family: MtFamily::Unitary, rank: 1 });
    assert_eq!(hodge_classes_tensor_square(&h).len(), 2);
    assert_eq!(build_tha(&h, &ef, 3).unwrap().graded_dims_q, vec![2, 2, 2, 2]);
}

/// (√2, i, 1) in ℚ³ with x² + y² − z², over ℚ[x]/(x⁴+1) with √2 = x − x³, i = x².
fn sqrt2_i_1(embedding: usize) -> K3Hodge {
    let k = NumberField::new(QPoly::from_ints(&[1, 0, 0, 0, 1])).unwrap();
    let space = QuadraticSpace::diagonal(&[rat(1), rat(1), rat(-1)]).unwrap();
    let x = k.gen();
    let omega = vec![&x - &x.pow(3), x.pow(2), k.one()];
    let p = validate_period(PeriodCandidate { space, field: k, embedding, omega }).unwrap();
    transcendental_lattice(p).unwrap()
}

fn tr_recovery() {
    for emb in 0..4 {
        let h = sqrt2_i_1(emb);
        assert_eq!(h.dim_t(), 3);
        let ef = endomorphism_field(&h).unwrap();
        assert_eq!(ef.e, 1);
        assert_eq!(ef.classification, Classification::TotallyReal);
        assert_eq!(ef.mt, MtDescriptor { family: MtFamily::SpecialOrthogonal, rank: 3 });
        assert_eq!(build_tha(&h, &ef, 2).unwrap().graded_dims_q, vec![1, 3, 5]);
    }
}

// ---- 5. the quaternionic 3-symplectic family ----

fn m4(rows: [[i64; 4]; 4]) -> MatrixQ {
    MatrixQ::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect(), 4)
}

fn quaternion_family() {
    let c = KSymplecticCandidate::new(vec![
        m4([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]),
        m4([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]]),
        m4([[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]),
    ])
    .unwrap();
    let r = verify_k_symplectic(&c).unwrap();
    assert!(r.ok, "{:?}", r.failure);
    let quadric = r.quadric.clone().unwrap();
    // a diagonal of rational squares gives a congruence to the identity
    let (_, d) = diagonalize(&quadric);
    assert!(d.iter().all(|x| rational_sqrt(x).is_some()), "quadric {quadric:?} diagonalizes to {d:?}");
    assert_eq!(signature_of(&quadric).positives, 3);
    let w = r.witness.clone().unwrap();
    assert_eq!(w.field_poly, QPoly::from_ints(&[1, 0, 1]));
    assert_eq!(r.rank_on_quadric, Some(2));
    assert_eq!(rank_at_point(&c, &w), 2);

    let cl = clifford_operators(&c, &r, &default_base_point(&quadric)).unwrap();
    assert_eq!(cl.operators.len(), 2);
    let f = Rationals;
    let id = linalg::identity(&f, 4);
    let minus_id = linalg::mat_scale(&f, &rat(-1), &id);
    for a in &cl.operators {
        assert_eq!(linalg::mat_mul(&f, a, a), minus_id);
    }
    let (a, b) = (&cl.operators[0], &cl.operators[1]);
    let ac = linalg::mat_add(&f, &linalg::mat_mul(&f, a, b), &linalg::mat_mul(&f, b, a));
    assert!(linalg::is_zero_matrix(&f, &ac));

    assert_eq!(divisibility_bound(3), BigUint::from(2u32));
    assert_eq!(BigUint::from(c.v_dim()) % divisibility_bound(3), BigUint::from(0u32));
}

// ---- 6. numerics ----

fn numerics() {
    assert_eq!(torus_bound(20), BigUint::from(1024u32));
    assert_eq!(divisibility_bound(22), BigUint::from(1024u32));
    assert_eq!(essential_dim_bound(22), 20);
    assert!(check_family(22, 20));
    assert!(!check_family(23, 20));
    assert_eq!(subvariety_bound(20, 1), BigUint::from(22u32));
}

// ---- 7. Griffiths transversality ----

fn griffiths() {
    let lorentz = QuadraticSpace::diagonal(&[rat(1), rat(1), rat(-1)]).unwrap();
    let circle = PeriodPath::new(
        lorentz.clone(),
        vec![QPoly::from_ints(&[1, 0, -1]), QPoly::from_ints(&[0, 2]), QPoly::from_ints(&[1, 0, 1])],
    )
    .unwrap();
    assert!(griffiths_check(&circle).unwrap());

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let spaces = [
        lorentz,
        QuadraticSpace::diagonal(&[rat(1), rat(1), rat(-1), rat(-1)]).unwrap(),
        QuadraticSpace::diagonal(&[rat(1), rat(1), rat(1), rat(-1), rat(-1)]).unwrap(),
    ];
    for i in 0..50 {
        let p = random_isotropic_path(&spaces[i % spaces.len()], 1 + i % 3, &mut rng).unwrap();
        assert!(p.coords().iter().any(|c| c.degree().unwrap_or(0) > 0), "path {i} is constant");
        assert!(griffiths_check(&p).unwrap(), "path {i}");
    }
}

// ---- 8. determinism of the command line ----

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn invocations() -> Vec<Vec<String>> {
    let mut files: Vec<PathBuf> = Vec::new();
    for dir in [corpus(), corpus().join("malformed")] {
        let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        v.sort();
        files.extend(v);
    }
    assert!(files.len() > 10, "corpus not found");
    let mut out = Vec::new();
    for f in files {
        let f = f.display().to_string();
        let subcommands: &[&[&str]] = &[
            &["classify"],
            &["tha", "--n", "3"],
            &["ksympl"],
            &["bounds"],
            &["perdom", "check-path"],
            &["perdom", "random-paths", "--count", "10"],
            &["perdom", "membership"],
        ];
        for sub in subcommands {
            let mut args: Vec<String> = vec!["--json".into()];
            args.extend(sub.iter().map(|s| s.to_string()));
            args.push(f.clone());
            out.push(args);
        }
    }
    out.push(vec!["--json".into(), "bounds".into(), "--d".into(), "20".into(), "--e".into(), "1".into()]);
    out
}

fn run_cli(args: &[String], threads: &str) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_hodgekit"))
        .args(args)
        .env("RAYON_NUM_THREADS", threads)
        .output()
        .expect("run hodgekit");
    (out.status.code(), out.stdout)
}

fn determinism() {
    for args in invocations() {
        let a = run_cli(&args, "1");
        let b = run_cli(&args, "1");
        let c = run_cli(&args, "4");
        assert!(!a.1.is_empty(), "no output for {args:?}");
        assert_eq!(a, b, "two runs differ for {args:?}");
        assert_eq!(a, c, "thread counts differ for {args:?}");
    }
}

// ---- driver ----

struct Criterion {
    name: &'static str,
    limit: Option<Duration>,
    run: fn(),
}

#[test]
fn acceptance() {
    let criteria = [
        Criterion { name: "harmonic dimensions match brute force", limit: Some(Duration::from_secs(30)), run: harmonic_dimensions },
        Criterion { name: "x^n is nonzero for x != 0", limit: Some(Duration::from_secs(60)), run: power_nondegeneracy },
        Criterion { name: "CM recovery for Q(i)", limit: None, run: cm_recovery },
        Criterion { name: "totally real recovery for (sqrt2, i, 1)", limit: None, run: tr_recovery },
        Criterion { name: "quaternionic 3-symplectic family", limit: Some(Duration::from_secs(10)), run: quaternion_family },
        Criterion { name: "bounds: 1024, 1024, 22 <-> 20, 22", limit: None, run: numerics },
        Criterion { name: "Griffiths identity on circle and 50 random paths", limit: None, run: griffiths },
        Criterion { name: "byte-identical CLI output across runs and thread counts", limit: None, run: determinism },
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr();
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run));
        let took = start.elapsed();
        let verdict = match (&result, c.limit) {
            (Err(_), _) => "FAIL",
            (Ok(()), Some(l)) if took > l => "FAIL (too slow)",
            _ => "PASS",
        };
        if verdict != "PASS" {
            failed.push(i + 1);
        }
        // written straight to stderr so the lines survive output capture
        writeln!(err, "acceptance {}: {verdict} {} ({:.2?})", i + 1, c.name, took).unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
