//! One function per subcommand, each producing a [`Report`] and an exit class.

use hodgekit_core::exactmath::rational::format_rational;
use hodgekit_core::exactmath::{FieldElement, MatrixQ, QPoly, Rational, SignError};
use hodgekit_core::hodge::{
    endomorphism_field, hodge_classes_tensor_square, transcendental_lattice, validate_period_with_precision,
    EndFieldResult, HodgeError, K3Hodge, PeriodCandidate,
};
use hodgekit_core::ksympl::{
    clifford_operators, default_base_point, divisibility_bound, subvariety_bound, torus_readings,
    verify_k_symplectic, KsError,
};
use hodgekit_core::perdom::{
    check_family, essential_dim_bound, griffiths_check, orbit_dimension, per_membership, poly_form,
    random_isotropic_path, PerdomError, PeriodPath,
};
use hodgekit_core::qforms::signature;
use hodgekit_core::symalg::{build_tha, SymError, ThaError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::problem::{expect_kind, variant_name, BoundsProblem, K3PeriodProblem, Problem, ProblemError};
use crate::report::Report;

/// Exit classes, mapped to process exit codes in `main`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok,
    Validation,
    Internal,
}

impl Exit {
    pub fn code(self) -> i32 {
        match self {
            Exit::Ok => 0,
            Exit::Validation => 3,
            Exit::Internal => 4,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub precision: u32,
    pub seed: u64,
}

pub struct Outcome {
    pub report: Report,
    pub exit: Exit,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Outcome { report, exit: Exit::Ok }
    }

    fn failed(mut report: Report, exit: Exit, kind: &str, message: &str) -> Self {
        report.fail(kind, message);
        Outcome { report, exit }
    }
}

fn hodge_exit(e: &HodgeError) -> Exit {
    match e {
        HodgeError::Sign(SignError::PrecisionExhausted)
        | HodgeError::Internal(_)
        | HodgeError::NotCommutative
        | HodgeError::NotClosed(_)
        | HodgeError::MixedRoots(_)
        | HodgeError::NoPrimitive => Exit::Internal,
        _ => Exit::Validation,
    }
}

fn ks_exit(e: &KsError) -> Exit {
    match e {
        KsError::PfaffianCheckFailed | KsError::RelationsFail(_) => Exit::Internal,
        _ => Exit::Validation,
    }
}

fn problem_failure(report: Report, e: &ProblemError) -> Outcome {
    Outcome::failed(report, Exit::Validation, &e.kind(), &e.to_string())
}

pub fn fmt_vec(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(format_rational).collect();
    format!("[{}]", parts.join(", "))
}

pub fn fmt_matrix(m: &MatrixQ) -> String {
    let rows: Vec<String> = (0..m.rows()).map(|i| fmt_vec(m.row(i))).collect();
    format!("[{}]", rows.join(", "))
}

fn fmt_elems(v: &[FieldElement]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_list<T: ToString>(v: &[T]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_path(v: &[QPoly]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.display_in("t").to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn k3_problem(p: Problem) -> Result<K3PeriodProblem, ProblemError> {
    expect_kind(&p, "k3period")?;
    match p {
        Problem::K3Period(k) => Ok(k),
        _ => unreachable!(),
    }
}

/// Validates the period and computes T and E, filling the shared sections.
fn analyse(report: &mut Report, p: K3PeriodProblem, opts: Options) -> Result<(K3Hodge, EndFieldResult), Outcome> {
    let sig = signature(&p.space);
    report
        .section("input")
        .row("dim V", p.space.dim())
        .row("signature", format!("({}, {})", sig.positives, sig.negatives))
        .row("field", p.field.poly())
        .row("embedding", p.embedding)
        .row("omega", fmt_elems(&p.omega));
    let cand = PeriodCandidate {
        space: p.space,
        field: p.field,
        embedding: p.embedding,
        omega: p.omega,
    };
    let fail = |r: &Report, e: HodgeError| Outcome::failed(r.clone(), hodge_exit(&e), &variant_name(&e), &e.to_string());
    let period = validate_period_with_precision(cand, opts.precision).map_err(|e| fail(report, e))?;
    report
        .section("period")
        .row("q(omega, omega)", "0")
        .row("q(omega, conj omega)", "Positive");
    let h = transcendental_lattice(period).map_err(|e| fail(report, e))?;
    report
        .section("transcendental lattice")
        .row("dim T", h.dim_t())
        .row("dim T^perp", h.alg().rows())
        .row("basis", fmt_matrix(h.trans()));
    let ef = endomorphism_field(&h).map_err(|e| fail(report, e))?;
    report
        .section("endomorphisms")
        .row("e", ef.e)
        .row("classification", ef.classification.as_str())
        .row("primitive minpoly", &ef.primitive.minpoly)
        .row("dim E0", if ef.fixed_subalgebra.is_empty() { ef.e } else { ef.fixed_subalgebra.len() })
        .row("MT family", ef.mt.family.as_str())
        .row("n_E", ef.mt.rank);
    Ok((h, ef))
}

pub fn classify(p: Result<Problem, ProblemError>, opts: Options) -> Outcome {
    let mut report = Report::new("classify");
    let p = match p.and_then(k3_problem) {
        Ok(p) => p,
        Err(e) => return problem_failure(report, &e),
    };
    let (h, ef) = match analyse(&mut report, p, opts) {
        Ok(x) => x,
        Err(o) => return o,
    };
    report
        .section("Hodge classes")
        .row("dim in T (x) T", hodge_classes_tensor_square(&h).len());
    let orbit = orbit_dimension(&ef.mt).map_or_else(|_| format!("n/a (n_E = {} < 2)", ef.mt.rank), |d| d.to_string());
    report.section("period domain").row("MT orbit dimension", orbit);
    Outcome::ok(report)
}

pub fn tha(p: Result<Problem, ProblemError>, n: usize, opts: Options) -> Outcome {
    let mut report = Report::new("tha");
    let p = match p.and_then(k3_problem) {
        Ok(p) => p,
        Err(e) => return problem_failure(report, &e),
    };
    let (h, ef) = match analyse(&mut report, p, opts) {
        Ok(x) => x,
        Err(o) => return o,
    };
    match build_tha(&h, &ef, n) {
        Ok(t) => {
            report
                .section("algebra")
                .row("mode", t.mode.as_str())
                .row("n", t.n)
                .row("e", t.e)
                .row("n_E", t.n_e)
                .row("dims over E", fmt_list(&t.graded_dims_e))
                .row("dims over Q", fmt_list(&t.graded_dims_q));
            Outcome::ok(report)
        }
        Err(e) => {
            let exit = match e {
                ThaError::TransferFailed(_) | ThaError::Sym(SymError::PowerVanished) => Exit::Internal,
                _ => Exit::Validation,
            };
            Outcome::failed(report, exit, &variant_name(&e), &e.to_string())
        }
    }
}

pub fn ksympl(p: Result<Problem, ProblemError>) -> Outcome {
    let mut report = Report::new("ksympl");
    let p = match p.and_then(|p| {
        expect_kind(&p, "ksymplectic")?;
        match p {
            Problem::KSymplectic(k) => Ok(k),
            _ => unreachable!(),
        }
    }) {
        Ok(p) => p,
        Err(e) => return problem_failure(report, &e),
    };
    let c = &p.candidate;
    report.section("family").row("dim V", c.v_dim()).row("k", c.k());
    let fail = |r: Report, e: KsError| Outcome::failed(r, ks_exit(&e), &variant_name(&e), &e.to_string());
    let v = match verify_k_symplectic(c) {
        Ok(v) => v,
        Err(e) => return fail(report, e),
    };
    report.section("Pfaffian").row("Pf", &v.pfaffian).row("n", v.power);
    if let (Some(q), Some(s)) = (&v.quadric, &v.scalar) {
        let sig = hodgekit_core::qforms::signature_of(q);
        report
            .section("quadric")
            .row("matrix", fmt_matrix(q))
            .row("signature", format!("({}, {})", sig.positives, sig.negatives))
            .row("scalar c", format_rational(s));
    }
    if let (Some(rank), Some(w)) = (v.rank_on_quadric, &v.witness) {
        report
            .section("rank on quadric")
            .row("rank", rank)
            .row("expected", c.v_dim() / 2)
            .row("witness field", &w.field_poly)
            .row("witness point", fmt_elems(&w.coords));
    }
    if let Some(e) = v.failure.clone() {
        return fail(report, e);
    }
    let quadric = v.quadric.as_ref().expect("verified candidates have a quadric");
    let base = p.base_point.clone().unwrap_or_else(|| default_base_point(quadric));
    let cl = match clifford_operators(c, &v, &base) {
        Ok(cl) => cl,
        Err(e) => return fail(report, e),
    };
    let basis: Vec<String> = cl.basis.iter().map(|b| fmt_vec(b)).collect();
    report
        .section("Clifford module")
        .row("base point", fmt_vec(&cl.base))
        .row("generators", format!("[{}]", basis.join(", ")))
        .row("lambda", fmt_vec(&cl.lambdas))
        .row("relations", "A_i A_j + A_j A_i = 2 delta_ij lambda_i Id");
    let bound = divisibility_bound(c.k() as u64);
    let divides = (num_bigint::BigUint::from(c.v_dim()) % &bound) == num_bigint::BigUint::from(0u32);
    report
        .section("divisibility")
        .row("2^floor((k-1)/2)", &bound)
        .row("divides dim V", divides);
    Outcome::ok(report)
}

pub fn bounds(b: BoundsProblem) -> Outcome {
    let mut report = Report::new("bounds");
    let t = torus_readings(b.d, b.dim_h1.unwrap_or(0));
    report.section("torus").row("d", b.d).row("2^floor((d+1)/2)", &t.bound);
    if let Some(h1) = b.dim_h1 {
        report
            .section("torus divisibility")
            .row("dim H1", h1)
            .row("divides dim H1", t.h1_divisible)
            .row("divides dim H1 / 2", t.complex_dim_divisible);
    }
    if let Some(e) = b.e {
        report
            .section("subvariety")
            .row("e", e)
            .row("(d+2)e", subvariety_bound(b.d, e));
    }
    report
        .section("family")
        .row("max dim_E T", b.d + 2)
        .row("n_E = d + 2 admissible", check_family(b.d + 2, b.d))
        .row("essential_dim_bound(d + 2)", essential_dim_bound(b.d + 2));
    Outcome::ok(report)
}

pub fn bounds_file(p: Result<Problem, ProblemError>) -> Outcome {
    match p.and_then(|p| {
        expect_kind(&p, "bounds")?;
        match p {
            Problem::Bounds(b) => Ok(b),
            _ => unreachable!(),
        }
    }) {
        Ok(b) => bounds(b),
        Err(e) => problem_failure(Report::new("bounds"), &e),
    }
}

fn path_problem(p: Result<Problem, ProblemError>) -> Result<PeriodPath, ProblemError> {
    let p = p?;
    expect_kind(&p, "path")?;
    match p {
        Problem::Path(x) => Ok(x),
        _ => unreachable!(),
    }
}

pub fn check_path(p: Result<Problem, ProblemError>) -> Outcome {
    let mut report = Report::new("perdom check-path");
    let path = match path_problem(p) {
        Ok(x) => x,
        Err(e) => return problem_failure(report, &e),
    };
    report
        .section("path")
        .row("dim V", path.space().dim())
        .row("l(t)", fmt_path(path.coords()));
    match griffiths_check(&path) {
        Ok(true) => {
            let d = path.derivative();
            report
                .section("transversality")
                .row("q(l, l)", "0")
                .row("q(l, l')", poly_form(path.space(), path.coords(), &d).display_in("t"))
                .row("holds", true);
            Outcome::ok(report)
        }
        Ok(false) => Outcome::failed(report, Exit::Internal, "IdentityFailed", "q(l, l') is not identically zero"),
        Err(e) => Outcome::failed(report, Exit::Validation, &variant_name(&e), &e.to_string()),
    }
}

pub fn random_paths(p: Result<Problem, ProblemError>, count: usize, degree: usize, opts: Options) -> Outcome {
    let mut report = Report::new("perdom random-paths");
    let path = match path_problem(p) {
        Ok(x) => x,
        Err(e) => return problem_failure(report, &e),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut passed = 0;
    for _ in 0..count {
        let Some(rp) = random_isotropic_path(path.space(), degree, &mut rng) else {
            return Outcome::failed(
                report,
                Exit::Validation,
                "NoHyperbolicPair",
                "the form has no rational isotropic vectors to build paths from",
            );
        };
        match griffiths_check(&rp) {
            Ok(true) => passed += 1,
            Ok(false) => break,
            Err(PerdomError::NotIsotropicPath(w)) => {
                return Outcome::failed(report, Exit::Internal, "NotIsotropicPath", &format!("generated path has q(l,l) = {}", w.display_in("t")))
            }
            Err(e) => return Outcome::failed(report, Exit::Internal, &variant_name(&e), &e.to_string()),
        }
    }
    report
        .section("random isotropic paths")
        .row("seed", opts.seed)
        .row("count", count)
        .row("degree", degree)
        .row("passed", passed);
    if passed == count {
        Outcome::ok(report)
    } else {
        Outcome::failed(report, Exit::Internal, "IdentityFailed", "q(l, l') is not identically zero")
    }
}

pub fn membership(p: Result<Problem, ProblemError>, opts: Options) -> Outcome {
    let mut report = Report::new("perdom membership");
    let p = match p.and_then(k3_problem) {
        Ok(p) => p,
        Err(e) => return problem_failure(report, &e),
    };
    report
        .section("input")
        .row("dim V", p.space.dim())
        .row("field", p.field.poly())
        .row("embedding", p.embedding)
        .row("l", fmt_elems(&p.omega));
    match per_membership(&p.space, &p.field, p.embedding, &p.omega, opts.precision) {
        Ok(c) => {
            report
                .section("certificate")
                .row("q(l, l)", &c.isotropy)
                .row("q(l, conj l)", c.positivity.as_str())
                .row("member", true);
            Outcome::ok(report)
        }
        Err(e) => Outcome::failed(report, hodge_exit(&e), &variant_name(&e), &e.to_string()),
    }
}
