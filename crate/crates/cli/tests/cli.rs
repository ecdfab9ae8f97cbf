use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn hodgekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hodgekit")).args(args).output().expect("run hodgekit")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn kind_of(o: &Output) -> String {
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).expect("json report");
    let rows = v["sections"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["title"] == "error")
        .expect("error section")["rows"]
        .as_array()
        .unwrap()
        .clone();
    rows.iter().find(|r| r[0] == "kind").unwrap()[1].as_str().unwrap().to_string()
}

fn command_for(file: &Path) -> Vec<&'static str> {
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(file).unwrap()).unwrap();
    match v["kind"].as_str() {
        Some("ksymplectic") => vec!["ksympl"],
        Some("bounds") => vec!["bounds"],
        Some("path") => vec!["perdom", "check-path"],
        _ => vec!["classify"],
    }
}

#[test]
fn saved_reports_still_match() {
    let dir = corpus("expected");
    let mut n = 0;
    for e in std::fs::read_dir(&dir).unwrap() {
        let expected = e.unwrap().path();
        let input = corpus(expected.file_name().unwrap().to_str().unwrap());
        let exp = expected.display().to_string();
        let inp = input.display().to_string();
        let mut args = vec!["--check", exp.as_str()];
        args.extend(command_for(&input));
        args.push(&inp);
        let o = hodgekit(&args);
        assert_eq!(o.status.code(), Some(0), "{inp}: {}", String::from_utf8_lossy(&o.stderr));
        n += 1;
    }
    assert!(n >= 9);
}

#[test]
fn check_mismatch_exits_5() {
    let exp = corpus("expected/gaussian.json").display().to_string();
    let inp = corpus("sqrt2_i_1.json").display().to_string();
    let o = hodgekit(&["--check", &exp, "classify", &inp]);
    assert_eq!(o.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&o.stderr).contains("[endomorphisms] e: expected 2, got 1"));
}

#[test]
fn malformed_files_fail_validation() {
    let cases = [
        ("bad_embedding", "NoSuchEmbedding"),
        ("bad_number", "BadField"),
        ("bad_version", "Version"),
        ("degenerate_gram", "Degenerate"),
        ("degenerate_quadric", "DegenerateQuadric"),
        ("dependent", "Dependent"),
        ("isotropic_base_point", "BasePointIsotropic"),
        ("non_monic_field", "NotMonic"),
        ("nonisotropic_path", "NotIsotropicPath"),
        ("nonsymmetric_gram", "NotSymmetric"),
        ("not_antisymmetric", "NotAntisymmetric"),
        ("not_isotropic", "IsotropyFails"),
        ("not_multiple_of_four", "NotMultipleOfFour"),
        ("odd_dimension", "OddDimension"),
        ("oversized", "TooLarge"),
        ("path_wrong_length", "Shape"),
        ("positivity_fails", "PositivityFails"),
        ("reducible_field", "Reducible"),
        ("single_form", "NotQuadricPower"),
        ("unknown_field", "Malformed"),
        ("unknown_kind", "UnknownKind"),
        ("wrong_length", "Shape"),
        ("wrong_signature", "WrongSignature"),
        ("zero_path", "ZeroPath"),
        ("zero_period", "ZeroPeriod"),
        ("zero_pfaffian", "NotGenericallySymplectic"),
    ];
    for (name, kind) in cases {
        let file = corpus(&format!("malformed/{name}.json"));
        let f = file.display().to_string();
        let mut args = vec!["--json"];
        args.extend(command_for(&file));
        args.push(&f);
        let o = hodgekit(&args);
        assert_eq!(o.status.code(), Some(3), "{name}");
        assert_eq!(kind_of(&o), kind, "{name}");
    }
}

#[test]
fn wrong_kind_is_reported() {
    let f = corpus("quaternion.json").display().to_string();
    let o = hodgekit(&["--json", "classify", &f]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(kind_of(&o), "Kind");
}

#[test]
fn usage_errors_exit_2() {
    let f = corpus("gaussian.json").display().to_string();
    assert_eq!(hodgekit(&["tha", &f, "--n", "0"]).status.code(), Some(2));
    assert_eq!(hodgekit(&["bounds"]).status.code(), Some(2));
    assert_eq!(hodgekit(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn tha_dimensions() {
    let o = hodgekit(&["tha", &corpus("gaussian.json").display().to_string(), "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("[2, 2, 2, 2]"));
    let o = hodgekit(&["tha", &corpus("sqrt2_i_1.json").display().to_string(), "--n", "2"]);
    assert!(stdout(&o).contains("[1, 3, 5]"));
}

#[test]
fn bounds_from_flags() {
    let o = hodgekit(&["--json", "bounds", "--d", "20", "--e", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("\"1024\""));
    assert!(s.contains("\"22\""));
}

#[test]
fn random_paths_and_membership() {
    let path = corpus("circle_path.json").display().to_string();
    let o = hodgekit(&["perdom", "random-paths", &path, "--count", "20", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().any(|l| l.split_whitespace().eq(["passed", "20"])));
    let k3 = corpus("sqrt2_i_1.json").display().to_string();
    let o = hodgekit(&["perdom", "membership", &k3]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn json_report_matches_saved_copy() {
    let o = hodgekit(&["--json", "ksympl", &corpus("quaternion.json").display().to_string()]);
    let text = stdout(&o);
    assert!(text.ends_with("}\n"));
    let saved = std::fs::read_to_string(corpus("expected/quaternion.json")).unwrap();
    assert_eq!(text, saved);
}
