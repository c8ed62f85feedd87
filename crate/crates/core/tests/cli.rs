mod common;

use std::fs;

use common::corpus_path;
use nperm::cli::run;

fn nperm(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["nperm"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn alg(name: &str) -> String {
    corpus_path(name).to_string_lossy().into_owned()
}

#[test]
fn mindegree_of_group2() {
    let (code, out, _) = nperm(&["terms", "mindegree", &alg("group2")]);
    assert_eq!(code, 0);
    assert!(out.starts_with("min degree: 2\nalgebra: group2\nkind: ternary\nn: 2\nw1 = "), "{}", out);
}

#[test]
fn find_on_lattice_prints_none() {
    let (code, out, _) = nperm(&["terms", "find", "--n", "2", &alg("lattice2")]);
    assert_eq!((code, out.as_str()), (1, "none\n"));
}

#[test]
fn malformed_file_names_symbol_and_length() {
    let (code, out, err) = nperm(&["alg", "validate", &alg("malformed")]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("malformed.alg:8:"), "{}", err);
    assert!(err.contains("`+`") && err.contains("expected 4"), "{}", err);
}

#[test]
fn validate_accepts_corpus() {
    let (code, out, _) = nperm(&["alg", "validate", &alg("imp2sq")]);
    assert_eq!(code, 0);
    assert_eq!(out, "ok: imp2sq (size 4, 1 operations)\n");
}

#[test]
fn missing_file_and_bad_flags_are_input_errors() {
    assert_eq!(nperm(&["alg", "validate", "/nonexistent/x.alg"]).0, 2);
    assert_eq!(nperm(&["terms", "find", &alg("group2")]).0, 2);
    assert_eq!(nperm(&["terms", "find", "--n", "2", "--bogus", &alg("group2")]).0, 2);
    assert_eq!(nperm(&["frobnicate"]).0, 2);
    assert_eq!(nperm(&["terms", "find", "--n", "1", &alg("group2")]).0, 2);
    assert_eq!(nperm(&["--help"]).0, 0);
}

#[test]
fn budget_exhaustion_is_an_input_error() {
    let (code, _, err) = nperm(&["terms", "mindegree", "--max-closure", "3", &alg("z4")]);
    assert_eq!(code, 2);
    assert!(err.contains("budget"), "{}", err);
}

#[test]
fn found_witness_verifies_verbatim() {
    let dir = tempfile::tempdir().unwrap();
    for (name, n) in [("group2", "2"), ("imp2", "3"), ("imp2sq", "4"), ("z3", "2")] {
        for format in ["text", "toml"] {
            let (code, out, _) = nperm(&["terms", "find", "--n", n, "--format", format, &alg(name)]);
            assert_eq!(code, 0, "{}", name);
            let w = dir.path().join(format!("{}-{}.w", name, format));
            fs::write(&w, &out).unwrap();
            let (code, out, err) = nperm(&["terms", "verify", "--n", n, "--witness", w.to_str().unwrap(), &alg(name)]);
            assert_eq!(code, 0, "{} {}: {}{}", name, format, out, err);
            assert!(out.ends_with("verdict: pass\n"));
        }
    }
}

#[test]
fn convert_round_trip_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let (_, out, _) = nperm(&["terms", "find", "--n", "3", &alg("imp2")]);
    let ternary = dir.path().join("t.w");
    fs::write(&ternary, &out).unwrap();

    let (code, nary, _) = nperm(&["terms", "convert", "--to", "nary", "--witness", ternary.to_str().unwrap(), &alg("imp2")]);
    assert_eq!(code, 0);
    assert_eq!(
        nary,
        "algebra: imp2\nkind: nary\nn: 3\nv0 = x0\nv1 = ->(->(x2, x1), x0)\nv2 = ->(->(x1, x2), x3)\nv3 = x3\n"
    );
    let nary_path = dir.path().join("n.w");
    fs::write(&nary_path, &nary).unwrap();
    let (code, out, _) = nperm(&["terms", "verify", "--n", "3", "--witness", nary_path.to_str().unwrap(), &alg("imp2")]);
    assert_eq!(code, 0, "{}", out);

    let (code, back, _) = nperm(&["terms", "convert", "--to", "ternary", "--witness", nary_path.to_str().unwrap(), &alg("imp2")]);
    assert_eq!(code, 0);
    assert_eq!(back, fs::read_to_string(&ternary).unwrap());
    let back_path = dir.path().join("b.w");
    fs::write(&back_path, &back).unwrap();
    assert_eq!(nperm(&["terms", "verify", "--n", "3", "--witness", back_path.to_str().unwrap(), &alg("imp2")]).0, 0);
}

#[test]
fn verify_reports_failures_and_mismatches() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.w");
    fs::write(&bad, "algebra: group2\nkind: ternary\nn: 2\nw1 = x\n").unwrap();
    let (code, out, _) = nperm(&["terms", "verify", "--n", "2", "--witness", bad.to_str().unwrap(), &alg("group2")]);
    assert_eq!(code, 1);
    assert!(out.contains("pass  w1(x,y,y) = x"), "{}", out);
    assert!(out.contains("FAIL  w1(x,x,y) = y  at x=0, y=1"), "{}", out);
    assert!(out.ends_with("verdict: FAIL\n"));

    // wrong algebra name
    let (code, _, err) = nperm(&["terms", "verify", "--n", "2", "--witness", bad.to_str().unwrap(), &alg("z3")]);
    assert_eq!(code, 2);
    assert!(err.contains("group2"), "{}", err);
    // wrong n
    assert_eq!(nperm(&["terms", "verify", "--n", "3", "--witness", bad.to_str().unwrap(), &alg("group2")]).0, 2);
    // converting an invalid witness fails its re-verification
    assert_eq!(nperm(&["terms", "convert", "--to", "nary", "--witness", bad.to_str().unwrap(), &alg("group2")]).0, 2);
}

#[test]
fn congruence_listing_and_degrees() {
    let (code, out, _) = nperm(&["cong", "list", &alg("z4")]);
    assert_eq!(code, 0);
    assert!(out.starts_with("congruences: 3\nc0 = {0}{1}{2}{3}\nc1 = {0,2}{1,3}\nc2 = {0,1,2,3}\n"), "{}", out);
    assert!(out.contains("cg(1,3) = c1\n"));
    let (code, out, _) = nperm(&["cong", "degree", "--left", "c1", "--right", "cg(0,1)", &alg("z4")]);
    assert_eq!((code, out.as_str()), (0, "degree: 2\n"));
    let (code, out, _) = nperm(&["cong", "degree", "--left", "c1", "--right", "c1", &alg("z4")]);
    assert_eq!((code, out.as_str()), (0, "degree: 1\n"));
    let (code, out, _) = nperm(&["cong", "degree", "--left", "c0", "--right", "c2", "--max", "1", &alg("z4")]);
    assert_eq!((code, out.as_str()), (1, "degree: none up to 1\n"));
    assert_eq!(nperm(&["cong", "degree", "--left", "c9", "--right", "c0", &alg("z4")]).0, 2);
    assert_eq!(nperm(&["cong", "degree", "--left", "cg(0,)", "--right", "c0", &alg("z4")]).0, 2);
}

#[test]
fn relation_commands() {
    let l = alg("lattice2");
    let (code, out, _) = nperm(&["rel", "compose", "--r", "0,1", "--s", "1,0", &l]);
    assert_eq!((code, out.as_str()), (0, "0,0\n"));
    let (_, out, _) = nperm(&["rel", "alt", "--r", "0,1", "--s", "1,0", "--n", "3", &l]);
    assert_eq!(out, "0,1\n");
    let (_, out, _) = nperm(&["rel", "power", "--r", "0,1;1,0", "--n", "2", &l]);
    assert_eq!(out, "0,0;1,1\n");
    let (_, out, _) = nperm(&["rel", "closure", "--pairs", "1,0", &alg("imp2sq")]);
    assert_eq!(out, "0,0;0,1;1,0;1,1;2,2;2,3;3,2;3,3\n");
    let (code, out, _) = nperm(&["rel", "check", "--r", "0,0;0,1;1,1", "--n", "2", &l]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "reflexive: yes\nsymmetric: no\ntransitive: yes\ncompatible: yes\n(R,R^op)_1 transitive: yes\n"
    );
    assert_eq!(nperm(&["rel", "leq", "--r", "0,0", "--s", "0,0;1,1", &l]).0, 0);
    assert_eq!(nperm(&["rel", "leq", "--r", "0,1", "--s", "0,0;1,1", &l]).0, 1);
    // relation literal errors
    assert_eq!(nperm(&["rel", "compose", "--r", "0,5", "--s", "0,0", &l]).0, 2);
    assert_eq!(nperm(&["rel", "compose", "--r", "0;1", "--s", "0,0", &l]).0, 2);
    // the characterization needs a compatible relation
    assert_eq!(nperm(&["rel", "check", "--r", "0,1", "--n", "2", &l]).0, 2);
}

#[test]
fn cross_checks() {
    let (code, out, _) = nperm(&["xcheck", "hm3", "--n", "2", &alg("lattice2")]);
    assert_eq!(code, 1);
    assert!(out.contains("constructive check inapplicable"));
    assert!(out.contains("R = 0,0;0,1;1,1  R^op <= R^1: FAIL (1,0)"), "{}", out);

    let (code, out, _) = nperm(&["xcheck", "hm3", "--n", "3", &alg("imp2sq")]);
    assert_eq!(code, 0, "{}", out);
    assert!(out.ends_with("verdict: holds\n"));

    let a = nperm(&["xcheck", "hm3", "--n", "2", "--samples", "5", &alg("z4")]);
    let b = nperm(&["xcheck", "hm3", "--n", "2", "--samples", "5", &alg("z4")]);
    assert_eq!(a, b);
    assert_eq!(a.0, 0);

    assert_eq!(nperm(&["xcheck", "rts", &alg("group2")]).0, 0);
    let (code, out, _) = nperm(&["xcheck", "rts", &alg("lattice2")]);
    assert_eq!(code, 1);
    assert!(out.contains("0,0;0,1;1,1  ASYMMETRIC"));

    let (code, out, _) = nperm(&["xcheck", "lemma43", "--n", "2", &alg("z2xz2")]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 5 * 5 + 1);
    assert_eq!(nperm(&["xcheck", "lemma43", "--n", "1", &alg("z2xz2")]).0, 2);
}
