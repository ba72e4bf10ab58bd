use std::path::PathBuf;
use std::process::{Command as Proc, Output};

use num_complex::Complex64 as C;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use qhorn::cli::*;
use qhorn::report::Format;
use serde_json::Value;

fn config(cases: u32) -> Config {
    Config { cases, failure_persistence: None, rng_seed: RngSeed::Fixed(0xc11), ..Config::default() }
}

fn qhorn(args: &[&str]) -> Output {
    Proc::new(env!("CARGO_BIN_EXE_qhorn")).args(args).output().expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&o.stdout)))
}

/// The machine-readable error line is the last line on stderr.
fn stderr_json(o: &Output) -> Value {
    let text = String::from_utf8_lossy(&o.stderr);
    serde_json::from_str(text.lines().last().unwrap_or("")).unwrap()
}

fn in_lib(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("qhorn").chain(args.iter().copied());
    let code = main_with_args(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn eval_at_origin_is_exactly_one() {
    let o = qhorn(&["eval", "--fn", "h6", "--alpha", "0.3", "--beta", "0.2"]);
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert_eq!(v["value"]["re"], 1.0);
    assert_eq!(v["value"]["im"], 0.0);
}

#[test]
fn terminating_eval_from_the_command_line() {
    let o = qhorn(&["eval", "--fn", "h6", "--q", "0.5", "--alpha", "2", "--beta", "0", "--x", "0.3", "--y", "0.25"]);
    let v = stdout_json(&o);
    assert!((v["value"]["re"].as_f64().unwrap() - 0.5).abs() < 1e-13);
}

#[test]
fn every_subcommand_emits_json() {
    let runs: [&[&str]; 6] = [
        &["eval", "--fn", "h7", "--alpha", "0.3-0.1i", "--beta", "0.2", "--gamma", "0.4", "--x", "0.1", "--y", "0.1"],
        &["deriv", "--fn", "h6exp", "--alpha", "1", "--beta", "2", "--x", "0.1", "--y", "0.1", "--order", "2", "--var", "y"],
        &["verify", "--id", "E2.29", "--q", "0.5", "--seed", "7"],
        &["verify", "--id", "E2.11", "--order", "3"],
        &["audit", "--id", "E2.21,E2.50", "--n-points", "3"],
        &["limit", "--fn", "h6exp", "--alpha", "1", "--beta", "2", "--x", "0.1", "--y", "0.2"],
    ];
    for args in runs {
        let o = qhorn(args);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let v = stdout_json(&o);
        match args[0] {
            "eval" | "deriv" => assert!(v["value"]["re"].is_number() && v["truncated_cleanly"].is_boolean()),
            "verify" => {
                assert!(v["classification"].is_string() && v["rel_residual"].is_number());
                assert!(v["point"]["q"]["re"].is_number());
            }
            "audit" => assert_eq!(v["identities"].as_array().unwrap().len(), 2),
            "limit" => assert_eq!(v["samples"].as_array().unwrap().len(), 4),
            _ => unreachable!(),
        }
    }
}

#[test]
fn verify_is_deterministic() {
    let a = qhorn(&["verify", "--id", "E2.29", "--q", "0.5", "--seed", "7"]);
    let b = qhorn(&["verify", "--id", "E2.29", "--q", "0.5", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    let c = qhorn(&["verify", "--id", "E2.29", "--q", "0.5", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(stdout_json(&a)["classification"], "VERIFIED");
}

#[test]
fn full_audit_files_are_identical_and_complete() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a.json"), dir.path().join("b.json"), dir.path().join("c.csv"));
    for (path, format) in [(&a, "json"), (&b, "json"), (&c, "csv")] {
        let o = qhorn(&["audit", "--seed", "42", "--n-points", "4", "--format", format, "--output", path.to_str().unwrap()]);
        // some literal readings fail, which is exit status 1
        assert_eq!(o.status.code(), Some(EXIT_AUDIT_FAILED));
        assert!(o.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let report: Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert_eq!(report["identities"].as_array().unwrap().len(), 74);
    let csv = std::fs::read_to_string(&c).unwrap();
    assert_eq!(csv.lines().next(), Some(qhorn::report::CSV_HEADER));
    assert_eq!(csv.lines().count(), 75);
    let leftovers: Vec<PathBuf> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(leftovers.len(), 3, "temporary files left behind: {leftovers:?}");
}

#[test]
fn error_families_and_stderr_json() {
    let usage = qhorn(&["eval", "--fn", "h6", "--alpha", "0.3 + 1i", "--beta", "0.2"]);
    assert_eq!(usage.status.code(), Some(EXIT_USAGE));
    assert_eq!(stderr_json(&usage)["error"]["kind"], "usage");
    assert_eq!(stderr_json(&usage)["exit_code"], EXIT_USAGE);

    let q_out = qhorn(&["eval", "--fn", "h6", "--q", "1.5", "--alpha", "0.3", "--beta", "0.2"]);
    assert_eq!(q_out.status.code(), Some(EXIT_USAGE));

    let unknown = qhorn(&["verify", "--id", "E9.99"]);
    assert_eq!(unknown.status.code(), Some(EXIT_USAGE));
    assert_eq!(stderr_json(&unknown)["error"]["kind"], "unknown-identity");

    let pole = qhorn(&["eval", "--fn", "h7", "--alpha", "0.3", "--beta", "0.2", "--gamma", "2", "--y", "0.1"]);
    assert_eq!(pole.status.code(), Some(EXIT_NUMERIC));
    assert_eq!(stderr_json(&pole)["error"]["kind"], "domain");

    let quiet = qhorn(&["eval", "--fn", "h6", "--alpha", "0.3", "--beta", "1", "--x", "0.1", "--format", "text"]);
    assert_eq!(quiet.status.code(), Some(EXIT_NUMERIC));
    assert!(serde_json::from_str::<Value>(String::from_utf8_lossy(&quiet.stderr).trim()).is_err());
}

fn cval() -> impl Strategy<Value = C> {
    prop_oneof![
        (-2.0f64..2.0).prop_map(|re| C::new(re, 0.0)),
        (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(re, im)| C::new(re, im)),
        (-1e-5f64..1e-5, -1e6f64..1e6).prop_map(|(re, im)| C::new(re, im)),
    ]
}

fn qval() -> impl Strategy<Value = C> {
    (0.05f64..0.95, -3.0f64..3.0).prop_map(|(m, t)| C::from_polar(m, t))
}

fn function() -> impl Strategy<Value = Function> {
    prop_oneof![Just(Function::H6), Just(Function::H7), Just(Function::H6Exp), Just(Function::H7Exp)]
}

fn policy() -> impl Strategy<Value = PolicyArgs> {
    (1e-15f64..1e-4, proptest::option::of(1usize..500)).prop_map(|(tol, max_terms)| PolicyArgs { tol, max_terms })
}

fn point() -> impl Strategy<Value = PointArgs> {
    (function(), qval(), cval(), cval(), cval(), cval(), cval()).prop_map(|(function, q, alpha, beta, g, x, y)| {
        let gamma = matches!(function, Function::H7 | Function::H7Exp).then_some(g);
        PointArgs { function, q, alpha, beta, gamma, x, y }
    })
}

fn id() -> impl Strategy<Value = String> {
    (1u32..100).prop_map(|n| format!("E2.{n}"))
}

fn command() -> impl Strategy<Value = Command> {
    prop_oneof![
        (point(), policy()).prop_map(|(point, policy)| Command::Eval(EvalArgs { point, policy })),
        (point(), 1u32..=64, any::<bool>(), policy()).prop_map(|(point, order, y, policy)| Command::Deriv(DerivArgs {
            point,
            order,
            var: if y { Var::Y } else { Var::X },
            policy
        })),
        (id(), qval(), any::<u64>(), proptest::option::of(1u32..10), policy())
            .prop_map(|(id, q, seed, order, policy)| Command::Verify(VerifyArgs { id, q, seed, order, policy })),
        (proptest::collection::vec(id(), 0..4), qval(), any::<u64>(), 1usize..100, policy())
            .prop_map(|(ids, q, seed, n_points, policy)| Command::Audit(AuditArgs { ids, q, seed, n_points, policy })),
        (point(), proptest::collection::vec(0.01f64..0.99, 1..5), policy()).prop_map(|(p, q_seq, policy)| {
            Command::Limit(LimitArgs {
                function: p.function,
                alpha: p.alpha,
                beta: p.beta,
                gamma: p.gamma,
                x: p.x,
                y: p.y,
                q_seq,
                policy,
            })
        }),
    ]
}

fn format() -> impl Strategy<Value = Format> {
    prop_oneof![Just(Format::Json), Just(Format::Csv), Just(Format::Text)]
}

proptest! {
    #![proptest_config(config(300))]

    #[test]
    fn parse_inverts_print(command in command(), format in format(), output in proptest::option::of("[a-z]{1,8}(/[a-z0-9_.]{1,8})?")) {
        let cfg = CliConfig { format, output: output.map(PathBuf::from), command };
        prop_assert!(cfg.validate().is_ok());
        let argv: Vec<String> = std::iter::once("qhorn".to_string()).chain(cfg.to_args()).collect();
        prop_assert_eq!(parse_args(argv).unwrap(), cfg);
    }

    #[test]
    fn complex_literals_round_trip(c in cval()) {
        prop_assert_eq!(parse_complex(&format_complex(c)).unwrap(), c);
    }

    #[test]
    fn malformed_literals_are_usage_errors(junk in "[0-9a-z+ .eE-]{1,10}") {
        prop_assume!(parse_complex(&junk).is_err());
        let (code, out, err) = in_lib(&["eval", "--fn", "h6", "--alpha", &junk, "--beta", "0.2"]);
        prop_assert_eq!(code, EXIT_USAGE);
        prop_assert!(out.is_empty());
        let last: Value = serde_json::from_str(err.lines().last().unwrap()).unwrap();
        prop_assert_eq!(&last["error"]["kind"], "usage");
    }

    #[test]
    fn poles_are_numeric_errors(k in 0i32..6, q in 0.2f64..0.8, y in 0.05f64..0.3) {
        // gamma = q^-k puts a zero factor in the y-denominators
        let gamma = format_complex(C::new(q.powi(-k), 0.0));
        let (qs, ys) = (q.to_string(), y.to_string());
        let (code, _, err) = in_lib(&["eval", "--fn", "h7", "--q", &qs, "--alpha", "0.3", "--beta", "0.2", "--gamma", &gamma, "--y", &ys]);
        prop_assert_eq!(code, EXIT_NUMERIC, "{}", err);
        let last: Value = serde_json::from_str(err.lines().last().unwrap()).unwrap();
        prop_assert_eq!(&last["exit_code"], EXIT_NUMERIC);
    }

    #[test]
    fn out_of_range_q_is_a_usage_error(m in 1.0f64..10.0, t in -3.0f64..3.0) {
        let q = format_complex(C::from_polar(m, t));
        let (code, _, _) = in_lib(&["eval", "--fn", "h6", "--q", &q, "--alpha", "0.3", "--beta", "0.2"]);
        prop_assert_eq!(code, EXIT_USAGE);
    }
}
