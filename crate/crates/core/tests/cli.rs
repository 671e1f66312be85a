use std::path::Path;
use std::process::Command;

use adk_core::cli::{parse_instance, serialize, Instance};
use adk_core::conjecture::{gen_instance, GenConfig, GraphKind};
use adk_core::setfn::Order;
use adk_core::transforms::gt_to_triggering;
use proptest::prelude::*;

const TWO_NODE: &str = "model gt\nn 2\nnodes u v\nedge u v\ntable v\n  {} 0\n  {u} 1/2\n";

const OR_GATE: &str = "\
model gt
n 3
nodes a b v
edge a v
edge b v
table v
  {} 0
  {a} 1
  {b} 1
  {a,b} 1
";

const NONSUB: &str = "\
model gt
n 3
nodes a b v
edge a v
edge b v
table v
  {} 0
  {a} 1/4
  {b} 1/4
  {a,b} 1
";

const CHAIN: &str = "\
model gt
n 3
nodes x y z
edge x y
edge y z
edge x z
table y
  {} 0
  {x} 1/2
table z
  {} 0
  {x} 1/3
  {y} 1/3
  {x,y} 1/2
";

struct Run {
    stdout: String,
    code: i32,
}

fn adk(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_adk"))
        .current_dir(dir)
        .env("ADK_THREADS", "2")
        .args(args)
        .output()
        .unwrap();
    Run {
        stdout: String::from_utf8(out.stdout).unwrap(),
        code: out.status.code().unwrap(),
    }
}

fn workspace() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [
        ("two.adk", TWO_NODE),
        ("or.adk", OR_GATE),
        ("nonsub.adk", NONSUB),
        ("chain.adk", CHAIN),
    ] {
        std::fs::write(dir.path().join(name), text).unwrap();
    }
    dir
}

fn has_line(out: &str, line: &str) -> bool {
    out.lines().any(|l| l == line)
}

#[test]
fn exact_spread_of_single_edge() {
    let dir = workspace();
    let r = adk(dir.path(), &["spread", "two.adk", "--seeds", "u", "--exact"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(r
        .stdout
        .starts_with("command=adk spread two.adk --seeds u --exact\ninput-sha256="));
    assert!(has_line(&r.stdout, "sigma=3/2"));
    assert!(has_line(&r.stdout, "node=v probability=1/2"));
    assert!(r.stdout.ends_with("status=ok exit=0\n"));
}

#[test]
fn monte_carlo_spread_is_reproducible() {
    let dir = workspace();
    let args = [
        "spread",
        "chain.adk",
        "--seeds",
        "x",
        "--mc",
        "--trials",
        "20000",
        "--seed",
        "7",
    ];
    let a = adk(dir.path(), &args);
    assert_eq!(a.code, 0, "{}", a.stdout);
    assert_eq!(a.stdout, adk(dir.path(), &args).stdout);
    let mean: f64 = a
        .stdout
        .lines()
        .find_map(|l| l.strip_prefix("mean="))
        .and_then(|l| l.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    // sigma({x}) = 1 + 1/2 + (1/2·1/2 + 1/2·1/3) = 23/12
    assert!((mean - 23.0 / 12.0).abs() < 0.03, "{mean}");
    let exact = adk(dir.path(), &["spread", "chain.adk", "--seeds", "x", "--exact"]);
    assert!(has_line(&exact.stdout, "sigma=23/12"), "{}", exact.stdout);
}

#[test]
fn or_gate_converts_to_full_neighbourhood() {
    let dir = workspace();
    let r = adk(dir.path(), &["convert", "or.adk", "--to", "triggering"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let body: String = r
        .stdout
        .lines()
        .skip_while(|l| *l != "begin-instance")
        .skip(1)
        .take_while(|l| *l != "end-instance")
        .map(|l| format!("{l}\n"))
        .collect();
    let Instance::Triggering(tr) = parse_instance(&body).unwrap() else {
        panic!("expected a triggering instance");
    };
    assert_eq!(tr.support(2), vec![(0b011, adk_core::rational::ratio(1, 1))]);
}

#[test]
fn convert_round_trips_through_files() {
    let dir = workspace();
    let out = dir.path().join("chain.tr");
    let r = adk(
        dir.path(),
        &[
            "convert",
            "chain.adk",
            "--to",
            "triggering",
            "--output",
            "chain.tr",
        ],
    );
    assert_eq!(r.code, 0, "{}", r.stdout);
    let back = adk(dir.path(), &["convert", out.to_str().unwrap(), "--to", "gt"]);
    assert_eq!(back.code, 0, "{}", back.stdout);
    let original = parse_instance(CHAIN).unwrap();
    assert!(back.stdout.contains(&serialize(&original)), "{}", back.stdout);
}

#[test]
fn nonsubmodular_threshold_fails_order_two() {
    let dir = workspace();
    let r = adk(
        dir.path(),
        &["check-adk", "nonsub.adk", "--node", "v", "--k", "2"],
    );
    assert_eq!(r.code, 1, "{}", r.stdout);
    let line = r.stdout.lines().find(|l| l.starts_with("node=v")).unwrap();
    assert!(line.contains("holds=false"));
    assert!(line.contains("witness-s={} witness-a={a,b}"));
    assert!(r.stdout.ends_with("status=violation exit=1\n"));
    let ok = adk(dir.path(), &["check-adk", "nonsub.adk", "--all", "--k", "1"]);
    assert_eq!(ok.code, 0, "{}", ok.stdout);
    let conv = adk(dir.path(), &["convert", "nonsub.adk", "--to", "triggering"]);
    assert_eq!(conv.code, 1);
    assert!(has_line(
        &conv.stdout,
        "not-ad-infinity node=v subset={a,b} coefficient=-1/2"
    ));
}

#[test]
fn global_check_reports_every_target() {
    let dir = workspace();
    let r = adk(dir.path(), &["global-adk", "chain.adk", "--k", "1"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    for t in ["sigma", "node:x", "node:y", "node:z"] {
        assert!(
            r.stdout.contains(&format!("target={t} k=1 holds=true")),
            "{}",
            r.stdout
        );
    }
}

#[test]
fn transforms_verify_their_image() {
    let dir = workspace();
    let layered = adk(
        dir.path(),
        &["transform", "chain.adk", "--layerize", "--output", "layered.adk"],
    );
    assert_eq!(layered.code, 0, "{}", layered.stdout);
    assert!(layered
        .stdout
        .contains("spread-mismatches=0 layering-valid=true image-thresholds-failing-adk=0"));
    let lifted = adk(
        dir.path(),
        &["transform", "layered.adk", "--lift", "--output", "lifted.adk"],
    );
    assert_eq!(lifted.code, 0, "{}", lifted.stdout);
    assert!(lifted
        .stdout
        .contains("spread-mismatches=0 layering-valid=true image-thresholds-failing-adk=0"));
    let reread = adk(dir.path(), &["check-adk", "lifted.adk", "--all", "--k", "inf"]);
    assert_eq!(reread.code, 0, "{}", reread.stdout);
    let skip = adk(dir.path(), &["transform", "chain.adk", "--lift"]);
    assert_eq!(skip.code, 2);
    assert!(
        skip.stdout.contains("edge x -> z joins layer 3 to layer 1"),
        "{}",
        skip.stdout
    );
}

#[test]
fn exit_codes_distinguish_errors_and_budgets() {
    let dir = workspace();
    let missing = adk(dir.path(), &["spread", "absent.adk", "--seeds", "u", "--exact"]);
    assert_eq!(missing.code, 2);
    assert!(missing.stdout.ends_with("status=error exit=2\n"));
    std::fs::write(dir.path().join("bad.adk"), "model gt\nn 2\nnodes u v\nedge u w\n").unwrap();
    let bad = adk(dir.path(), &["spread", "bad.adk", "--seeds", "u", "--exact"]);
    assert_eq!(bad.code, 2);
    assert!(
        bad.stdout.contains("error kind=parse message=\"line 4, column"),
        "{}",
        bad.stdout
    );
    let budget = adk(
        dir.path(),
        &["--budget", "1", "spread", "nonsub.adk", "--seeds", "a", "--exact"],
    );
    assert_eq!(budget.code, 3, "{}", budget.stdout);
    assert!(budget.stdout.contains("error kind=budget"));
    assert_eq!(adk(dir.path(), &["spread", "two.adk"]).code, 2);
}

#[test]
fn search_reports_are_replayable() {
    let dir = workspace();
    let args = [
        "search",
        "--graph",
        "general",
        "--n",
        "5",
        "--k",
        "3",
        "--instances",
        "6",
        "--seed",
        "4",
    ];
    let a = adk(dir.path(), &args);
    assert!(a.code == 0 || a.code == 1, "{}", a.stdout);
    assert!(a.stdout.contains("mode=search"));
    assert!(a.stdout.contains("summary checked=6"));
    assert_eq!(a.stdout, adk(dir.path(), &args).stdout);
}

#[test]
fn verify_paper_runs_a_single_criterion() {
    let dir = workspace();
    let r = adk(dir.path(), &["verify-paper", "--quick", "--criterion", "1"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(r
        .stdout
        .contains("criterion=1 name=difference-calculus status=pass"));
}

fn generated() -> impl Strategy<Value = Instance> {
    (1usize..=5, any::<u64>(), any::<bool>()).prop_map(|(n, seed, triggering)| {
        let gt = gen_instance(&GenConfig::new(GraphKind::General, n, Order::Infinity, seed), 0)
            .unwrap()
            .0;
        if triggering {
            Instance::Triggering(gt_to_triggering(&gt).unwrap())
        } else {
            Instance::Gt(gt)
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialization_round_trips(inst in generated()) {
        let text = serialize(&inst);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(serialize(&back), text);
    }
}
