use std::process::{Command, Output};

fn wordlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wordlab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn fiber_prints_count() {
    let o = wordlab(&["fiber", "--word", "[x1,x2]", "--carrier", "A:1", "--ring", "fp:3", "--target", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "105\n");
}

#[test]
fn fiber_group_targets() {
    let a = wordlab(&["fiber", "--word", "x1^2", "--carrier", "sl:2", "--ring", "fp:5", "--target", "-I"]);
    assert_eq!(stdout(&a), "30\n");
    let b = wordlab(&["fiber", "--word", "x1^2", "--carrier", "sl:2", "--ring", "fp:5", "--target", "1,0,0,1"]);
    assert_eq!(stdout(&b), "2\n");
    let c = wordlab(&["fiber", "--word", "x1^2", "--carrier", "sl:2", "--ring", "fp:5", "--target", "1,1,1,1"]);
    assert_eq!(c.status.code(), Some(1));
}

#[test]
fn symbol_of_commutator() {
    let o = wordlab(&["symbol", "--word", "x1 x2 x1^-1 x2^-1"]);
    assert_eq!(stdout(&o), "degree=2 symbol=[X1,X2]\n");
}

#[test]
fn verify_commutator_reports_exact_match() {
    let o = wordlab(&["verify-commutator", "--carrier", "A:1", "--ring", "fp:5"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("EXACT MATCH at p=5"), "{s}");
    assert!(s.contains("749/78125"), "{s}");
}

#[test]
fn exit_codes() {
    let budget = wordlab(&["fiber", "--word", "[x1,x2]", "--carrier", "A:2", "--ring", "fp:5", "--budget", "1000"]);
    assert_eq!(budget.status.code(), Some(2));
    for bad in [
        vec!["fiber", "--word", "[x1,x2", "--carrier", "A:1", "--ring", "fp:3"],
        vec!["fiber", "--word", "[x1,x2]", "--carrier", "A:1", "--ring", "fp:4"],
        vec!["fiber", "--word", "[x1,x2]", "--carrier", "Q:1", "--ring", "fp:3"],
        vec!["scan-flat", "--word", "[x1,x2]", "--carrier", "A:1", "--grid", "p="],
        vec!["no-such-command"],
        vec!["fiber", "--carrier", "A:1", "--ring", "fp:3"],
    ] {
        assert_eq!(wordlab(&bad).status.code(), Some(1), "{bad:?}");
    }
    assert_eq!(wordlab(&["--help"]).status.code(), Some(0));
}

#[test]
fn outputs_embed_config() {
    let o = wordlab(&["measure", "--word", "[x1,x2]", "--carrier", "A:1", "--ring", "fp:3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["subcommand"], "measure");
    assert_eq!(v["config"]["ring"], "fp:3");
    assert_eq!(v["config"]["kind"], "lie");
    assert_eq!(v["result"]["order"], 27);
    let c = wordlab(&["scan-flat", "--word", "[x1,x2]", "--carrier", "A:1", "--grid", "p=3,5", "--format", "csv"]);
    let s = stdout(&c);
    let mut lines = s.lines();
    let cfg: serde_json::Value = serde_json::from_str(lines.next().unwrap().strip_prefix("# config ").unwrap()).unwrap();
    assert_eq!(cfg["grid"]["p"], serde_json::json!([3, 5]));
    assert_eq!(lines.next().unwrap(), "p,k,q,statistic,numerator,denominator,float");
    assert!(s.contains("3,1,3,max_ratio,35,9,"));
}

#[test]
fn out_file_takes_format_from_extension() {
    let dir = std::env::temp_dir().join(format!("wordlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cover.csv");
    let o = wordlab(&["cover", "--carrier", "sl:2", "--grid", "p=3,5", "--steps", "13", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = std::fs::read_to_string(&path).unwrap();
    assert!(s.starts_with("# config "));
    assert!(s.contains("p,steps,reached,order\n3,13,24,24\n5,13,120,120\n"), "{s}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn identical_argv_gives_identical_bytes() {
    let args = [
        "measure",
        "--word",
        "x1 x2 x1^-1 x2^-1",
        "--carrier",
        "sl:2",
        "--ring",
        "fp:3",
        "--samples",
        "5000",
        "--seed",
        "9",
        "--format",
        "json",
    ];
    let a = wordlab(&args);
    assert_eq!(a.stdout, wordlab(&args).stdout);
    let mut more = args.to_vec();
    more.extend(["--workers", "3"]);
    let b = wordlab(&more);
    let strip = |o: &Output| {
        let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v["config"]["workers"] = 0.into();
        v
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn mixing_times_on_sl2_f5() {
    let o = wordlab(&["mix", "--word", "x1 x2 x1^-1 x2^-1", "--carrier", "sl:2", "--ring", "fp:5"]);
    assert!(stdout(&o).starts_with("t_1 = 2\nt_2 = 2\nt_inf = 3\n"));
    let bad = wordlab(&["mix", "--word", "[x1,x2]", "--carrier", "A:1", "--ring", "fp:5"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn convolution_of_disjoint_words_matches_concatenation() {
    let base = ["--carrier", "sl:2", "--ring", "fp:3", "--format", "json"];
    let run = |extra: &[&str]| {
        let mut a: Vec<&str> = extra.to_vec();
        a.extend(base);
        let v: serde_json::Value = serde_json::from_slice(&wordlab(&a).stdout).unwrap();
        v["result"].clone()
    };
    let conv = run(&["convolve", "--word", "x1^2", "--word2", "x1^3"]);
    let concat = run(&["measure", "--word", "x1^2 x2^3"]);
    assert_eq!(conv, concat);
}

#[test]
fn ideal_workflows() {
    let h = stdout(&wordlab(&["hx", "--ideal", "x1^2", "--grid", "p=3;k=1..3"]));
    assert!(h.starts_with("p=3 k=1 h = 1\np=3 k=2 h = 3\np=3 k=3 h = 3\n"), "{h}");
    let sl = stdout(&wordlab(&["hx", "--ideal", "sl:2", "--moduli", "3,5"]));
    assert!(sl.contains("p=3 k=1 h = 8/9") && sl.contains("p=5 k=1 h = 24/25"), "{sl}");
    let j = stdout(&wordlab(&["jets", "--ideal", "x1*x2", "--grid", "p=2,3", "--m-max", "2"]));
    assert!(j.ends_with("all counts agree\n"), "{j}");
    let l = stdout(&wordlab(&["lct", "--ideal", "x1^3", "--grid", "p=3", "--m-max", "2"]));
    assert!(l.ends_with("lct estimate 1/3\n"), "{l}");
}

#[test]
fn dph_and_fourier() {
    let d = wordlab(&["dph", "--word", "[x1,x2]", "--carrier", "A:1", "--power", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&d.stdout).unwrap();
    assert!(v["result"]["graph"].is_object());
    assert!(v["result"]["induced"].is_object());
    let f = stdout(&wordlab(&["fourier", "--word", "[x1,x2]", "--carrier", "A:1", "--ring", "fp:3"]));
    // the transform at 0 is the total mass
    assert!(f.starts_with("(0,0,0) 1\n"), "{f}");
    let bad = wordlab(&["fourier", "--word", "[x1,x2]", "--carrier", "C:2", "--ring", "fp:2"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn dph_reports_cancellation_mod_p() {
    let s = stdout(&wordlab(&["dph", "--word", "[x1,x2]", "--carrier", "A:1", "--grid", "p=2,3"]));
    assert!(s.contains("p=2: 2 edges vanish mod p, types without edges: "), "{s}");
    assert!(s.contains("p=3: 0 edges vanish mod p\n"), "{s}");
}

#[test]
fn excluded_primes_leave_the_grid() {
    let o = wordlab(&["cover", "--carrier", "sl:2", "--grid", "p=2,3,5", "--exclude-primes", "2,5", "--steps", "13", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["grid"]["p"], serde_json::json!([3]));
    assert_eq!(v["config"]["exclude_primes"], serde_json::json!([2, 5]));
    assert_eq!(v["result"]["rows"].as_array().unwrap().len(), 1);
    let all = wordlab(&["cover", "--carrier", "sl:2", "--grid", "p=3", "--exclude-primes", "3"]);
    assert_eq!(all.status.code(), Some(1));
}
