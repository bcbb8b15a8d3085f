use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};

use twistcore::BigRational;
use twistlab::cli::run;
use twistlab::density::DensityReport;
use twistlab::golden::golden_json;
use twistlab::json::{
    family_from_str, family_to_string, q_parse, q_str, CertificateJson, FamilyJson,
};

fn twistlab(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv: Vec<&str> = std::iter::once("twistlab")
        .chain(args.iter().copied())
        .collect();
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn scratch(name: &str) -> PathBuf {
    static N: AtomicUsize = AtomicUsize::new(0);
    let dir = std::env::temp_dir().join(format!("twistlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(format!("{}-{name}", N.fetch_add(1, Ordering::Relaxed)))
}

fn write(name: &str, body: &str) -> PathBuf {
    let p = scratch(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn build_emits_degree_12_family_that_round_trips() {
    let (code, out, _) = twistlab(&["catalog", "build", "--id", "thm4_5"]);
    assert_eq!(code, 0);
    let j: FamilyJson = serde_json::from_str(&out).unwrap();
    assert_eq!(j.g.len(), 13);
    assert_eq!(j.claimed_rank, 3);
    let fam = family_from_str(&out).unwrap();
    assert_eq!(family_to_string(&fam), out);
    assert_eq!(out, golden_json("thm4_5").unwrap());
}

#[test]
fn build_with_params_and_out_file() {
    let path = scratch("cor3_2.json");
    let p = path.to_str().unwrap();
    let (code, _, _) = twistlab(&[
        "catalog", "build", "--id", "cor3_2", "--params", "a=3,b=-5", "--out", p,
    ]);
    assert_eq!(code, 0);
    let fam = family_from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(fam.g.deg(), 6);
    let (code, out, _) = twistlab(&["crosscheck", "--family", p]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn certify_golden_passes_and_leaves_input_untouched() {
    let body = golden_json("thm4_1").unwrap();
    let path = write("thm4_1.json", body);
    let (code, out, _) = twistlab(&["certify", "--family", path.to_str().unwrap(), "--json"]);
    assert_eq!(code, 0);
    let c: CertificateJson = serde_json::from_str(&out).unwrap();
    assert_eq!(c.certified_lower, 3);
    assert_eq!(c.genus_upper, 5);
    assert!(c.checks.iter().any(|k| k.sieve.is_some()));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), body);
}

#[test]
fn certify_corrupted_point_names_check() {
    let mut j: FamilyJson = serde_json::from_str(golden_json("thm4_5").unwrap()).unwrap();
    let mut v = serde_json::to_value(&j.points[1]).unwrap();
    let num = &mut v["y"]["num"][0];
    let bumped = q_parse(num.as_str().unwrap()).unwrap() + BigRational::from_integer(1.into());
    *num = serde_json::Value::String(q_str(&bumped));
    j.points[1] = serde_json::from_value(v).unwrap();
    let path = write("bad.json", &serde_json::to_string(&j).unwrap());
    let (code, _, err) = twistlab(&["certify", "--family", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("on-curve[P2]"), "{err}");
}

#[test]
fn certify_overclaimed_rank_exits_one() {
    let mut j: FamilyJson = serde_json::from_str(golden_json("cor3_2").unwrap()).unwrap();
    j.claimed_rank = 3;
    let path = write("over.json", &serde_json::to_string(&j).unwrap());
    let (code, out, _) = twistlab(&["certify", "--family", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL"));
}

#[test]
fn missing_and_malformed_files_are_usage_errors() {
    assert_eq!(
        twistlab(&["certify", "--family", "/nonexistent/f.json"]).0,
        2
    );
    let path = write("junk.json", "{\"schema\": 3}");
    assert_eq!(
        twistlab(&["certify", "--family", path.to_str().unwrap()]).0,
        2
    );
}

#[test]
fn specialize_reports_squarefree_d() {
    let path = write("t45.json", golden_json("thm4_5").unwrap());
    let (code, out, _) = twistlab(&[
        "specialize",
        "--family",
        path.to_str().unwrap(),
        "--u0",
        "2",
        "--json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["d"], "-29274");
    let (code, _, err) = twistlab(&[
        "specialize",
        "--family",
        path.to_str().unwrap(),
        "--u0",
        "0",
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("pole or zero"));
}

#[test]
fn density_end_to_end_and_thread_independent() {
    let path = write("t45.json", golden_json("thm4_5").unwrap());
    let p = path.to_str().unwrap();
    let base = [
        "density", "--family", p, "--grid", "50", "--x-max", "1000000", "--json",
    ];
    let (code, out, _) = twistlab(&base);
    assert_eq!(code, 0);
    let r: DensityReport = serde_json::from_str(&out).unwrap();
    assert_eq!(r.grid, 50);
    assert!(r.counts.iter().all(|&c| c > 0));
    assert!(r.counts.windows(2).all(|w| w[0] <= w[1]));
    let mut one: Vec<&str> = base.to_vec();
    one.extend(["--threads", "1"]);
    let mut four: Vec<&str> = base.to_vec();
    four.extend(["--threads", "4"]);
    assert_eq!(twistlab(&one).1, out);
    assert_eq!(twistlab(&four).1, out);
}

#[test]
fn density_certify_counts_bounded() {
    let path = write("t45.json", golden_json("thm4_5").unwrap());
    let (code, out, _) = twistlab(&[
        "density",
        "--family",
        path.to_str().unwrap(),
        "--grid",
        "12",
        "--certify",
        "--json",
    ]);
    assert_eq!(code, 0);
    let r: DensityReport = serde_json::from_str(&out).unwrap();
    let cc = r.certified_counts.unwrap();
    assert!(cc.iter().zip(&r.counts).all(|(c, n)| c <= n));
    assert_eq!(r.witnesses.len() as u64, *cc.last().unwrap());
}

#[test]
fn density_rejects_bad_grid() {
    let path = write("t45.json", golden_json("thm4_5").unwrap());
    assert_eq!(
        twistlab(&["density", "--family", path.to_str().unwrap(), "--grid", "0"]).0,
        2
    );
}

#[test]
fn forge_rank2_then_certify() {
    let path = scratch("f2.json");
    let p = path.to_str().unwrap();
    let (code, _, err) = twistlab(&[
        "forge-rank2",
        "--curve",
        "-3,2,0",
        "--h",
        "-4,4,-3,4",
        "--out",
        p,
    ]);
    assert_eq!(code, 0, "{err}");
    let (code, out, _) = twistlab(&["certify", "--family", p]);
    assert_eq!(code, 0);
    assert!(out.contains("rank >= 2"));
}

#[test]
fn forge_rank3_reproduces_octic_family_class() {
    let path = scratch("f3.json");
    let p = path.to_str().unwrap();
    let args = [
        "forge-rank3",
        "--curve",
        "0,-1,0",
        "--h1",
        "-1,1,3,1",
        "--h2",
        "1,1,-3,1",
        "--point",
        "1/3,2,0",
    ];
    let mut with_out = args.to_vec();
    with_out.extend(["--out", p]);
    let (code, _, err) = twistlab(&with_out);
    assert_eq!(code, 0, "{err}");
    let fam = family_from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let g: Vec<String> = fam.g.coeffs().iter().map(|c| c.to_string()).collect();
    assert_eq!(
        g,
        ["-6", "0", "0", "0", "198", "0", "0", "0", "198", "0", "0", "0", "-6"]
    );
    let (code, out, _) = twistlab(&["certify", "--family", p]);
    assert_eq!(code, 0);
    assert!(out.contains("rank >= 3"));
    assert_eq!(twistlab(&["crosscheck", "--family", p]).0, 2);
}

#[test]
fn forge_rank3_off_conic_point_exits_one() {
    let args = [
        "forge-rank3",
        "--curve",
        "0,-1,0",
        "--h1",
        "-1,1,3,1",
        "--h2",
        "1,1,-3,1",
        "--point",
        "1/3,2,1",
    ];
    let (code, _, err) = twistlab(&args);
    assert_eq!(code, 1);
    assert!(err.contains("point is not on"));
}

#[test]
fn crosscheck_by_id_includes_golden_line() {
    let (code, out, _) = twistlab(&["crosscheck", "--id", "thm4_3", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], true);
    assert!(v["lines"]
        .as_array()
        .unwrap()
        .iter()
        .any(|l| l["name"] == "golden"));
    assert_eq!(twistlab(&["crosscheck"]).0, 2);
}

#[test]
fn crosscheck_tampered_g_fails_named() {
    let mut j: FamilyJson = serde_json::from_str(golden_json("cor3_3").unwrap()).unwrap();
    let c: i64 = j.g[0].parse().unwrap();
    j.g[0] = (c + 1).to_string();
    let path = write("cc.json", &serde_json::to_string(&j).unwrap());
    let (code, out, _) = twistlab(&["crosscheck", "--family", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL"));
}
