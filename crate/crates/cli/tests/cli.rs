use std::process::{Command, Output};

use serde_json::Value;

fn hl7dt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hl7dt"))
        .args(args)
        .env_remove("HL7_REGISTRY")
        .env_remove("HL7_TERMINOLOGY")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = hl7dt(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fails(args: &[&str], code: i32) -> String {
    let out = hl7dt(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}");
    assert!(out.stdout.is_empty());
    String::from_utf8(out.stderr).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    serde_json::from_str(&ok(&all)).unwrap()
}

#[test]
fn documented_examples() {
    assert_eq!(ok(&["convert", "--from", "120 ml", "--to", "l"]), "0.12 l\n");
    assert_eq!(
        ok(&["compare", "--op", "equal", "1m", "100cm", "--type", "pq"]),
        "true\n"
    );
    assert_eq!(
        ok(&["compare", "--op", "identical", "1m", "100cm", "--type", "pq"]),
        "false\n"
    );
    assert_eq!(ok(&["compare", "--op", "equal", "1l", "1dm3"]), "true\n");
    let err = fails(&["convert", "--from", "10 ml", "--to", "s"], 1);
    assert!(err.contains("does not compare"), "{err}");
}

#[test]
fn truth_table_grid() {
    let out = ok(&["logic", "--op", "and", "--mode", "hl7", "--table"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 12);
    assert_eq!(
        lines[0],
        "AND\tasku\tfalse\tinv\tmsk\tna\tnask\tnav\tni\toth\ttrue\tunk"
    );
    assert_eq!(
        lines[10],
        "true\tasku\tfalse\tinv\tmsk\tna\tnask\tnav\tni\toth\ttrue\tunk"
    );
    assert!(lines.iter().all(|l| l.split('\t').count() == 12));
    let altered = ok(&["--mode", "altered", "logic", "--op", "and", "--table"]);
    let na_row = altered.lines().find(|l| l.starts_with("na\t")).unwrap();
    assert!(na_row.split('\t').skip(1).all(|c| c == "false"), "{na_row}");
}

#[test]
fn logic_operands() {
    assert_eq!(ok(&["logic", "--op", "and", "asku", "msk"]), "ni\n");
    assert_eq!(ok(&["logic", "--op", "or", "oth", "inv"]), "inv\n");
    assert_eq!(
        ok(&["logic", "--op", "and", "true", "na", "--mode", "altered"]),
        "false\n"
    );
    assert_eq!(ok(&["logic", "--op", "not", "nav"]), "nav\n");
    fails(&["logic", "--op", "and", "true"], 1);
    fails(&["logic", "--op", "and", "true", "trc"], 1);
    fails(&["logic", "--op", "nand", "true", "true"], 2);
}

#[test]
fn timestamps_and_intervals() {
    assert_eq!(ok(&["promote", "20010131"]), "[20010131000000;20010201000000[\n");
    assert_eq!(ok(&["promote", "2008"]), "[2008;2009[\n");
    assert_eq!(ok(&["demote", "[2008;2009["]), "2008\n");
    assert_eq!(ok(&["demote", "[20080101;20080115["]), "inv\n");
    assert_eq!(ok(&["parse", "--type", "ivl-pq", "--", "-8m--2m"]), "[-8 m;-2 m]\n");
    assert_eq!(
        ok(&["parse", "-t", "ivl-pq", "[100mm[Hg];120mm[Hg]]"]),
        "[100 mm[Hg];120 mm[Hg]]\n"
    );
    assert_eq!(
        ok(&["compare", "--op", "equal", "-t", "ivl-pq", "30m [20m]", "[20m; 40m]"]),
        "true\n"
    );
    assert_eq!(
        ok(&[
            "compare",
            "--op",
            "identical",
            "-t",
            "ivl-pq",
            "30m [20m]",
            "[20m; 40m]"
        ]),
        "false\n"
    );
    for outer in ["[2000;2003[", "[2000;2004["] {
        assert_eq!(
            ok(&["relate", "--op", "contains", "-t", "ivl-ts", outer, "2001..2002"]),
            "true\n"
        );
    }
    assert_eq!(ok(&["relate", "--op", "contains", "[3ml;5ml]", "4 ml"]), "true\n");
    assert_eq!(
        ok(&["relate", "--op", "contains", "-t", "ts", "[10d]", "20010101"]),
        "unk\n"
    );
    assert_eq!(
        ok(&["relate", "--op", "overlaps", "[1 m;2 m]", "]150 cm;3 m]"]),
        "true\n"
    );
    assert_eq!(ok(&["compare", "--op", "lt", "-t", "ts", "2008", "2009"]), "true\n");
    let err = fails(&["parse", "-t", "ts", "20090230"], 1);
    assert!(err.contains("invalid date"), "{err}");
}

#[test]
fn terminology() {
    let rec = json(&[
        "parse",
        "--type",
        "cv",
        "--domain",
        "ActStatus",
        "active|Ongoing treatment",
    ]);
    for (k, v) in [
        ("code", "active"),
        ("codesystem", "2.16.840.1.113883.5.14"),
        ("codesystemname", "ActStatus"),
        ("codesystemversion", "2009-08-30"),
        ("valueset", "2.16.840.1.113883.1.11.15933"),
        ("valuesetname", "ActStatus"),
        ("valuesetversion", "2009-08-30"),
        ("originaltext", "Ongoing treatment"),
    ] {
        assert_eq!(rec[k], v, "{k}");
    }
    let err = fails(&["parse", "-t", "cv", "--domain", "ActStatus", "x"], 1);
    assert_eq!(err, "error: invalid code 'x' for codeSystem ActStatus\n");
    assert_eq!(
        ok(&["parse", "-t", "cv", "EVN:2.16.840.1.113883.5.1001"]),
        "EVN:2.16.840.1.113883.5.1001\n"
    );
    assert_eq!(ok(&["implies", "--domain", "ActStatus", "active", "normal"]), "true\n");
    assert_eq!(ok(&["implies", "--domain", "ActStatus", "normal", "active"]), "false\n");
    assert_eq!(ok(&["implies", "--domain", "ActStatus", "active", "active"]), "true\n");
    fails(
        &[
            "implies",
            "active:2.16.840.1.113883.5.14",
            "EVN:2.16.840.1.113883.5.1001",
        ],
        1,
    );
    fails(&["parse", "-t", "cv", "--domain", "NoSuchDomain", "x"], 1);
}

#[test]
fn custom_terminology_from_env_and_flag() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("terms.tsv");
    std::fs::write(
        &path,
        "[codesystems]\n1.2.3\tColour\t1\n[codes]\n1.2.3\tred\tRed\t\n1.2.3\tcrimson\tCrimson\tred\n\
         [valuesets]\n1.2.4\tColours\t1\t1.2.3\t*\n[domains]\nColour\t1.2.3\t1.2.4\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(
        ok(&["--terminology", p, "implies", "--domain", "Colour", "crimson", "red"]),
        "true\n"
    );
    let out = Command::new(env!("CARGO_BIN_EXE_hl7dt"))
        .args(["implies", "--domain", "Colour", "red", "crimson"])
        .env("HL7_TERMINOLOGY", p)
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "false\n");
    fails(&["implies", "--domain", "Colour", "crimson", "red"], 1);

    let bad = dir.path().join("bad.tsv");
    std::fs::write(
        &bad,
        "[codesystems]\n1.2.3\tColour\t1\n[codes]\n1.2.3\ta\tA\tb\n1.2.3\tb\tB\ta\n",
    )
    .unwrap();
    let err = fails(
        &["--terminology", bad.to_str().unwrap(), "parse", "-t", "bl", "true"],
        1,
    );
    assert!(err.contains("cycle"), "{err}");
    let missing = dir.path().join("missing.tsv");
    fails(
        &["--registry", missing.to_str().unwrap(), "parse", "-t", "pq", "1 m"],
        1,
    );
}

#[test]
fn identifiers() {
    assert_eq!(
        ok(&["parse", "-t", "ii", "2.16.840.1.113883.5.14:active"]),
        "2.16.840.1.113883.5.14:active\n"
    );
    let v = json(&["parse", "-t", "ii", "2.16.840.1.113883.5.14:active"]);
    assert_eq!(v["root"], "2.16.840.1.113883.5.14");
    assert_eq!(v["extension"], "active");
    fails(&["parse", "-t", "in", "unk"], 1);
    fails(&["parse", "-t", "ii", "9.9:x"], 1);
    assert_eq!(ok(&["parse", "-t", "ii", "unk"]), "unk\n");
}

#[test]
fn json_round_trips_through_parse() {
    let cases: [(&str, &str); 10] = [
        ("pq", "0.5 kg/m2"),
        ("pq", "trc ml"),
        ("ts", "200910011214+0000"),
        ("ivl-ts", "2001..2002"),
        ("ivl-pq", "30 m [20 m]"),
        ("cv", "completed:2.16.840.1.113883.5.14@2009-08-30"),
        ("ii", "1b4e28ba-2fa1-11d2-883f-0016d3cca427:7"),
        ("bl", "nask"),
        ("bn", "false"),
        ("real", "-2.50"),
    ];
    for (tag, lit) in cases {
        let v = json(&["parse", "-t", tag, lit]);
        let literal = v["literal"].as_str().unwrap();
        assert_eq!(literal, lit);
        let again = json(&["parse", "-t", v["tag"].as_str().unwrap(), literal]);
        assert_eq!(again, v, "{tag} {lit}");
    }
    let pq = json(&["parse", "-t", "pq", "1 l"]);
    assert_eq!(pq["canonical"]["value"], "0.001");
    assert_eq!(pq["canonical"]["unit"], "m3");
}

#[test]
fn canonical_values() {
    assert_eq!(ok(&["canonical", "1 l"]), "0.001 m3\n");
    assert_eq!(ok(&["canonical", "100 cm"]), "1 m\n");
    assert_eq!(ok(&["canonical", "2 h"]), "7200 s\n");
    fails(&["canonical", "nav ml"], 1);
    fails(&["canonical", "1 furlong"], 1);
}

#[test]
fn usage_errors() {
    fails(&["frobnicate"], 2);
    fails(&["convert", "--from", "1 m"], 2);
    fails(&["--format", "xml", "promote", "2008"], 2);
    fails(&["bench", "--runs", "0"], 2);
    fails(&["parse", "-t", "nosuchtype", "1"], 1);
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bench.csv");
    let p = path.to_str().unwrap();
    ok(&["bench", "--n", "2000", "--seed", "7", "--runs", "2", "--out", p]);
    let first = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = first.lines().collect();
    assert!(lines[0].starts_with("# seed=7 n=2000"));
    assert_eq!(lines[1], "representation,operation,n,median_ns,index_bytes,mean_ns");
    assert_eq!(lines.len(), 14);
    assert!(lines[2].starts_with("packed,insert,2000,"));
    assert!(lines.iter().any(|l| l.starts_with("decomposed,range_scan,2000,")));

    // same seed: identical apart from timing columns
    ok(&["bench", "--n", "2000", "--seed", "7", "--runs", "2", "--out", p]);
    let second = std::fs::read_to_string(&path).unwrap();
    let strip = |s: &str| -> Vec<String> {
        s.lines()
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                if f.len() == 6 {
                    format!("{},{},{},{}", f[0], f[1], f[2], f[4])
                } else {
                    l.to_string()
                }
            })
            .collect()
    };
    assert_eq!(strip(&first), strip(&second));

    let stdout = ok(&["bench", "--n", "500", "--runs", "1", "--rep", "packed"]);
    assert_eq!(stdout.lines().count(), 2 + 6);
    let summary = json(&["bench", "--n", "500", "--runs", "1", "--rep", "decomposed"]);
    assert_eq!(summary["measurements"].as_array().unwrap().len(), 6);
}
