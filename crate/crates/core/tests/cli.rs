use std::process::{Command, Output};

use relbox::cli::table::Report;

fn relbox(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relbox"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = relbox(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn summary(text: &str, key: &str) -> f64 {
    let prefix = format!("# {key}=");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no {key} in output"))
        .parse()
        .unwrap()
}

#[test]
fn one_dimensional_table_has_36_rows() {
    let (_, rows) = csv_rows(&stdout(&["spectrum", "--dim", "1", "--levels", "4"]));
    assert_eq!(rows.len(), 36);
}

#[test]
fn csv_and_json_carry_the_same_values() {
    let args = ["spectrum", "--dim", "3", "--lc", "1,300", "--levels", "3", "--model", "dirac"];
    let (header, rows) = csv_rows(&stdout(&args));
    let json_args: Vec<&str> = args.iter().copied().chain(["--format", "json"]).collect();
    let doc: serde_json::Value = serde_json::from_str(&stdout(&json_args)).unwrap();
    let report = Report::from_json(&doc).unwrap();
    assert_eq!(report.table.columns, header);
    assert_eq!(report.table.rows.len(), rows.len());
    let k = header.iter().position(|h| h == "kinetic").unwrap();
    for (csv_row, json_row) in rows.iter().zip(&doc["rows"].as_array().unwrap()[..]) {
        let from_csv: f64 = csv_row[k].parse().unwrap();
        assert_eq!(from_csv, json_row["kinetic"].as_f64().unwrap());
    }
}

#[test]
fn field_walls_vanish_and_normalization_holds() {
    let text = stdout(&["field", "--dim", "1", "--lc", "2", "--n", "3"]);
    assert!((summary(&text, "normalization") - 1.0).abs() < 1e-8);
    let (header, rows) = csv_rows(&text);
    assert_eq!(rows.len(), 201);
    let fields = header.iter().position(|h| h == "re_phi").unwrap();
    for row in [&rows[0], &rows[200]] {
        for cell in &row[fields..] {
            assert_eq!(cell.parse::<f64>().unwrap(), 0.0, "{row:?}");
        }
    }
}

#[test]
fn conjugated_field_has_negative_charge() {
    let text = stdout(&["field", "--dim", "3", "--lc", "1", "--n", "1,1,2", "--conjugate"]);
    assert!((summary(&text, "normalization") + 1.0).abs() < 1e-6);
    assert!(summary(&text, "energy") < -1.0);
}

#[test]
fn count_below_ground_state_is_zero() {
    let (header, rows) = csv_rows(&stdout(&["count", "--dim", "3", "--lc", "1", "--tmax", "0.01,50"]));
    let c = header.iter().position(|h| h == "count").unwrap();
    let counts: Vec<u64> = rows.iter().map(|r| r[c].parse().unwrap()).collect();
    assert_eq!(counts[0], 0);
    assert!(counts[counts.len() - 1] > 0);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spec.json");
    let out = relbox(&["spectrum", "--levels", "2", "--format", "json", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert!(Report::from_json(&doc).is_some());
}

#[test]
fn electron_preset_adds_box_length() {
    let text = stdout(&["spectrum", "--lc", "300", "--levels", "1", "--model", "kg", "--preset", "electron"]);
    let (header, rows) = csv_rows(&text);
    let i = header.iter().position(|h| h == "box_length_angstrom").unwrap();
    assert!((rows[0][i].parse::<f64>().unwrap() - 1.158).abs() < 1e-12);
    assert!(header.iter().any(|h| h == "kinetic[m_e c^2]"));
}

#[test]
fn exit_codes() {
    assert_eq!(relbox(&["spectrum", "--lc", "0"]).status.code(), Some(2));
    assert_eq!(relbox(&["spectrum", "--dim", "2"]).status.code(), Some(2));
    assert_eq!(relbox(&["bogus"]).status.code(), Some(2));
    assert_eq!(relbox(&["spectrum", "--lc", "1", "--tmax", "1e9"]).status.code(), Some(4));
    assert_eq!(relbox(&["--help"]).status.code(), Some(0));
}
