use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn afc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_afc"))
        .current_dir(dir)
        .env_remove("AFC_OUT_DIR")
        .args(args)
        .output()
        .expect("run afc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Data rows of an afc CSV: header comment and column header dropped.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn gen_tanh_writes_five_files() {
    let tmp = tempfile::tempdir().unwrap();
    let o = afc(tmp.path(), &["gen", "tanh", "--in-fmt", "U1.3", "--out-fmt", "U1.6", "--out-dir", "out"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = tmp.path().join("out");
    let mut files: Vec<String> = fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    files.sort();
    assert_eq!(files, ["cost.csv", "table.csv", "tanh_7_4.pla", "tanh_7_4.v", "tanh_7_4_tb.v"]);

    let cost = fs::read_to_string(out.join("cost.csv")).unwrap();
    assert!(cost.starts_with("# afc 0.1.0 afc gen tanh --in-fmt U1.3 --out-fmt U1.6 --out-dir out seed=42\n"));
    let rows = csv_rows(&cost);
    let products: u32 = rows[0][1].parse().unwrap();
    assert!(products <= 19, "{products}");
    assert_eq!(rows.iter().map(|r| r[7].as_str()).collect::<Vec<_>>(), ["0", "1", "2"]);
    assert_eq!(csv_rows(&fs::read_to_string(out.join("table.csv")).unwrap()).len(), 16);
}

#[test]
fn gen_selu_product_count() {
    let tmp = tempfile::tempdir().unwrap();
    let o = afc(tmp.path(), &["gen", "selu", "--in-fmt", "U2.3", "--out-fmt", "U1.7"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&fs::read_to_string(tmp.path().join("cost.csv")).unwrap());
    let products: u32 = rows[0][1].parse().unwrap();
    assert!(products <= 56, "{products}");
    assert!(tmp.path().join("selu_8_5.v").exists());
}

#[test]
fn invalid_format_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = afc(tmp.path(), &["gen", "tanh", "--in-fmt", "U1.x"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--in-fmt"), "{}", stderr(&o));
    let o = afc(tmp.path(), &["gen", "softsign"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(afc(tmp.path(), &["--help"]).status.success());
}

#[test]
fn check_passes_fresh_output_and_catches_a_mutation() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert!(afc(d, &["gen", "tanh", "--hazard-free"]).status.success());
    let o = afc(d, &["check", "tanh", "--hazard-free", "tanh_7_4.pla", "tanh_7_4.v", "tanh_7_4_tb.v"]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    assert_eq!(stdout(&o).matches("PASS").count(), 3);

    // drop one output bit from the first product row
    let pla = fs::read_to_string(d.join("tanh_7_4.pla")).unwrap();
    let mut lines: Vec<String> = pla.lines().map(String::from).collect();
    let row = lines.iter().position(|l| !l.starts_with('.')).unwrap();
    let (cube, outs) = lines[row].split_once(' ').unwrap();
    let j = outs.find('1').unwrap();
    let mut outs = outs.to_string();
    outs.replace_range(j..=j, "0");
    lines[row] = format!("{cube} {outs}");
    fs::write(d.join("bad.pla"), lines.join("\n")).unwrap();
    let o = afc(d, &["check", "tanh", "bad.pla"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("first failing input code"), "{}", stdout(&o));

    let v = fs::read_to_string(d.join("tanh_7_4.v")).unwrap();
    fs::write(d.join("bad.v"), v.replacen("assign y[0] =", "assign y[0] = 1'b1 |", 1)).unwrap();
    let o = afc(d, &["check", "tanh", "bad.v"]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
}

#[test]
fn error_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let o = afc(d, &["error", "tanh", "--methods", "exact", "--n-samples", "1000"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "exact");
    assert_eq!(rows[0][3].parse::<f64>().unwrap(), 0.0);

    let o = afc(d, &["error", "tanh", "--n-samples", "20000", "--out", "t3.csv", "--curve", "c.csv", "--figure", "f.csv", "--points", "101"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&fs::read_to_string(d.join("t3.csv")).unwrap());
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0][3], rows[1][3]);
    let curve = fs::read_to_string(d.join("c.csv")).unwrap();
    assert_eq!(csv_rows(&curve).len(), 101);
    let fig = fs::read_to_string(d.join("f.csv")).unwrap();
    assert!(fig.lines().nth(1).unwrap().starts_with("x,exact,rom_y,rom_kb,taylor3,pow2_approx"));

    let o = afc(d, &["error", "selu", "--sweep-conventions", "--target", "2.22", "--n-samples", "20000"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0][5], "true");

    let o = afc(d, &["error", "tanh", "--interval", "-1,1", "--methods", "rom_y", "--n-samples", "100"]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn outputs_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        let o = Command::new(env!("CARGO_BIN_EXE_afc"))
            .current_dir(dir)
            .env("AFC_OUT_DIR", dir.join("gen"))
            .args(["gen", "selu", "--dc-policy", "unreachable"])
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for f in ["selu_8_5.pla", "selu_8_5.v", "selu_8_5_tb.v", "table.csv", "cost.csv"] {
        assert_eq!(
            fs::read(a.path().join("gen").join(f)).unwrap(),
            fs::read(b.path().join("gen").join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn config_file_sets_flags_and_command_line_wins() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(d.join("run.cfg"), "# tanh at six output bits\nout_fmt = U1.5\nname = from_config\nn-samples = 10\n").unwrap();
    let o = afc(d, &["--config", "run.cfg", "gen", "tanh"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(d.join("from_config.pla").exists());
    assert!(fs::read_to_string(d.join("from_config.pla")).unwrap().starts_with(".i 4\n.o 6\n"));

    let o = afc(d, &["gen", "tanh", "--config", "run.cfg", "--name", "from_flag"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(d.join("from_flag.pla").exists());

    fs::write(d.join("bad.cfg"), "no_such_flag = 1\n").unwrap();
    assert_eq!(afc(d, &["--config", "bad.cfg", "gen", "tanh"]).status.code(), Some(1));
}

#[test]
fn nn_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let o = afc(d, &["nn", "make-data", "--n", "600"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let train = fs::read_to_string(d.join("train.csv")).unwrap();
    assert_eq!(train.lines().nth(1).unwrap(), "f0,f1,label");
    assert_eq!(csv_rows(&train).len(), 450);

    let o = afc(d, &["nn", "train", "--train", "train.csv", "--test", "test.csv", "--epochs", "15"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("test accuracy"));
    assert!(d.join("model.json").exists());

    let o = afc(d, &["nn", "eval", "--model", "model.json", "--data", "test.csv", "--variant", "tanh_7_6"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("tanh_7_6 accuracy"));
    let o = afc(d, &["nn", "eval", "--model", "model.json", "--data", "test.csv", "--variant", "selu_8_5"]);
    assert_eq!(o.status.code(), Some(1));

    let o = afc(d, &["nn", "sweep", "--model", "model.json", "--data", "test.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(d.join("sweep.csv")).unwrap();
    let rows = afc_core::nn::read_sweep_csv(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0].variant, "float");
    assert_eq!(rows[0].delta_points, 0.0);
}

#[test]
fn missing_input_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = afc(tmp.path(), &["check", "tanh", "nope.pla"]);
    assert_eq!(o.status.code(), Some(1));
}
