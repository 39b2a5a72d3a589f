use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use markushkit::cxsmiles::{canonical_cxsmiles, parse_cxsmiles};
use markushkit::datagen::{record_stats, DatasetStats};
use markushkit::metrics::EvalReport;
use markushkit::records::{read_jsonl, DatasetRecord, OcrCell};

const WORKED: &str = "[H]C1=C([*])C([*])=C([*])C=C1N(C)C(=O)C1=CC=CC(=C1)S(=O)(=O)NC1CCCC1.CCO.*[*].*[*] \
|$;;;X;;X;;G1;;;;;;;;;;;;;;;;;;;;;;;;;;G2;;G4$,m:29:24.25.26.27.28,m:32:14.19.15.18.17.16,m:34:24.25.26.27.28,Sg:n:28:w:ht,Sg:n:30: :ht|";

fn cli() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_markushkit"));
    cmd.env_remove("MARKUSHKIT_SEED");
    cmd
}

fn with_stdin(mut cmd: Command, input: &str) -> Output {
    let mut child = cmd
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn config_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/synthetic.toml")
}

fn load(path: &Path) -> Vec<DatasetRecord> {
    read_jsonl(fs::read(path).unwrap().as_slice()).unwrap()
}

fn record(id: &str, cxsmiles: &str, optimized: &str, table: &[(&str, &[&str])]) -> DatasetRecord {
    DatasetRecord {
        id: id.into(),
        cxsmiles: cxsmiles.into(),
        optimized: optimized.into(),
        description: String::new(),
        table: table
            .iter()
            .map(|(l, s)| (*l, s.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
            .collect(),
        ocr_cells: vec![OcrCell::new("R1", 0, 0, 10, 10)],
        image_path: None,
    }
}

fn write_records(path: &Path, records: &[DatasetRecord]) {
    let mut buf = Vec::new();
    markushkit::records::write_jsonl(&mut buf, records).unwrap();
    fs::write(path, buf).unwrap();
}

fn generate(dir: &Path, n: usize, seed: Option<&str>) -> Output {
    let mut cmd = cli();
    cmd.args(["generate", "--config"])
        .arg(config_path())
        .args(["--n", &n.to_string(), "--out"])
        .arg(dir);
    if let Some(s) = seed {
        cmd.env("MARKUSHKIT_SEED", s);
    }
    cmd.output().unwrap()
}

#[test]
fn parse_worked_example_canonical() {
    let mut cmd = cli();
    cmd.args(["parse", "--canonical"]);
    let out = with_stdin(cmd, &format!("{WORKED}\n"));
    assert!(out.status.success());
    let expected = canonical_cxsmiles(&parse_cxsmiles(WORKED).unwrap());
    assert_eq!(stdout(&out), format!("OK\t{expected}\n"));
}

#[test]
fn parse_reports_errors_per_line() {
    let mut cmd = cli();
    cmd.arg("parse");
    let out = with_stdin(cmd, "CCO\nC1CC\n\nc1ccccc1\n");
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "OK");
    assert!(lines[1].starts_with("ERROR\tline 2: UnbalancedRing"), "{}", lines[1]);
    assert_eq!(lines[2], "OK");
}

#[test]
fn parse_validate_flags_valence() {
    let mut cmd = cli();
    cmd.args(["parse", "--validate"]);
    let out = with_stdin(cmd, "C(C)(C)(C)(C)C\n");
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("ERROR\tline 1: Valence"));
}

#[test]
fn convert_round_trip_reaches_fixpoint() {
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("in.jsonl");
    write_records(
        &src,
        &[
            record("a", "C* |$;R1$|", "", &[("R1", &["Me", "Et"])]),
            record("b", "c1ccccc1", "stale", &[]),
        ],
    );
    let opt = tmp.path().join("opt.jsonl");
    let back = tmp.path().join("back.jsonl");
    let again = tmp.path().join("again.jsonl");
    let run = |to: &str, i: &Path, o: &Path| {
        cli().args(["convert", "--to", to, "--in"]).arg(i).arg("--out").arg(o).output().unwrap()
    };
    assert!(run("optimized", &src, &opt).status.success());
    let converted = load(&opt);
    assert_eq!(converted[0].optimized, "C<i>0</i>{R1}<i>1</i><t><g>R1<v>Me<sep>Et");
    assert_ne!(converted[1].optimized, "stale");
    assert!(run("cxsmiles", &opt, &back).status.success());
    assert!(run("optimized", &back, &again).status.success());
    assert_eq!(fs::read(&opt).unwrap(), fs::read(&again).unwrap());
    assert_eq!(load(&back)[0].ocr_cells, converted[0].ocr_cells);
}

#[test]
fn convert_rejects_malformed_optimized() {
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("in.jsonl");
    write_records(&src, &[record("bad", "C", "C<i>0</i>(<t>", &[])]);
    let out = cli()
        .args(["convert", "--to", "cxsmiles", "--in"])
        .arg(&src)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad:"));
}

#[test]
fn generate_writes_dataset_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("run");
    let out = generate(&dir, 8, None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let records = load(&dir.join("dataset.jsonl"));
    assert_eq!(records.len(), 8);
    for r in &records {
        let svg = r.image_path.as_deref().unwrap();
        assert!(fs::read_to_string(dir.join(svg)).unwrap().starts_with("<svg"));
    }
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["n_written"], 8);
    assert_eq!(manifest["seed"], 0);
    let digest = hex::encode(<sha2::Sha256 as sha2::Digest>::digest(fs::read(dir.join("dataset.jsonl")).unwrap()));
    assert_eq!(manifest["dataset_sha256"], digest);
}

#[test]
fn generate_seed_override() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    assert!(generate(&a, 5, None).status.success());
    assert!(generate(&b, 5, Some("99")).status.success());
    assert!(generate(&c, 5, Some("99")).status.success());
    let read = |d: &Path| fs::read(d.join("dataset.jsonl")).unwrap();
    assert_ne!(read(&a), read(&b));
    assert_eq!(read(&b), read(&c));
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(b.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 99);
    assert_eq!(generate(&a, 1, Some("x")).status.code(), Some(1));
}

#[test]
fn generate_empty_corpus_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus.smi");
    fs::write(&corpus, "# nothing\n\n").unwrap();
    let out = cli()
        .args(["generate", "--n", "2", "--corpus"])
        .arg(&corpus)
        .arg("--out")
        .arg(tmp.path().join("o"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn generate_io_failure_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = generate(&blocker.join("sub"), 2, None);
    assert_eq!(out.status.code(), Some(2));
    let missing = cli().args(["stats", "--in"]).arg(tmp.path().join("nope.jsonl")).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

fn evaluate(pred: &Path, gt: &Path, report: &Path) -> EvalReport {
    let out = cli()
        .args(["evaluate", "--pred"])
        .arg(pred)
        .arg("--gt")
        .arg(gt)
        .arg("--report")
        .arg(report)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&fs::read(report).unwrap()).unwrap()
}

#[test]
fn evaluate_self_and_partial() {
    let tmp = tempfile::tempdir().unwrap();
    let gt = tmp.path().join("gt.jsonl");
    let a = record("a", "C* |$;R1$|", "C<i>0</i>{R1}<i>1</i><t><g>R1<v>Me", &[("R1", &["Me"])]);
    let b = record("b", "CCO", "C<i>0</i>C<i>1</i>O<i>2</i>", &[]);
    write_records(&gt, &[a, b]);
    let report = evaluate(&gt, &gt, &tmp.path().join("self.json"));
    assert_eq!(report.n_samples, 2);
    assert_eq!((report.cxsmiles_em, report.table_em, report.markush_em), (100.0, 100.0, 100.0));

    let pred = tmp.path().join("pred.jsonl");
    fs::write(
        &pred,
        "{\"id\":\"b\",\"optimized\":\"C<i>0</i>C<i>1</i>O<i>2</i>\"}\n{\"id\":\"a\",\"optimized\":\"\"}\n",
    )
    .unwrap();
    let report = evaluate(&pred, &gt, &tmp.path().join("partial.json"));
    assert_eq!(report.cxsmiles_em, 50.0);
    assert!(report.markush_em <= report.cxsmiles_em.min(report.table_em));
    let again = EvalReport::aggregate(report.per_sample.clone());
    assert_eq!(again, report);
}

#[test]
fn stats_empty_and_fixture() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty.jsonl");
    fs::write(&empty, "").unwrap();
    let out = cli().args(["stats", "--json", "--in"]).arg(&empty).output().unwrap();
    assert!(out.status.success());
    let stats: DatasetStats = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(stats.n, 0);
    assert!(stats.prop_r.is_none() && stats.mean_atoms.is_none());

    let fixture = tmp.path().join("fixture.jsonl");
    let records = vec![
        record("1", "CCO", "", &[]),
        record("2", "C*C |$;R1$|", "", &[("R1", &["a", "b", "c"])]),
        record("3", "c1ccccc1.*[*] |$;;;;;;;R2$,m:6:0.1.2.3.4.5|", "", &[("R2", &["a", "b"])]),
        record(
            "4",
            "C*CC* |$;X;;;Y$,Sg:n:2,3:n:ht|",
            "",
            &[("X", &["a"]), ("Y", &["b"]), ("n", &["1", "2", "3", "4"])],
        ),
    ];
    write_records(&fixture, &records);
    let out = cli().args(["stats", "--json", "--in"]).arg(&fixture).output().unwrap();
    let stats: DatasetStats = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(stats.n, 4);
    assert_eq!((stats.prop_r, stats.prop_m, stats.prop_sg), (Some(0.75), Some(0.25), Some(0.25)));
    assert_eq!(stats.mean_atoms, Some(19.0 / 4.0));
    assert_eq!(stats.mean_labels, Some(5.0 / 4.0));
    assert_eq!(stats.mean_substituents, Some(11.0 / 4.0));
    assert_eq!(stats, record_stats(&records).unwrap());

    let table = cli().args(["stats", "--in"]).arg(&fixture).output().unwrap();
    assert!(stdout(&table).contains("0.75"));
}

#[test]
fn render_writes_svg_and_cells() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cmd = cli();
    cmd.args(["render", "--out"]).arg(tmp.path());
    let out = with_stdin(cmd, "C* |$;R1$|\n\nnot(valid\nc1ccccc1\n");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    assert!(tmp.path().join("0001.svg").exists());
    assert!(tmp.path().join("0004.svg").exists());
    let cells: Vec<OcrCell> = serde_json::from_slice(&fs::read(tmp.path().join("0001.cells.json")).unwrap()).unwrap();
    assert!(cells.iter().any(|c| c.text.contains('R')));
}
