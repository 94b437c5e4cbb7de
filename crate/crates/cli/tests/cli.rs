use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use weatlab_cli::cli::main_with_args;
use weatlab_cli::commands::*;
use weatlab_cli::config::{parse_value, RunConfig};
use weatlab_cli::{EXIT_CONFIG, EXIT_DATA, EXIT_OK};
use weatlab_core::embedding::{write_binary, Matrix};
use weatlab_core::{EmbeddingModel, TrainerConfig, Vocabulary};

fn call(args: &[&str]) -> (i32, String, String) {
    let args: Vec<OsString> = args.iter().map(OsString::from).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = main_with_args(args, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write_lists(dir: &Path, a: &str, b: &str, x: &str, y: &str) -> Vec<String> {
    let mut args = Vec::new();
    for (flag, name, body) in [
        ("--names-a", "a.txt", a),
        ("--names-b", "b.txt", b),
        ("--pleasant", "x.txt", x),
        ("--unpleasant", "y.txt", y),
    ] {
        let p = dir.join(name);
        fs::write(&p, format!("# list\n{body}\n")).unwrap();
        args.push(flag.to_owned());
        args.push(p.to_string_lossy().into_owned());
    }
    args
}

fn crafted_model(path: &Path) {
    let words = ["a", "b", "x", "y"];
    let vocab = Vocabulary::from_counts(words.iter().map(|w| (w.to_string(), 10)).collect()).unwrap();
    let input = Matrix::from_vec(4, 2, vec![1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0]);
    let output = Matrix::zeros(4, 2);
    let cfg = TrainerConfig {
        vector_dim: 2,
        ..TrainerConfig::default()
    };
    let model = EmbeddingModel::from_parts(vocab, input, output, cfg).unwrap();
    write_binary(&model, fs::File::create(path).unwrap()).unwrap();
}

#[test]
fn weat_on_crafted_model_is_two() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.bin");
    crafted_model(&model);
    let mut args = vec!["weat".to_owned(), "--model".into(), model.to_string_lossy().into()];
    args.extend(write_lists(dir.path(), "a", "b", "x\nnotthere", "y"));
    let (code, out, err) = call(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code, EXIT_OK, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["value"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(v["dropped"]["pleasant"][0], "notthere");
}

#[test]
fn weat_errors() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.bin");
    crafted_model(&model);
    let lists = write_lists(dir.path(), "a", "b", "gone\nmissing", "y");
    let mut args = vec!["weat".to_owned(), "--model".into(), model.to_string_lossy().into()];
    args.extend(lists.clone());
    let (code, _, err) = call(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code, EXIT_DATA);
    let report: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
    assert!(report["message"].as_str().unwrap().contains("X is empty"), "{err}");

    let bad = dir.path().join("bad.bin");
    fs::write(&bad, b"NOPE and more bytes").unwrap();
    let mut args = vec!["weat".to_owned(), "--model".into(), bad.to_string_lossy().into()];
    args.extend(lists);
    let (code, _, err) = call(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code, EXIT_DATA);
    assert!(err.contains("magic"), "{err}");
}

fn corpus_file(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("corpus.jsonl");
    fs::write(&p, body).unwrap();
    p
}

#[test]
fn inventory_counts_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let body = [
        r#"{"group_id":"x","text":"one two three"}"#,
        r#"{"group_id":"x","text":"RT @a four"}"#,
        r#"{"group_id":"y","text":"five six"}"#,
        r#"{"group_id":"x","text":"seven"}"#,
        r#"{"group_id":"z","text":"@only"}"#,
    ]
    .join("\n");
    let corpus = corpus_file(dir.path(), &body);
    let out_dir = dir.path().join("out");
    let args = [
        "inventory",
        "--corpus",
        corpus.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
        "--sampling.min_group_size=2",
        "--sampling.per_group_sample=1",
    ];
    let (code, out, err) = call(&args);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.contains("2 groups, 1 eligible"), "{out}");
    let tsv = fs::read_to_string(out_dir.join(INVENTORY_FILE)).unwrap();
    assert_eq!(tsv, "group_id\tdoc_count\ttoken_count\nx\t2\t4\ny\t1\t2\n");

    corpus_file(dir.path(), "{\"group_id\":\"x\",\"text\":\"a\"}\n{broken\n");
    let (code, _, err) = call(&args);
    assert_eq!(code, EXIT_DATA);
    let report: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(report["line"], 2);

    corpus_file(dir.path(), "");
    let (code, _, _) = call(&args);
    assert_eq!(code, EXIT_OK);
    assert_eq!(fs::read_to_string(out_dir.join(INVENTORY_FILE)).unwrap(), "group_id\tdoc_count\ttoken_count\n");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(call(&["frobnicate"]).0, EXIT_CONFIG);
    assert_eq!(call(&["inventory", "--sampling.nonsense=1"]).0, EXIT_CONFIG);
    assert_eq!(call(&["inventory"]).0, EXIT_CONFIG, "no corpus configured");
    assert_eq!(call(&["--help"]).0, EXIT_OK);
    let (code, _, err) = call(&["synth"]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(err.contains("synth config required"));
}

fn synth_config(dir: &Path, seed: u64) -> RunConfig {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let lists = root.join("data/wordlists");
    let out = dir.join("out");
    let set = |k: &str, v: &str| (k.to_owned(), parse_value(v));
    let s = |p: PathBuf| format!("{:?}", p.to_string_lossy());
    RunConfig::load(
        None,
        &[
            set("paths.corpus", &s(out.join(SYNTH_CORPUS_FILE))),
            set("paths.covariates", &s(out.join(OUTCOMES_FILE))),
            set("paths.out_dir", &s(out.clone())),
            set("paths.names_a", &format!("[{}]", s(lists.join("names_a.txt")))),
            set("paths.names_b", &format!("[{}]", s(lists.join("names_b.txt")))),
            set("paths.pleasant", &format!("[{}]", s(lists.join("pleasant.txt")))),
            set("paths.unpleasant", &format!("[{}]", s(lists.join("unpleasant.txt")))),
            set("run.seed", &seed.to_string()),
            set("run.prevalence_column", "\"prevalence\""),
            set("run.outcomes", "[\"outcome\"]"),
            set("sampling.baseline_total", "1200"),
            set("sampling.per_group_sample", "500"),
            set("sampling.min_group_size", "500"),
            set("sampling.repetitions", "2"),
            set("trainer.vector_dim", "10"),
            set("trainer.min_count", "5"),
            set("trainer.epochs", "1"),
            set("synth.n_groups", "12"),
            set("synth.docs_per_group", "500"),
            set("synth.vocab_size", "300"),
            set("synth.name_rate", "0.1"),
        ],
    )
    .unwrap()
}

#[test]
fn synth_then_run_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = synth_config(dir.path(), 5);
    let mut log = Vec::new();
    cmd_synth(&cfg, &mut log).unwrap();
    let out = &cfg.paths.out_dir;
    let corpus_bytes = fs::read(out.join(SYNTH_CORPUS_FILE)).unwrap();
    cmd_synth(&cfg, &mut Vec::new()).unwrap();
    assert_eq!(fs::read(out.join(SYNTH_CORPUS_FILE)).unwrap(), corpus_bytes);

    let report = cmd_run(&cfg, &mut log).unwrap();
    assert_eq!(report.groups, 12);
    assert!(report.cell_errors.is_empty(), "{:?}", report.cell_errors);
    let group_tsv = fs::read_to_string(out.join(GROUP_BIAS_FILE)).unwrap();
    assert!(group_tsv.starts_with("group_id\tweat_mean\tweat_rep_1\tweat_rep_2\trel_b_name_freq\n"));
    let records = weatlab_core::bias::records_from_tsv(&group_tsv).unwrap();
    assert_eq!(weatlab_core::bias::records_to_tsv(&records).unwrap(), group_tsv);

    let table = fs::read_to_string(out.join(TABLE_TSV_FILE)).unwrap();
    assert!(table.starts_with("outcome\tNo controls\tPercent black\tRelative black name freq.\n"), "{table}");
    let (cols, rows) = weatlab_core::AssociationTable::parse_tsv(&table).unwrap();
    assert_eq!(weatlab_core::AssociationTable::tsv_from_parts(&cols, &rows), table);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join(TABLE_JSON_FILE)).unwrap()).unwrap();
    assert!(json["rows"][0]["cells"][0]["beta"].is_number());

    let lowess = fs::read_to_string(out.join(LOWESS_FILE)).unwrap();
    let points = weatlab_core::stats::lowess_from_tsv(&lowess).unwrap();
    assert_eq!(points.len(), 12);
    assert_eq!(weatlab_core::stats::lowess_to_tsv(&points), lowess);
    for f in [SCORES_FILE, WORD_SETS_FILE, PARTIAL_FILE, RUN_REPORT_FILE, GROUND_TRUTH_FILE] {
        assert!(out.join(f).exists(), "{f}");
    }

    // Same seed, same bytes.
    cmd_run(&cfg, &mut Vec::new()).unwrap();
    assert_eq!(fs::read_to_string(out.join(GROUP_BIAS_FILE)).unwrap(), group_tsv);
}

#[test]
fn train_commands_match_the_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = synth_config(dir.path(), 9);
    cmd_synth(&cfg, &mut Vec::new()).unwrap();
    let base = cmd_train_baseline(&cfg, 1, true, &mut Vec::new()).unwrap();
    assert!(base.with_extension("txt").exists());
    let upd = cmd_train_updated(&cfg, &base, "g003", 1, false, &mut Vec::new()).unwrap();
    let mut out = Vec::new();
    let score = cmd_weat(&upd, &cfg, &mut out).unwrap();

    cmd_run(&cfg, &mut Vec::new()).unwrap();
    let tsv = fs::read_to_string(cfg.paths.out_dir.join(GROUP_BIAS_FILE)).unwrap();
    let rec = weatlab_core::bias::records_from_tsv(&tsv).unwrap();
    let g = rec.iter().find(|r| r.group_id == "g003").unwrap();
    assert_eq!(g.weat_values[1], score.score.value);
}
