//! Exit codes, error reporting and artefact determinism of the `marble`
//! binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn marble(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_marble"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "marble-cli-{tag}-{}-{}",
        std::process::id(),
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .unwrap()
            .as_nanos()
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn usage_errors_exit_1_with_machine_line() {
    let out = marble(&["cluster", "--algorithm", "kmeans"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("error kind=usage"), "{stderr}");

    let out = marble(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_0() {
    let out = marble(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn data_errors_exit_2_with_machine_line() {
    let dir = temp_dir("data");
    let manifest = dir.join("manifest.csv");
    std::fs::write(&manifest, "id,path,colour_class,vein_class\na,x.ppm,1,4\n").unwrap();
    let out = marble(&["ingest", "--manifest", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("error kind=data"), "{stderr}");
    assert!(stderr.contains("vein class 4"), "{stderr}");
    assert!(stderr.contains("line 2"), "{stderr}");
}

#[test]
fn corrupt_image_is_a_data_error() {
    let dir = temp_dir("corrupt");
    std::fs::write(dir.join("bad.ppm"), b"P9 not an image").unwrap();
    let manifest = dir.join("manifest.csv");
    std::fs::write(
        &manifest,
        "id,path,colour_class,vein_class\na,bad.ppm,1,1\n",
    )
    .unwrap();
    let out = marble(&[
        "featurize",
        "--manifest",
        manifest.to_str().unwrap(),
        "--out",
        dir.join("features").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("malformed magic"),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let out = marble(&[
        "synth",
        "--out",
        "/proc/definitely/not/writable",
        "--replicates",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("error kind=runtime"),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn render_is_deterministic_and_reproduces_constant_images() {
    let dir = temp_dir("render");
    // A constant image: the rendered signature equals the input.
    let image = dir.join("flat.ppm");
    let mut ppm = b"P6\n16 16\n255\n".to_vec();
    ppm.extend(std::iter::repeat_n([77u8, 120, 30], 256).flatten());
    std::fs::write(&image, &ppm).unwrap();

    let out_a = dir.join("a");
    let out_b = dir.join("b");
    for out in [&out_a, &out_b] {
        let result = marble(&[
            "render",
            image.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(result.status.code(), Some(0));
    }
    let sig_a = std::fs::read(out_a.join("signature.ppm")).unwrap();
    let sig_b = std::fs::read(out_b.join("signature.ppm")).unwrap();
    assert_eq!(sig_a, sig_b);
    assert_eq!(sig_a, ppm);

    let table = std::fs::read_to_string(out_a.join("regions.tsv")).unwrap();
    assert_eq!(table.lines().count(), 2); // header + one region
}

#[test]
fn evaluate_report_has_one_line_per_subset_plus_headers() {
    let dir = temp_dir("report");
    let corpus = dir.join("corpus");
    let cfgfile = dir.join("cfg.txt");
    std::fs::write(&cfgfile, "quadtree.min_area = 16\n").unwrap();

    let synth = marble(&[
        "synth",
        "--out",
        corpus.to_str().unwrap(),
        "--seed",
        "5",
        "--replicates",
        "1",
        "--size",
        "64",
    ]);
    assert_eq!(synth.status.code(), Some(0));

    let feats = dir.join("features");
    let featurize = marble(&[
        "featurize",
        "--manifest",
        corpus.join("manifest.csv").to_str().unwrap(),
        "--out",
        feats.to_str().unwrap(),
        "--config",
        cfgfile.to_str().unwrap(),
    ]);
    assert_eq!(featurize.status.code(), Some(0));

    let reports = dir.join("reports");
    let evaluate = marble(&[
        "evaluate",
        "--features",
        feats.join("mf.csv").to_str().unwrap(),
        "--manifest",
        corpus.join("manifest.csv").to_str().unwrap(),
        "--labels",
        "vein",
        "--subset",
        "MF_A",
        "--subset",
        "MF_B",
        "--subset",
        "MF_C",
        "--out",
        reports.to_str().unwrap(),
    ]);
    assert_eq!(evaluate.status.code(), Some(0));
    let report = std::fs::read_to_string(reports.join("quality_vein.txt")).unwrap();
    // Block header + column header + three subset rows.
    assert_eq!(report.lines().count(), 2 + 3);

    // Confusion matrix row sums equal the per-class truth counts.
    let runs = dir.join("runs");
    let cluster = marble(&[
        "cluster",
        "--features",
        feats.join("mf.csv").to_str().unwrap(),
        "--manifest",
        corpus.join("manifest.csv").to_str().unwrap(),
        "--algorithm",
        "lvq",
        "--subset",
        "MF_C",
        "--labels",
        "vein",
        "--out",
        runs.to_str().unwrap(),
    ]);
    assert_eq!(cluster.status.code(), Some(0));
    let confusion = std::fs::read_to_string(runs.join("confusion_lvq_MF_C_vein.txt")).unwrap();
    for line in confusion.lines().skip(1) {
        let sum: u64 = line
            .split('\t')
            .skip(1)
            .map(|v| v.parse::<u64>().unwrap())
            .sum();
        assert_eq!(sum, 6); // 6 colours x 1 replicate per vein class
    }
}
