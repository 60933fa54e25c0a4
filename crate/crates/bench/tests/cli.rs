use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ridgelab::codec::{load_image, save_pgm, save_png};
use ridgelab::filters::{gaussian_blur, median_filter};
use ridgelab::metrics::{mse, parse_metric};
use ridgelab::pca::{denoise, PcaConfig};
use ridgelab::Image;
use ridgelab_bench::SynthSpec;

fn ridgelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ridgelab"))
        .args(args)
        .output()
        .expect("spawn ridgelab")
}

fn ridgelab_env(args: &[&str], key: &str, val: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ridgelab"))
        .args(args)
        .env(key, val)
        .output()
        .expect("spawn ridgelab")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn fixture(dir: &Path, name: &str, img: &Image) -> PathBuf {
    let path = dir.join(name);
    save_pgm(img, &path).unwrap();
    path
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn denoise_constant_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path(), "in.pgm", &Image::filled(20, 11, 93.0).unwrap());
    let out = dir.path().join("out.pgm");
    let o = ridgelab(&["denoise", p(&input), "--pipe", "pca:24,1", "-o", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read(&input).unwrap(), fs::read(&out).unwrap());
    assert!(o.stdout.is_empty());
}

#[test]
fn denoise_unknown_filter() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path(), "in.pgm", &Image::filled(4, 4, 1.0).unwrap());
    let o = ridgelab(&[
        "denoise",
        p(&input),
        "--pipe",
        "bogus",
        "-o",
        p(&dir.path().join("o.pgm")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bogus"));
}

#[test]
fn denoise_missing_input() {
    let dir = tempfile::tempdir().unwrap();
    let o = ridgelab(&[
        "denoise",
        p(&dir.path().join("nope.pgm")),
        "-o",
        p(&dir.path().join("o.pgm")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not found"));
}

#[test]
fn denoise_reports_metrics_against_reference() {
    let dir = tempfile::tempdir().unwrap();
    let clean = SynthSpec {
        width: 64,
        height: 48,
        period: 8.0,
        degrees: 30.0,
    }
    .generate();
    let noisy = ridgelab::noise::add_salt_pepper(&clean, 0.05, 3).unwrap();
    let clean_p = fixture(dir.path(), "clean.pgm", &clean);
    let noisy_p = fixture(dir.path(), "noisy.pgm", &noisy);
    let out = dir.path().join("out.pgm");
    let o = ridgelab(&[
        "denoise",
        p(&noisy_p),
        "--pipe",
        "median:1",
        "--ref",
        p(&clean_p),
        "-o",
        p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 1);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let expected = mse(&load_image(&clean_p).unwrap(), &load_image(&out).unwrap()).unwrap();
    assert!((v["mse"].as_f64().unwrap() - expected).abs() <= 1e-12 * expected.max(1.0));
    for key in ["snr_db", "psnr_db", "sigma_hat"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    // the written file is the quantized filter output
    let lib = median_filter(&load_image(&noisy_p).unwrap(), 1)
        .unwrap()
        .quantize();
    assert_eq!(load_image(&out).unwrap(), lib);
}

#[test]
fn denoise_reference_dimension_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let a = fixture(dir.path(), "a.pgm", &Image::filled(6, 6, 1.0).unwrap());
    let b = fixture(dir.path(), "b.pgm", &Image::filled(6, 7, 1.0).unwrap());
    let o = ridgelab(&[
        "denoise",
        p(&a),
        "--ref",
        p(&b),
        "-o",
        p(&dir.path().join("o.pgm")),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn denoise_pipeline_composes_left_to_right() {
    let dir = tempfile::tempdir().unwrap();
    let clean = SynthSpec {
        width: 45,
        height: 30,
        period: 6.0,
        degrees: 60.0,
    }
    .generate();
    let noisy = ridgelab::noise::add_salt_pepper(&clean, 0.1, 8)
        .unwrap()
        .quantize();
    let input = fixture(dir.path(), "in.pgm", &noisy);
    let out = dir.path().join("out.pgm");
    let o = ridgelab(&[
        "denoise",
        p(&input),
        "--pipe",
        "gaussian:1|pca:24,1",
        "-o",
        p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let lib = denoise(&gaussian_blur(&noisy, 1.0).unwrap(), &PcaConfig::default()).unwrap();
    assert_eq!(load_image(&out).unwrap(), lib.quantize());
}

#[test]
fn denoise_flags_feed_pca_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let img = SynthSpec {
        width: 30,
        height: 30,
        period: 8.0,
        degrees: 0.0,
    }
    .generate()
    .quantize();
    let input = fixture(dir.path(), "in.pgm", &img);
    let out = dir.path().join("out.pgm");
    let o = ridgelab(&[
        "denoise",
        p(&input),
        "--tau",
        "300",
        "--passes",
        "2",
        "-o",
        p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    // tau above any block range: fixed point
    assert_eq!(load_image(&out).unwrap(), img);
    let o = ridgelab(&[
        "denoise",
        p(&input),
        "--tau",
        "auto",
        "--stretch",
        "-o",
        p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(load_image(&out).unwrap().min_max(), (0.0, 255.0));
    let o = ridgelab(&["denoise", p(&input), "--tau", "-3", "-o", p(&out)]);
    assert!(!o.status.success());
}

#[test]
fn denoise_resize_and_png_input() {
    let dir = tempfile::tempdir().unwrap();
    let img = Image::from_fn(8, 8, |x, y| (x * 30 + y) as f64).unwrap();
    let png = dir.path().join("in.png");
    save_png(&img, &png).unwrap();
    let out = dir.path().join("out.pgm");
    let o = ridgelab(&[
        "denoise",
        p(&png),
        "--pipe",
        "histeq",
        "--resize",
        "4x2",
        "-o",
        p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(load_image(&out).unwrap().dims(), (4, 2));
    let o = ridgelab(&["denoise", p(&png), "--resize", "4by2", "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn gabor_quantized_orientation_flag() {
    let dir = tempfile::tempdir().unwrap();
    let img = SynthSpec {
        width: 48,
        height: 48,
        period: 8.0,
        degrees: 30.0,
    }
    .generate();
    let input = fixture(dir.path(), "in.pgm", &img);
    let out = dir.path().join("out.pgm");
    let o = ridgelab(&[
        "denoise",
        p(&input),
        "--pipe",
        "gabor",
        "--quantize-orient",
        "16",
        "-o",
        p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn noise_synth_identity_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.pgm");
    let b = dir.path().join("b.pgm");
    let o = ridgelab(&[
        "noise",
        "--synth",
        "256x256:8:90",
        "--spec",
        "sp:0:1",
        "-o",
        p(&a),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let expected = SynthSpec {
        width: 256,
        height: 256,
        period: 8.0,
        degrees: 90.0,
    }
    .generate()
    .quantize();
    assert_eq!(load_image(&a).unwrap(), expected);

    let args = |out: &Path| {
        vec![
            "noise".to_string(),
            "--synth".into(),
            "64x64:8:45".into(),
            "--spec".into(),
            "gaussian:10:5".into(),
            "-o".into(),
            p(out).to_string(),
        ]
    };
    let run = |out: &Path| {
        let v = args(out);
        let refs: Vec<&str> = v.iter().map(String::as_str).collect();
        assert!(ridgelab(&refs).status.success());
    };
    run(&a);
    run(&b);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn noise_from_file_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path(), "in.pgm", &Image::filled(10, 10, 128.0).unwrap());
    let out = dir.path().join("o.pgm");
    let o = ridgelab(&["noise", p(&input), "--spec", "sp:1:9", "-o", p(&out)]);
    assert!(o.status.success());
    assert!(load_image(&out)
        .unwrap()
        .pixels()
        .iter()
        .all(|&v| v == 0.0 || v == 255.0));

    let o = ridgelab(&[
        "noise",
        "--synth",
        "32x32:8:0",
        "--spec",
        "sp:1.5:1",
        "-o",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("density"));
    let o = ridgelab(&[
        "noise",
        "--synth",
        "32x32:0:0",
        "--spec",
        "sp:0.1:1",
        "-o",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("run.bench");
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn bench_two_pipelines_two_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "input synth:48x48:8:45\nnoise sp:0.05:42\npipe pca:24,1\npipe median:1\n",
    );
    let out = dir.path().join("r.csv");
    let o = ridgelab(&["bench", p(&cfg), "-o", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        rd.headers().unwrap().iter().collect::<Vec<_>>(),
        [
            "input",
            "noise",
            "pipeline",
            "seed",
            "mse_clean",
            "snr_clean",
            "psnr_clean",
            "mse_noisy",
            "snr_noisy",
            "psnr_noisy",
            "sigma_hat",
            "ms"
        ]
    );
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert_eq!(&r[3], "42");
        assert!(r[11].parse::<f64>().unwrap() >= 0.0);
        let m = parse_metric(&r[4]).unwrap();
        let psnr = parse_metric(&r[6]).unwrap();
        assert!((psnr - 10.0 * (255.0f64 * 255.0 / m).log10()).abs() <= 1e-9);
    }
}

#[test]
fn bench_without_pipelines_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "input synth:8x8:4:0\nnoise sp:0:1\n");
    let o = ridgelab(&["bench", p(&cfg), "-o", p(&dir.path().join("r.csv"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no pipelines"));
}

#[test]
fn bench_failed_cells_still_write_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "input synth:16x16:8:0\ninput gone.pgm\nnoise sp:0:1\npipe median:1\npipe nope\n",
    );
    let out = dir.path().join("r.csv");
    let o = ridgelab(&["bench", p(&cfg), "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("3 cell(s) failed"), "{err}");
    assert!(err.contains("gone.pgm") && err.contains("nope"));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.lines().next().unwrap().ends_with(",ms,error"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn bench_json_and_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "input synth:32x32:8:45\nnoise gaussian:15:7\npipe visu:auto\npipe wgc\n",
    );
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let o = ridgelab(&[
            "bench",
            p(&cfg),
            "-o",
            p(out),
            "--format",
            "json",
            "--no-timing",
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&fs::read(&a).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert!(v[0]["ms"].is_null());
    assert_eq!(v[1]["pipeline"], "wgc");
}

#[test]
fn bench_thread_env() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "input synth:16x16:8:45\nnoise sp:0.1:1\npipe median:1\n",
    );
    let out = dir.path().join("r.csv");
    let o = ridgelab_env(&["bench", p(&cfg), "-o", p(&out)], "RIDGELAB_THREADS", "2");
    assert!(o.status.success(), "{}", stderr(&o));
    let o = ridgelab_env(
        &["bench", p(&cfg), "-o", p(&out)],
        "RIDGELAB_THREADS",
        "many",
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("RIDGELAB_THREADS"));
}

#[test]
fn filters_lists_registry() {
    let o = ridgelab(&["filters"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for name in [
        "gaussian", "median", "histeq", "visu", "gabor", "wgc", "pca",
    ] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}
