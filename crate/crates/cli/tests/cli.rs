use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lttp_core::{pnm, GrayImage};

fn lttp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lttp"))
        .args(args)
        .output()
        .expect("run lttp")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn texture(seed: u64, w: usize, h: usize, max: u8) -> GrayImage {
    let mut state = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) | 1;
    GrayImage::from_fn(w, h, |_, _| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        ((state >> 32) % (max as u64 + 1)) as u8
    })
}

fn save(dir: &Path, name: &str, img: &GrayImage) {
    fs::write(dir.join(name), pnm::encode_binary(img)).unwrap();
}

/// Six subjects; probes are `probe_of(gallery image)`.
fn dataset(dir: &Path, probe_of: impl Fn(&GrayImage) -> GrayImage) -> String {
    let mut rows = vec!["path,subject,role".to_string()];
    for s in 0..6 {
        let g = texture(s + 1, 16, 16, 120);
        save(dir, &format!("g{s}.pgm"), &g);
        save(dir, &format!("p{s}.pgm"), &probe_of(&g));
        rows.push(format!("g{s}.pgm,s{s},gallery"));
        rows.push(format!("p{s}.pgm,s{s},probe"));
    }
    let path = dir.join("manifest.csv");
    fs::write(&path, rows.join("\n") + "\n").unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn transform_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let w = [[9u8, 6, 8], [8, 9, 5], [11, 7, 10]];
    save(
        dir.path(),
        "ex.pgm",
        &GrayImage::from_fn(3, 3, |x, y| w[y][x]),
    );
    let out = dir.path().join("ti.pgm");
    let o = lttp(&[
        "transform",
        "--image",
        dir.path().join("ex.pgm").to_str().unwrap(),
        "--descriptor",
        "lttp-ld",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("1x1"));
    let ti = pnm::decode(&fs::read(&out).unwrap()).unwrap();
    assert_eq!(ti.data(), &[242]);
}

#[test]
fn transform_constant_and_ltp_planes() {
    let dir = tempfile::tempdir().unwrap();
    save(dir.path(), "flat.pgm", &GrayImage::filled(7, 6, 90));
    let img = dir.path().join("flat.pgm");
    let out = dir.path().join("flat_lbp.pgm");
    let o = lttp(&[
        "transform",
        "--image",
        img.to_str().unwrap(),
        "--descriptor",
        "lbp",
        "--mode",
        "block",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let ti = pnm::decode(&fs::read(&out).unwrap()).unwrap();
    assert_eq!((ti.width(), ti.height()), (2, 2));
    assert!(ti.data().iter().all(|&c| c == 255));

    let out = dir.path().join("flat_ltp.pgm");
    let o = lttp(&[
        "transform",
        "--image",
        img.to_str().unwrap(),
        "--descriptor",
        "ltp",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for plane in ["upper", "lower"] {
        let p = dir.path().join(format!("flat_ltp.{plane}.pgm"));
        let ti = pnm::decode(&fs::read(p).unwrap()).unwrap();
        assert!(ti.data().iter().all(|&c| c == 0));
    }
}

#[test]
fn unknown_descriptor_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    save(dir.path(), "a.pgm", &GrayImage::filled(4, 4, 1));
    let o = lttp(&[
        "transform",
        "--image",
        dir.path().join("a.pgm").to_str().unwrap(),
        "--descriptor",
        "sift",
        "--out",
        dir.path().join("o.pgm").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error:"), "{}", stderr(&o));
    assert!(!dir.path().join("o.pgm").exists());

    let o = lttp(&["transform", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error:"));
}

#[test]
fn color_input_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("rgb.ppm");
    fs::write(&p, b"P6\n1 1\n255\n\x01\x02\x03").unwrap();
    let o = lttp(&[
        "transform",
        "--image",
        p.to_str().unwrap(),
        "--descriptor",
        "lbp",
        "--out",
        dir.path().join("o.pgm").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("channel count"), "{}", stderr(&o));
}

#[test]
fn evaluate_self_match() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dataset(dir.path(), |g| g.clone());
    let json = dir.path().join("report.json");
    let o = lttp(&[
        "evaluate",
        "--manifest",
        &manifest,
        "--descriptor",
        "lgs",
        "--ranks",
        "1,3",
        "--cmc-max",
        "6",
        "--out-json",
        json.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("CS@1") && out.contains("SAD@3"), "{out}");
    assert_eq!(out.matches("100.00").count(), 4, "{out}");
    let report = fs::read_to_string(json).unwrap();
    assert!(report.contains("\"cmc\""));
}

#[test]
fn evaluate_monotone_remaps() {
    let dir = tempfile::tempdir().unwrap();
    // strictly increasing on 0..=120
    let lut: [u8; 256] = std::array::from_fn(|i| (i * 2).min(255) as u8);
    let manifest = dataset(dir.path(), |g| g.map(&lut));
    for d in ["lttp-ld", "lttp-lb", "lttp-rd", "lttp-rb"] {
        let o = lttp(&["evaluate", "--manifest", &manifest, "--descriptor", d]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert_eq!(stdout(&o).matches("100.00").count(), 2, "{}", stdout(&o));
    }
}

#[test]
fn evaluate_validation_and_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    save(dir.path(), "a.pgm", &GrayImage::filled(5, 5, 1));
    let m = dir.path().join("noprobe.csv");
    fs::write(&m, "path,subject,role\na.pgm,s,gallery\n").unwrap();
    let o = lttp(&[
        "evaluate",
        "--manifest",
        m.to_str().unwrap(),
        "--descriptor",
        "lbp",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("empty probe set"), "{}", stderr(&o));

    let m = dir.path().join("missing.csv");
    fs::write(
        &m,
        "path,subject,role\na.pgm,s,gallery\ngone1.pgm,s,probe\ngone2.pgm,s,probe\n",
    )
    .unwrap();
    let o = lttp(&[
        "evaluate",
        "--manifest",
        m.to_str().unwrap(),
        "--descriptor",
        "lbp",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(
        err.contains("gone1.pgm") && err.contains("gone2.pgm"),
        "{err}"
    );
    assert!(err.lines().all(|l| l.starts_with("error:")), "{err}");

    let o = lttp(&[
        "evaluate",
        "--manifest",
        m.to_str().unwrap(),
        "--descriptor",
        "lbp",
        "--ranks",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn workers_do_not_change_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dataset(dir.path(), |g| {
        GrayImage::from_fn(g.width(), g.height(), |x, y| {
            g.get(x, y).wrapping_add((x * y % 7) as u8)
        })
    });
    let mut outputs = Vec::new();
    for workers in ["1", "4"] {
        let json = dir.path().join(format!("r{workers}.json"));
        let scores = dir.path().join(format!("s{workers}"));
        let o = lttp(&[
            "--workers",
            workers,
            "compare",
            "--manifest",
            &manifest,
            "--descriptors",
            "lttp-ld,lbp,ltp",
            "--ranks",
            "1,2",
            "--out-json",
            json.to_str().unwrap(),
            "--scores",
            scores.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push((
            stdout(&o),
            fs::read(json).unwrap(),
            fs::read(scores.join("ltp.csv")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
    let header = String::from_utf8(outputs[0].2.clone()).unwrap();
    assert!(header.starts_with("probe,gallery,subject,metric,score,rank\n"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dataset(dir.path(), |g| g.clone());
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        format!(
            "manifest = {:?}\ndescriptors = [\"lttp-rb\", \"lgs\"]\nmetrics = [\"sad\"]\nranks = [1]\n",
            manifest
        ),
    )
    .unwrap();
    let o = lttp(&["--config", cfg.to_str().unwrap(), "compare"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(
        out.contains("lttp-rb") && out.contains("SAD@1") && !out.contains("CS@1"),
        "{out}"
    );

    let o = lttp(&[
        "--config",
        cfg.to_str().unwrap(),
        "compare",
        "--metrics",
        "cs",
    ]);
    let out = stdout(&o);
    assert!(out.contains("CS@1") && !out.contains("SAD@1"), "{out}");

    fs::write(&cfg, "descriptorz = [\"lbp\"]\n").unwrap();
    let o = lttp(&["--config", cfg.to_str().unwrap(), "compare"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown field"), "{}", stderr(&o));
}

#[test]
fn extract_writes_feature_rows() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dataset(dir.path(), |g| g.clone());
    let out = dir.path().join("f.csv");
    let o = lttp(&[
        "extract",
        "--manifest",
        &manifest,
        "--descriptor",
        "lttp-lb",
        "--mode",
        "block",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("path,subject,role,length,features"));
    let first = lines.next().unwrap();
    assert!(first.starts_with("g0.pgm,s0,gallery,25,"), "{first}");
    assert_eq!(text.lines().count(), 13);
}

#[test]
fn bench_smoke() {
    let o = lttp(&[
        "bench",
        "--size",
        "128",
        "--descriptors",
        "lttp-ld",
        "--modes",
        "dense,block",
        "--repetitions",
        "10",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    let sites: Vec<usize> = rows
        .iter()
        .map(|r| r.split(',').nth(4).unwrap().parse().unwrap())
        .collect();
    assert!(sites[1] * 9 <= sites[0]);
    for r in rows {
        let mpix: f64 = r.split(',').nth(9).unwrap().parse().unwrap();
        assert!(mpix > 0.0);
    }
    let o = lttp(&["bench", "--repetitions", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn split_then_compare() {
    let dir = tempfile::tempdir().unwrap();
    let mut list = vec!["path,subject".to_string()];
    for s in 0..4 {
        for i in 0..3 {
            let name = format!("s{s}_{i}.pgm");
            save(dir.path(), &name, &texture(s * 10 + i, 12, 12, 255));
            list.push(format!("{name},s{s}"));
        }
    }
    let list_path = dir.path().join("list.csv");
    fs::write(&list_path, list.join("\n") + "\n").unwrap();
    let out = dir.path().join("split.csv");
    let run = || {
        lttp(&[
            "split",
            "--list",
            list_path.to_str().unwrap(),
            "--seed",
            "9",
            "--out",
            out.to_str().unwrap(),
        ])
    };
    let o = run();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("8 gallery, 4 probe"));
    let first = fs::read(&out).unwrap();
    run();
    assert_eq!(fs::read(&out).unwrap(), first);

    let o = lttp(&["compare", "--manifest", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 1 + 7);
}
