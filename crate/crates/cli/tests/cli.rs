use std::process::{Command, Output};

fn crdual(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crdual")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn angle_of_the_real_plane() {
    let o = crdual(&["angle", "--catalog", "r2", "--at", "0,0"]);
    assert!(o.status.success());
    let theta: f64 = stdout(&o).trim().parse().unwrap();
    assert!((theta - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    let o = crdual(&["angle", "--catalog", "complex-line", "--at", "0,0"]);
    assert_eq!(stdout(&o).trim().parse::<f64>().unwrap(), 0.0);
}

#[test]
fn circle_of_the_real_plane() {
    let o = crdual(&["circle", "--catalog", "r2", "--at", "0,0"]);
    assert!(o.status.success());
    let text = stdout(&o);
    // A = D = 0, B imaginary: the circle λ2 = 0
    assert!(text.contains("form: 0 + 2 Re(conj(0+0.7071067811865475i) λ) + 0 |λ|² = 0"), "{text}");
}

#[test]
fn census_of_the_torus() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = crdual(&["census", "--catalog", "clifford-torus", "--seed", "7", "--lines", "2000", "--out", out]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("counts: {0,2}"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("census.json")).unwrap()).unwrap();
    assert_eq!(json["schema"], "crdual.census.v1");
    assert_eq!(json["lines"].as_array().unwrap().len(), 2000);
    let csv = std::fs::read_to_string(dir.path().join("regions.csv")).unwrap();
    assert!(csv.starts_with("count,size,representative,l1,l2,m1,m2\n"));
}

#[test]
fn census_output_is_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = crdual(&["census", "--catalog", "complex-conic", "--seed", "3", "--lines", "300", "--out", d.path().to_str().unwrap()]);
        assert!(o.status.success());
    }
    for f in ["census.json", "regions.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
    }
}

#[test]
fn census_requires_a_seed() {
    let o = crdual(&["census", "--catalog", "clifford-torus"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bidual_of_the_paraboloid() {
    let dir = tempfile::tempdir().unwrap();
    let o = crdual(&["bidual", "--catalog", "graph:paraboloid.surf", "--at", "0,0", "--slope", "0", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("bidual.json")).unwrap()).unwrap();
    assert!(json["report"]["distance"].as_f64().unwrap() < 1e-5);
}

#[test]
fn dual_of_the_real_plane_is_real() {
    let dir = tempfile::tempdir().unwrap();
    let o = crdual(&["dual", "--catalog", "r2", "--grid", "4", "--fiber", "8", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("all lines real: true"));
    let csv = std::fs::read_to_string(dir.path().join("dual.csv")).unwrap();
    let mut rows = csv.lines();
    assert_eq!(rows.next(), Some("l1,l2,m1,m2,pi_rank"));
    for r in rows {
        let v: Vec<f64> = r.split(',').map(|x| x.parse().unwrap()).collect();
        // vertical lines have no chart coordinates
        assert!(v[0].is_nan() || (v[1].abs() < 1e-12 && v[3].abs() < 1e-12), "{r}");
    }
    assert!(std::fs::read_to_string(dir.path().join("dual.ply")).unwrap().contains("property double x"));
}

#[test]
fn lift_writes_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = crdual(&["lift", "--catalog", "clifford-torus", "--grid", "3", "--fiber", "4", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    for f in ["lift.csv", "lift.ply", "lift.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    // geometric precondition
    let o = crdual(&["bidual", "--catalog", "graph:exceptional.surf", "--at", "0,0", "--slope", "0", "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    // parse error in a definition file
    let bad = dir.path().join("bad.surf");
    std::fs::write(&bad, "params: s t\nx = s +\n").unwrap();
    let o = crdual(&["angle", "--surface", bad.to_str().unwrap(), "--at", "0,0"]);
    assert_eq!(o.status.code(), Some(1));
    // missing file
    let o = crdual(&["angle", "--surface", "/nonexistent/x.surf", "--at", "0,0"]);
    assert_eq!(o.status.code(), Some(1));
    // tolerance outside its range
    let o = crdual(&["angle", "--catalog", "r2", "--at", "0,0", "--tol", "wall=5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn wall_probe_on_the_torus() {
    // λ = r e^{i(t - s)} with r = 0.5 is critical at (s, t)
    let (s, t) = (0.4f64, 1.3f64);
    let l = num_complex::Complex64::from_polar(0.5, t - s);
    let slope = format!("{}{:+}i", l.re, l.im);
    let o = crdual(&["wall", "--catalog", "clifford-torus", "--at", &format!("{s},{t}"), "--slope", &slope]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("jump by two: true"));
}

#[test]
fn threads_flag() {
    let o = crdual(&["--threads", "2", "angle", "--catalog", "r2", "--at", "0.1,0.2"]);
    assert!(o.status.success());
}
