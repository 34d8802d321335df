use std::f64::consts::{FRAC_PI_4, PI};
use std::path::Path;

use entdiss_cli::{parse_args, run, run_scenario};

fn csv_for(argv: &[&str]) -> String {
    let cfg = parse_args(std::iter::once("entdiss").chain(argv.iter().copied())).unwrap();
    run_scenario(&cfg).unwrap()
}

/// Data rows below the header, split into fields.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn header(csv: &str) -> &str {
    csv.lines().find(|l| !l.starts_with('#')).unwrap()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn fig1_peaks_at_quarter_period() {
    let csv = csv_for(&["fig1", "--t-max", "3.1416", "--steps", "200"]);
    assert_eq!(header(&csv), "t,concurrence");
    let rows = rows(&csv);
    assert_eq!(rows.len(), 201);
    let peak = rows
        .iter()
        .find(|r| (num(&r[0]) - FRAC_PI_4).abs() < 1e-4)
        .unwrap();
    assert!((num(&peak[1]) - 1.0).abs() <= 1e-6);
    for r in &rows {
        assert!((num(&r[1]) - (2.0 * num(&r[0])).sin().abs()).abs() <= 1e-6);
    }
}

#[test]
fn fig1_sign_does_not_change_concurrence() {
    let plus = csv_for(&["fig1", "--a", "0.2", "--b", "0.2"]);
    let minus = csv_for(&["fig1", "--a", "0.2", "--b", "0.2", "--sign", "-1"]);
    assert_eq!(rows(&plus), rows(&minus));
    assert!(minus.contains("exp(-i t H)"));
}

#[test]
fn fig2_is_exponential() {
    let csv = csv_for(&["fig2", "--t-max", "5", "--steps", "100"]);
    let rows = rows(&csv);
    let at_one = rows.iter().find(|r| num(&r[0]) == 1.0).unwrap();
    assert!((num(&at_one[1]) - 0.367879).abs() <= 1e-6);
    for r in &rows {
        assert!((num(&r[1]) - (-num(&r[0])).exp()).abs() <= 1e-6);
    }
}

#[test]
fn fig_nogo_decays_for_every_coupling() {
    let csv = csv_for(&["fig-nogo"]);
    assert_eq!(header(&csv), "y,t,concurrence,bloch_norm");
    let rows = rows(&csv);
    assert_eq!(rows.len(), 3 * 201);
    for y in [0.5, 1.0, 5.0] {
        let last = rows.iter().rfind(|r| num(&r[0]) == y).unwrap();
        assert_eq!(num(&last[1]), 20.0);
        assert!(num(&last[2]) < 1e-6 && num(&last[3]) < 1e-6, "{last:?}");
    }
}

#[test]
fn fig4_strong_feedback_cell() {
    let csv = csv_for(&["fig4", "--m-max", "200", "--f-max", "200", "--points", "81"]);
    assert_eq!(header(&csv), "m,f,C_ss,log10_one_minus_C");
    let rows = rows(&csv);
    assert_eq!(rows.len(), 81 * 81);
    // the log grid has no node at exactly 100; take the diagonal cell nearest to it
    let cell = rows
        .iter()
        .filter(|r| r[0] == r[1])
        .min_by(|a, b| {
            (num(&a[0]) - 100.0)
                .abs()
                .total_cmp(&(num(&b[0]) - 100.0).abs())
        })
        .unwrap();
    assert!((num(&cell[0]) - 100.0).abs() < 5.0);
    assert!(num(&cell[2]) >= 0.99, "{cell:?}");
    assert!((num(&cell[3]) - (1.0 - num(&cell[2])).log10()).abs() < 1e-6);
}

#[test]
fn steady_methods_agree() {
    let csv = csv_for(&[
        "steady", "--m", "1.5", "--f", "0.7", "--mu", "0.3", "--gamma", "0.4",
    ]);
    let rows = rows(&csv);
    let methods: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(methods, ["closed_form", "subspace", "full"]);
    for col in 1..6 {
        for r in &rows[1..] {
            assert!((num(&r[col]) - num(&rows[0][col])).abs() <= 1e-8);
        }
    }
    let with_y = csv_for(&["steady", "--m", "1", "--f", "1", "--y", "0.5"]);
    assert_eq!(rows_of(&with_y), ["subspace", "full"]);
}

fn rows_of(csv: &str) -> Vec<String> {
    rows(csv).into_iter().map(|r| r[0].clone()).collect()
}

#[test]
fn evolve_relaxes_to_steady_state() {
    let args = ["--m", "2", "--f", "3", "--gamma", "1"];
    let evolve = csv_for(&[&["evolve", "--t-max", "15"][..], &args].concat());
    let steady = csv_for(&[&["steady"][..], &args].concat());
    let last = rows(&evolve).pop().unwrap();
    let closed = &rows(&steady)[0];
    assert_eq!(header(&evolve), "t,concurrence,purity,sx,sy,sz");
    for col in 1..6 {
        assert!((num(&last[col]) - num(&closed[col])).abs() <= 1e-8);
    }
}

#[test]
fn sweep_matches_closed_form_at_zero_y() {
    let csv = csv_for(&[
        "sweep", "--m-max", "4", "--f-max", "4", "--points", "4", "--mu", "0.5",
    ]);
    for r in rows(&csv) {
        let (m, f) = (num(&r[0]), num(&r[1]));
        let c = entdiss::feedback::closed_form_concurrence(m, f, 0.5, 1.0);
        assert!((num(&r[2]) - c).abs() <= 1e-8);
    }
}

#[test]
fn config_file_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(
        &path,
        "# feedback run\nm = 1\nf = 4 # strong\nscenario = steady\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let cfg = parse_args(["entdiss", "steady", "--config", p, "--m", "2"]).unwrap();
    assert_eq!((cfg.m, cfg.f), (2.0, 4.0));
    assert!(parse_args(["entdiss", "fig1", "--config", p]).is_err());

    std::fs::write(&path, "m = 1\nwidth = 3\n").unwrap();
    let err = parse_args(["entdiss", "steady", "--config", p]).unwrap_err();
    assert!(err.to_string().contains("width"));
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.csv");
    let o = out.to_str().unwrap();
    assert_eq!(run(["entdiss", "fig2", "--steps", "10", "--out", o]), 0);
    assert!(std::fs::read_to_string(&out)
        .unwrap()
        .contains("t,concurrence"));
    assert_eq!(run(["entdiss", "steady", "--m", "-1"]), 1);
    assert_eq!(
        run(["entdiss", "steady", "--config", "/nonexistent/file"]),
        1
    );
    assert_eq!(run(["entdiss", "bogus"]), 1);
    // f = y = 0 leaves the population difference undamped
    assert_eq!(
        run(["entdiss", "steady", "--m", "1", "--f", "0", "--out", o]),
        2
    );
    let missing_dir = Path::new(o).join("nested").join("x.csv");
    assert_eq!(
        run([
            "entdiss",
            "fig1",
            "--steps",
            "2",
            "--out",
            missing_dir.to_str().unwrap()
        ]),
        1
    );
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for path in [&a, &b] {
        let code = run([
            "entdiss",
            "fig4",
            "--points",
            "9",
            "--mu",
            "1",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let t = PI.to_string();
    assert_eq!(
        csv_for(&["evolve", "--t-max", &t, "--m", "1", "--f", "1"]),
        csv_for(&["evolve", "--t-max", &t, "--m", "1", "--f", "1"])
    );
}
