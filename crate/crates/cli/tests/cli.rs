use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use qtm_cli::cell::{
    build_cell, cell_labels, chain_cells, undirected_morphism, undirected_qta, Cell, ChainOptions,
    Rule, Transition,
};
use qtm_cli::file::{from_json, parse_automaton, to_json, write_automaton, Automaton, Labels};
use qtm_cli::simulate::{basis_state, simulate};
use qtm_cli::CliError;
use qtm_core::dqta::{identity_automaton, make_dqta, UnitaryDqta};
use qtm_core::intcat::{int_compose, Int0Morphism, Qta};
use qtm_core::linalg::{isometry_defect, random_unitary, sum_swap, unitarity_defect, Operator};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn qtm(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qtm"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn shipped() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(data(""))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    assert!(files.len() >= 5);
    files
}

fn random_cell(states: usize, bits: u32, seed: u64) -> Cell {
    let n = (1usize << bits) * 2 * states;
    let m = random_unitary(n, seed);
    let rows = (0..n)
        .map(|i| (0..n).map(|j| [m.get(i, j).re, m.get(i, j).im]).collect())
        .collect();
    build_cell(states, bits, &Rule::Matrix(rows)).unwrap()
}

#[test]
fn shipped_files_round_trip() {
    for path in shipped() {
        let a = parse_automaton(&path).unwrap();
        let text = to_json(&a);
        let back = from_json(&text, &path).unwrap();
        assert_eq!(back, a, "{}", path.display());
        assert_eq!(to_json(&back), text);
    }
}

#[test]
fn identity_survives_a_write() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("id.dqta");
    let a = Automaton::Dqta {
        t: identity_automaton(3),
        labels: None,
    };
    write_automaton(&a, &path).unwrap();
    assert_eq!(parse_automaton(&path).unwrap(), a);
}

#[test]
fn awkward_decimals_round_trip_exactly() {
    let m = random_unitary(4, 77);
    let a = Automaton::Qta {
        q: Qta::new(2, 2, m).unwrap(),
        labels: Some(vec!["x".into(), "y".into()]),
    };
    let back = from_json(&to_json(&a), Path::new("mem")).unwrap();
    assert_eq!(back, a);
}

#[test]
fn non_isometric_file_reports_its_defect() {
    let text = r#"{"kind":"dqta","h":1,"k":1,"l":2,"matrix":[[[1,0]],[[1,0]]]}"#;
    match from_json(text, Path::new("bad")) {
        Err(CliError::Core(qtm_core::Error::NotIsometry { defect })) => assert_eq!(defect, 1.0),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn qta_file_must_be_square() {
    let text = r#"{"kind":"qta","h":1,"k":2,"matrix":[[[1,0],[0,0]]]}"#;
    let err = from_json(text, Path::new("q")).unwrap_err();
    assert!(err.to_string().contains("rows"), "{err}");
}

#[test]
fn malformed_file_points_at_the_line() {
    let text = "{\"kind\":\"qta\",\n\"h\": one}";
    match from_json(text, Path::new("m.qta")) {
        Err(CliError::Malformed { line, .. }) => assert_eq!(line, 2),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn cell_dimensions() {
    let c = build_cell(2, 3, &Rule::identity()).unwrap();
    assert_eq!((c.t.h(), c.t.k(), c.t.l()), (8, 4, 4));
    assert_eq!(c.labels.input, vec!["(L,1)", "(L,2)", "(R,1)", "(R,2)"]);
    assert_eq!(c.t.tau(), &Operator::identity(32));
    assert_eq!(isometry_defect(c.t.tau()), 0.0);
}

#[test]
fn rule_tables_must_be_bijective() {
    let bounce = Rule::from_json(&fs::read_to_string(data("rules/bounce.json")).unwrap()).unwrap();
    let c = build_cell(2, 1, &bounce).unwrap();
    // (R,1) reading 1 leaves as (L,1) having written 0
    let src = 4 + 2;
    let dst = 0;
    assert_eq!(c.t.tau().get(dst, src).re, 1.0);

    let clash = Rule::Transitions(vec![Transition {
        from: "(R,1)".into(),
        read: 0,
        to: "(L,1)".into(),
        write: 0,
    }]);
    let err = build_cell(2, 1, &clash).unwrap_err();
    assert!(err.to_string().contains("not a bijection"), "{err}");
}

#[test]
fn undirected_cell_is_eight_by_eight() {
    let c = build_cell(2, 1, &Rule::identity()).unwrap();
    let (q, names) = undirected_qta(&c.t, &c.labels).unwrap();
    assert_eq!(q.tau().shape(), (8, 8));
    assert_eq!(names, vec!["left,1", "left,2", "right,1", "right,2"]);
    assert!(unitarity_defect(q.tau()) <= 1e-9);
    let r = random_cell(2, 1, 5);
    let (q, _) = undirected_qta(&r.t, &r.labels).unwrap();
    assert!(unitarity_defect(q.tau()) <= 1e-9);
}

#[test]
fn chain_of_one_is_the_cell() {
    let c = random_cell(2, 1, 3);
    let one = chain_cells(&c, 1, ChainOptions::default()).unwrap();
    assert_eq!(one, c);
}

#[test]
fn chained_cells_stay_unitary() {
    let c = random_cell(2, 1, 4);
    let seg = chain_cells(&c, 3, ChainOptions::default()).unwrap();
    assert_eq!((seg.t.h(), seg.t.k(), seg.t.l()), (8, 4, 4));
    assert_eq!(seg.labels, c.labels);
    assert!(isometry_defect(seg.t.tau()) <= 1e-8);
}

/// Chaining then reading the segment as a morphism agrees with composing the
/// two cell morphisms in Int₀.
#[test]
fn chaining_commutes_with_int_composition() {
    for seed in [1u64, 2, 3] {
        let c = random_cell(2, 1, seed);
        let seg = chain_cells(&c, 2, ChainOptions::default()).unwrap();
        let lhs = undirected_morphism(&seg.t, &seg.labels).unwrap();
        let f = undirected_morphism(&c.t, &c.labels).unwrap();
        let rhs = int_compose(&f, &f).unwrap();
        assert!(lhs.distance(&rhs) <= 1e-7, "seed {seed}: {}", lhs.distance(&rhs));
    }
}

#[test]
fn mirrored_chain_is_the_chain_of_the_swapped_cell() {
    let c = random_cell(1, 1, 8);
    let swapped = Cell {
        t: c.t.clone(),
        labels: Labels::shared(vec!["(R,1)".into(), "(L,1)".into()]),
    };
    let mirrored = chain_cells(&c, 2, ChainOptions { mirror: true, ring: false }).unwrap();
    let plain = chain_cells(&swapped, 2, ChainOptions::default()).unwrap();
    assert_eq!(mirrored.t, plain.t);
}

#[test]
fn ring_closes_every_wire() {
    let c = random_cell(1, 1, 6);
    let ring = chain_cells(&c, 2, ChainOptions { ring: true, mirror: false }).unwrap();
    assert_eq!((ring.t.h(), ring.t.k(), ring.t.l()), (4, 0, 0));
    assert!(ring.labels.input.is_empty());
}

#[test]
fn unlabeled_cells_cannot_be_chained() {
    let c = Cell {
        t: UnitaryDqta::new(make_dqta(1, 2, 2, random_unitary(2, 1)).unwrap()).unwrap(),
        labels: Labels::shared(vec!["a".into(), "b".into()]),
    };
    assert!(chain_cells(&c, 2, ChainOptions::default()).is_err());
}

#[test]
fn swap_carrier_moves_the_particle() {
    let id = Int0Morphism::identity(1);
    let q = qtm_core::intcat::name_of(&id);
    assert_eq!(q.tau(), &sum_swap(1, 1));
    let trace = simulate(&q, basis_state(&q, 0).unwrap(), 4, None).unwrap();
    for (s, row) in trace.masses.iter().enumerate() {
        let expected = if s % 2 == 0 { [1.0, 0.0] } else { [0.0, 1.0] };
        assert_eq!(row, &expected);
    }
    assert!(trace.total_norm.iter().all(|&n| n == 1.0));
}

#[test]
fn zero_steps_echo_the_start() {
    let q = match parse_automaton(&data("hadamard.qta")).unwrap() {
        Automaton::Qta { q, .. } => q,
        _ => unreachable!(),
    };
    let trace = simulate(&q, basis_state(&q, 2).unwrap(), 0, None).unwrap();
    assert_eq!(trace.masses, vec![vec![0.0, 0.0, 1.0, 0.0]]);
}

#[test]
fn simulation_conserves_norm_on_shipped_qtas() {
    for path in shipped() {
        let Automaton::Qta { q, .. } = parse_automaton(&path).unwrap() else {
            continue;
        };
        for start in 0..q.n() {
            let trace = simulate(&q, basis_state(&q, start).unwrap(), 100, None).unwrap();
            assert!(trace.max_norm_deviation() <= 1e-9, "{}", path.display());
        }
    }
}

#[test]
fn unnormalized_start_is_rejected() {
    let q = Qta::new(1, 2, sum_swap(1, 1)).unwrap();
    let v = basis_state(&q, 0).unwrap() * num_complex::Complex64::new(2.0, 0.0);
    assert!(simulate(&q, v, 1, None).is_err());
}

#[test]
fn cell_labels_are_one_based() {
    assert_eq!(cell_labels(1), vec!["(L,1)", "(R,1)"]);
}

#[test]
fn exit_codes() {
    let (code, out, _) = qtm(&["axioms", "--instances", "0"]);
    assert_eq!(code, 0);
    assert!(out.contains("law=schur-isometry instances=0 max_violation=0.0000000000000000e0 pass=true"));

    let (code, _, err) = qtm(&["frobnicate"]);
    assert_eq!(code, 2);
    assert!(err.contains("Usage"), "{err}");
    let (code, _, _) = qtm(&["validate", "--bogus", "x"]);
    assert_eq!(code, 2);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.dqta");
    fs::write(&bad, r#"{"kind":"dqta","h":1,"k":1,"l":1,"matrix":[[[2,0]]]}"#).unwrap();
    let (code, _, err) = qtm(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("defect"), "{err}");
}

#[test]
fn feedback_of_the_swap_is_the_identity() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("id.qta");
    let (code, _, _) = qtm(&[
        "feedback",
        data("swap.qta").to_str().unwrap(),
        "--u",
        "1",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    match parse_automaton(&out).unwrap() {
        Automaton::Qta { q, .. } => assert_eq!(q.tau(), &Operator::identity(1)),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn bidir_commands() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("u.qta");
    let cell = data("cell.dqta");
    let (code, _, _) = qtm(&["bidir", cell.to_str().unwrap(), "--undirected", "-o", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(parse_automaton(&out).unwrap().tau().shape(), (8, 8));
    assert_eq!(fs::read_to_string(&out).unwrap(), fs::read_to_string(data("cell_undirected.qta")).unwrap());

    // t ⊞ t† doubles the state and names both interfaces
    let (code, _, _) = qtm(&["bidir", cell.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let a = parse_automaton(&out).unwrap();
    assert_eq!((a.h(), a.tau().shape()), (4, (32, 32)));
}

#[test]
fn compose_tensor_chain_and_simulate_commands() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let cell = data("hadamard.dqta");
    let cell = cell.to_str().unwrap();
    assert_eq!(qtm(&["compose", cell, cell, "-o", &p("cc")]).0, 0);
    assert_eq!(parse_automaton(Path::new(&p("cc"))).unwrap().h(), 4);
    assert_eq!(qtm(&["tensor", cell, cell, "-o", &p("tt")]).0, 0);
    let tt = parse_automaton(Path::new(&p("tt"))).unwrap();
    assert_eq!(tt.tau().shape(), (32, 32));
    assert_eq!(qtm(&["chain", cell, "--n", "2", "-o", &p("ch")]).0, 0);
    assert_eq!(qtm(&["chain", cell, "--n", "2", "--mirror", "-o", &p("mi")]).0, 0);
    assert_eq!(qtm(&["chain", cell, "--n", "2", "--ring", "-o", &p("ri")]).0, 0);
    assert_eq!(qtm(&["cell", "--states", "2", "--bits", "1", "-o", &p("c")]).0, 0);
    let (code, out, _) = qtm(&["simulate", data("hadamard.qta").to_str().unwrap(), "--steps", "3", "--start", "1"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("step\ttotal_norm\tleft,1"));
    assert_eq!(out.lines().count(), 1 + 4 + 1);
}
