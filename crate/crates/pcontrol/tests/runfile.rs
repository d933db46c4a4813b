use std::fs;
use std::io::Write;

use pcontrol::runfile::{load_run, load_runs, LoadOptions, RunHeader, RunKind, RunWriter};
use pcontrol::Error;
use pcontrol_core::ga::{run_search, GaConfig, TrialRecord};
use pcontrol_core::pulse::SpectralGrid;
use pcontrol_core::srs::{RamanTarget, SrsModelParams};
use pcontrol_core::Genome;
use proptest::prelude::*;

fn header(genes: usize, levels: u32, target: RamanTarget) -> RunHeader {
    let ga = GaConfig {
        genes,
        levels,
        population_size: 10,
        max_generations: 4,
        ..GaConfig::default()
    };
    RunHeader::new(RunKind::Full, target, ga, SpectralGrid::with_bins(genes), SrsModelParams::default())
}

fn write_run(path: &std::path::Path, genes: usize, levels: u32, target: RamanTarget, seed: u64) -> Vec<TrialRecord> {
    let mut h = header(genes, levels, target);
    h.ga.rng_seed = seed;
    h.seed = seed;
    let ga = h.ga;
    let mut w = RunWriter::create(path, h).unwrap();
    let mut copy = Vec::new();
    run_search(&ga, &|g: &Genome| g.genes().iter().map(|&x| x as f64).sum::<f64>() / 3.0, &mut copy).unwrap();
    for r in &copy {
        w.append_trial(r).unwrap();
    }
    copy
}

#[test]
fn write_then_read_back() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.runs");
    let written = write_run(&path, 6, 16, RamanTarget::Symmetric, 3);
    let run = load_run(&path, LoadOptions::default()).unwrap();
    assert_eq!(run.trials, written);
    assert_eq!(run.header, {
        let mut h = header(6, 16, RamanTarget::Symmetric);
        h.ga.rng_seed = 3;
        h.seed = 3;
        h
    });
    assert_eq!(run.dropped_line, None);
}

#[test]
fn many_records_parse() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.runs");
    let mut w = RunWriter::create(&path, header(25, 32, RamanTarget::Symmetric)).unwrap();
    for id in 0..2720u64 {
        w.append_trial(&TrialRecord {
            trial_id: id,
            generation: (id / 68) as u32,
            genome: Genome::new((0..25).map(|i| (i as u32 * 7 + id as u32) % 32).collect(), 32).unwrap(),
            fitness: id as f64 / 2720.0,
            parent_ids: if id >= 68 { vec![id - 68, id - 67] } else { vec![] },
            coefficients: vec![],
        })
        .unwrap();
    }
    drop(w);
    assert_eq!(load_run(&path, LoadOptions::default()).unwrap().trials.len(), 2720);
}

#[test]
fn truncated_final_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cut.runs");
    let written = write_run(&path, 5, 8, RamanTarget::Antisymmetric, 1);
    let mut text = fs::read_to_string(&path).unwrap();
    let lines = text.lines().count();
    // chop the last record in half, as an interrupted write would
    let keep = text.trim_end().rfind('\n').unwrap() + 1 + 20;
    text.truncate(keep);
    fs::write(&path, &text).unwrap();

    match load_run(&path, LoadOptions::default()) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, lines),
        other => panic!("{other:?}"),
    }
    let run = load_run(&path, LoadOptions { tolerate_truncation: true }).unwrap();
    assert_eq!(run.dropped_line, Some(lines));
    assert_eq!(run.trials, written[..written.len() - 1]);
}

#[test]
fn malformed_middle_line_names_its_number() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.runs");
    write_run(&path, 5, 8, RamanTarget::Symmetric, 1);
    let text = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines[3] = "{\"trial_id\": oops}";
    fs::write(&path, lines.join("\n") + "\n").unwrap();
    for tolerate in [false, true] {
        match load_run(&path, LoadOptions { tolerate_truncation: tolerate }) {
            Err(Error::Parse { line: 4, .. }) => {}
            other => panic!("{other:?}"),
        }
    }
}

#[test]
fn out_of_order_and_out_of_range_records_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("order.runs");
    write_run(&path, 5, 8, RamanTarget::Symmetric, 1);
    let text = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines.swap(2, 3);
    fs::write(&path, lines.join("\n") + "\n").unwrap();
    assert!(matches!(load_run(&path, LoadOptions::default()), Err(Error::Parse { line: 4, .. })));

    let mut f = fs::File::create(&path).unwrap();
    writeln!(f, "{}", serde_json::to_string(&header(3, 8, RamanTarget::Symmetric)).unwrap()).unwrap();
    writeln!(f, r#"{{"trial_id":0,"generation":0,"genes":[1,2,9],"fitness":0.5,"parent_ids":[]}}"#).unwrap();
    drop(f);
    assert!(matches!(load_run(&path, LoadOptions::default()), Err(Error::Parse { line: 2, .. })));
}

#[test]
fn merging_concatenates_and_checks_shape() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.runs");
    let b = dir.path().join("b.runs");
    let c = dir.path().join("c.runs");
    let ta = write_run(&a, 6, 16, RamanTarget::Symmetric, 1);
    let tb = write_run(&b, 6, 16, RamanTarget::Antisymmetric, 2);
    write_run(&c, 7, 16, RamanTarget::Antisymmetric, 2);
    let set = load_runs(&[&a, &b], LoadOptions::default()).unwrap();
    assert_eq!(set.len(), ta.len() + tb.len());
    assert_eq!(set.targets(), vec![RamanTarget::Symmetric, RamanTarget::Antisymmetric]);
    let tags: Vec<usize> = set.trials().map(|(i, _)| i).collect();
    assert_eq!(tags.iter().filter(|&&i| i == 1).count(), tb.len());
    assert!(matches!(load_runs(&[&a, &c], LoadOptions::default()), Err(Error::Incompatible(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn reals_round_trip_exactly(values in proptest::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 1..40)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.runs");
        let mut w = RunWriter::create(&path, header(3, 8, RamanTarget::Symmetric)).unwrap();
        for (i, v) in values.iter().enumerate() {
            w.append_trial(&TrialRecord {
                trial_id: i as u64,
                generation: 0,
                genome: Genome::new(vec![1, 2, 3], 8).unwrap(),
                fitness: *v,
                parent_ids: vec![],
                coefficients: vec![*v, -v],
            }).unwrap();
        }
        drop(w);
        let run = load_run(&path, LoadOptions::default()).unwrap();
        for (t, v) in run.trials.iter().zip(&values) {
            prop_assert_eq!(t.fitness.to_bits(), v.to_bits());
            prop_assert_eq!(t.coefficients[1].to_bits(), (-v).to_bits());
        }
    }
}
