//! The random-walk/biased split must reconstruct raw mass changes exactly.
//! The oracle replays the trace through `update` and reads masses with the
//! set-based `mass` query, independently of the decomposition's bookkeeping.

use rcga_core::hierarchy::mass;
use rcga_core::instrumentation::{decompose, StepClass};
use rcga_core::{run, update, Exact, FrequencyMatrix, HierarchyTable, ObjectiveKind, RunConfig, Trace, TraceLevel};

fn replayed_masses(trace: &Trace, i: usize, values: std::ops::Range<usize>) -> Vec<Exact> {
    let Trace::Full { initial, records, .. } = trace else { panic!("full trace expected") };
    let mut m: FrequencyMatrix = initial.clone();
    let mut out = vec![mass(&m, i, values.clone()).unwrap()];
    for rec in records {
        update(&mut m, rec.winner(), rec.loser()).unwrap();
        out.push(mass(&m, i, values.clone()).unwrap());
    }
    out
}

fn full_run(objective: ObjectiveKind, seed: u64, iterations: u64) -> Trace {
    let config =
        RunConfig { n: 8, r: 10, k: 30, objective, max_iterations: iterations, seed, trace_level: TraceLevel::Full };
    run(&config).unwrap().trace.unwrap()
}

#[test]
fn partition_identity_holds_exactly() {
    let h = HierarchyTable::build(10).unwrap();
    for (objective, seed) in [(ObjectiveKind::GOneMax, 1), (ObjectiveKind::ROneMax, 2), (ObjectiveKind::GOneMax, 3)] {
        let trace = full_run(objective, seed, 600);
        let len = trace.len() as u64;
        for i in [0, 3, 7] {
            for kappa in [1, 2, 5] {
                let raw = replayed_masses(&trace, i, h.suffix(kappa));
                for (base, horizon) in [(0, len), (len / 3, len - len / 3), (5, 0)] {
                    let series = decompose(&trace, i, h.suffix(kappa), base, horizon).unwrap();
                    let rebuilt = series.reconstructed();
                    for s in 0..=horizon as usize {
                        assert_eq!(Exact::new(rebuilt[s], 30), raw[base as usize + s]);
                    }
                    let total: i64 = series.random_walk.iter().chain(&series.biased).map(|e| e.delta).sum();
                    assert_eq!(Exact::new(total, 30), raw[(base + horizon) as usize] - raw[base as usize]);

                    let mut times: Vec<u64> = series.random_walk_times().chain(series.biased_times()).collect();
                    assert!(series.random_walk_times().collect::<Vec<_>>().windows(2).all(|w| w[0] < w[1]));
                    assert!(series.biased_times().collect::<Vec<_>>().windows(2).all(|w| w[0] < w[1]));
                    times.sort_unstable();
                    assert_eq!(times, (base + 1..=base + horizon).collect::<Vec<_>>());

                    for e in &series.random_walk {
                        let t = e.time as usize;
                        assert_eq!(Exact::new(e.delta, 30), raw[t] - raw[t - 1]);
                    }
                }
            }
        }
    }
}

#[test]
fn neutral_trace_has_no_biased_events() {
    let h = HierarchyTable::build(10).unwrap();
    let trace = full_run(ObjectiveKind::Constant, 4, 400);
    let raw = replayed_masses(&trace, 2, h.suffix(1));
    let series = decompose(&trace, 2, h.suffix(1), 0, 400).unwrap();
    assert!(series.biased.is_empty());
    assert_eq!(series.filtered_change(StepClass::RandomWalk), raw);
    assert_eq!(series.filtered_change(StepClass::Biased), vec![raw[0]]);
}

#[test]
fn absorbed_rows_contribute_nothing() {
    let mut counts = vec![0u32; 8 * 10];
    for i in 0..8 {
        counts[i * 10 + (i % 10)] = 30;
    }
    let initial = FrequencyMatrix::from_counts(8, 10, 30, counts).unwrap();
    let objective = rcga_core::Objective::new(ObjectiveKind::GOneMax, 8, 10).unwrap();
    let mut rcga = rcga_core::Rcga::from_matrix(objective, initial.clone(), 8);
    let mut trace_records = Vec::new();
    for _ in 0..50 {
        let step = rcga.step().unwrap();
        trace_records.push(rcga_core::instrumentation::record_step(&objective, None, &step));
    }
    let trace = Trace::Full { objective, initial, records: trace_records };
    let series = decompose(&trace, 3, 2..10, 0, 50).unwrap();
    assert!(series.random_walk.iter().chain(&series.biased).all(|e| e.delta == 0));
}

#[test]
fn rejects_short_traces() {
    let trace = full_run(ObjectiveKind::Constant, 4, 10);
    assert!(decompose(&trace, 0, 0..5, 5, 10).is_err());
    assert!(decompose(&trace, 9, 0..5, 0, 10).is_err());
}
