//! Every trace under `counterexamples/` is replayed against the oracle.

use std::fs;
use std::path::Path;

use bufsched::{fifo_schedule, oracle_max_count, parse_instance, Instance};
use bufsched_harness::{compare, Algo, Scheduler};

fn fixtures() -> Vec<(String, Instance)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("counterexamples");
    let mut out: Vec<(String, Instance)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "txt"))
        .map(|p| {
            let text = fs::read_to_string(&p).unwrap();
            (p.display().to_string(), parse_instance(&text).unwrap())
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

#[test]
fn fixtures_match_the_oracle() {
    let uniform: Vec<&dyn Scheduler> = vec![&Algo::Dos, &Algo::Ts, &Algo::GreedyTs];
    let fixtures = fixtures();
    assert!(!fixtures.is_empty());
    for (path, inst) in fixtures {
        let report = compare(&inst, &uniform, None).unwrap();
        assert!(report.matched, "{path}: {report:?}");
        if inst.num_buffers() == 1 {
            let fifo = fifo_schedule(&inst).unwrap();
            assert_eq!(fifo.len(), oracle_max_count(&inst).unwrap(), "{path}");
        }
    }
}
