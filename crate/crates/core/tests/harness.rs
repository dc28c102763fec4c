use ldp_motifs::graph::gen_erdos_renyi;
use ldp_motifs::harness::{
    eps_grid, load_exact_cache, run_plan_on, trimmed_relative_error, write_csv, ExperimentPlan, Query,
    REPORT_COLUMNS,
};
use ldp_motifs::Error;

const PLAN: &str = "\
# small sweep
dataset = er:80:0.1
seed = 11
trials = 10
eps = 0.5, 2
nrep = 1, 2
query = walk-opt walk:3
query = pattern 0-1,1-2,1-3,3-4 root=3 distinct
query = rr walk:2
";

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let plan = ExperimentPlan::parse(PLAN).unwrap();
    let g = gen_erdos_renyi(80, 0.1, 11).unwrap();
    let one = in_pool(1, || run_plan_on(&plan, &g).unwrap());
    let four = in_pool(4, || run_plan_on(&plan, &g).unwrap());
    assert_eq!(one.len(), 3 * 2 * 2);
    for (a, b) in one.iter().zip(&four) {
        assert!(a.same_results(b), "{a:?} vs {b:?}");
        assert!(a.trimmed && a.rel_err_pct.is_some());
    }
    let mut buf = Vec::new();
    write_csv(&one, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next().unwrap(), REPORT_COLUMNS.join(","));
    assert_eq!(text.lines().count(), 13);
}

#[test]
fn exact_cache_is_written_and_reused() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("exact.txt");
    let text = format!(
        "dataset = er:40:0.2\ntrials = 3\neps = 1\nquery = path path:3\nquery = star star:2\nexact_cache = {}\n",
        cache.display()
    );
    let plan = ExperimentPlan::parse(&text).unwrap();
    let g = gen_erdos_renyi(40, 0.2, 0).unwrap();
    let rows = run_plan_on(&plan, &g).unwrap();
    let stored = load_exact_cache(&cache).unwrap();
    assert_eq!(stored.len(), 2);
    assert_eq!(stored["path path:3"], rows[0].exact);

    // A cached value wins over the oracle, so a planted count shows up.
    std::fs::write(&cache, "path path:3 = 7\nstar star:2 = NA\n").unwrap();
    let rows = run_plan_on(&plan, &g).unwrap();
    assert_eq!(rows[0].exact, Some(7));
    assert_eq!(rows[1].exact, None);
    assert!(rows[1].rel_err_pct.is_none());
}

#[test]
fn infeasible_oracle_becomes_na() {
    let plan = ExperimentPlan::parse("dataset = er:3000:0.05\ntrials = 1\neps = 1\nquery = path path:6\n").unwrap();
    let g = gen_erdos_renyi(3000, 0.05, 0).unwrap();
    let rows = run_plan_on(&plan, &g).unwrap();
    assert_eq!(rows[0].exact, None);
}

#[test]
fn plan_errors_name_the_line() {
    let err = ExperimentPlan::parse("dataset = er:10:0.5\ntrials = x\n").unwrap_err();
    assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    let err = ExperimentPlan::parse("dataset = er:10:0.5\neps = 1\n").unwrap_err();
    assert!(err.to_string().contains("no queries"), "{err}");
    assert!(Query::parse("path path:3 root=x").is_err());
    assert!(Query::parse("walk-opt walk:3 sideways").is_err());
}

#[test]
fn labels_and_grids() {
    let q = Query::parse("pattern 0-1,1-2,1-3 root=1 distinct").unwrap();
    assert_eq!(Query::parse(&q.label()).unwrap(), q);
    assert_eq!(eps_grid(0.5, 2.0, 0.5).unwrap(), vec![0.5, 1.0, 1.5, 2.0]);
    assert_eq!(eps_grid(0.1, 0.3, 0.1).unwrap(), vec![0.1, 0.2, 0.3]);
    assert!(eps_grid(1.0, 0.5, 0.1).is_err());
}

#[test]
fn trimming_drops_two_from_each_end() {
    let estimates = [0.0, 1.0, 9.0, 10.0, 10.0, 10.0, 10.0, 11.0, 100.0, 1000.0];
    let (pct, _, trimmed) = trimmed_relative_error(&estimates, 10).unwrap();
    assert!(trimmed);
    // Kept: 9, 10, 10, 10, 10, 11 -> errors 10%, 0, 0, 0, 0, 10%.
    assert!((pct - 20.0 / 6.0).abs() < 1e-9);
    let (_, _, trimmed) = trimmed_relative_error(&estimates[..9], 10).unwrap();
    assert!(!trimmed);
    assert!(trimmed_relative_error(&estimates, 0).is_none());
}
