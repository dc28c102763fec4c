//! Every example runs to completion.

macro_rules! example {
    ($name:ident, $file:literal) => {
        #[allow(dead_code)]
        #[path = $file]
        mod $name;

        #[test]
        fn $name() {
            $name::run().unwrap();
        }
    };
}

example!(load_and_generate, "../examples/load_and_generate.rs");
example!(tree_formulations, "../examples/tree_formulations.rs");
example!(exact_counts, "../examples/exact_counts.rs");
example!(walk_counting, "../examples/walk_counting.rs");
example!(path_counting, "../examples/path_counting.rs");
example!(pattern_counting, "../examples/pattern_counting.rs");
example!(star_counting, "../examples/star_counting.rs");
example!(rr_baseline, "../examples/rr_baseline.rs");
example!(error_decomposition, "../examples/error_decomposition.rs");
example!(epsilon_sweep, "../examples/epsilon_sweep.rs");
example!(transcript, "../examples/transcript.rs");
example!(privacy_accounting, "../examples/privacy_accounting.rs");
example!(network_simulator, "../examples/network_simulator.rs");
example!(desk_plan, "../examples/desk_plan.rs");
