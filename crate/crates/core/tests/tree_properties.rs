use proptest::prelude::*;
use slm::dft::{impurity, TargetView};
use slm::tree::{LeafValue, Node};
use slm::{
    fit_boost, fit_forest, generate, BoostConfig, Dataset, Executor, ForestConfig, Model,
    Prediction, SearchMode, SlmTree, Targets, TreeConfig,
};

fn node_impurity(ds: &Dataset, rows: &[usize]) -> f64 {
    match ds.targets() {
        Targets::Classes { labels, names } => {
            let l: Vec<usize> = rows.iter().map(|&r| labels[r]).collect();
            impurity(TargetView::Classes {
                labels: &l,
                n_classes: names.len(),
            })
        }
        Targets::Values(v) => {
            let v: Vec<f64> = rows.iter().map(|&r| v[r]).collect();
            impurity(TargetView::Values(&v))
        }
    }
}

/// Routes `rows` down the tree and checks sample conservation, the stored
/// impurity, strict loss improvement, leaf payloads and the depth bound.
fn check_node(ds: &Dataset, node: &Node, rows: &[usize], depth: usize, max_depth: usize) {
    assert_eq!(node.n_samples(), rows.len());
    match node {
        Node::Leaf(leaf) => match &leaf.value {
            LeafValue::Distribution(p) => {
                assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
            LeafValue::Mean(m) => {
                let v = ds.values().unwrap();
                let mean = rows.iter().map(|&r| v[r]).sum::<f64>() / rows.len() as f64;
                assert!((m - mean).abs() < 1e-9);
            }
        },
        Node::Split(s) => {
            assert!(depth < max_depth);
            assert_eq!(s.children.len(), s.splits.len() + 1);
            assert!((s.impurity - node_impurity(ds, rows)).abs() < 1e-9);
            assert!(s.loss < s.impurity, "loss {} vs impurity {}", s.loss, s.impurity);
            let mut parts = vec![Vec::new(); s.children.len()];
            for &r in rows {
                parts[s.route(ds.row(r))].push(r);
            }
            assert_eq!(parts.iter().map(Vec::len).sum::<usize>(), rows.len());
            for (child, part) in s.children.iter().zip(&parts) {
                assert!(!part.is_empty());
                check_node(ds, child, part, depth + 1, max_depth);
            }
        }
    }
}

fn configs() -> Vec<TreeConfig> {
    let mut out = Vec::new();
    for search in [SearchMode::Apso, SearchMode::Probabilistic] {
        out.push(TreeConfig {
            search,
            max_depth: 5,
            ..TreeConfig::default()
        });
    }
    out.push(TreeConfig {
        search: SearchMode::Probabilistic,
        prob: slm::ProbSearchParams {
            keep: 3,
            ..Default::default()
        },
        max_depth: 4,
        ..TreeConfig::default()
    });
    out
}

#[test]
fn structural_invariants_on_generated_data() {
    let exec = Executor::sequential();
    for name in ["circle-and-ring", "moons-2", "moons-4", "friedman1", "friedman3"] {
        let ds = generate(name, 300, 0.1, 11).unwrap();
        let rows: Vec<usize> = (0..ds.n_rows()).collect();
        for cfg in configs() {
            let tree = SlmTree::fit(&ds, &cfg, &exec).unwrap();
            check_node(&ds, &tree.root, &rows, 0, cfg.max_depth);
            assert!(tree.depth() <= cfg.max_depth);
        }
    }
}

#[test]
fn bootstrap_rows_are_conserved() {
    let ds = generate("moons-4", 200, 0.1, 2).unwrap();
    let rows: Vec<usize> = (0..200).map(|i| (i * 7) % 150).collect();
    let cfg = TreeConfig {
        max_depth: 4,
        ..TreeConfig::default()
    };
    let tree = SlmTree::build(&ds, &rows, &cfg, &Executor::sequential()).unwrap();
    check_node(&ds, &tree.root, &rows, 0, 4);
}

#[test]
fn deterministic_across_worker_counts() {
    let ds = generate("moons-4", 400, 0.15, 3).unwrap();
    for cfg in configs() {
        let a = SlmTree::fit(&ds, &cfg, &Executor::sequential()).unwrap();
        let b = SlmTree::fit(&ds, &cfg, &Executor::new(3).unwrap()).unwrap();
        let c = SlmTree::fit(&ds, &cfg, &Executor::sequential()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }
}

#[test]
fn zero_error_tree_recovers_training_labels() {
    let ds = generate("circle-and-ring", 200, 0.0, 4).unwrap();
    let cfg = TreeConfig {
        purity_tol: 0.0,
        min_split: 2,
        min_leaf: 1,
        max_depth: 30,
        ..TreeConfig::default()
    };
    let tree = SlmTree::fit(&ds, &cfg, &Executor::sequential()).unwrap();
    let labels = ds.labels().unwrap();
    for i in 0..ds.n_rows() {
        assert_eq!(tree.predict(ds.row(i)).unwrap(), Prediction::Class(labels[i]));
    }
}

#[test]
fn uniform_leaf_gives_even_distribution() {
    // Identical inputs with opposite labels cannot be separated.
    let ds = Dataset::new(
        vec![1.0, 1.0, 1.0, 1.0],
        2,
        vec!["a".into(), "b".into()],
        "class",
        Targets::Classes {
            labels: vec![0, 1],
            names: vec!["0".into(), "1".into()],
        },
    )
    .unwrap();
    let cfg = TreeConfig {
        min_split: 2,
        min_leaf: 1,
        ..TreeConfig::default()
    };
    let tree = SlmTree::fit(&ds, &cfg, &Executor::sequential()).unwrap();
    assert_eq!(tree.predict_proba(&[5.0, -5.0]).unwrap(), &[0.5, 0.5]);
    assert_eq!(tree.predict(&[0.0, 0.0]).unwrap(), Prediction::Class(0));
}

#[test]
fn forest_beats_its_median_tree_on_training_data() {
    let exec = Executor::sequential();
    let mut wins = 0;
    let seeds = 4;
    for seed in 0..seeds {
        let ds = generate("moons-4", 300, 0.25, seed).unwrap();
        let cfg = ForestConfig {
            n_trees: 9,
            tree: TreeConfig {
                max_depth: 4,
                ..TreeConfig::default()
            },
            seed,
            ..ForestConfig::default()
        };
        let forest = fit_forest(&ds, &cfg, &exec).unwrap();
        let mut tree_acc: Vec<f64> = forest
            .trees
            .iter()
            .map(|t| Model::from(t.clone()).evaluate(&ds).unwrap().value())
            .collect();
        tree_acc.sort_by(f64::total_cmp);
        let median = tree_acc[tree_acc.len() / 2];
        let acc = Model::from(forest).evaluate(&ds).unwrap().value();
        wins += usize::from(acc >= median);
    }
    assert_eq!(wins, seeds as usize);
}

#[test]
fn one_full_depth_residual_stage_fits_the_training_set() {
    let ds = generate("friedman1", 200, 0.0, 6).unwrap();
    let deep = TreeConfig {
        max_depth: 64,
        min_split: 2,
        min_leaf: 1,
        ..TreeConfig::default()
    };
    let cfg = BoostConfig {
        n_trees: 1,
        learning_rate: 1.0,
        tree: deep.clone(),
        seed: 0,
    };
    let boost = fit_boost(&ds, &cfg, &Executor::sequential()).unwrap();
    let base_only = boost.history[0];
    let fitted = boost.history[1];
    assert!(fitted < 0.05 * base_only, "{fitted} vs {base_only}");
    let single = SlmTree::fit(&ds, &deep, &Executor::sequential()).unwrap();
    let single_mse = Model::from(single).evaluate(&ds).unwrap().value();
    assert!(fitted <= single_mse + 1e-6, "{fitted} vs {single_mse}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn predictions_are_total(seed in 0u64..1000, xs in prop::collection::vec(-1e6..1e6f64, 2)) {
        let ds = generate("moons-4", 120, 0.2, seed).unwrap();
        let cfg = TreeConfig { max_depth: 4, seed, ..TreeConfig::default() };
        let tree = SlmTree::fit(&ds, &cfg, &Executor::sequential()).unwrap();
        let p = tree.predict_proba(&xs).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let Prediction::Class(c) = tree.predict(&xs).unwrap() else { panic!() };
        prop_assert!(c < 4);
        prop_assert!(p.iter().all(|&q| q <= p[c]));
    }

    #[test]
    fn boost_loss_never_increases(seed in 0u64..1000, multiclass in any::<bool>()) {
        let name = if multiclass { "moons-4" } else { "moons-2" };
        let ds = generate(name, 120, 0.3, seed).unwrap();
        let cfg = BoostConfig {
            n_trees: 4,
            tree: TreeConfig { max_depth: 2, ..BoostConfig::default().tree },
            seed,
            ..BoostConfig::default()
        };
        let m = fit_boost(&ds, &cfg, &Executor::sequential()).unwrap();
        prop_assert!(m.history.windows(2).all(|w| w[1] <= w[0]), "{:?}", m.history);
    }
}
