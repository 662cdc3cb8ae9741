use std::collections::BTreeSet;

use stabilis::event_log::{read_csv_log_from_reader, LabelCondition, LabelingRule};
use stabilis::experiment::{
    evaluate_on_test, prepare, run_search, Approach, Classifiers, ParamDistribution, PipelineOptions, PrepConfig,
    SearchOptions, SearchScope, Selection, StrategyKind, TrainedApproach, Truncation,
};
use stabilis::forest::{ModelParams, RFParams};
use stabilis::synth::{raw_schema, signal_log, write_raw_csv, SignalLogSpec, LABEL_ATTRIBUTE};

fn small_log_csv() -> Vec<u8> {
    let log = signal_log(&SignalLogSpec {
        n_cases: 240,
        seed: 3,
        ..SignalLogSpec::default()
    });
    let mut buf = Vec::new();
    write_raw_csv(&log, &raw_schema(), &mut buf).unwrap();
    buf
}

fn prepared() -> stabilis::experiment::PreparedData {
    let log = read_csv_log_from_reader(&small_log_csv()[..], &raw_schema()).unwrap();
    let config = PrepConfig {
        labeling: Some(LabelingRule::new(LabelCondition::ExternalColumn {
            attribute: LABEL_ATTRIBUTE.into(),
        })),
        truncation: Truncation::Auto,
        ..PrepConfig::default()
    };
    prepare(&log, &config).unwrap()
}

fn quick_options(approach: Approach, strategy: StrategyKind, max_len: usize) -> SearchOptions {
    let mut options = SearchOptions::new(approach, strategy, PipelineOptions::new(max_len), 5);
    options.iterations = 3;
    options
        .space
        .params
        .insert("n_estimators".into(), ParamDistribution::UniformInt { low: 10, high: 20 });
    options
}

#[test]
fn label_column_never_becomes_a_feature() {
    let prep = prepared();
    assert!(!prep.train.attributes.case.contains_key(LABEL_ATTRIBUTE));
    let params = ModelParams::Rf(RFParams {
        n_estimators: 10,
        max_features: 0.5,
        seed: 1,
    });
    let model = TrainedApproach::train(Approach::RfAgg, &params, &prep.train, &PipelineOptions::new(prep.trunc_length))
        .unwrap();
    let Classifiers::Single(bucket) = &model.classifiers else { panic!("single classifier expected") };
    assert!(bucket.encoder.columns().iter().all(|c| !c.contains(LABEL_ATTRIBUTE)));
}

#[test]
fn vocabulary_comes_from_training_data_only() {
    let prep = prepared();
    let train_levels: BTreeSet<&str> = prep
        .train
        .traces
        .iter()
        .flat_map(|t| t.events.iter().map(|e| e.activity.as_str()))
        .collect();
    let params = ModelParams::Rf(RFParams {
        n_estimators: 5,
        max_features: 0.5,
        seed: 1,
    });
    let model =
        TrainedApproach::train(Approach::RfIdxPad, &params, &prep.train, &PipelineOptions::new(prep.trunc_length))
            .unwrap();
    let Classifiers::Single(bucket) = &model.classifiers else { panic!() };
    for level in &bucket.encoder.vocabulary.activity {
        assert!(train_levels.contains(level.as_str()) || level == "__other__", "{level}");
    }
}

#[test]
fn search_is_deterministic_and_model_round_trips() {
    let prep = prepared();
    let options = quick_options(Approach::XgbAgg, StrategyKind::Combined5Run, prep.trunc_length);
    let (outcome, model) = run_search(&prep.train, &options).unwrap();
    let (again, _) = run_search(&prep.train, &options).unwrap();
    assert_eq!(outcome, again);
    assert_eq!(outcome.candidates.len(), 3);
    assert!(outcome.candidates.iter().all(|c| c.score.as_ref().unwrap().run_aucs.len() == 5));

    let restored = TrainedApproach::from_json(&model.to_json().unwrap()).unwrap();
    let a = evaluate_on_test(&model, &prep.test, &[0.5]).unwrap();
    let b = evaluate_on_test(&restored, &prep.test, &[0.5]).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.slices.len(), 2);
    assert!(a.slices[0].report.overall_auc > 0.7);
}

#[test]
fn per_bucket_search_selects_each_bucket() {
    let prep = prepared();
    let mut options = quick_options(Approach::RfIdxMul, StrategyKind::Auc1Run, prep.trunc_length);
    options.scope = SearchScope::PerBucket;
    let (outcome, model) = run_search(&prep.train, &options).unwrap();
    let Selection::PerBucket { iterations, .. } = &outcome.selection else { panic!("per-bucket selection expected") };
    assert!(!iterations.is_empty());
    assert_eq!(model.bucket_lengths().len(), prep.trunc_length);
    let eval = evaluate_on_test(&model, &prep.test, &[]).unwrap();
    assert_eq!(eval.slices.len(), 1);
}
