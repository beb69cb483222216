use std::ffi::{CStr, CString};
use std::ptr;

use gtnn::cli::{EDGES_FILE, NODES_FILE, SPLITS_FILE};
use gtnn::graphstore::{
    positive_samples, sample_negatives, split, synth_graph, write_edges, write_nodes, write_splits,
    NegativeMode, SynthConfig,
};
use gtnn_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(gtnn_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn write_dataset(dir: &std::path::Path) {
    let g = synth_graph(&SynthConfig {
        n_nodes: 60,
        p_in: 0.15,
        ..Default::default()
    })
    .unwrap();
    let neg = sample_negatives(&g, &g.edge_list(), 3, NegativeMode::HardPlusRandom, 1).unwrap();
    let all: Vec<_> = positive_samples(&g).into_iter().chain(neg).collect();
    let s = split(&all, [0.8, 0.1, 0.1], 1).unwrap();
    write_nodes(&g, &dir.join(NODES_FILE)).unwrap();
    write_edges(&g, &dir.join(EDGES_FILE)).unwrap();
    write_splits(&s, &dir.join(SPLITS_FILE)).unwrap();
}

#[test]
fn scalar_functions() {
    let mut w = 0.0;
    assert_eq!(unsafe { gtnn_lambert_w0(1.0, &mut w) }, GtnnStatus::Ok);
    assert!((w - 0.5671432904097838).abs() < 1e-12);
    assert_eq!(unsafe { gtnn_lambert_w0(-1.0, &mut w) }, GtnnStatus::Domain);
    assert!(!last_error().is_empty());
    assert_eq!(
        unsafe { gtnn_lambert_w0(1.0, ptr::null_mut()) },
        GtnnStatus::NullPointer
    );

    let mut s = 0.0;
    assert_eq!(
        unsafe { gtnn_sigma_star(0.5, 0.5, 0.0, 0.3, 1.0, &mut s) },
        GtnnStatus::Ok
    );
    assert_eq!(s, 1.0);
    assert_eq!(
        unsafe { gtnn_sigma_star(0.5, 0.5, 0.0, 0.3, 0.0, &mut s) },
        GtnnStatus::InvalidArgument
    );

    let mut d = 0.0;
    let rising = [0.1, 0.2, 0.4];
    assert_eq!(
        unsafe { gtnn_trend_delta(rising.as_ptr(), rising.len(), &mut d) },
        GtnnStatus::Ok
    );
    assert_eq!(d, 1.0);
    assert_eq!(
        unsafe { gtnn_trend_delta(ptr::null(), 0, &mut d) },
        GtnnStatus::Ok
    );
    assert_eq!(d, 0.0);
    assert_eq!(
        unsafe { gtnn_trend_delta(ptr::null(), 2, &mut d) },
        GtnnStatus::NullPointer
    );
}

#[test]
fn train_predict_save_load() {
    let dir = tempfile::tempdir().unwrap();
    write_dataset(dir.path());
    let cdir = CString::new(dir.path().to_str().unwrap()).unwrap();
    let mut ds = ptr::null_mut();
    assert_eq!(
        unsafe { gtnn_dataset_load(cdir.as_ptr(), &mut ds) },
        GtnnStatus::Ok
    );
    assert!(unsafe { gtnn_dataset_node_count(ds) } > 0);

    let cfg = CString::new("train.max_epochs = 3\ncurriculum.mode = trend_sl\n").unwrap();
    let mut model = ptr::null_mut();
    assert_eq!(
        unsafe { gtnn_train(ds, cfg.as_ptr(), 5, &mut model) },
        GtnnStatus::Ok
    );
    let f1 = unsafe { gtnn_model_test_f1(model) };
    assert!((0.0..=1.0).contains(&f1));

    let ids = ["n0000", "n0002", "n0001"];
    let cs: Vec<CString> = ids.iter().map(|s| CString::new(*s).unwrap()).collect();
    let us = [cs[0].as_ptr(), cs[1].as_ptr()];
    let vs = [cs[1].as_ptr(), cs[2].as_ptr()];
    let mut probs = [0.0; 2];
    assert_eq!(
        unsafe { gtnn_predict(model, ds, us.as_ptr(), vs.as_ptr(), 2, probs.as_mut_ptr()) },
        GtnnStatus::Ok
    );
    assert!(probs.iter().all(|p| *p > 0.0 && *p < 1.0));

    let path = CString::new(dir.path().join("model.json").to_str().unwrap()).unwrap();
    assert_eq!(
        unsafe { gtnn_model_save(model, path.as_ptr()) },
        GtnnStatus::Ok
    );
    let mut loaded = ptr::null_mut();
    assert_eq!(
        unsafe { gtnn_model_load(path.as_ptr(), &mut loaded) },
        GtnnStatus::Ok
    );
    assert!(unsafe { gtnn_model_test_f1(loaded) }.is_nan());
    let mut again = [0.0; 2];
    assert_eq!(
        unsafe { gtnn_predict(loaded, ds, us.as_ptr(), vs.as_ptr(), 2, again.as_mut_ptr()) },
        GtnnStatus::Ok
    );
    assert_eq!(probs, again);

    let unknown = CString::new("nope").unwrap();
    let bad = [unknown.as_ptr()];
    assert_eq!(
        unsafe { gtnn_predict(model, ds, bad.as_ptr(), vs.as_ptr(), 1, again.as_mut_ptr()) },
        GtnnStatus::InvalidArgument
    );
    assert!(last_error().contains("nope"));

    unsafe {
        gtnn_model_free(model);
        gtnn_model_free(loaded);
        gtnn_dataset_free(ds);
        gtnn_model_free(ptr::null_mut());
        gtnn_dataset_free(ptr::null_mut());
    }
}

#[test]
fn load_errors_set_status_and_message() {
    let missing = CString::new("/nonexistent/gtnn").unwrap();
    let mut ds = ptr::null_mut();
    assert_eq!(
        unsafe { gtnn_dataset_load(missing.as_ptr(), &mut ds) },
        GtnnStatus::Io
    );
    assert!(ds.is_null());
    assert!(last_error().contains("nonexistent"));
    assert_eq!(
        unsafe { gtnn_dataset_load(ptr::null(), &mut ds) },
        GtnnStatus::NullPointer
    );
    let bad_cfg = CString::new("model.nope = 1").unwrap();
    let mut model = ptr::null_mut();
    assert_eq!(
        unsafe { gtnn_train(ptr::null(), bad_cfg.as_ptr(), 1, &mut model) },
        GtnnStatus::NullPointer
    );
}

#[test]
fn header_declares_every_export() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/gtnn.h")).unwrap();
    for name in [
        "gtnn_last_error",
        "gtnn_lambert_w0",
        "gtnn_sigma_star",
        "gtnn_trend_delta",
        "gtnn_dataset_load",
        "gtnn_dataset_node_count",
        "gtnn_dataset_free",
        "gtnn_train",
        "gtnn_model_test_f1",
        "gtnn_predict",
        "gtnn_model_save",
        "gtnn_model_load",
        "gtnn_model_free",
        "GTNN_STATUS_OK",
        "typedef struct GtnnModel GtnnModel",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
