//! C ABI over the `gtnn` crate.
//!
//! Every fallible function returns a [`GtnnStatus`]; on failure the message
//! is available from [`gtnn_last_error`] on the same thread. Datasets and
//! models are opaque handles released with their `_free` functions.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use gtnn::cli::{EDGES_FILE, NODES_FILE, SPLITS_FILE};
use gtnn::config;
use gtnn::curriculum::{lambert_w0, sigma_star, trend_delta_of};
use gtnn::graphstore::{load_graph, read_splits, Graph, SplitSet};
use gtnn::model::Checkpoint;
use gtnn::trainer::{self, Scorer, TrainConfig};
use gtnn::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GtnnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Domain = 5,
    Training = 6,
    Panic = 7,
}

/// Loaded graph and splits.
pub struct GtnnDataset {
    graph: Graph,
    splits: SplitSet,
}

/// Trained or loaded model.
pub struct GtnnModel {
    checkpoint: Checkpoint,
    test_f1: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> GtnnStatus {
    match e {
        Error::Io { .. } => GtnnStatus::Io,
        Error::Parse { .. } | Error::Json(_) | Error::Checkpoint(_) => GtnnStatus::Parse,
        Error::Domain(_) => GtnnStatus::Domain,
        Error::Diverged { .. } | Error::NonFiniteGradient(_) | Error::Sampling(_) => {
            GtnnStatus::Training
        }
        _ => GtnnStatus::InvalidArgument,
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), (GtnnStatus, String)>) -> GtnnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GtnnStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            GtnnStatus::Panic
        }
    }
}

fn lift<T>(r: gtnn::Result<T>) -> Result<T, (GtnnStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(name: &str) -> (GtnnStatus, String) {
    (GtnnStatus::NullPointer, format!("{name} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, (GtnnStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (GtnnStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &str) -> Result<(), (GtnnStatus, String)> {
    if out.is_null() {
        return Err(null(name));
    }
    *out = value;
    Ok(())
}

/// Message of the last failed call on this thread; empty if none. Valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gtnn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Principal branch of the Lambert W function.
///
/// # Safety
/// `out` must be valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn gtnn_lambert_w0(x: f64, out: *mut f64) -> GtnnStatus {
    guard(|| write_out(out, lift(lambert_w0(x))?, "out"))
}

/// Closed-form curriculum confidence for one sample.
///
/// # Safety
/// `out` must be valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn gtnn_sigma_star(
    loss: f64,
    tau: f64,
    delta: f64,
    alpha: f64,
    lambda: f64,
    out: *mut f64,
) -> GtnnStatus {
    guard(|| {
        if !(lambda > 0.0)
            || !loss.is_finite()
            || !tau.is_finite()
            || !delta.is_finite()
            || !alpha.is_finite()
        {
            return Err((
                GtnnStatus::InvalidArgument,
                "arguments must be finite with lambda > 0".into(),
            ));
        }
        write_out(out, sigma_star(loss, tau, delta, alpha, lambda), "out")
    })
}

/// Trend statistic of a loss history, oldest first.
///
/// # Safety
/// `losses` must point to `len` readable doubles (or be null with `len == 0`);
/// `out` must be valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn gtnn_trend_delta(
    losses: *const f64,
    len: usize,
    out: *mut f64,
) -> GtnnStatus {
    guard(|| {
        let xs: &[f64] = if len == 0 {
            &[]
        } else if losses.is_null() {
            return Err(null("losses"));
        } else {
            std::slice::from_raw_parts(losses, len)
        };
        write_out(out, trend_delta_of(xs), "out")
    })
}

/// Loads `nodes.tsv`, `edges.tsv` and `splits.tsv` from `dir`.
///
/// # Safety
/// `dir` must be a NUL-terminated string; `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn gtnn_dataset_load(
    dir: *const c_char,
    out: *mut *mut GtnnDataset,
) -> GtnnStatus {
    guard(|| {
        let dir = Path::new(str_arg(dir, "dir")?);
        let graph = lift(load_graph(&dir.join(NODES_FILE), &dir.join(EDGES_FILE)))?;
        let splits = lift(read_splits(&dir.join(SPLITS_FILE), &graph))?;
        let handle = Box::into_raw(Box::new(GtnnDataset { graph, splits }));
        write_out(out, handle, "out").inspect_err(|_| drop(Box::from_raw(handle)))
    })
}

/// Number of nodes in a dataset.
///
/// # Safety
/// `ds` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn gtnn_dataset_node_count(ds: *const GtnnDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.graph.len())
}

/// # Safety
/// `ds` must be null or a handle from `gtnn_dataset_load` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gtnn_dataset_free(ds: *mut GtnnDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Trains a model with `seed`. `config` holds optional `key = value`
/// lines and may be null.
///
/// # Safety
/// `ds` must be a live dataset handle; `config` null or NUL-terminated;
/// `out` valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn gtnn_train(
    ds: *const GtnnDataset,
    config: *const c_char,
    seed: u64,
    out: *mut *mut GtnnModel,
) -> GtnnStatus {
    guard(|| {
        let ds = ds.as_ref().ok_or_else(|| null("ds"))?;
        let mut cfg = TrainConfig::default();
        if !config.is_null() {
            for (k, v) in lift(config::parse_str(str_arg(config, "config")?))? {
                lift(config::apply(&mut cfg, &k, &v))?;
            }
        }
        cfg.seed = seed;
        let outcome = lift(trainer::train(&ds.graph, &ds.splits, &cfg, None))?;
        let handle = Box::into_raw(Box::new(GtnnModel {
            checkpoint: outcome.checkpoint,
            test_f1: outcome.test.f1,
        }));
        write_out(out, handle, "out").inspect_err(|_| drop(Box::from_raw(handle)))
    })
}

/// Test-split F1 recorded at training time; NaN for loaded models.
///
/// # Safety
/// `model` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn gtnn_model_test_f1(model: *const GtnnModel) -> f64 {
    model.as_ref().map_or(f64::NAN, |m| m.test_f1)
}

/// Link probabilities for `n` node-id pairs.
///
/// # Safety
/// `model` and `ds` must be live handles; `us` and `vs` must each hold `n`
/// NUL-terminated strings; `out` must have room for `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn gtnn_predict(
    model: *const GtnnModel,
    ds: *const GtnnDataset,
    us: *const *const c_char,
    vs: *const *const c_char,
    n: usize,
    out: *mut f64,
) -> GtnnStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        let ds = ds.as_ref().ok_or_else(|| null("ds"))?;
        if n == 0 {
            return Ok(());
        }
        if us.is_null() || vs.is_null() || out.is_null() {
            return Err(null("us, vs or out"));
        }
        let scorer = lift(Scorer::new(&model.checkpoint, &ds.graph, None))?;
        let out = std::slice::from_raw_parts_mut(out, n);
        for (i, slot) in out.iter_mut().enumerate() {
            let u = str_arg(*us.add(i), "us[i]")?;
            let v = str_arg(*vs.add(i), "vs[i]")?;
            *slot = lift(scorer.score(u, v))?;
        }
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn gtnn_model_save(
    model: *const GtnnModel,
    path: *const c_char,
) -> GtnnStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        lift(model.checkpoint.save(Path::new(str_arg(path, "path")?)))
    })
}

/// # Safety
/// `path` must be NUL-terminated; `out` valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn gtnn_model_load(
    path: *const c_char,
    out: *mut *mut GtnnModel,
) -> GtnnStatus {
    guard(|| {
        let checkpoint = lift(Checkpoint::load(Path::new(str_arg(path, "path")?)))?;
        let handle = Box::into_raw(Box::new(GtnnModel {
            checkpoint,
            test_f1: f64::NAN,
        }));
        write_out(out, handle, "out").inspect_err(|_| drop(Box::from_raw(handle)))
    })
}

/// # Safety
/// `model` must be null or a handle from `gtnn_train`/`gtnn_model_load` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gtnn_model_free(model: *mut GtnnModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}
