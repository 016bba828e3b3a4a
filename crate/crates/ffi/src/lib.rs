//! C interface: opaque graph and model handles, integer status codes, and a
//! per-thread message for the most recent failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use boolgebra::aig::{check_equivalence, parse_aiger_auto, read_aiger_file, write_aiger_file, EquivalenceMode, Verdict};
use boolgebra::flow::{compare_baselines, run_flow, FlowConfig};
use boolgebra::predictor::{load_model, Model};
use boolgebra::transforms::{orchestrated_traversal, standalone_pass, DecisionVector, OpCode, TransformOptions};
use boolgebra::{Aig, Error};

/// Status returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BgStatus {
    BgOk = 0,
    BgErrNull = 1,
    BgErrParse = 2,
    BgErrConfig = 3,
    BgErrNotEquivalent = 4,
    BgErrIo = 5,
    BgErrModel = 6,
    BgErrPanic = 7,
    BgErrOther = 8,
}

/// Transform selector for [`bg_standalone`] and decision codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BgOp {
    BgRw = 0,
    BgRs = 1,
    BgRf = 2,
}

/// Opaque And-Inverter Graph.
pub struct BgAig(Aig);

/// Opaque trained predictor.
pub struct BgModel(Model);

/// Outcome of [`bg_flow`].
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct BgFlowResult {
    pub original_size: usize,
    pub best_size: usize,
    pub mean_size: f64,
    pub rw_size: usize,
    pub rs_size: usize,
    pub rf_size: usize,
    /// Candidates whose result failed verification and were dropped.
    pub rejected: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> BgStatus {
    match e {
        Error::Parse(_) | Error::Latches(_) | Error::Json(_) => BgStatus::BgErrParse,
        Error::Config(_) | Error::Shape(_) | Error::StalePlan { .. } => BgStatus::BgErrConfig,
        Error::Equivalence(_) => BgStatus::BgErrNotEquivalent,
        Error::Io(_) => BgStatus::BgErrIo,
        Error::Model(_) => BgStatus::BgErrModel,
        _ => BgStatus::BgErrOther,
    }
}

fn guard(f: impl FnOnce() -> Result<(), BgStatus>) -> BgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BgStatus::BgOk,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            BgStatus::BgErrPanic
        }
    }
}

fn lib<T>(r: boolgebra::Result<T>) -> Result<T, BgStatus> {
    r.map_err(|e| {
        let s = status_of(&e);
        set_error(e.to_string());
        s
    })
}

fn null() -> BgStatus {
    set_error("null pointer argument".into());
    BgStatus::BgErrNull
}

unsafe fn utf8<'a>(p: *const c_char) -> Result<&'a str, BgStatus> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("path is not valid UTF-8".into());
        BgStatus::BgErrConfig
    })
}

unsafe fn aig_ref<'a>(a: *const BgAig) -> Result<&'a Aig, BgStatus> {
    a.as_ref().map(|a| &a.0).ok_or_else(null)
}

unsafe fn give<T>(out: *mut *mut T, value: T) -> Result<(), BgStatus> {
    if out.is_null() {
        return Err(null());
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn op_of(op: BgOp) -> OpCode {
    match op {
        BgOp::BgRw => OpCode::Rw,
        BgOp::BgRs => OpCode::Rs,
        BgOp::BgRf => OpCode::Rf,
    }
}

/// Copies the message of the last failure on this thread into `buf`
/// (NUL-terminated, truncated to `len`). Returns the full message length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn bg_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Reads an AIGER file (ASCII or binary by extension).
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bg_aig_read(path: *const c_char, out: *mut *mut BgAig) -> BgStatus {
    guard(|| {
        let p = utf8(path)?;
        give(out, BgAig(lib(read_aiger_file(p))?))
    })
}

/// Parses AIGER bytes, detecting the format from the header.
///
/// # Safety
/// `data` must point to `len` readable bytes and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bg_aig_parse(data: *const u8, len: usize, out: *mut *mut BgAig) -> BgStatus {
    guard(|| {
        if data.is_null() {
            return Err(null());
        }
        let bytes = std::slice::from_raw_parts(data, len);
        give(out, BgAig(lib(parse_aiger_auto(bytes))?))
    })
}

/// Writes a graph; the extension picks ASCII (`.aag`) or binary.
///
/// # Safety
/// `aig` must come from this library and `path` be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn bg_aig_write(aig: *const BgAig, path: *const c_char) -> BgStatus {
    guard(|| lib(write_aiger_file(aig_ref(aig)?, utf8(path)?)))
}

/// # Safety
/// `aig` must be null or come from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bg_aig_free(aig: *mut BgAig) {
    if !aig.is_null() {
        drop(Box::from_raw(aig));
    }
}

/// Number of AND nodes, or 0 for a null handle.
///
/// # Safety
/// `aig` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn bg_aig_size(aig: *const BgAig) -> usize {
    aig.as_ref().map_or(0, |a| a.0.size())
}

/// # Safety
/// `aig` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn bg_aig_num_inputs(aig: *const BgAig) -> usize {
    aig.as_ref().map_or(0, |a| a.0.num_inputs())
}

/// # Safety
/// `aig` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn bg_aig_num_outputs(aig: *const BgAig) -> usize {
    aig.as_ref().map_or(0, |a| a.0.outputs().len())
}

/// Length of a decision vector for `aig`: one entry per node id except the
/// constant.
///
/// # Safety
/// `aig` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn bg_decision_len(aig: *const BgAig) -> usize {
    aig.as_ref().map_or(0, |a| DecisionVector::len_for(&a.0))
}

/// Runs one transform at every node; the result is a new graph.
///
/// # Safety
/// `aig` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bg_standalone(aig: *const BgAig, op: BgOp, out: *mut *mut BgAig) -> BgStatus {
    guard(|| {
        let (g, _) = lib(standalone_pass(aig_ref(aig)?, op_of(op), &TransformOptions::default()))?;
        give(out, BgAig(g))
    })
}

/// Runs the traversal selected by `codes` (0 rw, 1 rs, 2 rf), which must hold
/// [`bg_decision_len`] entries.
///
/// # Safety
/// `codes` must point to `len` readable bytes; other pointers as above.
#[no_mangle]
pub unsafe extern "C" fn bg_orchestrate(aig: *const BgAig, codes: *const u8, len: usize, out: *mut *mut BgAig) -> BgStatus {
    guard(|| {
        let g = aig_ref(aig)?;
        if codes.is_null() {
            return Err(null());
        }
        let ops = std::slice::from_raw_parts(codes, len)
            .iter()
            .map(|&c| OpCode::from_code(c).ok_or_else(|| Error::Config(format!("decision code {c} is not 0, 1 or 2"))))
            .collect::<boolgebra::Result<Vec<_>>>();
        let d = DecisionVector::new(lib(ops)?);
        let (h, _) = lib(orchestrated_traversal(g, &d, &TransformOptions::default()))?;
        give(out, BgAig(h))
    })
}

/// Compares two graphs: exhaustively when `random_words` is 0, otherwise on
/// `random_words * 64` seeded random patterns. Returns `BG_OK` when no
/// difference is found and `BG_ERR_NOT_EQUIVALENT` otherwise.
///
/// # Safety
/// Both handles must come from this library.
#[no_mangle]
pub unsafe extern "C" fn bg_equivalent(a: *const BgAig, b: *const BgAig, random_words: usize, seed: u64) -> BgStatus {
    guard(|| {
        let mode = if random_words == 0 {
            EquivalenceMode::Exhaustive
        } else {
            EquivalenceMode::Random { words: random_words, seed }
        };
        match lib(check_equivalence(aig_ref(a)?, aig_ref(b)?, mode))? {
            Verdict::Counterexample(_) => {
                set_error("graphs differ".into());
                Err(BgStatus::BgErrNotEquivalent)
            }
            _ => Ok(()),
        }
    })
}

/// # Safety
/// `path` must be NUL-terminated and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bg_model_load(path: *const c_char, out: *mut *mut BgModel) -> BgStatus {
    guard(|| {
        let (m, _) = lib(load_model(utf8(path)?))?;
        give(out, BgModel(m))
    })
}

/// # Safety
/// `model` must be null or come from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bg_model_free(model: *mut BgModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Sizes of the three standalone passes.
///
/// # Safety
/// `aig` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bg_baselines(aig: *const BgAig, out: *mut BgFlowResult) -> BgStatus {
    guard(|| {
        let g = aig_ref(aig)?;
        let out = out.as_mut().ok_or_else(null)?;
        let b = lib(compare_baselines(g, &TransformOptions::default()))?;
        *out = BgFlowResult { original_size: g.size(), best_size: b.min(), mean_size: b.min() as f64, rw_size: b.rw, rs_size: b.rs, rf_size: b.rf, rejected: 0 };
        Ok(())
    })
}

/// Samples `sample_count` decision vectors, keeps the `top_k` best scored by
/// `model`, evaluates and verifies them. When `best` is not null it receives
/// the best optimized graph.
///
/// # Safety
/// Handles must come from this library; `out` must be valid; `best` may be null.
#[no_mangle]
pub unsafe extern "C" fn bg_flow(
    aig: *const BgAig,
    model: *const BgModel,
    sample_count: usize,
    top_k: usize,
    seed: u64,
    out: *mut BgFlowResult,
    best: *mut *mut BgAig,
) -> BgStatus {
    guard(|| {
        let g = aig_ref(aig)?;
        let m = &model.as_ref().ok_or_else(null)?.0;
        let out = out.as_mut().ok_or_else(null)?;
        let mut cfg = FlowConfig { sample_count, top_k, ..FlowConfig::default() };
        cfg.sampler.seed = seed;
        let row = lib(run_flow(g, "design", m, &cfg))?;
        *out = BgFlowResult {
            original_size: row.orig_size,
            best_size: row.best_size(),
            mean_size: row.mean_size(),
            rw_size: row.baselines.rw,
            rs_size: row.baselines.rs,
            rf_size: row.baselines.rf,
            rejected: row.rejected,
        };
        if !best.is_null() {
            let h = match row.best() {
                Some(e) => lib(orchestrated_traversal(g, &e.decisions, &cfg.transforms))?.0,
                None => g.clone(),
            };
            give(best, BgAig(h))?;
        }
        Ok(())
    })
}
