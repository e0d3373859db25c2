//! C ABI over `lsq-core`.
//!
//! Instances live behind opaque `LsqInstance` handles. Every fallible call
//! returns an `LsqStatus`; on failure `lsq_last_error_message` describes the
//! most recent error on the calling thread. Strings returned as `char *` are
//! owned by the caller and released with `lsq_string_free`. Strings returned as
//! `const char *` borrow from the handle and stay valid until it is freed.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lsq_core::idk::IdkOptions;
use lsq_core::instance::{parse_instance, serialize_instance};
use lsq_core::mrcr::TemplatedPool;
use lsq_core::report::score_output;
use lsq_core::suite::{generate_one, GenContext};
use lsq_core::textsim::similarity_ratio;
use lsq_core::{ContextBucket, HeuristicTokenizer, TaskInstance, TaskKind};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidUtf8 = 3,
    Generation = 4,
    Parse = 5,
    Score = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsqTask {
    LatentList = 0,
    Mrcr = 1,
    Idk = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsqBucket {
    B32K = 0,
    B128K = 1,
    B1M = 2,
}

impl From<LsqTask> for TaskKind {
    fn from(t: LsqTask) -> Self {
        match t {
            LsqTask::LatentList => TaskKind::LatentList,
            LsqTask::Mrcr => TaskKind::Mrcr,
            LsqTask::Idk => TaskKind::Idk,
        }
    }
}

impl From<TaskKind> for LsqTask {
    fn from(t: TaskKind) -> Self {
        match t {
            TaskKind::LatentList => LsqTask::LatentList,
            TaskKind::Mrcr => LsqTask::Mrcr,
            TaskKind::Idk => LsqTask::Idk,
        }
    }
}

impl From<LsqBucket> for ContextBucket {
    fn from(b: LsqBucket) -> Self {
        match b {
            LsqBucket::B32K => ContextBucket::B32K,
            LsqBucket::B128K => ContextBucket::B128K,
            LsqBucket::B1M => ContextBucket::B1M,
        }
    }
}

/// Opaque instance handle.
pub struct LsqInstance {
    inner: TaskInstance,
    id: CString,
    prompt: CString,
    ground_truth: CString,
}

impl LsqInstance {
    fn new(inner: TaskInstance) -> Result<Box<LsqInstance>, Failure> {
        let c = |s: &str| {
            CString::new(s)
                .map_err(|_| Failure(LsqStatus::InvalidArgument, "interior NUL byte".into()))
        };
        Ok(Box::new(LsqInstance {
            id: c(&inner.id)?,
            prompt: c(&inner.prompt)?,
            ground_truth: c(&inner.ground_truth)?,
            inner,
        }))
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(LsqStatus, String);

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LsqStatus {
    let outcome = catch_unwind(AssertUnwindSafe(f))
        .unwrap_or_else(|_| Err(Failure(LsqStatus::Panic, "internal panic".into())));
    match outcome {
        Ok(()) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            LsqStatus::Ok
        }
        Err(Failure(status, message)) => {
            let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
            LAST_ERROR.with(|e| *e.borrow_mut() = Some(message));
            status
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(LsqStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(LsqStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

unsafe fn handle<'a>(p: *const LsqInstance) -> Result<&'a LsqInstance, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(LsqStatus::NullPointer, "instance is null".into()))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(
            LsqStatus::NullPointer,
            "output pointer is null".into(),
        ));
    }
    out.write(value);
    Ok(())
}

fn owned_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure(LsqStatus::InvalidArgument, "interior NUL byte".into()))
}

/// Generates instance `index` of a suite with the given seed, using the
/// templated writing pool and the default tokenizer. Targets are drawn from
/// `[min_tokens, bucket max / 1.1]`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn lsq_generate(
    task: LsqTask,
    bucket: LsqBucket,
    seed: u64,
    index: u64,
    min_tokens: usize,
    out: *mut *mut LsqInstance,
) -> LsqStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure(
                LsqStatus::NullPointer,
                "output pointer is null".into(),
            ));
        }
        let bucket = ContextBucket::from(bucket);
        if min_tokens == 0 || min_tokens as f64 > bucket.max_tokens() as f64 / 1.1 {
            return Err(Failure(
                LsqStatus::InvalidArgument,
                format!("min_tokens {min_tokens} does not fit bucket {bucket}"),
            ));
        }
        let pool = TemplatedPool::default();
        let ctx = GenContext {
            seed,
            tokenizer: &HeuristicTokenizer,
            pool: &pool,
            min_tokens,
            idk: IdkOptions::default(),
        };
        let inst = generate_one(&ctx, task.into(), bucket, index)
            .map_err(|e| Failure(LsqStatus::Generation, e.to_string()))?;
        write_out(out, Box::into_raw(LsqInstance::new(inst)?))
    })
}

/// Parses one JSONL instance line.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lsq_instance_from_json(
    json: *const c_char,
    out: *mut *mut LsqInstance,
) -> LsqStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        let inst = parse_instance(text).map_err(|e| Failure(LsqStatus::Parse, e.to_string()))?;
        write_out(out, Box::into_raw(LsqInstance::new(inst)?))
    })
}

/// Serializes an instance to one JSON line. Free the result with `lsq_string_free`.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lsq_instance_to_json(
    inst: *const LsqInstance,
    out: *mut *mut c_char,
) -> LsqStatus {
    guard(|| {
        let inst = handle(inst)?;
        write_out(out, owned_string(serialize_instance(&inst.inner))?)
    })
}

/// # Safety
/// `inst` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lsq_instance_free(inst: *mut LsqInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lsq_instance_task(
    inst: *const LsqInstance,
    out: *mut LsqTask,
) -> LsqStatus {
    guard(|| write_out(out, handle(inst)?.inner.kind.into()))
}

/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lsq_instance_complexity(
    inst: *const LsqInstance,
    out: *mut u32,
) -> LsqStatus {
    guard(|| write_out(out, handle(inst)?.inner.complexity))
}

/// Prompt length recorded at generation time.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lsq_instance_prompt_tokens(
    inst: *const LsqInstance,
    out: *mut usize,
) -> LsqStatus {
    guard(|| {
        let tokens = handle(inst)?.inner.prompt_tokens().ok_or_else(|| {
            Failure(
                LsqStatus::InvalidArgument,
                "instance has no prompt_tokens".into(),
            )
        })?;
        write_out(out, tokens)
    })
}

/// Borrowed; null when `inst` is null.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lsq_instance_id(inst: *const LsqInstance) -> *const c_char {
    inst.as_ref().map_or(ptr::null(), |i| i.id.as_ptr())
}

/// Borrowed; null when `inst` is null.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lsq_instance_prompt(inst: *const LsqInstance) -> *const c_char {
    inst.as_ref().map_or(ptr::null(), |i| i.prompt.as_ptr())
}

/// Borrowed; null when `inst` is null.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lsq_instance_ground_truth(inst: *const LsqInstance) -> *const c_char {
    inst.as_ref()
        .map_or(ptr::null(), |i| i.ground_truth.as_ptr())
}

/// Scores a raw model output against the instance, in `[0, 1]`.
///
/// # Safety
/// `inst` must be a live handle, `raw_output` a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lsq_score(
    inst: *const LsqInstance,
    raw_output: *const c_char,
    out: *mut f64,
) -> LsqStatus {
    guard(|| {
        let inst = handle(inst)?;
        let raw = str_arg(raw_output, "raw_output")?;
        let score =
            score_output(&inst.inner, raw).map_err(|e| Failure(LsqStatus::Score, e.to_string()))?;
        write_out(out, score)
    })
}

/// Character-level similarity ratio `2M / (|a| + |b|)`.
///
/// # Safety
/// `a` and `b` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lsq_similarity_ratio(
    a: *const c_char,
    b: *const c_char,
    out: *mut f64,
) -> LsqStatus {
    guard(|| {
        let (a, b) = (str_arg(a, "a")?, str_arg(b, "b")?);
        write_out(out, similarity_ratio(a, b))
    })
}

/// Message for the last failed call on this thread, or null. Free with `lsq_string_free`.
#[no_mangle]
pub extern "C" fn lsq_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map_or(ptr::null_mut(), |m| m.clone().into_raw())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lsq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
