//! C ABI over [`mdpforge`] environments.
//!
//! Every function returns a status code (`MDPFORGE_OK`, `MDPFORGE_ERR_PARSE`,
//! `MDPFORGE_ERR_SEMANTIC`, `MDPFORGE_ERR_STATE`) and writes results through
//! out-pointers. The last failure on the calling thread can be read back with
//! the `mdpforge_last_error_*` functions.
//!
//! Handles are plain integers; 0 is never a valid handle.

use std::cell::RefCell;
use std::collections::HashMap;
use std::ffi::{c_char, CStr, CString};
use std::ptr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Mutex, MutexGuard, OnceLock};

use mdpforge::dsl::DslError;
use mdpforge::{examples, load_spec, make_env, ActionId, EnvError, EnvSession};

pub const MDPFORGE_OK: i32 = 0;
pub const MDPFORGE_ERR_PARSE: i32 = 1;
pub const MDPFORGE_ERR_SEMANTIC: i32 = 2;
pub const MDPFORGE_ERR_STATE: i32 = 3;

pub type Handle = u64;

static NEXT_HANDLE: AtomicU64 = AtomicU64::new(1);

fn registry() -> MutexGuard<'static, HashMap<Handle, EnvSession>> {
    static REGISTRY: OnceLock<Mutex<HashMap<Handle, EnvSession>>> = OnceLock::new();
    REGISTRY
        .get_or_init(Default::default)
        .lock()
        .unwrap_or_else(|poisoned| poisoned.into_inner())
}

struct LastError {
    code: i32,
    message: CString,
    line: u32,
    col: u32,
}

impl LastError {
    fn none() -> Self {
        LastError {
            code: MDPFORGE_OK,
            message: CString::default(),
            line: 0,
            col: 0,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<LastError> = RefCell::new(LastError::none());
}

fn fail(code: i32, message: impl Into<String>, line: usize, col: usize) -> i32 {
    let message = CString::new(message.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = LastError {
            code,
            message,
            line: line as u32,
            col: col as u32,
        }
    });
    code
}

fn succeed() -> i32 {
    LAST_ERROR.with(|e| *e.borrow_mut() = LastError::none());
    MDPFORGE_OK
}

fn dsl_failure(err: &DslError) -> i32 {
    let code = if err.is_semantic() {
        MDPFORGE_ERR_SEMANTIC
    } else {
        MDPFORGE_ERR_PARSE
    };
    fail(code, err.to_string(), err.pos.line, err.pos.col)
}

fn state_failure(message: impl Into<String>) -> i32 {
    fail(MDPFORGE_ERR_STATE, message, 0, 0)
}

fn env_failure(err: &EnvError) -> i32 {
    state_failure(err.to_string())
}

fn with_session(handle: Handle, f: impl FnOnce(&mut EnvSession) -> i32) -> i32 {
    match registry().get_mut(&handle) {
        Some(session) => f(session),
        None => state_failure(format!("invalid handle {handle}")),
    }
}

/// Parses and validates `dsl_text` (NUL-terminated UTF-8) and creates an
/// environment seeded with `seed`.
///
/// # Safety
/// `dsl_text` must be null or a valid C string; `out_handle` must be null or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn mdpforge_create_env(dsl_text: *const c_char, seed: u64, out_handle: *mut Handle) -> i32 {
    if dsl_text.is_null() || out_handle.is_null() {
        return state_failure("null pointer argument");
    }
    let text = match CStr::from_ptr(dsl_text).to_str() {
        Ok(text) => text,
        Err(e) => return fail(MDPFORGE_ERR_PARSE, format!("input is not UTF-8: {e}"), 0, 0),
    };
    let mdp = match load_spec(text) {
        Ok(mdp) => mdp,
        Err(e) => return dsl_failure(&e),
    };
    let handle = NEXT_HANDLE.fetch_add(1, Ordering::Relaxed);
    registry().insert(handle, make_env(mdp, seed));
    *out_handle = handle;
    succeed()
}

/// # Safety
/// `out_state` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn mdpforge_reset(handle: Handle, out_state: *mut u64) -> i32 {
    if out_state.is_null() {
        return state_failure("null pointer argument");
    }
    with_session(handle, |session| {
        *out_state = session.reset().0 as u64;
        succeed()
    })
}

/// # Safety
/// Each out-pointer must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn mdpforge_step(
    handle: Handle,
    action: u64,
    out_state: *mut u64,
    out_reward: *mut f64,
    out_done: *mut bool,
) -> i32 {
    if out_state.is_null() || out_reward.is_null() || out_done.is_null() {
        return state_failure("null pointer argument");
    }
    with_session(handle, |session| match session.step(ActionId(action as usize)) {
        Ok(result) => {
            *out_state = result.observation.0 as u64;
            *out_reward = result.reward;
            *out_done = result.done;
            succeed()
        }
        Err(e) => env_failure(&e),
    })
}

/// Returns the DOT rendering with the current state highlighted, or null on
/// error. Free the result with [`mdpforge_string_free`].
#[no_mangle]
pub extern "C" fn mdpforge_render(handle: Handle) -> *mut c_char {
    let mut out = ptr::null_mut();
    with_session(handle, |session| match session.render_dot() {
        Ok(dot) => {
            out = CString::new(dot).unwrap_or_default().into_raw();
            succeed()
        }
        Err(e) => env_failure(&e),
    });
    out
}

/// # Safety
/// `s` must be null or a pointer returned by [`mdpforge_render`] that has not
/// been freed yet.
#[no_mangle]
pub unsafe extern "C" fn mdpforge_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Destroys a handle. Destroying an unknown or already destroyed handle
/// returns `MDPFORGE_ERR_STATE`.
#[no_mangle]
pub extern "C" fn mdpforge_destroy(handle: Handle) -> i32 {
    match registry().remove(&handle) {
        Some(_) => succeed(),
        None => state_failure(format!("invalid handle {handle}")),
    }
}

/// Number of live handles.
#[no_mangle]
pub extern "C" fn mdpforge_handle_count() -> usize {
    registry().len()
}

/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn mdpforge_num_states(handle: Handle, out: *mut u64) -> i32 {
    if out.is_null() {
        return state_failure("null pointer argument");
    }
    with_session(handle, |session| {
        *out = session.observation_space() as u64;
        succeed()
    })
}

/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn mdpforge_num_actions(handle: Handle, out: *mut u64) -> i32 {
    if out.is_null() {
        return state_failure("null pointer argument");
    }
    with_session(handle, |session| {
        *out = session.action_space() as u64;
        succeed()
    })
}

#[no_mangle]
pub extern "C" fn mdpforge_last_error_code() -> i32 {
    LAST_ERROR.with(|e| e.borrow().code)
}

/// Message of the last failure on this thread; empty after a success. The
/// pointer stays valid until the next call into this library on the thread.
#[no_mangle]
pub extern "C" fn mdpforge_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().message.as_ptr())
}

#[no_mangle]
pub extern "C" fn mdpforge_last_error_line() -> u32 {
    LAST_ERROR.with(|e| e.borrow().line)
}

#[no_mangle]
pub extern "C" fn mdpforge_last_error_col() -> u32 {
    LAST_ERROR.with(|e| e.borrow().col)
}

/// DSL text of a bundled example, or null for an unknown name. The string is
/// static and must not be freed.
///
/// # Safety
/// `name` must be null or a valid C string.
#[no_mangle]
pub unsafe extern "C" fn mdpforge_example_source(name: *const c_char) -> *const c_char {
    static SOURCES: OnceLock<Vec<(&'static str, CString)>> = OnceLock::new();
    if name.is_null() {
        return ptr::null();
    }
    let Ok(name) = CStr::from_ptr(name).to_str() else {
        return ptr::null();
    };
    let sources = SOURCES.get_or_init(|| {
        examples::ALL
            .iter()
            .map(|e| (e.name, CString::new(e.source).expect("fixture has no NUL")))
            .collect()
    });
    sources
        .iter()
        .find(|(n, _)| *n == name)
        .map_or(ptr::null(), |(_, s)| s.as_ptr())
}
