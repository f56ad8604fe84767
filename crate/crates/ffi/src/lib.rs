//! C ABI for `plcurv`.
//!
//! A mesh lives behind an opaque `PlcMesh` handle that owns a triangulation,
//! its base edge lengths and the current log-factors `u`. Every fallible call
//! returns a `PlcStatus`; on failure `plc_last_error` describes the problem.
//! Status values match the exit codes of the `plcurv` command-line tool.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use plcurv::flows::{run_flow, FlowConfig, FlowError, FlowKind, RunOutcome};
use plcurv::geometry::{alpha_curvature, curvature, scale_metric, surgery, GeometryError};
use plcurv::mesh::io::{load_lengths_json, load_mesh, to_lengths_doc, LoadError, MeshFormat};
use plcurv::solver::{newton_solve, NewtonConfig, SolverError, Target};
use plcurv::{PLMetric, Triangulation};

/// Result of a call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlcStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Input could not be parsed.
    ParseError = 2,
    /// Input parsed but is not a valid surface, metric or argument.
    InvalidInput = 3,
    /// A flow stopped at its step budget.
    MaxSteps = 4,
    /// Numerical failure: step size underflow, stalled solve.
    NumericalFailure = 5,
    /// Target not admissible (α·R̄ has a positive entry).
    Unsupported = 6,
    /// An output buffer has the wrong length.
    SizeMismatch = 7,
    /// A Rust panic was caught at the boundary.
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlcFormat {
    Off = 0,
    Obj = 1,
    LengthsJson = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlcFlowKind {
    Yamabe = 0,
    Calabi = 1,
}

/// Opaque mesh handle.
pub struct PlcMesh {
    tri: Triangulation,
    base: PLMetric,
    u: Vec<f64>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(PlcStatus, String);

impl From<LoadError> for Fail {
    fn from(e: LoadError) -> Self {
        let s = if e.is_parse_error() {
            PlcStatus::ParseError
        } else {
            PlcStatus::InvalidInput
        };
        Fail(s, e.to_string())
    }
}

impl From<GeometryError> for Fail {
    fn from(e: GeometryError) -> Self {
        Fail(PlcStatus::InvalidInput, e.to_string())
    }
}

impl From<SolverError> for Fail {
    fn from(e: SolverError) -> Self {
        let s = match e {
            SolverError::UnsupportedTarget { .. } => PlcStatus::Unsupported,
            SolverError::InfeasibleTarget { .. }
            | SolverError::TargetSize { .. }
            | SolverError::Geometry(_) => PlcStatus::InvalidInput,
            _ => PlcStatus::NumericalFailure,
        };
        Fail(s, e.to_string())
    }
}

impl From<FlowError> for Fail {
    fn from(e: FlowError) -> Self {
        let s = match e {
            FlowError::InvalidConfig(_) | FlowError::Geometry(_) => PlcStatus::InvalidInput,
            _ => PlcStatus::NumericalFailure,
        };
        Fail(s, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<PlcStatus, Fail>) -> PlcStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            PlcStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(PlcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn mesh_ref<'a>(m: *const PlcMesh) -> Result<&'a PlcMesh, Fail> {
    m.as_ref().ok_or_else(|| null("mesh"))
}

unsafe fn mesh_mut<'a>(m: *mut PlcMesh) -> Result<&'a mut PlcMesh, Fail> {
    m.as_mut().ok_or_else(|| null("mesh"))
}

unsafe fn out_slice<'a>(
    p: *mut f64,
    len: usize,
    want: usize,
    what: &str,
) -> Result<&'a mut [f64], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    if len != want {
        return Err(Fail(
            PlcStatus::SizeMismatch,
            format!("{what} has length {len}, expected {want}"),
        ));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next `plc_*` call on the same thread.
#[no_mangle]
pub extern "C" fn plc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn plc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses `len` bytes in the given format. A `u` field in LENGTHS_JSON
/// input becomes the initial log-factors. On success `*out` receives a new
/// handle, to be released with `plc_mesh_free`.
///
/// # Safety
/// `data` must point to `len` readable bytes and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn plc_mesh_from_buffer(
    data: *const u8,
    len: usize,
    format: PlcFormat,
    out: *mut *mut PlcMesh,
) -> PlcStatus {
    guard(|| {
        if data.is_null() {
            return Err(null("data"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let bytes = std::slice::from_raw_parts(data, len);
        let fmt = match format {
            PlcFormat::Off => MeshFormat::Off,
            PlcFormat::Obj => MeshFormat::Obj,
            PlcFormat::LengthsJson => MeshFormat::LengthsJson,
        };
        let (tri, base, u) = if fmt == MeshFormat::LengthsJson {
            let s = load_lengths_json(bytes)?;
            (s.tri, s.metric, s.u)
        } else {
            let (t, m) = load_mesh(bytes, fmt)?;
            (t, m, None)
        };
        let u = u.unwrap_or_else(|| vec![0.0; tri.vertex_count()]);
        if u.len() != tri.vertex_count() {
            return Err(Fail(
                PlcStatus::InvalidInput,
                format!(
                    "u has {} entries for {} vertices",
                    u.len(),
                    tri.vertex_count()
                ),
            ));
        }
        scale_metric(&tri, &base, &u)?;
        *out = Box::into_raw(Box::new(PlcMesh { tri, base, u }));
        Ok(PlcStatus::Ok)
    })
}

/// Reads a mesh file; the format follows the extension (.off, .obj, .json).
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn plc_mesh_load(path: *const c_char, out: *mut *mut PlcMesh) -> PlcStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| Fail(PlcStatus::ParseError, "path is not UTF-8".into()))?;
        let fmt = MeshFormat::from_path(std::path::Path::new(path))
            .ok_or_else(|| Fail(PlcStatus::ParseError, format!("unknown extension: {path}")))?;
        let bytes =
            std::fs::read(path).map_err(|e| Fail(PlcStatus::ParseError, format!("{path}: {e}")))?;
        let format = match fmt {
            MeshFormat::Off => PlcFormat::Off,
            MeshFormat::Obj => PlcFormat::Obj,
            MeshFormat::LengthsJson => PlcFormat::LengthsJson,
        };
        match plc_mesh_from_buffer(bytes.as_ptr(), bytes.len(), format, out) {
            PlcStatus::Ok => Ok(PlcStatus::Ok),
            s => {
                let msg = LAST_ERROR.with(|e| {
                    e.borrow()
                        .as_ref()
                        .map(|c| c.to_string_lossy().into_owned())
                });
                Err(Fail(s, msg.unwrap_or_default()))
            }
        }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `mesh` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn plc_mesh_free(mesh: *mut PlcMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Vertex count, or 0 for a null handle.
///
/// # Safety
/// `mesh` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn plc_mesh_vertex_count(mesh: *const PlcMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.tri.vertex_count())
}

/// # Safety
/// `mesh` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn plc_mesh_face_count(mesh: *const PlcMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.tri.face_count())
}

/// # Safety
/// `mesh` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn plc_mesh_edge_count(mesh: *const PlcMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.tri.edge_count())
}

/// # Safety
/// `mesh` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn plc_mesh_euler_characteristic(mesh: *const PlcMesh) -> i64 {
    mesh.as_ref().map_or(0, |m| m.tri.euler_characteristic())
}

/// Replaces the log-factors. `len` must equal the vertex count.
///
/// # Safety
/// `u` must point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn plc_mesh_set_u(
    mesh: *mut PlcMesh,
    u: *const f64,
    len: usize,
) -> PlcStatus {
    guard(|| {
        let m = mesh_mut(mesh)?;
        if u.is_null() {
            return Err(null("u"));
        }
        let n = m.tri.vertex_count();
        if len != n {
            return Err(Fail(
                PlcStatus::SizeMismatch,
                format!("u has length {len}, expected {n}"),
            ));
        }
        let v = std::slice::from_raw_parts(u, len).to_vec();
        scale_metric(&m.tri, &m.base, &v)?;
        m.u = v;
        Ok(PlcStatus::Ok)
    })
}

/// Copies the log-factors into `out` (length = vertex count).
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn plc_mesh_get_u(
    mesh: *const PlcMesh,
    out: *mut f64,
    len: usize,
) -> PlcStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        out_slice(out, len, m.u.len(), "out")?.copy_from_slice(&m.u);
        Ok(PlcStatus::Ok)
    })
}

/// Writes K (and R_α when `r_out` is not null) for the current metric.
/// Both buffers have length `len` = vertex count.
///
/// # Safety
/// Non-null buffers must hold `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn plc_curvature(
    mesh: *const PlcMesh,
    alpha: f64,
    k_out: *mut f64,
    r_out: *mut f64,
    len: usize,
) -> PlcStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        let n = m.tri.vertex_count();
        let cur = scale_metric(&m.tri, &m.base, &m.u)?;
        let k = curvature(&m.tri, &cur);
        out_slice(k_out, len, n, "k_out")?.copy_from_slice(&k);
        if !r_out.is_null() {
            let rep = alpha_curvature(&k, &m.u, alpha, m.tri.euler_characteristic());
            out_slice(r_out, len, n, "r_out")?.copy_from_slice(&rep.r_alpha);
        }
        Ok(PlcStatus::Ok)
    })
}

/// Flips the current metric to a Delaunay triangulation. `flips` (nullable)
/// receives the number of flips.
///
/// # Safety
/// `flips` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn plc_make_delaunay(mesh: *mut PlcMesh, flips: *mut usize) -> PlcStatus {
    guard(|| {
        let m = mesh_mut(mesh)?;
        let log = surgery(&mut m.tri, &mut m.base, &m.u)?;
        if let Some(f) = flips.as_mut() {
            *f = log.len();
        }
        Ok(PlcStatus::Ok)
    })
}

/// Runs a flow from the current `u` with surgery on or off and stores the
/// final state in the handle. `dt <= 0` selects the default step. Returns
/// `Ok` when converged, `MaxSteps` or `NumericalFailure` otherwise (the
/// handle then holds the last state). `steps` is nullable.
///
/// # Safety
/// `steps` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn plc_flow(
    mesh: *mut PlcMesh,
    kind: PlcFlowKind,
    alpha: f64,
    dt: f64,
    tol: f64,
    max_steps: usize,
    surgery_on: bool,
    steps: *mut usize,
) -> PlcStatus {
    guard(|| {
        let m = mesh_mut(mesh)?;
        let mut cfg = FlowConfig::new(match kind {
            PlcFlowKind::Yamabe => FlowKind::Yamabe,
            PlcFlowKind::Calabi => FlowKind::Calabi,
        });
        if dt > 0.0 {
            cfg.dt = dt;
        }
        cfg.tol = tol;
        cfg.max_steps = max_steps;
        cfg.surgery = surgery_on;
        let r = run_flow(&m.tri, &m.base, &m.u, alpha, &cfg)?;
        if let Some(s) = steps.as_mut() {
            *s = r.state.step_count;
        }
        m.tri = r.state.tri;
        m.base = r.state.base;
        m.u = r.state.u;
        match r.outcome {
            RunOutcome::Converged => Ok(PlcStatus::Ok),
            RunOutcome::MaxSteps => Err(Fail(PlcStatus::MaxSteps, "step budget exhausted".into())),
            RunOutcome::Failed(e) => Err(Fail(PlcStatus::NumericalFailure, e.to_string())),
        }
    })
}

/// Newton solve for a per-vertex target (`target` of length vertex count) or
/// the constant target (`target` null). Stores the solution in the handle.
///
/// # Safety
/// `target` must be null or point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn plc_solve(
    mesh: *mut PlcMesh,
    alpha: f64,
    target: *const f64,
    len: usize,
    tol: f64,
    max_iter: usize,
) -> PlcStatus {
    guard(|| {
        let m = mesh_mut(mesh)?;
        let t = if target.is_null() {
            Target::Constant
        } else {
            Target::Prescribed(std::slice::from_raw_parts(target, len).to_vec())
        };
        let r = newton_solve(
            &m.tri,
            &m.base,
            &m.u,
            alpha,
            &t,
            &NewtonConfig { tol, max_iter },
        )?;
        m.tri = r.tri;
        m.base = r.base;
        m.u = r.u;
        Ok(PlcStatus::Ok)
    })
}

/// The handle as a LENGTHS_JSON document (base lengths plus `u`). Free the
/// result with `plc_string_free`. Returns null for a null handle.
///
/// # Safety
/// `mesh` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn plc_mesh_to_json(mesh: *const PlcMesh) -> *mut c_char {
    let Some(m) = mesh.as_ref() else {
        set_error("mesh is null");
        return ptr::null_mut();
    };
    let mut doc = to_lengths_doc(&m.tri, &m.base);
    doc.u = Some(m.u.clone());
    match serde_json::to_string(&doc)
        .ok()
        .and_then(|s| CString::new(s).ok())
    {
        Some(c) => c.into_raw(),
        None => ptr::null_mut(),
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from `plc_mesh_to_json` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn plc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
