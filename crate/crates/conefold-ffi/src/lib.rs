//! C ABI for the conefold kernel: opaque handles, status codes, and plain
//! buffer exchange so other languages can bind the discrete pipeline.
//!
//! Every function returns a [`ConefoldStatus`]; results come back through
//! out-pointers. Handles must be released with the matching `_free`.

use conefold::bricard::{self, EndFaces};
use conefold::config::{BranchSelector, CouplingChoice, FactorIndex, FoldAngle, SectionConfig};
use conefold::cone;
use conefold::smooth::cone::torsion_residual;
use std::os::raw::c_char;

/// Status codes for every FFI entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConefoldStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InfeasibleBranch = 3,
    Degenerate = 4,
    FoldAtInfinity = 5,
    Internal = 6,
}

/// Opaque synthesized configuration.
pub struct ConefoldConfig {
    inner: SectionConfig,
}

/// Opaque built strip at one fold state.
pub struct ConefoldStrip {
    inner: bricard::ConeStrip,
    mesh: conefold::mesh::Mesh,
}

fn selector_from(u: u32, v: u32, use_second_coupling: u32) -> Option<BranchSelector> {
    let idx = |k: u32| match k {
        1 => Some(FactorIndex::First),
        2 => Some(FactorIndex::Second),
        _ => None,
    };
    Some(BranchSelector {
        u: idx(u)?,
        v: idx(v)?,
        mn: if use_second_coupling == 0 {
            CouplingChoice::M
        } else {
            CouplingChoice::N
        },
    })
}

fn cone_status(e: &cone::ConeError) -> ConefoldStatus {
    match e {
        cone::ConeError::ExcludedSeed(_) => ConefoldStatus::InvalidArgument,
        cone::ConeError::InfeasibleBranch(_) | cone::ConeError::BranchMismatch => {
            ConefoldStatus::InfeasibleBranch
        }
        cone::ConeError::TangentAtInfinity
        | cone::ConeError::ParallelPlanes
        | cone::ConeError::DegenerateOutput(_) => ConefoldStatus::Degenerate,
        cone::ConeError::FoldAtInfinity(_) => ConefoldStatus::FoldAtInfinity,
    }
}

/// Synthesize a configuration from the free tangents. `coupling_n` selects
/// the second multilinear coupling factor when nonzero.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle that must
/// later be passed to [`conefold_config_free`].
#[no_mangle]
pub unsafe extern "C" fn conefold_synthesize(
    u: u32,
    v: u32,
    coupling_n: u32,
    m: f64,
    s1: f64,
    s3: f64,
    t1: f64,
    out: *mut *mut ConefoldConfig,
) -> ConefoldStatus {
    if out.is_null() {
        return ConefoldStatus::NullPointer;
    }
    let Some(sel) = selector_from(u, v, coupling_n) else {
        return ConefoldStatus::InvalidArgument;
    };
    match cone::synthesize_config(sel, m, s1, s3, t1) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(ConefoldConfig { inner }));
            ConefoldStatus::Ok
        }
        Err(e) => cone_status(&e),
    }
}

/// # Safety
/// `config` must come from [`conefold_synthesize`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn conefold_config_free(config: *mut ConefoldConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Copy the seven half-angle tangents (m, s1, s2, s3, t1, t2, t3).
///
/// # Safety
/// `entries` must point to at least 7 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn conefold_config_entries(
    config: *const ConefoldConfig,
    entries: *mut f64,
) -> ConefoldStatus {
    if config.is_null() || entries.is_null() {
        return ConefoldStatus::NullPointer;
    }
    let e = (*config).inner.entries();
    std::ptr::copy_nonoverlapping(e.as_ptr(), entries, 7);
    ConefoldStatus::Ok
}

/// Second fold tangent coupled to `d1` along the synthesized motion.
///
/// # Safety
/// `d2` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn conefold_fold_couple(
    config: *const ConefoldConfig,
    d1: f64,
    d2: *mut f64,
) -> ConefoldStatus {
    if config.is_null() || d2.is_null() {
        return ConefoldStatus::NullPointer;
    }
    match cone::fold_coupling(&(*config).inner, d1) {
        Ok(v) => {
            *d2 = v;
            ConefoldStatus::Ok
        }
        Err(e) => cone_status(&e),
    }
}

/// Both coplanarity determinants at a fold state.
///
/// # Safety
/// `det_alpha` and `det_beta` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn conefold_determinants(
    config: *const ConefoldConfig,
    d1: f64,
    d2: f64,
    det_alpha: *mut f64,
    det_beta: *mut f64,
) -> ConefoldStatus {
    if config.is_null() || det_alpha.is_null() || det_beta.is_null() {
        return ConefoldStatus::NullPointer;
    }
    let fold = conefold::config::FoldPair::finite(d1, d2);
    *det_alpha = cone::alpha_det(&(*config).inner, fold);
    *det_beta = cone::beta_det(&(*config).inner, fold);
    ConefoldStatus::Ok
}

/// The two flat fold states as (d1, d2) pairs; half-turn angles are encoded
/// as IEEE infinity.
///
/// # Safety
/// `states` must point to at least 4 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn conefold_flat_states(
    config: *const ConefoldConfig,
    states: *mut f64,
) -> ConefoldStatus {
    if config.is_null() || states.is_null() {
        return ConefoldStatus::NullPointer;
    }
    match cone::flat_states(&(*config).inner) {
        Ok(pair) => {
            let encode = |a: FoldAngle| a.tan_half().unwrap_or(f64::INFINITY);
            let buf = [
                encode(pair[0].d1),
                encode(pair[0].d2),
                encode(pair[1].d1),
                encode(pair[1].d2),
            ];
            std::ptr::copy_nonoverlapping(buf.as_ptr(), states, 4);
            ConefoldStatus::Ok
        }
        Err(e) => cone_status(&e),
    }
}

/// Build an n-face strip at fold tangent d1 with symmetric end openings.
///
/// # Safety
/// `out` must be a valid pointer; the handle must be released with
/// [`conefold_strip_free`].
#[no_mangle]
pub unsafe extern "C" fn conefold_strip_build(
    config: *const ConefoldConfig,
    faces: u32,
    d1: f64,
    end_opening: f64,
    out: *mut *mut ConefoldStrip,
) -> ConefoldStatus {
    if config.is_null() || out.is_null() {
        return ConefoldStatus::NullPointer;
    }
    if faces < 3 {
        return ConefoldStatus::InvalidArgument;
    }
    match bricard::build_strip(
        &(*config).inner,
        faces as usize,
        d1,
        EndFaces::symmetric(end_opening),
    ) {
        Ok(inner) => {
            let mesh = bricard::strip_mesh(&inner);
            *out = Box::into_raw(Box::new(ConefoldStrip { inner, mesh }));
            ConefoldStatus::Ok
        }
        Err(bricard::BricardError::Coupling(e)) => cone_status(&e),
        Err(_) => ConefoldStatus::Degenerate,
    }
}

/// # Safety
/// `strip` must come from [`conefold_strip_build`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn conefold_strip_free(strip: *mut ConefoldStrip) {
    if !strip.is_null() {
        drop(Box::from_raw(strip));
    }
}

/// Vertex and quad counts of the strip mesh.
///
/// # Safety
/// `vertices` and `quads` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn conefold_strip_mesh_counts(
    strip: *const ConefoldStrip,
    vertices: *mut u32,
    quads: *mut u32,
) -> ConefoldStatus {
    if strip.is_null() || vertices.is_null() || quads.is_null() {
        return ConefoldStatus::NullPointer;
    }
    *vertices = (*strip).mesh.vertices.len() as u32;
    *quads = (*strip).mesh.faces.len() as u32;
    ConefoldStatus::Ok
}

/// Fill caller-provided buffers with xyz vertex data and quad indices.
///
/// # Safety
/// `vertices` must hold 3·vertex-count doubles and `quads` 4·quad-count
/// indices, per [`conefold_strip_mesh_counts`].
#[no_mangle]
pub unsafe extern "C" fn conefold_strip_mesh_fill(
    strip: *const ConefoldStrip,
    vertices: *mut f64,
    quads: *mut u32,
) -> ConefoldStatus {
    if strip.is_null() || vertices.is_null() || quads.is_null() {
        return ConefoldStatus::NullPointer;
    }
    let mesh = &(*strip).mesh;
    for (i, v) in mesh.vertices.iter().enumerate() {
        *vertices.add(3 * i) = v.x;
        *vertices.add(3 * i + 1) = v.y;
        *vertices.add(3 * i + 2) = v.z;
    }
    for (i, f) in mesh.faces.iter().enumerate() {
        if f.len() != 4 {
            return ConefoldStatus::Internal;
        }
        for (k, &ix) in f.iter().enumerate() {
            *quads.add(4 * i + k) = ix as u32;
        }
    }
    ConefoldStatus::Ok
}

/// Closure residuals of the strip: germ mirror residual, period-four
/// closure, and the max distance of section points to their cutting plane.
///
/// # Safety
/// `mirror`, `period4`, `section_plane` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn conefold_strip_closure(
    strip: *const ConefoldStrip,
    mirror: *mut f64,
    period4: *mut f64,
    section_plane: *mut f64,
) -> ConefoldStatus {
    if strip.is_null() || mirror.is_null() || period4.is_null() || section_plane.is_null() {
        return ConefoldStatus::NullPointer;
    }
    let report = bricard::verify_antiparallelogram(&(*strip).inner);
    *mirror = report.mirror_residual;
    *period4 = report.point_period4.max(report.ruling_period4);
    *section_plane = report.section_plane_residual;
    ConefoldStatus::Ok
}

/// Planarity residual of the cross-ratio-λ pencil section.
///
/// # Safety
/// `residual` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn conefold_pencil_residual(
    strip: *const ConefoldStrip,
    lambda: f64,
    residual: *mut f64,
) -> ConefoldStatus {
    if strip.is_null() || residual.is_null() {
        return ConefoldStatus::NullPointer;
    }
    match bricard::pencil_section(&(*strip).inner, lambda) {
        Ok(sec) => {
            *residual = sec.planarity_residual;
            ConefoldStatus::Ok
        }
        Err(_) => ConefoldStatus::Degenerate,
    }
}

/// Max normalized torsion of a uniformly sampled curve (xyz triples).
///
/// # Safety
/// `points` must hold 3·count doubles; `residual` must be valid.
#[no_mangle]
pub unsafe extern "C" fn conefold_torsion_residual(
    points: *const f64,
    count: u32,
    step: f64,
    residual: *mut f64,
) -> ConefoldStatus {
    if points.is_null() || residual.is_null() {
        return ConefoldStatus::NullPointer;
    }
    if count < 7 || !(step > 0.0) {
        return ConefoldStatus::InvalidArgument;
    }
    let pts: Vec<conefold::geom::Vec3> = (0..count as usize)
        .map(|i| {
            conefold::geom::Vec3::new(
                *points.add(3 * i),
                *points.add(3 * i + 1),
                *points.add(3 * i + 2),
            )
        })
        .collect();
    match torsion_residual(&pts, step) {
        Ok(v) => {
            *residual = v;
            ConefoldStatus::Ok
        }
        Err(_) => ConefoldStatus::Degenerate,
    }
}

/// Static human-readable description of a status code.
#[no_mangle]
pub extern "C" fn conefold_status_message(status: ConefoldStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        ConefoldStatus::Ok => b"ok\0",
        ConefoldStatus::NullPointer => b"null pointer argument\0",
        ConefoldStatus::InvalidArgument => b"invalid argument\0",
        ConefoldStatus::InfeasibleBranch => b"branch infeasible for these parameters\0",
        ConefoldStatus::Degenerate => b"degenerate configuration or state\0",
        ConefoldStatus::FoldAtInfinity => b"fold angle at a half turn\0",
        ConefoldStatus::Internal => b"internal error\0",
    };
    msg.as_ptr() as *const c_char
}
