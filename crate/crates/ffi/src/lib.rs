//! C ABI over `acquis-core`.
//!
//! Every fallible function returns an [`AcquisStatus`]; on failure the
//! message is available from [`acquis_last_error`] on the same thread.
//! Strings returned through `char **` out-parameters are owned by the
//! caller and released with [`acquis_string_free`]; handles are released
//! with their matching `_free` function. Out-parameters are written only on
//! success.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use acquis_core::align::gale_church::{align_lengths, GcParams};
use acquis_core::celex::{document_url, format_celex, parse_celex, CelexId, Endpoint};
use acquis_core::standoff::{export_csv, generate_inplace, import_standoff_xml};
use acquis_core::tei::{parse_tei, serialize_tei, TeiDocument};
use libc::{c_char, size_t};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcquisStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidCelex = 3,
    UnsupportedEndpoint = 4,
    InvalidTei = 5,
    InvalidStandoff = 6,
    InvalidArgument = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcquisEndpoint {
    Smartapi = 0,
    Lexuriserv = 1,
    Ccvista = 2,
}

impl From<AcquisEndpoint> for Endpoint {
    fn from(e: AcquisEndpoint) -> Self {
        match e {
            AcquisEndpoint::Smartapi => Endpoint::Smartapi,
            AcquisEndpoint::Lexuriserv => Endpoint::Lexuriserv,
            AcquisEndpoint::Ccvista => Endpoint::Ccvista,
        }
    }
}

/// Opaque parsed CELEX identifier.
pub struct AcquisCelex(CelexId);

/// Opaque parsed TEI document.
pub struct AcquisTeiDocument(TeiDocument);

/// One Gale-Church bead over 0-based positions.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcquisBead {
    pub src_start: size_t,
    pub tgt_start: size_t,
    pub src_len: u8,
    pub tgt_len: u8,
    pub cost: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

type Failure = (AcquisStatus, String);

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure> + UnwindSafe) -> AcquisStatus {
    match catch_unwind(f) {
        Ok(Ok(())) => AcquisStatus::Ok,
        Ok(Err((status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            AcquisStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err((AcquisStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|e| (AcquisStatus::InvalidUtf8, format!("{name}: {e}")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| (AcquisStatus::NullPointer, format!("{name} is null")))
}

fn out_arg<T>(p: *mut T, name: &str) -> Result<*mut T, Failure> {
    if p.is_null() {
        Err((AcquisStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(p)
    }
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|e| (AcquisStatus::InvalidArgument, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

/// Message of the last failure on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn acquis_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static version string.
#[no_mangle]
pub extern "C" fn acquis_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn acquis_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `text` into a new handle stored in `*out`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acquis_celex_parse(text: *const c_char, out: *mut *mut AcquisCelex) -> AcquisStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let id =
            parse_celex(str_arg(text, "text")?).map_err(|e| (AcquisStatus::InvalidCelex, e.to_string()))?;
        *out = Box::into_raw(Box::new(AcquisCelex(id)));
        Ok(())
    })
}

/// # Safety
/// `id` must come from [`acquis_celex_parse`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn acquis_celex_free(id: *mut AcquisCelex) {
    if !id.is_null() {
        drop(Box::from_raw(id));
    }
}

/// Canonical text of `id`.
///
/// # Safety
/// `id` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acquis_celex_format(id: *const AcquisCelex, out: *mut *mut c_char) -> AcquisStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        write_string(out, format_celex(&ref_arg(id, "id")?.0))
    })
}

/// Download URL of one language version at `endpoint`.
///
/// # Safety
/// `id` must be a live handle, `lang` a NUL-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn acquis_document_url(
    id: *const AcquisCelex,
    lang: *const c_char,
    endpoint: AcquisEndpoint,
    out: *mut *mut c_char,
) -> AcquisStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let url = document_url(&ref_arg(id, "id")?.0, str_arg(lang, "lang")?, endpoint.into())
            .map_err(|e| (AcquisStatus::UnsupportedEndpoint, e.to_string()))?;
        write_string(out, url)
    })
}

/// Parses a TEI document into a new handle stored in `*out`.
///
/// # Safety
/// `xml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acquis_tei_parse(
    xml: *const c_char,
    out: *mut *mut AcquisTeiDocument,
) -> AcquisStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let doc = parse_tei(str_arg(xml, "xml")?).map_err(|e| (AcquisStatus::InvalidTei, e.to_string()))?;
        *out = Box::into_raw(Box::new(AcquisTeiDocument(doc)));
        Ok(())
    })
}

/// # Safety
/// `doc` must come from [`acquis_tei_parse`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn acquis_tei_free(doc: *mut AcquisTeiDocument) {
    if !doc.is_null() {
        drop(Box::from_raw(doc));
    }
}

/// # Safety
/// `doc` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acquis_tei_serialize(
    doc: *const AcquisTeiDocument,
    out: *mut *mut c_char,
) -> AcquisStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        write_string(out, serialize_tei(&ref_arg(doc, "doc")?.0))
    })
}

/// Number of paragraph segments, title included.
///
/// # Safety
/// `doc` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acquis_tei_extent(doc: *const AcquisTeiDocument, out: *mut size_t) -> AcquisStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ref_arg(doc, "doc")?.0.extent();
        Ok(())
    })
}

/// Aligns two paragraph-length sequences with default parameters.
///
/// The bead array stored in `*beads` holds `*n_beads` entries and is
/// released with [`acquis_beads_free`]; empty input yields NULL and 0.
///
/// # Safety
/// `src` and `tgt` must point to `n_src` and `n_tgt` readable values (or
/// be NULL when the count is 0); the out-parameters must be writable.
#[no_mangle]
pub unsafe extern "C" fn acquis_gale_church_align(
    src: *const size_t,
    n_src: size_t,
    tgt: *const size_t,
    n_tgt: size_t,
    beads: *mut *mut AcquisBead,
    n_beads: *mut size_t,
    total_cost: *mut f64,
) -> AcquisStatus {
    guard(|| {
        let (beads, n_beads, total_cost) =
            (out_arg(beads, "beads")?, out_arg(n_beads, "n_beads")?, out_arg(total_cost, "total_cost")?);
        let slice = |p: *const size_t, n: size_t, name: &str| -> Result<&[usize], Failure> {
            match (p.is_null(), n) {
                (_, 0) => Ok(&[]),
                (true, _) => Err((AcquisStatus::NullPointer, format!("{name} is null"))),
                (false, n) => Ok(std::slice::from_raw_parts(p, n)),
            }
        };
        let result =
            align_lengths(slice(src, n_src, "src")?, slice(tgt, n_tgt, "tgt")?, &GcParams::default());
        let out: Vec<AcquisBead> = result
            .beads
            .iter()
            .map(|(b, cost)| AcquisBead {
                src_start: b.src_start,
                tgt_start: b.tgt_start,
                src_len: b.arity.src,
                tgt_len: b.arity.tgt,
                cost: *cost,
            })
            .collect();
        *n_beads = out.len();
        *total_cost = result.total_cost;
        *beads = if out.is_empty() { ptr::null_mut() } else { Box::into_raw(out.into_boxed_slice()).cast() };
        Ok(())
    })
}

/// # Safety
/// `beads` and `n` must come from one [`acquis_gale_church_align`] call.
#[no_mangle]
pub unsafe extern "C" fn acquis_beads_free(beads: *mut AcquisBead, n: size_t) {
    if !beads.is_null() {
        drop(Box::from_raw(ptr::slice_from_raw_parts_mut(beads, n)));
    }
}

/// Converts a stand-off XML alignment file to its CSV export.
///
/// # Safety
/// `xml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acquis_standoff_xml_to_csv(
    xml: *const c_char,
    out: *mut *mut c_char,
) -> AcquisStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let file = import_standoff_xml(str_arg(xml, "xml")?)
            .map_err(|e| (AcquisStatus::InvalidStandoff, e.to_string()))?;
        write_string(out, export_csv(&file))
    })
}

/// Builds the in-place bilingual file of `src` and `tgt` from the links
/// that `standoff_xml` holds for their document.
///
/// # Safety
/// `src` and `tgt` must be live handles, `standoff_xml` a NUL-terminated
/// string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn acquis_generate_inplace(
    src: *const AcquisTeiDocument,
    tgt: *const AcquisTeiDocument,
    standoff_xml: *const c_char,
    out: *mut *mut c_char,
) -> AcquisStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let (src, tgt) = (&ref_arg(src, "src")?.0, &ref_arg(tgt, "tgt")?.0);
        let invalid =
            |e: acquis_core::standoff::StandoffError| (AcquisStatus::InvalidStandoff, e.to_string());
        let file = import_standoff_xml(str_arg(standoff_xml, "standoff_xml")?).map_err(invalid)?;
        let links = file
            .entries
            .iter()
            .find(|(c, _)| c == src.celex())
            .map(|(_, l)| l)
            .ok_or_else(|| (AcquisStatus::InvalidArgument, format!("no links for {}", src.celex())))?;
        write_string(out, generate_inplace(src, tgt, links).map_err(invalid)?)
    })
}
