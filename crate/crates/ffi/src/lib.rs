//! C ABI over `ontoterm`.
//!
//! Ontologies are opaque `OtOntology` handles. Every fallible call returns
//! an `OtStatus`; on failure the message is available from
//! `ot_last_error_message` on the same thread. Strings returned through
//! `out` parameters are owned by the caller and released with
//! `ot_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use ontoterm::okmodel::{parse_dsl, ObjectInstance, OkOntology};
use ontoterm::pipeline::{run_pipeline, PipelineConfig};
use ontoterm::Error;

/// Parsed ontology handle.
pub struct OtOntology {
    inner: OkOntology,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OtStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Syntax = 3,
    DupName = 4,
    MultipleGenus = 5,
    Unsupported = 6,
    UnknownGenus = 7,
    UnknownAxis = 8,
    BadValue = 9,
    UnknownConcept = 10,
    UnknownTerm = 11,
    UnknownRef = 12,
    Cycle = 13,
    NoCorpus = 14,
    Encoding = 15,
    BadPattern = 16,
    Type = 17,
    Unresolvable = 18,
    Inconsistent = 19,
    Config = 20,
    Io = 21,
    Json = 22,
    Panic = 23,
}

impl OtStatus {
    fn from_code(code: &str) -> Self {
        match code {
            "E_SYNTAX" => OtStatus::Syntax,
            "E_DUP_NAME" => OtStatus::DupName,
            "E_MULTIPLE_GENUS" => OtStatus::MultipleGenus,
            "E_UNSUPPORTED" => OtStatus::Unsupported,
            "E_UNKNOWN_GENUS" => OtStatus::UnknownGenus,
            "E_UNKNOWN_AXIS" => OtStatus::UnknownAxis,
            "E_BAD_VALUE" => OtStatus::BadValue,
            "E_UNKNOWN_CONCEPT" => OtStatus::UnknownConcept,
            "E_UNKNOWN_TERM" => OtStatus::UnknownTerm,
            "E_UNKNOWN_REF" => OtStatus::UnknownRef,
            "E_CYCLE" => OtStatus::Cycle,
            "E_NO_CORPUS" => OtStatus::NoCorpus,
            "E_ENCODING" => OtStatus::Encoding,
            "E_BAD_PATTERN" => OtStatus::BadPattern,
            "E_TYPE" => OtStatus::Type,
            "E_UNRESOLVABLE" => OtStatus::Unresolvable,
            "E_INCONSISTENT" => OtStatus::Inconsistent,
            "E_CONFIG" => OtStatus::Config,
            "E_IO" => OtStatus::Io,
            "E_JSON" => OtStatus::Json,
            _ => OtStatus::Panic,
        }
    }

    fn code(self) -> &'static CStr {
        match self {
            OtStatus::Ok => c"OK",
            OtStatus::NullArgument => c"E_NULL_ARGUMENT",
            OtStatus::InvalidUtf8 => c"E_INVALID_UTF8",
            OtStatus::Syntax => c"E_SYNTAX",
            OtStatus::DupName => c"E_DUP_NAME",
            OtStatus::MultipleGenus => c"E_MULTIPLE_GENUS",
            OtStatus::Unsupported => c"E_UNSUPPORTED",
            OtStatus::UnknownGenus => c"E_UNKNOWN_GENUS",
            OtStatus::UnknownAxis => c"E_UNKNOWN_AXIS",
            OtStatus::BadValue => c"E_BAD_VALUE",
            OtStatus::UnknownConcept => c"E_UNKNOWN_CONCEPT",
            OtStatus::UnknownTerm => c"E_UNKNOWN_TERM",
            OtStatus::UnknownRef => c"E_UNKNOWN_REF",
            OtStatus::Cycle => c"E_CYCLE",
            OtStatus::NoCorpus => c"E_NO_CORPUS",
            OtStatus::Encoding => c"E_ENCODING",
            OtStatus::BadPattern => c"E_BAD_PATTERN",
            OtStatus::Type => c"E_TYPE",
            OtStatus::Unresolvable => c"E_UNRESOLVABLE",
            OtStatus::Inconsistent => c"E_INCONSISTENT",
            OtStatus::Config => c"E_CONFIG",
            OtStatus::Io => c"E_IO",
            OtStatus::Json => c"E_JSON",
            OtStatus::Panic => c"E_PANIC",
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OtExportFormat {
    Owl = 0,
    Kif = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(message));
}

struct Failure(OtStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(OtStatus::from_code(e.code()), e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(OtStatus::Json, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> OtStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err(Failure(OtStatus::Panic, "internal panic".into())));
    match outcome {
        Ok(()) => OtStatus::Ok,
        Err(Failure(status, message)) => {
            set_last_error(message);
            status
        }
    }
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(OtStatus::NullArgument, format!("`{name}` is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(OtStatus::InvalidUtf8, format!("`{name}` is not valid UTF-8")))
}

unsafe fn handle<'a>(p: *const OtOntology) -> Result<&'a OkOntology, Failure> {
    p.as_ref()
        .map(|h| &h.inner)
        .ok_or_else(|| Failure(OtStatus::NullArgument, "`ontology` is null".into()))
}

fn check_out<T>(out: *mut T) -> Result<(), Failure> {
    if out.is_null() {
        Err(Failure(OtStatus::NullArgument, "output pointer is null".into()))
    } else {
        Ok(())
    }
}

unsafe fn give_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let s = CString::new(s).map_err(|_| Failure(OtStatus::InvalidUtf8, "result contains a NUL byte".into()))?;
    *out = s.into_raw();
    Ok(())
}

unsafe fn give_json(out: *mut *mut c_char, value: &impl serde::Serialize) -> Result<(), Failure> {
    give_string(out, serde_json::to_string(value)?)
}

/// Parses ontology source text into a new handle written to `out`.
///
/// # Safety
/// `source` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ot_ontology_parse(source: *const c_char, out: *mut *mut OtOntology) -> OtStatus {
    guard(|| {
        check_out(out)?;
        *out = ptr::null_mut();
        let inner = parse_dsl(text(source, "source")?)?;
        *out = Box::into_raw(Box::new(OtOntology { inner }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `ontology` must come from `ot_ontology_parse` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ot_ontology_free(ontology: *mut OtOntology) {
    if !ontology.is_null() {
        drop(Box::from_raw(ontology));
    }
}

/// Writes the consistency violations as a JSON array to `out_json`.
///
/// # Safety
/// `ontology` must be a live handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ot_ontology_check(ontology: *const OtOntology, out_json: *mut *mut c_char) -> OtStatus {
    guard(|| {
        check_out(out_json)?;
        give_json(out_json, &handle(ontology)?.check_consistency())
    })
}

/// Sets `out` to whether `general` subsumes `specific`.
///
/// # Safety
/// `ontology` must be a live handle; strings NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ot_ontology_subsumes(
    ontology: *const OtOntology,
    general: *const c_char,
    specific: *const c_char,
    out: *mut bool,
) -> OtStatus {
    guard(|| {
        check_out(out)?;
        *out = handle(ontology)?.subsumes(text(general, "general")?, text(specific, "specific")?)?;
        Ok(())
    })
}

/// Writes the similarity of two concepts as JSON to `out_json`.
///
/// # Safety
/// `ontology` must be a live handle; strings NUL-terminated; `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn ot_ontology_similarity(
    ontology: *const OtOntology,
    a: *const c_char,
    b: *const c_char,
    out_json: *mut *mut c_char,
) -> OtStatus {
    guard(|| {
        check_out(out_json)?;
        let s = handle(ontology)?.similarity(text(a, "a")?, text(b, "b")?)?;
        give_json(out_json, &s)
    })
}

/// Serializes the ontology as OWL functional syntax or KIF. `iri` may be
/// null for the default namespace; KIF ignores it.
///
/// # Safety
/// `ontology` must be a live handle; `iri` null or NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ot_ontology_export(
    ontology: *const OtOntology,
    format: OtExportFormat,
    iri: *const c_char,
    out: *mut *mut c_char,
) -> OtStatus {
    guard(|| {
        check_out(out)?;
        let o = handle(ontology)?;
        let iri = if iri.is_null() { ontoterm::export::DEFAULT_IRI } else { text(iri, "iri")? };
        let rendered = match format {
            OtExportFormat::Owl => ontoterm::export::to_owl(o, iri)?,
            OtExportFormat::Kif => ontoterm::export::to_kif(o)?,
        };
        give_string(out, rendered)
    })
}

/// Aligns a term label with the ontology and writes the result as JSON.
///
/// # Safety
/// `ontology` must be a live handle; `term` NUL-terminated; `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn ot_align_term(ontology: *const OtOntology, term: *const c_char, out_json: *mut *mut c_char) -> OtStatus {
    guard(|| {
        check_out(out_json)?;
        let r = ontoterm::align::align_term(text(term, "term")?, handle(ontology)?);
        give_json(out_json, &r)
    })
}

/// Classifies an object given as JSON `{"id", "concept", "state"}` and
/// writes `{"classes", "sets"}` to `out_json`.
///
/// # Safety
/// `ontology` must be a live handle; `instance_json` NUL-terminated; `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn ot_classify_object(
    ontology: *const OtOntology,
    instance_json: *const c_char,
    out_json: *mut *mut c_char,
) -> OtStatus {
    guard(|| {
        check_out(out_json)?;
        let instance: ObjectInstance = serde_json::from_str(text(instance_json, "instance_json")?)?;
        let c = handle(ontology)?.classify_object(&instance)?;
        give_json(out_json, &c)
    })
}

/// Runs the whole pipeline from a TOML config file and writes the manifest
/// as JSON to `out_manifest_json`.
///
/// # Safety
/// `config_path` must be NUL-terminated; `out_manifest_json` writable.
#[no_mangle]
pub unsafe extern "C" fn ot_run_pipeline(config_path: *const c_char, out_manifest_json: *mut *mut c_char) -> OtStatus {
    guard(|| {
        check_out(out_manifest_json)?;
        let config = PipelineConfig::load(Path::new(text(config_path, "config_path")?))?;
        let manifest = run_pipeline(&config)?;
        give_json(out_manifest_json, &manifest)
    })
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ot_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Stable code string for a status, e.g. `E_UNKNOWN_CONCEPT`.
#[no_mangle]
pub extern "C" fn ot_status_code(status: OtStatus) -> *const c_char {
    status.code().as_ptr()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ot_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
