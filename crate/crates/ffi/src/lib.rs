//! C ABI for the instructgen text metrics and helpers.
//!
//! Conventions: every function returns an [`IgStatus`] code and writes its
//! result through out-pointers; strings are NUL-terminated UTF-8; the
//! novelty index is an opaque handle created with `ig_novelty_index_new`
//! and released with `ig_novelty_index_free`. The generated header lives in
//! `include/instructgen.h`.

use std::ffi::CStr;
use std::os::raw::c_char;

use instructgen::filters::metrics::{
    bengali_word_ratio, trigram_similarity, type_token_ratio, unicode_consistency, MetricError,
};
use instructgen::filters::NoveltyIndex;
use instructgen::types::Category;

/// Status codes returned by every `ig_*` function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// The text contains no word tokens.
    NoWords = 3,
    /// The text is empty after normalization.
    EmptyText = 4,
    IoError = 5,
    /// The input could not be decoded or parsed.
    ParseError = 6,
    /// An input collection was empty.
    EmptyInput = 7,
    DuplicateId = 8,
    /// The category string is not one of c1..c10.
    UnknownCategory = 9,
}

/// Opaque per-category novelty index (instructions, trigram sets, and
/// responses of previously accepted pairs).
pub struct IgNoveltyIndex {
    inner: NoveltyIndex,
}

fn metric_status(error: &MetricError) -> IgStatus {
    match error {
        MetricError::NoWords => IgStatus::NoWords,
        MetricError::EmptyText => IgStatus::EmptyText,
    }
}

/// # Safety
/// `ptr` must be NULL or a valid NUL-terminated string.
unsafe fn text_arg<'a>(ptr: *const c_char) -> Result<&'a str, IgStatus> {
    if ptr.is_null() {
        return Err(IgStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| IgStatus::InvalidUtf8)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ig_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Fraction of words that are Bengali (code blocks stripped), in [0, 1].
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ig_bengali_word_ratio(text: *const c_char, out: *mut f64) -> IgStatus {
    if out.is_null() {
        return IgStatus::NullPointer;
    }
    let text = match text_arg(text) {
        Ok(text) => text,
        Err(status) => return status,
    };
    match bengali_word_ratio(text) {
        Ok(ratio) => {
            *out = ratio;
            IgStatus::Ok
        }
        Err(e) => metric_status(&e),
    }
}

/// True iff every character outside fenced code blocks is Bengali,
/// whitespace, common punctuation, or a digit.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ig_unicode_consistency(text: *const c_char, out: *mut bool) -> IgStatus {
    if out.is_null() {
        return IgStatus::NullPointer;
    }
    let text = match text_arg(text) {
        Ok(text) => text,
        Err(status) => return status,
    };
    *out = unicode_consistency(text);
    IgStatus::Ok
}

/// Character-trigram Jaccard similarity of two normalized texts, in [0, 1].
///
/// # Safety
/// `a` and `b` must be valid NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ig_trigram_similarity(
    a: *const c_char,
    b: *const c_char,
    out: *mut f64,
) -> IgStatus {
    if out.is_null() {
        return IgStatus::NullPointer;
    }
    let a = match text_arg(a) {
        Ok(text) => text,
        Err(status) => return status,
    };
    let b = match text_arg(b) {
        Ok(text) => text,
        Err(status) => return status,
    };
    match trigram_similarity(a, b) {
        Ok(similarity) => {
            *out = similarity;
            IgStatus::Ok
        }
        Err(e) => metric_status(&e),
    }
}

/// Distinct word tokens over total word tokens, in [0, 1].
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ig_type_token_ratio(text: *const c_char, out: *mut f64) -> IgStatus {
    if out.is_null() {
        return IgStatus::NullPointer;
    }
    let text = match text_arg(text) {
        Ok(text) => text,
        Err(status) => return status,
    };
    match type_token_ratio(text) {
        Ok(ratio) => {
            *out = ratio;
            IgStatus::Ok
        }
        Err(e) => metric_status(&e),
    }
}

/// Pass@1 over per-item correctness flags (nonzero = correct).
///
/// # Safety
/// `correct` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ig_pass_at_1(
    correct: *const u8,
    len: usize,
    out: *mut f64,
) -> IgStatus {
    if correct.is_null() || out.is_null() {
        return IgStatus::NullPointer;
    }
    if len == 0 {
        return IgStatus::EmptyInput;
    }
    let flags = std::slice::from_raw_parts(correct, len);
    let passed = flags.iter().filter(|flag| **flag != 0).count();
    *out = passed as f64 / len as f64;
    IgStatus::Ok
}

/// Whitespace-token and sentence counts for one UTF-8 text file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; the out-pointers must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ig_corpus_stats_file(
    path: *const c_char,
    out_tokens: *mut u64,
    out_sentences: *mut u64,
) -> IgStatus {
    if out_tokens.is_null() || out_sentences.is_null() {
        return IgStatus::NullPointer;
    }
    let path = match text_arg(path) {
        Ok(text) => text,
        Err(status) => return status,
    };
    let bytes = match std::fs::read(path) {
        Ok(bytes) => bytes,
        Err(_) => return IgStatus::IoError,
    };
    let text = match std::str::from_utf8(&bytes) {
        Ok(text) => text,
        Err(_) => return IgStatus::InvalidUtf8,
    };
    let (tokens, sentences) = instructgen::analytics::text_stats(text);
    *out_tokens = tokens;
    *out_sentences = sentences;
    IgStatus::Ok
}

/// Allocate an empty novelty index. Release with `ig_novelty_index_free`.
#[no_mangle]
pub extern "C" fn ig_novelty_index_new() -> *mut IgNoveltyIndex {
    Box::into_raw(Box::new(IgNoveltyIndex {
        inner: NoveltyIndex::new(),
    }))
}

/// Free an index created by `ig_novelty_index_new`. NULL is a no-op.
///
/// # Safety
/// `index` must be NULL or a pointer returned by `ig_novelty_index_new`
/// that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn ig_novelty_index_free(index: *mut IgNoveltyIndex) {
    if !index.is_null() {
        drop(Box::from_raw(index));
    }
}

/// Number of indexed entries.
///
/// # Safety
/// `index` must be a live pointer from `ig_novelty_index_new`; `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn ig_novelty_index_len(
    index: *const IgNoveltyIndex,
    out: *mut usize,
) -> IgStatus {
    if index.is_null() || out.is_null() {
        return IgStatus::NullPointer;
    }
    *out = (*index).inner.len();
    IgStatus::Ok
}

/// Index an instruction (and optionally its response; pass NULL for none)
/// under a category ("c1".."c10"). Ids must be unique.
///
/// # Safety
/// `index` must be a live, exclusively-held pointer; string arguments must
/// be valid NUL-terminated strings (response may be NULL).
#[no_mangle]
pub unsafe extern "C" fn ig_novelty_index_insert(
    index: *mut IgNoveltyIndex,
    id: *const c_char,
    category: *const c_char,
    instruction: *const c_char,
    response: *const c_char,
) -> IgStatus {
    if index.is_null() {
        return IgStatus::NullPointer;
    }
    let (id, category_str, instruction) =
        match (text_arg(id), text_arg(category), text_arg(instruction)) {
            (Ok(id), Ok(category), Ok(instruction)) => (id, category, instruction),
            (Err(s), _, _) | (_, Err(s), _) | (_, _, Err(s)) => return s,
        };
    let response = if response.is_null() {
        None
    } else {
        match text_arg(response) {
            Ok(text) => Some(text),
            Err(status) => return status,
        }
    };
    let Some(category) = Category::parse(category_str) else {
        return IgStatus::UnknownCategory;
    };
    match (*index).inner.insert(id, category, instruction, response) {
        Ok(()) => IgStatus::Ok,
        Err(_) => IgStatus::DuplicateId,
    }
}

/// Maximum trigram similarity of `instruction` against every indexed
/// instruction (0.0 on an empty index).
///
/// # Safety
/// `index` must be a live pointer; `instruction` a valid string; `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ig_novelty_max_similarity(
    index: *const IgNoveltyIndex,
    instruction: *const c_char,
    out: *mut f64,
) -> IgStatus {
    if index.is_null() || out.is_null() {
        return IgStatus::NullPointer;
    }
    let instruction = match text_arg(instruction) {
        Ok(text) => text,
        Err(status) => return status,
    };
    *out = (*index).inner.max_similarity(instruction);
    IgStatus::Ok
}

/// True iff the normalized response equals an indexed response in the same
/// category.
///
/// # Safety
/// `index` must be a live pointer; string arguments valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ig_novelty_is_duplicate_response(
    index: *const IgNoveltyIndex,
    category: *const c_char,
    response: *const c_char,
    out: *mut bool,
) -> IgStatus {
    if index.is_null() || out.is_null() {
        return IgStatus::NullPointer;
    }
    let (category_str, response) = match (text_arg(category), text_arg(response)) {
        (Ok(category), Ok(response)) => (category, response),
        (Err(s), _) | (_, Err(s)) => return s,
    };
    let Some(category) = Category::parse(category_str) else {
        return IgStatus::UnknownCategory;
    };
    *out = (*index).inner.has_duplicate_response(category, response);
    IgStatus::Ok
}
