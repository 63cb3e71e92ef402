//! Python bindings: `Dictionary`, `Analyzer`, `Parse`, plus `compile_lexicon`.

use std::path::PathBuf;
use std::sync::Arc;

use morphkit::compiler::{compile, ingest_text, ingest_xml, CompileOptions};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

fn value_error(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn load_error(e: morphkit::DictionaryError) -> PyErr {
    match e {
        morphkit::DictionaryError::Io(e) => PyIOError::new_err(e.to_string()),
        e => value_error(e),
    }
}

/// A compiled dictionary container.
#[pyclass(frozen, module = "pymorphkit")]
struct Dictionary {
    inner: Arc<morphkit::Dictionary>,
}

#[pymethods]
impl Dictionary {
    #[new]
    fn new(path: PathBuf) -> PyResult<Self> {
        let inner = morphkit::Dictionary::open(path).map_err(load_error)?;
        Ok(Dictionary { inner: Arc::new(inner) })
    }

    #[staticmethod]
    fn from_bytes(data: &[u8]) -> PyResult<Self> {
        let inner = morphkit::Dictionary::from_bytes(data).map_err(load_error)?;
        Ok(Dictionary { inner: Arc::new(inner) })
    }

    fn __contains__(&self, word: &str) -> bool {
        self.inner.contains_word(word)
    }

    /// `(dictionary spelling, tag, paradigm id, form index)` for every
    /// analysis of `word`, optional letters restored.
    fn lookup(&self, word: &str) -> Vec<(String, String, u16, u16)> {
        self.inner
            .lookup(word)
            .into_iter()
            .map(|a| (a.matched_word, a.tag.to_string(), a.paradigm_id, a.form_index))
            .collect()
    }

    #[getter]
    fn language(&self) -> String {
        self.inner.language().name.clone()
    }

    fn __repr__(&self) -> String {
        let meta = &self.inner.sections().meta;
        format!(
            "Dictionary(language={:?}, lexemes={}, forms={}, paradigms={})",
            meta.language, meta.lexemes, meta.forms, meta.paradigms
        )
    }
}

/// One analysis of a token.
#[pyclass(frozen, module = "pymorphkit")]
struct Parse {
    inner: morphkit::Parse,
}

#[pymethods]
impl Parse {
    #[getter]
    fn word(&self) -> &str {
        &self.inner.word
    }

    #[getter]
    fn tag(&self) -> String {
        self.inner.tag.to_string()
    }

    #[getter]
    fn grammemes(&self) -> Vec<String> {
        self.inner.tag.grammemes().to_vec()
    }

    #[getter]
    fn normal_form(&self) -> &str {
        &self.inner.normal_form
    }

    #[getter]
    fn score(&self) -> f64 {
        self.inner.score
    }

    /// Unit ids, innermost first.
    #[getter]
    fn trace(&self) -> Vec<String> {
        self.inner.unit_ids().into_iter().map(String::from).collect()
    }

    fn __eq__(&self, other: &Parse) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Parse(word={:?}, tag={:?}, normal_form={:?}, score={:.6})",
            self.inner.word,
            self.inner.tag.to_string(),
            self.inner.normal_form,
            self.inner.score
        )
    }
}

fn wrap(parses: Vec<morphkit::Parse>) -> Vec<Parse> {
    parses.into_iter().map(|inner| Parse { inner }).collect()
}

#[pyclass(frozen, module = "pymorphkit")]
struct Analyzer {
    inner: morphkit::Analyzer,
}

#[pymethods]
impl Analyzer {
    /// Accepts a `Dictionary` or a path to a container.
    #[new]
    fn new(source: &Bound<'_, PyAny>) -> PyResult<Self> {
        let dictionary = if let Ok(d) = source.cast::<Dictionary>() {
            let sections = d.get().inner.sections().clone();
            morphkit::Dictionary::from_sections(sections).map_err(load_error)?
        } else {
            let path: PathBuf = source.extract()?;
            morphkit::Dictionary::open(path).map_err(load_error)?
        };
        Ok(Analyzer {
            inner: morphkit::Analyzer::new(dictionary),
        })
    }

    #[getter]
    fn units(&self) -> Vec<String> {
        self.inner.unit_ids().into_iter().map(String::from).collect()
    }

    /// Parses of `token`, best first.
    fn parse(&self, token: &str) -> PyResult<Vec<Parse>> {
        self.inner.analyze(token).map(wrap).map_err(value_error)
    }

    fn normal_forms(&self, token: &str) -> PyResult<Vec<String>> {
        self.inner.normal_forms(token).map_err(value_error)
    }

    /// `(word, tag)` for every form of the parse's lexeme.
    fn lexeme(&self, parse: &Parse) -> PyResult<Vec<(String, String)>> {
        let forms = self.inner.get_lexeme(&parse.inner).map_err(value_error)?;
        Ok(forms.into_iter().map(|f| (f.word, f.tag.to_string())).collect())
    }

    fn inflect(&self, parse: &Parse, grammemes: Vec<String>) -> PyResult<Option<Parse>> {
        let required: Vec<&str> = grammemes.iter().map(String::as_str).collect();
        let found = self.inner.inflect_parse(&parse.inner, &required).map_err(value_error)?;
        Ok(found.map(|inner| Parse { inner }))
    }

    fn make_agree_with_number(&self, parse: &Parse, n: u64) -> PyResult<Option<Parse>> {
        let found = self.inner.make_agree_with_number(&parse.inner, n).map_err(value_error)?;
        Ok(found.map(|inner| Parse { inner }))
    }
}

/// Compile an XML or text lexicon into a container at `out`. Returns
/// `(lexemes, forms, paradigms)`.
#[pyfunction]
fn compile_lexicon(lexicon: PathBuf, out: PathBuf) -> PyResult<(usize, usize, usize)> {
    let bytes = std::fs::read(&lexicon).map_err(|e| PyIOError::new_err(e.to_string()))?;
    let xml = bytes.iter().find(|b| !b.is_ascii_whitespace()) == Some(&b'<');
    let source = if xml { ingest_xml(bytes.as_slice()) } else { ingest_text(bytes.as_slice()) }
        .map_err(value_error)?;
    let compiled = compile(source, &CompileOptions::default()).map_err(value_error)?;
    std::fs::write(&out, compiled.sections.to_bytes()).map_err(|e| PyIOError::new_err(e.to_string()))?;
    let s = compiled.stats;
    Ok((s.lexemes, s.forms, s.paradigms))
}

#[pymodule]
fn pymorphkit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Dictionary>()?;
    m.add_class::<Analyzer>()?;
    m.add_class::<Parse>()?;
    m.add_function(wrap_pyfunction!(compile_lexicon, m)?)?;
    Ok(())
}
