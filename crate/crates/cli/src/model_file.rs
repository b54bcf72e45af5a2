//! Plain-text PCA model file.
//!
//! ```text
//! # mixreduce pca model
//! features <q>
//! components <r>
//! names
//! <one feature name per line>
//! sdev
//! <r values>
//! center
//! <q values>
//! rotation
//! <q lines of r values>
//! ```
//!
//! Numbers are written with 17 significant digits so they read back exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use mixreduce_core::pca::PcaModel;
use mixreduce_core::{Error, Matrix, Result};

const MAGIC: &str = "# mixreduce pca model";

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn row(values: impl Iterator<Item = f64>) -> String {
    values.map(num).collect::<Vec<_>>().join(" ")
}

pub fn format_model(model: &PcaModel, names: &[String]) -> Result<String> {
    if names.len() != model.n_features() {
        return Err(Error::DimensionMismatch {
            expected: model.n_features().to_string(),
            found: names.len().to_string(),
        });
    }
    let (q, r) = (model.n_features(), model.n_components());
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}\nfeatures {q}\ncomponents {r}\nnames");
    for name in names {
        let _ = writeln!(out, "{}", name.replace(['\n', '\r'], " "));
    }
    let _ = writeln!(out, "sdev\n{}", row(model.sdev().iter().copied()));
    let _ = writeln!(out, "center\n{}", row(model.center().iter().copied()));
    out.push_str("rotation\n");
    let rot = model.rotation();
    for i in 0..q {
        let _ = writeln!(out, "{}", row((0..r).map(|j| rot[(i, j)])));
    }
    Ok(out)
}

pub fn write_model(model: &PcaModel, names: &[String], path: &Path) -> Result<()> {
    let text = format_model(model, names)?;
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: u64,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str> {
        match self.inner.next() {
            Some((i, l)) => {
                self.last = i as u64 + 1;
                Ok(l)
            }
            None => Err(self.error("unexpected end of model file")),
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.last,
            message: message.into(),
        }
    }

    fn keyword(&mut self, word: &str) -> Result<()> {
        let l = self.next()?;
        if l.trim() != word {
            return Err(self.error(format!("expected `{word}`, found `{l}`")));
        }
        Ok(())
    }

    fn count(&mut self, word: &str) -> Result<usize> {
        let l = self.next()?;
        l.strip_prefix(word)
            .and_then(|rest| rest.trim().parse().ok())
            .ok_or_else(|| self.error(format!("expected `{word} <count>`")))
    }

    fn numbers(&mut self, expected: usize) -> Result<Vec<f64>> {
        let l = self.next()?;
        let values: Vec<f64> = l
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| self.error(format!("`{t}`: {e}"))))
            .collect::<Result<_>>()?;
        if values.len() != expected {
            return Err(self.error(format!("expected {expected} values, found {}", values.len())));
        }
        Ok(values)
    }
}

pub fn parse_model(text: &str) -> Result<(PcaModel, Vec<String>)> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    lines.keyword(MAGIC)?;
    let q = lines.count("features")?;
    let r = lines.count("components")?;
    lines.keyword("names")?;
    let names = (0..q).map(|_| lines.next().map(str::to_owned)).collect::<Result<Vec<_>>>()?;
    lines.keyword("sdev")?;
    let sdev = lines.numbers(r)?;
    lines.keyword("center")?;
    let center = lines.numbers(q)?;
    lines.keyword("rotation")?;
    let mut rot = Vec::with_capacity(q * r);
    for _ in 0..q {
        rot.extend(lines.numbers(r)?);
    }
    let model = PcaModel::from_parts(Matrix::from_row_slice(q, r, &rot), sdev, center)?;
    Ok((model, names))
}

pub fn read_model(path: &Path) -> Result<(PcaModel, Vec<String>)> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_model(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mixreduce_core::pca::fit_pca;

    #[test]
    fn round_trip_is_exact() {
        let m = Matrix::from_row_slice(
            4,
            3,
            &[1.0, 0.1, 3.3, 2.0, -0.7, 1.0 / 3.0, 0.5, 0.25, -2.0, 4.0, 1e-7, 9.0],
        );
        let model = fit_pca(&m).unwrap();
        let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let text = format_model(&model, &names).unwrap();
        let (back, back_names) = parse_model(&text).unwrap();
        assert_eq!(back_names, names);
        assert_eq!(back.sdev(), model.sdev());
        assert_eq!(back.center(), model.center());
        assert_eq!(back.rotation(), model.rotation());
    }

    #[test]
    fn truncated_file_reports_line() {
        let err = parse_model("# mixreduce pca model\nfeatures 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn name_count_checked() {
        let m = Matrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 1.0, 3.0, 5.0]);
        let model = fit_pca(&m).unwrap();
        assert!(format_model(&model, &["x".to_string()]).is_err());
    }
}
