use std::fmt;
use std::fs;
use std::io::Read;
use std::path::Path;

use freelines::arrangement::{Arrangement, ElemDoc, Line, ProjPoint};
use freelines::exactfield::{parse_rational, FieldElem, FieldSpec};
use freelines::gallery;

/// Anything wrong with user input; maps to exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn bad(msg: impl Into<String>) -> anyhow::Error {
    InputError(msg.into()).into()
}

pub struct Loaded {
    pub name: String,
    pub arrangement: Arrangement,
    pub extras: Vec<Line>,
}

/// A document path, `-` for stdin, or `gallery:NAME`.
pub fn load(path: &str) -> anyhow::Result<Loaded> {
    if let Some(name) = path.strip_prefix("gallery:") {
        let e = gallery::entry_by_name(name).map_err(|e| bad(e.to_string()))?;
        return Ok(Loaded {
            name: e.name,
            arrangement: e.arrangement,
            extras: e.extra_lines,
        });
    }
    let text = if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| bad(format!("reading stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| bad(format!("{path}: {e}")))?
    };
    let doc: freelines::arrangement::ArrangementDoc =
        serde_json::from_str(&text).map_err(|e| bad(format!("{path}: {e}")))?;
    let arrangement = Arrangement::from_document(&doc).map_err(|e| bad(format!("{path}: {e}")))?;
    let name = doc.name.clone().unwrap_or_else(|| {
        Path::new(path)
            .file_stem()
            .map_or_else(|| "input".to_string(), |s| s.to_string_lossy().into_owned())
    });
    Ok(Loaded {
        name,
        arrangement,
        extras: Vec::new(),
    })
}

fn elem(field: &FieldSpec, text: &str) -> anyhow::Result<FieldElem> {
    let t = text.trim();
    if t.starts_with('[') {
        let doc: ElemDoc = serde_json::from_str(t).map_err(|e| bad(format!("{t}: {e}")))?;
        return doc.to_elem(field).map_err(|e| bad(format!("{t}: {e}")));
    }
    let q = parse_rational(t).map_err(|e| bad(format!("{t}: {e}")))?;
    Ok(field.from_rational(q))
}

/// `a:b:c`; each coordinate a rational or a coefficient list `[c0,c1,…]`.
pub fn point(field: &FieldSpec, text: &str) -> anyhow::Result<ProjPoint> {
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, c] = parts[..] else {
        return Err(bad(format!("point {text:?} needs three coordinates a:b:c")));
    };
    ProjPoint::new([elem(field, a)?, elem(field, b)?, elem(field, c)?]).map_err(|e| bad(e.to_string()))
}

/// `a,b,c` with rational entries, or a JSON triple such as `[[0,1],1,0]`.
pub fn line(field: &FieldSpec, text: &str) -> anyhow::Result<Line> {
    let t = text.trim();
    let coords: [FieldElem; 3] = if t.starts_with('[') {
        let docs: [ElemDoc; 3] = serde_json::from_str(t).map_err(|e| bad(format!("line {t:?}: {e}")))?;
        let mut out = Vec::with_capacity(3);
        for d in &docs {
            out.push(d.to_elem(field).map_err(|e| bad(format!("line {t:?}: {e}")))?);
        }
        out.try_into().expect("three entries")
    } else {
        let parts: Vec<&str> = t.split(',').collect();
        let [a, b, c] = parts[..] else {
            return Err(bad(format!("line {t:?} needs three coefficients a,b,c")));
        };
        [elem(field, a)?, elem(field, b)?, elem(field, c)?]
    };
    Line::new(coords).map_err(|e| bad(e.to_string()))
}
