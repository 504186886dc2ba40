//! Model files: a TOML document listing terms in order.
//!
//! ```toml
//! # optional; applies to gw terms without their own `decay`
//! default_decay = 0.5
//!
//! [[term]]
//! kind = "edges"
//!
//! [[term]]
//! kind = "gwesp_otp"      # also: gwnsp_otp, gwidegree, gwodegree
//! decay = 0.5
//!
//! [[term]]
//! kind = "nodeofactor"    # also: nodeifactor
//! level = "organization"  # organization | leader | influential
//!
//! [[term]]
//! kind = "nodeicov"       # also: nodeocov
//! covariate = "followers" # the default
//! ```

use serde::Deserialize;
use thiserror::Error;

use crate::graph::Role;
use crate::terms::{Direction, ModelSpec, TermKind, TermSpec, DEFAULT_DECAY, FOLLOWERS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelFileError {
    #[error("model file: {0}")]
    Syntax(String),
    #[error("model file line {line}, term #{index}, field `{field}`: {message}")]
    Field {
        line: usize,
        index: usize,
        field: &'static str,
        message: String,
    },
    #[error("model file lists no terms")]
    Empty,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    default_decay: Option<f64>,
    #[serde(default)]
    term: Vec<toml::Spanned<RawTerm>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    kind: String,
    decay: Option<f64>,
    level: Option<String>,
    covariate: Option<String>,
}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

/// Parses and validates a model file.
pub fn parse_model_spec(src: &str) -> Result<ModelSpec, ModelFileError> {
    let raw: RawFile = toml::from_str(src).map_err(|e| {
        let line = e.span().map(|s| line_of(src, s.start));
        match line {
            Some(l) => ModelFileError::Syntax(format!("line {l}: {}", e.message())),
            None => ModelFileError::Syntax(e.message().to_string()),
        }
    })?;
    if raw.term.is_empty() {
        return Err(ModelFileError::Empty);
    }
    let default_decay = raw.default_decay.unwrap_or(DEFAULT_DECAY);
    let mut terms = Vec::with_capacity(raw.term.len());
    for (idx, spanned) in raw.term.iter().enumerate() {
        let line = line_of(src, spanned.span().start);
        let index = idx + 1;
        let t = spanned.get_ref();
        let err = |field: &'static str, message: String| ModelFileError::Field {
            line,
            index,
            field,
            message,
        };
        let kind = TermKind::from_keyword(t.kind.trim()).ok_or_else(|| {
            let known: Vec<_> = TermKind::ALL.iter().map(TermKind::keyword).collect();
            err("kind", format!("unknown kind {:?}; expected one of {}", t.kind, known.join(", ")))
        })?;
        let is_gw = matches!(
            kind,
            TermKind::GwespOtp | TermKind::GwnspOtp | TermKind::GwInDegree | TermKind::GwOutDegree
        );
        let is_factor = matches!(kind, TermKind::NodeOutFactor | TermKind::NodeInFactor);
        let is_cov = matches!(kind, TermKind::NodeOutCov | TermKind::NodeInCov);
        if !is_gw && t.decay.is_some() {
            return Err(err("decay", format!("not allowed for kind `{}`", kind.keyword())));
        }
        if !is_factor && t.level.is_some() {
            return Err(err("level", format!("not allowed for kind `{}`", kind.keyword())));
        }
        if !is_cov && t.covariate.is_some() {
            return Err(err("covariate", format!("not allowed for kind `{}`", kind.keyword())));
        }
        let decay = t.decay.unwrap_or(default_decay);
        if is_gw && !(decay.is_finite() && decay >= 0.0) {
            return Err(err("decay", format!("must be finite and >= 0, got {decay}")));
        }
        let level = if is_factor {
            let raw_level = t
                .level
                .as_deref()
                .ok_or_else(|| err("level", "required for factor terms".into()))?;
            let level = raw_level
                .parse::<Role>()
                .map_err(|e| err("level", e.to_string()))?;
            if level == Role::Ordinary {
                return Err(err(
                    "level",
                    "`ordinary` is the reference category and cannot be a level".into(),
                ));
            }
            Some(level)
        } else {
            None
        };
        let covariate = t.covariate.clone().unwrap_or_else(|| FOLLOWERS.to_string());
        let spec = match kind {
            TermKind::Edges => TermSpec::Edges,
            TermKind::GwespOtp => TermSpec::GwespOtp { decay },
            TermKind::GwnspOtp => TermSpec::GwnspOtp { decay },
            TermKind::GwInDegree => TermSpec::GwDegree { direction: Direction::In, decay },
            TermKind::GwOutDegree => TermSpec::GwDegree { direction: Direction::Out, decay },
            TermKind::NodeOutFactor => TermSpec::NodeFactor {
                direction: Direction::Out,
                level: level.unwrap(),
            },
            TermKind::NodeInFactor => TermSpec::NodeFactor {
                direction: Direction::In,
                level: level.unwrap(),
            },
            TermKind::NodeOutCov => TermSpec::NodeCov { direction: Direction::Out, covariate },
            TermKind::NodeInCov => TermSpec::NodeCov { direction: Direction::In, covariate },
        };
        terms.push(spec);
    }
    Ok(ModelSpec::new(terms))
}

/// Renders a spec in the model-file format; `parse_model_spec` reads it back.
pub fn render_model_spec(spec: &ModelSpec) -> String {
    let mut out = String::new();
    for t in &spec.terms {
        out.push_str("[[term]]\n");
        out.push_str(&format!("kind = \"{}\"\n", t.kind().keyword()));
        if let Some(d) = t.decay() {
            out.push_str(&format!("decay = {d:?}\n"));
        }
        if let Some(l) = t.level() {
            out.push_str(&format!("level = \"{l}\"\n"));
        }
        if let TermSpec::NodeCov { covariate, .. } = t {
            out.push_str(&format!("covariate = \"{covariate}\"\n"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_spec() {
        let src = r#"
default_decay = 0.25

[[term]]
kind = "edges"

[[term]]
kind = "gwnsp_otp"

[[term]]
kind = "gwesp_otp"
decay = 0.5

[[term]]
kind = "nodeofactor"
level = "Organization"

[[term]]
kind = "nodeicov"
"#;
        let spec = parse_model_spec(src).unwrap();
        assert_eq!(
            spec.terms,
            vec![
                TermSpec::Edges,
                TermSpec::GwnspOtp { decay: 0.25 },
                TermSpec::GwespOtp { decay: 0.5 },
                TermSpec::NodeFactor {
                    direction: Direction::Out,
                    level: Role::Organization
                },
                TermSpec::NodeCov {
                    direction: Direction::In,
                    covariate: "followers".into()
                },
            ]
        );
    }

    #[test]
    fn render_roundtrips_standard() {
        let spec = ModelSpec::standard(0.5);
        assert_eq!(parse_model_spec(&render_model_spec(&spec)).unwrap(), spec);
    }

    #[test]
    fn field_errors_name_line_and_field() {
        let src = "[[term]]\nkind = \"edges\"\n\n[[term]]\nkind = \"nodeifactor\"\nlevel = \"ordinary\"\n";
        let err = parse_model_spec(src).unwrap_err();
        match &err {
            ModelFileError::Field {
                line, index, field, ..
            } => {
                assert_eq!((*line, *index, *field), (4, 2, "level"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().contains("line 4"));

        let err = parse_model_spec("[[term]]\nkind = \"edges\"\ndecay = 0.5\n").unwrap_err();
        assert!(matches!(err, ModelFileError::Field { field: "decay", .. }));

        let err = parse_model_spec("[[term]]\nkind = \"triangles\"\n").unwrap_err();
        assert!(err.to_string().contains("triangles"));

        let err = parse_model_spec("[[term]]\nkind = \"gwidegree\"\ndecay = -1.0\n").unwrap_err();
        assert!(matches!(err, ModelFileError::Field { field: "decay", .. }));

        let err = parse_model_spec("[[term]]\nkind = \"edges\"\nbogus = 1\n").unwrap_err();
        assert!(matches!(err, ModelFileError::Syntax(ref m) if m.contains("line")), "{err}");

        assert_eq!(parse_model_spec(""), Err(ModelFileError::Empty));
    }
}
