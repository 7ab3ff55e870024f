//! Structured basis labels.
//!
//! Every vector space in the crate carries a basis of symbolic labels.
//! Labels are small trees; the derived ordering together with a degree key
//! gives the global canonical order that fixes pivot choices and hence all
//! quotient representatives.

use serde::Serialize;
use std::fmt;

/// A symbolic basis label.
///
/// `Word` is a product word whose letters are themselves labels (tagged by
/// `Side` inside free products). `Form` is `a0 da1 ... dan` with an optional
/// leading algebra element (`None` encodes the formal unit). `Pairs` is the
/// curvature normal form `a0 w(a1,a2) w(a3,a4) ...` of the universal model,
/// and `NormalQ` the normal form `a0 qa1 ... qan` of a cylinder stage.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Label {
    /// Named atom from an input algebra ("e", "eps", ...).
    Atom(String),
    /// Formal unit adjoined by unitalization.
    Unit,
    /// Generator v_i of a free module.
    Gen(u32),
    /// A letter in a free product: side 0 or 1, wrapping a factor label.
    Side(u8, Box<Label>),
    /// Product word of letters.
    Word(Vec<Label>),
    /// Differential form label: lead (None = formal unit coefficient) and d-letters.
    Form { lead: Option<Box<Label>>, ds: Vec<Label> },
    /// Cylinder normal form: lead (None = no plain prefix) and q-letters.
    NormalQ { lead: Option<Box<Label>>, qs: Vec<Label> },
    /// Universal-model normal form: lead and curvature pairs.
    Pairs { lead: Option<Box<Label>>, ws: Vec<(Label, Label)> },
    /// Pair tag (t-degree, inner) for polynomial extensions and graded sums.
    Graded(u32, Box<Label>),
}

impl Label {
    pub fn atom(s: &str) -> Self {
        Label::Atom(s.to_string())
    }

    pub fn side(side: u8, inner: Label) -> Self {
        Label::Side(side, Box::new(inner))
    }

    /// Number of letters for word-like labels, used as the grading key.
    pub fn word_len(&self) -> usize {
        match self {
            Label::Word(ls) => ls.len(),
            _ => 1,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Atom(s) => write!(f, "{s}"),
            Label::Unit => write!(f, "1~"),
            Label::Gen(i) => write!(f, "v{i}"),
            Label::Side(s, inner) => write!(f, "{inner}[{s}]"),
            Label::Word(ls) => {
                let parts: Vec<String> = ls.iter().map(|l| l.to_string()).collect();
                write!(f, "{}", parts.join("."))
            }
            Label::Form { lead, ds } => {
                match lead {
                    Some(l) => write!(f, "{l}")?,
                    None => write!(f, "1~")?,
                }
                for d in ds {
                    write!(f, " d{d}")?;
                }
                Ok(())
            }
            Label::NormalQ { lead, qs } => {
                match lead {
                    Some(l) => write!(f, "{l}")?,
                    None => write!(f, "1~")?,
                }
                for q in qs {
                    write!(f, " q{q}")?;
                }
                Ok(())
            }
            Label::Pairs { lead, ws } => {
                match lead {
                    Some(l) => write!(f, "{l}")?,
                    None => write!(f, "1~")?,
                }
                for (a, b) in ws {
                    write!(f, " w({a},{b})")?;
                }
                Ok(())
            }
            Label::Graded(d, inner) => write!(f, "{inner}*t^{d}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_forms() {
        let l = Label::Form {
            lead: None,
            ds: vec![Label::atom("a"), Label::atom("b")],
        };
        assert_eq!(l.to_string(), "1~ da db");
    }

    #[test]
    fn order_is_total_and_stable() {
        let mut v = vec![
            Label::atom("b"),
            Label::atom("a"),
            Label::Unit,
            Label::Word(vec![Label::atom("a")]),
        ];
        v.sort();
        let w = v.clone();
        v.sort();
        assert_eq!(v, w);
    }
}
