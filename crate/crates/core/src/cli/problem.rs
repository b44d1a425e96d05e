//! Input schema. One JSON document per problem, discriminated by `"kind"`; scalars are
//! integers or strings `"p/q"`.

use crate::assoc_deform::AssocPresentation;
use crate::bialgebra_deform::BialgebraPresentation;
use crate::error::{Error, Result};
use crate::graded_core::linalg::Matrix;
use crate::graded_core::scalar::parse_rational;
use crate::graded_core::{GradedSpace, MultilinearMap, Rational};
use crate::lie_deform::LiePresentation;
use crate::vdata::DirectLInf;
use serde::{Deserialize, Deserializer};

#[derive(Clone, Debug, PartialEq)]
pub struct Scalar(pub Rational);

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(Scalar(Rational::from_integer(n.into()))),
            Raw::Str(s) => parse_rational(&s)
                .map(Scalar)
                .ok_or_else(|| serde::de::Error::custom(format!("not an exact scalar: {s:?}"))),
        }
    }
}

pub type Entry = (usize, usize, usize, Scalar);
pub type MatrixSpec = Vec<Vec<Scalar>>;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieSpec {
    pub dim: usize,
    #[serde(default)]
    pub bracket: Vec<Entry>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BialgebraSpec {
    pub dim: usize,
    #[serde(default)]
    pub bracket: Vec<Entry>,
    /// `(j, k, i, γ)` for `δ(e_i) ∋ γ e_j ∧ e_k`, i.e. `[e^j, e^k] = Σ γ e^i` on the dual.
    #[serde(default)]
    pub cobracket: Vec<Entry>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssocSpec {
    pub dim: usize,
    #[serde(default)]
    pub product: Vec<Entry>,
}

/// Sparse table `inputs ↦ Σ c e_out`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSpec {
    pub arity: usize,
    #[serde(default)]
    pub entries: Vec<(Vec<usize>, usize, Scalar)>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinfSpec {
    pub degrees: Vec<i32>,
    #[serde(default)]
    pub brackets: Vec<TableSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AinfSpec {
    pub degrees: Vec<i32>,
    #[serde(default)]
    pub maps: Vec<TableSpec>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMode {
    /// Unknown map, fixed structures.
    #[default]
    Map,
    /// Unknown structure constants and map together.
    Simultaneous,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub restarts: Option<usize>,
    pub initial: Option<Vec<f64>>,
    #[serde(default)]
    pub mode: SolveMode,
    pub max_den: Option<u64>,
}

/// Increments `(Δ̃, Φ̃)` of a Lie morphism problem.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieDeformation {
    pub u: Option<LieSpec>,
    pub v: Option<LieSpec>,
    pub map: Option<MatrixSpec>,
}

/// Declares `Problem` together with one strictly typed file struct per kind, so that schema
/// errors keep the position of the offending token.
macro_rules! problem_kinds {
    ($($variant:ident, $file:ident, $tag:literal { $($field:ident : $ty:ty),* $(,)? });* $(;)?) => {
        #[derive(Clone, Debug)]
        pub enum Problem {
            $($variant { $($field: $ty),* }),*
        }

        $(
            #[derive(Deserialize)]
            #[serde(deny_unknown_fields)]
            #[allow(dead_code)]
            struct $file {
                kind: String,
                $($field: $ty),*
            }
        )*

        impl Problem {
            pub fn kind(&self) -> &'static str {
                match self {
                    $(Problem::$variant { .. } => $tag),*
                }
            }

            fn from_text(kind: &str, text: &str) -> Result<Problem> {
                match kind {
                    $($tag => {
                        let f: $file = serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))?;
                        Ok(Problem::$variant { $($field: f.$field),* })
                    })*
                    other => Err(Error::Input(format!(
                        "unknown kind {other:?}; expected one of {}",
                        [$($tag),*].join(", ")
                    ))),
                }
            }
        }
    };
}

problem_kinds! {
    Lie, LieFile, "lie" { lie: LieSpec };
    LieMorphism, LieMorphismFile, "lie-morphism" {
        u: LieSpec,
        v: LieSpec,
        map: Option<MatrixSpec>,
        deformation: Option<LieDeformation>,
        solver: Option<SolverSpec>,
    };
    Subalgebra, SubalgebraFile, "subalgebra" {
        g: LieSpec,
        u_basis: MatrixSpec,
        v_basis: MatrixSpec,
        map: Option<MatrixSpec>,
        solver: Option<SolverSpec>,
    };
    Bialgebra, BialgebraFile, "bialgebra" {
        u: BialgebraSpec,
        v: BialgebraSpec,
        map: Option<MatrixSpec>,
        solver: Option<SolverSpec>,
    };
    Assoc, AssocFile, "assoc" { algebra: AssocSpec };
    AssocMorphism, AssocMorphismFile, "assoc-morphism" {
        u: AssocSpec,
        v: AssocSpec,
        map: Option<MatrixSpec>,
        solver: Option<SolverSpec>,
    };
    Linf, LinfFile, "linf" {
        linf: LinfSpec,
        candidate: Option<Vec<(usize, Scalar)>>,
        solver: Option<SolverSpec>,
    };
    LinfMorphism, LinfMorphismFile, "linf-morphism" {
        u: LinfSpec,
        v: LinfSpec,
        phi: Option<Vec<TableSpec>>,
    };
    Ainf, AinfFile, "ainf" {
        algebra: Option<AssocSpec>,
        ainf: Option<AinfSpec>,
    };
}

fn entries(es: &[Entry]) -> Vec<(usize, usize, usize, Rational)> {
    es.iter().map(|(i, j, k, c)| (*i, *j, *k, c.0.clone())).collect()
}

impl LieSpec {
    pub fn build(&self) -> Result<LiePresentation> {
        LiePresentation::from_entries(self.dim, &entries(&self.bracket))
    }
}

impl BialgebraSpec {
    pub fn build(&self) -> Result<BialgebraPresentation> {
        BialgebraPresentation::new(
            LiePresentation::from_entries(self.dim, &entries(&self.bracket))?,
            LiePresentation::from_entries(self.dim, &entries(&self.cobracket))?,
        )
    }
}

impl AssocSpec {
    pub fn build(&self) -> Result<AssocPresentation> {
        AssocPresentation::from_entries(self.dim, &entries(&self.product))
    }
}

pub fn build_matrix(m: &MatrixSpec, rows: usize, cols: usize) -> Result<Matrix> {
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        return Err(Error::SizeMismatch(format!("expected a {rows} × {cols} matrix")));
    }
    Ok(m.iter().map(|r| r.iter().map(|c| c.0.clone()).collect()).collect())
}

pub fn build_vectors(m: &MatrixSpec) -> Vec<Vec<Rational>> {
    m.iter().map(|r| r.iter().map(|c| c.0.clone()).collect()).collect()
}

fn build_table(t: &TableSpec, source: &GradedSpace, target: &GradedSpace, degree: i32, symmetric: bool) -> Result<MultilinearMap> {
    let mut m = MultilinearMap::new(source.clone(), target.clone(), t.arity, degree, symmetric);
    for (inp, out, c) in &t.entries {
        if inp.len() != t.arity {
            return Err(Error::Input(format!("entry {inp:?} does not have arity {}", t.arity)));
        }
        if inp.iter().any(|&i| i >= source.dim()) || *out >= target.dim() {
            return Err(Error::SizeMismatch(format!("entry {inp:?} -> {out} is out of range")));
        }
        m.add_entry(inp, *out, c.0.clone())?;
    }
    Ok(m)
}

impl LinfSpec {
    pub fn space(&self) -> GradedSpace {
        GradedSpace::new(self.degrees.clone())
    }

    pub fn build(&self) -> Result<DirectLInf> {
        let sp = self.space();
        let tables = self.brackets.iter().map(|t| build_table(t, &sp, &sp, 1, true)).collect::<Result<Vec<_>>>()?;
        DirectLInf::new(sp, tables)
    }
}

impl AinfSpec {
    pub fn space(&self) -> GradedSpace {
        GradedSpace::new(self.degrees.clone())
    }

    pub fn build(&self) -> Result<Vec<MultilinearMap>> {
        let sp = self.space();
        self.maps.iter().map(|t| build_table(t, &sp, &sp, 1, false)).collect()
    }
}

/// Components `Φ_n : S^n U → V` of degree 0.
pub fn build_family(ts: &[TableSpec], u: &GradedSpace, v: &GradedSpace) -> Result<Vec<MultilinearMap>> {
    ts.iter().map(|t| build_table(t, u, v, 0, true)).collect()
}

/// Parses a problem; errors carry the line and column of the offending token.
pub fn parse(text: &str) -> Result<(Problem, serde_json::Value)> {
    let raw: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))?;
    let kind = raw
        .get("kind")
        .and_then(|k| k.as_str())
        .ok_or_else(|| Error::Input("missing string field \"kind\"".into()))?;
    Ok((Problem::from_text(kind, text)?, raw))
}
