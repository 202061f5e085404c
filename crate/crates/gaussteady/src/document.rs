// SPDX-License-Identifier: Apache-2.0

//! JSON input documents: models (catalog or explicit) and covariance matrices.

use std::path::Path;

use gaussteady_core::{
    catalog_build, CatalogId, CatalogParams, Complex64, CVec, LindbladVector, ModelSpec, QuadraticHamiltonian, RMat,
    RVec, Tolerances,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Partial override of the default tolerances.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eig_zero_band: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stability_margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_tol: Option<f64>,
}

impl ToleranceOverrides {
    pub fn apply(&self, base: Tolerances) -> Result<Tolerances, CliError> {
        let t = Tolerances {
            eig_zero_band: self.eig_zero_band.unwrap_or(base.eig_zero_band),
            stability_margin: self.stability_margin.unwrap_or(base.stability_margin),
            residual_tol: self.residual_tol.unwrap_or(base.residual_tol),
        };
        t.validate().map_err(CliError::input)?;
        Ok(t)
    }
}

/// One jump operator `L = λ·Jx + μ`, split into real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladEntry {
    pub lambda_re: Vec<f64>,
    #[serde(default)]
    pub lambda_im: Option<Vec<f64>>,
    #[serde(default)]
    pub mu_re: f64,
    #[serde(default)]
    pub mu_im: f64,
}

/// Raw document as it appears on disk; exactly one of the three shapes must be filled.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<std::collections::BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hessian: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lindblad: Option<Vec<LindbladEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cm: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
}

/// What a validated document describes.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Catalog { id: CatalogId, params: CatalogParams },
    Explicit(ModelSpec),
    Covariance(RMat),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub source: Source,
    pub tolerances: ToleranceOverrides,
}

impl Document {
    pub fn catalog(id: CatalogId, params: CatalogParams) -> Self {
        Document { source: Source::Catalog { id, params }, tolerances: ToleranceOverrides::default() }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let raw: RawDocument =
            serde_json::from_str(text).map_err(|e| CliError::input(format!("malformed document: {e}")))?;
        raw.validate()
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// The model behind the document, built with the given overrides on catalog parameters.
    pub fn model(&self) -> Result<ModelSpec, CliError> {
        match &self.source {
            Source::Catalog { id, params } => catalog_build(*id, params).map_err(CliError::input),
            Source::Explicit(m) => Ok(m.clone()),
            Source::Covariance(_) => Err(CliError::input("a covariance document has no dynamics")),
        }
    }

    pub fn catalog_id(&self) -> Option<CatalogId> {
        match &self.source {
            Source::Catalog { id, .. } => Some(*id),
            _ => None,
        }
    }

    /// Sets a catalog parameter, dropping any canonical values the name would be shadowed by.
    pub fn set_param(&mut self, name: &str, value: f64) -> Result<(), CliError> {
        match &mut self.source {
            Source::Catalog { id, params } => {
                *params = with_override(*id, params, name, value)?;
                Ok(())
            }
            _ => Err(CliError::input(format!("parameter `{name}` needs a catalog model"))),
        }
    }
}

/// `params` with `name = value`; an alias replaces the canonical entries it stands for.
pub fn with_override(id: CatalogId, params: &CatalogParams, name: &str, value: f64) -> Result<CatalogParams, CliError> {
    let targets = id
        .expand(name)
        .ok_or_else(|| CliError::input(format!("`{name}` is not a parameter of {id}")))?;
    let mut out = CatalogParams::new();
    for (k, v) in params.iter() {
        let shadowed = id.expand(k).map(|t| t.iter().all(|x| targets.contains(x))).unwrap_or(false);
        if k != name && !shadowed {
            out.set(k, v);
        }
    }
    out.set(name, value);
    Ok(out)
}

fn finite(values: &[f64], what: &str) -> Result<(), CliError> {
    if values.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(CliError::input(format!("{what} has a non-finite entry")))
    }
}

/// Row-major square matrix from nested arrays.
pub fn square_matrix(rows: &[Vec<f64>], what: &str) -> Result<RMat, CliError> {
    let d = rows.len();
    if d == 0 {
        return Err(CliError::input(format!("{what} is empty")));
    }
    if let Some(r) = rows.iter().find(|r| r.len() != d) {
        return Err(CliError::input(format!("{what} is not square (row of length {} in a {d}-row matrix)", r.len())));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    finite(&flat, what)?;
    Ok(RMat::from_row_slice(d, d, &flat))
}

pub fn matrix_rows(m: &RMat) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

impl RawDocument {
    pub fn validate(self) -> Result<Document, CliError> {
        let tolerances = self.tolerances.clone().unwrap_or_default();
        // fail early on bad overrides
        tolerances.apply(Tolerances::default())?;
        let explicit = self.n.is_some() || self.hessian.is_some() || self.xi.is_some() || self.h0.is_some() || self.lindblad.is_some();
        let shapes = [self.catalog.is_some(), explicit, self.cm.is_some()].iter().filter(|b| **b).count();
        if shapes != 1 {
            return Err(CliError::input(
                "document needs exactly one of: \"catalog\", an explicit model (\"n\", \"hessian\", ...), or \"cm\"",
            ));
        }
        if self.params.is_some() && self.catalog.is_none() {
            return Err(CliError::input("\"params\" only applies to catalog documents"));
        }
        let source = if let Some(name) = self.catalog {
            let id: CatalogId = name.parse().map_err(CliError::input)?;
            let mut params = CatalogParams::new();
            for (k, v) in self.params.unwrap_or_default() {
                params.set(&k, v);
            }
            // surfaces unknown names and bad values now rather than at build time
            params.resolve(id).map_err(CliError::input)?;
            Source::Catalog { id, params }
        } else if let Some(cm) = self.cm {
            Source::Covariance(square_matrix(&cm, "cm")?)
        } else {
            Source::Explicit(explicit_model(self.n, self.hessian, self.xi, self.h0, self.lindblad.unwrap_or_default())?)
        };
        Ok(Document { source, tolerances })
    }
}

fn explicit_model(
    n: Option<usize>,
    hessian: Option<Vec<Vec<f64>>>,
    xi: Option<Vec<f64>>,
    h0: Option<f64>,
    lindblad: Vec<LindbladEntry>,
) -> Result<ModelSpec, CliError> {
    let n = n.ok_or_else(|| CliError::input("explicit model needs \"n\""))?;
    if n == 0 {
        return Err(CliError::input("\"n\" must be at least 1"));
    }
    let d = 2 * n;
    let h = match hessian {
        Some(rows) => square_matrix(&rows, "hessian")?,
        None => RMat::zeros(d, d),
    };
    if h.nrows() != d {
        return Err(CliError::input(format!("hessian is {0}×{0}, expected {d}×{d}", h.nrows())));
    }
    let xi = xi.unwrap_or_else(|| vec![0.0; d]);
    if xi.len() != d {
        return Err(CliError::input(format!("xi has length {}, expected {d}", xi.len())));
    }
    finite(&xi, "xi")?;
    let h0 = h0.unwrap_or(0.0);
    finite(&[h0], "h0")?;
    let tol = Tolerances::default();
    let ham = QuadraticHamiltonian::new(h, RVec::from_vec(xi), h0, &tol).map_err(CliError::input)?;
    let mut jumps = Vec::with_capacity(lindblad.len());
    for (k, l) in lindblad.into_iter().enumerate() {
        let im = l.lambda_im.unwrap_or_else(|| vec![0.0; l.lambda_re.len()]);
        if l.lambda_re.len() != d || im.len() != d {
            return Err(CliError::input(format!("lindblad[{k}] vectors must have length {d}")));
        }
        finite(&l.lambda_re, "lambda_re")?;
        finite(&im, "lambda_im")?;
        finite(&[l.mu_re, l.mu_im], "mu")?;
        let lambda = CVec::from_iterator(d, l.lambda_re.iter().zip(&im).map(|(&re, &im)| Complex64::new(re, im)));
        jumps.push(LindbladVector::with_offset(lambda, Complex64::new(l.mu_re, l.mu_im)));
    }
    ModelSpec::new(ham, jumps).map_err(CliError::input)
}

/// Explicit document reproducing `model`, suitable for writing back to disk.
pub fn explicit_document(model: &ModelSpec) -> RawDocument {
    let ham = &model.hamiltonian;
    RawDocument {
        n: Some(model.modes()),
        hessian: Some(matrix_rows(ham.hessian())),
        xi: Some(ham.linear().iter().copied().collect()),
        h0: Some(ham.offset()),
        lindblad: Some(
            model
                .lindblad
                .iter()
                .map(|l| LindbladEntry {
                    lambda_re: l.lambda.iter().map(|z| z.re).collect(),
                    lambda_im: Some(l.lambda.iter().map(|z| z.im).collect()),
                    mu_re: l.mu.re,
                    mu_im: l.mu.im,
                })
                .collect(),
        ),
        ..RawDocument::default()
    }
}

/// Covariance-matrix document `{"cm": [[...]]}`.
pub fn cm_document(v: &RMat) -> RawDocument {
    RawDocument { cm: Some(matrix_rows(v)), ..RawDocument::default() }
}
