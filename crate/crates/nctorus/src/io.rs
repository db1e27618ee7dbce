//! JSON file formats for elements, matrices, chains, periodic chains,
//! deformation matrices, functional tables, wedge classes, and transport
//! manifests.  Serialization is canonical: term lists are emitted in
//! lexicographic key order, so write-read round-trips are byte-stable.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::chain::{Chain, Parity, PeriodicChain};
use crate::error::{Error, Result};
use crate::invariant::{FunctionalTable, WedgeClass};
use crate::matrix::MatrixElement;
use crate::torus::{MultiIndex, SkewMatrix, TorusElement};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermDto {
    pub alpha: Vec<i64>,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ElementDto {
    pub n: usize,
    pub terms: Vec<TermDto>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThetaDto {
    pub n: usize,
    pub theta: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixDto {
    pub n: usize,
    pub size: usize,
    pub entries: Vec<Vec<ElementDto>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainTermDto {
    pub factors: Vec<Vec<i64>>,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainDto {
    pub n: usize,
    pub degree: usize,
    pub terms: Vec<ChainTermDto>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeriodicChainDto {
    pub n: usize,
    pub parity: Parity,
    pub cap: usize,
    pub components: BTreeMap<String, ChainDto>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FunctionalTableDto {
    pub n: usize,
    pub degree: usize,
    pub entries: Vec<ChainTermDto>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WedgeTermDto {
    pub axes: Vec<usize>,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WedgeDto {
    pub n: usize,
    pub parity: Parity,
    pub coefficients: Vec<WedgeTermDto>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "object", content = "payload", rename_all = "lowercase")]
pub enum TransportPayload {
    Chain(ChainDto),
    Functional(FunctionalTableDto),
    Wedge(WedgeDto),
}

/// Transport instruction: carry `payload` from `t0` to `t1` over `theta`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransportManifest {
    pub theta: ThetaDto,
    pub t0: f64,
    pub t1: f64,
    #[serde(flatten)]
    pub payload: TransportPayload,
}

// element

pub fn element_to_dto(x: &TorusElement) -> ElementDto {
    ElementDto {
        n: x.dim(),
        terms: x
            .terms()
            .map(|(a, c)| TermDto {
                alpha: a.0.clone(),
                re: c.re,
                im: c.im,
            })
            .collect(),
    }
}

pub fn element_from_dto(dto: &ElementDto) -> Result<TorusElement> {
    TorusElement::from_terms(
        dto.n,
        dto.terms
            .iter()
            .map(|t| (MultiIndex::new(t.alpha.clone()), C64::new(t.re, t.im))),
    )
}

// theta

pub fn theta_to_dto(theta: &SkewMatrix) -> ThetaDto {
    ThetaDto {
        n: theta.dim(),
        theta: theta.rows(),
    }
}

pub fn theta_from_dto(dto: &ThetaDto) -> Result<SkewMatrix> {
    SkewMatrix::new(dto.n, dto.theta.clone())
}

// matrix

pub fn matrix_to_dto(x: &MatrixElement) -> MatrixDto {
    MatrixDto {
        n: x.dim(),
        size: x.size(),
        entries: (0..x.size())
            .map(|i| {
                (0..x.size())
                    .map(|j| element_to_dto(x.get(i, j)))
                    .collect()
            })
            .collect(),
    }
}

pub fn matrix_from_dto(dto: &MatrixDto) -> Result<MatrixElement> {
    if dto.entries.len() != dto.size {
        return Err(Error::Format("matrix entry grid does not match size".into()));
    }
    let rows = dto
        .entries
        .iter()
        .map(|row| {
            if row.len() != dto.size {
                return Err(Error::Format("matrix entry grid is not square".into()));
            }
            row.iter().map(element_from_dto).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let m = MatrixElement::from_rows(rows)?;
    if m.dim() != dto.n {
        return Err(Error::DimensionMismatch {
            expected: dto.n,
            got: m.dim(),
        });
    }
    Ok(m)
}

// chains

pub fn chain_to_dto(c: &Chain) -> ChainDto {
    ChainDto {
        n: c.dim(),
        degree: c.degree(),
        terms: c
            .terms()
            .map(|(f, coeff)| ChainTermDto {
                factors: f.iter().map(|a| a.0.clone()).collect(),
                re: coeff.re,
                im: coeff.im,
            })
            .collect(),
    }
}

pub fn chain_from_dto(dto: &ChainDto) -> Result<Chain> {
    Chain::from_terms(
        dto.n,
        dto.degree,
        dto.terms.iter().map(|t| {
            (
                t.factors
                    .iter()
                    .map(|a| MultiIndex::new(a.clone()))
                    .collect(),
                C64::new(t.re, t.im),
            )
        }),
    )
}

pub fn periodic_to_dto(pc: &PeriodicChain) -> PeriodicChainDto {
    PeriodicChainDto {
        n: pc.dim(),
        parity: pc.parity(),
        cap: pc.cap(),
        components: pc
            .components()
            .map(|(deg, c)| (deg.to_string(), chain_to_dto(c)))
            .collect(),
    }
}

pub fn periodic_from_dto(dto: &PeriodicChainDto) -> Result<PeriodicChain> {
    let mut pc = PeriodicChain::new(dto.n, dto.parity, dto.cap);
    for (deg, chain_dto) in &dto.components {
        let degree: usize = deg
            .parse()
            .map_err(|_| Error::Format(format!("bad component degree key '{deg}'")))?;
        let chain = chain_from_dto(chain_dto)?;
        if chain.degree() != degree {
            return Err(Error::Format(format!(
                "component key {degree} holds a degree-{} chain",
                chain.degree()
            )));
        }
        pc.set_component(chain)?;
    }
    Ok(pc)
}

// functional tables

pub fn table_to_dto(t: &FunctionalTable) -> FunctionalTableDto {
    FunctionalTableDto {
        n: t.dim(),
        degree: t.degree(),
        entries: t
            .entries()
            .map(|(f, v)| ChainTermDto {
                factors: f.iter().map(|a| a.0.clone()).collect(),
                re: v.re,
                im: v.im,
            })
            .collect(),
    }
}

pub fn table_from_dto(dto: &FunctionalTableDto) -> Result<FunctionalTable> {
    let mut table = FunctionalTable::new(dto.n, dto.degree);
    for t in &dto.entries {
        table.insert(
            t.factors
                .iter()
                .map(|a| MultiIndex::new(a.clone()))
                .collect(),
            C64::new(t.re, t.im),
        )?;
    }
    Ok(table)
}

// wedge classes

pub fn wedge_to_dto(w: &WedgeClass) -> WedgeDto {
    WedgeDto {
        n: w.dim(),
        parity: w.parity(),
        coefficients: w
            .coefficients()
            .map(|(axes, v)| WedgeTermDto {
                axes: axes.clone(),
                re: v.re,
                im: v.im,
            })
            .collect(),
    }
}

pub fn wedge_from_dto(dto: &WedgeDto) -> Result<WedgeClass> {
    let mut w = WedgeClass::new(dto.n, dto.parity);
    for t in &dto.coefficients {
        w.set(t.axes.clone(), C64::new(t.re, t.im))?;
    }
    Ok(w)
}

// file plumbing

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// What a JSON file contains, for `info`-style inspection.
#[derive(Debug)]
pub enum FileKind {
    Element(ElementDto),
    Matrix(MatrixDto),
    Theta(ThetaDto),
    Chain(ChainDto),
    Periodic(PeriodicChainDto),
    Table(FunctionalTableDto),
    Wedge(WedgeDto),
    Manifest(TransportManifest),
}

/// Parse a file against each known schema in order of distinctiveness.
pub fn detect(path: &Path) -> Result<FileKind> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Format("expected a JSON object".into()))?;
    let kind = if obj.contains_key("t0") && obj.contains_key("object") {
        FileKind::Manifest(serde_json::from_value(value)?)
    } else if obj.contains_key("components") {
        FileKind::Periodic(serde_json::from_value(value)?)
    } else if obj.contains_key("coefficients") {
        FileKind::Wedge(serde_json::from_value(value)?)
    } else if obj.contains_key("entries") && obj.contains_key("size") {
        FileKind::Matrix(serde_json::from_value(value)?)
    } else if obj.contains_key("entries") {
        FileKind::Table(serde_json::from_value(value)?)
    } else if obj.contains_key("degree") {
        FileKind::Chain(serde_json::from_value(value)?)
    } else if obj.contains_key("theta") {
        FileKind::Theta(serde_json::from_value(value)?)
    } else if obj.contains_key("terms") {
        FileKind::Element(serde_json::from_value(value)?)
    } else {
        return Err(Error::Format("unrecognized file schema".into()));
    };
    Ok(kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn element_strategy() -> impl Strategy<Value = TorusElement> {
        proptest::collection::vec(
            (
                proptest::collection::vec(-4i64..=4, 2),
                -2.0f64..2.0,
                -2.0f64..2.0,
            ),
            0..6,
        )
        .prop_map(|terms| {
            TorusElement::from_terms(
                2,
                terms
                    .into_iter()
                    .map(|(a, re, im)| (MultiIndex::new(a), C64::new(re, im))),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn element_round_trip(x in element_strategy()) {
            let dto = element_to_dto(&x);
            let back = element_from_dto(&dto).unwrap();
            prop_assert_eq!(back, x);
        }

        #[test]
        fn chain_round_trip(
            xs in proptest::collection::vec(
                (proptest::collection::vec(proptest::collection::vec(-3i64..=3, 2), 3),
                 -2.0f64..2.0, -2.0f64..2.0),
                0..6,
            )
        ) {
            let chain = Chain::from_terms(
                2,
                2,
                xs.into_iter().map(|(factors, re, im)| {
                    (
                        factors.into_iter().map(MultiIndex::new).collect::<Vec<_>>(),
                        C64::new(re, im),
                    )
                }),
            )
            .unwrap();
            let dto = chain_to_dto(&chain);
            let back = chain_from_dto(&dto).unwrap();
            prop_assert_eq!(back, chain);
        }
    }

    #[test]
    fn detection_distinguishes_schemas() {
        let dir = std::env::temp_dir().join(format!("nctorus-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let theta = SkewMatrix::two_dim(0.5);
        let theta_path = dir.join("theta.json");
        write_json(&theta_path, &theta_to_dto(&theta)).unwrap();
        assert!(matches!(detect(&theta_path).unwrap(), FileKind::Theta(_)));

        let e = TorusElement::generator(2, 1).unwrap();
        let e_path = dir.join("element.json");
        write_json(&e_path, &element_to_dto(&e)).unwrap();
        assert!(matches!(detect(&e_path).unwrap(), FileKind::Element(_)));

        let m = MatrixElement::identity(2, 2);
        let m_path = dir.join("matrix.json");
        write_json(&m_path, &matrix_to_dto(&m)).unwrap();
        assert!(matches!(detect(&m_path).unwrap(), FileKind::Matrix(_)));

        std::fs::remove_dir_all(&dir).ok();
    }
}
