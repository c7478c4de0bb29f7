//! JSON documents for posets, algebras, homomorphisms, nets, states and
//! inductive systems. Matrices are nested arrays of `[re, im]` pairs.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgElement, AlgebraError, CMat, FinDimAlgebra, StarHom, State};
use crate::limits::{LimitError, NetSystem};
use crate::net::{Net, NetError, NetMorphism};
use crate::poset::{Disjointness, Poset, PosetError, PosetMorphism};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IoError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Limit(#[from] LimitError),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Malformed(e.to_string())
    }
}

pub type MatrixDoc = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosetDoc {
    pub elements: Vec<String>,
    pub covers: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disjoint: Option<Vec<[String; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraDoc {
    pub blocks: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomDoc {
    pub mult: Vec<Vec<usize>>,
    pub conj: Vec<MatrixDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetDoc {
    #[serde(flatten)]
    pub poset: PosetDoc,
    pub fibres: BTreeMap<String, AlgebraDoc>,
    pub inclusions: BTreeMap<String, HomDoc>,
}

/// An element of a finite-dimensional algebra, one matrix per block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementDoc {
    pub blocks: Vec<MatrixDoc>,
}

/// A state by its density matrices, one per block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDoc {
    pub densities: Vec<MatrixDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkDoc {
    pub map: BTreeMap<String, String>,
    pub homs: BTreeMap<String, HomDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemDoc {
    pub index: PosetDoc,
    pub stages: BTreeMap<String, NetDoc>,
    pub links: BTreeMap<String, LinkDoc>,
}

pub fn matrix_to_doc(m: &CMat) -> MatrixDoc {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_doc(d: &MatrixDoc) -> Result<CMat, IoError> {
    let rows = d.len();
    let cols = d.first().map_or(0, Vec::len);
    if d.iter().any(|r| r.len() != cols) {
        return Err(IoError::Malformed("ragged matrix".into()));
    }
    Ok(CMat::from_fn(rows, cols, |i, j| {
        Complex64::new(d[i][j][0], d[i][j][1])
    }))
}

/// `"lo->hi"`.
pub fn pair_key(lo: &str, hi: &str) -> String {
    format!("{lo}->{hi}")
}

pub fn split_pair_key(k: &str) -> Result<(&str, &str), IoError> {
    k.split_once("->")
        .ok_or_else(|| IoError::Malformed(format!("key {k:?} is not of the form lo->hi")))
}

pub fn poset_to_doc(p: &Poset, d: Option<&Disjointness>) -> PosetDoc {
    PosetDoc {
        elements: p.labels().to_vec(),
        covers: p
            .covers()
            .iter()
            .map(|&(lo, hi)| [p.label(lo).to_string(), p.label(hi).to_string()])
            .collect(),
        disjoint: d.map(|d| {
            d.pairs()
                .filter(|(a, b)| a < b)
                .map(|(a, b)| [p.label(a).to_string(), p.label(b).to_string()])
                .collect()
        }),
    }
}

/// The poset and, when present, its symmetric disjointness relation.
pub fn poset_from_doc(doc: &PosetDoc) -> Result<(Arc<Poset>, Option<Disjointness>), IoError> {
    let covers: Vec<(String, String)> = doc
        .covers
        .iter()
        .map(|[a, b]| (a.clone(), b.clone()))
        .collect();
    let p = Arc::new(Poset::new(doc.elements.clone(), &covers)?);
    let d = match &doc.disjoint {
        Some(pairs) => {
            let idx = pairs
                .iter()
                .map(|[a, b]| Ok((p.index_of(a)?, p.index_of(b)?)))
                .collect::<Result<Vec<_>, PosetError>>()?;
            Some(Disjointness::symmetric(p.clone(), idx))
        }
        None => None,
    };
    Ok((p, d))
}

pub fn algebra_from_doc(d: &AlgebraDoc) -> Result<FinDimAlgebra, IoError> {
    Ok(FinDimAlgebra::new(d.blocks.clone())?)
}

pub fn hom_to_doc(h: &StarHom) -> HomDoc {
    HomDoc {
        mult: h.mult().to_vec(),
        conj: h.conj().iter().map(matrix_to_doc).collect(),
    }
}

pub fn hom_from_doc(
    d: &HomDoc,
    source: &FinDimAlgebra,
    target: &FinDimAlgebra,
) -> Result<StarHom, IoError> {
    let conj = d.conj.iter().map(matrix_from_doc).collect::<Result<Vec<_>, _>>()?;
    Ok(StarHom::new(source.clone(), target.clone(), d.mult.clone(), conj)?)
}

pub fn element_to_doc(a: &AlgElement) -> ElementDoc {
    ElementDoc {
        blocks: a.blocks.iter().map(matrix_to_doc).collect(),
    }
}

pub fn element_from_doc(d: &ElementDoc) -> Result<AlgElement, IoError> {
    let blocks = d.blocks.iter().map(matrix_from_doc).collect::<Result<Vec<_>, _>>()?;
    if blocks.iter().any(|m| m.nrows() != m.ncols() || m.nrows() == 0) {
        return Err(IoError::Malformed("element blocks must be square and nonempty".into()));
    }
    Ok(AlgElement { blocks })
}

pub fn state_to_doc(s: &State) -> StateDoc {
    StateDoc {
        densities: s.densities().iter().map(matrix_to_doc).collect(),
    }
}

pub fn state_from_doc(d: &StateDoc, tol: f64) -> Result<State, IoError> {
    let densities = d.densities.iter().map(matrix_from_doc).collect::<Result<Vec<_>, _>>()?;
    let alg = FinDimAlgebra::new(densities.iter().map(|m| m.nrows()).collect())?;
    Ok(State::new(alg, densities, tol)?)
}

pub fn net_to_doc(net: &Net, d: Option<&Disjointness>) -> NetDoc {
    let p = net.poset();
    NetDoc {
        poset: poset_to_doc(p, d),
        fibres: (0..p.len())
            .map(|o| {
                let doc = AlgebraDoc {
                    blocks: net.fibre(o).blocks().to_vec(),
                };
                (p.label(o).to_string(), doc)
            })
            .collect(),
        inclusions: net
            .inclusions()
            .iter()
            .map(|(&(lo, hi), h)| (pair_key(p.label(lo), p.label(hi)), hom_to_doc(h)))
            .collect(),
    }
}

pub fn net_from_doc(doc: &NetDoc) -> Result<(Arc<Net>, Option<Disjointness>), IoError> {
    let (p, d) = poset_from_doc(&doc.poset)?;
    let fibres = p
        .labels()
        .iter()
        .map(|l| {
            doc.fibres
                .get(l)
                .ok_or_else(|| IoError::Malformed(format!("no fibre for {l}")))
                .and_then(algebra_from_doc)
        })
        .collect::<Result<Vec<_>, _>>()?;
    if doc.fibres.len() != p.len() {
        return Err(IoError::Malformed("fibres for unknown elements".into()));
    }
    let mut inc = BTreeMap::new();
    for (k, h) in &doc.inclusions {
        let (lo, hi) = split_pair_key(k)?;
        let (lo, hi) = (p.index_of(lo)?, p.index_of(hi)?);
        inc.insert((lo, hi), hom_from_doc(h, &fibres[lo], &fibres[hi])?);
    }
    Ok((Arc::new(Net::new(p, fibres, inc)?), d))
}

pub fn system_to_doc(sys: &NetSystem) -> SystemDoc {
    let index = &sys.posets.index;
    SystemDoc {
        index: poset_to_doc(index, None),
        stages: sys
            .nets
            .iter()
            .enumerate()
            .map(|(a, n)| (index.label(a).to_string(), net_to_doc(n, None)))
            .collect(),
        links: sys
            .links
            .iter()
            .map(|(&(a, s), m)| {
                let src = m.source.poset();
                let tgt = m.target.poset();
                let map = (0..src.len())
                    .map(|x| (src.label(x).to_string(), tgt.label(m.poset_map.apply(x)).to_string()))
                    .collect();
                let homs = (0..src.len())
                    .map(|x| (src.label(x).to_string(), hom_to_doc(&m.homs[x])))
                    .collect();
                (pair_key(index.label(a), index.label(s)), LinkDoc { map, homs })
            })
            .collect(),
    }
}

pub fn system_from_doc(doc: &SystemDoc) -> Result<NetSystem, IoError> {
    let (index, _) = poset_from_doc(&doc.index)?;
    let nets = index
        .labels()
        .iter()
        .map(|l| {
            let d = doc
                .stages
                .get(l)
                .ok_or_else(|| IoError::Malformed(format!("no stage {l}")))?;
            Ok(net_from_doc(d)?.0)
        })
        .collect::<Result<Vec<_>, IoError>>()?;
    let mut links = BTreeMap::new();
    for (k, l) in &doc.links {
        let (a, s) = split_pair_key(k)?;
        let (a, s) = (index.index_of(a)?, index.index_of(s)?);
        let (src, tgt) = (&nets[a], &nets[s]);
        let map = src
            .poset()
            .labels()
            .iter()
            .map(|x| {
                let y = l
                    .map
                    .get(x)
                    .ok_or_else(|| IoError::Malformed(format!("link {k} misses {x}")))?;
                Ok(tgt.poset().index_of(y)?)
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        let f = PosetMorphism::new(src.poset().clone(), tgt.poset().clone(), map)?;
        let homs = (0..src.poset().len())
            .map(|x| {
                let h = l.homs.get(src.label(x)).ok_or_else(|| {
                    IoError::Malformed(format!("link {k} has no hom at {}", src.label(x)))
                })?;
                hom_from_doc(h, src.fibre(x), tgt.fibre(f.apply(x)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        links.insert((a, s), NetMorphism::new(src.clone(), tgt.clone(), f, homs)?);
    }
    Ok(NetSystem::new(index, nets, links)?)
}
