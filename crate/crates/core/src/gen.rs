//! Random nets: a Bratteli chain placed on a strictly monotone height
//! function, then twisted by a random unitary gauge per element.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::algebra::{AlgElement, FinDimAlgebra, StarHom};
use crate::cylinder::{cylinder_index, cylinder_poset, modn, CylinderError, GridPoset};
use crate::limits::{LimitError, NetSystem};
use crate::net::{Net, NetError, NetMorphism};
use crate::poset::{Poset, PosetMorphism};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenOptions {
    /// Largest matrix block created.
    pub max_block: usize,
    /// Largest number of blocks per algebra.
    pub max_blocks: usize,
    /// Probability that a chain step is the identity.
    pub stall: f64,
    /// Start the chain at `ℂ`.
    pub scalar_bottom: bool,
    /// Conjugate every fibre by a random unitary.
    pub twist: bool,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            max_block: 3,
            max_blocks: 3,
            stall: 0.2,
            scalar_bottom: false,
            twist: true,
        }
    }
}

/// A random algebra within the size limits.
pub fn random_algebra<R: Rng + ?Sized>(opts: &GenOptions, rng: &mut R) -> FinDimAlgebra {
    let k = rng.random_range(1..=opts.max_blocks);
    let blocks = (0..k).map(|_| rng.random_range(1..=opts.max_block)).collect();
    FinDimAlgebra::new(blocks).expect("nonempty positive blocks")
}

/// A random unital monomorphism out of `source` in standard form.
pub fn random_embedding<R: Rng + ?Sized>(
    source: &FinDimAlgebra,
    opts: &GenOptions,
    rng: &mut R,
) -> StarHom {
    if rng.random::<f64>() < opts.stall {
        return StarHom::identity(source);
    }
    let ks = source.num_blocks();
    // (multiplicity row, size) per target block
    let mut targets: Vec<(Vec<usize>, usize)> = Vec::new();
    let mut order: Vec<usize> = (0..ks).collect();
    order.shuffle(rng);
    for s in order {
        let n = source.block(s);
        let cap = opts.max_block.max(n);
        let mut options: Vec<Option<usize>> = targets
            .iter()
            .enumerate()
            .filter(|(_, (_, size))| size + n <= cap)
            .map(|(t, _)| Some(t))
            .collect();
        if options.is_empty() || targets.len() < opts.max_blocks {
            options.push(None);
        }
        match *options.choose(rng).expect("nonempty") {
            Some(t) => {
                targets[t].0[s] += 1;
                targets[t].1 += n;
            }
            None => {
                let mut row = vec![0; ks];
                row[s] = 1;
                targets.push((row, n));
            }
        }
    }
    // extra copies where they still fit
    for _ in 0..2 * ks {
        let t = rng.random_range(0..targets.len());
        let s = rng.random_range(0..ks);
        let n = source.block(s);
        if targets[t].1 + n <= opts.max_block {
            targets[t].0[s] += 1;
            targets[t].1 += n;
        }
    }
    let target = FinDimAlgebra::new(targets.iter().map(|(_, size)| *size).collect())
        .expect("every target block is nonempty");
    let mult = targets.into_iter().map(|(row, _)| row).collect();
    StarHom::standard(source.clone(), target, mult).expect("sizes add up")
}

/// `len` random embeddings composable left to right.
pub fn random_chain<R: Rng + ?Sized>(
    start: FinDimAlgebra,
    len: usize,
    opts: &GenOptions,
    rng: &mut R,
) -> Vec<StarHom> {
    let mut cur = start;
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let h = random_embedding(&cur, opts, rng);
        cur = h.target().clone();
        out.push(h);
    }
    out
}

/// Fibre `B_{h(o)}` and inclusions the chain composites between heights.
/// `height` must increase strictly along covers.
pub fn height_net(
    poset: Arc<Poset>,
    height: &[usize],
    start: &FinDimAlgebra,
    chain: &[StarHom],
) -> Result<Net, NetError> {
    let mut algebras = vec![start.clone()];
    algebras.extend(chain.iter().map(|h| h.target().clone()));
    let composite = |lo: usize, hi: usize| -> Result<StarHom, NetError> {
        let mut h = StarHom::identity(&algebras[lo]);
        for c in &chain[lo..hi] {
            h = c.compose(&h)?;
        }
        Ok(h)
    };
    let fibres = height.iter().map(|&h| algebras[h].clone()).collect();
    let inc = poset
        .covers()
        .iter()
        .map(|&(lo, hi)| {
            if height[hi] <= height[lo] {
                return Err(NetError::NotComparable {
                    lo: poset.label(lo).into(),
                    hi: poset.label(hi).into(),
                });
            }
            Ok(((lo, hi), composite(height[lo], height[hi])?))
        })
        .collect::<Result<BTreeMap<_, _>, NetError>>()?;
    Net::new(poset, fibres, inc)
}

/// `ȷ'_{õo} = Ad(g_õ) ∘ ȷ_{õo} ∘ Ad(g_o)*`, which keeps the net relations.
pub fn gauge_twist(net: &Net, gauge: &[AlgElement]) -> Result<Net, NetError> {
    let inc = net
        .inclusions()
        .iter()
        .map(|(&(lo, hi), j)| {
            let h = j.then_inner(&gauge[hi])?.after_inner(&gauge[lo].adjoint())?;
            Ok(((lo, hi), h))
        })
        .collect::<Result<BTreeMap<_, _>, NetError>>()?;
    Net::new(net.poset().clone(), net.fibres().to_vec(), inc)
}

pub fn random_gauge<R: Rng + ?Sized>(net: &Net, rng: &mut R) -> Vec<AlgElement> {
    net.fibres().iter().map(|a| a.random_unitary(rng)).collect()
}

fn start_algebra<R: Rng + ?Sized>(opts: &GenOptions, rng: &mut R) -> FinDimAlgebra {
    if opts.scalar_bottom {
        FinDimAlgebra::matrix(1)
    } else {
        random_algebra(opts, rng)
    }
}

fn finish<R: Rng + ?Sized>(net: Net, opts: &GenOptions, rng: &mut R) -> Result<Net, NetError> {
    if opts.twist {
        let g = random_gauge(&net, rng);
        gauge_twist(&net, &g)
    } else {
        Ok(net)
    }
}

/// A random net over `C_N` with fibre `B_{l−1}` at `(i, l)`.
pub fn random_cylinder_net<R: Rng + ?Sized>(
    n: usize,
    opts: &GenOptions,
    rng: &mut R,
) -> Result<Net, CylinderError> {
    let poset = Arc::new(cylinder_poset(n)?);
    let height: Vec<usize> = (0..n * n).map(|x| x % n).collect();
    let start = start_algebra(opts, rng);
    let chain = random_chain(start.clone(), n - 1, opts, rng);
    let net = height_net(poset, &height, &start, &chain)?;
    Ok(finish(net, opts, rng)?)
}

/// A random net over a grid poset with fibres indexed by arc length.
pub fn random_grid_net<R: Rng + ?Sized>(
    grid: &GridPoset,
    opts: &GenOptions,
    rng: &mut R,
) -> Result<Net, NetError> {
    let p = grid.poset.clone();
    let height: Vec<usize> = (0..p.len()).map(|o| grid.steps(o) - 1).collect();
    let top = height.iter().copied().max().unwrap_or(0);
    let start = start_algebra(opts, rng);
    let chain = random_chain(start.clone(), top, opts, rng);
    let net = height_net(p, &height, &start, &chain)?;
    finish(net, opts, rng)
}

/// The constant bundle over `C_N` with fibre `a`, except that every cover
/// from column `column` into column `(column−1)_N` carries `Ad(u)`.
pub fn planted_cylinder_bundle(
    n: usize,
    a: &FinDimAlgebra,
    column: usize,
    u: &AlgElement,
) -> Result<Net, CylinderError> {
    let poset = Arc::new(cylinder_poset(n)?);
    let left = modn(column as i64 - 1, n);
    let plant = StarHom::inner(a, u).map_err(NetError::from)?;
    let mut inc: BTreeMap<_, _> = poset
        .covers()
        .iter()
        .map(|&c| (c, StarHom::identity(a)))
        .collect();
    for l in 1..n {
        inc.insert(
            (cylinder_index(n, column, l), cylinder_index(n, left, l + 1)),
            plant.clone(),
        );
    }
    Ok(Net::new(poset, vec![a.clone(); n * n], inc)?)
}

/// A monomorphic system of `stages` nets over `C_N` on the index chain
/// `1 ⪯ 2 ⪯ …`: stage `s` has fibre `B_{l−1+s}` at `(i, l)` and the links are
/// the chain steps, each stage with its own gauge.
pub fn random_cylinder_system<R: Rng + ?Sized>(
    n: usize,
    stages: usize,
    opts: &GenOptions,
    rng: &mut R,
) -> Result<NetSystem, LimitError> {
    let poset = Arc::new(cylinder_poset(n).map_err(|e| LimitError::IncoherentSystem(e.to_string()))?);
    let start = start_algebra(opts, rng);
    let chain = random_chain(start.clone(), n + stages - 2, opts, rng);
    let mut algebras = vec![start];
    algebras.extend(chain.iter().map(|h| h.target().clone()));
    let mut nets = Vec::with_capacity(stages);
    let mut gauges = Vec::with_capacity(stages);
    for s in 0..stages {
        let height: Vec<usize> = (0..n * n).map(|x| x % n).collect();
        let plain = height_net(poset.clone(), &height, &algebras[s], &chain[s..])?;
        let g = if opts.twist {
            random_gauge(&plain, rng)
        } else {
            plain.fibres().iter().map(FinDimAlgebra::one).collect()
        };
        nets.push(Arc::new(gauge_twist(&plain, &g)?));
        gauges.push(g);
    }
    let labels: Vec<String> = (1..=stages).map(|i| i.to_string()).collect();
    let covers: Vec<(String, String)> =
        labels.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
    let index = Arc::new(Poset::new(labels, &covers)?);
    let mut links = BTreeMap::new();
    for s in 0..stages.saturating_sub(1) {
        let homs = (0..n * n)
            .map(|o| {
                chain[o % n + s]
                    .then_inner(&gauges[s + 1][o])?
                    .after_inner(&gauges[s][o].adjoint())
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(NetError::from)?;
        let m = NetMorphism::new(
            nets[s].clone(),
            nets[s + 1].clone(),
            PosetMorphism::identity(poset.clone()),
            homs,
        )?;
        links.insert((s, s + 1), m);
    }
    NetSystem::new(index, nets, links)
}
