//! Nets of finite-dimensional algebras over finite posets: fibres on
//! elements, unital monomorphisms on covers, path independence as the net
//! relation.

mod causality;
mod covariant;
mod holonomy;
mod morphism;
mod rep;
mod state;

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{AlgebraError, FinDimAlgebra, StarHom};
use crate::cmrep::CmError;
use crate::homotopy::HomotopyError;
use crate::par::Exec;
use crate::poset::{Poset, PosetError};
use crate::report::{Check, Report};

pub use causality::{check_causality, check_causality_with};
pub use covariant::{invariant_net_state, CovariantNet};
pub use holonomy::{bundle_holonomy, rep_holonomy, walk_transport, walk_unitary, Holonomy};
pub use causality::CAUSALITY_TOL;
pub use morphism::NetMorphism;
pub use rep::{probe_distance, NetRep, SymbolicNetRep};
pub use state::{state_from_holonomy, NetState};

/// Tolerance for homomorphism identities.
pub const HOM_TOL: f64 = 1e-12;
/// Tolerance for state identities.
pub const STATE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetError {
    #[error("fibre list has {got} entries for {expected} elements")]
    FibreCount { expected: usize, got: usize },
    #[error("no inclusion given for the cover {lo} < {hi}")]
    MissingInclusion { lo: String, hi: String },
    #[error("inclusion given for {lo} -> {hi}, which is not a cover")]
    UnexpectedInclusion { lo: String, hi: String },
    #[error("inclusion {lo} -> {hi} does not map between the fibres")]
    NotUnital { lo: String, hi: String },
    #[error("inclusion {lo} -> {hi} kills block {block} of the lower fibre")]
    NotMono { lo: String, hi: String, block: usize },
    #[error("net relation violated on {lo} <= {hi} through {via} (residual {residual:e})")]
    NetRelationViolated {
        lo: String,
        hi: String,
        via: String,
        residual: f64,
    },
    #[error("{lo} and {hi} are not comparable")]
    NotComparable { lo: String, hi: String },
    #[error("representation spaces differ: {0}")]
    DimensionMismatch(String),
    #[error("inclusion operator {lo} -> {hi} does not intertwine (residual {residual:e})")]
    IntertwineViolated { lo: String, hi: String, residual: f64 },
    #[error("inclusion operators are path dependent on {lo} <= {hi} (residual {residual:e})")]
    CocycleViolated { lo: String, hi: String, residual: f64 },
    #[error("inclusion {lo} -> {hi} is not an isomorphism")]
    NotABundle { lo: String, hi: String },
    #[error("relator {index} has holonomy {residual:e} away from the identity")]
    RelatorViolated { index: usize, residual: f64 },
    #[error("state family incoherent on {lo} <= {hi} (residual {residual:e})")]
    StateIncoherent { lo: String, hi: String, residual: f64 },
    #[error("fibre state moved by holonomy of generator {generator} (residual {residual:e})")]
    NotHolonomyInvariant { generator: usize, residual: f64 },
    #[error("images of {o} and {other} do not commute in {upper} (residual {residual:e})")]
    CausalityViolated {
        o: String,
        other: String,
        upper: String,
        residual: f64,
    },
    #[error("covariance violated: {0}")]
    CovarianceViolated(String),
    #[error("morphism identity violated on {lo} <= {hi} (residual {residual:e})")]
    MorphismViolated { lo: String, hi: String, residual: f64 },
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Homotopy(#[from] HomotopyError),
    #[error(transparent)]
    Cm(#[from] CmError),
}

/// A net of finite-dimensional algebras over a finite poset.
#[derive(Debug, Clone)]
pub struct Net {
    poset: Arc<Poset>,
    fibres: Vec<FinDimAlgebra>,
    inc: BTreeMap<(usize, usize), StarHom>,
}

impl Net {
    /// Checks that every cover carries a homomorphism between the right
    /// fibres; monomorphy and path independence are left to
    /// [`validate`](Self::validate).
    pub fn new(
        poset: Arc<Poset>,
        fibres: Vec<FinDimAlgebra>,
        inc: BTreeMap<(usize, usize), StarHom>,
    ) -> Result<Self, NetError> {
        let p = &poset;
        if fibres.len() != p.len() {
            return Err(NetError::FibreCount {
                expected: p.len(),
                got: fibres.len(),
            });
        }
        let lbl = |i: usize| p.label(i).to_string();
        for (&(lo, hi), h) in &inc {
            if lo >= p.len() || hi >= p.len() || !p.is_cover(lo, hi) {
                return Err(NetError::UnexpectedInclusion {
                    lo: if lo < p.len() { lbl(lo) } else { format!("#{lo}") },
                    hi: if hi < p.len() { lbl(hi) } else { format!("#{hi}") },
                });
            }
            if h.source() != &fibres[lo] || h.target() != &fibres[hi] {
                return Err(NetError::NotUnital {
                    lo: lbl(lo),
                    hi: lbl(hi),
                });
            }
        }
        for &(lo, hi) in p.covers() {
            if !inc.contains_key(&(lo, hi)) {
                return Err(NetError::MissingInclusion {
                    lo: lbl(lo),
                    hi: lbl(hi),
                });
            }
        }
        Ok(Net { poset, fibres, inc })
    }

    /// Every fibre `a`, every inclusion the identity.
    pub fn constant(poset: Arc<Poset>, a: &FinDimAlgebra) -> Self {
        let fibres = vec![a.clone(); poset.len()];
        let inc = poset
            .covers()
            .iter()
            .map(|&c| (c, StarHom::identity(a)))
            .collect();
        Net { poset, fibres, inc }
    }

    pub fn poset(&self) -> &Arc<Poset> {
        &self.poset
    }

    pub fn fibre(&self, o: usize) -> &FinDimAlgebra {
        &self.fibres[o]
    }

    pub fn fibres(&self) -> &[FinDimAlgebra] {
        &self.fibres
    }

    pub fn inclusion(&self, lo: usize, hi: usize) -> Option<&StarHom> {
        self.inc.get(&(lo, hi))
    }

    pub fn inclusions(&self) -> &BTreeMap<(usize, usize), StarHom> {
        &self.inc
    }

    pub fn label(&self, o: usize) -> &str {
        self.poset.label(o)
    }

    /// A cover path from `o` up to `a`: at each step the first upper cover
    /// still below `a`.
    pub fn cover_path(&self, o: usize, a: usize) -> Result<Vec<usize>, NetError> {
        let p = &self.poset;
        if !p.leq_idx(o, a) {
            return Err(NetError::NotComparable {
                lo: p.label(o).into(),
                hi: p.label(a).into(),
            });
        }
        let mut path = vec![o];
        let mut cur = o;
        while cur != a {
            cur = *p
                .upper_covers(cur)
                .iter()
                .find(|&&b| p.leq_idx(b, a))
                .expect("a cover below the target exists");
            path.push(cur);
        }
        Ok(path)
    }

    /// Composite of the inclusions along a cover path.
    pub fn compose_path(&self, path: &[usize]) -> Result<StarHom, NetError> {
        let mut h = StarHom::identity(&self.fibres[path[0]]);
        for w in path.windows(2) {
            let step = self.inc.get(&(w[0], w[1])).ok_or_else(|| {
                NetError::MissingInclusion {
                    lo: self.label(w[0]).into(),
                    hi: self.label(w[1]).into(),
                }
            })?;
            h = step.compose(&h)?;
        }
        Ok(h)
    }

    /// `ȷ_{ao}` for `o <= a`, composed along one cover path.
    pub fn derived_inclusion(&self, o: usize, a: usize) -> Result<StarHom, NetError> {
        self.compose_path(&self.cover_path(o, a)?)
    }

    /// `ȷ_{ao}` for every comparable pair, each built from the first cover
    /// step and the already known inclusion above it.
    pub fn inclusion_table(&self) -> Result<HashMap<(usize, usize), StarHom>, NetError> {
        self.path_table(
            |o| Ok(StarHom::identity(&self.fibres[o])),
            |o, b, above: &StarHom| Ok(above.compose(&self.inc[&(o, b)])?),
        )
    }

    /// A value for every comparable pair `o <= a`, filled in reverse
    /// topological order: `step(o, b, table[b, a])` for the first upper cover
    /// `b` of `o` below `a`.
    pub(crate) fn path_table<T, I, F>(
        &self,
        id: I,
        step: F,
    ) -> Result<HashMap<(usize, usize), T>, NetError>
    where
        I: Fn(usize) -> Result<T, NetError>,
        F: Fn(usize, usize, &T) -> Result<T, NetError>,
    {
        let p = &self.poset;
        let order = p
            .topological_order()
            .ok_or_else(|| PosetError::CycleDetected(Vec::new()))?;
        let mut table: HashMap<(usize, usize), T> = HashMap::new();
        for &o in order.iter().rev() {
            table.insert((o, o), id(o)?);
            for a in p.up_set(o) {
                if a == o {
                    continue;
                }
                let b = *p
                    .upper_covers(o)
                    .iter()
                    .find(|&&b| p.leq_idx(b, a))
                    .expect("a cover below the target exists");
                let v = step(o, b, &table[&(b, a)])?;
                table.insert((o, a), v);
            }
        }
        Ok(table)
    }

    /// `(o, b, a)` with `o ⋖ b <= a` for every upper cover `b` of `o` below
    /// `a` other than the one [`path_table`](Self::path_table) used.
    pub(crate) fn branch_triples(&self) -> Vec<(usize, usize, usize)> {
        let p = &self.poset;
        let mut triples = Vec::new();
        for o in 0..p.len() {
            for a in p.up_set(o) {
                let ups = p.upper_covers(o).iter().copied().filter(|&b| p.leq_idx(b, a));
                triples.extend(ups.skip(1).map(|b| (o, b, a)));
            }
        }
        triples
    }

    /// Monomorphy on covers and path independence within `tol`.
    pub fn validate(&self) -> Report<NetError> {
        self.validate_with(HOM_TOL, Exec::default())
    }

    pub fn validate_with(&self, tol: f64, exec: Exec) -> Report<NetError> {
        let p = &self.poset;
        let mut report = Report::new();
        let mut mono = true;
        for (&(lo, hi), h) in &self.inc {
            if let Some(block) = h.first_killed_block() {
                mono = false;
                report.push_violation(NetError::NotMono {
                    lo: p.label(lo).into(),
                    hi: p.label(hi).into(),
                    block,
                });
            }
        }
        report.push_check(Check::exact("inclusions are unital monomorphisms", mono));
        let table = match self.inclusion_table() {
            Ok(t) => t,
            Err(e) => {
                report.push_check(Check::exact("path independence", false));
                report.push_violation(e);
                return report;
            }
        };
        // every first step o ⋖ b toward a must give the same composite
        let triples = self.branch_triples();
        let residuals = exec.map(&triples, |&(o, b, a)| {
            match table[&(b, a)].compose(&self.inc[&(o, b)]) {
                Ok(h) => h.distance(&table[&(o, a)]),
                Err(_) => f64::INFINITY,
            }
        });
        let mut worst: f64 = 0.0;
        for (&(o, b, a), &r) in triples.iter().zip(&residuals) {
            worst = worst.max(r);
            if r.is_nan() || r > tol {
                report.push_violation(NetError::NetRelationViolated {
                    lo: p.label(o).into(),
                    hi: p.label(a).into(),
                    via: p.label(b).into(),
                    residual: r,
                });
            }
        }
        report.push_check(Check::numeric("path independence", worst, tol));
        report
    }

    /// All inclusions are isomorphisms.
    pub fn is_bundle(&self) -> bool {
        self.inc.values().all(StarHom::is_isomorphism)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::matrix::random_unitary;
    use crate::algebra::{solve_intertwiner_fin, AlgElement, FinRep};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diamond() -> Arc<Poset> {
        Arc::new(
            Poset::new(
                ["b", "l", "r", "t"].map(String::from).to_vec(),
                &[("b", "l"), ("b", "r"), ("l", "t"), ("r", "t")],
            )
            .unwrap(),
        )
    }

    fn alg(b: &[usize]) -> FinDimAlgebra {
        FinDimAlgebra::new(b.to_vec()).unwrap()
    }

    #[test]
    fn constant_net_validates() {
        let net = Net::constant(diamond(), &alg(&[2, 1]));
        let r = net.validate();
        assert!(r.passed(), "{:?}", r.violations);
    }

    #[test]
    fn bratteli_diamond_with_solved_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let p = diamond();
        let (b, l, r, t) = (alg(&[1, 1]), alg(&[2, 1]), alg(&[1, 2]), alg(&[3, 3]));
        let twist = |h: StarHom, rng: &mut ChaCha8Rng| {
            let g = h.target().random_unitary(rng);
            h.then_inner(&g).unwrap()
        };
        let bl = twist(StarHom::standard(b.clone(), l.clone(), vec![vec![1, 1], vec![0, 1]]).unwrap(), &mut rng);
        let br = twist(StarHom::standard(b.clone(), r.clone(), vec![vec![0, 1], vec![1, 1]]).unwrap(), &mut rng);
        let lt = twist(StarHom::standard(l.clone(), t.clone(), vec![vec![1, 1], vec![1, 1]]).unwrap(), &mut rng);
        let rt0 = StarHom::standard(r.clone(), t.clone(), vec![vec![1, 1], vec![1, 1]]).unwrap();
        // fix the right-hand route: find w per top block with Ad(w)∘rt0∘br = lt∘bl
        let left = lt.compose(&bl).unwrap();
        let right = rt0.compose(&br).unwrap();
        let mut ws = Vec::new();
        for k in 0..t.num_blocks() {
            let row = |h: &StarHom| {
                let tgt = FinDimAlgebra::matrix(t.block(k));
                StarHom::new(h.source().clone(), tgt, vec![h.mult()[k].clone()], vec![h.conj()[k].clone()]).unwrap()
            };
            let r1 = FinRep::new(row(&right)).unwrap();
            let r2 = FinRep::new(row(&left)).unwrap();
            ws.push(solve_intertwiner_fin(&r1, &r2, 1e-10).unwrap());
        }
        let rt = rt0.then_inner(&AlgElement { blocks: ws }).unwrap();
        let inc: BTreeMap<_, _> = [((0, 1), bl), ((0, 2), br), ((1, 3), lt), ((2, 3), rt)].into_iter().collect();
        let net = Net::new(p, vec![b, l, r, t], inc).unwrap();
        let rep = net.validate();
        assert!(rep.passed(), "{:?}", rep.violations);
        assert!(rep.max_residual() < 1e-12);
    }

    #[test]
    fn twisted_cover_breaks_the_relation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = diamond();
        let a = alg(&[2]);
        let mut inc: BTreeMap<_, _> = p.covers().iter().map(|&c| (c, StarHom::identity(&a))).collect();
        let u = AlgElement { blocks: vec![random_unitary(2, &mut rng)] };
        inc.insert((2, 3), StarHom::inner(&a, &u).unwrap());
        let net = Net::new(p, vec![a; 4], inc).unwrap();
        let rep = net.validate();
        assert!(!rep.passed());
        assert!(matches!(
            rep.violations[0],
            NetError::NetRelationViolated { residual, .. } if residual > 1e-6
        ));
    }

    #[test]
    fn missing_and_foreign_inclusions() {
        let p = diamond();
        let a = alg(&[1]);
        let inc: BTreeMap<_, _> = [((0, 1), StarHom::identity(&a))].into_iter().collect();
        assert!(matches!(
            Net::new(p.clone(), vec![a.clone(); 4], inc),
            Err(NetError::MissingInclusion { .. })
        ));
        let mut inc: BTreeMap<_, _> = p.covers().iter().map(|&c| (c, StarHom::identity(&a))).collect();
        inc.insert((0, 3), StarHom::identity(&a));
        assert!(matches!(
            Net::new(p, vec![a; 4], inc),
            Err(NetError::UnexpectedInclusion { .. })
        ));
    }

    #[test]
    fn derived_inclusion_along_a_chain() {
        let p = Arc::new(
            Poset::new(["1", "2", "3"].map(String::from).to_vec(), &[("1", "2"), ("2", "3")]).unwrap(),
        );
        let (a, b, c) = (alg(&[1]), alg(&[2]), alg(&[4]));
        let ab = StarHom::standard(a.clone(), b.clone(), vec![vec![2]]).unwrap();
        let bc = StarHom::standard(b.clone(), c.clone(), vec![vec![2]]).unwrap();
        let direct = bc.compose(&ab).unwrap();
        let inc: BTreeMap<_, _> = [((0, 1), ab), ((1, 2), bc)].into_iter().collect();
        let net = Net::new(p, vec![a.clone(), b, c], inc).unwrap();
        assert!(net.derived_inclusion(0, 2).unwrap().distance(&direct) < 1e-15);
        assert!(net.derived_inclusion(0, 0).unwrap().distance(&StarHom::identity(&a)) == 0.0);
        assert!(matches!(net.derived_inclusion(2, 0), Err(NetError::NotComparable { .. })));
    }
}
