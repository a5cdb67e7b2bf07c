//! Algebras over relational structures: operation tables validated against
//! the liftings of their signature, algebra morphisms, products, generated
//! subalgebras, image factorisation, and the homomorphism theorem.
//!
//! Validation is a report, not a constructor failure: invalid algebras are
//! representable because negative fixtures and quotient-search intermediate
//! states need them.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::horn::{in_c, AxiomSet, CMembership};
use crate::liftings::apply_lifting;
use crate::signatures::{LiftedSignature, RelationalSignature};
use crate::structures::{
    decode_power, encode_power, power_len, substructure, Structure, StructureMap,
};
use crate::{Error, Result};

/// A structure together with one total operation table per symbol of a
/// lifted signature. Tables are dense arrays indexed by the shared
/// lexicographic tuple encoding.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Algebra {
    carrier: Structure,
    sig: LiftedSignature,
    ops: Vec<Vec<usize>>,
}

impl Algebra {
    pub fn new(carrier: Structure, sig: LiftedSignature, ops: Vec<Vec<usize>>) -> Result<Self> {
        if ops.len() != sig.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} operation tables, got {}",
                sig.len(),
                ops.len()
            )));
        }
        for (idx, table) in ops.iter().enumerate() {
            let arity = sig.base().arity(idx);
            let expected = power_len(carrier.size(), arity)?;
            if table.len() != expected {
                return Err(Error::InvalidInput(format!(
                    "operation `{}` table has length {}, expected {}",
                    sig.base().name(idx),
                    table.len(),
                    expected
                )));
            }
            if let Some(&bad) = table.iter().find(|v| **v >= carrier.size()) {
                return Err(Error::IndexOutOfRange {
                    index: bad,
                    size: carrier.size(),
                });
            }
        }
        Ok(Algebra { carrier, sig, ops })
    }

    /// An algebra with no operations at all.
    pub fn structure_only(carrier: Structure) -> Self {
        Algebra {
            carrier,
            sig: LiftedSignature::empty(),
            ops: Vec::new(),
        }
    }

    pub fn carrier(&self) -> &Structure {
        &self.carrier
    }

    pub fn rel_sig(&self) -> &Arc<RelationalSignature> {
        self.carrier.sig()
    }

    pub fn lifted_sig(&self) -> &LiftedSignature {
        &self.sig
    }

    pub fn size(&self) -> usize {
        self.carrier.size()
    }

    pub fn op_count(&self) -> usize {
        self.ops.len()
    }

    pub fn op_table(&self, op: usize) -> &[usize] {
        &self.ops[op]
    }

    pub fn apply_op(&self, op: usize, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.sig.base().arity(op));
        self.ops[op][encode_power(self.carrier.size(), args)]
    }

    pub fn identity_map(&self) -> AlgebraMap {
        AlgebraMap {
            dom: self.clone(),
            cod: self.clone(),
            table: (0..self.size()).collect(),
        }
    }
}

/// A total map between algebra carriers over a shared lifted signature.
/// Morphism-hood is a checked property.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgebraMap {
    dom: Algebra,
    cod: Algebra,
    table: Vec<usize>,
}

impl AlgebraMap {
    pub fn new(dom: Algebra, cod: Algebra, table: Vec<usize>) -> Result<Self> {
        if dom.sig != cod.sig {
            return Err(Error::SignatureMismatch(
                "domain and codomain have different lifted signatures".into(),
            ));
        }
        if dom.carrier.sig() != cod.carrier.sig() {
            return Err(Error::SignatureMismatch(
                "domain and codomain carriers are over different relational signatures".into(),
            ));
        }
        if table.len() != dom.size() {
            return Err(Error::InvalidInput(format!(
                "map table has length {}, domain has {} elements",
                table.len(),
                dom.size()
            )));
        }
        if let Some(&bad) = table.iter().find(|v| **v >= cod.size()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                size: cod.size(),
            });
        }
        Ok(AlgebraMap { dom, cod, table })
    }

    pub fn dom(&self) -> &Algebra {
        &self.dom
    }

    pub fn cod(&self) -> &Algebra {
        &self.cod
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    pub fn structure_map(&self) -> StructureMap {
        StructureMap::new(
            self.dom.carrier.clone(),
            self.cod.carrier.clone(),
            self.table.clone(),
        )
        .expect("algebra map tables are valid structure map tables")
    }

    pub fn compose(&self, then: &AlgebraMap) -> Result<AlgebraMap> {
        if self.cod != then.dom {
            return Err(Error::InvalidInput(
                "compose: codomain of the first map is not the domain of the second".into(),
            ));
        }
        AlgebraMap::new(
            self.dom.clone(),
            then.cod.clone(),
            self.table.iter().map(|&x| then.table[x]).collect(),
        )
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.cod.size()];
        for &v in &self.table {
            hit[v] = true;
        }
        hit.into_iter().all(|b| b)
    }
}

/// One operation/relation pair violating the lifting condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpViolation {
    pub op: usize,
    pub rel: usize,
    /// The related tuple of encoded argument vectors in the lifted structure.
    pub lifted_tuple: Vec<usize>,
    /// The images under the operation, not related in the carrier.
    pub outputs: Vec<usize>,
}

/// Result of validating an algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraValidation {
    pub op_violations: Vec<OpViolation>,
    pub membership: Option<CMembership>,
}

impl AlgebraValidation {
    pub fn valid(&self) -> bool {
        self.op_violations.is_empty()
            && self.membership.as_ref().map(|m| m.ok()).unwrap_or(true)
    }
}

/// Checks that every operation is relation-preserving from the lifted power
/// structure to the carrier and, when `ax` is given, that the carrier lies
/// in the axiomatized subcategory.
pub fn validate_algebra(a: &Algebra, ax: Option<&AxiomSet>) -> Result<AlgebraValidation> {
    let mut op_violations = Vec::new();
    for op in 0..a.op_count() {
        let arity = a.sig.base().arity(op);
        let lifted = apply_lifting(a.sig.lifting_of(op), &a.carrier, arity)?;
        for rel in 0..a.rel_sig().len() {
            for tuple in lifted.rel(rel) {
                let outputs: Vec<usize> = tuple.iter().map(|&u| a.ops[op][u]).collect();
                if !a.carrier.has(rel, &outputs) {
                    op_violations.push(OpViolation {
                        op,
                        rel,
                        lifted_tuple: tuple.clone(),
                        outputs,
                    });
                }
            }
        }
    }
    let membership = match ax {
        Some(ax) => Some(in_c(&a.carrier, ax)?),
        None => None,
    };
    Ok(AlgebraValidation {
        op_violations,
        membership,
    })
}

/// Witness for a failed morphism check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MorphismWitness {
    /// A related tuple whose image is not related.
    Rel { rel: usize, tuple: Vec<usize> },
    /// An argument vector on which the map is not equivariant.
    Op { op: usize, args: Vec<usize> },
}

/// Result of [`check_algebra_morphism`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphismCheck {
    pub holds: bool,
    pub witness: Option<MorphismWitness>,
}

/// A map is an algebra morphism iff it preserves relations and commutes
/// with every operation table.
pub fn check_algebra_morphism(h: &AlgebraMap) -> Result<MorphismCheck> {
    for rel in 0..h.dom.rel_sig().len() {
        for tuple in h.dom.carrier.rel(rel) {
            let image: Vec<usize> = tuple.iter().map(|&x| h.table[x]).collect();
            if !h.cod.carrier.has(rel, &image) {
                return Ok(MorphismCheck {
                    holds: false,
                    witness: Some(MorphismWitness::Rel {
                        rel,
                        tuple: tuple.clone(),
                    }),
                });
            }
        }
    }
    for op in 0..h.dom.op_count() {
        let arity = h.dom.sig.base().arity(op);
        let dsize = h.dom.size();
        for enc in 0..power_len(dsize, arity)? {
            let args = decode_power(dsize, arity, enc);
            let lhs = h.table[h.dom.ops[op][enc]];
            let mapped: Vec<usize> = args.iter().map(|&x| h.table[x]).collect();
            let rhs = h.cod.apply_op(op, &mapped);
            if lhs != rhs {
                return Ok(MorphismCheck {
                    holds: false,
                    witness: Some(MorphismWitness::Op { op, args }),
                });
            }
        }
    }
    Ok(MorphismCheck {
        holds: true,
        witness: None,
    })
}

/// Product of algebras: the product structure with coordinatewise
/// operations, plus the projections.
pub fn algebra_product(
    rsig: &Arc<RelationalSignature>,
    lsig: &LiftedSignature,
    factors: &[Algebra],
) -> Result<(Algebra, Vec<AlgebraMap>)> {
    for f in factors {
        if f.lifted_sig() != lsig {
            return Err(Error::SignatureMismatch(
                "product factors over different lifted signatures".into(),
            ));
        }
    }
    let carriers: Vec<Structure> = factors.iter().map(|f| f.carrier.clone()).collect();
    let (carrier, projections) = crate::structures::product(rsig, &carriers)?;
    let size = carrier.size();
    let sizes: Vec<usize> = factors.iter().map(|f| f.size()).collect();
    let mut ops = Vec::with_capacity(lsig.len());
    for op in 0..lsig.len() {
        let arity = lsig.base().arity(op);
        let mut table = Vec::with_capacity(power_len(size, arity)?);
        for enc in 0..power_len(size, arity)? {
            let args = decode_power(size, arity, enc);
            let arg_rows: Vec<Vec<usize>> = args
                .iter()
                .map(|&p| crate::structures::decode_tuple(&sizes, p))
                .collect();
            let result: Vec<usize> = factors
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    let slot: Vec<usize> = arg_rows.iter().map(|r| r[i]).collect();
                    f.apply_op(op, &slot)
                })
                .collect();
            table.push(crate::structures::encode_tuple(&sizes, &result));
        }
        ops.push(table);
    }
    let product = Algebra::new(carrier, lsig.clone(), ops)?;
    let proj_maps = projections
        .into_iter()
        .enumerate()
        .map(|(i, p)| AlgebraMap::new(product.clone(), factors[i].clone(), p.table().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    Ok((product, proj_maps))
}

/// The least subset of the carrier containing `seed` and closed under all
/// operation tables, with its induced algebra and the inclusion map.
pub fn subalgebra_generated(
    a: &Algebra,
    seed: &BTreeSet<usize>,
) -> Result<(BTreeSet<usize>, Algebra, AlgebraMap)> {
    if let Some(&bad) = seed.iter().find(|v| **v >= a.size()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            size: a.size(),
        });
    }
    let mut closed = seed.clone();
    loop {
        let mut added = false;
        for op in 0..a.op_count() {
            let arity = a.sig.base().arity(op);
            let members: Vec<usize> = closed.iter().copied().collect();
            let count = power_len(members.len(), arity)?;
            for enc in 0..count {
                let picks = decode_power(members.len().max(1), arity, enc);
                let args: Vec<usize> = picks.iter().map(|&i| members[i]).collect();
                let out = a.apply_op(op, &args);
                if closed.insert(out) {
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    induced_subalgebra(a, &closed)
}

/// The algebra induced on an op-closed subset; errors if the subset is not
/// closed.
pub fn induced_subalgebra(
    a: &Algebra,
    subset: &BTreeSet<usize>,
) -> Result<(BTreeSet<usize>, Algebra, AlgebraMap)> {
    let (sub_carrier, inclusion) = substructure(&a.carrier, subset)?;
    let elems: Vec<usize> = subset.iter().copied().collect();
    let sub_size = elems.len();
    let mut ops = Vec::with_capacity(a.op_count());
    for op in 0..a.op_count() {
        let arity = a.sig.base().arity(op);
        let mut table = Vec::with_capacity(power_len(sub_size, arity)?);
        for enc in 0..power_len(sub_size, arity)? {
            let picks = decode_power(sub_size.max(1), arity, enc);
            let args: Vec<usize> = picks.iter().map(|&i| elems[i]).collect();
            let out = a.apply_op(op, &args);
            let inside = elems.binary_search(&out).map_err(|_| {
                Error::InvalidInput(format!(
                    "subset is not closed under `{}`",
                    a.sig.base().name(op)
                ))
            })?;
            table.push(inside);
        }
        ops.push(table);
    }
    let sub = Algebra::new(sub_carrier, a.sig.clone(), ops)?;
    let map = AlgebraMap::new(sub.clone(), a.clone(), inclusion.table().to_vec())?;
    Ok((subset.clone(), sub, map))
}

/// Factorises an algebra morphism as a surjection onto its image followed
/// by an embedding; the middle algebra carries the codomain's operations
/// restricted to the image.
pub fn image_factorize_algebra(h: &AlgebraMap) -> Result<(AlgebraMap, AlgebraMap)> {
    let check = check_algebra_morphism(h)?;
    if !check.holds {
        return Err(Error::NotAMorphism(format!("{:?}", check.witness)));
    }
    let image: BTreeSet<usize> = h.table.iter().copied().collect();
    let (_, mid, inclusion) = induced_subalgebra(&h.cod, &image)?;
    let elems: Vec<usize> = image.into_iter().collect();
    let surj_table: Vec<usize> = h
        .table
        .iter()
        .map(|&v| elems.binary_search(&v).expect("image element"))
        .collect();
    let surj = AlgebraMap::new(h.dom.clone(), mid, surj_table)?;
    Ok((surj, inclusion))
}

/// Relabels an algebra's carrier along a permutation (`perm[old] = new`).
/// The result is isomorphic to the input via the permutation map.
pub fn relabel_algebra(a: &Algebra, perm: &[usize]) -> Result<Algebra> {
    let carrier = crate::structures::relabel_structure(&a.carrier, perm)?;
    let size = a.size();
    let mut inverse = vec![0usize; size];
    for (old, &new) in perm.iter().enumerate() {
        inverse[new] = old;
    }
    let mut ops = Vec::with_capacity(a.op_count());
    for op in 0..a.op_count() {
        let arity = a.sig.base().arity(op);
        let mut table = vec![0usize; a.ops[op].len()];
        for (enc, slot) in table.iter_mut().enumerate() {
            let new_args = decode_power(size, arity, enc);
            let old_args: Vec<usize> = new_args.iter().map(|&x| inverse[x]).collect();
            *slot = perm[a.apply_op(op, &old_args)];
        }
        ops.push(table);
    }
    Algebra::new(carrier, a.sig.clone(), ops)
}

/// Outcome of the homomorphism-theorem test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorOutcome {
    /// The unique map `g` with `h = g . e`.
    Factors(AlgebraMap),
    /// Condition (1) fails: `e` merges two elements that `h` separates.
    KernelObstruction { merged: (usize, usize) },
    /// Condition (2) fails: a related tuple in the middle codomain whose
    /// image under the induced map is not related.
    RelationObstruction { rel: usize, tuple: Vec<usize> },
}

/// Decides whether `h` factorizes through the surjection `e` (shared
/// domain), returning the unique factorisation when the kernel and relation
/// conditions hold and the violated condition otherwise.
pub fn factor_through(e: &AlgebraMap, h: &AlgebraMap) -> Result<FactorOutcome> {
    if e.dom != h.dom {
        return Err(Error::InvalidInput(
            "factor_through requires a shared domain".into(),
        ));
    }
    if !e.is_surjective() {
        return Err(Error::NotSurjective);
    }
    // Condition (1): kernel inclusion.
    let n = e.dom.size();
    for x in 0..n {
        for y in x + 1..n {
            if e.table[x] == e.table[y] && h.table[x] != h.table[y] {
                return Ok(FactorOutcome::KernelObstruction { merged: (x, y) });
            }
        }
    }
    // The candidate g, defined on representatives.
    let mut g = vec![usize::MAX; e.cod.size()];
    for x in 0..n {
        g[e.table[x]] = h.table[x];
    }
    // Condition (2): relations of the middle object map into relations of
    // the target. Since e is surjective this is equivalent to the condition
    // quantified over domain tuples.
    for rel in 0..e.cod.rel_sig().len() {
        for tuple in e.cod.carrier().rel(rel) {
            let image: Vec<usize> = tuple.iter().map(|&b| g[b]).collect();
            if !h.cod.carrier().has(rel, &image) {
                return Ok(FactorOutcome::RelationObstruction {
                    rel,
                    tuple: tuple.clone(),
                });
            }
        }
    }
    Ok(FactorOutcome::Factors(AlgebraMap::new(
        e.cod.clone(),
        h.cod.clone(),
        g,
    )?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::horn::{gmet_preset, metric_to_structure, structure_to_metric, GmetFlags};
    use crate::liftings::LiftingSpec;
    use crate::signatures::{
        make_poset_signature, AlgebraicSignature, Quantity, QuantityLattice,
    };
    use crate::structures::all_tables;

    fn q(n: i64, d: i64) -> Quantity {
        Quantity::new(n, d)
    }

    fn binary_min_sig() -> LiftedSignature {
        LiftedSignature::uniform(
            AlgebraicSignature::new([("min", 2)]).unwrap(),
            LiftingSpec::Product,
        )
        .unwrap()
    }

    /// ({0, 1}, d(0,1) = 1/2) with binary min under the product lifting.
    fn min_metric_algebra() -> Algebra {
        let lat = QuantityLattice::quarters();
        let carrier =
            metric_to_structure(&lat, &[vec![q(0, 1), q(1, 2)], vec![q(1, 2), q(0, 1)]].to_vec())
                .unwrap();
        Algebra::new(carrier, binary_min_sig(), vec![vec![0, 0, 0, 1]]).unwrap()
    }

    /// The 2-chain with binary min under the product lifting.
    fn min_chain_algebra() -> Algebra {
        let carrier = Structure::new(
            make_poset_signature(),
            2,
            vec![vec![vec![0, 0], vec![1, 1], vec![0, 1]]],
        )
        .unwrap();
        Algebra::new(carrier, binary_min_sig(), vec![vec![0, 0, 0, 1]]).unwrap()
    }

    #[test]
    fn min_is_nonexpansive_on_the_metric_carrier() {
        let a = min_metric_algebra();
        // Independent check: d(min(x,y), min(x',y')) <= max(d(x,x'), d(y,y'))
        // over all 16 argument pairs.
        let d = structure_to_metric(a.carrier()).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                for x2 in 0..2 {
                    for y2 in 0..2 {
                        let lhs = d[a.apply_op(0, &[x, y])][a.apply_op(0, &[x2, y2])];
                        let rhs = d[x][x2].max(d[y][y2]);
                        assert!(lhs <= rhs);
                    }
                }
            }
        }
        assert!(validate_algebra(&a, None).unwrap().valid());
        let lat = QuantityLattice::quarters();
        let ax = gmet_preset(&lat, GmetFlags::metric());
        assert!(validate_algebra(&a, Some(&ax)).unwrap().valid());
    }

    #[test]
    fn any_table_is_valid_under_the_discrete_lifting() {
        let lat = QuantityLattice::quarters();
        let carrier =
            metric_to_structure(&lat, &[vec![q(0, 1), q(1, 2)], vec![q(1, 2), q(0, 1)]].to_vec())
                .unwrap();
        let lsig = LiftedSignature::uniform(
            AlgebraicSignature::new([("f", 2)]).unwrap(),
            LiftingSpec::Discrete,
        )
        .unwrap();
        for table in all_tables(4, 2) {
            let a = Algebra::new(carrier.clone(), lsig.clone(), vec![table]).unwrap();
            assert!(validate_algebra(&a, None).unwrap().valid());
        }
    }

    #[test]
    fn non_monotone_op_is_reported_with_witness() {
        // Unary swap on the 2-chain violates monotonicity under the product
        // lifting: 0 <= 1 but swap(0) = 1 > 0 = swap(1).
        let carrier = Structure::new(
            make_poset_signature(),
            2,
            vec![vec![vec![0, 0], vec![1, 1], vec![0, 1]]],
        )
        .unwrap();
        let lsig = LiftedSignature::uniform(
            AlgebraicSignature::new([("swap", 1)]).unwrap(),
            LiftingSpec::Product,
        )
        .unwrap();
        let a = Algebra::new(carrier, lsig, vec![vec![1, 0]]).unwrap();
        let report = validate_algebra(&a, None).unwrap();
        assert!(!report.valid());
        let v = &report.op_violations[0];
        assert_eq!(v.lifted_tuple, vec![0, 1]);
        assert_eq!(v.outputs, vec![1, 0]);
    }

    #[test]
    fn identity_is_a_morphism() {
        let a = min_metric_algebra();
        assert!(check_algebra_morphism(&a.identity_map()).unwrap().holds);
    }

    #[test]
    fn product_projections_are_morphisms() {
        let a = min_metric_algebra();
        let (p, projs) =
            algebra_product(a.rel_sig(), a.lifted_sig(), &[a.clone(), a.clone()]).unwrap();
        assert_eq!(p.size(), 4);
        for proj in &projs {
            assert!(check_algebra_morphism(proj).unwrap().holds);
        }
        // The product of valid GMet algebras validates, and its carrier
        // stays in C.
        let lat = QuantityLattice::quarters();
        let ax = gmet_preset(&lat, GmetFlags::metric());
        assert!(validate_algebra(&p, Some(&ax)).unwrap().valid());
    }

    #[test]
    fn equivariance_violation_is_caught() {
        // On a relation-free carrier the structure half passes trivially;
        // the swap table then fails equivariance: swap(min(0,1)) = 1 while
        // min(swap 0, swap 1) = 0.
        let lsig = binary_min_sig();
        let discrete = Structure::discrete(make_poset_signature(), 2);
        let a2 = Algebra::new(discrete.clone(), lsig.clone(), vec![vec![0, 0, 0, 1]]).unwrap();
        let b2 = Algebra::new(discrete, lsig, vec![vec![0, 0, 0, 1]]).unwrap();
        let swap = AlgebraMap::new(a2, b2, vec![1, 0]).unwrap();
        let check = check_algebra_morphism(&swap).unwrap();
        assert!(!check.holds);
        assert!(matches!(
            check.witness,
            Some(MorphismWitness::Op { op: 0, .. })
        ));
    }

    #[test]
    fn unary_product_is_an_isomorphic_copy() {
        let a = min_metric_algebra();
        let (p, projs) =
            algebra_product(a.rel_sig(), a.lifted_sig(), std::slice::from_ref(&a)).unwrap();
        assert_eq!(p, a);
        assert!(check_algebra_morphism(&projs[0]).unwrap().holds);
    }

    #[test]
    fn empty_product_is_the_one_point_algebra() {
        let a = min_metric_algebra();
        let (p, projs) = algebra_product(a.rel_sig(), a.lifted_sig(), &[]).unwrap();
        assert!(projs.is_empty());
        assert_eq!(p.size(), 1);
        for rel in 0..p.rel_sig().len() {
            assert!(p.carrier().has(rel, &[0, 0]));
        }
        assert!(validate_algebra(&p, None).unwrap().valid());
    }

    #[test]
    fn subalgebra_generation_reaches_the_fixpoint() {
        let a = min_metric_algebra();
        let all: BTreeSet<usize> = (0..2).collect();
        let (subset, sub, _) = subalgebra_generated(&a, &all).unwrap();
        assert_eq!(subset, all);
        assert_eq!(&sub, &a);

        let (subset, _, incl) = subalgebra_generated(&a, &BTreeSet::from([0])).unwrap();
        assert_eq!(subset, BTreeSet::from([0]));
        assert!(check_algebra_morphism(&incl).unwrap().holds);
        assert!(incl.structure_map().classify().is_embedding());
    }

    #[test]
    fn constants_seed_the_closure() {
        // Empty seed plus a constant symbol pointing at 1.
        let carrier = Structure::new(
            make_poset_signature(),
            2,
            vec![vec![vec![0, 0], vec![1, 1], vec![0, 1]]],
        )
        .unwrap();
        let lsig = LiftedSignature::new(
            AlgebraicSignature::new([("c", 0), ("min", 2)]).unwrap(),
            vec![LiftingSpec::Product, LiftingSpec::Product],
        )
        .unwrap();
        let a = Algebra::new(carrier, lsig, vec![vec![1], vec![0, 0, 0, 1]]).unwrap();
        let (subset, _, _) = subalgebra_generated(&a, &BTreeSet::new()).unwrap();
        assert_eq!(subset, BTreeSet::from([1]));
    }

    #[test]
    fn image_factorisation_round_trips() {
        let a = min_chain_algebra();
        let id = a.identity_map();
        let (e, m) = image_factorize_algebra(&id).unwrap();
        assert_eq!(e.table(), id.table());
        assert_eq!(m.table(), id.table());

        // Surjective morphism: the embedding part is identity-shaped.
        let one = {
            let carrier = Structure::new(
                make_poset_signature(),
                1,
                vec![vec![vec![0, 0]]],
            )
            .unwrap();
            Algebra::new(carrier, a.lifted_sig().clone(), vec![vec![0]]).unwrap()
        };
        let collapse = AlgebraMap::new(a.clone(), one, vec![0, 0]).unwrap();
        assert!(check_algebra_morphism(&collapse).unwrap().holds);
        let (e, m) = image_factorize_algebra(&collapse).unwrap();
        assert!(e.is_surjective());
        assert_eq!(m.table(), &[0]);
        assert_eq!(e.compose(&m).unwrap(), collapse);
    }

    #[test]
    fn factor_through_identity_case() {
        let a = min_chain_algebra();
        let one = {
            let carrier =
                Structure::new(make_poset_signature(), 1, vec![vec![vec![0, 0]]]).unwrap();
            Algebra::new(carrier, a.lifted_sig().clone(), vec![vec![0]]).unwrap()
        };
        let e = AlgebraMap::new(a.clone(), one.clone(), vec![0, 0]).unwrap();
        match factor_through(&e, &e).unwrap() {
            FactorOutcome::Factors(g) => {
                assert_eq!(g.table(), &[0]);
                assert!(check_algebra_morphism(&g).unwrap().holds);
            }
            other => panic!("expected factorisation, got {other:?}"),
        }
    }

    #[test]
    fn kernel_obstruction_is_cited() {
        let a = min_chain_algebra();
        let one = {
            let carrier =
                Structure::new(make_poset_signature(), 1, vec![vec![vec![0, 0]]]).unwrap();
            Algebra::new(carrier, a.lifted_sig().clone(), vec![vec![0]]).unwrap()
        };
        // e collapses {0, 1}; h = identity separates them.
        let e = AlgebraMap::new(a.clone(), one, vec![0, 0]).unwrap();
        let h = a.identity_map();
        assert_eq!(
            factor_through(&e, &h).unwrap(),
            FactorOutcome::KernelObstruction { merged: (0, 1) }
        );
    }

    #[test]
    fn factor_decision_matches_exhaustive_search() {
        // Over a small corpus, factor_through agrees with brute force over
        // all candidate tables g: B -> C with h = g . e.
        let algebras = vec![min_chain_algebra(), {
            let carrier =
                Structure::new(make_poset_signature(), 1, vec![vec![vec![0, 0]]]).unwrap();
            Algebra::new(carrier, binary_min_sig(), vec![vec![0]]).unwrap()
        }];
        let mut decisions = 0;
        for a in &algebras {
            for b in &algebras {
                for c in &algebras {
                    for etab in all_tables(a.size(), b.size()) {
                        let e = AlgebraMap::new(a.clone(), b.clone(), etab).unwrap();
                        if !e.is_surjective() || !check_algebra_morphism(&e).unwrap().holds {
                            continue;
                        }
                        for htab in all_tables(a.size(), c.size()) {
                            let h = AlgebraMap::new(a.clone(), c.clone(), htab).unwrap();
                            if !check_algebra_morphism(&h).unwrap().holds {
                                continue;
                            }
                            let decided = factor_through(&e, &h).unwrap();
                            let found: Vec<AlgebraMap> = all_tables(b.size(), c.size())
                                .filter_map(|gtab| {
                                    let g = AlgebraMap::new(b.clone(), c.clone(), gtab).ok()?;
                                    (check_algebra_morphism(&g).unwrap().holds
                                        && e.compose(&g).unwrap() == h)
                                        .then_some(g)
                                })
                                .collect();
                            match decided {
                                FactorOutcome::Factors(g) => {
                                    assert_eq!(found.len(), 1);
                                    assert_eq!(found[0], g);
                                    assert!(check_algebra_morphism(&g).unwrap().holds);
                                }
                                _ => assert!(found.is_empty()),
                            }
                            decisions += 1;
                        }
                    }
                }
            }
        }
        assert!(decisions > 0);
    }
}
