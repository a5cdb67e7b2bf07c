//! Finite structures over a relational signature, their maps, and the
//! category-level operations: products, coproducts, substructures and image
//! factorisation.
//!
//! Carriers are index ranges `0..size`; element names live only in the DSL
//! layer. Relation storage is a sorted tuple set, so equality and hashing of
//! structures are canonical.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::signatures::RelationalSignature;
use crate::{Error, Result};

/// Lexicographic index of `tuple` in the cartesian product with the given
/// factor sizes; the first coordinate is the most significant digit.
pub fn encode_tuple(sizes: &[usize], tuple: &[usize]) -> usize {
    debug_assert_eq!(sizes.len(), tuple.len());
    let mut idx = 0;
    for (v, s) in tuple.iter().zip(sizes) {
        debug_assert!(v < s);
        idx = idx * s + v;
    }
    idx
}

/// Inverse of [`encode_tuple`].
pub fn decode_tuple(sizes: &[usize], mut idx: usize) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for (slot, s) in out.iter_mut().zip(sizes).rev() {
        *slot = idx % s;
        idx /= s;
    }
    out
}

/// Lexicographic index of an `n`-tuple over a single carrier of size `size`.
pub fn encode_power(size: usize, tuple: &[usize]) -> usize {
    let mut idx = 0;
    for v in tuple {
        debug_assert!(*v < size);
        idx = idx * size + v;
    }
    idx
}

/// Inverse of [`encode_power`].
pub fn decode_power(size: usize, n: usize, mut idx: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = idx % size;
        idx /= size;
    }
    out
}

/// `size.pow(n)` with a usize overflow check.
pub fn power_len(size: usize, n: usize) -> Result<usize> {
    let mut acc: usize = 1;
    for _ in 0..n {
        acc = acc.checked_mul(size).ok_or(Error::BoundExceeded {
            what: "power carrier size".into(),
            limit: usize::MAX,
            actual: size,
        })?;
    }
    Ok(acc)
}

/// All total maps `0..dom_size -> 0..cod_size` in lexicographic order.
pub fn all_tables(dom_size: usize, cod_size: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = if dom_size == 0 {
        1
    } else if cod_size == 0 {
        0
    } else {
        cod_size.pow(dom_size as u32)
    };
    (0..total).map(move |i| decode_power(cod_size, dom_size, i))
}

/// A finite structure: a carrier `0..size` with one tuple set per relation
/// symbol of the signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Structure {
    sig: Arc<RelationalSignature>,
    size: usize,
    rels: Vec<BTreeSet<Vec<usize>>>,
}

impl Structure {
    /// A structure with all relations empty.
    pub fn discrete(sig: Arc<RelationalSignature>, size: usize) -> Self {
        let rels = vec![BTreeSet::new(); sig.len()];
        Structure { sig, size, rels }
    }

    pub fn new(
        sig: Arc<RelationalSignature>,
        size: usize,
        rels: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        if rels.len() != sig.len() {
            return Err(Error::SignatureMismatch(format!(
                "expected {} relation sets, got {}",
                sig.len(),
                rels.len()
            )));
        }
        let mut out = Structure::discrete(sig, size);
        for (rel, tuples) in rels.into_iter().enumerate() {
            for tuple in tuples {
                out.insert_tuple(rel, tuple)?;
            }
        }
        Ok(out)
    }

    pub fn insert_tuple(&mut self, rel: usize, tuple: Vec<usize>) -> Result<()> {
        let arity = self.sig.arity(rel);
        if tuple.len() != arity {
            return Err(Error::ArityMismatch {
                symbol: self.sig.name(rel).to_string(),
                expected: arity,
                got: tuple.len(),
            });
        }
        if let Some(&bad) = tuple.iter().find(|v| **v >= self.size) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                size: self.size,
            });
        }
        self.rels[rel].insert(tuple);
        Ok(())
    }

    pub fn sig(&self) -> &Arc<RelationalSignature> {
        &self.sig
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn rel(&self, rel: usize) -> &BTreeSet<Vec<usize>> {
        &self.rels[rel]
    }

    pub fn has(&self, rel: usize, tuple: &[usize]) -> bool {
        self.rels[rel].contains(tuple)
    }

    /// Total number of related tuples, across all symbols.
    pub fn tuple_count(&self) -> usize {
        self.rels.iter().map(|r| r.len()).sum()
    }

    /// All `arity`-tuples over the carrier, in lexicographic order.
    pub fn all_tuples(&self, arity: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
        let size = self.size;
        let total = if size == 0 && arity > 0 { 0 } else { size.pow(arity as u32) };
        (0..total).map(move |i| decode_power(size, arity, i))
    }

    pub fn identity_map(&self) -> StructureMap {
        StructureMap {
            dom: self.clone(),
            cod: self.clone(),
            table: (0..self.size).collect(),
        }
    }
}

/// A total map between carriers of two structures over the same signature.
/// Being a morphism (relation-preserving) is a checked property, not an
/// invariant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StructureMap {
    dom: Structure,
    cod: Structure,
    table: Vec<usize>,
}

impl StructureMap {
    pub fn new(dom: Structure, cod: Structure, table: Vec<usize>) -> Result<Self> {
        if dom.sig != cod.sig {
            return Err(Error::SignatureMismatch(
                "domain and codomain carry different signatures".into(),
            ));
        }
        if table.len() != dom.size {
            return Err(Error::InvalidInput(format!(
                "map table has length {}, domain has {} elements",
                table.len(),
                dom.size
            )));
        }
        if let Some(&bad) = table.iter().find(|v| **v >= cod.size) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                size: cod.size,
            });
        }
        Ok(StructureMap { dom, cod, table })
    }

    pub fn dom(&self) -> &Structure {
        &self.dom
    }

    pub fn cod(&self) -> &Structure {
        &self.cod
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    pub fn compose(&self, then: &StructureMap) -> Result<StructureMap> {
        if self.cod != then.dom {
            return Err(Error::InvalidInput(
                "compose: codomain of the first map is not the domain of the second".into(),
            ));
        }
        StructureMap::new(
            self.dom.clone(),
            then.cod.clone(),
            self.table.iter().map(|&x| then.table[x]).collect(),
        )
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.cod.size];
        for &v in &self.table {
            hit[v] = true;
        }
        hit.into_iter().all(|b| b)
    }

    pub fn is_injective(&self) -> bool {
        let mut hit = vec![false; self.cod.size];
        for &v in &self.table {
            if hit[v] {
                return false;
            }
            hit[v] = true;
        }
        true
    }

    /// Exhaustive tuple check of the four morphism flags.
    pub fn classify(&self) -> MorphismClass {
        let preserves = self.dom.rels.iter().enumerate().all(|(rel, tuples)| {
            tuples.iter().all(|t| {
                let image: Vec<usize> = t.iter().map(|&x| self.table[x]).collect();
                self.cod.has(rel, &image)
            })
        });
        let mut reflects = true;
        'outer: for rel in 0..self.dom.sig.len() {
            let arity = self.dom.sig.arity(rel);
            for tuple in self.dom.all_tuples(arity) {
                let image: Vec<usize> = tuple.iter().map(|&x| self.table[x]).collect();
                if self.cod.has(rel, &image) && !self.dom.has(rel, &tuple) {
                    reflects = false;
                    break 'outer;
                }
            }
        }
        MorphismClass {
            preserves,
            reflects,
            injective: self.is_injective(),
            surjective: self.is_surjective(),
        }
    }
}

/// The classification flags of a structure map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MorphismClass {
    pub preserves: bool,
    pub reflects: bool,
    pub injective: bool,
    pub surjective: bool,
}

impl MorphismClass {
    /// Injective, relation-preserving and relation-reflecting.
    pub fn is_embedding(&self) -> bool {
        self.injective && self.preserves && self.reflects
    }

    /// Surjective, relation-preserving and relation-reflecting.
    pub fn is_reflecting_surjection(&self) -> bool {
        self.surjective && self.preserves && self.reflects
    }
}

/// Product of finitely many structures over `sig`, with its projections.
/// The carrier is the cartesian product under the lexicographic index
/// encoding (factor order fixed); a tuple is related iff it is related in
/// every factor. The empty product is the one-element structure with all
/// relations total.
pub fn product(
    sig: &Arc<RelationalSignature>,
    factors: &[Structure],
) -> Result<(Structure, Vec<StructureMap>)> {
    for f in factors {
        if f.sig() != sig {
            return Err(Error::SignatureMismatch(
                "product factors over different signatures".into(),
            ));
        }
    }
    let sizes: Vec<usize> = factors.iter().map(|f| f.size).collect();
    let mut size = 1usize;
    for s in &sizes {
        size = size.checked_mul(*s).ok_or(Error::BoundExceeded {
            what: "product carrier size".into(),
            limit: usize::MAX,
            actual: *s,
        })?;
    }
    let mut out = Structure::discrete(sig.clone(), size);
    for rel in 0..sig.len() {
        let arity = sig.arity(rel);
        let total = if size == 0 { 0 } else { size.pow(arity as u32) };
        for enc in 0..total {
            let tuple = decode_power(size, arity, enc);
            let columns: Vec<Vec<usize>> = tuple
                .iter()
                .map(|&p| decode_tuple(&sizes, p))
                .collect();
            let related = factors.iter().enumerate().all(|(i, f)| {
                let slot: Vec<usize> = columns.iter().map(|c| c[i]).collect();
                f.has(rel, &slot)
            });
            if related {
                out.rels[rel].insert(tuple);
            }
        }
    }
    let projections = (0..factors.len())
        .map(|i| {
            let table = (0..size)
                .map(|p| decode_tuple(&sizes, p)[i])
                .collect();
            StructureMap::new(out.clone(), factors[i].clone(), table).expect("valid projection")
        })
        .collect();
    Ok((out, projections))
}

/// Coproduct (disjoint union) of structures over `sig`, with its
/// injections. A tuple is related iff all entries lie in one summand and
/// are related there.
pub fn coproduct(
    sig: &Arc<RelationalSignature>,
    summands: &[Structure],
) -> Result<(Structure, Vec<StructureMap>)> {
    for s in summands {
        if s.sig() != sig {
            return Err(Error::SignatureMismatch(
                "coproduct summands over different signatures".into(),
            ));
        }
    }
    let mut offsets = Vec::with_capacity(summands.len());
    let mut size = 0;
    for s in summands {
        offsets.push(size);
        size += s.size;
    }
    let mut out = Structure::discrete(sig.clone(), size);
    for (i, s) in summands.iter().enumerate() {
        for (rel, tuples) in s.rels.iter().enumerate() {
            for t in tuples {
                let shifted: Vec<usize> = t.iter().map(|&x| x + offsets[i]).collect();
                out.rels[rel].insert(shifted);
            }
        }
    }
    let injections = summands
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let table = (0..s.size).map(|x| x + offsets[i]).collect();
            StructureMap::new(s.clone(), out.clone(), table).expect("valid injection")
        })
        .collect();
    Ok((out, injections))
}

/// The substructure induced on `subset` (relations restricted to tuples
/// inside the subset), together with the inclusion map.
pub fn substructure(
    a: &Structure,
    subset: &BTreeSet<usize>,
) -> Result<(Structure, StructureMap)> {
    if let Some(&bad) = subset.iter().find(|v| **v >= a.size) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            size: a.size,
        });
    }
    let elems: Vec<usize> = subset.iter().copied().collect();
    let pos_of = |x: usize| elems.binary_search(&x).ok();
    let mut sub = Structure::discrete(a.sig.clone(), elems.len());
    for (rel, tuples) in a.rels.iter().enumerate() {
        for t in tuples {
            if let Some(inside) = t.iter().map(|&x| pos_of(x)).collect::<Option<Vec<usize>>>() {
                sub.rels[rel].insert(inside);
            }
        }
    }
    let inclusion = StructureMap::new(sub.clone(), a.clone(), elems)?;
    Ok((sub, inclusion))
}

/// Factorises a relation-preserving map as a surjection onto its image
/// followed by an embedding. The middle object is the substructure of the
/// codomain induced on the image, canonicalized by ascending image indices.
pub fn image_factorize(f: &StructureMap) -> Result<(StructureMap, StructureMap)> {
    if !f.classify().preserves {
        return Err(Error::NotPreserving);
    }
    let image: BTreeSet<usize> = f.table.iter().copied().collect();
    let (mid, inclusion) = substructure(&f.cod, &image)?;
    let elems: Vec<usize> = image.into_iter().collect();
    let surj_table: Vec<usize> = f
        .table
        .iter()
        .map(|&v| elems.binary_search(&v).expect("image element"))
        .collect();
    let surj = StructureMap::new(f.dom.clone(), mid, surj_table)?;
    Ok((surj, inclusion))
}

/// All subsets of the carrier with at most `max_size` elements (all subsets
/// when `None`), each with its induced structure. Subsets are emitted in
/// ascending bitmask order.
pub fn enumerate_substructures(
    a: &Structure,
    max_size: Option<usize>,
) -> Vec<(BTreeSet<usize>, Structure)> {
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << a.size) {
        let subset: BTreeSet<usize> = (0..a.size).filter(|i| mask >> i & 1 == 1).collect();
        if let Some(m) = max_size {
            if subset.len() > m {
                continue;
            }
        }
        let (sub, _) = substructure(a, &subset).expect("subset is in range");
        out.push((subset, sub));
    }
    out
}

/// Relabels the carrier along a permutation (`perm[old] = new`).
pub fn relabel_structure(a: &Structure, perm: &[usize]) -> Result<Structure> {
    if perm.len() != a.size {
        return Err(Error::InvalidInput(
            "permutation length does not match the carrier".into(),
        ));
    }
    let mut seen = vec![false; a.size];
    for &p in perm {
        if p >= a.size || seen[p] {
            return Err(Error::InvalidInput("not a permutation".into()));
        }
        seen[p] = true;
    }
    let mut out = Structure::discrete(a.sig.clone(), a.size);
    for (rel, tuples) in a.rels.iter().enumerate() {
        for t in tuples {
            out.rels[rel].insert(t.iter().map(|&x| perm[x]).collect());
        }
    }
    Ok(out)
}

/// All structures over `sig` with the given carrier size. The number of
/// candidate relation families is `2^(sum of size^arity)`; an error is
/// returned when that exponent exceeds `max_bits`.
pub fn enumerate_structures(
    sig: &Arc<RelationalSignature>,
    size: usize,
    max_bits: usize,
) -> Result<Vec<Structure>> {
    let mut slots: Vec<(usize, Vec<usize>)> = Vec::new();
    for rel in 0..sig.len() {
        let arity = sig.arity(rel);
        let total = if size == 0 { 0 } else { size.pow(arity as u32) };
        for enc in 0..total {
            slots.push((rel, decode_power(size, arity, enc)));
        }
    }
    if slots.len() > max_bits {
        return Err(Error::BoundExceeded {
            what: "relation family enumeration bits".into(),
            limit: max_bits,
            actual: slots.len(),
        });
    }
    let mut out = Vec::with_capacity(1 << slots.len());
    for mask in 0u64..(1u64 << slots.len()) {
        let mut s = Structure::discrete(sig.clone(), size);
        for (bit, (rel, tuple)) in slots.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                s.rels[*rel].insert(tuple.clone());
            }
        }
        out.push(s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::horn::{gmet_preset, metric_to_structure, GmetFlags};
    use crate::signatures::{make_gmet_signature, make_poset_signature, QuantityLattice};
    use crate::Quantity;

    fn q(n: i64, d: i64) -> Quantity {
        Quantity::new(n, d)
    }

    /// The 2-chain poset 0 <= 1.
    fn two_chain() -> Structure {
        let sig = make_poset_signature();
        Structure::new(sig, 2, vec![vec![vec![0, 0], vec![1, 1], vec![0, 1]]]).unwrap()
    }

    /// Two points at the given distance, as a GMet structure over quarters.
    fn two_points(dist: Quantity) -> Structure {
        let lat = QuantityLattice::quarters();
        let d = vec![vec![q(0, 1), dist], vec![dist, q(0, 1)]];
        metric_to_structure(&lat, &d).unwrap()
    }

    #[test]
    fn tuple_encoding_round_trips() {
        let sizes = [3, 2, 4];
        for a in 0..3 {
            for b in 0..2 {
                for c in 0..4 {
                    let t = vec![a, b, c];
                    assert_eq!(decode_tuple(&sizes, encode_tuple(&sizes, &t)), t);
                }
            }
        }
        for idx in 0..8 {
            assert_eq!(encode_power(2, &decode_power(2, 3, idx)), idx);
        }
    }

    #[test]
    fn identity_classifies_fully() {
        let m2 = two_points(q(1, 2));
        let c = m2.identity_map().classify();
        assert!(c.preserves && c.reflects && c.injective && c.surjective);
        assert!(c.is_embedding());
        assert!(c.is_reflecting_surjection());
    }

    #[test]
    fn identity_table_between_different_metrics() {
        // M2 has d(a,b) = 1/2, N2 has d(a,b) = 1/4: the identity table
        // preserves (relations only grow) but does not reflect.
        let m2 = two_points(q(1, 2));
        let n2 = two_points(q(1, 4));
        let f = StructureMap::new(m2, n2, vec![0, 1]).unwrap();
        let c = f.classify();
        assert!(c.preserves);
        assert!(!c.reflects);
    }

    #[test]
    fn constant_map_to_relationless_point() {
        let sig = make_poset_signature();
        let dom = Structure::discrete(sig.clone(), 2);
        let cod = Structure::discrete(sig, 1);
        let f = StructureMap::new(dom, cod, vec![0, 0]).unwrap();
        let c = f.classify();
        assert!(c.preserves);
        assert!(c.reflects);
        assert!(!c.injective);
    }

    #[test]
    fn empty_product_is_terminal_with_total_relations() {
        let sig = make_poset_signature();
        let (one, projs) = product(&sig, &[]).unwrap();
        assert_eq!(one.size(), 1);
        assert!(projs.is_empty());
        assert!(one.has(0, &[0, 0]));
    }

    #[test]
    fn unary_product_is_isomorphic_copy() {
        let m2 = two_points(q(1, 2));
        let (p, projs) = product(m2.sig(), std::slice::from_ref(&m2)).unwrap();
        assert_eq!(p, m2);
        assert!(projs[0].classify().is_embedding());
    }

    #[test]
    fn square_of_two_chain_has_nine_leq_pairs() {
        let chain = two_chain();
        let (p, projs) = product(chain.sig(), &[chain.clone(), chain.clone()]).unwrap();
        assert_eq!(p.size(), 4);
        // Oracle: (a,b) <= (a',b') iff a <= a' and b <= b'.
        let mut expected = 0;
        for a in 0..2 {
            for b in 0..2 {
                for a2 in 0..2 {
                    for b2 in 0..2 {
                        if chain.has(0, &[a, a2]) && chain.has(0, &[b, b2]) {
                            expected += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(expected, 9);
        assert_eq!(p.rel(0).len(), 9);
        for proj in &projs {
            assert!(proj.classify().preserves);
        }
    }

    #[test]
    fn product_projections_jointly_reflect() {
        let chain = two_chain();
        let m2 = two_points(q(1, 2));
        for factors in [vec![chain.clone(), chain.clone()], vec![m2.clone(), m2]] {
            let sig = factors[0].sig().clone();
            let (p, projs) = product(&sig, &factors).unwrap();
            for rel in 0..sig.len() {
                let arity = sig.arity(rel);
                for tuple in p.all_tuples(arity) {
                    let in_all = projs.iter().all(|proj| {
                        let image: Vec<usize> =
                            tuple.iter().map(|&x| proj.apply(x)).collect();
                        proj.cod().has(rel, &image)
                    });
                    assert_eq!(p.has(rel, &tuple), in_all);
                }
            }
        }
    }

    #[test]
    fn empty_coproduct_is_empty() {
        let sig = make_poset_signature();
        let (zero, injs) = coproduct(&sig, &[]).unwrap();
        assert_eq!(zero.size(), 0);
        assert!(injs.is_empty());
    }

    #[test]
    fn coproduct_of_two_chains() {
        let chain = two_chain();
        let (c, injs) = coproduct(chain.sig(), &[chain.clone(), chain.clone()]).unwrap();
        assert_eq!(c.size(), 4);
        // 3 pairs per summand, none across.
        assert_eq!(c.rel(0).len(), 6);
        for inj in &injs {
            assert!(inj.classify().is_embedding());
        }
    }

    #[test]
    fn full_substructure_is_the_original() {
        let m2 = two_points(q(1, 2));
        let all: BTreeSet<usize> = (0..m2.size()).collect();
        let (sub, incl) = substructure(&m2, &all).unwrap();
        assert_eq!(sub, m2);
        assert!(incl.classify().is_embedding());
    }

    #[test]
    fn singleton_substructure_of_metric_keeps_all_loops() {
        // Under Refl' + Up + Top closure, a point is related to itself at
        // every quantity.
        let m2 = two_points(q(1, 2));
        let (sub, _) = substructure(&m2, &BTreeSet::from([0])).unwrap();
        assert_eq!(sub.size(), 1);
        for rel in 0..sub.sig().len() {
            assert!(sub.has(rel, &[0, 0]));
        }
        let lat = QuantityLattice::quarters();
        let ax = gmet_preset(&lat, GmetFlags::metric());
        assert!(crate::horn::in_c(&sub, &ax).unwrap().ok());
    }

    #[test]
    fn empty_substructure() {
        let m2 = two_points(q(1, 2));
        let (sub, _) = substructure(&m2, &BTreeSet::new()).unwrap();
        assert_eq!(sub.size(), 0);
        assert_eq!(sub.tuple_count(), 0);
    }

    #[test]
    fn image_factorize_identity() {
        let m2 = two_points(q(1, 2));
        let id = m2.identity_map();
        let (e, m) = image_factorize(&id).unwrap();
        assert_eq!(e, id);
        assert_eq!(m, id);
    }

    #[test]
    fn image_factorize_constant() {
        let sig = make_poset_signature();
        let dom = Structure::new(
            sig.clone(),
            3,
            vec![vec![vec![0, 0], vec![1, 1], vec![2, 2]]],
        )
        .unwrap();
        let cod = Structure::new(sig, 1, vec![vec![vec![0, 0]]]).unwrap();
        let f = StructureMap::new(dom, cod, vec![0, 0, 0]).unwrap();
        let (e, m) = image_factorize(&f).unwrap();
        assert_eq!(e.cod().size(), 1);
        assert!(e.is_surjective());
        assert!(m.classify().is_embedding());
        assert_eq!(e.compose(&m).unwrap(), f);
    }

    #[test]
    fn image_factorize_rejects_non_preserving() {
        let chain = two_chain();
        let discrete = Structure::discrete(chain.sig().clone(), 2);
        let f = StructureMap::new(chain, discrete, vec![0, 1]).unwrap();
        assert_eq!(image_factorize(&f), Err(Error::NotPreserving));
    }

    #[test]
    fn factorization_composes_back_on_random_maps() {
        // 200 seeded pseudo-random preserving maps: surj . embed == f.
        let lat = QuantityLattice::two();
        let sig = make_gmet_signature(&lat);
        let mut state = 0x9e3779b9u64;
        let mut rng = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let mut checked = 0;
        while checked < 200 {
            let dom_size = (rng() % 3 + 1) as usize;
            let cod_size = (rng() % 3 + 1) as usize;
            let mut dom = Structure::discrete(sig.clone(), dom_size);
            let mut cod = Structure::discrete(sig.clone(), cod_size);
            for rel in 0..2 {
                for a in 0..dom_size {
                    for b in 0..dom_size {
                        if rng() % 2 == 0 {
                            dom.insert_tuple(rel, vec![a, b]).unwrap();
                        }
                    }
                }
                for a in 0..cod_size {
                    for b in 0..cod_size {
                        if rng() % 2 == 0 {
                            cod.insert_tuple(rel, vec![a, b]).unwrap();
                        }
                    }
                }
            }
            let table: Vec<usize> = (0..dom_size).map(|_| (rng() as usize) % cod_size).collect();
            let f = StructureMap::new(dom, cod, table).unwrap();
            if !f.classify().preserves {
                continue;
            }
            let (e, m) = image_factorize(&f).unwrap();
            assert!(e.is_surjective());
            assert!(m.classify().is_embedding());
            assert_eq!(e.compose(&m).unwrap(), f);
            checked += 1;
        }
    }

    #[test]
    fn substructure_enumeration_counts() {
        let m2 = two_points(q(1, 2));
        assert_eq!(enumerate_substructures(&m2, None).len(), 4);
        let sig = make_poset_signature();
        let three = Structure::discrete(sig, 3);
        assert_eq!(enumerate_substructures(&three, Some(1)).len(), 4);
        // Binomial sums: sum_{k<=m} C(n, k).
        for m in 0..=3 {
            let expected: usize = (0..=m).map(|k| binomial(3, k)).sum();
            assert_eq!(enumerate_substructures(&three, Some(m)).len(), expected);
        }
    }

    fn binomial(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn classification_flags_compose() {
        let lat = QuantityLattice::two();
        let sig = make_gmet_signature(&lat);
        let structures = enumerate_structures(&sig, 2, 12).unwrap();
        let mut seen = 0;
        for a in structures.iter().take(12) {
            for b in structures.iter().take(12) {
                for c in structures.iter().take(12) {
                    for ft in all_tables(a.size(), b.size()) {
                        for gt in all_tables(b.size(), c.size()) {
                            let f =
                                StructureMap::new(a.clone(), b.clone(), ft.clone()).unwrap();
                            let g = StructureMap::new(b.clone(), c.clone(), gt).unwrap();
                            let fc = f.classify();
                            let gc = g.classify();
                            let hc = f.compose(&g).unwrap().classify();
                            if fc.preserves && gc.preserves {
                                assert!(hc.preserves);
                            }
                            if fc.reflects && gc.reflects {
                                assert!(hc.reflects);
                            }
                            if fc.injective && gc.injective {
                                assert!(hc.injective);
                            }
                            seen += 1;
                        }
                    }
                }
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn diagonal_fill_in_exists_and_is_unique() {
        // For every commuting square surj-then-embed over a small corpus,
        // the diagonal exists and is found by exhaustive search.
        let sig = make_poset_signature();
        let mut structures: Vec<Structure> = enumerate_structures(&sig, 1, 8).unwrap();
        structures.extend(enumerate_structures(&sig, 2, 8).unwrap().into_iter().take(6));

        let mut surjections = Vec::new();
        let mut embeddings = Vec::new();
        for x in &structures {
            for y in &structures {
                for t in all_tables(x.size(), y.size()) {
                    let f = StructureMap::new(x.clone(), y.clone(), t).unwrap();
                    let c = f.classify();
                    if c.preserves && c.surjective {
                        surjections.push(f.clone());
                    }
                    if c.is_embedding() {
                        embeddings.push(f);
                    }
                }
            }
        }

        let mut squares = 0;
        for e in &surjections {
            for m in &embeddings {
                for ftab in all_tables(e.dom().size(), m.dom().size()) {
                    let f = StructureMap::new(e.dom().clone(), m.dom().clone(), ftab).unwrap();
                    if !f.classify().preserves {
                        continue;
                    }
                    for gtab in all_tables(e.cod().size(), m.cod().size()) {
                        let g =
                            StructureMap::new(e.cod().clone(), m.cod().clone(), gtab).unwrap();
                        if !g.classify().preserves
                            || f.compose(m).unwrap() != e.compose(&g).unwrap()
                        {
                            continue;
                        }
                        let diagonals: Vec<StructureMap> =
                            all_tables(e.cod().size(), m.dom().size())
                                .map(|dt| {
                                    StructureMap::new(e.cod().clone(), m.dom().clone(), dt)
                                        .unwrap()
                                })
                                .filter(|dia| {
                                    dia.classify().preserves
                                        && e.compose(dia).unwrap() == f
                                        && dia.compose(m).unwrap() == g
                                })
                                .collect();
                        assert_eq!(diagonals.len(), 1, "diagonal fill-in must exist uniquely");
                        squares += 1;
                    }
                }
            }
        }
        assert!(squares > 0);
    }
}
