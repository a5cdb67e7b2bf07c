//! Quotients of algebras, c-reflexivity, the projectivity characterization
//! of the quotient class, compatible pairs, and the exactness
//! correspondence between C-quotients and compatible pairs.
//!
//! Enumerations are bounded: exceeding the configured carrier or
//! relation-family bounds is an explicit error, never silent truncation.

use std::collections::BTreeSet;

use crate::algebras::{
    check_algebra_morphism, factor_through, validate_algebra, Algebra, AlgebraMap, FactorOutcome,
};
use crate::equations::ClusterBound;
use crate::horn::{in_c, in_c_quick, AxiomSet, Conclusion};
use crate::liftings::apply_lifting;
use crate::structures::{
    all_tables, decode_power, enumerate_structures, enumerate_substructures, power_len, Structure,
    StructureMap,
};
use crate::{Error, Result};

/// Bounds for the combinatorial enumerations in this module.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumLimits {
    /// Largest carrier whose quotients/pairs may be enumerated.
    pub max_carrier: usize,
    /// Largest relational signature admitted by the enumerations.
    pub max_symbols: usize,
    /// Cap on the number of free bits of a relation-family enumeration.
    pub max_family_bits: usize,
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits {
            max_carrier: 4,
            max_symbols: 6,
            max_family_bits: 24,
        }
    }
}

/// A surjective algebra morphism onto a codomain algebra, stored as the
/// table of class images. Canonical form numbers codomain elements by
/// least source representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quotient {
    src: Algebra,
    table: Vec<usize>,
    cod: Algebra,
}

impl Quotient {
    pub fn new(src: Algebra, table: Vec<usize>, cod: Algebra) -> Result<Self> {
        let map = AlgebraMap::new(src.clone(), cod.clone(), table.clone())?;
        if !map.is_surjective() {
            return Err(Error::NotSurjective);
        }
        let check = check_algebra_morphism(&map)?;
        if !check.holds {
            return Err(Error::NotAMorphism(format!("{:?}", check.witness)));
        }
        Ok(Quotient { src, table, cod })
    }

    pub fn src(&self) -> &Algebra {
        &self.src
    }

    pub fn cod(&self) -> &Algebra {
        &self.cod
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn as_map(&self) -> AlgebraMap {
        AlgebraMap::new(self.src.clone(), self.cod.clone(), self.table.clone())
            .expect("quotient data is a valid map")
    }

    /// Relabels the codomain so that classes are numbered by their least
    /// representative in the source.
    pub fn canonicalize(&self) -> Result<Quotient> {
        let mut perm = vec![usize::MAX; self.cod.size()];
        let mut next = 0;
        for &v in &self.table {
            if perm[v] == usize::MAX {
                perm[v] = next;
                next += 1;
            }
        }
        let cod = crate::algebras::relabel_algebra(&self.cod, &perm)?;
        let table = self.table.iter().map(|&v| perm[v]).collect();
        Ok(Quotient {
            src: self.src.clone(),
            table,
            cod,
        })
    }

    /// The identity quotient on an algebra.
    pub fn identity(a: &Algebra) -> Quotient {
        Quotient {
            src: a.clone(),
            table: (0..a.size()).collect(),
            cod: a.clone(),
        }
    }
}

/// Result of the c-reflexivity test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CReflexivity {
    pub holds: bool,
    /// The first codomain substructure that fails to lift, if any.
    pub witness: Option<BTreeSet<usize>>,
}

/// A quotient is c-reflexive when every substructure of the codomain with
/// fewer than c elements lifts along the quotient to an isomorphic
/// substructure of the source.
pub fn is_c_reflexive(q: &Quotient, c: ClusterBound) -> Result<CReflexivity> {
    let cod = q.cod.carrier();
    let src = q.src.carrier();
    for mask in 0u64..(1u64 << cod.size()) {
        let subset: Vec<usize> = (0..cod.size()).filter(|i| mask >> i & 1 == 1).collect();
        if !c.admits(subset.len()) {
            continue;
        }
        if !lifts_isomorphically(src, cod, &q.table, &subset) {
            return Ok(CReflexivity {
                holds: false,
                witness: Some(subset.into_iter().collect()),
            });
        }
    }
    Ok(CReflexivity {
        holds: true,
        witness: None,
    })
}

/// Searches for a section of the quotient over `subset` whose image is an
/// isomorphic copy: one source element per fiber such that every codomain
/// tuple inside the subset reflects to a related source tuple.
/// (Preservation, injectivity and surjectivity are automatic for fiber
/// sections.)
fn lifts_isomorphically(
    src: &Structure,
    cod: &Structure,
    table: &[usize],
    subset: &[usize],
) -> bool {
    if subset.is_empty() {
        return true;
    }
    let fibers: Vec<Vec<usize>> = subset
        .iter()
        .map(|&b| (0..src.size()).filter(|&a| table[a] == b).collect())
        .collect();
    if fibers.iter().any(|f| f.is_empty()) {
        return false;
    }
    let pos_of = |b: usize| subset.iter().position(|&x| x == b);
    // Codomain tuples entirely inside the subset, per relation symbol.
    let mut inner: Vec<Vec<Vec<usize>>> = vec![Vec::new(); cod.sig().len()];
    for rel in 0..cod.sig().len() {
        for tuple in cod.rel(rel) {
            if let Some(positions) = tuple.iter().map(|&b| pos_of(b)).collect::<Option<Vec<_>>>()
            {
                inner[rel].push(positions);
            }
        }
    }
    let mut choice = vec![0usize; subset.len()];
    loop {
        let section: Vec<usize> = choice.iter().zip(&fibers).map(|(&i, f)| f[i]).collect();
        let reflects = inner.iter().enumerate().all(|(rel, tuples)| {
            tuples.iter().all(|positions| {
                let pre: Vec<usize> = positions.iter().map(|&p| section[p]).collect();
                src.has(rel, &pre)
            })
        });
        if reflects {
            return true;
        }
        let mut pos = subset.len();
        loop {
            if pos == 0 {
                return false;
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < fibers[pos].len() {
                break;
            }
            choice[pos] = 0;
        }
    }
}

/// Report of the projectivity characterization check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExReport {
    pub c_reflexive: bool,
    pub projective: bool,
    /// Description of the first test object failing projectivity.
    pub failing_object: Option<String>,
    pub failing_map: Option<Vec<usize>>,
}

impl ExReport {
    /// The lemma's executable content: the two sides must agree.
    pub fn agree(&self) -> bool {
        self.c_reflexive == self.projective
    }
}

/// Verifies, at structure level, that the quotient is c-reflexive iff
/// every structure in C with fewer than c elements (up to `size_bound`,
/// plus all small substructures of the codomain) is projective with
/// respect to it.
pub fn check_ex_characterization(
    q: &Quotient,
    c: usize,
    ax: &AxiomSet,
    size_bound: usize,
) -> Result<ExReport> {
    let reflexive = is_c_reflexive(q, ClusterBound::Finite(c))?.holds;
    let src = q.src.carrier();
    let cod = q.cod.carrier();

    let mut test_objects: Vec<(String, Structure)> = Vec::new();
    for size in 1..c.min(size_bound + 1) {
        for (i, s) in enumerate_structures(src.sig(), size, 20)?
            .into_iter()
            .enumerate()
        {
            if in_c_quick(&s, ax)? {
                test_objects.push((format!("C-structure #{i} of size {size}"), s));
            }
        }
    }
    for (subset, s) in enumerate_substructures(cod, Some(c.saturating_sub(1))) {
        if !subset.is_empty() {
            test_objects.push((format!("codomain substructure {subset:?}"), s));
        }
    }

    for (desc, x) in &test_objects {
        for h in all_tables(x.size(), cod.size()) {
            let hm = StructureMap::new(x.clone(), cod.clone(), h.clone())?;
            if !hm.classify().preserves {
                continue;
            }
            // Lift search restricted to the fibers of h.
            let fibers: Vec<Vec<usize>> = h
                .iter()
                .map(|&b| (0..src.size()).filter(|&a| q.table[a] == b).collect())
                .collect();
            if fibers.iter().any(|f| f.is_empty()) {
                return Ok(ExReport {
                    c_reflexive: reflexive,
                    projective: false,
                    failing_object: Some(desc.clone()),
                    failing_map: Some(h),
                });
            }
            let mut found = false;
            let mut choice = vec![0usize; x.size()];
            'search: loop {
                let g: Vec<usize> = choice.iter().zip(&fibers).map(|(&i, f)| f[i]).collect();
                let gm = StructureMap::new(x.clone(), src.clone(), g)?;
                if gm.classify().preserves {
                    found = true;
                    break 'search;
                }
                let mut pos = x.size();
                loop {
                    if pos == 0 {
                        break 'search;
                    }
                    pos -= 1;
                    choice[pos] += 1;
                    if choice[pos] < fibers[pos].len() {
                        break;
                    }
                    choice[pos] = 0;
                }
            }
            if !found {
                return Ok(ExReport {
                    c_reflexive: reflexive,
                    projective: false,
                    failing_object: Some(desc.clone()),
                    failing_map: Some(h),
                });
            }
        }
    }
    Ok(ExReport {
        c_reflexive: reflexive,
        projective: true,
        failing_object: None,
        failing_map: None,
    })
}

/// All set partitions of `0..n` as restricted-growth strings (class ids in
/// first-occurrence order, which is the least-representative numbering).
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut current = vec![0usize; n];
    fn rec(current: &mut Vec<usize>, pos: usize, max_used: usize, out: &mut Vec<Vec<usize>>) {
        if pos == current.len() {
            out.push(current.clone());
            return;
        }
        for class in 0..=max_used + 1 {
            current[pos] = class;
            rec(current, pos + 1, max_used.max(class), out);
        }
    }
    rec(&mut current, 1, 0, &mut out);
    out
}

/// Does the partition respect every operation table?
fn is_congruence(a: &Algebra, classes: &[usize]) -> bool {
    for op in 0..a.op_count() {
        let arity = a.lifted_sig().base().arity(op);
        let total = power_len(a.size(), arity).expect("bounded carrier");
        let mut bucket: std::collections::HashMap<Vec<usize>, usize> =
            std::collections::HashMap::new();
        for enc in 0..total {
            let args = decode_power(a.size(), arity, enc);
            let class_args: Vec<usize> = args.iter().map(|&x| classes[x]).collect();
            let result = classes[a.op_table(op)[enc]];
            match bucket.entry(class_args) {
                std::collections::hash_map::Entry::Vacant(v) => {
                    v.insert(result);
                }
                std::collections::hash_map::Entry::Occupied(o) => {
                    if *o.get() != result {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// The quotient algebra induced on the congruence classes, with the given
/// class-level relation family.
fn quotient_algebra(a: &Algebra, classes: &[usize], rels: Vec<BTreeSet<Vec<usize>>>) -> Algebra {
    let m = classes.iter().copied().max().map_or(0, |x| x + 1);
    let mut carrier = Structure::discrete(a.rel_sig().clone(), m);
    for (rel, tuples) in rels.into_iter().enumerate() {
        for t in tuples {
            carrier.insert_tuple(rel, t).expect("tuples over classes");
        }
    }
    // Representatives: the least element of each class.
    let mut reps = vec![usize::MAX; m];
    for (x, &cl) in classes.iter().enumerate() {
        if reps[cl] == usize::MAX {
            reps[cl] = x;
        }
    }
    let mut ops = Vec::with_capacity(a.op_count());
    for op in 0..a.op_count() {
        let arity = a.lifted_sig().base().arity(op);
        let total = power_len(m, arity).expect("bounded carrier");
        let mut table = Vec::with_capacity(total);
        for enc in 0..total {
            let class_args = decode_power(m.max(1), arity, enc);
            let rep_args: Vec<usize> = class_args.iter().map(|&cl| reps[cl]).collect();
            table.push(classes[a.apply_op(op, &rep_args)]);
        }
        ops.push(table);
    }
    Algebra::new(carrier, a.lifted_sig().clone(), ops).expect("well-formed quotient algebra")
}

fn check_enum_limits(a: &Algebra, limits: &EnumLimits) -> Result<()> {
    if a.size() > limits.max_carrier {
        return Err(Error::BoundExceeded {
            what: "quotient enumeration carrier".into(),
            limit: limits.max_carrier,
            actual: a.size(),
        });
    }
    if a.rel_sig().len() > limits.max_symbols {
        return Err(Error::BoundExceeded {
            what: "quotient enumeration relation symbols".into(),
            limit: limits.max_symbols,
            actual: a.rel_sig().len(),
        });
    }
    Ok(())
}

/// Enumerates all supersets of `base` within `universe`.
fn family_supersets(
    base: &[BTreeSet<Vec<usize>>],
    universe: &[Vec<Vec<usize>>],
    max_bits: usize,
) -> Result<Vec<Vec<BTreeSet<Vec<usize>>>>> {
    let mut optional: Vec<(usize, Vec<usize>)> = Vec::new();
    for (rel, tuples) in universe.iter().enumerate() {
        for t in tuples {
            if !base[rel].contains(t) {
                optional.push((rel, t.clone()));
            }
        }
    }
    if optional.len() > max_bits {
        return Err(Error::BoundExceeded {
            what: "relation family enumeration bits".into(),
            limit: max_bits,
            actual: optional.len(),
        });
    }
    let mut out = Vec::with_capacity(1usize << optional.len());
    for mask in 0u64..(1u64 << optional.len()) {
        let mut family = base.to_vec();
        for (bit, (rel, t)) in optional.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                family[*rel].insert(t.clone());
            }
        }
        out.push(family);
    }
    Ok(out)
}

/// All C-quotients of the algebra: congruence partitions combined with
/// every relation family on the classes that makes the class map a
/// morphism and the codomain a valid algebra with carrier in C. The
/// output is canonical and sorted along a linear extension of the
/// quotient order (finer kernels first, then smaller relation families).
pub fn enumerate_quotients(
    a: &Algebra,
    ax: &AxiomSet,
    limits: &EnumLimits,
) -> Result<Vec<Quotient>> {
    check_enum_limits(a, limits)?;
    let mut out = Vec::new();
    for classes in set_partitions(a.size()) {
        if !is_congruence(a, &classes) {
            continue;
        }
        let m = classes.iter().copied().max().map_or(0, |x| x + 1);
        // Baseline: the image of the source relations, forced by
        // preservation of the class map.
        let mut base: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); a.rel_sig().len()];
        for rel in 0..a.rel_sig().len() {
            for t in a.carrier().rel(rel) {
                base[rel].insert(t.iter().map(|&x| classes[x]).collect());
            }
        }
        let universe: Vec<Vec<Vec<usize>>> = (0..a.rel_sig().len())
            .map(|rel| {
                let arity = a.rel_sig().arity(rel);
                (0..power_len(m, arity).expect("bounded"))
                    .map(|enc| decode_power(m.max(1), arity, enc))
                    .collect()
            })
            .collect();
        for family in family_supersets(&base, &universe, limits.max_family_bits)? {
            let cod = quotient_algebra(a, &classes, family);
            if !in_c_quick(cod.carrier(), ax)? {
                continue;
            }
            if !validate_algebra(&cod, None)?.valid() {
                continue;
            }
            out.push(Quotient {
                src: a.clone(),
                table: classes.clone(),
                cod,
            });
        }
    }
    out.sort_by(|p, q| {
        q.cod
            .size()
            .cmp(&p.cod.size())
            .then_with(|| p.table.cmp(&q.table))
            .then_with(|| {
                p.cod
                    .carrier()
                    .tuple_count()
                    .cmp(&q.cod.carrier().tuple_count())
            })
            .then_with(|| format!("{:?}", p.cod).cmp(&format!("{:?}", q.cod)))
    });
    Ok(out)
}

/// A refining relation family together with a congruence on an algebra's
/// carrier. Validity is established by [`validate_pair`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatiblePair {
    base: Algebra,
    refined: Vec<BTreeSet<Vec<usize>>>,
    congruence: Vec<usize>,
}

impl CompatiblePair {
    /// Builds a pair, normalizing the congruence to least-representative
    /// class numbering. Tuple shapes are checked here; the semantic
    /// conditions are left to [`validate_pair`].
    pub fn new(
        base: Algebra,
        refined: Vec<BTreeSet<Vec<usize>>>,
        congruence: Vec<usize>,
    ) -> Result<Self> {
        if refined.len() != base.rel_sig().len() {
            return Err(Error::SignatureMismatch(format!(
                "expected {} refined relation sets, got {}",
                base.rel_sig().len(),
                refined.len()
            )));
        }
        for (rel, tuples) in refined.iter().enumerate() {
            for t in tuples {
                if t.len() != base.rel_sig().arity(rel) {
                    return Err(Error::ArityMismatch {
                        symbol: base.rel_sig().name(rel).to_string(),
                        expected: base.rel_sig().arity(rel),
                        got: t.len(),
                    });
                }
                if let Some(&bad) = t.iter().find(|v| **v >= base.size()) {
                    return Err(Error::IndexOutOfRange {
                        index: bad,
                        size: base.size(),
                    });
                }
            }
        }
        if congruence.len() != base.size() {
            return Err(Error::InvalidInput(
                "congruence table length does not match the carrier".into(),
            ));
        }
        // Renumber classes by first occurrence.
        let mut relabel: Vec<Option<usize>> = vec![None; congruence.len()];
        let mut next = 0;
        let mut canonical = Vec::with_capacity(congruence.len());
        for &cl in &congruence {
            if cl >= congruence.len() {
                return Err(Error::IndexOutOfRange {
                    index: cl,
                    size: congruence.len(),
                });
            }
            let id = *relabel[cl].get_or_insert_with(|| {
                let id = next;
                next += 1;
                id
            });
            canonical.push(id);
        }
        Ok(CompatiblePair {
            base,
            refined,
            congruence: canonical,
        })
    }

    pub fn base(&self) -> &Algebra {
        &self.base
    }

    pub fn refined(&self) -> &[BTreeSet<Vec<usize>>] {
        &self.refined
    }

    pub fn congruence(&self) -> &[usize] {
        &self.congruence
    }

    /// The refined relations as a structure on the base carrier.
    pub fn refined_structure(&self) -> Structure {
        let mut s = Structure::discrete(self.base.rel_sig().clone(), self.base.size());
        for (rel, tuples) in self.refined.iter().enumerate() {
            for t in tuples {
                s.insert_tuple(rel, t.clone()).expect("validated tuples");
            }
        }
        s
    }

    pub fn class_count(&self) -> usize {
        self.congruence.iter().copied().max().map_or(0, |x| x + 1)
    }
}

/// The conditions a compatible pair can violate, named after the clauses
/// of the definition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairViolation {
    /// Refining (a): the refined structure leaves the type-1 fragment.
    RefinedOutsideCPrime { clause: String },
    /// Refining (b): a base tuple missing from the refined relation.
    BaseNotContained { rel: usize, tuple: Vec<usize> },
    /// Refining (c): an operation fails to preserve refined relations.
    OpNotPreserving {
        op: usize,
        rel: usize,
        tuple: Vec<usize>,
    },
    /// The partition is not a congruence.
    NotACongruence { op: usize, args: Vec<usize> },
    /// Compatibility (a): the refined relations are not saturated.
    NotSaturated {
        rel: usize,
        tuple: Vec<usize>,
        variant: Vec<usize>,
    },
    /// Compatibility (b): a type-2 axiom read over the refined relations
    /// does not force the congruence.
    Type2Unforced { clause: String, witness: Vec<usize> },
}

/// Report of [`validate_pair`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairReport {
    pub violations: Vec<PairViolation>,
}

impl PairReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks all six defining conditions of a compatible pair.
pub fn validate_pair(p: &CompatiblePair, ax: &AxiomSet) -> Result<PairReport> {
    let mut violations = Vec::new();
    let a = &p.base;
    let refined = p.refined_structure();

    // Refining (b): base relations are contained in the refined ones.
    for rel in 0..a.rel_sig().len() {
        for t in a.carrier().rel(rel) {
            if !p.refined[rel].contains(t) {
                violations.push(PairViolation::BaseNotContained {
                    rel,
                    tuple: t.clone(),
                });
            }
        }
    }
    // Refining (a): the refined structure satisfies the type-1 fragment.
    for (clause, _) in in_c(&refined, &ax.type1_fragment())?.failures {
        violations.push(PairViolation::RefinedOutsideCPrime { clause });
    }
    // Refining (c): operations preserve refined relations from the lifted
    // refined structure.
    for op in 0..a.op_count() {
        let arity = a.lifted_sig().base().arity(op);
        let lifted = apply_lifting(a.lifted_sig().lifting_of(op), &refined, arity)?;
        for rel in 0..a.rel_sig().len() {
            for tuple in lifted.rel(rel) {
                let outputs: Vec<usize> = tuple.iter().map(|&u| a.op_table(op)[u]).collect();
                if !refined.has(rel, &outputs) {
                    violations.push(PairViolation::OpNotPreserving {
                        op,
                        rel,
                        tuple: tuple.clone(),
                    });
                }
            }
        }
    }
    // Congruence.
    for op in 0..a.op_count() {
        let arity = a.lifted_sig().base().arity(op);
        let total = power_len(a.size(), arity)?;
        let mut bucket: std::collections::HashMap<Vec<usize>, usize> =
            std::collections::HashMap::new();
        for enc in 0..total {
            let args = decode_power(a.size(), arity, enc);
            let class_args: Vec<usize> = args.iter().map(|&x| p.congruence[x]).collect();
            let result = p.congruence[a.op_table(op)[enc]];
            match bucket.entry(class_args) {
                std::collections::hash_map::Entry::Vacant(v) => {
                    v.insert(result);
                }
                std::collections::hash_map::Entry::Occupied(o) => {
                    if *o.get() != result {
                        violations.push(PairViolation::NotACongruence { op, args });
                    }
                }
            }
        }
    }
    // Compatibility (a): refined relations are saturated under the
    // congruence.
    for rel in 0..a.rel_sig().len() {
        for tuple in &p.refined[rel] {
            let variants: Vec<Vec<usize>> = tuple.iter().fold(vec![Vec::new()], |acc, &x| {
                let mut next = Vec::new();
                for prefix in acc {
                    for y in 0..a.size() {
                        if p.congruence[y] == p.congruence[x] {
                            let mut v = prefix.clone();
                            v.push(y);
                            next.push(v);
                        }
                    }
                }
                next
            });
            for variant in variants {
                if !p.refined[rel].contains(&variant) {
                    violations.push(PairViolation::NotSaturated {
                        rel,
                        tuple: tuple.clone(),
                        variant,
                    });
                }
            }
        }
    }
    // Compatibility (b): type-2 axioms, read over the refined relations,
    // force the congruence.
    for cl in ax.clauses() {
        let (x1, x2) = match cl.conclusion() {
            Conclusion::Eq(x1, x2) => (*x1, *x2),
            Conclusion::Rel(_) => continue,
        };
        let k = cl.vars().len();
        let total = power_len(a.size(), k)?;
        for enc in 0..total {
            let assign = decode_power(a.size().max(1), k, enc);
            let premises_hold = cl.premises().iter().all(|atom| {
                let tuple: Vec<usize> = atom.args.iter().map(|&v| assign[v]).collect();
                refined.has(atom.rel, &tuple)
            });
            if premises_hold && p.congruence[assign[x1]] != p.congruence[assign[x2]] {
                violations.push(PairViolation::Type2Unforced {
                    clause: cl.label().to_string(),
                    witness: assign,
                });
            }
        }
    }
    Ok(PairReport { violations })
}

/// The compatible pair of a C-quotient: relations pulled back along the
/// quotient map, congruence = kernel.
pub fn pair_from_quotient(q: &Quotient, ax: &AxiomSet) -> Result<CompatiblePair> {
    let membership = in_c(q.cod.carrier(), ax)?;
    if !membership.ok() {
        return Err(Error::InvalidInput(format!(
            "quotient codomain is not in C (first failure: {})",
            membership.failures[0].0
        )));
    }
    let a = &q.src;
    let mut refined: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); a.rel_sig().len()];
    for (rel, slot) in refined.iter_mut().enumerate() {
        let arity = a.rel_sig().arity(rel);
        for enc in 0..power_len(a.size(), arity)? {
            let tuple = decode_power(a.size().max(1), arity, enc);
            let image: Vec<usize> = tuple.iter().map(|&x| q.table[x]).collect();
            if q.cod.carrier().has(rel, &image) {
                slot.insert(tuple);
            }
        }
    }
    CompatiblePair::new(a.clone(), refined, q.table.clone())
}

/// The C-quotient of a compatible pair: codomain carrier = congruence
/// classes, relations transported from the refined family (well-defined by
/// saturation), operations induced by the congruence.
pub fn quotient_from_pair(p: &CompatiblePair, ax: &AxiomSet) -> Result<Quotient> {
    let report = validate_pair(p, ax)?;
    if let Some(v) = report.violations.first() {
        return Err(Error::InvalidPair(format!("{v:?}")));
    }
    let mut rels: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); p.base.rel_sig().len()];
    for (rel, tuples) in p.refined.iter().enumerate() {
        for t in tuples {
            rels[rel].insert(t.iter().map(|&x| p.congruence[x]).collect());
        }
    }
    let cod = quotient_algebra(&p.base, &p.congruence, rels);
    Quotient::new(p.base.clone(), p.congruence.clone(), cod)
}

/// All compatible pairs on the algebra, within the enumeration bounds.
pub fn enumerate_compatible_pairs(
    a: &Algebra,
    ax: &AxiomSet,
    limits: &EnumLimits,
) -> Result<Vec<CompatiblePair>> {
    check_enum_limits(a, limits)?;
    let base: Vec<BTreeSet<Vec<usize>>> = (0..a.rel_sig().len())
        .map(|rel| a.carrier().rel(rel).clone())
        .collect();
    let universe: Vec<Vec<Vec<usize>>> = (0..a.rel_sig().len())
        .map(|rel| {
            let arity = a.rel_sig().arity(rel);
            (0..power_len(a.size(), arity).expect("bounded"))
                .map(|enc| decode_power(a.size().max(1), arity, enc))
                .collect()
        })
        .collect();
    let families = family_supersets(&base, &universe, limits.max_family_bits)?;
    let mut out = Vec::new();
    for classes in set_partitions(a.size()) {
        if !is_congruence(a, &classes) {
            continue;
        }
        for family in &families {
            let p = CompatiblePair::new(a.clone(), family.clone(), classes.clone())?;
            if validate_pair(&p, ax)?.ok() {
                out.push(p);
            }
        }
    }
    out.sort_by(|p, q| {
        q.class_count()
            .cmp(&p.class_count())
            .then_with(|| p.congruence.cmp(&q.congruence))
            .then_with(|| {
                let pc: usize = p.refined.iter().map(|r| r.len()).sum();
                let qc: usize = q.refined.iter().map(|r| r.len()).sum();
                pc.cmp(&qc)
            })
            .then_with(|| p.refined.cmp(&q.refined))
    });
    Ok(out)
}

/// The quotient order: `q <= q2` iff `q2` factors through `q` by an
/// algebra morphism (decided by the homomorphism theorem).
pub fn quotient_le(q: &Quotient, q2: &Quotient) -> Result<bool> {
    if q.src != q2.src {
        return Err(Error::InvalidInput(
            "quotient order compares quotients of one algebra".into(),
        ));
    }
    Ok(matches!(
        factor_through(&q.as_map(), &q2.as_map())?,
        FactorOutcome::Factors(_)
    ))
}

/// The componentwise order on compatible pairs: refined families by
/// inclusion, congruences by refinement.
pub fn pair_le(p: &CompatiblePair, p2: &CompatiblePair) -> bool {
    let rel_le = p
        .refined
        .iter()
        .zip(&p2.refined)
        .all(|(r, r2)| r.is_subset(r2));
    let cong_le = (0..p.congruence.len()).all(|x| {
        (0..p.congruence.len()).all(|y| {
            p.congruence[x] != p.congruence[y] || p2.congruence[x] == p2.congruence[y]
        })
    });
    rel_le && cong_le
}
