//! Depth-bounded free algebras over a structure: term enumeration, the
//! chain-induced relations on each depth slice, and the unique extension of
//! carrier maps to term evaluation.
//!
//! Free algebras are materialized only as depth-bounded slices; an
//! application that would exceed the requested depth is simply not
//! represented (callers needing one more layer request depth + 1).

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

use crate::algebras::Algebra;
use crate::liftings::apply_lifting;
use crate::signatures::{AlgebraicSignature, LiftedSignature, RelationalSignature};
use crate::structures::{decode_power, Structure, StructureMap};
use crate::{Error, Result};

/// A term over variables `Var(i)` (indices into the base carrier) and
/// operation applications.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    App(usize, Vec<Term>),
}

impl Term {
    /// Variables have depth 0; an application is one deeper than its
    /// deepest argument (constants have depth 1).
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Canonical order: by depth, then by head, then recursively by
    /// arguments. Under this order the depth-(d-1) terms form a prefix of
    /// the depth-d terms.
    pub fn canonical_cmp(&self, other: &Term) -> Ordering {
        self.depth()
            .cmp(&other.depth())
            .then_with(|| match (self, other) {
                (Term::Var(a), Term::Var(b)) => a.cmp(b),
                (Term::App(f, xs), Term::App(g, ys)) => f.cmp(g).then_with(|| {
                    for (x, y) in xs.iter().zip(ys) {
                        let c = x.canonical_cmp(y);
                        if c != Ordering::Equal {
                            return c;
                        }
                    }
                    Ordering::Equal
                }),
                // Distinct kinds never share a depth.
                (Term::Var(_), Term::App(_, _)) => Ordering::Less,
                (Term::App(_, _), Term::Var(_)) => Ordering::Greater,
            })
    }

    /// Renders the term with the given variable names and signature.
    pub fn render(&self, vars: &[String], asig: &AlgebraicSignature) -> String {
        match self {
            Term::Var(v) => vars[*v].clone(),
            Term::App(op, args) => {
                let inner: Vec<String> = args.iter().map(|t| t.render(vars, asig)).collect();
                format!("{}({})", asig.name(*op), inner.join(", "))
            }
        }
    }

    fn check(&self, asig: &AlgebraicSignature, n_vars: usize) -> Result<()> {
        match self {
            Term::Var(v) => {
                if *v >= n_vars {
                    Err(Error::IndexOutOfRange {
                        index: *v,
                        size: n_vars,
                    })
                } else {
                    Ok(())
                }
            }
            Term::App(op, args) => {
                if *op >= asig.len() {
                    return Err(Error::UnknownSymbol(format!("operation #{op}")));
                }
                if args.len() != asig.arity(*op) {
                    return Err(Error::ArityMismatch {
                        symbol: asig.name(*op).to_string(),
                        expected: asig.arity(*op),
                        got: args.len(),
                    });
                }
                args.iter().try_for_each(|t| t.check(asig, n_vars))
            }
        }
    }
}

/// All terms of depth at most `depth` over `x_size` variables, in canonical
/// order. The count obeys `t_0 = x_size`, `t_{k+1} = x_size + sum_op
/// t_k^(arity)`.
pub fn enumerate_terms(asig: &AlgebraicSignature, x_size: usize, depth: usize) -> Vec<Term> {
    let mut level: Vec<Term> = (0..x_size).map(Term::Var).collect();
    for _ in 0..depth {
        let mut next: Vec<Term> = (0..x_size).map(Term::Var).collect();
        for op in 0..asig.len() {
            let arity = asig.arity(op);
            let mut counters = vec![0usize; arity];
            if level.is_empty() && arity > 0 {
                continue;
            }
            loop {
                let args: Vec<Term> = counters.iter().map(|&i| level[i].clone()).collect();
                next.push(Term::App(op, args));
                // Odometer over argument indices.
                let mut pos = arity;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    counters[pos] += 1;
                    if counters[pos] < level.len() {
                        break;
                    }
                    counters[pos] = 0;
                    if pos == 0 {
                        pos = usize::MAX;
                        break;
                    }
                }
                if arity == 0 || pos == usize::MAX {
                    break;
                }
            }
        }
        level = next;
    }
    level.sort_by(Term::canonical_cmp);
    level
}

/// A depth slice of the free algebra over a base structure: all terms of
/// depth `<= depth` with the relations of the corresponding stage of the
/// free-algebra chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeAlgebraSlice {
    base: Structure,
    lsig: LiftedSignature,
    depth: usize,
    terms: Vec<Term>,
    index: HashMap<Term, usize>,
    structure: Structure,
}

impl FreeAlgebraSlice {
    pub fn base(&self) -> &Structure {
        &self.base
    }

    pub fn lifted_sig(&self) -> &LiftedSignature {
        &self.lsig
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, t: &Term) -> Option<usize> {
        self.index.get(t).copied()
    }

    /// The slice as a structure on term indices.
    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn sig(&self) -> &Arc<RelationalSignature> {
        self.base.sig()
    }
}

/// Builds the depth-`d` slice of the free algebra on `x`. A tuple of terms
/// is related iff all are variables related in the base, or all are
/// applications of one symbol whose argument matrices are related in the
/// lifting applied to the previous slice.
pub fn build_free_slice(
    x: &Structure,
    lsig: &LiftedSignature,
    depth: usize,
) -> Result<FreeAlgebraSlice> {
    let mut terms: Vec<Term> = (0..x.size()).map(Term::Var).collect();
    let mut structure = x.clone();
    for _ in 0..depth {
        let prev_terms = terms;
        let prev_structure = structure;
        let mut next_terms: Vec<Term> = (0..x.size()).map(Term::Var).collect();
        for op in 0..lsig.len() {
            let arity = lsig.base().arity(op);
            if prev_terms.is_empty() && arity > 0 {
                continue;
            }
            let count = crate::structures::power_len(prev_terms.len().max(1), arity)?;
            for enc in 0..count {
                let picks = decode_power(prev_terms.len().max(1), arity, enc);
                let args: Vec<Term> = picks.iter().map(|&i| prev_terms[i].clone()).collect();
                next_terms.push(Term::App(op, args));
            }
        }
        next_terms.sort_by(Term::canonical_cmp);
        let next_index: HashMap<Term, usize> = next_terms
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, t)| (t, i))
            .collect();

        let mut next_structure = Structure::discrete(x.sig().clone(), next_terms.len());
        // Variable component: the base relations, at the variable indices
        // (variables sit at positions 0..x.size()).
        for rel in 0..x.sig().len() {
            for tuple in x.rel(rel) {
                next_structure.insert_tuple(rel, tuple.clone())?;
            }
        }
        // One component per operation symbol: relations from the lifting of
        // the previous stage.
        for op in 0..lsig.len() {
            let arity = lsig.base().arity(op);
            let lifted = apply_lifting(lsig.lifting_of(op), &prev_structure, arity)?;
            for rel in 0..x.sig().len() {
                for tuple in lifted.rel(rel) {
                    let term_tuple: Vec<usize> = tuple
                        .iter()
                        .map(|&u| {
                            let picks = decode_power(prev_terms.len().max(1), arity, u);
                            let args: Vec<Term> =
                                picks.iter().map(|&i| prev_terms[i].clone()).collect();
                            next_index[&Term::App(op, args)]
                        })
                        .collect();
                    next_structure.insert_tuple(rel, term_tuple)?;
                }
            }
        }
        terms = next_terms;
        structure = next_structure;
    }
    let index = terms
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, t)| (t, i))
        .collect();
    Ok(FreeAlgebraSlice {
        base: x.clone(),
        lsig: lsig.clone(),
        depth,
        terms,
        index,
        structure,
    })
}

/// The map sending a base element to its variable term; an embedding into
/// every slice.
pub fn canonical_injection(slice: &FreeAlgebraSlice) -> StructureMap {
    StructureMap::new(
        slice.base.clone(),
        slice.structure.clone(),
        (0..slice.base.size()).collect(),
    )
    .expect("variables form a prefix of the slice")
}

/// Evaluates a term in an algebra under the variable assignment `h`
/// (element of the algebra carrier per variable index).
pub fn extend(h: &[usize], a: &Algebra, t: &Term) -> Result<usize> {
    t.check(a.lifted_sig().base(), h.len())?;
    if let Some(&bad) = h.iter().find(|v| **v >= a.size()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            size: a.size(),
        });
    }
    Ok(eval(h, a, t))
}

fn eval(h: &[usize], a: &Algebra, t: &Term) -> usize {
    match t {
        Term::Var(v) => h[*v],
        Term::App(op, args) => {
            let vals: Vec<usize> = args.iter().map(|arg| eval(h, a, arg)).collect();
            a.apply_op(*op, &vals)
        }
    }
}

/// Checks that the evaluation map `h#` restricted to the slice is a
/// relation-preserving map into the algebra carrier (the structure half of
/// the free-algebra universal property).
pub fn extend_is_morphism(h: &[usize], a: &Algebra, slice: &FreeAlgebraSlice) -> Result<bool> {
    if slice.sig() != a.rel_sig() {
        return Err(Error::SignatureMismatch(
            "slice and algebra are over different relational signatures".into(),
        ));
    }
    if slice.lifted_sig() != a.lifted_sig() {
        return Err(Error::SignatureMismatch(
            "slice and algebra are over different lifted signatures".into(),
        ));
    }
    let values: Vec<usize> = slice
        .terms
        .iter()
        .map(|t| extend(h, a, t))
        .collect::<Result<Vec<usize>>>()?;
    for rel in 0..slice.sig().len() {
        for tuple in slice.structure.rel(rel) {
            let image: Vec<usize> = tuple.iter().map(|&i| values[i]).collect();
            if !a.carrier().has(rel, &image) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::horn::metric_to_structure;
    use crate::liftings::LiftingSpec;
    use crate::signatures::{make_poset_signature, Quantity, QuantityLattice};

    fn q(n: i64, d: i64) -> Quantity {
        Quantity::new(n, d)
    }

    fn dot_sig() -> LiftedSignature {
        LiftedSignature::uniform(
            AlgebraicSignature::new([("dot", 2)]).unwrap(),
            LiftingSpec::Product,
        )
        .unwrap()
    }

    fn two_points(dist: Quantity) -> Structure {
        let lat = QuantityLattice::quarters();
        metric_to_structure(&lat, &[vec![q(0, 1), dist], vec![dist, q(0, 1)]].to_vec()).unwrap()
    }

    fn recurrence(asig: &AlgebraicSignature, x: usize, d: usize) -> usize {
        let mut t = x;
        for _ in 0..d {
            t = x + asig
                .symbols()
                .map(|(_, ar)| t.pow(ar as u32))
                .sum::<usize>();
        }
        t
    }

    #[test]
    fn depth_zero_slice_is_the_base() {
        let x = two_points(q(1, 2));
        let slice = build_free_slice(&x, &dot_sig(), 0).unwrap();
        assert_eq!(slice.structure(), &x);
        assert!(slice.terms().iter().all(|t| matches!(t, Term::Var(_))));
        assert_eq!(canonical_injection(&slice).table(), &[0, 1]);
    }

    #[test]
    fn term_counts_follow_the_recurrence() {
        let sigs = [
            AlgebraicSignature::new([("dot", 2)]).unwrap(),
            AlgebraicSignature::new([("dot", 2), ("u", 1)]).unwrap(),
            AlgebraicSignature::new([("c", 0), ("dot", 2)]).unwrap(),
        ];
        for asig in &sigs {
            for x in 0..=2 {
                for d in 0..=3 {
                    let terms = enumerate_terms(asig, x, d);
                    assert_eq!(terms.len(), recurrence(asig, x, d));
                    // Canonical order is strictly increasing.
                    for w in terms.windows(2) {
                        assert_eq!(w[0].canonical_cmp(&w[1]), std::cmp::Ordering::Less);
                    }
                }
            }
        }
        // The spec case: one binary symbol, two variables, depth 2.
        let asig = AlgebraicSignature::new([("dot", 2)]).unwrap();
        assert_eq!(enumerate_terms(&asig, 2, 2).len(), 38);
    }

    #[test]
    fn slice_relations_come_from_the_lifting() {
        // X = {x, y} at distance 1/2, product lifting, depth 1:
        // dot(x,x) =:1/2 dot(y,y) holds, =:1/4 does not.
        let x = two_points(q(1, 2));
        let slice = build_free_slice(&x, &dot_sig(), 1).unwrap();
        assert_eq!(slice.len(), 6);
        let xx = slice
            .index_of(&Term::App(0, vec![Term::Var(0), Term::Var(0)]))
            .unwrap();
        let yy = slice
            .index_of(&Term::App(0, vec![Term::Var(1), Term::Var(1)]))
            .unwrap();
        let sig = slice.sig().clone();
        assert!(slice.structure().has(sig.index_of("=:1/2").unwrap(), &[xx, yy]));
        assert!(!slice.structure().has(sig.index_of("=:1/4").unwrap(), &[xx, yy]));
        // Variables and applications live in different coproduct
        // components: never related, not even at =:1.
        assert!(!slice.structure().has(sig.index_of("=:1").unwrap(), &[0, xx]));
    }

    #[test]
    fn canonical_injection_is_an_embedding() {
        let bases: Vec<Structure> = vec![
            two_points(q(1, 2)),
            two_points(q(0, 1)),
            Structure::discrete(two_points(q(1, 2)).sig().clone(), 2),
        ];
        for x in bases {
            for d in 0..=2 {
                let slice = build_free_slice(&x, &dot_sig(), d).unwrap();
                assert!(canonical_injection(&slice).classify().is_embedding());
            }
        }
    }

    #[test]
    fn slices_form_a_chain_of_embeddings() {
        let x = two_points(q(1, 2));
        let lsig = dot_sig();
        let mut prev = build_free_slice(&x, &lsig, 0).unwrap();
        for d in 1..=2 {
            let next = build_free_slice(&x, &lsig, d).unwrap();
            // Previous terms are a prefix of the next slice.
            assert_eq!(&next.terms()[..prev.len()], prev.terms());
            let inclusion = StructureMap::new(
                prev.structure().clone(),
                next.structure().clone(),
                (0..prev.len()).collect(),
            )
            .unwrap();
            assert!(inclusion.classify().is_embedding());
            prev = next;
        }
    }

    #[test]
    fn extension_evaluates_by_table_lookup() {
        // a = ({0,1}, min), h(x) = 0, h(y) = 1: h#(dot(x, y)) = 0.
        let carrier = Structure::new(
            make_poset_signature(),
            2,
            vec![vec![vec![0, 0], vec![1, 1], vec![0, 1]]],
        )
        .unwrap();
        let a = Algebra::new(carrier, dot_sig(), vec![vec![0, 0, 0, 1]]).unwrap();
        let h = vec![0usize, 1];
        assert_eq!(extend(&h, &a, &Term::Var(1)).unwrap(), 1);
        let t = Term::App(0, vec![Term::Var(0), Term::Var(1)]);
        assert_eq!(extend(&h, &a, &t).unwrap(), 0);
    }

    #[test]
    fn extension_is_a_homomorphism_on_random_terms() {
        let carrier = Structure::new(
            make_poset_signature(),
            2,
            vec![vec![vec![0, 0], vec![1, 1], vec![0, 1]]],
        )
        .unwrap();
        let asig = AlgebraicSignature::new([("c", 0), ("dot", 2)]).unwrap();
        let lsig = LiftedSignature::uniform(asig.clone(), LiftingSpec::Product).unwrap();
        let a = Algebra::new(carrier, lsig, vec![vec![1], vec![0, 0, 0, 1]]).unwrap();
        let h = vec![1usize, 0];
        let terms = enumerate_terms(&asig, 2, 3);
        let mut state = 0x1234_5678u64;
        let mut rng = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state as usize
        };
        for _ in 0..100 {
            let t = &terms[rng() % terms.len()];
            if let Term::App(op, args) = t {
                let by_parts: Vec<usize> = args
                    .iter()
                    .map(|arg| extend(&h, &a, arg).unwrap())
                    .collect();
                assert_eq!(
                    extend(&h, &a, t).unwrap(),
                    a.apply_op(*op, &by_parts),
                    "h# must commute with operations"
                );
            }
        }
    }

    #[test]
    fn preserving_maps_extend_to_morphisms() {
        let x = two_points(q(1, 2));
        let lat = QuantityLattice::quarters();
        let carrier = metric_to_structure(
            &lat,
            &[vec![q(0, 1), q(1, 4)], vec![q(1, 4), q(0, 1)]].to_vec(),
        )
        .unwrap();
        let a = Algebra::new(carrier, dot_sig(), vec![vec![0, 0, 0, 1]]).unwrap();
        // h = identity table: nonexpansive from d = 1/2 to d = 1/4.
        let h = vec![0usize, 1];
        for d in 0..=2 {
            let slice = build_free_slice(&x, &dot_sig(), d).unwrap();
            assert!(extend_is_morphism(&h, &a, &slice).unwrap());
        }
    }

    #[test]
    fn non_preserving_maps_still_evaluate_but_fail_the_morphism_check() {
        // Map the 2-chain backwards onto itself: order is not preserved.
        let chain = Structure::new(
            make_poset_signature(),
            2,
            vec![vec![vec![0, 0], vec![1, 1], vec![0, 1]]],
        )
        .unwrap();
        let a = Algebra::new(chain.clone(), dot_sig(), vec![vec![0, 0, 0, 1]]).unwrap();
        let h = vec![1usize, 0];
        let slice0 = build_free_slice(&chain, &dot_sig(), 0).unwrap();
        // Depth 0 reduces to the plain preservation check.
        let as_map = StructureMap::new(chain.clone(), chain.clone(), h.clone()).unwrap();
        assert!(!as_map.classify().preserves);
        assert!(!extend_is_morphism(&h, &a, &slice0).unwrap());
        // Evaluation itself still works.
        let t = Term::App(0, vec![Term::Var(0), Term::Var(1)]);
        assert_eq!(extend(&h, &a, &t).unwrap(), 0);
    }

    #[test]
    fn morphisms_agreeing_on_variables_equal_the_extension() {
        // Tiny slice where all maps can be enumerated: |X| = 1, one unary
        // symbol, depth 2 -> 3 terms.
        let sig = make_poset_signature();
        let x = Structure::new(sig.clone(), 1, vec![vec![vec![0, 0]]]).unwrap();
        let lsig = LiftedSignature::uniform(
            AlgebraicSignature::new([("u", 1)]).unwrap(),
            LiftingSpec::Product,
        )
        .unwrap();
        let slice = build_free_slice(&x, &lsig, 2).unwrap();
        assert_eq!(slice.len(), 3);
        let chain = Structure::new(
            sig,
            2,
            vec![vec![vec![0, 0], vec![1, 1], vec![0, 1]]],
        )
        .unwrap();
        let a = Algebra::new(chain, lsig, vec![vec![1, 1]]).unwrap();
        let h = vec![0usize];
        let expected: Vec<usize> = slice
            .terms()
            .iter()
            .map(|t| extend(&h, &a, t).unwrap())
            .collect();
        // Enumerate all maps slice -> a that agree with h on variables and
        // commute with u on slice terms; they must all equal h#.
        let mut matches = 0;
        for table in crate::structures::all_tables(slice.len(), a.size()) {
            if table[0] != h[0] {
                continue;
            }
            let compatible = slice.terms().iter().enumerate().all(|(i, t)| match t {
                Term::App(op, args) => {
                    let arg_idx: Vec<usize> = args
                        .iter()
                        .map(|arg| slice.index_of(arg).unwrap())
                        .collect();
                    let arg_vals: Vec<usize> = arg_idx.iter().map(|&j| table[j]).collect();
                    table[i] == a.apply_op(*op, &arg_vals)
                }
                Term::Var(_) => true,
            });
            if compatible {
                assert_eq!(table, expected);
                matches += 1;
            }
        }
        assert_eq!(matches, 1, "h# is the unique compatible extension");
    }
}
