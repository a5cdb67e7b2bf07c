//! Relational signatures, finite quantity lattices, algebraic signatures and
//! lifted algebraic signatures.
//!
//! All values here are immutable after construction and cheap to share; the
//! rest of the crate is parameterised by them.

use std::str::FromStr;
use std::sync::Arc;

use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::liftings::LiftingSpec;
use crate::{Error, Result};

/// Quantities are rationals in `[0, 1]`.
pub type Quantity = Rational64;

/// A relational signature: an ordered list of relation symbols, each with a
/// positive arity. The declaration order is fixed at construction and used
/// as the canonical index for serialization and hashing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelationalSignature {
    symbols: Vec<(String, usize)>,
}

impl RelationalSignature {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let symbols: Vec<(String, usize)> =
            symbols.into_iter().map(|(n, a)| (n.into(), a)).collect();
        for (i, (name, arity)) in symbols.iter().enumerate() {
            if *arity == 0 {
                return Err(Error::ZeroRelationalArity(name.clone()));
            }
            if symbols[..i].iter().any(|(m, _)| m == name) {
                return Err(Error::DuplicateSymbol(name.clone()));
            }
        }
        Ok(RelationalSignature { symbols })
    }

    /// The empty signature (plain sets).
    pub fn empty() -> Arc<Self> {
        Arc::new(RelationalSignature { symbols: Vec::new() })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&str, usize)> {
        self.symbols.iter().map(|(n, a)| (n.as_str(), *a))
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.symbols[idx].0
    }

    pub fn arity(&self, idx: usize) -> usize {
        self.symbols[idx].1
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|(n, _)| n == name)
    }

    pub fn resolve(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }
}

/// A finite ascending chain of rationals in `[0, 1]` containing `0` and `1`,
/// together with tables for the truncated addition `min(1, q + q')` (rounded
/// up to the next chain element) and the chain join.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuantityLattice {
    elements: Vec<Quantity>,
    add: Vec<Vec<usize>>,
    join: Vec<Vec<usize>>,
}

impl QuantityLattice {
    pub fn new<I: IntoIterator<Item = Quantity>>(elements: I) -> Result<Self> {
        let mut elements: Vec<Quantity> = elements.into_iter().collect();
        elements.sort();
        elements.dedup();
        if elements.first() != Some(&Quantity::zero()) {
            return Err(Error::InvalidLattice("0 must be the bottom element".into()));
        }
        if elements.last() != Some(&Quantity::one()) {
            return Err(Error::InvalidLattice("1 must be the top element".into()));
        }
        let n = elements.len();
        let round_up = |q: Quantity| -> usize {
            elements
                .iter()
                .position(|e| *e >= q)
                .expect("chain is capped by 1")
        };
        let mut add = vec![vec![0; n]; n];
        let mut join = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let sum = elements[i] + elements[j];
                add[i][j] = round_up(if sum > Quantity::one() { Quantity::one() } else { sum });
                join[i][j] = i.max(j);
            }
        }
        Ok(QuantityLattice { elements, add, join })
    }

    /// The two-element lattice `{0, 1}`.
    pub fn two() -> Self {
        QuantityLattice::new([Quantity::zero(), Quantity::one()]).expect("valid chain")
    }

    /// The five-element lattice `{0, 1/4, 1/2, 3/4, 1}`.
    pub fn quarters() -> Self {
        QuantityLattice::new((0..=4).map(|k| Quantity::new(k, 4))).expect("valid chain")
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn elements(&self) -> &[Quantity] {
        &self.elements
    }

    pub fn element(&self, idx: usize) -> Quantity {
        self.elements[idx]
    }

    pub fn index_of(&self, q: Quantity) -> Option<usize> {
        self.elements.iter().position(|e| *e == q)
    }

    /// Index of the smallest chain element `>= q`, or `None` if `q > 1`.
    pub fn round_up(&self, q: Quantity) -> Option<usize> {
        self.elements.iter().position(|e| *e >= q)
    }

    pub fn add_idx(&self, i: usize, j: usize) -> usize {
        self.add[i][j]
    }

    pub fn add(&self, a: Quantity, b: Quantity) -> Quantity {
        let i = self.index_of(a).expect("element of the chain");
        let j = self.index_of(b).expect("element of the chain");
        self.elements[self.add[i][j]]
    }

    pub fn join_idx(&self, i: usize, j: usize) -> usize {
        self.join[i][j]
    }

    pub fn join(&self, a: Quantity, b: Quantity) -> Quantity {
        if a >= b {
            a
        } else {
            b
        }
    }

    pub fn bottom(&self) -> Quantity {
        self.elements[0]
    }

    pub fn top(&self) -> Quantity {
        *self.elements.last().expect("nonempty chain")
    }
}

/// An algebraic signature: operation symbols with finite arities. Arity 0
/// (constants) is allowed here, unlike for relation symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct AlgebraicSignature {
    symbols: Vec<(String, usize)>,
}

impl AlgebraicSignature {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let symbols: Vec<(String, usize)> =
            symbols.into_iter().map(|(n, a)| (n.into(), a)).collect();
        for (i, (name, _)) in symbols.iter().enumerate() {
            if symbols[..i].iter().any(|(m, _)| m == name) {
                return Err(Error::DuplicateSymbol(name.clone()));
            }
        }
        Ok(AlgebraicSignature { symbols })
    }

    pub fn empty() -> Self {
        AlgebraicSignature { symbols: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&str, usize)> {
        self.symbols.iter().map(|(n, a)| (n.as_str(), *a))
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.symbols[idx].0
    }

    pub fn arity(&self, idx: usize) -> usize {
        self.symbols[idx].1
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|(n, _)| n == name)
    }

    pub fn resolve(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }
}

/// An algebraic signature in which every operation symbol carries the
/// lifting that governs how the operation must respect relations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LiftedSignature {
    base: AlgebraicSignature,
    liftings: Vec<LiftingSpec>,
}

impl LiftedSignature {
    /// Pairs each operation symbol of `base` (in order) with a lifting.
    pub fn new(base: AlgebraicSignature, liftings: Vec<LiftingSpec>) -> Result<Self> {
        if base.len() != liftings.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} lifting specs, got {}",
                base.len(),
                liftings.len()
            )));
        }
        for (idx, spec) in liftings.iter().enumerate() {
            spec.check_arity(base.arity(idx)).map_err(|reason| {
                Error::InapplicableLifting {
                    lifting: spec.describe(),
                    reason: format!("operation `{}`: {reason}", base.name(idx)),
                }
            })?;
        }
        Ok(LiftedSignature { base, liftings })
    }

    /// Every operation symbol gets the same lifting.
    pub fn uniform(base: AlgebraicSignature, spec: LiftingSpec) -> Result<Self> {
        let liftings = vec![spec; base.len()];
        LiftedSignature::new(base, liftings)
    }

    pub fn empty() -> Self {
        LiftedSignature {
            base: AlgebraicSignature::empty(),
            liftings: Vec::new(),
        }
    }

    pub fn base(&self) -> &AlgebraicSignature {
        &self.base
    }

    pub fn lifting_of(&self, op_idx: usize) -> &LiftingSpec {
        &self.liftings[op_idx]
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }
}

/// Canonical name of the relation symbol for quantity `q`: `=:q`.
pub fn gmet_symbol_name(q: Quantity) -> String {
    format!("=:{q}")
}

/// The relational signature of generalized metric spaces over a finite
/// quantity lattice: one binary symbol `=:q` per lattice element, in
/// ascending order, so that symbol index `i` corresponds to the `i`-th
/// lattice element.
pub fn make_gmet_signature(q: &QuantityLattice) -> Arc<RelationalSignature> {
    let sig = RelationalSignature::new(q.elements().iter().map(|e| (gmet_symbol_name(*e), 2)))
        .expect("lattice elements are distinct");
    Arc::new(sig)
}

/// The relational signature of posets: a single binary symbol `leq`.
pub fn make_poset_signature() -> Arc<RelationalSignature> {
    Arc::new(RelationalSignature::new([("leq", 2)]).expect("valid"))
}

/// The relational signature encoding partial algebras over `p`: one symbol
/// `alpha_f` of arity `ar(f) + 1` per operation symbol `f`.
pub fn make_partial_algebra_signature(p: &AlgebraicSignature) -> Arc<RelationalSignature> {
    let sig = RelationalSignature::new(
        p.symbols().map(|(name, arity)| (format!("alpha_{name}"), arity + 1)),
    )
    .expect("names stay unique under the alpha_ prefix");
    Arc::new(sig)
}

/// Recovers the quantity per symbol from a signature of the shape produced
/// by [`make_gmet_signature`]: all symbols binary, named `=:q`, ascending,
/// with bottom `0` and top `1`. Returns `None` for any other signature.
pub fn gmet_quantities(sig: &RelationalSignature) -> Option<Vec<Quantity>> {
    let mut out = Vec::with_capacity(sig.len());
    for (name, arity) in sig.symbols() {
        if arity != 2 {
            return None;
        }
        let rest = name.strip_prefix("=:")?;
        let q = Quantity::from_str(rest).ok()?;
        if q < Quantity::zero() || q > Quantity::one() {
            return None;
        }
        out.push(q);
    }
    if out.is_empty() || !out.windows(2).all(|w| w[0] < w[1]) {
        return None;
    }
    if out[0] != Quantity::zero() || *out.last().unwrap() != Quantity::one() {
        return None;
    }
    Some(out)
}

/// Rebuilds the quantity lattice underlying a GMet-style signature.
pub fn gmet_lattice(sig: &RelationalSignature) -> Option<QuantityLattice> {
    QuantityLattice::new(gmet_quantities(sig)?).ok()
}
