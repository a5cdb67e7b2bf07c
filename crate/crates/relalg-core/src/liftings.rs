//! The built-in liftings of the `n`-th power functor to structures, plus
//! checkers for the standing assumptions (preservation of embeddings and of
//! relation-reflecting surjections).
//!
//! A lifting sends a structure `A` to a structure on the carrier `A^n`
//! (lexicographic index encoding, shared with [`crate::structures::product`])
//! and a map `f` to the map `f^n`. Applying a lifting to a structure outside
//! its intended subcategory is allowed; membership is checked separately.

use std::collections::BTreeSet;

use num_traits::One;

use crate::signatures::{gmet_quantities, Quantity};
use crate::structures::{decode_power, encode_power, power_len, Structure, StructureMap};
use crate::{Error, Result};

/// Data describing one of the built-in liftings.
///
/// - `Discrete`: all relations empty.
/// - `Product`: the product structure on `A^n`.
/// - `Subset(S)`: related iff related coordinatewise on the coordinates in
///   `S` only.
/// - `Lexicographic(sym)`: the named binary symbol is ordered
///   lexicographically; all other symbols get the product rule.
/// - `Lipschitz(alpha)`: over GMet-style signatures, `(a_i) =:e (a_i')` iff
///   every coordinate is related at some `d` with `d * alpha <= e`.
/// - `Lk(p)`: the Lukaszyk-Karmowski lifting for binary operations, in
///   saturated form: the four cross distances mix to at most `e`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LiftingSpec {
    Discrete,
    Product,
    Subset(BTreeSet<usize>),
    Lexicographic(String),
    Lipschitz(Quantity),
    Lk(Quantity),
}

impl LiftingSpec {
    /// Validates the spec parameters against an operation arity.
    pub(crate) fn check_arity(&self, arity: usize) -> std::result::Result<(), String> {
        match self {
            LiftingSpec::Discrete | LiftingSpec::Product | LiftingSpec::Lexicographic(_) => Ok(()),
            LiftingSpec::Subset(s) => match s.iter().find(|&&i| i >= arity) {
                Some(&i) => Err(format!("coordinate {i} is out of range for arity {arity}")),
                None => Ok(()),
            },
            LiftingSpec::Lipschitz(alpha) => {
                if *alpha < Quantity::one() {
                    Err(format!("Lipschitz constant {alpha} must be >= 1"))
                } else {
                    Ok(())
                }
            }
            LiftingSpec::Lk(p) => {
                if arity != 2 {
                    Err(format!("LK lifting requires arity 2, got {arity}"))
                } else if *p <= Quantity::new(0, 1) || *p >= Quantity::one() {
                    Err(format!("LK parameter {p} must lie strictly between 0 and 1"))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            LiftingSpec::Discrete => "discrete".into(),
            LiftingSpec::Product => "product".into(),
            LiftingSpec::Subset(s) => {
                let idx: Vec<String> = s.iter().map(|i| i.to_string()).collect();
                format!("subset{{{}}}", idx.join(","))
            }
            LiftingSpec::Lexicographic(sym) => format!("lex({sym})"),
            LiftingSpec::Lipschitz(alpha) => format!("lipschitz({alpha})"),
            LiftingSpec::Lk(p) => format!("lk({p})"),
        }
    }
}

/// Anything that can act as a lifting of the `n`-th power functor. The
/// built-ins are [`LiftingSpec`]; the trait exists so that test fixtures can
/// exercise the assumption checkers with deliberately broken liftings.
pub trait Lifting {
    fn apply(&self, a: &Structure, arity: usize) -> Result<Structure>;
    fn describe(&self) -> String;
}

impl Lifting for LiftingSpec {
    fn apply(&self, a: &Structure, arity: usize) -> Result<Structure> {
        apply_lifting(self, a, arity)
    }

    fn describe(&self) -> String {
        LiftingSpec::describe(self)
    }
}

fn inapplicable(spec: &LiftingSpec, reason: impl Into<String>) -> Error {
    Error::InapplicableLifting {
        lifting: spec.describe(),
        reason: reason.into(),
    }
}

/// Smallest symbol index at which `(x, y)` is related, over signatures whose
/// symbols are indexed by ascending quantities.
fn min_related(a: &Structure, x: usize, y: usize) -> Option<usize> {
    (0..a.sig().len()).find(|&i| a.has(i, &[x, y]))
}

/// Applies a lifting to a structure at the given operation arity. The
/// result has carrier `a.size() ^ arity` under the lexicographic encoding.
pub fn apply_lifting(spec: &LiftingSpec, a: &Structure, arity: usize) -> Result<Structure> {
    spec.check_arity(arity)
        .map_err(|reason| inapplicable(spec, reason))?;
    let size = a.size();
    let carrier = power_len(size, arity)?;
    let sig = a.sig().clone();
    let mut out = Structure::discrete(sig.clone(), carrier);

    match spec {
        LiftingSpec::Discrete => {}
        LiftingSpec::Product => {
            fill_coordinatewise(&mut out, a, arity, |i| i < arity)?;
        }
        LiftingSpec::Subset(s) => {
            fill_coordinatewise(&mut out, a, arity, |i| s.contains(&i))?;
        }
        LiftingSpec::Lexicographic(sym) => {
            let lex_rel = sig
                .index_of(sym)
                .ok_or_else(|| inapplicable(spec, format!("signature has no symbol `{sym}`")))?;
            if sig.arity(lex_rel) != 2 {
                return Err(inapplicable(spec, format!("symbol `{sym}` is not binary")));
            }
            // Product rule for every other symbol.
            for rel in 0..sig.len() {
                if rel == lex_rel {
                    continue;
                }
                fill_one_coordinatewise(&mut out, a, arity, rel, |i| i < arity)?;
            }
            for u in 0..carrier {
                let row = decode_power(size, arity, u);
                for v in 0..carrier {
                    let col = decode_power(size, arity, v);
                    let related = match (0..arity).find(|&i| row[i] != col[i]) {
                        None => true,
                        Some(k) => a.has(lex_rel, &[row[k], col[k]]),
                    };
                    if related {
                        out.insert_tuple(lex_rel, vec![u, v])?;
                    }
                }
            }
        }
        LiftingSpec::Lipschitz(alpha) => {
            let qs = gmet_quantities(&sig)
                .ok_or_else(|| inapplicable(spec, "signature is not GMet-style"))?;
            for u in 0..carrier {
                let row = decode_power(size, arity, u);
                for v in 0..carrier {
                    let col = decode_power(size, arity, v);
                    // Per coordinate, the least related quantity must fit
                    // under e / alpha; coordinates choose independently.
                    let needed: Option<Quantity> = (0..arity)
                        .map(|i| min_related(a, row[i], col[i]).map(|m| qs[m] * alpha))
                        .try_fold(Quantity::new(0, 1), |acc, d| d.map(|d| acc.max(d)));
                    if let Some(needed) = needed {
                        for (rel, e) in qs.iter().enumerate() {
                            if needed <= *e {
                                out.insert_tuple(rel, vec![u, v])?;
                            }
                        }
                    }
                }
            }
        }
        LiftingSpec::Lk(p) => {
            let qs = gmet_quantities(&sig)
                .ok_or_else(|| inapplicable(spec, "signature is not GMet-style"))?;
            let one = Quantity::one();
            let coeffs = [
                *p * *p,
                *p * (one - *p),
                (one - *p) * *p,
                (one - *p) * (one - *p),
            ];
            for u in 0..carrier {
                let row = decode_power(size, 2, u);
                for v in 0..carrier {
                    let col = decode_power(size, 2, v);
                    let pairs = [
                        (row[0], col[0]),
                        (row[0], col[1]),
                        (row[1], col[0]),
                        (row[1], col[1]),
                    ];
                    // The mixture is monotone in each cross distance, so the
                    // minimal related quantity per pair is optimal.
                    let mixture: Option<Quantity> = pairs
                        .iter()
                        .zip(&coeffs)
                        .map(|((x, y), c)| min_related(a, *x, *y).map(|m| qs[m] * c))
                        .try_fold(Quantity::new(0, 1), |acc, d| d.map(|d| acc + d));
                    if let Some(mixture) = mixture {
                        for (rel, e) in qs.iter().enumerate() {
                            if mixture <= *e {
                                out.insert_tuple(rel, vec![u, v])?;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

fn fill_coordinatewise(
    out: &mut Structure,
    a: &Structure,
    arity: usize,
    active: impl Fn(usize) -> bool + Copy,
) -> Result<()> {
    for rel in 0..a.sig().len() {
        fill_one_coordinatewise(out, a, arity, rel, active)?;
    }
    Ok(())
}

/// Related iff the column tuples at every active coordinate are related.
fn fill_one_coordinatewise(
    out: &mut Structure,
    a: &Structure,
    arity: usize,
    rel: usize,
    active: impl Fn(usize) -> bool,
) -> Result<()> {
    let size = a.size();
    let m = a.sig().arity(rel);
    let carrier = out.size();
    let total = if carrier == 0 { 0 } else { carrier.pow(m as u32) };
    for enc in 0..total {
        let tuple = decode_power(carrier, m, enc);
        let rows: Vec<Vec<usize>> = tuple
            .iter()
            .map(|&u| decode_power(size, arity, u))
            .collect();
        let related = (0..arity)
            .filter(|&i| active(i))
            .all(|i| {
                let column: Vec<usize> = rows.iter().map(|r| r[i]).collect();
                a.has(rel, &column)
            });
        if related {
            out.insert_tuple(rel, tuple)?;
        }
    }
    Ok(())
}

/// Lifts a map to the power carrier: the table `f^n` between the lifted
/// domain and codomain.
pub fn lift_map(l: &dyn Lifting, f: &StructureMap, arity: usize) -> Result<StructureMap> {
    let dom = l.apply(f.dom(), arity)?;
    let cod = l.apply(f.cod(), arity)?;
    let dsize = f.dom().size();
    let csize = f.cod().size();
    let table = (0..power_len(dsize, arity)?)
        .map(|u| {
            let t = decode_power(dsize, arity, u);
            let image: Vec<usize> = t.iter().map(|&x| f.apply(x)).collect();
            encode_power(csize, &image)
        })
        .collect();
    StructureMap::new(dom, cod, table)
}

/// One failed sample inside a [`LiftingReport`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftingViolation {
    pub sample: usize,
    pub lifted_class: crate::structures::MorphismClass,
}

/// Report of an assumption check over a sample set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftingReport {
    pub lifting: String,
    pub arity: usize,
    pub checked: usize,
    /// Samples that did not belong to the class being tested.
    pub rejected_inputs: Vec<usize>,
    pub violations: Vec<LiftingViolation>,
    pub notes: Vec<String>,
}

impl LiftingReport {
    pub fn passed(&self) -> bool {
        self.rejected_inputs.is_empty() && self.violations.is_empty()
    }
}

fn quantization_note(l: &dyn Lifting) -> Vec<String> {
    let d = l.describe();
    if d.starts_with("lipschitz") || d.starts_with("lk") {
        vec![format!(
            "{d}: scaled quantities are compared within the finite lattice; fidelity holds up to this quantization"
        )]
    } else {
        Vec::new()
    }
}

/// Checks that the lifting sends every embedding in `samples` to an
/// embedding between the lifted structures.
pub fn check_preserves_embeddings(
    l: &dyn Lifting,
    arity: usize,
    samples: &[StructureMap],
) -> Result<LiftingReport> {
    check_class(l, arity, samples, true)
}

/// Checks that the lifting sends every surjective preserve-and-reflect map
/// in `samples` to one between the lifted structures.
pub fn check_preserves_reflecting_surjections(
    l: &dyn Lifting,
    arity: usize,
    samples: &[StructureMap],
) -> Result<LiftingReport> {
    check_class(l, arity, samples, false)
}

fn check_class(
    l: &dyn Lifting,
    arity: usize,
    samples: &[StructureMap],
    embeddings: bool,
) -> Result<LiftingReport> {
    let mut report = LiftingReport {
        lifting: l.describe(),
        arity,
        checked: 0,
        rejected_inputs: Vec::new(),
        violations: Vec::new(),
        notes: quantization_note(l),
    };
    for (i, f) in samples.iter().enumerate() {
        let class = f.classify();
        let in_class = if embeddings {
            class.is_embedding()
        } else {
            class.is_reflecting_surjection()
        };
        if !in_class {
            report.rejected_inputs.push(i);
            continue;
        }
        let lifted = lift_map(l, f, arity)?;
        let lifted_class = lifted.classify();
        let ok = if embeddings {
            lifted_class.is_embedding()
        } else {
            lifted_class.is_reflecting_surjection()
        };
        report.checked += 1;
        if !ok {
            report.violations.push(LiftingViolation {
                sample: i,
                lifted_class,
            });
        }
    }
    Ok(report)
}

/// All six built-in lifting kinds at a given arity, with generic parameter
/// choices. Used by assumption sweeps and the differential tests.
pub fn builtin_liftings(arity: usize, order_symbol: &str) -> Vec<LiftingSpec> {
    let mut out = vec![LiftingSpec::Discrete, LiftingSpec::Product];
    let subset: BTreeSet<usize> = (0..arity).step_by(2).collect();
    out.push(LiftingSpec::Subset(subset));
    out.push(LiftingSpec::Lexicographic(order_symbol.to_string()));
    out.push(LiftingSpec::Lipschitz(Quantity::new(2, 1)));
    if arity == 2 {
        out.push(LiftingSpec::Lk(Quantity::new(1, 2)));
    }
    out
}
