//! Canonical finite values, their types, and enumeration scopes.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Upper bound on the number of values a single type enumeration may produce.
pub const DEFAULT_ENUM_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("heterogeneous set: members of type {first} and {other}")]
    HeterogeneousSet { first: String, other: String },
    #[error("enumeration of {ty} would produce {size} values (limit {limit})")]
    ScopeOverflow { ty: String, size: String, limit: u64 },
    #[error("unknown carrier set {0}")]
    UnknownCarrier(String),
    #[error("invalid scope: {0}")]
    InvalidScope(String),
}

/// A finite B value in canonical form.
///
/// Relations, functions and sequences are sets of pairs. Set members are
/// kept strictly increasing under [`Value::cmp`], so structural equality is
/// set equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Elem { carrier: Arc<str>, index: u32 },
    Pair(Arc<(Value, Value)>),
    Set(SetV),
}

/// Canonically ordered, duplicate-free set contents.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SetV(Arc<Vec<Value>>);

impl SetV {
    pub fn empty() -> Self {
        SetV(Arc::new(Vec::new()))
    }

    /// Sorts and deduplicates. Member type homogeneity is not checked here;
    /// use [`canonical`] for untrusted input.
    pub fn from_vec(mut elems: Vec<Value>) -> Self {
        elems.sort();
        elems.dedup();
        SetV(Arc::new(elems))
    }

    /// Caller guarantees `elems` is strictly increasing.
    pub(crate) fn from_sorted(elems: Vec<Value>) -> Self {
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]));
        SetV(Arc::new(elems))
    }

    pub fn as_slice(&self) -> &[Value] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Value> {
        self.0.iter()
    }

    pub fn contains(&self, v: &Value) -> bool {
        self.0.binary_search(v).is_ok()
    }
}

impl<'a> IntoIterator for &'a SetV {
    type Item = &'a Value;
    type IntoIter = std::slice::Iter<'a, Value>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl Value {
    pub fn int(n: i64) -> Value {
        Value::Int(n)
    }

    pub fn elem(carrier: &str, index: u32) -> Value {
        Value::Elem { carrier: Arc::from(carrier), index }
    }

    pub fn pair(left: Value, right: Value) -> Value {
        Value::Pair(Arc::new((left, right)))
    }

    pub fn set<I: IntoIterator<Item = Value>>(elems: I) -> Value {
        Value::Set(SetV::from_vec(elems.into_iter().collect()))
    }

    pub fn empty_set() -> Value {
        Value::Set(SetV::empty())
    }

    pub fn int_set<I: IntoIterator<Item = i64>>(elems: I) -> Value {
        Value::set(elems.into_iter().map(Value::Int))
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_set(&self) -> Option<&SetV> {
        match self {
            Value::Set(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(&Value, &Value)> {
        match self {
            Value::Pair(p) => Some((&p.0, &p.1)),
            _ => None,
        }
    }

    fn kind_rank(&self) -> u8 {
        match self {
            Value::Bool(_) => 0,
            Value::Int(_) => 1,
            Value::Elem { .. } => 2,
            Value::Pair(_) => 3,
            Value::Set(_) => 4,
        }
    }

    /// True when every set nested in this value is sorted and duplicate-free.
    pub fn is_canonical(&self) -> bool {
        match self {
            Value::Pair(p) => p.0.is_canonical() && p.1.is_canonical(),
            Value::Set(s) => {
                s.iter().all(Value::is_canonical) && s.as_slice().windows(2).all(|w| w[0] < w[1])
            }
            _ => true,
        }
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Bool(a), Value::Bool(b)) => a.cmp(b),
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (
                Value::Elem { carrier: c1, index: i1 },
                Value::Elem { carrier: c2, index: i2 },
            ) => c1.cmp(c2).then(i1.cmp(i2)),
            (Value::Pair(a), Value::Pair(b)) => a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)),
            (Value::Set(a), Value::Set(b)) => a
                .len()
                .cmp(&b.len())
                .then_with(|| a.as_slice().iter().cmp(b.as_slice().iter())),
            _ => self.kind_rank().cmp(&other.kind_rank()),
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The canonical total order on values.
pub fn compare(a: &Value, b: &Value) -> Ordering {
    a.cmp(b)
}

fn carrier_default_name(carrier: &str, index: u32) -> String {
    format!("{}{}", carrier.to_lowercase(), index + 1)
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(true) => f.write_str("TRUE"),
            Value::Bool(false) => f.write_str("FALSE"),
            Value::Int(n) => write!(f, "{n}"),
            Value::Elem { carrier, index } => f.write_str(&carrier_default_name(carrier, *index)),
            Value::Pair(p) => write!(f, "({}|->{})", p.0, p.1),
            Value::Set(s) => {
                f.write_str("{")?;
                for (i, v) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("}")
            }
        }
    }
}

impl Serialize for Value {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A value whose sets may be unsorted or contain duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawValue {
    Bool(bool),
    Int(i64),
    Elem(String, u32),
    Pair(Box<RawValue>, Box<RawValue>),
    Set(Vec<RawValue>),
}

impl From<&Value> for RawValue {
    fn from(v: &Value) -> Self {
        match v {
            Value::Bool(b) => RawValue::Bool(*b),
            Value::Int(n) => RawValue::Int(*n),
            Value::Elem { carrier, index } => RawValue::Elem(carrier.to_string(), *index),
            Value::Pair(p) => RawValue::Pair(Box::new((&p.0).into()), Box::new((&p.1).into())),
            Value::Set(s) => RawValue::Set(s.iter().map(RawValue::from).collect()),
        }
    }
}

/// Partially known type used for homogeneity checks; empty sets leave their
/// member type open.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Shape {
    Any,
    Bool,
    Int,
    Enum(String),
    Prod(Box<Shape>, Box<Shape>),
    Pow(Box<Shape>),
}

impl Shape {
    fn unify(&self, other: &Shape) -> Option<Shape> {
        match (self, other) {
            (Shape::Any, s) | (s, Shape::Any) => Some(s.clone()),
            (Shape::Bool, Shape::Bool) => Some(Shape::Bool),
            (Shape::Int, Shape::Int) => Some(Shape::Int),
            (Shape::Enum(a), Shape::Enum(b)) if a == b => Some(self.clone()),
            (Shape::Prod(a1, b1), Shape::Prod(a2, b2)) => {
                Some(Shape::Prod(Box::new(a1.unify(a2)?), Box::new(b1.unify(b2)?)))
            }
            (Shape::Pow(a), Shape::Pow(b)) => Some(Shape::Pow(Box::new(a.unify(b)?))),
            _ => None,
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Any => f.write_str("?"),
            Shape::Bool => f.write_str("BOOL"),
            Shape::Int => f.write_str("INTEGER"),
            Shape::Enum(c) => f.write_str(c),
            Shape::Prod(a, b) => write!(f, "({a}*{b})"),
            Shape::Pow(a) => write!(f, "POW({a})"),
        }
    }
}

fn canonical_inner(raw: &RawValue) -> Result<(Value, Shape), ValueError> {
    Ok(match raw {
        RawValue::Bool(b) => (Value::Bool(*b), Shape::Bool),
        RawValue::Int(n) => (Value::Int(*n), Shape::Int),
        RawValue::Elem(c, i) => (Value::elem(c, *i), Shape::Enum(c.clone())),
        RawValue::Pair(l, r) => {
            let (lv, ls) = canonical_inner(l)?;
            let (rv, rs) = canonical_inner(r)?;
            (Value::pair(lv, rv), Shape::Prod(Box::new(ls), Box::new(rs)))
        }
        RawValue::Set(elems) => {
            let mut shape = Shape::Any;
            let mut out = Vec::with_capacity(elems.len());
            for e in elems {
                let (v, s) = canonical_inner(e)?;
                shape = shape.unify(&s).ok_or_else(|| ValueError::HeterogeneousSet {
                    first: shape.to_string(),
                    other: s.to_string(),
                })?;
                out.push(v);
            }
            (Value::Set(SetV::from_vec(out)), Shape::Pow(Box::new(shape)))
        }
    })
}

/// Builds the unique canonical value for a raw value.
pub fn canonical(raw: &RawValue) -> Result<Value, ValueError> {
    canonical_inner(raw).map(|(v, _)| v)
}

/// B types over finite carriers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BType {
    Bool,
    Int,
    Enum(String),
    Prod(Box<BType>, Box<BType>),
    Pow(Box<BType>),
}

impl BType {
    pub fn prod(a: BType, b: BType) -> BType {
        BType::Prod(Box::new(a), Box::new(b))
    }

    pub fn pow(a: BType) -> BType {
        BType::Pow(Box::new(a))
    }

    pub fn carriers(&self, out: &mut Vec<String>) {
        match self {
            BType::Enum(c) => {
                if !out.contains(c) {
                    out.push(c.clone());
                }
            }
            BType::Prod(a, b) => {
                a.carriers(out);
                b.carriers(out);
            }
            BType::Pow(a) => a.carriers(out),
            BType::Bool | BType::Int => {}
        }
    }
}

impl fmt::Display for BType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BType::Bool => f.write_str("BOOL"),
            BType::Int => f.write_str("INTEGER"),
            BType::Enum(c) => f.write_str(c),
            BType::Prod(a, b) => match **b {
                BType::Prod(..) => write!(f, "{a}*({b})"),
                _ => write!(f, "{a}*{b}"),
            },
            BType::Pow(a) => write!(f, "POW({a})"),
        }
    }
}

/// Finite enumeration bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scope {
    /// Explicit carrier sizes; carriers not listed get `default_carrier_size`.
    pub carriers: BTreeMap<String, usize>,
    /// Element names for carriers declared by a machine.
    pub element_names: BTreeMap<String, Vec<String>>,
    pub default_carrier_size: usize,
    pub int_lo: i64,
    pub int_hi: i64,
    pub max_set_card: usize,
    pub fuel: u64,
    pub enum_limit: u64,
}

impl Default for Scope {
    fn default() -> Self {
        Scope {
            carriers: BTreeMap::new(),
            element_names: BTreeMap::new(),
            default_carrier_size: 2,
            int_lo: -3,
            int_hi: 3,
            max_set_card: 4,
            fuel: 1_000_000,
            enum_limit: DEFAULT_ENUM_LIMIT,
        }
    }
}

impl Scope {
    pub fn validate(&self) -> Result<(), ValueError> {
        if self.int_lo > self.int_hi {
            return Err(ValueError::InvalidScope(format!(
                "integer bounds {}..{} are empty",
                self.int_lo, self.int_hi
            )));
        }
        if self.fuel == 0 {
            return Err(ValueError::InvalidScope("fuel must be positive".into()));
        }
        if self.default_carrier_size == 0 || self.carriers.values().any(|&n| n == 0) {
            return Err(ValueError::InvalidScope("carrier sizes must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_carrier(mut self, name: &str, size: usize) -> Self {
        self.carriers.insert(name.to_string(), size);
        self
    }

    pub fn with_ints(mut self, lo: i64, hi: i64) -> Self {
        self.int_lo = lo;
        self.int_hi = hi;
        self
    }

    /// Declares an enumerated carrier with named elements.
    pub fn with_enumerated(mut self, name: &str, elems: &[String]) -> Self {
        self.carriers.insert(name.to_string(), elems.len());
        self.element_names.insert(name.to_string(), elems.to_vec());
        self
    }

    pub fn carrier_size(&self, name: &str) -> usize {
        self.carriers.get(name).copied().unwrap_or(self.default_carrier_size)
    }

    pub fn carrier_value(&self, name: &str) -> Value {
        let n = self.carrier_size(name) as u32;
        let carrier: Arc<str> = Arc::from(name);
        Value::Set(SetV::from_sorted(
            (0..n).map(|index| Value::Elem { carrier: carrier.clone(), index }).collect(),
        ))
    }

    pub fn element_name(&self, carrier: &str, index: u32) -> String {
        self.element_names
            .get(carrier)
            .and_then(|names| names.get(index as usize).cloned())
            .unwrap_or_else(|| carrier_default_name(carrier, index))
    }

    /// Renders a value using declared element names where known.
    pub fn render(&self, v: &Value) -> String {
        let mut out = String::new();
        self.render_into(v, &mut out);
        out
    }

    fn render_into(&self, v: &Value, out: &mut String) {
        match v {
            Value::Elem { carrier, index } => out.push_str(&self.element_name(carrier, *index)),
            Value::Pair(p) => {
                out.push('(');
                self.render_into(&p.0, out);
                out.push_str("|->");
                self.render_into(&p.1, out);
                out.push(')');
            }
            Value::Set(s) => {
                out.push('{');
                for (i, e) in s.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    self.render_into(e, out);
                }
                out.push('}');
            }
            other => out.push_str(&other.to_string()),
        }
    }

    /// Number of values `enumerate_type` would yield, saturating.
    pub fn type_size(&self, t: &BType) -> u128 {
        match t {
            BType::Bool => 2,
            BType::Int => (self.int_hi - self.int_lo + 1) as u128,
            BType::Enum(c) => self.carrier_size(c) as u128,
            BType::Prod(a, b) => self.type_size(a).saturating_mul(self.type_size(b)),
            BType::Pow(a) => {
                let n = self.type_size(a);
                let k = (self.max_set_card as u128).min(n);
                let mut total: u128 = 1;
                let mut binom: u128 = 1;
                for i in 1..=k {
                    binom = binom.saturating_mul(n - i + 1) / i;
                    total = total.saturating_add(binom);
                }
                total
            }
        }
    }
}

/// Every value of type `t` within the scope bounds, in canonical order.
pub fn enumerate_type(t: &BType, s: &Scope) -> Result<Vec<Value>, ValueError> {
    let size = s.type_size(t);
    if size > s.enum_limit as u128 {
        return Err(ValueError::ScopeOverflow {
            ty: t.to_string(),
            size: size.to_string(),
            limit: s.enum_limit,
        });
    }
    Ok(enumerate_unchecked(t, s))
}

fn enumerate_unchecked(t: &BType, s: &Scope) -> Vec<Value> {
    match t {
        BType::Bool => vec![Value::Bool(false), Value::Bool(true)],
        BType::Int => (s.int_lo..=s.int_hi).map(Value::Int).collect(),
        BType::Enum(c) => match s.carrier_value(c) {
            Value::Set(set) => set.as_slice().to_vec(),
            _ => unreachable!(),
        },
        BType::Prod(a, b) => {
            let left = enumerate_unchecked(a, s);
            let right = enumerate_unchecked(b, s);
            let mut out = Vec::with_capacity(left.len() * right.len());
            for l in &left {
                for r in &right {
                    out.push(Value::pair(l.clone(), r.clone()));
                }
            }
            out
        }
        BType::Pow(a) => {
            let base = enumerate_unchecked(a, s);
            subsets_by_size(&base, s.max_set_card.min(base.len()))
        }
    }
}

/// All subsets of a sorted slice with at most `max_card` members, ordered by
/// size and then lexicographically.
pub(crate) fn subsets_by_size(base: &[Value], max_card: usize) -> Vec<Value> {
    let mut out = Vec::new();
    let n = base.len();
    for k in 0..=max_card.min(n) {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            out.push(Value::Set(SetV::from_sorted(idx.iter().map(|&i| base[i].clone()).collect())));
            // advance the k-combination
            let mut i = k;
            while i > 0 && idx[i - 1] == n - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn raw_int_set(xs: &[i64]) -> RawValue {
        RawValue::Set(xs.iter().map(|&n| RawValue::Int(n)).collect())
    }

    #[test]
    fn canonical_sorts_and_dedups() {
        assert_eq!(canonical(&raw_int_set(&[2, 1, 2])).unwrap(), Value::int_set([1, 2]));
        assert_eq!(canonical(&RawValue::Set(vec![])).unwrap(), Value::empty_set());
        let nested = RawValue::Set(vec![raw_int_set(&[2, 1]), raw_int_set(&[1, 2])]);
        assert_eq!(
            canonical(&nested).unwrap(),
            Value::set([Value::int_set([1, 2])])
        );
    }

    #[test]
    fn canonical_rejects_mixed_members() {
        let raw = RawValue::Set(vec![RawValue::Int(1), RawValue::Bool(true)]);
        assert!(matches!(canonical(&raw), Err(ValueError::HeterogeneousSet { .. })));
        // empty inner sets unify with anything of set type
        let ok = RawValue::Set(vec![RawValue::Set(vec![]), raw_int_set(&[1])]);
        assert!(canonical(&ok).is_ok());
        let bad = RawValue::Set(vec![
            raw_int_set(&[1]),
            RawValue::Set(vec![RawValue::Elem("ID".into(), 0)]),
        ]);
        assert!(canonical(&bad).is_err());
    }

    #[test]
    fn compare_examples() {
        assert_eq!(compare(&Value::Int(1), &Value::Int(2)), Ordering::Less);
        assert_eq!(
            compare(&Value::empty_set(), &Value::int_set([0])),
            Ordering::Less
        );
        assert_eq!(
            compare(
                &Value::pair(Value::Int(1), Value::Int(2)),
                &Value::pair(Value::Int(1), Value::Int(3))
            ),
            Ordering::Less
        );
        assert_eq!(compare(&Value::Bool(true), &Value::Int(-100)), Ordering::Less);
        // length first: {5} < {0,1}
        assert_eq!(
            compare(&Value::int_set([5]), &Value::int_set([0, 1])),
            Ordering::Less
        );
    }

    #[test]
    fn enumerate_examples() {
        let s = Scope::default();
        assert_eq!(
            enumerate_type(&BType::Bool, &s).unwrap(),
            vec![Value::Bool(false), Value::Bool(true)]
        );
        let s2 = Scope::default().with_enumerated("ID", &["aa".into(), "bb".into()]);
        let got = enumerate_type(&BType::pow(BType::Enum("ID".into())), &s2).unwrap();
        let aa = Value::elem("ID", 0);
        let bb = Value::elem("ID", 1);
        assert_eq!(
            got,
            vec![
                Value::empty_set(),
                Value::set([aa.clone()]),
                Value::set([bb.clone()]),
                Value::set([aa, bb])
            ]
        );
        assert_eq!(s2.render(&got[3]), "{aa,bb}");
        let s3 = Scope::default().with_ints(-1, 1);
        assert_eq!(
            enumerate_type(&BType::Int, &s3).unwrap(),
            vec![Value::Int(-1), Value::Int(0), Value::Int(1)]
        );
    }

    #[test]
    fn enumerate_respects_card_cap_and_limit() {
        let s = Scope::default(); // ints -3..3, cap 4
        let subsets = enumerate_type(&BType::pow(BType::Int), &s).unwrap();
        assert_eq!(subsets.len(), 1 + 7 + 21 + 35 + 35);
        assert!(subsets.iter().all(|v| v.as_set().unwrap().len() <= 4));
        let tight = Scope { enum_limit: 50, ..Scope::default() };
        assert!(matches!(
            enumerate_type(&BType::pow(BType::Int), &tight),
            Err(ValueError::ScopeOverflow { .. })
        ));
    }

    #[test]
    fn scope_validation() {
        assert!(Scope::default().validate().is_ok());
        assert!(Scope::default().with_ints(2, 1).validate().is_err());
        assert!(Scope { fuel: 0, ..Scope::default() }.validate().is_err());
    }

    fn arb_btype() -> impl Strategy<Value = BType> {
        let leaf = prop_oneof![
            Just(BType::Bool),
            Just(BType::Int),
            Just(BType::Enum("EL".into())),
        ];
        leaf.prop_recursive(2, 6, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| BType::prod(a, b)),
                inner.prop_map(BType::pow),
            ]
        })
    }

    fn small_scope() -> Scope {
        let mut s = Scope::default().with_ints(-1, 1);
        s.max_set_card = 3;
        s
    }

    proptest! {
        #[test]
        fn enumeration_is_sorted_and_sized(t in arb_btype()) {
            let s = small_scope();
            if s.type_size(&t) < 20_000 {
                let vals = enumerate_type(&t, &s).unwrap();
                prop_assert_eq!(vals.len() as u128, s.type_size(&t));
                prop_assert!(vals.windows(2).all(|w| w[0] < w[1]));
                prop_assert!(vals.iter().all(Value::is_canonical));
            }
        }

        #[test]
        fn powerset_has_full_size_when_uncapped(t in arb_btype()) {
            let mut s = small_scope();
            let n = s.type_size(&t);
            if n <= 10 {
                s.max_set_card = n as usize;
                let p = enumerate_type(&BType::pow(t), &s).unwrap();
                prop_assert_eq!(p.len() as u128, 1u128 << n);
            }
        }

        #[test]
        fn canonical_is_idempotent(t in arb_btype(), picks in proptest::collection::vec(any::<prop::sample::Index>(), 0..6)) {
            let s = small_scope();
            if s.type_size(&t) < 5_000 {
                let vals = enumerate_type(&t, &s).unwrap();
                // shuffled raw set with duplicates
                let raw = RawValue::Set(picks.iter().map(|i| RawValue::from(i.get(&vals))).collect());
                let once = canonical(&raw).unwrap();
                let twice = canonical(&RawValue::from(&once)).unwrap();
                prop_assert_eq!(&once, &twice);
                prop_assert!(once.is_canonical());
            }
        }

        #[test]
        fn compare_is_total_order(t in arb_btype(), i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>(), k in any::<prop::sample::Index>()) {
            let s = small_scope();
            if s.type_size(&t) < 5_000 {
                let vals = enumerate_type(&t, &s).unwrap();
                let (a, b, c) = (i.get(&vals), j.get(&vals), k.get(&vals));
                prop_assert_eq!(compare(a, a), Ordering::Equal);
                prop_assert_eq!(compare(a, b), compare(b, a).reverse());
                if compare(a, b) != Ordering::Greater && compare(b, c) != Ordering::Greater {
                    prop_assert_ne!(compare(a, c), Ordering::Greater);
                }
                prop_assert_eq!(compare(a, b) == Ordering::Equal, a == b);
            }
        }
    }
}
