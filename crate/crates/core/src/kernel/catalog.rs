//! Registry of kernel operators and their coverage branches.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OpInfo {
    pub id: OpId,
    pub name: &'static str,
    pub arity: u8,
    pub commutative: bool,
    pub branches: &'static [Branch],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BranchInfo {
    pub op: OpId,
    pub name: &'static str,
    /// Reachable only if the kernel itself is broken.
    pub internal: bool,
}

macro_rules! catalog {
    ($(
        $op:ident $name:literal / $arity:literal $(, $comm:ident)? {
            $($nb:ident = $nname:literal),* $(,)?
            $(; internal $($ib:ident = $iname:literal),+ $(,)?)?
        }
    )*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
        pub enum OpId { $($op),* }

        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
        pub enum Branch { $($($nb,)* $($($ib,)+)?)* }

        pub static OPS: &[OpInfo] = &[$(
            OpInfo {
                id: OpId::$op,
                name: $name,
                arity: $arity,
                commutative: catalog!(@comm $($comm)?),
                branches: &[$(Branch::$nb,)* $($(Branch::$ib,)+)?],
            },
        )*];

        pub static BRANCHES: &[BranchInfo] = &[$(
            $(BranchInfo { op: OpId::$op, name: $nname, internal: false },)*
            $($(BranchInfo { op: OpId::$op, name: $iname, internal: true },)+)?
        )*];
    };
    (@comm commutative) => { true };
    (@comm) => { false };
}

catalog! {
    Union "union" / 2, commutative { UnionOk = "ok"; internal UnionType = "bad_argument" }
    Inter "intersection" / 2, commutative { InterOk = "ok"; internal InterType = "bad_argument" }
    SetDiff "difference" / 2 { SetDiffOk = "ok"; internal SetDiffType = "bad_argument" }
    Product "product" / 2 { ProductOk = "ok"; internal ProductType = "bad_argument" }
    PowerSet "POW" / 1 { PowOk = "ok"; internal PowType = "bad_argument" }
    PowerSet1 "POW1" / 1 { Pow1Ok = "ok"; internal Pow1Type = "bad_argument" }
    FinSet "FIN" / 1 { FinOk = "ok"; internal FinType = "bad_argument" }
    FinSet1 "FIN1" / 1 { Fin1Ok = "ok"; internal Fin1Type = "bad_argument" }
    GenUnion "general_union" / 1 { GenUnionOk = "ok"; internal GenUnionType = "bad_argument" }
    GenInter "general_intersection" / 1 {
        GenInterOk = "ok", GenInterEmpty = "empty_undefined";
        internal GenInterType = "bad_argument"
    }
    Card "card" / 1 { CardOk = "ok"; internal CardType = "bad_argument" }
    Min "min" / 1 { MinOk = "ok", MinEmpty = "empty_undefined"; internal MinType = "bad_argument" }
    Max "max" / 1 { MaxOk = "ok", MaxEmpty = "empty_undefined"; internal MaxType = "bad_argument" }
    Interval "interval" / 2 {
        IntervalOk = "ok", IntervalEmpty = "empty";
        internal IntervalType = "bad_argument"
    }
    Dom "dom" / 1 { DomOk = "ok"; internal DomType = "bad_argument" }
    Ran "ran" / 1 { RanOk = "ok"; internal RanType = "bad_argument" }
    Inverse "inverse" / 1 { InverseOk = "ok"; internal InverseType = "bad_argument" }
    Identity "id" / 1 { IdOk = "ok"; internal IdType = "bad_argument" }
    Compose "composition" / 2 { ComposeOk = "ok"; internal ComposeType = "bad_argument" }
    Override "override" / 2 { OverrideOk = "ok"; internal OverrideType = "bad_argument" }
    DomRestrict "domain_restriction" / 2 { DomRestrictOk = "ok"; internal DomRestrictType = "bad_argument" }
    RanRestrict "range_restriction" / 2 { RanRestrictOk = "ok"; internal RanRestrictType = "bad_argument" }
    DomSubtract "domain_subtraction" / 2 { DomSubtractOk = "ok"; internal DomSubtractType = "bad_argument" }
    RanSubtract "range_subtraction" / 2 { RanSubtractOk = "ok"; internal RanSubtractType = "bad_argument" }
    Image "image" / 2 { ImageOk = "ok"; internal ImageType = "bad_argument" }
    Apply "apply" / 2 {
        ApplyOk = "ok", ApplyOutsideDomain = "outside_domain", ApplyNotFunctional = "not_functional";
        internal ApplyType = "bad_argument"
    }
    FunctionKind "function_kind" / 3 {
        FnOk = "ok", FnOutsideSignature = "outside_signature", FnNotFunctional = "not_functional",
        FnNotTotal = "not_total", FnNotInjective = "not_injective", FnNotSurjective = "not_surjective";
        internal FnType = "bad_argument"
    }
    ArrowSet "arrow_set" / 2 { ArrowSetOk = "ok"; internal ArrowSetType = "bad_argument" }
    Plus "plus" / 2, commutative { PlusOk = "ok"; internal PlusOverflow = "overflow", PlusType = "bad_argument" }
    Minus "minus" / 2 { MinusOk = "ok"; internal MinusOverflow = "overflow", MinusType = "bad_argument" }
    Times "times" / 2, commutative { TimesOk = "ok"; internal TimesOverflow = "overflow", TimesType = "bad_argument" }
    Div "div" / 2 {
        DivOk = "ok", DivByZero = "division_by_zero";
        internal DivOverflow = "overflow", DivType = "bad_argument"
    }
    Mod "mod" / 2 {
        ModOk = "ok", ModByZero = "modulo_by_zero", ModNegative = "negative_operand";
        internal ModType = "bad_argument"
    }
    Power "power" / 2 {
        PowerOk = "ok", PowerNegative = "negative_exponent";
        internal PowerOverflow = "overflow", PowerType = "bad_argument"
    }
    Negate "negate" / 1 { NegateOk = "ok"; internal NegateOverflow = "overflow", NegateType = "bad_argument" }
    Size "size" / 1 { SizeOk = "ok", SizeNotSeq = "not_a_sequence"; internal SizeType = "bad_argument" }
    Concat "concatenation" / 2 {
        ConcatOk = "ok", ConcatNotSeq = "not_a_sequence";
        internal ConcatType = "bad_argument"
    }
    First "first" / 1 {
        FirstOk = "ok", FirstEmpty = "empty_undefined", FirstNotSeq = "not_a_sequence";
        internal FirstType = "bad_argument"
    }
    Last "last" / 1 {
        LastOk = "ok", LastEmpty = "empty_undefined", LastNotSeq = "not_a_sequence";
        internal LastType = "bad_argument"
    }
    Front "front" / 1 {
        FrontOk = "ok", FrontEmpty = "empty_undefined", FrontNotSeq = "not_a_sequence";
        internal FrontType = "bad_argument"
    }
    Tail "tail" / 1 {
        TailOk = "ok", TailEmpty = "empty_undefined", TailNotSeq = "not_a_sequence";
        internal TailType = "bad_argument"
    }
    Rev "rev" / 1 { RevOk = "ok", RevNotSeq = "not_a_sequence"; internal RevType = "bad_argument" }
    SeqSet "seq" / 1 { SeqSetOk = "ok"; internal SeqSetType = "bad_argument" }
    Member "membership" / 2 { MemberTrue = "true", MemberFalse = "false"; internal MemberType = "bad_argument" }
    NonMember "non_membership" / 2 {
        NonMemberTrue = "true", NonMemberFalse = "false";
        internal NonMemberType = "bad_argument"
    }
    Equal "equality" / 2, commutative { EqualTrue = "true", EqualFalse = "false" }
    Distinct "inequality" / 2, commutative {
        DistinctTrue = "true", DistinctFalse = "false";
        internal DistinctType = "kind_mismatch"
    }
    Subset "inclusion" / 2 { SubsetTrue = "true", SubsetFalse = "false"; internal SubsetType = "bad_argument" }
    NonSubset "non_inclusion" / 2 {
        NonSubsetTrue = "true", NonSubsetFalse = "false";
        internal NonSubsetType = "bad_argument"
    }
    IntCompare "integer_comparison" / 2 {
        IntCompareTrue = "true", IntCompareFalse = "false";
        internal IntCompareType = "bad_argument"
    }
    BuiltinSet "builtin_set" / 0 { BuiltinInt = "integers", BuiltinNat = "naturals", BuiltinBool = "booleans" }
    EnumType "enumerate_type" / 1 { EnumTypeOk = "ok" }
}

impl Branch {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn info(self) -> &'static BranchInfo {
        &BRANCHES[self.index()]
    }
}

impl OpId {
    pub fn info(self) -> &'static OpInfo {
        &OPS[self as usize]
    }

    pub fn name(self) -> &'static str {
        self.info().name
    }

    pub fn from_name(name: &str) -> Option<OpId> {
        OPS.iter().find(|o| o.name == name).map(|o| o.id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_branch_belongs_to_exactly_one_op() {
        let mut seen = vec![0; BRANCHES.len()];
        for (i, op) in OPS.iter().enumerate() {
            assert_eq!(op.id as usize, i);
            for b in op.branches {
                seen[b.index()] += 1;
                assert_eq!(b.info().op, op.id);
            }
        }
        assert!(seen.iter().all(|&n| n == 1));
    }

    #[test]
    fn op_names_are_unique() {
        for (i, a) in OPS.iter().enumerate() {
            assert!(OPS[i + 1..].iter().all(|b| b.name != a.name), "{}", a.name);
        }
        assert_eq!(OpId::from_name("union"), Some(OpId::Union));
    }

    #[test]
    fn commutative_flags() {
        assert!(OpId::Union.info().commutative);
        assert!(OpId::Times.info().commutative);
        assert!(!OpId::SetDiff.info().commutative);
    }
}
