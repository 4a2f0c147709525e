//! Heuristic rules as expression trees over scheduling attributes.
//!
//! An individual carries two trees: an activity ordering rule evaluated on
//! eligible activity-mode pairs, and a group selection rule evaluated on
//! feasible activity groups. Smaller priority values rank higher. Trees are
//! immutable after construction and evaluation is reentrant.

mod attrs;
mod sexpr;

pub use attrs::{group_attrs, pair_attrs, StateView, GROUP_ATTR_COUNT, PAIR_ATTR_COUNT};
pub use sexpr::ParseError;

use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Denominators at or below this magnitude make protected division return 1.
pub const DIV_EPSILON: f64 = 1e-9;

/// A terminal set for one tree role.
pub trait Attribute: Copy + Eq + std::fmt::Debug + Send + Sync + 'static {
    const ALL: &'static [Self];
    fn name(self) -> &'static str;
    fn parse(name: &str) -> Option<Self>;
    fn index(self) -> usize;
}

macro_rules! attribute_enum {
    ($(#[$doc:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum $name {
            $($variant),+
        }

        impl Attribute for $name {
            const ALL: &'static [Self] = &[$(Self::$variant),+];

            fn name(self) -> &'static str {
                match self {
                    $(Self::$variant => $text),+
                }
            }

            fn parse(name: &str) -> Option<Self> {
                match name {
                    $($text => Some(Self::$variant),)+
                    _ => None,
                }
            }

            fn index(self) -> usize {
                Self::ALL.iter().position(|a| *a == self).expect("listed variant")
            }
        }
    };
}

attribute_enum! {
    /// Attributes of an eligible activity-mode pair in a project state.
    PairAttr {
        ExpectedDuration => "exp_dur",
        OptimisticDuration => "opt_dur",
        PessimisticDuration => "pes_dur",
        MaxDemandFraction => "max_demand",
        MeanDemandFraction => "mean_demand",
        SuccessorCount => "succ_count",
        SuccessorWork => "succ_work",
        CriticalPathToEnd => "cp_to_end",
        EligibleCount => "eligible_count",
        ResourceUtilisation => "utilisation",
        TimeNow => "time_now",
    }
}

attribute_enum! {
    /// Attributes of a feasible activity group in a project state.
    GroupAttr {
        MemberCount => "member_count",
        SumExpectedDuration => "sum_exp_dur",
        MaxExpectedDuration => "max_exp_dur",
        MeanDemandFraction => "mean_demand",
        SumSuccessorCount => "sum_succ_count",
        SlackCapacity => "slack",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Min,
    Max,
}

impl BinOp {
    pub const ALL: [BinOp; 6] = [
        BinOp::Add,
        BinOp::Sub,
        BinOp::Mul,
        BinOp::Div,
        BinOp::Min,
        BinOp::Max,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BinOp::Add => "add",
            BinOp::Sub => "sub",
            BinOp::Mul => "mul",
            BinOp::Div => "div",
            BinOp::Min => "min",
            BinOp::Max => "max",
        }
    }

    fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            BinOp::Add => a + b,
            BinOp::Sub => a - b,
            BinOp::Mul => a * b,
            BinOp::Div => {
                if b.abs() > DIV_EPSILON {
                    a / b
                } else {
                    1.0
                }
            }
            BinOp::Min => a.min(b),
            BinOp::Max => a.max(b),
        }
    }
}

/// Expression tree over function set {add, sub, mul, protected div, min,
/// max, neg}, attribute terminals and constants.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr<A> {
    Const(f64),
    Attr(A),
    Neg(Box<Expr<A>>),
    Bin(BinOp, Box<Expr<A>>, Box<Expr<A>>),
}

impl<A: Attribute> Expr<A> {
    /// Levels; a lone terminal has depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Attr(_) => 1,
            Expr::Neg(x) => 1 + x.depth(),
            Expr::Bin(_, a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Attr(_) => 1,
            Expr::Neg(x) => 1 + x.size(),
            Expr::Bin(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Reference evaluation; the compiled [`Program`] must agree exactly.
    pub fn eval(&self, attrs: &[f64]) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Attr(a) => attrs[a.index()],
            Expr::Neg(x) => -x.eval(attrs),
            Expr::Bin(op, a, b) => op.apply(a.eval(attrs), b.eval(attrs)),
        }
    }

    /// Subtree at pre-order index (root = 0).
    pub fn subtree(&self, index: usize) -> &Expr<A> {
        fn walk<'a, A>(e: &'a Expr<A>, index: usize, next: &mut usize) -> Option<&'a Expr<A>> {
            if *next == index {
                return Some(e);
            }
            *next += 1;
            match e {
                Expr::Const(_) | Expr::Attr(_) => None,
                Expr::Neg(x) => walk(x, index, next),
                Expr::Bin(_, a, b) => walk(a, index, next).or_else(|| walk(b, index, next)),
            }
        }
        let mut next = 0;
        walk(self, index, &mut next).expect("index within size()")
    }

    /// Level (1-based) of the node at pre-order index.
    pub fn level_of(&self, index: usize) -> usize {
        fn walk<A>(e: &Expr<A>, index: usize, next: &mut usize, level: usize) -> Option<usize> {
            if *next == index {
                return Some(level);
            }
            *next += 1;
            match e {
                Expr::Const(_) | Expr::Attr(_) => None,
                Expr::Neg(x) => walk(x, index, next, level + 1),
                Expr::Bin(_, a, b) => {
                    walk(a, index, next, level + 1).or_else(|| walk(b, index, next, level + 1))
                }
            }
        }
        let mut next = 0;
        walk(self, index, &mut next, 1).expect("index within size()")
    }

    /// Copy of the tree with the subtree at pre-order `index` replaced.
    pub fn with_replaced(&self, index: usize, replacement: Expr<A>) -> Expr<A> {
        fn walk<A: Attribute>(
            e: &Expr<A>,
            index: usize,
            next: &mut usize,
            replacement: &mut Option<Expr<A>>,
        ) -> Expr<A> {
            if *next == index {
                // consume the replaced subtree's whole pre-order range so
                // right siblings keep their indices
                *next += e.size();
                return replacement.take().expect("single replacement site");
            }
            *next += 1;
            match e {
                Expr::Const(c) => Expr::Const(*c),
                Expr::Attr(a) => Expr::Attr(*a),
                Expr::Neg(x) => Expr::Neg(Box::new(walk(x, index, next, replacement))),
                Expr::Bin(op, a, b) => {
                    let left = walk(a, index, next, replacement);
                    let right = walk(b, index, next, replacement);
                    Expr::Bin(*op, Box::new(left), Box::new(right))
                }
            }
        }
        let mut next = 0;
        let mut replacement = Some(replacement);
        walk(self, index, &mut next, &mut replacement)
    }

    pub fn compile(&self) -> Program {
        let mut code = Vec::with_capacity(self.size());
        fn emit<A: Attribute>(e: &Expr<A>, code: &mut Vec<Op>) {
            match e {
                Expr::Const(c) => code.push(Op::Const(*c)),
                Expr::Attr(a) => code.push(Op::Attr(a.index() as u8)),
                Expr::Neg(x) => {
                    emit(x, code);
                    code.push(Op::Neg);
                }
                Expr::Bin(op, a, b) => {
                    emit(a, code);
                    emit(b, code);
                    code.push(Op::Bin(*op));
                }
            }
        }
        emit(self, &mut code);
        Program::new(code)
    }

    pub fn to_sexpr(&self) -> String {
        sexpr::print(self)
    }

    pub fn from_sexpr(text: &str) -> Result<Self, ParseError> {
        sexpr::parse(text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Const(f64),
    Attr(u8),
    Neg,
    Bin(BinOp),
}

const MAX_EVAL_STACK: usize = 64;

/// Flat postfix form of an expression tree for hot-loop evaluation.
#[derive(Debug, Clone)]
pub struct Program {
    code: Vec<Op>,
    max_stack: usize,
}

impl Program {
    fn new(code: Vec<Op>) -> Self {
        let mut depth = 0usize;
        let mut max_depth = 0usize;
        for op in &code {
            match op {
                Op::Const(_) | Op::Attr(_) => depth += 1,
                Op::Neg => {}
                Op::Bin(_) => depth -= 1,
            }
            max_depth = max_depth.max(depth);
        }
        assert!(
            max_depth <= MAX_EVAL_STACK,
            "expression too deep to compile ({max_depth} operands live)"
        );
        Program {
            code,
            max_stack: max_depth,
        }
    }

    pub fn eval(&self, attrs: &[f64]) -> f64 {
        let mut stack = [0.0f64; MAX_EVAL_STACK];
        let mut top = 0usize;
        for op in &self.code {
            match op {
                Op::Const(c) => {
                    stack[top] = *c;
                    top += 1;
                }
                Op::Attr(i) => {
                    stack[top] = attrs[*i as usize];
                    top += 1;
                }
                Op::Neg => stack[top - 1] = -stack[top - 1],
                Op::Bin(op) => {
                    let b = stack[top - 1];
                    let a = stack[top - 2];
                    top -= 1;
                    stack[top - 1] = op.apply(a, b);
                }
            }
        }
        stack[0]
    }

    /// Evaluation with the non-finite sentinel applied: any NaN or infinity
    /// becomes +infinity, the worst possible priority. Never fails.
    pub fn priority(&self, attrs: &[f64]) -> f64 {
        let v = self.eval(attrs);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    }

    /// Sentinel-mapped priorities for every row of a candidate-major
    /// attribute matrix (`attrs.len() = rows * stride`), bit-identical to
    /// calling [`Program::priority`] per row. The ops loop is hoisted
    /// outside the row loop so the arithmetic vectorises; `scratch` is
    /// resized as needed and may be reused across calls.
    pub fn priorities_into(
        &self,
        attrs: &[f64],
        stride: usize,
        scratch: &mut Vec<f64>,
        out: &mut Vec<f64>,
    ) {
        let rows = attrs.len() / stride;
        scratch.clear();
        scratch.resize(self.max_stack.max(1) * rows, 0.0);
        let mut top = 0usize;
        for op in &self.code {
            match op {
                Op::Const(c) => {
                    scratch[top * rows..(top + 1) * rows].fill(*c);
                    top += 1;
                }
                Op::Attr(i) => {
                    let slot = &mut scratch[top * rows..(top + 1) * rows];
                    for (r, v) in slot.iter_mut().enumerate() {
                        *v = attrs[r * stride + *i as usize];
                    }
                    top += 1;
                }
                Op::Neg => {
                    for v in &mut scratch[(top - 1) * rows..top * rows] {
                        *v = -*v;
                    }
                }
                Op::Bin(op) => {
                    let (lo, hi) = scratch.split_at_mut((top - 1) * rows);
                    let a = &mut lo[(top - 2) * rows..];
                    let b = &hi[..rows];
                    match op {
                        BinOp::Add => a.iter_mut().zip(b).for_each(|(x, y)| *x += y),
                        BinOp::Sub => a.iter_mut().zip(b).for_each(|(x, y)| *x -= y),
                        BinOp::Mul => a.iter_mut().zip(b).for_each(|(x, y)| *x *= y),
                        BinOp::Div => a.iter_mut().zip(b).for_each(|(x, y)| {
                            *x = if y.abs() > DIV_EPSILON { *x / y } else { 1.0 }
                        }),
                        BinOp::Min => a.iter_mut().zip(b).for_each(|(x, y)| *x = x.min(*y)),
                        BinOp::Max => a.iter_mut().zip(b).for_each(|(x, y)| *x = x.max(*y)),
                    }
                    top -= 1;
                }
            }
        }
        out.clear();
        out.extend(
            scratch[..rows]
                .iter()
                .map(|&v| if v.is_finite() { v } else { f64::INFINITY }),
        );
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowMethod {
    Grow,
    Full,
}

/// Random tree of at most `depth` levels; `Full` places functions down to
/// the depth bound, `Grow` mixes functions and terminals Koza-style.
/// Ephemeral constants are drawn uniformly from [-1, 1].
pub fn random_tree<A: Attribute, R: Rng + ?Sized>(
    rng: &mut R,
    method: GrowMethod,
    depth: usize,
) -> Expr<A> {
    let n_terms = A::ALL.len() + 1; // attributes plus the constant slot
    let n_funcs = BinOp::ALL.len() + 1; // binaries plus neg
    let terminal = |rng: &mut R| -> Expr<A> {
        let t = rng.gen_range(0..n_terms);
        if t < A::ALL.len() {
            Expr::Attr(A::ALL[t])
        } else {
            Expr::Const(rng.gen_range(-1.0..=1.0))
        }
    };
    fn function<A: Attribute, R: Rng + ?Sized>(
        rng: &mut R,
        method: GrowMethod,
        remaining: usize,
        n_terms: usize,
        n_funcs: usize,
        terminal: &impl Fn(&mut R) -> Expr<A>,
    ) -> Expr<A> {
        let f = rng.gen_range(0..n_funcs);
        let child = |rng: &mut R| grow_node(rng, method, remaining - 1, n_terms, n_funcs, terminal);
        if f < BinOp::ALL.len() {
            let op = BinOp::ALL[f];
            let a = child(rng);
            let b = child(rng);
            Expr::Bin(op, Box::new(a), Box::new(b))
        } else {
            Expr::Neg(Box::new(child(rng)))
        }
    }
    fn grow_node<A: Attribute, R: Rng + ?Sized>(
        rng: &mut R,
        method: GrowMethod,
        remaining: usize,
        n_terms: usize,
        n_funcs: usize,
        terminal: &impl Fn(&mut R) -> Expr<A>,
    ) -> Expr<A> {
        if remaining <= 1 {
            return terminal(rng);
        }
        match method {
            GrowMethod::Full => function(rng, method, remaining, n_terms, n_funcs, terminal),
            GrowMethod::Grow => {
                if rng.gen_range(0..n_terms + n_funcs) < n_funcs {
                    function(rng, method, remaining, n_terms, n_funcs, terminal)
                } else {
                    terminal(rng)
                }
            }
        }
    }
    grow_node(rng, method, depth.max(1), n_terms, n_funcs, &terminal)
}

/// A GP individual's genotype: the two heuristic trees.
#[derive(Debug, Clone, PartialEq)]
pub struct RulePair {
    pub ordering: Expr<PairAttr>,
    pub group: Expr<GroupAttr>,
}

impl RulePair {
    pub fn compile(&self) -> CompiledRules {
        CompiledRules {
            ordering: self.ordering.compile(),
            group: self.group.compile(),
        }
    }
}

/// Compiled form used by the simulator and the phenotype mapper.
#[derive(Debug, Clone)]
pub struct CompiledRules {
    pub ordering: Program,
    pub group: Program,
}

/// Fixed human-designed rules used to drive decision-situation sampling:
/// order by expected duration over (1 + successor count), so short jobs
/// unlocking much work go first; select the group with the largest mean
/// demand fraction, so resources are loaded eagerly.
pub fn reference_rules() -> RulePair {
    let ordering = Expr::Bin(
        BinOp::Div,
        Box::new(Expr::Attr(PairAttr::ExpectedDuration)),
        Box::new(Expr::Bin(
            BinOp::Add,
            Box::new(Expr::Const(1.0)),
            Box::new(Expr::Attr(PairAttr::SuccessorCount)),
        )),
    );
    let group = Expr::Neg(Box::new(Expr::Attr(GroupAttr::MeanDemandFraction)));
    RulePair { ordering, group }
}

impl Serialize for RulePair {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            ordering: &'a str,
            group: &'a str,
        }
        Repr {
            ordering: &self.ordering.to_sexpr(),
            group: &self.group.to_sexpr(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RulePair {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            ordering: String,
            group: String,
        }
        let repr = Repr::deserialize(deserializer)?;
        Ok(RulePair {
            ordering: Expr::from_sexpr(&repr.ordering).map_err(D::Error::custom)?,
            group: Expr::from_sexpr(&repr.group).map_err(D::Error::custom)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn attr(a: PairAttr) -> Expr<PairAttr> {
        Expr::Attr(a)
    }

    fn pair_vec(exp: f64, succ: f64) -> [f64; PAIR_ATTR_COUNT] {
        let mut v = [0.0; PAIR_ATTR_COUNT];
        v[PairAttr::ExpectedDuration.index()] = exp;
        v[PairAttr::SuccessorCount.index()] = succ;
        v
    }

    #[test]
    fn terminal_reads_attribute() {
        let tree = attr(PairAttr::ExpectedDuration);
        assert_eq!(tree.compile().priority(&pair_vec(7.0, 0.0)), 7.0);
    }

    #[test]
    fn protected_division_by_zero_returns_one() {
        let tree = Expr::Bin(
            BinOp::Div,
            Box::new(attr(PairAttr::ExpectedDuration)),
            Box::new(Expr::Const(0.0)),
        );
        assert_eq!(tree.compile().priority(&pair_vec(3.0, 0.0)), 1.0);
        // |b| just above the threshold divides normally
        let tree: Expr<PairAttr> = Expr::Bin(
            BinOp::Div,
            Box::new(Expr::Const(2.0)),
            Box::new(Expr::Const(1e-8)),
        );
        assert_eq!(tree.compile().eval(&pair_vec(0.0, 0.0)), 2.0 / 1e-8);
    }

    #[test]
    fn min_of_attributes() {
        let tree = Expr::Bin(
            BinOp::Min,
            Box::new(attr(PairAttr::ExpectedDuration)),
            Box::new(attr(PairAttr::SuccessorCount)),
        );
        assert_eq!(tree.compile().priority(&pair_vec(7.0, 3.0)), 3.0);
    }

    #[test]
    fn sentinel_maps_non_finite_to_infinity() {
        // overflow: (1e308 + 1e308)
        let tree: Expr<PairAttr> = Expr::Bin(
            BinOp::Add,
            Box::new(Expr::Const(1e308)),
            Box::new(Expr::Const(1e308)),
        );
        assert_eq!(
            tree.compile().priority(&[0.0; PAIR_ATTR_COUNT]),
            f64::INFINITY
        );
        // inf - inf = NaN also maps to +inf
        let tree: Expr<PairAttr> = Expr::Bin(BinOp::Sub, Box::new(tree.clone()), Box::new(tree));
        assert_eq!(
            tree.compile().priority(&[0.0; PAIR_ATTR_COUNT]),
            f64::INFINITY
        );
    }

    #[test]
    fn reference_ordering_examples() {
        let rules = reference_rules();
        let prog = rules.ordering.compile();
        assert_eq!(prog.priority(&pair_vec(6.0, 2.0)), 2.0);
        assert_eq!(prog.priority(&pair_vec(6.0, 0.0)), 6.0);
    }

    #[test]
    fn reference_group_rule_prefers_heavier_groups() {
        let rules = reference_rules();
        let prog = rules.group.compile();
        let mut heavy = [0.0; GROUP_ATTR_COUNT];
        heavy[GroupAttr::MeanDemandFraction.index()] = 0.8;
        let mut light = [0.0; GROUP_ATTR_COUNT];
        light[GroupAttr::MeanDemandFraction.index()] = 0.2;
        // hand-evaluated: -0.8 < -0.2, so the heavier group ranks first
        assert!(prog.priority(&heavy) < prog.priority(&light));
    }

    #[test]
    fn compiled_matches_reference_eval_on_random_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..200 {
            let depth = 2 + (i % 5);
            let method = if i % 2 == 0 {
                GrowMethod::Grow
            } else {
                GrowMethod::Full
            };
            let tree: Expr<PairAttr> = random_tree(&mut rng, method, depth);
            assert!(tree.depth() <= depth);
            let attrs: Vec<f64> = (0..PAIR_ATTR_COUNT)
                .map(|_| rng.gen_range(-10.0..10.0))
                .collect();
            let a = tree.eval(&attrs);
            let b = tree.compile().eval(&attrs);
            assert!(
                (a == b) || (a.is_nan() && b.is_nan()),
                "mismatch {a} vs {b} on {}",
                tree.to_sexpr()
            );
        }
    }

    #[test]
    fn batched_priorities_are_bit_identical_to_scalar() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut scratch = Vec::new();
        let mut out = Vec::new();
        for _ in 0..100 {
            let tree: Expr<PairAttr> = random_tree(&mut rng, GrowMethod::Grow, 6);
            let program = tree.compile();
            let rows = rng.gen_range(1..40);
            let attrs: Vec<f64> = (0..rows * PAIR_ATTR_COUNT)
                .map(|_| rng.gen_range(-50.0..50.0))
                .collect();
            program.priorities_into(&attrs, PAIR_ATTR_COUNT, &mut scratch, &mut out);
            assert_eq!(out.len(), rows);
            for r in 0..rows {
                let row = &attrs[r * PAIR_ATTR_COUNT..(r + 1) * PAIR_ATTR_COUNT];
                let scalar = program.priority(row);
                assert!(
                    out[r] == scalar,
                    "row {r}: batch {} vs scalar {scalar} on {}",
                    out[r],
                    tree.to_sexpr()
                );
            }
        }
    }

    #[test]
    fn full_trees_reach_exact_depth() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for depth in 2..=6 {
            let tree: Expr<PairAttr> = random_tree(&mut rng, GrowMethod::Full, depth);
            assert_eq!(tree.depth(), depth);
        }
    }

    #[test]
    fn subtree_replacement_preserves_structure() {
        let rules = reference_rules();
        let tree = rules.ordering;
        assert_eq!(tree.size(), 5);
        // replace the constant leaf (pre-order: div, exp_dur, add, 1, succ)
        let replaced = tree.with_replaced(3, Expr::Const(2.0));
        assert_eq!(replaced.to_sexpr(), "(div exp_dur (add 2.0 succ_count))");
        assert_eq!(tree.level_of(0), 1);
        assert_eq!(tree.level_of(3), 3);
        assert!(matches!(
            tree.subtree(1),
            Expr::Attr(PairAttr::ExpectedDuration)
        ));
    }

    #[test]
    fn purity_identical_trees_agree_everywhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let tree: Expr<PairAttr> = random_tree(&mut rng, GrowMethod::Grow, 6);
        let copy = tree.clone();
        for _ in 0..50 {
            let attrs: Vec<f64> = (0..PAIR_ATTR_COUNT)
                .map(|_| rng.gen_range(-100.0..100.0))
                .collect();
            let a = tree.compile().priority(&attrs);
            let b = copy.compile().priority(&attrs);
            assert!(a == b || (a.is_nan() && b.is_nan()));
        }
    }
}
