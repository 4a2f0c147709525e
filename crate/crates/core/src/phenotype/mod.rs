//! Rank-based behavioural characterisation of rule pairs.
//!
//! A fixed set of decision situations is sampled once per run from a
//! reference simulation and frozen. Characterising an individual evaluates
//! the matching tree on every candidate of every situation and records the
//! competition ranks (rank 1 = smallest priority; ties share the minimum
//! rank of their block). Concatenating the per-situation rank segments
//! yields the individual's characterisation vector, which is what the
//! surrogate measures distances on.

use crate::project::InstanceContext;
use crate::rules::{group_attrs, pair_attrs, CompiledRules, RulePair, StateView};
use crate::seeds::{self, fnv1a};
use crate::sim::{simulate, ActivityGroup, AmPair, SimOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SituationKind {
    Ordering,
    GroupSelection,
}

impl SituationKind {
    pub fn label(self) -> &'static str {
        match self {
            SituationKind::Ordering => "ordering",
            SituationKind::GroupSelection => "group_selection",
        }
    }
}

/// The frozen slice of project state a situation needs for attribute
/// computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSnapshot {
    pub time: u64,
    pub available: Vec<u32>,
    pub eligible_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "items", rename_all = "snake_case")]
pub enum Candidates {
    Pairs(Vec<AmPair>),
    Groups(Vec<ActivityGroup>),
}

impl Candidates {
    pub fn len(&self) -> usize {
        match self {
            Candidates::Pairs(p) => p.len(),
            Candidates::Groups(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A frozen decision situation: snapshot plus candidate list in canonical
/// order, with per-candidate attribute vectors cached at construction in a
/// flat row-major matrix.
#[derive(Debug, Clone)]
pub struct DecisionSituation {
    pub kind: SituationKind,
    pub instance_index: usize,
    pub instance_id: String,
    pub state: StateSnapshot,
    pub candidates: Candidates,
    attrs: Vec<f64>,
    attr_stride: usize,
}

impl DecisionSituation {
    pub fn new(
        ctx: &InstanceContext,
        instance_index: usize,
        state: StateSnapshot,
        candidates: Candidates,
    ) -> Self {
        let view = StateView {
            time: state.time,
            available: &state.available,
            eligible_count: state.eligible_count,
        };
        let (attrs, attr_stride) = match &candidates {
            Candidates::Pairs(pairs) => {
                let mut flat = Vec::with_capacity(pairs.len() * crate::rules::PAIR_ATTR_COUNT);
                for p in pairs {
                    flat.extend_from_slice(&pair_attrs(ctx, &view, p.activity, p.mode));
                }
                (flat, crate::rules::PAIR_ATTR_COUNT)
            }
            Candidates::Groups(groups) => {
                let mut flat = Vec::with_capacity(groups.len() * crate::rules::GROUP_ATTR_COUNT);
                for g in groups {
                    flat.extend_from_slice(&group_attrs(
                        ctx,
                        &view,
                        g.iter().map(|p| (p.activity, p.mode)),
                    ));
                }
                (flat, crate::rules::GROUP_ATTR_COUNT)
            }
        };
        DecisionSituation {
            kind: candidates_kind(&candidates),
            instance_index,
            instance_id: ctx.instance.id.clone(),
            state,
            candidates,
            attrs,
            attr_stride,
        }
    }

    pub fn candidate_count(&self) -> usize {
        self.candidates.len()
    }

    pub fn candidate_attrs(&self, i: usize) -> &[f64] {
        &self.attrs[i * self.attr_stride..(i + 1) * self.attr_stride]
    }
}

fn candidates_kind(c: &Candidates) -> SituationKind {
    match c {
        Candidates::Pairs(_) => SituationKind::Ordering,
        Candidates::Groups(_) => SituationKind::GroupSelection,
    }
}

/// Concatenated per-situation rank segments. Equality and hashing consider
/// the rank sequence only.
#[derive(Debug, Clone)]
pub struct PcVector {
    ranks: Vec<u16>,
    offsets: Vec<u32>,
}

impl PcVector {
    pub fn from_segments(segments: Vec<Vec<u16>>) -> Self {
        let mut ranks = Vec::new();
        let mut offsets = Vec::with_capacity(segments.len() + 1);
        offsets.push(0);
        for seg in segments {
            ranks.extend_from_slice(&seg);
            offsets.push(ranks.len() as u32);
        }
        PcVector { ranks, offsets }
    }

    pub fn ranks(&self) -> &[u16] {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn segment_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn segment(&self, i: usize) -> &[u16] {
        &self.ranks[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    /// Key for duplicate detection: equal iff the rank sequences are equal.
    pub fn dedup_key(&self) -> PcKey {
        PcKey(self.ranks.clone())
    }
}

impl PartialEq for PcVector {
    fn eq(&self, other: &Self) -> bool {
        self.ranks == other.ranks
    }
}

impl Eq for PcVector {}

impl std::hash::Hash for PcVector {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ranks.hash(state);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PcKey(Vec<u16>);

/// Competition ranking: rank(i) = 1 + |{j : p_j < p_i}|; tied blocks share
/// the minimum rank. Ranks of distinct priorities form a permutation of
/// 1..=m.
pub fn competition_ranks(priorities: &[f64]) -> Vec<u16> {
    let mut out = vec![0u16; priorities.len()];
    let mut order: Vec<usize> = (0..priorities.len()).collect();
    rank_into(priorities, &mut order, &mut out);
    out
}

/// Writes competition ranks of `priorities` into `ranks`, reusing `order`
/// as scratch.
fn rank_into(priorities: &[f64], order: &mut Vec<usize>, ranks: &mut [u16]) {
    let m = priorities.len();
    order.clear();
    order.extend(0..m);
    order.sort_by(|&a, &b| priorities[a].total_cmp(&priorities[b]).then(a.cmp(&b)));
    let mut i = 0;
    while i < m {
        let mut j = i;
        while j + 1 < m && priorities[order[j + 1]] == priorities[order[i]] {
            j += 1;
        }
        let rank = (i + 1) as u16;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
}

/// Maps an individual to its characterisation vector over the fixed
/// situation set. Pure: identical inputs give identical vectors on any
/// thread. Sentinel (+infinity) priorities rank last.
pub fn characterise(rules: &CompiledRules, situations: &[DecisionSituation]) -> PcVector {
    let total: usize = situations.iter().map(|s| s.candidate_count()).sum();
    let mut ranks = vec![0u16; total];
    let mut offsets = Vec::with_capacity(situations.len() + 1);
    offsets.push(0u32);
    let mut priorities: Vec<f64> = Vec::new();
    let mut order: Vec<usize> = Vec::new();
    let mut scratch: Vec<f64> = Vec::new();
    let mut base = 0usize;
    for sit in situations {
        let program = match sit.kind {
            SituationKind::Ordering => &rules.ordering,
            SituationKind::GroupSelection => &rules.group,
        };
        let m = sit.candidate_count();
        program.priorities_into(&sit.attrs, sit.attr_stride, &mut scratch, &mut priorities);
        rank_into(&priorities, &mut order, &mut ranks[base..base + m]);
        base += m;
        offsets.push(base as u32);
    }
    PcVector { ranks, offsets }
}

/// Convenience over [`characterise`] for uncompiled rule pairs.
pub fn characterise_pair(pair: &RulePair, situations: &[DecisionSituation]) -> PcVector {
    characterise(&pair.compile(), situations)
}

#[derive(Debug, Clone)]
pub struct SituationSet {
    pub situations: Vec<DecisionSituation>,
    /// The candidate-count threshold the sampler ended up using after any
    /// relaxation.
    pub effective_min_candidates: usize,
}

impl SituationSet {
    pub fn pc_len(&self) -> usize {
        self.situations.iter().map(|s| s.candidate_count()).sum()
    }
}

#[derive(Debug, Error)]
pub enum SamplingError {
    #[error(
        "could not sample {per_kind} decision situations per kind even after relaxing the \
         candidate minimum from {requested_min} down to 2: found {ordering_found} ordering and \
         {group_found} group-selection situations; scarcest kind: {scarcest}"
    )]
    Insufficient {
        per_kind: usize,
        requested_min: usize,
        ordering_found: usize,
        group_found: usize,
        scarcest: &'static str,
    },
}

/// Runs the reference rules with tracing over the given instances —
/// `replications` stochastic realizations per instance — keeps all decision
/// points with at least `min_candidates` candidates of each kind, and
/// uniformly samples `per_kind` situations of each kind without replacement.
/// If either kind falls short, the candidate minimum is lowered one step at
/// a time (down to 2) before giving up. Deterministic in `seed`.
pub fn sample_situations(
    ctxs: &[&InstanceContext],
    reference: &RulePair,
    per_kind: usize,
    min_candidates: usize,
    replications: usize,
    seed: u64,
    group_cap: usize,
) -> Result<SituationSet, SamplingError> {
    assert!(per_kind >= 1, "per_kind must be at least 1");
    assert!(replications >= 1, "need at least one reference simulation");
    let compiled = reference.compile();
    let options = SimOptions {
        group_cap,
        record_trace: true,
    };
    // (instance index, record) in chronological order per realization
    let mut records = Vec::new();
    for (idx, ctx) in ctxs.iter().enumerate() {
        for replication in 0..replications {
            let mut rng = ChaCha8Rng::seed_from_u64(seeds::derive(
                seed,
                &[1, idx as u64, replication as u64],
            ));
            let result = simulate(ctx, &compiled, &options, &mut rng);
            for rec in result.decision_trace.expect("tracing enabled") {
                records.push((idx, rec));
            }
        }
    }

    let mut chosen_threshold = None;
    for t in (2..=min_candidates.max(2)).rev() {
        let ordering = pool_indices(&records, t, SituationKind::Ordering);
        let groups = pool_indices(&records, t, SituationKind::GroupSelection);
        if ordering.len() >= per_kind && groups.len() >= per_kind {
            chosen_threshold = Some((t, ordering, groups));
            break;
        }
    }
    let Some((threshold, ordering_pool, group_pool)) = chosen_threshold else {
        let ordering_found = pool_indices(&records, 2, SituationKind::Ordering).len();
        let group_found = pool_indices(&records, 2, SituationKind::GroupSelection).len();
        return Err(SamplingError::Insufficient {
            per_kind,
            requested_min: min_candidates,
            ordering_found,
            group_found,
            scarcest: if ordering_found <= group_found {
                SituationKind::Ordering.label()
            } else {
                SituationKind::GroupSelection.label()
            },
        });
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seeds::derive(seed, &[2]));
    let ordering_picks = sample_without_replacement(&ordering_pool, per_kind, &mut rng);
    let group_picks = sample_without_replacement(&group_pool, per_kind, &mut rng);

    let mut situations = Vec::with_capacity(2 * per_kind);
    for &i in &ordering_picks {
        let (instance_index, rec) = &records[i];
        let ctx = ctxs[*instance_index];
        situations.push(DecisionSituation::new(
            ctx,
            *instance_index,
            StateSnapshot {
                time: rec.time,
                available: rec.available.clone(),
                eligible_count: rec.eligible.len(),
            },
            Candidates::Pairs(rec.eligible.clone()),
        ));
    }
    for &i in &group_picks {
        let (instance_index, rec) = &records[i];
        let ctx = ctxs[*instance_index];
        let mut groups = rec.groups.clone();
        groups.sort();
        situations.push(DecisionSituation::new(
            ctx,
            *instance_index,
            StateSnapshot {
                time: rec.time,
                available: rec.available.clone(),
                eligible_count: rec.eligible.len(),
            },
            Candidates::Groups(groups),
        ));
    }
    Ok(SituationSet {
        situations,
        effective_min_candidates: threshold,
    })
}

fn pool_indices(
    records: &[(usize, crate::sim::DecisionRecord)],
    threshold: usize,
    kind: SituationKind,
) -> Vec<usize> {
    records
        .iter()
        .enumerate()
        .filter(|(_, (_, rec))| match kind {
            SituationKind::Ordering => rec.eligible.len() >= threshold,
            SituationKind::GroupSelection => rec.groups.len() >= threshold,
        })
        .map(|(i, _)| i)
        .collect()
}

/// Uniform sample of `count` pool entries without replacement, returned in
/// chronological (pool) order.
fn sample_without_replacement<R: Rng>(pool: &[usize], count: usize, rng: &mut R) -> Vec<usize> {
    let mut indices: Vec<usize> = pool.to_vec();
    for k in 0..count.min(indices.len()) {
        let j = rng.gen_range(k..indices.len());
        indices.swap(k, j);
    }
    let mut picked: Vec<usize> = indices.into_iter().take(count).collect();
    picked.sort_unstable();
    picked
}

// --- serialization -------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BundleRecord {
    instance_id: String,
    instance_index: usize,
    kind: SituationKind,
    state: StateSnapshot,
    candidates: Candidates,
    digest: String,
}

/// Serialized situation set; reloadable to reproduce characterisation
/// vectors bit-exactly given the same instances.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SituationBundle {
    pub effective_min_candidates: usize,
    situations: Vec<BundleRecord>,
}

#[derive(Debug, Error)]
pub enum BundleError {
    #[error(
        "situation {index}: instance id `{found}` does not match loaded instance `{expected}`"
    )]
    InstanceMismatch {
        index: usize,
        expected: String,
        found: String,
    },
    #[error("situation {index}: instance_index {found} out of range ({available} instances)")]
    IndexOutOfRange {
        index: usize,
        found: usize,
        available: usize,
    },
    #[error("situation {index}: digest mismatch, bundle is corrupt")]
    DigestMismatch { index: usize },
    #[error("failed to parse situation bundle: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn situation_digest(
    instance_id: &str,
    kind: SituationKind,
    state: &StateSnapshot,
    candidates: &Candidates,
) -> String {
    let canonical = serde_json::to_string(&(instance_id, kind, state, candidates))
        .expect("situation serializes");
    format!("{:016x}", fnv1a(canonical.as_bytes()))
}

impl SituationSet {
    pub fn to_bundle(&self) -> SituationBundle {
        SituationBundle {
            effective_min_candidates: self.effective_min_candidates,
            situations: self
                .situations
                .iter()
                .map(|s| BundleRecord {
                    instance_id: s.instance_id.clone(),
                    instance_index: s.instance_index,
                    kind: s.kind,
                    state: s.state.clone(),
                    candidates: s.candidates.clone(),
                    digest: situation_digest(&s.instance_id, s.kind, &s.state, &s.candidates),
                })
                .collect(),
        }
    }

    pub fn from_bundle(
        bundle: SituationBundle,
        ctxs: &[&InstanceContext],
    ) -> Result<Self, BundleError> {
        let mut situations = Vec::with_capacity(bundle.situations.len());
        for (index, rec) in bundle.situations.into_iter().enumerate() {
            if rec.instance_index >= ctxs.len() {
                return Err(BundleError::IndexOutOfRange {
                    index,
                    found: rec.instance_index,
                    available: ctxs.len(),
                });
            }
            let ctx = ctxs[rec.instance_index];
            if ctx.instance.id != rec.instance_id {
                return Err(BundleError::InstanceMismatch {
                    index,
                    expected: ctx.instance.id.clone(),
                    found: rec.instance_id,
                });
            }
            let digest = situation_digest(&rec.instance_id, rec.kind, &rec.state, &rec.candidates);
            if digest != rec.digest {
                return Err(BundleError::DigestMismatch { index });
            }
            situations.push(DecisionSituation::new(
                ctx,
                rec.instance_index,
                rec.state,
                rec.candidates,
            ));
        }
        Ok(SituationSet {
            situations,
            effective_min_candidates: bundle.effective_min_candidates,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), BundleError> {
        let mut text = serde_json::to_string_pretty(&self.to_bundle())?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path, ctxs: &[&InstanceContext]) -> Result<Self, BundleError> {
        let text = std::fs::read_to_string(path)?;
        let bundle: SituationBundle = serde_json::from_str(&text)?;
        Self::from_bundle(bundle, ctxs)
    }
}

/// First-occurrence duplicate filter over characterisation vectors; returns
/// the indices of kept entries in input order.
pub fn unique_by_pc(pcs: &[PcVector]) -> Vec<usize> {
    let mut seen: HashMap<&[u16], usize> = HashMap::with_capacity(pcs.len());
    let mut kept = Vec::with_capacity(pcs.len());
    for (i, pc) in pcs.iter().enumerate() {
        if !seen.contains_key(pc.ranks()) {
            seen.insert(pc.ranks(), i);
            kept.push(i);
        }
    }
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::project::{generate_instance, InstanceContext, ScenarioConfig};
    use crate::rules::{random_tree, reference_rules, BinOp, Expr, GrowMethod};

    fn desk_ctx(seed: u64) -> InstanceContext {
        let cfg = ScenarioConfig {
            activity_count: 40,
            target_order_strength: 0.3,
            ..ScenarioConfig::default()
        };
        InstanceContext::new(generate_instance(&cfg, seed).unwrap()).unwrap()
    }

    #[test]
    fn ranks_of_distinct_priorities() {
        assert_eq!(competition_ranks(&[0.2, 0.9, 0.5]), vec![1, 3, 2]);
    }

    #[test]
    fn full_tie_shares_rank_one() {
        assert_eq!(competition_ranks(&[5.0, 5.0, 5.0]), vec![1, 1, 1]);
    }

    #[test]
    fn partial_ties_share_block_minimum() {
        assert_eq!(competition_ranks(&[1.0, 0.5, 0.5, 2.0]), vec![3, 1, 1, 4]);
        assert_eq!(
            competition_ranks(&[f64::INFINITY, 1.0, f64::INFINITY]),
            vec![2, 1, 2]
        );
    }

    #[test]
    fn sampling_yields_two_kinds_in_canonical_order() {
        let ctx = desk_ctx(1);
        let set = sample_situations(&[&ctx], &reference_rules(), 3, 4, 2, 7, 256).unwrap();
        assert_eq!(set.situations.len(), 6);
        assert!(set.situations[..3]
            .iter()
            .all(|s| s.kind == SituationKind::Ordering));
        assert!(set.situations[3..]
            .iter()
            .all(|s| s.kind == SituationKind::GroupSelection));
        for s in &set.situations {
            assert!(s.candidate_count() >= set.effective_min_candidates);
        }
        // deterministic in the seed
        let again = sample_situations(&[&ctx], &reference_rules(), 3, 4, 2, 7, 256).unwrap();
        let pc_a = characterise_pair(&reference_rules(), &set.situations);
        let pc_b = characterise_pair(&reference_rules(), &again.situations);
        assert_eq!(pc_a, pc_b);
    }

    #[test]
    fn wide_instance_with_per_kind_one_yields_two_situations() {
        // no precedence, ample capacity: the first decision point qualifies
        let cfg = ScenarioConfig {
            activity_count: 12,
            target_order_strength: 0.0,
            capacity_tightness: 3.0,
            ..ScenarioConfig::default()
        };
        let ctx = InstanceContext::new(generate_instance(&cfg, 2).unwrap()).unwrap();
        let set = sample_situations(&[&ctx], &reference_rules(), 1, 2, 2, 3, 256).unwrap();
        assert_eq!(set.situations.len(), 2);
    }

    #[test]
    fn chain_instance_fails_with_diagnostic() {
        // single-mode chain: exactly one eligible pair everywhere, so no
        // ordering situation can reach even two candidates
        use crate::project::{Activity, Mode, ProjectInstance};
        let activities = (0..5)
            .map(|i| Activity {
                id: i,
                predecessors: if i == 0 { vec![] } else { vec![i - 1] },
                modes: vec![Mode {
                    optimistic: 2,
                    expected: 2,
                    pessimistic: 2,
                    demand: vec![1],
                }],
            })
            .collect();
        let ctx = InstanceContext::new(ProjectInstance {
            id: "chain".into(),
            capacities: vec![1],
            activities,
        })
        .unwrap();
        let err = sample_situations(&[&ctx], &reference_rules(), 2, 10, 2, 5, 256).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("scarcest kind: ordering"), "{text}");
    }

    #[test]
    fn rank_segments_are_permutations_for_distinct_priorities() {
        let ctx = desk_ctx(3);
        let set = sample_situations(&[&ctx], &reference_rules(), 5, 4, 2, 11, 256).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let pair = RulePair {
                ordering: random_tree(&mut rng, GrowMethod::Grow, 5),
                group: random_tree(&mut rng, GrowMethod::Grow, 5),
            };
            let pc = characterise_pair(&pair, &set.situations);
            assert_eq!(pc.segment_count(), set.situations.len());
            for i in 0..pc.segment_count() {
                let seg = pc.segment(i);
                let m = seg.len();
                assert_eq!(m, set.situations[i].candidate_count());
                let mut sorted = seg.to_vec();
                sorted.sort_unstable();
                assert_eq!(sorted[0], 1, "minimum rank is always 1");
                assert!(*sorted.last().unwrap() as usize <= m);
                let distinct = seg.iter().collect::<std::collections::HashSet<_>>();
                if distinct.len() == m {
                    // no ties: must be the permutation 1..=m
                    assert_eq!(sorted, (1..=m as u16).collect::<Vec<_>>());
                }
            }
        }
    }

    #[test]
    fn strictly_increasing_transform_preserves_pc() {
        let ctx = desk_ctx(4);
        let set = sample_situations(&[&ctx], &reference_rules(), 4, 4, 2, 13, 256).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        fn scaled<A: crate::rules::Attribute>(e: Expr<A>) -> Expr<A> {
            Expr::Bin(
                BinOp::Add,
                Box::new(Expr::Bin(
                    BinOp::Mul,
                    Box::new(Expr::Const(2.0)),
                    Box::new(e),
                )),
                Box::new(Expr::Const(1.0)),
            )
        }
        for _ in 0..40 {
            let ordering = random_tree(&mut rng, GrowMethod::Grow, 5);
            let group = random_tree(&mut rng, GrowMethod::Grow, 5);
            let base = RulePair {
                ordering: ordering.clone(),
                group: group.clone(),
            };
            let transformed = RulePair {
                ordering: scaled(ordering),
                group: scaled(group),
            };
            assert_eq!(
                characterise_pair(&base, &set.situations),
                characterise_pair(&transformed, &set.situations)
            );
        }
    }

    #[test]
    fn behavioural_difference_changes_pc() {
        let ctx = desk_ctx(6);
        let set = sample_situations(&[&ctx], &reference_rules(), 3, 4, 2, 19, 256).unwrap();
        let a = RulePair {
            ordering: Expr::Attr(crate::rules::PairAttr::ExpectedDuration),
            group: reference_rules().group,
        };
        let b = RulePair {
            ordering: Expr::Neg(Box::new(Expr::Attr(
                crate::rules::PairAttr::ExpectedDuration,
            ))),
            group: reference_rules().group,
        };
        assert_ne!(
            characterise_pair(&a, &set.situations),
            characterise_pair(&b, &set.situations)
        );
    }

    #[test]
    fn dedup_keys_match_pairwise_comparison() {
        // ten thousand random trees on a small fixed situation set; the
        // unique-key count must equal the quadratic pairwise-distinct count
        let ctx = desk_ctx(8);
        let set = sample_situations(&[&ctx], &reference_rules(), 2, 4, 2, 23, 256).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        let pcs: Vec<PcVector> = (0..10_000)
            .map(|_| {
                let pair = RulePair {
                    ordering: random_tree(&mut rng, GrowMethod::Grow, 4),
                    group: random_tree(&mut rng, GrowMethod::Grow, 4),
                };
                characterise_pair(&pair, &set.situations)
            })
            .collect();
        let keys: std::collections::HashSet<PcKey> = pcs.iter().map(|p| p.dedup_key()).collect();
        // quadratic oracle
        let mut distinct: Vec<&PcVector> = Vec::new();
        for pc in &pcs {
            if !distinct.contains(&pc) {
                distinct.push(pc);
            }
        }
        assert_eq!(keys.len(), distinct.len());
        assert_eq!(unique_by_pc(&pcs).len(), distinct.len());
    }

    #[test]
    fn bundle_round_trip_reproduces_pc_bits() {
        let ctx = desk_ctx(9);
        let set = sample_situations(&[&ctx], &reference_rules(), 3, 4, 2, 31, 256).unwrap();
        let bundle = set.to_bundle();
        let text = serde_json::to_string(&bundle).unwrap();
        let parsed: SituationBundle = serde_json::from_str(&text).unwrap();
        let reloaded = SituationSet::from_bundle(parsed, &[&ctx]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(37);
        for _ in 0..20 {
            let pair = RulePair {
                ordering: random_tree(&mut rng, GrowMethod::Grow, 5),
                group: random_tree(&mut rng, GrowMethod::Grow, 5),
            };
            assert_eq!(
                characterise_pair(&pair, &set.situations),
                characterise_pair(&pair, &reloaded.situations)
            );
        }
    }

    #[test]
    fn bundle_rejects_corruption_and_mismatch() {
        let ctx = desk_ctx(10);
        let other = desk_ctx(11);
        let set = sample_situations(&[&ctx], &reference_rules(), 2, 4, 2, 41, 256).unwrap();
        let bundle = set.to_bundle();
        assert!(matches!(
            SituationSet::from_bundle(bundle.clone(), &[&other]),
            Err(BundleError::InstanceMismatch { .. })
        ));
        let mut corrupt = bundle;
        corrupt.situations[0].state.time += 1;
        assert!(matches!(
            SituationSet::from_bundle(corrupt, &[&ctx]),
            Err(BundleError::DigestMismatch { .. })
        ));
    }
}
