//! Enumeration of maximal feasible activity groups from a candidate subset.

use super::AmPair;
use crate::project::InstanceContext;

/// All maximal feasible groups over `subset`: one mode per activity,
/// member demands fit `available` component-wise, and no candidate outside
/// the group could still be added. Depth-first, include-first enumeration
/// over the subset order makes the output deterministic; at most `cap`
/// groups are returned, the first `cap` in enumeration order.
pub fn enumerate_feasible_groups(
    ctx: &InstanceContext,
    subset: &[AmPair],
    available: &[u32],
    cap: usize,
) -> Vec<Vec<AmPair>> {
    let mut out = Vec::new();
    if subset.is_empty() || cap == 0 {
        return out;
    }
    let mut chosen: Vec<usize> = Vec::new();
    let mut activity_used = vec![false; ctx.instance.activity_count()];
    let mut remaining = available.to_vec();
    dfs(
        ctx,
        subset,
        0,
        &mut chosen,
        &mut activity_used,
        &mut remaining,
        cap,
        &mut out,
    );
    out
}

fn fits(ctx: &InstanceContext, pair: AmPair, activity_used: &[bool], remaining: &[u32]) -> bool {
    if activity_used[pair.activity] {
        return false;
    }
    ctx.instance
        .mode(pair.activity, pair.mode)
        .demand
        .iter()
        .zip(remaining)
        .all(|(d, r)| d <= r)
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    ctx: &InstanceContext,
    subset: &[AmPair],
    index: usize,
    chosen: &mut Vec<usize>,
    activity_used: &mut Vec<bool>,
    remaining: &mut Vec<u32>,
    cap: usize,
    out: &mut Vec<Vec<AmPair>>,
) {
    if out.len() >= cap {
        return;
    }
    if index == subset.len() {
        // maximal iff nothing excluded still fits
        let maximal = subset
            .iter()
            .enumerate()
            .all(|(i, &p)| chosen.contains(&i) || !fits(ctx, p, activity_used, remaining));
        if maximal {
            let mut members: Vec<AmPair> = chosen.iter().map(|&i| subset[i]).collect();
            members.sort();
            out.push(members);
        }
        return;
    }
    let pair = subset[index];
    if fits(ctx, pair, activity_used, remaining) {
        chosen.push(index);
        activity_used[pair.activity] = true;
        let demand = &ctx.instance.mode(pair.activity, pair.mode).demand;
        for (r, d) in remaining.iter_mut().zip(demand) {
            *r -= d;
        }
        dfs(
            ctx,
            subset,
            index + 1,
            chosen,
            activity_used,
            remaining,
            cap,
            out,
        );
        for (r, d) in remaining.iter_mut().zip(demand) {
            *r += d;
        }
        activity_used[pair.activity] = false;
        chosen.pop();
    }
    dfs(
        ctx,
        subset,
        index + 1,
        chosen,
        activity_used,
        remaining,
        cap,
        out,
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::project::{Activity, InstanceContext, Mode, ProjectInstance};

    fn ctx_with(capacity: u32, demands: &[Vec<u32>]) -> InstanceContext {
        // one activity per demand row, modes sharing the row
        let activities = demands
            .iter()
            .enumerate()
            .map(|(i, d)| Activity {
                id: i,
                predecessors: vec![],
                modes: d
                    .iter()
                    .map(|&x| Mode {
                        optimistic: 1,
                        expected: 1,
                        pessimistic: 1,
                        demand: vec![x],
                    })
                    .collect(),
            })
            .collect();
        InstanceContext::new(ProjectInstance {
            id: "groups".into(),
            capacities: vec![capacity],
            activities,
        })
        .unwrap()
    }

    fn pairs(list: &[(usize, usize)]) -> Vec<AmPair> {
        list.iter()
            .map(|&(activity, mode)| AmPair { activity, mode })
            .collect()
    }

    #[test]
    fn single_pair_single_group() {
        let ctx = ctx_with(4, &[vec![2]]);
        let out = enumerate_feasible_groups(&ctx, &pairs(&[(0, 0)]), &[4], 256);
        assert_eq!(out, vec![pairs(&[(0, 0)])]);
    }

    #[test]
    fn same_activity_modes_are_mutually_exclusive() {
        let ctx = ctx_with(4, &[vec![2, 1]]);
        let out = enumerate_feasible_groups(&ctx, &pairs(&[(0, 0), (0, 1)]), &[4], 256);
        assert_eq!(out, vec![pairs(&[(0, 0)]), pairs(&[(0, 1)])]);
    }

    #[test]
    fn capacity_six_with_three_demand_three() {
        let ctx = ctx_with(6, &[vec![3], vec![3], vec![3]]);
        let out = enumerate_feasible_groups(&ctx, &pairs(&[(0, 0), (1, 0), (2, 0)]), &[6], 256);
        assert_eq!(
            out,
            vec![
                pairs(&[(0, 0), (1, 0)]),
                pairs(&[(0, 0), (2, 0)]),
                pairs(&[(1, 0), (2, 0)]),
            ]
        );
    }

    #[test]
    fn cap_truncates_in_enumeration_order() {
        let ctx = ctx_with(6, &[vec![3], vec![3], vec![3]]);
        let out = enumerate_feasible_groups(&ctx, &pairs(&[(0, 0), (1, 0), (2, 0)]), &[6], 2);
        assert_eq!(out.len(), 2);
        assert_eq!(out[0], pairs(&[(0, 0), (1, 0)]));
        assert_eq!(out[1], pairs(&[(0, 0), (2, 0)]));
    }

    /// Power-set oracle: every feasible, maximal subset and nothing else.
    #[test]
    fn matches_power_set_oracle() {
        let demand_rows: Vec<Vec<u32>> =
            vec![vec![2, 3], vec![4, 5], vec![1, 2], vec![3, 4], vec![2, 6]];
        let ctx = ctx_with(6, &demand_rows);
        let subset: Vec<AmPair> = demand_rows
            .iter()
            .enumerate()
            .flat_map(|(a, modes)| {
                (0..modes.len()).map(move |m| AmPair {
                    activity: a,
                    mode: m,
                })
            })
            .collect();
        let available = vec![6u32];

        let demand_of = |p: AmPair| demand_rows[p.activity][p.mode];
        let feasible = |mask: usize| -> bool {
            let mut total = 0u32;
            let mut acts = std::collections::HashSet::new();
            for (i, &p) in subset.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    if !acts.insert(p.activity) {
                        return false;
                    }
                    total += demand_of(p);
                }
            }
            total <= available[0]
        };
        let mut oracle: Vec<Vec<AmPair>> = Vec::new();
        for mask in 1usize..(1 << subset.len()) {
            if !feasible(mask) {
                continue;
            }
            let maximal =
                (0..subset.len()).all(|i| mask & (1 << i) != 0 || !feasible(mask | (1 << i)));
            if maximal {
                let mut members: Vec<AmPair> = subset
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &p)| p)
                    .collect();
                members.sort();
                oracle.push(members);
            }
        }
        oracle.sort();

        let mut got = enumerate_feasible_groups(&ctx, &subset, &available, 10_000);
        got.sort();
        assert_eq!(got, oracle);
    }
}
