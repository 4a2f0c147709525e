//! JSON-lines dump of recorded decision points, one decision per line.

use super::{ActivityGroup, AmPair, DecisionRecord};
use serde::Serialize;
use std::io::Write;

#[derive(Serialize)]
struct TraceLine<'a> {
    time: u64,
    eligible: &'a [AmPair],
    priorities: &'a [f64],
    knee_subset: &'a [AmPair],
    groups: &'a [ActivityGroup],
    chosen: &'a ActivityGroup,
}

pub fn write_trace<W: Write>(records: &[DecisionRecord], mut out: W) -> std::io::Result<()> {
    for rec in records {
        let line = TraceLine {
            time: rec.time,
            eligible: &rec.eligible,
            priorities: &rec.priorities,
            knee_subset: &rec.knee_subset,
            groups: &rec.groups,
            chosen: &rec.groups[rec.chosen],
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
