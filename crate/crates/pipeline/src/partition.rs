use buoyspec::inference::SeaStateSample;

use crate::config::PipelineConfig;
use crate::error::Result;
use crate::record::RecordFile;

#[derive(Debug, Clone, PartialEq)]
pub struct SeaState {
    pub index: usize,
    /// Time label of the first row.
    pub start_time: String,
    /// Data row (1-based) of the first sample.
    pub first_row: usize,
    /// Mean-removed displacements.
    pub sample: SeaStateSample,
}

/// Cuts the record into consecutive windows of `sea_state_duration`
/// seconds. Windows are aligned with the first sample; a window touching a
/// gap and the incomplete trailing window are dropped with a log message.
pub fn partition_sea_states(record: &RecordFile, config: &PipelineConfig) -> Result<Vec<SeaState>> {
    let n = config.validate_for(record.delta)?;
    let slots = record.slots();
    let Some(&last) = slots.last() else {
        log::warn!("record is empty; no sea states");
        return Ok(Vec::new());
    };
    let windows = (last + 1) / n;
    let remainder = (last + 1) % n;
    if windows == 0 {
        log::warn!(
            "record spans {} samples, shorter than one sea state of {n}",
            last + 1
        );
        return Ok(Vec::new());
    }
    if remainder > 0 {
        log::info!("dropping {remainder} trailing samples that do not fill a sea state");
    }
    let mut out = Vec::with_capacity(windows);
    let mut row = 0;
    for w in 0..windows {
        let (lo, hi) = (w * n, (w + 1) * n);
        while row < slots.len() && slots[row] < lo {
            row += 1;
        }
        let complete = row + n <= slots.len() && slots[row] == lo && slots[row + n - 1] == hi - 1;
        if !complete {
            log::warn!("sea state {w} contains missing samples; skipped");
            continue;
        }
        let sample = match SeaStateSample::new(
            record.rows[row..row + n].to_vec(),
            record.delta,
            Some(record.time_labels[row].clone()),
        ) {
            Ok(s) => s.demeaned(),
            Err(e) => {
                log::warn!("sea state {w} skipped: {e}");
                continue;
            }
        };
        out.push(SeaState {
            index: w,
            start_time: record.time_labels[row].clone(),
            first_row: row + 1,
            sample,
        });
    }
    Ok(out)
}
