use std::io::Write;

use serde::{Deserialize, Serialize};

/// Metrics after one epoch; MSE is in normalized target units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub stage: usize,
    pub learning_rate: f64,
    pub train_mse: f64,
    pub test_mse: Option<f64>,
    pub train_r2: f64,
    pub test_r2: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub records: Vec<EpochRecord>,
}

impl History {
    pub fn last(&self) -> Option<&EpochRecord> {
        self.records.last()
    }

    /// `epoch,stage,train_mse,test_mse,train_r2,test_r2`; missing test metrics are empty.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "epoch,stage,train_mse,test_mse,train_r2,test_r2")?;
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        for r in &self.records {
            writeln!(out, "{},{},{},{},{},{}", r.epoch, r.stage, r.train_mse, opt(r.test_mse), r.train_r2, opt(r.test_r2))?;
        }
        Ok(())
    }
}
