use super::{NeuralError, Result};

/// Coefficient of determination `1 - SS_res / SS_tot`.
pub fn r2_score(pred: &[f64], target: &[f64]) -> Result<f64> {
    if pred.len() != target.len() {
        return Err(NeuralError::DimensionMismatch { expected: target.len(), got: pred.len() });
    }
    if target.len() < 2 {
        return Err(NeuralError::EmptyDataset);
    }
    let mean = target.iter().sum::<f64>() / target.len() as f64;
    let ss_tot: f64 = target.iter().map(|t| (t - mean) * (t - mean)).sum();
    if ss_tot == 0.0 {
        return Err(NeuralError::ZeroVariance);
    }
    let ss_res: f64 = pred.iter().zip(target).map(|(p, t)| (p - t) * (p - t)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

pub fn mse(pred: &[f64], target: &[f64]) -> Result<f64> {
    if pred.len() != target.len() {
        return Err(NeuralError::DimensionMismatch { expected: target.len(), got: pred.len() });
    }
    if target.is_empty() {
        return Err(NeuralError::EmptyDataset);
    }
    Ok(pred.iter().zip(target).map(|(p, t)| (p - t) * (p - t)).sum::<f64>() / target.len() as f64)
}

/// Mean absolute percentage error, in percent.
pub fn mape(pred: &[f64], target: &[f64]) -> Result<f64> {
    if pred.len() != target.len() {
        return Err(NeuralError::DimensionMismatch { expected: target.len(), got: pred.len() });
    }
    if target.is_empty() {
        return Err(NeuralError::EmptyDataset);
    }
    Ok(100.0 * pred.iter().zip(target).map(|(p, t)| ((p - t) / t).abs()).sum::<f64>() / target.len() as f64)
}
