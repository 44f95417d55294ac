/// Learning rate for `epoch` (0-based): constant until `decay_start`, then
/// linear to zero at `epochs`.
pub fn lr_schedule(epoch: usize, base_lr: f64, epochs: usize, decay_start: usize) -> f64 {
    if epoch <= decay_start || epochs <= decay_start {
        return base_lr;
    }
    let span = (epochs - decay_start) as f64;
    let done = (epoch.min(epochs) - decay_start) as f64;
    base_lr * (1.0 - done / span)
}
