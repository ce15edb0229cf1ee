//! Adam, parameter initializers and the mini-batch training loop.

mod adam;
mod init;
mod train;

pub use adam::{AdamConfig, AdamState};
pub use init::kaiming_normal;
pub use train::{mse_loss, train, Dataset, EarlyStopping, EpochRecord, TrainConfig, TrainHistory, SHUFFLE_STREAM};
