//! Data sources: controlled ODE trajectories, smooth and sparse input signals, images.
//!
//! Every generator is a pure function of its configuration and seed.

mod idx;
mod ode;
mod signals;

pub use idx::{load_idx_images, parse_idx_images, synthetic_digits, synthetic_images, IDX_IMAGE_MAGIC};
pub use ode::{
    generate_trajectories, lorenz_system, lv_system, pt_system, rk4_integrate, DatasetMeta, OdeSystem,
    OdeTrajectory, RhsFn, TrajectoryConfig, TrajectoryDataset, BLOWUP_LIMIT,
};
pub use signals::{smooth_input_sampler, sparse_signal_sampler, LowFrequencyFamily};
