//! Classification and extrinsic regression.

mod knn;
mod metrics;
mod ridge;
mod rocket;

pub use knn::{KNeighbors, KnnConfig, Weighting};
pub use metrics::{accuracy, mae, rmse};
pub use ridge::{default_lambda_grid, ridge_fit, ridge_predict, RidgeModel};
pub use rocket::{generate_kernels, rocket_transform, ConvKernel, Rocket, RocketConfig, KERNEL_LENGTHS};
