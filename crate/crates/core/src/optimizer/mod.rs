//! Black-box parameter search for the tunable processors.

mod objective;
mod search;
pub mod space;
pub mod tpe;

use serde::{Deserialize, Serialize};

pub use objective::{apply_params, default_space, mean_sisnr_objective, params_of, TUNABLE};
pub use search::{run_search, write_history, Strategy};
pub use space::{Dim, ParamSpace, Params};
pub use tpe::{suggest, TpeConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub params: Params,
    /// Higher is better; failed evaluations score negative infinity.
    pub objective: f64,
}
