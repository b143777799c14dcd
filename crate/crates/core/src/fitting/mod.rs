//! Parameter identification from measured or simulated data.

pub mod ellipse;
pub mod pusher_mu;

pub use ellipse::{fit_ellipse_params, fit_limit_ellipse};
pub use pusher_mu::{
    estimate_pusher_mu, trace_from_trajectory, ForceTraceSample, PusherMuEstimate, DEFAULT_NORMAL_FLOOR,
    DEFAULT_SLIDE_SPEED_THRESHOLD,
};
