//! Automatic image cropping via cascaded regression.
//!
//! The pipeline has two halves:
//!
//! * a forward-only convolutional feature extractor ([`cnn`]) that turns the
//!   current crop window of an image into a fixed-length feature vector via
//!   spatial pyramid pooling, so the features track the evolving window
//!   ("cropping-indexed" features), and
//! * a cascaded regressor ([`cascade`]) whose per-stage primitive regressor is
//!   a gradient-boosted ensemble of random ferns ([`boosting`], [`ferns`]),
//!   one regressor per crop coordinate, with shrinkage applied to every stage
//!   update.
//!
//! Supporting modules: crop-box arithmetic and the IoU/BDE metrics
//! ([`geometry`]), PPM raster I/O ([`imaging`]), annotation parsing and a
//! seed-deterministic synthetic benchmark generator ([`data`]), and the sweep
//! harness that emits per-stage metric curves as CSV ([`harness`]).

pub mod boosting;
pub mod cascade;
pub mod cnn;
pub mod data;
pub mod ferns;
pub mod geometry;
pub mod harness;
pub mod imaging;
pub mod seed;
