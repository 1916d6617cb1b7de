//! Experiment plumbing behind the `hdc` command-line tool: synthetic
//! event-camera data, time-images, configuration and one run per subcommand.

pub mod config;
pub mod events;
pub mod runs;

pub use config::ExperimentConfig;
pub use events::{
    events_to_csv, events_to_frame, generate_synthetic_stream, read_events_csv, Event, Polarity, StreamParams,
    TimeWindow,
};
pub use runs::{
    build_sensorimotor_memory, run_bloom, run_capacity, run_capacity_comparison, run_heatmap, run_sensorimotor, run_sequence,
    velocity_codebook, write_output, FramePipeline, Observation,
};
