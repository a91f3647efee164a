//! Problems solved by running the framework on a transformed instance:
//! soft-capacitated facility location and priority Steiner forest.

pub mod capacitated;
pub mod priority;

pub use capacitated::{
    capacitate_playback, capacitate_reduce, capacitated_run, lcm_capacity_scale, CapacitatedPlayback, CapacitatedReduction,
    CapacitatedRun,
};
pub use priority::{priority_class_graph, priority_run, split_by_priority, PriorityClass, PriorityReport};
