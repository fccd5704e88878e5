//! Annotation collection service.
//!
//! Captions are assigned to a fixed panel of annotators, who fetch tasks,
//! read the tokenized caption and submit paragraph scores, sentence
//! judgments and word-level error spans. Assignments and submissions are
//! kept in two append-only JSON Lines files; restarting on the same
//! directory replays them.

pub mod api;
pub mod protocol;
pub mod service;

pub use api::{router, serve_blocking, ErrorBody};
pub use protocol::{LikertLevel, Protocol};
pub use service::{
    plan_assignments, Accepted, AnnotationService, CaptionPayload, LiveAgreement, NextTask, Progress, SentencePayload,
    ServiceConfig, ServiceError, StatusCounts, Submission, SubmittedLabels, TaskAssignment, TaskStatus, TaskView,
    ANNOTATIONS_FILE, ASSIGNMENTS_FILE, INSUFFICIENT_DATA,
};
