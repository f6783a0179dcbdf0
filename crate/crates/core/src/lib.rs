//! Combinatorics of semi-stable reduction: dual graphs of semi-stable fibers,
//! their contractions and desingularizations, normal models through their
//! exceptional loci, stable hulls, and finite covers as harmonic morphisms.
//!
//! ```
//! use ssred_core::{canonicalize, make_model, stable_hull, DualGraph, VertexId};
//!
//! // A chain of two (-2)-curves between two genus-1 components.
//! let top = DualGraph::new()
//!     .with_vertex(0, 1)
//!     .with_vertex(1, 0)
//!     .with_vertex(2, 0)
//!     .with_vertex(3, 1)
//!     .with_edge(0, 0, 1, 1)
//!     .with_edge(1, 1, 2, 1)
//!     .with_edge(2, 2, 3, 1);
//! let m = make_model(top, [VertexId(1), VertexId(2)].into()).unwrap();
//! let hull = stable_hull(&m).unwrap().hull;
//! let expected = DualGraph::new().with_vertex(0, 1).with_vertex(3, 1).with_edge(0, 0, 3, 3);
//! assert_eq!(canonicalize(&hull), canonicalize(&expected));
//! ```

pub mod canon;
pub mod covers;
pub mod diagnostics;
pub mod enumerate;
pub mod error;
pub mod format;
pub mod graph;
pub mod ids;
pub mod models;
pub mod moves;
pub mod oracle;
pub mod random;

pub use canon::{canonicalize, canonicalize_marked_set, Structure};
pub use covers::{
    base_change_cover, infinite_auto_certificate, is_stable_cover, marked_rh_defect, quotient_by_action, rh_defect,
    stable_hull_of_cover, stable_model_of_cover, target_stable_marked_model, validate_cover, CoverDatum, CoverStep,
    GroupAction, StableOptions,
};
pub use diagnostics::{Diagnostic, Diagnostics, Severity};
pub use error::{Error, ErrorClass, Result};
pub use graph::{DualGraph, Edge, EdgeMarking, Position, VertexData};
pub use ids::{EdgeId, HalfEdge, LegId, MarkingId, VertexId};
pub use models::{
    base_change_model, is_relatively_minimal, join_models, make_marked_model, make_model, stable_hull,
    stable_marked_hull, stable_marked_model, HullResult, Model,
};
pub use moves::{base_change, contract, contract_with, desingularize, splitting_index, ContractionTrace, Image, LegPolicy};
