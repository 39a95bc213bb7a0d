//! Stationary base flows: the analytic catalog, the critical curve, the
//! Oleinik checks and the steady solver in von Mises variables.

pub mod catalog;
pub mod critical;
pub mod flow;
pub mod io;
pub mod mises;
pub mod steady;
pub mod validate;

pub use catalog::{analytic_profile, CatalogField, CatalogId, CatalogParams};
pub use critical::{critical_point_curve, find_critical_point, polish, CriticalCurve, CriticalState};
pub use flow::{BaseFlow, FlowField, FlowPoint, SampledField};
pub use mises::{blasius, blasius_round_trip, invert_von_mises, von_mises_march, Blasius, BlasiusCheck, MisesField, MisesResolution};
pub use steady::{check_oleinik_conditions, OleinikReport, SteadyBC};
pub use validate::{recover_v0, validate_baseflow, FlowDiagnostics, V0Recovery};
