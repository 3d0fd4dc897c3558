//! Points, angles, signed cones and the thickened regions built from them.

mod identities;
mod interaction;
mod region;
mod vector;

pub use identities::{angle_identity_defect, disk_contains_projected_rectangle, AngleIdentity, Defect, RectanglePart};
pub use interaction::{output_sign, Interaction, Smallness, WeightReport};
pub use region::{angle, hyperbolic_weight, Bounds, Dim, Interval, Point, Region};
pub(crate) use region::{angle_unchecked, in_annulus};
pub use vector::{Direction, Sign, SpacetimePoint, Vec3, UNIT_TOLERANCE};
