//! Initial-object-frame (IOF) transforms.

use crate::geometry::Pose;

/// Expresses `pose` in the frame of `initial`: the initial pose maps to
/// `(0, 0, 0)` and the angle difference stays unwrapped.
pub fn to_iof(pose: Pose, initial: Pose) -> Pose {
    let local = initial.inverse_transform_point(pose.position());
    Pose::new(local.x, local.y, pose.theta - initial.theta)
}

/// Inverse of [`to_iof`].
pub fn from_iof(delta: Pose, initial: Pose) -> Pose {
    let world = initial.transform_point(delta.position());
    Pose::new(world.x, world.y, initial.theta + delta.theta)
}

pub fn trajectory_to_iof<I: IntoIterator<Item = Pose>>(poses: I, initial: Pose) -> Vec<Pose> {
    poses.into_iter().map(|p| to_iof(p, initial)).collect()
}
