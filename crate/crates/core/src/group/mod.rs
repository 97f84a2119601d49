pub mod ball;
pub mod cache;
pub mod evidence;
pub mod presentation;
pub mod word;

pub use ball::{enumerate_ball, Ball, BallEntry};
pub use cache::BallCache;
pub use evidence::{density_evidence, density_in_ball, padic_boundedness, padic_in_ball, torsion_bound};
pub use presentation::GroupPresentation;
pub use word::{Letter, Word};
