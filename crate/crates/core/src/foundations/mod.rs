//! State spaces, events, exact values and set families.

mod event;
mod family;
mod space;
mod value;

pub use event::{Event, States, Subsets, MAX_STATES};
pub use family::SetFamily;
pub use space::StateSpace;
pub use value::{format_rational, int, parse_rational, rational, ExtValue, Rational};
