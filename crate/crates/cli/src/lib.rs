//! Front ends for the verification engine: the HTTP service, the JSON wire
//! format it shares with `krk --json`, and terminal play.

pub mod play;
pub mod server;
pub mod wire;
