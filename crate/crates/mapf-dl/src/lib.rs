//! Exact solver for multi-agent path finding with deadlines (MAPF-DL).
//!
//! Given an undirected graph, a set of agents with start and goal vertices,
//! and a global deadline, the solver maximizes the number of agents that
//! reach their goals by the deadline without vertex or edge collisions.
//! The pipeline reduces the problem to a time-expanded multi-commodity flow
//! network, prunes it with forward/backward breadth-first searches, builds a
//! compact 0/1 integer linear program, and solves it exactly with a built-in
//! branch-and-bound over a bounded-variable simplex.

pub mod bench;
pub mod extract;
pub mod ilp;
pub mod instance;
pub mod network;
pub mod oracle;
pub mod solver;
