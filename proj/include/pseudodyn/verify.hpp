#pragma once

// Exact checks behind `pseudodyn verify`. Each returns a report whose
// verdict is Established or CounterexampleFound, with a witness on failure.

#include "pseudodyn/diagnostics.hpp"
#include "pseudodyn/systems.hpp"

namespace pdyn {

/// T_m(Q_n) = Q_n for 1 <= n <= n_max, 0 <= m <= m_max, and the stated Q_1.
ProbeReport verify_tq(long n_max, long m_max);

/// Orbits of Q~_n x {m}, m <= n, close inside Q~_n x {0..n}; g~ is undefined
/// on Q~_n x {n}.
ProbeReport verify_finite_orbits(long n_max);

/// Orbit of (0, alpha) against {(m, beta) : beta in G alpha, beta in U_m,
/// m <= levels} for every periodic alpha of period <= max_period.
ProbeReport verify_gna(long max_period, long levels);

/// choose_radii succeeded, the independent all-pairs check passes and the
/// radii decrease strictly.
ProbeReport verify_radius_conditions(long n_max);

ProbeReport verify_isometry_b(long n_max, bool mutate);
ProbeReport verify_isometry_a(long max_level);

/// (n, mu) is outside dom f for n <= levels, and every generator letter
/// defined on the orbit of (0, mu) is a level shift.
ProbeReport verify_cantor_mu(long levels);

/// Line with U = (0, 3/2): every sample has a restricted orbit of size <= 2,
/// while no global orbit closes within the node bound.
ProbeReport verify_dpo_rz(std::size_t samples, std::size_t global_samples, std::size_t node_bound);

/// Distinct purely periodic sequences with period <= max_period.
std::vector<BiSeq> periodic_sequences(long max_period);

}  // namespace pdyn
