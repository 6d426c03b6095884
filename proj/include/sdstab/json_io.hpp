#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include "json.hpp"

#include "sdstab/closedloop.hpp"
#include "sdstab/example_systems.hpp"
#include "sdstab/lqsynth.hpp"
#include "sdstab/obscheck.hpp"

namespace sdstab {

using Json = nlohmann::ordered_json;

// Matrices are row-major arrays of rows; every entry is an [re, im] pair.
Json to_json(const Matrix& m);
Json to_json(const Vector& v);
Json to_json(Scalar z);

Matrix matrix_from_json(const Json& j);
Vector vector_from_json(const Json& j);
Scalar scalar_from_json(const Json& j);

Json to_json(const ContinuousSystem& sys);
Json to_json(const SpectralSystem& sys);
Json to_json(const ObservabilityCertificate& cert);
Json to_json(const RiccatiSolution& sol);
Json to_json(const FeedbackGain& gain);
Json to_json(const CounterexampleWitness& w);

using AnySystem = std::variant<ContinuousSystem, SpectralSystem>;

/// Dense {"A", "B"} or spectral {"symbol", "s", "c", "modes", "mask"}.
/// Throws Error(kInvalidArgument) on malformed documents.
AnySystem system_from_json(const Json& j);
ContinuousSystem dense_system(const AnySystem& sys);

/// FNV-1a over the compact JSON dump; stable across platforms.
std::string system_hash(const ContinuousSystem& sys);

/// CSV with columns t, norm, re/im of each state and control component,
/// preceded by one "# {json}" header line.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const Json& header);

}  // namespace sdstab
