#pragma once
/**
 * @file io.hpp
 * @brief JSON loaders/writers, CSV tables and gnuplot scripts.
 *
 * Every number is printed with %.17g so that outputs round-trip and identical
 * runs produce identical bytes.
 */

#include "linbill/nbody.hpp"
#include "linbill/origami.hpp"
#include "linbill/scattering.hpp"
#include "linbill/thickened.hpp"

#include <json.hpp>

#include <string>

namespace linbill {

using Json = nlohmann::json;

/// %.17g
std::string fmt(double x);

Arrangement arrangement_from_json(const Json& j);
Json arrangement_to_json(const Arrangement& arr);
Arrangement load_arrangement(const std::string& path);

/// {"A", "B", "chain", "itinerary", "length"}
Json trajectory_to_json(const BilliardTrajectory& traj);
/// Rebuilds the trajectory (and so re-runs its invariant checks). The stored length
/// must match the recomputed one to 1e-9 relative.
BilliardTrajectory trajectory_from_json(const Json& j, std::shared_ptr<const Arrangement> arr);

Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

/// Rotation generators as a JSON array of dense row-major skew matrices; each is validated.
std::vector<RotationGenerator> generators_from_json(const Json& j, const Arrangement& arr);
Json generator_to_json(const Matrix& xi);

Json read_json(const std::string& path);
void write_text(const std::string& path, const std::string& content);

/// One row per cell: A, B, status, vA, vB, Q_-, Q_+, S.
std::string patch_csv(const RelationPatch& patch);
/// Plot of the outgoing foot point Q_+ over the first two A axes of the patch.
std::string patch_gnuplot(const std::string& csv_name, std::size_t dim);

std::string events_csv(const ThickenedTable& table, const ThickenedPath& path);
std::string rfamily_csv(const std::vector<RFamilyEntry>& family);
std::string rfamily_gnuplot(const std::string& csv_name);

std::string realizability_csv(const Arrangement& arr, const std::vector<RealizabilityRow>& rows);

std::string slice_csv(const ScatterSlice& slice);
std::string slice_gnuplot(const std::string& csv_name);

std::string conservation_csv(const ConservationReport& report);

}  // namespace linbill
