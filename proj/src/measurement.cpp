#include "odt/measurement.hpp"

#include "odt/errors.hpp"

#include <cmath>
#include <string>

namespace odt {

void validate(const MeasurementSet& data) {
  if (data.records.empty()) throw DataError("measurement set has no angles");
  const Index m = data.detector_count();
  if (m == 0) throw DataError("measurement set has no detectors");
  for (size_t p = 0; p < data.records.size(); ++p) {
    const AngleRecord& r = data.records[p];
    if (r.y.size() != m || r.u_in_on_gamma.size() != m)
      throw DataError("record " + std::to_string(p) + " has " + std::to_string(r.y.size()) +
                      " samples, expected " + std::to_string(m));
    if (!std::isfinite(r.angle) || std::abs(r.angle) >= 0.5 * std::numbers::pi)
      throw DataError("record " + std::to_string(p) + " has an invalid angle");
    if (!r.y.allFinite() || !r.u_in_on_gamma.allFinite())
      throw DataError("record " + std::to_string(p) + " contains non-finite values");
  }
  for (const Vec2& pos : data.detector_positions)
    if (!pos.allFinite()) throw DataError("non-finite detector position");
}

std::vector<IlluminationRecord> illuminations_for(const MeasurementSet& data, const Grid2D& grid,
                                                  const PhysicsParams& phys) {
  validate(data);
  std::vector<IlluminationRecord> out;
  out.reserve(data.records.size());
  for (const AngleRecord& r : data.records) {
    out.push_back(IlluminationRecord{plane_wave(grid, phys, r.angle, data.source_distance), r.u_in_on_gamma,
                                     r.y - r.u_in_on_gamma, r.angle});
  }
  return out;
}

}  // namespace odt
