#pragma once

#include "odt/gradient.hpp"
#include "odt/grid.hpp"

#include <map>
#include <string>
#include <vector>

namespace odt {

/// Detector records for one incident angle.
struct AngleRecord {
  double angle = 0.0;
  Eigen::VectorXcd y;              // total field at the detectors
  Eigen::VectorXcd u_in_on_gamma;  // incident field at the detectors
};

/// Multi-angle measurements. Detector positions are physical coordinates,
/// so the reconstruction grid does not have to match the simulation grid.
struct MeasurementSet {
  std::vector<AngleRecord> records;
  std::vector<Vec2> detector_positions;
  double source_distance = 16.5;
  std::map<std::string, std::string> metadata;

  Index detector_count() const { return static_cast<Index>(detector_positions.size()); }
};

/// Throws DataError if record sizes disagree with the detector list.
void validate(const MeasurementSet& data);

/// Incident fields on `grid` and scattered data y - u_in|Gamma for every angle.
std::vector<IlluminationRecord> illuminations_for(const MeasurementSet& data, const Grid2D& grid,
                                                  const PhysicsParams& phys);

}  // namespace odt
