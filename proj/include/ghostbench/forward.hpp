#pragma once

#include "ghostbench/optics.hpp"
#include "ghostbench/speckle.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ghost {

/// Noiseless bucket signal: sum over pixels of intensity * transmittance.
double bucket_measure(const SpeckleFrame& frame, const ObjectMask& mask);

struct MeasurementRecord {
  SpeckleFrame frame;  // reference-arm record, identical to the object-plane speckle
  double bucket = 0.0;
};

struct MeasurementSet {
  OpticalConfig config;
  std::uint64_t master_seed = 0;
  double noise_sigma = 0.0;
  std::vector<MeasurementRecord> records;  // ordered by frame_index

  std::size_t m() const { return records.size(); }
  /// `frame_index,bucket` with a header line.
  std::string to_csv() const;
};

/// Acquires frames 1..m. Output is bit-identical for any `threads`.
MeasurementSet run_campaign(const OpticalConfig& config, const ObjectMask& mask, std::size_t m,
                            std::uint64_t master_seed, double noise_sigma = 0.0, int threads = 1);

}  // namespace ghost
