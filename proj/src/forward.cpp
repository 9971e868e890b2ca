#include "ghostbench/forward.hpp"

#include "ghostbench/keyvalue.hpp"
#include "ghostbench/parallel.hpp"
#include "ghostbench/rng.hpp"

namespace ghost {

namespace {
constexpr std::uint64_t kBucketNoiseSalt = 0xb0c4e7ULL;
}

double bucket_measure(const SpeckleFrame& frame, const ObjectMask& mask) {
  if (frame.intensity.rows() != mask.values().rows() || frame.intensity.cols() != mask.values().cols())
    throw ConfigError("frame and mask grids differ");
  return (frame.intensity * mask.values()).sum();
}

std::string MeasurementSet::to_csv() const {
  std::string out = "frame_index,bucket\n";
  for (const auto& r : records) {
    out += std::to_string(r.frame.frame_index);
    out += ',';
    out += format_double(r.bucket);
    out += '\n';
  }
  return out;
}

MeasurementSet run_campaign(const OpticalConfig& config, const ObjectMask& mask, std::size_t m,
                            std::uint64_t master_seed, double noise_sigma, int threads) {
  if (m < 1) throw ConfigError("a campaign needs at least one measurement");
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be non-negative");
  if (mask.size() != config.grid_n) throw ConfigError("mask grid differs from the optical grid");

  const SpeckleSynthesizer synth(config);
  MeasurementSet ms;
  ms.config = config;
  ms.master_seed = master_seed;
  ms.noise_sigma = noise_sigma;
  ms.records.resize(m);
  parallel_for(m, threads, [&](std::size_t i) {
    const std::uint64_t index = i + 1;
    auto& rec = ms.records[i];
    rec.frame = synth.frame(master_seed, index);
    rec.bucket = bucket_measure(rec.frame, mask);
    if (noise_sigma > 0.0) {
      GaussianStream noise(stream_seed(master_seed, index, kBucketNoiseSalt));
      rec.bucket += noise_sigma * noise.normal();
    }
  });
  return ms;
}

}  // namespace ghost
