#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "boxer/dataset.hpp"

namespace boxer {

struct SynthParams {
  std::size_t instances = 1000;
  std::size_t classifiers = 3;
  std::size_t labels = 3;
  std::size_t features = 6;  // two thirds continuous (rounded up), the rest categorical
  std::size_t categories = 4;
  double test_fraction = 0.2;
  std::uint64_t seed = 1;
  /// Probability that each classifier predicts correctly; missing entries
  /// are spread evenly over [0.55, 0.95].
  std::vector<double> accuracy;
};

/// Deterministic for a given parameter set. Throws InvalidSize for
/// instances, classifiers or categories of zero, fewer than two labels,
/// or accuracies / test_fraction outside [0, 1].
DatasetColumns synth_columns(const SynthParams& params);

/// Writes `manifest.json` and `data.csv` into `directory` (created if absent).
void write_synth(const std::filesystem::path& directory, const SynthParams& params);

}  // namespace boxer
