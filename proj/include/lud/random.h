#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include <Eigen/Core>

namespace lud {

using Rng = std::mt19937_64;

// Named sub-streams of a master seed. Generators never share an engine; each
// purpose gets its own stream so that, for example, changing the noise level
// of an experiment leaves the graph and the locations untouched.
enum class Stream : std::uint64_t {
  kGraph = 1,
  kLocations = 2,
  kNoise = 3,
  kRealization = 4,
  kScene = 5,
  kOutliers = 6,
  kInit = 7,
  kNullspace = 8,
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Derives a child seed as mix64(...mix64(mix64(master) ^ path[0])... ^ path[k]).
// The counter path is e.g. {stream, cell, trial, attempt}.
std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path);

inline std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                                 std::initializer_list<std::uint64_t> path = {}) {
  std::uint64_t s = derive_seed(master, {static_cast<std::uint64_t>(stream)});
  return path.size() == 0 ? s : derive_seed(s, path);
}

Eigen::VectorXd standard_normal_vector(Rng& rng, int dim);

// Uniform on S^{dim-1}: a normalized standard normal vector (redrawn on the
// probability-zero event of an exactly zero draw).
Eigen::VectorXd uniform_unit_vector(Rng& rng, int dim);

}  // namespace lud
