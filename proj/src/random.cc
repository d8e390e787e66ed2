#include "lud/random.h"

namespace lud {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix64(master);
  for (std::uint64_t p : path) s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

Eigen::VectorXd standard_normal_vector(Rng& rng, int dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(dim);
  for (int k = 0; k < dim; ++k) v[k] = normal(rng);
  return v;
}

Eigen::VectorXd uniform_unit_vector(Rng& rng, int dim) {
  for (;;) {
    Eigen::VectorXd v = standard_normal_vector(rng, dim);
    const double norm = v.norm();
    if (norm > 0.0) return v / norm;
  }
}

}  // namespace lud
