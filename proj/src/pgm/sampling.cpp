#include "nirisk/pgm/sampling.hpp"

namespace nirisk::pgm {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int draw_categorical(const Eigen::Ref<const Eigen::RowVectorXd>& probs, std::mt19937_64& rng) {
  const double u = uniform01(rng);
  double cdf = 0.0;
  const auto n = static_cast<int>(probs.size());
  int last_positive = 0;
  for (int s = 0; s < n; ++s) {
    if (probs[s] <= 0.0) continue;
    last_positive = s;
    cdf += probs[s];
    if (u < cdf) return s;
  }
  // Rounding left cdf slightly below one.
  return last_positive;
}

std::vector<int> sample_states(const Network& net, std::mt19937_64& rng) {
  net.require_valid();
  std::vector<int> states(net.size(), 0);
  for (int i : net.topological_order()) {
    states[i] = draw_categorical(net.cpt(i).table.row(net.row_of(i, states)), rng);
  }
  return states;
}

Assignment sample(const Network& net, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto states = sample_states(net, rng);
  return net.decode(states);
}

}  // namespace nirisk::pgm
