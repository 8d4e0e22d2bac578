#include "fixtures.hpp"

namespace testing_support {

using nirisk::dbn::DbnSpec;
using nirisk::dbn::SliceTemplate;
using nirisk::pgm::Cpt;
using nirisk::pgm::Network;

namespace {

Eigen::MatrixXd rows(std::initializer_list<std::initializer_list<double>> r) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : r) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

DbnSpec build(Eigen::MatrixXd prior, Eigen::MatrixXd transition, Eigen::MatrixXd initial, Eigen::MatrixXd obs) {
  Network statics({{"S", {"a", "b", "c"}}}, {{"S", {}, std::move(prior)}});
  SliceTemplate t;
  t.variables = {{"R", {"yes", "no"}}, {"O", {"pos", "neg", "unk"}}};
  t.cpts = {Cpt{"R", {"R[t-1]", "S"}, std::move(transition)}, Cpt{"O", {"R"}, std::move(obs)}};
  t.initial_cpts = {Cpt{"R", {"S"}, std::move(initial)}};
  return DbnSpec(std::move(statics), std::move(t), {}, {}, "R");
}

}  // namespace

DbnSpec bridged_spec() {
  return build(rows({{0.5, 0.3, 0.2}}),
               rows({{0.8, 0.2}, {0.6, 0.4}, {0.7, 0.3}, {0.1, 0.9}, {0.25, 0.75}, {0.4, 0.6}}),
               rows({{0.2, 0.8}, {0.5, 0.5}, {0.35, 0.65}}),
               rows({{0.6, 0.3, 0.1}, {0.15, 0.7, 0.15}}));
}

DbnSpec near_deterministic_spec() {
  return build(rows({{0.4, 0.3, 0.3}}),
               rows({{0.99, 0.01}, {0.99, 0.01}, {0.99, 0.01}, {0.01, 0.99}, {0.01, 0.99}, {0.99, 0.01}}),
               rows({{0.01, 0.99}, {0.01, 0.99}, {0.99, 0.01}}),
               rows({{0.98, 0.01, 0.01}, {0.01, 0.98, 0.01}}));
}

}  // namespace testing_support
