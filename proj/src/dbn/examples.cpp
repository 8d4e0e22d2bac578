#include "nirisk/dbn/examples.hpp"

namespace nirisk::dbn {

DbnSpec chain_spec() {
  auto row = [](double a, double b) { return (Eigen::MatrixXd(1, 2) << a, b).finished(); };
  auto two = [](double a, double b, double c, double d) { return (Eigen::MatrixXd(2, 2) << a, b, c, d).finished(); };
  SliceTemplate t;
  t.variables = {{"result", {"yes", "no"}}, {"O", {"pos", "neg"}}};
  t.cpts = {{"result", {"result[t-1]"}, two(0.7, 0.3, 0.1, 0.9)}, {"O", {"result"}, two(0.9, 0.1, 0.2, 0.8)}};
  t.initial_cpts = {{"result", {}, row(0.2, 0.8)}};
  return DbnSpec(pgm::Network({}, {}), std::move(t), {}, {}, "result");
}

}  // namespace nirisk::dbn
