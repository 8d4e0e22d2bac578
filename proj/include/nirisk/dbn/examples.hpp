#pragma once

#include "nirisk/dbn/spec.hpp"

namespace nirisk::dbn {

// Two-variable chain with no static slice: a hidden {yes, no} "result" with
// P(result_1 = yes) = 0.2, P(yes | yes) = 0.7, P(yes | no) = 0.1, and one
// observation O in {pos, neg} with P(pos | yes) = 0.9, P(pos | no) = 0.2.
DbnSpec chain_spec();

}  // namespace nirisk::dbn
