#pragma once

#include "nirisk/dbn/spec.hpp"

namespace testing_support {

// Small DBN with a static bridge: S in {a,b,c} drives both the day-1 result
// and its transitions; O in {pos,neg,unk} reports on the result.
nirisk::dbn::DbnSpec bridged_spec();

// Same structure with tables close to deterministic: the result is fixed by
// S and O echoes it.
nirisk::dbn::DbnSpec near_deterministic_spec();

}  // namespace testing_support
