#pragma once

#include "og/command.hpp"
#include "og/state.hpp"

namespace og {

/// Guards every transition point of `c` with AT = r: Basic becomes Await,
/// existing Await guards and If/While tests are conjoined with AT = r.
Cmd control(RoutineId r, const Cmd& c);

}  // namespace og
