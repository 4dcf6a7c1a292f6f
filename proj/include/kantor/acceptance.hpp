#pragma once

// Integration acceptance suite: one pass/fail line per criterion.

#include <iosfwd>

namespace kantor {

// returns true iff every criterion passed
bool run_acceptance(std::ostream& os);

}  // namespace kantor
