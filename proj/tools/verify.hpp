#pragma once

#include <ostream>
#include <string>

namespace s2s {

// Runs one invariant suite (or "all"), writing one JSON object per check to
// `log`. Returns 0 when every check passes, 1 otherwise. inject_fault names a
// table to corrupt before checking ("weights"), or is empty.
int run_verify(const std::string& suite, bool quick, const std::string& inject_fault, std::ostream& log);

}  // namespace s2s
