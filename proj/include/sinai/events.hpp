#pragma once

#include <cstdint>

#include "sinai/env.hpp"

namespace sinai {

struct EventParams {
  double C1 = 21.0;
  double C2 = 10.0;
  double delta1 = 0.5;
  // The proofs need C1 > 20, C2 > 9, delta1 in (0, 2/3). Switching this off
  // lets callers explore other constants at their own risk.
  bool enforce_ranges = true;
};

void validate(const EventParams& p);

struct EventProfile {
  std::int64_t n = 0;
  Site z = 0;
  EventParams params;
  double log_n = 0.0;
  double loglog_n = 0.0;
  double h_n = 0.0;        // log n - C1 loglog n
  double h_tilde = 0.0;    // h_n - C1 loglog n
  std::int64_t gamma_n = 0;
  Site b = 0;              // b_{log n}
  bool e_minus = false, e_plus = false;
  bool e3 = false, e4 = false, e5 = false, e6 = false, e7 = false;
  bool e_c = false;
  // h_tilde <= 0: no slope decomposition exists at that height, E3 is false.
  bool degenerate_h_tilde = false;
  // Injected window too short to certify something; affected flags are false.
  bool uncertified = false;
};

// Every flag straight from its defining inequality. Sampled windows are grown
// as needed (ExtensionBudgetExceeded propagates); injected windows that are too
// short make the affected events false.
EventProfile classify_events(const PotentialWindow& window, std::int64_t n, Site z, const EventParams& params = {});

}  // namespace sinai
