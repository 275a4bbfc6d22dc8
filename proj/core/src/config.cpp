#include "credsim/config.hpp"

#include "credsim/error.hpp"

namespace credsim {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::kCredit: return "credit";
    case Variant::kExact: return "exact";
    case Variant::kPoisson: return "poisson";
    case Variant::kBernoulli: return "bernoulli";
    case Variant::kUniform: return "uniform";
  }
  return "?";
}

const char* to_string(SchedMode m) {
  return m == SchedMode::kWorkConserving ? "wc" : "nwc";
}

Variant variant_from_string(const std::string& s) {
  if (s == "credit") return Variant::kCredit;
  if (s == "exact") return Variant::kExact;
  if (s == "poisson") return Variant::kPoisson;
  if (s == "bernoulli") return Variant::kBernoulli;
  if (s == "uniform") return Variant::kUniform;
  throw ConfigError("unknown scheduler variant '" + s +
                    "' (expected credit|exact|poisson|bernoulli|uniform)");
}

SchedMode mode_from_string(const std::string& s) {
  if (s == "wc") return SchedMode::kWorkConserving;
  if (s == "nwc") return SchedMode::kNonWorkConserving;
  throw ConfigError("unknown scheduler mode '" + s + "' (expected wc|nwc)");
}

void SchedulerConfig::validate() const {
  if (fast_tick <= 0) throw ConfigError("fast_tick must be positive");
  if (reschedule_tick < fast_tick || reschedule_tick % fast_tick != 0) {
    throw ConfigError("reschedule_tick must be a multiple of fast_tick");
  }
  if (debit_per_sample <= 0) {
    throw ConfigError("debit_per_sample must be positive");
  }
  if (max_credits <= 0) throw ConfigError("max_credits must be positive");
  if (mode == SchedMode::kNonWorkConserving) {
    if (cap_percent <= 0.0 || cap_percent > 100.0) {
      throw ConfigError("cap required: nwc mode needs cap_percent in (0,100]");
    }
  }
  if (variant == Variant::kBernoulli) {
    if (bernoulli_slot <= 0 || fast_tick % bernoulli_slot != 0) {
      throw ConfigError("bernoulli_slot must divide fast_tick");
    }
    if (!(bernoulli_p > 0.0) || bernoulli_p > 1.0) {
      throw ConfigError("bernoulli_p must be in (0,1]");
    }
  }
  if (variant == Variant::kUniform) {
    if (uniform_quantum <= 0 || fast_tick % uniform_quantum != 0) {
      throw ConfigError("uniform_quantum must divide fast_tick");
    }
  }
}

}  // namespace credsim
