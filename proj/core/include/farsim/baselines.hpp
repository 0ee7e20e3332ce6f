#pragma once

#include <optional>
#include <string_view>

#include "farsim/channel.hpp"
#include "farsim/config.hpp"
#include "farsim/metrics.hpp"
#include "farsim/solver.hpp"

namespace farsim {

enum class SchemeId { Fixed, UFar, Proposed };

/// Exact output labels: "Fixed", "UFar", "Proposed".
const char* scheme_name(SchemeId id);
std::optional<SchemeId> scheme_from_name(std::string_view name);

struct SchemeResult {
  Layout layout;
  RateReport report;
  SolveTrace trace;
};

/// Rates at the deterministic initial layout, no optimization.
RateReport run_fixed(const ChannelRealization& realization,
                     const SystemConfig& config);

/// Max-min optimization with only the relay-side antennas (both faces)
/// movable; users and BS stay at the initial layout.
SchemeResult run_ufar(const ChannelRealization& realization,
                      const SystemConfig& config);

/// Max-min optimization over every position group.
SchemeResult run_proposed(const ChannelRealization& realization,
                          const SystemConfig& config);

SchemeResult run_scheme(SchemeId id, const ChannelRealization& realization,
                        const SystemConfig& config);

}  // namespace farsim
