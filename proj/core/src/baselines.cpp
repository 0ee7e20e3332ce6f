#include "farsim/baselines.hpp"

#include <stdexcept>

namespace farsim {

const char* scheme_name(SchemeId id) {
  switch (id) {
    case SchemeId::Fixed:
      return "Fixed";
    case SchemeId::UFar:
      return "UFar";
    case SchemeId::Proposed:
      return "Proposed";
  }
  throw std::logic_error("scheme_name: bad scheme");
}

std::optional<SchemeId> scheme_from_name(std::string_view name) {
  if (name == "Fixed") return SchemeId::Fixed;
  if (name == "UFar") return SchemeId::UFar;
  if (name == "Proposed") return SchemeId::Proposed;
  return std::nullopt;
}

RateReport run_fixed(const ChannelRealization& realization,
                     const SystemConfig& config) {
  Layout layout = initial_layout(config);
  return rate_report(assemble(realization, layout, config), config);
}

SchemeResult run_ufar(const ChannelRealization& realization,
                      const SystemConfig& config) {
  BlockMask mask;
  mask.users = false;
  mask.bs = false;
  SolveResult solved =
      max_min_optimize(realization, initial_layout(config), config, mask);
  return {std::move(solved.layout), std::move(solved.report),
          std::move(solved.trace)};
}

SchemeResult run_proposed(const ChannelRealization& realization,
                          const SystemConfig& config) {
  SolveResult solved =
      max_min_optimize(realization, initial_layout(config), config);
  return {std::move(solved.layout), std::move(solved.report),
          std::move(solved.trace)};
}

SchemeResult run_scheme(SchemeId id, const ChannelRealization& realization,
                        const SystemConfig& config) {
  switch (id) {
    case SchemeId::Fixed: {
      SchemeResult result;
      result.layout = initial_layout(config);
      result.report = run_fixed(realization, config);
      result.trace.outer_alphas.push_back(result.report.min_gain);
      return result;
    }
    case SchemeId::UFar:
      return run_ufar(realization, config);
    case SchemeId::Proposed:
      return run_proposed(realization, config);
  }
  throw std::logic_error("run_scheme: bad scheme");
}

}  // namespace farsim
