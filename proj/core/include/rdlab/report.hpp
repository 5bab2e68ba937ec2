/// @file report.hpp
/// @brief Outcome of a sampled or measured property check.

#pragma once

#include <cstddef>
#include <string>

#include <nlohmann/json.hpp>

namespace rdlab {

struct PropertyReport {
  std::string name;
  bool pass = false;
  std::size_t samples = 0;
  std::size_t violations = 0;
  /// Largest relative violation (0 when none).
  double worst = 0.0;
  /// Check-specific measured quantities.
  nlohmann::json details = nlohmann::json::object();
};

nlohmann::json to_json(const PropertyReport& r);

}  // namespace rdlab
