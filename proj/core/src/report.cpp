#include "rdlab/report.hpp"

namespace rdlab {

nlohmann::json to_json(const PropertyReport& r) {
  return {{"name", r.name},         {"pass", r.pass},   {"samples", r.samples},
          {"violations", r.violations}, {"worst", r.worst}, {"details", r.details}};
}

}  // namespace rdlab
