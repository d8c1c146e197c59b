#pragma once

#include <string>
#include <vector>

#include "imdrive/sim/runner.hpp"

namespace imdrive {

// run.csv body: fixed header row, then one row per record.  Numbers are
// shortest round-trip decimals, so equal runs compare byte-for-byte.
std::string records_to_csv(const std::vector<StepRecord>& records);

// metrics.json body: the metric set plus stability_classification.
std::string metrics_to_json(const Metrics& m);

void write_file(const std::string& path, const std::string& body);  // throws ConfigError

}  // namespace imdrive
