#pragma once

#include "magsim/config.hpp"
#include "magsim/table.hpp"

namespace magsim {

const char* version();

ResultTable run_experiment(const ExperimentConfig& cfg);

// Configuration recorded in a table's metadata.
ConfigMap config_from_metadata(const ResultTable& t);

}  // namespace magsim
