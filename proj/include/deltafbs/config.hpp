#pragma once

#include <string>

#include "deltafbs/model.hpp"

namespace dfbs {

// Machine description loaded from the JSON configuration file; see
// docs/machine-config.md for the schema.
struct MachineConfig {
    DeltaGeometry geometry;
    ModelBlocks blocks;
    InertialDistribution distribution = InertialDistribution::thirds();
    double sampling_time = 1e-3;
    DiscretizationMethod method = DiscretizationMethod::Zoh;
};

MachineConfig default_machine();
MachineConfig load_machine_config(const std::string& path);
void write_default_machine_config(const std::string& path);

}  // namespace dfbs
