// Pipeline orchestration: executes a RunSpec, writes CSV/JSON artifacts and
// a manifest with checksums, and drives parameter sweeps.

#pragma once

#include <string>
#include <vector>

#include "sjx/runspec.hpp"

namespace sjx {

struct Artifact {
    std::string path;      // relative to out_dir
    std::uint64_t bytes{0};
    std::string fnv64;     // FNV-1a of the file contents, hex
};

struct ResultBundle {
    RunSpec spec;                    // effective configuration, echoed
    std::vector<Artifact> artifacts;
    std::vector<std::string> warnings;
    double wall_seconds{0.0};
    std::uint64_t steps{0};          // integrator/solver step count
    int threads_used{1};
};

// Executes the requested pipeline; artifacts land under spec.out_dir.
// ValidationError for bad specs (exit code 2 at the CLI), NumericError for
// solver failures (exit code 3).
ResultBundle run(const RunSpec& spec);

std::uint64_t fnv1a64(const std::string& bytes);

} // namespace sjx
