// Run configuration: one hierarchical record covering every pipeline mode,
// parsed from and serialized to a JSON document. All energies are in units
// of the lead exchange J (J = 1 internally), times in 1/J.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sjx/bath.hpp"
#include "sjx/junction.hpp"
#include "sjx/trajectory.hpp"

namespace sjx {

enum class RunMode {
    correlations,
    born,
    kubo,
    steady,
    spectral,
    rectify,
    oracle,
    sweep,
};

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& s);

struct GridSpec {
    double dt{0.02};
    double T{3.0};
};

struct SpectralSpec {
    double omega_min{-3.0};
    double omega_max{3.0};
    int n_omega{241};
    double kernel_dt{0.01};
    double kernel_T{500.0};
};

struct RectifySpec {
    std::string method{"steady"}; // steady | kubo | born | oracle
    double window{100.0};         // averaging window for time-trace methods
};

struct OracleSpec {
    int n_left{8};
    int n_right{8};
    int junction_state{0};
    double dt_sample{0.02};
    double T{3.0};
    double tol{1e-9};
    bool trajectories{false};
    int m{100};
    TrajectoryOptions traj;
    AbsorberSpec absorber;
};

struct SweepSpec {
    std::string parameter;        // dotted path, e.g. "bath_left.Jz"
    std::vector<double> values;
    RunMode inner{RunMode::steady};
    bool mirrored_baths{false};   // apply the value to both leads
};

struct RunSpec {
    RunMode mode{RunMode::steady};
    JunctionSpec junction;
    BathSpec bath_left;
    BathSpec bath_right;
    double eta{kDefaultEta};
    GridSpec grid;
    SpectralSpec spectral;
    RectifySpec rectify;
    OracleSpec oracle;
    SweepSpec sweep;
    int initial_state{0}; // junction basis index
    std::uint64_t seed{1};
    int threads{0};       // 0: SJX_THREADS env or hardware
    std::string out_dir{"."};

    RunSpec() {
        bath_left.polarization = Polarization::up;
        bath_right.polarization = Polarization::down;
    }

    // collects every offending field; throws ValidationError listing them
    void validate() const;
};

RunSpec parse_runspec(const std::string& json_text);
std::string serialize_runspec(const RunSpec& spec);

// dotted-path override, value parsed as JSON scalar ("junction.Delta=0.05")
void apply_override(RunSpec& spec, const std::string& key_equals_value);

} // namespace sjx
