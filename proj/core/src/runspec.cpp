#include "sjx/runspec.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "sjx/errors.hpp"

namespace sjx {

using nlohmann::json;

std::string to_string(RunMode mode) {
    switch (mode) {
    case RunMode::correlations: return "correlations";
    case RunMode::born: return "born";
    case RunMode::kubo: return "kubo";
    case RunMode::steady: return "steady";
    case RunMode::spectral: return "spectral";
    case RunMode::rectify: return "rectify";
    case RunMode::oracle: return "oracle";
    case RunMode::sweep: return "sweep";
    }
    return "steady";
}

RunMode run_mode_from_string(const std::string& s) {
    for (RunMode m : {RunMode::correlations, RunMode::born, RunMode::kubo,
                      RunMode::steady, RunMode::spectral, RunMode::rectify,
                      RunMode::oracle, RunMode::sweep}) {
        if (to_string(m) == s) return m;
    }
    throw ValidationError("unknown mode '" + s + "'");
}

namespace {

json bath_to_json(const BathSpec& b) {
    json j;
    j["J"] = b.J;
    j["Jz"] = b.Jz;
    j["mu"] = b.mu;
    if (std::isinf(b.beta)) j["beta"] = nullptr;
    else j["beta"] = b.beta;
    j["polarization"] = b.polarization == Polarization::up ? "up" : "down";
    return j;
}

BathSpec bath_from_json(const json& j, const BathSpec& defaults) {
    BathSpec b = defaults;
    if (j.contains("J")) b.J = j.at("J").get<double>();
    if (j.contains("Jz")) b.Jz = j.at("Jz").get<double>();
    if (j.contains("mu")) b.mu = j.at("mu").get<double>();
    if (j.contains("beta")) {
        b.beta = j.at("beta").is_null() ? std::numeric_limits<double>::infinity()
                                        : j.at("beta").get<double>();
    }
    if (j.contains("polarization")) {
        const auto p = j.at("polarization").get<std::string>();
        if (p != "up" && p != "down") {
            throw ValidationError("polarization must be 'up' or 'down'");
        }
        b.polarization = (p == "up") ? Polarization::up : Polarization::down;
    }
    return b;
}

json runspec_to_json(const RunSpec& s) {
    json j;
    j["mode"] = to_string(s.mode);
    j["junction"] = {{"J_S", s.junction.J_S},
                     {"Delta", s.junction.Delta},
                     {"Jz_sys", s.junction.Jz_sys},
                     {"gamma", s.junction.gamma}};
    j["bath_left"] = bath_to_json(s.bath_left);
    j["bath_right"] = bath_to_json(s.bath_right);
    j["eta"] = s.eta;
    j["grid"] = {{"dt", s.grid.dt}, {"T", s.grid.T}};
    j["spectral"] = {{"omega_min", s.spectral.omega_min},
                     {"omega_max", s.spectral.omega_max},
                     {"n_omega", s.spectral.n_omega},
                     {"kernel_dt", s.spectral.kernel_dt},
                     {"kernel_T", s.spectral.kernel_T}};
    j["rectify"] = {{"method", s.rectify.method}, {"window", s.rectify.window}};
    j["oracle"] = {{"n_left", s.oracle.n_left},
                   {"n_right", s.oracle.n_right},
                   {"junction_state", s.oracle.junction_state},
                   {"dt_sample", s.oracle.dt_sample},
                   {"T", s.oracle.T},
                   {"tol", s.oracle.tol},
                   {"trajectories", s.oracle.trajectories},
                   {"m", s.oracle.m},
                   {"dt_noise", s.oracle.traj.dt_noise},
                   {"dt_unitary", s.oracle.traj.dt_unitary},
                   {"sample_dt", s.oracle.traj.sample_dt},
                   {"cheb_tol", s.oracle.traj.cheb_tol},
                   {"absorber",
                    {{"enabled", s.oracle.absorber.enabled},
                     {"amplitude", s.oracle.absorber.amplitude},
                     {"gamma_b", s.oracle.absorber.gamma_b},
                     {"n_sites", s.oracle.absorber.n_sites},
                     {"contact_buffer", s.oracle.absorber.contact_buffer}}}};
    if (!s.sweep.parameter.empty()) {
        j["sweep"] = {{"parameter", s.sweep.parameter},
                      {"values", s.sweep.values},
                      {"inner", to_string(s.sweep.inner)},
                      {"mirrored_baths", s.sweep.mirrored_baths}};
    }
    j["initial_state"] = s.initial_state;
    j["seed"] = s.seed;
    j["threads"] = s.threads;
    j["out_dir"] = s.out_dir;
    return j;
}

RunSpec runspec_from_json(const json& j) {
    RunSpec s;
    if (j.contains("mode")) s.mode = run_mode_from_string(j.at("mode"));
    if (j.contains("junction")) {
        const auto& u = j.at("junction");
        if (u.contains("J_S")) s.junction.J_S = u.at("J_S").get<double>();
        if (u.contains("Delta")) s.junction.Delta = u.at("Delta").get<double>();
        if (u.contains("Jz_sys")) s.junction.Jz_sys = u.at("Jz_sys").get<double>();
        if (u.contains("gamma")) s.junction.gamma = u.at("gamma").get<double>();
    }
    if (j.contains("bath_left")) {
        s.bath_left = bath_from_json(j.at("bath_left"), s.bath_left);
    }
    if (j.contains("bath_right")) {
        s.bath_right = bath_from_json(j.at("bath_right"), s.bath_right);
    }
    if (j.contains("eta")) s.eta = j.at("eta").get<double>();
    if (j.contains("grid")) {
        s.grid.dt = j.at("grid").value("dt", s.grid.dt);
        s.grid.T = j.at("grid").value("T", s.grid.T);
    }
    if (j.contains("spectral")) {
        const auto& u = j.at("spectral");
        s.spectral.omega_min = u.value("omega_min", s.spectral.omega_min);
        s.spectral.omega_max = u.value("omega_max", s.spectral.omega_max);
        s.spectral.n_omega = u.value("n_omega", s.spectral.n_omega);
        s.spectral.kernel_dt = u.value("kernel_dt", s.spectral.kernel_dt);
        s.spectral.kernel_T = u.value("kernel_T", s.spectral.kernel_T);
    }
    if (j.contains("rectify")) {
        s.rectify.method = j.at("rectify").value("method", s.rectify.method);
        s.rectify.window = j.at("rectify").value("window", s.rectify.window);
    }
    if (j.contains("oracle")) {
        const auto& u = j.at("oracle");
        s.oracle.n_left = u.value("n_left", s.oracle.n_left);
        s.oracle.n_right = u.value("n_right", s.oracle.n_right);
        s.oracle.junction_state = u.value("junction_state", s.oracle.junction_state);
        s.oracle.dt_sample = u.value("dt_sample", s.oracle.dt_sample);
        s.oracle.T = u.value("T", s.oracle.T);
        s.oracle.tol = u.value("tol", s.oracle.tol);
        s.oracle.trajectories = u.value("trajectories", s.oracle.trajectories);
        s.oracle.m = u.value("m", s.oracle.m);
        s.oracle.traj.dt_noise = u.value("dt_noise", s.oracle.traj.dt_noise);
        s.oracle.traj.dt_unitary = u.value("dt_unitary", s.oracle.traj.dt_unitary);
        s.oracle.traj.sample_dt = u.value("sample_dt", s.oracle.traj.sample_dt);
        s.oracle.traj.cheb_tol = u.value("cheb_tol", s.oracle.traj.cheb_tol);
        if (u.contains("absorber")) {
            const auto& a = u.at("absorber");
            s.oracle.absorber.enabled = a.value("enabled", s.oracle.absorber.enabled);
            s.oracle.absorber.amplitude =
                a.value("amplitude", s.oracle.absorber.amplitude);
            s.oracle.absorber.gamma_b = a.value("gamma_b", s.oracle.absorber.gamma_b);
            s.oracle.absorber.n_sites = a.value("n_sites", s.oracle.absorber.n_sites);
            s.oracle.absorber.contact_buffer =
                a.value("contact_buffer", s.oracle.absorber.contact_buffer);
        }
    }
    if (j.contains("sweep")) {
        const auto& u = j.at("sweep");
        s.sweep.parameter = u.value("parameter", std::string{});
        if (u.contains("values")) {
            s.sweep.values = u.at("values").get<std::vector<double>>();
        }
        if (u.contains("inner")) {
            s.sweep.inner = run_mode_from_string(u.at("inner"));
        }
        s.sweep.mirrored_baths = u.value("mirrored_baths", false);
    }
    if (j.contains("initial_state")) s.initial_state = j.at("initial_state");
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("threads")) s.threads = j.at("threads").get<int>();
    if (j.contains("out_dir")) s.out_dir = j.at("out_dir").get<std::string>();
    return s;
}

} // namespace

void RunSpec::validate() const {
    std::vector<std::string> errors;
    auto check = [&](bool ok, const std::string& what) {
        if (!ok) errors.push_back(what);
    };
    check(bath_left.J > 0.0, "bath_left.J must be > 0");
    check(bath_right.J > 0.0, "bath_right.J must be > 0");
    check(bath_left.beta > 0.0, "bath_left.beta must be > 0 or null (infinite)");
    check(bath_right.beta > 0.0, "bath_right.beta must be > 0 or null (infinite)");
    check(junction.gamma >= 0.0, "junction.gamma must be >= 0");
    check(eta > 0.0, "eta must be > 0");
    check(grid.dt > 0.0, "grid.dt must be > 0");
    check(grid.T >= grid.dt, "grid.T must cover at least one step");
    check(spectral.n_omega >= 2, "spectral.n_omega must be >= 2");
    check(spectral.omega_max > spectral.omega_min,
          "spectral omega range must be increasing");
    check(initial_state >= 0 && initial_state <= 3,
          "initial_state must be a junction basis index 0..3");
    check(oracle.n_left >= 0 && oracle.n_right >= 0, "oracle lead lengths >= 0");
    check(oracle.n_left + 2 + oracle.n_right <= 24,
          "oracle chain capped at 24 sites");
    check(oracle.m >= 1, "oracle.m must be >= 1");
    check(threads >= 0, "threads must be >= 0");
    if (mode == RunMode::rectify) {
        check(rectify.method == "steady" || rectify.method == "kubo" ||
                  rectify.method == "born" || rectify.method == "oracle",
              "rectify.method must be steady|kubo|born|oracle");
    }
    if (mode == RunMode::sweep) {
        check(!sweep.parameter.empty(), "sweep.parameter must be set");
        check(!sweep.values.empty(), "sweep.values must be non-empty");
        check(sweep.inner != RunMode::sweep, "sweep cannot nest");
    }
    if (!errors.empty()) {
        std::string all = "invalid run spec:";
        for (const auto& e : errors) all += "\n  - " + e;
        throw ValidationError(all);
    }
}

RunSpec parse_runspec(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        return runspec_from_json(j);
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception& e) {
        throw ValidationError(std::string("config field error: ") + e.what());
    }
}

std::string serialize_runspec(const RunSpec& spec) {
    return runspec_to_json(spec).dump(2);
}

void apply_override(RunSpec& spec, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
        throw ValidationError("override must be key=value: " + kv);
    }
    const std::string path = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);

    json doc = runspec_to_json(spec);
    json* node = &doc;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty()) throw ValidationError("empty override path");
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        node = &(*node)[parts[i]];
    }
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (...) {
        parsed = value; // plain string
    }
    (*node)[parts.back()] = parsed;
    spec = runspec_from_json(doc);
}

} // namespace sjx
