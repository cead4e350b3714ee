#include "sjx/pipeline.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sjx/born.hpp"
#include "sjx/chain.hpp"
#include "sjx/errors.hpp"
#include "sjx/spectral.hpp"
#include "sjx/steady.hpp"

namespace sjx {

using nlohmann::json;
namespace fs = std::filesystem;

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

namespace {

struct Sink {
    fs::path dir;
    ResultBundle* bundle;

    void write(const std::string& name, const std::string& contents) const {
        fs::create_directories(dir);
        const fs::path p = dir / name;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw NumericError("cannot write " + p.string());
        out << contents;
        out.close();
        char hex[17];
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(contents)));
        bundle->artifacts.push_back(
            {fs::relative(p, dir).string(), contents.size(), hex});
    }
};

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string trace_csv(const CurrentTrace& tr) {
    std::ostringstream out;
    out << "t,I_L,I_R,I\n";
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        out << format_double(tr.times[k]) << ',' << format_double(tr.left[k]) << ','
            << format_double(tr.right[k]) << ',' << format_double(tr.total[k])
            << '\n';
    }
    return out.str();
}

std::string kernel_csv(const CorrelationKernel& k, double dt, double T) {
    std::ostringstream out;
    out << "t,re,im\n";
    const auto n = static_cast<std::size_t>(T / dt) + 1;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = dt * static_cast<double>(i);
        const cplx v = k.eval(t);
        out << format_double(t) << ',' << format_double(v.real()) << ','
            << format_double(v.imag()) << '\n';
    }
    return out.str();
}

json steady_json(const SteadyReport& rep) {
    json j;
    j["degenerate"] = rep.degenerate;
    if (!rep.degenerate) {
        j["current_left"] = rep.current_left;
        j["current_right"] = rep.current_right;
        j["current"] = rep.current;
        j["residual"] = rep.residual;
        j["trace_error"] = rep.trace_error;
        j["min_eigenvalue"] = rep.min_eigenvalue;
        j["gap"] = rep.gap;
        json rho = json::array();
        for (int r = 0; r < 4; ++r) {
            json row = json::array();
            for (int c = 0; c < 4; ++c) {
                row.push_back({rep.rho(r, c).real(), rep.rho(r, c).imag()});
            }
            rho.push_back(row);
        }
        j["rho"] = rho;
    } else {
        j["steady_space_dim"] = rep.steady_basis.size();
    }
    j["warnings"] = rep.warnings;
    return j;
}

CurrentTrace steady_as_trace(double current, double t_final) {
    CurrentTrace tr;
    tr.method = "steady";
    for (double t : {0.0, t_final}) {
        tr.times.push_back(t);
        tr.left.push_back(current);
        tr.right.push_back(-current);
        tr.total.push_back(current);
    }
    return tr;
}

CurrentTrace oracle_trace(const ChainTrajectory& tr) {
    CurrentTrace out;
    out.method = "oracle";
    out.times = tr.times;
    out.total = tr.current;
    out.left.assign(tr.times.size(), 0.0);
    out.right.assign(tr.times.size(), 0.0);
    return out;
}

std::string bond_heatmap_csv(const std::vector<double>& times,
                             const std::vector<Eigen::VectorXd>& bonds) {
    std::ostringstream out;
    out << "t";
    if (!bonds.empty()) {
        for (Eigen::Index b = 0; b < bonds.front().size(); ++b) out << ",bond" << b;
    }
    out << '\n';
    for (std::size_t k = 0; k < times.size(); ++k) {
        out << format_double(times[k]);
        for (Eigen::Index b = 0; b < bonds[k].size(); ++b) {
            out << ',' << format_double(bonds[k](b));
        }
        out << '\n';
    }
    return out.str();
}

int resolve_threads(const RunSpec& spec) {
    if (spec.threads > 0) return spec.threads;
    if (const char* env = std::getenv("SJX_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

ChainSpec chain_spec_of(const RunSpec& spec) {
    ChainSpec c;
    c.n_left = spec.oracle.n_left;
    c.n_right = spec.oracle.n_right;
    c.bath_left = spec.bath_left;
    c.bath_right = spec.bath_right;
    c.junction = spec.junction;
    c.junction_state = spec.oracle.junction_state;
    return c;
}

CurrentTrace trace_for_method(const RunSpec& spec, const std::string& method,
                              ResultBundle& bundle) {
    const auto left = lead_kernels(spec.bath_left);
    const auto right = lead_kernels(spec.bath_right);
    const Eigen::Matrix4cd rho0 = junction_basis_state(spec.initial_state);
    if (method == "kubo") {
        return kubo_current(spec.junction, left, right, rho0, spec.grid.dt,
                            spec.rectify.window);
    }
    if (method == "born") {
        BornOptions o;
        o.dt = spec.grid.dt;
        o.T = spec.grid.T;
        auto mh = integrate_born(rho0, spec.junction, left, right, o);
        for (const auto& w : mh.warnings) bundle.warnings.push_back(w);
        bundle.steps += mh.times.size();
        return born_current(mh);
    }
    if (method == "oracle") {
        auto tr = evolve_unitary(chain_spec_of(spec), spec.oracle.dt_sample,
                                 spec.oracle.T, spec.oracle.tol);
        return oracle_trace(tr);
    }
    // steady: GME current as a constant trace
    auto rep = steady_state_global(spec.junction, spec.bath_left, spec.bath_right,
                                   spec.eta);
    for (const auto& w : rep.warnings) bundle.warnings.push_back(w);
    if (rep.degenerate) {
        throw NumericError("rectify: degenerate steady space");
    }
    return steady_as_trace(rep.current, spec.rectify.window);
}

void run_correlations(const RunSpec& spec, Sink& sink) {
    const auto left = lead_kernels(spec.bath_left);
    const auto right = lead_kernels(spec.bath_right);
    const double dt = spec.spectral.kernel_dt;
    const double T = std::min(spec.spectral.kernel_T, 100.0);
    auto pick = [](const LeadKernels& k) {
        return k.hole.zero ? k.particle : k.hole;
    };
    sink.write("corr_left.csv", kernel_csv(pick(left), dt, T));
    sink.write("corr_right.csv", kernel_csv(pick(right), dt, T));

    json j;
    j["a_xxz_zero_left"] = a_xxz_zero(spec.bath_left);
    j["a_xxz_zero_right"] = a_xxz_zero(spec.bath_right);
    json rates = json::array();
    for (double w = -10.0; w <= 10.0 + 1e-9; w += 0.1) {
        const auto r = decay_rate(w, spec.bath_left, spec.junction.gamma, spec.eta);
        rates.push_back({{"omega", w},
                         {"re", r.value.real()},
                         {"im", r.value.imag()},
                         {"near_singular", r.near_singular}});
    }
    j["decay_rate_left"] = rates;
    sink.write("correlations.json", j.dump(2));
}

void run_born_mode(const RunSpec& spec, Sink& sink, ResultBundle& bundle) {
    const auto left = lead_kernels(spec.bath_left);
    const auto right = lead_kernels(spec.bath_right);
    BornOptions o;
    o.dt = spec.grid.dt;
    o.T = spec.grid.T;
    auto mh = integrate_born(junction_basis_state(spec.initial_state), spec.junction,
                             left, right, o);
    bundle.steps += mh.times.size();
    for (const auto& w : mh.warnings) bundle.warnings.push_back(w);
    auto tr = born_current(mh);
    sink.write("current_born.csv", trace_csv(tr));
    json j;
    j["final_current"] = tr.total.back();
    j["min_eigenvalue_seen"] = mh.min_eigenvalue_seen;
    j["negativity_flagged"] = mh.negativity_flagged;
    sink.write("born.json", j.dump(2));
}

void run_kubo_mode(const RunSpec& spec, Sink& sink, ResultBundle& bundle) {
    const auto left = lead_kernels(spec.bath_left);
    const auto right = lead_kernels(spec.bath_right);
    auto tr = kubo_current(spec.junction, left, right,
                           junction_basis_state(spec.initial_state), spec.grid.dt,
                           spec.grid.T);
    bundle.steps += tr.times.size();
    sink.write("current_kubo.csv", trace_csv(tr));
}

void run_steady_mode(const RunSpec& spec, Sink& sink, ResultBundle& bundle) {
    auto global = steady_state_global(spec.junction, spec.bath_left, spec.bath_right,
                                      spec.eta);
    auto local = steady_state_local(spec.junction, spec.bath_left, spec.bath_right,
                                    spec.eta);
    for (const auto& w : global.warnings) bundle.warnings.push_back(w);
    for (const auto& w : local.warnings) bundle.warnings.push_back(w);
    json j;
    j["redfield_global"] = steady_json(global);
    j["lindblad_local"] = steady_json(local);
    sink.write("steady.json", j.dump(2));
}

void run_spectral_mode(const RunSpec& spec, Sink& sink, ResultBundle& bundle) {
    auto rep = steady_state_global(spec.junction, spec.bath_left, spec.bath_right,
                                   spec.eta);
    if (rep.degenerate) throw NumericError("spectral: degenerate steady space");
    for (const auto& w : rep.warnings) bundle.warnings.push_back(w);
    const auto left = lead_kernels(spec.bath_left);
    const auto right = lead_kernels(spec.bath_right);
    auto pi = stationary_pi_kernel(rep.rho, spec.junction, left, right,
                                   spec.spectral.kernel_dt, spec.spectral.kernel_T);
    auto series = spectral_function(
        pi, spec.eta,
        uniform_grid(spec.spectral.omega_min, spec.spectral.omega_max,
                     spec.spectral.n_omega));
    std::ostringstream csv;
    csv << "omega,A\n";
    for (std::size_t k = 0; k < series.omegas.size(); ++k) {
        csv << format_double(series.omegas[k]) << ','
            << format_double(series.values[k]) << '\n';
    }
    sink.write("spectral.csv", csv.str());

    auto at_zero = spectral_function(pi, spec.eta, {0.0});
    json j;
    j["A_zero"] = at_zero.values[0];
    j["eta"] = spec.eta;
    j["asymptotic_current"] =
        8.0 * spec.junction.gamma * spec.junction.gamma * at_zero.values[0];
    j["steady_current_gme"] = rep.current;
    j["fourier_convention"] = SpectralSeries::kConvention;
    sink.write("spectral.json", j.dump(2));
}

void run_rectify_mode(const RunSpec& spec, Sink& sink, ResultBundle& bundle) {
    RunSpec plus = spec;
    RunSpec minus = spec;
    minus.junction.Delta = -spec.junction.Delta;
    auto tp = trace_for_method(plus, spec.rectify.method, bundle);
    auto tm = trace_for_method(minus, spec.rectify.method, bundle);
    const double window =
        (spec.rectify.method == "steady")
            ? spec.rectify.window
            : std::min(spec.rectify.window, std::min(tp.times.back(), tm.times.back()));
    auto rep = rectification(tp, tm, window, spec.junction.Delta);
    json j;
    j["method"] = spec.rectify.method;
    j["delta"] = rep.delta;
    j["window"] = rep.window;
    j["avg_current_plus"] = rep.avg_current_plus;
    j["avg_current_minus"] = rep.avg_current_minus;
    j["rectification"] = rep.rectification;
    j["diode_factor"] = rep.diode_factor;
    sink.write("rectification.json", j.dump(2));
}

void run_oracle_mode(const RunSpec& spec, Sink& sink, ResultBundle& bundle) {
    const auto chain = chain_spec_of(spec);
    if (!spec.oracle.trajectories) {
        auto tr = evolve_unitary(chain, spec.oracle.dt_sample, spec.oracle.T,
                                 spec.oracle.tol);
        bundle.steps += tr.times.size();
        sink.write("bond_currents.csv", bond_heatmap_csv(tr.times, tr.bond_currents));
        sink.write("current_oracle.csv", trace_csv(oracle_trace(tr)));
        return;
    }
    TrajectoryOptions o = spec.oracle.traj;
    o.T = spec.oracle.T;
    o.seed = spec.seed;
    auto ens = ensemble_average(chain, spec.oracle.absorber, spec.oracle.absorber, o,
                                spec.oracle.m, resolve_threads(spec));
    for (const auto& w : ens.warnings) bundle.warnings.push_back(w);
    sink.write("bond_currents_ensemble.csv",
               bond_heatmap_csv(ens.times, ens.mean_bond_currents));
    sink.write("bond_currents_se.csv",
               bond_heatmap_csv(ens.times, ens.se_bond_currents));
    // reference without absorbers, for the with/without contrast
    auto uni = evolve_unitary(chain, std::max(spec.oracle.traj.sample_dt, 0.01),
                              spec.oracle.T, spec.oracle.tol);
    sink.write("bond_currents_unitary.csv",
               bond_heatmap_csv(uni.times, uni.bond_currents));
    json j;
    j["trajectories"] = ens.trajectories;
    j["seed"] = static_cast<std::uint64_t>(ens.seed);
    j["final_mean_current"] = ens.mean_current.back();
    j["final_se_current"] = ens.se_current.back();
    sink.write("ensemble.json", j.dump(2));
}

void run_single(const RunSpec& spec, Sink& sink, ResultBundle& bundle) {
    switch (spec.mode) {
    case RunMode::correlations: run_correlations(spec, sink); break;
    case RunMode::born: run_born_mode(spec, sink, bundle); break;
    case RunMode::kubo: run_kubo_mode(spec, sink, bundle); break;
    case RunMode::steady: run_steady_mode(spec, sink, bundle); break;
    case RunMode::spectral: run_spectral_mode(spec, sink, bundle); break;
    case RunMode::rectify: run_rectify_mode(spec, sink, bundle); break;
    case RunMode::oracle: run_oracle_mode(spec, sink, bundle); break;
    case RunMode::sweep: throw ValidationError("sweep cannot nest");
    }
}

void run_sweep(const RunSpec& spec, Sink& sink, ResultBundle& bundle) {
    json points = json::array();
    for (std::size_t i = 0; i < spec.sweep.values.size(); ++i) {
        const double v = spec.sweep.values[i];
        RunSpec point = spec;
        point.mode = spec.sweep.inner;
        char key[64];
        std::snprintf(key, sizeof(key), "point_%03zu", i);
        try {
            apply_override(point, spec.sweep.parameter + "=" + format_double(v));
            if (spec.sweep.mirrored_baths) {
                // convenience: sweep both leads' anisotropy together
                apply_override(point, "bath_right.Jz=" + format_double(
                                          point.bath_left.Jz));
            }
            point.validate();
            Sink sub{sink.dir / key, sink.bundle};
            run_single(point, sub, bundle);
            json entry;
            entry["value"] = v;
            entry["dir"] = key;
            entry["ok"] = true;
            // surface rectification summaries directly in the sweep table
            const fs::path rect = sink.dir / key / "rectification.json";
            if (fs::exists(rect)) {
                std::ifstream in(rect);
                json r = json::parse(in);
                entry["rectification"] = r["rectification"];
                entry["diode_factor"] = r["diode_factor"];
                entry["avg_current_plus"] = r["avg_current_plus"];
            }
            const fs::path steady = sink.dir / key / "steady.json";
            if (fs::exists(steady)) {
                std::ifstream in(steady);
                json r = json::parse(in);
                if (!r["redfield_global"]["degenerate"].get<bool>()) {
                    entry["current_gme"] = r["redfield_global"]["current"];
                    entry["current_lme"] = r["lindblad_local"]["current"];
                }
            }
            points.push_back(entry);
        } catch (const std::exception& e) {
            bundle.warnings.push_back(std::string("sweep point ") + key +
                                      " failed: " + e.what());
            points.push_back({{"value", v}, {"dir", key}, {"ok", false},
                              {"error", e.what()}});
        }
    }
    json j;
    j["parameter"] = spec.sweep.parameter;
    j["inner"] = to_string(spec.sweep.inner);
    j["points"] = points;
    sink.write("sweep.json", j.dump(2));
}

} // namespace

ResultBundle run(const RunSpec& spec) {
    spec.validate();
    const auto t0 = std::chrono::steady_clock::now();
    ResultBundle bundle;
    bundle.spec = spec;
    bundle.threads_used = resolve_threads(spec);
    Sink sink{fs::path(spec.out_dir), &bundle};

    if (spec.mode == RunMode::sweep) {
        run_sweep(spec, sink, bundle);
    } else {
        run_single(spec, sink, bundle);
    }

    bundle.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json manifest;
    manifest["runspec"] = json::parse(serialize_runspec(spec));
    json arts = json::array();
    for (const auto& a : bundle.artifacts) {
        arts.push_back({{"path", a.path}, {"bytes", a.bytes}, {"fnv64", a.fnv64}});
    }
    manifest["artifacts"] = arts;
    manifest["warnings"] = bundle.warnings;
    manifest["wall_seconds"] = bundle.wall_seconds;
    manifest["threads"] = bundle.threads_used;
    manifest["steps"] = bundle.steps;
    fs::create_directories(sink.dir);
    std::ofstream out(sink.dir / "manifest.json", std::ios::binary);
    out << manifest.dump(2);
    return bundle;
}

} // namespace sjx
