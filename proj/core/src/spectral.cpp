#include "sjx/spectral.hpp"

#include <cmath>

#include "sjx/errors.hpp"

namespace sjx {

std::vector<double> uniform_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) {
        g[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    }
    return g;
}

CorrelationKernel stationary_pi_kernel(const Eigen::Matrix4cd& rho,
                                       const JunctionSpec& junction,
                                       const LeadKernels& left,
                                       const LeadKernels& right, double dt,
                                       double T) {
    junction.validate();
    const Eigen::Matrix4cd hs = build_hs(junction).mat;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(hs);
    const Eigen::Vector4d energies = es.eigenvalues();
    const Eigen::Matrix4cd v = es.eigenvectors();

    const auto n = static_cast<std::size_t>(std::llround(T / dt)) + 1;
    std::vector<cplx> samples(n, cplx(0.0, 0.0));

    for (int s = 0; s < 2; ++s) {
        const auto& kern = (s == 0) ? left : right;
        const double side_sign = (s == 0) ? 0.5 : -0.5; // (Pi_L - Pi_R)/2
        const Eigen::Matrix4cd sig =
            junction_sigma(s == 0 ? Side::left : Side::right).mat;
        // eigenbasis weights: m_raise(tau) = sum_ab e^{i w_ab tau} W_ab
        const Eigen::Matrix4cd sd_eig = v.adjoint() * sig.adjoint() * v;
        const Eigen::Matrix4cd s_eig = v.adjoint() * sig * v;
        const Eigen::Matrix4cd rho_eig = v.adjoint() * rho * v;

        std::vector<cplx> ch(n), cp(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double tau = dt * static_cast<double>(k);
            ch[k] = kern.hole.zero ? cplx(0.0, 0.0) : kern.hole.eval(tau);
            cp[k] = kern.particle.zero ? cplx(0.0, 0.0) : kern.particle.eval(tau);
        }
        for (std::size_t k = 0; k < n; ++k) {
            const double tau = dt * static_cast<double>(k);
            cplx raise(0.0, 0.0), lower(0.0, 0.0);
            for (int a = 0; a < 4; ++a) {
                for (int b = 0; b < 4; ++b) {
                    const cplx ph =
                        std::exp(cplx(0.0, (energies(a) - energies(b)) * tau));
                    // tr{ e^{iHt} X e^{-iHt} Y rho } in the eigenbasis
                    raise += ph * sd_eig(a, b) * (s_eig * rho_eig)(b, a);
                    lower += ph * s_eig(a, b) * (sd_eig * rho_eig)(b, a);
                }
            }
            const cplx w = cp[k] * raise - ch[k] * lower;
            samples[k] += side_sign * cplx(0.0, -1.0) * (w + std::conj(w));
        }
    }
    auto out = CorrelationKernel::tabulated_from(std::move(samples), dt, 4.0);
    return out;
}

SpectralSeries spectral_function(const CorrelationKernel& kernel, double eta,
                                 const std::vector<double>& omegas) {
    if (kernel.values.empty() || kernel.dt <= 0.0) {
        throw ValidationError("spectral_function: kernel must be tabulated");
    }
    const double nyquist = M_PI / kernel.dt;
    for (double w : omegas) {
        if (std::abs(w) > nyquist) {
            throw ValidationError("spectral_function: omega beyond the grid Nyquist "
                                  "frequency " + std::to_string(nyquist));
        }
    }
    // the retarded kernel must be purely imaginary (h.c.-paired assembly)
    double residue = 0.0;
    double scale = 0.0;
    for (const cplx& s : kernel.values) {
        residue = std::max(residue, std::abs(s.real()));
        scale = std::max(scale, std::abs(s));
    }
    if (residue > 1e-8 * std::max(scale, 1e-300)) {
        throw NumericError("spectral_function: kernel has a real residue " +
                           std::to_string(residue));
    }

    SpectralSeries out;
    out.eta = eta;
    out.omegas = omegas;
    out.values.resize(omegas.size());
    const std::size_t n = kernel.values.size();
    const double dt = kernel.dt;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        cplx acc(0.0, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const double tau = dt * static_cast<double>(k);
            cplx term = std::exp(cplx(-eta * tau, omegas[i] * tau)) * kernel.values[k];
            if (k == 0 || k + 1 == n) term *= 0.5;
            acc += term;
        }
        out.values[i] = (acc * dt).imag();
    }
    return out;
}

RectificationReport rectification(const CurrentTrace& plus,
                                  const CurrentTrace& minus, double T,
                                  double delta) {
    if (plus.times.size() != minus.times.size() || plus.times.empty()) {
        throw ValidationError("rectification: traces must share their grid");
    }
    const double dt = plus.times[1] - plus.times[0];
    if (T > plus.times.back() + 0.5 * dt) {
        throw ValidationError("rectification: window exceeds the trace horizon");
    }
    auto window_average = [&](const CurrentTrace& tr) {
        double acc = 0.0;
        std::size_t k = 1;
        for (; k < tr.times.size() && tr.times[k] <= T + 1e-12; ++k) {
            acc += 0.5 * dt * (tr.total[k - 1] + tr.total[k]);
        }
        return acc / tr.times[k - 1];
    };

    RectificationReport rep;
    rep.delta = delta;
    rep.window = T;
    rep.avg_current_plus = window_average(plus);
    rep.avg_current_minus = window_average(minus);
    const double den = rep.avg_current_plus + rep.avg_current_minus;
    if (std::abs(den) < 1e-14) {
        throw NumericError("rectification: averaged currents cancel, R undefined");
    }
    rep.rectification = (rep.avg_current_plus - rep.avg_current_minus) / den;
    // current carried in the favored direction, times |R|; reduces to
    // I_{sign(R) Delta} R for R >= 0 and keeps D invariant under relabeling
    // Delta -> -Delta
    const double carried = (rep.rectification >= 0.0) ? rep.avg_current_plus
                                                      : rep.avg_current_minus;
    rep.diode_factor = carried * std::abs(rep.rectification);
    return rep;
}

double kubo_rectification_closed(double j_s, double delta) {
    if (delta == 0.0) return 0.0;
    return delta / std::hypot(j_s, delta);
}

} // namespace sjx
