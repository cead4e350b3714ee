#include "sjx/bath.hpp"

#include <cmath>

#include "sjx/bessel.hpp"
#include "sjx/errors.hpp"

namespace sjx {

void BathSpec::validate() const {
    if (!(J > 0.0)) throw ValidationError("BathSpec: J must be positive");
    if (!(beta > 0.0)) throw ValidationError("BathSpec: beta must be positive or +inf");
}

// ----------------------------- correlation kernel ---------------------------

cplx CorrelationKernel::eval(double t) const {
    if (zero) return {0.0, 0.0};
    switch (kind) {
    case Kind::analytic_bessel:
        return corr_xxz_hp(t, spec);
    case Kind::quadrature:
        return corr_xx_numeric(t, spec);
    case Kind::callable:
        return fn ? fn(t) : cplx(0.0, 0.0);
    case Kind::tabulated: {
        if (values.empty() || dt <= 0.0) return {0.0, 0.0};
        const double x = t / dt;
        const auto k = static_cast<std::size_t>(x);
        if (k + 1 >= values.size()) return values.back();
        const double f = x - static_cast<double>(k);
        return (1.0 - f) * values[k] + f * values[k + 1];
    }
    }
    return {0.0, 0.0};
}

void CorrelationKernel::tabulate(double step, double T) {
    if (zero) {
        dt = step;
        values.assign(static_cast<std::size_t>(T / step) + 1, cplx(0.0, 0.0));
        return;
    }
    if (kind == Kind::tabulated && !values.empty()) return;
    const auto n = static_cast<std::size_t>(std::llround(T / step)) + 1;
    std::vector<cplx> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = eval(step * static_cast<double>(k));
    dt = step;
    values = std::move(v);
}

CorrelationKernel CorrelationKernel::bessel(const BathSpec& spec) {
    spec.validate();
    CorrelationKernel k;
    k.kind = Kind::analytic_bessel;
    k.spec = spec;
    k.osc_freq = 4.0 * spec.J;
    return k;
}

CorrelationKernel CorrelationKernel::xx_numeric(const BathSpec& spec, double step,
                                                double T) {
    spec.validate();
    CorrelationKernel k;
    k.kind = Kind::quadrature;
    k.spec = spec;
    k.osc_freq = 4.0 * spec.J;
    if (step > 0.0 && T > 0.0) {
        // pre-tabulate; quadrature per call is wasteful in inner loops
        const auto n = static_cast<std::size_t>(std::llround(T / step)) + 1;
        k.values.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            k.values[i] = corr_xx_numeric(step * static_cast<double>(i), spec);
        }
        k.dt = step;
        k.kind = Kind::tabulated;
    }
    return k;
}

CorrelationKernel CorrelationKernel::tabulated_from(std::vector<cplx> samples,
                                                    double step, double osc) {
    CorrelationKernel k;
    k.kind = Kind::tabulated;
    k.dt = step;
    k.values = std::move(samples);
    k.osc_freq = osc;
    return k;
}

CorrelationKernel CorrelationKernel::zero_kernel() {
    CorrelationKernel k;
    k.zero = true;
    return k;
}

CorrelationKernel CorrelationKernel::constant_one() {
    CorrelationKernel k;
    k.kind = Kind::callable;
    k.fn = [](double) { return cplx(1.0, 0.0); };
    return k;
}

CorrelationKernel CorrelationKernel::sharp_exponential(double w) {
    CorrelationKernel k;
    k.kind = Kind::tabulated;
    const double step = w / 50.0;
    const double T = 30.0 * w;
    const auto n = static_cast<std::size_t>(T / step) + 1;
    k.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = step * static_cast<double>(i);
        k.values[i] = std::exp(-t / w) / w;
    }
    k.dt = step;
    return k;
}

bool CorrelationKernel::check_normalized() const {
    if (zero) return false;
    if (std::abs(eval(0.0) - 1.0) > 1e-10) return false;
    if (!values.empty()) {
        for (const cplx& v : values) {
            if (std::abs(v) > 1.0 + 1e-10) return false;
        }
    }
    return true;
}

LeadKernels lead_kernels(const BathSpec& spec) {
    spec.validate();
    LeadKernels out;
    if (spec.polarization == Polarization::up) {
        out.hole = CorrelationKernel::bessel(spec);
        out.particle = CorrelationKernel::zero_kernel();
    } else {
        out.hole = CorrelationKernel::zero_kernel();
        out.particle = CorrelationKernel::bessel(spec);
    }
    return out;
}

// -------------------------------- operations --------------------------------

cplx corr_xxz_hp(double t, const BathSpec& spec) {
    const double phase = 4.0 * spec.Jz * t;
    return cplx(std::cos(phase), std::sin(phase)) * bessel_j0(4.0 * spec.J * t);
}

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1]
constexpr double kGlx[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
    0.9445750230732326, 0.9894009349916499};
constexpr double kGlw[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
    0.0622535239386479, 0.0271524594117541};

double fermi(double beta, double omega, double mu) {
    if (std::isinf(beta)) {
        if (omega < mu) return 1.0;
        if (omega > mu) return 0.0;
        return 0.5;
    }
    return 1.0 / (1.0 + std::exp(beta * (omega - mu)));
}

// integral of f over [a, b] with composite GL16 panels
template <class F>
cplx gl_panels(const F& f, double a, double b, int panels) {
    cplx sum(0.0, 0.0);
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        const double half = 0.5 * h;
        for (int i = 0; i < 8; ++i) {
            sum += kGlw[i] * half * (f(mid + half * kGlx[i]) + f(mid - half * kGlx[i]));
        }
    }
    return sum;
}

} // namespace

cplx corr_xx_numeric(double t, const BathSpec& spec, double tol) {
    if (t < 0.0) throw ValidationError("corr_xx_numeric: t must be >= 0");
    const double band = 4.0 * spec.J;
    const double x = band * t;
    // theta substitution removes the density-of-states endpoint singularity:
    // G = (1/pi) int_{-pi/2}^{pi/2} n(band sin th) exp(i x sin th) dth
    auto integrand = [&](double th) {
        const double w = band * std::sin(th);
        const double n = fermi(spec.beta, w, spec.mu);
        return n * cplx(std::cos(x * std::sin(th)), std::sin(x * std::sin(th)));
    };
    // split at the Fermi angle when the step discontinuity lies in-band
    std::vector<double> edges{-0.5 * M_PI, 0.5 * M_PI};
    if (std::isinf(spec.beta) && std::abs(spec.mu) < band) {
        edges.insert(edges.begin() + 1, std::asin(spec.mu / band));
    }
    auto run = [&](int boost) {
        cplx acc(0.0, 0.0);
        for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
            const double width = edges[e + 1] - edges[e];
            const int panels =
                std::max(2, static_cast<int>(std::ceil(x * width / M_PI)) + 2) * boost;
            acc += gl_panels(integrand, edges[e], edges[e + 1], panels);
        }
        return acc / M_PI;
    };
    const cplx coarse = run(1);
    const cplx fine = run(2);
    const double err = std::abs(fine - coarse);
    if (err > tol) {
        const cplx finer = run(4);
        if (std::abs(finer - fine) > tol) {
            throw NumericError("corr_xx_numeric: quadrature non-convergence, "
                               "achieved error estimate " +
                               std::to_string(std::abs(finer - fine)));
        }
        return finer * std::exp(cplx(0.0, 4.0 * spec.Jz * t));
    }
    return fine * std::exp(cplx(0.0, 4.0 * spec.Jz * t));
}

DecayRate decay_rate(double omega, const BathSpec& spec, double gamma, double epsilon) {
    if (!(epsilon > 0.0)) throw ValidationError("decay_rate: epsilon must be > 0");
    const double a = 4.0 * spec.J;
    const double b = 4.0 * spec.Jz + omega;
    DecayRate out;
    out.near_singular = std::abs(std::abs(b) - a) <= epsilon;
    const cplx root =
        std::sqrt(cplx(b - a, epsilon)) * std::sqrt(cplx(b + a, epsilon));
    out.value = cplx(0.0, gamma * gamma) / root;
    if (out.value.real() < -1e-12 * std::abs(out.value)) {
        throw NumericError("decay_rate: branch produced negative decay");
    }
    return out;
}

HalfFourier half_fourier(const CorrelationKernel& kernel, double omega,
                         double damping, double dt, double T, double tail_tol) {
    if (kernel.zero) return {};
    double step = dt;
    double horizon = T;
    std::vector<cplx> samples;
    const std::vector<cplx>* data = nullptr;
    if (!kernel.values.empty() && (dt <= 0.0 || T <= 0.0)) {
        data = &kernel.values;
        step = kernel.dt;
        horizon = kernel.horizon();
    } else {
        if (step <= 0.0) step = kDefaultKernelDt;
        if (horizon <= 0.0) horizon = kDefaultKernelT;
        const auto n = static_cast<std::size_t>(std::llround(horizon / step)) + 1;
        samples.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            samples[k] = kernel.eval(step * static_cast<double>(k));
        }
        data = &samples;
    }

    cplx acc(0.0, 0.0);
    const std::size_t n = data->size();
    for (std::size_t k = 0; k < n; ++k) {
        const double tau = step * static_cast<double>(k);
        const cplx phase(std::cos(omega * tau), std::sin(omega * tau));
        cplx term = phase * std::exp(-damping * tau) * (*data)[k];
        if (k == 0 || k + 1 == n) term *= 0.5;
        acc += term;
    }
    HalfFourier out;
    out.value = acc * step;

    // Truncation bound: kernel envelope near the horizon (max over the last
    // stretch, so an oscillation zero at T does not fool the bound) divided
    // by the fastest of damping, dominant oscillation, and the kernel's own
    // observed decay rate.
    const std::size_t back = std::min<std::size_t>(n, 200);
    double env = 0.0;
    double env_prev = 0.0;
    for (std::size_t k = n - back; k < n; ++k) env = std::max(env, std::abs((*data)[k]));
    if (n >= 2 * back) {
        for (std::size_t k = n - 2 * back; k < n - back; ++k) {
            env_prev = std::max(env_prev, std::abs((*data)[k]));
        }
    }
    double own_decay = 0.0;
    if (env_prev > 0.0 && env > 0.0 && env < env_prev) {
        own_decay = std::log(env_prev / env) / (static_cast<double>(back) * step);
    }
    env *= std::exp(-damping * horizon);
    const double rate = std::max({damping, std::abs(kernel.osc_freq), own_decay});
    out.tail_estimate = env / rate;
    if (out.tail_estimate > tail_tol * std::max(std::abs(out.value), 1e-30)) {
        throw NumericError("half_fourier: horizon too short, tail estimate " +
                           std::to_string(out.tail_estimate));
    }
    return out;
}

double a_xxz_zero(const BathSpec& spec) {
    const double d = spec.J * spec.J - spec.Jz * spec.Jz;
    if (d == 0.0) return std::numeric_limits<double>::infinity();
    if (d < 0.0) return 0.0;
    return 0.5 / std::sqrt(2.0 * M_PI * d);
}

RateEval rate_eval(const CorrelationKernel& kernel, double eta, double omega) {
    RateEval out;
    if (kernel.zero) return out;
    if (kernel.kind == CorrelationKernel::Kind::analytic_bessel) {
        const auto r = decay_rate(omega, kernel.spec, 1.0, eta);
        out.value = r.value;
        out.near_singular = r.near_singular;
        return out;
    }
    CorrelationKernel tab = kernel;
    if (tab.values.empty()) tab.tabulate(kDefaultKernelDt, kDefaultKernelT);
    out.value = half_fourier(tab, omega, eta).value;
    return out;
}

std::function<cplx(double)> rate_function(const CorrelationKernel& kernel, double eta) {
    if (kernel.zero) {
        return [](double) { return cplx(0.0, 0.0); };
    }
    if (kernel.kind == CorrelationKernel::Kind::analytic_bessel) {
        const BathSpec spec = kernel.spec;
        return [spec, eta](double omega) {
            return decay_rate(omega, spec, 1.0, eta).value;
        };
    }
    // capture a tabulated copy once
    CorrelationKernel tab = kernel;
    if (tab.values.empty()) tab.tabulate(kDefaultKernelDt, kDefaultKernelT);
    return [tab, eta](double omega) { return half_fourier(tab, omega, eta).value; };
}

} // namespace sjx
