// Lead two-time correlation functions, half-line Fourier transforms (decay
// rates), and the lead zero-frequency spectral function.
//
// The polarized-lead kernel is normalized so kernel(0) = 1. For a lead
// polarized "up" the active channel is <B+(t) B(0)>; for "down" it is
// <B(t) B+(0)>. Both share the same functional form e^{i 4 Jz t} J0(4 J t)
// in the large-bias regime.

#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "sjx/operators.hpp"

namespace sjx {

enum class Polarization { up, down };

struct BathSpec {
    double J{1.0};       // lead exchange (global energy unit)
    double Jz{0.0};      // lead anisotropy
    double mu{100.0};    // chemical-potential bias
    double beta{std::numeric_limits<double>::infinity()}; // inverse temperature
    Polarization polarization{Polarization::up};

    void validate() const; // throws ValidationError
};

// ----------------------------- correlation kernel ---------------------------

struct CorrelationKernel {
    enum class Kind { analytic_bessel, quadrature, tabulated, callable };

    Kind kind{Kind::tabulated};
    BathSpec spec;                    // meaningful for analytic/quadrature kinds
    double dt{0.0};                   // uniform grid step (tabulated samples)
    std::vector<cplx> values;         // samples at t_k = k dt
    std::function<cplx(double)> fn;   // callable kind
    double osc_freq{0.0};             // dominant oscillation scale, for tail bounds
    bool zero{false};                 // identically-zero channel

    cplx eval(double t) const;        // analytic kinds evaluate, tabulated interpolates
    double horizon() const { return values.empty() ? 0.0 : dt * (values.size() - 1); }
    void tabulate(double step, double T);

    static CorrelationKernel bessel(const BathSpec& spec);
    static CorrelationKernel xx_numeric(const BathSpec& spec, double step, double T);
    static CorrelationKernel tabulated_from(std::vector<cplx> samples, double step,
                                            double osc = 0.0);
    static CorrelationKernel zero_kernel();
    static CorrelationKernel constant_one();
    // (1/w) e^{-t/w}: delta-like memory, flat spectrum of unit weight
    static CorrelationKernel sharp_exponential(double w);

    // kernel(0) = 1 and |kernel| <= 1, within 1e-10 (polarized-lead contract)
    bool check_normalized() const;
};

// Both channels of one lead. The inactive channel of a maximally polarized
// lead vanishes identically at leading Holstein-Primakoff order.
struct LeadKernels {
    CorrelationKernel hole;     // <B+(t) B(0)>
    CorrelationKernel particle; // <B(t) B+(0)>
};

LeadKernels lead_kernels(const BathSpec& spec);

// -------------------------------- operations --------------------------------

// e^{i 4 Jz t} J0(4 J t): polarized-lead correlation, mu >> J.
cplx corr_xxz_hp(double t, const BathSpec& spec);

// Band quadrature with inverse-square-root endpoint handling (theta
// substitution). Fermi occupation n(beta, omega, mu); beta may be +inf.
// `tol` is the requested absolute accuracy of the quadrature.
cplx corr_xx_numeric(double t, const BathSpec& spec, double tol = 1e-9);

struct DecayRate {
    cplx value{0.0, 0.0};
    bool near_singular{false};
};

// i gamma^2 [(4 Jz + omega + i eps)^2 - (4J)^2]^{-1/2} on the branch with
// Re >= 0, realized as the product of principal square roots of the two
// linear factors (4Jz + omega +- 4J + i eps).
DecayRate decay_rate(double omega, const BathSpec& spec, double gamma, double epsilon);

struct HalfFourier {
    cplx value{0.0, 0.0};
    double tail_estimate{0.0};
};

// Trapezoidal int_0^T e^{i omega tau} e^{-damping tau} kernel(tau) dtau.
// Throws NumericError when the estimated truncation tail exceeds `tail_tol`
// relative to the computed value.
HalfFourier half_fourier(const CorrelationKernel& kernel, double omega,
                         double damping, double dt = 0.0, double T = 0.0,
                         double tail_tol = 0.02);

// Re{[2 pi (J^2 - Jz^2)]^{-1/2}} / 2; +inf at the Heisenberg point.
double a_xxz_zero(const BathSpec& spec);

// ------------------------------ rate provider -------------------------------

// Half-line transform of a channel kernel as a function of frequency,
// gamma^2 scaled out. Analytic-bessel kernels use the closed form with
// eps = eta; other kinds integrate numerically.
std::function<cplx(double)> rate_function(const CorrelationKernel& kernel, double eta);

struct RateEval {
    cplx value{0.0, 0.0};
    bool near_singular{false};
};

// Single-frequency variant that carries the near-singularity flag through.
RateEval rate_eval(const CorrelationKernel& kernel, double eta, double omega);

inline constexpr double kDefaultEta = 1e-3;       // damping regulator, units of J
inline constexpr double kDefaultKernelDt = 0.01;  // tabulation step, units of 1/J
inline constexpr double kDefaultKernelT = 500.0;  // tabulation horizon, units of 1/J

} // namespace sjx
