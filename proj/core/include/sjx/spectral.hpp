// Nonequilibrium spectral function A(omega), asymptotic current, and the
// rectification / diode factors.
//
// The stationary retarded kernel Pi(tau) assembled here is purely imaginary
// by construction (each term is paired with its Hermitian conjugate), so
// A(omega) = Im int_0^inf e^{(i omega - eta) tau} Pi(tau) dtau is real. The
// normalization is fixed so that the asymptotic current obeys
// I(inf) = 8 gamma^2 A(0) exactly in the eta -> 0, T -> inf limit.

#pragma once

#include <string>
#include <vector>

#include "sjx/bath.hpp"
#include "sjx/born.hpp"
#include "sjx/junction.hpp"

namespace sjx {

struct SpectralSeries {
    std::vector<double> omegas;
    std::vector<double> values; // A(omega)
    double eta{0.0};
    std::string method;         // born-steady | kubo
    // convention note echoed into serialized outputs
    static constexpr const char* kConvention =
        "half-line transform, symmetric 1/sqrt(2pi) pair, scaled so "
        "I_inf = 8 gamma^2 A(0)";
};

struct RectificationReport {
    double delta{0.0};
    double avg_current_plus{0.0};   // time-averaged current at +Delta
    double avg_current_minus{0.0};  // at -Delta
    double window{0.0};             // averaging window T
    double rectification{0.0};      // R
    double diode_factor{0.0};       // D
};

// Pi(tau) under the Born factorization around a stationary state rho:
// per side, C_p(tau) <S+(tau) S(0)>_rho - C_h(tau) <S(tau) S+(0)>_rho,
// paired with h.c.; sides combined as (Pi_L - Pi_R)/2.
CorrelationKernel stationary_pi_kernel(const Eigen::Matrix4cd& rho,
                                       const JunctionSpec& junction,
                                       const LeadKernels& left,
                                       const LeadKernels& right,
                                       double dt = kDefaultKernelDt,
                                       double T = kDefaultKernelT);

// Damped transform of a (purely imaginary) retarded kernel on its grid.
// Throws ValidationError if the grid cannot resolve the requested omegas
// (Nyquist) and NumericError if the kernel has a real residue.
SpectralSeries spectral_function(const CorrelationKernel& kernel, double eta,
                                 const std::vector<double>& omegas);

// Time-averaged currents of the paired traces, R, and D.
RectificationReport rectification(const CurrentTrace& plus,
                                  const CurrentTrace& minus, double T,
                                  double delta);

// Delta [J_S^2 + Delta^2]^{-1/2}
double kubo_rectification_closed(double j_s, double delta);

std::vector<double> uniform_grid(double lo, double hi, int n);

} // namespace sjx
