// Time-domain integration of the time-nonlocal Born master equation and the
// Kubo / Born current functionals built on the retarded two-particle kernel.
//
// Everything lives in the interaction picture on the 4-dim junction space;
// bath correlations enter as scalar kernels per side and channel.

#pragma once

#include <string>
#include <vector>

#include "sjx/bath.hpp"
#include "sjx/junction.hpp"

namespace sjx {

struct CurrentTrace {
    std::vector<double> times;
    std::vector<double> left;   // I_L(t)
    std::vector<double> right;  // I_R(t)
    std::vector<double> total;  // (I_L - I_R)/2
    std::string method;         // kubo | born | oracle | steady

    double interp_total(double t) const;
};

struct BornOptions {
    double dt{0.02};
    double T{10.0};
    double trace_tol{1e-6};       // abort threshold on |tr rho - 1|
    double negativity_tol{1e-6};  // flag threshold on min eigenvalue
    int negativity_check_every{25};
};

// Stored integration history: interaction-picture states plus the cached
// interaction-picture coupling operators and kernel samples that the
// current functional reuses.
struct MemoryHistory {
    JunctionSpec junction;
    double dt{0.0};
    std::vector<double> times;
    std::vector<Eigen::Matrix4cd> rho;        // interaction picture
    std::vector<Eigen::Matrix4cd> s_int[2];   // S_side(t_k), interaction picture
    std::vector<cplx> kernel_hole[2];         // C_h per side at tau_k
    std::vector<cplx> kernel_particle[2];     // C_p per side at tau_k
    Eigen::Matrix4cd hamiltonian;
    bool negativity_flagged{false};
    double min_eigenvalue_seen{0.0};
    std::vector<std::string> warnings;

    // Schrodinger-picture state at grid index k
    Eigen::Matrix4cd schrodinger(std::size_t k) const;
};

MemoryHistory integrate_born(const Eigen::Matrix4cd& rho0,
                             const JunctionSpec& junction,
                             const LeadKernels& left, const LeadKernels& right,
                             const BornOptions& opts);

// I_s(t) from the Born-factorized retarded kernel over the stored history.
CurrentTrace born_current(const MemoryHistory& history);

// Same functional with all correlators frozen at the initial state. Uses the
// O(N) stationary path when [H_S, rho0] = 0, otherwise the generic O(N^2) one.
CurrentTrace kubo_current(const JunctionSpec& junction, const LeadKernels& left,
                          const LeadKernels& right, const Eigen::Matrix4cd& rho0,
                          double dt, double T);

// |downdown><downdown| and friends
Eigen::Matrix4cd junction_basis_state(int index);

} // namespace sjx
