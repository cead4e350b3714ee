// Algebraic steady states: the global Redfield generator, the local Lindblad
// generator, null-space solutions, and steady currents.
//
// Superoperators act on column-stacked 4x4 junction density matrices,
// vec(rho)[c*4+r] = rho(r,c).

#pragma once

#include <string>
#include <vector>

#include "sjx/bath.hpp"
#include "sjx/junction.hpp"

namespace sjx {

struct Superoperator {
    Eigen::MatrixXcd total;            // 16x16, commutator + both dissipators
    Eigen::MatrixXcd dissipator_left;  // left-lead dissipator alone
    Eigen::MatrixXcd dissipator_right;
    std::string tag;                   // "redfield-global" | "lindblad-local"
    double gamma{0.0};
    std::vector<std::string> warnings; // near-singular rates, etc.

    Eigen::Matrix4cd apply(const Eigen::Matrix4cd& rho) const;
};

Eigen::Matrix4cd unvec(const Eigen::VectorXcd& v);
Eigen::VectorXcd vec(const Eigen::Matrix4cd& m);
// superoperator for rho -> A rho B
Eigen::MatrixXcd sprepost(const Eigen::Matrix4cd& a, const Eigen::Matrix4cd& b);

struct SteadyReport {
    Eigen::Matrix4cd rho;
    double residual{0.0};      // ||L vec(rho)||_2 after normalization
    double trace_error{0.0};   // |tr rho - 1|
    double min_eigenvalue{0.0};
    double gap{0.0};           // second-smallest singular value of L
    bool degenerate{false};
    std::vector<Eigen::Matrix4cd> steady_basis; // filled when degenerate
    double current_left{0.0};
    double current_right{0.0};
    double current{0.0};       // (I_L - I_R)/2
    std::vector<std::string> warnings;
};

Superoperator build_redfield_global(const JunctionSpec& junction,
                                    const LeadKernels& left,
                                    const LeadKernels& right,
                                    double eta = kDefaultEta,
                                    double degeneracy_tol = kDegeneracyTol);

Superoperator build_lindblad_local(const JunctionSpec& junction,
                                   const LeadKernels& left,
                                   const LeadKernels& right,
                                   double eta = kDefaultEta);

// Smallest-singular-vector null state, Hermitized and trace-normalized.
// A degenerate steady space (two singular values below threshold) is
// reported through `degenerate` + `steady_basis` instead of one state.
SteadyReport solve_steady(const Superoperator& gen, double degenerate_tol = 1e-12);

// I_s = tr{ Z_s D_s[rho] }; fills the current fields of the report.
void steady_current(const Superoperator& gen, SteadyReport& report);

// Convenience: build (GME), solve, attach currents.
SteadyReport steady_state_global(const JunctionSpec& junction,
                                 const BathSpec& left, const BathSpec& right,
                                 double eta = kDefaultEta);
SteadyReport steady_state_local(const JunctionSpec& junction,
                                const BathSpec& left, const BathSpec& right,
                                double eta = kDefaultEta);

} // namespace sjx
