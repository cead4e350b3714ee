// The two-spin interface: Hamiltonian, frequency-resolved jump operators,
// coupling/current operators, and the analytic system correlation.

#pragma once

#include <vector>

#include "sjx/bath.hpp"
#include "sjx/operators.hpp"

namespace sjx {

enum class Side { left, right };

struct JunctionSpec {
    double J_S{0.01};   // hopping
    double Delta{0.0};  // detuning asymmetry
    double Jz_sys{0.0}; // ZZ interaction
    double gamma{0.01}; // system-bath coupling

    void validate() const;
    // advisory: weak-coupling assumption strained
    bool weak_coupling_ok(double bath_J) const { return gamma <= 0.1 * bath_J; }
};

// Junction Hilbert space, sites {"L", "R"}, basis {|00>, |01>, |10>, |11>}.
HilbertSpace junction_space();

// 2 J_S (sL sR+ + sL+ sR) + Delta (Z_L - Z_R) + Jz_sys Z_L Z_R
Operator build_hs(const JunctionSpec& spec);

Operator junction_sigma(Side s);      // sigma on the given junction site
Operator junction_z(Side s);          // Z on the given junction site

// One frequency-resolved jump operator K_alpha(omega) = sum_{E'-E=omega} P K P'.
struct JumpOperator {
    Side side{Side::left};
    int alpha{0};      // 0: S+ + S, 1: i(S+ - S)
    double omega{0.0};
    Eigen::Matrix4cd mat;
};

struct JumpOperatorSet {
    std::vector<JumpOperator> ops; // zero components pruned
    EigenSystem eigen;             // of H_S

    std::vector<double> frequencies_for(Side s, int alpha) const;
    const JumpOperator* find(Side s, int alpha, double omega, double tol) const;
};

JumpOperatorSet build_jump_set(const JunctionSpec& spec,
                               double degeneracy_tol = kDegeneracyTol);

// -4 i gamma (B S+ - S B+) on a two-site space {"B", "S"}; the caller embeds.
Operator current_operator(Side side, double gamma);

// <S_L(t) S_L+(0)> in |downdown>:
//   e^{2 i Jz_sys t} [ cos(2 t L) - i Delta sin(2 t L) / L ],  L = sqrt(D^2+J_S^2)
cplx system_corr_down(double t, const JunctionSpec& spec);

} // namespace sjx
