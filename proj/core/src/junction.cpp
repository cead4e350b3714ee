#include "sjx/junction.hpp"

#include <cmath>

#include "sjx/errors.hpp"

namespace sjx {

void JunctionSpec::validate() const {
    if (gamma < 0.0) throw ValidationError("JunctionSpec: gamma must be >= 0");
}

HilbertSpace junction_space() { return HilbertSpace({"L", "R"}); }

Operator build_hs(const JunctionSpec& spec) {
    const auto sp = junction_space();
    const auto sL = embed(sigma_minus(), "L", sp);
    const auto sR = embed(sigma_minus(), "R", sp);
    const auto zL = embed(pauli_z(), "L", sp);
    const auto zR = embed(pauli_z(), "R", sp);
    Eigen::MatrixXcd h =
        2.0 * spec.J_S * (sL.mat * sR.mat.adjoint() + sL.mat.adjoint() * sR.mat) +
        spec.Delta * (zL.mat - zR.mat) + spec.Jz_sys * (zL.mat * zR.mat);
    return {sp, std::move(h)};
}

Operator junction_sigma(Side s) {
    return embed(sigma_minus(), s == Side::left ? "L" : "R", junction_space());
}

Operator junction_z(Side s) {
    return embed(pauli_z(), s == Side::left ? "L" : "R", junction_space());
}

std::vector<double> JumpOperatorSet::frequencies_for(Side s, int alpha) const {
    std::vector<double> out;
    for (const auto& k : ops) {
        if (k.side == s && k.alpha == alpha) out.push_back(k.omega);
    }
    return out;
}

const JumpOperator* JumpOperatorSet::find(Side s, int alpha, double omega,
                                          double tol) const {
    for (const auto& k : ops) {
        if (k.side == s && k.alpha == alpha && std::abs(k.omega - omega) < tol) {
            return &k;
        }
    }
    return nullptr;
}

JumpOperatorSet build_jump_set(const JunctionSpec& spec, double degeneracy_tol) {
    spec.validate();
    const auto hs = build_hs(spec);
    JumpOperatorSet set;
    set.eigen = eigensystem(hs, degeneracy_tol);

    for (Side s : {Side::left, Side::right}) {
        const Eigen::MatrixXcd sig = junction_sigma(s).mat;
        for (int alpha = 0; alpha < 2; ++alpha) {
            // K_alpha = i^alpha [ S+ + (-1)^alpha S ]
            const cplx pref = (alpha == 0) ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
            const double sign = (alpha == 0) ? 1.0 : -1.0;
            const Eigen::MatrixXcd k_full = pref * (sig.adjoint() + sign * sig);
            for (double omega : set.eigen.frequencies) {
                Eigen::MatrixXcd comp = set.eigen.component(k_full, omega);
                if (comp.cwiseAbs().maxCoeff() < 1e-14) continue; // prune zeros
                JumpOperator jo;
                jo.side = s;
                jo.alpha = alpha;
                jo.omega = omega;
                jo.mat = comp;
                set.ops.push_back(std::move(jo));
            }
        }
    }
    return set;
}

Operator current_operator(Side side, double gamma) {
    (void)side; // both contacts share the same two-site form
    HilbertSpace sp({"B", "S"});
    const auto b = embed(sigma_minus(), "B", sp);
    const auto s = embed(sigma_minus(), "S", sp);
    Eigen::MatrixXcd j = cplx(0.0, -4.0 * gamma) *
                         (b.mat * s.mat.adjoint() - s.mat * b.mat.adjoint());
    return {sp, std::move(j)};
}

cplx system_corr_down(double t, const JunctionSpec& spec) {
    const double lam = std::hypot(spec.Delta, spec.J_S);
    const double x = 2.0 * t * lam;
    // sin(x)/lam -> 2t as lam -> 0
    const double sinc_part = (lam < 1e-14) ? 2.0 * t : std::sin(x) / lam;
    const cplx body(std::cos(x), -spec.Delta * sinc_part);
    const double ph = 2.0 * spec.Jz_sys * t;
    return std::exp(cplx(0.0, ph)) * body;
}

} // namespace sjx
