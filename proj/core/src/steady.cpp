#include "sjx/steady.hpp"

#include <cmath>
#include <map>

#include "sjx/errors.hpp"

namespace sjx {

Eigen::Matrix4cd unvec(const Eigen::VectorXcd& v) {
    Eigen::Matrix4cd m;
    for (int c = 0; c < 4; ++c) {
        for (int r = 0; r < 4; ++r) m(r, c) = v(c * 4 + r);
    }
    return m;
}

Eigen::VectorXcd vec(const Eigen::Matrix4cd& m) {
    Eigen::VectorXcd v(16);
    for (int c = 0; c < 4; ++c) {
        for (int r = 0; r < 4; ++r) v(c * 4 + r) = m(r, c);
    }
    return v;
}

Eigen::MatrixXcd sprepost(const Eigen::Matrix4cd& a, const Eigen::Matrix4cd& b) {
    // vec(A rho B) = (B^T kron A) vec(rho)
    Eigen::MatrixXcd out(16, 16);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            out.block<4, 4>(4 * i, 4 * j) = b(j, i) * a;
        }
    }
    return out;
}

Eigen::Matrix4cd Superoperator::apply(const Eigen::Matrix4cd& rho) const {
    return unvec(total * vec(rho));
}

namespace {

const Eigen::Matrix4cd kId4 = Eigen::Matrix4cd::Identity();

// Dissipator block of the printed global master equation for one lead:
//   -sum_{w,w',a,a'} G_{aa'}(w') [K_a+(w) K_a'(w') rho - K_a'(w') rho K_a+(w)] + h.c.
Eigen::MatrixXcd gme_dissipator(const JumpOperatorSet& jumps, Side side,
                                const LeadKernels& kernels, double gamma,
                                double eta, std::vector<std::string>& warnings) {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(16, 16);
    const double g2 = gamma * gamma;

    // <X_a(tau) X_a'(0)> = C_h * hmat + C_p * pmat
    const cplx i1(0.0, 1.0);
    const cplx hmat[2][2] = {{1.0, -i1}, {i1, 1.0}};
    const cplx pmat[2][2] = {{1.0, i1}, {-i1, 1.0}};

    std::map<double, std::pair<cplx, cplx>> rates;
    for (const auto& k : jumps.ops) {
        if (k.side != side || rates.count(k.omega)) continue;
        const auto rh = rate_eval(kernels.hole, eta, k.omega);
        const auto rp = rate_eval(kernels.particle, eta, k.omega);
        if (rh.near_singular || rp.near_singular) {
            warnings.push_back("near-singular rate at omega=" + std::to_string(k.omega));
        }
        rates[k.omega] = {rh.value, rp.value};
    }

    for (const auto& ka : jumps.ops) {
        if (ka.side != side) continue;
        for (const auto& kb : jumps.ops) {
            if (kb.side != side) continue;
            const auto& [rh, rp] = rates.at(kb.omega);
            const cplx rate =
                g2 * (hmat[ka.alpha][kb.alpha] * rh + pmat[ka.alpha][kb.alpha] * rp);
            if (std::abs(rate) < 1e-300) continue;
            const Eigen::Matrix4cd a = ka.mat.adjoint(); // K_a+(w)
            const Eigen::Matrix4cd b = kb.mat;           // K_a'(w')
            const Eigen::Matrix4cd p = a * b;
            d -= rate * (sprepost(p, kId4) - sprepost(b, a));
            d -= std::conj(rate) *
                 (sprepost(kId4, p.adjoint()) - sprepost(a.adjoint(), b.adjoint()));
        }
    }
    return d;
}

// -[G (S+ S rho - S rho S+) + h.c.] for jump S; G complex, Lamb parts kept.
Eigen::MatrixXcd lme_family(const Eigen::Matrix4cd& s, cplx g) {
    const Eigen::Matrix4cd sd = s.adjoint();
    const Eigen::Matrix4cd n = sd * s;
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(16, 16);
    d -= g * sprepost(n, kId4);
    d -= std::conj(g) * sprepost(kId4, n);
    d += 2.0 * g.real() * sprepost(s, sd);
    return d;
}

} // namespace

Superoperator build_redfield_global(const JunctionSpec& junction,
                                    const LeadKernels& left,
                                    const LeadKernels& right, double eta,
                                    double degeneracy_tol) {
    junction.validate();
    const auto jumps = build_jump_set(junction, degeneracy_tol);
    const auto hs = build_hs(junction);

    Superoperator out;
    out.tag = "redfield-global";
    out.gamma = junction.gamma;
    out.dissipator_left =
        gme_dissipator(jumps, Side::left, left, junction.gamma, eta, out.warnings);
    out.dissipator_right =
        gme_dissipator(jumps, Side::right, right, junction.gamma, eta, out.warnings);
    const Eigen::Matrix4cd h = hs.mat;
    out.total = cplx(0.0, -1.0) * (sprepost(h, kId4) - sprepost(kId4, h)) +
                out.dissipator_left + out.dissipator_right;
    return out;
}

Superoperator build_lindblad_local(const JunctionSpec& junction,
                                   const LeadKernels& left,
                                   const LeadKernels& right, double eta) {
    junction.validate();
    const double g2 = junction.gamma * junction.gamma;
    Superoperator out;
    out.tag = "lindblad-local";
    out.gamma = junction.gamma;

    for (Side side : {Side::left, Side::right}) {
        const auto& kernels = (side == Side::left) ? left : right;
        const Eigen::Matrix4cd s = junction_sigma(side).mat;
        const cplx rate_h = 4.0 * g2 * rate_eval(kernels.hole, eta, 0.0).value;
        const cplx rate_p = 4.0 * g2 * rate_eval(kernels.particle, eta, 0.0).value;
        Eigen::MatrixXcd d = lme_family(s, rate_p);  // jump S, rate Gamma_p
        d += lme_family(s.adjoint(), rate_h);        // jump S+, rate Gamma_h
        if (side == Side::left) out.dissipator_left = d;
        else out.dissipator_right = d;
    }

    const Eigen::Matrix4cd h = build_hs(junction).mat;
    out.total = cplx(0.0, -1.0) * (sprepost(h, kId4) - sprepost(kId4, h)) +
                out.dissipator_left + out.dissipator_right;
    return out;
}

SteadyReport solve_steady(const Superoperator& gen, double degenerate_tol) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
        gen.total, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    SteadyReport rep;
    rep.warnings = gen.warnings;
    rep.gap = sv(14);

    const double scale = std::max(1.0, sv(0));
    if (sv(14) < degenerate_tol * scale) {
        rep.degenerate = true;
        for (int k = 15; k >= 0; --k) {
            if (sv(k) < degenerate_tol * scale) {
                rep.steady_basis.push_back(unvec(svd.matrixV().col(k)));
            }
        }
        return rep;
    }

    Eigen::Matrix4cd rho = unvec(svd.matrixV().col(15));
    rho = 0.5 * (rho + Eigen::Matrix4cd(rho.adjoint()));
    const cplx tr = rho.trace();
    if (std::abs(tr) < 1e-10) {
        throw NumericError("solve_steady: null vector has vanishing trace");
    }
    rho /= tr;
    rep.rho = rho;
    rep.residual = (gen.total * vec(rho)).norm();
    rep.trace_error = std::abs(rho.trace() - cplx(1.0, 0.0));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho);
    rep.min_eigenvalue = es.eigenvalues().minCoeff();
    return rep;
}

void steady_current(const Superoperator& gen, SteadyReport& report) {
    if (report.degenerate) return;
    const Eigen::Matrix4cd zl = junction_z(Side::left).mat;
    const Eigen::Matrix4cd zr = junction_z(Side::right).mat;
    const Eigen::Matrix4cd dl = unvec(gen.dissipator_left * vec(report.rho));
    const Eigen::Matrix4cd dr = unvec(gen.dissipator_right * vec(report.rho));
    report.current_left = (zl * dl).trace().real();
    report.current_right = (zr * dr).trace().real();
    report.current = 0.5 * (report.current_left - report.current_right);
}

SteadyReport steady_state_global(const JunctionSpec& junction, const BathSpec& left,
                                 const BathSpec& right, double eta) {
    auto gen = build_redfield_global(junction, lead_kernels(left), lead_kernels(right),
                                     eta);
    auto rep = solve_steady(gen);
    steady_current(gen, rep);
    return rep;
}

SteadyReport steady_state_local(const JunctionSpec& junction, const BathSpec& left,
                                const BathSpec& right, double eta) {
    auto gen = build_lindblad_local(junction, lead_kernels(left), lead_kernels(right),
                                    eta);
    auto rep = solve_steady(gen);
    steady_current(gen, rep);
    return rep;
}

} // namespace sjx
