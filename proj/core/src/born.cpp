#include "sjx/born.hpp"

#include <cmath>

#include "sjx/errors.hpp"

namespace sjx {

double CurrentTrace::interp_total(double t) const {
    if (times.empty()) return 0.0;
    if (t <= times.front()) return total.front();
    if (t >= times.back()) return total.back();
    const double dt = times[1] - times[0];
    const auto k = static_cast<std::size_t>((t - times.front()) / dt);
    const double f = (t - times[k]) / dt;
    return (1.0 - f) * total[k] + f * total[k + 1];
}

Eigen::Matrix4cd junction_basis_state(int index) {
    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
    rho(index, index) = 1.0;
    return rho;
}

namespace {

struct InteractionFrame {
    Eigen::Matrix4cd hs;
    Eigen::Vector4d energies;
    Eigen::Matrix4cd vectors;

    explicit InteractionFrame(const JunctionSpec& junction) {
        hs = build_hs(junction).mat;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(hs);
        energies = es.eigenvalues();
        vectors = es.eigenvectors();
    }

    Eigen::Matrix4cd unitary(double t) const {
        // e^{+i H t}
        Eigen::Vector4cd ph;
        for (int k = 0; k < 4; ++k) ph(k) = std::exp(cplx(0.0, energies(k) * t));
        return vectors * ph.asDiagonal() * vectors.adjoint();
    }

    Eigen::Matrix4cd to_interaction(const Eigen::Matrix4cd& op, double t) const {
        const Eigen::Matrix4cd u = unitary(t);
        return u * op * u.adjoint();
    }
};

void sample_kernels(const LeadKernels& k, double dt, std::size_t n,
                    std::vector<cplx>& hole, std::vector<cplx>& particle) {
    hole.resize(n);
    particle.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double tau = dt * static_cast<double>(i);
        hole[i] = k.hole.zero ? cplx(0.0, 0.0) : k.hole.eval(tau);
        particle[i] = k.particle.zero ? cplx(0.0, 0.0) : k.particle.eval(tau);
    }
}

// Memory functional at grid index n, trapezoid over the stored history.
// hist_g[s][k] = S_s+(t_k) rho_k, hist_h[s][k] = S_s(t_k) rho_k.
Eigen::Matrix4cd born_rhs(const MemoryHistory& mh,
                          const std::vector<Eigen::Matrix4cd> (&hist_g)[2],
                          const std::vector<Eigen::Matrix4cd> (&hist_h)[2],
                          std::size_t n, double g2) {
    Eigen::Matrix4cd out = Eigen::Matrix4cd::Zero();
    if (n == 0) return out;
    for (int s = 0; s < 2; ++s) {
        Eigen::Matrix4cd acc_h = Eigen::Matrix4cd::Zero();
        Eigen::Matrix4cd acc_p = Eigen::Matrix4cd::Zero();
        const auto& ch = mh.kernel_hole[s];
        const auto& cp = mh.kernel_particle[s];
        for (std::size_t k = 0; k <= n; ++k) {
            const double w = (k == 0 || k == n) ? 0.5 : 1.0;
            const std::size_t tau = n - k;
            acc_h += (w * ch[tau]) * hist_g[s][k];
            acc_p += (w * cp[tau]) * hist_h[s][k];
        }
        const Eigen::Matrix4cd& sn = mh.s_int[s][n];
        const Eigen::Matrix4cd snd = sn.adjoint();
        out += sn * acc_h - acc_h * sn;    // C_h [S(t), S+(t') rho(t')]
        out += snd * acc_p - acc_p * snd;  // C_p [S+(t), S(t') rho(t')]
    }
    out *= -4.0 * g2 * mh.dt;
    return out + Eigen::Matrix4cd(out.adjoint());
}

} // namespace

Eigen::Matrix4cd MemoryHistory::schrodinger(std::size_t k) const {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(hamiltonian);
    Eigen::Vector4cd ph;
    for (int i = 0; i < 4; ++i) {
        ph(i) = std::exp(cplx(0.0, -es.eigenvalues()(i) * times[k]));
    }
    const Eigen::Matrix4cd u = es.eigenvectors() * ph.asDiagonal() *
                               es.eigenvectors().adjoint();
    return u * rho[k] * u.adjoint();
}

MemoryHistory integrate_born(const Eigen::Matrix4cd& rho0,
                             const JunctionSpec& junction, const LeadKernels& left,
                             const LeadKernels& right, const BornOptions& opts) {
    junction.validate();
    const double bath_j = std::max(left.hole.zero ? left.particle.spec.J
                                                  : left.hole.spec.J,
                                   1e-300);
    const double scale = std::max({bath_j, std::abs(junction.J_S),
                                   std::abs(junction.Delta)});
    if (opts.dt > 0.02 / scale + 1e-12) {
        throw ValidationError("integrate_born: dt exceeds 0.02 / max(J, J_S, Delta)");
    }
    if (std::abs(rho0.trace() - cplx(1.0, 0.0)) > 1e-9 ||
        (rho0 - Eigen::Matrix4cd(rho0.adjoint())).cwiseAbs().maxCoeff() > 1e-9) {
        throw ValidationError("integrate_born: rho0 is not a valid density matrix");
    }

    const auto n_steps = static_cast<std::size_t>(std::llround(opts.T / opts.dt));
    const std::size_t n = n_steps + 1;

    MemoryHistory mh;
    mh.junction = junction;
    mh.dt = opts.dt;
    const InteractionFrame frame(junction);
    mh.hamiltonian = frame.hs;
    mh.times.resize(n);
    for (std::size_t k = 0; k < n; ++k) mh.times[k] = opts.dt * static_cast<double>(k);
    for (int s = 0; s < 2; ++s) {
        mh.s_int[s].resize(n);
        const Eigen::Matrix4cd sig =
            junction_sigma(s == 0 ? Side::left : Side::right).mat;
        for (std::size_t k = 0; k < n; ++k) {
            mh.s_int[s][k] = frame.to_interaction(sig, mh.times[k]);
        }
    }
    sample_kernels(left, opts.dt, n, mh.kernel_hole[0], mh.kernel_particle[0]);
    sample_kernels(right, opts.dt, n, mh.kernel_hole[1], mh.kernel_particle[1]);

    mh.rho.reserve(n);
    mh.rho.push_back(rho0);

    const double g2 = junction.gamma * junction.gamma;
    std::vector<Eigen::Matrix4cd> hist_g[2];
    std::vector<Eigen::Matrix4cd> hist_h[2];
    for (int s = 0; s < 2; ++s) {
        hist_g[s].reserve(n);
        hist_h[s].reserve(n);
        hist_g[s].push_back(mh.s_int[s][0].adjoint() * rho0);
        hist_h[s].push_back(mh.s_int[s][0] * rho0);
    }

    mh.min_eigenvalue_seen = 0.0;
    for (std::size_t step = 0; step < n_steps; ++step) {
        const Eigen::Matrix4cd f0 = born_rhs(mh, hist_g, hist_h, step, g2);
        const Eigen::Matrix4cd pred = mh.rho[step] + opts.dt * f0;

        mh.rho.push_back(pred);
        for (int s = 0; s < 2; ++s) {
            hist_g[s].push_back(mh.s_int[s][step + 1].adjoint() * pred);
            hist_h[s].push_back(mh.s_int[s][step + 1] * pred);
        }
        const Eigen::Matrix4cd f1 = born_rhs(mh, hist_g, hist_h, step + 1, g2);

        const Eigen::Matrix4cd next = mh.rho[step] + 0.5 * opts.dt * (f0 + f1);
        mh.rho[step + 1] = next;
        for (int s = 0; s < 2; ++s) {
            hist_g[s][step + 1] = mh.s_int[s][step + 1].adjoint() * next;
            hist_h[s][step + 1] = mh.s_int[s][step + 1] * next;
        }

        const double drift = std::abs(next.trace() - cplx(1.0, 0.0));
        if (drift > opts.trace_tol) {
            throw NumericError("integrate_born: trace drift " + std::to_string(drift) +
                               " at t=" + std::to_string(mh.times[step + 1]));
        }
        if (opts.negativity_check_every > 0 &&
            (step % static_cast<std::size_t>(opts.negativity_check_every)) == 0) {
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(next);
            const double mn = es.eigenvalues().minCoeff();
            mh.min_eigenvalue_seen = std::min(mh.min_eigenvalue_seen, mn);
            if (mn < -opts.negativity_tol && !mh.negativity_flagged) {
                mh.negativity_flagged = true;
                mh.warnings.push_back("born state negativity " + std::to_string(mn) +
                                      " at t=" + std::to_string(mh.times[step + 1]));
            }
        }
    }
    return mh;
}

CurrentTrace born_current(const MemoryHistory& mh) {
    const std::size_t n = mh.rho.size();
    const double g2 = mh.junction.gamma * mh.junction.gamma;
    CurrentTrace out;
    out.method = "born";
    out.times = mh.times;
    out.left.assign(n, 0.0);
    out.right.assign(n, 0.0);
    out.total.assign(n, 0.0);

    // per side: I(t_n) = -16 g^2 sum_k w_k Re{ C_p(tau) tr[S+(t_n) S(t_k) rho_k]
    //                                        - C_h(tau) tr[S(t_n) S+(t_k) rho_k] }
    for (int s = 0; s < 2; ++s) {
        std::vector<Eigen::Matrix4cd> g_k(n), h_k(n);
        for (std::size_t k = 0; k < n; ++k) {
            g_k[k] = mh.s_int[s][k].adjoint() * mh.rho[k]; // S+(t') rho'
            h_k[k] = mh.s_int[s][k] * mh.rho[k];           // S(t') rho'
        }
        for (std::size_t i = 1; i < n; ++i) {
            const Eigen::Matrix4cd sd = mh.s_int[s][i].adjoint();
            const Eigen::Matrix4cd sm = mh.s_int[s][i];
            cplx acc(0.0, 0.0);
            for (std::size_t k = 0; k <= i; ++k) {
                const double w = (k == 0 || k == i) ? 0.5 : 1.0;
                const std::size_t tau = i - k;
                const cplx raise = (sd * h_k[k]).trace();
                const cplx lower = (sm * g_k[k]).trace();
                acc += w * (mh.kernel_particle[s][tau] * raise -
                            mh.kernel_hole[s][tau] * lower);
            }
            const double val = -16.0 * g2 * mh.dt * acc.real();
            (s == 0 ? out.left[i] : out.right[i]) = val;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        out.total[i] = 0.5 * (out.left[i] - out.right[i]);
    }
    return out;
}

CurrentTrace kubo_current(const JunctionSpec& junction, const LeadKernels& left,
                          const LeadKernels& right, const Eigen::Matrix4cd& rho0,
                          double dt, double T) {
    junction.validate();
    const InteractionFrame frame(junction);
    const auto n = static_cast<std::size_t>(std::llround(T / dt)) + 1;

    CurrentTrace out;
    out.method = "kubo";
    out.times.resize(n);
    for (std::size_t k = 0; k < n; ++k) out.times[k] = dt * static_cast<double>(k);
    out.left.assign(n, 0.0);
    out.right.assign(n, 0.0);
    out.total.assign(n, 0.0);

    const double g2 = junction.gamma * junction.gamma;
    const bool stationary =
        (frame.hs * rho0 - rho0 * frame.hs).cwiseAbs().maxCoeff() < 1e-12;

    for (int s = 0; s < 2; ++s) {
        const auto& kern = (s == 0) ? left : right;
        std::vector<cplx> ch, cp;
        sample_kernels(kern, dt, n, ch, cp);
        const Eigen::Matrix4cd sig =
            junction_sigma(s == 0 ? Side::left : Side::right).mat;
        std::vector<double>& dst = (s == 0) ? out.left : out.right;

        if (stationary) {
            // correlators depend on tau only: O(N) cumulative trapezoid
            std::vector<double> f(n);
            for (std::size_t k = 0; k < n; ++k) {
                const Eigen::Matrix4cd st = frame.to_interaction(sig, out.times[k]);
                const cplx raise = (st.adjoint() * (sig * rho0)).trace();
                const cplx lower = (st * (sig.adjoint() * rho0)).trace();
                f[k] = (cp[k] * raise - ch[k] * lower).real();
            }
            double acc = 0.0;
            for (std::size_t k = 1; k < n; ++k) {
                acc += 0.5 * (f[k - 1] + f[k]);
                dst[k] = -16.0 * g2 * dt * acc;
            }
        } else {
            if (n > 12000) {
                throw ValidationError(
                    "kubo_current: grid too long for the non-stationary path");
            }
            std::vector<Eigen::Matrix4cd> s_int(n), g_k(n), h_k(n);
            for (std::size_t k = 0; k < n; ++k) {
                s_int[k] = frame.to_interaction(sig, out.times[k]);
                g_k[k] = s_int[k].adjoint() * rho0;
                h_k[k] = s_int[k] * rho0;
            }
            for (std::size_t i = 1; i < n; ++i) {
                const Eigen::Matrix4cd sd = s_int[i].adjoint();
                const Eigen::Matrix4cd sm = s_int[i];
                cplx acc(0.0, 0.0);
                for (std::size_t k = 0; k <= i; ++k) {
                    const double w = (k == 0 || k == i) ? 0.5 : 1.0;
                    const std::size_t tau = i - k;
                    acc += w * (cp[tau] * (sd * h_k[k]).trace() -
                                ch[tau] * (sm * g_k[k]).trace());
                }
                dst[i] = -16.0 * g2 * dt * acc.real();
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        out.total[i] = 0.5 * (out.left[i] - out.right[i]);
    }
    return out;
}

} // namespace sjx
