#include "sjx/trajectory.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <thread>

#include "sjx/bessel.hpp"
#include "sjx/errors.hpp"

namespace sjx {

void AbsorberSpec::validate() const {
    if (amplitude < 0.0 || gamma_b <= 0.0 || n_sites < 0) {
        throw ValidationError("AbsorberSpec: profile must be nonnegative and decreasing");
    }
}

double counter_normal(std::uint64_t seed, std::uint64_t traj, std::uint64_t site,
                      std::uint64_t step) {
    auto mix = [](std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    };
    std::uint64_t h = mix(seed);
    h = mix(h ^ traj);
    h = mix(h ^ (site * 0xD1B54A32D192ED03ull));
    h = mix(h ^ step);
    const std::uint64_t h2 = mix(h ^ 0x94D049BB133111EBull);
    const double u1 = (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(h2 >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::vector<AbsorberSite> absorber_sites(const ChainSpec& spec,
                                         const AbsorberSpec& left,
                                         const AbsorberSpec& right) {
    left.validate();
    right.validate();
    auto raise_for = [](const AbsorberSpec& a, Polarization pol) {
        switch (a.kind) {
        case AbsorberSpec::JumpKind::raise: return true;
        case AbsorberSpec::JumpKind::lower: return false;
        default: return pol == Polarization::up; // repolarize the lead
        }
    };
    std::vector<AbsorberSite> out;
    for (int i = 0; i < spec.n_left; ++i) {
        const int d_end = std::min(i, spec.n_left - 1 - i);
        if (std::abs(i - spec.contact_left()) < left.contact_buffer) continue;
        const double z = left.zeta(d_end);
        if (z <= 0.0) continue;
        out.push_back({i, z, raise_for(left, spec.bath_left.polarization)});
    }
    const int r0 = spec.n_left + 2;
    for (int i = r0; i < spec.n_sites(); ++i) {
        const int d_end = std::min(i - r0, spec.n_sites() - 1 - i);
        if (std::abs(i - spec.contact_right()) < right.contact_buffer) continue;
        const double z = right.zeta(d_end);
        if (z <= 0.0) continue;
        out.push_back({i, z, raise_for(right, spec.bath_right.polarization)});
    }
    return out;
}

namespace {

// ---------------------------- templated machinery ----------------------------

template <class Real>
struct Workspace {
    using Scalar = std::complex<Real>;
    std::vector<Scalar> psi, a, b, c;
    std::vector<Real> diag;

    void init(const ChainHamiltonian& ham, const Eigen::VectorXcd& psi0) {
        const std::size_t dim = ham.dim();
        psi.resize(dim);
        a.resize(dim);
        b.resize(dim);
        c.resize(dim);
        diag.resize(dim);
        for (std::size_t s = 0; s < dim; ++s) {
            psi[s] = Scalar(static_cast<Real>(psi0(s).real()),
                            static_cast<Real>(psi0(s).imag()));
            diag[s] = static_cast<Real>(ham.diag[s]);
        }
    }
};

template <class Real>
struct ChebyshevT {
    double center{0.0}, halfwidth{1.0};
    std::vector<std::complex<Real>> coeff;

    void prepare(const ChainHamiltonian& ham, double dt, double tol) {
        center = 0.5 * (ham.e_max + ham.e_min);
        halfwidth = std::max(0.5 * (ham.e_max - ham.e_min), 1e-12) * 1.0005;
        const double alpha = halfwidth * dt;
        int n = static_cast<int>(std::ceil(alpha)) + 8;
        std::vector<double> jk;
        double tail = 0.0;
        for (;; n += 4) {
            jk = bessel_j_array(alpha, n + 20);
            tail = 0.0;
            for (int k = n + 1; k <= n + 20; ++k) tail += 2.0 * std::abs(jk[k]);
            if (tail < tol || n > 4000) break;
        }
        if (tail >= tol) {
            throw NumericError("trajectory chebyshev: macro step too large");
        }
        coeff.resize(n + 1);
        const cplx phase = std::exp(cplx(0.0, -center * dt));
        cplx ik(1.0, 0.0);
        for (int k = 0; k <= n; ++k) {
            const cplx v = (k == 0 ? 1.0 : 2.0) * ik * jk[k] * phase;
            coeff[k] = std::complex<Real>(static_cast<Real>(v.real()),
                                          static_cast<Real>(v.imag()));
            ik *= cplx(0.0, -1.0);
        }
    }

    void step(const ChainHamiltonian& ham, Workspace<Real>& w) const {
        using Scalar = std::complex<Real>;
        const Real inv_h = static_cast<Real>(1.0 / halfwidth);
        const Real ctr_h = static_cast<Real>(center / halfwidth);
        const std::size_t dim = ham.dim();
        auto& psi = w.psi;    // input; its buffer is recycled as `next`
        auto& t_prev = w.a;
        auto& t_cur = w.b;
        auto& acc = w.c;

        // T1 = X psi
        chain_cheb_sweep(ham, w.diag.data(), psi.data(), nullptr, t_cur.data(),
                         nullptr, inv_h, ctr_h, Scalar(0, 0));
        const Scalar c0 = coeff[0];
        const Scalar c1 = coeff[1];
        for (std::size_t s = 0; s < dim; ++s) {
            acc[s] = c0 * psi[s] + c1 * t_cur[s];
            t_prev[s] = psi[s];
        }
        // in-place ping-pong: T_{k+1} overwrites T_{k-1}
        for (std::size_t k = 2; k < coeff.size(); ++k) {
            chain_cheb_sweep(ham, w.diag.data(), t_cur.data(), t_prev.data(),
                             t_prev.data(), acc.data(), Real(2) * inv_h,
                             Real(2) * ctr_h, coeff[k]);
            std::swap(t_prev, t_cur);
        }
        std::swap(psi, acc);
    }
};

struct JumpPlan {
    std::vector<std::size_t> bit;   // 1 << site
    std::vector<float> zeta;        // as double below via zeta_d
    std::vector<double> zeta_d;
    std::vector<std::uint8_t> raise;
    std::vector<int> site;
};

JumpPlan make_plan(const std::vector<AbsorberSite>& sites) {
    JumpPlan p;
    for (const auto& a : sites) {
        p.bit.push_back(std::size_t(1) << a.site);
        p.zeta_d.push_back(a.zeta);
        p.raise.push_back(a.raise ? 1 : 0);
        p.site.push_back(a.site);
    }
    return p;
}

// <J_r+ + J_r> for every jump, plus ||J_r psi||^2 and ||psi||^2.
// expectations are of the NORMALIZED state (divide by norm2).
// Grouped pass: jumps on bits >= 3 act uniformly across a block of 8
// lanes, jumps on bits 0..2 use fixed lane patterns.
template <class Real>
void jump_expectations(const JumpPlan& plan, const std::complex<Real>* psi,
                       std::size_t dim, std::vector<double>& e,
                       std::vector<double>& occ, double& norm2) {
    const std::size_t nj = plan.bit.size();
    e.assign(nj, 0.0);
    occ.assign(nj, 0.0);
    norm2 = 0.0;
    if (dim < 8) {
        for (std::size_t s = 0; s < dim; ++s) {
            const std::complex<Real> v = psi[s];
            const double w = static_cast<double>(v.real()) * v.real() +
                             static_cast<double>(v.imag()) * v.imag();
            norm2 += w;
            for (std::size_t r = 0; r < nj; ++r) {
                const std::size_t m = plan.bit[r];
                if (s & m) {
                    const std::complex<Real> u = psi[s ^ m];
                    e[r] += 2.0 * (static_cast<double>(v.real()) * u.real() +
                                   static_cast<double>(v.imag()) * u.imag());
                    if (!plan.raise[r]) occ[r] += w;
                } else if (plan.raise[r]) {
                    occ[r] += w;
                }
            }
        }
    } else {
        const std::size_t groups = dim >> 3;
        for (std::size_t g = 0; g < groups; ++g) {
            const std::complex<Real>* blk = psi + (g << 3);
            double wl[8];
            for (int l = 0; l < 8; ++l) {
                wl[l] = static_cast<double>(blk[l].real()) * blk[l].real() +
                        static_cast<double>(blk[l].imag()) * blk[l].imag();
                norm2 += wl[l];
            }
            for (std::size_t r = 0; r < nj; ++r) {
                const std::size_t m = plan.bit[r];
                if (m >= 8) {
                    const bool set = (g & (m >> 3)) != 0;
                    if (set) {
                        const std::complex<Real>* p = psi + ((g ^ (m >> 3)) << 3);
                        double acc = 0.0;
                        for (int l = 0; l < 8; ++l) {
                            acc += static_cast<double>(blk[l].real()) * p[l].real() +
                                   static_cast<double>(blk[l].imag()) * p[l].imag();
                        }
                        e[r] += 2.0 * acc;
                        if (!plan.raise[r]) {
                            for (int l = 0; l < 8; ++l) occ[r] += wl[l];
                        }
                    } else if (plan.raise[r]) {
                        for (int l = 0; l < 8; ++l) occ[r] += wl[l];
                    }
                } else {
                    const int lx = static_cast<int>(m);
                    double acc = 0.0, wocc = 0.0;
                    for (int l = 0; l < 8; ++l) {
                        if (l & lx) {
                            acc += static_cast<double>(blk[l].real()) *
                                       blk[l ^ lx].real() +
                                   static_cast<double>(blk[l].imag()) *
                                       blk[l ^ lx].imag();
                            if (!plan.raise[r]) wocc += wl[l];
                        } else if (plan.raise[r]) {
                            wocc += wl[l];
                        }
                    }
                    e[r] += 2.0 * acc;
                    occ[r] += wocc;
                }
            }
        }
    }
    for (std::size_t r = 0; r < nj; ++r) {
        e[r] *= std::sqrt(plan.zeta_d[r]) / norm2;
        occ[r] *= plan.zeta_d[r] / norm2;
    }
}

// one Euler-Maruyama step of the dissipative part:
//   psi <- D [ psi + sum_r q_r J_r psi ],  D = exp(-dt/2 sum_r J_r+ J_r)
// (kick first, exact no-jump decay second; the ordering difference is
//  higher order in dt). The no-jump decay factor splits into a per-group
// part (high bits) and a fixed 8-entry lane table, so no exp() in the
// inner loop.
template <class Real>
void noise_kick(const JumpPlan& plan, const std::vector<double>& q, double dt,
                const std::complex<Real>* in, std::complex<Real>* out,
                std::size_t dim) {
    const std::size_t nj = plan.bit.size();
    std::vector<std::complex<Real>> qr(nj);
    for (std::size_t r = 0; r < nj; ++r) {
        qr[r] = static_cast<Real>(q[r] * std::sqrt(plan.zeta_d[r]));
    }
    if (dim < 8) {
        for (std::size_t s = 0; s < dim; ++s) {
            std::complex<Real> acc = in[s];
            double decay = 0.0;
            for (std::size_t r = 0; r < nj; ++r) {
                const std::size_t m = plan.bit[r];
                const bool up = (s & m) != 0;
                if (plan.raise[r] == (up ? 1 : 0)) acc += qr[r] * in[s ^ m];
                else decay += 0.5 * dt * plan.zeta_d[r];
            }
            out[s] = acc * static_cast<Real>(std::exp(-decay));
        }
        return;
    }

    // lane decay table over the low-bit jumps
    Real lane_decay[8];
    for (int l = 0; l < 8; ++l) {
        double d = 0.0;
        for (std::size_t r = 0; r < nj; ++r) {
            if (plan.bit[r] >= 8) continue;
            const bool up = (l & static_cast<int>(plan.bit[r])) != 0;
            if (plan.raise[r] != (up ? 1 : 0)) d += 0.5 * dt * plan.zeta_d[r];
        }
        lane_decay[l] = static_cast<Real>(std::exp(-d));
    }
    const Real* __restrict fin = reinterpret_cast<const Real*>(in);
    Real* __restrict fout = reinterpret_cast<Real*>(out);
    const std::size_t groups = dim >> 3;
    for (std::size_t g = 0; g < groups; ++g) {
        const Real* __restrict blk = fin + (g << 4);
        Real acc[16];
        for (int i = 0; i < 16; ++i) acc[i] = blk[i];
        double gdecay = 0.0;
        for (std::size_t r = 0; r < nj; ++r) {
            const std::size_t m = plan.bit[r];
            const Real qrr = qr[r].real();
            const Real qri = qr[r].imag();
            if (m >= 8) {
                const bool up = (g & (m >> 3)) != 0;
                if (plan.raise[r] == (up ? 1 : 0)) {
                    const Real* __restrict p = fin + ((g ^ (m >> 3)) << 4);
                    for (int l = 0; l < 8; ++l) {
                        acc[2 * l] += qrr * p[2 * l] - qri * p[2 * l + 1];
                        acc[2 * l + 1] += qrr * p[2 * l + 1] + qri * p[2 * l];
                    }
                } else {
                    gdecay += 0.5 * dt * plan.zeta_d[r];
                }
            } else {
                const int lx = static_cast<int>(m);
                for (int l = 0; l < 8; ++l) {
                    const bool up = (l & lx) != 0;
                    if (plan.raise[r] == (up ? 1 : 0)) {
                        const int pl = 2 * (l ^ lx);
                        acc[2 * l] += qrr * blk[pl] - qri * blk[pl + 1];
                        acc[2 * l + 1] += qrr * blk[pl + 1] + qri * blk[pl];
                    }
                }
            }
        }
        const Real gfac = static_cast<Real>(std::exp(-gdecay));
        Real* __restrict ob = fout + (g << 4);
        for (int l = 0; l < 8; ++l) {
            const Real f = gfac * lane_decay[l];
            ob[2 * l] = acc[2 * l] * f;
            ob[2 * l + 1] = acc[2 * l + 1] * f;
        }
    }
}

template <class Real>
void renormalize(std::complex<Real>* psi, std::size_t dim, double norm2) {
    const Real inv = static_cast<Real>(1.0 / std::sqrt(norm2));
    for (std::size_t s = 0; s < dim; ++s) psi[s] *= inv;
}

template <class Real>
double norm2_of(const std::complex<Real>* psi, std::size_t dim) {
    double n = 0.0;
    for (std::size_t s = 0; s < dim; ++s) {
        n += static_cast<double>(psi[s].real()) * psi[s].real() +
             static_cast<double>(psi[s].imag()) * psi[s].imag();
    }
    return n;
}

// observables from the (normalized) scalar state; single grouped pass over
// all bonds
template <class Real>
Eigen::VectorXd bond_currents_t(const ChainHamiltonian& ham,
                                const std::complex<Real>* psi) {
    const std::size_t dim = ham.dim();
    const std::size_t nb = ham.bonds.size();
    Eigen::VectorXd out(nb);
    std::vector<double> im(nb, 0.0);
    if (dim < 8) {
        for (std::size_t k = 0; k < nb; ++k) {
            const auto& b = ham.bonds[k];
            const std::size_t mask =
                (std::size_t(1) << b.a) | (std::size_t(1) << b.b);
            for (std::size_t s = 0; s < dim; ++s) {
                if (((s >> b.b) & 1) && !((s >> b.a) & 1)) {
                    const std::complex<Real> t = psi[s ^ mask];
                    const std::complex<Real> v = psi[s];
                    im[k] += static_cast<double>(t.real()) * v.imag() -
                             static_cast<double>(t.imag()) * v.real();
                }
            }
        }
    } else {
        const std::size_t groups = dim >> 3;
        for (std::size_t g = 0; g < groups; ++g) {
            const std::complex<Real>* blk = psi + (g << 3);
            for (std::size_t k = 0; k < nb; ++k) {
                const auto& b = ham.bonds[k];
                const std::size_t mask =
                    (std::size_t(1) << b.a) | (std::size_t(1) << b.b);
                if (b.a >= 3 && b.b >= 3) {
                    if (!((g >> (b.b - 3)) & 1) || ((g >> (b.a - 3)) & 1)) continue;
                    const std::complex<Real>* p = psi + ((g ^ (mask >> 3)) << 3);
                    double acc = 0.0;
                    for (int l = 0; l < 8; ++l) {
                        acc += static_cast<double>(p[l].real()) * blk[l].imag() -
                               static_cast<double>(p[l].imag()) * blk[l].real();
                    }
                    im[k] += acc;
                } else {
                    const std::complex<Real>* p = psi + ((g ^ (mask >> 3)) << 3);
                    const int lx = static_cast<int>(mask & 7);
                    for (int l = 0; l < 8; ++l) {
                        const std::size_t s = (g << 3) | static_cast<std::size_t>(l);
                        if (((s >> b.b) & 1) && !((s >> b.a) & 1)) {
                            const std::complex<Real> t = p[l ^ lx];
                            im[k] += static_cast<double>(t.real()) * blk[l].imag() -
                                     static_cast<double>(t.imag()) * blk[l].real();
                        }
                    }
                }
            }
        }
    }
    for (std::size_t k = 0; k < nb; ++k) out(k) = -4.0 * ham.bonds[k].g * im[k];
    return out;
}

template <class Real>
Eigen::Matrix4cd reduced_junction_t(const ChainSpec& spec,
                                    const std::complex<Real>* psi) {
    const int jl = spec.n_left;
    const std::size_t bl = std::size_t(1) << jl;
    const std::size_t br = std::size_t(1) << (jl + 1);
    const std::size_t mask = bl | br;
    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
    const std::size_t dim = spec.dim();
    for (std::size_t s = 0; s < dim; ++s) {
        const int i4 = (((s & bl) ? 2 : 0) | ((s & br) ? 1 : 0));
        const std::size_t rest = s & ~mask;
        const cplx v(psi[s].real(), psi[s].imag());
        for (int j4 = 0; j4 < 4; ++j4) {
            std::size_t t = rest;
            if (j4 & 2) t |= bl;
            if (j4 & 1) t |= br;
            rho(i4, j4) += v * cplx(psi[t].real(), -psi[t].imag());
        }
    }
    return rho;
}

template <class Real>
double total_z_t(const std::complex<Real>* psi, int n_sites, std::size_t dim) {
    double acc = 0.0;
    for (std::size_t s = 0; s < dim; ++s) {
        const double w = static_cast<double>(psi[s].real()) * psi[s].real() +
                         static_cast<double>(psi[s].imag()) * psi[s].imag();
        if (w == 0.0) continue;
        acc += w * (2.0 * __builtin_popcountll(s) - n_sites);
    }
    return acc;
}

// fully explicit first-order step on the unnormalized linear equation,
// followed by normalization
template <class Real>
void plain_em_step(const ChainHamiltonian& ham, const JumpPlan& plan,
                   const std::vector<double>& q, double dt, Workspace<Real>& w) {
    using Scalar = std::complex<Real>;
    const std::size_t dim = ham.dim();
    Scalar* psi = w.psi.data();
    Scalar* hpsi = w.a.data();
    chain_apply(ham, psi, hpsi);
    const std::size_t nj = plan.bit.size();
    std::vector<Scalar> qr(nj);
    std::vector<Real> half_zeta_dt(nj);
    for (std::size_t r = 0; r < nj; ++r) {
        qr[r] = static_cast<Real>(q[r] * std::sqrt(plan.zeta_d[r]));
        half_zeta_dt[r] = static_cast<Real>(0.5 * dt * plan.zeta_d[r]);
    }
    const Scalar midt(0, static_cast<Real>(-dt));
    for (std::size_t s = 0; s < dim; ++s) {
        Scalar acc = psi[s] + midt * hpsi[s];
        for (std::size_t r = 0; r < nj; ++r) {
            const std::size_t m = plan.bit[r];
            const bool up = (s & m) != 0;
            if (plan.raise[r]) {
                if (up) acc += qr[r] * psi[s ^ m];
                else acc -= half_zeta_dt[r] * psi[s];
            } else {
                if (!up) acc += qr[r] * psi[s ^ m];
                else acc -= half_zeta_dt[r] * psi[s];
            }
        }
        w.b[s] = acc;
    }
    std::swap(w.psi, w.b);
}

template <class Real>
ChainTrajectory run_trajectory(const ChainHamiltonian& ham, const ChainSpec& spec,
                               const AbsorberSpec& left, const AbsorberSpec& right,
                               const TrajectoryOptions& opts,
                               std::uint64_t traj_index) {
    flush_denormals();
    const auto sites = absorber_sites(spec, left, right);
    const auto plan = make_plan(sites);
    const std::size_t dim = ham.dim();

    Workspace<Real> w;
    w.init(ham, chain_initial_state(spec));

    if (opts.plain_em) {
        ChainTrajectory out;
        const double dt = opts.dt_noise;
        const auto n_steps = static_cast<std::size_t>(std::llround(opts.T / dt));
        const auto per_sample = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(opts.sample_dt / dt)));
        std::vector<double> e, occ, q(plan.bit.size());
        double norm2 = 1.0;
        const double sqrt_dt = std::sqrt(dt);
        auto record = [&](double t) {
            out.times.push_back(t);
            out.bond_currents.push_back(bond_currents_t<Real>(ham, w.psi.data()));
            out.current.push_back(
                junction_current_from_bonds(ham, out.bond_currents.back()));
            out.junction_rho.push_back(reduced_junction_t<Real>(spec, w.psi.data()));
            out.total_z.push_back(total_z_t<Real>(w.psi.data(), ham.n_sites, dim));
        };
        record(0.0);
        for (std::size_t k = 0; k < n_steps; ++k) {
            if (!plan.bit.empty()) {
                jump_expectations<Real>(plan, w.psi.data(), dim, e, occ, norm2);
                for (std::size_t r = 0; r < plan.bit.size(); ++r) {
                    const double dw = sqrt_dt *
                        counter_normal(opts.seed, traj_index,
                                       static_cast<std::uint64_t>(plan.site[r]), k);
                    q[r] = e[r] * dt + dw;
                }
            }
            plain_em_step(ham, plan, q, dt, w);
            const double n2 = norm2_of(w.psi.data(), dim);
            if (n2 < 1e-12) {
                out.warnings.push_back("norm collapse in trajectory " +
                                       std::to_string(traj_index));
                return out;
            }
            renormalize(w.psi.data(), dim, n2);
            if ((k + 1) % per_sample == 0) {
                record(dt * static_cast<double>(k + 1));
            }
        }
        return out;
    }

    const bool split = opts.dt_unitary > 0.0;
    const double dt = opts.dt_noise;
    const int fines_per_macro =
        split ? std::max(1, static_cast<int>(std::llround(opts.dt_unitary / dt))) : 1;
    const double macro_dt = split ? fines_per_macro * dt : dt;

    ChebyshevT<Real> cheb;
    const double cheb_tol =
        std::max(opts.cheb_tol, std::is_same_v<Real, float> ? 1e-7 : 0.0);
    cheb.prepare(ham, macro_dt, cheb_tol);

    const auto n_macro = static_cast<std::size_t>(std::llround(opts.T / macro_dt));
    const int macros_per_sample =
        std::max(1, static_cast<int>(std::llround(opts.sample_dt / macro_dt)));

    ChainTrajectory out;
    std::vector<double> e, occ;
    double norm2 = 1.0;

    auto record = [&](double t) {
        out.times.push_back(t);
        out.bond_currents.push_back(bond_currents_t<Real>(ham, w.psi.data()));
        out.current.push_back(
            junction_current_from_bonds(ham, out.bond_currents.back()));
        if (opts.record_junction_rho) {
            out.junction_rho.push_back(reduced_junction_t<Real>(spec, w.psi.data()));
        }
        if (opts.record_total_z) {
            out.total_z.push_back(total_z_t<Real>(w.psi.data(), ham.n_sites, dim));
        }
    };
    record(0.0);

    std::uint64_t fine_step = 0;
    std::vector<double> q(plan.bit.size());
    const double sqrt_dt = std::sqrt(dt);
    const bool trace = std::getenv("SJX_TRACE") != nullptr;
    double t_exp = 0, t_kick = 0, t_cheb = 0, t_rec = 0;
    auto tick = [] { return std::chrono::steady_clock::now(); };
    auto lap = [&](auto& acc, auto t0) {
        acc += std::chrono::duration<double>(tick() - t0).count();
    };
    for (std::size_t m = 0; m < n_macro; ++m) {
        // noise block (skipped entirely while the absorber region is empty)
        if (!plan.bit.empty()) {
            for (int f = 0; f < fines_per_macro; ++f) {
                auto t0 = tick();
                jump_expectations<Real>(plan, w.psi.data(), dim, e, occ, norm2);
                lap(t_exp, t0);
                if (norm2 < 1e-12) {
                    out.warnings.push_back("norm collapse in trajectory " +
                                           std::to_string(traj_index));
                    return out;
                }
                double active = 0.0;
                for (double o : occ) active += o;
                if (active < 1e-14) {
                    fine_step += static_cast<std::uint64_t>(fines_per_macro - f);
                    break; // nothing for the absorbers to do yet
                }
                for (std::size_t r = 0; r < plan.bit.size(); ++r) {
                    const double dw =
                        sqrt_dt * counter_normal(opts.seed, traj_index,
                                                 static_cast<std::uint64_t>(
                                                     plan.site[r]),
                                                 fine_step);
                    q[r] = e[r] * dt + dw;
                }
                auto t1 = tick();
                noise_kick<Real>(plan, q, dt, w.psi.data(), w.a.data(), dim);
                std::swap(w.psi, w.a);
                lap(t_kick, t1);
                ++fine_step;
            }
            const double n2 = norm2_of(w.psi.data(), dim);
            if (n2 < 1e-12) {
                out.warnings.push_back("norm collapse in trajectory " +
                                       std::to_string(traj_index));
                return out;
            }
            renormalize(w.psi.data(), dim, n2);
        } else {
            fine_step += static_cast<std::uint64_t>(fines_per_macro);
        }
        auto t2 = tick();
        cheb.step(ham, w);
        const double n2 = norm2_of(w.psi.data(), dim);
        renormalize(w.psi.data(), dim, n2);
        lap(t_cheb, t2);
        if ((m + 1) % static_cast<std::size_t>(macros_per_sample) == 0) {
            auto t3 = tick();
            record(macro_dt * static_cast<double>(m + 1));
            lap(t_rec, t3);
        }
    }
    if (trace) {
        std::fprintf(stderr,
                     "[traj %llu] order=%zu exp=%.1fs kick=%.1fs cheb=%.1fs rec=%.1fs\n",
                     static_cast<unsigned long long>(traj_index),
                     cheb.coeff.size(), t_exp, t_kick, t_cheb, t_rec);
    }
    if (std::is_same_v<Real, double>) {
        out.final_state.resize(dim);
        for (std::size_t s = 0; s < dim; ++s) {
            out.final_state(s) = cplx(w.psi[s].real(), w.psi[s].imag());
        }
    }
    return out;
}

} // namespace

namespace {

ChainTrajectory dispatch_trajectory(const ChainHamiltonian& ham,
                                    const ChainSpec& spec, const AbsorberSpec& left,
                                    const AbsorberSpec& right,
                                    const TrajectoryOptions& opts,
                                    std::uint64_t traj_index) {
    if (spec.n_sites() >= 18) {
        return run_trajectory<float>(ham, spec, left, right, opts, traj_index);
    }
    return run_trajectory<double>(ham, spec, left, right, opts, traj_index);
}

} // namespace

ChainTrajectory evolve_trajectory(const ChainSpec& spec, const AbsorberSpec& left,
                                  const AbsorberSpec& right,
                                  const TrajectoryOptions& opts,
                                  std::uint64_t traj_index) {
    spec.validate();
    const auto ham = build_chain_hamiltonian(spec);
    return dispatch_trajectory(ham, spec, left, right, opts, traj_index);
}

TrajectoryEnsemble ensemble_average(const ChainSpec& spec, const AbsorberSpec& left,
                                    const AbsorberSpec& right,
                                    const TrajectoryOptions& opts, int m,
                                    int threads) {
    if (m < 1) throw ValidationError("ensemble_average: need at least one trajectory");
    spec.validate();
    flush_denormals();
    auto ham = build_chain_hamiltonian(spec);
    if (spec.n_sites() >= 16) tighten_bounds(ham);
    std::vector<ChainTrajectory> results(m);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int idx = next.fetch_add(1);
            if (idx >= m) return;
            results[idx] = dispatch_trajectory(ham, spec, left, right, opts,
                                               static_cast<std::uint64_t>(idx));
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    TrajectoryEnsemble ens;
    ens.seed = opts.seed;
    // reduce in trajectory order: identical output for any thread count
    std::size_t n_samples = 0;
    for (const auto& r : results) {
        if (r.warnings.empty()) n_samples = std::max(n_samples, r.times.size());
    }
    std::vector<int> counted;
    for (int i = 0; i < m; ++i) {
        const auto& r = results[i];
        if (!r.warnings.empty() && r.times.size() < n_samples) {
            ens.warnings.push_back(r.warnings.front());
            continue;
        }
        counted.push_back(i);
    }
    if (counted.empty()) {
        throw NumericError("ensemble_average: every trajectory aborted");
    }
    const int mm = static_cast<int>(counted.size());
    ens.trajectories = mm;
    ens.times = results[counted.front()].times;
    const std::size_t nb = results[counted.front()].bond_currents.front().size();

    ens.mean_bond_currents.assign(n_samples, Eigen::VectorXd::Zero(nb));
    ens.se_bond_currents.assign(n_samples, Eigen::VectorXd::Zero(nb));
    ens.mean_current.assign(n_samples, 0.0);
    ens.se_current.assign(n_samples, 0.0);

    for (std::size_t k = 0; k < n_samples; ++k) {
        for (int i : counted) {
            ens.mean_bond_currents[k] += results[i].bond_currents[k];
            ens.mean_current[k] += results[i].current[k];
        }
        ens.mean_bond_currents[k] /= mm;
        ens.mean_current[k] /= mm;
        if (mm > 1) {
            Eigen::VectorXd var = Eigen::VectorXd::Zero(nb);
            double varc = 0.0;
            for (int i : counted) {
                const Eigen::VectorXd d =
                    results[i].bond_currents[k] - ens.mean_bond_currents[k];
                var += d.cwiseProduct(d);
                const double dc = results[i].current[k] - ens.mean_current[k];
                varc += dc * dc;
            }
            ens.se_bond_currents[k] =
                (var / (mm * (mm - 1.0))).cwiseSqrt();
            ens.se_current[k] = std::sqrt(varc / (mm * (mm - 1.0)));
        }
    }
    return ens;
}

} // namespace sjx
