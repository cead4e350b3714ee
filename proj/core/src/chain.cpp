#include "sjx/chain.hpp"

#include <cmath>

#if defined(__SSE2__)
#include <immintrin.h>
#endif

#include "sjx/bessel.hpp"
#include "sjx/errors.hpp"

namespace sjx {

void flush_denormals() {
#if defined(__SSE2__)
    _mm_setcsr(_mm_getcsr() | 0x8040); // FTZ + DAZ
#endif
}

void ChainSpec::validate() const {
    if (n_left < 0 || n_right < 0) {
        throw ValidationError("ChainSpec: lead lengths must be >= 0");
    }
    if (n_sites() > 24) {
        throw ValidationError("ChainSpec: statevector capped at 24 sites");
    }
    if (junction_state < 0 || junction_state > 3) {
        throw ValidationError("ChainSpec: junction_state must be a basis index 0..3");
    }
    bath_left.validate();
    bath_right.validate();
    junction.validate();
}

ChainHamiltonian build_chain_hamiltonian(const ChainSpec& spec) {
    spec.validate();
    ChainHamiltonian ham;
    ham.n_sites = spec.n_sites();
    const int jl = spec.n_left;
    const int jr = spec.n_left + 1;
    ham.junction_site_left = jl;

    std::vector<std::pair<std::pair<int, int>, double>> zz; // (a,b) -> coefficient
    std::vector<double> field(ham.n_sites, 0.0);

    // left lead, Eq.-(6) structure with open boundaries
    for (int r = 0; r + 1 < spec.n_left; ++r) {
        ham.bonds.push_back({r, r + 1, 2.0 * spec.bath_left.J});
        zz.push_back({{r, r + 1}, spec.bath_left.Jz});
    }
    // left contact: junction spin onto a bulk lead site (exchange only)
    if (spec.n_left > 0) {
        ham.left_contact_bond = static_cast<int>(ham.bonds.size());
        ham.bonds.push_back({spec.contact_left(), jl, 2.0 * spec.junction.gamma});
    }
    // junction
    ham.junction_bond = static_cast<int>(ham.bonds.size());
    ham.bonds.push_back({jl, jr, 2.0 * spec.junction.J_S});
    zz.push_back({{jl, jr}, spec.junction.Jz_sys});
    field[jl] += spec.junction.Delta;
    field[jr] -= spec.junction.Delta;
    // right contact
    if (spec.n_right > 0) {
        ham.right_contact_bond = static_cast<int>(ham.bonds.size());
        ham.bonds.push_back({jr, spec.contact_right(), 2.0 * spec.junction.gamma});
    }
    // right lead
    for (int r = jr + 1; r + 1 < ham.n_sites; ++r) {
        ham.bonds.push_back({r, r + 1, 2.0 * spec.bath_right.J});
        zz.push_back({{r, r + 1}, spec.bath_right.Jz});
    }

    const std::size_t dim = ham.dim();
    ham.diag.assign(dim, 0.0);
    for (std::size_t s = 0; s < dim; ++s) {
        double e = 0.0;
        for (const auto& [pair, c] : zz) {
            const double za = (s >> pair.first) & 1 ? 1.0 : -1.0;
            const double zb = (s >> pair.second) & 1 ? 1.0 : -1.0;
            e += c * za * zb;
        }
        for (int i = 0; i < ham.n_sites; ++i) {
            if (field[i] != 0.0) e += field[i] * (((s >> i) & 1) ? 1.0 : -1.0);
        }
        ham.diag[s] = e;
    }

    // Gershgorin-style spectral bounds
    double lo = 0.0, hi = 0.0;
    for (std::size_t s = 0; s < dim; ++s) {
        double off = 0.0;
        for (const auto& b : ham.bonds) {
            if (((s >> b.a) & 1) != ((s >> b.b) & 1)) off += std::abs(b.g);
        }
        lo = std::min(lo, ham.diag[s] - off);
        hi = std::max(hi, ham.diag[s] + off);
    }
    ham.e_min = lo;
    ham.e_max = hi;
    return ham;
}

Eigen::MatrixXcd chain_dense(const ChainHamiltonian& ham) {
    if (ham.n_sites > 12) {
        throw ValidationError("chain_dense: capped at 12 sites");
    }
    const std::size_t dim = ham.dim();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::size_t s = 0; s < dim; ++s) {
        m(s, s) = ham.diag[s];
        for (const auto& b : ham.bonds) {
            const bool ba = (s >> b.a) & 1;
            const bool bb = (s >> b.b) & 1;
            if (ba != bb) {
                const std::size_t t = s ^ ((std::size_t(1) << b.a) |
                                           (std::size_t(1) << b.b));
                m(t, s) += b.g;
            }
        }
    }
    return m;
}

Eigen::VectorXcd chain_initial_state(const ChainSpec& spec) {
    std::size_t s = 0;
    for (int i = 0; i < spec.n_left; ++i) {
        if (spec.bath_left.polarization == Polarization::up) s |= std::size_t(1) << i;
    }
    const int jl = spec.n_left;
    if (spec.junction_state & 2) s |= std::size_t(1) << jl;       // L bit
    if (spec.junction_state & 1) s |= std::size_t(1) << (jl + 1); // R bit
    for (int i = spec.n_left + 2; i < spec.n_sites(); ++i) {
        if (spec.bath_right.polarization == Polarization::up) s |= std::size_t(1) << i;
    }
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(spec.dim());
    psi(s) = 1.0;
    return psi;
}

namespace {

// Reference kernel for tiny dimensions.
template <class Real>
void apply_small(const ChainHamiltonian& ham, const Real* diag,
                 const std::complex<Real>* in, std::complex<Real>* out) {
    const std::size_t dim = ham.dim();
    for (std::size_t s = 0; s < dim; ++s) {
        std::complex<Real> acc = diag[s] * in[s];
        for (const auto& b : ham.bonds) {
            const std::size_t m = (std::size_t(1) << b.a) | (std::size_t(1) << b.b);
            const std::size_t x = s & m;
            if (x != 0 && x != m) acc += static_cast<Real>(b.g) * in[s ^ m];
        }
        out[s] = acc;
    }
}

// Group-of-8 kernel: states are processed in blocks sharing bits >= 3.
// Bonds on bits >= 3 are active uniformly across a block (one test, then a
// contiguous vectorizable lane loop); bonds touching bits 0..2 use fixed
// per-lane activity tables and in-block or neighbor-block partners.
template <class Real>
void apply_grouped(const ChainHamiltonian& ham, const Real* __restrict diag,
                   const std::complex<Real>* __restrict in,
                   std::complex<Real>* __restrict out) {
    struct HighBond {
        std::size_t group_flip;
        std::size_t test_a, test_b; // group-bit masks
        Real g;
    };
    struct LowBond {
        std::size_t group_flip;    // 0 for both-low bonds
        std::size_t group_test;    // group-bit mask of the high member, 0 if none
        int lane_xor;
        Real g;
        Real lane_act0[8];         // activity when the high bit (if any) is 0
        Real lane_act1[8];         // ... and when it is 1
    };
    HighBond high[64];
    LowBond low[8];
    int nh = 0, nl = 0;
    for (const auto& b : ham.bonds) {
        const std::size_t mask = (std::size_t(1) << b.a) | (std::size_t(1) << b.b);
        if (b.a >= 3 && b.b >= 3) {
            high[nh++] = {mask >> 3, std::size_t(1) << (b.a - 3),
                          std::size_t(1) << (b.b - 3), static_cast<Real>(b.g)};
        } else {
            LowBond lb{};
            lb.group_flip = mask >> 3;
            lb.lane_xor = static_cast<int>(mask & 7);
            lb.g = static_cast<Real>(b.g);
            const int hi = (b.b >= 3) ? b.b : -1; // bonds are a < b
            lb.group_test = (hi >= 0) ? (std::size_t(1) << (hi - 3)) : 0;
            for (int l = 0; l < 8; ++l) {
                const int la = (l >> b.a) & 1; // b.a < 3 always here
                if (hi >= 0) {
                    lb.lane_act0[l] = (la != 0) ? Real(1) : Real(0);
                    lb.lane_act1[l] = (la == 0) ? Real(1) : Real(0);
                } else {
                    const int lbit = (l >> b.b) & 1;
                    lb.lane_act0[l] = (la != lbit) ? Real(1) : Real(0);
                    lb.lane_act1[l] = lb.lane_act0[l];
                }
            }
            low[nl++] = lb;
        }
    }

    const std::size_t groups = ham.dim() >> 3;
    for (std::size_t g = 0; g < groups; ++g) {
        const std::size_t base = g << 3;
        std::complex<Real> acc[8];
        for (int l = 0; l < 8; ++l) acc[l] = diag[base + l] * in[base + l];
        for (int k = 0; k < nh; ++k) {
            const HighBond& hb = high[k];
            if (((g & hb.test_a) != 0) == ((g & hb.test_b) != 0)) continue;
            const std::complex<Real>* p = in + ((g ^ hb.group_flip) << 3);
            for (int l = 0; l < 8; ++l) acc[l] += hb.g * p[l];
        }
        for (int k = 0; k < nl; ++k) {
            const LowBond& lb = low[k];
            const std::complex<Real>* p = in + ((g ^ lb.group_flip) << 3);
            const Real* act = (lb.group_test && (g & lb.group_test)) ? lb.lane_act1
                                                                     : lb.lane_act0;
            for (int l = 0; l < 8; ++l) {
                acc[l] += (lb.g * act[l]) * p[l ^ lb.lane_xor];
            }
        }
        for (int l = 0; l < 8; ++l) out[base + l] = acc[l];
    }
}

template <class Real>
void apply_impl(const ChainHamiltonian& ham, const Real* diag,
                const std::complex<Real>* in, std::complex<Real>* out) {
    if (ham.n_sites < 4) {
        apply_small(ham, diag, in, out);
    } else {
        apply_grouped(ham, diag, in, out);
    }
}

// Fused Chebyshev recurrence sweep:
//   t       = a (H cur) - b cur - prev   (prev may be null)
//   next    = t
//   acc    += ck t                        (acc may be null)
// One memory pass instead of three.
template <class Real>
void cheb_sweep_impl(const ChainHamiltonian& ham, const Real* __restrict diag,
                     const std::complex<Real>* __restrict cur,
                     const std::complex<Real>* prev, std::complex<Real>* next,
                     std::complex<Real>* __restrict acc, Real a,
                     Real b, std::complex<Real> ck) {
    // prev and next may alias: T_{k+1} overwrites T_{k-1} in place
    const std::size_t dim = ham.dim();
    if (ham.n_sites < 4) {
        apply_small(ham, diag, cur, next);
        for (std::size_t s = 0; s < dim; ++s) {
            std::complex<Real> t = a * next[s] - b * cur[s];
            if (prev) t -= prev[s];
            next[s] = t;
            if (acc) acc[s] += ck * t;
        }
        return;
    }
    struct HighBond {
        std::size_t group_flip;
        std::size_t test_a, test_b;
        Real g;
    };
    struct LowBond {
        std::size_t group_flip;
        std::size_t group_test;
        int lane_xor;
        Real g;
        Real lane_act0[8];
        Real lane_act1[8];
    };
    HighBond high[64];
    LowBond low[8];
    int nh = 0, nl = 0;
    for (const auto& bnd : ham.bonds) {
        const std::size_t mask =
            (std::size_t(1) << bnd.a) | (std::size_t(1) << bnd.b);
        if (bnd.a >= 3 && bnd.b >= 3) {
            high[nh++] = {mask >> 3, std::size_t(1) << (bnd.a - 3),
                          std::size_t(1) << (bnd.b - 3), static_cast<Real>(bnd.g)};
        } else {
            LowBond lb{};
            lb.group_flip = mask >> 3;
            lb.lane_xor = static_cast<int>(mask & 7);
            lb.g = static_cast<Real>(bnd.g);
            const int hi = (bnd.b >= 3) ? bnd.b : -1;
            lb.group_test = (hi >= 0) ? (std::size_t(1) << (hi - 3)) : 0;
            for (int l = 0; l < 8; ++l) {
                const int la = (l >> bnd.a) & 1;
                if (hi >= 0) {
                    lb.lane_act0[l] = (la != 0) ? Real(1) : Real(0);
                    lb.lane_act1[l] = (la == 0) ? Real(1) : Real(0);
                } else {
                    const int lbit = (l >> bnd.b) & 1;
                    lb.lane_act0[l] = (la != lbit) ? Real(1) : Real(0);
                    lb.lane_act1[l] = lb.lane_act0[l];
                }
            }
            low[nl++] = lb;
        }
    }
    // float-view inner loops: every real-coefficient operation is a
    // contiguous 16-wide fused multiply-add over the interleaved re/im pairs
    const Real* __restrict fcur = reinterpret_cast<const Real*>(cur);
    const Real* fprev = reinterpret_cast<const Real*>(prev);
    Real* fnext = reinterpret_cast<Real*>(next);
    Real* __restrict facc = reinterpret_cast<Real*>(acc);
    const Real ckr = ck.real();
    const Real cki = ck.imag();

    const std::size_t groups = dim >> 3;
    for (std::size_t g = 0; g < groups; ++g) {
        const std::size_t base = g << 3;
        const std::size_t fb = g << 4;
        Real h16[16];
        for (int l = 0; l < 8; ++l) {
            const Real dv = diag[base + l];
            h16[2 * l] = dv * fcur[fb + 2 * l];
            h16[2 * l + 1] = dv * fcur[fb + 2 * l + 1];
        }
        for (int k = 0; k < nh; ++k) {
            const HighBond& hb = high[k];
            if (((g & hb.test_a) != 0) == ((g & hb.test_b) != 0)) continue;
            const Real* __restrict p = fcur + ((g ^ hb.group_flip) << 4);
            const Real gg = hb.g;
            for (int i = 0; i < 16; ++i) h16[i] += gg * p[i];
        }
        for (int k = 0; k < nl; ++k) {
            const LowBond& lb = low[k];
            const Real* __restrict p = fcur + ((g ^ lb.group_flip) << 4);
            const Real* act = (lb.group_test && (g & lb.group_test)) ? lb.lane_act1
                                                                     : lb.lane_act0;
            for (int l = 0; l < 8; ++l) {
                const Real w = lb.g * act[l];
                const int pl = 2 * (l ^ lb.lane_xor);
                h16[2 * l] += w * p[pl];
                h16[2 * l + 1] += w * p[pl + 1];
            }
        }
        if (prev && acc) {
            Real t16[16];
            for (int i = 0; i < 16; ++i) {
                t16[i] = a * h16[i] - b * fcur[fb + i] - fprev[fb + i];
                fnext[fb + i] = t16[i];
            }
            for (int l = 0; l < 8; ++l) {
                const Real tr = t16[2 * l];
                const Real ti = t16[2 * l + 1];
                facc[fb + 2 * l] += ckr * tr - cki * ti;
                facc[fb + 2 * l + 1] += ckr * ti + cki * tr;
            }
        } else {
            for (int i = 0; i < 16; ++i) {
                Real t = a * h16[i] - b * fcur[fb + i];
                if (prev) t -= fprev[fb + i];
                fnext[fb + i] = t;
            }
            if (acc) {
                for (int l = 0; l < 8; ++l) {
                    const Real tr = fnext[fb + 2 * l];
                    const Real ti = fnext[fb + 2 * l + 1];
                    facc[fb + 2 * l] += ckr * tr - cki * ti;
                    facc[fb + 2 * l + 1] += ckr * ti + cki * tr;
                }
            }
        }
    }
}

std::vector<float>& float_diag_cache(const ChainHamiltonian& ham) {
    thread_local const void* key = nullptr;
    thread_local std::vector<float> cache;
    if (key != &ham || cache.size() != ham.diag.size()) {
        cache.resize(ham.diag.size());
        for (std::size_t s = 0; s < ham.diag.size(); ++s) {
            cache[s] = static_cast<float>(ham.diag[s]);
        }
        key = &ham;
    }
    return cache;
}

} // namespace

void chain_apply(const ChainHamiltonian& ham, const cplx* in, cplx* out) {
    apply_impl(ham, ham.diag.data(), in, out);
}
void chain_apply(const ChainHamiltonian& ham, const std::complex<float>* in,
                 std::complex<float>* out) {
    apply_impl<float>(ham, float_diag_cache(ham).data(), in, out);
}
void chain_apply(const ChainHamiltonian& ham, const float* diag,
                 const std::complex<float>* in, std::complex<float>* out) {
    apply_impl<float>(ham, diag, in, out);
}

void chain_cheb_sweep(const ChainHamiltonian& ham, const float* diag,
                      const std::complex<float>* cur, const std::complex<float>* prev,
                      std::complex<float>* next, std::complex<float>* acc, float a,
                      float b, std::complex<float> ck) {
    cheb_sweep_impl<float>(ham, diag, cur, prev, next, acc, a, b, ck);
}
void chain_cheb_sweep(const ChainHamiltonian& ham, const double* diag,
                      const cplx* cur, const cplx* prev, cplx* next, cplx* acc,
                      double a, double b, cplx ck) {
    cheb_sweep_impl<double>(ham, diag, cur, prev, next, acc, a, b, ck);
}

void tighten_bounds(ChainHamiltonian& ham, int iterations, double margin) {
    // plain Lanczos extremal-eigenvalue estimates; the Chebyshev window must
    // cover the spectrum, so pad the estimates by `margin` of the range
    const std::size_t dim = ham.dim();
    if (dim < 64) return;
    std::vector<cplx> v(dim), w(dim), prev(dim, cplx(0, 0));
    std::uint64_t x = 0x243F6A8885A308D3ull;
    auto rnd = [&x] {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        return static_cast<double>(x >> 11) * 0x1.0p-53 - 0.5;
    };
    double nrm = 0.0;
    for (auto& a : v) {
        a = cplx(rnd(), rnd());
        nrm += std::norm(a);
    }
    nrm = std::sqrt(nrm);
    for (auto& a : v) a /= nrm;

    std::vector<double> alpha, beta;
    double b_prev = 0.0;
    for (int it = 0; it < iterations; ++it) {
        chain_apply(ham, v.data(), w.data());
        cplx a(0, 0);
        for (std::size_t s = 0; s < dim; ++s) a += std::conj(v[s]) * w[s];
        alpha.push_back(a.real());
        double bn = 0.0;
        for (std::size_t s = 0; s < dim; ++s) {
            w[s] -= a.real() * v[s] + b_prev * prev[s];
            bn += std::norm(w[s]);
        }
        bn = std::sqrt(bn);
        if (bn < 1e-12) break;
        beta.push_back(bn);
        b_prev = bn;
        for (std::size_t s = 0; s < dim; ++s) {
            prev[s] = v[s];
            v[s] = w[s] / bn;
        }
    }
    const int m = static_cast<int>(alpha.size());
    if (m < 8) return;
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        tri(i, i) = alpha[i];
        if (i + 1 < m && i < static_cast<int>(beta.size())) {
            tri(i, i + 1) = tri(i + 1, i) = beta[i];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    const double pad = margin * (hi - lo);
    // never widen beyond the rigorous bounds
    ham.e_min = std::max(ham.e_min, lo - pad);
    ham.e_max = std::min(ham.e_max, hi + pad);
}

Eigen::VectorXd bond_currents(const ChainHamiltonian& ham,
                              const Eigen::VectorXcd& psi) {
    const std::size_t dim = ham.dim();
    Eigen::VectorXd out(ham.bonds.size());
    for (std::size_t k = 0; k < ham.bonds.size(); ++k) {
        const auto& b = ham.bonds[k];
        const std::size_t mask = (std::size_t(1) << b.a) | (std::size_t(1) << b.b);
        cplx hop(0.0, 0.0); // <s_a+ s_b>
        for (std::size_t s = 0; s < dim; ++s) {
            // s_b lowers b, s_a+ raises a: source has b set, a clear
            if (((s >> b.b) & 1) && !((s >> b.a) & 1)) {
                hop += std::conj(psi(s ^ mask)) * psi(s);
            }
        }
        // j_{a->b} = i[H_bond, Z_b] = 2 i g (s_a+ s_b - s_b+ s_a)
        out(k) = -4.0 * b.g * hop.imag();
    }
    return out;
}

double junction_current_from_bonds(const ChainHamiltonian& ham,
                                   const Eigen::VectorXd& bonds) {
    double i_l = 0.0, i_r_inflow = 0.0;
    if (ham.left_contact_bond >= 0) i_l = bonds(ham.left_contact_bond);
    if (ham.right_contact_bond >= 0) i_r_inflow = -bonds(ham.right_contact_bond);
    return 0.5 * (i_l - i_r_inflow);
}

Eigen::Matrix4cd reduced_junction(const ChainSpec& spec,
                                  const Eigen::VectorXcd& psi) {
    const int jl = spec.n_left;
    const std::size_t bl = std::size_t(1) << jl;
    const std::size_t br = std::size_t(1) << (jl + 1);
    const std::size_t mask = bl | br;
    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
    const std::size_t dim = spec.dim();
    for (std::size_t s = 0; s < dim; ++s) {
        const int i4 = (((s & bl) ? 2 : 0) | ((s & br) ? 1 : 0));
        const std::size_t rest = s & ~mask;
        for (int j4 = 0; j4 < 4; ++j4) {
            std::size_t t = rest;
            if (j4 & 2) t |= bl;
            if (j4 & 1) t |= br;
            rho(i4, j4) += psi(s) * std::conj(psi(t));
        }
    }
    return rho;
}

double total_z(const Eigen::VectorXcd& psi, int n_sites) {
    double acc = 0.0;
    for (std::size_t s = 0; s < static_cast<std::size_t>(psi.size()); ++s) {
        const double w = std::norm(psi(s));
        if (w == 0.0) continue;
        const int ups = __builtin_popcountll(s);
        acc += w * (2.0 * ups - n_sites);
    }
    return acc;
}

double ChainTrajectory::interp_current(double t) const {
    if (times.empty()) return 0.0;
    if (t <= times.front()) return current.front();
    if (t >= times.back()) return current.back();
    const double dt = times[1] - times[0];
    const auto k = static_cast<std::size_t>((t - times.front()) / dt);
    const double f = (t - times[k]) / dt;
    return (1.0 - f) * current[k] + f * current[k + 1];
}

// ----------------------------- Chebyshev stepper -----------------------------

namespace {

struct Chebyshev {
    double center{0.0};
    double halfwidth{1.0};
    std::vector<cplx> coeff; // c_k = (2 - d_k0) (-i)^k J_k(alpha) e^{-i center dt}

    // order selection: truncation tail below tol
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
            throw NumericError("chebyshev: step too large for the error budget");
        }
        coeff.resize(n + 1);
        const cplx phase = std::exp(cplx(0.0, -center * dt));
        cplx ik(1.0, 0.0); // (-i)^k
        for (int k = 0; k <= n; ++k) {
            coeff[k] = (k == 0 ? 1.0 : 2.0) * ik * jk[k] * phase;
            ik *= cplx(0.0, -1.0);
        }
    }

    // psi <- e^{-i H dt} psi, work vectors provided by the caller
    void step(const ChainHamiltonian& ham, Eigen::VectorXcd& psi,
              Eigen::VectorXcd& prev, Eigen::VectorXcd& cur,
              Eigen::VectorXcd& acc) const {
        const double inv_h = 1.0 / halfwidth;
        const double ctr_h = center / halfwidth;
        const std::size_t dim = ham.dim();
        chain_cheb_sweep(ham, ham.diag.data(), psi.data(), nullptr, cur.data(),
                         nullptr, inv_h, ctr_h, cplx(0, 0));
        for (std::size_t s = 0; s < dim; ++s) {
            acc(s) = coeff[0] * psi(s) + coeff[1] * cur(s);
            prev(s) = psi(s);
        }
        // in-place ping-pong: T_{k+1} overwrites T_{k-1}
        for (std::size_t k = 2; k < coeff.size(); ++k) {
            chain_cheb_sweep(ham, ham.diag.data(), cur.data(), prev.data(),
                             prev.data(), acc.data(), 2.0 * inv_h, 2.0 * ctr_h,
                             coeff[k]);
            prev.swap(cur);
        }
        psi.swap(acc);
    }
};

} // namespace

ChainTrajectory evolve_unitary(const ChainSpec& spec, double dt_sample, double T,
                               double tol) {
    spec.validate();
    flush_denormals();
    auto ham = build_chain_hamiltonian(spec);
    if (ham.n_sites >= 16) tighten_bounds(ham);
    Eigen::VectorXcd psi = chain_initial_state(spec);
    const auto n_steps = static_cast<std::size_t>(std::llround(T / dt_sample));

    Chebyshev cheb;
    cheb.prepare(ham, dt_sample, tol);

    Eigen::VectorXcd prev(psi.size()), cur(psi.size()), acc(psi.size());
    ChainTrajectory out;
    auto record = [&](double t) {
        out.times.push_back(t);
        out.bond_currents.push_back(bond_currents(ham, psi));
        out.current.push_back(junction_current_from_bonds(ham, out.bond_currents.back()));
        out.junction_rho.push_back(reduced_junction(spec, psi));
        out.total_z.push_back(total_z(psi, ham.n_sites));
    };
    record(0.0);
    for (std::size_t k = 1; k <= n_steps; ++k) {
        cheb.step(ham, psi, prev, cur, acc);
        const double norm = psi.norm();
        if (std::abs(norm - 1.0) > 50.0 * tol * static_cast<double>(k) + 1e-12) {
            throw NumericError("evolve_unitary: step-error budget exceeded, norm " +
                               std::to_string(norm));
        }
        psi /= norm;
        record(dt_sample * static_cast<double>(k));
    }
    out.final_state = std::move(psi);
    return out;
}

} // namespace sjx
