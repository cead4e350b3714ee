// Exact statevector evolution of junction + finite XXZ leads: sparse
// Hamiltonian application, Chebyshev propagation, bond-resolved currents,
// and reduced junction states.
//
// Site 0 is the left boundary; left lead sites [0, n_left), junction spins
// at n_left and n_left+1, right lead [n_left+2, n_sites). Basis state bit i
// = 1 means site i is up. All bond currents are reported in the rightward
// orientation (positive = magnetization flowing toward larger site index).
//
// Each junction spin couples to a site in the BULK of its lead (the lead
// correlation seen by the junction is the translation-invariant one, with
// phase 4 Jz and a t^{-1/2} envelope); the contact sits mid-lead so both
// lead halves act as reservoirs.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sjx/bath.hpp"
#include "sjx/junction.hpp"

namespace sjx {

struct ChainSpec {
    int n_left{8};
    int n_right{8};
    BathSpec bath_left;   // polarization: up by default
    BathSpec bath_right;  // set polarization down for the transport protocol
    JunctionSpec junction;
    int junction_state{0}; // |L R> basis index, 0 = |downdown>

    ChainSpec() { bath_right.polarization = Polarization::down; }
    int n_sites() const { return n_left + 2 + n_right; }
    std::size_t dim() const { return std::size_t(1) << n_sites(); }
    // bulk contact sites, mirror-symmetric placement
    int contact_left() const { return (n_left - 1) / 2; }
    int contact_right() const { return n_sites() - 1 - (n_right - 1) / 2; }
    void validate() const;
};

struct ChainBond {
    int a{0}, b{0};  // a < b, adjacent sites
    double g{0.0};   // flip-flop coefficient: g (s_a+ s_b + s_b+ s_a)
};

struct ChainHamiltonian {
    int n_sites{0};
    std::vector<ChainBond> bonds;
    std::vector<double> diag;  // diagonal part per basis state
    double e_min{0.0}, e_max{0.0};
    int left_contact_bond{-1};
    int right_contact_bond{-1};
    int junction_bond{-1};
    int junction_site_left{0};

    std::size_t dim() const { return std::size_t(1) << n_sites; }
};

ChainHamiltonian build_chain_hamiltonian(const ChainSpec& spec);

// Dense matrix for small chains (tests); throws above 12 sites.
Eigen::MatrixXcd chain_dense(const ChainHamiltonian& ham);

// The polarized product state of the protocol.
Eigen::VectorXcd chain_initial_state(const ChainSpec& spec);

// out = H in
void chain_apply(const ChainHamiltonian& ham, const cplx* in, cplx* out);
void chain_apply(const ChainHamiltonian& ham, const std::complex<float>* in,
                 std::complex<float>* out);
// caller-provided single-precision diagonal (hot trajectory path)
void chain_apply(const ChainHamiltonian& ham, const float* diag,
                 const std::complex<float>* in, std::complex<float>* out);

// fused Chebyshev recurrence pass:
//   next = a (H cur) - b cur - prev,  acc += ck next
// prev/acc may be null (dropped term / no accumulation)
void chain_cheb_sweep(const ChainHamiltonian& ham, const float* diag,
                      const std::complex<float>* cur, const std::complex<float>* prev,
                      std::complex<float>* next, std::complex<float>* acc, float a,
                      float b, std::complex<float> ck);
void chain_cheb_sweep(const ChainHamiltonian& ham, const double* diag,
                      const cplx* cur, const cplx* prev, cplx* next, cplx* acc,
                      double a, double b, cplx ck);

// Lanczos-based refinement of the Gershgorin spectral bounds (shrinks the
// Chebyshev window, never widens it)
void tighten_bounds(ChainHamiltonian& ham, int iterations = 60,
                    double margin = 0.03);

// Per-thread FTZ/DAZ: the statevector tails are dominated by amplitudes far
// below the subnormal threshold, which would otherwise stall the FPU.
void flush_denormals();

// <psi| j_bond |psi> for every bond, rightward orientation.
Eigen::VectorXd bond_currents(const ChainHamiltonian& ham,
                              const Eigen::VectorXcd& psi);

Eigen::Matrix4cd reduced_junction(const ChainSpec& spec,
                                  const Eigen::VectorXcd& psi);

double total_z(const Eigen::VectorXcd& psi, int n_sites);

struct ChainTrajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> bond_currents;  // per sample
    std::vector<double> current;                 // junction current (I_L - I_R)/2
    std::vector<Eigen::Matrix4cd> junction_rho;
    std::vector<double> total_z;
    Eigen::VectorXcd final_state;
    std::vector<std::string> warnings;

    // junction current as a CurrentTrace-compatible series
    double interp_current(double t) const;
};

// Chebyshev propagation with per-step truncation error <= tol.
ChainTrajectory evolve_unitary(const ChainSpec& spec, double dt_sample, double T,
                               double tol = 1e-9);

// junction current from the two contact-bond currents
double junction_current_from_bonds(const ChainHamiltonian& ham,
                                   const Eigen::VectorXd& bonds);

} // namespace sjx
