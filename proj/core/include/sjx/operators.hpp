// Operator algebra on few-qubit Hilbert spaces: tensor embedding, Heisenberg
// evolution, eigendecomposition with Bohr-frequency grouping.
//
// Conventions, fixed repo-wide:
//   basis per site {|0>, |1>},  Z|1> = +|1>,  Z|0> = -|0>,  sigma = |0><1|.
// The first site label is the leftmost (most significant) tensor factor.

#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sjx {

using cplx = std::complex<double>;

inline constexpr double kDegeneracyTol = 1e-9; // Bohr-frequency grouping, units of J

struct HilbertSpace {
    std::vector<std::string> sites;
    int dim{1};

    HilbertSpace() = default;
    explicit HilbertSpace(std::vector<std::string> labels);

    // n sites labeled "0", "1", ...
    static HilbertSpace qubits(int n);

    int site_index(const std::string& label) const; // throws ValidationError
    int n_sites() const { return static_cast<int>(sites.size()); }

    bool operator==(const HilbertSpace& other) const {
        return sites == other.sites;
    }
};

struct Operator {
    HilbertSpace space;
    Eigen::MatrixXcd mat;

    Operator() = default;
    Operator(HilbertSpace sp, Eigen::MatrixXcd m);

    bool is_hermitian(double tol = 1e-12) const;
    Operator adjoint() const { return {space, mat.adjoint()}; }
    cplx trace() const { return mat.trace(); }
};

Operator operator*(const Operator& a, const Operator& b);
Operator operator+(const Operator& a, const Operator& b);
Operator operator-(const Operator& a, const Operator& b);
Operator operator*(cplx s, const Operator& a);

// ------------------------------ local matrices ------------------------------

Eigen::Matrix2cd sigma_minus(); // |0><1|
Eigen::Matrix2cd sigma_plus();  // |1><0|
Eigen::Matrix2cd pauli_z();     // diag(-1, +1)
Eigen::Matrix2cd identity2();

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// ------------------------------- eigensystem --------------------------------

struct EigenSystem {
    Eigen::VectorXd energies;                 // all eigenvalues, ascending
    Eigen::MatrixXcd vectors;                 // columns matching `energies`
    std::vector<double> level_energies;       // degenerate levels merged
    std::vector<Eigen::MatrixXcd> projectors; // P(E) per merged level
    std::vector<double> frequencies;          // distinct Bohr frequencies E' - E
    double tol{kDegeneracyTol};

    // Frequency-resolved component of A: sum over level pairs with
    // E' - E within tol of omega of P(E) A P(E').
    Eigen::MatrixXcd component(const Eigen::MatrixXcd& a, double omega) const;
};

// -------------------------------- operations --------------------------------

// Identity everywhere except `site`, where the 2x2 `local` acts.
Operator embed(const Eigen::Matrix2cd& local, const std::string& site,
               const HilbertSpace& space);

// exp(iHt) op exp(-iHt), via eigendecomposition of Hermitian H.
Operator heisenberg(const Operator& op, const Operator& hamiltonian, double t);

EigenSystem eigensystem(const Operator& hamiltonian,
                        double degeneracy_tol = kDegeneracyTol);

} // namespace sjx
