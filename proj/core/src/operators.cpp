#include "sjx/operators.hpp"

#include <algorithm>
#include <set>

#include "sjx/errors.hpp"

namespace sjx {

HilbertSpace::HilbertSpace(std::vector<std::string> labels) : sites(std::move(labels)) {
    std::set<std::string> seen(sites.begin(), sites.end());
    if (seen.size() != sites.size()) {
        throw ValidationError("HilbertSpace: site labels must be unique");
    }
    if (sites.size() > 24) {
        throw ValidationError("HilbertSpace: dense operators capped at 24 sites");
    }
    dim = 1 << sites.size();
}

HilbertSpace HilbertSpace::qubits(int n) {
    std::vector<std::string> labels;
    labels.reserve(n);
    for (int i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    return HilbertSpace(std::move(labels));
}

int HilbertSpace::site_index(const std::string& label) const {
    for (std::size_t i = 0; i < sites.size(); ++i) {
        if (sites[i] == label) return static_cast<int>(i);
    }
    throw ValidationError("HilbertSpace: unknown site label '" + label + "'");
}

Operator::Operator(HilbertSpace sp, Eigen::MatrixXcd m)
    : space(std::move(sp)), mat(std::move(m)) {
    if (mat.rows() != space.dim || mat.cols() != space.dim) {
        throw ValidationError("Operator: matrix side must equal space dimension");
    }
}

bool Operator::is_hermitian(double tol) const {
    return (mat - mat.adjoint()).cwiseAbs().maxCoeff() < tol;
}

static void check_same_space(const Operator& a, const Operator& b) {
    if (!(a.space == b.space)) {
        throw ValidationError("Operator: operands live on different spaces");
    }
}

Operator operator*(const Operator& a, const Operator& b) {
    check_same_space(a, b);
    return {a.space, a.mat * b.mat};
}
Operator operator+(const Operator& a, const Operator& b) {
    check_same_space(a, b);
    return {a.space, a.mat + b.mat};
}
Operator operator-(const Operator& a, const Operator& b) {
    check_same_space(a, b);
    return {a.space, a.mat - b.mat};
}
Operator operator*(cplx s, const Operator& a) { return {a.space, s * a.mat}; }

Eigen::Matrix2cd sigma_minus() {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(0, 1) = 1.0;
    return m;
}
Eigen::Matrix2cd sigma_plus() {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(1, 0) = 1.0;
    return m;
}
Eigen::Matrix2cd pauli_z() {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(0, 0) = -1.0;
    m(1, 1) = 1.0;
    return m;
}
Eigen::Matrix2cd identity2() { return Eigen::Matrix2cd::Identity(); }

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Operator embed(const Eigen::Matrix2cd& local, const std::string& site,
               const HilbertSpace& space) {
    const int pos = space.site_index(site);
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Identity(1, 1);
    for (int i = 0; i < space.n_sites(); ++i) {
        acc = (i == pos) ? kron(acc, local)
                         : kron(acc, Eigen::MatrixXcd(identity2()));
    }
    return {space, std::move(acc)};
}

Operator heisenberg(const Operator& op, const Operator& hamiltonian, double t) {
    check_same_space(op, hamiltonian);
    if (!hamiltonian.is_hermitian()) {
        throw ValidationError("heisenberg: Hamiltonian must be Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hamiltonian.mat);
    if (solver.info() != Eigen::Success) {
        throw NumericError("heisenberg: eigensolver failed");
    }
    const Eigen::VectorXd& e = solver.eigenvalues();
    const Eigen::MatrixXcd& v = solver.eigenvectors();
    Eigen::VectorXcd phase(e.size());
    for (Eigen::Index k = 0; k < e.size(); ++k) {
        phase(k) = std::exp(cplx(0.0, e(k) * t));
    }
    Eigen::MatrixXcd in_eig = v.adjoint() * op.mat * v;
    in_eig = phase.asDiagonal() * in_eig * phase.conjugate().asDiagonal();
    return {op.space, v * in_eig * v.adjoint()};
}

namespace {

struct Cluster {
    double mean{0.0};
    std::vector<int> members; // indices into the sorted input
};

// Group ascending-sorted values; a new cluster starts when the gap to the
// previous value exceeds tol. Representative = mean of members.
std::vector<Cluster> cluster_sorted(const std::vector<std::pair<double, int>>& sorted,
                                    double tol) {
    std::vector<Cluster> groups;
    double last = 0.0;
    double sum = 0.0;
    for (const auto& [value, idx] : sorted) {
        if (groups.empty() || value - last > tol) {
            groups.push_back({value, {idx}});
            sum = value;
        } else {
            groups.back().members.push_back(idx);
            sum += value;
            groups.back().mean = sum / static_cast<double>(groups.back().members.size());
        }
        last = value;
    }
    return groups;
}

} // namespace

EigenSystem eigensystem(const Operator& hamiltonian, double degeneracy_tol) {
    if (!hamiltonian.is_hermitian()) {
        throw ValidationError("eigensystem: Hamiltonian must be Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hamiltonian.mat);
    if (solver.info() != Eigen::Success) {
        throw NumericError("eigensystem: eigensolver failed to converge");
    }
    EigenSystem out;
    out.tol = degeneracy_tol;
    out.energies = solver.eigenvalues();
    out.vectors = solver.eigenvectors();

    const int dim = static_cast<int>(out.energies.size());
    std::vector<std::pair<double, int>> sorted(dim);
    for (int i = 0; i < dim; ++i) sorted[i] = {out.energies(i), i};
    auto groups = cluster_sorted(sorted, degeneracy_tol);

    for (const auto& g : groups) {
        Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dim, dim);
        for (int i : g.members) {
            p += out.vectors.col(i) * out.vectors.col(i).adjoint();
        }
        out.level_energies.push_back(g.mean);
        out.projectors.push_back(std::move(p));
    }

    std::vector<std::pair<double, int>> diffs;
    for (std::size_t a = 0; a < out.level_energies.size(); ++a) {
        for (std::size_t b = 0; b < out.level_energies.size(); ++b) {
            diffs.push_back({out.level_energies[b] - out.level_energies[a], 0});
        }
    }
    std::sort(diffs.begin(), diffs.end());
    for (const auto& g : cluster_sorted(diffs, degeneracy_tol)) {
        out.frequencies.push_back(g.mean);
    }
    return out;
}

Eigen::MatrixXcd EigenSystem::component(const Eigen::MatrixXcd& a, double omega) const {
    const Eigen::Index dim = a.rows();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::size_t i = 0; i < level_energies.size(); ++i) {
        for (std::size_t j = 0; j < level_energies.size(); ++j) {
            if (std::abs((level_energies[j] - level_energies[i]) - omega) < tol) {
                out += projectors[i] * a * projectors[j];
            }
        }
    }
    return out;
}

} // namespace sjx
