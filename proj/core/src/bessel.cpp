#include "sjx/bessel.hpp"

#include <cmath>
#include <cstdlib>

namespace sjx {

namespace {

constexpr double kSeriesCut = 12.0;

// sum_k (-x^2/4)^k / (k!)^2
double j0_series(double x) {
    const double q = -0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 80; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum))) break;
    }
    return sum;
}

// sum_k (-x^2/4)^k / (k! (k+1)!) * (x/2)
double j1_series(double x) {
    const double q = -0.25 * x * x;
    double term = 0.5 * x;
    double sum = term;
    for (int k = 1; k < 80; ++k) {
        term *= q / (static_cast<double>(k) * (k + 1));
        sum += term;
        if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum))) break;
    }
    return sum;
}

// Hankel expansion, DLMF 10.17: J_nu ~ sqrt(2/pi x)[cos(w) P - sin(w) Q],
// w = x - (nu/2 + 1/4) pi.  a_k(nu) = prod (4nu^2 - (2j-1)^2) / (k! 8^k).
double hankel(double x, int nu) {
    const double mu = 4.0 * nu * nu;
    double p = 1.0;
    double q = 0.0;
    double a = 1.0;
    double prev = 1.0;
    for (int k = 1; k < 40; ++k) {
        const double num = mu - (2.0 * k - 1.0) * (2.0 * k - 1.0);
        a *= num / (8.0 * k * x);
        if (std::abs(a) > prev) break; // asymptotic series started diverging
        prev = std::abs(a);
        const int m = k % 4;
        if (m == 1) q += a;
        else if (m == 2) p -= a;
        else if (m == 3) q -= a;
        else p += a;
        if (std::abs(a) < 1e-17) break;
    }
    const double w = x - (0.5 * nu + 0.25) * M_PI;
    return std::sqrt(2.0 / (M_PI * x)) * (std::cos(w) * p - std::sin(w) * q);
}

} // namespace

double bessel_j0(double x) {
    x = std::abs(x);
    return (x <= kSeriesCut) ? j0_series(x) : hankel(x, 0);
}

double bessel_j1(double x) {
    const double s = (x < 0.0) ? -1.0 : 1.0;
    x = std::abs(x);
    return s * ((x <= kSeriesCut) ? j1_series(x) : hankel(x, 1));
}

std::vector<double> bessel_j_array(double x, int n_max) {
    std::vector<double> out(n_max + 1, 0.0);
    if (std::abs(x) < 1e-300) {
        out[0] = 1.0;
        return out;
    }
    const double ax = std::abs(x);
    const int start = n_max + 15 +
        static_cast<int>(std::ceil(std::sqrt(60.0 * (n_max + 1)) + ax));
    double jp = 0.0;   // J_{k+1}
    double jc = 1e-30; // J_k seed
    double norm = 0.0;
    for (int k = start; k >= 1; --k) {
        const double jm = (2.0 * k / ax) * jc - jp;
        jp = jc;
        jc = jm;
        if (k - 1 <= n_max) out[k - 1] = jc;
        if (((k - 1) % 2) == 0) norm += (k - 1 == 0) ? jc : 2.0 * jc;
        // rescale to avoid overflow of the unnormalized recurrence
        if (std::abs(jc) > 1e250) {
            jc *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            for (double& v : out) v *= 1e-250;
        }
    }
    for (double& v : out) v /= norm;
    if (x < 0.0) {
        for (int k = 1; k <= n_max; k += 2) out[k] = -out[k];
    }
    return out;
}

} // namespace sjx
