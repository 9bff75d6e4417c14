// Dimension-dependent constants for the constant Q-curvature cylinder problem.
// Every coefficient used elsewhere in the library is derived here, once.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace qclab {

// All dimension-n-dependent constants and ODE coefficients.
//
// The radial profile v on the cylinder satisfies
//   v'''' - c2 v'' + c0 v - c_nl v^p_exp = 0,
// and the linearized potential carries c_lin.  eps_bar is the constant
// (cylindrical) solution, mu the frequency of small oscillations about it.
struct DimensionParams {
    int n = 0;
    double p_exp = 0;   // (n+4)/(n-4)
    double c2 = 0;      // (n(n-4)+8)/2
    double c0 = 0;      // n^2 (n-4)^2 / 16
    double c_nl = 0;    // n(n-4)(n^2-4)/16
    double c_lin = 0;   // n(n+4)(n^2-4)/16
    double eps_bar = 0; // (n(n-4)/(n^2-4))^{(n-4)/8}
    double mu = 0;      // (sqrt(n^4-64n+64) - (n^2-4n+8))/4
    double q_target = 0; // n(n^2-4)/8
};

inline DimensionParams make_params(int n) {
    if (n <= 4)
        throw std::invalid_argument("make_params: dimension must satisfy n >= 5");
    DimensionParams d;
    const double nn = static_cast<double>(n);
    d.n = n;
    d.p_exp = (nn + 4.0) / (nn - 4.0);
    d.c2 = (nn * (nn - 4.0) + 8.0) / 2.0;
    d.c0 = nn * nn * (nn - 4.0) * (nn - 4.0) / 16.0;
    d.c_nl = nn * (nn - 4.0) * (nn * nn - 4.0) / 16.0;
    d.c_lin = nn * (nn + 4.0) * (nn * nn - 4.0) / 16.0;
    d.eps_bar = std::pow(nn * (nn - 4.0) / (nn * nn - 4.0), (nn - 4.0) / 8.0);
    d.mu = (std::sqrt(nn * nn * nn * nn - 64.0 * nn + 64.0) - (nn * nn - 4.0 * nn + 8.0)) / 4.0;
    d.q_target = nn * (nn * nn - 4.0) / 8.0;
    return d;
}

// j-th eigenvalue of -Laplacian on S^{n-1} and its multiplicity.
// lambda_j = j(n-1+j), m_j = C(n-1+j, j) + C(n-3+j, j-2).
struct SphereEigenvalue {
    double lambda = 0;
    std::int64_t multiplicity = 0;
};

namespace detail {
inline std::int64_t binomial(std::int64_t top, std::int64_t k) {
    if (k < 0 || k > top) return 0;
    if (k > top - k) k = top - k;
    std::int64_t r = 1;
    for (std::int64_t i = 1; i <= k; ++i)
        r = r * (top - k + i) / i;
    return r;
}
} // namespace detail

inline SphereEigenvalue sphere_eigenvalue(int n, int j) {
    if (j < 0)
        throw std::invalid_argument("sphere_eigenvalue: j must be >= 0");
    SphereEigenvalue e;
    e.lambda = static_cast<double>(j) * (n - 1 + j);
    e.multiplicity = detail::binomial(n - 1 + j, j) + detail::binomial(n - 3 + j, j - 2);
    return e;
}

} // namespace qclab
