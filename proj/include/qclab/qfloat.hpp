// __float128 arithmetic support so the integrator and shooting templates can
// run in quadruple precision where double cannot resolve the Floquet structure.

#pragma once

#include <cmath>

#if defined(__GNUC__) && defined(__x86_64__)
#define QCLAB_HAVE_FLOAT128 1
extern "C" {
__float128 sqrtq(__float128);
__float128 fabsq(__float128);
__float128 powq(__float128, __float128);
__float128 expq(__float128);
__float128 logq(__float128);
__float128 coshq(__float128);
__float128 sinhq(__float128);
}

namespace qclab {

// Double overloads so unqualified math calls in templated code resolve within
// this namespace for both scalar types.
inline double sqrt(double x) { return std::sqrt(x); }
inline double fabs(double x) { return std::fabs(x); }
inline double pow(double x, double y) { return std::pow(x, y); }
inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }

inline long double sqrt(long double x) { return std::sqrt(x); }
inline long double fabs(long double x) { return std::fabs(x); }
inline long double pow(long double x, long double y) { return std::pow(x, y); }
inline long double exp(long double x) { return std::exp(x); }
inline long double log(long double x) { return std::log(x); }

using quad = __float128;

inline quad sqrt(quad x) { return sqrtq(x); }
inline quad fabs(quad x) { return fabsq(x); }
inline quad abs(quad x) { return fabsq(x); }
inline quad pow(quad x, quad y) { return powq(x, y); }
inline quad exp(quad x) { return expq(x); }
inline quad log(quad x) { return logq(x); }

template <class T> struct real_traits {
    static constexpr bool is_quad = false;
};
template <> struct real_traits<quad> {
    static constexpr bool is_quad = true;
};

inline double to_double(quad x) { return static_cast<double>(x); }
inline double to_double(double x) { return x; }
inline double to_double(long double x) { return static_cast<double>(x); }

} // namespace qclab
#else
namespace qclab {
inline double sqrt(double x) { return std::sqrt(x); }
inline double fabs(double x) { return std::fabs(x); }
inline double pow(double x, double y) { return std::pow(x, y); }
inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline long double sqrt(long double x) { return std::sqrt(x); }
inline long double fabs(long double x) { return std::fabs(x); }
inline long double pow(long double x, long double y) { return std::pow(x, y); }
inline long double exp(long double x) { return std::exp(x); }
inline long double log(long double x) { return std::log(x); }
template <class T> struct real_traits {
    static constexpr bool is_quad = false;
};
inline double to_double(double x) { return x; }
inline double to_double(long double x) { return static_cast<double>(x); }
} // namespace qclab
#endif
