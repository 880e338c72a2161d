#pragma once

// Extended precision scalar for oracle computations whose matrices grow
// like 1/l^2 as a curve length l shrinks.
#if defined(__GNUC__) && !defined(__clang__) && (defined(__x86_64__) || defined(__i386__))
#include <boost/multiprecision/float128.hpp>
namespace fnmetric {
using WideReal = boost::multiprecision::float128;
inline constexpr bool kWideIsQuad = true;
}  // namespace fnmetric
#else
namespace fnmetric {
using WideReal = long double;
inline constexpr bool kWideIsQuad = false;
}  // namespace fnmetric
#endif
