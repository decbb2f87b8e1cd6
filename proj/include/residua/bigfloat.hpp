#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace residua {

/// 50 decimal digits; enough headroom for distortion bounds of deep towers.
using BigFloat = boost::multiprecision::cpp_bin_float_50;

}  // namespace residua
