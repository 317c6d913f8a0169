#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace carmsieve {

using BigInt = boost::multiprecision::cpp_int;

}  // namespace carmsieve
