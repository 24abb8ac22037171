#pragma once

#include <string>

#include "qtrank/oracle.hpp"
#include "qtrank/spectral.hpp"
#include "qtrank/tensor.hpp"

namespace qtrank::io {

// Writers. Every double goes out as %.17g, so equal values give equal bytes.
std::string number(double v);
/// JSON string literal with escapes.
std::string quoted(const std::string& s);
std::string to_json(const Quaternion& q);
std::string to_json(const HVector& v);
std::string to_json(const HMatrix& m);
/// Complex entries as [re, im].
std::string to_json(const CMatrix& m);
std::string to_json(const Tensor3& t);
std::string to_json(const Decomposition& d);
std::string to_json(const SuiteReport& r);

// Readers. Malformed input throws Error(Parse) naming the byte offset or the
// offending field.
Quaternion parse_quaternion(const std::string& text);
HMatrix parse_matrix(const std::string& text);
Tensor3 parse_tensor(const std::string& text);
Decomposition parse_decomposition(const std::string& text);

/// Reads a whole file, "-" meaning stdin. Throws Error(Parse) when unreadable.
std::string read_input(const std::string& path);

}  // namespace qtrank::io
