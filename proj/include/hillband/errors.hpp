#pragma once

#include <stdexcept>
#include <string>

namespace hillband {

// Base class for everything thrown by the library.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input: bad file contents, duplicate harmonic indices,
// out-of-range configuration values. CLI maps these to exit code 2.
class format_error : public error {
public:
    explicit format_error(const std::string& what) : error(what) {}
};

// Hermitian-symmetry violation when constructing a potential.
class symmetry_error : public format_error {
public:
    explicit symmetry_error(const std::string& what) : format_error(what) {}
};

// API misuse, e.g. Lagrange bracket of states at different positions.
class usage_error : public format_error {
public:
    explicit usage_error(const std::string& what) : format_error(what) {}
};

// Numerical failure during a computation. CLI maps these to exit code 1.
class integration_error : public error {
public:
    explicit integration_error(const std::string& what) : error(what) {}
};

// Solution left the representable range (expected deep inside spectral
// gaps at large |lambda|; callers scanning wide ranges must catch this).
class blowup_error : public integration_error {
public:
    explicit blowup_error(const std::string& what) : integration_error(what) {}
};

// Root bracketing failed: no sign change over a bracket, or the scan did
// not find the expected number of endpoints after extending its range.
class bracket_error : public error {
public:
    explicit bracket_error(const std::string& what) : error(what) {}
};

} // namespace hillband
