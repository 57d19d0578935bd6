#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace ising {

// Largest node count accepted by the brute-force enumeration routines
// (2^22 ~ 4M states keeps every enumeration-backed check well under a minute).
inline constexpr int kEnumerationLimit = 22;

// Error taxonomy.  The CLI maps capacity_error to exit code 2 and every other
// ising_error to exit code 1.
class ising_error : public std::runtime_error {
public:
    explicit ising_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad argument values (out-of-range sizes, malformed files, bad flags).
class parameter_error : public ising_error {
public:
    explicit parameter_error(const std::string& msg) : ising_error(msg) {}
};

// Mismatched node counts between objects that must agree.
class dimension_error : public ising_error {
public:
    explicit dimension_error(const std::string& msg) : ising_error(msg) {}
};

// Graph-shape precondition failed (e.g. a forest test fed a cyclic model).
class structure_error : public ising_error {
public:
    explicit structure_error(const std::string& msg) : ising_error(msg) {}
};

// Model lies outside the class a routine is defined for (e.g. non-uniform
// weights, non-ferromagnetic couplings, temperature condition violated).
class model_class_error : public ising_error {
public:
    explicit model_class_error(const std::string& msg) : ising_error(msg) {}
};

// Widget / ensemble parameters that cannot be built at all.
class construction_error : public ising_error {
public:
    explicit construction_error(const std::string& msg) : ising_error(msg) {}
};

// Problem too large for the requested exact routine.
class capacity_error : public ising_error {
public:
    explicit capacity_error(const std::string& msg) : ising_error(msg) {}
};

// A computation that ran but could not reach a conclusive answer; carries the
// partial estimate it got to.
class inconclusive_error : public ising_error {
public:
    inconclusive_error(const std::string& msg, double partial)
        : ising_error(msg), partial_estimate(partial) {}
    double partial_estimate;
};

// Effective thread cap: min(OpenMP's max, ISING_THREADS if set).  Read from
// the environment on every call so tests can vary it at runtime.
int max_threads();

} // namespace ising
