#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bellrv {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: wrong shape, out-of-range index, non-unit vector, malformed data.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class NonHermitian : public Error {
public:
    NonHermitian(std::size_t index, double deviation)
        : Error("operator " + std::to_string(index) + " is not Hermitian (max |M - M^dagger| = " +
                std::to_string(deviation) + ")"),
          index_(index), deviation_(deviation) {}

    std::size_t index() const { return index_; }
    double deviation() const { return deviation_; }

private:
    std::size_t index_;
    double deviation_;
};

class NonCommuting : public Error {
public:
    NonCommuting(std::size_t first, std::size_t second, double norm)
        : Error("operators " + std::to_string(first) + " and " + std::to_string(second) +
                " do not commute (max |[A,B]| = " + std::to_string(norm) + ")"),
          first_(first), second_(second), norm_(norm) {}

    std::size_t first() const { return first_; }
    std::size_t second() const { return second_; }
    double norm() const { return norm_; }

private:
    std::size_t first_;
    std::size_t second_;
    double norm_;
};

/// Strategy enumeration would exceed the m + n cap.
class CapExceeded : public Error {
public:
    using Error::Error;
};

/// LP result too close to the polytope boundary to call either way.
class Marginal : public Error {
public:
    Marginal(double objective, double gap)
        : Error("marginal instance: phase-1 objective " + std::to_string(objective) +
                " above tolerance but certificate gap " + std::to_string(gap) + " is not"),
          objective_(objective), gap_(gap) {}

    double objective() const { return objective_; }
    double gap() const { return gap_; }

private:
    double objective_;
    double gap_;
};

}  // namespace bellrv
