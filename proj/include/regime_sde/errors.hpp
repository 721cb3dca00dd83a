#pragma once

#include <stdexcept>
#include <string>

namespace rsde {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A state lies outside the open domain U_t = {x : σ₁(t)x + σ₂(t) > 0}.
class DomainError : public Error {
public:
    DomainError(const std::string& what, double t, double x)
        : Error(what), time_(t), state_(x) {}
    double time() const noexcept { return time_; }
    double state() const noexcept { return state_; }

private:
    double time_;
    double state_;
};

/// Coefficient invariants (additive / multiplicative mode) fail at some time.
class ModeError : public Error {
public:
    using Error::Error;
};

/// Argument outside the admissible range (probabilities, time grids, ...).
class RangeError : public Error {
public:
    using Error::Error;
};

class QuadratureError : public Error {
public:
    using Error::Error;
};

/// The solver asked for a regime index beyond an explicit finite family.
class RegimeExhausted : public Error {
public:
    RegimeExhausted(const std::string& what, std::size_t index)
        : Error(what), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// φ failed to be strictly increasing where the construction needs it.
class MonotonicityError : public Error {
public:
    MonotonicityError(const std::string& what, double t, double g)
        : Error(what), time_(t), slope_numerator_(g) {}
    double time() const noexcept { return time_; }
    double slope_numerator() const noexcept { return slope_numerator_; }

private:
    double time_;
    double slope_numerator_;
};

/// Original-coordinate particles left the closure of U_t.
class DomainExit : public Error {
public:
    DomainExit(const std::string& what, double t, std::size_t count)
        : Error(what), time_(t), count_(count) {}
    double time() const noexcept { return time_; }
    std::size_t count() const noexcept { return count_; }

private:
    double time_;
    std::size_t count_;
};

class VerdictMismatch : public Error {
public:
    using Error::Error;
};

/// Malformed problem file or expression.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace rsde
