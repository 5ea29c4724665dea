#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace gdrop {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A scalar coefficient function was evaluated at a pole.
class SingularFunctionError : public Error {
public:
    using Error::Error;
};

/// K(s) = sum_i f_i(s) A_i is numerically singular at the requested point.
class SingularKError : public Error {
public:
    explicit SingularKError(std::complex<double> s)
        : Error("K(s) is singular at s = (" + std::to_string(s.real()) + ", " +
                std::to_string(s.imag()) + "j)"),
          point(s) {}

    std::complex<double> point;
};

/// The projected pencil sum_i f_i(sigma_j) S^T A_i S is singular.
class SingularProjectedPencilError : public Error {
public:
    SingularProjectedPencilError(std::size_t index, std::complex<double> s)
        : Error("projected pencil is singular at training point " + std::to_string(index) +
                ", sigma = (" + std::to_string(s.real()) + ", " + std::to_string(s.imag()) + "j)"),
          point_index(index),
          point(s) {}

    std::size_t point_index;
    std::complex<double> point;
};

/// Operands have incompatible shapes.
class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

/// An iterative kernel (SVD, eigensolver) failed to converge.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// A file or config document could not be parsed.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A selection was requested but no eligible candidates remain.
class ExhaustedError : public Error {
public:
    using Error::Error;
};

/// A benchmark generator was asked for a size outside its documented family.
class UnsupportedSizeError : public Error {
public:
    using Error::Error;
};

} // namespace gdrop
