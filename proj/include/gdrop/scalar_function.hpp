#pragma once

#include <complex>
#include <memory>
#include <sstream>
#include <string>
#include <utility>

#include "gdrop/errors.hpp"

namespace gdrop {

/// Scalar coefficient f_i(s) of one affine term f_i(s) * A_i.
///
/// The closed set of variants (constants, integer powers, exponentials,
/// shifted rationals and scalar multiples thereof) all have real parameters,
/// so f(conj(s)) == conj(f(s)) holds by construction.
class ScalarFunction {
public:
    enum class Kind { constant, power, exponential, shifted_rational, scaled };

    /// f(s) = value
    static ScalarFunction constant(double value) {
        ScalarFunction f(Kind::constant);
        f.real_param_ = value;
        return f;
    }

    /// f(s) = s^exponent, exponent >= 0
    static ScalarFunction power(int exponent) {
        if (exponent < 0) {
            throw DimensionMismatchError("power exponent must be non-negative");
        }
        ScalarFunction f(Kind::power);
        f.int_param_ = exponent;
        return f;
    }

    /// f(s) = exp(rate * s)
    static ScalarFunction exponential(double rate) {
        ScalarFunction f(Kind::exponential);
        f.real_param_ = rate;
        return f;
    }

    /// f(s) = 1 / (s + shift)
    static ScalarFunction shifted_rational(double shift) {
        ScalarFunction f(Kind::shifted_rational);
        f.real_param_ = shift;
        return f;
    }

    /// f(s) = factor * inner(s)
    static ScalarFunction scaled(double factor, ScalarFunction inner) {
        ScalarFunction f(Kind::scaled);
        f.real_param_ = factor;
        f.inner_ = std::make_shared<const ScalarFunction>(std::move(inner));
        return f;
    }

    std::complex<double> operator()(std::complex<double> s) const {
        switch (kind_) {
        case Kind::constant:
            return {real_param_, 0.0};
        case Kind::power: {
            std::complex<double> r{1.0, 0.0};
            for (int i = 0; i < int_param_; ++i) {
                r *= s;
            }
            return r;
        }
        case Kind::exponential:
            return std::exp(real_param_ * s);
        case Kind::shifted_rational: {
            const std::complex<double> denom = s + real_param_;
            if (denom == std::complex<double>{0.0, 0.0}) {
                throw SingularFunctionError("rational coefficient has a pole at s = -" +
                                            std::to_string(real_param_));
            }
            return 1.0 / denom;
        }
        case Kind::scaled:
            return real_param_ * (*inner_)(s);
        }
        throw Error("unreachable scalar function kind");
    }

    Kind kind() const { return kind_; }

    /// Constant value, exponential rate, rational shift or scale factor,
    /// depending on kind.
    double real_parameter() const { return real_param_; }

    /// Power exponent; only meaningful for Kind::power.
    int exponent() const { return int_param_; }

    const ScalarFunction& inner() const {
        if (!inner_) {
            throw Error("scalar function has no inner factor");
        }
        return *inner_;
    }

    bool operator==(const ScalarFunction& other) const {
        if (kind_ != other.kind_) {
            return false;
        }
        switch (kind_) {
        case Kind::constant:
        case Kind::exponential:
        case Kind::shifted_rational:
            return real_param_ == other.real_param_;
        case Kind::power:
            return int_param_ == other.int_param_;
        case Kind::scaled:
            return real_param_ == other.real_param_ && *inner_ == *other.inner_;
        }
        return false;
    }

    bool operator!=(const ScalarFunction& other) const { return !(*this == other); }

    std::string describe() const {
        std::ostringstream os;
        switch (kind_) {
        case Kind::constant:
            os << real_param_;
            break;
        case Kind::power:
            os << "s^" << int_param_;
            break;
        case Kind::exponential:
            os << "exp(" << real_param_ << "*s)";
            break;
        case Kind::shifted_rational:
            os << "1/(s+" << real_param_ << ")";
            break;
        case Kind::scaled:
            os << real_param_ << "*[" << inner_->describe() << "]";
            break;
        }
        return os.str();
    }

private:
    explicit ScalarFunction(Kind kind) : kind_(kind) {}

    Kind kind_;
    double real_param_ = 0.0;
    int int_param_ = 0;
    std::shared_ptr<const ScalarFunction> inner_;
};

} // namespace gdrop
