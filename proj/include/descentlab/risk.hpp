#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace descentlab {

/// A risk that is either a finite nonnegative number or divergent (+inf).
/// Divergence is a distinct state; value() refuses to hand out infinities.
class RiskValue {
public:
    static RiskValue finite(double v) {
        if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("RiskValue: value must be finite and >= 0");
        return RiskValue(v);
    }
    static RiskValue divergent() { return RiskValue(); }

    bool is_divergent() const noexcept { return !value_.has_value(); }
    double value() const {
        if (!value_) throw std::logic_error("RiskValue: value() on divergent risk");
        return *value_;
    }

    friend bool operator==(const RiskValue&, const RiskValue&) = default;

private:
    RiskValue() = default;
    explicit RiskValue(double v) : value_(v) {}
    std::optional<double> value_;
};

/// Sample mean and standard error of a set of per-trial losses.
struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;
};

/// Mean and standard error (sample sd / sqrt(count)); stderr is 0 for a single trial.
McEstimate summarize(const std::vector<double>& losses);

/// Symmetric trimmed mean dropping floor(trim * count) values from each tail.
/// The stderr is the plain standard error of the retained values.
McEstimate trimmed_summary(std::vector<double> losses, double trim);

}  // namespace descentlab
