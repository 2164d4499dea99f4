#include "descentlab/risk.hpp"

#include <algorithm>

namespace descentlab {

McEstimate summarize(const std::vector<double>& losses) {
    McEstimate est;
    est.trials = losses.size();
    if (losses.empty()) return est;
    double sum = 0.0;
    for (double v : losses) sum += v;
    est.mean = sum / static_cast<double>(losses.size());
    if (losses.size() > 1) {
        double ss = 0.0;
        for (double v : losses) ss += (v - est.mean) * (v - est.mean);
        const double var = ss / static_cast<double>(losses.size() - 1);
        est.std_error = std::sqrt(var / static_cast<double>(losses.size()));
    }
    return est;
}

McEstimate trimmed_summary(std::vector<double> losses, double trim) {
    if (trim < 0.0 || trim >= 0.5) throw std::invalid_argument("trimmed_summary: trim must be in [0, 0.5)");
    std::sort(losses.begin(), losses.end());
    const auto cut = static_cast<std::size_t>(trim * static_cast<double>(losses.size()));
    std::vector<double> kept(losses.begin() + static_cast<std::ptrdiff_t>(cut),
                             losses.end() - static_cast<std::ptrdiff_t>(cut));
    McEstimate est = summarize(kept);
    est.trials = losses.size();
    return est;
}

}  // namespace descentlab
