#include "ptheta/qparam.hpp"

#include "ptheta/errors.hpp"

#include <cmath>

namespace ptheta {

std::string to_string(Regime r) { return r == Regime::positive ? "positive" : "negative"; }

Regime regime_from_string(const std::string& s) {
    if (s == "positive") return Regime::positive;
    if (s == "negative") return Regime::negative;
    throw DomainError("regime must be 'positive' or 'negative', got '" + s + "'");
}

QParam QParam::make(double q) {
    if (!std::isfinite(q) || q == 0.0 || std::abs(q) >= 1.0)
        throw DomainError("q must satisfy 0 < |q| < 1");

    if (q > 0.0) {
        if (q < constants::kFirstPositiveSpectral) return {q, Regime::positive, 1, false};
        int n = 1;
        while (q > interval_outer_end(Regime::positive, n)) ++n;
        return {q, Regime::positive, n, true};
    }
    if (q > constants::kFirstNegativeSpectral) return {q, Regime::negative, 3, false};
    int n = 3;
    while (q < interval_outer_end(Regime::negative, n)) ++n;
    return {q, Regime::negative, n, true};
}

bool QParam::is_supported() const {
    const double a = abs();
    return a >= constants::kMinAbsQ && a <= constants::kMaxAbsQ;
}

void QParam::require_supported() const {
    if (!is_supported())
        throw PrecisionBudgetExceeded("q = " + std::to_string(q_) + " is out of supported range [1e-6, 0.98]");
}

int first_line_index(Regime r, int n) {
    if (r == Regime::positive && n == 1) return 4;
    return 4 * (n + 1);
}

double interval_outer_end(Regime r, int n) {
    const double w = 1.0 / (n + 1);
    return r == Regime::positive ? (n == 1 ? 0.5 : 1.0 - w) : -1.0 + w;
}

} // namespace ptheta
