#pragma once

#include <string>

namespace ptheta {

enum class Regime { positive, negative };

[[nodiscard]] std::string to_string(Regime r);
[[nodiscard]] Regime regime_from_string(const std::string& s);

namespace constants {

// First spectral values, located by CCP-count bisection and frozen here
// (see the spectrum tests for the check that re-derives them).
inline constexpr double kFirstPositiveSpectral = 0.3092493386;
inline constexpr double kFirstNegativeSpectral = -0.7271333251;

// Supported |q| range of every evaluator in this library.
inline constexpr double kMinAbsQ = 1e-6;
inline constexpr double kMaxAbsQ = 0.98;

} // namespace constants

/// Real base q with 0 < |q| < 1, tagged with its sign and the index n of the
/// parameter interval K_n = [q~1, 1 - 1/(n+1)] (q > 0) or
/// J_n = [-1 + 1/(n+1), q-1] (q < 0) it falls in.
class QParam {
public:
    /// Throws DomainError unless 0 < |q| < 1.
    static QParam make(double q);

    [[nodiscard]] double value() const { return q_; }
    [[nodiscard]] double abs() const { return q_ < 0.0 ? -q_ : q_; }
    [[nodiscard]] Regime regime() const { return regime_; }

    /// Minimal interval index; 1 for q > 0 below q~1 and 3 for q < 0 above q-1
    /// (those q lie in no interval, see in_interval_family()).
    [[nodiscard]] int n() const { return n_; }
    [[nodiscard]] bool in_interval_family() const { return covered_; }

    /// Within the library's supported range kMinAbsQ <= |q| <= kMaxAbsQ.
    [[nodiscard]] bool is_supported() const;
    /// Throws PrecisionBudgetExceeded when !is_supported().
    void require_supported() const;

    friend bool operator==(const QParam&, const QParam&) = default;

private:
    QParam(double q, Regime r, int n, bool covered) : q_(q), regime_(r), n_(n), covered_(covered) {}

    double q_;
    Regime regime_;
    int n_;
    bool covered_;
};

/// Index l_n of the first zero-free line used on K_n / J_n: l_1 = 4 for q > 0,
/// otherwise 4(n + 1).
[[nodiscard]] int first_line_index(Regime r, int n);

/// Upper end 1 - 1/(n+1) of K_n, or lower end -1 + 1/(n+1) of J_n.
[[nodiscard]] double interval_outer_end(Regime r, int n);

} // namespace ptheta
