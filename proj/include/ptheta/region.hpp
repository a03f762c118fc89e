#pragma once

#include "ptheta/qparam.hpp"
#include "ptheta/theta_eval.hpp"
#include "ptheta/zero_finder.hpp"

#include <string>
#include <vector>

namespace ptheta {

enum class RegionKind { positive_q, negative_q };

[[nodiscard]] std::string to_string(RegionKind k);
[[nodiscard]] RegionKind region_kind_from_string(const std::string& s);

/// Open rectangle re_lo < Re x < re_hi, |Im x| < im_bound, or open disk |x| < radius.
struct RegionComponent {
    enum class Shape { rectangle, disk };
    Shape shape = Shape::rectangle;
    double re_lo = 0.0;
    double re_hi = 0.0;
    double im_bound = 0.0;
    double radius = 0.0;

    /// Positive inside, negative outside; |value| is the distance to the boundary.
    [[nodiscard]] double signed_distance(cdouble x) const;
};

enum class Membership { inside, boundary, outside };

struct RegionSpec {
    RegionKind kind = RegionKind::positive_q;
    std::vector<RegionComponent> components;

    /// Largest signed distance over the components.
    [[nodiscard]] double signed_distance(cdouble x) const;
    /// Points within 1e-6 (1 + |x|) of the boundary are reported as `boundary`.
    [[nodiscard]] Membership classify(cdouble x) const;
    [[nodiscard]] bool contains(cdouble x) const { return classify(x) == Membership::inside; }
};

/// Theorem regions: {Re x in (-5792.7, 0), |Im x| < 132} u {|x| < 18} for
/// q > 0 and {|Re x| < 364.2, |Im x| < 132} for q < 0.
[[nodiscard]] RegionSpec theorem_region(RegionKind kind);

struct RegionViolation {
    double q = 0.0;
    cdouble zero{}; // NaN when the zero finder failed at q
    std::string reason;
};

struct RegionSample {
    double q = 0.0;
    int disk_k = 0;
    double disk_radius = 0.0;
    std::vector<double> real_zeros;
    std::vector<cdouble> ccps; // upper members
    std::string error;         // non-empty when the zero finder failed
};

struct RegionReport {
    RegionKind kind = RegionKind::positive_q;
    std::vector<double> q_grid;
    std::vector<RegionSample> samples; // in grid order
    int total_ccps = 0;
    std::vector<RegionViolation> violations;
    std::vector<RegionViolation> boundary_grazing;
    double max_re_magnitude_seen = 0.0; // over all CCPs
    double max_im_seen = 0.0;
    bool pass = false; // violations.empty()
};

struct ContainmentOptions {
    double max_abs_q = 0.95; // may be raised up to constants::kMaxAbsQ
    int parallelism = 1;
    ZeroFinderOptions finder{};
};

/// Smallest circle index whose radius exceeds 7200 (q > 0) or 440 (q < 0),
/// plus `margin` further annuli.
[[nodiscard]] int containment_disk_k(const QParam& q, int margin);

/// Computes every zero in a disk strictly containing the theorem region for
/// each q of the grid and checks: CCPs inside the region; all zeros in
/// {Re x < 0} u {|x| < 18} (q > 0) or in |Im x| < 132 (q < 0); real zeros
/// negative for q > 0; no CCP with Re x <= -5792.6; no CCP for q in (0, q~1]
/// or [q-1, 0). Zero-finder failures become violations. Throws DomainError
/// for grid points of the wrong sign or outside the allowed |q| range.
[[nodiscard]] RegionReport verify_containment(RegionKind kind, const std::vector<double>& q_grid,
                                              int disk_k_margin = 1, const ContainmentOptions& options = {});

} // namespace ptheta
