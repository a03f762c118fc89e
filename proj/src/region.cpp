#include "ptheta/region.hpp"

#include "ptheta/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace ptheta {

namespace {

constexpr double kStripHalfWidth = 132.0;
constexpr double kPositiveLeftEnd = -5792.7;
constexpr double kPositiveDisk = 18.0;
constexpr double kNegativeHalfLength = 364.2;
constexpr double kNoCcpAbscissa = -5792.6;

RegionSample census_at(double q, int margin, const ZeroFinderOptions& finder) {
    RegionSample s;
    s.q = q;
    try {
        const QParam qp = QParam::make(q);
        s.disk_k = containment_disk_k(qp, margin);
        s.disk_radius = circle_radius(qp, s.disk_k);
        const ZeroClassification c = classify_zeros(find_zeros_in_disk(qp, s.disk_k, finder), finder.pairing_tol);
        for (const Zero& z : c.real_zeros) s.real_zeros.push_back(z.location.real());
        for (const auto& [up, down] : c.ccps) s.ccps.push_back(up.location);
    } catch (const std::exception& e) {
        s.error = e.what();
    }
    return s;
}

} // namespace

std::string to_string(RegionKind k) { return k == RegionKind::positive_q ? "positive" : "negative"; }

RegionKind region_kind_from_string(const std::string& s) {
    return regime_from_string(s) == Regime::positive ? RegionKind::positive_q : RegionKind::negative_q;
}

double RegionComponent::signed_distance(cdouble x) const {
    if (shape == Shape::disk) return radius - std::abs(x);
    const double a = x.real() - re_lo;
    const double b = re_hi - x.real();
    const double c = im_bound - std::abs(x.imag());
    if (a > 0.0 && b > 0.0 && c > 0.0) return std::min({a, b, c});
    const double ra = std::min(0.0, std::min(a, b));
    const double rc = std::min(0.0, c);
    return -std::hypot(ra, rc);
}

double RegionSpec::signed_distance(cdouble x) const {
    double d = -std::numeric_limits<double>::infinity();
    for (const RegionComponent& c : components) d = std::max(d, c.signed_distance(x));
    return d;
}

Membership RegionSpec::classify(cdouble x) const {
    const double d = signed_distance(x);
    const double tol = 1e-6 * (1.0 + std::abs(x));
    if (d > tol) return Membership::inside;
    if (d < -tol) return Membership::outside;
    return Membership::boundary;
}

RegionSpec theorem_region(RegionKind kind) {
    RegionSpec r;
    r.kind = kind;
    using S = RegionComponent::Shape;
    if (kind == RegionKind::positive_q) {
        r.components.push_back({S::rectangle, kPositiveLeftEnd, 0.0, kStripHalfWidth, 0.0});
        r.components.push_back({S::disk, 0.0, 0.0, 0.0, kPositiveDisk});
    } else {
        r.components.push_back({S::rectangle, -kNegativeHalfLength, kNegativeHalfLength, kStripHalfWidth, 0.0});
    }
    return r;
}

int containment_disk_k(const QParam& q, int margin) {
    if (margin < 0) throw DomainError("disk margin must be >= 0");
    const double target = q.regime() == Regime::positive ? 1.2 * std::max(6000.0, -kPositiveLeftEnd) : 440.0;
    int k = 0;
    while (circle_radius(q, k) <= target) ++k;
    return k + margin;
}

RegionReport verify_containment(RegionKind kind, const std::vector<double>& q_grid, int disk_k_margin,
                                const ContainmentOptions& options) {
    if (!(options.max_abs_q > 0.0 && options.max_abs_q <= constants::kMaxAbsQ))
        throw DomainError("max_abs_q must lie in (0, 0.98]");
    if (options.parallelism < 1) throw DomainError("parallelism must be >= 1");
    if (disk_k_margin < 0) throw DomainError("disk margin must be >= 0");
    const bool positive = kind == RegionKind::positive_q;
    for (double q : q_grid) {
        if (positive ? !(q > 0.0) : !(q < 0.0)) throw DomainError("grid point has the wrong sign for the region");
        if (std::abs(q) > options.max_abs_q + 1e-12 || std::abs(q) < constants::kMinAbsQ)
            throw DomainError("grid point outside the allowed |q| range");
    }

    RegionReport rep;
    rep.kind = kind;
    rep.q_grid = q_grid;
    rep.samples.resize(q_grid.size());

    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < q_grid.size(); i = next++)
            rep.samples[i] = census_at(q_grid[i], disk_k_margin, options.finder);
    };
    const int n_threads = std::min<int>(options.parallelism, static_cast<int>(q_grid.size()));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    const RegionSpec region = theorem_region(kind);
    for (RegionSample& s : rep.samples) {
        const auto flag = [&](cdouble z, std::string reason) { rep.violations.push_back({s.q, z, std::move(reason)}); };
        if (!s.error.empty()) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            flag({nan, nan}, "zero finder failed: " + s.error);
            continue;
        }
        for (double x : s.real_zeros)
            if (positive && !(x < 0.0)) flag(cdouble(x, 0.0), "nonnegative real zero");
        for (cdouble z : s.ccps) {
            rep.max_re_magnitude_seen = std::max(rep.max_re_magnitude_seen, std::abs(z.real()));
            rep.max_im_seen = std::max(rep.max_im_seen, std::abs(z.imag()));
            switch (region.classify(z)) {
            case Membership::inside: break;
            case Membership::boundary: rep.boundary_grazing.push_back({s.q, z, "within tolerance of the boundary"}); break;
            case Membership::outside: flag(z, "conjugate pair outside the theorem region"); break;
            }
            if (positive) {
                if (z.real() <= kNoCcpAbscissa) flag(z, "conjugate pair with Re x <= -5792.6");
                if (!(z.real() < 0.0) && !(std::abs(z) < kPositiveDisk)) flag(z, "zero with Re x >= 0 outside |x| < 18");
            } else if (!(std::abs(z.imag()) < kStripHalfWidth)) {
                flag(z, "zero outside the strip |Im x| < 132");
            }
        }
        const bool all_real = positive ? s.q <= constants::kFirstPositiveSpectral
                                       : s.q >= constants::kFirstNegativeSpectral;
        if (all_real && !s.ccps.empty()) flag(s.ccps.front(), "conjugate pair before the first spectral value");
        rep.total_ccps += static_cast<int>(s.ccps.size());
    }
    rep.pass = rep.violations.empty();
    return rep;
}

} // namespace ptheta
