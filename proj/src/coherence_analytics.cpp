#include "cbs/coherence_analytics.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cbs {

namespace {

// Smallness threshold used for the "much less than" validity conditions.
constexpr double kSmall = 0.3;

void require_positive(double kv_over_gamma, char const* what) {
    if (!(kv_over_gamma >= 0.0) || !std::isfinite(kv_over_gamma)) {
        throw std::domain_error(std::string(what) + ": kv/Gamma must be finite and >= 0");
    }
}

}  // namespace

double contrast_decay(int order, double kv_over_gamma) {
    if (order < 1) {
        throw std::domain_error("contrast_decay: order must be >= 1");
    }
    require_positive(kv_over_gamma, "contrast_decay");
    double const n = order;
    return std::exp(-n * n * n / 12.0 * kv_over_gamma * kv_over_gamma);
}

std::vector<std::string> contrast_decay_warnings(int order, double kv_over_gamma, std::optional<double> detuning) {
    std::vector<std::string> warnings;
    double const spread = kv_over_gamma * std::sqrt(static_cast<double>(order));
    bool const off_resonant = detuning && std::abs(*detuning) * kSmall >= spread && std::abs(*detuning) >= 1.0;
    if (spread > kSmall && !off_resonant) {
        std::ostringstream os;
        os << "kv sqrt(N)/Gamma = " << spread << " is not small (N = " << order << ")";
        warnings.push_back(os.str());
    }
    if (detuning && std::abs(*detuning) >= 1.0 && std::abs(*detuning) * kSmall < spread) {
        std::ostringstream os;
        os << "detuning " << *detuning << " is not large against sqrt(N) kv = " << spread;
        warnings.push_back(os.str());
    }
    return warnings;
}

double critical_order(double kv_over_gamma) {
    require_positive(kv_over_gamma, "critical_order");
    if (kv_over_gamma == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 3.0 * std::pow(1.5 * kv_over_gamma, -2.0 / 3.0);
}

double mesoscopic_bound(double kv_over_gamma) {
    require_positive(kv_over_gamma, "mesoscopic_bound");
    if (kv_over_gamma == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return std::cbrt(1.0 / kv_over_gamma);
}

bool is_mesoscopic(double kv_over_gamma, double b) { return kv_over_gamma < 1.0 / (b * b * b); }

CoherenceBudget coherence_scales(double kv_over_gamma, double ell) {
    require_positive(kv_over_gamma, "coherence_scales");
    if (!(ell > 0.0)) {
        throw std::domain_error("coherence_scales: ell must be > 0");
    }
    CoherenceBudget b;
    b.kv_over_gamma = kv_over_gamma;
    b.ell = ell;
    b.transport_time = 1.0;
    b.diffusion = ell * ell / (3.0 * b.transport_time);
    b.n_phi = critical_order(kv_over_gamma);
    b.tau_phi = b.n_phi * b.transport_time;
    b.l_phi = kv_over_gamma == 0.0 ? std::numeric_limits<double>::infinity()
                                   : std::pow(1.5 * kv_over_gamma, -1.0 / 3.0) * ell;
    b.b_max = mesoscopic_bound(kv_over_gamma);
    b.b_max_floor = std::isfinite(b.b_max) ? static_cast<long long>(std::floor(b.b_max))
                                           : std::numeric_limits<long long>::max();
    return b;
}

bool CrossCheckReport::all_within_tolerance() const {
    for (auto const& o : orders) {
        if (!o.within_tolerance) return false;
    }
    return !orders.empty();
}

CrossCheckReport mc_cross_check(ContrastEstimate const& mc, double kv_over_gamma, double detuning,
                                std::vector<int> const& orders) {
    CrossCheckReport report;
    for (int n : orders) {
        auto const* oc = mc.order(n);
        if (oc == nullptr || !oc->present) {
            report.notes.push_back("order " + std::to_string(n) + " absent from the Monte-Carlo estimate");
            continue;
        }
        for (auto& w : contrast_decay_warnings(n, kv_over_gamma, detuning)) {
            report.binding = false;
            report.notes.push_back(std::move(w));
        }
        OrderComparison cmp;
        cmp.order = n;
        cmp.mc = oc->contrast;
        cmp.mc_stderr = oc->std_error;
        cmp.analytic = contrast_decay(n, kv_over_gamma);
        cmp.ratio = cmp.mc / cmp.analytic;
        cmp.ratio_stderr = cmp.mc_stderr / cmp.analytic;
        double const tol = std::max(3.0 * cmp.mc_stderr, 0.05 * cmp.analytic);
        cmp.within_tolerance = std::abs(cmp.mc - cmp.analytic) <= tol;
        report.orders.push_back(cmp);
    }
    return report;
}

}  // namespace cbs
